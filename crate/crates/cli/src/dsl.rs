//! The problem-spec input language.
//!
//! ```text
//! rank: 2
//! phi: a -> b, b -> a b^2
//! H: [a^2, b^2, a b]
//! ```
//!
//! `H` is optional and may also be `H: mod <n>` (the mod-n homology kernel)
//! or `H: total <n>` (the kernel of the total exponent sum mod n). Blank lines
//! and lines starting with `#` are ignored.

use std::fmt;

use endospec::word::{generator_name, Endomorphism, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupSpec {
    Generators(Vec<Word>),
    Mod(u64),
    Total(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    pub rank: usize,
    pub phi: Endomorphism,
    pub subgroup: Option<SubgroupSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DslError {
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    UnknownGenerator {
        line: usize,
        column: usize,
        name: String,
    },
    RankMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DslError::Syntax {
                line,
                column,
                message,
            } => write!(f, "syntax error at line {line}, column {column}: {message}"),
            DslError::UnknownGenerator { line, column, name } => write!(
                f,
                "unknown generator '{name}' at line {line}, column {column}"
            ),
            DslError::RankMismatch {
                line,
                expected,
                found,
            } => write!(
                f,
                "rank mismatch at line {line}: rank is {expected} but phi gives {found} images"
            ),
        }
    }
}

impl std::error::Error for DslError {}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> DslError {
    DslError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Parses a word that starts at byte `offset` of line `line`.
fn parse_word(rank: usize, text: &str, line: usize, offset: usize) -> Result<Word, DslError> {
    Word::parse(rank, text).map_err(|e| match e {
        WordError::Parse { column, message } => syntax(line, offset + column, message),
        WordError::GeneratorOutOfRange { .. } => unknown_generator(rank, text, line, offset),
        other => syntax(line, offset + 1, other.to_string()),
    })
}

/// Locates the first generator name in `text` that is outside the alphabet.
fn unknown_generator(rank: usize, text: &str, line: usize, offset: usize) -> DslError {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_alphabetic() {
            let start = i;
            i += 1;
            if rank > 26 {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let name = &text[start..i];
            let known = if rank > 26 {
                name[1..]
                    .parse::<usize>()
                    .is_ok_and(|n| n >= 1 && n <= rank && name[..1].eq_ignore_ascii_case("x"))
            } else {
                ((c.to_ascii_lowercase() - b'a') as usize) < rank
            };
            if !known {
                return DslError::UnknownGenerator {
                    line,
                    column: offset + start + 1,
                    name: name.to_string(),
                };
            }
        } else {
            i += 1;
        }
    }
    syntax(line, offset + 1, "generator out of range")
}

/// Splits `text` on commas, returning each piece with its byte offset.
fn split_commas(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if c == ',' {
            out.push((start, &text[start..i]));
            start = i + 1;
        }
    }
    out.push((start, &text[start..]));
    out
}

/// Byte offset of the first non-space character of `piece` within it.
fn leading_space(piece: &str) -> usize {
    piece.len() - piece.trim_start().len()
}

fn parse_phi(
    rank: usize,
    body: &str,
    line: usize,
    offset: usize,
) -> Result<Endomorphism, DslError> {
    let mut images: Vec<Option<Word>> = vec![None; rank];
    let mut count = 0;
    for (at, piece) in split_commas(body) {
        let col = offset + at + leading_space(piece);
        let Some((lhs, rhs)) = piece.split_once("->") else {
            return Err(syntax(line, col + 1, "expected '<generator> -> <word>'"));
        };
        let source = parse_word(rank, lhs, line, offset + at)?;
        let g = match source.letters() {
            [l] if !l.is_inverse() => l.generator(),
            _ => {
                return Err(syntax(
                    line,
                    col + 1,
                    format!("'{}' is not a generator", lhs.trim()),
                ))
            }
        };
        if images[g].is_some() {
            return Err(syntax(
                line,
                col + 1,
                format!("image of {} given twice", generator_name(g, rank)),
            ));
        }
        let rhs_offset = offset + at + lhs.len() + 2;
        if rhs.trim().is_empty() {
            return Err(syntax(line, rhs_offset + 1, "missing image word"));
        }
        images[g] = Some(parse_word(rank, rhs, line, rhs_offset)?);
        count += 1;
    }
    if count != rank {
        return Err(DslError::RankMismatch {
            line,
            expected: rank,
            found: count,
        });
    }
    let images = images
        .into_iter()
        .map(|w| w.expect("all present"))
        .collect();
    Ok(Endomorphism::new(rank, images).expect("images have the right rank"))
}

fn parse_subgroup(
    rank: usize,
    body: &str,
    line: usize,
    offset: usize,
) -> Result<SubgroupSpec, DslError> {
    let trimmed = body.trim();
    let lead = offset + leading_space(body);
    let modulus = |rest: &str, keyword: &str| -> Result<u64, DslError> {
        let col = lead + keyword.len() + 1 + leading_space(rest);
        rest.trim()
            .parse::<u64>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| syntax(line, col + 1, "expected a positive integer modulus"))
    };
    if let Some(rest) = trimmed.strip_prefix("mod ") {
        return Ok(SubgroupSpec::Mod(modulus(rest, "mod")?));
    }
    if let Some(rest) = trimmed.strip_prefix("total ") {
        return Ok(SubgroupSpec::Total(modulus(rest, "total")?));
    }
    let Some(inner) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) else {
        return Err(syntax(
            line,
            lead + 1,
            "expected '[<word>, ...]', 'mod <n>' or 'total <n>'",
        ));
    };
    let inner_offset = lead + 1;
    if inner.trim().is_empty() {
        return Ok(SubgroupSpec::Generators(Vec::new()));
    }
    let mut words = Vec::new();
    for (at, piece) in split_commas(inner) {
        if piece.trim().is_empty() {
            return Err(syntax(line, inner_offset + at + 1, "empty generator"));
        }
        words.push(parse_word(rank, piece, line, inner_offset + at)?);
    }
    Ok(SubgroupSpec::Generators(words))
}

pub fn parse_spec(text: &str) -> Result<ProblemSpec, DslError> {
    let mut rank: Option<usize> = None;
    let mut phi: Option<Endomorphism> = None;
    let mut subgroup = None;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.trim_end();
        if content.trim().is_empty() || content.trim_start().starts_with('#') {
            continue;
        }
        let Some((key, body)) = content.split_once(':') else {
            return Err(syntax(
                line,
                leading_space(content) + 1,
                "expected '<key>: <value>'",
            ));
        };
        let offset = key.len() + 1;
        match key.trim() {
            "rank" => {
                if rank.is_some() {
                    return Err(syntax(line, 1, "rank given twice"));
                }
                let r = body.trim().parse::<usize>().ok().filter(|&r| r >= 1);
                let col = offset + leading_space(body) + 1;
                rank =
                    Some(r.ok_or_else(|| syntax(line, col, "expected a positive integer rank"))?);
            }
            "phi" => {
                let Some(r) = rank else {
                    return Err(syntax(line, 1, "'rank:' must come before 'phi:'"));
                };
                if phi.is_some() {
                    return Err(syntax(line, 1, "phi given twice"));
                }
                phi = Some(parse_phi(r, body, line, offset)?);
            }
            "H" => {
                let Some(r) = rank else {
                    return Err(syntax(line, 1, "'rank:' must come before 'H:'"));
                };
                if subgroup.is_some() {
                    return Err(syntax(line, 1, "H given twice"));
                }
                subgroup = Some(parse_subgroup(r, body, line, offset)?);
            }
            other => {
                return Err(syntax(
                    line,
                    leading_space(content) + 1,
                    format!("unknown key '{other}'"),
                ))
            }
        }
    }
    let Some(rank) = rank else {
        return Err(syntax(last_line.max(1), 1, "missing 'rank:' line"));
    };
    let Some(phi) = phi else {
        return Err(syntax(last_line.max(1), 1, "missing 'phi:' line"));
    };
    Ok(ProblemSpec {
        rank,
        phi,
        subgroup,
    })
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank: {}", self.rank)?;
        writeln!(f, "phi: {}", self.phi)?;
        match &self.subgroup {
            None => Ok(()),
            Some(SubgroupSpec::Mod(n)) => writeln!(f, "H: mod {n}"),
            Some(SubgroupSpec::Total(n)) => writeln!(f, "H: total {n}"),
            Some(SubgroupSpec::Generators(ws)) => {
                let words: Vec<String> = ws.iter().map(Word::to_string).collect();
                writeln!(f, "H: [{}]", words.join(", "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EXAMPLE: &str = "rank: 2\nphi: a -> b, b -> a b^2\nH: [a^2, b^2, a b]";

    #[test]
    fn example_instance() {
        let spec = parse_spec(EXAMPLE).unwrap();
        assert_eq!(spec.rank, 2);
        assert_eq!(spec.phi, Endomorphism::parse(2, &["b", "a b^2"]).unwrap());
        let gens = ["a^2", "b^2", "a b"].map(|s| Word::parse(2, s).unwrap());
        assert_eq!(spec.subgroup, Some(SubgroupSpec::Generators(gens.to_vec())));
    }

    #[test]
    fn identity_on_z() {
        let spec = parse_spec("rank: 1\nphi: a -> a").unwrap();
        assert!(spec.phi.is_identity());
        assert_eq!(spec.subgroup, None);
    }

    #[test]
    fn unknown_generator() {
        assert_eq!(
            parse_spec("rank: 2\nphi: a -> c").unwrap_err(),
            DslError::UnknownGenerator {
                line: 2,
                column: 11,
                name: "c".into()
            }
        );
        assert_eq!(
            parse_spec("rank: 2\nphi: a -> a, b -> b\nH: [a, b C]").unwrap_err(),
            DslError::UnknownGenerator {
                line: 3,
                column: 10,
                name: "C".into()
            }
        );
    }

    #[test]
    fn rank_mismatch() {
        assert_eq!(
            parse_spec("rank: 3\nphi: a -> b, b -> a").unwrap_err(),
            DslError::RankMismatch {
                line: 2,
                expected: 3,
                found: 2
            }
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let cases = [
            ("rank: two\nphi: a -> a", 1, 7),
            ("rank: 1\nphi: a => a", 2, 6),
            ("rank: 1\nphi: a -> a^x", 2, 13),
            ("rank: 1\nphi: a -> a\nH: {a}", 3, 4),
            ("rank: 1\nphi: a -> a\nH: mod 0", 3, 8),
            ("phi: a -> a", 1, 1),
            ("rank: 1\nfoo: 3", 2, 1),
            ("rank: 1", 1, 1),
        ];
        for (text, line, column) in cases {
            match parse_spec(text).unwrap_err() {
                DslError::Syntax {
                    line: l, column: c, ..
                } => assert_eq!((l, c), (line, column), "{text:?}"),
                other => panic!("{text:?}: {other}"),
            }
        }
    }

    #[test]
    fn subgroup_directives_and_comments() {
        let spec =
            parse_spec("# example\nrank: 3\n\nphi: c -> a, a -> b, b -> c\nH: total 2\n").unwrap();
        assert_eq!(spec.subgroup, Some(SubgroupSpec::Total(2)));
        assert_eq!(spec.phi.to_string(), "a -> b, b -> c, c -> a");
        let spec = parse_spec("rank: 2\nphi: a -> A, b -> 1\nH: mod 3").unwrap();
        assert_eq!(spec.subgroup, Some(SubgroupSpec::Mod(3)));
        assert_eq!(spec.phi.to_string(), "a -> a^-1, b -> 1");
    }

    fn arb_word(rank: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((0..rank, any::<bool>()), 0..8).prop_map(move |ls| {
            let powers: Vec<(usize, i32)> = ls
                .into_iter()
                .map(|(g, inv)| (g, if inv { -1 } else { 1 }))
                .collect();
            Word::from_powers(rank, &powers).unwrap()
        })
    }

    fn arb_spec() -> impl Strategy<Value = ProblemSpec> {
        prop_oneof![1usize..5, 27usize..29].prop_flat_map(|rank| {
            let subgroup = prop_oneof![
                Just(None),
                (1u64..10).prop_map(|n| Some(SubgroupSpec::Mod(n))),
                (1u64..10).prop_map(|n| Some(SubgroupSpec::Total(n))),
                prop::collection::vec(arb_word(rank), 0..4)
                    .prop_map(|ws| Some(SubgroupSpec::Generators(ws))),
            ];
            (prop::collection::vec(arb_word(rank), rank), subgroup).prop_map(
                move |(images, subgroup)| ProblemSpec {
                    rank,
                    phi: Endomorphism::new(rank, images).unwrap(),
                    subgroup,
                },
            )
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(spec in arb_spec()) {
            let text = spec.to_string();
            prop_assert_eq!(parse_spec(&text).unwrap(), spec);
        }
    }
}
