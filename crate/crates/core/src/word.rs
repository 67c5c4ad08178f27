//! Free group elements and endomorphisms.
//!
//! A [`Word`] is a freely reduced sequence of letters over a fixed alphabet of
//! `rank` generators. Every constructor reduces, so every `Word` in circulation
//! is reduced and the empty sequence is the identity.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("endomorphism of rank {rank} needs {rank} images, got {found}")]
    ImageCount { rank: usize, found: usize },
    #[error("cannot parse word at column {column}: {message}")]
    Parse { column: usize, message: String },
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    generator: u32,
    inverse: bool,
}

impl Letter {
    pub fn pos(generator: usize) -> Self {
        Letter {
            generator: generator as u32,
            inverse: false,
        }
    }

    pub fn neg(generator: usize) -> Self {
        Letter {
            generator: generator as u32,
            inverse: true,
        }
    }

    /// `sign` must be `1` or `-1`.
    pub fn new(generator: usize, sign: i32) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Letter {
            generator: generator as u32,
            inverse: sign < 0,
        }
    }

    #[inline]
    pub fn generator(self) -> usize {
        self.generator as usize
    }

    #[inline]
    pub fn sign(self) -> i32 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    #[inline]
    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

/// Display name of generator `index` in an alphabet of `rank` letters:
/// `a, b, c, …` up to rank 26 and `x1, x2, …` beyond.
pub fn generator_name(index: usize, rank: usize) -> String {
    if rank <= 26 {
        ((b'a' + index as u8) as char).to_string()
    } else {
        format!("x{}", index + 1)
    }
}

/// A freely reduced word in the free group of rank `rank`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity(rank: usize) -> Self {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    pub fn generator(rank: usize, index: usize) -> Result<Self, WordError> {
        Word::reduce(rank, [Letter::pos(index)])
    }

    /// Freely reduces a raw letter sequence with a single stack pass.
    pub fn reduce<I>(rank: usize, letters: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut w = Word::identity(rank);
        for l in letters {
            if l.generator() >= rank {
                return Err(WordError::GeneratorOutOfRange {
                    index: l.generator(),
                    rank,
                });
            }
            w.push(l);
        }
        Ok(w)
    }

    /// Builds a word from `(generator, exponent)` pairs, e.g. `[(0, 1), (1, 2)]` is `a b^2`.
    pub fn from_powers(rank: usize, powers: &[(usize, i32)]) -> Result<Self, WordError> {
        let letters = powers.iter().flat_map(|&(g, e)| {
            let l = if e < 0 {
                Letter::neg(g)
            } else {
                Letter::pos(g)
            };
            std::iter::repeat_n(l, e.unsigned_abs() as usize)
        });
        Word::reduce(rank, letters)
    }

    /// Appends one letter, cancelling against the last letter when possible.
    #[inline]
    pub(crate) fn push(&mut self, l: Letter) {
        match self.letters.last() {
            Some(&last) if last.cancels(l) => {
                self.letters.pop();
            }
            _ => self.letters.push(l),
        }
    }

    pub(crate) fn extend_from(&mut self, other: &Word) {
        for &l in &other.letters {
            self.push(l);
        }
    }

    pub(crate) fn extend_inverse_from(&mut self, other: &Word) {
        for &l in other.letters.iter().rev() {
            self.push(l.inverse());
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn multiply(&self, other: &Word) -> Result<Word, WordError> {
        check_rank(self.rank, other.rank)?;
        let mut w = self.clone();
        w.extend_from(other);
        Ok(w)
    }

    pub fn invert(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Signed exponent sum of every generator: the image of the word in `Z^rank`.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for l in &self.letters {
            v[l.generator()] += l.sign() as i64;
        }
        v
    }

    /// Reinterprets the word over a larger alphabet, keeping generator indices.
    pub fn widen(&self, rank: usize) -> Result<Word, WordError> {
        if rank < self.rank {
            return Err(WordError::RankMismatch {
                expected: self.rank,
                found: rank,
            });
        }
        Ok(Word {
            rank,
            letters: self.letters.clone(),
        })
    }

    /// Renders with exponent runs (`a^2 b^-1`), `1` for the identity.
    pub fn render_with<F: Fn(usize) -> String>(&self, name: F) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let exp = (j - i) as i64 * l.sign() as i64;
            let n = name(l.generator());
            parts.push(if exp == 1 { n } else { format!("{n}^{exp}") });
            i = j;
        }
        parts.join(" ")
    }

    /// Parses juxtaposed generator names with optional integer exponents,
    /// e.g. `a b^2 A` or `x1 x2^-1`. Uppercase letters denote inverses when
    /// `rank <= 26`; `1` denotes the identity.
    pub fn parse(rank: usize, text: &str) -> Result<Word, WordError> {
        let err = |column: usize, message: String| WordError::Parse { column, message };
        let bytes = text.as_bytes();
        let mut letters = Vec::new();
        let mut i = 0;
        let skip_ws = |i: &mut usize| {
            while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
                *i += 1;
            }
        };
        skip_ws(&mut i);
        if text.trim() == "1" {
            return Ok(Word::identity(rank));
        }
        while i < bytes.len() {
            let start = i;
            let c = bytes[i];
            let (generator, mut sign) = if rank > 26 && (c == b'x' || c == b'X') {
                i += 1;
                let ds = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(err(start + 1, "expected generator number after 'x'".into()));
                }
                let n: usize = text[ds..i]
                    .parse()
                    .map_err(|_| err(ds + 1, "bad number".into()))?;
                if n == 0 {
                    return Err(err(ds + 1, "generators are numbered from x1".into()));
                }
                (n - 1, if c == b'X' { -1 } else { 1 })
            } else if c.is_ascii_lowercase() {
                i += 1;
                ((c - b'a') as usize, 1)
            } else if c.is_ascii_uppercase() {
                i += 1;
                ((c - b'A') as usize, -1)
            } else {
                return Err(err(
                    start + 1,
                    format!("unexpected character '{}'", c as char),
                ));
            };
            if generator >= rank {
                return Err(WordError::GeneratorOutOfRange {
                    index: generator,
                    rank,
                });
            }
            let mut exp: i64 = 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let es = i;
                if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
                    i += 1;
                }
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                exp = text[es..i]
                    .parse()
                    .map_err(|_| err(es + 1, "expected integer exponent after '^'".into()))?;
            }
            if exp < 0 {
                sign = -sign;
            }
            for _ in 0..exp.unsigned_abs() {
                letters.push(Letter::new(generator, sign));
            }
            skip_ws(&mut i);
        }
        Word::reduce(rank, letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rank = self.rank;
        f.write_str(&self.render_with(|g| generator_name(g, rank)))
    }
}

fn check_rank(expected: usize, found: usize) -> Result<(), WordError> {
    if expected == found {
        Ok(())
    } else {
        Err(WordError::RankMismatch { expected, found })
    }
}

/// An endomorphism of the free group, given by the images of the generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Endomorphism {
    rank: usize,
    images: Vec<Word>,
}

impl Endomorphism {
    pub fn new(rank: usize, images: Vec<Word>) -> Result<Self, WordError> {
        if images.len() != rank {
            return Err(WordError::ImageCount {
                rank,
                found: images.len(),
            });
        }
        for w in &images {
            check_rank(rank, w.rank)?;
        }
        Ok(Endomorphism { rank, images })
    }

    pub fn identity(rank: usize) -> Self {
        let images = (0..rank)
            .map(|i| Word {
                rank,
                letters: vec![Letter::pos(i)],
            })
            .collect();
        Endomorphism { rank, images }
    }

    /// Convenience constructor from display strings, one per generator.
    pub fn parse(rank: usize, images: &[&str]) -> Result<Self, WordError> {
        let images = images
            .iter()
            .map(|s| Word::parse(rank, s))
            .collect::<Result<Vec<_>, _>>()?;
        Endomorphism::new(rank, images)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, generator: usize) -> &Word {
        &self.images[generator]
    }

    pub fn apply(&self, w: &Word) -> Result<Word, WordError> {
        check_rank(self.rank, w.rank)?;
        Ok(self.apply_unchecked(w))
    }

    pub(crate) fn apply_unchecked(&self, w: &Word) -> Word {
        let mut out = Word::identity(self.rank);
        for &l in &w.letters {
            let img = &self.images[l.generator()];
            if l.is_inverse() {
                out.extend_inverse_from(img);
            } else {
                out.extend_from(img);
            }
        }
        out
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Endomorphism) -> Result<Endomorphism, WordError> {
        check_rank(self.rank, other.rank)?;
        let images = other
            .images
            .iter()
            .map(|w| self.apply_unchecked(w))
            .collect();
        Ok(Endomorphism {
            rank: self.rank,
            images,
        })
    }

    pub fn power(&self, k: u32) -> Endomorphism {
        let mut acc = Endomorphism::identity(self.rank);
        for _ in 0..k {
            acc = self.compose(&acc).expect("same rank");
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.letters.len() == 1 && w.letters[0] == Letter::pos(i))
    }

    /// Longest generator image.
    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn render_with<F: Fn(usize) -> String>(&self, name: F) -> String {
        self.images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{} -> {}", name(i), w.render_with(&name)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rank = self.rank;
        f.write_str(&self.render_with(|g| generator_name(g, rank)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        Word::parse(2, s).unwrap()
    }

    fn example_phi() -> Endomorphism {
        Endomorphism::parse(2, &["b", "a b^2"]).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let a = Letter::pos(0);
        let b = Letter::pos(1);
        let r = Word::reduce(2, [a, b, b.inverse(), a]).unwrap();
        assert_eq!(r, w("a a"));
        assert!(Word::reduce(2, []).unwrap().is_identity());
        assert!(Word::reduce(2, [a, a.inverse(), b, b.inverse()])
            .unwrap()
            .is_identity());
        assert!(matches!(
            Word::reduce(2, [Letter::pos(2)]),
            Err(WordError::GeneratorOutOfRange { index: 2, rank: 2 })
        ));
    }

    #[test]
    fn multiply_and_invert() {
        assert_eq!(w("a b").multiply(&w("b^-1 a")).unwrap(), w("a^2"));
        let x = w("a b^-1 a");
        assert!(x.multiply(&x.invert()).unwrap().is_identity());
        assert_eq!(w("b").multiply(&w("a b b")).unwrap().to_string(), "b a b^2");
        assert_eq!(w("a b").invert(), w("b^-1 a^-1"));
        assert_eq!(x.invert(), w("a^-1 b a^-1"));
        assert!(Word::identity(2).invert().is_identity());
        assert!(w("a").multiply(&Word::identity(3)).is_err());
    }

    #[test]
    fn apply_example_map() {
        let phi = example_phi();
        assert_eq!(phi.apply(&w("a b")).unwrap(), w("b a b b"));
        assert!(phi.apply(&Word::identity(2)).unwrap().is_identity());
        assert_eq!(phi.apply(&w("a a")).unwrap(), w("b b"));
        // φ(ab) written as b^2 (ab)^-1 a^2 b^2 reduces to the same word.
        assert_eq!(w("b^2 b^-1 a^-1 a^2 b^2"), w("b a b b"));
    }

    #[test]
    fn powers_of_example_map() {
        let phi = example_phi();
        assert_eq!(phi.power(2).image(0), &w("a b b"));
        assert_eq!(phi.power(3).image(0), &w("b a b b a b b"));
        assert_eq!(phi.compose(&Endomorphism::identity(2)).unwrap(), phi);
        assert!(phi.power(0).is_identity());
    }

    #[test]
    fn parse_and_render() {
        assert_eq!(w("A b^-2 a^3").to_string(), "a^-1 b^-2 a^3");
        assert_eq!(Word::identity(2).to_string(), "1");
        assert_eq!(Word::parse(2, "1").unwrap(), Word::identity(2));
        let big = Word::parse(30, "x1 x30^-2").unwrap();
        assert_eq!(big.to_string(), "x1 x30^-2");
        assert!(matches!(
            Word::parse(2, "c"),
            Err(WordError::GeneratorOutOfRange { .. })
        ));
        assert!(matches!(
            Word::parse(2, "a ^"),
            Err(WordError::Parse { .. })
        ));
        assert!(matches!(
            Word::parse(2, "(a b)^-1"),
            Err(WordError::Parse { column: 1, .. })
        ));
    }

    #[test]
    fn endomorphism_shape_errors() {
        assert!(Endomorphism::new(2, vec![w("a")]).is_err());
        assert!(Endomorphism::new(2, vec![w("a"), Word::identity(3)]).is_err());
        let phi = example_phi();
        assert!(phi.compose(&Endomorphism::identity(3)).is_err());
    }

    pub(crate) fn arb_letters(rank: usize, max: usize) -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec((0..rank, any::<bool>()), 0..max).prop_map(|v| {
            v.into_iter()
                .map(|(g, inv)| if inv { Letter::neg(g) } else { Letter::pos(g) })
                .collect()
        })
    }

    fn arb_word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
        arb_letters(rank, max).prop_map(move |l| Word::reduce(rank, l).unwrap())
    }

    fn arb_endo(rank: usize) -> impl Strategy<Value = Endomorphism> {
        prop::collection::vec(arb_word(rank, 5), rank)
            .prop_map(move |imgs| Endomorphism::new(rank, imgs).unwrap())
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(letters in arb_letters(3, 30)) {
            let once = Word::reduce(3, letters).unwrap();
            let twice = Word::reduce(3, once.letters().iter().copied()).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn inverse_cancels(x in arb_word(3, 20)) {
            prop_assert!(x.multiply(&x.invert()).unwrap().is_identity());
            prop_assert_eq!(x.invert().invert(), x);
        }

        #[test]
        fn apply_is_homomorphism(phi in arb_endo(3), u in arb_word(3, 12), v in arb_word(3, 12)) {
            let lhs = phi.apply(&u.multiply(&v).unwrap()).unwrap();
            let rhs = phi.apply(&u).unwrap().multiply(&phi.apply(&v).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn compose_is_associative(f in arb_endo(2), g in arb_endo(2), h in arb_endo(2)) {
            let left = f.compose(&g).unwrap().compose(&h).unwrap();
            let right = f.compose(&g.compose(&h).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn powers_add(f in arb_endo(2), j in 0u32..3, k in 0u32..3) {
            prop_assert_eq!(f.power(j + k), f.power(j).compose(&f.power(k)).unwrap());
        }

        #[test]
        fn render_parse_round_trip(x in arb_word(3, 20)) {
            prop_assert_eq!(Word::parse(3, &x.to_string()).unwrap(), x);
        }
    }
}
