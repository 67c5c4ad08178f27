//! Randomized property suites: containment, divisibility, the eventual
//! kernel lemma, the Fox cross-check, structural graph invariants, the
//! root-of-unity decision, and growth bounds.
//!
//! Trial `i` of a suite seeded with `s` draws everything from a ChaCha8 rng
//! seeded with [`trial_seed(s, i)`](crate::subgroups::trial_seed), so trials
//! are independent tasks and any failure can be replayed on its own.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::{map_with, Execution};
use crate::graph::{IndexResult, SubgroupGraph};
use crate::growth::growth_sequence;
use crate::linalg::{
    abelianization_matrix, all_roots_of_unity, max_root_modulus, spectrum_poly, IntMatrix, IntPoly,
};
use crate::spectra::{check_containment, check_lemma, eventual_kernel, is_injective};
use crate::subgroups::{
    draw_automorphism, draw_endomorphism, mod_n_homology_kernel, preserves_total_exponent_kernel,
    total_exponent_kernel, trial_seed,
};
use crate::torus::{alexander_polynomial, cofactor_det, mapping_torus};
use crate::word::{Endomorphism, Word};

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Longest image drawn by the containment and lemma suites.
pub const MAX_IMAGE_LENGTH: usize = 6;
/// Most Nielsen moves in a random automorphism.
pub const MAX_MOVES: usize = 12;

/// Failures kept verbatim in a report.
const KEPT_FAILURES: usize = 10;

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub seed: u64,
    /// Number of individual checks run.
    pub checks: usize,
    pub passed: usize,
    /// The first few failures, each naming its trial.
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.passed == self.checks
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {}/{} (seed {}, {:.2?})",
            if self.ok() { "PASS" } else { "FAIL" },
            self.name,
            self.passed,
            self.checks,
            self.seed,
            self.elapsed
        )?;
        for fail in &self.failures {
            write!(f, "\n    {fail}")?;
        }
        Ok(())
    }
}

/// Each trial returns one entry per check: `Ok` or a failure description.
fn run_suite<F>(
    name: &'static str,
    seed: u64,
    trials: usize,
    mode: Execution,
    trial: F,
) -> SuiteReport
where
    F: Fn(usize, &mut ChaCha8Rng) -> Vec<Result<(), String>> + Sync + Send,
{
    let start = Instant::now();
    let indices: Vec<usize> = (0..trials).collect();
    let results = map_with(mode, &indices, |&i| {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i as u64));
        trial(i, &mut rng)
    });
    let mut checks = 0;
    let mut passed = 0;
    let mut failures = Vec::new();
    for (i, rs) in results.into_iter().enumerate() {
        for r in rs {
            checks += 1;
            match r {
                Ok(()) => passed += 1,
                Err(e) if failures.len() < KEPT_FAILURES => {
                    failures.push(format!("trial {i}: {e}"))
                }
                Err(_) => {}
            }
        }
    }
    SuiteReport {
        name,
        seed,
        checks,
        passed,
        failures,
        elapsed: start.elapsed(),
    }
}

fn kernels(rank: usize) -> [(&'static str, SubgroupGraph); 3] {
    [
        (
            "mod-2 kernel",
            mod_n_homology_kernel(rank, 2).expect("small"),
        ),
        (
            "mod-3 kernel",
            mod_n_homology_kernel(rank, 3).expect("small"),
        ),
        (
            "total-2 kernel",
            total_exponent_kernel(rank, 2).expect("small"),
        ),
    ]
}

/// Ranks cycle through 2, 3, 4.
fn trial_rank(i: usize) -> usize {
    2 + i % 3
}

/// Draws until the map also preserves the total-exponent kernel, which is
/// the one test subgroup that is not characteristic.
fn draw_until_invariant<F: FnMut() -> Endomorphism>(mut draw: F) -> Endomorphism {
    loop {
        let phi = draw();
        if preserves_total_exponent_kernel(&phi, 2) {
            return phi;
        }
    }
}

/// `Λ(φ) ⊆ Λ(φ|_H)` for random endomorphisms against three kernels.
pub fn theorem_suite(seed: u64, trials: usize, mode: Execution) -> SuiteReport {
    run_suite("containment", seed, trials, mode, |i, rng| {
        let rank = trial_rank(i);
        let phi = draw_until_invariant(|| draw_endomorphism(rng, rank, MAX_IMAGE_LENGTH));
        kernels(rank)
            .iter()
            .map(|(name, g)| match check_containment(&phi, g) {
                Ok(r) if r.contained => Ok(()),
                Ok(r) => Err(format!(
                    "{phi} on {name}: {} not inside {}",
                    r.spectrum_f, r.spectrum_h
                )),
                Err(e) => Err(format!("{phi} on {name}: {e}")),
            })
            .collect()
    })
}

/// `Δ | Δ̃` for random automorphisms against three kernels.
pub fn divisibility_suite(seed: u64, trials: usize, mode: Execution) -> SuiteReport {
    run_suite("divisibility", seed, trials, mode, |i, rng| {
        let rank = trial_rank(i);
        let phi = draw_until_invariant(|| {
            let moves = rng.gen_range(0..=MAX_MOVES);
            draw_automorphism(rng, rank, moves)
        });
        kernels(rank)
            .iter()
            .map(|(name, g)| match check_containment(&phi, g) {
                Ok(r) if r.delta_divides == Some(true) => Ok(()),
                Ok(r) => Err(format!(
                    "{phi} on {name}: Δ = {} does not divide Δ̃ = {}",
                    r.delta_f, r.delta_h
                )),
                Err(e) => Err(format!("{phi} on {name}: {e}")),
            })
            .collect()
    })
}

/// `Λ(φ̄) = Λ(φ)` and the shape of the rank sequence, for random maps that
/// kill a generator.
pub fn lemma_suite(seed: u64, trials: usize, mode: Execution) -> SuiteReport {
    run_suite("eventual kernel", seed, trials, mode, |i, rng| {
        let rank = trial_rank(i);
        let phi = draw_endomorphism(rng, rank, MAX_IMAGE_LENGTH);
        let killed = rng.gen_range(0..rank);
        let kill = Endomorphism::new(
            rank,
            (0..rank)
                .map(|j| {
                    if j == killed {
                        Word::identity(rank)
                    } else {
                        Word::generator(rank, j).expect("in range")
                    }
                })
                .collect(),
        )
        .expect("same rank");
        let phi = phi.compose(&kill).expect("same rank");
        let ek = eventual_kernel(&phi);
        let mut out = vec![check(check_lemma(&phi), || format!("{phi}: Λ(φ̄) ≠ Λ(φ)"))];
        out.push(check(!is_injective(&phi), || format!("{phi} is injective")));
        out.push(check(ek.k <= rank, || {
            format!("{phi}: k = {} > rank", ek.k)
        }));
        let strictly_drops = ek.ranks[..=ek.k].windows(2).all(|w| w[0] > w[1]);
        let stable = ek.ranks[ek.k] == ek.ranks[ek.k + 1];
        out.push(check(strictly_drops && stable, || {
            format!("{phi}: rank sequence {:?}", ek.ranks)
        }));
        out
    })
}

fn check(ok: bool, describe: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(describe())
    }
}

/// Alexander polynomial of the mapping torus equals `det(tI - φ^ab)` for
/// random injective maps.
pub fn fox_suite(seed: u64, trials: usize, mode: Execution) -> SuiteReport {
    run_suite("fox calculus", seed, trials, mode, |i, rng| {
        let rank = trial_rank(i);
        let phi = loop {
            let phi = draw_endomorphism(rng, rank, MAX_IMAGE_LENGTH);
            if is_injective(&phi) {
                break phi;
            }
        };
        let fox = alexander_polynomial(&mapping_torus(&phi)).expect("square");
        let lin = abelianization_matrix(&phi).char_poly();
        vec![check(fox == lin, || {
            format!("{phi}: Fox {fox}, linear algebra {lin}")
        })]
    })
}

/// Nielsen–Schreier counts on random kernels, rewrite round trips on random
/// members, and `charPoly` against cofactor expansion.
pub fn structural_suite(seed: u64, trials: usize, mode: Execution) -> SuiteReport {
    run_suite("structure", seed, trials, mode, |i, rng| {
        let mut out = Vec::new();
        if i < 50 {
            let rank = rng.gen_range(1..=4);
            let n = rng.gen_range(2..=3);
            let g = if rng.gen_bool(0.5) {
                mod_n_homology_kernel(rank, n)
            } else {
                total_exponent_kernel(rank, n)
            }
            .expect("small");
            let m = g.index().finite().expect("coverings have finite index");
            let expected = m * (rank - 1) + 1;
            out.push(check(g.schreier_basis().len() == expected, || {
                format!(
                    "rank {rank} index {m}: basis {} ≠ {expected}",
                    g.schreier_basis().len()
                )
            }));
        }
        out.push(rewrite_round_trip(rng));
        out.push(charpoly_against_cofactors(rng));
        out
    })
}

fn rewrite_round_trip(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let rank = rng.gen_range(2..=3);
    let g = if rng.gen_bool(0.5) {
        mod_n_homology_kernel(rank, 2)
    } else {
        total_exponent_kernel(rank, 3)
    }
    .expect("small");
    let basis = g.basis();
    let mut w = Word::identity(rank);
    for _ in 0..rng.gen_range(0..=6) {
        let h = basis.choose(rng).expect("nonempty basis");
        let h = if rng.gen_bool(0.5) {
            h.invert()
        } else {
            h.clone()
        };
        w = w.multiply(&h).expect("same rank");
    }
    match g.rewrite(&w) {
        Ok(b) if b.substitute(&basis, rank) == w => Ok(()),
        Ok(b) => Err(format!(
            "{w} rewrote to {b}, which does not substitute back"
        )),
        Err(e) => Err(format!("{w}: {e}")),
    }
}

fn charpoly_against_cofactors(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.gen_range(1..=4);
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect())
        .collect();
    let m = IntMatrix::from_rows(&rows);
    let t_minus_m: Vec<Vec<IntPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let diag = if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    };
                    IntPoly::new(vec![BigInt::from(-rows[i][j]), diag])
                })
                .collect()
        })
        .collect();
    let oracle = cofactor_det(&t_minus_m);
    let got = m.char_poly();
    check(got == oracle, || {
        format!("{m}: charPoly {got}, cofactors {oracle}")
    })
}

/// Signed permutation matrices have finite order, so every eigenvalue is a
/// root of unity.
pub fn roots_suite(seed: u64, trials: usize, mode: Execution) -> SuiteReport {
    run_suite("roots of unity", seed, trials, mode, |_, rng| {
        let n = rng.gen_range(1..=8);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let mut m = IntMatrix::zero(n);
        for (j, &i) in perm.iter().enumerate() {
            m.set(i, j, BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 }));
        }
        let s = spectrum_poly(&m.char_poly()).expect("nonzero");
        vec![check(all_roots_of_unity(&s), || {
            format!("{m}: spectrum {s}")
        })]
    })
}

/// Growth estimates against the abelian spectral radius, and
/// submultiplicativity of the length sequence.
pub fn growth_suite(seed: u64, trials: usize, mode: Execution) -> SuiteReport {
    run_suite("growth", seed, trials, mode, |i, rng| {
        let rank = trial_rank(i);
        let phi = draw_endomorphism(rng, rank, 4);
        let tr = match growth_sequence(&phi, 10) {
            Ok(tr) => tr,
            Err(e) => return vec![Err(format!("{phi}: {e}"))],
        };
        let rho = max_root_modulus(&abelianization_matrix(&phi).char_poly()).unwrap_or(0.0);
        let est = tr.estimate();
        let l = tr.lengths();
        let submultiplicative =
            (1..=5).all(|j| (1..=5).all(|k| l[j + k - 1] <= l[j - 1] * l[k - 1]));
        vec![
            check(est >= rho - 0.05, || {
                format!("{phi}: estimate {est} below spectral radius {rho}")
            }),
            check(submultiplicative, || {
                format!("{phi}: lengths {l:?} not submultiplicative")
            }),
        ]
    })
}

/// Both kernel families are invariant where they should be, with the right
/// index.
pub fn invariance_suite(seed: u64, trials: usize, mode: Execution) -> SuiteReport {
    run_suite("invariant subgroups", seed, trials, mode, |i, rng| {
        let rank = trial_rank(i);
        let n = rng.gen_range(2..=3);
        let phi = draw_endomorphism(rng, rank, MAX_IMAGE_LENGTH);
        let homology = mod_n_homology_kernel(rank, n).expect("small");
        let total = total_exponent_kernel(rank, n).expect("small");
        vec![
            check(homology.is_invariant(&phi) == Ok(true), || {
                format!("{phi}: mod-{n} kernel not invariant")
            }),
            check(
                homology.index() == IndexResult::Finite(n.pow(rank as u32)),
                || format!("mod-{n} index"),
            ),
            check(
                total.is_invariant(&phi) == Ok(preserves_total_exponent_kernel(&phi, n)),
                || format!("{phi}: total-{n} invariance criterion"),
            ),
            check(total.index() == IndexResult::Finite(n), || {
                format!("total-{n} index")
            }),
        ]
    })
}

/// Trial counts for [`run_all`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trials {
    pub theorem: usize,
    pub divisibility: usize,
    pub lemma: usize,
    pub fox: usize,
    pub structure: usize,
    pub roots: usize,
    pub growth: usize,
    pub invariance: usize,
}

impl Default for Trials {
    fn default() -> Self {
        Trials {
            theorem: 200,
            divisibility: 200,
            lemma: 200,
            fox: 100,
            structure: 100,
            roots: 20,
            growth: 100,
            invariance: 100,
        }
    }
}

impl Trials {
    /// The same count for every suite.
    pub fn uniform(n: usize) -> Self {
        Trials {
            theorem: n,
            divisibility: n,
            lemma: n,
            fox: n,
            structure: n,
            roots: n,
            growth: n,
            invariance: n,
        }
    }
}

pub fn run_all(seed: u64, trials: Trials, mode: Execution) -> Vec<SuiteReport> {
    vec![
        theorem_suite(seed, trials.theorem, mode),
        divisibility_suite(seed, trials.divisibility, mode),
        lemma_suite(seed, trials.lemma, mode),
        fox_suite(seed, trials.fox, mode),
        structural_suite(seed, trials.structure, mode),
        roots_suite(seed, trials.roots, mode),
        growth_suite(seed, trials.growth, mode),
        invariance_suite(seed, trials.invariance, mode),
    ]
}
