//! Characteristic finite-index subgroups and seeded random endomorphisms.
//!
//! Randomness comes from ChaCha8 seeded with a `u64`. Independent trials of a
//! suite draw from separate ChaCha streams of the same seed (see
//! [`trial_seed`]), so any single trial can be replayed from `(seed, trial)`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::SubgroupGraph;
use crate::word::{Endomorphism, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubgroupError {
    #[error("free group rank must be positive")]
    ZeroRank,
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("index {index} is too large to build")]
    TooLarge { index: u128 },
    #[error("Nielsen moves need rank at least 2, got {0}")]
    RankTooSmall(usize),
}

/// Largest covering built by the kernel constructors.
pub const MAX_COVERING_INDEX: usize = 1 << 20;

/// Kernel of `F → (Z/n)^r`, built as the covering graph on `(Z/n)^r` with
/// generator `i` adding the `i`-th unit vector. Index `n^r`.
pub fn mod_n_homology_kernel(rank: usize, n: usize) -> Result<SubgroupGraph, SubgroupError> {
    check(rank, n)?;
    let index = (n as u128).checked_pow(rank as u32).unwrap_or(u128::MAX);
    if index > MAX_COVERING_INDEX as u128 {
        return Err(SubgroupError::TooLarge { index });
    }
    // vertex v encodes its coordinates in base n, coordinate i at weight n^i
    let weights: Vec<usize> = (0..rank).map(|i| n.pow(i as u32)).collect();
    Ok(SubgroupGraph::from_covering(
        rank,
        index as usize,
        |v, g| {
            let digit = (v / weights[g]) % n;
            if digit + 1 == n {
                v - digit * weights[g]
            } else {
                v + weights[g]
            }
        },
    ))
}

/// Kernel of `F → Z/n` sending every generator to `1`. Index `n`.
///
/// Unlike the homology kernels this is not characteristic once `r >= 2`:
/// see [`preserves_total_exponent_kernel`].
pub fn total_exponent_kernel(rank: usize, n: usize) -> Result<SubgroupGraph, SubgroupError> {
    check(rank, n)?;
    if n > MAX_COVERING_INDEX {
        return Err(SubgroupError::TooLarge { index: n as u128 });
    }
    Ok(SubgroupGraph::from_covering(rank, n, |v, _| (v + 1) % n))
}

/// Whether `φ` maps the kernel of `F → Z/n` into itself, which happens
/// exactly when the total exponent sums of all images agree mod `n`.
pub fn preserves_total_exponent_kernel(phi: &Endomorphism, n: usize) -> bool {
    let n = n as i64;
    let sums: Vec<i64> = phi
        .images()
        .iter()
        .map(|w| w.exponent_sums().iter().sum::<i64>().rem_euclid(n))
        .collect();
    sums.windows(2).all(|p| p[0] == p[1])
}

fn check(rank: usize, n: usize) -> Result<(), SubgroupError> {
    if rank == 0 {
        return Err(SubgroupError::ZeroRank);
    }
    if n == 0 {
        return Err(SubgroupError::ZeroModulus);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub seed: u64,
    pub rank: usize,
    pub max_image_length: usize,
    pub move_count: usize,
}

/// Seed of trial `trial` in a suite seeded with `seed`: the first output of
/// ChaCha8 stream `trial`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.next_u64()
}

/// Reduced word whose length is uniform in `0..=max_len`, letters uniform
/// among the `2r` letters, redrawing any letter that would cancel.
pub fn random_word<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let g = rng.gen_range(0..rank);
        let l = if rng.gen_bool(0.5) {
            Letter::pos(g)
        } else {
            Letter::neg(g)
        };
        if letters.last() == Some(&l.inverse()) {
            continue;
        }
        letters.push(l);
    }
    Word::reduce(rank, letters).expect("letters in range")
}

pub fn random_endomorphism(spec: &RandomSpec) -> Endomorphism {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    draw_endomorphism(&mut rng, spec.rank, spec.max_image_length)
}

/// One endomorphism drawn from `rng`, images as in [`random_word`].
pub fn draw_endomorphism<R: Rng>(
    rng: &mut R,
    rank: usize,
    max_image_length: usize,
) -> Endomorphism {
    assert!(rank >= 1, "free group rank must be positive");
    let images = (0..rank)
        .map(|_| random_word(rng, rank, max_image_length))
        .collect();
    Endomorphism::new(rank, images).expect("images have the ambient rank")
}

/// Elementary Nielsen transformations of a free basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NielsenMove {
    Swap(usize, usize),
    Invert(usize),
    /// `x_i ↦ x_i x_j^s`
    RightMultiply {
        i: usize,
        j: usize,
        sign: i32,
    },
    /// `x_i ↦ x_j^s x_i`
    LeftMultiply {
        i: usize,
        j: usize,
        sign: i32,
    },
}

impl NielsenMove {
    /// The move as an automorphism of the rank-`rank` free group.
    pub fn automorphism(self, rank: usize) -> Endomorphism {
        let mut images: Vec<Word> = (0..rank)
            .map(|i| Word::generator(rank, i).expect("in range"))
            .collect();
        let power = |g: usize, s: i32| Word::from_powers(rank, &[(g, s)]).expect("in range");
        match self {
            NielsenMove::Swap(i, j) => images.swap(i, j),
            NielsenMove::Invert(i) => images[i] = images[i].invert(),
            NielsenMove::RightMultiply { i, j, sign } => {
                assert_ne!(i, j);
                images[i] = images[i].multiply(&power(j, sign)).expect("same rank");
            }
            NielsenMove::LeftMultiply { i, j, sign } => {
                assert_ne!(i, j);
                images[i] = power(j, sign).multiply(&images[i]).expect("same rank");
            }
        }
        Endomorphism::new(rank, images).expect("same rank")
    }

    pub fn random<R: Rng>(rng: &mut R, rank: usize) -> NielsenMove {
        let i = rng.gen_range(0..rank);
        let mut j = rng.gen_range(0..rank - 1);
        if j >= i {
            j += 1;
        }
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        match rng.gen_range(0..4) {
            0 => NielsenMove::Swap(i, j),
            1 => NielsenMove::Invert(i),
            2 => NielsenMove::RightMultiply { i, j, sign },
            _ => NielsenMove::LeftMultiply { i, j, sign },
        }
    }
}

/// `m_1 ∘ m_2 ∘ … ∘ m_k`.
pub fn compose_moves(rank: usize, moves: &[NielsenMove]) -> Endomorphism {
    moves.iter().fold(Endomorphism::identity(rank), |acc, m| {
        acc.compose(&m.automorphism(rank)).expect("same rank")
    })
}

/// Composition of `move_count` uniformly drawn Nielsen moves.
pub fn random_automorphism(spec: &RandomSpec) -> Result<Endomorphism, SubgroupError> {
    if spec.rank < 2 {
        return Err(SubgroupError::RankTooSmall(spec.rank));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(draw_automorphism(&mut rng, spec.rank, spec.move_count))
}

pub fn draw_automorphism<R: Rng>(rng: &mut R, rank: usize, move_count: usize) -> Endomorphism {
    let moves: Vec<NielsenMove> = (0..move_count)
        .map(|_| NielsenMove::random(rng, rank))
        .collect();
    compose_moves(rank, &moves)
}

/// A random endomorphism precomposed with a map killing one generator, so
/// never injective.
pub fn random_non_injective(spec: &RandomSpec) -> Endomorphism {
    let phi = random_endomorphism(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(1);
    let killed = rng.gen_range(0..spec.rank);
    let images = (0..spec.rank)
        .map(|i| {
            if i == killed {
                Word::identity(spec.rank)
            } else {
                Word::generator(spec.rank, i).expect("in range")
            }
        })
        .collect();
    phi.compose(&Endomorphism::new(spec.rank, images).expect("same rank"))
        .expect("same rank")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::IndexResult;
    use crate::spectra::is_injective;

    fn w(s: &str) -> Word {
        Word::parse(2, s).unwrap()
    }

    fn spec(seed: u64, rank: usize, len: usize, moves: usize) -> RandomSpec {
        RandomSpec {
            seed,
            rank,
            max_image_length: len,
            move_count: moves,
        }
    }

    #[test]
    fn homology_kernels() {
        let g = mod_n_homology_kernel(2, 2).unwrap();
        assert_eq!(g.index(), IndexResult::Finite(4));
        assert_eq!(g.subgroup_rank(), 5);
        let g = mod_n_homology_kernel(1, 3).unwrap();
        assert_eq!(g.index(), IndexResult::Finite(3));
        assert_eq!(g.schreier_basis(), vec![Word::parse(1, "a^3").unwrap()]);
        let g = mod_n_homology_kernel(2, 3).unwrap();
        assert_eq!(g.index(), IndexResult::Finite(9));
        for seed in 0..50 {
            assert!(g
                .is_invariant(&random_endomorphism(&spec(seed, 2, 6, 0)))
                .unwrap());
        }
        assert_eq!(
            mod_n_homology_kernel(4, 3).unwrap().subgroup_rank(),
            81 * 3 + 1
        );
        assert!(matches!(
            mod_n_homology_kernel(8, 100),
            Err(SubgroupError::TooLarge { .. })
        ));
    }

    #[test]
    fn membership_in_homology_kernel() {
        let g = mod_n_homology_kernel(2, 2).unwrap();
        assert!(g.contains(&w("a b a^-1 b^-1")));
        assert!(g.contains(&w("a^2 b^-2")));
        assert!(!g.contains(&w("a b")));
    }

    #[test]
    fn total_exponent_kernels() {
        let expected = SubgroupGraph::build(2, &[w("a^2"), w("b^2"), w("a b")]).unwrap();
        assert_eq!(total_exponent_kernel(2, 2).unwrap(), expected);
        let g = total_exponent_kernel(2, 1).unwrap();
        assert_eq!((g.index(), g.subgroup_rank()), (IndexResult::Finite(1), 2));
        let g = total_exponent_kernel(3, 2).unwrap();
        assert_eq!((g.index(), g.subgroup_rank()), (IndexResult::Finite(2), 5));
        assert_eq!(
            total_exponent_kernel(0, 2).unwrap_err(),
            SubgroupError::ZeroRank
        );
        assert_eq!(
            total_exponent_kernel(2, 0).unwrap_err(),
            SubgroupError::ZeroModulus
        );
    }

    #[test]
    fn homology_kernels_are_characteristic() {
        let gs = [
            mod_n_homology_kernel(3, 2).unwrap(),
            mod_n_homology_kernel(2, 3).unwrap(),
        ];
        for seed in 0..100 {
            for g in &gs {
                let phi = random_endomorphism(&spec(seed, g.rank(), 6, 0));
                assert!(g.is_invariant(&phi).unwrap(), "{phi}");
            }
        }
    }

    #[test]
    fn total_exponent_invariance_criterion() {
        let mut seen = [0usize; 2];
        for n in 2..=3 {
            let g = total_exponent_kernel(3, n).unwrap();
            for seed in 0..100 {
                let phi = random_endomorphism(&spec(seed, 3, 6, 0));
                let expected = preserves_total_exponent_kernel(&phi, n);
                assert_eq!(g.is_invariant(&phi).unwrap(), expected, "{phi}");
                seen[expected as usize] += 1;
            }
        }
        assert!(seen[0] > 0 && seen[1] > 0);
        let g = total_exponent_kernel(2, 2).unwrap();
        assert!(!g
            .is_invariant(&Endomorphism::parse(2, &["a", "b^2"]).unwrap())
            .unwrap());
        assert!(g
            .is_invariant(&Endomorphism::parse(2, &["b", "a b^2"]).unwrap())
            .unwrap());
    }

    #[test]
    fn random_endomorphisms_are_deterministic() {
        let s = spec(7, 3, 6, 0);
        assert_eq!(random_endomorphism(&s), random_endomorphism(&s));
        assert!(random_endomorphism(&spec(7, 3, 0, 0))
            .images()
            .iter()
            .all(Word::is_identity));
        let phi = random_endomorphism(&spec(7, 3, 6, 0));
        assert!(phi.max_image_len() <= 6);
    }

    #[test]
    fn golden_random_endomorphism() {
        let phi = random_endomorphism(&spec(1, 2, 4, 0));
        assert_eq!(phi.to_string(), GOLDEN_SEED_1);
    }

    const GOLDEN_SEED_1: &str = "a -> a^-1 b, b -> b^2 a^2";

    #[test]
    fn trial_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| trial_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(trial_seed(42, 3), trial_seed(42, 3));
    }

    #[test]
    fn random_automorphisms_are_automorphisms() {
        for seed in 0..100 {
            let phi = random_automorphism(&spec(seed, 2 + seed as usize % 3, 0, 12)).unwrap();
            assert!(is_injective(&phi), "{phi}");
            let img = SubgroupGraph::build(phi.rank(), phi.images()).unwrap();
            assert_eq!(img.index(), IndexResult::Finite(1));
        }
        assert!(random_automorphism(&spec(0, 2, 0, 0))
            .unwrap()
            .is_identity());
        assert_eq!(
            random_automorphism(&spec(0, 1, 0, 3)).unwrap_err(),
            SubgroupError::RankTooSmall(1)
        );
    }

    #[test]
    fn explicit_moves() {
        let m = compose_moves(
            2,
            &[
                NielsenMove::RightMultiply {
                    i: 0,
                    j: 1,
                    sign: 1,
                },
                NielsenMove::Swap(0, 1),
            ],
        );
        assert!(is_injective(&m));
        assert_eq!(
            SubgroupGraph::build(2, m.images()).unwrap().index(),
            IndexResult::Finite(1)
        );
        // the worked example: swap after b ↦ b a twice
        let b_times_a = NielsenMove::RightMultiply {
            i: 1,
            j: 0,
            sign: 1,
        };
        let phi = compose_moves(2, &[NielsenMove::Swap(0, 1), b_times_a, b_times_a]);
        assert_eq!(phi, Endomorphism::parse(2, &["b", "a b^2"]).unwrap());
    }

    #[test]
    fn non_injective_generator() {
        for seed in 0..50 {
            assert!(!is_injective(&random_non_injective(&spec(seed, 3, 6, 0))));
        }
    }
}
