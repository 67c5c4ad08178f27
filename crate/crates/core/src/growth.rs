//! Growth of word length under iteration.
//!
//! `GR(φ) = max_i limsup_k ‖φ^k(x_i)‖^(1/k)` is a limit; everything here is a
//! finite-`k` estimate of it.

use thiserror::Error;

use crate::word::{Endomorphism, Word};

/// Default bound on the length of any word produced while iterating.
pub const DEFAULT_LENGTH_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrowthError {
    #[error("iteration {k} would produce a word of {length} letters, above the cap of {cap}")]
    LengthBudgetExceeded { k: usize, length: usize, cap: usize },
    #[error("kmax must be at least 1")]
    EmptyRange,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub k: usize,
    /// `‖φ^k(x_i)‖` for each generator.
    pub generator_lengths: Vec<usize>,
    /// `max_i ‖φ^k(x_i)‖`.
    pub max_length: usize,
    /// `max_length^(1/k)`.
    pub root_estimate: f64,
    /// `max_length(k) / max_length(k-1)`; absent at `k = 1` or after a zero.
    pub ratio_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthTrace {
    pub rows: Vec<GrowthRow>,
}

impl GrowthTrace {
    pub fn lengths(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.max_length).collect()
    }

    /// `‖φ^k(x_i)‖` for `k = 1..=kmax`.
    pub fn generator_lengths(&self, i: usize) -> Vec<usize> {
        self.rows.iter().map(|r| r.generator_lengths[i]).collect()
    }

    /// The estimate of `GR(φ)` read off the trace.
    ///
    /// The successive ratio converges geometrically when one eigenvalue
    /// dominates, so it is used when the last two ratios agree to 1%.
    /// Otherwise the `k`-th root is used, which converges slowly but never
    /// undershoots the spectral radius of the abelianization. A trace that
    /// reaches length zero has growth rate zero.
    pub fn estimate(&self) -> f64 {
        let Some(last) = self.rows.last() else {
            return 0.0;
        };
        if last.max_length == 0 {
            return 0.0;
        }
        let n = self.rows.len();
        if n >= 3 {
            if let (Some(a), Some(b)) = (self.rows[n - 2].ratio_estimate, last.ratio_estimate) {
                if (a - b).abs() <= 0.01 * b {
                    return b;
                }
            }
        }
        last.root_estimate
    }
}

pub fn growth_sequence(phi: &Endomorphism, kmax: usize) -> Result<GrowthTrace, GrowthError> {
    growth_sequence_capped(phi, kmax, DEFAULT_LENGTH_CAP)
}

/// Iterates `φ` on each generator, `kmax` times, failing if a word (before
/// or after reduction) would exceed `cap` letters.
pub fn growth_sequence_capped(
    phi: &Endomorphism,
    kmax: usize,
    cap: usize,
) -> Result<GrowthTrace, GrowthError> {
    if kmax == 0 {
        return Err(GrowthError::EmptyRange);
    }
    let rank = phi.rank();
    let image_lens: Vec<usize> = phi.images().iter().map(Word::len).collect();
    let mut words: Vec<Word> = (0..rank)
        .map(|i| Word::generator(rank, i).expect("in range"))
        .collect();
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        for w in words.iter_mut() {
            let length: usize = w.letters().iter().map(|l| image_lens[l.generator()]).sum();
            if length > cap {
                return Err(GrowthError::LengthBudgetExceeded { k, length, cap });
            }
            *w = phi.apply(w).expect("same rank");
        }
        let generator_lengths: Vec<usize> = words.iter().map(Word::len).collect();
        let max_length = generator_lengths.iter().copied().max().unwrap_or(0);
        let ratio_estimate = match rows.last() {
            Some(prev) if prev.max_length > 0 => Some(max_length as f64 / prev.max_length as f64),
            _ => None,
        };
        rows.push(GrowthRow {
            k,
            generator_lengths,
            max_length,
            root_estimate: (max_length as f64).powf(1.0 / k as f64),
            ratio_estimate,
        });
    }
    Ok(GrowthTrace { rows })
}

pub fn growth_estimate(phi: &Endomorphism, kmax: usize) -> Result<f64, GrowthError> {
    Ok(growth_sequence(phi, kmax)?.estimate())
}
