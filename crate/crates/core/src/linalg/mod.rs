//! Exact integer linear algebra: abelianized maps, characteristic
//! polynomials, and the polynomial operations that turn them into spectra.

mod abelian;
mod matrix;
pub(crate) mod modular;
mod poly;
mod roots;

use thiserror::Error;

pub use abelian::{abelianization_matrix, restriction_endomorphism, restriction_matrix};
pub use matrix::{IntMatrix, INTERPOLATION_MAX_DIM};
pub use poly::{
    divides, gcd, gcd_prs, radical, spectrum_poly, spectrum_subset, IntPoly, SpectrumPoly,
};
pub use roots::{
    all_roots_of_unity, cauchy_bound, cyclotomic_orders, divides_t_pow_minus_one, euler_phi,
    max_root_modulus, non_cyclotomic_part, numeric_roots,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("gcd of two zero polynomials")]
    BothZero,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("polynomial has degree zero")]
    DegreeZero,
    #[error("subgroup is not invariant under the endomorphism")]
    NotInvariant,
    #[error(transparent)]
    Word(#[from] crate::word::WordError),
}
