//! Algebraic mapping tori `⟨F, x | x⁻¹ x_i x = φ(x_i)⟩`, Fox derivatives, and
//! the Alexander polynomial of the presentation.
//!
//! Fox derivatives are pushed to `Z[t, t⁻¹]` by `ε`, which kills the fiber
//! generators and sends the stable letter to `t⁻¹`. With that orientation
//! the relator `x⁻¹ x_i x φ(x_i)⁻¹` differentiates to row `i` of `tI - Aᵀ`
//! (`A` the abelianization matrix), so the determinant is `det(tI - A)`
//! itself rather than its reciprocal.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::{basis_name, SubgroupGraph};
use crate::linalg::{restriction_endomorphism, IntPoly};
use crate::spectra::{is_injective, SpectraError};
use crate::word::{generator_name, Endomorphism, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("{relators} relators for {generators} fiber generators")]
    ShapeMismatch { relators: usize, generators: usize },
}

/// Integer Laurent polynomial, stored as `t^low · (c_0 + c_1 t + …)` with
/// `c_0` and the last coefficient nonzero. Zero has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    low: i64,
    coeffs: Vec<BigInt>,
}

impl LaurentPoly {
    pub fn new(low: i64, mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return LaurentPoly::zero();
        }
        coeffs.drain(..lead);
        LaurentPoly {
            low: low + lead as i64,
            coeffs,
        }
    }

    pub fn zero() -> Self {
        LaurentPoly {
            low: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0)
    }

    /// `c · t^e`.
    pub fn monomial(c: BigInt, e: i64) -> Self {
        LaurentPoly::new(e, vec![c])
    }

    pub fn from_poly(p: &IntPoly) -> Self {
        LaurentPoly::new(0, p.coeffs().to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn min_exponent(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    pub fn max_exponent(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        usize::try_from(e - self.low)
            .ok()
            .and_then(|i| self.coeffs.get(i))
            .cloned()
            .unwrap_or_default()
    }

    /// Nonzero terms `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> Vec<(i64, BigInt)> {
        let mut v = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                v.push((self.low + i as i64, c.clone()));
            }
        }
        v
    }

    /// `self · t^s`.
    pub fn shift(&self, s: i64) -> Self {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            low: self.low + s,
            coeffs: self.coeffs.clone(),
        }
    }

    /// The ordinary polynomial, if no negative powers occur.
    pub fn to_poly(&self) -> Option<IntPoly> {
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let low = usize::try_from(self.low).ok()?;
        let mut c = vec![BigInt::zero(); low];
        c.extend(self.coeffs.iter().cloned());
        Some(IntPoly::new(c))
    }

    /// Canonical representative of the class modulo units `± t^s`: lowest
    /// term in degree 0, positive leading coefficient.
    pub fn unit_normalized(&self) -> IntPoly {
        let p = IntPoly::new(self.coeffs.clone());
        if p.leading().is_some_and(Signed::is_negative) {
            -p
        } else {
            p
        }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let high = self
            .max_exponent()
            .max(other.max_exponent())
            .expect("nonzero");
        let coeffs = (low..=high)
            .map(|e| self.coeff(e) + other.coeff(e))
            .collect();
        LaurentPoly::new(low, coeffs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            low: self.low,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, other: &LaurentPoly) -> LaurentPoly {
        self + &(-other)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        LaurentPoly::new(self.low + other.low, c)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms().into_iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
                (true, false) => {}
            }
            first = false;
            let unit = a.is_one() && e != 0;
            if !unit {
                write!(f, "{a}")?;
            }
            match e {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{e}")?,
            }
        }
        Ok(())
    }
}

/// `⟨x_1, …, x_r, x | x⁻¹ x_i x φ(x_i)⁻¹⟩`. Relators are words over `r + 1`
/// letters; the stable letter has index `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusPresentation {
    fiber_names: Vec<String>,
    stable_name: String,
    relators: Vec<Word>,
    injective: bool,
}

impl TorusPresentation {
    pub fn rank(&self) -> usize {
        self.fiber_names.len()
    }

    /// Index of the stable letter in the extended alphabet.
    pub fn stable(&self) -> usize {
        self.rank()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn stable_name(&self) -> &str {
        &self.stable_name
    }

    pub fn fiber_names(&self) -> &[String] {
        &self.fiber_names
    }

    /// False when the endomorphism is not injective, so the presentation is
    /// not an ascending HNN extension.
    pub fn is_hnn(&self) -> bool {
        self.injective
    }

    fn letter_name(&self, i: usize) -> String {
        self.fiber_names
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.stable_name.clone())
    }

    pub fn render_relator(&self, i: usize) -> String {
        self.relators[i].render_with(|g| self.letter_name(g))
    }
}

impl fmt::Display for TorusPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = (0..self.relators.len())
            .map(|i| self.render_relator(i))
            .collect();
        write!(
            f,
            "< {}, {} | {} >",
            self.fiber_names.join(", "),
            self.stable_name,
            rels.join(", ")
        )
    }
}

/// Presentation (1) of the mapping torus of `φ`.
pub fn mapping_torus(phi: &Endomorphism) -> TorusPresentation {
    let r = phi.rank();
    build(
        phi,
        (0..r).map(|i| generator_name(i, r)).collect(),
        is_injective(phi),
    )
}

/// Presentation (2): the mapping torus of `φ|_H`, over the basis `h1, h2, …`
/// that the graph rewrites in.
pub fn restricted_mapping_torus(
    phi: &Endomorphism,
    g: &SubgroupGraph,
) -> Result<TorusPresentation, SpectraError> {
    let psi = restriction_endomorphism(phi, g)?;
    let names = (0..psi.rank()).map(basis_name).collect();
    Ok(build(&psi, names, is_injective(phi)))
}

fn build(phi: &Endomorphism, fiber_names: Vec<String>, injective: bool) -> TorusPresentation {
    let r = phi.rank();
    let x = r;
    let relators = (0..r)
        .map(|i| {
            let image = phi.image(i).widen(r + 1).expect("widening");
            let mut letters = vec![Letter::neg(x), Letter::pos(i), Letter::pos(x)];
            letters.extend(image.invert().letters());
            Word::reduce(r + 1, letters).expect("letters in range")
        })
        .collect();
    // the letters a..z run out at rank 24, where "x" becomes a fiber name
    let stable_name = if fiber_names.iter().any(|n| n == "x") {
        "x0"
    } else {
        "x"
    }
    .to_string();
    TorusPresentation {
        fiber_names,
        stable_name,
        relators,
        injective,
    }
}

/// `ε(∂w/∂z)` with `ε` sending letter `stable` to `t⁻¹` and every other
/// letter to `1`.
pub fn fox_derivative(w: &Word, z: usize, stable: usize) -> LaurentPoly {
    // ε(prefix) = t^(-depth), depth = exponent sum of the stable letter so far
    let mut depth = 0i64;
    let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
    for &l in w.letters() {
        let g = l.generator();
        if l.is_inverse() {
            if g == stable {
                depth -= 1;
            }
            if g == z {
                *acc.entry(-depth).or_default() -= 1;
            }
        } else {
            if g == z {
                *acc.entry(-depth).or_default() += 1;
            }
            if g == stable {
                depth += 1;
            }
        }
    }
    from_terms(acc)
}

/// `ε(w) = t^(-e)` with `e` the exponent sum of the stable letter.
pub fn augmentation(w: &Word, stable: usize) -> LaurentPoly {
    let e: i64 = w
        .letters()
        .iter()
        .filter(|l| l.generator() == stable)
        .map(|l| l.sign() as i64)
        .sum();
    LaurentPoly::monomial(BigInt::one(), -e)
}

fn from_terms(terms: BTreeMap<i64, BigInt>) -> LaurentPoly {
    let Some((&low, _)) = terms.iter().next() else {
        return LaurentPoly::zero();
    };
    let high = *terms.keys().next_back().expect("nonempty");
    let coeffs = (low..=high)
        .map(|e| terms.get(&e).cloned().unwrap_or_default())
        .collect();
    LaurentPoly::new(low, coeffs)
}

/// Entry `(i, j)` is the evaluated Fox derivative of relator `i` with
/// respect to fiber generator `j`.
pub fn alexander_matrix(p: &TorusPresentation) -> Vec<Vec<LaurentPoly>> {
    p.relators
        .iter()
        .map(|rel| {
            (0..p.rank())
                .map(|j| fox_derivative(rel, j, p.stable()))
                .collect()
        })
        .collect()
}

/// Determinant of the Alexander matrix with positive leading coefficient.
/// For a mapping torus this is exactly `det(tI - φ^ab)`, factors of `t`
/// included; [`LaurentPoly::unit_normalized`] gives the module order up to
/// units.
pub fn alexander_polynomial(p: &TorusPresentation) -> Result<IntPoly, TorusError> {
    if p.relators.len() != p.rank() {
        return Err(TorusError::ShapeMismatch {
            relators: p.relators.len(),
            generators: p.rank(),
        });
    }
    let det = laurent_det(&alexander_matrix(p));
    let shifted = det.shift(-det.min_exponent().unwrap_or(0).min(0));
    let poly = shifted
        .to_poly()
        .expect("no negative powers after shifting");
    Ok(if poly.leading().is_some_and(Signed::is_negative) {
        -poly
    } else {
        poly
    })
}

/// Largest size expanded by cofactors.
const COFACTOR_MAX_DIM: usize = 6;

/// Exact determinant over `Z[t, t⁻¹]`.
pub fn laurent_det(m: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = m.len();
    // move each row into Z[t]; the total shift is a unit factored back out
    let mut shift = 0i64;
    let rows: Vec<Vec<IntPoly>> = m
        .iter()
        .map(|row| {
            assert_eq!(row.len(), n, "matrix must be square");
            let s = row
                .iter()
                .filter_map(LaurentPoly::min_exponent)
                .min()
                .unwrap_or(0);
            shift += s;
            row.iter()
                .map(|e| e.shift(-s).to_poly().expect("shifted into Z[t]"))
                .collect()
        })
        .collect();
    let det = if n <= COFACTOR_MAX_DIM {
        cofactor_det(&rows)
    } else {
        bareiss_poly_det(rows)
    };
    LaurentPoly::from_poly(&det).shift(shift)
}

pub(crate) fn cofactor_det(m: &[Vec<IntPoly>]) -> IntPoly {
    let n = m.len();
    if n == 0 {
        return IntPoly::one();
    }
    let cols: Vec<usize> = (0..n).collect();
    expand(m, 0, &cols)
}

fn expand(m: &[Vec<IntPoly>], row: usize, cols: &[usize]) -> IntPoly {
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    let mut acc = IntPoly::zero();
    for (k, &c) in cols.iter().enumerate() {
        if m[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = &m[row][c] * &expand(m, row + 1, &rest);
        acc = if k % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}

/// Fraction-free elimination over `Z[t]`; every division is exact.
fn bareiss_poly_det(mut a: Vec<Vec<IntPoly>>) -> IntPoly {
    let n = a.len();
    let mut negate = false;
    let mut prev = IntPoly::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return IntPoly::zero();
            };
            a.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    if negate {
        -prev
    } else {
        prev
    }
}
