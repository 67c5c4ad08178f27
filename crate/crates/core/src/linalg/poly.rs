//! Dense univariate polynomials over the integers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::modular;
use super::LinalgError;

/// Integer polynomial with ascending coefficients and no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly {
            coeffs: vec![BigInt::one()],
        }
    }

    /// `c · t^k`
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.push(c);
        IntPoly::new(coeffs)
    }

    /// `t - r`
    pub fn linear_root(r: i64) -> Self {
        IntPoly::from_i64s(&[-r, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    /// Coefficients as `i64`, when they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| i64::try_from(c).ok()).collect()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Gcd of the coefficients, nonnegative.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut c = self.content();
        if self.leading().expect("nonzero").is_negative() {
            c = -c;
        }
        IntPoly::new(self.coeffs.iter().map(|x| x / &c).collect())
    }

    /// Multiplicity of the root `0`.
    pub fn t_valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Removes every factor of `t`.
    pub fn strip_t(&self) -> IntPoly {
        IntPoly::new(self.coeffs[self.t_valuation()..].to_vec())
    }

    /// `self` with all factors of `t` removed and a positive leading
    /// coefficient: the canonical representative up to units `± t^k`.
    pub fn unit_normalized(&self) -> IntPoly {
        let p = self.strip_t();
        if p.leading().is_some_and(Signed::is_negative) {
            -p
        } else {
            p
        }
    }

    /// Exact division over the integers: `Some(q)` with `self = d · q`, or
    /// `None` when `d` does not divide `self` in `Z[t]`.
    pub fn exact_div(&self, d: &IntPoly) -> Option<IntPoly> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let n = self.degree().expect("nonzero");
        if n < dd {
            return None;
        }
        let lc = d.leading().expect("nonzero");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &q * dc;
            }
            quot[i] = q;
        }
        if rem.iter().all(Zero::is_zero) {
            Some(IntPoly::new(quot))
        } else {
            None
        }
    }

    /// Pseudo-remainder: `lc(d)^(deg self - deg d + 1) · self mod d`.
    pub fn pseudo_rem(&self, d: &IntPoly) -> IntPoly {
        let dd = d.degree().expect("nonzero divisor");
        let lc = d.leading().expect("nonzero").clone();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let top = r[k].clone();
            for c in r.iter_mut() {
                *c *= &lc;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k - dd + j] -= &top * dc;
            }
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        IntPoly::new(r)
    }

    /// Remainder modulo a monic polynomial.
    pub fn rem_monic(&self, m: &IntPoly) -> IntPoly {
        debug_assert!(m.is_monic());
        let dm = m.degree().expect("nonzero");
        let mut r = self.coeffs.clone();
        while r.len() > dm {
            let k = r.len() - 1;
            let top = r.pop().expect("nonempty");
            if !top.is_zero() {
                for j in 0..dm {
                    r[k - dm + j] -= &top * &m.coeffs[j];
                }
            }
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        IntPoly::new(r)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = !a.is_one() || i == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

/// Above this degree the gcd switches from the primitive remainder sequence
/// to the multimodular algorithm.
const MODULAR_GCD_DEGREE: usize = 24;

/// Primitive gcd over the rationals with positive leading coefficient.
pub fn gcd(p: &IntPoly, q: &IntPoly) -> Result<IntPoly, LinalgError> {
    if p.is_zero() && q.is_zero() {
        return Err(LinalgError::BothZero);
    }
    if p.is_zero() {
        return Ok(q.primitive());
    }
    if q.is_zero() {
        return Ok(p.primitive());
    }
    let big = p.degree().max(q.degree()).unwrap_or(0) > MODULAR_GCD_DEGREE;
    Ok(if big {
        modular::poly_gcd(p, q)
    } else {
        gcd_prs(p, q)
    })
}

/// Gcd by the primitive pseudo-remainder sequence.
pub fn gcd_prs(p: &IntPoly, q: &IntPoly) -> IntPoly {
    let (mut a, mut b) = if p.degree() >= q.degree() {
        (p.primitive(), q.primitive())
    } else {
        (q.primitive(), p.primitive())
    };
    while !b.is_zero() {
        let r = a.pseudo_rem(&b).primitive();
        a = b;
        b = r;
    }
    a.primitive()
}

/// Whether `p` divides `q` over the rationals.
pub fn divides(p: &IntPoly, q: &IntPoly) -> Result<bool, LinalgError> {
    if p.is_zero() {
        return Err(LinalgError::ZeroDivisor);
    }
    // A primitive divisor over Q divides over Z (Gauss).
    Ok(q.exact_div(&p.primitive()).is_some())
}

/// Squarefree part `p / gcd(p, p')`, primitive with positive leading coefficient.
pub fn radical(p: &IntPoly) -> Result<IntPoly, LinalgError> {
    if p.is_zero() {
        return Err(LinalgError::ZeroPolynomial);
    }
    if p.degree() == Some(0) {
        return Ok(IntPoly::one());
    }
    let g = gcd(p, &p.derivative())?;
    let q = p.primitive().exact_div(&g).expect("gcd divides p");
    Ok(q.primitive())
}

/// Squarefree integer polynomial with nonzero constant term, primitive, with
/// positive leading coefficient. Its roots are a set of nonzero eigenvalues.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpectrumPoly(IntPoly);

impl SpectrumPoly {
    /// The empty spectrum.
    pub fn empty() -> Self {
        SpectrumPoly(IntPoly::one())
    }

    /// Wraps a factor of a spectrum polynomial, restoring the sign convention.
    pub(crate) fn from_squarefree(p: IntPoly) -> Self {
        SpectrumPoly(p.primitive())
    }

    pub fn poly(&self) -> &IntPoly {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.degree() == Some(0)
    }

    /// Number of distinct nonzero eigenvalues.
    pub fn len(&self) -> usize {
        self.0.degree().unwrap_or(0)
    }
}

impl fmt::Display for SpectrumPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Strips the root `0` and takes the radical.
pub fn spectrum_poly(p: &IntPoly) -> Result<SpectrumPoly, LinalgError> {
    if p.is_zero() {
        return Err(LinalgError::ZeroPolynomial);
    }
    Ok(SpectrumPoly(radical(&p.strip_t())?))
}

/// Root-set containment; exact because both sides are squarefree.
pub fn spectrum_subset(s1: &SpectrumPoly, s2: &SpectrumPoly) -> bool {
    divides(&s1.0, &s2.0).expect("spectrum polynomials are nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn display() {
        assert_eq!(p(&[-1, -2, 1]).to_string(), "t^2 - 2t - 1");
        assert_eq!(p(&[0, 0, 0, 1]).to_string(), "t^3");
        assert_eq!(p(&[5]).to_string(), "5");
        assert_eq!(IntPoly::zero().to_string(), "0");
    }

    #[test]
    fn gcd_examples() {
        let a = p(&[-1, -2, 1]);
        let b = &a * &p(&[1, 1]);
        assert_eq!(gcd(&a, &b).unwrap(), a);
        assert_eq!(
            gcd(&p(&[-2, 0, 4]), &IntPoly::zero()).unwrap(),
            p(&[-1, 0, 2])
        );
        assert_eq!(gcd(&p(&[-1, 0, 1]), &p(&[1, 2, 1])).unwrap(), p(&[1, 1]));
        assert_eq!(
            gcd(&IntPoly::zero(), &IntPoly::zero()),
            Err(LinalgError::BothZero)
        );
    }

    #[test]
    fn radical_examples() {
        assert_eq!(radical(&p(&[1, 2, 1])).unwrap(), p(&[1, 1]));
        assert_eq!(radical(&p(&[-1, -2, 1])).unwrap(), p(&[-1, -2, 1]));
        assert_eq!(radical(&p(&[0, 0, 0, 1])).unwrap(), p(&[0, 1]));
        assert_eq!(radical(&IntPoly::zero()), Err(LinalgError::ZeroPolynomial));
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(
            spectrum_poly(&p(&[-1, -2, 1])).unwrap().poly(),
            &p(&[-1, -2, 1])
        );
        assert_eq!(
            spectrum_poly(&p(&[0, 0, -1, 1])).unwrap().poly(),
            &p(&[-1, 1])
        );
        let empty = spectrum_poly(&p(&[0, 0, 0, 0, 1])).unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.poly(), &IntPoly::one());
    }

    #[test]
    fn divides_examples() {
        let f = p(&[-1, -2, 1]);
        assert!(divides(&f, &p(&[-1, -3, -1, 1])).unwrap());
        assert!(divides(&f, &f).unwrap());
        assert!(!divides(&p(&[2, 1]), &f).unwrap());
        // over Q, not Z: 2t + 2 divides t + 1
        assert!(divides(&p(&[2, 2]), &p(&[1, 1])).unwrap());
        assert_eq!(divides(&IntPoly::zero(), &f), Err(LinalgError::ZeroDivisor));
    }

    #[test]
    fn subset_examples() {
        let f = spectrum_poly(&p(&[-1, -2, 1])).unwrap();
        let h = spectrum_poly(&p(&[-1, -3, -1, 1])).unwrap();
        assert!(spectrum_subset(&f, &h));
        assert!(spectrum_subset(&h, &h));
        let two = spectrum_poly(&p(&[-2, 1])).unwrap();
        assert!(!spectrum_subset(&two, &f));
        assert!(spectrum_subset(&SpectrumPoly::empty(), &f));
    }

    fn small_factor() -> impl Strategy<Value = IntPoly> {
        prop_oneof![
            (-3i64..=3).prop_map(IntPoly::linear_root),
            (-3i64..=3, -3i64..=3).prop_map(|(a, b)| p(&[b, a, 1])),
        ]
    }

    fn product() -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(small_factor(), 1..6)
            .prop_map(|fs| fs.iter().fold(IntPoly::one(), |acc, f| &acc * f))
    }

    proptest! {
        #[test]
        fn radical_is_squarefree_divisor(q in product()) {
            let r = radical(&q).unwrap();
            prop_assert!(divides(&r, &q).unwrap());
            let g = gcd(&r, &r.derivative()).unwrap();
            prop_assert_eq!(g.degree(), Some(0));
        }

        #[test]
        fn gcd_divides_both(a in product(), b in product()) {
            let g = gcd(&a, &b).unwrap();
            prop_assert!(divides(&g, &a).unwrap());
            prop_assert!(divides(&g, &b).unwrap());
            prop_assert_eq!(&g, &gcd(&b, &a).unwrap());
        }

        #[test]
        fn modular_gcd_matches_prs(a in product(), b in product(), c in product()) {
            let x = &a * &c;
            let y = &b * &c;
            prop_assert_eq!(modular::poly_gcd(&x, &y), gcd_prs(&x, &y));
        }

        #[test]
        fn subset_is_reflexive_and_transitive(a in product(), b in product(), c in product()) {
            let sa = spectrum_poly(&a).unwrap();
            let sab = spectrum_poly(&(&a * &b)).unwrap();
            let sabc = spectrum_poly(&(&(&a * &b) * &c)).unwrap();
            prop_assert!(spectrum_subset(&sa, &sa));
            prop_assert!(spectrum_subset(&sa, &sab));
            prop_assert!(spectrum_subset(&sab, &sabc));
            prop_assert!(spectrum_subset(&sa, &sabc));
        }
    }
}
