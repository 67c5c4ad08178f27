//! Root-of-unity decision and numeric root moduli.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{radical, IntPoly, SpectrumPoly};
use super::LinalgError;

pub fn euler_phi(mut m: u64) -> u64 {
    let mut result = m;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Every `m` whose primitive `m`-th roots of unity have degree at most `d`.
/// Since `φ(m) >= sqrt(m / 2)`, all such `m` satisfy `m <= 2d²`.
pub fn cyclotomic_orders(d: usize) -> Vec<u64> {
    let d = d as u64;
    (1..=2 * d * d + 1).filter(|&m| euler_phi(m) <= d).collect()
}

/// The `m`-th cyclotomic polynomial, `Φ_m = (t^m - 1) / ∏_{k | m, k < m} Φ_k`.
pub fn cyclotomic(m: u64, cache: &mut HashMap<u64, IntPoly>) -> IntPoly {
    if let Some(p) = cache.get(&m) {
        return p.clone();
    }
    let mut num = IntPoly::monomial(BigInt::one(), m as usize);
    num = &num - &IntPoly::one();
    for k in 1..m {
        if m.is_multiple_of(k) {
            let f = cyclotomic(k, cache);
            num = num
                .exact_div(&f)
                .expect("cyclotomic factor divides t^m - 1");
        }
    }
    cache.insert(m, num.clone());
    num
}

/// Whether every root of `s` is a root of unity.
///
/// This is the same as `s | t^L - 1` with `L = lcm{m : φ(m) <= deg s}`:
/// because `s` is squarefree and `t^L - 1 = ∏_{m | L} Φ_m`, it holds exactly
/// when `s` is a product of distinct `Φ_m` with `φ(m) <= deg s`. The test
/// divides those cyclotomic factors out of `s` one by one, which avoids
/// working with `t^L` directly.
pub fn all_roots_of_unity(s: &SpectrumPoly) -> bool {
    let p = s.poly();
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return true;
    }
    // roots of unity are algebraic integers with unit norm
    if !p.is_monic() || !p.coeff(0).abs().is_one() {
        return false;
    }
    let mut rest = p.clone();
    let mut cache = HashMap::new();
    for m in cyclotomic_orders(d) {
        let phi = euler_phi(m) as usize;
        if phi > rest.degree().unwrap_or(0) {
            continue;
        }
        let f = cyclotomic(m, &mut cache);
        if let Some(q) = rest.exact_div(&f) {
            rest = q;
            if rest.degree() == Some(0) {
                return true;
            }
        }
    }
    rest.degree() == Some(0)
}

/// The factor of `s` left after dividing out every cyclotomic polynomial:
/// its roots are exactly the roots of `s` that are not roots of unity.
pub fn non_cyclotomic_part(s: &SpectrumPoly) -> SpectrumPoly {
    let mut rest = s.poly().clone();
    let mut cache = HashMap::new();
    for m in cyclotomic_orders(rest.degree().unwrap_or(0)) {
        if euler_phi(m) as usize > rest.degree().unwrap_or(0) {
            continue;
        }
        if let Some(q) = rest.exact_div(&cyclotomic(m, &mut cache)) {
            rest = q;
        }
    }
    SpectrumPoly::from_squarefree(rest)
}

/// Whether `p` divides `t^l - 1`, by computing `t^l mod p` with binary
/// exponentiation. `p` must be monic. Intended for small `l` and for
/// polynomials whose roots are known to lie on the unit circle.
pub fn divides_t_pow_minus_one(p: &IntPoly, l: u64) -> bool {
    assert!(p.is_monic(), "binary exponentiation needs a monic modulus");
    let mut result = IntPoly::one().rem_monic(p);
    let mut base = IntPoly::monomial(BigInt::one(), 1).rem_monic(p);
    let mut e = l;
    while e > 0 {
        if e & 1 == 1 {
            result = (&result * &base).rem_monic(p);
        }
        base = (&base * &base).rem_monic(p);
        e >>= 1;
    }
    (&result - &IntPoly::one()).rem_monic(p).is_zero()
}

/// Cauchy bound `1 + max |c_i / c_deg|` on the moduli of the roots.
pub fn cauchy_bound(p: &IntPoly) -> f64 {
    let coeffs = p.coeffs();
    let lead = coeffs
        .last()
        .and_then(ToPrimitive::to_f64)
        .unwrap_or(1.0)
        .abs();
    1.0 + coeffs[..coeffs.len().saturating_sub(1)]
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::MAX).abs() / lead)
        .fold(0.0, f64::max)
}

/// All complex roots of a nonconstant polynomial, by Aberth–Ehrlich
/// iteration in double precision. Multiple roots converge slowly; callers
/// wanting accuracy should pass a squarefree polynomial.
pub fn numeric_roots(p: &IntPoly) -> Vec<Complex64> {
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return Vec::new();
    }
    let c: Vec<f64> = p
        .coeffs()
        .iter()
        .map(|x| x.to_f64().unwrap_or(f64::NAN))
        .collect();
    let horner = |coeffs: &mut dyn Iterator<Item = f64>, z: Complex64| {
        let mut v = Complex64::zero();
        let mut dv = Complex64::zero();
        for a in coeffs {
            dv = dv * z + v;
            v = v * z + a;
        }
        (v, dv)
    };
    // Newton correction p/p'. Outside the unit disc the reversed polynomial
    // is evaluated at 1/z instead, so high degrees do not overflow.
    let newton = |z: Complex64| -> Option<Complex64> {
        if z.norm() <= 1.0 {
            let (v, dv) = horner(&mut c.iter().rev().copied(), z);
            return (v != Complex64::zero()).then(|| v / dv);
        }
        let w = z.inv();
        let (v, dv) = horner(&mut c.iter().copied(), w);
        if v == Complex64::zero() {
            return None;
        }
        Some((w * (d as f64 - w * dv / v)).inv())
    };
    // Fujiwara's bound: every root has modulus at most 2 max |c_{d-k}/c_d|^(1/k)
    let lead = c[d].abs();
    let radius = (1..=d)
        .map(|k| (c[d - k].abs() / lead).powf(1.0 / k as f64))
        .fold(0.0f64, f64::max);
    let radius = (2.0 * radius).clamp(1e-3, 1e6);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            Complex64::from_polar(
                radius * 0.9,
                0.4 + std::f64::consts::TAU * k as f64 / d as f64,
            )
        })
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for k in 0..d {
            let Some(ratio) = newton(z[k]) else {
                continue;
            };
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::one() - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Largest root modulus, accurate to about `1e-9` for moderate degrees.
/// Computed on the squarefree part and capped by the Cauchy bound.
pub fn max_root_modulus(p: &IntPoly) -> Result<f64, LinalgError> {
    match p.degree() {
        None => return Err(LinalgError::ZeroPolynomial),
        Some(0) => return Err(LinalgError::DegreeZero),
        _ => {}
    }
    let r = radical(p)?;
    let cap = cauchy_bound(&r);
    let m = numeric_roots(&r)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(m.min(cap))
}
