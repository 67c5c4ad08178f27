//! Multimodular kernels: characteristic polynomials by Hessenberg reduction
//! modulo word-sized primes, and polynomial gcds by modular images, both
//! lifted back to the integers by Chinese remaindering.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::poly::IntPoly;
use crate::exec;

/// Primes below 2^62, descending. Generated on demand and cached.
static PRIMES: Mutex<Vec<u64>> = Mutex::new(Vec::new());

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The first `count` primes below 2^62, descending.
pub fn primes(count: usize) -> Vec<u64> {
    let mut cache = PRIMES.lock().expect("prime cache poisoned");
    let mut candidate = cache.last().map_or((1u64 << 62) - 1, |&p| p - 2);
    while cache.len() < count {
        if is_prime(candidate) {
            cache.push(candidate);
        }
        candidate -= 2;
    }
    cache[..count].to_vec()
}

/// Arithmetic modulo an odd prime below 2^62 in Montgomery form.
#[derive(Clone, Copy, Debug)]
struct Mont {
    p: u64,
    /// `-p^{-1} mod 2^64`
    neg_inv: u64,
    /// `2^128 mod p`
    r2: u64,
}

impl Mont {
    fn new(p: u64) -> Self {
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = mul_mod(r, r, p);
        Mont {
            p,
            neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline(always)]
    fn reduce(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline(always)]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    #[inline(always)]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    fn from_mont(&self, a: u64) -> u64 {
        self.reduce(a as u128)
    }

    fn inv(&self, a: u64) -> u64 {
        // a in Montgomery form; returns a^{-1} in Montgomery form
        let plain = self.from_mont(a);
        self.to_mont(pow_mod(plain, self.p - 2, self.p))
    }
}

fn residue(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

/// Characteristic polynomial of an `n × n` matrix (row-major entries
/// already reduced mod `p`) by reduction to upper Hessenberg form.
/// Returns ascending coefficients mod `p`, length `n + 1`.
pub(crate) fn charpoly_mod_p(n: usize, entries: &[u64], p: u64) -> Vec<u64> {
    let m = Mont::new(p);
    let mut h: Vec<u64> = entries.iter().map(|&x| m.to_mont(x)).collect();
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[idx(i, j)] != 0) else {
            continue;
        };
        if piv != j + 1 {
            for k in 0..n {
                h.swap(idx(piv, k), idx(j + 1, k));
            }
            for k in 0..n {
                h.swap(idx(k, piv), idx(k, j + 1));
            }
        }
        let inv = m.inv(h[idx(j + 1, j)]);
        // Row operations only read row j+1 and column operations only write
        // column j+1, so all rows can go first and the columns follow as one
        // contiguous dot product per row.
        let mut us = vec![0u64; n];
        for i in j + 2..n {
            let hij = h[idx(i, j)];
            if hij == 0 {
                continue;
            }
            let u = m.mul(hij, inv);
            us[i] = u;
            // row_i -= u * row_{j+1}
            let (lo, hi) = h.split_at_mut(idx(i, 0));
            let src = &lo[idx(j + 1, j)..idx(j + 1, 0) + n];
            let dst = &mut hi[j..n];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = m.sub(*d, m.mul(u, s));
            }
        }
        if us[j + 2..].iter().all(|&u| u == 0) {
            continue;
        }
        // col_{j+1} += sum_i u_i * col_i
        for k in 0..n {
            let row = &h[idx(k, j + 2)..idx(k, 0) + n];
            let acc = row
                .iter()
                .zip(&us[j + 2..])
                .fold(0, |acc, (&x, &u)| m.add(acc, m.mul(u, x)));
            h[idx(k, j + 1)] = m.add(h[idx(k, j + 1)], acc);
        }
    }
    // p_0 = 1; p_k = (t - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{l=i+1..k} h_{l,l-1}) p_{i-1}
    let one = m.to_mont(1);
    let mut polys: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
    polys.push(vec![one]);
    for k in 0..n {
        let prev = &polys[k];
        let mut next = vec![0u64; k + 2];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] = m.add(next[d + 1], c);
            next[d] = m.sub(next[d], m.mul(h[idx(k, k)], c));
        }
        let mut prod = one;
        for i in (0..k).rev() {
            prod = m.mul(prod, h[idx(i + 1, i)]);
            if prod == 0 {
                break;
            }
            let coef = m.mul(h[idx(i, k)], prod);
            if coef == 0 {
                continue;
            }
            for (d, &c) in polys[i].iter().enumerate() {
                next[d] = m.sub(next[d], m.mul(coef, c));
            }
        }
        polys.push(next);
    }
    polys
        .pop()
        .expect("n + 1 polynomials")
        .into_iter()
        .map(|c| m.from_mont(c))
        .collect()
}

/// Incremental Chinese remaindering of coefficient vectors.
struct Crt {
    modulus: BigInt,
    values: Vec<BigInt>,
}

impl Crt {
    fn new(len: usize) -> Self {
        Crt {
            modulus: BigInt::one(),
            values: vec![BigInt::zero(); len],
        }
    }

    fn absorb(&mut self, residues: &[u64], p: u64) {
        let m_mod_p = residue(&self.modulus, p);
        let m_inv = pow_mod(m_mod_p, p - 2, p);
        let pb = BigInt::from(p);
        for (x, &r) in self.values.iter_mut().zip(residues) {
            let x_mod_p = residue(x, p);
            let diff = (r + p - x_mod_p) % p;
            let k = mul_mod(diff, m_inv, p);
            if k != 0 {
                *x += &self.modulus * BigInt::from(k);
            }
        }
        self.modulus *= pb;
    }

    fn symmetric(&self) -> Vec<BigInt> {
        let half: BigInt = &self.modulus >> 1;
        self.values
            .iter()
            .map(|x| {
                if x > &half {
                    x - &self.modulus
                } else {
                    x.clone()
                }
            })
            .collect()
    }
}

/// Log2 of an upper bound on every coefficient of the characteristic
/// polynomial. The coefficient of `t^(n-k)` is a signed sum of the `k × k`
/// principal minors, so it is bounded both by `C(n, k) radius^k` (with
/// `radius` bounding the eigenvalue moduli) and, by Hadamard's inequality,
/// by the `k`-th elementary symmetric function of the column norms or of the
/// row norms. The smallest of the three is taken for each `k`.
fn coefficient_bits(n: usize, entries: &[f64], radius: f64) -> f64 {
    let lr = radius.max(1.0).log2();
    let col: Vec<f64> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| entries[i * n + j].powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let row: Vec<f64> = (0..n)
        .map(|i| {
            entries[i * n..i * n + n]
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let (ec, er) = (
        log2_elementary_symmetric(&col),
        log2_elementary_symmetric(&row),
    );
    let mut log_binom = 0.0f64;
    let mut best = 0.0f64;
    for k in 1..=n {
        log_binom += ((n - k + 1) as f64 / k as f64).log2();
        let bound = (log_binom + k as f64 * lr).min(ec[k]).min(er[k]);
        best = best.max(bound);
    }
    best
}

/// `log2 e_k(xs)` for `k = 0..=len`, computed in the log domain so that
/// large products do not overflow.
fn log2_elementary_symmetric(xs: &[f64]) -> Vec<f64> {
    let mut e = vec![f64::NEG_INFINITY; xs.len() + 1];
    e[0] = 0.0;
    for (j, &x) in xs.iter().enumerate() {
        let lx = x.log2();
        for k in (1..=j + 1).rev() {
            e[k] = log2_add(e[k], e[k - 1] + lx);
        }
    }
    e
}

fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

/// Upper bound on the spectral radius of an integer matrix, from norms of
/// powers of its entrywise absolute value.
pub(crate) fn spectral_radius_bound(n: usize, entries: &[f64]) -> f64 {
    let col = (0..n)
        .map(|j| (0..n).map(|i| entries[i * n + j]).sum::<f64>())
        .fold(0.0, f64::max);
    let row = (0..n)
        .map(|i| entries[i * n..i * n + n].iter().sum::<f64>())
        .fold(0.0, f64::max);
    let mut best = col.min(row);
    if n <= 16 || best <= 1.0 {
        return best;
    }
    // ρ(M) <= ρ(|M|) <= ||(|M|/s)^(2^k)||^(1/2^k) · s
    let mut a: Vec<f64> = entries.iter().map(|x| x / best).collect();
    let mut log_scale = best.ln();
    let mut power = 1.0f64;
    for _ in 0..3 {
        let mut b = vec![0.0f64; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                let (rk, ri) = (&a[k * n..k * n + n], &mut b[i * n..i * n + n]);
                for (x, &y) in ri.iter_mut().zip(rk) {
                    *x += aik * y;
                }
            }
        }
        power *= 2.0;
        let norm = (0..n)
            .map(|i| b[i * n..i * n + n].iter().sum::<f64>())
            .fold(0.0, f64::max);
        if norm == 0.0 {
            return 0.0;
        }
        // rescale to keep entries near 1
        for x in b.iter_mut() {
            *x /= norm;
        }
        log_scale = 2.0 * log_scale + norm.ln();
        a = b;
        best = best.min((log_scale / power).exp());
    }
    // cover accumulated floating-point error
    best * (1.0 + 1e-9) + 1e-9
}

/// Exact characteristic polynomial `det(tI - M)` by Hessenberg reduction
/// modulo enough primes to cover the coefficient bound.
pub(crate) fn charpoly_multimodular(n: usize, entries: &[BigInt]) -> IntPoly {
    let abs: Vec<f64> = entries
        .iter()
        .map(|x| x.to_f64().unwrap_or(f64::MAX).abs())
        .collect();
    let radius = spectral_radius_bound(n, &abs);
    let bits = coefficient_bits(n, &abs, radius) + 2.0;
    let count = (bits / 61.0).ceil().max(1.0) as usize;
    let ps = primes(count);
    let images: Vec<Vec<u64>> = exec::map(&ps, |&p| {
        let reduced: Vec<u64> = entries.iter().map(|x| residue(x, p)).collect();
        charpoly_mod_p(n, &reduced, p)
    });
    let mut crt = Crt::new(n + 1);
    for (img, &p) in images.iter().zip(&ps) {
        crt.absorb(img, p);
    }
    IntPoly::new(crt.symmetric())
}

// ---- polynomial gcd ----

fn trim_mod(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Monic gcd over `Z/p`.
fn gcd_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim_mod(&mut x);
    trim_mod(&mut y);
    while !y.is_empty() {
        // x <- x mod y
        let dy = y.len() - 1;
        let inv = pow_mod(*y.last().expect("nonzero"), p - 2, p);
        while x.len() > dy {
            let k = x.len() - 1;
            let f = mul_mod(x[k], inv, p);
            if f != 0 {
                for j in 0..=dy {
                    let t = mul_mod(f, y[j], p);
                    x[k - dy + j] = (x[k - dy + j] + p - t) % p;
                }
            }
            x.pop();
            trim_mod(&mut x);
        }
        std::mem::swap(&mut x, &mut y);
    }
    if let Some(&lc) = x.last() {
        let inv = pow_mod(lc, p - 2, p);
        for c in x.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
    }
    x
}

/// Gcd of two nonzero integer polynomials by modular images, each candidate
/// confirmed by exact trial division. The result is primitive with positive
/// leading coefficient.
pub(crate) fn poly_gcd(p: &IntPoly, q: &IntPoly) -> IntPoly {
    let a = p.primitive();
    let b = q.primitive();
    let la = a.leading().expect("nonzero").clone();
    let lb = b.leading().expect("nonzero").clone();
    let gamma = la.gcd(&lb);
    let mut best: Option<usize> = None;
    let mut crt = Crt::new(0);
    let mut previous: Option<IntPoly> = None;
    let mut used = 0usize;
    loop {
        used += 1;
        let prime = *primes(used).last().expect("nonempty");
        if residue(&la, prime) == 0 || residue(&lb, prime) == 0 {
            continue;
        }
        let ar: Vec<u64> = a.coeffs().iter().map(|c| residue(c, prime)).collect();
        let br: Vec<u64> = b.coeffs().iter().map(|c| residue(c, prime)).collect();
        let mut g = gcd_mod_p(&ar, &br, prime);
        let d = g.len() - 1;
        if d == 0 {
            return IntPoly::one();
        }
        match best {
            Some(bd) if d > bd => continue,
            Some(bd) if d == bd => {}
            _ => {
                best = Some(d);
                crt = Crt::new(d + 1);
                previous = None;
            }
        }
        let gm = residue(&gamma, prime);
        for c in g.iter_mut() {
            *c = mul_mod(*c, gm, prime);
        }
        crt.absorb(&g, prime);
        let candidate = IntPoly::new(crt.symmetric()).primitive();
        if previous.as_ref() == Some(&candidate)
            && a.exact_div(&candidate).is_some()
            && b.exact_div(&candidate).is_some()
        {
            return candidate;
        }
        previous = Some(candidate);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_generation() {
        let ps = primes(3);
        assert!(ps.iter().all(|&p| is_prime(p) && p < (1 << 62)));
        assert!(ps[0] > ps[1] && ps[1] > ps[2]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
    }

    #[test]
    fn montgomery_round_trip() {
        let p = primes(1)[0];
        let m = Mont::new(p);
        for &x in &[0u64, 1, 2, p - 1, 123_456_789] {
            assert_eq!(m.from_mont(m.to_mont(x)), x);
        }
        let (a, b) = (987_654_321_987u64, p - 5);
        assert_eq!(
            m.from_mont(m.mul(m.to_mont(a), m.to_mont(b))),
            mul_mod(a, b, p)
        );
        let ia = m.inv(m.to_mont(a));
        assert_eq!(m.from_mont(m.mul(ia, m.to_mont(a))), 1);
    }

    #[test]
    fn hessenberg_small() {
        let p = 1_000_000_007u64;
        // [[0,1],[1,2]] -> t^2 - 2t - 1
        let cp = charpoly_mod_p(2, &[0, 1, 1, 2], p);
        assert_eq!(cp, vec![p - 1, p - 2, 1]);
        // zero pivot in the first column forces a swap
        let cp = charpoly_mod_p(3, &[1, 2, 3, 0, 4, 5, 6, 7, 8], p);
        // det(tI - M) = t^3 - 13t^2 - 9t + 15 by cofactor expansion
        let expect: Vec<u64> = [15i64, -9, -13, 1]
            .iter()
            .map(|&c| c.rem_euclid(p as i64) as u64)
            .collect();
        assert_eq!(cp, expect);
    }

    #[test]
    fn radius_bound_dominates() {
        // [[0,1],[1,2]] has spectral radius 1 + sqrt 2
        let r = spectral_radius_bound(2, &[0.0, 1.0, 1.0, 2.0]);
        assert!(r >= 1.0 + 2f64.sqrt());
    }
}
