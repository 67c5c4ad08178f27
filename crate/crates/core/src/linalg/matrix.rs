//! Square integer matrices.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::modular;
use super::poly::IntPoly;

/// Square matrix of exact integers, row-major. Abelianization matrices use
/// the convention that column `i` is the exponent vector of the image of
/// basis element `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

/// Largest dimension handled by exact Bareiss evaluation and interpolation;
/// bigger matrices go through the multimodular Hessenberg route.
pub const INTERPOLATION_MAX_DIM: usize = 16;

impl IntMatrix {
    pub fn zero(n: usize) -> Self {
        IntMatrix {
            n,
            entries: vec![BigInt::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds from rows. Panics if the rows do not form a square.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), n, "matrix must be square");
            entries.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix { n, entries }
    }

    /// Builds from columns given as exponent vectors.
    pub fn from_columns(columns: &[Vec<i64>]) -> Self {
        let n = columns.len();
        let mut m = IntMatrix::zero(n);
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), n, "matrix must be square");
            for (i, &x) in c.iter().enumerate() {
                m.entries[i * n + j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries
            .chunks(self.n.max(1))
            .take(self.n)
            .map(<[BigInt]>::to_vec)
            .collect()
    }

    /// Rows as `i64`, when every entry fits.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.rows()
            .into_iter()
            .map(|r| r.iter().map(|x| i64::try_from(x).ok()).collect())
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.n;
        let mut t = IntMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                t.entries[j * n + i] = self.entries[i * n + j].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = IntMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * &other.entries[k * n + j];
                }
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        bareiss_det(self.n, self.entries.clone())
    }

    /// `det(tI - M)`, monic of degree `n`.
    ///
    /// Larger matrices are first split along the strongly connected
    /// components of their nonzero pattern. Ordering the components
    /// topologically makes `M` block triangular, so the characteristic
    /// polynomial is the product over the diagonal blocks.
    pub fn char_poly(&self) -> IntPoly {
        if self.n <= INTERPOLATION_MAX_DIM {
            return self.char_poly_interpolation();
        }
        let blocks = self.diagonal_blocks();
        if blocks.len() == 1 {
            return self.char_poly_multimodular();
        }
        blocks.iter().fold(IntPoly::one(), |acc, b| {
            let sub = self.principal_submatrix(b);
            let p = if sub.n <= INTERPOLATION_MAX_DIM {
                sub.char_poly_interpolation()
            } else {
                sub.char_poly_multimodular()
            };
            &acc * &p
        })
    }

    /// The square submatrix on the given rows and columns.
    pub fn principal_submatrix(&self, idx: &[usize]) -> IntMatrix {
        let k = idx.len();
        let mut m = IntMatrix::zero(k);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.entries[a * k + b] = self.entries[i * self.n + j].clone();
            }
        }
        m
    }

    /// Strongly connected components of the graph with an edge `i → j` for
    /// each nonzero entry `(i, j)`, by Tarjan's algorithm.
    pub fn diagonal_blocks(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| !self.entries[i * n + j].is_zero())
                    .collect()
            })
            .collect();
        const UNSEEN: usize = usize::MAX;
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut blocks = Vec::new();
        let mut counter = 0;
        for root in 0..n {
            if index[root] != UNSEEN {
                continue;
            }
            // explicit call stack of (vertex, next neighbour position)
            let mut calls = vec![(root, 0usize)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
                if let Some(&w) = adj[v].get(*pos) {
                    *pos += 1;
                    if index[w] == UNSEEN {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        calls.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                calls.pop();
                if let Some(&(parent, _)) = calls.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut block = Vec::new();
                    loop {
                        let w = stack.pop().expect("v is on the stack");
                        on_stack[w] = false;
                        block.push(w);
                        if w == v {
                            break;
                        }
                    }
                    block.sort_unstable();
                    blocks.push(block);
                }
            }
        }
        blocks
    }

    /// Evaluates `det(kI - M)` at `k = 0..=n` and interpolates in the
    /// falling-factorial basis, where every division is exact.
    pub fn char_poly_interpolation(&self) -> IntPoly {
        let n = self.n;
        let mut values: Vec<BigInt> = (0..=n)
            .map(|k| {
                let mut e: Vec<BigInt> = self.entries.iter().map(|x| -x).collect();
                for i in 0..n {
                    e[i * n + i] += BigInt::from(k);
                }
                bareiss_det(n, e)
            })
            .collect();
        // forward differences: values[j] becomes Δ^j f(0)
        for j in 1..=n {
            for i in (j..=n).rev() {
                let d = &values[i] - &values[i - 1];
                values[i] = d;
            }
        }
        // f(t) = Σ_j (Δ^j f(0) / j!) · t(t-1)…(t-j+1)
        let mut result = IntPoly::zero();
        let mut falling = IntPoly::one();
        let mut fact = BigInt::one();
        for (j, v) in values.iter().enumerate() {
            if j > 0 {
                fact *= BigInt::from(j);
                falling = &falling * &IntPoly::linear_root(j as i64 - 1);
            }
            let c = v / &fact;
            debug_assert!(
                (v % &fact).is_zero(),
                "falling-factorial coefficient must be integral"
            );
            result = &result + &falling.scale(&c);
        }
        result
    }

    pub fn char_poly_multimodular(&self) -> IntPoly {
        modular::charpoly_multimodular(self.n, &self.entries)
    }
}

fn bareiss_det(n: usize, mut a: Vec<BigInt>) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                a[i * n + j] = v;
            }
        }
        prev = a[k * n + k].clone();
    }
    sign * &a[n * n - 1]
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| {
                format!(
                    "[{}]",
                    r.iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        assert_eq!(
            IntMatrix::from_rows(&[[0, 1], [1, 2]]).det(),
            BigInt::from(-1)
        );
        assert_eq!(
            IntMatrix::from_rows(&[[0, 1, 1], [1, 2, 2], [0, 0, -1]]).det(),
            BigInt::from(1)
        );
        assert_eq!(
            IntMatrix::from_rows(&[[1, 2], [2, 4]]).det(),
            BigInt::zero()
        );
        assert_eq!(IntMatrix::zero(0).det(), BigInt::one());
    }

    #[test]
    fn char_poly_examples() {
        let m = IntMatrix::from_rows(&[[0, 1], [1, 2]]);
        assert_eq!(m.char_poly(), IntPoly::from_i64s(&[-1, -2, 1]));
        let m = IntMatrix::from_rows(&[[0, 1, 1], [1, 2, 2], [0, 0, -1]]);
        assert_eq!(m.char_poly(), IntPoly::from_i64s(&[-1, -3, -1, 1]));
        assert_eq!(
            IntMatrix::zero(2).char_poly(),
            IntPoly::from_i64s(&[0, 0, 1])
        );
        assert_eq!(IntMatrix::zero(0).char_poly(), IntPoly::one());
    }

    #[test]
    fn both_routes_agree_on_example_matrix() {
        let m = IntMatrix::from_rows(&[[0, 1, 1], [1, 2, 2], [0, 0, -1]]);
        assert_eq!(m.char_poly_interpolation(), m.char_poly_multimodular());
    }

    #[test]
    fn block_triangular_split() {
        // blocks {0, 2} and {1, 3}, coupled in one direction only
        let m = IntMatrix::from_rows(&[[1, 0, 2, 0], [5, 0, 0, 1], [1, 0, 1, 0], [0, 1, 0, 3]]);
        let mut blocks = m.diagonal_blocks();
        blocks.sort();
        assert_eq!(blocks, vec![vec![0, 2], vec![1, 3]]);
        let mut big = IntMatrix::zero(20);
        for i in 0..20 {
            for j in 0..20 {
                let v = if j <= i || (i < 10) == (j < 10) {
                    (i * 7 + j * 3) as i64 % 5 - 2
                } else {
                    0
                };
                big.set(i, j, BigInt::from(v));
            }
        }
        assert!(big.diagonal_blocks().len() > 1);
        assert_eq!(big.char_poly(), big.char_poly_interpolation());
        assert_eq!(big.char_poly(), big.char_poly_multimodular());
    }

    #[test]
    fn columns_are_images() {
        let m = IntMatrix::from_columns(&[vec![0, 1], vec![1, 2]]);
        assert_eq!(m, IntMatrix::from_rows(&[[0, 1], [1, 2]]));
        let m = IntMatrix::from_columns(&[vec![1, 0], vec![5, 1]]);
        assert_eq!(m.get(0, 1), &BigInt::from(5));
    }
}
