//! Dense square matrices and the determinant oracles used to check every
//! structured result.

use crate::scalar::{ExactScalar, FloatScalar, Scalar};

/// Column is treated as numerically zero when its largest candidate pivot is
/// at most `2^-50` times the largest entry of the input matrix.
pub const ZERO_PIVOT_RATIO: f64 = 1.0 / (1u64 << 50) as f64;

/// `log_abs` value reported alongside a zero sign. Finite so reports stay
/// valid JSON.
pub const SINGULAR_LOG_ABS: f64 = f64::MIN;

/// Row-major `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    /// Returns `None` unless `entries.len() == n * n`.
    pub fn from_row_major(n: usize, entries: Vec<T>) -> Option<Self> {
        (entries.len() == n * n).then_some(DenseMatrix { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        DenseMatrix { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(DenseMatrix {
            n,
            entries: rows.iter().flatten().cloned().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.n {
                self.entries.swap(i * self.n + c, j * self.n + c);
            }
        }
    }

    /// Leading `k x k` principal submatrix.
    pub fn leading(&self, k: usize) -> Self {
        Self::from_fn(k, |i, j| self.get(i, j).clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

/// Sign and logarithm of the absolute value of a real determinant.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LogDet {
    /// -1, 0 or +1.
    pub sign: i8,
    /// `ln |det|`; equals [`SINGULAR_LOG_ABS`] when `sign == 0`.
    pub log_abs: f64,
}

impl LogDet {
    pub const ONE: LogDet = LogDet {
        sign: 1,
        log_abs: 0.0,
    };
    pub const SINGULAR: LogDet = LogDet {
        sign: 0,
        log_abs: SINGULAR_LOG_ABS,
    };

    pub fn value(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_abs.exp()
        }
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_dense_exact<T: ExactScalar>(m: &DenseMatrix<T>) -> T {
    bareiss(m)
}

/// Determinant by partial-pivoted elimination (modulus pivoting for complex).
pub fn det_dense_float<T: FloatScalar>(m: &DenseMatrix<T>) -> T {
    pivoted_det(m)
}

/// Sign and `ln |det|` from the same pivoted elimination.
pub fn logdet_dense_float(m: &DenseMatrix<f64>) -> LogDet {
    match pivoted_elimination(m) {
        None => LogDet::SINGULAR,
        Some((pivots, odd)) => {
            let mut negative = odd;
            let mut log_abs = 0.0;
            for p in pivots {
                negative ^= p < 0.0;
                log_abs += p.abs().ln();
            }
            LogDet {
                sign: if negative { -1 } else { 1 },
                log_abs,
            }
        }
    }
}

/// Dispatches to the exact or pivoted oracle according to the scalar kind.
pub fn det_dense<T: Scalar>(m: &DenseMatrix<T>) -> T {
    if T::KIND.is_exact() {
        bareiss(m)
    } else {
        pivoted_det(m)
    }
}

fn bareiss<T: Scalar>(m: &DenseMatrix<T>) -> T {
    let n = m.n;
    if n == 0 {
        return T::one();
    }
    let mut a = m.entries.clone();
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n {
        if a[k * n + k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                return T::zero();
            };
            for c in 0..n {
                a.swap(k * n + c, r * n + c);
            }
            negate = !negate;
        }
        let pivot = a[k * n + k].clone();
        for i in k + 1..n {
            let lead = a[i * n + k].clone();
            for j in k + 1..n {
                let v = pivot.clone() * a[i * n + j].clone() - lead.clone() * a[k * n + j].clone();
                a[i * n + j] = v / prev.clone();
            }
        }
        prev = pivot;
    }
    let det = a[n * n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

fn pivoted_det<T: Scalar>(m: &DenseMatrix<T>) -> T {
    match pivoted_elimination(m) {
        None => T::zero(),
        Some((pivots, odd)) => {
            let det = pivots.into_iter().fold(T::one(), |acc, p| acc * p);
            if odd {
                -det
            } else {
                det
            }
        }
    }
}

/// Gaussian elimination with partial pivoting. Returns the pivots and
/// whether an odd number of row swaps happened, or `None` when a column is
/// numerically zero.
fn pivoted_elimination<T: Scalar>(m: &DenseMatrix<T>) -> Option<(Vec<T>, bool)> {
    let n = m.n;
    let mut a = m.entries.clone();
    let scale = a.iter().map(Scalar::magnitude).fold(0.0, f64::max);
    let tol = ZERO_PIVOT_RATIO * scale;
    let mut odd = false;
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let (best, best_mag) = (k..n)
            .map(|r| (r, a[r * n + k].magnitude()))
            .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if !(best_mag > tol) {
            return None;
        }
        if best != k {
            for c in 0..n {
                a.swap(k * n + c, best * n + c);
            }
            odd = !odd;
        }
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let pivot_row = &head[k * n..];
        let pivot = pivot_row[k].clone();
        for row in tail.chunks_exact_mut(n) {
            if row[k].is_zero() {
                continue;
            }
            let factor = row[k].clone() / pivot.clone();
            for (x, y) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                *x = x.clone() - factor.clone() * y.clone();
            }
        }
        pivots.push(pivot);
    }
    Some((pivots, odd))
}
