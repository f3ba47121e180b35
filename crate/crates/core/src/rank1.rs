//! Diagonal-plus-rank-one systems and their determinant formulas.
//!
//! A [`Rank1System`] holds vectors `x`, `a`, `b` and stands for the matrix
//! with `x_i` on the diagonal and `a_i * b_j` off it, which equals
//! `diag(d) + a b^T` with factors `d_k = x_k - a_k b_k`.
//!
//! Four evaluations are provided:
//!
//! * [`det_corrected`]: `prod d_k * (1 + sum a_k b_k / d_k)`, O(n). Falls back
//!   to the division-free form when a factor is (numerically) zero.
//! * [`det_division_free`]: `prod d_k + sum_k a_k b_k prod_{l != k} d_l`,
//!   valid for every input.
//! * [`det_erroneous`]: the misprinted variant with `x_k` in the
//!   denominators. Wrong in general; kept to demonstrate the discrepancy.
//! * [`det_by_expansion`]: sum of [`expansion_term`] over all column
//!   subsets, each term evaluated by the dense oracle.

use num_traits::Zero;

use crate::dense::{det_dense, DenseMatrix, LogDet, SINGULAR_LOG_ABS};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, FloatScalar, Scalar};

/// Relative size below which a float factor `d_k` triggers the
/// division-free fallback: `min |d_k| < 2^-26 * max(1, max |d_k|)`.
pub const FALLBACK_RATIO: f64 = 1.0 / (1u64 << 26) as f64;

/// Default cap on the dimension accepted by [`det_by_expansion`].
pub const DEFAULT_EXPANSION_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Rank1System<T> {
    x: Vec<T>,
    a: Vec<T>,
    b: Vec<T>,
}

impl<T: Scalar> Rank1System<T> {
    pub fn new(x: Vec<T>, a: Vec<T>, b: Vec<T>) -> Result<Self> {
        if x.len() != a.len() || x.len() != b.len() {
            return Err(Error::LengthMismatch {
                x: x.len(),
                a: a.len(),
                b: b.len(),
            });
        }
        Ok(Rank1System { x, a, b })
    }

    pub fn from_i64(x: &[i64], a: &[i64], b: &[i64]) -> Result<Self> {
        let conv = |v: &[i64]| v.iter().map(|&e| T::from_i64(e)).collect();
        Self::new(conv(x), conv(a), conv(b))
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn a(&self) -> &[T] {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    /// `a_k * b_k` for every k.
    pub fn couplings(&self) -> Vec<T> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| a.clone() * b.clone())
            .collect()
    }

    /// `d_k = x_k - a_k * b_k`.
    pub fn factors(&self) -> Vec<T> {
        self.x
            .iter()
            .zip(self.couplings())
            .map(|(x, c)| x.clone() - c)
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        DenseMatrix::from_fn(self.dim(), |i, j| {
            if i == j {
                self.x[i].clone()
            } else {
                self.a[i].clone() * self.b[j].clone()
            }
        })
    }

    /// Applies `perm` (new position `i` takes old index `perm[i]`) to all three vectors.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let pick = |v: &[T]| perm.iter().map(|&p| v[p].clone()).collect();
        Rank1System {
            x: pick(&self.x),
            a: pick(&self.a),
            b: pick(&self.b),
        }
    }

    /// Replaces `(a, b)` by `(c a, b / c)`; `c` must be nonzero.
    pub fn rescaled(&self, c: &T) -> Self {
        Rank1System {
            x: self.x.clone(),
            a: self.a.iter().map(|v| v.clone() * c.clone()).collect(),
            b: self.b.iter().map(|v| v.clone() / c.clone()).collect(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Rank1System<U> {
        Rank1System {
            x: self.x.iter().map(&f).collect(),
            a: self.a.iter().map(&f).collect(),
            b: self.b.iter().map(&f).collect(),
        }
    }
}

/// Which formula produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalPath {
    /// The corrected formula with divisions by `d_k`.
    Divided,
    /// The division-free polynomial form, requested directly.
    DivisionFree,
    /// The corrected formula delegated to the division-free form because a
    /// factor was (numerically) zero.
    Fallback,
}

impl EvalPath {
    pub fn name(self) -> &'static str {
        match self {
            EvalPath::Divided => "divided",
            EvalPath::DivisionFree => "division-free",
            EvalPath::Fallback => "fallback",
        }
    }
}

/// A value together with the note of which path computed it.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<V> {
    pub value: V,
    pub path: EvalPath,
}

/// Subset `S` of column indices (zero-based) whose column takes the rank-one
/// part `b_k a`; the other columns take `d_k e_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionSubset {
    members: Vec<bool>,
}

impl ExpansionSubset {
    pub fn empty(n: usize) -> Self {
        ExpansionSubset {
            members: vec![false; n],
        }
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut members = vec![false; n];
        for &index in indices {
            if index >= n {
                return Err(Error::SubsetIndex { index, n });
            }
            members[index] = true;
        }
        Ok(ExpansionSubset { members })
    }

    /// Bit `k` of `mask` selects column `k`. Requires `n < 64`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n < 64);
        ExpansionSubset {
            members: (0..n).map(|k| mask >> k & 1 == 1).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.members.len()
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, k: usize) -> bool {
        self.members.get(k).copied().unwrap_or(false)
    }
}

fn needs_fallback<T: Scalar>(factors: &[T]) -> bool {
    if T::KIND.is_exact() {
        return factors.iter().any(Zero::is_zero);
    }
    let threshold = factor_threshold(factors);
    factors.iter().any(|d| !(d.magnitude() >= threshold))
}

fn factor_threshold<T: Scalar>(factors: &[T]) -> f64 {
    let max = factors.iter().map(Scalar::magnitude).fold(0.0, f64::max);
    FALLBACK_RATIO * max.max(1.0)
}

/// Corrected formula; see [`det_corrected_eval`] for the path note.
pub fn det_corrected<T: Scalar>(s: &Rank1System<T>) -> T {
    det_corrected_eval(s).value
}

pub fn det_corrected_eval<T: Scalar>(s: &Rank1System<T>) -> Evaluation<T> {
    let d = s.factors();
    if needs_fallback(&d) {
        return Evaluation {
            value: division_free(&d, &s.couplings()),
            path: EvalPath::Fallback,
        };
    }
    let ratios = s
        .couplings()
        .into_iter()
        .zip(&d)
        .map(|(c, dk)| c / dk.clone());
    let bracket = if T::KIND.is_exact() {
        ratios.fold(T::one(), |acc, r| acc + r)
    } else {
        compensated_sum(T::one(), ratios)
    };
    let value = d.into_iter().fold(T::one(), |acc, dk| acc * dk) * bracket;
    Evaluation {
        value,
        path: EvalPath::Divided,
    }
}

/// Division-free polynomial form; defined for every input.
pub fn det_division_free<T: Scalar>(s: &Rank1System<T>) -> T {
    division_free(&s.factors(), &s.couplings())
}

/// `prod d + sum_k c_k prod_{l != k} d_l` with prefix/suffix products.
fn division_free<T: Scalar>(d: &[T], c: &[T]) -> T {
    let n = d.len();
    let mut suffix = vec![T::one(); n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1].clone() * d[k].clone();
    }
    let mut prefix = T::one();
    let mut terms = Vec::with_capacity(n);
    for k in 0..n {
        terms.push(c[k].clone() * prefix.clone() * suffix[k + 1].clone());
        prefix = prefix * d[k].clone();
    }
    if T::KIND.is_exact() {
        terms.into_iter().fold(prefix, |acc, t| acc + t)
    } else {
        compensated_sum(prefix, terms)
    }
}

/// The misprinted formula `prod d_k * (1 + sum a_k b_k / x_k)`.
///
/// This is NOT the determinant in general. It agrees with it when every
/// `a_k b_k` vanishes.
pub fn det_erroneous<T: Scalar>(s: &Rank1System<T>) -> Result<T> {
    if let Some(index) = s.x.iter().position(Zero::is_zero) {
        return Err(Error::DivisionByZero { index });
    }
    let bracket = s
        .couplings()
        .into_iter()
        .zip(&s.x)
        .fold(T::one(), |acc, (c, x)| acc + c / x.clone());
    let product = s.factors().into_iter().fold(T::one(), |acc, dk| acc * dk);
    Ok(product * bracket)
}

/// Matrix whose column `k` is `b_k a` for `k` in `subset` and `d_k e_k` otherwise.
pub fn expansion_matrix<T: Scalar>(
    s: &Rank1System<T>,
    subset: &ExpansionSubset,
) -> Result<DenseMatrix<T>> {
    let n = s.dim();
    if subset.dim() != n {
        return Err(Error::SubsetIndex {
            index: subset.dim(),
            n,
        });
    }
    let d = s.factors();
    Ok(DenseMatrix::from_fn(n, |i, j| {
        if subset.contains(j) {
            s.b[j].clone() * s.a[i].clone()
        } else if i == j {
            d[j].clone()
        } else {
            T::zero()
        }
    }))
}

/// One term of the column-wise multilinear expansion, evaluated by the dense oracle.
pub fn expansion_term<T: Scalar>(s: &Rank1System<T>, subset: &ExpansionSubset) -> Result<T> {
    Ok(det_dense(&expansion_matrix(s, subset)?))
}

/// Sum of [`expansion_term`] over all `2^n` subsets, with the default limit.
pub fn det_by_expansion<T: Scalar>(s: &Rank1System<T>) -> Result<T> {
    det_by_expansion_with_limit(s, DEFAULT_EXPANSION_LIMIT)
}

pub fn det_by_expansion_with_limit<T: Scalar>(s: &Rank1System<T>, limit: usize) -> Result<T> {
    let n = s.dim();
    if n > limit || n >= 64 {
        return Err(Error::DimensionLimit {
            n,
            limit: limit.min(63),
        });
    }
    let mut total = T::zero();
    for mask in 0..1u64 << n {
        total = total + expansion_term(s, &ExpansionSubset::from_mask(n, mask))?;
    }
    Ok(total)
}

/// Sign and `ln |det|` of a real system in O(n) without overflow.
pub fn logdet_corrected(s: &Rank1System<f64>) -> LogDet {
    logdet_corrected_eval(s).value
}

pub fn logdet_corrected_eval(s: &Rank1System<f64>) -> Evaluation<LogDet> {
    let Evaluation {
        value: (phase, log_abs),
        path,
    } = log_parts(s);
    let value = if phase.re == 0.0 {
        LogDet::SINGULAR
    } else {
        LogDet {
            sign: if phase.re > 0.0 { 1 } else { -1 },
            log_abs,
        }
    };
    Evaluation { value, path }
}

/// `ln |det|` for real or complex float systems.
pub fn log_abs_det_corrected<T: FloatScalar>(s: &Rank1System<T>) -> f64 {
    log_parts(s).value.1
}

/// Returns the unit phase of the determinant (zero when singular) and `ln |det|`.
///
/// Regular path: `sum ln|d_k| + ln|1 + sum c_k / d_k|`. When some factors are
/// below the fallback threshold, the large factors `G` are pulled out and the
/// remainder is evaluated division-free over the small ones `Z`:
/// `prod_Z d (1 + sum_G c/d) + sum_{k in Z} c_k prod_{Z \ k} d`.
fn log_parts<T: Scalar>(s: &Rank1System<T>) -> Evaluation<(num_complex::Complex64, f64)> {
    use num_complex::Complex64;

    let d = s.factors();
    let c = s.couplings();
    let threshold = factor_threshold(&d);
    let small: Vec<bool> = d.iter().map(|dk| !(dk.magnitude() >= threshold)).collect();
    let fallback = small.iter().any(|&z| z);

    let mut phase = Complex64::new(1.0, 0.0);
    let mut log_abs = 0.0;
    let mut large_ratios = Vec::with_capacity(d.len());
    for k in 0..d.len() {
        if small[k] {
            continue;
        }
        let mag = d[k].magnitude();
        phase *= d[k].to_c64() / mag;
        log_abs += mag.ln();
        large_ratios.push(c[k].clone() / d[k].clone());
    }
    let bracket = compensated_sum(T::one(), large_ratios);

    let remainder = if fallback {
        let small_d: Vec<T> = (0..d.len())
            .filter(|&k| small[k])
            .map(|k| d[k].clone())
            .collect();
        let small_c: Vec<T> = (0..d.len())
            .filter(|&k| small[k])
            .map(|k| c[k].clone())
            .collect();
        // division_free(d, c) = prod d + sum c_k prod_{l != k} d_l; scale the
        // leading product by the bracket from the large factors.
        let prod_small = small_d.iter().cloned().fold(T::one(), |acc, v| acc * v);
        let others = division_free(&small_d, &small_c) - prod_small.clone();
        compensated_sum(prod_small * bracket, [others])
    } else {
        bracket
    };

    let mag = remainder.magnitude();
    let value = if mag == 0.0 {
        (Complex64::new(0.0, 0.0), SINGULAR_LOG_ABS)
    } else {
        (phase * remainder.to_c64() / mag, log_abs + mag.ln())
    };
    Evaluation {
        value,
        path: if fallback {
            EvalPath::Fallback
        } else {
            EvalPath::Divided
        },
    }
}
