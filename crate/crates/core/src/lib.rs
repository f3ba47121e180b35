//! Determinants of diagonal-plus-rank-one matrices.
//!
//! The matrix with `x_i` on the diagonal and `a_i b_j` off it has determinant
//!
//! `prod_k (x_k - a_k b_k) * (1 + sum_k a_k b_k / (x_k - a_k b_k))`,
//!
//! computed here in O(n) for exact rationals, Gaussian rationals, `f64` and
//! `Complex<f64>`, next to dense oracles (Bareiss and pivoted elimination),
//! a division-free form, the multilinear column expansion, and the often
//! reprinted variant with `x_k` in the denominators, which is wrong.
//!
//! [`fubini_study`] applies the formula to the Fubini–Study metric on
//! complex projective space.

// Negated comparisons are deliberate: they treat NaN as failing the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dense;
pub mod error;
pub mod fubini_study;
pub mod random;
pub mod rank1;
pub mod scalar;
pub mod text;

pub use dense::{
    det_dense, det_dense_exact, det_dense_float, logdet_dense_float, DenseMatrix, LogDet,
};
pub use error::{Error, ParseError, Result};
pub use fubini_study::{
    fs_det_closed_form, fs_einstein_check, fs_log_det, fs_metric_matrix, fs_rank1_params,
    fs_ricci_fd, ChartPoint, EinsteinReport,
};
pub use rank1::{
    det_by_expansion, det_by_expansion_with_limit, det_corrected, det_corrected_eval,
    det_division_free, det_erroneous, expansion_term, log_abs_det_corrected, logdet_corrected,
    logdet_corrected_eval, EvalPath, Evaluation, ExpansionSubset, Rank1System,
};
pub use scalar::{ExactScalar, FloatScalar, RealScalar, Scalar, ScalarKind};

pub use num_complex::Complex64 as C64;
pub use num_rational::BigRational as Rational;

/// Gaussian rational: exact complex number with rational parts.
pub type GaussianRational = num_complex::Complex<Rational>;

pub type Rank1F64 = Rank1System<f64>;
pub type Rank1C64 = Rank1System<C64>;
pub type Rank1Q = Rank1System<Rational>;
pub type Rank1Qi = Rank1System<GaussianRational>;

pub type DenseF64 = DenseMatrix<f64>;
pub type DenseC64 = DenseMatrix<C64>;
pub type DenseQ = DenseMatrix<Rational>;
pub type DenseQi = DenseMatrix<GaussianRational>;
