//! Fubini–Study metric on an affine chart of complex projective space.
//!
//! On the chart `U_0 = {Z_0 != 0}` with coordinates `z in C^n` and
//! `s = |z|^2`, the metric matrix is the complex Hessian of `log(1 + s)`:
//!
//! `H_ij = delta_ij / (1 + s) - conj(z_i) z_j / (1 + s)^2`.
//!
//! It is diagonal-plus-rank-one with `x_i = (1 + s - |z_i|^2) / (1 + s)^2`,
//! `a_i = -conj(z_i) / (1 + s)` and `b_i = z_i / (1 + s)`. The common
//! textbook parametrization puts `(1 + s)^2` under both `a_i` and `b_i`, which
//! does not reproduce the off-diagonal of `H`; only the product `a_i b_j`
//! matters for the determinant, so the denominator is split evenly here.
//!
//! Every factor `x_i - a_i b_i` equals `1 / (1 + s)`, which gives
//! `det H = (1 + s)^-(n+1)`. The Ricci form `-d d-bar log det H` is therefore
//! `(n + 1) H`, i.e. the metric is Einstein with constant `n + 1`.

use num_complex::{Complex, Complex64};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::rank1::{log_abs_det_corrected, Rank1System};
use crate::scalar::{inv_pow, RealScalar, Scalar};

/// Default finite-difference step for `f64`.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// A point `z` of an affine chart. Only `U_0` is materialized; `chart` is a label.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint<R> {
    z: Vec<Complex<R>>,
    chart: usize,
}

impl<R: RealScalar> ChartPoint<R> {
    pub fn new(z: Vec<Complex<R>>) -> Self {
        ChartPoint { z, chart: 0 }
    }

    pub fn origin(n: usize) -> Self {
        Self::new(vec![Complex::new(R::zero(), R::zero()); n])
    }

    pub fn with_chart(mut self, chart: usize) -> Self {
        self.chart = chart;
        self
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn chart(&self) -> usize {
        self.chart
    }

    pub fn coords(&self) -> &[Complex<R>] {
        &self.z
    }

    /// `s = sum |z_i|^2`.
    pub fn norm_sq(&self) -> R {
        self.z.iter().fold(R::zero(), |acc, z| acc + z.norm_sqr())
    }
}

impl<R: RealScalar> Serialize for ChartPoint<R> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let z: Vec<String> = self.z.iter().map(Scalar::to_text).collect();
        let mut st = serializer.serialize_struct("ChartPoint", 3)?;
        st.serialize_field("n", &self.dim())?;
        st.serialize_field("chart", &self.chart)?;
        st.serialize_field("z", &z)?;
        st.end()
    }
}

/// `H_ij = delta_ij / (1+s) - conj(z_i) z_j / (1+s)^2`.
pub fn fs_metric_matrix<R: RealScalar>(p: &ChartPoint<R>) -> DenseMatrix<Complex<R>> {
    let t = R::one() + p.norm_sq();
    let t2 = t.clone() * t.clone();
    let inv_t = R::one() / t;
    DenseMatrix::from_fn(p.dim(), |i, j| {
        let outer = Scalar::conj(&p.z[i]) * p.z[j].clone() / t2.clone();
        if i == j {
            Complex::new(inv_t.clone(), R::zero()) - outer
        } else {
            -outer
        }
    })
}

/// The rank-one parameters of `H` (see the module docs for the split).
pub fn fs_rank1_params<R: RealScalar>(p: &ChartPoint<R>) -> Rank1System<Complex<R>> {
    let t = R::one() + p.norm_sq();
    let t2 = t.clone() * t.clone();
    let x =
        p.z.iter()
            .map(|z| Complex::new((t.clone() - z.norm_sqr()) / t2.clone(), R::zero()))
            .collect();
    let a = p.z.iter().map(|z| -Scalar::conj(z) / t.clone()).collect();
    let b = p.z.iter().map(|z| z.clone() / t.clone()).collect();
    Rank1System::new(x, a, b).expect("three vectors of length n")
}

/// `(1 + s)^-(n+1)`.
pub fn fs_det_closed_form<R: RealScalar>(p: &ChartPoint<R>) -> R {
    inv_pow(&(R::one() + p.norm_sq()), p.dim() + 1)
}

/// `ln det H(p)` through the O(n) rank-one log-determinant.
pub fn fs_log_det(p: &ChartPoint<f64>) -> f64 {
    log_abs_det_corrected(&fs_rank1_params(p))
}

/// `R_ij = -d^2/(dz_i dz-bar_j) ln det H` by central finite differences.
///
/// With `z_i = x_i + i y_i`, the Wirtinger identity gives
/// `d^2 f/(dz_i dz-bar_j) = (f_{x_i x_j} + f_{y_i y_j}) / 4 + i (f_{x_i y_j} - f_{y_i x_j}) / 4`.
/// Pure second partials use `(f(+h) - 2 f + f(-h)) / h^2`; mixed ones the
/// cross stencil `(f(+,+) - f(+,-) - f(-,+) + f(-,-)) / (4 h^2)`. Stencils are
/// evaluated sequentially in fixed index order.
pub fn fs_ricci_fd(p: &ChartPoint<f64>, h: f64) -> Result<DenseMatrix<Complex64>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidStep(h));
    }
    let n = p.dim();
    // real coordinates: index 2i is x_i, 2i + 1 is y_i
    let base: Vec<f64> = p.z.iter().flat_map(|z| [z.re, z.im]).collect();
    let eval = |u: &[f64]| {
        let z = u
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        fs_log_det(&ChartPoint::new(z))
    };
    let hessian = real_hessian(&base, h, eval);
    let m = 2 * n;
    let at = |r: usize, c: usize| hessian[r * m + c];
    Ok(DenseMatrix::from_fn(n, |i, j| {
        let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        let re = 0.25 * (at(xi, xj) + at(yi, yj));
        let im = 0.25 * (at(xi, yj) - at(yi, xj));
        -Complex64::new(re, im)
    }))
}

/// Symmetric Hessian of `f` at `u`, row-major `m x m`.
fn real_hessian(u: &[f64], h: f64, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let m = u.len();
    let f0 = f(u);
    let mut out = vec![0.0; m * m];
    let mut probe = u.to_vec();
    for p in 0..m {
        probe[p] = u[p] + h;
        let plus = f(&probe);
        probe[p] = u[p] - h;
        let minus = f(&probe);
        probe[p] = u[p];
        out[p * m + p] = (plus - 2.0 * f0 + minus) / (h * h);

        for q in p + 1..m {
            let mut corner = |sp: f64, sq: f64| {
                probe[p] = u[p] + sp * h;
                probe[q] = u[q] + sq * h;
                let v = f(&probe);
                probe[p] = u[p];
                probe[q] = u[q];
                v
            };
            let pp = corner(1.0, 1.0);
            let pm = corner(1.0, -1.0);
            let mp = corner(-1.0, 1.0);
            let mm = corner(-1.0, -1.0);
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            out[p * m + q] = v;
            out[q * m + p] = v;
        }
    }
    out
}

/// Finite-difference check of `Ric = (n + 1) H` at one point.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EinsteinReport {
    pub point: ChartPoint<f64>,
    pub fd_step: f64,
    /// `max_ij |R_ij - (n + 1) H_ij|`.
    pub max_abs_deviation: f64,
    /// `c = sum Re(conj(H_ij) R_ij) / sum |H_ij|^2`.
    pub estimated_constant: f64,
    pub expected_constant: f64,
}

pub fn fs_einstein_check(p: &ChartPoint<f64>, h: f64) -> Result<EinsteinReport> {
    let ricci = fs_ricci_fd(p, h)?;
    let metric = fs_metric_matrix(p);
    let expected = (p.dim() + 1) as f64;

    let mut max_abs_deviation: f64 = 0.0;
    let mut num = 0.0;
    let mut den = 0.0;
    for (r, g) in ricci.entries().iter().zip(metric.entries()) {
        max_abs_deviation = max_abs_deviation.max((r - g * expected).norm());
        num += (g.conj() * r).re;
        den += g.norm_sqr();
    }
    Ok(EinsteinReport {
        point: p.clone(),
        fd_step: h,
        max_abs_deviation,
        estimated_constant: num / den,
        expected_constant: expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank1::det_corrected;
    use num_rational::BigRational;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn metric_examples() {
        let h = fs_metric_matrix(&ChartPoint::<f64>::origin(1));
        assert_eq!(h.entries(), &[c(1.0, 0.0)]);
        let h = fs_metric_matrix(&ChartPoint::new(vec![c(1.0, 0.0)]));
        assert_eq!(h.entries(), &[c(0.25, 0.0)]);
        let h = fs_metric_matrix(&ChartPoint::<f64>::origin(2));
        assert_eq!(h, DenseMatrix::identity(2));
    }

    #[test]
    fn metric_is_exactly_hermitian() {
        let p = ChartPoint::new(vec![c(0.3, -1.1), c(0.7, -0.2), c(-2.0, 0.9)]);
        let h = fs_metric_matrix(&p);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(*h.get(i, j), h.get(j, i).conj());
            }
        }
    }

    #[test]
    fn rank1_params_examples() {
        let s = fs_rank1_params(&ChartPoint::<f64>::origin(3));
        assert_eq!(s.x(), &[c(1.0, 0.0); 3]);
        assert!(s.a().iter().chain(s.b()).all(|v| *v == c(0.0, 0.0)));

        let s = fs_rank1_params(&ChartPoint::new(vec![c(1.0, 0.0)]));
        assert_eq!(s.x(), &[c(0.25, 0.0)]);
        assert_eq!(s.a(), &[c(-0.5, 0.0)]);
        assert_eq!(s.b(), &[c(0.5, 0.0)]);
        assert_eq!(s.to_dense().entries(), &[c(0.25, 0.0)]);

        let p = ChartPoint::new(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let dense = fs_rank1_params(&p).to_dense();
        let metric = fs_metric_matrix(&p);
        for (u, v) in dense.entries().iter().zip(metric.entries()) {
            assert!((u - v).norm() <= 1e-15);
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(fs_det_closed_form(&ChartPoint::<f64>::origin(2)), 1.0);
        assert_eq!(
            fs_det_closed_form(&ChartPoint::new(vec![c(1.0, 0.0)])),
            0.25
        );
        let p = ChartPoint::new(vec![c(0.4, -0.3), c(1.2, 0.5), c(-0.7, 0.1)]);
        let det = det_corrected(&fs_rank1_params(&p));
        let closed = fs_det_closed_form(&p);
        assert!((det - c(closed, 0.0)).norm() <= 1e-12 * closed);
    }

    #[test]
    fn exact_identity_at_rational_point() {
        let q = |p: i64, d: i64| BigRational::new(p.into(), d.into());
        let p = ChartPoint::new(vec![
            Complex::new(q(1, 2), q(-2, 3)),
            Complex::new(q(3, 1), q(1, 7)),
        ]);
        let structured = fs_rank1_params(&p);
        assert_eq!(structured.to_dense(), fs_metric_matrix(&p));
        let det = det_corrected(&structured);
        assert_eq!(det, Complex::new(fs_det_closed_form(&p), q(0, 1)));
    }

    #[test]
    fn log_det_examples() {
        assert_eq!(fs_log_det(&ChartPoint::origin(4)), 0.0);
        let v = fs_log_det(&ChartPoint::new(vec![c(1.0, 0.0)]));
        assert!((v + 2.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ricci_at_origin() {
        let r = fs_ricci_fd(&ChartPoint::origin(1), DEFAULT_FD_STEP).unwrap();
        assert!((r.get(0, 0) - c(2.0, 0.0)).norm() <= 1e-6);
        let r = fs_ricci_fd(&ChartPoint::origin(2), DEFAULT_FD_STEP).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 3.0 } else { 0.0 };
                assert!((r.get(i, j) - c(want, 0.0)).norm() <= 1e-6);
            }
        }
    }

    #[test]
    fn ricci_off_origin() {
        let p = ChartPoint::new(vec![c(0.3, 0.0), c(0.7, -0.2)]);
        let r = fs_ricci_fd(&p, DEFAULT_FD_STEP).unwrap();
        let h = fs_metric_matrix(&p);
        for (u, v) in r.entries().iter().zip(h.entries()) {
            assert!((u - v * 3.0).norm() <= 1e-5, "{u} vs {}", v * 3.0);
        }
    }

    #[test]
    fn rejects_bad_step() {
        let p = ChartPoint::<f64>::origin(1);
        assert_eq!(fs_ricci_fd(&p, 0.0).unwrap_err(), Error::InvalidStep(0.0));
        assert!(fs_ricci_fd(&p, -1e-3).is_err());
        assert!(fs_einstein_check(&p, f64::NAN).is_err());
    }

    #[test]
    fn einstein_examples() {
        let r = fs_einstein_check(&ChartPoint::origin(1), 1e-4).unwrap();
        assert!((r.estimated_constant - 2.0).abs() <= 1e-6);
        assert!(r.max_abs_deviation <= 1e-6);
        let r = fs_einstein_check(&ChartPoint::origin(3), 1e-4).unwrap();
        assert!((r.estimated_constant - 4.0).abs() <= 1e-6);
    }
}
