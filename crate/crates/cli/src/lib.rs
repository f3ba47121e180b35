//! Report-producing commands behind the `rank1det` binary.
//!
//! Every command returns a serializable report and an [`Outcome`]; the binary
//! prints the report as one JSON document and maps the outcome to an exit
//! code.

// Negated comparisons are deliberate: they treat NaN as failing the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::Rng;
use rank1det_core::dense::{det_dense, logdet_dense_float, LogDet};
use rank1det_core::fubini_study::{fs_einstein_check, ChartPoint, EinsteinReport};
use rank1det_core::random::{
    random_int_rank1, random_point_in_polydisk, random_well_conditioned, seeded_rng,
};
use rank1det_core::rank1::{
    det_by_expansion, det_corrected_eval, det_division_free, det_erroneous, logdet_corrected,
    DEFAULT_EXPANSION_LIMIT,
};
use rank1det_core::scalar::{RealScalar, Scalar, ScalarKind};
use rank1det_core::text::{format_rank1, AnyDense, AnyInput, AnyRank1};
use rank1det_core::{Error, Rank1F64, Rank1Q, Rank1System, Rational};
use serde::Serialize;

pub const SCHEMA: u32 = 1;

/// Relative tolerance for float comparisons in `verify` and `erratum`.
pub const FLOAT_REL_TOL: f64 = 1e-9;

/// Structured and dense log-determinants must agree this closely before timing.
pub const BENCH_AGREE_TOL: f64 = 1e-6;

/// `fscheck` passes when every deviation is at most this factor times `h^2`.
pub const FSCHECK_DEVIATION_FACTOR: f64 = 100.0;

/// Radius of the polydisk sampled by `fscheck`.
pub const FSCHECK_RADIUS: f64 = 1.5;

/// Largest `--max-n` accepted by `verify` (the expansion oracle enumerates `2^n` subsets).
pub const VERIFY_MAX_N: usize = DEFAULT_EXPANSION_LIMIT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    CheckFailed,
}

impl Outcome {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::CheckFailed
        }
    }
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub command: &'static str,
    pub seed: u64,
    pub kind: String,
    pub trials: usize,
    pub max_n: usize,
    /// Dimension of every trial, in order.
    pub dims: Vec<usize>,
    pub mismatches: usize,
    /// Evaluation path of the corrected formula, counted per trial.
    pub paths_used: BTreeMap<String, usize>,
    pub first_mismatch: Option<Mismatch>,
    pub elapsed_s: f64,
}

#[derive(Debug, Serialize)]
pub struct Mismatch {
    pub trial: usize,
    /// The instance in the `rank1` text format.
    pub instance: String,
    pub reference: String,
    pub corrected: String,
    pub division_free: String,
    pub expansion: String,
    pub dense: String,
}

/// Runs the oracle-equivalence suite on seeded integer instances.
///
/// For `q` every formula must equal the exact dense determinant. For `f64`
/// the float formulas and the pivoted dense determinant are compared with
/// the exact value of the same integer instance, within
/// `FLOAT_REL_TOL * max(1, |det|, sum of |expansion terms|)`.
pub fn cmd_verify(
    seed: u64,
    trials: usize,
    max_n: usize,
    kind: ScalarKind,
) -> (VerifyReport, Outcome) {
    assert!(
        matches!(kind, ScalarKind::Q | ScalarKind::F64),
        "verify supports q and f64"
    );
    let start = Instant::now();
    let mut rng = seeded_rng(seed);
    let mut dims = Vec::with_capacity(trials);
    let mut paths_used = BTreeMap::new();
    let mut mismatches = 0;
    let mut first_mismatch = None;

    for trial in 0..trials {
        let n = rng.random_range(0..=max_n);
        dims.push(n);
        let s: Rank1Q = random_int_rank1(&mut rng, n);
        let reference = det_dense(&s.to_dense());
        let found = match kind {
            ScalarKind::Q => check_exact(&s, &reference),
            _ => check_float(&s, &reference),
        };
        *paths_used.entry(found.path.to_string()).or_insert(0) += 1;
        if !found.ok {
            mismatches += 1;
            if first_mismatch.is_none() {
                first_mismatch = Some(Mismatch {
                    trial,
                    instance: format_rank1(&s),
                    reference: reference.to_text(),
                    corrected: found.corrected,
                    division_free: found.division_free,
                    expansion: found.expansion,
                    dense: found.dense,
                });
            }
        }
    }

    let report = VerifyReport {
        schema: SCHEMA,
        command: "verify",
        seed,
        kind: kind.tag().to_string(),
        trials,
        max_n,
        dims,
        mismatches,
        paths_used,
        first_mismatch,
        elapsed_s: start.elapsed().as_secs_f64(),
    };
    (report, Outcome::from_pass(mismatches == 0))
}

struct TrialResult {
    ok: bool,
    path: &'static str,
    corrected: String,
    division_free: String,
    expansion: String,
    dense: String,
}

fn check_exact(s: &Rank1Q, reference: &Rational) -> TrialResult {
    let corrected = det_corrected_eval(s);
    let division_free = det_division_free(s);
    let expansion = det_by_expansion(s).expect("max_n within the expansion limit");
    let dense = reference.clone();
    TrialResult {
        ok: corrected.value == *reference && division_free == *reference && expansion == *reference,
        path: corrected.path.name(),
        corrected: corrected.value.to_text(),
        division_free: division_free.to_text(),
        expansion: expansion.to_text(),
        dense: dense.to_text(),
    }
}

fn check_float(s: &Rank1Q, reference: &Rational) -> TrialResult {
    let sf: Rank1F64 = s.map(RealScalar::to_f64);
    let want = reference.to_f64();
    let tol = FLOAT_REL_TOL * want.abs().max(term_scale(&sf)).max(1.0);
    let corrected = det_corrected_eval(&sf);
    let division_free = det_division_free(&sf);
    let expansion = det_by_expansion(&sf).expect("max_n within the expansion limit");
    let dense = det_dense(&sf.to_dense());
    let ok = [corrected.value, division_free, expansion, dense]
        .iter()
        .all(|v| (v - want).abs() <= tol);
    TrialResult {
        ok,
        path: corrected.path.name(),
        corrected: corrected.value.to_text(),
        division_free: division_free.to_text(),
        expansion: expansion.to_text(),
        dense: dense.to_text(),
    }
}

/// `|prod d| + sum_k |a_k b_k prod_{l != k} d_l|`: magnitude of the terms
/// whose cancellation produces the determinant.
fn term_scale(s: &Rank1F64) -> f64 {
    let d: Vec<f64> = s.factors().iter().map(|v| v.abs()).collect();
    let c = s.couplings();
    let prod: f64 = d.iter().product();
    let others: f64 = (0..d.len())
        .map(|k| {
            c[k].abs()
                * d.iter()
                    .enumerate()
                    .filter(|(l, _)| *l != k)
                    .map(|(_, v)| v)
                    .product::<f64>()
        })
        .sum();
    prod + others
}

// ---------------------------------------------------------------- erratum

#[derive(Debug, Serialize)]
pub struct ErratumReport {
    pub schema: u32,
    pub command: &'static str,
    pub instance: InstanceEcho,
    pub corrected: String,
    pub corrected_path: String,
    /// The misprinted value, or `"undefined (division by zero)"`.
    pub erroneous: String,
    pub dense: String,
    pub agree_corrected_dense: bool,
    pub agree_erroneous_dense: bool,
}

/// The instance as entered, entries in the text grammar.
#[derive(Debug, Serialize)]
pub struct InstanceEcho {
    pub kind: String,
    pub n: usize,
    pub x: Vec<String>,
    pub a: Vec<String>,
    pub b: Vec<String>,
}

impl InstanceEcho {
    fn new<T: Scalar>(s: &Rank1System<T>) -> Self {
        let text = |v: &[T]| v.iter().map(Scalar::to_text).collect();
        InstanceEcho {
            kind: T::KIND.tag().to_string(),
            n: s.dim(),
            x: text(s.x()),
            a: text(s.a()),
            b: text(s.b()),
        }
    }
}

pub const UNDEFINED: &str = "undefined (division by zero)";

/// The documented counterexample: `x = (5, 7)`, `a = (1, 2)`, `b = (3, 4)`.
pub fn demo_instance() -> Rank1Q {
    Rank1Q::from_i64(&[5, 7], &[1, 2], &[3, 4]).expect("fixed demo instance")
}

pub fn cmd_erratum(instance: &AnyRank1) -> (ErratumReport, Outcome) {
    let report = match instance {
        AnyRank1::F64(s) => erratum_report(s),
        AnyRank1::C64(s) => erratum_report(s),
        AnyRank1::Q(s) => erratum_report(s),
        AnyRank1::Qi(s) => erratum_report(s),
    };
    let outcome = Outcome::from_pass(report.agree_corrected_dense);
    (report, outcome)
}

fn agree<T: Scalar>(a: &T, b: &T) -> bool {
    if T::KIND.is_exact() {
        a == b
    } else {
        (a.clone() - b.clone()).magnitude() <= FLOAT_REL_TOL * b.magnitude().max(1.0)
    }
}

fn erratum_report<T: Scalar>(s: &Rank1System<T>) -> ErratumReport {
    let dense = det_dense(&s.to_dense());
    let corrected = det_corrected_eval(s);
    let erroneous = det_erroneous(s);
    let agree_erroneous_dense = match &erroneous {
        Ok(v) => agree(v, &dense),
        Err(_) => false,
    };
    let erroneous = match erroneous {
        Ok(v) => v.to_text(),
        Err(Error::DivisionByZero { .. }) => UNDEFINED.to_string(),
        Err(e) => e.to_string(),
    };
    ErratumReport {
        schema: SCHEMA,
        command: "erratum",
        instance: InstanceEcho::new(s),
        agree_corrected_dense: agree(&corrected.value, &dense),
        corrected: corrected.value.to_text(),
        corrected_path: corrected.path.name().to_string(),
        erroneous,
        dense: dense.to_text(),
        agree_erroneous_dense,
    }
}

// ---------------------------------------------------------------- fscheck

#[derive(Debug, Serialize)]
pub struct FsCheckReport {
    pub schema: u32,
    pub command: &'static str,
    pub n: usize,
    pub points: usize,
    pub step: f64,
    pub seed: u64,
    /// `100 h^2`.
    pub threshold: f64,
    pub reports: Vec<EinsteinReport>,
    pub summary: FsSummary,
}

#[derive(Debug, Serialize)]
pub struct FsSummary {
    pub max_abs_deviation: f64,
    pub min_constant: f64,
    pub max_constant: f64,
    pub expected_constant: f64,
    pub pass: bool,
}

/// Origin plus `points - 1` samples uniform in the polydisk `|z_i| <= 1.5`.
pub fn fscheck_points(n: usize, points: usize, seed: u64) -> Vec<ChartPoint<f64>> {
    let mut rng = seeded_rng(seed);
    let mut out = vec![ChartPoint::origin(n)];
    out.extend((1..points).map(|_| random_point_in_polydisk(&mut rng, n, FSCHECK_RADIUS)));
    out
}

pub fn cmd_fscheck(
    points: &[ChartPoint<f64>],
    step: f64,
    seed: u64,
) -> Result<(FsCheckReport, Outcome), Error> {
    let threshold = FSCHECK_DEVIATION_FACTOR * step * step;
    let reports = points
        .iter()
        .map(|p| fs_einstein_check(p, step))
        .collect::<Result<Vec<_>, _>>()?;
    let n = points.first().map_or(0, ChartPoint::dim);
    let max_abs_deviation = reports
        .iter()
        .map(|r| r.max_abs_deviation)
        .fold(0.0, f64::max);
    let min_constant = reports
        .iter()
        .map(|r| r.estimated_constant)
        .fold(f64::INFINITY, f64::min);
    let max_constant = reports
        .iter()
        .map(|r| r.estimated_constant)
        .fold(f64::NEG_INFINITY, f64::max);
    let pass = reports.iter().all(|r| r.max_abs_deviation <= threshold);
    let report = FsCheckReport {
        schema: SCHEMA,
        command: "fscheck",
        n,
        points: points.len(),
        step,
        seed,
        threshold,
        summary: FsSummary {
            max_abs_deviation,
            min_constant,
            max_constant,
            expected_constant: (n + 1) as f64,
            pass,
        },
        reports,
    };
    Ok((report, Outcome::from_pass(pass)))
}

// ---------------------------------------------------------------- bench

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub schema: u32,
    pub command: &'static str,
    pub seed: u64,
    pub repeats: usize,
    pub entries: Vec<BenchEntry>,
    /// Sum of every timed log-determinant; keeps the timed calls observable.
    pub checksum: f64,
}

#[derive(Debug, Serialize)]
pub struct BenchEntry {
    pub n: usize,
    pub structured_median_s: f64,
    pub dense_median_s: f64,
    pub speedup: f64,
    pub structured: LogDet,
    pub dense: LogDet,
    pub abs_diff: f64,
}

#[derive(Debug, Serialize)]
pub struct BenchFailure {
    pub schema: u32,
    pub command: &'static str,
    pub error: String,
    pub n: usize,
    pub structured: LogDet,
    pub dense: LogDet,
    pub instance: String,
}

/// Shortest batch that is timed as one sample.
const MIN_SAMPLE: Duration = Duration::from_millis(1);

/// Median seconds per call over `repeats` samples; each sample batches
/// enough calls to last at least [`MIN_SAMPLE`].
fn time_median(repeats: usize, checksum: &mut f64, mut f: impl FnMut() -> LogDet) -> f64 {
    let mut batch = 1usize;
    loop {
        let t = Instant::now();
        for _ in 0..batch {
            *checksum += black_box(f()).log_abs;
        }
        if t.elapsed() >= MIN_SAMPLE || batch >= 1 << 20 {
            break;
        }
        batch *= 2;
    }
    let mut samples: Vec<f64> = (0..repeats)
        .map(|_| {
            let t = Instant::now();
            for _ in 0..batch {
                *checksum += black_box(f()).log_abs;
            }
            t.elapsed().as_secs_f64() / batch as f64
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    samples[samples.len() / 2].max(f64::MIN_POSITIVE)
}

pub fn cmd_bench(
    sizes: &[usize],
    repeats: usize,
    seed: u64,
) -> Result<BenchReport, Box<BenchFailure>> {
    let mut rng = seeded_rng(seed);
    let mut checksum = 0.0;
    let mut entries = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let s = random_well_conditioned(&mut rng, n);
        let dense_matrix = s.to_dense();
        let structured = logdet_corrected(&s);
        let dense = logdet_dense_float(&dense_matrix);
        let abs_diff = (structured.log_abs - dense.log_abs).abs();
        if structured.sign != dense.sign || !(abs_diff <= BENCH_AGREE_TOL) {
            return Err(Box::new(BenchFailure {
                schema: SCHEMA,
                command: "bench",
                error: format!("structured and dense log-determinants disagree at n = {n}"),
                n,
                structured,
                dense,
                instance: format_rank1(&s),
            }));
        }
        let structured_median_s =
            time_median(repeats, &mut checksum, || logdet_corrected(black_box(&s)));
        let dense_median_s = time_median(repeats, &mut checksum, || {
            logdet_dense_float(black_box(&dense_matrix))
        });
        entries.push(BenchEntry {
            n,
            structured_median_s,
            dense_median_s,
            speedup: dense_median_s / structured_median_s,
            structured,
            dense,
            abs_diff,
        });
    }
    Ok(BenchReport {
        schema: SCHEMA,
        command: "bench",
        seed,
        repeats,
        entries,
        checksum,
    })
}

// ---------------------------------------------------------------- det

#[derive(Debug, Serialize)]
pub struct DetReport {
    pub schema: u32,
    pub command: &'static str,
    pub format: &'static str,
    pub kind: String,
    pub n: usize,
    pub dense: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank1: Option<Rank1Values>,
}

#[derive(Debug, Serialize)]
pub struct Rank1Values {
    pub corrected: String,
    pub corrected_path: String,
    pub division_free: String,
    /// Absent above the expansion limit.
    pub expansion: Option<String>,
    pub erroneous: String,
    pub agree_corrected_dense: bool,
}

/// Determinants of a parsed `dense` or `rank1` input.
pub fn cmd_det(input: &AnyInput) -> (DetReport, Outcome) {
    let report = match input {
        AnyInput::Dense(AnyDense::F64(m)) => dense_det_report(m),
        AnyInput::Dense(AnyDense::C64(m)) => dense_det_report(m),
        AnyInput::Dense(AnyDense::Q(m)) => dense_det_report(m),
        AnyInput::Dense(AnyDense::Qi(m)) => dense_det_report(m),
        AnyInput::Rank1(AnyRank1::F64(s)) => rank1_det_report(s),
        AnyInput::Rank1(AnyRank1::C64(s)) => rank1_det_report(s),
        AnyInput::Rank1(AnyRank1::Q(s)) => rank1_det_report(s),
        AnyInput::Rank1(AnyRank1::Qi(s)) => rank1_det_report(s),
    };
    let pass = report
        .rank1
        .as_ref()
        .is_none_or(|r| r.agree_corrected_dense);
    (report, Outcome::from_pass(pass))
}

fn dense_det_report<T: Scalar>(m: &rank1det_core::DenseMatrix<T>) -> DetReport {
    DetReport {
        schema: SCHEMA,
        command: "det",
        format: "dense",
        kind: T::KIND.tag().to_string(),
        n: m.dim(),
        dense: det_dense(m).to_text(),
        rank1: None,
    }
}

fn rank1_det_report<T: Scalar>(s: &Rank1System<T>) -> DetReport {
    let dense = det_dense(&s.to_dense());
    let corrected = det_corrected_eval(s);
    let erroneous = match det_erroneous(s) {
        Ok(v) => v.to_text(),
        Err(_) => UNDEFINED.to_string(),
    };
    DetReport {
        schema: SCHEMA,
        command: "det",
        format: "rank1",
        kind: T::KIND.tag().to_string(),
        n: s.dim(),
        rank1: Some(Rank1Values {
            agree_corrected_dense: agree(&corrected.value, &dense),
            corrected: corrected.value.to_text(),
            corrected_path: corrected.path.name().to_string(),
            division_free: det_division_free(s).to_text(),
            expansion: det_by_expansion(s).ok().map(|v| v.to_text()),
            erroneous,
        }),
        dense: dense.to_text(),
    }
}

// ---------------------------------------------------------------- pretty

pub fn pretty_verify(r: &VerifyReport) -> String {
    let mut out = format!(
        "verify kind={} seed={} trials={} max_n={}: {} mismatches in {:.2}s\n",
        r.kind, r.seed, r.trials, r.max_n, r.mismatches, r.elapsed_s
    );
    for (path, count) in &r.paths_used {
        let _ = writeln!(out, "  {path:>14}: {count}");
    }
    if let Some(m) = &r.first_mismatch {
        let _ = write!(out, "first mismatch at trial {}:\n{}", m.trial, m.instance);
    }
    out
}

pub fn pretty_erratum(r: &ErratumReport) -> String {
    format!(
        "corrected  {:>24}  ({})\nerroneous  {:>24}\ndense      {:>24}\ncorrected == dense: {}\nerroneous == dense: {}\n",
        r.corrected, r.corrected_path, r.erroneous, r.dense, r.agree_corrected_dense, r.agree_erroneous_dense
    )
}

pub fn pretty_fscheck(r: &FsCheckReport) -> String {
    let mut out = format!(
        "fscheck n={} h={:e} threshold={:e}\n",
        r.n, r.step, r.threshold
    );
    for rep in &r.reports {
        let _ = writeln!(
            out,
            "  constant {:.9}  deviation {:.3e}",
            rep.estimated_constant, rep.max_abs_deviation
        );
    }
    let _ = writeln!(out, "{}", if r.summary.pass { "PASS" } else { "FAIL" });
    out
}

pub fn pretty_bench(r: &BenchReport) -> String {
    let mut out = format!(
        "{:>8} {:>14} {:>14} {:>12}\n",
        "n", "structured s", "dense s", "speedup"
    );
    for e in &r.entries {
        let _ = writeln!(
            out,
            "{:>8} {:>14.3e} {:>14.3e} {:>12.1}",
            e.n, e.structured_median_s, e.dense_median_s, e.speedup
        );
    }
    out
}

pub fn pretty_det(r: &DetReport) -> String {
    let mut out = format!(
        "{} {} n={}\ndense          {}\n",
        r.format, r.kind, r.n, r.dense
    );
    if let Some(v) = &r.rank1 {
        let _ = write!(
            out,
            "corrected      {} ({})\ndivision-free  {}\nexpansion      {}\nerroneous      {}\n",
            v.corrected,
            v.corrected_path,
            v.division_free,
            v.expansion.as_deref().unwrap_or("-"),
            v.erroneous
        );
    }
    out
}
