//! Scalar abstraction shared by every determinant routine.
//!
//! Four kinds are supported: `f64`, `Complex<f64>`, `BigRational` and
//! `Complex<BigRational>` (Gaussian rationals). The exact kinds compare
//! exactly; the float kinds use IEEE-754 semantics.

use std::fmt::{self, Debug};
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

/// Tag naming the scalar kind used in the text formats (`f64`, `c64`, `q`, `qi`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarKind {
    F64,
    C64,
    Q,
    Qi,
}

impl ScalarKind {
    pub fn is_exact(self) -> bool {
        matches!(self, ScalarKind::Q | ScalarKind::Qi)
    }

    pub fn is_complex(self) -> bool {
        matches!(self, ScalarKind::C64 | ScalarKind::Qi)
    }

    pub fn tag(self) -> &'static str {
        match self {
            ScalarKind::F64 => "f64",
            ScalarKind::C64 => "c64",
            ScalarKind::Q => "q",
            ScalarKind::Qi => "qi",
        }
    }
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ScalarKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f64" => Ok(ScalarKind::F64),
            "c64" => Ok(ScalarKind::C64),
            "q" => Ok(ScalarKind::Q),
            "qi" => Ok(ScalarKind::Qi),
            other => Err(format!(
                "unknown scalar kind `{other}` (expected f64, c64, q or qi)"
            )),
        }
    }
}

/// A field element usable by the dense oracles and the rank-one formulas.
pub trait Scalar:
    Clone + PartialEq + Debug + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const KIND: ScalarKind;

    /// Absolute value (complex modulus) as an `f64`. Approximate for exact kinds.
    fn magnitude(&self) -> f64;

    fn conj(&self) -> Self;

    fn to_c64(&self) -> Complex64;

    fn from_i64(v: i64) -> Self;

    /// Parses one entry of the text grammar for this kind.
    fn parse_text(s: &str) -> Result<Self, String>;

    /// Renders one entry; for exact kinds `parse_text(to_text(v)) == v`.
    fn to_text(&self) -> String;
}

/// Marker for kinds with exact arithmetic.
pub trait ExactScalar: Scalar {}

/// Marker for IEEE-754 backed kinds.
pub trait FloatScalar: Scalar {}

/// Ordered real fields that can carry a complex companion kind.
pub trait RealScalar: Scalar + PartialOrd {
    const COMPLEX_KIND: ScalarKind;

    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::F64;

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn conj(&self) -> Self {
        *self
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn parse_text(s: &str) -> Result<Self, String> {
        s.parse::<f64>()
            .map_err(|_| format!("invalid f64 literal `{s}`"))
    }

    fn to_text(&self) -> String {
        // `{:?}` is the shortest representation that round-trips.
        format!("{self:?}")
    }
}

impl FloatScalar for f64 {}

impl RealScalar for f64 {
    const COMPLEX_KIND: ScalarKind = ScalarKind::C64;

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    const KIND: ScalarKind = ScalarKind::Q;

    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(self).map_or(f64::INFINITY, f64::abs)
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(ToPrimitive::to_f64(self).unwrap_or(f64::NAN), 0.0)
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn parse_text(s: &str) -> Result<Self, String> {
        let bad = || format!("invalid rational literal `{s}`");
        let (num, den) = match s.split_once('/') {
            Some((p, q)) => (p, Some(q)),
            None => (s, None),
        };
        let num = parse_bigint(num).ok_or_else(bad)?;
        match den {
            None => Ok(BigRational::from_integer(num)),
            Some(q) => {
                let den = parse_bigint(q).ok_or_else(bad)?;
                if den.is_zero() {
                    return Err(format!("zero denominator in `{s}`"));
                }
                Ok(BigRational::new(num, den))
            }
        }
    }

    fn to_text(&self) -> String {
        self.to_string()
    }
}

impl ExactScalar for BigRational {}

impl RealScalar for BigRational {
    const COMPLEX_KIND: ScalarKind = ScalarKind::Qi;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

fn parse_bigint(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl<R: RealScalar> Scalar for Complex<R> {
    const KIND: ScalarKind = R::COMPLEX_KIND;

    fn magnitude(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn from_i64(v: i64) -> Self {
        Complex::new(R::from_i64(v), R::zero())
    }

    fn parse_text(s: &str) -> Result<Self, String> {
        let Some(body) = s.strip_suffix('i') else {
            return Ok(Complex::new(R::parse_text(s)?, R::zero()));
        };
        match split_complex(body) {
            Some(at) => {
                let re = R::parse_text(&body[..at])?;
                let im = match &body[at..] {
                    "+" => R::one(),
                    "-" => -R::one(),
                    imag => R::parse_text(imag.strip_prefix('+').unwrap_or(imag))?,
                };
                Ok(Complex::new(re, im))
            }
            None => {
                let im = match body {
                    "" | "+" => R::one(),
                    "-" => -R::one(),
                    imag => R::parse_text(imag.strip_prefix('+').unwrap_or(imag))?,
                };
                Ok(Complex::new(R::zero(), im))
            }
        }
    }

    fn to_text(&self) -> String {
        let re = self.re.to_text();
        let im = self.im.to_text();
        if im.starts_with('-') {
            format!("{re}{im}i")
        } else {
            format!("{re}+{im}i")
        }
    }
}

impl<R: RealScalar + ExactScalar> ExactScalar for Complex<R> {}

impl<R: RealScalar + FloatScalar> FloatScalar for Complex<R> {}

/// Byte offset of the sign that separates the real and imaginary parts,
/// skipping a leading sign and exponent signs (`1e-3`).
fn split_complex(body: &str) -> Option<usize> {
    let bytes = body.as_bytes();
    (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
}

/// Kahan-compensated sum, seeded with `init`.
pub(crate) fn compensated_sum<T: Scalar>(init: T, terms: impl IntoIterator<Item = T>) -> T {
    let mut sum = init;
    let mut carry = T::zero();
    for term in terms {
        let y = term - carry.clone();
        let t = sum.clone() + y.clone();
        carry = (t.clone() - sum) - y;
        sum = t;
    }
    sum
}

/// `1 / base^exp` by repeated multiplication.
pub(crate) fn inv_pow<T: Scalar>(base: &T, exp: usize) -> T {
    let mut acc = T::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    T::one() / acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        BigRational::parse_text(s).unwrap()
    }

    #[test]
    fn rationals_are_reduced_with_positive_denominator() {
        let v = q("6/-4");
        assert_eq!(v.to_text(), "-3/2");
        assert_eq!(q("10/5").to_text(), "2");
        assert!(BigRational::parse_text("1/0").is_err());
        assert!(BigRational::parse_text("1.5").is_err());
        assert!(BigRational::parse_text("").is_err());
    }

    #[test]
    fn complex_grammar() {
        let z = Complex64::parse_text("1.5-2e-3i").unwrap();
        assert_eq!(z, Complex64::new(1.5, -2e-3));
        let z = Complex64::parse_text("-1e-5+3i").unwrap();
        assert_eq!(z, Complex64::new(-1e-5, 3.0));
        assert_eq!(
            Complex64::parse_text("2i").unwrap(),
            Complex64::new(0.0, 2.0)
        );
        assert_eq!(
            Complex64::parse_text("-i").unwrap(),
            Complex64::new(0.0, -1.0)
        );
        assert_eq!(
            Complex64::parse_text("7").unwrap(),
            Complex64::new(7.0, 0.0)
        );

        let g = Complex::<BigRational>::parse_text("1/2-3/4i").unwrap();
        assert_eq!(g, Complex::new(q("1/2"), q("-3/4")));
        assert_eq!(g.to_text(), "1/2-3/4i");
        assert_eq!(Complex::new(q("0"), q("1")).to_text(), "0+1i");
    }

    #[test]
    fn float_text_round_trips_bits() {
        for v in [
            0.1,
            -0.0,
            1e-300,
            123456789.125,
            f64::MAX,
            f64::MIN_POSITIVE,
        ] {
            let back = f64::parse_text(&v.to_text()).unwrap();
            assert_eq!(back.to_bits(), v.to_bits());
        }
        let z = Complex64::new(-0.1, -0.0);
        let back = Complex64::parse_text(&z.to_text()).unwrap();
        assert_eq!(back.re.to_bits(), z.re.to_bits());
        assert_eq!(back.im.to_bits(), z.im.to_bits());
    }

    #[test]
    fn kahan_recovers_small_terms() {
        let terms = std::iter::repeat_n(1e-16, 10_000);
        let s = compensated_sum(1.0, terms);
        assert!((s - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn kinds_parse() {
        for kind in [
            ScalarKind::F64,
            ScalarKind::C64,
            ScalarKind::Q,
            ScalarKind::Qi,
        ] {
            assert_eq!(kind.tag().parse::<ScalarKind>().unwrap(), kind);
        }
        assert!("z".parse::<ScalarKind>().is_err());
    }
}
