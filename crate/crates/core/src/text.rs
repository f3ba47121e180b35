//! Line-oriented text formats.
//!
//! ```text
//! dense 2 q          rank1 2 q          chart 2
//! 5 4                x: 5 7             0.3+0i 0.7-0.2i
//! 6 7                a: 1 2
//!                    b: 3 4
//! ```
//!
//! Entries are whitespace separated. Rationals are written `p/q` (or `p`),
//! complex entries `re+imi` with no spaces. Blank lines and lines starting
//! with `#` are ignored.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;

use crate::dense::DenseMatrix;
use crate::error::ParseError;
use crate::fubini_study::ChartPoint;
use crate::rank1::Rank1System;
use crate::scalar::{RealScalar, Scalar, ScalarKind};

/// A dense matrix of whichever kind the header named.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyDense {
    F64(DenseMatrix<f64>),
    C64(DenseMatrix<Complex64>),
    Q(DenseMatrix<BigRational>),
    Qi(DenseMatrix<Complex<BigRational>>),
}

/// A rank-one system of whichever kind the header named.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyRank1 {
    F64(Rank1System<f64>),
    C64(Rank1System<Complex64>),
    Q(Rank1System<BigRational>),
    Qi(Rank1System<Complex<BigRational>>),
}

/// Either file format, dispatched on the first word of the header.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyInput {
    Dense(AnyDense),
    Rank1(AnyRank1),
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last_line: 0,
        }
    }

    /// Next significant line as tokens, or `None` at end of input.
    fn next_tokens(&mut self) -> Option<Vec<Token<'a>>> {
        for (idx, line) in self.inner.by_ref() {
            self.last_line = idx + 1;
            let trimmed = line.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Some(tokenize(line, idx + 1));
        }
        None
    }

    fn expect_tokens(&mut self, what: &str) -> Result<Vec<Token<'a>>, ParseError> {
        self.next_tokens().ok_or_else(|| {
            ParseError::new(
                self.last_line + 1,
                1,
                format!("unexpected end of input, expected {what}"),
            )
        })
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.next_tokens() {
            None => Ok(()),
            Some(tokens) => {
                let t = &tokens[0];
                Err(ParseError::new(
                    t.line,
                    t.column,
                    "unexpected trailing content",
                ))
            }
        }
    }
}

fn tokenize(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line
        .char_indices()
        .chain(std::iter::once((line.len(), ' ')))
    {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    line: line_no,
                    column: line[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

fn err_at(t: &Token<'_>, message: impl Into<String>) -> ParseError {
    ParseError::new(t.line, t.column, message)
}

/// Parses `<word> n [KIND]`; returns the dimension and kind token when present.
fn parse_header<'a>(
    tokens: &[Token<'a>],
    word: &str,
    with_kind: bool,
) -> Result<(usize, Option<ScalarKind>), ParseError> {
    let first = &tokens[0];
    if first.text != word {
        return Err(err_at(
            first,
            format!("expected header `{word}`, found `{}`", first.text),
        ));
    }
    let expected = if with_kind { 3 } else { 2 };
    if tokens.len() != expected {
        let at = tokens.get(expected).unwrap_or(tokens.last().unwrap());
        let shape = if with_kind {
            format!("`{word} n KIND`")
        } else {
            format!("`{word} n`")
        };
        return Err(err_at(at, format!("header must be {shape}")));
    }
    let n = tokens[1].text.parse::<usize>().map_err(|_| {
        err_at(
            &tokens[1],
            format!("invalid dimension `{}`", tokens[1].text),
        )
    })?;
    let kind = if with_kind {
        Some(
            tokens[2]
                .text
                .parse::<ScalarKind>()
                .map_err(|e| err_at(&tokens[2], e))?,
        )
    } else {
        None
    };
    Ok((n, kind))
}

fn parse_entries<T: Scalar>(
    tokens: &[Token<'_>],
    n: usize,
    line_no: usize,
) -> Result<Vec<T>, ParseError> {
    if tokens.len() != n {
        let (line, column) = tokens.get(n).map_or((line_no, 1), |t| (t.line, t.column));
        return Err(ParseError::new(
            line,
            column,
            format!("expected {n} entries, found {}", tokens.len()),
        ));
    }
    tokens
        .iter()
        .map(|t| T::parse_text(t.text).map_err(|e| err_at(t, e)))
        .collect()
}

fn check_kind<T: Scalar>(kind: ScalarKind, header: &[Token<'_>]) -> Result<(), ParseError> {
    if kind != T::KIND {
        return Err(err_at(
            &header[2],
            format!("expected kind `{}`, found `{kind}`", T::KIND),
        ));
    }
    Ok(())
}

fn header_line<'a>(lines: &mut Lines<'a>) -> Result<Vec<Token<'a>>, ParseError> {
    lines
        .next_tokens()
        .ok_or_else(|| ParseError::new(1, 1, "empty input"))
}

/// Parses a dense matrix whose kind must match `T`.
pub fn parse_dense<T: Scalar>(text: &str) -> Result<DenseMatrix<T>, ParseError> {
    let mut lines = Lines::new(text);
    let header = header_line(&mut lines)?;
    let (n, kind) = parse_header(&header, "dense", true)?;
    check_kind::<T>(kind.unwrap(), &header)?;
    dense_body(&mut lines, n)
}

fn dense_body<T: Scalar>(lines: &mut Lines<'_>, n: usize) -> Result<DenseMatrix<T>, ParseError> {
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        let row = lines.expect_tokens(&format!("matrix row {}", i + 1))?;
        let line_no = row[0].line;
        entries.extend(parse_entries::<T>(&row, n, line_no)?);
    }
    lines.expect_end()?;
    Ok(DenseMatrix::from_row_major(n, entries).expect("n rows of n entries"))
}

/// Parses a rank-one system whose kind must match `T`.
pub fn parse_rank1<T: Scalar>(text: &str) -> Result<Rank1System<T>, ParseError> {
    let mut lines = Lines::new(text);
    let header = header_line(&mut lines)?;
    let (n, kind) = parse_header(&header, "rank1", true)?;
    check_kind::<T>(kind.unwrap(), &header)?;
    rank1_body(&mut lines, n)
}

fn rank1_body<T: Scalar>(lines: &mut Lines<'_>, n: usize) -> Result<Rank1System<T>, ParseError> {
    let mut vectors = Vec::with_capacity(3);
    for label in ["x:", "a:", "b:"] {
        let tokens = lines.expect_tokens(&format!("`{label}` line"))?;
        if tokens[0].text != label {
            return Err(err_at(
                &tokens[0],
                format!("expected `{label}`, found `{}`", tokens[0].text),
            ));
        }
        vectors.push(parse_entries::<T>(&tokens[1..], n, tokens[0].line)?);
    }
    lines.expect_end()?;
    let b = vectors.pop().unwrap();
    let a = vectors.pop().unwrap();
    let x = vectors.pop().unwrap();
    Ok(Rank1System::new(x, a, b).expect("equal lengths checked"))
}

/// Parses a chart point with complex entries over `R`.
pub fn parse_chart<R: RealScalar>(text: &str) -> Result<ChartPoint<R>, ParseError> {
    let mut lines = Lines::new(text);
    let header = header_line(&mut lines)?;
    let (n, _) = parse_header(&header, "chart", false)?;
    if n == 0 {
        return Err(err_at(&header[1], "chart dimension must be at least 1"));
    }
    let tokens = lines.expect_tokens("coordinate line")?;
    let line_no = tokens[0].line;
    let z = parse_entries::<Complex<R>>(&tokens, n, line_no)?;
    lines.expect_end()?;
    Ok(ChartPoint::new(z))
}

/// Parses either a `dense` or a `rank1` file of any kind.
pub fn parse_any(text: &str) -> Result<AnyInput, ParseError> {
    let mut lines = Lines::new(text);
    let header = header_line(&mut lines)?;
    let word = header[0].text;
    let (n, kind) = match word {
        "dense" | "rank1" => parse_header(&header, word, true)?,
        other => {
            return Err(err_at(
                &header[0],
                format!("unknown header `{other}` (expected dense or rank1)"),
            ))
        }
    };
    let kind = kind.unwrap();
    macro_rules! body {
        ($variant:ident, $ty:ty) => {
            if word == "dense" {
                AnyInput::Dense(AnyDense::$variant(dense_body::<$ty>(&mut lines, n)?))
            } else {
                AnyInput::Rank1(AnyRank1::$variant(rank1_body::<$ty>(&mut lines, n)?))
            }
        };
    }
    Ok(match kind {
        ScalarKind::F64 => body!(F64, f64),
        ScalarKind::C64 => body!(C64, Complex64),
        ScalarKind::Q => body!(Q, BigRational),
        ScalarKind::Qi => body!(Qi, Complex<BigRational>),
    })
}

fn join<T: Scalar>(v: &[T]) -> String {
    v.iter().map(Scalar::to_text).collect::<Vec<_>>().join(" ")
}

pub fn format_dense<T: Scalar>(m: &DenseMatrix<T>) -> String {
    let mut out = format!("dense {} {}\n", m.dim(), T::KIND);
    for i in 0..m.dim() {
        out.push_str(&join(m.row(i)));
        out.push('\n');
    }
    out
}

pub fn format_rank1<T: Scalar>(s: &Rank1System<T>) -> String {
    format!(
        "rank1 {} {}\nx: {}\na: {}\nb: {}\n",
        s.dim(),
        T::KIND,
        join(s.x()),
        join(s.a()),
        join(s.b())
    )
}

pub fn format_chart<R: RealScalar>(p: &ChartPoint<R>) -> String {
    format!("chart {}\n{}\n", p.dim(), join(p.coords()))
}

/// Integer-valued rational, handy for fixtures.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
