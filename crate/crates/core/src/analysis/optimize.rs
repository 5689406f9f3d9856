use super::omega::OmegaBound;
use super::{h2, OptimizationReport};
use crate::error::{check_open, Result};

const LOG2_3: f64 = 1.584_962_500_721_156_3;
const EDGE: f64 = 1e-12;

fn check_sigma(sigma: f64) -> Result<()> {
    check_open("sigma", sigma, 1.0 / 3.0, 0.5, "(1/3, 1/2)")
}

fn check_tau(tau: f64) -> Result<()> {
    check_open("tau", tau, 0.5, 2.0 / 3.0, "(1/2, 2/3)")
}

/// The two per-`n` exponents of Columns: the matrix product over columns with
/// `|S| <= sigma n`, and the direct pass over the remaining columns.
pub fn columns_terms(sigma: f64, bound: &OmegaBound) -> Result<[f64; 2]> {
    check_sigma(sigma)?;
    let h = h2(sigma);
    Ok([bound.omega(2.0 * h) / 2.0, 1.0 - sigma + h])
}

pub fn columns_exponent(sigma: f64, bound: &OmegaBound) -> Result<f64> {
    columns_terms(sigma, bound).map(|t| t[0].max(t[1]))
}

/// The three per-`n` exponents of Rows & Columns: the trimmed rows handled
/// directly, the product over the kept rows and the direct pass over the big columns.
pub fn rows_columns_terms(sigma: f64, tau: f64, bound: &OmegaBound) -> Result<[f64; 3]> {
    check_sigma(sigma)?;
    check_tau(tau)?;
    let (hs, ht) = (h2(sigma), h2(tau));
    Ok([
        (LOG2_3 + tau + ht) / 2.0,
        ht * bound.omega(2.0 * hs / ht) / 2.0,
        1.0 - sigma + hs,
    ])
}

pub fn rows_columns_exponent(sigma: f64, tau: f64, bound: &OmegaBound) -> Result<f64> {
    rows_columns_terms(sigma, tau, bound).map(|t| t.iter().copied().fold(f64::MIN, f64::max))
}

/// Root of an increasing `diff` on `[lo, hi]` by bisection, or `None` when it has no sign change.
fn bisect(lo: f64, hi: f64, diff: impl Fn(f64) -> f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    if diff(a) > 0.0 || diff(b) < 0.0 {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if diff(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    Some(0.5 * (a + b))
}

/// Minimizer of a unimodal `f` on `[lo, hi]`.
fn golden_min(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-13 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Balance point of an increasing and a decreasing term, falling back to
/// minimizing their maximum when they do not cross inside the interval.
fn balance(lo: f64, hi: f64, up: impl Fn(f64) -> f64, down: impl Fn(f64) -> f64) -> f64 {
    bisect(lo, hi, |x| up(x) - down(x)).unwrap_or_else(|| golden_min(lo, hi, |x| up(x).max(down(x))))
}

/// Threshold `sigma` minimizing [`columns_exponent`].
pub fn optimize_columns(bound: &OmegaBound) -> Result<OptimizationReport> {
    let (lo, hi) = (1.0 / 3.0 + EDGE, 0.5 - EDGE);
    let terms = |s: f64| columns_terms(s, bound).expect("inside the open interval");
    let sigma = balance(lo, hi, |s| terms(s)[0], |s| terms(s)[1]);
    let exponent = columns_exponent(sigma, bound)?;
    Ok(OptimizationReport {
        algorithm: "columns".into(),
        mode: bound.mode().into(),
        sigma: Some(sigma),
        tau: None,
        profile: None,
        exponent,
        base: exponent.exp2(),
        resolution: None,
    })
}

/// For fixed `tau`, the `sigma` balancing the product term against the big-column term.
fn rows_columns_sigma(tau: f64, bound: &OmegaBound) -> f64 {
    let (lo, hi) = (1.0 / 3.0 + EDGE, 0.5 - EDGE);
    let terms = |s: f64| rows_columns_terms(s, tau, bound).expect("inside the open intervals");
    balance(lo, hi, |s| terms(s)[1], |s| terms(s)[2])
}

/// Parameters `(sigma, tau)` minimizing [`rows_columns_exponent`].
pub fn optimize_rows_columns(bound: &OmegaBound) -> Result<OptimizationReport> {
    let (lo, hi) = (0.5 + EDGE, 2.0 / 3.0 - EDGE);
    let first = |t: f64| rows_columns_terms(rows_columns_sigma(t, bound), t, bound).expect("in range")[0];
    let rest = |t: f64| {
        let terms = rows_columns_terms(rows_columns_sigma(t, bound), t, bound).expect("in range");
        terms[1].max(terms[2])
    };
    let tau = balance(lo, hi, first, rest);
    let sigma = rows_columns_sigma(tau, bound);
    let exponent = rows_columns_exponent(sigma, tau, bound)?;
    Ok(OptimizationReport {
        algorithm: "rows-columns".into(),
        mode: bound.mode().into(),
        sigma: Some(sigma),
        tau: Some(tau),
        profile: None,
        exponent,
        base: exponent.exp2(),
        resolution: None,
    })
}
