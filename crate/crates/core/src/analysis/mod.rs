//! Numeric side of the cost analysis: binary entropy, upper bounds on the
//! rectangular matrix multiplication exponent, and the optimizers that pick
//! the threshold parameters of the three matrix-based algorithms.

mod gamma;
mod omega;
mod optimize;

pub use gamma::{gamma_inner_min, gamma_search, gamma_terms, gamma_value, GammaTerms};
pub use omega::{OmegaBound, OmegaTable, LINEAR_OMEGA_OFFSET};
pub use optimize::{
    columns_exponent, columns_terms, optimize_columns, optimize_rows_columns, rows_columns_exponent,
    rows_columns_terms,
};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};

/// Binary entropy `H(x) = -x log2 x - (1-x) log2 (1-x)`, with `H(0) = H(1) = 0`.
pub fn entropy(x: f64) -> Result<f64> {
    check_unit("x", x)?;
    Ok(h2(x))
}

/// `b(x) = x^-x (1-x)^(x-1) = 2^H(x)`.
pub fn b(x: f64) -> Result<f64> {
    check_unit("x", x)?;
    Ok(bx(x))
}

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value: x, range: "[0, 1]" })
    }
}

#[inline]
pub(crate) fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

fn bx(x: f64) -> f64 {
    let pow = |base: f64, e: f64| if base == 0.0 { 1.0 } else { base.powf(e) };
    pow(x, -x) * pow(1.0 - x, x - 1.0)
}

/// Outcome of [`binom_facts_check`]; `violations` is empty when every inequality holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BinomReport {
    pub n: usize,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl BinomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const BINOM_FACTS_MAX_N: usize = 40;

/// Check with exact binomials, for every `k <= n/2`, that
/// `(2n)^(-1/2) b(k/n)^n <= C(n,k) <= sum_{j<=k} C(n,j) <= b(k/n)^n`,
/// and that `C(n,k) 2^k` increases exactly while `k <= (2n-1)/3`.
pub fn binom_facts_check(n: usize) -> Result<BinomReport> {
    if n > BINOM_FACTS_MAX_N {
        return Err(Error::TooLarge { n, max: BINOM_FACTS_MAX_N });
    }
    let mut row = vec![BigUint::one()];
    for k in 0..n {
        let next = &row[k] * BigUint::from(n - k) / BigUint::from(k + 1);
        row.push(next);
    }
    let as_f64 = |x: &BigUint| x.to_f64().expect("finite for n <= 40");
    // float side of each comparison gets a relative slack of a few ulps
    let slack = 1.0 + 1e-12;

    let mut report = BinomReport { n, checked: 0, violations: Vec::new() };
    let mut prefix = BigUint::from(0u32);
    for (k, entry) in row.iter().enumerate().take(n / 2 + 1) {
        prefix += entry;
        let bn = if n == 0 { 1.0 } else { bx(k as f64 / n as f64).powi(n as i32) };
        let lower = bn / ((2 * n.max(1)) as f64).sqrt();
        let c = as_f64(entry);
        let sum = as_f64(&prefix);
        if lower > c * slack {
            report.violations.push(format!("n={n} k={k}: lower bound {lower} exceeds C(n,k) = {c}"));
        }
        if sum > bn * slack {
            report.violations.push(format!("n={n} k={k}: prefix sum {sum} exceeds b(k/n)^n = {bn}"));
        }
        report.checked += 2;
    }
    for k in 0..n {
        let here = &row[k] << k;
        let next = &row[k + 1] << (k + 1);
        let grows = next >= here;
        let predicted = 3 * k < 2 * n;
        if grows != predicted {
            report.violations.push(format!("n={n} k={k}: C(n,k)2^k step grows={grows}, expected {predicted}"));
        }
        report.checked += 1;
    }
    Ok(report)
}

/// Optimizer output. `exponent` is per `n`, so the operation count is `base^n` with `base = 2^exponent`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizationReport {
    pub algorithm: String,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// `(sigma1, sigma2, kappa1, kappa2)` at the Cover-Columns max-min point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<[f64; 4]>,
    pub exponent: f64,
    pub base: f64,
    /// Grid spacing of the search; an error bar on the reported parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
}
