//! The max-min functional behind the Cover-Columns cost. With column sizes
//! `s_p = sigma_p h` and block sizes `k_p = kappa_p h`, one round costs
//! `N^Gamma(sigma, kappa)` for `N = 2^h`, and the algorithm is governed by
//! `gamma = max_sigma min_kappa Gamma`.

use rayon::prelude::*;

use super::omega::OmegaBound;
use super::{h2, OptimizationReport};
use crate::error::{Error, Result};

/// `alpha_p = kappa_p H(sigma_p / kappa_p)`,
/// `beta_p = 1 - kappa_p + kappa_p H(max(sigma_p / kappa_p, 1/2))` and `beta_* = min(beta_1, beta_2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaTerms {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub beta_star: f64,
}

fn check_profile(sigma: [f64; 2], kappa: [f64; 2]) -> Result<()> {
    for p in 0..2 {
        let (s, k) = (sigma[p], kappa[p]);
        if !(0.0 <= s && s <= k && k <= 1.0) {
            return Err(Error::Invalid(format!("need 0 <= sigma <= kappa <= 1, got sigma={s} kappa={k}")));
        }
    }
    Ok(())
}

fn terms(sigma: [f64; 2], kappa: [f64; 2]) -> GammaTerms {
    let mut alpha = [0.0; 2];
    let mut beta = [0.0; 2];
    for p in 0..2 {
        let k = kappa[p];
        let ratio = if k == 0.0 { 0.0 } else { sigma[p] / k };
        alpha[p] = k * h2(ratio);
        beta[p] = 1.0 - k + k * h2(ratio.max(0.5));
    }
    GammaTerms { alpha, beta, beta_star: beta[0].min(beta[1]) }
}

fn value(sigma: [f64; 2], kappa: [f64; 2], bound: &OmegaBound) -> f64 {
    let t = terms(sigma, kappa);
    let a = t.alpha[0] + t.alpha[1];
    // As beta_* -> 0 the product term tends to alpha_1 + alpha_2.
    let product = if t.beta_star > 0.0 { t.beta_star * (bound.omega(a / t.beta_star) - 2.0) } else { a };
    // paired sums keep the value bitwise symmetric under swapping the halves
    (h2(sigma[0]) + h2(sigma[1])) - a + (t.beta[0] + t.beta[1]) + product
}

pub fn gamma_terms(sigma1: f64, sigma2: f64, kappa1: f64, kappa2: f64) -> Result<GammaTerms> {
    check_profile([sigma1, sigma2], [kappa1, kappa2])?;
    Ok(terms([sigma1, sigma2], [kappa1, kappa2]))
}

/// `Gamma = H(s1) + H(s2) - a1 - a2 + b1 + b2 + b_* (omega((a1 + a2) / b_*) - 2)`.
pub fn gamma_value(sigma1: f64, sigma2: f64, kappa1: f64, kappa2: f64, bound: &OmegaBound) -> Result<f64> {
    check_profile([sigma1, sigma2], [kappa1, kappa2])?;
    Ok(value([sigma1, sigma2], [kappa1, kappa2], bound))
}

const KAPPA_GRID: usize = 200;
const KAPPA_TOL: f64 = 1e-6;

/// Grid points `sigma`, then every `j / 200` above it.
fn kappa_grid(sigma: f64) -> Vec<f64> {
    let mut g = vec![sigma];
    g.extend((0..=KAPPA_GRID).map(|j| j as f64 / KAPPA_GRID as f64).filter(|&k| k > sigma));
    g
}

/// `min over kappa` for fixed `sigma`, returning `(value, kappa1, kappa2)`.
/// Grid search followed by a pattern search; ties go to the smaller kappa.
pub fn gamma_inner_min(sigma1: f64, sigma2: f64, bound: &OmegaBound) -> Result<(f64, f64, f64)> {
    check_profile([sigma1, sigma2], [1.0, 1.0])?;
    Ok(inner_min([sigma1, sigma2], bound))
}

fn inner_min(sigma: [f64; 2], bound: &OmegaBound) -> (f64, f64, f64) {
    let (g1, g2) = (kappa_grid(sigma[0]), kappa_grid(sigma[1]));
    let mut best = (f64::INFINITY, 1.0, 1.0);
    for &k1 in &g1 {
        for &k2 in &g2 {
            let v = value(sigma, [k1, k2], bound);
            if v < best.0 {
                best = (v, k1, k2);
            }
        }
    }
    let mut step = 0.5 / KAPPA_GRID as f64;
    while step >= KAPPA_TOL {
        let (v0, k1, k2) = best;
        let mut moved = false;
        for (d1, d2) in [(-1.0, 0.0), (0.0, -1.0), (1.0, 0.0), (0.0, 1.0), (-1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (1.0, -1.0)] {
            let c1 = (k1 + d1 * step).clamp(sigma[0], 1.0);
            let c2 = (k2 + d2 * step).clamp(sigma[1], 1.0);
            let v = value(sigma, [c1, c2], bound);
            if v < v0 - 1e-15 && v < best.0 {
                best = (v, c1, c2);
                moved = true;
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    best
}

const OUTER_GRID: usize = 50;
const REFINE_CANDIDATES: usize = 8;

/// `gamma = max over sigma of min over kappa of Gamma`. The outer maximum is
/// taken over a `1/50` grid with `sigma1 <= sigma2` (Gamma is symmetric), and
/// the best candidates are refined by pattern search down to `resolution`.
/// The report carries `exponent = gamma / 2` and `base = 2^(gamma / 2)`.
pub fn gamma_search(bound: &OmegaBound, resolution: f64) -> Result<OptimizationReport> {
    if !(1e-3 - 1e-12..=1.0 / OUTER_GRID as f64).contains(&resolution) {
        return Err(Error::OutOfRange { name: "resolution", value: resolution, range: "[1e-3, 1/50]" });
    }
    let step = 1.0 / OUTER_GRID as f64;
    let points: Vec<[f64; 2]> = (0..=OUTER_GRID)
        .flat_map(|i| (i..=OUTER_GRID).map(move |j| [i as f64 * step, j as f64 * step]))
        .collect();
    let coarse: Vec<(f64, [f64; 2])> = points.par_iter().map(|&s| (inner_min(s, bound).0, s)).collect();

    // stable sort keeps canonical grid order among ties
    let mut ranked = coarse;
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    ranked.truncate(REFINE_CANDIDATES);

    let refined: Vec<(f64, [f64; 2])> = ranked.par_iter().map(|&(v, s)| refine(s, v, step, resolution, bound)).collect();
    let (_, sigma) = refined
        .iter()
        .copied()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one candidate");
    let (gamma, k1, k2) = inner_min(sigma, bound);
    Ok(OptimizationReport {
        algorithm: "cover".into(),
        mode: bound.mode().into(),
        sigma: None,
        tau: None,
        profile: Some([sigma[0], sigma[1], k1, k2]),
        exponent: gamma / 2.0,
        base: (gamma / 2.0).exp2(),
        resolution: Some(resolution),
    })
}

fn refine(start: [f64; 2], start_value: f64, grid: f64, resolution: f64, bound: &OmegaBound) -> (f64, [f64; 2]) {
    let mut best = (start_value, start);
    let mut step = grid / 2.0;
    while step >= resolution * (1.0 - 1e-9) {
        let (v0, s) = best;
        let mut moved = false;
        for (d1, d2) in [(-1.0, 0.0), (0.0, -1.0), (1.0, 0.0), (0.0, 1.0), (-1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (1.0, -1.0)] {
            let c = [(s[0] + d1 * step).clamp(0.0, 1.0), (s[1] + d2 * step).clamp(0.0, 1.0)];
            let v = inner_min(c, bound).0;
            if v > v0 + 1e-15 && v > best.0 {
                best = (v, c);
                moved = true;
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::OmegaTable;

    #[test]
    fn full_blocks_reduce_to_entropy() {
        let t = gamma_terms(0.3, 0.4, 1.0, 1.0).unwrap();
        assert!((t.alpha[0] - h2(0.3)).abs() < 1e-15);
        assert!((t.alpha[1] - h2(0.4)).abs() < 1e-15);
        let bound = OmegaBound::default();
        let b = t.beta_star;
        let expect = t.beta[0] + t.beta[1] + b * (bound.omega((h2(0.3) + h2(0.4)) / b) - 2.0);
        assert!((gamma_value(0.3, 0.4, 1.0, 1.0, &bound).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn zero_conventions() {
        let t = gamma_terms(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(t.alpha, [0.0, 0.0]);
        assert_eq!(t.beta, [1.0, 1.0]);
        assert!(gamma_terms(0.5, 0.2, 0.4, 1.0).is_err());
        assert!(gamma_value(0.2, 0.2, 1.1, 1.0, &OmegaBound::Paper).is_err());
    }

    #[test]
    fn both_full_columns_is_finite() {
        let v = gamma_value(1.0, 1.0, 1.0, 1.0, &OmegaBound::default()).unwrap();
        assert!(v.is_finite());
        assert_eq!(v, 0.0);
    }

    #[test]
    fn half_columns_cost_at_least_two_and_a_half() {
        let bound = OmegaBound::Table(OmegaTable::default());
        for i in 0..=50 {
            for j in 0..=50 {
                let k1 = 0.5 + i as f64 / 100.0;
                let k2 = 0.5 + j as f64 / 100.0;
                assert!(gamma_value(0.5, 0.5, k1, k2, &bound).unwrap() >= 2.5 - 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_in_the_two_halves() {
        let bound = OmegaBound::default();
        for &(s1, s2, k1, k2) in &[(0.1, 0.4, 0.3, 0.9), (0.35, 0.2, 0.5, 0.6), (0.0, 0.7, 0.2, 0.75)] {
            let a = gamma_value(s1, s2, k1, k2, &bound).unwrap();
            let b = gamma_value(s2, s1, k2, k1, &bound).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn inner_min_beats_full_blocks() {
        let bound = OmegaBound::default();
        for &(s1, s2) in &[(0.0, 0.0), (0.2, 0.3), (0.4, 0.4), (0.1, 0.9)] {
            let (v, k1, k2) = gamma_inner_min(s1, s2, &bound).unwrap();
            assert!(v <= gamma_value(s1, s2, 1.0, 1.0, &bound).unwrap());
            assert!(k1 >= s1 && k2 >= s2);
        }
    }

    #[test]
    fn empty_columns_round_is_cheap() {
        let table = OmegaTable::default();
        let (v, _, _) = gamma_inner_min(0.0, 0.0, &OmegaBound::Table(table.clone())).unwrap();
        assert!(v.is_finite());
        assert!(v <= table.omega_upper(1.0));
    }

    #[test]
    fn resolution_is_validated() {
        assert!(gamma_search(&OmegaBound::default(), 1e-4).is_err());
        assert!(gamma_search(&OmegaBound::default(), 0.5).is_err());
    }
}
