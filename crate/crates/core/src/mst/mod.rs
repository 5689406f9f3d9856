//! The multi-subset transform
//!
//! ```text
//! g(T) = sum over S subset of T of  prod over i in T of f_i(S)
//! ```
//!
//! computed either by direct enumeration of the `3^n` pairs `S ⊆ T` or by the
//! matrix reductions: split `U` into halves `U1`, `U2` and read `g` as the
//! product `F1 F2^T` of two sparse `2^h x 2^n` matrices, where
//! `F_p(T_p, S) = [S ∩ U_p ⊆ T_p] prod over i in T_p of f_i(S)`.
//! The reductions differ in which blocks of that product go to a dense matrix
//! multiplication backend and which are accumulated directly.

mod columns;
mod cover_columns;
mod matrix;

use std::fmt;
use std::str::FromStr;

pub use columns::{columns_directly, fast_rmm, mst_columns, mst_rows_columns, rows_trimmed, size_threshold};
pub use cover_columns::{mst_cover_columns, BlockSizes, CostModelPlanner, FullBlockPlanner, KappaPlanner};
pub use matrix::{build_submatrix, Backend, Part, SubMatrix, DEFAULT_STRASSEN_BASE};

use crate::bits::{full_mask, popcount, submasks};
use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::setfn::{Family, SetFunction};

/// Columns threshold balancing the two cost terms of the Columns algorithm.
pub const DEFAULT_COLUMNS_SIGMA: f64 = 0.3642045;
/// Parameters balancing the three cost terms of the Rows & Columns algorithm.
pub const DEFAULT_ROWS_COLUMNS_SIGMA: f64 = 0.38185;
pub const DEFAULT_ROWS_COLUMNS_TAU: f64 = 0.59777;

/// The halves `U1 = {0, .., h-1}` and `U2 = {h, .., n-1}` with `h = ceil(n/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundSplit {
    pub n: usize,
    pub h: usize,
    pub u1: usize,
    pub u2: usize,
}

impl GroundSplit {
    pub fn new(n: usize) -> Self {
        let h = n.div_ceil(2);
        let u1 = full_mask(h);
        Self { n, h, u1, u2: full_mask(n) & !u1 }
    }

    pub fn mask(&self, part: Part) -> usize {
        match part {
            Part::First => self.u1,
            Part::Second => self.u2,
        }
    }

    pub fn size(&self, part: Part) -> usize {
        popcount(self.mask(part))
    }

    /// All subsets of `U_p`, increasing.
    pub fn all_rows(&self, part: Part) -> Vec<usize> {
        submasks(self.mask(part)).collect()
    }
}

/// Dimensions `rows1 x inner x rows2` of one backend product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductShape {
    pub rows1: usize,
    pub inner: usize,
    pub rows2: usize,
}

impl ProductShape {
    /// Multiplications spent by the classical backend on this product.
    pub fn classical_muls(&self) -> u64 {
        (self.rows1 * self.inner * self.rows2) as u64
    }
}

/// Structural bookkeeping collected while a transform runs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    /// `(S, T)` pairs accumulated directly, without the backend.
    pub pair_iterations: u64,
    /// One entry per backend product, in execution order.
    pub products: Vec<ProductShape>,
    /// Columns handed to the backend, summed over products.
    pub columns_processed: u64,
}

impl Trace {
    pub fn merge(&mut self, other: Trace) {
        self.pair_iterations += other.pair_iterations;
        self.products.extend(other.products);
        self.columns_processed += other.columns_processed;
    }

    pub fn classical_product_muls(&self) -> u64 {
        self.products.iter().map(ProductShape::classical_muls).sum()
    }
}

/// Contributions to `G[T]` from a subset of columns and rows; entries a
/// reduction did not touch are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialResult<E> {
    pub g: Vec<E>,
    pub trace: Trace,
}

impl<E: Copy> PartialResult<E> {
    pub(crate) fn zeros<R: Ring<Elem = E>>(ring: &R, n: usize) -> Self {
        Self { g: vec![ring.zero(); 1 << n], trace: Trace::default() }
    }

    /// Entrywise sum with another partial result over the same ground set.
    pub fn absorb<R: Ring<Elem = E>>(&mut self, ring: &R, other: PartialResult<E>) {
        debug_assert_eq!(self.g.len(), other.g.len());
        for (a, b) in self.g.iter_mut().zip(other.g) {
            ring.add_assign(a, b);
        }
        self.trace.merge(other.trace);
    }
}

/// A finished transform together with its trace.
#[derive(Clone, Debug, PartialEq)]
pub struct Transform<E> {
    pub g: SetFunction<E>,
    pub trace: Trace,
}

impl<E: Copy> Transform<E> {
    pub(crate) fn from_partial(n: usize, partial: PartialResult<E>) -> Result<Self> {
        Ok(Self { g: SetFunction::new(n, partial.g)?, trace: partial.trace })
    }
}

/// `prod over i in members of f_i(s)` using `|members| - 1` multiplications.
#[inline]
pub(crate) fn product_over<R: Ring>(ring: &R, fam: &Family<R::Elem>, members: usize, s: usize) -> R::Elem {
    if members == 0 {
        return ring.one();
    }
    let mut rest = members;
    let first = rest.trailing_zeros() as usize;
    rest &= rest - 1;
    let mut acc = fam.value(first, s);
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        acc = ring.mul(acc, fam.value(i, s));
    }
    acc
}

/// Direct evaluation over all `3^n` pairs `S ⊆ T`.
pub fn mst_naive<R: Ring>(ring: &R, fam: &Family<R::Elem>) -> Transform<R::Elem> {
    let n = fam.n();
    let mut trace = Trace::default();
    let g = (0..1usize << n)
        .map(|t| naive_entry(ring, fam, t, &mut trace))
        .collect();
    Transform { g: SetFunction::new(n, g).expect("family size already validated"), trace }
}

/// Direct evaluation of `g` at the given targets only.
pub fn mst_naive_at<R: Ring>(ring: &R, fam: &Family<R::Elem>, targets: &[usize]) -> (Vec<R::Elem>, Trace) {
    let mut trace = Trace::default();
    let values = targets.iter().map(|&t| naive_entry(ring, fam, t, &mut trace)).collect();
    (values, trace)
}

fn naive_entry<R: Ring>(ring: &R, fam: &Family<R::Elem>, t: usize, trace: &mut Trace) -> R::Elem {
    let mut acc = ring.zero();
    for s in submasks(t) {
        acc = ring.add(acc, product_over(ring, fam, t, s));
        trace.pair_iterations += 1;
    }
    acc
}

/// Algorithm selector used by the DAG application, the CLI and the bench harness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MstAlgorithm {
    Naive,
    Columns { sigma: f64 },
    RowsColumns { sigma: f64, tau: f64 },
    Cover,
}

impl MstAlgorithm {
    pub fn columns() -> Self {
        MstAlgorithm::Columns { sigma: DEFAULT_COLUMNS_SIGMA }
    }

    pub fn rows_columns() -> Self {
        MstAlgorithm::RowsColumns { sigma: DEFAULT_ROWS_COLUMNS_SIGMA, tau: DEFAULT_ROWS_COLUMNS_TAU }
    }

    /// All four algorithms with their default parameters.
    pub fn all() -> [MstAlgorithm; 4] {
        [MstAlgorithm::Naive, Self::columns(), Self::rows_columns(), MstAlgorithm::Cover]
    }

    pub fn id(&self) -> &'static str {
        match self {
            MstAlgorithm::Naive => "naive",
            MstAlgorithm::Columns { .. } => "columns",
            MstAlgorithm::RowsColumns { .. } => "rows-columns",
            MstAlgorithm::Cover => "cover",
        }
    }

    pub fn sigma(&self) -> Option<f64> {
        match *self {
            MstAlgorithm::Columns { sigma } | MstAlgorithm::RowsColumns { sigma, .. } => Some(sigma),
            _ => None,
        }
    }

    pub fn tau(&self) -> Option<f64> {
        match *self {
            MstAlgorithm::RowsColumns { tau, .. } => Some(tau),
            _ => None,
        }
    }

    /// Replace the default parameters where the algorithm has them.
    pub fn with_params(self, sigma: Option<f64>, tau: Option<f64>) -> Self {
        match self {
            MstAlgorithm::Columns { sigma: s } => MstAlgorithm::Columns { sigma: sigma.unwrap_or(s) },
            MstAlgorithm::RowsColumns { sigma: s, tau: t } => {
                MstAlgorithm::RowsColumns { sigma: sigma.unwrap_or(s), tau: tau.unwrap_or(t) }
            }
            other => other,
        }
    }

    pub fn run<R: Ring>(&self, ring: &R, fam: &Family<R::Elem>, backend: Backend) -> Result<Transform<R::Elem>> {
        match *self {
            MstAlgorithm::Naive => Ok(mst_naive(ring, fam)),
            MstAlgorithm::Columns { sigma } => mst_columns(ring, fam, sigma, backend),
            MstAlgorithm::RowsColumns { sigma, tau } => mst_rows_columns(ring, fam, sigma, tau, backend),
            MstAlgorithm::Cover => mst_cover_columns(ring, fam, &CostModelPlanner, backend),
        }
    }
}

impl fmt::Display for MstAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for MstAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(MstAlgorithm::Naive),
            "columns" => Ok(Self::columns()),
            "rows-columns" => Ok(Self::rows_columns()),
            "cover" => Ok(MstAlgorithm::Cover),
            _ => Err(Error::Invalid(format!(
                "unknown algorithm '{s}' (expected naive, columns, rows-columns or cover)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{counting_wrap, Float64, PrimeField};

    #[test]
    fn empty_set_maps_to_one() {
        let ring = PrimeField::default();
        let fam = Family::from_fn(3, |i, m| (i * 7 + m) as u64 + 2).unwrap();
        assert_eq!(mst_naive(&ring, &fam).g.get(0), 1);
    }

    #[test]
    fn all_ones_gives_powers_of_two() {
        let fam = Family::from_fn(2, |_, _| 1.0).unwrap();
        assert_eq!(mst_naive(&Float64, &fam).g.values(), &[1.0, 2.0, 2.0, 4.0]);
    }

    #[test]
    fn single_element_by_hand() {
        let fam = Family::new(1, vec![SetFunction::new(1, vec![3.0, 5.0]).unwrap()]).unwrap();
        assert_eq!(mst_naive(&Float64, &fam).g.values(), &[1.0, 8.0]);
    }

    #[test]
    fn naive_visits_three_to_the_n_pairs() {
        let ring = counting_wrap(PrimeField::default());
        for n in 0..=8 {
            let fam = Family::from_fn(n, |i, m| (i + m + 1) as u64).unwrap();
            let t = mst_naive(&ring, &fam);
            assert_eq!(t.trace.pair_iterations, 3u64.pow(n as u32));
        }
        ring.reset();
        let fam = Family::from_fn(3, |i, m| (i + m + 1) as u64).unwrap();
        let _ = mst_naive(&ring, &fam);
        // one accumulation per pair
        assert_eq!(ring.counts().adds, 27);
    }

    #[test]
    fn split_halves() {
        let s = GroundSplit::new(5);
        assert_eq!((s.h, s.u1, s.u2), (3, 0b00111, 0b11000));
        assert_eq!(s.u1 & s.u2, 0);
        assert_eq!(s.u1 | s.u2, 0b11111);
        assert_eq!(GroundSplit::new(0).u2, 0);
    }

    #[test]
    fn algorithm_ids_round_trip() {
        for algo in MstAlgorithm::all() {
            assert_eq!(algo.id().parse::<MstAlgorithm>().unwrap(), algo);
        }
        assert!("fast".parse::<MstAlgorithm>().is_err());
    }
}
