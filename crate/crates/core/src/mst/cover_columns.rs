use super::columns::accumulate_rmm;
use super::matrix::{Backend, Part};
use super::{GroundSplit, PartialResult, Transform};
use crate::bits::{binomial, popcount, subsets_of_size};
use crate::cover::CoverCache;
use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::setfn::Family;

/// Sizes for one round of Cover-Columns: halves of size `v1`, `v2` and
/// column intersections of size `s1`, `s2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockSizes {
    pub v1: usize,
    pub v2: usize,
    pub s1: usize,
    pub s2: usize,
}

impl BlockSizes {
    /// Rows of `F_p` that survive trimming for block size `k`: `sum_{j>=s} C(k,j) 2^(v-k)`.
    pub fn kept_rows(v: usize, k: usize, s: usize) -> u64 {
        (s..=k).map(|j| binomial(k, j)).sum::<u64>() << (v - k)
    }
}

/// Chooses the block sizes `(k1, k2)` of the covering designs for a round.
pub trait KappaPlanner {
    fn select(&self, sizes: BlockSizes, covers: &mut CoverCache) -> Result<(usize, usize)>;
}

/// `k_p = |U_p|`: one block per half, one product per round.
#[derive(Clone, Copy, Debug, Default)]
pub struct FullBlockPlanner;

impl KappaPlanner for FullBlockPlanner {
    fn select(&self, sizes: BlockSizes, _: &mut CoverCache) -> Result<(usize, usize)> {
        Ok((sizes.v1, sizes.v2))
    }
}

/// Minimizes the classical cost `blocks x (R1 C' R2 + (R1 + R2) C')` over all
/// feasible `(k1, k2)`, using the actual greedy design sizes. Ties go to the
/// smaller `(k1, k2)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CostModelPlanner;

impl KappaPlanner for CostModelPlanner {
    fn select(&self, sz: BlockSizes, covers: &mut CoverCache) -> Result<(usize, usize)> {
        let mut best: Option<(u128, usize, usize)> = None;
        for k1 in sz.s1..=sz.v1 {
            let blocks1 = covers.get(sz.v1, k1, sz.s1)?.blocks.len() as u128;
            let r1 = BlockSizes::kept_rows(sz.v1, k1, sz.s1) as u128;
            for k2 in sz.s2..=sz.v2 {
                let blocks2 = covers.get(sz.v2, k2, sz.s2)?.blocks.len() as u128;
                let r2 = BlockSizes::kept_rows(sz.v2, k2, sz.s2) as u128;
                let c = (binomial(k1, sz.s1) * binomial(k2, sz.s2)) as u128;
                let cost = blocks1 * blocks2 * (r1 * c * r2 + (r1 + r2) * c);
                if best.is_none_or(|(b, _, _)| cost < b) {
                    best = Some((cost, k1, k2));
                }
            }
        }
        best.map(|(_, k1, k2)| (k1, k2))
            .ok_or_else(|| Error::Invalid(format!("no feasible block sizes for {sz:?}")))
    }
}

/// Partition the columns by `(|S ∩ U1|, |S ∩ U2|)`, cover each class with
/// products of covering-design blocks and multiply one trimmed block pair at
/// a time. Columns already handled by an earlier block are skipped, so every
/// column reaches the backend exactly once.
pub fn mst_cover_columns<R: Ring, P: KappaPlanner + ?Sized>(
    ring: &R,
    fam: &Family<R::Elem>,
    planner: &P,
    backend: Backend,
) -> Result<Transform<R::Elem>> {
    let n = fam.n();
    let split = GroundSplit::new(n);
    let (v1, v2) = (split.size(Part::First), split.size(Part::Second));
    let all_rows1 = split.all_rows(Part::First);
    let all_rows2 = split.all_rows(Part::Second);

    let mut covers = CoverCache::new();
    let mut covered = vec![false; 1 << n];
    let mut out = PartialResult::zeros(ring, n);

    for s1 in 0..=v1 {
        for s2 in 0..=v2 {
            let sizes = BlockSizes { v1, v2, s1, s2 };
            let (k1, k2) = planner.select(sizes, &mut covers)?;
            if !(s1..=v1).contains(&k1) || !(s2..=v2).contains(&k2) {
                return Err(Error::Invalid(format!("planner chose k=({k1},{k2}) for {sizes:?}")));
            }
            // U1 occupies the low bits, so local masks of U1 are global masks;
            // U2 local masks shift up by h.
            let blocks1: Vec<usize> = covers.get(v1, k1, s1)?.blocks.iter().map(|&b| b as usize).collect();
            let blocks2: Vec<usize> = covers.get(v2, k2, s2)?.blocks.iter().map(|&b| (b as usize) << split.h).collect();

            for &kb1 in &blocks1 {
                let rows1: Vec<usize> = all_rows1.iter().copied().filter(|&t| popcount(t & kb1) >= s1).collect();
                for &kb2 in &blocks2 {
                    let mut cols = Vec::new();
                    for c1 in subsets_of_size(kb1, s1) {
                        for c2 in subsets_of_size(kb2, s2) {
                            let s = c1 | c2;
                            if !covered[s] {
                                covered[s] = true;
                                cols.push(s);
                            }
                        }
                    }
                    if cols.is_empty() {
                        continue;
                    }
                    let rows2: Vec<usize> = all_rows2.iter().copied().filter(|&t| popcount(t & kb2) >= s2).collect();
                    accumulate_rmm(ring, fam, &split, &rows1, &cols, &rows2, backend, &mut out.g, &mut out.trace);
                }
            }
        }
    }
    debug_assert!(covered.iter().all(|&c| c));
    Transform::from_partial(n, out)
}
