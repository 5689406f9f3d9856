//! Greedy covering designs: families of `k`-subsets of `{0, .., v-1}` such
//! that every `s`-subset lies inside at least one block.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::bits::{binomial, masks_of_size, subsets_of_size};
use crate::error::{Error, Result};

pub const MAX_V: usize = 28;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverDesign {
    pub v: usize,
    pub k: usize,
    pub s: usize,
    pub blocks: Vec<u32>,
}

impl CoverDesign {
    /// The counting lower bound `C(v,s) / C(k,s)`, which is also the fractional optimum.
    pub fn lower_bound(&self) -> f64 {
        binomial(self.v, self.s) as f64 / binomial(self.k, self.s) as f64
    }

    /// `(1 + ln C(k,s)) C(v,s) / C(k,s) + 1`, the size guaranteed for greedy output.
    pub fn greedy_bound(&self) -> f64 {
        (1.0 + (binomial(self.k, self.s) as f64).ln()) * self.lower_bound() + 1.0
    }

    /// Number of blocks relative to [`Self::lower_bound`].
    pub fn ratio(&self) -> f64 {
        self.blocks.len() as f64 / self.lower_bound()
    }
}

struct Bitset(Vec<u64>);

impl Bitset {
    fn new(bits: usize) -> Self {
        Bitset(vec![0; bits.div_ceil(64).max(1)])
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
}

fn check_params(v: usize, k: usize, s: usize) -> Result<()> {
    if v > MAX_V {
        return Err(Error::TooLarge { n: v, max: MAX_V });
    }
    if !(s <= k && k <= v) {
        return Err(Error::Invalid(format!("covering design needs s <= k <= v, got v={v} k={k} s={s}")));
    }
    Ok(())
}

/// Greedy set cover over all `k`-subsets, picking the block that covers the
/// most uncovered `s`-subsets (lowest mask on ties).
///
/// Scores only decrease, so stale heap entries are re-scored lazily: a popped
/// block whose fresh score still matches its stored score is the true maximum.
pub fn greedy_cover(v: usize, k: usize, s: usize) -> Result<CoverDesign> {
    check_params(v, k, s)?;
    let mut covered = Bitset::new(1 << v);
    let mut uncovered = binomial(v, s);
    let initial = binomial(k, s);
    let mut heap: BinaryHeap<(u64, Reverse<usize>)> = masks_of_size(v, k).map(|b| (initial, Reverse(b))).collect();

    let mut blocks = Vec::new();
    while uncovered > 0 {
        let (stored, Reverse(block)) = heap.pop().expect("every s-subset lies in some k-subset");
        let fresh = subsets_of_size(block, s).filter(|&t| !covered.get(t)).count() as u64;
        if fresh < stored {
            heap.push((fresh, Reverse(block)));
            continue;
        }
        for t in subsets_of_size(block, s) {
            covered.set(t);
        }
        uncovered -= fresh;
        blocks.push(block as u32);
    }
    Ok(CoverDesign { v, k, s, blocks })
}

/// True iff every `s`-subset of `{0, .., v-1}` lies in some block.
pub fn verify_cover(design: &CoverDesign) -> bool {
    if check_params(design.v, design.k, design.s).is_err() {
        return false;
    }
    let mut covered = Bitset::new(1 << design.v);
    for &b in &design.blocks {
        if (b as usize) >> design.v != 0 {
            return false;
        }
        for t in subsets_of_size(b as usize, design.s) {
            covered.set(t);
        }
    }
    masks_of_size(design.v, design.s).all(|t| covered.get(t))
}

/// Memoized greedy designs keyed by `(v, k, s)`.
#[derive(Debug, Default)]
pub struct CoverCache {
    designs: HashMap<(usize, usize, usize), CoverDesign>,
}

impl CoverCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, v: usize, k: usize, s: usize) -> Result<&CoverDesign> {
        use std::collections::hash_map::Entry;
        match self.designs.entry((v, k, s)) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => Ok(e.insert(greedy_cover(v, k, s)?)),
        }
    }
}
