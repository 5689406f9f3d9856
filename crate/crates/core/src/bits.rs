//! Bitmask helpers. Element `i` of a ground set is bit `i`; subsets are
//! visited in increasing mask order throughout the crate.

#[inline]
pub fn popcount(mask: usize) -> usize {
    mask.count_ones() as usize
}

#[inline]
pub fn full_mask(n: usize) -> usize {
    (1usize << n) - 1
}

/// All submasks of `mask`, in increasing order, from `0` to `mask`.
pub fn submasks(mask: usize) -> Submasks {
    Submasks { mask, next: Some(0) }
}

#[derive(Clone, Debug)]
pub struct Submasks {
    mask: usize,
    next: Option<usize>,
}

impl Iterator for Submasks {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            Some((cur | !self.mask).wrapping_add(1) & self.mask)
        };
        Some(cur)
    }
}

/// Supersets of `base` inside `universe`, in increasing order.
pub fn supersets(base: usize, universe: usize) -> impl Iterator<Item = usize> {
    debug_assert_eq!(base & !universe, 0);
    submasks(universe & !base).map(move |extra| extra | base)
}

/// `k`-subsets of `{0, .., v-1}` in increasing mask order (Gosper's hack).
pub fn masks_of_size(v: usize, k: usize) -> MasksOfSize {
    let next = if k > v {
        None
    } else {
        Some(full_mask(k))
    };
    MasksOfSize { limit: 1usize << v, next }
}

#[derive(Clone, Debug)]
pub struct MasksOfSize {
    limit: usize,
    next: Option<usize>,
}

impl Iterator for MasksOfSize {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            let succ = (((ripple ^ cur) >> 2) / low) | ripple;
            (succ < self.limit).then_some(succ)
        };
        Some(cur)
    }
}

/// Scatter the low bits of `local` onto the set bits of `mask`.
#[inline]
pub fn deposit(mut local: usize, mut mask: usize) -> usize {
    let mut out = 0;
    while local != 0 && mask != 0 {
        let low = mask & mask.wrapping_neg();
        if local & 1 == 1 {
            out |= low;
        }
        local >>= 1;
        mask ^= low;
    }
    out
}

/// `s`-subsets of `mask`, in increasing order.
pub fn subsets_of_size(mask: usize, s: usize) -> impl Iterator<Item = usize> {
    masks_of_size(popcount(mask), s).map(move |local| deposit(local, mask))
}

/// Binomial coefficient; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}
