//! Weighted sums over acyclic digraphs with modular weights,
//!
//! ```text
//! a_V = sum over acyclic D on V of  prod over i of w_i(D_i),
//! ```
//!
//! where `D_i` is the in-neighbour set of node `i`. Four evaluators: plain
//! enumeration, the inclusion-exclusion recurrence over sink sets, and its
//! rewriting as one multi-subset transform per layer size, plus the unweighted
//! Robinson count.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::bits::{masks_of_size, popcount, submasks};
use crate::error::{Error, Result};
use crate::mst::{mst_naive_at, Backend, MstAlgorithm, Trace};
use crate::ring::Ring;
use crate::setfn::{zeta_transform, Family, SetFunction, MAX_N};

/// Largest node count: the reduction works over `n + 1` elements.
pub const MAX_NODES: usize = MAX_N - 1;
pub const BRUTE_FORCE_MAX_NODES: usize = 5;

/// Node-wise weights `w_i(D)` for `D ⊆ V \ {i}`; entries with bit `i` set are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSystem<E> {
    n: usize,
    weights: Vec<SetFunction<E>>,
}

impl<E: Copy + PartialEq> WeightSystem<E> {
    pub fn new<R: Ring<Elem = E>>(ring: &R, weights: Vec<SetFunction<E>>) -> Result<Self> {
        let n = weights.len();
        if n > MAX_NODES {
            return Err(Error::TooLarge { n, max: MAX_NODES });
        }
        for (i, w) in weights.iter().enumerate() {
            if w.n() != n {
                return Err(Error::DimensionMismatch(format!("weights of node {i} are over {} nodes, expected {n}", w.n())));
            }
            if let Some(d) = (0..1usize << n).find(|&d| d >> i & 1 == 1 && w.get(d) != ring.zero()) {
                return Err(Error::Invalid(format!("node {i} has nonzero weight on in-neighbour set {d:#b} containing itself")));
            }
        }
        Ok(Self { n, weights })
    }

    /// `w_i(D) = f(i, D)` for `i ∉ D`, zero otherwise.
    pub fn from_fn<R: Ring<Elem = E>>(ring: &R, n: usize, mut f: impl FnMut(usize, usize) -> E) -> Result<Self> {
        if n > MAX_NODES {
            return Err(Error::TooLarge { n, max: MAX_NODES });
        }
        let weights = (0..n)
            .map(|i| SetFunction::from_fn(n, |d| if d >> i & 1 == 1 { ring.zero() } else { f(i, d) }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring, weights)
    }

    /// All weights one: `a_V` counts labelled DAGs.
    pub fn unweighted<R: Ring<Elem = E>>(ring: &R, n: usize) -> Result<Self> {
        Self::from_fn(ring, n, |_, _| ring.one())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[SetFunction<E>] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, i: usize, d: usize) -> E {
        self.weights[i].get(d)
    }
}

/// `a[S]` for every node subset `S`, with `a[∅] = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DagSumResult<E> {
    pub a: SetFunction<E>,
    /// Accumulated transform bookkeeping; empty for the direct recurrence.
    pub trace: Trace,
}

impl<E: Copy> DagSumResult<E> {
    /// The sum over acyclic digraphs on all of `V`.
    pub fn total(&self) -> E {
        self.a.get(self.a.values().len() - 1)
    }
}

/// Labelled DAGs on `n` nodes, `a_n = sum_{s=1}^n (-1)^(s-1) C(n,s) 2^(s(n-s)) a_(n-s)`.
pub fn robinson_count(n: usize) -> BigUint {
    let mut a: Vec<BigInt> = vec![BigInt::one()];
    let mut binom: Vec<BigInt> = vec![BigInt::one()];
    for m in 1..=n {
        // row m of Pascal's triangle
        let mut next = vec![BigInt::one(); m + 1];
        for k in 1..m {
            next[k] = &binom[k - 1] + &binom[k];
        }
        binom = next;
        let mut total = BigInt::zero();
        for s in 1..=m {
            let term = &binom[s] * (BigInt::one() << (s * (m - s))) * &a[m - s];
            if s % 2 == 1 {
                total += term;
            } else {
                total -= term;
            }
        }
        a.push(total);
    }
    let last = a.pop().expect("a_0 is always present");
    debug_assert!(!last.is_negative());
    last.magnitude().clone()
}

/// Enumerate all `2^(n(n-1))` digraphs and sum the weights of the acyclic ones.
pub fn brute_force_dag_sum<R: Ring>(ring: &R, wsys: &WeightSystem<R::Elem>) -> Result<R::Elem> {
    let n = wsys.n();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::TooLarge { n, max: BRUTE_FORCE_MAX_NODES });
    }
    let mut parents = vec![0usize; n];
    let mut total = ring.zero();
    enumerate(ring, wsys, 0, ring.one(), &mut parents, &mut total);
    Ok(total)
}

fn enumerate<R: Ring>(
    ring: &R,
    wsys: &WeightSystem<R::Elem>,
    node: usize,
    weight: R::Elem,
    parents: &mut [usize],
    total: &mut R::Elem,
) {
    let n = wsys.n();
    if node == n {
        if is_acyclic(parents) {
            ring.add_assign(total, weight);
        }
        return;
    }
    let others = ((1usize << n) - 1) & !(1 << node);
    for d in submasks(others) {
        parents[node] = d;
        enumerate(ring, wsys, node + 1, ring.mul(weight, wsys.weight(node, d)), parents, total);
    }
}

/// Peel off nodes with no remaining in-neighbours; acyclic iff everything peels.
fn is_acyclic(parents: &[usize]) -> bool {
    let mut left = (1usize << parents.len()) - 1;
    while left != 0 {
        let Some(source) = (0..parents.len()).find(|&i| left >> i & 1 == 1 && parents[i] & left == 0) else {
            return false;
        };
        left &= !(1 << source);
    }
    true
}

/// The sink-set recurrence
/// `a[T] = sum_{∅ ≠ S ⊆ T} (-1)^(|S|-1) a[T \ S] prod_{i ∈ S} (zeta w_i)[T \ S]`,
/// evaluated directly for every `T`.
pub fn tian_he_sum<R: Ring>(ring: &R, wsys: &WeightSystem<R::Elem>) -> DagSumResult<R::Elem> {
    let n = wsys.n();
    let zeta: Vec<SetFunction<R::Elem>> = wsys.weights().iter().map(|w| zeta_transform(ring, w)).collect();
    let mut a = vec![ring.zero(); 1 << n];
    a[0] = ring.one();
    // T \ S < T numerically, so increasing mask order sees every a[T \ S] first
    for t in 1..1usize << n {
        let mut acc = ring.zero();
        for s in submasks(t).skip(1) {
            let rest = t ^ s;
            let mut term = a[rest];
            let mut bits = s;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                term = ring.mul(term, zeta[i].get(rest));
            }
            acc = if popcount(s) % 2 == 1 { ring.add(acc, term) } else { ring.sub(acc, term) };
        }
        a[t] = acc;
    }
    DagSumResult { a: SetFunction::new(n, a).expect("n already validated"), trace: Trace::default() }
}

/// The family over `V ∪ {0̂}`, with `0̂` as bit `n`, whose transform at
/// `T ∪ {0̂}` equals `(-1)^(|T|+1) a[T]` once `a[S]` is known for `|S| < |T|`.
///
/// * `f_i[S] = 0` when `0̂ ∉ S`,
/// * `f_i[S ∪ 0̂] = 1` when `i ∈ S`, else `sum_{X ⊆ S} w_i(X)`,
/// * `f_0̂[S ∪ 0̂] = (-1)^|S| a[S]` for the sizes filled in so far, zero above.
#[derive(Clone, Debug)]
pub struct DagFamily<E> {
    family: Family<E>,
    filled: usize,
}

impl<E: Copy + PartialEq> DagFamily<E> {
    pub fn new<R: Ring<Elem = E>>(ring: &R, wsys: &WeightSystem<E>) -> Result<Self> {
        let n = wsys.n();
        let hat = 1usize << n;
        let mut members = Vec::with_capacity(n + 1);
        for (i, w) in wsys.weights().iter().enumerate() {
            let zeta = zeta_transform(ring, w);
            let mut f = SetFunction::constant(n + 1, ring.zero())?;
            for s in 0..hat {
                f.set(s | hat, if s >> i & 1 == 1 { ring.one() } else { zeta.get(s) });
            }
            members.push(f);
        }
        members.push(SetFunction::constant(n + 1, ring.zero())?);
        Ok(Self { family: Family::new(n + 1, members)?, filled: 0 })
    }

    /// Write `f_0̂[S ∪ 0̂] = (-1)^|S| a[S]` for every `S` with `|S| = size`.
    pub fn fill_layer<R: Ring<Elem = E>>(&mut self, ring: &R, a: &SetFunction<E>, size: usize) {
        let n = a.n();
        let hat = 1usize << n;
        let f0 = self.family.member_mut(n);
        for s in masks_of_size(n, size) {
            let v = if size.is_multiple_of(2) { a.get(s) } else { ring.neg(a.get(s)) };
            f0.set(s | hat, v);
        }
        self.filled = self.filled.max(size + 1);
    }

    pub fn family(&self) -> &Family<E> {
        &self.family
    }

    /// Number of layers of `f_0̂` written so far.
    pub fn filled(&self) -> usize {
        self.filled
    }
}

/// The family for round `t`: `a` must be correct on all sets of size below `t`.
pub fn build_dag_family<R: Ring>(
    ring: &R,
    wsys: &WeightSystem<R::Elem>,
    a: &SetFunction<R::Elem>,
    t: usize,
) -> Result<Family<R::Elem>> {
    if a.n() != wsys.n() {
        return Err(Error::DimensionMismatch(format!("a is over {} nodes, weights over {}", a.n(), wsys.n())));
    }
    let mut fam = DagFamily::new(ring, wsys)?;
    for size in 0..t {
        fam.fill_layer(ring, a, size);
    }
    Ok(fam.family)
}

/// Layer by layer: for `t = 1..n`, extend `f_0̂` with the sets of size `t-1`,
/// take the multi-subset transform over `n + 1` elements and read
/// `a[T] = (-1)^(|T|+1) g[T ∪ 0̂]` for `|T| = t`.
///
/// With `targets_only`, the naive transform is evaluated only at those `T ∪ 0̂`.
pub fn sum_acyclic_digraphs<R: Ring>(
    ring: &R,
    wsys: &WeightSystem<R::Elem>,
    algo: MstAlgorithm,
    backend: Backend,
    targets_only: bool,
) -> Result<DagSumResult<R::Elem>> {
    if targets_only && algo != MstAlgorithm::Naive {
        return Err(Error::Invalid(format!("targets-only evaluation needs the naive transform, not {algo}")));
    }
    let n = wsys.n();
    let hat = 1usize << n;
    let mut a = SetFunction::constant(n, ring.zero())?;
    a.set(0, ring.one());
    let mut fam = DagFamily::new(ring, wsys)?;
    let mut trace = Trace::default();

    for t in 1..=n {
        fam.fill_layer(ring, &a, t - 1);
        let layer: Vec<usize> = masks_of_size(n, t).collect();
        let values: Vec<R::Elem> = if targets_only {
            let targets: Vec<usize> = layer.iter().map(|&s| s | hat).collect();
            let (values, tr) = mst_naive_at(ring, fam.family(), &targets);
            trace.merge(tr);
            values
        } else {
            let g = algo.run(ring, fam.family(), backend)?;
            trace.merge(g.trace);
            layer.iter().map(|&s| g.g.get(s | hat)).collect()
        };
        for (&s, g) in layer.iter().zip(values) {
            // (-1)^(t+1) = (-1)^(t-1)
            a.set(s, if t % 2 == 1 { g } else { ring.neg(g) });
        }
    }
    Ok(DagSumResult { a, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Float64, PrimeField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_weights(ring: &PrimeField, n: usize, seed: u64) -> WeightSystem<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        WeightSystem::from_fn(ring, n, |_, _| ring.random(&mut rng)).unwrap()
    }

    #[test]
    fn robinson_sequence() {
        let got: Vec<u64> = (0..=6).map(|n| robinson_count(n).try_into().unwrap()).collect();
        assert_eq!(got, vec![1, 1, 3, 25, 543, 29281, 3781503]);
    }

    #[test]
    fn brute_force_counts() {
        let ring = PrimeField::default();
        for (n, expect) in [(0, 1), (1, 1), (2, 3), (3, 25), (4, 543)] {
            let w = WeightSystem::unweighted(&ring, n).unwrap();
            assert_eq!(brute_force_dag_sum(&ring, &w).unwrap(), expect);
        }
    }

    #[test]
    fn acyclicity_check() {
        assert!(is_acyclic(&[0, 0b01, 0b11]));
        assert!(!is_acyclic(&[0b10, 0b01]));
        assert!(!is_acyclic(&[0, 0b100, 0b010]));
    }

    #[test]
    fn empty_graph_only() {
        let ring = PrimeField::default();
        let w = WeightSystem::from_fn(&ring, 4, |_, d| u64::from(d == 0)).unwrap();
        assert_eq!(brute_force_dag_sum(&ring, &w).unwrap(), 1);
        assert_eq!(tian_he_sum(&ring, &w).total(), 1);
    }

    #[test]
    fn single_node() {
        let ring = PrimeField::default();
        let w = WeightSystem::new(&ring, vec![SetFunction::new(1, vec![7, 0]).unwrap()]).unwrap();
        assert_eq!(tian_he_sum(&ring, &w).a.values(), &[1, 7]);
        let r = sum_acyclic_digraphs(&ring, &w, MstAlgorithm::Naive, Backend::Classical, false).unwrap();
        assert_eq!(r.a.values(), &[1, 7]);
    }

    #[test]
    fn self_loops_are_rejected() {
        let ring = PrimeField::default();
        let w = vec![SetFunction::new(1, vec![1, 1]).unwrap()];
        assert!(WeightSystem::new(&ring, w).is_err());
        assert!(brute_force_dag_sum(&ring, &WeightSystem::unweighted(&ring, 6).unwrap()).is_err());
    }

    #[test]
    fn recurrence_matches_enumeration() {
        let ring = PrimeField::default();
        for n in 0..=4 {
            for seed in 0..3 {
                let w = random_weights(&ring, n, seed);
                assert_eq!(tian_he_sum(&ring, &w).total(), brute_force_dag_sum(&ring, &w).unwrap(), "n={n}");
            }
        }
    }

    #[test]
    fn family_cases() {
        let ring = PrimeField::default();
        let w = random_weights(&ring, 3, 5);
        let a = tian_he_sum(&ring, &w).a;
        let fam = build_dag_family(&ring, &w, &a, 2).unwrap();
        let hat = 1 << 3;
        for i in 0..4 {
            for s in 0..hat {
                assert_eq!(fam.value(i, s), 0);
            }
        }
        for i in 0..3 {
            for s in 0..hat {
                if s >> i & 1 == 1 {
                    assert_eq!(fam.value(i, s | hat), 1);
                }
            }
        }
        for s in 0..hat {
            let v = fam.value(3, s | hat);
            match popcount(s) {
                0 => assert_eq!(v, 1),
                1 => assert_eq!(v, ring.neg(a.get(s))),
                _ => assert_eq!(v, 0),
            }
        }
    }

    #[test]
    fn reduction_matches_recurrence() {
        let ring = PrimeField::default();
        for n in 0..=6 {
            let w = random_weights(&ring, n, 40 + n as u64);
            let expect = tian_he_sum(&ring, &w).a;
            for algo in MstAlgorithm::all() {
                let got = sum_acyclic_digraphs(&ring, &w, algo, Backend::Classical, false).unwrap();
                assert_eq!(got.a, expect, "n={n} algo={algo}");
            }
            let got = sum_acyclic_digraphs(&ring, &w, MstAlgorithm::Naive, Backend::Classical, true).unwrap();
            assert_eq!(got.a, expect);
        }
    }

    #[test]
    fn targets_only_needs_naive() {
        let ring = PrimeField::default();
        let w = random_weights(&ring, 3, 0);
        assert!(sum_acyclic_digraphs(&ring, &w, MstAlgorithm::columns(), Backend::Classical, true).is_err());
    }

    #[test]
    fn float_weights_count_dags() {
        let w = WeightSystem::unweighted(&Float64, 5).unwrap();
        let r = sum_acyclic_digraphs(&Float64, &w, MstAlgorithm::Naive, Backend::Classical, false).unwrap();
        assert_eq!(r.total(), 29281.0);
    }
}
