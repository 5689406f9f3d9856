//! Dense set functions and the classical subset-lattice transforms.

use crate::bits::{popcount, submasks};
use crate::error::{Error, Result};
use crate::ring::Ring;

/// Largest supported ground set (a dense table of `2^24` values).
pub const MAX_N: usize = 24;

/// A function from the subsets of `{0, .., n-1}` to ring values, indexed by bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct SetFunction<E> {
    n: usize,
    values: Vec<E>,
}

impl<E: Copy> SetFunction<E> {
    pub fn new(n: usize, values: Vec<E>) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::TooLarge { n, max: MAX_N });
        }
        if values.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "set function over {n} elements needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    pub fn constant(n: usize, value: E) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::TooLarge { n, max: MAX_N });
        }
        Ok(Self { n, values: vec![value; 1 << n] })
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> E) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::TooLarge { n, max: MAX_N });
        }
        Ok(Self { n, values: (0..1usize << n).map(f).collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[E] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [E] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<E> {
        self.values
    }

    #[inline]
    pub fn get(&self, mask: usize) -> E {
        self.values[mask]
    }

    #[inline]
    pub fn set(&mut self, mask: usize, value: E) {
        self.values[mask] = value;
    }
}

/// One set function per ground-set element: `members[i]` is `f_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Family<E> {
    n: usize,
    members: Vec<SetFunction<E>>,
}

impl<E: Copy> Family<E> {
    pub fn new(n: usize, members: Vec<SetFunction<E>>) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::TooLarge { n, max: MAX_N });
        }
        if members.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "family over {n} elements needs {n} functions, got {}",
                members.len()
            )));
        }
        if let Some(bad) = members.iter().position(|f| f.n() != n) {
            return Err(Error::DimensionMismatch(format!(
                "function {bad} is over {} elements, expected {n}",
                members[bad].n()
            )));
        }
        Ok(Self { n, members })
    }

    /// Family whose `i`-th member is `f(i, mask)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> E) -> Result<Self> {
        let members = (0..n)
            .map(|i| SetFunction::from_fn(n, |m| f(i, m)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, members)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[SetFunction<E>] {
        &self.members
    }

    pub fn member_mut(&mut self, i: usize) -> &mut SetFunction<E> {
        &mut self.members[i]
    }

    #[inline]
    pub fn value(&self, i: usize, mask: usize) -> E {
        self.members[i].values[mask]
    }
}

fn butterfly<E: Copy>(values: &mut [E], n: usize, mut step: impl FnMut(E, E) -> E) {
    for bit in 0..n {
        let b = 1usize << bit;
        for mask in 0..values.len() {
            if mask & b != 0 {
                values[mask] = step(values[mask], values[mask ^ b]);
            }
        }
    }
}

/// `(f zeta)(T) = sum over S subset of T of f(S)`, with exactly `n 2^(n-1)` additions.
pub fn zeta_transform<R: Ring>(ring: &R, f: &SetFunction<R::Elem>) -> SetFunction<R::Elem> {
    let mut out = f.clone();
    zeta_in_place(ring, &mut out.values, f.n);
    out
}

pub(crate) fn zeta_in_place<R: Ring>(ring: &R, values: &mut [R::Elem], n: usize) {
    butterfly(values, n, |hi, lo| ring.add(hi, lo));
}

/// Inverse of [`zeta_transform`] on the subset lattice.
pub fn moebius_transform<R: Ring>(ring: &R, g: &SetFunction<R::Elem>) -> SetFunction<R::Elem> {
    let mut out = g.clone();
    moebius_in_place(ring, &mut out.values, g.n);
    out
}

pub(crate) fn moebius_in_place<R: Ring>(ring: &R, values: &mut [R::Elem], n: usize) {
    butterfly(values, n, |hi, lo| ring.sub(hi, lo));
}

fn check_same_n<E>(f: &SetFunction<E>, g: &SetFunction<E>) -> Result<()> {
    if f.n != g.n {
        return Err(Error::DimensionMismatch(format!(
            "convolution of functions over {} and {} elements",
            f.n, g.n
        )));
    }
    Ok(())
}

/// Subset convolution `h(T) = sum over S subset of T of f(S) g(T \ S)`
/// by ranked zeta transforms, `O(2^n n^2)` operations.
pub fn subset_convolution<R: Ring>(
    ring: &R,
    f: &SetFunction<R::Elem>,
    g: &SetFunction<R::Elem>,
) -> Result<SetFunction<R::Elem>> {
    check_same_n(f, g)?;
    let n = f.n;
    let size = 1usize << n;
    let ranked = |src: &SetFunction<R::Elem>| -> Vec<Vec<R::Elem>> {
        (0..=n)
            .map(|k| {
                let mut slice: Vec<_> = (0..size)
                    .map(|m| if popcount(m) == k { src.values[m] } else { ring.zero() })
                    .collect();
                zeta_in_place(ring, &mut slice, n);
                slice
            })
            .collect()
    };
    let fr = ranked(f);
    let gr = ranked(g);

    let mut out = vec![ring.zero(); size];
    let mut acc = vec![ring.zero(); size];
    for k in 0..=n {
        for (m, slot) in acc.iter_mut().enumerate() {
            let mut s = ring.mul(fr[0][m], gr[k][m]);
            for j in 1..=k {
                s = ring.add(s, ring.mul(fr[j][m], gr[k - j][m]));
            }
            *slot = s;
        }
        moebius_in_place(ring, &mut acc, n);
        for (m, v) in out.iter_mut().enumerate() {
            if popcount(m) == k {
                *v = acc[m];
            }
        }
    }
    SetFunction::new(n, out)
}

/// Direct `3^n` subset convolution, kept as the reference implementation.
pub fn subset_convolution_naive<R: Ring>(
    ring: &R,
    f: &SetFunction<R::Elem>,
    g: &SetFunction<R::Elem>,
) -> Result<SetFunction<R::Elem>> {
    check_same_n(f, g)?;
    SetFunction::from_fn(f.n, |t| {
        submasks(t).fold(ring.zero(), |acc, s| ring.add(acc, ring.mul(f.values[s], g.values[t ^ s])))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{counting_wrap, Float64, PrimeField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_fn(ring: &PrimeField, n: usize, seed: u64) -> SetFunction<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SetFunction::from_fn(n, |_| ring.random(&mut rng)).unwrap()
    }

    #[test]
    fn zeta_small_example() {
        let f = SetFunction::new(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let z = zeta_transform(&Float64, &f);
        assert_eq!(z.values(), &[1.0, 3.0, 4.0, 10.0]);
        assert_eq!(moebius_transform(&Float64, &z).values(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn zeta_empty_ground_set_and_zero() {
        let f = SetFunction::new(0, vec![7u64]).unwrap();
        let ring = PrimeField::default();
        assert_eq!(zeta_transform(&ring, &f).values(), &[7]);
        assert_eq!(moebius_transform(&ring, &f).values(), &[7]);
        let z = SetFunction::constant(5, 0u64).unwrap();
        assert!(zeta_transform(&ring, &z).values().iter().all(|&v| v == 0));
    }

    #[test]
    fn zeta_matches_direct_sum() {
        let ring = PrimeField::default();
        let f = random_fn(&ring, 7, 11);
        let z = zeta_transform(&ring, &f);
        for t in 0..1usize << 7 {
            let direct = submasks(t).fold(0, |acc, s| ring.add(acc, f.get(s)));
            assert_eq!(z.get(t), direct);
        }
    }

    #[test]
    fn moebius_inverts_zeta() {
        let ring = PrimeField::default();
        for seed in 0..5 {
            let f = random_fn(&ring, 10, seed);
            assert_eq!(moebius_transform(&ring, &zeta_transform(&ring, &f)), f);
        }
    }

    #[test]
    fn zeta_addition_count() {
        let ring = counting_wrap(PrimeField::default());
        for n in 0..=10 {
            ring.reset();
            let f = SetFunction::constant(n, 1u64).unwrap();
            let _ = zeta_transform(&ring, &f);
            let expected = if n == 0 { 0 } else { n as u64 * (1 << (n - 1)) };
            assert_eq!(ring.counts().adds, expected);
            assert_eq!(ring.counts().muls, 0);
            ring.reset();
            let _ = moebius_transform(&ring, &f);
            assert_eq!(ring.counts().adds, expected);
        }
    }

    #[test]
    fn convolution_by_hand_n1() {
        let ring = PrimeField::default();
        let f = SetFunction::new(1, vec![2, 3]).unwrap();
        let g = SetFunction::new(1, vec![5, 7]).unwrap();
        let h = subset_convolution(&ring, &f, &g).unwrap();
        assert_eq!(h.values(), &[10, 2 * 7 + 3 * 5]);
    }

    #[test]
    fn convolution_identity() {
        let ring = PrimeField::default();
        let g = random_fn(&ring, 6, 4);
        let delta = SetFunction::from_fn(6, |m| u64::from(m == 0)).unwrap();
        assert_eq!(subset_convolution(&ring, &delta, &g).unwrap(), g);
    }

    #[test]
    fn ranked_matches_naive() {
        let ring = PrimeField::default();
        for n in 0..=9 {
            let f = random_fn(&ring, n, 100 + n as u64);
            let g = random_fn(&ring, n, 200 + n as u64);
            assert_eq!(
                subset_convolution(&ring, &f, &g).unwrap(),
                subset_convolution_naive(&ring, &f, &g).unwrap(),
                "n={n}"
            );
        }
    }

    #[test]
    fn convolution_dimension_mismatch() {
        let ring = PrimeField::default();
        let f = SetFunction::constant(2, 1u64).unwrap();
        let g = SetFunction::constant(3, 1u64).unwrap();
        assert!(matches!(subset_convolution(&ring, &f, &g), Err(Error::DimensionMismatch(_))));
        assert!(subset_convolution_naive(&ring, &f, &g).is_err());
    }

    #[test]
    fn constructor_validation() {
        assert!(SetFunction::new(2, vec![0u64; 3]).is_err());
        assert!(SetFunction::constant(25, 0u64).is_err());
        let f = SetFunction::constant(2, 0u64).unwrap();
        assert!(Family::new(2, vec![f.clone()]).is_err());
        assert!(Family::new(3, vec![f.clone(), f.clone(), f]).is_err());
    }
}
