use super::matrix::{build_submatrix, Backend, Part};
use super::{product_over, GroundSplit, PartialResult, ProductShape, Trace, Transform};
use crate::bits::{full_mask, popcount, supersets};
use crate::error::{check_open, Error, Result};
use crate::ring::Ring;
use crate::setfn::Family;

/// `floor(x * m)`, tolerant of representation error just below an integer.
pub fn size_threshold(x: f64, m: usize) -> usize {
    (x * m as f64 + 1e-9).floor() as usize
}

/// Multiply the `rows1 x cols` block of `F1` with the `rows2 x cols` block of
/// `F2` and add the product into `g[T1 | T2]`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn accumulate_rmm<R: Ring>(
    ring: &R,
    fam: &Family<R::Elem>,
    split: &GroundSplit,
    rows1: &[usize],
    cols: &[usize],
    rows2: &[usize],
    backend: Backend,
    g: &mut [R::Elem],
    trace: &mut Trace,
) {
    if rows1.is_empty() || rows2.is_empty() || cols.is_empty() {
        return;
    }
    let e1 = build_submatrix(ring, fam, split, Part::First, rows1, cols);
    let e2 = build_submatrix(ring, fam, split, Part::Second, rows2, cols);
    let product = backend.multiply(ring, &e1, &e2);
    for (i, &t1) in rows1.iter().enumerate() {
        for (j, &t2) in rows2.iter().enumerate() {
            ring.add_assign(&mut g[t1 | t2], product[i * rows2.len() + j]);
        }
    }
    trace.products.push(ProductShape { rows1: rows1.len(), inner: cols.len(), rows2: rows2.len() });
    trace.columns_processed += cols.len() as u64;
}

/// Add `prod over i in T of f_i(S)` into `g[T]` for every accepted `T ⊇ S`.
fn accumulate_direct<R: Ring>(
    ring: &R,
    fam: &Family<R::Elem>,
    s: usize,
    mut accept: impl FnMut(usize) -> bool,
    g: &mut [R::Elem],
    trace: &mut Trace,
) {
    for t in supersets(s, full_mask(fam.n())) {
        if accept(t) {
            // S ⊆ T, so both Iverson brackets hold and F1(T1,S) F2(T2,S) is the full product
            ring.add_assign(&mut g[t], product_over(ring, fam, t, s));
            trace.pair_iterations += 1;
        }
    }
}

/// `G[T1 ∪ T2] = sum over S in columns of F1(T1, S) F2(T2, S)` for the given rows.
pub fn fast_rmm<R: Ring>(
    ring: &R,
    fam: &Family<R::Elem>,
    split: &GroundSplit,
    rows1: &[usize],
    columns: &[usize],
    rows2: &[usize],
    backend: Backend,
) -> PartialResult<R::Elem> {
    let mut out = PartialResult::zeros(ring, fam.n());
    accumulate_rmm(ring, fam, split, rows1, columns, rows2, backend, &mut out.g, &mut out.trace);
    out
}

/// Brute-force contribution of the given columns: one term per pair `S ⊆ T`.
pub fn columns_directly<R: Ring>(ring: &R, fam: &Family<R::Elem>, columns: &[usize]) -> PartialResult<R::Elem> {
    let mut out = PartialResult::zeros(ring, fam.n());
    for &s in columns {
        accumulate_direct(ring, fam, s, |_| true, &mut out.g, &mut out.trace);
    }
    out
}

/// Rows with `|T_p| > floor(tau h)` go to the backend; every other pair
/// `S ⊆ T` with `S` in `columns` is accumulated directly.
pub fn rows_trimmed<R: Ring>(
    ring: &R,
    fam: &Family<R::Elem>,
    split: &GroundSplit,
    tau: f64,
    columns: &[usize],
    backend: Backend,
) -> Result<PartialResult<R::Elem>> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::OutOfRange { name: "tau", value: tau, range: "[0, 1)" });
    }
    let cut = size_threshold(tau, split.h);
    let keep = |part: Part| -> Vec<usize> {
        split.all_rows(part).into_iter().filter(|&t| popcount(t) > cut).collect()
    };
    let (rows1, rows2) = (keep(Part::First), keep(Part::Second));

    let mut out = PartialResult::zeros(ring, fam.n());
    for &s in columns {
        let accept = |t: usize| popcount(t & split.u1) <= cut || popcount(t & split.u2) <= cut;
        accumulate_direct(ring, fam, s, accept, &mut out.g, &mut out.trace);
    }
    accumulate_rmm(ring, fam, split, &rows1, columns, &rows2, backend, &mut out.g, &mut out.trace);
    Ok(out)
}

/// Split the columns at `|S| <= floor(sigma n)`.
fn split_columns(n: usize, sigma: f64) -> (Vec<usize>, Vec<usize>) {
    let cut = size_threshold(sigma, n);
    (0..1usize << n).partition(|&s| popcount(s) <= cut)
}

/// Small columns through the backend, large columns directly.
pub fn mst_columns<R: Ring>(
    ring: &R,
    fam: &Family<R::Elem>,
    sigma: f64,
    backend: Backend,
) -> Result<Transform<R::Elem>> {
    check_open("sigma", sigma, 1.0 / 3.0, 0.5, "(1/3, 1/2)")?;
    let n = fam.n();
    let split = GroundSplit::new(n);
    let (small, large) = split_columns(n, sigma);
    let mut g = fast_rmm(
        ring,
        fam,
        &split,
        &split.all_rows(Part::First),
        &small,
        &split.all_rows(Part::Second),
        backend,
    );
    g.absorb(ring, columns_directly(ring, fam, &large));
    Transform::from_partial(n, g)
}

/// As [`mst_columns`], but the small columns also trim short rows out of the product.
pub fn mst_rows_columns<R: Ring>(
    ring: &R,
    fam: &Family<R::Elem>,
    sigma: f64,
    tau: f64,
    backend: Backend,
) -> Result<Transform<R::Elem>> {
    check_open("sigma", sigma, 1.0 / 3.0, 0.5, "(1/3, 1/2)")?;
    check_open("tau", tau, 0.5, 2.0 / 3.0, "(1/2, 2/3)")?;
    let n = fam.n();
    let split = GroundSplit::new(n);
    let (small, large) = split_columns(n, sigma);
    let mut g = rows_trimmed(ring, fam, &split, tau, &small, backend)?;
    g.absorb(ring, columns_directly(ring, fam, &large));
    Transform::from_partial(n, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::binomial;
    use crate::mst::mst_naive;
    use crate::ring::PrimeField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_family(ring: &PrimeField, n: usize, seed: u64) -> Family<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Family::from_fn(n, |_, _| ring.random(&mut rng)).unwrap()
    }

    fn all(n: usize) -> Vec<usize> {
        (0..1usize << n).collect()
    }

    #[test]
    fn empty_column_set_contributes_nothing() {
        let ring = PrimeField::default();
        let fam = random_family(&ring, 4, 1);
        let split = GroundSplit::new(4);
        let r = fast_rmm(&ring, &fam, &split, &split.all_rows(Part::First), &[], &split.all_rows(Part::Second), Backend::Classical);
        assert!(r.g.iter().all(|&v| v == 0));
        assert!(r.trace.products.is_empty());
    }

    #[test]
    fn full_rmm_and_full_direct_equal_naive() {
        let ring = PrimeField::default();
        for n in 0..=8 {
            let fam = random_family(&ring, n, 30 + n as u64);
            let split = GroundSplit::new(n);
            let want = mst_naive(&ring, &fam).g.into_values();
            for backend in [Backend::Classical, Backend::Strassen { base: 1 }] {
                let r = fast_rmm(&ring, &fam, &split, &split.all_rows(Part::First), &all(n), &split.all_rows(Part::Second), backend);
                assert_eq!(r.g, want, "rmm n={n}");
            }
            let d = columns_directly(&ring, &fam, &all(n));
            assert_eq!(d.g, want, "direct n={n}");
            assert_eq!(d.trace.pair_iterations, 3u64.pow(n as u32));
        }
    }

    #[test]
    fn full_column_only_updates_full_target() {
        let ring = PrimeField::default();
        let fam = random_family(&ring, 4, 2);
        let r = columns_directly(&ring, &fam, &[0b1111]);
        let want = (0..4).fold(1, |p, i| ring.mul(p, fam.value(i, 0b1111)));
        assert_eq!(r.g[0b1111], want);
        assert!(r.g[..15].iter().all(|&v| v == 0));
    }

    #[test]
    fn direct_iteration_count_matches_closed_form() {
        let ring = PrimeField::default();
        for n in [4usize, 6, 8, 10] {
            let fam = random_family(&ring, n, n as u64);
            let cut = size_threshold(0.3642, n);
            let large: Vec<_> = all(n).into_iter().filter(|&s| popcount(s) > cut).collect();
            let r = columns_directly(&ring, &fam, &large);
            let want: u64 = (cut + 1..=n).map(|s| binomial(n, s) << (n - s)).sum();
            assert_eq!(r.trace.pair_iterations, want);
        }
    }

    #[test]
    fn columns_matches_naive() {
        let ring = PrimeField::default();
        for n in 1..=10 {
            let fam = random_family(&ring, n, 50 + n as u64);
            let want = mst_naive(&ring, &fam).g;
            assert_eq!(mst_columns(&ring, &fam, 0.3642, Backend::Classical).unwrap().g, want, "n={n}");
        }
    }

    #[test]
    fn columns_with_only_the_empty_column_in_the_product() {
        let ring = PrimeField::default();
        let fam = random_family(&ring, 2, 8);
        let t = mst_columns(&ring, &fam, 0.4, Backend::Classical).unwrap();
        assert_eq!(t.trace.products, vec![ProductShape { rows1: 2, inner: 1, rows2: 2 }]);
        assert_eq!(t.g, mst_naive(&ring, &fam).g);
    }

    #[test]
    fn columns_product_shape() {
        let ring = PrimeField::default();
        let fam = random_family(&ring, 10, 3);
        let t = mst_columns(&ring, &fam, 0.3642, Backend::Classical).unwrap();
        let c: usize = (0..=3).map(|s| binomial(10, s) as usize).sum();
        assert_eq!(t.trace.products, vec![ProductShape { rows1: 32, inner: c, rows2: 32 }]);
        assert_eq!(t.trace.classical_product_muls(), 1024 * c as u64);
    }

    #[test]
    fn all_ones_family() {
        let fam = Family::from_fn(6, |_, _| 1u64).unwrap();
        let t = mst_columns(&PrimeField::default(), &fam, 0.4, Backend::Classical).unwrap();
        for (m, &v) in t.g.values().iter().enumerate() {
            assert_eq!(v, 1 << popcount(m));
        }
    }

    #[test]
    fn parameter_ranges_enforced() {
        let ring = PrimeField::default();
        let fam = random_family(&ring, 3, 1);
        assert!(mst_columns(&ring, &fam, 0.3, Backend::Classical).is_err());
        assert!(mst_columns(&ring, &fam, 0.5, Backend::Classical).is_err());
        assert!(mst_rows_columns(&ring, &fam, 0.4, 0.7, Backend::Classical).is_err());
        assert!(mst_rows_columns(&ring, &fam, 0.2, 0.6, Backend::Classical).is_err());
        assert!(rows_trimmed(&ring, &fam, &GroundSplit::new(3), 1.0, &[0], Backend::Classical).is_err());
    }

    #[test]
    fn rows_trimmed_equals_untrimmed_product() {
        let ring = PrimeField::default();
        let n = 10;
        let fam = random_family(&ring, n, 77);
        let split = GroundSplit::new(n);
        let small: Vec<_> = all(n).into_iter().filter(|&s| popcount(s) <= 3).collect();
        let full = fast_rmm(&ring, &fam, &split, &split.all_rows(Part::First), &small, &split.all_rows(Part::Second), Backend::Classical);
        for tau in [0.0, 0.6, 0.8, 0.99] {
            let trimmed = rows_trimmed(&ring, &fam, &split, tau, &small, Backend::Classical).unwrap();
            assert_eq!(trimmed.g, full.g, "tau={tau}");
        }
    }

    #[test]
    fn rows_trimmed_high_tau_keeps_only_full_halves() {
        let ring = PrimeField::default();
        let n = 6;
        let fam = random_family(&ring, n, 5);
        let split = GroundSplit::new(n);
        let r = rows_trimmed(&ring, &fam, &split, 0.7, &all(n), Backend::Classical).unwrap();
        assert_eq!(r.trace.products, vec![ProductShape { rows1: 1, inner: 64, rows2: 1 }]);
        assert_eq!(r.g, mst_naive(&ring, &fam).g.into_values());
    }

    #[test]
    fn rows_trimmed_zero_tau_direct_part_has_an_empty_half() {
        let ring = PrimeField::default();
        let n = 4;
        let fam = random_family(&ring, n, 6);
        let split = GroundSplit::new(n);
        let r = rows_trimmed(&ring, &fam, &split, 0.0, &all(n), Backend::Classical).unwrap();
        // pairs S ⊆ T with T1 = ∅ or T2 = ∅: 2 * 3^2 - 1
        assert_eq!(r.trace.pair_iterations, 17);
        assert_eq!(r.trace.products, vec![ProductShape { rows1: 3, inner: 16, rows2: 3 }]);
    }

    #[test]
    fn rows_columns_matches_naive() {
        let ring = PrimeField::default();
        for n in 1..=10 {
            let fam = random_family(&ring, n, 90 + n as u64);
            let want = mst_naive(&ring, &fam).g;
            let got = mst_rows_columns(&ring, &fam, 0.38185, 0.59777, Backend::Classical).unwrap();
            assert_eq!(got.g, want, "n={n}");
        }
    }

    #[test]
    fn rows_columns_on_zero_family() {
        let fam = Family::from_fn(5, |_, _| 0u64).unwrap();
        let t = mst_rows_columns(&PrimeField::default(), &fam, 0.4, 0.6, Backend::Classical).unwrap();
        assert_eq!(t.g.get(0), 1);
        assert!(t.g.values()[1..].iter().all(|&v| v == 0));
    }
}
