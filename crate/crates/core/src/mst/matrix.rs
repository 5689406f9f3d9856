use std::fmt;
use std::str::FromStr;

use super::{product_over, GroundSplit};
use crate::error::Error;
use crate::ring::Ring;
use crate::setfn::Family;

/// Side length at or below which the Strassen backend multiplies classically.
pub const DEFAULT_STRASSEN_BASE: usize = 64;

/// Which half of the ground set a matrix `F_p` is indexed by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    First,
    Second,
}

/// An explicitly materialized block of `F_p`: rows are subsets of `U_p`,
/// columns are subsets of `U`, entries are stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SubMatrix<E> {
    pub part_mask: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub entries: Vec<E>,
}

impl<E: Copy> SubMatrix<E> {
    #[inline]
    pub fn at(&self, r: usize, c: usize) -> E {
        self.entries[r * self.cols.len() + c]
    }

    /// Entries whose Iverson bracket `[S ∩ U_p ⊆ T_p]` holds.
    pub fn structural_nonzeros(&self) -> usize {
        self.rows
            .iter()
            .map(|&t| self.cols.iter().filter(|&&s| s & self.part_mask & !t == 0).count())
            .sum()
    }
}

/// Materialize the block of `F_p` on the given rows and columns.
pub fn build_submatrix<R: Ring>(
    ring: &R,
    fam: &Family<R::Elem>,
    split: &GroundSplit,
    part: Part,
    rows: &[usize],
    cols: &[usize],
) -> SubMatrix<R::Elem> {
    let part_mask = split.mask(part);
    let mut entries = Vec::with_capacity(rows.len() * cols.len());
    for &t in rows {
        debug_assert_eq!(t & !part_mask, 0, "row {t:#b} is not a subset of U_p");
        for &s in cols {
            entries.push(if s & part_mask & !t != 0 {
                ring.zero()
            } else {
                product_over(ring, fam, t, s)
            });
        }
    }
    SubMatrix { part_mask, rows: rows.to_vec(), cols: cols.to_vec(), entries }
}

/// Dense product backend for `E1 E2^T`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    #[default]
    Classical,
    /// Strassen recursion on zero-padded power-of-two square tiles.
    Strassen { base: usize },
}

impl Backend {
    pub fn strassen() -> Self {
        Backend::Strassen { base: DEFAULT_STRASSEN_BASE }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Backend::Classical => "classical",
            Backend::Strassen { .. } => "strassen",
        }
    }

    /// `out[r1][r2] = sum over c of a[r1][c] b[r2][c]`, row-major `a.rows x b.rows`.
    pub fn multiply<R: Ring>(&self, ring: &R, a: &SubMatrix<R::Elem>, b: &SubMatrix<R::Elem>) -> Vec<R::Elem> {
        assert_eq!(a.cols.len(), b.cols.len(), "factors must share their column set");
        match *self {
            Backend::Classical => classical(ring, a, b),
            Backend::Strassen { base } => strassen_tiled(ring, a, b, base.max(1)),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "classical" => Ok(Backend::Classical),
            "strassen" => Ok(Backend::strassen()),
            _ => Err(Error::Invalid(format!("unknown backend '{s}' (expected classical or strassen)"))),
        }
    }
}

fn classical<R: Ring>(ring: &R, a: &SubMatrix<R::Elem>, b: &SubMatrix<R::Elem>) -> Vec<R::Elem> {
    let inner = a.cols.len();
    let mut out = Vec::with_capacity(a.rows.len() * b.rows.len());
    for r1 in 0..a.rows.len() {
        let arow = &a.entries[r1 * inner..(r1 + 1) * inner];
        for r2 in 0..b.rows.len() {
            let brow = &b.entries[r2 * inner..(r2 + 1) * inner];
            let mut pairs = arow.iter().zip(brow);
            let v = match pairs.next() {
                None => ring.zero(),
                Some((&x, &y)) => pairs.fold(ring.mul(x, y), |acc, (&x, &y)| ring.add(acc, ring.mul(x, y))),
            };
            out.push(v);
        }
    }
    out
}

fn strassen_tiled<R: Ring>(ring: &R, a: &SubMatrix<R::Elem>, b: &SubMatrix<R::Elem>, base: usize) -> Vec<R::Elem> {
    let (r1, inner, r2) = (a.rows.len(), a.cols.len(), b.rows.len());
    let mut out = vec![ring.zero(); r1 * r2];
    if r1 == 0 || r2 == 0 || inner == 0 {
        return out;
    }
    // square tiles sized by the smallest dimension; the product is a sum over inner tiles
    let d = r1.min(inner).min(r2).next_power_of_two();
    let zero = ring.zero();
    for i0 in (0..r1).step_by(d) {
        for j0 in (0..r2).step_by(d) {
            for k0 in (0..inner).step_by(d) {
                let mut at = vec![zero; d * d];
                let mut bt = vec![zero; d * d];
                for i in 0..d.min(r1 - i0) {
                    for k in 0..d.min(inner - k0) {
                        at[i * d + k] = a.entries[(i0 + i) * inner + k0 + k];
                    }
                }
                for j in 0..d.min(r2 - j0) {
                    for k in 0..d.min(inner - k0) {
                        bt[k * d + j] = b.entries[(j0 + j) * inner + k0 + k];
                    }
                }
                let p = strassen_square(ring, &at, &bt, d, base);
                for i in 0..d.min(r1 - i0) {
                    for j in 0..d.min(r2 - j0) {
                        ring.add_assign(&mut out[(i0 + i) * r2 + j0 + j], p[i * d + j]);
                    }
                }
            }
        }
    }
    out
}

fn square_classical<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem], d: usize) -> Vec<R::Elem> {
    let mut out = vec![ring.zero(); d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = ring.mul(a[i * d], b[j]);
            for k in 1..d {
                acc = ring.add(acc, ring.mul(a[i * d + k], b[k * d + j]));
            }
            out[i * d + j] = acc;
        }
    }
    out
}

fn quadrant<E: Copy>(m: &[E], d: usize, qi: usize, qj: usize) -> Vec<E> {
    let h = d / 2;
    let mut q = Vec::with_capacity(h * h);
    for i in 0..h {
        let start = (qi * h + i) * d + qj * h;
        q.extend_from_slice(&m[start..start + h]);
    }
    q
}

fn zip_with<R: Ring>(x: &[R::Elem], y: &[R::Elem], op: impl Fn(R::Elem, R::Elem) -> R::Elem) -> Vec<R::Elem> {
    x.iter().zip(y).map(|(&a, &b)| op(a, b)).collect()
}

fn strassen_square<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem], d: usize, base: usize) -> Vec<R::Elem> {
    if d <= base || d == 1 {
        return square_classical(ring, a, b, d);
    }
    let h = d / 2;
    let add = |x: &[R::Elem], y: &[R::Elem]| zip_with::<R>(x, y, |p, q| ring.add(p, q));
    let sub = |x: &[R::Elem], y: &[R::Elem]| zip_with::<R>(x, y, |p, q| ring.sub(p, q));
    let rec = |x: &[R::Elem], y: &[R::Elem]| strassen_square(ring, x, y, h, base);

    let (a11, a12, a21, a22) = (quadrant(a, d, 0, 0), quadrant(a, d, 0, 1), quadrant(a, d, 1, 0), quadrant(a, d, 1, 1));
    let (b11, b12, b21, b22) = (quadrant(b, d, 0, 0), quadrant(b, d, 0, 1), quadrant(b, d, 1, 0), quadrant(b, d, 1, 1));

    let m1 = rec(&add(&a11, &a22), &add(&b11, &b22));
    let m2 = rec(&add(&a21, &a22), &b11);
    let m3 = rec(&a11, &sub(&b12, &b22));
    let m4 = rec(&a22, &sub(&b21, &b11));
    let m5 = rec(&add(&a11, &a12), &b22);
    let m6 = rec(&sub(&a21, &a11), &add(&b11, &b12));
    let m7 = rec(&sub(&a12, &a22), &add(&b21, &b22));

    let c11 = add(&sub(&add(&m1, &m4), &m5), &m7);
    let c12 = add(&m3, &m5);
    let c21 = add(&m2, &m4);
    let c22 = add(&add(&sub(&m1, &m2), &m3), &m6);

    let mut out = vec![ring.zero(); d * d];
    for i in 0..h {
        for j in 0..h {
            out[i * d + j] = c11[i * h + j];
            out[i * d + h + j] = c12[i * h + j];
            out[(h + i) * d + j] = c21[i * h + j];
            out[(h + i) * d + h + j] = c22[i * h + j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::submasks;
    use crate::ring::{counting_wrap, PrimeField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_family(ring: &PrimeField, n: usize, seed: u64) -> Family<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Family::from_fn(n, |_, _| ring.random(&mut rng)).unwrap()
    }

    fn random_block(ring: &PrimeField, rows: usize, cols: usize, seed: u64) -> SubMatrix<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SubMatrix {
            part_mask: 0,
            rows: (0..rows).collect(),
            cols: (0..cols).collect(),
            entries: (0..rows * cols).map(|_| ring.random(&mut rng)).collect(),
        }
    }

    #[test]
    fn iverson_bracket_zeroes() {
        let ring = PrimeField::default();
        let fam = random_family(&ring, 4, 1);
        let split = GroundSplit::new(4);
        // S ∩ U1 = {0}, not inside T1 = {1}
        let m = build_submatrix(&ring, &fam, &split, Part::First, &[0b10], &[0b0001, 0b0100, 0b0011]);
        assert_eq!(m.at(0, 0), 0);
        assert_eq!(m.at(0, 1), fam.value(1, 0b0100));
        assert_eq!(m.at(0, 2), 0);
    }

    #[test]
    fn empty_row_is_one_on_disjoint_columns() {
        let ring = PrimeField::default();
        let fam = random_family(&ring, 4, 2);
        let split = GroundSplit::new(4);
        let cols: Vec<_> = (0..16).collect();
        let m = build_submatrix(&ring, &fam, &split, Part::Second, &[0], &cols);
        for (c, &s) in cols.iter().enumerate() {
            assert_eq!(m.at(0, c), u64::from(s & split.u2 == 0));
        }
    }

    #[test]
    fn entry_costs_row_size_minus_one_multiplications() {
        let inner = PrimeField::default();
        let fam = random_family(&inner, 6, 3);
        let split = GroundSplit::new(6);
        let ring = counting_wrap(inner);
        let _ = build_submatrix(&ring, &fam, &split, Part::First, &[0b111], &[0b111]);
        assert_eq!(ring.counts().muls, 2);
    }

    #[test]
    fn sparsity_matches_six_to_the_h() {
        let ring = PrimeField::default();
        for n in [2usize, 4, 6, 8] {
            let fam = random_family(&ring, n, n as u64);
            let split = GroundSplit::new(n);
            let cols: Vec<_> = (0..1usize << n).collect();
            for part in [Part::First, Part::Second] {
                let m = build_submatrix(&ring, &fam, &split, part, &split.all_rows(part), &cols);
                let want = 6usize.pow((n / 2) as u32);
                assert_eq!(m.structural_nonzeros(), want);
                assert_eq!(m.entries.iter().filter(|&&v| v != 0).count(), want);
            }
        }
    }

    #[test]
    fn classical_product_counts() {
        let inner = PrimeField::default();
        let a = random_block(&inner, 3, 5, 1);
        let b = random_block(&inner, 4, 5, 2);
        let ring = counting_wrap(inner);
        let p = Backend::Classical.multiply(&ring, &a, &b);
        assert_eq!(ring.counts().muls, 3 * 5 * 4);
        assert_eq!(ring.counts().adds, 3 * 4 * 4);
        for r1 in 0..3 {
            for r2 in 0..4 {
                let want = (0..5).fold(0, |acc, c| inner.add(acc, inner.mul(a.at(r1, c), b.at(r2, c))));
                assert_eq!(p[r1 * 4 + r2], want);
            }
        }
    }

    #[test]
    fn strassen_matches_classical_on_ragged_shapes() {
        let ring = PrimeField::default();
        for (i, &(r1, c, r2)) in [(1, 1, 1), (3, 5, 4), (8, 8, 8), (7, 33, 9), (16, 64, 16), (5, 2, 11), (0, 3, 2), (2, 0, 2)]
            .iter()
            .enumerate()
        {
            let a = random_block(&ring, r1, c, 10 + i as u64);
            let b = random_block(&ring, r2, c, 20 + i as u64);
            let want = Backend::Classical.multiply(&ring, &a, &b);
            for base in [1, 2, 4, 64] {
                assert_eq!(Backend::Strassen { base }.multiply(&ring, &a, &b), want, "{r1}x{c}x{r2} base {base}");
            }
        }
    }

    #[test]
    fn strassen_saves_multiplications() {
        let inner = PrimeField::default();
        let a = random_block(&inner, 16, 16, 5);
        let b = random_block(&inner, 16, 16, 6);
        let ring = counting_wrap(inner);
        let _ = Backend::Strassen { base: 1 }.multiply(&ring, &a, &b);
        assert_eq!(ring.counts().muls, 7u64.pow(4));
    }

    #[test]
    fn full_product_is_the_transform() {
        let ring = PrimeField::default();
        let n = 5;
        let fam = random_family(&ring, n, 9);
        let split = GroundSplit::new(n);
        let cols: Vec<_> = (0..1usize << n).collect();
        let rows1 = split.all_rows(Part::First);
        let rows2 = split.all_rows(Part::Second);
        let e1 = build_submatrix(&ring, &fam, &split, Part::First, &rows1, &cols);
        let e2 = build_submatrix(&ring, &fam, &split, Part::Second, &rows2, &cols);
        let g = Backend::Classical.multiply(&ring, &e1, &e2);
        for (i, &t1) in rows1.iter().enumerate() {
            for (j, &t2) in rows2.iter().enumerate() {
                let t = t1 | t2;
                let want = submasks(t).fold(0, |acc, s| {
                    let p = (0..n).filter(|i| t >> i & 1 == 1).fold(1, |p, i| ring.mul(p, fam.value(i, s)));
                    ring.add(acc, p)
                });
                assert_eq!(g[i * rows2.len() + j], want);
            }
        }
    }
}
