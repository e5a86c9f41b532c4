//! Matrices of truncated series, and the linear algebra over `O` and `K`
//! needed by the module calculus.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kmat::KMat;
use crate::series::{Series, SeriesRing, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Series>,
}

/// How a determinant came out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetKind {
    Nonzero,
    /// The determinant is zero modulo its precision, but the support of the
    /// matrix does not force it to vanish.
    ZeroToPrecision,
    /// Every term of the Leibniz expansion contains an entry that is zero to
    /// precision: the zero pattern alone forces the determinant to vanish.
    StructurallyZero,
}

#[derive(Clone, Debug)]
pub struct Determinant {
    pub value: Series,
    pub kind: DetKind,
}

/// Result of solving `X A = Y`.
#[derive(Clone, Debug)]
pub struct LeftSolution {
    pub x: SeriesMatrix,
    /// Whether every entry of `X` lies in `O`.
    pub integral: Verdict,
}

impl SeriesMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Series>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        SeriesMatrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Series) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        SeriesMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize, prec: i64) -> Self {
        SeriesMatrix { rows, cols, data: vec![Series::zero(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: i64) -> Self {
        if n == 0 {
            return SeriesMatrix { rows: 0, cols: 0, data: Vec::new() };
        }
        Self::scalar(n, &Series::one(prec), prec)
    }

    /// `s * E_n`, with off-diagonal zeros known to `prec`.
    pub fn scalar(n: usize, s: &Series, prec: i64) -> Self {
        SeriesMatrix::from_fn(n, n, |i, j| if i == j { s.clone() } else { Series::zero(prec) })
    }

    /// Lift a residue matrix to `O` (entries constant).
    pub fn lift(m: &KMat, prec: i64) -> Self {
        SeriesMatrix::from_fn(m.rows, m.cols, |i, j| Series::monomial(m.get(i, j), 0, prec))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Series {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Series) {
        self.data[i * self.cols + j] = s;
    }

    pub fn entries(&self) -> &[Series] {
        &self.data
    }

    /// Smallest precision among the entries (`i64::MAX` when empty).
    pub fn min_prec(&self) -> i64 {
        self.data.iter().map(Series::prec).min().unwrap_or(i64::MAX)
    }

    /// Smallest valuation among the entries.
    pub fn min_val(&self) -> i64 {
        self.data.iter().map(Series::val).min().unwrap_or(i64::MAX)
    }

    pub fn is_integral(&self) -> Verdict {
        Verdict::new(self.data.iter().all(Series::is_integral), self.min_prec())
    }

    pub fn is_zero(&self) -> Verdict {
        Verdict::new(self.data.iter().all(Series::is_zero), self.min_prec())
    }

    pub fn truncate(&self, prec: i64) -> Self {
        SeriesMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|s| s.truncate(prec)).collect() }
    }

    pub fn shift(&self, k: i64) -> Self {
        SeriesMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|s| s.shift(k)).collect() }
    }

    pub fn transpose(&self) -> Self {
        SeriesMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn submatrix(&self, rows: core::ops::Range<usize>, cols: core::ops::Range<usize>) -> Self {
        let c0 = cols.start;
        let r0 = rows.start;
        SeriesMatrix::from_fn(rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        SeriesMatrix::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        SeriesMatrix::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn hstack(&self, other: &SeriesMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "hstack rows");
        SeriesMatrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &SeriesMatrix) -> Self {
        assert_eq!(self.cols, other.cols, "vstack cols");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        SeriesMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Block-diagonal sum; off-diagonal zeros get precision `prec`.
    pub fn block_diag(&self, other: &SeriesMatrix, prec: i64) -> Self {
        let (r, c) = (self.rows, self.cols);
        SeriesMatrix::from_fn(r + other.rows, c + other.cols, |i, j| match (i < r, j < c) {
            (true, true) => self.get(i, j).clone(),
            (false, false) => other.get(i - r, j - c).clone(),
            _ => Series::zero(prec),
        })
    }

    /// Residue matrix modulo `pi`; `None` if an entry is not integral or not
    /// known modulo `pi`.
    pub fn residue(&self) -> Option<KMat> {
        let mut m = KMat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).residue()?);
            }
        }
        Some(m)
    }

    /// Whether the zero pattern allows a nonzero determinant (a perfect
    /// matching on the nonzero entries exists).
    pub fn structurally_nonsingular(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let mut match_col: Vec<Option<usize>> = vec![None; n];
        fn augment(m: &SeriesMatrix, i: usize, seen: &mut [bool], mc: &mut [Option<usize>]) -> bool {
            for j in 0..m.cols {
                if m.get(i, j).is_zero() || seen[j] {
                    continue;
                }
                seen[j] = true;
                if mc[j].is_none() || augment(m, mc[j].unwrap_or(0), seen, mc) {
                    mc[j] = Some(i);
                    return true;
                }
            }
            false
        }
        (0..n).all(|i| {
            let mut seen = vec![false; n];
            augment(self, i, &mut seen, &mut match_col)
        })
    }
}

impl SeriesRing {
    fn check_same_shape(a: &SeriesMatrix, b: &SeriesMatrix) {
        assert_eq!((a.rows, a.cols), (b.rows, b.cols), "matrix shapes differ");
    }

    pub fn mat_add(&self, a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
        Self::check_same_shape(a, b);
        SeriesMatrix {
            rows: a.rows,
            cols: a.cols,
            data: a.data.iter().zip(&b.data).map(|(x, y)| self.add(x, y)).collect(),
        }
    }

    pub fn mat_sub(&self, a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
        Self::check_same_shape(a, b);
        SeriesMatrix {
            rows: a.rows,
            cols: a.cols,
            data: a.data.iter().zip(&b.data).map(|(x, y)| self.sub(x, y)).collect(),
        }
    }

    pub fn mat_neg(&self, a: &SeriesMatrix) -> SeriesMatrix {
        SeriesMatrix { rows: a.rows, cols: a.cols, data: a.data.iter().map(|x| self.neg(x)).collect() }
    }

    pub fn mat_mul(&self, a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!(a.cols, b.rows, "matrix product shapes");
        let mut out = Vec::with_capacity(a.rows * b.cols);
        for i in 0..a.rows {
            for j in 0..b.cols {
                let mut acc: Option<Series> = None;
                for k in 0..a.cols {
                    let t = self.mul(a.get(i, k), b.get(k, j));
                    acc = Some(match acc {
                        None => t,
                        Some(s) => self.add(&s, &t),
                    });
                }
                // An empty sum is an exact zero; report it at a large precision.
                out.push(acc.unwrap_or_else(|| Series::zero(i64::MAX / 4)));
            }
        }
        SeriesMatrix { rows: a.rows, cols: b.cols, data: out }
    }

    /// Multiply every entry by the series `s`.
    pub fn mat_scale(&self, a: &SeriesMatrix, s: &Series) -> SeriesMatrix {
        SeriesMatrix { rows: a.rows, cols: a.cols, data: a.data.iter().map(|x| self.mul(x, s)).collect() }
    }

    /// Entrywise `sigma`.
    pub fn mat_sigma(&self, a: &SeriesMatrix) -> SeriesMatrix {
        SeriesMatrix { rows: a.rows, cols: a.cols, data: a.data.iter().map(|x| self.sigma(x)).collect() }
    }

    pub fn mat_pow(&self, a: &SeriesMatrix, e: u32) -> SeriesMatrix {
        assert!(a.is_square());
        if e == 0 {
            return SeriesMatrix::identity(a.rows, a.min_prec().max(1));
        }
        let mut out = a.clone();
        for _ in 1..e {
            out = self.mat_mul(&out, a);
        }
        out
    }

    /// Entrywise equality as far as the entries are known.
    pub fn mat_eq(&self, a: &SeriesMatrix, b: &SeriesMatrix) -> Verdict {
        self.mat_sub(a, b).is_zero()
    }

    /// Determinant by elimination with minimal-valuation pivots.
    pub fn det(&self, a: &SeriesMatrix) -> Determinant {
        assert!(a.is_square(), "det of non-square matrix");
        let n = a.rows;
        if n == 0 {
            return Determinant { value: Series::one(1), kind: DetKind::Nonzero };
        }
        let structural = a.structurally_nonsingular();
        let mut m = a.clone();
        let mut det: Option<Series> = None;
        let mut negate = false;
        for k in 0..n {
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    let e = m.get(i, j);
                    if e.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| e.val() < m.get(bi, bj).val()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                // Remaining block is zero to precision.
                let mut block_prec = i64::MAX;
                for i in k..n {
                    for j in k..n {
                        block_prec = block_prec.min(m.get(i, j).prec());
                    }
                }
                let lower = (n - k) as i64 * block_prec;
                let prec = match &det {
                    None => lower,
                    Some(d) => d.val() + lower,
                };
                let kind = if structural { DetKind::ZeroToPrecision } else { DetKind::StructurallyZero };
                return Determinant { value: Series::zero(prec), kind };
            };
            if pi != k {
                for j in 0..n {
                    m.data.swap(pi * n + j, k * n + j);
                }
                negate = !negate;
            }
            if pj != k {
                for i in 0..n {
                    m.data.swap(i * n + pj, i * n + k);
                }
                negate = !negate;
            }
            let pivot = m.get(k, k).clone();
            det = Some(match det {
                None => pivot.clone(),
                Some(d) => self.mul(&d, &pivot),
            });
            let pinv = self.inv(&pivot).expect("pivot is nonzero");
            for i in (k + 1)..n {
                if m.get(i, k).is_zero() {
                    continue;
                }
                let factor = self.mul(m.get(i, k), &pinv);
                for j in k..n {
                    let v = self.sub(m.get(i, j), &self.mul(&factor, m.get(k, j)));
                    m.set(i, j, v);
                }
            }
        }
        let mut value = det.expect("n > 0");
        if negate {
            value = self.neg(&value);
        }
        let kind = if value.is_zero() {
            if structural {
                DetKind::ZeroToPrecision
            } else {
                DetKind::StructurallyZero
            }
        } else {
            DetKind::Nonzero
        };
        Determinant { value, kind }
    }

    /// Inverse over `K` by Gauss-Jordan elimination with minimal-valuation
    /// pivots in each column.
    pub fn inverse(&self, a: &SeriesMatrix) -> Result<SeriesMatrix> {
        if !a.is_square() {
            return Err(Error::Shape(format!("inverse of {}x{} matrix", a.rows, a.cols)));
        }
        let n = a.rows;
        let prec = a.min_prec().max(1);
        let mut m = a.clone();
        let mut inv = SeriesMatrix::identity(n, prec);
        for k in 0..n {
            let p = (k..n)
                .filter(|&i| !m.get(i, k).is_zero())
                .min_by_key(|&i| m.get(i, k).val())
                .ok_or(Error::ZeroToPrecision(prec))?;
            if p != k {
                for j in 0..n {
                    m.data.swap(p * n + j, k * n + j);
                    inv.data.swap(p * n + j, k * n + j);
                }
            }
            let pinv = self.inv(m.get(k, k))?;
            for j in 0..n {
                let v = self.mul(m.get(k, j), &pinv);
                m.set(k, j, v);
                let w = self.mul(inv.get(k, j), &pinv);
                inv.set(k, j, w);
            }
            for i in 0..n {
                if i == k || m.get(i, k).is_zero() {
                    continue;
                }
                let factor = m.get(i, k).clone();
                for j in 0..n {
                    let v = self.sub(m.get(i, j), &self.mul(&factor, m.get(k, j)));
                    m.set(i, j, v);
                    let w = self.sub(inv.get(i, j), &self.mul(&factor, inv.get(k, j)));
                    inv.set(i, j, w);
                }
            }
        }
        Ok(inv)
    }

    /// Solve `X A = Y` over `K` and report whether `X` is integral.
    pub fn solve_left(&self, a: &SeriesMatrix, y: &SeriesMatrix) -> Result<LeftSolution> {
        if !a.is_square() || y.cols != a.rows {
            return Err(Error::Shape(format!(
                "solve X*A = Y with A {}x{}, Y {}x{}",
                a.rows, a.cols, y.rows, y.cols
            )));
        }
        let inv = self.inverse(a)?;
        let x = self.mat_mul(y, &inv);
        let integral = x.is_integral();
        Ok(LeftSolution { x, integral })
    }

    /// Rank of the residue matrix.
    pub fn residue_rank(&self, a: &SeriesMatrix) -> Option<usize> {
        Some(a.residue()?.rank(self.field()))
    }

    /// An `r x n` matrix over `O` is a pure embedding (rows extend to a basis
    /// of `O^n`) iff its residue matrix has rank `r`.
    pub fn is_pure(&self, a: &SeriesMatrix) -> Verdict {
        let r = self.residue_rank(a);
        Verdict::new(r == Some(a.rows) && a.is_integral().holds, 1.min(a.min_prec()))
    }

    /// An `n x r` matrix over `O` defines a surjection `O^n -> O^r` (row
    /// convention) iff its residue matrix has rank `r`.
    pub fn is_surjective(&self, a: &SeriesMatrix) -> Verdict {
        let r = self.residue_rank(a);
        Verdict::new(r == Some(a.cols) && a.is_integral().holds, 1.min(a.min_prec()))
    }

    /// Extend the rows of a pure `r x n` matrix to a unimodular `n x n`
    /// matrix by appending standard basis vectors.
    pub fn unimodular_completion(&self, b: &SeriesMatrix, prec: i64) -> Result<SeriesMatrix> {
        let res = b
            .residue()
            .ok_or_else(|| Error::Precondition("rows are not integral".into()))?;
        let rr = res.rref(self.field());
        if rr.pivots.len() != b.rows {
            return Err(Error::Precondition("rows are not pure".into()));
        }
        let mut out = b.clone();
        for c in 0..b.cols {
            if !rr.pivots.contains(&c) {
                let e = SeriesMatrix::from_fn(1, b.cols, |_, j| {
                    if j == c {
                        Series::one(prec)
                    } else {
                        Series::zero(prec)
                    }
                });
                out = out.vstack(&e);
            }
        }
        Ok(out)
    }

    /// Express the rows of `y` in terms of the pure rows `g`: returns `X` with
    /// `X g = y`, together with the verdict that `y` lies in the row span.
    pub fn express_in_rows(&self, g: &SeriesMatrix, y: &SeriesMatrix, prec: i64) -> Result<(SeriesMatrix, Verdict)> {
        let q = self.unimodular_completion(g, prec)?;
        let qi = self.inverse(&q)?;
        let coords = self.mat_mul(y, &qi);
        let x = coords.submatrix(0..y.rows, 0..g.rows);
        let rest = coords.submatrix(0..y.rows, g.rows..g.cols);
        let verdict = rest.is_zero().and(x.is_integral());
        Ok((x, verdict))
    }

    /// Valuations of the elementary divisors, by elimination over `O` with
    /// minimal-valuation pivots. Divisors that are zero to precision are
    /// reported as `None`.
    pub fn elementary_divisors(&self, a: &SeriesMatrix) -> Vec<Option<i64>> {
        let mut m = a.clone();
        let (r, c) = (m.rows, m.cols);
        let mut out = Vec::new();
        for k in 0..r.min(c) {
            let mut best: Option<(usize, usize)> = None;
            for i in k..r {
                for j in k..c {
                    let e = m.get(i, j);
                    if !e.is_zero() && best.is_none_or(|(bi, bj)| e.val() < m.get(bi, bj).val()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                out.extend(core::iter::repeat_n(None, r.min(c) - k));
                break;
            };
            if pi != k {
                for j in 0..c {
                    m.data.swap(pi * c + j, k * c + j);
                }
            }
            if pj != k {
                for i in 0..r {
                    m.data.swap(i * c + pj, i * c + k);
                }
            }
            let pivot = m.get(k, k).clone();
            out.push(Some(pivot.val()));
            let pinv = self.inv(&pivot).expect("nonzero pivot");
            for i in (k + 1)..r {
                if m.get(i, k).is_zero() {
                    continue;
                }
                let factor = self.mul(m.get(i, k), &pinv);
                for j in k..c {
                    let v = self.sub(m.get(i, j), &self.mul(&factor, m.get(k, j)));
                    m.set(i, j, v);
                }
            }
            for j in (k + 1)..c {
                if m.get(k, j).is_zero() {
                    continue;
                }
                let factor = self.mul(m.get(k, j), &pinv);
                for i in k..r {
                    let v = self.sub(m.get(i, j), &self.mul(&factor, m.get(i, k)));
                    m.set(i, j, v);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaloisField;
    use proptest::prelude::*;

    fn ring3() -> SeriesRing {
        SeriesRing::new(GaloisField::new(3, 1).unwrap(), 3).unwrap()
    }

    fn m(r: &SeriesRing, rows: &[&[&[(i64, u32)]]], prec: i64) -> SeriesMatrix {
        let n = rows.len();
        let c = rows[0].len();
        SeriesMatrix::from_fn(n, c, |i, j| Series::from_terms(r.field(), rows[i][j], prec).unwrap())
    }

    #[test]
    fn det_of_antidiagonal() {
        let r = ring3();
        let a = m(&r, &[&[&[], &[(0, 1)]], &[&[(1, 1)], &[]]], 10);
        let d = r.det(&a);
        assert_eq!(d.kind, DetKind::Nonzero);
        assert_eq!(d.value.terms().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn det_of_identity() {
        let r = ring3();
        let d = r.det(&SeriesMatrix::identity(3, 10));
        assert!(r.eq_to_prec(&d.value, &Series::one(10)).holds);
    }

    #[test]
    fn det_by_cofactors() {
        let r = ring3();
        let a = m(&r, &[&[&[(0, 1)], &[(1, 1)]], &[&[(1, 1)], &[(0, 1)]]], 10);
        let d = r.det(&a);
        // 1 - pi^2
        assert_eq!(d.value.terms().collect::<Vec<_>>(), vec![(0, 1), (2, 2)]);
    }

    #[test]
    fn structural_zero_is_distinguished() {
        let r = ring3();
        let a = m(&r, &[&[&[(0, 1)], &[(0, 1)]], &[&[], &[]]], 10);
        assert_eq!(r.det(&a).kind, DetKind::StructurallyZero);
        let b = m(&r, &[&[&[(0, 1)], &[(0, 1)]], &[&[(0, 1)], &[(0, 1)]]], 10);
        assert_eq!(r.det(&b).kind, DetKind::ZeroToPrecision);
    }

    #[test]
    fn scalar_left_solves() {
        let r = ring3();
        let y = m(&r, &[&[&[(1, 2)]]], 10);
        let s = r.solve_left(&m(&r, &[&[&[(1, 1)]]], 10), &y).unwrap();
        assert!(s.integral.holds);
        assert_eq!(s.x.get(0, 0).terms().collect::<Vec<_>>(), vec![(0, 2)]);
        let s = r.solve_left(&m(&r, &[&[&[(3, 1)]]], 10), &y).unwrap();
        assert!(!s.integral.holds);
        assert_eq!(s.x.get(0, 0).val(), -2);
        let s = r.solve_left(&SeriesMatrix::identity(1, 10), &y).unwrap();
        assert!(r.mat_eq(&s.x, &y).holds);
    }

    #[test]
    fn purity_via_residue_rank() {
        let r = ring3();
        let pure = m(&r, &[&[&[(0, 1)], &[(1, 1)], &[]]], 10);
        let not_pure = m(&r, &[&[&[(1, 1)], &[(1, 1)], &[]]], 10);
        assert!(r.is_pure(&pure).holds);
        assert!(!r.is_pure(&not_pure).holds);
        let q = r.unimodular_completion(&pure, 10).unwrap();
        assert!(r.det(&q).value.is_unit());
    }

    fn arb_matrix(n: usize, len: usize) -> impl Strategy<Value = Vec<Vec<u32>>> {
        proptest::collection::vec(proptest::collection::vec(0u32..3, len), n * n)
    }

    fn build(n: usize, prec: i64, data: &[Vec<u32>]) -> SeriesMatrix {
        let f = GaloisField::new(3, 1).unwrap();
        SeriesMatrix::from_fn(n, n, |i, j| {
            let cs = &data[i * n + j];
            let terms: Vec<(i64, u32)> = cs.iter().enumerate().map(|(k, &c)| (k as i64, c)).collect();
            Series::from_terms(&f, &terms, prec).unwrap()
        })
    }

    proptest! {
        #[test]
        fn solve_left_recovers_x(xd in arb_matrix(2, 6), ad in arb_matrix(2, 6)) {
            let r = ring3();
            let x = build(2, 6, &xd);
            let a = build(2, 6, &ad);
            prop_assume!(r.det(&a).value.is_unit());
            let y = r.mat_mul(&x, &a);
            let s = r.solve_left(&a, &y).unwrap();
            prop_assert!(s.integral.holds);
            prop_assert!(r.mat_eq(&s.x, &x).holds);
        }

        #[test]
        fn det_is_multiplicative(ad in arb_matrix(3, 5), bd in arb_matrix(3, 5)) {
            let r = ring3();
            let a = build(3, 5, &ad);
            let b = build(3, 5, &bd);
            let lhs = r.det(&r.mat_mul(&a, &b)).value;
            let rhs = r.mul(&r.det(&a).value, &r.det(&b).value);
            prop_assert!(r.eq_to_prec(&lhs, &rhs).holds);
        }

        #[test]
        fn det_precision_is_sound(ad in arb_matrix(2, 8)) {
            let r = ring3();
            let hi = build(2, 8, &ad);
            let lo = hi.truncate(5);
            let dh = r.det(&hi).value;
            let dl = r.det(&lo).value;
            prop_assert!(r.eq_to_prec(&dh, &dl).holds);
        }
    }
}
