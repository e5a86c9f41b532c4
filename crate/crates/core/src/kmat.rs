//! Dense linear algebra over a finite field.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::GaloisField;

/// A dense `rows x cols` matrix over a [`GaloisField`], row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

/// Reduced row echelon form with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub mat: KMat,
    pub pivots: Vec<usize>,
}

impl KMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        KMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = KMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>], cols: usize) -> Self {
        let mut m = KMat::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            m.data[i * cols..(i + 1) * cols].copy_from_slice(&r[..cols]);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> KMat {
        let mut t = KMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, f: &GaloisField, other: &KMat) -> KMat {
        assert_eq!(self.cols, other.rows, "kmat mul shape");
        let mut out = KMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let cur = out.get(i, j);
                        out.set(i, j, f.add(cur, f.mul(a, b)));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, f: &GaloisField, other: &KMat) -> KMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        KMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, f: &GaloisField, other: &KMat) -> KMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        KMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect(),
        }
    }

    /// Apply a map to every entry.
    pub fn map(&self, g: impl Fn(u32) -> u32) -> KMat {
        KMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| g(x)).collect() }
    }

    pub fn select_rows(&self, idx: &[usize]) -> KMat {
        let mut out = KMat::zeros(idx.len(), self.cols);
        for (r, &i) in idx.iter().enumerate() {
            out.data[r * self.cols..(r + 1) * self.cols].copy_from_slice(self.row(i));
        }
        out
    }

    pub fn vstack(&self, other: &KMat) -> KMat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        KMat { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn rref(&self, f: &GaloisField) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)).expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j);
                m.set(r, j, f.mul(v, inv));
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { mat: m, pivots }
    }

    pub fn rank(&self, f: &GaloisField) -> usize {
        self.rref(f).pivots.len()
    }

    /// Basis of `{x : self * x = 0}` as the rows of the returned matrix.
    pub fn kernel(&self, f: &GaloisField) -> KMat {
        let rr = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !rr.pivots.contains(c)).collect();
        let mut out = KMat::zeros(free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out.set(k, fc, 1);
            for (i, &pc) in rr.pivots.iter().enumerate() {
                out.set(k, pc, f.neg(rr.mat.get(i, fc)));
            }
        }
        out
    }

    /// Basis of `{y : y * self = 0}` as rows.
    pub fn left_kernel(&self, f: &GaloisField) -> KMat {
        self.transpose().kernel(f)
    }

    /// Some `x` with `self * x = b`, if one exists.
    pub fn solve(&self, f: &GaloisField, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = KMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let rr = aug.rref(f);
        if rr.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (i, &pc) in rr.pivots.iter().enumerate() {
            x[pc] = rr.mat.get(i, self.cols);
        }
        Some(x)
    }

    /// Some `X` with `X * self = y` (all matrices), if one exists.
    pub fn solve_left(&self, f: &GaloisField, y: &KMat) -> Option<KMat> {
        let t = self.transpose();
        let mut out = KMat::zeros(y.rows, self.rows);
        for i in 0..y.rows {
            let x = t.solve(f, y.row(i))?;
            out.data[i * self.rows..(i + 1) * self.rows].copy_from_slice(&x);
        }
        Some(out)
    }

    pub fn inverse(&self, f: &GaloisField) -> Option<KMat> {
        if self.rows != self.cols {
            return None;
        }
        self.solve_left(f, &KMat::identity(self.rows)).filter(|_| self.rank(f) == self.rows)
    }

    /// Whether every row of `other` lies in the row space of `self`.
    pub fn row_space_contains(&self, f: &GaloisField, other: &KMat) -> bool {
        self.vstack(other).rank(f) == self.rank(f)
    }
}

/// Incremental row-echelon basis used to test membership and extend spans
/// one vector at a time. Rows are kept reduced on their pivot columns.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        EchelonBasis::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduce `v` against the basis; the remainder is zero iff `v` lies in
    /// the span.
    pub fn reduce(&self, f: &GaloisField, v: &mut [u32]) {
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    if r != 0 {
                        *x = f.sub(*x, f.mul(c, r));
                    }
                }
            }
        }
    }

    pub fn contains(&self, f: &GaloisField, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(f, &mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Add `v` if it is independent; returns whether it was added.
    pub fn insert(&mut self, f: &GaloisField, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(f, &mut w);
        let Some(pc) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(w[pc]).expect("nonzero");
        for x in w.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let c = row[pc];
            if c != 0 {
                for (x, &r) in row.iter_mut().zip(&w) {
                    if r != 0 {
                        *x = f.sub(*x, f.mul(c, r));
                    }
                }
            }
        }
        self.rows.push(w);
        self.pivots.push(pc);
        true
    }
}
