//! The residue Hopf algebra `A = k[X_1..X_n] / (X_s^q - sum_j Cbar_sj X_j)`
//! of a module, its comultiplication, and the primitive elements.
//!
//! The monomials `X^i` with `0 <= i_s < q` form a basis, indexed by
//! `sum_s i_s q^s`. Since every generator is primitive,
//! `Delta(X^i) = sum_{j <= i} prod_s binom(i_s, j_s) X^j (x) X^{i-j}` and no
//! reduction is ever needed in the comultiplication.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::GaloisField;
use crate::kmat::{EchelonBasis, KMat};
use crate::modcat::SigmaModule;

/// Default bound on `q^n`.
pub const DEFAULT_SIZE_CAP: u64 = 4096;

/// An element of `A (x) A`, sparse over pairs of basis indices.
pub type Tensor = BTreeMap<(usize, usize), u32>;

#[derive(Clone, Debug)]
pub struct HopfResidueAlgebra {
    field: Arc<GaloisField>,
    q: u64,
    n0: u32,
    n: usize,
    cbar: KMat,
    dbar: KMat,
    dim: usize,
}

/// Kernel of `delta+` and its `[alpha]`-eigen part, as coordinate rows in
/// the monomial basis.
#[derive(Clone, Debug)]
pub struct Primitives {
    pub kernel: Vec<Vec<u32>>,
    pub eigen: Vec<Vec<u32>>,
    /// Whether the eigen part is exactly the span of `X_1, ..., X_n`.
    pub eigen_is_generators: bool,
    /// Whether `b^{p^t}` (`b` in the eigen part, `t < N0`) spans the kernel.
    pub kernel_from_powers: bool,
}

/// Outcome of recovering the module from the algebra.
#[derive(Clone, Debug)]
pub struct Roundtrip {
    /// Recovered basis `b = W X` of the eigen primitives (rows of `W`).
    pub w: KMat,
    /// Matrix of the `q`-th power map on `b`.
    pub c_rec: KMat,
    /// Matrix of the `[pi0]` endomorphism on `b`.
    pub d_rec: KMat,
    /// `C_rec W = sigma(W) Cbar`.
    pub frobenius_matches: bool,
    /// `D_rec W = W Dbar`.
    pub pi0_matches: bool,
    /// The substitution `X -> Dbar X` kills the defining relations.
    pub pi0_respects_relations: bool,
    pub kernel_dim: usize,
    pub expected_kernel_dim: usize,
}

impl Roundtrip {
    pub fn holds(&self) -> bool {
        self.frobenius_matches
            && self.pi0_matches
            && self.pi0_respects_relations
            && self.kernel_dim == self.expected_kernel_dim
    }
}

fn binom_mod_p(n: u32, k: u32, p: u32) -> u32 {
    // Lucas' theorem, digit by digit.
    let (mut n, mut k) = (n, k);
    let mut out = 1u64;
    while n > 0 || k > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        let mut c = 1u64;
        for i in 0..b {
            c = c * u64::from(a - i) / u64::from(i + 1);
        }
        out = out * (c % u64::from(p)) % u64::from(p);
        n /= p;
        k /= p;
    }
    out as u32
}

/// Build the residue algebra of `M`.
pub fn build_residue_algebra(m: &SigmaModule, cap: u64) -> Result<HopfResidueAlgebra> {
    let base = m.base();
    let n = m.rank();
    let q = base.q();
    let size = q.checked_pow(n as u32).unwrap_or(u64::MAX);
    if size > cap {
        return Err(Error::SizeCap { size, cap });
    }
    let cbar = m.c().residue().ok_or_else(|| Error::Precondition("C is not integral".into()))?;
    let dbar = m.d().residue().ok_or_else(|| Error::Precondition("D is not integral".into()))?;
    HopfResidueAlgebra::from_residue(base.field().clone(), q, base.n0(), cbar, dbar)
}

impl HopfResidueAlgebra {
    pub fn from_residue(field: Arc<GaloisField>, q: u64, n0: u32, cbar: KMat, dbar: KMat) -> Result<Self> {
        let n = cbar.rows;
        if cbar.cols != n || dbar.rows != n || dbar.cols != n {
            return Err(Error::Shape("residue matrices must be square of equal size".into()));
        }
        let dim = q.pow(n as u32) as usize;
        Ok(HopfResidueAlgebra { field, q, n0, n, cbar, dbar, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn exponents(&self, idx: usize) -> Vec<u32> {
        let q = self.q as usize;
        let mut out = Vec::with_capacity(self.n);
        let mut x = idx;
        for _ in 0..self.n {
            out.push((x % q) as u32);
            x /= q;
        }
        out
    }

    pub fn index(&self, exps: &[u32]) -> usize {
        exps.iter().rev().fold(0usize, |acc, &e| acc * self.q as usize + e as usize)
    }

    pub fn basis_vector(&self, idx: usize) -> Vec<u32> {
        let mut v = vec![0u32; self.dim];
        v[idx] = 1;
        v
    }

    /// The generator `X_s`.
    pub fn generator(&self, s: usize) -> Vec<u32> {
        let mut e = vec![0u32; self.n];
        e[s] = 1;
        self.basis_vector(self.index(&e))
    }

    /// Reduce a monomial with arbitrary exponents, accumulating `coeff` times
    /// it into `out`.
    fn add_monomial(&self, exps: &mut Vec<u32>, coeff: u32, out: &mut [u32]) {
        if coeff == 0 {
            return;
        }
        let q = self.q as u32;
        match exps.iter().position(|&e| e >= q) {
            None => {
                let idx = self.index(exps);
                out[idx] = self.field.add(out[idx], coeff);
            }
            Some(s) => {
                exps[s] -= q;
                for j in 0..self.n {
                    let c = self.cbar.get(s, j);
                    if c != 0 {
                        exps[j] += 1;
                        self.add_monomial(exps, self.field.mul(coeff, c), out);
                        exps[j] -= 1;
                    }
                }
                exps[s] += q;
            }
        }
    }

    pub fn mul_basis(&self, a: usize, b: usize) -> Vec<u32> {
        let ea = self.exponents(a);
        let eb = self.exponents(b);
        let mut exps: Vec<u32> = ea.iter().zip(&eb).map(|(x, y)| x + y).collect();
        let mut out = vec![0u32; self.dim];
        self.add_monomial(&mut exps, 1, &mut out);
        out
    }

    pub fn mul(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let f = &*self.field;
        let mut out = vec![0u32; self.dim];
        for (a, &ca) in x.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (b, &cb) in y.iter().enumerate() {
                if cb == 0 {
                    continue;
                }
                let ea = self.exponents(a);
                let eb = self.exponents(b);
                let mut exps: Vec<u32> = ea.iter().zip(&eb).map(|(u, v)| u + v).collect();
                self.add_monomial(&mut exps, f.mul(ca, cb), &mut out);
            }
        }
        out
    }

    pub fn pow(&self, x: &[u32], e: u64) -> Vec<u32> {
        let mut out = self.basis_vector(0);
        for _ in 0..e {
            out = self.mul(&out, x);
        }
        out
    }

    /// `Delta(X^i)`.
    pub fn comul_basis(&self, idx: usize) -> Tensor {
        let p = self.field.characteristic();
        let ei = self.exponents(idx);
        let mut out = Tensor::new();
        let q = self.q as usize;
        let total: usize = ei.iter().map(|&e| e as usize + 1).product();
        for code in 0..total {
            let mut rest = code;
            let mut ej = Vec::with_capacity(self.n);
            for &e in &ei {
                ej.push((rest % (e as usize + 1)) as u32);
                rest /= e as usize + 1;
            }
            let mut c = 1u32;
            for (&i, &j) in ei.iter().zip(&ej) {
                c = self.field.mul(c, binom_mod_p(i, j, p) % p);
            }
            if c == 0 {
                continue;
            }
            let ek: Vec<u32> = ei.iter().zip(&ej).map(|(i, j)| i - j).collect();
            let _ = q;
            out.insert((self.index(&ej), self.index(&ek)), c);
        }
        out
    }

    pub fn comul(&self, x: &[u32]) -> Tensor {
        let f = &*self.field;
        let mut out = Tensor::new();
        for (a, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for ((u, v), d) in self.comul_basis(a) {
                let e = out.entry((u, v)).or_insert(0);
                *e = f.add(*e, f.mul(c, d));
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    /// `delta+(a) = Delta(a) - a (x) 1 - 1 (x) a`.
    pub fn delta_plus(&self, x: &[u32]) -> Tensor {
        let f = &*self.field;
        let mut out = self.comul(x);
        for (a, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for key in [(a, 0usize), (0usize, a)] {
                let e = out.entry(key).or_insert(0);
                *e = f.sub(*e, c);
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    fn tensor_mul(&self, x: &Tensor, y: &Tensor) -> Tensor {
        let f = &*self.field;
        let mut out = Tensor::new();
        for (&(a1, a2), &c1) in x {
            for (&(b1, b2), &c2) in y {
                let l = self.mul_basis(a1, b1);
                let r = self.mul_basis(a2, b2);
                let c = f.mul(c1, c2);
                for (u, &lu) in l.iter().enumerate() {
                    if lu == 0 {
                        continue;
                    }
                    for (v, &rv) in r.iter().enumerate() {
                        if rv == 0 {
                            continue;
                        }
                        let e = out.entry((u, v)).or_insert(0);
                        *e = f.add(*e, f.mul(c, f.mul(lu, rv)));
                    }
                }
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    /// `(Delta (x) id) Delta = (id (x) Delta) Delta` on every basis element.
    pub fn check_coassociative(&self) -> bool {
        let f = &*self.field;
        (0..self.dim).all(|i| {
            let mut left: BTreeMap<(usize, usize, usize), u32> = BTreeMap::new();
            let mut right: BTreeMap<(usize, usize, usize), u32> = BTreeMap::new();
            for ((a, b), c) in self.comul_basis(i) {
                for ((a1, a2), d) in self.comul_basis(a) {
                    let e = left.entry((a1, a2, b)).or_insert(0);
                    *e = f.add(*e, f.mul(c, d));
                }
                for ((b1, b2), d) in self.comul_basis(b) {
                    let e = right.entry((a, b1, b2)).or_insert(0);
                    *e = f.add(*e, f.mul(c, d));
                }
            }
            left.retain(|_, v| *v != 0);
            right.retain(|_, v| *v != 0);
            left == right
        })
    }

    /// `Delta(ab) = Delta(a) Delta(b)` on every pair of basis elements.
    pub fn check_multiplicative(&self) -> bool {
        let deltas: Vec<Tensor> = (0..self.dim).map(|i| self.comul_basis(i)).collect();
        for a in 0..self.dim {
            for b in a..self.dim {
                let lhs = self.comul(&self.mul_basis(a, b));
                let rhs = self.tensor_mul(&deltas[a], &deltas[b]);
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// `(eps (x) id) Delta = id = (id (x) eps) Delta`, with `eps` the
    /// constant term.
    pub fn check_counit(&self) -> bool {
        (0..self.dim).all(|i| {
            let d = self.comul_basis(i);
            d.get(&(0, i)) == Some(&1)
                && d.get(&(i, 0)) == Some(&1)
                && d.keys().filter(|(a, _)| *a == 0).count() == 1
                && d.keys().filter(|(_, b)| *b == 0).count() == 1
        })
    }

    /// Kernel of `delta+`, and its intersection with the `[alpha]`-eigenspace
    /// for a generator `alpha` of `F_q^*` (vacuous when `q = 2`).
    pub fn primitive_subspace(&self) -> Primitives {
        let f = &*self.field;
        let alpha = f.subfield_generator(self.q);
        let width = self.dim * self.dim;
        // Column images of v -> delta+(v) are sparse; eliminate with a
        // dictionary keyed by tensor position.
        let kernel = self.sparse_kernel(width, |i| {
            let mut col: BTreeMap<usize, u32> = BTreeMap::new();
            for ((a, b), c) in self.delta_plus(&self.basis_vector(i)) {
                col.insert(a * self.dim + b, c);
            }
            col
        });
        let eigen = self.sparse_kernel(width + self.dim, |i| {
            let mut col: BTreeMap<usize, u32> = BTreeMap::new();
            for ((a, b), c) in self.delta_plus(&self.basis_vector(i)) {
                col.insert(a * self.dim + b, c);
            }
            let deg: u64 = self.exponents(i).iter().map(|&e| u64::from(e)).sum();
            let c = f.sub(f.pow(alpha, deg), alpha);
            if c != 0 {
                col.insert(width + i, c);
            }
            col
        });
        let mut gens = EchelonBasis::new();
        for s in 0..self.n {
            gens.insert(f, &self.generator(s));
        }
        let mut eig_span = EchelonBasis::new();
        for v in &eigen {
            eig_span.insert(f, v);
        }
        let eigen_is_generators =
            eigen.len() == self.n && eigen.iter().all(|v| gens.contains(f, v));
        let p = u64::from(f.characteristic());
        let mut powers = EchelonBasis::new();
        for v in &eigen {
            let mut cur = v.clone();
            for _ in 0..self.n0 {
                powers.insert(f, &cur);
                cur = self.pow(&cur, p);
            }
        }
        let mut ker_span = EchelonBasis::new();
        for v in &kernel {
            ker_span.insert(f, v);
        }
        let kernel_from_powers =
            powers.len() == kernel.len() && kernel.iter().all(|v| powers.contains(f, v));
        Primitives { kernel, eigen, eigen_is_generators, kernel_from_powers }
    }

    /// Kernel of the linear map whose column `i` is `column(i)`.
    fn sparse_kernel(&self, _width: usize, column: impl Fn(usize) -> BTreeMap<usize, u32>) -> Vec<Vec<u32>> {
        let f = &*self.field;
        // Each stored row: pivot key, reduced column, combination.
        let mut basis: BTreeMap<usize, (BTreeMap<usize, u32>, Vec<u32>)> = BTreeMap::new();
        let mut kernel = Vec::new();
        for i in 0..self.dim {
            let mut col = column(i);
            let mut comb = vec![0u32; self.dim];
            comb[i] = 1;
            loop {
                let Some((&key, &c)) = col.iter().find(|(k, _)| basis.contains_key(k)) else {
                    break;
                };
                let (bcol, bcomb) = &basis[&key];
                for (&k, &v) in bcol {
                    let e = col.entry(k).or_insert(0);
                    *e = f.sub(*e, f.mul(c, v));
                }
                col.retain(|_, v| *v != 0);
                for (x, &y) in comb.iter_mut().zip(bcomb) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
            match col.iter().next().map(|(&k, &v)| (k, v)) {
                None => kernel.push(comb),
                Some((key, lead)) => {
                    let inv = f.inv(lead).expect("nonzero");
                    for v in col.values_mut() {
                        *v = f.mul(*v, inv);
                    }
                    for x in comb.iter_mut() {
                        *x = f.mul(*x, inv);
                    }
                    basis.insert(key, (col, comb));
                }
            }
        }
        kernel
    }

    /// Image of `x` under the algebra endomorphism `X_s -> sum_j Dbar_sj X_j`.
    pub fn apply_pi0(&self, x: &[u32]) -> Vec<u32> {
        let f = &*self.field;
        let images: Vec<Vec<u32>> = (0..self.n)
            .map(|s| {
                let mut v = vec![0u32; self.dim];
                for j in 0..self.n {
                    let c = self.dbar.get(s, j);
                    if c != 0 {
                        let g = self.generator(j);
                        for (a, &b) in v.iter_mut().zip(&g) {
                            *a = f.add(*a, f.mul(c, b));
                        }
                    }
                }
                v
            })
            .collect();
        let mut out = vec![0u32; self.dim];
        for (idx, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut term = self.basis_vector(0);
            for (s, &e) in self.exponents(idx).iter().enumerate() {
                for _ in 0..e {
                    term = self.mul(&term, &images[s]);
                }
            }
            for (a, &b) in out.iter_mut().zip(&term) {
                *a = f.add(*a, f.mul(c, b));
            }
        }
        out
    }

    /// The substitution `X -> Dbar X` sends every relation
    /// `(X_s)^q - sum_j Cbar_sj X_j` (computed as polynomials, before
    /// reduction) to zero in `A`.
    fn pi0_respects_relations(&self) -> bool {
        let f = &*self.field;
        (0..self.n).all(|s| {
            let mut img = vec![0u32; self.dim];
            for j in 0..self.n {
                let c = self.dbar.get(s, j);
                if c != 0 {
                    let g = self.generator(j);
                    for (a, &b) in img.iter_mut().zip(&g) {
                        *a = f.add(*a, f.mul(c, b));
                    }
                }
            }
            let lhs = self.pow(&img, self.q);
            let mut rhs = vec![0u32; self.dim];
            for j in 0..self.n {
                let c = self.cbar.get(s, j);
                if c != 0 {
                    let gj = self.apply_pi0(&self.generator(j));
                    for (a, &b) in rhs.iter_mut().zip(&gj) {
                        *a = f.add(*a, f.mul(c, b));
                    }
                }
            }
            lhs == rhs
        })
    }

    /// Coordinates of the eigen primitives in the generators `X_s`.
    fn generator_coords(&self, v: &[u32]) -> Option<Vec<u32>> {
        let mut out = Vec::with_capacity(self.n);
        let mut rest = v.to_vec();
        for s in 0..self.n {
            let idx = self.index(&{
                let mut e = vec![0u32; self.n];
                e[s] = 1;
                e
            });
            out.push(rest[idx]);
            rest[idx] = 0;
        }
        rest.iter().all(|&x| x == 0).then_some(out)
    }

    /// Recover the module from the primitives and compare.
    pub fn roundtrip(&self) -> Result<Roundtrip> {
        let f = &*self.field;
        let prim = self.primitive_subspace();
        if prim.eigen.len() != self.n {
            return Err(Error::Invalid(format!(
                "eigen primitives have dimension {}, expected {}",
                prim.eigen.len(),
                self.n
            )));
        }
        let rows: Vec<Vec<u32>> = prim
            .eigen
            .iter()
            .map(|v| self.generator_coords(v).ok_or_else(|| Error::Invalid("primitive outside the generator span".into())))
            .collect::<Result<_>>()?;
        let w = KMat::from_rows(&rows, self.n).rref(f).mat;
        let basis: Vec<Vec<u32>> = (0..self.n)
            .map(|i| {
                let mut v = vec![0u32; self.dim];
                for s in 0..self.n {
                    let g = self.generator(s);
                    for (a, &b) in v.iter_mut().zip(&g) {
                        *a = f.add(*a, f.mul(w.get(i, s), b));
                    }
                }
                v
            })
            .collect();
        let powers: Vec<Vec<u32>> = basis.iter().map(|b| self.pow(b, self.q)).collect();
        let pi0s: Vec<Vec<u32>> = basis.iter().map(|b| self.apply_pi0(b)).collect();
        let to_w = |vs: &[Vec<u32>]| -> Result<KMat> {
            let coords: Vec<Vec<u32>> = vs
                .iter()
                .map(|v| self.generator_coords(v).ok_or_else(|| Error::Invalid("image left the primitives".into())))
                .collect::<Result<_>>()?;
            let y = KMat::from_rows(&coords, self.n);
            w.solve_left(f, &y).ok_or_else(|| Error::Invalid("image not in the recovered span".into()))
        };
        let c_rec = to_w(&powers)?;
        let d_rec = to_w(&pi0s)?;
        let sigma_w = w.map(|x| f.pow(x, self.q));
        let frobenius_matches = c_rec.mul(f, &w) == sigma_w.mul(f, &self.cbar);
        let pi0_matches = d_rec.mul(f, &w) == w.mul(f, &self.dbar);
        Ok(Roundtrip {
            w,
            c_rec,
            d_rec,
            frobenius_matches,
            pi0_matches,
            pi0_respects_relations: self.pi0_respects_relations(),
            kernel_dim: prim.kernel.len(),
            expected_kernel_dim: self.n * self.n0 as usize,
        })
    }
}

/// Build the residue algebra of `M` and run the round trip.
pub fn functor_l_roundtrip(m: &SigmaModule, cap: u64) -> Result<Roundtrip> {
    build_residue_algebra(m, cap)?.roundtrip()
}
