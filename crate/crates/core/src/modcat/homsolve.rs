//! Solving the morphism equations `C1 U = sigma(U) C2`, `D1 U = U D2`,
//! optionally with extra affine constraints, to a given precision.
//!
//! Both `sigma` and multiplication by fixed matrices are `F_p`-linear in the
//! `pi`-adic digits of `U`, so modulo `pi^P` the equations form a finite
//! linear system over `F_p`. Its solutions are approximate morphisms; the
//! true morphisms are their inverse limit. We solve at precision `P`, keep
//! only the digits below `P_out < P`, and confirm the projected space does not
//! change when solving at a lower precision, which is how spurious
//! high-valuation approximate solutions are discarded.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{ModuleHom, SigmaModule};
use crate::error::{Error, Result};
use crate::field::GaloisField;
use crate::kmat::EchelonBasis;
use crate::matrix::SeriesMatrix;
use crate::series::{Series, SeriesRing};

#[derive(Clone, Debug)]
enum Constraint {
    /// `A U = T`.
    Left(SeriesMatrix, SeriesMatrix),
    /// `U B = T`.
    Right(SeriesMatrix, SeriesMatrix),
}

/// The morphism equations between two modules plus optional affine side
/// conditions.
#[derive(Clone, Debug)]
pub struct HomSystem {
    source: SigmaModule,
    target: SigmaModule,
    constraints: Vec<Constraint>,
    prec: i64,
    out_prec: i64,
}

/// An `F_q`-basis of morphisms, known modulo `pi^prec`.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub source: SigmaModule,
    pub target: SigmaModule,
    pub basis: Vec<SeriesMatrix>,
    /// Dimension over `F_p` of the projected solution space.
    pub fp_dim: usize,
    /// Precision of the returned matrices.
    pub prec: i64,
    /// Precision the equations were solved at.
    pub solved_at: i64,
}

/// Solution set of an affine system: empty, or a particular solution plus
/// the homogeneous morphism space.
#[derive(Clone, Debug)]
pub struct AffineSolution {
    pub particular: Option<SeriesMatrix>,
    pub homogeneous: HomSpace,
}

impl HomSpace {
    /// Dimension over `F_q`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn q(&self) -> u64 {
        self.source.base().q()
    }

    /// Number of morphisms, `q^dim`.
    pub fn count(&self) -> u64 {
        self.q().saturating_pow(self.dim() as u32)
    }

    pub fn homs(&self) -> Result<Vec<ModuleHom>> {
        self.basis
            .iter()
            .map(|u| ModuleHom::new(&self.source, &self.target, u.clone()))
            .collect()
    }

    /// Every morphism, as `F_q`-combinations of the basis; `None` when there
    /// are more than `limit`.
    pub fn enumerate(&self, limit: u64) -> Option<Vec<SeriesMatrix>> {
        if self.count() > limit {
            return None;
        }
        let base = self.source.base();
        let r = base.ring();
        let fq = base.field().subfield_elements(self.q());
        let zero = SeriesMatrix::zeros(self.source.rank(), self.target.rank(), self.prec);
        let mut out = vec![zero];
        for b in &self.basis {
            let mut next = Vec::with_capacity(out.len() * fq.len());
            for u in &out {
                for &c in &fq {
                    let scaled = SeriesMatrix::from_fn(b.rows(), b.cols(), |i, j| r.scale(b.get(i, j), c));
                    next.push(r.mat_add(u, &scaled));
                }
            }
            out = next;
        }
        Some(out)
    }
}

struct Layout {
    n1: usize,
    n2: usize,
    prec: usize,
    d: usize,
}

impl Layout {
    fn unknowns(&self) -> usize {
        self.n1 * self.n2 * self.prec * self.d
    }

    fn index(&self, i: usize, j: usize, t: usize, c: usize) -> usize {
        ((i * self.n2 + j) * self.prec + t) * self.d + c
    }
}

/// Incremental column elimination that records, for every dependent
/// column, the combination of columns that vanishes.
struct ColumnEliminator {
    basis: Vec<(usize, Vec<u32>, Vec<u32>)>,
    kernel: Vec<Vec<u32>>,
    width: usize,
}

impl ColumnEliminator {
    fn new(width: usize) -> Self {
        ColumnEliminator { basis: Vec::new(), kernel: Vec::new(), width }
    }

    fn reduce(&self, f: &GaloisField, v: &mut [u32], comb: &mut [u32]) {
        for (piv, bv, bc) in &self.basis {
            let c = v[*piv];
            if c == 0 {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(bv) {
                if y != 0 {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
            for (x, &y) in comb.iter_mut().zip(bc) {
                if y != 0 {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
    }

    fn push(&mut self, f: &GaloisField, col: usize, mut v: Vec<u32>) {
        let mut comb = vec![0u32; self.width];
        comb[col] = 1;
        self.reduce(f, &mut v, &mut comb);
        match v.iter().position(|&x| x != 0) {
            None => self.kernel.push(comb),
            Some(piv) => {
                let inv = f.inv(v[piv]).expect("nonzero pivot");
                for x in v.iter_mut() {
                    *x = f.mul(*x, inv);
                }
                for x in comb.iter_mut() {
                    *x = f.mul(*x, inv);
                }
                self.basis.push((piv, v, comb));
            }
        }
    }

    /// Some `x` with `M x = t`.
    fn particular(&self, f: &GaloisField, t: &[u32]) -> Option<Vec<u32>> {
        let mut v = t.to_vec();
        let mut comb = vec![0u32; self.width];
        self.reduce(f, &mut v, &mut comb);
        if v.iter().any(|&x| x != 0) {
            return None;
        }
        // v_orig - M(comb_acc) = 0 with comb tracking the negated combination.
        Some(comb.into_iter().map(|c| f.neg(c)).collect())
    }
}

impl HomSystem {
    pub fn new(source: &SigmaModule, target: &SigmaModule) -> Result<Self> {
        source.base().check_compatible(target.base())?;
        let prec = [
            source.base().prec(),
            target.base().prec(),
            source.c().min_prec(),
            source.d().min_prec(),
            target.c().min_prec(),
            target.d().min_prec(),
        ]
        .into_iter()
        .min()
        .unwrap_or(1)
        .max(2);
        Ok(HomSystem {
            source: source.clone(),
            target: target.clone(),
            constraints: Vec::new(),
            prec,
            out_prec: (prec / 2).max(1),
        })
    }

    /// Solve at precision `prec`, returning digits below `out_prec`.
    pub fn with_precision(mut self, prec: i64, out_prec: i64) -> Result<Self> {
        if out_prec < 1 || out_prec >= prec {
            return Err(Error::Invalid(format!("need 1 <= out_prec < prec, got {out_prec}, {prec}")));
        }
        self.prec = prec;
        self.out_prec = out_prec;
        Ok(self)
    }

    /// Require `A U = T`.
    pub fn left_constraint(mut self, a: SeriesMatrix, t: SeriesMatrix) -> Result<Self> {
        if a.cols() != self.source.rank() || t.rows() != a.rows() || t.cols() != self.target.rank() {
            return Err(Error::Shape("left constraint shapes".into()));
        }
        self.prec = self.prec.min(a.min_prec()).min(t.min_prec());
        self.out_prec = self.out_prec.min(self.prec - 1).max(1);
        self.constraints.push(Constraint::Left(a, t));
        Ok(self)
    }

    /// Require `U B = T`.
    pub fn right_constraint(mut self, b: SeriesMatrix, t: SeriesMatrix) -> Result<Self> {
        if b.rows() != self.target.rank() || t.cols() != b.cols() || t.rows() != self.source.rank() {
            return Err(Error::Shape("right constraint shapes".into()));
        }
        self.prec = self.prec.min(b.min_prec()).min(t.min_prec());
        self.out_prec = self.out_prec.min(self.prec - 1).max(1);
        self.constraints.push(Constraint::Right(b, t));
        Ok(self)
    }

    fn ring(&self) -> &SeriesRing {
        self.source.base().ring()
    }

    /// Solve, confirming stability of the projected solution set against a
    /// lower solving precision.
    pub fn solve(&self) -> Result<AffineSolution> {
        let hi = self.solve_at(self.prec)?;
        let lo_prec = self.out_prec + (self.prec - self.out_prec + 1) / 2;
        if lo_prec < self.prec {
            let lo = self.solve_at(lo_prec)?;
            if lo.homogeneous.fp_dim != hi.homogeneous.fp_dim || lo.particular.is_some() != hi.particular.is_some() {
                return Err(Error::PrecisionInsufficient(format!(
                    "morphism space not stable: F_p-dimension {} at precision {} but {} at {}",
                    hi.homogeneous.fp_dim, self.prec, lo.homogeneous.fp_dim, lo_prec
                )));
            }
        }
        Ok(hi)
    }

    fn solve_at(&self, prec: i64) -> Result<AffineSolution> {
        let base = self.source.base();
        let ring = self.ring();
        let field = base.field().clone();
        let fp = GaloisField::prime(base.p())?;
        let lay = Layout {
            n1: self.source.rank(),
            n2: self.target.rank(),
            prec: prec as usize,
            d: field.degree() as usize,
        };
        let n_unk = lay.unknowns();
        let c1 = self.source.c();
        let c2 = self.target.c();
        let d1 = self.source.d();
        let d2 = self.target.d();

        // Output blocks: (rows, cols) of each equation matrix.
        let mut blocks: Vec<(usize, usize)> = vec![(lay.n1, lay.n2), (lay.n1, lay.n2)];
        for c in &self.constraints {
            match c {
                Constraint::Left(a, _) => blocks.push((a.rows(), lay.n2)),
                Constraint::Right(b, _) => blocks.push((lay.n1, b.cols())),
            }
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut n_rows = 0usize;
        for &(r, c) in &blocks {
            offsets.push(n_rows);
            n_rows += r * c * lay.prec * lay.d;
        }
        let write = |v: &mut [u32], block: usize, a: usize, b: usize, s: &Series| {
            let (_, cols) = blocks[block];
            for t in 0..lay.prec {
                let coeff = s.coeff(t as i64).unwrap_or(0);
                if coeff == 0 {
                    continue;
                }
                for (c, x) in field.coords(coeff).into_iter().enumerate() {
                    let idx = offsets[block] + ((a * cols + b) * lay.prec + t) * lay.d + c;
                    v[idx] = fp.add(v[idx], x);
                }
            }
        };

        let mut elim = ColumnEliminator::new(n_unk);
        let basis_elems: Vec<u32> = (0..lay.d).map(|c| field.from_coords(&unit_coords(lay.d, c)).unwrap_or(0)).collect();
        for i in 0..lay.n1 {
            for j in 0..lay.n2 {
                for t in 0..lay.prec {
                    for (c, &x) in basis_elems.iter().enumerate() {
                        let u = Series::monomial(x, t as i64, prec);
                        let su = ring.sigma(&u);
                        let mut v = vec![0u32; n_rows];
                        // C1 U - sigma(U) C2: column j gets C1[a][i] u, row i gets -su C2[j][b].
                        for a in 0..lay.n1 {
                            write(&mut v, 0, a, j, &ring.mul(c1.get(a, i), &u));
                        }
                        for b in 0..lay.n2 {
                            write(&mut v, 0, i, b, &ring.neg(&ring.mul(&su, c2.get(j, b))));
                        }
                        // D1 U - U D2.
                        for a in 0..lay.n1 {
                            write(&mut v, 1, a, j, &ring.mul(d1.get(a, i), &u));
                        }
                        for b in 0..lay.n2 {
                            write(&mut v, 1, i, b, &ring.neg(&ring.mul(&u, d2.get(j, b))));
                        }
                        for (k, con) in self.constraints.iter().enumerate() {
                            match con {
                                Constraint::Left(am, _) => {
                                    for a in 0..am.rows() {
                                        write(&mut v, 2 + k, a, j, &ring.mul(am.get(a, i), &u));
                                    }
                                }
                                Constraint::Right(bm, _) => {
                                    for b in 0..bm.cols() {
                                        write(&mut v, 2 + k, i, b, &ring.mul(&u, bm.get(j, b)));
                                    }
                                }
                            }
                        }
                        elim.push(&fp, lay.index(i, j, t, c), v);
                    }
                }
            }
        }

        let mut target = vec![0u32; n_rows];
        for (k, con) in self.constraints.iter().enumerate() {
            let t = match con {
                Constraint::Left(_, t) | Constraint::Right(_, t) => t,
            };
            for a in 0..t.rows() {
                for b in 0..t.cols() {
                    write(&mut target, 2 + k, a, b, t.get(a, b));
                }
            }
        }
        let particular = if self.constraints.is_empty() { Some(vec![0u32; n_unk]) } else { elim.particular(&fp, &target) };

        let out_prec = self.out_prec.min(prec - 1).max(1);
        let to_matrix = |x: &[u32]| -> SeriesMatrix {
            SeriesMatrix::from_fn(lay.n1, lay.n2, |i, j| {
                let terms: Vec<(i64, u32)> = (0..out_prec as usize)
                    .filter_map(|t| {
                        let coords: Vec<u32> = (0..lay.d).map(|c| x[lay.index(i, j, t, c)]).collect();
                        let v = field.from_coords(&coords).unwrap_or(0);
                        (v != 0).then_some((t as i64, v))
                    })
                    .collect();
                Series::from_terms(&field, &terms, out_prec).expect("digits in range")
            })
        };
        let project = |m: &SeriesMatrix| -> Vec<u32> {
            let mut out = Vec::with_capacity(lay.n1 * lay.n2 * out_prec as usize * lay.d);
            for i in 0..lay.n1 {
                for j in 0..lay.n2 {
                    for t in 0..out_prec {
                        let cf = m.get(i, j).coeff(t).unwrap_or(0);
                        out.extend(field.coords(cf));
                    }
                }
            }
            out
        };

        // F_q-basis of the projected homogeneous space.
        let q = base.q();
        let fq_gen = field.subfield_generator(q);
        let n0 = base.n0();
        let fq_span: Vec<u32> = (0..n0).map(|k| field.pow(fq_gen, u64::from(k))).collect();
        let mut span = EchelonBasis::new();
        let mut fq_basis = Vec::new();
        for kv in &elim.kernel {
            let m = to_matrix(kv);
            if span.contains(&fp, &project(&m)) {
                continue;
            }
            for &c in &fq_span {
                let scaled = SeriesMatrix::from_fn(m.rows(), m.cols(), |i, j| ring.scale(m.get(i, j), c));
                span.insert(&fp, &project(&scaled));
            }
            fq_basis.push(m);
        }
        let homogeneous = HomSpace {
            source: self.source.clone(),
            target: self.target.clone(),
            basis: fq_basis,
            fp_dim: span.len(),
            prec: out_prec,
            solved_at: prec,
        };
        Ok(AffineSolution { particular: particular.map(|x| to_matrix(&x)), homogeneous })
    }
}

fn unit_coords(d: usize, c: usize) -> Vec<u32> {
    let mut v = vec![0u32; d];
    v[c] = 1;
    v
}

/// All morphisms `M1 -> M2`, as an `F_q`-basis known to roughly half the
/// working precision.
pub fn hom_solve(m1: &SigmaModule, m2: &SigmaModule) -> Result<HomSpace> {
    Ok(HomSystem::new(m1, m2)?.solve()?.homogeneous)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::BaseData;
    use crate::modcat::{direct_sum, hom_check, mu_lambda};

    fn b(p: u32, n0: u32, e: i64) -> BaseData {
        BaseData::simple(p, n0, e, 12).unwrap()
    }

    #[test]
    fn endomorphisms_of_mu_one_are_fq() {
        for (p, n0) in [(2, 1), (3, 1), (2, 2)] {
            let bd = b(p, n0, 1);
            let m = mu_lambda(&bd, &Series::one(12)).unwrap();
            let h = hom_solve(&m, &m).unwrap();
            assert_eq!(h.dim(), 1);
            assert_eq!(h.count(), bd.q());
            for u in h.enumerate(16).unwrap() {
                let f = ModuleHom::new_unchecked(&m, &m, u.clone()).unwrap();
                assert!(hom_check(&f).holds());
                assert!(u.get(0, 0).is_zero() || u.get(0, 0).val() == 0);
            }
        }
    }

    #[test]
    fn no_nonzero_homs_from_etale_to_local() {
        let bd = b(3, 1, 1);
        let m1 = mu_lambda(&bd, &Series::one(12)).unwrap();
        let m2 = mu_lambda(&bd, &Series::pi_pow(1, 12)).unwrap();
        assert_eq!(hom_solve(&m1, &m2).unwrap().dim(), 0);
    }

    #[test]
    fn endomorphisms_of_mu_pi_are_fq() {
        let bd = b(3, 1, 1);
        let m = mu_lambda(&bd, &Series::pi_pow(1, 12)).unwrap();
        let h = hom_solve(&m, &m).unwrap();
        assert_eq!(h.dim(), 1);
    }

    #[test]
    fn homs_into_a_sum_and_affine_constraints() {
        let bd = b(2, 1, 1);
        let m1 = mu_lambda(&bd, &Series::one(12)).unwrap();
        let m2 = mu_lambda(&bd, &Series::pi_pow(1, 12)).unwrap();
        let s = direct_sum(&m1, &m2).unwrap();
        let h = hom_solve(&s, &s).unwrap();
        // End(mu1) + End(mu_pi) + Hom(mu_pi, mu1); Hom(mu1, mu_pi) = 0.
        assert_eq!(h.dim(), 3);
        for hom in h.homs().unwrap() {
            assert!(hom_check(&hom).holds());
        }
        // A section of the projection s -> m1.
        let proj = SeriesMatrix::from_vec(2, 1, vec![Series::one(12), Series::zero(12)]);
        let sol = HomSystem::new(&m1, &s)
            .unwrap()
            .right_constraint(proj, SeriesMatrix::identity(1, 12))
            .unwrap()
            .solve()
            .unwrap();
        assert!(sol.particular.is_some());
    }
}
