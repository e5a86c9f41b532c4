//! Short exact sequences `0 -> L -> M -> R -> 0` of modules and the
//! extension calculus: pushout, pullback, Baer sum and difference, and
//! equivalence of extensions.

use alloc::format;

use super::homsolve::HomSystem;
use super::{direct_sum, quotient_module, submodule, ModuleHom, SigmaModule};
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::series::Verdict;

#[derive(Clone, Debug)]
pub struct ShortExactSequence {
    i: ModuleHom,
    j: ModuleHom,
    exactness: Verdict,
}

impl ShortExactSequence {
    /// Checks that `i` is a pure embedding, `j` is surjective, `j o i = 0`
    /// and the ranks add up, which together give `im i = ker j`.
    pub fn new(i: ModuleHom, j: ModuleHom) -> Result<Self> {
        if i.target().rank() != j.source().rank() {
            return Err(Error::Shape("i and j do not share a middle object".into()));
        }
        let r = i.source().base().ring();
        let pure = i.is_pure_embedding();
        let surj = j.is_surjective();
        let composite = r.mat_mul(i.matrix(), j.matrix()).is_zero();
        let ranks = i.source().rank() + j.target().rank() == i.target().rank();
        if !pure.holds {
            return Err(Error::Precondition("i is not a pure embedding".into()));
        }
        if !surj.holds {
            return Err(Error::Precondition("j is not surjective".into()));
        }
        if !composite.holds {
            return Err(Error::Precondition(format!(
                "j o i is not zero (decided at precision {})",
                composite.precision
            )));
        }
        if !ranks {
            return Err(Error::Precondition("ranks do not add up".into()));
        }
        Ok(ShortExactSequence { i, j, exactness: pure.and(surj).and(composite) })
    }

    /// The split extension `0 -> a -> a + r -> r -> 0`.
    pub fn split(a: &SigmaModule, r: &SigmaModule) -> Result<Self> {
        let m = direct_sum(a, r)?;
        let prec = m.base().prec();
        let (na, nr) = (a.rank(), r.rank());
        let i = SeriesMatrix::identity(na, prec).hstack(&SeriesMatrix::zeros(na, nr, prec));
        let j = SeriesMatrix::zeros(na, nr, prec).vstack(&SeriesMatrix::identity(nr, prec));
        ShortExactSequence::new(ModuleHom::new(a, &m, i)?, ModuleHom::new(&m, r, j)?)
    }

    pub fn left(&self) -> &SigmaModule {
        self.i.source()
    }

    pub fn middle(&self) -> &SigmaModule {
        self.i.target()
    }

    pub fn right(&self) -> &SigmaModule {
        self.j.target()
    }

    pub fn i(&self) -> &ModuleHom {
        &self.i
    }

    pub fn j(&self) -> &ModuleHom {
        &self.j
    }

    pub fn exactness(&self) -> Verdict {
        self.exactness
    }

    /// The inverse class: `(-i, j)`.
    pub fn negate(&self) -> Result<Self> {
        ShortExactSequence::new(self.i.neg(), self.j.clone())
    }

    /// Componentwise direct sum of two sequences.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let prec = self.middle().base().prec();
        let l = direct_sum(self.left(), other.left())?;
        let m = direct_sum(self.middle(), other.middle())?;
        let r = direct_sum(self.right(), other.right())?;
        let i = self.i.matrix().block_diag(other.i.matrix(), prec);
        let j = self.j.matrix().block_diag(other.j.matrix(), prec);
        ShortExactSequence::new(ModuleHom::new(&l, &m, i)?, ModuleHom::new(&m, &r, j)?)
    }

    /// A section `s: R -> M` with `s o j = id`, if one exists to precision.
    pub fn splitting(&self) -> Result<Option<ModuleHom>> {
        let nr = self.right().rank();
        let prec = self.middle().base().prec();
        let sol = HomSystem::new(self.right(), self.middle())?
            .right_constraint(self.j.matrix().clone(), SeriesMatrix::identity(nr, prec))?
            .solve()?;
        match sol.particular {
            None => Ok(None),
            Some(u) => Ok(Some(ModuleHom::new(self.right(), self.middle(), u)?)),
        }
    }

    pub fn is_split(&self) -> Result<bool> {
        Ok(self.splitting()?.is_some())
    }

    /// Whether two sequences with the same ends are equivalent: a morphism
    /// `g` of middles with `i1 g = i2` and `g j2 = j1`. Returns `g` when one
    /// exists to precision; by the five lemma it is an isomorphism.
    pub fn equivalence(&self, other: &Self) -> Result<Option<ModuleHom>> {
        check_same_ends(self, other)?;
        let sol = HomSystem::new(self.middle(), other.middle())?
            .left_constraint(self.i.matrix().clone(), other.i.matrix().clone())?
            .right_constraint(other.j.matrix().clone(), self.j.matrix().clone())?
            .solve()?;
        match sol.particular {
            None => Ok(None),
            Some(g) => Ok(Some(ModuleHom::new(self.middle(), other.middle(), g)?)),
        }
    }

    pub fn is_equivalent(&self, other: &Self) -> Result<bool> {
        Ok(self.equivalence(other)?.is_some())
    }
}

fn same_module(a: &SigmaModule, b: &SigmaModule) -> bool {
    let r = a.base().ring();
    a.rank() == b.rank() && r.mat_eq(a.c(), b.c()).holds && r.mat_eq(a.d(), b.d()).holds
}

fn check_same_ends(a: &ShortExactSequence, b: &ShortExactSequence) -> Result<()> {
    if !same_module(a.left(), b.left()) || !same_module(a.right(), b.right()) {
        return Err(Error::Precondition("sequences do not share their end objects".into()));
    }
    Ok(())
}

/// Pushout `alpha_* eps` along any morphism `alpha: left(eps) -> T`:
/// the middle is `(T + M) / {(alpha(x), -i(x))}`.
pub fn pushout_general(eps: &ShortExactSequence, alpha: &ModuleHom) -> Result<ShortExactSequence> {
    let a = eps.left();
    if alpha.source().rank() != a.rank() {
        return Err(Error::Shape("alpha does not start at the left object".into()));
    }
    let t = alpha.target();
    let m = eps.middle();
    let base = m.base();
    let r = base.ring();
    let prec = base.prec();
    let (nt, nm, na) = (t.rank(), m.rank(), a.rank());
    let x = direct_sum(t, m)?;
    let s = alpha.matrix().hstack(&r.mat_neg(eps.i.matrix()));
    let compl_i = r.unimodular_completion(eps.i.matrix(), prec)?;
    let g = compl_i.submatrix(na..nm, 0..nm);
    let complement = SeriesMatrix::identity(nt, prec)
        .hstack(&SeriesMatrix::zeros(nt, nm, prec))
        .vstack(&SeriesMatrix::zeros(nm - na, nt, prec).hstack(&g));
    let quo = quotient_module(&x, &s, Some(&complement))?;
    let q = &quo.module;
    let nq = q.rank();
    let i_new = SeriesMatrix::identity(nt, prec).hstack(&SeriesMatrix::zeros(nt, nq - nt, prec));
    let x_to_r = SeriesMatrix::zeros(nt, eps.right().rank(), prec).vstack(eps.j.matrix());
    let j_new = r.mat_mul(&quo.lifts, &x_to_r).truncate(prec);
    ShortExactSequence::new(ModuleHom::new(t, q, i_new)?, ModuleHom::new(q, eps.right(), j_new)?)
}

/// Pushout along a pure embedding `alpha`.
pub fn pushout(eps: &ShortExactSequence, alpha: &ModuleHom) -> Result<ShortExactSequence> {
    if !super::hom_check(alpha).holds() {
        return Err(Error::NotAHom("alpha".into()));
    }
    if !alpha.is_pure_embedding().holds {
        return Err(Error::Precondition("alpha is not a pure embedding".into()));
    }
    pushout_general(eps, alpha)
}

/// A section `r x m` matrix `Sec` with `Sec J = E` for a surjective `J`.
fn matrix_section(base_ring: &crate::series::SeriesRing, j: &SeriesMatrix, prec: i64) -> Result<SeriesMatrix> {
    let (m, r) = (j.rows(), j.cols());
    let res = j
        .residue()
        .ok_or_else(|| Error::Precondition("j is not integral".into()))?;
    let piv_rows = res.transpose().rref(base_ring.field()).pivots;
    if piv_rows.len() != r {
        return Err(Error::Precondition("j is not surjective".into()));
    }
    let sub = j.select_rows(&piv_rows);
    let inv = base_ring.inverse(&sub)?;
    let mut sec = SeriesMatrix::zeros(r, m, prec);
    for (k, &row) in piv_rows.iter().enumerate() {
        for a in 0..r {
            sec.set(a, row, inv.get(a, k).clone());
        }
    }
    Ok(sec)
}

/// Pullback `beta^* eta` along any morphism `beta: S -> right(eta)`: the
/// middle is `M x_R S`, with basis `(i(l), 0)` and `(beta(s) Sec, s)`.
pub fn pullback(eta: &ShortExactSequence, beta: &ModuleHom) -> Result<ShortExactSequence> {
    if beta.target().rank() != eta.right().rank() {
        return Err(Error::Shape("beta does not end at the right object".into()));
    }
    if !super::hom_check(beta).holds() {
        return Err(Error::NotAHom("beta".into()));
    }
    let s_mod = beta.source();
    let m = eta.middle();
    let base = m.base();
    let r = base.ring();
    let prec = base.prec();
    let (nl, ns) = (eta.left().rank(), s_mod.rank());
    let sec = matrix_section(r, eta.j.matrix(), prec)?;
    let x = direct_sum(m, s_mod)?;
    let top = eta.i.matrix().hstack(&SeriesMatrix::zeros(nl, ns, prec));
    let bottom = r
        .mat_mul(beta.matrix(), &sec)
        .truncate(prec)
        .hstack(&SeriesMatrix::identity(ns, prec));
    let rows = top.vstack(&bottom);
    let sub = submodule(&x, &rows)?;
    let p = &sub.module;
    let i_new = SeriesMatrix::identity(nl, prec).hstack(&SeriesMatrix::zeros(nl, ns, prec));
    let j_new = SeriesMatrix::zeros(nl, ns, prec).vstack(&SeriesMatrix::identity(ns, prec));
    ShortExactSequence::new(ModuleHom::new(eta.left(), p, i_new)?, ModuleHom::new(p, s_mod, j_new)?)
}

/// Baer sum: pull back `eps1 + eps2` along the diagonal of `R`, then push out
/// along the codiagonal of `L`.
pub fn baer_sum(eps1: &ShortExactSequence, eps2: &ShortExactSequence) -> Result<ShortExactSequence> {
    check_same_ends(eps1, eps2)?;
    let sum = eps1.direct_sum(eps2)?;
    let base = eps1.middle().base();
    let prec = base.prec();
    let (nl, nr) = (eps1.left().rank(), eps1.right().rank());
    let diag = SeriesMatrix::identity(nr, prec).hstack(&SeriesMatrix::identity(nr, prec));
    let delta = ModuleHom::new(eps1.right(), sum.right(), diag)?;
    let pulled = pullback(&sum, &delta)?;
    let codiag = SeriesMatrix::identity(nl, prec).vstack(&SeriesMatrix::identity(nl, prec));
    let nabla = ModuleHom::new(sum.left(), eps1.left(), codiag)?;
    pushout_general(&pulled, &nabla)
}

/// `eps1 - eps2` in the extension group.
pub fn baer_difference(eps1: &ShortExactSequence, eps2: &ShortExactSequence) -> Result<ShortExactSequence> {
    baer_sum(eps1, &eps2.negate()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::BaseData;
    use crate::modcat::{mu_lambda, validate_module};
    use crate::series::Series;

    fn base() -> BaseData {
        BaseData::simple(2, 1, 1, 10).unwrap()
    }

    /// Extension of mu_pi by mu_1 with middle C = [[1, 0], [x, pi]]; it
    /// splits iff a^2 - pi a + x = 0 has a root in O.
    fn ext(x: &Series) -> ShortExactSequence {
        let b = base();
        let prec = b.prec();
        let a = mu_lambda(&b, &Series::one(prec)).unwrap();
        let rr = mu_lambda(&b, &Series::pi_pow(1, prec)).unwrap();
        let c = SeriesMatrix::from_vec(2, 2, alloc::vec![Series::one(prec), Series::zero(prec), x.clone(), Series::pi_pow(1, prec)]);
        let m = validate_module(&b, c, SeriesMatrix::zeros(2, 2, prec)).unwrap();
        let i = SeriesMatrix::from_vec(1, 2, alloc::vec![Series::one(prec), Series::zero(prec)]);
        let j = SeriesMatrix::from_vec(2, 1, alloc::vec![Series::zero(prec), Series::one(prec)]);
        ShortExactSequence::new(ModuleHom::new(&a, &m, i).unwrap(), ModuleHom::new(&m, &rr, j).unwrap()).unwrap()
    }

    #[test]
    fn split_and_non_split_members() {
        assert!(ext(&Series::zero(10)).is_split().unwrap());
        assert!(!ext(&Series::one(10)).is_split().unwrap());
    }

    #[test]
    fn difference_with_itself_splits() {
        let e = ext(&Series::one(10));
        let d = baer_difference(&e, &e).unwrap();
        assert_eq!(d.middle().rank(), 2);
        assert!(d.is_split().unwrap());
    }

    #[test]
    fn difference_with_split_is_unchanged() {
        let e = ext(&Series::one(10));
        let s = ext(&Series::zero(10));
        let d = baer_difference(&e, &s).unwrap();
        assert!(d.is_equivalent(&e).unwrap());
        assert!(!d.is_equivalent(&s).unwrap());
    }

    #[test]
    fn pullback_along_zero_splits() {
        let e = ext(&Series::one(10));
        let z = ModuleHom::zero(e.right(), e.right());
        let pb = pullback(&e, &z).unwrap();
        assert!(!e.is_split().unwrap());
        assert!(pb.is_split().unwrap());
        let id = ModuleHom::identity(e.right());
        assert!(pullback(&e, &id).unwrap().is_equivalent(&e).unwrap());
    }

    #[test]
    fn pushout_along_identity() {
        let e = ext(&Series::one(10));
        let id = ModuleHom::identity(e.left());
        assert!(pushout(&e, &id).unwrap().is_equivalent(&e).unwrap());
    }
}
