use alloc::format;

use super::SigmaModule;
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::series::Verdict;

/// A morphism `source -> target` given by an `n1 x n2` matrix `U` over `O`.
#[derive(Clone, Debug)]
pub struct ModuleHom {
    source: SigmaModule,
    target: SigmaModule,
    u: SeriesMatrix,
}

/// Outcome of the two equivariance identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomReport {
    /// `C1 U = sigma(U) C2`.
    pub frobenius: Verdict,
    /// `D1 U = U D2`.
    pub pi0_action: Verdict,
    /// Entries of `U` lie in `O`.
    pub integral: Verdict,
}

impl HomReport {
    pub fn holds(&self) -> bool {
        self.frobenius.holds && self.pi0_action.holds && self.integral.holds
    }

    pub fn verdict(&self) -> Verdict {
        self.frobenius.and(self.pi0_action).and(self.integral)
    }
}

fn check_identities(source: &SigmaModule, target: &SigmaModule, u: &SeriesMatrix) -> HomReport {
    let r = source.base().ring();
    let lhs = r.mat_mul(source.c(), u);
    let rhs = r.mat_mul(&r.mat_sigma(u), target.c());
    let frobenius = r.mat_eq(&lhs, &rhs);
    let pi0_action = r.mat_eq(&r.mat_mul(source.d(), u), &r.mat_mul(u, target.d()));
    HomReport { frobenius, pi0_action, integral: u.is_integral() }
}

/// Check both equivariance identities of a morphism.
pub fn hom_check(f: &ModuleHom) -> HomReport {
    check_identities(&f.source, &f.target, &f.u)
}

impl ModuleHom {
    /// A morphism whose equivariance has been verified.
    pub fn new(source: &SigmaModule, target: &SigmaModule, u: SeriesMatrix) -> Result<Self> {
        let f = ModuleHom::new_unchecked(source, target, u)?;
        let rep = hom_check(&f);
        if !rep.holds() {
            return Err(Error::NotAHom(format!(
                "frobenius {} (prec {}), pi0 {} (prec {}), integral {}",
                rep.frobenius.holds,
                rep.frobenius.precision,
                rep.pi0_action.holds,
                rep.pi0_action.precision,
                rep.integral.holds
            )));
        }
        Ok(f)
    }

    /// Only the shapes and base data are checked; use [`hom_check`] for the
    /// identities.
    pub fn new_unchecked(source: &SigmaModule, target: &SigmaModule, u: SeriesMatrix) -> Result<Self> {
        source.base().check_compatible(target.base())?;
        if u.rows() != source.rank() || u.cols() != target.rank() {
            return Err(Error::Shape(format!(
                "hom matrix is {}x{}, expected {}x{}",
                u.rows(),
                u.cols(),
                source.rank(),
                target.rank()
            )));
        }
        Ok(ModuleHom { source: source.clone(), target: target.clone(), u })
    }

    pub fn identity(m: &SigmaModule) -> Self {
        ModuleHom { source: m.clone(), target: m.clone(), u: m.identity_matrix() }
    }

    pub fn zero(source: &SigmaModule, target: &SigmaModule) -> Self {
        let prec = source.base().prec();
        ModuleHom {
            source: source.clone(),
            target: target.clone(),
            u: SeriesMatrix::zeros(source.rank(), target.rank(), prec),
        }
    }

    /// Multiplication by `pi0^k` on `m`, i.e. the matrix `D^k`.
    pub fn pi0_power(m: &SigmaModule, k: u32) -> Self {
        let r = m.base().ring();
        ModuleHom { source: m.clone(), target: m.clone(), u: r.mat_pow(m.d(), k) }
    }

    pub fn source(&self) -> &SigmaModule {
        &self.source
    }

    pub fn target(&self) -> &SigmaModule {
        &self.target
    }

    pub fn matrix(&self) -> &SeriesMatrix {
        &self.u
    }

    /// "First `self`, then `g`": matrix `U V`.
    pub fn then(&self, g: &ModuleHom) -> Result<ModuleHom> {
        if self.target.rank() != g.source.rank() {
            return Err(Error::Shape("composition of incompatible homs".into()));
        }
        let r = self.source.base().ring();
        Ok(ModuleHom { source: self.source.clone(), target: g.target.clone(), u: r.mat_mul(&self.u, &g.u) })
    }

    pub fn is_pure_embedding(&self) -> Verdict {
        self.source.base().ring().is_pure(&self.u)
    }

    pub fn is_surjective(&self) -> Verdict {
        self.source.base().ring().is_surjective(&self.u)
    }

    /// Sum of two homs with the same ends.
    pub fn add(&self, other: &ModuleHom) -> Result<ModuleHom> {
        if self.u.rows() != other.u.rows() || self.u.cols() != other.u.cols() {
            return Err(Error::Shape("sum of homs with different ends".into()));
        }
        let r = self.source.base().ring();
        Ok(ModuleHom { source: self.source.clone(), target: self.target.clone(), u: r.mat_add(&self.u, &other.u) })
    }

    pub fn neg(&self) -> ModuleHom {
        let r = self.source.base().ring();
        ModuleHom { source: self.source.clone(), target: self.target.clone(), u: r.mat_neg(&self.u) }
    }
}
