//! Modules with Frobenius and `pi0`-action, their morphisms, and exact
//! sequences.

mod hom;
mod homsolve;
mod ses;
mod split;
mod subquot;

pub use hom::{hom_check, HomReport, ModuleHom};
pub use homsolve::{hom_solve, HomSpace, HomSystem};
pub use ses::{baer_difference, baer_sum, pullback, pushout, pushout_general, ShortExactSequence};
pub use split::{conn_etale_split, residue_is_etale, residue_is_local, EtaleSplit};
pub use subquot::{quotient_module, submodule, Quotient, Sub};

use alloc::boxed::Box;
use alloc::format;

use crate::base::BaseData;
use crate::error::{Error, Result, Violation};
use crate::matrix::{DetKind, SeriesMatrix};
use crate::series::{Series, Verdict};

/// Per-condition outcome of the module axioms, each with the precision at
/// which it was decided.
#[derive(Clone, Debug)]
pub struct Certificate {
    /// Working precision the check ran at.
    pub prec: i64,
    pub integral: Verdict,
    pub det: Series,
    pub det_kind: DetKind,
    pub det_nonzero: Verdict,
    /// `D^n = 0`. Only decidable modulo `pi^prec`; see `nilpotent.precision`.
    pub nilpotent: Verdict,
    /// `sigma(D) C = C D`.
    pub semilinear: Verdict,
    /// `B = (D - pi0 E) C^{-1}` is integral.
    pub strict: Verdict,
    /// The witness `B`, when `det C` is nonzero.
    pub b: Option<SeriesMatrix>,
    /// `sigma(D) - pi0 E = C B`, the companion identity of the witness.
    pub companion: Verdict,
}

impl Certificate {
    pub fn first_violation(&self) -> Option<Violation> {
        if !self.integral.holds {
            Some(Violation::NotIntegral)
        } else if !self.det_nonzero.holds {
            Some(Violation::DetZero)
        } else if !self.nilpotent.holds {
            Some(Violation::NonNilpotent)
        } else if !self.semilinear.holds {
            Some(Violation::Semilinearity)
        } else if !self.strict.holds {
            Some(Violation::Strictness)
        } else {
            None
        }
    }

    pub fn is_valid(&self) -> bool {
        self.first_violation().is_none()
    }
}

/// A free `O`-module of rank `n` with Frobenius matrix `C` and `pi0`-action
/// matrix `D`, certified to satisfy the strictness criterion.
#[derive(Clone, Debug)]
pub struct SigmaModule {
    base: BaseData,
    c: SeriesMatrix,
    d: SeriesMatrix,
    cert: Certificate,
}

/// Check every module axiom without failing early.
pub fn certify(base: &BaseData, c: &SeriesMatrix, d: &SeriesMatrix) -> Result<Certificate> {
    if !c.is_square() || !d.is_square() || c.rows() != d.rows() {
        return Err(Error::Shape(format!(
            "C is {}x{} and D is {}x{}",
            c.rows(),
            c.cols(),
            d.rows(),
            d.cols()
        )));
    }
    let r = base.ring();
    let n = c.rows();
    let prec = c.min_prec().min(d.min_prec()).min(base.prec());
    let integral = c.is_integral().and(d.is_integral());

    let det = r.det(c);
    let det_nonzero = Verdict::new(det.kind == DetKind::Nonzero, det.value.prec());

    let dn = r.mat_pow(d, n as u32);
    let nilpotent = dn.is_zero();

    let lhs = r.mat_mul(&r.mat_sigma(d), c);
    let rhs = r.mat_mul(c, d);
    let semilinear = r.mat_eq(&lhs, &rhs);

    let pi0e = SeriesMatrix::scalar(n, base.pi0(), base.pi0().prec());
    let (strict, b, companion) = if det_nonzero.holds {
        let target = r.mat_sub(d, &pi0e);
        let sol = r.solve_left(c, &target)?;
        let cb = r.mat_mul(c, &sol.x);
        let companion = r.mat_eq(&r.mat_sub(&r.mat_sigma(d), &pi0e), &cb);
        (sol.integral, Some(sol.x), companion)
    } else {
        (Verdict::new(false, det.value.prec()), None, Verdict::new(false, det.value.prec()))
    };
    Ok(Certificate {
        prec,
        integral,
        det: det.value,
        det_kind: det.kind,
        det_nonzero,
        nilpotent,
        semilinear,
        strict,
        b,
        companion,
    })
}

/// Build a module from `C` and `D` after checking the strictness criterion:
/// `det C != 0`, `D` nilpotent with `sigma(D) C = C D`, and
/// `(D - pi0 E) C^{-1}` integral.
pub fn validate_module(base: &BaseData, c: SeriesMatrix, d: SeriesMatrix) -> Result<SigmaModule> {
    let cert = certify(base, &c, &d)?;
    if let Some(violation) = cert.first_violation() {
        return Err(Error::Validation { violation, certificate: Box::new(cert) });
    }
    Ok(SigmaModule { base: base.clone(), c, d, cert })
}

/// The rank-one module `mu_lambda`: `C = (lambda)`, `D = (0)`.
pub fn mu_lambda(base: &BaseData, lambda: &Series) -> Result<SigmaModule> {
    if lambda.is_zero() {
        return Err(Error::Invalid("lambda must be nonzero".into()));
    }
    let c = SeriesMatrix::from_vec(1, 1, alloc::vec![lambda.clone()]);
    let d = SeriesMatrix::zeros(1, 1, base.prec());
    validate_module(base, c, d)
}

/// Block-diagonal sum.
pub fn direct_sum(m1: &SigmaModule, m2: &SigmaModule) -> Result<SigmaModule> {
    m1.base.check_compatible(&m2.base)?;
    let prec = m1.base.prec().min(m2.base.prec());
    let base = if m1.base.prec() <= m2.base.prec() { &m1.base } else { &m2.base };
    let c = m1.c.block_diag(&m2.c, prec);
    let d = m1.d.block_diag(&m2.d, prec);
    validate_module(base, c, d)
}

impl SigmaModule {
    /// The zero module.
    pub fn zero(base: &BaseData) -> SigmaModule {
        let c = SeriesMatrix::zeros(0, 0, base.prec());
        validate_module(base, c.clone(), c).expect("the zero module is valid")
    }

    pub fn base(&self) -> &BaseData {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.c.rows()
    }

    pub fn c(&self) -> &SeriesMatrix {
        &self.c
    }

    pub fn d(&self) -> &SeriesMatrix {
        &self.d
    }

    pub fn certificate(&self) -> &Certificate {
        &self.cert
    }

    /// The strictness witness `B` with `D - pi0 E = B C`.
    pub fn b(&self) -> &SeriesMatrix {
        self.cert.b.as_ref().expect("valid modules carry B")
    }

    /// Smallest `N` with `D^N = 0` to precision (`0` for the zero module).
    pub fn nilpotency_index(&self) -> usize {
        let r = self.base.ring();
        let n = self.rank();
        let mut pw = SeriesMatrix::identity(n, self.base.prec());
        for k in 0..=n {
            if pw.is_zero().holds {
                return k;
            }
            pw = r.mat_mul(&pw, &self.d);
        }
        n
    }

    /// Same module at a lower working precision.
    pub fn truncate(&self, prec: i64) -> Result<SigmaModule> {
        let base = self.base.with_prec(prec.min(self.base.prec()))?;
        validate_module(&base, self.c.truncate(prec), self.d.truncate(prec))
    }

    /// Identity `n x n` matrix at the module's precision.
    pub fn identity_matrix(&self) -> SeriesMatrix {
        SeriesMatrix::identity(self.rank(), self.base.prec())
    }
}
