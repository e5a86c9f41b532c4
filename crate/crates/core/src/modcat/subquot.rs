//! Sub-modules and quotients cut out by pure, stable row spans.

use alloc::format;

use super::{validate_module, ModuleHom, SigmaModule};
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::series::Verdict;

/// A pure sub-module given by rows `S` of the ambient basis.
#[derive(Clone, Debug)]
pub struct Sub {
    pub module: SigmaModule,
    pub inclusion: ModuleHom,
    /// Residual of the stability identities, zero to this precision.
    pub stable: Verdict,
}

/// A quotient by a pure stable sub-module.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub module: SigmaModule,
    pub projection: ModuleHom,
    /// Rows of the ambient basis whose images form the quotient basis.
    pub lifts: SeriesMatrix,
    pub stable: Verdict,
}

/// Coordinates of `sigma(S) C` and `S D` in the basis `W` (rows).
fn images_in_basis(x: &SigmaModule, rows: &SeriesMatrix, w_inv: &SeriesMatrix) -> (SeriesMatrix, SeriesMatrix) {
    let r = x.base().ring();
    let prec = x.base().prec();
    let phi = r.mat_mul(&r.mat_mul(&r.mat_sigma(rows), x.c()), w_inv).truncate(prec);
    let pi0 = r.mat_mul(&r.mat_mul(rows, x.d()), w_inv).truncate(prec);
    (phi, pi0)
}

/// The sub-module spanned by the pure rows `s` of `x`, which must be stable
/// under `Phi` and `[pi0]`.
pub fn submodule(x: &SigmaModule, s: &SeriesMatrix) -> Result<Sub> {
    let r = x.base().ring();
    let prec = x.base().prec();
    if s.cols() != x.rank() {
        return Err(Error::Shape(format!("{} columns for a rank {} module", s.cols(), x.rank())));
    }
    let w = r.unimodular_completion(s, prec)?;
    let w_inv = r.inverse(&w)?;
    let k = s.rows();
    let n = x.rank();
    let (phi, pi0) = images_in_basis(x, s, &w_inv);
    let stable = phi.submatrix(0..k, k..n).is_zero().and(pi0.submatrix(0..k, k..n).is_zero());
    if !stable.holds {
        return Err(Error::Precondition("rows do not span a Phi- and pi0-stable sub-module".into()));
    }
    let module = validate_module(x.base(), phi.submatrix(0..k, 0..k), pi0.submatrix(0..k, 0..k))?;
    let inclusion = ModuleHom::new(&module, x, s.clone())?;
    Ok(Sub { module, inclusion, stable })
}

/// The quotient of `x` by the pure stable sub-module with rows `s`. The
/// quotient basis is the image of `complement` (or of standard basis
/// vectors completing `s` when `None`); `[s; complement]` must be unimodular.
pub fn quotient_module(x: &SigmaModule, s: &SeriesMatrix, complement: Option<&SeriesMatrix>) -> Result<Quotient> {
    let r = x.base().ring();
    let prec = x.base().prec();
    let n = x.rank();
    let k = s.rows();
    let w = match complement {
        Some(g) => s.vstack(g),
        None => r.unimodular_completion(s, prec)?,
    };
    if w.rows() != n || !r.det(&w).value.is_unit() {
        return Err(Error::Precondition("sub-module rows and complement are not a basis".into()));
    }
    let w_inv = r.inverse(&w)?;
    let lifts = w.submatrix(k..n, 0..n);
    let (sphi, spi0) = images_in_basis(x, s, &w_inv);
    let stable = sphi.submatrix(0..k, k..n).is_zero().and(spi0.submatrix(0..k, k..n).is_zero());
    if !stable.holds {
        return Err(Error::Precondition("rows do not span a Phi- and pi0-stable sub-module".into()));
    }
    let (phi, pi0) = images_in_basis(x, &lifts, &w_inv);
    let module = validate_module(x.base(), phi.submatrix(0..n - k, k..n), pi0.submatrix(0..n - k, k..n))?;
    let proj = w_inv.submatrix(0..n, k..n).truncate(prec);
    let projection = ModuleHom::new(x, &module, proj)?;
    Ok(Quotient { module, projection, lifts, stable })
}
