//! The connected-etale sequence on the module side.
//!
//! The etale part is the largest sub-module on which `Phi` is bijective: the
//! stable image of the iterates `Phi^j(M)`, whose row spans are
//! `S_{j+1} = span(sigma(S_j) C)`. Whether a piece is etale or local is read
//! off the residue matrix `C mod pi` (invertible, resp. `sigma`-nilpotent),
//! since over the domain `O` itself no product of the `sigma^i(C)` can vanish.

use alloc::format;

use super::{quotient_module, submodule, ModuleHom, ShortExactSequence, SigmaModule};
use crate::error::{Error, Result};
use crate::kmat::KMat;
use crate::matrix::SeriesMatrix;
use crate::series::SeriesRing;

#[derive(Clone, Debug)]
pub struct EtaleSplit {
    pub etale: SigmaModule,
    pub local: SigmaModule,
    /// `0 -> M_et -> M -> M_loc -> 0`.
    pub ses: ShortExactSequence,
}

/// `sigma^{k-1}(A) ... sigma(A) A` over the residue field.
fn residue_frobenius_power(r: &SeriesRing, a: &KMat, k: usize) -> KMat {
    let f = r.field();
    let mut out = KMat::identity(a.rows);
    let mut cur = a.clone();
    for _ in 0..k {
        out = cur.mul(f, &out);
        cur = cur.map(|x| r.sigma_const(x));
    }
    out
}

/// Whether `C` mod `pi` is invertible.
pub fn residue_is_etale(m: &SigmaModule) -> bool {
    let f = m.base().field();
    m.c().residue().is_some_and(|c| c.rank(f) == m.rank())
}

/// Whether `C` mod `pi` is `sigma`-nilpotent.
pub fn residue_is_local(m: &SigmaModule) -> bool {
    let r = m.base().ring();
    m.c().residue().is_some_and(|c| residue_frobenius_power(r, &c, m.rank()).is_zero())
}

/// Split `M` into its etale sub-module and local quotient.
pub fn conn_etale_split(m: &SigmaModule) -> Result<EtaleSplit> {
    let base = m.base();
    let r = base.ring();
    let f = r.field();
    let n = m.rank();
    let prec = base.prec();
    let cbar = m
        .c()
        .residue()
        .ok_or_else(|| Error::Precondition("C is not integral".into()))?;
    let et_rank = residue_frobenius_power(r, &cbar, n).rank(f);

    let zero = SigmaModule::zero(base);
    if et_rank == 0 {
        let i = ModuleHom::new(&zero, m, SeriesMatrix::zeros(0, n, prec))?;
        let j = ModuleHom::identity(m);
        return Ok(EtaleSplit { etale: zero, local: m.clone(), ses: ShortExactSequence::new(i, j)? });
    }
    if et_rank == n {
        let i = ModuleHom::identity(m);
        let j = ModuleHom::new(m, &zero, SeriesMatrix::zeros(n, 0, prec))?;
        return Ok(EtaleSplit { etale: m.clone(), local: zero, ses: ShortExactSequence::new(i, j)? });
    }

    // Iterate S <- sigma(S) C; the local directions decay pi-adically.
    let mut s = SeriesMatrix::identity(n, prec);
    for _ in 0..(n as i64 * prec + 1) {
        s = r.mat_mul(&r.mat_sigma(&s), m.c()).truncate(prec);
    }
    let res = s
        .residue()
        .ok_or_else(|| Error::PrecisionInsufficient("iterated Frobenius image lost precision".into()))?;
    let rows = res.transpose().rref(f).pivots;
    if rows.len() != et_rank {
        return Err(Error::PrecisionInsufficient(format!(
            "stable image has residue rank {} but the residue Frobenius has {}",
            rows.len(),
            et_rank
        )));
    }
    let et_rows = s.select_rows(&rows);
    let sub = submodule(m, &et_rows).map_err(|e| {
        Error::PrecisionInsufficient(format!("could not separate the etale part: {e}"))
    })?;
    let quo = quotient_module(m, &et_rows, None)?;
    if !residue_is_etale(&sub.module) || !residue_is_local(&quo.module) {
        return Err(Error::PrecisionInsufficient("pieces do not have the expected slopes".into()));
    }
    let ses = ShortExactSequence::new(sub.inclusion, quo.projection)?;
    Ok(EtaleSplit { etale: sub.module, local: quo.module, ses })
}
