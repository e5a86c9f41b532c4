//! The equation system presenting the points of `G[M]`.
//!
//! In a basis `n_s = [pi0^{N-s}] m` (`s = 1..N`, each a block of `h`
//! vectors) the operator `[pi0]` shifts `n_s` to `n_{s-1}`, and the
//! strictness relation `([pi0] - pi0) n = B' Phi n` takes the block
//! Toeplitz form `sum_i C_i Phi n_{s+1-i} = pi0 n_s - n_{s-1}`. The points
//! are the solutions of `sum_{i <= s} C_i X_{s+1-i}^q = pi0 X_s - X_{s-1}`.

use alloc::format;
use alloc::vec::Vec;

use crate::base::BaseData;
use crate::error::{Error, Result};
use crate::matrix::{DetKind, SeriesMatrix};
use crate::modcat::SigmaModule;

#[derive(Clone, Debug)]
pub struct EquationSystem {
    pub base: BaseData,
    /// Rank per level.
    pub h: usize,
    /// Number of levels, the `[pi0]`-nilpotency index.
    pub levels: usize,
    /// `C_1, ..., C_N`, each `h x h`.
    pub cs: Vec<SeriesMatrix>,
    /// Rows: the basis `n_1, ..., n_N` in the original coordinates.
    pub basis: SeriesMatrix,
}

impl EquationSystem {
    /// Directly from the matrices `C_i`.
    pub fn from_matrices(base: &BaseData, cs: Vec<SeriesMatrix>) -> Result<Self> {
        let levels = cs.len();
        let h = cs.first().map_or(0, |c| c.rows());
        if levels == 0 || h == 0 || cs.iter().any(|c| c.rows() != h || c.cols() != h) {
            return Err(Error::Shape("need N >= 1 square blocks of one size".into()));
        }
        let n = h * levels;
        Ok(EquationSystem {
            base: base.clone(),
            h,
            levels,
            cs,
            basis: SeriesMatrix::identity(n, base.prec()),
        })
    }

    pub fn rank(&self) -> usize {
        self.h * self.levels
    }
}

/// Choose the basis `{m_j, [pi0] m_j, ..., [pi0]^{N-1} m_j}` and read off
/// the `C_i`.
pub fn build_equations(m: &SigmaModule) -> Result<EquationSystem> {
    let base = m.base();
    let r = base.ring();
    let f = r.field();
    let prec = base.prec();
    let n = m.rank();
    if n == 0 {
        return Err(Error::Precondition("the zero module has no equations".into()));
    }
    let levels = m.nilpotency_index().max(1);
    if !n.is_multiple_of(levels) {
        return Err(Error::Precondition(format!(
            "rank {n} is not a multiple of the [pi0]-nilpotency index {levels}"
        )));
    }
    let h = n / levels;
    let top = r.mat_pow(m.d(), (levels - 1) as u32);
    let top_res = top
        .residue()
        .ok_or_else(|| Error::Precondition("D is not integral".into()))?;
    let gens = top_res.transpose().rref(f).pivots;
    if gens.len() != h {
        return Err(Error::Precondition(format!(
            "no basis of the form m, [pi0]m, ..., [pi0]^{}m: residue of D^{} has rank {} instead of {h}",
            levels - 1,
            levels - 1,
            gens.len()
        )));
    }
    let g = SeriesMatrix::identity(n, prec).select_rows(&gens);
    let mut basis = r.mat_mul(&g, &r.mat_pow(m.d(), (levels - 1) as u32));
    for s in 2..=levels {
        let block = r.mat_mul(&g, &r.mat_pow(m.d(), (levels - s) as u32));
        basis = basis.vstack(&block);
    }
    let basis = basis.truncate(prec);
    if !r.det(&basis).value.is_unit() {
        return Err(Error::Precondition("the [pi0]-orbits of the generators do not form a basis".into()));
    }
    let pinv = r.inverse(&basis)?;
    let c2 = r.mat_mul(&r.mat_mul(&r.mat_sigma(&basis), m.c()), &pinv).truncate(prec);
    let d2 = r.mat_mul(&r.mat_mul(&basis, m.d()), &pinv).truncate(prec);
    let shifted = r.mat_sub(&d2, &SeriesMatrix::scalar(n, base.pi0(), prec));
    let b2 = r.mat_mul(&shifted, &r.inverse(&c2)?).truncate(prec);
    let block = |mat: &SeriesMatrix, s: usize, t: usize| mat.submatrix(s * h..(s + 1) * h, t * h..(t + 1) * h);

    // D' must be the block shift n_s -> n_{s-1}.
    for s in 0..levels {
        for t in 0..levels {
            let want = if s >= 1 && t == s - 1 { SeriesMatrix::identity(h, prec) } else { SeriesMatrix::zeros(h, h, prec) };
            if !r.mat_eq(&block(&d2, s, t), &want).holds {
                return Err(Error::Invalid("[pi0] is not a shift in the chosen basis".into()));
            }
        }
    }
    let cs: Vec<SeriesMatrix> = (0..levels).map(|i| r.mat_neg(&block(&b2, i, 0))).collect();
    for s in 0..levels {
        for t in 0..levels {
            let want = if t <= s { r.mat_neg(&cs[s - t]) } else { SeriesMatrix::zeros(h, h, prec) };
            if !r.mat_eq(&block(&b2, s, t), &want).holds {
                return Err(Error::Invalid("the strictness relation is not block Toeplitz".into()));
            }
        }
    }
    if !cs[0].is_integral().holds {
        return Err(Error::Invalid("C_1 is not integral".into()));
    }
    if r.det(&cs[0]).kind != DetKind::Nonzero {
        return Err(Error::Invalid("det C_1 vanishes".into()));
    }
    Ok(EquationSystem { base: base.clone(), h, levels, cs, basis })
}
