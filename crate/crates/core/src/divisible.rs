//! `pi0`-divisible towers of modules and embeddings into them.
//!
//! Every tower built here is block Toeplitz: level `l` has basis
//! `n_1, ..., n_l` (blocks of `h` vectors), `[pi0] n_s = n_{s-1}`, and
//! `Phi n_s = sum_{k < s} c_k n_{s-k}` for a sequence of `h x h` matrices
//! `c_0, c_1, ...`. The inclusion `i_l` is `n_s -> n_s` and the projection
//! `j_l` is `n_s -> n_{s-1}`, so that `j` followed by `i` is `[pi0]`.
//!
//! For a module killed by `[pi0]` the generators `m_1^{(k)}, m_2^{(k)}` of
//! the classical construction form the block `n_k`, with
//! `c_0 = [[C~, 0], [E, C]]`, `c_1 = [[0, E], [0, 0]]` and `C C~ = pi0 E`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::base::BaseData;
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::modcat::{validate_module, ModuleHom, SigmaModule};
use crate::points::build_equations;
use crate::series::{Series, Verdict};

/// The extension calculus used by the inductive step.
pub use crate::modcat::{baer_difference, pullback, pushout};

#[derive(Clone, Debug)]
pub struct DivisibleTower {
    pub levels: Vec<SigmaModule>,
    /// `i[l-1]: M^(l) -> M^(l+1)`.
    pub i: Vec<ModuleHom>,
    /// `j[l-1]: M^(l+1) -> M^(l)`.
    pub j: Vec<ModuleHom>,
    /// Rank added per level.
    pub height: usize,
    /// How the basis of each level is laid out.
    pub layout: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelCheck {
    /// The level (or the smaller level of a pair) the check is about.
    pub level: usize,
    pub name: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct DivisibleReport {
    pub checks: Vec<LevelCheck>,
    pub warning: Option<String>,
}

impl DivisibleReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.verdict.holds)
    }

    pub fn first_failure(&self) -> Option<&LevelCheck> {
        self.checks.iter().find(|c| !c.verdict.holds)
    }
}

fn shift_block(h: usize, rows: usize, cols: usize, prec: i64) -> SeriesMatrix {
    // rows, cols in blocks; identity at block (s, s-1).
    let mut m = SeriesMatrix::zeros(rows * h, cols * h, prec);
    for s in 1..rows {
        if s - 1 < cols {
            for a in 0..h {
                m.set(s * h + a, (s - 1) * h + a, Series::one(prec));
            }
        }
    }
    m
}

/// The tower with Frobenius coefficients `c_0, c_1, ...` (missing ones are
/// zero), built up to `levels`.
pub fn toeplitz_tower(base: &BaseData, coeffs: &[SeriesMatrix], levels: usize, layout: &str) -> Result<DivisibleTower> {
    let h = coeffs.first().map_or(0, SeriesMatrix::rows);
    if h == 0 || levels == 0 || coeffs.iter().any(|c| c.rows() != h || c.cols() != h) {
        return Err(Error::Shape("need at least one level and square coefficient blocks".into()));
    }
    let prec = base.prec();
    let mut mods = Vec::with_capacity(levels);
    for l in 1..=levels {
        let mut c = SeriesMatrix::zeros(l * h, l * h, prec);
        for s in 0..l {
            for t in 0..=s {
                if let Some(blk) = coeffs.get(s - t) {
                    for a in 0..h {
                        for b in 0..h {
                            c.set(s * h + a, t * h + b, blk.get(a, b).clone());
                        }
                    }
                }
            }
        }
        let d = shift_block(h, l, l, prec);
        let m = validate_module(base, c, d).map_err(|e| match e {
            Error::Validation { violation, .. } => {
                Error::Invalid(format!("tower level {l} is not a valid module: {violation}"))
            }
            other => other,
        })?;
        mods.push(m);
    }
    let mut is = Vec::new();
    let mut js = Vec::new();
    for l in 1..levels {
        let n = l * h;
        let inc = SeriesMatrix::identity(n, prec).hstack(&SeriesMatrix::zeros(n, h, prec));
        is.push(ModuleHom::new(&mods[l - 1], &mods[l], inc)?);
        js.push(ModuleHom::new(&mods[l], &mods[l - 1], shift_block(h, l + 1, l, prec))?);
    }
    Ok(DivisibleTower { levels: mods, i: is, j: js, height: h, layout: layout.into() })
}

/// The classical tower over a module killed by `[pi0]`, with the
/// epimorphism `M^(1) -> M`, `m_1 -> 0`, `m_2 -> m`.
pub fn build_tower_n1(m: &SigmaModule, levels: usize) -> Result<(DivisibleTower, ModuleHom)> {
    let base = m.base();
    let r = base.ring();
    let prec = base.prec();
    let n = m.rank();
    if n == 0 {
        return Err(Error::Precondition("the zero module needs no tower".into()));
    }
    if !m.d().is_zero().holds {
        return Err(Error::Precondition("[pi0] does not vanish on M".into()));
    }
    let ctil = r.mat_scale(&r.inverse(m.c())?, base.pi0()).truncate(prec);
    if !ctil.is_integral().holds {
        return Err(Error::Precondition("pi0 C^-1 is not integral".into()));
    }
    let e = SeriesMatrix::identity(n, prec);
    let z = SeriesMatrix::zeros(n, n, prec);
    let c0 = ctil.hstack(&z).vstack(&e.hstack(m.c()));
    let c1 = z.hstack(&e).vstack(&z.hstack(&z));
    let tower = toeplitz_tower(
        base,
        &[c0, c1],
        levels.max(1),
        "block k = (m_1^(k), m_2^(k)); Phi m_1^(k) = C~ m_1^(k) + m_2^(k-1), Phi m_2^(k) = C m_2^(k) + m_1^(k)",
    )?;
    let surj = SeriesMatrix::zeros(n, n, prec).vstack(&e);
    let hom = ModuleHom::new(&tower.levels[0], m, surj)?;
    if !hom.is_surjective().holds {
        return Err(Error::Invalid("the projection onto M is not surjective".into()));
    }
    Ok((tower, hom))
}

fn compose_chain(homs: &[ModuleHom]) -> Result<SeriesMatrix> {
    let mut it = homs.iter();
    let first = it.next().ok_or_else(|| Error::Precondition("empty chain".into()))?;
    let mut f = first.clone();
    for g in it {
        f = f.then(g)?;
    }
    Ok(f.matrix().clone())
}

/// Check purity of every `i`, surjectivity of every `j`, the kernel
/// identity `im(i_{m m'}) = ker [pi0^m]` and `j_{m' m}` then `i_{m m'}` equal
/// to `[pi0^{m'-m}]`.
pub fn verify_divisible(t: &DivisibleTower) -> DivisibleReport {
    let mut checks = Vec::new();
    let levels = t.levels.len();
    if levels < 2 {
        return DivisibleReport { checks, warning: Some("a single level: nothing to check".into()) };
    }
    let push = |checks: &mut Vec<LevelCheck>, level: usize, name: String, verdict: Verdict| {
        checks.push(LevelCheck { level, name, verdict });
    };
    for (l, m) in t.levels.iter().enumerate() {
        push(&mut checks, l + 1, "valid module".into(), Verdict::new(m.certificate().is_valid(), m.base().prec()));
    }
    for l in 0..levels - 1 {
        push(&mut checks, l + 1, "i is a morphism".into(), crate::modcat::hom_check(&t.i[l]).verdict());
        push(&mut checks, l + 1, "j is a morphism".into(), crate::modcat::hom_check(&t.j[l]).verdict());
        push(&mut checks, l + 1, "i is pure".into(), t.i[l].is_pure_embedding());
        push(&mut checks, l + 1, "j is surjective".into(), t.j[l].is_surjective());
    }
    for m in 1..levels {
        for mp in m + 1..=levels {
            let top = &t.levels[mp - 1];
            let r = top.base().ring();
            let inc = match compose_chain(&t.i[m - 1..mp - 1]) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let proj: Vec<ModuleHom> = t.j[m - 1..mp - 1].iter().rev().cloned().collect();
            let pr = match compose_chain(&proj) {
                Ok(x) => x,
                Err(_) => continue,
            };
            let dm = r.mat_pow(top.d(), m as u32);
            let rank_dm = r.elementary_divisors(&dm).iter().filter(|x| x.is_some()).count();
            let killed = r.mat_mul(&inc, &dm).is_zero();
            let full = inc.rows() + rank_dm == top.rank();
            push(
                &mut checks,
                m,
                format!("image of M^({m}) is ker [pi0^{m}] on M^({mp})"),
                killed.and(Verdict::exact(full)).and(r.is_pure(&inc)),
            );
            let lhs = r.mat_mul(&pr, &inc);
            let rhs = r.mat_pow(top.d(), (mp - m) as u32);
            push(&mut checks, m, format!("j then i is [pi0^{}] on M^({mp})", mp - m), r.mat_eq(&lhs, &rhs));
        }
    }
    DivisibleReport { checks, warning: None }
}

/// The dual `(B^t, D^t)`; morphisms dualize by transposition, which swaps
/// surjections and pure embeddings.
pub fn dual_module(m: &SigmaModule) -> Result<SigmaModule> {
    validate_module(m.base(), m.b().transpose(), m.d().transpose())
}

/// `f: X -> Y` gives `f^t: Y^dual -> X^dual`.
pub fn dual_hom(f: &ModuleHom, source_dual: &SigmaModule, target_dual: &SigmaModule) -> Result<ModuleHom> {
    ModuleHom::new(target_dual, source_dual, f.matrix().transpose())
}

/// Levels dualized, with `i` and `j` exchanging roles.
pub fn dual_tower(t: &DivisibleTower) -> Result<DivisibleTower> {
    let levels: Vec<SigmaModule> = t.levels.iter().map(dual_module).collect::<Result<_>>()?;
    let mut is = Vec::new();
    let mut js = Vec::new();
    for l in 0..levels.len().saturating_sub(1) {
        is.push(dual_hom(&t.j[l], &levels[l + 1], &levels[l])?);
        js.push(dual_hom(&t.i[l], &levels[l], &levels[l + 1])?);
    }
    Ok(DivisibleTower { levels, i: is, j: js, height: t.height, layout: format!("dual of: {}", t.layout) })
}

/// The Toeplitz tower of which `m` is level `N`, if its strictness data
/// extend: returns the tower and the isomorphism `m -> M^(N)`.
pub fn self_tower(m: &SigmaModule, levels: usize) -> Result<(DivisibleTower, ModuleHom)> {
    let base = m.base();
    let r = base.ring();
    let prec = base.prec();
    let sys = build_equations(m)?;
    let h = sys.h;
    let n_lv = sys.levels;
    let total = levels.max(n_lv);
    // b(z) = -(C_1 + C_2 z + ...), c(z) = b(z)^{-1} (z - pi0).
    let b: Vec<SeriesMatrix> = sys.cs.iter().map(|c| r.mat_neg(c)).collect();
    let b0_inv = r.inverse(&b[0])?;
    let mut c: Vec<SeriesMatrix> = Vec::with_capacity(total);
    for k in 0..total {
        let mut rhs = if k == 0 {
            r.mat_neg(&SeriesMatrix::scalar(h, base.pi0(), prec))
        } else if k == 1 {
            SeriesMatrix::identity(h, prec)
        } else {
            SeriesMatrix::zeros(h, h, prec)
        };
        for i in 1..=k.min(b.len() - 1) {
            rhs = r.mat_sub(&rhs, &r.mat_mul(&b[i], &c[k - i]));
        }
        let ck = r.mat_mul(&b0_inv, &rhs).truncate(prec);
        if !ck.is_integral().holds {
            return Err(Error::Precondition(format!(
                "coefficient {k} of the Frobenius series is not integral: M is not a level of its own tower"
            )));
        }
        c.push(ck);
    }
    let tower = toeplitz_tower(base, &c, total, "n_s = [pi0^(N-s)] m, blocks of the equation basis")?;
    let u = r.inverse(&sys.basis)?.truncate(prec);
    let iso = ModuleHom::new(m, &tower.levels[n_lv - 1], u)?;
    Ok((tower, iso))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbedRoute {
    /// `M` is already a level of a Toeplitz tower.
    SelfTower,
    /// The dual of `M` is a level of a Toeplitz tower.
    DualSelfTower,
    /// `M` is killed by `[pi0]`: dual of the classical tower over `M^dual`.
    DualClassical,
}

#[derive(Clone, Debug)]
pub struct Embedding {
    pub tower: DivisibleTower,
    /// The level `N` receiving `M`.
    pub level: usize,
    /// Pure embedding `M -> M^(N)`.
    pub map: ModuleHom,
    pub route: EmbedRoute,
    pub report: DivisibleReport,
    /// Residue rank criterion and a unimodular completion both succeed.
    pub pure: Verdict,
}

/// A pure embedding of `m` into level `n` of a certified divisible tower.
pub fn embed_into_divisible(m: &SigmaModule, n: usize) -> Result<Embedding> {
    let base = m.base();
    let r = base.ring();
    let idx = m.nilpotency_index();
    if m.rank() == 0 {
        return Err(Error::Precondition("the zero module".into()));
    }
    if n == 0 || idx > n {
        return Err(Error::Precondition(format!("[pi0^{n}] does not kill M (index {idx})")));
    }
    let levels = n.max(2);
    let attempt = || -> Result<(DivisibleTower, ModuleHom, EmbedRoute)> {
        if let Ok((t, iso)) = self_tower(m, levels) {
            return Ok((t, iso, EmbedRoute::SelfTower));
        }
        let md = dual_module(m)?;
        if let Ok((t, iso)) = self_tower(&md, levels) {
            let td = dual_tower(&t)?;
            let lvl = md.nilpotency_index().max(1);
            // iso: M^dual -> T^(lvl) with matrix P; its transpose inverts to M -> (T^(lvl))^dual.
            let inv = r.inverse(&iso.matrix().transpose())?;
            let map = ModuleHom::new(m, &td.levels[lvl - 1], inv.truncate(base.prec()))?;
            return Ok((td, map, EmbedRoute::DualSelfTower));
        }
        if idx <= 1 {
            let (t, surj) = build_tower_n1(&md, levels)?;
            let td = dual_tower(&t)?;
            let map = ModuleHom::new(m, &td.levels[0], surj.matrix().transpose())?;
            return Ok((td, map, EmbedRoute::DualClassical));
        }
        Err(Error::Unsupported(
            "no constructive embedding: M is not a level of its own tower or of the dual one, and is not killed by [pi0]"
                .into(),
        ))
    };
    let (tower, mut map, route) = attempt()?;
    let start = map.target().rank() / tower.height;
    if start > n {
        return Err(Error::Invalid(format!("embedding landed in level {start} above {n}")));
    }
    for l in start..n {
        map = map.then(&tower.i[l - 1])?;
    }
    let report = verify_divisible(&tower);
    if !report.holds() {
        let f = report.first_failure().unwrap();
        return Err(Error::Invalid(format!("tower check failed at level {}: {}", f.level, f.name)));
    }
    let pure = map
        .is_pure_embedding()
        .and(Verdict::exact(r.unimodular_completion(map.matrix(), base.prec()).is_ok()));
    if !pure.holds {
        return Err(Error::Invalid("the embedding is not pure".into()));
    }
    Ok(Embedding { tower, level: n, map, route, report, pure })
}
