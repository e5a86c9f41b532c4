//! Filtered-module style invariants of `pi0`-killed modules.
//!
//! Three flavors, all for modules with `[pi0] = 0` and
//! `pi0 M ⊂ Phi(M_sigma) ⊂ M`:
//!
//! * [`sh_e1`] (`e = 1`): `M^0 = M / pi0 M`, `phi_0 = Phi mod pi0`,
//!   `M^1 = Ker phi_0` and `phi_1` induced by `Phi / pi0`.
//! * [`sh_general`] (`e <= q - 1`): inside `A = pi^{1-e} M / pi M` the
//!   submodule `Mbar` generated by `(pi/pi0) Phi(m)` and by `Phi(m) / pi0`
//!   for `m` with `(pi/pi0) Phi(m) ≡ 0`; `Mbar^0 = M / pi M`.
//! * [`sh_prime`] (`e <= q - 1`): inside `pi^{-e} M / pi M` the submodule
//!   generated by `Phi(m) / pi0`, with `phi` induced by `Phi / pi0`.
//!
//! Finite-length modules over `O / (pi0)` are stored as `k`-spaces with a
//! nilpotent matrix for the action of `pi`. The ambient space has basis
//! `pi^j m_i` for `jmin <= j <= 0`, in the order `(i, j)` with `j` fastest.
//! Subspaces are row bases in ambient coordinates. A semilinear map is the
//! matrix of images of a basis: `phi(sum a_r v_r) = sum a_r^q phi(v_r)`.
//!
//! Normalization between the first two flavors when `e = 1`: the spaces,
//! `M^1` and `phi_1` coincide, and `phi_0` of the general flavor is
//! `u^{-1}` times `phi_0` of the first, where `u` is the residue of
//! `pi0 / pi`. With `pi0 = pi` the two objects are equal.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::base::BaseData;
use crate::error::{Error, Result};
use crate::field::GaloisField;
use crate::kmat::KMat;
use crate::matrix::SeriesMatrix;
use crate::modcat::{ModuleHom, SigmaModule};
use crate::series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShFlavor {
    E1,
    General,
    Prime,
}

impl ShFlavor {
    pub fn name(&self) -> &'static str {
        match self {
            ShFlavor::E1 => "sh_e1",
            ShFlavor::General => "sh_general",
            ShFlavor::Prime => "sh_prime",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ShObject {
    pub flavor: ShFlavor,
    pub q: u64,
    /// Rank of the underlying module.
    pub rank: usize,
    /// Lowest power of `pi` in the ambient space.
    pub jmin: i64,
    /// Ambient `k`-dimension, `rank * (1 - jmin)`.
    pub dim: usize,
    /// Action of `pi` on the ambient space (rows are images).
    pub pi_action: KMat,
    /// `M^0` for the first flavor, `Mbar` otherwise.
    pub m_bar: KMat,
    pub m0: KMat,
    pub m1: KMat,
    /// Images of the rows of `m0`.
    pub phi0: KMat,
    /// Images of the rows of `m1`; empty for the primed flavor.
    pub phi1: KMat,
    field: Arc<GaloisField>,
}

/// Outcome of the axiom checks of one object.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShAxioms {
    /// The images of `phi_0` and `phi_1` span `Mbar` over `O`.
    pub spanning: bool,
    /// `M mod pi M` is the kernel of `pi` on `Mbar`. Reported, but not part
    /// of [`ShAxioms::holds`]: for the general flavor it can fail, e.g. for
    /// `C = [[pi^2, pi], [0, 1]]` with `e = 2`, `q = 3`.
    pub kernel_of_pi: bool,
    /// `M^1` is exactly the kernel of `phi_0`.
    pub m1_is_kernel: bool,
}

impl ShAxioms {
    /// The spanning axiom together with `M^1 = Ker phi_0`.
    pub fn holds(&self) -> bool {
        self.spanning && self.m1_is_kernel
    }
}

impl ShObject {
    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    fn frob(&self, a: u32) -> u32 {
        self.field.pow(a, self.q)
    }

    /// Apply the semilinear map with images `images` of the basis `basis` to
    /// `w`, which must lie in the span of `basis`.
    pub fn apply(&self, basis: &KMat, images: &KMat, w: &[u32]) -> Option<Vec<u32>> {
        let f = &*self.field;
        if basis.rows == 0 {
            return w.iter().all(|&x| x == 0).then(|| vec![0; self.dim]);
        }
        let a = basis.transpose().solve(f, w)?;
        let mut out = vec![0u32; images.cols];
        for (r, &ar) in a.iter().enumerate() {
            let c = self.frob(ar);
            if c == 0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(images.row(r)) {
                *o = f.add(*o, f.mul(c, x));
            }
        }
        Some(out)
    }

    /// The `O`-span of the rows of `gens`: the `k`-span closed under `pi`.
    pub fn o_span(&self, gens: &KMat) -> KMat {
        o_span(&self.field, &self.pi_action, gens)
    }

    pub fn axioms(&self) -> ShAxioms {
        let f = &*self.field;
        let images = self.phi0.vstack(&self.phi1);
        let span = self.o_span(&images);
        let spanning = same_space(f, &span, &self.m_bar);

        let kernel_of_pi = match self.flavor {
            // The first flavor has pi = 0 on M^0.
            ShFlavor::E1 => same_space(f, &self.m0, &self.m_bar),
            _ => {
                // Vectors of Mbar killed by pi: coefficients a with a * Mbar * P = 0.
                let mp = self.m_bar.mul(f, &self.pi_action);
                let ker = mp.left_kernel(f).mul(f, &self.m_bar);
                same_space(f, &ker, &self.m0)
            }
        };

        let m1_is_kernel = {
            let in_m0 = self.m1.rows == 0 || self.m0.row_space_contains(f, &self.m1);
            let killed = (0..self.m1.rows).all(|r| {
                self.apply(&self.m0, &self.phi0, self.m1.row(r))
                    .is_some_and(|v| v.iter().all(|&x| x == 0))
            });
            let dim_ok = self.m1.rows == self.m0.rows - self.phi0.rank(f);
            let independent = self.m1.rank(f) == self.m1.rows;
            in_m0 && killed && dim_ok && independent
        };
        ShAxioms { spanning, kernel_of_pi, m1_is_kernel }
    }
}

fn same_space(f: &GaloisField, a: &KMat, b: &KMat) -> bool {
    let ra = if a.rows == 0 { 0 } else { a.rank(f) };
    let rb = if b.rows == 0 { 0 } else { b.rank(f) };
    if ra != rb {
        return false;
    }
    if ra == 0 {
        return true;
    }
    a.vstack(b).rank(f) == ra
}

fn o_span(f: &GaloisField, pi_action: &KMat, gens: &KMat) -> KMat {
    let dim = pi_action.rows;
    let mut basis = crate::kmat::EchelonBasis::new();
    let mut out: Vec<Vec<u32>> = Vec::new();
    let mut queue: Vec<Vec<u32>> = (0..gens.rows).map(|r| gens.row(r).to_vec()).collect();
    while let Some(v) = queue.pop() {
        if basis.insert(f, &v) {
            let row = KMat::from_rows(core::slice::from_ref(&v), dim);
            queue.push(row.mul(f, pi_action).data);
            out.push(v);
        }
    }
    KMat::from_rows(&out, dim)
}

/// Ambient layout `pi^j m_i`, `jmin <= j <= 0`.
#[derive(Clone, Copy, Debug)]
struct Ambient {
    rank: usize,
    jmin: i64,
}

impl Ambient {
    fn width(&self) -> usize {
        (1 - self.jmin) as usize
    }

    fn dim(&self) -> usize {
        self.rank * self.width()
    }

    fn index(&self, i: usize, j: i64) -> usize {
        i * self.width() + (j - self.jmin) as usize
    }

    fn pi_action(&self) -> KMat {
        let mut p = KMat::zeros(self.dim(), self.dim());
        for i in 0..self.rank {
            for j in self.jmin..0 {
                p.set(self.index(i, j), self.index(i, j + 1), 1);
            }
        }
        p
    }

    /// Coordinates of `sum_i v_i m_i` modulo `pi M`.
    fn coords(&self, v: &[Series]) -> Result<Vec<u32>> {
        let mut out = vec![0u32; self.dim()];
        for (i, s) in v.iter().enumerate() {
            if !s.is_zero() && s.val() < self.jmin {
                return Err(Error::Invalid(format!(
                    "element of valuation {} lies outside pi^{} M",
                    s.val(),
                    self.jmin
                )));
            }
            for j in self.jmin..=0 {
                let c = s
                    .coeff(j)
                    .ok_or_else(|| Error::PrecisionInsufficient(format!("coefficient of pi^{j} is not known")))?;
                out[self.index(i, j)] = c;
            }
        }
        Ok(out)
    }

    /// Embed a vector of `M / pi M` at `j = 0`.
    fn from_residue(&self, x: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; self.dim()];
        for (i, &c) in x.iter().enumerate() {
            out[self.index(i, 0)] = c;
        }
        out
    }
}

/// `[pi0] = 0` and `pi0 C^{-1}` integral.
fn check_killed(m: &SigmaModule) -> Result<()> {
    if !m.d().is_zero().holds {
        return Err(Error::Precondition("[pi0] does not act by zero".into()));
    }
    let b = m.base();
    let r = b.ring();
    let n = m.rank();
    let target = SeriesMatrix::scalar(n, b.pi0(), b.prec());
    let sol = r.solve_left(m.c(), &target)?;
    if !sol.integral.holds {
        return Err(Error::Precondition("pi0 M is not contained in Phi(M)".into()));
    }
    if !m.c().is_integral().holds {
        return Err(Error::Precondition("Phi(M) is not contained in M".into()));
    }
    Ok(())
}

/// `x -> x^q` coordinatewise, lifted to constant series.
fn sigma_lift(base: &BaseData, x: &[u32]) -> Vec<Series> {
    let r = base.ring();
    let p = base.prec();
    x.iter().map(|&c| r.constant(r.sigma_const(c), p)).collect()
}

/// `scale * sigma(x) C` for a row vector `x` of series.
fn phi_row(base: &BaseData, c: &SeriesMatrix, x: &[Series], scale: &Series) -> Vec<Series> {
    let r = base.ring();
    let n = c.cols();
    (0..n)
        .map(|j| {
            let mut acc = Series::zero(base.prec());
            for (i, xi) in x.iter().enumerate() {
                acc = r.add(&acc, &r.mul(xi, c.get(i, j)));
            }
            r.mul(&acc, scale)
        })
        .collect()
}

fn unit_rows(n: usize) -> Vec<Vec<u32>> {
    (0..n)
        .map(|i| {
            let mut v = vec![0u32; n];
            v[i] = 1;
            v
        })
        .collect()
}

/// Kernel of the semilinear map with residue images `img` (rows indexed by
/// the standard basis of `k^n`): `sigma^{-1}` of the left kernel.
fn semilinear_kernel(base: &BaseData, img: &KMat) -> KMat {
    let f = base.field();
    let r = base.ring();
    let lk = img.left_kernel(f);
    lk.map(|c| r.sigma_inv_const(c))
}

/// Common build for the two unprimed flavors: `phi_0` from `scale0 * Phi`,
/// `phi_1` from `Phi / pi0` on the kernel.
fn build_two_map(m: &SigmaModule, flavor: ShFlavor, amb: Ambient, scale0: &Series) -> Result<ShObject> {
    let base = m.base();
    let r = base.ring();
    let f = base.field();
    let n = m.rank();
    let inv_pi0 = r.inv(base.pi0())?;

    let phi0_rows: Vec<Vec<u32>> = unit_rows(n)
        .iter()
        .map(|x| amb.coords(&phi_row(base, m.c(), &sigma_lift(base, x), scale0)))
        .collect::<Result<_>>()?;
    let phi0 = KMat::from_rows(&phi0_rows, amb.dim());
    let m0 = KMat::from_rows(&unit_rows(n).iter().map(|x| amb.from_residue(x)).collect::<Vec<_>>(), amb.dim());

    // Kernel in coordinates of M / pi M: phi0 restricted to the j = 0 part is
    // all of phi0, so work with the full rows.
    let ker = semilinear_kernel(base, &phi0);
    let mut m1_rows = Vec::new();
    let mut phi1_rows = Vec::new();
    for k in 0..ker.rows {
        let x = ker.row(k);
        m1_rows.push(amb.from_residue(x));
        let img = phi_row(base, m.c(), &sigma_lift(base, x), &inv_pi0);
        if img.iter().any(|s| !s.is_zero() && s.val() < 0) {
            return Err(Error::Invalid("Phi / pi0 of a kernel vector is not integral".into()));
        }
        phi1_rows.push(amb.coords(&img)?);
    }
    let m1 = KMat::from_rows(&m1_rows, amb.dim());
    let phi1 = KMat::from_rows(&phi1_rows, amb.dim());
    let pi_action = amb.pi_action();
    let m_bar = match flavor {
        ShFlavor::E1 => m0.clone(),
        _ => o_span(f, &pi_action, &phi0.vstack(&phi1)),
    };
    Ok(ShObject {
        flavor,
        q: base.q(),
        rank: n,
        jmin: amb.jmin,
        dim: amb.dim(),
        pi_action,
        m_bar,
        m0,
        m1,
        phi0,
        phi1,
        field: f.clone(),
    })
}

fn need_prec(m: &SigmaModule, want: i64) -> Result<()> {
    let have = m.c().min_prec().min(m.base().prec());
    if have < want {
        return Err(Error::PrecisionInsufficient(format!("need C to precision {want}, have {have}")));
    }
    Ok(())
}

/// The first flavor, for `e = 1`.
pub fn sh_e1(m: &SigmaModule) -> Result<ShObject> {
    let base = m.base();
    if base.e() != 1 {
        return Err(Error::Precondition(format!("sh_e1 needs e = 1, got e = {}", base.e())));
    }
    check_killed(m)?;
    need_prec(m, 2)?;
    let one = Series::one(base.prec());
    build_two_map(m, ShFlavor::E1, Ambient { rank: m.rank(), jmin: 0 }, &one)
}

/// The general flavor, for `e <= q - 1`.
pub fn sh_general(m: &SigmaModule) -> Result<ShObject> {
    let base = m.base();
    let e = base.e();
    if e as u64 > base.q() - 1 {
        return Err(Error::Precondition(format!("sh_general needs e <= q - 1, got e = {e}, q = {}", base.q())));
    }
    check_killed(m)?;
    need_prec(m, e + 1)?;
    let r = base.ring();
    let scale = r.div(&Series::pi_pow(1, base.prec()), base.pi0())?;
    build_two_map(m, ShFlavor::General, Ambient { rank: m.rank(), jmin: 1 - e }, &scale)
}

/// The primed flavor. `Phi / pi0` is only well defined on `M / pi M` when
/// `e <= q - 1`, so that is required here as well.
pub fn sh_prime(m: &SigmaModule) -> Result<ShObject> {
    let base = m.base();
    let e = base.e();
    if e as u64 > base.q() - 1 {
        return Err(Error::Precondition(format!(
            "Phi / pi0 is not well defined modulo pi M unless e <= q - 1 (e = {e}, q = {})",
            base.q()
        )));
    }
    check_killed(m)?;
    need_prec(m, e + 1)?;
    let r = base.ring();
    let f = base.field();
    let n = m.rank();
    let amb = Ambient { rank: n, jmin: -e };
    let inv_pi0 = r.inv(base.pi0())?;
    let phi_rows: Vec<Vec<u32>> = unit_rows(n)
        .iter()
        .map(|x| amb.coords(&phi_row(base, m.c(), &sigma_lift(base, x), &inv_pi0)))
        .collect::<Result<_>>()?;
    let phi0 = KMat::from_rows(&phi_rows, amb.dim());
    let m0 = KMat::from_rows(&unit_rows(n).iter().map(|x| amb.from_residue(x)).collect::<Vec<_>>(), amb.dim());
    let pi_action = amb.pi_action();
    let m_bar = o_span(f, &pi_action, &phi0);
    let ker = semilinear_kernel(base, &phi0);
    let m1 = KMat::from_rows(&(0..ker.rows).map(|k| amb.from_residue(ker.row(k))).collect::<Vec<_>>(), amb.dim());
    Ok(ShObject {
        flavor: ShFlavor::Prime,
        q: base.q(),
        rank: n,
        jmin: amb.jmin,
        dim: amb.dim(),
        pi_action,
        m_bar,
        m0,
        m1,
        phi0,
        phi1: KMat::zeros(0, amb.dim()),
        field: f.clone(),
    })
}

pub fn sh(m: &SigmaModule, flavor: ShFlavor) -> Result<ShObject> {
    match flavor {
        ShFlavor::E1 => sh_e1(m),
        ShFlavor::General => sh_general(m),
        ShFlavor::Prime => sh_prime(m),
    }
}

/// The flavors whose preconditions hold for `m`.
pub fn applicable_flavors(m: &SigmaModule) -> Vec<ShFlavor> {
    let e = m.base().e();
    let q = m.base().q();
    let mut out = Vec::new();
    if check_killed(m).is_err() {
        return out;
    }
    if e == 1 {
        out.push(ShFlavor::E1);
    }
    if (e as u64) < q {
        out.push(ShFlavor::General);
        out.push(ShFlavor::Prime);
    }
    out
}

/// Whether the first two flavors agree on an `e = 1` module after the
/// normalization `phi_0^general = u^{-1} phi_0^e1`.
pub fn e1_agreement(a: &ShObject, b: &ShObject, base: &BaseData) -> bool {
    if a.flavor != ShFlavor::E1 || b.flavor != ShFlavor::General || a.dim != b.dim || base.e() != 1 {
        return false;
    }
    let f = base.field();
    let Some(u) = base.pi0().coeff(1) else {
        return false;
    };
    let Some(uinv) = f.inv(u) else {
        return false;
    };
    let scaled = a.phi0.map(|x| f.mul(x, uinv));
    a.m0 == b.m0
        && scaled == b.phi0
        && a.m1 == b.m1
        && a.phi1 == b.phi1
        && same_space(f, &a.m_bar, &b.m_bar)
}

/// Whether the map induced by a module hom carries each piece into its
/// counterpart and commutes with the semilinear maps on generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShFunctoriality {
    pub maps_m_bar: bool,
    pub maps_m0: bool,
    pub maps_m1: bool,
    pub commutes_phi0: bool,
    pub commutes_phi1: bool,
}

impl ShFunctoriality {
    pub fn holds(&self) -> bool {
        self.maps_m_bar && self.maps_m0 && self.maps_m1 && self.commutes_phi0 && self.commutes_phi1
    }
}

/// The `k`-linear map of ambient spaces induced by `U`:
/// `pi^j m_i -> pi^j sum_k U_ik m_k`.
pub fn induced_ambient_map(f: &ModuleHom, jmin: i64) -> Result<KMat> {
    let u = f.matrix();
    let src = Ambient { rank: u.rows(), jmin };
    let dst = Ambient { rank: u.cols(), jmin };
    let mut out = KMat::zeros(src.dim(), dst.dim());
    for i in 0..u.rows() {
        for k in 0..u.cols() {
            let s = u.get(i, k);
            for j in jmin..=0 {
                for j2 in j..=0 {
                    let c = s
                        .coeff(j2 - j)
                        .ok_or_else(|| Error::PrecisionInsufficient("hom matrix precision".into()))?;
                    if c != 0 {
                        out.set(src.index(i, j), dst.index(k, j2), c);
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn check_functoriality(f: &ModuleHom, flavor: ShFlavor) -> Result<ShFunctoriality> {
    let a = sh(f.source(), flavor)?;
    let b = sh(f.target(), flavor)?;
    let field = a.field.clone();
    let fld = &*field;
    let map = induced_ambient_map(f, a.jmin)?;
    let image = |s: &KMat| if s.rows == 0 { KMat::zeros(0, b.dim) } else { s.mul(fld, &map) };
    let contained = |big: &KMat, small: &KMat| small.rows == 0 || small.is_zero() || (big.rows > 0 && big.row_space_contains(fld, small));
    let maps_m_bar = contained(&b.m_bar, &image(&a.m_bar));
    let maps_m0 = contained(&b.m0, &image(&a.m0));
    let maps_m1 = contained(&b.m1, &image(&a.m1));
    let commutes = |basis_a: &KMat, imgs_a: &KMat, basis_b: &KMat, imgs_b: &KMat| -> bool {
        (0..basis_a.rows).all(|r| {
            let v = basis_a.row(r);
            let fv = KMat::from_rows(&[v.to_vec()], a.dim).mul(fld, &map);
            let lhs = b.apply(basis_b, imgs_b, &fv.data);
            let rhs = KMat::from_rows(&[imgs_a.row(r).to_vec()], a.dim).mul(fld, &map).data;
            lhs.is_some_and(|l| l == rhs)
        })
    };
    let commutes_phi0 = commutes(&a.m0, &a.phi0, &b.m0, &b.phi0);
    let commutes_phi1 = commutes(&a.m1, &a.phi1, &b.m1, &b.phi1);
    Ok(ShFunctoriality { maps_m_bar, maps_m0, maps_m1, commutes_phi0, commutes_phi1 })
}
