//! Solving the point equations in a tame tower `L = k'((w))`, `w^E = pi`.
//!
//! Level `s` of the system reads `C_1 y^q - pi0 y = r_s` with `r_s` known
//! from the lower levels. Writing `y = sum_j y_j w^j`, the digit `y_j[c]`
//! first enters the `w^t` coefficient either through `C_1 y^q` at
//! `t = q j + a_c` (`a_c` the least valuation in column `c` of `C_1`) or
//! linearly through `pi0 y` at `t = j + E0`. Digits entering through the
//! Frobenius term become free parameters, the others are solved for (the
//! leading coefficient of `pi0` is a unit), and each coefficient then cuts
//! the parameters down. Since `y -> C_1 y^q - pi0 y` is additive this is
//! linear algebra over `F_p`. All points are integral, so only `j >= 0`
//! occurs.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::equations::EquationSystem;
use super::tower::{ExtensionTower, TowerField};
use crate::error::{Error, Result};
use crate::field::GaloisField;
use crate::series::{Series, SeriesRing};
use crate::Q;

/// Bound on partial solutions kept during the digit search.
pub const MAX_BRANCHES: usize = 1 << 16;

/// A solution of the system, coordinates ordered `X_1, ..., X_N` (blocks
/// of `h`), as series in the tower uniformizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalPoint {
    pub coords: Vec<Series>,
}

impl LocalPoint {
    pub fn prec(&self) -> i64 {
        self.coords.iter().map(Series::prec).min().unwrap_or(i64::MAX)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Series::is_zero)
    }

    /// Digits up to `prec`, for comparisons.
    fn key(&self, prec: i64) -> Vec<u32> {
        self.coords.iter().flat_map(|s| (0..prec).map(move |i| s.coeff(i).unwrap_or(0))).collect()
    }
}

#[derive(Clone, Debug)]
pub struct PointSet {
    pub field: TowerField,
    pub points: Vec<LocalPoint>,
    pub expected: u64,
    /// Precision (in powers of `w`) to which every point is known.
    pub prec: i64,
    /// Every point satisfies every equation to `verified_prec`.
    pub verified_prec: i64,
}

struct LevelProblem<'a> {
    f: &'a GaloisField,
    q: u64,
    h: usize,
    e0: i64,
    pi0: Vec<u32>,
    /// `c1[r][c][a]`.
    c1: Vec<Vec<Vec<u32>>>,
    /// `rhs[r][t]`.
    rhs: Vec<Vec<u32>>,
    tmax: i64,
    jlen: usize,
    amin: Vec<i64>,
}

type Digits = Vec<Vec<u32>>;

impl LevelProblem<'_> {
    fn t_sig(&self, j: usize, c: usize) -> i64 {
        self.q as i64 * j as i64 + self.amin[c]
    }

    fn t_lin(&self, j: usize) -> i64 {
        j as i64 + self.e0
    }

    /// Coefficient of `w^t` in row `r` of `C_1 y^q - pi0 y - rhs`, as a
    /// form in the live parameters.
    fn coef(&self, y: &[Vec<Form>], frob: &[u32], r: usize, t: i64) -> Form {
        let f = self.f;
        let mut acc = Form::constant(f.neg(self.rhs[r][t as usize]));
        for c in 0..self.h {
            let row = &self.c1[r][c];
            let mut j = 0usize;
            while (self.q as i64) * (j as i64) <= t && j < self.jlen {
                let a = t - self.q as i64 * j as i64;
                let cv = row[a as usize];
                if cv != 0 {
                    acc.add_frob_scaled(f, &y[c][j], frob, cv);
                }
                j += 1;
            }
        }
        let mut j = 0i64;
        while j + self.e0 <= t && (j as usize) < self.jlen {
            let pv = self.pi0[(t - j) as usize];
            if pv != 0 {
                acc.add_scaled(f, &y[r][j as usize], f.neg(pv));
            }
            j += 1;
        }
        acc
    }

    /// Every digit assignment with all coefficients below `w^tmax` zero.
    ///
    /// The left side is additive in `y`, so the solutions form an affine
    /// `F_p`-space. Digits are carried as affine forms in `F_p`-parameters:
    /// a digit entering through the Frobenius term brings `deg k'` fresh
    /// parameters, a digit entering linearly is solved for, and each
    /// coefficient gives `deg k'` linear conditions that eliminate
    /// parameters.
    fn solve(&self) -> Result<Vec<Digits>> {
        let f = self.f;
        let p = f.characteristic();
        let d = f.degree() as usize;
        let basis: Vec<u32> = (0..d)
            .map(|i| {
                let mut v = vec![0u32; d];
                v[i] = 1;
                f.from_coords(&v).expect("unit vector")
            })
            .collect();
        let frob: Vec<u32> = (0..f.order()).map(|a| f.pow(a, self.q)).collect();
        let lead = self.pi0[self.e0 as usize];
        let lead_inv = f.inv(lead).ok_or(Error::DivisionByZero)?;
        let mut params = Params::default();
        let mut y: Vec<Vec<Form>> = vec![vec![Form::default(); self.jlen]; self.h];
        for t in 0..self.tmax {
            for c in 0..self.h {
                for j in 0..self.jlen {
                    let (ts, tl) = (self.t_sig(j, c), self.t_lin(j));
                    if ts == t && ts <= tl {
                        let mut form = Form::default();
                        for &b in &basis {
                            let k = params.fresh();
                            form.set(k, b);
                        }
                        y[c][j] = form;
                    }
                }
            }
            for c in 0..self.h {
                for j in 0..self.jlen {
                    let (ts, tl) = (self.t_sig(j, c), self.t_lin(j));
                    if tl == t && tl < ts {
                        y[c][j] = Form::default();
                        let mut v = self.coef(&y, &frob, c, t);
                        v.scale(f, lead_inv);
                        y[c][j] = v;
                    }
                }
            }
            for r in 0..self.h {
                let mut v = self.coef(&y, &frob, r, t);
                for i in 0..d {
                    let (coeffs, cst) = v.coordinate(f, i);
                    match coeffs.iter().position(|&a| a != 0) {
                        None if cst != 0 => return Ok(Vec::new()),
                        None => {}
                        Some(k) => {
                            let sub = params.eliminate(p, k, &coeffs, cst);
                            v.substitute(f, k, &sub);
                            for row in y.iter_mut() {
                                for form in row.iter_mut() {
                                    form.substitute(f, k, &sub);
                                }
                            }
                        }
                    }
                }
            }
        }
        let live = params.live();
        let count = (p as u64).checked_pow(live.len() as u32).unwrap_or(u64::MAX);
        if count > MAX_BRANCHES as u64 {
            return Err(Error::SizeCap { size: count, cap: MAX_BRANCHES as u64 });
        }
        let mut out = Vec::with_capacity(count as usize);
        for code in 0..count {
            let mut x = vec![0u32; params.width()];
            let mut rest = code;
            for &k in &live {
                x[k] = (rest % u64::from(p)) as u32;
                rest /= u64::from(p);
            }
            out.push(y.iter().map(|row| row.iter().map(|form| form.eval(f, &x)).collect()).collect());
        }
        Ok(out)
    }
}

/// `c + sum_k x_k v_k` with `x_k` in `F_p` and `c`, `v_k` in `k'`.
#[derive(Clone, Debug, Default)]
struct Form {
    c: u32,
    v: Vec<u32>,
}

/// An eliminated parameter `x_k = b + sum_l a_l x_l` over `F_p`.
struct Substitution {
    b: u32,
    a: Vec<(usize, u32)>,
}

impl Form {
    fn constant(c: u32) -> Self {
        Form { c, v: Vec::new() }
    }

    fn get(&self, k: usize) -> u32 {
        self.v.get(k).copied().unwrap_or(0)
    }

    fn set(&mut self, k: usize, val: u32) {
        if self.v.len() <= k {
            self.v.resize(k + 1, 0);
        }
        self.v[k] = val;
    }

    /// `self += s * other`.
    fn add_scaled(&mut self, f: &GaloisField, other: &Form, s: u32) {
        self.c = f.add(self.c, f.mul(s, other.c));
        for (k, &o) in other.v.iter().enumerate() {
            if o != 0 {
                let cur = self.get(k);
                self.set(k, f.add(cur, f.mul(s, o)));
            }
        }
    }

    /// `self += s * other^q`; `(c + sum x_k v_k)^q = c^q + sum x_k v_k^q`
    /// since the `x_k` lie in the prime field.
    fn add_frob_scaled(&mut self, f: &GaloisField, other: &Form, frob: &[u32], s: u32) {
        self.c = f.add(self.c, f.mul(s, frob[other.c as usize]));
        for (k, &o) in other.v.iter().enumerate() {
            if o != 0 {
                let cur = self.get(k);
                self.set(k, f.add(cur, f.mul(s, frob[o as usize])));
            }
        }
    }

    fn scale(&mut self, f: &GaloisField, s: u32) {
        self.c = f.mul(self.c, s);
        for x in &mut self.v {
            *x = f.mul(*x, s);
        }
    }

    /// The `i`-th `F_p`-coordinate as coefficients and constant.
    fn coordinate(&self, f: &GaloisField, i: usize) -> (Vec<u32>, u32) {
        let coeffs = self.v.iter().map(|&x| f.coords(x)[i]).collect();
        (coeffs, f.coords(self.c)[i])
    }

    fn substitute(&mut self, f: &GaloisField, k: usize, sub: &Substitution) {
        let vk = self.get(k);
        if vk == 0 {
            return;
        }
        self.v[k] = 0;
        self.c = f.add(self.c, f.mul(vk, f.from_int(i64::from(sub.b))));
        for &(l, a) in &sub.a {
            let cur = self.get(l);
            self.set(l, f.add(cur, f.mul(vk, f.from_int(i64::from(a)))));
        }
    }

    fn eval(&self, f: &GaloisField, x: &[u32]) -> u32 {
        self.v.iter().zip(x).fold(self.c, |acc, (&v, &xk)| f.add(acc, f.mul(v, f.from_int(i64::from(xk)))))
    }
}

#[derive(Default)]
struct Params {
    alive: Vec<bool>,
    free: Vec<usize>,
}

impl Params {
    fn fresh(&mut self) -> usize {
        if let Some(k) = self.free.pop() {
            self.alive[k] = true;
            k
        } else {
            self.alive.push(true);
            self.alive.len() - 1
        }
    }

    fn width(&self) -> usize {
        self.alive.len()
    }

    fn live(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&k| self.alive[k]).collect()
    }

    /// Solve `sum a_l x_l + b = 0` for `x_k` and retire `k`.
    fn eliminate(&mut self, p: u32, k: usize, coeffs: &[u32], b: u32) -> Substitution {
        let p64 = u64::from(p);
        let inv = mod_inv(coeffs[k], p);
        let neg_inv = (p64 - u64::from(inv)) % p64;
        let scale = |a: u32| ((u64::from(a) * neg_inv) % p64) as u32;
        let sub = Substitution {
            b: scale(b),
            a: coeffs.iter().enumerate().filter(|&(l, &a)| l != k && a != 0).map(|(l, &a)| (l, scale(a))).collect(),
        };
        self.alive[k] = false;
        self.free.push(k);
        sub
    }
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let (mut r, mut e, mut base) = (1u64, u64::from(p) - 2, u64::from(a));
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % u64::from(p);
        }
        base = base * base % u64::from(p);
        e >>= 1;
    }
    r as u32
}

fn dense(s: &Series, len: i64) -> Vec<u32> {
    (0..len).map(|i| s.coeff(i).unwrap_or(0)).collect()
}

fn digits_to_series(f: &GaloisField, d: &[u32]) -> Series {
    let terms: Vec<(i64, u32)> = d.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i as i64, c)).collect();
    Series::from_terms(f, &terms, d.len() as i64).expect("digits are in range")
}

/// Residual `sum_i C_i X_{s+1-i}^q - pi0 X_s + X_{s-1}` of each equation.
pub fn residuals(sys: &EquationSystem, tf: &TowerField, p: &LocalPoint) -> Vec<Series> {
    let r = &tf.ring;
    let h = sys.h;
    let pi0 = tf.inflate(sys.base.pi0());
    let cs: Vec<Vec<Series>> = sys.cs.iter().map(|c| c.entries().iter().map(|s| tf.inflate(s)).collect()).collect();
    let x = |s: usize, c: usize| &p.coords[(s - 1) * h + c];
    let mut out = Vec::with_capacity(sys.rank());
    for s in 1..=sys.levels {
        for row in 0..h {
            let mut acc = r.neg(&r.mul(&pi0, x(s, row)));
            if s > 1 {
                acc = r.add(&acc, x(s - 1, row));
            }
            for i in 1..=s {
                for c in 0..h {
                    acc = r.add(&acc, &r.mul(&cs[i - 1][row * h + c], &r.sigma(x(s + 1 - i, c))));
                }
            }
            out.push(acc);
        }
    }
    out
}

/// All points of the system over the top of the tower. `prec` is the
/// working precision in powers of `pi`.
pub fn solve_points(sys: &EquationSystem, tower: &ExtensionTower, prec: i64) -> Result<PointSet> {
    let base = &sys.base;
    let tf = TowerField::new(base, tower)?;
    let f = tf.field().clone();
    let ring: &SeriesRing = &tf.ring;
    let q = base.q();
    let h = sys.h;
    let big_e = tf.ram as i64;
    let pi0 = tf.inflate(&base.pi0().truncate(prec));
    let e0 = pi0.val();
    let cs: Vec<Vec<Series>> = sys
        .cs
        .iter()
        .map(|c| c.entries().iter().map(|s| tf.inflate(&s.truncate(prec))).collect())
        .collect();
    let expected = q.checked_pow((h * sys.levels) as u32).unwrap_or(u64::MAX);

    let mut partial: Vec<Vec<Series>> = vec![Vec::new()];
    for s in 1..=sys.levels {
        let mut next = Vec::new();
        for xs in &partial {
            let x = |lvl: usize, c: usize| &xs[(lvl - 1) * h + c];
            let mut rhs = Vec::with_capacity(h);
            for row in 0..h {
                let mut acc = Series::zero(prec * big_e);
                if s > 1 {
                    acc = ring.sub(&acc, x(s - 1, row));
                }
                for i in 2..=s {
                    for c in 0..h {
                        acc = ring.sub(&acc, &ring.mul(&cs[i - 1][row * h + c], &ring.sigma(x(s + 1 - i, c))));
                    }
                }
                rhs.push(acc);
            }
            let c1 = &cs[0];
            let tmax = c1
                .iter()
                .chain(rhs.iter())
                .map(Series::prec)
                .chain(core::iter::once(pi0.prec()))
                .min()
                .unwrap();
            if (tmax - 1) * (q as i64 - 1) <= q as i64 * e0 || tmax <= e0 {
                return Err(Error::PrecisionInsufficient(format!(
                    "level {s}: equations known to w^{tmax}, need more than {} for the digit search",
                    q as i64 * e0 / (q as i64 - 1) + 1
                )));
            }
            let amin: Vec<i64> = (0..h)
                .map(|c| (0..h).map(|r| c1[r * h + c].val()).min().unwrap())
                .collect();
            let prob = LevelProblem {
                f: &f,
                q,
                h,
                e0,
                pi0: dense(&pi0, tmax),
                c1: (0..h).map(|r| (0..h).map(|c| dense(&c1[r * h + c], tmax)).collect()).collect(),
                rhs: rhs.iter().map(|s| dense(s, tmax)).collect(),
                tmax,
                jlen: (tmax - e0) as usize,
                amin,
            };
            if rhs.iter().any(|s| s.val() < 0) {
                return Err(Error::Invalid("non-integral right-hand side".into()));
            }
            for y in prob.solve()? {
                let mut v = xs.clone();
                v.extend(y.iter().map(|d| digits_to_series(&f, d)));
                next.push(v);
            }
        }
        let want = q.checked_pow((h * s) as u32).unwrap_or(u64::MAX);
        if (next.len() as u64) < want {
            return Err(Error::TowerInsufficient {
                found: next.len(),
                expected,
                detail: format!(
                    "level {s}: {} of {want} solutions over the tower; a larger residue field or ramification index is needed",
                    next.len()
                ),
            });
        }
        if next.len() as u64 > want {
            return Err(Error::PrecisionInsufficient(format!(
                "level {s}: {} approximate solutions for {want} points",
                next.len()
            )));
        }
        partial = next;
    }
    let mut points: Vec<LocalPoint> = partial.into_iter().map(|coords| LocalPoint { coords }).collect();
    points.sort_by(|a, b| {
        let pr = a.prec().min(b.prec());
        a.key(pr).cmp(&b.key(pr))
    });
    let pts_prec = points.iter().map(LocalPoint::prec).min().unwrap_or(0);
    let mut verified = i64::MAX;
    for p in &points {
        for res in residuals(sys, &tf, p) {
            if !res.is_zero() {
                return Err(Error::Invalid(format!("a solved point leaves residual of valuation {}", res.val())));
            }
            verified = verified.min(res.prec());
        }
    }
    Ok(PointSet { field: tf, points, expected, prec: pts_prec, verified_prec: verified })
}

impl PointSet {
    fn keys(&self) -> BTreeSet<Vec<u32>> {
        self.points.iter().map(|p| p.key(self.prec)).collect()
    }

    fn contains(&self, keys: &BTreeSet<Vec<u32>>, p: &LocalPoint) -> bool {
        keys.contains(&p.key(self.prec))
    }

    /// Closure under coordinatewise addition and `F_q`-scaling.
    pub fn is_fq_space(&self, q: u64) -> bool {
        let r = &self.field.ring;
        let f = self.field.field();
        let keys = self.keys();
        if keys.len() != self.points.len() {
            return false;
        }
        let scalars = f.subfield_elements(q);
        let add_ok = self.points.iter().all(|a| {
            self.points.iter().all(|b| {
                let s = LocalPoint { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| r.add(x, y)).collect() };
                self.contains(&keys, &s)
            })
        });
        add_ok
            && self.points.iter().all(|a| {
                scalars.iter().all(|&c| {
                    let s = LocalPoint { coords: a.coords.iter().map(|x| r.scale(x, c)).collect() };
                    self.contains(&keys, &s)
                })
            })
    }

    /// Whether `w -> zeta w` permutes the points, re-verifying the equations
    /// on every image.
    pub fn galois_stable(&self, sys: &EquationSystem) -> Result<bool> {
        if self.field.ram == 1 {
            return Ok(true);
        }
        let zeta = self
            .field
            .zeta()
            .ok_or_else(|| Error::Precondition(format!("no primitive {}-th root of unity in the tower", self.field.ram)))?;
        let keys = self.keys();
        for p in &self.points {
            let img = LocalPoint { coords: p.coords.iter().map(|s| self.field.rotate(s, zeta)).collect() };
            if !residuals(sys, &self.field, &img).iter().all(Series::is_zero) || !self.contains(&keys, &img) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `v_K` of `a - b`, the minimum over coordinates.
    pub fn distance(&self, a: &LocalPoint, b: &LocalPoint) -> Q {
        let r = &self.field.ring;
        let v = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(x, y)| r.sub(x, y).val())
            .min()
            .unwrap_or(i64::MAX);
        Q::new(v, self.field.ram as i64)
    }
}

/// Least `v_K`-distance between two distinct points.
pub fn min_pairwise_gap(points: &PointSet) -> Result<Q> {
    if points.points.len() < 2 {
        return Err(Error::Precondition("the gap needs at least two points".into()));
    }
    let mut best: Option<Q> = None;
    for (i, a) in points.points.iter().enumerate() {
        for b in &points.points[i + 1..] {
            let d = points.distance(a, b);
            if best.is_none_or(|x| d < x) {
                best = Some(d);
            }
        }
    }
    Ok(best.unwrap_or_else(Q::zero))
}

/// `gap <= e/(q-1)`.
pub fn gap_within_bound(gap: Q, e: i64, q: u64) -> bool {
    gap <= Q::new(e, q as i64 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::BaseData;
    use crate::modcat::mu_lambda;
    use crate::points::{build_equations, suggest_tame_tower, TowerStep};

    fn sys_for(p: u32, e: i64, lam: i64, prec: i64) -> EquationSystem {
        let b = BaseData::simple(p, 1, e, prec).unwrap();
        build_equations(&mu_lambda(&b, &Series::pi_pow(lam, prec)).unwrap()).unwrap()
    }

    #[test]
    fn mu_pi_over_f3_needs_a_square_root() {
        let sys = sys_for(3, 1, 1, 12);
        let pts = solve_points(&sys, &ExtensionTower::new(vec![TowerStep::Tame(2)]), 12).unwrap();
        assert_eq!(pts.points.len(), 3);
        let vals: Vec<i64> = pts.points.iter().map(|p| p.coords[0].val()).collect();
        assert_eq!(vals.iter().filter(|&&v| v == 1).count(), 2);
        for p in pts.points.iter().filter(|p| !p.is_zero()) {
            assert_eq!(p.coords[0].terms().count(), 1);
        }
        assert_eq!(min_pairwise_gap(&pts).unwrap(), Q::new(1, 2));
        assert!(pts.is_fq_space(3));
        assert!(pts.galois_stable(&sys).unwrap());
        let err = solve_points(&sys, &ExtensionTower::trivial(), 12).unwrap_err();
        assert!(matches!(err, Error::TowerInsufficient { found: 1, expected: 3, .. }));
    }

    #[test]
    fn constant_and_rational_cases() {
        let sys = sys_for(3, 1, 0, 12);
        let pts = solve_points(&sys, &ExtensionTower::trivial(), 12).unwrap();
        assert_eq!(pts.points.len(), 3);
        assert_eq!(min_pairwise_gap(&pts).unwrap(), Q::zero());
        let sys = sys_for(2, 1, 1, 12);
        let pts = solve_points(&sys, &ExtensionTower::trivial(), 12).unwrap();
        assert_eq!(pts.points.len(), 2);
        assert_eq!(pts.points[1].coords[0].val(), 1);
        assert_eq!(pts.points[1].coords[0].terms().count(), 1);
    }

    #[test]
    fn suggested_tower_for_higher_valuation() {
        // x^3 = pi^2 x with e = 2: x = zeta w^2 with w^2 = pi.
        let sys = sys_for(3, 2, 2, 14);
        let pts = solve_points(&sys, &suggest_tame_tower(3, 1), 14).unwrap();
        assert_eq!(pts.points.len(), 3);
        let gap = min_pairwise_gap(&pts).unwrap();
        assert_eq!(gap, Q::from_integer(1));
        assert!(gap_within_bound(gap, 2, 3));
    }

    #[test]
    fn single_point_gap_is_an_error() {
        let sys = sys_for(2, 1, 1, 12);
        let mut pts = solve_points(&sys, &ExtensionTower::trivial(), 12).unwrap();
        pts.points.truncate(1);
        assert!(min_pairwise_gap(&pts).is_err());
    }
}
