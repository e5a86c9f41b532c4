//! Tame characters of the simple modules `Phi m_i = u_i pi^{a_i} m_{i+1}`
//! (indices mod `N`), `[pi0] = 0`.
//!
//! The points of such a module are `{alpha pi_N^a}` with
//! `pi_N^{q^N - 1} = pi` and `a = a_0 + a_1 q + ... + a_{N-1} q^{N-1}`, so
//! inertia acts through `chi_N^a`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::solver::PointSet;
use crate::base::BaseData;
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::modcat::{certify, SigmaModule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TameCharacter {
    /// `N`, the cycle length.
    pub level: u32,
    /// `a = sum a_i q^i`.
    pub exponent: u64,
    /// `a mod (q^N - 1)`.
    pub exponent_mod: u64,
    /// `a_0, ..., a_{N-1}`, read along the cycle starting at `m_0`.
    pub digits: Vec<i64>,
    /// Basis indices in cycle order `m_0, m_1, ...`.
    pub cycle: Vec<usize>,
    /// `0 <= a_i <= e` for all `i`.
    pub digits_in_range: bool,
    /// Whether the module passes the strictness certificate.
    pub strict: bool,
    /// Whether every entry is exactly a monomial `pi^{a_i}` with coefficient 1.
    pub pure_monomials: bool,
    /// `b_i = sum_k a_{i+k} q^{N-1-k}`: the coordinate of `m_{cycle[i]}` in
    /// a nonzero point has valuation `b_i / (q^N - 1)`, from
    /// `T_i^q = pi^{a_i} T_{i+1}`.
    pub realized: Vec<u64>,
    /// Whether `exponent` lies in the `q`-orbit of the realized exponents
    /// modulo `q^N - 1`. The formula `a = sum a_i q^i` reads the digits in
    /// the opposite direction, so this fails for some cycles of length 3.
    pub exponent_realized: bool,
}

impl TameCharacter {
    pub fn is_trivial(&self) -> bool {
        self.exponent_mod == 0
    }

    /// Digits outside `[0, e]` on a strict module would falsify the
    /// digit bound; the two verdicts must agree.
    pub fn consistent(&self) -> bool {
        self.digits_in_range == self.strict
    }
}

/// Rows in cycle order and the digits, when `C` is monomial along a single
/// cycle and `D = 0`.
fn cycle_shape(c: &SeriesMatrix, d: &SeriesMatrix) -> Result<(Vec<usize>, Vec<i64>, bool)> {
    let n = c.rows();
    if n == 0 || !d.is_zero().holds {
        return Err(Error::Precondition("not monomial-cyclic: [pi0] is not zero".into()));
    }
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let nz: Vec<usize> = (0..n).filter(|&j| !c.get(i, j).is_zero()).collect();
        if nz.len() != 1 {
            return Err(Error::Precondition(format!("not monomial-cyclic: row {i} has {} nonzero entries", nz.len())));
        }
        next.push(nz[0]);
    }
    let mut order = alloc::vec![0usize];
    let mut cur = next[0];
    while cur != 0 {
        if order.len() > n {
            break;
        }
        order.push(cur);
        cur = next[cur];
    }
    if order.len() != n || cur != 0 {
        return Err(Error::Precondition("not monomial-cyclic: the permutation is not one cycle".into()));
    }
    let digits: Vec<i64> = order.iter().map(|&i| c.get(i, next[i]).val()).collect();
    let pure = order.iter().all(|&i| {
        let s = c.get(i, next[i]);
        s.terms().count() == 1 && s.lead() == 1
    });
    Ok((order, digits, pure))
}

/// The character from raw matrices, cross-checked against the certificate.
pub fn tame_character_raw(base: &BaseData, c: &SeriesMatrix, d: &SeriesMatrix) -> Result<TameCharacter> {
    let (cycle, digits, pure) = cycle_shape(c, d)?;
    let q = base.q();
    let level = digits.len() as u32;
    let e = base.e();
    let digits_in_range = digits.iter().all(|&a| (0..=e).contains(&a));
    let exponent = digits
        .iter()
        .rev()
        .fold(0u64, |acc, &a| acc * q + a.max(0) as u64);
    let modulus = q.pow(level) - 1;
    let strict = certify(base, c, d)?.is_valid();
    let n = digits.len();
    let realized: Vec<u64> = (0..n)
        .map(|i| (0..n).fold(0u64, |acc, k| acc * q + digits[(i + k) % n].max(0) as u64))
        .collect();
    let exponent_realized = modulus == 0
        || (0..level).any(|t| (realized[0] % modulus) * q.pow(t) % modulus == exponent % modulus);
    Ok(TameCharacter {
        level,
        exponent,
        exponent_mod: exponent % modulus,
        digits,
        cycle,
        digits_in_range,
        strict,
        pure_monomials: pure,
        realized,
        exponent_realized,
    })
}

pub fn tame_character(m: &SigmaModule) -> Result<TameCharacter> {
    tame_character_raw(m.base(), m.c(), m.d())
}

/// In every nonzero point the coordinate of `m_{cycle[i]}` is
/// `beta_i w^{b_i E/(q^N - 1)}` with `b_i` from [`TameCharacter::realized`],
/// and the `beta_0` together with 0 number `q^N` (forming the subfield
/// `F_{q^N}` when the entries are pure monomials).
pub fn points_match_character(points: &PointSet, ch: &TameCharacter, q: u64) -> bool {
    let big_e = points.field.ram;
    let qn1 = q.pow(ch.level) - 1;
    if qn1 == 0 || !big_e.is_multiple_of(qn1) {
        return false;
    }
    let mut betas = BTreeSet::new();
    for p in &points.points {
        if p.is_zero() {
            betas.insert(0u32);
            continue;
        }
        for (pos, &idx) in ch.cycle.iter().enumerate() {
            let x = &p.coords[idx];
            let want_val = (ch.realized[pos] * (big_e / qn1)) as i64;
            if x.is_zero() || x.val() != want_val || x.terms().count() != 1 {
                return false;
            }
        }
        betas.insert(p.coords[ch.cycle[0]].lead());
    }
    if betas.len() as u64 != q.pow(ch.level) {
        return false;
    }
    if ch.pure_monomials {
        let sub: BTreeSet<u32> = points.field.field().subfield_elements(q.pow(ch.level)).into_iter().collect();
        return betas == sub;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modcat::{mu_lambda, validate_module};
    use crate::points::{build_equations, solve_points, suggest_tame_tower};
    use crate::series::Series;

    fn cyc(b: &BaseData, a: &[i64]) -> (SeriesMatrix, SeriesMatrix) {
        let n = a.len();
        let p = b.prec();
        let mut c = SeriesMatrix::zeros(n, n, p);
        for (i, &ai) in a.iter().enumerate() {
            c.set(i, (i + 1) % n, Series::pi_pow(ai, p));
        }
        (c, SeriesMatrix::zeros(n, n, p))
    }

    #[test]
    fn two_cycle_with_unit_digits() {
        let b = BaseData::simple(2, 1, 1, 12).unwrap();
        let (c, d) = cyc(&b, &[1, 1]);
        let ch = tame_character_raw(&b, &c, &d).unwrap();
        assert_eq!(ch.exponent, 3);
        assert_eq!(ch.exponent_mod, 0);
        assert!(ch.strict && ch.digits_in_range && ch.consistent());
        let b3 = BaseData::simple(3, 1, 1, 12).unwrap();
        let (c, d) = cyc(&b3, &[1, 1]);
        let ch = tame_character_raw(&b3, &c, &d).unwrap();
        assert_eq!(ch.exponent, 4);
        assert_eq!(ch.level, 2);
    }

    #[test]
    fn rank_one_and_etale() {
        let b = BaseData::simple(3, 1, 2, 12).unwrap();
        let ch = tame_character(&mu_lambda(&b, &Series::pi_pow(2, 12)).unwrap()).unwrap();
        assert_eq!((ch.level, ch.exponent), (1, 2));
        let ch = tame_character(&mu_lambda(&b, &Series::one(12)).unwrap()).unwrap();
        assert!(ch.is_trivial());
    }

    #[test]
    fn digit_above_e_is_not_strict() {
        let b = BaseData::simple(3, 1, 1, 12).unwrap();
        let (c, d) = cyc(&b, &[2, 0]);
        let ch = tame_character_raw(&b, &c, &d).unwrap();
        assert!(!ch.digits_in_range);
        assert!(!ch.strict);
        assert!(ch.consistent());
    }

    #[test]
    fn three_cycles_and_digit_direction() {
        let b = BaseData::simple(2, 1, 1, 16).unwrap();
        let (c, d) = cyc(&b, &[1, 0, 0]);
        let m = validate_module(&b, c, d).unwrap();
        let ch = tame_character(&m).unwrap();
        assert_eq!(ch.exponent, 1);
        assert_eq!(ch.realized, alloc::vec![4, 1, 2]);
        assert!(ch.exponent_realized);
        let sys = build_equations(&m).unwrap();
        let pts = solve_points(&sys, &suggest_tame_tower(2, 3), 16).unwrap();
        assert_eq!(pts.points.len(), 8);
        assert!(points_match_character(&pts, &ch, 2));

        // Digits (0, 1, 2) over q = 3: a = 21, but the points realize the
        // orbit {5, 15, 19} of 26.
        let b = BaseData::simple(3, 1, 2, 12).unwrap();
        let (c, d) = cyc(&b, &[0, 1, 2]);
        let ch = tame_character_raw(&b, &c, &d).unwrap();
        assert_eq!(ch.exponent, 21);
        assert_eq!(ch.realized, alloc::vec![5, 15, 19]);
        assert!(!ch.exponent_realized);
        let m = validate_module(&b, c, d).unwrap();
        let sys = build_equations(&m).unwrap();
        let pts = solve_points(&sys, &suggest_tame_tower(3, 3), 12).unwrap();
        assert_eq!(pts.points.len(), 27);
        assert!(points_match_character(&pts, &ch, 3));
    }

    #[test]
    fn non_cyclic_shape_rejected() {
        let b = BaseData::simple(3, 1, 1, 12).unwrap();
        let c = SeriesMatrix::identity(2, 12);
        assert!(tame_character_raw(&b, &c, &SeriesMatrix::zeros(2, 2, 12)).is_err());
    }

    #[test]
    fn points_of_a_two_cycle() {
        let b = BaseData::simple(2, 1, 1, 16).unwrap();
        let (c, d) = cyc(&b, &[1, 0]);
        let m = validate_module(&b, c, d).unwrap();
        let ch = tame_character(&m).unwrap();
        assert_eq!(ch.exponent, 1);
        let sys = build_equations(&m).unwrap();
        let pts = solve_points(&sys, &suggest_tame_tower(2, 2), 16).unwrap();
        assert_eq!(pts.points.len(), 4);
        assert!(points_match_character(&pts, &ch, 2));
        assert!(pts.galois_stable(&sys).unwrap());
        assert!(pts.is_fq_space(2));
    }
}
