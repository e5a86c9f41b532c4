//! Truncated Laurent series over a finite field with absolute precision.
//!
//! A [`Series`] stands for an element of `K = k((pi))` known modulo
//! `pi^prec`. Nonzero values keep their coefficients densely from the
//! valuation up to `prec - 1`, with a nonzero leading coefficient. A value that
//! is zero to its precision is the "tracked zero": it has no coefficients and
//! its valuation is reported as `prec`.
//!
//! Every operation returns the pessimistic precision that is justified by the
//! precision of its inputs, so digits below `prec` are always correct.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::field::GaloisField;

/// A predicate result together with the precision at which it was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub precision: i64,
}

impl Verdict {
    pub fn new(holds: bool, precision: i64) -> Self {
        Verdict { holds, precision }
    }

    /// A verdict that needs no precision (exact, or vacuous).
    pub fn exact(holds: bool) -> Self {
        Verdict { holds, precision: i64::MAX }
    }

    /// Conjunction: holds if both hold, decided at the smaller precision.
    pub fn and(self, other: Verdict) -> Verdict {
        Verdict {
            holds: self.holds && other.holds,
            precision: self.precision.min(other.precision),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series {
    val: i64,
    coeffs: Vec<u32>,
    prec: i64,
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "O(pi^{})", self.prec);
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*pi^{e}")?;
        }
        write!(f, " + O(pi^{})", self.prec)
    }
}

impl Series {
    /// The value zero known modulo `pi^prec`.
    pub fn zero(prec: i64) -> Self {
        Series { val: prec, coeffs: Vec::new(), prec }
    }

    /// `c * pi^v + O(pi^prec)`.
    pub fn monomial(c: u32, v: i64, prec: i64) -> Self {
        if c == 0 || v >= prec {
            return Series::zero(prec);
        }
        let mut coeffs = vec![0; (prec - v) as usize];
        coeffs[0] = c;
        Series { val: v, coeffs, prec }
    }

    pub fn one(prec: i64) -> Self {
        Series::monomial(1, 0, prec)
    }

    /// `pi^v + O(pi^prec)`.
    pub fn pi_pow(v: i64, prec: i64) -> Self {
        Series::monomial(1, v, prec)
    }

    /// Build from `(exponent, coefficient)` pairs; repeated exponents are an
    /// error so that parsing stays unambiguous. Terms at or beyond `prec` are
    /// dropped.
    pub fn from_terms(field: &GaloisField, terms: &[(i64, u32)], prec: i64) -> Result<Self> {
        let lo = terms.iter().map(|t| t.0).min().unwrap_or(prec).min(prec);
        let mut dense = vec![0u32; (prec - lo) as usize];
        let mut seen = Vec::new();
        for &(e, c) in terms {
            if c >= field.order() {
                return Err(Error::Invalid(alloc::format!("coefficient {c} out of range")));
            }
            if seen.contains(&e) {
                return Err(Error::Invalid(alloc::format!("exponent {e} repeated")));
            }
            seen.push(e);
            if e < prec {
                dense[(e - lo) as usize] = c;
            }
        }
        Ok(Series::from_dense(lo, dense, prec))
    }

    /// Build from dense coefficients starting at exponent `lo`; the vector
    /// covers `lo .. lo + len` and `prec` is `lo + len`.
    pub(crate) fn from_dense(lo: i64, mut dense: Vec<u32>, prec: i64) -> Self {
        debug_assert_eq!(lo + dense.len() as i64, prec);
        let lead = dense.iter().position(|&c| c != 0);
        match lead {
            None => Series::zero(prec),
            Some(k) => {
                dense.drain(..k);
                Series { val: lo + k as i64, coeffs: dense, prec }
            }
        }
    }

    /// Valuation; for the tracked zero this is its precision.
    #[inline]
    pub fn val(&self) -> i64 {
        self.val
    }

    #[inline]
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Zero to its precision.
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lies in `O` (valuation at least 0) as far as the precision shows.
    pub fn is_integral(&self) -> bool {
        self.val >= 0
    }

    /// A unit of `O`.
    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.val == 0
    }

    /// Relative precision `prec - val` (0 for the tracked zero).
    pub fn rel_prec(&self) -> i64 {
        self.prec - self.val
    }

    /// Coefficient of `pi^i`; `None` when `i >= prec`.
    pub fn coeff(&self, i: i64) -> Option<u32> {
        if i >= self.prec {
            None
        } else if i < self.val {
            Some(0)
        } else {
            Some(self.coeffs[(i - self.val) as usize])
        }
    }

    /// Leading coefficient; 0 for the tracked zero.
    pub fn lead(&self) -> u32 {
        self.coeffs.first().copied().unwrap_or(0)
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (self.val + i as i64, c))
    }

    /// Reduce the precision to at most `prec`.
    pub fn truncate(&self, prec: i64) -> Series {
        if prec >= self.prec {
            return self.clone();
        }
        if self.is_zero() || prec <= self.val {
            return Series::zero(prec);
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate((prec - self.val) as usize);
        Series { val: self.val, coeffs, prec }
    }

    /// Multiply by `pi^k`.
    pub fn shift(&self, k: i64) -> Series {
        Series { val: self.val + k, coeffs: self.coeffs.clone(), prec: self.prec + k }
    }

    /// Residue class modulo `pi` of an integral series.
    pub fn residue(&self) -> Option<u32> {
        if self.val < 0 {
            return None;
        }
        self.coeff(0)
    }

    fn dense_from(&self, lo: i64, hi: i64) -> Vec<u32> {
        (lo..hi).map(|i| self.coeff(i).unwrap_or(0)).collect()
    }
}

/// Arithmetic context: the residue field and the `q` of `sigma(x) = x^q`.
#[derive(Clone, Debug)]
pub struct SeriesRing {
    field: Arc<GaloisField>,
    q: u64,
}

impl SeriesRing {
    pub fn new(field: Arc<GaloisField>, q: u64) -> Result<Self> {
        if !field.contains_subfield_of_order(q) {
            return Err(Error::Field("q must be a power of p whose field sits inside k"));
        }
        Ok(SeriesRing { field, q })
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn add(&self, a: &Series, b: &Series) -> Series {
        let prec = a.prec.min(b.prec);
        let lo = a.val.min(b.val).min(prec);
        let f = &*self.field;
        let dense: Vec<u32> = (lo..prec)
            .map(|i| f.add(a.coeff(i).unwrap_or(0), b.coeff(i).unwrap_or(0)))
            .collect();
        Series::from_dense(lo, dense, prec)
    }

    pub fn neg(&self, a: &Series) -> Series {
        let f = &*self.field;
        Series { val: a.val, coeffs: a.coeffs.iter().map(|&c| f.neg(c)).collect(), prec: a.prec }
    }

    pub fn sub(&self, a: &Series, b: &Series) -> Series {
        self.add(a, &self.neg(b))
    }

    /// Product. The valuation is `v_a + v_b` and the precision
    /// `min(P_a + v_b, P_b + v_a)`.
    pub fn mul(&self, a: &Series, b: &Series) -> Series {
        let prec = (a.prec + b.val).min(b.prec + a.val);
        if a.is_zero() || b.is_zero() {
            return Series::zero(prec);
        }
        let val = a.val + b.val;
        let len = (prec - val) as usize;
        let f = &*self.field;
        let mut out = vec![0u32; len];
        for (i, &ca) in a.coeffs.iter().enumerate().take(len) {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in b.coeffs.iter().enumerate().take(len - i) {
                if cb != 0 {
                    out[i + j] = f.add(out[i + j], f.mul(ca, cb));
                }
            }
        }
        Series::from_dense(val, out, prec)
    }

    /// Multiply by a residue-field constant.
    pub fn scale(&self, a: &Series, c: u32) -> Series {
        if c == 0 {
            return Series::zero(a.prec);
        }
        let f = &*self.field;
        Series { val: a.val, coeffs: a.coeffs.iter().map(|&x| f.mul(x, c)).collect(), prec: a.prec }
    }

    /// Inverse in `K`; the relative precision is preserved.
    pub fn inv(&self, a: &Series) -> Result<Series> {
        if a.is_zero() {
            return Err(Error::ZeroToPrecision(a.prec));
        }
        let f = &*self.field;
        let len = a.coeffs.len();
        let c0inv = f.inv(a.coeffs[0]).ok_or(Error::DivisionByZero)?;
        let mut b = vec![0u32; len];
        b[0] = c0inv;
        for k in 1..len {
            let mut s = 0u32;
            for i in 1..=k {
                s = f.add(s, f.mul(a.coeffs[i], b[k - i]));
            }
            b[k] = f.neg(f.mul(c0inv, s));
        }
        Ok(Series { val: -a.val, coeffs: b, prec: -a.val + len as i64 })
    }

    pub fn div(&self, a: &Series, b: &Series) -> Result<Series> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `sigma(a) = a^q`: coefficientwise `q`-th power, exponents scaled by `q`.
    pub fn sigma(&self, a: &Series) -> Series {
        let q = self.q as i64;
        if a.is_zero() {
            return Series::zero(a.prec.saturating_mul(q));
        }
        let f = &*self.field;
        let prec = a.prec * q;
        let val = a.val * q;
        let mut coeffs = vec![0u32; (prec - val) as usize];
        for (i, &c) in a.coeffs.iter().enumerate() {
            coeffs[i * q as usize] = f.pow(c, self.q);
        }
        Series { val, coeffs, prec }
    }

    /// `sigma^{-1}` on residue-field constants.
    pub fn sigma_inv_const(&self, c: u32) -> u32 {
        let order = u64::from(self.field.order());
        // c^(order / q) inverts c -> c^q on k.
        self.field.pow(c, order / self.q)
    }

    pub fn sigma_const(&self, c: u32) -> u32 {
        self.field.pow(c, self.q)
    }

    pub fn pow(&self, a: &Series, e: u64) -> Series {
        let mut result = Series::one(a.prec.max(1).saturating_add(a.val.abs() * e as i64));
        let mut base = a.clone();
        let mut e = e;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { self.mul(&result, &base) };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    /// Equality as far as both operands are known.
    pub fn eq_to_prec(&self, a: &Series, b: &Series) -> Verdict {
        let d = self.sub(a, b);
        Verdict::new(d.is_zero(), d.prec)
    }

    /// The image of an integer.
    pub fn from_int(&self, n: i64, prec: i64) -> Series {
        Series::monomial(self.field.from_int(n), 0, prec)
    }

    /// Lift of a residue constant.
    pub fn constant(&self, c: u32, prec: i64) -> Series {
        Series::monomial(c, 0, prec)
    }

    /// Coefficients of `a` in the dense window `lo .. hi`, with unknown
    /// digits reported as zero.
    pub fn window(&self, a: &Series, lo: i64, hi: i64) -> Vec<u32> {
        a.dense_from(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(p: u32, d: u32, q: u64) -> SeriesRing {
        SeriesRing::new(GaloisField::new(p, d).unwrap(), q).unwrap()
    }

    fn s(r: &SeriesRing, terms: &[(i64, u32)], prec: i64) -> Series {
        Series::from_terms(r.field(), terms, prec).unwrap()
    }

    #[test]
    fn pi_times_pi() {
        let r = ring(3, 1, 3);
        let pi = Series::pi_pow(1, 10);
        let sq = r.mul(&pi, &pi);
        assert_eq!(sq.val(), 2);
        assert_eq!(sq.terms().collect::<Vec<_>>(), vec![(2, 1)]);
    }

    #[test]
    fn difference_of_squares() {
        let r = ring(3, 1, 3);
        let a = s(&r, &[(0, 1), (1, 1)], 4);
        let b = s(&r, &[(0, 1), (1, 2)], 4);
        let c = r.mul(&a, &b);
        assert_eq!(c.prec(), 4);
        assert_eq!(c.terms().collect::<Vec<_>>(), vec![(0, 1), (2, 2)]);
    }

    #[test]
    fn precision_rule_for_products() {
        let r = ring(3, 1, 3);
        let a = Series::pi_pow(1, 3);
        let b = Series::pi_pow(-1, 1);
        let c = r.mul(&a, &b);
        // min(3 + (-1), 1 + 1) = 2
        assert_eq!(c.prec(), 2);
        assert_eq!(c.terms().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn geometric_series_inverse() {
        let r = ring(3, 1, 3);
        let a = s(&r, &[(0, 1), (1, 1)], 6);
        let inv = r.inv(&a).unwrap();
        assert_eq!(inv.prec(), 6);
        let want: Vec<(i64, u32)> = (0..6).map(|i| (i, if i % 2 == 0 { 1 } else { 2 })).collect();
        assert_eq!(inv.terms().collect::<Vec<_>>(), want);
    }

    #[test]
    fn inverse_of_pi() {
        let r = ring(2, 1, 2);
        let inv = r.inv(&Series::pi_pow(1, 8)).unwrap();
        assert_eq!(inv.val(), -1);
        assert_eq!(inv.rel_prec(), 7);
    }

    #[test]
    fn inverse_of_zero_fails() {
        let r = ring(2, 1, 2);
        assert!(r.inv(&Series::zero(5)).is_err());
    }

    #[test]
    fn sigma_examples() {
        let r = ring(3, 1, 3);
        assert_eq!(r.sigma(&Series::one(4)).terms().collect::<Vec<_>>(), vec![(0, 1)]);
        let a = s(&r, &[(1, 1), (2, 2)], 5);
        let sa = r.sigma(&a);
        assert_eq!(sa.terms().collect::<Vec<_>>(), vec![(3, 1), (6, 2)]);
        assert_eq!(sa.prec(), 15);
        // direct cubing in characteristic 3
        let cube = r.mul(&r.mul(&a, &a), &a);
        assert!(r.eq_to_prec(&cube, &sa).holds);
    }

    #[test]
    fn sigma_on_monomial_uses_frobenius() {
        let r = ring(2, 2, 2);
        let g = r.field().generator();
        let m = Series::monomial(g, 2, 6);
        let sm = r.sigma(&m);
        assert_eq!(sm.terms().collect::<Vec<_>>(), vec![(4, r.field().mul(g, g))]);
    }

    fn arb_series(order: u32, max_len: usize) -> impl Strategy<Value = (i64, Vec<u32>)> {
        (0i64..3, proptest::collection::vec(0..order, 1..max_len))
    }

    fn build(r: &SeriesRing, (v, cs): (i64, Vec<u32>)) -> Series {
        let prec = v + cs.len() as i64;
        let terms: Vec<(i64, u32)> = cs.iter().enumerate().map(|(i, &c)| (v + i as i64, c)).collect();
        Series::from_terms(r.field(), &terms, prec).unwrap()
    }

    proptest! {
        #[test]
        fn sigma_is_a_ring_endomorphism(a in arb_series(4, 8), b in arb_series(4, 8)) {
            let r = ring(2, 2, 2);
            let (a, b) = (build(&r, a), build(&r, b));
            let lhs = r.sigma(&r.add(&a, &b));
            let rhs = r.add(&r.sigma(&a), &r.sigma(&b));
            prop_assert!(r.eq_to_prec(&lhs, &rhs).holds);
            let lhs = r.sigma(&r.mul(&a, &b));
            let rhs = r.mul(&r.sigma(&a), &r.sigma(&b));
            prop_assert!(r.eq_to_prec(&lhs, &rhs).holds);
        }

        #[test]
        fn sigma_matches_power(a in arb_series(9, 7)) {
            let r = ring(3, 2, 3);
            let a = build(&r, a);
            let p = r.pow(&a, 3);
            prop_assert!(r.eq_to_prec(&p, &r.sigma(&a)).holds);
        }

        #[test]
        fn inverse_keeps_relative_precision(cs in proptest::collection::vec(0u32..3, 1..10), v in -3i64..3) {
            let r = ring(3, 1, 3);
            let mut cs = cs;
            cs[0] = 1 + cs[0] % 2;
            let a = build(&r, (0, cs)).shift(v);
            let inv = r.inv(&a).unwrap();
            prop_assert_eq!(inv.rel_prec(), a.rel_prec());
            let back = r.mul(&a, &inv);
            prop_assert!(r.eq_to_prec(&back, &Series::one(100)).holds);
            prop_assert_eq!(back.prec(), a.rel_prec());
        }

        #[test]
        fn truncation_commutes_with_products(a in arb_series(3, 12), b in arb_series(3, 12), cut in 1i64..6) {
            let r = ring(3, 1, 3);
            let (a, b) = (build(&r, a), build(&r, b));
            let full = r.mul(&a, &b);
            let low = r.mul(&a.truncate(a.prec() - cut), &b);
            prop_assert!(low.prec() <= full.prec());
            prop_assert!(r.eq_to_prec(&low, &full).holds);
        }
    }
}
