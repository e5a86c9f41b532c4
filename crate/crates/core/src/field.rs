//! Finite fields `F_{p^d}` with table-driven multiplication.
//!
//! An element is stored as a `u32` whose base-`p` digits are its coordinates
//! with respect to the power basis `1, x, x^2, ...` of `F_p[x]/(f)`, where `f`
//! is the defining polynomial. Two equal elements therefore always have the
//! same encoding, which is what makes serialized values portable.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest field order we are willing to tabulate.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// A finite field of order `p^degree`.
pub struct GaloisField {
    p: u32,
    degree: u32,
    order: u32,
    /// Monic defining polynomial, coefficients low to high, length `degree + 1`.
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for the fixed generator `g`, for `0 <= i < order - 1`.
    exp: Vec<u32>,
    /// `log[a]` for `a != 0`; `log[0]` is unused.
    log: Vec<u32>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; modulus {:?})", self.p, self.degree, self.modulus)
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for GaloisField {}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Multiplication in `F_p[x]/(f)` on coordinate vectors, used only while
/// building the tables.
fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let d = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * d];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + u64::from(ai) * u64::from(bj)) % u64::from(p);
        }
    }
    for top in (d..2 * d).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        prod[top] = 0;
        for k in 0..d {
            let sub = c * u64::from(modulus[k]) % u64::from(p);
            let idx = top - d + k;
            prod[idx] = (prod[idx] + u64::from(p) - sub) % u64::from(p);
        }
    }
    prod.truncate(d);
    prod.into_iter().map(|c| c as u32).collect()
}

fn encode(coords: &[u32], p: u32) -> u32 {
    coords.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn decode(mut v: u32, p: u32, d: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(d);
    for _ in 0..d {
        out.push(v % p);
        v /= p;
    }
    out
}

impl GaloisField {
    /// The field `F_{p^d}` defined by the canonical default polynomial: the
    /// smallest (in encoding order) monic polynomial of degree `d` whose
    /// root generates the multiplicative group.
    pub fn new(p: u32, degree: u32) -> Result<Arc<Self>> {
        let order = Self::check_order(p, degree)?;
        if degree == 1 {
            return Self::with_modulus(p, &[0, 1]).inspect(|_f| {
                // x is zero in F_p[x]/(x); the generator search handles it.
                let _ = order;
            });
        }
        let d = degree as usize;
        let count = order; // number of choices for the non-leading coefficients
        for code in 0..count {
            let mut modulus = decode(code, p, d);
            if modulus[0] == 0 {
                continue;
            }
            modulus.push(1);
            if Self::root_is_primitive(p, &modulus, order) {
                return Self::with_modulus(p, &modulus);
            }
        }
        Err(Error::Field("no primitive polynomial found"))
    }

    /// The field defined by a user-supplied monic irreducible polynomial
    /// (coefficients low to high).
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Arc<Self>> {
        if modulus.len() < 2 || *modulus.last().unwrap_or(&0) != 1 {
            return Err(Error::Field("defining polynomial must be monic of degree >= 1"));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::Field("defining polynomial coefficient out of range"));
        }
        let degree = (modulus.len() - 1) as u32;
        let order = Self::check_order(p, degree)?;
        let d = degree as usize;
        // Find the smallest element generating the multiplicative group; this
        // also proves irreducibility (every nonzero element is then a unit).
        let mut generator = None;
        for cand in 1..order {
            let coords = decode(cand, p, d);
            if Self::element_order_is(p, modulus, &coords, order - 1) {
                generator = Some(coords);
                break;
            }
        }
        let g = generator.ok_or(Error::Field("defining polynomial is not irreducible"))?;
        let mut exp = Vec::with_capacity(order as usize - 1);
        let mut log = vec![0u32; order as usize];
        let mut cur = decode(1, p, d);
        for i in 0..(order - 1) {
            let code = encode(&cur, p);
            exp.push(code);
            log[code as usize] = i;
            cur = poly_mulmod(&cur, &g, modulus, p);
        }
        Ok(Arc::new(GaloisField { p, degree, order, modulus: modulus.to_vec(), exp, log }))
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Arc<Self>> {
        Self::with_modulus(p, &[0, 1])
    }

    fn check_order(p: u32, degree: u32) -> Result<u32> {
        if !is_prime(p) {
            return Err(Error::Field("characteristic must be prime"));
        }
        if degree == 0 {
            return Err(Error::Field("extension degree must be positive"));
        }
        let order = u64::from(p).checked_pow(degree).unwrap_or(u64::MAX);
        if order > MAX_FIELD_ORDER {
            return Err(Error::Field("field too large to tabulate"));
        }
        Ok(order as u32)
    }

    fn root_is_primitive(p: u32, modulus: &[u32], order: u32) -> bool {
        let d = modulus.len() - 1;
        let mut x = vec![0u32; d];
        if d == 1 {
            x[0] = (p - modulus[0]) % p;
        } else {
            x[1] = 1;
        }
        Self::element_order_is(p, modulus, &x, order - 1)
    }

    fn element_order_is(p: u32, modulus: &[u32], a: &[u32], target: u32) -> bool {
        let d = modulus.len() - 1;
        let one = decode(1, p, d);
        let mut cur = a.to_vec();
        if cur.iter().all(|&c| c == 0) {
            return false;
        }
        for i in 1..=target {
            if cur == one {
                return i == target;
            }
            cur = poly_mulmod(&cur, a, modulus, p);
        }
        false
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn zero(&self) -> u32 {
        0
    }

    #[inline]
    pub fn one(&self) -> u32 {
        1
    }

    /// The fixed multiplicative generator.
    pub fn generator(&self) -> u32 {
        self.exp.get(1).copied().unwrap_or(1)
    }

    pub fn coords(&self, a: u32) -> Vec<u32> {
        decode(a, self.p, self.degree as usize)
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<u32> {
        if coords.len() > self.degree as usize || coords.iter().any(|&c| c >= self.p) {
            return Err(Error::Field("coordinate vector does not describe a field element"));
        }
        Ok(encode(coords, self.p))
    }

    /// Image of an integer under `Z -> F_p -> F_{p^d}`.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(i64::from(self.p)) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.degree == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        while a != 0 || b != 0 {
            let s = (a % self.p + b % self.p) % self.p;
            out += s * place;
            place *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        if self.degree == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let mut a = a;
        let mut out = 0u32;
        let mut place = 1u32;
        while a != 0 {
            let c = a % self.p;
            out += ((self.p - c) % self.p) * place;
            place *= self.p;
            a /= self.p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.order - 1;
        let s = self.log[a as usize] + self.log[b as usize];
        self.exp[(if s >= n { s - n } else { s }) as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.order - 1;
        let l = self.log[a as usize];
        Some(self.exp[((n - l) % n) as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = u64::from(self.order - 1);
        let l = u64::from(self.log[a as usize]);
        self.exp[((l * (e % n)) % n) as usize]
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: u32, k: u32) -> u32 {
        let mut e = 1u64;
        for _ in 0..(k % self.degree) {
            e *= u64::from(self.p);
        }
        self.pow(a, e)
    }

    /// Scalar multiple by an integer.
    pub fn scale_int(&self, a: u32, n: i64) -> u32 {
        self.mul(a, self.from_int(n))
    }

    /// Discrete logarithm with respect to [`GaloisField::generator`].
    pub fn log(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.log[a as usize])
        }
    }

    pub fn exp(&self, i: u64) -> u32 {
        self.exp[(i % u64::from(self.order - 1)) as usize]
    }

    /// Whether `q = p^k` with `k | degree`, i.e. `F_q` is a subfield.
    pub fn contains_subfield_of_order(&self, q: u64) -> bool {
        let mut k = 0u32;
        let mut cur = 1u64;
        while cur < q {
            cur *= u64::from(self.p);
            k += 1;
        }
        cur == q && k > 0 && self.degree.is_multiple_of(k)
    }

    /// Elements of the subfield `F_q`, in increasing encoding order.
    pub fn subfield_elements(&self, q: u64) -> Vec<u32> {
        let mut out: Vec<u32> = (0..self.order).filter(|&a| self.pow(a, q) == a).collect();
        out.sort_unstable();
        out
    }

    /// A fixed generator of `F_q^*` inside this field.
    pub fn subfield_generator(&self, q: u64) -> u32 {
        let n = u64::from(self.order - 1);
        self.exp(n / (q - 1))
    }

    /// A primitive `n`-th root of unity, when `n | order - 1`.
    pub fn root_of_unity(&self, n: u64) -> Option<u32> {
        let m = u64::from(self.order - 1);
        if n == 0 || m % n != 0 {
            return None;
        }
        Some(self.exp(m / n))
    }

    /// Evaluate a polynomial over the prime field at `x`.
    fn eval_prime_poly(&self, coeffs: &[u32], x: u32) -> u32 {
        coeffs.iter().rev().fold(0u32, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// An embedding `small -> self` as a lookup table indexed by the encoding
    /// of `small`. The image of the defining root of `small` is the smallest
    /// root (by encoding) of its modulus inside `self`.
    pub fn embedding_from(&self, small: &GaloisField) -> Option<Vec<u32>> {
        if small.p != self.p || !self.degree.is_multiple_of(small.degree) {
            return None;
        }
        let root = (0..self.order).find(|&x| self.eval_prime_poly(&small.modulus, x) == 0)?;
        let mut powers = Vec::with_capacity(small.degree as usize);
        let mut cur = 1u32;
        for _ in 0..small.degree {
            powers.push(cur);
            cur = self.mul(cur, root);
        }
        let table = (0..small.order)
            .map(|a| {
                small
                    .coords(a)
                    .iter()
                    .zip(&powers)
                    .fold(0u32, |acc, (&c, &pw)| self.add(acc, self.scale_int(pw, i64::from(c))))
            })
            .collect();
        Some(table)
    }
}

/// Operation selector for [`ff_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    /// `a -> a^q` for the given `q`.
    FrobeniusQ(u64),
}

/// A field element bundled with its field, for callers that want checked
/// arithmetic across possibly different fields.
#[derive(Clone)]
pub struct FieldElem {
    field: Arc<GaloisField>,
    value: u32,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.field.coords(self.value))
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field) && self.value == other.value
    }
}

impl FieldElem {
    pub fn new(field: &Arc<GaloisField>, value: u32) -> Result<Self> {
        if value >= field.order {
            return Err(Error::Field("element encoding out of range"));
        }
        Ok(FieldElem { field: field.clone(), value })
    }

    pub fn from_coords(field: &Arc<GaloisField>, coords: &[u32]) -> Result<Self> {
        let value = field.from_coords(coords)?;
        Ok(FieldElem { field: field.clone(), value })
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn coords(&self) -> Vec<u32> {
        self.field.coords(self.value)
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }
}

/// Checked field arithmetic. Binary operations require both operands to live
/// in the same field; `b` is ignored by the unary operations.
pub fn ff_arith(a: &FieldElem, b: &FieldElem, op: FieldOp) -> Result<FieldElem> {
    let f = &a.field;
    if !(Arc::ptr_eq(f, &b.field) || **f == *b.field) {
        return Err(Error::FieldMismatch);
    }
    let value = match op {
        FieldOp::Add => f.add(a.value, b.value),
        FieldOp::Mul => f.mul(a.value, b.value),
        FieldOp::Inv => f.inv(a.value).ok_or(Error::DivisionByZero)?,
        FieldOp::FrobeniusQ(q) => f.pow(a.value, q),
    };
    Ok(FieldElem { field: f.clone(), value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_small_fields() -> Vec<Arc<GaloisField>> {
        vec![
            GaloisField::new(2, 1).unwrap(),
            GaloisField::new(3, 1).unwrap(),
            GaloisField::new(2, 2).unwrap(),
            GaloisField::new(2, 3).unwrap(),
            GaloisField::new(3, 2).unwrap(),
        ]
    }

    #[test]
    fn f3_addition() {
        let f = GaloisField::new(3, 1).unwrap();
        let two = FieldElem::new(&f, 2).unwrap();
        let r = ff_arith(&two, &two, FieldOp::Add).unwrap();
        assert_eq!(r.value(), 1);
    }

    #[test]
    fn f4_defining_relation() {
        // g^2 = g + 1 with g = x
        let f = GaloisField::with_modulus(2, &[1, 1, 1]).unwrap();
        let g = FieldElem::from_coords(&f, &[0, 1]).unwrap();
        let sq = ff_arith(&g, &g, FieldOp::Mul).unwrap();
        assert_eq!(sq.coords(), vec![1, 1]);
    }

    #[test]
    fn fermat_on_prime_field() {
        let f = GaloisField::new(3, 1).unwrap();
        let two = FieldElem::new(&f, 2).unwrap();
        let r = ff_arith(&two, &two, FieldOp::FrobeniusQ(3)).unwrap();
        assert_eq!(r.value(), 2);
    }

    #[test]
    fn inverse_of_zero_fails() {
        let f = GaloisField::new(5, 1).unwrap();
        let z = FieldElem::new(&f, 0).unwrap();
        assert!(matches!(ff_arith(&z, &z, FieldOp::Inv), Err(Error::DivisionByZero)));
    }

    #[test]
    fn mismatched_fields_rejected() {
        let a = FieldElem::new(&GaloisField::new(2, 2).unwrap(), 1).unwrap();
        let b = FieldElem::new(&GaloisField::new(2, 3).unwrap(), 1).unwrap();
        assert!(matches!(ff_arith(&a, &b, FieldOp::Add), Err(Error::FieldMismatch)));
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(GaloisField::with_modulus(2, &[1, 0, 1]).is_err());
    }

    #[test]
    fn field_axioms_by_enumeration() {
        for f in all_small_fields() {
            let n = f.order();
            for a in 0..n {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..n {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..n {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn default_polynomials_are_canonical() {
        let a = GaloisField::new(2, 2).unwrap();
        let b = GaloisField::new(2, 2).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(a.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let small = GaloisField::new(2, 2).unwrap();
        let big = GaloisField::new(2, 4).unwrap();
        let t = big.embedding_from(&small).unwrap();
        for a in 0..small.order() {
            for b in 0..small.order() {
                assert_eq!(t[small.mul(a, b) as usize], big.mul(t[a as usize], t[b as usize]));
                assert_eq!(t[small.add(a, b) as usize], big.add(t[a as usize], t[b as usize]));
            }
        }
    }

    #[test]
    fn subfield_elements_are_fixed_points() {
        let f = GaloisField::new(2, 4).unwrap();
        let sub = f.subfield_elements(4);
        assert_eq!(sub.len(), 4);
        let g = f.subfield_generator(4);
        assert_eq!(f.pow(g, 3), 1);
        assert_ne!(g, 1);
    }
}
