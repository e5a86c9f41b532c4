//! Explicit extension towers over `K = k((pi))`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::base::BaseData;
use crate::error::{Error, Result};
use crate::field::GaloisField;
use crate::ramif::{pl_compose, pl_from_step, PLFunction};
use crate::series::{Series, SeriesRing};

/// Largest residue field the solver will build.
pub const MAX_TOWER_FIELD: u32 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerStep {
    /// Unramified of the given degree.
    Unramified(u32),
    /// `pi_new^d = pi_old`, with `d` prime to `p`.
    Tame(u64),
    /// `T^{q_power} - T = r` with `v(r) = -break_m`, `break_m` prime to `p`.
    ArtinSchreier { q_power: u64, break_m: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionTower {
    pub steps: Vec<TowerStep>,
}

fn smallest_prime_factor(n: u64) -> u64 {
    (2..=n).find(|d| n.is_multiple_of(*d)).unwrap_or(n)
}

impl ExtensionTower {
    pub fn new(steps: Vec<TowerStep>) -> Self {
        ExtensionTower { steps }
    }

    pub fn trivial() -> Self {
        ExtensionTower { steps: Vec::new() }
    }

    /// Check the step invariants for residue characteristic `p`.
    pub fn check(&self, p: u32) -> Result<()> {
        let p = u64::from(p);
        for (i, s) in self.steps.iter().enumerate() {
            match *s {
                TowerStep::Unramified(0) => {
                    return Err(Error::Invalid(format!("step {i}: unramified degree 0")));
                }
                TowerStep::Tame(d) if d == 0 || d % p == 0 => {
                    return Err(Error::Invalid(format!("step {i}: tame degree {d} is not prime to {p}")));
                }
                TowerStep::ArtinSchreier { q_power, break_m } => {
                    if q_power < 2 || smallest_prime_factor(q_power) != p || !q_power.is_power_of(p) {
                        return Err(Error::Invalid(format!("step {i}: {q_power} is not a power of {p}")));
                    }
                    if break_m <= 0 || (break_m as u64).is_multiple_of(p) {
                        return Err(Error::Invalid(format!(
                            "step {i}: break {break_m} must be positive and prime to {p}"
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn ramification_index(&self) -> u64 {
        self.steps
            .iter()
            .map(|s| match *s {
                TowerStep::Unramified(_) => 1,
                TowerStep::Tame(d) => d,
                TowerStep::ArtinSchreier { q_power, .. } => q_power,
            })
            .product()
    }

    pub fn residue_degree(&self) -> u64 {
        self.steps
            .iter()
            .map(|s| match *s {
                TowerStep::Unramified(m) => u64::from(m),
                _ => 1,
            })
            .product()
    }

    pub fn is_tame(&self) -> bool {
        !self.steps.iter().any(|s| matches!(s, TowerStep::ArtinSchreier { .. }))
    }

    /// `phi_{L/K}`, the composite of the step functions from the bottom up.
    pub fn herbrand(&self, p: u32) -> Result<PLFunction> {
        let mut phi = PLFunction::identity();
        for s in &self.steps {
            phi = pl_compose(&phi, &pl_from_step(s, p)?);
        }
        Ok(phi)
    }
}

trait PowerOf {
    fn is_power_of(self, p: u64) -> bool;
}

impl PowerOf for u64 {
    fn is_power_of(self, p: u64) -> bool {
        let mut x = self;
        while x > 1 && x.is_multiple_of(p) {
            x /= p;
        }
        x == 1
    }
}

/// The top field `L = k'((w))` of a tame tower, with `w^E = pi` and `k'`
/// the extension of `k` of the tower's residue degree.
#[derive(Clone, Debug)]
pub struct TowerField {
    pub tower: ExtensionTower,
    /// Ring of series in `w` over `k'`, with Frobenius `x -> x^q`.
    pub ring: SeriesRing,
    /// `E`, the ramification index over `K`.
    pub ram: u64,
    /// `k -> k'` as a lookup table.
    pub embed: Vec<u32>,
}

impl TowerField {
    pub fn new(base: &BaseData, tower: &ExtensionTower) -> Result<Self> {
        tower.check(base.p())?;
        if !tower.is_tame() {
            return Err(Error::Unsupported("the point solver handles tame towers only".into()));
        }
        let k = base.field();
        let f = tower.residue_degree();
        let deg = u64::from(k.degree()) * f;
        let order = u64::from(k.characteristic()).checked_pow(deg as u32).unwrap_or(u64::MAX);
        if order > u64::from(MAX_TOWER_FIELD) {
            return Err(Error::SizeCap { size: order, cap: u64::from(MAX_TOWER_FIELD) });
        }
        let big: Arc<GaloisField> = if f == 1 { k.clone() } else { GaloisField::new(k.characteristic(), deg as u32)? };
        let embed = if f == 1 {
            (0..k.order()).collect()
        } else {
            big.embedding_from(k).ok_or(Error::Field("no embedding into the tower residue field"))?
        };
        let ring = SeriesRing::new(big, base.q())?;
        Ok(TowerField { tower: tower.clone(), ring, ram: tower.ramification_index(), embed })
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        self.ring.field()
    }

    /// Image of a series in `pi` over `k`: `pi -> w^E`, coefficients embedded.
    pub fn inflate(&self, s: &Series) -> Series {
        let e = self.ram as i64;
        let prec = s.prec().saturating_mul(e);
        let terms: Vec<(i64, u32)> = s.terms().map(|(i, c)| (i * e, self.embed[c as usize])).collect();
        Series::from_terms(self.field(), &terms, prec).expect("embedded terms are in range")
    }

    /// A primitive `E`-th root of unity in `k'`, when there is one.
    pub fn zeta(&self) -> Option<u32> {
        self.field().root_of_unity(self.ram)
    }

    /// The automorphism `w -> zeta w` over `K`.
    pub fn rotate(&self, s: &Series, zeta: u32) -> Series {
        let f = self.field();
        let terms: Vec<(i64, u32)> =
            s.terms().map(|(i, c)| (i, f.mul(c, f.pow(zeta, i.rem_euclid(self.ram as i64) as u64)))).collect();
        Series::from_terms(f, &terms, s.prec()).expect("in range")
    }
}

/// The tame tower `Tame(q^n - 1)`, `Unramified(n)` that splits monomial
/// systems of length `n`.
pub fn suggest_tame_tower(q: u64, n: u32) -> ExtensionTower {
    let mut steps = Vec::new();
    let d = q.pow(n) - 1;
    if d > 1 {
        steps.push(TowerStep::Tame(d));
    }
    if n > 1 {
        steps.push(TowerStep::Unramified(n));
    }
    ExtensionTower::new(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_checks() {
        assert!(ExtensionTower::new(alloc::vec![TowerStep::Tame(3)]).check(3).is_err());
        assert!(ExtensionTower::new(alloc::vec![TowerStep::Tame(2)]).check(3).is_ok());
        let bad = TowerStep::ArtinSchreier { q_power: 3, break_m: 3 };
        assert!(ExtensionTower::new(alloc::vec![bad]).check(3).is_err());
        let good = TowerStep::ArtinSchreier { q_power: 9, break_m: 2 };
        assert!(ExtensionTower::new(alloc::vec![good]).check(3).is_ok());
    }

    #[test]
    fn invariants_of_suggested_tower() {
        let t = suggest_tame_tower(3, 2);
        assert_eq!(t.ramification_index(), 8);
        assert_eq!(t.residue_degree(), 2);
        assert!(t.is_tame());
    }

    #[test]
    fn inflation_and_rotation() {
        let b = BaseData::simple(3, 1, 1, 6).unwrap();
        let tf = TowerField::new(&b, &suggest_tame_tower(3, 1)).unwrap();
        let s = tf.inflate(&Series::pi_pow(1, 6));
        assert_eq!((s.val(), s.prec()), (2, 12));
        let z = tf.zeta().unwrap();
        assert_eq!(tf.field().pow(z, 2), 1);
        let w = Series::pi_pow(1, 12);
        assert_eq!(tf.rotate(&w, z).lead(), z);
        assert_eq!(tf.rotate(&s, z), s);
    }
}
