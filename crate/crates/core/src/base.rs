use alloc::format;
use alloc::sync::Arc;

use crate::error::{Error, Result};
use crate::field::GaloisField;
use crate::series::{Series, SeriesRing};

/// The fixed data every module lives over: `q = p^N0`, the residue field
/// `k = F_{q^m}`, the uniformiser `pi0` of `O0 = F_q[[pi0]]` written as an
/// element of `O = k[[pi]]`, and the working precision.
#[derive(Clone, Debug)]
pub struct BaseData {
    ring: SeriesRing,
    n0: u32,
    pi0: Series,
    prec: i64,
}

impl BaseData {
    /// `pi0` must have valuation `e >= 1` and its coefficients must lie in
    /// `F_q` so that `O0` is really `F_q[[pi0]]`.
    pub fn new(field: Arc<GaloisField>, n0: u32, pi0: Series, prec: i64) -> Result<Self> {
        if n0 == 0 || !field.degree().is_multiple_of(n0) {
            return Err(Error::Invalid(format!(
                "N0 = {n0} must divide the residue degree {}",
                field.degree()
            )));
        }
        let q = u64::from(field.characteristic()).pow(n0);
        let ring = SeriesRing::new(field, q)?;
        if pi0.is_zero() || pi0.val() < 1 {
            return Err(Error::Invalid("pi0 must have valuation at least 1".into()));
        }
        if pi0.terms().any(|(_, c)| ring.sigma_const(c) != c) {
            return Err(Error::Invalid("pi0 must have coefficients in F_q".into()));
        }
        if prec <= pi0.val() {
            return Err(Error::Invalid(format!("working precision {prec} must exceed e = {}", pi0.val())));
        }
        let pi0 = if pi0.prec() < prec { pi0 } else { pi0.truncate(prec) };
        Ok(BaseData { ring, n0, pi0, prec })
    }

    /// The common case `k = F_q` and `pi0 = pi^e`.
    pub fn simple(p: u32, n0: u32, e: i64, prec: i64) -> Result<Self> {
        let field = GaloisField::new(p, n0)?;
        BaseData::new(field, n0, Series::pi_pow(e, prec), prec)
    }

    pub fn ring(&self) -> &SeriesRing {
        &self.ring
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        self.ring.field()
    }

    pub fn p(&self) -> u32 {
        self.field().characteristic()
    }

    pub fn q(&self) -> u64 {
        self.ring.q()
    }

    pub fn n0(&self) -> u32 {
        self.n0
    }

    /// `e = v(pi0)`.
    pub fn e(&self) -> i64 {
        self.pi0.val()
    }

    pub fn pi0(&self) -> &Series {
        &self.pi0
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// The same base at another working precision.
    pub fn with_prec(&self, prec: i64) -> Result<Self> {
        if prec <= self.e() {
            return Err(Error::Invalid(format!("working precision {prec} must exceed e")));
        }
        Ok(BaseData { ring: self.ring.clone(), n0: self.n0, pi0: self.pi0.truncate(prec), prec })
    }

    /// Same field, `q` and `pi0` (to the smaller precision).
    pub fn compatible(&self, other: &BaseData) -> bool {
        **self.field() == **other.field()
            && self.q() == other.q()
            && self.ring.eq_to_prec(&self.pi0, &other.pi0).holds
    }

    pub fn check_compatible(&self, other: &BaseData) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(Error::BaseMismatch("modules live over different base data".into()))
        }
    }
}
