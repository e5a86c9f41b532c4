//! Herbrand functions as exact piecewise-linear maps, and the ramification
//! bound for modules killed by `[pi0^N]`.
//!
//! A function is stored by its breakpoints `0 < x_1 < ... < x_r` and the
//! slopes on `[0, x_1], [x_1, x_2], ..., [x_r, oo)`, with `phi(0) = 0`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::points::TowerStep;
use crate::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLFunction {
    breaks: Vec<Q>,
    slopes: Vec<Q>,
}

impl PLFunction {
    pub fn identity() -> Self {
        PLFunction { breaks: Vec::new(), slopes: vec![Q::one()] }
    }

    /// Build from breakpoints and slopes; merges equal neighbouring slopes.
    pub fn new(breaks: Vec<Q>, slopes: Vec<Q>) -> Result<Self> {
        if slopes.len() != breaks.len() + 1 {
            return Err(Error::Invalid("need one more slope than breakpoints".into()));
        }
        if breaks.iter().any(|b| *b <= Q::zero()) || breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("breakpoints must be positive and increasing".into()));
        }
        if slopes.iter().any(|s| *s <= Q::zero()) {
            return Err(Error::Invalid("slopes must be positive".into()));
        }
        let mut f = PLFunction { breaks: Vec::new(), slopes: vec![slopes[0]] };
        for (b, s) in breaks.into_iter().zip(slopes.into_iter().skip(1)) {
            if *f.slopes.last().unwrap() != s {
                f.breaks.push(b);
                f.slopes.push(s);
            }
        }
        Ok(f)
    }

    pub fn breaks(&self) -> &[Q] {
        &self.breaks
    }

    pub fn slopes(&self) -> &[Q] {
        &self.slopes
    }

    pub fn eval(&self, x: Q) -> Q {
        let mut y = Q::zero();
        let mut left = Q::zero();
        for (i, b) in self.breaks.iter().enumerate() {
            if x <= *b {
                return y + (x - left) * self.slopes[i];
            }
            y += (*b - left) * self.slopes[i];
            left = *b;
        }
        y + (x - left) * *self.slopes.last().unwrap()
    }

    /// The inverse function `psi`, evaluated at `y >= 0`.
    pub fn eval_inverse(&self, y: Q) -> Q {
        let mut x = Q::zero();
        let mut fx = Q::zero();
        for (i, b) in self.breaks.iter().enumerate() {
            let fb = fx + (*b - x) * self.slopes[i];
            if y <= fb {
                return x + (y - fx) / self.slopes[i];
            }
            x = *b;
            fx = fb;
        }
        x + (y - fx) / *self.slopes.last().unwrap()
    }

    /// `psi = phi^{-1}` as a function.
    pub fn inverse(&self) -> PLFunction {
        let breaks = self.breaks.iter().map(|b| self.eval(*b)).collect();
        let slopes = self.slopes.iter().map(|s| s.recip()).collect();
        PLFunction { breaks, slopes }
    }

    /// Continuous, increasing, concave, and every slope `1/n` for an integer `n`.
    pub fn is_herbrand(&self) -> bool {
        self.slopes.iter().all(|s| *s > Q::zero() && s.numer() == &1)
            && self.slopes.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn is_concave(&self) -> bool {
        self.slopes.windows(2).all(|w| w[0] >= w[1])
    }
}

/// The Herbrand function of one tower step.
pub fn pl_from_step(step: &TowerStep, p: u32) -> Result<PLFunction> {
    match *step {
        TowerStep::Unramified(_) => Ok(PLFunction::identity()),
        TowerStep::Tame(d) => {
            if d == 0 || d % u64::from(p) == 0 {
                return Err(Error::Invalid("tame degree must be prime to p".into()));
            }
            PLFunction::new(Vec::new(), vec![Q::new(1, d as i64)])
        }
        TowerStep::ArtinSchreier { q_power, break_m } => {
            if break_m <= 0 || break_m % i64::from(p) == 0 {
                return Err(Error::Invalid("Artin-Schreier break must be positive and prime to p".into()));
            }
            PLFunction::new(vec![Q::from_integer(break_m)], vec![Q::one(), Q::new(1, q_power as i64)])
        }
    }
}

/// `outer o inner`.
pub fn pl_compose(outer: &PLFunction, inner: &PLFunction) -> PLFunction {
    let mut pts: Vec<Q> = inner.breaks.clone();
    pts.extend(outer.breaks.iter().map(|b| inner.eval_inverse(*b)));
    pts.sort();
    pts.dedup();
    let value = |x: Q| outer.eval(inner.eval(x));
    let mut slopes = Vec::with_capacity(pts.len() + 1);
    let mut left = Q::zero();
    for b in &pts {
        slopes.push((value(*b) - value(left)) / (*b - left));
        left = *b;
    }
    slopes.push(*outer.slopes.last().unwrap() * *inner.slopes.last().unwrap());
    PLFunction::new(pts, slopes).expect("composition of valid functions")
}

/// The upper ramification break: `phi` of the last breakpoint, 0 without one.
pub fn max_break(phi: &PLFunction) -> Q {
    phi.breaks.last().map_or(Q::zero(), |b| phi.eval(*b))
}

/// `e (N + 1/(q-1)) - 1`.
pub fn theorem5_bound(e: i64, n: i64, q: i64) -> Q {
    Q::from_integer(e) * (Q::from_integer(n) + Q::new(1, q - 1)) - Q::one()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub bound: Q,
    pub measured: Q,
    pub holds: bool,
}

/// Compare a measured upper break with the bound for modules killed by
/// `[pi0^N]`.
pub fn theorem5_check(e: i64, n: i64, q: i64, measured_break: Q) -> Result<BoundCheck> {
    if e < 1 || n < 1 || q < 2 {
        return Err(Error::Invalid("need e, N >= 1 and q >= 2".into()));
    }
    let bound = theorem5_bound(e, n, q);
    Ok(BoundCheck { bound, measured: measured_break, holds: measured_break <= bound })
}

/// `max{alpha, (v - alpha)/q_power + alpha}`: one step of the descent on
/// the upper break.
pub fn prop7_step(v: Q, alpha: Q, q_power: i64) -> Result<Q> {
    if alpha <= Q::zero() {
        return Err(Error::Invalid("alpha must be positive".into()));
    }
    if q_power < 2 {
        return Err(Error::Invalid("q_power must be at least 2".into()));
    }
    let step = (v - alpha) / Q::from_integer(q_power) + alpha;
    Ok(if step > alpha { step } else { alpha })
}

/// `phi` of the field `K_alpha`, built as the tame step
/// `pi_M^{q^M - 1} = pi` followed by `T^{q^M} - T = pi_M^{-m}`.
pub fn herbrand_k_alpha(q: u64, m_exp: u32, m: i64, p: u32) -> Result<PLFunction> {
    let qm = q.pow(m_exp);
    let tame = pl_from_step(&TowerStep::Tame(qm - 1), p)?;
    let as_step = pl_from_step(&TowerStep::ArtinSchreier { q_power: qm, break_m: m }, p)?;
    Ok(pl_compose(&tame, &as_step))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: i64, b: i64) -> Q {
        Q::new(a, b)
    }

    #[test]
    fn step_functions() {
        let t = pl_from_step(&TowerStep::Tame(2), 3).unwrap();
        assert_eq!(t.eval(q(3, 1)), q(3, 2));
        assert_eq!(max_break(&t), Q::zero());
        let a = pl_from_step(&TowerStep::ArtinSchreier { q_power: 3, break_m: 2 }, 3).unwrap();
        assert_eq!(a.eval(q(2, 1)), q(2, 1));
        assert_eq!(a.eval(q(5, 1)), q(3, 1));
        assert_eq!(max_break(&a), q(2, 1));
        assert_eq!(pl_from_step(&TowerStep::Unramified(3), 3).unwrap(), PLFunction::identity());
        assert!(pl_from_step(&TowerStep::ArtinSchreier { q_power: 3, break_m: 3 }, 3).is_err());
    }

    #[test]
    fn compositions() {
        let t2 = pl_from_step(&TowerStep::Tame(2), 3).unwrap();
        let t5 = pl_from_step(&TowerStep::Tame(5), 3).unwrap();
        assert_eq!(pl_compose(&t2, &t5).slopes(), &[q(1, 10)]);
        assert_eq!(pl_compose(&PLFunction::identity(), &t5), t5);
        assert_eq!(pl_compose(&t5, &PLFunction::identity()), t5);
    }

    #[test]
    fn k_alpha_has_single_edge() {
        // q = 3, M = 1, m = 1: alpha = 1/2.
        let phi = herbrand_k_alpha(3, 1, 1, 3).unwrap();
        assert_eq!(phi.breaks().len(), 1);
        assert_eq!(max_break(&phi), q(1, 2));
        assert!(phi.is_herbrand());
        let phi = herbrand_k_alpha(2, 2, 5, 2).unwrap();
        assert_eq!(max_break(&phi), q(5, 3));
    }

    #[test]
    fn bounds() {
        assert_eq!(theorem5_bound(1, 1, 3), q(1, 2));
        assert_eq!(theorem5_bound(1, 1, 2), q(1, 1));
        assert_eq!(theorem5_bound(2, 2, 2), q(5, 1));
        assert!(theorem5_check(1, 1, 3, Q::zero()).unwrap().holds);
        assert!(!theorem5_check(1, 1, 3, q(1, 1)).unwrap().holds);
    }

    #[test]
    fn descent_step() {
        assert_eq!(prop7_step(q(2, 1), q(1, 1), 3).unwrap(), q(4, 3));
        assert_eq!(prop7_step(q(1, 1), q(1, 1), 3).unwrap(), q(1, 1));
        assert_eq!(prop7_step(q(1, 2), q(1, 1), 3).unwrap(), q(1, 1));
        assert!(prop7_step(q(1, 1), Q::zero(), 3).is_err());
    }

    fn arb_step() -> impl Strategy<Value = TowerStep> {
        prop_oneof![
            (1u32..4).prop_map(TowerStep::Unramified),
            prop_oneof![Just(2u64), Just(4), Just(5), Just(7)].prop_map(TowerStep::Tame),
            (1u32..3, 1i64..12)
                .prop_filter("prime to 3", |(_, m)| m % 3 != 0)
                .prop_map(|(k, m)| TowerStep::ArtinSchreier { q_power: 3u64.pow(k), break_m: m }),
        ]
    }

    proptest! {
        #[test]
        fn composition_is_associative_and_herbrand(a in arb_step(), b in arb_step(), c in arb_step()) {
            let (fa, fb, fc) = (pl_from_step(&a, 3).unwrap(), pl_from_step(&b, 3).unwrap(), pl_from_step(&c, 3).unwrap());
            let l = pl_compose(&pl_compose(&fa, &fb), &fc);
            let r = pl_compose(&fa, &pl_compose(&fb, &fc));
            prop_assert_eq!(&l, &r);
            prop_assert!(l.is_herbrand());
            for x in [q(1, 3), q(7, 2), q(40, 1)] {
                prop_assert_eq!(l.eval_inverse(l.eval(x)), x);
                prop_assert_eq!(l.eval(x), fa.eval(fb.eval(fc.eval(x))));
            }
        }

        #[test]
        fn descent_contracts(vn in 1i64..200, vd in 1i64..20, an in 1i64..50, ad in 1i64..20, k in 1u32..4) {
            let (v, alpha) = (q(vn, vd), q(an, ad));
            prop_assume!(v > alpha);
            let s = prop7_step(v, alpha, 3i64.pow(k)).unwrap();
            prop_assert!(s < v);
            prop_assert!(s >= alpha);
        }
    }
}
