//! End to end on `mu_{pi^a}` (`C = pi^a`, `D = 0`, `pi0 = pi^e`), where the
//! points are known in closed form: `pi^{e-a} X^q = pi^e X` gives
//! `X^{q-1} = pi^a`, so the nonzero points are `beta w^{aE/(q-1)}` with
//! `beta` running over `F_q^*`.

use std::collections::BTreeSet;

use proptest::prelude::*;
use strictmod_core::hopf::functor_l_roundtrip;
use strictmod_core::modcat::{direct_sum, mu_lambda};
use strictmod_core::points::{build_equations, min_pairwise_gap, solve_points, suggest_tame_tower, tame_character};
use strictmod_core::{BaseData, Series, SigmaModule, Q};

fn mu(p: u32, n0: u32, e: i64, a: i64, prec: i64) -> SigmaModule {
    let b = BaseData::simple(p, n0, e, prec).unwrap();
    mu_lambda(&b, &Series::pi_pow(a, prec)).unwrap()
}

fn params() -> impl Strategy<Value = (u32, u32, i64, i64)> {
    prop::sample::select(vec![(2u32, 1u32), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)])
        .prop_flat_map(|(p, n0)| {
            let q = i64::from(p).pow(n0);
            (Just(p), Just(n0), 1..=3i64.min(q - 1).max(1))
        })
        .prop_flat_map(|(p, n0, e)| (Just(p), Just(n0), Just(e), 0..=e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn points_are_the_closed_form((p, n0, e, a) in params()) {
        let m = mu(p, n0, e, a, 12);
        let q = m.base().q();
        let sys = build_equations(&m).unwrap();
        let pts = solve_points(&sys, &suggest_tame_tower(q, 1), 12).unwrap();
        let big_e = pts.field.ram as i64;
        prop_assert_eq!((a * big_e) % (q as i64 - 1), 0);
        let want_val = a * big_e / (q as i64 - 1);
        let fq: BTreeSet<u32> = pts.field.field().subfield_elements(q).into_iter().collect();
        let mut betas = BTreeSet::new();
        for pt in &pts.points {
            let x = &pt.coords[0];
            if x.is_zero() {
                betas.insert(0);
                continue;
            }
            prop_assert_eq!(x.val(), want_val);
            prop_assert_eq!(x.terms().count(), 1);
            betas.insert(x.lead());
        }
        prop_assert_eq!(betas, fq);

        let gap = min_pairwise_gap(&pts).unwrap();
        prop_assert_eq!(gap, Q::new(a, q as i64 - 1));
        prop_assert!(gap <= Q::new(e, q as i64 - 1));
    }

    #[test]
    fn character_and_roundtrip((p, n0, e, a) in params()) {
        let m = mu(p, n0, e, a, 8);
        let ch = tame_character(&m).unwrap();
        prop_assert_eq!(ch.digits.clone(), vec![a]);
        prop_assert_eq!(ch.exponent, a as u64);
        prop_assert_eq!(ch.realized.clone(), vec![a as u64]);
        let rt = functor_l_roundtrip(&m, 1 << 12).unwrap();
        prop_assert!(rt.holds());
        prop_assert_eq!(rt.kernel_dim, n0 as usize);
    }
}

#[test]
fn sums_multiply_point_counts() {
    let (a, b) = (mu(3, 1, 2, 1, 12), mu(3, 1, 2, 2, 12));
    let s = direct_sum(&a, &b).unwrap();
    let sys = build_equations(&s).unwrap();
    let pts = solve_points(&sys, &suggest_tame_tower(3, 1), 12).unwrap();
    assert_eq!(pts.points.len(), 9);
    // The pair (x, y) is a point iff each coordinate is: valuations 1/2 and 1.
    for pt in &pts.points {
        let (x, y) = (&pt.coords[0], &pt.coords[1]);
        assert!(x.is_zero() || x.val() == 1);
        assert!(y.is_zero() || y.val() == 2);
    }
    assert_eq!(min_pairwise_gap(&pts).unwrap(), Q::new(1, 2));
}
