//! Property tests over randomized sizes, thresholds, and windows.

use blspec::bounds::{
    lemma_key_audit, theorem1_bound, theorem2_bound, tool1_bound, Theorem1Tail, Theorem2Tail,
};
use blspec::exact::{from_f64, rq, to_f64};
use blspec::kernels::{tail_term, PairDistribution};
use blspec::spectrum::{Side, SpectralMeasure};
use blspec::spherical::orthogonality_check;
use proptest::prelude::*;

fn even_n() -> impl Strategy<Value = u64> {
    (2u64..=60).prop_map(|half| 2 * half)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn master_bounds_are_sound(n in even_n(), t in 0.05f64..8.0) {
        let ni = n as i128;
        let p1 = PairDistribution::v1(n).unwrap();
        let bb = theorem1_bound(&p1, t, &rq(2, ni * ni), &Theorem1Tail::Exact).unwrap();
        prop_assert!(bb.sound, "thm1 n={n} t={t}: {} < {}", bb.total, bb.exact);
        let p2 = PairDistribution::v2(n).unwrap();
        let bb = theorem2_bound(&p2, t, &rq(4, ni), &Theorem2Tail::Exact).unwrap();
        prop_assert!(bb.sound, "thm2 n={n} t={t}: {} < {}", bb.total, bb.exact);
    }

    #[test]
    fn tool1_dominates_tail(n in even_n(), t in 0.05f64..8.0, c in 0.05f64..4.0) {
        let p = PairDistribution::v1(n).unwrap();
        let c_rat = from_f64(c).unwrap();
        let t_rat = from_f64(t).unwrap();
        prop_assert!(tool1_bound(&p, &c_rat).unwrap() >= tail_term(&p, &t_rat));
    }

    #[test]
    fn smoothing_lemma_holds(n in even_n(), a in 0.0f64..6.0, len in 0.0f64..6.0, cap in 0.05f64..4.0) {
        let a_rat = from_f64(a).unwrap();
        let b_rat = from_f64(a + len).unwrap();
        let cap_rat = from_f64(cap).unwrap();
        for p in [PairDistribution::v1(n).unwrap(), PairDistribution::v2(n).unwrap()] {
            let audit = lemma_key_audit(&p, &a_rat, &b_rat, &cap_rat).unwrap();
            prop_assert!(audit.holds, "n={n} a={a} b={} K={cap}", a + len);
        }
    }

    #[test]
    fn cdf_is_monotone_and_ordered(n in even_n(), t1 in 0.0f64..10.0, t2 in 0.0f64..10.0) {
        let m = SpectralMeasure::new(n).unwrap();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let lo = from_f64(lo).unwrap();
        let hi = from_f64(hi).unwrap();
        let right_lo = m.cdf_w(&lo, Side::Right).unwrap();
        let right_hi = m.cdf_w(&hi, Side::Right).unwrap();
        prop_assert!(right_lo <= right_hi);
        let left_lo = m.cdf_w(&lo, Side::Left).unwrap();
        prop_assert!(left_lo <= right_lo);
    }

    #[test]
    fn scaled_distance_stays_bounded(n in even_n()) {
        let r = SpectralMeasure::new(n).unwrap().kolmogorov_distance();
        prop_assert!(r.scaled <= 1.0, "n={n}: {}", r.scaled);
        prop_assert!(r.distance >= 0.0 && r.distance <= 1.0);
    }

    #[test]
    fn orthogonality_random_pairs(n in 2u64..=16, k_frac in 0.0f64..=1.0) {
        let k = ((n / 2) as f64 * k_frac).round() as u64;
        let rep = orthogonality_check(n, k).unwrap();
        prop_assert!(rep.ok(), "n={n} k={k}: {:?}", rep.failures);
    }

    #[test]
    fn binomial_ratio_tail(n in even_n(), a_frac in 0.0f64..=1.0) {
        let a = ((n / 2) as f64 * a_frac).round() as u64;
        let check = blspec::spectrum::binomial_tail_bound_check(n, a).unwrap();
        prop_assert!(check.holds, "n={n} a={a}: ratio {} bound {}", to_f64(&check.ratio), check.bound);
    }
}
