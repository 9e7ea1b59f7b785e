use gevrey_nets::weights::{
    check_assoc_m2, check_conditions, default_omega_grid, gevrey_pair, log_grid, omega_check, WeightFunction,
    WeightSequence,
};
use gevrey_nets::Error;
use proptest::prelude::*;

fn brute(seq: &WeightSequence, t: f64) -> f64 {
    seq.log_m().iter().enumerate().map(|(p, lm)| p as f64 * t.ln() - lm).fold(0.0, f64::max)
}

#[test]
fn gevrey_conditions() {
    let rep = check_conditions(&WeightSequence::gevrey(2.0, 128).unwrap());
    assert!(rep.m1_ok && rep.m2_ok);
    assert_eq!(rep.m2_constants, Some((1.0, 4.0)));
    assert!(rep.m3prime_converges && rep.heuristic);
    assert!(!check_conditions(&WeightSequence::gevrey(1.0, 128).unwrap()).m3prime_converges);
}

#[test]
fn associated_function_examples() {
    let g1 = WeightSequence::gevrey(1.0, 200).unwrap();
    let m = g1.assoc(10.0).unwrap();
    assert!((m - (1e9f64.ln() - (1..=9).map(|k| (k as f64).ln()).sum::<f64>())).abs() < 1e-12);
    assert!((m - 7.9215).abs() < 1e-3);
    assert!((g1.assoc_inverse(m).unwrap() - 10.0).abs() < 1e-6 * 10.0);
    let g2 = WeightSequence::gevrey(2.0, 200).unwrap();
    assert_eq!(g2.assoc(0.5).unwrap(), 0.0);
    assert_eq!(g2.assoc(0.0).unwrap(), 0.0);
    assert!(g2.assoc(-1.0).is_err());
    assert!(matches!(g2.assoc(1e6), Err(Error::Saturation { .. })));
}

#[test]
fn functional_m2() {
    let g2 = WeightSequence::gevrey(2.0, 256).unwrap();
    let decades: Vec<f64> = (0..=5).map(|j| 10f64.powi(j)).collect();
    assert!(check_assoc_m2(&g2.with_p_max(4096).unwrap(), 1.0, 4.0, &decades).unwrap());
    assert!(check_assoc_m2(&g2, 1.0, 4.0, &[0.0]).unwrap());
    let quadratic = WeightSequence::custom((0..=64).map(|p| (p * p) as f64).collect()).unwrap();
    assert!(!check_conditions(&quadratic).m2_ok);
    let t = log_grid(1.0, 1e20, 40);
    assert!(!check_assoc_m2(&quadratic, 1.0, 4.0, &t).unwrap());
}

#[test]
fn omega_examples() {
    let grid = default_omega_grid();
    let log = omega_check(&WeightFunction::log_one_plus_t(), &grid).unwrap();
    assert!(log.alpha_ok && log.gamma_ok && !log.gamma0_ok);
    assert!((log.gamma0_ratio - 1.0).abs() < 0.1);
    let sqrt = omega_check(&WeightFunction::power(0.5).unwrap(), &grid).unwrap();
    assert!(sqrt.alpha_ok && sqrt.beta_ok && sqrt.gamma_ok && sqrt.gamma0_ok);
    let linear = omega_check(&WeightFunction::power(1.0).unwrap(), &grid).unwrap();
    assert!(!linear.beta_ok);
}

#[test]
fn gevrey_pairs() {
    for (s, sigma) in [(2.0, 1.5), (1.2, 1.1)] {
        let (m, n, rep) = gevrey_pair(s).unwrap();
        assert!(rep.valid, "{rep:?}");
        assert_eq!(m.spec(), WeightSequence::gevrey(s, m.p_max()).unwrap().spec());
        assert!((rep.sigma - sigma).abs() < 1e-12);
        assert_eq!(n.spec(), WeightSequence::gevrey(sigma, n.p_max()).unwrap().spec());
    }
    assert!(gevrey_pair(1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn assoc_matches_brute_force(s in 1.05f64..3.0, log_t in -3.0f64..6.0) {
        let seq = WeightSequence::gevrey(s, 300).unwrap();
        let t = log_t.exp();
        if t < seq.t_saturation() {
            let a = seq.assoc(t).unwrap();
            prop_assert!((a - brute(&seq, t)).abs() <= 1e-12 * a.max(1.0));
        }
        prop_assert!((seq.assoc_truncated(t).unwrap() - brute(&seq, t)).abs() <= 1e-12 * brute(&seq, t).max(1.0));
    }

    #[test]
    fn assoc_inverse_round_trips(s in 1.05f64..3.0, log_t in 0.1f64..6.0) {
        let seq = WeightSequence::gevrey(s, 2000).unwrap();
        let t = log_t.exp();
        prop_assume!(t > seq.m1());
        let back = seq.assoc_inverse(seq.assoc(t).unwrap()).unwrap();
        prop_assert!((back - t).abs() <= 1e-6 * t);
    }

    #[test]
    fn omega_is_subadditive_and_monotone(a in 0.1f64..1.0, t1 in 0.0f64..1e4, t2 in 0.0f64..1e4) {
        for w in [WeightFunction::log_one_plus_t(), WeightFunction::power(a).unwrap()] {
            prop_assert!(w.eval(t1 + t2) <= w.eval(t1) + w.eval(t2) + 1e-12);
            prop_assert!(w.eval(t1.max(t2)) >= w.eval(t1.min(t2)));
        }
    }
}
