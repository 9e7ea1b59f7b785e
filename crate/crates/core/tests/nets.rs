use gevrey_nets::distributions::{regularize, ModelDistribution};
use gevrey_nets::fourier::GridSpec;
use gevrey_nets::growth::{Mode, Weight};
use gevrey_nets::mollifier::build_mollifier;
use gevrey_nets::nets::{
    apply_ultradiff, classify_generalized_number, constant_embed, point_value, spectral_derivative, EpsilonLadder,
    GeneralizedNumber, GeneralizedPoint, NetFunction, UltradiffOperator,
};
use gevrey_nets::weights::WeightSequence;
use gevrey_nets::Complex64;
use proptest::prelude::*;

fn weight() -> Weight {
    Weight::Sequence(WeightSequence::gevrey(2.0, 256).unwrap())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The point where each frame attains its sup on `[-r, r]`.
fn sup_tracking(a: &NetFunction, r: f64) -> GeneralizedPoint {
    let points = a
        .frames
        .iter()
        .map(|f| {
            let (i, _) = f
                .iter()
                .enumerate()
                .filter(|(i, _)| a.grid.x(*i).abs() <= r)
                .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
                .unwrap();
            vec![a.grid.x(i)]
        })
        .collect();
    GeneralizedPoint::new(a.ladder, points, vec![-r], vec![r]).unwrap()
}

#[test]
fn point_values_see_negligibility() {
    let grid = GridSpec::one_d(20.0, 32768).unwrap();
    let ladder = EpsilonLadder::dyadic(3, 10).unwrap();
    let moll = build_mollifier(1.5, &grid).unwrap();
    let g = ModelDistribution::gaussian();
    let sigma = constant_embed(&g.sample(&grid).unwrap(), &grid, &ladder, Mode::Beurling, weight()).unwrap();
    let null = regularize(&g, &moll, &ladder, &grid).unwrap().sub(&sigma).unwrap();
    let delta = regularize(&ModelDistribution::Delta, &moll, &ladder, &grid).unwrap();
    for mode in [Mode::Beurling, Mode::Roumieu] {
        for x in [sup_tracking(&null, 5.0), GeneralizedPoint::classical(ladder, &[0.7]).unwrap()] {
            let v = classify_generalized_number(&point_value(&null, &x).unwrap(), &weight(), mode).unwrap();
            assert!(v.negligible, "{mode:?}: {:?}", v.nu);
        }
        let at_peak = point_value(&delta, &sup_tracking(&delta, 5.0)).unwrap();
        let v = classify_generalized_number(&at_peak, &weight(), mode).unwrap();
        assert!(!v.negligible && v.moderate, "{mode:?}");
    }
    let off_support = point_value(&delta, &GeneralizedPoint::classical(ladder, &[1.0]).unwrap()).unwrap();
    assert!(classify_generalized_number(&off_support, &weight(), Mode::Roumieu).unwrap().negligible);
}

#[test]
fn generalized_numbers_validate() {
    let ladder = EpsilonLadder::dyadic(1, 6).unwrap();
    assert!(GeneralizedNumber::from_real(ladder, &[1.0; 5]).is_err());
    assert!(GeneralizedNumber::from_real(ladder, &[f64::NAN; 6]).is_err());
    let zero = GeneralizedNumber::from_real(ladder, &[0.0; 6]).unwrap();
    let v = classify_generalized_number(&zero, &weight(), Mode::Beurling).unwrap();
    assert!(v.negligible && v.moderate);
    let one = GeneralizedNumber::from_real(ladder, &[1.0; 6]).unwrap();
    let v = classify_generalized_number(&one, &weight(), Mode::Roumieu).unwrap();
    assert!(v.moderate && !v.negligible);
}

#[test]
fn derivative_of_a_gaussian_is_exact() {
    let grid = GridSpec::one_d(20.0, 4096).unwrap();
    let ladder = EpsilonLadder::dyadic(1, 6).unwrap();
    let f: Vec<Complex64> = grid.axis().iter().map(|&x| c((-x * x).exp())).collect();
    let net = constant_embed(&f, &grid, &ladder, Mode::Beurling, weight()).unwrap();
    let d = spectral_derivative(&net, &[1]).unwrap();
    for (i, &x) in grid.axis().iter().enumerate() {
        assert!((d.frames[0][i] - c(-2.0 * x * (-x * x).exp())).norm() < 1e-10, "x={x}");
    }
    let seq = WeightSequence::gevrey(2.0, 256).unwrap();
    let id = apply_ultradiff(&UltradiffOperator::identity(1, &seq), &net).unwrap();
    let err = id.frames[3].iter().zip(&net.frames[3]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn point_values_respect_the_algebra(a in 0.2f64..3.0, b in -2.0f64..2.0, nodes in proptest::collection::vec(0usize..1024, 6)) {
        let grid = GridSpec::one_d(10.0, 1024).unwrap();
        let ladder = EpsilonLadder::dyadic(1, 6).unwrap();
        let f: Vec<Complex64> = grid.axis().iter().map(|&x| c((-a * x * x).exp())).collect();
        let g: Vec<Complex64> = grid.axis().iter().map(|&x| c((x - b).sin())).collect();
        let fnet = constant_embed(&f, &grid, &ladder, Mode::Beurling, weight()).unwrap();
        let gnet = constant_embed(&g, &grid, &ladder, Mode::Beurling, weight()).unwrap();
        let x = GeneralizedPoint::new(ladder, nodes.iter().map(|&i| vec![grid.x(i)]).collect(), vec![-10.0], vec![10.0]).unwrap();
        let fx = point_value(&fnet, &x).unwrap();
        let gx = point_value(&gnet, &x).unwrap();
        let prod = point_value(&fnet.mul(&gnet).unwrap(), &x).unwrap();
        let sum = point_value(&fnet.add(&gnet).unwrap(), &x).unwrap();
        // Point values below the noise floor of a frame read as zero.
        for j in 0..6 {
            prop_assert!((prod.values[j] - fx.values[j] * gx.values[j]).norm() <= 2e-11);
            prop_assert!((sum.values[j] - fx.values[j] - gx.values[j]).norm() <= 4e-11);
        }
    }
}
