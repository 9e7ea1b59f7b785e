use gevrey_nets::fourier::GridSpec;
use gevrey_nets::mollifier::{
    build_mollifier, gevrey_bump, min_admissible_eps, sample_phi_eps, verify_mollifier, GevreyBump, Plateau,
};
use proptest::prelude::*;

fn integral(f: &[f64], g: &GridSpec) -> f64 {
    f.iter().sum::<f64>() * g.dx()
}

#[test]
fn bump_examples() {
    let b = GevreyBump::new(1.5, 1.0).unwrap();
    assert!((b.raw(0.0) - (-1.0f64).exp()).abs() < 1e-15);
    let g = GridSpec::one_d(4.0, 8192).unwrap();
    let rho = gevrey_bump(1.5, 1.0, &g).unwrap();
    assert!((integral(&rho, &g) - 1.0).abs() < 1e-8);
    assert!(rho.iter().all(|&v| v >= 0.0));
    assert_eq!(b.value(1.0), 0.0);
    assert_eq!(b.value(-1.0), 0.0);
    assert!(GevreyBump::new(1.0, 1.0).is_err());
}

#[test]
fn plateau_values() {
    let p = Plateau::new(1.5).unwrap();
    assert!((p.eval(0.0) - 1.0).abs() < 1e-8);
    assert!((p.eval(0.999) - 1.0).abs() < 1e-6);
    assert!(p.eval(2.001).abs() < 1e-6);
    let mid = p.eval(1.75);
    assert!(mid > 0.0 && mid < 1.0);
}

#[test]
fn mollifier_examples() {
    let g = GridSpec::one_d(20.0, 4096).unwrap();
    let m = build_mollifier(1.5, &g).unwrap();
    assert!((m.psi[0] - 1.0).abs() < 1e-8);
    assert!((integral(&m.phi, &g) - 1.0).abs() < 1e-6);
    let phi0 = m.phi[g.n / 2];
    let quad = m.psi.iter().sum::<f64>() * g.dxi() / (2.0 * std::f64::consts::PI);
    assert!(phi0 > 0.0 && (phi0 - quad).abs() < 1e-10);
    // On a box of half-width 20 the grid value phi0 carries the periodic images of φ,
    // so the scaling law is checked against the continuum value (1/π)∫₀² ψ.
    let p = Plateau::new(1.5).unwrap();
    let k = 200_000;
    let exact = (0..k).map(|i| p.eval(2.0 * (i as f64 + 0.5) / k as f64)).sum::<f64>() * 2.0 / k as f64 / std::f64::consts::PI;
    for eps in [0.25, 4.0 * min_admissible_eps(&g)] {
        let s = sample_phi_eps(&m, eps, &g).unwrap();
        assert!((s[g.n / 2] - exact / eps).abs() <= 1e-6 * exact / eps, "eps={eps}");
        assert!((integral(&s, &g) - 1.0).abs() < 1e-6);
    }
    let one = sample_phi_eps(&m, 1.0, &g).unwrap();
    assert!(one.iter().zip(&m.phi).all(|(a, b)| (a - b).abs() < 1e-12));
    assert!(sample_phi_eps(&m, 0.5 * min_admissible_eps(&g), &g).is_err());
    let rep = verify_mollifier(&m).unwrap();
    assert!(rep.plateau_deviation <= 1e-6 && rep.evenness_defect <= 1e-10);
    assert!(rep.decay_c.is_some_and(|c| c > 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mollifiers_are_even_and_normalized(sigma in 1.2f64..3.0) {
        let g = GridSpec::one_d(20.0, 4096).unwrap();
        let m = build_mollifier(sigma, &g).unwrap();
        prop_assert!(m.psi.iter().all(|&p| (-1e-12..=1.0 + 1e-6).contains(&p)));
        for i in 1..g.n / 2 {
            prop_assert!((m.phi[g.n / 2 + i] - m.phi[g.n / 2 - i]).abs() <= 1e-10 * m.phi[g.n / 2]);
        }
        prop_assert!((integral(&m.phi, &g) - 1.0).abs() < 1e-6);
    }
}
