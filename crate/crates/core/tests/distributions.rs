use std::f64::consts::PI;

use gevrey_nets::distributions::{regularize, spectral_data, ModelDistribution, Term};
use gevrey_nets::fourier::GridSpec;
use gevrey_nets::mollifier::{build_mollifier, MollifierNet, Window};
use gevrey_nets::nets::EpsilonLadder;
use gevrey_nets::{Complex64, Error};

fn rig() -> (GridSpec, MollifierNet, EpsilonLadder) {
    let g = GridSpec::one_d(20.0, 4096).unwrap();
    let m = build_mollifier(1.5, &g).unwrap();
    (g, m, EpsilonLadder::dyadic(1, 6).unwrap())
}

fn index_of(g: &GridSpec, x: f64) -> usize {
    ((x + g.half_width) / g.dx()).round() as usize
}

#[test]
fn delta_regularization_is_the_scaled_mollifier() {
    let (g, m, l) = rig();
    // A wide grid so that the reference profile is free of periodization.
    let wide = build_mollifier(1.5, &GridSpec::one_d(640.0, 4096).unwrap()).unwrap();
    let net = regularize(&ModelDistribution::Delta, &m, &l, &g).unwrap();
    for j in [3, 4, 5] {
        let eps = l.eps(j);
        for x in [0.0, 0.05, -0.3] {
            let i = index_of(&g, x);
            let expect = wide.phi_at(&[g.x(i) / eps]) / eps;
            assert!((net.frames[j][i].re - expect).abs() < 1e-8 * (1.0 + expect.abs()), "j={j} x={x}");
        }
    }
}

#[test]
fn gaussian_transform_matches_quadrature() {
    let data = spectral_data(&ModelDistribution::GaussianTimesSine { freq: 3.0, rate: 0.7 });
    for xi in [-4.0, -0.5, 0.0, 1.3, 5.0] {
        let h = 1e-3;
        let quad: Complex64 = (-12000..=12000)
            .map(|k| {
                let x = k as f64 * h;
                Complex64::from_polar((-0.7 * x * x).exp() * (3.0 * x).sin() * h, x * xi)
            })
            .sum();
        assert!((data.eval(&[xi]).unwrap() - quad).norm() < 1e-10, "xi={xi}");
    }
}

#[test]
fn pv_regularization_matches_periodic_kernel_away_from_origin() {
    let (g, m, l) = rig();
    let net = regularize(&ModelDistribution::PvInverse, &m, &l, &g).unwrap();
    let last = l.count - 1;
    for x in [-2.5, 4.0, 7.0] {
        let i = index_of(&g, x);
        let xi = g.x(i);
        let periodic = PI / (2.0 * g.half_width) / (PI * xi / (2.0 * g.half_width)).tan();
        assert!((net.frames[last][i].re - periodic).abs() < 1e-6, "x={x}");
    }
}

#[test]
fn heaviside_regularization_has_the_right_limits() {
    let (g, m, l) = rig();
    let net = regularize(&ModelDistribution::Heaviside, &m, &l, &g).unwrap();
    for (j, f) in net.frames.iter().enumerate().skip(4) {
        assert!((f[index_of(&g, 5.0)].re - 1.0).abs() < 1e-9, "frame {j}");
        assert!(f[index_of(&g, -5.0)].re.abs() < 1e-9, "frame {j}");
        assert!((f[index_of(&g, 0.0)].re - 0.5).abs() < 1e-9, "frame {j}");
        assert!((f[index_of(&g, 18.0)].re - 1.0).abs() < 1e-9, "frame {j}");
    }
}

#[test]
fn heaviside_derivative_is_the_delta_net() {
    let (g, m, l) = rig();
    let h = regularize(&ModelDistribution::Heaviside, &m, &l, &g).unwrap();
    let d = regularize(&ModelDistribution::Delta, &m, &l, &g).unwrap();
    let j = 2;
    for x in [-0.2, 0.0, 0.1] {
        let i = index_of(&g, x);
        let fd = (h.frames[j][i + 1].re - h.frames[j][i - 1].re) / (2.0 * g.dx());
        assert!((fd - d.frames[j][i].re).abs() < 1e-2 * d.frames[j][index_of(&g, 0.0)].re, "x={x}");
    }
}

#[test]
fn tensor_with_heaviside_factor() {
    let g = GridSpec::two_d(8.0, 256).unwrap();
    let m = build_mollifier(1.5, &g).unwrap();
    let l = EpsilonLadder::new(0.25, 0.7, 6).unwrap();
    let model = ModelDistribution::from_name("tensor2d").unwrap();
    let net = regularize(&model, &m, &l, &g).unwrap();
    let idx = |x: f64, y: f64| index_of(&g, x) * g.n + index_of(&g, y);
    for f in net.frames.iter().skip(3) {
        let at = |x, y| f[idx(x, y)].re;
        assert!((at(4.0, 0.0) - 1.0).abs() < 1e-4);
        assert!(at(-4.0, 0.0).abs() < 1e-4);
        assert!((at(4.0, 1.0) - (-1.0f64).exp()).abs() < 1e-4);
        for (x, y) in [(4.0, 0.0), (1.5, -2.0), (0.25, 3.0)] {
            assert!((at(x, y) + at(-x, y) - 2.0 * at(0.0, y)).abs() < 1e-12);
        }
    }
}

#[test]
fn combinations_and_polynomials_regularize() {
    let (g, m, l) = rig();
    let poly = ModelDistribution::Polynomial { coeffs: vec![1.0, 0.0, -0.5], window: Window::at(0.0, 4.0).unwrap() };
    let net = regularize(&poly, &m, &l, &g).unwrap();
    let i = index_of(&g, 0.5);
    assert!((net.frames[5][i].re - (1.0 - 0.125)).abs() < 1e-3);
    let combo = ModelDistribution::Combination {
        terms: vec![
            Term { re: 2.0, im: 0.0, dist: ModelDistribution::Heaviside },
            Term { re: -1.0, im: 0.0, dist: ModelDistribution::gaussian() },
        ],
    };
    let net = regularize(&combo, &m, &l, &g).unwrap();
    assert!((net.frames[5][index_of(&g, 8.0)].re - 2.0).abs() < 1e-9);
}

#[test]
fn dimension_mismatch_is_rejected() {
    let (g, m, l) = rig();
    let model = ModelDistribution::from_name("tensor2d").unwrap();
    assert!(matches!(regularize(&model, &m, &l, &g), Err(Error::Mismatch(_))));
}
