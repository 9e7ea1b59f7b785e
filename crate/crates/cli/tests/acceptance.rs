//! The twelve acceptance criteria, one test each. Every test prints a single
//! `[PASS]` or `[FAIL]` line; run with `--nocapture` to see them.

use std::process::Command as Process;
use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use gevrey_nets::bb::{classify_net_bb, colombeau_crosscheck, default_omega_catalog};
use gevrey_nets::distributions::{regularize, ModelDistribution};
use gevrey_nets::estimators::{classify_net, landau_kolmogorov_check, regularity_test, Region, Regularity};
use gevrey_nets::fourier::GridSpec;
use gevrey_nets::growth::{Mode, Weight};
use gevrey_nets::microlocal::{wavefront, wf_compare, ConePartition};
use gevrey_nets::mollifier::{build_mollifier, verify_mollifier, window_plateau, MollifierNet, Window};
use gevrey_nets::nets::{constant_embed, spectral_derivative, EpsilonLadder, NetFunction};
use gevrey_nets::weights::{check_assoc_m2, check_conditions, log_grid, WeightSequence};
use gevrey_nets::Error;

static SERIAL: Mutex<()> = Mutex::new(());

struct Rig {
    grid: GridSpec,
    moll: MollifierNet,
    ladder: EpsilonLadder,
}

/// n = 32768, L = 20, ε = 2^-3 .. 2^-10, σ = 1.5.
fn rig() -> &'static Rig {
    static RIG: OnceLock<Rig> = OnceLock::new();
    RIG.get_or_init(|| {
        let grid = GridSpec::one_d(20.0, 32768).unwrap();
        Rig { moll: build_mollifier(1.5, &grid).unwrap(), ladder: EpsilonLadder::dyadic(3, 10).unwrap(), grid }
    })
}

fn weight() -> Weight {
    Weight::Sequence(WeightSequence::gevrey(2.0, 256).unwrap())
}

fn embed(m: &ModelDistribution) -> NetFunction {
    let r = rig();
    regularize(m, &r.moll, &r.ladder, &r.grid).unwrap()
}

fn window(radius: f64) -> Vec<f64> {
    Window::at(0.0, radius).unwrap().samples(window_plateau(), &rig().grid).unwrap()
}

fn windowed(m: &ModelDistribution) -> NetFunction {
    embed(m).multiply_by(&window(16.0)).unwrap()
}

/// Run one criterion, print its line, and fail the test on any failed check or a blown budget.
fn criterion(n: u32, name: &str, budget: Duration, body: impl FnOnce() -> Result<(), String>) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    rig();
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let outcome = outcome.and_then(|()| {
        if elapsed <= budget {
            Ok(())
        } else {
            Err(format!("took {elapsed:.2?}, budget {budget:?}"))
        }
    });
    match &outcome {
        Ok(()) => println!("[PASS] {n:>2}. {name} ({elapsed:.2?})"),
        Err(why) => println!("[FAIL] {n:>2}. {name} ({elapsed:.2?}): {why}"),
    }
    if let Err(why) = outcome {
        panic!("criterion {n} failed: {why}");
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

#[test]
fn c01_associated_function_oracle() {
    criterion(1, "associated-function oracle", secs(1), || {
        let s = WeightSequence::gevrey(2.0, 200).unwrap();
        for t in log_grid(1e-2, 1e6, 100) {
            let brute = (0..=200).map(|p| p as f64 * t.ln() - s.log_m()[p]).fold(0.0, f64::max);
            let truncated = s.assoc_truncated(t).map_err(|e| e.to_string())?;
            ensure((truncated - brute).abs() <= 1e-12 * brute.max(1.0), || format!("t={t}: {truncated} vs {brute}"))?;
            match s.assoc(t) {
                Ok(v) => ensure((v - brute).abs() <= 1e-12 * brute.max(1.0), || format!("t={t}: {v} vs {brute}"))?,
                Err(Error::Saturation { t_max, .. }) => ensure(t >= t_max, || format!("t={t} saturated early"))?,
                Err(e) => return Err(e.to_string()),
            }
        }
        let g1 = WeightSequence::gevrey(1.0, 200).unwrap().assoc(10.0).map_err(|e| e.to_string())?;
        ensure((g1 - 7.9215).abs() <= 1e-3, || format!("gevrey(1) at 10: {g1}"))
    });
}

#[test]
fn c02_condition_certification() {
    criterion(2, "condition certification", secs(1), || {
        let rep = check_conditions(&WeightSequence::gevrey(2.0, 128).unwrap());
        ensure(rep.m1_ok, || "M.1 failed".into())?;
        ensure(rep.m2_ok && rep.m2_constants == Some((1.0, 4.0)), || format!("M.2: {:?}", rep.m2_constants))?;
        let wide = WeightSequence::gevrey(2.0, 4096).unwrap();
        let ok = check_assoc_m2(&wide, 1.0, 4.0, &log_grid(1e-2, 1e6, 400)).map_err(|e| e.to_string())?;
        ensure(ok, || "2M(t) <= M(4t) failed".into())
    });
}

#[test]
fn c03_mollifier_contract() {
    criterion(3, "mollifier contract", secs(5), || {
        let rep = verify_mollifier(&rig().moll).map_err(|e| e.to_string())?;
        ensure(rep.plateau_deviation <= 1e-6, || format!("plateau {}", rep.plateau_deviation))?;
        ensure(rep.support_leakage <= 1e-6, || format!("leakage {}", rep.support_leakage))?;
        ensure(rep.mass_defect <= 1e-6, || format!("mass {}", rep.mass_defect))?;
        ensure(rep.evenness_defect <= 1e-10, || format!("evenness {}", rep.evenness_defect))?;
        ensure(rep.decay_c.is_some_and(|c| c > 0.0), || format!("decay {:?}", rep.decay_c))
    });
}

#[test]
fn c04_embedding_consistency() {
    criterion(4, "embedding consistency", secs(10), || {
        let r = rig();
        let g = ModelDistribution::gaussian();
        let sigma = constant_embed(&g.sample(&r.grid).unwrap(), &r.grid, &r.ladder, Mode::Beurling, weight()).unwrap();
        let diff = embed(&g).sub(&sigma).unwrap();
        for mode in [Mode::Beurling, Mode::Roumieu] {
            let v = classify_net(&diff, &Region::centered(1, 5.0).unwrap(), mode).map_err(|e| e.to_string())?;
            ensure(v.negligible, || format!("{mode:?}: not negligible, nu {:?}", v.nu))?;
            if mode == Mode::Roumieu {
                ensure(v.nu.iter().all(|&n| n >= 0.05), || format!("nu {:?}", v.nu))?;
            }
        }
        Ok(())
    });
}

#[test]
fn c05_product_preservation() {
    criterion(5, "product preservation", secs(30), || {
        let f = embed(&ModelDistribution::gaussian());
        let g = embed(&ModelDistribution::gaussian_times_sine(3.0));
        let fg = embed(&ModelDistribution::GaussianTimesSine { freq: 3.0, rate: 2.0 });
        let defect = f.mul(&g).unwrap().sub(&fg).unwrap();
        let k = Region::centered(1, 5.0).unwrap();
        for mode in [Mode::Beurling, Mode::Roumieu] {
            let v = classify_net(&defect, &k, mode).map_err(|e| e.to_string())?;
            ensure(v.negligible, || format!("sequence {mode:?}: nu {:?}", v.nu))?;
            for w in default_omega_catalog() {
                let v = classify_net_bb(&defect, &w, mode).map_err(|e| e.to_string())?;
                ensure(v.negligible, || format!("bb {:?} {mode:?}: nu {:?}", w.kind, v.nu))?;
            }
        }
        Ok(())
    });
}

#[test]
fn c06_impossibility_demo() {
    criterion(6, "impossibility demo", secs(10), || {
        let r = rig();
        let h = embed(&ModelDistribution::Heaviside);
        let defect = h.mul(&h).unwrap().sub(&h).unwrap();
        let o = r.grid.n / 2;
        for (j, f) in defect.frames.iter().enumerate() {
            ensure((f[o].re + 0.25).abs() <= 1e-3, || format!("eps {}: {}", r.ladder.eps(j), f[o].re))?;
        }
        let v = classify_net(&defect, &Region::centered(1, 5.0).unwrap(), Mode::Beurling).map_err(|e| e.to_string())?;
        ensure(!v.negligible, || "classified negligible".into())
    });
}

#[test]
fn c07_support_preservation() {
    criterion(7, "support preservation", secs(10), || {
        let r = rig();
        let delta = embed(&ModelDistribution::Delta);
        let outside = Region::outside(&r.grid, 1.0).unwrap();
        let v = classify_net(&delta, &outside, Mode::Roumieu).map_err(|e| e.to_string())?;
        ensure(v.negligible, || format!("delta off its support: nu {:?}", v.nu))?;
        let dh = spectral_derivative(&windowed(&ModelDistribution::Heaviside), &[1]).unwrap();
        let mut err: f64 = 0.0;
        for (a, b) in dh.frames.iter().zip(&delta.frames) {
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                if r.grid.x(i).abs() <= 5.0 {
                    err = err.max((x - y).norm());
                }
            }
        }
        ensure(err <= 1e-5, || format!("sup |d/dx iota(H) - iota(delta)| = {err:e}"))
    });
}

#[test]
fn c08_regularity_on_the_catalog() {
    criterion(8, "regularity on the catalog", secs(30), || {
        let cases = [
            (ModelDistribution::gaussian(), Regularity::Regular),
            (ModelDistribution::Delta, Regularity::NotRegular),
            (ModelDistribution::Heaviside, Regularity::NotRegular),
            (ModelDistribution::PvInverse, Regularity::NotRegular),
            (ModelDistribution::DeltaPrime, Regularity::NotRegular),
        ];
        let mut agree = 0;
        let mut misses = Vec::new();
        for (m, expect) in &cases {
            let c = regularity_test(&windowed(m), Mode::Beurling).map_err(|e| e.to_string())?;
            if c.verdict == *expect {
                agree += 1;
            } else {
                misses.push(m.name());
            }
        }
        ensure(agree == cases.len(), || format!("{agree}/5, missed {misses:?}"))
    });
}

#[test]
fn c09_wave_front_equality() {
    criterion(9, "wave-front equality", secs(60), || {
        let centers = vec![vec![-2.0], vec![0.0], vec![2.0]];
        let partition = ConePartition::default_for(1);
        let mut misses = Vec::new();
        for name in ["delta", "delta_prime", "heaviside", "pv_inverse", "gaussian"] {
            let m = ModelDistribution::from_name(name).unwrap();
            let rep = wavefront(&embed(&m), &centers, 0.5, &partition, Mode::Beurling).map_err(|e| e.to_string())?;
            if !wf_compare(&m, &rep).map_err(|e| e.to_string())? {
                misses.push(name);
            }
        }
        ensure(misses.is_empty(), || format!("{}/5, missed {misses:?}", 5 - misses.len()))
    });
}

#[test]
fn c10_landau_kolmogorov() {
    criterion(10, "Landau-Kolmogorov inequality", secs(5), || {
        let grid = GridSpec::one_d(20.0, 4096).unwrap();
        let g = ModelDistribution::gaussian().sample(&grid).unwrap();
        let rep = landau_kolmogorov_check(&g, &grid, 1, 2).map_err(|e| e.to_string())?;
        ensure((rep.sup_f - 1.0).abs() < 1e-9, || format!("|f| = {}", rep.sup_f))?;
        ensure((rep.sup_k - (2.0 / std::f64::consts::E).sqrt()).abs() < 1e-4, || format!("|f'| = {}", rep.sup_k))?;
        ensure((rep.sup_n - 2.0).abs() < 1e-9, || format!("|f''| = {}", rep.sup_n))?;
        ensure(rep.holds && rep.ratio < 1.0, || format!("ratio {}", rep.ratio))?;
        let s = ModelDistribution::gaussian_times_sine(5.0).sample(&grid).unwrap();
        let rep = landau_kolmogorov_check(&s, &grid, 2, 4).map_err(|e| e.to_string())?;
        ensure(rep.holds, || format!("k=2, n=4 ratio {}", rep.ratio))
    });
}

#[test]
fn c11_colombeau_crosscheck() {
    criterion(11, "Colombeau cross-check", secs(30), || {
        let catalog = ["delta", "delta_prime", "heaviside", "pv_inverse", "gaussian", "gaussian_times_sine", "zero"];
        for name in catalog {
            let rep = colombeau_crosscheck(&windowed(&ModelDistribution::from_name(name).unwrap()))
                .map_err(|e| e.to_string())?;
            ensure(rep.agree, || format!("{name}: {:?}", rep.disagreements))?;
            if name == "delta" {
                let order = rep.polynomial_order.unwrap_or(f64::NAN);
                ensure((order - 1.0).abs() <= 0.2, || format!("delta order {order}"))?;
            }
        }
        Ok(())
    });
}

#[test]
fn c12_determinism() {
    criterion(12, "determinism", secs(60), || {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let runs: &[&[&str]] =
            &[&["classify", "--dist", "heaviside"], &["wavefront"], &["bb-classify", "--weight", "omega:log1p"]];
        for args in runs {
            let mut reports = Vec::new();
            for copy in ["a", "b"] {
                let dir = tmp.path().join(format!("{}-{copy}", args[0]));
                let status = Process::new(env!("CARGO_BIN_EXE_gevrey-nets"))
                    .args(*args)
                    .arg("--out")
                    .arg(&dir)
                    .status()
                    .map_err(|e| e.to_string())?;
                ensure(status.success(), || format!("{args:?} exited with {status}"))?;
                reports.push(std::fs::read(dir.join("report.json")).map_err(|e| e.to_string())?);
            }
            ensure(reports[0] == reports[1], || format!("{args:?}: reports differ"))?;
        }
        Ok(())
    });
}
