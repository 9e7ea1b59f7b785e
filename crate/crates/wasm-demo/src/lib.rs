//! Three operations for the static demo page. Each returns a JSON string.

use gevrey_nets::distributions::{regularize, ModelDistribution};
use gevrey_nets::fourier::GridSpec;
use gevrey_nets::growth::Mode;
use gevrey_nets::microlocal::{wavefront, ConePartition, WfVerdict};
use gevrey_nets::mollifier::{build_mollifier, verify_mollifier};
use gevrey_nets::nets::EpsilonLadder;
use gevrey_nets::weights::{log_grid, WeightSequence};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest grid the page may request.
pub const MAX_POINTS: usize = 1 << 15;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `M(t)` of the Gevrey sequence `(p!)^s` on `points` log-spaced `t` in `[t_min, t_max]`.
/// Values past the saturation point of the truncated sequence are `null`.
pub fn assoc_curve_json(s: f64, t_min: f64, t_max: f64, points: usize) -> Result<String, String> {
    if !(0.0 < t_min && t_min < t_max) || !(2..=2000).contains(&points) {
        return Err("need 0 < t_min < t_max and 2 <= points <= 2000".into());
    }
    let seq = WeightSequence::gevrey(s, 1024).map_err(err)?;
    let t = log_grid(t_min, t_max, points);
    let m: Vec<Option<f64>> = t.iter().map(|&t| seq.assoc(t).ok()).collect();
    Ok(json!({ "s": s, "t": t, "m": m, "t_saturation": seq.t_saturation() }).to_string())
}

/// Spatial profile `φ` and spectral profile `ψ` of the Gevrey mollifier of order `sigma`,
/// with the contract report.
pub fn mollifier_json(sigma: f64, n: usize) -> Result<String, String> {
    if !n.is_power_of_two() || n > MAX_POINTS {
        return Err(format!("n must be a power of two up to {MAX_POINTS}"));
    }
    let grid = GridSpec::one_d(20.0, n).map_err(err)?;
    let m = build_mollifier(sigma, &grid).map_err(err)?;
    let report = verify_mollifier(&m).map_err(err)?;
    let stride = (n / 1024).max(1);
    let (x, phi): (Vec<f64>, Vec<f64>) =
        (0..n).step_by(stride).filter(|&i| grid.x(i).abs() <= 4.0).map(|i| (grid.x(i), m.phi[i])).unzip();
    let xi = grid.xi_axis();
    let mut spec: Vec<(f64, f64)> = xi.iter().zip(&m.psi).filter(|(k, _)| k.abs() <= 3.0).map(|(&k, &p)| (k, p)).collect();
    spec.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (xi, psi): (Vec<f64>, Vec<f64>) = spec.into_iter().unzip();
    Ok(json!({ "x": x, "phi": phi, "xi": xi, "psi": psi, "report": report }).to_string())
}

/// Windowed wave front verdicts of a catalog distribution at the given centers.
pub fn wavefront_json(dist: &str, roumieu: bool, centers: &[f64], radius: f64) -> Result<String, String> {
    let model = ModelDistribution::from_name(dist).map_err(err)?;
    let grid = GridSpec::one_d(20.0, MAX_POINTS).map_err(err)?;
    let moll = build_mollifier(1.5, &grid).map_err(err)?;
    let ladder = EpsilonLadder::dyadic(3, 10).map_err(err)?;
    let net = regularize(&model, &moll, &ladder, &grid).map_err(err)?;
    let centers: Vec<Vec<f64>> = centers.iter().map(|&c| vec![c]).collect();
    let mode = if roumieu { Mode::Roumieu } else { Mode::Beurling };
    let rep = wavefront(&net, &centers, radius, &ConePartition::default_for(1), mode).map_err(err)?;
    let rows: Vec<_> = rep
        .windows
        .iter()
        .map(|w| {
            let verdicts: Vec<&str> = w
                .cones
                .iter()
                .map(|c| match c.verdict {
                    WfVerdict::Regular => "regular",
                    WfVerdict::Singular => "singular",
                    WfVerdict::Inconclusive => "inconclusive",
                })
                .collect();
            json!({ "center": w.center[0], "verdicts": verdicts })
        })
        .collect();
    Ok(json!({ "dist": dist, "radius": radius, "windows": rows }).to_string())
}

#[wasm_bindgen]
pub fn assoc_curve(s: f64, t_min: f64, t_max: f64, points: usize) -> Result<String, JsError> {
    assoc_curve_json(s, t_min, t_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn mollifier(sigma: f64, n: usize) -> Result<String, JsError> {
    mollifier_json(sigma, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn wave_front(dist: &str, roumieu: bool, centers: Vec<f64>, radius: f64) -> Result<String, JsError> {
    wavefront_json(dist, roumieu, &centers, radius).map_err(|e| JsError::new(&e))
}
