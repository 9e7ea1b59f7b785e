//! Weight-function mode: Fourier–Lebesgue norms, their equivalences, growth
//! classification at `e^{kω(1/ε)}` scales and the cross-check against
//! polynomial (Colombeau) scales for `ω = log(1 + t)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{self, fitted_rate, GrowthVerdict};
use crate::fourier::{self, GridSpec};
use crate::growth::{self, Mode, Weight, DEFAULT_NOISE_FLOOR};
use crate::nets::{self, NetFunction};
use crate::weights::{least_squares_slope, OmegaKind, WeightFunction};

/// The `λ`-grid sampled by [`classify_net_bb`].
pub const LAMBDA_GRID: [f64; 3] = [0.25, 1.0, 4.0];

/// Exponents `q` tested by [`colombeau_crosscheck`] for `sup <= C ε^q`.
pub const POLYNOMIAL_Q_GRID: [u32; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

/// Largest boundary-to-sup ratio accepted as edge-negligible.
pub const EDGE_TOLERANCE: f64 = 1e-6;

const GOLDEN_ITERATIONS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlVariant {
    One,
    Two,
    Infinity,
}

impl FlVariant {
    fn power(self) -> Option<f64> {
        match self {
            FlVariant::One => Some(1.0),
            FlVariant::Two => Some(2.0),
            FlVariant::Infinity => None,
        }
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.collect();
    let top = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + v.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

fn check_edges(f: &[Complex64], grid: &GridSpec) -> Result<f64> {
    if f.len() != grid.len() {
        return Err(Error::Mismatch("sample count does not match grid".into()));
    }
    let sup = fourier::sup_norm(f);
    let edge = grid.edge_indices().iter().map(|&i| f[i].norm()).fold(0.0, f64::max);
    if sup > 0.0 && edge > EDGE_TOLERANCE * sup {
        return Err(Error::InvalidParameter(format!(
            "samples are not edge-negligible (boundary ratio {:e}); window them first",
            edge / sup
        )));
    }
    Ok(sup)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be finite and non-negative, got {lambda}")));
    }
    Ok(())
}

/// `log|f̂|` at the dual nodes, `None` below the spectral floor relative to `magnitude`.
fn spectrum_logs(f: &[Complex64], grid: &GridSpec, magnitude: f64) -> Vec<Option<f64>> {
    let floor = DEFAULT_NOISE_FLOOR * magnitude * (2.0 * grid.half_width).powi(grid.dim as i32);
    fourier::forward(grid, f)
        .iter()
        .map(|v| {
            let r = v.norm();
            (r > floor && r > 0.0).then(|| r.ln())
        })
        .collect()
}

/// Direct trapezoid evaluation of `f̂(ξ)` off the dual lattice (1-D).
fn transform_at(f: &[Complex64], grid: &GridSpec, xi: f64) -> Complex64 {
    let dx = grid.dx();
    f.iter()
        .enumerate()
        .map(|(j, v)| v * Complex64::from_polar(dx, grid.x(j) * xi))
        .sum()
}

fn log_norm_from_spectrum(logs: &[Option<f64>], norms: &[f64], grid: &GridSpec, w: &WeightFunction, lambda: f64, variant: FlVariant) -> f64 {
    let weighted = logs.iter().zip(norms).filter_map(|(l, &r)| l.map(|l| l + lambda * w.eval(r)));
    match variant.power() {
        None => weighted.fold(f64::NEG_INFINITY, f64::max),
        Some(p) => {
            let cell = grid.dxi().powi(grid.dim as i32).ln();
            (log_sum_exp(weighted.map(|v| p * v)) + cell) / p
        }
    }
}

/// Golden-section refinement of the weighted sup around the best dual node (1-D only).
fn refine_sup(f: &[Complex64], grid: &GridSpec, w: &WeightFunction, lambda: f64, logs: &[Option<f64>], norms: &[f64], start: f64) -> f64 {
    let ax = grid.xi_axis();
    let best = (0..logs.len())
        .filter_map(|i| logs[i].map(|l| (i, l + lambda * w.eval(norms[i]))))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    let Some((i, _)) = best else {
        return start;
    };
    let objective = |xi: f64| transform_at(f, grid, xi).norm().ln() + lambda * w.eval(xi.abs());
    let center = ax[i];
    let (mut a, mut b) = (center - grid.dxi(), center + grid.dxi());
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..GOLDEN_ITERATIONS {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = objective(d);
        }
    }
    start.max(fc).max(fd)
}

/// `log ‖f‖_{FL^p_ω, λ}`, computed entirely in log-space.
///
/// Variants 1 and 2 are trapezoid sums of `|f̂|^p e^{pλω(|ξ|)}` on the dual lattice.
/// The sup variant is refined between lattice nodes in 1-D.
pub fn fl_log_norm(f: &[Complex64], grid: &GridSpec, w: &WeightFunction, lambda: f64, variant: FlVariant) -> Result<f64> {
    check_lambda(lambda)?;
    let sup = check_edges(f, grid)?;
    if sup == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let logs = spectrum_logs(f, grid, sup);
    let norms = grid.xi_norms();
    let coarse = log_norm_from_spectrum(&logs, &norms, grid, w, lambda, variant);
    if variant == FlVariant::Infinity && grid.dim == 1 && coarse.is_finite() {
        return Ok(refine_sup(f, grid, w, lambda, &logs, &norms, coarse));
    }
    Ok(coarse)
}

/// `‖f‖_{FL^p_ω, λ}`; infinite when the log-norm overflows `f64`.
pub fn fl_norm(f: &[Complex64], grid: &GridSpec, w: &WeightFunction, lambda: f64, variant: FlVariant) -> Result<f64> {
    Ok(fl_log_norm(f, grid, w, lambda, variant)?.exp())
}

/// Per-ε Fourier–Lebesgue norms of the frames of a net.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaNormLadder {
    pub lambda: f64,
    pub variant: FlVariant,
    pub weight: WeightFunction,
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    pub log_values: Vec<f64>,
}

/// Frames at the noise floor are exempt: their boundary ratio is roundoff.
fn check_windowed(a: &NetFunction) -> Result<()> {
    let edges = a.grid.edge_indices();
    let r = a
        .frames
        .iter()
        .enumerate()
        .filter_map(|(j, f)| {
            let sup = fourier::sup_norm(f);
            (sup > DEFAULT_NOISE_FLOOR * a.magnitude(j)).then(|| edges.iter().map(|&i| f[i].norm()).fold(0.0, f64::max) / sup)
        })
        .fold(0.0, f64::max);
    if r > EDGE_TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "frames are not windowed (boundary ratio {r:e}); multiply by a window first"
        )));
    }
    Ok(())
}

/// Log-norms per frame using the spectral floor of each frame's magnitude.
fn frame_log_norms(a: &NetFunction, w: &WeightFunction, lambda: f64, variant: FlVariant) -> Vec<f64> {
    let norms = a.grid.xi_norms();
    a.frames
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let logs = spectrum_logs(f, &a.grid, a.magnitude(j));
            let coarse = log_norm_from_spectrum(&logs, &norms, &a.grid, w, lambda, variant);
            if variant == FlVariant::Infinity && a.grid.dim == 1 && coarse.is_finite() {
                refine_sup(f, &a.grid, w, lambda, &logs, &norms, coarse)
            } else {
                coarse
            }
        })
        .collect()
}

pub fn omega_norm_ladder(a: &NetFunction, w: &WeightFunction, lambda: f64, variant: FlVariant) -> Result<OmegaNormLadder> {
    check_lambda(lambda)?;
    check_windowed(a)?;
    let log_values = frame_log_norms(a, w, lambda, variant);
    Ok(OmegaNormLadder {
        lambda,
        variant,
        weight: w.clone(),
        eps: a.ladder.values(),
        values: log_values.iter().map(|v| v.exp()).collect(),
        log_values,
    })
}

/// Both sides of `C₁‖f‖_{FL^∞,λ} <= ‖f‖_{FL¹,λ} <= C₂‖f‖_{FL^∞,λ+Λ}` and the `L²` chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEquivalenceReport {
    pub lambda: f64,
    /// `Λ = (d + 1) / b`.
    pub shift: f64,
    pub sup_norm: f64,
    pub l1_norm: f64,
    pub sup_norm_shifted: f64,
    pub l2_norm: f64,
    /// `‖f‖₁ / ‖f‖_∞` at `λ`.
    pub c1: f64,
    /// `‖f‖₁ / ‖f‖_∞` at `λ + Λ`.
    pub c2: f64,
    /// `∫ e^{-Λω(|ξ|)} dξ` on the dual lattice, the a-priori bound for `c2`.
    pub c2_bound: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// `‖f‖₂² <= ‖f‖_∞ ‖f‖₁` at `λ`.
    pub l2_holds: bool,
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 && den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn norm_equivalence_check(f: &[Complex64], grid: &GridSpec, w: &WeightFunction, lambda: f64) -> Result<NormEquivalenceReport> {
    let shift = w.lambda_shift(grid.dim);
    let sup = fl_log_norm(f, grid, w, lambda, FlVariant::Infinity)?;
    let l1 = fl_log_norm(f, grid, w, lambda, FlVariant::One)?;
    let sup_shifted = fl_log_norm(f, grid, w, lambda + shift, FlVariant::Infinity)?;
    let l2 = fl_log_norm(f, grid, w, lambda, FlVariant::Two)?;
    let cell = grid.dxi().powi(grid.dim as i32);
    let c2_bound = grid.xi_norms().iter().map(|&r| (-shift * w.eval(r)).exp()).sum::<f64>() * cell;
    let tol = 1e-10;
    Ok(NormEquivalenceReport {
        lambda,
        shift,
        sup_norm: sup.exp(),
        l1_norm: l1.exp(),
        sup_norm_shifted: sup_shifted.exp(),
        l2_norm: l2.exp(),
        c1: ratio(l1.exp(), sup.exp()),
        c2: ratio(l1.exp(), sup_shifted.exp()),
        c2_bound,
        lower_holds: sup == f64::NEG_INFINITY || (l1 - sup).is_finite(),
        upper_holds: l1 <= c2_bound.ln() + sup_shifted + tol,
        l2_holds: 2.0 * l2 <= sup + l1 + tol,
    })
}

fn rates(a: &NetFunction, logs: &[f64], w: &Weight) -> Result<Vec<f64>> {
    logs.iter().zip(a.ladder.values()).map(|(&y, e)| w.rate(y, e)).collect()
}

/// Moderate / negligible classification at `e^{kω(1/ε)}` scales.
///
/// Moderation reads `κ = log ‖f_ε‖_{FL¹,λ} / ω(1/ε)` over [`LAMBDA_GRID`];
/// negligibility reads `ν = -log sup|f_ε| / ω(1/ε)`.
pub fn classify_net_bb(a: &NetFunction, w: &WeightFunction, mode: Mode) -> Result<GrowthVerdict> {
    if a.ladder.count < 6 {
        return Err(Error::InvalidParameter("ladder needs at least 6 entries".into()));
    }
    check_windowed(a)?;
    let weight = Weight::Function(w.clone());
    let fitted = LAMBDA_GRID
        .iter()
        .map(|&lambda| {
            let logs = frame_log_norms(a, w, lambda, FlVariant::One);
            Ok(fitted_rate(lambda, rates(a, &logs, &weight)?, mode))
        })
        .collect::<Result<Vec<_>>>()?;
    let mask = vec![true; a.grid.len()];
    let log_sup = estimators::log_sups(a, &mask);
    let numbers = nets::classify_log_sizes(&a.ladder, &log_sup, &weight, mode)?;
    let tagged = a.clone().with_weight(weight);
    Ok(estimators::assemble(&tagged, mode, fitted, log_sup, numbers.nu.clone(), numbers.negligible))
}

/// Negligibility read off the `λ`-graded norms instead of the 0-th order sup.
pub fn negligible_lambda_graded(a: &NetFunction, w: &WeightFunction, mode: Mode) -> Result<bool> {
    check_windowed(a)?;
    let weight = Weight::Function(w.clone());
    let per_lambda = LAMBDA_GRID
        .iter()
        .map(|&lambda| {
            let logs = frame_log_norms(a, w, lambda, FlVariant::One);
            let nu = logs.iter().map(|y| -y).collect::<Vec<_>>();
            let nu = rates(a, &nu, &weight)?;
            Ok(match mode {
                Mode::Beurling => growth::diverges(&nu),
                Mode::Roumieu => growth::bounded_away_from_zero(&nu),
            })
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(match mode {
        Mode::Beurling => per_lambda.iter().all(|&b| b),
        Mode::Roumieu => per_lambda.iter().any(|&b| b),
    })
}

/// Verdicts of a net in `ω = log(1 + t)` mode next to their polynomial-scale counterparts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub bb: GrowthVerdict,
    /// Least-squares slope of `log sup|f_ε|` against `log(1/ε)`; absent when fewer than
    /// two frames sit above the noise floor.
    pub polynomial_order: Option<f64>,
    /// `log⁺ sup|f_ε| / log(1/ε)` per frame.
    pub polynomial_kappa: Vec<f64>,
    pub polynomial_moderate: bool,
    pub q_grid: Vec<u32>,
    /// Whether `sup|f_ε| <= C ε^q` is certified, per `q`.
    pub q_holds: Vec<bool>,
    pub polynomial_negligible: bool,
    pub agree: bool,
    pub disagreements: Vec<String>,
}

/// Re-express the `ω = log(1 + t)`, Beurling verdicts of `a` in polynomial scales.
pub fn colombeau_crosscheck(a: &NetFunction) -> Result<CrosscheckReport> {
    let w = WeightFunction::log_one_plus_t();
    let bb = classify_net_bb(a, &w, Mode::Beurling)?;
    let eps = a.ladder.values();
    let log_inv: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    let finite: Vec<(f64, f64)> =
        bb.log_sup.iter().zip(&log_inv).filter(|(y, _)| y.is_finite()).map(|(&y, &x)| (x, y)).collect();
    let polynomial_order = (finite.len() >= 2).then(|| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = finite.into_iter().unzip();
        least_squares_slope(&xs, &ys)
    });
    let polynomial_kappa: Vec<f64> = bb.log_sup.iter().zip(&log_inv).map(|(&y, &x)| y.max(0.0) / x).collect();
    let polynomial_moderate = growth::stays_bounded(&polynomial_kappa);
    let q_holds: Vec<bool> = POLYNOMIAL_Q_GRID
        .iter()
        .map(|&q| {
            let resid: Vec<f64> = bb.log_sup.iter().zip(&log_inv).map(|(&y, &x)| y + q as f64 * x).collect();
            growth::residual_bounded(&resid)
        })
        .collect();
    let polynomial_negligible = polynomial_moderate && q_holds.iter().all(|&b| b);
    let mut disagreements = Vec::new();
    if bb.moderate != polynomial_moderate {
        disagreements.push(format!("moderate: bb={} polynomial={polynomial_moderate}", bb.moderate));
    }
    if bb.negligible != polynomial_negligible {
        disagreements.push(format!("negligible: bb={} polynomial={polynomial_negligible}", bb.negligible));
    }
    Ok(CrosscheckReport {
        bb,
        polynomial_order,
        polynomial_kappa,
        polynomial_moderate,
        q_grid: POLYNOMIAL_Q_GRID.to_vec(),
        q_holds,
        polynomial_negligible,
        agree: disagreements.is_empty(),
        disagreements,
    })
}

/// `ω = t^{1/2}` and `ω = log(1 + t)`.
pub fn default_omega_catalog() -> Vec<WeightFunction> {
    vec![
        WeightFunction::log_one_plus_t(),
        WeightFunction::new(OmegaKind::Power { a: 0.5 }).expect("valid weight"),
    ]
}

