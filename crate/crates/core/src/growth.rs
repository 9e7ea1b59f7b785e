//! Finite-ladder certification of growth statements.
//!
//! Trajectories are split into a first and a last half. Infinite entries stand
//! for frames whose size sits at the numerical floor.

use serde::{Deserialize, Serialize};

use crate::weights::{WeightFunction, WeightSequence};

/// Geometric parameter grid `2^i`, `i = -4..=4`.
pub fn parameter_grid() -> Vec<f64> {
    (-4..=4).map(|i| (i as f64).exp2()).collect()
}

/// Relative size below which values are treated as numerical noise.
pub const DEFAULT_NOISE_FLOOR: f64 = 1e-11;

/// Slack, in natural-log units, for "bounded by the value at the largest ε".
pub const LOG_SLACK: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Beurling,
    Roumieu,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "beurling" => Ok(Self::Beurling),
            "roumieu" => Ok(Self::Roumieu),
            other => Err(format!("unknown mode '{other}' (expected beurling|roumieu)")),
        }
    }
}

/// The scale in which rates are measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    Sequence(WeightSequence),
    Function(WeightFunction),
}

impl Weight {
    /// The rate statistic of a log-size `y` at `ε`:
    /// `ε·M⁻¹(y⁺)` for sequences, `y⁺/ω(1/ε)` for weight functions.
    pub fn rate(&self, y: f64, eps: f64) -> crate::Result<f64> {
        let y = if y.is_nan() { 0.0 } else { y.max(0.0) };
        if y.is_infinite() {
            return Ok(f64::INFINITY);
        }
        match self {
            Weight::Sequence(m) => Ok(eps * m.assoc_inverse(y)?),
            Weight::Function(w) => Ok(y / w.eval(1.0 / eps)),
        }
    }
}

fn halves(v: &[f64]) -> (&[f64], &[f64]) {
    v.split_at(v.len() / 2)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Rates stay bounded: the last half never exceeds twice the first half.
pub fn stays_bounded(kappa: &[f64]) -> bool {
    let (a, b) = halves(kappa);
    max_of(b) <= 2.0 * max_of(a) + 1e-9
}

/// Rates tend to zero: final value at most half the initial one and below 0.5.
pub fn tends_to_zero(kappa: &[f64]) -> bool {
    let (first, last) = (kappa[0], kappa[kappa.len() - 1]);
    last <= 0.5 * first + 1e-12 && last < 0.5
}

/// Rates stay away from zero: the last-half minimum keeps half the first-half minimum.
pub fn bounded_away_from_zero(nu: &[f64]) -> bool {
    let (a, b) = halves(nu);
    min_of(a) > 0.0 && min_of(b) >= 0.5 * min_of(a)
}

/// Rates diverge: the last-half minimum at least doubles the first-half maximum.
pub fn diverges(nu: &[f64]) -> bool {
    let (a, b) = halves(nu);
    let top = max_of(a);
    let bottom = min_of(b);
    if top.is_infinite() {
        return bottom.is_infinite();
    }
    bottom > 0.0 && bottom >= 2.0 * top
}

/// A log-size trajectory that both rises and falls by more than `tol` is erratic.
pub fn is_erratic(log_sizes: &[f64], tol: f64) -> bool {
    let finite: Vec<f64> = log_sizes.iter().cloned().filter(|v| v.is_finite()).collect();
    let mut up = false;
    let mut down = false;
    for w in finite.windows(2) {
        up |= w[1] - w[0] > tol;
        down |= w[0] - w[1] > tol;
    }
    up && down
}

/// Residual `r_j` is bounded above by `r_0 + LOG_SLACK` (first finite entry as baseline).
pub fn residual_bounded(resid: &[f64]) -> bool {
    let Some(base) = resid.iter().cloned().find(|v| v.is_finite()) else {
        return true;
    };
    resid.iter().all(|&r| r <= base + LOG_SLACK)
}
