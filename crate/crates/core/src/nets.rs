//! ε-indexed families of grid functions and the operations of the algebra.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{self, GridSpec};
use crate::growth::{self, Mode, Weight};
use crate::io;
use crate::mollifier::min_admissible_eps;
use crate::weights::WeightSequence;

/// `ε_j = eps_0 · ratio^j`, `j = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonLadder {
    pub eps_0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl EpsilonLadder {
    pub fn new(eps_0: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(eps_0 > 0.0 && eps_0 <= 1.0) {
            return Err(Error::InvalidParameter(format!("eps_0 must lie in (0, 1], got {eps_0}")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidParameter(format!("ladder ratio must lie in (0, 1), got {ratio}")));
        }
        if count < 6 {
            return Err(Error::InvalidParameter(format!("ladder needs at least 6 entries, got {count}")));
        }
        Ok(Self { eps_0, ratio, count })
    }

    /// `ε_j = 2^{-j}` for `j = j0..=j1`.
    pub fn dyadic(j0: i32, j1: i32) -> Result<Self> {
        Self::new(0.5f64.powi(j0), 0.5, (j1 - j0 + 1).max(0) as usize)
    }

    pub fn eps(&self, j: usize) -> f64 {
        self.eps_0 * self.ratio.powi(j as i32)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.eps(j)).collect()
    }

    pub fn smallest(&self) -> f64 {
        self.eps(self.count - 1)
    }

    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        let min_eps = min_admissible_eps(grid);
        if self.smallest() < min_eps * (1.0 - 1e-12) {
            return Err(Error::Aliasing { eps: self.smallest(), min_eps });
        }
        Ok(())
    }
}

/// One representative `(f_ε)_ε` of a generalized function, sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NetFunction {
    pub ladder: EpsilonLadder,
    pub grid: GridSpec,
    pub frames: Vec<Vec<Complex64>>,
    pub mode: Mode,
    pub weight: Weight,
    // Reference magnitude of each frame for roundoff floors; inherited through
    // windowing so that a cut-off tail is not mistaken for resolved signal.
    magnitude: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Add,
    Sub,
    Mul,
}

impl NetFunction {
    pub fn new(
        ladder: EpsilonLadder,
        grid: GridSpec,
        frames: Vec<Vec<Complex64>>,
        mode: Mode,
        weight: Weight,
    ) -> Result<Self> {
        if frames.len() != ladder.count {
            return Err(Error::Mismatch(format!("{} frames for a ladder of {}", frames.len(), ladder.count)));
        }
        for f in &frames {
            if f.len() != grid.len() {
                return Err(Error::Mismatch(format!("frame of {} samples on a grid of {}", f.len(), grid.len())));
            }
            if f.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::InvalidParameter("frames must be finite".into()));
            }
        }
        let magnitude = frames.iter().map(|f| fourier::sup_norm(f)).collect();
        Ok(Self { ladder, grid, frames, mode, weight, magnitude })
    }

    pub(crate) fn with_magnitude(mut self, magnitude: Vec<f64>) -> Self {
        self.magnitude = self.magnitude.iter().zip(magnitude).map(|(a, b)| a.max(b)).collect();
        self
    }

    /// Reference size of frame `j` used for noise floors.
    pub fn magnitude(&self, j: usize) -> f64 {
        self.magnitude[j]
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_weight(mut self, weight: Weight) -> Self {
        self.weight = weight;
        self
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        combine(self, other, Op::Add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        combine(self, other, Op::Sub)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        combine(self, other, Op::Mul)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for f in out.frames.iter_mut() {
            for v in f.iter_mut() {
                *v *= c;
            }
        }
        out.magnitude.iter_mut().for_each(|m| *m *= c.norm());
        out
    }

    /// Pointwise product with a fixed real profile (e.g. a window).
    pub fn multiply_by(&self, profile: &[f64]) -> Result<Self> {
        if profile.len() != self.grid.len() {
            return Err(Error::Mismatch("profile does not match grid".into()));
        }
        let mut out = self.clone();
        for f in out.frames.iter_mut() {
            for (v, w) in f.iter_mut().zip(profile) {
                *v *= *w;
            }
        }
        let wmax = profile.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        out.magnitude.iter_mut().for_each(|m| *m *= wmax.max(1.0));
        Ok(out)
    }

    /// Largest ratio of boundary magnitude to frame sup over the ladder.
    pub fn edge_ratio(&self) -> f64 {
        let edges = self.grid.edge_indices();
        self.frames
            .iter()
            .map(|f| {
                let sup = fourier::sup_norm(f);
                if sup == 0.0 {
                    return 0.0;
                }
                edges.iter().map(|&i| f[i].norm()).fold(0.0, f64::max) / sup
            })
            .fold(0.0, f64::max)
    }

    fn warn_edges(&self, what: &str) {
        let r = self.edge_ratio();
        if r > 1e-8 {
            log::warn!("{what}: boundary mass ratio {r:e} exceeds 1e-8; periodization may pollute results");
        }
    }

    /// Apply a dual-grid multiplier frame by frame.
    pub fn apply_multiplier(&self, mult: &[Complex64], magnitude_gain: f64) -> Self {
        let mut out = self.clone();
        out.frames = self.frames.iter().map(|f| fourier::apply_multiplier(&self.grid, f, mult)).collect();
        let gained: Vec<f64> = self.magnitude.iter().map(|m| m * magnitude_gain).collect();
        out.magnitude = out.frames.iter().map(|f| fourier::sup_norm(f)).collect();
        out.with_magnitude(gained)
    }

    /// Samples of frame `j` as real parts.
    pub fn frame_re(&self, j: usize) -> Vec<f64> {
        self.frames[j].iter().map(|v| v.re).collect()
    }

    /// Export as `net.json` plus one little-endian binary per frame
    /// (interleaved real and imaginary parts).
    pub fn export(&self, dir: &Path) -> Result<NetManifest> {
        fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        for (j, f) in self.frames.iter().enumerate() {
            let name = format!("frame_{j:03}.c64");
            let flat: Vec<f64> = f.iter().flat_map(|v| [v.re, v.im]).collect();
            io::write_atomic(&dir.join(&name), &io::f64_le_bytes(&flat))?;
            files.push(name);
        }
        let manifest = NetManifest {
            ladder: self.ladder,
            eps: self.ladder.values(),
            grid: self.grid,
            mode: self.mode,
            weight: self.weight.clone(),
            frame_files: files,
            layout: "interleaved re/im, f64 little-endian, row-major".into(),
        };
        io::write_json(&dir.join("net.json"), &manifest)?;
        Ok(manifest)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetManifest {
    pub ladder: EpsilonLadder,
    pub eps: Vec<f64>,
    pub grid: GridSpec,
    pub mode: Mode,
    pub weight: Weight,
    pub frame_files: Vec<String>,
    pub layout: String,
}

/// Every frame equals `f`.
pub fn constant_embed(
    f: &[Complex64],
    grid: &GridSpec,
    ladder: &EpsilonLadder,
    mode: Mode,
    weight: Weight,
) -> Result<NetFunction> {
    NetFunction::new(*ladder, *grid, vec![f.to_vec(); ladder.count], mode, weight)
}

pub fn combine(a: &NetFunction, b: &NetFunction, op: Op) -> Result<NetFunction> {
    if a.grid != b.grid {
        return Err(Error::Mismatch("nets live on different grids".into()));
    }
    if a.ladder != b.ladder {
        return Err(Error::Mismatch("nets use different ε-ladders".into()));
    }
    let frames = a
        .frames
        .iter()
        .zip(&b.frames)
        .map(|(fa, fb)| {
            fa.iter()
                .zip(fb)
                .map(|(x, y)| match op {
                    Op::Add => x + y,
                    Op::Sub => x - y,
                    Op::Mul => x * y,
                })
                .collect()
        })
        .collect();
    let magnitude = a
        .magnitude
        .iter()
        .zip(&b.magnitude)
        .map(|(x, y)| match op {
            Op::Add | Op::Sub => x.max(*y),
            Op::Mul => x * y,
        })
        .collect();
    Ok(NetFunction::new(a.ladder, a.grid, frames, a.mode, a.weight.clone())?.with_magnitude(magnitude))
}

fn derivative(a: &NetFunction, alpha: &[usize], partial: bool) -> Result<NetFunction> {
    if alpha.len() != a.grid.dim {
        return Err(Error::InvalidParameter(format!(
            "multi-index of length {} on a {}-D grid",
            alpha.len(),
            a.grid.dim
        )));
    }
    if alpha.iter().all(|&k| k == 0) {
        return Ok(a.clone());
    }
    a.warn_edges("spectral derivative");
    let order: usize = alpha.iter().sum();
    let mult = fourier::derivative_multiplier(&a.grid, alpha, partial);
    Ok(a.apply_multiplier(&mult, a.grid.dual_range().powi(order as i32)))
}

/// `∂^α` frame by frame, computed as the multiplier `(-iξ)^α`.
pub fn spectral_derivative(a: &NetFunction, alpha: &[usize]) -> Result<NetFunction> {
    derivative(a, alpha, true)
}

/// `D^α = (-i∂)^α` frame by frame, computed as the multiplier `(-ξ)^α`.
pub fn spectral_d(a: &NetFunction, alpha: &[usize]) -> Result<NetFunction> {
    derivative(a, alpha, false)
}

/// A truncated ultradifferential operator `P(D) = Σ a_α D^α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UltradiffOperator {
    pub dim: usize,
    pub n_max: usize,
    pub coefficients: Vec<(Vec<usize>, Complex64)>,
    /// `(C, L)` with `|a_α| <= C L^{|α|} / M_{|α|}`.
    pub bound: (f64, f64),
}

pub const MAX_OPERATOR_ORDER: usize = 64;

impl UltradiffOperator {
    /// Build with the smallest `C` for the given `L`.
    pub fn new(dim: usize, coefficients: Vec<(Vec<usize>, Complex64)>, weight: &WeightSequence, l: f64) -> Result<Self> {
        if !(l > 0.0) {
            return Err(Error::InvalidParameter(format!("L must be positive, got {l}")));
        }
        let mut n_max = 0;
        let mut c = 0.0f64;
        for (alpha, a) in &coefficients {
            if alpha.len() != dim {
                return Err(Error::InvalidParameter("multi-index length differs from dimension".into()));
            }
            let k: usize = alpha.iter().sum();
            if k > MAX_OPERATOR_ORDER || k > weight.p_max() {
                return Err(Error::InvalidParameter(format!("order {k} exceeds the cap {MAX_OPERATOR_ORDER}")));
            }
            n_max = n_max.max(k);
            c = c.max(a.norm() * (weight.log_m()[k] - k as f64 * l.ln()).exp());
        }
        Ok(Self { dim, n_max, coefficients, bound: (c, l) })
    }

    /// Build and check a prescribed bound `(C, L)`.
    pub fn with_bound(
        dim: usize,
        coefficients: Vec<(Vec<usize>, Complex64)>,
        weight: &WeightSequence,
        c: f64,
        l: f64,
    ) -> Result<Self> {
        let op = Self::new(dim, coefficients, weight, l)?;
        if op.bound.0 > c * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "coefficients need C = {} > {c} for L = {l}",
                op.bound.0
            )));
        }
        Ok(Self { bound: (c, l), ..op })
    }

    pub fn identity(dim: usize, weight: &WeightSequence) -> Self {
        Self::new(dim, vec![(vec![0; dim], Complex64::new(1.0, 0.0))], weight, 1.0).expect("identity is valid")
    }

    /// The symbol `Σ a_α (-ξ)^α` evaluated at the dual nodes of `grid`.
    pub fn multiplier(&self, grid: &GridSpec) -> Vec<Complex64> {
        let ax = grid.xi_axis();
        (0..grid.len())
            .map(|idx| {
                let xi = grid.xi_point(idx, &ax);
                self.coefficients
                    .iter()
                    .map(|(alpha, a)| {
                        let mut v = *a;
                        for (axis, &k) in alpha.iter().enumerate() {
                            v *= (-xi[axis]).powi(k as i32);
                        }
                        v
                    })
                    .sum()
            })
            .collect()
    }

    /// The operator whose symbol is `∂_{ζ_axis}` of this one.
    pub fn symbol_derivative(&self, axis: usize, weight: &WeightSequence) -> Result<Self> {
        let coefficients = self
            .coefficients
            .iter()
            .filter(|(alpha, _)| alpha[axis] > 0)
            .map(|(alpha, a)| {
                let mut beta = alpha.clone();
                beta[axis] -= 1;
                (beta, a * alpha[axis] as f64)
            })
            .collect();
        Self::new(self.dim, coefficients, weight, self.bound.1)
    }
}

pub fn apply_ultradiff(p: &UltradiffOperator, a: &NetFunction) -> Result<NetFunction> {
    if p.dim != a.grid.dim {
        return Err(Error::Mismatch("operator and net dimensions differ".into()));
    }
    a.warn_edges("ultradifferential operator");
    let mult = p.multiplier(&a.grid);
    let gain = mult.iter().map(|v| v.norm()).fold(1.0, f64::max);
    Ok(a.apply_multiplier(&mult, gain))
}

/// An ε-indexed scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedNumber {
    pub ladder: EpsilonLadder,
    pub values: Vec<Complex64>,
}

impl GeneralizedNumber {
    pub fn new(ladder: EpsilonLadder, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != ladder.count {
            return Err(Error::Mismatch("value count differs from ladder length".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("generalized number values must be finite".into()));
        }
        Ok(Self { ladder, values })
    }

    pub fn from_real(ladder: EpsilonLadder, values: &[f64]) -> Result<Self> {
        Self::new(ladder, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }
}

/// An ε-indexed point confined to a fixed box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedPoint {
    pub ladder: EpsilonLadder,
    pub points: Vec<Vec<f64>>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl GeneralizedPoint {
    pub fn new(ladder: EpsilonLadder, points: Vec<Vec<f64>>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if points.len() != ladder.count {
            return Err(Error::Mismatch("point count differs from ladder length".into()));
        }
        let dim = lower.len();
        if upper.len() != dim || lower.iter().zip(&upper).any(|(a, b)| !(a <= b)) {
            return Err(Error::InvalidParameter("box bounds must satisfy lower <= upper".into()));
        }
        for p in &points {
            if p.len() != dim || p.iter().zip(lower.iter().zip(&upper)).any(|(x, (a, b))| x < a || x > b) {
                return Err(Error::OutsideBox(format!("{p:?} not in {lower:?}..{upper:?}")));
            }
        }
        Ok(Self { ladder, points, lower, upper })
    }

    /// The classical point `x` seen as a constant net.
    pub fn classical(ladder: EpsilonLadder, x: &[f64]) -> Result<Self> {
        Self::new(ladder, vec![x.to_vec(); ladder.count], x.to_vec(), x.to_vec())
    }
}

fn interpolate(grid: &GridSpec, f: &[Complex64], x: &[f64]) -> Result<Complex64> {
    let n = grid.n;
    let mut base = [0usize; 2];
    let mut frac = [0.0f64; 2];
    for axis in 0..grid.dim {
        let pos = (x[axis] + grid.half_width) / grid.dx();
        if !(pos >= 0.0 && pos <= (n - 1) as f64) {
            return Err(Error::OutsideBox(format!("coordinate {} outside the grid", x[axis])));
        }
        let i = (pos.floor() as usize).min(n - 2);
        base[axis] = i;
        frac[axis] = pos - i as f64;
    }
    if grid.dim == 1 {
        let (i, t) = (base[0], frac[0]);
        return Ok(f[i] * (1.0 - t) + f[i + 1] * t);
    }
    let (i, j, s, t) = (base[0], base[1], frac[0], frac[1]);
    let at = |a: usize, b: usize| f[a * n + b];
    Ok(at(i, j) * ((1.0 - s) * (1.0 - t))
        + at(i + 1, j) * (s * (1.0 - t))
        + at(i, j + 1) * ((1.0 - s) * t)
        + at(i + 1, j + 1) * (s * t))
}

/// `values[j] = f_j(x_j)`, by linear interpolation between grid nodes.
/// Values at or below the frame's noise floor are returned as exact zeros.
pub fn point_value(a: &NetFunction, x: &GeneralizedPoint) -> Result<GeneralizedNumber> {
    if x.ladder != a.ladder {
        return Err(Error::Mismatch("point and net use different ladders".into()));
    }
    if x.lower.len() != a.grid.dim {
        return Err(Error::Mismatch("point dimension differs from grid".into()));
    }
    let values = a
        .frames
        .iter()
        .zip(&x.points)
        .enumerate()
        .map(|(j, (f, p))| {
            let v = interpolate(&a.grid, f, p)?;
            Ok(if v.norm() <= growth::DEFAULT_NOISE_FLOOR * a.magnitude(j) { Complex64::new(0.0, 0.0) } else { v })
        })
        .collect::<Result<Vec<_>>>()?;
    GeneralizedNumber::new(a.ladder, values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberVerdict {
    pub mode: Mode,
    pub moderate: bool,
    pub negligible: bool,
    /// `κ_j`, the rate of `log|z_j|`.
    pub kappa: Vec<f64>,
    /// `ν_j`, the rate of `-log|z_j|`; infinite where `z_j = 0`.
    pub nu: Vec<f64>,
    /// Beurling: `max κ_j`; Roumieu: final `κ_j`.
    pub fitted_k: f64,
    /// Smallest `ν_j`.
    pub fitted_nu: f64,
}

/// Moderate / negligible classification of a generalized number.
pub fn classify_generalized_number(z: &GeneralizedNumber, weight: &Weight, mode: Mode) -> Result<NumberVerdict> {
    let logs: Vec<f64> = z.values.iter().map(|v| v.norm().ln()).collect();
    classify_log_sizes(&z.ladder, &logs, weight, mode)
}

/// Classification from log-sizes; `-∞` entries (exact zero or numerical floor)
/// carry infinite negligibility rate.
pub(crate) fn classify_log_sizes(ladder: &EpsilonLadder, logs: &[f64], weight: &Weight, mode: Mode) -> Result<NumberVerdict> {
    if ladder.count < 6 {
        return Err(Error::InvalidParameter("ladder needs at least 6 entries".into()));
    }
    let eps = ladder.values();
    let kappa = logs.iter().zip(&eps).map(|(&y, &e)| weight.rate(y, e)).collect::<Result<Vec<_>>>()?;
    let nu = logs.iter().zip(&eps).map(|(&y, &e)| weight.rate(-y, e)).collect::<Result<Vec<_>>>()?;
    let (moderate, negligible, fitted_k) = match mode {
        Mode::Beurling => (
            growth::stays_bounded(&kappa),
            growth::diverges(&nu),
            kappa.iter().cloned().fold(0.0, f64::max),
        ),
        Mode::Roumieu => (
            growth::tends_to_zero(&kappa),
            growth::bounded_away_from_zero(&nu),
            kappa[kappa.len() - 1],
        ),
    };
    let fitted_nu = nu.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(NumberVerdict { mode, moderate, negligible, kappa, nu, fitted_k, fitted_nu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightSequence;

    fn setup() -> (GridSpec, EpsilonLadder, Weight) {
        let g = GridSpec::one_d(10.0, 512).unwrap();
        let l = EpsilonLadder::dyadic(1, 6).unwrap();
        (g, l, Weight::Sequence(WeightSequence::gevrey(2.0, 256).unwrap()))
    }

    #[test]
    fn ladder_validation() {
        assert!(EpsilonLadder::new(1.5, 0.5, 8).is_err());
        assert!(EpsilonLadder::new(0.5, 1.0, 8).is_err());
        assert!(EpsilonLadder::new(0.5, 0.5, 5).is_err());
        let l = EpsilonLadder::dyadic(3, 10).unwrap();
        assert_eq!(l.count, 8);
        assert_eq!(l.smallest(), 1.0 / 1024.0);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let (g, l, w) = setup();
        let g2 = GridSpec::one_d(5.0, 512).unwrap();
        let one = vec![Complex64::new(1.0, 0.0); g.len()];
        let a = constant_embed(&one, &g, &l, Mode::Beurling, w.clone()).unwrap();
        let b = constant_embed(&one, &g2, &l, Mode::Beurling, w).unwrap();
        assert!(matches!(combine(&a, &b, Op::Add), Err(Error::Mismatch(_))));
    }

    #[test]
    fn point_outside_box_is_rejected() {
        let (_, l, _) = setup();
        assert!(GeneralizedPoint::new(l, vec![vec![2.0]; 6], vec![-1.0], vec![1.0]).is_err());
    }

    #[test]
    fn operator_bound_is_checked() {
        let m = WeightSequence::gevrey(2.0, 256).unwrap();
        let coeffs = vec![(vec![2], Complex64::new(1.0, 0.0))];
        assert!(UltradiffOperator::with_bound(1, coeffs.clone(), &m, 1.0, 1.0).is_err());
        let op = UltradiffOperator::with_bound(1, coeffs, &m, 4.0, 1.0).unwrap();
        assert_eq!(op.n_max, 2);
    }
}
