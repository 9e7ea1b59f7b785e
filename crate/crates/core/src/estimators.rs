//! Growth classification of nets, the Landau–Kolmogorov check and the
//! Paley–Wiener regularity test.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{self, GridSpec};
use crate::growth::{self, Mode, Weight, DEFAULT_NOISE_FLOOR};
use crate::mollifier::window_plateau;
use crate::nets::{self, NetFunction};
use crate::weights::{SequenceKind, WeightSequence};

/// Largest derivative order accepted by [`seminorm_ladder`].
pub const MAX_SEMINORM_ORDER: usize = 16;

/// The `h`-grid sampled by [`classify_net`].
pub const MODERATION_H_GRID: [f64; 3] = [4.0, 1.0, 0.25];

/// Derivative order used by [`classify_net`] for the moderation guard.
pub const MODERATION_ORDER: usize = 4;

/// A finite union of closed boxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub boxes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Region {
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.iter().zip(&upper).any(|(a, b)| !(a <= b)) {
            return Err(Error::InvalidParameter("box bounds must satisfy lower <= upper".into()));
        }
        Ok(Self { boxes: vec![(lower, upper)] })
    }

    /// `[-r, r]^d`.
    pub fn centered(dim: usize, r: f64) -> Result<Self> {
        Self::boxed(vec![-r; dim], vec![r; dim])
    }

    pub fn whole(grid: &GridSpec) -> Self {
        Self::centered(grid.dim, grid.half_width).expect("positive half width")
    }

    /// The part of the grid with `|x_i| >= r` for some axis `i`.
    pub fn outside(grid: &GridSpec, r: f64) -> Result<Self> {
        let l = grid.half_width;
        if !(r > 0.0 && r < l) {
            return Err(Error::InvalidParameter(format!("exclusion radius must lie in (0, {l})")));
        }
        let mut boxes = Vec::new();
        for axis in 0..grid.dim {
            for (lo, hi) in [(-l, -r), (r, l)] {
                let mut lower = vec![-l; grid.dim];
                let mut upper = vec![l; grid.dim];
                lower[axis] = lo;
                upper[axis] = hi;
                boxes.push((lower, upper));
            }
        }
        Ok(Self { boxes })
    }

    pub fn dim(&self) -> usize {
        self.boxes.first().map_or(0, |b| b.0.len())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.boxes
            .iter()
            .any(|(lo, hi)| lo.iter().zip(hi).zip(x).all(|((a, b), v)| a <= v && v <= b))
    }

    /// Grid nodes inside the region; errors when the region misses the grid.
    pub fn mask(&self, grid: &GridSpec) -> Result<Vec<bool>> {
        if self.dim() != grid.dim {
            return Err(Error::Mismatch("region dimension differs from grid".into()));
        }
        let mask: Vec<bool> = (0..grid.len()).map(|i| self.contains(&grid.point(i)[..grid.dim])).collect();
        if !mask.iter().any(|&b| b) {
            return Err(Error::InvalidParameter("region contains no grid node".into()));
        }
        Ok(mask)
    }

    fn hull(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for (a, b) in &self.boxes {
            for i in 0..d {
                lo[i] = lo[i].min(a[i]);
                hi[i] = hi[i].max(b[i]);
            }
        }
        (lo, hi)
    }
}

/// Product window equal to 1 on the hull of `region` (clipped away from the grid edge)
/// and vanishing at the edge.
fn flat_top_window(region: &Region, grid: &GridSpec) -> Vec<f64> {
    let l = grid.half_width;
    let delta = 0.1 * l;
    let (lo, hi) = region.hull();
    let lo: Vec<f64> = lo.iter().map(|v| v.max(-l + 1.05 * delta)).collect();
    let hi: Vec<f64> = hi.iter().map(|v| v.min(l - 1.05 * delta)).collect();
    let plateau = window_plateau();
    (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            (0..grid.dim)
                .map(|a| {
                    let d = (lo[a] - x[a]).max(x[a] - hi[a]).max(0.0);
                    plateau.eval(1.0 + d / delta)
                })
                .product()
        })
        .collect()
}

/// Localize a net before spectral derivatives when its frames reach the grid edge.
fn localize(a: &NetFunction, region: &Region) -> Result<NetFunction> {
    if a.edge_ratio() <= 1e-8 {
        return Ok(a.clone());
    }
    log::warn!("frames reach the grid edge; applying a flat-top window before differentiation");
    a.multiply_by(&flat_top_window(region, &a.grid))
}

fn sequence_of(a: &NetFunction) -> Result<&WeightSequence> {
    match &a.weight {
        Weight::Sequence(m) => Ok(m),
        Weight::Function(_) => Err(Error::Unsupported(
            "sequence estimators need a weight sequence; use the bb module for weight functions".into(),
        )),
    }
}

/// Multi-indices of length `dim` with `|α| = order`.
pub fn multi_indices(dim: usize, order: usize) -> Vec<Vec<usize>> {
    match dim {
        1 => vec![vec![order]],
        _ => (0..=order).rev().map(|a| vec![a, order - a]).collect(),
    }
}

/// `log sup_K |f_j|` per frame, `-∞` when at or below the noise floor of the frame.
pub(crate) fn log_sups(a: &NetFunction, mask: &[bool]) -> Vec<f64> {
    a.frames
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let s = f.iter().zip(mask).filter(|(_, &m)| m).map(|(v, _)| v.norm()).fold(0.0, f64::max);
            if s <= DEFAULT_NOISE_FLOOR * a.magnitude(j) || s == 0.0 {
                f64::NEG_INFINITY
            } else {
                s.ln()
            }
        })
        .collect()
}

/// Per order `k <= α_max`, the per-frame `log max_{|α|=k} sup_K |∂^α f_j|`.
fn derivative_log_sups(a: &NetFunction, region: &Region, alpha_max: usize) -> Result<Vec<Vec<f64>>> {
    let mask = region.mask(&a.grid)?;
    let base = if alpha_max > 0 { localize(a, region)? } else { a.clone() };
    let mut out = Vec::with_capacity(alpha_max + 1);
    for k in 0..=alpha_max {
        let mut best = vec![f64::NEG_INFINITY; a.len()];
        for alpha in multi_indices(a.grid.dim, k) {
            let d = nets::spectral_derivative(&base, &alpha)?;
            for (b, v) in best.iter_mut().zip(log_sups(&d, &mask)) {
                *b = b.max(v);
            }
        }
        out.push(best);
    }
    Ok(out)
}

fn seminorm_logs(sups: &[Vec<f64>], m: &WeightSequence, h: f64) -> Vec<f64> {
    let frames = sups[0].len();
    (0..frames)
        .map(|j| {
            sups.iter()
                .enumerate()
                .map(|(k, s)| s[j] - k as f64 * h.ln() - m.log_m()[k])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Per-ε values of `sup_{|α| <= α_max, x ∈ K} |f_ε^{(α)}(x)| / (h^{|α|} M_{|α|})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormLadder {
    pub region: Region,
    pub h: f64,
    pub alpha_max: usize,
    pub eps: Vec<f64>,
    /// Zero where every derivative sits at the noise floor.
    pub values: Vec<f64>,
}

pub fn seminorm_ladder(a: &NetFunction, region: &Region, h: f64, alpha_max: usize) -> Result<SeminormLadder> {
    if alpha_max > MAX_SEMINORM_ORDER {
        return Err(Error::InvalidParameter(format!("alpha_max {alpha_max} exceeds {MAX_SEMINORM_ORDER}")));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("h must be positive, got {h}")));
    }
    let m = sequence_of(a)?;
    let sups = derivative_log_sups(a, region, alpha_max)?;
    let values = seminorm_logs(&sups, m, h).iter().map(|v| v.exp()).collect();
    Ok(SeminormLadder { region: region.clone(), h, alpha_max, eps: a.ladder.values(), values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Moderate,
    Negligible,
    Neither,
    Inconclusive,
}

/// Rate fitted on one parameter of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedRate {
    /// `h` (sequence estimators) or `λ` (weight-function estimators).
    pub parameter: f64,
    /// Beurling: `max_j κ_j`; Roumieu: the final `κ_j`.
    pub k: f64,
    pub kappa: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthVerdict {
    pub mode: Mode,
    pub classification: Classification,
    pub moderate: bool,
    pub negligible: bool,
    pub eps: Vec<f64>,
    pub fitted: Vec<FittedRate>,
    /// `log sup_K |f_ε|`, `-∞` at the noise floor.
    pub log_sup: Vec<f64>,
    pub nu: Vec<f64>,
    /// "For all" quantifiers are certified on a finite grid plus trend.
    pub heuristic: bool,
}

fn kappas(ladder: &nets::EpsilonLadder, logs: &[f64], weight: &Weight) -> Result<Vec<f64>> {
    logs.iter().zip(ladder.values()).map(|(&y, e)| weight.rate(y, e)).collect()
}

fn moderate_on(fitted: &[FittedRate], mode: Mode) -> bool {
    match mode {
        Mode::Beurling => fitted.iter().all(|f| growth::stays_bounded(&f.kappa)),
        Mode::Roumieu => fitted.iter().any(|f| growth::tends_to_zero(&f.kappa)),
    }
}

pub(crate) fn assemble(
    a: &NetFunction,
    mode: Mode,
    fitted: Vec<FittedRate>,
    log_sup: Vec<f64>,
    nu: Vec<f64>,
    negligible_rule: bool,
) -> GrowthVerdict {
    let moderate = moderate_on(&fitted, mode);
    let erratic = growth::is_erratic(&log_sup, 2.0);
    let negligible = moderate && negligible_rule;
    let classification = if erratic && !negligible_rule {
        Classification::Inconclusive
    } else if !moderate {
        Classification::Neither
    } else if negligible {
        Classification::Negligible
    } else {
        Classification::Moderate
    };
    GrowthVerdict {
        mode,
        classification,
        moderate,
        negligible,
        eps: a.ladder.values(),
        fitted,
        log_sup,
        nu,
        heuristic: true,
    }
}

/// Moderate / negligible classification on the region `K`.
///
/// Moderation samples seminorm ladders over [`MODERATION_H_GRID`] with
/// `α_max = 4`; negligibility reads only the 0-th order sup-norm.
pub fn classify_net(a: &NetFunction, region: &Region, mode: Mode) -> Result<GrowthVerdict> {
    if a.ladder.count < 6 {
        return Err(Error::InvalidParameter("ladder needs at least 6 entries".into()));
    }
    let m = sequence_of(a)?;
    let sups = derivative_log_sups(a, region, MODERATION_ORDER)?;
    let fitted = MODERATION_H_GRID
        .iter()
        .map(|&h| {
            let logs = seminorm_logs(&sups, m, h);
            let kappa = kappas(&a.ladder, &logs, &a.weight)?;
            Ok(fitted_rate(h, kappa, mode))
        })
        .collect::<Result<Vec<_>>>()?;
    let numbers = nets::classify_log_sizes(&a.ladder, &sups[0], &a.weight, mode)?;
    Ok(assemble(a, mode, fitted, sups[0].clone(), numbers.nu.clone(), numbers.negligible))
}

pub(crate) fn fitted_rate(parameter: f64, kappa: Vec<f64>, mode: Mode) -> FittedRate {
    let k = match mode {
        Mode::Beurling => kappa.iter().cloned().fold(0.0, f64::max),
        Mode::Roumieu => kappa[kappa.len() - 1],
    };
    FittedRate { parameter, k, kappa }
}

/// Negligibility read off full derivative seminorms (`α_max = 4`, every `h` of the grid).
pub fn negligible_full_derivatives(a: &NetFunction, region: &Region, mode: Mode) -> Result<bool> {
    let m = sequence_of(a)?;
    let sups = derivative_log_sups(a, region, MODERATION_ORDER)?;
    for &h in &MODERATION_H_GRID {
        let logs = seminorm_logs(&sups, m, h);
        let verdict = nets::classify_log_sizes(&a.ladder, &logs, &a.weight, mode)?;
        if !verdict.negligible {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandauKolmogorovReport {
    pub k: usize,
    pub n: usize,
    pub dim: usize,
    pub sup_f: f64,
    pub sup_k: f64,
    pub sup_n: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; zero when both sides vanish.
    pub ratio: f64,
    pub holds: bool,
}

/// Check `sup_{|α|=k}‖f^{(α)}‖ <= 2π d^k ‖f‖^{1-k/n} sup_{|α|=n}‖f^{(α)}‖^{k/n}` spectrally.
pub fn landau_kolmogorov_check(f: &[Complex64], grid: &GridSpec, k: usize, n: usize) -> Result<LandauKolmogorovReport> {
    if !(0 < k && k < n && n <= 8) {
        return Err(Error::InvalidParameter(format!("need 0 < k < n <= 8, got k={k}, n={n}")));
    }
    if f.len() != grid.len() {
        return Err(Error::Mismatch("samples do not match grid".into()));
    }
    let sup_f = fourier::sup_norm(f);
    if sup_f > 0.0 {
        let edge = grid.edge_indices().iter().map(|&i| f[i].norm()).fold(0.0, f64::max);
        if edge > 1e-8 * sup_f {
            log::warn!("Landau–Kolmogorov check: boundary mass ratio {:e}", edge / sup_f);
        }
    }
    let order_sup = |order: usize| {
        multi_indices(grid.dim, order)
            .iter()
            .map(|alpha| {
                let mult = fourier::derivative_multiplier(grid, alpha, true);
                fourier::sup_norm(&fourier::apply_multiplier(grid, f, &mult))
            })
            .fold(0.0, f64::max)
    };
    let sup_k = order_sup(k);
    let sup_n = order_sup(n);
    let t = k as f64 / n as f64;
    let d = grid.dim as f64;
    let rhs = 2.0 * std::f64::consts::PI * d.powi(k as i32) * sup_f.powf(1.0 - t) * sup_n.powf(t);
    let lhs = sup_k;
    let ratio = if rhs > 0.0 { lhs / rhs } else if lhs == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(LandauKolmogorovReport { k, n, dim: grid.dim, sup_f, sup_k, sup_n, lhs, rhs, ratio, holds: lhs <= rhs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regularity {
    Regular,
    NotRegular,
    Inconclusive,
}

/// Outcome of the decay search over the `(k, h)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub mode: Mode,
    pub verdict: Regularity,
    /// Beurling: `(h, smallest bounded k)` per `h`; Roumieu: `(k, smallest bounded h)` per `k`.
    pub thresholds: Vec<(f64, Option<f64>)>,
    /// `log₂` growth of the threshold across the grid; infinite when a threshold is missing.
    pub spread: f64,
    /// A witnessing `(k, h)` on the grid extreme, when one exists.
    pub witness: Option<(f64, f64)>,
    /// `max_ξ log|f̂_ε(ξ)| + M(|ξ|/h)` per grid `h` and frame.
    pub lhs: Vec<Vec<f64>>,
}

/// `M(|ξ|/h)` on every dual node, shared across frames.
pub(crate) struct DecayTable {
    pub h_grid: Vec<f64>,
    pub m_xi: Vec<Vec<f64>>,
}

pub(crate) fn headroom(m: &WeightSequence, t_max: f64) -> Result<WeightSequence> {
    if m.t_saturation() > t_max {
        return Ok(m.clone());
    }
    match m.kind() {
        SequenceKind::Gevrey { s } => {
            let p = (t_max.powf(1.0 / s) * 1.25) as usize + 64;
            m.with_p_max(p.max(m.p_max()))
        }
        SequenceKind::Custom => Err(Error::Saturation { p_max: m.p_max(), t_max: m.t_saturation() }),
    }
}

impl DecayTable {
    pub(crate) fn new(grid: &GridSpec, m: &WeightSequence) -> Result<(Self, WeightSequence)> {
        let h_grid = growth::parameter_grid();
        let norms = grid.xi_norms();
        let t_max = norms.iter().cloned().fold(0.0, f64::max) / h_grid[0];
        let m = headroom(m, t_max * 1.01)?;
        let m_xi = h_grid
            .iter()
            .map(|&h| norms.iter().map(|&r| m.assoc(r / h)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok((Self { h_grid, m_xi }, m))
    }
}

/// Transforms of every frame with the absolute spectral floor applied (`None` below it).
pub(crate) fn frame_transforms(a: &NetFunction) -> Vec<Vec<Option<f64>>> {
    let scale = (2.0 * a.grid.half_width).powi(a.grid.dim as i32);
    a.frames
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let floor = DEFAULT_NOISE_FLOOR * a.magnitude(j) * scale;
            fourier::forward(&a.grid, f)
                .iter()
                .map(|v| {
                    let r = v.norm();
                    (r > floor && r > 0.0).then(|| r.ln())
                })
                .collect()
        })
        .collect()
}

/// `max_ξ log|f̂_ε(ξ)| + M(|ξ|/h)` indexed `[group][h][frame]`, one group per mask
/// (or a single group over every node when `masks` is `None`).
pub(crate) fn decay_lhs(
    transforms: &[Vec<Option<f64>>],
    table: &DecayTable,
    masks: Option<&[Vec<bool>]>,
) -> Vec<Vec<Vec<f64>>> {
    let groups = masks.map_or(1, |m| m.len());
    let nh = table.h_grid.len();
    let mut lhs = vec![vec![vec![f64::NEG_INFINITY; transforms.len()]; nh]; groups];
    let mut member = Vec::with_capacity(groups);
    for (j, t) in transforms.iter().enumerate() {
        for (i, v) in t.iter().enumerate() {
            let Some(l) = v else { continue };
            member.clear();
            match masks {
                None => member.push(0),
                Some(ms) => member.extend((0..groups).filter(|&g| ms[g][i])),
            }
            if member.is_empty() {
                continue;
            }
            for (hi, mx) in table.m_xi.iter().enumerate() {
                let val = l + mx[i];
                for &g in &member {
                    let slot = &mut lhs[g][hi][j];
                    if val > *slot {
                        *slot = val;
                    }
                }
            }
        }
    }
    lhs
}

/// The `(k, h)` search for `log|f̂_ε(ξ)| + M(|ξ|/h) - M(k/ε)` bounded above.
pub(crate) fn certify_decay(
    a: &NetFunction,
    lhs: Vec<Vec<f64>>,
    table: &DecayTable,
    m: &WeightSequence,
    mode: Mode,
) -> Result<DecayCertificate> {
    let grid_vals = growth::parameter_grid();
    let eps = a.ladder.values();
    // bounded[hi][ki]
    let mut bounded = vec![vec![false; grid_vals.len()]; table.h_grid.len()];
    for (hi, row) in lhs.iter().enumerate() {
        for (ki, &k) in grid_vals.iter().enumerate() {
            let resid = row
                .iter()
                .zip(&eps)
                .map(|(&l, &e)| Ok(l - m.assoc(k / e)?))
                .collect::<Result<Vec<f64>>>()?;
            bounded[hi][ki] = growth::residual_bounded(&resid);
        }
    }
    let nh = table.h_grid.len();
    let nk = grid_vals.len();
    let (thresholds, witness): (Vec<(f64, Option<f64>)>, Option<(f64, f64)>) = match mode {
        Mode::Beurling => {
            let t: Vec<(f64, Option<f64>)> = (0..nh)
                .map(|hi| (table.h_grid[hi], (0..nk).find(|&ki| bounded[hi][ki]).map(|ki| grid_vals[ki])))
                .collect();
            let w = t[0].1.map(|k| (k, table.h_grid[0]));
            (t, w)
        }
        Mode::Roumieu => {
            let t: Vec<(f64, Option<f64>)> = (0..nk)
                .map(|ki| (grid_vals[ki], (0..nh).find(|&hi| bounded[hi][ki]).map(|hi| table.h_grid[hi])))
                .collect();
            let w = t[0].1.map(|h| (grid_vals[0], h));
            (t, w)
        }
    };
    let first = thresholds[0].1;
    let last = thresholds[thresholds.len() - 1].1;
    let spread = match (first, last) {
        (Some(a), Some(b)) => a.log2() - b.log2(),
        _ => f64::INFINITY,
    };
    let verdict = if spread <= 1.0 + 1e-9 {
        Regularity::Regular
    } else if spread <= 2.0 + 1e-9 {
        Regularity::Inconclusive
    } else {
        Regularity::NotRegular
    };
    let witness = if verdict == Regularity::Regular { witness } else { None };
    Ok(DecayCertificate { mode, verdict, thresholds, spread, witness, lhs })
}

/// Paley–Wiener test for membership in the regular subalgebra.
///
/// Frames must be localized: a boundary mass ratio above `1e-6` is rejected.
pub fn regularity_test(a: &NetFunction, mode: Mode) -> Result<DecayCertificate> {
    let r = a.edge_ratio();
    if r > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "frames are not localized (boundary mass ratio {r:e}); window them first"
        )));
    }
    let m = sequence_of(a)?;
    let (table, m) = DecayTable::new(&a.grid, m)?;
    let transforms = frame_transforms(a);
    let lhs = decay_lhs(&transforms, &table, None).swap_remove(0);
    certify_decay(a, lhs, &table, &m, mode)
}
