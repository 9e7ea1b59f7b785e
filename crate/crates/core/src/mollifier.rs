//! Gevrey plateau functions and the mollifier net `φ_ε = ε^{-d} φ(x/ε)` with `φ̂ = ψ`.

use std::fs;
use std::path::Path;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{self, GridSpec};
use crate::io;
use crate::weights::WeightSequence;

const CDF_PANELS: usize = 4096;
const GL_POINTS: usize = 16;
/// Half width of the indicator convolved with the bump.
const BAND_EDGE: f64 = 1.5;
const BUMP_RADIUS: f64 = 0.5;

/// The normalized bump `ρ(u) = c·exp(-(1 - (u/r)²)^{-1/(σ-1)})` on `|u| < r`,
/// with its cumulative distribution tabulated by Gauss–Legendre panels.
#[derive(Debug, Clone)]
pub struct GevreyBump {
    sigma: f64,
    radius: f64,
    norm: f64,
    panel_width: f64,
    prefix: Vec<f64>,
    gl: Vec<(f64, f64)>,
}

impl GevreyBump {
    pub fn new(sigma: f64, radius: f64) -> Result<Self> {
        if !(sigma > 1.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("bump order must satisfy sigma > 1, got {sigma}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("bump radius must be positive, got {radius}")));
        }
        let gl = GaussLegendre::new(GL_POINTS.try_into().expect("nonzero"))
            .as_node_weight_pairs()
            .to_vec();
        let mut bump = Self {
            sigma,
            radius,
            norm: 1.0,
            panel_width: 2.0 * radius / CDF_PANELS as f64,
            prefix: Vec::with_capacity(CDF_PANELS + 1),
            gl,
        };
        let mut acc = 0.0;
        bump.prefix.push(0.0);
        for k in 0..CDF_PANELS {
            let a = -radius + k as f64 * bump.panel_width;
            acc += bump.integrate_raw(a, a + bump.panel_width);
            bump.prefix.push(acc);
        }
        bump.norm = 1.0 / acc;
        for v in bump.prefix.iter_mut() {
            *v *= bump.norm;
        }
        Ok(bump)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The unnormalized profile; its value at 0 is `e^{-1}`.
    pub fn raw(&self, u: f64) -> f64 {
        let z = u / self.radius;
        let q = 1.0 - z * z;
        if q <= 0.0 {
            return 0.0;
        }
        (-q.powf(-1.0 / (self.sigma - 1.0))).exp()
    }

    pub fn value(&self, u: f64) -> f64 {
        self.norm * self.raw(u)
    }

    /// Normalization constant `c`.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    fn integrate_raw(&self, a: f64, b: f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.gl.iter().map(|&(x, w)| w * self.raw(mid + half * x)).sum::<f64>() * half
    }

    /// `∫_{-r}^{u} ρ`.
    pub fn cdf(&self, u: f64) -> f64 {
        if u <= -self.radius {
            return 0.0;
        }
        if u >= self.radius {
            return 1.0;
        }
        let pos = (u + self.radius) / self.panel_width;
        let k = (pos.floor() as usize).min(CDF_PANELS - 1);
        let a = -self.radius + k as f64 * self.panel_width;
        self.prefix[k] + self.norm * self.integrate_raw(a, u)
    }
}

/// Samples of the normalized bump on a 1-D grid.
pub fn gevrey_bump(sigma: f64, radius: f64, grid: &GridSpec) -> Result<Vec<f64>> {
    if radius < 4.0 * grid.dx() {
        return Err(Error::Resolution(format!(
            "bump radius {radius} is below four grid spacings ({})",
            4.0 * grid.dx()
        )));
    }
    let bump = GevreyBump::new(sigma, radius)?;
    Ok(grid.axis().iter().map(|&x| bump.value(x)).collect())
}

/// The radial plateau profile: 1 on `[0, 1]`, 0 on `[2, ∞)`.
#[derive(Debug, Clone)]
pub struct Plateau {
    bump: GevreyBump,
}

impl Plateau {
    pub fn new(sigma: f64) -> Result<Self> {
        Ok(Self { bump: GevreyBump::new(sigma, BUMP_RADIUS)? })
    }

    pub fn sigma(&self) -> f64 {
        self.bump.sigma
    }

    /// `ψ(r) = (1_{[-3/2, 3/2]} * ρ)(|r|)`.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= BAND_EDGE - BUMP_RADIUS {
            return 1.0;
        }
        if r >= BAND_EDGE + BUMP_RADIUS {
            return 0.0;
        }
        self.bump.cdf(r + BAND_EDGE) - self.bump.cdf(r - BAND_EDGE)
    }

    pub fn bump(&self) -> &GevreyBump {
        &self.bump
    }
}

/// A mollifier net: spectral plateau `ψ` and base profile `φ` on a grid.
#[derive(Debug, Clone)]
pub struct MollifierNet {
    pub sigma: f64,
    pub grid: GridSpec,
    /// `ψ` at the dual nodes (FFT order).
    pub psi: Vec<f64>,
    /// `φ` at the grid nodes.
    pub phi: Vec<f64>,
    plateau: Plateau,
}

pub fn build_mollifier(sigma: f64, grid: &GridSpec) -> Result<MollifierNet> {
    if grid.dual_range() < 4.0 {
        return Err(Error::Resolution(format!(
            "dual range {} is below 4; refine the grid",
            grid.dual_range()
        )));
    }
    let plateau = Plateau::new(sigma)?;
    let norms = grid.xi_norms();
    let psi: Vec<f64> = norms.iter().map(|&r| plateau.eval(r)).collect();
    let dev = norms
        .iter()
        .zip(&psi)
        .filter(|(r, _)| **r <= 1.0)
        .map(|(_, v)| (v - 1.0).abs())
        .fold(0.0, f64::max);
    if dev > 1e-6 {
        return Err(Error::Resolution(format!("plateau deviation {dev:e} exceeds 1e-6")));
    }
    let phi = fourier::inverse(grid, &fourier::to_complex(&psi)).iter().map(|v| v.re).collect();
    Ok(MollifierNet { sigma, grid: *grid, psi, phi, plateau })
}

impl MollifierNet {
    pub fn plateau(&self) -> &Plateau {
        &self.plateau
    }

    /// `ψ(ε|ξ|)` at the dual nodes of `grid`.
    pub fn psi_eps(&self, eps: f64, grid: &GridSpec) -> Result<Vec<f64>> {
        check_aliasing(eps, grid)?;
        Ok(grid.xi_norms().iter().map(|&r| self.plateau.eval(eps * r)).collect())
    }

    /// `φ(x)` at an arbitrary point, by direct summation over the dual grid.
    pub fn phi_at(&self, x: &[f64]) -> f64 {
        let ax = self.grid.xi_axis();
        let norms = self.grid.xi_norms();
        let mut acc = 0.0;
        for (idx, &r) in norms.iter().enumerate() {
            if r >= 2.0 {
                continue;
            }
            let p = self.grid.xi_point(idx, &ax);
            let phase = x[0] * p[0] + if self.grid.dim == 2 { x[1] * p[1] } else { 0.0 };
            acc += self.psi[idx] * phase.cos();
        }
        acc * (self.grid.dxi() / (2.0 * std::f64::consts::PI)).powi(self.grid.dim as i32)
    }
}

/// The plateau shared by model windows (order 1.5).
pub fn window_plateau() -> &'static Plateau {
    static PLATEAU: std::sync::OnceLock<Plateau> = std::sync::OnceLock::new();
    PLATEAU.get_or_init(|| Plateau::new(1.5).expect("order 1.5 is admissible"))
}

/// Plateau window `w(x) = ψ(2|x - c|/R)`: 1 on `|x - c| <= R/2`, 0 on `|x - c| >= R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Window {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("window radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn at(center: f64, radius: f64) -> Result<Self> {
        Self::new(vec![center], radius)
    }

    pub fn eval(&self, plateau: &Plateau, x: &[f64]) -> f64 {
        let d2: f64 = self.center.iter().zip(x).map(|(c, v)| (v - c) * (v - c)).sum();
        plateau.eval(2.0 * d2.sqrt() / self.radius)
    }

    pub fn samples(&self, plateau: &Plateau, grid: &GridSpec) -> Result<Vec<f64>> {
        if self.center.len() != grid.dim {
            return Err(Error::Mismatch("window center dimension differs from grid".into()));
        }
        if self.center.iter().any(|c| c.abs() + self.radius > grid.half_width) {
            return Err(Error::OutsideBox(format!(
                "window at {:?} with radius {} leaves the grid",
                self.center, self.radius
            )));
        }
        Ok((0..grid.len()).map(|i| self.eval(plateau, &grid.point(i)[..grid.dim])).collect())
    }
}

/// Smallest `ε` for which `ψ(εξ)` vanishes before the Nyquist frequency.
pub fn min_admissible_eps(grid: &GridSpec) -> f64 {
    2.0 / grid.dual_range()
}

pub(crate) fn check_aliasing(eps: f64, grid: &GridSpec) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1], got {eps}")));
    }
    let min_eps = min_admissible_eps(grid);
    if eps < min_eps * (1.0 - 1e-12) {
        return Err(Error::Aliasing { eps, min_eps });
    }
    Ok(())
}

/// `φ_ε` on `grid`, as the inverse transform of `ξ ↦ ψ(εξ)`.
pub fn sample_phi_eps(m: &MollifierNet, eps: f64, grid: &GridSpec) -> Result<Vec<f64>> {
    let psi = m.psi_eps(eps, grid)?;
    Ok(fourier::inverse(grid, &fourier::to_complex(&psi)).iter().map(|v| v.re).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifierReport {
    pub sigma: f64,
    pub plateau_deviation: f64,
    pub support_leakage: f64,
    pub evenness_defect: f64,
    pub mass_defect: f64,
    pub phi0: f64,
    /// Fitted `c` in `|φ(x)| <= C exp(-N(|x|/c))` on `1 <= |x| <= L`.
    pub decay_c: Option<f64>,
    pub decay_log_constant: Option<f64>,
}

pub fn verify_mollifier(m: &MollifierNet) -> Result<MollifierReport> {
    let g = &m.grid;
    let dense = |lo: f64, hi: f64| (0..=20_000).map(move |i| lo + (hi - lo) * i as f64 / 20_000.0);
    let norms = g.xi_norms();
    let plateau_deviation = dense(0.0, 1.0)
        .map(|r| (m.plateau.eval(r) - 1.0).abs())
        .chain(norms.iter().zip(&m.psi).filter(|(r, _)| **r <= 1.0).map(|(_, v)| (v - 1.0).abs()))
        .fold(0.0, f64::max);
    let support_leakage = dense(2.0, 3.0)
        .map(|r| m.plateau.eval(r).abs())
        .chain(norms.iter().zip(&m.psi).filter(|(r, _)| **r >= 2.0).map(|(_, v)| v.abs()))
        .fold(0.0, f64::max);
    let evenness_defect = (0..g.len())
        .filter_map(|i| g.mirror(i).map(|k| (m.phi[i] - m.phi[k]).abs()))
        .fold(0.0, f64::max);
    let mass: f64 = m.phi.iter().sum::<f64>() * g.cell();
    let center = if g.dim == 1 { g.n / 2 } else { (g.n / 2) * g.n + g.n / 2 };
    let (decay_c, decay_log_constant) = match fit_decay(m)? {
        Some((c, lc)) => (Some(c), Some(lc)),
        None => (None, None),
    };
    Ok(MollifierReport {
        sigma: m.sigma,
        plateau_deviation,
        support_leakage,
        evenness_defect,
        mass_defect: (mass - 1.0).abs(),
        phi0: m.phi[center],
        decay_c,
        decay_log_constant,
    })
}

/// Fit `log env(x) ≈ log C - N(x/c)` on the monotone envelope of `|φ|` over `[1, L]`.
fn fit_decay(m: &MollifierNet) -> Result<Option<(f64, f64)>> {
    let g = &m.grid;
    if g.dim != 1 {
        return Ok(None);
    }
    let phi0 = m.phi[g.n / 2].abs();
    let floor = 1e-13 * phi0;
    let mut env = Vec::new();
    let mut running = 0.0f64;
    for j in (g.n / 2..g.n).rev() {
        running = running.max(m.phi[j].abs());
        let x = g.x(j);
        if x >= 1.0 && running > floor {
            env.push((x, running.ln()));
        }
    }
    if env.len() < 8 {
        return Ok(None);
    }
    let n_seq = WeightSequence::gevrey(m.sigma, 4096)?;
    let mut best: Option<(f64, f64, f64)> = None;
    for i in -48..=48 {
        let c = (i as f64 / 8.0).exp2();
        let mut resid = Vec::with_capacity(env.len());
        for &(x, le) in &env {
            match n_seq.assoc(x / c) {
                Ok(v) => resid.push(le + v),
                Err(_) => break,
            }
        }
        if resid.len() < env.len() {
            continue;
        }
        let hi = resid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = resid.iter().cloned().fold(f64::INFINITY, f64::min);
        // Only fits that actually bend the envelope count.
        let bends = n_seq.assoc(env[0].0 / c)? > 0.0;
        if bends && best.map_or(true, |b| hi - lo < b.2) {
            best = Some((c, hi, hi - lo));
        }
    }
    Ok(best.map(|(c, lc, _)| (c, lc)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifierManifest {
    pub sigma: f64,
    pub grid: GridSpec,
    pub phi_file: String,
    pub psi_file: String,
    pub phi_len: usize,
    pub psi_len: usize,
}

/// Write `manifest.json`, `phi.f64` and `psi.f64` (little-endian) into `dir`.
pub fn export_mollifier(m: &MollifierNet, dir: &Path) -> Result<MollifierManifest> {
    fs::create_dir_all(dir)?;
    let manifest = MollifierManifest {
        sigma: m.sigma,
        grid: m.grid,
        phi_file: "phi.f64".into(),
        psi_file: "psi.f64".into(),
        phi_len: m.phi.len(),
        psi_len: m.psi.len(),
    };
    io::write_atomic(&dir.join(&manifest.phi_file), &io::f64_le_bytes(&m.phi))?;
    io::write_atomic(&dir.join(&manifest.psi_file), &io::f64_le_bytes(&m.psi))?;
    io::write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}
