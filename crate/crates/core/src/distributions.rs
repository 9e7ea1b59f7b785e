//! Model distributions with exact Fourier data, and their regularizations `f * φ_ε`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{self, GridSpec};
use crate::growth::{Mode, Weight};
use crate::mollifier::{window_plateau, MollifierNet, Window};
use crate::nets::{EpsilonLadder, NetFunction};
use crate::weights::{WeightSequence, DEFAULT_P_MAX};

fn one() -> f64 {
    1.0
}

/// User-supplied transform samples, linearly interpolated and zero outside the range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralTable {
    pub xi: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SpectralTable {
    pub fn validate(&self) -> Result<()> {
        let n = self.xi.len();
        if n < 2 || self.re.len() != n || self.im.len() != n {
            return Err(Error::InvalidParameter("spectral table needs matching xi/re/im of length >= 2".into()));
        }
        if self.xi.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("spectral table xi must be strictly increasing".into()));
        }
        if self.xi.iter().chain(&self.re).chain(&self.im).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("spectral table must be finite".into()));
        }
        Ok(())
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        let n = self.xi.len();
        if xi < self.xi[0] || xi > self.xi[n - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let k = self.xi.partition_point(|&x| x <= xi).clamp(1, n - 1);
        let t = (xi - self.xi[k - 1]) / (self.xi[k] - self.xi[k - 1]);
        let lerp = |v: &[f64]| v[k - 1] + t * (v[k] - v[k - 1]);
        Complex64::new(lerp(&self.re), lerp(&self.im))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub dist: ModelDistribution,
}

/// The catalog of model distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelDistribution {
    Delta,
    DeltaPrime,
    Heaviside,
    PvInverse,
    /// `e^{-rate·x²}`.
    Gaussian {
        #[serde(default = "one")]
        rate: f64,
    },
    /// `e^{-rate·x²} sin(freq·x)`.
    GaussianTimesSine {
        freq: f64,
        #[serde(default = "one")]
        rate: f64,
    },
    /// `q(x)·w(x)` with `q(x) = Σ coeffs[k] x^k` and a plateau window `w`.
    Polynomial { coeffs: Vec<f64>, window: Window },
    Tensor2d {
        factor1: Box<ModelDistribution>,
        factor2: Box<ModelDistribution>,
    },
    Table(SpectralTable),
    Combination { terms: Vec<Term> },
}

/// Transform data of a model: a closed form or a marker for the spatial path.
pub enum SpectralData {
    Closed(Box<dyn Fn(&[f64]) -> Complex64 + Send + Sync>),
    Spatial,
}

impl std::fmt::Debug for SpectralData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectralData::Closed(_) => write!(f, "Closed(..)"),
            SpectralData::Spatial => write!(f, "Spatial"),
        }
    }
}

impl SpectralData {
    pub fn eval(&self, xi: &[f64]) -> Option<Complex64> {
        match self {
            SpectralData::Closed(f) => Some(f(xi)),
            SpectralData::Spatial => None,
        }
    }
}

impl ModelDistribution {
    pub fn gaussian() -> Self {
        Self::Gaussian { rate: 1.0 }
    }

    pub fn gaussian_times_sine(freq: f64) -> Self {
        Self::GaussianTimesSine { freq, rate: 1.0 }
    }

    pub fn zero_table() -> Self {
        Self::Table(SpectralTable { xi: vec![-1.0, 1.0], re: vec![0.0; 2], im: vec![0.0; 2] })
    }

    /// Catalog entries addressable by name on the command line.
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "delta" => Self::Delta,
            "delta_prime" => Self::DeltaPrime,
            "heaviside" => Self::Heaviside,
            "pv_inverse" => Self::PvInverse,
            "gaussian" => Self::gaussian(),
            "gaussian_times_sine" => Self::gaussian_times_sine(3.0),
            "zero" => Self::zero_table(),
            "tensor2d" => Self::Tensor2d { factor1: Box::new(Self::Heaviside), factor2: Box::new(Self::gaussian()) },
            other => return Err(Error::InvalidParameter(format!("unknown distribution '{other}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Delta => "delta",
            Self::DeltaPrime => "delta_prime",
            Self::Heaviside => "heaviside",
            Self::PvInverse => "pv_inverse",
            Self::Gaussian { .. } => "gaussian",
            Self::GaussianTimesSine { .. } => "gaussian_times_sine",
            Self::Polynomial { .. } => "polynomial",
            Self::Tensor2d { .. } => "tensor2d",
            Self::Table(_) => "table",
            Self::Combination { .. } => "combination",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Tensor2d { .. } => 2,
            Self::Combination { terms } => terms.first().map_or(1, |t| t.dist.dim()),
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Gaussian { rate } | Self::GaussianTimesSine { rate, .. } if !(*rate > 0.0) => {
                Err(Error::InvalidParameter(format!("gaussian rate must be positive, got {rate}")))
            }
            Self::Polynomial { window, .. } if window.center.len() != 1 => {
                Err(Error::InvalidParameter("polynomial window must be one-dimensional".into()))
            }
            Self::Tensor2d { factor1, factor2 } => {
                if factor1.dim() != 1 || factor2.dim() != 1 {
                    return Err(Error::InvalidParameter("tensor factors must be one-dimensional".into()));
                }
                factor1.validate()?;
                factor2.validate()
            }
            Self::Table(t) => t.validate(),
            Self::Combination { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidParameter("combination needs at least one term".into()));
                }
                let d = terms[0].dist.dim();
                for t in terms {
                    if t.dist.dim() != d {
                        return Err(Error::InvalidParameter("combination terms differ in dimension".into()));
                    }
                    t.dist.validate()?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Classical samples of the model, for kinds that are functions.
    pub fn sample(&self, grid: &GridSpec) -> Result<Vec<Complex64>> {
        if self.dim() != grid.dim {
            return Err(Error::Mismatch("model and grid dimensions differ".into()));
        }
        if let Self::Tensor2d { factor1, factor2 } = self {
            let ax = grid.axis();
            let a = ax.iter().map(|&x| factor1.value_1d(x)).collect::<Result<Vec<_>>>()?;
            let b = ax.iter().map(|&x| factor2.value_1d(x)).collect::<Result<Vec<_>>>()?;
            return Ok((0..grid.len()).map(|i| a[i / grid.n] * b[i % grid.n]).collect());
        }
        if let Self::Combination { terms } = self {
            let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
            for t in terms {
                let c = Complex64::new(t.re, t.im);
                for (a, v) in acc.iter_mut().zip(t.dist.sample(grid)?) {
                    *a += c * v;
                }
            }
            return Ok(acc);
        }
        grid.axis().iter().map(|&x| self.value_1d(x)).collect()
    }

    fn value_1d(&self, x: f64) -> Result<Complex64> {
        let re = match self {
            Self::Heaviside => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    0.0
                } else {
                    0.5
                }
            }
            Self::Gaussian { rate } => (-rate * x * x).exp(),
            Self::GaussianTimesSine { freq, rate } => (-rate * x * x).exp() * (freq * x).sin(),
            Self::Polynomial { coeffs, window } => {
                let q = coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
                q * window.eval(window_plateau(), &[x])
            }
            Self::Combination { terms } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in terms {
                    acc += Complex64::new(t.re, t.im) * t.dist.value_1d(x)?;
                }
                return Ok(acc);
            }
            other => {
                return Err(Error::Unsupported(format!("'{}' has no pointwise values", other.name())));
            }
        };
        Ok(Complex64::new(re, 0.0))
    }

    fn transform_1d(&self) -> Option<Box<dyn Fn(f64) -> Complex64 + Send + Sync>> {
        let i = Complex64::new(0.0, 1.0);
        Some(match self.clone() {
            Self::Delta => Box::new(|_| Complex64::new(1.0, 0.0)),
            Self::DeltaPrime => Box::new(move |xi| -i * xi),
            Self::PvInverse => Box::new(move |xi| {
                if xi == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    i * PI * xi.signum()
                }
            }),
            Self::Gaussian { rate } => Box::new(move |xi| Complex64::new(gaussian_hat(rate, xi), 0.0)),
            Self::GaussianTimesSine { freq, rate } => Box::new(move |xi| {
                (gaussian_hat(rate, xi + freq) - gaussian_hat(rate, xi - freq)) / (2.0 * i)
            }),
            Self::Table(t) => Box::new(move |xi| t.eval(xi)),
            Self::Polynomial { coeffs, window } => {
                let plateau = window_plateau();
                let (c, r) = (window.center[0], window.radius);
                let n = 4096;
                let h = 2.0 * r / n as f64;
                let nodes: Vec<(f64, f64)> = (0..n)
                    .map(|k| {
                        let x = c - r + k as f64 * h;
                        let q = coeffs.iter().rev().fold(0.0, |acc, a| acc * x + a);
                        (x, q * window.eval(plateau, &[x]) * h)
                    })
                    .collect();
                Box::new(move |xi| nodes.iter().map(|&(x, w)| Complex64::from_polar(w, x * xi)).sum())
            }
            Self::Combination { terms } => {
                let parts = terms
                    .iter()
                    .map(|t| t.dist.transform_1d().map(|f| (Complex64::new(t.re, t.im), f)))
                    .collect::<Option<Vec<_>>>()?;
                Box::new(move |xi| parts.iter().map(|(c, f)| c * f(xi)).sum())
            }
            Self::Heaviside | Self::Tensor2d { .. } => return None,
        })
    }
}

fn gaussian_hat(rate: f64, xi: f64) -> f64 {
    (PI / rate).sqrt() * (-xi * xi / (4.0 * rate)).exp()
}

/// `f̂` under `f̂(ξ) = ∫ f(x) e^{ixξ} dx`, or the spatial-path marker.
pub fn spectral_data(m: &ModelDistribution) -> SpectralData {
    if let ModelDistribution::Tensor2d { factor1, factor2 } = m {
        return match (factor1.transform_1d(), factor2.transform_1d()) {
            (Some(a), Some(b)) => SpectralData::Closed(Box::new(move |xi| a(xi[0]) * b(xi[1]))),
            _ => SpectralData::Spatial,
        };
    }
    match m.transform_1d() {
        Some(f) => SpectralData::Closed(Box::new(move |xi| f(xi[0]))),
        None => SpectralData::Spatial,
    }
}

/// The sequence paired with a mollifier of order `σ`: `gevrey(2σ - 1)`.
pub fn paired_weight(moll: &MollifierNet) -> Result<Weight> {
    Ok(Weight::Sequence(WeightSequence::gevrey(2.0 * moll.sigma - 1.0, DEFAULT_P_MAX)?))
}

/// The embedding on the catalog: frames `f * φ_ε` for every `ε` of the ladder.
pub fn regularize(m: &ModelDistribution, moll: &MollifierNet, ladder: &EpsilonLadder, grid: &GridSpec) -> Result<NetFunction> {
    m.validate()?;
    if m.dim() != grid.dim {
        return Err(Error::Mismatch(format!("{}-D model on a {}-D grid", m.dim(), grid.dim)));
    }
    ladder.check_grid(grid)?;
    let weight = paired_weight(moll)?;
    let frames = match m {
        ModelDistribution::Combination { terms } if matches!(spectral_data(m), SpectralData::Spatial) => {
            let mut acc: Option<NetFunction> = None;
            for t in terms {
                let part = regularize(&t.dist, moll, ladder, grid)?.scale(Complex64::new(t.re, t.im));
                acc = Some(match acc {
                    None => part,
                    Some(a) => a.add(&part)?,
                });
            }
            return Ok(acc.expect("non-empty combination"));
        }
        ModelDistribution::Heaviside => heaviside_frames(moll, ladder, grid, None)?,
        ModelDistribution::Tensor2d { factor1, factor2 } if matches!(spectral_data(m), SpectralData::Spatial) => {
            let (axis, other) = match (factor1.as_ref(), factor2.as_ref()) {
                (ModelDistribution::Heaviside, f) if f.transform_1d().is_some() => (0, f),
                (f, ModelDistribution::Heaviside) if f.transform_1d().is_some() => (1, f),
                _ => {
                    return Err(Error::Unsupported(
                        "tensor models support at most one heaviside factor".into(),
                    ))
                }
            };
            let t = other.transform_1d().expect("checked");
            heaviside_frames(moll, ladder, grid, Some((axis, &*t)))?
        }
        _ => {
            let data = spectral_data(m);
            let ax = grid.xi_axis();
            let fhat: Vec<Complex64> = (0..grid.len())
                .map(|idx| data.eval(&grid.xi_point(idx, &ax)).expect("closed form"))
                .collect();
            ladder
                .values()
                .iter()
                .map(|&eps| {
                    let psi = moll.psi_eps(eps, grid)?;
                    let prod: Vec<Complex64> = fhat.iter().zip(&psi).map(|(f, p)| f * p).collect();
                    Ok(fourier::inverse(grid, &prod))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    NetFunction::new(*ladder, *grid, frames, Mode::Beurling, weight)
}

/// `H * φ_ε` (1-D) or `(H ⊗ h) * φ_ε` with the Heaviside factor on `axis`.
///
/// Uses `sgn^ = 2i/ξ`; the periodic inverse of the multiplier with the `ξ_a = 0`
/// line removed equals `sgn * φ_ε - (x_a/L)·A`, where `A = (1 ⊗ h) * φ_ε`.
fn heaviside_frames(
    moll: &MollifierNet,
    ladder: &EpsilonLadder,
    grid: &GridSpec,
    factor: Option<(usize, &(dyn Fn(f64) -> Complex64 + Send + Sync))>,
) -> Result<Vec<Vec<Complex64>>> {
    let axis = factor.map_or(0, |f| f.0);
    let ax = grid.xi_axis();
    let i = Complex64::new(0.0, 1.0);
    let two_l = 2.0 * grid.half_width;
    let other_hat: Vec<Complex64> = match factor {
        Some((_, f)) => ax.iter().map(|&x| f(x)).collect(),
        None => vec![Complex64::new(1.0, 0.0); grid.n],
    };
    let mut frames = Vec::with_capacity(ladder.count);
    for eps in ladder.values() {
        let psi = moll.psi_eps(eps, grid)?;
        let mut line = vec![Complex64::new(0.0, 0.0); grid.len()];
        let mut saw = vec![Complex64::new(0.0, 0.0); grid.len()];
        for idx in 0..grid.len() {
            let m = grid.unflatten(idx);
            let h = if grid.dim == 2 { other_hat[m[1 - axis]] } else { Complex64::new(1.0, 0.0) };
            let xi_a = ax[m[axis]];
            if m[axis] == 0 {
                line[idx] = h * psi[idx] * two_l;
            } else if m[axis] != grid.n / 2 {
                saw[idx] = h * psi[idx] * 2.0 * i / xi_a;
            }
        }
        let a = fourier::inverse(grid, &line);
        let g = fourier::inverse(grid, &saw);
        let frame = (0..grid.len())
            .map(|idx| {
                let x_a = grid.point(idx)[axis];
                0.5 * a[idx] * (1.0 + x_a / grid.half_width) + 0.5 * g[idx]
            })
            .collect();
        frames.push(frame);
    }
    Ok(frames)
}

/// Where a component of a classical wave front set lives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Locus {
    Point { x: Vec<f64> },
    /// The hyperplane `x_axis = value`.
    Line { axis: usize, value: f64 },
}

impl Locus {
    /// Distance from `c` to the locus.
    pub fn distance(&self, c: &[f64]) -> f64 {
        match self {
            Locus::Point { x } => x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            Locus::Line { axis, value } => (c[*axis] - value).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Directions {
    All,
    Rays { rays: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WfComponent {
    pub locus: Locus,
    pub directions: Directions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WfOracle {
    pub dim: usize,
    pub components: Vec<WfComponent>,
}

/// Classical wave front sets of the catalog entries.
pub fn classical_wf_oracle(m: &ModelDistribution) -> Result<WfOracle> {
    use ModelDistribution as M;
    let origin = || Locus::Point { x: vec![0.0] };
    let components = match m {
        M::Delta | M::DeltaPrime | M::PvInverse => vec![WfComponent { locus: origin(), directions: Directions::All }],
        M::Heaviside => vec![WfComponent {
            locus: origin(),
            directions: Directions::Rays { rays: vec![vec![1.0], vec![-1.0]] },
        }],
        M::Gaussian { .. } | M::GaussianTimesSine { .. } | M::Polynomial { .. } => vec![],
        M::Tensor2d { factor1, factor2 } => {
            let a = classical_wf_oracle(factor1)?;
            let b = classical_wf_oracle(factor2)?;
            match (a.components.is_empty(), b.components.is_empty()) {
                (true, true) => vec![],
                (false, true) => lift(&a, 0)?,
                (true, false) => lift(&b, 1)?,
                (false, false) => {
                    return Err(Error::Unsupported("no oracle for two singular tensor factors".into()))
                }
            }
        }
        M::Combination { terms } => {
            let mut out = Vec::new();
            for t in terms {
                for c in classical_wf_oracle(&t.dist)?.components {
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
            out
        }
        M::Table(_) => return Err(Error::Unsupported("no oracle for user spectral tables".into())),
    };
    Ok(WfOracle { dim: m.dim(), components })
}

/// `WF(f) × (R, {0})` for a 1-D singular factor `f` placed on `axis`.
fn lift(factor: &WfOracle, axis: usize) -> Result<Vec<WfComponent>> {
    let mut out = Vec::new();
    for c in &factor.components {
        let Locus::Point { x } = &c.locus else {
            return Err(Error::Unsupported("nested tensor loci".into()));
        };
        let rays_1d = match &c.directions {
            Directions::All => vec![1.0, -1.0],
            Directions::Rays { rays } => rays.iter().map(|r| r[0]).collect(),
        };
        let rays = rays_1d
            .iter()
            .map(|&s| if axis == 0 { vec![s, 0.0] } else { vec![0.0, s] })
            .collect();
        out.push(WfComponent { locus: Locus::Line { axis, value: x[0] }, directions: Directions::Rays { rays } });
    }
    Ok(out)
}
