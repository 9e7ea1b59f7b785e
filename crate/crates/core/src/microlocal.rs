//! Cone-restricted decay of windowed frames: `Σ_g`, generalized wave front sets
//! and their comparison with classical oracles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::distributions::{classical_wf_oracle, Directions, ModelDistribution};
use crate::error::{Error, Result};
use crate::estimators::{certify_decay, decay_lhs, frame_transforms, regularity_test, DecayTable, Regularity};
use crate::fourier::GridSpec;
use crate::growth::{Mode, Weight};
use crate::mollifier::{window_plateau, Plateau, Window};
use crate::nets::NetFunction;

/// Frequencies below this norm are excluded from cone sups.
pub const LOW_FREQUENCY_CUTOFF: f64 = 2.0;

/// Minimum number of dual nodes a cone must contain.
pub const MIN_CONE_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConePartition {
    pub dim: usize,
    /// Unit axis of each cone.
    pub axes: Vec<Vec<f64>>,
    /// Half-angle of every cone (2-D only; 1-D rays are exact half-lines).
    pub half_angle: f64,
}

impl ConePartition {
    /// The rays `{+, -}`.
    pub fn one_d() -> Self {
        Self { dim: 1, axes: vec![vec![1.0], vec![-1.0]], half_angle: 0.0 }
    }

    /// `n_cones` sectors around the axes `θ_c = 2πc/n` with half-angle `(1 + overlap)·π/n`.
    pub fn two_d(n_cones: usize, overlap: f64) -> Result<Self> {
        if n_cones < 3 {
            return Err(Error::InvalidParameter(format!("need at least 3 cones, got {n_cones}")));
        }
        if !(0.0..1.0).contains(&overlap) {
            return Err(Error::InvalidParameter(format!("overlap must lie in [0, 1), got {overlap}")));
        }
        let axes = (0..n_cones)
            .map(|c| {
                let t = 2.0 * PI * c as f64 / n_cones as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        Ok(Self { dim: 2, axes, half_angle: (1.0 + overlap) * PI / n_cones as f64 })
    }

    /// Two rays in 1-D, eight cones with overlap 0.25 in 2-D.
    pub fn default_for(dim: usize) -> Self {
        if dim == 1 {
            Self::one_d()
        } else {
            Self::two_d(8, 0.25).expect("valid defaults")
        }
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    /// Whether the nonzero direction `xi` lies in cone `c`.
    pub fn contains(&self, c: usize, xi: &[f64]) -> bool {
        let axis = &self.axes[c];
        if self.dim == 1 {
            return xi[0] * axis[0] > 0.0;
        }
        let norm = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        if norm == 0.0 {
            return false;
        }
        let cos = ((xi[0] * axis[0] + xi[1] * axis[1]) / norm).clamp(-1.0, 1.0);
        cos.acos() <= self.half_angle + 1e-12
    }

    /// Dual nodes of cone `c` with `|ξ| >= LOW_FREQUENCY_CUTOFF`.
    pub fn mask(&self, c: usize, grid: &GridSpec) -> Result<Vec<bool>> {
        if grid.dim != self.dim {
            return Err(Error::Mismatch("cone partition and grid dimensions differ".into()));
        }
        let ax = grid.xi_axis();
        let norms = grid.xi_norms();
        let mask: Vec<bool> = (0..grid.len())
            .map(|i| norms[i] >= LOW_FREQUENCY_CUTOFF && self.contains(c, &grid.xi_point(i, &ax)[..grid.dim]))
            .collect();
        let count = mask.iter().filter(|&&b| b).count();
        if count < MIN_CONE_NODES {
            return Err(Error::Resolution(format!("cone {c} holds {count} dual nodes, need {MIN_CONE_NODES}")));
        }
        Ok(mask)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WfVerdict {
    Regular,
    Singular,
    Inconclusive,
}

impl From<Regularity> for WfVerdict {
    fn from(r: Regularity) -> Self {
        match r {
            Regularity::Regular => WfVerdict::Regular,
            Regularity::NotRegular => WfVerdict::Singular,
            Regularity::Inconclusive => WfVerdict::Inconclusive,
        }
    }
}

impl WfVerdict {
    pub fn code(self) -> i8 {
        match self {
            WfVerdict::Regular => 0,
            WfVerdict::Singular => 1,
            WfVerdict::Inconclusive => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeVerdict {
    pub cone: usize,
    pub verdict: WfVerdict,
    /// `(k, h)` witnessing regularity.
    pub fitted: Option<(f64, f64)>,
    pub spread: f64,
    pub thresholds: Vec<(f64, Option<f64>)>,
    /// `max_{ξ ∈ Γ} log|f̂_ε(ξ)| + M(|ξ|/h)` at the smallest grid `h`, per frame.
    pub residual: Vec<f64>,
}

fn require_localized(a: &NetFunction) -> Result<()> {
    let r = a.edge_ratio();
    if r > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "frames are not localized (boundary mass ratio {r:e}); window them first"
        )));
    }
    Ok(())
}

fn sequence(a: &NetFunction) -> Result<&crate::weights::WeightSequence> {
    match &a.weight {
        Weight::Sequence(m) => Ok(m),
        Weight::Function(_) => Err(Error::Unsupported("wave front estimation needs a weight sequence".into())),
    }
}

/// Per-cone decay verdicts of windowed frames.
pub fn sigma_g(a: &NetFunction, cones: &ConePartition, mode: Mode) -> Result<Vec<ConeVerdict>> {
    let ctx = ConeContext::new(a, cones)?;
    ctx.run(a, mode)
}

/// Cone masks and the decay table, shared across windows on one grid.
struct ConeContext {
    masks: Vec<Vec<bool>>,
    table: DecayTable,
    m: crate::weights::WeightSequence,
}

impl ConeContext {
    fn new(a: &NetFunction, cones: &ConePartition) -> Result<Self> {
        let masks = (0..cones.len()).map(|c| cones.mask(c, &a.grid)).collect::<Result<Vec<_>>>()?;
        let (table, m) = DecayTable::new(&a.grid, sequence(a)?)?;
        Ok(Self { masks, table, m })
    }

    fn run(&self, a: &NetFunction, mode: Mode) -> Result<Vec<ConeVerdict>> {
        require_localized(a)?;
        let transforms = frame_transforms(a);
        decay_lhs(&transforms, &self.table, Some(&self.masks))
            .into_iter()
            .enumerate()
            .map(|(c, lhs)| {
                let cert = certify_decay(a, lhs, &self.table, &self.m, mode)?;
                Ok(ConeVerdict {
                    cone: c,
                    verdict: cert.verdict.into(),
                    fitted: cert.witness,
                    spread: cert.spread,
                    thresholds: cert.thresholds,
                    residual: cert.lhs[0].clone(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowResult {
    pub center: Vec<f64>,
    pub radius: f64,
    pub cones: Vec<ConeVerdict>,
}

impl WindowResult {
    pub fn is_singular(&self) -> bool {
        self.cones.iter().any(|c| c.verdict != WfVerdict::Regular)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFrontReport {
    pub mode: Mode,
    pub partition: ConePartition,
    pub windows: Vec<WindowResult>,
}

impl WaveFrontReport {
    /// `(center, cone)` pairs flagged singular.
    pub fn singular_set(&self) -> Vec<(Vec<f64>, usize)> {
        self.windows
            .iter()
            .flat_map(|w| {
                w.cones
                    .iter()
                    .filter(|c| c.verdict == WfVerdict::Singular)
                    .map(move |c| (w.center.clone(), c.cone))
            })
            .collect()
    }
}

/// Multiply by the plateau window at `center`, then run [`sigma_g`].
pub fn wavefront(
    a: &NetFunction,
    centers: &[Vec<f64>],
    radius: f64,
    cones: &ConePartition,
    mode: Mode,
) -> Result<WaveFrontReport> {
    wavefront_with(a, centers, radius, cones, mode, window_plateau())
}

pub fn wavefront_with(
    a: &NetFunction,
    centers: &[Vec<f64>],
    radius: f64,
    cones: &ConePartition,
    mode: Mode,
    plateau: &Plateau,
) -> Result<WaveFrontReport> {
    let ctx = ConeContext::new(a, cones)?;
    let windows = centers
        .iter()
        .map(|c| {
            let w = Window::new(c.clone(), radius)?.samples(plateau, &a.grid)?;
            let local = a.multiply_by(&w)?;
            Ok(WindowResult { center: c.clone(), radius, cones: ctx.run(&local, mode)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WaveFrontReport { mode, partition: cones.clone(), windows })
}

/// Per center, whether the windowed net fails the regularity test.
pub fn singular_support(a: &NetFunction, centers: &[Vec<f64>], radius: f64, mode: Mode) -> Result<Vec<bool>> {
    centers
        .iter()
        .map(|c| {
            let w = Window::new(c.clone(), radius)?.samples(window_plateau(), &a.grid)?;
            Ok(regularity_test(&a.multiply_by(&w)?, mode)?.verdict != Regularity::Regular)
        })
        .collect()
}

/// One disagreement between a report and the classical oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WfMismatch {
    pub center: Vec<f64>,
    pub cone: usize,
    pub expected_singular: bool,
    pub verdict: WfVerdict,
}

fn cone_meets(partition: &ConePartition, c: usize, dirs: &Directions) -> bool {
    match dirs {
        Directions::All => true,
        Directions::Rays { rays } => rays.iter().any(|r| partition.contains(c, r)),
    }
}

/// Every `(window, cone)` cell whose verdict disagrees with the oracle.
///
/// A cell is expected singular when an oracle locus lies within one radius of the
/// center and the cone meets the oracle directions. Inconclusive cells always disagree.
pub fn wf_mismatches(m: &ModelDistribution, report: &WaveFrontReport) -> Result<Vec<WfMismatch>> {
    let oracle = classical_wf_oracle(m)?;
    let mut out = Vec::new();
    for w in &report.windows {
        for c in &w.cones {
            let expected = oracle
                .components
                .iter()
                .any(|comp| comp.locus.distance(&w.center) <= w.radius && cone_meets(&report.partition, c.cone, &comp.directions));
            let ok = match c.verdict {
                WfVerdict::Singular => expected,
                WfVerdict::Regular => !expected,
                WfVerdict::Inconclusive => false,
            };
            if !ok {
                out.push(WfMismatch { center: w.center.clone(), cone: c.cone, expected_singular: expected, verdict: c.verdict });
            }
        }
    }
    Ok(out)
}

/// Whether the report reproduces the classical wave front set of `m` up to window granularity.
pub fn wf_compare(m: &ModelDistribution, report: &WaveFrontReport) -> Result<bool> {
    Ok(wf_mismatches(m, report)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cones_cover_the_plane() {
        let p = ConePartition::two_d(8, 0.25).unwrap();
        for k in 0..360 {
            let t = (k as f64).to_radians();
            let xi = [t.cos(), t.sin()];
            assert!((0..p.len()).any(|c| p.contains(c, &xi)));
        }
        assert!(p.contains(0, &[1.0, 0.0]) && !p.contains(1, &[1.0, 0.0]));
        let r = ConePartition::one_d();
        assert!(r.contains(0, &[3.0]) && r.contains(1, &[-0.5]) && !r.contains(0, &[0.0]));
    }
}
