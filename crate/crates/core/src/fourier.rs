//! Periodic sampling grids and the discrete version of `f̂(ξ) = ∫ f(x) e^{ixξ} dx`.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform grid `x_j = -L + j Δx`, `Δx = 2L/n`, on each of `dim` axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub half_width: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, n: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidParameter(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("half width must be positive, got {half_width}")));
        }
        if n < 256 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("n must be a power of two >= 256, got {n}")));
        }
        Ok(Self { dim, half_width, n })
    }

    pub fn one_d(half_width: f64, n: usize) -> Result<Self> {
        Self::new(1, half_width, n)
    }

    pub fn two_d(half_width: f64, n: usize) -> Result<Self> {
        Self::new(2, half_width, n)
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Spacing of the dual grid, `π / L`.
    pub fn dxi(&self) -> f64 {
        PI / self.half_width
    }

    /// Nyquist frequency `π / Δx`.
    pub fn dual_range(&self) -> f64 {
        PI / self.dx()
    }

    /// Total number of samples, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume `Δx^dim`.
    pub fn cell(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Dual frequencies in FFT order.
    pub fn xi_axis(&self) -> Vec<f64> {
        let n = self.n as i64;
        (0..n)
            .map(|m| {
                let k = if m < n / 2 { m } else { m - n };
                k as f64 * self.dxi()
            })
            .collect()
    }

    /// Multi-index of a flat sample index (row-major, axis 0 slowest).
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.n, idx % self.n]
        }
    }

    /// Coordinates of a flat sample index.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let [i, j] = self.unflatten(idx);
        if self.dim == 1 {
            [self.x(i), 0.0]
        } else {
            [self.x(i), self.x(j)]
        }
    }

    /// Frequencies of a flat dual index.
    pub fn xi_point(&self, idx: usize, xi_axis: &[f64]) -> [f64; 2] {
        let [i, j] = self.unflatten(idx);
        if self.dim == 1 {
            [xi_axis[i], 0.0]
        } else {
            [xi_axis[i], xi_axis[j]]
        }
    }

    /// `|ξ|` at every dual node, in flat FFT order.
    pub fn xi_norms(&self) -> Vec<f64> {
        let ax = self.xi_axis();
        (0..self.len())
            .map(|idx| {
                let p = self.xi_point(idx, &ax);
                (p[0] * p[0] + p[1] * p[1]).sqrt()
            })
            .collect()
    }

    /// Flat indices of nodes on the outer boundary of the box.
    pub fn edge_indices(&self) -> Vec<usize> {
        let n = self.n;
        if self.dim == 1 {
            return vec![0, n - 1];
        }
        let mut out = Vec::with_capacity(4 * n);
        for k in 0..n {
            out.extend([k, (n - 1) * n + k, k * n, k * n + n - 1]);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Index of the mirrored node `x -> -x`, when it lies on the grid.
    pub fn mirror(&self, idx: usize) -> Option<usize> {
        let n = self.n;
        let [i, j] = self.unflatten(idx);
        let m = |k: usize| if k == 0 { None } else { Some(n - k) };
        if self.dim == 1 {
            m(i)
        } else {
            Some(m(i)? * n + m(j)?)
        }
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized FFT along every axis. `Forward` uses `e^{-2πi jm/n}`.
fn fft_all_axes(grid: &GridSpec, data: &mut [Complex64], dir: FftDirection) {
    let n = grid.n;
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft(n, dir));
    plan.process(data);
    if grid.dim == 2 {
        transpose(data, n);
        plan.process(data);
        transpose(data, n);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// `(-1)^(m_1 + m_2)`, the phase `e^{-iLξ}` at dual nodes.
fn alternating_sign(grid: &GridSpec, idx: usize) -> f64 {
    let [i, j] = grid.unflatten(idx);
    if (i + j) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Samples of `f̂` at the dual nodes (FFT order).
pub fn forward(grid: &GridSpec, f: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(f.len(), grid.len(), "sample count does not match grid");
    let mut buf = f.to_vec();
    fft_all_axes(grid, &mut buf, FftDirection::Inverse);
    let cell = grid.cell();
    for (idx, v) in buf.iter_mut().enumerate() {
        *v *= cell * alternating_sign(grid, idx);
    }
    buf
}

/// Spatial samples whose transform is `fhat` at the dual nodes.
pub fn inverse(grid: &GridSpec, fhat: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(fhat.len(), grid.len(), "sample count does not match grid");
    let mut buf: Vec<Complex64> =
        fhat.iter().enumerate().map(|(idx, v)| v * alternating_sign(grid, idx)).collect();
    fft_all_axes(grid, &mut buf, FftDirection::Forward);
    let scale = 1.0 / (grid.n as f64 * grid.dx()).powi(grid.dim as i32);
    for v in buf.iter_mut() {
        *v *= scale;
    }
    buf
}

/// Apply a Fourier multiplier given at the dual nodes.
pub fn apply_multiplier(grid: &GridSpec, f: &[Complex64], mult: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(mult.len(), grid.len(), "multiplier does not match grid");
    let mut buf = f.to_vec();
    fft_all_axes(grid, &mut buf, FftDirection::Inverse);
    for (v, m) in buf.iter_mut().zip(mult) {
        *v *= m;
    }
    fft_all_axes(grid, &mut buf, FftDirection::Forward);
    let scale = 1.0 / grid.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
    buf
}

/// Multiplier of `∂^α` (`partial = true`) or `D^α = (-i∂)^α` on the dual grid.
///
/// Odd orders vanish at the Nyquist node so that real inputs stay real.
pub fn derivative_multiplier(grid: &GridSpec, alpha: &[usize], partial: bool) -> Vec<Complex64> {
    let ax = grid.xi_axis();
    let n = grid.n;
    let unit = if partial { Complex64::new(0.0, -1.0) } else { Complex64::new(-1.0, 0.0) };
    (0..grid.len())
        .map(|idx| {
            let m = grid.unflatten(idx);
            let mut v = Complex64::new(1.0, 0.0);
            for (axis, &a) in alpha.iter().enumerate().take(grid.dim) {
                if a == 0 {
                    continue;
                }
                if a % 2 == 1 && m[axis] == n / 2 {
                    return Complex64::new(0.0, 0.0);
                }
                v *= (unit * ax[m[axis]]).powu(a as u32);
            }
            v
        })
        .collect()
}

pub(crate) fn to_complex(f: &[f64]) -> Vec<Complex64> {
    f.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// `∫|f|` over the grid by the rectangle rule.
pub fn l1_norm(grid: &GridSpec, f: &[Complex64]) -> f64 {
    f.iter().map(|v| v.norm()).sum::<f64>() * grid.cell()
}

pub fn sup_norm(f: &[Complex64]) -> f64 {
    f.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let g = GridSpec::one_d(20.0, 1024).unwrap();
        let f: Vec<Complex64> = g.axis().iter().map(|&x| Complex64::new((-x * x).exp(), 0.0)).collect();
        let fh = forward(&g, &f);
        for (m, xi) in g.xi_axis().iter().enumerate() {
            let exact = PI.sqrt() * (-xi * xi / 4.0).exp();
            assert!((fh[m] - exact).norm() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn shifted_gaussian_picks_up_phase() {
        // f(x) = g(x - 1) has transform e^{iξ} ĝ(ξ).
        let g = GridSpec::one_d(20.0, 1024).unwrap();
        let f: Vec<Complex64> = g.axis().iter().map(|&x| Complex64::new((-(x - 1.0) * (x - 1.0)).exp(), 0.0)).collect();
        let fh = forward(&g, &f);
        for (m, &xi) in g.xi_axis().iter().enumerate().take(40) {
            let exact = Complex64::from_polar(PI.sqrt() * (-xi * xi / 4.0).exp(), xi);
            assert!((fh[m] - exact).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_two_d() {
        let g = GridSpec::two_d(6.0, 256).unwrap();
        let f: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let p = g.point(i);
                Complex64::new((-(p[0] * p[0] + 2.0 * p[1] * p[1])).exp(), 0.1 * p[0])
            })
            .collect();
        let back = inverse(&g, &forward(&g, &f));
        let err = f.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn mirror_and_edges() {
        let g = GridSpec::one_d(1.0, 256).unwrap();
        assert_eq!(g.mirror(0), None);
        assert_eq!(g.mirror(128), Some(128));
        assert!((g.x(g.mirror(3).unwrap()) + g.x(3)).abs() < 1e-15);
        let g2 = GridSpec::two_d(1.0, 256).unwrap();
        assert_eq!(g2.edge_indices().len(), 4 * 256 - 4);
    }
}
