//! Weight sequences `M_p` (stored as `log M_p`) and weight functions `ω`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_P_MAX: usize = 256;

/// Serializable description of a weight sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    Gevrey {
        s: f64,
        #[serde(default = "default_p_max")]
        p_max: usize,
    },
    Custom {
        log_m: Vec<f64>,
    },
}

fn default_p_max() -> usize {
    DEFAULT_P_MAX
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceKind {
    Gevrey { s: f64 },
    Custom,
}

/// A weight sequence in log scale: `log_m[p] = log M_p` for `p = 0..=p_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightSpec", into = "WeightSpec")]
pub struct WeightSequence {
    kind: SequenceKind,
    log_m: Vec<f64>,
    // increments[p - 1] = log M_p - log M_{p-1}
    increments: Vec<f64>,
    log_convex: bool,
}

impl WeightSequence {
    /// `M_p = (p!)^s`, accumulated as a sum of logarithms.
    pub fn gevrey(s: f64, p_max: usize) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParameter(format!("gevrey order must be positive, got {s}")));
        }
        if p_max < 64 {
            return Err(Error::InvalidParameter(format!("p_max must be at least 64, got {p_max}")));
        }
        let mut log_m = Vec::with_capacity(p_max + 1);
        let mut acc = 0.0;
        log_m.push(0.0);
        for p in 1..=p_max {
            acc += (p as f64).ln();
            log_m.push(s * acc);
        }
        let mut seq = Self::build(SequenceKind::Gevrey { s }, log_m);
        seq.log_convex = true;
        Ok(seq)
    }

    /// A custom table of `log M_p`. The table must start with `log M_0 = 0`.
    pub fn custom(log_m: Vec<f64>) -> Result<Self> {
        if log_m.len() < 65 {
            return Err(Error::InvalidParameter(format!(
                "custom table needs p_max >= 64, got {} entries",
                log_m.len()
            )));
        }
        if log_m[0] != 0.0 {
            return Err(Error::InvalidParameter("custom table must have log_m[0] = 0".into()));
        }
        if log_m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("custom table contains non-finite entries".into()));
        }
        Ok(Self::build(SequenceKind::Custom, log_m))
    }

    fn build(kind: SequenceKind, log_m: Vec<f64>) -> Self {
        let increments: Vec<f64> = log_m.windows(2).map(|w| w[1] - w[0]).collect();
        let log_convex = increments.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0));
        Self { kind, log_m, increments, log_convex }
    }

    pub fn from_spec(spec: &WeightSpec) -> Result<Self> {
        match spec {
            WeightSpec::Gevrey { s, p_max } => Self::gevrey(*s, *p_max),
            WeightSpec::Custom { log_m } => Self::custom(log_m.clone()),
        }
    }

    pub fn spec(&self) -> WeightSpec {
        match self.kind {
            SequenceKind::Gevrey { s } => WeightSpec::Gevrey { s, p_max: self.p_max() },
            SequenceKind::Custom => WeightSpec::Custom { log_m: self.log_m.clone() },
        }
    }

    /// Same sequence with a different truncation index.
    pub fn with_p_max(&self, p_max: usize) -> Result<Self> {
        match self.kind {
            SequenceKind::Gevrey { s } => Self::gevrey(s, p_max),
            SequenceKind::Custom => {
                if p_max > self.p_max() {
                    return Err(Error::InvalidParameter(
                        "cannot extend a custom table beyond its length".into(),
                    ));
                }
                Self::custom(self.log_m[..=p_max].to_vec())
            }
        }
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn p_max(&self) -> usize {
        self.log_m.len() - 1
    }

    pub fn log_m(&self) -> &[f64] {
        &self.log_m
    }

    pub fn is_log_convex(&self) -> bool {
        self.log_convex
    }

    /// `M_1`, the right end of the flat region of the associated function.
    pub fn m1(&self) -> f64 {
        self.log_m[1].exp()
    }

    /// Largest `t` for which the maximizer stays below `p_max`.
    pub fn t_saturation(&self) -> f64 {
        self.increments[self.increments.len() - 1].exp()
    }

    fn saturation(&self) -> Error {
        Error::Saturation { p_max: self.p_max(), t_max: self.t_saturation() }
    }

    /// Index of the maximizer of `p log t - log M_p`.
    fn maximizer(&self, log_t: f64) -> Result<usize> {
        let p = if self.log_convex {
            self.increments.partition_point(|&d| d <= log_t)
        } else {
            let mut best = (0usize, 0.0f64);
            for (p, &lm) in self.log_m.iter().enumerate().skip(1) {
                let v = p as f64 * log_t - lm;
                if v > best.1 {
                    best = (p, v);
                }
            }
            best.0
        };
        if p >= self.p_max() {
            return Err(self.saturation());
        }
        Ok(p)
    }

    /// The associated function `M(t) = sup_p log(t^p / M_p)`.
    pub fn assoc(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("assoc needs t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        if t.is_infinite() {
            return Err(self.saturation());
        }
        let log_t = t.ln();
        let p = self.maximizer(log_t)?;
        Ok((p as f64 * log_t - self.log_m[p]).max(0.0))
    }

    /// `M(e^u)`, convenient when the argument is already a logarithm.
    pub fn assoc_log(&self, log_t: f64) -> Result<f64> {
        if log_t == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let p = self.maximizer(log_t)?;
        Ok((p as f64 * log_t - self.log_m[p]).max(0.0))
    }

    /// `max_{p <= p_max} (p log t - log M_p)` without the saturation check.
    /// Equals `assoc` below `t_saturation` and is only a lower bound for `M` beyond it.
    pub fn assoc_truncated(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || t.is_infinite() {
            return Err(Error::InvalidParameter(format!("assoc_truncated needs finite t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let log_t = t.ln();
        let p = match self.maximizer(log_t) {
            Ok(p) => p,
            Err(Error::Saturation { .. }) if self.log_convex => self.p_max(),
            Err(e) => return Err(e),
        };
        Ok((p as f64 * log_t - self.log_m[p]).max(0.0))
    }

    /// Smallest `t` with `M(t) = y`; `y = 0` returns `M_1`.
    pub fn assoc_inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::InvalidParameter(format!("assoc_inverse needs y >= 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(self.m1());
        }
        let p_max = self.p_max();
        if !self.log_convex {
            return self.assoc_inverse_bisect(y);
        }
        // M on [exp(d_p), exp(d_{p+1})] equals p log t - log M_p.
        let node_value = |p: usize| p as f64 * self.increments[p - 1] - self.log_m[p];
        let top = node_value(p_max);
        if y >= top {
            return Err(self.saturation());
        }
        // Smallest q >= 1 with node_value(q) >= y, then invert on segment q - 1.
        let (mut lo, mut hi) = (1usize, p_max);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if node_value(mid) >= y {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let p = (lo - 1).max(1);
        Ok(((y + self.log_m[p]) / p as f64).exp())
    }

    fn assoc_inverse_bisect(&self, y: f64) -> Result<f64> {
        let hi_t = self.t_saturation();
        if self.assoc(hi_t * (1.0 - 1e-12))? < y {
            return Err(self.saturation());
        }
        let (mut lo, mut hi) = (self.m1().ln(), hi_t.ln());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.assoc_log(mid)? >= y {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi.exp())
    }
}

impl TryFrom<WeightSpec> for WeightSequence {
    type Error = Error;

    fn try_from(spec: WeightSpec) -> Result<Self> {
        Self::from_spec(&spec)
    }
}

impl From<WeightSequence> for WeightSpec {
    fn from(seq: WeightSequence) -> Self {
        seq.spec()
    }
}

/// Result of checking (M.1), (M.2) and (M.3)′ on a truncated sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub m1_ok: bool,
    pub m2_ok: bool,
    /// `(A, H)` for (M.2); `None` when not certified.
    pub m2_constants: Option<(f64, f64)>,
    pub m3prime_partial_sum: f64,
    pub m3prime_converges: bool,
    /// Fitted decay exponent of the terms `M_{p-1}/M_p` over the tail.
    pub m3prime_tail_exponent: f64,
    /// The (M.3)′ verdict is a finite-data heuristic.
    pub heuristic: bool,
}

/// Grid of candidate `H` values: `2^(i/4)`.
const H_GRID_STEPS_PER_OCTAVE: f64 = 4.0;
const H_GRID_MAX_LOG2: f64 = 20.0;
const M3_TAIL_MARGIN: f64 = 0.05;

pub fn check_conditions(seq: &WeightSequence) -> ConditionReport {
    let m1_ok = seq.is_log_convex();
    if !m1_ok {
        return ConditionReport {
            m1_ok,
            m2_ok: false,
            m2_constants: None,
            m3prime_partial_sum: f64::NAN,
            m3prime_converges: false,
            m3prime_tail_exponent: f64::NAN,
            heuristic: true,
        };
    }
    let lm = seq.log_m();
    let p_max = seq.p_max();

    // A = 1 from the p = q = 0 case. Then (M.2) holds with H iff
    // log M_n - log M_p - log M_{n-p} <= n log H for all 0 <= p <= n <= p_max.
    let mut needed_log_h = 0.0f64;
    for n in 1..=p_max {
        let mut worst = f64::NEG_INFINITY;
        for p in 0..=n / 2 {
            worst = worst.max(lm[n] - lm[p] - lm[n - p]);
        }
        needed_log_h = needed_log_h.max(worst / n as f64);
    }
    let mut h = None;
    let mut i = 0.0;
    while i / H_GRID_STEPS_PER_OCTAVE <= H_GRID_MAX_LOG2 {
        let cand = (i / H_GRID_STEPS_PER_OCTAVE).exp2();
        if needed_log_h <= cand.ln() + 1e-12 {
            h = Some(cand);
            break;
        }
        i += 1.0;
    }

    let terms: Vec<f64> = (1..=p_max).map(|p| (lm[p - 1] - lm[p]).exp()).collect();
    let partial: f64 = terms.iter().sum();
    let start = p_max / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        (start..=p_max).map(|p| ((p as f64).ln(), terms[p - 1].ln())).unzip();
    let slope = least_squares_slope(&xs, &ys);
    let tail_decreasing = terms[start - 1..].windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    ConditionReport {
        m1_ok,
        m2_ok: h.is_some(),
        m2_constants: h.map(|h| (1.0, h)),
        m3prime_partial_sum: partial,
        m3prime_converges: tail_decreasing && slope < -(1.0 + M3_TAIL_MARGIN),
        m3prime_tail_exponent: slope,
        heuristic: true,
    }
}

/// `2 M(t) <= M(H t) + log A` on every grid point.
pub fn check_assoc_m2(seq: &WeightSequence, a: f64, h: f64, t_grid: &[f64]) -> Result<bool> {
    let log_a = a.ln();
    for &t in t_grid {
        if 2.0 * seq.assoc(t)? > seq.assoc(h * t)? + log_a + 1e-6 {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Validation of `2 M(t) <= N(l t) + C` for a Gevrey pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub s: f64,
    pub sigma: f64,
    pub t_max: f64,
    /// `(l, C_l)` with `C_l = max_t (2 M(t) - N(l t))^+` on the grid.
    pub constants: Vec<(f64, f64)>,
    /// Growth exponents `1/s` and `1/sigma`; the second dominates.
    pub exponents: (f64, f64),
    pub valid: bool,
}

/// `M = gevrey(s)` and `N = gevrey((1 + s) / 2)`, with the domination check.
pub fn gevrey_pair(s: f64) -> Result<(WeightSequence, WeightSequence, PairReport)> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gevrey pair needs s > 1 (non-quasianalytic), got {s}"
        )));
    }
    let sigma = 0.5 * (1.0 + s);
    let m = WeightSequence::gevrey(s, DEFAULT_P_MAX)?;
    let n = WeightSequence::gevrey(sigma, DEFAULT_P_MAX)?;

    let t_max: f64 = 1e6;
    let headroom = |order: f64| ((t_max.powf(1.0 / order) * 1.25) as usize + 64).max(DEFAULT_P_MAX);
    let m_big = WeightSequence::gevrey(s, headroom(s))?;
    let n_big = WeightSequence::gevrey(sigma, headroom(sigma))?;
    let mut grid = log_grid(1e-2, t_max, 400);
    grid.insert(0, 0.0);
    let mut constants = Vec::new();
    let mut valid = true;
    for l in [1.0, 0.5, 0.1] {
        let mut c = 0.0f64;
        for &t in &grid {
            c = c.max(2.0 * m_big.assoc(t)? - n_big.assoc(l * t)?);
        }
        valid &= c.is_finite();
        constants.push((l, c));
    }
    let exponents = (1.0 / s, 1.0 / sigma);
    valid &= exponents.1 > exponents.0;
    Ok((m, n, PairReport { s, sigma, t_max, constants, exponents, valid }))
}

/// Serializable description of a weight function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OmegaKind {
    LogOnePlusT,
    Power { a: f64 },
    /// Monotone table, linear interpolation; extrapolated along the last segment.
    Custom { t: Vec<f64>, w: Vec<f64> },
}

/// A weight function `ω`, with the (γ) constants fitted at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    pub kind: OmegaKind,
    /// `(a, b)` with `ω(t) >= b log(1 + t) + a`.
    pub gamma_constants: (f64, f64),
}

impl WeightFunction {
    pub fn new(kind: OmegaKind) -> Result<Self> {
        match &kind {
            OmegaKind::LogOnePlusT => {}
            OmegaKind::Power { a } => {
                if !(*a > 0.0 && *a <= 1.0) {
                    return Err(Error::InvalidParameter(format!("power weight needs a in (0, 1], got {a}")));
                }
            }
            OmegaKind::Custom { t, w } => {
                if t.len() < 2 || t.len() != w.len() {
                    return Err(Error::InvalidParameter("custom weight table needs matching t/w of length >= 2".into()));
                }
                if t[0] != 0.0 || w[0] != 0.0 {
                    return Err(Error::InvalidParameter("custom weight table must start at (0, 0)".into()));
                }
                if t.windows(2).any(|p| p[1] <= p[0]) || w.windows(2).any(|p| p[1] < p[0]) {
                    return Err(Error::InvalidParameter("custom weight table must be increasing in t and non-decreasing in w".into()));
                }
            }
        }
        let mut wf = Self { kind, gamma_constants: (0.0, 1.0) };
        wf.gamma_constants = fit_gamma(&wf, &default_omega_grid());
        Ok(wf)
    }

    pub fn log_one_plus_t() -> Self {
        Self::new(OmegaKind::LogOnePlusT).expect("valid weight")
    }

    pub fn power(a: f64) -> Result<Self> {
        Self::new(OmegaKind::Power { a })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        match &self.kind {
            OmegaKind::LogOnePlusT => t.ln_1p(),
            OmegaKind::Power { a } => t.powf(*a),
            OmegaKind::Custom { t: ts, w } => {
                let k = ts.partition_point(|&x| x <= t).clamp(1, ts.len() - 1);
                let (t0, t1, w0, w1) = (ts[k - 1], ts[k], w[k - 1], w[k]);
                w0 + (w1 - w0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// `Λ = (d + 1) / b`.
    pub fn lambda_shift(&self, dim: usize) -> f64 {
        (dim as f64 + 1.0) / self.gamma_constants.1
    }
}

fn fit_gamma(w: &WeightFunction, grid: &[f64]) -> (f64, f64) {
    let b = grid
        .iter()
        .filter(|&&t| t >= 1.0)
        .map(|&t| w.eval(t) / t.ln_1p())
        .fold(f64::INFINITY, f64::min)
        .min(1.0);
    let a = grid.iter().map(|&t| w.eval(t) - b * t.ln_1p()).fold(0.0, f64::min);
    (a, b)
}

/// Default test grid for weight functions: 0 plus log-spaced points up to 1e6.
pub fn default_omega_grid() -> Vec<f64> {
    let mut g = log_grid(1e-3, 1e6, 181);
    g.insert(0, 0.0);
    g
}

/// Diagnostics for the conditions (α), (β), (γ), (γ₀) of a weight function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub t_max: f64,
    pub subadditivity_violations: usize,
    pub max_subadditivity_excess: f64,
    pub alpha_ok: bool,
    pub beta_integral: f64,
    pub beta_tail_estimate: f64,
    pub beta_local_exponent: f64,
    pub beta_ok: bool,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_ok: bool,
    pub gamma0_ratio: f64,
    pub gamma0_ok: bool,
}

pub fn omega_check(w: &WeightFunction, t_grid: &[f64]) -> Result<OmegaReport> {
    let t_max = t_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let t_min = t_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    if t_min > 0.0 || t_max < 1e4 {
        return Err(Error::InvalidParameter(format!(
            "weight-function grid must cover [0, T] with T >= 1e4, got [{t_min}, {t_max}]"
        )));
    }

    // (α) on all pairs of a thinned grid.
    let stride = (t_grid.len() / 200).max(1);
    let pts: Vec<f64> = t_grid.iter().step_by(stride).cloned().collect();
    let mut violations = 0;
    let mut excess = 0.0f64;
    for &t1 in &pts {
        for &t2 in &pts {
            let d = w.eval(t1 + t2) - w.eval(t1) - w.eval(t2);
            if d > 1e-12 * (1.0 + w.eval(t1 + t2)) {
                violations += 1;
                excess = excess.max(d);
            }
        }
    }

    // (β): ∫_1^T ω(t)/t² dt = ∫_0^{log T} ω(e^u) e^{-u} du, composite Simpson.
    let umax = t_max.ln();
    let panels = 20_000usize;
    let hstep = umax / panels as f64;
    let f = |u: f64| w.eval(u.exp()) * (-u).exp();
    let mut integral = f(0.0) + f(umax);
    for i in 1..panels {
        integral += f(i as f64 * hstep) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    integral *= hstep / 3.0;
    let (t_a, t_b) = (t_max / 2.0, t_max);
    let local_exp = (w.eval(t_b) / w.eval(t_a)).ln() / (t_b / t_a).ln();
    let beta_ok = local_exp < 1.0 - 0.02;
    let tail = if beta_ok { w.eval(t_max) / ((1.0 - local_exp) * t_max) } else { f64::INFINITY };

    let (a, b) = fit_gamma(w, t_grid);
    let ratio = |t: f64| w.eval(t) / t.ln_1p();
    let gamma0_ratio = ratio(t_max);
    let gamma0_ok = gamma0_ratio >= 2.0 * ratio(t_max.sqrt());

    Ok(OmegaReport {
        t_max,
        subadditivity_violations: violations,
        max_subadditivity_excess: excess,
        alpha_ok: violations == 0,
        beta_integral: integral,
        beta_tail_estimate: tail,
        beta_local_exponent: local_exp,
        beta_ok,
        gamma_a: a,
        gamma_b: b,
        gamma_ok: b > 0.0,
        gamma0_ratio,
        gamma0_ok,
    })
}
