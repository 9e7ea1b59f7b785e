use gevrey_nets::bb::{classify_net_bb, colombeau_crosscheck, norm_equivalence_check, LAMBDA_GRID};
use gevrey_nets::distributions::{regularize, ModelDistribution};
use gevrey_nets::estimators::{classify_net, regularity_test, Region, MODERATION_H_GRID};
use gevrey_nets::fourier::GridSpec;
use gevrey_nets::growth::Weight;
use gevrey_nets::microlocal::{wavefront, wf_mismatches, ConePartition};
use gevrey_nets::mollifier::{build_mollifier, verify_mollifier, window_plateau, MollifierNet, Window};
use gevrey_nets::nets::NetFunction;
use gevrey_nets::weights::{
    check_assoc_m2, check_conditions, default_omega_grid, log_grid, omega_check, OmegaKind, SequenceKind,
    WeightSequence,
};
use gevrey_nets::Error;
use serde_json::json;

use crate::config::{ExperimentConfig, Resolved, WeightChoice};
use crate::report::{num, Check, Table};
use crate::{CliError, Command};

/// Tolerance on `(ι(H)² − ι(H))(0) = −1/4`.
pub const IMPOSSIBILITY_TOLERANCE: f64 = 1e-3;

pub struct CommandOutput {
    pub result: serde_json::Value,
    pub tables: Vec<(String, Table)>,
    pub checks: Vec<Check>,
}

pub fn run(command: Command, cfg: &ExperimentConfig, r: &Resolved) -> Result<CommandOutput, CliError> {
    match command {
        Command::WeightsCheck => weights_check(cfg, r),
        Command::MollifierBuild => mollifier_build(cfg, r),
        Command::Embed => embed(cfg, r),
        Command::Classify => classify(cfg, r),
        Command::Regularity => regularity(cfg, r),
        Command::Wavefront => wave_front(cfg, r),
        Command::ImpossibilityDemo => impossibility(cfg, r),
        Command::BbClassify => bb_classify(cfg, r),
        Command::Crosscheck => crosscheck(cfg, r),
    }
}

fn expect<T: serde::Serialize + PartialEq>(checks: &mut Vec<Check>, name: &str, expected: Option<T>, actual: T) {
    if let Some(e) = expected {
        checks.push(Check::new(name, &e, &actual));
    }
}

fn origin_index(grid: &GridSpec) -> usize {
    if grid.dim == 1 {
        grid.n / 2
    } else {
        (grid.n / 2) * grid.n + grid.n / 2
    }
}

fn mollifier(r: &Resolved) -> Result<MollifierNet, CliError> {
    Ok(build_mollifier(r.sigma, &r.grid)?)
}

fn net_for(cfg: &ExperimentConfig, r: &Resolved, m: &ModelDistribution) -> Result<NetFunction, CliError> {
    let moll = mollifier(r)?;
    let net = regularize(m, &moll, &r.ladder, &r.grid)?.with_mode(cfg.mode);
    Ok(match &r.weight {
        WeightChoice::Sequence(seq) => net.with_weight(Weight::Sequence(seq.clone())),
        WeightChoice::Function(_) => net,
    })
}

fn windowed(cfg: &ExperimentConfig, r: &Resolved, net: NetFunction) -> Result<NetFunction, CliError> {
    let w = Window::new(vec![0.0; r.grid.dim], cfg.window_radius)?.samples(window_plateau(), &r.grid)?;
    Ok(net.multiply_by(&w)?)
}

/// The same Gevrey sequence with enough terms to evaluate `M` up to `t_max`.
fn with_headroom(seq: &WeightSequence, t_max: f64) -> Result<WeightSequence, CliError> {
    match seq.kind() {
        SequenceKind::Gevrey { s } => {
            let p = ((t_max.powf(1.0 / s) * 1.25) as usize + 64).max(seq.p_max());
            Ok(seq.with_p_max(p)?)
        }
        SequenceKind::Custom => Ok(seq.clone()),
    }
}

fn weights_check(cfg: &ExperimentConfig, r: &Resolved) -> Result<CommandOutput, CliError> {
    let mut checks = Vec::new();
    let mut table = Table::new(&["t", "value"]);
    let grid = log_grid(1e-2, 1e6, 100);
    let result = match &r.weight {
        WeightChoice::Sequence(seq) => {
            let cond = check_conditions(seq);
            let (a, h) = cond.m2_constants.unwrap_or((f64::NAN, f64::NAN));
            let big = with_headroom(seq, 4e6)?;
            let decades: Vec<f64> = (0..=5).map(|j| 10f64.powi(j)).collect();
            let (assoc_m2_ok, functional_ok) = if cond.m2_ok {
                (check_assoc_m2(&big, a, h, &decades)?, check_assoc_m2(&big, a, h, &grid)?)
            } else {
                (false, false)
            };
            for &t in &grid {
                table.push(vec![num(t), num(big.assoc(t)?)]);
            }
            let ok = cond.m1_ok && cond.m2_ok && functional_ok;
            expect(&mut checks, "conditions_ok", cfg.expect.conditions_ok, ok);
            json!({
                "kind": "sequence",
                "weight": seq,
                "m1_ok": cond.m1_ok,
                "m2_ok": cond.m2_ok,
                "A": a,
                "H": h,
                "m3prime_partial_sum": cond.m3prime_partial_sum,
                "m3prime_converges": cond.m3prime_converges,
                "m3prime_tail_exponent": cond.m3prime_tail_exponent,
                "assoc_m2_ok": assoc_m2_ok,
                "functional_m2_ok": functional_ok,
                "t_saturation": seq.t_saturation(),
                "heuristic": cond.heuristic,
            })
        }
        WeightChoice::Function(w) => {
            let rep = omega_check(w, &default_omega_grid())?;
            for &t in &grid {
                table.push(vec![num(t), num(w.eval(t))]);
            }
            let ok = rep.alpha_ok && rep.beta_ok && rep.gamma_ok;
            expect(&mut checks, "conditions_ok", cfg.expect.conditions_ok, ok);
            json!({ "kind": "function", "weight": w, "report": rep })
        }
    };
    Ok(CommandOutput { result, tables: vec![("weight.csv".into(), table)], checks })
}

fn mollifier_build(cfg: &ExperimentConfig, r: &Resolved) -> Result<CommandOutput, CliError> {
    let m = mollifier(r)?;
    let rep = verify_mollifier(&m)?;
    let contract_ok = rep.plateau_deviation <= 1e-6
        && rep.support_leakage <= 1e-6
        && rep.mass_defect <= 1e-6
        && rep.evenness_defect <= 1e-10
        && rep.decay_c.is_some_and(|c| c > 0.0);
    let mut checks = Vec::new();
    expect(&mut checks, "contract_ok", Some(cfg.expect.contract_ok.unwrap_or(true)), contract_ok);
    let g = &r.grid;
    let stride = (g.n / 2048).max(1);
    let mut profile = Table::new(&["x", "phi"]);
    let mut spectrum = Table::new(&["xi", "psi"]);
    let xi = g.xi_axis();
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by(|&a, &b| xi[a].total_cmp(&xi[b]));
    for i in (0..g.n).step_by(stride) {
        let idx = if g.dim == 1 { i } else { i * g.n + g.n / 2 };
        profile.push(vec![num(g.x(i)), num(m.phi[idx])]);
    }
    for &i in order.iter().step_by(stride) {
        let idx = if g.dim == 1 { i } else { i * g.n };
        spectrum.push(vec![num(xi[i]), num(m.psi[idx])]);
    }
    Ok(CommandOutput {
        result: json!({ "report": rep, "contract_ok": contract_ok }),
        tables: vec![("phi.csv".into(), profile), ("psi.csv".into(), spectrum)],
        checks,
    })
}

fn embed(cfg: &ExperimentConfig, r: &Resolved) -> Result<CommandOutput, CliError> {
    let net = net_for(cfg, r, &r.distribution)?;
    if cfg.export_frames {
        net.export(&cfg.out.join("frames"))?;
    }
    let o = origin_index(&r.grid);
    let cell = r.grid.cell();
    let mut table = Table::new(&["eps", "sup", "l1", "origin_re", "origin_im"]);
    for (j, f) in net.frames.iter().enumerate() {
        let sup = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let l1 = f.iter().map(|v| v.norm()).sum::<f64>() * cell;
        table.push(vec![num(net.ladder.eps(j)), num(sup), num(l1), num(f[o].re), num(f[o].im)]);
    }
    let all_zero = net.frames.iter().all(|f| f.iter().all(|v| v.norm() == 0.0));
    let verdict = classify_net(&net, &Region::centered(r.grid.dim, cfg.region_radius)?, cfg.mode)?;
    let mut checks = Vec::new();
    expect(&mut checks, "classification", cfg.expect.classification, verdict.classification);
    Ok(CommandOutput {
        result: json!({
            "distribution": r.distribution,
            "sigma": r.sigma,
            "eps": net.ladder.values(),
            "all_zero": all_zero,
            "edge_ratio": net.edge_ratio(),
            "verdict": verdict,
        }),
        tables: vec![("frames.csv".into(), table)],
        checks,
    })
}

fn classify(cfg: &ExperimentConfig, r: &Resolved) -> Result<CommandOutput, CliError> {
    let net = net_for(cfg, r, &r.distribution)?;
    let region = Region::centered(r.grid.dim, cfg.region_radius)?;
    let v = classify_net(&net, &region, cfg.mode)?;
    let mut header = vec!["eps".to_string(), "log_sup".into(), "nu".into()];
    header.extend(MODERATION_H_GRID.iter().map(|h| format!("kappa_h{h}")));
    let mut table = Table { header, rows: Vec::new() };
    for j in 0..v.eps.len() {
        let mut row = vec![num(v.eps[j]), num(v.log_sup[j]), num(v.nu[j])];
        row.extend(v.fitted.iter().map(|f| num(f.kappa[j])));
        table.push(row);
    }
    let mut checks = Vec::new();
    expect(&mut checks, "classification", cfg.expect.classification, v.classification);
    Ok(CommandOutput {
        result: json!({ "distribution": r.distribution, "region": region, "verdict": v }),
        tables: vec![("ladder.csv".into(), table)],
        checks,
    })
}

fn regularity(cfg: &ExperimentConfig, r: &Resolved) -> Result<CommandOutput, CliError> {
    let net = windowed(cfg, r, net_for(cfg, r, &r.distribution)?)?;
    let cert = regularity_test(&net, cfg.mode)?;
    let mut table = Table::new(&["parameter", "threshold"]);
    for (p, t) in &cert.thresholds {
        table.push(vec![num(*p), t.map(num).unwrap_or_default()]);
    }
    let mut checks = Vec::new();
    expect(&mut checks, "regularity", cfg.expect.regularity, cert.verdict);
    Ok(CommandOutput {
        result: json!({ "distribution": r.distribution, "window_radius": cfg.window_radius, "certificate": cert }),
        tables: vec![("thresholds.csv".into(), table)],
        checks,
    })
}

fn default_centers(dim: usize) -> Vec<Vec<f64>> {
    if dim == 1 {
        vec![vec![-2.0], vec![0.0], vec![2.0]]
    } else {
        vec![vec![0.0, 0.0], vec![2.5, 0.0], vec![-2.5, 0.0]]
    }
}

fn wave_front(cfg: &ExperimentConfig, r: &Resolved) -> Result<CommandOutput, CliError> {
    let net = net_for(cfg, r, &r.distribution)?;
    let centers = cfg.wavefront.centers.clone().unwrap_or_else(|| default_centers(r.grid.dim));
    if centers.iter().any(|c| c.len() != r.grid.dim) {
        return Err(CliError::Config("wave front centers must match the grid dimension".into()));
    }
    let partition = ConePartition::default_for(r.grid.dim);
    let rep = wavefront(&net, &centers, cfg.wavefront.radius, &partition, cfg.mode)?;
    let mismatches = match wf_mismatches(&r.distribution, &rep) {
        Ok(m) => Some(m),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let matches = mismatches.as_ref().map(|m| m.is_empty());
    let mut header: Vec<&str> = if r.grid.dim == 1 { vec!["center"] } else { vec!["center_x", "center_y"] };
    header.extend(["cone", "verdict", "spread"]);
    let mut table = Table::new(&header);
    for w in &rep.windows {
        for c in &w.cones {
            let mut row: Vec<String> = w.center.iter().map(|v| num(*v)).collect();
            row.extend([c.cone.to_string(), verdict_name(c.verdict).into(), num(c.spread)]);
            table.push(row);
        }
    }
    let mut checks = Vec::new();
    expect(&mut checks, "wf_matches_oracle", cfg.expect.wf_matches_oracle.map(Some), matches);
    Ok(CommandOutput {
        result: json!({
            "distribution": r.distribution,
            "report": rep,
            "matches_oracle": matches,
            "mismatches": mismatches,
        }),
        tables: vec![("wf.csv".into(), table)],
        checks,
    })
}

fn verdict_name(v: gevrey_nets::microlocal::WfVerdict) -> &'static str {
    use gevrey_nets::microlocal::WfVerdict as V;
    match v {
        V::Regular => "regular",
        V::Singular => "singular",
        V::Inconclusive => "inconclusive",
    }
}

fn impossibility(cfg: &ExperimentConfig, r: &Resolved) -> Result<CommandOutput, CliError> {
    if r.grid.dim != 1 {
        return Err(CliError::Config("impossibility-demo runs on a 1-D grid".into()));
    }
    let h = net_for(cfg, r, &ModelDistribution::Heaviside)?;
    let defect = h.mul(&h)?.sub(&h)?;
    let o = origin_index(&r.grid);
    let values: Vec<f64> = defect.frames.iter().map(|f| f[o].re).collect();
    let verdict = classify_net(&defect, &Region::centered(1, cfg.region_radius)?, cfg.mode)?;
    let non_negligible = !verdict.negligible;
    let within = values.iter().all(|v| (v + 0.25).abs() <= IMPOSSIBILITY_TOLERANCE);
    let mut table = Table::new(&["eps", "value_at_origin"]);
    for (j, v) in values.iter().enumerate() {
        table.push(vec![num(defect.ladder.eps(j)), num(*v)]);
    }
    let checks = vec![
        Check::new("non_negligible", &cfg.expect.non_negligible.unwrap_or(true), &non_negligible),
        Check::new("value_at_origin_is_minus_quarter", &true, &within),
    ];
    Ok(CommandOutput {
        result: json!({
            "values_at_origin": values,
            "expected_value": -0.25,
            "tolerance": IMPOSSIBILITY_TOLERANCE,
            "verdict_label": if non_negligible { "non-negligible" } else { "negligible" },
            "verdict": verdict,
        }),
        tables: vec![("values.csv".into(), table)],
        checks,
    })
}

fn bb_classify(cfg: &ExperimentConfig, r: &Resolved) -> Result<CommandOutput, CliError> {
    let WeightChoice::Function(w) = &r.weight else {
        return Err(CliError::Config("bb-classify needs a weight function (--weight omega:log1p or omega:pow:A)".into()));
    };
    let net = windowed(cfg, r, net_for(cfg, r, &r.distribution)?)?;
    let v = classify_net_bb(&net, w, cfg.mode)?;
    let last = net.frames.len() - 1;
    let equivalence = norm_equivalence_check(&net.frames[last], &r.grid, w, 1.0)?;
    let mut header = vec!["eps".to_string(), "log_sup".into(), "nu".into()];
    header.extend(LAMBDA_GRID.iter().map(|l| format!("kappa_lambda{l}")));
    let mut table = Table { header, rows: Vec::new() };
    for j in 0..v.eps.len() {
        let mut row = vec![num(v.eps[j]), num(v.log_sup[j]), num(v.nu[j])];
        row.extend(v.fitted.iter().map(|f| num(f.kappa[j])));
        table.push(row);
    }
    let mut checks = Vec::new();
    expect(&mut checks, "classification", cfg.expect.classification, v.classification);
    Ok(CommandOutput {
        result: json!({
            "mode": "bb",
            "quantifiers": cfg.mode,
            "weight": w,
            "distribution": r.distribution,
            "window_radius": cfg.window_radius,
            "verdict": v,
            "norm_equivalence_smallest_eps": equivalence,
        }),
        tables: vec![("bb_ladder.csv".into(), table)],
        checks,
    })
}

fn crosscheck(cfg: &ExperimentConfig, r: &Resolved) -> Result<CommandOutput, CliError> {
    if let WeightChoice::Function(w) = &r.weight {
        if w.kind != OmegaKind::LogOnePlusT {
            return Err(CliError::Config("crosscheck is defined for omega:log1p only".into()));
        }
    }
    let net = windowed(cfg, r, net_for(cfg, r, &r.distribution)?)?;
    let rep = colombeau_crosscheck(&net)?;
    let mut table = Table::new(&["eps", "log_sup", "polynomial_kappa", "nu"]);
    for j in 0..rep.bb.eps.len() {
        table.push(vec![num(rep.bb.eps[j]), num(rep.bb.log_sup[j]), num(rep.polynomial_kappa[j]), num(rep.bb.nu[j])]);
    }
    let mut checks = Vec::new();
    expect(&mut checks, "crosscheck_agree", Some(cfg.expect.crosscheck_agree.unwrap_or(true)), rep.agree);
    Ok(CommandOutput {
        result: json!({ "mode": "bb", "distribution": r.distribution, "report": rep }),
        tables: vec![("crosscheck.csv".into(), table)],
        checks,
    })
}
