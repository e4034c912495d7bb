use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use tracelab_core::dixmier::{dixmier_value_model, DixmierConfig, DixmierError};
use tracelab_core::geomspec::{ModelError, ModelSpec, SpectralModel};
use tracelab_core::matrixlab::{
    random::{random_matrix, trial_rng},
    run_campaigns, singular_values, CampaignConfig, DenseMatrix, MatrixError,
};
use tracelab_core::numeric::format_f64;
use tracelab_core::seqkernel::{l1inf_diagnostic, load_definitions, IndexSchedule, Membership, PrefixSumTable, SeqError};
use tracelab_core::wodzicki::{
    c_constant, connes_check, diint_check, g0_constant, lambda_constant, omega, res_w, ConnesConfig, FourierSeries,
    FourierTerm, Mode, PrincipalSymbol, QuadratureGrid, Trig, WodzickiError,
};
use tracelab_core::zetalab::{residue_at_one, residue_curve, zeta_csv, ResidueConfig, ZetaError};

use crate::config::{Command, RunConfig};
use crate::report::{RunReport, Verdict};
use crate::CliError;

/// Summary plus the CSV body for `--format csv`.
pub struct Outcome {
    pub report: RunReport,
    pub csv: String,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (results, verdicts, csv) = match cfg.command {
        Command::Gamma => gamma(cfg)?,
        Command::Zeta => zeta(cfg)?,
        Command::Connes => connes(cfg)?,
        Command::MatrixProps => matrix_props(cfg)?,
        Command::Constants => constants()?,
        Command::SpectrumDump => spectrum_dump(cfg)?,
    };
    Ok(Outcome {
        report: RunReport::new(cfg.command.name(), cfg.echo(), results, verdicts),
        csv,
    })
}

type Parts = (Value, Vec<Verdict>, String);

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Sequence(_) | ModelError::Overflow => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SeqError> for CliError {
    fn from(e: SeqError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<DixmierError> for CliError {
    fn from(e: DixmierError) -> Self {
        match e {
            DixmierError::Parameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<ZetaError> for CliError {
    fn from(e: ZetaError) -> Self {
        match e {
            ZetaError::Parameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<WodzickiError> for CliError {
    fn from(e: WodzickiError) -> Self {
        match e {
            WodzickiError::Estimator(_) | WodzickiError::NonFinite { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::NoConvergence { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn default_r_max(n: u32) -> f64 {
    match n {
        1 => 1e6,
        2 => 2000.0,
        3 => 200.0,
        _ => 50.0,
    }
}

/// The model as a JSON spec (for the report) and built.
pub fn load_model(cfg: &RunConfig) -> Result<(Value, SpectralModel), CliError> {
    let m = &cfg.model;
    let (spec, model) = if let Some(path) = &m.defs {
        let defs = load_definitions(path)?;
        let def = defs
            .iter()
            .find(|d| d.name.as_deref() == Some(m.name.as_str()))
            .ok_or_else(|| CliError::Usage(format!("no record named {:?} in {}", m.name, path.display())))?;
        let seq = def.build(path.parent())?;
        (to_value(def), SpectralModel::new(m.name.clone(), 0, seq, None))
    } else {
        let mut obj = Map::new();
        obj.insert("model".into(), json!(m.name));
        match m.name.as_str() {
            "torus" => {
                obj.insert("n".into(), json!(m.n));
                obj.insert("r_max".into(), json!(m.r_max.unwrap_or(default_r_max(m.n))));
            }
            "sphere" => {
                obj.insert("n".into(), json!(m.n));
                obj.insert("l_max".into(), json!(m.r_max.unwrap_or(500.0).round() as u64));
            }
            "harmonic" => {
                obj.insert("l".into(), json!(m.l.unwrap_or(1.0)));
            }
            "perturbed" => {
                obj.insert("l".into(), json!(m.l.unwrap_or(1.0)));
                obj.insert("delta".into(), json!(m.delta.unwrap_or(0.2)));
            }
            _ => {}
        }
        if let Some(p) = &m.params {
            let extra: Value =
                serde_json::from_str(p).map_err(|e| CliError::Usage(format!("model params: {e}")))?;
            let Value::Object(extra) = extra else {
                return Err(CliError::Usage("model params must be a JSON object".into()));
            };
            obj.extend(extra);
        }
        let spec: ModelSpec = serde_json::from_value(Value::Object(obj))
            .map_err(|e| CliError::Usage(format!("model {:?}: {e}", m.name)))?;
        (to_value(&spec), spec.build()?)
    };
    let model = if m.scale != 1.0 { model.scaled(m.scale)? } else { model };
    Ok((spec, model))
}

fn dixmier_config(cfg: &RunConfig) -> DixmierConfig {
    DixmierConfig {
        h: cfg.h,
        cauchy_tol: cfg.cauchy_tol,
        window_ratio: cfg.window_ratio,
        n_max: None,
    }
}

fn residue_config(cfg: &RunConfig) -> ResidueConfig {
    ResidueConfig {
        levels: cfg.levels,
        ..Default::default()
    }
}

/// Relative tolerance against a claimed limit, absolute near zero.
fn limit_tolerance(expected: f64, rel: f64, floor: f64) -> f64 {
    (rel * expected.abs()).max(floor)
}

fn gamma(cfg: &RunConfig) -> Result<Parts, CliError> {
    let (spec, model) = load_model(cfg)?;
    let seq = model.sequence();
    let schedule = match seq.coverage() {
        Some(cap) => IndexSchedule::dyadic(cfg.h).capped(cap)?,
        None => IndexSchedule::dyadic(cfg.h),
    };
    let table = PrefixSumTable::new(seq.clone());
    let mut csv = String::from("k,sigma_k,gamma_k\n");
    let mut points = Vec::new();
    for &k in schedule.indices() {
        let (s, g) = (table.sigma(k)?, table.gamma(k)?);
        let _ = writeln!(csv, "{k},{},{}", format_f64(s), format_f64(g));
        points.push(json!({ "k": k, "sigma": s, "gamma": g }));
    }
    let membership = l1inf_diagnostic(seq, &schedule)?;
    let mut verdicts = Vec::new();
    if let Some(w) = &membership.bound_witness {
        verdicts.push(Verdict::at_most(
            "gamma_within_witness",
            membership.sup_gamma_observed,
            w.gamma_sup() * (1.0 + 1e-12),
        ));
    }
    let value = if membership.verdict == Membership::NonMember {
        verdicts.push(Verdict::holds("diverges_as_certified", seq.tail().certifies_divergence()));
        Value::Null
    } else {
        let d = dixmier_value_model(&model, &dixmier_config(cfg))?;
        if let Some(expected) = seq.limit_claim() {
            verdicts.push(Verdict::near(
                "dixmier_value",
                d.value(),
                expected,
                limit_tolerance(expected, 0.01, 0.01),
            ));
        }
        json!({
            "value": d.value(),
            "combined_error": d.combined_error(),
            "consistent": d.consistent,
            "bracket": d.bracket,
            "slope": d.slope,
            "records": d.records(model.name()),
        })
    };
    let results = json!({
        "model": spec,
        "name": model.name(),
        "claimed_limit": seq.limit_claim(),
        "membership": membership,
        "points": points,
        "dixmier": value,
    });
    Ok((results, verdicts, csv))
}

fn zeta(cfg: &RunConfig) -> Result<Parts, CliError> {
    let (spec, model) = load_model(cfg)?;
    let seq = model.sequence();
    let rc = residue_config(cfg);
    let estimate = residue_at_one(seq, &rc)?;
    let curve = residue_curve(seq, &rc)?;
    let mut verdicts = Vec::new();
    if let Some(expected) = seq.limit_claim() {
        verdicts.push(Verdict::near(
            "zeta_residue",
            estimate.value,
            expected,
            limit_tolerance(expected, 0.02, 1e-3),
        ));
    }
    let results = json!({
        "model": spec,
        "name": model.name(),
        "claimed_limit": seq.limit_claim(),
        "residue": estimate,
        "curve": curve,
    });
    Ok((results, verdicts, zeta_csv(&curve)))
}

fn connes(cfg: &RunConfig) -> Result<Parts, CliError> {
    if cfg.model.name != "torus" || cfg.model.defs.is_some() {
        return Err(CliError::Usage("connes needs --model torus".into()));
    }
    let (spec, model) = load_model(cfg)?;
    let n = cfg.model.n;
    let grid = QuadratureGrid::new(n, cfg.g, cfg.sphere_order)?;
    let symbol = match &cfg.symbol_csv {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            PrincipalSymbol::sampled_from_csv(&text, &grid, 1)?
        }
        None => PrincipalSymbol::norm_power(n, 1, cfg.model.scale),
    };
    let config = ConnesConfig {
        dixmier: dixmier_config(cfg),
        residue: residue_config(cfg),
        grid_size: cfg.g,
        sphere_order: cfg.sphere_order,
    };
    let report = connes_check(&model, &symbol, &config)?;
    let gap_bound = if n <= 2 { 0.02 } else { 0.05 };
    let mut verdicts = vec![Verdict::at_most("max_pairwise_gap", report.max_pairwise_gap, gap_bound)];
    if cfg.symbol_csv.is_none() {
        let exact = omega(n) / n as f64 * cfg.model.scale;
        verdicts.push(Verdict::near("res_w_exact", report.res_w, exact, 1e-12 * exact));
    }
    let mut csv = String::from("quantity,value\n");
    for (k, v) in [
        ("dixmier", report.dixmier),
        ("residue_zeta", report.residue_zeta),
        ("res_w", report.res_w),
        ("max_pairwise_gap", report.max_pairwise_gap),
    ] {
        let _ = writeln!(csv, "{k},{}", format_f64(v));
    }
    let results = json!({ "model": spec, "symbol": symbol.name(), "report": report });
    Ok((results, verdicts, csv))
}

fn matrix_props(cfg: &RunConfig) -> Result<Parts, CliError> {
    let campaign = CampaignConfig {
        trials: cfg.trials,
        seed: cfg.seed,
        min_dim: cfg.min_dim,
        max_dim: cfg.max_dim,
        tolerance: cfg.matrix_tol,
    };
    let report = run_campaigns(&campaign)?;
    let mut verdicts: Vec<Verdict> = report
        .families
        .iter()
        .map(|f| Verdict::at_most(f.family.name(), f.violations_above_tol as f64, 0.0))
        .collect();

    let ident = singular_values(&DenseMatrix::identity(cfg.max_dim))?;
    let ident_dev = ident.values.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    verdicts.push(Verdict::at_most("identity_smoke", ident_dev, 1e-14));

    // 2×2: roots of the characteristic polynomial of A*A
    let mut oracle_dev = 0.0f64;
    let mut rng = trial_rng(cfg.seed, u64::MAX);
    for t in 0..cfg.trials {
        let a = random_matrix(&mut rng, 2, 2, t % 2 == 1);
        let g = a.adjoint().matmul(&a)?;
        let tr = g.trace().re;
        let det = (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]).re;
        let l1 = (tr + (tr * tr - 4.0 * det).max(0.0).sqrt()) / 2.0;
        let l2 = if l1 > 0.0 { det / l1 } else { 0.0 };
        let s = singular_values(&a)?;
        let scale = s.norm().max(1.0);
        oracle_dev = oracle_dev
            .max((s.values[0] - l1.sqrt()).abs() / scale)
            .max((s.values[1] - l2.max(0.0).sqrt()).abs() / scale);
    }
    verdicts.push(Verdict::at_most("two_by_two_oracle", oracle_dev, 1e-10));

    let mut csv = String::from("family,trials,max_violation,worst_seed,violations_above_tol\n");
    for f in &report.families {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            f.family.name(),
            f.trials,
            format_f64(f.max_violation),
            f.worst_seed,
            f.violations_above_tol
        );
    }
    let results = json!({
        "campaign": report,
        "identity_max_deviation": ident_dev,
        "two_by_two_max_deviation": oracle_dev,
    });
    Ok((results, verdicts, csv))
}

/// The three diint test functions: 1 on T¹, 1 on T², 1 + cos x¹ cos x² on T².
pub fn diint_functions() -> Vec<(&'static str, FourierSeries)> {
    let cc = FourierSeries::new(
        2,
        vec![
            FourierTerm::constant(1.0),
            FourierTerm::new(1.0, vec![Mode::new(0, 1, Trig::Cos), Mode::new(1, 1, Trig::Cos)]),
        ],
    )
    .expect("valid series");
    vec![
        ("one_t1", FourierSeries::constant(1, 1.0)),
        ("one_t2", FourierSeries::constant(2, 1.0)),
        ("one_plus_cos_cos_t2", cc),
    ]
}

fn constants() -> Result<Parts, CliError> {
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    let mut csv = String::from("n,omega,c,lambda,g0,lambda_c_minus_1,g0_2pi_n_minus_1\n");
    for n in 1..=8u32 {
        let (o, c, l, g) = (omega(n), c_constant(n), lambda_constant(n), g0_constant(n));
        let lc = l * c - 1.0;
        let g2 = g * (2.0 * std::f64::consts::PI).powi(n as i32) - 1.0;
        verdicts.push(Verdict::at_most(&format!("lambda_c_{n}"), lc.abs(), 1e-14));
        verdicts.push(Verdict::at_most(&format!("g0_{n}"), g2.abs(), 1e-14));
        let _ = writeln!(
            csv,
            "{n},{},{},{},{},{},{}",
            format_f64(o),
            format_f64(c),
            format_f64(l),
            format_f64(g),
            format_f64(lc),
            format_f64(g2)
        );
        rows.push(json!({ "n": n, "omega": o, "c": c, "lambda": l, "g0": g, "lambda_c_minus_1": lc, "g0_2pi_n_minus_1": g2 }));
    }
    verdicts.push(Verdict::near("omega_2", omega(2), 2.0 * std::f64::consts::PI, 1e-15));
    let mut diint = Vec::new();
    for (name, f) in diint_functions() {
        let grid = QuadratureGrid::new(f.dimension(), 16, 32)?;
        let r = diint_check(&f, &grid)?;
        verdicts.push(Verdict::at_most(&format!("diint_{name}"), r.gap(), 1e-10));
        diint.push(json!({ "f": name, "wodzicki_side": r.wodzicki_side, "integral_side": r.integral_side }));
    }
    for n in 1..=3u32 {
        let grid = QuadratureGrid::new(n, 1, 32)?;
        let w = res_w(&PrincipalSymbol::norm_power(n, 1, 1.0), &grid)?;
        let exact = omega(n) / n as f64;
        verdicts.push(Verdict::near(&format!("res_w_norm_power_{n}"), w, exact, 1e-12 * exact));
    }
    Ok((json!({ "table": rows, "diint": diint }), verdicts, csv))
}

fn spectrum_dump(cfg: &RunConfig) -> Result<Parts, CliError> {
    let (spec, model) = load_model(cfg)?;
    let mut csv = String::new();
    let mut rows = Vec::new();
    if let Some(shells) = model.shells() {
        let scale = model.sequence().scale();
        csv.push_str("eigenvalue,mu,multiplicity\n");
        for s in shells.iter().take(cfg.limit) {
            let mu = s.mu * scale;
            let _ = writeln!(csv, "{},{},{}", format_f64(s.eigenvalue), format_f64(mu), s.multiplicity);
            rows.push(json!({ "eigenvalue": s.eigenvalue, "mu": mu, "multiplicity": s.multiplicity }));
        }
    } else {
        let seq = model.sequence();
        let n = seq.support().map_or(cfg.limit as u64, |s| s.min(cfg.limit as u64));
        csv.push_str("k,mu\n");
        for (i, mu) in seq.prefix(n)?.into_iter().enumerate() {
            let _ = writeln!(csv, "{},{}", i + 1, format_f64(mu));
            rows.push(json!({ "k": i + 1, "mu": mu }));
        }
    }
    let results = json!({
        "model": spec,
        "name": model.name(),
        "total_terms": model.total_terms(),
        "shells": model.shells().map(|s| s.len()),
        "rows": rows,
    });
    Ok((results, Vec::new(), csv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: Command, edit: impl FnOnce(&mut RunConfig)) -> RunConfig {
        let mut c = RunConfig::defaults(command);
        edit(&mut c);
        c
    }

    #[test]
    fn gamma_harmonic_passes() {
        let out = run(&cfg(Command::Gamma, |_| {})).unwrap();
        assert!(out.report.passed(), "{:?}", out.report.verdicts);
        assert!(out.csv.starts_with("k,sigma_k,gamma_k\n2,"));
        let v = out.report.results["dixmier"]["value"].as_f64().unwrap();
        assert!((v - 1.0).abs() < 0.01);
    }

    #[test]
    fn gamma_geometric_and_varilly() {
        let out = run(&cfg(Command::Gamma, |c| c.model.name = "geometric".into())).unwrap();
        assert!(out.report.passed());
        assert_eq!(out.report.results["dixmier"]["value"].as_f64().unwrap(), 0.0);
        let out = run(&cfg(Command::Gamma, |c| c.model.name = "varilly".into())).unwrap();
        assert!(out.report.passed(), "{:?}", out.report.verdicts);
        assert_eq!(out.report.results["membership"]["verdict"], "member");
    }

    #[test]
    fn inverse_log_is_reported_divergent() {
        let out = run(&cfg(Command::Gamma, |c| c.model.name = "inverse_log".into())).unwrap();
        assert_eq!(out.report.results["membership"]["verdict"], "non_member");
        assert!(out.report.results["dixmier"].is_null());
    }

    #[test]
    fn zeta_harmonic() {
        let out = run(&cfg(Command::Zeta, |_| {})).unwrap();
        assert!(out.report.passed());
        assert!(out.csv.starts_with("s,partial_sum"));
    }

    #[test]
    fn unknown_model_is_usage_error() {
        let err = run(&cfg(Command::Gamma, |c| c.model.name = "klein_bottle".into())).err().unwrap();
        assert!(matches!(err, CliError::Usage(_)));
        let err = run(&cfg(Command::Connes, |c| c.model.name = "harmonic".into())).err().unwrap();
        assert!(matches!(err, CliError::Usage(_)));
    }

    #[test]
    fn connes_scaled_torus() {
        let out = run(&cfg(Command::Connes, |c| {
            c.model.name = "torus".into();
            c.model.n = 2;
            c.model.r_max = Some(300.0);
            c.model.scale = 3.0;
            c.h = 16;
        }))
        .unwrap();
        assert!(out.report.passed(), "{:?}", out.report.verdicts);
        let w = out.report.results["report"]["res_w"].as_f64().unwrap();
        assert!((w - 3.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn constants_pass() {
        let out = run(&cfg(Command::Constants, |_| {})).unwrap();
        assert!(out.report.passed(), "{:?}", out.report.failures);
        assert_eq!(out.csv.lines().count(), 9);
    }

    #[test]
    fn small_matrix_campaign() {
        let out = run(&cfg(Command::MatrixProps, |c| {
            c.trials = 30;
            c.max_dim = 6;
        }))
        .unwrap();
        assert!(out.report.passed(), "{:?}", out.report.failures);
    }

    #[test]
    fn spectrum_dump_shells_and_terms() {
        let out = run(&cfg(Command::SpectrumDump, |c| {
            c.model.name = "torus".into();
            c.model.n = 1;
            c.model.r_max = Some(10.0);
            c.limit = 3;
        }))
        .unwrap();
        let mut lines = out.csv.lines();
        assert_eq!(lines.next(), Some("eigenvalue,mu,multiplicity"));
        assert!(lines.next().unwrap().ends_with(",1"));
        assert!(lines.next().unwrap().ends_with(",2"));
        let out = run(&cfg(Command::SpectrumDump, |c| c.limit = 4)).unwrap();
        assert_eq!(out.csv.lines().count(), 5);
    }
}
