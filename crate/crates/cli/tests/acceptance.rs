//! One line per acceptance criterion. Exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use tracelab_core::dixmier::{
    additivity_chain_check, dixmier_value, measurability_bracket, slope_estimator, DixmierConfig, Measurable,
};
use tracelab_core::geomspec::{synthetic_model, torus_model, varilly_block_end, varilly_model, SyntheticKind, VARILLY_LAST_BLOCK};
use tracelab_core::matrixlab::{run_campaigns, CampaignConfig, Family};
use tracelab_core::numeric::ln_gamma;
use tracelab_core::seqkernel::{CharacteristicSequence, IndexSchedule, PrefixSumTable};
use tracelab_core::wodzicki::{
    c_constant, connes_check, diint_check, g0_constant, lambda_constant, omega, res_w, ConnesConfig, FourierSeries,
    FourierTerm, Mode, PrincipalSymbol, QuadratureGrid, Trig,
};
use tracelab_core::zetalab::{residue_at_one, ResidueConfig};

const C1_SLOPE_REL: f64 = 0.01;
const C1_RAW_GAMMA_REL: f64 = 0.15;
const C1_SECONDS: f64 = 10.0;
const C2_SLOPE_REL: f64 = 0.02;
const C2_RES_W_ABS: f64 = 1e-12;
const C2_SECONDS: f64 = 60.0;
const C3_GAP_LOW_DIM: f64 = 0.02;
const C3_GAP_N3: f64 = 0.05;
const C4_REL: f64 = 0.02;
const C5_EXACT: f64 = 1e-12;
const C6_REL_VIOLATION: f64 = 1e-9;
const C6_TRIALS: usize = 1000;
const C6_SECONDS: f64 = 30.0;
const C7_SCHEDULE_EXPONENT: u32 = 20;
const C8_CONSTANTS: f64 = 1e-14;
const C8_DIINT: f64 = 1e-10;
const C9_THREADS: [usize; 3] = [1, 4, 8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn harmonic(l: f64) -> CharacteristicSequence {
    synthetic_model(&SyntheticKind::Harmonic { l }).unwrap().into_sequence()
}

fn perturbed(l: f64, delta: f64) -> CharacteristicSequence {
    synthetic_model(&SyntheticKind::Perturbed { l, delta }).unwrap().into_sequence()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let model = torus_model(1, 1e6).unwrap();
    let seq = model.sequence();
    let cover = seq.coverage().unwrap();
    let slope = slope_estimator(seq, cover, 0.125).unwrap();
    let k = *IndexSchedule::dyadic(30).capped(cover).unwrap().indices().last().unwrap();
    let raw = PrefixSumTable::new(seq.clone()).gamma(k).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let pass = (slope.value - 2.0).abs() <= C1_SLOPE_REL * 2.0
        && (raw - 2.0).abs() <= C1_RAW_GAMMA_REL * 2.0
        && secs < C1_SECONDS;
    outcome(
        pass,
        format!("slope {:.8} (±{:.1e}), raw γ_{k} {raw:.6}, {secs:.2} s", slope.value, slope.error_estimate),
    )
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let model = torus_model(2, 2000.0).unwrap();
    let seq = model.sequence();
    let cover = seq.coverage().unwrap();
    let slope = slope_estimator(seq, cover, 0.125).unwrap();
    let zeta = residue_at_one(seq, &ResidueConfig::default()).unwrap();
    let grid = QuadratureGrid::new(2, 8, 32).unwrap();
    let w = res_w(&PrincipalSymbol::norm_power(2, 1, 1.0), &grid).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let agree = (zeta.value - slope.value).abs() <= zeta.error_estimate + slope.error_estimate;
    let pass = (slope.value - PI).abs() <= C2_SLOPE_REL * PI && agree && (w - PI).abs() <= C2_RES_W_ABS && secs < C2_SECONDS;
    outcome(
        pass,
        format!(
            "{cover} lattice points, slope {:.8}, residue {:.8} (±{:.1e}), res_w − π = {:.1e}, {secs:.2} s",
            slope.value,
            zeta.value,
            zeta.error_estimate,
            w - PI
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, r, bound) in [(1u32, 1e6, C3_GAP_LOW_DIM), (2, 2000.0, C3_GAP_LOW_DIM), (3, 200.0, C3_GAP_N3)] {
        let model = torus_model(n, r).unwrap();
        let symbol = PrincipalSymbol::norm_power(n, 1, 1.0);
        let rep = connes_check(&model, &symbol, &ConnesConfig::default()).unwrap();
        pass &= rep.max_pairwise_gap <= bound;
        parts.push(format!(
            "n={n}: {:.6}/{:.6}/{:.6} gap {:.1e}",
            rep.dixmier, rep.residue_zeta, rep.res_w, rep.max_pairwise_gap
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut worst = 0.0f64;
    for l in [0.5, 1.0, 3.0] {
        for delta in [-0.2, -0.1, 0.0, 0.1, 0.2] {
            let b = measurability_bracket(&perturbed(l, delta), &IndexSchedule::dyadic(20), C4_REL * l).unwrap();
            let rel = b.value.map_or(f64::INFINITY, |v| (v - l).abs() / l);
            worst = worst.max(rel);
            pass &= b.measurable == Measurable::Yes && rel <= C4_REL;
        }
    }
    outcome(pass, format!("15 models, worst |value − L|/L = {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let model = varilly_model().unwrap();
    let mut pass = true;
    let mut max_sigma_err = 0.0f64;
    let mut max_mu_err = 0.0f64;
    let mut min_margin = f64::INFINITY;
    let mut prev = f64::NEG_INFINITY;
    // σ_{m!} = 1 + Σ_{j=2}^{m} ln j·(1 − 1/j)
    let mut oracle = 1.0;
    for m in 2..=VARILLY_LAST_BLOCK {
        let jm = m as f64;
        oracle += jm.ln() * (1.0 - 1.0 / jm);
        let e = varilly_block_end(&model, m).unwrap();
        let ln_k = ln_gamma(jm + 1.0);
        max_sigma_err = max_sigma_err.max((e.sigma - oracle).abs() / oracle);
        max_mu_err = max_mu_err.max((e.index_times_mu - jm.ln()).abs() / jm.ln());
        let bound = (1.0 + ln_k) / ln_k;
        min_margin = min_margin.min(bound - e.gamma);
        pass &= e.gamma <= bound + C5_EXACT && e.index_times_mu > prev;
        prev = e.index_times_mu;
    }
    pass &= max_sigma_err <= C5_EXACT && max_mu_err <= C5_EXACT;
    outcome(
        pass,
        format!(
            "m = 2..{VARILLY_LAST_BLOCK}: min bound − γ = {min_margin:.3e}, σ rel err {max_sigma_err:.1e}, m!μ − ln m rel err {max_mu_err:.1e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let cfg = CampaignConfig {
        trials: C6_TRIALS,
        tolerance: C6_REL_VIOLATION,
        ..Default::default()
    };
    let report = run_campaigns(&cfg).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let required = [
        Family::Homogeneity,
        Family::KyFanSubadditive,
        Family::KyFanDoubling,
        Family::IdealBound,
        Family::AdjointInvariance,
        Family::EckartYoung,
        Family::TopKTrace,
    ];
    let all_present = required.iter().all(|f| report.family(*f).is_some_and(|r| r.trials == C6_TRIALS));
    let worst = report.families.iter().map(|f| f.max_violation).fold(0.0, f64::max);
    let pass = all_present && report.total_violations() == 0 && secs < C6_SECONDS;
    outcome(
        pass,
        format!(
            "{} families × {C6_TRIALS} trials, {} violations, worst relative {worst:.1e}, {secs:.2} s",
            report.families.len(),
            report.total_violations()
        ),
    )
}

fn criterion_7() -> Outcome {
    let cfg = DixmierConfig::default();
    let mut pass = true;
    let mut notes = Vec::new();

    let pairs = [(harmonic(1.0), perturbed(3.0, 0.1)), (harmonic(0.5), harmonic(2.0))];
    let mut worst_merge = 0.0f64;
    for (x, y) in &pairs {
        let (dx, dy) = (dixmier_value(x, &cfg).unwrap(), dixmier_value(y, &cfg).unwrap());
        let dz = dixmier_value(&CharacteristicSequence::merge(x, y), &cfg).unwrap();
        let err = dx.combined_error() + dy.combined_error() + dz.combined_error();
        let gap = (dz.value() - dx.value() - dy.value()).abs();
        worst_merge = worst_merge.max(gap / err);
        pass &= gap <= err;
    }
    notes.push(format!("merge gap/err ≤ {worst_merge:.2}"));

    let base = perturbed(1.0, 0.1);
    let d = dixmier_value(&base, &cfg).unwrap();
    let mut worst_hom = 0.0f64;
    for lambda in [0.5, 2.0, 10.0] {
        let ds = dixmier_value(&base.scaled(lambda).unwrap(), &cfg).unwrap();
        let gap = (ds.value() - lambda * d.value()).abs();
        worst_hom = worst_hom.max(gap / (lambda * d.value()));
        pass &= gap <= lambda * d.combined_error();
    }
    notes.push(format!("homogeneity rel gap {worst_hom:.1e}"));

    let schedule = IndexSchedule::dyadic(C7_SCHEDULE_EXPONENT);
    let v = varilly_model().unwrap().into_sequence();
    let mut chain_worst = 0.0f64;
    for (x, y) in [(&pairs[0].0, &pairs[0].1), (&pairs[0].0, &v)] {
        let r = additivity_chain_check(x, y, &schedule).unwrap();
        chain_worst = chain_worst.max(r.max_violation());
        pass &= r.max_violation() == 0.0 && r.checked >= C7_SCHEDULE_EXPONENT as usize;
    }
    notes.push(format!("chain violation {chain_worst:.1e} to 2^{C7_SCHEDULE_EXPONENT}"));
    outcome(pass, notes.join(", "))
}

fn criterion_8() -> Outcome {
    let mut worst_const = 0.0f64;
    for n in 1..=8u32 {
        worst_const = worst_const
            .max((lambda_constant(n) * c_constant(n) - 1.0).abs())
            .max((g0_constant(n) * (2.0 * PI).powi(n as i32) - 1.0).abs());
    }
    let cc = FourierSeries::new(
        2,
        vec![
            FourierTerm::constant(1.0),
            FourierTerm::new(1.0, vec![Mode::new(0, 1, Trig::Cos), Mode::new(1, 1, Trig::Cos)]),
        ],
    )
    .unwrap();
    let mut worst_diint = 0.0f64;
    for (f, expected) in [
        (FourierSeries::constant(1, 1.0), 2.0),
        (FourierSeries::constant(2, 1.0), 2.0 * PI),
        (cc, 2.0 * PI),
    ] {
        let grid = QuadratureGrid::new(f.dimension(), 16, 32).unwrap();
        let r = diint_check(&f, &grid).unwrap();
        worst_diint = worst_diint
            .max(r.gap())
            .max((r.wodzicki_side - expected).abs())
            .max((r.integral_side - expected).abs());
    }
    let pass = worst_const <= C8_CONSTANTS && worst_diint <= C8_DIINT;
    outcome(
        pass,
        format!("identities {worst_const:.1e}, diint {worst_diint:.1e}, Ω_2 = {:.15}", omega(2)),
    )
}

fn criterion_9() -> Outcome {
    let runs: [&[&str]; 6] = [
        &["gamma", "--model", "torus", "--n", "2"],
        &["zeta", "--model", "torus", "--n", "2"],
        &["connes", "--model", "torus", "--n", "3"],
        &["matrix-props", "--trials", "200"],
        &["constants"],
        &["spectrum-dump", "--model", "torus", "--n", "3", "--R-max", "20"],
    ];
    let mut pass = true;
    let mut differing = Vec::new();
    for args in runs {
        let outputs: Vec<Vec<u8>> = C9_THREADS
            .iter()
            .map(|t| {
                let out = Command::new(env!("CARGO_BIN_EXE_tracelab"))
                    .args(args)
                    .args(["--threads", &t.to_string()])
                    .output()
                    .expect("tracelab runs");
                if !out.status.success() {
                    pass = false;
                }
                out.stdout
            })
            .collect();
        if outputs.iter().any(|o| o != &outputs[0] || o.is_empty()) {
            pass = false;
            differing.push(args[0]);
        }
    }
    outcome(
        pass,
        format!("{} commands at threads {C9_THREADS:?}, differing: {differing:?}", runs.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("torus n=1 Dixmier value 2", criterion_1),
        ("torus n=2 Dixmier value π, zeta and Wodzicki agree", criterion_2),
        ("three-way Connes consistency", criterion_3),
        ("∼L/n models collapse to L", criterion_4),
        ("Várilly block-end bounds", criterion_5),
        ("matrix inequality campaigns", criterion_6),
        ("additivity and homogeneity", criterion_7),
        ("constants and diint", criterion_8),
        ("determinism across thread counts", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
