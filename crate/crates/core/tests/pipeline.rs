use std::f64::consts::PI;
use std::fmt::Write;

use tracelab_core::dixmier::{dixmier_value_model, DixmierConfig};
use tracelab_core::geomspec::{sphere_model, torus_model, ModelSpec};
use tracelab_core::seqkernel::load_definitions;
use tracelab_core::wodzicki::{res_w, PrincipalSymbol, QuadratureGrid};
use tracelab_core::zetalab::{residue_at_one, weyl_slope, default_t_schedule, ResidueConfig};

#[test]
fn definitions_file_to_estimates() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("vals.txt"), "# head\n4\n2\n1\n\n0.5\n").unwrap();
    let defs = r#"
{"name": "file", "kind": "explicit", "params": {"path": "vals.txt"}}
{"name": "circle", "kind": "torus", "params": {"n": 2, "r_max": 300}}
{"name": "h3", "kind": "harmonic", "params": {"l": 3}}
"#;
    let path = dir.path().join("defs.jsonl");
    std::fs::write(&path, defs).unwrap();
    let defs = load_definitions(&path).unwrap();
    assert_eq!(defs.len(), 3);
    let file = defs[0].build(Some(dir.path())).unwrap();
    assert_eq!(file.prefix(5).unwrap(), vec![4.0, 2.0, 1.0, 0.5, 0.0]);
    let h3 = defs[2].build(None).unwrap();
    let r = residue_at_one(&h3, &ResidueConfig::default()).unwrap();
    assert!((r.value - 3.0).abs() < 3e-3);
    let circle = defs[1].build(None).unwrap();
    assert_eq!(circle.coverage(), torus_model(2, 300.0).unwrap().sequence().coverage());
}

#[test]
fn model_spec_json_drives_the_estimators() {
    let spec: ModelSpec = serde_json::from_str(r#"{"model": "torus", "n": 2, "r_max": 400}"#).unwrap();
    let model = spec.build().unwrap();
    let d = dixmier_value_model(&model, &DixmierConfig::default()).unwrap();
    assert!((d.value() - PI).abs() < 0.02 * PI);
    let w = weyl_slope(model.sequence(), &default_t_schedule(model.sequence(), 8)).unwrap();
    assert!(!w.diverges);
    assert!((w.estimate.value - PI).abs() < 0.02 * PI);
}

#[test]
fn sphere_weyl_constants() {
    for (n, l_max, expect) in [(2u32, 2000u64, 1.0), (3, 300, 1.0 / 3.0)] {
        let m = sphere_model(n, l_max).unwrap();
        let d = dixmier_value_model(&m, &DixmierConfig::default()).unwrap();
        assert!((d.value() - expect).abs() < 0.02 * expect, "S^{n}: {}", d.value());
    }
}

#[test]
fn sampled_symbol_matches_builtin() {
    let grid = QuadratureGrid::new(2, 2, 16).unwrap();
    let mut csv = String::from("x_index,xi_index,re,im\n");
    for x in 0..grid.torus_points() {
        for k in 0..grid.sphere_len() {
            let xi = grid.sphere_node(k);
            let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            writeln!(csv, "{x},{k},{},0", 2.0 * norm.powi(-2)).unwrap();
        }
    }
    let sampled = PrincipalSymbol::sampled_from_csv(&csv, &grid, 1).unwrap();
    let w = res_w(&sampled, &grid).unwrap();
    assert!((w - 2.0 * PI).abs() < 1e-12);
    let builtin = res_w(&PrincipalSymbol::norm_power(2, 1, 2.0), &grid).unwrap();
    assert!((w - builtin).abs() < 1e-12);
}
