//! Checks the catalog's pinned optima against the frozen reference produced
//! by tools/g6_oracle.py, and exercises the engine end to end on the
//! built-in problems.

use serde::Deserialize;
use ude3::problems::{by_name, catalog};
use ude3::{run, run_traced, EngineConfig};

#[derive(Deserialize)]
struct G6Reference {
    f_star: f64,
    x_star: Vec<f64>,
}

fn load_g6_reference() -> G6Reference {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/g6_reference.json");
    let text = std::fs::read_to_string(path).expect("reference file exists");
    serde_json::from_str(&text).expect("reference file parses")
}

#[test]
fn g6_catalog_optimum_matches_the_frozen_oracle_value() {
    let reference = load_g6_reference();
    let entry = by_name::<f64>("g6-like").unwrap();
    let optimum = entry.known_optimum.as_ref().unwrap();
    assert!(
        (optimum.f_star - reference.f_star).abs() <= 1e-9,
        "catalog {} vs oracle {}",
        optimum.f_star,
        reference.f_star
    );
    let x_star = optimum.x_star.as_ref().unwrap();
    for (a, b) in x_star.iter().zip(&reference.x_star) {
        assert!((a - b).abs() <= 1e-9);
    }
    // The frozen point evaluates to the frozen value on our evaluator.
    let spec = entry.build(2).unwrap();
    let raw = spec.evaluate(&reference.x_star).unwrap();
    assert!((raw.objective - reference.f_star).abs() <= 1e-9);
    assert!(raw.ineq.iter().all(|&g| g <= spec.eq_tol()));
}

#[test]
fn identical_seeds_reproduce_byte_identical_reports() {
    let spec = by_name::<f64>("con-rastrigin").unwrap().build(5).unwrap();
    let config = EngineConfig {
        np: 20,
        top_size: 5,
        max_fes: 4000,
        ..EngineConfig::default()
    };
    let a = run_traced(&spec, &config, 99, true).unwrap();
    let b = run_traced(&spec, &config, 99, true).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn every_catalog_problem_runs_under_a_small_budget() {
    for entry in catalog::<f64>() {
        let spec = entry.build_default();
        let config = EngineConfig {
            np: 20,
            top_size: 5,
            max_fes: 3000,
            ..EngineConfig::default()
        };
        let report = run(&spec, &config, 7).unwrap();
        assert!(report.fes_used <= 3000, "{}", entry.name);
        assert!(spec.contains(&report.best.x), "{}", entry.name);
    }
}

#[test]
fn single_precision_instantiation_runs() {
    let spec = by_name::<f32>("lin-sphere").unwrap().build(3).unwrap();
    let config = EngineConfig {
        np: 16,
        top_size: 4,
        max_fes: 2000,
        ..EngineConfig::default()
    };
    let report = run(&spec, &config, 3).unwrap();
    assert!(report.best.f >= 0.0);
    assert!(report.best.violation >= 0.0);
}
