use hullopt::analysis::{drag_optimum, froude_sweep, wigley_compare, Study};
use hullopt::config::RunConfig;
use hullopt::geometry::{forward_half_centroid, hull_from_csv, hull_to_csv, wigley_hull};
use hullopt::solver::UzawaOptions;
use hullopt::wave::{wave_resistance_direct, DirectOptions, LambdaQuadrature};

fn norm(alpha: &[f64], a: &[f64]) -> f64 {
    alpha.iter().zip(a).map(|(w, x)| w * x * x).sum::<f64>().sqrt()
}

fn small_study() -> Study {
    let mut cfg = RunConfig::default();
    cfg.grid.nx = 40;
    cfg.grid.nz = 8;
    Study::new(&cfg).unwrap()
}

#[test]
fn slow_and_fast_hulls_approach_the_drag_optimum() {
    let study = Study::new(&RunConfig::default()).unwrap();
    let alpha = study.grid().volume_weights();
    let pure = drag_optimum(&study, &UzawaOptions::default()).unwrap();
    let slow = study.solve(0.1).unwrap().report.f;
    let fast = study.solve(2.0).unwrap().report.f;
    // distances relative to the common reference, the drag-only optimum
    let scale = norm(&alpha, &pure);
    let dist = |a: &[f64], b: &[f64]| {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        norm(&alpha, &d) / scale
    };
    let d = [dist(&slow, &pure), dist(&fast, &pure), dist(&slow, &fast)];
    assert!(d.iter().all(|&x| x <= 0.1), "{d:?}");
}

#[test]
fn wigley_wave_resistance_has_a_hump() {
    let study = Study::new(&RunConfig::default()).unwrap();
    let frs = [0.2, 0.25, 0.3, 0.35, 0.4, 0.5, 0.7];
    let cmp = wigley_compare(&study, 0.5, &frs, 4).unwrap();
    let w: Vec<f64> = cmp.rows.iter().map(|r| r.wigley_wave).collect();
    // an interior local maximum of the wave part
    assert!((1..w.len() - 1).any(|i| w[i] > w[i - 1] && w[i] > w[i + 1]), "{w:?}");
}

#[test]
fn a_single_design_is_beaten_by_wigley_somewhere() {
    let study = small_study();
    let frs = [0.1, 0.3, 0.5, 1.0, 2.0];
    let cmp = wigley_compare(&study, 0.5, &frs, 2).unwrap();
    let at_design = cmp.rows.iter().find(|r| r.fr == 0.5).unwrap();
    assert!(at_design.design <= at_design.wigley);
    assert!(!cmp.wigley_wins().is_empty());
    for r in &cmp.rows {
        assert!(r.optimized <= r.wigley * (1.0 + 1e-9), "fr {}", r.fr);
        assert!(r.optimized <= r.design * (1.0 + 1e-9), "fr {}", r.fr);
    }
}

#[test]
fn matrix_and_direct_paths_agree_on_wigley() {
    let study = small_study();
    let cfg = study.config();
    let flow = cfg.flow_at(0.5).unwrap();
    let grid = study.grid();
    let hull = wigley_hull(grid, cfg.physical.volume).unwrap();
    let quad = LambdaQuadrature::uniform(20, 8).unwrap();
    let v = flow.kelvin_wavenumber();
    let wave = hullopt::wave::assemble_mw(grid, v, &quad).unwrap();
    let matrix = wave.resistance(&hull.values, flow.rho, flow.g).unwrap();
    let values = hull.values.clone();
    let f = |x: f64, z: f64| hullopt::geometry::eval_hull(grid, &values, x, z).unwrap_or(0.0);
    let opts = DirectOptions::uniform(grid.length(), grid.draft(), grid.nx(), grid.nz(), hull.max());
    let direct = wave_resistance_direct(&f, flow.rho, flow.g, v, &quad, &opts);
    assert!((matrix - direct).abs() <= 1e-8 * direct, "{matrix} vs {direct}");
}

#[test]
fn sweep_records_round_trip_through_csv() {
    let study = small_study();
    let points = froude_sweep(&study, &[0.4, 0.8], 2).unwrap();
    for p in points {
        let sol = p.outcome.unwrap();
        let text = hull_to_csv(study.grid(), &sol.report.f).unwrap();
        let back = hull_from_csv(study.grid(), &text).unwrap();
        let (x, z) = forward_half_centroid(study.grid(), &back.values).unwrap();
        assert!((x - sol.centroid.0).abs() <= 1e-12 && (z - sol.centroid.1).abs() <= 1e-12);
    }
}
