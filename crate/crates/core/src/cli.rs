//! Command-line front end of the `hullopt` binary.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{
    boundary_layer_sweep, bulbous_bow, froude_sweep, spectrum, sweep_csv, wigley_compare, PointSolution, Study,
    SweepRecord,
};
use crate::config::{InitKind, RunConfig};
use crate::error::{HullError, Result};
use crate::geometry::hull_to_csv;
use crate::validate::run_checks;

#[derive(Debug, Parser)]
#[command(name = "hullopt", version, about = "Optimal thin-ship hulls under wave and viscous resistance")]
pub struct Cli {
    /// TOML configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for sweeps; 1 keeps runs sequential.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Seed of the random fixtures used by `validate`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

/// Command-line values that replace configuration keys.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Cells along the length.
    #[arg(long, global = true)]
    pub nx: Option<usize>,
    /// Cells over the draft.
    #[arg(long, global = true)]
    pub nz: Option<usize>,
    /// Viscous drag coefficient.
    #[arg(long, global = true)]
    pub cd: Option<f64>,
    /// Uzawa step on the sign multiplier.
    #[arg(long, global = true)]
    pub dr1: Option<f64>,
    /// Uzawa step on the volume multiplier.
    #[arg(long, global = true)]
    pub dr2: Option<f64>,
    /// Relative stopping tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Iteration budget per solve.
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Starting hull.
    #[arg(long, global = true, value_enum)]
    pub init: Option<InitArg>,
    /// Hull CSV for `--init file`.
    #[arg(long, global = true)]
    pub init_file: Option<PathBuf>,
    /// Lambda nodes per octave.
    #[arg(long, global = true)]
    pub n_octave: Option<usize>,
    /// Largest number of lambda octaves.
    #[arg(long, global = true)]
    pub k_lambda_max: Option<usize>,
    /// Octave truncation tolerance; 0 keeps all octaves.
    #[arg(long, global = true)]
    pub quad_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum InitArg {
    Flat,
    Wigley,
    File,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal hull at one speed.
    Optimize {
        #[arg(long, conflicts_with = "speed", allow_negative_numbers = true)]
        fr: Option<f64>,
        /// Speed in m/s.
        #[arg(long, allow_negative_numbers = true)]
        speed: Option<f64>,
    },
    /// Optimal hulls over the configured Froude numbers.
    Sweep {
        /// Comma-separated Froude numbers replacing `experiment.froude`.
        #[arg(long, value_delimiter = ',')]
        fr: Option<Vec<f64>>,
    },
    /// Eigenvalue census of the wave matrix.
    Spectrum {
        #[arg(long, default_value_t = 1.0)]
        fr: f64,
    },
    /// Width of the volume layer at the bow as eps goes to zero.
    Blayer {
        #[arg(long)]
        fr: Option<f64>,
    },
    /// Optimized hulls against the Wigley hull.
    Wigley {
        #[arg(long)]
        design_fr: Option<f64>,
    },
    /// Cross-checks of closed forms and solver against reference methods.
    Validate,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.nx {
            cfg.grid.nx = v;
        }
        if let Some(v) = self.nz {
            cfg.grid.nz = v;
        }
        if let Some(v) = self.cd {
            cfg.physical.cd = v;
        }
        if let Some(v) = self.dr1 {
            cfg.solver.dr1 = Some(v);
        }
        if let Some(v) = self.dr2 {
            cfg.solver.dr2 = Some(v);
        }
        if let Some(v) = self.tol {
            cfg.solver.tol = v;
        }
        if let Some(v) = self.max_iter {
            cfg.solver.max_iter = v;
        }
        if let Some(v) = self.init {
            cfg.solver.init = match v {
                InitArg::Flat => InitKind::Flat,
                InitArg::Wigley => InitKind::Wigley,
                InitArg::File => InitKind::File,
            };
        }
        if let Some(v) = &self.init_file {
            cfg.solver.init_file = Some(v.clone());
        }
        if let Some(v) = self.n_octave {
            cfg.quadrature.n_per_octave = v;
        }
        if let Some(v) = self.k_lambda_max {
            cfg.quadrature.k_lambda_max = v;
        }
        if let Some(v) = self.quad_tol {
            cfg.quadrature.tol = v;
        }
    }
}

/// Process exit status for an error.
pub fn exit_code(err: &HullError) -> i32 {
    match err {
        HullError::Config(_)
        | HullError::InvalidArgument { .. }
        | HullError::InvalidGrid(_)
        | HullError::Parse(_)
        | HullError::TooLarge { .. } => 1,
        HullError::Divergence { .. } | HullError::StepSizeFault { .. } => 2,
        _ => 3,
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| HullError::Parse(e.to_string()))?;
    text.push('\n');
    write_atomic(path, &text)
}

/// Configuration after the file and the command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cli.overrides.apply(&mut cfg);
    if let Command::Optimize { fr, speed } = &cli.command {
        if fr.is_some() || speed.is_some() {
            cfg.physical.fr = *fr;
            cfg.physical.speed = *speed;
        }
    }
    cfg.validate()?;
    if cli.jobs == 0 {
        return Err(HullError::arg("jobs", "must be at least 1"));
    }
    Ok(cfg)
}

fn solution_json(study: &Study, sol: &PointSolution) -> Result<serde_json::Value> {
    let r = &sol.report;
    let g = study.grid();
    Ok(json!({
        "objective": r.objective,
        "wave_part": r.wave_part,
        "viscous_part": r.viscous_part,
        "iterations": r.iterations,
        "residuals": {
            "stationarity": r.residuals.stationarity,
            "feasibility": r.residuals.feasibility,
            "complementarity": r.residuals.complementarity,
        },
        "fr": sol.flow.froude(),
        "speed": sol.flow.speed,
        "eps": sol.eps,
        "grid": { "nx": g.nx(), "nz": g.nz(), "L": g.length(), "T": g.draft() },
        "xbar": sol.centroid.0,
        "zbar": sol.centroid.1,
        "lambda2": r.lambda2,
        "dr1": r.dr1,
        "dr2": r.dr2,
        "bow": bulbous_bow(g, &r.f)?,
    }))
}

fn with_config(mut value: serde_json::Value, cfg: &RunConfig) -> serde_json::Value {
    value["config"] = serde_json::to_value(cfg).expect("config serializes");
    value
}

fn hull_name(fr: f64) -> String {
    format!("hull_fr{fr:.4}.csv")
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: &Cli) -> Result<i32> {
    let cfg = resolve_config(cli)?;
    let out = &cli.out;
    write_json(&out.join("config.json"), &cfg)?;
    match &cli.command {
        Command::Optimize { .. } => {
            let study = Study::new(&cfg)?;
            let flow = cfg.flow()?;
            let wave = study.wave_matrix(&flow)?;
            let sol = study.solve_with(&wave, &flow, flow.eps())?;
            write_atomic(&out.join("hull.csv"), &hull_to_csv(study.grid(), &sol.report.f)?)?;
            let mut report = solution_json(&study, &sol)?;
            report["k_lambda"] = json!(wave.quadrature().k_lambda());
            write_json(&out.join("report.json"), &with_config(report, &cfg))?;
            println!(
                "fr {:.4}: objective {:.6e} (wave {:.6e}, viscous {:.6e}) in {} iterations",
                sol.flow.froude(),
                sol.report.objective,
                sol.report.wave_part,
                sol.report.viscous_part,
                sol.report.iterations
            );
            Ok(0)
        }
        Command::Sweep { fr } => {
            let frs = fr.clone().unwrap_or_else(|| cfg.experiment.froude.clone());
            let study = Study::new(&cfg)?;
            let points = froude_sweep(&study, &frs, cli.jobs)?;
            let mut records = Vec::new();
            let mut failures = Vec::new();
            for p in &points {
                match &p.outcome {
                    Ok(sol) => {
                        let name = hull_name(p.fr);
                        write_atomic(&out.join("sweep").join(&name), &hull_to_csv(study.grid(), &sol.report.f)?)?;
                        let mut rec = SweepRecord::from_solution(sol);
                        rec.hull_file = Some(format!("sweep/{name}"));
                        println!("fr {:.4}: objective {:.6e}", p.fr, rec.objective);
                        records.push(rec);
                    }
                    Err(e) => {
                        eprintln!("fr {:.4}: {e}", p.fr);
                        failures.push(json!({ "fr": p.fr, "error": e }));
                    }
                }
            }
            write_atomic(&out.join("sweep.csv"), &sweep_csv(&records))?;
            let summary = json!({ "records": records, "failures": failures });
            write_json(&out.join("sweep.json"), &with_config(summary, &cfg))?;
            Ok(if failures.is_empty() { 0 } else { 2 })
        }
        Command::Spectrum { fr } => {
            let study = Study::new(&cfg)?;
            let flow = cfg.flow_at(*fr)?;
            let wave = study.wave_matrix(&flow)?;
            let report = spectrum(study.grid(), &flow, &wave, &cfg.experiment.thresholds)?;
            write_atomic(&out.join("spectrum.csv"), &report.to_csv())?;
            let summary = json!({
                "nx": report.nx,
                "nz": report.nz,
                "fr": report.fr,
                "n": report.abs_eigenvalues.len(),
                "max_eigenvalue": report.max(),
                "min_eigenvalue": report.min_eigenvalue,
                "counts": report.counts.iter().map(|(t, c)| json!({ "threshold": t, "count": c })).collect::<Vec<_>>(),
            });
            for (t, c) in &report.counts {
                println!("eigenvalues above {t:e} * max: {c}");
            }
            write_json(&out.join("spectrum.json"), &with_config(summary, &cfg))?;
            Ok(0)
        }
        Command::Blayer { fr } => {
            let study = Study::new(&cfg)?;
            let fr = fr.unwrap_or(cfg.experiment.blayer_fr);
            let report = boundary_layer_sweep(&study, fr, &cfg.experiment.eps_factors)?;
            write_atomic(&out.join("blayer.csv"), &report.to_csv())?;
            let value = serde_json::to_value(&report).map_err(|e| HullError::Parse(e.to_string()))?;
            write_json(&out.join("blayer.json"), &with_config(value, &cfg))?;
            if let (Some(s), Some((lo, hi))) = (report.slope, report.slope_ci) {
                println!("width ~ eps^{s:.4} (95% interval [{lo:.4}, {hi:.4}])");
            }
            match &report.failure {
                Some(e) => {
                    eprintln!("sweep stopped: {e}");
                    Ok(2)
                }
                None => Ok(0),
            }
        }
        Command::Wigley { design_fr } => {
            let study = Study::new(&cfg)?;
            let design = design_fr.unwrap_or(cfg.experiment.design_fr);
            let table = wigley_compare(&study, design, &cfg.experiment.froude, cli.jobs)?;
            write_atomic(&out.join("wigley.csv"), &table.to_csv())?;
            let value = serde_json::to_value(&table).map_err(|e| HullError::Parse(e.to_string()))?;
            write_json(&out.join("wigley.json"), &with_config(value, &cfg))?;
            println!("Wigley hull beats the Fr = {design} design at Fr = {:?}", table.wigley_wins());
            Ok(0)
        }
        Command::Validate => {
            let checks = run_checks(cli.seed)?;
            for c in &checks {
                println!("{} {}: {:.3e} (tol {:.1e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.tol);
            }
            write_json(&out.join("validate.json"), &with_config(json!({ "seed": cli.seed, "checks": checks }), &cfg))?;
            Ok(if checks.iter().all(|c| c.pass) { 0 } else { 3 })
        }
    }
}
