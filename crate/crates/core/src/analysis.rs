//! Parameter studies built on the solver: spectrum census, boundary-layer
//! scaling in `eps`, Froude sweeps and the Wigley comparison.

use std::fmt::Write as _;

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::config::{InitKind, RunConfig};
use crate::error::{HullError, Result};
use crate::geometry::{forward_half_centroid, read_hull_csv, wigley_hull, FlowParams, GridSpec, HullCoefficients};
use crate::solver::{combine_objective, uzawa_solve, QpProblem, SolveReport, UzawaOptions};
use crate::viscous::{assemble_md, DragMatrix};
use crate::wave::{assemble_mw_parallel, select_quadrature, WaveMatrix};

/// Grid, drag matrix and settings shared by all solves of one configuration.
#[derive(Debug, Clone)]
pub struct Study {
    cfg: RunConfig,
    grid: GridSpec,
    drag: DragMatrix,
}

/// One converged solve.
#[derive(Debug, Clone)]
pub struct PointSolution {
    pub flow: FlowParams,
    pub eps: f64,
    pub report: SolveReport,
    /// Centroid of the forward half `x <= 0`.
    pub centroid: (f64, f64),
}

impl Study {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid_spec()?;
        let drag = assemble_md(&grid);
        Ok(Self { cfg: cfg.clone(), grid, drag })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn drag(&self) -> &DragMatrix {
        &self.drag
    }

    pub fn wave_matrix(&self, flow: &FlowParams) -> Result<WaveMatrix> {
        let q = &self.cfg.quadrature;
        let v = flow.kelvin_wavenumber();
        let quad = select_quadrature(&self.grid, v, q.n_per_octave, q.k_lambda_max, q.tol)?;
        assemble_mw_parallel(&self.grid, v, &quad)
    }

    pub fn problem(&self, wave: &WaveMatrix, flow: &FlowParams, eps: f64) -> Result<QpProblem> {
        combine_objective(&self.grid, wave, &self.drag, flow.rho, flow.g, eps, self.cfg.physical.volume)
    }

    /// Starting hull selected by `solver.init`, scaled to the target volume.
    pub fn initial_hull(&self) -> Result<HullCoefficients> {
        let volume = self.cfg.physical.volume;
        match self.cfg.solver.init {
            InitKind::Flat => HullCoefficients::flat(&self.grid, volume),
            InitKind::Wigley => wigley_hull(&self.grid, volume),
            InitKind::File => {
                let path = self.cfg.solver.init_file.as_deref().ok_or_else(|| {
                    HullError::arg("solver.init_file", "required when init = \"file\"")
                })?;
                read_hull_csv(&self.grid, path)
            }
        }
    }

    pub fn solve_with(&self, wave: &WaveMatrix, flow: &FlowParams, eps: f64) -> Result<PointSolution> {
        let problem = self.problem(wave, flow, eps)?;
        let init = self.initial_hull()?;
        let report = uzawa_solve(&problem, &self.cfg.solver.uzawa(), Some(&init.values))?;
        let centroid = forward_half_centroid(&self.grid, &report.f)?;
        Ok(PointSolution { flow: *flow, eps, report, centroid })
    }

    /// Optimal hull at Froude number `fr` with `eps` from the drag coefficient.
    pub fn solve(&self, fr: f64) -> Result<PointSolution> {
        let flow = self.cfg.flow_at(fr)?;
        let wave = self.wave_matrix(&flow)?;
        self.solve_with(&wave, &flow, flow.eps())
    }

    /// Total, wave and viscous resistance of an arbitrary hull.
    pub fn evaluate(&self, wave: &WaveMatrix, flow: &FlowParams, eps: f64, f: &[f64]) -> Result<(f64, f64, f64)> {
        let w = flow.wave_prefactor() * wave.quadratic_form(f)?;
        let d = eps * self.drag.quadratic_form(f)?;
        Ok((w + d, w, d))
    }
}


/// Largest matrix order accepted by [`spectrum`].
pub const MAX_SPECTRUM_ORDER: usize = 4000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub nx: usize,
    pub nz: usize,
    pub fr: f64,
    /// `|eigenvalue|` of `M_w`, largest first.
    pub abs_eigenvalues: Vec<f64>,
    /// Smallest signed eigenvalue.
    pub min_eigenvalue: f64,
    /// `(t, #{|mu| > t max|mu|})` for each requested relative threshold.
    pub counts: Vec<(f64, usize)>,
}

impl SpectrumReport {
    pub fn max(&self) -> f64 {
        self.abs_eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues above `t` times the largest.
    pub fn count_above(&self, t: f64) -> usize {
        let cut = t * self.max();
        self.abs_eigenvalues.iter().take_while(|&&m| m > cut).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,abs_eigenvalue\n");
        for (i, m) in self.abs_eigenvalues.iter().enumerate() {
            writeln!(out, "{i},{m:.16e}").unwrap();
        }
        out
    }
}

/// Full symmetric eigen-decomposition of the wave matrix.
pub fn spectrum(grid: &GridSpec, flow: &FlowParams, wave: &WaveMatrix, thresholds: &[f64]) -> Result<SpectrumReport> {
    let n = wave.dim();
    if n > MAX_SPECTRUM_ORDER {
        return Err(HullError::TooLarge { n, limit: MAX_SPECTRUM_ORDER });
    }
    let eig = SymmetricEigen::new(wave.matrix().clone()).eigenvalues;
    let min_eigenvalue = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let mut abs_eigenvalues: Vec<f64> = eig.iter().map(|m| m.abs()).collect();
    abs_eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let mut report = SpectrumReport {
        nx: grid.nx(),
        nz: grid.nz(),
        fr: flow.froude(),
        abs_eigenvalues,
        min_eigenvalue,
        counts: Vec::new(),
    };
    report.counts = thresholds.iter().map(|&t| (t, report.count_above(t))).collect();
    Ok(report)
}

/// Sweep outcome at one `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub eps: f64,
    /// Distance from the bow `x = -L/2` to the forward-half centroid.
    pub width: f64,
    pub xbar: f64,
    pub zbar: f64,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLayerReport {
    pub fr: f64,
    pub eps_ref: f64,
    pub records: Vec<LayerRecord>,
    /// Least-squares slope of `ln width` against `ln eps`.
    pub slope: Option<f64>,
    /// 95% confidence interval of the slope.
    pub slope_ci: Option<(f64, f64)>,
    /// Set when a solve failed; `records` then holds the points before it.
    pub failure: Option<String>,
}

impl BoundaryLayerReport {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn widths_decrease(&self) -> bool {
        let mut sorted: Vec<&LayerRecord> = self.records.iter().collect();
        sorted.sort_by(|a, b| b.eps.total_cmp(&a.eps));
        sorted.windows(2).all(|w| w[1].width < w[0].width)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,width,xbar,zbar,objective,iterations\n");
        for r in &self.records {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                r.eps, r.width, r.xbar, r.zbar, r.objective, r.iterations
            )
            .unwrap();
        }
        out
    }
}

/// Slope, intercept and 95% slope interval of an ordinary least-squares line.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<(f64, f64, (f64, f64))> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    if n < 3 {
        return Some((slope, intercept, (slope, slope)));
    }
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let se = (sse / (nf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0).ok()?.inverse_cdf(0.975);
    Some((slope, intercept, (slope - t * se, slope + t * se)))
}

/// Solves at `fr` for `eps = eps_ref * factor` and fits `width ~ eps^slope`.
pub fn boundary_layer_sweep(study: &Study, fr: f64, factors: &[f64]) -> Result<BoundaryLayerReport> {
    if factors.len() < 4 {
        return Err(HullError::arg("eps_factors", "need at least 4 values"));
    }
    if factors.iter().any(|&k| !(k.is_finite() && k > 0.0)) {
        return Err(HullError::arg("eps_factors", "values must be positive"));
    }
    let (lo, hi) = factors.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &k| (l.min(k), h.max(k)));
    if hi / lo < 1e3 * (1.0 - 1e-12) {
        return Err(HullError::arg("eps_factors", "values must span at least 3 decades"));
    }
    let flow = study.config().flow_at(fr)?;
    let wave = study.wave_matrix(&flow)?;
    let eps_ref = flow.eps();
    let half = 0.5 * study.grid().length();
    let mut report =
        BoundaryLayerReport { fr, eps_ref, records: Vec::new(), slope: None, slope_ci: None, failure: None };
    for &k in factors {
        match study.solve_with(&wave, &flow, eps_ref * k) {
            Ok(sol) => report.records.push(LayerRecord {
                eps: sol.eps,
                width: sol.centroid.0 + half,
                xbar: sol.centroid.0,
                zbar: sol.centroid.1,
                objective: sol.report.objective,
                iterations: sol.report.iterations,
            }),
            Err(e) => {
                report.failure = Some(format!("eps = {:e}: {e}", eps_ref * k));
                return Ok(report);
            }
        }
    }
    let lx: Vec<f64> = report.records.iter().map(|r| r.eps.ln()).collect();
    let ly: Vec<f64> = report.records.iter().map(|r| r.width.ln()).collect();
    if let Some((slope, _, ci)) = fit_line(&lx, &ly) {
        report.slope = Some(slope);
        report.slope_ci = Some(ci);
    }
    Ok(report)
}

/// One row of a Froude sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub fr: f64,
    pub eps: f64,
    pub objective: f64,
    pub wave: f64,
    pub viscous: f64,
    pub xbar: f64,
    pub zbar: f64,
    /// Hull CSV written for this point, relative to the output directory.
    pub hull_file: Option<String>,
}

impl SweepRecord {
    pub fn from_solution(sol: &PointSolution) -> Self {
        Self {
            fr: sol.flow.froude(),
            eps: sol.eps,
            objective: sol.report.objective,
            wave: sol.report.wave_part,
            viscous: sol.report.viscous_part,
            xbar: sol.centroid.0,
            zbar: sol.centroid.1,
            hull_file: None,
        }
    }
}

/// Outcome of one sweep point; failures do not stop the sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub fr: f64,
    pub outcome: std::result::Result<PointSolution, String>,
}

/// Runs `f` over `items` on `jobs` threads, keeping the input order.
pub fn run_ordered<T, R>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync + Send) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
{
    if jobs <= 1 {
        return Ok(items.iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HullError::arg("jobs", e.to_string()))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

/// Optimal hull at each Froude number, `eps` following the drag coefficient.
pub fn froude_sweep(study: &Study, frs: &[f64], jobs: usize) -> Result<Vec<SweepPoint>> {
    if let Some(&fr) = frs.iter().find(|&&fr| !(fr.is_finite() && fr > 0.0)) {
        return Err(HullError::arg("fr", format!("must be positive, got {fr}")));
    }
    run_ordered(frs, jobs, |&fr| SweepPoint { fr, outcome: study.solve(fr).map_err(|e| e.to_string()) })
}

pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from("fr,eps,objective,wave,viscous,xbar,zbar,hull_file\n");
    for r in records {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.fr,
            r.eps,
            r.objective,
            r.wave,
            r.viscous,
            r.xbar,
            r.zbar,
            r.hull_file.as_deref().unwrap_or("")
        )
        .unwrap();
    }
    out
}

/// Resistances at one Froude number in the Wigley comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WigleyRow {
    pub fr: f64,
    /// Hull optimized at this Froude number.
    pub optimized: f64,
    /// Hull optimized at the design Froude number.
    pub design: f64,
    pub wigley: f64,
    pub optimized_wave: f64,
    pub design_wave: f64,
    pub wigley_wave: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WigleyComparison {
    pub design_fr: f64,
    pub rows: Vec<WigleyRow>,
}

impl WigleyComparison {
    /// Froude numbers where the Wigley hull beats the design hull.
    pub fn wigley_wins(&self) -> Vec<f64> {
        self.rows.iter().filter(|r| r.wigley < r.design).map(|r| r.fr).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("fr,optimized,design,wigley,optimized_wave,design_wave,wigley_wave\n");
        for r in &self.rows {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.fr, r.optimized, r.design, r.wigley, r.optimized_wave, r.design_wave, r.wigley_wave
            )
            .unwrap();
        }
        out
    }
}

/// Compares the hull optimized at `design_fr`, the hull optimized at each
/// `fr` and the Wigley hull of the same volume.
pub fn wigley_compare(study: &Study, design_fr: f64, frs: &[f64], jobs: usize) -> Result<WigleyComparison> {
    let wigley = wigley_hull(study.grid(), study.config().physical.volume)?;
    let design = study.solve(design_fr)?;
    let rows = run_ordered(frs, jobs, |&fr| -> Result<WigleyRow> {
        let flow = study.config().flow_at(fr)?;
        let wave = study.wave_matrix(&flow)?;
        let eps = flow.eps();
        let own = study.solve_with(&wave, &flow, eps)?;
        let (optimized, optimized_wave, _) = study.evaluate(&wave, &flow, eps, &own.report.f)?;
        let (design_total, design_wave, _) = study.evaluate(&wave, &flow, eps, &design.report.f)?;
        let (wig, wigley_wave, _) = study.evaluate(&wave, &flow, eps, &wigley.values)?;
        Ok(WigleyRow { fr, optimized, design: design_total, wigley: wig, optimized_wave, design_wave, wigley_wave })
    })?;
    Ok(WigleyComparison { design_fr, rows: rows.into_iter().collect::<Result<_>>()? })
}

/// Bulbous-bow indicator of a hull.
///
/// The forward quadrant is `x in [-L/2, -L/4]`, `z in [T/2, T]`. The hull has
/// a bulb when, in some column of that quadrant, the lower half is fuller
/// than the waterline above it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BowCheck {
    /// Largest nodal value over the forward quadrant.
    pub lower_forward_max: f64,
    /// Nodal value next to the stem on the waterline, at `(-L/2 + dx, 0)`.
    pub stem_waterline: f64,
    /// `lower_forward_max > stem_waterline`. Any hull vanishing at the stem
    /// satisfies this, so it is reported but not used for `fires`.
    pub stem_rule: bool,
    /// Largest excess of the lower column maximum over the waterline value.
    pub bulge: f64,
    /// x coordinate of the column attaining `bulge`.
    pub bulge_x: f64,
    pub fires: bool,
}

pub fn bulbous_bow(grid: &GridSpec, f: &[f64]) -> Result<BowCheck> {
    if f.len() != grid.len() {
        return Err(HullError::DimensionMismatch { expected: grid.len(), got: f.len() });
    }
    let (l, t) = (grid.length(), grid.draft());
    let slack = 1e-12 * l.max(t);
    let mut lower_forward_max = 0.0f64;
    let (mut bulge, mut bulge_x) = (f64::NEG_INFINITY, f64::NAN);
    for ix in 1..grid.nx() {
        let x = grid.x_at(ix);
        if x > -0.25 * l + slack {
            break;
        }
        let lower = (0..=grid.nz())
            .filter(|&iz| grid.z_at(iz) >= 0.5 * t - slack)
            .map(|iz| grid.lattice_value(f, ix, iz))
            .fold(0.0, f64::max);
        lower_forward_max = lower_forward_max.max(lower);
        let excess = lower - grid.lattice_value(f, ix, 0);
        if excess > bulge {
            bulge = excess;
            bulge_x = x;
        }
    }
    let stem_waterline = grid.lattice_value(f, 1, 0);
    Ok(BowCheck {
        lower_forward_max,
        stem_waterline,
        stem_rule: lower_forward_max > stem_waterline,
        bulge,
        bulge_x,
        fires: bulge > 0.0,
    })
}

/// Minimizer of the gradient energy alone under the same constraints.
pub fn drag_optimum(study: &Study, opts: &UzawaOptions) -> Result<Vec<f64>> {
    let q = study.drag().to_dense();
    let grid = study.grid();
    let problem = QpProblem::new(q, grid.volume_weights(), study.config().physical.volume / grid.cell_area())?;
    Ok(uzawa_solve(&problem, opts, None)?.f)
}
