use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::basis::{a_sum, b_minus, b_plus};
use super::quadrature::LambdaQuadrature;
use crate::error::{HullError, Result};
use crate::geometry::GridSpec;

/// Largest dense matrix the assembly will try to allocate, in bytes.
pub const MAX_DENSE_BYTES: usize = 4 << 30;

/// Geometric part of the discrete Michell quadratic form.
///
/// `R = (4 rho g v^3 / pi) F^T M F`; only `M` is stored, so one assembly
/// serves every `rho`, `g` at a fixed Kelvin wave number `v`.
#[derive(Debug, Clone)]
pub struct WaveMatrix {
    matrix: DMatrix<f64>,
    v: f64,
    quadrature: LambdaQuadrature,
}

impl WaveMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn kelvin_wavenumber(&self) -> f64 {
        self.v
    }

    pub fn quadrature(&self) -> &LambdaQuadrature {
        &self.quadrature
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `F^T M F` without the physical prefactor.
    pub fn quadratic_form(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.dim() {
            return Err(HullError::DimensionMismatch { expected: self.dim(), got: f.len() });
        }
        let x = DVector::from_column_slice(f);
        Ok(x.dot(&(&self.matrix * &x)).max(0.0))
    }

    /// Wave resistance in newtons.
    pub fn resistance(&self, f: &[f64], rho: f64, g: f64) -> Result<f64> {
        let v = self.v;
        Ok(4.0 * rho * g * v * v * v / std::f64::consts::PI * self.quadratic_form(f)?)
    }

    /// Dense rows as CSV, for debugging small grids.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.matrix.row_iter() {
            let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// `(J(lambda))_i = int e^{-lambda^2 v z} cos(lambda v x) e_i dx dz` for every free node.
pub fn j_vector(grid: &GridSpec, v: f64, lambda: f64) -> Vec<f64> {
    let (dx, dz) = (grid.dx(), grid.dz());
    let inv_area = 1.0 / grid.cell_area();
    // x and z factors are shared along rows and columns of the lattice
    let ax: Vec<f64> = (0..=grid.nx()).map(|ix| a_sum(lambda, v, grid.x_at(ix), dx)).collect();
    let bz: Vec<f64> = (0..=grid.nz())
        .map(|iz| {
            let z = grid.z_at(iz);
            b_plus(lambda, v, z, dz) + b_minus(lambda, v, z, dz)
        })
        .collect();
    grid.nodes().iter().map(|n| inv_area * ax[n.ix] * bz[n.iz]).collect()
}

pub fn wave_resistance(f: &[f64], wave: &WaveMatrix, rho: f64, g: f64) -> Result<f64> {
    wave.resistance(f, rho, g)
}

fn try_zeros(rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    let len = rows.checked_mul(cols);
    let bytes = len.and_then(|l| l.checked_mul(8)).unwrap_or(usize::MAX);
    if bytes > MAX_DENSE_BYTES {
        return Err(HullError::Allocation { rows, cols, bytes });
    }
    let mut buf = Vec::new();
    buf.try_reserve_exact(rows * cols).map_err(|_| HullError::Allocation { rows, cols, bytes })?;
    buf.resize(rows * cols, 0.0);
    Ok(DMatrix::from_vec(rows, cols, buf))
}

/// Columns `sqrt(omega_j) J(lambda_j)` for the nodes in `range`.
fn scaled_columns(
    grid: &GridSpec,
    v: f64,
    quad: &LambdaQuadrature,
    range: std::ops::Range<usize>,
    parallel: bool,
) -> Result<DMatrix<f64>> {
    let n = grid.len();
    let mut cols = try_zeros(n, range.len())?;
    let fill = |(j, col): (usize, &mut [f64])| {
        let idx = range.start + j;
        let s = quad.weights()[idx].sqrt();
        for (c, jv) in col.iter_mut().zip(j_vector(grid, v, quad.nodes()[idx])) {
            *c = s * jv;
        }
    };
    let slice = cols.as_mut_slice();
    if parallel {
        slice.par_chunks_mut(n).enumerate().for_each(fill);
    } else {
        slice.chunks_mut(n).enumerate().for_each(fill);
    }
    Ok(cols)
}

fn check_quadrature(quad: &LambdaQuadrature) -> Result<()> {
    if quad.weights().iter().any(|&w| !(w >= 0.0)) {
        return Err(HullError::arg("quadrature", "weights must be nonnegative"));
    }
    Ok(())
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in j + 1..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// `M_w = sum_j omega_j J(lambda_j) J(lambda_j)^T`, accumulated in ascending lambda.
pub fn assemble_mw(grid: &GridSpec, v: f64, quad: &LambdaQuadrature) -> Result<WaveMatrix> {
    assemble_impl(grid, v, quad, false)
}

/// Same as [`assemble_mw`] with the J vectors evaluated on the rayon pool.
pub fn assemble_mw_parallel(grid: &GridSpec, v: f64, quad: &LambdaQuadrature) -> Result<WaveMatrix> {
    assemble_impl(grid, v, quad, true)
}

fn assemble_impl(grid: &GridSpec, v: f64, quad: &LambdaQuadrature, parallel: bool) -> Result<WaveMatrix> {
    if !(v > 0.0) {
        return Err(HullError::arg("v", format!("must be positive, got {v}")));
    }
    check_quadrature(quad)?;
    let n = grid.len();
    let cols = scaled_columns(grid, v, quad, 0..quad.len(), parallel)?;
    let mut matrix = try_zeros(n, n)?;
    matrix.gemm(1.0, &cols, &cols.transpose(), 0.0);
    symmetrize(&mut matrix);
    Ok(WaveMatrix { matrix, v, quadrature: quad.clone() })
}

/// Chooses the number of octaves `K` for a grid and wave number.
///
/// Octaves of `n_per_octave` midpoints are added until the Frobenius norm of
/// the latest octave's contribution drops below `tol` times the norm of the
/// accumulated matrix, or `k_max` octaves are reached. Norms are computed
/// from Gram matrices of the scaled J columns, never from `N x N` products.
pub fn select_quadrature(
    grid: &GridSpec,
    v: f64,
    n_per_octave: usize,
    k_max: usize,
    tol: f64,
) -> Result<LambdaQuadrature> {
    if k_max == 0 {
        return Err(HullError::arg("k_lambda_max", "must be at least 1"));
    }
    let full = LambdaQuadrature::uniform(n_per_octave, k_max)?;
    if tol <= 0.0 {
        return Ok(full);
    }
    let mut kept = scaled_columns(grid, v, &full, 0..full.octave_range(0).end, false)?;
    let gram = kept.tr_mul(&kept);
    let mut acc_sq = gram.norm_squared();
    let mut k_used = 1;
    for k in 1..k_max {
        let block = scaled_columns(grid, v, &full, full.octave_range(k), false)?;
        let own = block.tr_mul(&block).norm_squared();
        let cross = block.tr_mul(&kept).norm_squared();
        let before = acc_sq;
        acc_sq += own + 2.0 * cross;
        k_used = k + 1;
        let m = kept.ncols();
        kept = kept.insert_columns(m, block.ncols(), 0.0);
        kept.columns_mut(m, block.ncols()).copy_from(&block);
        if own.sqrt() < tol * before.sqrt() {
            break;
        }
    }
    LambdaQuadrature::uniform(n_per_octave, k_used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_grid;

    #[test]
    fn mirror_nodes_have_equal_components() {
        let g = build_grid(2.0, 0.2, 10, 4).unwrap();
        let j = j_vector(&g, 0.5, 3.7);
        for i in 0..g.len() {
            assert_eq!(j[i], j[g.mirror_index(i)]);
        }
    }

    #[test]
    fn single_node_rule_is_rank_one() {
        let g = build_grid(2.0, 0.2, 6, 3).unwrap();
        let q = LambdaQuadrature::single_node(80).unwrap();
        let w = assemble_mw(&g, 0.5, &q).unwrap();
        let svd = w.matrix().clone().singular_values();
        let max = svd.max();
        assert_eq!(svd.iter().filter(|&&s| s > 1e-12 * max).count(), 1);
    }

    #[test]
    fn assembly_is_symmetric_and_parallel_matches() {
        let g = build_grid(2.0, 0.2, 12, 5).unwrap();
        let q = LambdaQuadrature::uniform(20, 6).unwrap();
        let a = assemble_mw(&g, 0.5, &q).unwrap();
        let b = assemble_mw_parallel(&g, 0.5, &q).unwrap();
        assert_eq!(a.matrix(), &a.matrix().transpose());
        let diff = (a.matrix() - b.matrix()).norm() / a.matrix().norm();
        assert!(diff <= 1e-13);
    }

    #[test]
    fn resistance_scales_quadratically() {
        let g = build_grid(2.0, 0.2, 8, 4).unwrap();
        let q = LambdaQuadrature::uniform(10, 6).unwrap();
        let w = assemble_mw(&g, 1.0, &q).unwrap();
        let f: Vec<f64> = (0..g.len()).map(|i| 0.01 * (1.0 + (i % 3) as f64)).collect();
        let r = w.resistance(&f, 1000.0, 9.81).unwrap();
        let f3: Vec<f64> = f.iter().map(|x| 3.0 * x).collect();
        let r3 = w.resistance(&f3, 1000.0, 9.81).unwrap();
        assert!((r3 - 9.0 * r).abs() <= 1e-12 * r3);
        assert_eq!(w.resistance(&vec![0.0; g.len()], 1000.0, 9.81).unwrap(), 0.0);
        assert!(w.resistance(&[1.0], 1000.0, 9.81).is_err());
    }

    #[test]
    fn octave_selection_stops_before_cap() {
        let g = build_grid(2.0, 0.2, 20, 4).unwrap();
        // the tail decays only algebraically, so a loose tolerance is needed to stop early
        let loose = select_quadrature(&g, 0.5, 40, 14, 1e-4).unwrap();
        let tight = select_quadrature(&g, 0.5, 40, 14, 1e-12).unwrap();
        assert!(loose.k_lambda() >= 3 && loose.k_lambda() < 14, "K = {}", loose.k_lambda());
        assert!(tight.k_lambda() >= loose.k_lambda());
        let fixed = select_quadrature(&g, 0.5, 80, 5, 0.0).unwrap();
        assert_eq!(fixed.k_lambda(), 5);
    }

    #[test]
    fn oversized_matrix_is_an_error() {
        assert!(matches!(try_zeros(1 << 20, 1 << 20), Err(HullError::Allocation { .. })));
    }
}
