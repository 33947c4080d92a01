use nalgebra::{DMatrix, DVector};

use crate::error::{HullError, Result};
use crate::geometry::GridSpec;
use crate::viscous::DragMatrix;
use crate::wave::WaveMatrix;

/// `min F^T Q F` subject to `F >= 0` and `alpha . F = target`.
#[derive(Debug, Clone)]
pub struct QpProblem {
    q: DMatrix<f64>,
    alpha: Vec<f64>,
    target: f64,
    drag: Option<(DragMatrix, f64)>,
}

impl QpProblem {
    pub fn new(q: DMatrix<f64>, alpha: Vec<f64>, target: f64) -> Result<Self> {
        if q.nrows() != q.ncols() {
            return Err(HullError::DimensionMismatch { expected: q.nrows(), got: q.ncols() });
        }
        if alpha.len() != q.nrows() {
            return Err(HullError::DimensionMismatch { expected: q.nrows(), got: alpha.len() });
        }
        if alpha.iter().any(|&a| !(a > 0.0)) {
            return Err(HullError::arg("alpha", "volume weights must be positive"));
        }
        if !(target.is_finite() && target >= 0.0) {
            return Err(HullError::arg("volume", format!("target must be nonnegative, got {target}")));
        }
        Ok(Self { q, alpha, target, drag: None })
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Target nodal sum `V / (dx dz)`.
    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = target;
        self
    }

    pub fn objective(&self, f: &[f64]) -> f64 {
        let x = DVector::from_column_slice(f);
        x.dot(&(&self.q * &x))
    }

    /// Viscous share `eps F^T M_d F` when the problem was built from its parts.
    pub fn viscous_part(&self, f: &[f64]) -> Option<f64> {
        self.drag.as_ref().map(|(m, eps)| eps * m.quadratic_form(f).unwrap_or(f64::NAN))
    }

    pub fn eps(&self) -> Option<f64> {
        self.drag.as_ref().map(|(_, eps)| *eps)
    }
}

/// `Q = (4 rho g v^3 / pi) M_w + eps M_d` with the volume constraint of `grid`.
pub fn combine_objective(
    grid: &GridSpec,
    wave: &WaveMatrix,
    drag: &DragMatrix,
    rho: f64,
    g: f64,
    eps: f64,
    volume: f64,
) -> Result<QpProblem> {
    let n = grid.len();
    if wave.dim() != n {
        return Err(HullError::DimensionMismatch { expected: n, got: wave.dim() });
    }
    if drag.dim() != n {
        return Err(HullError::DimensionMismatch { expected: n, got: drag.dim() });
    }
    if !(eps > 0.0) {
        return Err(HullError::arg("eps", format!("must be positive, got {eps}")));
    }
    if !(volume.is_finite() && volume >= 0.0) {
        return Err(HullError::arg("volume", format!("must be nonnegative, got {volume}")));
    }
    let v = wave.kelvin_wavenumber();
    let prefactor = 4.0 * rho * g * v * v * v / std::f64::consts::PI;
    let mut q = wave.matrix() * prefactor;
    drag.add_to_dense(&mut q, eps);
    let mut problem = QpProblem::new(q, grid.volume_weights(), volume / grid.cell_area())?;
    problem.drag = Some((drag.clone(), eps));
    Ok(problem)
}
