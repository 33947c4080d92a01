//! Rectangular hull domain, Q1 nodal basis and reference hulls.
//!
//! The half hull is the graph `y = f(x, z)` over `(-L/2, L/2) x (0, T)` with
//! `z` pointing down. Only nodes strictly inside the domain and nodes on the
//! waterline `z = 0` carry a degree of freedom; the hull vanishes on the two
//! ends and on the keel line `z = T`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HullError, Result};

/// Where a free node sits in the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    /// Column index, `0..=nx`.
    pub ix: usize,
    /// Row index, `0..=nz`, with row 0 on the waterline.
    pub iz: usize,
    pub x: f64,
    pub z: f64,
    pub kind: NodeKind,
}

/// Cartesian grid over the hull domain with the free-node numbering.
///
/// Interior nodes come first in row-major order (z outer, x inner), followed
/// by the waterline nodes by increasing x.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    length: f64,
    draft: f64,
    nx: usize,
    nz: usize,
    dx: f64,
    dz: f64,
    nodes: Vec<Node>,
    /// Free index of every lattice point, row-major over `(nz+1) x (nx+1)`.
    lattice: Vec<Option<usize>>,
}

impl GridSpec {
    pub fn new(length: f64, draft: f64, nx: usize, nz: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(HullError::InvalidGrid(format!("length must be positive, got {length}")));
        }
        if !(draft.is_finite() && draft > 0.0) {
            return Err(HullError::InvalidGrid(format!("draft must be positive, got {draft}")));
        }
        if nx < 2 || nz < 2 {
            return Err(HullError::InvalidGrid(format!(
                "need at least 2 cells in each direction, got {nx} x {nz}"
            )));
        }
        let dx = length / nx as f64;
        let dz = draft / nz as f64;
        let n_int = (nx - 1) * (nz - 1);
        let mut nodes = Vec::with_capacity(n_int + nx - 1);
        let mut lattice = vec![None; (nx + 1) * (nz + 1)];

        let x_of = |ix: usize| (2.0 * ix as f64 - nx as f64) * (0.5 * dx);
        for iz in 1..nz {
            for ix in 1..nx {
                lattice[iz * (nx + 1) + ix] = Some(nodes.len());
                nodes.push(Node { ix, iz, x: x_of(ix), z: iz as f64 * dz, kind: NodeKind::Interior });
            }
        }
        for ix in 1..nx {
            lattice[ix] = Some(nodes.len());
            nodes.push(Node { ix, iz: 0, x: x_of(ix), z: 0.0, kind: NodeKind::Surface });
        }

        Ok(Self { length, draft, nx, nz, dx, dz, nodes, lattice })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn draft(&self) -> f64 {
        self.draft
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dz
    }

    /// Number of degrees of freedom `N`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_interior(&self) -> usize {
        (self.nx - 1) * (self.nz - 1)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    /// Free index of lattice point `(ix, iz)`, `None` on constrained boundaries.
    pub fn index_of(&self, ix: usize, iz: usize) -> Option<usize> {
        if ix > self.nx || iz > self.nz {
            return None;
        }
        self.lattice[iz * (self.nx + 1) + ix]
    }

    /// Lattice x coordinate of column `ix`.
    pub fn x_at(&self, ix: usize) -> f64 {
        (2.0 * ix as f64 - self.nx as f64) * (0.5 * self.dx)
    }

    pub fn z_at(&self, iz: usize) -> f64 {
        iz as f64 * self.dz
    }

    /// Volume weights: 1 on interior nodes and 1/2 on the waterline.
    pub fn volume_weights(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .map(|n| match n.kind {
                NodeKind::Interior => 1.0,
                NodeKind::Surface => 0.5,
            })
            .collect()
    }

    /// Index of the node reflected through `x = 0`.
    pub fn mirror_index(&self, i: usize) -> usize {
        let n = &self.nodes[i];
        self.index_of(self.nx - n.ix, n.iz).expect("mirror of a free node is free")
    }

    /// Reverses a nodal vector in x.
    pub fn mirror(&self, values: &[f64]) -> Vec<f64> {
        (0..self.len()).map(|i| values[self.mirror_index(i)]).collect()
    }

    /// Value of a nodal vector at lattice point `(ix, iz)`, zero on the fixed boundary.
    pub fn lattice_value(&self, values: &[f64], ix: usize, iz: usize) -> f64 {
        self.index_of(ix, iz).map_or(0.0, |i| values[i])
    }

    pub(crate) fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(HullError::DimensionMismatch { expected: self.len(), got: values.len() });
        }
        Ok(())
    }

    fn contains(&self, x: f64, z: f64) -> bool {
        let tol = 1e-12 * self.length.max(self.draft);
        x >= -0.5 * self.length - tol && x <= 0.5 * self.length + tol && z >= -tol && z <= self.draft + tol
    }

    /// Cell containing `(x, z)` and local coordinates in `[0, 1]^2`.
    fn locate(&self, x: f64, z: f64) -> (usize, usize, f64, f64) {
        let sx = ((x + 0.5 * self.length) / self.dx).clamp(0.0, self.nx as f64);
        let sz = (z / self.dz).clamp(0.0, self.nz as f64);
        let cx = (sx.floor() as usize).min(self.nx - 1);
        let cz = (sz.floor() as usize).min(self.nz - 1);
        (cx, cz, sx - cx as f64, sz - cz as f64)
    }
}

/// Physical constants and the towing speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    pub rho: f64,
    pub g: f64,
    /// Ship speed `U` in m/s.
    pub speed: f64,
    /// Hull length used by the Froude number.
    pub length: f64,
    /// Viscous drag coefficient.
    pub cd: f64,
}

impl FlowParams {
    pub fn new(rho: f64, g: f64, speed: f64, length: f64, cd: f64) -> Result<Self> {
        for (name, value) in [("rho", rho), ("g", g), ("speed", speed), ("length", length)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(HullError::arg(name, format!("must be positive, got {value}")));
            }
        }
        if !(cd.is_finite() && cd >= 0.0) {
            return Err(HullError::arg("cd", format!("must be nonnegative, got {cd}")));
        }
        Ok(Self { rho, g, speed, length, cd })
    }

    pub fn from_froude(rho: f64, g: f64, froude: f64, length: f64, cd: f64) -> Result<Self> {
        if !(froude.is_finite() && froude > 0.0) {
            return Err(HullError::arg("fr", format!("must be positive, got {froude}")));
        }
        Self::new(rho, g, froude * (g * length).sqrt(), length, cd)
    }

    /// Length Froude number `U / sqrt(g L)`.
    pub fn froude(&self) -> f64 {
        self.speed / (self.g * self.length).sqrt()
    }

    /// Kelvin wave number `g / U^2`.
    pub fn kelvin_wavenumber(&self) -> f64 {
        self.g / (self.speed * self.speed)
    }

    /// Dynamic pressure `rho cd U^2 / 2` weighting the gradient energy.
    pub fn eps(&self) -> f64 {
        0.5 * self.rho * self.cd * self.speed * self.speed
    }

    /// Factor `4 rho g v^3 / pi` in front of the wave quadratic form.
    pub fn wave_prefactor(&self) -> f64 {
        let v = self.kelvin_wavenumber();
        4.0 * self.rho * self.g * v * v * v / PI
    }
}

/// Nodal hull offsets in the free-node numbering of a [`GridSpec`].
///
/// The matching volume weights are [`GridSpec::volume_weights`].
#[derive(Debug, Clone, PartialEq)]
pub struct HullCoefficients {
    pub values: Vec<f64>,
}

impl HullCoefficients {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self { values: vec![0.0; grid.len()] }
    }

    /// Nodal interpolant of an arbitrary function.
    pub fn sample(grid: &GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        Self { values: grid.nodes().iter().map(|n| f(n.x, n.z)).collect() }
    }

    /// Hull of constant nodal value scaled to volume `volume`.
    pub fn flat(grid: &GridSpec, volume: f64) -> Result<Self> {
        normalize_volume(grid, &vec![1.0; grid.len()], volume)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn build_grid(length: f64, draft: f64, nx: usize, nz: usize) -> Result<GridSpec> {
    GridSpec::new(length, draft, nx, nz)
}

/// Bilinear interpolation of the nodal values at `(x, z)`.
pub fn eval_hull(grid: &GridSpec, values: &[f64], x: f64, z: f64) -> Result<f64> {
    grid.check_len(values)?;
    if !grid.contains(x, z) {
        return Err(HullError::OutOfDomain { x, z });
    }
    Ok(eval_unchecked(grid, values, x, z))
}

pub(crate) fn eval_unchecked(grid: &GridSpec, values: &[f64], x: f64, z: f64) -> f64 {
    let (cx, cz, s, t) = grid.locate(x, z);
    let f00 = grid.lattice_value(values, cx, cz);
    let f10 = grid.lattice_value(values, cx + 1, cz);
    let f01 = grid.lattice_value(values, cx, cz + 1);
    let f11 = grid.lattice_value(values, cx + 1, cz + 1);
    (1.0 - s) * (1.0 - t) * f00 + s * (1.0 - t) * f10 + (1.0 - s) * t * f01 + s * t * f11
}

/// Exact integral of the Q1 interpolant over the domain.
///
/// Each row is summed in mirror pairs from the ends inward, so reflecting
/// the hull in x leaves the result bit-for-bit unchanged.
pub fn hull_volume(grid: &GridSpec, values: &[f64]) -> Result<f64> {
    grid.check_len(values)?;
    let nx = grid.nx();
    let mut total = 0.0;
    for iz in 0..grid.nz() {
        let weight = if iz == 0 { 0.5 } else { 1.0 };
        let mut row = 0.0;
        for ix in 1..=nx / 2 {
            let left = grid.lattice_value(values, ix, iz);
            let right = grid.lattice_value(values, nx - ix, iz);
            row += if ix == nx - ix { left } else { left + right };
        }
        total += weight * row;
    }
    Ok(grid.cell_area() * total)
}

/// Wigley hull with parabolic sections, `B/2 (1 - 4x^2/L^2)(1 - z^2/T^2)`, of half-volume `volume`.
pub fn wigley_hull(grid: &GridSpec, volume: f64) -> Result<HullCoefficients> {
    if !(volume.is_finite() && volume > 0.0) {
        return Err(HullError::arg("volume", format!("must be positive, got {volume}")));
    }
    let (l, t) = (grid.length(), grid.draft());
    let beam = wigley_beam(l, t, volume);
    Ok(HullCoefficients::sample(grid, |x, z| wigley_surface(beam, l, t, x, z)))
}

/// Beam `B = 9V / (2LT)` of the Wigley hull holding half-volume `V`.
pub fn wigley_beam(length: f64, draft: f64, volume: f64) -> f64 {
    4.5 * volume / (length * draft)
}

pub fn wigley_surface(beam: f64, length: f64, draft: f64, x: f64, z: f64) -> f64 {
    let ex = 1.0 - 4.0 * x * x / (length * length);
    let ez = 1.0 - z * z / (draft * draft);
    0.5 * beam * ex.max(0.0) * ez.max(0.0)
}

/// Rescales a nonnegative hull so that its volume is exactly `volume`.
pub fn normalize_volume(grid: &GridSpec, values: &[f64], volume: f64) -> Result<HullCoefficients> {
    let current = hull_volume(grid, values)?;
    if values.iter().any(|&f| f < 0.0) {
        return Err(HullError::arg("hull", "offsets must be nonnegative"));
    }
    if !(current > 0.0) {
        return Err(HullError::arg("hull", format!("volume must be positive, got {current}")));
    }
    if !(volume.is_finite() && volume >= 0.0) {
        return Err(HullError::arg("volume", format!("must be nonnegative, got {volume}")));
    }
    let scale = volume / current;
    Ok(HullCoefficients { values: values.iter().map(|f| f * scale).collect() })
}

/// Centroid `(x, z)` of the half hull restricted to `x <= 0`.
///
/// Integrals are exact for the Q1 interpolant (two-point Gauss per cell,
/// clipped at `x = 0` when the midship line cuts a cell).
pub fn forward_half_centroid(grid: &GridSpec, values: &[f64]) -> Result<(f64, f64)> {
    grid.check_len(values)?;
    const GAUSS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];
    let (mut m0, mut mx, mut mz) = (0.0, 0.0, 0.0);
    for cz in 0..grid.nz() {
        let (z0, z1) = (grid.z_at(cz), grid.z_at(cz + 1));
        for cx in 0..grid.nx() {
            let x0 = grid.x_at(cx);
            let x1 = grid.x_at(cx + 1).min(0.0);
            if x1 <= x0 {
                continue;
            }
            let f00 = grid.lattice_value(values, cx, cz);
            let f10 = grid.lattice_value(values, cx + 1, cz);
            let f01 = grid.lattice_value(values, cx, cz + 1);
            let f11 = grid.lattice_value(values, cx + 1, cz + 1);
            let jac = 0.25 * (x1 - x0) * (z1 - z0);
            for gx in GAUSS {
                let x = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * gx;
                let s = (x - x0) / grid.dx();
                for gz in GAUSS {
                    let z = 0.5 * (z0 + z1) + 0.5 * (z1 - z0) * gz;
                    let t = (z - z0) / grid.dz();
                    let f = (1.0 - s) * (1.0 - t) * f00 + s * (1.0 - t) * f10 + (1.0 - s) * t * f01 + s * t * f11;
                    m0 += jac * f;
                    mx += jac * f * x;
                    mz += jac * f * z;
                }
            }
        }
    }
    if m0 <= 0.0 {
        return Err(HullError::arg("hull", "forward half has no volume"));
    }
    Ok((mx / m0, mz / m0))
}

/// Renders the hull on every lattice point as `x,z,f` CSV rows (z outer, x inner).
pub fn hull_to_csv(grid: &GridSpec, values: &[f64]) -> Result<String> {
    grid.check_len(values)?;
    let mut out = String::from("x,z,f\n");
    for iz in 0..=grid.nz() {
        for ix in 0..=grid.nx() {
            let f = grid.lattice_value(values, ix, iz);
            writeln!(out, "{:.16e},{:.16e},{:.16e}", grid.x_at(ix), grid.z_at(iz), f).unwrap();
        }
    }
    Ok(out)
}

/// Parses a hull CSV written by [`hull_to_csv`] back onto `grid`.
pub fn hull_from_csv(grid: &GridSpec, text: &str) -> Result<HullCoefficients> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == "x,z,f" => {}
        other => return Err(HullError::Parse(format!("expected header `x,z,f`, got {other:?}"))),
    }
    let expected = (grid.nx() + 1) * (grid.nz() + 1);
    let mut values = vec![0.0; grid.len()];
    let mut count = 0;
    let tol = 1e-9 * grid.length().max(grid.draft());
    for (row, line) in lines.enumerate() {
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| HullError::Parse(format!("row {}: {e}", row + 2)))?;
        if cols.len() != 3 {
            return Err(HullError::Parse(format!("row {}: expected 3 columns", row + 2)));
        }
        if row >= expected {
            return Err(HullError::Parse(format!("more than {expected} rows")));
        }
        let (ix, iz) = (row % (grid.nx() + 1), row / (grid.nx() + 1));
        if (cols[0] - grid.x_at(ix)).abs() > tol || (cols[1] - grid.z_at(iz)).abs() > tol {
            return Err(HullError::Parse(format!(
                "row {}: coordinates ({}, {}) do not match the grid",
                row + 2,
                cols[0],
                cols[1]
            )));
        }
        if let Some(i) = grid.index_of(ix, iz) {
            values[i] = cols[2];
        }
        count += 1;
    }
    if count != expected {
        return Err(HullError::Parse(format!("expected {expected} rows, got {count}")));
    }
    Ok(HullCoefficients { values })
}

pub fn read_hull_csv(grid: &GridSpec, path: &Path) -> Result<HullCoefficients> {
    hull_from_csv(grid, &std::fs::read_to_string(path)?)
}
