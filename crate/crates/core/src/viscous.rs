//! Q1 stiffness matrix for the linearized viscous drag `eps int |grad f|^2`.

use nalgebra::DMatrix;

use crate::error::{HullError, Result};
use crate::geometry::GridSpec;

/// Symmetric stiffness matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct DragMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl DragMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, a)| a * x[j]).sum()).collect()
    }

    /// `F^T M_d F`.
    pub fn quadratic_form(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.n {
            return Err(HullError::DimensionMismatch { expected: self.n, got: f.len() });
        }
        Ok(self.matvec(f).iter().zip(f).map(|(a, b)| a * b).sum())
    }

    /// `target += scale * M_d`.
    pub fn add_to_dense(&self, target: &mut DMatrix<f64>, scale: f64) {
        for i in 0..self.n {
            for (j, a) in self.row(i) {
                target[(i, j)] += scale * a;
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        self.add_to_dense(&mut m, 1.0);
        m
    }
}

/// Stiffness of a `dx x dz` rectangle; corners ordered (0,0), (1,0), (0,1), (1,1).
fn element_matrix(dx: f64, dz: f64) -> [[f64; 4]; 4] {
    let stiff = |p: usize, r: usize| if p == r { 1.0 } else { -1.0 };
    let mass = |q: usize, s: usize| if q == s { 1.0 / 3.0 } else { 1.0 / 6.0 };
    let mut k = [[0.0; 4]; 4];
    for (a, row) in k.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            let (p, q) = (a % 2, a / 2);
            let (r, s) = (b % 2, b / 2);
            *entry = dz / dx * stiff(p, r) * mass(q, s) + dx / dz * mass(p, r) * stiff(q, s);
        }
    }
    k
}

/// Assembles `(grad e_i, grad e_j)` over the free nodes.
pub fn assemble_md(grid: &GridSpec) -> DragMatrix {
    let n = grid.len();
    let ke = element_matrix(grid.dx(), grid.dz());
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(9); n];
    for cz in 0..grid.nz() {
        for cx in 0..grid.nx() {
            let corners = [
                grid.index_of(cx, cz),
                grid.index_of(cx + 1, cz),
                grid.index_of(cx, cz + 1),
                grid.index_of(cx + 1, cz + 1),
            ];
            for (a, ia) in corners.iter().enumerate() {
                let Some(i) = *ia else { continue };
                for (b, ib) in corners.iter().enumerate() {
                    if let Some(j) = *ib {
                        rows[i].push((j, ke[a][b]));
                    }
                }
            }
        }
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for mut row in rows {
        row.sort_by_key(|&(j, _)| j);
        for (j, a) in row {
            match cols.last() {
                Some(&last) if last == j && cols.len() > *row_ptr.last().unwrap() => {
                    *vals.last_mut().unwrap() += a;
                }
                _ => {
                    cols.push(j);
                    vals.push(a);
                }
            }
        }
        row_ptr.push(cols.len());
    }
    DragMatrix { n, row_ptr, cols, vals }
}

/// `eps F^T M_d F` in newtons.
pub fn viscous_resistance(f: &[f64], drag: &DragMatrix, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(HullError::arg("eps", format!("must be positive, got {eps}")));
    }
    Ok(eps * drag.quadratic_form(f)?)
}
