use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{HullError, Result};

/// Weight function `lambda^4 / sqrt(lambda^2 - 1)` of the lambda integral.
pub fn singular_weight(lambda: f64) -> f64 {
    lambda.powi(4) / (lambda * lambda - 1.0).sqrt()
}

/// `int_1^2 dlambda / sqrt(lambda^2 - 1) = ln(2 + sqrt 3)`.
pub fn log_two_plus_sqrt3() -> f64 {
    (2.0 + 3f64.sqrt()).ln()
}

/// Nodes and weights replacing `int_1^Lambda g(lambda) lambda^4 / sqrt(lambda^2-1) dlambda`.
///
/// Node 0 sits at `lambda = 1` and absorbs the subtracted singularity on
/// `[1, 2]`. The remaining nodes are midpoints on dyadic octaves
/// `[2^k, 2^(k+1)]`, so `Lambda = 2^K` for `K` octaves.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    octave_counts: Vec<usize>,
}

impl LambdaQuadrature {
    /// Builds the rule from per-octave midpoint counts `N_0, ..., N_{K-1}`.
    pub fn new(octave_counts: &[usize]) -> Result<Self> {
        if octave_counts.is_empty() {
            return Err(HullError::arg("k_lambda", "need at least one octave"));
        }
        if octave_counts.contains(&0) {
            return Err(HullError::arg("n_per_octave", "every octave needs at least one node"));
        }
        let total = 1 + octave_counts.iter().sum::<usize>();
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        nodes.push(1.0);
        weights.push(0.0);

        let mut subtracted = 0.0;
        for (k, &count) in octave_counts.iter().enumerate() {
            let start = (1u64 << k) as f64;
            let step = start / count as f64;
            for i in 1..=count {
                let lambda = start + (i as f64 - 0.5) * step;
                nodes.push(lambda);
                weights.push(step * singular_weight(lambda));
                if k == 0 {
                    subtracted += step / (lambda * lambda - 1.0).sqrt();
                }
            }
        }
        weights[0] = log_two_plus_sqrt3() - subtracted;
        Ok(Self { nodes, weights, octave_counts: octave_counts.to_vec() })
    }

    /// Same node count on each of `k_lambda` octaves.
    pub fn uniform(n_per_octave: usize, k_lambda: usize) -> Result<Self> {
        if n_per_octave == 0 {
            return Err(HullError::arg("n_per_octave", "must be at least 1"));
        }
        Self::new(&vec![n_per_octave; k_lambda])
    }

    /// Rule reduced to the single node `lambda = 1` with weight `omega_0`.
    pub fn single_node(n0: usize) -> Result<Self> {
        let full = Self::new(&[n0])?;
        Ok(Self { nodes: vec![1.0], weights: vec![full.weights[0]], octave_counts: Vec::new() })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn octave_counts(&self) -> &[usize] {
        &self.octave_counts
    }

    /// Number of octaves `K`.
    pub fn k_lambda(&self) -> usize {
        self.octave_counts.len()
    }

    /// Truncation point `Lambda = 2^K`.
    pub fn lambda_max(&self) -> f64 {
        (1u64 << self.k_lambda()) as f64
    }

    pub fn omega0(&self) -> f64 {
        self.weights[0]
    }

    /// Node indices of octave `k` (node 0 excluded).
    pub fn octave_range(&self, k: usize) -> Range<usize> {
        let start = 1 + self.octave_counts[..k].iter().sum::<usize>();
        start..start + self.octave_counts[k]
    }

    /// Applies the rule to a smooth factor `g`: `sum_j omega_j g(lambda_j)`.
    pub fn apply(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&l, &w)| w * g(l)).sum()
    }

    /// `lambda,weight` CSV dump.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,weight\n");
        for (l, w) in self.nodes.iter().zip(&self.weights) {
            writeln!(out, "{l:.16e},{w:.16e}").unwrap();
        }
        out
    }
}
