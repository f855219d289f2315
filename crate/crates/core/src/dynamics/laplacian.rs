use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{AgentStep, StepOutcome};
use crate::error::{GatherError, Result};
use crate::model::{Constellation, Point2};
use crate::visibility::VisibilityGraph;

const ROW_SUM_TOL: f64 = 1e-9;

/// Square matrix with zero row sums; the generator of linear consensus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct LaplacianMatrix {
    m: DMatrix<f64>,
}

impl LaplacianMatrix {
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GatherError::Dimension {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GatherError::param("matrix", "entries must be finite"));
        }
        let scale = m.amax().max(1.0);
        for (i, row) in m.row_iter().enumerate() {
            let s: f64 = row.iter().sum();
            if s.abs() > ROW_SUM_TOL * scale {
                return Err(GatherError::param("matrix", format!("row {i} sums to {s}, expected 0")));
            }
        }
        Ok(LaplacianMatrix { m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(GatherError::Dimension {
                expected: n,
                actual: bad.len(),
            });
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Degree minus adjacency.
    pub fn from_graph(g: &VisibilityGraph) -> Self {
        let n = g.len();
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                g.degree(i) as f64
            } else if g.has_edge(i, j) {
                -1.0
            } else {
                0.0
            }
        });
        LaplacianMatrix { m }
    }

    pub fn complete(n: usize) -> Self {
        Self::from_graph(&VisibilityGraph::complete(n))
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_graph(&VisibilityGraph::from_edges(n, &edges).expect("indices in range"))
    }

    /// Directed cyclic pursuit: agent `i` chases agent `i + 1 mod n`.
    pub fn circulant(n: usize) -> Self {
        let m = DMatrix::from_fn(n, n, |i, j| {
            if n < 2 {
                0.0
            } else if i == j {
                1.0
            } else if j == (i + 1) % n {
                -1.0
            } else {
                0.0
            }
        });
        LaplacianMatrix { m }
    }

    pub fn zeros(n: usize) -> Self {
        LaplacianMatrix { m: DMatrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn is_symmetric(&self) -> bool {
        let tol = ROW_SUM_TOL * self.m.amax().max(1.0);
        (0..self.dim()).all(|i| (0..i).all(|j| (self.m[(i, j)] - self.m[(j, i)]).abs() <= tol))
    }

    /// Zero column sums, which the centroid-invariance property needs.
    pub fn is_balanced(&self) -> bool {
        let tol = ROW_SUM_TOL * self.m.amax().max(1.0);
        self.m.column_iter().all(|c| c.sum().abs() <= tol)
    }

    /// Symmetric with non-positive off-diagonal entries.
    pub fn is_undirected(&self) -> bool {
        self.is_symmetric()
            && (0..self.dim()).all(|i| (0..self.dim()).all(|j| i == j || self.m[(i, j)] <= 0.0))
    }
}

impl TryFrom<Vec<Vec<f64>>> for LaplacianMatrix {
    type Error = GatherError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<LaplacianMatrix> for Vec<Vec<f64>> {
    fn from(l: LaplacianMatrix) -> Self {
        l.m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaplacianMode {
    #[default]
    Discrete,
    Continuous,
}

fn positions_matrix(c: &Constellation) -> DMatrix<f64> {
    DMatrix::from_fn(c.len(), 2, |i, k| if k == 0 { c.get(i).x } else { c.get(i).y })
}

fn rows_to_points(p: &DMatrix<f64>) -> Vec<Point2> {
    (0..p.nrows()).map(|i| Point2::new(p[(i, 0)], p[(i, 1)])).collect()
}

/// Discrete: `P <- (I - sigma L) P`. Continuous: `P <- P - dt sigma L P`.
pub fn step_laplacian(
    c: &Constellation,
    l: &LaplacianMatrix,
    sigma: f64,
    mode: LaplacianMode,
    dt: f64,
) -> Result<StepOutcome> {
    if l.dim() != c.len() {
        return Err(GatherError::Dimension {
            expected: c.len(),
            actual: l.dim(),
        });
    }
    let (gain, tick) = match mode {
        LaplacianMode::Discrete => (sigma, 1.0),
        LaplacianMode::Continuous => (sigma * dt, dt),
    };
    let delta = -(l.matrix() * positions_matrix(c)) * gain;
    let steps = rows_to_points(&delta).into_iter().map(AgentStep::moved).collect();
    StepOutcome::from_steps(c, steps, tick)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    /// Continuous time `t`.
    Time(f64),
    /// Discrete step count `k`.
    Steps(u32),
}

/// Spectral solution `sum_i f(lambda_i) U_i U_i^T P(0)` with `f = e^{-sigma lambda t}`
/// or `(1 - sigma lambda)^k`.
pub fn eigen_trajectory(
    c0: &Constellation,
    l: &LaplacianMatrix,
    sigma: f64,
    horizon: Horizon,
) -> Result<Constellation> {
    if l.dim() != c0.len() {
        return Err(GatherError::Dimension {
            expected: c0.len(),
            actual: l.dim(),
        });
    }
    if !l.is_symmetric() {
        return Err(GatherError::param("matrix", "spectral trajectories need a symmetric Laplacian"));
    }
    let eig = SymmetricEigen::new(l.matrix().clone());
    let u = &eig.eigenvectors;
    let f = eig.eigenvalues.map(|lam| match horizon {
        Horizon::Time(t) => (-sigma * lam * t).exp(),
        Horizon::Steps(k) => (1.0 - sigma * lam).powf(k as f64),
    });
    let p = u * DMatrix::from_diagonal(&f) * u.transpose() * positions_matrix(c0);
    let (step, time) = match horizon {
        Horizon::Time(t) => (c0.step, c0.time + t),
        Horizon::Steps(k) => (c0.step + k as u64, c0.time + k as f64),
    };
    Constellation::at(rows_to_points(&p), step, time)
}
