//! Neighbor relations: complete, fixed, V-disk, and V-disk with hysteresis memory.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{GatherError, Result};
use crate::model::{Constellation, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphMode {
    Complete,
    Fixed,
    VDisk,
    Hysteresis,
}

/// Symmetric, irreflexive adjacency over agent indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityGraph {
    n: usize,
    adjacency: Vec<bool>,
    mode: GraphMode,
}

impl VisibilityGraph {
    pub fn empty(n: usize, mode: GraphMode) -> Self {
        VisibilityGraph {
            n,
            adjacency: vec![false; n * n],
            mode,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n, GraphMode::Complete);
        for i in 0..n {
            for j in 0..n {
                g.adjacency[i * n + j] = i != j;
            }
        }
        g
    }

    /// Fixed graph from an undirected edge list; self-loops are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n, GraphMode::Fixed);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(GatherError::Dimension {
                    expected: n,
                    actual: i.max(j) + 1,
                });
            }
            if i != j {
                g.set_edge(i, j);
            }
        }
        Ok(g)
    }

    pub(crate) fn set_edge(&mut self, i: usize, j: usize) {
        self.adjacency[i * self.n + j] = true;
        self.adjacency[j * self.n + i] = true;
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn mode(&self) -> GraphMode {
        self.mode
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.n + j]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.has_edge(i, j))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors(i).count()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == self.n * self.n.saturating_sub(1) / 2
    }

    /// True iff every edge of `self` is also an edge of `other`.
    pub fn is_subgraph_of(&self, other: &VisibilityGraph) -> bool {
        self.n == other.n
            && self
                .adjacency
                .iter()
                .zip(&other.adjacency)
                .all(|(&a, &b)| !a || b)
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self)
    }

    /// Next hysteresis graph: previous edges plus pairs now within `V - delta`.
    pub fn hysteresis_update(&self, c: &Constellation, params: &SystemParams) -> Result<Self> {
        build_visibility(c, params, GraphMode::Hysteresis, Some(self))
    }
}

fn check_visibility(params: &SystemParams) -> Result<()> {
    if !(params.visibility > 0.0) {
        return Err(GatherError::param("visibility", "V must be positive in v-disk modes"));
    }
    Ok(())
}

/// Build the neighbor relation for `c`.
///
/// * `Complete` ignores positions.
/// * `Fixed` returns `previous` unchanged (it must be given).
/// * `VDisk` links `i, j` iff `0 < |p_i - p_j| < V`.
/// * `Hysteresis` keeps every edge of `previous` and adds pairs with
///   `|p_i - p_j| <= V - delta`; with no `previous` the initial V-disk edges are
///   acknowledged as well.
pub fn build_visibility(
    c: &Constellation,
    params: &SystemParams,
    mode: GraphMode,
    previous: Option<&VisibilityGraph>,
) -> Result<VisibilityGraph> {
    let n = c.len();
    match mode {
        GraphMode::Complete => Ok(VisibilityGraph::complete(n)),
        GraphMode::Fixed => {
            let g = previous.ok_or_else(|| {
                GatherError::Config("fixed graph mode needs an explicit adjacency".into())
            })?;
            if g.n != n {
                return Err(GatherError::Dimension {
                    expected: n,
                    actual: g.n,
                });
            }
            Ok(VisibilityGraph {
                mode: GraphMode::Fixed,
                ..g.clone()
            })
        }
        GraphMode::VDisk => {
            check_visibility(params)?;
            let v = params.visibility;
            let p = c.positions();
            let mut g = VisibilityGraph::empty(n, GraphMode::VDisk);
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = p[i].dist(p[j]);
                    if d > 0.0 && d < v {
                        g.set_edge(i, j);
                    }
                }
            }
            Ok(g)
        }
        GraphMode::Hysteresis => {
            check_visibility(params)?;
            let v = params.visibility;
            let p = c.positions();
            let mut g = match previous {
                Some(prev) => {
                    if prev.n != n {
                        return Err(GatherError::Dimension {
                            expected: n,
                            actual: prev.n,
                        });
                    }
                    VisibilityGraph {
                        mode: GraphMode::Hysteresis,
                        ..prev.clone()
                    }
                }
                None => VisibilityGraph::empty(n, GraphMode::Hysteresis),
            };
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = p[i].dist(p[j]);
                    let initial = previous.is_none() && d < v;
                    if initial || d <= v - params.delta {
                        g.set_edge(i, j);
                    }
                }
            }
            Ok(g)
        }
    }
}

/// Breadth-first connectivity; graphs with at most one vertex are connected.
pub fn is_connected(g: &VisibilityGraph) -> bool {
    if g.n <= 1 {
        return true;
    }
    let mut seen = vec![false; g.n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = queue.pop_front() {
        for j in g.neighbors(i) {
            if !seen[j] {
                seen[j] = true;
                count += 1;
                queue.push_back(j);
            }
        }
    }
    count == g.n
}
