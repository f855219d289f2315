//! Lyapunov functions, recorded series, and run-time invariant checks.
//!
//! Monitors never stop a run. Each check returns the violations it found and
//! the caller decides how severe they are.

use serde::{Deserialize, Serialize};

use crate::error::{GatherError, Result};
use crate::geometry::{convex_hull, hull_contains, hull_perimeter};
use crate::model::{Constellation, Point2, SystemParams};
use crate::visibility::VisibilityGraph;

/// `sum_i |p_i - p_bar|^2`.
pub fn lyapunov_l1(c: &Constellation) -> f64 {
    let bar = c.centroid();
    c.positions().iter().map(|&p| (p - bar).norm_sq()).sum()
}

/// `sum_i |p_i - p_bar|`.
pub fn lyapunov_sum(c: &Constellation) -> f64 {
    let bar = c.centroid();
    c.positions().iter().map(|&p| p.dist(bar)).sum()
}

/// `1/2 sum_i sum_j |p_i - p_j|`, i.e. the sum over unordered pairs.
pub fn lyapunov_pairs(c: &Constellation) -> f64 {
    let p = c.positions();
    let mut s = 0.0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            s += p[i].dist(p[j]);
        }
    }
    s
}

/// `(sigma / alpha) sum_i sum_{j in N_i} |p_i - p_j|^alpha`.
pub fn potential_alpha(c: &Constellation, g: &VisibilityGraph, sigma: f64, alpha: f64) -> f64 {
    let s: f64 = g
        .edges()
        .into_iter()
        .map(|(i, j)| c.get(i).dist(c.get(j)).powf(alpha))
        .sum();
    2.0 * s * sigma / alpha
}

/// `sum` over ordered neighbor pairs of `l^2 / (V - l)`.
pub fn lyapunov_s5je(c: &Constellation, g: &VisibilityGraph, visibility: f64) -> Result<f64> {
    let mut s = 0.0;
    for (i, j) in g.edges() {
        let l = c.get(i).dist(c.get(j));
        if l >= visibility {
            return Err(GatherError::Blowup(format!(
                "edge ({i}, {j}) has length {l} >= V = {visibility}"
            )));
        }
        s += 2.0 * l * l / (visibility - l);
    }
    Ok(s)
}

/// Hull perimeter.
pub fn lyapunov_l3(c: &Constellation) -> f64 {
    hull_perimeter(&convex_hull(c.positions()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub step: u64,
    pub name: String,
    pub magnitude: f64,
}

impl Violation {
    pub fn new(step: u64, name: impl Into<String>, magnitude: f64) -> Self {
        Violation {
            step,
            name: name.into(),
            magnitude,
        }
    }
}

/// Per-step monitor series; every vector has one entry per recorded step.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MonitorReport {
    pub alpha: f64,
    pub step: Vec<u64>,
    pub time: Vec<f64>,
    pub centroid: Vec<Point2>,
    pub l1: Vec<f64>,
    pub l_sum: Vec<f64>,
    pub l_pairs: Vec<f64>,
    pub l2_alpha: Vec<f64>,
    pub l3: Vec<f64>,
    pub diameter: Vec<f64>,
    /// Not finite when an edge has reached `V`, or when `V` is infinite.
    pub nu: Vec<f64>,
    /// Not finite when the graph has no edges.
    pub min_edge: Vec<f64>,
    pub max_edge: Vec<f64>,
    pub lock_count: Vec<usize>,
    pub max_radius: Vec<f64>,
    pub violations: Vec<Violation>,
}

/// Column names of [`MonitorReport::row`], in order.
pub const METRIC_COLUMNS: [&str; 16] = [
    "step",
    "t",
    "centroid_x",
    "centroid_y",
    "l1",
    "l_sum",
    "l_pairs",
    "l2_alpha",
    "l3",
    "diameter",
    "nu",
    "min_edge",
    "max_edge",
    "lock_count",
    "max_radius",
    "alpha",
];

impl MonitorReport {
    pub fn new(alpha: f64) -> Self {
        MonitorReport {
            alpha,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.step.len()
    }

    pub fn is_empty(&self) -> bool {
        self.step.is_empty()
    }

    pub fn record(&mut self, c: &Constellation, g: &VisibilityGraph, locks: usize, params: &SystemParams) {
        let edges: Vec<f64> = g
            .edges()
            .into_iter()
            .map(|(i, j)| c.get(i).dist(c.get(j)))
            .collect();
        self.step.push(c.step);
        self.time.push(c.time);
        self.centroid.push(c.centroid());
        self.l1.push(lyapunov_l1(c));
        self.l_sum.push(lyapunov_sum(c));
        self.l_pairs.push(lyapunov_pairs(c));
        self.l2_alpha.push(potential_alpha(c, g, params.sigma, self.alpha));
        self.l3.push(lyapunov_l3(c));
        self.diameter.push(c.diameter());
        self.nu.push(if params.visibility.is_finite() {
            lyapunov_s5je(c, g, params.visibility).unwrap_or(f64::INFINITY)
        } else {
            f64::NAN
        });
        self.min_edge.push(edges.iter().copied().fold(f64::INFINITY, f64::min));
        self.max_edge.push(edges.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        self.lock_count.push(locks);
        self.max_radius.push(crate::model::max_radius(c));
    }

    pub fn flag(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn max_violation(&self) -> f64 {
        self.violations.iter().map(|v| v.magnitude).fold(0.0, f64::max)
    }

    /// Metrics row `k` in [`METRIC_COLUMNS`] order.
    pub fn row(&self, k: usize) -> [f64; 16] {
        [
            self.step[k] as f64,
            self.time[k],
            self.centroid[k].x,
            self.centroid[k].y,
            self.l1[k],
            self.l_sum[k],
            self.l_pairs[k],
            self.l2_alpha[k],
            self.l3[k],
            self.diameter[k],
            self.nu[k],
            self.min_edge[k],
            self.max_edge[k],
            self.lock_count[k] as f64,
            self.max_radius[k],
            self.alpha,
        ]
    }

    /// Append one row read back from a metrics table.
    pub fn push_row(&mut self, r: &[f64; 16]) {
        self.alpha = r[15];
        self.step.push(r[0] as u64);
        self.time.push(r[1]);
        self.centroid.push(Point2::new(r[2], r[3]));
        self.l1.push(r[4]);
        self.l_sum.push(r[5]);
        self.l_pairs.push(r[6]);
        self.l2_alpha.push(r[7]);
        self.l3.push(r[8]);
        self.diameter.push(r[9]);
        self.nu.push(r[10]);
        self.min_edge.push(r[11]);
        self.max_edge.push(r[12]);
        self.lock_count.push(r[13] as usize);
        self.max_radius.push(r[14]);
    }
}

/// Steps where the centroid moved by more than `tolerance`.
pub fn check_centroid_invariance(report: &MonitorReport, tolerance: f64) -> Vec<Violation> {
    report
        .centroid
        .windows(2)
        .zip(&report.step[1..])
        .filter_map(|(w, &k)| {
            let d = w[1].dist(w[0]);
            (d > tolerance).then(|| Violation::new(k, "centroid-drift", d))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    NonIncreasing,
    NonDecreasing,
}

/// Indices `k` (of the later sample) where `series` moved against `direction`
/// by more than `slack`.
pub fn check_monotone(series: &[f64], direction: Direction, slack: f64) -> Vec<Violation> {
    series
        .windows(2)
        .enumerate()
        .filter_map(|(k, w)| {
            let rise = match direction {
                Direction::NonIncreasing => w[1] - w[0],
                Direction::NonDecreasing => w[0] - w[1],
            };
            (rise > slack).then(|| Violation::new(k as u64 + 1, "monotonicity", rise))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GatherMode {
    /// Diameter at most `epsilon_gather`.
    #[default]
    Point,
    /// Diameter at most `V`.
    Disc,
}

pub fn check_gathered(c: &Constellation, params: &SystemParams, mode: GatherMode) -> bool {
    let d = c.diameter();
    match mode {
        GatherMode::Point => d <= params.epsilon_gather,
        GatherMode::Disc => d <= params.visibility,
    }
}

/// Edges of `prev` whose length in `next` is `V + slack` or more.
pub fn check_edges_kept(
    prev: &VisibilityGraph,
    next: &Constellation,
    visibility: f64,
    slack: f64,
) -> Vec<Violation> {
    prev.edges()
        .into_iter()
        .filter_map(|(i, j)| {
            let l = next.get(i).dist(next.get(j));
            (l >= visibility + slack).then(|| Violation::new(next.step, "edge-lost", l - visibility))
        })
        .collect()
}

/// Whether the hull of `next` lies in the hull of `prev`.
pub fn check_hull_contained(prev: &Constellation, next: &Constellation) -> bool {
    hull_contains(&convex_hull(prev.positions()), &convex_hull(next.positions()))
}

/// Bound on expected semi-synchronous steps to bring the Lyapunov value from
/// `l0` to `l_target`: `(1/delta) ln(l_target / l0) / ln(1 - n sigma)`.
pub fn expected_semi_sync_steps(l0: f64, l_target: f64, n: usize, sigma: f64, delta: f64) -> Result<f64> {
    let ns = n as f64 * sigma;
    if !(ns > 0.0 && ns < 1.0) {
        return Err(GatherError::param("sigma", "n * sigma must lie in (0, 1)"));
    }
    if !(l_target > 0.0 && l_target <= l0) {
        return Err(GatherError::param("l_target", "must lie in (0, L0]"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(GatherError::param("delta", "must lie in (0, 1]"));
    }
    Ok((l_target / l0).ln() / (1.0 - ns).ln() / delta)
}

/// Guaranteed one-step decrease of `L1` under the discrete bearing-only jump
/// while `sum |p_i - p_bar| > sigma (n-1)^2`:
/// `sigma^2 n (n-1)^2 - sigma^2 (2 (n-1)^2 + (n-2)(n-3+sqrt 3)^2)`.
pub fn s4_decrease_delta(n: usize, sigma: f64) -> f64 {
    let nf = n as f64;
    let a = (nf - 1.0).powi(2);
    let b = (nf - 2.0) * (nf - 3.0 + 3f64.sqrt()).powi(2);
    sigma * sigma * (nf * a - 2.0 * a - b)
}

/// Entry threshold `sigma (n-1)^2` for the confinement disc.
pub fn s4_entry_threshold(n: usize, sigma: f64) -> f64 {
    sigma * ((n as f64) - 1.0).powi(2)
}

/// Confinement radius `2 sigma (n-1)^2 + sigma (n-1)`.
pub fn s4_confinement_radius(n: usize, sigma: f64) -> f64 {
    let m = n as f64 - 1.0;
    2.0 * sigma * m * m + sigma * m
}

/// Finite-difference slopes over consecutive, non-overlapping windows of
/// `window` samples: `(s[k+w] - s[k]) / (t[k+w] - t[k])` paired with `k`.
pub fn windowed_slopes(times: &[f64], series: &[f64], window: usize) -> Vec<(usize, f64)> {
    assert_eq!(times.len(), series.len(), "series length mismatch");
    if window == 0 {
        return Vec::new();
    }
    (0..series.len().saturating_sub(window))
        .step_by(window)
        .map(|k| {
            let dt = times[k + window] - times[k];
            (k, (series[k + window] - series[k]) / dt)
        })
        .collect()
}
