//! Planar points, constellations and rule parameters shared by every system.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{GatherError, Result};

/// Absolute tolerance, in distance units, used by every geometric predicate.
pub const TOL_GEOM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Unit vector at angle `theta` (radians, CCW from +x).
    pub fn from_angle(theta: f64) -> Self {
        Point2::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    /// `None` for vectors shorter than [`TOL_GEOM`].
    pub fn normalized(self) -> Option<Point2> {
        let n = self.norm();
        (n > TOL_GEOM).then(|| self / n)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn rotated(self, theta: f64) -> Point2 {
        let (s, c) = theta.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn midpoint(self, o: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, o: Point2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Point2 {
    fn sub_assign(&mut self, o: Point2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Point2 {
    type Output = Point2;
    fn div(self, s: f64) -> Point2 {
        Point2::new(self.x / s, self.y / s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2::new(x, y)
    }
}

/// Positions of all agents at one instant. Agent identity is the list index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    positions: Vec<Point2>,
    /// Discrete step index.
    pub step: u64,
    /// Continuous time; equals `step` for discrete systems.
    pub time: f64,
}

impl Constellation {
    pub fn new(positions: Vec<Point2>) -> Result<Self> {
        Self::at(positions, 0, 0.0)
    }

    pub fn at(positions: Vec<Point2>, step: u64, time: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(GatherError::Empty("constellation needs at least one agent"));
        }
        if let Some(index) = positions.iter().position(|p| !p.is_finite()) {
            return Err(GatherError::NonFinite { index });
        }
        Ok(Constellation {
            positions,
            step,
            time,
        })
    }

    pub fn from_xy(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| c.into()).collect())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Point2] {
        &self.positions
    }

    pub fn get(&self, i: usize) -> Point2 {
        self.positions[i]
    }

    /// Successor state with new positions; rejects non-finite coordinates.
    pub fn advance(&self, positions: Vec<Point2>, dt: f64) -> Result<Self> {
        if positions.len() != self.len() {
            return Err(GatherError::Dimension {
                expected: self.len(),
                actual: positions.len(),
            });
        }
        Self::at(positions, self.step + 1, self.time + dt)
    }

    pub fn translated(&self, v: Point2) -> Self {
        Constellation {
            positions: self.positions.iter().map(|&p| p + v).collect(),
            ..self.clone()
        }
    }

    pub fn centroid(&self) -> Point2 {
        centroid(self)
    }

    pub fn diameter(&self) -> f64 {
        diameter(self)
    }
}

pub fn centroid(c: &Constellation) -> Point2 {
    let n = c.len() as f64;
    let sum = c
        .positions()
        .iter()
        .fold(Point2::ZERO, |acc, &p| acc + p);
    sum / n
}

/// Largest pairwise distance; zero for a single agent.
pub fn diameter(c: &Constellation) -> f64 {
    let p = c.positions();
    let mut best = 0.0f64;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            best = best.max(p[i].dist(p[j]));
        }
    }
    best
}

/// Largest distance of any agent from the centroid.
pub fn max_radius(c: &Constellation) -> f64 {
    let m = c.centroid();
    c.positions()
        .iter()
        .map(|p| p.dist(m))
        .fold(0.0, f64::max)
}

/// Rule parameters. `visibility` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub sigma: f64,
    pub visibility: f64,
    pub delta: f64,
    pub rho: f64,
    pub dt: f64,
    pub epsilon_gather: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            sigma: 1.0,
            visibility: f64::INFINITY,
            delta: 0.1,
            rho: 1.0,
            dt: 1e-3,
            epsilon_gather: 1e-6,
        }
    }
}

impl SystemParams {
    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_visibility(mut self, v: f64) -> Self {
        self.visibility = v;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon_gather = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(GatherError::param("sigma", "must be a positive finite number"));
        }
        if !(self.visibility > 0.0) {
            return Err(GatherError::param("visibility", "must be positive or infinite"));
        }
        if !(self.delta > 0.0 && self.delta < self.visibility) {
            return Err(GatherError::param(
                "delta",
                format!("must satisfy 0 < delta < V (delta={}, V={})", self.delta, self.visibility),
            ));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(GatherError::param("rho", "must lie in (0, 1]"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(GatherError::param("dt", "must be a positive finite number"));
        }
        if !(self.epsilon_gather > 0.0) {
            return Err(GatherError::param("epsilon_gather", "must be positive"));
        }
        Ok(())
    }
}
