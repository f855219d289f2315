use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GatherError, Result};
use crate::model::{Point2, TOL_GEOM};

/// Closed disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Self {
        Circle { center, radius }
    }

    /// Membership with [`TOL_GEOM`] slack.
    pub fn contains(&self, p: Point2) -> bool {
        self.center.dist(p) <= self.radius + TOL_GEOM
    }

    /// Membership with no slack at all.
    pub fn contains_exact(&self, p: Point2) -> bool {
        (p - self.center).norm_sq() <= self.radius * self.radius
    }

    pub fn diameter_of(a: Point2, b: Point2) -> Self {
        let c = a.midpoint(b);
        Circle::new(c, c.dist(a).max(c.dist(b)))
    }

    /// Circle through three points; `None` when they are (nearly) collinear.
    pub fn circumcircle(a: Point2, b: Point2, c: Point2) -> Option<Self> {
        // Translate to the bounding-box centre for conditioning.
        let ox = (a.x.min(b.x).min(c.x) + a.x.max(b.x).max(c.x)) / 2.0;
        let oy = (a.y.min(b.y).min(c.y) + a.y.max(b.y).max(c.y)) / 2.0;
        let (ax, ay) = (a.x - ox, a.y - oy);
        let (bx, by) = (b.x - ox, b.y - oy);
        let (cx, cy) = (c.x - ox, c.y - oy);
        let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
        if d == 0.0 {
            return None;
        }
        let a2 = ax * ax + ay * ay;
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let x = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
        let y = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
        let center = Point2::new(ox + x, oy + y);
        if !center.is_finite() {
            return None;
        }
        let r = center.dist(a).max(center.dist(b)).max(center.dist(c));
        Some(Circle::new(center, r))
    }
}

// Relative slack used while building the circle; much tighter than TOL_GEOM so the
// result is the true minimum to well below 1e-9.
const BUILD_EPS: f64 = 1e-13;

fn covers(c: &Circle, p: Point2) -> bool {
    c.center.dist(p) <= c.radius * (1.0 + BUILD_EPS) + BUILD_EPS
}

/// Smallest enclosing circle and the support points that determine it.
#[derive(Debug, Clone, PartialEq)]
pub struct EnclosingCircle {
    pub circle: Circle,
    pub support: Vec<Point2>,
}

/// Smallest closed disc containing every point.
pub fn min_enclosing_circle(points: &[Point2]) -> Result<Circle> {
    min_enclosing_circle_support(points).map(|e| e.circle)
}

/// Randomized incremental (move-to-front) construction. The shuffle uses a fixed
/// seed so repeated calls on the same input are bit-identical.
pub fn min_enclosing_circle_support(points: &[Point2]) -> Result<EnclosingCircle> {
    if points.is_empty() {
        return Err(GatherError::Empty("enclosing circle of no points"));
    }
    let mut pts = points.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EC0_1A5E);
    pts.shuffle(&mut rng);

    let mut c = Circle::new(pts[0], 0.0);
    let mut support = vec![pts[0]];
    for i in 1..pts.len() {
        if !covers(&c, pts[i]) {
            (c, support) = with_one(&pts[..i], pts[i]);
        }
    }
    Ok(EnclosingCircle { circle: c, support })
}

fn with_one(pts: &[Point2], p: Point2) -> (Circle, Vec<Point2>) {
    let mut c = Circle::new(p, 0.0);
    let mut support = vec![p];
    for (j, &q) in pts.iter().enumerate() {
        if !covers(&c, q) {
            (c, support) = with_two(&pts[..j], p, q);
        }
    }
    (c, support)
}

fn with_two(pts: &[Point2], p: Point2, q: Point2) -> (Circle, Vec<Point2>) {
    let mut c = Circle::diameter_of(p, q);
    let mut support = vec![p, q];
    for &r in pts {
        if covers(&c, r) {
            continue;
        }
        match Circle::circumcircle(p, q, r) {
            Some(cc) => {
                c = cc;
                support = vec![p, q, r];
            }
            None => {
                // Collinear: the farthest pair spans the disc.
                let cands = [(p, q), (p, r), (q, r)];
                let (a, b) = cands
                    .into_iter()
                    .max_by(|x, y| x.0.dist(x.1).total_cmp(&y.0.dist(y.1)))
                    .unwrap();
                c = Circle::diameter_of(a, b);
                support = vec![a, b];
            }
        }
    }
    (c, support)
}
