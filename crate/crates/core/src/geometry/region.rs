use rand::Rng;

use super::circle::Circle;
use crate::model::{Constellation, Point2, SystemParams, TOL_GEOM};
use crate::visibility::VisibilityGraph;

/// Rejection attempts before a region is declared degenerate.
pub const MAX_REJECTION_ATTEMPTS: usize = 1_000_000;

/// Where an agent may move without losing any current neighbor: the intersection
/// of one `V/2` disc per neighbor (touching the agent, centered toward the
/// neighbor) and the self-disc of radius `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct AllowableRegion {
    pub apex: Point2,
    pub mu: f64,
    /// Neighbor discs followed by the self-disc (always last).
    pub discs: Vec<Circle>,
}

impl AllowableRegion {
    pub fn self_disc(&self) -> Circle {
        *self.discs.last().expect("self-disc always present")
    }

    /// Membership in every disc, with [`TOL_GEOM`] slack.
    pub fn contains(&self, p: Point2) -> bool {
        self.discs.iter().all(|d| d.contains(p))
    }

    /// Membership in every disc with no slack.
    pub fn contains_exact(&self, p: Point2) -> bool {
        self.discs.iter().all(|d| d.contains_exact(p))
    }

    /// Length of the segment from the apex along unit `dir` that stays inside the
    /// region. Every disc contains the apex, so this is the smallest exit distance.
    pub fn chord_along(&self, dir: Point2) -> f64 {
        self.discs
            .iter()
            .map(|d| {
                let w = self.apex - d.center;
                let b = w.dot(dir);
                let c = w.norm_sq() - d.radius * d.radius;
                let disc = (b * b - c).max(0.0);
                (-b + disc.sqrt()).max(0.0)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Allowable region of agent `i` under graph `g`, with self-disc radius `mu`.
pub fn allowable_region(
    i: usize,
    c: &Constellation,
    g: &VisibilityGraph,
    params: &SystemParams,
    mu: f64,
) -> AllowableRegion {
    let half = params.visibility / 2.0;
    let pi = c.get(i);
    let mut discs: Vec<Circle> = g
        .neighbors(i)
        .filter_map(|j| (c.get(j) - pi).normalized())
        .map(|u| Circle::new(pi + u * half, half))
        .collect();
    discs.push(Circle::new(pi, mu));
    AllowableRegion {
        apex: pi,
        mu,
        discs,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSample {
    pub point: Point2,
    /// Set when no interior point was found and the apex was returned.
    pub degenerate: bool,
}

/// Rectangle `a u + b v` with `a in [a0, a1]`, `b in [b0, b1]`, `v = u` turned a
/// quarter.
#[derive(Debug, Clone, Copy)]
struct Frame {
    u: Point2,
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
}

impl Frame {
    fn area(&self) -> f64 {
        (self.a1 - self.a0) * (self.b1 - self.b0)
    }

    fn point(&self, a: f64, b: f64) -> Point2 {
        self.u * a + self.u.rotated(std::f64::consts::FRAC_PI_2) * b
    }
}

fn circle_intersections(a: &Circle, b: &Circle) -> Vec<Point2> {
    let d = a.center.dist(b.center);
    if d == 0.0 || d > a.radius + b.radius || d < (a.radius - b.radius).abs() {
        return Vec::new();
    }
    let along = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
    let h = (a.radius * a.radius - along * along).max(0.0).sqrt();
    let u = (b.center - a.center) * (1.0 / d);
    let base = a.center + u * along;
    let v = u.rotated(std::f64::consts::FRAC_PI_2);
    vec![base + v * h, base - v * h]
}

/// Tightest bounding rectangle of the region over a few orientations.
///
/// The region is convex, so its extent along `w` is attained at a pairwise
/// circle crossing or at a disc's own extreme point `c + r w`, whichever lies
/// in every disc.
fn bounding_frame(region: &AllowableRegion) -> Option<Frame> {
    let discs = &region.discs;
    let inside = |q: Point2| discs.iter().all(|d| q.dist(d.center) <= d.radius * (1.0 + 1e-12) + 1e-15);
    let mut corners = Vec::new();
    let mut dirs = vec![Point2::new(1.0, 0.0)];
    for (k, a) in discs.iter().enumerate() {
        for b in &discs[k + 1..] {
            corners.extend(circle_intersections(a, b).into_iter().filter(|q| inside(*q)));
            if let Some(u) = (b.center - a.center).normalized() {
                dirs.push(u);
            }
        }
    }
    let extent = |w: Point2| {
        discs
            .iter()
            .map(|d| d.center + w * d.radius)
            .filter(|q| inside(*q))
            .chain(corners.iter().copied())
            .map(|q| q.dot(w))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    dirs.into_iter()
        .map(|u| {
            let v = u.rotated(std::f64::consts::FRAC_PI_2);
            Frame {
                u,
                a0: -extent(u * -1.0),
                a1: extent(u),
                b0: -extent(v * -1.0),
                b1: extent(v),
            }
        })
        .filter(|f| f.a0.is_finite() && f.a1.is_finite() && f.b0.is_finite() && f.b1.is_finite())
        .min_by(|x, y| x.area().total_cmp(&y.area()))
}

/// Uniform point of the region by rejection from a tight bounding rectangle.
///
/// Acceptance uses exact disc membership so a sample never leaves the region.
/// A region thinner than `TOL_GEOM` yields the apex.
pub fn sample_uniform<R: Rng + ?Sized>(region: &AllowableRegion, rng: &mut R) -> RegionSample {
    let apex_only = RegionSample {
        point: region.apex,
        degenerate: true,
    };
    let Some(f) = bounding_frame(region) else {
        return apex_only;
    };
    if !(f.a1 - f.a0 > TOL_GEOM && f.b1 - f.b0 > TOL_GEOM) {
        return apex_only;
    }
    for _ in 0..MAX_REJECTION_ATTEMPTS {
        let q = f.point(rng.random_range(f.a0..f.a1), rng.random_range(f.b0..f.b1));
        if region.contains_exact(q) {
            return RegionSample {
                point: q,
                degenerate: false,
            };
        }
    }
    apex_only
}
