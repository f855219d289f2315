use std::f64::consts::PI;

use crate::model::{Point2, TOL_GEOM};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullKind {
    Empty,
    Point,
    Segment,
    Polygon,
}

/// Extreme points in counter-clockwise order, with the input index of each vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHull {
    vertices: Vec<Point2>,
    indices: Vec<usize>,
}

impl ConvexHull {
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// Input index of each hull vertex (lowest index among coincident inputs).
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn kind(&self) -> HullKind {
        match self.vertices.len() {
            0 => HullKind::Empty,
            1 => HullKind::Point,
            2 => HullKind::Segment,
            _ => HullKind::Polygon,
        }
    }

    pub fn perimeter(&self) -> f64 {
        hull_perimeter(self)
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        let mut a = 0.0;
        for i in 0..v.len() {
            a += v[i].cross(v[(i + 1) % v.len()]);
        }
        0.5 * a
    }

    /// Closed membership with [`TOL_GEOM`] slack.
    pub fn contains_point(&self, p: Point2) -> bool {
        let v = &self.vertices;
        match self.kind() {
            HullKind::Empty => false,
            HullKind::Point => v[0].dist(p) <= TOL_GEOM,
            HullKind::Segment => point_segment_distance(p, v[0], v[1]) <= TOL_GEOM,
            HullKind::Polygon => (0..v.len()).all(|i| {
                let a = v[i];
                let b = v[(i + 1) % v.len()];
                let len = a.dist(b);
                (b - a).cross(p - a) >= -TOL_GEOM * len
            }),
        }
    }
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Monotone-chain hull. Points within [`TOL_GEOM`] of a hull edge are dropped, so no
/// three retained vertices are collinear.
pub fn convex_hull(points: &[Point2]) -> ConvexHull {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .x
            .total_cmp(&points[b].x)
            .then(points[a].y.total_cmp(&points[b].y))
            .then(a.cmp(&b))
    });
    order.dedup_by(|b, a| points[*a] == points[*b]);

    if order.len() <= 1 {
        return ConvexHull {
            vertices: order.iter().map(|&i| points[i]).collect(),
            indices: order,
        };
    }

    // Pop `b` when it lies on or right of the line a -> c (within tolerance).
    let keep = |a: Point2, b: Point2, c: Point2| -> bool {
        let ac = c - a;
        let len = ac.norm();
        ac.cross(b - a) < -TOL_GEOM * len.max(f64::MIN_POSITIVE)
    };

    let mut chain: Vec<usize> = Vec::with_capacity(2 * order.len());
    for pass in 0..2 {
        let start = chain.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(order.iter())
        } else {
            Box::new(order.iter().rev())
        };
        for &i in iter {
            while chain.len() >= start + 2 {
                let a = points[chain[chain.len() - 2]];
                let b = points[chain[chain.len() - 1]];
                if keep(a, b, points[i]) {
                    break;
                }
                chain.pop();
            }
            chain.push(i);
        }
        chain.pop();
    }

    let mut indices = chain;
    if indices.len() >= 2 {
        let span = indices
            .iter()
            .flat_map(|&a| indices.iter().map(move |&b| (a, b)))
            .map(|(a, b)| points[a].dist(points[b]))
            .fold(0.0, f64::max);
        if span <= TOL_GEOM {
            indices.truncate(1);
        }
    }
    if indices.len() == 2 && indices[0] == indices[1] {
        indices.truncate(1);
    }
    ConvexHull {
        vertices: indices.iter().map(|&i| points[i]).collect(),
        indices,
    }
}

/// Perimeter; a segment hull counts its length twice, a point hull is zero.
pub fn hull_perimeter(h: &ConvexHull) -> f64 {
    let v = &h.vertices;
    if v.len() < 2 {
        return 0.0;
    }
    (0..v.len()).map(|i| v[i].dist(v[(i + 1) % v.len()])).sum()
}

/// Interior angle at every hull vertex. Segment endpoints get 0, a point gets 0.
pub fn interior_angles(h: &ConvexHull) -> Vec<f64> {
    let v = &h.vertices;
    match v.len() {
        0 => vec![],
        1 => vec![0.0],
        2 => vec![0.0, 0.0],
        m => (0..m)
            .map(|i| {
                let prev = v[(i + m - 1) % m] - v[i];
                let next = v[(i + 1) % m] - v[i];
                prev.cross(next).abs().atan2(prev.dot(next))
            })
            .collect(),
    }
}

/// Vertex with the smallest interior angle, as `(input index, angle)`. Ties within
/// 1e-12 rad go to the lowest input index.
pub fn sharpest_corner(h: &ConvexHull) -> Option<(usize, f64)> {
    let angles = interior_angles(h);
    let mut best: Option<(usize, f64)> = None;
    for (k, &phi) in angles.iter().enumerate() {
        let idx = h.indices[k];
        best = match best {
            None => Some((idx, phi)),
            Some((bi, bphi)) => {
                if phi < bphi - 1e-12 || ((phi - bphi).abs() <= 1e-12 && idx < bi) {
                    Some((idx, phi))
                } else {
                    Some((bi, bphi))
                }
            }
        };
    }
    best
}

/// Upper bound on the sharpest angle of any convex polygon with `m` corners.
pub fn sharpest_angle_bound(m: usize) -> f64 {
    PI * (1.0 - 2.0 / m as f64)
}

/// Every vertex of `inner` lies in the closed `outer` hull (within [`TOL_GEOM`]).
pub fn hull_contains(outer: &ConvexHull, inner: &ConvexHull) -> bool {
    inner.vertices.iter().all(|&p| outer.contains_point(p))
}
