use std::f64::consts::{PI, TAU};

use crate::error::{GatherError, Result};
use crate::model::Point2;

/// Angular slack for the `psi >= pi` lock test.
pub const ANGLE_TOL: f64 = 1e-12;

/// Minimal angular sector at `apex` containing a set of directions.
///
/// The sector runs counter-clockwise from `right` to `left`; `angle` is its
/// opening in `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wedge {
    pub apex: Point2,
    pub right: Point2,
    pub left: Point2,
    pub angle: f64,
    /// Index (into the target list) of the right-extreme target.
    pub right_target: usize,
    /// Index (into the target list) of the left-extreme target.
    pub left_target: usize,
}

impl Wedge {
    /// An agent whose neighbors span half a turn or more cannot move.
    pub fn is_locked(&self) -> bool {
        self.angle >= PI - ANGLE_TOL
    }

    /// Unit bisector `normalize(right + left)`; `None` once the wedge is locked.
    pub fn bisector(&self) -> Option<Point2> {
        if self.is_locked() {
            return None;
        }
        (self.right + self.left).normalized()
    }

    /// `right + left` without normalization.
    pub fn direction_sum(&self) -> Point2 {
        self.right + self.left
    }
}

/// Minimal sector containing every target direction seen from `apex`.
///
/// Targets within [`crate::model::TOL_GEOM`] of the apex carry no direction and are skipped.
/// When several targets share an extreme direction the lowest index is reported.
pub fn wedge_of(apex: Point2, targets: &[Point2]) -> Result<Wedge> {
    let mut dirs: Vec<(f64, usize, Point2)> = targets
        .iter()
        .enumerate()
        .filter_map(|(k, &t)| {
            let d = t - apex;
            d.normalized().map(|u| (d.angle(), k, u))
        })
        .collect();
    if dirs.is_empty() {
        return Err(GatherError::NoDirections);
    }
    dirs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    // Collapse equal angles, keeping the lowest target index.
    let mut uniq: Vec<(f64, usize, Point2)> = Vec::with_capacity(dirs.len());
    for d in dirs {
        match uniq.last_mut() {
            Some(last) if last.0 == d.0 => {
                if d.1 < last.1 {
                    *last = d;
                }
            }
            _ => uniq.push(d),
        }
    }

    let m = uniq.len();
    if m == 1 {
        let (_, k, u) = uniq[0];
        return Ok(Wedge {
            apex,
            right: u,
            left: u,
            angle: 0.0,
            right_target: k,
            left_target: k,
        });
    }

    // The sector is the complement of the largest empty gap between consecutive
    // directions; ties go to the gap whose far side has the lowest target index.
    let mut best_gap = -1.0;
    let mut best_start = 0;
    for s in 0..m {
        let next = (s + 1) % m;
        let gap = if next == 0 {
            uniq[0].0 + TAU - uniq[s].0
        } else {
            uniq[next].0 - uniq[s].0
        };
        let better = gap > best_gap + 1e-15
            || ((gap - best_gap).abs() <= 1e-15 && uniq[next].1 < uniq[(best_start + 1) % m].1);
        if better {
            best_gap = gap;
            best_start = s;
        }
    }
    let right = uniq[(best_start + 1) % m];
    let left = uniq[best_start];
    let angle = (TAU - best_gap).max(0.0);
    Ok(Wedge {
        apex,
        right: right.2,
        left: left.2,
        angle: if angle >= TAU { 0.0 } else { angle },
        right_target: right.1,
        left_target: left.1,
    })
}
