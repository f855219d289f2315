use std::f64::consts::PI;

use crate::error::{GatherError, Result};
use crate::model::{Point2, TOL_GEOM};

/// Longest step agent `i` may take along unit `direction` while staying inside
/// the `V/2` disc centered at the midpoint of `p_i` and `p_j`.
///
/// `l/2 cos(theta) + sqrt((V/2)^2 - (l/2)^2 sin^2(theta))`, with `theta` the
/// angle between `direction` and `p_j - p_i`.
pub fn limit_ij(p_i: Point2, p_j: Point2, direction: Point2, visibility: f64) -> Result<f64> {
    let rel = p_j - p_i;
    let half_l = rel.norm() / 2.0;
    let half_v = visibility / 2.0;
    let (cos_t, sin_t) = match (rel.normalized(), direction.normalized()) {
        (Some(u), Some(d)) => (u.dot(d), u.cross(d)),
        _ => (0.0, 0.0),
    };
    let disc = half_v * half_v - half_l * half_l * sin_t * sin_t;
    if disc < -TOL_GEOM * visibility.max(1.0) {
        return Err(GatherError::Geometry(format!(
            "neighbor at distance {} exceeds the visibility range {}",
            2.0 * half_l,
            visibility
        )));
    }
    Ok(half_l * cos_t + disc.max(0.0).sqrt())
}

/// Height of the isosceles triangle inscribed over chord `ab` with apex angle
/// `beta`: `|a-b| / (2 tan(beta/2))`. For `beta >= pi/2` this is the smallest
/// distance from the chord midpoint to the minor arc.
pub fn arc_min_distance(a: Point2, b: Point2, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < PI) {
        return Err(GatherError::param("beta", "inscribed angle must lie in (0, pi)"));
    }
    Ok(a.dist(b) / (2.0 * (beta / 2.0).tan()))
}
