//! Planar geometry kernel: enclosing circles, convex hulls, wedges and
//! allowable regions.

mod circle;
mod hull;
mod props;
mod region;
mod wedge;

pub use circle::{min_enclosing_circle, min_enclosing_circle_support, Circle, EnclosingCircle};
pub use hull::{
    convex_hull, hull_contains, hull_perimeter, interior_angles, point_segment_distance,
    sharpest_angle_bound, sharpest_corner, ConvexHull, HullKind,
};
pub use props::{arc_min_distance, limit_ij};
pub use region::{
    allowable_region, sample_uniform, AllowableRegion, RegionSample, MAX_REJECTION_ATTEMPTS,
};
pub use wedge::{wedge_of, Wedge, ANGLE_TOL};
