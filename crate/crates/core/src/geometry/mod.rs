//! Planar geometry primitives: rigid poses, oriented rectangles, simple
//! polygons, and boolean occupancy grids with Euclidean disc morphology.
//!
//! Conventions used throughout the crate:
//! - lengths are meters, angles are radians (counter-clockwise positive);
//! - a grid cell is "inside" a continuous region iff its center is;
//! - points outside a grid's bounds are treated as unoccupied.

mod grid;
mod polygon;
mod pose;
mod rect;

pub(crate) use grid::{clear_rect_cells, polygon_mask};
pub use grid::{dilate_test, erode, rasterize, transformed_membership, OccupancyGrid};
pub use polygon::SimplePolygon;
pub use pose::Pose2D;
pub use rect::{rect_overlap, OrientedRect};

/// Contact tolerance: rectangles whose projections are separated by less than
/// this on some axis are treated as touching, not overlapping.
pub const CONTACT_EPS: f64 = 1e-9;
