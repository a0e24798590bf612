//! Contextual functional spaces for indoor rooms.
//!
//! The library computes, for a set of furnished rooms, the regions where a
//! person can stand or sit ("functional spaces"), searches for rigid-body
//! alignments of those rooms that maximize the area they share, and plans
//! minimal-effort furniture rearrangements that grow the shared area further.
//!
//! Pipeline outline:
//!
//! 1. [`scene`] loads rooms (simple polygons) and furniture (oriented
//!    rectangles) from JSON, resolving per-label defaults from a catalog.
//! 2. [`spaces`] rasterizes each room into an occupancy grid ([`geometry`])
//!    and classifies each cell as standable and/or sittable.
//! 3. [`scene_graph`] measures the free clearance around every furniture
//!    face, which bounds how far each piece may translate.
//! 4. [`optimizer`] runs an elitist multi-objective evolutionary search over
//!    room poses (and optionally furniture translations) to maximize the
//!    mutual shared area at minimal rearrangement effort.
//! 5. [`render`] and [`cli`] emit JSON/CSV reports and SVG floor plans.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod optimizer;
pub mod render;
pub mod scene;
pub mod scene_graph;
pub mod spaces;

pub use error::{Error, Result};
