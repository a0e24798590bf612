//! Shared evaluation plumbing for the search operators: precomputed room
//! rasters, per-candidate space grids, and mutual-area counting.

use crate::error::{Error, Result};
use crate::geometry::{OccupancyGrid, Pose2D};
use crate::scene::Room;
use crate::scene_graph::RoomDelta;
use crate::spaces::{RoomRaster, SpaceKind};

/// Precomputed per-room rasters for repeated functional-space evaluation.
pub(crate) struct SpaceEvaluator {
    pub(crate) rooms: Vec<Room>,
    pub(crate) kind: SpaceKind,
    pub(crate) resolution: f64,
    rasters: Vec<RoomRaster>,
    base_grids: Vec<OccupancyGrid>,
}

impl SpaceEvaluator {
    pub(crate) fn new(rooms: &[Room], kind: SpaceKind, resolution: f64) -> Result<Self> {
        if rooms.is_empty() {
            return Err(Error::Params("no rooms to evaluate".into()));
        }
        let rasters: Vec<RoomRaster> = rooms
            .iter()
            .map(|room| RoomRaster::new(room, resolution))
            .collect::<Result<_>>()?;
        let base_grids = rooms
            .iter()
            .zip(&rasters)
            .map(|(room, raster)| match kind {
                SpaceKind::Standable => raster.standable(room, None),
                SpaceKind::Sittable => raster.sittable(room, None),
            })
            .collect();
        Ok(SpaceEvaluator {
            rooms: rooms.to_vec(),
            kind,
            resolution,
            rasters,
            base_grids,
        })
    }

    pub(crate) fn room_count(&self) -> usize {
        self.rooms.len()
    }

    /// The functional-space grid of room `i` with furniture unmoved.
    pub(crate) fn base_grid(&self, i: usize) -> &OccupancyGrid {
        &self.base_grids[i]
    }

    /// Recompute the functional-space grid of room `i` under a layout delta.
    pub(crate) fn grid_with_delta(&self, i: usize, delta: &RoomDelta) -> OccupancyGrid {
        match self.kind {
            SpaceKind::Standable => self.rasters[i].standable(&self.rooms[i], Some(delta)),
            SpaceKind::Sittable => self.rasters[i].sittable(&self.rooms[i], Some(delta)),
        }
    }

    /// Bounding-box diagonal of room `i`, used to size pose gene bounds.
    pub(crate) fn room_diag(&self, i: usize) -> f64 {
        self.rooms[i].boundary.bbox_diagonal()
    }
}

/// Mutual area of transformed space grids, in square meters.
///
/// The intersection is sampled on the first grid's raster: a reference cell
/// counts iff its center, carried into the shared world frame by `poses[0]`,
/// lies inside every other transformed space. One pose per grid.
pub(crate) fn mutual_area_of_grids(grids: &[&OccupancyGrid], poses: &[Pose2D]) -> f64 {
    debug_assert_eq!(grids.len(), poses.len());
    let reference = grids[0];
    if grids.len() == 1 {
        return reference.area();
    }
    let inverses: Vec<Pose2D> = poses[1..].iter().map(Pose2D::inverse).collect();
    let identity_ref = poses[0].is_identity(0.0);
    let mut count = 0usize;
    for iy in 0..reference.height {
        'cell: for ix in 0..reference.width {
            if !reference.get(ix, iy) {
                continue;
            }
            let c = reference.cell_center(ix, iy);
            let p = if identity_ref { c } else { poses[0].apply(c) };
            for (inv, grid) in inverses.iter().zip(&grids[1..]) {
                if !grid.contains_world(inv.apply(p)) {
                    continue 'cell;
                }
            }
            count += 1;
        }
    }
    count as f64 * reference.resolution * reference.resolution
}

/// The mutual region as a raster in the first grid's frame.
pub(crate) fn mutual_region_of_grids(grids: &[&OccupancyGrid], poses: &[Pose2D]) -> OccupancyGrid {
    debug_assert_eq!(grids.len(), poses.len());
    let reference = grids[0];
    let mut region = OccupancyGrid::new(
        reference.origin,
        reference.resolution,
        reference.width,
        reference.height,
    );
    let inverses: Vec<Pose2D> = poses[1..].iter().map(Pose2D::inverse).collect();
    for iy in 0..reference.height {
        'cell: for ix in 0..reference.width {
            if !reference.get(ix, iy) {
                continue;
            }
            let p = poses[0].apply(reference.cell_center(ix, iy));
            for (inv, grid) in inverses.iter().zip(&grids[1..]) {
                if !grid.contains_world(inv.apply(p)) {
                    continue 'cell;
                }
            }
            region.set(ix, iy, true);
        }
    }
    region
}
