//! Functional spaces: where people can stand, and where they can sit.
//!
//! The standable space of a room is its floor area minus every obstructing
//! furniture footprint. The sittable space extends it with the usable rim of
//! each sittable object: a band of width `eps` along the footprint boundary,
//! excluding any point whose surrounding disc of radius `eps + rho` touches
//! the room boundary or another object (you cannot sit where there is no room
//! to sit down). Both are rasterized on the room's occupancy-grid frame so
//! they can be unioned, intersected, and compared cell for cell.
//!
//! Region membership is decided analytically at each cell center — erosion of
//! a rectangular footprint by `eps` is an interior-clearance test and the
//! disc-touch condition is a point-to-shape distance test — so the rasters
//! carry no morphological approximation beyond the grid sampling itself.

use crate::error::{Error, Result};
use crate::geometry::{clear_rect_cells, polygon_mask, OccupancyGrid, OrientedRect};
use crate::scene::{FurnitureObject, Room};
use crate::scene_graph::{collision_penalty, moved_footprints, RoomDelta};

/// Which contextual function a [`FunctionalSpace`] region describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpaceKind {
    Standable,
    Sittable,
}

/// A rasterized functional region of one room.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSpace {
    pub room_id: String,
    pub kind: SpaceKind,
    pub region: OccupancyGrid,
    /// Fingerprint of the furniture placement this region was computed for;
    /// two spaces with equal hashes came from identical layouts.
    pub layout_hash: u64,
}

impl FunctionalSpace {
    /// Region area in square meters.
    pub fn area(&self) -> f64 {
        self.region.area()
    }
}

/// FNV-1a fingerprint of a room's furniture placement (after applying
/// `delta`), its boundary, and the raster resolution.
pub fn layout_hash(room: &Room, resolution: f64, delta: Option<&RoomDelta>) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    eat(room.id.as_bytes());
    eat(&resolution.to_bits().to_le_bytes());
    for &(x, y) in room.boundary.vertices() {
        eat(&x.to_bits().to_le_bytes());
        eat(&y.to_bits().to_le_bytes());
    }
    let empty = RoomDelta::new();
    let footprints = moved_footprints(room, delta.unwrap_or(&empty));
    for (obj, fp) in room.objects.iter().zip(&footprints) {
        eat(obj.id.as_bytes());
        for v in [fp.cx, fp.cy, fp.width, fp.depth, fp.rotation] {
            eat(&v.to_bits().to_le_bytes());
        }
    }
    h
}

/// Reusable raster frame for one room: the boundary mask is computed once and
/// cloned per layout, which keeps repeated space evaluations (as in the
/// evolutionary searches) cheap.
#[derive(Debug, Clone)]
pub(crate) struct RoomRaster {
    pub(crate) resolution: f64,
    polygon: OccupancyGrid,
}

impl RoomRaster {
    pub(crate) fn new(room: &Room, default_resolution: f64) -> Result<Self> {
        let resolution = room.effective_resolution(default_resolution);
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::Params(format!(
                "room '{}': raster resolution must be positive, got {resolution}",
                room.id
            )));
        }
        Ok(RoomRaster {
            resolution,
            polygon: polygon_mask(&room.boundary, resolution)?,
        })
    }

    /// Standable raster: boundary mask minus obstructing moved footprints.
    /// Does not screen for collisions; public entry points do.
    pub(crate) fn standable(&self, room: &Room, delta: Option<&RoomDelta>) -> OccupancyGrid {
        let mut grid = self.polygon.clone();
        let empty = RoomDelta::new();
        let footprints = moved_footprints(room, delta.unwrap_or(&empty));
        for (obj, fp) in room.objects.iter().zip(&footprints) {
            if obj.standable_obstacle {
                clear_rect_cells(&mut grid, fp);
            }
        }
        grid
    }

    /// Sittable band of a single object, given every moved footprint in the
    /// room (`footprints[skip]` being the object's own).
    fn object_band(
        &self,
        room: &Room,
        footprints: &[OrientedRect],
        skip: usize,
        eps: f64,
        rho: f64,
    ) -> OccupancyGrid {
        let mut band = OccupancyGrid::new(
            self.polygon.origin,
            self.resolution,
            self.polygon.width,
            self.polygon.height,
        );
        if eps <= 0.0 {
            return band;
        }
        let fp = &footprints[skip];
        let reach = eps + rho;

        let ((min_x, min_y), (max_x, max_y)) = fp.bbox();
        let res = self.resolution;
        let x0 = (((min_x - band.origin.0) / res).floor().max(0.0)) as usize;
        let y0 = (((min_y - band.origin.1) / res).floor().max(0.0)) as usize;
        let x1 = ((((max_x - band.origin.0) / res).ceil()) as usize).min(band.width);
        let y1 = ((((max_y - band.origin.1) / res).ceil()) as usize).min(band.height);

        for iy in y0..y1 {
            'cell: for ix in x0..x1 {
                let p = band.cell_center(ix, iy);
                // In the footprint, but not so deep that a disc of radius
                // `eps` around it stays inside (the eroded interior is not
                // reachable for sitting).
                let clearance = fp.interior_clearance(p);
                if clearance < 0.0 || clearance >= eps {
                    continue;
                }
                // Excluded wherever the surrounding disc of radius eps + rho
                // pokes out of the room or into another object.
                if room.boundary.distance_to_boundary(p) <= reach {
                    continue;
                }
                for (h, other) in footprints.iter().enumerate() {
                    if h != skip && other.distance(p) <= reach {
                        continue 'cell;
                    }
                }
                if self.polygon.get(ix, iy) {
                    band.set(ix, iy, true);
                }
            }
        }
        band
    }

    /// Sittable raster: standable plus every object's sittable band.
    pub(crate) fn sittable(&self, room: &Room, delta: Option<&RoomDelta>) -> OccupancyGrid {
        let mut grid = self.standable(room, delta);
        let empty = RoomDelta::new();
        let footprints = moved_footprints(room, delta.unwrap_or(&empty));
        for (k, obj) in room.objects.iter().enumerate() {
            let band = self.object_band(
                room,
                &footprints,
                k,
                obj.sittable_threshold_eps,
                obj.clearance_rho,
            );
            grid.union_in_place(&band)
                .expect("bands share the room frame");
        }
        grid
    }
}

fn screen_delta(room: &Room, delta: Option<&RoomDelta>) -> Result<()> {
    if let Some(delta) = delta {
        let penalty = collision_penalty(room, delta, 1.0);
        if penalty > 0.0 {
            return Err(Error::Scene(format!(
                "room '{}': layout delta causes {} collision violation(s); \
                 screen candidate layouts with the collision penalty first",
                room.id, penalty as u64
            )));
        }
    }
    Ok(())
}

/// Standable space of a room: floor raster minus every non-lightweight
/// obstructing object at its (possibly translated) position.
///
/// `default_resolution` is used unless the room carries its own override.
/// A colliding `delta` is rejected.
pub fn standable_space(
    room: &Room,
    default_resolution: f64,
    delta: Option<&RoomDelta>,
) -> Result<FunctionalSpace> {
    screen_delta(room, delta)?;
    let raster = RoomRaster::new(room, default_resolution)?;
    Ok(FunctionalSpace {
        room_id: room.id.clone(),
        kind: SpaceKind::Standable,
        region: raster.standable(room, delta),
        layout_hash: layout_hash(room, raster.resolution, delta),
    })
}

/// Sittable band of one object: the part of its footprint within `eps` of
/// the footprint boundary, excluding points whose disc of radius `eps + rho`
/// touches the room boundary or any other object. Non-sittable objects
/// (`eps = 0`) yield an empty grid.
pub fn object_sittable_area(
    object: &FurnitureObject,
    room: &Room,
    default_resolution: f64,
    delta: Option<&RoomDelta>,
) -> Result<OccupancyGrid> {
    let raster = RoomRaster::new(room, default_resolution)?;
    let empty = RoomDelta::new();
    let delta_map = delta.unwrap_or(&empty);
    let mut footprints = moved_footprints(room, delta_map);
    // Locate the object within the room; an object not belonging to the room
    // is evaluated against all of the room's objects as blockers.
    let skip = match room.objects.iter().position(|o| o.id == object.id) {
        Some(k) => k,
        None => {
            let fp = match delta_map.get(&object.id) {
                Some(&offset) => object.footprint_moved(offset),
                None => object.footprint,
            };
            footprints.push(fp);
            footprints.len() - 1
        }
    };
    Ok(raster.object_band(
        room,
        &footprints,
        skip,
        object.sittable_threshold_eps,
        object.clearance_rho,
    ))
}

/// Total sittable space of a room: the standable space unioned with every
/// object's sittable band. A colliding `delta` is rejected.
pub fn room_sittable_space(
    room: &Room,
    default_resolution: f64,
    delta: Option<&RoomDelta>,
) -> Result<FunctionalSpace> {
    screen_delta(room, delta)?;
    let raster = RoomRaster::new(room, default_resolution)?;
    Ok(FunctionalSpace {
        room_id: room.id.clone(),
        kind: SpaceKind::Sittable,
        region: raster.sittable(room, delta),
        layout_hash: layout_hash(room, raster.resolution, delta),
    })
}
