//! Domain model: rooms, furniture, and the per-label default catalog.
//!
//! Scenes arrive as JSON (see [`io`]): rooms are simple polygons, furniture
//! pieces are labeled oriented boxes. Labels resolve physical attributes
//! (sittable threshold, body clearance, weight, flags) from a catalog that
//! users can override globally, per scene, or per object. Lightweight items
//! (pillows, laptops, ...) are dropped at load time and never participate in
//! any spatial computation.

mod catalog;
mod io;

pub use catalog::{CatalogPatch, LabelCatalog, LabelCatalogEntry};
pub use io::{load_catalog_file, load_scene, load_scene_with_catalog, save_scene};

use crate::error::{Error, Result};
use crate::geometry::{rect_overlap, OrientedRect, SimplePolygon};

/// Tolerance for "inside the room" checks, so furniture flush against a wall
/// validates cleanly while anything visibly crossing a wall is rejected.
const WALL_CONTACT_TOL: f64 = 1e-6;

/// A piece of furniture with all catalog attributes resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct FurnitureObject {
    pub id: String,
    pub label: String,
    pub footprint: OrientedRect,
    /// Maximum inward distance from the footprint edge that stays sittable;
    /// 0 marks the object non-sittable.
    pub sittable_threshold_eps: f64,
    /// Free radius a seated body needs around a sittable point.
    pub clearance_rho: f64,
    /// Effort units per meter of translation.
    pub unit_weight: f64,
    pub movable: bool,
    pub lightweight: bool,
    /// Whether the footprint blocks standing (false for rugs and the like).
    pub standable_obstacle: bool,
}

impl FurnitureObject {
    /// Footprint after translating by `(du, dv)` along the object's local
    /// axes (the frame rotated with the footprint).
    pub fn footprint_moved(&self, local_delta: (f64, f64)) -> OrientedRect {
        let [u, v] = self.footprint.axes();
        self.footprint.translated(
            local_delta.0 * u.0 + local_delta.1 * v.0,
            local_delta.0 * u.1 + local_delta.1 * v.1,
        )
    }
}

/// A room: a simple polygon boundary plus its (non-lightweight) furniture.
#[derive(Debug, Clone, PartialEq)]
pub struct Room {
    pub id: String,
    pub boundary: SimplePolygon,
    pub objects: Vec<FurnitureObject>,
    /// Per-room raster resolution, overriding the run configuration.
    pub resolution_override: Option<f64>,
}

impl Room {
    pub fn effective_resolution(&self, default: f64) -> f64 {
        self.resolution_override.unwrap_or(default)
    }

    pub fn object(&self, id: &str) -> Option<&FurnitureObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Validate the room invariants: unique object ids, furniture inside the
    /// boundary, no overlapping footprints.
    pub fn validate(&self) -> Result<()> {
        for (i, obj) in self.objects.iter().enumerate() {
            if self.objects[..i].iter().any(|other| other.id == obj.id) {
                return Err(Error::Scene(format!(
                    "room '{}': duplicate object id '{}'",
                    self.id, obj.id
                )));
            }
            if !footprint_inside(&self.boundary, &obj.footprint) {
                return Err(Error::Scene(format!(
                    "room '{}': object '{}' extends outside the room boundary",
                    self.id, obj.id
                )));
            }
            for other in &self.objects[..i] {
                if rect_overlap(&obj.footprint, &other.footprint) {
                    return Err(Error::Scene(format!(
                        "room '{}': objects '{}' and '{}' overlap",
                        self.id, other.id, obj.id
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A loaded scene: validated rooms plus the catalog they were resolved with
/// (kept so saves round-trip the effective attributes).
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub rooms: Vec<Room>,
    pub catalog: LabelCatalog,
}

/// Drop objects whose catalog entry marks them lightweight; order preserved.
pub fn filter_lightweight(
    objects: Vec<FurnitureObject>,
    catalog: &LabelCatalog,
) -> Vec<FurnitureObject> {
    objects
        .into_iter()
        .filter(|o| !catalog.resolve(&o.label).lightweight)
        .collect()
}

/// Whether a footprint lies inside the polygon (wall contact allowed).
pub(crate) fn footprint_inside(boundary: &SimplePolygon, footprint: &OrientedRect) -> bool {
    let corners = footprint.corners();
    if corners
        .iter()
        .any(|&c| !boundary.contains_with_tolerance(c, WALL_CONTACT_TOL))
    {
        return false;
    }
    // Corners inside is not sufficient for non-convex rooms: reject walls
    // properly crossing the footprint or boundary vertices poking into it.
    for (a, b) in boundary.edges() {
        for i in 0..4 {
            if segments_properly_cross((a, b), (corners[i], corners[(i + 1) % 4])) {
                return false;
            }
        }
    }
    boundary
        .vertices()
        .iter()
        .all(|&v| footprint.interior_clearance(v) <= WALL_CONTACT_TOL)
}

/// Strict interior crossing; touching or collinear contact does not count,
/// so flush-to-wall placements survive.
fn segments_properly_cross(e1: ((f64, f64), (f64, f64)), e2: ((f64, f64), (f64, f64))) -> bool {
    fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
        (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
    }
    let d1 = orient(e2.0, e2.1, e1.0);
    let d2 = orient(e2.0, e2.1, e1.1);
    let d3 = orient(e1.0, e1.1, e2.0);
    let d4 = orient(e1.0, e1.1, e2.1);
    let eps = 1e-12;
    ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(id: &str, cx: f64, cy: f64) -> FurnitureObject {
        FurnitureObject {
            id: id.into(),
            label: "table".into(),
            footprint: OrientedRect::new(cx, cy, 2.0, 1.0, 0.0).unwrap(),
            sittable_threshold_eps: 0.7,
            clearance_rho: 0.4,
            unit_weight: 30.0,
            movable: true,
            lightweight: false,
            standable_obstacle: true,
        }
    }

    fn square_room(objects: Vec<FurnitureObject>) -> Room {
        Room {
            id: "r".into(),
            boundary: SimplePolygon::rectangle((0.0, 0.0), (4.0, 4.0)).unwrap(),
            objects,
            resolution_override: None,
        }
    }

    #[test]
    fn validates_clean_room() {
        square_room(vec![table("t1", 2.0, 2.0)]).validate().unwrap();
    }

    #[test]
    fn flush_to_wall_is_valid() {
        // Table corners exactly on the x-max wall.
        square_room(vec![table("t1", 3.0, 2.0)]).validate().unwrap();
    }

    #[test]
    fn rejects_wall_crossing() {
        let err = square_room(vec![table("bed1", 3.5, 2.0)])
            .validate()
            .unwrap_err();
        assert!(err.to_string().contains("bed1"), "{err}");
    }

    #[test]
    fn rejects_overlap_and_duplicates() {
        let err = square_room(vec![table("a", 2.0, 2.0), table("b", 2.5, 2.0)])
            .validate()
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('a') && msg.contains('b'), "{msg}");

        let err = square_room(vec![table("a", 1.0, 1.0), table("a", 3.0, 3.0)])
            .validate()
            .unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn non_convex_room_catches_poking_footprint() {
        // L-shaped room; a rect whose corners are inside both legs but which
        // crosses the notch.
        let boundary = SimplePolygon::new(vec![
            (0.0, 0.0),
            (4.0, 0.0),
            (4.0, 1.0),
            (2.5, 1.0),
            (2.5, 3.0),
            (4.0, 3.0),
            (4.0, 4.0),
            (0.0, 4.0),
        ])
        .unwrap();
        let rect = OrientedRect::new(2.0, 2.0, 1.0, 3.5, 0.0).unwrap();
        assert!(footprint_inside(&boundary, &rect));
        let poking = OrientedRect::new(2.5, 2.0, 1.0, 3.5, 0.0).unwrap();
        assert!(!footprint_inside(&boundary, &poking));
    }

    #[test]
    fn local_frame_move_follows_rotation() {
        let mut obj = table("t", 0.0, 0.0);
        obj.footprint.rotation = std::f64::consts::FRAC_PI_2;
        let moved = obj.footprint_moved((1.0, 0.0));
        // Local +x now points along world +y.
        assert!((moved.cx - 0.0).abs() < 1e-12);
        assert!((moved.cy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn filter_lightweight_behaviour() {
        let catalog = LabelCatalog::builtin();
        assert!(filter_lightweight(vec![], &catalog).is_empty());

        let mut pillow = table("p", 1.0, 1.0);
        pillow.label = "pillow".into();
        let kept = filter_lightweight(vec![table("t", 2.0, 2.0), pillow.clone()], &catalog);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].id, "t");

        assert!(filter_lightweight(vec![pillow], &catalog).is_empty());
    }
}
