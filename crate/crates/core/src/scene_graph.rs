//! Scene graph: per-object face clearances, movement bounds, and the
//! collision penalty used to keep candidate layouts physically valid.
//!
//! Every furniture object gets four [`FaceClearance`] records, one per local
//! face (`+u`, `-u`, `+v`, `-v` in the object's own frame). A clearance is the
//! free straight-line distance from that face to the nearest blocker — either
//! another object or the room boundary — measured by casting rays outward
//! from sample points along the face. Links are bidirectional: when face `f`
//! of `a` names `b` as its nearest blocker, `b` records the incoming link.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{rect_overlap, OrientedRect, SimplePolygon};
use crate::scene::{footprint_inside, Room};

/// Default multiplier for [`collision_penalty`]: each overlapping pair and
/// each out-of-room object contributes this much.
pub const DEFAULT_PENALTY_BASE: f64 = 1e6;

/// One face of an oriented rectangle, named in the object's local frame.
///
/// `XMax` is the edge facing local `+u`, `YMax` the edge facing local `+v`,
/// and so on. For an unrotated object these are the right, left, top and
/// bottom edges respectively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Face {
    /// Edge facing local `+u`.
    XMax,
    /// Edge facing local `-u`.
    XMin,
    /// Edge facing local `+v`.
    YMax,
    /// Edge facing local `-v`.
    YMin,
}

impl Face {
    /// All four faces in a fixed, deterministic order.
    pub const ALL: [Face; 4] = [Face::XMax, Face::XMin, Face::YMax, Face::YMin];
}

/// What a face's clearance ray hit first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Blocker {
    /// Another furniture object, by id.
    Object(String),
    /// The room's boundary polygon.
    RoomBoundary,
}

/// Nearest blocker and free distance for one face of one object.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceClearance {
    pub face: Face,
    pub blocker: Blocker,
    /// Free distance in meters from the face to the blocker (>= 0).
    pub distance: f64,
}

/// Per-axis translation bounds for an object, in its local frame.
///
/// Each interval is `(lo, hi)` with `lo <= 0 <= hi`: the object may slide
/// `lo..=hi` along the axis without its leading face passing the nearest
/// blocker recorded in the scene graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovementBounds {
    /// Allowed offsets along local `u` (width axis).
    pub x: (f64, f64),
    /// Allowed offsets along local `v` (depth axis).
    pub y: (f64, f64),
}

impl MovementBounds {
    /// Bounds that permit no movement at all.
    pub const ZERO: MovementBounds = MovementBounds {
        x: (0.0, 0.0),
        y: (0.0, 0.0),
    };

    /// True if no translation is permitted on either axis.
    pub fn is_zero(&self) -> bool {
        self.x == (0.0, 0.0) && self.y == (0.0, 0.0)
    }
}

/// Clearance graph for one room: four face records per object plus the
/// reverse links needed to answer "who is blocked by me".
#[derive(Debug, Clone)]
pub struct SceneGraph {
    pub room_id: String,
    /// Four clearance records per object id, ordered as [`Face::ALL`].
    pub clearances: BTreeMap<String, [FaceClearance; 4]>,
    /// Reverse adjacency: for each object id, the (source object, source face)
    /// pairs whose nearest blocker is this object.
    pub blocked_by_links: BTreeMap<String, Vec<(String, Face)>>,
}

impl SceneGraph {
    /// The clearance record for one face of one object, if the object exists.
    pub fn clearance(&self, object_id: &str, face: Face) -> Option<&FaceClearance> {
        let records = self.clearances.get(object_id)?;
        records.iter().find(|c| c.face == face)
    }
}

/// Per-room layout perturbation: object id -> translation `(du, dv)` along
/// the object's local axes. Objects absent from the map stay in place.
pub type RoomDelta = BTreeMap<String, (f64, f64)>;

type Point = (f64, f64);

/// The two world-space endpoints of a face edge plus its outward unit normal.
fn face_edge(rect: &OrientedRect, face: Face) -> (Point, Point, Point) {
    // corners() is CCW starting from local (+u, +v).
    let c = rect.corners();
    let [u, v] = rect.axes();
    match face {
        Face::XMax => (c[3], c[0], u),
        Face::YMax => (c[0], c[1], v),
        Face::XMin => (c[1], c[2], (-u.0, -u.1)),
        Face::YMin => (c[2], c[3], (-v.0, -v.1)),
    }
}

/// Distance along the ray `origin + t * dir` to the given oriented rectangle,
/// or `None` if the ray misses it. Uses slab intersection in the rectangle's
/// local frame. Hits behind the origin are ignored; a hit that starts inside
/// or flush against the rectangle reports distance 0.
fn ray_rect_distance(origin: Point, dir: Point, rect: &OrientedRect) -> Option<f64> {
    let (lu, lv) = rect.to_local(origin);
    let [au, av] = rect.axes();
    // Direction expressed in the rectangle's local frame.
    let du = dir.0 * au.0 + dir.1 * au.1;
    let dv = dir.0 * av.0 + dir.1 * av.1;

    let mut t_enter = f64::NEG_INFINITY;
    let mut t_exit = f64::INFINITY;
    for (o, d, half) in [(lu, du, rect.width / 2.0), (lv, dv, rect.depth / 2.0)] {
        if d.abs() < 1e-12 {
            if o < -half || o > half {
                return None;
            }
            continue;
        }
        let t0 = (-half - o) / d;
        let t1 = (half - o) / d;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        t_enter = t_enter.max(lo);
        t_exit = t_exit.min(hi);
        if t_enter > t_exit {
            return None;
        }
    }
    if t_exit < -1e-9 {
        return None;
    }
    Some(t_enter.max(0.0))
}

/// Distance along the ray to the segment `a -> b`, or `None` on a miss.
/// Rays parallel to the segment never hit it (grazing contact is resolved by
/// the neighbouring boundary edges).
fn ray_segment_distance(origin: Point, dir: Point, a: Point, b: Point) -> Option<f64> {
    let ex = b.0 - a.0;
    let ey = b.1 - a.1;
    let denom = dir.0 * ey - dir.1 * ex;
    if denom.abs() < 1e-12 {
        return None;
    }
    let ox = a.0 - origin.0;
    let oy = a.1 - origin.1;
    let t = (ox * ey - oy * ex) / denom;
    let u = (ox * dir.1 - oy * dir.0) / denom;
    if t < -1e-9 || !(-1e-9..=1.0 + 1e-9).contains(&u) {
        return None;
    }
    Some(t.max(0.0))
}

/// Shortest ray distance from any boundary edge of `polygon`.
fn ray_polygon_distance(origin: Point, dir: Point, polygon: &SimplePolygon) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (a, b) in polygon.edges() {
        if let Some(t) = ray_segment_distance(origin, dir, a, b) {
            if best.is_none_or(|cur| t < cur) {
                best = Some(t);
            }
        }
    }
    best
}

/// Builds the clearance graph for `room`.
///
/// `sample_spacing` controls how densely each face is probed: sample points
/// are spaced at most this far apart along the face, endpoints included, and
/// one outward ray is cast per sample. Pass the room's raster resolution so
/// graph fidelity matches the functional-space rasters.
pub fn build_scene_graph(room: &Room, sample_spacing: f64) -> Result<SceneGraph> {
    if !(sample_spacing.is_finite() && sample_spacing > 0.0) {
        return Err(Error::Params(format!(
            "sample spacing must be positive and finite, got {sample_spacing}"
        )));
    }

    let mut clearances = BTreeMap::new();
    let mut blocked_by_links: BTreeMap<String, Vec<(String, Face)>> = BTreeMap::new();

    for obj in &room.objects {
        let mut records = Vec::with_capacity(4);
        for face in Face::ALL {
            let (p0, p1, normal) = face_edge(&obj.footprint, face);
            let len = ((p1.0 - p0.0).powi(2) + (p1.1 - p0.1).powi(2)).sqrt();
            let segments = (len / sample_spacing).ceil().max(1.0) as usize;

            let mut best_dist = f64::INFINITY;
            let mut best_blocker = Blocker::RoomBoundary;
            for i in 0..=segments {
                let s = i as f64 / segments as f64;
                let p = (p0.0 + s * (p1.0 - p0.0), p0.1 + s * (p1.1 - p0.1));
                for other in &room.objects {
                    if other.id == obj.id {
                        continue;
                    }
                    if let Some(t) = ray_rect_distance(p, normal, &other.footprint) {
                        if t < best_dist {
                            best_dist = t;
                            best_blocker = Blocker::Object(other.id.clone());
                        }
                    }
                }
                if let Some(t) = ray_polygon_distance(p, normal, &room.boundary) {
                    if t < best_dist {
                        best_dist = t;
                        best_blocker = Blocker::RoomBoundary;
                    }
                }
            }

            if !best_dist.is_finite() {
                return Err(Error::Scene(format!(
                    "room '{}': face {:?} of object '{}' sees no blocker; \
                     the object lies outside the room boundary",
                    room.id, face, obj.id
                )));
            }
            if let Blocker::Object(ref target) = best_blocker {
                blocked_by_links
                    .entry(target.clone())
                    .or_default()
                    .push((obj.id.clone(), face));
            }
            records.push(FaceClearance {
                face,
                blocker: best_blocker,
                distance: best_dist,
            });
        }
        let records: [FaceClearance; 4] = records.try_into().expect("four faces");
        clearances.insert(obj.id.clone(), records);
    }

    Ok(SceneGraph {
        room_id: room.id.clone(),
        clearances,
        blocked_by_links,
    })
}

/// Translation bounds for `object_id` derived from its face clearances.
///
/// A movable object may slide along each local axis until the leading face
/// reaches its nearest blocker: the interval is `[-d(min_face), +d(max_face)]`.
/// Immovable objects get [`MovementBounds::ZERO`]. Unknown ids are an error.
pub fn movement_bounds(graph: &SceneGraph, room: &Room, object_id: &str) -> Result<MovementBounds> {
    let records = graph.clearances.get(object_id).ok_or_else(|| {
        Error::Scene(format!(
            "room '{}': no object '{object_id}' in the scene graph",
            graph.room_id
        ))
    })?;
    let obj = room.object(object_id).ok_or_else(|| {
        Error::Scene(format!(
            "room '{}': no object '{object_id}' in the room",
            room.id
        ))
    })?;
    if !obj.movable {
        return Ok(MovementBounds::ZERO);
    }
    let dist = |face: Face| -> f64 {
        records
            .iter()
            .find(|c| c.face == face)
            .map(|c| c.distance)
            .unwrap_or(0.0)
    };
    Ok(MovementBounds {
        x: (-dist(Face::XMin), dist(Face::XMax)),
        y: (-dist(Face::YMin), dist(Face::YMax)),
    })
}

/// Applies `delta` to the room's objects and returns the moved footprints in
/// room object order. Delta entries for unknown ids are ignored.
pub fn moved_footprints(room: &Room, delta: &RoomDelta) -> Vec<OrientedRect> {
    room.objects
        .iter()
        .map(|obj| match delta.get(&obj.id) {
            Some(&offset) => obj.footprint_moved(offset),
            None => obj.footprint,
        })
        .collect()
}

/// Penalty for physically invalid layouts after applying `delta`.
///
/// Counts (a) unordered pairs of objects whose moved footprints overlap and
/// (b) objects whose moved footprint is no longer inside the room boundary,
/// then returns `penalty_base * (pairs + out_of_room)`. A valid layout scores
/// exactly 0. The result is independent of object order.
pub fn collision_penalty(room: &Room, delta: &RoomDelta, penalty_base: f64) -> f64 {
    let moved = moved_footprints(room, delta);
    let mut violations = 0usize;
    for i in 0..moved.len() {
        for j in (i + 1)..moved.len() {
            if rect_overlap(&moved[i], &moved[j]) {
                violations += 1;
            }
        }
    }
    for rect in &moved {
        if !footprint_inside(&room.boundary, rect) {
            violations += 1;
        }
    }
    penalty_base * violations as f64
}
