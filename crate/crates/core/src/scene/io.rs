use super::catalog::{CatalogPatch, LabelCatalog};
use super::{filter_lightweight, FurnitureObject, Room, Scene};
use crate::error::{Error, Result};
use crate::geometry::{OrientedRect, SimplePolygon};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

/// On-disk scene schema. Linear units are meters; rotations are degrees in
/// files and radians everywhere inside the crate.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    rooms: Vec<RoomFile>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    catalog_overrides: BTreeMap<String, CatalogPatch>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoomFile {
    id: String,
    boundary: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resolution: Option<f64>,
    #[serde(default)]
    objects: Vec<ObjectFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectFile {
    id: String,
    label: String,
    center: [f64; 2],
    size: [f64; 2],
    #[serde(default)]
    rotation_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    movable: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
}

/// Load a scene with the built-in catalog as the base for overrides.
pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene> {
    load_scene_with_catalog(path, &LabelCatalog::builtin())
}

/// Load and validate a scene file; `base` (plus the scene's own
/// `catalog_overrides`) resolves per-label attributes.
pub fn load_scene_with_catalog(path: impl AsRef<Path>, base: &LabelCatalog) -> Result<Scene> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let file: SceneFile = serde_json::from_str(&text)?;

    let mut catalog = base.clone();
    catalog.apply_patches(&file.catalog_overrides)?;

    let mut rooms = Vec::with_capacity(file.rooms.len());
    for room_file in &file.rooms {
        if rooms.iter().any(|r: &Room| r.id == room_file.id) {
            return Err(Error::Scene(format!(
                "duplicate room id '{}'",
                room_file.id
            )));
        }
        rooms.push(build_room(room_file, &catalog)?);
    }
    Ok(Scene { rooms, catalog })
}

fn build_room(file: &RoomFile, catalog: &LabelCatalog) -> Result<Room> {
    let boundary = SimplePolygon::new(file.boundary.iter().map(|v| (v[0], v[1])).collect())
        .map_err(|e| Error::Scene(format!("room '{}': {e}", file.id)))?;
    if let Some(res) = file.resolution {
        if !(res > 0.0 && res.is_finite()) {
            return Err(Error::Scene(format!(
                "room '{}': resolution must be positive, got {res}",
                file.id
            )));
        }
    }

    let mut objects = Vec::with_capacity(file.objects.len());
    for obj in &file.objects {
        let entry = catalog.resolve(&obj.label);
        let footprint = OrientedRect::new(
            obj.center[0],
            obj.center[1],
            obj.size[0],
            obj.size[1],
            obj.rotation_deg.to_radians(),
        )
        .map_err(|e| Error::Scene(format!("room '{}', object '{}': {e}", file.id, obj.id)))?;
        let weight = obj.weight.unwrap_or(entry.unit_weight);
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::Scene(format!(
                "room '{}', object '{}': weight must be >= 0",
                file.id, obj.id
            )));
        }
        objects.push(FurnitureObject {
            id: obj.id.clone(),
            label: obj.label.clone(),
            footprint,
            sittable_threshold_eps: entry.sittable_threshold_eps,
            clearance_rho: entry.clearance_rho,
            unit_weight: weight,
            movable: obj.movable.unwrap_or(entry.movable),
            lightweight: entry.lightweight,
            standable_obstacle: entry.standable_obstacle,
        });
    }
    let objects = filter_lightweight(objects, catalog);

    let room = Room {
        id: file.id.clone(),
        boundary,
        objects,
        resolution_override: file.resolution,
    };
    room.validate()?;
    Ok(room)
}

/// Save a scene. Per-object `movable`/`weight` and the full effective catalog
/// are written explicitly, so reloading resolves to the identical scene even
/// without the original catalog file.
pub fn save_scene(scene: &Scene, path: impl AsRef<Path>) -> Result<()> {
    let file = SceneFile {
        rooms: scene
            .rooms
            .iter()
            .map(|room| RoomFile {
                id: room.id.clone(),
                boundary: room
                    .boundary
                    .vertices()
                    .iter()
                    .map(|&(x, y)| [x, y])
                    .collect(),
                resolution: room.resolution_override,
                objects: room
                    .objects
                    .iter()
                    .map(|o| ObjectFile {
                        id: o.id.clone(),
                        label: o.label.clone(),
                        center: [o.footprint.cx, o.footprint.cy],
                        size: [o.footprint.width, o.footprint.depth],
                        rotation_deg: canonical_deg(o.footprint.rotation),
                        movable: Some(o.movable),
                        weight: Some(o.unit_weight),
                    })
                    .collect(),
            })
            .collect(),
        catalog_overrides: scene.catalog.to_patches(),
    };
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Degrees for serialization, rounded so degree-valued inputs round-trip to
/// the same radians they loaded as.
fn canonical_deg(rad: f64) -> f64 {
    (rad.to_degrees() * 1e12).round() / 1e12
}

/// Load a standalone catalog file (label → partial entry) over the built-in
/// defaults.
pub fn load_catalog_file(path: impl AsRef<Path>) -> Result<LabelCatalog> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let patches: BTreeMap<String, CatalogPatch> = serde_json::from_str(&text)?;
    let mut catalog = LabelCatalog::builtin();
    catalog.apply_patches(&patches)?;
    Ok(catalog)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> std::path::PathBuf {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/fixtures")
            .join(name)
    }

    #[test]
    fn loads_two_identical_rooms_fixture() {
        let scene = load_scene(fixture("two_identical_rooms.json")).unwrap();
        assert_eq!(scene.rooms.len(), 2);
        for room in &scene.rooms {
            assert!((room.boundary.area() - 16.0).abs() < 1e-9);
            assert_eq!(room.objects.len(), 1);
            let table = &room.objects[0];
            assert_eq!(table.label, "table");
            assert_eq!((table.footprint.width, table.footprint.depth), (2.0, 1.0));
            assert_eq!(table.sittable_threshold_eps, 0.70);
        }
    }

    #[test]
    fn round_trips_identically() {
        let scene = load_scene(fixture("two_identical_rooms.json")).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let saved = dir.path().join("scene.json");
        save_scene(&scene, &saved).unwrap();
        let reloaded = load_scene(&saved).unwrap();
        assert_eq!(scene.rooms, reloaded.rooms);
        assert_eq!(scene.catalog, reloaded.catalog);
        // And a second cycle is byte-stable.
        let saved2 = dir.path().join("scene2.json");
        save_scene(&reloaded, &saved2).unwrap();
        assert_eq!(
            fs::read_to_string(&saved).unwrap(),
            fs::read_to_string(&saved2).unwrap()
        );
    }

    #[test]
    fn rejects_object_crossing_wall() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(
            &path,
            r#"{"rooms":[{"id":"r","boundary":[[0,0],[4,0],[4,4],[0,4]],
                "objects":[{"id":"bed1","label":"bed","center":[3.8,2.0],"size":[2.0,1.6]}]}]}"#,
        )
        .unwrap();
        let err = load_scene(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bed1") && msg.contains("outside"), "{msg}");
    }

    #[test]
    fn drops_lightweight_objects() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.json");
        fs::write(
            &path,
            r#"{"rooms":[{"id":"r","boundary":[[0,0],[4,0],[4,4],[0,4]],
                "objects":[
                  {"id":"t","label":"table","center":[2,2],"size":[2,1]},
                  {"id":"p","label":"pillow","center":[1,3],"size":[0.5,0.5]}
                ]}]}"#,
        )
        .unwrap();
        let scene = load_scene(&path).unwrap();
        assert_eq!(scene.rooms[0].objects.len(), 1);
        assert_eq!(scene.rooms[0].objects[0].id, "t");
    }

    #[test]
    fn scene_overrides_apply() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.json");
        fs::write(
            &path,
            r#"{"rooms":[{"id":"r","boundary":[[0,0],[4,0],[4,4],[0,4]],
                "objects":[{"id":"t","label":"table","center":[2,2],"size":[2,1],"weight":12.5}]}],
                "catalog_overrides":{"table":{"eps_m":0.5,"movable":false}}}"#,
        )
        .unwrap();
        let scene = load_scene(&path).unwrap();
        let t = &scene.rooms[0].objects[0];
        assert_eq!(t.sittable_threshold_eps, 0.5);
        assert!(!t.movable);
        assert_eq!(t.unit_weight, 12.5, "per-object weight wins");
    }

    #[test]
    fn rejects_unknown_keys_and_duplicate_rooms() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, r#"{"rooms":[],"unknown_key":1}"#).unwrap();
        assert!(matches!(load_scene(&path), Err(Error::Json(_))));

        fs::write(
            &path,
            r#"{"rooms":[{"id":"r","boundary":[[0,0],[1,0],[1,1],[0,1]]},
                        {"id":"r","boundary":[[0,0],[1,0],[1,1],[0,1]]}]}"#,
        )
        .unwrap();
        let err = load_scene(&path).unwrap_err();
        assert!(err.to_string().contains("duplicate room id"), "{err}");
    }
}
