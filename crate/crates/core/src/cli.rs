//! Run configuration and the command pipeline behind the binary: loading
//! scenes, running each stage, and writing JSON/CSV reports plus SVG floor
//! plans.
//!
//! Every command is deterministic for a fixed seed: repeated runs with
//! identical inputs produce byte-identical files (no timestamps, sorted JSON
//! keys, stable number formatting).

use crate::error::{Error, Result};
use crate::geometry::Pose2D;
use crate::optimizer::{
    align_rooms, optimize_pareto, rearrange_stepwise, total_effort, GaParams, LayoutDelta,
    ParetoOptions, StepOptions, StepSolution, DEFAULT_CONSTRAINT_LAMBDA,
};
use crate::render::{layout_svg, pareto_svg, room_svg, RenderStyle, RoomScene};
use crate::scene::{load_catalog_file, load_scene_with_catalog, LabelCatalog, Room, Scene};
use crate::scene_graph::DEFAULT_PENALTY_BASE;
use crate::spaces::{room_sittable_space, standable_space, FunctionalSpace, SpaceKind};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Environment variable holding a default config-file path.
pub const CONFIG_ENV_VAR: &str = "MUTUALSPACE_CONFIG";

/// Evolutionary-search parameters plus the seed, as one config block.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaBlock {
    pub population: usize,
    pub generations: usize,
    pub mutation_probability: f64,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    pub stagnation_window: usize,
    pub seed: u64,
}

impl GaBlock {
    fn from_params(p: GaParams) -> Self {
        GaBlock {
            population: p.population,
            generations: p.generations,
            mutation_probability: p.mutation_probability,
            mutation_rate: p.mutation_rate,
            crossover_rate: p.crossover_rate,
            stagnation_window: p.stagnation_window,
            seed: 0,
        }
    }

    pub fn params(&self) -> GaParams {
        GaParams {
            population: self.population,
            generations: self.generations,
            mutation_probability: self.mutation_probability,
            mutation_rate: self.mutation_rate,
            crossover_rate: self.crossover_rate,
            stagnation_window: self.stagnation_window,
        }
    }
}

/// Fields omitted from a partial block fall back to these rearrangement-grade
/// defaults (the alignment block's milder defaults come from `RunConfig`).
impl Default for GaBlock {
    fn default() -> Self {
        GaBlock::from_params(GaParams::default_rearrange())
    }
}

/// One run's complete configuration; the config file mirrors this shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Raster resolution in meters (rooms may override individually).
    pub resolution: f64,
    pub align: GaBlock,
    pub rearrange: GaBlock,
    pub pareto: GaBlock,
    /// Required mutual-area growth per rearrangement step.
    pub step_ratio: f64,
    /// Penalty per collision violation.
    pub penalty_base: f64,
    /// Effort-units per square meter of target shortfall in step fitness.
    pub constraint_lambda: f64,
    /// Upper bound on rearrangement steps.
    pub max_steps: usize,
    /// Optional label-catalog file layered over the built-in defaults.
    pub catalog: Option<PathBuf>,
    /// Output directory.
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            resolution: 0.05,
            align: GaBlock::from_params(GaParams::default_align()),
            rearrange: GaBlock::default(),
            pareto: GaBlock::default(),
            step_ratio: 1.10,
            penalty_base: DEFAULT_PENALTY_BASE,
            constraint_lambda: DEFAULT_CONSTRAINT_LAMBDA,
            max_steps: 64,
            catalog: None,
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::Config(format!(
                "resolution must be positive, got {}",
                self.resolution
            )));
        }
        for (name, block) in [
            ("align", &self.align),
            ("rearrange", &self.rearrange),
            ("pareto", &self.pareto),
        ] {
            block
                .params()
                .validate()
                .map_err(|e| Error::Config(format!("{name} block: {e}")))?;
        }
        self.step_options()?;
        Ok(())
    }

    fn step_options(&self) -> Result<StepOptions> {
        let options = StepOptions {
            step_ratio: self.step_ratio,
            constraint_lambda: self.constraint_lambda,
            penalty_base: self.penalty_base,
            max_steps: self.max_steps,
            align_params: Some(self.align.params()),
        };
        options.validate()?;
        Ok(options)
    }

    fn pareto_options(&self) -> ParetoOptions {
        ParetoOptions {
            penalty_base: self.penalty_base,
            align_params: Some(self.align.params()),
        }
    }
}

/// CLI flag values that override config-file fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// Replaces the seed of every GA block.
    pub seed: Option<u64>,
    pub resolution: Option<f64>,
    pub out: Option<PathBuf>,
}

/// Effective config: explicit `--config` path, else `MUTUALSPACE_CONFIG`,
/// else defaults; then CLI overrides, then validation.
pub fn resolve_config(explicit: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let mut config = match explicit {
        Some(path) => RunConfig::load(path)?,
        None => match std::env::var_os(CONFIG_ENV_VAR) {
            Some(path) if !path.is_empty() => RunConfig::load(Path::new(&path))?,
            _ => RunConfig::default(),
        },
    };
    if let Some(seed) = overrides.seed {
        config.align.seed = seed;
        config.rearrange.seed = seed;
        config.pareto.seed = seed;
    }
    if let Some(resolution) = overrides.resolution {
        config.resolution = resolution;
    }
    if let Some(out) = &overrides.out {
        config.out = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn load_scene_for(config: &RunConfig, scene_path: &Path) -> Result<Scene> {
    let catalog = match &config.catalog {
        Some(path) => load_catalog_file(path)?,
        None => LabelCatalog::builtin(),
    };
    load_scene_with_catalog(scene_path, &catalog)
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent.display().to_string(), e))?;
    }
    fs::write(path, content).map_err(|e| Error::io(path.display().to_string(), e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn json_text(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON value serializes");
    text.push('\n');
    text
}

fn kind_name(kind: SpaceKind) -> &'static str {
    match kind {
        SpaceKind::Standable => "standable",
        SpaceKind::Sittable => "sittable",
    }
}

fn pose_json(room_id: &str, pose: &Pose2D) -> Value {
    json!({
        "room_id": room_id,
        "tx": pose.tx,
        "ty": pose.ty,
        "theta_rad": pose.theta,
        "theta_deg": pose.theta.to_degrees(),
    })
}

fn poses_json(rooms: &[Room], poses: &[Pose2D]) -> Vec<Value> {
    rooms
        .iter()
        .zip(poses)
        .map(|(room, pose)| pose_json(&room.id, pose))
        .collect()
}

fn delta_json(delta: &LayoutDelta) -> Value {
    let mut rooms = serde_json::Map::new();
    for (room_id, room_delta) in &delta.rooms {
        let mut objects = serde_json::Map::new();
        for (object_id, &(du, dv)) in room_delta {
            objects.insert(object_id.clone(), json!({ "du": du, "dv": dv }));
        }
        rooms.insert(room_id.clone(), Value::Object(objects));
    }
    Value::Object(rooms)
}

/// `room tx=.. ty=.. theta_deg=..` per room, `;`-joined (commas stay free for
/// the CSV separator).
fn poses_listing(rooms: &[Room], poses: &[Pose2D]) -> String {
    let mut out = String::new();
    for (room, pose) in rooms.iter().zip(poses) {
        if !out.is_empty() {
            out.push(';');
        }
        let _ = write!(
            out,
            "{} tx={} ty={} theta_deg={}",
            room.id,
            pose.tx,
            pose.ty,
            pose.theta.to_degrees()
        );
    }
    out
}

/// `room.object du=.. dv=..` per moved object, `;`-joined.
fn delta_listing(delta: &LayoutDelta) -> String {
    let mut out = String::new();
    for (room_id, room_delta) in &delta.rooms {
        for (object_id, &(du, dv)) in room_delta {
            if !out.is_empty() {
                out.push(';');
            }
            let _ = write!(out, "{room_id}.{object_id} du={du} dv={dv}");
        }
    }
    out
}

/// Functional space of the requested kind with an optional rearrangement.
fn space_of_kind(
    room: &Room,
    kind: SpaceKind,
    resolution: f64,
    delta: &LayoutDelta,
) -> Result<FunctionalSpace> {
    let room_delta = delta.room(&room.id);
    match kind {
        SpaceKind::Standable => standable_space(room, resolution, room_delta),
        SpaceKind::Sittable => room_sittable_space(room, resolution, room_delta),
    }
}

/// Per-room standable/sittable report plus one floor plan per room.
pub fn cmd_spaces(scene_path: &Path, config: &RunConfig) -> Result<()> {
    let scene = load_scene_for(config, scene_path)?;
    let style = RenderStyle::default();
    let mut records = Vec::with_capacity(scene.rooms.len());
    for room in &scene.rooms {
        let standable = standable_space(room, config.resolution, None)?;
        let sittable = room_sittable_space(room, config.resolution, None)?;
        let caption = format!(
            "standable {:.2} m², sittable {:.2} m²",
            standable.area(),
            sittable.area()
        );
        let svg = room_svg(
            &RoomScene {
                room,
                standable: &standable.region,
                sittable: Some(&sittable.region),
                mutual: None,
                delta: None,
                caption: Some(caption),
            },
            &style,
        );
        write_text(
            &config.out.join("rooms").join(format!("{}.svg", room.id)),
            &svg,
        )?;
        records.push(json!({
            "room_id": room.id,
            "standable_area_m2": standable.area(),
            "sittable_area_m2": sittable.area(),
            "layout_hash": format!("{:016x}", standable.layout_hash),
        }));
    }
    let report = json!({
        "resolution": config.resolution,
        "rooms": records,
    });
    write_text(&config.out.join("spaces.json"), &json_text(&report))
}

/// Pure alignment: report with poses, K and the per-generation trace, plus a
/// blue mutual-region overlay on every room.
pub fn cmd_align(scene_path: &Path, kind: SpaceKind, config: &RunConfig) -> Result<()> {
    let scene = load_scene_for(config, scene_path)?;
    let result = align_rooms(
        &scene.rooms,
        kind,
        config.resolution,
        &config.align.params(),
        config.align.seed,
    )?;
    let report = json!({
        "kind": kind_name(kind),
        "seed": result.seed,
        "mutual_area_m2": result.area,
        "generations_run": result.generations_run,
        "evaluations": result.evaluations,
        "poses": poses_json(&scene.rooms, &result.poses),
        "k_trace": result.k_trace,
    });
    write_text(&config.out.join("alignment.json"), &json_text(&report))?;

    let style = RenderStyle::default();
    let no_delta = LayoutDelta::zero();
    for (room, pose) in scene.rooms.iter().zip(&result.poses) {
        let standable = standable_space(room, config.resolution, None)?;
        let sittable = match kind {
            SpaceKind::Sittable => Some(room_sittable_space(room, config.resolution, None)?),
            SpaceKind::Standable => None,
        };
        let into_room = pose.inverse().compose(&result.poses[0]);
        let svg = room_svg(
            &RoomScene {
                room,
                standable: &standable.region,
                sittable: sittable.as_ref().map(|s| &s.region),
                mutual: Some((&result.region, into_room)),
                delta: no_delta.room(&room.id),
                caption: Some(format!("mutual {:.2} m²", result.area)),
            },
            &style,
        );
        write_text(
            &config.out.join("rooms").join(format!("{}.svg", room.id)),
            &svg,
        )?;
    }
    Ok(())
}

fn step_json(rooms: &[Room], step: &StepSolution) -> Value {
    json!({
        "step": step.step,
        "mutual_area_m2": step.objectives.mutual_area,
        "total_effort": step.objectives.total_effort,
        "penalty": step.objectives.penalty,
        "poses": poses_json(rooms, &step.poses),
        "delta": delta_json(&step.delta),
        "generations_run": step.generations_run,
    })
}

/// CSV of a solution sequence; `label` names the first column.
fn solutions_csv(
    rooms: &[Room],
    label: &str,
    rows: impl Iterator<
        Item = (
            usize,
            crate::optimizer::ObjectiveVector,
            Vec<Pose2D>,
            LayoutDelta,
        ),
    >,
) -> String {
    let mut csv = format!("{label},K_m2,E,penalty,poses,deltas\n");
    for (index, objectives, poses, delta) in rows {
        let _ = writeln!(
            csv,
            "{index},{},{},{},{},{}",
            objectives.mutual_area,
            objectives.total_effort,
            objectives.penalty,
            poses_listing(rooms, &poses),
            delta_listing(&delta)
        );
    }
    csv
}

/// One overlay SVG for a rearrangement step: every room with its moved
/// furniture, arrows, per-room effort caption, and the mutual region.
fn step_svg(
    rooms: &[Room],
    kind: SpaceKind,
    resolution: f64,
    step: &StepSolution,
    style: &RenderStyle,
) -> Result<String> {
    let spaces: Vec<FunctionalSpace> = rooms
        .iter()
        .map(|room| space_of_kind(room, kind, resolution, &step.delta))
        .collect::<Result<_>>()?;
    let region = crate::optimizer::mutual_region(&spaces, &step.poses)?;
    // For sittable runs the evaluated space is the sittable region; the plan
    // still paints the standable base underneath it.
    let standables: Option<Vec<FunctionalSpace>> = match kind {
        SpaceKind::Standable => None,
        SpaceKind::Sittable => Some(
            rooms
                .iter()
                .map(|room| standable_space(room, resolution, step.delta.room(&room.id)))
                .collect::<Result<_>>()?,
        ),
    };
    let scenes: Vec<RoomScene> = rooms
        .iter()
        .enumerate()
        .zip(&step.poses)
        .map(|((i, room), pose)| {
            let room_effort = {
                let mut single = LayoutDelta::zero();
                if let Some(d) = step.delta.room(&room.id) {
                    single.rooms.insert(room.id.clone(), d.clone());
                }
                total_effort(std::slice::from_ref(room), &single)
            };
            let (standable, sittable) = match &standables {
                Some(bases) => (&bases[i].region, Some(&spaces[i].region)),
                None => (&spaces[i].region, None),
            };
            RoomScene {
                room,
                standable,
                sittable,
                mutual: Some((&region, pose.inverse().compose(&step.poses[0]))),
                delta: step.delta.room(&room.id),
                caption: Some(format!("E = {room_effort:.2}")),
            }
        })
        .collect();
    let heading = format!(
        "step {}: K = {:.2} m², E = {:.2}",
        step.step, step.objectives.mutual_area, step.objectives.total_effort
    );
    Ok(layout_svg(&scenes, &heading, style))
}

/// Stepwise rearrangement: a JSON and SVG per accepted step plus a CSV of the
/// whole sequence.
pub fn cmd_rearrange(scene_path: &Path, kind: SpaceKind, config: &RunConfig) -> Result<()> {
    let scene = load_scene_for(config, scene_path)?;
    let steps = rearrange_stepwise(
        &scene.rooms,
        kind,
        config.resolution,
        &config.rearrange.params(),
        &config.step_options()?,
        config.rearrange.seed,
    )?;
    let style = RenderStyle::default();
    for step in &steps {
        write_text(
            &config.out.join("steps").join(format!("{}.json", step.step)),
            &json_text(&step_json(&scene.rooms, step)),
        )?;
        let svg = step_svg(&scene.rooms, kind, config.resolution, step, &style)?;
        write_text(
            &config.out.join("steps").join(format!("{}.svg", step.step)),
            &svg,
        )?;
    }
    let csv = solutions_csv(
        &scene.rooms,
        "step",
        steps
            .iter()
            .map(|s| (s.step, s.objectives, s.poses.clone(), s.delta.clone())),
    );
    write_text(&config.out.join("steps.csv"), &csv)
}

/// Area/effort Pareto front: CSV, JSON, and a scatter plot.
pub fn cmd_pareto(scene_path: &Path, kind: SpaceKind, config: &RunConfig) -> Result<()> {
    let scene = load_scene_for(config, scene_path)?;
    let front = optimize_pareto(
        &scene.rooms,
        kind,
        config.resolution,
        &config.pareto.params(),
        &config.pareto_options(),
        config.pareto.seed,
    )?;
    let csv = solutions_csv(
        &scene.rooms,
        "rank",
        front
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| (i, m.objectives, m.poses.clone(), m.delta.clone())),
    );
    write_text(&config.out.join("pareto.csv"), &csv)?;

    let members: Vec<Value> = front
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            json!({
                "rank": i,
                "mutual_area_m2": m.objectives.mutual_area,
                "total_effort": m.objectives.total_effort,
                "penalty": m.objectives.penalty,
                "poses": poses_json(&scene.rooms, &m.poses),
                "delta": delta_json(&m.delta),
            })
        })
        .collect();
    let report = json!({
        "kind": kind_name(kind),
        "seed": front.seed,
        "generations_run": front.generations_run,
        "evaluations": front.evaluations,
        "members": members,
    });
    write_text(&config.out.join("pareto.json"), &json_text(&report))?;

    let points: Vec<(f64, f64)> = front
        .members
        .iter()
        .map(|m| (m.objectives.total_effort, m.objectives.mutual_area))
        .collect();
    let svg = pareto_svg(&points, &RenderStyle::default());
    write_text(&config.out.join("pareto.svg"), &svg)
}
