//! Stepwise minimal-effort furniture rearrangement.
//!
//! Starting from the best pure alignment (step 0, zero effort), each step
//! searches for the cheapest furniture translation — alignment poses staying
//! in the search — that grows the mutual area by a configured ratio over the
//! previous accepted step. The run stops at the first step that cannot reach
//! its target.

use crate::error::{Error, Result};
use crate::geometry::{OccupancyGrid, Pose2D};
use crate::optimizer::alignment::{align_with_evaluator, decode_poses, pose_gene_bounds};
use crate::optimizer::evaluator::{mutual_area_of_grids, SpaceEvaluator};
use crate::optimizer::spea2::{spea2_run, Problem, Spea2Options};
use crate::optimizer::{
    total_effort, GaParams, LayoutDelta, ObjectiveVector, DEFAULT_CONSTRAINT_LAMBDA,
};
use crate::scene::Room;
use crate::scene_graph::{
    build_scene_graph, collision_penalty, movement_bounds, RoomDelta, DEFAULT_PENALTY_BASE,
};
use crate::spaces::SpaceKind;

/// Configuration of a stepwise rearrangement run.
#[derive(Debug, Clone)]
pub struct StepOptions {
    /// Required growth of the mutual area per accepted step.
    pub step_ratio: f64,
    /// Effort-units charged per square meter of shortfall against the step's
    /// area target inside the penalized objective.
    pub constraint_lambda: f64,
    /// Penalty per collision violation (overlapping pair / escaped object).
    pub penalty_base: f64,
    /// Upper bound on the number of rearrangement steps attempted.
    pub max_steps: usize,
    /// Parameters for the step-0 alignment; `None` reuses the step params.
    pub align_params: Option<GaParams>,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions {
            step_ratio: 1.10,
            constraint_lambda: DEFAULT_CONSTRAINT_LAMBDA,
            penalty_base: DEFAULT_PENALTY_BASE,
            max_steps: 64,
            align_params: None,
        }
    }
}

impl StepOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_ratio.is_finite() && self.step_ratio > 1.0) {
            return Err(Error::Params(format!(
                "step ratio must exceed 1, got {}",
                self.step_ratio
            )));
        }
        if !(self.constraint_lambda.is_finite() && self.constraint_lambda > 0.0) {
            return Err(Error::Params(format!(
                "constraint lambda must be positive, got {}",
                self.constraint_lambda
            )));
        }
        if !(self.penalty_base.is_finite() && self.penalty_base > 0.0) {
            return Err(Error::Params(format!(
                "penalty base must be positive, got {}",
                self.penalty_base
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::Params("max steps must be at least 1".into()));
        }
        if let Some(p) = &self.align_params {
            p.validate()?;
        }
        Ok(())
    }
}

/// One accepted point of the rearrangement sequence.
#[derive(Debug, Clone)]
pub struct StepSolution {
    /// Step index; 0 is the pure alignment.
    pub step: usize,
    pub objectives: ObjectiveVector,
    /// One pose per room, index 0 identity.
    pub poses: Vec<Pose2D>,
    pub delta: LayoutDelta,
    /// Generations the search for this step consumed.
    pub generations_run: usize,
}

/// One translation gene pair: a movable object and its local-axis intervals.
#[derive(Debug, Clone)]
pub(crate) struct DeltaGene {
    pub(crate) room_idx: usize,
    pub(crate) object_id: String,
    pub(crate) bounds_u: (f64, f64),
    pub(crate) bounds_v: (f64, f64),
}

/// Gene layout shared by the rearrangement and Pareto searches: the pose
/// block (three genes per non-reference room) followed by two translation
/// genes per movable object, bounded by the initial scene graph's movement
/// intervals.
pub(crate) struct GeneLayout {
    pub(crate) pose_bounds: Vec<(f64, f64)>,
    pub(crate) delta_genes: Vec<DeltaGene>,
}

impl GeneLayout {
    pub(crate) fn new(evaluator: &SpaceEvaluator) -> Result<Self> {
        let mut delta_genes = Vec::new();
        for (room_idx, room) in evaluator.rooms.iter().enumerate() {
            let graph = build_scene_graph(room, evaluator.resolution)?;
            for obj in &room.objects {
                if !obj.movable {
                    continue;
                }
                let b = movement_bounds(&graph, room, &obj.id)?;
                if b.is_zero() {
                    continue;
                }
                delta_genes.push(DeltaGene {
                    room_idx,
                    object_id: obj.id.clone(),
                    bounds_u: b.x,
                    bounds_v: b.y,
                });
            }
        }
        Ok(GeneLayout {
            pose_bounds: pose_gene_bounds(evaluator),
            delta_genes,
        })
    }

    pub(crate) fn n_genes(&self) -> usize {
        self.pose_bounds.len() + 2 * self.delta_genes.len()
    }

    pub(crate) fn gene_bounds(&self, gene: usize) -> (f64, f64) {
        if gene < self.pose_bounds.len() {
            return self.pose_bounds[gene];
        }
        let d = gene - self.pose_bounds.len();
        let g = &self.delta_genes[d / 2];
        if d.is_multiple_of(2) {
            g.bounds_u
        } else {
            g.bounds_v
        }
    }

    /// Split a genotype into per-room poses and a layout delta.
    pub(crate) fn decode(
        &self,
        genes: &[f64],
        rooms: &[Room],
    ) -> (Vec<Pose2D>, LayoutDelta, Vec<RoomDelta>) {
        let poses = decode_poses(genes, rooms.len());
        let mut per_room: Vec<RoomDelta> = vec![RoomDelta::new(); rooms.len()];
        let tail = &genes[self.pose_bounds.len()..];
        for (k, g) in self.delta_genes.iter().enumerate() {
            per_room[g.room_idx].insert(g.object_id.clone(), (tail[2 * k], tail[2 * k + 1]));
        }
        let mut delta = LayoutDelta::zero();
        for (room, map) in rooms.iter().zip(&per_room) {
            if !map.is_empty() {
                delta.rooms.insert(room.id.clone(), map.clone());
            }
        }
        (poses, delta, per_room)
    }

    /// Genotype encoding the given poses with all-zero translations.
    pub(crate) fn encode_poses(&self, poses: &[Pose2D]) -> Vec<f64> {
        let mut genes = Vec::with_capacity(self.n_genes());
        for pose in &poses[1..] {
            genes.extend([pose.tx, pose.ty, pose.theta]);
        }
        genes.resize(self.n_genes(), 0.0);
        genes
    }
}

/// How a layout search scores candidates.
pub(crate) enum LayoutMode {
    /// Minimize `E + penalty + lambda * max(0, target - K)`.
    Constrained { target: f64, lambda: f64 },
    /// Minimize `(-K, E + penalty)` as two objectives.
    Biobjective,
}

pub(crate) struct LayoutProblem<'a> {
    pub(crate) evaluator: &'a SpaceEvaluator,
    pub(crate) layout: &'a GeneLayout,
    pub(crate) penalty_base: f64,
    pub(crate) mode: LayoutMode,
}

impl LayoutProblem<'_> {
    /// K, E and penalty for a genotype, plus its decoded form.
    pub(crate) fn score(&self, genes: &[f64]) -> (ObjectiveVector, Vec<Pose2D>, LayoutDelta) {
        let rooms = &self.evaluator.rooms;
        let (poses, delta, per_room) = self.layout.decode(genes, rooms);
        let mut penalty = 0.0;
        let mut moved: Vec<Option<OccupancyGrid>> = Vec::with_capacity(rooms.len());
        for (i, room) in rooms.iter().enumerate() {
            if per_room[i].is_empty() {
                moved.push(None);
            } else {
                penalty += collision_penalty(room, &per_room[i], self.penalty_base);
                moved.push(Some(self.evaluator.grid_with_delta(i, &per_room[i])));
            }
        }
        let refs: Vec<&OccupancyGrid> = moved
            .iter()
            .enumerate()
            .map(|(i, g)| g.as_ref().unwrap_or_else(|| self.evaluator.base_grid(i)))
            .collect();
        let k = mutual_area_of_grids(&refs, &poses);
        let e = total_effort(rooms, &delta);
        (
            ObjectiveVector {
                mutual_area: k,
                total_effort: e,
                penalty,
            },
            poses,
            delta,
        )
    }
}

impl Problem for LayoutProblem<'_> {
    fn n_genes(&self) -> usize {
        self.layout.n_genes()
    }
    fn n_objectives(&self) -> usize {
        match self.mode {
            LayoutMode::Constrained { .. } => 1,
            LayoutMode::Biobjective => 2,
        }
    }
    fn bounds(&self, gene: usize) -> (f64, f64) {
        self.layout.gene_bounds(gene)
    }
    fn evaluate(&self, genes: &[f64]) -> Vec<f64> {
        let (obj, _, _) = self.score(genes);
        match self.mode {
            LayoutMode::Constrained { target, lambda } => {
                let shortfall = (target - obj.mutual_area).max(0.0);
                vec![obj.total_effort + obj.penalty + lambda * shortfall]
            }
            LayoutMode::Biobjective => {
                vec![-obj.mutual_area, obj.total_effort + obj.penalty]
            }
        }
    }
}

/// The incumbent genotype plus variants that keep its room poses but draw
/// furniture translations uniformly from their bounds.
///
/// Poses and translations only pay off jointly — a translation is worthless
/// under a bad pose — so the first generation needs translation diversity at
/// a known-good pose for crossover to work with.
pub(crate) fn seeded_variants(
    layout: &GeneLayout,
    incumbent: &[f64],
    count: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    use rand::prelude::*;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut seeds = Vec::with_capacity(count + 1);
    seeds.push(incumbent.to_vec());
    for _ in 0..count {
        let mut genes = incumbent.to_vec();
        for (k, g) in genes[layout.pose_bounds.len()..].iter_mut().enumerate() {
            let d = &layout.delta_genes[k / 2];
            let (lo, hi) = if k % 2 == 0 { d.bounds_u } else { d.bounds_v };
            *g = if lo < hi { rng.gen_range(lo..=hi) } else { lo };
        }
        seeds.push(genes);
    }
    seeds
}

/// Grow the mutual space step by step with minimal rearrangement effort.
///
/// Step 0 is the pure alignment; each later step must reach
/// `step_ratio x` the previous step's area with a collision-free layout, or
/// the run stops. Deterministic for a fixed seed.
pub fn rearrange_stepwise(
    rooms: &[Room],
    kind: SpaceKind,
    resolution: f64,
    params: &GaParams,
    options: &StepOptions,
    seed: u64,
) -> Result<Vec<StepSolution>> {
    params.validate()?;
    options.validate()?;
    if rooms.len() < 2 {
        return Err(Error::Params(format!(
            "rearrangement needs at least 2 rooms, got {}",
            rooms.len()
        )));
    }
    let evaluator = SpaceEvaluator::new(rooms, kind, resolution)?;
    let align = align_with_evaluator(
        &evaluator,
        options.align_params.as_ref().unwrap_or(params),
        seed,
    )?;
    let mut steps = vec![StepSolution {
        step: 0,
        objectives: ObjectiveVector {
            mutual_area: align.area,
            total_effort: 0.0,
            penalty: 0.0,
        },
        poses: align.poses.clone(),
        delta: LayoutDelta::zero(),
        generations_run: align.generations_run,
    }];

    let layout = GeneLayout::new(&evaluator)?;
    if layout.delta_genes.is_empty() {
        return Ok(steps);
    }

    // For standable spaces, furniture translations preserve each room's free
    // area, so the smallest room bounds every reachable K; targets beyond it
    // (with raster slack) are hopeless and skip their search.
    let area_cap = match kind {
        SpaceKind::Standable => {
            let min_area = (0..evaluator.room_count())
                .map(|i| evaluator.base_grid(i).area())
                .fold(f64::INFINITY, f64::min);
            Some(min_area * 1.01 + 0.1)
        }
        SpaceKind::Sittable => None,
    };

    let mut prev_genes = layout.encode_poses(&align.poses);
    for step in 1..=options.max_steps {
        let prev = steps.last().unwrap();
        let target = options.step_ratio * prev.objectives.mutual_area;
        if let Some(cap) = area_cap {
            if target > cap {
                break;
            }
        }
        let problem = LayoutProblem {
            evaluator: &evaluator,
            layout: &layout,
            penalty_base: options.penalty_base,
            mode: LayoutMode::Constrained {
                target,
                lambda: options.constraint_lambda,
            },
        };
        let step_seed = seed.wrapping_add(step as u64);
        let seeds = seeded_variants(
            &layout,
            &prev_genes,
            params.population / 2,
            step_seed.wrapping_mul(0x9e3779b97f4a7c15),
        );
        let ga_options = Spea2Options {
            initial_seeds: &seeds,
            reinject: std::slice::from_ref(&prev_genes),
        };
        let outcome = spea2_run(&problem, params, step_seed, &ga_options)?;
        let best = outcome
            .archive
            .iter()
            .min_by(|a, b| a.objectives[0].total_cmp(&b.objectives[0]))
            .expect("archive is never empty");
        let (objectives, poses, delta) = problem.score(&best.genes);
        let reached = objectives.penalty == 0.0 && objectives.mutual_area >= target - 1e-9;
        if !reached {
            break;
        }
        prev_genes = best.genes.clone();
        steps.push(StepSolution {
            step,
            objectives,
            poses,
            delta,
            generations_run: outcome.generations_run,
        });
    }
    Ok(steps)
}
