//! Joint area/effort trade-off search.
//!
//! Runs a bi-objective evolutionary search over room poses and furniture
//! translations at once, maximizing the mutual area while minimizing the
//! rearrangement effort, and returns the collision-free Pareto front. The
//! pure-alignment layout is seeded into the search and anchors the front's
//! zero-effort end.

use crate::error::{Error, Result};
use crate::geometry::Pose2D;
use crate::optimizer::alignment::align_with_evaluator;
use crate::optimizer::evaluator::SpaceEvaluator;
use crate::optimizer::rearrange::{seeded_variants, GeneLayout, LayoutMode, LayoutProblem};
use crate::optimizer::spea2::{spea2_run, Spea2Options};
use crate::optimizer::{GaParams, LayoutDelta, ObjectiveVector};
use crate::scene::Room;
use crate::scene_graph::DEFAULT_PENALTY_BASE;
use crate::spaces::SpaceKind;

/// Configuration of a Pareto-front run.
#[derive(Debug, Clone)]
pub struct ParetoOptions {
    /// Penalty per collision violation during the search.
    pub penalty_base: f64,
    /// Parameters for the seeding alignment; `None` reuses the run params.
    pub align_params: Option<GaParams>,
}

impl Default for ParetoOptions {
    fn default() -> Self {
        ParetoOptions {
            penalty_base: DEFAULT_PENALTY_BASE,
            align_params: None,
        }
    }
}

impl ParetoOptions {
    fn validate(&self) -> Result<()> {
        if !(self.penalty_base.is_finite() && self.penalty_base > 0.0) {
            return Err(Error::Params(format!(
                "penalty base must be positive, got {}",
                self.penalty_base
            )));
        }
        if let Some(p) = &self.align_params {
            p.validate()?;
        }
        Ok(())
    }
}

/// One collision-free layout on the area/effort front.
#[derive(Debug, Clone)]
pub struct ParetoPoint {
    pub objectives: ObjectiveVector,
    /// One pose per room, index 0 identity.
    pub poses: Vec<Pose2D>,
    pub delta: LayoutDelta,
}

/// Non-dominated area/effort trade-offs, sorted by ascending effort.
#[derive(Debug, Clone)]
pub struct ParetoFront {
    pub members: Vec<ParetoPoint>,
    pub kind: SpaceKind,
    pub seed: u64,
    pub generations_run: usize,
    pub evaluations: u64,
}

impl ParetoFront {
    /// Error if any member dominates another or carries a penalty.
    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.members.iter().enumerate() {
            if a.objectives.penalty != 0.0 {
                return Err(Error::Params(format!(
                    "front member {i} carries penalty {}",
                    a.objectives.penalty
                )));
            }
            for (j, b) in self.members.iter().enumerate() {
                if i != j && a.objectives.dominates(&b.objectives) {
                    return Err(Error::Params(format!(
                        "front member {i} dominates member {j}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The member with the largest mutual area, if any.
    pub fn best_area(&self) -> Option<&ParetoPoint> {
        self.members.iter().max_by(|a, b| {
            a.objectives
                .mutual_area
                .total_cmp(&b.objectives.mutual_area)
        })
    }

    /// The zero-effort member, if any.
    pub fn zero_effort(&self) -> Option<&ParetoPoint> {
        self.members
            .iter()
            .find(|p| p.objectives.total_effort == 0.0)
    }
}

/// Drop dominated points, sort by ascending effort, and collapse exact
/// duplicates.
fn settle_front(mut points: Vec<ParetoPoint>) -> Vec<ParetoPoint> {
    let keep: Vec<bool> = points
        .iter()
        .map(|p| !points.iter().any(|q| q.objectives.dominates(&p.objectives)))
        .collect();
    let mut iter = keep.iter();
    points.retain(|_| *iter.next().unwrap());
    points.sort_by(|a, b| {
        a.objectives
            .total_effort
            .total_cmp(&b.objectives.total_effort)
            .then(
                a.objectives
                    .mutual_area
                    .total_cmp(&b.objectives.mutual_area),
            )
    });
    points.dedup_by(|a, b| {
        a.objectives.mutual_area == b.objectives.mutual_area
            && a.objectives.total_effort == b.objectives.total_effort
    });
    points
}

/// Compute the Pareto front of mutual area against rearrangement effort.
///
/// Room poses and furniture translations evolve together; the best
/// pure-alignment layout is injected as the guaranteed zero-effort anchor.
/// Deterministic for a fixed seed.
pub fn optimize_pareto(
    rooms: &[Room],
    kind: SpaceKind,
    resolution: f64,
    params: &GaParams,
    options: &ParetoOptions,
    seed: u64,
) -> Result<ParetoFront> {
    params.validate()?;
    options.validate()?;
    if rooms.len() < 2 {
        return Err(Error::Params(format!(
            "a Pareto run needs at least 2 rooms, got {}",
            rooms.len()
        )));
    }
    let evaluator = SpaceEvaluator::new(rooms, kind, resolution)?;
    let align = align_with_evaluator(
        &evaluator,
        options.align_params.as_ref().unwrap_or(params),
        seed,
    )?;
    let anchor = ParetoPoint {
        objectives: ObjectiveVector {
            mutual_area: align.area,
            total_effort: 0.0,
            penalty: 0.0,
        },
        poses: align.poses.clone(),
        delta: LayoutDelta::zero(),
    };

    let layout = GeneLayout::new(&evaluator)?;
    if layout.delta_genes.is_empty() {
        return Ok(ParetoFront {
            members: vec![anchor],
            kind,
            seed,
            generations_run: align.generations_run,
            evaluations: align.evaluations,
        });
    }

    let problem = LayoutProblem {
        evaluator: &evaluator,
        layout: &layout,
        penalty_base: options.penalty_base,
        mode: LayoutMode::Biobjective,
    };
    let anchor_genes = layout.encode_poses(&align.poses);
    let seeds = seeded_variants(
        &layout,
        &anchor_genes,
        params.population / 2,
        seed.wrapping_mul(0x9e3779b97f4a7c15),
    );
    let ga_options = Spea2Options {
        initial_seeds: &seeds,
        reinject: std::slice::from_ref(&anchor_genes),
    };
    let outcome = spea2_run(&problem, params, seed.wrapping_add(1), &ga_options)?;

    let mut points: Vec<ParetoPoint> = outcome
        .nondominated
        .iter()
        .filter_map(|ind| {
            let (objectives, poses, delta) = problem.score(&ind.genes);
            (objectives.penalty == 0.0).then_some(ParetoPoint {
                objectives,
                poses,
                delta,
            })
        })
        .collect();
    points.push(anchor);
    Ok(ParetoFront {
        members: settle_front(points),
        kind,
        seed,
        generations_run: outcome.generations_run,
        evaluations: align.evaluations + outcome.evaluations,
    })
}
