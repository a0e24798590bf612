//! Evolutionary search for mutual functional spaces.
//!
//! The submodules cover the whole optimization surface: a reusable SPEA2
//! engine ([`spea2`]), mutual-area evaluation and room alignment
//! ([`alignment`]), an exhaustive grid-search oracle ([`brute`]), stepwise
//! minimal-effort rearrangement ([`rearrange`]), and single-run bi-objective
//! Pareto exploration ([`pareto`]). This module owns the shared vocabulary:
//! GA parameters, objective vectors, layout deltas, and the effort model.

pub mod alignment;
pub mod brute;
pub(crate) mod evaluator;
pub mod pareto;
pub mod rearrange;
pub mod spea2;

pub use alignment::{align_rooms, mutual_area, mutual_region, AlignmentResult};
pub use brute::{brute_force_align, BruteForceOptions};
pub use pareto::{optimize_pareto, ParetoFront, ParetoOptions, ParetoPoint};
pub use rearrange::{rearrange_stepwise, StepOptions, StepSolution};
pub use spea2::{spea2_run, Individual, Problem, Spea2Options, Spea2Outcome};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scene::{FurnitureObject, Room};
use crate::scene_graph::RoomDelta;

/// Default multiplier λ for the per-step area constraint: each square meter
/// of shortfall against the target mutual area costs this many effort units.
pub const DEFAULT_CONSTRAINT_LAMBDA: f64 = 1e4;

/// Parameters of one evolutionary run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaParams {
    /// Population size; the archive is the same size.
    pub population: usize,
    /// Maximum number of generations.
    pub generations: usize,
    /// Probability that a freshly bred individual is mutated at all.
    pub mutation_probability: f64,
    /// Fraction of genes perturbed when a mutation pass applies.
    pub mutation_rate: f64,
    /// Probability that a parent pair is blended rather than copied.
    pub crossover_rate: f64,
    /// Stop early after this many generations without any improvement of the
    /// archive's per-objective minima.
    pub stagnation_window: usize,
}

impl GaParams {
    /// Defaults for room-alignment searches.
    pub fn default_align() -> Self {
        GaParams {
            population: 100,
            generations: 300,
            mutation_probability: 0.10,
            mutation_rate: 0.50,
            crossover_rate: 0.80,
            stagnation_window: 50,
        }
    }

    /// Defaults for rearrangement and Pareto searches.
    pub fn default_rearrange() -> Self {
        GaParams {
            population: 250,
            generations: 500,
            mutation_probability: 0.10,
            mutation_rate: 0.50,
            crossover_rate: 0.80,
            stagnation_window: 50,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::Params(format!(
                "population must be at least 2, got {}",
                self.population
            )));
        }
        if self.generations == 0 {
            return Err(Error::Params("generations must be at least 1".into()));
        }
        if self.stagnation_window == 0 {
            return Err(Error::Params("stagnation window must be at least 1".into()));
        }
        for (name, v) in [
            ("mutation_probability", self.mutation_probability),
            ("mutation_rate", self.mutation_rate),
            ("crossover_rate", self.crossover_rate),
        ] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::Params(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Objective values of one candidate solution.
///
/// `mutual_area` is maximized and `total_effort` minimized; `penalty` counts
/// physical violations (collisions, out-of-room placements) and is kept
/// separate from the effort so reports stay truthful — it is added to the
/// effort only inside fitness computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveVector {
    /// Shared functional area K in square meters.
    pub mutual_area: f64,
    /// Total rearrangement effort E in effort units (weight x meters).
    pub total_effort: f64,
    /// Constraint-violation penalty in effort units; 0 for valid layouts.
    pub penalty: f64,
}

impl ObjectiveVector {
    /// Pareto dominance on (maximize K, minimize E): true iff `self` is at
    /// least as good on both objectives and strictly better on one.
    pub fn dominates(&self, other: &ObjectiveVector) -> bool {
        let ge_area = self.mutual_area >= other.mutual_area;
        let le_effort = self.total_effort <= other.total_effort;
        ge_area
            && le_effort
            && (self.mutual_area > other.mutual_area || self.total_effort < other.total_effort)
    }
}

/// A furniture rearrangement across all rooms: per room, a map from object id
/// to a translation along the object's local axes. Missing entries mean the
/// object stays put.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LayoutDelta {
    pub rooms: BTreeMap<String, RoomDelta>,
}

impl LayoutDelta {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn room(&self, room_id: &str) -> Option<&RoomDelta> {
        self.rooms.get(room_id)
    }

    /// True when every stored translation is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.rooms
            .values()
            .all(|room| room.values().all(|&(du, dv)| du == 0.0 && dv == 0.0))
    }
}

/// Effort to move one object by `translation` meters (local axes): weight
/// times Euclidean distance. Nonzero translations of immovable objects are
/// rejected.
pub fn effort(object: &FurnitureObject, translation: (f64, f64)) -> Result<f64> {
    let norm = (translation.0 * translation.0 + translation.1 * translation.1).sqrt();
    if norm == 0.0 {
        return Ok(0.0);
    }
    if !object.movable {
        return Err(Error::Params(format!(
            "object '{}' is immovable but was asked to move {norm:.3} m",
            object.id
        )));
    }
    Ok(object.unit_weight * norm)
}

/// Total effort of a rearrangement: the sum of every moved object's effort
/// across all rooms. Entries that match no object contribute nothing.
pub fn total_effort(rooms: &[Room], delta: &LayoutDelta) -> f64 {
    let mut sum = 0.0;
    for room in rooms {
        if let Some(room_delta) = delta.room(&room.id) {
            for obj in &room.objects {
                if let Some(&(du, dv)) = room_delta.get(&obj.id) {
                    sum += obj.unit_weight * (du * du + dv * dv).sqrt();
                }
            }
        }
    }
    sum
}
