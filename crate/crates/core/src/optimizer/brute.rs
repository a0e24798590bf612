//! Exhaustive grid-search alignment oracle for two-room scenes.
//!
//! Scans a regular lattice of candidate poses (translation x translation x
//! rotation) for room 1 against the fixed room 0 and returns the best pose
//! found. Exponential in nothing but bounded by an evaluation cap, it exists
//! to validate the evolutionary search on small fixtures, not to scale.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Pose2D;
use crate::optimizer::evaluator::{mutual_area_of_grids, SpaceEvaluator};
use crate::scene::Room;
use crate::spaces::SpaceKind;

/// Knobs for the exhaustive search.
#[derive(Debug, Clone, Copy)]
pub struct BruteForceOptions {
    /// Lattice spacing for tx and ty, meters.
    pub translation_step: f64,
    /// Lattice spacing for theta, radians.
    pub rotation_step: f64,
    /// Half-extents of the translation window, meters; `None` derives a
    /// window just large enough that any overlapping pose lies inside it.
    pub bounds: Option<(f64, f64)>,
    /// Hard cap on lattice size; larger searches are refused.
    pub max_evaluations: u64,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions {
            translation_step: 0.1,
            rotation_step: 15.0_f64.to_radians(),
            bounds: None,
            max_evaluations: 1_000_000,
        }
    }
}

/// Exhaustively search poses of room 1 maximizing mutual area with room 0.
///
/// Returns one pose per room (room 0 fixed at identity) and the best area.
/// Ties keep the first pose in scan order (rotation, then ty, then tx), so
/// results are deterministic.
pub fn brute_force_align(
    rooms: &[Room],
    kind: SpaceKind,
    resolution: f64,
    options: &BruteForceOptions,
) -> Result<(Vec<Pose2D>, f64)> {
    if rooms.len() != 2 {
        return Err(Error::Params(format!(
            "the exhaustive oracle handles exactly 2 rooms, got {}",
            rooms.len()
        )));
    }
    let t_step = options.translation_step;
    let r_step = options.rotation_step;
    if !(t_step > 0.0 && t_step.is_finite() && r_step > 0.0 && r_step.is_finite()) {
        return Err(Error::Params(format!(
            "steps must be positive and finite, got {t_step} m / {r_step} rad"
        )));
    }

    let evaluator = SpaceEvaluator::new(rooms, kind, resolution)?;
    let reference = evaluator.base_grid(0);
    let other = evaluator.base_grid(1);

    // Translation window: beyond half the reference extent plus the moving
    // room's bounding-radius, no overlap is possible.
    let (bx, by) = match options.bounds {
        Some(b) => b,
        None => {
            let ref_w = reference.width as f64 * reference.resolution;
            let ref_h = reference.height as f64 * reference.resolution;
            let moving_radius = evaluator.room_diag(1) / 2.0;
            (ref_w / 2.0 + moving_radius, ref_h / 2.0 + moving_radius)
        }
    };
    if !(bx > 0.0 && by > 0.0 && bx.is_finite() && by.is_finite()) {
        return Err(Error::Params(format!(
            "translation bounds must be positive, got ({bx}, {by})"
        )));
    }

    let kx = (bx / t_step).ceil() as i64;
    let ky = (by / t_step).ceil() as i64;
    let rot_count = ((2.0 * PI) / r_step).ceil().max(1.0) as i64;
    let lattice = (2 * kx + 1) as u64 * (2 * ky + 1) as u64 * rot_count as u64;
    if lattice > options.max_evaluations {
        return Err(Error::Budget(format!(
            "lattice of {lattice} poses exceeds the cap of {}; widen the steps \
             or shrink the window",
            options.max_evaluations
        )));
    }

    // The reference frame's world-space center offsets; candidate poses
    // translate relative to the alignment of the two room centers, so the
    // window is symmetric around "centers coincide".
    let ref_center = (
        reference.origin.0 + reference.width as f64 * reference.resolution / 2.0,
        reference.origin.1 + reference.height as f64 * reference.resolution / 2.0,
    );
    let other_center = (
        other.origin.0 + other.width as f64 * other.resolution / 2.0,
        other.origin.1 + other.height as f64 * other.resolution / 2.0,
    );
    let other_radius = evaluator.room_diag(1) / 2.0;
    let (ref_lo, ref_hi) = (
        reference.origin,
        (
            reference.origin.0 + reference.width as f64 * reference.resolution,
            reference.origin.1 + reference.height as f64 * reference.resolution,
        ),
    );

    let mut best_pose = None;
    let mut best_area = f64::NEG_INFINITY;
    for r in 0..rot_count {
        let theta = normalize_step_angle(r as f64 * r_step);
        let (s, c) = theta.sin_cos();
        // Where the moving room's center lands before the lattice offset.
        let rotated_center = (
            c * other_center.0 - s * other_center.1,
            s * other_center.0 + c * other_center.1,
        );
        for jy in -ky..=ky {
            let dy = jy as f64 * t_step;
            for jx in -kx..=kx {
                let dx = jx as f64 * t_step;
                let tx = ref_center.0 + dx - rotated_center.0;
                let ty = ref_center.1 + dy - rotated_center.1;
                // Prune poses whose moving-room disc misses the reference box.
                let cx = rotated_center.0 + tx;
                let cy = rotated_center.1 + ty;
                if cx + other_radius < ref_lo.0
                    || cx - other_radius > ref_hi.0
                    || cy + other_radius < ref_lo.1
                    || cy - other_radius > ref_hi.1
                {
                    continue;
                }
                let pose = Pose2D::new(tx, ty, theta);
                let area = mutual_area_of_grids(&[reference, other], &[Pose2D::identity(), pose]);
                if area > best_area {
                    best_area = area;
                    best_pose = Some(pose);
                }
            }
        }
    }

    let best_pose = best_pose.unwrap_or_else(Pose2D::identity);
    Ok((vec![Pose2D::identity(), best_pose], best_area.max(0.0)))
}

/// Keep lattice angles exact where possible while staying in [-pi, pi).
fn normalize_step_angle(a: f64) -> f64 {
    if a >= PI {
        a - 2.0 * PI
    } else {
        a
    }
}
