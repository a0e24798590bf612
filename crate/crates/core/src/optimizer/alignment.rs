//! Mutual-area evaluation and evolutionary room alignment.
//!
//! Rooms are aligned by rigid-body motions: room 0 anchors the shared frame
//! (its pose is the identity and carries no genes) and every other room gets
//! three genes (tx, ty, theta). The search maximizes the area of the
//! intersection of all transformed functional spaces.

use crate::error::{Error, Result};
use crate::geometry::{OccupancyGrid, Pose2D};
use crate::optimizer::evaluator::{mutual_area_of_grids, mutual_region_of_grids, SpaceEvaluator};
use crate::optimizer::spea2::{spea2_run, Problem, Spea2Options};
use crate::optimizer::GaParams;
use crate::scene::Room;
use crate::spaces::{FunctionalSpace, SpaceKind};

use std::f64::consts::PI;

/// Mutual shared area of functional spaces under per-space rigid motions.
///
/// Takes one pose per space; the first space is the evaluation domain, so
/// the result is sampled on its raster. Composing every pose with one common
/// rigid motion leaves the result unchanged up to raster tolerance (the
/// mutual region is defined only up to a global frame).
pub fn mutual_area(spaces: &[FunctionalSpace], poses: &[Pose2D]) -> Result<f64> {
    if spaces.is_empty() {
        return Err(Error::Params(
            "mutual area of zero spaces is undefined".into(),
        ));
    }
    if spaces.len() != poses.len() {
        return Err(Error::Params(format!(
            "{} spaces but {} poses; supply one pose per space",
            spaces.len(),
            poses.len()
        )));
    }
    let grids: Vec<&OccupancyGrid> = spaces.iter().map(|s| &s.region).collect();
    Ok(mutual_area_of_grids(&grids, poses))
}

/// The mutual region as a raster in the first space's room frame.
pub fn mutual_region(spaces: &[FunctionalSpace], poses: &[Pose2D]) -> Result<OccupancyGrid> {
    if spaces.is_empty() {
        return Err(Error::Params(
            "mutual region of zero spaces is undefined".into(),
        ));
    }
    if spaces.len() != poses.len() {
        return Err(Error::Params(format!(
            "{} spaces but {} poses; supply one pose per space",
            spaces.len(),
            poses.len()
        )));
    }
    let grids: Vec<&OccupancyGrid> = spaces.iter().map(|s| &s.region).collect();
    Ok(mutual_region_of_grids(&grids, poses))
}

/// Outcome of an alignment search.
#[derive(Debug, Clone)]
pub struct AlignmentResult {
    /// One pose per room; index 0 is always the identity.
    pub poses: Vec<Pose2D>,
    /// Mutual region raster in room 0's frame.
    pub region: OccupancyGrid,
    /// Mutual area in square meters.
    pub area: f64,
    pub kind: SpaceKind,
    pub seed: u64,
    /// Best mutual area seen up to each generation (nondecreasing).
    pub k_trace: Vec<f64>,
    pub generations_run: usize,
    pub evaluations: u64,
}

/// Decode pose genes (three per non-reference room) into a full pose list.
pub(crate) fn decode_poses(genes: &[f64], room_count: usize) -> Vec<Pose2D> {
    let mut poses = Vec::with_capacity(room_count);
    poses.push(Pose2D::identity());
    for i in 0..room_count - 1 {
        poses.push(Pose2D::new(
            genes[3 * i],
            genes[3 * i + 1],
            genes[3 * i + 2],
        ));
    }
    poses
}

/// Gene bounds for the pose block: translations within the sum of the two
/// rooms' bounding-box diagonals (any overlapping pose lies inside), rotation
/// spanning the full circle.
pub(crate) fn pose_gene_bounds(evaluator: &SpaceEvaluator) -> Vec<(f64, f64)> {
    let mut bounds = Vec::with_capacity(3 * (evaluator.room_count() - 1));
    let ref_diag = evaluator.room_diag(0);
    for i in 1..evaluator.room_count() {
        let reach = ref_diag + evaluator.room_diag(i);
        bounds.push((-reach, reach));
        bounds.push((-reach, reach));
        bounds.push((-PI, PI));
    }
    bounds
}

struct AlignProblem<'a> {
    evaluator: &'a SpaceEvaluator,
    bounds: Vec<(f64, f64)>,
    /// World coordinates of the reference space's occupied cell centers.
    ref_cells: Vec<(f64, f64)>,
    resolution: f64,
}

impl AlignProblem<'_> {
    fn area_for(&self, poses: &[Pose2D]) -> f64 {
        let rooms = self.evaluator.room_count();
        let inverses: Vec<Pose2D> = poses[1..].iter().map(Pose2D::inverse).collect();
        let mut count = 0usize;
        'cell: for &p in &self.ref_cells {
            for i in 1..rooms {
                let q = inverses[i - 1].apply(p);
                if !self.evaluator.base_grid(i).contains_world(q) {
                    continue 'cell;
                }
            }
            count += 1;
        }
        // Same multiplication order as OccupancyGrid::area, so the fitness
        // trace and raster areas agree to the last bit.
        count as f64 * self.resolution * self.resolution
    }
}

impl Problem for AlignProblem<'_> {
    fn n_genes(&self) -> usize {
        self.bounds.len()
    }
    fn n_objectives(&self) -> usize {
        1
    }
    fn bounds(&self, gene: usize) -> (f64, f64) {
        self.bounds[gene]
    }
    fn evaluate(&self, genes: &[f64]) -> Vec<f64> {
        let poses = decode_poses(genes, self.evaluator.room_count());
        vec![-self.area_for(&poses)]
    }
}

/// Find per-room rigid motions maximizing the mutual functional space.
///
/// Seeds the population with the identity alignment (so the result can never
/// be worse than leaving all rooms in place) and with center-aligned poses at
/// eight rotations to cover the rotational modes. Deterministic for a fixed
/// seed.
pub fn align_rooms(
    rooms: &[Room],
    kind: SpaceKind,
    resolution: f64,
    params: &GaParams,
    seed: u64,
) -> Result<AlignmentResult> {
    params.validate()?;
    if rooms.len() < 2 {
        return Err(Error::Params(format!(
            "alignment needs at least 2 rooms, got {}",
            rooms.len()
        )));
    }
    let evaluator = SpaceEvaluator::new(rooms, kind, resolution)?;
    align_with_evaluator(&evaluator, params, seed)
}

/// Alignment over a prebuilt evaluator (shared with the other searches).
pub(crate) fn align_with_evaluator(
    evaluator: &SpaceEvaluator,
    params: &GaParams,
    seed: u64,
) -> Result<AlignmentResult> {
    let reference = evaluator.base_grid(0);
    let ref_cells: Vec<(f64, f64)> = reference
        .iter_true()
        .map(|(ix, iy)| reference.cell_center(ix, iy))
        .collect();
    let problem = AlignProblem {
        evaluator,
        bounds: pose_gene_bounds(evaluator),
        ref_cells,
        resolution: reference.resolution,
    };
    // The identity plus center-aligned poses at eight rotations: the area
    // landscape is multimodal in theta, and dropping one seed into each
    // rotation basin lets the search refine them all instead of hoping
    // mutation jumps across.
    let centers: Vec<(f64, f64)> = (0..evaluator.room_count())
        .map(|i| {
            let g = evaluator.base_grid(i);
            (
                g.origin.0 + g.width as f64 * g.resolution / 2.0,
                g.origin.1 + g.height as f64 * g.resolution / 2.0,
            )
        })
        .collect();
    let mut seeds: Vec<Vec<f64>> = vec![vec![0.0; problem.n_genes()]];
    for j in 0..8 {
        let theta = -PI + j as f64 * (PI / 4.0);
        let (s, c) = theta.sin_cos();
        let mut genes = Vec::with_capacity(problem.n_genes());
        for &(cx, cy) in &centers[1..] {
            genes.push(centers[0].0 - (c * cx - s * cy));
            genes.push(centers[0].1 - (s * cx + c * cy));
            genes.push(theta);
        }
        seeds.push(genes);
    }
    let options = Spea2Options {
        initial_seeds: &seeds,
        reinject: &[],
    };
    let outcome = spea2_run(&problem, params, seed, &options)?;
    let best = outcome
        .archive
        .iter()
        .min_by(|a, b| a.objectives[0].total_cmp(&b.objectives[0]))
        .expect("archive is never empty");

    let poses = decode_poses(&best.genes, evaluator.room_count());
    let grids: Vec<&OccupancyGrid> = (0..evaluator.room_count())
        .map(|i| evaluator.base_grid(i))
        .collect();
    let region = mutual_region_of_grids(&grids, &poses);
    let area = region.area();
    let mut best_so_far = f64::NEG_INFINITY;
    let k_trace = outcome
        .minima_trace
        .iter()
        .map(|minima| {
            best_so_far = best_so_far.max(-minima[0]);
            best_so_far
        })
        .collect();
    Ok(AlignmentResult {
        poses,
        region,
        area,
        kind: evaluator.kind,
        seed,
        k_trace,
        generations_run: outcome.generations_run,
        evaluations: outcome.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::load_scene;
    use crate::spaces::standable_space;
    use std::path::Path;

    const RES: f64 = 0.05;

    fn fixture(name: &str) -> crate::scene::Scene {
        let path = Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/fixtures")
            .join(name);
        load_scene(&path).expect("fixture loads")
    }

    fn quick_params() -> GaParams {
        GaParams {
            population: 40,
            generations: 60,
            stagnation_window: 20,
            ..GaParams::default_align()
        }
    }

    #[test]
    fn single_space_mutual_area_is_its_own_area() {
        let scene = fixture("empty_room.json");
        let s = standable_space(&scene.rooms[0], RES, None).unwrap();
        let k = mutual_area(std::slice::from_ref(&s), &[Pose2D::identity()]).unwrap();
        assert!((k - s.area()).abs() < 1e-9);
    }

    #[test]
    fn identical_rooms_under_identity_share_everything() {
        let scene = fixture("two_identical_rooms.json");
        let spaces: Vec<_> = scene
            .rooms
            .iter()
            .map(|r| standable_space(r, RES, None).unwrap())
            .collect();
        let k = mutual_area(&spaces, &[Pose2D::identity(), Pose2D::identity()]).unwrap();
        let expected = spaces[0].area();
        assert!(
            (k - expected).abs() <= 0.02 * expected,
            "K {k} vs area {expected}"
        );
    }

    #[test]
    fn translated_disjoint_squares_need_the_offset_pose() {
        // Two 2x2 free rooms whose floor polygons sit 2 m apart in world
        // coordinates; the pose must cancel the offset to overlap them.
        let json = r#"{
          "rooms": [
            {"id": "a", "boundary": [[0,0],[2,0],[2,2],[0,2]], "objects": []},
            {"id": "b", "boundary": [[2,0],[4,0],[4,2],[2,2]], "objects": []}
          ]
        }"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("offset.json");
        std::fs::write(&path, json).unwrap();
        let scene = load_scene(&path).unwrap();
        let spaces: Vec<_> = scene
            .rooms
            .iter()
            .map(|r| standable_space(r, RES, None).unwrap())
            .collect();

        let idk = mutual_area(&spaces, &[Pose2D::identity(), Pose2D::identity()]).unwrap();
        assert_eq!(idk, 0.0, "identity poses must not overlap disjoint rooms");
        // Carrying b's frame 2 m left lands its floor exactly on a's.
        let k = mutual_area(&spaces, &[Pose2D::identity(), Pose2D::new(-2.0, 0.0, 0.0)]).unwrap();
        assert!((k - 4.0).abs() <= 0.1, "offset pose K {k}");
    }

    #[test]
    fn mutual_area_never_exceeds_the_smallest_space() {
        let scene = fixture("three_room_gain.json");
        let spaces: Vec<_> = scene
            .rooms
            .iter()
            .map(|r| standable_space(r, RES, None).unwrap())
            .collect();
        let min_area = spaces
            .iter()
            .map(|s| s.area())
            .fold(f64::INFINITY, f64::min);
        for seed in 0..20u64 {
            use rand::prelude::*;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let poses: Vec<Pose2D> = (0..spaces.len())
                .map(|_| {
                    Pose2D::new(
                        rng.gen_range(-3.0..3.0),
                        rng.gen_range(-3.0..3.0),
                        rng.gen_range(-PI..PI),
                    )
                })
                .collect();
            let k = mutual_area(&spaces, &poses).unwrap();
            assert!(k <= min_area + 1e-9, "K {k} exceeds min space {min_area}");
        }
    }

    #[test]
    fn gauge_motion_leaves_mutual_area_nearly_unchanged() {
        let scene = fixture("two_identical_rooms.json");
        let spaces: Vec<_> = scene
            .rooms
            .iter()
            .map(|r| standable_space(r, RES, None).unwrap())
            .collect();
        let poses = vec![Pose2D::identity(), Pose2D::new(0.4, -0.2, 0.3)];
        let k = mutual_area(&spaces, &poses).unwrap();
        let g = Pose2D::new(-1.3, 2.2, 0.8);
        let moved: Vec<Pose2D> = poses.iter().map(|p| g.compose(p)).collect();
        let k_moved = mutual_area(&spaces, &moved).unwrap();
        assert!(
            (k - k_moved).abs() <= 0.02 * k.max(1e-9),
            "gauge shift changed K: {k} -> {k_moved}"
        );
    }

    #[test]
    fn self_alignment_recovers_nearly_all_of_the_space() {
        let scene = fixture("two_identical_rooms.json");
        let full = standable_space(&scene.rooms[0], RES, None).unwrap().area();
        let result =
            align_rooms(&scene.rooms, SpaceKind::Standable, RES, &quick_params(), 42).unwrap();
        assert!(
            result.area >= 0.95 * full,
            "self-alignment found {} of {full}",
            result.area
        );
        assert_eq!(result.poses.len(), 2);
        assert!(result.poses[0].is_identity(0.0));
        assert_eq!(result.k_trace.len(), result.generations_run);
        assert!(
            result.k_trace.windows(2).all(|w| w[1] >= w[0]),
            "best-so-far trace must be nondecreasing"
        );
        assert!(result.k_trace.last().unwrap() >= &(0.95 * full));
    }

    #[test]
    fn small_room_bounds_the_mutual_space() {
        // 2x2 free room against a 6x6 free room: K caps at the small room.
        let json = r#"{
          "rooms": [
            {"id": "small", "boundary": [[0,0],[2,0],[2,2],[0,2]], "objects": []},
            {"id": "large", "boundary": [[0,0],[6,0],[6,6],[0,6]], "objects": []}
          ]
        }"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sizes.json");
        std::fs::write(&path, json).unwrap();
        let scene = load_scene(&path).unwrap();
        let result =
            align_rooms(&scene.rooms, SpaceKind::Standable, RES, &quick_params(), 7).unwrap();
        assert!(
            (result.area - 4.0).abs() <= 0.1,
            "small room should dominate: K {}",
            result.area
        );
    }

    #[test]
    fn alignment_is_deterministic_per_seed() {
        let scene = fixture("two_identical_rooms.json");
        let a = align_rooms(&scene.rooms, SpaceKind::Standable, RES, &quick_params(), 5).unwrap();
        let b = align_rooms(&scene.rooms, SpaceKind::Standable, RES, &quick_params(), 5).unwrap();
        assert_eq!(a.area, b.area);
        assert_eq!(a.poses, b.poses);
        assert_eq!(a.generations_run, b.generations_run);
    }

    #[test]
    fn alignment_rejects_degenerate_inputs() {
        let scene = fixture("empty_room.json");
        assert!(align_rooms(&scene.rooms, SpaceKind::Standable, RES, &quick_params(), 0).is_err());
        let two = fixture("two_identical_rooms.json");
        let mut bad = quick_params();
        bad.population = 1;
        assert!(align_rooms(&two.rooms, SpaceKind::Standable, RES, &bad, 0).is_err());
    }
}
