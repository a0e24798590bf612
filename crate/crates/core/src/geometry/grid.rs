use super::{OrientedRect, Pose2D, SimplePolygon};
use crate::error::{Error, Result};

/// A boolean occupancy raster over an axis-aligned frame.
///
/// Cell `(ix, iy)` covers the square
/// `origin + [ix*res, (ix+1)*res] x [iy*res, (iy+1)*res]`; its membership in
/// a continuous region is decided by the cell center. Points outside the grid
/// bounds are always unoccupied.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub origin: (f64, f64),
    pub resolution: f64,
    pub width: usize,
    pub height: usize,
    pub cells: Vec<bool>,
}

/// Relative slack for "within radius" comparisons. Disc predicates are
/// boundary-inclusive, and fixtures routinely produce distances that tie the
/// radius exactly (e.g. radius 0.25 on a 0.05 grid); the slack keeps those
/// ties on the inclusive side despite floating-point division error.
const RADIUS_REL_EPS: f64 = 1e-9;

#[inline]
fn within_radius_sq(dist_sq: f64, radius_sq: f64) -> bool {
    dist_sq <= radius_sq * (1.0 + RADIUS_REL_EPS) + 1e-12
}

impl OccupancyGrid {
    pub fn new(origin: (f64, f64), resolution: f64, width: usize, height: usize) -> Self {
        OccupancyGrid {
            origin,
            resolution,
            width,
            height,
            cells: vec![false; width * height],
        }
    }

    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.width + ix
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.cells[self.idx(ix, iy)]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, iy: usize, value: bool) {
        let i = self.idx(ix, iy);
        self.cells[i] = value;
    }

    #[inline]
    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.origin.0 + (ix as f64 + 0.5) * self.resolution,
            self.origin.1 + (iy as f64 + 0.5) * self.resolution,
        )
    }

    /// Cell indices covering a world point, or `None` outside the bounds.
    #[inline]
    pub fn world_to_cell(&self, p: (f64, f64)) -> Option<(usize, usize)> {
        let fx = (p.0 - self.origin.0) / self.resolution;
        let fy = (p.1 - self.origin.1) / self.resolution;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (ix, iy) = (fx as usize, fy as usize);
        if ix < self.width && iy < self.height {
            Some((ix, iy))
        } else {
            None
        }
    }

    /// Occupancy at a world point (false outside the bounds).
    #[inline]
    pub fn contains_world(&self, p: (f64, f64)) -> bool {
        match self.world_to_cell(p) {
            Some((ix, iy)) => self.get(ix, iy),
            None => false,
        }
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Area represented by the occupied cells: `count * resolution^2`.
    pub fn area(&self) -> f64 {
        self.count() as f64 * self.resolution * self.resolution
    }

    pub fn iter_true(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height)
            .flat_map(move |iy| (0..self.width).map(move |ix| (ix, iy)))
            .filter(move |&(ix, iy)| self.get(ix, iy))
    }

    /// Whether the two grids share origin, resolution, and dimensions.
    pub fn same_frame(&self, other: &OccupancyGrid) -> bool {
        self.width == other.width
            && self.height == other.height
            && (self.origin.0 - other.origin.0).abs() < 1e-9
            && (self.origin.1 - other.origin.1).abs() < 1e-9
            && (self.resolution - other.resolution).abs() < 1e-12
    }

    /// In-place union with a grid over the same frame.
    pub fn union_in_place(&mut self, other: &OccupancyGrid) -> Result<()> {
        if !self.same_frame(other) {
            return Err(Error::Geometry(
                "cannot union grids over different frames".into(),
            ));
        }
        for (dst, src) in self.cells.iter_mut().zip(&other.cells) {
            *dst |= *src;
        }
        Ok(())
    }

    /// Whether every occupied cell of `self` is occupied in `other`
    /// (same frame required).
    pub fn is_subset_of(&self, other: &OccupancyGrid) -> bool {
        self.same_frame(other) && self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b)
    }
}

/// Rasterize a polygon minus a set of solid rectangular obstacles.
///
/// The grid covers the polygon's bounding box; a cell is occupied iff its
/// center lies inside the polygon and inside no obstacle.
pub fn rasterize(
    polygon: &SimplePolygon,
    obstacles: &[OrientedRect],
    resolution: f64,
) -> Result<OccupancyGrid> {
    let mut grid = polygon_mask(polygon, resolution)?;
    for rect in obstacles {
        clear_rect_cells(&mut grid, rect);
    }
    Ok(grid)
}

/// Rasterize just the polygon interior.
pub(crate) fn polygon_mask(polygon: &SimplePolygon, resolution: f64) -> Result<OccupancyGrid> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::Geometry(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    let (lo, hi) = polygon.bbox();
    let width = (((hi.0 - lo.0) / resolution) - 1e-9).ceil().max(1.0) as usize;
    let height = (((hi.1 - lo.1) / resolution) - 1e-9).ceil().max(1.0) as usize;
    let mut grid = OccupancyGrid::new(lo, resolution, width, height);
    for iy in 0..height {
        for ix in 0..width {
            if polygon.contains(grid.cell_center(ix, iy)) {
                grid.set(ix, iy, true);
            }
        }
    }
    Ok(grid)
}

/// Clear every cell whose center lies inside the rectangle.
pub(crate) fn clear_rect_cells(grid: &mut OccupancyGrid, rect: &OrientedRect) {
    let ((min_x, min_y), (max_x, max_y)) = rect.bbox();
    let res = grid.resolution;
    let x0 = (((min_x - grid.origin.0) / res).floor().max(0.0)) as usize;
    let y0 = (((min_y - grid.origin.1) / res).floor().max(0.0)) as usize;
    let x1 = ((((max_x - grid.origin.0) / res).ceil()) as usize).min(grid.width);
    let y1 = ((((max_y - grid.origin.1) / res).ceil()) as usize).min(grid.height);
    for iy in y0..y1 {
        for ix in x0..x1 {
            if rect.contains(grid.cell_center(ix, iy)) {
                grid.set(ix, iy, false);
            }
        }
    }
}

/// Morphological erosion by a Euclidean disc of the given radius (meters).
///
/// A cell survives iff it is occupied and no unoccupied cell center — cells
/// beyond the grid bounds included — lies within `radius` of its center. The
/// "within" is boundary-inclusive: a free cell at exactly `radius` removes
/// the cell. `erode(g, 0.0)` returns `g` unchanged.
pub fn erode(grid: &OccupancyGrid, radius: f64) -> OccupancyGrid {
    assert!(
        radius >= 0.0 && radius.is_finite(),
        "erosion radius must be non-negative"
    );
    let mut out = grid.clone();
    if grid.width == 0 || grid.height == 0 {
        return out;
    }
    // Squared distance (in cell units) from each cell to the nearest free
    // cell, with a one-cell free ring standing in for everything out of
    // bounds. On this integer lattice the exact transform yields exact
    // integer-valued squared distances.
    let dist_sq = distance_sq_to_seeds(grid, |occupied| !occupied, true);
    let r_cells = radius / grid.resolution;
    let r_sq = r_cells * r_cells;
    for (i, cell) in out.cells.iter_mut().enumerate() {
        *cell = grid.cells[i] && !within_radius_sq(dist_sq[i], r_sq);
    }
    out
}

/// Whether any occupied cell center lies within `radius` of `point`
/// (boundary-inclusive). An empty grid yields `false` for every query.
pub fn dilate_test(grid: &OccupancyGrid, point: (f64, f64), radius: f64) -> bool {
    assert!(
        radius >= 0.0 && radius.is_finite(),
        "dilation radius must be non-negative"
    );
    let res = grid.resolution;
    let x0 = (((point.0 - radius - grid.origin.0) / res).floor().max(0.0)) as usize;
    let y0 = (((point.1 - radius - grid.origin.1) / res).floor().max(0.0)) as usize;
    let x1 = ((((point.0 + radius - grid.origin.0) / res).ceil() + 1.0) as usize).min(grid.width);
    let y1 = ((((point.1 + radius - grid.origin.1) / res).ceil() + 1.0) as usize).min(grid.height);
    let r_sq = radius * radius;
    for iy in y0..y1 {
        for ix in x0..x1 {
            if grid.get(ix, iy) {
                let c = grid.cell_center(ix, iy);
                let d_sq = (c.0 - point.0).powi(2) + (c.1 - point.1).powi(2);
                if within_radius_sq(d_sq, r_sq) {
                    return true;
                }
            }
        }
    }
    false
}

/// Membership of `point` in the grid region transformed by `pose`:
/// equivalent to looking up the inverse-transformed point in the original.
pub fn transformed_membership(grid: &OccupancyGrid, pose: &Pose2D, point: (f64, f64)) -> bool {
    grid.contains_world(pose.inverse().apply(point))
}

/// Exact squared Euclidean distance (cell units) from every cell to the
/// nearest seed cell, by the two-pass lower-envelope transform. `seed` maps a
/// cell's occupancy to whether it is a seed; `border_is_seed` adds a virtual
/// one-cell seed ring just outside the bounds.
pub(crate) fn distance_sq_to_seeds(
    grid: &OccupancyGrid,
    seed: impl Fn(bool) -> bool,
    border_is_seed: bool,
) -> Vec<f64> {
    let (w, h) = (grid.width, grid.height);
    // Pad by one cell on each side so the ring can carry the border seeds.
    let (pw, ph) = (w + 2, h + 2);
    let border = if border_is_seed { 0.0 } else { f64::INFINITY };
    let mut field = vec![border; pw * ph];
    for iy in 0..h {
        for ix in 0..w {
            field[(iy + 1) * pw + (ix + 1)] = if seed(grid.get(ix, iy)) {
                0.0
            } else {
                f64::INFINITY
            };
        }
    }

    let mut scratch_f = vec![0.0f64; pw.max(ph)];
    let mut scratch_d = vec![0.0f64; pw.max(ph)];
    let mut scratch_v = vec![0usize; pw.max(ph)];
    let mut scratch_z = vec![0.0f64; pw.max(ph) + 1];

    // Columns, then rows.
    for x in 0..pw {
        for y in 0..ph {
            scratch_f[y] = field[y * pw + x];
        }
        dt_1d(
            &scratch_f[..ph],
            &mut scratch_d,
            &mut scratch_v,
            &mut scratch_z,
        );
        for y in 0..ph {
            field[y * pw + x] = scratch_d[y];
        }
    }
    for y in 0..ph {
        scratch_f[..pw].copy_from_slice(&field[y * pw..(y + 1) * pw]);
        dt_1d(
            &scratch_f[..pw],
            &mut scratch_d,
            &mut scratch_v,
            &mut scratch_z,
        );
        field[y * pw..(y + 1) * pw].copy_from_slice(&scratch_d[..pw]);
    }

    let mut out = vec![0.0f64; w * h];
    for iy in 0..h {
        for ix in 0..w {
            out[iy * w + ix] = field[(iy + 1) * pw + (ix + 1)];
        }
    }
    out
}

/// One-dimensional squared-distance transform (lower envelope of parabolas).
fn dt_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        if f[q] == f64::INFINITY {
            continue;
        }
        loop {
            let p = v[k];
            let s = if f[p] == f64::INFINITY {
                // The previous parabola is absent; q's parabola wins everywhere left.
                f64::NEG_INFINITY
            } else {
                ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
            };
            if s <= z[k] {
                if k == 0 {
                    // Replace the lone parabola.
                    v[0] = q;
                    z[0] = f64::NEG_INFINITY;
                    z[1] = f64::INFINITY;
                    break;
                }
                k -= 1;
                continue;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    let mut k = 0usize;
    for (q, slot) in d.iter_mut().enumerate().take(n) {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        *slot = if f[p] == f64::INFINITY {
            f64::INFINITY
        } else {
            let diff = q as f64 - p as f64;
            diff * diff + f[p]
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect_grid(w_m: f64, d_m: f64, res: f64) -> OccupancyGrid {
        let poly = SimplePolygon::rectangle((0.0, 0.0), (w_m, d_m)).unwrap();
        rasterize(&poly, &[], res).unwrap()
    }

    /// Brute-force reference erosion: scan the full disc around each cell.
    fn erode_brute(grid: &OccupancyGrid, radius: f64) -> OccupancyGrid {
        let mut out = grid.clone();
        let r_cells = (radius / grid.resolution).ceil() as i64 + 1;
        let r_sq = (radius / grid.resolution).powi(2);
        for iy in 0..grid.height as i64 {
            for ix in 0..grid.width as i64 {
                if !grid.get(ix as usize, iy as usize) {
                    out.set(ix as usize, iy as usize, false);
                    continue;
                }
                let mut keep = true;
                'scan: for dy in -r_cells..=r_cells {
                    for dx in -r_cells..=r_cells {
                        let d_sq = (dx * dx + dy * dy) as f64;
                        if !within_radius_sq(d_sq, r_sq) {
                            continue;
                        }
                        let (jx, jy) = (ix + dx, iy + dy);
                        let free = jx < 0
                            || jy < 0
                            || jx >= grid.width as i64
                            || jy >= grid.height as i64
                            || !grid.get(jx as usize, jy as usize);
                        if free {
                            keep = false;
                            break 'scan;
                        }
                    }
                }
                out.set(ix as usize, iy as usize, keep);
            }
        }
        out
    }

    #[test]
    fn area_is_count_times_cell_area() {
        let g = rect_grid(2.0, 1.0, 0.05);
        assert_eq!(g.count(), 40 * 20);
        assert!((g.area() - g.count() as f64 * 0.0025).abs() < 1e-12);
        assert!((g.area() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rasterize_l_shaped_room() {
        // 4x4 square with a 1x2 notch removed at the top right: area 14.
        let poly = SimplePolygon::new(vec![
            (0.0, 0.0),
            (4.0, 0.0),
            (4.0, 2.0),
            (3.0, 2.0),
            (3.0, 4.0),
            (0.0, 4.0),
        ])
        .unwrap();
        let g = rasterize(&poly, &[], 0.05).unwrap();
        assert!((g.area() - 14.0).abs() <= 0.28);
        // Grid-aligned edges make the rasterization exact here.
        assert!((g.area() - 14.0).abs() < 1e-9);
    }

    #[test]
    fn rasterize_subtracts_obstacles() {
        let poly = SimplePolygon::rectangle((0.0, 0.0), (4.0, 4.0)).unwrap();
        let table = OrientedRect::new(2.0, 2.0, 2.0, 1.0, 0.0).unwrap();
        let g = rasterize(&poly, &[table], 0.05).unwrap();
        assert!((g.area() - 14.0).abs() < 1e-9);
    }

    #[test]
    fn erosion_of_rectangle_keeps_inclusive_ties_out() {
        // 2x1 solid rectangle eroded by 0.25 at 0.05 resolution. Cell centers
        // tie the radius exactly, and inclusive handling removes them,
        // leaving the continuous 1.5 x 0.5 = 0.75 interior.
        let g = rect_grid(2.0, 1.0, 0.05);
        let e = erode(&g, 0.25);
        assert_eq!(e.count(), 30 * 10);
        assert!((e.area() - 0.75).abs() <= 0.05);
    }

    #[test]
    fn erosion_to_empty() {
        // Radius beyond the half-depth clears everything.
        let g = rect_grid(2.0, 1.0, 0.05);
        let e = erode(&g, 0.7);
        assert_eq!(e.count(), 0);
    }

    #[test]
    fn erosion_by_zero_is_identity() {
        let g = rect_grid(1.0, 1.0, 0.1);
        assert_eq!(erode(&g, 0.0), g);
    }

    #[test]
    fn erosion_matches_brute_force_on_random_grids() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for case in 0..40 {
            let mut g = OccupancyGrid::new((0.0, 0.0), 0.05, 24, 18);
            for c in g.cells.iter_mut() {
                *c = rng.gen_bool(0.7);
            }
            let radius = rng.gen_range(0.0..0.4);
            let fast = erode(&g, radius);
            let brute = erode_brute(&g, radius);
            assert_eq!(fast, brute, "case {case} radius {radius}");
        }
    }

    #[test]
    fn erosion_is_monotone_in_radius() {
        let g = rect_grid(3.0, 2.0, 0.05);
        let mut prev = erode(&g, 0.0);
        for step in 1..8 {
            let next = erode(&g, step as f64 * 0.1);
            assert!(next.is_subset_of(&prev), "erosion must shrink with radius");
            prev = next;
        }
    }

    #[test]
    fn dilate_test_examples() {
        let empty = OccupancyGrid::new((0.0, 0.0), 0.05, 10, 10);
        assert!(!dilate_test(&empty, (0.25, 0.25), 5.0));

        let mut g = OccupancyGrid::new((0.0, 0.0), 0.05, 10, 10);
        g.set(5, 5, true); // center (0.275, 0.275)
        let probe = (0.275 + 0.3, 0.275);
        assert!(dilate_test(&g, probe, 0.5));
        assert!(!dilate_test(&g, probe, 0.2));
        // Boundary-inclusive: exactly at the radius counts.
        assert!(dilate_test(&g, probe, 0.3));
    }

    #[test]
    fn transformed_membership_matches_manual_rotation() {
        use rand::{Rng, SeedableRng};
        let poly = SimplePolygon::new(vec![
            (0.0, 0.0),
            (4.0, 0.0),
            (4.0, 2.0),
            (3.0, 2.0),
            (3.0, 4.0),
            (0.0, 4.0),
        ])
        .unwrap();
        let g = rasterize(&poly, &[], 0.05).unwrap();
        let pose = Pose2D::new(0.0, 0.0, std::f64::consts::FRAC_PI_2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            // Rotation by +90 degrees maps (x, y) to (-y, x); its inverse
            // maps the query point (x, y) back to (y, -x).
            let expected = g.contains_world((p.1, -p.0));
            assert_eq!(
                transformed_membership(&g, &pose, p),
                expected,
                "point {p:?}"
            );
        }
    }

    #[test]
    fn out_of_bounds_lookups_are_false() {
        let g = rect_grid(1.0, 1.0, 0.1);
        assert!(!g.contains_world((-0.01, 0.5)));
        assert!(!g.contains_world((0.5, 1.01)));
        assert!(g.contains_world((0.5, 0.5)));
    }
}
