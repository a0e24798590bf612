use super::CONTACT_EPS;
use crate::error::{Error, Result};

/// A solid rectangle with center `(cx, cy)`, extent `width` along its local
/// x-axis and `depth` along its local y-axis, rotated by `rotation` radians.
///
/// Corners are always recomputed from these five fields; nothing is cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    pub cx: f64,
    pub cy: f64,
    pub width: f64,
    pub depth: f64,
    pub rotation: f64,
}

impl OrientedRect {
    pub fn new(cx: f64, cy: f64, width: f64, depth: f64, rotation: f64) -> Result<Self> {
        if !(width > 0.0 && depth > 0.0 && width.is_finite() && depth.is_finite()) {
            return Err(Error::Geometry(format!(
                "rectangle extents must be positive and finite, got {width} x {depth}"
            )));
        }
        if !(cx.is_finite() && cy.is_finite() && rotation.is_finite()) {
            return Err(Error::Geometry("rectangle pose must be finite".into()));
        }
        Ok(OrientedRect {
            cx,
            cy,
            width,
            depth,
            rotation,
        })
    }

    /// Unit vectors of the local x- and y-axes in world coordinates.
    pub fn axes(&self) -> [(f64, f64); 2] {
        let (s, c) = self.rotation.sin_cos();
        [(c, s), (-s, c)]
    }

    /// Corners in counter-clockwise order starting from local (+x, +y).
    pub fn corners(&self) -> [(f64, f64); 4] {
        let [u, v] = self.axes();
        let hw = self.width / 2.0;
        let hd = self.depth / 2.0;
        let at = |a: f64, b: f64| (self.cx + a * u.0 + b * v.0, self.cy + a * u.1 + b * v.1);
        [at(hw, hd), at(-hw, hd), at(-hw, -hd), at(hw, -hd)]
    }

    /// World point expressed in the rectangle's local frame (center origin).
    pub fn to_local(&self, p: (f64, f64)) -> (f64, f64) {
        let (dx, dy) = (p.0 - self.cx, p.1 - self.cy);
        let (s, c) = self.rotation.sin_cos();
        (c * dx + s * dy, -s * dx + c * dy)
    }

    /// Boundary-inclusive containment of a point.
    pub fn contains(&self, p: (f64, f64)) -> bool {
        let (lx, ly) = self.to_local(p);
        lx.abs() <= self.width / 2.0 && ly.abs() <= self.depth / 2.0
    }

    /// Euclidean distance from a point to the solid rectangle (0 inside).
    pub fn distance(&self, p: (f64, f64)) -> f64 {
        let (lx, ly) = self.to_local(p);
        let dx = (lx.abs() - self.width / 2.0).max(0.0);
        let dy = (ly.abs() - self.depth / 2.0).max(0.0);
        (dx * dx + dy * dy).sqrt()
    }

    /// Distance from an interior point to the rectangle's boundary
    /// (negative outside).
    pub fn interior_clearance(&self, p: (f64, f64)) -> f64 {
        let (lx, ly) = self.to_local(p);
        (self.width / 2.0 - lx.abs()).min(self.depth / 2.0 - ly.abs())
    }

    /// The same rectangle translated by a world-frame offset.
    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        OrientedRect {
            cx: self.cx + dx,
            cy: self.cy + dy,
            ..*self
        }
    }

    /// Axis-aligned bounding box as `((min_x, min_y), (max_x, max_y))`.
    pub fn bbox(&self) -> ((f64, f64), (f64, f64)) {
        let cs = self.corners();
        let mut lo = cs[0];
        let mut hi = cs[0];
        for c in &cs[1..] {
            lo = (lo.0.min(c.0), lo.1.min(c.1));
            hi = (hi.0.max(c.0), hi.1.max(c.1));
        }
        (lo, hi)
    }
}

/// Whether two oriented rectangles overlap with positive area.
///
/// Separating-axis test on the four edge normals; touching edges or corners
/// (separation within [`CONTACT_EPS`]) count as non-overlapping.
pub fn rect_overlap(a: &OrientedRect, b: &OrientedRect) -> bool {
    let axes = [a.axes()[0], a.axes()[1], b.axes()[0], b.axes()[1]];
    let ca = a.corners();
    let cb = b.corners();
    for axis in axes {
        let (a_lo, a_hi) = project(&ca, axis);
        let (b_lo, b_hi) = project(&cb, axis);
        if a_hi <= b_lo + CONTACT_EPS || b_hi <= a_lo + CONTACT_EPS {
            return false;
        }
    }
    true
}

fn project(corners: &[(f64, f64); 4], axis: (f64, f64)) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for c in corners {
        let d = c.0 * axis.0 + c.1 * axis.1;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_degenerate_extents() {
        assert!(OrientedRect::new(0.0, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(OrientedRect::new(0.0, 0.0, 1.0, -2.0, 0.0).is_err());
        assert!(OrientedRect::new(0.0, 0.0, f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn corners_of_axis_aligned_rect() {
        let r = OrientedRect::new(1.0, 2.0, 4.0, 2.0, 0.0).unwrap();
        let cs = r.corners();
        assert_eq!(cs[0], (3.0, 3.0));
        assert_eq!(cs[1], (-1.0, 3.0));
        assert_eq!(cs[2], (-1.0, 1.0));
        assert_eq!(cs[3], (3.0, 1.0));
    }

    #[test]
    fn touching_edges_do_not_overlap() {
        let a = OrientedRect::new(0.0, 0.0, 2.0, 2.0, 0.0).unwrap();
        let b = OrientedRect::new(2.0, 0.0, 2.0, 2.0, 0.0).unwrap();
        assert!(!rect_overlap(&a, &b));
        let c = OrientedRect::new(1.9, 0.0, 2.0, 2.0, 0.0).unwrap();
        assert!(rect_overlap(&a, &c));
    }

    #[test]
    fn rotated_diamond_overlaps_square_corner() {
        // A unit square at the origin and a diamond whose tip reaches into it.
        let a = OrientedRect::new(0.0, 0.0, 1.0, 1.0, 0.0).unwrap();
        let tip_in = OrientedRect::new(1.1, 0.0, 1.0, 1.0, std::f64::consts::FRAC_PI_4).unwrap();
        assert!(rect_overlap(&a, &tip_in));
        let tip_out = OrientedRect::new(1.3, 0.0, 1.0, 1.0, std::f64::consts::FRAC_PI_4).unwrap();
        assert!(!rect_overlap(&a, &tip_out));
    }

    /// Monte-Carlo point membership agrees with the SAT verdict: if any point
    /// lies strictly inside both rectangles they must be reported overlapping.
    #[test]
    fn sat_agrees_with_point_sampling() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let mut r = |lo: f64, hi: f64| rng.gen_range(lo..hi);
            let a = OrientedRect::new(
                r(-1.0, 1.0),
                r(-1.0, 1.0),
                r(0.2, 2.0),
                r(0.2, 2.0),
                r(-3.1, 3.1),
            )
            .unwrap();
            let b = OrientedRect::new(
                r(-1.0, 1.0),
                r(-1.0, 1.0),
                r(0.2, 2.0),
                r(0.2, 2.0),
                r(-3.1, 3.1),
            )
            .unwrap();
            let overlap = rect_overlap(&a, &b);
            // Dense sample of a's interior.
            let mut found = false;
            for i in 0..40 {
                for j in 0..40 {
                    let lx = (i as f64 / 39.0 - 0.5) * (a.width - 1e-6);
                    let ly = (j as f64 / 39.0 - 0.5) * (a.depth - 1e-6);
                    let [u, v] = a.axes();
                    let p = (a.cx + lx * u.0 + ly * v.0, a.cy + lx * u.1 + ly * v.1);
                    // Strict interior of b, clear of contact tolerance.
                    if b.interior_clearance(p) > 1e-6 {
                        found = true;
                    }
                }
            }
            if found {
                assert!(
                    overlap,
                    "sampled interior point in both, SAT says disjoint: {a:?} {b:?}"
                );
            }
        }
    }

    proptest! {
        /// Corner positions are reproducible from the struct fields alone.
        #[test]
        fn corners_recomputable(cx in -10.0..10.0f64, cy in -10.0..10.0f64,
                                w in 0.1..5.0f64, d in 0.1..5.0f64, rot in -3.2..3.2f64) {
            let r = OrientedRect::new(cx, cy, w, d, rot).unwrap();
            let again = OrientedRect { cx: r.cx, cy: r.cy, width: r.width, depth: r.depth, rotation: r.rotation };
            prop_assert_eq!(r.corners(), again.corners());
        }

        /// The rectangle center is always contained and corners lie on the boundary.
        #[test]
        fn containment_basics(cx in -5.0..5.0f64, cy in -5.0..5.0f64,
                              w in 0.1..4.0f64, d in 0.1..4.0f64, rot in -3.2..3.2f64) {
            let r = OrientedRect::new(cx, cy, w, d, rot).unwrap();
            prop_assert!(r.contains((cx, cy)));
            for corner in r.corners() {
                prop_assert!(r.distance(corner) < 1e-9);
            }
        }
    }
}
