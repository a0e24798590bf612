use crate::error::{Error, Result};

/// A simple (non-self-intersecting) polygon with counter-clockwise vertices.
///
/// Construction validates the invariants, so a value of this type always has
/// positive area, at least three vertices, no repeated consecutive vertices,
/// and no crossing edges.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplePolygon {
    vertices: Vec<(f64, f64)>,
}

impl SimplePolygon {
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Geometry(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices
            .iter()
            .any(|v| !v.0.is_finite() || !v.1.is_finite())
        {
            return Err(Error::Geometry("polygon vertices must be finite".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            if (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12 {
                return Err(Error::Geometry(format!(
                    "degenerate zero-length edge at vertex {i}"
                )));
            }
        }
        let signed = signed_area(&vertices);
        if signed.abs() < 1e-9 {
            return Err(Error::Geometry("polygon has (near-)zero area".into()));
        }
        if signed < 0.0 {
            return Err(Error::Geometry(
                "polygon vertices must be in counter-clockwise order".into(),
            ));
        }
        // Reject self-intersection: any two non-adjacent edges that cross.
        for i in 0..n {
            let e1 = (vertices[i], vertices[(i + 1) % n]);
            for j in (i + 1)..n {
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let e2 = (vertices[j], vertices[(j + 1) % n]);
                if segments_cross(e1, e2) {
                    return Err(Error::Geometry(format!(
                        "polygon edges {i} and {j} intersect; boundary must be simple"
                    )));
                }
            }
        }
        Ok(SimplePolygon { vertices })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn bbox(&self) -> ((f64, f64), (f64, f64)) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices[1..] {
            lo = (lo.0.min(v.0), lo.1.min(v.1));
            hi = (hi.0.max(v.0), hi.1.max(v.1));
        }
        (lo, hi)
    }

    /// Diagonal length of the bounding box; a cheap bound on the polygon's
    /// diameter used to size pose search ranges.
    pub fn bbox_diagonal(&self) -> f64 {
        let (lo, hi) = self.bbox();
        ((hi.0 - lo.0).powi(2) + (hi.1 - lo.1).powi(2)).sqrt()
    }

    /// Even-odd containment test. Points exactly on the boundary may land on
    /// either side; use [`Self::contains_with_tolerance`] where that matters.
    pub fn contains(&self, p: (f64, f64)) -> bool {
        let mut inside = false;
        let n = self.vertices.len();
        let mut j = n - 1;
        for i in 0..n {
            let (xi, yi) = self.vertices[i];
            let (xj, yj) = self.vertices[j];
            if (yi > p.1) != (yj > p.1) {
                let x_cross = xi + (p.1 - yi) / (yj - yi) * (xj - xi);
                if p.0 < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Containment that also accepts points within `tol` of the boundary, so
    /// objects flush against a wall validate cleanly.
    pub fn contains_with_tolerance(&self, p: (f64, f64), tol: f64) -> bool {
        self.contains(p) || self.distance_to_boundary(p) <= tol
    }

    /// Distance from a point to the polygon's boundary curve.
    pub fn distance_to_boundary(&self, p: (f64, f64)) -> f64 {
        let mut best = f64::INFINITY;
        for (a, b) in self.edges() {
            best = best.min(point_segment_distance(p, a, b));
        }
        best
    }

    pub fn edges(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Axis-aligned rectangle helper, the most common room shape.
    pub fn rectangle(min: (f64, f64), max: (f64, f64)) -> Result<Self> {
        SimplePolygon::new(vec![min, (max.0, min.1), max, (min.0, max.1)])
    }
}

fn signed_area(vertices: &[(f64, f64)]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let (x1, y1) = vertices[i];
        let (x2, y2) = vertices[(i + 1) % n];
        acc += x1 * y2 - x2 * y1;
    }
    acc / 2.0
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (abx, aby) = (b.0 - a.0, b.1 - a.1);
    let len2 = abx * abx + aby * aby;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * abx + (p.1 - a.1) * aby) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (a.0 + t * abx, a.1 + t * aby);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Proper crossing of two segments (shared endpoints of adjacent edges are
/// excluded by the caller).
fn segments_cross(e1: ((f64, f64), (f64, f64)), e2: ((f64, f64), (f64, f64))) -> bool {
    let d1 = orient(e2.0, e2.1, e1.0);
    let d2 = orient(e2.0, e2.1, e1.1);
    let d3 = orient(e1.0, e1.1, e2.0);
    let d4 = orient(e1.0, e1.1, e2.1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    // Collinear overlap also violates simplicity.
    let eps = 1e-12;
    (d1.abs() < eps && on_segment(e2.0, e2.1, e1.0))
        || (d2.abs() < eps && on_segment(e2.0, e2.1, e1.1))
        || (d3.abs() < eps && on_segment(e1.0, e1.1, e2.0))
        || (d4.abs() < eps && on_segment(e1.0, e1.1, e2.1))
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn on_segment(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> bool {
    p.0 >= a.0.min(b.0) - 1e-12
        && p.0 <= a.0.max(b.0) + 1e-12
        && p.1 >= a.1.min(b.1) - 1e-12
        && p.1 <= a.1.max(b.1) + 1e-12
}
