//! Deterministic SVG rendering: floor plans with the functional-space color
//! scheme and Pareto scatter plots.
//!
//! Output contains no timestamps or environment-dependent content, so a
//! repeated run with identical inputs produces byte-identical files. Region
//! layers stack as non-standable < standable < sittable < mutual, keeping the
//! mutual region visible on top.

use crate::geometry::{OccupancyGrid, Pose2D, SimplePolygon};
use crate::scene::Room;
use crate::scene_graph::RoomDelta;
use std::fmt::Write as _;

/// Colors and scaling of the SVG output.
#[derive(Debug, Clone)]
pub struct RenderStyle {
    /// Fill of the room interior (everything not covered by another layer).
    pub non_standable: String,
    pub standable: String,
    pub sittable: String,
    pub mutual: String,
    /// Stroke color of furniture outlines and move arrows.
    pub outline: String,
    /// Pixels per meter.
    pub scale: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            non_standable: "#D9534F".into(),
            standable: "#5CB85C".into(),
            sittable: "#F0AD4E".into(),
            mutual: "#428BCA".into(),
            outline: "#333333".into(),
            scale: 80.0,
        }
    }
}

/// One room's drawable layers.
pub struct RoomScene<'a> {
    pub room: &'a Room,
    pub standable: &'a OccupancyGrid,
    /// Sittable space on the same raster; only the band beyond the standable
    /// space is painted, so the green layer stays visible.
    pub sittable: Option<&'a OccupancyGrid>,
    /// Mutual region plus the pose carrying its frame into this room's frame.
    pub mutual: Option<(&'a OccupancyGrid, Pose2D)>,
    /// Furniture translations; footprints draw at their moved position with
    /// an arrow from the original center.
    pub delta: Option<&'a RoomDelta>,
    /// Extra line under the room id, e.g. an effort summary.
    pub caption: Option<String>,
}

const MARGIN_M: f64 = 0.3;
const PAD_PX: f64 = 12.0;
const LABEL_BAND_PX: f64 = 24.0;
const CAPTION_BAND_PX: f64 = 20.0;
const HEADING_BAND_PX: f64 = 30.0;

/// Compact deterministic number formatting (≤ 3 decimals, no trailing zeros).
fn fmt(v: f64) -> String {
    let mut s = format!("{v:.3}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    if s == "-0" {
        s.clear();
        s.push('0');
    }
    s
}

fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn polygon_points(polygon: &SimplePolygon) -> String {
    let mut out = String::new();
    for &(x, y) in polygon.vertices() {
        if !out.is_empty() {
            out.push(' ');
        }
        let _ = write!(out, "{},{}", fmt(x), fmt(y));
    }
    out
}

/// Maximal horizontal runs of cells where `keep` holds, as meter rectangles.
fn cell_runs(
    grid: &OccupancyGrid,
    mut keep: impl FnMut(usize, usize) -> bool,
) -> Vec<(f64, f64, f64, f64)> {
    let res = grid.resolution;
    let mut rects = Vec::new();
    for iy in 0..grid.height {
        let mut run_start: Option<usize> = None;
        for ix in 0..=grid.width {
            let on = ix < grid.width && keep(ix, iy);
            match (run_start, on) {
                (None, true) => run_start = Some(ix),
                (Some(x0), false) => {
                    rects.push((
                        grid.origin.0 + x0 as f64 * res,
                        grid.origin.1 + iy as f64 * res,
                        (ix - x0) as f64 * res,
                        res,
                    ));
                    run_start = None;
                }
                _ => {}
            }
        }
    }
    rects
}

fn push_run_rects(svg: &mut String, rects: &[(f64, f64, f64, f64)]) {
    for &(x, y, w, h) in rects {
        let _ = write!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
            fmt(x),
            fmt(y),
            fmt(w),
            fmt(h)
        );
        svg.push('\n');
    }
}

fn push_arrow(svg: &mut String, from: (f64, f64), to: (f64, f64)) {
    let (dx, dy) = (to.0 - from.0, to.1 - from.1);
    let len = (dx * dx + dy * dy).sqrt();
    if len <= 1e-9 {
        return;
    }
    let (ux, uy) = (dx / len, dy / len);
    let head = 0.18_f64.min(0.6 * len);
    let half = 0.06;
    // Shaft stops where the head begins.
    let base = (to.0 - head * ux, to.1 - head * uy);
    let left = (base.0 - half * uy, base.1 + half * ux);
    let right = (base.0 + half * uy, base.1 - half * ux);
    let _ = write!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        fmt(from.0),
        fmt(from.1),
        fmt(base.0),
        fmt(base.1)
    );
    let _ = write!(
        svg,
        r#"<polygon points="{},{} {},{} {},{}" stroke="none"/>"#,
        fmt(to.0),
        fmt(to.1),
        fmt(left.0),
        fmt(left.1),
        fmt(right.0),
        fmt(right.1)
    );
    svg.push('\n');
}

struct PanelSize {
    width: f64,
    height: f64,
    bbox: ((f64, f64), (f64, f64)),
    caption_band: f64,
}

fn panel_size(scene: &RoomScene, style: &RenderStyle) -> PanelSize {
    let bbox = scene.room.boundary.bbox();
    let w = (bbox.1 .0 - bbox.0 .0 + 2.0 * MARGIN_M) * style.scale;
    let h = (bbox.1 .1 - bbox.0 .1 + 2.0 * MARGIN_M) * style.scale;
    let caption_band = if scene.caption.is_some() {
        CAPTION_BAND_PX
    } else {
        0.0
    };
    PanelSize {
        width: w,
        height: LABEL_BAND_PX + h + caption_band,
        bbox,
        caption_band,
    }
}

fn push_panel(svg: &mut String, scene: &RoomScene, style: &RenderStyle, x0: f64, y0: f64) {
    let size = panel_size(scene, style);
    let ((min_x, _), (_, max_y)) = size.bbox;
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" fill="{}">{}</text>"#,
        fmt(x0),
        fmt(y0 + 15.0),
        style.outline,
        xml_escape(&scene.room.id)
    );
    svg.push('\n');

    // World meters (y up) to screen pixels (y down).
    let _ = write!(
        svg,
        r#"<g transform="translate({} {}) scale({} -{})">"#,
        fmt(x0 + (MARGIN_M - min_x) * style.scale),
        fmt(y0 + LABEL_BAND_PX + (MARGIN_M + max_y) * style.scale),
        fmt(style.scale),
        fmt(style.scale)
    );
    svg.push('\n');

    let _ = write!(
        svg,
        r#"<polygon class="non-standable" points="{}" fill="{}"/>"#,
        polygon_points(&scene.room.boundary),
        style.non_standable
    );
    svg.push('\n');

    let _ = write!(
        svg,
        r#"<g class="standable" fill="{}" shape-rendering="crispEdges">"#,
        style.standable
    );
    svg.push('\n');
    push_run_rects(
        svg,
        &cell_runs(scene.standable, |ix, iy| scene.standable.get(ix, iy)),
    );
    svg.push_str("</g>\n");

    if let Some(sittable) = scene.sittable {
        let _ = write!(
            svg,
            r#"<g class="sittable" fill="{}" shape-rendering="crispEdges">"#,
            style.sittable
        );
        svg.push('\n');
        push_run_rects(
            svg,
            &cell_runs(sittable, |ix, iy| {
                sittable.get(ix, iy) && !scene.standable.get(ix, iy)
            }),
        );
        svg.push_str("</g>\n");
    }

    if let Some((mutual, into_room)) = scene.mutual {
        let _ = write!(
            svg,
            r#"<g class="mutual" fill="{}" shape-rendering="crispEdges" transform="translate({} {}) rotate({})">"#,
            style.mutual,
            fmt(into_room.tx),
            fmt(into_room.ty),
            fmt(into_room.theta.to_degrees())
        );
        svg.push('\n');
        push_run_rects(svg, &cell_runs(mutual, |ix, iy| mutual.get(ix, iy)));
        svg.push_str("</g>\n");
    }

    let _ = write!(
        svg,
        r#"<g class="furniture" fill="none" stroke="{}" stroke-width="0.03">"#,
        style.outline
    );
    svg.push('\n');
    for obj in &scene.room.objects {
        let moved = scene
            .delta
            .and_then(|d| d.get(&obj.id))
            .copied()
            .unwrap_or((0.0, 0.0));
        let footprint = obj.footprint_moved(moved);
        let corners = footprint.corners();
        let mut pts = String::new();
        for (x, y) in corners {
            if !pts.is_empty() {
                pts.push(' ');
            }
            let _ = write!(pts, "{},{}", fmt(x), fmt(y));
        }
        let _ = write!(
            svg,
            r#"<polygon points="{pts}"><title>{}</title></polygon>"#,
            xml_escape(&obj.id)
        );
        svg.push('\n');
    }
    svg.push_str("</g>\n");

    if let Some(delta) = scene.delta {
        let _ = write!(
            svg,
            r#"<g class="move-arrow" stroke="{}" stroke-width="0.04" fill="{}">"#,
            style.outline, style.outline
        );
        svg.push('\n');
        for obj in &scene.room.objects {
            if let Some(&(du, dv)) = delta.get(&obj.id) {
                let moved = obj.footprint_moved((du, dv));
                push_arrow(
                    svg,
                    (obj.footprint.cx, obj.footprint.cy),
                    (moved.cx, moved.cy),
                );
            }
        }
        svg.push_str("</g>\n");
    }

    svg.push_str("</g>\n");

    if let Some(caption) = &scene.caption {
        let _ = write!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{}">{}</text>"#,
            fmt(x0),
            fmt(y0 + size.height - 6.0),
            style.outline,
            xml_escape(caption)
        );
        svg.push('\n');
    }
}

/// Floor plans of several rooms side by side under an optional heading.
pub fn layout_svg(scenes: &[RoomScene], heading: &str, style: &RenderStyle) -> String {
    let sizes: Vec<PanelSize> = scenes.iter().map(|s| panel_size(s, style)).collect();
    let heading_band = if heading.is_empty() {
        0.0
    } else {
        HEADING_BAND_PX
    };
    let total_w = sizes.iter().map(|s| s.width).sum::<f64>() + PAD_PX * (scenes.len() as f64 + 1.0);
    let total_h = heading_band + sizes.iter().map(|s| s.height).fold(0.0, f64::max) + 2.0 * PAD_PX;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = fmt(total_w.ceil()),
        h = fmt(total_h.ceil())
    );
    svg.push('\n');
    let _ = write!(
        svg,
        r##"<rect width="{}" height="{}" fill="#FFFFFF"/>"##,
        fmt(total_w.ceil()),
        fmt(total_h.ceil())
    );
    svg.push('\n');
    if !heading.is_empty() {
        let _ = write!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="16" fill="{}">{}</text>"#,
            fmt(PAD_PX),
            fmt(PAD_PX + 14.0),
            style.outline,
            xml_escape(heading)
        );
        svg.push('\n');
    }
    let mut x = PAD_PX;
    for (scene, size) in scenes.iter().zip(&sizes) {
        push_panel(&mut svg, scene, style, x, heading_band + PAD_PX);
        x += size.width + PAD_PX;
        let _ = size.caption_band;
    }
    svg.push_str("</svg>\n");
    svg
}

/// Floor plan of a single room, headed by nothing (the panel carries the id).
pub fn room_svg(scene: &RoomScene, style: &RenderStyle) -> String {
    layout_svg(std::slice::from_ref(scene), "", style)
}

/// Scatter plot of a Pareto front: effort on x, mutual area on y.
pub fn pareto_svg(points: &[(f64, f64)], style: &RenderStyle) -> String {
    const W: f64 = 560.0;
    const H: f64 = 420.0;
    const L: f64 = 70.0;
    const R: f64 = 20.0;
    const T: f64 = 20.0;
    const B: f64 = 50.0;

    let mut sorted: Vec<(f64, f64)> = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let (mut e_lo, mut e_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut k_lo, mut k_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(e, k) in &sorted {
        e_lo = e_lo.min(e);
        e_hi = e_hi.max(e);
        k_lo = k_lo.min(k);
        k_hi = k_hi.max(k);
    }
    if sorted.is_empty() {
        (e_lo, e_hi, k_lo, k_hi) = (0.0, 1.0, 0.0, 1.0);
    }
    if e_hi - e_lo < 1e-12 {
        e_lo -= 0.5;
        e_hi += 0.5;
    }
    if k_hi - k_lo < 1e-12 {
        k_lo -= 0.5;
        k_hi += 0.5;
    }
    let sx = |e: f64| L + (e - e_lo) / (e_hi - e_lo) * (W - L - R);
    let sy = |k: f64| H - B - (k - k_lo) / (k_hi - k_lo) * (H - T - B);

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    svg.push('\n');
    let _ = write!(svg, r##"<rect width="{W}" height="{H}" fill="#FFFFFF"/>"##);
    svg.push('\n');
    let axis = &style.outline;
    let _ = write!(
        svg,
        r#"<g stroke="{axis}" stroke-width="1"><line x1="{L}" y1="{}" x2="{}" y2="{}"/><line x1="{L}" y1="{T}" x2="{L}" y2="{}"/></g>"#,
        H - B,
        W - R,
        H - B,
        H - B
    );
    svg.push('\n');
    let _ = write!(
        svg,
        r#"<g font-family="sans-serif" font-size="12" fill="{axis}">"#
    );
    svg.push('\n');
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">effort</text>"#,
        (L + W - R) / 2.0,
        H - 12.0
    );
    svg.push('\n');
    let _ = write!(
        svg,
        r#"<text x="16" y="{mid}" text-anchor="middle" transform="rotate(-90 16 {mid})">mutual area (m&#178;)</text>"#,
        mid = (T + H - B) / 2.0
    );
    svg.push('\n');
    let _ = write!(
        svg,
        r#"<text x="{L}" y="{}" text-anchor="middle">{}</text><text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        H - B + 18.0,
        fmt(e_lo),
        W - R,
        H - B + 18.0,
        fmt(e_hi)
    );
    svg.push('\n');
    let _ = write!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text><text x="{}" y="{}" text-anchor="end">{}</text>"#,
        L - 8.0,
        H - B + 4.0,
        fmt(k_lo),
        L - 8.0,
        T + 4.0,
        fmt(k_hi)
    );
    svg.push_str("</g>\n");

    if sorted.len() > 1 {
        let mut pts = String::new();
        for &(e, k) in &sorted {
            if !pts.is_empty() {
                pts.push(' ');
            }
            let _ = write!(pts, "{},{}", fmt(sx(e)), fmt(sy(k)));
        }
        let _ = write!(
            svg,
            r#"<polyline points="{pts}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            style.mutual
        );
        svg.push('\n');
    }
    for &(e, k) in &sorted {
        let _ = write!(
            svg,
            r#"<circle class="front-point" cx="{}" cy="{}" r="4" fill="{}"/>"#,
            fmt(sx(e)),
            fmt(sy(k)),
            style.mutual
        );
        svg.push('\n');
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::load_scene;
    use crate::spaces::{room_sittable_space, standable_space};
    use std::path::Path;

    const RES: f64 = 0.05;

    fn fixture(name: &str) -> crate::scene::Scene {
        let path = Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/fixtures")
            .join(name);
        load_scene(&path).expect("fixture loads")
    }

    #[test]
    fn room_plan_has_all_layers_and_is_deterministic() {
        let scene = fixture("free_table.json");
        let room = &scene.rooms[0];
        let standable = standable_space(room, RES, None).unwrap();
        let sittable = room_sittable_space(room, RES, None).unwrap();
        let style = RenderStyle::default();
        let render = |_: ()| {
            room_svg(
                &RoomScene {
                    room,
                    standable: &standable.region,
                    sittable: Some(&sittable.region),
                    mutual: None,
                    delta: None,
                    caption: None,
                },
                &style,
            )
        };
        let svg = render(());
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
        for color in ["#D9534F", "#5CB85C", "#F0AD4E"] {
            assert!(svg.contains(color), "missing {color}");
        }
        assert!(svg.contains(r#"class="furniture""#));
        assert!(!svg.contains("#428BCA"), "no mutual layer requested");
        assert_eq!(svg, render(()), "repeat render must be byte-identical");
    }

    #[test]
    fn arrows_appear_only_for_moved_furniture() {
        let scene = fixture("corridor_vs_cornered.json");
        let room = &scene.rooms[1];
        let standable = standable_space(room, RES, None).unwrap();
        let mut delta = RoomDelta::new();
        delta.insert("table_mid".into(), (1.0, 0.0));
        let svg = room_svg(
            &RoomScene {
                room,
                standable: &standable.region,
                sittable: None,
                mutual: None,
                delta: Some(&delta),
                caption: Some("E=30".into()),
            },
            &RenderStyle::default(),
        );
        assert!(svg.contains(r#"class="move-arrow""#));
        assert!(svg.contains("<line "), "arrow shaft missing");
        assert!(svg.contains("E=30"));

        let still = RoomDelta::new();
        let svg_still = room_svg(
            &RoomScene {
                room,
                standable: &standable.region,
                sittable: None,
                mutual: None,
                delta: Some(&still),
                caption: None,
            },
            &RenderStyle::default(),
        );
        assert!(!svg_still.contains("<line "), "no move, no arrow");
    }

    #[test]
    fn mutual_overlay_carries_the_room_pose() {
        let scene = fixture("two_identical_rooms.json");
        let room = &scene.rooms[1];
        let standable = standable_space(room, RES, None).unwrap();
        let pose = Pose2D::new(1.5, -0.5, std::f64::consts::FRAC_PI_2);
        let svg = room_svg(
            &RoomScene {
                room,
                standable: &standable.region,
                sittable: None,
                mutual: Some((&standable.region, pose)),
                delta: None,
                caption: None,
            },
            &RenderStyle::default(),
        );
        assert!(svg.contains(r#"class="mutual""#));
        assert!(svg.contains("translate(1.5 -0.5) rotate(90)"));
    }

    #[test]
    fn pareto_plot_renders_every_point() {
        let points = vec![(0.0, 5.0), (30.0, 5.5), (45.0, 6.0)];
        let svg = pareto_svg(&points, &RenderStyle::default());
        assert_eq!(svg.matches(r#"class="front-point""#).count(), 3);
        assert!(svg.contains("effort") && svg.contains("mutual area"));
        assert!(!svg.contains("NaN"));

        let single = pareto_svg(&[(0.0, 5.0)], &RenderStyle::default());
        assert_eq!(single.matches(r#"class="front-point""#).count(), 1);
        assert!(!single.contains("NaN"));
    }

    #[test]
    fn labels_are_xml_escaped_and_numbers_compact() {
        assert_eq!(xml_escape("a<b&c>\"d'"), "a&lt;b&amp;c&gt;&quot;d&apos;");
        assert_eq!(fmt(1.5), "1.5");
        assert_eq!(fmt(2.0), "2");
        assert_eq!(fmt(-0.0001), "0");
        assert_eq!(fmt(0.125), "0.125");
        assert_eq!(fmt(1.0 / 3.0), "0.333");
    }
}
