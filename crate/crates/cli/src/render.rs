use std::fmt::Write as _;

use perisplit::geometry::bounding_box;
use perisplit::hull::convex_hull;
use perisplit::quadtree::{Quadtree, Square};
use perisplit::Point;

#[derive(Debug, Clone, Copy, Default)]
pub struct Overlays {
    pub quadtree: bool,
    pub squares: bool,
}

/// SVG of the points and both hulls. The viewBox is the data bounding box
/// grown by 5% on each side; y points up.
pub fn render_svg(points: &[Point], left: &[usize], right: &[usize], overlays: Overlays) -> String {
    let (x0, y0, x1, y1) = bounding_box(points).unwrap_or((0.0, 0.0, 0.0, 0.0));
    let (w, h) = (x1 - x0, y1 - y0);
    let base = w.max(h).max(f64::MIN_POSITIVE.sqrt());
    let mx = if w > 0.0 { 0.05 * w } else { 0.05 * base };
    let my = if h > 0.0 { 0.05 * h } else { 0.05 * base };
    let r = 0.005 * base;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        x0 - mx,
        -(y1 + my),
        w + 2.0 * mx,
        h + 2.0 * my
    )
    .unwrap();
    s.push_str(
        "<style>\
         rect{fill:none;vector-effect:non-scaling-stroke}\
         .node{stroke:#999;stroke-width:0.5}\
         .inner{stroke:#999;stroke-width:0.5;stroke-dasharray:2 2}\
         .base{stroke:#d80;stroke-width:0.5}\
         polygon{fill-opacity:0.15;stroke-width:1.5;vector-effect:non-scaling-stroke}\
         .left{fill:#1f77b4;stroke:#1f77b4}\
         .right{fill:#d62728;stroke:#d62728}\
         </style>\n",
    );

    if overlays.quadtree || overlays.squares {
        if let Some(tree) = Quadtree::build(points) {
            let dump = tree.dump();
            if overlays.quadtree {
                for n in &dump.nodes {
                    rect(&mut s, &n.square, "node");
                    if let Some(inner) = &n.inner {
                        rect(&mut s, inner, "inner");
                    }
                }
            }
            if overlays.squares {
                for b in &dump.base_squares {
                    rect(&mut s, &b.square, "base");
                }
            }
        }
    }

    for (ids, class) in [(left, "left"), (right, "right")] {
        let side: Vec<Point> = ids.iter().filter_map(|&i| points.get(i).copied()).collect();
        if let Ok(hull) = convex_hull(&side) {
            let coords: Vec<String> = hull
                .vertices()
                .iter()
                .map(|p| format!("{},{}", p.x, -p.y))
                .collect();
            writeln!(
                s,
                r#"<polygon class="{class}" points="{}"/>"#,
                coords.join(" ")
            )
            .unwrap();
        }
        for p in &side {
            writeln!(
                s,
                r#"<circle class="{class}" cx="{}" cy="{}" r="{r}"/>"#,
                p.x, -p.y
            )
            .unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

fn rect(s: &mut String, sq: &Square, class: &str) {
    let (x0, _, _, y1) = sq.bounds();
    writeln!(
        s,
        r#"<rect class="{class}" x="{}" y="{}" width="{}" height="{}"/>"#,
        x0, -y1, sq.size, sq.size
    )
    .unwrap();
}
