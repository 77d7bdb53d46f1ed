//! SVG 1.1 rendering of instantiated layouts.
//!
//! Element coordinates are y-up: `y_svg = image_height - y_pixel`, with
//! x unchanged. The root group flips the axis back, so the drawing shows
//! the plan the way it was sketched.

use std::fmt::Write;

use sketchopt_core::annotation::DesignVariable;
use sketchopt_core::parametrizer::{FloorplanLayout, ParametricGraph};
use sketchopt_core::Point;

pub const WALL_STROKE: f64 = 2.0;
pub const COLUMN_RADIUS: f64 = 3.0;

/// Draws wall polylines, a circle per node (column) and, for every
/// variable, its range as a dashed double arrow across the axis.
pub fn layout_svg(
    layout: &FloorplanLayout,
    base: &ParametricGraph,
    variables: &[DesignVariable],
    image_size: [usize; 2],
) -> String {
    let [w, h] = image_size;
    let hf = h as f64;
    let up = |p: Point| (p.x, hf - p.y);
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    s.push_str(concat!(
        "<defs>\n",
        "<marker id=\"head\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\">",
        "<path d=\"M0,0 L10,5 L0,10 z\" fill=\"#c0392b\"/></marker>\n",
        "<marker id=\"tail\" viewBox=\"0 0 10 10\" refX=\"0\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\">",
        "<path d=\"M10,0 L0,5 L10,10 z\" fill=\"#c0392b\"/></marker>\n",
        "</defs>\n",
    ));
    let _ = writeln!(s, "<g transform=\"matrix(1 0 0 -1 0 {h})\">");
    let _ = writeln!(
        s,
        "<g id=\"walls\" fill=\"none\" stroke=\"#111\" stroke-width=\"{WALL_STROKE}\" stroke-linejoin=\"miter\">"
    );
    for line in &layout.polylines {
        let pts: Vec<String> = line
            .iter()
            .map(|&p| {
                let (x, y) = up(p);
                format!("{x},{y}")
            })
            .collect();
        let _ = writeln!(s, "<polyline points=\"{}\"/>", pts.join(" "));
    }
    s.push_str("</g>\n<g id=\"columns\" fill=\"#2c3e50\">\n");
    for &p in &layout.node_positions {
        let (x, y) = up(p);
        let _ = writeln!(s, "<circle cx=\"{x}\" cy=\"{y}\" r=\"{COLUMN_RADIUS}\"/>");
    }
    s.push_str(
        "</g>\n<g id=\"ranges\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1\" stroke-dasharray=\"4 3\">\n",
    );
    for v in variables {
        let Ok(axis) = base.axis(v.axis_id) else { continue };
        let n = axis.normal();
        let origin = match &v.source_mark {
            Some(m) => m.center,
            None => axis.anchor,
        };
        let (x1, y1) = up(origin + n * v.lo);
        let (x2, y2) = up(origin + n * v.hi);
        let _ = writeln!(
            s,
            "<line id=\"var-{}\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" marker-start=\"url(#tail)\" marker-end=\"url(#head)\"/>",
            v.id
        );
    }
    s.push_str("</g>\n</g>\n</svg>\n");
    s
}
