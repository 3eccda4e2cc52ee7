use std::collections::HashSet;
use std::fmt::Write;

use serde_json::{json, Value};

use super::{Role, UDGraph};
use crate::json::rat_value;

/// DIMACS-style edge list with 1-based ids.
pub fn to_dimacs(g: &UDGraph) -> String {
    let mut s = String::new();
    writeln!(s, "c family {}", serde_json::to_string(g.family()).unwrap()).unwrap();
    writeln!(s, "p edge {} {}", g.n(), g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(s, "e {} {}", u + 1, v + 1).unwrap();
    }
    s
}

pub fn to_json(g: &UDGraph) -> Value {
    let vertices: Vec<Value> = g
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            json!({
                "id": i,
                "role": v.role,
                "x": v.pos.x,
                "y": v.pos.y,
                "weight": rat_value(&v.weight),
                "lattice": v.lattice.map(|p| [p.a, p.b]),
            })
        })
        .collect();
    let edges: Vec<[usize; 2]> = g.edges().map(|(u, v)| [u, v]).collect();
    json!({
        "family": g.family(),
        "core_radius": g.core_radius(),
        "vertices": vertices,
        "edges": edges,
        "spindles": g.spindles(),
        "merges": g.merge_count(),
    })
}

/// Core vertices filled, spindle vertices hollow, members of `highlight` in red.
pub fn to_svg(g: &UDGraph, highlight: Option<&[usize]>) -> String {
    let hl: HashSet<usize> = highlight.unwrap_or(&[]).iter().copied().collect();
    let pts: Vec<(f64, f64)> = g.vertices().iter().map(|v| v.pos.to_f64()).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let scale = 40.0;
    let pad = 1.0;
    let w = (x1 - x0 + 2.0 * pad) * scale;
    let h = (y1 - y0 + 2.0 * pad) * scale;
    let tx = |x: f64| (x - x0 + pad) * scale;
    let ty = |y: f64| (y1 - y + pad) * scale;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">"#
    )
    .unwrap();
    writeln!(s, r##"<g stroke="#888" stroke-width="0.8">"##).unwrap();
    for (u, v) in g.edges() {
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            tx(pts[u].0),
            ty(pts[u].1),
            tx(pts[v].0),
            ty(pts[v].1)
        )
        .unwrap();
    }
    writeln!(s, "</g>").unwrap();
    for (i, v) in g.vertices().iter().enumerate() {
        let stroke = if hl.contains(&i) { "#d62728" } else { "#222" };
        let fill = match (v.role, hl.contains(&i)) {
            (_, true) => "#d62728",
            (Role::Core, false) => "#222",
            (Role::Spindle, false) => "#fff",
        };
        writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{fill}" stroke="{stroke}"/>"#,
            tx(pts[i].0),
            ty(pts[i].1)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
