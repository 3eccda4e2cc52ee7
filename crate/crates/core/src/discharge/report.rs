//! JSON, CSV and SVG renderings of discharge results.

use std::fmt::Write;

use serde_json::{json, Value};

use super::{claim1, claim2, Discharge, DischargeReport};
use crate::json::ExactJson;
use crate::tiling::TileType;

/// `{d, exhaustive, seed, runs, passed, i_size, per_type, max_excess, spindle, finite cap...}`.
pub fn report_json(r: &DischargeReport) -> Value {
    let t = &r.totals;
    let per_type: serde_json::Map<String, Value> = TileType::ALL
        .iter()
        .map(|&ty| {
            let k = ty.index();
            (
                ty.name().to_string(),
                json!({
                    "tiles": t.per_type[k],
                    "complete": t.complete_per_type[k],
                    "phase1_max": t.phase1_max[k].to_json(),
                    "claim1": claim1(ty).to_json(),
                    "claim1_attained": r.claim1_attained()[k],
                    "attained_by": r.attained[k].map(|(i, p)| json!({"index": i, "spindles": p})),
                    "phase2_max": t.phase2_max[k].to_json(),
                    "claim2": claim2(ty).to_json(),
                    "final_max": t.final_max[k].to_json(),
                }),
            )
        })
        .collect();
    json!({
        "d": r.d,
        "exhaustive": r.exhaustive,
        "seed": r.seed,
        "runs": r.runs,
        "passed": r.passed(),
        "errors": r.errors,
        "falsifications": r.falsifications,
        "examples": r.examples,
        "max_core_i_size": t.core_size,
        "max_spindle_i_size": t.spindle_size,
        "max_weight": t.weight.to_json(),
        "per_type": per_type,
        "incomplete_final_max": t.incomplete_final_max.to_json(),
        "spindle_charge": {"max": t.spindle_max.to_json(), "min": t.spindle_min.to_json()},
        "missing_spindles": t.missing,
        "trivial_spindles": t.trivial,
        "blocks": {"five": t.blocks[0], "six": t.blocks[1]},
        "claim5b_applications": t.claim5b_applications,
        "claim5c_applications": t.claim5c_applications,
        "key_observation_checks": t.key_observation_checks,
        "t1_deficit_without_t6": t.t1_deficit_without_t6,
        "r4_without_neighbor": t.r4_without_neighbor,
        "total_weight": r.total_weight.to_json(),
        "cap": r.cap.to_json(),
        "finite_bound": r.passed().then(|| (r.total_weight / r.cap).to_json()),
    })
}

fn cell(x: &Option<super::Q>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}

/// One row per tile type.
pub fn report_csv(r: &DischargeReport) -> String {
    let mut s = String::from("d,type,tiles,complete,phase1_max,claim1,phase2_max,claim2,final_max\n");
    let t = &r.totals;
    for ty in TileType::ALL {
        let k = ty.index();
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.d,
            ty,
            t.per_type[k],
            t.complete_per_type[k],
            cell(&t.phase1_max[k]),
            claim1(ty),
            cell(&t.phase2_max[k]),
            claim2(ty),
            cell(&t.final_max[k])
        )
        .unwrap();
    }
    s
}

/// Tiles shaded by final excess (red above zero, blue below, grey when incomplete), with
/// the excess written at each centroid.
pub fn run_svg(d: &Discharge) -> String {
    let r = d.tiling.d as f64 + 3.5;
    let scale = 36.0;
    let size = 2.0 * r * scale;
    let tx = |x: f64| (x + r) * scale;
    let ty = |y: f64| (r - y) * scale;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.1}" height="{size:.1}" viewBox="0 0 {size:.1} {size:.1}">"#
    )
    .unwrap();
    for (t, tile) in d.tiling.tiles.iter().enumerate() {
        let pts: Vec<(f64, f64)> = tile.corners.iter().map(|p| p.to_f64()).collect();
        let poly: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", tx(x), ty(y))).collect();
        let e = d.excess(t);
        let fill = if !d.is_complete(t) {
            "#dddddd"
        } else if e > super::Q::from_integer(0) {
            "#e6194b"
        } else {
            "#4363d8"
        };
        writeln!(s, r#"<polygon points="{}" fill="{fill}" fill-opacity="0.35" stroke="black" stroke-width="1"/>"#, poly.join(" ")).unwrap();
        let n = pts.len() as f64;
        let (cx, cy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="9" text-anchor="middle">{} {}</text>"#,
            tx(cx),
            ty(cy),
            tile.ty,
            e
        )
        .unwrap();
    }
    for p in &d.tiling.members[..d.tiling.core_members] {
        let (x, y) = p.to_f64();
        writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#, tx(x), ty(y)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
