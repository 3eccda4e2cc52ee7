use std::fmt::Write;

use serde_json::{json, Value};

use super::{TileType, Tiling};

const FILL: [&str; 8] = ["#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4", "#46f0f0", "#f032e6"];

/// `{d, tiles: [{type, iso, shift, corners, corner_ids, neighbors}], members, stats}`.
pub fn tiling_json(t: &Tiling) -> Value {
    let tiles: Vec<Value> = t
        .tiles
        .iter()
        .map(|tile| {
            json!({
                "type": tile.ty.name(),
                "iso": {"rot": tile.placement.iso.rot, "reflect": tile.placement.iso.reflect},
                "shift": [tile.placement.shift.a, tile.placement.shift.b],
                "corners": tile.corners.iter().map(|p| [p.a, p.b]).collect::<Vec<_>>(),
                "corner_ids": tile.corner_ids,
                "neighbors": tile.neighbors,
            })
        })
        .collect();
    let counts: serde_json::Map<String, Value> =
        TileType::ALL.iter().map(|&ty| (ty.name().to_string(), json!(t.count(ty)))).collect();
    json!({
        "d": t.d,
        "tiles": tiles,
        "tile_counts": counts,
        "members": t.members.iter().map(|p| [p.a, p.b]).collect::<Vec<_>>(),
        "core_members": t.core_members,
        "deleted_pairs": t.stats.deleted_pairs,
        "double_faces": t.stats.double_faces,
    })
}

/// Tiles filled by type over the core points; I-vertices drawn solid.
pub fn tiling_svg(t: &Tiling) -> String {
    let r = t.d as f64 + 3.5;
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
    for tile in &t.tiles {
        let pts: Vec<String> = tile
            .corners
            .iter()
            .map(|p| {
                let (x, y) = p.to_f64();
                format!("{:.2},{:.2}", tx(x), ty(y))
            })
            .collect();
        writeln!(
            s,
            r##"<polygon points="{}" fill="{}" fill-opacity="0.45" stroke="#333" stroke-width="1"><title>{}</title></polygon>"##,
            pts.join(" "),
            FILL[tile.ty.index()],
            tile.ty
        )
        .unwrap();
    }
    let d2 = (t.d as i64) * (t.d as i64);
    for p in crate::lattice::disk(t.d as i64) {
        let (x, y) = p.to_f64();
        let member = t.members[..t.core_members].contains(&p);
        let (rad, fill) = if member { (4.5, "#000") } else { (2.0, "#999") };
        writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="{rad}" fill="{fill}"/>"#, tx(x), ty(y)).unwrap();
        debug_assert!(p.norm2() <= d2);
    }
    s.push_str("</svg>\n");
    s
}
