//! Re-derivation of the tile shapes from the neighborhood of one corner.
//!
//! Corner `w` is at the origin and `w0` is its neighbor along `e1`. The face of the plane
//! graph containing the segment `w w0` in its interior is determined by which of the named
//! points around it are in I; we enumerate every assignment allowed by independence and
//! maximality and classify the resulting face.

use std::collections::BTreeSet;

use serde::Serialize;

use super::engine::{contact, offset_index, Contact};
use super::template::{locate, TileType};
use super::{classify_tile, Placement};
use crate::lattice::{lp, LatticePoint, UNIT};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct NamedPoint {
    pub name: &'static str,
    pub at: LatticePoint,
}

const fn np(name: &'static str, a: i64, b: i64) -> NamedPoint {
    NamedPoint { name, at: lp(a, b) }
}

pub const W: NamedPoint = np("w", 0, 0);
pub const W5: NamedPoint = np("w5", 2, 0);

/// Points whose membership is enumerated. `w11'` and `w12'` mirror `w11` and `w12` across the
/// `w w5` axis; with them the neighborhood of `w4` is fully named.
pub const FREE: [NamedPoint; 13] = [
    np("w1", 0, 2),
    np("w2", 1, 2),
    np("w3", 1, 1),
    np("w4", 2, 1),
    np("w6", 3, -1),
    np("w7", 2, -1),
    np("w8", 3, -2),
    np("w9", 2, -2),
    np("w10", 3, 0),
    np("w11", 4, -1),
    np("w12", 4, -2),
    np("w11'", 3, 1),
    np("w12'", 2, 2),
];

const A: [usize; 4] = [0, 1, 2, 3];
const B: [usize; 4] = [4, 5, 6, 7];

#[derive(Clone, Debug, Serialize)]
pub struct LocalCase {
    pub members: Vec<&'static str>,
    pub tile: Option<TileType>,
    pub corners: Vec<LatticePoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalCaseReport {
    pub cases: Vec<LocalCase>,
    pub unresolved: usize,
    pub types: BTreeSet<TileType>,
}

const PROBE_SCALE: i64 = 60;

fn adjacent(p: LatticePoint, q: LatticePoint) -> bool {
    (p - q).norm2() == 1
}

/// Bounded face of the plane graph on `pts` (length < 3, crossing pairs deleted) whose
/// interior contains the point `probe / PROBE_SCALE`.
fn face_containing(pts: &[LatticePoint], probe: LatticePoint) -> Option<Vec<LatticePoint>> {
    let mut segs: Vec<(usize, usize)> = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if matches!((pts[i] - pts[j]).norm2(), 3 | 4 | 7) {
                segs.push((i, j));
            }
        }
    }
    let mut dead = vec![false; segs.len()];
    for x in 0..segs.len() {
        for y in x + 1..segs.len() {
            let (a, b) = segs[x];
            let (c, d) = segs[y];
            if contact(pts[a], pts[b], pts[c], pts[d]) == Some(Contact::Cross) {
                dead[x] = true;
                dead[y] = true;
            }
        }
    }
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); pts.len()];
    for (_, &(i, j)) in segs.iter().enumerate().filter(|(s, _)| !dead[*s]) {
        out[i].push((offset_index(pts[j] - pts[i]).unwrap(), j));
        out[j].push((offset_index(pts[i] - pts[j]).unwrap(), i));
    }
    for o in &mut out {
        o.sort_unstable();
    }
    let next = |v: usize, from: usize| -> usize {
        // Neighbor of `v` immediately clockwise from the direction back to `from`.
        let back = offset_index(pts[from] - pts[v]).unwrap();
        let o = &out[v];
        let pos = o.iter().position(|&(k, _)| k == back).unwrap();
        o[(pos + o.len() - 1) % o.len()].1
    };
    for u in 0..pts.len() {
        for &(_, v) in &out[u] {
            let mut face = Vec::new();
            let (mut a, mut b) = (u, v);
            loop {
                face.push(pts[a]);
                let c = next(b, a);
                a = b;
                b = c;
                if (a == u && b == v) || face.len() > 12 {
                    break;
                }
            }
            if face.len() > 12 || super::template::signed_area2(&face) <= 0 {
                continue;
            }
            let scaled: Vec<LatticePoint> = face.iter().map(|p| p.scale(PROBE_SCALE)).collect();
            if locate(&scaled, probe) == 1 {
                return Some(face);
            }
        }
    }
    None
}

/// All assignments of the free named points consistent with the constraints around `w w0`.
pub fn local_case_report() -> LocalCaseReport {
    let w_nbrs: Vec<LatticePoint> = UNIT.to_vec();
    let mut cases = Vec::new();
    let mut unresolved = 0;
    let mut types = BTreeSet::new();
    // Points just above and below the midpoint of w w0.
    let probe_up = lp(PROBE_SCALE / 2, 1);
    let probe_down = lp(PROBE_SCALE / 2 + 1, -1);
    for mask in 0u32..(1 << FREE.len()) {
        let chosen: Vec<NamedPoint> = (0..FREE.len()).filter(|&i| mask >> i & 1 == 1).map(|i| FREE[i]).collect();
        let mut members: Vec<LatticePoint> = vec![W.at];
        members.extend(chosen.iter().map(|n| n.at));
        if members.iter().enumerate().any(|(i, &p)| members[i + 1..].iter().any(|&q| adjacent(p, q))) {
            continue;
        }
        if !A.iter().any(|&i| mask >> i & 1 == 1) || !B.iter().any(|&i| mask >> i & 1 == 1) {
            continue;
        }
        let dominated = |p: LatticePoint| members.iter().any(|&m| m == p || adjacent(m, p));
        // Maximality around the points whose whole neighborhood is named.
        let closed = [FREE[2].at, FREE[3].at, W5.at, FREE[4].at, FREE[5].at];
        if !closed.iter().all(|&p| dominated(p)) {
            continue;
        }
        debug_assert!(w_nbrs.iter().all(|&u| !members.contains(&u)));
        let face = face_containing(&members, probe_up);
        let other = face_containing(&members, probe_down);
        let tile = match (&face, &other) {
            (Some(f), Some(g)) if same_polygon(f, g) => classify_tile(f).ok().map(|(t, _): (TileType, Placement)| t),
            _ => None,
        };
        match tile {
            Some(t) => {
                types.insert(t);
            }
            None => unresolved += 1,
        }
        cases.push(LocalCase {
            members: chosen.iter().map(|n| n.name).collect(),
            tile,
            corners: face.unwrap_or_default(),
        });
    }
    // No lattice edge at any corner lies inside the face: every side has length 2 and every
    // angle is 60°, the side-2 triangle.
    if let Ok((t, _)) = classify_tile(&[lp(0, 0), lp(2, 0), lp(0, 2)]) {
        types.insert(t);
    }
    LocalCaseReport {
        cases,
        unresolved,
        types,
    }
}

fn same_polygon(f: &[LatticePoint], g: &[LatticePoint]) -> bool {
    let mut a = f.to_vec();
    let mut b = g.to_vec();
    a.sort();
    b.sort();
    a == b
}

/// Union of tile types over all local cases.
pub fn enumerate_local_cases() -> BTreeSet<TileType> {
    local_case_report().types
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tile_for(names: &[&str]) -> Vec<Option<TileType>> {
        local_case_report()
            .cases
            .into_iter()
            .filter(|c| names.iter().all(|n| c.members.contains(n)))
            .map(|c| c.tile)
            .collect()
    }

    #[test]
    fn union_is_all_eight() {
        let r = local_case_report();
        assert_eq!(r.unresolved, 0);
        assert_eq!(r.types, TileType::ALL.iter().copied().collect());
    }

    #[test]
    fn named_cases() {
        assert!(tile_for(&["w3", "w7"]).iter().all(|&t| t == Some(TileType::T1)));
        assert!(tile_for(&["w4", "w8"]).iter().all(|&t| t == Some(TileType::T5)));
        assert!(tile_for(&["w3", "w6", "w9"]).iter().all(|&t| t == Some(TileType::T6)));
        assert!(tile_for(&["w4", "w9", "w11"]).iter().all(|&t| t == Some(TileType::T7)));
    }
}
