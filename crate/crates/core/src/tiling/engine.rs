//! Integer fast path: plane graph on I, crossing deletion, face walk, classification.
//!
//! Everything is indexed by a dense grid over lattice coordinates. Directed segments out of a
//! point are bits of a `u32`, one per offset in `offsets()` (counterclockwise angle order, so
//! the reverse of offset `k` is `k ± 12`).

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::lattice::{angle_cmp, disk, lp, orient, Iso, LatticePoint, Placement, UNIT};

use super::template::{edge_signature_table, orient_template, templates, Oriented, TileType};

/// Extra rings added around `C_d` before the greedy extension of I.
pub const EXTENSION_MARGIN: i64 = 7;
/// Faces are walked from segments whose tail is within `d + WALK_MARGIN` of the origin.
pub const WALK_MARGIN: i64 = 2;

const NONE: u32 = u32::MAX;

/// The 24 segment vectors of squared length 3, 4 or 7, counterclockwise from angle 0.
pub fn offsets() -> &'static [LatticePoint; 24] {
    static O: OnceLock<[LatticePoint; 24]> = OnceLock::new();
    O.get_or_init(|| {
        let mut v: Vec<LatticePoint> = (-3..=3)
            .flat_map(|b| (-3..=3).map(move |a| lp(a, b)))
            .filter(|p| matches!(p.norm2(), 3 | 4 | 7))
            .collect();
        v.sort_by(|&x, &y| angle_cmp(x, y));
        v.try_into().expect("24 offsets")
    })
}

pub fn offset_index(v: LatticePoint) -> Option<usize> {
    offsets().iter().position(|&o| o == v)
}

fn rev(k: usize) -> usize {
    (k + 12) % 24
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Contact {
    Cross,
    /// Collinear overlap or an endpoint in the relative interior of the other segment.
    Touch,
}

/// Segments `(r, r + O[kk])` with `kk < 12` that meet `(0, O[k])` other than at a shared endpoint.
pub(crate) fn contact_table() -> &'static [Vec<(LatticePoint, usize, Contact)>; 24] {
    static T: OnceLock<[Vec<(LatticePoint, usize, Contact)>; 24]> = OnceLock::new();
    T.get_or_init(|| {
        let o = offsets();
        std::array::from_fn(|k| {
            let (p1, p2) = (lp(0, 0), o[k]);
            let mut out = Vec::new();
            for b in -6..=6 {
                for a in -6..=6 {
                    let r = lp(a, b);
                    for (kk, &ok) in o.iter().enumerate().take(12) {
                        let (q1, q2) = (r, r + ok);
                        if let Some(c) = contact(p1, p2, q1, q2) {
                            out.push((r, kk, c));
                        }
                    }
                }
            }
            out
        })
    })
}

fn on_segment(p: LatticePoint, a: LatticePoint, b: LatticePoint) -> bool {
    orient(a, b, p) == 0
        && p.a >= a.a.min(b.a)
        && p.a <= a.a.max(b.a)
        && p.b >= a.b.min(b.b)
        && p.b <= a.b.max(b.b)
}

pub(crate) fn contact(p1: LatticePoint, p2: LatticePoint, q1: LatticePoint, q2: LatticePoint) -> Option<Contact> {
    if (p1 == q1 && p2 == q2) || (p1 == q2 && p2 == q1) {
        return None;
    }
    let (d1, d2) = (orient(p1, p2, q1), orient(p1, p2, q2));
    let (d3, d4) = (orient(q1, q2, p1), orient(q1, q2, p2));
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return Some(Contact::Cross);
    }
    let touches = |x: LatticePoint, a: LatticePoint, b: LatticePoint| x != a && x != b && on_segment(x, a, b);
    if touches(q1, p1, p2) || touches(q2, p1, p2) || touches(p1, q1, q2) || touches(p2, q1, q2) {
        return Some(Contact::Touch);
    }
    None
}

/// Tile found by one face walk: corners in template order.
#[derive(Clone, Debug)]
pub(crate) struct RawTile {
    pub ty: TileType,
    pub placement: Placement,
    /// Grid indices of the walked corners, counterclockwise.
    pub walk: [u32; 4],
    pub n: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub tiles: usize,
    pub per_type: [u32; 8],
    pub deleted_pairs: u32,
    pub double_faces: u32,
    pub extended: u32,
    pub members: u32,
}

pub struct TilingEngine {
    d: u32,
    half: i64,
    width: i64,
    /// Grid index to region index, or NONE.
    region_of: Vec<u32>,
    region: Vec<u32>,
    in_core: Vec<bool>,
    walk_from: Vec<bool>,
    /// `face_in_core[2·g + up]` for the unit triangle with base at grid index `g`.
    face_in_core: Vec<bool>,
    core_faces: Vec<u32>,
    step: [isize; 24],
    unit_step: [isize; 6],
    contacts: [Vec<(isize, usize, Contact)>; 24],
    shapes: HashMap<u32, (TileType, usize, usize)>,
    oriented: Vec<Oriented>,
    oriented_faces: Vec<Vec<(isize, bool)>>,
    oriented_interior: Vec<Vec<isize>>,
}

/// Per-run buffers; reuse one per thread.
pub struct Scratch {
    in_i: Vec<bool>,
    members: Vec<u32>,
    alive: Vec<u32>,
    kill: Vec<u32>,
    visited: Vec<u32>,
    mult: Vec<u8>,
    pub(crate) tiles: Vec<RawTile>,
    pub(crate) stats: RunStats,
}

fn shape_index(ty: TileType, iso: Iso) -> usize {
    ty.index() * 12 + iso.rot as usize + if iso.reflect { 6 } else { 0 }
}

fn iso_of(i: usize) -> Iso {
    Iso {
        rot: (i % 6) as u8,
        reflect: i >= 6,
    }
}

impl TilingEngine {
    pub fn new(d: u32) -> Self {
        let r = d as i64 + EXTENSION_MARGIN;
        let half = 2 * r + 12;
        let width = 2 * half + 1;
        let size = (width * width) as usize;
        let gi = |p: LatticePoint| ((p.b + half) * width + (p.a + half)) as usize;
        let delta = |p: LatticePoint| (p.b * width + p.a) as isize;
        let mut region_of = vec![NONE; size];
        let mut region = Vec::new();
        let mut in_core = vec![false; size];
        let mut walk_from = vec![false; size];
        let dd = d as i64;
        for p in disk(r) {
            region_of[gi(p)] = region.len() as u32;
            region.push(gi(p) as u32);
            in_core[gi(p)] = p.norm2() <= dd * dd;
            walk_from[gi(p)] = p.norm2() <= (dd + WALK_MARGIN) * (dd + WALK_MARGIN);
        }
        let mut face_in_core = vec![false; 2 * size];
        let mut core_faces = Vec::new();
        for p in disk(dd) {
            for up in [true, false] {
                let f = super::template::FaceKey { base: p, up };
                if f.vertices().iter().all(|v| v.norm2() <= dd * dd) {
                    let id = 2 * gi(p) + usize::from(up);
                    face_in_core[id] = true;
                    core_faces.push(id as u32);
                }
            }
        }
        let o = offsets();
        let step = std::array::from_fn(|k| delta(o[k]));
        let unit_step = std::array::from_fn(|k| delta(UNIT[k]));
        let contacts = std::array::from_fn(|k| {
            contact_table()[k]
                .iter()
                .map(|&(r, kk, c)| (delta(r), kk, c))
                .collect()
        });
        let mut shapes = HashMap::new();
        for (sig, &(ty, iso, s)) in edge_signature_table() {
            let key = sig
                .iter()
                .enumerate()
                .fold(sig.len() as u32, |acc, (i, &v)| {
                    acc | (offset_index(v).expect("template sides are segment offsets") as u32) << (3 + 5 * i)
                });
            shapes.insert(key, (ty, shape_index(ty, iso), s));
        }
        let mut oriented = Vec::with_capacity(96);
        for t in templates() {
            for i in 0..12 {
                oriented.push(orient_template(t, iso_of(i)));
            }
        }
        let oriented_faces = oriented
            .iter()
            .map(|o| o.faces.iter().map(|f| (delta(f.base), f.up)).collect())
            .collect();
        let oriented_interior = oriented
            .iter()
            .map(|o| o.interior.iter().map(|&p| delta(p)).collect())
            .collect();
        TilingEngine {
            d,
            half,
            width,
            region_of,
            region,
            in_core,
            walk_from,
            face_in_core,
            core_faces,
            step,
            unit_step,
            contacts,
            shapes,
            oriented,
            oriented_faces,
            oriented_interior,
        }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub(crate) fn grid(&self, p: LatticePoint) -> Option<usize> {
        if p.a.abs() > self.half || p.b.abs() > self.half {
            return None;
        }
        Some(((p.b + self.half) * self.width + (p.a + self.half)) as usize)
    }

    pub(crate) fn point(&self, g: usize) -> LatticePoint {
        let g = g as i64;
        lp(g % self.width - self.half, g / self.width - self.half)
    }

    pub fn scratch(&self) -> Scratch {
        let size = self.region_of.len();
        Scratch {
            in_i: vec![false; size],
            members: Vec::new(),
            alive: vec![0; size],
            kill: vec![0; size],
            visited: vec![0; size],
            mult: vec![0; 2 * size],
            tiles: Vec::new(),
            stats: RunStats::default(),
        }
    }

    fn reset(&self, s: &mut Scratch) {
        for &g in &s.members {
            let g = g as usize;
            s.in_i[g] = false;
            s.alive[g] = 0;
            s.kill[g] = 0;
            s.visited[g] = 0;
        }
        s.members.clear();
        s.tiles.clear();
        s.stats = RunStats::default();
    }

    fn add(&self, s: &mut Scratch, g: usize) {
        s.in_i[g] = true;
        s.members.push(g as u32);
    }

    fn dominated(&self, s: &Scratch, g: usize) -> bool {
        s.in_i[g] || self.unit_step.iter().any(|&st| s.in_i[(g as isize + st) as usize])
    }

    /// Tiles `core_members` (a maximal independent subset of `C_d`). The result stays in `s`.
    pub fn run(&self, s: &mut Scratch, core_members: impl IntoIterator<Item = LatticePoint>) -> Result<RunStats> {
        self.reset(s);
        for p in core_members {
            let g = self
                .grid(p)
                .filter(|&g| self.in_core[g])
                .ok_or_else(|| Error::Invalid(format!("({}, {}) is not in the core", p.a, p.b)))?;
            if s.in_i[g] {
                continue;
            }
            self.add(s, g);
        }
        for i in 0..s.members.len() {
            let g = s.members[i] as usize;
            if self.unit_step.iter().any(|&st| s.in_i[(g as isize + st) as usize]) {
                let p = self.point(g);
                return Err(Error::Invalid(format!("I is not independent at ({}, {})", p.a, p.b)));
            }
        }
        let core_size = s.members.len();
        for &g in &self.region {
            let g = g as usize;
            if self.in_core[g] {
                if !self.dominated(s, g) {
                    let p = self.point(g);
                    return Err(Error::Invalid(format!("I is not maximal in the core at ({}, {})", p.a, p.b)));
                }
            } else if !self.dominated(s, g) {
                self.add(s, g);
            }
        }
        s.stats.members = s.members.len() as u32;
        s.stats.extended = (s.members.len() - core_size) as u32;
        self.segments(s)?;
        self.faces(s)?;
        Ok(s.stats)
    }

    fn segments(&self, s: &mut Scratch) -> Result<()> {
        for &g in &s.members {
            let g = g as usize;
            let mut m = 0u32;
            for (k, &st) in self.step.iter().enumerate() {
                let q = (g as isize + st) as usize;
                if s.in_i[q] {
                    m |= 1 << k;
                }
            }
            s.alive[g] = m;
        }
        let mut pairs = 0u32;
        for i in 0..s.members.len() {
            let g = s.members[i] as usize;
            let mut m = s.alive[g] & 0xfff;
            while m != 0 {
                let k = m.trailing_zeros() as usize;
                m &= m - 1;
                for &(dr, kk, c) in &self.contacts[k] {
                    let h = (g as isize + dr) as usize;
                    if !s.in_i[h] || s.alive[h] & (1 << kk) == 0 {
                        continue;
                    }
                    if c == Contact::Touch {
                        let (p, q) = (self.point(g), self.point(h));
                        return Err(Error::Tiling(format!(
                            "segments from ({}, {}) and ({}, {}) overlap or touch",
                            p.a, p.b, q.a, q.b
                        )));
                    }
                    pairs += 1;
                    s.kill[g] |= 1 << k;
                    s.kill[(g as isize + self.step[k]) as usize] |= 1 << rev(k);
                }
            }
        }
        for &g in &s.members {
            let g = g as usize;
            s.alive[g] &= !s.kill[g];
        }
        s.stats.deleted_pairs = pairs / 2;
        Ok(())
    }

    fn faces(&self, s: &mut Scratch) -> Result<()> {
        for i in 0..s.members.len() {
            let g0 = s.members[i] as usize;
            if !self.walk_from[g0] {
                continue;
            }
            loop {
                let todo = s.alive[g0] & !s.visited[g0];
                if todo == 0 {
                    break;
                }
                let k0 = todo.trailing_zeros() as usize;
                self.walk(s, g0, k0)?;
            }
        }
        for &f in &self.core_faces {
            let f = f as usize;
            let m = s.mult[f];
            s.mult[f] = 0;
            if m == 2 {
                s.stats.double_faces += 1;
            } else if m != 1 {
                for &f in &self.core_faces {
                    s.mult[f as usize] = 0;
                }
                let p = self.point(f / 2);
                return Err(Error::Tiling(format!(
                    "{} face at ({}, {}) is covered {m} times",
                    if f % 2 == 1 { "up" } else { "down" },
                    p.a,
                    p.b
                )));
            }
        }
        s.stats.tiles = s.tiles.len();
        Ok(())
    }

    fn walk(&self, s: &mut Scratch, g0: usize, k0: usize) -> Result<()> {
        let mut corners = [0u32; 12];
        let mut key = 0u32;
        let mut n = 0usize;
        let (mut g, mut k) = (g0, k0);
        loop {
            if n == 12 {
                break;
            }
            corners[n] = g as u32;
            if n < 4 {
                key |= (k as u32) << (3 + 5 * n);
            }
            n += 1;
            s.visited[g] |= 1 << k;
            let q = (g as isize + self.step[k]) as usize;
            let back = rev(k);
            let m = s.alive[q];
            let mut j = back;
            for t in 1..=24 {
                j = (back + 24 - t) % 24;
                if m & (1 << j) != 0 {
                    break;
                }
            }
            g = q;
            k = j;
            if g == g0 && k == k0 {
                break;
            }
        }
        let hit = if n <= 4 { self.shapes.get(&(key | n as u32)) } else { None };
        let Some(&(ty, shape, start)) = hit else {
            let pts = corners[..n].iter().map(|&c| {
                let p = self.point(c as usize);
                (p.a, p.b)
            });
            return Err(Error::Unclassifiable { corners: pts.collect() });
        };
        let o = &self.oriented[shape];
        let iso = iso_of(shape % 12);
        let shift = self.point(g0) - o.corners[start];
        let base = g0 as isize - (o.corners[start].b * self.width + o.corners[start].a) as isize;
        for &di in &self.oriented_interior[shape] {
            if s.in_i[(base + di) as usize] {
                let p = self.point((base + di) as usize);
                return Err(Error::Tiling(format!("I-vertex ({}, {}) inside a {ty} tile", p.a, p.b)));
            }
        }
        for &(df, up) in &self.oriented_faces[shape] {
            let id = 2 * (base + df) as usize + usize::from(up);
            if self.face_in_core[id] {
                s.mult[id] += 1;
            }
        }
        let mut walk = [NONE; 4];
        walk[..n].copy_from_slice(&corners[..n]);
        s.stats.per_type[ty.index()] += 1;
        s.tiles.push(RawTile {
            ty,
            placement: Placement { iso, shift },
            walk,
            n,
        });
        Ok(())
    }

    /// Extended I (core members first, then the added outside points) from the last run.
    pub(crate) fn members(&self, s: &Scratch) -> Vec<LatticePoint> {
        s.members.iter().map(|&g| self.point(g as usize)).collect()
    }

    pub(crate) fn is_core_point(&self, p: LatticePoint) -> bool {
        self.grid(p).is_some_and(|g| self.in_core[g])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::segments_cross;

    #[test]
    fn offsets_are_antipodal() {
        let o = offsets();
        for k in 0..24 {
            assert_eq!(o[rev(k)], -o[k]);
        }
    }

    #[test]
    fn contact_table_matches_exact_predicate() {
        let o = offsets();
        let mut crossings = 0;
        for k in 0..24 {
            for &(r, kk, c) in &contact_table()[k] {
                let exact = segments_cross(
                    (&lp(0, 0).to_point(), &o[k].to_point()),
                    (&r.to_point(), &(r + o[kk]).to_point()),
                );
                match c {
                    Contact::Cross => {
                        crossings += 1;
                        assert_eq!(exact, Ok(true));
                    }
                    Contact::Touch => assert!(!matches!(exact, Ok(true))),
                }
            }
            // Nothing outside the table crosses.
            for b in -6..=6 {
                for a in -6..=6 {
                    for kk in 0..12 {
                        let r = lp(a, b);
                        if contact_table()[k].iter().any(|&(r2, k2, _)| r2 == r && k2 == kk) {
                            continue;
                        }
                        let same = (r == lp(0, 0) && o[kk] == o[k]) || (r == o[k] && o[kk] == -o[k]);
                        if same {
                            continue;
                        }
                        let exact = segments_cross(
                            (&lp(0, 0).to_point(), &o[k].to_point()),
                            (&r.to_point(), &(r + o[kk]).to_point()),
                        );
                        assert!(matches!(exact, Ok(false)), "{k} {r:?} {kk}");
                    }
                }
            }
        }
        assert!(crossings > 0);
    }
}
