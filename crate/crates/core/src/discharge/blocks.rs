//! Spindle blocks of T2 and T6 tiles and the exhaustive check of the block claims.
//!
//! A block is a run of parallel spindles hanging off one tile. Its coordinates are kept as
//! data (`FIVE_BLOCK`, `SIX_BLOCK`) and placed by lattice isometries; the check enumerates
//! every independent pattern of the block's spindle vertices in a real G'_d.

use serde::Serialize;

use crate::lattice::{lp, Iso, LatticePoint, Placement, SQRT3, UNIT};
use crate::tiling::{Tile, TileType};
use crate::udgraph::{build_spindled, SpindleMode, UDGraph};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    FiveBlock,
    SixBlock,
}

/// One block of an actual tile.
#[derive(Clone, Debug, Serialize)]
pub struct SpindleBlock {
    pub kind: BlockKind,
    pub tile: usize,
    /// Template side the block belongs to (the T2 side spanned by S1, S5; the T6 short side
    /// holding the bottoms of S5, S6).
    pub side: usize,
    /// Index into `SQRT3` shared by every spindle of the block.
    pub direction: usize,
    /// Bottom vertices, S1 first.
    pub bottoms: Vec<LatticePoint>,
    /// Spindle ids, `None` where the spindle is cut off by the core boundary.
    pub spindles: Vec<Option<usize>>,
}

/// Coordinate template of a block: corners of the tile (all in I), bottoms S1.. in order,
/// and the common direction.
#[derive(Clone, Debug, Serialize)]
pub struct BlockTemplate {
    pub kind: BlockKind,
    pub corners: Vec<LatticePoint>,
    pub bottoms: Vec<LatticePoint>,
    pub direction: LatticePoint,
}

/// T2 with corners P, Q, R; the block spans side PQ and points at R.
pub fn five_block_template() -> BlockTemplate {
    let (p, q, r) = (lp(0, 0), lp(2, 0), lp(0, 2));
    BlockTemplate {
        kind: BlockKind::FiveBlock,
        corners: vec![p, q, r],
        bottoms: five_bottoms(p, q, r),
        direction: r - mid(p, q),
    }
}

/// T6 with short side P = (3,1), Q = (4,−1) and far corner X = (1,1).
pub fn six_block_template() -> BlockTemplate {
    let corners = vec![lp(1, 1), lp(3, 1), lp(4, -1), lp(2, -1)];
    let (x, y) = (lp(1, 1), lp(3, 0));
    BlockTemplate {
        kind: BlockKind::SixBlock,
        bottoms: six_bottoms(x, y, lp(3, 1), lp(4, -1)),
        direction: y - x,
        corners,
    }
}

fn mid(p: LatticePoint, q: LatticePoint) -> LatticePoint {
    let h = q - p;
    debug_assert!(h.a % 2 == 0 && h.b % 2 == 0);
    p + lp(h.a / 2, h.b / 2)
}

fn five_bottoms(p: LatticePoint, q: LatticePoint, r: LatticePoint) -> Vec<LatticePoint> {
    vec![p, mid(p, r), mid(p, q), mid(q, r), q]
}

/// S1 = X, S2 and S3 the common neighbors of X and Y, S4 = Y, then S5 and S6 on the short
/// side. S6 is the one whose top sits at distance √3 from both short-side corners.
fn six_bottoms(x: LatticePoint, y: LatticePoint, p: LatticePoint, q: LatticePoint) -> Vec<LatticePoint> {
    let delta = y - x;
    let mut common: Vec<LatticePoint> = UNIT.iter().map(|&u| x + u).filter(|&c| (y - c).norm2() == 1).collect();
    common.sort_by_key(|c| delta.cross(*c - x));
    let apex = |b: LatticePoint| {
        let t = b + delta;
        (t - p).norm2() == 3 && (t - q).norm2() == 3
    };
    let (s5, s6) = if apex(p) { (q, p) } else { (p, q) };
    debug_assert!(apex(s6) && !apex(s5));
    vec![x, common[0], common[1], y, s5, s6]
}

/// Blocks of a placed T2 or T6 tile.
pub fn tile_blocks(g: &UDGraph, index: usize, tile: &Tile) -> Vec<SpindleBlock> {
    let c = &tile.corners;
    let n = c.len();
    let mut out = Vec::new();
    let mut push = |kind, side, bottoms: Vec<LatticePoint>, delta: LatticePoint| {
        let direction = delta.sqrt3_index().expect("block direction has length √3");
        out.push(SpindleBlock {
            kind,
            tile: index,
            side,
            direction,
            spindles: bottoms.iter().map(|&b| g.spindle_at(b, direction)).collect(),
            bottoms,
        });
    };
    match tile.ty {
        TileType::T2 => {
            for j in 0..3 {
                let (p, q, r) = (c[j], c[(j + 1) % 3], c[(j + 2) % 3]);
                push(BlockKind::FiveBlock, j, five_bottoms(p, q, r), r - mid(p, q));
            }
        }
        TileType::T6 => {
            let interior = tile.interior();
            for j in 0..n {
                let (p, q) = (c[j], c[(j + 1) % n]);
                if (q - p).norm2() != 3 {
                    continue;
                }
                let y = *interior
                    .iter()
                    .find(|&&y| (y - p).norm2() == 1 && (y - q).norm2() == 1)
                    .expect("T6 has an interior point next to each short side");
                for x in [c[(j + 2) % n], c[(j + 3) % n]] {
                    push(BlockKind::SixBlock, j, six_bottoms(x, y, p, q), y - x);
                }
            }
        }
        _ => {}
    }
    out
}

/// Outcome of enumerating one placed block.
#[derive(Clone, Debug, Serialize)]
pub struct BlockCase {
    pub kind: BlockKind,
    pub iso: Iso,
    /// Spindle vertices plus free core points.
    pub free_vertices: usize,
    pub patterns: u64,
    pub counterexamples: u64,
    /// Patterns where S2, S3, S4 are all present although the proof's premise holds.
    pub premise_counterexamples: u64,
    pub min_missing: usize,
    pub max_trivial: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockClaimReport {
    pub five: BlockTemplate,
    pub six: BlockTemplate,
    pub cases: Vec<BlockCase>,
    pub claim4_counterexamples: u64,
    pub claim5a_counterexamples: u64,
    pub patterns: u64,
}

impl BlockClaimReport {
    pub fn passed(&self) -> bool {
        self.claim4_counterexamples == 0
            && self.claim5a_counterexamples == 0
            && self.cases.iter().all(|c| c.premise_counterexamples == 0)
            && self.cases.len() == 24
    }
}

const HOST_D: u32 = 7;

/// Enumerates every independent pattern of every block template under all 12 isometries.
pub fn verify_block_claims() -> BlockClaimReport {
    let g = build_spindled(HOST_D, SpindleMode::SixDirections);
    let five = five_block_template();
    let six = six_block_template();
    let mut cases = Vec::new();
    for t in [&five, &six] {
        for iso in Iso::all() {
            cases.push(enumerate_block(&g, t, iso));
        }
    }
    let sum = |k: BlockKind| cases.iter().filter(|c| c.kind == k).map(|c| c.counterexamples).sum();
    BlockClaimReport {
        claim4_counterexamples: sum(BlockKind::FiveBlock),
        claim5a_counterexamples: sum(BlockKind::SixBlock),
        patterns: cases.iter().map(|c| c.patterns).sum(),
        five,
        six,
        cases,
    }
}

fn enumerate_block(g: &UDGraph, t: &BlockTemplate, iso: Iso) -> BlockCase {
    // Centre the template so every spindle of the block lies deep inside the host core.
    let centre = t.corners.iter().fold(lp(0, 0), |a, &p| a + p);
    let shift = lp(-centre.a / t.corners.len() as i64, -centre.b / t.corners.len() as i64);
    let pl = Placement { iso, shift: iso.apply(shift) };
    let corners: Vec<LatticePoint> = t.corners.iter().map(|&p| pl.apply(p)).collect();
    let bottoms: Vec<LatticePoint> = t.bottoms.iter().map(|&p| pl.apply(p)).collect();
    let dir = iso.apply(t.direction).sqrt3_index().unwrap();
    let spindles: Vec<usize> = bottoms
        .iter()
        .map(|&b| g.spindle_at(b, dir).expect("block spindle inside host core"))
        .collect();
    let fixed_in: Vec<usize> = corners.iter().map(|&p| g.lattice_vertex(p).unwrap()).collect();
    let in_fixed = |p: LatticePoint| corners.contains(&p);
    // Free core points: tops of spindles whose bottom is a corner and whose top could join I.
    let mut free: Vec<usize> = spindles.iter().flat_map(|&s| g.spindles()[s].verts).collect();
    let mut trivial_bit: Vec<Option<usize>> = vec![None; spindles.len()];
    for (i, &b) in bottoms.iter().enumerate() {
        let top = b + SQRT3[dir];
        if in_fixed(b) && corners.iter().all(|&c| (c - top).norm2() > 1) && !in_fixed(top) {
            trivial_bit[i] = Some(free.len());
            free.push(g.lattice_vertex(top).unwrap());
        }
        if in_fixed(b) && in_fixed(top) {
            panic!("block spindle with both ends at tile corners");
        }
    }
    let k = free.len();
    let mut adj = vec![0u32; k];
    let mut forbidden = 0u32;
    for i in 0..k {
        for j in 0..k {
            if i != j && g.adjacent(free[i], free[j]) {
                adj[i] |= 1 << j;
            }
        }
        if fixed_in.iter().any(|&f| g.adjacent(f, free[i])) {
            forbidden |= 1 << i;
        }
    }
    let slot_mask: Vec<u32> = (0..spindles.len()).map(|s| 0b111 << (3 * s)).collect();
    let mut case = BlockCase {
        kind: t.kind,
        iso,
        free_vertices: k,
        patterns: 0,
        counterexamples: 0,
        premise_counterexamples: 0,
        min_missing: usize::MAX,
        max_trivial: 0,
    };
    for mask in 0u32..(1 << k) {
        if mask & forbidden != 0 {
            continue;
        }
        if (0..k).any(|i| mask >> i & 1 == 1 && adj[i] & mask != 0) {
            continue;
        }
        case.patterns += 1;
        let trivial: Vec<bool> = trivial_bit.iter().map(|b| b.is_some_and(|b| mask >> b & 1 == 1)).collect();
        let missing: Vec<bool> = (0..spindles.len()).map(|s| !trivial[s] && mask & slot_mask[s] == 0).collect();
        let n_missing = missing.iter().filter(|&&m| m).count();
        let n_trivial = trivial.iter().filter(|&&t| t).count();
        case.min_missing = case.min_missing.min(n_missing);
        case.max_trivial = case.max_trivial.max(n_trivial);
        let middle_missing = missing[1] || missing[2] || missing[3];
        match t.kind {
            BlockKind::FiveBlock => {
                if n_missing == 0 {
                    case.counterexamples += 1;
                }
                if !middle_missing && !missing[0] && !missing[4] {
                    case.premise_counterexamples += 1;
                }
            }
            BlockKind::SixBlock => {
                if n_missing == 0 && n_trivial < 2 {
                    case.counterexamples += 1;
                }
                assert!(!trivial[..4].iter().any(|&t| t));
                let outer_present = (!missing[4] && !trivial[4]) || (!missing[5] && !trivial[5]);
                if !missing[0] && outer_present && !middle_missing {
                    case.premise_counterexamples += 1;
                }
            }
        }
    }
    case
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates_match_their_tiles() {
        let five = five_block_template();
        assert_eq!(crate::tiling::classify_tile(&five.corners).unwrap().0, TileType::T2);
        assert_eq!(five.direction.norm2(), 3);
        let six = six_block_template();
        assert_eq!(crate::tiling::classify_tile(&six.corners).unwrap().0, TileType::T6);
        assert_eq!(six.bottoms, vec![lp(1, 1), lp(2, 0), lp(2, 1), lp(3, 0), lp(4, -1), lp(3, 1)]);
        // S6 tops out at the apex of the T1 on the short side.
        assert_eq!(six.bottoms[5] + six.direction, lp(5, 0));
    }

    #[test]
    fn block_claims_hold_exhaustively() {
        let r = verify_block_claims();
        assert!(r.passed(), "{:?}", r.cases);
        for c in &r.cases {
            match c.kind {
                BlockKind::FiveBlock => {
                    assert_eq!(c.free_vertices, 15);
                    assert!(c.min_missing >= 1);
                    assert_eq!(c.max_trivial, 0);
                }
                BlockKind::SixBlock => {
                    assert_eq!(c.free_vertices, 20);
                    assert!(c.max_trivial <= 2);
                }
            }
        }
    }
}
