//! Discharging on spindled lattice cores.
//!
//! `simple` runs the one-phase argument on G_d. The rest of this module runs the
//! three-phase argument on G'_d: core weight 31/5, spindle-vertex weight 1/2, charge moved
//! between core vertices, spindles and tiles by rules R1–R6, with every claim about the
//! resulting charges checked on each run.

mod blocks;
mod bound;
mod report;
mod simple;

use std::collections::HashMap;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::Result;
use crate::indsets::{sample_maximal_core_set, sample_rng, BitGraph, CoreSets, Scope};
use crate::lattice::{LatticePoint, SQRT3, UNIT};
use crate::par::{self, Exec};
use crate::tiling::{tile_points, Tiling, TilingEngine, TileType};
use crate::udgraph::{build_spindled, SpindleMode, UDGraph};

pub use blocks::{
    five_block_template, six_block_template, tile_blocks, verify_block_claims, BlockCase, BlockClaimReport,
    BlockKind, BlockTemplate, SpindleBlock,
};
pub use bound::{compute_bound, finite_cap, mwis_oracle, BoundReport, OracleReport, ASYMPTOTIC_BOUND};
pub use report::{report_csv, report_json, run_svg};
pub use simple::{simple_discharge, verify_simple, SimpleCase, SimpleOutcome, SimpleReport, CASE_LINES};

/// Exact charge. Every denominator that arises divides 360.
pub type Q = Ratio<i64>;

pub(crate) fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub const CORE_WEIGHT: (i64, i64) = (31, 5);
pub const SPINDLE_WEIGHT: (i64, i64) = (1, 2);
/// Per-share target of a tile.
pub const TARGET: (i64, i64) = (21, 5);

/// Upper bounds on tile excess after phase 1, T1..T8.
pub const CLAIM1: [(i64, i64); 8] = [(-1, 5), (7, 10), (-3, 10), (3, 5), (2, 5), (2, 5), (0, 1), (0, 1)];
/// Upper bounds after phase 2.
pub const CLAIM2: [(i64, i64); 8] = [(0, 1), (7, 10), (0, 1), (0, 1), (0, 1), (2, 5), (0, 1), (0, 1)];

pub fn claim1(ty: TileType) -> Q {
    let (n, d) = CLAIM1[ty.index()];
    q(n, d)
}

pub fn claim2(ty: TileType) -> Q {
    let (n, d) = CLAIM2[ty.index()];
    q(n, d)
}

/// Squared radius around a vertex that must be full for it to count as deep: twice the
/// largest tile diameter (√13, across T7) squared.
pub const DEEP_RADIUS2: i64 = 52;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpindleStatus {
    Trivial,
    Missing,
    Present,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Initial,
    AfterPhase1,
    AfterPhase2,
    AfterPhase3,
}

/// Charges held by core vertices (indexed by vertex id), spindles and tiles.
#[derive(Clone, Debug)]
pub struct ChargeLedger {
    pub phase: Phase,
    pub core: Vec<Q>,
    pub spindle: Vec<Q>,
    pub tile: Vec<Q>,
}

#[derive(Clone, Copy, Debug)]
enum Holder {
    Core(usize),
    Spindle(usize),
    Tile(usize),
}

impl ChargeLedger {
    pub fn total(&self) -> Q {
        let s = |v: &[Q]| v.iter().fold(Q::zero(), |a, &x| a + x);
        s(&self.core) + s(&self.spindle) + s(&self.tile)
    }

    fn slot(&mut self, h: Holder) -> &mut Q {
        match h {
            Holder::Core(v) => &mut self.core[v],
            Holder::Spindle(s) => &mut self.spindle[s],
            Holder::Tile(t) => &mut self.tile[t],
        }
    }

    fn send(&mut self, from: Holder, to: Holder, amount: Q) {
        *self.slot(from) -= amount;
        *self.slot(to) += amount;
    }
}

/// A failed check, with enough context to reconstruct the local configuration.
#[derive(Clone, Debug, Serialize)]
pub struct Falsification {
    pub check: &'static str,
    pub detail: String,
}

/// Immutable per-d data shared by all runs.
pub struct DischargeContext {
    pub d: u32,
    pub graph: UDGraph,
    pub engine: TilingEngine,
    /// Core vertices are `0..core_count`.
    pub core_count: usize,
    pub point: Vec<LatticePoint>,
    /// All six unit neighbors and all six √3-partners are in the core.
    pub full: Vec<bool>,
    pub deep: Vec<bool>,
    pub degree: Vec<usize>,
    /// `cap[v]`: most charge the accounting can leave attributed to core vertex `v`.
    pub cap: Vec<Q>,
    pub total_cap: Q,
    /// Total weight of G'_d.
    pub total_weight: Q,
    spindle_vertices: Vec<usize>,
}

impl DischargeContext {
    pub fn new(d: u32) -> Self {
        let graph = build_spindled(d, SpindleMode::SixDirections);
        let core_count = graph.core_count();
        assert!(graph.core_ids().eq(0..core_count), "core vertices come first");
        let point: Vec<LatticePoint> = (0..core_count).map(|v| graph.vertex(v).lattice.unwrap()).collect();
        let has = |p: LatticePoint| graph.lattice_vertex(p).is_some();
        let full: Vec<bool> = point
            .iter()
            .map(|&p| (0..6).all(|k| has(p + UNIT[k]) && has(p + SQRT3[k])))
            .collect();
        let disk = crate::lattice::disk((DEEP_RADIUS2 as f64).sqrt().ceil() as i64);
        let deep: Vec<bool> = point
            .iter()
            .map(|&p| {
                disk.iter()
                    .filter(|o| o.norm2() <= DEEP_RADIUS2)
                    .all(|&o| graph.lattice_vertex(p + o).is_some_and(|u| full[u]))
            })
            .collect();
        let degree: Vec<usize> = (0..core_count).map(|v| graph.core_degree(v)).collect();
        let cap = bound::vertex_caps(&graph, &full, &deep, &degree);
        let total_cap = cap.iter().fold(Q::zero(), |a, &x| a + x);
        let spindle_vertices: Vec<usize> = (core_count..graph.n()).collect();
        let slots: usize = spindle_vertices.iter().map(|&v| graph.vertex(v).multiplicity).sum();
        let total_weight = q(CORE_WEIGHT.0, CORE_WEIGHT.1) * core_count as i64 + q(SPINDLE_WEIGHT.0, SPINDLE_WEIGHT.1) * slots as i64;
        DischargeContext {
            d,
            engine: TilingEngine::new(d),
            graph,
            core_count,
            point,
            full,
            deep,
            degree,
            cap,
            total_cap,
            total_weight,
            spindle_vertices,
        }
    }

    fn id(&self, p: LatticePoint) -> Option<usize> {
        self.graph.lattice_vertex(p)
    }

    /// Membership vector for a core set extended greedily, in a shuffled order, by spindle
    /// vertices with no neighbor in the set.
    pub fn extend_spindles(&self, core_set: &[usize], rng: &mut impl rand::Rng) -> Vec<bool> {
        let mut in_i = vec![false; self.graph.n()];
        let mut blocked = vec![false; self.graph.n()];
        let mark = |v: usize, in_i: &mut Vec<bool>, blocked: &mut Vec<bool>| {
            in_i[v] = true;
            for &u in self.graph.neighbors(v) {
                blocked[u] = true;
            }
        };
        for &v in core_set {
            mark(v, &mut in_i, &mut blocked);
        }
        let mut order = self.spindle_vertices.clone();
        order.shuffle(rng);
        for v in order {
            if !blocked[v] && !in_i[v] {
                mark(v, &mut in_i, &mut blocked);
            }
        }
        in_i
    }

    /// Membership vector with no spindle vertex in I.
    pub fn core_only(&self, core_set: &[usize]) -> Vec<bool> {
        let mut in_i = vec![false; self.graph.n()];
        for &v in core_set {
            in_i[v] = true;
        }
        in_i
    }
}

/// Where a non-I core vertex sends its charge in R3.
#[derive(Clone, Copy, Debug, Default)]
struct Owners {
    interior: [u32; 2],
    n_interior: u8,
    /// `(tile, j)` with the vertex at `P + UNIT[j]` on the counterclockwise side `P → Q`.
    boundary: [(u32, u8); 2],
    n_boundary: u8,
}

#[derive(Clone, Copy, Debug, Default)]
struct TileInfo {
    /// Twice the number of core shares (interior counts 2, boundary 1).
    shares2: i64,
    complete: bool,
}

/// One run of the three-phase argument.
pub struct Discharge<'a> {
    ctx: &'a DischargeContext,
    pub in_i: Vec<bool>,
    pub tiling: Tiling,
    pub status: Vec<SpindleStatus>,
    pub ledger: ChargeLedger,
    pub blocks: Vec<SpindleBlock>,
    pub events: Vec<Falsification>,
    pub stats: RunOutcome,
    initial: Q,
    recv_i: Vec<Q>,
    recv_sp: Vec<[Q; 6]>,
    owners: Vec<Owners>,
    info: Vec<TileInfo>,
    excess1: Vec<Q>,
}

/// Per-run summary; merged across runs into a `DischargeReport`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunOutcome {
    pub core_size: usize,
    pub spindle_size: usize,
    #[serde(serialize_with = "crate::json::exact")]
    pub weight: Q,
    pub per_type: [u64; 8],
    pub complete_per_type: [u64; 8],
    #[serde(serialize_with = "crate::json::exact")]
    pub phase1_max: [Option<Q>; 8],
    #[serde(serialize_with = "crate::json::exact")]
    pub phase2_max: [Option<Q>; 8],
    #[serde(serialize_with = "crate::json::exact")]
    pub final_max: [Option<Q>; 8],
    #[serde(serialize_with = "crate::json::exact")]
    pub incomplete_final_max: Option<Q>,
    #[serde(serialize_with = "crate::json::exact")]
    pub spindle_max: Option<Q>,
    #[serde(serialize_with = "crate::json::exact")]
    pub spindle_min: Option<Q>,
    pub missing: u64,
    pub trivial: u64,
    pub blocks: [u64; 2],
    pub t1_deficit_without_t6: u64,
    pub r4_without_neighbor: u64,
    pub claim5b_applications: u64,
    pub claim5c_applications: u64,
    pub key_observation_checks: u64,
}

fn max_opt(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn min_opt(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl RunOutcome {
    fn merge(mut self, o: &RunOutcome) -> RunOutcome {
        self.core_size = self.core_size.max(o.core_size);
        self.spindle_size = self.spindle_size.max(o.spindle_size);
        self.weight = self.weight.max(o.weight);
        for k in 0..8 {
            self.per_type[k] += o.per_type[k];
            self.complete_per_type[k] += o.complete_per_type[k];
            self.phase1_max[k] = max_opt(self.phase1_max[k], o.phase1_max[k]);
            self.phase2_max[k] = max_opt(self.phase2_max[k], o.phase2_max[k]);
            self.final_max[k] = max_opt(self.final_max[k], o.final_max[k]);
        }
        self.incomplete_final_max = max_opt(self.incomplete_final_max, o.incomplete_final_max);
        self.spindle_max = max_opt(self.spindle_max, o.spindle_max);
        self.spindle_min = min_opt(self.spindle_min, o.spindle_min);
        self.missing += o.missing;
        self.trivial += o.trivial;
        self.blocks[0] += o.blocks[0];
        self.blocks[1] += o.blocks[1];
        self.t1_deficit_without_t6 += o.t1_deficit_without_t6;
        self.r4_without_neighbor += o.r4_without_neighbor;
        self.claim5b_applications += o.claim5b_applications;
        self.claim5c_applications += o.claim5c_applications;
        self.key_observation_checks += o.key_observation_checks;
        self
    }
}

fn bump(slot: &mut Option<Q>, x: Q) {
    *slot = max_opt(*slot, Some(x));
}

impl<'a> Discharge<'a> {
    /// Tiles the core part of `in_i`, classifies spindles, and places the initial charge.
    pub fn new(ctx: &'a DischargeContext, in_i: Vec<bool>) -> Result<Self> {
        let g = &ctx.graph;
        let nc = ctx.core_count;
        let core_pts: Vec<LatticePoint> = (0..nc).filter(|&v| in_i[v]).map(|v| ctx.point[v]).collect();
        let tiling = tile_points(&ctx.engine, &core_pts)?;
        let cw = q(CORE_WEIGHT.0, CORE_WEIGHT.1);
        let sw = q(SPINDLE_WEIGHT.0, SPINDLE_WEIGHT.1);
        let mut core = vec![Q::zero(); nc];
        for v in 0..nc {
            if in_i[v] {
                core[v] = cw;
            }
        }
        let mut spindle = vec![Q::zero(); g.spindles().len()];
        let mut status = Vec::with_capacity(spindle.len());
        for (s, sp) in g.spindles().iter().enumerate() {
            let mut has = false;
            for &x in &sp.verts {
                if in_i[x] {
                    has = true;
                    // A merged vertex carries one slot weight per spindle it sits in.
                    spindle[s] += sw;
                }
            }
            status.push(if in_i[sp.bottom] && in_i[sp.top] {
                SpindleStatus::Trivial
            } else if has {
                SpindleStatus::Present
            } else {
                SpindleStatus::Missing
            });
        }
        let ledger = ChargeLedger {
            phase: Phase::Initial,
            core,
            spindle,
            tile: vec![Q::zero(); tiling.tiles.len()],
        };
        let initial = ledger.total();
        let mut stats = RunOutcome {
            core_size: core_pts.len(),
            spindle_size: (nc..g.n()).filter(|&v| in_i[v]).count(),
            weight: initial,
            ..RunOutcome::default()
        };
        stats.missing = status.iter().filter(|&&s| s == SpindleStatus::Missing).count() as u64;
        stats.trivial = status.iter().filter(|&&s| s == SpindleStatus::Trivial).count() as u64;
        let mut d = Discharge {
            ctx,
            in_i,
            tiling,
            status,
            ledger,
            blocks: Vec::new(),
            events: Vec::new(),
            stats,
            initial,
            recv_i: vec![Q::zero(); nc],
            recv_sp: vec![[Q::zero(); 6]; nc],
            owners: vec![Owners::default(); nc],
            info: Vec::new(),
            excess1: Vec::new(),
        };
        d.index_tiles();
        Ok(d)
    }

    fn fail(&mut self, check: &'static str, detail: String) {
        if self.events.len() < 64 {
            self.events.push(Falsification { check, detail });
        }
    }

    fn conserve(&mut self, rule: &'static str) {
        let t = self.ledger.total();
        if t != self.initial {
            self.fail("conservation", format!("{rule}: total {t} != {}", self.initial));
        }
    }

    fn index_tiles(&mut self) {
        let ctx = self.ctx;
        let mut info = vec![TileInfo::default(); self.tiling.tiles.len()];
        let mut pts_full = vec![false; self.tiling.tiles.len()];
        for (t, tile) in self.tiling.tiles.iter().enumerate() {
            let interior = tile.interior();
            let boundary = tile.boundary();
            let mut shares2 = 0;
            for &p in &interior {
                if let Some(v) = ctx.id(p) {
                    shares2 += 2;
                    let o = &mut self.owners[v];
                    if (o.n_interior as usize) < 2 {
                        o.interior[o.n_interior as usize] = t as u32;
                    }
                    o.n_interior += 1;
                }
            }
            let cc = tile.ccw_corners();
            let n = cc.len();
            for j in 0..n {
                let (a, b) = (cc[j], cc[(j + 1) % n]);
                let h = b - a;
                if h.norm2() != 4 {
                    continue;
                }
                let u = crate::lattice::lp(h.a / 2, h.b / 2);
                if let Some(v) = ctx.id(a + u) {
                    shares2 += 1;
                    let o = &mut self.owners[v];
                    if (o.n_boundary as usize) < 2 {
                        o.boundary[o.n_boundary as usize] = (t as u32, u.unit_index().unwrap() as u8);
                    }
                    o.n_boundary += 1;
                }
            }
            debug_assert_eq!(boundary.len(), cc.windows(2).chain(std::iter::once(&[cc[n - 1], cc[0]][..])).filter(|w| (w[1] - w[0]).norm2() == 4).count());
            info[t].shares2 = shares2;
            pts_full[t] = tile
                .corners
                .iter()
                .chain(&interior)
                .chain(&boundary)
                .all(|&p| ctx.id(p).is_some_and(|v| ctx.full[v]));
        }
        for (t, tile) in self.tiling.tiles.iter().enumerate() {
            info[t].complete = pts_full[t] && tile.neighbors.iter().all(|nb| nb.is_some_and(|n| pts_full[n]));
        }
        self.info = info;
        for t in 0..self.tiling.tiles.len() {
            let ty = self.tiling.tiles[t].ty;
            self.stats.per_type[ty.index()] += 1;
            if self.info[t].complete {
                self.stats.complete_per_type[ty.index()] += 1;
            }
        }
    }

    pub fn is_complete(&self, t: usize) -> bool {
        self.info[t].complete
    }

    pub fn target(&self, t: usize) -> Q {
        q(TARGET.0, TARGET.1) * self.info[t].shares2 / 2
    }

    pub fn excess(&self, t: usize) -> Q {
        self.ledger.tile[t] - self.target(t)
    }

    fn describe_tile(&self, t: usize) -> String {
        let tile = &self.tiling.tiles[t];
        let nb: Vec<String> = tile
            .neighbors
            .iter()
            .map(|n| n.map_or("-".into(), |n| self.tiling.tiles[n].ty.name().to_string()))
            .collect();
        format!(
            "{} corners {:?} neighbors [{}] charge {} target {}",
            tile.ty,
            tile.corners.iter().map(|p| (p.a, p.b)).collect::<Vec<_>>(),
            nb.join(","),
            self.ledger.tile[t],
            self.target(t)
        )
    }

    /// R1, R2, R3.
    pub fn phase1(&mut self) {
        let ctx = self.ctx;
        let g = &ctx.graph;
        let nc = ctx.core_count;
        let third = q(1, 3);
        // R1
        for v in 0..nc {
            if !self.in_i[v] {
                continue;
            }
            for &u in g.neighbors(v) {
                if u < nc {
                    self.ledger.send(Holder::Core(v), Holder::Core(u), third);
                    self.recv_i[u] += third;
                }
            }
        }
        self.conserve("R1");
        // R2
        let half = q(1, 2);
        let quarter = q(1, 4);
        for (s, sp) in g.spindles().iter().enumerate() {
            if self.status[s] == SpindleStatus::Trivial {
                continue;
            }
            let k = sp.direction;
            let (b, t) = (sp.bottom, sp.top);
            if self.in_i[b] {
                self.ledger.send(Holder::Spindle(s), Holder::Core(t), half);
                self.recv_sp[t][(k + 3) % 6] += half;
            } else if self.in_i[t] {
                self.ledger.send(Holder::Spindle(s), Holder::Core(b), half);
                self.recv_sp[b][k] += half;
            } else {
                self.ledger.send(Holder::Spindle(s), Holder::Core(b), quarter);
                self.ledger.send(Holder::Spindle(s), Holder::Core(t), quarter);
                self.recv_sp[b][k] += quarter;
                self.recv_sp[t][(k + 3) % 6] += quarter;
            }
        }
        self.conserve("R2");
        self.key_observation();
        // I-vertices keep 31/5 minus a third per core neighbor.
        for v in 0..nc {
            if self.in_i[v] {
                let want = q(CORE_WEIGHT.0, CORE_WEIGHT.1) - third * ctx.degree[v] as i64;
                if self.ledger.core[v] != want || (ctx.full[v] && want != q(TARGET.0, TARGET.1)) {
                    let c = self.ledger.core[v];
                    self.fail("retained", format!("I-vertex {:?} holds {c}", ctx.point[v]));
                }
            }
        }
        // R3
        for v in 0..nc {
            if self.in_i[v] {
                continue;
            }
            let got = self.recv_i[v] + self.recv_sp[v].iter().fold(Q::zero(), |a, &x| a + x);
            if got != self.ledger.core[v] {
                self.fail("R3", format!("vertex {:?} holds {} but received {got}", ctx.point[v], self.ledger.core[v]));
            }
            let o = self.owners[v];
            match (o.n_interior, o.n_boundary) {
                (1, 0) => {
                    let amount = self.ledger.core[v];
                    self.ledger.send(Holder::Core(v), Holder::Tile(o.interior[0] as usize), amount);
                }
                (0, 2) => {
                    let (ta, ja) = o.boundary[0];
                    let (tb, jb) = o.boundary[1];
                    let side = UNIT[ja as usize];
                    // Directions 1, 3, 5 steps from the side; the first points straight into the tile.
                    let into = SQRT3[(ja as usize + 1) % 6];
                    if side.cross(into) <= 0 || (ja + 3) % 6 != jb {
                        self.fail("R3", format!("vertex {:?}: sides {ja}/{jb} do not oppose", ctx.point[v]));
                        continue;
                    }
                    let share = |parity: usize, rs: &[Q; 6]| (0..6).filter(|m| m % 2 == parity).fold(Q::zero(), |a, m| a + rs[m]);
                    let rs = self.recv_sp[v];
                    let to_a = self.recv_i[v] / 2 + share((ja as usize + 1) % 2, &rs);
                    let to_b = self.recv_i[v] / 2 + share((jb as usize + 1) % 2, &rs);
                    if to_a + to_b != self.ledger.core[v] {
                        self.fail("R3", format!("vertex {:?}: split {to_a} + {to_b} misses its charge", ctx.point[v]));
                    }
                    self.ledger.send(Holder::Core(v), Holder::Tile(ta as usize), to_a);
                    self.ledger.send(Holder::Core(v), Holder::Tile(tb as usize), to_b);
                }
                (i, b) => {
                    self.fail("R3", format!("vertex {:?} is interior to {i} and on the boundary of {b} tiles", ctx.point[v]));
                }
            }
            if ctx.deep[v] {
                let ts: Vec<usize> = (0..o.n_interior as usize)
                    .map(|k| o.interior[k] as usize)
                    .chain((0..o.n_boundary as usize).map(|k| o.boundary[k].0 as usize))
                    .collect();
                if ts.iter().any(|&t| !self.info[t].complete) {
                    self.fail("deep", format!("deep vertex {:?} lies in an incomplete tile", ctx.point[v]));
                }
            }
        }
        self.conserve("R3");
        self.ledger.phase = Phase::AfterPhase1;
        self.excess1 = (0..self.tiling.tiles.len()).map(|t| self.excess(t)).collect();
        for t in 0..self.tiling.tiles.len() {
            if !self.info[t].complete {
                continue;
            }
            let ty = self.tiling.tiles[t].ty;
            let e = self.excess1[t];
            bump(&mut self.stats.phase1_max[ty.index()], e);
            if e > claim1(ty) {
                let d = self.describe_tile(t);
                self.fail("claim1", format!("excess {e} > {}: {d}", claim1(ty)));
            }
        }
    }

    /// For `v ∉ I` with a core neighbor `u ∈ I`, the two √3-partners of `v` next to `u` are
    /// not in I, and each spindle between `v` and such a partner gives `v` at most 1/4.
    fn key_observation(&mut self) {
        let ctx = self.ctx;
        for v in 0..ctx.core_count {
            if self.in_i[v] {
                continue;
            }
            let p = ctx.point[v];
            for j in 0..6 {
                if !ctx.id(p + UNIT[j]).is_some_and(|u| self.in_i[u]) {
                    continue;
                }
                for m in [(j + 5) % 6, j] {
                    let Some(w) = ctx.id(p + SQRT3[m]) else { continue };
                    self.stats.key_observation_checks += 1;
                    if self.in_i[w] || self.recv_sp[v][m] > q(1, 2) {
                        self.fail("key_observation", format!("vertex {:?}, partner {:?}", p, ctx.point[w]));
                    }
                }
            }
        }
    }

    /// R4 then R5.
    pub fn phase2(&mut self) {
        let tiles = &self.tiling.tiles;
        let r4 = q(3, 10);
        let mut moves = Vec::new();
        for (t, tile) in tiles.iter().enumerate() {
            if tile.ty != TileType::T3 || self.info[t].shares2 == 0 {
                continue;
            }
            let long = tile.template().side_norms().iter().position(|&n| n == 7).unwrap();
            match tile.neighbors[long] {
                Some(n) => moves.push((n, t)),
                None => self.stats.r4_without_neighbor += 1,
            }
        }
        for (from, to) in moves {
            self.ledger.send(Holder::Tile(from), Holder::Tile(to), r4);
        }
        self.conserve("R4");
        let mut moves = Vec::new();
        for (t, tile) in self.tiling.tiles.iter().enumerate() {
            if tile.ty != TileType::T1 {
                continue;
            }
            let e = self.excess(t);
            if !e.is_negative() {
                continue;
            }
            let mut t6: Vec<usize> = tile
                .neighbors
                .iter()
                .flatten()
                .copied()
                .filter(|&n| self.tiling.tiles[n].ty == TileType::T6)
                .collect();
            t6.sort_unstable();
            t6.dedup();
            if t6.is_empty() {
                self.stats.t1_deficit_without_t6 += 1;
                continue;
            }
            let each = -e / t6.len() as i64;
            for n in t6 {
                moves.push((n, t, each));
            }
        }
        for (from, to, amount) in moves {
            self.ledger.send(Holder::Tile(from), Holder::Tile(to), amount);
        }
        self.conserve("R5");
        self.ledger.phase = Phase::AfterPhase2;
        for t in 0..self.tiling.tiles.len() {
            if !self.info[t].complete {
                continue;
            }
            let ty = self.tiling.tiles[t].ty;
            let e = self.excess(t);
            bump(&mut self.stats.phase2_max[ty.index()], e);
            if e > claim2(ty) {
                let d = self.describe_tile(t);
                self.fail("claim2", format!("excess {e} > {}: {d}", claim2(ty)));
            }
        }
    }

    /// R6 and the final checks.
    pub fn phase3(&mut self) {
        let g = &self.ctx.graph;
        self.blocks = self
            .tiling
            .tiles
            .iter()
            .enumerate()
            .flat_map(|(t, tile)| tile_blocks(g, t, tile))
            .collect();
        let mut moves = Vec::new();
        for b in &self.blocks {
            let amount = match b.kind {
                BlockKind::FiveBlock => q(1, 4),
                BlockKind::SixBlock => q(1, 8),
            };
            self.stats.blocks[(b.kind == BlockKind::SixBlock) as usize] += 1;
            for &s in b.spindles.iter().flatten() {
                if self.status[s] == SpindleStatus::Missing {
                    moves.push((b.tile, s, amount));
                }
            }
        }
        for (t, s, amount) in moves {
            self.ledger.send(Holder::Tile(t), Holder::Spindle(s), amount);
        }
        self.conserve("R6");
        self.ledger.phase = Phase::AfterPhase3;
        self.check_blocks();
        for t in 0..self.tiling.tiles.len() {
            let e = self.excess(t);
            if !self.info[t].complete {
                if self.info[t].shares2 > 0 {
                    bump(&mut self.stats.incomplete_final_max, e);
                }
                continue;
            }
            let ty = self.tiling.tiles[t].ty;
            bump(&mut self.stats.final_max[ty.index()], e);
            if e.is_positive() {
                let d = self.describe_tile(t);
                self.fail("claim6", format!("final excess {e}: {d}"));
            }
        }
        for s in 0..self.ledger.spindle.len() {
            let c = self.ledger.spindle[s];
            bump(&mut self.stats.spindle_max, c);
            self.stats.spindle_min = min_opt(self.stats.spindle_min, Some(c));
            if c.is_positive() {
                let sp = &g.spindles()[s];
                let (b, t) = (self.ctx.point[sp.bottom], self.ctx.point[sp.top]);
                self.fail("claim3", format!("spindle {:?}->{:?} ends with {c}", b, t));
            }
        }
        if self.initial > self.ctx.total_cap {
            self.fail("cap", format!("weight {} exceeds the cap {}", self.initial, self.ctx.total_cap));
        }
    }

    /// Claims 4 and 5(a) on every whole block, 5(b) and 5(c) on complete T6 tiles.
    fn check_blocks(&mut self) {
        let mut by_side: HashMap<(usize, usize), Vec<bool>> = HashMap::new();
        let mut events = Vec::new();
        for b in &self.blocks {
            let Some(ids) = b.spindles.iter().copied().collect::<Option<Vec<usize>>>() else {
                continue;
            };
            let st: Vec<SpindleStatus> = ids.iter().map(|&s| self.status[s]).collect();
            let missing = st.iter().filter(|&&s| s == SpindleStatus::Missing).count();
            let trivial = st.iter().filter(|&&s| s == SpindleStatus::Trivial).count();
            match b.kind {
                BlockKind::FiveBlock => {
                    if missing == 0 || trivial > 0 {
                        events.push(("claim4", format!("T2 block {:?}: {:?}", b.bottoms, st)));
                    }
                }
                BlockKind::SixBlock => {
                    if st[..4].contains(&SpindleStatus::Trivial) {
                        events.push(("claim5a", format!("T6 block {:?}: inner trivial {:?}", b.bottoms, st)));
                    }
                    if missing == 0 && trivial < 2 {
                        events.push(("claim5a", format!("T6 block {:?}: {:?}", b.bottoms, st)));
                    }
                    let both = st[4] == SpindleStatus::Trivial && st[5] == SpindleStatus::Trivial;
                    by_side.entry((b.tile, b.side)).or_default().push(both);
                }
            }
        }
        let mut sides: Vec<((usize, usize), Vec<bool>)> = by_side.into_iter().collect();
        sides.sort_by_key(|(k, _)| *k);
        for ((t, side), both) in sides {
            if !self.info[t].complete || !both.iter().any(|&x| x) {
                continue;
            }
            let tile = &self.tiling.tiles[t];
            let nb = tile.neighbors[side].expect("complete tiles have all neighbors");
            let other = &self.tiling.tiles[nb];
            let mut t6: Vec<usize> = other
                .neighbors
                .iter()
                .flatten()
                .copied()
                .filter(|&n| self.tiling.tiles[n].ty == TileType::T6)
                .collect();
            t6.sort_unstable();
            t6.dedup();
            self.stats.claim5b_applications += 1;
            if other.ty != TileType::T1 || t6.len() > 2 {
                events.push(("claim5b", format!("{} across the side has {} T6 neighbors: {}", other.ty, t6.len(), self.describe_tile(t))));
            }
            if both.len() == 2 && both.iter().all(|&x| x) {
                self.stats.claim5c_applications += 1;
                if other.ty != TileType::T1 || t6.len() != 1 {
                    events.push(("claim5c", format!("{} across the side has {} T6 neighbors: {}", other.ty, t6.len(), self.describe_tile(t))));
                }
            }
        }
        for (c, d) in events {
            self.fail(c, d);
        }
    }

    /// Runs all three phases.
    pub fn run(ctx: &'a DischargeContext, in_i: Vec<bool>) -> Result<Self> {
        let mut d = Discharge::new(ctx, in_i)?;
        d.phase1();
        d.phase2();
        d.phase3();
        Ok(d)
    }
}

/// How the spindle part of I is chosen for each core set.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpindlePolicy {
    /// Shuffled greedy completion.
    Greedy,
    /// No spindle vertex (every non-trivial spindle is missing).
    Empty,
}

/// Aggregate over all runs.
#[derive(Clone, Debug, Serialize)]
pub struct DischargeReport {
    pub d: u32,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub runs: u64,
    pub errors: u64,
    pub falsifications: u64,
    pub examples: Vec<Falsification>,
    pub totals: RunOutcome,
    /// First run (core set index, policy) attaining each type's phase-1 maximum.
    pub attained: [Option<(u64, SpindlePolicy)>; 8],
    #[serde(serialize_with = "crate::json::exact")]
    pub total_weight: Q,
    #[serde(serialize_with = "crate::json::exact")]
    pub cap: Q,
}

impl DischargeReport {
    pub fn passed(&self) -> bool {
        self.runs > 0 && self.errors == 0 && self.falsifications == 0
    }

    /// Phase-1 maxima equal to the claimed bound.
    pub fn claim1_attained(&self) -> [bool; 8] {
        TileType::ALL.map(|ty| self.totals.phase1_max[ty.index()] == Some(claim1(ty)))
    }

    fn blank(ctx: &DischargeContext, sets: CoreSets) -> DischargeReport {
        DischargeReport {
            d: ctx.d,
            exhaustive: sets == CoreSets::Exhaustive,
            seed: match sets {
                CoreSets::Sampled { seed, .. } => Some(seed),
                CoreSets::Exhaustive => None,
            },
            runs: 0,
            errors: 0,
            falsifications: 0,
            examples: Vec::new(),
            totals: RunOutcome::default(),
            attained: [None; 8],
            total_weight: ctx.total_weight,
            cap: ctx.total_cap,
        }
    }

    fn record(&mut self, index: u64, policy: SpindlePolicy, r: Result<Discharge>) {
        self.runs += 1;
        match r {
            Ok(d) => {
                for k in 0..8 {
                    let m = d.stats.phase1_max[k];
                    if m.is_some() && m == Some(claim1(TileType::ALL[k])) && self.attained[k].is_none() {
                        self.attained[k] = Some((index, policy));
                    }
                }
                self.totals = std::mem::take(&mut self.totals).merge(&d.stats);
                if !d.events.is_empty() {
                    self.falsifications += 1;
                    for e in d.events {
                        if self.examples.len() < 16 {
                            self.examples.push(e);
                        }
                    }
                }
            }
            Err(e) => {
                self.errors += 1;
                if self.examples.len() < 16 {
                    self.examples.push(Falsification {
                        check: "error",
                        detail: e.to_string(),
                    });
                }
            }
        }
    }

    fn merge(mut self, o: DischargeReport) -> DischargeReport {
        self.runs += o.runs;
        self.errors += o.errors;
        self.falsifications += o.falsifications;
        for e in o.examples {
            if self.examples.len() < 16 {
                self.examples.push(e);
            }
        }
        self.totals = std::mem::take(&mut self.totals).merge(&o.totals);
        for k in 0..8 {
            self.attained[k] = match (self.attained[k], o.attained[k]) {
                (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
                (a, b) => a.or(b),
            };
        }
        self
    }
}

fn mix(seed: u64, set: &[usize]) -> u64 {
    set.iter().fold(seed ^ 0x9e37_79b9_7f4a_7c15, |h, &v| {
        let x = (h ^ v as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        x ^ (x >> 31)
    })
}

fn run_both(ctx: &DischargeContext, rep: &mut DischargeReport, index: u64, set: &[usize], rng_seed: u64) {
    let mut rng = sample_rng(rng_seed, index.wrapping_add(1 << 40));
    let greedy = ctx.extend_spindles(set, &mut rng);
    rep.record(index, SpindlePolicy::Greedy, Discharge::run(ctx, greedy));
    rep.record(index, SpindlePolicy::Empty, Discharge::run(ctx, ctx.core_only(set)));
}

/// Runs the three phases on every maximal core set of G'_d (or a seeded sample), once with a
/// greedy spindle completion and once with no spindle vertices.
pub fn verify_discharge(ctx: &DischargeContext, sets: CoreSets, exec: Exec) -> DischargeReport {
    let blank = DischargeReport::blank(ctx, sets);
    match sets {
        CoreSets::Exhaustive => {
            let bg = BitGraph::new(&ctx.graph, Scope::CoreOnly);
            let tasks = bg.mis_tasks(if exec.effective() == Exec::Parallel { 3 } else { 0 });
            par::map_reduce(
                exec,
                tasks.len(),
                blank.clone(),
                |t| {
                    let mut rep = blank.clone();
                    bg.run_task(&tasks[t], |r| {
                        let set: Vec<usize> = r.iter().map(|&i| bg.map[i]).collect();
                        run_both(ctx, &mut rep, 0, &set, mix(0, &set));
                        std::ops::ControlFlow::Continue(())
                    });
                    rep
                },
                DischargeReport::merge,
            )
        }
        CoreSets::Sampled { samples, seed } => {
            let chunk = 16;
            par::map_reduce(
                exec,
                samples.div_ceil(chunk),
                blank.clone(),
                |c| {
                    let mut rep = blank.clone();
                    for idx in c * chunk..((c + 1) * chunk).min(samples) {
                        let set = sample_maximal_core_set(&ctx.graph, seed, idx as u64);
                        run_both(ctx, &mut rep, idx as u64, &set, seed);
                    }
                    rep
                },
                DischargeReport::merge,
            )
        }
    }
}
