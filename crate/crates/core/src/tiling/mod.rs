//! Tilings of a lattice core induced by a maximal independent set.
//!
//! Points of I at distance less than 3 are joined, every segment that crosses another is
//! deleted, and each bounded face near the core is matched against the eight tile shapes.

mod coloring;
mod engine;
mod export;
mod local;
mod template;

use std::collections::{BTreeMap, HashMap};

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{Point, QuadExt};
use crate::indsets::{sample_maximal_core_set, BitGraph, CoreSets, IndependentSet, Scope};
use crate::lattice::{lp, LatticePoint, Placement};
use crate::par::{self, Exec};
use crate::udgraph::{build_core, UDGraph};

pub use coloring::{seven_coloring, SevenColoring};
pub use engine::{offset_index, offsets, RunStats, Scratch, TilingEngine, EXTENSION_MARGIN, WALK_MARGIN};
pub use export::{tiling_json, tiling_svg};
pub use local::{enumerate_local_cases, local_case_report, LocalCase, LocalCaseReport, NamedPoint};
pub use template::{templates, FaceKey, Template, TileType};

use template::locate;

#[derive(Clone, Debug, Serialize)]
pub struct Tile {
    pub ty: TileType,
    pub placement: Placement,
    /// Images of the template corners, in template order.
    pub corners: Vec<LatticePoint>,
    /// Core vertex ids of the corners (`None` past the core boundary).
    pub corner_ids: Vec<Option<usize>>,
    /// Tile across template side `j` (corner `j` to corner `j+1`), if it was built.
    pub neighbors: Vec<Option<usize>>,
}

impl Tile {
    pub fn template(&self) -> &'static Template {
        self.ty.template()
    }

    pub fn interior(&self) -> Vec<LatticePoint> {
        self.template().interior.iter().map(|&p| self.placement.apply(p)).collect()
    }

    pub fn boundary(&self) -> Vec<LatticePoint> {
        self.template().boundary.iter().map(|&p| self.placement.apply(p)).collect()
    }

    pub fn faces(&self) -> Vec<FaceKey> {
        self.template()
            .faces
            .iter()
            .map(|f| FaceKey::from_vertices(f.vertices().map(|p| self.placement.apply(p))))
            .collect()
    }

    pub fn side(&self, j: usize) -> (LatticePoint, LatticePoint) {
        (self.corners[j], self.corners[(j + 1) % self.corners.len()])
    }

    /// Corners in counterclockwise order.
    pub fn ccw_corners(&self) -> Vec<LatticePoint> {
        let mut c = self.corners.clone();
        if self.placement.iso.reflect {
            c.reverse();
        }
        c
    }

    /// −1 outside, 0 on the boundary, 1 inside.
    pub fn locate(&self, p: LatticePoint) -> i8 {
        locate(&self.ccw_corners(), p)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Tiling {
    pub d: u32,
    pub tiles: Vec<Tile>,
    /// I on the core followed by the greedy extension outside it.
    pub members: Vec<LatticePoint>,
    pub core_members: usize,
    /// Cover count of every unit triangle of the core.
    #[serde(skip)]
    pub multiplicity: BTreeMap<FaceKey, u8>,
    #[serde(skip)]
    pub stats: RunStats,
}

impl Tiling {
    pub fn count(&self, ty: TileType) -> usize {
        self.tiles.iter().filter(|t| t.ty == ty).count()
    }

    /// Tiles having `p` as an interior or non-corner boundary point.
    pub fn tiles_containing(&self, p: LatticePoint) -> Vec<usize> {
        (0..self.tiles.len())
            .filter(|&i| {
                let t = &self.tiles[i];
                t.locate(p) >= 0 && !t.corners.contains(&p)
            })
            .collect()
    }

    pub fn is_member(&self, p: LatticePoint) -> bool {
        self.members.contains(&p)
    }
}

fn materialize(engine: &TilingEngine, s: &Scratch, core: Option<&UDGraph>) -> Tiling {
    let raw = &s.tiles;
    let mut owner: HashMap<(LatticePoint, LatticePoint), usize> = HashMap::new();
    for (i, t) in raw.iter().enumerate() {
        let walk: Vec<LatticePoint> = t.walk[..t.n].iter().map(|&g| engine.point(g as usize)).collect();
        for j in 0..t.n {
            owner.insert((walk[j], walk[(j + 1) % t.n]), i);
        }
    }
    let tiles = raw
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let tmpl = t.ty.template();
            let corners: Vec<LatticePoint> = tmpl.corners.iter().map(|&p| t.placement.apply(p)).collect();
            let n = corners.len();
            let neighbors = (0..n)
                .map(|j| {
                    let (a, b) = (corners[j], corners[(j + 1) % n]);
                    [(a, b), (b, a)].iter().filter_map(|e| owner.get(e)).copied().find(|&o| o != i)
                })
                .collect();
            let corner_ids = corners
                .iter()
                .map(|&p| core.and_then(|g| g.lattice_vertex(p)).filter(|_| engine.is_core_point(p)))
                .collect();
            Tile {
                ty: t.ty,
                placement: t.placement,
                corners,
                corner_ids,
                neighbors,
            }
        })
        .collect::<Vec<Tile>>();
    let mut multiplicity = BTreeMap::new();
    for t in &tiles {
        for f in t.faces() {
            if f.vertices().iter().all(|&p| engine.is_core_point(p)) {
                *multiplicity.entry(f).or_insert(0u8) += 1;
            }
        }
    }
    Tiling {
        d: engine.d(),
        tiles,
        members: engine.members(s),
        core_members: (s.stats.members - s.stats.extended) as usize,
        multiplicity,
        stats: s.stats,
    }
}

/// Tiles a maximal independent set of lattice points of `C_d`.
pub fn tile_points(engine: &TilingEngine, points: &[LatticePoint]) -> Result<Tiling> {
    let mut s = engine.scratch();
    engine.run(&mut s, points.iter().copied())?;
    Ok(materialize(engine, &s, None))
}

/// Builds the tiling for the core part of `i` (spindle vertices of `i` are ignored).
pub fn build_tiling(core: &UDGraph, i: &IndependentSet) -> Result<Tiling> {
    let d = core.core_radius().ok_or(Error::NotLattice)?;
    let engine = TilingEngine::new(d);
    let pts: Vec<LatticePoint> = i
        .vertices
        .iter()
        .filter(|&&v| core.is_core(v))
        .map(|&v| core.vertex(v).lattice.ok_or(Error::NotLattice))
        .collect::<Result<_>>()?;
    let mut s = engine.scratch();
    engine.run(&mut s, pts)?;
    Ok(materialize(&engine, &s, Some(core)))
}

/// Matches a corner polygon (either orientation, any starting corner) against the templates.
pub fn classify_tile(corners: &[LatticePoint]) -> Result<(TileType, Placement)> {
    let fail = || Error::Unclassifiable {
        corners: corners.iter().map(|p| (p.a, p.b)).collect(),
    };
    if !(3..=4).contains(&corners.len()) {
        return Err(fail());
    }
    let mut c = corners.to_vec();
    if template::signed_area2(&c) < 0 {
        c.reverse();
    }
    let n = c.len();
    let sig: Vec<LatticePoint> = (0..n).map(|j| c[(j + 1) % n] - c[j]).collect();
    let &(ty, iso, s) = template::edge_signature_table().get(&sig).ok_or_else(fail)?;
    let o = template::orient_template(ty.template(), iso);
    Ok((ty, Placement { iso, shift: c[0] - o.corners[s] }))
}

/// Exact-coordinate front end for `classify_tile`.
pub fn classify_tile_points(corners: &[Point]) -> Result<(TileType, Placement)> {
    let lattice = corners.iter().map(point_to_lattice).collect::<Result<Vec<_>>>()?;
    classify_tile(&lattice)
}

fn point_to_lattice(p: &Point) -> Result<LatticePoint> {
    let not = || Error::Invalid("point is not on the triangular lattice".into());
    // y = b·√3/2 and x = a + b/2.
    let b = (&p.y * &QuadExt::from_parts([0, 2, 0, 0], 3)).as_rational().cloned().ok_or_else(not)?;
    let x = p.x.as_rational().cloned().ok_or_else(not)?;
    let a = x - &b / num_bigint::BigInt::from(2);
    if !a.is_integer() || !b.is_integer() {
        return Err(not());
    }
    Ok(lp(a.to_integer().to_i64().ok_or_else(not)?, b.to_integer().to_i64().ok_or_else(not)?))
}

/// Outcome of tiling a population of maximal core sets.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TilingReport {
    pub d: u32,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub runs: u64,
    pub failures: u64,
    /// First few failure messages.
    pub failure_examples: Vec<String>,
    pub per_type: [u64; 8],
    pub runs_with_type: [u64; 8],
    pub deleted_pairs: u64,
    pub runs_with_deletion: u64,
    pub double_faces_max: u32,
    pub min_core_size: usize,
    pub density_floor: usize,
    pub density_violations: u64,
}

impl TilingReport {
    fn merge(mut self, o: TilingReport) -> TilingReport {
        self.runs += o.runs;
        self.failures += o.failures;
        for m in o.failure_examples {
            if self.failure_examples.len() < 10 {
                self.failure_examples.push(m);
            }
        }
        for k in 0..8 {
            self.per_type[k] += o.per_type[k];
            self.runs_with_type[k] += o.runs_with_type[k];
        }
        self.deleted_pairs += o.deleted_pairs;
        self.runs_with_deletion += o.runs_with_deletion;
        self.double_faces_max = self.double_faces_max.max(o.double_faces_max);
        self.min_core_size = match (self.runs - o.runs, o.runs) {
            (0, _) => o.min_core_size,
            (_, 0) => self.min_core_size,
            _ => self.min_core_size.min(o.min_core_size),
        };
        self.density_violations += o.density_violations;
        self
    }

    fn record(&mut self, size: usize, r: Result<RunStats>) {
        self.runs += 1;
        self.min_core_size = if self.runs == 1 { size } else { self.min_core_size.min(size) };
        if size < self.density_floor {
            self.density_violations += 1;
        }
        match r {
            Ok(st) => {
                for k in 0..8 {
                    self.per_type[k] += st.per_type[k] as u64;
                    self.runs_with_type[k] += u64::from(st.per_type[k] > 0);
                }
                self.deleted_pairs += st.deleted_pairs as u64;
                self.runs_with_deletion += u64::from(st.deleted_pairs > 0);
                self.double_faces_max = self.double_faces_max.max(st.double_faces);
            }
            Err(e) => {
                self.failures += 1;
                if self.failure_examples.len() < 10 {
                    self.failure_examples.push(e.to_string());
                }
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.runs > 0 && self.failures == 0 && self.density_violations == 0
    }
}

/// Tiles every maximal core set (or a seeded sample) of `C_d`.
pub fn verify_tilings(d: u32, sets: CoreSets, exec: Exec) -> TilingReport {
    let core = build_core(d);
    let engine = TilingEngine::new(d);
    let lattice: Vec<LatticePoint> = core.vertices().iter().map(|v| v.lattice.expect("lattice core")).collect();
    let blank = TilingReport {
        d,
        exhaustive: matches!(sets, CoreSets::Exhaustive),
        seed: match sets {
            CoreSets::Sampled { seed, .. } => Some(seed),
            CoreSets::Exhaustive => None,
        },
        density_floor: seven_coloring(&core).interior_class_size,
        ..TilingReport::default()
    };
    match sets {
        CoreSets::Exhaustive => {
            let bg = BitGraph::new(&core, Scope::CoreOnly);
            let local: Vec<LatticePoint> = (0..bg.n()).map(|i| lattice[bg.map[i]]).collect();
            let tasks = bg.mis_tasks(if exec.effective() == Exec::Parallel { 3 } else { 0 });
            par::map_reduce(
                exec,
                tasks.len(),
                blank.clone(),
                |t| {
                    let mut rep = blank.clone();
                    let mut s = engine.scratch();
                    bg.run_task(&tasks[t], |r| {
                        let res = engine.run(&mut s, r.iter().map(|&v| local[v]));
                        rep.record(r.len(), res);
                        std::ops::ControlFlow::Continue(())
                    });
                    rep
                },
                TilingReport::merge,
            )
        }
        CoreSets::Sampled { samples, seed } => {
            let chunk = 64;
            par::map_reduce(
                exec,
                samples.div_ceil(chunk),
                blank.clone(),
                |c| {
                    let mut rep = blank.clone();
                    let mut s = engine.scratch();
                    for idx in c * chunk..((c + 1) * chunk).min(samples) {
                        let set = sample_maximal_core_set(&core, seed, idx as u64);
                        let res = engine.run(&mut s, set.iter().map(|&v| lattice[v]));
                        rep.record(set.len(), res);
                    }
                    rep
                },
                TilingReport::merge,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Iso, SQRT3};

    #[test]
    fn classify_every_template_image() {
        for t in templates() {
            for iso in Iso::all() {
                let shift = lp(3, -2);
                let pl = Placement { iso, shift };
                let mut c: Vec<LatticePoint> = t.corners.iter().map(|&p| pl.apply(p)).collect();
                c.rotate_left(1);
                let (ty, got) = classify_tile(&c).unwrap();
                assert_eq!(ty, t.ty);
                let mut mapped: Vec<LatticePoint> = t.corners.iter().map(|&p| got.apply(p)).collect();
                let mut want = c.clone();
                mapped.sort();
                want.sort();
                assert_eq!(mapped, want);
            }
        }
    }

    #[test]
    fn classify_named_shapes() {
        let o = lp(0, 0);
        assert_eq!(classify_tile(&[o, SQRT3[0], SQRT3[1]]).unwrap().0, TileType::T1);
        assert_eq!(classify_tile(&[o, lp(2, 0), lp(0, 2)]).unwrap().0, TileType::T2);
        // Two T3 halves sharing the long diagonal form the T6 rectangle.
        assert_eq!(classify_tile(&[o, lp(2, 0), lp(1, 2), lp(-1, 2)]).unwrap().0, TileType::T6);
        assert!(classify_tile(&[o, lp(1, 0), lp(0, 1)]).is_err());
        let pts: Vec<Point> = [o, SQRT3[0], SQRT3[1]].iter().map(|p| p.to_point()).collect();
        assert_eq!(classify_tile_points(&pts).unwrap().0, TileType::T1);
    }

    /// Greedy completion of `seed` to a maximal core set, in vertex order.
    fn complete(core: &UDGraph, seed: &[usize]) -> Vec<usize> {
        let mut set = seed.to_vec();
        let mut blocked = vec![false; core.n()];
        for &v in seed {
            blocked[v] = true;
            core.neighbors(v).iter().for_each(|&u| blocked[u] = true);
        }
        for v in core.core_ids() {
            if !blocked[v] {
                set.push(v);
                blocked[v] = true;
                core.neighbors(v).iter().for_each(|&u| blocked[u] = true);
            }
        }
        set
    }

    #[test]
    fn seven_color_class_tiles() {
        for d in [6, 8, 10] {
            let core = build_core(d);
            let col = seven_coloring(&core);
            let class = col.class(&core, col.largest);
            let set = IndependentSet::new(complete(&core, &class), Scope::CoreOnly);
            let t = build_tiling(&core, &set).unwrap();
            // Away from the boundary the class is a perfect code and every tile is the √7 triangle.
            let deep = (d as i64 - 2).pow(2);
            let inner: Vec<&Tile> = t.tiles.iter().filter(|t| t.corners.iter().all(|p| p.norm2() <= deep)).collect();
            assert!(!inner.is_empty());
            assert!(inner.iter().all(|t| t.ty == TileType::T5), "d = {d}");
        }
    }

    #[test]
    fn small_t1_configuration() {
        let engine = TilingEngine::new(3);
        let seed = [lp(0, 0), SQRT3[0], SQRT3[1]];
        let core = build_core(3);
        let ids: Vec<usize> = seed.iter().map(|&p| core.lattice_vertex(p).unwrap()).collect();
        let pts: Vec<LatticePoint> = complete(&core, &ids).iter().map(|&v| core.vertex(v).lattice.unwrap()).collect();
        let t = tile_points(&engine, &pts).unwrap();
        let mut want = seed.to_vec();
        want.sort();
        assert!(t.tiles.iter().any(|tile| {
            let mut c = tile.corners.clone();
            c.sort();
            tile.ty == TileType::T1 && c == want
        }));
    }

    #[test]
    fn sampled_tilings_hold() {
        let rep = verify_tilings(6, CoreSets::Sampled { samples: 200, seed: 7 }, Exec::Sequential);
        assert!(rep.passed(), "{:?}", rep.failure_examples);
        assert_eq!(rep.runs, 200);
    }

    #[test]
    fn neighbors_are_mutual() {
        let core = build_core(6);
        let set = IndependentSet::new(sample_maximal_core_set(&core, 3, 0), Scope::CoreOnly);
        let t = build_tiling(&core, &set).unwrap();
        for (i, tile) in t.tiles.iter().enumerate() {
            for nb in tile.neighbors.iter().flatten() {
                assert!(t.tiles[*nb].neighbors.contains(&Some(i)));
            }
        }
        assert!(t.multiplicity.values().all(|&m| m == 1 || m == 2));
    }
}
