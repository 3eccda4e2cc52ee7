//! Unit-distance graphs with exact embeddings.

mod build;
mod export;

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{dist2, Orientation, Point, QuadExt};
use crate::lattice::LatticePoint;

pub use build::{
    attach_spindles, build_core, build_fisher_ullman, build_fu_core, build_golomb,
    build_moser_spindle, build_spindled, fisher_ullman_core_weight,
};
pub use export::{to_dimacs, to_json, to_svg};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Core,
    Spindle,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpindleSide {
    Up,
    Down,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpindleMode {
    ThreeDirections,
    SixDirections,
}

impl SpindleMode {
    /// Diamond directions (indices into `SQRT3`) and the rotation used for each.
    pub fn directions(self) -> Vec<(usize, Orientation)> {
        match self {
            SpindleMode::ThreeDirections => {
                [1, 3, 5].iter().map(|&k| (k, Orientation::Clockwise)).collect()
            }
            SpindleMode::SixDirections => (0..6)
                .map(|k| {
                    let o = if k % 2 == 1 {
                        Orientation::Clockwise
                    } else {
                        Orientation::Counterclockwise
                    };
                    (k, o)
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub pos: Point,
    pub role: Role,
    pub weight: BigRational,
    pub lattice: Option<LatticePoint>,
    /// Number of spindle slots merged into this vertex (0 for core vertices).
    pub multiplicity: usize,
}

/// A spindle hanging off the diamond `bottom, top` (at distance √3).
#[derive(Clone, Debug, Serialize)]
pub struct Spindle {
    pub bottom: usize,
    pub top: usize,
    /// Vertices 1 and 2 are at distance 1 from the bottom, vertex 3 at distance √3.
    pub verts: [usize; 3],
    /// Index into `lattice::SQRT3` of `top − bottom`.
    pub direction: usize,
    pub rotation: Orientation,
    pub side: SpindleSide,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Moser,
    Golomb,
    Core { d: u32 },
    Gd { d: u32 },
    Gpd { d: u32 },
    FisherUllman,
    FuCore { shell: u32 },
    Custom,
}

#[derive(Clone, Debug)]
pub struct UDGraph {
    pub(crate) vertices: Vec<Vertex>,
    pub(crate) adj: Vec<Vec<usize>>,
    pub(crate) spindles: Vec<Spindle>,
    pub(crate) memberships: Vec<Vec<(usize, u8)>>,
    pub(crate) lattice_index: HashMap<LatticePoint, usize>,
    pub(crate) spindle_index: HashMap<(LatticePoint, usize), usize>,
    pub(crate) core_spindles: Vec<Vec<usize>>,
    pub(crate) center: Point,
    pub(crate) family: Family,
    pub(crate) core_radius: Option<u32>,
    pub(crate) merges: usize,
}

impl UDGraph {
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn spindles(&self) -> &[Spindle] {
        &self.spindles
    }

    /// Spindles containing vertex `v`, with the slot (0..3) it occupies.
    pub fn memberships(&self, v: usize) -> &[(usize, u8)] {
        &self.memberships[v]
    }

    /// Spindles whose diamond has `v` as bottom or top.
    pub fn incident_spindles(&self, v: usize) -> &[usize] {
        &self.core_spindles[v]
    }

    pub fn spindle_at(&self, bottom: LatticePoint, direction: usize) -> Option<usize> {
        self.spindle_index.get(&(bottom, direction)).copied()
    }

    pub fn lattice_vertex(&self, p: LatticePoint) -> Option<usize> {
        self.lattice_index.get(&p).copied()
    }

    pub fn is_core(&self, v: usize) -> bool {
        self.vertices[v].role == Role::Core
    }

    pub fn core_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(|&v| self.is_core(v))
    }

    pub fn core_count(&self) -> usize {
        self.core_ids().count()
    }

    pub fn core_degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&u| self.is_core(u)).count()
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn core_radius(&self) -> Option<u32> {
        self.core_radius
    }

    /// Symmetry center of the construction.
    pub fn center(&self) -> &Point {
        &self.center
    }

    /// Number of spindle-vertex slots that landed on an existing vertex.
    pub fn merge_count(&self) -> usize {
        self.merges
    }

    pub fn weights(&self) -> Vec<BigRational> {
        self.vertices.iter().map(|v| v.weight.clone()).collect()
    }

    pub fn total_weight(&self) -> BigRational {
        self.vertices.iter().fold(BigRational::zero(), |acc, v| acc + &v.weight)
    }

    /// Core vertices get `core`, spindle vertices `spindle` per merged slot.
    pub fn with_uniform_weights(&self, core: &BigRational, spindle: &BigRational) -> UDGraph {
        let mut g = self.clone();
        for v in &mut g.vertices {
            v.weight = match v.role {
                Role::Core => core.clone(),
                Role::Spindle => spindle * BigRational::from_integer(v.multiplicity.into()),
            };
        }
        g
    }

    pub fn with_weights(&self, weights: &[BigRational]) -> UDGraph {
        assert_eq!(weights.len(), self.n());
        let mut g = self.clone();
        for (v, w) in g.vertices.iter_mut().zip(weights) {
            v.weight = w.clone();
        }
        g
    }

    /// Induced subgraph on the core vertices, keeping lattice metadata.
    pub fn core_subgraph(&self) -> UDGraph {
        let keep: Vec<usize> = self.core_ids().collect();
        let mut map = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            map[v] = i;
        }
        let vertices: Vec<Vertex> = keep.iter().map(|&v| self.vertices[v].clone()).collect();
        let adj = keep
            .iter()
            .map(|&v| self.adj[v].iter().filter(|&&u| map[u] != usize::MAX).map(|&u| map[u]).collect())
            .collect();
        let lattice_index = vertices
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.lattice.map(|p| (p, i)))
            .collect();
        UDGraph {
            memberships: vec![Vec::new(); vertices.len()],
            core_spindles: vec![Vec::new(); vertices.len()],
            vertices,
            adj,
            spindles: Vec::new(),
            lattice_index,
            spindle_index: HashMap::new(),
            center: self.center.clone(),
            family: match self.family {
                Family::Gd { d } | Family::Gpd { d } => Family::Core { d },
                _ => Family::Custom,
            },
            core_radius: self.core_radius,
            merges: 0,
        }
    }

    /// Graph on arbitrary points with all unit-distance edges.
    pub fn from_points(points: Vec<Point>, role: Role) -> UDGraph {
        let mut b = build::Builder::new(Family::Custom);
        for p in points {
            b.add_vertex(p, role, BigRational::from_integer(1.into()), None);
        }
        b.finish(Point::origin(), None)
    }
}

/// Edges split by what they join.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EdgeBreakdown {
    pub core: usize,
    /// Both ends belong to one spindle (its diamond ends included).
    pub within_spindle: usize,
    /// Ends in different spindles that share a direction.
    pub same_direction: usize,
    pub other: usize,
}

impl EdgeBreakdown {
    pub fn total(&self) -> usize {
        self.core + self.within_spindle + self.same_direction + self.other
    }
}

pub fn edge_breakdown(g: &UDGraph) -> EdgeBreakdown {
    let mut of = vec![Vec::new(); g.n()];
    for (i, s) in g.spindles.iter().enumerate() {
        for v in [s.bottom, s.top, s.verts[0], s.verts[1], s.verts[2]] {
            of[v].push(i);
        }
    }
    let mut out = EdgeBreakdown::default();
    for (u, v) in g.edges() {
        if g.is_core(u) && g.is_core(v) {
            out.core += 1;
        } else if of[u].iter().any(|s| of[v].contains(s)) {
            out.within_spindle += 1;
        } else if of[u].iter().any(|&a| of[v].iter().any(|&b| g.spindles[a].direction == g.spindles[b].direction)) {
            out.same_direction += 1;
        } else {
            out.other += 1;
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingReport {
    pub vertices: usize,
    pub edges: usize,
    pub pairs_checked: usize,
    pub spindles: usize,
    pub merges: usize,
}

/// Exact check that edges are exactly the unit-distance pairs and positions are distinct.
pub fn verify_embedding(g: &UDGraph) -> Result<EmbeddingReport> {
    let one = QuadExt::one();
    for (u, v) in g.edges() {
        if dist2(&g.vertices[u].pos, &g.vertices[v].pos) != one {
            return Err(Error::Embedding {
                kind: "edge not unit length",
                u,
                v,
            });
        }
    }
    let approx: Vec<(f64, f64)> = g.vertices.iter().map(|v| v.pos.to_f64()).collect();
    let mut seen = HashMap::with_capacity(g.n());
    for (i, v) in g.vertices.iter().enumerate() {
        if let Some(&j) = seen.get(&v.pos) {
            return Err(Error::Embedding {
                kind: "coincident positions",
                u: j,
                v: i,
            });
        }
        seen.insert(v.pos.clone(), i);
    }
    let mut pairs = 0;
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            pairs += 1;
            let (dx, dy) = (approx[u].0 - approx[v].0, approx[u].1 - approx[v].1);
            // Coordinates carry error far below 1e-9, so a gap this large is decisive.
            if (dx * dx + dy * dy - 1.0).abs() > 1e-6 {
                continue;
            }
            if !g.adjacent(u, v) && dist2(&g.vertices[u].pos, &g.vertices[v].pos) == one {
                return Err(Error::Embedding {
                    kind: "unit pair without edge",
                    u,
                    v,
                });
            }
        }
    }
    for (s, sp) in g.spindles.iter().enumerate() {
        let pos = |v: usize| &g.vertices[v].pos;
        let checks = [
            (sp.bottom, sp.top, 3),
            (sp.top, sp.verts[2], 1),
            (sp.bottom, sp.verts[0], 1),
            (sp.bottom, sp.verts[1], 1),
            (sp.bottom, sp.verts[2], 3),
        ];
        for (u, v, want) in checks {
            if dist2(pos(u), pos(v)) != QuadExt::from_int(want) {
                return Err(Error::Embedding {
                    kind: "spindle geometry",
                    u: s,
                    v,
                });
            }
        }
    }
    Ok(EmbeddingReport {
        vertices: g.n(),
        edges: g.edge_count(),
        pairs_checked: pairs,
        spindles: g.spindles.len(),
        merges: g.merges,
    })
}
