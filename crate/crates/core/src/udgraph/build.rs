use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{Family, Role, Spindle, SpindleMode, SpindleSide, UDGraph, Vertex};
use crate::exactnum::{dist2, rotate, Orientation, Point, QuadExt, RotationSpec};
use crate::lattice::{disk, lp, LatticePoint, SQRT3, UNIT};

pub(crate) struct Builder {
    vertices: Vec<Vertex>,
    index: HashMap<Point, usize>,
    spindles: Vec<Spindle>,
    merges: usize,
    family: Family,
}

impl Builder {
    pub(crate) fn new(family: Family) -> Self {
        Builder {
            vertices: Vec::new(),
            index: HashMap::new(),
            spindles: Vec::new(),
            merges: 0,
            family,
        }
    }

    /// Adds a vertex, merging spindle vertices that land on an existing spindle vertex.
    pub(crate) fn add_vertex(
        &mut self,
        pos: Point,
        role: Role,
        weight: BigRational,
        lattice: Option<LatticePoint>,
    ) -> usize {
        if let Some(&id) = self.index.get(&pos) {
            let v = &mut self.vertices[id];
            assert!(
                v.role == Role::Spindle && role == Role::Spindle,
                "construction placed a vertex on top of a core vertex"
            );
            v.weight += weight;
            v.multiplicity += 1;
            self.merges += 1;
            return id;
        }
        let id = self.vertices.len();
        self.index.insert(pos.clone(), id);
        self.vertices.push(Vertex {
            pos,
            role,
            weight,
            lattice,
            multiplicity: usize::from(role == Role::Spindle),
        });
        id
    }

    pub(crate) fn finish(self, center: Point, core_radius: Option<u32>) -> UDGraph {
        let n = self.vertices.len();
        let approx: Vec<(f64, f64)> = self.vertices.iter().map(|v| v.pos.to_f64()).collect();
        let cell = |(x, y): (f64, f64)| (x.floor() as i64, y.floor() as i64);
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, &p) in approx.iter().enumerate() {
            grid.entry(cell(p)).or_default().push(i);
        }
        let one = QuadExt::one();
        let mut adj = vec![Vec::new(); n];
        for u in 0..n {
            let (cx, cy) = cell(approx[u]);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(bucket) = grid.get(&(cx + dx, cy + dy)) else {
                        continue;
                    };
                    for &v in bucket {
                        if v <= u {
                            continue;
                        }
                        let (ex, ey) = (approx[u].0 - approx[v].0, approx[u].1 - approx[v].1);
                        if (ex * ex + ey * ey - 1.0).abs() > 1e-6 {
                            continue;
                        }
                        if dist2(&self.vertices[u].pos, &self.vertices[v].pos) == one {
                            adj[u].push(v);
                            adj[v].push(u);
                        }
                    }
                }
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let mut memberships = vec![Vec::new(); n];
        let mut core_spindles = vec![Vec::new(); n];
        let mut spindle_index = HashMap::new();
        for (s, sp) in self.spindles.iter().enumerate() {
            for (slot, &v) in sp.verts.iter().enumerate() {
                memberships[v].push((s, slot as u8));
            }
            core_spindles[sp.bottom].push(s);
            core_spindles[sp.top].push(s);
            if let Some(b) = self.vertices[sp.bottom].lattice {
                spindle_index.insert((b, sp.direction), s);
            }
        }
        let lattice_index = self
            .vertices
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.lattice.map(|p| (p, i)))
            .collect();
        UDGraph {
            vertices: self.vertices,
            adj,
            spindles: self.spindles,
            memberships,
            lattice_index,
            spindle_index,
            core_spindles,
            center,
            family: self.family,
            core_radius,
            merges: self.merges,
        }
    }
}

fn one() -> BigRational {
    BigRational::one()
}

fn add_core_points(b: &mut Builder, pts: &[LatticePoint], weight: impl Fn(LatticePoint) -> BigRational) {
    for &p in pts {
        b.add_vertex(p.to_point(), Role::Core, weight(p), Some(p));
    }
}

/// Attaches every spindle whose diamond lies in the lattice core, in the given directions.
fn add_spindles(b: &mut Builder, directions: &[(usize, Orientation)], spindle_weight: &BigRational) {
    let core: Vec<(usize, LatticePoint)> = b
        .vertices
        .iter()
        .enumerate()
        .filter_map(|(i, v)| (v.role == Role::Core).then_some(()).and(v.lattice.map(|p| (i, p))))
        .collect();
    let lookup: HashMap<LatticePoint, usize> = core.iter().map(|&(i, p)| (p, i)).collect();
    let mut pending = Vec::new();
    for &(bottom, p) in &core {
        for &(k, rotation) in directions {
            let top = p + SQRT3[k];
            let left = p + UNIT[(k + 1) % 6];
            let right = p + UNIT[k];
            let (Some(&t), true, true) = (
                lookup.get(&top),
                lookup.contains_key(&left),
                lookup.contains_key(&right),
            ) else {
                continue;
            };
            let spec = RotationSpec::new(p.to_point(), rotation);
            let side = if k % 2 == 1 { SpindleSide::Up } else { SpindleSide::Down };
            let pts = [left, right, top].map(|q| rotate(&q.to_point(), &spec));
            pending.push((bottom, t, k, rotation, side, pts));
        }
    }
    for (bottom, top, direction, rotation, side, pts) in pending {
        let verts = pts.map(|q| b.add_vertex(q, Role::Spindle, spindle_weight.clone(), None));
        b.spindles.push(Spindle {
            bottom,
            top,
            verts,
            direction,
            rotation,
            side,
        });
    }
}

pub fn build_moser_spindle() -> UDGraph {
    let mut b = Builder::new(Family::Moser);
    add_core_points(&mut b, &[lp(0, 0), UNIT[1], UNIT[2], SQRT3[1]], |_| one());
    add_spindles(&mut b, &[(1, Orientation::Clockwise)], &one());
    b.finish(Point::origin(), None)
}

/// Center, unit hexagon, and a unit triangle at circumradius 1/√3 tied to alternate hexagon vertices.
pub fn build_golomb() -> UDGraph {
    let mut b = Builder::new(Family::Golomb);
    add_core_points(&mut b, &[lp(0, 0)], |_| one());
    add_core_points(&mut b, &UNIT, |_| one());
    let (c, s) = (QuadExt::from_ratio(-1, 2), QuadExt::from_parts([0, 1, 0, 0], 2));
    let mut t = Point::new(QuadExt::from_ratio(1, 6), QuadExt::from_parts([0, 0, 1, 0], 6));
    for _ in 0..3 {
        b.add_vertex(t.clone(), Role::Core, one(), None);
        t = Point::new(&(&c * &t.x) - &(&s * &t.y), &(&s * &t.x) + &(&c * &t.y));
    }
    b.finish(Point::origin(), None)
}

/// C_d: lattice points within distance `d` of the origin.
pub fn build_core(d: u32) -> UDGraph {
    let mut b = Builder::new(Family::Core { d });
    add_core_points(&mut b, &disk(d as i64), |_| one());
    b.finish(Point::origin(), Some(d))
}

/// Adds all spindles to a lattice core. Core weights are kept; spindle vertices weigh 1 per slot.
pub fn attach_spindles(core: &UDGraph, mode: SpindleMode) -> UDGraph {
    let family = match (&core.family, mode) {
        (Family::Core { d }, SpindleMode::ThreeDirections) => Family::Gd { d: *d },
        (Family::Core { d }, SpindleMode::SixDirections) => Family::Gpd { d: *d },
        _ => Family::Custom,
    };
    let mut b = Builder::new(family);
    for v in core.vertices.iter().filter(|v| v.role == Role::Core) {
        let p = v.lattice.expect("attach_spindles needs a lattice core");
        b.add_vertex(p.to_point(), Role::Core, v.weight.clone(), Some(p));
    }
    add_spindles(&mut b, &mode.directions(), &one());
    b.finish(core.center.clone(), core.core_radius)
}

/// G_d (three directions) or G'_d (six directions).
pub fn build_spindled(d: u32, mode: SpindleMode) -> UDGraph {
    attach_spindles(&build_core(d), mode)
}

/// Nine times the squared distance from `p` to the centroid of the triangle (0,0), (1,0), (1,−1).
fn fu_shell(p: LatticePoint) -> i64 {
    lp(3 * p.a - 2, 3 * p.b + 1).norm2()
}

/// Core weights of the 12-point core: inner triangle 8, next ring 5, outer ring 2.
pub fn fisher_ullman_core_weight(p: LatticePoint) -> Option<i64> {
    match fu_shell(p) {
        3 => Some(8),
        12 => Some(5),
        21 => Some(2),
        _ => None,
    }
}

fn fu_points(shell: u32) -> Vec<LatticePoint> {
    let r = 2 + (shell as f64).sqrt() as i64;
    let mut pts: Vec<LatticePoint> = (-r..=r)
        .flat_map(|b| (-r..=r).map(move |a| lp(a, b)))
        .filter(|&p| fu_shell(p) <= shell as i64)
        .collect();
    pts.sort_by_key(|p| (p.b, 2 * p.a + p.b));
    pts
}

fn fu_center() -> Point {
    Point::new(QuadExt::from_ratio(1, 2), QuadExt::from_parts([0, -1, 0, 0], 6))
}

/// 57-vertex graph: 12-point core around a triangle centroid plus 15 spindles.
pub fn build_fisher_ullman() -> UDGraph {
    let mut b = Builder::new(Family::FisherUllman);
    add_core_points(&mut b, &fu_points(21), |p| {
        BigRational::from_integer(BigInt::from(fisher_ullman_core_weight(p).unwrap()))
    });
    add_spindles(&mut b, &SpindleMode::ThreeDirections.directions(), &one());
    b.finish(fu_center(), None)
}

/// Larger cores around the same centroid (`shell` bounds nine times the squared radius), unit weights.
pub fn build_fu_core(shell: u32) -> UDGraph {
    let mut b = Builder::new(Family::FuCore { shell });
    add_core_points(&mut b, &fu_points(shell), |_| one());
    add_spindles(&mut b, &SpindleMode::ThreeDirections.directions(), &one());
    b.finish(fu_center(), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::udgraph::verify_embedding;

    #[test]
    fn small_graph_counts() {
        let m = build_moser_spindle();
        assert_eq!((m.n(), m.edge_count()), (7, 11));
        let g = build_golomb();
        assert_eq!((g.n(), g.edge_count()), (10, 18));
        for (d, n, e) in [(0, 1, 0), (1, 7, 12), (2, 19, 42), (3, 37, 90)] {
            let c = build_core(d);
            assert_eq!((c.n(), c.edge_count()), (n, e), "C_{d}");
        }
        verify_embedding(&m).unwrap();
        verify_embedding(&g).unwrap();
    }

    #[test]
    fn fisher_ullman_counts() {
        let g = build_fisher_ullman();
        assert_eq!(g.n(), 57);
        assert_eq!(g.spindles().len(), 15);
        assert_eq!(g.edge_count(), 198);
        let core_edges = g.edges().filter(|&(u, v)| g.is_core(u) && g.is_core(v)).count();
        assert_eq!(core_edges, 24);
        assert_eq!(g.total_weight(), BigRational::from_integer(96.into()));
        verify_embedding(&g).unwrap();
    }

    #[test]
    fn spindle_counts_per_vertex() {
        let g = build_spindled(4, SpindleMode::ThreeDirections);
        let center = g.lattice_vertex(lp(0, 0)).unwrap();
        assert_eq!(g.incident_spindles(center).len(), 6);
        let h = build_spindled(4, SpindleMode::SixDirections);
        let center = h.lattice_vertex(lp(0, 0)).unwrap();
        assert_eq!(h.incident_spindles(center).len(), 12);
        verify_embedding(&h).unwrap();
    }
}
