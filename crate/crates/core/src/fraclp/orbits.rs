use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{Point, QuadExt};
use crate::udgraph::UDGraph;

/// A verified symmetry: rotation by `60·rot` degrees about the graph center, after an
/// optional reflection in the horizontal line through it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Symmetry {
    pub rot: u8,
    pub reflect: bool,
    pub perm: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitPartition {
    blocks: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
    group: Vec<Symmetry>,
}

impl OrbitPartition {
    pub fn trivial(n: usize) -> Self {
        OrbitPartition {
            blocks: (0..n).map(|v| vec![v]).collect(),
            orbit_of: (0..n).collect(),
            group: Vec::new(),
        }
    }

    /// Checks that `blocks` partition `0..n`.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut orbit_of = vec![usize::MAX; n];
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::Invalid(format!("orbit {i} is empty")));
            }
            for &v in b {
                if v >= n || orbit_of[v] != usize::MAX {
                    return Err(Error::Invalid(format!("vertex {v} is out of range or repeated")));
                }
                orbit_of[v] = i;
            }
        }
        if orbit_of.contains(&usize::MAX) {
            return Err(Error::Invalid("orbits do not cover every vertex".into()));
        }
        Ok(OrbitPartition {
            blocks,
            orbit_of,
            group: Vec::new(),
        })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn orbit_of(&self, v: usize) -> usize {
        self.orbit_of[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.orbit_of.len()
    }

    /// Symmetries that produced the partition (empty unless built by `geometric_orbits`).
    pub fn group(&self) -> &[Symmetry] {
        &self.group
    }

    /// Sorted orbit sizes.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(Vec::len).collect();
        s.sort_unstable();
        s
    }

    /// Each stored symmetry must map every block onto a block.
    pub fn check_group(&self) -> Result<()> {
        for s in &self.group {
            for b in &self.blocks {
                let o = self.orbit_of[s.perm[b[0]]];
                if b.iter().any(|&v| self.orbit_of[s.perm[v]] != o) {
                    return Err(Error::Invalid("symmetry does not permute the orbits".into()));
                }
            }
        }
        Ok(())
    }
}

fn half() -> QuadExt {
    QuadExt::from_ratio(1, 2)
}

fn half_sqrt3() -> QuadExt {
    QuadExt::from_parts([0, 1, 0, 0], 2)
}

fn transform(p: &Point, center: &Point, rot: u8, reflect: bool) -> Point {
    let mut v = p.sub(center);
    if reflect {
        v.y = -v.y;
    }
    let (c, s) = (half(), half_sqrt3());
    for _ in 0..rot {
        v = Point::new(&(&c * &v.x) - &(&s * &v.y), &(&s * &v.x) + &(&c * &v.y));
    }
    center.add(&v)
}

/// The permutation induced by one dihedral element, if it is a role- and spindle-preserving
/// graph automorphism.
fn try_symmetry(g: &UDGraph, index: &HashMap<&Point, usize>, rot: u8, reflect: bool) -> Option<Symmetry> {
    let center = g.center();
    let mut perm = Vec::with_capacity(g.n());
    for v in g.vertices() {
        let img = transform(&v.pos, center, rot, reflect);
        let &u = index.get(&img)?;
        if g.vertex(u).role != v.role {
            return None;
        }
        perm.push(u);
    }
    for (u, v) in g.edges() {
        if !g.adjacent(perm[u], perm[v]) {
            return None;
        }
    }
    let key = |s: &crate::udgraph::Spindle| {
        let mut k = s.verts.to_vec();
        k.sort_unstable();
        (s.bottom, s.top, k)
    };
    let spindles: HashSet<_> = g.spindles().iter().map(key).collect();
    for s in g.spindles() {
        let mut k: Vec<usize> = s.verts.iter().map(|&v| perm[v]).collect();
        k.sort_unstable();
        let (b, t) = (perm[s.bottom], perm[s.top]);
        if !spindles.contains(&(b, t, k.clone())) && !spindles.contains(&(t, b, k)) {
            return None;
        }
    }
    Some(Symmetry { rot, reflect, perm })
}

/// Orbits under the rotations by multiples of 60° and the six reflections about the graph
/// center that survive the automorphism check.
pub fn geometric_orbits(g: &UDGraph) -> OrbitPartition {
    let index: HashMap<&Point, usize> = g.vertices().iter().enumerate().map(|(i, v)| (&v.pos, i)).collect();
    let group: Vec<Symmetry> = (0..6u8)
        .flat_map(|rot| [false, true].map(|reflect| (rot, reflect)))
        .filter_map(|(rot, reflect)| try_symmetry(g, &index, rot, reflect))
        .collect();
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for s in &group {
        for (v, &u) in s.perm.iter().enumerate() {
            let (a, b) = (find(&mut parent, v), find(&mut parent, u));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..g.n() {
        let r = find(&mut parent, v);
        by_root.entry(r).or_default().push(v);
    }
    let blocks: Vec<Vec<usize>> = by_root.into_values().collect();
    let mut p = OrbitPartition::from_blocks(g.n(), blocks).expect("union-find yields a partition");
    p.group = group;
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::udgraph::{build_core, build_fisher_ullman, build_golomb, build_moser_spindle};

    #[test]
    fn core_two_orbits() {
        let p = geometric_orbits(&build_core(2));
        assert_eq!(p.sizes(), vec![1, 6, 6, 6]);
        assert_eq!(p.group().len(), 12);
        p.check_group().unwrap();
    }

    #[test]
    fn fisher_ullman_has_threefold_rotations() {
        let g = build_fisher_ullman();
        let p = geometric_orbits(&g);
        let mut rots: Vec<(u8, bool)> = p.group().iter().map(|s| (s.rot, s.reflect)).collect();
        rots.sort_unstable();
        assert_eq!(rots, vec![(0, false), (2, false), (4, false)]);
        assert_eq!(p.len(), 19);
        // Weights are constant on orbits.
        for b in p.blocks() {
            assert!(b.iter().all(|&v| g.vertex(v).weight == g.vertex(b[0]).weight));
        }
    }

    #[test]
    fn small_graph_groups() {
        // The Moser spindle has only the identity among symmetries about its bottom vertex.
        assert_eq!(geometric_orbits(&build_moser_spindle()).len(), 7);
        // The tilted triangle of the Golomb graph leaves only the rotations by 120°.
        assert_eq!(geometric_orbits(&build_golomb()).group().len(), 3);
    }
}
