use serde::Serialize;

use crate::lattice::UNIT;
use crate::udgraph::UDGraph;

/// The coloring `(a + 3b) mod 7` of a lattice core.
#[derive(Clone, Debug, Serialize)]
pub struct SevenColoring {
    /// Color of each core vertex (spindle vertices get 7).
    pub color: Vec<u8>,
    pub class_sizes: [usize; 7],
    pub largest: u8,
    /// Vertices of the largest class whose closed neighborhood lies in the core.
    pub interior_class: Vec<usize>,
    pub interior_class_size: usize,
}

impl SevenColoring {
    pub fn class<'a>(&'a self, g: &UDGraph, c: u8) -> Vec<usize> {
        (0..g.n()).filter(|&v| self.color[v] == c).collect()
    }
}

/// Same-colored points differ by a nonzero multiple-of-7 combination, which is at lattice
/// distance at least 3; the closed neighborhoods of one class are therefore disjoint.
pub fn seven_coloring(g: &UDGraph) -> SevenColoring {
    let color: Vec<u8> = g
        .vertices()
        .iter()
        .map(|v| match v.lattice {
            Some(p) if g.lattice_vertex(p).is_some() => (p.a + 3 * p.b).rem_euclid(7) as u8,
            _ => 7,
        })
        .collect();
    let mut class_sizes = [0usize; 7];
    for &c in color.iter().filter(|&&c| c < 7) {
        class_sizes[c as usize] += 1;
    }
    let interior = |c: u8| -> Vec<usize> {
        (0..g.n())
            .filter(|&v| color[v] == c)
            .filter(|&v| {
                let p = g.vertex(v).lattice.unwrap();
                UNIT.iter().all(|&u| g.lattice_vertex(p + u).is_some())
            })
            .collect()
    };
    let largest = (0..7u8)
        .max_by_key(|&c| (interior(c).len(), class_sizes[c as usize], std::cmp::Reverse(c)))
        .unwrap();
    let interior_class = interior(largest);
    SevenColoring {
        color,
        class_sizes,
        largest,
        interior_class_size: interior_class.len(),
        interior_class,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticePoint;
    use crate::udgraph::build_core;

    fn hex_dist(p: LatticePoint) -> i64 {
        if p.a.signum() * p.b.signum() >= 0 {
            p.a.abs() + p.b.abs()
        } else {
            p.a.abs().max(p.b.abs())
        }
    }

    #[test]
    fn classes_are_spread() {
        let g = build_core(6);
        let c = seven_coloring(&g);
        assert_eq!(c.class_sizes.iter().sum::<usize>(), g.n());
        for u in 0..g.n() {
            for &w in g.neighbors(u) {
                assert_ne!(c.color[u], c.color[w]);
            }
            for v in u + 1..g.n() {
                if c.color[u] == c.color[v] {
                    let p = g.vertex(u).lattice.unwrap() - g.vertex(v).lattice.unwrap();
                    assert!(hex_dist(p) >= 3);
                }
            }
        }
    }

    #[test]
    fn density_approaches_one_seventh() {
        for (d, lo) in [(8u32, 0.10), (16, 0.125)] {
            let g = build_core(d);
            let c = seven_coloring(&g);
            let frac = c.interior_class_size as f64 / g.n() as f64;
            assert!(frac > lo && frac <= 1.0 / 7.0 + 0.01, "{d}: {frac}");
        }
    }
}
