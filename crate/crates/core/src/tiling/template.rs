//! The eight tile shapes and their per-isometry lattice data.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_rational::BigRational;
use serde::Serialize;

use crate::lattice::{lp, Iso, LatticePoint};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub enum TileType {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
}

impl TileType {
    pub const ALL: [TileType; 8] = [
        TileType::T1,
        TileType::T2,
        TileType::T3,
        TileType::T4,
        TileType::T5,
        TileType::T6,
        TileType::T7,
        TileType::T8,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8"][self.index()]
    }

    pub fn template(self) -> &'static Template {
        &templates()[self.index()]
    }
}

impl std::fmt::Display for TileType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A unit triangle of the lattice: `up` is `{p, p+e1, p+e2}`, otherwise `{p+e1, p+e2, p+e1+e2}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct FaceKey {
    pub base: LatticePoint,
    pub up: bool,
}

impl FaceKey {
    pub fn vertices(self) -> [LatticePoint; 3] {
        let p = self.base;
        if self.up {
            [p, p + lp(1, 0), p + lp(0, 1)]
        } else {
            [p + lp(1, 0), p + lp(1, 1), p + lp(0, 1)]
        }
    }

    /// The face with the given three vertices (in any order).
    pub fn from_vertices(v: [LatticePoint; 3]) -> FaceKey {
        let a = v.iter().map(|p| p.a).min().unwrap();
        let b = v.iter().map(|p| p.b).min().unwrap();
        let base = lp(a, b);
        FaceKey {
            base,
            up: v.contains(&base),
        }
    }

    pub fn translate(self, t: LatticePoint) -> FaceKey {
        FaceKey {
            base: self.base + t,
            up: self.up,
        }
    }
}

/// Corner polygon of one tile shape (counterclockwise) with derived lattice data.
#[derive(Clone, Debug, Serialize)]
pub struct Template {
    pub ty: TileType,
    pub corners: Vec<LatticePoint>,
    /// Lattice points strictly inside.
    pub interior: Vec<LatticePoint>,
    /// Lattice points on the boundary that are not corners.
    pub boundary: Vec<LatticePoint>,
    /// Unit triangles whose interior meets the tile interior.
    pub faces: Vec<FaceKey>,
}

/// Corners in doubled-x / row coordinates: `x = X/2`, `y = Y·√3/2`.
const RAW: [(TileType, &[(i64, i64)]); 8] = [
    (TileType::T1, &[(3, 1), (6, 0), (3, -1)]),
    (TileType::T2, &[(4, 2), (2, 0), (6, 0)]),
    (TileType::T3, &[(1, 1), (6, 0), (3, -1)]),
    (TileType::T4, &[(3, 1), (8, 0), (3, -1)]),
    (TileType::T5, &[(4, 2), (0, 0), (5, -1)]),
    (TileType::T6, &[(3, 1), (7, 1), (7, -1), (3, -1)]),
    (TileType::T7, &[(1, 1), (5, 1), (6, -2), (2, -2)]),
    (TileType::T8, &[(3, 1), (7, 1), (6, -2), (1, -1)]),
];

pub(crate) fn signed_area2(poly: &[LatticePoint]) -> i64 {
    (0..poly.len())
        .map(|i| poly[i].cross(poly[(i + 1) % poly.len()]))
        .sum()
}

/// Closed convex polygon containment: −1 outside, 0 on the boundary, 1 inside.
pub(crate) fn locate(poly: &[LatticePoint], p: LatticePoint) -> i8 {
    let mut on_edge = false;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        match (b - a).cross(p - a).signum() {
            -1 => return -1,
            0 => on_edge = true,
            _ => {}
        }
    }
    if on_edge {
        0
    } else {
        1
    }
}

/// True if the interiors of two convex counterclockwise polygons meet.
pub(crate) fn interiors_meet(p: &[LatticePoint], q: &[LatticePoint]) -> bool {
    let separated_by = |poly: &[LatticePoint], other: &[LatticePoint]| {
        (0..poly.len()).any(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            other.iter().all(|&x| (b - a).cross(x - a) <= 0)
        })
    };
    !separated_by(p, q) && !separated_by(q, p)
}

fn build(ty: TileType, raw: &[(i64, i64)]) -> Template {
    let mut corners: Vec<LatticePoint> = raw.iter().map(|&(x, y)| LatticePoint::from_half_units(x, y)).collect();
    if signed_area2(&corners) < 0 {
        corners.reverse();
    }
    let lo_a = corners.iter().map(|p| p.a).min().unwrap() - 1;
    let hi_a = corners.iter().map(|p| p.a).max().unwrap() + 1;
    let lo_b = corners.iter().map(|p| p.b).min().unwrap() - 1;
    let hi_b = corners.iter().map(|p| p.b).max().unwrap() + 1;
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    let mut faces = Vec::new();
    for b in lo_b..=hi_b {
        for a in lo_a..=hi_a {
            let p = lp(a, b);
            match locate(&corners, p) {
                1 => interior.push(p),
                0 if !corners.contains(&p) => boundary.push(p),
                _ => {}
            }
            for up in [true, false] {
                let f = FaceKey { base: p, up };
                let mut tri = f.vertices().to_vec();
                if signed_area2(&tri) < 0 {
                    tri.reverse();
                }
                if interiors_meet(&corners, &tri) {
                    faces.push(f);
                }
            }
        }
    }
    Template {
        ty,
        corners,
        interior,
        boundary,
        faces,
    }
}

pub fn templates() -> &'static [Template; 8] {
    static T: OnceLock<[Template; 8]> = OnceLock::new();
    T.get_or_init(|| RAW.map(|(ty, raw)| build(ty, raw)))
}

impl Template {
    /// `i_T + b_T / 2`, the number of vertex shares the tile accounts for.
    pub fn shares(&self) -> BigRational {
        BigRational::new((2 * self.interior.len() + self.boundary.len()).into(), 2.into())
    }

    /// Squared side lengths, side `j` running from corner `j` to corner `j+1`.
    pub fn side_norms(&self) -> Vec<i64> {
        let n = self.corners.len();
        (0..n).map(|j| (self.corners[(j + 1) % n] - self.corners[j]).norm2()).collect()
    }
}

/// Image of a template under an isometry, re-ordered counterclockwise.
#[derive(Clone, Debug)]
pub(crate) struct Oriented {
    pub corners: Vec<LatticePoint>,
    pub interior: Vec<LatticePoint>,
    pub faces: Vec<FaceKey>,
}

pub(crate) fn orient_template(t: &Template, iso: Iso) -> Oriented {
    let n = t.corners.len();
    let mut order: Vec<usize> = (0..n).collect();
    if iso.reflect {
        order.reverse();
    }
    Oriented {
        corners: order.iter().map(|&j| iso.apply(t.corners[j])).collect(),
        interior: t.interior.iter().map(|&p| iso.apply(p)).collect(),
        faces: t
            .faces
            .iter()
            .map(|f| FaceKey::from_vertices(f.vertices().map(|p| iso.apply(p))))
            .collect(),
    }
}

/// Maps the cyclic sequence of edge vectors of a counterclockwise corner polygon, read from
/// its first corner, to the tile type, isometry, and the oriented corner index at that start.
pub(crate) fn edge_signature_table() -> &'static HashMap<Vec<LatticePoint>, (TileType, Iso, usize)> {
    static T: OnceLock<HashMap<Vec<LatticePoint>, (TileType, Iso, usize)>> = OnceLock::new();
    T.get_or_init(|| {
        let mut m = HashMap::new();
        for t in templates() {
            for iso in Iso::all() {
                let o = orient_template(t, iso);
                let n = o.corners.len();
                for s in 0..n {
                    let sig: Vec<LatticePoint> =
                        (0..n).map(|j| o.corners[(s + j + 1) % n] - o.corners[(s + j) % n]).collect();
                    m.entry(sig).or_insert((t.ty, iso, s));
                }
            }
        }
        m
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_counts() {
        let want = [(1, 0), (0, 3), (1, 1), (2, 0), (3, 0), (2, 2), (4, 2), (4, 2)];
        for (t, &(i, b)) in templates().iter().zip(&want) {
            assert_eq!((t.interior.len(), t.boundary.len()), (i, b), "{}", t.ty);
            assert!(signed_area2(&t.corners) > 0);
            // Pick's theorem on the triangular lattice: unit triangles = 2i + b_total − 2.
            let b_total = t.boundary.len() + t.corners.len();
            assert_eq!(signed_area2(&t.corners) as usize, 2 * t.interior.len() + b_total - 2);
        }
    }

    #[test]
    fn side_lengths() {
        let sides: Vec<Vec<i64>> = templates()
            .iter()
            .map(|t| {
                let mut s = t.side_norms();
                s.sort_unstable();
                s
            })
            .collect();
        assert_eq!(sides[0], vec![3, 3, 3]);
        assert_eq!(sides[1], vec![4, 4, 4]);
        assert_eq!(sides[2], vec![3, 4, 7]);
        assert_eq!(sides[3], vec![3, 7, 7]);
        assert_eq!(sides[4], vec![7, 7, 7]);
        assert_eq!(sides[5], vec![3, 3, 4, 4]);
        assert_eq!(sides[6], vec![4, 4, 7, 7]);
        assert_eq!(sides[7], vec![4, 4, 7, 7]);
    }

    #[test]
    fn templates_are_convex_and_pairwise_incongruent() {
        for t in templates() {
            let n = t.corners.len();
            for j in 0..n {
                let (a, b, c) = (t.corners[j], t.corners[(j + 1) % n], t.corners[(j + 2) % n]);
                assert!((b - a).cross(c - b) > 0, "{} is not strictly convex", t.ty);
            }
        }
        let table = edge_signature_table();
        for (sig, &(ty, _, _)) in table {
            let again = table.get(sig).unwrap().0;
            assert_eq!(ty, again);
        }
        // 12·corners / |symmetry group| signatures per shape.
        let mut per_type = [0usize; 8];
        for &(ty, _, _) in table.values() {
            per_type[ty.index()] += 1;
        }
        assert_eq!(per_type, [6, 6, 36, 18, 12, 12, 24, 24]);
    }

    #[test]
    fn face_coverage_area() {
        // Every covered face is either inside the tile or cut by one of its sides.
        for t in templates() {
            let inside = t
                .faces
                .iter()
                .filter(|f| f.vertices().iter().all(|&p| locate(&t.corners, p) >= 0))
                .count();
            assert_eq!(inside as i64 <= signed_area2(&t.corners), true);
            assert!(t.faces.len() >= inside);
        }
    }
}
