//! Integer coordinates on the triangular lattice.
//!
//! A lattice point `(a, b)` sits at `a·e1 + b·e2` with `e1 = (1, 0)` and
//! `e2 = (1/2, √3/2)`. Squared length is `a² + ab + b²`. Any orientation
//! test can be done on `(a, b)` directly since the basis change has positive
//! determinant.

use std::cmp::Ordering;
use std::ops::{Add, Neg, Sub};

use serde::Serialize;

use crate::exactnum::{Point, QuadExt};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize)]
pub struct LatticePoint {
    pub a: i64,
    pub b: i64,
}

pub const fn lp(a: i64, b: i64) -> LatticePoint {
    LatticePoint { a, b }
}

/// Unit vectors at angles 0°, 60°, ..., 300°.
pub const UNIT: [LatticePoint; 6] = [lp(1, 0), lp(0, 1), lp(-1, 1), lp(-1, 0), lp(0, -1), lp(1, -1)];

/// Length-√3 vectors at angles 30°, 90°, ..., 330°; `SQRT3[k] = UNIT[k] + UNIT[k+1]`.
pub const SQRT3: [LatticePoint; 6] = [lp(1, 1), lp(-1, 2), lp(-2, 1), lp(-1, -1), lp(1, -2), lp(2, -1)];

impl LatticePoint {
    pub fn norm2(self) -> i64 {
        self.a * self.a + self.a * self.b + self.b * self.b
    }

    /// Cross product in lattice coordinates (a positive multiple of the Cartesian one).
    pub fn cross(self, o: LatticePoint) -> i64 {
        self.a * o.b - self.b * o.a
    }

    /// Twice the Cartesian dot product.
    pub fn dot2(self, o: LatticePoint) -> i64 {
        2 * self.a * o.a + self.a * o.b + self.b * o.a + 2 * self.b * o.b
    }

    pub fn rot60(self) -> LatticePoint {
        lp(-self.b, self.a + self.b)
    }

    /// Mirror across the x-axis.
    pub fn reflect(self) -> LatticePoint {
        lp(self.a + self.b, -self.b)
    }

    pub fn scale(self, k: i64) -> LatticePoint {
        lp(self.a * k, self.b * k)
    }

    pub fn to_point(self) -> Point {
        Point::new(
            QuadExt::from_ratio(2 * self.a + self.b, 2),
            QuadExt::from_parts([0, self.b, 0, 0], 2),
        )
    }

    pub fn to_f64(self) -> (f64, f64) {
        (self.a as f64 + self.b as f64 / 2.0, self.b as f64 * 3f64.sqrt() / 2.0)
    }

    /// From doubled-x / unit-row coordinates `(X, Y)` with `x = X/2`, `y = Y·√3/2`.
    pub fn from_half_units(x: i64, y: i64) -> LatticePoint {
        assert!((x - y) % 2 == 0, "({x},{y}) is not a lattice point");
        lp((x - y) / 2, y)
    }

    /// Index `k` with `self == UNIT[k]`.
    pub fn unit_index(self) -> Option<usize> {
        UNIT.iter().position(|&u| u == self)
    }

    pub fn sqrt3_index(self) -> Option<usize> {
        SQRT3.iter().position(|&u| u == self)
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, o: LatticePoint) -> LatticePoint {
        lp(self.a + o.a, self.b + o.b)
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, o: LatticePoint) -> LatticePoint {
        lp(self.a - o.a, self.b - o.b)
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        lp(-self.a, -self.b)
    }
}

/// Orientation of `(b − a, c − a)`.
pub fn orient(a: LatticePoint, b: LatticePoint, c: LatticePoint) -> i64 {
    (b - a).cross(c - a).signum()
}

/// Cyclic counterclockwise order of nonzero vectors starting at angle 0.
pub fn angle_cmp(u: LatticePoint, v: LatticePoint) -> Ordering {
    let half = |p: LatticePoint| if p.b > 0 || (p.b == 0 && p.a > 0) { 0 } else { 1 };
    half(u).cmp(&half(v)).then_with(|| 0.cmp(&u.cross(v)))
}

/// Element of the 12-element point group of the lattice: optional reflection, then rotation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct Iso {
    pub rot: u8,
    pub reflect: bool,
}

impl Iso {
    pub fn all() -> impl Iterator<Item = Iso> {
        (0..12u8).map(|i| Iso {
            rot: i % 6,
            reflect: i >= 6,
        })
    }

    pub fn identity() -> Iso {
        Iso {
            rot: 0,
            reflect: false,
        }
    }

    pub fn apply(self, p: LatticePoint) -> LatticePoint {
        let mut q = if self.reflect { p.reflect() } else { p };
        for _ in 0..self.rot {
            q = q.rot60();
        }
        q
    }
}

/// Lattice isometry `p ↦ iso(p) + shift`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct Placement {
    pub iso: Iso,
    pub shift: LatticePoint,
}

impl Placement {
    pub fn apply(&self, p: LatticePoint) -> LatticePoint {
        self.iso.apply(p) + self.shift
    }
}

/// Lattice points within Euclidean distance `d` of the origin, in scan order (row, then column).
pub fn disk(d: i64) -> Vec<LatticePoint> {
    let r = 2 * d + 1;
    let mut pts: Vec<LatticePoint> = (-r..=r)
        .flat_map(|b| (-r..=r).map(move |a| lp(a, b)))
        .filter(|p| p.norm2() <= d * d)
        .collect();
    pts.sort_by_key(|p| (p.b, 2 * p.a + p.b));
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::dist2;

    #[test]
    fn basis_vectors() {
        for k in 0..6 {
            assert_eq!(UNIT[k].norm2(), 1);
            assert_eq!(SQRT3[k].norm2(), 3);
            assert_eq!(SQRT3[k], UNIT[k] + UNIT[(k + 1) % 6]);
            assert_eq!(UNIT[k].rot60(), UNIT[(k + 1) % 6]);
        }
        assert_eq!(SQRT3[1].to_point(), Point::new(QuadExt::zero(), QuadExt::sqrt3()));
    }

    #[test]
    fn norm_matches_exact_distance() {
        for p in disk(4) {
            assert_eq!(dist2(&p.to_point(), &Point::origin()), QuadExt::from_int(p.norm2()));
        }
    }

    #[test]
    fn isometries_preserve_norm_and_orientation_rules() {
        let p = lp(3, -1);
        let q = lp(-2, 5);
        for g in Iso::all() {
            assert_eq!(g.apply(p).norm2(), p.norm2());
            let c = g.apply(p).cross(g.apply(q));
            assert_eq!(c.signum() * if g.reflect { -1 } else { 1 }, p.cross(q).signum());
        }
    }

    #[test]
    fn disk_counts() {
        assert_eq!(disk(0).len(), 1);
        assert_eq!(disk(1).len(), 7);
        assert_eq!(disk(2).len(), 19);
        assert_eq!(disk(3).len(), 37);
    }

    #[test]
    fn angle_order_is_ccw() {
        let mut v = UNIT.to_vec();
        v.reverse();
        v.sort_by(|a, b| angle_cmp(*a, *b));
        assert_eq!(v, UNIT.to_vec());
    }
}
