//! Exact arithmetic in Q(√3, √11) and planar predicates over it.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::ExactError;

/// Element `a + b√3 + c√11 + d√33` with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadExt {
    a: BigRational,
    b: BigRational,
    c: BigRational,
    d: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl QuadExt {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        QuadExt { a, b, c, d }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n, 1))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    pub fn from_rational(a: BigRational) -> Self {
        QuadExt {
            a,
            ..Default::default()
        }
    }

    /// `(a + b√3 + c√11 + d√33)` from small integer ratios sharing one denominator.
    pub fn from_parts(parts: [i64; 4], den: i64) -> Self {
        QuadExt {
            a: rat(parts[0], den),
            b: rat(parts[1], den),
            c: rat(parts[2], den),
            d: rat(parts[3], den),
        }
    }

    pub fn sqrt3() -> Self {
        Self::from_parts([0, 1, 0, 0], 1)
    }

    pub fn sqrt11() -> Self {
        Self::from_parts([0, 0, 1, 0], 1)
    }

    pub fn sqrt33() -> Self {
        Self::from_parts([0, 0, 0, 1], 1)
    }

    pub fn coeffs(&self) -> [&BigRational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    /// The rational value, if the irrational parts vanish.
    pub fn as_rational(&self) -> Option<&BigRational> {
        (self.b.is_zero() && self.c.is_zero() && self.d.is_zero()).then_some(&self.a)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        QuadExt {
            a: &self.a * k,
            b: &self.b * k,
            c: &self.c * k,
            d: &self.d * k,
        }
    }

    /// Conjugate under √11 ↦ −√11.
    fn conj11(&self) -> Self {
        QuadExt {
            a: self.a.clone(),
            b: self.b.clone(),
            c: -&self.c,
            d: -&self.d,
        }
    }

    pub fn checked_div(&self, rhs: &QuadExt) -> Result<QuadExt, ExactError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn inv(&self) -> Result<QuadExt, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        // x = p + q√11 with p, q in Q(√3); x·conj11(x) = p² − 11q² lies in Q(√3).
        let conj = self.conj11();
        let norm = self * &conj;
        debug_assert!(norm.c.is_zero() && norm.d.is_zero());
        let (s, t) = (&norm.a, &norm.b);
        let den = s * s - t * t * rat(3, 1);
        let inv_norm = QuadExt {
            a: s / &den,
            b: -(t / &den),
            ..Default::default()
        };
        Ok(&conj * &inv_norm)
    }

    pub fn sign(&self) -> i8 {
        let p = (&self.a, &self.b);
        let q = (&self.c, &self.d);
        let sp = sign_q3(p.0, p.1);
        let sq = sign_q3(q.0, q.1);
        if sq == 0 || sp == sq {
            return if sp == 0 { sq } else { sp };
        }
        if sp == 0 {
            return sq;
        }
        // Opposite signs: compare p² against 11 q², both in Q(√3).
        let p2 = (p.0 * p.0 + p.1 * p.1 * rat(3, 1), p.0 * p.1 * rat(2, 1));
        let q2 = (q.0 * q.0 + q.1 * q.1 * rat(3, 1), q.0 * q.1 * rat(2, 1));
        let eleven = rat(11, 1);
        let diff = sign_q3(&(p2.0 - &q2.0 * &eleven), &(p2.1 - &q2.1 * &eleven));
        if diff > 0 {
            sp
        } else {
            sq
        }
    }

    pub fn to_f64(&self) -> f64 {
        let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
        f(&self.a)
            + f(&self.b) * 3f64.sqrt()
            + f(&self.c) * 11f64.sqrt()
            + f(&self.d) * 33f64.sqrt()
    }
}

/// Sign of `a + b√3`.
fn sign_q3(a: &BigRational, b: &BigRational) -> i8 {
    let sa = signum(a);
    let sb = signum(b);
    if sb == 0 || sa == sb {
        return if sa == 0 { sb } else { sa };
    }
    if sa == 0 {
        return sb;
    }
    match (a * a).cmp(&(b * b * rat(3, 1))) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => unreachable!("√3 is irrational"),
    }
}

fn signum(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign().cmp(&0)
    }
}

impl<'a> Add<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn add(self, r: &QuadExt) -> QuadExt {
        QuadExt {
            a: &self.a + &r.a,
            b: &self.b + &r.b,
            c: &self.c + &r.c,
            d: &self.d + &r.d,
        }
    }
}

impl<'a> Sub<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn sub(self, r: &QuadExt) -> QuadExt {
        QuadExt {
            a: &self.a - &r.a,
            b: &self.b - &r.b,
            c: &self.c - &r.c,
            d: &self.d - &r.d,
        }
    }
}

impl<'a> Mul<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn mul(self, r: &QuadExt) -> QuadExt {
        let (a1, b1, c1, d1) = (&self.a, &self.b, &self.c, &self.d);
        let (a2, b2, c2, d2) = (&r.a, &r.b, &r.c, &r.d);
        let k3 = rat(3, 1);
        let k11 = rat(11, 1);
        let k33 = rat(33, 1);
        QuadExt {
            a: a1 * a2 + b1 * b2 * &k3 + c1 * c2 * &k11 + d1 * d2 * &k33,
            b: a1 * b2 + b1 * a2 + (c1 * d2 + d1 * c2) * &k11,
            c: a1 * c2 + c1 * a2 + (b1 * d2 + d1 * b2) * &k3,
            d: a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        }
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, r: QuadExt) -> QuadExt {
                (&self).$m(&r)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (r, unit) in [(&self.a, ""), (&self.b, "√3"), (&self.c, "√11"), (&self.d, "√33")] {
            if !r.is_zero() {
                terms.push(if unit.is_empty() {
                    format!("{r}")
                } else if r.is_one() {
                    unit.to_string()
                } else {
                    format!("({r}){unit}")
                });
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Serialized as eight integers: four numerators then four denominators.
impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(8))?;
        for r in self.coeffs() {
            seq.serialize_element(&crate::json::BigIntJson(r.numer()))?;
        }
        for r in self.coeffs() {
            seq.serialize_element(&crate::json::BigIntJson(r.denom()))?;
        }
        seq.end()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize)]
pub struct Point {
    pub x: QuadExt,
    pub y: QuadExt,
}

impl Point {
    pub fn new(x: QuadExt, y: QuadExt) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Self::default()
    }

    pub fn add(&self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::Counterclockwise,
            Orientation::Counterclockwise => Orientation::Clockwise,
        }
    }
}

/// Rotation by θ = arccos(5/6) about `center`.
#[derive(Clone, Debug)]
pub struct RotationSpec {
    pub center: Point,
    pub orientation: Orientation,
}

impl RotationSpec {
    pub fn new(center: Point, orientation: Orientation) -> Self {
        RotationSpec {
            center,
            orientation,
        }
    }

    pub fn cos() -> QuadExt {
        QuadExt::from_ratio(5, 6)
    }

    pub fn sin() -> QuadExt {
        QuadExt::from_parts([0, 0, 1, 0], 6)
    }
}

pub fn dist2(p: &Point, q: &Point) -> QuadExt {
    let dx = &p.x - &q.x;
    let dy = &p.y - &q.y;
    &(&dx * &dx) + &(&dy * &dy)
}

pub fn rotate(p: &Point, spec: &RotationSpec) -> Point {
    let c = RotationSpec::cos();
    let s = match spec.orientation {
        Orientation::Counterclockwise => RotationSpec::sin(),
        Orientation::Clockwise => -RotationSpec::sin(),
    };
    let v = p.sub(&spec.center);
    let x = &(&c * &v.x) - &(&s * &v.y);
    let y = &(&s * &v.x) + &(&c * &v.y);
    spec.center.add(&Point::new(x, y))
}

/// Sign of the cross product (b − a) × (c − a).
pub fn orient(a: &Point, b: &Point, c: &Point) -> i8 {
    let u = b.sub(a);
    let v = c.sub(a);
    (&(&u.x * &v.y) - &(&u.y * &v.x)).sign()
}

fn dot_sign(a: &Point, b: &Point, c: &Point) -> i8 {
    let u = b.sub(a);
    let v = c.sub(a);
    (&(&u.x * &v.x) + &(&u.y * &v.y)).sign()
}

/// True iff the open segments meet in exactly one point interior to both.
pub fn segments_cross(s1: (&Point, &Point), s2: (&Point, &Point)) -> Result<bool, ExactError> {
    let (a, b) = s1;
    let (c, d) = s2;
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 == 0 && o2 == 0 {
        // Collinear: overlapping interiors are malformed, anything else is disjoint.
        let overlap = |p: &Point, q: &Point, r: &Point| dot_sign(r, p, q) < 0;
        let shared = |p: &Point| p == c || p == d;
        let inside_ab = |p: &Point| overlap(a, b, p);
        let inside_cd = |p: &Point| overlap(c, d, p);
        let touching = inside_ab(c) || inside_ab(d) || inside_cd(a) || inside_cd(b);
        let same = shared(a) && shared(b);
        if touching || same {
            return Err(ExactError::CollinearOverlap);
        }
        return Ok(false);
    }
    Ok(o1 * o2 < 0 && o3 * o4 < 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(parts: [i64; 4], den: i64) -> QuadExt {
        QuadExt::from_parts(parts, den)
    }

    #[test]
    fn basis_products() {
        let one_p = q([1, 1, 0, 0], 1);
        let one_m = q([1, -1, 0, 0], 1);
        assert_eq!(&one_p * &one_m, QuadExt::from_int(-2));
        assert_eq!(&QuadExt::sqrt3() * &QuadExt::sqrt11(), QuadExt::sqrt33());
        assert_eq!(&QuadExt::sqrt3() * &QuadExt::sqrt33(), q([0, 0, 3, 0], 1));
        assert_eq!(&QuadExt::sqrt11() * &QuadExt::sqrt33(), q([0, 11, 0, 0], 1));
        assert_eq!(&QuadExt::sqrt33() * &QuadExt::sqrt33(), QuadExt::from_int(33));
        let c = RotationSpec::cos();
        let s = RotationSpec::sin();
        assert_eq!(&(&c * &c) + &(&s * &s), QuadExt::one());
    }

    #[test]
    fn signs() {
        assert_eq!(q([-5, 0, 0, 1], 1).sign(), 1);
        assert_eq!(QuadExt::zero().sign(), 0);
        assert_eq!(q([6, 0, 0, -1], 1).sign(), 1);
        assert_eq!(q([0, 2, -1, 0], 1).sign(), 1); // 2√3 ≈ 3.46 > √11
        assert_eq!(q([0, -2, 1, 0], 1).sign(), -1);
    }

    #[test]
    fn division() {
        let x = q([1, 2, -3, 1], 5);
        let inv = x.inv().unwrap();
        assert_eq!(&x * &inv, QuadExt::one());
        assert!(matches!(
            QuadExt::one().checked_div(&QuadExt::zero()),
            Err(ExactError::DivisionByZero)
        ));
    }

    #[test]
    fn rotation_examples() {
        let p = Point::new(QuadExt::zero(), QuadExt::sqrt3());
        let r = rotate(&p, &RotationSpec::new(Point::origin(), Orientation::Clockwise));
        assert_eq!(r, Point::new(q([0, 0, 0, 1], 6), q([0, 5, 0, 0], 6)));
        assert_eq!(dist2(&r, &Point::origin()), QuadExt::from_int(3));
        assert_eq!(dist2(&p, &r), QuadExt::one());
        let fixed = rotate(&p, &RotationSpec::new(p.clone(), Orientation::Counterclockwise));
        assert_eq!(fixed, p);
    }

    #[test]
    fn crossing_examples() {
        let pt = |x: i64, y: i64| Point::new(QuadExt::from_int(x), QuadExt::from_int(y));
        let (o, a, b, c) = (pt(0, 0), pt(2, 0), pt(1, -1), pt(1, 1));
        assert!(segments_cross((&o, &a), (&b, &c)).unwrap());
        let (e, f) = (pt(1, 0), pt(2, 1));
        assert!(!segments_cross((&o, &e), (&e, &f)).unwrap());
        assert!(matches!(
            segments_cross((&o, &a), (&e, &pt(3, 0))),
            Err(ExactError::CollinearOverlap)
        ));
        assert!(!segments_cross((&o, &e), (&a, &pt(3, 0))).unwrap());
    }
}
