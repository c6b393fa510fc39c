//! Exact planar lattice geometry over `Z²`.
//!
//! Integer vectors carry directions; rational points carry positions, since
//! surgered base diagrams have rational vertices. Unimodular maps are
//! `GL(2, Z)` linear parts with rational translations.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("vector {0} is not primitive")]
    NotPrimitive(String),
    #[error("vectors {0} and {1} are linearly dependent")]
    Dependent(String, String),
    #[error("the constrained linear map is not integral")]
    NoIntegralSolution,
    #[error("determinant {0} is not allowed here")]
    NotUnimodular(BigInt),
    #[error("polygon needs at least three non-collinear vertices")]
    Degenerate,
    #[error("polygon is not convex")]
    NotConvex,
}

impl LatticeError {
    /// Variant name, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            LatticeError::ZeroVector => "ZeroVector",
            LatticeError::NotPrimitive(_) => "NotPrimitive",
            LatticeError::Dependent(..) => "Dependent",
            LatticeError::NoIntegralSolution => "NoIntegralSolution",
            LatticeError::NotUnimodular(_) => "NotUnimodular",
            LatticeError::Degenerate => "Degenerate",
            LatticeError::NotConvex => "NotConvex",
        }
    }
}

/// Rational from an integer.
pub fn rat(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// Exact integer vector in `Z²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "VectorJson", into = "VectorJson")]
pub struct LatticeVector {
    pub x: BigInt,
    pub y: BigInt,
}

#[derive(Serialize, Deserialize)]
struct VectorJson(
    #[serde(with = "crate::json::int_string")] BigInt,
    #[serde(with = "crate::json::int_string")] BigInt,
);

impl From<VectorJson> for LatticeVector {
    fn from(j: VectorJson) -> Self {
        LatticeVector { x: j.0, y: j.1 }
    }
}

impl From<LatticeVector> for VectorJson {
    fn from(v: LatticeVector) -> Self {
        VectorJson(v.x, v.y)
    }
}

impl LatticeVector {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        LatticeVector {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn zero() -> Self {
        LatticeVector::new(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// `det[self | other]`.
    pub fn det(&self, other: &LatticeVector) -> BigInt {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn dot(&self, other: &LatticeVector) -> BigInt {
        &self.x * &other.x + &self.y * &other.y
    }

    pub fn scale(&self, k: &BigInt) -> LatticeVector {
        LatticeVector {
            x: &self.x * k,
            y: &self.y * k,
        }
    }

    /// Gcd of the coordinates; zero for the zero vector.
    pub fn affine_length(&self) -> BigInt {
        self.x.gcd(&self.y)
    }

    pub fn is_primitive(&self) -> bool {
        self.affine_length().is_one()
    }

    /// Splits `self = λ·p` with `p` primitive and `λ > 0`.
    pub fn primitive_part(&self) -> Result<(LatticeVector, BigInt), LatticeError> {
        if self.is_zero() {
            return Err(LatticeError::ZeroVector);
        }
        let g = self.affine_length();
        Ok((
            LatticeVector {
                x: &self.x / &g,
                y: &self.y / &g,
            },
            g,
        ))
    }

    /// Quarter turn clockwise: `(x, y) -> (y, -x)`.
    pub fn rotate_cw(&self) -> LatticeVector {
        LatticeVector {
            x: self.y.clone(),
            y: -&self.x,
        }
    }

    pub fn to_point(&self) -> Point {
        Point::new(rat(self.x.clone()), rat(self.y.clone()))
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, o: &LatticeVector) -> LatticeVector {
        LatticeVector {
            x: &self.x + &o.x,
            y: &self.y + &o.y,
        }
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, o: &LatticeVector) -> LatticeVector {
        LatticeVector {
            x: &self.x - &o.x,
            y: &self.y - &o.y,
        }
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector {
            x: -&self.x,
            y: -&self.y,
        }
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        -&self
    }
}

/// Exact rational point (or displacement) in `Q²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "PointJson", into = "PointJson")]
pub struct Point {
    pub x: BigRational,
    pub y: BigRational,
}

#[derive(Serialize, Deserialize)]
struct PointJson(
    #[serde(with = "crate::json::rational")] BigRational,
    #[serde(with = "crate::json::rational")] BigRational,
);

impl From<PointJson> for Point {
    fn from(j: PointJson) -> Self {
        Point { x: j.0, y: j.1 }
    }
}

impl From<Point> for PointJson {
    fn from(p: Point) -> Self {
        PointJson(p.x, p.y)
    }
}

impl Point {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        Point::new(rat(x), rat(y))
    }

    pub fn origin() -> Self {
        Point::from_ints(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn det(&self, other: &Point) -> BigRational {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn dot(&self, other: &Point) -> BigRational {
        &self.x * &other.x + &self.y * &other.y
    }

    pub fn scale(&self, k: &BigRational) -> Point {
        Point::new(&self.x * k, &self.y * k)
    }

    /// `self + k·v` for a lattice direction `v`.
    pub fn offset(&self, v: &LatticeVector, k: &BigRational) -> Point {
        Point::new(
            &self.x + k * rat(v.x.clone()),
            &self.y + k * rat(v.y.clone()),
        )
    }

    pub fn is_integral(&self) -> bool {
        self.x.is_integer() && self.y.is_integer()
    }

    pub fn to_lattice(&self) -> Option<LatticeVector> {
        self.is_integral()
            .then(|| LatticeVector::new(self.x.to_integer(), self.y.to_integer()))
    }

    /// Splits a rational displacement as `λ·p`, `p` primitive integral,
    /// `λ` a positive rational.
    pub fn primitive_part(&self) -> Result<(LatticeVector, BigRational), LatticeError> {
        if self.is_zero() {
            return Err(LatticeError::ZeroVector);
        }
        let den = self.x.denom().lcm(self.y.denom());
        let scaled = LatticeVector::new(
            self.x.numer() * (&den / self.x.denom()),
            self.y.numer() * (&den / self.y.denom()),
        );
        let (dir, g) = scaled.primitive_part()?;
        Ok((dir, BigRational::new(g, den)))
    }

    /// Affine length of a displacement; zero for the zero vector.
    pub fn affine_length(&self) -> BigRational {
        self.primitive_part()
            .map(|(_, l)| l)
            .unwrap_or_else(|_| BigRational::zero())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-&self.x, -&self.y)
    }
}

/// Splits a (possibly rational) vector into primitive direction and affine
/// length.
pub fn primitive_part(v: &Point) -> Result<(LatticeVector, BigRational), LatticeError> {
    v.primitive_part()
}

/// `x ↦ M·x + t` with `M ∈ GL(2, Z)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MapJson", into = "MapJson")]
pub struct UnimodularMap {
    m: [[BigInt; 2]; 2],
    t: Point,
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    #[serde(with = "matrix_strings")]
    matrix: [[BigInt; 2]; 2],
    translation: Point,
}

mod matrix_strings {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Row(
        #[serde(with = "crate::json::int_array")] [BigInt; 2],
    );

    pub fn serialize<S: Serializer>(m: &[[BigInt; 2]; 2], s: S) -> Result<S::Ok, S::Error> {
        [Row(m[0].clone()), Row(m[1].clone())].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[[BigInt; 2]; 2], D::Error> {
        let [Row(r0), Row(r1)] = <[Row; 2]>::deserialize(d)?;
        Ok([r0, r1])
    }
}

impl TryFrom<MapJson> for UnimodularMap {
    type Error = LatticeError;
    fn try_from(j: MapJson) -> Result<Self, Self::Error> {
        UnimodularMap::new(j.matrix, j.translation)
    }
}

impl From<UnimodularMap> for MapJson {
    fn from(u: UnimodularMap) -> Self {
        MapJson {
            matrix: u.m,
            translation: u.t,
        }
    }
}

fn det2(m: &[[BigInt; 2]; 2]) -> BigInt {
    &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
}

fn mat_mul(a: &[[BigInt; 2]; 2], b: &[[BigInt; 2]; 2]) -> [[BigInt; 2]; 2] {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

impl UnimodularMap {
    pub fn new(m: [[BigInt; 2]; 2], t: Point) -> Result<Self, LatticeError> {
        let d = det2(&m);
        if !d.abs().is_one() {
            return Err(LatticeError::NotUnimodular(d));
        }
        Ok(UnimodularMap { m, t })
    }

    pub fn linear(m: [[BigInt; 2]; 2]) -> Result<Self, LatticeError> {
        UnimodularMap::new(m, Point::origin())
    }

    /// Convenience for small literal matrices `[[a, b], [c, d]]`.
    pub fn from_rows(rows: [[i64; 2]; 2]) -> Result<Self, LatticeError> {
        let m = rows.map(|r| r.map(BigInt::from));
        UnimodularMap::linear(m)
    }

    pub fn identity() -> Self {
        UnimodularMap {
            m: [
                [BigInt::one(), BigInt::zero()],
                [BigInt::zero(), BigInt::one()],
            ],
            t: Point::origin(),
        }
    }

    pub fn translation(t: Point) -> Self {
        UnimodularMap {
            t,
            ..UnimodularMap::identity()
        }
    }

    /// `x ↦ center + M·(x - center)`, using only the linear part of `self`.
    pub fn centered_at(&self, center: &Point) -> Self {
        let moved = self.apply_displacement(center);
        UnimodularMap {
            m: self.m.clone(),
            t: center - &moved,
        }
    }

    pub fn matrix(&self) -> &[[BigInt; 2]; 2] {
        &self.m
    }

    pub fn translation_part(&self) -> &Point {
        &self.t
    }

    pub fn det(&self) -> BigInt {
        det2(&self.m)
    }

    pub fn is_linear(&self) -> bool {
        self.t.is_zero()
    }

    pub fn apply_vector(&self, v: &LatticeVector) -> LatticeVector {
        LatticeVector {
            x: &self.m[0][0] * &v.x + &self.m[0][1] * &v.y,
            y: &self.m[1][0] * &v.x + &self.m[1][1] * &v.y,
        }
    }

    /// Linear part applied to a rational displacement.
    pub fn apply_displacement(&self, v: &Point) -> Point {
        let e = |i: usize| rat(self.m[i][0].clone()) * &v.x + rat(self.m[i][1].clone()) * &v.y;
        Point::new(e(0), e(1))
    }

    pub fn apply_point(&self, p: &Point) -> Point {
        &self.apply_displacement(p) + &self.t
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &UnimodularMap) -> UnimodularMap {
        UnimodularMap {
            m: mat_mul(&self.m, &inner.m),
            t: self.apply_point(&inner.t),
        }
    }

    pub fn inverse(&self) -> UnimodularMap {
        // det = ±1, so the adjugate divided by det stays integral.
        let d = self.det();
        let m = [
            [&self.m[1][1] * &d, -&self.m[0][1] * &d],
            [-&self.m[1][0] * &d, &self.m[0][0] * &d],
        ];
        let lin = UnimodularMap {
            m,
            t: Point::origin(),
        };
        let t = -&lin.apply_displacement(&self.t);
        UnimodularMap { t, ..lin }
    }

    /// `M^{-T}` (linear), the action on covectors such as facet normals.
    pub fn inverse_transpose(&self) -> UnimodularMap {
        let inv = self.inverse();
        let m = [
            [inv.m[0][0].clone(), inv.m[1][0].clone()],
            [inv.m[0][1].clone(), inv.m[1][1].clone()],
        ];
        UnimodularMap {
            m,
            t: Point::origin(),
        }
    }
}

impl fmt::Display for UnimodularMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(
            f,
            "[[{}, {}], [{}, {}]] + {}",
            m[0][0], m[0][1], m[1][0], m[1][1], self.t
        )
    }
}

/// The shear `v ↦ v + k·det(w, v)·w`, fixing the primitive direction `w`.
pub fn transvection(w: &LatticeVector, k: &BigInt) -> Result<UnimodularMap, LatticeError> {
    if !w.is_primitive() {
        return Err(LatticeError::NotPrimitive(w.to_string()));
    }
    let (x, y) = (&w.x, &w.y);
    let m = [
        [BigInt::one() - k * x * y, k * x * x],
        [-(k * y * y), BigInt::one() + k * x * y],
    ];
    Ok(UnimodularMap {
        m,
        t: Point::origin(),
    })
}

/// The unique linear map fixing `fix` and sending `from` to `to`, required
/// to be an integral transvection along `fix`.
pub fn monodromy_from_constraints(
    fix: &LatticeVector,
    from: &LatticeVector,
    to: &LatticeVector,
) -> Result<UnimodularMap, LatticeError> {
    if !fix.is_primitive() {
        return Err(LatticeError::NotPrimitive(fix.to_string()));
    }
    let d = fix.det(from);
    if d.is_zero() {
        return Err(LatticeError::Dependent(fix.to_string(), from.to_string()));
    }
    // M = [fix | to] · [fix | from]^{-1}, with the inverse written as adj / d.
    let lhs = [[fix.x.clone(), to.x.clone()], [fix.y.clone(), to.y.clone()]];
    let adj = [
        [from.y.clone(), -&from.x],
        [-&fix.y, fix.x.clone()],
    ];
    let num = mat_mul(&lhs, &adj);
    if num.iter().flatten().any(|e| !e.is_multiple_of(&d)) {
        return Err(LatticeError::NoIntegralSolution);
    }
    let m = num.map(|row| row.map(|e| e / &d));
    let det = det2(&m);
    if !det.is_one() {
        return Err(LatticeError::NotUnimodular(det));
    }
    // (M - I)·from = k·det(fix, from)·fix; k is integral because fix is primitive.
    let lin = UnimodularMap {
        m,
        t: Point::origin(),
    };
    let shift = &lin.apply_vector(from) - from;
    let coeff = if fix.x.is_zero() {
        &shift.y / &fix.y
    } else {
        &shift.x / &fix.x
    };
    let k = &coeff / &d;
    let expected = transvection(fix, &k)?;
    assert_eq!(expected, lin, "det-1 map fixing a primitive vector must be a transvection");
    Ok(lin)
}

/// Convex polygon with rational vertices, stored counterclockwise from its
/// lexicographically smallest vertex, without repeated or collinear
/// vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct LatticePolygon {
    vertices: Vec<Point>,
}

impl TryFrom<Vec<Point>> for LatticePolygon {
    type Error = LatticeError;
    fn try_from(v: Vec<Point>) -> Result<Self, Self::Error> {
        LatticePolygon::new(v)
    }
}

impl From<LatticePolygon> for Vec<Point> {
    fn from(p: LatticePolygon) -> Self {
        p.vertices
    }
}

fn cross(o: &Point, a: &Point, b: &Point) -> BigRational {
    (a - o).det(&(b - o))
}

impl LatticePolygon {
    /// Builds a polygon from vertices given in cyclic order (either
    /// orientation).
    pub fn new(points: Vec<Point>) -> Result<Self, LatticeError> {
        let mut pts: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        while pts.len() > 1 && pts.first() == pts.last() {
            pts.pop();
        }
        if pts.len() < 3 {
            return Err(LatticeError::Degenerate);
        }
        let twice = shoelace(&pts);
        if twice.is_zero() {
            return Err(LatticeError::Degenerate);
        }
        if twice.is_negative() {
            pts.reverse();
        }
        // Drop straight vertices; a backtracking spike means non-convex input.
        let mut changed = true;
        while changed && pts.len() >= 3 {
            changed = false;
            let n = pts.len();
            for i in 0..n {
                let prev = &pts[(i + n - 1) % n];
                let next = &pts[(i + 1) % n];
                let cur = &pts[i];
                if cross(prev, cur, next).is_zero() {
                    if (cur - prev).dot(&(next - cur)).is_negative() {
                        return Err(LatticeError::NotConvex);
                    }
                    pts.remove(i);
                    changed = true;
                    break;
                }
            }
        }
        if pts.len() < 3 {
            return Err(LatticeError::Degenerate);
        }
        let n = pts.len();
        for i in 0..n {
            let a = &pts[i];
            let b = &pts[(i + 1) % n];
            for (j, p) in pts.iter().enumerate() {
                if j != i && j != (i + 1) % n && !cross(a, b, p).is_positive() {
                    return Err(LatticeError::NotConvex);
                }
            }
        }
        let start = (0..n).min_by(|&i, &j| pts[i].cmp(&pts[j])).unwrap();
        pts.rotate_left(start);
        Ok(LatticePolygon { vertices: pts })
    }

    /// Convex hull of a point set.
    pub fn convex_hull(points: &[Point]) -> Result<Self, LatticeError> {
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.len() < 3 {
            return Err(LatticeError::Degenerate);
        }
        let mut lower: Vec<Point> = Vec::new();
        for p in &pts {
            while lower.len() >= 2
                && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive()
            {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<Point> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2
                && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive()
            {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        LatticePolygon::new(lower)
    }

    pub fn from_int_vertices(vs: &[(i64, i64)]) -> Result<Self, LatticeError> {
        LatticePolygon::new(vs.iter().map(|&(x, y)| Point::from_ints(x, y)).collect())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i % self.len()]
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub fn edges(&self) -> Vec<Point> {
        let n = self.len();
        (0..n)
            .map(|i| &self.vertices[(i + 1) % n] - &self.vertices[i])
            .collect()
    }

    pub fn edge_lengths(&self) -> Vec<BigRational> {
        self.edges().iter().map(Point::affine_length).collect()
    }

    pub fn area(&self) -> BigRational {
        shoelace(&self.vertices) / rat(2)
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.vertices.iter().position(|v| v == p)
    }

    pub fn is_integral(&self) -> bool {
        self.vertices.iter().all(Point::is_integral)
    }

    /// Closed containment.
    pub fn contains(&self, p: &Point) -> bool {
        let n = self.len();
        (0..n).all(|i| !cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_negative())
    }

    pub fn contains_strictly(&self, p: &Point) -> bool {
        let n = self.len();
        (0..n).all(|i| cross(&self.vertices[i], &self.vertices[(i + 1) % n], p).is_positive())
    }

    /// Largest `s ≥ 0` with `start + s·dir` inside the polygon; `start`
    /// must be contained.
    pub fn exit_parameter(&self, start: &Point, dir: &LatticeVector) -> Option<BigRational> {
        let d = dir.to_point();
        let n = self.len();
        let mut best: Option<BigRational> = None;
        for i in 0..n {
            let a = &self.vertices[i];
            let e = &self.vertices[(i + 1) % n] - a;
            // Left-of-edge value decreases along dir iff det(e, d) < 0.
            let rate = e.det(&d);
            if rate.is_negative() {
                let s = e.det(&(start - a)) / -rate;
                if best.as_ref().is_none_or(|b| &s < b) {
                    best = Some(s);
                }
            }
        }
        best
    }

    pub fn transform(&self, map: &UnimodularMap) -> LatticePolygon {
        let vs = self.vertices.iter().map(|v| map.apply_point(v)).collect();
        LatticePolygon::new(vs).expect("unimodular image of a convex polygon is convex")
    }

    pub fn translate(&self, t: &Point) -> LatticePolygon {
        self.transform(&UnimodularMap::translation(t.clone()))
    }
}

fn shoelace(pts: &[Point]) -> BigRational {
    let n = pts.len();
    (0..n).fold(BigRational::zero(), |acc, i| acc + pts[i].det(&pts[(i + 1) % n]))
}

/// Sends `p` to `(1, 0)` and `q` into the upper half plane with
/// `0 ≤ x < y`. Unique in `GL(2, Z)` for independent primitive `p`, `q`.
fn reduction_matrix(p: &LatticeVector, q: &LatticeVector) -> UnimodularMap {
    let eg = p.x.extended_gcd(&p.y);
    let (s, t) = if eg.gcd.is_negative() {
        (-eg.x, -eg.y)
    } else {
        (eg.x, eg.y)
    };
    let mut m = UnimodularMap {
        m: [[s, t], [-&p.y, p.x.clone()]],
        t: Point::origin(),
    };
    let q1 = m.apply_vector(q);
    if q1.y.is_negative() {
        let flip = UnimodularMap::from_rows([[1, 0], [0, -1]]).unwrap();
        m = flip.compose(&m);
    }
    let q2 = m.apply_vector(q);
    let k = q2.x.div_floor(&q2.y);
    let shear = UnimodularMap {
        m: [[BigInt::one(), -k], [BigInt::zero(), BigInt::one()]],
        t: Point::origin(),
    };
    shear.compose(&m)
}

/// Every affine unimodular map achieving the minimal canonical vertex
/// sequence, together with that sequence.
fn canonical_frames(p: &LatticePolygon) -> (Vec<Point>, Vec<UnimodularMap>) {
    let n = p.len();
    let mut best: Option<Vec<Point>> = None;
    let mut maps = Vec::new();
    for i in 0..n {
        for forward in [true, false] {
            let step = |k: usize| {
                if forward {
                    (i + k) % n
                } else {
                    (i + n - k % n) % n
                }
            };
            let v = p.vertex(i);
            let next = p.vertex(step(1));
            let prev = p.vertex(step(n - 1));
            let (pd, _) = (next - v).primitive_part().expect("distinct vertices");
            let (qd, _) = (prev - v).primitive_part().expect("distinct vertices");
            let lin = reduction_matrix(&pd, &qd);
            let map = lin.compose(&UnimodularMap::translation(-v));
            let seq: Vec<Point> = (0..n).map(|k| map.apply_point(p.vertex(step(k)))).collect();
            match best.as_ref().map(|b| seq.cmp(b)) {
                None | Some(Ordering::Less) => {
                    best = Some(seq);
                    maps.clear();
                    maps.push(map);
                }
                Some(Ordering::Equal) => maps.push(map),
                Some(Ordering::Greater) => {}
            }
        }
    }
    (best.expect("polygon has vertices"), maps)
}

/// Canonical representative of the `GL(2, Z) ⋉ Q²` orbit of `p`.
pub fn normal_form(p: &LatticePolygon) -> LatticePolygon {
    let (seq, _) = canonical_frames(p);
    LatticePolygon::new(seq).expect("canonical sequence is a convex polygon")
}

/// All affine unimodular maps `A` with `A(p) = q`.
pub fn equivalences(p: &LatticePolygon, q: &LatticePolygon) -> Vec<UnimodularMap> {
    if p.len() != q.len() || p.area() != q.area() {
        return Vec::new();
    }
    let (sp, maps_p) = canonical_frames(p);
    let (sq, maps_q) = canonical_frames(q);
    if sp != sq {
        return Vec::new();
    }
    let back = maps_q[0].inverse();
    maps_p.iter().map(|a| back.compose(a)).collect()
}

/// Decides whether `q = A(p)` for an affine unimodular `A`, returning one
/// such map.
pub fn equivalent(p: &LatticePolygon, q: &LatticePolygon) -> Option<UnimodularMap> {
    equivalences(p, q).into_iter().next()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> LatticeVector {
        LatticeVector::new(x, y)
    }

    fn poly(vs: &[(i64, i64)]) -> LatticePolygon {
        LatticePolygon::from_int_vertices(vs).unwrap()
    }

    #[test]
    fn primitive_part_examples() {
        assert_eq!(v(6, -4).primitive_part().unwrap(), (v(3, -2), BigInt::from(2)));
        assert_eq!(v(0, 25).primitive_part().unwrap(), (v(0, 1), BigInt::from(25)));
        let half = Point::new(BigRational::new(5.into(), 2.into()), BigRational::new(5.into(), 2.into()));
        assert_eq!(
            primitive_part(&half).unwrap(),
            (v(1, 1), BigRational::new(5.into(), 2.into()))
        );
        assert_eq!(primitive_part(&Point::origin()), Err(LatticeError::ZeroVector));
        assert!(Point::origin().affine_length().is_zero());
    }

    #[test]
    fn transvection_examples() {
        let m = transvection(&v(0, 1), &BigInt::one()).unwrap();
        assert_eq!(m.apply_vector(&v(1, 0)), v(1, -1));
        let m = transvection(&v(1, 0), &BigInt::one()).unwrap();
        assert_eq!(m.apply_vector(&v(0, 1)), v(1, 1));
        let m = transvection(&v(3, -7), &BigInt::zero()).unwrap();
        assert_eq!(m, UnimodularMap::identity());
        assert!(matches!(
            transvection(&v(2, 4), &BigInt::one()),
            Err(LatticeError::NotPrimitive(_))
        ));
    }

    #[test]
    fn monodromy_examples() {
        let m = monodromy_from_constraints(&v(1, 0), &v(0, 1), &v(1, 1)).unwrap();
        assert_eq!(m, UnimodularMap::from_rows([[1, 1], [0, 1]]).unwrap());
        let m = monodromy_from_constraints(&v(1, 0), &v(0, 1), &v(0, 1)).unwrap();
        assert_eq!(m, UnimodularMap::identity());
        // Solving M(1,0) = (1,0), M(0,2) = (1,2) forces M(0,1) = (1/2, 1).
        assert_eq!(
            monodromy_from_constraints(&v(1, 0), &v(0, 2), &v(1, 2)),
            Err(LatticeError::NoIntegralSolution)
        );
        // Integral but orientation reversing: M = [[-6, 1], [-35, 6]].
        assert_eq!(
            monodromy_from_constraints(&v(1, 7), &v(1, 6), &v(0, 1)),
            Err(LatticeError::NotUnimodular(BigInt::from(-1)))
        );
        assert!(matches!(
            monodromy_from_constraints(&v(1, 0), &v(2, 0), &v(1, 1)),
            Err(LatticeError::Dependent(..))
        ));
    }

    #[test]
    fn polygon_construction() {
        let p = poly(&[(0, 0), (0, 1), (1, 0)]);
        assert_eq!(p.vertices()[0], Point::from_ints(0, 0));
        assert_eq!(p.vertices()[1], Point::from_ints(1, 0));
        assert_eq!(p.area(), BigRational::new(1.into(), 2.into()));
        let with_mid = poly(&[(0, 0), (1, 0), (2, 0), (0, 2)]);
        assert_eq!(with_mid.len(), 3);
        assert_eq!(
            LatticePolygon::from_int_vertices(&[(0, 0), (1, 1), (2, 2)]),
            Err(LatticeError::Degenerate)
        );
        assert_eq!(
            LatticePolygon::from_int_vertices(&[(0, 0), (4, 0), (1, 1), (0, 4)]),
            Err(LatticeError::NotConvex)
        );
        let hull = LatticePolygon::convex_hull(&[
            Point::from_ints(0, 0),
            Point::from_ints(2, 0),
            Point::from_ints(1, 1),
            Point::from_ints(1, 0),
            Point::from_ints(0, 2),
        ])
        .unwrap();
        assert_eq!(hull, poly(&[(0, 0), (2, 0), (0, 2)]));
    }

    #[test]
    fn exit_parameter_in_square() {
        let sq = poly(&[(0, 0), (4, 0), (4, 4), (0, 4)]);
        let s = sq.exit_parameter(&Point::from_ints(1, 1), &v(1, 2)).unwrap();
        assert_eq!(s, BigRational::new(3.into(), 2.into()));
    }

    #[test]
    fn normal_form_examples() {
        let unit = poly(&[(0, 0), (1, 0), (0, 1)]);
        assert_eq!(normal_form(&unit), unit);
        assert_eq!(normal_form(&poly(&[(5, 5), (6, 5), (5, 6)])), unit);
        let a = poly(&[(1, 0), (0, -1), (-1, 1)]);
        let b = poly(&[(1, 0), (0, 1), (-1, -1)]);
        assert_eq!(normal_form(&a), normal_form(&b));
    }

    #[test]
    fn equivalence_examples() {
        let p = poly(&[(0, 0), (3, 1), (1, 4), (-1, 2)]);
        let shifted = p.translate(&Point::from_ints(3, -7));
        let w = equivalent(&p, &shifted).unwrap();
        assert_eq!(p.transform(&w), shifted);

        let m = UnimodularMap::from_rows([[2, 1], [7, 3]]).unwrap();
        let image = p.transform(&m);
        let w = equivalent(&p, &image).unwrap();
        assert_eq!(p.transform(&w), image);

        let unit = poly(&[(0, 0), (1, 0), (0, 1)]);
        let doubled = poly(&[(0, 0), (2, 0), (0, 1)]);
        assert!(equivalent(&unit, &doubled).is_none());
    }

    #[test]
    fn unit_triangle_has_six_symmetries() {
        let unit = poly(&[(0, 0), (1, 0), (0, 1)]);
        assert_eq!(equivalences(&unit, &unit).len(), 6);
    }

    #[test]
    fn map_inverse_and_compose() {
        let m = UnimodularMap::new(
            [[BigInt::from(2), BigInt::from(1)], [BigInt::from(1), BigInt::from(1)]],
            Point::new(BigRational::new(1.into(), 3.into()), rat(-4)),
        )
        .unwrap();
        assert_eq!(m.compose(&m.inverse()), UnimodularMap::identity());
        assert_eq!(m.inverse().compose(&m), UnimodularMap::identity());
        let it = m.inverse_transpose();
        // <M^{-T} n, M v> = <n, v>
        let (n, x) = (v(3, -2), v(5, 7));
        assert_eq!(it.apply_vector(&n).dot(&m.apply_vector(&x)), n.dot(&x));
    }

    #[test]
    fn map_json() {
        let m = UnimodularMap::from_rows([[1, 1], [0, 1]]).unwrap();
        let j = serde_json::to_string(&m).unwrap();
        assert_eq!(j, r#"{"matrix":[["1","1"],["0","1"]],"translation":["0","0"]}"#);
        let bad = r#"{"matrix":[["2","0"],["0","1"]],"translation":["0","0"]}"#;
        assert!(serde_json::from_str::<UnimodularMap>(bad).is_err());
        let p = Point::new(BigRational::new(5.into(), 2.into()), rat(-1));
        let pj = serde_json::to_string(&p).unwrap();
        assert_eq!(pj, r#"[["5","2"],"-1"]"#);
        assert_eq!(serde_json::from_str::<Point>(&pj).unwrap(), p);
        assert_eq!(serde_json::from_str::<Point>(r#"[["3"],["6","4"]]"#).unwrap(),
            Point::new(rat(3), BigRational::new(3.into(), 2.into())));
    }
}
