//! Moment triangle of the weighted projective plane `CP(a², b², c²)`.
//!
//! For a sorted Markov triple the triangle has oriented edges `a²u₁`,
//! `b²u₂`, `c²u₃` with `u₁ = (b², -m₁)`, `u₂ = -(a², m₂)`, `u₃ = (0, 1)`,
//! starting at the origin. Corners are keyed by the slot of the edge they
//! face: the `A` corner faces `a²u₁`, and so on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{rat, LatticePolygon, LatticeVector, Point, UnimodularMap};
use crate::markov::{MarkovError, MarkovTriple, Slot};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error(transparent)]
    NotMarkov(#[from] MarkovError),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

impl PolytopeError {
    /// Variant name, with wrapped errors reporting their own kind.
    pub fn kind(&self) -> &'static str {
        match self {
            PolytopeError::NotMarkov(e) => e.kind(),
            PolytopeError::InternalInconsistency(_) => "InternalInconsistency",
        }
    }
}

fn inconsistent(msg: impl Into<String>) -> PolytopeError {
    PolytopeError::InternalInconsistency(msg.into())
}

/// Integers fixing the shape of the moment triangle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeData {
    #[serde(with = "crate::json::int_string")]
    pub m1: BigInt,
    #[serde(with = "crate::json::int_string")]
    pub m2: BigInt,
    #[serde(with = "crate::json::int_string")]
    pub l1: BigInt,
    #[serde(with = "crate::json::int_string")]
    pub l2: BigInt,
}

/// Boundary of a corner neighbourhood, the lens space `L(k², k·l - 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LensLabel {
    /// Slot of the edge the corner faces.
    pub slot: Slot,
    pub vertex: LatticeVector,
    #[serde(with = "crate::json::int_string")]
    pub order: BigInt,
    #[serde(with = "crate::json::int_string")]
    pub parameter: BigInt,
}

impl LensLabel {
    /// Parameter reduced into `[0, order)`.
    pub fn reduced_parameter(&self) -> BigInt {
        self.parameter.mod_floor(&self.order)
    }

    pub fn is_smooth(&self) -> bool {
        self.order.is_one()
    }
}

/// The moment triangle with the data of its rational blowdown structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedPolytope {
    pub triple: MarkovTriple,
    /// `u₁, u₂, u₃`.
    pub directions: [LatticeVector; 3],
    pub edge_data: EdgeData,
    #[serde(with = "crate::json::int_string")]
    pub l3: BigInt,
    /// Cut directions `w₁, w₂, w₃`, pointing from the barycenter to the
    /// corner each one ends at.
    pub cuts: [LatticeVector; 3],
    /// `V₀ = 0`, `V₁ = a²u₁`, `V₂ = V₁ + b²u₂`.
    pub vertices: [LatticeVector; 3],
    pub lens: [LensLabel; 3],
    #[serde(with = "crate::json::rational")]
    pub scale: BigRational,
}

fn squares(t: &MarkovTriple) -> (BigInt, BigInt, BigInt) {
    let [a, b, c] = t.entries();
    (a * a, b * b, c * c)
}

/// Canonical `(m₁, m₂, l₁, l₂)`: `m₁ ≡ c²·(a²)⁻¹ mod b²` in `[0, b²)`.
/// Unsorted triples are sorted first.
pub fn solve_mi(t: &MarkovTriple) -> Result<EdgeData, PolytopeError> {
    solve_mi_shifted(t, &BigInt::zero())
}

/// The solution `(m₁ + s·b², m₂ - s·a²)` of `a²m₁ + b²m₂ = c²`; every such
/// choice gives a shear-equivalent triangle.
pub fn solve_mi_shifted(t: &MarkovTriple, shift: &BigInt) -> Result<EdgeData, PolytopeError> {
    let t = t.sorted();
    let (a2, b2, c2) = squares(&t);
    let [a, b, c] = t.entries();
    let m1_base = if b2.is_one() {
        BigInt::zero()
    } else {
        let eg = a2.extended_gcd(&b2);
        if !eg.gcd.abs().is_one() {
            return Err(inconsistent("a² and b² are not coprime"));
        }
        let inv = &eg.x * &eg.gcd;
        (&c2 * inv).mod_floor(&b2)
    };
    let m1 = m1_base + shift * &b2;
    let rest = &c2 - &a2 * &m1;
    if !rest.is_multiple_of(&b2) {
        return Err(inconsistent("b² does not divide c² - a²m₁"));
    }
    let m2 = rest / &b2;
    if shift.is_zero() && m2.is_negative() {
        return Err(inconsistent("m₂ is negative"));
    }
    let (l1, r1) = (&m1 + BigInt::one()).div_mod_floor(b);
    let (l2, r2) = (&m2 + BigInt::one()).div_mod_floor(a);
    if !r1.is_zero() || !r2.is_zero() {
        return Err(inconsistent("m₁ + 1 or m₂ + 1 not divisible"));
    }
    if BigInt::from(3) * c != b * &l2 + a * &l1 {
        return Err(inconsistent("3c ≠ b·l₂ + a·l₁"));
    }
    Ok(EdgeData { m1, m2, l1, l2 })
}

/// Builds the moment triangle in the canonical frame.
pub fn build_polytope(t: &MarkovTriple) -> Result<WeightedPolytope, PolytopeError> {
    build_polytope_shifted(t, &BigInt::zero())
}

/// Builds the moment triangle from the shifted solution of
/// [`solve_mi_shifted`].
pub fn build_polytope_shifted(
    t: &MarkovTriple,
    shift: &BigInt,
) -> Result<WeightedPolytope, PolytopeError> {
    let t = t.sorted();
    let data = solve_mi_shifted(&t, shift)?;
    let (a2, b2, c2) = squares(&t);
    let [a, b, c] = t.entries();
    let u1 = LatticeVector::new(b2.clone(), -&data.m1);
    let u2 = -LatticeVector::new(a2.clone(), data.m2.clone());
    let u3 = LatticeVector::new(0, 1);
    let v0 = LatticeVector::zero();
    let v1 = &v0 + &u1.scale(&a2);
    let v2 = &v1 + &u2.scale(&b2);
    if &v2 + &u3.scale(&c2) != v0 {
        return Err(inconsistent("edges do not close up"));
    }

    let w1 = -LatticeVector::new(a.clone(), data.l2.clone());
    let w2 = LatticeVector::new(-b, data.l1.clone());
    let sum = &w1.scale(a) + &w2.scale(b);
    if !sum.x.is_multiple_of(c) || !sum.y.is_multiple_of(c) {
        return Err(inconsistent("w₃ is not integral"));
    }
    let w3 = -LatticeVector::new(&sum.x / c, &sum.y / c);
    if !w3.is_primitive() {
        return Err(inconsistent("w₃ is not primitive"));
    }

    let l3 = third_lens_index(&t, &[u1.clone(), u2.clone(), u3.clone()])?;
    let lens = [
        LensLabel {
            slot: Slot::A,
            vertex: v2.clone(),
            order: a2.clone(),
            parameter: a * &data.l2 - 1,
        },
        LensLabel {
            slot: Slot::B,
            vertex: v0.clone(),
            order: b2.clone(),
            parameter: b * &data.l1 - 1,
        },
        LensLabel {
            slot: Slot::C,
            vertex: v1.clone(),
            order: c2.clone(),
            parameter: c * &l3 - 1,
        },
    ];

    Ok(WeightedPolytope {
        triple: t,
        directions: [u1, u2, u3],
        edge_data: data,
        l3,
        cuts: [w1, w2, w3],
        vertices: [v0, v1, v2],
        lens,
        scale: BigRational::one(),
    })
}

/// Moves `u₂` to `(0, 1)` by an `SL(2, Z)` map and reads off the third
/// corner's index in that frame, where the roles of `(a, b, c)` become
/// `(c, a, b)`.
fn third_lens_index(t: &MarkovTriple, u: &[LatticeVector; 3]) -> Result<BigInt, PolytopeError> {
    let [a, _, c] = t.entries();
    let a2 = a * a;
    let u2 = &u[1];
    let eg = u2.x.extended_gcd(&u2.y);
    let g = eg.gcd.clone();
    if !g.abs().is_one() {
        return Err(inconsistent("u₂ is not primitive"));
    }
    let (s, r) = (&eg.x * &g, &eg.y * &g);
    // Rows (u₂.y, -u₂.x) and (s, r) with s·u₂.x + r·u₂.y = 1: det 1, u₂ ↦ (0, 1).
    let mut frame = UnimodularMap::linear([[u2.y.clone(), -&u2.x], [s, r]])
        .map_err(|_| inconsistent("frame map not unimodular"))?;
    if frame.apply_vector(u2) != LatticeVector::new(0, 1) {
        return Err(inconsistent("frame map does not send u₂ to (0, 1)"));
    }
    let new_u1 = frame.apply_vector(&u[2]);
    if new_u1.x != a2 {
        return Err(inconsistent("transformed u₃ has wrong first coordinate"));
    }
    // Shear fixing (0, 1) so that the new m₁ lies in [0, a²).
    let m1_raw = -&new_u1.y;
    let k = m1_raw.div_floor(&a2);
    let shear = UnimodularMap::linear([
        [BigInt::one(), BigInt::zero()],
        [k, BigInt::one()],
    ])
    .expect("shear is unimodular");
    frame = shear.compose(&frame);
    let nu1 = frame.apply_vector(&u[2]);
    let nu2 = frame.apply_vector(&u[0]);
    let m1 = -&nu1.y;
    let c2 = c * c;
    if nu2.x != -&c2 {
        return Err(inconsistent("transformed u₁ has wrong first coordinate"));
    }
    let m2 = -&nu2.y;
    // Same shape as the canonical edge data in the new frame: m₁ = a·l - 1, m₂ = c·l₃ - 1.
    if !(&m1 + BigInt::one()).is_multiple_of(a) {
        return Err(inconsistent("transformed m₁ + 1 not divisible by a"));
    }
    let (l3, rem) = (&m2 + BigInt::one()).div_mod_floor(c);
    if !rem.is_zero() {
        return Err(inconsistent("transformed m₂ + 1 not divisible by c"));
    }
    Ok(l3)
}

impl WeightedPolytope {
    pub fn polygon(&self) -> LatticePolygon {
        LatticePolygon::new(self.vertices.iter().map(LatticeVector::to_point).collect())
            .expect("moment triangle is nondegenerate")
    }

    /// Edge vectors `a²u₁, b²u₂, c²u₃`.
    pub fn edges(&self) -> [LatticeVector; 3] {
        let (a2, b2, c2) = squares(&self.triple);
        [
            self.directions[0].scale(&a2),
            self.directions[1].scale(&b2),
            self.directions[2].scale(&c2),
        ]
    }

    /// Corner facing the edge of `slot`.
    pub fn corner(&self, slot: Slot) -> &LatticeVector {
        match slot {
            Slot::A => &self.vertices[2],
            Slot::B => &self.vertices[0],
            Slot::C => &self.vertices[1],
        }
    }

    pub fn cut(&self, slot: Slot) -> &LatticeVector {
        &self.cuts[slot.index()]
    }

    /// Center of mass with weight `k²` on the corner facing the `k²` edge.
    pub fn barycenter(&self) -> Point {
        let (a2, b2, c2) = squares(&self.triple);
        let total = rat(&a2 + &b2 + &c2);
        let weighted = [(Slot::A, a2), (Slot::B, b2), (Slot::C, c2)]
            .into_iter()
            .fold(Point::origin(), |acc, (s, w)| {
                &acc + &self.corner(s).to_point().scale(&rat(w))
            });
        weighted.scale(&(BigRational::one() / total))
    }

    /// `B = corner + λ·w` for the slot's cut; returns `λ` (positive, equal
    /// to `yz/3` for the other two entries `y, z`).
    pub fn fiber_distance(&self, slot: Slot) -> BigRational {
        let d = &self.corner(slot).to_point() - &self.barycenter();
        let w = self.cut(slot);
        if w.x.is_zero() {
            d.y / rat(w.y.clone())
        } else {
            d.x / rat(w.x.clone())
        }
    }

    /// Re-checks every structural identity exactly.
    pub fn check(&self) -> Result<(), PolytopeError> {
        let t = &self.triple;
        let [a, b, c] = t.entries();
        let (a2, b2, c2) = squares(t);
        let EdgeData { m1, m2, l1, l2 } = &self.edge_data;
        let [u1, u2, u3] = &self.directions;
        let [w1, w2, w3] = &self.cuts;
        let three = BigInt::from(3);
        let ensure = |ok: bool, what: &str| if ok { Ok(()) } else { Err(inconsistent(what)) };

        ensure(u1 == &LatticeVector::new(b2.clone(), -m1), "u₁ = (b², -m₁)")?;
        ensure(u2 == &-LatticeVector::new(a2.clone(), m2.clone()), "u₂ = -(a², m₂)")?;
        ensure(u3 == &LatticeVector::new(0, 1), "u₃ = (0, 1)")?;
        let [e1, e2, e3] = self.edges();
        ensure((&(&e1 + &e2) + &e3).is_zero(), "a²u₁ + b²u₂ + c²u₃ = 0")?;
        ensure(&a2 * m1 + &b2 * m2 == c2, "a²m₁ + b²m₂ = c²")?;
        ensure(
            &a2 * (m1 + 1) + &b2 * (m2 + 1) == &three * a * b * c,
            "a²(m₁+1) + b²(m₂+1) = 3abc",
        )?;
        ensure(m1 == &(b * l1 - 1), "m₁ = b·l₁ - 1")?;
        ensure(m2 == &(a * l2 - 1), "m₂ = a·l₂ - 1")?;
        ensure(&three * c == b * l2 + a * l1, "3c = b·l₂ + a·l₁")?;
        ensure(u1.det(u2) == -&c2, "det(u₁, u₂) = -c²")?;
        ensure(w1 == &-LatticeVector::new(a.clone(), l2.clone()), "w₁ = -(a, l₂)")?;
        ensure(w2 == &LatticeVector::new(-b, l1.clone()), "w₂ = (-b, l₁)")?;
        ensure(
            (&(&w1.scale(a) + &w2.scale(b)) + &w3.scale(c)).is_zero(),
            "a·w₁ + b·w₂ + c·w₃ = 0",
        )?;
        ensure(w1.is_primitive() && w2.is_primitive() && w3.is_primitive(), "cuts primitive")?;

        let div3 = |v: LatticeVector| -> Option<LatticeVector> {
            (v.x.is_multiple_of(&three) && v.y.is_multiple_of(&three))
                .then(|| LatticeVector::new(&v.x / &three, &v.y / &three))
        };
        let (ab, ac, bc) = (a * b, a * c, b * c);
        ensure(
            div3(&w2.scale(&ac) - &w1.scale(&bc)).as_ref() == Some(&e3),
            "(ac·w₂ - bc·w₁)/3 = c²u₃",
        )?;
        ensure(
            div3(&w1.scale(&bc) - &w3.scale(&ab)).as_ref() == Some(&e2),
            "(bc·w₁ - ab·w₃)/3 = b²u₂",
        )?;
        ensure(
            div3(&w3.scale(&ab) - &w2.scale(&ac)).as_ref() == Some(&e1),
            "(ab·w₃ - ac·w₂)/3 = a²u₁",
        )?;
        // a²(bc/3)w₁ + b²(ac/3)w₂ + c²(ab/3)w₃ = 0, scaled by 3.
        let weighted = &(&w1.scale(&(&a2 * &bc)) + &w2.scale(&(&b2 * &ac))) + &w3.scale(&(&c2 * &ab));
        ensure(weighted.is_zero(), "weighted barycenter identity")?;

        let bary = self.barycenter();
        for s in Slot::ALL {
            let off = &bary - &self.corner(s).to_point();
            ensure(off.det(&self.cut(s).to_point()).is_zero(), "barycenter on cut line")?;
            let (y, z) = s.others();
            ensure(
                self.fiber_distance(s) == BigRational::new(t.get(y) * t.get(z), three.clone()),
                "corner-to-fiber distance yz/3",
            )?;
        }
        let area = self.polygon().area();
        ensure(area == BigRational::new(&a2 * &b2 * &c2, BigInt::from(2)), "area a²b²c²/2")?;

        let orders: Vec<&BigInt> = self.lens.iter().map(|l| &l.order).collect();
        ensure(orders == vec![&a2, &b2, &c2], "lens orders a², b², c²")?;
        for (s, label) in Slot::ALL.into_iter().zip(&self.lens) {
            ensure(&label.vertex == self.corner(s), "lens label keyed to its corner")?;
            // The corner is smooth exactly when its primitive edge pair is unimodular.
            let (e_in, e_out) = self.corner_directions(s);
            ensure(e_in.det(&e_out).abs() == label.order, "corner determinant equals lens order")?;
        }
        Ok(())
    }

    /// Primitive directions of the two edges at a corner, pointing away from it.
    pub fn corner_directions(&self, slot: Slot) -> (LatticeVector, LatticeVector) {
        let [u1, u2, u3] = &self.directions;
        match slot {
            Slot::A => (-u2, u3.clone()),
            Slot::B => (-u3, u1.clone()),
            Slot::C => (-u1, u2.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: i64, b: i64, c: i64) -> MarkovTriple {
        MarkovTriple::new(a, b, c).unwrap()
    }

    fn ints(d: &EdgeData) -> [i64; 4] {
        use num_traits::ToPrimitive;
        [&d.m1, &d.m2, &d.l1, &d.l2].map(|x| x.to_i64().unwrap())
    }

    #[test]
    fn solve_mi_examples() {
        assert_eq!(ints(&solve_mi(&t(1, 2, 5)).unwrap()), [1, 6, 1, 7]);
        assert_eq!(ints(&solve_mi(&t(1, 1, 1)).unwrap()), [0, 1, 1, 2]);
        assert_eq!(ints(&solve_mi(&t(1, 1, 2)).unwrap()), [0, 4, 1, 5]);
    }

    #[test]
    fn build_examples() {
        let p = build_polytope(&t(1, 1, 1)).unwrap();
        assert_eq!(
            p.vertices,
            [LatticeVector::new(0, 0), LatticeVector::new(1, 0), LatticeVector::new(0, -1)]
        );
        assert_eq!(p.directions[1], LatticeVector::new(-1, -1));
        let p = build_polytope(&t(1, 2, 5)).unwrap();
        assert_eq!(
            p.vertices,
            [LatticeVector::new(0, 0), LatticeVector::new(4, -1), LatticeVector::new(0, -25)]
        );
        assert_eq!(p.polygon().area(), rat(50));
        p.check().unwrap();
    }

    #[test]
    fn cut_vector_examples() {
        let p = build_polytope(&t(1, 2, 5)).unwrap();
        assert_eq!(
            p.cuts,
            [LatticeVector::new(-1, -7), LatticeVector::new(-2, 1), LatticeVector::new(1, 1)]
        );
        // (5·(-2,1) - 10·(-1,-7))/3 = (0, 25)
        let lhs = &p.cuts[1].scale(&5.into()) - &p.cuts[0].scale(&10.into());
        assert_eq!(lhs, LatticeVector::new(0, 75));
        let p = build_polytope(&t(1, 1, 1)).unwrap();
        assert_eq!(
            p.cuts,
            [LatticeVector::new(-1, -2), LatticeVector::new(-1, 1), LatticeVector::new(2, 1)]
        );
    }

    #[test]
    fn barycenter_examples() {
        let p = build_polytope(&t(1, 1, 1)).unwrap();
        assert_eq!(
            p.barycenter(),
            Point::new(BigRational::new(1.into(), 3.into()), BigRational::new((-1).into(), 3.into()))
        );
        let p = build_polytope(&t(1, 2, 5)).unwrap();
        let b = p.barycenter();
        for s in Slot::ALL {
            let off = &b - &p.corner(s).to_point();
            assert!(off.det(&p.cut(s).to_point()).is_zero());
        }
    }

    #[test]
    fn lens_examples() {
        let p = build_polytope(&t(1, 1, 1)).unwrap();
        assert!(p.lens.iter().all(|l| l.is_smooth() && l.reduced_parameter().is_zero()));
        let p = build_polytope(&t(1, 1, 2)).unwrap();
        assert_eq!(p.lens[2].order, BigInt::from(4));
        assert_eq!(p.l3, BigInt::one());
        assert_eq!(p.lens[2].parameter, BigInt::from(1));
        let p = build_polytope(&t(1, 2, 5)).unwrap();
        let orders: Vec<i64> = p.lens.iter().map(|l| i64::try_from(&l.order).unwrap()).collect();
        assert_eq!(orders, vec![1, 4, 25]);
    }

    #[test]
    fn unsorted_input_is_sorted() {
        let p = build_polytope(&t(5, 1, 2)).unwrap();
        assert_eq!(p.triple, t(1, 2, 5));
    }

    #[test]
    fn shifted_frames_stay_consistent() {
        for s in -3..=3 {
            let d = solve_mi_shifted(&t(2, 5, 29), &BigInt::from(s)).unwrap();
            assert_eq!(BigInt::from(3 * 29), BigInt::from(5) * &d.l2 + BigInt::from(2) * &d.l1);
        }
    }

    #[test]
    fn check_detects_corruption() {
        let mut p = build_polytope(&t(1, 5, 13)).unwrap();
        p.check().unwrap();
        p.edge_data.l1 += 1;
        assert!(matches!(p.check(), Err(PolytopeError::InternalInconsistency(_))));
    }
}
