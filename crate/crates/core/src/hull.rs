//! Boundary Maslov-2 convex hull of the torus `T(a², b², c²)`.
//!
//! The three families of Maslov index 2 discs correspond to the facets of
//! the moment triangle, and their boundary classes in `π₁(T) ≅ Z²` are the
//! primitive inward facet normals. The hull they span has edge affine
//! lengths `{a, b, c}`, an invariant under `GL(2, Z)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{equivalent, normal_form, LatticePolygon, LatticeVector, Point, UnimodularMap};
use crate::markov::MarkovTriple;
use crate::polytope::{build_polytope, PolytopeError, WeightedPolytope};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HullError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("hull verification failed: {0}")]
    VerificationFailed(String),
}

impl HullError {
    /// Variant name, with wrapped errors reporting their own kind.
    pub fn kind(&self) -> &'static str {
        match self {
            HullError::Polytope(e) => e.kind(),
            HullError::VerificationFailed(_) => "VerificationFailed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryHull {
    /// `∂α, ∂β, ∂γ`, one per edge `a²u₁, b²u₂, c²u₃`.
    pub classes: [LatticeVector; 3],
    pub hull: LatticePolygon,
    /// Edge affine lengths, sorted.
    #[serde(with = "crate::json::int_array")]
    pub lengths: [BigInt; 3],
    pub provenance: MarkovTriple,
}

/// Primitive inward normals of every edge of a polygon, in edge order.
pub fn inward_normals(p: &LatticePolygon) -> Vec<LatticeVector> {
    p.edges()
        .iter()
        .map(|e| {
            let (d, _) = e.primitive_part().expect("polygon edges are nonzero");
            // Counterclockwise boundary: the interior is on the left.
            LatticeVector::new(-&d.y, d.x.clone())
        })
        .collect()
}

/// Inward facet normals of the moment triangle, ordered like its edges.
pub fn disc_classes(p: &WeightedPolytope) -> [LatticeVector; 3] {
    // The edges a²u₁, b²u₂, c²u₃ run clockwise, so inward is a clockwise turn.
    p.directions.clone().map(|u| u.rotate_cw())
}

fn verify(ok: bool, what: &str) -> Result<(), HullError> {
    if ok {
        Ok(())
    } else {
        Err(HullError::VerificationFailed(what.into()))
    }
}

pub fn boundary_hull(t: &MarkovTriple) -> Result<BoundaryHull, HullError> {
    let poly = build_polytope(t)?;
    hull_of_polytope(&poly)
}

/// The hull for an already built moment triangle (in any frame).
pub fn hull_of_polytope(poly: &WeightedPolytope) -> Result<BoundaryHull, HullError> {
    let classes = disc_classes(poly);
    let interior = poly.barycenter();
    for (normal, start) in classes.iter().zip(&poly.vertices) {
        let d = &interior - &start.to_point();
        verify(normal.to_point().dot(&d).is_positive(), "class is not an inward normal")?;
    }
    let hull = LatticePolygon::convex_hull(&classes.clone().map(|c| c.to_point()))
        .map_err(|_| HullError::VerificationFailed("classes span a degenerate hull".into()))?;
    let lengths = sorted_lengths(&hull)?;
    let h = BoundaryHull {
        classes,
        hull,
        lengths,
        provenance: poly.triple.clone(),
    };
    h.check()?;
    Ok(h)
}

fn sorted_lengths(hull: &LatticePolygon) -> Result<[BigInt; 3], HullError> {
    let mut ls = Vec::with_capacity(3);
    for l in hull.edge_lengths() {
        verify(l.is_integer(), "edge length not integral")?;
        ls.push(l.to_integer());
    }
    ls.sort();
    ls.try_into()
        .map_err(|_| HullError::VerificationFailed("hull is not a triangle".into()))
}

impl BoundaryHull {
    pub fn check(&self) -> Result<(), HullError> {
        verify(self.classes.iter().all(LatticeVector::is_primitive), "classes primitive")?;
        verify(self.hull.len() == 3, "hull is a triangle")?;
        verify(self.hull.contains_strictly(&Point::origin()), "origin interior")?;
        let [a, b, c] = self.provenance.sorted().entries().clone();
        let area = BigRational::new(BigInt::from(3) * &a * &b * &c, BigInt::from(2));
        verify(self.hull.area() == area, "hull area 3abc/2")?;
        verify(sorted_lengths(&self.hull)? == self.lengths, "stored lengths match hull")?;
        Ok(())
    }
}

/// The hull's edge affine lengths, asserted equal to the provenance entries.
pub fn edge_affine_lengths(h: &BoundaryHull) -> Result<[BigInt; 3], HullError> {
    let lengths = sorted_lengths(&h.hull)?;
    let expected = h.provenance.sorted().entries().clone();
    if lengths != expected {
        return Err(HullError::VerificationFailed(format!(
            "edge lengths {:?} differ from {}",
            lengths.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            h.provenance
        )));
    }
    Ok(lengths)
}

/// Exponent vectors of the three Laurent monomials of the superpotential;
/// their Newton polygon is the boundary hull.
pub fn superpotential_monomials(t: &MarkovTriple) -> Result<[LatticeVector; 3], HullError> {
    let h = boundary_hull(t)?;
    let exps = h.classes.clone();
    let newton = LatticePolygon::convex_hull(&exps.clone().map(|e| e.to_point()))
        .map_err(|_| HullError::VerificationFailed("degenerate Newton polygon".into()))?;
    verify(newton == h.hull, "Newton polygon equals the boundary hull")?;
    Ok(exps)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Sorted edge affine lengths of the two hulls, which differ.
    Lengths(#[serde(with = "crate::json::int_number_lists")] Vec<Vec<BigInt>>),
    /// Same lengths but different normal forms.
    NormalForms(Vec<LatticePolygon>),
    /// A map carrying the first hull onto the second.
    Witness(Box<UnimodularMap>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distinction {
    pub distinct: bool,
    pub certificate: Certificate,
}

/// Decides equivalence of two hulls: affine lengths first, then the full
/// normal form.
pub fn distinguish_hulls(p: &LatticePolygon, q: &LatticePolygon) -> Distinction {
    let mut lp = p.edge_lengths();
    let mut lq = q.edge_lengths();
    lp.sort();
    lq.sort();
    if lp != lq {
        let ints = |ls: Vec<BigRational>| -> Option<Vec<BigInt>> {
            ls.into_iter().map(|l| l.is_integer().then(|| l.to_integer())).collect()
        };
        if let (Some(a), Some(b)) = (ints(lp), ints(lq)) {
            return Distinction {
                distinct: true,
                certificate: Certificate::Lengths(vec![a, b]),
            };
        }
        return Distinction {
            distinct: true,
            certificate: Certificate::NormalForms(vec![normal_form(p), normal_form(q)]),
        };
    }
    match equivalent(p, q) {
        Some(w) => Distinction {
            distinct: false,
            certificate: Certificate::Witness(Box::new(w)),
        },
        None => Distinction {
            distinct: true,
            certificate: Certificate::NormalForms(vec![normal_form(p), normal_form(q)]),
        },
    }
}

pub fn distinguish(t1: &MarkovTriple, t2: &MarkovTriple) -> Result<Distinction, HullError> {
    let h1 = boundary_hull(t1)?;
    let h2 = boundary_hull(t2)?;
    Ok(distinguish_hulls(&h1.hull, &h2.hull))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a: i64, b: i64, c: i64) -> MarkovTriple {
        MarkovTriple::new(a, b, c).unwrap()
    }

    fn v(x: i64, y: i64) -> LatticeVector {
        LatticeVector::new(x, y)
    }

    fn lens(h: &BoundaryHull) -> Vec<i64> {
        h.lengths.iter().map(|l| i64::try_from(l).unwrap()).collect()
    }

    #[test]
    fn disc_class_examples() {
        let p = build_polytope(&t(1, 1, 1)).unwrap();
        assert_eq!(disc_classes(&p), [v(0, -1), v(-1, 1), v(1, 0)]);
        let p = build_polytope(&t(1, 2, 5)).unwrap();
        assert_eq!(disc_classes(&p), [v(-1, -4), v(-6, 1), v(1, 0)]);
    }

    #[test]
    fn generic_normals_agree_with_classes() {
        let p = build_polytope(&t(2, 5, 29)).unwrap();
        let mut generic = inward_normals(&p.polygon());
        let mut classes = disc_classes(&p).to_vec();
        generic.sort();
        classes.sort();
        assert_eq!(generic, classes);
    }

    #[test]
    fn hull_examples() {
        let clifford = LatticePolygon::from_int_vertices(&[(1, 0), (0, 1), (-1, -1)]).unwrap();
        let h = boundary_hull(&t(1, 1, 1)).unwrap();
        assert!(equivalent(&h.hull, &clifford).is_some());
        assert_eq!(lens(&h), vec![1, 1, 1]);

        let h = boundary_hull(&t(1, 2, 5)).unwrap();
        assert_eq!(h.hull, LatticePolygon::from_int_vertices(&[(-1, -4), (-6, 1), (1, 0)]).unwrap());
        assert_eq!(lens(&h), vec![1, 2, 5]);

        let h = boundary_hull(&t(1, 1, 2)).unwrap();
        assert_eq!(h.hull, LatticePolygon::from_int_vertices(&[(0, -1), (-4, 1), (1, 0)]).unwrap());
        assert_eq!(lens(&h), vec![1, 1, 2]);
    }

    #[test]
    fn lengths_match_provenance() {
        let h = boundary_hull(&t(2, 5, 29)).unwrap();
        let ls: Vec<i64> = edge_affine_lengths(&h).unwrap().iter().map(|l| i64::try_from(l).unwrap()).collect();
        assert_eq!(ls, vec![2, 5, 29]);
        let mut forged = h.clone();
        forged.provenance = t(1, 5, 13);
        assert!(matches!(edge_affine_lengths(&forged), Err(HullError::VerificationFailed(_))));
    }

    #[test]
    fn newton_polygon() {
        let exps = superpotential_monomials(&t(1, 1, 1)).unwrap();
        let newton = LatticePolygon::convex_hull(&exps.map(|e| e.to_point())).unwrap();
        // x + y + 1/(xy)
        let clifford = LatticePolygon::from_int_vertices(&[(1, 0), (0, 1), (-1, -1)]).unwrap();
        assert!(equivalent(&newton, &clifford).is_some());
        assert_eq!(superpotential_monomials(&t(1, 2, 5)).unwrap().len(), 3);
    }

    #[test]
    fn distinguish_examples() {
        let d = distinguish(&t(1, 1, 2), &t(1, 2, 5)).unwrap();
        assert!(d.distinct);
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"{"distinct":true,"certificate":{"lengths":[[1,1,2],[1,2,5]]}}"#
        );
        let d = distinguish(&t(1, 2, 5), &t(1, 2, 5)).unwrap();
        assert!(!d.distinct);
        assert_eq!(d.certificate, Certificate::Witness(Box::new(UnimodularMap::identity())));
        assert!(distinguish(&t(1, 2, 5), &t(2, 5, 29)).unwrap().distinct);
    }

    #[test]
    fn same_lengths_different_shape() {
        // Both have edge lengths {1, 1, 1} but areas 1/2 and 3/2.
        let a = LatticePolygon::from_int_vertices(&[(0, 0), (1, 0), (0, 1)]).unwrap();
        let b = LatticePolygon::from_int_vertices(&[(1, 0), (0, 1), (-1, -1)]).unwrap();
        let d = distinguish_hulls(&a, &b);
        assert!(d.distinct);
        assert!(matches!(d.certificate, Certificate::NormalForms(_)));
    }
}
