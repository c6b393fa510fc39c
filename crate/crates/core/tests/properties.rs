use proptest::prelude::*;

use atf_core::atf::{rational_blowdown_diagram, transfer_cut, Side};
use atf_core::hull::{boundary_hull, hull_of_polytope, inward_normals};
use atf_core::lattice::{equivalent, normal_form};
use atf_core::markov::{reduce, MarkovTriple, MutationPath, Slot};
use atf_core::polytope::build_polytope_shifted;
use atf_core::render::{render_diagram, render_hull, RenderSpec};
use atf_core::{BigInt, LatticePolygon, LatticeVector, Point, UnimodularMap};

fn slot() -> impl Strategy<Value = Slot> {
    prop_oneof![Just(Slot::A), Just(Slot::B), Just(Slot::C)]
}

/// Triples reached from the root by a short walk.
fn triple(max_steps: usize) -> impl Strategy<Value = MarkovTriple> {
    prop::collection::vec(slot(), 0..max_steps).prop_map(|steps| {
        MutationPath {
            start: MarkovTriple::root(),
            steps,
        }
        .end()
    })
}

/// Products of elementary matrices, optionally with a reflection.
fn unimodular() -> impl Strategy<Value = UnimodularMap> {
    (prop::collection::vec((0..4u8, -3i64..=3), 0..6), any::<bool>(), -5i64..=5, -5i64..=5).prop_map(
        |(ops, flip, tx, ty)| {
            let mut m = if flip {
                UnimodularMap::from_rows([[0, 1], [1, 0]]).unwrap()
            } else {
                UnimodularMap::identity()
            };
            for (kind, k) in ops {
                let e = match kind {
                    0 => [[1, k], [0, 1]],
                    1 => [[1, 0], [k, 1]],
                    2 => [[0, -1], [1, 0]],
                    _ => [[-1, 0], [0, -1]],
                };
                m = UnimodularMap::from_rows(e).unwrap().compose(&m);
            }
            UnimodularMap::translation(Point::from_ints(tx, ty)).compose(&m)
        },
    )
}

fn polygon() -> impl Strategy<Value = LatticePolygon> {
    prop::collection::vec((-6i64..=6, -6i64..=6), 3..9)
        .prop_filter_map("degenerate", |pts| {
            let pts: Vec<Point> = pts.into_iter().map(|(x, y)| Point::from_ints(x, y)).collect();
            LatticePolygon::convex_hull(&pts).ok()
        })
}

fn vector() -> impl Strategy<Value = LatticeVector> {
    (-50i64..=50, -50i64..=50).prop_map(|(x, y)| LatticeVector::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mutation_is_an_involution(t in triple(10), s in slot()) {
        prop_assert_eq!(t.mutate(s).mutate(s), t.clone());
        prop_assert!(t.partner_identity(s));
    }

    #[test]
    fn descent_inverts_the_walk(t in triple(10)) {
        let path = reduce(&t);
        prop_assert!(path.end().is_root());
        prop_assert_eq!(path.reversed().end(), t);
    }

    #[test]
    fn affine_length_is_invariant(v in vector(), m in unimodular()) {
        prop_assert_eq!(m.apply_vector(&v).affine_length(), v.affine_length());
    }

    #[test]
    fn normal_form_is_idempotent_and_invariant(p in polygon(), m in unimodular()) {
        let nf = normal_form(&p);
        prop_assert_eq!(normal_form(&nf), nf.clone());
        prop_assert_eq!(normal_form(&p.transform(&m)), nf);
    }

    #[test]
    fn area_is_invariant(p in polygon(), m in unimodular()) {
        prop_assert_eq!(p.transform(&m).area(), p.area());
    }

    #[test]
    fn equivalence_is_an_equivalence_relation(p in polygon(), m in unimodular(), n in unimodular()) {
        let q = p.transform(&m);
        let r = q.transform(&n);
        prop_assert!(equivalent(&p, &p).is_some());
        let pq = equivalent(&p, &q).unwrap();
        prop_assert_eq!(p.transform(&pq), q.clone());
        let qp = equivalent(&q, &p).unwrap();
        prop_assert_eq!(q.transform(&qp), p.clone());
        let pr = equivalent(&p, &r).unwrap();
        prop_assert_eq!(p.transform(&pr), r);
    }

    #[test]
    fn hull_is_natural(t in triple(5), m in unimodular()) {
        let h = boundary_hull(&t).unwrap();
        let moved = h.hull.clone();
        let linear = UnimodularMap::linear(m.matrix().clone()).unwrap();
        let p = build_polytope_shifted(&t, &BigInt::from(0)).unwrap().polygon().transform(&m);
        let normals: Vec<Point> = inward_normals(&p).into_iter().map(|n| n.to_point()).collect();
        let hull = LatticePolygon::convex_hull(&normals).unwrap();
        let expected = moved.transform(&linear.inverse_transpose());
        prop_assert_eq!(&hull, &expected);
        prop_assert_eq!(normal_form(&hull), normal_form(&h.hull));
    }

    #[test]
    fn hull_ignores_the_edge_frame(t in triple(5), shift in -3i64..=3) {
        let p = build_polytope_shifted(&t, &BigInt::from(shift)).unwrap();
        let h = hull_of_polytope(&p).unwrap();
        let base = boundary_hull(&t).unwrap();
        prop_assert!(equivalent(&h.hull, &base.hull).is_some());
        prop_assert_eq!(h.lengths, base.lengths);
    }

    #[test]
    fn transfer_round_trip(t in triple(5), node in 0usize..3, left in any::<bool>()) {
        let d = rational_blowdown_diagram(&t.sorted()).unwrap();
        let side = if left { Side::Left } else { Side::Right };
        let there = transfer_cut(&d, node, side).unwrap();
        prop_assert_eq!(there.polygon.area(), d.polygon.area());
        prop_assert_eq!(there.nodes.len(), d.nodes.len());
        prop_assert!(there.cut_lines_meet_fiber());
        prop_assert_eq!(transfer_cut(&there, node, side.opposite()).unwrap(), d);
    }

    #[test]
    fn rendering_is_deterministic(t in triple(4)) {
        let spec = RenderSpec::default();
        let d = rational_blowdown_diagram(&t.sorted()).unwrap();
        prop_assert_eq!(render_diagram(&d, &spec).unwrap(), render_diagram(&d.clone(), &spec).unwrap());
        let h = boundary_hull(&t).unwrap();
        prop_assert_eq!(render_hull(&h, &spec).unwrap(), render_hull(&h.clone(), &spec).unwrap());
    }
}
