//! Almost toric base diagrams and their surgeries.
//!
//! A diagram is a convex polygon with nodes. Every node sits on a cut that
//! starts at a polygon vertex (its anchor) and runs inward along the node's
//! eigendirection; the marked fiber point is the image of the monotone
//! torus. Nodes store only their direction and position: the monodromy is
//! recomputed from the boundary at the cut whenever a cut is transferred.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{
    equivalences, monodromy_from_constraints, rat, LatticeError, LatticePolygon, LatticeVector,
    Point, UnimodularMap,
};
use crate::markov::{MarkovTriple, Slot};
use crate::polytope::{build_polytope, PolytopeError, WeightedPolytope};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtfError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("vertex {vertex} is not a smooth corner (|det| = {det})")]
    NotSmoothCorner { vertex: usize, det: BigInt },
    #[error("vertex {0} already carries a node")]
    AlreadyTraded(usize),
    #[error("no vertex with index {0}")]
    InvalidVertex(usize),
    #[error("no node with index {0}")]
    InvalidNode(usize),
    #[error("node would leave the interior of the polygon")]
    SlideOutOfBounds,
    #[error("node would land on the fiber point")]
    SlideThroughFiber,
    #[error("cut does not separate the diagram: {0}")]
    CutDoesNotSeparate(String),
    #[error("regluing produced a non-convex diagram")]
    NonConvexResult,
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl AtfError {
    /// Variant name, with wrapped errors reporting their own kind.
    pub fn kind(&self) -> &'static str {
        match self {
            AtfError::Polytope(e) => e.kind(),
            AtfError::Lattice(e) => e.kind(),
            AtfError::NotSmoothCorner { .. } => "NotSmoothCorner",
            AtfError::AlreadyTraded(_) => "AlreadyTraded",
            AtfError::InvalidVertex(_) => "InvalidVertex",
            AtfError::InvalidNode(_) => "InvalidNode",
            AtfError::SlideOutOfBounds => "SlideOutOfBounds",
            AtfError::SlideThroughFiber => "SlideThroughFiber",
            AtfError::CutDoesNotSeparate(_) => "CutDoesNotSeparate",
            AtfError::NonConvexResult => "NonConvexResult",
            AtfError::InvalidDiagram(_) => "InvalidDiagram",
            AtfError::VerificationFailed(_) => "VerificationFailed",
        }
    }
}

/// Fraction of the anchor-to-fiber distance used for default cut lengths.
pub fn default_cut_fraction() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(4))
}

/// A node of multiplicity one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Node {
    /// Index of the polygon vertex the cut starts at.
    pub anchor: usize,
    /// Primitive eigendirection, pointing from the anchor into the polygon.
    pub eigen: LatticeVector,
    /// The node sits at `anchor + length·eigen`.
    #[serde(rename = "length", with = "crate::json::rational")]
    pub cut_length: BigRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl FromStr for Side {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            _ => Err(format!("expected left or right, got {s:?}")),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseDiagram {
    pub polygon: LatticePolygon,
    pub nodes: Vec<Node>,
    pub fiber: Point,
    /// The polygon is `scale` times a moment triangle of `provenance`, up
    /// to affine unimodular maps.
    #[serde(with = "crate::json::rational")]
    pub scale: BigRational,
    pub provenance: MarkovTriple,
}

fn segments_intersect(p1: &Point, p2: &Point, q1: &Point, q2: &Point) -> bool {
    let orient = |a: &Point, b: &Point, c: &Point| (b - a).det(&(c - a));
    let on_segment = |a: &Point, b: &Point, c: &Point| {
        // c collinear with ab; is it between them?
        (c - a).dot(&(c - b)) <= BigRational::zero()
    };
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1.is_positive() && d2.is_negative()) || (d1.is_negative() && d2.is_positive()))
        && ((d3.is_positive() && d4.is_negative()) || (d3.is_negative() && d4.is_positive()))
    {
        return true;
    }
    (d1.is_zero() && on_segment(q1, q2, p1))
        || (d2.is_zero() && on_segment(q1, q2, p2))
        || (d3.is_zero() && on_segment(p1, p2, q1))
        || (d4.is_zero() && on_segment(p1, p2, q2))
}

fn on_segment(a: &Point, b: &Point, p: &Point) -> bool {
    (b - a).det(&(p - a)).is_zero() && (p - a).dot(&(p - b)) <= BigRational::zero()
}

/// Parameter `s` with `p = start + s·dir`, if `p` lies on that line.
fn line_parameter(start: &Point, dir: &LatticeVector, p: &Point) -> Option<BigRational> {
    let d = p - start;
    let dv = dir.to_point();
    if !dv.det(&d).is_zero() {
        return None;
    }
    Some(d.dot(&dv) / dv.dot(&dv))
}

impl BaseDiagram {
    /// The toric diagram of a moment triangle: no nodes, fiber at the
    /// weighted barycenter.
    pub fn toric(p: &WeightedPolytope) -> Self {
        BaseDiagram {
            polygon: p.polygon(),
            nodes: Vec::new(),
            fiber: p.barycenter(),
            scale: p.scale.clone(),
            provenance: p.triple.clone(),
        }
    }

    pub fn anchor_point(&self, node: &Node) -> &Point {
        self.polygon.vertex(node.anchor)
    }

    pub fn node_position(&self, node: &Node) -> Point {
        self.anchor_point(node).offset(&node.eigen, &node.cut_length)
    }

    fn node(&self, i: usize) -> Result<&Node, AtfError> {
        self.nodes.get(i).ok_or(AtfError::InvalidNode(i))
    }

    /// Every cut line passes through the fiber point.
    pub fn cut_lines_meet_fiber(&self) -> bool {
        self.nodes
            .iter()
            .all(|n| line_parameter(self.anchor_point(n), &n.eigen, &self.fiber).is_some())
    }

    /// Checks the diagram's structural invariants: nodes of multiplicity
    /// one strictly inside and off the fiber, distinct anchors, pairwise
    /// disjoint cuts. The fiber may lie on a cut, as it does right after a
    /// transfer without a slide.
    pub fn validate(&self) -> Result<(), AtfError> {
        let bad = |m: String| Err(AtfError::InvalidDiagram(m));
        if !self.scale.is_positive() {
            return bad("scale must be positive".into());
        }
        if !self.polygon.contains_strictly(&self.fiber) {
            return bad("fiber is not interior".into());
        }
        let mut anchors: Vec<usize> = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if n.anchor >= self.polygon.len() {
                return bad(format!("node {i} anchored at missing vertex {}", n.anchor));
            }
            if anchors.contains(&n.anchor) {
                return bad(format!("two nodes anchored at vertex {}", n.anchor));
            }
            anchors.push(n.anchor);
            if !n.eigen.is_primitive() {
                return bad(format!("node {i} has a non-primitive eigendirection"));
            }
            if !n.cut_length.is_positive() || !self.polygon.contains_strictly(&self.node_position(n)) {
                return bad(format!("node {i} is not interior"));
            }
            if self.node_position(n) == self.fiber {
                return bad(format!("node {i} sits on the fiber"));
            }
        }
        for i in 0..self.nodes.len() {
            for j in i + 1..self.nodes.len() {
                let (a, b) = (&self.nodes[i], &self.nodes[j]);
                if segments_intersect(
                    self.anchor_point(a),
                    &self.node_position(a),
                    self.anchor_point(b),
                    &self.node_position(b),
                ) {
                    return bad(format!("cuts {i} and {j} meet"));
                }
            }
        }
        Ok(())
    }

    /// Multiplies every length by `k > 0`, keeping the origin fixed.
    pub fn scaled(&self, k: &BigRational) -> BaseDiagram {
        let polygon = LatticePolygon::new(self.polygon.vertices().iter().map(|v| v.scale(k)).collect())
            .expect("positive scaling keeps the polygon");
        // Positive scaling preserves the vertex order, so anchors stay put.
        BaseDiagram {
            polygon,
            nodes: self
                .nodes
                .iter()
                .map(|n| Node {
                    cut_length: &n.cut_length * k,
                    ..n.clone()
                })
                .collect(),
            fiber: self.fiber.scale(k),
            scale: &self.scale * k,
            provenance: self.provenance.clone(),
        }
    }

    /// Image under an affine unimodular map.
    pub fn transform(&self, map: &UnimodularMap) -> BaseDiagram {
        let polygon = self.polygon.transform(map);
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node {
                anchor: polygon
                    .index_of(&map.apply_point(self.anchor_point(n)))
                    .expect("vertices map to vertices"),
                eigen: map.apply_vector(&n.eigen),
                cut_length: n.cut_length.clone(),
            })
            .collect();
        BaseDiagram {
            polygon,
            nodes,
            fiber: map.apply_point(&self.fiber),
            scale: self.scale.clone(),
            provenance: self.provenance.clone(),
        }
    }
}

/// Maps `A` with `A(d) = e` on polygon, nodes and fiber. Scale and
/// provenance are not compared.
pub fn diagram_equivalences(d: &BaseDiagram, e: &BaseDiagram) -> Vec<UnimodularMap> {
    if d.nodes.len() != e.nodes.len() {
        return Vec::new();
    }
    let mut target: Vec<(Point, LatticeVector, BigRational)> = e
        .nodes
        .iter()
        .map(|n| (e.anchor_point(n).clone(), n.eigen.clone(), n.cut_length.clone()))
        .collect();
    target.sort();
    equivalences(&d.polygon, &e.polygon)
        .into_iter()
        .filter(|m| {
            if m.apply_point(&d.fiber) != e.fiber {
                return false;
            }
            let mut image: Vec<_> = d
                .nodes
                .iter()
                .map(|n| {
                    (
                        m.apply_point(d.anchor_point(n)),
                        m.apply_vector(&n.eigen),
                        n.cut_length.clone(),
                    )
                })
                .collect();
            image.sort();
            image == target
        })
        .collect()
}

pub fn diagrams_equivalent(d: &BaseDiagram, e: &BaseDiagram) -> bool {
    !diagram_equivalences(d, e).is_empty()
}

/// Three rational blowdowns of the moment triangle, nodes ordered by the
/// slot of the edge their corner faces, each at `fraction` of the way to
/// the barycenter.
pub fn rational_blowdown_diagram_with(
    t: &MarkovTriple,
    fraction: &BigRational,
) -> Result<BaseDiagram, AtfError> {
    if !fraction.is_positive() || fraction >= &BigRational::one() {
        return Err(AtfError::SlideOutOfBounds);
    }
    let p = build_polytope(t)?;
    let mut d = BaseDiagram::toric(&p);
    for s in Slot::ALL {
        let corner = p.corner(s).to_point();
        d.nodes.push(Node {
            anchor: d.polygon.index_of(&corner).expect("corner is a vertex"),
            eigen: -p.cut(s),
            cut_length: p.fiber_distance(s) * fraction,
        });
    }
    d.validate()?;
    if !d.cut_lines_meet_fiber() {
        return Err(AtfError::VerificationFailed("cut lines miss the barycenter".into()));
    }
    Ok(d)
}

pub fn rational_blowdown_diagram(t: &MarkovTriple) -> Result<BaseDiagram, AtfError> {
    rational_blowdown_diagram_with(t, &default_cut_fraction())
}

/// Replaces a smooth corner by a node with eigendirection `e₁ + e₂`.
/// Without an explicit length the node goes a quarter of the way to the
/// fiber (if the eigenray meets it) or to the far boundary.
pub fn nodal_trade(
    d: &BaseDiagram,
    vertex: usize,
    cut_length: Option<BigRational>,
) -> Result<BaseDiagram, AtfError> {
    let n = d.polygon.len();
    if vertex >= n {
        return Err(AtfError::InvalidVertex(vertex));
    }
    if d.nodes.iter().any(|node| node.anchor == vertex) {
        return Err(AtfError::AlreadyTraded(vertex));
    }
    let v = d.polygon.vertex(vertex);
    let (e1, _) = (d.polygon.vertex(vertex + 1) - v).primitive_part()?;
    let (e2, _) = (d.polygon.vertex(vertex + n - 1) - v).primitive_part()?;
    let det = e1.det(&e2).abs();
    if !det.is_one() {
        return Err(AtfError::NotSmoothCorner { vertex, det });
    }
    let eigen = &e1 + &e2;
    let length = match cut_length {
        Some(l) => l,
        None => {
            let exit = d
                .polygon
                .exit_parameter(v, &eigen)
                .ok_or_else(|| AtfError::CutDoesNotSeparate("eigenray never exits".into()))?;
            let reach = line_parameter(v, &eigen, &d.fiber)
                .filter(|s| s.is_positive() && s < &exit)
                .unwrap_or(exit);
            reach * default_cut_fraction()
        }
    };
    let mut out = d.clone();
    out.nodes.push(Node {
        anchor: vertex,
        eigen,
        cut_length: length,
    });
    let node = out.nodes.last().unwrap();
    let pos = out.node_position(node);
    if !node.cut_length.is_positive() || !out.polygon.contains_strictly(&pos) {
        return Err(AtfError::SlideOutOfBounds);
    }
    if pos == out.fiber {
        return Err(AtfError::SlideThroughFiber);
    }
    Ok(out)
}

/// Moves a node along its eigenline. The node may cross the fiber point
/// (that is how the monotone fiber changes) but may not land on it.
pub fn nodal_slide(
    d: &BaseDiagram,
    node: usize,
    new_length: &BigRational,
) -> Result<BaseDiagram, AtfError> {
    let current = d.node(node)?;
    if !new_length.is_positive() {
        return Err(AtfError::SlideOutOfBounds);
    }
    let pos = d.anchor_point(current).offset(&current.eigen, new_length);
    if !d.polygon.contains_strictly(&pos) {
        return Err(AtfError::SlideOutOfBounds);
    }
    if pos == d.fiber {
        return Err(AtfError::SlideThroughFiber);
    }
    let mut out = d.clone();
    out.nodes[node].cut_length = new_length.clone();
    Ok(out)
}

/// Where a transfer of the cut of one node splits the polygon.
struct CutGeometry {
    node_pos: Point,
    anchor: Point,
    /// The far end of the eigenline, on the boundary.
    exit: Point,
    exit_parameter: BigRational,
    /// Vertices of the two pieces in counterclockwise order, left first.
    left: Vec<Point>,
    right: Vec<Point>,
}

fn cut_geometry(d: &BaseDiagram, node: &Node) -> Result<CutGeometry, AtfError> {
    let anchor = d.anchor_point(node).clone();
    let node_pos = d.node_position(node);
    let s_exit = d
        .polygon
        .exit_parameter(&anchor, &node.eigen)
        .filter(|s| s.is_positive())
        .ok_or_else(|| AtfError::CutDoesNotSeparate("eigenline leaves the polygon at its anchor".into()))?;
    if node.cut_length >= s_exit {
        return Err(AtfError::CutDoesNotSeparate("node is not inside the polygon".into()));
    }
    let exit = anchor.offset(&node.eigen, &s_exit);

    // Boundary cycle starting at the anchor, with the exit point inserted.
    let verts = d.polygon.vertices();
    let n = verts.len();
    let start = node.anchor;
    let mut cycle: Vec<Point> = Vec::with_capacity(n + 1);
    let mut exit_index = None;
    for k in 0..n {
        let a = &verts[(start + k) % n];
        let b = &verts[(start + k + 1) % n];
        cycle.push(a.clone());
        if a == &exit {
            exit_index = Some(cycle.len() - 1);
        } else if b != &exit && exit_index.is_none() && on_segment(a, b, &exit) {
            cycle.push(exit.clone());
            exit_index = Some(cycle.len() - 1);
        }
    }
    let k = exit_index.ok_or_else(|| AtfError::CutDoesNotSeparate("exit point not on boundary".into()))?;
    let first: Vec<Point> = cycle[..=k].to_vec();
    let mut second: Vec<Point> = cycle[k..].to_vec();
    second.push(cycle[0].clone());
    if first.len() < 3 || second.len() < 3 {
        return Err(AtfError::CutDoesNotSeparate("eigenline runs along an edge".into()));
    }
    // Left of the cut ray, which points from the node back to the anchor.
    let ray = -&node.eigen;
    let side_of = |p: &Point| ray.to_point().det(&(p - &node_pos));
    let first_is_left = side_of(&first[1]).is_positive();
    let (left, right) = if first_is_left { (first, second) } else { (second, first) };
    Ok(CutGeometry {
        node_pos,
        anchor,
        exit,
        exit_parameter: s_exit,
        left,
        right,
    })
}

/// Transfers the cut of `node` by applying the node's monodromy to the
/// part of the diagram on `side` of the cut ray (the ray from the node to
/// its anchor) and regluing. Afterwards the cut runs from the node to the
/// opposite end of the eigenline.
pub fn transfer_cut(d: &BaseDiagram, node: usize, side: Side) -> Result<BaseDiagram, AtfError> {
    let target = d.node(node)?.clone();
    let geo = cut_geometry(d, &target)?;
    let (moved, kept) = match side {
        Side::Left => (&geo.left, &geo.right),
        Side::Right => (&geo.right, &geo.left),
    };
    // Boundary directions at the anchor, pointing away from it.
    fn neighbour<'a>(piece: &'a [Point], anchor: &Point) -> &'a Point {
        if &piece[0] == anchor {
            &piece[1]
        } else {
            &piece[piece.len() - 2]
        }
    }
    let (d_moved, _) = (neighbour(moved, &geo.anchor) - &geo.anchor).primitive_part()?;
    let (d_kept, _) = (neighbour(kept, &geo.anchor) - &geo.anchor).primitive_part()?;
    // After regluing the two boundary edges at the anchor line up.
    let monodromy = monodromy_from_constraints(&target.eigen, &d_moved, &-d_kept)?;
    let affine = monodromy.centered_at(&geo.node_pos);

    let ray = -&target.eigen;
    let side_sign = |p: &Point| ray.to_point().det(&(p - &geo.node_pos));
    let on_moved_side = |p: &Point| match side {
        Side::Left => side_sign(p).is_positive(),
        Side::Right => side_sign(p).is_negative(),
    };

    let moved_image: Vec<Point> = moved.iter().map(|p| affine.apply_point(p)).collect();
    let area = |pts: &[Point]| {
        let n = pts.len();
        (0..n).fold(BigRational::zero(), |acc, i| acc + pts[i].det(&pts[(i + 1) % n])).abs()
            / rat(2)
    };
    let mut all = kept.clone();
    all.extend(moved_image.iter().cloned());
    let polygon = LatticePolygon::convex_hull(&all).map_err(|_| AtfError::NonConvexResult)?;
    if polygon.area() != area(kept) + area(&moved_image) {
        return Err(AtfError::NonConvexResult);
    }

    let mut nodes = Vec::with_capacity(d.nodes.len());
    for (i, n) in d.nodes.iter().enumerate() {
        if i == node {
            let anchor = polygon.index_of(&geo.exit).ok_or_else(|| {
                AtfError::VerificationFailed("transferred cut does not end at a corner".into())
            })?;
            nodes.push(Node {
                anchor,
                eigen: -&n.eigen,
                cut_length: &geo.exit_parameter - &n.cut_length,
            });
            continue;
        }
        let a = d.anchor_point(n);
        let p = d.node_position(n);
        let (sa, sp) = (side_sign(a), side_sign(&p));
        if sa.is_zero() || sp.is_zero() || sa.is_positive() != sp.is_positive() {
            return Err(AtfError::CutDoesNotSeparate(format!("cut of node {i} meets the eigenline")));
        }
        let (anchor_pt, eigen) = if on_moved_side(a) {
            (affine.apply_point(a), monodromy.apply_vector(&n.eigen))
        } else {
            (a.clone(), n.eigen.clone())
        };
        let anchor = polygon.index_of(&anchor_pt).ok_or_else(|| {
            AtfError::VerificationFailed(format!("anchor of node {i} is no longer a corner"))
        })?;
        nodes.push(Node {
            anchor,
            eigen,
            cut_length: n.cut_length.clone(),
        });
    }
    let fiber = if on_moved_side(&d.fiber) {
        affine.apply_point(&d.fiber)
    } else {
        d.fiber.clone()
    };
    Ok(BaseDiagram {
        polygon,
        nodes,
        fiber,
        scale: d.scale.clone(),
        provenance: d.provenance.clone(),
    })
}

/// Exact checks made while mutating a diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationCertificate {
    /// Mutated slot of the sorted triple.
    pub slot: Slot,
    /// The new triple, sorted.
    pub triple: MarkovTriple,
    /// Common factor between the new edge lengths and `{x'², y², z²}`.
    #[serde(with = "crate::json::rational")]
    pub factor: BigRational,
    /// Where the eigenline meets the opposite edge: `S + (x·z²/x')·u`.
    pub cut_point: Point,
    /// Affine lengths of the new edges, sorted.
    #[serde(with = "crate::json::rational_list")]
    pub edge_lengths: Vec<BigRational>,
}

/// Result of [`mutate_diagram_with_certificate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutation {
    pub diagram: BaseDiagram,
    pub certificate: MutationCertificate,
}

fn fail(msg: impl Into<String>) -> AtfError {
    AtfError::VerificationFailed(msg.into())
}

/// Mutates the diagram of `t` at `slot`: slides the node facing that
/// slot's edge past the fiber, transfers its cut on the left, and checks
/// that the result is the diagram of the mutated triple scaled by `x/x'`.
pub fn mutate_diagram(t: &MarkovTriple, slot: Slot) -> Result<(BaseDiagram, MarkovTriple), AtfError> {
    let m = mutate_diagram_with_certificate(t, slot)?;
    let triple = m.certificate.triple.clone();
    Ok((m.diagram, triple))
}

pub fn mutate_diagram_with_certificate(t: &MarkovTriple, slot: Slot) -> Result<Mutation, AtfError> {
    let slot = t.sorted_slot(slot);
    let t = t.sorted();
    let fraction = default_cut_fraction();
    let poly = build_polytope(&t)?;
    let start = rational_blowdown_diagram_with(&t, &fraction)?;
    let idx = slot.index();
    let node = &start.nodes[idx];

    let x = t.get(slot).clone();
    let x_new = t.partner(slot);
    let (yi, zi) = slot.others();
    let (y, z) = (t.get(yi).clone(), t.get(zi).clone());

    // Far end of the eigenline: on the edge of `slot`, an exact distance
    // from its start vertex.
    let anchor = start.anchor_point(node).clone();
    let s_exit = start
        .polygon
        .exit_parameter(&anchor, &node.eigen)
        .ok_or_else(|| fail("eigenline does not exit"))?;
    let exit = anchor.offset(&node.eigen, &s_exit);
    let (edge_start, preceding) = match slot {
        Slot::A => (&poly.vertices[0], t.c()),
        Slot::B => (&poly.vertices[1], t.a()),
        Slot::C => (&poly.vertices[2], t.b()),
    };
    let expected_cut = edge_start
        .to_point()
        .offset(&poly.directions[idx], &BigRational::new(&x * preceding * preceding, x_new.clone()));
    if exit != expected_cut {
        return Err(fail(format!("eigenline meets the opposite edge at {exit}, expected {expected_cut}")));
    }

    // Slide the node past the fiber, then transfer its cut.
    let s_fiber = poly.fiber_distance(slot);
    let slid_length = &s_exit - (&s_exit - &s_fiber) * &fraction;
    let slid = nodal_slide(&start, idx, &slid_length)?;
    let mut out = transfer_cut(&slid, idx, Side::Left)?;

    if out.polygon.area() != start.polygon.area() {
        return Err(fail("area changed"));
    }
    let mut lengths = out.polygon.edge_lengths();
    lengths.sort();
    let factor = BigRational::new(x.clone(), x_new.clone());
    let mut expected: Vec<BigRational> = [&x_new, &y, &z]
        .iter()
        .map(|k| rat(*k * *k) * &factor)
        .collect();
    expected.sort();
    if lengths != expected {
        return Err(fail(format!(
            "edge lengths {:?} are not (x/x')·{{x'², y², z²}}",
            lengths.iter().map(|l| l.to_string()).collect::<Vec<_>>()
        )));
    }

    if slot == Slot::A {
        check_slot_a_edge(&t, &poly, &out, &x_new)?;
    }

    let new_triple = t.mutate(slot).sorted();
    out.provenance = new_triple.clone();
    out.scale = &start.scale * &factor;
    out.validate()?;
    if !out.cut_lines_meet_fiber() {
        return Err(fail("cut lines no longer meet the fiber"));
    }
    let reference = rational_blowdown_diagram_with(&new_triple, &fraction)?.scaled(&factor);
    if !diagrams_equivalent(&out, &reference) {
        return Err(fail("result is not the scaled diagram of the mutated triple"));
    }

    Ok(Mutation {
        certificate: MutationCertificate {
            slot,
            triple: new_triple,
            factor,
            cut_point: exit,
            edge_lengths: lengths,
        },
        diagram: out,
    })
}

/// For the cut facing `a²u₁`: the reglued edge `-a·a'²u₃ - a·c²u₁`,
/// scaled by `a'`, is `-a·(c²b², a'² - c²m₁)` and `b²` divides its second
/// entry, since `a²m₁ ≡ c²` and `a·a' ≡ c²` mod `b²`.
fn check_slot_a_edge(
    t: &MarkovTriple,
    poly: &WeightedPolytope,
    out: &BaseDiagram,
    a_new: &BigInt,
) -> Result<(), AtfError> {
    let [a, b, c] = t.entries();
    let (b2, c2) = (b * b, c * c);
    let second = a_new * a_new - &c2 * &poly.edge_data.m1;
    if !second.is_multiple_of(&b2) {
        return Err(fail("b² does not divide a'² - c²m₁"));
    }
    let scaled_edge = LatticeVector::new(-(a * &c2 * &b2), -(a * &second));
    let expected = scaled_edge.to_point().scale(&BigRational::new(BigInt::one(), a_new.clone()));
    let found = out
        .polygon
        .edges()
        .into_iter()
        .any(|e| e == expected || -&e == expected);
    if !found {
        return Err(fail("reglued edge differs from -a·(c²b², a'² - c²m₁)/a'"));
    }
    Ok(())
}


/// One panel of a mutation chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub triple: MarkovTriple,
    pub diagram: BaseDiagram,
}

/// Replays the descent of `target` backwards from `(1, 1, 1)`: the root's
/// blowdown diagram, then one mutated diagram per step.
pub fn replay_chain(target: &MarkovTriple) -> Result<Vec<ChainStep>, AtfError> {
    let path = crate::markov::reduce(target).reversed();
    let root = MarkovTriple::root();
    let mut steps = vec![ChainStep {
        triple: root.clone(),
        diagram: rational_blowdown_diagram(&root)?,
    }];
    let mut current = path.start.clone();
    for slot in path.steps {
        let (diagram, triple) = mutate_diagram(&current, slot)?;
        current = current.mutate(slot);
        if triple != current.sorted() {
            return Err(fail(format!("chain reached {triple}, expected {}", current.sorted())));
        }
        steps.push(ChainStep { triple, diagram });
    }
    Ok(steps)
}
