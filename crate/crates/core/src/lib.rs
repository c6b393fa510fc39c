//! Exact lattice geometry of Markov triples, their weighted projective
//! planes, almost toric base diagrams and the boundary convex hulls that
//! tell the corresponding monotone tori apart.

pub mod atf;
pub mod hull;
pub mod json;
pub mod lattice;
pub mod markov;
pub mod polytope;
pub mod render;
pub mod verify;

pub use atf::{AtfError, BaseDiagram, Node, Side};
pub use hull::{BoundaryHull, Certificate, Distinction, HullError};
pub use lattice::{LatticeError, LatticePolygon, LatticeVector, Point, UnimodularMap};
pub use markov::{MarkovError, MarkovTriple, MutationPath, Slot};
pub use polytope::{EdgeData, LensLabel, PolytopeError, WeightedPolytope};
pub use render::{RenderError, RenderSpec, Style};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
