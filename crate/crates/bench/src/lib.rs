//! Inputs shared by the benchmarks.

use atf_core::markov::{enumerate, MarkovTriple};
use atf_core::{BigInt, LatticePolygon, Point};

/// Triples along the Fibonacci branch and the next one off it, small to large.
pub fn sample_triples() -> Vec<MarkovTriple> {
    [(1, 1, 2), (1, 2, 5), (2, 5, 29), (5, 29, 433), (1, 89, 233), (29, 433, 37666)]
        .into_iter()
        .map(|(a, b, c)| MarkovTriple::new(a, b, c).expect("Markov"))
        .collect()
}

/// The triple with the largest entries up to `bound`.
pub fn largest_triple(bound: i64) -> MarkovTriple {
    enumerate(&BigInt::from(bound)).into_iter().max_by_key(|t| t.c().clone()).expect("nonempty")
}

/// A lattice polygon with `n` vertices on a parabola, in general position.
pub fn parabola_polygon(n: i64) -> LatticePolygon {
    let pts: Vec<Point> = (0..n).map(|k| Point::from_ints(k, k * k)).collect();
    LatticePolygon::convex_hull(&pts).expect("convex")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        assert_eq!(sample_triples().len(), 6);
        assert_eq!(largest_triple(1000).c(), &BigInt::from(985));
        assert_eq!(parabola_polygon(7).len(), 7);
    }
}
