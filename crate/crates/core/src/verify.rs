//! Self-verification over every Markov triple up to a bound.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atf::{mutate_diagram, rational_blowdown_diagram, transfer_cut, Side};
use crate::hull::{boundary_hull, distinguish_hulls, edge_affine_lengths};
use crate::lattice::normal_form;
use crate::markov::{enumerate, is_markov, reduce, MarkovTriple, Slot};
use crate::polytope::build_polytope;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    #[serde(with = "crate::json::int_string")]
    pub max_entry: BigInt,
    pub triples: usize,
    pub suites: Vec<SuiteResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} triples with entries <= {}", self.triples, self.max_entry)?;
        writeln!(f, "{:<12} {:>8}  result", "suite", "checked")?;
        for s in &self.suites {
            let verdict = if s.passed() {
                "PASS".to_string()
            } else {
                format!("FAIL ({})", s.failures.len())
            };
            writeln!(f, "{:<12} {:>8}  {}", s.name, s.checked, verdict)?;
            for msg in s.failures.iter().take(5) {
                writeln!(f, "    {msg}")?;
            }
        }
        Ok(())
    }
}

type Check = fn(&MarkovTriple) -> Result<usize, String>;

/// Names and per-triple checks, in report order.
pub const SUITES: [(&str, Check); 5] = [
    ("markov", check_markov),
    ("polytope", check_polytope),
    ("barycenter", check_barycenter),
    ("mutation", check_mutation),
    ("hull", check_hull),
];

fn ensure(ok: bool, t: &MarkovTriple, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(format!("{t}: {what}"))
    }
}

pub fn check_markov(t: &MarkovTriple) -> Result<usize, String> {
    let [a, b, c] = t.entries();
    ensure(is_markov(a, b, c), t, "not on the Markov surface")?;
    ensure(t.pairwise_coprime(), t, "entries not pairwise coprime")?;
    for s in Slot::ALL {
        ensure(&t.mutate(s).mutate(s) == t, t, "mutation is not an involution")?;
        ensure(t.partner_identity(s), t, "partner identity fails")?;
    }
    let path = reduce(t);
    ensure(path.end().is_root(), t, "descent does not reach (1,1,1)")?;
    ensure(&path.reversed().end() == t, t, "reversed descent does not return")?;
    Ok(1)
}

pub fn check_polytope(t: &MarkovTriple) -> Result<usize, String> {
    let p = build_polytope(t).map_err(|e| format!("{t}: {e}"))?;
    p.check().map_err(|e| format!("{t}: {e}"))?;
    let [a, b, c] = t.entries();
    let e = &p.edge_data;
    let (a2, b2, c2) = (a * a, b * b, c * c);
    ensure(&a2 * &e.m1 + &b2 * &e.m2 == c2, t, "a²m₁ + b²m₂ = c²")?;
    ensure(
        &a2 * (&e.m1 + 1u32) + &b2 * (&e.m2 + 1u32) == BigInt::from(3) * a * b * c,
        t,
        "a²(m₁+1) + b²(m₂+1) = 3abc",
    )?;
    ensure(BigInt::from(3) * c == b * &e.l2 + a * &e.l1, t, "3c = bl₂ + al₁")?;
    ensure(e.m1 == b * &e.l1 - 1u32, t, "m₁ = bl₁ − 1")?;
    ensure(e.m2 == a * &e.l2 - 1u32, t, "m₂ = al₂ − 1")?;
    let mut orders: Vec<BigInt> = p.lens.iter().map(|l| l.order.clone()).collect();
    let mut squares = vec![a2, b2, c2];
    orders.sort();
    squares.sort();
    ensure(orders == squares, t, "lens orders are {a², b², c²}")?;
    Ok(1)
}

pub fn check_barycenter(t: &MarkovTriple) -> Result<usize, String> {
    let p = build_polytope(t).map_err(|e| format!("{t}: {e}"))?;
    let [a, b, c] = t.entries();
    let [w1, w2, w3] = &p.cuts;
    let sum = &(&w1.scale(a) + &w2.scale(b)) + &w3.scale(c);
    ensure(sum.is_zero(), t, "a·w₁ + b·w₂ + c·w₃ = 0")?;
    let edges = p.edges();
    let third = |v: crate::lattice::LatticeVector| v.to_point().scale(&BigRational::new(BigInt::one(), 3.into()));
    let (ab, bc, ca) = (a * b, b * c, c * a);
    // Each edge is one third of a difference of scaled cuts.
    let identities = [
        (third(&w3.scale(&ab) - &w2.scale(&ca)), &edges[0]),
        (third(&w1.scale(&bc) - &w3.scale(&ab)), &edges[1]),
        (third(&w2.scale(&ca) - &w1.scale(&bc)), &edges[2]),
    ];
    for (i, (lhs, edge)) in identities.iter().enumerate() {
        ensure(lhs == &edge.to_point(), t, &format!("barycenter identity {}", i + 1))?;
    }
    let d = rational_blowdown_diagram(t).map_err(|e| format!("{t}: {e}"))?;
    ensure(d.cut_lines_meet_fiber(), t, "barycenter lies on all cut lines")?;
    let area = BigRational::new((a * a) * (b * b) * (c * c), BigInt::from(2));
    ensure(p.polygon().area() == area, t, "area a²b²c²/2")?;
    Ok(1)
}

pub fn check_mutation(t: &MarkovTriple) -> Result<usize, String> {
    let d = rational_blowdown_diagram(t).map_err(|e| format!("{t}: {e}"))?;
    let mut count = 0;
    for s in Slot::ALL {
        let (out, next) = mutate_diagram(t, s).map_err(|e| format!("{t} slot {s}: {e}"))?;
        ensure(next == t.mutate(s).sorted(), t, "mutated provenance")?;
        ensure(out.polygon.area() == d.polygon.area(), t, "mutation preserves area")?;
        for side in [Side::Left, Side::Right] {
            let there = transfer_cut(&d, s.index(), side).map_err(|e| format!("{t} slot {s}: {e}"))?;
            ensure(there.polygon.area() == d.polygon.area(), t, "transfer preserves area")?;
            ensure(there.cut_lines_meet_fiber(), t, "transfer keeps the fiber on every cut line")?;
            let back = transfer_cut(&there, s.index(), side.opposite())
                .map_err(|e| format!("{t} slot {s}: {e}"))?;
            ensure(back == d, t, "opposite transfers cancel")?;
        }
        count += 1;
    }
    Ok(count)
}

pub fn check_hull(t: &MarkovTriple) -> Result<usize, String> {
    let h = boundary_hull(t).map_err(|e| format!("{t}: {e}"))?;
    let lengths = edge_affine_lengths(&h).map_err(|e| format!("{t}: {e}"))?;
    ensure(&lengths == t.sorted().entries(), t, "edge lengths {a,b,c}")?;
    let [a, b, c] = t.entries();
    ensure(
        h.hull.area() == BigRational::new(BigInt::from(3) * a * b * c, 2.into()),
        t,
        "hull area 3abc/2",
    )?;
    ensure(normal_form(&normal_form(&h.hull)) == normal_form(&h.hull), t, "normal form idempotent")?;
    Ok(1)
}

fn run_suite(name: &str, check: Check, triples: &[MarkovTriple]) -> SuiteResult {
    let results: Vec<Result<usize, String>> = triples.par_iter().map(check).collect();
    let mut checked = 0;
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(n) => checked += n,
            Err(e) => failures.push(e),
        }
    }
    SuiteResult {
        name: name.into(),
        checked,
        failures,
    }
}

/// Hulls of distinct triples are pairwise inequivalent.
fn run_distinctness(triples: &[MarkovTriple]) -> SuiteResult {
    let hulls: Vec<_> = triples.par_iter().map(|t| boundary_hull(t).ok()).collect();
    let n = hulls.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let failures: Vec<String> = pairs
        .par_iter()
        .filter_map(|&(i, j)| match (&hulls[i], &hulls[j]) {
            (Some(p), Some(q)) if distinguish_hulls(&p.hull, &q.hull).distinct => None,
            _ => Some(format!("{} and {} not distinguished", triples[i], triples[j])),
        })
        .collect();
    SuiteResult {
        name: "distinct".into(),
        checked: pairs.len(),
        failures,
    }
}

/// Runs every suite over `enumerate(max_entry)` on a pool of `workers`
/// threads. The report lists suites and failures in a fixed order.
pub fn verify_all(max_entry: &BigInt, workers: usize) -> Report {
    let triples = enumerate(max_entry);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| {
        let mut suites: Vec<SuiteResult> = SUITES
            .iter()
            .map(|(name, check)| run_suite(name, *check, &triples))
            .collect();
        suites.push(run_distinctness(&triples));
        Report {
            max_entry: max_entry.clone(),
            triples: triples.len(),
            suites,
        }
    })
}
