//! Cayley digraphs `Cay(A)` on the additive group of a prime field and their
//! underlying circulant graphs.
//!
//! The arc `u → v` is present iff `v - u ∈ A`. Independence and clique
//! numbers always refer to the underlying undirected graph, whose connection
//! set is `A ∪ (-A)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use thiserror::Error;

use crate::bits::Bits;
use crate::field::PrimeField;
use crate::graph::{self, BitGraph, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CayleyError {
    #[error("generator set contains 0")]
    ZeroGenerator,
    #[error("generator set is empty")]
    EmptyGenerators,
    #[error("generator {value} is not a residue modulo {p}")]
    GeneratorOutOfRange { value: u64, p: u64 },
    #[error("{u} and {v} are not adjacent, so the seed is not a clique")]
    NotAClique { u: u64, v: u64 },
    #[error("interval [{lo}, {hi}] is not inside 0..{p}")]
    BadInterval { lo: u64, hi: u64, p: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyGraph {
    field: PrimeField,
    gens: Vec<u64>,
    connection: Vec<u64>,
    connection_bits: Bits,
}

/// Builds `Cay(A)`; generators must be nonzero residues.
pub fn build_cayley(field: PrimeField, gens: &[u64]) -> Result<CayleyGraph, CayleyError> {
    let p = field.p();
    if gens.is_empty() {
        return Err(CayleyError::EmptyGenerators);
    }
    let mut sorted = Vec::with_capacity(gens.len());
    for &g in gens {
        if g == 0 {
            return Err(CayleyError::ZeroGenerator);
        }
        if g >= p {
            return Err(CayleyError::GeneratorOutOfRange { value: g, p });
        }
        sorted.push(g);
    }
    sorted.sort_unstable();
    sorted.dedup();
    let mut connection_bits = Bits::new(p as usize);
    for &g in &sorted {
        connection_bits.set(g as usize);
        connection_bits.set((p - g) as usize);
    }
    let connection = connection_bits.iter().map(|v| v as u64).collect();
    Ok(CayleyGraph {
        field,
        gens: sorted,
        connection,
        connection_bits,
    })
}

impl CayleyGraph {
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    /// The generator set `A`, ascending.
    pub fn gens(&self) -> &[u64] {
        &self.gens
    }

    /// The undirected connection set `A ∪ (-A)`, ascending.
    pub fn connection_set(&self) -> &[u64] {
        &self.connection
    }

    /// Degree of every vertex in the underlying graph.
    pub fn undirected_degree(&self) -> usize {
        self.connection.len()
    }

    pub fn has_arc(&self, u: u64, v: u64) -> bool {
        let d = self.field.sub(v, u);
        self.gens.binary_search(&d).is_ok()
    }

    #[inline]
    pub fn adjacent(&self, u: u64, v: u64) -> bool {
        self.connection_bits.get(self.field.sub(v, u) as usize)
    }

    pub fn out_neighbors(&self, u: u64) -> impl Iterator<Item = u64> + '_ {
        self.gens.iter().map(move |&a| self.field.add(u, a))
    }

    pub fn in_neighbors(&self, v: u64) -> impl Iterator<Item = u64> + '_ {
        self.gens.iter().map(move |&a| self.field.sub(v, a))
    }

    /// `Cay(c·A)`; isomorphic to `self` through `x ↦ c·x`.
    pub fn dilate(&self, c: u64) -> Result<CayleyGraph, CayleyError> {
        let gens: Vec<u64> = self.gens.iter().map(|&a| self.field.mul(c, a)).collect();
        build_cayley(self.field, &gens)
    }

    /// Dense underlying graph on all `p` vertices.
    pub fn to_bitgraph(&self) -> BitGraph {
        self.induced_on(&(0..self.p()).collect::<Vec<_>>())
    }

    /// Underlying graph induced on `vertices` (relabelled in order).
    pub fn induced_on(&self, vertices: &[u64]) -> BitGraph {
        let mut g = BitGraph::new(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.adjacent(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn is_independent(&self, set: &[u64]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !self.adjacent(u, v)))
    }
}

impl Graph for CayleyGraph {
    fn order(&self) -> usize {
        self.p() as usize
    }

    fn for_each_neighbor<F: FnMut(usize)>(&self, v: usize, mut f: F) {
        let v = v as u64;
        for &s in &self.connection {
            f(self.field.add(v, s) as usize);
        }
    }

    fn degree(&self, _v: usize) -> usize {
        self.connection.len()
    }
}

/// Which argument produced a reported α value or bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlphaMethod {
    /// Branch and bound ran to completion.
    Exact,
    /// Spectral ratio bound.
    Ratio,
    /// `α ≤ p/ω` from a verified clique.
    Clique,
    /// Root bound of an interrupted branch and bound.
    Search,
    /// Bound inherited from a supergraph or a trivial count.
    Inherited,
}

impl fmt::Display for AlphaMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlphaMethod::Exact => "exact",
            AlphaMethod::Ratio => "ratio",
            AlphaMethod::Clique => "clique",
            AlphaMethod::Search => "search",
            AlphaMethod::Inherited => "inherited",
        })
    }
}

/// Exact α or a certified interval `[lower, upper]`. `witness` is an
/// independent set of size `lower`, and `method` names the source of `upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaResult {
    pub lower: u64,
    pub upper: u64,
    pub method: AlphaMethod,
    pub witness: Vec<u64>,
}

impl AlphaResult {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// The exact value, if known.
    pub fn value(&self) -> Option<u64> {
        self.is_exact().then_some(self.lower)
    }

    fn tighten_upper(&mut self, bound: u64, method: AlphaMethod) {
        if bound < self.upper {
            self.upper = bound;
            self.method = method;
        }
        if self.lower == self.upper {
            self.method = if self.method == AlphaMethod::Search {
                AlphaMethod::Exact
            } else {
                self.method
            };
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphaError {
    #[error("search budget exhausted; alpha in [{}, {}]", .0.lower, .0.upper)]
    BudgetExhausted(AlphaResult),
}

/// Limits for exact independence-number searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaBudget {
    /// Graphs with more vertices are not searched exactly.
    pub max_vertices: usize,
    /// Branch-and-bound nodes allowed.
    pub max_nodes: u64,
}

impl Default for AlphaBudget {
    fn default() -> Self {
        Self {
            max_vertices: 2000,
            max_nodes: 5_000_000,
        }
    }
}

impl AlphaBudget {
    pub const UNLIMITED: AlphaBudget = AlphaBudget {
        max_vertices: usize::MAX,
        max_nodes: u64::MAX,
    };
}

/// Exact α of the underlying graph by branch and bound.
///
/// The graph is vertex-transitive, so some maximum independent set contains
/// 0 and `α = 1 + α(G[V ∖ N[0]])`; only that subgraph is searched. When the
/// budget runs out the error carries the best certified interval, tightened
/// with the ratio and clique bounds.
pub fn alpha_exact(g: &CayleyGraph, budget: AlphaBudget) -> Result<AlphaResult, AlphaError> {
    let p = g.p();
    if p as usize > budget.max_vertices {
        return Err(AlphaError::BudgetExhausted(alpha_bounds(g)));
    }
    let rest: Vec<u64> = (1..p).filter(|&v| !g.adjacent(0, v)).collect();
    let sub = g.induced_on(&rest);
    let out = graph::maximum_independent_set(&sub, budget.max_nodes);
    let mut witness: Vec<u64> = Vec::with_capacity(out.set.len() + 1);
    witness.push(0);
    witness.extend(out.set.iter().map(|&i| rest[i]));
    debug_assert!(g.is_independent(&witness));
    let lower = witness.len() as u64;
    if out.exact {
        return Ok(AlphaResult {
            lower,
            upper: lower,
            method: AlphaMethod::Exact,
            witness,
        });
    }
    let mut res = AlphaResult {
        lower,
        upper: out.upper as u64 + 1,
        method: AlphaMethod::Search,
        witness,
    };
    let ratio = alpha_upper_ratio(g);
    res.tighten_upper(ratio.certified, AlphaMethod::Ratio);
    let clique = clique_lower(g, None).expect("unseeded clique search cannot fail");
    res.tighten_upper(clique.alpha_upper, AlphaMethod::Clique);
    if res.is_exact() {
        Ok(res)
    } else {
        Err(AlphaError::BudgetExhausted(res))
    }
}

/// Certified interval without any exponential search: greedy below,
/// `min(ratio bound, p/ω)` above.
pub fn alpha_bounds(g: &CayleyGraph) -> AlphaResult {
    let witness: Vec<u64> = greedy_independent(g)
        .into_iter()
        .map(|v| v as u64)
        .collect();
    let lower = witness.len() as u64;
    let mut res = AlphaResult {
        lower,
        upper: g.p(),
        method: AlphaMethod::Inherited,
        witness,
    };
    let ratio = alpha_upper_ratio(g);
    res.tighten_upper(ratio.certified, AlphaMethod::Ratio);
    let clique = clique_lower(g, None).expect("unseeded clique search cannot fail");
    res.tighten_upper(clique.alpha_upper, AlphaMethod::Clique);
    res
}

/// Exact α when within budget, else the certified interval.
pub fn alpha_certified(g: &CayleyGraph, budget: AlphaBudget) -> AlphaResult {
    match alpha_exact(g, budget) {
        Ok(r) => r,
        Err(AlphaError::BudgetExhausted(r)) => r,
    }
}

/// Ratio (Hoffman) bound for the regular underlying graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBound {
    /// Smallest circulant eigenvalue `min_j ∑_{s∈A∪-A} cos(2πjs/p)`.
    pub lambda_min: f64,
    /// `p·(-λ_min)/(d - λ_min)` as computed.
    pub raw: f64,
    /// `raw + 10⁻⁶·p`; never below the true bound.
    pub padded: f64,
    /// `⌊padded⌋` capped at `p`; an upper bound on α.
    pub certified: u64,
}

/// `α ≤ p·(-λ_min)/(d - λ_min)` with `d = |A ∪ -A|` and `λ_min` the least
/// eigenvalue of the circulant adjacency matrix.
pub fn alpha_upper_ratio(g: &CayleyGraph) -> RatioBound {
    let p = g.p();
    let d = g.undirected_degree() as f64;
    let table: Vec<f64> = (0..p)
        .map(|m| libm::cos(2.0 * PI * m as f64 / p as f64))
        .collect();
    let mut lambda_min = d;
    // λ_j = λ_{p-j}, so half the spectrum suffices.
    for j in 1..=((p - 1) / 2).max(1) {
        let lambda: f64 = g
            .connection_set()
            .iter()
            .map(|&s| table[((j as u128 * s as u128) % p as u128) as usize])
            .sum();
        if lambda < lambda_min {
            lambda_min = lambda;
        }
    }
    let raw = if d - lambda_min <= 0.0 {
        p as f64
    } else {
        p as f64 * (-lambda_min) / (d - lambda_min)
    };
    let padded = raw + 1e-6 * p as f64;
    let certified = (libm::floor(padded) as u64).min(p);
    RatioBound {
        lambda_min,
        raw,
        padded,
        certified,
    }
}

/// A verified clique of the underlying graph and the vertex-transitive
/// bound `α ≤ ⌊p/ω⌋` it implies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clique {
    pub members: Vec<u64>,
    pub alpha_upper: u64,
}

/// Greedy clique search. With a seed, checks that it is a clique and extends
/// it by the smallest common neighbours; without one, grows a clique from
/// `{0, s}` for every connection element `s` and keeps the largest.
pub fn clique_lower(g: &CayleyGraph, seed: Option<&[u64]>) -> Result<Clique, CayleyError> {
    let p = g.p();
    let members = match seed {
        Some(seed) => {
            let mut members: Vec<u64> = seed.iter().map(|&v| v % p).collect();
            members.sort_unstable();
            members.dedup();
            for (i, &u) in members.iter().enumerate() {
                for &v in &members[i + 1..] {
                    if !g.adjacent(u, v) {
                        return Err(CayleyError::NotAClique { u, v });
                    }
                }
            }
            if members.is_empty() {
                members.push(0);
            }
            let candidates: Vec<u64> = (0..p)
                .filter(|&x| members.iter().all(|&m| m != x && g.adjacent(m, x)))
                .collect();
            extend_clique(g, members, candidates)
        }
        None => {
            let mut best = vec![0];
            for &s in g.connection_set() {
                let candidates: Vec<u64> = g
                    .connection_set()
                    .iter()
                    .copied()
                    .filter(|&x| x != s && g.adjacent(s, x))
                    .collect();
                if candidates.len() + 2 <= best.len() {
                    continue;
                }
                let c = extend_clique(g, vec![0, s], candidates);
                if c.len() > best.len() {
                    best = c;
                }
            }
            best
        }
    };
    let alpha_upper = p / members.len() as u64;
    Ok(Clique {
        members,
        alpha_upper,
    })
}

fn extend_clique(g: &CayleyGraph, mut members: Vec<u64>, mut candidates: Vec<u64>) -> Vec<u64> {
    while let Some(&x) = candidates.first() {
        members.push(x);
        candidates.retain(|&y| y != x && g.adjacent(x, y));
    }
    members.sort_unstable();
    members
}

/// Minimum-degree greedy independent set of any graph view; for a Cayley
/// graph the indices are residues.
pub fn greedy_independent<G: Graph>(g: &G) -> Vec<usize> {
    let set = graph::greedy_independent(g);
    debug_assert!(set.len() as f64 + 1e-9 >= graph::caro_wei_bound(g));
    set
}

/// Subgraph of the underlying graph induced on the residues `lo..=hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalGraph {
    pub lo: u64,
    pub hi: u64,
    pub graph: BitGraph,
}

impl IntervalGraph {
    pub fn residue(&self, index: usize) -> u64 {
        self.lo + index as u64
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }
}

pub fn induce_interval(g: &CayleyGraph, lo: u64, hi: u64) -> Result<IntervalGraph, CayleyError> {
    let p = g.p();
    if lo > hi || hi >= p {
        return Err(CayleyError::BadInterval { lo, hi, p });
    }
    let vertices: Vec<u64> = (lo..=hi).collect();
    Ok(IntervalGraph {
        lo,
        hi,
        graph: g.induced_on(&vertices),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cay(p: u64, gens: &[u64]) -> CayleyGraph {
        build_cayley(PrimeField::new(p).unwrap(), gens).unwrap()
    }

    #[test]
    fn build_examples() {
        let c7 = cay(7, &[1]);
        let g = c7.to_bitgraph();
        assert_eq!(g.edge_count(), 7);
        assert!((0..7).all(|v| g.degree(v) == 2));

        let k5 = cay(5, &[1, 2]);
        assert_eq!(k5.to_bitgraph().edge_count(), 10);

        let g = cay(13, &[1, 5]);
        assert_eq!(g.out_neighbors(0).collect::<Vec<_>>(), vec![1, 5]);
        assert_eq!(g.in_neighbors(0).collect::<Vec<_>>(), vec![12, 8]);
        assert!(g.has_arc(0, 5) && !g.has_arc(5, 0));
        assert!(g.adjacent(5, 0));
    }

    #[test]
    fn build_rejects_bad_generators() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(build_cayley(f, &[0, 1]), Err(CayleyError::ZeroGenerator));
        assert_eq!(build_cayley(f, &[]), Err(CayleyError::EmptyGenerators));
        assert!(matches!(
            build_cayley(f, &[7]),
            Err(CayleyError::GeneratorOutOfRange { .. })
        ));
    }

    #[test]
    fn alpha_examples() {
        let r = alpha_exact(&cay(7, &[1]), AlphaBudget::default()).unwrap();
        assert_eq!((r.lower, r.upper, r.method), (3, 3, AlphaMethod::Exact));
        assert_eq!(r.witness.len(), 3);
        let r = alpha_exact(&cay(5, &[1, 2]), AlphaBudget::default()).unwrap();
        assert_eq!(r.value(), Some(1));
    }

    #[test]
    fn ratio_examples() {
        let r = alpha_upper_ratio(&cay(7, &[1]));
        let lambda = 2.0 * libm::cos(6.0 * PI / 7.0);
        assert!((r.lambda_min - lambda).abs() < 1e-12);
        assert!((r.raw - 3.3177).abs() < 1e-3, "{}", r.raw);
        assert_eq!(r.certified, 3);
        let r = alpha_upper_ratio(&cay(5, &[1, 2]));
        assert!((r.raw - 1.0).abs() < 1e-9);
        assert_eq!(r.certified, 1);
    }

    #[test]
    fn clique_examples() {
        assert_eq!(
            clique_lower(&cay(5, &[1, 2]), None).unwrap().members.len(),
            5
        );
        let c = clique_lower(&cay(7, &[1]), None).unwrap();
        assert_eq!(c.members.len(), 2);
        assert_eq!(c.alpha_upper, 3);
        assert_eq!(
            clique_lower(&cay(7, &[1]), Some(&[0, 2])),
            Err(CayleyError::NotAClique { u: 0, v: 2 })
        );
    }

    #[test]
    fn greedy_examples() {
        assert!(greedy_independent(&cay(7, &[1])).len() >= 3);
        assert_eq!(greedy_independent(&cay(5, &[1, 2])).len(), 1);
    }

    #[test]
    fn interval_examples() {
        let g = cay(13, &[1, 5]);
        assert_eq!(induce_interval(&g, 4, 6).unwrap().len(), 3);
        let whole = induce_interval(&g, 0, 12).unwrap();
        assert_eq!(whole.graph, g.to_bitgraph());
        assert!(matches!(
            induce_interval(&g, 6, 4),
            Err(CayleyError::BadInterval { .. })
        ));
        assert!(matches!(
            induce_interval(&g, 0, 13),
            Err(CayleyError::BadInterval { .. })
        ));
        let path = induce_interval(&cay(101, &[1]), 33, 44).unwrap();
        assert_eq!(path.len(), 12);
        assert_eq!(path.graph.edge_count(), 11);
        let mis = graph::maximum_independent_set(&path.graph, u64::MAX);
        assert_eq!(mis.set.len(), 6);
    }

    #[test]
    fn dilation_preserves_alpha() {
        let g = cay(13, &[1, 5]);
        let a = alpha_exact(&g, AlphaBudget::default()).unwrap().lower;
        for c in 1..13 {
            let d = g.dilate(c).unwrap();
            assert_eq!(alpha_exact(&d, AlphaBudget::default()).unwrap().lower, a);
        }
    }
}
