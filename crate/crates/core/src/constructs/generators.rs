//! Small simple graphs used as input to the lower-bound constructions, and
//! randomized generators for triangle-free and high-girth graphs.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{maximum_independent_set, BitGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparseGraphError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop at vertex {0}")]
    Loop(usize),
}

/// Simple undirected graph on `0..n` stored as a sorted edge list `(u, v)`
/// with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl SparseGraph {
    /// Duplicate edges collapse; loops are rejected.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, SparseGraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(SparseGraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(SparseGraphError::Loop(u));
            }
            out.push((u.min(v), u.max(v)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self { n, edges: out })
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn to_bitgraph(&self) -> BitGraph {
        BitGraph::from_edges(self.n, self.edges.iter().copied())
    }

    /// Some triangle `(a, b, c)` with `a < b < c`, found by scanning all
    /// edges against common neighbours.
    pub fn find_triangle(&self) -> Option<(usize, usize, usize)> {
        let g = self.to_bitgraph();
        self.edges.iter().find_map(|&(u, v)| {
            let mut common = g.row(u).clone();
            common.and_assign(g.row(v));
            let w = common.iter().next()?;
            let mut t = [u, v, w];
            t.sort_unstable();
            Some((t[0], t[1], t[2]))
        })
    }

    /// Length of a shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let adj = self.adjacency();
        let mut best: Option<usize> = None;
        for s in 0..self.n {
            let mut dist = vec![usize::MAX; self.n];
            let mut parent = vec![usize::MAX; self.n];
            let mut queue = VecDeque::new();
            dist[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if parent[u] != w {
                        let len = dist[u] + dist[w] + 1;
                        if best.is_none_or(|b| len < b) {
                            best = Some(len);
                        }
                    }
                }
            }
        }
        best
    }

    /// Shortest-path distance from `u` to `v`, searching no deeper than
    /// `limit`.
    fn distance_within(adj: &[Vec<usize>], u: usize, v: usize, limit: usize) -> Option<usize> {
        if u == v {
            return Some(0);
        }
        let mut dist = vec![usize::MAX; adj.len()];
        let mut queue = VecDeque::new();
        dist[u] = 0;
        queue.push_back(u);
        while let Some(x) = queue.pop_front() {
            if dist[x] >= limit {
                continue;
            }
            for &w in &adj[x] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[x] + 1;
                    if w == v {
                        return Some(dist[w]);
                    }
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// A generated graph with its independence number, exact when the search
/// finished and otherwise a certified interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedGraph {
    pub graph: SparseGraph,
    pub alpha_lower: usize,
    pub alpha_upper: usize,
    pub attempts: usize,
}

impl GeneratedGraph {
    pub fn alpha(&self) -> Option<usize> {
        (self.alpha_lower == self.alpha_upper).then_some(self.alpha_lower)
    }
}

/// Node budget for measuring α of each generated graph.
pub const GENERATOR_ALPHA_NODES: u64 = 2_000_000;

fn random_maximal<F>(n: usize, rng: &mut ChaCha8Rng, mut admissible: F) -> SparseGraph
where
    F: FnMut(&[Vec<usize>], usize, usize) -> bool,
{
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    pairs.shuffle(rng);
    let mut adj = vec![Vec::new(); n];
    let mut edges = Vec::new();
    for (u, v) in pairs {
        if admissible(&adj, u, v) {
            adj[u].push(v);
            adj[v].push(u);
            edges.push((u, v));
        }
    }
    SparseGraph::new(n, edges).expect("generated edges are valid")
}

fn best_of<F>(target_n: usize, attempts: usize, seed: u64, mut build: F) -> GeneratedGraph
where
    F: FnMut(&mut ChaCha8Rng) -> SparseGraph,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<GeneratedGraph> = None;
    for _ in 0..attempts.max(1) {
        let g = build(&mut rng);
        let mis = maximum_independent_set(&g.to_bitgraph(), GENERATOR_ALPHA_NODES);
        let candidate = GeneratedGraph {
            graph: g,
            alpha_lower: mis.set.len(),
            alpha_upper: mis.upper,
            attempts: attempts.max(1),
        };
        let better = match &best {
            None => true,
            Some(b) => {
                (candidate.alpha_upper, candidate.alpha_lower) < (b.alpha_upper, b.alpha_lower)
            }
        };
        if better {
            best = Some(candidate);
        }
    }
    let out = best.expect("at least one attempt");
    debug_assert_eq!(out.graph.order(), target_n);
    out
}

/// Triangle-free process: insert edges in random order, skipping any that
/// would close a triangle; keep the attempt with the smallest α.
pub fn gen_triangle_free(target_n: usize, attempts: usize, seed: u64) -> GeneratedGraph {
    let out = best_of(target_n, attempts, seed, |rng| {
        random_maximal(target_n, rng, |adj, u, v| {
            !adj[u].iter().any(|w| adj[v].contains(w))
        })
    });
    debug_assert!(out.graph.find_triangle().is_none());
    out
}

/// Random insertion keeping every cycle longer than `girth - 1`: an edge is
/// added only if its endpoints are at distance at least `girth - 1`.
pub fn gen_high_girth(target_n: usize, girth: usize, attempts: usize, seed: u64) -> GeneratedGraph {
    assert!(girth >= 3, "girth must be at least 3");
    let out = best_of(target_n, attempts, seed, |rng| {
        random_maximal(target_n, rng, |adj, u, v| {
            SparseGraph::distance_within(adj, u, v, girth - 2).is_none()
        })
    });
    debug_assert!(out.graph.girth().is_none_or(|g| g >= girth));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_properties() {
        let c5 = SparseGraph::cycle(5);
        assert_eq!(c5.girth(), Some(5));
        assert!(c5.find_triangle().is_none());
        assert_eq!(SparseGraph::cycle(3).find_triangle(), Some((0, 1, 2)));
        assert_eq!(SparseGraph::path(6).girth(), None);
        assert_eq!(SparseGraph::cycle(8).girth(), Some(8));
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            SparseGraph::new(3, [(1, 1)]),
            Err(SparseGraphError::Loop(1))
        );
        assert!(SparseGraph::new(3, [(0, 3)]).is_err());
    }

    #[test]
    fn triangle_free_small() {
        let g = gen_triangle_free(5, 20, 1);
        assert!(g.graph.find_triangle().is_none());
        assert_eq!(g.alpha(), Some(2));
        let g = gen_triangle_free(10, 50, 7);
        assert!(g.graph.find_triangle().is_none());
        assert!(g.alpha().unwrap() <= 4);
    }

    #[test]
    fn high_girth_small() {
        let g = gen_high_girth(10, 5, 50, 3);
        assert!(g.graph.girth().is_none_or(|x| x >= 5));
        assert!(g.alpha().unwrap() <= 5);
        let g = gen_high_girth(12, 4, 10, 3);
        assert!(g.graph.find_triangle().is_none());
    }
}
