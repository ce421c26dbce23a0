//! Undirected graphs with dense bit-row adjacency, an exact maximum
//! independent set search, and the minimum-degree greedy heuristic.

use alloc::vec;
use alloc::vec::Vec;

use crate::bits::Bits;

/// Read-only adjacency view shared by dense graphs and implicit Cayley graphs.
pub trait Graph {
    fn order(&self) -> usize;
    fn for_each_neighbor<F: FnMut(usize)>(&self, v: usize, f: F);
    fn degree(&self, v: usize) -> usize {
        let mut d = 0;
        self.for_each_neighbor(v, |_| d += 1);
        d
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitGraph {
    rows: Vec<Bits>,
}

impl BitGraph {
    pub fn new(n: usize) -> Self {
        Self {
            rows: vec![Bits::new(n); n],
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Adds `{u, v}`; loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.rows[u].set(v);
            self.rows[v].set(u);
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.rows[u].clear(v);
        self.rows[v].clear(u);
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].get(v)
    }

    #[inline]
    pub fn row(&self, v: usize) -> &Bits {
        &self.rows[v]
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Bits::count).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, r)| r.iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Subgraph induced on `vertices`, relabelled `0..vertices.len()` in the
    /// given order.
    pub fn induced(&self, vertices: &[usize]) -> BitGraph {
        let mut g = BitGraph::new(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !self.has_edge(u, v)))
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    /// Connected components as ascending vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut unseen = Bits::full(n);
        let mut out = Vec::new();
        while let Some(start) = unseen.first() {
            let mut comp = Bits::new(n);
            let mut frontier = Bits::new(n);
            frontier.set(start);
            unseen.clear(start);
            comp.set(start);
            while !frontier.is_empty() {
                let mut next = Bits::new(n);
                for v in frontier.iter() {
                    next.or_assign(&self.rows[v]);
                }
                next.and_assign(&unseen);
                unseen.and_not_assign(&next);
                comp.or_assign(&next);
                frontier = next;
            }
            out.push(comp.iter().collect());
        }
        out
    }
}

impl Graph for BitGraph {
    fn order(&self) -> usize {
        self.len()
    }

    fn for_each_neighbor<F: FnMut(usize)>(&self, v: usize, mut f: F) {
        for u in self.rows[v].iter() {
            f(u);
        }
    }

    fn degree(&self, v: usize) -> usize {
        self.rows[v].count()
    }
}

/// Result of a maximum independent set search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MisOutcome {
    /// Best independent set found, ascending.
    pub set: Vec<usize>,
    /// Certified upper bound on the independence number.
    pub upper: usize,
    /// `true` when the search completed, so `set.len() == upper`.
    pub exact: bool,
    /// Branch nodes expanded.
    pub nodes: u64,
}

/// Exact maximum independent set by branch and bound.
///
/// Components are solved separately. Within a component the search peels
/// vertices of degree ≤ 1 (some maximum independent set contains them),
/// bounds with a greedy clique cover (every clique holds at most one chosen
/// vertex) and branches in reverse cover order. When more than `node_budget`
/// nodes are expanded the best set so far is returned with the root bound.
pub fn maximum_independent_set(g: &BitGraph, node_budget: u64) -> MisOutcome {
    let mut set = Vec::new();
    let mut upper = 0;
    let mut exact = true;
    let mut nodes = 0;
    for comp in g.components() {
        let sub = g.induced(&comp);
        let mut solver = MisSolver::new(&sub, node_budget.saturating_sub(nodes));
        let (best, comp_upper, done) = solver.run();
        nodes += solver.nodes;
        exact &= done;
        upper += comp_upper;
        set.extend(best.into_iter().map(|i| comp[i]));
    }
    set.sort_unstable();
    MisOutcome {
        set,
        upper,
        exact,
        nodes,
    }
}

struct MisSolver<'a> {
    g: &'a BitGraph,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a> MisSolver<'a> {
    fn new(g: &'a BitGraph, budget: u64) -> Self {
        Self {
            g,
            best: Vec::new(),
            nodes: 0,
            budget,
            exhausted: false,
        }
    }

    fn run(&mut self) -> (Vec<usize>, usize, bool) {
        let n = self.g.len();
        let all = Bits::full(n);
        self.best = greedy_independent(self.g);
        let (_, root_cover) = self.clique_cover(&all);
        let mut current = Vec::new();
        self.expand(&mut current, all);
        let upper = if self.exhausted {
            root_cover.max(self.best.len())
        } else {
            self.best.len()
        };
        (core::mem::take(&mut self.best), upper, !self.exhausted)
    }

    /// Greedy clique partition of `p` in vertex order. Returns the vertices
    /// with their 1-based class numbers (non-decreasing) and the class count.
    fn clique_cover(&self, p: &Bits) -> (Vec<(usize, usize)>, usize) {
        let mut order = Vec::with_capacity(p.count());
        let mut uncovered = p.clone();
        let mut class = 0;
        while !uncovered.is_empty() {
            class += 1;
            let mut q = uncovered.clone();
            while let Some(v) = q.first() {
                q.clear(v);
                q.and_assign(self.g.row(v));
                uncovered.clear(v);
                order.push((v, class));
            }
        }
        (order, class)
    }

    fn expand(&mut self, current: &mut Vec<usize>, mut p: Bits) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let mark = current.len();
        // Degree ≤ 1 vertices belong to some maximum independent set.
        loop {
            let mut taken = false;
            let candidates: Vec<usize> = p.iter().collect();
            for v in candidates {
                if !p.get(v) {
                    continue;
                }
                if self.g.row(v).intersection_count(&p) <= 1 {
                    current.push(v);
                    p.clear(v);
                    p.and_not_assign(self.g.row(v));
                    taken = true;
                }
            }
            if !taken {
                break;
            }
        }
        if p.is_empty() {
            if current.len() > self.best.len() {
                self.best = current.clone();
            }
            current.truncate(mark);
            return;
        }
        let (order, _) = self.clique_cover(&p);
        for &(v, class) in order.iter().rev() {
            if current.len() + class <= self.best.len() {
                break;
            }
            let mut next = p.clone();
            next.clear(v);
            next.and_not_assign(self.g.row(v));
            current.push(v);
            if next.is_empty() {
                if current.len() > self.best.len() {
                    self.best = current.clone();
                }
            } else {
                self.expand(current, next);
            }
            current.pop();
            p.clear(v);
            if self.exhausted {
                break;
            }
        }
        current.truncate(mark);
    }
}

/// Minimum-degree greedy independent set: repeatedly take a vertex of
/// minimum remaining degree and delete its closed neighbourhood.
///
/// The output size is at least `∑_v 1/(deg(v)+1)` (Caro–Wei). Runs in
/// `O(n + m)` using bucketed degree lists.
pub fn greedy_independent<G: Graph>(g: &G) -> Vec<usize> {
    const NONE: usize = usize::MAX;
    let n = g.order();
    if n == 0 {
        return Vec::new();
    }
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut head = vec![NONE; max_deg + 1];
    let mut next = vec![NONE; n];
    let mut prev = vec![NONE; n];
    // Insert in descending label order so bucket heads are smallest labels.
    for v in (0..n).rev() {
        let d = deg[v];
        next[v] = head[d];
        if head[d] != NONE {
            prev[head[d]] = v;
        }
        head[d] = v;
    }
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut min_bucket = 0;
    let mut chosen = Vec::new();

    fn unlink(v: usize, d: usize, head: &mut [usize], next: &mut [usize], prev: &mut [usize]) {
        const NONE: usize = usize::MAX;
        if prev[v] != NONE {
            next[prev[v]] = next[v];
        } else {
            head[d] = next[v];
        }
        if next[v] != NONE {
            prev[next[v]] = prev[v];
        }
        next[v] = NONE;
        prev[v] = NONE;
    }

    let mut doomed = Vec::new();
    while remaining > 0 {
        while head[min_bucket] == NONE {
            min_bucket += 1;
        }
        let v = head[min_bucket];
        chosen.push(v);
        doomed.clear();
        doomed.push(v);
        g.for_each_neighbor(v, |u| {
            if alive[u] {
                doomed.push(u);
            }
        });
        for &u in &doomed {
            if alive[u] {
                alive[u] = false;
                unlink(u, deg[u], &mut head, &mut next, &mut prev);
                remaining -= 1;
            }
        }
        for &u in &doomed {
            g.for_each_neighbor(u, |w| {
                if alive[w] {
                    let d = deg[w];
                    unlink(w, d, &mut head, &mut next, &mut prev);
                    deg[w] = d - 1;
                    next[w] = head[d - 1];
                    if head[d - 1] != NONE {
                        prev[head[d - 1]] = w;
                    }
                    head[d - 1] = w;
                    if d - 1 < min_bucket {
                        min_bucket = d - 1;
                    }
                }
            });
        }
    }
    chosen.sort_unstable();
    chosen
}

/// `∑_v 1/(deg(v)+1)`, the Caro–Wei lower bound on α.
pub fn caro_wei_bound<G: Graph>(g: &G) -> f64 {
    (0..g.order())
        .map(|v| 1.0 / (g.degree(v) as f64 + 1.0))
        .sum()
}

/// Simple digraph without loops; independence refers to the underlying
/// undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<Bits>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Self {
            out: vec![Bits::new(n); n],
        }
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    /// Adds `u → v`; loops are ignored.
    pub fn add_arc(&mut self, u: usize, v: usize) {
        if u != v {
            self.out[u].set(v);
        }
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u].get(v)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |v| (u, v)))
    }

    pub fn max_out_degree(&self) -> usize {
        self.out.iter().map(Bits::count).max().unwrap_or(0)
    }

    pub fn max_in_degree(&self) -> usize {
        let mut indeg = vec![0usize; self.len()];
        for (_, v) in self.arcs() {
            indeg[v] += 1;
        }
        indeg.into_iter().max().unwrap_or(0)
    }

    /// Arcs of `self` not in `other`.
    pub fn minus(&self, other: &Digraph) -> Digraph {
        let mut out = self.out.clone();
        for (row, o) in out.iter_mut().zip(&other.out) {
            row.and_not_assign(o);
        }
        Digraph { out }
    }

    pub fn underlying(&self) -> BitGraph {
        BitGraph::from_edges(self.len(), self.arcs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> BitGraph {
        BitGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    fn brute_alpha(g: &BitGraph) -> usize {
        let n = g.len();
        let mut best = 0;
        for mask in 0u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if set.len() > best && g.is_independent(&set) {
                best = set.len();
            }
        }
        best
    }

    #[test]
    fn cycles_and_paths() {
        for n in 3..40 {
            let out = maximum_independent_set(&cycle(n), u64::MAX);
            assert!(out.exact);
            assert_eq!(out.set.len(), n / 2, "C_{n}");
            assert!(cycle(n).is_independent(&out.set));
        }
        let path = BitGraph::from_edges(12, (0..11).map(|i| (i, i + 1)));
        assert_eq!(maximum_independent_set(&path, u64::MAX).set.len(), 6);
    }

    #[test]
    fn complete_and_empty() {
        let mut k5 = BitGraph::new(5);
        for u in 0..5 {
            for v in u + 1..5 {
                k5.add_edge(u, v);
            }
        }
        assert_eq!(maximum_independent_set(&k5, u64::MAX).set.len(), 1);
        assert_eq!(greedy_independent(&k5).len(), 1);
        let empty = BitGraph::new(7);
        assert_eq!(maximum_independent_set(&empty, u64::MAX).set.len(), 7);
    }

    #[test]
    fn petersen_alpha_is_four() {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let g = BitGraph::from_edges(10, outer.chain(spokes).chain(inner));
        assert_eq!(maximum_independent_set(&g, u64::MAX).set.len(), 4);
        assert_eq!(brute_alpha(&g), 4);
    }

    #[test]
    fn budget_exhaustion_keeps_certified_interval() {
        // Random-ish graph; a budget of one node stops at the root.
        let mut g = BitGraph::new(40);
        let mut x: u64 = 12345;
        for u in 0..40 {
            for v in u + 1..40 {
                x = x
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                if x >> 61 < 3 {
                    g.add_edge(u, v);
                }
            }
        }
        let full = maximum_independent_set(&g, u64::MAX);
        let cut = maximum_independent_set(&g, 1);
        assert!(full.exact);
        assert!(cut.set.len() <= full.set.len());
        assert!(cut.upper >= full.set.len());
        assert!(g.is_independent(&cut.set));
    }

    #[test]
    fn greedy_meets_caro_wei() {
        let g = cycle(7);
        let s = greedy_independent(&g);
        assert!(s.len() >= 3);
        assert!(s.len() as f64 >= caro_wei_bound(&g) - 1e-9);
        assert!(g.is_independent(&s));
    }
}
