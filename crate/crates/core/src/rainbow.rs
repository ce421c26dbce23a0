//! Restricted digraph systems and proper rainbow directed paths.
//!
//! A system is a list of properly arc-coloured digraphs `D_1, …, D_k` on a
//! common vertex set plus a map `f` giving each vertex a set of at most `ℓ`
//! forbidden colours, with the sets of distinct vertices disjoint. A proper
//! rainbow path `v_1 … v_{m+1}` takes its `i`-th step in `D_i`, uses
//! pairwise-distinct colours, and avoids `f(v_1) ∪ f(v_{m+1})`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::bits::Bits;
use crate::graph::BitGraph;

pub type Color = u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("vertex {vertex} has two {direction}-arcs of color {color}")]
    ImproperColoring {
        vertex: usize,
        color: Color,
        direction: &'static str,
    },
    #[error("digraph {index} has {found} vertices, expected {expected}")]
    VertexCountMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("vertex {vertex} has {size} forbidden colors, bound is {bound}")]
    ForbiddenTooLarge {
        vertex: usize,
        size: usize,
        bound: usize,
    },
    #[error("color {color} is forbidden at both {first} and {second}")]
    ForbiddenOverlap {
        color: Color,
        first: usize,
        second: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RainbowError {
    #[error("path length {requested} not in 1..={available}")]
    InvalidLength { requested: usize, available: usize },
    #[error("exhaustive search exceeded {0} nodes")]
    BudgetExceeded(u64),
}

/// Digraph whose arcs carry colours; every vertex has at most one out-arc
/// and at most one in-arc of each colour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredDigraph {
    /// Out-arcs `(target, color)` sorted ascending.
    out: Vec<Vec<(usize, Color)>>,
}

impl ColoredDigraph {
    pub fn new<I>(n: usize, arcs: I) -> Result<Self, SystemError>
    where
        I: IntoIterator<Item = (usize, usize, Color)>,
    {
        let mut out = vec![Vec::new(); n];
        for (u, v, c) in arcs {
            for w in [u, v] {
                if w >= n {
                    return Err(SystemError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(SystemError::Loop(u));
            }
            out[u].push((v, c));
        }
        for (v, arcs) in out.iter_mut().enumerate() {
            arcs.sort_unstable();
            arcs.dedup();
            let mut colors: Vec<Color> = arcs.iter().map(|&(_, c)| c).collect();
            if let Some(color) = first_repeat(&mut colors) {
                return Err(SystemError::ImproperColoring {
                    vertex: v,
                    color,
                    direction: "out",
                });
            }
        }
        let mut incoming: Vec<Vec<Color>> = vec![Vec::new(); n];
        for (u, arcs) in out.iter().enumerate() {
            for &(v, c) in arcs {
                debug_assert_ne!(u, v);
                incoming[v].push(c);
            }
        }
        for (v, colors) in incoming.iter_mut().enumerate() {
            if let Some(color) = first_repeat(colors) {
                return Err(SystemError::ImproperColoring {
                    vertex: v,
                    color,
                    direction: "in",
                });
            }
        }
        Ok(Self { out })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            out: vec![Vec::new(); n],
        }
    }

    pub fn order(&self) -> usize {
        self.out.len()
    }

    pub fn out_arcs(&self, v: usize) -> &[(usize, Color)] {
        &self.out[v]
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, Color)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, arcs)| arcs.iter().map(move |&(v, c)| (u, v, c)))
    }

    /// Colour of the arc `u → v`, if present (the smallest if several).
    pub fn color_of(&self, u: usize, v: usize) -> Option<Color> {
        let arcs = &self.out[u];
        let i = arcs.partition_point(|&(t, _)| t < v);
        arcs.get(i).filter(|&&(t, _)| t == v).map(|&(_, c)| c)
    }

    pub fn has_arc_colored(&self, u: usize, v: usize, color: Color) -> bool {
        self.out[u].binary_search(&(v, color)).is_ok()
    }

    pub fn underlying(&self) -> BitGraph {
        BitGraph::from_edges(self.order(), self.arcs().map(|(u, v, _)| (u, v)))
    }
}

fn first_repeat(colors: &mut [Color]) -> Option<Color> {
    colors.sort_unstable();
    colors.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
}

/// `(D_1, …, D_k; f)` with bound `ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedSystem {
    n: usize,
    digraphs: Vec<ColoredDigraph>,
    forbidden: Vec<Vec<Color>>,
    bound: usize,
    owner: BTreeMap<Color, usize>,
}

impl RestrictedSystem {
    /// `forbidden[v]` is `f(v)`; shorter vectors leave the remaining
    /// vertices with empty sets.
    pub fn new(
        n: usize,
        digraphs: Vec<ColoredDigraph>,
        mut forbidden: Vec<Vec<Color>>,
        bound: usize,
    ) -> Result<Self, SystemError> {
        for (index, d) in digraphs.iter().enumerate() {
            if d.order() != n {
                return Err(SystemError::VertexCountMismatch {
                    index,
                    found: d.order(),
                    expected: n,
                });
            }
        }
        if forbidden.len() > n {
            return Err(SystemError::VertexOutOfRange {
                vertex: forbidden.len() - 1,
                n,
            });
        }
        forbidden.resize(n, Vec::new());
        let mut owner = BTreeMap::new();
        for (v, colors) in forbidden.iter_mut().enumerate() {
            colors.sort_unstable();
            colors.dedup();
            if colors.len() > bound {
                return Err(SystemError::ForbiddenTooLarge {
                    vertex: v,
                    size: colors.len(),
                    bound,
                });
            }
            for &c in colors.iter() {
                if let Some(first) = owner.insert(c, v) {
                    return Err(SystemError::ForbiddenOverlap {
                        color: c,
                        first,
                        second: v,
                    });
                }
            }
        }
        Ok(Self {
            n,
            digraphs,
            forbidden,
            bound,
            owner,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn digraphs(&self) -> &[ColoredDigraph] {
        &self.digraphs
    }

    pub fn forbidden(&self, v: usize) -> &[Color] {
        &self.forbidden[v]
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// The vertex whose forbidden set contains `color`.
    pub fn owner_of(&self, color: Color) -> Option<usize> {
        self.owner.get(&color).copied()
    }

    fn is_forbidden_at(&self, v: usize, color: Color) -> bool {
        self.owner_of(color) == Some(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RainbowPath {
    pub vertices: Vec<usize>,
    /// `colors[i]` is the colour of step `i` in `D_{i+1}`.
    pub colors: Vec<Color>,
}

impl RainbowPath {
    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn first(&self) -> usize {
        self.vertices[0]
    }

    pub fn last(&self) -> usize {
        *self.vertices.last().expect("path has a vertex")
    }
}

impl fmt::Display for RainbowPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.vertices[0])?;
        for (v, c) in self.vertices[1..].iter().zip(&self.colors) {
            write!(f, " -[{c}]-> {v}")?;
        }
        Ok(())
    }
}

/// First property a path fails; steps are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Wrong number of vertices for the colours, or longer than the system.
    Length,
    VertexOutOfRange(usize),
    /// Step is not an arc of its digraph with the stated colour.
    A1 {
        step: usize,
    },
    RepeatedVertex(usize),
    /// Two steps share a colour.
    A2 {
        first: usize,
        second: usize,
    },
    /// A step colour is forbidden at an endpoint of the path.
    A3 {
        step: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Length => f.write_str("length"),
            Violation::VertexOutOfRange(v) => write!(f, "vertex {v} out of range"),
            Violation::A1 { step } => write!(f, "A1 at step {step}"),
            Violation::RepeatedVertex(v) => write!(f, "vertex {v} repeated"),
            Violation::A2 { first, second } => write!(f, "A2 at steps {first} and {second}"),
            Violation::A3 { step } => write!(f, "A3 at step {step}"),
        }
    }
}

pub fn verify_rainbow(sys: &RestrictedSystem, path: &RainbowPath) -> Result<(), Violation> {
    let m = path.colors.len();
    if m == 0 || path.vertices.len() != m + 1 || m > sys.digraphs.len() {
        return Err(Violation::Length);
    }
    if let Some(&v) = path.vertices.iter().find(|&&v| v >= sys.n) {
        return Err(Violation::VertexOutOfRange(v));
    }
    for i in 0..m {
        let (u, v) = (path.vertices[i], path.vertices[i + 1]);
        if !sys.digraphs[i].has_arc_colored(u, v, path.colors[i]) {
            return Err(Violation::A1 { step: i + 1 });
        }
    }
    for (i, &v) in path.vertices.iter().enumerate() {
        if path.vertices[..i].contains(&v) {
            return Err(Violation::RepeatedVertex(v));
        }
    }
    for j in 0..m {
        if let Some(i) = path.colors[..j].iter().position(|&c| c == path.colors[j]) {
            return Err(Violation::A2 {
                first: i + 1,
                second: j + 1,
            });
        }
    }
    let (s, t) = (path.first(), path.last());
    for (i, &c) in path.colors.iter().enumerate() {
        if sys.is_forbidden_at(s, c) || sys.is_forbidden_at(t, c) {
            return Err(Violation::A3 { step: i + 1 });
        }
    }
    Ok(())
}

fn check_length(sys: &RestrictedSystem, length: usize) -> Result<(), RainbowError> {
    if length == 0 || length > sys.digraphs.len() {
        return Err(RainbowError::InvalidLength {
            requested: length,
            available: sys.digraphs.len(),
        });
    }
    Ok(())
}

/// Frontier sizes of a greedy run: entry `r` counts the endpoints of the
/// length-`r` paths kept (entry 0 is every vertex).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GreedyTrace {
    pub frontier: Vec<usize>,
}

/// Level-by-level greedy construction following the inductive argument.
///
/// Level `r` keeps one witness path for every vertex reachable as the end
/// of a length-`r` proper rainbow path found so far. Extending by `D_{r+1}`
/// removes the arcs `v → u` whose colour lies in `f(u)` and processes
/// endpoints with more than `ℓ + 3r + 1` such surviving arcs into the current
/// frontier first, then the rest, each group by ascending label. An
/// extension must avoid the path's vertices, its colours, and `f(v_1)`, and
/// the new endpoint's forbidden set must miss every colour on the path.
pub fn find_rainbow_greedy(
    sys: &RestrictedSystem,
    length: usize,
) -> Result<Option<RainbowPath>, RainbowError> {
    find_rainbow_greedy_traced(sys, length).map(|(p, _)| p)
}

pub fn find_rainbow_greedy_traced(
    sys: &RestrictedSystem,
    length: usize,
) -> Result<(Option<RainbowPath>, GreedyTrace), RainbowError> {
    check_length(sys, length)?;
    let n = sys.n;
    let mut trace = GreedyTrace { frontier: vec![n] };
    let mut level: Vec<Option<RainbowPath>> = (0..n)
        .map(|v| {
            Some(RainbowPath {
                vertices: vec![v],
                colors: Vec::new(),
            })
        })
        .collect();
    for r in 0..length {
        let d = &sys.digraphs[r];
        let mut in_frontier = Bits::new(n);
        for (v, p) in level.iter().enumerate() {
            if p.is_some() {
                in_frontier.set(v);
            }
        }
        let threshold = sys.bound + 3 * r + 1;
        let surviving = |v: usize| {
            d.out_arcs(v)
                .iter()
                .filter(|&&(u, c)| in_frontier.get(u) && !sys.is_forbidden_at(u, c))
                .count()
        };
        let (mut order, rest): (Vec<usize>, Vec<usize>) =
            in_frontier.iter().partition(|&v| surviving(v) > threshold);
        order.extend(rest);

        let mut next: Vec<Option<RainbowPath>> = vec![None; n];
        let mut reached = 0;
        for v in order {
            let path = level[v].as_ref().expect("frontier vertex has a path");
            let start = path.first();
            for &(u, c) in d.out_arcs(v) {
                if next[u].is_some()
                    || path.vertices.contains(&u)
                    || path.colors.contains(&c)
                    || sys.is_forbidden_at(start, c)
                    || sys.is_forbidden_at(u, c)
                    || path.colors.iter().any(|&old| sys.is_forbidden_at(u, old))
                {
                    continue;
                }
                let mut extended = path.clone();
                extended.vertices.push(u);
                extended.colors.push(c);
                next[u] = Some(extended);
                reached += 1;
            }
        }
        trace.frontier.push(reached);
        if reached == 0 {
            return Ok((None, trace));
        }
        level = next;
    }
    let path = level.into_iter().flatten().next();
    if let Some(p) = &path {
        assert_eq!(
            verify_rainbow(sys, p),
            Ok(()),
            "greedy produced an invalid path"
        );
    }
    Ok((path, trace))
}

/// Default node limit for [`find_rainbow_exhaustive`].
pub const EXHAUSTIVE_NODE_BUDGET: u64 = 50_000_000;

/// Depth-first search over all vertex sequences; returns the
/// lexicographically first proper rainbow path (by vertices, then colours).
pub fn find_rainbow_exhaustive(
    sys: &RestrictedSystem,
    length: usize,
    node_budget: u64,
) -> Result<Option<RainbowPath>, RainbowError> {
    check_length(sys, length)?;
    let mut dfs = Exhaustive {
        sys,
        length,
        budget: node_budget,
        nodes: 0,
        path: RainbowPath {
            vertices: Vec::with_capacity(length + 1),
            colors: Vec::with_capacity(length),
        },
    };
    for v in 0..sys.n {
        dfs.path.vertices.push(v);
        if dfs.extend()? {
            let p = dfs.path;
            debug_assert_eq!(verify_rainbow(sys, &p), Ok(()));
            return Ok(Some(p));
        }
        dfs.path.vertices.pop();
    }
    Ok(None)
}

struct Exhaustive<'a> {
    sys: &'a RestrictedSystem,
    length: usize,
    budget: u64,
    nodes: u64,
    path: RainbowPath,
}

impl Exhaustive<'_> {
    fn extend(&mut self) -> Result<bool, RainbowError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(RainbowError::BudgetExceeded(self.budget));
        }
        let r = self.path.colors.len();
        if r == self.length {
            return Ok(verify_rainbow(self.sys, &self.path).is_ok());
        }
        let v = *self.path.vertices.last().unwrap();
        let start = self.path.vertices[0];
        for &(u, c) in self.sys.digraphs[r].out_arcs(v) {
            if self.path.vertices.contains(&u)
                || self.path.colors.contains(&c)
                || self.sys.is_forbidden_at(start, c)
            {
                continue;
            }
            self.path.vertices.push(u);
            self.path.colors.push(c);
            if self.extend()? {
                return Ok(true);
            }
            self.path.vertices.pop();
            self.path.colors.pop();
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(
        n: usize,
        digraphs: &[&[(usize, usize, Color)]],
        f: Vec<Vec<Color>>,
        ell: usize,
    ) -> RestrictedSystem {
        let ds = digraphs
            .iter()
            .map(|arcs| ColoredDigraph::new(n, arcs.iter().copied()).unwrap())
            .collect();
        RestrictedSystem::new(n, ds, f, ell).unwrap()
    }

    #[test]
    fn single_arc_base_case() {
        let sys = system(2, &[&[(0, 1, 7)]], vec![], 0);
        let p = find_rainbow_greedy(&sys, 1).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 1]);
        assert_eq!(p.colors, vec![7]);
        assert_eq!(verify_rainbow(&sys, &p), Ok(()));
        assert_eq!(find_rainbow_exhaustive(&sys, 1, 1000).unwrap(), Some(p));
    }

    #[test]
    fn all_arcs_excluded() {
        // Each arc's colour is forbidden at one of its endpoints.
        let sys = system(
            3,
            &[&[(0, 1, 10), (1, 2, 11), (2, 0, 12)]],
            vec![vec![12], vec![10], vec![11]],
            1,
        );
        assert_eq!(find_rainbow_greedy(&sys, 1).unwrap(), None);
        assert_eq!(find_rainbow_exhaustive(&sys, 1, 1000).unwrap(), None);
    }

    #[test]
    fn verify_reports_first_violation() {
        let sys = system(
            4,
            &[&[(0, 1, 1), (1, 2, 2)], &[(1, 2, 1), (1, 2, 3), (2, 3, 5)]],
            vec![vec![3]],
            1,
        );
        let reuse = RainbowPath {
            vertices: vec![0, 1, 2],
            colors: vec![1, 1],
        };
        assert_eq!(
            verify_rainbow(&sys, &reuse),
            Err(Violation::A2 {
                first: 1,
                second: 2
            })
        );
        let forbidden_start = RainbowPath {
            vertices: vec![0, 1, 2],
            colors: vec![1, 3],
        };
        assert_eq!(
            verify_rainbow(&sys, &forbidden_start),
            Err(Violation::A3 { step: 2 })
        );
        let wrong_digraph = RainbowPath {
            vertices: vec![1, 2, 3],
            colors: vec![2, 5],
        };
        assert_eq!(verify_rainbow(&sys, &wrong_digraph), Ok(()));
        let not_arc = RainbowPath {
            vertices: vec![2, 3],
            colors: vec![5],
        };
        assert_eq!(
            verify_rainbow(&sys, &not_arc),
            Err(Violation::A1 { step: 1 })
        );
        let too_long = RainbowPath {
            vertices: vec![0, 1, 2, 3],
            colors: vec![1, 3, 5],
        };
        assert_eq!(verify_rainbow(&sys, &too_long), Err(Violation::Length));
    }

    #[test]
    fn empty_digraphs_have_no_path() {
        let sys = RestrictedSystem::new(5, vec![ColoredDigraph::empty(5); 2], vec![], 0).unwrap();
        assert_eq!(find_rainbow_greedy(&sys, 2).unwrap(), None);
        assert_eq!(find_rainbow_exhaustive(&sys, 2, 1000).unwrap(), None);
        assert_eq!(
            find_rainbow_greedy(&sys, 3),
            Err(RainbowError::InvalidLength {
                requested: 3,
                available: 2
            })
        );
    }

    #[test]
    fn rejects_improper_systems() {
        assert!(matches!(
            ColoredDigraph::new(3, [(0, 1, 4), (0, 2, 4)]),
            Err(SystemError::ImproperColoring {
                vertex: 0,
                direction: "out",
                ..
            })
        ));
        assert!(matches!(
            ColoredDigraph::new(3, [(0, 2, 4), (1, 2, 4)]),
            Err(SystemError::ImproperColoring {
                vertex: 2,
                direction: "in",
                ..
            })
        ));
        assert_eq!(
            ColoredDigraph::new(3, [(1, 1, 0)]),
            Err(SystemError::Loop(1))
        );
        assert!(matches!(
            RestrictedSystem::new(2, vec![], vec![vec![1], vec![1]], 1),
            Err(SystemError::ForbiddenOverlap { color: 1, .. })
        ));
        assert!(matches!(
            RestrictedSystem::new(2, vec![], vec![vec![1, 2]], 1),
            Err(SystemError::ForbiddenTooLarge { .. })
        ));
    }

    #[test]
    fn exhaustive_budget() {
        let arcs: Vec<(usize, usize, Color)> =
            (0..6).map(|v| (v, (v + 1) % 6, v as Color)).collect();
        let sys = system(6, &[&arcs, &arcs, &arcs], vec![], 0);
        assert_eq!(
            find_rainbow_exhaustive(&sys, 3, 2),
            Err(RainbowError::BudgetExceeded(2))
        );
        let p = find_rainbow_exhaustive(&sys, 3, 1000).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2, 3]);
    }
}
