//! The density function: largest solution-free `A ⊆ 𝔽_p` whose Cayley graph
//! has independence number at most `εp`.
//!
//! Adding elements to `A` only adds edges, so `α` never grows; every
//! feasible set therefore extends to a feasible maximal solution-free set,
//! and both searches below look only at maximal ones.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cayley::{alpha_certified, build_cayley, AlphaBudget, AlphaMethod, AlphaResult};
use crate::eqspec::Equation;
use crate::field::{PrimeField, Rational};
use crate::residues::ResidueSet;
use crate::soloracle::{
    find_distinct_solution, find_solution_containing, OracleError, SolutionMode,
};

/// Largest `p` accepted by [`exact_d`].
pub const EXACT_CAP: u64 = 23;
/// Largest `p` accepted by [`heuristic_d`].
pub const HEURISTIC_CAP: u64 = 50_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("p = {p} exceeds the cap {cap}")]
    CapExceeded { p: u64, cap: u64 },
    #[error("witness failed re-verification: {0}")]
    Unverified(&'static str),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensityKind {
    /// The maximum itself.
    Exact,
    /// A lower bound found by local search.
    Heuristic,
}

impl fmt::Display for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensityKind::Exact => "exact",
            DensityKind::Heuristic => "heuristic",
        })
    }
}

/// One evaluated `(eq, p, ε)` with a re-verified witness of size `value`.
/// An empty witness means no set qualifies and the value is 0 by convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityPoint {
    pub equation: Equation,
    pub p: u64,
    pub eps: Rational,
    pub value: u64,
    pub kind: DensityKind,
    pub witness: ResidueSet,
    /// α of the witness's Cayley graph (`p` for an empty witness).
    pub alpha: AlphaResult,
}

impl DensityPoint {
    pub fn density(&self) -> f64 {
        self.value as f64 / self.p as f64
    }
}

fn alpha_of(set: &ResidueSet, field: PrimeField, budget: AlphaBudget) -> AlphaResult {
    let gens = set.nonzero();
    if gens.is_empty() {
        return AlphaResult {
            lower: field.p(),
            upper: field.p(),
            method: AlphaMethod::Exact,
            witness: (0..field.p()).collect(),
        };
    }
    alpha_certified(&build_cayley(field, &gens).expect("nonzero"), budget)
}

/// Re-checks solution-freeness and `α ≤ εp` before a point is emitted.
fn finish(
    eq: &Equation,
    field: PrimeField,
    eps: Rational,
    witness: ResidueSet,
    kind: DensityKind,
    budget: AlphaBudget,
) -> Result<DensityPoint, DensityError> {
    let p = field.p();
    let alpha = alpha_of(&witness, field, budget);
    if !witness.is_empty() {
        if find_distinct_solution(&witness, eq, field)?.is_some() {
            return Err(DensityError::Unverified("witness contains a solution"));
        }
        if !eps.admits(alpha.upper, p) {
            return Err(DensityError::Unverified("alpha exceeds eps * p"));
        }
    }
    Ok(DensityPoint {
        equation: eq.clone(),
        p,
        eps,
        value: witness.len() as u64,
        kind,
        witness,
        alpha,
    })
}

fn empty_point(
    eq: &Equation,
    field: PrimeField,
    eps: Rational,
    kind: DensityKind,
) -> Result<DensityPoint, DensityError> {
    finish(
        eq,
        field,
        eps,
        ResidueSet::empty(field.p()),
        kind,
        AlphaBudget::default(),
    )
}

fn compatible(
    set: &ResidueSet,
    eq: &Equation,
    field: PrimeField,
    y: u64,
) -> Result<bool, OracleError> {
    let mut with = set.clone();
    with.insert(y);
    Ok(find_solution_containing(&with, eq, field, SolutionMode::Distinct, y)?.is_none())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOptions {
    /// Allow `0 ∈ A`; it adds no edges to the Cayley graph.
    pub include_zero: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self { include_zero: true }
    }
}

struct ExactSearch<'a> {
    eq: &'a Equation,
    field: PrimeField,
    eps: Rational,
    best: Option<ResidueSet>,
    alpha_cache: BTreeMap<u64, u64>,
}

impl ExactSearch<'_> {
    fn best_len(&self) -> usize {
        self.best.as_ref().map_or(0, ResidueSet::len)
    }

    /// `α` keyed by the symmetric closure of the nonzero elements.
    fn alpha(&mut self, set: &ResidueSet) -> u64 {
        let p = self.field.p();
        let key = set
            .iter()
            .filter(|&a| a != 0)
            .fold(0u64, |m, a| m | 1 << a | 1 << (p - a));
        if let Some(&a) = self.alpha_cache.get(&key) {
            return a;
        }
        let a = alpha_of(set, self.field, AlphaBudget::UNLIMITED).lower;
        self.alpha_cache.insert(key, a);
        a
    }

    /// `candidates` are descending and each individually compatible with
    /// `cur`; `excluded` were branched away and must block `cur` at a leaf.
    fn dfs(
        &mut self,
        cur: &mut ResidueSet,
        candidates: &[u64],
        excluded: &mut Vec<u64>,
    ) -> Result<(), OracleError> {
        if cur.len() + candidates.len() <= self.best_len() && self.best.is_some() {
            return Ok(());
        }
        let Some((&x, rest)) = candidates.split_first() else {
            for &y in excluded.iter() {
                if compatible(cur, self.eq, self.field, y)? {
                    return Ok(());
                }
            }
            let alpha = self.alpha(cur);
            if self.eps.admits(alpha, self.field.p()) && cur.len() >= self.best_len() {
                self.best = Some(cur.clone());
            }
            return Ok(());
        };
        cur.insert(x);
        let mut kept = Vec::with_capacity(rest.len());
        for &y in rest {
            if compatible(cur, self.eq, self.field, y)? {
                kept.push(y);
            }
        }
        self.dfs(cur, &kept, excluded)?;
        cur.remove(x);
        excluded.push(x);
        self.dfs(cur, rest, excluded)?;
        excluded.pop();
        Ok(())
    }
}

/// `D(eq, ε, p)` by branch and bound over maximal solution-free sets,
/// branching on residues in descending order.
pub fn exact_d(
    eq: &Equation,
    field: PrimeField,
    eps: Rational,
    opts: ExactOptions,
) -> Result<DensityPoint, DensityError> {
    let p = field.p();
    if p > EXACT_CAP {
        return Err(DensityError::CapExceeded { p, cap: EXACT_CAP });
    }
    let floor = u64::from(!opts.include_zero);
    let mut search = ExactSearch {
        eq,
        field,
        eps,
        best: None,
        alpha_cache: BTreeMap::new(),
    };
    let mut cur = ResidueSet::empty(p);
    let mut candidates = Vec::new();
    for y in (floor..p).rev() {
        if compatible(&cur, eq, field, y)? {
            candidates.push(y);
        }
    }
    search.dfs(&mut cur, &candidates, &mut Vec::new())?;
    match search.best {
        Some(w) => finish(
            eq,
            field,
            eps,
            w,
            DensityKind::Exact,
            AlphaBudget::UNLIMITED,
        ),
        None => empty_point(eq, field, eps, DensityKind::Exact),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicOptions {
    pub iterations: u64,
    pub seed: u64,
    pub include_zero: bool,
    /// Starting sets; each must be solution-free or it is skipped.
    pub seeds: Vec<ResidueSet>,
    /// Budget for each α certification during the search.
    pub alpha_budget: AlphaBudget,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        Self {
            iterations: 20_000,
            seed: 0,
            include_zero: true,
            seeds: Vec::new(),
            alpha_budget: AlphaBudget {
                max_vertices: 2000,
                max_nodes: 200_000,
            },
        }
    }
}

struct Annealer<'a> {
    eq: &'a Equation,
    field: PrimeField,
    eps: Rational,
    budget: AlphaBudget,
    best: ResidueSet,
    rejected: BTreeMap<Vec<u64>, ()>,
}

impl Annealer<'_> {
    fn consider(&mut self, set: &ResidueSet) {
        if set.len() <= self.best.len() || self.rejected.contains_key(set.as_slice()) {
            return;
        }
        let a = alpha_of(set, self.field, self.budget);
        if self.eps.admits(a.upper, self.field.p()) {
            self.best = set.clone();
        } else {
            self.rejected.insert(set.as_slice().to_vec(), ());
        }
    }

    /// Adds `x`, evicting one other entry of each solution it closes.
    /// Returns the evicted elements.
    fn force_insert(
        &self,
        set: &mut ResidueSet,
        x: u64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<u64>, OracleError> {
        set.insert(x);
        let mut evicted = Vec::new();
        while let Some(sol) =
            find_solution_containing(set, self.eq, self.field, SolutionMode::Distinct, x)?
        {
            let others: Vec<u64> = sol.entries.iter().copied().filter(|&e| e != x).collect();
            let victim = *others.choose(rng).expect("k >= 3");
            set.remove(victim);
            evicted.push(victim);
        }
        Ok(evicted)
    }
}

/// Lower bound on `D(eq, ε, p)` by simulated annealing on the size of a
/// solution-free set, certifying `α ≤ εp` whenever a new size record
/// appears. The returned witness is re-verified.
pub fn heuristic_d(
    eq: &Equation,
    field: PrimeField,
    eps: Rational,
    opts: &HeuristicOptions,
) -> Result<DensityPoint, DensityError> {
    let p = field.p();
    if p > HEURISTIC_CAP {
        return Err(DensityError::CapExceeded {
            p,
            cap: HEURISTIC_CAP,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let floor = u64::from(!opts.include_zero);
    let universe: Vec<u64> = (floor..p).collect();
    let mut ann = Annealer {
        eq,
        field,
        eps,
        budget: opts.alpha_budget,
        best: ResidueSet::empty(p),
        rejected: BTreeMap::new(),
    };
    let mut cur = ResidueSet::empty(p);
    for s in &opts.seeds {
        if s.modulus() == p && find_distinct_solution(s, eq, field)?.is_none() {
            ann.consider(s);
            if s.len() > cur.len() {
                cur = s.clone();
            }
        }
    }
    let iterations = opts.iterations.max(1);
    for it in 0..iterations {
        let temperature = 1.0 - 0.95 * it as f64 / iterations as f64;
        let x = universe[rng.gen_range(0..universe.len())];
        if cur.contains(x) {
            continue;
        }
        let mut next = cur.clone();
        let evicted = ann.force_insert(&mut next, x, &mut rng)?;
        let delta = 1.0 - evicted.len() as f64;
        if delta >= 0.0 || rng.gen::<f64>() < libm::exp(delta / temperature) {
            cur = next;
            ann.consider(&cur);
        }
    }
    let best = ann.best;
    if best.is_empty() {
        empty_point(eq, field, eps, DensityKind::Heuristic)
    } else {
        finish(
            eq,
            field,
            eps,
            best,
            DensityKind::Heuristic,
            opts.alpha_budget,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensityMode {
    Exact(ExactOptions),
    Heuristic(HeuristicOptions),
}

/// Per-point seed derived from the run seed, so grid points are independent
/// of evaluation order.
pub fn point_seed(seed: u64, p: u64, eps: Rational) -> u64 {
    let mut z = seed
        ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ eps.num().rotate_left(21)
        ^ eps.den().rotate_left(42);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn evaluate_point(
    eq: &Equation,
    field: PrimeField,
    eps: Rational,
    mode: &DensityMode,
) -> Result<DensityPoint, DensityError> {
    match mode {
        DensityMode::Exact(o) => exact_d(eq, field, eps, *o),
        DensityMode::Heuristic(o) => {
            let mut o = o.clone();
            o.seed = point_seed(o.seed, field.p(), eps);
            heuristic_d(eq, field, eps, &o)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityRow {
    pub p: u64,
    pub eps: Rational,
    pub result: Result<DensityPoint, DensityError>,
}

/// Pairs `(p, ε_lo, ε_hi)` with `ε_lo < ε_hi` but a larger value at `ε_lo`.
/// Only exact rows are compared.
pub fn monotonicity_violations(rows: &[DensityRow]) -> Vec<(u64, Rational, Rational)> {
    let mut by_p: BTreeMap<u64, Vec<(Rational, u64)>> = BTreeMap::new();
    for r in rows {
        if let Ok(pt) = &r.result {
            if pt.kind == DensityKind::Exact {
                by_p.entry(r.p).or_default().push((r.eps, pt.value));
            }
        }
    }
    let mut out = Vec::new();
    for (p, mut pts) in by_p {
        pts.sort();
        for w in pts.windows(2) {
            if w[0].1 > w[1].1 {
                out.push((p, w[0].0, w[1].0));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub rows: Vec<DensityRow>,
    pub violations: Vec<(u64, Rational, Rational)>,
}

impl DensityCurve {
    pub fn monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates every `(p, ε)` in grid order; non-prime `p` gives a failed row.
pub fn density_curve(
    eq: &Equation,
    primes: &[u64],
    eps_grid: &[Rational],
    mode: &DensityMode,
) -> Result<DensityCurve, crate::field::FieldError> {
    let mut rows = Vec::with_capacity(primes.len() * eps_grid.len());
    for &p in primes {
        let field = PrimeField::new(p)?;
        for &eps in eps_grid {
            rows.push(DensityRow {
                p,
                eps,
                result: evaluate_point(eq, field, eps, mode),
            });
        }
    }
    let violations = monotonicity_violations(&rows);
    Ok(DensityCurve { rows, violations })
}
