//! Schur-free sets of size `Ω(εp)` with `α ≤ εp`: differences `4^j - 4^l`
//! over the edges of a triangle-free graph, plus an independent set of a
//! middle interval.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    alpha_of_set, verify_solution_free, ConstructError, ConstructionKind, ConstructionReport,
    Parameters, SizeCheck, SparseGraph, CONSTRUCTION_ALPHA_BUDGET,
};
use crate::cayley::{build_cayley, induce_interval, AlphaMethod, AlphaResult};
use crate::eqspec::Equation;
use crate::field::{PrimeField, Rational};
use crate::graph::{maximum_independent_set, BitGraph};
use crate::residues::ResidueSet;
use crate::soloracle::find_distinct_solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchurOptions {
    /// Window scale `t`; the target is `5p/t ≤ α(H_i) ≤ 10p/t`. Defaults
    /// to `100/ε`.
    pub t: Option<Rational>,
    /// Node budget for each interval independence number.
    pub alpha_nodes: u64,
    /// Interval graphs larger than this get certified bounds only.
    pub max_interval: usize,
    pub seed: u64,
}

impl Default for SchurOptions {
    fn default() -> Self {
        Self {
            t: None,
            alpha_nodes: 20_000_000,
            max_interval: 2000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchurLowerParams {
    pub t: Rational,
    /// Vertices of the input graph.
    pub q: usize,
    /// `X` ascending; the prefixes `X_i` follow this order.
    pub differences: Vec<u64>,
    /// Index `i` of the prefix used.
    pub prefix: usize,
    /// `[⌈5p/t⌉, ⌊10p/t⌋]`.
    pub window: (u64, u64),
    /// `[⌈p/3⌉, ⌊4p/9⌋]`.
    pub interval: (u64, u64),
    /// Certified `(lower, upper)` of `α(H_0), …, α(H_i)`.
    pub alpha_sequence: Vec<(u64, u64)>,
    /// Independent set of `H_i` before repair.
    pub independent: Vec<u64>,
    /// Elements dropped from it because they closed a Schur triple.
    pub removed: Vec<u64>,
    /// `α(Cay(X_i))`, which bounds `α(Cay(A))` from above.
    pub alpha_prefix: AlphaResult,
}

/// Runs the prefix scan for Schur's equation with input graph `g`, whose
/// vertex `v` stands for the power `4^{v+1}`.
///
/// The chosen independent set is repaired by dropping elements that lie in
/// `X_i ± X_i` or otherwise complete a Schur triple, so the output is
/// Schur-free even when `p` is far below the asymptotic regime.
pub fn construct_schur_lower(
    field: PrimeField,
    eps: Rational,
    g: &SparseGraph,
    opts: SchurOptions,
) -> Result<ConstructionReport, ConstructError> {
    let p = field.p();
    if eps.is_zero() {
        return Err(ConstructError::ParameterError(String::from(
            "eps must be positive",
        )));
    }
    let t = match opts.t {
        Some(t) => t,
        None => eps
            .recip_times(100)
            .ok_or_else(|| ConstructError::ParameterError(String::from("100/eps does not fit")))?,
    };
    if t.is_zero() {
        return Err(ConstructError::ParameterError(String::from(
            "t must be positive",
        )));
    }
    if let Some(tri) = g.find_triangle() {
        return Err(ConstructError::NotTriangleFree(tri));
    }
    let q = g.order();
    let four_q = 4u128.checked_pow(q as u32);
    if four_q.is_none_or(|f| p as u128 <= 2 * f) {
        return Err(ConstructError::FieldTooSmall {
            p,
            requirement: format!("p > 2 * 4^{q}"),
        });
    }
    let mut differences: Vec<u64> = g
        .edges()
        .iter()
        .map(|&(l, j)| 4u64.pow(j as u32 + 1) - 4u64.pow(l as u32 + 1))
        .collect();
    differences.sort_unstable();
    differences.dedup();

    let interval = (p.div_ceil(3), 4 * p / 9);
    // Window [5p/t, 10p/t] with t = num/den.
    let window = (
        ceil_div(5 * p as u128 * t.den() as u128, t.num() as u128),
        (10 * p as u128 * t.den() as u128 / t.num() as u128) as u64,
    );
    let width = (interval.1 - interval.0 + 1) as usize;
    let mut notes = Vec::new();
    if (width as u64) < p / 9 {
        notes.push(format!(
            "interval has {width} residues, below p/9 only by rounding"
        ));
    }

    let mut alpha_sequence = Vec::new();
    let mut chosen = None;
    for i in 0..=differences.len() {
        let (lower, upper, set) = interval_alpha(field, &differences[..i], interval, &opts)?;
        alpha_sequence.push((lower, upper));
        if window.0 <= lower && upper <= window.1 {
            chosen = Some((i, set));
            break;
        }
        if upper < window.0 {
            break;
        }
    }
    let Some((prefix, independent)) = chosen else {
        return Err(ConstructError::WindowMissed {
            lo: window.0,
            hi: window.1,
            alphas: alpha_sequence,
        });
    };
    let prefix_set = &differences[..prefix];

    let (y, removed) = repair(field, prefix_set, &independent)?;
    if !removed.is_empty() {
        notes.push(format!(
            "dropped {} of {} interval elements completing Schur triples",
            removed.len(),
            independent.len()
        ));
    }
    let set = ResidueSet::from_residues(p, prefix_set.iter().chain(&y).copied())
        .expect("elements below p");
    let eq = Equation::schur();
    let solution_free = verify_solution_free(&set, &eq, field, opts.seed)?;
    let size = SizeCheck::new(
        format!("|Y| >= 5p/t, t = {t}"),
        Rational::new(5 * p * t.den(), t.num())
            .map_err(|_| ConstructError::ParameterError(String::from("t must be positive")))?,
        y.len(),
    );

    let budget = CONSTRUCTION_ALPHA_BUDGET;
    let prefix_residues =
        ResidueSet::from_residues(p, prefix_set.iter().copied()).expect("elements below p");
    let alpha_prefix = alpha_of_set(&prefix_residues, field, budget);
    let mut alpha = alpha_of_set(&set, field, budget);
    if alpha_prefix.upper < alpha.upper {
        alpha.upper = alpha_prefix.upper;
        alpha.method = AlphaMethod::Inherited;
    }

    Ok(ConstructionReport {
        kind: ConstructionKind::SchurLower,
        equation: eq,
        p,
        set,
        params: Parameters::SchurLower(SchurLowerParams {
            t,
            q,
            differences,
            prefix,
            window,
            interval,
            alpha_sequence,
            independent,
            removed,
            alpha_prefix,
        }),
        solution_free,
        alpha,
        size,
        clique: None,
        notes,
    })
}

fn ceil_div(a: u128, b: u128) -> u64 {
    a.div_ceil(b) as u64
}

/// Certified `α(H)` and a maximum (or best found) independent set of the
/// subgraph of `Cay(prefix)` induced on the interval.
fn interval_alpha(
    field: PrimeField,
    prefix: &[u64],
    interval: (u64, u64),
    opts: &SchurOptions,
) -> Result<(u64, u64, Vec<u64>), ConstructError> {
    let (lo, hi) = interval;
    let width = (hi - lo + 1) as usize;
    let graph = if prefix.is_empty() {
        BitGraph::new(width)
    } else {
        let cay = build_cayley(field, prefix).expect("nonzero differences");
        induce_interval(&cay, lo, hi)
            .map_err(|e| ConstructError::ParameterError(format!("{e}")))?
            .graph
    };
    let budget = if width > opts.max_interval {
        0
    } else {
        opts.alpha_nodes
    };
    let mis = maximum_independent_set(&graph, budget);
    let set: Vec<u64> = mis.set.iter().map(|&i| lo + i as u64).collect();
    Ok((set.len() as u64, mis.upper as u64, set))
}

/// Drops interval elements lying in `X_i`, in `X_i ± X_i`, or completing a
/// Schur triple with the rest; returns the kept and removed elements.
fn repair(
    field: PrimeField,
    prefix: &[u64],
    independent: &[u64],
) -> Result<(Vec<u64>, Vec<u64>), ConstructError> {
    let p = field.p();
    let mut forbidden = ResidueSet::from_residues(p, prefix.iter().copied()).expect("below p");
    for &a in prefix {
        for &b in prefix {
            forbidden.insert(field.add(a, b));
            forbidden.insert(field.sub(a, b));
        }
    }
    let (mut kept, mut removed): (Vec<u64>, Vec<u64>) =
        independent.iter().partition(|&&y| !forbidden.contains(y));
    let kept_set = ResidueSet::from_residues(p, kept.iter().copied()).expect("below p");
    let mut all = ResidueSet::from_residues(p, prefix.iter().copied()).expect("below p");
    for y in kept_set.iter() {
        all.insert(y);
    }
    let schur = Equation::schur();
    while let Some(sol) = find_distinct_solution(&all, &schur, field)? {
        let Some(&y) = sol.entries.iter().filter(|e| kept.contains(e)).max() else {
            return Err(ConstructError::ParameterError(String::from(
                "difference set itself contains a Schur triple",
            )));
        };
        all.remove(y);
        kept.retain(|&v| v != y);
        removed.push(y);
    }
    removed.sort_unstable();
    Ok((kept, removed))
}
