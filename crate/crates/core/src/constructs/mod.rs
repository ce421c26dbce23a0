//! Explicit solution-free sets with small Cayley independence number, each
//! returned with the verifier runs that back its claims.

mod generators;
mod nondeg;
mod poly;
mod schur;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cayley::{alpha_certified, build_cayley, AlphaBudget, AlphaMethod, AlphaResult, Clique};
use crate::eqspec::Equation;
use crate::field::{PrimeField, Rational};
use crate::residues::ResidueSet;
use crate::soloracle::{find_distinct_solution, OracleError, SolutionTuple};

pub use generators::{
    gen_high_girth, gen_triangle_free, GeneratedGraph, SparseGraph, SparseGraphError,
    GENERATOR_ALPHA_NODES,
};
pub use nondeg::{construct_nondegenerate, NonDegenerateParams};
pub use poly::{construct_poly_lower, PolyLowerParams, SIGMA_CAP};
pub use schur::{construct_schur_lower, SchurLowerParams, SchurOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("invalid parameter: {0}")]
    ParameterError(String),
    #[error("p = {p} is too small: need {requirement}")]
    FieldTooSmall { p: u64, requirement: String },
    #[error("equation {0} is degenerate")]
    Degenerate(Equation),
    #[error("coefficients of {0} sum to zero")]
    ZeroCoefficientSum(Equation),
    #[error("graph has a triangle on vertices {}, {}, {}", .0.0 + 1, .0.1 + 1, .0.2 + 1)]
    NotTriangleFree((usize, usize, usize)),
    #[error(
        "graph has a cycle of length {cycle} but cycles up to length {forbidden} are forbidden"
    )]
    GirthTooSmall { cycle: usize, forbidden: usize },
    #[error("no prefix has alpha in [{lo}, {hi}]; sequence {alphas:?}")]
    WindowMissed {
        lo: u64,
        hi: u64,
        alphas: Vec<(u64, u64)>,
    },
    #[error("no multiple of {modulus} in [{lo}, {hi}]")]
    IntervalEmpty { lo: u64, hi: u64, modulus: u64 },
    #[error("signed-sum set exceeds the cap of {0} elements")]
    SigmaTooLarge(usize),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstructionKind {
    NonDegenerate,
    SchurLower,
    PolyLower,
}

impl fmt::Display for ConstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstructionKind::NonDegenerate => "nondeg",
            ConstructionKind::SchurLower => "schur",
            ConstructionKind::PolyLower => "poly",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parameters {
    NonDegenerate(NonDegenerateParams),
    SchurLower(SchurLowerParams),
    PolyLower(PolyLowerParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMethod {
    /// Complete backtracking search.
    Exhaustive,
    /// Random distinct `(k-1)`-tuples with the last entry solved for.
    Sampled { samples: u64, seed: u64 },
}

impl fmt::Display for CheckMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckMethod::Exhaustive => f.write_str("exhaustive"),
            CheckMethod::Sampled { samples, seed } => write!(f, "sampled({samples}, seed {seed})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionFreeCheck {
    pub method: CheckMethod,
    pub passed: bool,
    pub counterexample: Option<SolutionTuple>,
}

/// `actual ≥ required`, where `required` is an exact lower bound described
/// by `formula`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeCheck {
    pub formula: String,
    pub required: Rational,
    pub actual: usize,
    pub ok: bool,
}

impl SizeCheck {
    fn new(formula: String, required: Rational, actual: usize) -> Self {
        let ok = actual as u128 * required.den() as u128 >= required.num() as u128;
        Self {
            formula,
            required,
            actual,
            ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionReport {
    pub kind: ConstructionKind,
    pub equation: Equation,
    pub p: u64,
    pub set: ResidueSet,
    pub params: Parameters,
    pub solution_free: SolutionFreeCheck,
    pub alpha: AlphaResult,
    pub size: SizeCheck,
    pub clique: Option<Clique>,
    pub notes: Vec<String>,
}

impl ConstructionReport {
    /// Every recorded check passed.
    pub fn verified(&self) -> bool {
        self.solution_free.passed && self.size.ok
    }
}

impl fmt::Display for ConstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "construction: {}", self.kind)?;
        writeln!(f, "equation: {}", self.equation.expression())?;
        writeln!(f, "p: {}", self.p)?;
        writeln!(f, "|A|: {}", self.set.len())?;
        writeln!(
            f,
            "solution-free: {} ({})",
            if self.solution_free.passed {
                "yes"
            } else {
                "NO"
            },
            self.solution_free.method
        )?;
        writeln!(
            f,
            "size: {} >= {} ({}): {}",
            self.size.actual,
            self.size.required,
            self.size.formula,
            if self.size.ok { "ok" } else { "FAILED" }
        )?;
        writeln!(
            f,
            "alpha: [{}, {}] ({})",
            self.alpha.lower, self.alpha.upper, self.alpha.method
        )?;
        if let Some(c) = &self.clique {
            writeln!(
                f,
                "clique: {:?} gives alpha <= {}",
                c.members, c.alpha_upper
            )?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// Budget for the α reported alongside a construction; beyond it the
/// certified interval is reported instead.
pub const CONSTRUCTION_ALPHA_BUDGET: AlphaBudget = AlphaBudget {
    max_vertices: 2000,
    max_nodes: 20_000,
};

/// Largest `|A|^{k-1}` checked exhaustively.
pub const EXHAUSTIVE_WORK_LIMIT: u128 = 50_000_000;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

/// Exhaustive distinct-solution search when `|A|^{k-1}` is small enough,
/// otherwise `DEFAULT_SAMPLES` random tuples from the given seed.
pub fn verify_solution_free(
    set: &ResidueSet,
    eq: &Equation,
    field: PrimeField,
    seed: u64,
) -> Result<SolutionFreeCheck, OracleError> {
    let k = eq.arity() as u32;
    let work = (set.len() as u128).checked_pow(k - 1).unwrap_or(u128::MAX);
    if work <= EXHAUSTIVE_WORK_LIMIT {
        let found = find_distinct_solution(set, eq, field)?;
        return Ok(SolutionFreeCheck {
            method: CheckMethod::Exhaustive,
            passed: found.is_none(),
            counterexample: found,
        });
    }
    sampled_check(set, eq, field, DEFAULT_SAMPLES, seed)
}

pub fn sampled_check(
    set: &ResidueSet,
    eq: &Equation,
    field: PrimeField,
    samples: u64,
    seed: u64,
) -> Result<SolutionFreeCheck, OracleError> {
    let k = eq.arity();
    let c = eq.coeffs();
    let last = field.reduce(c[k - 1]);
    let Some(last_inv) = field.inv(last) else {
        return Err(OracleError::CoefficientVanishes {
            index: k - 1,
            p: field.p(),
        });
    };
    let method = CheckMethod::Sampled { samples, seed };
    if set.len() < k {
        return Ok(SolutionFreeCheck {
            method,
            passed: true,
            counterexample: None,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members = set.as_slice();
    for _ in 0..samples {
        let picks = sample(&mut rng, members.len(), k - 1);
        let mut entries: Vec<u64> = picks.iter().map(|i| members[i]).collect();
        let partial = entries
            .iter()
            .zip(c)
            .fold(0, |acc, (&a, &ci)| field.add(acc, field.scale(ci, a)));
        let x = field.mul(field.neg(partial), last_inv);
        if set.contains(x) && !entries.contains(&x) {
            entries.push(x);
            return Ok(SolutionFreeCheck {
                method,
                passed: false,
                counterexample: Some(SolutionTuple {
                    entries,
                    coeffs: c.to_vec(),
                }),
            });
        }
    }
    Ok(SolutionFreeCheck {
        method,
        passed: true,
        counterexample: None,
    })
}

/// Certified α of `Cay(set ∖ {0})`; `α = p` when no nonzero element remains.
pub fn alpha_of_set(set: &ResidueSet, field: PrimeField, budget: AlphaBudget) -> AlphaResult {
    let gens = set.nonzero();
    if gens.is_empty() {
        return AlphaResult {
            lower: field.p(),
            upper: field.p(),
            method: AlphaMethod::Exact,
            witness: (0..field.p()).collect(),
        };
    }
    let g = build_cayley(field, &gens).expect("nonzero residues");
    alpha_certified(&g, budget)
}
