//! Constructive search for a distinct-entry solution of a degenerate
//! equation in a set with small Cayley independence number.
//!
//! Pipeline: move a zero-sum block `S` of coefficients to the front, extract
//! disjoint solutions of the block equation, turn their last coordinates
//! into a vertex set `U` with forbidden colours, find a proper rainbow path
//! through the dilated Cayley digraphs restricted to `U`, and read the
//! remaining variables off the path.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::cayley::{alpha_certified, build_cayley, AlphaBudget};
use crate::eqspec::{classify, reorder_for_witness, zero_sum_subsets, Equation};
use crate::field::{PrimeField, Rational};
use crate::rainbow::{
    find_rainbow_exhaustive, find_rainbow_greedy_traced, verify_rainbow, ColoredDigraph,
    RainbowPath, RestrictedSystem,
};
use crate::residues::ResidueSet;
use crate::soloracle::{
    extract_disjoint_solutions, find_distinct_solution, weighted_sum, SolutionMode, SolutionTuple,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("equation {0} has no zero-sum coefficient subset")]
    NotDegenerate(Equation),
    #[error("coefficient of x{} vanishes modulo {p}", .index + 1)]
    CoefficientVanishes { index: usize, p: u64 },
    #[error("alpha in [{lower}, {upper}] straddles the threshold")]
    AlphaUndecided { lower: u64, upper: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    /// Density parameter for the extraction quota and hypothesis labelling.
    pub eps: Option<Rational>,
    /// Cap the quota at `|A| / (2k′)` and continue with a short extraction.
    pub relaxed: bool,
    /// Explicit quota, overriding both formulas.
    pub quota: Option<usize>,
    /// Try every zero-sum subset until one succeeds.
    pub try_all_subsets: bool,
    /// Node budget for an exhaustive path search after the greedy stalls;
    /// `None` disables the fallback.
    pub rainbow_budget: Option<u64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            eps: None,
            relaxed: true,
            quota: None,
            try_all_subsets: false,
            rainbow_budget: Some(2_000_000),
        }
    }
}

/// `⌈100^k · k² · εp⌉`, saturating.
pub fn full_quota(k: usize, eps: Rational, p: u64) -> usize {
    let mut factor: u128 = (k * k) as u128;
    for _ in 0..k {
        factor = factor.saturating_mul(100);
    }
    let num = factor
        .saturating_mul(eps.num() as u128)
        .saturating_mul(p as u128);
    let q = num.div_ceil(eps.den() as u128);
    usize::try_from(q).unwrap_or(usize::MAX)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Found(SolutionTuple),
    HypothesisFailed { stage: Stage, diagnostic: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    DirectSearch,
    Extraction,
    Rainbow,
    Assembly,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::DirectSearch => "direct-search",
            Stage::Extraction => "extraction",
            Stage::Rainbow => "rainbow",
            Stage::Assembly => "assembly",
        })
    }
}

/// Intermediate data of the last attempted zero-sum subset.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Artifacts {
    /// Zero-sum subset used (0-based, original indices).
    pub subset: Vec<usize>,
    pub block_size: usize,
    pub quota: usize,
    pub extracted: usize,
    pub frontier: Vec<usize>,
    /// Residues `v_{k′}, …, v_k` of the rainbow path.
    pub path: Vec<u64>,
    /// The input met both size and α conditions; `None` when not evaluated
    /// or undecidable.
    pub hypothesis_met: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub equation: Equation,
    pub p: u64,
    pub set_size: usize,
    pub outcome: Outcome,
    pub log: Vec<String>,
    pub artifacts: Artifacts,
}

impl WitnessReport {
    pub fn solution(&self) -> Option<&SolutionTuple> {
        match &self.outcome {
            Outcome::Found(t) => Some(t),
            Outcome::HypothesisFailed { .. } => None,
        }
    }
}

impl fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "equation: {}", self.equation.expression())?;
        writeln!(f, "p: {}", self.p)?;
        writeln!(f, "|A|: {}", self.set_size)?;
        match &self.outcome {
            Outcome::Found(t) => {
                let entries: Vec<String> = t.entries.iter().map(|e| format!("{e}")).collect();
                writeln!(f, "outcome: found ({})", entries.join(", "))?;
            }
            Outcome::HypothesisFailed { stage, diagnostic } => {
                writeln!(f, "outcome: hypothesis-failed stage={stage}: {diagnostic}")?;
            }
        }
        let a = &self.artifacts;
        let subset: Vec<String> = a.subset.iter().map(|i| format!("{}", i + 1)).collect();
        writeln!(f, "subset: {{{}}}", subset.join(","))?;
        writeln!(f, "quota: {} extracted: {}", a.quota, a.extracted)?;
        let hyp = match a.hypothesis_met {
            Some(true) => "met",
            Some(false) => "not met",
            None => "unknown",
        };
        writeln!(f, "hypothesis: {hyp}")?;
        for line in &self.log {
            writeln!(f, "log: {line}")?;
        }
        Ok(())
    }
}

fn reduced_coefficients(eq: &Equation, field: PrimeField) -> Result<Vec<u64>, WitnessError> {
    eq.coeffs()
        .iter()
        .enumerate()
        .map(|(index, &c)| match field.reduce(c) {
            0 => Err(WitnessError::CoefficientVanishes {
                index,
                p: field.p(),
            }),
            r => Ok(r),
        })
        .collect()
}

/// Runs the pipeline on `set`. A `Found` outcome has been re-verified:
/// entries lie in `set`, are pairwise distinct, and solve the equation.
pub fn find_solution_via_rainbow(
    set: &ResidueSet,
    eq: &Equation,
    field: PrimeField,
    cfg: &PipelineConfig,
) -> Result<WitnessReport, WitnessError> {
    reduced_coefficients(eq, field)?;
    let class = classify(eq);
    let Some(first) = class.witness else {
        return Err(WitnessError::NotDegenerate(eq.clone()));
    };
    let subsets = if cfg.try_all_subsets {
        zero_sum_subsets(eq)
    } else {
        vec![first]
    };
    let hypothesis_met = cfg
        .eps
        .and_then(|eps| solution_promised(set, eq, field, eps).ok());
    let mut log = Vec::new();
    let mut last = None;
    for subset in subsets {
        let (outcome, mut artifacts) = run_subset(set, eq, field, cfg, &subset, &mut log);
        artifacts.hypothesis_met = hypothesis_met;
        let done = matches!(outcome, Outcome::Found(_));
        last = Some((outcome, artifacts));
        if done {
            break;
        }
    }
    let (outcome, artifacts) = last.expect("degenerate equation has a zero-sum subset");
    Ok(WitnessReport {
        equation: eq.clone(),
        p: field.p(),
        set_size: set.len(),
        outcome,
        log,
        artifacts,
    })
}

fn fail(stage: Stage, diagnostic: String, log: &mut Vec<String>) -> Outcome {
    log.push(format!("{stage}: {diagnostic}"));
    Outcome::HypothesisFailed { stage, diagnostic }
}

fn run_subset(
    set: &ResidueSet,
    eq: &Equation,
    field: PrimeField,
    cfg: &PipelineConfig,
    subset: &[usize],
    log: &mut Vec<String>,
) -> (Outcome, Artifacts) {
    let (reordered, perm) =
        reorder_for_witness(eq, subset).expect("zero-sum subset from the classifier");
    let c = reordered.coeffs();
    let k = c.len();
    let kb = subset.len();
    let mut art = Artifacts {
        subset: subset.to_vec(),
        block_size: kb,
        ..Artifacts::default()
    };
    let shown: Vec<String> = subset.iter().map(|i| format!("{}", i + 1)).collect();
    log.push(format!(
        "zero-sum subset {{{}}} of size {kb}",
        shown.join(",")
    ));

    if kb == k {
        return match find_distinct_solution(set, eq, field) {
            Ok(Some(t)) => {
                log.push(String::from("direct-search: solution found"));
                (Outcome::Found(t), art)
            }
            Ok(None) => (
                fail(
                    Stage::DirectSearch,
                    String::from("set is solution-free"),
                    log,
                ),
                art,
            ),
            Err(e) => (fail(Stage::DirectSearch, format!("{e}"), log), art),
        };
    }

    let relaxed_quota = (set.len() / (2 * kb)).max(1);
    let quota = match (cfg.quota, cfg.eps) {
        (Some(q), _) => q,
        (None, Some(eps)) if cfg.relaxed => full_quota(k, eps, field.p()).min(relaxed_quota),
        (None, Some(eps)) => full_quota(k, eps, field.p()),
        (None, None) => relaxed_quota,
    };
    art.quota = quota;
    let block = &c[..kb];
    let extracted = match extract_disjoint_solutions(set, block, field, quota) {
        Ok(x) => x,
        Err(e) => return (fail(Stage::Extraction, format!("{e}"), log), art),
    };
    art.extracted = extracted.len();
    log.push(format!(
        "extraction: {} of quota {quota} block solutions",
        extracted.len()
    ));
    if extracted.is_empty() || (!cfg.relaxed && extracted.len() < quota) {
        return (
            fail(
                Stage::Extraction,
                format!(
                    "found {} of {quota} disjoint block solutions",
                    extracted.len()
                ),
                log,
            ),
            art,
        );
    }

    // Vertices of the digraph system: u_r = -c_{k′} · (x_r)_{k′}.
    let ck = c[kb - 1];
    let vertices: Vec<u64> = extracted
        .iter()
        .map(|x| field.neg(field.scale(ck, x.entries[kb - 1])))
        .collect();
    let mut index_of = vec![usize::MAX; field.p() as usize];
    for (i, &u) in vertices.iter().enumerate() {
        index_of[u as usize] = i;
    }
    let forbidden: Vec<Vec<u64>> = extracted.iter().map(|x| x.entries.clone()).collect();
    let digraphs: Vec<ColoredDigraph> = c[kb..]
        .iter()
        .map(|&ci| {
            let mut arcs = Vec::new();
            for (i, &u) in vertices.iter().enumerate() {
                for a in set.iter() {
                    let w = field.add(u, field.scale(ci, a));
                    let j = index_of[w as usize];
                    if j != usize::MAX && j != i {
                        arcs.push((i, j, a));
                    }
                }
            }
            ColoredDigraph::new(vertices.len(), arcs).expect("dilated Cayley colouring is proper")
        })
        .collect();
    let sys = RestrictedSystem::new(vertices.len(), digraphs, forbidden, kb)
        .expect("extracted solutions are disjoint");
    log.push(format!("system: |U| = {}, bound {kb}", vertices.len()));

    let length = k - kb;
    let (greedy, trace) = find_rainbow_greedy_traced(&sys, length).expect("length within system");
    art.frontier = trace.frontier.clone();
    log.push(format!(
        "rainbow greedy frontier sizes {:?}",
        trace.frontier
    ));
    let path = match greedy {
        Some(p) => p,
        None => {
            let fallback = cfg
                .rainbow_budget
                .map(|b| find_rainbow_exhaustive(&sys, length, b));
            match fallback {
                Some(Ok(Some(p))) => {
                    log.push(String::from(
                        "rainbow: greedy stalled, exhaustive search succeeded",
                    ));
                    p
                }
                Some(Ok(None)) => {
                    return (
                        fail(
                            Stage::Rainbow,
                            String::from("no proper rainbow path exists"),
                            log,
                        ),
                        art,
                    )
                }
                Some(Err(e)) => {
                    return (
                        fail(Stage::Rainbow, format!("greedy stalled; {e}"), log),
                        art,
                    )
                }
                None => {
                    return (
                        fail(Stage::Rainbow, String::from("greedy stalled"), log),
                        art,
                    )
                }
            }
        }
    };
    debug_assert_eq!(verify_rainbow(&sys, &path), Ok(()));
    art.path = path.vertices.iter().map(|&i| vertices[i]).collect();

    match assemble(c, kb, field, &vertices, &extracted, &path) {
        Ok(z) => {
            let tuple = SolutionTuple {
                entries: perm.restore(&z),
                coeffs: eq.coeffs().to_vec(),
            };
            if tuple.verify(field, set, SolutionMode::Distinct) {
                log.push(String::from("assembly: solution verified"));
                (Outcome::Found(tuple), art)
            } else {
                (
                    fail(
                        Stage::Assembly,
                        String::from("assembled tuple failed verification"),
                        log,
                    ),
                    art,
                )
            }
        }
        Err(msg) => (fail(Stage::Assembly, msg, log), art),
    }
}

/// Reads `z_1, …, z_k` (reordered variables) off the path, checking the
/// three partial identities and the provenance of each entry.
fn assemble(
    c: &[i64],
    kb: usize,
    field: PrimeField,
    vertices: &[u64],
    extracted: &[SolutionTuple],
    path: &RainbowPath,
) -> Result<Vec<u64>, String> {
    let k = c.len();
    let v: Vec<u64> = path.vertices.iter().map(|&i| vertices[i]).collect();
    let start = &extracted[path.first()];
    let end = &extracted[path.last()];
    let mut z = vec![0u64; k];
    z[..kb - 1].copy_from_slice(&start.entries[..kb - 1]);
    for j in kb..k {
        let step = j - kb;
        let inv = field
            .inv(field.reduce(c[j]))
            .ok_or_else(|| format!("coefficient of x{} not invertible", j + 1))?;
        z[j] = field.mul(inv, field.sub(v[step + 1], v[step]));
        if z[j] != path.colors[step] {
            return Err(format!(
                "step {} difference does not match its colour",
                step + 1
            ));
        }
    }
    let ck_inv = field
        .inv(field.reduce(c[kb - 1]))
        .ok_or_else(|| String::from("block coefficient not invertible"))?;
    let v_last = *v.last().unwrap();
    z[kb - 1] = field.mul(ck_inv, field.neg(v_last));

    if weighted_sum(field, &c[..kb - 1], &z[..kb - 1]) != v[0] {
        return Err(String::from("block prefix does not sum to the path start"));
    }
    if weighted_sum(field, &c[kb..], &z[kb..]) != field.sub(v_last, v[0]) {
        return Err(String::from(
            "path steps do not sum to the path displacement",
        ));
    }
    if field.scale(c[kb - 1], z[kb - 1]) != field.neg(v_last) {
        return Err(String::from(
            "last block variable does not cancel the path end",
        ));
    }
    if !start.entries.iter().take(kb - 1).eq(z[..kb - 1].iter()) {
        return Err(String::from(
            "prefix entries not taken from the starting solution",
        ));
    }
    if end.entries[kb - 1] != z[kb - 1] {
        return Err(String::from(
            "last block variable not taken from the ending solution",
        ));
    }
    let mut sorted = z.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(String::from("entries are not pairwise distinct"));
    }
    Ok(z)
}

/// The two quantitative conditions on `A`: `|A| > 100^{k+1} k³ εp` and
/// `α(Cay(A)) ≤ εp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypothesisCheck {
    pub size_ok: bool,
    pub alpha_ok: bool,
}

impl HypothesisCheck {
    pub fn holds(&self) -> bool {
        self.size_ok && self.alpha_ok
    }
}

/// Exact test of `|A| > 100^{k+1} k³ · εp`.
pub fn size_condition(set_size: usize, k: usize, eps: Rational, p: u64) -> bool {
    let mut rhs: Option<u128> = Some((k * k * k) as u128);
    for _ in 0..=k {
        rhs = rhs.and_then(|r| r.checked_mul(100));
    }
    let rhs = rhs
        .and_then(|r| r.checked_mul(eps.num() as u128))
        .and_then(|r| r.checked_mul(p as u128));
    match rhs {
        Some(r) => (set_size as u128)
            .checked_mul(eps.den() as u128)
            .is_some_and(|l| l > r),
        None => false,
    }
}

/// Exact test of `α(Cay(A)) ≤ εp`; 0 contributes no edges.
pub fn alpha_condition(
    set: &ResidueSet,
    field: PrimeField,
    eps: Rational,
    budget: AlphaBudget,
) -> Result<bool, WitnessError> {
    let p = field.p();
    if eps.at_least_one() {
        return Ok(true);
    }
    let gens = set.nonzero();
    if gens.is_empty() {
        return Ok(eps.admits(p, p));
    }
    let g = build_cayley(field, &gens).expect("nonzero residues");
    let a = alpha_certified(&g, budget);
    if eps.admits(a.upper, p) {
        Ok(true)
    } else if !eps.admits(a.lower, p) {
        Ok(false)
    } else {
        Err(WitnessError::AlphaUndecided {
            lower: a.lower,
            upper: a.upper,
        })
    }
}

pub fn hypothesis_conditions(
    set: &ResidueSet,
    eq: &Equation,
    field: PrimeField,
    eps: Rational,
) -> Result<HypothesisCheck, WitnessError> {
    Ok(HypothesisCheck {
        size_ok: size_condition(set.len(), eq.arity(), eps, field.p()),
        alpha_ok: alpha_condition(set, field, eps, AlphaBudget::default())?,
    })
}

/// Whether both conditions hold, i.e. a distinct-entry solution is promised.
/// The α test is skipped when the size test already fails.
pub fn solution_promised(
    set: &ResidueSet,
    eq: &Equation,
    field: PrimeField,
    eps: Rational,
) -> Result<bool, WitnessError> {
    if !size_condition(set.len(), eq.arity(), eps, field.p()) {
        return Ok(false);
    }
    alpha_condition(set, field, eps, AlphaBudget::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn schur_on_punctured_field() {
        let a = ResidueSet::from_residues(23, 1..23).unwrap();
        let r =
            find_solution_via_rainbow(&a, &Equation::schur(), f(23), &PipelineConfig::default())
                .unwrap();
        let t = r.solution().expect("found");
        assert!(t.verify(f(23), &a, SolutionMode::Distinct));
        assert_eq!(r.artifacts.block_size, 2);
    }

    #[test]
    fn longer_equation_uses_path() {
        let eq = Equation::new(vec![2, 3, -2, 5, 1]).unwrap();
        let a = ResidueSet::from_residues(101, 1..101).unwrap();
        let r = find_solution_via_rainbow(&a, &eq, f(101), &PipelineConfig::default()).unwrap();
        let t = r.solution().expect("found");
        assert!(t.verify(f(101), &a, SolutionMode::Distinct));
        assert_eq!(r.artifacts.path.len(), 4);
    }

    #[test]
    fn whole_equation_zero_sum_delegates() {
        let eq = Equation::new(vec![1, 1, -2]).unwrap();
        let a = ResidueSet::from_residues(11, [1, 2, 3]).unwrap();
        let r = find_solution_via_rainbow(&a, &eq, f(11), &PipelineConfig::default()).unwrap();
        assert_eq!(r.solution().unwrap().entries, vec![1, 3, 2]);
        let a = ResidueSet::from_residues(11, [1, 2, 4]).unwrap();
        let r = find_solution_via_rainbow(&a, &eq, f(11), &PipelineConfig::default()).unwrap();
        assert!(matches!(
            r.outcome,
            Outcome::HypothesisFailed {
                stage: Stage::DirectSearch,
                ..
            }
        ));
    }

    #[test]
    fn rejects_nondegenerate() {
        let eq = Equation::new(vec![1, 1, 1]).unwrap();
        let a = ResidueSet::full(7);
        assert!(matches!(
            find_solution_via_rainbow(&a, &eq, f(7), &PipelineConfig::default()),
            Err(WitnessError::NotDegenerate(_))
        ));
    }

    #[test]
    fn solution_free_input_never_found() {
        // Odd residues below p/2 contain no Schur triple with entries that
        // sum without wrap-around; verify with the oracle, then run.
        let p = 101;
        let a = ResidueSet::from_residues(p, (1..50).step_by(2)).unwrap();
        assert!(find_distinct_solution(&a, &Equation::schur(), f(p))
            .unwrap()
            .is_none());
        let r = find_solution_via_rainbow(&a, &Equation::schur(), f(p), &PipelineConfig::default())
            .unwrap();
        assert!(r.solution().is_none());
    }

    #[test]
    fn hypothesis_boundaries() {
        // |A| = 100^{k+1} k³ εp exactly fails the strict inequality.
        let eps = Rational::new(1, 27_000_000 * 101).unwrap();
        assert!(!size_condition(100, 3, eps, 101));
        assert!(size_condition(101, 3, eps, 101));
        let one = Rational::integer(1);
        let a = ResidueSet::from_residues(101, [1]).unwrap();
        assert!(alpha_condition(&a, f(101), one, AlphaBudget::default()).unwrap());
        let half = Rational::new(1, 2).unwrap();
        assert!(alpha_condition(&a, f(101), half, AlphaBudget::default()).unwrap());
        let below = Rational::new(49, 101).unwrap();
        assert!(!alpha_condition(&a, f(101), below, AlphaBudget::default()).unwrap());
    }

    #[test]
    fn quota_formula() {
        let eps = Rational::new(1, 100).unwrap();
        assert_eq!(full_quota(3, eps, 101), 9 * 1_000_000 * 101 / 100);
        assert_eq!(full_quota(24, Rational::integer(1), 1_000_003), usize::MAX);
    }
}
