//! Linear-size solution-free sets for non-degenerate equations: residues
//! `≡ 1 (mod t)` below `p/(2Ct)` together with differences of powers of
//! `t` below `√p`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    alpha_of_set, verify_solution_free, ConstructError, ConstructionKind, ConstructionReport,
    Parameters, SizeCheck, CONSTRUCTION_ALPHA_BUDGET,
};
use crate::cayley::{build_cayley, clique_lower};
use crate::eqspec::{classify, Equation, EquationKind};
use crate::field::{PrimeField, Rational};
use crate::residues::ResidueSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonDegenerateParams {
    /// `C = ∑ |c_i|`.
    pub coefficient_mass: u64,
    pub t: u64,
    /// `β = 1/(2Ct)`.
    pub beta: Rational,
    /// Largest `z` with `t^{2z} ≤ p`.
    pub top_exponent: u32,
    /// `{rt + 1 : 0 ≤ r ≤ p/(2Ct)}`.
    pub progression: Vec<u64>,
    /// `{t^z - t^w : 1 ≤ w < z ≤ top_exponent}`.
    pub power_differences: Vec<u64>,
    /// `{t^i : 1 ≤ i ≤ top_exponent}`, a clique of the Cayley graph.
    pub clique_seed: Vec<u64>,
}

/// Largest `z` with `t^{2z} ≤ p`.
fn top_exponent(t: u64, p: u64) -> u32 {
    let mut z = 0;
    let mut sq: u128 = 1;
    let step = (t as u128) * (t as u128);
    while sq * step <= p as u128 {
        sq *= step;
        z += 1;
    }
    z
}

/// Builds `A = X ∪ Y` for a non-degenerate equation; `t` defaults to `C + 1`.
///
/// The integers of `X ∪ Y` all lie below `p / C`, which is checked, so any
/// solution modulo `p` would be a solution over the integers.
pub fn construct_nondegenerate(
    eq: &Equation,
    field: PrimeField,
    t: Option<u64>,
    seed: u64,
) -> Result<ConstructionReport, ConstructError> {
    if classify(eq).kind == EquationKind::Degenerate {
        return Err(ConstructError::Degenerate(eq.clone()));
    }
    let p = field.p();
    let mass = eq.abs_sum();
    let t = t.unwrap_or(mass + 1);
    if t <= mass {
        return Err(ConstructError::ParameterError(format!(
            "t = {t} must exceed the coefficient mass {mass}"
        )));
    }
    let two_ct = 2u128 * mass as u128 * t as u128;
    let r_max = (p as u128 / two_ct) as u64;
    let progression: Vec<u64> = (0..=r_max).map(|r| r * t + 1).collect();
    let z_top = top_exponent(t, p);
    let powers: Vec<u64> = (1..=z_top).map(|i| t.pow(i)).collect();
    let mut power_differences: Vec<u64> = Vec::new();
    for (zi, &tz) in powers.iter().enumerate() {
        for &tw in &powers[..zi] {
            power_differences.push(tz - tw);
        }
    }
    power_differences.sort_unstable();

    let largest = progression
        .iter()
        .chain(&power_differences)
        .copied()
        .max()
        .unwrap_or(0);
    if mass as u128 * largest as u128 >= p as u128 {
        return Err(ConstructError::FieldTooSmall {
            p,
            requirement: format!("C * max(X ∪ Y) = {mass} * {largest} < p"),
        });
    }

    let set = ResidueSet::from_residues(p, progression.iter().chain(&power_differences).copied())
        .expect("elements below p");
    let beta = Rational::new(1, two_ct as u64).expect("nonzero");
    let size = SizeCheck::new(
        format!("|A| >= p/(2Ct), 2Ct = {two_ct}"),
        Rational::new(p, two_ct as u64).expect("nonzero"),
        set.len(),
    );
    let solution_free = verify_solution_free(&set, eq, field, seed)?;

    let mut notes = Vec::new();
    let graph = build_cayley(field, &set.nonzero()).expect("nonzero residues");
    let clique = clique_lower(&graph, Some(&powers)).map_err(|e| {
        ConstructError::ParameterError(format!("powers of t do not form a clique: {e}"))
    })?;
    let seed_bound = p / powers.len().max(1) as u64;
    notes.push(format!(
        "powers of {t} form a clique of size {}, so alpha <= {seed_bound}",
        powers.len()
    ));
    if clique.members.len() > powers.len() {
        notes.push(format!(
            "greedy extension reached clique size {}",
            clique.members.len()
        ));
    }
    let mut alpha = alpha_of_set(&set, field, CONSTRUCTION_ALPHA_BUDGET);
    if clique.alpha_upper < alpha.upper {
        alpha.upper = clique.alpha_upper;
        alpha.method = crate::cayley::AlphaMethod::Clique;
    }
    if !solution_free.passed {
        notes.push(String::from(
            "solution found: preconditions are not sufficient here",
        ));
    }

    Ok(ConstructionReport {
        kind: ConstructionKind::NonDegenerate,
        equation: eq.clone(),
        p,
        set,
        params: Parameters::NonDegenerate(NonDegenerateParams {
            coefficient_mass: mass,
            t,
            beta,
            top_exponent: z_top,
            progression,
            power_differences,
            clique_seed: powers,
        }),
        solution_free,
        alpha,
        size,
        clique: Some(clique),
        notes,
    })
}
