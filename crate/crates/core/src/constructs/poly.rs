//! Solution-free sets for equations whose coefficients do not sum to zero:
//! differences `r^j - r^l` over the edges of a high-girth graph, plus the
//! multiples of a prime `r′` near `p/(2r)`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::{
    alpha_of_set, verify_solution_free, ConstructError, ConstructionKind, ConstructionReport,
    Parameters, SizeCheck, SparseGraph, CONSTRUCTION_ALPHA_BUDGET,
};
use crate::cayley::AlphaMethod;
use crate::eqspec::Equation;
use crate::field::{is_prime, next_prime, PrimeField, Rational};
use crate::residues::ResidueSet;

/// Largest signed-sum set enumerated when choosing `r′`.
pub const SIGMA_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyLowerParams {
    /// Smallest prime in `(kM, 2kM]`.
    pub r: u64,
    /// Smallest prime dividing no nonzero signed sum.
    pub r_prime: u64,
    /// `X` ascending.
    pub differences: Vec<u64>,
    /// Size of `{±x_1 ± … ± x_m : m ≤ r} ∖ {0}`.
    pub sigma_size: usize,
    /// Integer range `[⌈p(2r-1)/(4r²)⌉, ⌊p(2r+1)/(4r²)⌋]`.
    pub interval: (u64, u64),
    /// Multiples of `r′` in the interval.
    pub multiples: Vec<u64>,
}

/// Smallest prime in `(lo, 2lo]`.
fn prime_above(lo: u64) -> u64 {
    let r = next_prime(lo + 1);
    debug_assert!(r <= 2 * lo.max(1) && is_prime(r));
    r
}

/// Nonzero values `±x_1 ± … ± x_m` with `1 ≤ m ≤ terms`, repetition allowed.
fn signed_sums(xs: &[u64], terms: u64, cap: usize) -> Result<BTreeSet<i128>, ConstructError> {
    let mut all: BTreeSet<i128> = BTreeSet::new();
    let mut level: BTreeSet<i128> = BTreeSet::from([0]);
    for _ in 0..terms {
        let mut next = BTreeSet::new();
        for &s in &level {
            for &x in xs {
                next.insert(s + x as i128);
                next.insert(s - x as i128);
            }
        }
        for &v in &next {
            all.insert(v);
        }
        if all.len() > cap + 1 {
            return Err(ConstructError::SigmaTooLarge(cap));
        }
        level = next;
    }
    all.remove(&0);
    Ok(all)
}

fn smallest_nondividing_prime(values: &BTreeSet<i128>) -> u64 {
    let mut r = 2;
    loop {
        if values.iter().all(|&v| v % r as i128 != 0) {
            return r;
        }
        r = next_prime(r + 1);
    }
}

/// Builds `A = X ∪ Y` for `eq` (coefficients not summing to zero) from `g`,
/// whose vertex `v` stands for the power `r^{v+1}`; `g` must have no cycle of
/// length at most `k + 1`.
///
/// `p` must satisfy `4r · ∑|c_i| · max(X) < p`, which keeps every combination
/// of elements of `X` below `p/(4r)` in absolute value.
pub fn construct_poly_lower(
    eq: &Equation,
    field: PrimeField,
    g: &SparseGraph,
    seed: u64,
) -> Result<ConstructionReport, ConstructError> {
    if eq.coefficient_sum() == 0 {
        return Err(ConstructError::ZeroCoefficientSum(eq.clone()));
    }
    let k = eq.arity();
    let forbidden = k + 1;
    if let Some(cycle) = g.girth().filter(|&c| c <= forbidden) {
        return Err(ConstructError::GirthTooSmall { cycle, forbidden });
    }
    let p = field.p();
    let m = eq.max_abs();
    let r = prime_above(k as u64 * m);
    let mut differences = Vec::new();
    for &(l, j) in g.edges() {
        let hi = (r as u128).checked_pow(j as u32 + 1);
        let lo = (r as u128).checked_pow(l as u32 + 1);
        match (hi, lo) {
            (Some(h), Some(l)) if h - l < p as u128 => differences.push((h - l) as u64),
            _ => {
                return Err(ConstructError::FieldTooSmall {
                    p,
                    requirement: format!("r^{} below p", j + 1),
                })
            }
        }
    }
    differences.sort_unstable();
    differences.dedup();
    let mass = eq.abs_sum() as u128;
    let largest = differences.last().copied().unwrap_or(0) as u128;
    if 4 * r as u128 * mass * largest >= p as u128 {
        return Err(ConstructError::FieldTooSmall {
            p,
            requirement: format!("4r * C * max(X) = 4*{r}*{mass}*{largest} < p"),
        });
    }

    let sigma = signed_sums(&differences, r, SIGMA_CAP)?;
    let r_prime = smallest_nondividing_prime(&sigma);
    let four_r2 = 4 * r as u128 * r as u128;
    let lo = (p as u128 * (2 * r as u128 - 1)).div_ceil(four_r2) as u64;
    let hi = (p as u128 * (2 * r as u128 + 1) / four_r2) as u64;
    let multiples: Vec<u64> = (lo.div_ceil(r_prime)..=hi / r_prime)
        .map(|i| i * r_prime)
        .filter(|&y| y > 0)
        .collect();
    if multiples.is_empty() {
        return Err(ConstructError::IntervalEmpty {
            lo,
            hi,
            modulus: r_prime,
        });
    }

    let set = ResidueSet::from_residues(p, differences.iter().chain(&multiples).copied())
        .expect("elements below p");
    let solution_free = verify_solution_free(&set, eq, field, seed)?;
    let denom = four_r2 as u64 * r_prime;
    let size = SizeCheck::new(
        format!("|Y| >= p/(4r²r′), 4r²r′ = {denom}"),
        Rational::new(p, denom).expect("nonzero"),
        multiples.len(),
    );
    let budget = CONSTRUCTION_ALPHA_BUDGET;
    let x_set = ResidueSet::from_residues(p, differences.iter().copied()).expect("below p");
    let alpha_x = alpha_of_set(&x_set, field, budget);
    let mut alpha = alpha_of_set(&set, field, budget);
    if alpha_x.upper < alpha.upper {
        alpha.upper = alpha_x.upper;
        alpha.method = AlphaMethod::Inherited;
    }
    let notes = Vec::from([format!(
        "r = {r}, r' = {r_prime}, |X_sigma| = {}, alpha(Cay(X)) <= {}",
        sigma.len(),
        alpha_x.upper
    )]);

    Ok(ConstructionReport {
        kind: ConstructionKind::PolyLower,
        equation: eq.clone(),
        p,
        set,
        params: Parameters::PolyLower(PolyLowerParams {
            r,
            r_prime,
            differences,
            sigma_size: sigma.len(),
            interval: (lo, hi),
            multiples,
        }),
        solution_free,
        alpha,
        size,
        clique: None,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn params(r: &ConstructionReport) -> &PolyLowerParams {
        match &r.params {
            Parameters::PolyLower(x) => x,
            _ => unreachable!(),
        }
    }

    #[test]
    fn single_edge() {
        let eq = Equation::new(vec![1, 1, 1]).unwrap();
        let g = SparseGraph::new(2, [(0, 1)]).unwrap();
        let f = PrimeField::new(3001).unwrap();
        let rep = construct_poly_lower(&eq, f, &g, 0).unwrap();
        let x = params(&rep);
        assert_eq!(x.r, 5);
        assert_eq!(x.differences, vec![20]);
        assert_eq!(x.sigma_size, 10);
        assert_eq!(x.r_prime, 7);
        assert!(x.multiples.iter().all(|y| y % 7 == 0));
        assert!(rep.verified());
    }

    #[test]
    fn signed_sum_oracle() {
        let s = signed_sums(&[20], 5, 100).unwrap();
        let expected: BTreeSet<i128> = [-100, -80, -60, -40, -20, 20, 40, 60, 80, 100].into();
        assert_eq!(s, expected);
        assert_eq!(
            signed_sums(&[1, 3, 9, 27], 5, 10),
            Err(ConstructError::SigmaTooLarge(10))
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        let eq = Equation::new(vec![1, 1, 1]).unwrap();
        let f = PrimeField::new(100_003).unwrap();
        assert!(matches!(
            construct_poly_lower(&eq, f, &SparseGraph::cycle(4), 0),
            Err(ConstructError::GirthTooSmall {
                cycle: 4,
                forbidden: 4
            })
        ));
        assert!(matches!(
            construct_poly_lower(
                &Equation::new(vec![1, 1, -2]).unwrap(),
                f,
                &SparseGraph::path(2),
                0
            ),
            Err(ConstructError::ZeroCoefficientSum(_))
        ));
        let small = PrimeField::new(1009).unwrap();
        assert!(matches!(
            construct_poly_lower(&eq, small, &SparseGraph::path(2), 0),
            Err(ConstructError::FieldTooSmall { .. })
        ));
    }
}
