//! Finding, counting, and extracting solutions of `∑ c_i x_i ≡ 0 (mod p)`
//! inside a residue set.
//!
//! The search routines work on raw coefficient slices so that sub-equations
//! (which may have fewer than three variables) share the same code.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::eqspec::Equation;
use crate::field::PrimeField;
use crate::residues::ResidueSet;

/// Arity limit for distinct counting; the partition lattice of `[8]` has
/// 4140 elements.
pub const MAX_DISTINCT_COUNT_ARITY: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("coefficient of x{} vanishes modulo {p}", .index + 1)]
    CoefficientVanishes { index: usize, p: u64 },
    #[error("character sum not resolved to an integer (residual {residual})")]
    NumericalResolution { residual: f64 },
    #[error("distinct counting supports at most {MAX_DISTINCT_COUNT_ARITY} variables, got {0}")]
    ArityTooLarge(usize),
}

/// Whether solutions must use pairwise-distinct entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SolutionMode {
    #[default]
    Distinct,
    AllowRepeats,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SolutionTuple {
    pub entries: Vec<u64>,
    pub coeffs: Vec<i64>,
}

impl SolutionTuple {
    /// `∑ c_i a_i ≡ 0 (mod p)`.
    pub fn satisfies(&self, field: PrimeField) -> bool {
        self.entries.len() == self.coeffs.len()
            && weighted_sum(field, &self.coeffs, &self.entries) == 0
    }

    pub fn is_distinct(&self) -> bool {
        let mut e = self.entries.clone();
        e.sort_unstable();
        e.windows(2).all(|w| w[0] != w[1])
    }

    /// Satisfies the equation, all entries lie in `set`, and distinctness
    /// holds when `mode` requires it.
    pub fn verify(&self, field: PrimeField, set: &ResidueSet, mode: SolutionMode) -> bool {
        self.satisfies(field)
            && self.entries.iter().all(|&a| set.contains(a))
            && (mode == SolutionMode::AllowRepeats || self.is_distinct())
    }
}

pub(crate) fn weighted_sum(field: PrimeField, coeffs: &[i64], entries: &[u64]) -> u64 {
    coeffs
        .iter()
        .zip(entries)
        .fold(0, |acc, (&c, &a)| field.add(acc, field.scale(c, a)))
}

fn check_coefficients(coeffs: &[i64], field: PrimeField) -> Result<Vec<u64>, OracleError> {
    coeffs
        .iter()
        .enumerate()
        .map(|(index, &c)| match field.reduce(c) {
            0 => Err(OracleError::CoefficientVanishes {
                index,
                p: field.p(),
            }),
            r => Ok(r),
        })
        .collect()
}

struct Search<'a> {
    field: PrimeField,
    set: &'a ResidueSet,
    /// Coefficients reduced mod p, in search order.
    coeffs: Vec<u64>,
    /// `order[j]` is the original variable searched at depth `j`.
    order: Vec<usize>,
    /// Depth `j` must not go below depth `j - 1` (equal coefficients).
    tied: Vec<bool>,
    distinct: bool,
    /// Depth whose value is forced, if any.
    fixed: Option<(usize, u64)>,
    last_inv: u64,
    values: Vec<u64>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize, partial: u64) -> bool {
        let k = self.coeffs.len();
        if depth + 1 == k {
            let last = self.field.mul(self.field.neg(partial), self.last_inv);
            return self.admit(depth, last) && {
                self.values[depth] = last;
                true
            };
        }
        if let Some((d, v)) = self.fixed {
            if d == depth {
                if !self.admit(depth, v) {
                    return false;
                }
                self.values[depth] = v;
                let next = self
                    .field
                    .add(partial, self.field.mul(self.coeffs[depth], v));
                return self.run(depth + 1, next);
            }
        }
        let start = if self.tied[depth] {
            self.set
                .as_slice()
                .partition_point(|&a| a < self.values[depth - 1])
        } else {
            0
        };
        for idx in start..self.set.len() {
            let a = self.set.as_slice()[idx];
            if !self.admit(depth, a) {
                continue;
            }
            self.values[depth] = a;
            let next = self
                .field
                .add(partial, self.field.mul(self.coeffs[depth], a));
            if self.run(depth + 1, next) {
                return true;
            }
        }
        false
    }

    fn admit(&self, depth: usize, a: u64) -> bool {
        if !self.set.contains(a) {
            return false;
        }
        if self.tied[depth] {
            let prev = self.values[depth - 1];
            if a < prev || (self.distinct && a == prev) {
                return false;
            }
        }
        if let Some((d, v)) = self.fixed {
            if d == depth && a != v {
                return false;
            }
        }
        !self.distinct || !self.values[..depth].contains(&a)
    }
}

fn search(
    set: &ResidueSet,
    coeffs: &[i64],
    field: PrimeField,
    mode: SolutionMode,
    containing: Option<u64>,
) -> Result<Option<SolutionTuple>, OracleError> {
    let reduced = check_coefficients(coeffs, field)?;
    let k = coeffs.len();
    if k == 0 || set.is_empty() {
        return Ok(None);
    }
    if let Some(x) = containing {
        if !set.contains(x) {
            return Ok(None);
        }
    }
    // Descending |c_i|, equal coefficients adjacent so ties can be ordered.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| (core::cmp::Reverse(coeffs[i].unsigned_abs()), coeffs[i], i));
    let candidates: Vec<Option<usize>> = match containing {
        None => vec![None],
        Some(_) => {
            // Pin x to the first variable of each tie group; the other
            // members of that group are interchangeable with it.
            let mut seen = Vec::new();
            let mut out = Vec::new();
            for (depth, &i) in order.iter().enumerate() {
                if !seen.contains(&coeffs[i]) {
                    seen.push(coeffs[i]);
                    out.push(Some(depth));
                }
            }
            out
        }
    };
    for fixed_depth in candidates {
        let fixed = fixed_depth.map(|d| (d, containing.unwrap()));
        // With x pinned, equal-coefficient partners of the pinned variable may
        // sit below x, so ties are only enforced among the unpinned ones.
        let tied: Vec<bool> = (0..k)
            .map(|j| {
                j > 0
                    && coeffs[order[j]] == coeffs[order[j - 1]]
                    && fixed.is_none_or(|(d, _)| j - 1 != d)
            })
            .collect();
        let mut s = Search {
            field,
            set,
            coeffs: order.iter().map(|&i| reduced[i]).collect(),
            order: order.clone(),
            tied,
            distinct: mode == SolutionMode::Distinct,
            fixed,
            last_inv: field
                .inv(reduced[order[k - 1]])
                .expect("nonzero coefficient"),
            values: vec![0; k],
        };
        if s.run(0, 0) {
            let mut entries = vec![0; k];
            for (depth, &var) in s.order.iter().enumerate() {
                entries[var] = s.values[depth];
            }
            let tuple = SolutionTuple {
                entries,
                coeffs: coeffs.to_vec(),
            };
            assert!(
                tuple.verify(field, set, mode),
                "search produced an invalid tuple"
            );
            return Ok(Some(tuple));
        }
    }
    Ok(None)
}

/// A solution with pairwise-distinct entries from `set`, or `None` when the
/// set is solution-free.
pub fn find_distinct_solution(
    set: &ResidueSet,
    eq: &Equation,
    field: PrimeField,
) -> Result<Option<SolutionTuple>, OracleError> {
    search(set, eq.coeffs(), field, SolutionMode::Distinct, None)
}

/// Like [`find_distinct_solution`] with a selectable distinctness mode.
pub fn find_solution(
    set: &ResidueSet,
    eq: &Equation,
    field: PrimeField,
    mode: SolutionMode,
) -> Result<Option<SolutionTuple>, OracleError> {
    search(set, eq.coeffs(), field, mode, None)
}

/// A solution in `set` that uses `x` as one of its entries. Adding `x` to a
/// solution-free set keeps it solution-free iff this returns `None`.
pub fn find_solution_containing(
    set: &ResidueSet,
    eq: &Equation,
    field: PrimeField,
    mode: SolutionMode,
    x: u64,
) -> Result<Option<SolutionTuple>, OracleError> {
    search(set, eq.coeffs(), field, mode, Some(x))
}

/// Search over an arbitrary coefficient slice (used for sub-equations).
pub fn find_solution_for(
    set: &ResidueSet,
    coeffs: &[i64],
    field: PrimeField,
    mode: SolutionMode,
) -> Result<Option<SolutionTuple>, OracleError> {
    search(set, coeffs, field, mode, None)
}

#[derive(Clone, Copy)]
struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    fn mul(self, o: Complex) -> Complex {
        Complex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

/// Number of tuples in `set^k` (repeats allowed) solving the equation, via
/// `(1/p) ∑_t ∏_i Â(c_i t)` in floating point. Fails if the result is not
/// within 0.25 of an integer; [`count_solutions_all_exact`] always succeeds.
pub fn count_solutions_all(
    set: &ResidueSet,
    eq: &Equation,
    field: PrimeField,
) -> Result<u128, OracleError> {
    let reduced = check_coefficients(eq.coeffs(), field)?;
    let p = field.p();
    let roots: Vec<Complex> = (0..p)
        .map(|m| {
            let theta = 2.0 * PI * m as f64 / p as f64;
            Complex {
                re: libm::cos(theta),
                im: libm::sin(theta),
            }
        })
        .collect();
    let transform: Vec<Complex> = (0..p)
        .map(|t| {
            set.iter().fold(Complex { re: 0.0, im: 0.0 }, |acc, a| {
                let w = roots[field.mul(t, a) as usize];
                Complex {
                    re: acc.re + w.re,
                    im: acc.im + w.im,
                }
            })
        })
        .collect();
    let mut total = Complex { re: 0.0, im: 0.0 };
    for t in 0..p {
        let term = reduced
            .iter()
            .fold(Complex { re: 1.0, im: 0.0 }, |acc, &c| {
                acc.mul(transform[field.mul(c, t) as usize])
            });
        total.re += term.re;
        total.im += term.im;
    }
    let value = total.re / p as f64;
    let rounded = libm::round(value);
    let residual = libm::fabs(value - rounded) + libm::fabs(total.im / p as f64);
    if residual >= 0.25 || rounded < 0.0 || !rounded.is_finite() {
        return Err(OracleError::NumericalResolution { residual });
    }
    Ok(rounded as u128)
}

/// Exact count of solutions in `set^k` (repeats allowed) by iterated
/// convolution of the distribution of partial sums.
pub fn count_solutions_all_exact(
    set: &ResidueSet,
    eq: &Equation,
    field: PrimeField,
) -> Result<u128, OracleError> {
    let reduced = check_coefficients(eq.coeffs(), field)?;
    Ok(convolution_count(set, &reduced, field, 0))
}

/// Tuples over `set` with `∑ c_i a_i ≡ target`.
fn convolution_count(set: &ResidueSet, reduced: &[u64], field: PrimeField, target: u64) -> u128 {
    let p = field.p() as usize;
    let mut dist = vec![0u128; p];
    dist[0] = 1;
    for &c in reduced {
        let mut next = vec![0u128; p];
        let shifts: Vec<usize> = set.iter().map(|a| field.mul(c, a) as usize).collect();
        for (s, &n) in dist.iter().enumerate() {
            if n == 0 {
                continue;
            }
            for &d in &shifts {
                let t = if s + d >= p { s + d - p } else { s + d };
                next[t] += n;
            }
        }
        dist = next;
    }
    dist[target as usize]
}

/// Number of solutions with pairwise-distinct entries from `set`, by Möbius
/// inversion over the partition lattice: a partition contributes
/// `∏_B (-1)^{|B|-1}(|B|-1)!` times the number of solutions that are
/// constant on its blocks.
pub fn count_solutions_distinct(
    set: &ResidueSet,
    eq: &Equation,
    field: PrimeField,
) -> Result<i128, OracleError> {
    let k = eq.arity();
    if k > MAX_DISTINCT_COUNT_ARITY {
        return Err(OracleError::ArityTooLarge(k));
    }
    check_coefficients(eq.coeffs(), field)?;
    let mut total: i128 = 0;
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for_each_partition(k, 0, &mut blocks, &mut |blocks| {
        let mut mobius: i128 = 1;
        let mut merged = Vec::new();
        let mut free = 0u32;
        for b in blocks {
            let size = b.len() as i128;
            let factorial: i128 = (1..size).product();
            mobius *= if size % 2 == 1 { factorial } else { -factorial };
            let c: i128 = b.iter().map(|&i| eq.coeffs()[i] as i128).sum();
            match field.reduce_i128(c) {
                0 => free += 1,
                r => merged.push(r),
            }
        }
        let constrained = convolution_count(set, &merged, field, 0) as i128;
        total += mobius * constrained * (set.len() as i128).pow(free);
    });
    Ok(total)
}

fn for_each_partition(
    k: usize,
    next: usize,
    blocks: &mut Vec<Vec<usize>>,
    visit: &mut dyn FnMut(&[Vec<usize>]),
) {
    if next == k {
        visit(blocks);
        return;
    }
    for b in 0..blocks.len() {
        blocks[b].push(next);
        for_each_partition(k, next + 1, blocks, visit);
        blocks[b].pop();
    }
    blocks.push(vec![next]);
    for_each_partition(k, next + 1, blocks, visit);
    blocks.pop();
}

/// Repeatedly finds a solution of the sub-equation `coeffs` in what remains
/// of `set` and deletes its entries, until `quota` solutions are found or
/// none remain. For two variables with `c_1 = -c_2`, every `(a, a)` is a
/// solution and the pairs are emitted in ascending `a`. Entries of different
/// solutions are disjoint.
pub fn extract_disjoint_solutions(
    set: &ResidueSet,
    coeffs: &[i64],
    field: PrimeField,
    quota: usize,
) -> Result<Vec<SolutionTuple>, OracleError> {
    let reduced = check_coefficients(coeffs, field)?;
    let mut out = Vec::new();
    if quota == 0 {
        return Ok(out);
    }
    if reduced.len() == 2 && field.add(reduced[0], reduced[1]) == 0 {
        for a in set.iter().take(quota) {
            out.push(SolutionTuple {
                entries: vec![a, a],
                coeffs: coeffs.to_vec(),
            });
        }
        return Ok(out);
    }
    let mut residual = set.clone();
    while out.len() < quota {
        let Some(tuple) = search(&residual, coeffs, field, SolutionMode::Distinct, None)? else {
            break;
        };
        for &a in &tuple.entries {
            residual.remove(a);
        }
        out.push(tuple);
    }
    Ok(out)
}
