//! Homogeneous linear equations `c_1 x_1 + … + c_k x_k = 0`: parsing,
//! validation, and classification by zero-sum coefficient subsets.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

/// Largest arity accepted; subset search is exhaustive over `2^k - 1` subsets.
pub const MAX_ARITY: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquationError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("equation needs at least 3 variables, got {0}")]
    Arity(usize),
    #[error("equation has {0} variables, more than the supported {MAX_ARITY}")]
    TooManyVariables(usize),
    #[error("coefficient of x{} is zero", .0 + 1)]
    ZeroCoefficient(usize),
    #[error("invalid witness subset: {0}")]
    InvalidWitness(String),
}

/// An equation `∑ c_i x_i = 0` with `k ≥ 3` nonzero integer coefficients,
/// kept in variable-index order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    coeffs: Vec<i64>,
}

impl Equation {
    pub fn new(coeffs: Vec<i64>) -> Result<Self, EquationError> {
        if coeffs.len() < 3 {
            return Err(EquationError::Arity(coeffs.len()));
        }
        if coeffs.len() > MAX_ARITY {
            return Err(EquationError::TooManyVariables(coeffs.len()));
        }
        if let Some(i) = coeffs.iter().position(|&c| c == 0) {
            return Err(EquationError::ZeroCoefficient(i));
        }
        Ok(Self { coeffs })
    }

    /// Schur's equation `x1 + x2 - x3 = 0`.
    pub fn schur() -> Self {
        Self {
            coeffs: alloc::vec![1, 1, -1],
        }
    }

    #[inline]
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    /// `∑ |c_i|`.
    pub fn abs_sum(&self) -> u64 {
        self.coeffs.iter().map(|c| c.unsigned_abs()).sum()
    }

    /// `max |c_i|`.
    pub fn max_abs(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn coefficient_sum(&self) -> i128 {
        self.coeffs.iter().map(|&c| c as i128).sum()
    }

    /// Human-readable form, e.g. `x1 + x2 - x3 = 0`.
    pub fn expression(&self) -> String {
        use core::fmt::Write;
        let mut out = String::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            let mag = c.unsigned_abs();
            if i == 0 {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            if mag != 1 {
                let _ = write!(out, "{mag}");
            }
            let _ = write!(out, "x{}", i + 1);
        }
        out.push_str(" = 0");
        out
    }
}

impl fmt::Display for Equation {
    /// Canonical serialized form: the comma-separated coefficient list.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Equation {
    type Err = EquationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_equation(s)
    }
}

fn syntax(pos: usize, message: &str) -> EquationError {
    EquationError::Syntax {
        pos,
        message: String::from(message),
    }
}

/// Parses either `3x1 - 2x2 + x3 = 0` (terms in any order, each variable
/// exactly once, indices `1..=k`) or the compact list form `3,-2,1`.
pub fn parse_equation(text: &str) -> Result<Equation, EquationError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(syntax(0, "empty equation"));
    }
    if !trimmed.contains(['x', 'X', '=']) {
        return parse_compact(trimmed);
    }
    let (lhs, rhs) = trimmed
        .split_once('=')
        .ok_or_else(|| syntax(trimmed.len(), "missing '= 0'"))?;
    if rhs.trim() != "0" {
        return Err(syntax(lhs.len() + 1, "right-hand side must be 0"));
    }
    let terms = parse_terms(lhs)?;
    let k = terms.len();
    let mut coeffs = alloc::vec![0i64; k];
    let mut seen = alloc::vec![false; k];
    for (pos, index, c) in terms {
        if index == 0 || index > k {
            return Err(syntax(
                pos,
                "variable indices must be exactly x1..xk with no gaps",
            ));
        }
        if seen[index - 1] {
            return Err(syntax(pos, "variable appears more than once"));
        }
        seen[index - 1] = true;
        coeffs[index - 1] = c;
    }
    Equation::new(coeffs)
}

fn parse_compact(text: &str) -> Result<Equation, EquationError> {
    let mut coeffs = Vec::new();
    let mut offset = 0;
    for part in text.split(',') {
        let c: i64 = part
            .trim()
            .parse()
            .map_err(|_| syntax(offset, "expected an integer coefficient"))?;
        coeffs.push(c);
        offset += part.len() + 1;
    }
    Equation::new(coeffs)
}

/// Returns `(byte offset, variable index, coefficient)` per term.
fn parse_terms(lhs: &str) -> Result<Vec<(usize, usize, i64)>, EquationError> {
    let bytes = lhs.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let skip_ws = |i: &mut usize| {
        while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip_ws(&mut i);
        if i >= bytes.len() {
            break;
        }
        let start = i;
        let mut negative = false;
        match bytes[i] {
            b'+' => i += 1,
            b'-' => {
                negative = true;
                i += 1;
            }
            _ if !out.is_empty() => return Err(syntax(i, "expected '+' or '-' between terms")),
            _ => {}
        }
        skip_ws(&mut i);
        let digits_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let magnitude: i64 = if i > digits_start {
            lhs[digits_start..i]
                .parse()
                .map_err(|_| syntax(digits_start, "coefficient out of range"))?
        } else {
            1
        };
        skip_ws(&mut i);
        if i < bytes.len() && bytes[i] == b'*' {
            i += 1;
            skip_ws(&mut i);
        }
        if i >= bytes.len() || !(bytes[i] == b'x' || bytes[i] == b'X') {
            return Err(syntax(i, "expected a variable x<index>"));
        }
        i += 1;
        let idx_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == idx_start {
            return Err(syntax(idx_start, "variable needs a numeric index"));
        }
        let index: usize = lhs[idx_start..i]
            .parse()
            .map_err(|_| syntax(idx_start, "variable index out of range"))?;
        let c = if negative { -magnitude } else { magnitude };
        out.push((start, index, c));
    }
    if out.is_empty() {
        return Err(syntax(0, "no terms before '='"));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquationKind {
    Degenerate,
    NonDegenerate,
}

impl fmt::Display for EquationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquationKind::Degenerate => "degenerate",
            EquationKind::NonDegenerate => "non-degenerate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub kind: EquationKind,
    /// Zero-sum index subset (0-based, ascending) when degenerate.
    pub witness: Option<Vec<usize>>,
    /// `∑ c_i = 0`.
    pub translation_invariant: bool,
}

impl fmt::Display for Classification {
    /// `degenerate S={1,3}` (1-based indices) or `non-degenerate`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(s) = &self.witness {
            f.write_str(" S={")?;
            for (i, idx) in s.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", idx + 1)?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// Visits index subsets of `0..k` ordered by cardinality, then
/// lexicographically; stops early when `visit` returns `true`.
pub(crate) fn for_each_subset_by_size<F>(k: usize, mut visit: F)
where
    F: FnMut(&[usize]) -> bool,
{
    for size in 1..=k {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            if visit(&comb) {
                return;
            }
            let mut i = size;
            while i > 0 && comb[i - 1] == k - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            comb[i - 1] += 1;
            for j in i..size {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
}

fn subset_sum(coeffs: &[i64], subset: &[usize]) -> i128 {
    subset.iter().map(|&i| coeffs[i] as i128).sum()
}

/// Degenerate iff some nonempty `S ⊆ [k]` has `∑_{s∈S} c_s = 0`. The witness
/// is the lexicographically smallest among minimum-cardinality zero-sum subsets.
pub fn classify(eq: &Equation) -> Classification {
    let mut witness = None;
    for_each_subset_by_size(eq.arity(), |s| {
        if subset_sum(eq.coeffs(), s) == 0 {
            witness = Some(s.to_vec());
            true
        } else {
            false
        }
    });
    Classification {
        kind: if witness.is_some() {
            EquationKind::Degenerate
        } else {
            EquationKind::NonDegenerate
        },
        witness,
        translation_invariant: eq.coefficient_sum() == 0,
    }
}

/// All zero-sum subsets in (cardinality, lexicographic) order.
pub fn zero_sum_subsets(eq: &Equation) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_subset_by_size(eq.arity(), |s| {
        if subset_sum(eq.coeffs(), s) == 0 {
            out.push(s.to_vec());
        }
        false
    });
    out
}

/// Maps positions of a reordered equation back to the original variables:
/// `new_to_old[j]` is the original index of new variable `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    new_to_old: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Self {
            new_to_old: (0..k).collect(),
        }
    }

    pub fn new_to_old(&self) -> &[usize] {
        &self.new_to_old
    }

    pub fn is_identity(&self) -> bool {
        self.new_to_old.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Rearranges a tuple in the new variable order into the original order.
    pub fn restore<T: Copy + Default>(&self, reordered: &[T]) -> Vec<T> {
        let mut out = alloc::vec![T::default(); reordered.len()];
        for (new, &old) in self.new_to_old.iter().enumerate() {
            out[old] = reordered[new];
        }
        out
    }

    /// Rearranges a tuple in original order into the new variable order.
    pub fn apply<T: Copy>(&self, original: &[T]) -> Vec<T> {
        self.new_to_old.iter().map(|&old| original[old]).collect()
    }
}

/// Moves the coefficients indexed by `subset` (ascending) to the front,
/// followed by the rest in original order.
pub fn reorder_for_witness(
    eq: &Equation,
    subset: &[usize],
) -> Result<(Equation, Permutation), EquationError> {
    let k = eq.arity();
    if subset.is_empty() {
        return Err(EquationError::InvalidWitness(String::from("empty subset")));
    }
    let mut chosen = alloc::vec![false; k];
    for &i in subset {
        if i >= k {
            return Err(EquationError::InvalidWitness(alloc::format!(
                "index {} out of range",
                i + 1
            )));
        }
        if chosen[i] {
            return Err(EquationError::InvalidWitness(alloc::format!(
                "index {} repeated",
                i + 1
            )));
        }
        chosen[i] = true;
    }
    if subset_sum(eq.coeffs(), subset) != 0 {
        return Err(EquationError::InvalidWitness(String::from(
            "coefficients over the subset do not sum to zero",
        )));
    }
    let mut front: Vec<usize> = subset.to_vec();
    front.sort_unstable();
    let new_to_old: Vec<usize> = front
        .into_iter()
        .chain((0..k).filter(|&i| !chosen[i]))
        .collect();
    let coeffs = new_to_old.iter().map(|&i| eq.coeffs()[i]).collect();
    Ok((Equation { coeffs }, Permutation { new_to_old }))
}
