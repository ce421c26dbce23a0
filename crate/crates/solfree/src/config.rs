//! Experiment configuration, read from TOML:
//!
//! ```toml
//! task = "density"           # density | construct | witness
//! equation = "1,1,-1"
//! primes = [5, 7, 11]        # or: prime_range = { start = 1000, count = 3 }
//! eps = [0.2, "1/3", 1]
//! mode = "exact"             # density only: exact | heuristic
//! seed = 7
//! out = "d.csv"              # relative to the config file
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use solfree_core::eqspec::Equation;
use solfree_core::field::{is_prime, next_prime, Rational};

use crate::formats::read_text;
use crate::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Density,
    Construct,
    Witness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Nondeg,
    Schur,
    Poly,
}

/// The first `count` primes at or above `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeRange {
    pub start: u64,
    pub count: usize,
}

/// A number or a string such as `"1/3"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum RationalText {
    Integer(u64),
    Float(f64),
    Text(String),
}

impl RationalText {
    fn to_rational(&self) -> Result<Rational, String> {
        let text = match self {
            RationalText::Integer(n) => n.to_string(),
            RationalText::Float(x) => x.to_string(),
            RationalText::Text(s) => s.clone(),
        };
        text.parse().map_err(|e| format!("{e}"))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    task: Task,
    equation: Option<String>,
    primes: Option<Vec<u64>>,
    prime_range: Option<PrimeRange>,
    #[serde(default)]
    eps: Vec<RationalText>,
    #[serde(default)]
    mode: Mode,
    construction: Option<Construction>,
    graph: Option<PathBuf>,
    t: Option<RationalText>,
    #[serde(default)]
    seed: u64,
    #[serde(default = "yes")]
    relaxed: bool,
    #[serde(default = "yes")]
    include_zero: bool,
    iterations: Option<u64>,
    density: Option<RationalText>,
    out: PathBuf,
}

fn yes() -> bool {
    true
}

/// A validated experiment: every prime checked, every rational parsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub task: Task,
    pub equation: Equation,
    pub primes: Vec<u64>,
    pub eps: Vec<Rational>,
    pub mode: Mode,
    pub construction: Option<Construction>,
    /// Input graph for `schur` and `poly`.
    pub graph: Option<PathBuf>,
    pub t: Option<Rational>,
    pub seed: u64,
    /// Relaxed extraction quota in the witness pipeline.
    pub relaxed: bool,
    pub include_zero: bool,
    pub iterations: Option<u64>,
    /// Fraction of `F_p` sampled as the input set of a witness run.
    pub density: Option<Rational>,
    pub out: PathBuf,
}

fn invalid(message: impl Into<String>) -> AppError {
    AppError::Domain(format!("invalid config: {}", message.into()))
}

impl ExperimentConfig {
    /// Parses and validates; relative paths are resolved against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, AppError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        let equation_text = raw.equation.ok_or_else(|| invalid("missing `equation`"))?;
        let equation: Equation = equation_text
            .parse()
            .map_err(|e| invalid(format!("equation: {e}")))?;
        let primes = match (raw.primes, raw.prime_range) {
            (Some(_), Some(_)) => return Err(invalid("give `primes` or `prime_range`, not both")),
            (None, None) => return Err(invalid("missing `primes`")),
            (Some(list), None) => list,
            (None, Some(r)) => prime_range(r),
        };
        let rational = |name: &str, v: &RationalText| {
            v.to_rational().map_err(|e| invalid(format!("{name}: {e}")))
        };
        let eps = raw
            .eps
            .iter()
            .map(|v| rational("eps", v))
            .collect::<Result<Vec<_>, _>>()?;
        let cfg = ExperimentConfig {
            task: raw.task,
            equation,
            primes,
            eps,
            mode: raw.mode,
            construction: raw.construction,
            graph: raw.graph.map(|g| base.join(g)),
            t: raw.t.as_ref().map(|v| rational("t", v)).transpose()?,
            seed: raw.seed,
            relaxed: raw.relaxed,
            include_zero: raw.include_zero,
            iterations: raw.iterations,
            density: raw
                .density
                .as_ref()
                .map(|v| rational("density", v))
                .transpose()?,
            out: base.join(raw.out),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = read_text(path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_toml(&text, base)
    }

    pub fn validate(&self) -> Result<(), AppError> {
        if self.primes.is_empty() {
            return Err(invalid("no primes"));
        }
        if let Some(&p) = self.primes.iter().find(|&&p| !is_prime(p)) {
            return Err(invalid(format!("p = {p} is not prime")));
        }
        let eps_needed = match self.task {
            Task::Density | Task::Witness => true,
            Task::Construct => self.construction == Some(Construction::Schur),
        };
        if eps_needed && self.eps.is_empty() {
            return Err(invalid("`eps` is empty"));
        }
        match self.task {
            Task::Construct if self.construction.is_none() => {
                Err(invalid("construct needs `construction`"))
            }
            Task::Witness
                if self
                    .density
                    .is_none_or(|d| d.is_zero() || d > Rational::integer(1)) =>
            {
                Err(invalid("witness needs `density` in (0, 1]"))
            }
            _ => Ok(()),
        }
    }
}

fn prime_range(r: PrimeRange) -> Vec<u64> {
    let mut out = Vec::with_capacity(r.count);
    let mut p = if is_prime(r.start) {
        r.start
    } else {
        next_prime(r.start)
    };
    while out.len() < r.count {
        out.push(p);
        p = next_prime(p);
    }
    out
}
