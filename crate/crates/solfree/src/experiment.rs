//! Runs a validated config over its `(p, ε)` grid in parallel and writes
//! the CSV and its provenance sidecar.

use std::path::PathBuf;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use solfree_core::constructs::{
    construct_nondegenerate, construct_poly_lower, construct_schur_lower, ConstructError,
    ConstructionReport, SchurOptions, SparseGraph,
};
use solfree_core::denssearch::{
    evaluate_point, monotonicity_violations, point_seed, DensityMode, DensityRow, ExactOptions,
    HeuristicOptions,
};
use solfree_core::field::{PrimeField, Rational};
use solfree_core::residues::ResidueSet;
use solfree_core::soloracle::SolutionMode;
use solfree_core::witness::{find_solution_via_rainbow, Outcome, PipelineConfig, WitnessReport};

use crate::config::{Construction, ExperimentConfig, Mode, Task};
use crate::formats::{
    construction_record, csv_bytes, density_record, format_residues, parse_graph, read_text,
    sidecar_path, write_atomic, CONSTRUCTION_HEADER, DENSITY_HEADER,
};
use crate::AppError;

pub const WITNESS_HEADER: [&str; 9] = [
    "eq",
    "p",
    "eps",
    "size",
    "outcome",
    "stage",
    "solution",
    "hypothesis",
    "extracted",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSummary {
    pub csv: PathBuf,
    pub sidecar: PathBuf,
    pub rows: usize,
    pub failed: usize,
    /// Density runs only.
    pub monotone: Option<bool>,
    /// Human-readable report per row, in row order.
    pub details: Vec<String>,
}

impl RunSummary {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Serialize)]
struct Provenance {
    tool: &'static str,
    version: &'static str,
    task: Task,
    equation: String,
    primes: Vec<u64>,
    eps: Vec<String>,
    mode: Mode,
    construction: Option<Construction>,
    graph: Option<String>,
    t: Option<String>,
    seed: u64,
    relaxed: bool,
    include_zero: bool,
    iterations: Option<u64>,
    density: Option<String>,
    rows: usize,
    failed: usize,
    monotone: Option<bool>,
    wall_seconds: f64,
    row_seconds: Vec<f64>,
}

struct Evaluated {
    record: Vec<String>,
    failed: bool,
    detail: String,
    seconds: f64,
}

fn timed<F: FnOnce() -> (Vec<String>, bool, String)>(f: F) -> Evaluated {
    let start = Instant::now();
    let (record, failed, detail) = f();
    Evaluated {
        record,
        failed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn grid(cfg: &ExperimentConfig) -> Vec<(u64, Option<Rational>)> {
    let uses_eps = match cfg.task {
        Task::Construct => cfg.construction == Some(Construction::Schur),
        _ => true,
    };
    cfg.primes
        .iter()
        .flat_map(|&p| {
            let eps: Vec<Option<Rational>> = if uses_eps {
                cfg.eps.iter().copied().map(Some).collect()
            } else {
                vec![None]
            };
            eps.into_iter().map(move |e| (p, e))
        })
        .collect()
}

fn field(p: u64) -> PrimeField {
    PrimeField::new(p).expect("primes are validated")
}

fn density_mode(cfg: &ExperimentConfig) -> DensityMode {
    match cfg.mode {
        Mode::Exact => DensityMode::Exact(ExactOptions {
            include_zero: cfg.include_zero,
        }),
        Mode::Heuristic => {
            let mut o = HeuristicOptions {
                seed: cfg.seed,
                include_zero: cfg.include_zero,
                ..HeuristicOptions::default()
            };
            if let Some(it) = cfg.iterations {
                o.iterations = it;
            }
            DensityMode::Heuristic(o)
        }
    }
}

fn input_graph(cfg: &ExperimentConfig, kind: Construction) -> Result<SparseGraph, AppError> {
    match (&cfg.graph, kind) {
        (Some(path), _) => parse_graph(&read_text(path)?, &path.display().to_string()),
        (None, Construction::Schur) => Ok(SparseGraph::cycle(5)),
        (None, _) => Ok(SparseGraph::path(2)),
    }
}

fn construct_one(
    cfg: &ExperimentConfig,
    kind: Construction,
    graph: &SparseGraph,
    p: u64,
    eps: Option<Rational>,
) -> Result<ConstructionReport, ConstructError> {
    let f = field(p);
    let seed = point_seed(cfg.seed, p, eps.unwrap_or(Rational::integer(0)));
    match kind {
        Construction::Nondeg => {
            let t = match cfg.t {
                None => None,
                Some(t) if t.den() == 1 => Some(t.num()),
                Some(t) => {
                    return Err(ConstructError::ParameterError(format!(
                        "t = {t} is not an integer"
                    )))
                }
            };
            construct_nondegenerate(&cfg.equation, f, t, seed)
        }
        Construction::Schur => {
            let opts = SchurOptions {
                t: cfg.t,
                seed,
                ..SchurOptions::default()
            };
            construct_schur_lower(f, eps.expect("schur rows carry eps"), graph, opts)
        }
        Construction::Poly => construct_poly_lower(&cfg.equation, f, graph, seed),
    }
}

fn failed_construction(
    kind: Construction,
    cfg: &ExperimentConfig,
    p: u64,
    eps: &str,
    e: &ConstructError,
) -> Vec<String> {
    let mut r = vec![String::new(); CONSTRUCTION_HEADER.len()];
    r[0] = format!("{kind:?}").to_lowercase();
    r[1] = cfg.equation.to_string();
    r[2] = p.to_string();
    r[3] = eps.to_string();
    r[9] = format!("failed: {e}");
    r
}

fn random_set(p: u64, density: Rational, seed: u64) -> ResidueSet {
    let size = (density.ceil_times(p) as usize).min(p as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = sample(&mut rng, p as usize, size)
        .into_iter()
        .map(|i| i as u64);
    ResidueSet::from_residues(p, picked).expect("indices are below p")
}

fn witness_record(
    cfg: &ExperimentConfig,
    p: u64,
    eps: Rational,
    report: &WitnessReport,
) -> Vec<String> {
    let (outcome, stage, solution) = match &report.outcome {
        Outcome::Found(t) => {
            let s: Vec<String> = t.entries.iter().map(u64::to_string).collect();
            ("found".to_string(), String::new(), s.join(" "))
        }
        Outcome::HypothesisFailed { stage, .. } => (
            "hypothesis-failed".to_string(),
            stage.to_string(),
            String::new(),
        ),
    };
    let hypothesis = match report.artifacts.hypothesis_met {
        Some(true) => "met",
        Some(false) => "not-met",
        None => "unknown",
    };
    vec![
        cfg.equation.to_string(),
        p.to_string(),
        eps.to_string(),
        report.set_size.to_string(),
        outcome,
        stage,
        solution,
        hypothesis.to_string(),
        report.artifacts.extracted.to_string(),
    ]
}

fn witness_one(cfg: &ExperimentConfig, p: u64, eps: Rational) -> (Vec<String>, bool, String) {
    let f = field(p);
    let density = cfg.density.expect("validated");
    let set = random_set(p, density, point_seed(cfg.seed, p, eps));
    let pipeline = PipelineConfig {
        eps: Some(eps),
        relaxed: cfg.relaxed,
        ..PipelineConfig::default()
    };
    match find_solution_via_rainbow(&set, &cfg.equation, f, &pipeline) {
        Ok(report) => {
            let bogus = report
                .solution()
                .is_some_and(|t| !t.verify(f, &set, SolutionMode::Distinct));
            if bogus {
                let mut r = witness_record(cfg, p, eps, &report);
                r[4] = "failed: solution did not re-verify".to_string();
                r[6].clear();
                return (r, true, report.to_string());
            }
            (
                witness_record(cfg, p, eps, &report),
                false,
                report.to_string(),
            )
        }
        Err(e) => {
            let mut r = vec![String::new(); WITNESS_HEADER.len()];
            r[0] = cfg.equation.to_string();
            r[1] = p.to_string();
            r[2] = eps.to_string();
            r[3] = set.len().to_string();
            r[4] = format!("failed: {e}");
            (r, true, e.to_string())
        }
    }
}

/// Evaluates every grid point; row order follows `primes` then `eps`
/// regardless of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary, AppError> {
    cfg.validate()?;
    let start = Instant::now();
    let points = grid(cfg);
    let mut monotone = None;
    let (header, evaluated): (&[&str], Vec<Evaluated>) = match cfg.task {
        Task::Density => {
            let mode = density_mode(cfg);
            let eq_text = cfg.equation.to_string();
            let timed_rows: Vec<(DensityRow, f64)> = points
                .par_iter()
                .map(|&(p, eps)| {
                    let eps = eps.expect("density rows carry eps");
                    let t = Instant::now();
                    let result = evaluate_point(&cfg.equation, field(p), eps, &mode);
                    (DensityRow { p, eps, result }, t.elapsed().as_secs_f64())
                })
                .collect();
            let rows: Vec<DensityRow> = timed_rows.iter().map(|(r, _)| r.clone()).collect();
            let violations = monotonicity_violations(&rows);
            monotone = Some(violations.is_empty());
            let evaluated = timed_rows
                .into_iter()
                .map(|(row, seconds)| {
                    let detail = match &row.result {
                        Ok(pt) => format!(
                            "p={} eps={} D={} ({}) witness: {}",
                            row.p,
                            row.eps,
                            pt.value,
                            pt.kind,
                            format_residues(&pt.witness)
                        ),
                        Err(e) => format!("p={} eps={} failed: {e}", row.p, row.eps),
                    };
                    Evaluated {
                        record: density_record(&row, &eq_text),
                        failed: row.result.is_err(),
                        detail,
                        seconds,
                    }
                })
                .collect();
            (&DENSITY_HEADER, evaluated)
        }
        Task::Construct => {
            let kind = cfg.construction.expect("validated");
            let graph = input_graph(cfg, kind)?;
            let evaluated = points
                .par_iter()
                .map(|&(p, eps)| {
                    timed(|| {
                        let eps_text = eps.map(|e| e.to_string()).unwrap_or_default();
                        match construct_one(cfg, kind, &graph, p, eps) {
                            Ok(r) => (
                                construction_record(&r, &eps_text),
                                !r.verified(),
                                r.to_string(),
                            ),
                            Err(e) => (
                                failed_construction(kind, cfg, p, &eps_text, &e),
                                true,
                                format!("p={p}: {e}"),
                            ),
                        }
                    })
                })
                .collect();
            (&CONSTRUCTION_HEADER, evaluated)
        }
        Task::Witness => {
            let evaluated = points
                .par_iter()
                .map(|&(p, eps)| {
                    timed(|| witness_one(cfg, p, eps.expect("witness rows carry eps")))
                })
                .collect();
            (&WITNESS_HEADER, evaluated)
        }
    };
    let failed = evaluated.iter().filter(|e| e.failed).count();
    let row_seconds: Vec<f64> = evaluated.iter().map(|e| e.seconds).collect();
    let mut details = Vec::with_capacity(evaluated.len());
    let mut records = Vec::with_capacity(evaluated.len());
    for e in evaluated {
        details.push(e.detail);
        records.push(e.record);
    }
    let rows = records.len();
    write_atomic(&cfg.out, &csv_bytes(header, records)?)?;
    let provenance = Provenance {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        task: cfg.task,
        equation: cfg.equation.to_string(),
        primes: cfg.primes.clone(),
        eps: cfg.eps.iter().map(Rational::to_string).collect(),
        mode: cfg.mode,
        construction: cfg.construction,
        graph: cfg.graph.as_ref().map(|g| g.display().to_string()),
        t: cfg.t.map(|t| t.to_string()),
        seed: cfg.seed,
        relaxed: cfg.relaxed,
        include_zero: cfg.include_zero,
        iterations: cfg.iterations,
        density: cfg.density.map(|d| d.to_string()),
        rows,
        failed,
        monotone,
        wall_seconds: start.elapsed().as_secs_f64(),
        row_seconds,
    };
    let sidecar = sidecar_path(&cfg.out);
    let text = toml::to_string(&provenance).map_err(AppError::domain)?;
    write_atomic(&sidecar, text.as_bytes())?;
    Ok(RunSummary {
        csv: cfg.out.clone(),
        sidecar,
        rows,
        failed,
        monotone,
        details,
    })
}
