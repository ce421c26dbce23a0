//! Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use solfree_core::cayley::{alpha_bounds, alpha_exact, build_cayley, AlphaBudget, AlphaError};
use solfree_core::constructs::{gen_high_girth, gen_triangle_free};
use solfree_core::eqspec::{classify, Equation};
use solfree_core::field::{PrimeField, Rational};
use solfree_core::rainbow::{
    find_rainbow_exhaustive, find_rainbow_greedy, verify_rainbow, EXHAUSTIVE_NODE_BUDGET,
};
use solfree_core::residues::ResidueSet;
use solfree_core::soloracle::{count_solutions_all_exact, count_solutions_distinct};
use solfree_core::witness::{find_solution_via_rainbow, PipelineConfig};

use crate::config::{Construction, ExperimentConfig, Mode, Task};
use crate::experiment::{run_experiment, RunSummary};
use crate::formats::{format_graph, parse_instance, parse_residues, read_text, write_atomic};
use crate::AppError;

#[derive(Debug, Parser)]
#[command(
    name = "solfree",
    version,
    about = "Solution-free sets over prime fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Degenerate or non-degenerate, with a zero-sum index set.
    Classify {
        /// `x1 + x2 - x3 = 0` or `1,1,-1`.
        equation: Equation,
    },
    /// Independence number of the Cayley graph of a generator set.
    Alpha {
        #[arg(long)]
        p: u64,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        gens: Vec<i64>,
        /// Branch and bound only; fail if the budget runs out.
        #[arg(long, conflicts_with = "bounds")]
        exact: bool,
        /// Greedy, ratio and clique bounds without search.
        #[arg(long)]
        bounds: bool,
    },
    /// Number of solutions inside a set.
    Count {
        #[arg(long)]
        p: u64,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        gens: Vec<i64>,
        #[arg(long = "eq")]
        equation: Equation,
        /// Count only tuples with pairwise-distinct entries.
        #[arg(long)]
        distinct: bool,
    },
    /// Look for a solution in a set through the rainbow-path pipeline.
    Witness {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        set_file: PathBuf,
        #[arg(long = "eq")]
        equation: Equation,
        #[arg(long)]
        eps: Option<Rational>,
        /// Cap the extraction quota (the default).
        #[arg(long, conflicts_with = "strict")]
        relaxed: bool,
        /// Demand the full extraction quota.
        #[arg(long)]
        strict: bool,
    },
    /// Build one of the solution-free constructions.
    Construct(ConstructArgs),
    /// Tabulate the largest solution-free density over a grid.
    Density(DensityArgs),
    /// Rainbow path in a restricted system.
    Rainbow {
        #[arg(long)]
        instance_file: PathBuf,
        #[arg(long)]
        length: usize,
        /// Complete search instead of the greedy.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Run an experiment config.
    Run {
        config: PathBuf,
        /// Overrides `out` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random sparse graph for the schur and poly constructions.
    GenGraph {
        kind: GraphKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        girth: usize,
        #[arg(long, default_value_t = 10)]
        attempts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphKind {
    TriangleFree,
    HighGirth,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstructionArg {
    Nondeg,
    Schur,
    Poly,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    kind: ConstructionArg,
    /// One or more primes.
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<u64>,
    /// Required for nondeg and poly; schur fixes `x1 + x2 - x3 = 0`.
    #[arg(long = "eq")]
    equation: Option<Equation>,
    #[arg(long)]
    eps: Option<Rational>,
    #[arg(long)]
    graph_file: Option<PathBuf>,
    #[arg(long)]
    t: Option<Rational>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Heuristic,
}

#[derive(Debug, Args)]
struct DensityArgs {
    #[arg(long = "eq")]
    equation: Equation,
    #[arg(long, value_delimiter = ',', required = true)]
    primes: Vec<u64>,
    #[arg(long, value_delimiter = ',', required = true)]
    eps_grid: Vec<Rational>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    iterations: Option<u64>,
    /// Keep 0 out of the searched sets.
    #[arg(long)]
    exclude_zero: bool,
    #[arg(long)]
    out: PathBuf,
}

/// Parses `args` (program name first), runs, and reports errors on stderr.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    match dispatch(cli.command, &mut stdout.lock()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn field(p: u64) -> Result<PrimeField, AppError> {
    PrimeField::new(p).map_err(|e| AppError::Usage(format!("--p: {e}")))
}

fn residues(p: u64, values: &[i64]) -> ResidueSet {
    ResidueSet::from_integers(p, values.iter().copied())
}

fn write_out(out: &mut dyn Write, text: impl std::fmt::Display) -> Result<(), AppError> {
    writeln!(out, "{text}").map_err(|e| AppError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    })
}

fn print_summary(out: &mut dyn Write, s: &RunSummary) -> Result<u8, AppError> {
    for d in &s.details {
        write_out(out, d.trim_end())?;
    }
    let mut line = format!("rows={} failed={}", s.rows, s.failed);
    if let Some(m) = s.monotone {
        line.push_str(&format!(" monotone={m}"));
    }
    line.push_str(&format!(" csv={}", s.csv.display()));
    write_out(out, line)?;
    Ok(if s.ok() { 0 } else { 1 })
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<u8, AppError> {
    match cmd {
        Command::Classify { equation } => {
            write_out(out, classify(&equation))?;
            Ok(0)
        }
        Command::Alpha {
            p,
            gens,
            exact,
            bounds,
        } => {
            let f = field(p)?;
            let g = build_cayley(f, &residues(p, &gens).nonzero()).map_err(AppError::domain)?;
            let r = if bounds {
                alpha_bounds(&g)
            } else {
                match alpha_exact(&g, AlphaBudget::default()) {
                    Ok(r) => r,
                    Err(AlphaError::BudgetExhausted(r)) if !exact => r,
                    Err(e) => return Err(AppError::domain(e)),
                }
            };
            match r.value() {
                Some(v) => write_out(out, format_args!("alpha={v} method={}", r.method))?,
                None => write_out(
                    out,
                    format_args!("alpha in [{}, {}] method={}", r.lower, r.upper, r.method),
                )?,
            }
            Ok(0)
        }
        Command::Count {
            p,
            gens,
            equation,
            distinct,
        } => {
            let f = field(p)?;
            let set = residues(p, &gens);
            if distinct {
                let n = count_solutions_distinct(&set, &equation, f).map_err(AppError::domain)?;
                write_out(out, format_args!("count={n} mode=distinct"))?;
            } else {
                let n = count_solutions_all_exact(&set, &equation, f).map_err(AppError::domain)?;
                write_out(out, format_args!("count={n} mode=all"))?;
            }
            Ok(0)
        }
        Command::Witness {
            p,
            set_file,
            equation,
            eps,
            strict,
            ..
        } => {
            let f = field(p)?;
            let set = parse_residues(&read_text(&set_file)?, p, &set_file.display().to_string())?;
            let cfg = PipelineConfig {
                eps,
                relaxed: !strict,
                ..PipelineConfig::default()
            };
            let report =
                find_solution_via_rainbow(&set, &equation, f, &cfg).map_err(AppError::domain)?;
            write_out(out, report.to_string().trim_end())?;
            Ok(0)
        }
        Command::Construct(a) => construct(a, out),
        Command::Density(a) => {
            let cfg = ExperimentConfig {
                task: Task::Density,
                equation: a.equation,
                primes: a.primes,
                eps: a.eps_grid,
                mode: match a.mode {
                    ModeArg::Exact => Mode::Exact,
                    ModeArg::Heuristic => Mode::Heuristic,
                },
                construction: None,
                graph: None,
                t: None,
                seed: a.seed,
                relaxed: true,
                include_zero: !a.exclude_zero,
                iterations: a.iterations,
                density: None,
                out: a.out,
            };
            cfg.validate().map_err(usage_from)?;
            print_summary(out, &run_experiment(&cfg)?)
        }
        Command::Rainbow {
            instance_file,
            length,
            exhaustive,
        } => {
            let sys = parse_instance(
                &read_text(&instance_file)?,
                &instance_file.display().to_string(),
            )?;
            let path = if exhaustive {
                find_rainbow_exhaustive(&sys, length, EXHAUSTIVE_NODE_BUDGET)
            } else {
                find_rainbow_greedy(&sys, length)
            }
            .map_err(AppError::domain)?;
            match path {
                Some(path) => {
                    verify_rainbow(&sys, &path).map_err(|v| {
                        AppError::Domain(format!("path failed verification: {v:?}"))
                    })?;
                    let mut s = format!("{}", path.vertices[0] + 1);
                    for (v, c) in path.vertices[1..].iter().zip(&path.colors) {
                        s.push_str(&format!(" -[{c}]-> {}", v + 1));
                    }
                    write_out(out, format_args!("path: {s}"))?;
                }
                None => write_out(out, "no rainbow path found")?,
            }
            Ok(0)
        }
        Command::Run {
            config,
            out: override_out,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(o) = override_out {
                cfg.out = o;
            }
            print_summary(out, &run_experiment(&cfg)?)
        }
        Command::GenGraph {
            kind,
            n,
            girth,
            attempts,
            seed,
            out: path,
        } => {
            let g = match kind {
                GraphKind::TriangleFree => gen_triangle_free(n, attempts, seed),
                GraphKind::HighGirth if girth < 3 => {
                    return Err(AppError::Usage(String::from("--girth must be at least 3")))
                }
                GraphKind::HighGirth => gen_high_girth(n, girth, attempts, seed),
            };
            write_atomic(&path, format_graph(&g.graph).as_bytes())?;
            let alpha = match g.alpha() {
                Some(a) => a.to_string(),
                None => format!("[{}, {}]", g.alpha_lower, g.alpha_upper),
            };
            write_out(
                out,
                format_args!(
                    "n={} edges={} girth={} alpha={alpha}",
                    g.graph.order(),
                    g.graph.edges().len(),
                    g.graph
                        .girth()
                        .map_or("none".to_string(), |c| c.to_string())
                ),
            )?;
            Ok(0)
        }
    }
}

fn usage_from(e: AppError) -> AppError {
    match e {
        AppError::Domain(m) => AppError::Usage(m),
        other => other,
    }
}

fn construct(a: ConstructArgs, out: &mut dyn Write) -> Result<u8, AppError> {
    let construction = match a.kind {
        ConstructionArg::Nondeg => Construction::Nondeg,
        ConstructionArg::Schur => Construction::Schur,
        ConstructionArg::Poly => Construction::Poly,
    };
    let equation = match (construction, a.equation) {
        (Construction::Schur, None) => Equation::schur(),
        (Construction::Schur, Some(eq)) if eq != Equation::schur() => {
            return Err(AppError::Usage(format!(
                "--eq: schur only supports {}",
                Equation::schur()
            )))
        }
        (_, Some(eq)) => eq,
        (_, None) => return Err(AppError::Usage(String::from("--eq is required"))),
    };
    if construction == Construction::Schur && a.eps.is_none() {
        return Err(AppError::Usage(String::from("--eps is required for schur")));
    }
    let cfg = ExperimentConfig {
        task: Task::Construct,
        equation,
        primes: a.p,
        eps: a.eps.into_iter().collect(),
        mode: Mode::Exact,
        construction: Some(construction),
        graph: a.graph_file,
        t: a.t,
        seed: a.seed,
        relaxed: true,
        include_zero: true,
        iterations: None,
        density: None,
        out: a.out,
    };
    cfg.validate().map_err(usage_from)?;
    print_summary(out, &run_experiment(&cfg)?)
}
