//! Command-line front end: `solve`, `gen` and `bench`.
//!
//! Everything here is reachable in-process through [`run`], which takes the
//! argument list and the two output streams and returns the exit code.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, ensure, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::formula::dimacs::read_dimacs;
use crate::formula::CnfFormula;
use crate::oracle::{generate_instance, InstanceSpec};
use crate::solver::{
    solve_population, write_trace_csv, InitMode, QuantizeReference, SolveOutcome, SolverConfig,
    Status, DEFAULT_SEED,
};

pub const EXIT_SATISFIABLE: i32 = 10;
pub const EXIT_UNKNOWN: i32 = 0;
pub const EXIT_ERROR: i32 = 1;

pub const BENCH_CSV_HEADER: &str = "instance,status,cycles,wall_time_ms,seed";

const LITERALS_PER_LINE: usize = 10;

#[derive(Debug, Parser)]
#[command(
    name = "qevo-sat",
    version,
    about = "Continuous-relaxation SAT search with quantization jumps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a DIMACS CNF file.
    Solve {
        path: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the event trace as CSV.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Generate random k-SAT instances as `inst_<i>.cnf`.
    Gen(GenArgs),
    /// Solve every `.cnf` file in a directory and print a CSV table.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Comma-separated seeds; each instance runs once per seed.
        /// Defaults to `--seed`.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        seeds: Vec<u64>,
        /// Worker threads (0: one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(Debug, Clone, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    mu: f64,
    /// Initial step [default: 1/mu]
    #[arg(long)]
    delta_init: Option<f64>,
    /// Step floor [default: mu^-2]
    #[arg(long)]
    delta_min: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    max_cycles: u64,
    #[arg(long, value_name = "N")]
    time_limit_ms: Option<u64>,
    #[arg(long, default_value_t = 1)]
    population: usize,
    /// Adopt the quantized solution even when it does not improve fitness.
    #[arg(long)]
    force_quantize: bool,
    #[arg(long, default_value = "binary", value_name = "binary|uniform")]
    init: InitMode,
    /// What a quantized solution has to beat.
    #[arg(long, default_value = "current", value_name = "current|cycle-start")]
    quantize_reference: QuantizeReference,
    /// Cap on flux attempts per gradual phase.
    #[arg(long, default_value_t = 64)]
    max_flux_attempts: u32,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let defaults = SolverConfig::with_mu(self.mu);
        SolverConfig {
            delta_init: self.delta_init.unwrap_or(defaults.delta_init),
            delta_min: self.delta_min.unwrap_or(defaults.delta_min),
            max_cycles: self.max_cycles,
            time_limit: self.time_limit_ms.map(Duration::from_millis),
            population_size: self.population,
            seed: self.seed,
            init: self.init,
            force_quantize: self.force_quantize,
            quantize_reference: self.quantize_reference,
            max_flux_attempts: self.max_flux_attempts,
            ..defaults
        }
    }
}

#[derive(Debug, Clone, Args)]
struct GenArgs {
    /// Number of variables.
    #[arg(short = 'n', long)]
    vars: usize,
    /// Number of clauses.
    #[arg(
        short = 'm',
        long,
        conflicts_with = "ratio",
        required_unless_present = "ratio"
    )]
    clauses: Option<usize>,
    /// Clause-to-variable ratio, as an alternative to `-m`.
    #[arg(long)]
    ratio: Option<f64>,
    /// Literals per clause.
    #[arg(short = 'k', long, default_value_t = 3)]
    width: usize,
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Instance `i` is generated from seed `seed + i`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Plant a hidden model so every instance is satisfiable.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    planted: bool,
    #[arg(short, long)]
    out: PathBuf,
}

/// One row of the bench table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub instance: String,
    pub status: Status,
    pub cycles_used: u64,
    pub wall_time_ms: u64,
    pub seed: u64,
}

impl RunReport {
    pub fn from_outcome(instance: &str, seed: u64, outcome: &SolveOutcome) -> Self {
        RunReport {
            instance: instance.to_string(),
            status: outcome.status,
            cycles_used: outcome.cycles_used,
            wall_time_ms: outcome.wall_time.as_millis() as u64,
            seed,
        }
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.instance, self.status, self.cycles_used, self.wall_time_ms, self.seed
        )
    }
}

/// Aggregate over a set of runs. Medians are taken over the satisfiable
/// runs only and are `None` when there are none.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub runs: usize,
    pub solved: usize,
    pub success_rate: f64,
    pub median_cycles: Option<f64>,
    pub median_wall_time_ms: Option<f64>,
}

impl BenchSummary {
    pub fn from_reports(reports: &[RunReport]) -> Self {
        let solved: Vec<&RunReport> = reports
            .iter()
            .filter(|r| r.status == Status::Satisfiable)
            .collect();
        let cycles: Vec<u64> = solved.iter().map(|r| r.cycles_used).collect();
        let wall: Vec<u64> = solved.iter().map(|r| r.wall_time_ms).collect();
        BenchSummary {
            runs: reports.len(),
            solved: solved.len(),
            success_rate: if reports.is_empty() {
                0.0
            } else {
                solved.len() as f64 / reports.len() as f64
            },
            median_cycles: median(&cycles),
            median_wall_time_ms: median(&wall),
        }
    }

    /// Summary line in the five bench columns.
    pub fn to_csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |v| v.to_string());
        format!(
            "summary,success_rate={},median_cycles={},median_wall_time_ms={},runs={}",
            self.success_rate,
            opt(self.median_cycles),
            opt(self.median_wall_time_ms),
            self.runs
        )
    }
}

pub fn median(values: &[u64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid] as f64
    } else {
        (v[mid - 1] as f64 + v[mid] as f64) / 2.0
    })
}

/// SAT-competition answer lines for an outcome, `s` line first.
pub fn format_answer(outcome: &SolveOutcome) -> String {
    let mut s = format!("s {}\n", outcome.status);
    if let Some(model) = &outcome.assignment {
        let lits: Vec<String> = model
            .to_dimacs_literals()
            .map(|l| l.to_string())
            .chain(std::iter::once("0".to_string()))
            .collect();
        for chunk in lits.chunks(LITERALS_PER_LINE) {
            s.push_str("v ");
            s.push_str(&chunk.join(" "));
            s.push('\n');
        }
    }
    s
}

/// Entry point for the binary: parses `args` (program name first) and
/// writes to the process's stdout and stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_ERROR
                }
            };
        }
    };
    let result = match cli.command {
        Command::Solve {
            path,
            solver,
            trace,
        } => cmd_solve(&path, &solver.config(), trace.as_deref(), out, err),
        Command::Gen(args) => cmd_gen(&args, err).map(|_| 0),
        Command::Bench {
            dir,
            solver,
            seeds,
            jobs,
        } => cmd_bench(&dir, &solver.config(), &seeds, jobs, out, err).map(|_| 0),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn load(path: &Path, err: &mut dyn Write) -> anyhow::Result<CnfFormula> {
    let file = fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let parsed = read_dimacs(io::BufReader::new(file))
        .with_context(|| format!("cannot parse {}", path.display()))?;
    for w in &parsed.warnings {
        writeln!(err, "c warning: {}: {w}", path.display())?;
    }
    Ok(parsed.formula)
}

fn cmd_solve(
    path: &Path,
    config: &SolverConfig,
    trace: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<i32> {
    let formula = load(path, err)?;
    let config = SolverConfig {
        record_trace: trace.is_some(),
        ..config.clone()
    };
    let outcome = solve_population(&formula, &config)?;
    if let Some(model) = &outcome.assignment {
        ensure!(
            formula.eval_boolean(model)?,
            "internal error: model does not satisfy the formula"
        );
    }
    if let (Some(path), Some(records)) = (trace, &outcome.trace) {
        let file =
            fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut w = BufWriter::new(file);
        write_trace_csv(&mut w, records)?;
        w.flush()?;
    }
    writeln!(
        err,
        "c cycles {} wall_time_ms {} best_satisfied {}/{}",
        outcome.cycles_used,
        outcome.wall_time.as_millis(),
        outcome.best_satisfied,
        formula.num_clauses()
    )?;
    out.write_all(format_answer(&outcome).as_bytes())?;
    out.flush()?;
    Ok(match outcome.status {
        Status::Satisfiable => EXIT_SATISFIABLE,
        Status::Unknown => EXIT_UNKNOWN,
    })
}

fn cmd_gen(args: &GenArgs, err: &mut dyn Write) -> anyhow::Result<()> {
    let num_clauses = match (args.clauses, args.ratio) {
        (Some(m), _) => m,
        (None, Some(r)) => {
            ensure!(
                r.is_finite() && r >= 0.0,
                "ratio must be a non-negative number, got {r}"
            );
            (r * args.vars as f64).round() as usize
        }
        (None, None) => bail!("either -m or --ratio is required"),
    };
    let base = InstanceSpec {
        num_variables: args.vars,
        num_clauses,
        clause_width: args.width,
        seed: args.seed,
        require_satisfiable: args.planted,
    };
    base.validate()?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    for i in 0..args.count {
        let spec = InstanceSpec {
            seed: args.seed.wrapping_add(i),
            ..base
        };
        let inst = generate_instance(&spec)?;
        let path = args.out.join(format!("inst_{i}.cnf"));
        let mut text = format!(
            "c random {}-SAT n={} m={} seed={} planted={}\n",
            spec.clause_width,
            spec.num_variables,
            spec.num_clauses,
            spec.seed,
            spec.require_satisfiable
        );
        text.push_str(&inst.formula.to_dimacs());
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    writeln!(
        err,
        "c wrote {} instances to {}",
        args.count,
        args.out.display()
    )?;
    Ok(())
}

/// Sort key that orders `inst_9` before `inst_10`.
fn natural_key(name: &str) -> Vec<(bool, String)> {
    let mut key = Vec::new();
    let mut chars = name.chars().peekable();
    while let Some(&c) = chars.peek() {
        let digit = c.is_ascii_digit();
        let mut run = String::new();
        while let Some(&c) = chars.peek() {
            if c.is_ascii_digit() != digit {
                break;
            }
            run.push(c);
            chars.next();
        }
        if digit {
            let trimmed = run.trim_start_matches('0');
            run = format!("{:0>20}", trimmed);
        }
        key.push((digit, run));
    }
    key
}

fn list_instances(dir: &Path) -> anyhow::Result<Vec<(String, PathBuf)>> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot read {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "cnf") {
            let name = path
                .file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            found.push((name, path));
        }
    }
    found.sort_by(|a, b| {
        natural_key(&a.0)
            .cmp(&natural_key(&b.0))
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(found)
}

fn cmd_bench(
    dir: &Path,
    config: &SolverConfig,
    seeds: &[u64],
    jobs: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<()> {
    config.validate()?;
    let instances = list_instances(dir)?;
    ensure!(!instances.is_empty(), "no .cnf files in {}", dir.display());
    let mut formulas = Vec::with_capacity(instances.len());
    for (name, path) in &instances {
        formulas.push((name.clone(), load(path, err)?));
    }
    let seeds = if seeds.is_empty() {
        vec![config.seed]
    } else {
        seeds.to_vec()
    };
    let runs: Vec<(usize, u64)> = (0..formulas.len())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let results: Vec<anyhow::Result<RunReport>> = pool.install(|| {
        runs.par_iter()
            .map(|&(i, seed)| {
                let (name, formula) = &formulas[i];
                let config = SolverConfig {
                    seed,
                    ..config.clone()
                };
                let outcome = solve_population(formula, &config)?;
                if let Some(model) = &outcome.assignment {
                    ensure!(
                        formula.eval_boolean(model)?,
                        "internal error: model for {name} does not verify"
                    );
                }
                Ok(RunReport::from_outcome(name, seed, &outcome))
            })
            .collect()
    });
    let reports = results.into_iter().collect::<anyhow::Result<Vec<_>>>()?;

    writeln!(out, "{BENCH_CSV_HEADER}")?;
    for r in &reports {
        writeln!(out, "{}", r.to_csv_row())?;
    }
    writeln!(out, "{}", BenchSummary::from_reports(&reports).to_csv_row())?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::BinaryAssignment;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("qevo-sat").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn outcome(model: Option<Vec<bool>>) -> SolveOutcome {
        let n = model.as_ref().map_or(0, Vec::len);
        SolveOutcome {
            status: if model.is_some() {
                Status::Satisfiable
            } else {
                Status::Unknown
            },
            assignment: model.map(BinaryAssignment::new),
            cycles_used: 1,
            wall_time: Duration::ZERO,
            best_binary: BinaryAssignment::all_false(n),
            best_satisfied: 0,
            trace: None,
        }
    }

    #[test]
    fn answer_lines() {
        assert_eq!(format_answer(&outcome(None)), "s UNKNOWN\n");
        assert_eq!(
            format_answer(&outcome(Some(vec![]))),
            "s SATISFIABLE\nv 0\n"
        );
        assert_eq!(
            format_answer(&outcome(Some(vec![true, false, true]))),
            "s SATISFIABLE\nv 1 -2 3 0\n"
        );
        let long = format_answer(&outcome(Some(vec![true; 10])));
        assert_eq!(long, "s SATISFIABLE\nv 1 2 3 4 5 6 7 8 9 10\nv 0\n");
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[5]), Some(5.0));
        assert_eq!(median(&[9, 1, 4]), Some(4.0));
        assert_eq!(median(&[4, 1, 9, 2]), Some(3.0));
    }

    #[test]
    fn summary_row() {
        let r = |status, cycles| RunReport {
            instance: "a.cnf".into(),
            status,
            cycles_used: cycles,
            wall_time_ms: 2,
            seed: 1,
        };
        let s = BenchSummary::from_reports(&[
            r(Status::Satisfiable, 10),
            r(Status::Unknown, 100),
            r(Status::Satisfiable, 30),
            r(Status::Satisfiable, 20),
        ]);
        assert_eq!(s.success_rate, 0.75);
        assert_eq!(s.median_cycles, Some(20.0));
        assert_eq!(
            s.to_csv_row(),
            "summary,success_rate=0.75,median_cycles=20,median_wall_time_ms=2,runs=4"
        );
        let none = BenchSummary::from_reports(&[r(Status::Unknown, 5)]);
        assert_eq!(
            none.to_csv_row(),
            "summary,success_rate=0,median_cycles=NA,median_wall_time_ms=NA,runs=1"
        );
    }

    #[test]
    fn natural_order() {
        let mut names = vec!["inst_10.cnf", "inst_2.cnf", "a.cnf", "inst_1.cnf"];
        names.sort_by_key(|n| natural_key(n));
        assert_eq!(names, ["a.cnf", "inst_1.cnf", "inst_2.cnf", "inst_10.cnf"]);
    }

    #[test]
    fn default_flags() {
        let cli = Cli::try_parse_from(["qevo-sat", "solve", "x.cnf"]).unwrap();
        let Command::Solve { solver, trace, .. } = cli.command else {
            panic!("expected solve");
        };
        assert!(trace.is_none());
        let c = solver.config();
        assert_eq!(c, SolverConfig::default());
    }

    #[test]
    fn flags_reach_the_config() {
        let cli = Cli::try_parse_from([
            "qevo-sat",
            "solve",
            "x.cnf",
            "--mu",
            "4",
            "--delta-min",
            "0.01",
            "--population",
            "3",
            "--init",
            "uniform",
            "--force-quantize",
            "--time-limit-ms",
            "50",
            "--seed",
            "7",
        ])
        .unwrap();
        let Command::Solve { solver, .. } = cli.command else {
            panic!("expected solve");
        };
        let c = solver.config();
        assert_eq!(c.mu, 4.0);
        assert_eq!(c.delta_init, 0.25);
        assert_eq!(c.delta_min, 0.01);
        assert_eq!(c.population_size, 3);
        assert_eq!(c.init, InitMode::Uniform);
        assert!(c.force_quantize);
        assert_eq!(c.time_limit, Some(Duration::from_millis(50)));
        assert_eq!(c.seed, 7);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_cli(&[]).0, EXIT_ERROR);
        assert_eq!(run_cli(&["solve"]).0, EXIT_ERROR);
        assert_eq!(
            run_cli(&["solve", "x.cnf", "--init", "gauss"]).0,
            EXIT_ERROR
        );
        let (code, out, _) = run_cli(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("solve"));
    }

    #[test]
    fn solve_gen_bench_in_process() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        let (code, _, _) = run_cli(&[
            "gen", "-n", "10", "-m", "30", "--count", "2", "--seed", "4", "-o", d,
        ]);
        assert_eq!(code, 0);

        let inst = dir.path().join("inst_0.cnf");
        let (code, out, _) = run_cli(&["solve", inst.to_str().unwrap()]);
        assert_eq!(code, EXIT_SATISFIABLE);
        assert!(out.starts_with("s SATISFIABLE\n"));

        let (code, out, _) = run_cli(&["bench", d, "--seeds", "1,2"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], BENCH_CSV_HEADER);
        assert_eq!(lines.len(), 1 + 4 + 1);
        assert!(lines[1].starts_with("inst_0.cnf,") && lines[1].ends_with(",1"));
        assert!(lines[4].starts_with("inst_1.cnf,") && lines[4].ends_with(",2"));
        assert!(lines[5].starts_with("summary,success_rate="));
    }
}
