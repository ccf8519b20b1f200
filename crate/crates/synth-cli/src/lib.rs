//! Benchmark runner: dispatches parsed problems to the three search modes,
//! collects per-run records and suite-level aggregates, and reads/writes
//! the CSV and JSON-lines result formats.

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};
use synth_core::sygus::{
    cegis, exhaustive_verifier, extract_examples, parse_sygus, sampled_verifier, Logic, Spec,
    SygusProblem, SynthStrategy,
};
use synth_core::{
    eval_on_examples, guided_search_core, height_search, probe_with_budget, CostModel, Example,
    Grammar, PbeSpec, ProbeConfig, Program, SearchBudget, SearchOutcome, SearchState,
    SelectionScheme, Terminal,
};

pub const EXHAUSTIVE_VAR_LIMIT: usize = 24;
pub const SAMPLED_VERIFIER_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Height,
    Size,
    Probe,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Height => "height",
            Mode::Size => "size",
            Mode::Probe => "probe",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "height" => Ok(Mode::Height),
            "size" => Ok(Mode::Size),
            "probe" => Ok(Mode::Probe),
            other => Err(format!("unknown mode {other} (expected height|size|probe)")),
        }
    }
}

pub fn parse_scheme(s: &str) -> Result<SelectionScheme, String> {
    match s {
        "largest" => Ok(SelectionScheme::LargestSubset),
        "first-cheapest" => Ok(SelectionScheme::FirstCheapest),
        "all-cheapest" => Ok(SelectionScheme::AllCheapest),
        "all" => Ok(SelectionScheme::All),
        other => Err(format!(
            "unknown scheme {other} (expected largest|first-cheapest|all-cheapest|all)"
        )),
    }
}

/// Knobs shared by every run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub scheme: SelectionScheme,
    pub timeout: Option<Duration>,
    pub max_candidates: Option<u64>,
    pub lim_factor: u64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Probe,
            scheme: SelectionScheme::FirstCheapest,
            timeout: Some(Duration::from_secs(600)),
            max_candidates: None,
            lim_factor: 6,
            seed: 0,
        }
    }
}

/// The outcome of one benchmark under one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub benchmark: String,
    pub mode: Mode,
    pub scheme: SelectionScheme,
    pub solved: bool,
    pub wall_time_s: f64,
    pub levels: u64,
    pub candidates: u64,
    pub solution_size: Option<u64>,
    pub ite_count: Option<u64>,
    pub solution: Option<String>,
    /// Parse or verifier failures; never a panic.
    pub error: Option<String>,
    /// Number of examples (or collected goals); feeds the per-example
    /// case-split aggregate, not part of the wire formats.
    pub example_count: usize,
}

impl RunRecord {
    fn unsolved(benchmark: String, cfg: &RunConfig) -> RunRecord {
        RunRecord {
            benchmark,
            mode: cfg.mode,
            scheme: cfg.scheme,
            solved: false,
            wall_time_s: 0.0,
            levels: 0,
            candidates: 0,
            solution_size: None,
            ite_count: None,
            solution: None,
            error: None,
            example_count: 0,
        }
    }

    /// The fixed serialization row shared by the CSV and JSON-lines
    /// formats.
    pub fn row(&self) -> RecordRow {
        RecordRow {
            benchmark: self.benchmark.clone(),
            mode: self.mode.name().to_string(),
            scheme: self.scheme.name().to_string(),
            solved: self.solved,
            wall_time_s: self.wall_time_s,
            levels: self.levels,
            candidates: self.candidates,
            solution_size: self.solution_size,
            ite_count: self.ite_count,
            solution: self.solution.clone(),
        }
    }
}

/// Columns are fixed: benchmark,mode,scheme,solved,wall_time_s,levels,
/// candidates,solution_size,ite_count,solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub benchmark: String,
    pub mode: String,
    pub scheme: String,
    pub solved: bool,
    pub wall_time_s: f64,
    pub levels: u64,
    pub candidates: u64,
    pub solution_size: Option<u64>,
    pub ite_count: Option<u64>,
    pub solution: Option<String>,
}

/// Number of case-split nodes in a program.
pub fn count_ite(grammar: &Grammar, program: &Program) -> u64 {
    program.count_nodes(grammar, &Terminal::is_ite) as u64
}

/// Fraction of held-out examples the program reproduces.
pub fn eval_holdout(grammar: &Grammar, program: &Program, holdout: &[Example]) -> f64 {
    if holdout.is_empty() {
        return 1.0;
    }
    let outputs = eval_on_examples(grammar, program, holdout).expect("well-sorted program");
    let hits = outputs
        .iter()
        .zip(holdout)
        .filter(|(got, ex)| *got == &ex.output)
        .count();
    hits as f64 / holdout.len() as f64
}

fn probe_config(cfg: &RunConfig) -> ProbeConfig {
    ProbeConfig {
        lim_factor: cfg.lim_factor,
        scheme: cfg.scheme,
        timeout: cfg.timeout,
        max_candidates: cfg.max_candidates,
        initial_pcfg: None,
    }
}

fn solve_pbe(
    problem: &SygusProblem,
    examples: &[Example],
    cfg: &RunConfig,
    budget: &mut SearchBudget,
) -> Result<Option<Program>, synth_core::PcfgError> {
    let grammar = &problem.grammar;
    let spec = PbeSpec::new(examples);
    match cfg.mode {
        Mode::Probe => {
            Ok(probe_with_budget(grammar, &spec, &probe_config(cfg), budget)?.solution)
        }
        Mode::Size => {
            let cm = CostModel::unit(grammar);
            let state = SearchState::new(grammar);
            Ok(
                match guided_search_core(grammar, &cm, &spec, state, u64::MAX, budget) {
                    (SearchOutcome::Solved(p), _) => Some(p),
                    _ => None,
                },
            )
        }
        Mode::Height => Ok(height_search(grammar, &spec, None, budget).solution),
    }
}

fn solve_first_order(
    problem: &SygusProblem,
    cfg: &RunConfig,
    budget: &mut SearchBudget,
) -> Result<Option<Program>, synth_core::sygus::SygusError> {
    let strategy = match cfg.mode {
        Mode::Probe => SynthStrategy::Guided,
        Mode::Size => SynthStrategy::SizeOrdered,
        Mode::Height => SynthStrategy::HeightOrdered,
    };
    let outcome = if problem.logic == Logic::CircuitBool {
        let verifier = exhaustive_verifier(EXHAUSTIVE_VAR_LIMIT);
        cegis(problem, strategy, &probe_config(cfg), &verifier, budget)?
    } else {
        let verifier = sampled_verifier(cfg.seed, SAMPLED_VERIFIER_SAMPLES);
        cegis(problem, strategy, &probe_config(cfg), &verifier, budget)?
    };
    Ok(outcome.solution)
}

/// Parses and solves one benchmark file; failures land in the record's
/// error field rather than aborting.
pub fn run_benchmark(path: &Path, cfg: &RunConfig) -> RunRecord {
    let benchmark = path.display().to_string();
    let start = Instant::now();
    let mut record = RunRecord::unsolved(benchmark, cfg);
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            record.error = Some(format!("read: {e}"));
            return record;
        }
    };
    let problem = match parse_sygus(&text) {
        Ok(p) => p,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    let mut budget = SearchBudget::new(cfg.timeout, cfg.max_candidates);
    let solution = match extract_examples(&problem) {
        Spec::Pbe(examples) => {
            record.example_count = examples.len();
            solve_pbe(&problem, &examples, cfg, &mut budget).map_err(|e| e.to_string())
        }
        Spec::FirstOrder => {
            record.example_count = problem.constraints.len();
            solve_first_order(&problem, cfg, &mut budget).map_err(|e| e.to_string())
        }
    };
    record.wall_time_s = start.elapsed().as_secs_f64();
    record.levels = budget.levels;
    record.candidates = budget.candidates;
    match solution {
        Ok(Some(program)) => {
            record.solved = true;
            record.solution_size = Some(program.size() as u64);
            record.ite_count = Some(count_ite(&problem.grammar, &program));
            record.solution = Some(program.display(&problem.grammar).to_string());
        }
        Ok(None) => {}
        Err(e) => record.error = Some(e),
    }
    record
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<OutputFormat, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::JsonLines),
            other => Err(format!("unknown format {other} (expected csv|json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub records: Vec<RunRecord>,
    pub solved: usize,
    pub mean_time_s: Option<f64>,
    pub median_time_s: Option<f64>,
    pub mean_ite_per_example: Option<f64>,
}

/// Aggregates recomputable from the records: solved count, mean and median
/// wall time over solved runs, and mean case-splits per example.
pub fn aggregate(records: Vec<RunRecord>) -> SuiteReport {
    let mut times: Vec<f64> = records
        .iter()
        .filter(|r| r.solved)
        .map(|r| r.wall_time_s)
        .collect();
    times.sort_by(f64::total_cmp);
    let solved = times.len();
    let mean_time_s = (solved > 0).then(|| times.iter().sum::<f64>() / solved as f64);
    let median_time_s = (solved > 0).then(|| {
        if solved % 2 == 1 {
            times[solved / 2]
        } else {
            (times[solved / 2 - 1] + times[solved / 2]) / 2.0
        }
    });
    let ite_ratios: Vec<f64> = records
        .iter()
        .filter(|r| r.solved && r.example_count > 0)
        .map(|r| r.ite_count.unwrap_or(0) as f64 / r.example_count as f64)
        .collect();
    let mean_ite_per_example =
        (!ite_ratios.is_empty()).then(|| ite_ratios.iter().sum::<f64>() / ite_ratios.len() as f64);
    SuiteReport {
        records,
        solved,
        mean_time_s,
        median_time_s,
        mean_ite_per_example,
    }
}

/// All `.sl` files directly under the directory, in path order.
pub fn benchmark_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "sl"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every benchmark under `dir` for each mode and scheme. Benchmarks
/// run on parallel workers with no shared synthesis state; records are
/// merged deterministically in (path, mode, scheme) order.
pub fn run_suite(
    dir: &Path,
    modes: &[Mode],
    schemes: &[SelectionScheme],
    cfg: &RunConfig,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<SuiteReport> {
    let files = benchmark_files(dir)?;
    let mut jobs: Vec<RunConfig> = Vec::new();
    let mut paths: Vec<&PathBuf> = Vec::new();
    for file in &files {
        for mode in modes {
            for scheme in schemes {
                jobs.push(RunConfig {
                    mode: *mode,
                    scheme: *scheme,
                    ..cfg.clone()
                });
                paths.push(file);
            }
        }
    }
    let mut records: Vec<RunRecord> = paths
        .par_iter()
        .zip(&jobs)
        .map(|(path, job)| run_benchmark(path, job))
        .collect();
    records.sort_by(|a, b| {
        (&a.benchmark, a.mode.name(), a.scheme.name())
            .cmp(&(&b.benchmark, b.mode.name(), b.scheme.name()))
    });
    if let Some(out) = out {
        write_records(out, &records, format)?;
    }
    Ok(aggregate(records))
}

pub fn write_records(path: &Path, records: &[RunRecord], format: OutputFormat) -> Result<()> {
    let rows: Vec<RecordRow> = records.iter().map(RunRecord::row).collect();
    match format {
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_path(path)
                .with_context(|| format!("writing {}", path.display()))?;
            for row in &rows {
                writer.serialize(row)?;
            }
            writer.flush()?;
        }
        OutputFormat::JsonLines => {
            let mut out = String::new();
            for row in &rows {
                out.push_str(&serde_json::to_string(row)?);
                out.push('\n');
            }
            std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

pub fn read_records_csv(path: &Path) -> Result<Vec<RecordRow>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

pub fn read_records_jsonl(path: &Path) -> Result<Vec<RecordRow>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Into::into))
        .collect()
}
