use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::time::Duration;
use synth_cli::{
    eval_holdout, parse_scheme, run_benchmark, run_suite, Mode, OutputFormat, RunConfig,
};
use synth_core::sygus::{extract_examples, parse_program, parse_sygus, Spec};
use synth_core::uniform_pcfg;

#[derive(Debug, Parser)]
#[command(name = "synth", about = "Bottom-up enumerative synthesis for SyGuS benchmarks")]
struct Cli {
    /// Repeat for more log detail (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonOpts {
    /// Search mode.
    #[arg(long, default_value = "probe")]
    mode: Mode,
    /// Partial-solution selection scheme.
    #[arg(long = "select", value_parser = parse_scheme, default_value = "first-cheapest")]
    scheme: synth_core::SelectionScheme,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 600)]
    timeout: u64,
    /// Candidate budget (hardware-independent supplement to the timeout).
    #[arg(long)]
    max_candidates: Option<u64>,
    /// Per-cycle cost limit factor.
    #[arg(long, default_value_t = 6)]
    lim_factor: u64,
    /// Seed for the sampling verifier.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl CommonOpts {
    fn config(&self) -> RunConfig {
        RunConfig {
            mode: self.mode,
            scheme: self.scheme,
            timeout: Some(Duration::from_secs(self.timeout)),
            max_candidates: self.max_candidates,
            lim_factor: self.lim_factor,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one benchmark and print the result.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
        /// Extra benchmark file with held-out examples to grade the
        /// solution on.
        #[arg(long)]
        holdout: Option<PathBuf>,
    },
    /// Run every .sl benchmark in a directory across modes.
    Suite {
        dir: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
        /// Comma-separated list of modes to run.
        #[arg(long, value_delimiter = ',', default_value = "probe")]
        modes: Vec<Mode>,
        /// Result file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Result format.
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
    },
    /// Print the uniform rule table (probability, real cost, cost) of a
    /// benchmark's grammar.
    DumpPcfg { file: PathBuf },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match cli.command {
        Command::Solve {
            file,
            opts,
            holdout,
        } => {
            let record = run_benchmark(&file, &opts.config());
            println!(
                "benchmark: {}\nmode: {}\nscheme: {}\nsolved: {}\nwall_time_s: {:.3}\nlevels: {}\ncandidates: {}",
                record.benchmark,
                record.mode,
                record.scheme.name(),
                record.solved,
                record.wall_time_s,
                record.levels,
                record.candidates,
            );
            if let Some(size) = record.solution_size {
                println!("solution_size: {size}");
            }
            if let Some(ite) = record.ite_count {
                println!("ite_count: {ite}");
            }
            if let Some(solution) = &record.solution {
                println!("solution: {solution}");
            }
            if let Some(error) = &record.error {
                println!("error: {error}");
            }
            if let (Some(holdout), Some(solution)) = (holdout, &record.solution) {
                let text = std::fs::read_to_string(&file)?;
                let problem = parse_sygus(&text).context("reparsing benchmark")?;
                let holdout_text = std::fs::read_to_string(&holdout)?;
                let holdout_problem =
                    parse_sygus(&holdout_text).context("parsing holdout file")?;
                let examples = match extract_examples(&holdout_problem) {
                    Spec::Pbe(examples) => examples,
                    Spec::FirstOrder => bail!("holdout file must use literal example constraints"),
                };
                let program = parse_program(&problem.grammar, solution)
                    .context("reparsing solution against grammar")?;
                let accuracy = eval_holdout(&problem.grammar, &program, &examples);
                println!("holdout_accuracy: {accuracy:.3}");
            }
        }
        Command::Suite {
            dir,
            opts,
            modes,
            out,
            format,
        } => {
            let cfg = opts.config();
            let schemes = [cfg.scheme];
            let report = run_suite(&dir, &modes, &schemes, &cfg, out.as_deref(), format)?;
            for record in &report.records {
                println!(
                    "{}\t{}\t{}\tsolved={}\t{:.2}s\t{} candidates",
                    record.benchmark,
                    record.mode,
                    record.scheme.name(),
                    record.solved,
                    record.wall_time_s,
                    record.candidates,
                );
            }
            println!(
                "solved {}/{}; mean {:?}s median {:?}s; mean ite/example {:?}",
                report.solved,
                report.records.len(),
                report.mean_time_s,
                report.median_time_s,
                report.mean_ite_per_example,
            );
        }
        Command::DumpPcfg { file } => {
            let text = std::fs::read_to_string(&file)?;
            let problem = parse_sygus(&text).context("parsing benchmark")?;
            let pcfg = uniform_pcfg(&problem.grammar).context("building uniform table")?;
            print!("{}", pcfg.dump_table());
        }
    }
    Ok(())
}
