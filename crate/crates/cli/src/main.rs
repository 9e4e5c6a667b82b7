use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use olsr_tune::fitness::FitnessWeights;
use olsr_tune::optimizers::Algorithm;
use olsr_tune::scenario::catalog;
use olsr_tune_cli::campaign::{run_campaign, Benchmark, CampaignSpec};
use olsr_tune_cli::compare::{compare, optimized_configs};
use olsr_tune_cli::configs::{bundled, resolve};
use olsr_tune_cli::report::{load_records, summary_text, write_reports, ReportFormat};
use olsr_tune_cli::simulate::simulate;
use olsr_tune_cli::{parse_list, resolve_scenario, write_atomic, DEFAULT_OUT, OUT_ENV};

/// OLSR simulation and metaheuristic parameter tuning.
#[derive(Parser)]
#[command(name = "olsr-tune", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Fitness weights as pdr,nrl,e2ed.
    #[arg(long, default_value = "0.5,0.2,0.3", value_parser = FitnessWeights::parse)]
    weights: FitnessWeights,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configuration on one scenario and print a JSON report.
    Simulate {
        /// Bundled scenario name or scenario file.
        #[arg(long, default_value = "base-malaga-like")]
        scenario: String,
        /// Bundled configuration label, config file or run record.
        #[arg(long, default_value = "rfc3626")]
        config: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: Common,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the event log to this file.
        #[arg(long)]
        event_log: Option<PathBuf>,
    },
    /// Run an optimization campaign; rerunning resumes it.
    Optimize {
        /// Campaign file; when given, the campaign flags below are ignored.
        #[arg(long)]
        campaign: Option<PathBuf>,
        #[arg(long, conflicts_with = "benchmark")]
        scenario: Option<String>,
        /// Closed-form objective instead of a scenario: sphere or rastrigin.
        #[arg(long)]
        benchmark: Option<Benchmark>,
        #[arg(long, default_value = "PSO,DE,GA,SA,RAND")]
        algorithms: String,
        #[arg(long, default_value_t = 30)]
        runs: usize,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 10)]
        population: usize,
        /// Simulation seeds per evaluation.
        #[arg(long, default_value = "1")]
        eval_seeds: String,
        #[arg(long, default_value_t = 1)]
        base_seed: u64,
        #[command(flatten)]
        common: Common,
        #[arg(long, env = OUT_ENV, default_value = DEFAULT_OUT)]
        out: PathBuf,
    },
    /// Simulate named configurations on several scenarios and tabulate medians.
    Compare {
        #[arg(long, default_value = "rfc3626,gomez-1,gomez-2,gomez-3")]
        configs: String,
        /// Campaign directory whose best configuration per algorithm joins the table.
        #[arg(long)]
        optimized: Option<PathBuf>,
        #[arg(long, default_value = "base-malaga-like")]
        scenarios: String,
        /// Seeds per cell.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value_t = 1)]
        base_seed: u64,
        #[command(flatten)]
        common: Common,
        #[arg(long, env = OUT_ENV, default_value = DEFAULT_OUT)]
        out: PathBuf,
    },
    /// Regenerate summaries and trajectory series from run records.
    Report {
        /// Directory holding .run records, directly or under runs/.
        #[arg(long)]
        records: PathBuf,
        /// csv, json or all.
        #[arg(long, default_value = "all")]
        format: ReportFormat,
        /// Defaults to the records directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List bundled scenarios and configurations.
    List,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { scenario, config, seed, common, out, event_log } => {
            let scenario = resolve_scenario(&scenario)?;
            let named = resolve(&config)?;
            let report = simulate(&scenario, &named, seed, common.weights, event_log.as_deref())?;
            match out {
                Some(path) => write_atomic(&path, &report.to_json())?,
                None => print!("{}", report.to_json()),
            }
        }
        Command::Optimize { campaign, scenario, benchmark, algorithms, runs, budget, population, eval_seeds, base_seed, common, out } => {
            let spec = match campaign {
                Some(path) => CampaignSpec::load(&path)?,
                None => CampaignSpec {
                    scenario: if benchmark.is_some() { None } else { Some(scenario.unwrap_or_else(|| "base-malaga-like".into())) },
                    benchmark,
                    algorithms: parse_list::<Algorithm>(&algorithms)?,
                    runs,
                    budget,
                    population,
                    weights: common.weights,
                    eval_seeds: parse_list(&eval_seeds)?,
                    base_seed,
                    ..CampaignSpec::default()
                },
            };
            let outcome = run_campaign(&spec, &out, |line| eprintln!("{line}"))?;
            print!("{}", summary_text(&outcome.summary));
            eprintln!("{} runs executed, {} resumed; results in {}", outcome.executed, outcome.resumed, out.display());
        }
        Command::Compare { configs, optimized, scenarios, seeds, base_seed, common, out } => {
            if seeds == 0 {
                bail!("--seeds must be at least 1");
            }
            let mut named = parse_list::<String>(&configs)?.iter().map(|c| resolve(c)).collect::<Result<Vec<_>>>()?;
            if let Some(dir) = optimized {
                named.extend(optimized_configs(&dir)?);
            }
            let scenarios = parse_list::<String>(&scenarios)?.iter().map(|s| resolve_scenario(s)).collect::<Result<Vec<_>>>()?;
            let seeds: Vec<u64> = (base_seed..base_seed + seeds).collect();
            let table = compare(&named, &scenarios, &seeds, common.weights)?;
            table.write(&out)?;
            print!("{}", table.to_text());
        }
        Command::Report { records, format, out } => {
            let out = out.unwrap_or_else(|| records.clone());
            let summary = write_reports(&load_records(&records)?, &out, format)?;
            print!("{}", summary_text(&summary));
        }
        Command::List => {
            println!("scenarios:");
            for s in catalog() {
                println!("  {:<18} {} nodes, {} s, {} sessions", s.name, s.node_count(), s.duration, s.sessions.len());
            }
            println!("configurations:");
            for c in bundled() {
                println!("  {:<18}{}", c.label, if c.waiver { " (range waiver)" } else { "" });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
