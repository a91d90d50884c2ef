use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use pdfa_synth::game::FinishPolicy;
use pdfa_synth::learning::LearnMode;

use pdfa_synth_cli::config::parse_env_policy;
use pdfa_synth_cli::*;

#[derive(Parser)]
#[command(name = "pdfa-synth", version, about = "Learn PDFAs from demonstrations and synthesize Pareto-optimal strategies")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Learn a PDFA from demonstrations.
    Learn {
        #[arg(long)]
        demos: PathBuf,
        /// Safe-LTL formula, or `@file`.
        #[arg(long)]
        safety: Option<String>,
        #[arg(long, default_value = "vanilla")]
        mode: LearnMode,
        #[arg(long, value_delimiter = ',', default_value = "1.0")]
        alpha: Vec<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Translate a safe-LTL formula into its safety DFA.
    SafetyDfa {
        #[arg(long)]
        safety: String,
        /// Comma separated propositions.
        #[arg(long)]
        alphabet: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Compute the Pareto front and strategies.
    Synthesize(SynthArgs),
    /// Roll out synthesized strategies against an environment policy.
    Simulate {
        #[command(flatten)]
        synth: SynthArgs,
        #[arg(long, default_value_t = 100)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `random`, `greedy:<component>` or `script:<a>,<b>,...`.
        #[arg(long, default_value = "random")]
        env: String,
    },
    /// Learner comparison over sample sizes and alphas.
    Bench {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        safety: String,
        #[arg(long, value_delimiter = ',', default_value = "0.6,5.0")]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "5,50,500")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Write the game graph of a gridworld spec.
    GridworldExport {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    pdfa: PathBuf,
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    game: Option<PathBuf>,
    #[arg(long)]
    grid: Option<PathBuf>,
    /// `all`, an index into the front, or a vector like `5,10`.
    #[arg(long, default_value = "all")]
    point: PointSelector,
    #[arg(long, default_value = "robot-only")]
    finish: FinishPolicy,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl SynthArgs {
    fn config(self) -> ExperimentConfig {
        ExperimentConfig {
            pdfa: Some(self.pdfa),
            game: self.game,
            grid: self.grid,
            point: self.point,
            finish: self.finish,
            out: self.out,
            ..Default::default()
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Learn { demos, safety, mode, alpha, out } => {
            let cfg = ExperimentConfig {
                demos: Some(demos),
                safety: safety.as_deref().map(read_formula).transpose()?,
                mode,
                alphas: alpha,
                out,
                ..Default::default()
            };
            cfg.validate()?;
            for o in cmd_learn(&cfg)? {
                let cert = match &o.certificate {
                    None => "unchecked".to_string(),
                    Some(c) if c.is_empty() => "SAFE".to_string(),
                    Some(_) => "UNSAFE (witness in certificate)".to_string(),
                };
                println!("{mode} alpha={} states={} {cert}", o.alpha, o.states);
            }
        }
        Cmd::SafetyDfa { safety, alphabet, out } => {
            let (n, live) = cmd_safety_dfa(&read_formula(&safety)?, &alphabet, &out)?;
            println!("safety DFA: {n} states ({live} live)");
        }
        Cmd::Synthesize(a) => {
            let cfg = a.config();
            cfg.validate()?;
            let syn = cmd_synthesize(&cfg)?;
            println!(
                "product {} states, {} iterations, {} strategies",
                syn.product.num_states(),
                syn.front.iterations,
                syn.strategies.len()
            );
            for (i, s) in syn.strategies.iter().enumerate() {
                println!("point {i}: {:?}", s.point);
            }
        }
        Cmd::Simulate { synth, episodes, seed, env } => {
            let mut cfg = synth.config();
            cfg.episodes = episodes;
            cfg.seed = seed;
            cfg.env = parse_env_policy(&env, seed).map_err(anyhow::Error::msg)?;
            cfg.validate()?;
            for r in cmd_simulate(&cfg)? {
                println!(
                    "point {:?}: completion {:.4} dominance {:.4}",
                    r.point,
                    r.completion_rate(),
                    r.dominance_rate()
                );
            }
        }
        Cmd::Bench { truth, safety, alpha, sizes, seed, out } => {
            let cfg = ExperimentConfig {
                truth: Some(truth),
                safety: Some(read_formula(&safety)?),
                alphas: alpha,
                sizes,
                seed,
                out,
                ..Default::default()
            };
            cfg.validate()?;
            print!("{}", bench_csv(&cmd_bench(&cfg)?));
        }
        Cmd::GridworldExport { grid, out } => {
            let g = cmd_gridworld_export(&grid, &out)?;
            println!("game: {} states, {} edges", g.num_states(), g.num_edges());
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
