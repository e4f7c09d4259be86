use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use refdecomp::catalog::{self, Tier};
use refdecomp::equivalence::{seed_for, DEFAULT_SAMPLES};
use refdecomp::harness::{self, EvalConfig, GenerateConfig, HarnessError};
use refdecomp::{check_equivalent, decompose_pair, parse_method, DecomposeConfig, MethodAst, Verdict};

#[derive(Parser)]
#[command(name = "refdecomp", version, about = "Decompose differences between equivalent MiniJ methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Tiers {
    Detector,
    All,
}

impl Tiers {
    fn tiers(self) -> Vec<Tier> {
        match self {
            Tiers::Detector => vec![Tier::Detector],
            Tiers::All => vec![Tier::Detector, Tier::Extended],
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decompose LEFT→RIGHT and print the report as JSON.
    Decompose {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        tiers: Tiers,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        beam: u64,
        #[arg(long, env = "REFDECOMP_SEED", default_value_t = 0)]
        seed: u64,
        /// Skip the per-step behavior check.
        #[arg(long)]
        no_verify: bool,
        /// Include the source of every intermediate method.
        #[arg(long)]
        emit_snapshots: bool,
        /// Identifier mixed into the sampling seed.
        #[arg(long, default_value = "pair")]
        pair_id: String,
        #[arg(long, default_value_t = 200)]
        max_steps: usize,
    },
    /// Decompose every pair of a corpus and write traces, summary.json and sims.csv.
    Eval {
        corpus: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Tier configurations to run; both by default.
        #[arg(long, value_enum, num_args = 1.., value_delimiter = ',')]
        tiers: Vec<Tiers>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        beam: u64,
        #[arg(long, env = "REFDECOMP_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_verify: bool,
        /// Worker threads; 0 picks one per core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Build a corpus of scrambled pairs from seed methods.
    Generate {
        #[arg(long)]
        seeds: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, env = "REFDECOMP_SEED", default_value_t = 0)]
        seed: u64,
        /// Rules the scrambler may draw from.
        #[arg(long, value_enum, default_value = "all")]
        tiers: Tiers,
    },
    /// Compare two methods on sampled inputs; exit 3 on a counterexample.
    CheckEquivalence {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, env = "REFDECOMP_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Inspect the rule catalog.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Print `id<TAB>tier<TAB>name<TAB>invertible` per rule.
    List,
}

/// Errors caused by the caller's input exit with 2; anything else with 1.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 1, error: e.into() }
    }
}

fn usage(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn read_method(path: &Path) -> Result<MethodAst, Failure> {
    let src = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(usage)?;
    parse_method(&src)
        .map_err(|e| anyhow!("{}: {e}", path.display()))
        .map_err(usage)
}

fn harness_failure(e: HarnessError) -> Failure {
    match e {
        HarnessError::EmptyCorpus(_) | HarnessError::NoSeeds(_) | HarnessError::BadSeed(..) => usage(e.into()),
        HarnessError::Io(ref p, _) if !p.exists() => usage(e.into()),
        e => e.into(),
    }
}

fn print_json(value: serde_json::Value) -> Result<(), Failure> {
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Decompose {
            left,
            right,
            tiers,
            beam,
            seed,
            no_verify,
            emit_snapshots,
            pair_id,
            max_steps,
        } => {
            let (l, r) = (read_method(&left)?, read_method(&right)?);
            let config = DecomposeConfig {
                tiers: tiers.tiers(),
                beam: beam as usize,
                max_steps,
                verify: !no_verify,
                seed,
                emit_snapshots,
                ..DecomposeConfig::default()
            };
            print_json(serde_json::to_value(decompose_pair(&pair_id, &l, &r, &config))?)?;
            Ok(0)
        }
        Command::Eval {
            corpus,
            out,
            tiers,
            beam,
            seed,
            no_verify,
            jobs,
        } => {
            let tiers = if tiers.is_empty() { vec![Tiers::Detector, Tiers::All] } else { tiers };
            let config = EvalConfig {
                configs: tiers
                    .into_iter()
                    .map(|t| DecomposeConfig {
                        tiers: t.tiers(),
                        beam: beam as usize,
                        verify: !no_verify,
                        seed,
                        ..DecomposeConfig::default()
                    })
                    .collect(),
                jobs,
            };
            let summaries = harness::eval_corpus(&corpus, &out, &config).map_err(harness_failure)?;
            for s in &summaries {
                eprintln!(
                    "{}: {} pairs, mean sim {:.3} (after renames {:.3}), {} with steps, {} fully decomposed, {} failed",
                    s.tier_config,
                    s.pairs,
                    s.mean_sim_final,
                    s.mean_sim_after_stage_a,
                    s.with_steps,
                    s.fully_decomposed,
                    s.failures.len()
                );
            }
            Ok(0)
        }
        Command::Generate {
            seeds,
            out,
            k_max,
            pairs,
            seed,
            tiers,
        } => {
            let config = GenerateConfig {
                k_max,
                n_pairs: pairs,
                seed,
                tiers: tiers.tiers(),
                ..GenerateConfig::default()
            };
            let report = harness::generate_corpus(&seeds, &out, &config).map_err(harness_failure)?;
            for (id, why) in &report.skipped {
                eprintln!("skipped {id}: {why}");
            }
            eprintln!("wrote {} pairs to {}", report.pairs.len(), out.display());
            Ok(0)
        }
        Command::CheckEquivalence { a, b, samples, seed } => {
            let (ma, mb) = (read_method(&a)?, read_method(&b)?);
            if samples == 0 {
                return Err(usage(anyhow!("--samples must be positive")));
            }
            let verdict = check_equivalent(&ma, &mb, samples, seed_for("", seed)).map_err(|e| usage(e.into()))?;
            match verdict {
                Verdict::Consistent => {
                    println!("consistent on {samples} inputs");
                    Ok(0)
                }
                v @ Verdict::Counterexample { .. } => {
                    print_json(serde_json::to_value(&v)?)?;
                    Ok(3)
                }
            }
        }
        Command::Catalog {
            command: CatalogCommand::List,
        } => {
            for r in catalog::list_rules() {
                println!("{}\t{}\t{}\t{}", r.id, r.tier, r.name, r.invertible());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
