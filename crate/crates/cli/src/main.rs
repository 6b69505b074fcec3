use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use disco_core::cost::CostModel;
use disco_core::runner::{self, Method, ReplayConfig, RunConfig};
use disco_core::OperatorPool;

#[derive(Parser)]
#[command(name = "disco", version, about = "Global optimisation of symmetry-preserving unitary product states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Run configuration (TOML).
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Output directory.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the configured method and write summary, ansatz and records.
    Run(Overrides),
    /// Run every point of the configured scan and write scan.csv.
    Scan(Overrides),
    /// Exact ground state of the configured system.
    Fci(Overrides),
    /// Evaluate a serialised ansatz on the configured system.
    Replay {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        ansatz: PathBuf,
        /// Re-relax amplitudes with the ordering fixed.
        #[arg(long)]
        relax: bool,
    },
    /// Print the operator pool for `n` spatial orbitals.
    PoolInfo {
        #[arg(long, short)]
        n_orbitals: usize,
        /// List every operator with its CNOT cost.
        #[arg(long)]
        list: bool,
    },
}

fn load(o: &Overrides) -> disco_core::Result<RunConfig> {
    let mut cfg = RunConfig::from_path(&o.config)?;
    if let Some(s) = o.seed {
        cfg.optimizer.rng_seed = s;
    }
    if let Some(r) = o.restarts {
        cfg.optimizer.restarts = r;
    }
    if let Some(out) = &o.output {
        cfg.output = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_summary(out: &runner::RunOutput) -> disco_core::Result<()> {
    println!("{}", serde_json::to_string_pretty(&out.summary)?);
    Ok(())
}

fn dispatch(cli: Cli) -> disco_core::Result<()> {
    match cli.command {
        Command::Run(o) => print_summary(&runner::run(&load(&o)?)?),
        Command::Fci(o) => {
            let mut cfg = load(&o)?;
            cfg.method = Method::Fci;
            print_summary(&runner::run(&cfg)?)
        }
        Command::Replay { overrides, ansatz, relax } => {
            let mut cfg = load(&overrides)?;
            cfg.method = Method::Replay;
            cfg.replay = Some(ReplayConfig { ansatz, relax });
            cfg.validate()?;
            print_summary(&runner::run(&cfg)?)
        }
        Command::Scan(o) => {
            let cfg = load(&o)?;
            let table = runner::scan(&cfg, true)?;
            print!("{}", table.to_csv()?);
            match table.npe {
                Some(npe) => eprintln!("npe {npe:.6e}"),
                None => eprintln!("npe unavailable"),
            }
            Ok(())
        }
        Command::PoolInfo { n_orbitals, list } => {
            let pool = OperatorPool::new(n_orbitals)?;
            let model = CostModel::default();
            println!("n_orbitals {n_orbitals}");
            println!("size {}", pool.len());
            println!("fingerprint {}", pool.fingerprint());
            println!("cost_model {model}");
            if list {
                for (i, op) in pool.operators().iter().enumerate() {
                    println!("{i:>4} {op} cnots={}", model.operator_cost(op, n_orbitals));
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
