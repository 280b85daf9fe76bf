//! `tetra`: sampling, relation checks, special-locus certification and
//! exports for the space of complete tetrahedra.
//!
//! Every command prints a JSON run report on stdout. Exit status is 0 on
//! success, 1 when a verification fails and 2 for usage or I/O errors.
//! Parallel phases use rayon, so `RAYON_NUM_THREADS` sets the thread count.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use tetra::config::{OneParamWeights, SplitType};
use tetra::core::TypeLabel;

#[derive(Parser, Debug)]
#[command(name = "tetra", version, about = "Exact computations on the space of complete tetrahedra")]
pub struct Cli {
    /// Also write the run report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    U,
    Z,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GammaFormat {
    Dot,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RelationsFormat {
    Txt,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample general-position configurations (ChaCha8, entries in [-9, 9]).
    Sample {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that the defining relations vanish on sampled points, with
    /// Jacobian rank spot checks.
    Verify {
        #[arg(long, value_enum)]
        level: LevelArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Number of samples that also get a Jacobian check.
        #[arg(long, default_value_t = 10)]
        spot_checks: usize,
        /// Exact polynomial identity check of every U-level generator.
        #[arg(long)]
        symbolic: bool,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Enumerate the special locus and certify smoothness at every
    /// representative.
    Certify {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        only_type: Option<TypeLabel>,
    },
    /// Re-verify a catalog written by `certify`.
    Check {
        #[arg(long)]
        catalog: PathBuf,
    },
    /// Degenerate a configuration along a one-parameter subgroup and match
    /// the core limit against the catalog.
    #[command(group(ArgGroup::new("mode").required(true).args(["weights", "target_split"])))]
    Degenerate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Weights a,b,c,d of diag(t^a, t^b, t^c, t^d), applied to the
        /// first sampled configuration of the seed.
        #[arg(long, allow_hyphen_values = true)]
        weights: Option<OneParamWeights>,
        /// Split type of the limit, written lines,planes,3-spaces, e.g. 31,51,22.
        #[arg(long)]
        target_split: Option<SplitType>,
        /// Catalog to match against; enumerated in process when omitted.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, default_value_t = 20_000)]
        max_trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the graph Gamma and/or the relation lists.
    #[command(group(ArgGroup::new("what").required(true).multiple(true).args(["gamma", "relations"])))]
    Export {
        #[arg(long, value_enum)]
        gamma: Option<GammaFormat>,
        #[arg(long, value_enum)]
        relations: Option<RelationsFormat>,
        #[arg(long, value_enum, default_value = "z")]
        level: LevelArg,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut rep = match commands::run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    rep.finish();
    let mut json = serde_json::to_string_pretty(&rep).expect("report serializes");
    json.push('\n');
    if let Some(p) = &cli.report {
        if let Err(e) = report::write_atomic(p, json.as_bytes()) {
            eprintln!("error: writing {}: {e}", p.display());
            return ExitCode::from(2);
        }
    }
    print!("{json}");
    if rep.ok() {
        ExitCode::SUCCESS
    } else {
        eprintln!("{} failure(s)", rep.failure_total);
        ExitCode::from(1)
    }
}
