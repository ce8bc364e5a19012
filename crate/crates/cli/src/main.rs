//! `torsor`: command-line front end for sandpile torsors of regular matroids.

mod commands;
mod input;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sandpile_torsor::Budget;

#[derive(Parser, Debug)]
#[command(name = "torsor", version, about = "Sandpile torsors of oriented regular matroids")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// How to read the input file; guessed from the extension when omitted
    /// (`.json` plane graph, `.graph` edge list, anything else a matrix).
    #[arg(long, value_enum, global = true)]
    pub input_format: Option<InputFormat>,
    /// Largest 2^|E| for orientation tables.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_orientations: Option<u64>,
    /// Largest 2^#supports when enumerating signatures.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_signatures: Option<u64>,
    /// Largest 2^(#circuits + #cocircuits) for exhaustive pair sweeps.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_pairs: Option<u64>,
    /// Wall-clock cap in seconds; overrides TORSOR_BUDGET_SECONDS.
    #[arg(long, global = true)]
    pub time_seconds: Option<f64>,
}

impl Global {
    pub fn budget(&self) -> Budget {
        let mut budget = match self.time_seconds {
            Some(s) if s > 0.0 => Budget::default().with_seconds(s),
            _ => Budget::from_env(),
        };
        if let Some(v) = self.max_orientations {
            budget.max_orientations = v.into();
        }
        if let Some(v) = self.max_signatures {
            budget.max_signatures = v.into();
        }
        if let Some(v) = self.max_pairs {
            budget.max_pairs = v.into();
        }
        budget
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Matrix,
    Graph,
    PlaneGraph,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the bases.
    Bases { input: String },
    /// List circuit (or cocircuit) supports, or signed chains with --signed.
    Circuits {
        input: String,
        #[arg(long)]
        signed: bool,
        #[arg(long)]
        cocircuits: bool,
    },
    /// Invariant factors and order of the sandpile group.
    Group { input: String },
    /// Signature tooling.
    #[command(subcommand)]
    Signature(SignatureCommand),
    /// BBY bijection queries.
    #[command(subcommand)]
    Bby(BbyCommand),
    /// Act by an arc on a basis and show the action trace.
    Act {
        input: String,
        /// Signature file; a plane-graph input defaults to its planar signature.
        signature: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        arc: String,
        #[arg(long)]
        basis: String,
    },
    /// Verify theorems on one instance.
    Verify {
        #[arg(value_enum)]
        what: VerifyWhat,
        input: String,
        signature: Option<String>,
        /// Restrict the consistency check to these arcs (repeatable).
        #[arg(long, allow_hyphen_values = true)]
        arc: Vec<String>,
        /// Restrict the consistency check to these bases (repeatable).
        #[arg(long)]
        basis: Vec<String>,
        /// Restrict the consistency check to these elements (repeatable).
        #[arg(long)]
        element: Vec<String>,
    },
    /// Exhaustive sweep over connected multigraphs and R10.
    Sweep {
        #[arg(long, default_value_t = 5)]
        max_edges: usize,
        /// Skip the bundled R10 matrix.
        #[arg(long)]
        no_r10: bool,
        /// Per-side cap on functional signatures when pairs are too many to
        /// enumerate.
        #[arg(long, default_value_t = 4)]
        functional_limit: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum SignatureCommand {
    /// Decide a property of both halves of a signature pair.
    Check {
        #[arg(long, value_enum)]
        kind: CheckKind,
        input: String,
        signature: Option<String>,
    },
    /// Enumerate signatures of one kind.
    Enumerate {
        input: String,
        #[arg(long, value_enum, default_value_t = KindArg::Circuit)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = FilterArg::All)]
        filter: FilterArg,
    },
    /// Planar signature pair of a plane graph.
    FromPlanar { embedding: String },
}

#[derive(Subcommand, Debug)]
pub enum BbyCommand {
    /// Table of basis → orientation.
    Map { input: String, signature: Option<String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Triangulating,
    Acyclic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Circuit,
    Cocircuit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    All,
    Triangulating,
    Acyclic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyWhat {
    Consistency,
    Duality,
    Structure,
    All,
}

/// Exit status contract.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VIOLATION: u8 = 1;
    pub const INPUT: u8 = 2;
    pub const BUDGET: u8 = 3;
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(output) => {
            print!("{}", output.render(cli.global.format));
            ExitCode::from(output.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { exit::BUDGET } else { exit::INPUT })
        }
    }
}
