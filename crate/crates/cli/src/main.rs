mod cache;
mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "hocomp", version, about = "Exact homotopy completion towers, Quillen homology and bar constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Job {
    /// Coefficient ring: Q, Z or Fp (e.g. F7).
    #[arg(long, default_value = "Q")]
    ring: String,
    /// Operad preset (as, com) or operad document.
    #[arg(long, default_value = "as")]
    operad: String,
    /// Algebra: `trivial:DEGS`, `free:DEGS` (DEGS like `deg1,deg2`) or an algebra document.
    #[arg(long)]
    algebra: Option<String>,
    /// Arity cutoff R of the operad; extended automatically when the degrees need it.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Homology window `dmin:dmax`.
    #[arg(long, default_value = "0:6", value_parser = input::parse_window)]
    window: (i32, i32),
    /// Simplicial truncation P (default dmax + 2).
    #[arg(long)]
    levels: Option<usize>,
    /// Number of tower stages (default dmax).
    #[arg(long = "Kmax", alias = "kmax")]
    kmax: Option<usize>,
    /// Output file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit JSON instead of aligned text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Homology of a chain complex file.
    Homology {
        file: PathBuf,
        #[command(flatten)]
        job: Job,
    },
    /// Homology of the derived circle product `N ∘^h_O X`.
    Circle {
        /// Right module cut out of O: whole, tau:K, layer:K or above:K.
        #[arg(long, default_value = "whole", value_parser = input::parse_module)]
        module: hocomp_core::RightModule,
        /// The strict relative circle product (a reflexive coequalizer) instead.
        #[arg(long)]
        underived: bool,
        #[command(flatten)]
        job: Job,
    },
    /// Level sizes, face ranks and degenerate parts of `Bar(O, O, X)`.
    BarDump {
        /// Largest n for the degenerate subobjects.
        #[arg(long, default_value_t = 3)]
        degenerate: usize,
        #[command(flatten)]
        job: Job,
    },
    /// Quillen homology `H_*(Q(X))`.
    Tq {
        #[command(flatten)]
        job: Job,
    },
    /// The completion tower, its limits and the coaugmentation.
    Tower {
        #[command(flatten)]
        job: Job,
    },
    /// The completion spectral sequence.
    Ss {
        /// `csv` pages (`r,s,t,rank,torsion`) or the convergence `report`.
        #[arg(long, value_enum, default_value_t = SsFormat::Csv)]
        format: SsFormat,
        #[command(flatten)]
        job: Job,
    },
    /// Pushout along a free map, computed directly and through its filtration.
    Pushout {
        file: PathBuf,
        /// Degree through which the pushout is computed (default dmax).
        #[arg(long)]
        dtot: Option<i32>,
        #[command(flatten)]
        job: Job,
    },
    /// Theorem verifiers; exit status 1 on a fail verdict.
    Verify {
        #[arg(value_enum)]
        statement: Statement,
        /// Algebra map document for rel-hurewicz and whitehead.
        #[arg(long)]
        map: Option<PathBuf>,
        #[command(flatten)]
        job: Job,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SsFormat {
    Csv,
    Report,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Statement {
    Hurewicz,
    RelHurewicz,
    Whitehead,
    Finiteness,
    Convergence,
    Axioms,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
