//! `elastica`: command-line drivers for the flow laboratory.
//!
//! Every subcommand accepts `--spec <file.json>` holding the same
//! parameters as its flags; explicit flags win. All tables go to stdout as
//! CSV with numbers at 17 significant digits, so identical invocations
//! produce byte-identical output. Exit codes: 0 success, 1 invalid input,
//! 2 numerical failure (the error is mirrored as a JSON record on stderr).

mod cmd;
mod specfile;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use elastica::Error;

#[derive(Parser)]
#[command(name = "elastica", version, about = "Elastic flow laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the interpolation quotients Q and Qtilde over a modulus range.
    Qfun {
        #[arg(long, help = "JSON file with defaults for this command")]
        spec: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        kmin: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        kmax: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Print the critical wave profile report: amplitude and its integrals.
    CriticalProfile {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        k: Option<f64>,
    },
    /// Initial-energy deviations of the two reference curves over a mesh list.
    Consistency {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long = "J", value_delimiter = ',')]
        j: Option<Vec<usize>>,
        #[arg(long, value_enum)]
        which: Option<Family>,
    },
    /// Run the flow from a named initial curve; write trace and snapshots.
    Flow {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_enum)]
        initial: Option<Initial>,
        #[arg(long, help = "wave amplitude (initial=critical)")]
        a: Option<f64>,
        #[arg(long, help = "wave modulus (initial=critical)")]
        k: Option<f64>,
        #[arg(long, help = "arch count (initial=elastica)")]
        m: Option<usize>,
        #[arg(long, help = "rotate the elastica upright (initial=elastica)")]
        upright: bool,
        #[arg(long = "J")]
        j: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        adaptive: bool,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, help = "output path prefix")]
        out: Option<String>,
        #[arg(long, help = "record every Nth trace row")]
        stride: Option<usize>,
    },
    /// Bracket the critical wave amplitude by bisection on run fates.
    Bisect {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long = "J")]
        j: Option<usize>,
        #[arg(long)]
        alo: Option<f64>,
        #[arg(long)]
        ahi: Option<f64>,
        #[arg(long)]
        res: Option<f64>,
        #[arg(long)]
        tmax: Option<f64>,
    },
    /// Evaluate the second-variation form on the standard test modes.
    Stability {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        panels: Option<usize>,
    },
    /// Shape distance between a stored snapshot and a reference curve.
    Compare {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        snapshot: Option<PathBuf>,
        #[arg(long = "ref", value_enum)]
        reference: Option<Initial>,
        #[arg(long, help = "compare against another snapshot file instead")]
        ref_file: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Critical,
    Elastica,
    Both,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Initial {
    Critical,
    Elastica,
    Lemniscate,
    #[value(name = "figure8")]
    Figure8,
    Line,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; only real errors exit 1.
            let code = if e.use_stderr() { 1 } else { 0 };
            e.print().ok();
            std::process::exit(code);
        }
    };
    if let Err(e) = cmd::dispatch(cli.command) {
        let (kind, code) = match &e {
            Error::Domain(_) => ("domain", 1),
            Error::Numerical(_) => ("numerical", 2),
        };
        eprintln!(
            "{}",
            serde_json::json!({ "error": kind, "message": e.to_string() })
        );
        std::process::exit(code);
    }
}
