//! Command-line front end for the `cayleyci` library: argument parsing,
//! file formats and versioned JSON reports.

pub mod commands;
pub mod formats;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::{Outcome, EXIT_INDETERMINATE, EXIT_USAGE, EXIT_VERDICT};

const FORMATS_HELP: &str = "\
Formats:
  group         Z8, Z2^3xZ11, Z4xZ2 (case-insensitive; factors keep the written order)
  element       an index 0..|G|-1 in mixed radix, first factor most significant,
                or a tuple (a,b,c;x): one coordinate per factor, e.g. (1,0,1;7)
                is the element (1,0,1,7) of Z2^3xZ11
  set           comma-separated elements: 1,2,5 or (0,0,1;3),(1,0,0;0); empty
                string, {} or `empty` for the empty set
  permutation   cycle notation (0 1 2)(3 4); () is the identity
  generators    one permutation per line, # starts a comment
  digraph       header `n k`, then n rows of n colors in 0..k; or JSON
                {\"n\": n, \"colors\": [[...], ...]}

Exit codes: 0 verdict computed, 2 indeterminate or inapplicable, 1 usage or input error.";

#[derive(Parser, Debug)]
#[command(name = "cayleyci", version, about = "Cayley-isomorphism tests for finite abelian groups", after_help = FORMATS_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write the JSON report here (`-` for stdout instead of the text summary).
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for scans.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Search-node budget per canonical-form or automorphism search.
    #[arg(long, global = true, default_value_t = cayleyci::group::DEFAULT_NODE_BUDGET)]
    pub nodes: u64,
    /// Cap on enumerated group elements.
    #[arg(long, global = true, default_value_t = cayleyci::group::DEFAULT_ENUM_CAP)]
    pub enum_cap: usize,
    /// Node budget of the regular-subgroup search.
    #[arg(long, global = true, default_value_t = cayleyci::group::DEFAULT_NODE_BUDGET)]
    pub subgroup_nodes: u64,
}

#[derive(Args, Debug, Clone)]
pub struct GraphInput {
    /// Group of a Cayley digraph (with --s).
    #[arg(long, requires = "s", conflicts_with = "graph")]
    pub group: Option<String>,
    /// Connection set of the Cayley digraph; tuples (a,b,c;x) allowed.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    /// Colored digraph file, text or JSON.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScanModeArg {
    Exhaustive,
    Sample,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Automorphism group of a colored digraph or Cayley digraph.
    Aut {
        #[command(flatten)]
        input: GraphInput,
    },
    /// Canonical labelling and form.
    Canon {
        #[command(flatten)]
        input: GraphInput,
        /// Also write the canonical form in the text format.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Decides whether Cay(G,S) and Cay(G,T) are isomorphic, and if so by a group automorphism.
    CiPair {
        #[arg(long)]
        group: String,
        /// First connection set; tuples (a,b,c;x) allowed.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Second connection set.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Classifies every connection set (exhaustive) or a seeded sample.
    DciScan {
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value_t = ScanModeArg::Exhaustive)]
        mode: ScanModeArg,
        /// Number of random sets in sample mode.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Permit exhaustive scans of groups beyond the default order limit.
        #[arg(long)]
        allow_large: bool,
        /// List every connection set with its class in the JSON report.
        #[arg(long)]
        list_sets: bool,
    },
    /// Regular-subgroup criterion for one connection set.
    Babai {
        #[arg(long)]
        group: String,
        /// Connection set; tuples (a,b,c;x) allowed.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// 2-closure of a permutation group given by generators.
    TwoClosure {
        /// Generator list file.
        #[arg(long, value_name = "FILE", required_unless_present = "gen")]
        gens: Option<PathBuf>,
        /// A generator in cycle notation (repeatable).
        #[arg(long = "gen", value_name = "PERM", conflicts_with = "gens")]
        gen: Vec<String>,
        /// Degree; defaults to the largest point plus one.
        #[arg(long)]
        degree: Option<usize>,
        /// Write generators of the closure as a generator list.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Conjugates a regular group G-ring = G-hat^beta onto G-hat inside Aut(Cay(G,S)), G = Z_p^3 x Z_q.
    ConjugateP3q {
        /// Group Zp^3xZq with p, q distinct primes.
        #[arg(long)]
        group: String,
        /// Connection set; tuples (a,b,c;x) allowed.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// beta in cycle notation, or `random` (uses --seed).
        #[arg(long, value_name = "PERM|random", conflicts_with = "gring")]
        gring_from_beta: Option<String>,
        /// Generator list of the ring group itself.
        #[arg(long, value_name = "FILE")]
        gring: Option<PathBuf>,
    },
}

/// Parses `args` (program name first), runs the command and writes output;
/// returns the exit code.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_VERDICT };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let outcome = commands::execute(&cli.command, &cli.common);
    emit(&cli.common, outcome, stdout, stderr)
}

fn emit(common: &Common, outcome: anyhow::Result<Outcome>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let json = report::render(&outcome, common);
    match &common.json {
        Some(p) if p.as_os_str() == "-" => {
            let _ = stdout.write_all(json.as_bytes());
        }
        Some(p) => {
            if let Err(e) = std::fs::write(p, &json) {
                let _ = writeln!(stderr, "error: writing {}: {e}", p.display());
                return EXIT_USAGE;
            }
            let _ = stdout.write_all(outcome.text.as_bytes());
        }
        None => {
            let _ = stdout.write_all(outcome.text.as_bytes());
        }
    }
    outcome.exit
}
