use std::path::PathBuf;
use std::process::ExitCode;

use atf_core::{BigInt, BigRational, Side, Slot};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod error;

use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "atf", version, about = "Markov triples, moment triangles, almost toric diagrams and boundary hulls")]
pub struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print progress notes to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Svg,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Markov triples and mutations.
    #[command(subcommand)]
    Markov(MarkovCmd),
    /// Moment triangles of CP(a², b², c²).
    #[command(subcommand)]
    Polytope(PolytopeCmd),
    /// Almost toric base diagrams and their surgeries.
    #[command(subcommand)]
    Atf(AtfCmd),
    /// Boundary convex hulls.
    #[command(subcommand)]
    Hull(HullCmd),
    /// SVG output.
    #[command(subcommand)]
    Render(RenderCmd),
    /// Self-verification.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

/// Triple as typed on the command line; Markov-ness is checked later so a
/// wrong triple is a domain error rather than a usage error.
#[derive(Clone, Debug)]
pub struct RawTriple(pub [BigInt; 3]);

fn parse_raw_triple(s: &str) -> Result<RawTriple, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err("expected three comma-separated integers, like 1,2,5".into());
    }
    let mut out = Vec::with_capacity(3);
    for p in parts {
        out.push(p.parse::<BigInt>().map_err(|e| format!("{p:?}: {e}"))?);
    }
    Ok(RawTriple(out.try_into().unwrap()))
}

fn parse_slot(s: &str) -> Result<Slot, String> {
    match s.to_ascii_lowercase().as_str() {
        "a" | "0" => Ok(Slot::A),
        "b" | "1" => Ok(Slot::B),
        "c" | "2" => Ok(Slot::C),
        _ => Err("expected a, b, c or 0, 1, 2".into()),
    }
}

fn parse_side(s: &str) -> Result<Side, String> {
    s.parse()
}

fn parse_positive_int(s: &str) -> Result<BigInt, String> {
    let n: BigInt = s.parse().map_err(|e| format!("{s:?}: {e}"))?;
    if n < BigInt::from(1) {
        return Err("must be at least 1".into());
    }
    Ok(n)
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    s.parse::<BigRational>().map_err(|e| format!("{s:?}: {e}"))
}

fn parse_workers(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err("worker count must be a positive integer".into()),
    }
}

#[derive(Args, Debug)]
pub struct TripleArg {
    /// Markov triple, comma separated: 1,2,5
    #[arg(value_parser = parse_raw_triple)]
    pub triple: RawTriple,
}

#[derive(Args, Debug)]
pub struct Bound {
    /// Largest entry to include.
    #[arg(long, value_parser = parse_positive_int)]
    pub max_entry: BigInt,
}

#[derive(Subcommand, Debug)]
pub enum MarkovCmd {
    /// Every sorted triple with entries up to the bound, one per line.
    Enumerate(Bound),
    /// Replace one entry by its Vieta partner.
    Mutate {
        #[command(flatten)]
        triple: TripleArg,
        #[arg(long, value_parser = parse_slot)]
        slot: Slot,
    },
    /// Descent path to (1,1,1).
    Reduce(TripleArg),
}

#[derive(Subcommand, Debug)]
pub enum PolytopeCmd {
    /// Weighted moment triangle with its edge data, cuts and lens labels.
    Build {
        #[command(flatten)]
        triple: TripleArg,
        /// Use the solution (m₁ + k·b², m₂ − k·a²).
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        shift: BigInt,
    },
    /// Re-check every identity of the triangle.
    Verify(TripleArg),
}

/// Where a diagram comes from.
#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct DiagramSource {
    /// Diagram JSON file, or - for stdin.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Start from the diagram of this triple (see each command).
    #[arg(long, value_parser = parse_raw_triple)]
    pub triple: Option<RawTriple>,
}

#[derive(Subcommand, Debug)]
pub enum AtfCmd {
    /// Moment triangle with all three corners rationally blown down.
    Diagram {
        #[command(flatten)]
        triple: TripleArg,
        /// Node position as a fraction of the corner-to-fiber distance.
        #[arg(long, value_parser = parse_rational, default_value = "1/4")]
        cut_fraction: BigRational,
        /// Plain toric diagram, without nodes.
        #[arg(long)]
        toric: bool,
    },
    /// Nodal trade at a smooth vertex. A --triple source starts from the toric diagram.
    Trade {
        #[command(flatten)]
        source: DiagramSource,
        #[arg(long)]
        vertex: usize,
        #[arg(long, value_parser = parse_rational)]
        cut_length: Option<BigRational>,
    },
    /// Move a node along its eigenline. A --triple source starts from the blowdown diagram.
    Slide {
        #[command(flatten)]
        source: DiagramSource,
        #[arg(long)]
        node: usize,
        #[arg(long, value_parser = parse_rational)]
        cut_length: BigRational,
    },
    /// Transfer the cut of a node. A --triple source starts from the blowdown diagram.
    Transfer {
        #[command(flatten)]
        source: DiagramSource,
        #[arg(long)]
        node: usize,
        #[arg(long, value_parser = parse_side)]
        side: Side,
    },
    /// Mutate the blowdown diagram at a slot, with its certificate.
    Mutate {
        #[command(flatten)]
        triple: TripleArg,
        #[arg(long, value_parser = parse_slot)]
        slot: Slot,
    },
}

#[derive(Subcommand, Debug)]
pub enum HullCmd {
    /// Disc classes and their convex hull.
    Build(TripleArg),
    /// Edge affine lengths of the hull.
    Lengths(TripleArg),
    /// Decide whether two hulls are equivalent.
    Compare {
        #[arg(value_parser = parse_raw_triple)]
        first: RawTriple,
        #[arg(value_parser = parse_raw_triple)]
        second: RawTriple,
    },
}

#[derive(Args, Debug)]
pub struct Canvas {
    #[arg(long, default_value_t = 400)]
    pub width: u32,
    #[arg(long, default_value_t = 400)]
    pub height: u32,
    #[arg(long)]
    pub no_labels: bool,
}

#[derive(Subcommand, Debug)]
pub enum RenderCmd {
    /// A base diagram. A --triple source renders its blowdown diagram.
    Diagram {
        #[command(flatten)]
        source: DiagramSource,
        #[command(flatten)]
        canvas: Canvas,
    },
    /// The boundary hull over the lattice.
    Hull {
        #[command(flatten)]
        triple: TripleArg,
        #[command(flatten)]
        canvas: Canvas,
    },
    /// One panel per step from (1,1,1) to the triple.
    Chain {
        #[command(flatten)]
        triple: TripleArg,
        #[command(flatten)]
        canvas: Canvas,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Run every invariant suite over all triples up to the bound.
    All {
        #[command(flatten)]
        bound: Bound,
        #[arg(long, env = "ATF_WORKERS", default_value_t = 1, value_parser = parse_workers)]
        workers: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(CliError::Domain { kind, message }) => {
            let body = serde_json::json!({"error": {"kind": kind, "message": message}});
            eprintln!("{body}");
            ExitCode::from(1)
        }
    }
}
