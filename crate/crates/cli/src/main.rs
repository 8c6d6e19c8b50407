use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stablecut::approx::Rational;
use stablecut_cli::config::parse_eps;
use stablecut_cli::{run, Algorithm, Command, Family, Heuristic, OutputFormat, RunConfig};

/// Minimum stable cut solvers, checkers and hard-instance generators.
///
/// Files use 1-based vertex ids: graphs start with `p msc <n> <m>` (or
/// `p msc-ext` with `u v w s_u s_v` lines), decompositions with
/// `s td <bags> <max bag size> <n>`, cuts with `p cut <n>` followed by
/// `v side` lines.
#[derive(Parser)]
#[command(name = "stablecut", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    #[arg(long, global = true, value_enum, default_value = "dp-pseudo")]
    alg: Algorithm,

    /// Exact rational p/q in (0, 1/2], used by the approx solver [default: 1/10]
    #[arg(long, global = true, value_parser = parse_eps)]
    eps: Option<Rational>,

    /// Tree decomposition to solve on instead of a min-fill heuristic one
    #[arg(long, global = true)]
    td: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Largest vertex count brute force will enumerate
    #[arg(long, global = true, default_value_t = stablecut::oracle::DEFAULT_LIMIT)]
    limit: usize,

    #[arg(long, global = true, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Cmd {
    /// Find a minimum stable cut and report per-vertex stability
    Solve { graph: PathBuf },
    /// Check a cut file; exits 1 when some vertex is unstable
    Verify { graph: PathBuf, cut: PathBuf },
    /// Build a target instance with its threshold and path decomposition
    Generate {
        /// Write <OUT>.msc, <OUT>.td and <OUT>.sidecar instead of printing
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(subcommand)]
        family: FamilyCmd,
    },
    /// Print a heuristic tree decomposition
    Decompose {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "min-fill")]
        heuristic: Heuristic,
    },
    /// Max cut, min stable cut and their ratio
    Poa { graph: PathBuf },
}

/// `((class, index), (class, index))`, 0-based.
type ColoredEdge = ((usize, usize), (usize, usize));

#[derive(Subcommand)]
enum FamilyCmd {
    /// Partition as a subdivided star
    PartitionTree(Values),
    /// Partition as K_{2,n}
    PartitionK2n(Values),
    /// Max Cut on a unit-weight graph, asking for a cut of at least K edges
    Maxcut {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: u64,
    },
    /// Set Splitting with one decomposition column per DELTA elements
    SetSplitting {
        #[arg(long)]
        elements: usize,
        /// Comma-separated 1-based elements; repeat for every set
        #[arg(long = "set", value_parser = parse_set)]
        sets: Vec<Vec<usize>>,
        #[arg(long, default_value_t = 1)]
        delta: usize,
    },
    /// Multicolored independent set on CLASSES classes of SIZE vertices
    Mcis {
        #[arg(long)]
        classes: usize,
        #[arg(long)]
        size: usize,
        /// Edge `c:i-d:j` between vertex i of class c and vertex j of class d (1-based); repeatable
        #[arg(long = "edge", value_parser = parse_colored_edge)]
        edges: Vec<ColoredEdge>,
        /// Heavy-edge size; defaults to the smallest size the construction allows
        #[arg(long)]
        heavy: Option<u64>,
    },
}

#[derive(Args)]
struct Values {
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<u64>,
}

fn one_based(tok: &str) -> Result<usize, String> {
    match tok.trim().parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("'{tok}' is not a 1-based index")),
        Ok(i) => Ok(i - 1),
    }
}

fn parse_set(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(one_based).collect()
}

fn parse_colored_edge(s: &str) -> Result<ColoredEdge, String> {
    let vertex = |t: &str| -> Result<(usize, usize), String> {
        let (c, i) = t
            .split_once(':')
            .ok_or_else(|| format!("'{t}' is not class:index"))?;
        Ok((one_based(c)?, one_based(i)?))
    };
    let (a, b) = s
        .split_once('-')
        .ok_or_else(|| format!("'{s}' is not c:i-d:j"))?;
    Ok((vertex(a)?, vertex(b)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Solve { graph } => Command::Solve { graph },
        Cmd::Verify { graph, cut } => Command::Verify { graph, cut },
        Cmd::Decompose { graph, heuristic } => Command::Decompose { graph, heuristic },
        Cmd::Poa { graph } => Command::Poa { graph },
        Cmd::Generate { out, family } => Command::Generate {
            out,
            family: match family {
                FamilyCmd::PartitionTree(v) => Family::PartitionTree(v.values),
                FamilyCmd::PartitionK2n(v) => Family::PartitionK2n(v.values),
                FamilyCmd::Maxcut { graph, k } => Family::MaxCut { graph, k },
                FamilyCmd::SetSplitting {
                    elements,
                    sets,
                    delta,
                } => Family::SetSplitting {
                    elements,
                    sets,
                    delta,
                },
                FamilyCmd::Mcis {
                    classes,
                    size,
                    edges,
                    heavy,
                } => Family::Mcis {
                    classes,
                    size,
                    edges,
                    heavy,
                },
            },
        },
    };
    let config = RunConfig {
        command,
        alg: cli.alg,
        eps: cli.eps,
        td: cli.td,
        seed: cli.seed,
        limit: cli.limit,
        format: cli.format,
    };
    match run(&config) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
