use std::path::PathBuf;

use num_traits::{One, Zero};

use stablecut::approx::Rational;
use stablecut::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algorithm {
    Brute,
    DpPseudo,
    DpDegree,
    Approx,
    LocalSearch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Heuristic {
    MinFill,
    MinDegree,
}

/// Source instance for `generate`. Indices are 0-based here; the command
/// line takes them 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    PartitionTree(Vec<u64>),
    PartitionK2n(Vec<u64>),
    MaxCut {
        graph: PathBuf,
        k: u64,
    },
    SetSplitting {
        elements: usize,
        sets: Vec<Vec<usize>>,
        delta: usize,
    },
    Mcis {
        classes: usize,
        size: usize,
        edges: Vec<((usize, usize), (usize, usize))>,
        heavy: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Solve {
        graph: PathBuf,
    },
    Verify {
        graph: PathBuf,
        cut: PathBuf,
    },
    /// Writes `<out>.msc`, `<out>.td` and `<out>.sidecar` when `out` is set,
    /// otherwise prints all three.
    Generate {
        family: Family,
        out: Option<PathBuf>,
    },
    Decompose {
        graph: PathBuf,
        heuristic: Heuristic,
    },
    Poa {
        graph: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub alg: Algorithm,
    /// Required in (0, 1/2] by `approx`; [`DEFAULT_EPS`] when absent.
    pub eps: Option<Rational>,
    pub td: Option<PathBuf>,
    pub seed: u64,
    /// Largest vertex count brute force will enumerate.
    pub limit: usize,
    pub format: OutputFormat,
}

pub const DEFAULT_EPS: (u32, u32) = (1, 10);

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            alg: Algorithm::DpPseudo,
            eps: None,
            td: None,
            seed: 0,
            limit: stablecut::oracle::DEFAULT_LIMIT,
            format: OutputFormat::Text,
        }
    }

    pub fn epsilon(&self) -> Result<Rational, Error> {
        let eps = self
            .eps
            .clone()
            .unwrap_or_else(|| Rational::new(DEFAULT_EPS.0.into(), DEFAULT_EPS.1.into()));
        check_eps(&eps)?;
        Ok(eps)
    }
}

fn check_eps(eps: &Rational) -> Result<(), Error> {
    let half = Rational::new(One::one(), 2u32.into());
    if eps.is_zero() || *eps > half {
        return Err(Error::InvalidEpsilon(format!(
            "{}/{}",
            eps.numer(),
            eps.denom()
        )));
    }
    Ok(())
}

/// Parses an exact `p/q` (or integer) string and checks it lies in (0, 1/2].
pub fn parse_eps(s: &str) -> Result<Rational, Error> {
    let eps: Rational = s
        .trim()
        .parse()
        .map_err(|_| Error::InvalidEpsilon(s.to_string()))?;
    check_eps(&eps)?;
    Ok(eps)
}
