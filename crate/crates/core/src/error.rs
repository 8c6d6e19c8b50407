use thiserror::Error;

use crate::treedec::Violation;

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Resource,
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range (graph has {vertex_count} vertices)")]
    InvalidVertex { vertex: usize, vertex_count: usize },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("edge {u}-{v} has nonpositive weight")]
    NonPositiveWeight { u: usize, v: usize },

    #[error("cut assigns {got} vertices but graph has {expected}")]
    PartialCut { expected: usize, got: usize },

    #[error("invalid tree decomposition: {}", format_violations(.0))]
    InvalidDecomposition(Vec<Violation>),

    #[error("malformed tree decomposition: {0}")]
    MalformedDecomposition(String),

    #[error("bag of size {size} exceeds the supported maximum of {max}")]
    BagTooLarge { size: usize, max: usize },

    #[error("graph has {vertices} vertices, above the enumeration limit {limit}")]
    EnumerationLimit { vertices: usize, limit: usize },

    #[error("graph is not unit-weighted")]
    NotUnweighted,

    #[error("epsilon must lie in (0, 1/2], got {0}")]
    InvalidEpsilon(String),

    #[error("rho must be at least 1, got {0}")]
    InvalidRho(String),

    #[error("stability function does not match the graph: {0}")]
    InvalidStability(String),

    #[error("invalid source instance: {0}")]
    InvalidSource(String),

    #[error("witness rejected: {0}")]
    InvalidWitness(String),

    #[error("extraction refused: {0}")]
    ExtractionRefused(String),

    #[error("no cut meets the requested stability: {0}")]
    Infeasible(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::BagTooLarge { .. } | Error::EnumerationLimit { .. } => ErrorKind::Resource,
            Error::Internal(_) => ErrorKind::Internal,
            _ => ErrorKind::Input,
        }
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

fn format_violations(v: &[Violation]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    parts.join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
