use thiserror::Error;

use crate::slope::Slope;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("(0, 0) is not a slope")]
    ZeroVector,
    #[error("integer overflow while {0}")]
    Overflow(&'static str),
    #[error("transform ({a} {b}; {c} {d}) is not unimodular (det = {det})")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64, det: i128 },
    #[error("malformed slope literal {0:?}")]
    BadLiteral(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: slope {slope} duplicates line {first} after canonicalization")]
    Duplicate { line: usize, first: usize, slope: Slope },
    #[error("empty slope set")]
    EmptySet,
    #[error("diameter bound {diameter} exceeds the search guard {guard}; pass an explicit override")]
    GuardExceeded { diameter: u64, guard: u64 },
    #[error("{0}")]
    Unsupported(String),
    #[error("slope {slope} is at distance {distance} from 1/0; the proof needs every element within 2")]
    FarFromMeridian { slope: Slope, distance: u64 },
    #[error("no slope within distance {k} of every element")]
    NoCenter { k: u64 },
    #[error("inequality fails: {0}")]
    Hypothesis(String),
    #[error("degenerate cusp torus: translations are collinear (det = {0})")]
    Degenerate(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
