//! Error type shared across the engine.

use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A sequence or key repeats an index where it must not.
    RepeatedIndex(String),
    /// The omega multiplication rule rejects an empty word.
    EmptyOmegaWord,
    /// A residue was requested at a pole of order two or more.
    HigherOrderPole(String),
    /// Random sampling kept hitting denominator zeros.
    DegenerateSample,
    /// A form has a pole on a locus where regularity was required.
    PoleObstruction(String),
    /// A vector failed to lie in the span it must belong to.
    NotInSpan(String),
    /// A linear system that must be solvable was singular.
    SingularSystem(String),
    /// Input outside the supported shape (degrees, loci, group type).
    Unsupported(String),
    /// Invalid run configuration.
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::RepeatedIndex(s) => write!(f, "repeated index: {s}"),
            Error::EmptyOmegaWord => write!(f, "empty omega word"),
            Error::HigherOrderPole(s) => write!(f, "higher-order pole: {s}"),
            Error::DegenerateSample => write!(f, "degenerate sample: could not avoid denominator zeros"),
            Error::PoleObstruction(s) => write!(f, "pole obstruction: {s}"),
            Error::NotInSpan(s) => write!(f, "vector not in required span: {s}"),
            Error::SingularSystem(s) => write!(f, "singular linear system: {s}"),
            Error::Unsupported(s) => write!(f, "unsupported input: {s}"),
            Error::InvalidConfig(s) => write!(f, "invalid configuration: {s}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
