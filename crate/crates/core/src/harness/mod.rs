//! Headless replay, oracles and random traces.

pub mod driver;
pub mod gen;
pub mod oracle;
pub mod replay;
pub mod trace;

use thiserror::Error;

use crate::interactions::UnknownInteraction;
use crate::model::ModelError;
use crate::picking::PickError;

pub use driver::{Driver, StepOutcome};
pub use oracle::{oracle_guide_zone, oracle_hysteresis, HystOutcome, HystVerdict};
pub use replay::{replay, replay_with, ReplayReport};
pub use trace::{parse_expectations, parse_trace, Assertion, Expectation, Input, TraceRecord};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("malformed trace at line {line}: {message}")]
    MalformedTrace { line: usize, message: String },
    #[error("malformed expectations: {0}")]
    MalformedExpectations(String),
    #[error(transparent)]
    UnknownInteraction(#[from] UnknownInteraction),
    #[error(transparent)]
    Pick(#[from] PickError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}
