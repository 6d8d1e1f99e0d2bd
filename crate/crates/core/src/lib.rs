//! Incidence calculus.
//!
//! Uncertainty is carried by *incidences*: the set of sample-space points at
//! which a sentence is true. Connectives act on incidences by set algebra, so
//! the incidence of a compound sentence is always a function of the incidences
//! of its parts. Probabilities are recovered as the weight of an incidence.
//!
//! The crate is organised as:
//!
//! - [`samplespace`]: weighted sample spaces and the fixed-width bit vector
//!   used to represent incidences.
//! - [`logic`]: propositional formulas, the concrete syntax, and incidence
//!   evaluation.
//! - [`probability`]: exact probabilities, conditional probabilities,
//!   correlations and probability intervals.
//! - [`laf`]: the legal assignment finder, a bound propagation engine over
//!   `(inf, sup)` incidence pairs.
//! - [`assign`]: construction of incidences from target probabilities or from
//!   observation records.
//! - [`kb`]: the line-oriented knowledge base format.

pub mod assign;
pub mod error;
pub mod kb;
pub mod laf;
pub mod logic;
pub mod probability;
pub mod samplespace;

pub use error::{Error, ParseError, Result};
pub use kb::KnowledgeBase;
pub use laf::{BoundAssignment, Mode, PropagationOutcome, Status};
pub use logic::{Environment, Formula};
pub use probability::{Correlation, ProbabilityInterval};
pub use samplespace::{Incidence, SampleSpace};

/// Exact rational used for weights and probabilities.
pub type Rational = num::BigRational;
