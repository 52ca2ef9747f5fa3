//! Lower bounds and two-sided certificates.
//!
//! Three lower-bound routes, in increasing cost:
//!
//! - [`nesting_number`]: the deepest *nested collection* of request sets
//!   (levels of sizes 1, 2, 4, ...; every set in a level contains a disjoint
//!   pair of sets from the next level). A depth-L collection forces any
//!   scheme over any field to use at least L rows.
//! - [`mais_for_choices`] / [`mais_min_over_choices`]: fix one demanded
//!   message per client and find the longest client chain in which every
//!   earlier demand is side information of every later client; the minimum
//!   over all demand choices bounds the pliable optimum from below.
//! - [`decide_length1`]: exact test for a one-row scheme, i.e. an independent
//!   vertex set meeting every request set.
//!
//! [`certify`] combines these with the constructors and the oracle into a
//! [`BoundCertificate`] carrying explicit witnesses for both sides.

mod certify;
mod length1;
mod mais;
mod nesting;

pub use certify::{
    certify, validate_certificate, BoundCertificate, Budgets, CertificateError, LowerWitness,
    UpperSource,
};
pub use length1::{decide_length1, LengthOneOutcome};
pub use mais::{mais_for_choices, mais_min_over_choices, ChainWitness, MaisMin};
pub use nesting::{
    nesting_number, CollectionError, NestedCollection, NestingMode, NestingOutcome,
};

use thiserror::Error;

/// Errors shared by the bound searches.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    /// A demand choice named a message outside the client's request set.
    #[error("client {client} cannot demand message {message}")]
    InvalidChoice { client: usize, message: usize },
    /// The demand-choice space exceeds the enumeration budget; the search
    /// refuses rather than sampling.
    #[error("demand-choice space of size {product} exceeds the budget of {budget}")]
    ChoiceSpaceTooLarge { product: u128, budget: u64 },
    /// A budgeted search ran out of nodes before reaching a verdict.
    #[error("search budget exhausted")]
    BudgetExhausted,
    /// The instance exceeds a structural limit of the exact search.
    #[error("instance too large for this exact search: {what}")]
    InstanceTooLarge { what: &'static str },
}
