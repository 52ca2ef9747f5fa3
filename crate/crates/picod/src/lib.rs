//! Pliable index coding (PICOD) toolkit.
//!
//! A pliable index coding instance is a hypergraph on `m` message vertices:
//! each of `n` clients is a hyperedge, the *request set* of messages it would
//! accept. Every message outside a client's request set is that client's side
//! information. A scalar-linear scheme over a prime field broadcasts a small
//! number of coded rows; a client is satisfied as soon as it can decode *any
//! one* message in its request set after cancelling its side information.
//!
//! The crate provides, layer by layer:
//!
//! - [`instance`]: the hypergraph model (construction, degrees, connected
//!   components, induced subinstances, independent sets);
//! - [`gf`]: dense row matrices over prime fields GF(p), with a word-packed
//!   GF(2) fast path;
//! - [`scheme`]: linear schemes and the decodability verifier;
//! - [`construct`]: scheme constructors (degree-descending greedy coloring, a
//!   plain greedy-cover baseline, and an exact minimum conflict-free cover);
//! - [`bounds`]: lower bounds (nested collections, demand-chain search,
//!   length-one decision) and two-sided certificates;
//! - [`oracle`]: an exhaustive optimum finder for scalar-linear schemes;
//! - [`format`]: line-oriented text files for instances, schemes, and
//!   certificates;
//! - [`generate`]: seeded instance generators;
//! - [`fixtures`]: two bundled reference instances used throughout the tests.
//!
//! Messages are indexed `1..=m` everywhere, including the file formats.
//! Clients are kept in a canonical order (request sets sorted ascending, then
//! the list of sets sorted lexicographically, duplicates removed), so equal
//! instances always produce identical algorithm runs.

pub mod bounds;
pub mod construct;
pub mod fixtures;
pub mod format;
pub mod generate;
pub mod gf;
pub mod instance;
pub mod oracle;
pub mod scheme;

pub use bounds::{BoundCertificate, ChainWitness, NestedCollection};
pub use construct::{Coloring, ConstructionTrace};
pub use gf::{FieldOrder, RowMatrix};
pub use instance::{ComponentPartition, DegreeProfile, PicodInstance};
pub use oracle::OracleResult;
pub use scheme::{SatisfactionReport, Scheme};
