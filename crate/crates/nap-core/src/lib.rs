//! Exact non-Archimedean probability on finite sample spaces.
//!
//! The crate provides, with exact rational arithmetic throughout:
//!
//! - [`field`]: the ordered field Q(e) of rational functions in one
//!   positive infinitesimal, with canonical forms, a decidable total order,
//!   and standard parts;
//! - [`lexi`]: e-adic valuations, remainder/approximation sequences, and
//!   lexicographic comparison of field values;
//! - [`events`]: finite sample spaces with weighted, ranked outcomes, their
//!   induced Q(e)-valued measures, and a finite-snapshot evaluator;
//! - [`popper`]: Popper conditional-probability tables, the axiom checker,
//!   and the van Fraassen rank recursion;
//! - [`bridge`]: conversions between Popper tables and ranked models, with
//!   exhaustive standard-part agreement checks and the snapshot oracle;
//! - [`eventlang`]: the propositional event-expression language used to
//!   name events.

pub mod bridge;
pub mod events;
pub mod eventlang;
pub mod field;
pub mod lexi;
pub mod popper;
