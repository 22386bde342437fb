//! Decides whether a number field satisfying the standing hypotheses
//! (odd discriminant, narrow class number one) admits no nonzero abelian
//! variety with everywhere good reduction, and tallies batch results.
//!
//! The decision procedure runs entirely in exact arithmetic: Hermite and
//! Smith normal forms over the integers, residue rings at primes over 2,
//! narrow ray class groups by the unit-quotient formula, a symbolic
//! rewriting calculus on filtrations of order-2 group schemes, and a
//! root-discriminant degree gate.

pub mod abgroup;
pub mod cli;
pub mod fieldcore;
pub mod ingest;
pub mod mat;
pub mod pipeline;
pub mod poly;
pub mod rayclass;
pub mod schemecalc;

pub use fieldcore::{Field, FieldError, FieldRecord, IdealHnf, PrimeAboveTwo};
pub use pipeline::{OdlyzkoTable, Outcome, Path, Verdict};
