//! Unsupervised bilingual lexicon induction from co-occurrence statistics.
//!
//! Each language is represented by a `V × V` association matrix built from
//! co-occurrence counts. A matching between the two vocabularies is
//! initialized from sorted similarity profiles and refined by self-learning,
//! comparing rows of the association matrices restricted to matched columns.

pub mod align;
pub mod assoc;
pub mod bench;
pub mod cli;
pub mod cooc;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod kernels;
pub mod presets;

pub use error::{Error, Result};
