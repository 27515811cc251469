//! Synthesized sentence / meaning-representation testbed.
//!
//! A context-free fragment of English is generated from a small lexicon and
//! mapped, through lambda-calculus composition, to three scoped meaning
//! representations: first-order logic, variable-free prefix formulas, and
//! DRS clausal form. The crate also builds controlled train/test splits and
//! scores parser predictions by exact match, clause matching, polarity and
//! logical entailment.

pub mod dataset;
pub mod drs;
pub mod entail;
pub mod error;
pub mod grammar;
pub mod fol;
pub mod lambda;
pub mod lexicon;
pub mod metrics;
pub mod pipeline;
pub mod polarity;
pub mod semantics;
pub mod splits;
pub mod vf;

pub use error::{Error, Result};
pub use grammar::{DerivationTree, Fragment, PhenomenonTags};
pub use lexicon::Lexicon;
