//! Computational model categories on finite presheaf categories.
//!
//! The [`fincat`] layer provides finite categories, presheaves and lifting search.
//! [`model`] runs the small object argument and derives replacements, cylinders,
//! left homotopy and weak equivalences from generating sets. [`sset`] supplies the
//! truncated simplicial instances, [`chain`] chain complexes over prime fields, and
//! [`hocat`] the homotopy-category calculus built on top.

pub mod chain;
pub mod error;
pub mod fincat;
pub mod hocat;
pub mod model;
pub mod sset;

pub use error::{Error, Result};
