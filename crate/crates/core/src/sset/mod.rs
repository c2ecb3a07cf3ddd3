//! Truncated simplicial sets: presheaves on the ordinal categories 𝔻_1, 𝔻_2, 𝔻_3,
//! their standard cells and generating maps, and weak-equivalence classification.

mod classify;
mod complex;
mod standard;

pub use classify::{component, forest_invariant, forest_invariant_in, instance, pi0, weq_oracle, Components, Forest, Tree};
pub use complex::{level_of, ordinals, Cell, ComplexBuilder, Ordinals, SimplicialSet};
pub use standard::{
    bouquet, boundary, discrete, generators, horn, multigraph, multigraph_corpus, set_corpus, simplex, z2_classifying,
    StandardPiece,
};
