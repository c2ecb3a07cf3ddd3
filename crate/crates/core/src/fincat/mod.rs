//! Finite categories, finite presheaves on them, natural transformations, strict
//! finite colimits, and exhaustive lifting search.

mod category;
mod colimit;
mod lifting;
mod presheaf;
pub mod search;

pub use category::{Arrow, CategoryViolation, FinCategory};
pub use colimit::{coequalizer, colimit, coproduct, finite_colimit, parallel_pair_of, pushout, Cocone, ColimitMode, Diagram};
pub(crate) use lifting::{bottoms_for, lift_square};
pub use lifting::{
    enumerate_maps, find_isomorphism, find_lift, find_unliftable_square, for_each_map, has_rlp, LiftingProblem,
    UnliftableSquare,
};
pub use presheaf::{check_naturality, is_mono, FunctorialityViolation, NaturalityViolation, Presheaf, PresheafMorphism};
pub use search::{MapSearch, DEFAULT_BUDGET};

/// Validation report for a finite category; empty iff it is a category.
pub fn validate_category(c: &FinCategory) -> Vec<CategoryViolation> {
    c.validate()
}
