//! Certified upper bounds for the unit sum height of totally complex quartic fields.

pub mod numerics;
pub mod ring;
pub mod catalog;
pub mod geometry;
pub mod lattice;
pub mod expansion;
pub mod rewriting;

pub use catalog::{catalog_entry, load_catalog, load_catalog_with_precision, CatalogEntry, CatalogError, Expected, Marker};
pub use expansion::{
    certify_field, unit_sum_representation, CriticalPointReport, DugMethod, ExpansionError, ExpansionResult,
    FieldCertification, FieldContext, UnitSumCertificate, UnitTerm,
};
pub use geometry::{Criterion, CoveringCheck, CoveringVerdict, Region};
pub use lattice::{CriticalSet, DigitAlphabet};
pub use numerics::{Cx, Real, DEFAULT_PRECISION_BITS};
pub use rewriting::{rewrite_to_signed, RewriteError, RewriteTrace, Word};
pub use ring::{Coords, Int, LaurentElement, Order, OrderElement};
