//! Fixtures shared by the criterion benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unitsum_core::rewriting::Word;
use unitsum_core::{catalog_entry, CatalogEntry, FieldContext, OrderElement, DEFAULT_PRECISION_BITS};

pub fn entry(id: &str) -> CatalogEntry {
    catalog_entry(id, DEFAULT_PRECISION_BITS).expect("catalog field")
}

pub fn context(id: &str) -> FieldContext {
    FieldContext::new(&entry(id)).expect("field context")
}

/// Seeded elements with coordinates in `[-bound, bound]`.
pub fn random_elements(ctx: &FieldContext, n: usize, bound: i64, seed: u64) -> Vec<OrderElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| ctx.order().from_i64(std::array::from_fn(|_| rng.random_range(-bound..=bound)))).collect()
}

pub fn random_words(n: usize, len: usize, bound: i64, seed: u64) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Word::from_digits(&(0..len).map(|_| rng.random_range(-bound..=bound)).collect::<Vec<_>>(), 0))
        .collect()
}
