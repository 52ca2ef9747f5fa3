//! Bundled reference instances.
//!
//! Two small instances with known optimal lengths recur throughout the test
//! suite and the shipped fixture files. Both are also useful starting points
//! for exploring the toolkit by hand.
//!
//! - [`example1`]: 12 messages, 12 clients, max degree 5, optimum 3. The
//!   degree bound is loose here; the optimum is certified by a depth-3 nested
//!   collection.
//! - [`example2`]: 9 messages, 9 clients, every vertex of degree exactly 2,
//!   optimum 2 = max degree.

use crate::gf::FieldOrder;
use crate::instance::PicodInstance;
use crate::scheme::Scheme;

/// A reference instance plus its known-optimal scheme.
pub struct Fixture {
    pub instance: PicodInstance,
    /// A verified scheme of optimal length over GF(2).
    pub scheme: Scheme,
    /// Request sets in their original listing order (before canonicalization).
    pub listing: Vec<Vec<usize>>,
    /// `canonical_index[i]` is the canonical client position of `listing[i]`.
    pub canonical_index: Vec<usize>,
}

impl Fixture {
    fn build(message_count: usize, listing: Vec<Vec<usize>>, supports: &[&[usize]]) -> Self {
        let instance = PicodInstance::new(message_count, listing.clone())
            .expect("fixture instances are well-formed");
        let canonical_index = listing
            .iter()
            .map(|set| {
                instance
                    .client_index(set)
                    .expect("fixture listings have no duplicates")
            })
            .collect();
        let scheme = Scheme::from_supports(FieldOrder::BINARY, message_count, supports)
            .expect("fixture schemes are well-formed");
        Self {
            instance,
            scheme,
            listing,
            canonical_index,
        }
    }

    /// Canonical client index for a 1-based listing position.
    pub fn client(&self, listing_pos: usize) -> usize {
        self.canonical_index[listing_pos - 1]
    }
}

/// 12 messages, 12 clients; optimum 3 with max degree 5.
pub fn example1() -> Fixture {
    Fixture::build(
        12,
        vec![
            vec![1, 2, 3, 4, 5, 6, 8, 10, 12],
            vec![1, 2, 4, 8],
            vec![3, 5, 6, 10],
            vec![1, 2, 8],
            vec![4],
            vec![5, 10],
            vec![3],
            vec![1, 7, 9],
            vec![3, 9],
            vec![11],
            vec![1, 11, 12],
            vec![2, 11],
        ],
        &[&[1, 3, 4, 5], &[2, 6], &[4, 11]],
    )
}

/// 9 messages, 9 clients, all degrees 2; optimum 2.
pub fn example2() -> Fixture {
    Fixture::build(
        9,
        vec![
            vec![1],
            vec![2],
            vec![3],
            vec![4],
            vec![5],
            vec![6],
            vec![1, 2, 7, 8],
            vec![3, 4, 7, 9],
            vec![5, 6, 8, 9],
        ],
        &[&[1, 3, 5], &[2, 4, 6]],
    )
}
