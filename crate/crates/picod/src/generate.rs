//! Seeded random instance generators for tests and benchmarks.
//!
//! All generators are deterministic for a fixed seed and parameter set
//! (backed by a counter-based stream cipher RNG), so corpora can be
//! reproduced from their parameters alone.

use rand::prelude::*;
use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::PicodInstance;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` pairwise-disjoint request sets of size `k` over `[m]`, placed on a
/// random subset of the messages. The result always has maximum degree 1.
pub fn matching(m: usize, n: usize, k: usize, seed: u64) -> Result<PicodInstance, GenerateError> {
    if n == 0 || k == 0 {
        return Err(GenerateError::Infeasible(
            "matching needs at least one client and positive set size".into(),
        ));
    }
    if n.saturating_mul(k) > m {
        return Err(GenerateError::Infeasible(format!(
            "matching needs n*k <= m, got {n}*{k} > {m}"
        )));
    }
    let mut rng = rng_for(seed);
    let mut pool: Vec<usize> = (1..=m).collect();
    pool.shuffle(&mut rng);
    let clients: Vec<Vec<usize>> = pool[..n * k].chunks(k).map(|c| c.to_vec()).collect();
    Ok(PicodInstance::new(m, clients).expect("disjoint non-empty sets are always valid"))
}

fn binomial(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((m - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// `n` distinct request sets drawn uniformly among the size-`k` subsets of
/// `[m]`, resampling on collision.
pub fn uniform_k(m: usize, n: usize, k: usize, seed: u64) -> Result<PicodInstance, GenerateError> {
    if n == 0 || k == 0 || k > m {
        return Err(GenerateError::Infeasible(
            "uniform-k needs n >= 1 and 1 <= k <= m".into(),
        ));
    }
    if binomial(m, k) < n as u128 {
        return Err(GenerateError::Infeasible(format!(
            "cannot pick {n} distinct size-{k} subsets of [{m}]"
        )));
    }
    let mut rng = rng_for(seed);
    let mut seen = std::collections::BTreeSet::new();
    let mut attempts: u64 = 0;
    while seen.len() < n {
        attempts += 1;
        if attempts > 10_000_000 {
            return Err(GenerateError::Infeasible(
                "resampling did not converge; parameters leave too few distinct sets".into(),
            ));
        }
        let mut set: Vec<usize> = sample(&mut rng, m, k).iter().map(|i| i + 1).collect();
        set.sort_unstable();
        seen.insert(set);
    }
    let clients: Vec<Vec<usize>> = seen.into_iter().collect();
    Ok(PicodInstance::new(m, clients).expect("distinct non-empty subsets are always valid"))
}

/// Parameters for [`nested_tree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NestedTreeParams {
    /// Levels of the planted tree; the strict nesting depth is at least this.
    pub depth: usize,
    /// Messages owned exclusively by each leaf client.
    pub leaf_size: usize,
    /// Extra random clients appended after the planted structure.
    pub noise_clients: usize,
    /// Messages never used by the planted tree (noise may touch them).
    pub extra_messages: usize,
}

/// Plants a complete binary tree of clients: `2^(depth-1)` disjoint leaf
/// sets, with every internal node requesting the union of its subtree's
/// leaves. Siblings are disjoint by construction, so the tree itself is a
/// depth-`depth` nested collection; extra clients can only add further
/// structure, never remove it.
pub fn nested_tree(params: &NestedTreeParams, seed: u64) -> Result<PicodInstance, GenerateError> {
    let NestedTreeParams {
        depth,
        leaf_size,
        noise_clients,
        extra_messages,
    } = *params;
    if depth == 0 || leaf_size == 0 {
        return Err(GenerateError::Infeasible(
            "nested-tree needs depth >= 1 and leaf_size >= 1".into(),
        ));
    }
    if depth > 16 {
        return Err(GenerateError::Infeasible(
            "nested-tree depth above 16 would plant an astronomical client count".into(),
        ));
    }
    let leaves = 1usize << (depth - 1);
    let m = leaves * leaf_size + extra_messages;
    let mut rng = rng_for(seed);
    let mut pool: Vec<usize> = (1..=m).collect();
    pool.shuffle(&mut rng);
    let leaf_ground: Vec<&[usize]> = pool[..leaves * leaf_size].chunks(leaf_size).collect();

    let mut clients: Vec<Vec<usize>> = Vec::new();
    for level in 0..depth {
        let nodes = 1usize << level;
        let span = leaves >> level;
        for node in 0..nodes {
            let set: Vec<usize> = (node * span..(node + 1) * span)
                .flat_map(|leaf| leaf_ground[leaf].iter().copied())
                .collect();
            clients.push(set);
        }
    }
    for _ in 0..noise_clients {
        let size = rng.random_range(1..=(2 * leaf_size).min(m));
        let set: Vec<usize> = sample(&mut rng, m, size).iter().map(|i| i + 1).collect();
        clients.push(set);
    }
    Ok(PicodInstance::new(m, clients).expect("planted sets are non-empty and in range"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{nesting_number, NestingMode};

    #[test]
    fn matching_is_disjoint_and_deterministic() {
        let a = matching(10, 5, 2, 7).unwrap();
        let b = matching(10, 5, 2, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.client_count(), 5);
        assert_eq!(a.degrees().max_degree(), 1);
        assert!(a.clients().iter().all(|s| s.len() == 2));

        let c = matching(10, 5, 2, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn matching_rejects_overfull_parameters() {
        assert!(matching(10, 6, 2, 0).is_err());
        assert!(matching(5, 1, 0, 0).is_err());
    }

    #[test]
    fn uniform_k_yields_distinct_sets() {
        let inst = uniform_k(8, 8, 3, 42).unwrap();
        assert_eq!(inst.client_count(), 8);
        assert!(inst.clients().iter().all(|s| s.len() == 3));
        // Canonical order is strictly increasing, hence all distinct.
        for pair in inst.clients().windows(2) {
            assert!(pair[0] < pair[1]);
        }
        assert_eq!(inst, uniform_k(8, 8, 3, 42).unwrap());
    }

    #[test]
    fn uniform_k_can_exhaust_all_subsets() {
        // C(4,2) = 6: asking for all of them must terminate.
        let inst = uniform_k(4, 6, 2, 1).unwrap();
        assert_eq!(inst.client_count(), 6);
        assert!(uniform_k(4, 7, 2, 1).is_err());
    }

    #[test]
    fn nested_tree_plants_its_depth() {
        for depth in 1..=4 {
            let inst = nested_tree(
                &NestedTreeParams {
                    depth,
                    leaf_size: 2,
                    noise_clients: 0,
                    extra_messages: 0,
                },
                11,
            )
            .unwrap();
            assert_eq!(inst.client_count(), (1 << depth) - 1);
            let found = nesting_number(&inst, NestingMode::Strict, 1_000_000);
            // Without noise the client count caps the depth at exactly the
            // planted value.
            assert_eq!(found.length, depth);
            assert!(found.exact);
        }
    }

    #[test]
    fn nested_tree_with_noise_keeps_the_floor() {
        for seed in [1, 2, 3] {
            let inst = nested_tree(
                &NestedTreeParams {
                    depth: 3,
                    leaf_size: 2,
                    noise_clients: 4,
                    extra_messages: 3,
                },
                seed,
            )
            .unwrap();
            let found = nesting_number(&inst, NestingMode::Strict, 1_000_000);
            assert!(found.length >= 3, "seed {seed} lost the planted depth");
            assert_eq!(inst, nested_tree(
                &NestedTreeParams {
                    depth: 3,
                    leaf_size: 2,
                    noise_clients: 4,
                    extra_messages: 3,
                },
                seed,
            )
            .unwrap());
        }
    }
}
