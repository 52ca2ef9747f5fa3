//! Nested collections of request sets and the depth search over them.

use std::collections::{BTreeMap, HashMap};

use crate::instance::PicodInstance;

/// Which notion of nesting to search for.
///
/// `Strict` asks for a full binary tree: one root set, and every set at
/// depth d < L holding two disjoint non-empty request sets at depth d + 1.
/// `Relaxed` computes, for every request set, one plus the best
/// min-depth over disjoint pairs of proper sub-request-sets, memoized.
/// The relaxed recursion can be evaluated bottom-up in polynomial time and
/// never reports less than the strict depth; both are implemented
/// independently so they can be cross-checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NestingMode {
    Strict,
    Relaxed,
}

/// A witness for a depth-L nested collection.
///
/// `levels[d]` lists the client indices whose request sets form level d + 1
/// of the tree (so `levels[0]` is the singleton root level and
/// `levels[d].len() == 2^d`). `child_pairs` maps every non-leaf client index
/// to its two designated children in the next level. Keys that are not
/// members of any non-leaf level are ignored by [`NestedCollection::validate`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NestedCollection {
    pub levels: Vec<Vec<usize>>,
    pub child_pairs: BTreeMap<usize, (usize, usize)>,
}

/// Why a claimed nested collection is not one.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CollectionError {
    #[error("level {level} has {found} edges, expected {expected}")]
    CardinalityMismatch {
        level: usize,
        expected: usize,
        found: usize,
    },
    #[error("client index {client} is out of range")]
    UnknownClient { client: usize },
    #[error("client {client} appears more than once in the collection")]
    DuplicateEdge { client: usize },
    #[error("clients {first} and {second} overlap within level {level}")]
    LevelOverlap {
        level: usize,
        first: usize,
        second: usize,
    },
    #[error("non-leaf client {client} has no recorded child pair")]
    MissingChildPair { client: usize },
    #[error("child {child} of client {client} is not in the next level")]
    ChildNotInNextLevel { client: usize, child: usize },
    #[error("request set of {child} is not contained in that of {client}")]
    ChildNotSubset { client: usize, child: usize },
}

impl NestedCollection {
    /// Depth of the collection (number of levels).
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Checks every defining property against `instance` and returns the
    /// depth. This is a from-scratch checker: it shares no state with the
    /// searches that produce collections.
    pub fn validate(&self, instance: &PicodInstance) -> Result<usize, CollectionError> {
        let n = instance.client_count();
        let mut seen = vec![false; n];
        for (d, level) in self.levels.iter().enumerate() {
            let expected = 1usize << d;
            if level.len() != expected {
                return Err(CollectionError::CardinalityMismatch {
                    level: d,
                    expected,
                    found: level.len(),
                });
            }
            for &c in level {
                if c >= n {
                    return Err(CollectionError::UnknownClient { client: c });
                }
                if seen[c] {
                    return Err(CollectionError::DuplicateEdge { client: c });
                }
                seen[c] = true;
            }
            for (i, &a) in level.iter().enumerate() {
                for &b in &level[i + 1..] {
                    if !disjoint(instance.client(a), instance.client(b)) {
                        return Err(CollectionError::LevelOverlap {
                            level: d,
                            first: a,
                            second: b,
                        });
                    }
                }
            }
        }
        for d in 0..self.levels.len().saturating_sub(1) {
            for &parent in &self.levels[d] {
                let &(a, b) = self
                    .child_pairs
                    .get(&parent)
                    .ok_or(CollectionError::MissingChildPair { client: parent })?;
                for child in [a, b] {
                    if !self.levels[d + 1].contains(&child) {
                        return Err(CollectionError::ChildNotInNextLevel {
                            client: parent,
                            child,
                        });
                    }
                    if !subset(instance.client(child), instance.client(parent)) {
                        return Err(CollectionError::ChildNotSubset {
                            client: parent,
                            child,
                        });
                    }
                }
                // a != b and their disjointness are implied by the per-level
                // overlap check together with request sets being non-empty.
            }
        }
        Ok(self.levels.len())
    }
}

/// Result of a nesting-depth search.
#[derive(Debug, Clone)]
pub struct NestingOutcome {
    /// Best depth found.
    pub length: usize,
    /// A collection witnessing `length` (empty when `length` is 0).
    pub collection: NestedCollection,
    /// True when the search proved no deeper collection exists; false when
    /// the node budget ran out first, in which case `length` is still a
    /// valid lower bound.
    pub exact: bool,
}

/// Computes the nesting depth of `instance` under `mode`, spending at most
/// `budget` search steps.
pub fn nesting_number(instance: &PicodInstance, mode: NestingMode, budget: u64) -> NestingOutcome {
    match mode {
        NestingMode::Relaxed => relaxed(instance, budget),
        NestingMode::Strict => strict(instance, budget),
    }
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

fn subset(small: &[usize], big: &[usize]) -> bool {
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// For each client, the ascending list of clients whose request sets are
/// proper subsets of its own.
fn proper_subedges(instance: &PicodInstance) -> Vec<Vec<usize>> {
    let n = instance.client_count();
    let mut subs = vec![Vec::new(); n];
    for (r, subs_r) in subs.iter_mut().enumerate() {
        for a in 0..n {
            if a != r
                && instance.client(a).len() < instance.client(r).len()
                && subset(instance.client(a), instance.client(r))
            {
                subs_r.push(a);
            }
        }
    }
    subs
}

fn relaxed(instance: &PicodInstance, budget: u64) -> NestingOutcome {
    let n = instance.client_count();
    let subs = proper_subedges(instance);
    // Process request sets in ascending size so every proper sub-edge has a
    // depth before its supersets are examined.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&r| (instance.client(r).len(), r));

    let mut depth = vec![0usize; n];
    let mut best_pair: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut remaining = budget;
    let mut exact = true;
    let mut processed: Vec<usize> = Vec::with_capacity(n);

    'edges: for &r in &order {
        let mut d = 1;
        let cand = &subs[r];
        for (i, &a) in cand.iter().enumerate() {
            for &b in &cand[i + 1..] {
                if remaining == 0 {
                    exact = false;
                    break 'edges;
                }
                remaining -= 1;
                if disjoint(instance.client(a), instance.client(b)) {
                    let reach = 1 + depth[a].min(depth[b]);
                    if reach > d {
                        d = reach;
                        best_pair[r] = Some((a, b));
                    }
                }
            }
        }
        depth[r] = d;
        processed.push(r);
    }

    let Some(&root) = processed
        .iter()
        .max_by_key(|&&r| (depth[r], std::cmp::Reverse(r)))
    else {
        return NestingOutcome {
            length: 0,
            collection: NestedCollection::default(),
            exact,
        };
    };
    let length = depth[root];
    let mut collection = NestedCollection {
        levels: vec![Vec::new(); length],
        ..NestedCollection::default()
    };
    expand(root, length, &best_pair, &mut collection, 0);
    for level in &mut collection.levels {
        level.sort_unstable();
    }
    NestingOutcome {
        length,
        collection,
        exact,
    }
}

/// Writes the tree rooted at `r`, truncated to `d` further levels, into
/// `collection` starting at level `at`. The recorded pair of a depth-d node
/// always has two children of depth at least d - 1, so truncation is safe.
fn expand(
    r: usize,
    d: usize,
    pair_of: &[Option<(usize, usize)>],
    collection: &mut NestedCollection,
    at: usize,
) {
    collection.levels[at].push(r);
    if d > 1 {
        let (a, b) = pair_of[r].expect("non-leaf node must have a recorded pair");
        collection.child_pairs.insert(r, (a, b));
        expand(a, d - 1, pair_of, collection, at + 1);
        expand(b, d - 1, pair_of, collection, at + 1);
    }
}

fn strict(instance: &PicodInstance, budget: u64) -> NestingOutcome {
    let n = instance.client_count();
    let max_edge = (0..n)
        .map(|r| instance.client(r).len())
        .max()
        .unwrap_or(0);
    let subs = proper_subedges(instance);

    struct Search<'a> {
        instance: &'a PicodInstance,
        subs: &'a [Vec<usize>],
        // (client, depth) -> chosen child pair, or None when infeasible.
        memo: HashMap<(usize, usize), Option<(usize, usize)>>,
        remaining: u64,
        exhausted: bool,
    }

    impl Search<'_> {
        fn feasible(&mut self, r: usize, d: usize) -> bool {
            if d == 1 {
                return true;
            }
            if let Some(entry) = self.memo.get(&(r, d)) {
                return entry.is_some();
            }
            if self.remaining == 0 {
                self.exhausted = true;
                return false;
            }
            self.remaining -= 1;
            let cand = self.subs[r].clone();
            for (i, &a) in cand.iter().enumerate() {
                for &b in &cand[i + 1..] {
                    if disjoint(self.instance.client(a), self.instance.client(b))
                        && self.feasible(a, d - 1)
                        && self.feasible(b, d - 1)
                    {
                        self.memo.insert((r, d), Some((a, b)));
                        return true;
                    }
                    if self.exhausted {
                        return false;
                    }
                }
            }
            // Only a fully explored node proves infeasibility.
            if !self.exhausted {
                self.memo.insert((r, d), None);
            }
            false
        }
    }

    let mut search = Search {
        instance,
        subs: &subs,
        memo: HashMap::new(),
        remaining: budget,
        exhausted: false,
    };

    let mut best: Option<(usize, usize)> = None; // (depth, root)
    let mut depth_l = 1usize;
    loop {
        // A depth-L tree needs 2^(L-1) leaves: that many pairwise disjoint
        // non-empty sets inside the root, and as many distinct request sets
        // in the last level alone.
        let leaves = 1u128 << (depth_l - 1);
        if leaves > n as u128 || leaves > max_edge as u128 {
            break;
        }
        let root = (0..n).find(|&r| search.feasible(r, depth_l));
        match root {
            Some(r) => best = Some((depth_l, r)),
            None => break,
        }
        depth_l += 1;
    }

    let Some((length, root)) = best else {
        return NestingOutcome {
            length: 0,
            collection: NestedCollection::default(),
            exact: !search.exhausted,
        };
    };
    let mut collection = NestedCollection {
        levels: vec![Vec::new(); length],
        ..NestedCollection::default()
    };
    expand_strict(root, length, &search.memo, &mut collection, 0);
    for level in &mut collection.levels {
        level.sort_unstable();
    }
    NestingOutcome {
        length,
        collection,
        exact: !search.exhausted,
    }
}

fn expand_strict(
    r: usize,
    d: usize,
    memo: &HashMap<(usize, usize), Option<(usize, usize)>>,
    collection: &mut NestedCollection,
    at: usize,
) {
    collection.levels[at].push(r);
    if d > 1 {
        let (a, b) = memo
            .get(&(r, d))
            .copied()
            .flatten()
            .expect("feasible non-leaf node must have a recorded pair");
        collection.child_pairs.insert(r, (a, b));
        expand_strict(a, d - 1, memo, collection, at + 1);
        expand_strict(b, d - 1, memo, collection, at + 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const BUDGET: u64 = 1_000_000;

    fn both_modes(instance: &PicodInstance) -> (NestingOutcome, NestingOutcome) {
        let s = nesting_number(instance, NestingMode::Strict, BUDGET);
        let r = nesting_number(instance, NestingMode::Relaxed, BUDGET);
        (s, r)
    }

    #[test]
    fn twelve_message_example_has_depth_three() {
        let fx = fixtures::example1();
        let (s, r) = both_modes(&fx.instance);
        assert_eq!(s.length, 3);
        assert_eq!(r.length, 3);
        assert!(s.exact && r.exact);
        assert_eq!(s.collection.validate(&fx.instance), Ok(3));
        assert_eq!(r.collection.validate(&fx.instance), Ok(3));
    }

    #[test]
    fn nine_message_example_has_depth_two_with_known_witness() {
        let fx = fixtures::example2();
        let (s, r) = both_modes(&fx.instance);
        assert_eq!(s.length, 2);
        assert_eq!(r.length, 2);
        assert!(s.exact && r.exact);
        assert_eq!(s.collection.validate(&fx.instance), Ok(2));
        // First feasible root in ascending order is the four-element set
        // {1,2,7,8}; its disjoint singleton sub-sets are {1} and {2}.
        assert_eq!(s.collection.levels[0], vec![fx.client(7)]);
        assert_eq!(
            s.collection.levels[1],
            vec![fx.client(1), fx.client(2)]
        );
    }

    #[test]
    fn strict_and_relaxed_agree_on_small_instances() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20260823);
        for _ in 0..150 {
            let m = rng.random_range(1..=7usize);
            let n = rng.random_range(1..=6usize);
            let clients: Vec<Vec<usize>> = (0..n)
                .map(|_| {
                    let k = rng.random_range(1..=m);
                    let mut set: Vec<usize> = (1..=m).collect();
                    set.shuffle(&mut rng);
                    set.truncate(k);
                    set
                })
                .collect();
            let inst = PicodInstance::new(m, clients).unwrap();
            let (s, r) = both_modes(&inst);
            assert_eq!(s.length, r.length, "modes disagree on {inst:?}");
            assert_eq!(s.collection.validate(&inst), Ok(s.length));
            assert_eq!(r.collection.validate(&inst), Ok(r.length));
        }
    }

    #[test]
    fn matching_instances_have_depth_one() {
        let inst = PicodInstance::new(6, vec![vec![1, 2], vec![3, 4], vec![5, 6]]).unwrap();
        let (s, r) = both_modes(&inst);
        assert_eq!(s.length, 1);
        assert_eq!(r.length, 1);
    }

    #[test]
    fn chain_of_supersets_without_disjoint_pairs_stays_at_one() {
        // {1} subset of {1,2} subset of {1,2,3}: no disjoint pair anywhere.
        let inst = PicodInstance::new(3, vec![vec![1], vec![1, 2], vec![1, 2, 3]]).unwrap();
        let (s, r) = both_modes(&inst);
        assert_eq!(s.length, 1);
        assert_eq!(r.length, 1);
    }

    #[test]
    fn three_level_tree_is_found() {
        // Root {1,2,3,4}, children {1,2} and {3,4}, leaves the singletons.
        let inst = PicodInstance::new(
            4,
            vec![
                vec![1],
                vec![2],
                vec![3],
                vec![4],
                vec![1, 2],
                vec![3, 4],
                vec![1, 2, 3, 4],
            ],
        )
        .unwrap();
        let (s, r) = both_modes(&inst);
        assert_eq!(s.length, 3);
        assert_eq!(r.length, 3);
        assert_eq!(s.collection.validate(&inst), Ok(3));
        let root = s.collection.levels[0][0];
        assert_eq!(inst.client(root), &[1, 2, 3, 4]);
    }

    #[test]
    fn validator_rejects_broken_collections() {
        // Canonical order is lexicographic: [1]=0, [1,2]=1, [2]=2, [3,4]=3.
        let inst = PicodInstance::new(
            4,
            vec![vec![1], vec![2], vec![1, 2], vec![3, 4]],
        )
        .unwrap();
        let good = NestedCollection {
            levels: vec![vec![1], vec![0, 2]],
            child_pairs: [(1, (0, 2))].into_iter().collect(),
        };
        assert_eq!(good.validate(&inst), Ok(2));

        let wrong_count = NestedCollection {
            levels: vec![vec![1, 3]],
            ..NestedCollection::default()
        };
        assert!(matches!(
            wrong_count.validate(&inst),
            Err(CollectionError::CardinalityMismatch { .. })
        ));

        let missing_pair = NestedCollection {
            levels: vec![vec![1], vec![0, 2]],
            child_pairs: BTreeMap::new(),
        };
        assert!(matches!(
            missing_pair.validate(&inst),
            Err(CollectionError::MissingChildPair { .. })
        ));

        // {3,4} is not a subset of {1,2}.
        let not_subset = NestedCollection {
            levels: vec![vec![1], vec![0, 3]],
            child_pairs: [(1, (0, 3))].into_iter().collect(),
        };
        assert!(matches!(
            not_subset.validate(&inst),
            Err(CollectionError::ChildNotSubset { .. })
        ));

        let duplicated = NestedCollection {
            levels: vec![vec![1], vec![1, 0]],
            child_pairs: [(1, (1, 0))].into_iter().collect(),
        };
        assert!(matches!(
            duplicated.validate(&inst),
            Err(CollectionError::DuplicateEdge { .. })
        ));
    }

    #[test]
    fn exhausted_budget_is_reported_and_still_sound() {
        let fx = fixtures::example1();
        let tiny = nesting_number(&fx.instance, NestingMode::Strict, 3);
        assert!(!tiny.exact);
        assert!(tiny.length <= 3);
        if tiny.length > 0 {
            assert_eq!(tiny.collection.validate(&fx.instance), Ok(tiny.length));
        }
        let tiny_r = nesting_number(&fx.instance, NestingMode::Relaxed, 3);
        assert!(!tiny_r.exact);
        assert!(tiny_r.length <= 3);
    }
}
