//! Exact decision for one-transmission solvability.
//!
//! A single transmission suffices exactly when some independent vertex set
//! (at most one vertex per request set) meets every request set: summing
//! the chosen messages lets each client cancel the rest from side
//! information and recover its unique requested summand.

use super::BoundsError;
use crate::instance::PicodInstance;

/// Verdict of [`decide_length1`], with the witness set in the feasible case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LengthOneOutcome {
    /// `witness` is an ascending independent vertex set meeting every
    /// request set.
    Feasible { witness: Vec<usize> },
    Infeasible,
}

/// Decides whether a one-row scheme exists, by depth-first search branching
/// on the lowest-index uncovered client. `budget` caps the number of search
/// nodes; exceeding it aborts with [`BoundsError::BudgetExhausted`].
pub fn decide_length1(
    instance: &PicodInstance,
    budget: u64,
) -> Result<LengthOneOutcome, BoundsError> {
    let incidence = instance.incidence();
    let n = instance.client_count();

    struct Search<'a> {
        instance: &'a PicodInstance,
        incidence: &'a [Vec<usize>],
        // How many chosen vertices each request set currently contains.
        hits: Vec<u32>,
        chosen: Vec<usize>,
        remaining: u64,
    }

    impl Search<'_> {
        fn run(&mut self) -> Result<bool, BoundsError> {
            if self.remaining == 0 {
                return Err(BoundsError::BudgetExhausted);
            }
            self.remaining -= 1;
            let Some(next) = self.hits.iter().position(|&h| h == 0) else {
                return Ok(true);
            };
            for &v in self.instance.client(next) {
                // Adding v keeps independence iff no request set already
                // holds a chosen vertex alongside v.
                if self.incidence[v].iter().all(|&e| self.hits[e] == 0) {
                    for &e in &self.incidence[v] {
                        self.hits[e] += 1;
                    }
                    self.chosen.push(v);
                    if self.run()? {
                        return Ok(true);
                    }
                    self.chosen.pop();
                    for &e in &self.incidence[v] {
                        self.hits[e] -= 1;
                    }
                }
            }
            Ok(false)
        }
    }

    let mut search = Search {
        instance,
        incidence: &incidence,
        hits: vec![0; n],
        chosen: Vec::new(),
        remaining: budget,
    };
    if search.run()? {
        let mut witness = search.chosen;
        witness.sort_unstable();
        debug_assert!(instance.is_independent(&witness));
        Ok(LengthOneOutcome::Feasible { witness })
    } else {
        Ok(LengthOneOutcome::Infeasible)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scheme::{transmit_independent, Scheme};
    use crate::gf::FieldOrder;

    fn assert_feasible_witness(instance: &PicodInstance, outcome: LengthOneOutcome) {
        let LengthOneOutcome::Feasible { witness } = outcome else {
            panic!("expected a feasible outcome");
        };
        assert!(instance.is_independent(&witness));
        let out = transmit_independent(instance, &witness).unwrap();
        assert_eq!(out.satisfied.len(), instance.client_count());
        // The one-row scheme itself verifies.
        let scheme = Scheme::from_supports(FieldOrder::BINARY, instance.message_count(), &[witness])
            .unwrap();
        let report = crate::scheme::verify(instance, &scheme).unwrap();
        assert!(report.all_satisfied);
    }

    #[test]
    fn matchings_are_feasible() {
        let inst = PicodInstance::new(6, vec![vec![1, 2], vec![3, 4], vec![5, 6]]).unwrap();
        let outcome = decide_length1(&inst, 10_000).unwrap();
        assert_feasible_witness(&inst, outcome);
    }

    #[test]
    fn pairwise_overlapping_triangle_is_infeasible() {
        let inst =
            PicodInstance::new(3, vec![vec![1, 2], vec![1, 3], vec![2, 3]]).unwrap();
        assert_eq!(decide_length1(&inst, 10_000).unwrap(), LengthOneOutcome::Infeasible);
    }

    #[test]
    fn known_examples_are_infeasible() {
        for fx in [fixtures::example1(), fixtures::example2()] {
            assert_eq!(
                decide_length1(&fx.instance, 1_000_000).unwrap(),
                LengthOneOutcome::Infeasible
            );
        }
    }

    #[test]
    fn overlapping_sets_are_feasible_with_a_sound_witness() {
        let inst =
            PicodInstance::new(6, vec![vec![1, 5], vec![2, 5], vec![5, 6]]).unwrap();
        let LengthOneOutcome::Feasible { witness } = decide_length1(&inst, 10_000).unwrap()
        else {
            panic!("expected a feasible outcome");
        };
        assert!(inst.is_independent(&witness));
        for client in inst.clients() {
            assert!(witness.iter().any(|v| client.contains(v)));
        }
    }

    #[test]
    fn singleton_request_forces_its_vertex() {
        // {5} must be transmitted, and {1,5} then rules out adding 1.
        let inst = PicodInstance::new(6, vec![vec![5], vec![1, 5]]).unwrap();
        assert_eq!(
            decide_length1(&inst, 10_000).unwrap(),
            LengthOneOutcome::Feasible { witness: vec![5] }
        );
    }

    #[test]
    fn tiny_budget_aborts() {
        let fx = fixtures::example1();
        assert_eq!(
            decide_length1(&fx.instance, 2),
            Err(BoundsError::BudgetExhausted)
        );
    }

    #[test]
    fn agrees_with_exact_cover_length_on_randoms() {
        use rand::prelude::*;
        use crate::construct::min_cover_exact;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(97);
        for _ in 0..150 {
            let m = rng.random_range(2..=7usize);
            let n = rng.random_range(1..=6usize);
            let clients: Vec<Vec<usize>> = (0..n)
                .map(|_| {
                    let k = rng.random_range(1..=m.min(3));
                    let mut all: Vec<usize> = (1..=m).collect();
                    all.shuffle(&mut rng);
                    all.truncate(k);
                    all
                })
                .collect();
            let inst = PicodInstance::new(m, clients).unwrap();
            let one = decide_length1(&inst, 1 << 20).unwrap();
            let cover = min_cover_exact(&inst, 1 << 20).unwrap();
            assert_eq!(
                matches!(one, LengthOneOutcome::Feasible { .. }),
                cover.length == 1,
                "disagreement on {inst:?}"
            );
        }
    }
}
