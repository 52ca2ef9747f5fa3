//! Randomized model and format invariants.

use proptest::prelude::*;

use picod::format::{parse_instance, parse_scheme, serialize_instance, serialize_scheme};
use picod::gf::{FieldOrder, RowMatrix};
use picod::instance::PicodInstance;
use picod::scheme::{transmit_independent, Scheme};

fn instance_strategy() -> impl Strategy<Value = PicodInstance> {
    (1usize..=12).prop_flat_map(|m| {
        proptest::collection::vec(proptest::collection::btree_set(1..=m, 1..=m), 1..=10).prop_map(
            move |sets| {
                let clients: Vec<Vec<usize>> =
                    sets.into_iter().map(|s| s.into_iter().collect()).collect();
                PicodInstance::new(m, clients).expect("non-empty in-range sets")
            },
        )
    })
}

proptest! {
    #[test]
    fn degree_sum_equals_total_request_size(inst in instance_strategy()) {
        let degrees = inst.degrees();
        let by_vertex: usize = (1..=inst.message_count()).map(|v| degrees.degree(v)).sum();
        let by_client: usize = inst.clients().iter().map(|set| set.len()).sum();
        prop_assert_eq!(by_vertex, by_client);
    }

    #[test]
    fn components_partition_clients_and_active_vertices(inst in instance_strategy()) {
        let parts = inst.components();
        let mut client_seen = vec![0usize; inst.client_count()];
        let mut vertex_seen = vec![0usize; inst.message_count() + 1];
        for comp in &parts.components {
            for &c in &comp.client_indices {
                client_seen[c] += 1;
            }
            for &v in &comp.vertices {
                vertex_seen[v] += 1;
            }
            // Each component's induced instance carries exactly its clients.
            prop_assert_eq!(comp.instance.client_count(), comp.client_indices.len());
        }
        for (c, &count) in client_seen.iter().enumerate() {
            prop_assert_eq!(count, 1, "client {} in {} components", c, count);
        }
        let degrees = inst.degrees();
        for (v, &seen) in vertex_seen.iter().enumerate().skip(1) {
            let expected = usize::from(degrees.degree(v) > 0);
            prop_assert_eq!(seen, expected, "vertex {}", v);
        }
    }

    #[test]
    fn independence_is_closed_under_subsets(
        inst in instance_strategy(),
        order in proptest::collection::vec(0usize..1000, 1..=12),
    ) {
        // Build an independent set greedily along a pseudo-random order.
        let m = inst.message_count();
        let mut vertices: Vec<usize> = (1..=m).collect();
        vertices.sort_by_key(|&v| order.get(v % order.len()).copied().unwrap_or(0));
        let mut iset: Vec<usize> = Vec::new();
        for v in vertices {
            iset.push(v);
            if !inst.is_independent(&iset) {
                iset.pop();
            }
        }
        prop_assert!(inst.is_independent(&iset));
        for drop in 0..iset.len() {
            let mut sub = iset.clone();
            sub.remove(drop);
            prop_assert!(inst.is_independent(&sub));
        }
    }

    #[test]
    fn single_transmission_satisfies_exactly_once_hit_clients(
        inst in instance_strategy(),
    ) {
        // Ascending greedy maximal independent set.
        let mut iset: Vec<usize> = Vec::new();
        for v in 1..=inst.message_count() {
            iset.push(v);
            if !inst.is_independent(&iset) {
                iset.pop();
            }
        }
        let outcome = transmit_independent(&inst, &iset).expect("set is independent");
        let expected: Vec<usize> = (0..inst.client_count())
            .filter(|&i| {
                inst.client(i).iter().filter(|v| iset.contains(v)).count() == 1
            })
            .collect();
        prop_assert_eq!(outcome.satisfied, expected);
    }

    #[test]
    fn instance_text_round_trips(inst in instance_strategy()) {
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).expect("own serialization parses");
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize_instance(&back), text);
    }

    #[test]
    fn support_scheme_text_round_trips(
        inst in instance_strategy(),
        picks in proptest::collection::vec(proptest::collection::btree_set(1usize..=12, 1..=6), 1..=4),
    ) {
        let m = inst.message_count();
        let supports: Vec<Vec<usize>> = picks
            .into_iter()
            .map(|s| s.into_iter().filter(|&v| v <= m).collect::<Vec<_>>())
            .filter(|s: &Vec<usize>| !s.is_empty())
            .collect();
        prop_assume!(!supports.is_empty());
        let scheme = Scheme::from_supports(FieldOrder::BINARY, m, &supports).unwrap();
        let text = serialize_scheme(&scheme);
        let back = parse_scheme(&text).expect("own serialization parses");
        prop_assert_eq!(back, scheme);
    }

    #[test]
    fn dense_scheme_text_round_trips(
        rows in proptest::collection::vec(
            proptest::collection::vec(0u16..3, 5),
            1..=3,
        ),
    ) {
        let field = FieldOrder::new(3).unwrap();
        let mut matrix = RowMatrix::zero(field, rows.len(), 5);
        for (r, row) in rows.iter().enumerate() {
            for (c, &val) in row.iter().enumerate() {
                matrix.set(r, c, val);
            }
        }
        let scheme = Scheme::new(matrix);
        let text = serialize_scheme(&scheme);
        let back = parse_scheme(&text).expect("own serialization parses");
        prop_assert_eq!(back, scheme);
    }
}
