//! The pliable index coding hypergraph model.
//!
//! An instance has messages `1..=m` as vertices and one hyperedge per client:
//! the client's request set. The degree of a vertex is the number of clients
//! requesting it; a vertex set is independent when no client requests more
//! than one of its members. Connected components may be served by separate
//! schemes and recombined, so the partition is part of the core model.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Errors raised while building an instance.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    /// A request set was empty. Empty requests are meaningless in the model
    /// (the client would already be satisfied) and are rejected outright.
    #[error("client {client} has an empty request set")]
    EmptyRequestSet { client: usize },
    /// A request mentioned a message outside `1..=m`.
    #[error("client {client} requests message {index}, outside 1..={message_count}")]
    IndexOutOfRange {
        client: usize,
        index: usize,
        message_count: usize,
    },
    /// No messages at all.
    #[error("message count must be at least 1")]
    NoMessages,
    /// No clients. An instance without clients only arises from induced
    /// subinstances, never from direct construction.
    #[error("an instance needs at least one client")]
    NoClients,
}

/// An immutable pliable index coding instance in canonical form.
///
/// Canonical form: each request set is sorted ascending, the sets are ordered
/// lexicographically, and duplicate sets are removed. Construction through
/// [`PicodInstance::new`] establishes the form; every accessor exposes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PicodInstance {
    message_count: usize,
    clients: Vec<Vec<usize>>,
}

impl PicodInstance {
    /// Builds a canonical instance from `m` and raw request sets.
    ///
    /// Within-set duplicates and duplicate sets are silently dropped (the
    /// deduplication is logged). Empty sets and out-of-range indices are
    /// errors; client numbers in errors refer to the input order, 1-based.
    pub fn new<I, S>(message_count: usize, requests: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = usize>,
    {
        if message_count == 0 {
            return Err(ModelError::NoMessages);
        }
        let mut clients: Vec<Vec<usize>> = Vec::new();
        for (pos, raw) in requests.into_iter().enumerate() {
            let set: BTreeSet<usize> = raw.into_iter().collect();
            if set.is_empty() {
                return Err(ModelError::EmptyRequestSet { client: pos + 1 });
            }
            if let Some(&bad) = set.iter().find(|&&v| v < 1 || v > message_count) {
                return Err(ModelError::IndexOutOfRange {
                    client: pos + 1,
                    index: bad,
                    message_count,
                });
            }
            clients.push(set.into_iter().collect());
        }
        if clients.is_empty() {
            return Err(ModelError::NoClients);
        }
        let before = clients.len();
        clients.sort();
        clients.dedup();
        if clients.len() < before {
            log::debug!(
                "deduplicated {} duplicate request set(s) during construction",
                before - clients.len()
            );
        }
        Ok(Self {
            message_count,
            clients,
        })
    }

    /// Internal constructor for induced subinstances; `clients` must already
    /// be canonical. Allows an empty client list.
    pub(crate) fn from_canonical(message_count: usize, clients: Vec<Vec<usize>>) -> Self {
        debug_assert!(clients.windows(2).all(|w| w[0] < w[1]));
        Self {
            message_count,
            clients,
        }
    }

    /// Number of messages `m`.
    pub fn message_count(&self) -> usize {
        self.message_count
    }

    /// Number of clients `n` after deduplication.
    pub fn client_count(&self) -> usize {
        self.clients.len()
    }

    /// All request sets in canonical order, each sorted ascending.
    pub fn clients(&self) -> &[Vec<usize>] {
        &self.clients
    }

    /// Request set of the client at `idx` (0-based canonical position).
    pub fn client(&self, idx: usize) -> &[usize] {
        &self.clients[idx]
    }

    /// Canonical position of a request set, if present. `set` must be sorted.
    pub fn client_index(&self, set: &[usize]) -> Option<usize> {
        self.clients.binary_search_by(|c| c.as_slice().cmp(set)).ok()
    }

    /// True when the instance has no clients (only possible for induced
    /// subinstances).
    pub fn is_empty(&self) -> bool {
        self.clients.is_empty()
    }

    /// Whether `client`'s request set contains message `v`.
    pub fn requests(&self, client: usize, v: usize) -> bool {
        self.clients[client].binary_search(&v).is_ok()
    }

    /// Per-vertex degrees (number of clients requesting each message).
    pub fn degrees(&self) -> DegreeProfile {
        let mut per_vertex = vec![0usize; self.message_count + 1];
        for set in &self.clients {
            for &v in set {
                per_vertex[v] += 1;
            }
        }
        let max_degree = per_vertex.iter().copied().max().unwrap_or(0);
        DegreeProfile {
            per_vertex,
            max_degree,
        }
    }

    /// Client indices (0-based) sorted by vertex, as an incidence list:
    /// entry `v` lists the clients requesting message `v`.
    pub(crate) fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.message_count + 1];
        for (i, set) in self.clients.iter().enumerate() {
            for &v in set {
                inc[v].push(i);
            }
        }
        inc
    }

    /// Connected components: vertices of degree at least one, grouped by
    /// shared clients. Degree-zero vertices belong to no component.
    pub fn components(&self) -> ComponentPartition {
        let mut parent: Vec<usize> = (0..=self.message_count).collect();
        fn find(parent: &mut [usize], v: usize) -> usize {
            let mut root = v;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = v;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        for set in &self.clients {
            let first = set[0];
            for &v in &set[1..] {
                let (a, b) = (find(&mut parent, first), find(&mut parent, v));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let degrees = self.degrees();
        let mut roots: Vec<usize> = Vec::new();
        let mut vertices_of: Vec<Vec<usize>> = Vec::new();
        for v in 1..=self.message_count {
            if degrees.degree(v) == 0 {
                continue;
            }
            let root = find(&mut parent, v);
            match roots.binary_search(&root) {
                Ok(pos) => vertices_of[pos].push(v),
                Err(pos) => {
                    roots.insert(pos, root);
                    vertices_of.insert(pos, vec![v]);
                }
            }
        }
        let components = vertices_of
            .into_iter()
            .map(|vertices| {
                let client_indices: Vec<usize> = self
                    .clients
                    .iter()
                    .enumerate()
                    .filter(|(_, set)| vertices.binary_search(&set[0]).is_ok())
                    .map(|(i, _)| i)
                    .collect();
                let clients = client_indices
                    .iter()
                    .map(|&i| self.clients[i].clone())
                    .collect();
                Component {
                    vertices,
                    client_indices,
                    instance: PicodInstance::from_canonical(self.message_count, clients),
                }
            })
            .collect();
        ComponentPartition { components }
    }

    /// Induced subinstance on `keep`: retains exactly the clients whose
    /// request sets lie inside `keep`. Vertex numbering is preserved and the
    /// message count is unchanged; the result may have no clients.
    pub fn induced(&self, keep: &BTreeSet<usize>) -> PicodInstance {
        let clients: Vec<Vec<usize>> = self
            .clients
            .iter()
            .filter(|set| set.iter().all(|v| keep.contains(v)))
            .cloned()
            .collect();
        PicodInstance::from_canonical(self.message_count, clients)
    }

    /// Whether no client requests more than one member of `vset`.
    /// Out-of-range vertices are a caller bug and panic.
    pub fn is_independent(&self, vset: &[usize]) -> bool {
        let mut marked = vec![false; self.message_count + 1];
        for &v in vset {
            assert!(
                v >= 1 && v <= self.message_count,
                "vertex {v} outside 1..={}",
                self.message_count
            );
            marked[v] = true;
        }
        self.clients
            .iter()
            .all(|set| set.iter().filter(|&&v| marked[v]).count() <= 1)
    }
}

impl fmt::Display for PicodInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "picod instance: {} messages, {} clients",
            self.message_count,
            self.clients.len()
        )
    }
}

/// Degrees of every vertex plus the maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    per_vertex: Vec<usize>,
    max_degree: usize,
}

impl DegreeProfile {
    /// Degree of message `v` (1-based).
    pub fn degree(&self, v: usize) -> usize {
        self.per_vertex[v]
    }

    /// Maximum degree over all vertices; 0 for an empty instance.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Vertices of maximum degree, ascending.
    pub fn max_degree_vertices(&self) -> Vec<usize> {
        (1..self.per_vertex.len())
            .filter(|&v| self.per_vertex[v] == self.max_degree && self.max_degree > 0)
            .collect()
    }
}

/// One connected component of an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Vertices of the component, ascending.
    pub vertices: Vec<usize>,
    /// Positions of the component's clients in the parent instance.
    pub client_indices: Vec<usize>,
    /// Induced subinstance (same message count as the parent).
    pub instance: PicodInstance,
}

/// All connected components, ordered by smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    pub components: Vec<Component>,
}

impl ComponentPartition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn builds_canonical_instance() {
        let inst = PicodInstance::new(4, vec![vec![3, 1], vec![2], vec![1, 3]]).unwrap();
        // {1,3} appears twice and is deduplicated; sets are sorted.
        assert_eq!(inst.client_count(), 2);
        assert_eq!(inst.clients(), &[vec![1, 3], vec![2]]);
        assert_eq!(inst.client_index(&[1, 3]), Some(0));
        assert_eq!(inst.client_index(&[3]), None);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            PicodInstance::new(3, vec![vec![1], vec![]]),
            Err(ModelError::EmptyRequestSet { client: 2 })
        );
        assert_eq!(
            PicodInstance::new(3, vec![vec![4]]),
            Err(ModelError::IndexOutOfRange {
                client: 1,
                index: 4,
                message_count: 3
            })
        );
        assert_eq!(
            PicodInstance::new(0, vec![vec![1]]),
            Err(ModelError::NoMessages)
        );
        let empty: Vec<Vec<usize>> = Vec::new();
        assert_eq!(PicodInstance::new(3, empty), Err(ModelError::NoClients));
    }

    #[test]
    fn example1_has_max_degree_five_at_vertex_one() {
        let ex = fixtures::example1();
        assert_eq!(ex.instance.message_count(), 12);
        assert_eq!(ex.instance.client_count(), 12);
        let deg = ex.instance.degrees();
        assert_eq!(deg.max_degree(), 5);
        assert_eq!(deg.max_degree_vertices(), vec![1]);
        // Independent oracle: recount vertex 1 directly from the request sets.
        let direct = ex
            .instance
            .clients()
            .iter()
            .filter(|set| set.contains(&1))
            .count();
        assert_eq!(direct, 5);
    }

    #[test]
    fn example2_degrees_are_uniformly_two() {
        let ex = fixtures::example2();
        let deg = ex.instance.degrees();
        assert_eq!(deg.max_degree(), 2);
        for v in 1..=9 {
            assert_eq!(deg.degree(v), 2, "vertex {v}");
        }
    }

    #[test]
    fn degree_zero_vertices_are_tracked() {
        let inst = PicodInstance::new(4, vec![vec![1], vec![2]]).unwrap();
        let deg = inst.degrees();
        assert_eq!(deg.max_degree(), 1);
        assert_eq!(deg.degree(3), 0);
        assert_eq!(deg.degree(4), 0);
    }

    #[test]
    fn example2_is_one_component_of_nine_vertices() {
        let ex = fixtures::example2();
        let parts = ex.instance.components();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts.components[0].vertices, (1..=9).collect::<Vec<_>>());
        assert_eq!(parts.components[0].client_indices.len(), 9);
    }

    #[test]
    fn example1_is_connected() {
        let ex = fixtures::example1();
        assert_eq!(ex.instance.components().len(), 1);
    }

    #[test]
    fn disjoint_requests_split_into_components() {
        let inst = PicodInstance::new(4, vec![vec![1], vec![2]]).unwrap();
        let parts = inst.components();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts.components[0].vertices, vec![1]);
        assert_eq!(parts.components[1].vertices, vec![2]);
        // Degree-zero vertices 3 and 4 belong to no component.
        let covered: usize = parts.components.iter().map(|c| c.vertices.len()).sum();
        assert_eq!(covered, 2);
    }

    #[test]
    fn induced_drops_clients_using_removed_vertices() {
        let ex = fixtures::example2();
        // Remove vertex 1: the clients requesting it ({1} and {1,2,7,8}) go.
        let keep: BTreeSet<usize> = (2..=9).collect();
        let sub = ex.instance.induced(&keep);
        assert_eq!(sub.client_count(), 7);
        assert!(sub.client_index(&[1]).is_none());
        assert!(sub.client_index(&[1, 2, 7, 8]).is_none());
        assert!(sub.client_index(&[3, 4, 7, 9]).is_some());
        assert_eq!(sub.message_count(), 9);
    }

    #[test]
    fn induced_can_be_empty() {
        let inst = PicodInstance::new(3, vec![vec![1, 2]]).unwrap();
        let keep: BTreeSet<usize> = [3].into_iter().collect();
        let sub = inst.induced(&keep);
        assert!(sub.is_empty());
        assert_eq!(sub.message_count(), 3);
    }

    #[test]
    fn independence_in_example2() {
        let ex = fixtures::example2();
        assert!(ex.instance.is_independent(&[1, 3, 5]));
        // {1,2} both lie in the request set {1,2,7,8}.
        assert!(!ex.instance.is_independent(&[1, 2]));
        assert!(ex.instance.is_independent(&[7]));
        assert!(ex.instance.is_independent(&[]));
    }

    #[test]
    fn example1_independent_pair() {
        let ex = fixtures::example1();
        // No request set contains both 4 and 11.
        assert!(ex.instance.is_independent(&[4, 11]));
        // {1,2} both lie in several request sets.
        assert!(!ex.instance.is_independent(&[1, 2]));
    }
}
