//! Scheme constructors.
//!
//! [`degree_descending`] is the workhorse: it peels vertices of the current
//! maximum degree, colors them, and broadcasts one sum per color class. Each
//! broadcast satisfies every client it removes, and after the round for
//! degree `d` no surviving vertex has degree `d` or more, so the number of
//! rounds that transmit is at most the maximum degree of the instance.
//!
//! [`grcov_greedy`] is the classic baseline for comparison: repeatedly
//! broadcast over a maximal independent set of the residual hypergraph,
//! ignoring degrees.
//!
//! [`min_cover_exact`] finds a minimum conflict-free cover by
//! branch-and-bound; it is exponential and intended for small instances.

use std::collections::HashMap;

use crate::gf::FieldOrder;
use crate::instance::PicodInstance;
use crate::scheme::Scheme;

/// Vertex coloring produced by [`degree_descending`]; color `c` maps to
/// broadcast row `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    /// `color_of[v]` for vertices `1..=m`; uncolored vertices (degree zero,
    /// or never selected) hold `None`. Entry 0 is unused.
    pub color_of: Vec<Option<usize>>,
    /// `classes[c]` lists the vertices of color `c`, ascending.
    pub classes: Vec<Vec<usize>>,
}

/// Log of one scan of the vertex list at threshold `delta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundLog {
    /// Degree threshold of the round.
    pub delta: usize,
    /// Color emitted by the round; `None` when no vertex had degree `delta`
    /// (such rounds transmit nothing and consume no color).
    pub color: Option<usize>,
    /// Vertices picked, in scan (ascending) order.
    pub picked: Vec<usize>,
    /// Clients removed (0-based canonical indices), in removal order.
    pub removed_clients: Vec<usize>,
    /// Degree decrements as `(vertex, new_degree)`, in application order.
    pub decrements: Vec<(usize, usize)>,
}

/// Per-round construction log; enough to replay the run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionTrace {
    pub rounds: Vec<RoundLog>,
}

/// Scheme, coloring, and trace from one constructor run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub scheme: Scheme,
    pub coloring: Coloring,
    pub trace: ConstructionTrace,
}

/// Options for [`degree_descending`].
#[derive(Debug, Clone, Copy)]
pub struct DegreeDescendingOptions {
    /// Field of the emitted scheme (all coefficients are 0 or 1 regardless).
    pub field: FieldOrder,
    /// Jump straight to the current maximum degree instead of decrementing
    /// the threshold by one. Produces the identical coloring and scheme; the
    /// trace simply omits the empty rounds.
    pub fast_descent: bool,
}

impl Default for DegreeDescendingOptions {
    fn default() -> Self {
        Self {
            field: FieldOrder::BINARY,
            fast_descent: false,
        }
    }
}

/// Greedy coloring by descending degree threshold.
///
/// For thresholds `delta = max_degree, ..., 1`: scan vertices in ascending
/// order; every surviving vertex of exact degree `delta` joins the round's
/// color class and is removed together with all clients requesting it. If
/// the scan picked anything, the class becomes one broadcast row. Each
/// removed client's request set meets the class in exactly one message (later
/// picks of the same round can never lie in an already-removed request set),
/// so every client is satisfied by the row of the round that removed it.
pub fn degree_descending(inst: &PicodInstance, opts: &DegreeDescendingOptions) -> Construction {
    let m = inst.message_count();
    let n = inst.client_count();
    let incidence = inst.incidence();
    let mut degree: Vec<usize> = (0..=m).map(|v| incidence[v].len()).collect();
    let mut alive: Vec<bool> = vec![true; n];
    let mut alive_count = n;
    let mut color_of: Vec<Option<usize>> = vec![None; m + 1];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut rounds: Vec<RoundLog> = Vec::new();
    let mut delta = degree.iter().copied().max().unwrap_or(0);
    while delta >= 1 && alive_count > 0 {
        let color = classes.len();
        let mut picked: Vec<usize> = Vec::new();
        let mut removed_clients: Vec<usize> = Vec::new();
        let mut decrements: Vec<(usize, usize)> = Vec::new();
        for v in 1..=m {
            if color_of[v].is_some() || degree[v] != delta {
                continue;
            }
            color_of[v] = Some(color);
            picked.push(v);
            degree[v] = 0;
            for &e in &incidence[v] {
                if !alive[e] {
                    continue;
                }
                alive[e] = false;
                alive_count -= 1;
                removed_clients.push(e);
                for &w in inst.client(e) {
                    if w != v && color_of[w].is_none() {
                        degree[w] -= 1;
                        decrements.push((w, degree[w]));
                    }
                }
            }
        }
        let emitted = !picked.is_empty();
        rounds.push(RoundLog {
            delta,
            color: emitted.then_some(color),
            picked: picked.clone(),
            removed_clients,
            decrements,
        });
        if emitted {
            classes.push(picked);
        }
        if alive_count == 0 {
            break;
        }
        delta = if opts.fast_descent {
            (1..=m)
                .filter(|&v| color_of[v].is_none())
                .map(|v| degree[v])
                .max()
                .unwrap_or(0)
        } else {
            delta - 1
        };
    }
    let scheme = Scheme::from_supports(opts.field, m, &classes)
        .expect("classes only contain valid vertices");
    Construction {
        scheme,
        coloring: Coloring { color_of, classes },
        trace: ConstructionTrace { rounds },
    }
}

/// Replays a trace against the instance and checks the structural guarantees:
/// picked classes are independent in the residual instance of their round,
/// removed clients are exactly the residual clients meeting the class, and
/// after the round for threshold `delta` every un-removed vertex has residual
/// degree at most `delta - 1`.
pub fn validate_trace(inst: &PicodInstance, trace: &ConstructionTrace) -> Result<(), String> {
    let m = inst.message_count();
    let n = inst.client_count();
    let mut alive: Vec<bool> = vec![true; n];
    let mut colored: Vec<bool> = vec![false; m + 1];
    for (round_no, round) in trace.rounds.iter().enumerate() {
        let mut in_class = vec![false; m + 1];
        for &v in &round.picked {
            if colored[v] {
                return Err(format!("round {round_no}: vertex {v} picked twice"));
            }
            in_class[v] = true;
        }
        // Every residual client must meet the class at most once, and the
        // removed set must be exactly the residual clients meeting it.
        let mut expected_removed: Vec<usize> = Vec::new();
        for (e, &live) in alive.iter().enumerate() {
            if !live {
                continue;
            }
            let hits = inst.client(e).iter().filter(|&&v| in_class[v]).count();
            if hits > 1 {
                return Err(format!(
                    "round {round_no}: client {e} meets the class {hits} times"
                ));
            }
            if hits == 1 {
                expected_removed.push(e);
            }
        }
        let mut removed_sorted = round.removed_clients.clone();
        removed_sorted.sort_unstable();
        if removed_sorted != expected_removed {
            return Err(format!(
                "round {round_no}: removed clients {removed_sorted:?} != expected {expected_removed:?}"
            ));
        }
        for &v in &round.picked {
            colored[v] = true;
        }
        for &e in &round.removed_clients {
            alive[e] = false;
        }
        // Residual degree bound after the round.
        let mut residual_degree = vec![0usize; m + 1];
        for (e, &live) in alive.iter().enumerate() {
            if live {
                for &v in inst.client(e) {
                    residual_degree[v] += 1;
                }
            }
        }
        for v in 1..=m {
            if !colored[v] && residual_degree[v] >= round.delta {
                return Err(format!(
                    "round {round_no} (delta {}): vertex {v} still has degree {}",
                    round.delta, residual_degree[v]
                ));
            }
        }
        if round.color.is_some() != !round.picked.is_empty() {
            return Err(format!("round {round_no}: color/pick mismatch"));
        }
    }
    if alive.iter().any(|&a| a) {
        return Err("trace ends with unsatisfied clients".into());
    }
    Ok(())
}

/// Greedy baseline: broadcast over a maximal independent set of the residual
/// hypergraph, scanning vertices in ascending order with no degree priority,
/// until every client is removed.
pub fn grcov_greedy(inst: &PicodInstance, field: FieldOrder) -> Scheme {
    let m = inst.message_count();
    let n = inst.client_count();
    let incidence = inst.incidence();
    let mut alive: Vec<bool> = vec![true; n];
    let mut alive_count = n;
    let mut supports: Vec<Vec<usize>> = Vec::new();
    while alive_count > 0 {
        let mut class_hits = vec![0usize; n];
        let mut class: Vec<usize> = Vec::new();
        for (v, inc) in incidence.iter().enumerate().skip(1) {
            let edges: Vec<usize> = inc.iter().copied().filter(|&e| alive[e]).collect();
            if edges.is_empty() {
                continue;
            }
            if edges.iter().all(|&e| class_hits[e] == 0) {
                class.push(v);
                for &e in &edges {
                    class_hits[e] += 1;
                }
            }
        }
        debug_assert!(!class.is_empty());
        for e in 0..n {
            if alive[e] && class_hits[e] > 0 {
                alive[e] = false;
                alive_count -= 1;
            }
        }
        supports.push(class);
    }
    Scheme::from_supports(field, m, &supports).expect("classes only contain valid vertices")
}

/// A minimum conflict-free cover: supports such that every request set meets
/// at least one support exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCover {
    pub length: usize,
    pub supports: Vec<Vec<usize>>,
}

/// Exact minimum conflict-free cover by iterative-deepening branch-and-bound.
///
/// Candidate supports are collapsed to their client-coverage sets (clients
/// hit exactly once), deduplicated, and filtered to the maximal ones; the
/// search branches on the lowest-index uncovered client. `budget` counts
/// work units (support scans and search nodes); on exhaustion the function
/// refuses with `None` rather than returning an unproven answer. Instances
/// beyond 20 messages or 32 clients are refused outright.
pub fn min_cover_exact(inst: &PicodInstance, budget: u64) -> Option<MinCover> {
    let m = inst.message_count();
    let n = inst.client_count();
    if n == 0 {
        return Some(MinCover {
            length: 0,
            supports: Vec::new(),
        });
    }
    if m > 20 || n > 32 {
        log::warn!("min_cover_exact refused: {m} messages / {n} clients exceeds the exact-search limit");
        return None;
    }
    let mut budget = budget;
    let client_masks: Vec<u32> = inst
        .clients()
        .iter()
        .map(|set| set.iter().fold(0u32, |acc, &v| acc | 1 << (v - 1)))
        .collect();
    // Coverage mask of every support; keep one representative support per
    // distinct mask.
    let mut by_coverage: HashMap<u32, u32> = HashMap::new();
    for support in 1u32..(1 << m) {
        if budget < n as u64 {
            log::warn!("min_cover_exact: budget exhausted during support enumeration");
            return None;
        }
        budget -= n as u64;
        let mut coverage = 0u32;
        for (j, &cm) in client_masks.iter().enumerate() {
            if (support & cm).count_ones() == 1 {
                coverage |= 1 << j;
            }
        }
        if coverage != 0 {
            by_coverage.entry(coverage).or_insert(support);
        }
    }
    // Keep only maximal coverage masks: replacing a support by one covering a
    // superset of clients never hurts.
    let mut entries: Vec<(u32, u32)> = by_coverage.into_iter().collect();
    entries.sort_by_key(|&(cov, support)| (std::cmp::Reverse(cov.count_ones()), support));
    let mut maximal: Vec<(u32, u32)> = Vec::new();
    for (cov, support) in entries {
        budget = budget.saturating_sub(maximal.len() as u64);
        if !maximal.iter().any(|&(kept, _)| kept & cov == cov) {
            maximal.push((cov, support));
        }
    }
    if budget == 0 {
        log::warn!("min_cover_exact: budget exhausted during dominance filtering");
        return None;
    }
    let candidates: Vec<Vec<(u32, u32)>> = (0..n)
        .map(|j| {
            maximal
                .iter()
                .copied()
                .filter(|&(cov, _)| cov >> j & 1 == 1)
                .collect()
        })
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };

    struct Search<'a> {
        candidates: &'a [Vec<(u32, u32)>],
        failed_at: HashMap<u32, usize>,
        budget: u64,
        exhausted: bool,
    }
    impl Search<'_> {
        fn solve(&mut self, uncovered: u32, depth: usize, chosen: &mut Vec<u32>) -> bool {
            if self.exhausted {
                return false;
            }
            if uncovered == 0 {
                return true;
            }
            if depth == 0 {
                return false;
            }
            if let Some(&d) = self.failed_at.get(&uncovered) {
                if d >= depth {
                    return false;
                }
            }
            if self.budget == 0 {
                self.exhausted = true;
                return false;
            }
            self.budget -= 1;
            let j = uncovered.trailing_zeros() as usize;
            for &(cov, support) in &self.candidates[j] {
                if self.solve(uncovered & !cov, depth - 1, chosen) {
                    chosen.push(support);
                    return true;
                }
                if self.exhausted {
                    return false;
                }
            }
            // Only a fully explored node proves infeasibility at this depth;
            // the record stays valid across deepening iterations.
            self.failed_at.insert(uncovered, depth);
            false
        }
    }

    let mut search = Search {
        candidates: &candidates,
        failed_at: HashMap::new(),
        budget,
        exhausted: false,
    };
    for length in 1..=n {
        let mut chosen: Vec<u32> = Vec::new();
        if search.solve(full, length, &mut chosen) {
            chosen.reverse();
            let supports = chosen
                .iter()
                .map(|&s| (0..m).filter(|&c| s >> c & 1 == 1).map(|c| c + 1).collect())
                .collect();
            return Some(MinCover { length, supports });
        }
        if search.exhausted {
            log::warn!("min_cover_exact: budget exhausted during search");
            return None;
        }
    }
    // Unreachable for well-formed instances: one support per client always
    // covers everything.
    None
}
