//! Longest decoding chains for fixed demands, and their minimum over all
//! demand choices.
//!
//! Fixing one demanded message per client turns the pliable problem into a
//! classical index-coding problem, whose length is bounded below by the
//! largest acyclic induced subgraph of its bipartite demand digraph. In
//! chain form: clients c_1, ..., c_L with pairwise distinct demands
//! d_1, ..., d_L are acyclic exactly when every later demand lies in every
//! earlier client's request set (d_i ∈ R_{c_j} for j < i); all other
//! side-information arcs then point one way only. Because the true demands
//! are whatever the clients end up decoding, only the minimum of this
//! quantity over every demand assignment bounds the pliable optimum.

use std::collections::HashMap;

use super::BoundsError;
use crate::instance::PicodInstance;

/// Largest message universe (in bits) the chain searches handle.
const MAX_MASK_BITS: usize = 64;
/// Message universes up to this size use a flat memo table instead of a map.
const ARRAY_MEMO_BITS: usize = 20;

/// An ordered client chain certifying an index-coding lower bound.
///
/// `clients[i]` demands `demands[i]` (a 1-based message). The defining
/// property is that demands are pairwise distinct and every later demand is
/// requested by every earlier client, which makes the induced demand
/// subgraph acyclic and forces one transmission per chain element.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainWitness {
    pub clients: Vec<usize>,
    pub demands: Vec<usize>,
}

impl ChainWitness {
    /// Chain length, the value this witness certifies.
    pub fn len(&self) -> usize {
        self.clients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clients.is_empty()
    }

    /// Re-checks the chain conditions from scratch. When `choices` is given,
    /// each chain demand must also agree with that assignment.
    pub fn validate(
        &self,
        instance: &PicodInstance,
        choices: Option<&[usize]>,
    ) -> Result<(), String> {
        if self.clients.len() != self.demands.len() {
            return Err("client and demand lists differ in length".into());
        }
        for (pos, (&c, &d)) in self.clients.iter().zip(&self.demands).enumerate() {
            if c >= instance.client_count() {
                return Err(format!("chain position {pos}: client {c} out of range"));
            }
            if !instance.requests(c, d) {
                return Err(format!(
                    "chain position {pos}: client {c} does not request message {d}"
                ));
            }
            if let Some(choices) = choices {
                if choices.get(c) != Some(&d) {
                    return Err(format!(
                        "chain position {pos}: demand {d} differs from the fixed choice"
                    ));
                }
            }
        }
        for i in 0..self.clients.len() {
            if self.clients[i + 1..].contains(&self.clients[i]) {
                return Err(format!("client {} repeats in the chain", self.clients[i]));
            }
            if self.demands[i + 1..].contains(&self.demands[i]) {
                return Err(format!("demand {} repeats in the chain", self.demands[i]));
            }
            for j in 0..i {
                if !instance.requests(self.clients[j], self.demands[i]) {
                    return Err(format!(
                        "later demand {} is side information of earlier client {}",
                        self.demands[i], self.clients[j]
                    ));
                }
            }
        }
        Ok(())
    }
}

fn request_masks(instance: &PicodInstance) -> Result<Vec<u64>, BoundsError> {
    if instance.message_count() > MAX_MASK_BITS {
        return Err(BoundsError::InstanceTooLarge {
            what: "chain search packs messages into 64-bit masks",
        });
    }
    Ok(instance
        .clients()
        .iter()
        .map(|set| set.iter().fold(0u64, |acc, &v| acc | 1u64 << (v - 1)))
        .collect())
}

fn check_choices(instance: &PicodInstance, choices: &[usize]) -> Result<(), BoundsError> {
    if choices.len() != instance.client_count() {
        return Err(BoundsError::InvalidChoice {
            client: choices.len().min(instance.client_count()),
            message: 0,
        });
    }
    for (c, &d) in choices.iter().enumerate() {
        if !instance.requests(c, d) {
            return Err(BoundsError::InvalidChoice {
                client: c,
                message: d,
            });
        }
    }
    Ok(())
}

/// Memo for the chain recursion, keyed by the set of demands already placed
/// later in the chain. Small universes get a stamped flat table so it can be
/// reused across demand tuples without clearing.
enum Memo {
    Flat { stamp: Vec<u32>, value: Vec<u8>, cur: u32 },
    Map(HashMap<u64, u8>),
}

impl Memo {
    fn new(message_count: usize) -> Memo {
        if message_count <= ARRAY_MEMO_BITS {
            Memo::Flat {
                stamp: vec![0; 1 << message_count],
                value: vec![0; 1 << message_count],
                cur: 0,
            }
        } else {
            Memo::Map(HashMap::new())
        }
    }

    fn next_round(&mut self) {
        match self {
            Memo::Flat { cur, .. } => *cur += 1,
            Memo::Map(map) => map.clear(),
        }
    }

    fn get(&self, key: u64) -> Option<u8> {
        match self {
            Memo::Flat { stamp, value, cur } => {
                (stamp[key as usize] == *cur).then(|| value[key as usize])
            }
            Memo::Map(map) => map.get(&key).copied(),
        }
    }

    fn put(&mut self, key: u64, val: u8) {
        match self {
            Memo::Flat { stamp, value, cur } => {
                stamp[key as usize] = *cur;
                value[key as usize] = val;
            }
            Memo::Map(map) => {
                map.insert(key, val);
            }
        }
    }
}

/// Longest chain extendable when `taken` are the demands already placed
/// after the position being filled, capped at `cap`. A client may open the
/// chain at this position iff it requests every later demand and its own
/// demand is still unused; the cap makes the memoized value
/// min(true value, cap), which is consistent because the cap is fixed for
/// the duration of one memo round.
fn capped_chain(
    taken: u64,
    demand_bit: &[u64],
    rmask: &[u64],
    cap: u8,
    memo: &mut Memo,
) -> u8 {
    if cap == 0 {
        return 0;
    }
    if let Some(v) = memo.get(taken) {
        return v;
    }
    let mut best = 0u8;
    for c in 0..rmask.len() {
        if taken & rmask[c] == taken && demand_bit[c] & taken == 0 {
            let v = 1 + capped_chain(
                taken | demand_bit[c],
                demand_bit,
                rmask,
                cap - 1,
                memo,
            );
            if v > best {
                best = v;
                if best == cap {
                    break;
                }
            }
        }
    }
    memo.put(taken, best);
    best
}

/// Longest decoding chain when client demands are fixed by `choices`
/// (`choices[c]` is the 1-based message demanded by client `c`). Exact;
/// returns the chain witness, whose length is the bound.
pub fn mais_for_choices(
    instance: &PicodInstance,
    choices: &[usize],
) -> Result<ChainWitness, BoundsError> {
    check_choices(instance, choices)?;
    let rmask = request_masks(instance)?;
    let demand_bit: Vec<u64> = choices.iter().map(|&d| 1u64 << (d - 1)).collect();
    let mut memo = Memo::new(instance.message_count());
    memo.next_round();
    let total = capped_chain(0, &demand_bit, &rmask, u8::MAX, &mut memo);

    // Rebuild one optimal chain from the memo, back to front: the client
    // placed at each position is the first one whose continuation value
    // accounts for the total.
    let mut rev_clients = Vec::with_capacity(total as usize);
    let mut taken = 0u64;
    let mut need = total;
    while need > 0 {
        let c = (0..rmask.len())
            .find(|&c| {
                taken & rmask[c] == taken
                    && demand_bit[c] & taken == 0
                    && 1 + capped_chain(taken | demand_bit[c], &demand_bit, &rmask, need - 1, &mut memo)
                        >= need
            })
            .expect("memoized optimum must be reconstructible");
        rev_clients.push(c);
        taken |= demand_bit[c];
        need -= 1;
    }
    rev_clients.reverse();
    let demands = rev_clients.iter().map(|&c| choices[c]).collect();
    Ok(ChainWitness {
        clients: rev_clients,
        demands,
    })
}

/// The minimum over all demand assignments, with the minimizing assignment
/// and its chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaisMin {
    pub value: usize,
    pub choices: Vec<usize>,
    pub chain: ChainWitness,
}

/// Minimizes the longest-chain value over every demand assignment by full
/// enumeration. Refuses (rather than sampling) when the assignment space
/// Π|R_i| exceeds `budget`, since a partial minimum is not a valid bound.
pub fn mais_min_over_choices(
    instance: &PicodInstance,
    budget: u64,
) -> Result<MaisMin, BoundsError> {
    let rmask = request_masks(instance)?;
    let n = instance.client_count();
    let mut product: u128 = 1;
    for c in 0..n {
        product = product.saturating_mul(instance.client(c).len() as u128);
        if product > budget as u128 {
            return Err(BoundsError::ChoiceSpaceTooLarge {
                product,
                budget,
            });
        }
    }

    let mut memo = Memo::new(instance.message_count());
    let mut positions = vec![0usize; n];
    let mut demand_bit = vec![0u64; n];
    let mut incumbent: Option<(u8, Vec<usize>)> = None;
    loop {
        let choices: Vec<usize> = (0..n).map(|c| instance.client(c)[positions[c]]).collect();
        for c in 0..n {
            demand_bit[c] = 1u64 << (choices[c] - 1);
        }
        let cap = incumbent.as_ref().map_or(u8::MAX, |(v, _)| *v);
        memo.next_round();
        let value = capped_chain(0, &demand_bit, &rmask, cap, &mut memo);
        if incumbent.as_ref().is_none_or(|(v, _)| value < *v) {
            incumbent = Some((value, choices));
            if value <= 1 {
                break;
            }
        }

        // Advance the assignment odometer (last client fastest).
        let mut pos = n;
        loop {
            if pos == 0 {
                pos = usize::MAX;
                break;
            }
            pos -= 1;
            positions[pos] += 1;
            if positions[pos] < instance.client(pos).len() {
                break;
            }
            positions[pos] = 0;
        }
        if pos == usize::MAX {
            break;
        }
    }

    match incumbent {
        Some((value, choices)) => {
            let chain = mais_for_choices(instance, &choices)?;
            debug_assert_eq!(chain.len(), value as usize);
            Ok(MaisMin {
                value: value as usize,
                choices,
                chain,
            })
        }
        // No clients: the only assignment is empty and the chain is empty.
        None => Ok(MaisMin {
            value: 0,
            choices: Vec::new(),
            chain: ChainWitness::default(),
        }),
    }
}
