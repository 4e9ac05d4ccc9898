//! On-chain private-channel detection: the Property heuristic (channel-shaped
//! outputs) and the Tracing heuristic (peeling chains seeded from publicly
//! announced channels).

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::chain::{is_p2wsh, OutPoint, Transaction, TxId};

/// Value bounds for a channel-shaped output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyParams {
    pub min_channel_sat: u64,
    pub max_channel_sat: u64,
}

impl Default for PropertyParams {
    fn default() -> Self {
        // upper bound is the historical non-wumbo capacity cap (2^24 - 1)
        PropertyParams {
            min_channel_sat: 20_000,
            max_channel_sat: 16_777_215,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceParams {
    pub property: PropertyParams,
    pub max_depth: u32,
}

impl Default for TraceParams {
    fn default() -> Self {
        TraceParams {
            property: PropertyParams::default(),
            max_depth: 10,
        }
    }
}

/// An in-memory transaction graph with a spend index.
#[derive(Debug, Default)]
pub struct TxGraph {
    txs: HashMap<TxId, Transaction>,
    spend_index: HashMap<OutPoint, TxId>,
    funding_candidates: HashSet<OutPoint>,
}

impl TxGraph {
    /// Builds the graph, indexing spends and property-heuristic-positive
    /// outputs. Ingesting the same transaction twice is idempotent.
    pub fn build(txs: impl IntoIterator<Item = Transaction>, params: &PropertyParams) -> TxGraph {
        let mut graph = TxGraph::default();
        for tx in txs {
            graph.insert(tx, params);
        }
        graph
    }

    pub fn insert(&mut self, tx: Transaction, params: &PropertyParams) {
        for input in &tx.inputs {
            self.spend_index.insert(input.prevout, tx.txid);
        }
        self.funding_candidates
            .extend(property_heuristic(&tx, params));
        self.txs.insert(tx.txid, tx);
    }

    pub fn transaction(&self, txid: &TxId) -> Option<&Transaction> {
        self.txs.get(txid)
    }

    pub fn spender(&self, outpoint: &OutPoint) -> Option<TxId> {
        self.spend_index.get(outpoint).copied()
    }

    pub fn funding_candidates(&self) -> &HashSet<OutPoint> {
        &self.funding_candidates
    }

    pub fn transactions(&self) -> impl Iterator<Item = &Transaction> {
        self.txs.values()
    }

    pub fn len(&self) -> usize {
        self.txs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.txs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceDirection {
    ForwardTrace,
    BackwardTrace,
}

/// A channel-shaped outpoint reachable from a public seed but absent from
/// the gossip data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivateChannelCandidate {
    pub funding: OutPoint,
    pub discovered_via: TraceDirection,
    pub chain_depth: u32,
}

/// Flags every output of `tx` that is P2WSH-shaped with a value inside the
/// configured channel bounds, in output order.
pub fn property_heuristic(tx: &Transaction, params: &PropertyParams) -> Vec<OutPoint> {
    tx.outputs
        .iter()
        .enumerate()
        .filter(|(_, out)| {
            is_p2wsh(&out.script_pubkey)
                && out.value >= params.min_channel_sat
                && out.value <= params.max_channel_sat
        })
        .map(|(vout, _)| OutPoint::new(tx.txid, vout as u32))
        .collect()
}

/// Detects peeling chains: starting from publicly announced channel funding
/// outpoints, the forward pass follows spends of the funding transactions'
/// change outputs and of the closing transactions' outputs, flagging
/// channel-shaped outputs along the way; the backward pass walks the funding
/// inputs' origins. Candidates never include the public seeds, and the
/// result is canonically ordered by (txid, vout).
pub fn tracing_heuristic(
    graph: &TxGraph,
    public_seeds: &HashSet<OutPoint>,
    params: &TraceParams,
) -> Vec<PrivateChannelCandidate> {
    let mut seeds: Vec<OutPoint> = public_seeds.iter().copied().collect();
    seeds.sort();

    let mut found: HashMap<OutPoint, PrivateChannelCandidate> = HashMap::new();

    forward_pass(graph, &seeds, public_seeds, params, &mut found);
    backward_pass(graph, &seeds, public_seeds, params, &mut found);

    let mut candidates: Vec<PrivateChannelCandidate> = found.into_values().collect();
    candidates.sort_by_key(|c| (c.funding.txid, c.funding.vout));
    candidates
}

fn forward_pass(
    graph: &TxGraph,
    seeds: &[OutPoint],
    public_seeds: &HashSet<OutPoint>,
    params: &TraceParams,
    found: &mut HashMap<OutPoint, PrivateChannelCandidate>,
) {
    let mut visited: HashSet<TxId> = seeds.iter().map(|s| s.txid).collect();
    let mut queue: VecDeque<(OutPoint, u32)> = seeds.iter().map(|s| (*s, 0)).collect();

    while let Some((channel, depth)) = queue.pop_front() {
        if depth >= params.max_depth {
            continue;
        }
        let funding_tx = match graph.transaction(&channel.txid) {
            Some(tx) => tx,
            None => continue,
        };

        // spenders of the funding tx's change outputs
        let mut next_txids: Vec<TxId> = Vec::new();
        for vout in 0..funding_tx.outputs.len() as u32 {
            if vout == channel.vout {
                continue;
            }
            if let Some(spender) = graph.spender(&OutPoint::new(channel.txid, vout)) {
                next_txids.push(spender);
            }
        }
        // spenders of the closing tx's outputs
        if let Some(closing_txid) = graph.spender(&channel) {
            if let Some(closing_tx) = graph.transaction(&closing_txid) {
                for vout in 0..closing_tx.outputs.len() as u32 {
                    if let Some(spender) = graph.spender(&OutPoint::new(closing_txid, vout)) {
                        next_txids.push(spender);
                    }
                }
            }
        }

        for txid in next_txids {
            if !visited.insert(txid) {
                continue;
            }
            let tx = match graph.transaction(&txid) {
                Some(tx) => tx,
                None => continue,
            };
            for outpoint in property_heuristic(tx, &params.property) {
                if public_seeds.contains(&outpoint) {
                    continue;
                }
                found.entry(outpoint).or_insert(PrivateChannelCandidate {
                    funding: outpoint,
                    discovered_via: TraceDirection::ForwardTrace,
                    chain_depth: depth + 1,
                });
                queue.push_back((outpoint, depth + 1));
            }
        }
    }
}

fn backward_pass(
    graph: &TxGraph,
    seeds: &[OutPoint],
    public_seeds: &HashSet<OutPoint>,
    params: &TraceParams,
    found: &mut HashMap<OutPoint, PrivateChannelCandidate>,
) {
    let mut visited: HashSet<TxId> = seeds.iter().map(|s| s.txid).collect();
    let mut queue: VecDeque<(TxId, u32)> = seeds.iter().map(|s| (s.txid, 0)).collect();

    while let Some((txid, depth)) = queue.pop_front() {
        if depth >= params.max_depth {
            continue;
        }
        let tx = match graph.transaction(&txid) {
            Some(tx) => tx,
            None => continue,
        };
        for input in &tx.inputs {
            let parent_txid = input.prevout.txid;
            if !visited.insert(parent_txid) {
                continue;
            }
            let parent = match graph.transaction(&parent_txid) {
                Some(parent) => parent,
                None => continue,
            };
            let mut any = false;
            for outpoint in property_heuristic(parent, &params.property) {
                any = true;
                if public_seeds.contains(&outpoint) {
                    continue;
                }
                found.entry(outpoint).or_insert(PrivateChannelCandidate {
                    funding: outpoint,
                    discovered_via: TraceDirection::BackwardTrace,
                    chain_depth: depth + 1,
                });
            }
            // only channel-opening transactions extend a peeling chain
            if any {
                queue.push_back((parent_txid, depth + 1));
            }
        }
    }
}
