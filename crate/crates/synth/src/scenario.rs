//! Labeled channel-lifecycle scenarios: each generates chain transactions,
//! matching gossip, and ground truth, deterministically in (kind, seed).

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use lnlife_core::chain::{
    p2wsh_script_pubkey, sha256, OutPoint, Transaction, TxId, TxInput, TxOutput,
};
use lnlife_core::gossip::{FeeParams, GossipEvent, NodeId, ShortChannelId};
use lnlife_core::lifecycle::{ClosingType, ResurrectionLink, Visibility};
use lnlife_core::script::{
    build_anchor_script, build_funding_script, build_local_script, build_remote_delayed_script,
    p2wpkh_script_pubkey, serialize_script, LocalOutputScript, ScriptToken, OP_CHECKSIG,
    OP_EQUALVERIFY, OP_HASH160,
};

use crate::clock::BlockClock;
use crate::truth::{PublicChannelEntry, TruthClosing, TruthRecord};

pub const BASE_HEIGHT: u64 = 560_000;

/// A generated scenario shape. Together they cover every closing type, the
/// peeling-chain structure, HTLC-bearing and anchor commitments, and a
/// fee-rebalancing gossip pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    CoopX1,
    CoopX2,
    UniLocal,
    UniLocalRemote,
    UniRemote,
    Revoked,
    PeelingChain(u32),
    HtlcClose(u32),
    AnchorClose,
    FeeRebalanceGossip,
}

impl ScenarioKind {
    pub const BASIC: [ScenarioKind; 6] = [
        ScenarioKind::CoopX1,
        ScenarioKind::CoopX2,
        ScenarioKind::UniLocal,
        ScenarioKind::UniLocalRemote,
        ScenarioKind::UniRemote,
        ScenarioKind::Revoked,
    ];

    /// Block-height window reserved per scenario instance.
    pub fn window(&self) -> u64 {
        match self {
            // long-lived channel: daily updates over ~140 days
            ScenarioKind::FeeRebalanceGossip => 25_000,
            _ => 2_500,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioKind::CoopX1 => write!(f, "coopx1"),
            ScenarioKind::CoopX2 => write!(f, "coopx2"),
            ScenarioKind::UniLocal => write!(f, "local"),
            ScenarioKind::UniLocalRemote => write!(f, "local+remote"),
            ScenarioKind::UniRemote => write!(f, "remote"),
            ScenarioKind::Revoked => write!(f, "revoked"),
            ScenarioKind::PeelingChain(n) => write!(f, "peeling:{n}"),
            ScenarioKind::HtlcClose(n) => write!(f, "htlc:{n}"),
            ScenarioKind::AnchorClose => write!(f, "anchor"),
            ScenarioKind::FeeRebalanceGossip => write!(f, "fee-rebalance"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioKindParseError(String);

impl fmt::Display for ScenarioKindParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown scenario kind: {}", self.0)
    }
}

impl std::error::Error for ScenarioKindParseError {}

impl FromStr for ScenarioKind {
    type Err = ScenarioKindParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_n = |rest: &str| {
            rest.parse::<u32>()
                .map_err(|_| ScenarioKindParseError(s.into()))
        };
        Ok(match s {
            "coopx1" => ScenarioKind::CoopX1,
            "coopx2" => ScenarioKind::CoopX2,
            "local" => ScenarioKind::UniLocal,
            "local+remote" => ScenarioKind::UniLocalRemote,
            "remote" => ScenarioKind::UniRemote,
            "revoked" => ScenarioKind::Revoked,
            "anchor" => ScenarioKind::AnchorClose,
            "fee-rebalance" => ScenarioKind::FeeRebalanceGossip,
            _ => match s.split_once(':') {
                Some(("peeling", n)) => ScenarioKind::PeelingChain(parse_n(n)?),
                Some(("htlc", n)) => ScenarioKind::HtlcClose(parse_n(n)?),
                _ => return Err(ScenarioKindParseError(s.into())),
            },
        })
    }
}

/// Everything one scenario produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioData {
    /// Sorted by (block height, txid).
    pub transactions: Vec<Transaction>,
    /// Sorted by timestamp (stable tiebreak on the serialized record).
    pub gossip: Vec<GossipEvent>,
    /// Sorted by funding outpoint.
    pub truth: Vec<TruthRecord>,
    /// scid/outpoint pairs for the announced channels.
    pub public_channels: Vec<PublicChannelEntry>,
}

/// Generates one scenario, deterministic in `(kind, seed)`.
pub fn generate(kind: ScenarioKind, seed: u64) -> ScenarioData {
    let clock = BlockClock::new(seed);
    generate_in_window(kind, scenario_seed(seed, 0), &clock, BASE_HEIGHT)
}

/// Derives the per-scenario RNG seed from the corpus seed and instance index.
pub fn scenario_seed(corpus_seed: u64, index: u64) -> [u8; 32] {
    let mut data = [0u8; 24];
    data[..8].copy_from_slice(b"scenario");
    data[8..16].copy_from_slice(&corpus_seed.to_le_bytes());
    data[16..].copy_from_slice(&index.to_le_bytes());
    sha256(&data)
}

pub(crate) fn generate_in_window(
    kind: ScenarioKind,
    seed: [u8; 32],
    clock: &BlockClock,
    height_base: u64,
) -> ScenarioData {
    let mut ctx = Ctx {
        rng: ChaCha8Rng::from_seed(seed),
        clock,
        txs: Vec::new(),
        truth: Vec::new(),
        gossip: Vec::new(),
    };
    build_scenario(&mut ctx, kind, height_base);
    ctx.finish()
}

struct GossipDraft {
    /// The announced channel; `None` for node announcements.
    channel: Option<OutPoint>,
    event: DraftEvent,
}

enum DraftEvent {
    Announcement {
        timestamp: u64,
        node1: NodeId,
        node2: NodeId,
    },
    Update {
        timestamp: u64,
        direction: u8,
        params: FeeParams,
    },
    Node {
        timestamp: u64,
        node_id: NodeId,
    },
}

struct Ctx<'a> {
    rng: ChaCha8Rng,
    clock: &'a BlockClock,
    txs: Vec<Transaction>,
    truth: Vec<TruthRecord>,
    gossip: Vec<GossipDraft>,
}

impl Ctx<'_> {
    fn new_txid(&mut self) -> TxId {
        TxId(self.rng.random())
    }

    fn key(&mut self) -> [u8; 33] {
        let mut key = [0u8; 33];
        key[0] = if self.rng.random_bool(0.5) {
            0x02
        } else {
            0x03
        };
        let body: [u8; 32] = self.rng.random();
        key[1..].copy_from_slice(&body);
        key
    }

    fn node(&mut self) -> NodeId {
        NodeId(self.key())
    }

    fn pkh(&mut self) -> [u8; 20] {
        let body: [u8; 32] = self.rng.random();
        body[..20].try_into().unwrap()
    }

    fn dummy_sig(&mut self) -> Vec<u8> {
        let mut sig = vec![0x30, 0x44];
        let body: [u8; 32] = self.rng.random();
        sig.extend_from_slice(&body);
        sig.extend_from_slice(&body);
        sig.push(0x01); // SIGHASH_ALL
        sig
    }

    fn external_prevout(&mut self) -> OutPoint {
        OutPoint::new(self.new_txid(), self.rng.random_range(0..3))
    }

    fn push_tx(
        &mut self,
        txid: TxId,
        inputs: Vec<TxInput>,
        outputs: Vec<TxOutput>,
        locktime: u32,
        height: u64,
    ) {
        self.txs.push(Transaction {
            txid,
            inputs,
            outputs,
            locktime,
            block_height: Some(height),
            block_time: Some(self.clock.time(height)),
        });
    }

    /// A plain one-input sweep paying to a fresh P2WPKH output.
    fn sweep(
        &mut self,
        from: OutPoint,
        value: u64,
        witness: Vec<Vec<u8>>,
        sequence: u32,
        height: u64,
    ) -> TxId {
        let txid = self.new_txid();
        let fee = self.rng.random_range(100..300).min(value.saturating_sub(1));
        let pkh = self.pkh();
        self.push_tx(
            txid,
            vec![TxInput {
                prevout: from,
                witness,
                sequence,
            }],
            vec![TxOutput {
                value: value - fee,
                script_pubkey: p2wpkh_script_pubkey(&pkh),
            }],
            0,
            height,
        );
        txid
    }

    fn finish(mut self) -> ScenarioData {
        self.txs.sort_by_key(|tx| (tx.block_height, tx.txid));

        // short channel ids follow the position of the funding tx in its block
        let mut rank_in_block = std::collections::HashMap::new();
        let mut scids = std::collections::HashMap::new();
        for tx in &self.txs {
            let height = tx.block_height.expect("generated txs are confirmed");
            let rank = rank_in_block.entry(height).or_insert(0u32);
            scids.insert(tx.txid, (height, *rank));
            *rank += 1;
        }
        let scid_of = |outpoint: &OutPoint| {
            let (block, tx_index) = scids[&outpoint.txid];
            ShortChannelId {
                block,
                tx_index,
                vout: outpoint.vout,
            }
        };

        let mut gossip: Vec<GossipEvent> = self
            .gossip
            .iter()
            .map(|draft| match draft.event {
                DraftEvent::Announcement {
                    timestamp,
                    node1,
                    node2,
                } => GossipEvent::ChannelAnnouncement {
                    timestamp,
                    scid: scid_of(&draft.channel.unwrap()),
                    node1,
                    node2,
                },
                DraftEvent::Update {
                    timestamp,
                    direction,
                    params,
                } => GossipEvent::ChannelUpdate {
                    timestamp,
                    scid: scid_of(&draft.channel.unwrap()),
                    direction,
                    params,
                },
                DraftEvent::Node { timestamp, node_id } => {
                    GossipEvent::NodeAnnouncement { timestamp, node_id }
                }
            })
            .collect();
        gossip.sort_by_key(|e| (e.timestamp(), serde_json::to_string(e).unwrap()));

        let mut truth = self.truth;
        truth.sort_by_key(|t| (t.funding.txid, t.funding.vout));

        let mut public_channels: Vec<PublicChannelEntry> = truth
            .iter()
            .filter(|t| t.visibility == Visibility::Public)
            .map(|t| PublicChannelEntry {
                scid: scid_of(&t.funding),
                funding: t.funding,
            })
            .collect();
        public_channels.sort_by_key(|e| e.scid);

        ScenarioData {
            transactions: self.txs,
            gossip,
            truth,
            public_channels,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum RemoteForm {
    Wpkh,
    DelayedWsh,
}

struct CommitmentSpec {
    include_local: bool,
    remote: Option<RemoteForm>,
    htlc_values: Vec<u64>,
    anchors: bool,
    revoked: bool,
    to_self_delay: u16,
}

enum CloseSpec {
    Coop {
        two_outputs: bool,
        /// Outputs left unspent for the scenario itself to consume.
        reserve: [bool; 2],
        /// Fixed share of the pot for the first output; random when absent.
        first_output_share: Option<f64>,
    },
    Commitment(CommitmentSpec),
}

enum UpdatePlan {
    Standard,
    Rebalance { days: u32 },
}

struct ChannelSpec {
    visibility: Visibility,
    /// Spend this outpoint (with the given value) as the funding input;
    /// `None` funds the channel from outside the dataset.
    funding_source: Option<(OutPoint, u64)>,
    open_height: u64,
    close_height: u64,
    capacity: Option<u64>,
    with_change: bool,
    /// Exact change value; drawn randomly when absent and `with_change`.
    change_value: Option<u64>,
    close: CloseSpec,
    updates: UpdatePlan,
}

struct ChannelOutcome {
    truth_index: usize,
    funding: OutPoint,
    change: Option<(OutPoint, u64)>,
    close_height: u64,
    /// Value outputs of a cooperative close, in output order.
    coop_outputs: Vec<(OutPoint, u64)>,
}

/// A hash-locked witness script that matches none of the known blueprints.
fn htlc_script(ctx: &mut Ctx) -> Vec<u8> {
    let hash = ctx.pkh();
    let key = ctx.key();
    serialize_script(&[
        ScriptToken::Op(OP_HASH160),
        ScriptToken::Push(hash.to_vec()),
        ScriptToken::Op(OP_EQUALVERIFY),
        ScriptToken::Push(key.to_vec()),
        ScriptToken::Op(OP_CHECKSIG),
    ])
}

const ANCHOR_VALUE: u64 = 330;

fn build_channel(ctx: &mut Ctx, spec: ChannelSpec) -> ChannelOutcome {
    let funding_key1 = ctx.key();
    let funding_key2 = ctx.key();
    let funding_script = build_funding_script(&funding_key1, &funding_key2);

    // funding transaction
    let funding_fee = ctx.rng.random_range(150..1200);
    let (capacity, change_value) = match (spec.funding_source, spec.capacity) {
        (_, Some(capacity)) => {
            let change = spec.with_change.then(|| {
                spec.change_value
                    .unwrap_or_else(|| ctx.rng.random_range(50_000..2_000_000))
            });
            (capacity, change)
        }
        (Some((_, value)), None) => {
            let available = value - funding_fee;
            if spec.with_change {
                let share = ctx.rng.random_range(0.45..0.55);
                let capacity = (((available as f64) * share) as u64).min(16_000_000);
                (capacity, Some(available - capacity))
            } else if available > 16_000_000 {
                (16_000_000, Some(available - 16_000_000))
            } else {
                (available, None)
            }
        }
        (None, None) => {
            let capacity = ctx.rng.random_range(100_000..=16_000_000);
            let change = spec.with_change.then(|| {
                spec.change_value
                    .unwrap_or_else(|| ctx.rng.random_range(50_000..2_000_000))
            });
            (capacity, change)
        }
    };

    let funding_input = match spec.funding_source {
        Some((outpoint, _)) => {
            let witness = vec![ctx.dummy_sig(), ctx.key().to_vec()];
            TxInput {
                prevout: outpoint,
                witness,
                sequence: 0xffff_fffe,
            }
        }
        None => TxInput {
            prevout: ctx.external_prevout(),
            witness: vec![ctx.dummy_sig(), ctx.key().to_vec()],
            sequence: 0xffff_fffe,
        },
    };

    let channel_output = TxOutput {
        value: capacity,
        script_pubkey: p2wsh_script_pubkey(&funding_script),
    };
    let channel_vout;
    let mut outputs = Vec::new();
    match change_value {
        Some(change) if ctx.rng.random_bool(0.5) => {
            let pkh = ctx.pkh();
            outputs.push(TxOutput {
                value: change,
                script_pubkey: p2wpkh_script_pubkey(&pkh),
            });
            channel_vout = 1;
            outputs.push(channel_output);
        }
        Some(change) => {
            channel_vout = 0;
            outputs.push(channel_output);
            let pkh = ctx.pkh();
            outputs.push(TxOutput {
                value: change,
                script_pubkey: p2wpkh_script_pubkey(&pkh),
            });
        }
        None => {
            channel_vout = 0;
            outputs.push(channel_output);
        }
    }

    let funding_txid = ctx.new_txid();
    ctx.push_tx(
        funding_txid,
        vec![funding_input],
        outputs,
        0,
        spec.open_height,
    );
    let funding = OutPoint::new(funding_txid, channel_vout);
    let change = change_value.map(|v| (OutPoint::new(funding_txid, 1 - channel_vout), v));
    let open_time = ctx.clock.time(spec.open_height);

    // closing transaction
    let close_fee = ctx.rng.random_range(200..2000);
    let close_txid = ctx.new_txid();
    let close_input = TxInput {
        prevout: funding,
        witness: vec![vec![], ctx.dummy_sig(), ctx.dummy_sig(), funding_script],
        sequence: 0xffff_fffe,
    };
    let close_time = ctx.clock.time(spec.close_height);
    let lifetime_days = (close_time - open_time) as f64 / 86_400.0;

    let mut coop_outputs = Vec::new();
    let closing = match &spec.close {
        CloseSpec::Coop {
            two_outputs,
            reserve,
            first_output_share,
        } => {
            let pot = capacity - close_fee;
            let values: Vec<u64> = if *two_outputs {
                let share = first_output_share.unwrap_or_else(|| ctx.rng.random_range(0.5..0.999));
                let out1 = ((pot as f64) * share) as u64;
                let out1 = out1.clamp(600, pot - 600);
                vec![out1, pot - out1]
            } else {
                vec![pot]
            };
            let outputs: Vec<TxOutput> = values
                .iter()
                .map(|v| {
                    let pkh = ctx.pkh();
                    TxOutput {
                        value: *v,
                        script_pubkey: p2wpkh_script_pubkey(&pkh),
                    }
                })
                .collect();
            ctx.push_tx(close_txid, vec![close_input], outputs, 0, spec.close_height);

            for (vout, value) in values.iter().enumerate() {
                let outpoint = OutPoint::new(close_txid, vout as u32);
                coop_outputs.push((outpoint, *value));
                if !reserve[vout] && ctx.rng.random_bool(0.75) {
                    let witness = vec![ctx.dummy_sig(), ctx.key().to_vec()];
                    let height = spec.close_height + ctx.rng.random_range(1..4);
                    ctx.sweep(outpoint, *value, witness, 0xffff_fffe, height);
                }
            }

            TruthClosing {
                closing_type: if *two_outputs {
                    ClosingType::CoopX2
                } else {
                    ClosingType::CoopX1
                },
                close_height: spec.close_height,
                close_time,
                out1_sat: values[0],
                out2_sat: values.get(1).copied().unwrap_or(0),
                htlc_values_sat: vec![],
                anchor_count: 0,
                anchor_sat: 0,
                fee_sat: close_fee,
                to_self_delay: None,
                revoked: false,
                resurrection: vec![],
                lifetime_days,
            }
        }
        CloseSpec::Commitment(commitment) => build_commitment_close(
            ctx,
            commitment,
            (&funding_key1, &funding_key2),
            capacity,
            close_fee,
            close_txid,
            close_input,
            spec.close_height,
            close_time,
            lifetime_days,
        ),
    };

    // gossip for announced channels
    let (updates_side0, updates_side1) = if spec.visibility == Visibility::Public {
        announce_channel(ctx, funding, open_time, close_time, &spec.updates)
    } else {
        (0, 0)
    };

    ctx.truth.push(TruthRecord {
        funding,
        visibility: spec.visibility,
        capacity_sat: capacity,
        open_height: spec.open_height,
        open_time,
        closing: Some(closing),
        updates_side0,
        updates_side1,
    });

    ChannelOutcome {
        truth_index: ctx.truth.len() - 1,
        funding,
        change,
        close_height: spec.close_height,
        coop_outputs,
    }
}

#[allow(clippy::too_many_arguments)]
fn build_commitment_close(
    ctx: &mut Ctx,
    spec: &CommitmentSpec,
    funding_keys: (&[u8; 33], &[u8; 33]),
    capacity: u64,
    close_fee: u64,
    close_txid: TxId,
    close_input: TxInput,
    close_height: u64,
    close_time: u64,
    lifetime_days: f64,
) -> TruthClosing {
    let locktime = 0x2000_0000 | ctx.rng.random_range(0..=0x00ff_ffffu32);

    let anchor_sat = if spec.anchors { 2 * ANCHOR_VALUE } else { 0 };
    let htlc_total: u64 = spec.htlc_values.iter().sum();
    let pot = capacity - close_fee - anchor_sat - htlc_total;

    let local_script = LocalOutputScript {
        revocation_pubkey: ctx.key(),
        local_delayed_pubkey: ctx.key(),
        to_self_delay: spec.to_self_delay,
    };
    let remote_key = ctx.key();
    let remote_pkh = ctx.pkh();

    let (local_value, remote_value) = match (spec.include_local, spec.remote.is_some()) {
        (true, true) => {
            let share = ctx.rng.random_range(0.35..0.95);
            let local = (((pot as f64) * share) as u64).clamp(600, pot - 600);
            (local, pot - local)
        }
        (true, false) => (pot, 0),
        (false, true) => (0, pot),
        (false, false) => unreachable!("a commitment close needs at least one side"),
    };

    // assemble outputs in a randomized order
    enum Role {
        Local,
        Remote,
        Htlc(u64),
        Anchor,
    }
    let mut roles: Vec<Role> = Vec::new();
    if spec.include_local {
        roles.push(Role::Local);
    }
    if spec.remote.is_some() {
        roles.push(Role::Remote);
    }
    roles.extend(spec.htlc_values.iter().map(|v| Role::Htlc(*v)));
    if spec.anchors {
        roles.push(Role::Anchor);
        roles.push(Role::Anchor);
    }
    roles.shuffle(&mut ctx.rng);

    let mut outputs = Vec::new();
    let mut local_vout = None;
    let mut remote_vout = None;
    let mut htlc_outputs: Vec<(u32, u64, Vec<u8>)> = Vec::new();
    let mut anchor_vouts: Vec<(u32, Vec<u8>)> = Vec::new();
    let mut countable: Vec<u64> = Vec::new();
    for role in &roles {
        let vout = outputs.len() as u32;
        match role {
            Role::Local => {
                local_vout = Some(vout);
                countable.push(local_value);
                outputs.push(TxOutput {
                    value: local_value,
                    script_pubkey: p2wsh_script_pubkey(&build_local_script(&local_script)),
                });
            }
            Role::Remote => {
                remote_vout = Some(vout);
                countable.push(remote_value);
                let script_pubkey = match spec.remote.unwrap() {
                    RemoteForm::Wpkh => p2wpkh_script_pubkey(&remote_pkh),
                    RemoteForm::DelayedWsh => {
                        p2wsh_script_pubkey(&build_remote_delayed_script(&remote_key))
                    }
                };
                outputs.push(TxOutput {
                    value: remote_value,
                    script_pubkey,
                });
            }
            Role::Htlc(value) => {
                let script = htlc_script(ctx);
                htlc_outputs.push((vout, *value, script.clone()));
                outputs.push(TxOutput {
                    value: *value,
                    script_pubkey: p2wsh_script_pubkey(&script),
                });
            }
            Role::Anchor => {
                let script = build_anchor_script(if anchor_vouts.is_empty() {
                    funding_keys.0
                } else {
                    funding_keys.1
                });
                anchor_vouts.push((vout, script.clone()));
                outputs.push(TxOutput {
                    value: ANCHOR_VALUE,
                    script_pubkey: p2wsh_script_pubkey(&script),
                });
            }
        }
    }
    let htlc_values_in_order: Vec<u64> = htlc_outputs.iter().map(|(_, v, _)| *v).collect();
    ctx.push_tx(
        close_txid,
        vec![close_input],
        outputs,
        locktime,
        close_height,
    );

    // spend the revealed-script outputs
    if let Some(vout) = local_vout {
        let outpoint = OutPoint::new(close_txid, vout);
        let script_bytes = build_local_script(&local_script);
        if spec.revoked {
            // punished immediately, in the same or the next block
            let height = close_height + ctx.rng.random_range(0..=1);
            let witness = vec![ctx.dummy_sig(), vec![0x01], script_bytes];
            ctx.sweep(outpoint, local_value, witness, 0xffff_fffe, height);
        } else {
            let delay = spec.to_self_delay as u64;
            let height = close_height + delay + ctx.rng.random_range(0..=5);
            let witness = vec![ctx.dummy_sig(), vec![], script_bytes];
            ctx.sweep(
                outpoint,
                local_value,
                witness,
                spec.to_self_delay as u32,
                height,
            );
        }
    }
    if let Some(vout) = remote_vout {
        let outpoint = OutPoint::new(close_txid, vout);
        match spec.remote.unwrap() {
            RemoteForm::Wpkh => {
                if ctx.rng.random_bool(0.8) {
                    let witness = vec![ctx.dummy_sig(), remote_key.to_vec()];
                    let height = close_height + ctx.rng.random_range(0..3);
                    ctx.sweep(outpoint, remote_value, witness, 0xffff_fffe, height);
                }
            }
            RemoteForm::DelayedWsh => {
                let script = build_remote_delayed_script(&remote_key);
                let witness = vec![ctx.dummy_sig(), script];
                let height = close_height + 1 + ctx.rng.random_range(0..3);
                ctx.sweep(outpoint, remote_value, witness, 1, height);
            }
        }
    }
    for (vout, value, script) in &htlc_outputs {
        let preimage: [u8; 32] = ctx.rng.random();
        let witness = vec![ctx.dummy_sig(), preimage.to_vec(), script.clone()];
        let height = close_height + ctx.rng.random_range(0..3);
        ctx.sweep(
            OutPoint::new(close_txid, *vout),
            *value,
            witness,
            0xffff_fffe,
            height,
        );
    }
    for (vout, script) in &anchor_vouts {
        let witness = vec![ctx.dummy_sig(), script.clone()];
        let height = close_height + ctx.rng.random_range(0..3);
        ctx.sweep(
            OutPoint::new(close_txid, *vout),
            ANCHOR_VALUE,
            witness,
            0xffff_fffe,
            height,
        );
    }

    let closing_type = if spec.revoked {
        ClosingType::Revoked
    } else {
        match (spec.include_local, spec.remote.is_some()) {
            (true, true) => ClosingType::UnilateralLocalRemote,
            (true, false) => ClosingType::UnilateralLocal,
            (false, true) => ClosingType::UnilateralRemote,
            (false, false) => unreachable!(),
        }
    };

    TruthClosing {
        closing_type,
        close_height,
        close_time,
        out1_sat: countable.first().copied().unwrap_or(0),
        out2_sat: countable.get(1).copied().unwrap_or(0),
        htlc_values_sat: htlc_values_in_order,
        anchor_count: if spec.anchors { 2 } else { 0 },
        anchor_sat,
        fee_sat: close_fee,
        to_self_delay: Some(spec.to_self_delay),
        revoked: spec.revoked,
        resurrection: vec![],
        lifetime_days,
    }
}

/// Emits announcement, node announcements, and channel updates; returns the
/// effective update counts per side.
fn announce_channel(
    ctx: &mut Ctx,
    channel: OutPoint,
    open_time: u64,
    close_time: u64,
    plan: &UpdatePlan,
) -> (u32, u32) {
    let node1 = ctx.node();
    let node2 = ctx.node();
    let announce_time = open_time + ctx.rng.random_range(60..600);
    ctx.gossip.push(GossipDraft {
        channel: Some(channel),
        event: DraftEvent::Announcement {
            timestamp: announce_time,
            node1,
            node2,
        },
    });
    for node_id in [node1, node2] {
        let timestamp = announce_time + ctx.rng.random_range(0..120);
        ctx.gossip.push(GossipDraft {
            channel: None,
            event: DraftEvent::Node { timestamp, node_id },
        });
    }

    match plan {
        UpdatePlan::Standard => {
            let side0 = standard_update_stream(ctx, channel, 0, open_time, close_time);
            let side1 = standard_update_stream(ctx, channel, 1, open_time, close_time);
            (side0, side1)
        }
        UpdatePlan::Rebalance { days } => {
            // one side raises its proportional fee day by day, the other
            // lowers it: the opposing-direction pattern
            for day in 0..*days {
                for (direction, ppm) in
                    [(0u8, 1_000 + day as u64 * 8), (1u8, 2_500 - day as u64 * 8)]
                {
                    let noise = ctx.rng.random_range(0..=3);
                    let timestamp =
                        open_time + day as u64 * 86_400 + ctx.rng.random_range(0..3_000);
                    let params = FeeParams {
                        base_fee_msat: 1_000,
                        fee_proportional_millionths: ppm + noise,
                        cltv_delta: 40,
                        htlc_minimum_msat: 1_000,
                        disabled: false,
                    };
                    ctx.gossip.push(GossipDraft {
                        channel: Some(channel),
                        event: DraftEvent::Update {
                            timestamp,
                            direction,
                            params,
                        },
                    });
                }
            }
            (*days, *days)
        }
    }
}

fn standard_update_stream(
    ctx: &mut Ctx,
    channel: OutPoint,
    direction: u8,
    open_time: u64,
    close_time: u64,
) -> u32 {
    let effective = 1 + ctx.rng.random_range(0..4u32);
    let window_start = open_time + 120;
    let window_end = close_time
        .saturating_sub(60)
        .max(window_start + effective as u64 * 4);
    let span = window_end - window_start;

    let mut times: Vec<u64> = (0..effective as u64)
        .map(|i| {
            window_start
                + i * span / effective as u64
                + ctx.rng.random_range(0..span / (effective as u64 * 2) + 1)
        })
        .collect();
    times.sort_unstable();
    times.dedup();

    let mut params = FeeParams {
        base_fee_msat: [0u64, 100, 1_000][ctx.rng.random_range(0..3)],
        fee_proportional_millionths: ctx.rng.random_range(1..3_000),
        cltv_delta: [14u32, 40, 144][ctx.rng.random_range(0..3)],
        htlc_minimum_msat: 1_000,
        disabled: false,
    };
    let mut emitted = 0u32;
    for (i, &timestamp) in times.iter().enumerate() {
        if i > 0 {
            // mutate so the params genuinely change
            let delta = ctx.rng.random_range(1..500);
            params.fee_proportional_millionths = if ctx.rng.random_bool(0.5) {
                params.fee_proportional_millionths + delta
            } else {
                params
                    .fee_proportional_millionths
                    .saturating_sub(delta)
                    .max(1)
            };
            if params.fee_proportional_millionths == 0 {
                params.fee_proportional_millionths = 1;
            }
        }
        ctx.gossip.push(GossipDraft {
            channel: Some(channel),
            event: DraftEvent::Update {
                timestamp,
                direction,
                params,
            },
        });
        emitted += 1;
        // occasionally rebroadcast identical parameters; not an update
        if ctx.rng.random_bool(0.3) {
            let gap = times
                .get(i + 1)
                .map_or(120, |next| (next - timestamp).max(2));
            ctx.gossip.push(GossipDraft {
                channel: Some(channel),
                event: DraftEvent::Update {
                    timestamp: timestamp + gap / 2,
                    direction,
                    params,
                },
            });
        }
    }
    emitted
}

fn pick_delay(ctx: &mut Ctx) -> u16 {
    // 24h is by far the most common choice, then multiples up to two weeks
    let roll = ctx.rng.random_range(0..10);
    match roll {
        0..=5 => 144,
        6..=7 => 288,
        8 => 720,
        _ => 1_008,
    }
}

fn build_scenario(ctx: &mut Ctx, kind: ScenarioKind, base: u64) {
    match kind {
        ScenarioKind::CoopX1 | ScenarioKind::CoopX2 => {
            let two = kind == ScenarioKind::CoopX2;
            let reserve = [ctx.rng.random_bool(0.45), two && ctx.rng.random_bool(0.45)];
            let open_height = base + ctx.rng.random_range(0..50);
            let close_height = open_height + ctx.rng.random_range(50..1000);
            let with_change = ctx.rng.random_bool(0.5);
            let outcome = build_channel(
                ctx,
                ChannelSpec {
                    visibility: Visibility::Public,
                    funding_source: None,
                    open_height,
                    close_height,
                    capacity: None,
                    with_change,
                    change_value: None,
                    close: CloseSpec::Coop {
                        two_outputs: two,
                        reserve,
                        first_output_share: None,
                    },
                    updates: UpdatePlan::Standard,
                },
            );
            sweep_unused_change(ctx, &outcome);
            for (i, (outpoint, value)) in outcome.coop_outputs.clone().into_iter().enumerate() {
                if !reserve[i] {
                    continue;
                }
                if value >= 120_000 {
                    resurrect(
                        ctx,
                        outcome.truth_index,
                        outcome.close_height,
                        outpoint,
                        value,
                    );
                } else {
                    // too small to refund a channel
                    let witness = vec![ctx.dummy_sig(), ctx.key().to_vec()];
                    let height = outcome.close_height + ctx.rng.random_range(1..4);
                    ctx.sweep(outpoint, value, witness, 0xffff_fffe, height);
                }
            }
        }
        ScenarioKind::UniLocal => {
            let to_self_delay = pick_delay(ctx);
            standalone_commitment(
                ctx,
                base,
                CommitmentSpec {
                    include_local: true,
                    remote: None,
                    htlc_values: vec![],
                    anchors: false,
                    revoked: false,
                    to_self_delay,
                },
            );
        }
        ScenarioKind::UniLocalRemote => {
            let to_self_delay = pick_delay(ctx);
            standalone_commitment(
                ctx,
                base,
                CommitmentSpec {
                    include_local: true,
                    remote: Some(RemoteForm::Wpkh),
                    htlc_values: vec![],
                    anchors: false,
                    revoked: false,
                    to_self_delay,
                },
            );
        }
        ScenarioKind::UniRemote => {
            let form = if ctx.rng.random_bool(0.25) {
                RemoteForm::DelayedWsh
            } else {
                RemoteForm::Wpkh
            };
            let to_self_delay = pick_delay(ctx);
            standalone_commitment(
                ctx,
                base,
                CommitmentSpec {
                    include_local: false,
                    remote: Some(form),
                    htlc_values: vec![],
                    anchors: false,
                    revoked: false,
                    to_self_delay,
                },
            );
        }
        ScenarioKind::Revoked => {
            let with_remote = ctx.rng.random_bool(0.5);
            let to_self_delay = pick_delay(ctx);
            standalone_commitment(
                ctx,
                base,
                CommitmentSpec {
                    include_local: true,
                    remote: with_remote.then_some(RemoteForm::Wpkh),
                    htlc_values: vec![],
                    anchors: false,
                    revoked: true,
                    to_self_delay,
                },
            );
        }
        ScenarioKind::HtlcClose(count) => {
            let htlc_values = (0..count)
                .map(|_| {
                    let round = [1_000u64, 2_000, 3_000, 10_000][ctx.rng.random_range(0..4)];
                    round + ctx.rng.random_range(0..50)
                })
                .collect();
            let to_self_delay = pick_delay(ctx);
            standalone_commitment(
                ctx,
                base,
                CommitmentSpec {
                    include_local: true,
                    remote: Some(RemoteForm::Wpkh),
                    htlc_values,
                    anchors: false,
                    revoked: false,
                    to_self_delay,
                },
            );
        }
        ScenarioKind::AnchorClose => {
            let to_self_delay = pick_delay(ctx);
            standalone_commitment(
                ctx,
                base,
                CommitmentSpec {
                    include_local: true,
                    remote: Some(RemoteForm::DelayedWsh),
                    htlc_values: vec![],
                    anchors: true,
                    revoked: false,
                    to_self_delay,
                },
            );
        }
        ScenarioKind::FeeRebalanceGossip => {
            let open_height = base + ctx.rng.random_range(0..50);
            let outcome = build_channel(
                ctx,
                ChannelSpec {
                    visibility: Visibility::Public,
                    funding_source: None,
                    open_height,
                    close_height: open_height + 21_000,
                    capacity: None,
                    with_change: false,
                    change_value: None,
                    close: CloseSpec::Coop {
                        two_outputs: true,
                        reserve: [false, false],
                        first_output_share: None,
                    },
                    updates: UpdatePlan::Rebalance { days: 140 },
                },
            );
            sweep_unused_change(ctx, &outcome);
        }
        ScenarioKind::PeelingChain(length) => peeling_chain(ctx, base, length),
    }
}

fn standalone_commitment(ctx: &mut Ctx, base: u64, spec: CommitmentSpec) {
    let open_height = base + ctx.rng.random_range(0..50);
    let close_height = open_height + ctx.rng.random_range(50..1000);
    let with_change = ctx.rng.random_bool(0.5);
    let outcome = build_channel(
        ctx,
        ChannelSpec {
            visibility: Visibility::Public,
            funding_source: None,
            open_height,
            close_height,
            capacity: None,
            with_change,
            change_value: None,
            close: CloseSpec::Commitment(spec),
            updates: UpdatePlan::Standard,
        },
    );
    sweep_unused_change(ctx, &outcome);
}

/// Spends the funding change output with a plain sweep about half the time.
fn sweep_unused_change(ctx: &mut Ctx, outcome: &ChannelOutcome) {
    if let Some((outpoint, value)) = outcome.change {
        if ctx.rng.random_bool(0.5) {
            let witness = vec![ctx.dummy_sig(), ctx.key().to_vec()];
            let height = outcome.close_height + ctx.rng.random_range(1..10);
            ctx.sweep(outpoint, value, witness, 0xffff_fffe, height);
        }
    }
}

/// A closing output re-funds a fresh channel; the new channel gets its own
/// cooperative lifecycle and truth record.
fn resurrect(
    ctx: &mut Ctx,
    parent_truth_index: usize,
    parent_close_height: u64,
    source: OutPoint,
    value: u64,
) {
    let visibility = if ctx.rng.random_bool(0.3) {
        Visibility::Private
    } else {
        Visibility::Public
    };
    let open_height = parent_close_height + ctx.rng.random_range(1..5);
    let close_height = open_height + ctx.rng.random_range(100..400);
    let two = ctx.rng.random_bool(0.5);
    let child = build_channel(
        ctx,
        ChannelSpec {
            visibility,
            funding_source: Some((source, value)),
            open_height,
            close_height,
            capacity: None,
            with_change: false,
            change_value: None,
            close: CloseSpec::Coop {
                two_outputs: two,
                reserve: [false, false],
                first_output_share: None,
            },
            updates: UpdatePlan::Standard,
        },
    );
    ctx.truth[parent_truth_index]
        .closing
        .as_mut()
        .expect("parent closed before resurrection")
        .resurrection
        .push(ResurrectionLink {
            from: source,
            to: child.funding.txid,
        });
}

/// A chain of `length` unannounced channels hanging off one public seed,
/// alternating change-output and closing-output funding hops.
fn peeling_chain(ctx: &mut Ctx, base: u64, length: u32) {
    let open_height = base + ctx.rng.random_range(0..20);
    // hop 1 spends the seed's change output; keep the peeled values large
    // enough that every hop stays inside the property-heuristic bounds
    let seed_close_height = open_height + ctx.rng.random_range(50..150);
    let seed = build_channel(
        ctx,
        ChannelSpec {
            visibility: Visibility::Public,
            funding_source: None,
            open_height,
            close_height: seed_close_height,
            capacity: Some(8_000_000),
            with_change: true,
            change_value: Some(6_000_000),
            close: CloseSpec::Coop {
                two_outputs: true,
                reserve: [false, false],
                first_output_share: None,
            },
            updates: UpdatePlan::Standard,
        },
    );

    let mut previous = seed;
    for hop in 1..=length {
        let via_change = hop % 2 == 1;
        let next_is_closing_funded = hop < length && (hop + 1) % 2 == 0;

        let (source, open_height) = if via_change {
            let (outpoint, value) = previous
                .change
                .expect("change-funded hop requires a change output on the predecessor");
            // the change can be spent as soon as the funding tx confirms
            let tx_height = ctx
                .txs
                .iter()
                .find(|t| t.txid == outpoint.txid)
                .and_then(|t| t.block_height)
                .unwrap();
            ((outpoint, value), tx_height + ctx.rng.random_range(5..15))
        } else {
            let (outpoint, value) = previous.coop_outputs[0];
            (
                (outpoint, value),
                previous.close_height + ctx.rng.random_range(1..5),
            )
        };

        let close: CloseSpec = if next_is_closing_funded {
            // the successor consumes our first closing output
            CloseSpec::Coop {
                two_outputs: true,
                reserve: [true, false],
                first_output_share: Some(0.6),
            }
        } else {
            match ctx.rng.random_range(0..5) {
                0 => CloseSpec::Coop {
                    two_outputs: false,
                    reserve: [false, false],
                    first_output_share: None,
                },
                1 => CloseSpec::Coop {
                    two_outputs: true,
                    reserve: [false, false],
                    first_output_share: None,
                },
                2 => CloseSpec::Commitment(CommitmentSpec {
                    include_local: true,
                    remote: None,
                    htlc_values: vec![],
                    anchors: false,
                    revoked: false,
                    to_self_delay: 144,
                }),
                3 => CloseSpec::Commitment(CommitmentSpec {
                    include_local: true,
                    remote: Some(RemoteForm::Wpkh),
                    htlc_values: vec![],
                    anchors: false,
                    revoked: false,
                    to_self_delay: 144,
                }),
                _ => CloseSpec::Commitment(CommitmentSpec {
                    include_local: false,
                    remote: Some(RemoteForm::Wpkh),
                    htlc_values: vec![],
                    anchors: false,
                    revoked: false,
                    to_self_delay: 144,
                }),
            }
        };

        let close_height = open_height + ctx.rng.random_range(50..150);
        let outcome = build_channel(
            ctx,
            ChannelSpec {
                visibility: Visibility::Private,
                funding_source: Some(source),
                open_height,
                close_height,
                capacity: None,
                // the next change-funded hop needs a change output to peel
                with_change: hop < length && (hop + 1) % 2 == 1,
                change_value: None,
                close,
                updates: UpdatePlan::Standard,
            },
        );

        if !via_change {
            // the hop's funding tx spent the predecessor's closing output:
            // that is a resurrection of the predecessor
            ctx.truth[previous.truth_index]
                .closing
                .as_mut()
                .expect("predecessor closed")
                .resurrection
                .push(ResurrectionLink {
                    from: source.0,
                    to: outcome.funding.txid,
                });
        }
        previous = outcome;
    }
}
