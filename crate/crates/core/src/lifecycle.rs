//! Per-channel lifecycle classification: commitment detection by locktime,
//! closing-type taxonomy, imbalance, unsettled HTLC extraction, resurrection
//! links, and the block-delay measures.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{BlockRef, OutPoint, Transaction, TxId};
use crate::script::{LocalSpendPath, OutputClass};

/// Inclusive locktime range marking a commitment transaction (0x20000000 ..=
/// 0x20ffffff); the lower 24 bits carry the obscured commitment number.
pub const COMMITMENT_LOCKTIME_MIN: u32 = 536_870_912;
pub const COMMITMENT_LOCKTIME_MAX: u32 = 553_648_127;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LifecycleError {
    #[error("transaction does not spend the channel funding outpoint")]
    NotAClose,
    #[error("commitment has neither a local nor a remote output to classify")]
    Unclassifiable,
    #[error("imbalance undefined: both outputs are zero")]
    ZeroTotal,
    #[error("close time precedes open time")]
    NegativeLifetime,
    #[error("revocation height precedes commitment height")]
    NegativeDelay,
    #[error("output spent before its relative lock expired")]
    LockViolated,
}

/// Whether a transaction is a commitment, per its locktime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommitmentMarker {
    pub is_commitment: bool,
    /// Lower 24 locktime bits; present only for commitments. The true
    /// commitment number is obscured by a hash and is not recoverable.
    pub obscured_payload: Option<u32>,
}

/// Tests the commitment locktime range and extracts the obscured payload.
pub fn is_commitment(tx: &Transaction) -> CommitmentMarker {
    let is_commitment = (COMMITMENT_LOCKTIME_MIN..=COMMITMENT_LOCKTIME_MAX).contains(&tx.locktime);
    CommitmentMarker {
        is_commitment,
        obscured_payload: is_commitment.then_some(tx.locktime & 0x00ff_ffff),
    }
}

/// The closing taxonomy: cooperative closes by output count, unilateral
/// closes by which sides have an output, and revoked commitments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClosingType {
    #[serde(rename = "coopx1")]
    CoopX1,
    #[serde(rename = "coopx2")]
    CoopX2,
    #[serde(rename = "local")]
    UnilateralLocal,
    #[serde(rename = "local+remote")]
    UnilateralLocalRemote,
    #[serde(rename = "remote")]
    UnilateralRemote,
    #[serde(rename = "revoked")]
    Revoked,
}

impl ClosingType {
    pub const ALL: [ClosingType; 6] = [
        ClosingType::CoopX1,
        ClosingType::CoopX2,
        ClosingType::UnilateralLocal,
        ClosingType::UnilateralLocalRemote,
        ClosingType::UnilateralRemote,
        ClosingType::Revoked,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ClosingType::CoopX1 => "coopx1",
            ClosingType::CoopX2 => "coopx2",
            ClosingType::UnilateralLocal => "local",
            ClosingType::UnilateralLocalRemote => "local+remote",
            ClosingType::UnilateralRemote => "remote",
            ClosingType::Revoked => "revoked",
        }
    }

    pub fn is_cooperative(&self) -> bool {
        matches!(self, ClosingType::CoopX1 | ClosingType::CoopX2)
    }
}

impl fmt::Display for ClosingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A closing output that directly funded a new channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResurrectionLink {
    pub from: OutPoint,
    pub to: TxId,
}

/// Everything derived from one channel's closing transaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosingReport {
    pub closing_type: ClosingType,
    pub out1: u64,
    pub out2: u64,
    pub imbalance: f64,
    pub htlc_count: usize,
    pub htlc_values: Vec<u64>,
    pub anchors: usize,
    pub resurrection: Vec<ResurrectionLink>,
    pub close_height: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Private,
}

impl Visibility {
    pub fn label(&self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::Private => "private",
        }
    }
}

/// One channel's full lifecycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub funding: OutPoint,
    pub capacity: u64,
    pub visibility: Visibility,
    pub open: BlockRef,
    pub close: Option<BlockRef>,
    pub closing: Option<ClosingReport>,
}

/// Classifies the transaction spending a channel's funding outpoint.
///
/// Non-commitment spends are cooperative closes, bucketed by the number of
/// non-anchor outputs. Commitment spends are revoked as soon as any to_local
/// output was claimed through the revocation branch, and otherwise bucketed
/// by which of the local/remote outputs are present (anchors and HTLCs do
/// not count).
pub fn classify_closing(
    funding: &OutPoint,
    spend_tx: &Transaction,
    output_classes: &[OutputClass],
    local_spend_paths: &[LocalSpendPath],
) -> Result<ClosingType, LifecycleError> {
    if spend_tx.input_spending(funding).is_none() {
        return Err(LifecycleError::NotAClose);
    }
    if !is_commitment(spend_tx).is_commitment {
        let countable = output_classes.iter().filter(|c| !c.is_anchor()).count();
        return match countable {
            1 => Ok(ClosingType::CoopX1),
            2 => Ok(ClosingType::CoopX2),
            _ => Err(LifecycleError::Unclassifiable),
        };
    }
    if local_spend_paths.contains(&LocalSpendPath::RevocationPath) {
        return Ok(ClosingType::Revoked);
    }
    let has_local = output_classes
        .iter()
        .any(|c| matches!(c, OutputClass::ToLocal(_)));
    let has_remote = output_classes
        .iter()
        .any(|c| matches!(c, OutputClass::ToRemote));
    match (has_local, has_remote) {
        (true, true) => Ok(ClosingType::UnilateralLocalRemote),
        (true, false) => Ok(ClosingType::UnilateralLocal),
        (false, true) => Ok(ClosingType::UnilateralRemote),
        (false, false) => Err(LifecycleError::Unclassifiable),
    }
}

/// Channel imbalance at closing: `2(max(out1,out2)/(out1+out2) - 0.5)`,
/// 0 for a perfectly balanced close and 1 for a fully one-sided one. A
/// single-output closing passes the missing side as 0.
pub fn imbalance(out1: u64, out2: u64) -> Result<f64, LifecycleError> {
    let total = out1 + out2;
    if total == 0 {
        return Err(LifecycleError::ZeroTotal);
    }
    let max = out1.max(out2) as f64;
    Ok(2.0 * (max / total as f64 - 0.5))
}

/// Collects the values of all HTLC-classified outputs, in output order.
pub fn extract_htlcs(output_classes: &[OutputClass], values: &[u64]) -> (usize, Vec<u64>) {
    let htlc_values: Vec<u64> = output_classes
        .iter()
        .zip(values)
        .filter(|(c, _)| c.is_htlc())
        .map(|(_, v)| *v)
        .collect();
    (htlc_values.len(), htlc_values)
}

/// Links every closing output whose spending transaction is itself a known
/// channel funding transaction. `spends` maps outpoints to their spender;
/// `funding_index` holds all known channel funding outpoints.
pub fn detect_resurrection(
    closing_outputs: &[OutPoint],
    spends: &HashMap<OutPoint, TxId>,
    funding_index: &HashSet<OutPoint>,
) -> Vec<ResurrectionLink> {
    let funding_txids: HashSet<TxId> = funding_index.iter().map(|op| op.txid).collect();
    closing_outputs
        .iter()
        .filter_map(|op| {
            let spender = spends.get(op)?;
            funding_txids.contains(spender).then_some(ResurrectionLink {
                from: *op,
                to: *spender,
            })
        })
        .collect()
}

/// Channel lifetime in days, from block timestamps.
pub fn channel_lifetime(open: BlockRef, close: BlockRef) -> Result<f64, LifecycleError> {
    if close.time < open.time {
        return Err(LifecycleError::NegativeLifetime);
    }
    Ok((close.time - open.time) as f64 / 86_400.0)
}

/// Blocks between a published commitment and its revocation; 0 means the
/// same block.
pub fn revocation_delay(
    commitment_height: u64,
    revocation_height: u64,
) -> Result<u64, LifecycleError> {
    revocation_height
        .checked_sub(commitment_height)
        .ok_or(LifecycleError::NegativeDelay)
}

/// Blocks between a to_local output's lock expiry and its spend. A spend
/// before expiry would be rejected by the chain, so it flags a bad fixture.
pub fn spending_delay(
    commitment_height: u64,
    to_self_delay: u16,
    spend_height: u64,
) -> Result<u64, LifecycleError> {
    let unlock_height = commitment_height + to_self_delay as u64;
    spend_height
        .checked_sub(unlock_height)
        .ok_or(LifecycleError::LockViolated)
}
