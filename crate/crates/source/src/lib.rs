//! Transaction retrieval behind one interface: an Esplora-compatible REST
//! client and a local fixture-file source, with an append-only on-disk cache
//! so multi-day scans can resume and walks replay offline.

pub mod cache;
pub mod fixture;
pub mod rest;
pub mod walk;

use lnlife_core::chain::{OutPoint, Transaction, TxId};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SourceError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("chain source unavailable: {0}")]
    SourceUnavailable(String),
    #[error("malformed record: {0}")]
    Malformed(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl SourceError {
    pub fn is_not_found(&self) -> bool {
        matches!(self, SourceError::NotFound(_))
    }
}

/// Spend status of one transaction output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutspendInfo {
    pub spent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spender: Option<TxId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spend_input_index: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spend_height: Option<u64>,
}

impl OutspendInfo {
    pub fn unspent() -> Self {
        OutspendInfo {
            spent: false,
            spender: None,
            spend_input_index: None,
            spend_height: None,
        }
    }

    pub fn spent_by(spender: TxId, input_index: u32, height: Option<u64>) -> Self {
        OutspendInfo {
            spent: true,
            spender: Some(spender),
            spend_input_index: Some(input_index),
            spend_height: height,
        }
    }

    /// `spent` and the presence of a spender must agree.
    pub fn validate(&self) -> Result<(), SourceError> {
        if self.spent != self.spender.is_some() {
            return Err(SourceError::Malformed(
                "outspend: spent flag disagrees with spender presence".into(),
            ));
        }
        Ok(())
    }
}

/// A source of transactions and spend information.
pub trait ChainSource: Send + Sync {
    fn tx(&self, txid: &TxId) -> Result<Transaction, SourceError>;
    fn outspend(&self, outpoint: &OutPoint) -> Result<OutspendInfo, SourceError>;
}

impl<S: ChainSource + ?Sized> ChainSource for &S {
    fn tx(&self, txid: &TxId) -> Result<Transaction, SourceError> {
        (**self).tx(txid)
    }

    fn outspend(&self, outpoint: &OutPoint) -> Result<OutspendInfo, SourceError> {
        (**self).outspend(outpoint)
    }
}

pub use cache::{CachedSource, TxCache};
pub use fixture::FixtureSource;
pub use rest::{RestConfig, RestSource};
pub use walk::{walk_channel, DownstreamSpend, WalkResult};
