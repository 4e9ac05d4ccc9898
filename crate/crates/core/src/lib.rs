//! Core data model and classifiers for reconstructing Lightning Network
//! channel lifecycles from on-chain transactions and gossip messages.

pub mod chain;
pub mod gossip;
pub mod heuristics;
pub mod lifecycle;
pub mod script;

pub use chain::{BlockRef, OutPoint, Transaction, TxId, TxInput, TxOutput};
pub use lifecycle::{ChannelRecord, ClosingReport, ClosingType, Visibility};
pub use script::{LocalSpendPath, OutputClass};
