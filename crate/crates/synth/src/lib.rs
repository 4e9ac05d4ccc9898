//! Deterministic generator of labeled synthetic channel lifecycles: chain
//! transactions plus matching gossip, with ground truth for every classifier.

pub mod clock;
pub mod corpus;
pub mod scenario;
pub mod truth;

pub use clock::BlockClock;
pub use corpus::{default_corpus_spec, generate_corpus, generate_corpus_data, CorpusFiles};
pub use scenario::{generate, ScenarioData, ScenarioKind};
pub use truth::{PublicChannelEntry, TruthClosing, TruthRecord};
