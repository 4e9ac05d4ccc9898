//! Corpus assembly: many scenario instances merged into one dataset, written
//! as chain fixtures, a gossip file, a channel list, and a truth file.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use lnlife_core::gossip::GossipEvent;
use lnlife_source::fixture::{write_chain_file, FileHeader};
use lnlife_source::SourceError;
use rayon::prelude::*;

use crate::clock::BlockClock;
use crate::scenario::{generate_in_window, scenario_seed, ScenarioData, ScenarioKind, BASE_HEIGHT};
use crate::truth::{write_channels_file, write_truth_file};

pub const GOSSIP_FORMAT: &str = "lnlife-gossip";

/// The standard 500-scenario mix; every scenario kind is represented.
pub fn default_corpus_spec() -> Vec<(ScenarioKind, u32)> {
    vec![
        (ScenarioKind::CoopX1, 80),
        (ScenarioKind::CoopX2, 120),
        (ScenarioKind::UniLocal, 60),
        (ScenarioKind::UniLocalRemote, 60),
        (ScenarioKind::UniRemote, 50),
        (ScenarioKind::Revoked, 30),
        (ScenarioKind::PeelingChain(5), 20),
        (ScenarioKind::HtlcClose(0), 10),
        (ScenarioKind::HtlcClose(1), 20),
        (ScenarioKind::HtlcClose(2), 20),
        (ScenarioKind::HtlcClose(5), 10),
        (ScenarioKind::AnchorClose, 15),
        (ScenarioKind::FeeRebalanceGossip, 5),
    ]
}

/// Generates every scenario instance and merges the results. Scenarios run
/// in parallel over disjoint block-height windows and merge by instance
/// index, so the output is deterministic in `(spec, seed)`.
pub fn generate_corpus_data(spec: &[(ScenarioKind, u32)], seed: u64) -> ScenarioData {
    let clock = BlockClock::new(seed);

    let mut instances = Vec::new();
    let mut height_base = BASE_HEIGHT;
    for (kind, count) in spec {
        for _ in 0..*count {
            instances.push((*kind, height_base));
            height_base += kind.window();
        }
    }

    let parts: Vec<ScenarioData> = instances
        .into_par_iter()
        .enumerate()
        .map(|(index, (kind, base))| {
            generate_in_window(kind, scenario_seed(seed, index as u64), &clock, base)
        })
        .collect();

    let mut merged = ScenarioData {
        transactions: Vec::new(),
        gossip: Vec::new(),
        truth: Vec::new(),
        public_channels: Vec::new(),
    };
    for part in parts {
        merged.transactions.extend(part.transactions);
        merged.gossip.extend(part.gossip);
        merged.truth.extend(part.truth);
        merged.public_channels.extend(part.public_channels);
    }
    merged
        .transactions
        .sort_by_key(|tx| (tx.block_height, tx.txid));
    merged
        .gossip
        .sort_by_key(|e| (e.timestamp(), serde_json::to_string(e).unwrap()));
    merged
        .truth
        .sort_by_key(|t| (t.funding.txid, t.funding.vout));
    merged.public_channels.sort_by_key(|e| e.scid);
    merged
}

#[derive(Debug, Clone)]
pub struct CorpusFiles {
    pub chain: PathBuf,
    pub gossip: PathBuf,
    pub truth: PathBuf,
    pub channels: PathBuf,
}

/// Writes the merged dataset into `out_dir`. Byte output is stable per
/// `(spec, seed)`.
pub fn generate_corpus(
    spec: &[(ScenarioKind, u32)],
    seed: u64,
    out_dir: &Path,
) -> Result<CorpusFiles, SourceError> {
    std::fs::create_dir_all(out_dir)?;
    let data = generate_corpus_data(spec, seed);
    let files = CorpusFiles {
        chain: out_dir.join("chain.jsonl"),
        gossip: out_dir.join("gossip.jsonl"),
        truth: out_dir.join("truth.jsonl"),
        channels: out_dir.join("channels.jsonl"),
    };
    write_chain_file(&files.chain, &data.transactions)?;
    write_gossip_file(&files.gossip, &data.gossip)?;
    write_truth_file(&files.truth, &data.truth)?;
    write_channels_file(&files.channels, &data.public_channels)?;
    Ok(files)
}

pub fn write_gossip_file(path: &Path, events: &[GossipEvent]) -> Result<(), SourceError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &FileHeader::new(GOSSIP_FORMAT))
        .map_err(|e| SourceError::Malformed(e.to_string()))?;
    writeln!(w)?;
    for event in events {
        serde_json::to_writer(&mut w, event).map_err(|e| SourceError::Malformed(e.to_string()))?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}
