//! The end-to-end pipeline: resolve announced channels from gossip, discover
//! private candidates on-chain, walk and classify every channel, and link
//! resurrections. Per-channel failures are counted, never fatal.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use lnlife_core::chain::{OutPoint, TxId};
use lnlife_core::gossip::{read_gossip, GossipEvent, GossipIngest, NodeId, ShortChannelId};
use lnlife_core::heuristics::{tracing_heuristic, PropertyParams, TraceParams, TxGraph};
use lnlife_core::lifecycle::{
    channel_lifetime, classify_closing, detect_resurrection, extract_htlcs, imbalance,
    ChannelRecord, ClosingReport, Visibility,
};
use lnlife_core::script::{classify_local_spend, classify_output, LocalSpendPath, OutputClass};
use lnlife_core::BlockRef;
use lnlife_source::{
    walk_channel, CachedSource, ChainSource, FixtureSource, RestConfig, RestSource, SourceError,
    TxCache,
};
use lnlife_synth::truth::read_channels_file;
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Source(#[from] SourceError),
}

impl From<std::io::Error> for PipelineError {
    fn from(e: std::io::Error) -> Self {
        PipelineError::Source(SourceError::Io(e))
    }
}

/// Reads a gossip file, counting malformed lines.
pub fn open_gossip(path: &std::path::Path) -> Result<GossipIngest, PipelineError> {
    let file = std::fs::File::open(path)
        .map_err(|e| PipelineError::Config(format!("gossip file {}: {e}", path.display())))?;
    Ok(read_gossip(std::io::BufReader::new(file))?)
}

#[derive(Debug, Clone)]
pub enum SourceConfig {
    /// Directory of `*.jsonl` chain fixture files.
    FixtureDir(PathBuf),
    /// A single chain fixture file.
    FixtureFile(PathBuf),
    /// Esplora-compatible REST endpoint.
    Rest(RestConfig),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub source: SourceConfig,
    pub cache_path: Option<PathBuf>,
    pub gossip_file: PathBuf,
    /// Optional list of announced channels (scid + funding outpoint). With a
    /// REST source this is required; with fixtures the scids from gossip are
    /// resolved against the fixture set when absent.
    pub channels_file: Option<PathBuf>,
    pub property: PropertyParams,
    pub trace_depth: u32,
    pub min_updates: usize,
    pub workers: usize,
    pub downstream_depth: u32,
}

impl PipelineConfig {
    pub fn new(source: SourceConfig, gossip_file: PathBuf) -> Self {
        PipelineConfig {
            source,
            cache_path: None,
            gossip_file,
            channels_file: None,
            property: PropertyParams::default(),
            trace_depth: 10,
            min_updates: 100,
            workers: 0, // rayon default
            downstream_depth: 1,
        }
    }
}

/// A channel either announced in gossip or discovered by the heuristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelSeed {
    pub funding: OutPoint,
    pub visibility: Visibility,
    pub scid: Option<ShortChannelId>,
}

/// One walked and classified channel.
#[derive(Debug, Clone)]
pub struct AnalyzedChannel {
    pub record: ChannelRecord,
    pub scid: Option<ShortChannelId>,
    /// Spenders of the closing outputs, for resurrection linking.
    pub close_output_spends: Vec<(OutPoint, TxId)>,
}

#[derive(Debug, Default, Clone, serde::Serialize)]
pub struct Diagnostics {
    pub malformed_gossip_lines: usize,
    pub channels_total: usize,
    pub channels_failed: usize,
    pub failures: Vec<String>,
    pub unresolved_scids: usize,
}

/// Everything the pipeline produced, ready for aggregation.
pub struct PipelineOutput {
    pub channels: Vec<AnalyzedChannel>,
    pub gossip: Vec<GossipEvent>,
    pub endpoints: HashMap<ShortChannelId, (NodeId, NodeId)>,
    pub diagnostics: Diagnostics,
    pub min_updates: usize,
}

/// Walks one channel and classifies its closing.
pub fn analyze_channel(
    source: &dyn ChainSource,
    funding: OutPoint,
    visibility: Visibility,
    downstream_depth: u32,
) -> Result<AnalyzedChannel, PipelineError> {
    let walk = walk_channel(source, funding, downstream_depth.max(1))?;
    let funding_tx = &walk.funding_tx;
    let capacity = funding_tx.outputs[funding.vout as usize].value;
    let open = BlockRef {
        height: funding_tx
            .block_height
            .ok_or_else(|| PipelineError::Config(format!("funding {funding} unconfirmed")))?,
        time: funding_tx
            .block_time
            .ok_or_else(|| PipelineError::Config(format!("funding {funding} has no time")))?,
    };

    let mut record = ChannelRecord {
        funding,
        capacity,
        visibility,
        open,
        close: None,
        closing: None,
    };
    let mut spends = Vec::new();

    if let Some(close_tx) = &walk.close_tx {
        let close = BlockRef {
            height: close_tx.block_height.unwrap_or(open.height),
            time: close_tx.block_time.unwrap_or(open.time),
        };

        // classify each closing output from its spending witness
        let sweeps: HashMap<OutPoint, _> = walk
            .downstream
            .iter()
            .filter(|d| d.depth == 1)
            .map(|d| (d.from, &d.tx))
            .collect();
        let mut classes: Vec<OutputClass> = Vec::with_capacity(close_tx.outputs.len());
        let mut local_paths: Vec<LocalSpendPath> = Vec::new();
        let values: Vec<u64> = close_tx.outputs.iter().map(|o| o.value).collect();
        for (vout, output) in close_tx.outputs.iter().enumerate() {
            let outpoint = OutPoint::new(close_tx.txid, vout as u32);
            let witness = sweeps.get(&outpoint).and_then(|tx| {
                spends.push((outpoint, tx.txid));
                let input = tx.input_spending(&outpoint)?;
                Some(tx.inputs[input].witness.as_slice())
            });
            let class = classify_output(output, None, witness)
                .map_err(|e| PipelineError::Config(format!("output {outpoint}: {e}")))?;
            if let (OutputClass::ToLocal(local), Some(witness)) = (&class, witness) {
                let path = classify_local_spend(witness, local)
                    .map_err(|e| PipelineError::Config(format!("output {outpoint}: {e}")))?;
                local_paths.push(path);
            }
            classes.push(class);
        }

        let closing_type = classify_closing(&funding, close_tx, &classes, &local_paths)
            .map_err(|e| PipelineError::Config(format!("close {}: {e}", close_tx.txid)))?;

        let commitment = lnlife_core::lifecycle::is_commitment(close_tx).is_commitment;
        let countable: Vec<u64> = classes
            .iter()
            .zip(&values)
            .filter(|(class, _)| {
                if commitment {
                    matches!(class, OutputClass::ToLocal(_) | OutputClass::ToRemote)
                } else {
                    !class.is_anchor()
                }
            })
            .map(|(_, value)| *value)
            .collect();
        let out1 = countable.first().copied().unwrap_or(0);
        let out2 = countable.get(1).copied().unwrap_or(0);
        let imbalance = imbalance(out1, out2)
            .map_err(|e| PipelineError::Config(format!("close {}: {e}", close_tx.txid)))?;
        let (htlc_count, htlc_values) = extract_htlcs(&classes, &values);
        let anchors = classes.iter().filter(|c| c.is_anchor()).count();

        record.close = Some(close);
        record.closing = Some(ClosingReport {
            closing_type,
            out1,
            out2,
            imbalance,
            htlc_count,
            htlc_values,
            anchors,
            resurrection: Vec::new(), // linked once all channels are known
            close_height: close.height,
        });
    }

    Ok(AnalyzedChannel {
        record,
        scid: None,
        close_output_spends: spends,
    })
}

/// Lifetime in days for a closed channel.
pub fn record_lifetime_days(record: &ChannelRecord) -> Option<f64> {
    let close = record.close?;
    channel_lifetime(record.open, close).ok()
}

fn open_source(
    config: &PipelineConfig,
) -> Result<(Box<dyn ChainSource>, Option<FixtureSource>), PipelineError> {
    match &config.source {
        SourceConfig::FixtureDir(dir) => {
            let fixtures = FixtureSource::from_dir(dir)?;
            let second = FixtureSource::from_dir(dir)?;
            Ok((Box::new(fixtures), Some(second)))
        }
        SourceConfig::FixtureFile(path) => {
            let fixtures = FixtureSource::from_file(path)?;
            let second = FixtureSource::from_file(path)?;
            Ok((Box::new(fixtures), Some(second)))
        }
        SourceConfig::Rest(rest) => {
            let source = RestSource::new(rest.clone())?;
            let boxed: Box<dyn ChainSource> = match &config.cache_path {
                Some(path) => Box::new(CachedSource::new(source, TxCache::open(path)?)),
                None => Box::new(source),
            };
            Ok((boxed, None))
        }
    }
}

/// Resolves the channel set (announced plus traced), walks and classifies
/// every channel, and links resurrections.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineOutput, PipelineError> {
    let (source, fixtures) = open_source(config)?;

    let GossipIngest {
        events: gossip,
        malformed_lines,
    } = open_gossip(&config.gossip_file)?;

    let mut diagnostics = Diagnostics {
        malformed_gossip_lines: malformed_lines,
        ..Default::default()
    };

    // endpoints per announced scid
    let mut endpoints = HashMap::new();
    for event in &gossip {
        if let GossipEvent::ChannelAnnouncement {
            scid, node1, node2, ..
        } = event
        {
            endpoints.insert(*scid, (*node1, *node2));
        }
    }

    // the public channel set: explicit list, or scids resolved on fixtures
    let mut public: Vec<(OutPoint, ShortChannelId)> = Vec::new();
    if let Some(path) = &config.channels_file {
        for entry in read_channels_file(path)? {
            public.push((entry.funding, entry.scid));
        }
    } else if let Some(fixtures) = &fixtures {
        let mut scids: Vec<ShortChannelId> = endpoints.keys().copied().collect();
        scids.sort();
        for scid in scids {
            match fixtures.resolve_scid(&scid) {
                Some(outpoint) => public.push((outpoint, scid)),
                None => diagnostics.unresolved_scids += 1,
            }
        }
    } else {
        return Err(PipelineError::Config(
            "a REST source needs an explicit channel list (gossip scids cannot be \
             resolved without a block index)"
                .into(),
        ));
    }
    public.sort_by_key(|(outpoint, _)| *outpoint);
    public.dedup_by_key(|(outpoint, _)| *outpoint);

    // private candidates via the tracing heuristic (fixture sources only)
    let mut seeds: Vec<ChannelSeed> = public
        .iter()
        .map(|(funding, scid)| ChannelSeed {
            funding: *funding,
            visibility: Visibility::Public,
            scid: Some(*scid),
        })
        .collect();
    if let Some(fixtures) = &fixtures {
        let graph = TxGraph::build(fixtures.transactions().cloned(), &config.property);
        let public_set: HashSet<OutPoint> = public.iter().map(|(o, _)| *o).collect();
        let params = TraceParams {
            property: config.property,
            max_depth: config.trace_depth,
        };
        for candidate in tracing_heuristic(&graph, &public_set, &params) {
            seeds.push(ChannelSeed {
                funding: candidate.funding,
                visibility: Visibility::Private,
                scid: None,
            });
        }
    }
    diagnostics.channels_total = seeds.len();

    // walk and classify, fanned out over the worker pool
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    let source_ref: &dyn ChainSource = source.as_ref();
    let results: Vec<Result<AnalyzedChannel, (OutPoint, String)>> = pool.install(|| {
        seeds
            .par_iter()
            .map(|seed| {
                analyze_channel(
                    source_ref,
                    seed.funding,
                    seed.visibility,
                    config.downstream_depth,
                )
                .map(|mut analyzed| {
                    analyzed.scid = seed.scid;
                    analyzed
                })
                .map_err(|e| (seed.funding, e.to_string()))
            })
            .collect()
    });

    let mut channels = Vec::with_capacity(results.len());
    for result in results {
        match result {
            Ok(analyzed) => channels.push(analyzed),
            Err((funding, message)) => {
                diagnostics.channels_failed += 1;
                diagnostics.failures.push(format!("{funding}: {message}"));
            }
        }
    }
    channels.sort_by_key(|c| (c.record.funding.txid, c.record.funding.vout));

    // resurrection: closing outputs feeding a known channel funding tx
    let funding_index: HashSet<OutPoint> = channels.iter().map(|c| c.record.funding).collect();
    let all_spends: HashMap<OutPoint, TxId> = channels
        .iter()
        .flat_map(|c| c.close_output_spends.iter().copied())
        .collect();
    for channel in &mut channels {
        if let Some(closing) = &mut channel.record.closing {
            let outputs: Vec<OutPoint> = channel
                .close_output_spends
                .iter()
                .map(|(o, _)| *o)
                .collect();
            closing.resurrection = detect_resurrection(&outputs, &all_spends, &funding_index);
        }
    }

    Ok(PipelineOutput {
        channels,
        gossip,
        endpoints,
        diagnostics,
        min_updates: config.min_updates,
    })
}
