use std::collections::HashSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use lnlife_cli::pipeline::{open_gossip, ChannelSeed};
use lnlife_cli::report::gossip_only_stats;
use lnlife_cli::{
    analyze_channel, build_report, emit, run_pipeline, OutputFormat, PipelineConfig, PipelineError,
    SourceConfig,
};
use lnlife_core::chain::{OutPoint, TxId};
use lnlife_core::heuristics::{tracing_heuristic, PropertyParams, TraceParams, TxGraph};
use lnlife_core::lifecycle::Visibility;
use lnlife_source::{
    walk_channel, CachedSource, ChainSource, FixtureSource, RestConfig, RestSource, TxCache,
};
use lnlife_synth::truth::read_channels_file;
use lnlife_synth::{default_corpus_spec, generate_corpus, ScenarioKind};

#[derive(Parser)]
#[command(
    name = "lnlife",
    version,
    about = "Lightning channel lifecycle analysis toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SourceArgs {
    /// Directory of chain fixture files (*.jsonl)
    #[arg(long, value_name = "DIR", global = true)]
    fixtures: Option<PathBuf>,
    /// A single chain fixture file
    #[arg(long, value_name = "FILE", global = true)]
    chain_file: Option<PathBuf>,
    /// Esplora-compatible REST base URL (e.g. http://host:port)
    #[arg(long, value_name = "URL", global = true)]
    rest: Option<String>,
    /// On-disk transaction cache, used with the REST source
    #[arg(long, value_name = "FILE", global = true)]
    cache: Option<PathBuf>,
    /// Max in-flight REST requests
    #[arg(long, default_value_t = 8)]
    max_in_flight: usize,
    /// REST retries on server errors
    #[arg(long, default_value_t = 3)]
    retries: u32,
    /// REST request timeout in seconds
    #[arg(long, default_value_t = 10)]
    timeout_secs: u64,
}

impl SourceArgs {
    fn to_config(&self) -> Result<SourceConfig, CliError> {
        match (&self.fixtures, &self.chain_file, &self.rest) {
            (Some(dir), None, None) => Ok(SourceConfig::FixtureDir(dir.clone())),
            (None, Some(file), None) => Ok(SourceConfig::FixtureFile(file.clone())),
            (None, None, Some(url)) => {
                let mut rest = RestConfig::new(url.clone());
                rest.max_in_flight = self.max_in_flight;
                rest.retries = self.retries;
                rest.timeout = Duration::from_secs(self.timeout_secs);
                Ok(SourceConfig::Rest(rest))
            }
            _ => Err(CliError::Config(
                "pick exactly one source: --fixtures DIR, --chain-file FILE, or --rest URL".into(),
            )),
        }
    }
}

#[derive(Args)]
struct HeuristicArgs {
    /// Lower channel-value bound for the property heuristic (satoshis)
    #[arg(long, default_value_t = 20_000)]
    min_channel_sat: u64,
    /// Upper channel-value bound (defaults to the non-wumbo cap)
    #[arg(long, default_value_t = 16_777_215)]
    max_channel_sat: u64,
    /// Maximum peeling-chain depth
    #[arg(long, default_value_t = 10)]
    trace_depth: u32,
}

impl HeuristicArgs {
    fn property(&self) -> PropertyParams {
        PropertyParams {
            min_channel_sat: self.min_channel_sat,
            max_channel_sat: self.max_channel_sat,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic corpus (chain, gossip, channels, truth)
    Synth {
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Scenario mix, e.g. "coopx1=80,coopx2=120,peeling:5=20"; the
        /// built-in 500-scenario mix when omitted
        #[arg(long)]
        scenarios: Option<String>,
    },
    /// Walk all announced channels through a source, filling the cache
    Ingest {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_name = "FILE")]
        gossip: PathBuf,
        /// Channel list (scid + funding outpoint); required with --rest
        #[arg(long, value_name = "FILE")]
        channels: Option<PathBuf>,
        /// Downstream spend depth to prefetch
        #[arg(long, default_value_t = 1)]
        depth: u32,
    },
    /// Classify one channel's closing and print the report as JSON
    Classify {
        #[command(flatten)]
        source: SourceArgs,
        /// Funding outpoint as TXID:VOUT
        #[arg(long, value_name = "OUTPOINT")]
        funding: String,
        #[arg(long, default_value = "public")]
        visibility: String,
    },
    /// Detect private-channel candidates from a fixture set
    DetectPrivate {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_name = "FILE")]
        gossip: PathBuf,
        #[arg(long, value_name = "FILE")]
        channels: Option<PathBuf>,
        #[command(flatten)]
        heuristics: HeuristicArgs,
    },
    /// Update-rate and fee-correlation statistics from a gossip file alone
    GossipStats {
        #[arg(long, value_name = "FILE")]
        gossip: PathBuf,
        /// Minimum effective updates per side for the correlation
        #[arg(long, default_value_t = 100)]
        min_updates: usize,
    },
    /// Full pipeline: walk, classify, aggregate, emit one file per section
    Report {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_name = "FILE")]
        gossip: PathBuf,
        #[arg(long, value_name = "FILE")]
        channels: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
        /// csv or json
        #[arg(long, default_value = "csv")]
        format: String,
        /// Worker threads (0 = one per core)
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value_t = 100)]
        min_updates: usize,
        #[command(flatten)]
        heuristics: HeuristicArgs,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    SourceFailure(String),
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(msg) => CliError::Config(msg),
            PipelineError::Source(source) => CliError::SourceFailure(source.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path with success
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::SourceFailure(msg)) => {
            eprintln!("error: chain source failed: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_scenarios(spec: &str) -> Result<Vec<(ScenarioKind, u32)>, CliError> {
    spec.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            let (kind, count) = part
                .rsplit_once('=')
                .ok_or_else(|| CliError::Config(format!("bad scenario entry {part:?}")))?;
            let kind: ScenarioKind = kind
                .trim()
                .parse()
                .map_err(|e| CliError::Config(format!("{e}")))?;
            let count: u32 = count
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad count in {part:?}")))?;
            Ok((kind, count))
        })
        .collect()
}

fn parse_outpoint(s: &str) -> Result<OutPoint, CliError> {
    let (txid, vout) = s
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("expected TXID:VOUT, got {s:?}")))?;
    let txid: TxId = txid
        .parse()
        .map_err(|_| CliError::Config(format!("bad txid in {s:?}")))?;
    let vout: u32 = vout
        .parse()
        .map_err(|_| CliError::Config(format!("bad vout in {s:?}")))?;
    Ok(OutPoint::new(txid, vout))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth {
            out_dir,
            seed,
            scenarios,
        } => {
            let spec = match scenarios {
                Some(raw) => parse_scenarios(&raw)?,
                None => default_corpus_spec(),
            };
            let files = generate_corpus(&spec, seed, &out_dir)
                .map_err(|e| CliError::Config(e.to_string()))?;
            println!("chain:    {}", files.chain.display());
            println!("gossip:   {}", files.gossip.display());
            println!("channels: {}", files.channels.display());
            println!("truth:    {}", files.truth.display());
            Ok(())
        }
        Command::Ingest {
            source,
            gossip,
            channels,
            depth,
        } => {
            let seeds = resolve_seeds(&source, &gossip, &channels)?;
            let chain = open_plain_source(&source)?;
            let mut walked = 0usize;
            let mut failed = 0usize;
            for seed in &seeds {
                match walk_channel(chain.as_ref(), seed.funding, depth) {
                    Ok(_) => walked += 1,
                    Err(_) => failed += 1,
                }
            }
            println!(
                "{{\"channels\":{},\"walked\":{},\"failed\":{}}}",
                seeds.len(),
                walked,
                failed
            );
            if !seeds.is_empty() && failed == seeds.len() {
                return Err(CliError::SourceFailure("every channel walk failed".into()));
            }
            Ok(())
        }
        Command::Classify {
            source,
            funding,
            visibility,
        } => {
            let funding = parse_outpoint(&funding)?;
            let visibility = match visibility.as_str() {
                "public" => Visibility::Public,
                "private" => Visibility::Private,
                other => {
                    return Err(CliError::Config(format!(
                        "visibility must be public or private, got {other:?}"
                    )))
                }
            };
            let chain = open_plain_source(&source)?;
            let analyzed = analyze_channel(chain.as_ref(), funding, visibility, 1)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&analyzed.record).unwrap()
            );
            Ok(())
        }
        Command::DetectPrivate {
            source,
            gossip,
            channels,
            heuristics,
        } => {
            let fixtures = open_fixtures(&source)?;
            let seeds = resolve_seeds(&source, &gossip, &channels)?;
            let public: HashSet<OutPoint> = seeds.iter().map(|s| s.funding).collect();
            let graph = TxGraph::build(fixtures.transactions().cloned(), &heuristics.property());
            let params = TraceParams {
                property: heuristics.property(),
                max_depth: heuristics.trace_depth,
            };
            for candidate in tracing_heuristic(&graph, &public, &params) {
                println!("{}", serde_json::to_string(&candidate).unwrap());
            }
            Ok(())
        }
        Command::GossipStats {
            gossip,
            min_updates,
        } => {
            let ingest = open_gossip(&gossip)?;
            let (stats, correlations) = gossip_only_stats(&ingest.events, min_updates);
            let summary = serde_json::json!({
                "events": ingest.events.len(),
                "malformed_lines": ingest.malformed_lines,
                "stats": stats,
                "correlations": correlations,
            });
            println!("{}", serde_json::to_string_pretty(&summary).unwrap());
            Ok(())
        }
        Command::Report {
            source,
            gossip,
            channels,
            out_dir,
            format,
            workers,
            min_updates,
            heuristics,
        } => {
            let format: OutputFormat = format.parse().map_err(CliError::Config)?;
            let mut config = PipelineConfig::new(source.to_config()?, gossip);
            config.cache_path = source.cache.clone();
            config.channels_file = channels;
            config.property = heuristics.property();
            config.trace_depth = heuristics.trace_depth;
            config.min_updates = min_updates;
            config.workers = workers;

            let output = run_pipeline(&config)?;
            if output.diagnostics.channels_total > 0
                && output.diagnostics.channels_failed == output.diagnostics.channels_total
            {
                return Err(CliError::SourceFailure(
                    "every channel in the batch failed".into(),
                ));
            }
            let bundle = build_report(&output);
            let paths =
                emit(&bundle, format, &out_dir).map_err(|e| CliError::Config(e.to_string()))?;
            for path in paths {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn open_plain_source(args: &SourceArgs) -> Result<Box<dyn ChainSource>, CliError> {
    Ok(match args.to_config()? {
        SourceConfig::FixtureDir(dir) => Box::new(
            FixtureSource::from_dir(&dir).map_err(|e| CliError::SourceFailure(e.to_string()))?,
        ),
        SourceConfig::FixtureFile(file) => Box::new(
            FixtureSource::from_file(&file).map_err(|e| CliError::SourceFailure(e.to_string()))?,
        ),
        SourceConfig::Rest(rest) => {
            let source =
                RestSource::new(rest).map_err(|e| CliError::SourceFailure(e.to_string()))?;
            match &args.cache {
                Some(path) => Box::new(CachedSource::new(
                    source,
                    TxCache::open(path).map_err(|e| CliError::Config(e.to_string()))?,
                )),
                None => Box::new(source),
            }
        }
    })
}

fn open_fixtures(args: &SourceArgs) -> Result<FixtureSource, CliError> {
    match args.to_config()? {
        SourceConfig::FixtureDir(dir) => {
            FixtureSource::from_dir(&dir).map_err(|e| CliError::SourceFailure(e.to_string()))
        }
        SourceConfig::FixtureFile(file) => {
            FixtureSource::from_file(&file).map_err(|e| CliError::SourceFailure(e.to_string()))
        }
        SourceConfig::Rest(_) => Err(CliError::Config(
            "private-channel detection needs a local fixture set".into(),
        )),
    }
}

/// The announced channel set: from the channel list if given, otherwise by
/// resolving announcement scids against the fixture set.
fn resolve_seeds(
    source: &SourceArgs,
    gossip: &std::path::Path,
    channels: &Option<PathBuf>,
) -> Result<Vec<ChannelSeed>, CliError> {
    if let Some(path) = channels {
        let entries = read_channels_file(path).map_err(|e| CliError::Config(e.to_string()))?;
        return Ok(entries
            .into_iter()
            .map(|e| ChannelSeed {
                funding: e.funding,
                visibility: Visibility::Public,
                scid: Some(e.scid),
            })
            .collect());
    }
    let fixtures = open_fixtures(source).map_err(|_| {
        CliError::Config(
            "a REST source needs --channels; scids cannot be resolved without a block index".into(),
        )
    })?;
    let ingest = open_gossip(gossip)?;
    let mut scids: Vec<_> = ingest
        .events
        .iter()
        .filter_map(|e| match e {
            lnlife_core::gossip::GossipEvent::ChannelAnnouncement { scid, .. } => Some(*scid),
            _ => None,
        })
        .collect();
    scids.sort();
    scids.dedup();
    Ok(scids
        .into_iter()
        .filter_map(|scid| {
            fixtures.resolve_scid(&scid).map(|funding| ChannelSeed {
                funding,
                visibility: Visibility::Public,
                scid: Some(scid),
            })
        })
        .collect())
}
