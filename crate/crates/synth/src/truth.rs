//! Ground-truth records emitted alongside generated chain and gossip data,
//! and the newline-delimited files that carry them.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use lnlife_core::chain::OutPoint;
use lnlife_core::gossip::ShortChannelId;
use lnlife_core::lifecycle::{ClosingType, ResurrectionLink, Visibility};
use lnlife_source::fixture::FileHeader;
use lnlife_source::SourceError;
use serde::{Deserialize, Serialize};

pub const TRUTH_FORMAT: &str = "lnlife-truth";
pub const CHANNELS_FORMAT: &str = "lnlife-channels";

/// Ground truth for one generated channel, keyed by its funding outpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub funding: OutPoint,
    pub visibility: Visibility,
    pub capacity_sat: u64,
    pub open_height: u64,
    pub open_time: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closing: Option<TruthClosing>,
    /// Effective (parameter-changing) channel_update counts per direction.
    pub updates_side0: u32,
    pub updates_side1: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthClosing {
    pub closing_type: ClosingType,
    pub close_height: u64,
    pub close_time: u64,
    /// Countable output values in output order; the missing side is 0.
    pub out1_sat: u64,
    pub out2_sat: u64,
    pub htlc_values_sat: Vec<u64>,
    pub anchor_count: u32,
    pub anchor_sat: u64,
    pub fee_sat: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to_self_delay: Option<u16>,
    pub revoked: bool,
    pub resurrection: Vec<ResurrectionLink>,
    pub lifetime_days: f64,
}

impl TruthRecord {
    /// out1 + out2 + HTLCs + anchors + fee must equal capacity.
    pub fn conserves_value(&self) -> bool {
        match &self.closing {
            Some(c) => {
                c.out1_sat
                    + c.out2_sat
                    + c.htlc_values_sat.iter().sum::<u64>()
                    + c.anchor_sat
                    + c.fee_sat
                    == self.capacity_sat
            }
            None => true,
        }
    }
}

/// One announced channel: its short channel id and funding outpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicChannelEntry {
    pub scid: ShortChannelId,
    pub funding: OutPoint,
}

pub fn write_truth_file(path: &Path, records: &[TruthRecord]) -> Result<(), SourceError> {
    write_jsonl(path, TRUTH_FORMAT, records)
}

pub fn read_truth_file(path: &Path) -> Result<Vec<TruthRecord>, SourceError> {
    read_jsonl(path, TRUTH_FORMAT)
}

pub fn write_channels_file(path: &Path, entries: &[PublicChannelEntry]) -> Result<(), SourceError> {
    write_jsonl(path, CHANNELS_FORMAT, entries)
}

pub fn read_channels_file(path: &Path) -> Result<Vec<PublicChannelEntry>, SourceError> {
    read_jsonl(path, CHANNELS_FORMAT)
}

fn write_jsonl<T: Serialize>(path: &Path, format: &str, records: &[T]) -> Result<(), SourceError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &FileHeader::new(format))
        .map_err(|e| SourceError::Malformed(e.to_string()))?;
    writeln!(w)?;
    for record in records {
        serde_json::to_writer(&mut w, record).map_err(|e| SourceError::Malformed(e.to_string()))?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(
    path: &Path,
    format: &str,
) -> Result<Vec<T>, SourceError> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| SourceError::Malformed(format!("{}: empty file", path.display())))??;
    let header: FileHeader = serde_json::from_str(&header_line)
        .map_err(|e| SourceError::Malformed(format!("{}: header: {e}", path.display())))?;
    header.expect(format)?;
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(
            serde_json::from_str(&line)
                .map_err(|e| SourceError::Malformed(format!("{}: {e}", path.display())))?,
        );
    }
    Ok(records)
}
