//! Report emission: one file per bundle section, CSV or JSON, with fixed
//! numeric precision and stable ordering so repeated runs are byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::report::{
    ActiveSampleRow, ClosingShareRow, CorrelationRow, HtlcCountRow, HtlcValueRow, ImbalanceBinRow,
    LifetimeBinRow, MetricStatsRow, ReportBundle, ResurrectionRow, WeeklyCountRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?}, expected csv or json")),
        }
    }
}

trait CsvSection: Serialize {
    const STEM: &'static str;
    const HEADER: &'static str;
    fn csv_row(&self) -> String;
}

impl CsvSection for WeeklyCountRow {
    const STEM: &'static str = ""; // openings/closings share the type; stem passed explicitly
    const HEADER: &'static str = "week,public,private";
    fn csv_row(&self) -> String {
        format!("{},{},{}", self.week, self.public, self.private)
    }
}

impl CsvSection for ClosingShareRow {
    const STEM: &'static str = "closing_types";
    const HEADER: &'static str = "visibility,week,closing_type,count,share";
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.4}",
            self.visibility, self.week, self.closing_type, self.count, self.share
        )
    }
}

impl CsvSection for ImbalanceBinRow {
    const STEM: &'static str = "imbalance_histogram";
    const HEADER: &'static str = "visibility,family,bin_start,count";
    fn csv_row(&self) -> String {
        format!(
            "{},{},{:.4},{}",
            self.visibility, self.family, self.bin_start, self.count
        )
    }
}

impl CsvSection for LifetimeBinRow {
    const STEM: &'static str = "lifetime_histogram";
    const HEADER: &'static str = "visibility,bin_start_days,count";
    fn csv_row(&self) -> String {
        format!("{},{},{}", self.visibility, self.bin_start_days, self.count)
    }
}

impl CsvSection for HtlcCountRow {
    const STEM: &'static str = "htlc_counts";
    const HEADER: &'static str = "visibility,htlc_count,channels";
    fn csv_row(&self) -> String {
        format!("{},{},{}", self.visibility, self.htlc_count, self.channels)
    }
}

impl CsvSection for HtlcValueRow {
    const STEM: &'static str = "htlc_values";
    const HEADER: &'static str = "visibility,value_sat";
    fn csv_row(&self) -> String {
        format!("{},{}", self.visibility, self.value_sat)
    }
}

impl CsvSection for ResurrectionRow {
    const STEM: &'static str = "resurrection_rates";
    const HEADER: &'static str = "visibility,family,closed,resurrected,rate";
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.4}",
            self.visibility, self.family, self.closed, self.resurrected, self.rate
        )
    }
}

impl CsvSection for MetricStatsRow {
    const STEM: &'static str = "gossip_stats";
    const HEADER: &'static str = "metric,count,mean,median,p99";
    fn csv_row(&self) -> String {
        format!(
            "{},{},{:.4},{:.4},{:.4}",
            self.metric, self.count, self.mean, self.median, self.p99
        )
    }
}

impl CsvSection for CorrelationRow {
    const STEM: &'static str = "fee_correlations";
    const HEADER: &'static str = "scid,correlation";
    fn csv_row(&self) -> String {
        format!("{},{:.4}", self.scid, self.correlation)
    }
}

impl CsvSection for ActiveSampleRow {
    const STEM: &'static str = "active_series";
    const HEADER: &'static str = "time,nodes,public_channels,private_channels";
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.time, self.nodes, self.public_channels, self.private_channels
        )
    }
}

fn write_section<T: CsvSection>(
    rows: &[T],
    stem: &str,
    format: OutputFormat,
    out_dir: &Path,
) -> std::io::Result<PathBuf> {
    let path = match format {
        OutputFormat::Csv => out_dir.join(format!("{stem}.csv")),
        OutputFormat::Json => out_dir.join(format!("{stem}.json")),
    };
    let mut w = BufWriter::new(File::create(&path)?);
    match format {
        OutputFormat::Csv => {
            writeln!(w, "{}", T::HEADER)?;
            for row in rows {
                writeln!(w, "{}", row.csv_row())?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(path)
}

/// Writes one file per bundle section into `out_dir`; returns the paths.
/// Diagnostics always go out as JSON.
pub fn emit(
    bundle: &ReportBundle,
    format: OutputFormat,
    out_dir: &Path,
) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut paths = vec![
        write_section(&bundle.weekly_openings, "openings", format, out_dir)?,
        write_section(&bundle.weekly_closings, "closings", format, out_dir)?,
        write_section(
            &bundle.closing_type_shares,
            ClosingShareRow::STEM,
            format,
            out_dir,
        )?,
        write_section(
            &bundle.imbalance_histogram,
            ImbalanceBinRow::STEM,
            format,
            out_dir,
        )?,
        write_section(
            &bundle.lifetime_histogram,
            LifetimeBinRow::STEM,
            format,
            out_dir,
        )?,
        write_section(&bundle.htlc_counts, HtlcCountRow::STEM, format, out_dir)?,
        write_section(&bundle.htlc_values, HtlcValueRow::STEM, format, out_dir)?,
        write_section(
            &bundle.resurrection_rates,
            ResurrectionRow::STEM,
            format,
            out_dir,
        )?,
        write_section(&bundle.gossip_stats, MetricStatsRow::STEM, format, out_dir)?,
        write_section(
            &bundle.fee_correlations,
            CorrelationRow::STEM,
            format,
            out_dir,
        )?,
        write_section(
            &bundle.active_series,
            ActiveSampleRow::STEM,
            format,
            out_dir,
        )?,
    ];

    let diagnostics_path = out_dir.join("diagnostics.json");
    let mut w = BufWriter::new(File::create(&diagnostics_path)?);
    serde_json::to_writer_pretty(&mut w, &bundle.diagnostics)?;
    writeln!(w)?;
    w.flush()?;
    paths.push(diagnostics_path);
    Ok(paths)
}
