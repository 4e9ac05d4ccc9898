//! Aggregation of analyzed channels and gossip into the report bundle:
//! weekly opening/closing counts, closing-type shares, imbalance and
//! lifetime histograms, HTLC distributions, resurrection rates, update-rate
//! and fee-correlation statistics, and the active-network time series.

use std::collections::BTreeMap;

use chrono::{DateTime, Datelike};
use lnlife_core::gossip::{
    active_series, dedup_updates, fee_correlation, group_updates, ActiveChannel, FeeCorrelation,
    ShortChannelId,
};
use lnlife_core::lifecycle::{ClosingType, Visibility};
use serde::Serialize;

use crate::pipeline::{record_lifetime_days, Diagnostics, PipelineOutput};
use crate::stats::summary_stats;

pub const IMBALANCE_BIN_WIDTH: f64 = 0.05;
pub const LIFETIME_BIN_DAYS: u64 = 7;
const WEEK_SECONDS: u64 = 7 * 86_400;

fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

/// ISO week key of a unix timestamp, e.g. "2019-W05".
pub fn iso_week_key(timestamp: u64) -> String {
    let datetime = DateTime::from_timestamp(timestamp as i64, 0).expect("timestamp in range");
    let week = datetime.iso_week();
    format!("{}-W{:02}", week.year(), week.week())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeeklyCountRow {
    pub week: String,
    pub public: u64,
    pub private: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosingShareRow {
    pub visibility: &'static str,
    pub week: String,
    pub closing_type: &'static str,
    pub count: u64,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImbalanceBinRow {
    pub visibility: &'static str,
    pub family: &'static str,
    pub bin_start: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifetimeBinRow {
    pub visibility: &'static str,
    pub bin_start_days: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HtlcCountRow {
    pub visibility: &'static str,
    pub htlc_count: usize,
    pub channels: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HtlcValueRow {
    pub visibility: &'static str,
    pub value_sat: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResurrectionRow {
    pub visibility: &'static str,
    pub family: &'static str,
    pub closed: u64,
    pub resurrected: u64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricStatsRow {
    pub metric: &'static str,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub p99: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub scid: String,
    pub correlation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActiveSampleRow {
    pub time: u64,
    pub nodes: usize,
    pub public_channels: usize,
    pub private_channels: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportBundle {
    pub weekly_openings: Vec<WeeklyCountRow>,
    pub weekly_closings: Vec<WeeklyCountRow>,
    pub closing_type_shares: Vec<ClosingShareRow>,
    pub imbalance_histogram: Vec<ImbalanceBinRow>,
    pub lifetime_histogram: Vec<LifetimeBinRow>,
    pub htlc_counts: Vec<HtlcCountRow>,
    pub htlc_values: Vec<HtlcValueRow>,
    pub resurrection_rates: Vec<ResurrectionRow>,
    pub gossip_stats: Vec<MetricStatsRow>,
    pub fee_correlations: Vec<CorrelationRow>,
    pub active_series: Vec<ActiveSampleRow>,
    pub diagnostics: Diagnostics,
}

fn family(closing_type: ClosingType) -> &'static str {
    if closing_type.is_cooperative() {
        "coop"
    } else {
        "unilateral"
    }
}

/// Aggregates pipeline output into the report bundle. Deterministic for a
/// given output: every section is sorted by its natural key.
pub fn build_report(output: &PipelineOutput) -> ReportBundle {
    let mut weekly_openings: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    let mut weekly_closings: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    let mut type_counts: BTreeMap<(&'static str, String, ClosingType), u64> = BTreeMap::new();
    let mut imbalance_bins: BTreeMap<(&'static str, &'static str, u32), u64> = BTreeMap::new();
    let mut lifetime_bins: BTreeMap<(&'static str, u64), u64> = BTreeMap::new();
    let mut htlc_counts: BTreeMap<(&'static str, usize), u64> = BTreeMap::new();
    let mut htlc_values: Vec<(&'static str, u64)> = Vec::new();
    let mut resurrection: BTreeMap<(&'static str, &'static str), (u64, u64)> = BTreeMap::new();

    for channel in &output.channels {
        let record = &channel.record;
        let visibility = record.visibility.label();
        let opened = weekly_openings
            .entry(iso_week_key(record.open.time))
            .or_default();
        match record.visibility {
            Visibility::Public => opened.0 += 1,
            Visibility::Private => opened.1 += 1,
        }

        let Some(close) = record.close else { continue };
        let Some(closing) = &record.closing else {
            continue;
        };

        let closed = weekly_closings.entry(iso_week_key(close.time)).or_default();
        match record.visibility {
            Visibility::Public => closed.0 += 1,
            Visibility::Private => closed.1 += 1,
        }

        *type_counts
            .entry((visibility, iso_week_key(close.time), closing.closing_type))
            .or_default() += 1;

        let bin = ((closing.imbalance / IMBALANCE_BIN_WIDTH) as u32).min(19);
        *imbalance_bins
            .entry((visibility, family(closing.closing_type), bin))
            .or_default() += 1;

        if let Some(days) = record_lifetime_days(record) {
            let bin_start = (days as u64 / LIFETIME_BIN_DAYS) * LIFETIME_BIN_DAYS;
            *lifetime_bins.entry((visibility, bin_start)).or_default() += 1;
        }

        *htlc_counts
            .entry((visibility, closing.htlc_count))
            .or_default() += 1;
        htlc_values.extend(closing.htlc_values.iter().map(|v| (visibility, *v)));

        let slot = resurrection
            .entry((visibility, family(closing.closing_type)))
            .or_default();
        slot.0 += 1;
        if !closing.resurrection.is_empty() {
            slot.1 += 1;
        }
    }

    // per-bucket shares of the closing types
    let mut bucket_totals: BTreeMap<(&'static str, String), u64> = BTreeMap::new();
    for ((visibility, week, _), count) in &type_counts {
        *bucket_totals.entry((visibility, week.clone())).or_default() += count;
    }
    let closing_type_shares = type_counts
        .iter()
        .map(|((visibility, week, closing_type), count)| {
            let total = bucket_totals[&(*visibility, week.clone())];
            ClosingShareRow {
                visibility,
                week: week.clone(),
                closing_type: closing_type.label(),
                count: *count,
                share: round4(*count as f64 / total as f64),
            }
        })
        .collect();

    htlc_values.sort();

    // gossip: per-channel update rates and inter-side fee correlations
    let groups = group_updates(&output.gossip);
    let mut update_rates = Vec::new();
    let mut fee_correlations = Vec::new();
    for channel in &output.channels {
        let Some(scid) = channel.scid else { continue };
        let side0 = groups.get(&(scid, 0)).cloned().unwrap_or_default();
        let side1 = groups.get(&(scid, 1)).cloned().unwrap_or_default();

        if let Some(days) = record_lifetime_days(&channel.record) {
            if days > 0.0 {
                let effective = dedup_updates(&side0).len() + dedup_updates(&side1).len();
                update_rates.push(effective as f64 / days);
            }
        }
        if let Ok(FeeCorrelation::Defined(r)) = fee_correlation(&side0, &side1, output.min_updates)
        {
            fee_correlations.push(CorrelationRow {
                scid: scid.to_string(),
                correlation: round4(r),
            });
        }
    }
    fee_correlations.sort_by(|a, b| a.scid.cmp(&b.scid));

    let mut gossip_stats = Vec::new();
    if let Ok(stats) = summary_stats(&update_rates) {
        gossip_stats.push(MetricStatsRow {
            metric: "daily_update_rate",
            count: update_rates.len(),
            mean: round4(stats.mean),
            median: round4(stats.median),
            p99: round4(stats.p99),
        });
    }
    let correlation_values: Vec<f64> = fee_correlations.iter().map(|row| row.correlation).collect();
    if let Ok(stats) = summary_stats(&correlation_values) {
        gossip_stats.push(MetricStatsRow {
            metric: "fee_correlation",
            count: correlation_values.len(),
            mean: round4(stats.mean),
            median: round4(stats.median),
            p99: round4(stats.p99),
        });
    }

    // weekly active-network samples
    let actives: Vec<ActiveChannel> = output
        .channels
        .iter()
        .map(|channel| ActiveChannel {
            visibility: channel.record.visibility,
            open_time: channel.record.open.time,
            close_time: channel.record.close.map(|c| c.time),
            endpoints: channel
                .scid
                .and_then(|scid| output.endpoints.get(&scid).copied()),
        })
        .collect();
    let mut active_rows = Vec::new();
    if !actives.is_empty() {
        let start = actives.iter().map(|c| c.open_time).min().unwrap();
        let end = actives
            .iter()
            .map(|c| c.close_time.unwrap_or(c.open_time))
            .max()
            .unwrap();
        let samples: Vec<u64> = (start..=end).step_by(WEEK_SECONDS as usize).collect();
        active_rows = active_series(&actives, &samples)
            .into_iter()
            .map(|s| ActiveSampleRow {
                time: s.time,
                nodes: s.node_count,
                public_channels: s.public_channels,
                private_channels: s.private_channels,
            })
            .collect();
    }

    ReportBundle {
        weekly_openings: weekly_openings
            .into_iter()
            .map(|(week, (public, private))| WeeklyCountRow {
                week,
                public,
                private,
            })
            .collect(),
        weekly_closings: weekly_closings
            .into_iter()
            .map(|(week, (public, private))| WeeklyCountRow {
                week,
                public,
                private,
            })
            .collect(),
        closing_type_shares,
        imbalance_histogram: imbalance_bins
            .into_iter()
            .map(|((visibility, family, bin), count)| ImbalanceBinRow {
                visibility,
                family,
                bin_start: round4(bin as f64 * IMBALANCE_BIN_WIDTH),
                count,
            })
            .collect(),
        lifetime_histogram: lifetime_bins
            .into_iter()
            .map(|((visibility, bin_start_days), count)| LifetimeBinRow {
                visibility,
                bin_start_days,
                count,
            })
            .collect(),
        htlc_counts: htlc_counts
            .into_iter()
            .map(|((visibility, htlc_count), channels)| HtlcCountRow {
                visibility,
                htlc_count,
                channels,
            })
            .collect(),
        htlc_values: htlc_values
            .into_iter()
            .map(|(visibility, value_sat)| HtlcValueRow {
                visibility,
                value_sat,
            })
            .collect(),
        resurrection_rates: resurrection
            .into_iter()
            .map(
                |((visibility, family), (closed, resurrected))| ResurrectionRow {
                    visibility,
                    family,
                    closed,
                    resurrected,
                    rate: round4(resurrected as f64 / closed as f64),
                },
            )
            .collect(),
        gossip_stats,
        fee_correlations,
        active_series: active_rows,
        diagnostics: output.diagnostics.clone(),
    }
}

/// Gossip-only statistics (no chain data): per-channel effective update
/// counts, using the gossip time span per channel as the rate basis.
pub fn gossip_only_stats(
    events: &[lnlife_core::gossip::GossipEvent],
    min_updates: usize,
) -> (Vec<MetricStatsRow>, Vec<CorrelationRow>) {
    let groups = group_updates(events);
    let mut scids: Vec<ShortChannelId> = groups.keys().map(|(scid, _)| *scid).collect();
    scids.sort();
    scids.dedup();

    let mut rates = Vec::new();
    let mut correlations = Vec::new();
    for scid in scids {
        let side0 = groups.get(&(scid, 0)).cloned().unwrap_or_default();
        let side1 = groups.get(&(scid, 1)).cloned().unwrap_or_default();
        let all: Vec<_> = side0.iter().chain(&side1).collect();
        if let (Some(first), Some(last)) = (
            all.iter().map(|u| u.timestamp).min(),
            all.iter().map(|u| u.timestamp).max(),
        ) {
            let days = ((last - first) as f64 / 86_400.0).max(1.0);
            let effective = dedup_updates(&side0).len() + dedup_updates(&side1).len();
            rates.push(effective as f64 / days);
        }
        if let Ok(FeeCorrelation::Defined(r)) = fee_correlation(&side0, &side1, min_updates) {
            correlations.push(CorrelationRow {
                scid: scid.to_string(),
                correlation: round4(r),
            });
        }
    }

    let mut stats = Vec::new();
    if let Ok(s) = summary_stats(&rates) {
        stats.push(MetricStatsRow {
            metric: "daily_update_rate",
            count: rates.len(),
            mean: round4(s.mean),
            median: round4(s.median),
            p99: round4(s.p99),
        });
    }
    let values: Vec<f64> = correlations.iter().map(|c| c.correlation).collect();
    if let Ok(s) = summary_stats(&values) {
        stats.push(MetricStatsRow {
            metric: "fee_correlation",
            count: values.len(),
            mean: round4(s.mean),
            median: round4(s.median),
            p99: round4(s.p99),
        });
    }
    (stats, correlations)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iso_week_keys() {
        // 2019-01-01 is a Tuesday in ISO week 1
        assert_eq!(iso_week_key(1_546_300_800), "2019-W01");
        // 2021-01-01 is a Friday that belongs to ISO week 53 of 2020
        assert_eq!(iso_week_key(1_609_459_200), "2020-W53");
    }

    #[test]
    fn rounding_is_stable() {
        assert_eq!(round4(0.791234), 0.7912);
        assert_eq!(round4(1.0), 1.0);
        assert_eq!(round4(0.00005), 0.0001);
    }
}
