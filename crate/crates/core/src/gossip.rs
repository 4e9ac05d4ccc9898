//! Gossip-side analytics: message ingestion, channel_update deduplication,
//! update-rate statistics, inter-side fee correlation, active-network time
//! series, and the base+proportional route-fee model.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::lifecycle::Visibility;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GossipError {
    #[error("daily update rate undefined for a zero-length lifetime")]
    ZeroLifetime,
    #[error("side {side} has {got} deduplicated updates, {required} required")]
    InsufficientUpdates {
        side: u8,
        got: usize,
        required: usize,
    },
}

/// A short channel id: block height, transaction index within the block,
/// and output index, written `BLOCKxTXIDXxVOUT`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShortChannelId {
    pub block: u64,
    pub tx_index: u32,
    pub vout: u32,
}

impl fmt::Display for ShortChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.block, self.tx_index, self.vout)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid short channel id: expected BLOCKxTXIDXxVOUT")]
pub struct ScidParseError;

impl FromStr for ShortChannelId {
    type Err = ScidParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split('x');
        let block = parts
            .next()
            .ok_or(ScidParseError)?
            .parse()
            .map_err(|_| ScidParseError)?;
        let tx_index = parts
            .next()
            .ok_or(ScidParseError)?
            .parse()
            .map_err(|_| ScidParseError)?;
        let vout = parts
            .next()
            .ok_or(ScidParseError)?
            .parse()
            .map_err(|_| ScidParseError)?;
        if parts.next().is_some() {
            return Err(ScidParseError);
        }
        Ok(ShortChannelId {
            block,
            tx_index,
            vout,
        })
    }
}

impl Serialize for ShortChannelId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ShortChannelId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A 33-byte node public key.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub [u8; 33]);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeId({})", self)
    }
}

impl FromStr for NodeId {
    type Err = ScidParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = hex::decode(s).map_err(|_| ScidParseError)?;
        let key: [u8; 33] = bytes.try_into().map_err(|_| ScidParseError)?;
        Ok(NodeId(key))
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Routing parameters carried by a channel_update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FeeParams {
    pub base_fee_msat: u64,
    pub fee_proportional_millionths: u64,
    pub cltv_delta: u32,
    pub htlc_minimum_msat: u64,
    pub disabled: bool,
}

/// A gossip message of one of the three kinds used in the analysis.
/// Timestamps carry no ordering guarantee; real gossip arrives unordered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GossipEvent {
    ChannelAnnouncement {
        timestamp: u64,
        scid: ShortChannelId,
        node1: NodeId,
        node2: NodeId,
    },
    ChannelUpdate {
        timestamp: u64,
        scid: ShortChannelId,
        direction: u8,
        params: FeeParams,
    },
    NodeAnnouncement {
        timestamp: u64,
        node_id: NodeId,
    },
}

impl GossipEvent {
    pub fn timestamp(&self) -> u64 {
        match self {
            GossipEvent::ChannelAnnouncement { timestamp, .. }
            | GossipEvent::ChannelUpdate { timestamp, .. }
            | GossipEvent::NodeAnnouncement { timestamp, .. } => *timestamp,
        }
    }
}

/// Result of reading a newline-delimited gossip file: parsed events plus a
/// count of malformed lines that were skipped.
#[derive(Debug, Default)]
pub struct GossipIngest {
    pub events: Vec<GossipEvent>,
    pub malformed_lines: usize,
}

/// Reads newline-delimited gossip records. Header lines (objects carrying a
/// `format` field) and blank lines are skipped silently; anything else that
/// fails to parse is counted as malformed. A channel_update direction
/// outside {0,1} is malformed.
pub fn read_gossip(reader: impl BufRead) -> std::io::Result<GossipIngest> {
    let mut ingest = GossipIngest::default();
    for line in reader.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        match serde_json::from_str::<GossipEvent>(trimmed) {
            Ok(GossipEvent::ChannelUpdate { direction, .. }) if direction > 1 => {
                ingest.malformed_lines += 1;
            }
            Ok(event) => ingest.events.push(event),
            Err(_) => {
                let is_header = serde_json::from_str::<serde_json::Value>(trimmed)
                    .ok()
                    .is_some_and(|v| v.get("format").is_some());
                if !is_header {
                    ingest.malformed_lines += 1;
                }
            }
        }
    }
    Ok(ingest)
}

/// One side's fee state at a point in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FeeUpdate {
    pub timestamp: u64,
    pub params: FeeParams,
}

/// Groups channel_update events into per-(scid, direction) streams sorted by
/// timestamp (ties broken by the full record).
pub fn group_updates(events: &[GossipEvent]) -> BTreeMap<(ShortChannelId, u8), Vec<FeeUpdate>> {
    let mut groups: BTreeMap<(ShortChannelId, u8), Vec<FeeUpdate>> = BTreeMap::new();
    for event in events {
        if let GossipEvent::ChannelUpdate {
            timestamp,
            scid,
            direction,
            params,
        } = event
        {
            groups
                .entry((*scid, *direction))
                .or_default()
                .push(FeeUpdate {
                    timestamp: *timestamp,
                    params: *params,
                });
        }
    }
    for updates in groups.values_mut() {
        updates.sort();
    }
    groups
}

/// Keeps the first update and every update whose parameters differ from the
/// previously kept one: rebroadcasts of identical parameters do not count.
pub fn dedup_updates(updates: &[FeeUpdate]) -> Vec<FeeUpdate> {
    let mut effective: Vec<FeeUpdate> = Vec::new();
    for update in updates {
        if effective
            .last()
            .is_none_or(|prev| prev.params != update.params)
        {
            effective.push(*update);
        }
    }
    effective
}

/// Mean daily number of effective updates over the channel lifetime.
pub fn daily_update_rate(updates: &[FeeUpdate], lifetime_days: f64) -> Result<f64, GossipError> {
    if lifetime_days <= 0.0 {
        return Err(GossipError::ZeroLifetime);
    }
    Ok(updates.len() as f64 / lifetime_days)
}

const SECONDS_PER_DAY: u64 = 86_400;

/// Aligns the two sides' proportional-fee series on a shared daily grid,
/// carrying the last observation forward per side, restricted to days where
/// both sides have a defined value.
pub fn align_daily(side0: &[FeeUpdate], side1: &[FeeUpdate]) -> Vec<(f64, f64)> {
    let daily0 = end_of_day_values(side0);
    let daily1 = end_of_day_values(side1);
    let (Some(first0), Some(first1)) = (daily0.first(), daily1.first()) else {
        return Vec::new();
    };
    let start = first0.0.max(first1.0);
    let end = daily0.last().unwrap().0.max(daily1.last().unwrap().0);

    let mut pairs = Vec::with_capacity((end - start + 1) as usize);
    let (mut i0, mut i1) = (0usize, 0usize);
    let (mut v0, mut v1) = (None, None);
    for day in daily0[0].0.min(daily1[0].0)..=end {
        while i0 < daily0.len() && daily0[i0].0 <= day {
            v0 = Some(daily0[i0].1);
            i0 += 1;
        }
        while i1 < daily1.len() && daily1[i1].0 <= day {
            v1 = Some(daily1[i1].1);
            i1 += 1;
        }
        if day >= start {
            if let (Some(v0), Some(v1)) = (v0, v1) {
                pairs.push((v0, v1));
            }
        }
    }
    pairs
}

/// Last proportional-fee value per day, sorted by day.
fn end_of_day_values(updates: &[FeeUpdate]) -> Vec<(u64, f64)> {
    let mut by_day: BTreeMap<u64, f64> = BTreeMap::new();
    let mut sorted: Vec<&FeeUpdate> = updates.iter().collect();
    sorted.sort();
    for update in sorted {
        by_day.insert(
            update.timestamp / SECONDS_PER_DAY,
            update.params.fee_proportional_millionths as f64,
        );
    }
    by_day.into_iter().collect()
}

/// Pearson correlation of paired samples; `None` when either side is
/// constant (the coefficient is undefined).
pub fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mean_x = pairs.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = pairs.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (x, y) in pairs {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return None;
    }
    Some(cov / (var_x.sqrt() * var_y.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeeCorrelation {
    Defined(f64),
    /// At least one aligned series is constant.
    Undefined,
}

/// Correlation between the two sides' proportional-fee series, on the daily
/// carry-forward grid. Both sides must have at least `min_updates` effective
/// updates.
pub fn fee_correlation(
    side0: &[FeeUpdate],
    side1: &[FeeUpdate],
    min_updates: usize,
) -> Result<FeeCorrelation, GossipError> {
    let side0 = dedup_updates(side0);
    let side1 = dedup_updates(side1);
    for (side, updates) in [(0u8, &side0), (1u8, &side1)] {
        if updates.len() < min_updates {
            return Err(GossipError::InsufficientUpdates {
                side,
                got: updates.len(),
                required: min_updates,
            });
        }
    }
    let pairs = align_daily(&side0, &side1);
    Ok(match pearson(&pairs) {
        Some(r) => FeeCorrelation::Defined(r),
        None => FeeCorrelation::Undefined,
    })
}

/// Channel activity input for the active-network time series.
#[derive(Debug, Clone)]
pub struct ActiveChannel {
    pub visibility: Visibility,
    pub open_time: u64,
    pub close_time: Option<u64>,
    /// Both endpoints, known for announced channels.
    pub endpoints: Option<(NodeId, NodeId)>,
}

impl ActiveChannel {
    fn active_at(&self, t: u64) -> bool {
        self.open_time <= t && self.close_time.is_none_or(|close| t < close)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ActiveSample {
    pub time: u64,
    pub node_count: usize,
    pub public_channels: usize,
    pub private_channels: usize,
}

/// Counts open channels by visibility at each sample time, and the distinct
/// endpoints of the active public channels. A channel is active on
/// `open_time <= t < close_time`.
pub fn active_series(channels: &[ActiveChannel], sample_times: &[u64]) -> Vec<ActiveSample> {
    sample_times
        .iter()
        .map(|&t| {
            let mut nodes = std::collections::BTreeSet::new();
            let mut public_channels = 0;
            let mut private_channels = 0;
            for channel in channels.iter().filter(|c| c.active_at(t)) {
                match channel.visibility {
                    Visibility::Public => {
                        public_channels += 1;
                        if let Some((a, b)) = channel.endpoints {
                            nodes.insert(a);
                            nodes.insert(b);
                        }
                    }
                    Visibility::Private => private_channels += 1,
                }
            }
            ActiveSample {
                time: t,
                node_count: nodes.len(),
                public_channels,
                private_channels,
            }
        })
        .collect()
}

/// Routing fee for one hop: `base_fee_msat + floor(amount_msat *
/// fee_proportional_millionths / 1_000_000)`.
pub fn route_fee(amount_msat: u64, params: &FeeParams) -> u64 {
    let proportional =
        (amount_msat as u128 * params.fee_proportional_millionths as u128) / 1_000_000;
    params.base_fee_msat + proportional as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(ppm: u64) -> FeeParams {
        FeeParams {
            base_fee_msat: 1000,
            fee_proportional_millionths: ppm,
            cltv_delta: 40,
            htlc_minimum_msat: 1000,
            disabled: false,
        }
    }

    fn update(day: u64, ppm: u64) -> FeeUpdate {
        FeeUpdate {
            timestamp: day * SECONDS_PER_DAY + 600,
            params: params(ppm),
        }
    }

    #[test]
    fn scid_text_form() {
        let scid = ShortChannelId {
            block: 700_123,
            tx_index: 45,
            vout: 1,
        };
        assert_eq!(scid.to_string(), "700123x45x1");
        assert_eq!("700123x45x1".parse::<ShortChannelId>().unwrap(), scid);
        assert!("700123x45".parse::<ShortChannelId>().is_err());
        assert!("1x2x3x4".parse::<ShortChannelId>().is_err());
    }

    #[test]
    fn dedup_keeps_parameter_changes_only() {
        let p = update(0, 100);
        let q = update(1, 200);
        let p2 = FeeUpdate {
            timestamp: 2 * SECONDS_PER_DAY,
            params: p.params,
        };

        assert_eq!(dedup_updates(&[p, p, p]), vec![p]);
        assert_eq!(dedup_updates(&[p, q, p2]), vec![p, q, p2]);
        assert_eq!(dedup_updates(&[]), vec![]);
    }

    #[test]
    fn dedup_sees_disabled_flag() {
        let mut disabled = params(100);
        disabled.disabled = true;
        let a = FeeUpdate {
            timestamp: 0,
            params: params(100),
        };
        let b = FeeUpdate {
            timestamp: 10,
            params: disabled,
        };
        assert_eq!(dedup_updates(&[a, b]).len(), 2);
    }

    #[test]
    fn daily_rates() {
        assert_eq!(daily_update_rate(&[], 10.0).unwrap(), 0.0);
        let updates: Vec<FeeUpdate> = (0..69).map(|i| update(i, 100 + i)).collect();
        assert!((daily_update_rate(&updates, 100.0).unwrap() - 0.69).abs() < 1e-12);
        let updates: Vec<FeeUpdate> = (0..147).map(|i| update(i, 100 + i)).collect();
        assert!((daily_update_rate(&updates, 10.0).unwrap() - 14.7).abs() < 1e-12);
        assert_eq!(daily_update_rate(&[], 0.0), Err(GossipError::ZeroLifetime));
    }

    #[test]
    fn route_fee_examples() {
        let mut p = params(0);
        p.base_fee_msat = 0;
        assert_eq!(route_fee(123_456, &p), 0);

        // 1% of 1,000,000 plus 1000 base
        assert_eq!(route_fee(1_000_000, &params(10_000)), 11_000);
        // 0.5%
        assert_eq!(route_fee(1_000_000, &params(5_000)), 6_000);
    }

    #[test]
    fn correlation_identical_series_is_one() {
        let side0: Vec<FeeUpdate> = (0..120).map(|d| update(d, 100 + d * 3)).collect();
        let r = fee_correlation(&side0, &side0, 100).unwrap();
        match r {
            FeeCorrelation::Defined(r) => assert!((r - 1.0).abs() < 1e-9),
            FeeCorrelation::Undefined => panic!("expected a defined correlation"),
        }
    }

    #[test]
    fn correlation_mirrored_series_is_minus_one() {
        let side0: Vec<FeeUpdate> = (0..120).map(|d| update(d, 100 + d * 3)).collect();
        let side1: Vec<FeeUpdate> = (0..120)
            .map(|d| update(d, 10_000 - (100 + d * 3)))
            .collect();
        match fee_correlation(&side0, &side1, 100).unwrap() {
            FeeCorrelation::Defined(r) => assert!((r + 1.0).abs() < 1e-9),
            FeeCorrelation::Undefined => panic!("expected a defined correlation"),
        }
    }

    #[test]
    fn correlation_requires_min_updates() {
        let side0: Vec<FeeUpdate> = (0..120).map(|d| update(d, 100 + d)).collect();
        let side1: Vec<FeeUpdate> = (0..50).map(|d| update(d, 100 + d)).collect();
        assert_eq!(
            fee_correlation(&side0, &side1, 100),
            Err(GossipError::InsufficientUpdates {
                side: 1,
                got: 50,
                required: 100
            })
        );
    }

    #[test]
    fn correlation_undefined_for_constant_side() {
        // side1 alternates between two params blocks so dedup keeps them,
        // but its proportional fee is constant
        let side0: Vec<FeeUpdate> = (0..120).map(|d| update(d, 100 + d)).collect();
        let side1: Vec<FeeUpdate> = (0..120)
            .map(|d| {
                let mut p = params(500);
                p.base_fee_msat = 1000 + (d % 2);
                FeeUpdate {
                    timestamp: d * SECONDS_PER_DAY,
                    params: p,
                }
            })
            .collect();
        assert_eq!(
            fee_correlation(&side0, &side1, 100).unwrap(),
            FeeCorrelation::Undefined
        );
    }

    #[test]
    fn correlation_symmetric_and_affine_invariant() {
        let side0: Vec<FeeUpdate> = (0..120).map(|d| update(d, 100 + (d * 37) % 900)).collect();
        let side1: Vec<FeeUpdate> = (0..120).map(|d| update(d, 4000 + (d * 13) % 700)).collect();
        let r = |a: &[FeeUpdate], b: &[FeeUpdate]| match fee_correlation(a, b, 100).unwrap() {
            FeeCorrelation::Defined(r) => r,
            FeeCorrelation::Undefined => panic!("expected a defined correlation"),
        };
        let forward = r(&side0, &side1);
        let backward = r(&side1, &side0);
        assert!((forward - backward).abs() < 1e-12);

        // a positive affine transform of one series leaves r unchanged
        let scaled: Vec<FeeUpdate> = side0
            .iter()
            .map(|u| {
                let mut p = u.params;
                p.fee_proportional_millionths = 3 * p.fee_proportional_millionths + 500;
                FeeUpdate {
                    timestamp: u.timestamp,
                    params: p,
                }
            })
            .collect();
        assert!((r(&scaled, &side1) - forward).abs() < 1e-9);
    }

    #[test]
    fn alignment_carries_last_observation_forward() {
        // side0 updates on days 0 and 4; side1 on days 2 and 3
        let side0 = vec![update(0, 100), update(4, 500)];
        let side1 = vec![update(2, 7), update(3, 9)];
        let pairs = align_daily(&side0, &side1);
        // grid runs from day 2 (both defined) to day 4 (latest last day)
        assert_eq!(pairs, vec![(100.0, 7.0), (100.0, 9.0), (500.0, 9.0)]);
    }

    #[test]
    fn active_series_boundaries() {
        assert_eq!(
            active_series(&[], &[100])[0],
            ActiveSample {
                time: 100,
                node_count: 0,
                public_channels: 0,
                private_channels: 0
            }
        );

        let a = NodeId([0x02; 33]);
        let b = NodeId([0x03; 33]);
        let channels = vec![
            ActiveChannel {
                visibility: Visibility::Public,
                open_time: 1000,
                close_time: Some(2000),
                endpoints: Some((a, b)),
            },
            ActiveChannel {
                visibility: Visibility::Private,
                open_time: 1500,
                close_time: None,
                endpoints: None,
            },
        ];
        let samples = active_series(&channels, &[999, 1000, 1500, 1999, 2000]);
        // right-continuous at the opening
        assert_eq!(samples[0].public_channels, 0);
        assert_eq!(samples[1].public_channels, 1);
        assert_eq!(samples[1].node_count, 2);
        assert_eq!(samples[2].private_channels, 1);
        assert_eq!(samples[3].public_channels, 1);
        // the close boundary itself is excluded
        assert_eq!(samples[4].public_channels, 0);
        assert_eq!(samples[4].node_count, 0);
        assert_eq!(samples[4].private_channels, 1);
    }

    #[test]
    fn reader_skips_headers_and_counts_malformed() {
        let input = "\
{\"format\":\"lnlife-gossip\",\"version\":1}
{\"kind\":\"node_announcement\",\"timestamp\":5,\"node_id\":\"020202020202020202020202020202020202020202020202020202020202020202\"}
{\"kind\":\"channel_update\",\"timestamp\":9,\"scid\":\"1x2x3\",\"direction\":0,\"params\":{\"base_fee_msat\":1,\"fee_proportional_millionths\":2,\"cltv_delta\":3,\"htlc_minimum_msat\":4,\"disabled\":false},\"extra_field\":42}
{\"kind\":\"channel_update\",\"timestamp\":9,\"scid\":\"1x2x3\",\"direction\":7,\"params\":{\"base_fee_msat\":1,\"fee_proportional_millionths\":2,\"cltv_delta\":3,\"htlc_minimum_msat\":4,\"disabled\":false}}
not json at all
";
        let ingest = read_gossip(input.as_bytes()).unwrap();
        assert_eq!(ingest.events.len(), 2);
        assert_eq!(ingest.malformed_lines, 2);
    }

    #[test]
    fn grouping_sorts_by_timestamp() {
        let scid: ShortChannelId = "1x2x3".parse().unwrap();
        let events = vec![
            GossipEvent::ChannelUpdate {
                timestamp: 50,
                scid,
                direction: 0,
                params: params(2),
            },
            GossipEvent::ChannelUpdate {
                timestamp: 10,
                scid,
                direction: 0,
                params: params(1),
            },
            GossipEvent::ChannelUpdate {
                timestamp: 30,
                scid,
                direction: 1,
                params: params(3),
            },
        ];
        let groups = group_updates(&events);
        let side0 = &groups[&(scid, 0)];
        assert_eq!(side0[0].timestamp, 10);
        assert_eq!(side0[1].timestamp, 50);
        assert_eq!(groups[&(scid, 1)].len(), 1);
    }

    proptest! {
        #[test]
        fn dedup_idempotent(ppms in proptest::collection::vec(0u64..5, 0..50)) {
            let updates: Vec<FeeUpdate> =
                ppms.iter().enumerate().map(|(i, p)| update(i as u64, *p)).collect();
            let once = dedup_updates(&updates);
            let twice = dedup_updates(&once);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn dedup_length_is_changes_plus_one(ppms in proptest::collection::vec(0u64..3, 1..60)) {
            let updates: Vec<FeeUpdate> =
                ppms.iter().enumerate().map(|(i, p)| update(i as u64, *p)).collect();
            let changes = ppms.windows(2).filter(|w| w[0] != w[1]).count();
            prop_assert_eq!(dedup_updates(&updates).len(), changes + 1);
        }

        #[test]
        fn scid_round_trip(block in 0u64..1_000_000, tx_index in 0u32..10_000, vout in 0u32..100) {
            let scid = ShortChannelId { block, tx_index, vout };
            prop_assert_eq!(scid.to_string().parse::<ShortChannelId>().unwrap(), scid);
        }
    }
}
