//! Bandwidth profiles and the comparison reports built on top of schedules
//! and client sweeps.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::client_sim::{PlaybackPolicy, Receiver, SimError, SweepSummary};
use crate::harmonic::harmonic;
use crate::params::VideoParams;
use crate::ratio::Ratio;
use crate::schedule::{BroadcastSchedule, Scheme};
use crate::schemes::{build_hb, build_schedule, SchemeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RatePiece {
    pub start: Ratio,
    pub end: Ratio,
    pub rate: Ratio,
}

/// Piecewise-constant server rate over one hyperperiod.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BandwidthProfile {
    pub hyperperiod: Ratio,
    pub pieces: Vec<RatePiece>,
    pub peak_rate: Ratio,
    pub time_average_rate: Ratio,
    pub bytes_per_hyperperiod: Ratio,
}

impl BandwidthProfile {
    pub fn is_constant(&self) -> bool {
        self.pieces.len() == 1
    }

    pub fn min_rate(&self) -> Ratio {
        self.pieces
            .iter()
            .map(|p| p.rate)
            .min()
            .unwrap_or(Ratio::ZERO)
    }

    pub fn rate_at(&self, t: Ratio) -> Ratio {
        self.pieces
            .iter()
            .find(|p| p.start <= t && t < p.end)
            .map_or(Ratio::ZERO, |p| p.rate)
    }
}

fn profile_of<'a, I>(period: Ratio, tx: I) -> BandwidthProfile
where
    I: Iterator<Item = &'a crate::schedule::Transmission>,
{
    let mut deltas: BTreeMap<Ratio, Ratio> = BTreeMap::new();
    deltas.insert(Ratio::ZERO, Ratio::ZERO);
    deltas.insert(period, Ratio::ZERO);
    for t in tx {
        *deltas.entry(t.start).or_insert(Ratio::ZERO) += t.rate;
        *deltas.entry(t.end()).or_insert(Ratio::ZERO) -= t.rate;
    }
    let mut pieces: Vec<RatePiece> = Vec::new();
    let mut rate = Ratio::ZERO;
    let mut prev: Option<Ratio> = None;
    for (t, d) in deltas {
        if t > period {
            break;
        }
        if let Some(p) = prev {
            if t > p {
                match pieces.last_mut() {
                    Some(last) if last.rate == rate => last.end = t,
                    _ => pieces.push(RatePiece {
                        start: p,
                        end: t,
                        rate,
                    }),
                }
            }
        }
        rate += d;
        prev = Some(t);
    }
    let bytes: Ratio = pieces.iter().map(|p| p.rate * (p.end - p.start)).sum();
    BandwidthProfile {
        hyperperiod: period,
        peak_rate: pieces.iter().map(|p| p.rate).max().unwrap_or(Ratio::ZERO),
        time_average_rate: bytes / period,
        bytes_per_hyperperiod: bytes,
        pieces,
    }
}

/// Total server rate over time, summed across channels.
pub fn bandwidth_profile(schedule: &BroadcastSchedule) -> BandwidthProfile {
    profile_of(schedule.period(), schedule.transmissions.iter())
}

pub fn channel_profile(schedule: &BroadcastSchedule, channel: u32) -> BandwidthProfile {
    profile_of(schedule.period(), schedule.on_channel(channel))
}

/// Channels that sit idle for part of the hyperperiod.
pub fn idle_channels(schedule: &BroadcastSchedule) -> Vec<u32> {
    schedule
        .channels()
        .into_iter()
        .filter(|&c| channel_profile(schedule, c).min_rate().is_zero())
        .collect()
}

/// Extra aggregate rate of CHB over HB, in display rate units.
pub fn chb_surplus(params: &VideoParams) -> Result<Ratio, SchemeError> {
    let chb = build_schedule(Scheme::Chb, params)?;
    let hb = build_hb(params);
    let diff = bandwidth_profile(&chb).time_average_rate - bandwidth_profile(&hb).time_average_rate;
    Ok(params.display_rate(diff))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fig6AggregateRow {
    pub n: u32,
    pub scheme: Scheme,
    pub average_rate: Ratio,
    pub peak_rate: Ratio,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fig6ProfileRow {
    pub scheme: Scheme,
    pub start: Ratio,
    pub end: Ratio,
    pub rate: Ratio,
}

/// Average and peak aggregate rate per scheme for each `N` (canonical rate
/// units). CHB is skipped where it is undefined.
pub fn figure6_aggregate(
    segments: &[u32],
    subslots: u32,
) -> Result<Vec<Fig6AggregateRow>, SchemeError> {
    let mut rows = Vec::new();
    for &n in segments {
        let params = VideoParams::canonical(n, subslots)?;
        for scheme in Scheme::ALL {
            let s = match build_schedule(scheme, &params) {
                Ok(s) => s,
                Err(SchemeError::Unsupported { .. }) => continue,
                Err(e) => return Err(e),
            };
            let p = bandwidth_profile(&s);
            rows.push(Fig6AggregateRow {
                n,
                scheme,
                average_rate: p.time_average_rate,
                peak_rate: p.peak_rate,
            });
        }
    }
    Ok(rows)
}

/// Aggregate rate over one hyperperiod for every scheme at fixed `N`.
pub fn figure6_profiles(params: &VideoParams) -> Result<Vec<Fig6ProfileRow>, SchemeError> {
    let mut rows = Vec::new();
    for scheme in Scheme::ALL {
        let s = match build_schedule(scheme, params) {
            Ok(s) => s,
            Err(SchemeError::Unsupported { .. }) => continue,
            Err(e) => return Err(e),
        };
        for p in bandwidth_profile(&s).pieces {
            rows.push(Fig6ProfileRow {
                scheme,
                start: p.start,
                end: p.end,
                rate: p.rate,
            });
        }
    }
    Ok(rows)
}

/// Reference waiting times for the 120-minute example, by segment count.
pub const REPORTED_FIG7_MINUTES: [(u32, i64); 5] = [(1, 120), (2, 60), (3, 40), (4, 30), (5, 20)];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fig7Row {
    pub n: u32,
    /// One-slot display delay `T/N` that removes every HB stall.
    pub hb_wait: Ratio,
    pub chb_wait: Option<Ratio>,
    pub qhb_wait: Option<Ratio>,
    pub ahb_wait: Option<Ratio>,
    pub aqhb_wait: Option<Ratio>,
    /// Largest measured HB stall under slot-boundary playback.
    pub hb_measured_stall: Ratio,
    /// Largest measured delay beyond the next slot boundary HB needs.
    pub hb_measured_delay: Ratio,
    pub note: String,
}

/// Mid-playback waiting time per scheme, in the display time unit of
/// `duration`. HB's column is the `T/N` repair delay; the other columns are
/// measured worst-case stalls under each scheme's default policy.
pub fn figure7_rows(
    duration: Ratio,
    segments: &[u32],
    subslots: u32,
    parallel: bool,
) -> Result<Vec<Fig7Row>, MetricsError> {
    let mut rows = Vec::new();
    for &n in segments {
        let params = VideoParams::new(duration, Ratio::ONE, n, subslots)?;
        let measured = |scheme: Scheme| -> Result<Option<Ratio>, MetricsError> {
            match build_schedule(scheme, &params) {
                Ok(s) => {
                    let summary =
                        Receiver::new(&s).sweep(PlaybackPolicy::default_for(scheme), parallel)?;
                    Ok(Some(params.display_time(summary.max_total_stall)))
                }
                Err(SchemeError::Unsupported { .. }) => Ok(None),
                Err(e) => Err(e.into()),
            }
        };
        let hb = build_hb(&params);
        let rx = Receiver::new(&hb);
        let hb_sweep = rx.sweep(PlaybackPolicy::NextSlotBoundary, parallel)?;
        let hb_wait = params.slot_length();
        let mut note = String::new();
        if duration == Ratio::from(120i64) {
            if let Some(&(_, printed)) = REPORTED_FIG7_MINUTES.iter().find(|(k, _)| *k == n) {
                let printed = Ratio::from(printed);
                if printed != hb_wait {
                    note = format!("reported value {printed} differs from T/N = {hb_wait}");
                }
            }
        }
        rows.push(Fig7Row {
            n,
            hb_wait,
            chb_wait: measured(Scheme::Chb)?,
            qhb_wait: measured(Scheme::Qhb)?,
            ahb_wait: measured(Scheme::Ahb)?,
            aqhb_wait: measured(Scheme::Aqhb)?,
            hb_measured_stall: params.display_time(hb_sweep.max_total_stall),
            hb_measured_delay: params.display_time(hb_sweep.max_extra_delay.max(Ratio::ZERO)),
            note,
        });
    }
    Ok(rows)
}

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error(transparent)]
    Params(#[from] crate::params::ParamsError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Criterion {
    SlotBandwidth,
    InitialWait,
    Storage,
    /// Storage with every scheme on the same stall-free playback policy.
    StorageCommonPolicy,
    DiscontinuityWait,
    SyncProvided,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::SlotBandwidth => "slot bandwidth",
            Criterion::InitialWait => "initial wait",
            Criterion::Storage => "storage",
            Criterion::StorageCommonPolicy => "storage, common policy",
            Criterion::DiscontinuityWait => "discontinuity wait",
            Criterion::SyncProvided => "sync provided",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    Equal,
    LessInAqhb,
    GreaterInAqhb,
    /// Equal average, lower worst case in AQHB.
    EqualAvgLessWorst,
    /// Average and worst case disagree in direction.
    Mixed,
    NoWaitBoth,
    /// Only AQHB has zero mid-playback wait.
    AqhbOnly,
    /// AQHB has a nonzero mid-playback wait.
    AqhbWaits,
    BothProvide,
    /// AQHB keeps download and playback in step, the other scheme does not.
    HbLacks,
    AqhbLacks,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Equal => "Equal",
            Relation::LessInAqhb => "LessInAQHB",
            Relation::GreaterInAqhb => "GreaterInAQHB",
            Relation::EqualAvgLessWorst => "EqualAvgLessWorst",
            Relation::Mixed => "Mixed",
            Relation::NoWaitBoth => "NoWaitBoth",
            Relation::AqhbOnly => "AQHBOnly",
            Relation::AqhbWaits => "AQHBWaits",
            Relation::BothProvide => "BothProvide",
            Relation::HbLacks => "HBLacks",
            Relation::AqhbLacks => "AQHBLacks",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Measured {
    /// Average and worst case.
    Pair {
        average: Ratio,
        worst: Ratio,
    },
    Value {
        value: Ratio,
    },
    Flag {
        value: bool,
    },
}

impl fmt::Display for Measured {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measured::Pair { average, worst } => write!(f, "avg {average} / worst {worst}"),
            Measured::Value { value } => write!(f, "{value}"),
            Measured::Flag { value } => write!(f, "{value}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonRow {
    pub criterion: Criterion,
    pub other: Scheme,
    pub relation: Relation,
    pub expected: Relation,
    pub aqhb: Measured,
    pub measured_other: Measured,
}

impl ComparisonRow {
    pub fn matches(&self) -> bool {
        self.relation == self.expected
    }
}

/// The reference comparison of AQHB against each other scheme.
pub fn expected_relation(criterion: Criterion, other: Scheme) -> Relation {
    use Criterion::*;
    match (criterion, other) {
        (SlotBandwidth | Storage | StorageCommonPolicy, Scheme::Hb) => Relation::Equal,
        (SlotBandwidth | Storage | StorageCommonPolicy, Scheme::Ahb) => Relation::EqualAvgLessWorst,
        (SlotBandwidth | Storage | StorageCommonPolicy, _) => Relation::LessInAqhb,
        (InitialWait, _) => Relation::Equal,
        (DiscontinuityWait, Scheme::Hb) => Relation::AqhbOnly,
        (DiscontinuityWait, _) => Relation::NoWaitBoth,
        (SyncProvided, Scheme::Hb) => Relation::HbLacks,
        (SyncProvided, _) => Relation::BothProvide,
    }
}

fn compare_pair(aqhb: (Ratio, Ratio), other: (Ratio, Ratio)) -> Relation {
    use std::cmp::Ordering::*;
    match (aqhb.0.cmp(&other.0), aqhb.1.cmp(&other.1)) {
        (Equal, Equal) => Relation::Equal,
        (Equal, Less) => Relation::EqualAvgLessWorst,
        (Less, Less | Equal) => Relation::LessInAqhb,
        (Greater, Greater | Equal) | (Equal, Greater) => Relation::GreaterInAqhb,
        _ => Relation::Mixed,
    }
}

fn compare_value(aqhb: Ratio, other: Ratio) -> Relation {
    use std::cmp::Ordering::*;
    match aqhb.cmp(&other) {
        Equal => Relation::Equal,
        Less => Relation::LessInAqhb,
        Greater => Relation::GreaterInAqhb,
    }
}

fn compare_stall(aqhb: Ratio, other: Ratio) -> Relation {
    match (aqhb.is_zero(), other.is_zero()) {
        (true, true) => Relation::NoWaitBoth,
        (true, false) => Relation::AqhbOnly,
        (false, _) => Relation::AqhbWaits,
    }
}

fn compare_sync(aqhb: bool, other: bool) -> Relation {
    match (aqhb, other) {
        (true, true) => Relation::BothProvide,
        (true, false) => Relation::HbLacks,
        (false, _) => Relation::AqhbLacks,
    }
}

/// Playback policy shared by all schemes for the common-policy storage row:
/// the only fixed policy under which every scheme, HB included, is stall-free.
pub const COMMON_POLICY: PlaybackPolicy = PlaybackPolicy::JoinPlusOneSlot;

/// What every comparison row is computed from, per scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemeMeasurements {
    pub scheme: Scheme,
    pub profile_average: Ratio,
    pub profile_peak: Ratio,
    pub sweep: SweepSummary,
    /// Sweep under [`COMMON_POLICY`].
    pub common_sweep: SweepSummary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table1 {
    pub rows: Vec<ComparisonRow>,
    pub measurements: Vec<SchemeMeasurements>,
}

impl Table1 {
    pub fn discrepancies(&self) -> Vec<&ComparisonRow> {
        self.rows.iter().filter(|r| !r.matches()).collect()
    }

    pub fn row(&self, criterion: Criterion, other: Scheme) -> Option<&ComparisonRow> {
        self.rows
            .iter()
            .find(|r| r.criterion == criterion && r.other == other)
    }
}

/// Measures all five schemes under their default playback policies and
/// derives every comparison from the numbers. Storage is the per-arrival
/// peak buffer (average and worst over arrivals); initial wait is the worst
/// startup wait. A second storage row repeats the buffer comparison with
/// every scheme on [`COMMON_POLICY`], so that differences in startup delay
/// between the default policies do not masquerade as storage differences.
pub fn table1_relations(params: &VideoParams, parallel: bool) -> Result<Table1, MetricsError> {
    let mut measurements = Vec::new();
    for scheme in Scheme::ALL {
        let s = build_schedule(scheme, params)?;
        let p = bandwidth_profile(&s);
        let rx = Receiver::new(&s);
        let sweep = rx.sweep(PlaybackPolicy::default_for(scheme), parallel)?;
        let common_sweep = rx.sweep(COMMON_POLICY, parallel)?;
        measurements.push(SchemeMeasurements {
            scheme,
            profile_average: p.time_average_rate,
            profile_peak: p.peak_rate,
            sweep,
            common_sweep,
        });
    }
    let aqhb = measurements
        .iter()
        .find(|m| m.scheme == Scheme::Aqhb)
        .expect("AQHB measured")
        .clone();
    let mut rows = Vec::new();
    for other in [Scheme::Hb, Scheme::Chb, Scheme::Qhb, Scheme::Ahb] {
        let o = measurements
            .iter()
            .find(|m| m.scheme == other)
            .expect("measured");
        let bw = |m: &SchemeMeasurements| (m.profile_average, m.profile_peak);
        let storage =
            |m: &SchemeMeasurements| (m.sweep.mean_max_buffer, m.sweep.max_buffer_over_arrivals);
        let common_storage = |m: &SchemeMeasurements| {
            (
                m.common_sweep.mean_max_buffer,
                m.common_sweep.max_buffer_over_arrivals,
            )
        };
        let pair = |(average, worst): (Ratio, Ratio)| Measured::Pair { average, worst };
        let value = |value: Ratio| Measured::Value { value };
        let synced = |m: &SchemeMeasurements| m.sweep.max_total_stall.is_zero();

        let mut push = |criterion, relation, aqhb_m, other_m| {
            rows.push(ComparisonRow {
                criterion,
                other,
                relation,
                expected: expected_relation(criterion, other),
                aqhb: aqhb_m,
                measured_other: other_m,
            })
        };
        push(
            Criterion::SlotBandwidth,
            compare_pair(bw(&aqhb), bw(o)),
            pair(bw(&aqhb)),
            pair(bw(o)),
        );
        push(
            Criterion::InitialWait,
            compare_value(aqhb.sweep.max_startup_wait, o.sweep.max_startup_wait),
            value(aqhb.sweep.max_startup_wait),
            value(o.sweep.max_startup_wait),
        );
        push(
            Criterion::Storage,
            compare_pair(storage(&aqhb), storage(o)),
            pair(storage(&aqhb)),
            pair(storage(o)),
        );
        push(
            Criterion::StorageCommonPolicy,
            compare_pair(common_storage(&aqhb), common_storage(o)),
            pair(common_storage(&aqhb)),
            pair(common_storage(o)),
        );
        push(
            Criterion::DiscontinuityWait,
            compare_stall(aqhb.sweep.max_total_stall, o.sweep.max_total_stall),
            value(aqhb.sweep.max_total_stall),
            value(o.sweep.max_total_stall),
        );
        push(
            Criterion::SyncProvided,
            compare_sync(synced(&aqhb), synced(o)),
            Measured::Flag {
                value: synced(&aqhb),
            },
            Measured::Flag { value: synced(o) },
        );
    }
    rows.sort_by_key(|r| r.criterion);
    Ok(Table1 { rows, measurements })
}

/// `H(N)` in display rate units: the HB aggregate.
pub fn hb_aggregate(params: &VideoParams) -> Ratio {
    params.display_rate(harmonic(params.num_segments()).expect("N >= 1"))
}
