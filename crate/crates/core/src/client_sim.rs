//! Byte-exact client simulation.
//!
//! A client tunes in to every channel at its arrival time and keeps each
//! channel until it holds all of that channel's bytes. Reception is fluid:
//! inside a transmission, position `offset + u` is complete at
//! `start + u / rate`, and a transmission already in progress at arrival
//! yields only its tail. Playback consumes one data unit per time unit and
//! pauses in place whenever the next byte has not arrived.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::params::VideoParams;
use crate::ratio::Ratio;
use crate::schedule::{BroadcastSchedule, Scheme, Transmission};
use crate::schemes::{build_qhb_with_layout, QhbLayout, SchemeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("arrival {arrival} is not a multiple of the sub-slot length 1/{subslots}")]
    OffGrid { arrival: Ratio, subslots: u32 },
    #[error("arrival {0} is negative")]
    NegativeArrival(Ratio),
    #[error("fixed playback delay {0} is negative")]
    NegativeDelay(Ratio),
    #[error("video bytes [{0}, {1}) are never broadcast")]
    Uncovered(Ratio, Ratio),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PlaybackPolicy {
    /// Start at the first slot boundary at or after arrival.
    NextSlotBoundary,
    /// Start one slot after the first slot boundary at or after arrival.
    JoinPlusOneSlot,
    /// Start as early as possible without any later stall.
    EarliestFeasible,
    /// Start a fixed delay after arrival.
    FixedDelay(Ratio),
}

impl PlaybackPolicy {
    pub fn default_for(scheme: Scheme) -> PlaybackPolicy {
        match scheme {
            Scheme::Aqhb => PlaybackPolicy::JoinPlusOneSlot,
            _ => PlaybackPolicy::NextSlotBoundary,
        }
    }
}

impl fmt::Display for PlaybackPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaybackPolicy::NextSlotBoundary => f.write_str("next-slot"),
            PlaybackPolicy::JoinPlusOneSlot => f.write_str("join-plus-slot"),
            PlaybackPolicy::EarliestFeasible => f.write_str("earliest"),
            PlaybackPolicy::FixedDelay(d) => write!(f, "fixed:{d}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown policy {0:?} (expected next-slot, join-plus-slot, earliest or fixed:<num/den>)")]
pub struct UnknownPolicy(pub String);

impl FromStr for PlaybackPolicy {
    type Err = UnknownPolicy;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "next-slot" => Ok(PlaybackPolicy::NextSlotBoundary),
            "join-plus-slot" => Ok(PlaybackPolicy::JoinPlusOneSlot),
            "earliest" => Ok(PlaybackPolicy::EarliestFeasible),
            _ => {
                let d = s
                    .strip_prefix("fixed:")
                    .and_then(|d| d.parse::<Ratio>().ok())
                    .filter(|d| !d.is_negative())
                    .ok_or_else(|| UnknownPolicy(s.to_string()))?;
                Ok(PlaybackPolicy::FixedDelay(d))
            }
        }
    }
}

/// Positions `[start, end)` become available linearly: position `x` at
/// `ready_at + (x - start) * pace`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AvailPiece {
    pub start: Ratio,
    pub end: Ratio,
    pub ready_at: Ratio,
    pub pace: Ratio,
}

impl AvailPiece {
    pub fn ready(&self, x: Ratio) -> Ratio {
        self.ready_at + (x - self.start) * self.pace
    }

    /// Limit of `ready` at the (open) right end.
    pub fn ready_end(&self) -> Ratio {
        self.ready(self.end)
    }

    fn len(&self) -> Ratio {
        self.end - self.start
    }
}

/// Earliest time every video position is held by a client arriving at `arrival`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AvailabilityCurve {
    pub arrival: Ratio,
    pub pieces: Vec<AvailPiece>,
    pub redundant_bytes: Ratio,
}

impl AvailabilityCurve {
    pub fn available_at(&self, x: Ratio) -> Option<Ratio> {
        let idx = self.pieces.partition_point(|p| p.end <= x);
        self.pieces
            .get(idx)
            .filter(|p| p.start <= x)
            .map(|p| p.ready(x))
    }

    /// `(position, time)` at the left edge of every linear piece.
    pub fn breakpoints(&self) -> Vec<(Ratio, Ratio)> {
        self.pieces.iter().map(|p| (p.start, p.ready_at)).collect()
    }

    pub fn download_complete(&self) -> Ratio {
        self.pieces
            .iter()
            .map(AvailPiece::ready_end)
            .max()
            .unwrap_or(self.arrival)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StallEvent {
    /// Video position where playback fell behind.
    pub position: Ratio,
    pub duration: Ratio,
    pub began_at: Ratio,
    pub resumed_at: Ratio,
    /// Position reached when playback is back on its undelayed pace.
    pub resume_position: Ratio,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClientTrace {
    pub arrival: Ratio,
    pub playback_start: Ratio,
    pub stall_events: Vec<StallEvent>,
    pub total_stall: Ratio,
    pub completion_time: Ratio,
    pub download_complete: Ratio,
    pub max_buffer: Ratio,
    pub redundant_bytes: Ratio,
    pub useful_bytes: Ratio,
    /// `(time, occupancy)` breakpoints; occupancy is linear in between.
    pub buffer_curve: Vec<(Ratio, Ratio)>,
}

impl ClientTrace {
    pub fn startup_wait(&self) -> Ratio {
        self.playback_start - self.arrival
    }

    /// Playback position reached at time `t`. Time lost to a stall event is
    /// spread evenly over it, since playback may trail the download front
    /// rather than stop outright.
    pub fn position_at(&self, t: Ratio) -> Ratio {
        if t <= self.playback_start {
            return Ratio::ZERO;
        }
        let paused: Ratio = self
            .stall_events
            .iter()
            .filter(|e| e.began_at < t && e.resumed_at > e.began_at)
            .map(|e| {
                e.duration * ((e.resumed_at.min(t) - e.began_at) / (e.resumed_at - e.began_at))
            })
            .sum();
        (t - self.playback_start - paused).min(self.useful_bytes)
    }

    pub fn buffer_at(&self, t: Ratio) -> Ratio {
        let curve = &self.buffer_curve;
        let idx = curve.partition_point(|(time, _)| *time <= t);
        if idx == 0 {
            return Ratio::ZERO;
        }
        let (t0, b0) = curve[idx - 1];
        match curve.get(idx) {
            Some(&(t1, b1)) if t1 > t0 => b0 + (b1 - b0) * ((t - t0) / (t1 - t0)),
            _ => b0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub scheme: Scheme,
    pub policy: PlaybackPolicy,
    pub arrivals_checked: u64,
    pub stalled_arrivals: u64,
    pub max_total_stall: Ratio,
    pub max_startup_wait: Ratio,
    pub max_buffer_over_arrivals: Ratio,
    pub mean_max_buffer: Ratio,
    pub worst_arrival: Ratio,
    /// Stall positions of the worst arrival.
    pub worst_stalls: Vec<StallEvent>,
    /// Largest `earliest_feasible_start - next slot boundary` over arrivals.
    pub max_extra_delay: Ratio,
    pub min_extra_delay: Ratio,
    pub max_redundant_bytes: Ratio,
}

struct ChannelTx {
    tx: Vec<Transmission>,
    bytes: Vec<(Ratio, Ratio)>,
}

/// A schedule indexed for repeated client simulation.
pub struct Receiver<'a> {
    schedule: &'a BroadcastSchedule,
    period: Ratio,
    size: Ratio,
    channels: Vec<ChannelTx>,
}

impl<'a> Receiver<'a> {
    pub fn new(schedule: &'a BroadcastSchedule) -> Receiver<'a> {
        let mut by_channel: BTreeMap<u32, Vec<Transmission>> = BTreeMap::new();
        for t in &schedule.transmissions {
            by_channel.entry(t.channel).or_default().push(*t);
        }
        let channels = by_channel
            .into_values()
            .map(|mut tx| {
                tx.sort_by_key(|t| t.start);
                let mut ranges: Vec<(Ratio, Ratio)> =
                    tx.iter().map(|t| (t.offset, t.byte_end())).collect();
                ranges.sort();
                let mut bytes: Vec<(Ratio, Ratio)> = Vec::new();
                for (lo, hi) in ranges {
                    match bytes.last_mut() {
                        Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                        _ => bytes.push((lo, hi)),
                    }
                }
                ChannelTx { tx, bytes }
            })
            .collect();
        Receiver {
            schedule,
            period: schedule.period(),
            size: schedule.video_size(),
            channels,
        }
    }

    pub fn schedule(&self) -> &BroadcastSchedule {
        self.schedule
    }

    fn subslots(&self) -> u32 {
        self.schedule.params.subslots()
    }

    fn check_arrival(&self, arrival: Ratio) -> Result<(), SimError> {
        if arrival.is_negative() {
            return Err(SimError::NegativeArrival(arrival));
        }
        if !(arrival * Ratio::from(self.subslots())).is_integer() {
            return Err(SimError::OffGrid {
                arrival,
                subslots: self.subslots(),
            });
        }
        Ok(())
    }

    pub fn availability(&self, arrival: Ratio) -> Result<AvailabilityCurve, SimError> {
        self.check_arrival(arrival)?;
        let mut pieces = Vec::new();
        let mut redundant = Ratio::ZERO;
        for ch in &self.channels {
            redundant += self.scan_channel(ch, arrival, &mut pieces);
        }
        pieces.sort_by(|a, b| a.start.cmp(&b.start).then(a.ready_at.cmp(&b.ready_at)));
        let overlapping = pieces.windows(2).any(|w| w[1].start < w[0].end);
        let pieces = if overlapping {
            lower_envelope(&pieces)
        } else {
            pieces
        };

        let mut reach = Ratio::ZERO;
        for p in &pieces {
            if p.start > reach {
                return Err(SimError::Uncovered(reach, p.start));
            }
            reach = reach.max(p.end);
        }
        if reach < self.size {
            return Err(SimError::Uncovered(reach, self.size));
        }
        Ok(AvailabilityCurve {
            arrival,
            pieces: coalesce(pieces),
            redundant_bytes: redundant,
        })
    }

    // Appends first-reception pieces of one channel; returns redundant bytes.
    fn scan_channel(&self, ch: &ChannelTx, arrival: Ratio, out: &mut Vec<AvailPiece>) -> Ratio {
        let mut remaining = ch.bytes.clone();
        let mut redundant = Ratio::ZERO;
        let len = ch.tx.len();
        if len == 0 {
            return redundant;
        }
        let cycle0 = (arrival / self.period).floor();
        let phase = arrival - self.period * Ratio::integer(cycle0);
        let first = ch.tx.partition_point(|t| t.end() <= phase);
        // every channel byte recurs within one period; two periods bound the scan
        for k in 0..(2 * len + 1) {
            let pos = first + k;
            let shift = self.period * Ratio::integer(cycle0 + (pos / len) as i128);
            let t = &ch.tx[pos % len];
            let start = t.start + shift;
            let (x0, t0) = if start < arrival {
                (t.offset + (arrival - start) * t.rate, arrival)
            } else {
                (t.offset, start)
            };
            let x1 = t.byte_end();
            if x0 >= x1 {
                continue;
            }
            let pace = t.duration / t.length;
            let mut fresh = Ratio::ZERO;
            for (lo, hi) in take_range(&mut remaining, x0, x1) {
                fresh += hi - lo;
                out.push(AvailPiece {
                    start: lo,
                    end: hi,
                    ready_at: t0 + (lo - x0) * pace,
                    pace,
                });
            }
            redundant += (x1 - x0) - fresh;
            if remaining.is_empty() {
                break;
            }
        }
        redundant
    }

    pub fn earliest_feasible_start(&self, arrival: Ratio) -> Result<Ratio, SimError> {
        let curve = self.availability(arrival)?;
        Ok(earliest_from_curve(&curve))
    }

    pub fn playback_start(
        &self,
        curve: &AvailabilityCurve,
        policy: PlaybackPolicy,
    ) -> Result<Ratio, SimError> {
        let a = curve.arrival;
        Ok(match policy {
            PlaybackPolicy::NextSlotBoundary => Ratio::integer(a.ceil()),
            PlaybackPolicy::JoinPlusOneSlot => Ratio::integer(a.ceil() + 1),
            PlaybackPolicy::EarliestFeasible => earliest_from_curve(curve),
            PlaybackPolicy::FixedDelay(d) => {
                if d.is_negative() {
                    return Err(SimError::NegativeDelay(d));
                }
                a + d
            }
        })
    }

    pub fn simulate(
        &self,
        arrival: Ratio,
        policy: PlaybackPolicy,
    ) -> Result<ClientTrace, SimError> {
        let curve = self.availability(arrival)?;
        let start = self.playback_start(&curve, policy)?;
        Ok(play(&curve, start, self.size))
    }

    /// All sub-slot boundaries in `[0, hyperperiod)`.
    pub fn arrival_grid(&self) -> Vec<Ratio> {
        let m = self.subslots() as u64;
        let step = Ratio::unit(m as i128);
        (0..self.schedule.hyperperiod_slots * m)
            .map(|c| step * Ratio::from(c))
            .collect()
    }

    pub fn sweep(&self, policy: PlaybackPolicy, parallel: bool) -> Result<SweepSummary, SimError> {
        let grid = self.arrival_grid();
        let run = |a: &Ratio| -> Result<ArrivalOutcome, SimError> {
            let curve = self.availability(*a)?;
            let start = self.playback_start(&curve, policy)?;
            let trace = play(&curve, start, self.size);
            let boundary = Ratio::integer(a.ceil());
            Ok(ArrivalOutcome {
                extra_delay: earliest_from_curve(&curve) - boundary,
                trace,
            })
        };
        let outcomes: Vec<ArrivalOutcome> = if parallel {
            grid.par_iter().map(run).collect::<Result<_, _>>()?
        } else {
            grid.iter().map(run).collect::<Result<_, _>>()?
        };
        Ok(aggregate(self.schedule.scheme, policy, outcomes))
    }
}

struct ArrivalOutcome {
    trace: ClientTrace,
    extra_delay: Ratio,
}

fn aggregate(
    scheme: Scheme,
    policy: PlaybackPolicy,
    outcomes: Vec<ArrivalOutcome>,
) -> SweepSummary {
    let n = outcomes.len() as u64;
    let mut s = SweepSummary {
        scheme,
        policy,
        arrivals_checked: n,
        stalled_arrivals: 0,
        max_total_stall: Ratio::ZERO,
        max_startup_wait: Ratio::ZERO,
        max_buffer_over_arrivals: Ratio::ZERO,
        mean_max_buffer: Ratio::ZERO,
        worst_arrival: outcomes.first().map_or(Ratio::ZERO, |o| o.trace.arrival),
        worst_stalls: Vec::new(),
        max_extra_delay: outcomes.first().map_or(Ratio::ZERO, |o| o.extra_delay),
        min_extra_delay: outcomes.first().map_or(Ratio::ZERO, |o| o.extra_delay),
        max_redundant_bytes: Ratio::ZERO,
    };
    let mut buffer_sum = Ratio::ZERO;
    // arrival order; strict comparisons keep the lowest arrival on ties
    for o in outcomes {
        let t = o.trace;
        if t.total_stall.is_positive() {
            s.stalled_arrivals += 1;
        }
        if t.total_stall > s.max_total_stall {
            s.max_total_stall = t.total_stall;
            s.worst_arrival = t.arrival;
            s.worst_stalls = t.stall_events.clone();
        }
        s.max_startup_wait = s.max_startup_wait.max(t.startup_wait());
        s.max_buffer_over_arrivals = s.max_buffer_over_arrivals.max(t.max_buffer);
        s.max_redundant_bytes = s.max_redundant_bytes.max(t.redundant_bytes);
        s.max_extra_delay = s.max_extra_delay.max(o.extra_delay);
        s.min_extra_delay = s.min_extra_delay.min(o.extra_delay);
        buffer_sum += t.max_buffer;
    }
    if n > 0 {
        s.mean_max_buffer = buffer_sum / Ratio::from(n);
    }
    s
}

fn earliest_from_curve(curve: &AvailabilityCurve) -> Ratio {
    curve
        .pieces
        .iter()
        .flat_map(|p| [p.ready_at - p.start, p.ready_end() - p.end])
        .fold(curve.arrival, Ratio::max)
}

/// Plays the video from `start` against `curve`.
fn play(curve: &AvailabilityCurve, start: Ratio, size: Ratio) -> ClientTrace {
    // playback reaches position x at delay + x; delay only grows
    let mut delay = start;
    let mut stalls: Vec<StallEvent> = Vec::new();
    // (begin, end, rate) of consumption
    let mut consume: Vec<(Ratio, Ratio, Ratio)> = Vec::new();
    let push_stall = |stalls: &mut Vec<StallEvent>, ev: StallEvent| {
        if let Some(last) = stalls.last_mut() {
            if last.resumed_at == ev.began_at && last.resume_position == ev.position {
                last.duration += ev.duration;
                last.resumed_at = ev.resumed_at;
                last.resume_position = ev.resume_position;
                return;
            }
        }
        stalls.push(ev);
    };

    for p in &curve.pieces {
        let lag0 = p.ready_at - p.start;
        if lag0 > delay {
            push_stall(
                &mut stalls,
                StallEvent {
                    position: p.start,
                    duration: lag0 - delay,
                    began_at: delay + p.start,
                    resumed_at: lag0 + p.start,
                    resume_position: p.start,
                },
            );
            delay = lag0;
        }
        let slope = p.pace - Ratio::ONE;
        let lag1 = p.ready_end() - p.end;
        if slope.is_positive() && lag1 > delay {
            // playback catches the download front at `cross` and then follows it
            let cross = p.start + (delay - lag0) / slope;
            if cross > p.start {
                consume.push((delay + p.start, delay + cross, Ratio::ONE));
            }
            consume.push((
                delay + cross,
                lag1 + p.end,
                p.pace.recip().expect("positive pace"),
            ));
            push_stall(
                &mut stalls,
                StallEvent {
                    position: cross,
                    duration: lag1 - delay,
                    began_at: delay + cross,
                    resumed_at: lag1 + p.end,
                    resume_position: p.end,
                },
            );
            delay = lag1;
        } else {
            consume.push((delay + p.start, delay + p.end, Ratio::ONE));
        }
    }

    let receive: Vec<(Ratio, Ratio, Ratio)> = curve
        .pieces
        .iter()
        .map(|p| {
            (
                p.ready_at,
                p.ready_end(),
                p.pace.recip().expect("positive pace"),
            )
        })
        .collect();
    let buffer_curve = occupancy(&receive, &consume);
    let max_buffer = buffer_curve
        .iter()
        .map(|(_, b)| *b)
        .fold(Ratio::ZERO, Ratio::max);
    let total_stall = delay - start;

    ClientTrace {
        arrival: curve.arrival,
        playback_start: start,
        stall_events: stalls,
        total_stall,
        completion_time: start + size + total_stall,
        download_complete: curve.download_complete(),
        max_buffer,
        redundant_bytes: curve.redundant_bytes,
        useful_bytes: curve.pieces.iter().map(AvailPiece::len).sum(),
        buffer_curve,
    }
}

// Integrates received minus consumed over time; returns the breakpoints.
fn occupancy(
    receive: &[(Ratio, Ratio, Ratio)],
    consume: &[(Ratio, Ratio, Ratio)],
) -> Vec<(Ratio, Ratio)> {
    let mut deltas: Vec<(Ratio, Ratio)> = Vec::with_capacity(2 * (receive.len() + consume.len()));
    for &(b, e, rate) in receive {
        if e > b {
            deltas.push((b, rate));
            deltas.push((e, -rate));
        }
    }
    for &(b, e, rate) in consume {
        if e > b {
            deltas.push((b, -rate));
            deltas.push((e, rate));
        }
    }
    deltas.sort_by_key(|d| d.0);
    let mut out: Vec<(Ratio, Ratio)> = Vec::with_capacity(deltas.len());
    let mut level = Ratio::ZERO;
    let mut rate = Ratio::ZERO;
    let mut prev: Option<Ratio> = None;
    for (t, d) in deltas {
        if prev != Some(t) {
            if let Some(p) = prev {
                level += rate * (t - p);
            }
            debug_assert!(!level.is_negative(), "buffer underflow at {t}");
            out.push((t, level));
            prev = Some(t);
        }
        rate += d;
    }
    out
}

// Removes [lo, hi) from a sorted disjoint range list; returns what was removed.
fn take_range(remaining: &mut Vec<(Ratio, Ratio)>, lo: Ratio, hi: Ratio) -> Vec<(Ratio, Ratio)> {
    let mut taken = Vec::new();
    let mut kept = Vec::with_capacity(remaining.len() + 1);
    for &(a, b) in remaining.iter() {
        if b <= lo || a >= hi {
            kept.push((a, b));
            continue;
        }
        let (ia, ib) = (a.max(lo), b.min(hi));
        taken.push((ia, ib));
        if a < ia {
            kept.push((a, ia));
        }
        if ib < b {
            kept.push((ib, b));
        }
    }
    *remaining = kept;
    taken
}

// Joins neighbouring pieces that continue the same line.
fn coalesce(pieces: Vec<AvailPiece>) -> Vec<AvailPiece> {
    let mut out: Vec<AvailPiece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let Some(last) = out.last_mut() {
            if last.end == p.start && last.pace == p.pace && last.ready_end() == p.ready_at {
                last.end = p.end;
                continue;
            }
        }
        out.push(p);
    }
    out
}

// Pointwise minimum of possibly overlapping linear pieces.
fn lower_envelope(pieces: &[AvailPiece]) -> Vec<AvailPiece> {
    let mut cuts: Vec<Ratio> = pieces.iter().flat_map(|p| [p.start, p.end]).collect();
    cuts.sort();
    cuts.dedup();
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let active: Vec<&AvailPiece> = pieces
            .iter()
            .filter(|p| p.start <= a && p.end >= b)
            .collect();
        if active.is_empty() {
            continue;
        }
        let mut x = a;
        while x < b {
            // lowest at x, ties broken by the flatter line
            let best = active
                .iter()
                .min_by(|p, q| p.ready(x).cmp(&q.ready(x)).then(p.pace.cmp(&q.pace)))
                .unwrap();
            let mut next = b;
            for q in &active {
                if q.pace < best.pace {
                    let meet = x + (q.ready(x) - best.ready(x)) / (best.pace - q.pace);
                    if meet > x && meet < next {
                        next = meet;
                    }
                }
            }
            out.push(AvailPiece {
                start: x,
                end: next,
                ready_at: best.ready(x),
                pace: best.pace,
            });
            x = next;
        }
    }
    out
}

pub fn availability_curve(
    schedule: &BroadcastSchedule,
    arrival: Ratio,
) -> Result<AvailabilityCurve, SimError> {
    Receiver::new(schedule).availability(arrival)
}

pub fn earliest_feasible_start(
    schedule: &BroadcastSchedule,
    arrival: Ratio,
) -> Result<Ratio, SimError> {
    Receiver::new(schedule).earliest_feasible_start(arrival)
}

pub fn simulate_client(
    schedule: &BroadcastSchedule,
    arrival: Ratio,
    policy: PlaybackPolicy,
) -> Result<ClientTrace, SimError> {
    Receiver::new(schedule).simulate(arrival, policy)
}

pub fn sweep_arrivals(
    schedule: &BroadcastSchedule,
    policy: PlaybackPolicy,
) -> Result<SweepSummary, SimError> {
    Receiver::new(schedule).sweep(policy, true)
}

/// Rounds a continuous arrival time up to the next sub-slot boundary.
pub fn quantize_arrival(arrival: Ratio, subslots: u32) -> Ratio {
    let m = Ratio::from(subslots);
    Ratio::integer((arrival * m).ceil()) / m
}

#[derive(Debug, Clone, Serialize)]
pub struct LayoutOutcome {
    pub layout: QhbLayout,
    pub label: String,
    pub max_total_stall: Ratio,
    pub stalled_arrivals: u64,
    pub arrivals_checked: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QhbResolution {
    pub outcomes: Vec<LayoutOutcome>,
    /// First stall-free candidate, if any.
    pub adopted: Option<QhbLayout>,
}

impl QhbResolution {
    pub fn documented_stalls(&self) -> bool {
        self.outcomes
            .iter()
            .find(|o| o.layout == QhbLayout::DOCUMENTED)
            .is_some_and(|o| o.max_total_stall.is_positive())
    }

    /// True when none of the four index-base readings of the documented
    /// placement is stall-free.
    pub fn bases_alone_fail(&self) -> bool {
        self.outcomes
            .iter()
            .filter(|o| o.layout.last_subslot == QhbLayout::DOCUMENTED.last_subslot)
            .all(|o| o.max_total_stall.is_positive())
    }
}

/// Sweeps every candidate QHB layout over the `(N, m)` grid with slot-boundary
/// playback and reports which ones never stall.
pub fn resolve_qhb_layout(
    segments: &[u32],
    subslots: &[u32],
    parallel: bool,
) -> Result<QhbResolution, SchemeError> {
    let mut outcomes = Vec::new();
    for layout in QhbLayout::candidates() {
        let mut o = LayoutOutcome {
            layout,
            label: layout.label(),
            max_total_stall: Ratio::ZERO,
            stalled_arrivals: 0,
            arrivals_checked: 0,
        };
        for &n in segments {
            for &m in subslots {
                let params = VideoParams::canonical(n, m)?;
                let s = build_qhb_with_layout(&params, layout)?;
                let summary = Receiver::new(&s)
                    .sweep(PlaybackPolicy::NextSlotBoundary, parallel)
                    .expect("builder output is complete");
                o.max_total_stall = o.max_total_stall.max(summary.max_total_stall);
                o.stalled_arrivals += summary.stalled_arrivals;
                o.arrivals_checked += summary.arrivals_checked;
            }
        }
        outcomes.push(o);
    }
    let adopted = outcomes
        .iter()
        .find(|o| o.max_total_stall.is_zero())
        .map(|o| o.layout);
    Ok(QhbResolution { outcomes, adopted })
}
