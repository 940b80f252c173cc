//! Periodic broadcast schedules and their structural checks.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::VideoParams;
use crate::ratio::Ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "HB")]
    Hb,
    #[serde(rename = "CHB")]
    Chb,
    #[serde(rename = "QHB")]
    Qhb,
    #[serde(rename = "AHB")]
    Ahb,
    #[serde(rename = "AQHB")]
    Aqhb,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Hb,
        Scheme::Chb,
        Scheme::Qhb,
        Scheme::Ahb,
        Scheme::Aqhb,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Scheme::Hb => "HB",
            Scheme::Chb => "CHB",
            Scheme::Qhb => "QHB",
            Scheme::Ahb => "AHB",
            Scheme::Aqhb => "AQHB",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown scheme {0:?} (expected hb, chb, qhb, ahb or aqhb)")]
pub struct UnknownScheme(pub String);

impl FromStr for Scheme {
    type Err = UnknownScheme;
    fn from_str(s: &str) -> Result<Scheme, UnknownScheme> {
        match s.to_ascii_lowercase().as_str() {
            "hb" => Ok(Scheme::Hb),
            "chb" => Ok(Scheme::Chb),
            "qhb" => Ok(Scheme::Qhb),
            "ahb" => Ok(Scheme::Ahb),
            "aqhb" => Ok(Scheme::Aqhb),
            _ => Err(UnknownScheme(s.to_string())),
        }
    }
}

/// One constant-rate transmission of a contiguous byte range on a channel.
///
/// Bytes go out in order: position `offset + u` is fully sent at
/// `start + u / rate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transmission {
    pub channel: u32,
    pub start: Ratio,
    pub duration: Ratio,
    pub offset: Ratio,
    pub length: Ratio,
    pub rate: Ratio,
}

impl Transmission {
    /// Builds a transmission whose duration follows from `length / rate`.
    pub fn at_rate(channel: u32, start: Ratio, offset: Ratio, length: Ratio, rate: Ratio) -> Self {
        Transmission {
            channel,
            start,
            duration: length / rate,
            offset,
            length,
            rate,
        }
    }

    pub fn end(&self) -> Ratio {
        self.start + self.duration
    }

    pub fn byte_end(&self) -> Ratio {
        self.offset + self.length
    }
}

/// One hyperperiod of a periodic broadcast, in canonical units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastSchedule {
    pub params: VideoParams,
    pub scheme: Scheme,
    pub hyperperiod_slots: u64,
    pub transmissions: Vec<Transmission>,
}

impl BroadcastSchedule {
    pub fn period(&self) -> Ratio {
        Ratio::from(self.hyperperiod_slots)
    }

    pub fn video_size(&self) -> Ratio {
        self.params.canonical_size()
    }

    pub fn channels(&self) -> Vec<u32> {
        let mut ch: Vec<u32> = self.transmissions.iter().map(|t| t.channel).collect();
        ch.sort_unstable();
        ch.dedup();
        ch
    }

    pub fn channel_count(&self) -> usize {
        self.channels().len()
    }

    pub fn on_channel(&self, channel: u32) -> impl Iterator<Item = &Transmission> {
        self.transmissions
            .iter()
            .filter(move |t| t.channel == channel)
    }

    /// Canonical ordering: by start time, then channel, then offset.
    pub fn sort(&mut self) {
        self.transmissions.sort_by(|a, b| {
            a.start
                .cmp(&b.start)
                .then(a.channel.cmp(&b.channel))
                .then(a.offset.cmp(&b.offset))
        });
    }

    /// Data units sent on each channel per hyperperiod.
    pub fn bytes_per_channel(&self) -> BTreeMap<u32, Ratio> {
        let mut out = BTreeMap::new();
        for t in &self.transmissions {
            *out.entry(t.channel).or_insert(Ratio::ZERO) += t.length;
        }
        out
    }

    pub fn total_bytes(&self) -> Ratio {
        self.transmissions.iter().map(|t| t.length).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    InvalidChannel,
    NonPositiveField,
    RateConservation,
    OutsideVideo,
    StartOutsidePeriod,
    ExtendsPastPeriod,
    Overlap,
    Coverage,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::InvalidChannel => "invalid channel",
            Rule::NonPositiveField => "non-positive field",
            Rule::RateConservation => "rate x duration != length",
            Rule::OutsideVideo => "byte range outside video",
            Rule::StartOutsidePeriod => "start outside hyperperiod",
            Rule::ExtendsPastPeriod => "transmission extends past hyperperiod",
            Rule::Overlap => "overlapping transmissions",
            Rule::Coverage => "bytes never broadcast",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub channel: Option<u32>,
    pub time: Option<Ratio>,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rule)?;
        if let Some(ch) = self.channel {
            write!(f, " on channel {ch}")?;
        }
        if let Some(t) = self.time {
            write!(f, " at t={t}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

/// Checks every structural invariant of a schedule. An empty result means the
/// schedule is well formed.
pub fn schedule_validate(s: &BroadcastSchedule) -> Vec<Violation> {
    let mut out = Vec::new();
    let size = s.video_size();
    let period = s.period();

    if s.hyperperiod_slots == 0 {
        out.push(Violation {
            channel: None,
            time: None,
            rule: Rule::NonPositiveField,
            detail: "hyperperiod_slots is zero".into(),
        });
        return out;
    }

    for t in &s.transmissions {
        let v = |rule, detail: String| Violation {
            channel: Some(t.channel),
            time: Some(t.start),
            rule,
            detail,
        };
        if t.channel == 0 {
            out.push(v(
                Rule::InvalidChannel,
                "channels are numbered from 1".into(),
            ));
        }
        if !t.duration.is_positive() || !t.length.is_positive() || !t.rate.is_positive() {
            out.push(v(
                Rule::NonPositiveField,
                format!(
                    "duration={} length={} rate={}",
                    t.duration, t.length, t.rate
                ),
            ));
            continue;
        }
        if t.rate * t.duration != t.length {
            out.push(v(
                Rule::RateConservation,
                format!("{} x {} != {}", t.rate, t.duration, t.length),
            ));
        }
        if t.offset.is_negative() || t.byte_end() > size {
            out.push(v(
                Rule::OutsideVideo,
                format!("[{}, {}) not within [0, {})", t.offset, t.byte_end(), size),
            ));
        }
        if t.start.is_negative() || t.start >= period {
            out.push(v(Rule::StartOutsidePeriod, format!("period is {period}")));
        } else if t.end() > period {
            out.push(v(Rule::ExtendsPastPeriod, format!("ends at {}", t.end())));
        }
    }

    // overlap per channel, including the wrap from the last transmission into
    // the next period's first one
    let mut by_channel: BTreeMap<u32, Vec<&Transmission>> = BTreeMap::new();
    for t in &s.transmissions {
        if t.duration.is_positive() {
            by_channel.entry(t.channel).or_default().push(t);
        }
    }
    for (ch, mut list) in by_channel {
        list.sort_by_key(|t| t.start);
        for pair in list.windows(2) {
            if pair[1].start < pair[0].end() {
                out.push(Violation {
                    channel: Some(ch),
                    time: Some(pair[1].start),
                    rule: Rule::Overlap,
                    detail: format!(
                        "starts before previous transmission ends at {}",
                        pair[0].end()
                    ),
                });
            }
        }
        if list.len() > 1 {
            let first = list[0];
            let last = list[list.len() - 1];
            if last.end() > first.start + period {
                out.push(Violation {
                    channel: Some(ch),
                    time: Some(last.start),
                    rule: Rule::Overlap,
                    detail: "runs into the next period's first transmission".into(),
                });
            }
        }
    }

    for (lo, hi) in uncovered(s, size) {
        out.push(Violation {
            channel: None,
            time: None,
            rule: Rule::Coverage,
            detail: format!("video bytes [{lo}, {hi}) are never broadcast"),
        });
    }
    out
}

fn uncovered(s: &BroadcastSchedule, size: Ratio) -> Vec<(Ratio, Ratio)> {
    let mut ranges: Vec<(Ratio, Ratio)> = s
        .transmissions
        .iter()
        .filter(|t| t.length.is_positive())
        .map(|t| (t.offset.max(Ratio::ZERO), t.byte_end().min(size)))
        .collect();
    ranges.sort();
    let mut gaps = Vec::new();
    let mut reach = Ratio::ZERO;
    for (lo, hi) in ranges {
        if lo > reach {
            gaps.push((reach, lo));
        }
        reach = reach.max(hi);
    }
    if reach < size {
        gaps.push((reach, size));
    }
    gaps
}
