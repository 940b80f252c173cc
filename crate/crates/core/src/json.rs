//! Schedule JSON exchange format.
//!
//! Top-level keys are `scheme`, `N`, `m`, `hyperperiod_slots` and
//! `transmissions`, in that order, with every rational written as
//! `{"num": .., "den": ..}` in lowest terms.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{ParamsError, VideoParams};
use crate::ratio::Ratio;
use crate::schedule::{BroadcastSchedule, Scheme, Transmission};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed schedule JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid parameters in schedule JSON: {0}")]
    Params(#[from] ParamsError),
}

#[derive(Serialize, Deserialize)]
struct TransmissionRepr {
    channel: u32,
    start: Ratio,
    duration: Ratio,
    offset: Ratio,
    length: Ratio,
    rate: Ratio,
}

#[derive(Serialize, Deserialize)]
struct ScheduleRepr {
    scheme: Scheme,
    #[serde(rename = "N")]
    num_segments: u32,
    m: u32,
    hyperperiod_slots: u64,
    transmissions: Vec<TransmissionRepr>,
}

pub fn schedule_to_json(s: &BroadcastSchedule) -> String {
    let repr = ScheduleRepr {
        scheme: s.scheme,
        num_segments: s.params.num_segments(),
        m: s.params.subslots(),
        hyperperiod_slots: s.hyperperiod_slots,
        transmissions: s
            .transmissions
            .iter()
            .map(|t| TransmissionRepr {
                channel: t.channel,
                start: t.start,
                duration: t.duration,
                offset: t.offset,
                length: t.length,
                rate: t.rate,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&repr).expect("schedule serializes");
    text.push('\n');
    text
}

/// Parses a schedule, attaching canonical display parameters (`T = N`, `b = 1`).
pub fn schedule_from_json(text: &str) -> Result<BroadcastSchedule, JsonError> {
    let repr: ScheduleRepr = serde_json::from_str(text)?;
    let params = VideoParams::canonical(repr.num_segments, repr.m)?;
    Ok(BroadcastSchedule {
        params,
        scheme: repr.scheme,
        hyperperiod_slots: repr.hyperperiod_slots,
        transmissions: repr
            .transmissions
            .into_iter()
            .map(|t| Transmission {
                channel: t.channel,
                start: t.start,
                duration: t.duration,
                offset: t.offset,
                length: t.length,
                rate: t.rate,
            })
            .collect(),
    })
}
