//! Schedule builders for the harmonic broadcasting family.
//!
//! All builders work in canonical units (slot = 1, playback rate = 1), start
//! every channel's cycle at time 0, and return exactly one hyperperiod.

mod ahb;
mod aqhb;
mod chb;
mod hb;
mod qhb;

use thiserror::Error;

use crate::params::{ParamsError, VideoParams};
use crate::ratio::Ratio;
use crate::schedule::{BroadcastSchedule, Scheme, Transmission};

pub use ahb::{ahb_problematic, build_ahb};
pub use aqhb::{aqhb_matrix, build_aqhb, AqhbMatrix};
pub use chb::build_chb;
pub use hb::build_hb;
pub use qhb::{
    build_qhb, build_qhb_with_layout, qhb_fragment_index, qhb_layout_fragment, IndexBase,
    LastSubslotCycle, QhbLayout,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("{scheme} needs {requirement}")]
    Unsupported {
        scheme: Scheme,
        requirement: &'static str,
    },
    #[error("index out of range: {0}")]
    Domain(String),
}

/// Builds `scheme` for `params`. QHB uses [`QhbLayout::ADOPTED`].
pub fn build_schedule(
    scheme: Scheme,
    params: &VideoParams,
) -> Result<BroadcastSchedule, SchemeError> {
    build_schedule_with(scheme, params, QhbLayout::ADOPTED)
}

pub fn build_schedule_with(
    scheme: Scheme,
    params: &VideoParams,
    qhb_layout: QhbLayout,
) -> Result<BroadcastSchedule, SchemeError> {
    match scheme {
        Scheme::Hb => Ok(build_hb(params)),
        Scheme::Chb => build_chb(params),
        Scheme::Qhb => build_qhb_with_layout(params, qhb_layout),
        Scheme::Ahb => Ok(build_ahb(params)),
        Scheme::Aqhb => Ok(build_aqhb(params)),
    }
}

/// A piece of one segment, identified by 1-based segment and fragment index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragmentRef {
    pub segment_index: u32,
    pub fragment_index: u32,
    pub offset: Ratio,
    pub length: Ratio,
}

/// Number of equal fragments `scheme` cuts segment `segment` into.
pub fn fragment_count(scheme: Scheme, segment: u32, subslots: u32) -> u32 {
    match scheme {
        Scheme::Hb | Scheme::Ahb => segment,
        Scheme::Chb => {
            if segment <= 3 {
                1
            } else {
                segment - 1
            }
        }
        Scheme::Qhb => {
            if segment == 1 {
                1
            } else {
                segment * subslots - 1
            }
        }
        Scheme::Aqhb => segment * subslots,
    }
}

/// Equal partition of segment `segment` (1-based) into `count` fragments.
pub fn segment_fragments(segment: u32, count: u32) -> Vec<FragmentRef> {
    let length = Ratio::unit(count as i128);
    let base = Ratio::from(segment - 1);
    (1..=count)
        .map(|f| FragmentRef {
            segment_index: segment,
            fragment_index: f,
            offset: base + length * Ratio::from(f - 1),
            length,
        })
        .collect()
}

/// Locates the fragment a transmission starts in, given the scheme's
/// fragmentation. Works for partial (tail) ranges as well.
pub fn fragment_of(scheme: Scheme, subslots: u32, t: &Transmission) -> FragmentRef {
    let segment = (t.offset.floor() + 1) as u32;
    let count = fragment_count(scheme, segment, subslots);
    let within = t.offset - Ratio::from(segment - 1);
    let index = (within * Ratio::from(count)).floor() as u32 + 1;
    let length = Ratio::unit(count as i128);
    FragmentRef {
        segment_index: segment,
        fragment_index: index,
        offset: Ratio::from(segment - 1) + length * Ratio::from(index - 1),
        length,
    }
}

pub(crate) fn finish(
    params: &VideoParams,
    scheme: Scheme,
    hyperperiod_slots: u64,
    tx: Vec<Transmission>,
) -> BroadcastSchedule {
    let mut s = BroadcastSchedule {
        params: *params,
        scheme,
        hyperperiod_slots,
        transmissions: tx,
    };
    s.sort();
    s
}
