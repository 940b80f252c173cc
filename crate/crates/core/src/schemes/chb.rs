use crate::harmonic::lcm_of;
use crate::params::VideoParams;
use crate::ratio::Ratio;
use crate::schedule::{BroadcastSchedule, Scheme, Transmission};

use super::SchemeError;

/// Cautious harmonic broadcasting.
///
/// Channel 1 loops segment 1 at the playback rate; channel 2 alternates
/// segment 2 (even slots) and segment 3 (odd slots) at the playback rate;
/// channel `c >= 3` loops segment `c + 1` at rate `1/c`.
pub fn build_chb(params: &VideoParams) -> Result<BroadcastSchedule, SchemeError> {
    let n = params.num_segments() as u64;
    if n < 3 {
        return Err(SchemeError::Unsupported {
            scheme: Scheme::Chb,
            requirement: "N >= 3",
        });
    }
    let hyper = lcm_of(2..n);
    let mut tx = Vec::new();
    for slot in 0..hyper {
        let start = Ratio::from(slot);
        tx.push(Transmission {
            channel: 1,
            start,
            duration: Ratio::ONE,
            offset: Ratio::ZERO,
            length: Ratio::ONE,
            rate: Ratio::ONE,
        });
        let seg_offset = if slot % 2 == 0 { 1 } else { 2 };
        tx.push(Transmission {
            channel: 2,
            start,
            duration: Ratio::ONE,
            offset: Ratio::from(seg_offset as u64),
            length: Ratio::ONE,
            rate: Ratio::ONE,
        });
    }
    for c in 3..n {
        let part = Ratio::unit(c as i128);
        let base = Ratio::from(c);
        for slot in 0..hyper {
            tx.push(Transmission {
                channel: c as u32,
                start: Ratio::from(slot),
                duration: Ratio::ONE,
                offset: base + part * Ratio::from(slot % c),
                length: part,
                rate: part,
            });
        }
    }
    Ok(super::finish(params, Scheme::Chb, hyper, tx))
}
