use crate::harmonic::lcm_of;
use crate::params::VideoParams;
use crate::ratio::Ratio;
use crate::schedule::{BroadcastSchedule, Scheme, Transmission};

/// Plain harmonic broadcasting: segment `i` loops on channel `i` at rate `1/i`,
/// one `1/i`-sized part per slot.
pub fn build_hb(params: &VideoParams) -> BroadcastSchedule {
    let n = params.num_segments() as u64;
    let hyper = lcm_of(1..=n);
    let mut tx = Vec::with_capacity((n * hyper) as usize);
    for i in 1..=n {
        let part = Ratio::unit(i as i128);
        let base = Ratio::from(i - 1);
        for slot in 0..hyper {
            let p = slot % i;
            tx.push(Transmission {
                channel: i as u32,
                start: Ratio::from(slot),
                duration: Ratio::ONE,
                offset: base + part * Ratio::from(p),
                length: part,
                rate: part,
            });
        }
    }
    super::finish(params, Scheme::Hb, hyper, tx)
}
