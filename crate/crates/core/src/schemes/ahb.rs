use crate::harmonic::lcm_of;
use crate::params::VideoParams;
use crate::ratio::Ratio;
use crate::schedule::{BroadcastSchedule, Scheme, Transmission};

/// Fragment `i` of segment `k` is problematic in slot `k*t + (i - 1)` for
/// `t >= 1` and `1 <= i <= k - 1`.
pub fn ahb_problematic(k: u32, slot: u64) -> Option<u32> {
    if k <= 1 {
        return None;
    }
    let k = k as u64;
    let t = slot / k;
    let i = slot % k + 1;
    (t >= 1 && i < k).then_some(i as u32)
}

/// Adaptive harmonic broadcasting.
///
/// Channel `k` cycles the `k` fragments of segment `k`, fragment
/// `(s mod k) + 1` in slot `s`. Normal slots send the fragment over the whole
/// slot at rate `1/k`; problematic slots send it at rate 1 during the first
/// `1/k` of the slot and leave the channel idle afterwards.
///
/// The returned hyperperiod is the steady state: slot `s` of the schedule
/// stands for absolute slot `s + H` (`H` = hyperperiod), so every `t >= 1`
/// occurrence of the problematic rule is present and the warm-up slots
/// before `t = 1` are not.
pub fn build_ahb(params: &VideoParams) -> BroadcastSchedule {
    let n = params.num_segments() as u64;
    let hyper = lcm_of(1..=n);
    let mut tx = Vec::new();
    for k in 1..=n {
        let frag = Ratio::unit(k as i128);
        let base = Ratio::from(k - 1);
        for slot in 0..hyper {
            let f = slot % k;
            let offset = base + frag * Ratio::from(f);
            let start = Ratio::from(slot);
            let burst = ahb_problematic(k as u32, slot + hyper);
            debug_assert!(burst.is_none_or(|i| i as u64 == f + 1));
            let (duration, rate) = if burst.is_some() {
                (frag, Ratio::ONE)
            } else {
                (Ratio::ONE, frag)
            };
            tx.push(Transmission {
                channel: k as u32,
                start,
                duration,
                offset,
                length: frag,
                rate,
            });
        }
    }
    super::finish(params, Scheme::Ahb, hyper, tx)
}
