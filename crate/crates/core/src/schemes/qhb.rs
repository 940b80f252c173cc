//! Quasi-harmonic broadcasting.
//!
//! Segment `i >= 2` is cut into `i*m - 1` fragments and channel `i` sends one
//! fragment per sub-slot at rate `m / (i*m - 1)`. The last sub-slot of each
//! slot cycles through fragments `1..i-1`; the other sub-slots follow the
//! placement formula `(i*k + j - 1) mod (i*(m-1)) + i`.
//!
//! The index bases of `j` and `k`, and whether the last-sub-slot cycle
//! restarts with every `i`-slot cycle, are captured by [`QhbLayout`].

use serde::Serialize;

use crate::harmonic::lcm_of;
use crate::params::VideoParams;
use crate::ratio::Ratio;
use crate::schedule::{BroadcastSchedule, Scheme, Transmission};

use super::SchemeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IndexBase {
    Zero,
    One,
}

impl IndexBase {
    fn value(self) -> i64 {
        match self {
            IndexBase::Zero => 0,
            IndexBase::One => 1,
        }
    }
}

/// How the last sub-slot picks among fragments `1..i-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LastSubslotCycle {
    /// `((j - 1) mod (i - 1)) + 1` with `j` the slot index inside the `i`-slot
    /// cycle, so fragment 1 goes out twice per cycle.
    PerSlotCycle,
    /// `(s mod (i - 1)) + 1` over the absolute slot index `s`, so any `i - 1`
    /// consecutive slots carry each of fragments `1..i-1` once.
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct QhbLayout {
    pub slot_base: IndexBase,
    pub subslot_base: IndexBase,
    pub last_subslot: LastSubslotCycle,
}

impl QhbLayout {
    /// 1-based slot and sub-slot, last sub-slot cycle restarting every `i` slots.
    pub const DOCUMENTED: QhbLayout = QhbLayout {
        slot_base: IndexBase::One,
        subslot_base: IndexBase::One,
        last_subslot: LastSubslotCycle::PerSlotCycle,
    };

    /// The stall-free layout: 1-based slot, 0-based sub-slot, continuous
    /// last-sub-slot cycle. Re-derived by `client_sim::resolve_qhb_layout`.
    pub const ADOPTED: QhbLayout = QhbLayout {
        slot_base: IndexBase::One,
        subslot_base: IndexBase::Zero,
        last_subslot: LastSubslotCycle::Continuous,
    };

    /// Candidate layouts in resolution order: the documented one, its three
    /// alternative index bases, then the same four with a continuous
    /// last-sub-slot cycle.
    pub fn candidates() -> Vec<QhbLayout> {
        let bases = [
            (IndexBase::One, IndexBase::One),
            (IndexBase::Zero, IndexBase::One),
            (IndexBase::One, IndexBase::Zero),
            (IndexBase::Zero, IndexBase::Zero),
        ];
        let mut out = Vec::new();
        for last_subslot in [LastSubslotCycle::PerSlotCycle, LastSubslotCycle::Continuous] {
            for (slot_base, subslot_base) in bases {
                out.push(QhbLayout {
                    slot_base,
                    subslot_base,
                    last_subslot,
                });
            }
        }
        out
    }

    pub fn label(&self) -> String {
        let b = |x: IndexBase| x.value();
        let cycle = match self.last_subslot {
            LastSubslotCycle::PerSlotCycle => "per-cycle",
            LastSubslotCycle::Continuous => "continuous",
        };
        format!(
            "slot base {}, sub-slot base {}, {cycle} last sub-slot",
            b(self.slot_base),
            b(self.subslot_base)
        )
    }
}

/// Placement formula with 1-based slot `j` and sub-slot `k`.
pub fn qhb_fragment_index(i: u32, m: u32, slot_j: u32, subslot_k: u32) -> Result<u32, SchemeError> {
    if i < 2 {
        return Err(SchemeError::Domain(format!("segment index {i} < 2")));
    }
    if m < 2 {
        return Err(SchemeError::Domain(format!("sub-slot count {m} < 2")));
    }
    if slot_j < 1 {
        return Err(SchemeError::Domain("slot index must be >= 1".into()));
    }
    if !(1..=m).contains(&subslot_k) {
        return Err(SchemeError::Domain(format!(
            "sub-slot {subslot_k} outside 1..={m}"
        )));
    }
    let (i, m, j, k) = (i as i64, m as i64, slot_j as i64, subslot_k as i64);
    let f = if k == m {
        (j - 1).rem_euclid(i - 1) + 1
    } else {
        (i * k + j - 1).rem_euclid(i * (m - 1)) + i
    };
    Ok(f as u32)
}

/// Fragment sent by channel `i` in absolute slot `slot` (0-based), sub-slot
/// position `pos` (0-based, `pos == m - 1` is the last sub-slot).
pub fn qhb_layout_fragment(layout: QhbLayout, i: u32, m: u32, slot: u64, pos: u32) -> u32 {
    debug_assert!(i >= 2 && m >= 2 && pos < m);
    let (i, m) = (i as i64, m as i64);
    let j = (slot % i as u64) as i64 + layout.slot_base.value();
    let f = if pos as i64 == m - 1 {
        match layout.last_subslot {
            LastSubslotCycle::PerSlotCycle => (j - 1).rem_euclid(i - 1) + 1,
            LastSubslotCycle::Continuous => (slot % (i - 1) as u64) as i64 + 1,
        }
    } else {
        let k = pos as i64 + layout.subslot_base.value();
        (i * k + j - 1).rem_euclid(i * (m - 1)) + i
    };
    f as u32
}

/// QHB with the documented index bases.
pub fn build_qhb(params: &VideoParams) -> Result<BroadcastSchedule, SchemeError> {
    build_qhb_with_layout(params, QhbLayout::DOCUMENTED)
}

pub fn build_qhb_with_layout(
    params: &VideoParams,
    layout: QhbLayout,
) -> Result<BroadcastSchedule, SchemeError> {
    let m = params.subslots();
    if m < 2 {
        return Err(SchemeError::Unsupported {
            scheme: Scheme::Qhb,
            requirement: "m >= 2",
        });
    }
    let n = params.num_segments() as u64;
    let hyper = lcm_of(1..=n);
    let sub = Ratio::unit(m as i128);
    let mut tx = Vec::new();
    for slot in 0..hyper {
        tx.push(Transmission {
            channel: 1,
            start: Ratio::from(slot),
            duration: Ratio::ONE,
            offset: Ratio::ZERO,
            length: Ratio::ONE,
            rate: Ratio::ONE,
        });
    }
    for i in 2..=n as u32 {
        let frag_len = Ratio::unit((i * m - 1) as i128);
        let rate = Ratio::from(m) * frag_len;
        let base = Ratio::from(i - 1);
        for slot in 0..hyper {
            for pos in 0..m {
                let f = qhb_layout_fragment(layout, i, m, slot, pos);
                tx.push(Transmission {
                    channel: i,
                    start: Ratio::from(slot) + sub * Ratio::from(pos),
                    duration: sub,
                    offset: base + frag_len * Ratio::from(f - 1),
                    length: frag_len,
                    rate,
                });
            }
        }
    }
    Ok(super::finish(params, Scheme::Qhb, hyper, tx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::r;
    use std::collections::BTreeMap;

    #[test]
    fn placement_examples() {
        assert_eq!(qhb_fragment_index(2, 4, 1, 4).unwrap(), 1);
        assert_eq!(qhb_fragment_index(2, 4, 1, 1).unwrap(), 4);
        assert_eq!(qhb_fragment_index(2, 4, 2, 3).unwrap(), 3);
    }

    #[test]
    fn placement_domain() {
        assert!(qhb_fragment_index(1, 4, 1, 1).is_err());
        assert!(qhb_fragment_index(2, 1, 1, 1).is_err());
        assert!(qhb_fragment_index(2, 4, 1, 5).is_err());
        assert!(qhb_fragment_index(2, 4, 1, 0).is_err());
        assert!(qhb_fragment_index(2, 4, 0, 1).is_err());
    }

    #[test]
    fn documented_layout_matches_formula() {
        for i in 2..=7u32 {
            for m in 2..=5u32 {
                for slot in 0..(3 * i as u64) {
                    for pos in 0..m {
                        let j = (slot % i as u64) as u32 + 1;
                        assert_eq!(
                            qhb_layout_fragment(QhbLayout::DOCUMENTED, i, m, slot, pos),
                            qhb_fragment_index(i, m, j, pos + 1).unwrap()
                        );
                    }
                }
            }
        }
    }

    fn counts(i: u32, m: u32, layout: QhbLayout, first_slot: u64) -> BTreeMap<u32, u32> {
        let mut c = BTreeMap::new();
        for slot in first_slot..first_slot + i as u64 {
            for pos in 0..m {
                *c.entry(qhb_layout_fragment(layout, i, m, slot, pos))
                    .or_insert(0) += 1;
            }
        }
        c
    }

    #[test]
    fn first_fragment_doubled_per_cycle() {
        let c = counts(2, 4, QhbLayout::DOCUMENTED, 0);
        assert_eq!(c[&1], 2);
        assert!((2..=7).all(|f| c[&f] == 1));

        let c = counts(3, 4, QhbLayout::DOCUMENTED, 3);
        assert_eq!(c.values().sum::<u32>(), 12);
        assert_eq!(c.len(), 11);
        assert_eq!(c[&1], 2);
    }

    #[test]
    fn adopted_layout_doubles_one_low_fragment_per_window() {
        for i in 2..=8u32 {
            for m in 2..=5u32 {
                for start in 0..(2 * i as u64 * (i as u64 - 1).max(1)) {
                    let c = counts(i, m, QhbLayout::ADOPTED, start);
                    assert_eq!(c.len() as u32, i * m - 1);
                    let doubled: Vec<u32> = c
                        .iter()
                        .filter(|(_, n)| **n == 2)
                        .map(|(f, _)| *f)
                        .collect();
                    assert_eq!(doubled.len(), 1);
                    assert!(doubled[0] < i.max(2));
                }
            }
        }
    }

    #[test]
    fn channel_rate() {
        let s = build_qhb(&VideoParams::canonical(3, 4).unwrap()).unwrap();
        assert!(s.on_channel(2).all(|t| t.rate == r(4, 7)));
        assert!(s.on_channel(3).all(|t| t.rate == r(4, 11)));
        assert!(s.on_channel(1).all(|t| t.rate == Ratio::ONE));
    }
}
