use serde::Serialize;

use crate::harmonic::lcm_of;
use crate::params::VideoParams;
use crate::ratio::Ratio;
use crate::schedule::{BroadcastSchedule, Scheme, Transmission};

/// Transmission order for one segment: `i` rows of `m` fragment indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AqhbMatrix {
    pub segment: u32,
    pub cols: u32,
    pub cells: Vec<Vec<u32>>,
}

impl AqhbMatrix {
    /// 1-based row.
    pub fn row(&self, row: u32) -> &[u32] {
        &self.cells[(row - 1) as usize]
    }

    pub fn rows(&self) -> u32 {
        self.segment
    }
}

/// Fills `cell(row, col) = i*(col - 1) + row`.
pub fn aqhb_matrix(i: u32, m: u32) -> AqhbMatrix {
    let cells = (1..=i)
        .map(|row| (1..=m).map(|col| i * (col - 1) + row).collect())
        .collect();
    AqhbMatrix {
        segment: i,
        cols: m,
        cells,
    }
}

/// Adaptive quasi-harmonic broadcasting.
///
/// Segment `i` is cut into `i*m` fragments; channel `i` sends row
/// `(s mod i) + 1` of the segment's matrix during slot `s`, one fragment per
/// sub-slot, always at rate `1/i`.
pub fn build_aqhb(params: &VideoParams) -> BroadcastSchedule {
    let n = params.num_segments();
    let m = params.subslots();
    let hyper = lcm_of(1..=n as u64);
    let sub = Ratio::unit(m as i128);
    let mut tx = Vec::new();
    for i in 1..=n {
        let matrix = aqhb_matrix(i, m);
        let frag_len = Ratio::unit((i * m) as i128);
        let rate = Ratio::unit(i as i128);
        let base = Ratio::from(i - 1);
        for slot in 0..hyper {
            let row = (slot % i as u64) as u32 + 1;
            for (pos, &f) in matrix.row(row).iter().enumerate() {
                tx.push(Transmission {
                    channel: i,
                    start: Ratio::from(slot) + sub * Ratio::from(pos as u64),
                    duration: sub,
                    offset: base + frag_len * Ratio::from(f - 1),
                    length: frag_len,
                    rate,
                });
            }
        }
    }
    super::finish(params, Scheme::Aqhb, hyper, tx)
}
