use harmonic_broadcast::client_sim::{PlaybackPolicy, Receiver};
use harmonic_broadcast::schemes::build_schedule;
use harmonic_broadcast::{BroadcastSchedule, Ratio, Scheme, VideoParams};
use proptest::prelude::*;

fn schedule(scheme: Scheme, n: u32, m: u32) -> BroadcastSchedule {
    build_schedule(scheme, &VideoParams::canonical(n, m).unwrap()).unwrap()
}

/// Earliest time position `x` is received by a client tuned in from
/// `arrival`, scanning every transmission over the next two periods.
fn oracle(s: &BroadcastSchedule, arrival: Ratio, x: Ratio) -> Ratio {
    let period = s.period();
    let first = (arrival / period).floor();
    let mut best: Option<Ratio> = None;
    for k in first..first + 3 {
        let shift = period * Ratio::integer(k);
        for t in &s.transmissions {
            if t.offset <= x && x < t.byte_end() {
                let at = t.start + shift + (x - t.offset) / t.rate;
                if at >= arrival && best.is_none_or(|b| at < b) {
                    best = Some(at);
                }
            }
        }
    }
    best.expect("position is broadcast")
}

fn scheme_strategy() -> impl Strategy<Value = Scheme> {
    prop::sample::select(Scheme::ALL.to_vec())
}

/// `(scheme, N, m, arrival index)` with CHB restricted to `N >= 3`.
fn config() -> impl Strategy<Value = (Scheme, u32, u32, u64)> {
    (scheme_strategy(), 1u32..=5, 2u32..=4, any::<u64>()).prop_map(|(scheme, n, m, a)| {
        let n = if scheme == Scheme::Chb { n.max(3) } else { n };
        (scheme, n, m, a)
    })
}

fn arrival_of(s: &BroadcastSchedule, idx: u64) -> Ratio {
    let m = s.params.subslots() as u64;
    Ratio::new((idx % (s.hyperperiod_slots * m)) as i128, m as i128).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn availability_matches_brute_force((scheme, n, m, a) in config(), xs in prop::collection::vec((0u32..1000, 1u32..1000), 8)) {
        let s = schedule(scheme, n, m);
        let arrival = arrival_of(&s, a);
        let curve = Receiver::new(&s).availability(arrival).unwrap();
        for (num, den) in xs {
            let x = Ratio::new((num % den) as i128 * n as i128, den as i128).unwrap();
            prop_assert_eq!(curve.available_at(x), Some(oracle(&s, arrival, x)), "x = {}", x);
        }
    }

    #[test]
    fn earlier_arrival_never_receives_later((scheme, n, m, a) in config(), back in 1u64..8) {
        let s = schedule(scheme, n, m);
        let rx = Receiver::new(&s);
        let late = arrival_of(&s, a) + Ratio::from(back);
        let early = late - Ratio::new(back as i128, m as i128).unwrap();
        let cl = rx.availability(late).unwrap();
        let ce = rx.availability(early).unwrap();
        for p in cl.pieces.iter().chain(ce.pieces.iter()) {
            for x in [p.start, (p.start + p.end) / Ratio::from(2u32)] {
                prop_assert!(ce.available_at(x).unwrap() <= cl.available_at(x).unwrap());
            }
        }
    }

    #[test]
    fn one_period_later_is_a_time_shift((scheme, n, m, a) in config()) {
        let s = schedule(scheme, n, m);
        let rx = Receiver::new(&s);
        let arrival = arrival_of(&s, a);
        let policy = PlaybackPolicy::default_for(scheme);
        let t0 = rx.simulate(arrival, policy).unwrap();
        let t1 = rx.simulate(arrival + s.period(), policy).unwrap();
        prop_assert_eq!(t1.playback_start - t0.playback_start, s.period());
        prop_assert_eq!(t1.total_stall, t0.total_stall);
        prop_assert_eq!(t1.max_buffer, t0.max_buffer);
        prop_assert_eq!(t1.redundant_bytes, t0.redundant_bytes);
        prop_assert_eq!(t1.download_complete - t0.download_complete, s.period());
    }

    #[test]
    fn whole_video_received_once((scheme, n, m, a) in config()) {
        let s = schedule(scheme, n, m);
        let trace = Receiver::new(&s).simulate(arrival_of(&s, a), PlaybackPolicy::default_for(scheme)).unwrap();
        prop_assert_eq!(trace.useful_bytes, s.video_size());
        prop_assert!(!trace.redundant_bytes.is_negative());
        prop_assert_eq!(trace.buffer_at(trace.completion_time), Ratio::ZERO);
        prop_assert!(trace.buffer_curve.iter().all(|(_, b)| !b.is_negative() && *b <= trace.max_buffer));
        prop_assert_eq!(trace.completion_time, trace.playback_start + s.video_size() + trace.total_stall);
    }

    #[test]
    fn stall_is_lag_past_start((scheme, n, m, a) in config()) {
        let s = schedule(scheme, n, m);
        let rx = Receiver::new(&s);
        let arrival = arrival_of(&s, a);
        let curve = rx.availability(arrival).unwrap();
        let lag = curve
            .pieces
            .iter()
            .flat_map(|p| [p.ready_at - p.start, p.ready_end() - p.end])
            .max()
            .unwrap();
        let trace = rx.simulate(arrival, PlaybackPolicy::NextSlotBoundary).unwrap();
        prop_assert_eq!(trace.total_stall, (lag - trace.playback_start).max(Ratio::ZERO));
        let earliest = rx.earliest_feasible_start(arrival).unwrap();
        prop_assert_eq!(earliest, lag.max(arrival));
        let feasible = rx.simulate(arrival, PlaybackPolicy::EarliestFeasible).unwrap();
        prop_assert_eq!(feasible.total_stall, Ratio::ZERO);
        prop_assert_eq!(feasible.playback_start, earliest);
    }

    #[test]
    fn fixed_delay_past_earliest_never_stalls((scheme, n, m, a) in config(), extra in 0u32..5) {
        let s = schedule(scheme, n, m);
        let rx = Receiver::new(&s);
        let arrival = arrival_of(&s, a);
        let d = rx.earliest_feasible_start(arrival).unwrap() - arrival + Ratio::new(extra as i128, m as i128).unwrap();
        let trace = rx.simulate(arrival, PlaybackPolicy::FixedDelay(d)).unwrap();
        prop_assert_eq!(trace.total_stall, Ratio::ZERO);
        prop_assert_eq!(trace.startup_wait(), d);
    }

    #[test]
    fn repaired_schemes_never_stall((scheme, n, m, a) in config()) {
        prop_assume!(scheme != Scheme::Hb);
        let s = schedule(scheme, n, m);
        let trace = Receiver::new(&s).simulate(arrival_of(&s, a), PlaybackPolicy::default_for(scheme)).unwrap();
        prop_assert_eq!(trace.total_stall, Ratio::ZERO);
    }

    #[test]
    fn hb_stall_bounded_by_a_slot(n in 1u32..=6, m in 2u32..=4, a in any::<u64>()) {
        let s = schedule(Scheme::Hb, n, m);
        let trace = Receiver::new(&s).simulate(arrival_of(&s, a), PlaybackPolicy::NextSlotBoundary).unwrap();
        prop_assert!(trace.total_stall < Ratio::ONE);
    }
}

#[test]
fn off_grid_arrival_is_rejected() {
    let s = schedule(Scheme::Hb, 3, 4);
    assert!(Receiver::new(&s)
        .availability(Ratio::new(1, 3).unwrap())
        .is_err());
    assert!(Receiver::new(&s)
        .availability(Ratio::new(-1, 4).unwrap())
        .is_err());
}

#[test]
fn position_pauses_during_stalls() {
    let s = schedule(Scheme::Hb, 4, 2);
    let rx = Receiver::new(&s);
    let worst = rx
        .sweep(PlaybackPolicy::NextSlotBoundary, false)
        .unwrap()
        .worst_arrival;
    let trace = rx
        .simulate(worst, PlaybackPolicy::NextSlotBoundary)
        .unwrap();
    assert!(!trace.stall_events.is_empty());
    for e in &trace.stall_events {
        assert_eq!(trace.position_at(e.began_at), e.position);
        assert_eq!(trace.position_at(e.resumed_at), e.resume_position);
    }
    assert_eq!(trace.position_at(trace.playback_start), Ratio::ZERO);
    assert_eq!(trace.position_at(trace.completion_time), s.video_size());
}
