use harmonic_broadcast::client_sim::{quantize_arrival, PlaybackPolicy, Receiver};
use harmonic_broadcast::json::{schedule_from_json, schedule_to_json};
use harmonic_broadcast::metrics::{
    bandwidth_profile, figure6_aggregate, figure7_rows, table1_relations, Criterion, Measured,
};
use harmonic_broadcast::schemes::{build_schedule_with, fragment_of};
use harmonic_broadcast::{schedule_validate, BroadcastSchedule, Ratio, Scheme, VideoParams};

use crate::output::{emit, Cell, Format, Report};
use crate::{Common, Failure, ReportKind};

fn config(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

impl Common {
    fn parallel(&self) -> bool {
        !self.no_parallel
    }

    fn scheme(&self) -> Result<Scheme, Failure> {
        self.scheme.ok_or_else(|| config("--scheme is required"))
    }

    fn segment_list(&self) -> Result<&[u32], Failure> {
        self.segments
            .as_ref()
            .map(|s| s.0.as_slice())
            .ok_or_else(|| config("--segments is required"))
    }

    fn single_segment(&self) -> Result<u32, Failure> {
        match self.segment_list()? {
            [n] => Ok(*n),
            _ => Err(config(
                "this command takes a single --segments value, not a range",
            )),
        }
    }

    fn params(&self, n: u32) -> Result<VideoParams, Failure> {
        Ok(VideoParams::new(self.length, self.rate, n, self.m)?)
    }

    /// Requested policy in canonical units, or the scheme default.
    fn policy(&self, scheme: Scheme, params: &VideoParams) -> PlaybackPolicy {
        match self.policy {
            Some(PlaybackPolicy::FixedDelay(d)) => {
                PlaybackPolicy::FixedDelay(params.canonical_time(d))
            }
            Some(p) => p,
            None => PlaybackPolicy::default_for(scheme),
        }
    }

    fn build(&self, scheme: Scheme, n: u32) -> Result<BroadcastSchedule, Failure> {
        Ok(build_schedule_with(
            scheme,
            &self.params(n)?,
            self.qhb_layout.layout(),
        )?)
    }

    /// The imported schedule, or one built schedule per requested `N`.
    fn schedules(&self) -> Result<Vec<BroadcastSchedule>, Failure> {
        if let Some(path) = &self.from {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config(format!("{}: {e}", path.display())))?;
            let mut s = schedule_from_json(&text)?;
            s.params = VideoParams::new(
                self.length,
                self.rate,
                s.params.num_segments(),
                s.params.subslots(),
            )?;
            if let Some(v) = schedule_validate(&s).first() {
                return Err(config(format!("{}: invalid schedule: {v}", path.display())));
            }
            return Ok(vec![s]);
        }
        let scheme = self.scheme()?;
        self.segment_list()?
            .iter()
            .map(|&n| self.build(scheme, n))
            .collect()
    }

    fn write(&self, text: &str) -> Result<(), Failure> {
        emit(text, self.out.as_deref()).map_err(Failure::Io)
    }
}

fn policy_label(policy: PlaybackPolicy, params: &VideoParams) -> String {
    match policy {
        PlaybackPolicy::FixedDelay(d) => format!("fixed:{}", params.display_time(d)),
        p => p.to_string(),
    }
}

pub fn schedule(c: &Common) -> Result<(), Failure> {
    let mut all = c.schedules()?;
    if all.len() != 1 {
        return Err(config(
            "schedule takes a single --segments value, not a range",
        ));
    }
    let s = all.remove(0);
    if c.format == Format::Json {
        return c.write(&schedule_to_json(&s));
    }
    let p = s.params;
    let m = Ratio::from(p.subslots());
    let mut tx: Vec<_> = s.transmissions.iter().collect();
    tx.sort_by_key(|t| (t.channel, t.start, t.offset));
    let exact = c.format == Format::Csv;
    let mut rep = if exact {
        Report::new(&[
            "channel",
            "slot",
            "subslot",
            "segment",
            "fragment",
            "rate_num",
            "rate_den",
            "start_num",
            "start_den",
        ])
    } else {
        Report::new(&[
            "channel", "slot", "subslot", "segment", "fragment", "rate", "start",
        ])
    };
    for t in tx {
        let slot = t.start.floor();
        let subslot = ((t.start - Ratio::integer(slot)) * m).floor() + 1;
        let f = fragment_of(s.scheme, p.subslots(), t);
        let rate = p.display_rate(t.rate);
        let start = p.display_time(t.start);
        let mut row: Vec<Cell> = vec![
            t.channel.into(),
            (slot as u64).into(),
            (subslot as u64).into(),
            f.segment_index.into(),
            f.fragment_index.into(),
        ];
        if exact {
            row.extend(
                [rate.numer(), rate.denom(), start.numer(), start.denom()]
                    .map(|v| Cell::Text(v.to_string())),
            );
        } else {
            row.extend([rate.into(), start.into()]);
        }
        rep.push(row);
    }
    c.write(&rep.render(c.format))
}

pub fn verify(c: &Common) -> Result<(), Failure> {
    let mut rep = Report::new(&[
        "scheme",
        "N",
        "m",
        "policy",
        "arrivals",
        "stalled_arrivals",
        "max_total_stall",
        "max_startup_wait",
        "max_extra_delay",
        "max_buffer",
        "worst_arrival",
        "worst_stalls",
    ]);
    let mut stalled = false;
    for s in c.schedules()? {
        let p = s.params;
        let policy = c.policy(s.scheme, &p);
        let sum = Receiver::new(&s).sweep(policy, c.parallel())?;
        stalled |= sum.max_total_stall.is_positive();
        let stalls: Vec<String> = sum
            .worst_stalls
            .iter()
            .map(|e| {
                format!(
                    "{}+{}",
                    p.display_data(e.position),
                    p.display_time(e.duration)
                )
            })
            .collect();
        rep.push(vec![
            s.scheme.tag().into(),
            p.num_segments().into(),
            p.subslots().into(),
            policy_label(policy, &p).into(),
            sum.arrivals_checked.into(),
            sum.stalled_arrivals.into(),
            p.display_time(sum.max_total_stall).into(),
            p.display_time(sum.max_startup_wait).into(),
            p.display_time(sum.max_extra_delay).into(),
            p.display_data(sum.max_buffer_over_arrivals).into(),
            p.display_time(sum.worst_arrival).into(),
            stalls.join(" ").into(),
        ]);
    }
    c.write(&rep.render(c.format))?;
    if stalled {
        Err(Failure::Stalls)
    } else {
        Ok(())
    }
}

pub fn report(which: ReportKind, c: &Common) -> Result<(), Failure> {
    let rep = match which {
        ReportKind::Fig6 => fig6(c)?,
        ReportKind::Fig7 => fig7(c)?,
        ReportKind::Table1 => table1(c)?,
        ReportKind::ClientTrace => client_trace(c)?,
    };
    c.write(&rep.render(c.format))
}

fn fig6(c: &Common) -> Result<Report, Failure> {
    let mut rep = Report::new(&[
        "series",
        "N",
        "scheme",
        "start",
        "end",
        "rate",
        "average_rate",
        "peak_rate",
    ]);
    let segments = c.segment_list()?;
    for row in figure6_aggregate(segments, c.m)? {
        let p = c.params(row.n)?;
        rep.push(vec![
            "aggregate".into(),
            row.n.into(),
            row.scheme.tag().into(),
            Cell::Missing,
            Cell::Missing,
            Cell::Missing,
            p.display_rate(row.average_rate).into(),
            p.display_rate(row.peak_rate).into(),
        ]);
    }
    for &n in segments {
        let p = c.params(n)?;
        for scheme in Scheme::ALL {
            let s = match build_schedule_with(scheme, &p, c.qhb_layout.layout()) {
                Ok(s) => s,
                Err(harmonic_broadcast::schemes::SchemeError::Unsupported { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            for piece in bandwidth_profile(&s).pieces {
                rep.push(vec![
                    "profile".into(),
                    n.into(),
                    scheme.tag().into(),
                    p.display_time(piece.start).into(),
                    p.display_time(piece.end).into(),
                    p.display_rate(piece.rate).into(),
                    Cell::Missing,
                    Cell::Missing,
                ]);
            }
        }
    }
    Ok(rep)
}

fn fig7(c: &Common) -> Result<Report, Failure> {
    let mut rep = Report::new(&[
        "N",
        "hb_wait",
        "chb_wait",
        "qhb_wait",
        "ahb_wait",
        "aqhb_wait",
        "hb_measured_stall",
        "hb_measured_delay",
        "note",
    ]);
    for row in figure7_rows(c.length, c.segment_list()?, c.m, c.parallel())? {
        rep.push(vec![
            row.n.into(),
            row.hb_wait.into(),
            row.chb_wait.into(),
            row.qhb_wait.into(),
            row.ahb_wait.into(),
            row.aqhb_wait.into(),
            row.hb_measured_stall.into(),
            row.hb_measured_delay.into(),
            row.note.into(),
        ]);
    }
    Ok(rep)
}

fn measured_text(m: Measured, scale: impl Fn(Ratio) -> Ratio) -> String {
    match m {
        Measured::Pair { average, worst } => {
            format!("avg {} / worst {}", scale(average), scale(worst))
        }
        Measured::Value { value } => scale(value).to_string(),
        Measured::Flag { value } => value.to_string(),
    }
}

fn table1(c: &Common) -> Result<Report, Failure> {
    let mut rep = Report::new(&[
        "N",
        "criterion",
        "other",
        "relation",
        "expected",
        "match",
        "aqhb",
        "other_value",
    ]);
    for &n in c.segment_list()? {
        let p = c.params(n)?;
        let table = table1_relations(&p, c.parallel())?;
        for row in &table.rows {
            let scale = |v: Ratio| match row.criterion {
                Criterion::SlotBandwidth => p.display_rate(v),
                Criterion::Storage => p.display_data(v),
                _ => p.display_time(v),
            };
            rep.push(vec![
                n.into(),
                row.criterion.to_string().into(),
                row.other.tag().into(),
                row.relation.to_string().into(),
                row.expected.to_string().into(),
                row.matches().into(),
                measured_text(row.aqhb, scale).into(),
                measured_text(row.measured_other, scale).into(),
            ]);
        }
    }
    Ok(rep)
}

fn client_trace(c: &Common) -> Result<Report, Failure> {
    let scheme = c.scheme()?;
    let s = c.build(scheme, c.single_segment()?)?;
    let p = s.params;
    let arrival = quantize_arrival(p.canonical_time(c.arrival), p.subslots());
    let trace = Receiver::new(&s).simulate(arrival, c.policy(scheme, &p))?;
    let mut events: Vec<(Ratio, u8, &str)> = vec![
        (trace.arrival, 0, "arrival"),
        (trace.playback_start, 1, "playback_start"),
        (trace.download_complete, 4, "download_complete"),
        (trace.completion_time, 5, "playback_end"),
    ];
    for e in &trace.stall_events {
        events.push((e.began_at, 2, "stall_begin"));
        events.push((e.resumed_at, 3, "stall_end"));
    }
    for &(t, _) in &trace.buffer_curve {
        events.push((t, 6, "buffer"));
    }
    events.sort_by_key(|&(t, rank, _)| (t, rank));
    events.dedup();
    let mut rep = Report::new(&["time", "event", "video_position", "buffer"]);
    for (t, _, name) in events {
        rep.push(vec![
            p.display_time(t).into(),
            name.into(),
            p.display_data(trace.position_at(t)).into(),
            p.display_data(trace.buffer_at(t)).into(),
        ]);
    }
    Ok(rep)
}
