//! Text outputs: schedule CSV and the SVG Gantt chart.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::scheduler::Schedule;
use crate::sysdesc::SystemDescription;
use crate::test_model::Resource;

pub const SCHEDULE_HEADER: &str =
    "cut_id,source_kind,source_id,sink_kind,sink_id,start,end,power,in_hops,out_hops";

fn schedule_rows(sched: &Schedule) -> String {
    let mut rows: Vec<_> = sched.sessions.iter().collect();
    rows.sort_by_key(|s| (s.start, s.cut_id));
    let mut out = String::new();
    out.push_str(SCHEDULE_HEADER);
    out.push('\n');
    for s in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.cut_id,
            s.source.kind,
            s.source.ref_id,
            s.sink.kind,
            s.sink.ref_id,
            s.start,
            s.end,
            s.power,
            s.inbound_path.hops(),
            s.outbound_path.hops()
        );
    }
    out
}

pub fn schedule_csv(sched: &Schedule) -> String {
    let mut out = schedule_rows(sched);
    let _ = writeln!(out, "# makespan={} peak_power={}", sched.makespan, sched.peak_power());
    out
}

/// Schedule CSV for oracle results, which also records whether the search finished.
pub fn oracle_csv(sched: &Schedule, exact: bool) -> String {
    let mut out = schedule_rows(sched);
    let _ = writeln!(
        out,
        "# makespan={} peak_power={} exact={exact}",
        sched.makespan,
        sched.peak_power()
    );
    out
}

const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

const LEFT: f64 = 110.0;
const WIDTH: f64 = 800.0;
const LANE: f64 = 26.0;
const TOP: f64 = 40.0;

fn lane_label(r: Resource, sys: &SystemDescription) -> String {
    match r {
        Resource::Port(id) => match sys.port(id) {
            Some(p) => format!("{:?} port {id}", p.direction).to_uppercase(),
            None => format!("port {id}"),
        },
        Resource::Processor(id) => match sys.processor(id) {
            Some(p) => format!("{} ({id})", p.name),
            None => format!("cpu {id}"),
        },
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One lane per endpoint resource (every IO port plus each processor that
/// served a session), one bar per session on each lane it occupies.
pub fn gantt_svg(sys: &SystemDescription, sched: &Schedule) -> String {
    let mut lanes: BTreeSet<Resource> = sys.io_ports.iter().map(|p| Resource::Port(p.id)).collect();
    for s in &sched.sessions {
        lanes.extend(s.resources());
    }
    let lanes: Vec<Resource> = lanes.into_iter().collect();
    let span = sched.makespan.max(1) as f64;
    let x = |t: u64| LEFT + t as f64 / span * WIDTH;
    let height = TOP + LANE * lanes.len() as f64 + 40.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{height:.0}" font-family="sans-serif" font-size="11">"#,
        LEFT + WIDTH + 20.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{LEFT}" y="20" font-size="14">Test schedule: makespan {} cycles, peak power {}</text>"#,
        sched.makespan,
        sched.peak_power()
    );
    for (i, lane) in lanes.iter().enumerate() {
        let y = TOP + LANE * i as f64;
        let _ = writeln!(
            svg,
            r##"<rect x="{LEFT}" y="{y:.1}" width="{WIDTH}" height="{LANE}" fill="{}"/>"##,
            if i % 2 == 0 { "#f4f4f4" } else { "#ffffff" }
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + LANE * 0.65,
            escape(&lane_label(*lane, sys))
        );
    }
    for s in &sched.sessions {
        let colour = PALETTE[s.cut_id as usize % PALETTE.len()];
        for r in s.resources() {
            let i = lanes.iter().position(|l| *l == r).expect("lane exists");
            let y = TOP + LANE * i as f64 + 3.0;
            let (x0, x1) = (x(s.start), x(s.end));
            let _ = writeln!(
                svg,
                r#"<rect x="{x0:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="{colour}" stroke="black" stroke-width="0.5"><title>cut {} [{}, {}) power {}</title></rect>"#,
                (x1 - x0).max(0.5),
                LANE - 6.0,
                s.cut_id,
                s.start,
                s.end,
                s.power
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" fill="white">{}</text>"#,
                x0 + 3.0,
                y + LANE * 0.55,
                s.cut_id
            );
        }
    }
    let axis_y = TOP + LANE * lanes.len() as f64 + 4.0;
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT}" y1="{axis_y:.1}" x2="{:.1}" y2="{axis_y:.1}" stroke="black"/>"#,
        LEFT + WIDTH
    );
    for k in 0..=5u64 {
        let t = sched.makespan * k / 5;
        let tx = x(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{tx:.1}" y1="{axis_y:.1}" x2="{tx:.1}" y2="{:.1}" stroke="black"/><text x="{tx:.1}" y="{:.1}" text-anchor="middle">{t}</text>"#,
            axis_y + 5.0,
            axis_y + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">cycles</text>"#,
        LEFT + WIDTH / 2.0,
        axis_y + 32.0
    );
    svg.push_str("</svg>\n");
    svg
}
