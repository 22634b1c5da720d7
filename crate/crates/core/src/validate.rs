//! Independent schedule checker. Works only from the system description and
//! the session list; it never consults planner state.

use std::collections::BTreeMap;
use std::fmt;

use crate::scheduler::{PlanOptions, Schedule, TestSession};
use crate::sysdesc::SystemDescription;
use crate::test_model::{session_cost, Cut, Endpoint, EndpointKind, Resource};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    MissingModule { module: u32 },
    DuplicateModule { module: u32 },
    UnexpectedModule { module: u32 },
    UnknownEndpoint { cut_id: u32, kind: EndpointKind, id: u32 },
    EndpointMismatch { cut_id: u32, kind: EndpointKind, id: u32 },
    RoleViolation { cut_id: u32 },
    ProcessorNotReused { cut_id: u32, processor: u32 },
    SelfService { processor: u32 },
    EndpointOverlap { resource: Resource, first: u32, second: u32 },
    PowerExceeded { at: u64, power: u64, budget: u64 },
    PrecedenceViolation { processor: u32, cut_id: u32, start: u64, ready: Option<u64> },
    LinkConflict { first: u32, second: u32 },
    CostMismatch { cut_id: u32, field: &'static str },
    MakespanMismatch { recorded: u64, actual: u64 },
    BudgetMismatch { recorded: Option<u64>, expected: Option<u64> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            MissingModule { module } => write!(f, "module {module} is never tested"),
            DuplicateModule { module } => write!(f, "module {module} is tested more than once"),
            UnexpectedModule { module } => write!(f, "module {module} needs no test or does not exist"),
            UnknownEndpoint { cut_id, kind, id } => {
                write!(f, "session for {cut_id} uses unknown {kind} {id}")
            }
            EndpointMismatch { cut_id, kind, id } => {
                write!(f, "session for {cut_id}: {kind} {id} disagrees with the system description")
            }
            RoleViolation { cut_id } => write!(f, "session for {cut_id} has an invalid source or sink role"),
            ProcessorNotReused { cut_id, processor } => {
                write!(f, "session for {cut_id} uses processor {processor} outside the reused set")
            }
            SelfService { processor } => write!(f, "processor {processor} serves its own test"),
            EndpointOverlap { resource, first, second } => {
                write!(f, "{resource} serves overlapping sessions for {first} and {second}")
            }
            PowerExceeded { at, power, budget } => {
                write!(f, "power {power} exceeds budget {budget} at cycle {at}")
            }
            PrecedenceViolation { processor, cut_id, start, ready } => match ready {
                Some(r) => write!(
                    f,
                    "processor {processor} serves {cut_id} at {start} before its own test ends at {r}"
                ),
                None => write!(f, "processor {processor} serves {cut_id} but is never tested"),
            },
            LinkConflict { first, second } => {
                write!(f, "sessions for {first} and {second} share a link while overlapping")
            }
            CostMismatch { cut_id, field } => write!(f, "session for {cut_id} has wrong {field}"),
            MakespanMismatch { recorded, actual } => {
                write!(f, "makespan recorded as {recorded}, sessions end at {actual}")
            }
            BudgetMismatch { recorded, expected } => {
                write!(f, "budget recorded as {recorded:?}, options give {expected:?}")
            }
        }
    }
}

fn overlaps(a: &TestSession, b: &TestSession) -> bool {
    a.start < b.end && b.start < a.end
}

fn resolve(sys: &SystemDescription, e: &Endpoint) -> Option<Endpoint> {
    match e.kind {
        EndpointKind::Processor => sys.processor(e.ref_id).map(Endpoint::processor),
        _ => sys
            .port(e.ref_id)
            .map(Endpoint::port)
            .filter(|p| p.kind == e.kind),
    }
}

/// Every rule a schedule must satisfy; an empty result means valid.
pub fn validate_schedule(sys: &SystemDescription, opts: &PlanOptions, sched: &Schedule) -> Vec<Violation> {
    let mut out = Vec::new();
    let sessions = &sched.sessions;

    let mut required: BTreeMap<u32, Cut> = BTreeMap::new();
    for c in sys.cores.iter().filter(|c| c.pattern_count > 0) {
        required.insert(c.id, Cut::core(c));
    }
    for p in sys.processors.iter().filter(|p| p.self_test.pattern_count > 0) {
        required.insert(p.id, Cut::processor_self_test(p));
    }

    // (a) coverage
    let mut seen: BTreeMap<u32, usize> = BTreeMap::new();
    for s in sessions {
        *seen.entry(s.cut_id).or_default() += 1;
    }
    for (&id, &count) in &seen {
        if !required.contains_key(&id) {
            out.push(Violation::UnexpectedModule { module: id });
        } else if count > 1 {
            out.push(Violation::DuplicateModule { module: id });
        }
    }
    for &id in required.keys() {
        if !seen.contains_key(&id) {
            out.push(Violation::MissingModule { module: id });
        }
    }

    let mut by_id: Vec<_> = sys.processors.iter().map(|p| p.id).collect();
    by_id.sort_unstable();
    let reused = &by_id[..opts.processors_reused.min(by_id.len())];

    let expected_budget = match opts.power_fraction {
        Some(f) if f.numer() < f.denom() => Some(crate::sysdesc::power_budget(sys, f)),
        _ => None,
    };
    if sched.budget != expected_budget {
        out.push(Violation::BudgetMismatch {
            recorded: sched.budget,
            expected: expected_budget,
        });
    }

    // per-session checks, including (f) recomputed costs
    for s in sessions {
        for e in [&s.source, &s.sink] {
            match resolve(sys, e) {
                None => out.push(Violation::UnknownEndpoint {
                    cut_id: s.cut_id,
                    kind: e.kind,
                    id: e.ref_id,
                }),
                Some(r) if r != *e => out.push(Violation::EndpointMismatch {
                    cut_id: s.cut_id,
                    kind: e.kind,
                    id: e.ref_id,
                }),
                Some(_) => {}
            }
            if e.kind == EndpointKind::Processor {
                if !reused.contains(&e.ref_id) {
                    out.push(Violation::ProcessorNotReused {
                        cut_id: s.cut_id,
                        processor: e.ref_id,
                    });
                }
                if e.ref_id == s.cut_id && sys.processor(s.cut_id).is_some() {
                    out.push(Violation::SelfService { processor: e.ref_id });
                }
            }
        }
        let Some(cut) = required.get(&s.cut_id) else { continue };
        match session_cost(&sys.noc, cut, &s.source, &s.sink) {
            Err(_) => out.push(Violation::RoleViolation { cut_id: s.cut_id }),
            Ok(cost) => {
                let checks = [
                    ("duration", s.end.checked_sub(s.start) == Some(cost.duration)),
                    ("power", s.power == cost.power),
                    ("inbound_path", s.inbound_path == cost.inbound_path),
                    ("outbound_path", s.outbound_path == cost.outbound_path),
                ];
                for (field, ok) in checks {
                    if !ok {
                        out.push(Violation::CostMismatch { cut_id: s.cut_id, field });
                    }
                }
            }
        }
    }

    // (b) endpoint exclusivity and (e) link disjointness, pairwise
    for (i, a) in sessions.iter().enumerate() {
        for b in &sessions[i + 1..] {
            if !overlaps(a, b) {
                continue;
            }
            let ra = [a.source.resource(), a.sink.resource()];
            let rb = [b.source.resource(), b.sink.resource()];
            if let Some(r) = ra.iter().find(|r| rb.contains(r)) {
                out.push(Violation::EndpointOverlap {
                    resource: *r,
                    first: a.cut_id,
                    second: b.cut_id,
                });
            }
            if opts.exclusive_links && !a.links().is_disjoint(&b.links()) {
                out.push(Violation::LinkConflict {
                    first: a.cut_id,
                    second: b.cut_id,
                });
            }
        }
    }

    // (c) power at every start instant
    if let Some(budget) = expected_budget {
        let mut starts: Vec<u64> = sessions.iter().map(|s| s.start).collect();
        starts.sort_unstable();
        starts.dedup();
        for t in starts {
            let power: u64 = sessions
                .iter()
                .filter(|s| s.start <= t && t < s.end)
                .map(|s| s.power)
                .sum();
            if power > budget {
                out.push(Violation::PowerExceeded { at: t, power, budget });
            }
        }
    }

    // (d) processors serve only after their own test
    for s in sessions {
        let mut cpus = vec![];
        for e in [&s.source, &s.sink] {
            if e.kind == EndpointKind::Processor && !cpus.contains(&e.ref_id) {
                cpus.push(e.ref_id);
            }
        }
        for cpu in cpus {
            let needs_test = sys
                .processor(cpu)
                .is_some_and(|p| p.self_test.pattern_count > 0);
            if !needs_test {
                continue;
            }
            let ready = sessions
                .iter()
                .filter(|x| x.cut_id == cpu)
                .map(|x| x.end)
                .max();
            if ready.is_none_or(|r| s.start < r) {
                out.push(Violation::PrecedenceViolation {
                    processor: cpu,
                    cut_id: s.cut_id,
                    start: s.start,
                    ready,
                });
            }
        }
    }

    let actual = sessions.iter().map(|s| s.end).max().unwrap_or(0);
    if sched.makespan != actual {
        out.push(Violation::MakespanMismatch {
            recorded: sched.makespan,
            actual,
        });
    }
    out
}
