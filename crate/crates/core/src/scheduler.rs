//! Greedy, priority-ordered, event-driven test planner.
//!
//! At every event time the planner walks the pending modules in priority
//! order and starts each one on the first feasible (source, sink) pair,
//! where pairs that became free earliest come first. Sessions hold both
//! endpoints for their whole duration; a processor only joins the endpoint
//! pool once its own test has finished.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::fraction::PowerFraction;
use crate::noc::{Link, Path};
use crate::sysdesc::{power_budget, priority_key, SystemDescription};
use crate::test_model::{session_cost, Cut, Endpoint, EndpointKind, Resource, SessionCost};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanOptions {
    /// Power limit as a fraction of the summed module test power. `None`, or
    /// any fraction of at least one, leaves the plan unconstrained.
    pub power_fraction: Option<PowerFraction>,
    /// Only the first `processors_reused` processors (by id) act as endpoints.
    pub processors_reused: usize,
    pub exclusive_links: bool,
    /// Put processor self-tests ahead of all cores in the test order.
    pub processor_first: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            power_fraction: None,
            processors_reused: 0,
            exclusive_links: true,
            processor_first: true,
        }
    }
}

impl PlanOptions {
    pub fn reuse_all(sys: &SystemDescription) -> Self {
        Self {
            processors_reused: sys.processors.len(),
            ..Self::default()
        }
    }

    pub fn with_processors(mut self, k: usize) -> Self {
        self.processors_reused = k;
        self
    }

    pub fn with_power_fraction(mut self, f: Option<PowerFraction>) -> Self {
        self.power_fraction = f;
        self
    }

    pub fn with_exclusive_links(mut self, on: bool) -> Self {
        self.exclusive_links = on;
        self
    }

    /// Effective budget in power units, `None` when unconstrained.
    pub fn budget(&self, sys: &SystemDescription) -> Option<u64> {
        match self.power_fraction {
            Some(f) if !f.is_at_least_one() => Some(power_budget(sys, f)),
            _ => None,
        }
    }
}

/// One scheduled test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestSession {
    pub cut_id: u32,
    pub source: Endpoint,
    pub sink: Endpoint,
    pub start: u64,
    pub end: u64,
    pub power: u64,
    pub inbound_path: Path,
    pub outbound_path: Path,
}

impl TestSession {
    pub fn links(&self) -> BTreeSet<Link> {
        self.inbound_path
            .links()
            .chain(self.outbound_path.links())
            .collect()
    }

    pub fn resources(&self) -> Vec<Resource> {
        let (a, b) = (self.source.resource(), self.sink.resource());
        if a == b {
            vec![a]
        } else {
            vec![a, b]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Schedule {
    /// Sorted by start time, then CUT id.
    pub sessions: Vec<TestSession>,
    pub makespan: u64,
    pub budget: Option<u64>,
}

impl Schedule {
    pub fn from_sessions(mut sessions: Vec<TestSession>, budget: Option<u64>) -> Self {
        sessions.sort_by_key(|s| (s.start, s.cut_id));
        let makespan = sessions.iter().map(|s| s.end).max().unwrap_or(0);
        Self {
            sessions,
            makespan,
            budget,
        }
    }

    pub fn peak_power(&self) -> u64 {
        power_profile(self).iter().map(|&(_, p)| p).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfeasibleReason {
    NoEndpoints,
    OverBudget { cheapest: u64, budget: u64 },
    Stalled { at: u64 },
}

impl fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfeasibleReason::NoEndpoints => f.write_str("no role-valid source/sink pair"),
            InfeasibleReason::OverBudget { cheapest, budget } => write!(
                f,
                "cheapest session draws {cheapest} power units, budget is {budget}"
            ),
            InfeasibleReason::Stalled { at } => {
                write!(f, "no feasible session with the system idle at cycle {at}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("processors_reused is {requested} but the system has {available} processors")]
    TooManyProcessors { requested: usize, available: usize },
    #[error("infeasible: module {module}: {reason}")]
    Infeasible { module: u32, reason: InfeasibleReason },
}

/// A priced (source, sink) assignment for one module.
#[derive(Clone, Debug)]
pub(crate) struct Candidate {
    pub source: Endpoint,
    pub sink: Endpoint,
    pub cost: SessionCost,
    pub links: BTreeSet<Link>,
    pub hops: u64,
}

impl Candidate {
    pub fn resources(&self) -> (Resource, Resource) {
        (self.source.resource(), self.sink.resource())
    }

    pub fn session(&self, cut_id: u32, start: u64) -> TestSession {
        TestSession {
            cut_id,
            source: self.source,
            sink: self.sink,
            start,
            end: start + self.cost.duration,
            power: self.cost.power,
            inbound_path: self.cost.inbound_path.clone(),
            outbound_path: self.cost.outbound_path.clone(),
        }
    }
}

/// Everything about an instance that does not change while planning.
pub(crate) struct Prepared {
    /// Modules in test order.
    pub modules: Vec<Cut>,
    /// Per module, candidates in static order (hops, then endpoint ids).
    pub candidates: Vec<Vec<Candidate>>,
    pub budget: Option<u64>,
    pub exclusive_links: bool,
    /// Processor id -> module index of its pending self-test.
    pub self_tests: BTreeMap<u32, usize>,
}

fn kind_rank(kind: EndpointKind) -> u8 {
    match kind {
        EndpointKind::ExternalIn | EndpointKind::ExternalOut => 0,
        EndpointKind::Processor => 1,
    }
}

pub(crate) fn prepare(sys: &SystemDescription, opts: &PlanOptions) -> Result<Prepared, PlanError> {
    if opts.processors_reused > sys.processors.len() {
        return Err(PlanError::TooManyProcessors {
            requested: opts.processors_reused,
            available: sys.processors.len(),
        });
    }
    let reused: Vec<Endpoint> = sys
        .processors_by_id()
        .into_iter()
        .take(opts.processors_reused)
        .map(Endpoint::processor)
        .collect();
    let ports = sys.io_ports.iter().map(Endpoint::port);
    let pool: Vec<Endpoint> = ports.chain(reused).collect();
    let sources: Vec<Endpoint> = pool.iter().copied().filter(Endpoint::can_source).collect();
    let sinks: Vec<Endpoint> = pool.iter().copied().filter(Endpoint::can_sink).collect();

    let mut cpus: Vec<(bool, (u64, u32), Cut)> = sys
        .processors
        .iter()
        .filter(|p| !p.self_test.is_empty())
        .map(|p| (true, priority_key(sys, p.id, p.position), Cut::processor_self_test(p)))
        .collect();
    let cores = sys
        .cores
        .iter()
        .filter(|c| c.pattern_count > 0)
        .map(|c| (false, priority_key(sys, c.id, c.position), Cut::core(c)));
    cpus.extend(cores);
    if opts.processor_first {
        cpus.sort_by_key(|&(is_cpu, key, _)| (!is_cpu, key));
    } else {
        cpus.sort_by_key(|&(_, key, _)| key);
    }
    let modules: Vec<Cut> = cpus.into_iter().map(|(_, _, cut)| cut).collect();

    let mut candidates = Vec::with_capacity(modules.len());
    for cut in &modules {
        let mut list = Vec::new();
        for src in &sources {
            for snk in &sinks {
                let serves_itself = cut.is_processor
                    && [src, snk]
                        .iter()
                        .any(|e| e.kind == EndpointKind::Processor && e.ref_id == cut.id);
                if serves_itself {
                    continue;
                }
                let cost = session_cost(&sys.noc, cut, src, snk)
                    .expect("pool endpoints are role-valid and on the grid");
                let hops = cost.inbound_path.hops() + cost.outbound_path.hops();
                list.push(Candidate {
                    source: *src,
                    sink: *snk,
                    links: cost.links(),
                    cost,
                    hops,
                });
            }
        }
        list.sort_by_key(|c| {
            (
                c.hops,
                c.source.ref_id,
                c.sink.ref_id,
                kind_rank(c.source.kind),
                kind_rank(c.sink.kind),
            )
        });
        candidates.push(list);
    }

    let budget = opts.budget(sys);
    for (cut, list) in modules.iter().zip(&candidates) {
        let Some(cheapest) = list.iter().map(|c| c.cost.power).min() else {
            return Err(PlanError::Infeasible {
                module: cut.id,
                reason: InfeasibleReason::NoEndpoints,
            });
        };
        if let Some(budget) = budget {
            if cheapest > budget {
                return Err(PlanError::Infeasible {
                    module: cut.id,
                    reason: InfeasibleReason::OverBudget { cheapest, budget },
                });
            }
        }
    }

    let self_tests = modules
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_processor)
        .map(|(i, c)| (c.id, i))
        .collect();

    Ok(Prepared {
        modules,
        candidates,
        budget,
        exclusive_links: opts.exclusive_links,
        self_tests,
    })
}

struct Active {
    end: u64,
    power: u64,
    resources: (Resource, Resource),
    links: BTreeSet<Link>,
}

/// Greedy plan of the whole system.
pub fn plan(sys: &SystemDescription, opts: &PlanOptions) -> Result<Schedule, PlanError> {
    let prep = prepare(sys, opts)?;
    let n = prep.modules.len();

    // Resource -> cycle it became free. Processors awaiting their own test are absent.
    let mut free_since: BTreeMap<Resource, u64> = BTreeMap::new();
    for port in &sys.io_ports {
        free_since.insert(Resource::Port(port.id), 0);
    }
    for cpu in &sys.processors {
        if !prep.self_tests.contains_key(&cpu.id) {
            free_since.insert(Resource::Processor(cpu.id), 0);
        }
    }
    let mut busy: HashSet<Resource> = HashSet::new();
    let mut occupied_links: HashSet<Link> = HashSet::new();
    let mut active: Vec<Active> = Vec::new();
    let mut running_power = 0u64;
    let mut done = vec![false; n];
    let mut remaining = n;
    let mut sessions = Vec::with_capacity(n);
    let mut events: BTreeSet<u64> = BTreeSet::from([0]);
    // processor id -> end of its self-test once scheduled
    let mut self_test_end: BTreeMap<u32, u64> = BTreeMap::new();

    while remaining > 0 {
        let Some(t) = events.pop_first() else {
            let module = (0..n).find(|&i| !done[i]).map(|i| prep.modules[i].id);
            let at = sessions.iter().map(|s: &TestSession| s.end).max().unwrap_or(0);
            return Err(PlanError::Infeasible {
                module: module.expect("remaining > 0"),
                reason: InfeasibleReason::Stalled { at },
            });
        };

        active.retain(|a| {
            if a.end > t {
                return true;
            }
            running_power -= a.power;
            for r in [a.resources.0, a.resources.1] {
                busy.remove(&r);
                free_since.insert(r, a.end);
            }
            for l in &a.links {
                occupied_links.remove(l);
            }
            false
        });
        for (&cpu, &end) in &self_test_end {
            if end <= t {
                free_since.entry(Resource::Processor(cpu)).or_insert(end);
            }
        }

        for i in 0..n {
            if done[i] {
                continue;
            }
            let available = |r: &Resource| -> Option<u64> {
                if busy.contains(r) {
                    None
                } else {
                    free_since.get(r).copied()
                }
            };
            let mut ready: Vec<(u64, &Candidate)> = prep.candidates[i]
                .iter()
                .filter_map(|c| {
                    let (a, b) = c.resources();
                    Some((available(&a)?.max(available(&b)?), c))
                })
                .collect();
            // stable: equal free-since keeps the static order
            ready.sort_by_key(|&(since, _)| since);
            let chosen = ready.into_iter().map(|(_, c)| c).find(|c| {
                let power_ok = prep
                    .budget
                    .is_none_or(|b| running_power + c.cost.power <= b);
                let links_ok =
                    !prep.exclusive_links || c.links.iter().all(|l| !occupied_links.contains(l));
                power_ok && links_ok
            });
            let Some(c) = chosen else { continue };

            let session = c.session(prep.modules[i].id, t);
            let (a, b) = c.resources();
            busy.insert(a);
            busy.insert(b);
            if prep.exclusive_links {
                occupied_links.extend(c.links.iter().copied());
            }
            running_power += c.cost.power;
            active.push(Active {
                end: session.end,
                power: c.cost.power,
                resources: (a, b),
                links: c.links.clone(),
            });
            events.insert(session.end);
            if prep.modules[i].is_processor {
                self_test_end.insert(prep.modules[i].id, session.end);
                events.insert(session.end);
            }
            done[i] = true;
            remaining -= 1;
            sessions.push(session);
        }

        if remaining > 0 && active.is_empty() && events.is_empty() {
            let module = (0..n).find(|&i| !done[i]).expect("remaining > 0");
            return Err(PlanError::Infeasible {
                module: prep.modules[module].id,
                reason: InfeasibleReason::Stalled { at: t },
            });
        }
    }

    Ok(Schedule::from_sessions(sessions, prep.budget))
}

/// Right-open step function of total drawn power, one point per change,
/// starting at cycle 0 and ending with the drop to 0 at the makespan.
pub fn power_profile(sched: &Schedule) -> Vec<(u64, u64)> {
    let mut deltas: BTreeMap<u64, i128> = BTreeMap::new();
    deltas.insert(0, 0);
    for s in &sched.sessions {
        if s.end == s.start {
            continue;
        }
        *deltas.entry(s.start).or_default() += i128::from(s.power);
        *deltas.entry(s.end).or_default() -= i128::from(s.power);
    }
    let mut level = 0i128;
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(deltas.len());
    for (t, d) in deltas {
        level += d;
        let p = level as u64;
        if out.last().is_some_and(|&(_, prev)| prev == p) {
            continue;
        }
        out.push((t, p));
    }
    out
}
