//! Exhaustive branch-and-bound scheduler for small instances.
//!
//! Sessions are placed in chronological order. At each decision time the
//! search either starts one more module (in test order, never revisiting a
//! lower index at the same time) or advances to the next session end. Only
//! starts at cycle 0 or at some session end are explored; with constant
//! session power, exclusive endpoints and links, and no preemption, every
//! feasible schedule can be left-shifted onto those instants without
//! growing its makespan. Candidate and module order follow the greedy
//! planner, so the first leaf reached is the greedy schedule.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::noc::Link;
use crate::scheduler::{plan, prepare, Candidate, PlanError, PlanOptions, Prepared, Schedule};
use crate::sysdesc::SystemDescription;
use crate::test_model::Resource;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_modules: usize,
    pub max_nodes: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_modules: 6,
            max_nodes: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{modules} modules to test exceed the oracle limit of {limit}")]
    TooLarge { modules: usize, limit: usize },
    #[error("search node budget of {nodes} exhausted before any complete schedule was found")]
    BudgetExhausted { nodes: u64 },
    #[error("no feasible schedule exists")]
    Infeasible,
    #[error(transparent)]
    Plan(#[from] PlanError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    pub schedule: Schedule,
    /// False when the node budget ran out; the schedule is then the best found.
    pub exact: bool,
    pub nodes: u64,
}

#[derive(Clone)]
struct State {
    t: u64,
    /// Module index -> (candidate index, start).
    placed: Vec<Option<(usize, u64)>>,
    free_at: BTreeMap<Resource, u64>,
    /// (end, power, module) of sessions still running after `t`.
    active: Vec<(u64, u64, usize)>,
    max_end: u64,
}

/// Per module, the chosen candidate index and start time.
type Assignment = Vec<Option<(usize, u64)>>;

struct Search<'a> {
    prep: &'a Prepared,
    min_duration: Vec<u64>,
    limit: u64,
    nodes: u64,
    aborted: bool,
    best: Option<(u64, Assignment)>,
}

impl Search<'_> {
    fn lower_bound(&self, s: &State) -> u64 {
        let pending = s
            .placed
            .iter()
            .zip(&self.min_duration)
            .filter(|(p, _)| p.is_none())
            .map(|(_, d)| s.t + d)
            .max()
            .unwrap_or(0);
        s.max_end.max(pending)
    }

    fn feasible(&self, s: &State, c: &Candidate) -> bool {
        let (a, b) = c.resources();
        let free = |r: &Resource| s.free_at.get(r).is_some_and(|&f| f <= s.t);
        if !free(&a) || !free(&b) {
            return false;
        }
        if let Some(budget) = self.prep.budget {
            let running: u64 = s.active.iter().map(|&(_, p, _)| p).sum();
            if running + c.cost.power > budget {
                return false;
            }
        }
        if self.prep.exclusive_links {
            let busy: HashSet<&Link> = s
                .active
                .iter()
                .flat_map(|&(_, _, m)| {
                    let (ci, _) = s.placed[m].expect("active sessions are placed");
                    self.prep.candidates[m][ci].links.iter()
                })
                .collect();
            if c.links.iter().any(|l| busy.contains(l)) {
                return false;
            }
        }
        true
    }

    fn dfs(&mut self, s: &State, min_index: usize) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
            return;
        }
        if s.placed.iter().all(Option::is_some) {
            if self.best.as_ref().is_none_or(|(b, _)| s.max_end < *b) {
                self.best = Some((s.max_end, s.placed.clone()));
            }
            return;
        }
        if self.best.as_ref().is_some_and(|(b, _)| self.lower_bound(s) >= *b) {
            return;
        }

        for m in min_index..s.placed.len() {
            if s.placed[m].is_some() {
                continue;
            }
            let mut order: Vec<(u64, usize)> = self.prep.candidates[m]
                .iter()
                .enumerate()
                .filter(|(_, c)| self.feasible(s, c))
                .map(|(i, c)| {
                    let (a, b) = c.resources();
                    (s.free_at[&a].max(s.free_at[&b]), i)
                })
                .collect();
            order.sort_by_key(|&(since, _)| since);
            for (_, ci) in order {
                let c = &self.prep.candidates[m][ci];
                let end = s.t + c.cost.duration;
                let mut next = s.clone();
                next.placed[m] = Some((ci, s.t));
                let (a, b) = c.resources();
                next.free_at.insert(a, end);
                next.free_at.insert(b, end);
                let cut = &self.prep.modules[m];
                if cut.is_processor {
                    next.free_at.insert(Resource::Processor(cut.id), end);
                }
                next.active.push((end, c.cost.power, m));
                next.max_end = next.max_end.max(end);
                self.dfs(&next, m + 1);
                if self.aborted {
                    return;
                }
            }
        }

        let Some(t_next) = s.active.iter().map(|&(e, _, _)| e).filter(|&e| e > s.t).min() else {
            return;
        };
        let mut next = s.clone();
        next.t = t_next;
        next.active.retain(|&(e, _, _)| e > t_next);
        self.dfs(&next, 0);
    }
}

/// Minimum-makespan schedule under the same rules as [`plan`].
pub fn optimal_plan(
    sys: &SystemDescription,
    opts: &PlanOptions,
    limits: OracleLimits,
) -> Result<OracleOutcome, OracleError> {
    let prep = prepare(sys, opts)?;
    let n = prep.modules.len();
    if n > limits.max_modules {
        return Err(OracleError::TooLarge {
            modules: n,
            limit: limits.max_modules,
        });
    }
    let mut free_at = BTreeMap::new();
    for port in &sys.io_ports {
        free_at.insert(Resource::Port(port.id), 0);
    }
    for cpu in &sys.processors {
        if !prep.self_tests.contains_key(&cpu.id) {
            free_at.insert(Resource::Processor(cpu.id), 0);
        }
    }
    let min_duration = prep
        .candidates
        .iter()
        .map(|cs| cs.iter().map(|c| c.cost.duration).min().unwrap_or(0))
        .collect();
    let mut search = Search {
        prep: &prep,
        min_duration,
        limit: limits.max_nodes,
        nodes: 0,
        aborted: false,
        best: None,
    };
    let root = State {
        t: 0,
        placed: vec![None; n],
        free_at,
        active: Vec::new(),
        max_end: 0,
    };
    search.dfs(&root, 0);

    let nodes = search.nodes;
    let exact = !search.aborted;
    let Some((_, placed)) = search.best else {
        return Err(if exact {
            OracleError::Infeasible
        } else {
            OracleError::BudgetExhausted { nodes }
        });
    };
    let sessions = placed
        .into_iter()
        .enumerate()
        .map(|(m, p)| {
            let (ci, start) = p.expect("complete leaf");
            prep.candidates[m][ci].session(prep.modules[m].id, start)
        })
        .collect();
    Ok(OracleOutcome {
        schedule: Schedule::from_sessions(sessions, prep.budget),
        exact,
        nodes,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub greedy: Schedule,
    pub optimal: OracleOutcome,
    /// greedy / optimal makespan; 1.0 when both are zero.
    pub gap: f64,
}

pub fn compare(
    sys: &SystemDescription,
    opts: &PlanOptions,
    limits: OracleLimits,
) -> Result<Comparison, OracleError> {
    let optimal = optimal_plan(sys, opts, limits)?;
    let greedy = plan(sys, opts)?;
    let gap = if optimal.schedule.makespan == 0 {
        1.0
    } else {
        greedy.makespan as f64 / optimal.schedule.makespan as f64
    };
    Ok(Comparison {
        greedy,
        optimal,
        gap,
    })
}
