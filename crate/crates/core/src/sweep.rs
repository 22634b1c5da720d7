//! Makespan sweeps over reused-processor counts and power limits.

use std::fmt::Write;

use thiserror::Error;

use crate::fraction::PowerFraction;
use crate::scheduler::{plan, PlanError, PlanOptions};
use crate::sysdesc::SystemDescription;

pub const SWEEP_HEADER: &str = "processors,power_fraction,makespan,peak_power,feasible";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepSpec {
    pub processor_counts: Vec<usize>,
    /// `None` is the unconstrained cell.
    pub power_fractions: Vec<Option<PowerFraction>>,
    /// Options shared by every cell; `processors_reused` and `power_fraction` are overridden.
    pub base: PlanOptions,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("the processor count list is empty")]
    NoProcessorCounts,
    #[error("the power fraction list is empty")]
    NoFractions,
    #[error("processor count {requested} exceeds the {available} processors in the system")]
    TooManyProcessors { requested: usize, available: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub processors: usize,
    pub power_fraction: Option<PowerFraction>,
    /// `(makespan, peak_power)`, or why the cell is infeasible.
    pub outcome: Result<(u64, u64), PlanError>,
}

impl SweepSpec {
    /// Cells in output order: processor counts outer, fractions inner.
    pub fn cells(&self, sys: &SystemDescription) -> Result<Vec<PlanOptions>, SweepError> {
        if self.processor_counts.is_empty() {
            return Err(SweepError::NoProcessorCounts);
        }
        if self.power_fractions.is_empty() {
            return Err(SweepError::NoFractions);
        }
        if let Some(&k) = self.processor_counts.iter().find(|&&k| k > sys.processors.len()) {
            return Err(SweepError::TooManyProcessors {
                requested: k,
                available: sys.processors.len(),
            });
        }
        Ok(self
            .processor_counts
            .iter()
            .flat_map(|&k| {
                self.power_fractions.iter().map(move |&f| {
                    self.base.clone().with_processors(k).with_power_fraction(f)
                })
            })
            .collect())
    }
}

pub fn run_cell(sys: &SystemDescription, opts: &PlanOptions) -> SweepRow {
    SweepRow {
        processors: opts.processors_reused,
        power_fraction: opts.power_fraction,
        outcome: plan(sys, opts).map(|s| (s.makespan, s.peak_power())),
    }
}

/// Runs every cell in order on the calling thread.
pub fn sweep(sys: &SystemDescription, spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    Ok(spec.cells(sys)?.iter().map(|o| run_cell(sys, o)).collect())
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let f = r.power_fraction.map_or_else(|| "none".to_string(), |f| f.to_string());
        match &r.outcome {
            Ok((makespan, peak)) => {
                let _ = writeln!(out, "{},{f},{makespan},{peak},true", r.processors);
            }
            Err(_) => {
                let _ = writeln!(out, "{},{f},,,false", r.processors);
            }
        }
    }
    out
}
