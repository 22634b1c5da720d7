//! Test planning for network-on-chip based systems-on-chip.
//!
//! Cores are tested through the on-chip network from external tester ports
//! or from embedded processors reused as pattern sources and response sinks
//! once they have passed their own test. The planner is greedy and
//! event-driven, honours a global power budget, and ships with an
//! independent validator and an exhaustive oracle for small instances.

pub mod fraction;
mod locate;
pub mod noc;
pub mod oracle;
pub mod report;
pub mod scheduler;
pub mod sweep;
pub mod synthetic;
pub mod sysdesc;
pub mod test_model;
pub mod validate;

/// Bundled planning instances.
pub mod fixtures {
    /// One core next to a co-located tester pair and a pre-tested processor on a 1x2 grid.
    pub const SINGLE_CORE: &str = include_str!("../fixtures/single_core.json");
    /// Two cores in a row sharing one tester pair on a 1x3 grid.
    pub const TWO_CORE: &str = include_str!("../fixtures/two_core.json");
    /// The single-core system with ids arranged so the processor comes first in
    /// candidate order and sources every pattern.
    pub const PROCESSOR_SOURCE: &str = include_str!("../fixtures/processor_source.json");
    /// A processor that is free first but slower than a tester that frees a few cycles later.
    pub const ANOMALY: &str = include_str!("../fixtures/anomaly.json");
    /// Ten cores and six processors filling a 4x4 grid.
    pub const D695_LIKE: &str = include_str!("../fixtures/d695_like.json");

    pub const ALL: [(&str, &str); 5] = [
        ("single_core", SINGLE_CORE),
        ("two_core", TWO_CORE),
        ("processor_source", PROCESSOR_SOURCE),
        ("anomaly", ANOMALY),
        ("d695_like", D695_LIKE),
    ];
}

pub use fraction::PowerFraction;
pub use noc::{packet_latency, path_links, transport_power, xy_path, Link, NocConfig, Path, Position};
pub use oracle::{compare, optimal_plan, Comparison, OracleError, OracleLimits, OracleOutcome};
pub use scheduler::{plan, power_profile, PlanError, PlanOptions, Schedule, TestSession};
pub use synthetic::{generate_synthetic, GenerateError, ProfileRanges, SyntheticSpec};
pub use sysdesc::{
    load_system, power_budget, priority_key, CoreSpec, IoPort, LoadError, PortDirection,
    ProcessorSpec, SystemDescription, TestProfile, ValidationError,
};
pub use test_model::{session_cost, session_duration, session_power, Cut, Endpoint, EndpointKind, SessionCost};
pub use validate::{validate_schedule, Violation};
