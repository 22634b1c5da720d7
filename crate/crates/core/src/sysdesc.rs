//! Planning-instance data model and the native JSON description format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fraction::PowerFraction;
use crate::locate;
pub use crate::noc::{NocConfig, Position};

pub const FORMAT_VERSION: u32 = 1;

/// Test requirements of one module as delivered by its provider.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestProfile {
    pub pattern_count: u64,
    pub stim_flits_per_pattern: u64,
    pub resp_flits_per_pattern: u64,
    pub apply_cycles_per_pattern: u64,
    pub test_power: u64,
}

impl TestProfile {
    pub fn is_empty(&self) -> bool {
        self.pattern_count == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoreSpec {
    pub id: u32,
    pub name: String,
    pub position: Position,
    pub pattern_count: u64,
    pub stim_flits_per_pattern: u64,
    pub resp_flits_per_pattern: u64,
    pub apply_cycles_per_pattern: u64,
    pub test_power: u64,
}

impl CoreSpec {
    pub fn profile(&self) -> TestProfile {
        TestProfile {
            pattern_count: self.pattern_count,
            stim_flits_per_pattern: self.stim_flits_per_pattern,
            resp_flits_per_pattern: self.resp_flits_per_pattern,
            apply_cycles_per_pattern: self.apply_cycles_per_pattern,
            test_power: self.test_power,
        }
    }
}

fn default_gen_cycles() -> u64 {
    10
}

/// An embedded processor that can be reused as a test source or sink once
/// its own test has completed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessorSpec {
    pub id: u32,
    pub name: String,
    pub position: Position,
    /// Cycles the test program spends generating one pattern.
    #[serde(default = "default_gen_cycles")]
    pub gen_cycles_per_pattern: u64,
    /// Power drawn while the test program runs.
    pub bist_power: u64,
    /// Program memory footprint. Reported, never checked.
    pub memory_kb: u64,
    /// The processor's own test. Zero patterns means it is usable from cycle 0.
    pub self_test: TestProfile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PortDirection {
    Input,
    Output,
}

/// Off-chip tester link attached to a router.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoPort {
    pub id: u32,
    pub position: Position,
    pub direction: PortDirection,
}

/// A complete planning instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDescription {
    pub noc: NocConfig,
    pub cores: Vec<CoreSpec>,
    pub processors: Vec<ProcessorSpec>,
    pub io_ports: Vec<IoPort>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format_version: u32,
    noc: NocConfig,
    cores: Vec<CoreSpec>,
    processors: Vec<ProcessorSpec>,
    io_ports: Vec<IoPort>,
}

/// Semantic problem with a description; `field` is a path such as `cores[1].position`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    pub field: String,
    pub message: String,
    pub line: Option<usize>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)?;
        if let Some(line) = self.line {
            write!(f, " (line {line})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(#[from] ValidationError),
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ValidationError {
    ValidationError {
        field: field.into(),
        message: message.into(),
        line: None,
    }
}

/// Parses and fully validates a native-format description.
pub fn load_system(document: &str) -> Result<SystemDescription, LoadError> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let doc: Document = match serde_path_to_error::deserialize(de) {
        Ok(doc) => doc,
        Err(e) => {
            let path = e.path().to_string();
            let inner = e.into_inner();
            return Err(match inner.classify() {
                serde_json::error::Category::Data => LoadError::Validation(ValidationError {
                    field: if path == "." { "<document>".into() } else { path },
                    message: strip_position(&inner.to_string()),
                    line: Some(inner.line()),
                }),
                _ => LoadError::Syntax {
                    line: inner.line(),
                    column: inner.column(),
                    message: strip_position(&inner.to_string()),
                },
            });
        }
    };
    if doc.format_version != FORMAT_VERSION {
        let mut err = invalid(
            "format_version",
            format!("unsupported format version {} (expected {FORMAT_VERSION})", doc.format_version),
        );
        err.line = locate::line_of(document, "format_version");
        return Err(err.into());
    }
    let sys = SystemDescription {
        noc: doc.noc,
        cores: doc.cores,
        processors: doc.processors,
        io_ports: doc.io_ports,
    };
    sys.validate().map_err(|mut e| {
        e.line = locate::line_of(document, &e.field);
        LoadError::Validation(e)
    })?;
    Ok(sys)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

impl SystemDescription {
    /// Native-format JSON, pretty printed with a trailing newline.
    pub fn to_json(&self) -> String {
        let doc = Document {
            format_version: FORMAT_VERSION,
            noc: self.noc.clone(),
            cores: self.cores.clone(),
            processors: self.processors.clone(),
            io_ports: self.io_ports.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("description serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let noc = &self.noc;
        for (name, ok) in [
            ("noc.rows", noc.rows >= 1),
            ("noc.cols", noc.cols >= 1),
            ("noc.flit_width_bits", noc.flit_width_bits >= 1),
            ("noc.flow_control_latency", noc.flow_control_latency >= 1),
            ("noc.header_flits", noc.header_flits >= 1),
        ] {
            if !ok {
                return Err(invalid(name, "must be at least 1"));
            }
        }

        let modules = self
            .cores
            .iter()
            .enumerate()
            .map(|(i, c)| (format!("cores[{i}]"), c.id, c.position, c.profile()))
            .chain(
                self.processors
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (format!("processors[{i}]"), p.id, p.position, p.self_test)),
            );

        let mut ids = BTreeMap::new();
        let mut positions = BTreeMap::new();
        for (field, id, pos, profile) in modules {
            if !noc.contains(pos) {
                return Err(invalid(
                    format!("{field}.position"),
                    format!("position out of grid: {pos} on a {}x{} grid", noc.rows, noc.cols),
                ));
            }
            if let Some(prev) = ids.insert(id, field.clone()) {
                return Err(invalid(
                    format!("{field}.id"),
                    format!("duplicate id {id} (also used by {prev})"),
                ));
            }
            if let Some(prev) = positions.insert(pos, field.clone()) {
                return Err(invalid(
                    format!("{field}.position"),
                    format!("duplicate position {pos} (also used by {prev})"),
                ));
            }
            if profile.pattern_count > 0
                && profile.stim_flits_per_pattern
                    + profile.resp_flits_per_pattern
                    + profile.apply_cycles_per_pattern
                    == 0
            {
                let prefix = if field.starts_with("processors") {
                    format!("{field}.self_test")
                } else {
                    field
                };
                return Err(invalid(
                    format!("{prefix}.pattern_count"),
                    "patterns present but no flits or apply cycles per pattern",
                ));
            }
        }

        let mut port_ids = BTreeSet::new();
        for (i, port) in self.io_ports.iter().enumerate() {
            if !noc.contains(port.position) {
                return Err(invalid(
                    format!("io_ports[{i}].position"),
                    format!(
                        "position out of grid: {} on a {}x{} grid",
                        port.position, noc.rows, noc.cols
                    ),
                ));
            }
            if !port_ids.insert(port.id) {
                return Err(invalid(
                    format!("io_ports[{i}].id"),
                    format!("duplicate port id {}", port.id),
                ));
            }
        }
        for dir in [PortDirection::Input, PortDirection::Output] {
            if !self.io_ports.iter().any(|p| p.direction == dir) {
                return Err(invalid(
                    "io_ports",
                    format!("missing {} port", if dir == PortDirection::Input { "INPUT" } else { "OUTPUT" }),
                ));
            }
        }
        Ok(())
    }

    /// Sum of the test power of every core and every processor self-test.
    pub fn total_test_power(&self) -> u64 {
        self.cores.iter().map(|c| c.test_power).sum::<u64>()
            + self.processors.iter().map(|p| p.self_test.test_power).sum::<u64>()
    }

    pub fn core(&self, id: u32) -> Option<&CoreSpec> {
        self.cores.iter().find(|c| c.id == id)
    }

    pub fn processor(&self, id: u32) -> Option<&ProcessorSpec> {
        self.processors.iter().find(|p| p.id == id)
    }

    pub fn port(&self, id: u32) -> Option<&IoPort> {
        self.io_ports.iter().find(|p| p.id == id)
    }

    /// Processors ordered by id; the planner reuses a prefix of this list.
    pub fn processors_by_id(&self) -> Vec<&ProcessorSpec> {
        let mut v: Vec<_> = self.processors.iter().collect();
        v.sort_by_key(|p| p.id);
        v
    }
}

/// Power limit: `floor(fraction * total_test_power)`.
pub fn power_budget(sys: &SystemDescription, fraction: PowerFraction) -> u64 {
    fraction.floor_of(sys.total_test_power())
}

/// Ordering key of a module: fewest hops to any IO port or other processor,
/// then lowest id. Smaller keys are tested first.
pub fn priority_key(sys: &SystemDescription, module_id: u32, position: Position) -> (u64, u32) {
    let ports = sys.io_ports.iter().map(|p| p.position);
    let cpus = sys
        .processors
        .iter()
        .filter(|p| p.id != module_id)
        .map(|p| p.position);
    let hops = ports
        .chain(cpus)
        .map(|t| t.manhattan(position))
        .min()
        .unwrap_or_else(|| sys.noc.diameter());
    (hops, module_id)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"{
  "format_version": 1,
  "noc": {
    "rows": 1, "cols": 2, "flit_width_bits": 32,
    "routing_latency": 2, "flow_control_latency": 1,
    "header_flits": 1, "router_transport_power": 0
  },
  "cores": [
    {"id": 1, "name": "c1", "position": [1, 0], "pattern_count": 2,
     "stim_flits_per_pattern": 4, "resp_flits_per_pattern": 2,
     "apply_cycles_per_pattern": 10, "test_power": 30}
  ],
  "processors": [],
  "io_ports": [
    {"id": 0, "position": [0, 0], "direction": "INPUT"},
    {"id": 1, "position": [0, 0], "direction": "OUTPUT"}
  ]
}"#;

    fn validation(doc: &str) -> ValidationError {
        match load_system(doc) {
            Err(LoadError::Validation(e)) => e,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn loads_minimal() {
        let sys = load_system(MINIMAL).unwrap();
        assert_eq!(sys.cores.len(), 1);
        assert!(sys.processors.is_empty());
        assert_eq!(sys.io_ports.len(), 2);
        assert_eq!(sys.cores[0].position, Position::new(1, 0));
    }

    #[test]
    fn rejects_off_grid() {
        let e = validation(&MINIMAL.replace("[1, 0]", "[5, 0]"));
        assert_eq!(e.field, "cores[0].position");
        assert!(e.message.contains("position out of grid"));
        assert_eq!(e.line, Some(9));
    }

    #[test]
    fn rejects_duplicate_position() {
        let doc = MINIMAL.replace(
            r#""processors": []"#,
            r#""processors": [{"id": 7, "name": "cpu", "position": [1, 0],
              "bist_power": 1, "memory_kb": 4, "self_test": {"pattern_count": 0,
              "stim_flits_per_pattern": 0, "resp_flits_per_pattern": 0,
              "apply_cycles_per_pattern": 0, "test_power": 0}}]"#,
        );
        let e = validation(&doc);
        assert_eq!(e.field, "processors[0].position");
        assert!(e.message.contains("duplicate position"));
    }

    #[test]
    fn rejects_duplicate_id_and_missing_port() {
        let doc = MINIMAL.replace(
            r#""processors": []"#,
            r#""processors": [{"id": 1, "name": "cpu", "position": [0, 0],
              "bist_power": 1, "memory_kb": 4, "self_test": {"pattern_count": 0,
              "stim_flits_per_pattern": 0, "resp_flits_per_pattern": 0,
              "apply_cycles_per_pattern": 0, "test_power": 0}}]"#,
        );
        assert!(validation(&doc).message.contains("duplicate id"));

        let doc = MINIMAL.replace(r#""direction": "OUTPUT""#, r#""direction": "INPUT""#);
        let e = validation(&doc);
        assert_eq!(e.field, "io_ports");
        assert!(e.message.contains("OUTPUT"));
    }

    #[test]
    fn unknown_keys_are_validation_errors() {
        let doc = MINIMAL.replace(r#""name": "c1","#, r#""name": "c1", "colour": 3,"#);
        let e = validation(&doc);
        assert!(e.message.contains("colour"), "{e}");
        assert!(e.field.starts_with("cores[0]"), "{e}");
    }

    #[test]
    fn version_is_required() {
        let e = validation(&MINIMAL.replace("\"format_version\": 1,", ""));
        assert!(e.message.contains("format_version"));
        let e = validation(&MINIMAL.replace("\"format_version\": 1", "\"format_version\": 2"));
        assert_eq!(e.field, "format_version");
    }

    #[test]
    fn syntax_errors_carry_position() {
        match load_system("{\n  \"format_version\": 1,,\n}") {
            Err(LoadError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_profile_rejected() {
        let doc = MINIMAL
            .replace("\"stim_flits_per_pattern\": 4", "\"stim_flits_per_pattern\": 0")
            .replace("\"resp_flits_per_pattern\": 2", "\"resp_flits_per_pattern\": 0")
            .replace("\"apply_cycles_per_pattern\": 10", "\"apply_cycles_per_pattern\": 0");
        assert_eq!(validation(&doc).field, "cores[0].pattern_count");
    }

    #[test]
    fn serialization_round_trips() {
        let sys = load_system(MINIMAL).unwrap();
        assert_eq!(load_system(&sys.to_json()).unwrap(), sys);
    }

    fn with_powers(powers: &[u64]) -> SystemDescription {
        let mut sys = load_system(MINIMAL).unwrap();
        sys.noc.rows = 4;
        sys.noc.cols = 4;
        sys.cores = powers
            .iter()
            .enumerate()
            .map(|(i, &p)| CoreSpec {
                id: i as u32,
                name: format!("c{i}"),
                position: Position::new(i as u32, 1),
                test_power: p,
                ..sys.cores[0].clone()
            })
            .collect();
        sys
    }

    #[test]
    fn budget_examples() {
        let sys = with_powers(&[30, 50, 20]);
        assert_eq!(power_budget(&sys, PowerFraction::new(1, 2)), 50);
        assert_eq!(power_budget(&sys, PowerFraction::ONE), 100);
        assert_eq!(power_budget(&sys, PowerFraction::ZERO), 0);
    }

    #[test]
    fn priority_examples() {
        let mut sys = with_powers(&[1, 1, 1]);
        sys.noc.rows = 1;
        sys.cores.truncate(1);
        sys.cores[0].position = Position::new(2, 0);
        sys.io_ports.retain(|p| p.direction == PortDirection::Input);
        sys.processors.push(ProcessorSpec {
            id: 9,
            name: "cpu".into(),
            position: Position::new(3, 0),
            gen_cycles_per_pattern: 10,
            bist_power: 0,
            memory_kb: 0,
            self_test: TestProfile::default(),
        });
        assert_eq!(priority_key(&sys, 0, Position::new(2, 0)), (1, 0));
        assert_eq!(priority_key(&sys, 0, Position::new(0, 0)), (0, 0));
        // a processor's own router does not count for itself
        assert_eq!(priority_key(&sys, 9, Position::new(3, 0)), (3, 9));

        let mut keys = [priority_key(&sys, 7, Position::new(2, 0)), priority_key(&sys, 4, Position::new(2, 0))];
        keys.sort();
        assert_eq!(keys[0].1, 4);
    }
}
