//! Duration and power of a single test session: one CUT fed by a source and
//! drained by a sink through the NoC.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::noc::{self, Link, NocConfig, NocError, Path};
use crate::sysdesc::{CoreSpec, IoPort, PortDirection, Position, ProcessorSpec, TestProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EndpointKind {
    ExternalIn,
    ExternalOut,
    Processor,
}

impl EndpointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EndpointKind::ExternalIn => "EXTERNAL_IN",
            EndpointKind::ExternalOut => "EXTERNAL_OUT",
            EndpointKind::Processor => "PROCESSOR",
        }
    }
}

impl fmt::Display for EndpointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A test source or sink. Processor endpoints carry the characterization of
/// their test program; external ones generate and absorb data for free.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Endpoint {
    pub kind: EndpointKind,
    pub ref_id: u32,
    pub position: Position,
    pub gen_cycles_per_pattern: u64,
    pub bist_power: u64,
}

impl Endpoint {
    pub fn port(port: &IoPort) -> Self {
        Self {
            kind: match port.direction {
                PortDirection::Input => EndpointKind::ExternalIn,
                PortDirection::Output => EndpointKind::ExternalOut,
            },
            ref_id: port.id,
            position: port.position,
            gen_cycles_per_pattern: 0,
            bist_power: 0,
        }
    }

    pub fn processor(cpu: &ProcessorSpec) -> Self {
        Self {
            kind: EndpointKind::Processor,
            ref_id: cpu.id,
            position: cpu.position,
            gen_cycles_per_pattern: cpu.gen_cycles_per_pattern,
            bist_power: cpu.bist_power,
        }
    }

    pub fn can_source(&self) -> bool {
        matches!(self.kind, EndpointKind::ExternalIn | EndpointKind::Processor)
    }

    pub fn can_sink(&self) -> bool {
        matches!(self.kind, EndpointKind::ExternalOut | EndpointKind::Processor)
    }

    /// Physical resource held while serving a session. A processor used as
    /// both source and sink is one resource.
    pub fn resource(&self) -> Resource {
        match self.kind {
            EndpointKind::Processor => Resource::Processor(self.ref_id),
            _ => Resource::Port(self.ref_id),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Resource {
    Port(u32),
    Processor(u32),
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resource::Port(id) => write!(f, "port {id}"),
            Resource::Processor(id) => write!(f, "processor {id}"),
        }
    }
}

/// Module under test: a core, or a processor during its own test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cut {
    pub id: u32,
    pub position: Position,
    pub profile: TestProfile,
    pub is_processor: bool,
}

impl Cut {
    pub fn core(core: &CoreSpec) -> Self {
        Self {
            id: core.id,
            position: core.position,
            profile: core.profile(),
            is_processor: false,
        }
    }

    pub fn processor_self_test(cpu: &ProcessorSpec) -> Self {
        Self {
            id: cpu.id,
            position: cpu.position,
            profile: cpu.self_test,
            is_processor: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("{kind} endpoint {id} cannot act as a {role}")]
    Role {
        kind: EndpointKind,
        id: u32,
        role: &'static str,
    },
    #[error(transparent)]
    Noc(#[from] NocError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionCost {
    pub duration: u64,
    pub power: u64,
    pub inbound_path: Path,
    pub outbound_path: Path,
}

impl SessionCost {
    /// Directed links used in either direction.
    pub fn links(&self) -> BTreeSet<Link> {
        self.inbound_path
            .links()
            .chain(self.outbound_path.links())
            .collect()
    }
}

fn check_roles(source: &Endpoint, sink: &Endpoint) -> Result<(), SessionError> {
    if !source.can_source() {
        return Err(SessionError::Role {
            kind: source.kind,
            id: source.ref_id,
            role: "source",
        });
    }
    if !sink.can_sink() {
        return Err(SessionError::Role {
            kind: sink.kind,
            id: sink.ref_id,
            role: "sink",
        });
    }
    Ok(())
}

/// Cycles for one pattern: generation, stimulus transport, application and
/// response transport, back to back.
fn pattern_cycles(noc: &NocConfig, cut: &Cut, source: &Endpoint, in_hops: u64, out_hops: u64) -> u64 {
    let p = &cut.profile;
    source.gen_cycles_per_pattern
        + noc::packet_latency(noc, in_hops, p.stim_flits_per_pattern)
        + p.apply_cycles_per_pattern
        + noc::packet_latency(noc, out_hops, p.resp_flits_per_pattern)
}

pub fn session_duration(
    noc: &NocConfig,
    cut: &Cut,
    source: &Endpoint,
    sink: &Endpoint,
) -> Result<u64, SessionError> {
    check_roles(source, sink)?;
    let in_hops = source.position.manhattan(cut.position);
    let out_hops = cut.position.manhattan(sink.position);
    Ok(cut.profile.pattern_count * pattern_cycles(noc, cut, source, in_hops, out_hops))
}

pub fn session_power(
    noc: &NocConfig,
    cut: &Cut,
    source: &Endpoint,
    sink: &Endpoint,
) -> Result<u64, SessionError> {
    Ok(session_cost(noc, cut, source, sink)?.power)
}

pub fn session_cost(
    noc: &NocConfig,
    cut: &Cut,
    source: &Endpoint,
    sink: &Endpoint,
) -> Result<SessionCost, SessionError> {
    check_roles(source, sink)?;
    let inbound_path = noc::xy_path(noc, source.position, cut.position)?;
    let outbound_path = noc::xy_path(noc, cut.position, sink.position)?;
    let per_pattern = pattern_cycles(noc, cut, source, inbound_path.hops(), outbound_path.hops());
    let power = cut.profile.test_power
        + source.bist_power
        + sink.bist_power
        + noc::transport_power(noc, &inbound_path)
        + noc::transport_power(noc, &outbound_path);
    Ok(SessionCost {
        duration: cut.profile.pattern_count * per_pattern,
        power,
        inbound_path,
        outbound_path,
    })
}
