//! Grid network-on-chip geometry and cost model.
//!
//! Routers sit on a `rows x cols` grid and packets follow deterministic XY
//! routes. Transport latency uses a wormhole model: the header pays the
//! routing latency at every router it crosses (source included) and the
//! flow-control latency on every link, while the remaining flits stream
//! behind it at one flow-control latency each.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Router coordinate. `x` is the column, `y` the row, both 0-based.
///
/// Serialized as a two element array `[x, y]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct Position {
    pub x: u32,
    pub y: u32,
}

impl Position {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Position) -> u64 {
        u64::from(self.x.abs_diff(other.x)) + u64::from(self.y.abs_diff(other.y))
    }
}

impl From<[u32; 2]> for Position {
    fn from([x, y]: [u32; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Position> for [u32; 2] {
    fn from(p: Position) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

fn default_header_flits() -> u64 {
    1
}

/// Characterization of the on-chip network.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NocConfig {
    pub rows: u32,
    pub cols: u32,
    pub flit_width_bits: u32,
    /// Cycles to set up a connection through one router.
    pub routing_latency: u64,
    /// Cycles to move one flit across one link.
    pub flow_control_latency: u64,
    #[serde(default = "default_header_flits")]
    pub header_flits: u64,
    /// Mean power charged to every router an active session's packets cross.
    pub router_transport_power: u64,
}

impl NocConfig {
    pub fn contains(&self, p: Position) -> bool {
        p.x < self.cols && p.y < self.rows
    }

    pub fn router_count(&self) -> u64 {
        u64::from(self.rows) * u64::from(self.cols)
    }

    /// Largest possible Manhattan distance on this grid.
    pub fn diameter(&self) -> u64 {
        u64::from(self.rows.saturating_sub(1)) + u64::from(self.cols.saturating_sub(1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NocError {
    #[error("position {position} is outside the {rows}x{cols} grid")]
    OutOfGrid {
        position: Position,
        rows: u32,
        cols: u32,
    },
}

/// An XY route, listing every router from source to destination inclusive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    routers: Vec<Position>,
}

impl Path {
    pub fn routers(&self) -> &[Position] {
        &self.routers
    }

    pub fn hops(&self) -> u64 {
        self.routers.len() as u64 - 1
    }

    pub fn source(&self) -> Position {
        self.routers[0]
    }

    pub fn destination(&self) -> Position {
        *self.routers.last().expect("a path holds at least one router")
    }

    /// Directed links in traversal order.
    pub fn links(&self) -> impl Iterator<Item = Link> + '_ {
        self.routers.windows(2).map(|w| Link {
            from: w[0],
            to: w[1],
        })
    }
}

/// Directed channel between two adjacent routers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub from: Position,
    pub to: Position,
}

fn check(noc: &NocConfig, p: Position) -> Result<(), NocError> {
    if noc.contains(p) {
        Ok(())
    } else {
        Err(NocError::OutOfGrid {
            position: p,
            rows: noc.rows,
            cols: noc.cols,
        })
    }
}

/// Route from `from` to `to`, moving along x first and then along y.
pub fn xy_path(noc: &NocConfig, from: Position, to: Position) -> Result<Path, NocError> {
    check(noc, from)?;
    check(noc, to)?;
    let mut routers = Vec::with_capacity(from.manhattan(to) as usize + 1);
    let mut cur = from;
    routers.push(cur);
    while cur.x != to.x {
        cur.x = if cur.x < to.x { cur.x + 1 } else { cur.x - 1 };
        routers.push(cur);
    }
    while cur.y != to.y {
        cur.y = if cur.y < to.y { cur.y + 1 } else { cur.y - 1 };
        routers.push(cur);
    }
    Ok(Path { routers })
}

/// Cycles for a packet of `header_flits + payload_flits` flits to cross `hops` links.
pub fn packet_latency(noc: &NocConfig, hops: u64, payload_flits: u64) -> u64 {
    let flits = noc.header_flits + payload_flits;
    noc.routing_latency * (hops + 1) + noc.flow_control_latency * (hops + flits - 1)
}

pub fn path_links(path: &Path) -> BTreeSet<Link> {
    path.links().collect()
}

/// Power charged for one active path: every traversed router, endpoints included.
pub fn transport_power(noc: &NocConfig, path: &Path) -> u64 {
    noc.router_transport_power * path.routers.len() as u64
}
