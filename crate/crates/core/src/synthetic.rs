//! Seeded random planning instances.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::sysdesc::{
    CoreSpec, IoPort, NocConfig, PortDirection, Position, ProcessorSpec, SystemDescription,
    TestProfile,
};

/// Inclusive bounds for every generated numeric field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileRanges {
    pub pattern_count: RangeInclusive<u64>,
    pub stim_flits_per_pattern: RangeInclusive<u64>,
    pub resp_flits_per_pattern: RangeInclusive<u64>,
    pub apply_cycles_per_pattern: RangeInclusive<u64>,
    pub test_power: RangeInclusive<u64>,
    pub self_test_pattern_count: RangeInclusive<u64>,
    pub gen_cycles_per_pattern: RangeInclusive<u64>,
    pub bist_power: RangeInclusive<u64>,
    pub memory_kb: RangeInclusive<u64>,
}

impl Default for ProfileRanges {
    fn default() -> Self {
        Self {
            pattern_count: 10..=200,
            stim_flits_per_pattern: 1..=40,
            resp_flits_per_pattern: 1..=40,
            apply_cycles_per_pattern: 1..=20,
            test_power: 10..=100,
            self_test_pattern_count: 0..=100,
            gen_cycles_per_pattern: 10..=10,
            bist_power: 5..=20,
            memory_kb: 4..=64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("capacity exceeded: {modules} modules do not fit on {routers} routers")]
    Capacity { modules: u64, routers: u64 },
    #[error("empty range for {0}")]
    EmptyRange(&'static str),
    #[error("grid must have at least one row and one column")]
    EmptyGrid,
}

/// Shape of a synthetic instance. `noc` supplies the latency and power
/// characterization; its `rows`/`cols` are replaced by the ones given here.
#[derive(Clone, Debug)]
pub struct SyntheticSpec {
    pub rows: u32,
    pub cols: u32,
    pub n_cores: usize,
    pub n_processors: usize,
    pub noc: NocConfig,
    pub ranges: ProfileRanges,
}

impl SyntheticSpec {
    pub fn new(rows: u32, cols: u32, n_cores: usize, n_processors: usize) -> Self {
        Self {
            rows,
            cols,
            n_cores,
            n_processors,
            noc: NocConfig {
                rows,
                cols,
                flit_width_bits: 32,
                routing_latency: 3,
                flow_control_latency: 1,
                header_flits: 1,
                router_transport_power: 1,
            },
            ranges: ProfileRanges::default(),
        }
    }
}

fn draw(rng: &mut ChaCha8Rng, r: &RangeInclusive<u64>) -> u64 {
    rng.random_range(r.clone())
}

fn draw_profile(
    rng: &mut ChaCha8Rng,
    r: &ProfileRanges,
    patterns: &RangeInclusive<u64>,
) -> TestProfile {
    let pattern_count = draw(rng, patterns);
    loop {
        let profile = TestProfile {
            pattern_count,
            stim_flits_per_pattern: draw(rng, &r.stim_flits_per_pattern),
            resp_flits_per_pattern: draw(rng, &r.resp_flits_per_pattern),
            apply_cycles_per_pattern: draw(rng, &r.apply_cycles_per_pattern),
            test_power: draw(rng, &r.test_power),
        };
        if pattern_count == 0
            || profile.stim_flits_per_pattern
                + profile.resp_flits_per_pattern
                + profile.apply_cycles_per_pattern
                > 0
        {
            return profile;
        }
    }
}

fn boundary(rows: u32, cols: u32) -> Vec<Position> {
    let mut out = Vec::new();
    for y in 0..rows {
        for x in 0..cols {
            if x == 0 || y == 0 || x + 1 == cols || y + 1 == rows {
                out.push(Position::new(x, y));
            }
        }
    }
    out
}

/// Builds a valid instance, deterministic in `seed`.
///
/// Cores get ids `0..n_cores`, processors the ids after them. Module positions
/// are drawn without replacement. One INPUT and one OUTPUT port land on
/// boundary routers.
pub fn generate_synthetic(seed: u64, spec: &SyntheticSpec) -> Result<SystemDescription, GenerateError> {
    if spec.rows == 0 || spec.cols == 0 {
        return Err(GenerateError::EmptyGrid);
    }
    let routers = u64::from(spec.rows) * u64::from(spec.cols);
    let modules = (spec.n_cores + spec.n_processors) as u64;
    if modules > routers {
        return Err(GenerateError::Capacity { modules, routers });
    }
    let r = &spec.ranges;
    for (name, range) in [
        ("pattern_count", &r.pattern_count),
        ("stim_flits_per_pattern", &r.stim_flits_per_pattern),
        ("resp_flits_per_pattern", &r.resp_flits_per_pattern),
        ("apply_cycles_per_pattern", &r.apply_cycles_per_pattern),
        ("test_power", &r.test_power),
        ("self_test_pattern_count", &r.self_test_pattern_count),
        ("gen_cycles_per_pattern", &r.gen_cycles_per_pattern),
        ("bist_power", &r.bist_power),
        ("memory_kb", &r.memory_kb),
    ] {
        if range.is_empty() {
            return Err(GenerateError::EmptyRange(name));
        }
    }
    let any_patterns = *r.pattern_count.end() > 0 || *r.self_test_pattern_count.end() > 0;
    if any_patterns
        && *r.stim_flits_per_pattern.end() + *r.resp_flits_per_pattern.end() + *r.apply_cycles_per_pattern.end() == 0
    {
        return Err(GenerateError::EmptyRange("per-pattern cost"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slots: Vec<Position> = (0..spec.rows)
        .flat_map(|y| (0..spec.cols).map(move |x| Position::new(x, y)))
        .collect();
    slots.shuffle(&mut rng);

    let cores = (0..spec.n_cores)
        .map(|i| {
            let p = draw_profile(&mut rng, r, &r.pattern_count);
            CoreSpec {
                id: i as u32,
                name: format!("core{i}"),
                position: slots[i],
                pattern_count: p.pattern_count,
                stim_flits_per_pattern: p.stim_flits_per_pattern,
                resp_flits_per_pattern: p.resp_flits_per_pattern,
                apply_cycles_per_pattern: p.apply_cycles_per_pattern,
                test_power: p.test_power,
            }
        })
        .collect();
    let processors = (0..spec.n_processors)
        .map(|j| {
            let gen_cycles_per_pattern = draw(&mut rng, &r.gen_cycles_per_pattern);
            let bist_power = draw(&mut rng, &r.bist_power);
            let memory_kb = draw(&mut rng, &r.memory_kb);
            let self_test = draw_profile(&mut rng, r, &r.self_test_pattern_count);
            ProcessorSpec {
                id: (spec.n_cores + j) as u32,
                name: format!("cpu{j}"),
                position: slots[spec.n_cores + j],
                gen_cycles_per_pattern,
                bist_power,
                memory_kb,
                self_test,
            }
        })
        .collect();

    let edge = boundary(spec.rows, spec.cols);
    let input = edge[rng.random_range(0..edge.len())];
    let output = edge[rng.random_range(0..edge.len())];
    let io_ports = vec![
        IoPort {
            id: 0,
            position: input,
            direction: PortDirection::Input,
        },
        IoPort {
            id: 1,
            position: output,
            direction: PortDirection::Output,
        },
    ];

    Ok(SystemDescription {
        noc: NocConfig {
            rows: spec.rows,
            cols: spec.cols,
            ..spec.noc.clone()
        },
        cores,
        processors,
        io_ports,
    })
}
