#![allow(dead_code)]

pub mod flit_walk;

use noctest::synthetic::{generate_synthetic, SyntheticSpec};
use noctest::{PlanOptions, PowerFraction, SystemDescription};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FRACTIONS: [Option<(u64, u64)>; 4] = [None, Some((3, 10)), Some((1, 2)), Some((4, 5))];

/// Random synthetic system plus random planner options.
pub fn random_case(seed: u64, max_side: u32, max_modules: usize) -> (SystemDescription, PlanOptions) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0005_eed0_fa11);
    let rows = rng.random_range(1..=max_side);
    let cols = rng.random_range(1..=max_side);
    let cap = (rows * cols) as usize;
    let modules = rng.random_range(1..=max_modules.min(cap));
    let processors = rng.random_range(0..=modules);
    let mut spec = SyntheticSpec::new(rows, cols, modules - processors, processors);
    spec.ranges.pattern_count = 1..=30;
    spec.ranges.self_test_pattern_count = 0..=20;
    spec.ranges.gen_cycles_per_pattern = 0..=12;
    spec.noc.routing_latency = rng.random_range(0..=4);
    spec.noc.flow_control_latency = rng.random_range(1..=3);
    spec.noc.header_flits = rng.random_range(1..=2);
    spec.noc.router_transport_power = rng.random_range(0..=5);
    let sys = generate_synthetic(seed, &spec).expect("fits by construction");
    let fraction = FRACTIONS[rng.random_range(0..FRACTIONS.len())].map(|(n, d)| PowerFraction::new(n, d));
    let opts = PlanOptions {
        power_fraction: fraction,
        processors_reused: rng.random_range(0..=processors),
        exclusive_links: rng.random_bool(0.5),
        processor_first: rng.random_bool(0.8),
    };
    (sys, opts)
}
