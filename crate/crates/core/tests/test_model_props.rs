use noctest::sysdesc::{IoPort, PortDirection, ProcessorSpec, TestProfile};
use noctest::{session_cost, session_duration, session_power, Cut, Endpoint, NocConfig, Position};
use proptest::prelude::*;

fn noc(rl: u64, fcl: u64, header: u64, power: u64) -> NocConfig {
    NocConfig {
        rows: 8,
        cols: 8,
        flit_width_bits: 32,
        routing_latency: rl,
        flow_control_latency: fcl,
        header_flits: header,
        router_transport_power: power,
    }
}

fn pos() -> impl Strategy<Value = Position> {
    (0u32..8, 0u32..8).prop_map(|(x, y)| Position::new(x, y))
}

fn profile() -> impl Strategy<Value = TestProfile> {
    (0u64..50, 0u64..30, 0u64..30, 0u64..30, 0u64..100).prop_map(|(n, s, r, a, p)| TestProfile {
        pattern_count: n,
        stim_flits_per_pattern: s,
        resp_flits_per_pattern: r,
        apply_cycles_per_pattern: a,
        test_power: p,
    })
}

fn input(at: Position) -> Endpoint {
    Endpoint::port(&IoPort { id: 0, position: at, direction: PortDirection::Input })
}

fn output(at: Position) -> Endpoint {
    Endpoint::port(&IoPort { id: 1, position: at, direction: PortDirection::Output })
}

fn cpu(at: Position, gen: u64) -> Endpoint {
    Endpoint::processor(&ProcessorSpec {
        id: 9,
        name: "cpu".into(),
        position: at,
        gen_cycles_per_pattern: gen,
        bist_power: 7,
        memory_kb: 0,
        self_test: TestProfile::default(),
    })
}

fn cut(at: Position, profile: TestProfile) -> Cut {
    Cut { id: 1, position: at, profile, is_processor: false }
}

proptest! {
    #[test]
    fn duration_linear_in_patterns(rl in 0u64..6, fcl in 1u64..4, p in profile(), c in pos(), s in pos(), k in pos(), extra in 1u64..5) {
        let n = noc(rl, fcl, 1, 1);
        let one = TestProfile { pattern_count: 1, ..p };
        let per = session_duration(&n, &cut(c, one), &input(s), &output(k)).unwrap();
        let many = TestProfile { pattern_count: p.pattern_count * extra, ..p };
        prop_assert_eq!(session_duration(&n, &cut(c, many), &input(s), &output(k)).unwrap(), per * p.pattern_count * extra);
    }

    #[test]
    fn processor_source_costs_generation(rl in 0u64..6, fcl in 1u64..4, p in profile(), c in pos(), s in pos(), k in pos(), gen in 0u64..20) {
        let n = noc(rl, fcl, 1, 1);
        let ext = session_duration(&n, &cut(c, p), &input(s), &output(k)).unwrap();
        let proc_ = session_duration(&n, &cut(c, p), &cpu(s, gen), &output(k)).unwrap();
        prop_assert_eq!(proc_, ext + p.pattern_count * gen);
    }

    #[test]
    fn power_ignores_pattern_count(p in profile(), c in pos(), s in pos(), k in pos(), more in 0u64..100) {
        let n = noc(2, 1, 1, 3);
        let a = session_power(&n, &cut(c, p), &cpu(s, 10), &output(k)).unwrap();
        let b = session_power(&n, &cut(c, TestProfile { pattern_count: more, ..p }), &cpu(s, 10), &output(k)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn stim_resp_symmetry(rl in 0u64..6, fcl in 1u64..4, header in 1u64..3, p in profile(), c in pos(), s in pos(), k in pos()) {
        let n = noc(rl, fcl, header, 0);
        let fwd = session_duration(&n, &cut(c, p), &input(s), &output(k)).unwrap();
        // swap flit counts and swap which side is far away
        let swapped = TestProfile { stim_flits_per_pattern: p.resp_flits_per_pattern, resp_flits_per_pattern: p.stim_flits_per_pattern, ..p };
        let back = session_duration(&n, &cut(c, swapped), &input(k), &output(s)).unwrap();
        prop_assert_eq!(fwd, back);
    }

    #[test]
    fn paths_end_at_the_cut(p in profile(), c in pos(), s in pos(), k in pos()) {
        let n = noc(2, 1, 1, 0);
        let cost = session_cost(&n, &cut(c, p), &input(s), &output(k)).unwrap();
        prop_assert_eq!(cost.inbound_path.source(), s);
        prop_assert_eq!(cost.inbound_path.destination(), c);
        prop_assert_eq!(cost.outbound_path.source(), c);
        prop_assert_eq!(cost.outbound_path.destination(), k);
    }
}
