//! Flit-by-flit wormhole walk, independent of the closed-form latency.
//!
//! The first flit sets up each router it enters (`rl` cycles) and crosses
//! each link in `fcl` cycles. Every later flit leaves a router no earlier
//! than one `fcl` after its predecessor left it, and the destination ejects
//! at most one flit per `fcl`.

pub fn flit_walk_latency(rl: u64, fcl: u64, header: u64, hops: u64, payload: u64) -> u64 {
    let flits = (header + payload) as usize;
    let hops = hops as usize;
    // depart[r]: when the previous flit left router r toward r+1
    let mut prev_depart: Vec<Option<u64>> = vec![None; hops];
    let mut prev_delivered: Option<u64> = None;
    let mut header_ready = vec![0u64; hops + 1];

    let mut t_router0 = 0;
    for r in 0..=hops {
        t_router0 += rl;
        header_ready[r] = t_router0;
        if r < hops {
            t_router0 += fcl;
        }
    }

    for f in 0..flits {
        // time the flit is ready to leave router 0
        let mut at = header_ready[0];
        for r in 0..hops {
            let mut leave = at;
            if f == 0 {
                leave = leave.max(header_ready[r]);
            }
            if let Some(p) = prev_depart[r] {
                leave = leave.max(p + fcl);
            }
            prev_depart[r] = Some(leave);
            at = leave + fcl;
            if f == 0 {
                at += rl;
            }
        }
        let delivered = match prev_delivered {
            Some(p) => at.max(p + fcl),
            None => at,
        };
        prev_delivered = Some(delivered);
    }
    prev_delivered.expect("at least one flit")
}
