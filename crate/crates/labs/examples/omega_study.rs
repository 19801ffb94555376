//! Walk-segment coefficient study: mean probe cost of the walk solver for
//! ω_c in {1, 2, 4, 8, 16} and a single unlimited segment, at desk scale.
//!
//!     cargo run --release -p labs --example omega_study [N] [L ...]

use std::time::Duration;

use labs::experiment::{run_experiment, summarize, ExperimentConfig, SolverKind};
use labs::registry::BestKnownRegistry;
use labs::walk::WalkLimit;

fn main() {
    let mut args = std::env::args().skip(1);
    let n: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let sizes: Vec<u32> = {
        let rest: Vec<u32> = args.filter_map(|s| s.parse().ok()).collect();
        if rest.is_empty() {
            vec![27, 41, 43, 45, 51]
        } else {
            rest
        }
    };
    let reg = BestKnownRegistry::builtin();
    let limits = [
        WalkLimit::Bounded(1),
        WalkLimit::Bounded(2),
        WalkLimit::Bounded(4),
        WalkLimit::Bounded(8),
        WalkLimit::Bounded(16),
        WalkLimit::Unlimited,
    ];
    println!("L      saw1      saw2      saw4      saw8     saw16      sawU   (mean cntProbe, N={n})");
    for &len in &sizes {
        let target = reg
            .target_for(len)
            .unwrap_or_else(|| panic!("no registry target for L={len}"));
        print!("{len:<4}");
        for limit in limits {
            let mut cfg = ExperimentConfig::new(
                SolverKind::Saw(limit),
                len,
                target,
                Duration::from_secs(600),
                n,
            );
            cfg.seed_base = 31_000_000 + u64::from(len) * 101;
            let records = run_experiment(&cfg).unwrap();
            let s = summarize(&records).unwrap();
            print!("{:>10.0}", s.mean_cnt_probe.unwrap());
        }
        println!();
    }
}
