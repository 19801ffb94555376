//! Head-to-head mean probe cost of the walk and memetic solvers around the
//! model crossover: the published growth models (650.07·1.1435^L for the
//! walk solver, 150.49·1.1646^L for the memetic one, both fitted above
//! L=71) intersect near L=80, so the walk solver's probe advantage only
//! emerges at the upper end of desk scale.
//!
//!     cargo run --release -p labs --example crossover_check [N]

use std::time::Duration;

use labs::experiment::{run_experiment, summarize, ExperimentConfig, SolverKind};
use labs::walk::WalkLimit;

fn main() {
    let n: u32 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    // best-known skew energies for sizes past the shipped registry rows
    let instances: &[(u32, i64)] = &[(61, 230), (71, 275)];
    for &(len, target) in instances {
        let mut line = format!("L={len}");
        for (name, kind) in [
            ("saw8", SolverKind::Saw(WalkLimit::Bounded(8))),
            ("mats", SolverKind::Mats),
        ] {
            let mut cfg = ExperimentConfig::new(kind, len, target, Duration::from_secs(1800), n);
            cfg.seed_base = 4_400_000;
            let records = run_experiment(&cfg).unwrap();
            let s = summarize(&records).unwrap();
            assert_eq!(s.censored, 0);
            line.push_str(&format!(
                "  {name}: {:.3e} probes",
                s.mean_cnt_probe.unwrap()
            ));
        }
        println!("{line}");
    }
}
