//! Fitted growth-base stability across seed bases and instance sets, for
//! calibrating the relative-performance check.

use std::time::Duration;

use labs::experiment::{run_experiment, summarize, ExperimentConfig, SolverKind};
use labs::registry::BestKnownRegistry;
use labs::stats::{fit_exponential_model, CostUnit};
use labs::walk::WalkLimit;

fn fitted_b(reg: &BestKnownRegistry, kind: SolverKind, sizes: &[u32], seed_base: u64) -> f64 {
    let points: Vec<(f64, f64)> = sizes
        .iter()
        .map(|&len| {
            let mut cfg = ExperimentConfig::new(
                kind,
                len,
                reg.target_for(len).unwrap(),
                Duration::from_secs(600),
                100,
            );
            cfg.seed_base = seed_base + u64::from(len) * 1000;
            let records = run_experiment(&cfg).unwrap();
            let s = summarize(&records).unwrap();
            (f64::from(len), s.mean_cnt_probe.unwrap())
        })
        .collect();
    fit_exponential_model(&points, CostUnit::Probes).unwrap().b
}

fn main() {
    let reg = BestKnownRegistry::builtin();
    let six: &[u32] = &[41, 43, 45, 51, 57, 61];
    let nine: &[u32] = &[41, 43, 45, 49, 51, 53, 57, 59, 61];
    for (name, sizes) in [("six", six), ("nine", nine)] {
        for base in [1u64, 2, 3, 4] {
            let saw = fitted_b(
                &reg,
                SolverKind::Saw(WalkLimit::Bounded(8)),
                sizes,
                base * 10_000_000,
            );
            let mats = fitted_b(&reg, SolverKind::Mats, sizes, base * 10_000_000 + 777);
            println!(
                "set={name} base={base}: b(saw8)={saw:.4} b(mats)={mats:.4} direction_ok={}",
                saw < mats
            );
        }
    }
}
