//! Prints mean probe counts per instance size for the solvers, next to
//! the published growth models, for calibration runs.

use std::time::Duration;

use labs::experiment::{run_experiment, summarize, ExperimentConfig, SolverKind};
use labs::registry::BestKnownRegistry;
use labs::walk::WalkLimit;

fn main() {
    let reg = BestKnownRegistry::builtin();
    let n: u32 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100);
    let sizes = [41u32, 43, 45, 51, 57, 61];
    println!("L   saw8_mean    650*1.1435^L   mats_mean    150*1.1646^L   rrts_mean   sawU_mean   73*1.1668^L");
    for &len in &sizes {
        let target = reg.target_for(len).unwrap();
        let mut means = Vec::new();
        for kind in [
            SolverKind::Saw(WalkLimit::Bounded(8)),
            SolverKind::Mats,
            SolverKind::Rrts,
            SolverKind::Saw(WalkLimit::Unlimited),
        ] {
            let mut cfg =
                ExperimentConfig::new(kind, len, target, Duration::from_secs(600), n);
            cfg.seed_base = 7_000_000 + u64::from(len);
            let records = run_experiment(&cfg).unwrap();
            let s = summarize(&records).unwrap();
            means.push(s.mean_cnt_probe.unwrap());
        }
        let saw_model = 650.07 * 1.1435f64.powi(len as i32);
        let mats_model = 150.49 * 1.1646f64.powi(len as i32);
        let sawu_model = 73.05 * 1.1668f64.powi(len as i32);
        println!(
            "{len}  {:>11.0}  {:>12.0}  {:>11.0}  {:>12.0}  {:>10.0}  {:>10.0}  {:>10.0}",
            means[0], saw_model, means[1], mats_model, means[2], means[3], sawu_model
        );
    }
}
