//! Observed vs exponential-model hit ratios at several probe budgets.
use std::time::Duration;
use labs::experiment::{run_experiment, ExperimentConfig, SolverKind};
use labs::registry::BestKnownRegistry;
use labs::stats::{exp_cdf, fit_exponential_model, CostUnit};
use labs::walk::WalkLimit;

fn main() {
    let reg = BestKnownRegistry::builtin();
    let sizes = [13u32, 21, 27];
    let mut all = Vec::new();
    for &len in &sizes {
        let mut cfg = ExperimentConfig::new(
            SolverKind::Saw(WalkLimit::Bounded(8)),
            len,
            reg.target_for(len).unwrap(),
            Duration::from_secs(600),
            100,
        );
        cfg.seed_base = 55_000 + u64::from(len);
        let recs = run_experiment(&cfg).unwrap();
        let probes: Vec<u64> = recs.iter().map(|r| r.cnt_probe).collect();
        all.push((len, probes));
    }
    let points: Vec<(f64, f64)> = all
        .iter()
        .map(|(l, p)| (f64::from(*l), p.iter().sum::<u64>() as f64 / p.len() as f64))
        .collect();
    println!("sample means: {points:?}");
    let model = fit_exponential_model(&points, CostUnit::Probes).unwrap();
    println!("fitted a={:.4} b={:.4}", model.a, model.b);
    for (len, probes) in &all {
        let m = model.predict(f64::from(*len));
        print!("L={len} (model mean {m:.0}):");
        for mult in [0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 4.0] {
            let b = m * mult;
            let pred = exp_cdf(b, m).unwrap();
            let obs = probes.iter().filter(|&&p| (p as f64) <= b).count() as f64 / 100.0;
            print!("  x{mult}: {obs:.2}/{pred:.2}");
        }
        println!();
    }
}
