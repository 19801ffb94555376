//! Waiting-time statistics for solver runtime prediction.
//!
//! Uncensored solver costs are near-exponential (near-geometric in probe
//! counts), so hit ratios, processor budgets and serial solvabilities all
//! derive from a handful of distribution functions: the exponential and
//! geometric CDFs, the regularized incomplete gamma function and its
//! inverse, and an exponential growth model `a·b^L` fitted to sample means
//! by ordinary least squares on the log scale.
//!
//! All durations are carried in consistent units chosen by the caller
//! (seconds at the command line); nothing here converts units.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum StatsError {
    #[error("mean must be positive, got {0}")]
    NonPositiveMean(f64),
    #[error("probability {0} outside its valid range")]
    BadProbability(f64),
    #[error("argument {0} must be non-negative")]
    NegativeArgument(f64),
    #[error("shape and rate must be positive")]
    BadGammaParams,
    #[error("quantile diverges as p -> 1")]
    DivergentQuantile,
    #[error("load factor must be >= 1, got {0}")]
    BadLoadFactor(f64),
    #[error("model fit needs at least two distinct sizes with positive means")]
    DegenerateFit,
}

/// Exponential CDF `1 - exp(-τ/m̄)` with mean `m̄`.
pub fn exp_cdf(tau: f64, mean: f64) -> Result<f64, StatsError> {
    if mean <= 0.0 {
        return Err(StatsError::NonPositiveMean(mean));
    }
    if tau < 0.0 {
        return Err(StatsError::NegativeArgument(tau));
    }
    Ok(1.0 - (-tau / mean).exp())
}

/// Geometric pmf `(1-p)^{τ-1} p` for the first success on probe `τ >= 1`.
pub fn geometric_pmf(tau: u64, p: f64) -> Result<f64, StatsError> {
    if !(0.0..=1.0).contains(&p) || p == 0.0 {
        return Err(StatsError::BadProbability(p));
    }
    if tau == 0 {
        return Err(StatsError::NegativeArgument(0.0));
    }
    Ok((1.0 - p).powi((tau - 1) as i32) * p)
}

/// Geometric CDF `1 - (1-p)^τ`: success on probe `τ` or before.
pub fn geometric_cdf(tau: u64, p: f64) -> Result<f64, StatsError> {
    if !(0.0..=1.0).contains(&p) || p == 0.0 {
        return Err(StatsError::BadProbability(p));
    }
    if tau == 0 {
        return Err(StatsError::NegativeArgument(0.0));
    }
    Ok(1.0 - (1.0 - p).powi(tau as i32))
}

/// Predicted hit ratio for a runtime limit: the exponential CDF at
/// `t_lmt / loadFactor`. A shared grid divides the wall-clock budget by
/// its empirical load factor; a dedicated processor has load factor 1.
pub fn hit_ratio_predicted(t_lmt: f64, mean: f64, load_factor: f64) -> Result<f64, StatsError> {
    if load_factor < 1.0 {
        return Err(StatsError::BadLoadFactor(load_factor));
    }
    exp_cdf(t_lmt / load_factor, mean)
}

/// Predicted hit count `⌊N · hitP_r⌋` over N trials.
pub fn hits_predicted(n: u64, hit_ratio: f64) -> u64 {
    (n as f64 * hit_ratio).floor() as u64
}

/// Processors needed to expect `n_c` uncensored hits: `⌈N_c / hitP_r⌉`.
pub fn processors_needed(n_c: u64, hit_ratio: f64) -> Result<u64, StatsError> {
    if !(hit_ratio > 0.0 && hit_ratio <= 1.0) {
        return Err(StatsError::BadProbability(hit_ratio));
    }
    Ok((n_c as f64 / hit_ratio).ceil() as u64)
}

// Lanczos approximation of ln Γ (g = 7, 9 coefficients); accurate to
// ~1e-15 over the positive reals.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps the series in its accurate range
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

const GAMMA_EPS: f64 = 1e-15;
const GAMMA_MAX_ITER: usize = 500;

/// Regularized lower incomplete gamma `P(shape, q·rate)`: the gamma CDF in
/// shape/rate form. Series expansion below `x = shape + 1`, Lentz
/// continued fraction above; absolute error stays within 1e-10.
pub fn pgamma(q: f64, shape: f64, rate: f64) -> Result<f64, StatsError> {
    if shape <= 0.0 || rate <= 0.0 {
        return Err(StatsError::BadGammaParams);
    }
    if q < 0.0 {
        return Err(StatsError::NegativeArgument(q));
    }
    let x = q * rate;
    if x == 0.0 {
        return Ok(0.0);
    }
    let log_prefactor = shape * x.ln() - x - ln_gamma(shape);
    if x < shape + 1.0 {
        // ascending series for P
        let mut term = 1.0 / shape;
        let mut sum = term;
        let mut a = shape;
        for _ in 0..GAMMA_MAX_ITER {
            a += 1.0;
            term *= x / a;
            sum += term;
            if term.abs() < sum.abs() * GAMMA_EPS {
                break;
            }
        }
        Ok((log_prefactor.exp() * sum).clamp(0.0, 1.0))
    } else {
        // Lentz continued fraction for Q
        let tiny = 1e-300;
        let mut b = x + 1.0 - shape;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=GAMMA_MAX_ITER {
            let an = -(i as f64) * (i as f64 - shape);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < GAMMA_EPS {
                break;
            }
        }
        let upper = log_prefactor.exp() * h;
        Ok((1.0 - upper).clamp(0.0, 1.0))
    }
}

/// Gamma quantile: inverts [`pgamma`] so `pgamma(qgamma(p)) = p` to 1e-9.
/// Bracketed bisection narrowed first, then Newton steps polish the root.
/// `p = 1` diverges and is reported as an error.
pub fn qgamma(p: f64, shape: f64, rate: f64) -> Result<f64, StatsError> {
    if shape <= 0.0 || rate <= 0.0 {
        return Err(StatsError::BadGammaParams);
    }
    if !(0.0..1.0).contains(&p) {
        return Err(if p == 1.0 {
            StatsError::DivergentQuantile
        } else {
            StatsError::BadProbability(p)
        });
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    // bracket the quantile: the mean plus growing multiples of the sd
    let mean = shape / rate;
    let sd = shape.sqrt() / rate;
    let mut hi = mean + 10.0 * sd;
    while pgamma(hi, shape, rate)? < p {
        hi *= 2.0;
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if pgamma(mid, shape, rate)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-13 * hi.max(1.0) {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    // Newton polish: d/dq P(shape, q·rate) is the gamma density
    for _ in 0..8 {
        let f = pgamma(x, shape, rate)? - p;
        let ln_pdf = shape * rate.ln() + (shape - 1.0) * x.ln() - x * rate - ln_gamma(shape);
        let pdf = ln_pdf.exp();
        if pdf <= 0.0 {
            break;
        }
        let step = f / pdf;
        let next = x - step;
        if next > lo && next < hi {
            x = next;
        }
        if step.abs() <= 1e-12 * x.max(1.0) {
            break;
        }
    }
    Ok(x)
}

/// Waiting time for `n` serially scheduled trials to reach their target
/// with probability `p`: the gamma quantile with shape `n` and rate `1/m̄`.
pub fn solvability_serial(p: f64, n: u64, mean: f64) -> Result<f64, StatsError> {
    if mean <= 0.0 {
        return Err(StatsError::NonPositiveMean(mean));
    }
    qgamma(p, n as f64, 1.0 / mean)
}

/// Waiting time for a single trial: shape-1 gamma quantile.
pub fn solvability_single(hit_ratio: f64, mean: f64) -> Result<f64, StatsError> {
    solvability_serial(hit_ratio, 1, mean)
}

/// Rule-of-thumb 95% confidence interval for an uncensored sample mean at
/// the standard sample size of 100: `[0.8·m̄, 1.2·m̄]`.
pub fn ci_rule_of_thumb(mean: f64) -> (f64, f64) {
    (0.8 * mean, 1.2 * mean)
}

/// Cost unit of a runtime model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostUnit {
    Probes,
    Seconds,
}

/// Exponential growth model for a solver's mean cost: `mean(L) = a·b^L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticModel {
    pub a: f64,
    pub b: f64,
    pub unit: CostUnit,
}

impl AsymptoticModel {
    pub fn predict(&self, len: f64) -> f64 {
        self.a * self.b.powf(len)
    }
}

/// Fits `a·b^L` to observed sample means by least squares on
/// `(L, ln mean)`: `a = e^intercept`, `b = e^slope`.
pub fn fit_exponential_model(
    points: &[(f64, f64)],
    unit: CostUnit,
) -> Result<AsymptoticModel, StatsError> {
    if points.iter().any(|&(_, m)| m <= 0.0) {
        return Err(StatsError::DegenerateFit);
    }
    let n = points.len() as f64;
    let distinct = {
        let mut ls: Vec<f64> = points.iter().map(|p| p.0).collect();
        ls.sort_by(f64::total_cmp);
        ls.dedup();
        ls.len()
    };
    if distinct < 2 {
        return Err(StatsError::DegenerateFit);
    }
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1.ln()).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1.ln()).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Ok(AsymptoticModel {
        a: intercept.exp(),
        b: slope.exp(),
        unit,
    })
}

/// Draws an exponential variate with the given mean by inversion.
pub fn exponential_variate<R: rand::Rng>(rng: &mut R, mean: f64) -> f64 {
    let u: f64 = rng.gen_range(0.0..1.0);
    -mean * (1.0 - u).ln()
}

/// Full prediction for one instance size under a fitted runtime model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PredictionReport {
    #[serde(rename = "L")]
    pub len: u32,
    /// Model mean at this size, in the model's unit.
    pub model_mean: f64,
    pub t_lmt: f64,
    pub load_factor: f64,
    pub hit_ratio_predicted: f64,
    /// Over the experiment sample size `N`.
    pub hits_predicted: u64,
    /// `⌈N_c / hitP_r⌉` processors to sustain `N_c` hits.
    pub processors_needed: u64,
    /// Waiting time of a single solver at the predicted hit ratio.
    pub solvability_single: f64,
    /// Waiting time of `N_c` serially scheduled solvers at p = 0.99.
    pub solvability_serial: f64,
}

/// Builds the standard prediction chain from a runtime model: hit ratio at
/// the time limit, predicted hits over `n` trials, the processor count for
/// `n_c` hits, and the single/serial solvabilities.
pub fn predict(
    model: &AsymptoticModel,
    len: u32,
    t_lmt: f64,
    load_factor: f64,
    n: u64,
    n_c: u64,
) -> Result<PredictionReport, StatsError> {
    let mean = model.predict(f64::from(len));
    if mean <= 0.0 {
        return Err(StatsError::NonPositiveMean(mean));
    }
    let hit_ratio = hit_ratio_predicted(t_lmt, mean, load_factor)?;
    Ok(PredictionReport {
        len,
        model_mean: mean,
        t_lmt,
        load_factor,
        hit_ratio_predicted: hit_ratio,
        hits_predicted: hits_predicted(n, hit_ratio),
        processors_needed: processors_needed(n_c, hit_ratio)?,
        solvability_single: solvability_single(hit_ratio, mean)?,
        solvability_serial: solvability_serial(0.99, n_c, mean)?,
    })
}
