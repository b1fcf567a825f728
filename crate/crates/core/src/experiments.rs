//! Monte Carlo and bootstrap harnesses for the estimators, model selection,
//! and the embedded wind-speed sample.
//!
//! Replicate `r` draws from stream `r` of the master seed, so results do not
//! depend on thread scheduling. Within a replicate the sample for size `n`
//! is the first `n` draws of one stream, which nests samples across sizes.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::distributions::{mle_fit, rng_for, sample_with, Distribution, FitFamily, FitResult};
use crate::error::{Error, Result};
use crate::estimation::{
    silverman_bandwidth, wpdve_nonparametric, wpdve_parametric_exponential, wpve_nonparametric,
    wpve_parametric_exponential, KernelEstimator, Method,
};
use crate::measures::{wpdve, wpve, Weight};

/// Bandwidth used by the kernel estimator in simulations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthRule {
    Silverman,
    Fixed(f64),
}

impl BandwidthRule {
    pub fn bandwidth(&self, sample: &[f64]) -> Result<f64> {
        match *self {
            BandwidthRule::Silverman => silverman_bandwidth(sample),
            BandwidthRule::Fixed(b) if b > 0.0 => Ok(b),
            BandwidthRule::Fixed(b) => Err(Error::Domain(format!("bandwidth must be positive, got {b}"))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            BandwidthRule::Silverman => "silverman".into(),
            BandwidthRule::Fixed(b) => format!("fixed:{}", fmt_g(*b)),
        }
    }
}

/// Which measure a simulation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Wpve,
    Wpdve,
}

impl Target {
    pub fn name(&self) -> &'static str {
        match self {
            Target::Wpve => "wpve",
            Target::Wpdve => "wpdve",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub target: Target,
    /// Exponential rate of the generating law.
    pub rate: f64,
    pub ts: Vec<f64>,
    pub ns: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub method: Method,
    pub bandwidth: BandwidthRule,
}

impl SimulationConfig {
    pub fn new(target: Target, rate: f64, ts: Vec<f64>, ns: Vec<usize>, reps: usize, seed: u64, method: Method) -> Self {
        Self {
            target,
            rate,
            ts,
            ns,
            reps,
            seed,
            method,
            bandwidth: BandwidthRule::Silverman,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub t: f64,
    pub n: usize,
    /// Replicates that produced an estimate.
    pub reps: usize,
    pub failures: usize,
    pub true_value: f64,
    pub mean_estimate: f64,
    /// `|mean(estimate) - truth|`.
    pub ab: f64,
    /// `mean |estimate - truth|`.
    pub ab_alt: f64,
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<ReportRow>,
}

pub const CSV_HEADER: &str = "t,n,reps,failures,true_value,mean_estimate,ab,ab_alt,mse";

impl ExperimentReport {
    /// CSV with `#`-prefixed metadata lines, a header, and values at six
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k}={v}");
        }
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                fmt_g(r.t),
                r.n,
                r.reps,
                r.failures,
                fmt_g(r.true_value),
                fmt_g(r.mean_estimate),
                fmt_g(r.ab),
                fmt_g(r.ab_alt),
                fmt_g(r.mse)
            );
        }
        s
    }

    pub fn row(&self, t: f64, n: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.t == t && r.n == n)
    }
}

/// Formats like C's `%.6g`.
pub fn fmt_g(x: f64) -> String {
    const P: i32 = 6;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= P {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Pairwise summation; the result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Aggregates per-replicate estimates (`None` for failures) against `truth`.
pub fn aggregate(t: f64, n: usize, truth: f64, estimates: &[Option<f64>]) -> ReportRow {
    let ok: Vec<f64> = estimates.iter().flatten().copied().collect();
    let k = ok.len();
    let failures = estimates.len() - k;
    if k == 0 {
        return ReportRow {
            t,
            n,
            reps: 0,
            failures,
            true_value: truth,
            mean_estimate: f64::NAN,
            ab: f64::NAN,
            ab_alt: f64::NAN,
            mse: f64::NAN,
        };
    }
    let kf = k as f64;
    let mean = pairwise_sum(&ok) / kf;
    let abs: Vec<f64> = ok.iter().map(|e| (e - truth).abs()).collect();
    let sq: Vec<f64> = ok.iter().map(|e| (e - truth).powi(2)).collect();
    ReportRow {
        t,
        n,
        reps: k,
        failures,
        true_value: truth,
        mean_estimate: mean,
        ab: (mean - truth).abs(),
        ab_alt: pairwise_sum(&abs) / kf,
        mse: pairwise_sum(&sq) / kf,
    }
}

fn estimate(target: Target, method: Method, rule: BandwidthRule, sample: &[f64], t: f64) -> Result<f64> {
    let r = match method {
        Method::Parametric => match target {
            Target::Wpve => wpve_parametric_exponential(sample, t)?,
            Target::Wpdve => wpdve_parametric_exponential(sample, t)?,
        },
        Method::Nonparametric => {
            let k = KernelEstimator::new(sample, rule.bandwidth(sample)?)?;
            match target {
                Target::Wpve => wpve_nonparametric(&k, t)?,
                Target::Wpdve => wpdve_nonparametric(&k, t)?,
            }
        }
    };
    Ok(r.value)
}

/// Runs a Monte Carlo study of the WPVE or WPDVE estimator for exponential
/// data and reports AB and MSE per `(t, n)`.
pub fn simulate(cfg: &SimulationConfig) -> Result<ExperimentReport> {
    if cfg.reps < 2 {
        return Err(Error::Domain(format!("need at least two replicates, got {}", cfg.reps)));
    }
    if cfg.ns.is_empty() || cfg.ts.is_empty() || cfg.ns.contains(&0) {
        return Err(Error::Domain("t grid and positive sample sizes are required".into()));
    }
    let law = Distribution::exponential(cfg.rate)?;
    let truths: Vec<f64> = cfg
        .ts
        .iter()
        .map(|&t| {
            Ok(match cfg.target {
                Target::Wpve => wpve(&law, &Weight::Identity, t)?.value,
                Target::Wpdve => wpdve(&law, &Weight::Identity, t)?.value,
            })
        })
        .collect::<Result<_>>()?;
    let n_max = *cfg.ns.iter().max().unwrap();
    // estimates[r][i_t][i_n]
    let estimates: Vec<Vec<Vec<Option<f64>>>> = (0..cfg.reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_for(cfg.seed, r as u64);
            let draws = sample_with(&law, n_max, &mut rng)?;
            Ok(cfg
                .ts
                .iter()
                .map(|&t| {
                    cfg.ns
                        .iter()
                        .map(|&n| estimate(cfg.target, cfg.method, cfg.bandwidth, &draws[..n], t).ok())
                        .collect()
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (it, &t) in cfg.ts.iter().enumerate() {
        for (in_, &n) in cfg.ns.iter().enumerate() {
            let col: Vec<Option<f64>> = estimates.iter().map(|e| e[it][in_]).collect();
            rows.push(aggregate(t, n, truths[it], &col));
        }
    }
    let mut metadata = vec![
        ("experiment".to_string(), format!("simulate-{}", cfg.target.name())),
        ("distribution".into(), "exponential".into()),
        ("rate".into(), fmt_g(cfg.rate)),
        ("method".into(), cfg.method.name().into()),
        ("seed".into(), cfg.seed.to_string()),
        ("replications".into(), cfg.reps.to_string()),
        ("sampling".into(), "nested per replicate stream".into()),
    ];
    if cfg.method == Method::Nonparametric {
        metadata.push(("bandwidth".into(), cfg.bandwidth.label()));
    }
    Ok(ExperimentReport { metadata, rows })
}

/// Simulation of the WPVE estimator.
pub fn simulate_wpve(rate: f64, ts: &[f64], ns: &[usize], reps: usize, seed: u64, method: Method) -> Result<ExperimentReport> {
    simulate(&SimulationConfig::new(Target::Wpve, rate, ts.to_vec(), ns.to_vec(), reps, seed, method))
}

/// Simulation of the WPDVE estimator.
pub fn simulate_wpdve(rate: f64, ts: &[f64], ns: &[usize], reps: usize, seed: u64, method: Method) -> Result<ExperimentReport> {
    simulate(&SimulationConfig::new(Target::Wpdve, rate, ts.to_vec(), ns.to_vec(), reps, seed, method))
}

/// Nonparametric bootstrap of the kernel WPVE estimator with bandwidth `b_n`.
/// The reference value at each `t` is the WPVE of `fitted`.
pub fn bootstrap_wpve(
    data: &[f64],
    fitted: &Distribution,
    b: usize,
    bandwidth: f64,
    ts: &[f64],
    seed: u64,
) -> Result<ExperimentReport> {
    if b < 2 {
        return Err(Error::Domain(format!("need at least two bootstrap samples, got {b}")));
    }
    KernelEstimator::new(data, bandwidth)?;
    let truths: Vec<f64> = ts
        .iter()
        .map(|&t| Ok(wpve(fitted, &Weight::Identity, t)?.value))
        .collect::<Result<_>>()?;
    let n = data.len();
    let estimates: Vec<Vec<Option<f64>>> = (0..b)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_for(seed, r as u64);
            let resample: Vec<f64> = (0..n).map(|_| data[rng.gen_range(0..n)]).collect();
            let k = KernelEstimator::new(&resample, bandwidth).ok();
            ts.iter()
                .map(|&t| k.as_ref().and_then(|k| wpve_nonparametric(k, t).ok()).map(|e| e.value))
                .collect()
        })
        .collect();
    let rows = ts
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let col: Vec<Option<f64>> = estimates.iter().map(|e| e[i]).collect();
            aggregate(t, n, truths[i], &col)
        })
        .collect();
    let params = fitted
        .family()
        .parameters()
        .iter()
        .map(|(k, v)| format!("{k}={}", fmt_g(*v)))
        .collect::<Vec<_>>()
        .join(";");
    Ok(ExperimentReport {
        metadata: vec![
            ("experiment".into(), "bootstrap-wpve".into()),
            ("reference".into(), format!("{}({params})", fitted.name())),
            ("method".into(), "nonparametric".into()),
            ("bandwidth".into(), BandwidthRule::Fixed(bandwidth).label()),
            ("seed".into(), seed.to_string()),
            ("replications".into(), b.to_string()),
        ],
        rows,
    })
}

/// Fits the Gumbel type II, Weibull and exponential laws and sorts the fits
/// by AIC.
pub fn model_selection(data: &[f64]) -> Result<Vec<FitResult>> {
    let mut fits = [FitFamily::GumbelII, FitFamily::Weibull, FitFamily::Exponential]
        .iter()
        .map(|&f| mle_fit(f, data))
        .collect::<Result<Vec<_>>>()?;
    fits.sort_by(|a, b| a.aic.total_cmp(&b.aic));
    Ok(fits)
}

/// Thirty average daily wind speeds in metres per second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindSpeedDataset {
    values: [f64; 30],
}

impl WindSpeedDataset {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn wind_speed_dataset() -> WindSpeedDataset {
    WindSpeedDataset {
        values: [
            0.5833, 0.6667, 0.6944, 0.7222, 0.7500, 0.7778, 0.8056, 0.8056, 0.8611, 0.8889, 0.9167, 1.0000, 1.0278,
            1.0278, 1.1111, 1.1111, 1.1111, 1.1667, 1.1667, 1.1944, 1.2778, 1.2778, 1.3056, 1.3333, 1.3333, 1.3611,
            1.4444, 2.1111, 2.1389, 2.7778,
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format() {
        assert_eq!(fmt_g(0.011937123), "0.0119371");
        assert_eq!(fmt_g(26.558290), "26.5583");
        assert_eq!(fmt_g(1.977e-6), "1.977e-06");
        assert_eq!(fmt_g(1234567.0), "1.23457e+06");
        assert_eq!(fmt_g(100.0), "100");
        assert_eq!(fmt_g(-0.0810603), "-0.0810603");
        assert_eq!(fmt_g(0.0001), "0.0001");
    }

    #[test]
    fn aggregate_bias_variance() {
        let r = aggregate(1.0, 10, 1.0, &[Some(1.5), Some(0.5), Some(2.0), None]);
        assert_eq!(r.failures, 1);
        assert!((r.ab - 1.0 / 3.0).abs() < 1e-15);
        assert!(r.mse >= r.ab * r.ab);
    }

    #[test]
    fn dataset_shape() {
        let d = wind_speed_dataset();
        assert_eq!(d.len(), 30);
        assert_eq!(d.values()[0], 0.5833);
        assert_eq!(d.values()[29], 2.7778);
    }
}
