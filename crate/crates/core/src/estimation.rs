//! Kernel and maximum-likelihood estimators of WPVE and WPDVE.
//!
//! The kernel estimator plugs a Gaussian KDE `g_hat` into the past window
//! `(0, t)` normalised by `G_hat(t) = ∫_0^t g_hat`, and for the paired
//! measure also into `(t, max + 10 b)` normalised by the KDE mass there.
//! Mass leaking below zero is ignored unless [`Boundary::Renormalize`] is set.

use std::f64::consts::PI;

use crate::distributions::mle_exponential;
use crate::error::{Error, Result};
use crate::measures::{wpdve, wpve, Weight, VARIANCE_FLOOR};
use crate::quadrature::{integrate, DEFAULT_REL_TOL};

/// How the KDE treats mass below zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Plain Gaussian KDE.
    #[default]
    None,
    /// Divide by the KDE mass on `(0, max + 10 b)`.
    Renormalize,
}

/// Gaussian kernel density estimate of a positive sample.
#[derive(Debug, Clone)]
pub struct KernelEstimator {
    sample: Vec<f64>,
    bandwidth: f64,
    boundary: Boundary,
    ln_scale: f64,
}

impl KernelEstimator {
    pub fn new(sample: &[f64], bandwidth: f64) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::Data("empty sample".into()));
        }
        if let Some(x) = sample.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Data(format!("sample values must be positive and finite, got {x}")));
        }
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::Domain(format!("bandwidth must be positive, got {bandwidth}")));
        }
        let n = sample.len() as f64;
        Ok(Self {
            sample: sample.to_vec(),
            bandwidth,
            boundary: Boundary::None,
            ln_scale: (n * bandwidth * (2.0 * PI).sqrt()).ln(),
        })
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Result<Self> {
        if boundary == Boundary::Renormalize && self.boundary != Boundary::Renormalize {
            let mass = self.positive_mass()?;
            self.ln_scale += mass.ln();
        }
        self.boundary = boundary;
        Ok(self)
    }

    pub fn sample(&self) -> &[f64] {
        &self.sample
    }
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Upper end of the evaluation range, `max(sample) + 10 b`.
    pub fn upper_limit(&self) -> f64 {
        self.sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 10.0 * self.bandwidth
    }

    /// `ln g_hat(y)` by log-sum-exp.
    pub fn ln_pdf(&self, y: f64) -> f64 {
        let b = self.bandwidth;
        let mut zmin = f64::INFINITY;
        for &x in &self.sample {
            let z = ((y - x) / b).abs();
            zmin = zmin.min(z);
        }
        let top = -0.5 * zmin * zmin;
        let s: f64 = self
            .sample
            .iter()
            .map(|&x| {
                let z = (y - x) / b;
                (-0.5 * z * z - top).exp()
            })
            .sum();
        top + s.ln() - self.ln_scale
    }

    pub fn pdf(&self, y: f64) -> f64 {
        self.ln_pdf(y).exp()
    }

    /// `∫_a^b g_hat`.
    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        if a >= b {
            return Ok(0.0);
        }
        Ok(integrate(|y| self.pdf(y), a, b, DEFAULT_REL_TOL)?.value)
    }

    /// `G_hat(t) = ∫_0^t g_hat`.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        self.mass(0.0, t)
    }

    /// `∫_0^{max + 10 b} g_hat`.
    pub fn positive_mass(&self) -> Result<f64> {
        self.mass(0.0, self.upper_limit())
    }
}

pub fn kde_pdf(k: &KernelEstimator, y: f64) -> f64 {
    k.pdf(y)
}

pub fn kde_cdf(k: &KernelEstimator, t: f64) -> Result<f64> {
    k.cdf(t)
}

/// Smallest window mass accepted by the plug-in estimators.
pub const MIN_WINDOW_MASS: f64 = 1e-12;

/// Variance of `-y ln(g(y)/mass)` under the density `g/mass` on `(a, b)`,
/// given `ln g`. Shared by the kernel estimators and usable with any density.
pub fn plugin_variance<F: Fn(f64) -> f64>(ln_g: F, mass: f64, a: f64, b: f64) -> Result<f64> {
    if !(mass >= MIN_WINDOW_MASS) {
        return Err(Error::Domain(format!("window ({a}, {b}) has mass {mass:e}")));
    }
    let ln_mass = mass.ln();
    let moment = |h: &dyn Fn(f64, f64) -> f64| -> Result<f64> {
        Ok(integrate(
            |y| {
                let lf = ln_g(y) - ln_mass;
                let f = lf.exp();
                if f == 0.0 {
                    0.0
                } else {
                    f * h(y, lf)
                }
            },
            a,
            b,
            DEFAULT_REL_TOL,
        )?
        .value)
    };
    let m = moment(&|y, lf| -y * lf)?;
    let v = moment(&|y, lf| (-y * lf - m).powi(2))?;
    if v < VARIANCE_FLOOR {
        return Err(Error::Consistency(format!("plug-in variance evaluated to {v}")));
    }
    Ok(v.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Nonparametric,
    Parametric,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Nonparametric => "nonparametric",
            Method::Parametric => "parametric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Auxiliary {
    /// `G_hat(t)`.
    PastMass(f64),
    /// `G_hat(t)` and the KDE mass on `(t, max + 10 b)`.
    PairedMass { past: f64, residual: f64 },
    /// Fitted exponential rate.
    Rate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub value: f64,
    pub method: Method,
    pub t: f64,
    pub auxiliary: Auxiliary,
}

/// Kernel estimate of the WPVE (weight `y`) at `t`.
pub fn wpve_nonparametric(k: &KernelEstimator, t: f64) -> Result<EstimateResult> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let g_t = k.cdf(t)?;
    let value = plugin_variance(|y| k.ln_pdf(y), g_t, 0.0, t)?;
    Ok(EstimateResult {
        value,
        method: Method::Nonparametric,
        t,
        auxiliary: Auxiliary::PastMass(g_t),
    })
}

/// Kernel estimate of the WPDVE (weight `y`) at `t`.
pub fn wpdve_nonparametric(k: &KernelEstimator, t: f64) -> Result<EstimateResult> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let top = k.upper_limit();
    if !(t < top) {
        return Err(Error::Domain(format!("t = {t} is beyond the KDE range {top}")));
    }
    let g_t = k.cdf(t)?;
    let gbar_t = k.mass(t, top)?;
    let past = plugin_variance(|y| k.ln_pdf(y), g_t, 0.0, t)?;
    let residual = plugin_variance(|y| k.ln_pdf(y), gbar_t, t, top)?;
    Ok(EstimateResult {
        value: past + residual,
        method: Method::Nonparametric,
        t,
        auxiliary: Auxiliary::PairedMass {
            past: g_t,
            residual: gbar_t,
        },
    })
}

/// WPVE of the exponential law at the maximum-likelihood rate.
pub fn wpve_parametric_exponential(sample: &[f64], t: f64) -> Result<EstimateResult> {
    let d = mle_exponential(sample)?;
    let rate = d.family().parameters()[0].1;
    Ok(EstimateResult {
        value: wpve(&d, &Weight::Identity, t)?.value,
        method: Method::Parametric,
        t,
        auxiliary: Auxiliary::Rate(rate),
    })
}

/// WPDVE of the exponential law at the maximum-likelihood rate.
pub fn wpdve_parametric_exponential(sample: &[f64], t: f64) -> Result<EstimateResult> {
    let d = mle_exponential(sample)?;
    let rate = d.family().parameters()[0].1;
    Ok(EstimateResult {
        value: wpdve(&d, &Weight::Identity, t)?.value,
        method: Method::Parametric,
        t,
        auxiliary: Auxiliary::Rate(rate),
    })
}

/// Sample quantile with linear interpolation between order statistics
/// (`h = (n - 1) p`).
pub fn sample_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `0.9 min(sd, IQR / 1.34) n^(-1/5)`.
pub fn silverman_bandwidth(sample: &[f64]) -> Result<f64> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::Data("bandwidth rule needs at least two observations".into()));
    }
    let mean = sample.iter().sum::<f64>() / n as f64;
    let sd = (sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = sample_quantile(&sorted, 0.75) - sample_quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let b = 0.9 * spread * (n as f64).powf(-0.2);
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Data(format!("bandwidth rule gives {b}")));
    }
    Ok(b)
}
