//! Parametric lifetime laws.
//!
//! Every law implements [`Lifetime`], which is what the measures, estimators
//! and bounds consume. [`Distribution`] is the closed catalog of families;
//! derived laws (reversed-hazard powers, coherent systems) implement the trait
//! on their own types.

mod fit;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use fit::{kolmogorov_sf, ks_test, mle_exponential, mle_fit, FitFamily, FitResult, FitStatus};

/// Density, distribution and quantile functions over a declared support.
///
/// `ln_pdf`, `ln_cdf` and `ln_sf` have defaults but families override them
/// when the direct formula avoids underflow; the measures work in log space.
pub trait Lifetime: Sync {
    /// Closed support `[lo, hi]`; `hi` may be `+inf`.
    fn support(&self) -> (f64, f64);
    fn pdf(&self, y: f64) -> f64;
    fn cdf(&self, y: f64) -> f64;
    fn quantile(&self, p: f64) -> Result<f64>;

    fn ln_pdf(&self, y: f64) -> f64 {
        self.pdf(y).ln()
    }
    fn sf(&self, y: f64) -> f64 {
        1.0 - self.cdf(y)
    }
    fn ln_cdf(&self, y: f64) -> f64 {
        self.cdf(y).ln()
    }
    fn ln_sf(&self, y: f64) -> f64 {
        self.sf(y).ln()
    }
}

impl<T: Lifetime + ?Sized> Lifetime for &T {
    fn support(&self) -> (f64, f64) {
        (**self).support()
    }
    fn pdf(&self, y: f64) -> f64 {
        (**self).pdf(y)
    }
    fn cdf(&self, y: f64) -> f64 {
        (**self).cdf(y)
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        (**self).quantile(p)
    }
    fn ln_pdf(&self, y: f64) -> f64 {
        (**self).ln_pdf(y)
    }
    fn sf(&self, y: f64) -> f64 {
        (**self).sf(y)
    }
    fn ln_cdf(&self, y: f64) -> f64 {
        (**self).ln_cdf(y)
    }
    fn ln_sf(&self, y: f64) -> f64 {
        (**self).ln_sf(y)
    }
}

/// Rejects probabilities outside `[0, 1]`.
pub fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("probability must lie in [0, 1], got {p}")))
    }
}

/// Family and parameters of a catalog law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `G(y) = (y - a)/(b - a)` on `[a, b]`.
    Uniform { a: f64, b: f64 },
    /// `G(y) = 1 - exp(-lambda y)`.
    Exponential { lambda: f64 },
    /// `G(y) = 1 - y^(-alpha)` on `[1, inf)`.
    ParetoI { alpha: f64 },
    /// `G(y) = 1 - exp(-lambda sqrt(y))`, the law of `Y^2` for exponential `Y`.
    SqrtWeibull { lambda: f64 },
    /// `G(y) = (y/scale)^beta` on `[0, scale]`.
    Power { beta: f64, scale: f64 },
    /// `G(y) = 1 - (1 + y/delta)^(-gamma)`.
    Lomax { delta: f64, gamma: f64 },
    /// `Y + beta` with `Y` standard exponential.
    ShiftedExponential { beta: f64 },
    /// Inverse-Weibull form `G(y) = exp(-lambda y^(-alpha))`.
    GumbelII { alpha: f64, lambda: f64 },
    /// Two-parameter Weibull, `G(y) = 1 - exp(-(y/scale)^shape)`.
    Weibull { shape: f64, scale: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Uniform { .. } => "uniform",
            Family::Exponential { .. } => "exponential",
            Family::ParetoI { .. } => "pareto",
            Family::SqrtWeibull { .. } => "weibull-sqrt",
            Family::Power { .. } => "power",
            Family::Lomax { .. } => "lomax",
            Family::ShiftedExponential { .. } => "shifted-exp",
            Family::GumbelII { .. } => "gumbel2",
            Family::Weibull { .. } => "weibull",
        }
    }

    /// `(name, value)` pairs in constructor order.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Family::Uniform { a, b } => vec![("a", a), ("b", b)],
            Family::Exponential { lambda } => vec![("lambda", lambda)],
            Family::ParetoI { alpha } => vec![("alpha", alpha)],
            Family::SqrtWeibull { lambda } => vec![("lambda", lambda)],
            Family::Power { beta, scale } => vec![("beta", beta), ("scale", scale)],
            Family::Lomax { delta, gamma } => vec![("delta", delta), ("gamma", gamma)],
            Family::ShiftedExponential { beta } => vec![("beta", beta)],
            Family::GumbelII { alpha, lambda } => vec![("alpha", alpha), ("lambda", lambda)],
            Family::Weibull { shape, scale } => vec![("shape", shape), ("scale", scale)],
        }
    }
}

/// A validated catalog law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distribution {
    family: Family,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDistribution(format!(
            "{name} must be finite and positive, got {v}"
        )))
    }
}

impl Distribution {
    pub fn new(family: Family) -> Result<Self> {
        match family {
            Family::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::InvalidDistribution(format!(
                        "uniform needs finite a < b, got a={a}, b={b}"
                    )));
                }
            }
            Family::Exponential { lambda } | Family::SqrtWeibull { lambda } => {
                positive("lambda", lambda)?
            }
            Family::ParetoI { alpha } => positive("alpha", alpha)?,
            Family::Power { beta, scale } => {
                positive("beta", beta)?;
                positive("scale", scale)?;
            }
            Family::Lomax { delta, gamma } => {
                positive("delta", delta)?;
                positive("gamma", gamma)?;
            }
            Family::ShiftedExponential { beta } => {
                if !(beta.is_finite() && beta >= 0.0) {
                    return Err(Error::InvalidDistribution(format!(
                        "shift must be finite and non-negative, got {beta}"
                    )));
                }
            }
            Family::GumbelII { alpha, lambda } => {
                positive("alpha", alpha)?;
                positive("lambda", lambda)?;
            }
            Family::Weibull { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)?;
            }
        }
        Ok(Self { family })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::new(Family::Uniform { a, b })
    }
    pub fn exponential(lambda: f64) -> Result<Self> {
        Self::new(Family::Exponential { lambda })
    }
    pub fn pareto(alpha: f64) -> Result<Self> {
        Self::new(Family::ParetoI { alpha })
    }
    pub fn sqrt_weibull(lambda: f64) -> Result<Self> {
        Self::new(Family::SqrtWeibull { lambda })
    }
    pub fn power(beta: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Power { beta, scale })
    }
    pub fn lomax(delta: f64, gamma: f64) -> Result<Self> {
        Self::new(Family::Lomax { delta, gamma })
    }
    pub fn shifted_exponential(beta: f64) -> Result<Self> {
        Self::new(Family::ShiftedExponential { beta })
    }
    pub fn gumbel2(alpha: f64, lambda: f64) -> Result<Self> {
        Self::new(Family::GumbelII { alpha, lambda })
    }
    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Self::new(Family::Weibull { shape, scale })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn name(&self) -> &'static str {
        self.family.name()
    }

    fn inside(&self, y: f64) -> bool {
        let (lo, hi) = self.support();
        y >= lo && y <= hi
    }
}

/// `ln(1 - exp(-x))` for `x > 0` without cancellation.
fn ln_one_minus_exp_neg(x: f64) -> f64 {
    if x > std::f64::consts::LN_2 {
        (-(-x).exp()).ln_1p()
    } else {
        (-(-x).exp_m1()).ln()
    }
}

impl Lifetime for Distribution {
    fn support(&self) -> (f64, f64) {
        match self.family {
            Family::Uniform { a, b } => (a, b),
            Family::ParetoI { .. } => (1.0, f64::INFINITY),
            Family::Power { scale, .. } => (0.0, scale),
            Family::ShiftedExponential { beta } => (beta, f64::INFINITY),
            _ => (0.0, f64::INFINITY),
        }
    }

    fn pdf(&self, y: f64) -> f64 {
        if !self.inside(y) {
            return 0.0;
        }
        match self.family {
            Family::Uniform { a, b } => 1.0 / (b - a),
            Family::Power { beta, scale } => beta * y.powf(beta - 1.0) / scale.powf(beta),
            Family::GumbelII { .. } if y == 0.0 => 0.0,
            _ => self.ln_pdf(y).exp(),
        }
    }

    fn ln_pdf(&self, y: f64) -> f64 {
        if !self.inside(y) {
            return f64::NEG_INFINITY;
        }
        match self.family {
            Family::Uniform { a, b } => -(b - a).ln(),
            Family::Exponential { lambda } => lambda.ln() - lambda * y,
            Family::ParetoI { alpha } => alpha.ln() - (alpha + 1.0) * y.ln(),
            Family::SqrtWeibull { lambda } => {
                let r = y.sqrt();
                lambda.ln() - lambda * r - std::f64::consts::LN_2 - r.ln()
            }
            Family::Power { beta, scale } => beta.ln() + (beta - 1.0) * y.ln() - beta * scale.ln(),
            Family::Lomax { delta, gamma } => {
                gamma.ln() - delta.ln() - (gamma + 1.0) * (y / delta).ln_1p()
            }
            Family::ShiftedExponential { beta } => -(y - beta),
            Family::GumbelII { alpha, lambda } => {
                if y == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let ly = y.ln();
                alpha.ln() + lambda.ln() - (alpha + 1.0) * ly - lambda * (-alpha * ly).exp()
            }
            Family::Weibull { shape, scale } => {
                let lz = (y / scale).ln();
                shape.ln() - scale.ln() + (shape - 1.0) * lz - (shape * lz).exp()
            }
        }
    }

    fn cdf(&self, y: f64) -> f64 {
        let (lo, hi) = self.support();
        if y <= lo {
            return 0.0;
        }
        if y >= hi {
            return 1.0;
        }
        match self.family {
            Family::Uniform { a, b } => (y - a) / (b - a),
            Family::Power { beta, scale } => (y / scale).powf(beta),
            Family::GumbelII { .. } => self.ln_cdf(y).exp(),
            _ => -(-self.cumulative_hazard(y)).exp_m1(),
        }
    }

    fn sf(&self, y: f64) -> f64 {
        let (lo, hi) = self.support();
        if y <= lo {
            return 1.0;
        }
        if y >= hi {
            return 0.0;
        }
        match self.family {
            Family::Uniform { a, b } => (b - y) / (b - a),
            Family::Power { .. } => 1.0 - self.cdf(y),
            Family::GumbelII { alpha, lambda } => -(-lambda * y.powf(-alpha)).exp_m1(),
            _ => (-self.cumulative_hazard(y)).exp(),
        }
    }

    fn ln_cdf(&self, y: f64) -> f64 {
        let (lo, hi) = self.support();
        if y <= lo {
            return f64::NEG_INFINITY;
        }
        if y >= hi {
            return 0.0;
        }
        match self.family {
            Family::Uniform { .. } => self.cdf(y).ln(),
            Family::Power { beta, scale } => beta * (y / scale).ln(),
            Family::GumbelII { alpha, lambda } => -lambda * y.powf(-alpha),
            _ => ln_one_minus_exp_neg(self.cumulative_hazard(y)),
        }
    }

    fn ln_sf(&self, y: f64) -> f64 {
        let (lo, hi) = self.support();
        if y <= lo {
            return 0.0;
        }
        if y >= hi {
            return f64::NEG_INFINITY;
        }
        match self.family {
            Family::Uniform { .. } | Family::Power { .. } | Family::GumbelII { .. } => {
                self.sf(y).ln()
            }
            _ => -self.cumulative_hazard(y),
        }
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        let (lo, hi) = self.support();
        if p == 0.0 {
            return Ok(lo);
        }
        if p == 1.0 {
            return Ok(hi);
        }
        // -ln(1 - p), the cumulative hazard at the quantile.
        let h = -(-p).ln_1p();
        Ok(match self.family {
            Family::Uniform { a, b } => a + p * (b - a),
            Family::Exponential { lambda } => h / lambda,
            Family::ParetoI { alpha } => (h / alpha).exp(),
            Family::SqrtWeibull { lambda } => (h / lambda).powi(2),
            Family::Power { beta, scale } => scale * p.powf(1.0 / beta),
            Family::Lomax { delta, gamma } => delta * (h / gamma).exp_m1(),
            Family::ShiftedExponential { beta } => beta + h,
            Family::GumbelII { alpha, lambda } => (-p.ln() / lambda).powf(-1.0 / alpha),
            Family::Weibull { shape, scale } => scale * h.powf(1.0 / shape),
        })
    }
}

impl Distribution {
    /// `-ln Gbar(y)` for the families whose survival function has that form.
    fn cumulative_hazard(&self, y: f64) -> f64 {
        match self.family {
            Family::Exponential { lambda } => lambda * y,
            Family::ParetoI { alpha } => alpha * y.ln(),
            Family::SqrtWeibull { lambda } => lambda * y.sqrt(),
            Family::Lomax { delta, gamma } => gamma * (y / delta).ln_1p(),
            Family::ShiftedExponential { beta } => y - beta,
            Family::Weibull { shape, scale } => (y / scale).powf(shape),
            Family::Uniform { .. } | Family::Power { .. } | Family::GumbelII { .. } => {
                -self.sf(y).ln()
            }
        }
    }
}

/// Density at `y`.
pub fn pdf_at<D: Lifetime + ?Sized>(d: &D, y: f64) -> f64 {
    d.pdf(y)
}

/// Distribution function at `y`.
pub fn cdf_at<D: Lifetime + ?Sized>(d: &D, y: f64) -> f64 {
    d.cdf(y)
}

/// Quantile at `p`; `p` outside `[0, 1]` is a domain error.
pub fn quantile_at<D: Lifetime + ?Sized>(d: &D, p: f64) -> Result<f64> {
    d.quantile(p)
}

/// RNG for stream `stream` of master seed `seed`. Distinct streams of the same
/// seed are independent, so replicate `r` can be generated without touching
/// replicates `0..r`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform variate strictly inside `(0, 1)`.
pub fn open_unit<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Inverse-transform sample drawn from `rng`.
pub fn sample_with<D: Lifetime + ?Sized, R: RngCore>(d: &D, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Domain("sample size must be at least 1".into()));
    }
    (0..n).map(|_| d.quantile(open_unit(rng))).collect()
}

/// `n` inverse-transform draws; the seed fixes the whole stream.
pub fn sample_n<D: Lifetime + ?Sized>(d: &D, n: usize, seed: u64) -> Result<Vec<f64>> {
    sample_with(d, n, &mut rng_for(seed, 0))
}

/// Log-likelihood of an i.i.d. sample.
pub fn log_likelihood<D: Lifetime + ?Sized>(d: &D, sample: &[f64]) -> f64 {
    sample.iter().map(|&y| d.ln_pdf(y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_density_at_zero_is_rate() {
        let d = Distribution::exponential(0.7).unwrap();
        assert!((d.pdf(0.0) - 0.7).abs() < 1e-15);
        assert_eq!(d.cdf(0.0), 0.0);
    }

    #[test]
    fn uniform_outside_support_is_zero() {
        let d = Distribution::uniform(0.0, 2.0).unwrap();
        assert_eq!(d.pdf(3.0), 0.0);
    }

    #[test]
    fn gumbel_density_matches_hand_formula() {
        let d = Distribution::gumbel2(3.3869, 0.7544).unwrap();
        let expected = 3.3869 * 0.7544 * (-0.7544f64).exp();
        assert!((d.pdf(1.0) - expected).abs() < 1e-14);
        assert_eq!(d.pdf(0.0), 0.0);
    }

    #[test]
    fn simple_quantiles() {
        let p = Distribution::pareto(2.0).unwrap();
        assert!((p.quantile(0.75).unwrap() - 2.0).abs() < 1e-14);
        let pw = Distribution::power(0.2, 1.0).unwrap();
        for u in [0.1, 0.5, 0.9] {
            assert!((pw.quantile(u).unwrap() - u.powi(5)).abs() < 1e-15);
        }
        assert!(p.quantile(1.5).is_err());
        assert!(p.quantile(-0.1).is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Distribution::exponential(f64::NAN).is_err());
        assert!(Distribution::exponential(f64::INFINITY).is_err());
        assert!(Distribution::uniform(1.0, 1.0).is_err());
        assert!(Distribution::gumbel2(-1.0, 1.0).is_err());
    }

    #[test]
    fn survival_and_logs_agree() {
        let laws = [
            Distribution::exponential(0.7).unwrap(),
            Distribution::lomax(1.0, 3.0).unwrap(),
            Distribution::gumbel2(3.3869, 0.7544).unwrap(),
            Distribution::weibull(2.5, 1.3).unwrap(),
            Distribution::sqrt_weibull(1.0).unwrap(),
            Distribution::power(0.2, 1.0).unwrap(),
        ];
        for d in laws {
            for y in [0.25, 0.6, 0.9] {
                let c = d.cdf(y);
                assert!((c + d.sf(y) - 1.0).abs() < 1e-14, "{d:?}");
                assert!((d.ln_cdf(y) - c.ln()).abs() < 1e-12, "{d:?}");
                assert!((d.ln_sf(y) - d.sf(y).ln()).abs() < 1e-12, "{d:?}");
                assert!((d.ln_pdf(y) - d.pdf(y).ln()).abs() < 1e-12, "{d:?}");
            }
        }
    }

    #[test]
    fn sampling_is_reproducible_and_stream_separated() {
        let d = Distribution::exponential(0.7).unwrap();
        let a = sample_n(&d, 50, 9).unwrap();
        let b = sample_n(&d, 50, 9).unwrap();
        assert_eq!(a, b);
        let c = sample_with(&d, 50, &mut rng_for(9, 1)).unwrap();
        assert_ne!(a, c);
        assert!(a.iter().all(|&y| y > 0.0));
        assert!(sample_n(&d, 0, 9).is_err());
    }
}
