//! Coherent systems of identically distributed components.
//!
//! A system with distortion function `q` has CDF `q(G(y))` and density
//! `q'(G(y)) g(y)`. Measures of the system lifetime `T` can be evaluated
//! directly on that law or in the component quantile domain `u = G(y)`,
//! where the past law of `T` at `t` has density `q'(u)/q(G(t))` on
//! `(0, G(t))`. Both routes are exposed and agree to quadrature accuracy.

use std::fmt;
use std::sync::Arc;

use crate::distributions::{check_probability, Distribution, Lifetime};
use crate::error::{Error, Result};
use crate::measures::closed::wpve_power_closed;
use crate::quadrature::{integrate, DEFAULT_REL_TOL};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Non-decreasing `q: [0,1] -> [0,1]` with `q(0) = 0`, `q(1) = 1`.
#[derive(Clone)]
pub struct DistortionFunction {
    name: String,
    q: RealFn,
    dq: RealFn,
}

impl fmt::Debug for DistortionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DistortionFunction({})", self.name)
    }
}

impl DistortionFunction {
    /// Validates `q` and `q'` on a 512-point grid.
    pub fn new(
        name: impl Into<String>,
        q: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dq: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let d = Self {
            name: name.into(),
            q: Arc::new(q),
            dq: Arc::new(dq),
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDistribution(format!("distortion {}: {msg}", self.name)));
        if (self.eval(0.0)).abs() > 1e-12 || (self.eval(1.0) - 1.0).abs() > 1e-12 {
            return bad(format!("q(0) = {}, q(1) = {}", self.eval(0.0), self.eval(1.0)));
        }
        let n = 512;
        let mut prev = self.eval(0.0);
        for i in 0..n {
            let u = i as f64 / (n - 1) as f64;
            let v = self.eval(u);
            if v < prev - 1e-15 || !v.is_finite() {
                return bad(format!("decreases near u = {u}"));
            }
            let d = self.derivative(u);
            if !(d >= 0.0) {
                return bad(format!("negative derivative {d} at u = {u}"));
            }
            prev = v;
        }
        Ok(())
    }

    /// Series system of three components, `1 - (1 - u)^3`.
    pub fn series() -> Self {
        Self {
            name: "series".into(),
            q: Arc::new(|u| 1.0 - (1.0 - u).powi(3)),
            dq: Arc::new(|u| 3.0 * (1.0 - u).powi(2)),
        }
    }

    /// 2-out-of-3 system, `3u^2 - 2u^3`.
    pub fn two_of_three() -> Self {
        Self {
            name: "2-of-3".into(),
            q: Arc::new(|u| u * u * (3.0 - 2.0 * u)),
            dq: Arc::new(|u| 6.0 * u * (1.0 - u)),
        }
    }

    /// Parallel system of three components, `u^3`.
    pub fn parallel() -> Self {
        Self {
            name: "parallel".into(),
            q: Arc::new(|u| u * u * u),
            dq: Arc::new(|u| 3.0 * u * u),
        }
    }

    /// Single component, `q(u) = u`.
    pub fn identity() -> Self {
        Self {
            name: "identity".into(),
            q: Arc::new(|u| u),
            dq: Arc::new(|_| 1.0),
        }
    }

    /// `q(u) = sum_k c_k u^k` with coefficients for `k = 1, 2, ...`.
    pub fn polynomial(coefficients: &[f64]) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidDistribution("polynomial distortion needs coefficients".into()));
        }
        let c: Vec<f64> = coefficients.to_vec();
        let c2 = c.clone();
        let name = format!(
            "poly({})",
            c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        );
        Self::new(
            name,
            move |u| c.iter().rev().fold(0.0, |acc, &ck| (acc + ck) * u),
            move |u| {
                c2.iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (k, &ck)| acc * u + (k as f64 + 1.0) * ck)
            },
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        (self.q)(u)
    }
    #[inline]
    pub fn derivative(&self, u: f64) -> f64 {
        (self.dq)(u)
    }

    /// `q^-1(p)` by bisection to 1e-13.
    pub fn inverse(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Components plus structure.
#[derive(Debug, Clone)]
pub struct CoherentSystem {
    pub component: Distribution,
    pub q: DistortionFunction,
}

impl CoherentSystem {
    pub fn new(component: Distribution, q: DistortionFunction) -> Self {
        Self { component, q }
    }
}

/// Lifetime law of a coherent system.
#[derive(Debug, Clone)]
pub struct SystemDistribution {
    system: CoherentSystem,
}

/// The system lifetime as a [`Lifetime`].
pub fn system_distribution(s: &CoherentSystem) -> SystemDistribution {
    SystemDistribution { system: s.clone() }
}

impl Lifetime for SystemDistribution {
    fn support(&self) -> (f64, f64) {
        self.system.component.support()
    }
    fn pdf(&self, y: f64) -> f64 {
        let g = self.system.component.pdf(y);
        if g == 0.0 {
            return 0.0;
        }
        self.system.q.derivative(self.system.component.cdf(y)) * g
    }
    fn ln_pdf(&self, y: f64) -> f64 {
        let lg = self.system.component.ln_pdf(y);
        if lg == f64::NEG_INFINITY {
            return lg;
        }
        self.system.q.derivative(self.system.component.cdf(y)).ln() + lg
    }
    fn cdf(&self, y: f64) -> f64 {
        self.system.q.eval(self.system.component.cdf(y))
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        let u = self.system.q.inverse(p)?;
        self.system.component.quantile(u)
    }
}

/// Past law of the system in the component quantile domain.
struct UDomain<'a> {
    s: &'a CoherentSystem,
    g_t: f64,
    ln_gt: f64,
}

impl<'a> UDomain<'a> {
    fn new(s: &'a CoherentSystem, t: f64) -> Result<Self> {
        let g_t = s.component.cdf(t);
        let gt_sys = s.q.eval(g_t);
        if !(gt_sys > 0.0) {
            return Err(Error::Domain(format!("system CDF vanishes at t = {t}")));
        }
        Ok(Self {
            s,
            g_t,
            ln_gt: gt_sys.ln(),
        })
    }

    /// `(y, ln f_T(y), q'(u)/G_T(t))` at component quantile `u`.
    fn point(&self, u: f64) -> Option<(f64, f64, f64)> {
        let y = self.s.component.quantile(u).ok()?;
        let dq = self.s.q.derivative(u);
        if !(dq > 0.0) {
            return None;
        }
        let lf = dq.ln() + self.s.component.ln_pdf(y) - self.ln_gt;
        let weight = (dq.ln() - self.ln_gt).exp();
        if !lf.is_finite() {
            return None;
        }
        Some((y, lf, weight))
    }

    fn expect<H: Fn(f64, f64) -> f64>(&self, h: H) -> Result<f64> {
        let r = integrate(
            |u| match self.point(u) {
                Some((y, lf, w)) => w * h(y, lf),
                None => 0.0,
            },
            0.0,
            self.g_t,
            DEFAULT_REL_TOL,
        )?;
        Ok(r.value)
    }

    fn variance<H: Fn(f64, f64) -> f64>(&self, h: H) -> Result<f64> {
        let m = self.expect(&h)?;
        Ok(self.expect(|y, lf| (h(y, lf) - m).powi(2))?.max(0.0))
    }
}

/// System WPVE (weight `y`) through the component quantile domain.
pub fn wpve_system(s: &CoherentSystem, t: f64) -> Result<f64> {
    UDomain::new(s, t)?.variance(|y, lf| -y * lf)
}

/// Unweighted past varentropy of the system.
pub fn pve_system(s: &CoherentSystem, t: f64) -> Result<f64> {
    UDomain::new(s, t)?.variance(|_, lf| -lf)
}

/// Weighted (weight `y`) past entropy of the system.
pub fn wpse_system(s: &CoherentSystem, t: f64) -> Result<f64> {
    UDomain::new(s, t)?.expect(|y, lf| -y * lf)
}

/// Weighted past Renyi entropy of order `alpha`:
/// `(1/(1-alpha)) ln ∫ (y f_T(y))^alpha dy` over the past window, evaluated
/// in the quantile domain (the integral runs to `G(t)`).
pub fn wpre_system(s: &CoherentSystem, t: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || alpha == 1.0 {
        return Err(Error::Domain(format!("Renyi order must be positive and not 1, got {alpha}")));
    }
    let ud = UDomain::new(s, t)?;
    let r = integrate(
        |u| {
            let Some((y, lf, _)) = ud.point(u) else {
                return 0.0;
            };
            let lg = s.component.ln_pdf(y);
            (alpha * (y.ln() + lf) - lg).exp()
        },
        0.0,
        ud.g_t,
        DEFAULT_REL_TOL,
    )?;
    Ok(r.value.ln() / (1.0 - alpha))
}

/// Closed-form WPVE of the parallel system over unit-scale power components:
/// the system law is the power law with shape `3 beta`.
pub fn wpve_parallel_power_closed(beta: f64, t: f64) -> Result<f64> {
    wpve_power_closed(3.0 * beta, 1.0, t)
}

/// One row of a system comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemRow {
    pub system: String,
    pub wpve: f64,
    pub pve: f64,
    pub wpre: f64,
    pub wpse: f64,
}

/// WPVE, past VE, weighted past Renyi entropy and weighted past entropy for
/// each distortion function.
pub fn compare_with(component: Distribution, qs: &[DistortionFunction], t: f64, alpha: f64) -> Result<Vec<SystemRow>> {
    qs.iter()
        .map(|q| {
            let s = CoherentSystem::new(component, q.clone());
            Ok(SystemRow {
                system: q.name().to_string(),
                wpve: wpve_system(&s, t)?,
                pve: pve_system(&s, t)?,
                wpre: wpre_system(&s, t, alpha)?,
                wpse: wpse_system(&s, t)?,
            })
        })
        .collect()
}

/// Series, 2-of-3 and parallel rows.
pub fn compare_systems(component: Distribution, t: f64, alpha: f64) -> Result<Vec<SystemRow>> {
    compare_with(
        component,
        &[
            DistortionFunction::series(),
            DistortionFunction::two_of_three(),
            DistortionFunction::parallel(),
        ],
        t,
        alpha,
    )
}
