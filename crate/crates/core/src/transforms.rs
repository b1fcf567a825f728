//! Monotone transformations and the proportional reversed hazard model.
//!
//! For `X = psi(Y)` with `psi` increasing, the past law of `X` at `t` is the
//! image of the past law of `Y` at `s = psi^-1(t)`, and the weight-`x`
//! information content splits as
//! `W_X(psi(y)) = -psi(y) ln(g(y)/G(s)) + psi(y) ln psi'(y)`.
//! Expanding the variance of that sum gives the WPVE of `X` from conditional
//! moments of `Y`. A decreasing map swaps the past window of `X` for the
//! residual window of `Y` beyond `s` and uses `ln(-psi')`.

use std::fmt;
use std::sync::Arc;

use crate::distributions::{check_probability, Distribution, Lifetime};
use crate::error::{Error, Result};
use crate::measures::{Weight, Window};
use crate::quadrature::{integrate, DEFAULT_REL_TOL};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Strictly monotone map with caller-supplied derivative and inverse.
#[derive(Clone)]
pub struct MonotoneMap {
    name: String,
    f: RealFn,
    df: RealFn,
    inv: RealFn,
    direction: Direction,
}

impl fmt::Debug for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonotoneMap({}, {:?})", self.name, self.direction)
    }
}

impl MonotoneMap {
    /// Builds a map and validates it on 128 points of `domain`: the derivative
    /// must have the declared sign and `inv(f(y))` must return `y` to 1e-9.
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        direction: Direction,
        domain: (f64, f64),
    ) -> Result<Self> {
        let map = Self {
            name: name.into(),
            f: Arc::new(f),
            df: Arc::new(df),
            inv: Arc::new(inv),
            direction,
        };
        map.validate(domain)?;
        Ok(map)
    }

    fn validate(&self, (lo, hi): (f64, f64)) -> Result<()> {
        if !(lo < hi) {
            return Err(Error::InvalidMap(format!("empty domain [{lo}, {hi}]")));
        }
        let sign = match self.direction {
            Direction::Increasing => 1.0,
            Direction::Decreasing => -1.0,
        };
        let n = 128;
        let mut prev: Option<f64> = None;
        for i in 1..=n {
            let u = i as f64 / (n + 1) as f64;
            let y = if hi.is_finite() {
                lo + u * (hi - lo)
            } else {
                lo + u / (1.0 - u)
            };
            let v = self.apply(y);
            let d = self.derivative(y);
            if !(sign * d > 0.0) {
                return Err(Error::InvalidMap(format!(
                    "{}: derivative {d} at y = {y} contradicts {:?}",
                    self.name, self.direction
                )));
            }
            if let Some(p) = prev {
                if !(sign * (v - p) > 0.0) {
                    return Err(Error::InvalidMap(format!(
                        "{}: not strictly monotone near y = {y}",
                        self.name
                    )));
                }
            }
            prev = Some(v);
            let back = self.inverse(v);
            if (back - y).abs() > 1e-9 * y.abs().max(1.0) {
                return Err(Error::InvalidMap(format!(
                    "{}: inverse returns {back} for y = {y}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// `y -> y^2` on `(0, inf)`.
    pub fn square() -> Self {
        Self {
            name: "y^2".into(),
            f: Arc::new(|y| y * y),
            df: Arc::new(|y| 2.0 * y),
            inv: Arc::new(f64::sqrt),
            direction: Direction::Increasing,
        }
    }

    /// `y -> a y + b` with `a > 0`.
    pub fn affine(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidMap(format!("affine map needs a > 0, got a={a}, b={b}")));
        }
        Ok(Self {
            name: format!("{a}*y+{b}"),
            f: Arc::new(move |y| a * y + b),
            df: Arc::new(move |_| a),
            inv: Arc::new(move |x| (x - b) / a),
            direction: Direction::Increasing,
        })
    }

    /// `y -> 1/y` on `(0, inf)`.
    pub fn reciprocal() -> Self {
        Self {
            name: "1/y".into(),
            f: Arc::new(|y| 1.0 / y),
            df: Arc::new(|y| -1.0 / (y * y)),
            inv: Arc::new(|x| 1.0 / x),
            direction: Direction::Decreasing,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn direction(&self) -> Direction {
        self.direction
    }
    #[inline]
    pub fn apply(&self, y: f64) -> f64 {
        (self.f)(y)
    }
    #[inline]
    pub fn derivative(&self, y: f64) -> f64 {
        (self.df)(y)
    }
    #[inline]
    pub fn inverse(&self, x: f64) -> f64 {
        (self.inv)(x)
    }
}

/// Law of `psi(Y)` evaluated through the change of variables.
#[derive(Debug, Clone)]
pub struct TransformedLaw<D> {
    base: D,
    map: MonotoneMap,
}

impl<D: Lifetime> TransformedLaw<D> {
    pub fn new(base: D, map: MonotoneMap) -> Result<Self> {
        map.validate(base.support())?;
        Ok(Self { base, map })
    }
}

impl<D: Lifetime> Lifetime for TransformedLaw<D> {
    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.base.support();
        let (a, b) = (self.map.apply(lo), self.map.apply(hi));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
    fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }
    fn ln_pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(x >= lo && x <= hi) {
            return f64::NEG_INFINITY;
        }
        let y = self.map.inverse(x);
        self.base.ln_pdf(y) - self.map.derivative(y).abs().ln()
    }
    fn cdf(&self, x: f64) -> f64 {
        let y = self.map.inverse(x);
        match self.map.direction {
            Direction::Increasing => self.base.cdf(y),
            Direction::Decreasing => self.base.sf(y),
        }
    }
    fn sf(&self, x: f64) -> f64 {
        let y = self.map.inverse(x);
        match self.map.direction {
            Direction::Increasing => self.base.sf(y),
            Direction::Decreasing => self.base.cdf(y),
        }
    }
    fn ln_cdf(&self, x: f64) -> f64 {
        let y = self.map.inverse(x);
        match self.map.direction {
            Direction::Increasing => self.base.ln_cdf(y),
            Direction::Decreasing => self.base.ln_sf(y),
        }
    }
    fn ln_sf(&self, x: f64) -> f64 {
        let y = self.map.inverse(x);
        match self.map.direction {
            Direction::Increasing => self.base.ln_sf(y),
            Direction::Decreasing => self.base.ln_cdf(y),
        }
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        let y = match self.map.direction {
            Direction::Increasing => self.base.quantile(p)?,
            Direction::Decreasing => self.base.quantile(1.0 - p)?,
        };
        Ok(self.map.apply(y))
    }
}

/// WPVE (weight `x`) of `X = psi(Y)` at `t`, assembled from conditional
/// moments of `Y`:
/// `VE^psi + Var gamma - 2 E[psi gamma ln f] - 2 H^psi E[gamma]`, where
/// `f` is the density of `Y` on the matching window, `gamma = psi ln|psi'|`
/// and `VE^psi`, `H^psi` are the psi-weighted varentropy and entropy of `Y`.
pub fn wpve_via_transform<D: Lifetime + ?Sized>(d: &D, psi: &MonotoneMap, t: f64) -> Result<f64> {
    let s = psi.inverse(t);
    let win = match psi.direction {
        Direction::Increasing => Window::past(d, s)?,
        Direction::Decreasing => Window::residual(d, s)?,
    };
    transform_pieces(d, &win, |y| psi.apply(y), |y| psi.apply(y) * psi.derivative(y).abs().ln())
}

/// `Var(W_psi + gamma)` expanded into its pieces on one window.
fn transform_pieces<D, P, G>(d: &D, win: &Window, psi: P, gamma: G) -> Result<f64>
where
    D: Lifetime + ?Sized,
    P: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let (h_psi, ve_psi) = win.mean_and_variance(d, |y, lf| -psi(y) * lf)?;
    let (mean_gamma, var_gamma) = win.mean_and_variance(d, |y, _| gamma(y))?;
    let cross = win
        .expect(d, |y, lf| psi(y) * gamma(y) * lf, DEFAULT_REL_TOL)?
        .value;
    let v = ve_psi.value + var_gamma.value - 2.0 * cross - 2.0 * h_psi.value * mean_gamma.value;
    Ok(v.max(0.0))
}

fn affine_window<D: Lifetime + ?Sized>(d: &D, a: f64, b: f64, t: f64, past: bool) -> Result<Window> {
    if !(a > 0.0 && b >= 0.0) {
        return Err(Error::Domain(format!("affine map needs a > 0 and b >= 0, got a={a}, b={b}")));
    }
    let s = (t - b) / a;
    if past {
        Window::past(d, s)
    } else {
        Window::residual(d, s)
    }
}

/// WPVE of `aY + b` from moments of `Y` under the weight `w1 = a y + b`:
/// `VE^w1 + (ln a)^2 Var(w1) - 2 ln a E[w1^2 ln f] - 2 ln a H^w1 E[w1]`.
pub fn wpve_affine<D: Lifetime + ?Sized>(d: &D, a: f64, b: f64, t: f64) -> Result<f64> {
    let win = affine_window(d, a, b, t, true)?;
    Weight::Affine { a, b }.check_positive(win.a, win.b)?;
    let la = a.ln();
    transform_pieces(d, &win, |y| a * y + b, |y| (a * y + b) * la)
}

/// WPDVE of `aY + b`: the affine WPVE plus its residual counterpart on
/// `Y > (t - b)/a`.
pub fn wpdve_affine<D: Lifetime + ?Sized>(d: &D, a: f64, b: f64, t: f64) -> Result<f64> {
    let past = wpve_affine(d, a, b, t)?;
    let win = affine_window(d, a, b, t, false)?;
    let la = a.ln();
    let residual = transform_pieces(d, &win, |y| a * y + b, |y| (a * y + b) * la)?;
    Ok(past + residual)
}

/// Reversed-hazard power of a baseline law: `G2 = G1^a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrhrModel {
    pub baseline: Distribution,
    pub exponent: f64,
}

impl PrhrModel {
    pub fn new(baseline: Distribution, exponent: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "reversed-hazard exponent must be positive, got {exponent}"
            )));
        }
        Ok(Self { baseline, exponent })
    }
}

/// The law with CDF `G1^a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrhrDistribution {
    model: PrhrModel,
}

/// Distribution of the reversed-hazard model.
pub fn prhr_distribution(m: PrhrModel) -> PrhrDistribution {
    PrhrDistribution { model: m }
}

impl Lifetime for PrhrDistribution {
    fn support(&self) -> (f64, f64) {
        self.model.baseline.support()
    }
    fn pdf(&self, y: f64) -> f64 {
        self.ln_pdf(y).exp()
    }
    fn ln_pdf(&self, y: f64) -> f64 {
        let a = self.model.exponent;
        let b = &self.model.baseline;
        let lg = b.ln_pdf(y);
        if lg == f64::NEG_INFINITY {
            return lg;
        }
        let lc = if a == 1.0 { 0.0 } else { (a - 1.0) * b.ln_cdf(y) };
        a.ln() + lc + lg
    }
    fn cdf(&self, y: f64) -> f64 {
        self.ln_cdf(y).exp()
    }
    fn ln_cdf(&self, y: f64) -> f64 {
        self.model.exponent * self.model.baseline.ln_cdf(y)
    }
    fn sf(&self, y: f64) -> f64 {
        -self.ln_cdf(y).exp_m1()
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        self.model.baseline.quantile(p.powf(1.0 / self.model.exponent))
    }
}

/// WPVE of the reversed-hazard law at `t` from the quantile-domain integral:
/// with `x = G2(y)` uniform on `(0, G2(t))` under the past law,
/// `J(x) = -y ln(a x^(1-1/a) g1(y) / G2(t))` where `y = G1^-1(x^(1/a))`, and
/// the WPVE is the variance of `J` over that interval.
pub fn wpve_prhr(m: &PrhrModel, t: f64) -> Result<f64> {
    let a = m.exponent;
    let base = &m.baseline;
    let ln_g2t = a * base.ln_cdf(t);
    if !ln_g2t.is_finite() {
        return Err(Error::Domain(format!("G1({t}) = 0")));
    }
    let g2t = ln_g2t.exp();
    let j = |x: f64| -> f64 {
        let u = x.powf(1.0 / a);
        let Ok(y) = base.quantile(u.min(1.0)) else {
            return f64::NAN;
        };
        let lf = a.ln() + (1.0 - 1.0 / a) * x.ln() + base.ln_pdf(y) - ln_g2t;
        -y * lf
    };
    let mean = integrate(j, 0.0, g2t, DEFAULT_REL_TOL)?.value / g2t;
    let var = integrate(|x| (j(x) - mean).powi(2), 0.0, g2t, DEFAULT_REL_TOL)?.value / g2t;
    Ok(var.max(0.0))
}

/// Reversed-hazard power of the power law `(y/beta)^alpha` is the power law
/// with shape `a alpha`; its WPVE in closed form.
pub fn wpve_prhr_power_closed(alpha: f64, beta: f64, a: f64, t: f64) -> Result<f64> {
    crate::measures::closed::wpve_power_closed(a * alpha, beta, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{crhr, wpve, Weight};

    #[test]
    fn non_monotone_map_is_rejected() {
        let bad = MonotoneMap::new(
            "y^2-y",
            |y| y * y - y,
            |y| 2.0 * y - 1.0,
            |x| 0.5 + (0.25 + x).sqrt(),
            Direction::Increasing,
            (0.0, 2.0),
        );
        assert!(matches!(bad, Err(Error::InvalidMap(_))));
    }

    #[test]
    fn identity_map_reduces_to_wpve() {
        let d = Distribution::exponential(0.7).unwrap();
        let id = MonotoneMap::affine(1.0, 0.0).unwrap();
        let v = wpve_via_transform(&d, &id, 1.0).unwrap();
        let w = wpve(&d, &Weight::Identity, 1.0).unwrap().value;
        assert!((v - w).abs() < 1e-12);
    }

    #[test]
    fn prhr_exponent_one_is_baseline() {
        let base = Distribution::exponential(1.3).unwrap();
        let law = prhr_distribution(PrhrModel::new(base, 1.0).unwrap());
        for y in [0.1, 0.5, 2.0] {
            assert!((law.pdf(y) - base.pdf(y)).abs() < 1e-15);
            assert!((law.cdf(y) - base.cdf(y)).abs() < 1e-15);
        }
    }

    #[test]
    fn prhr_scales_crhr() {
        let base = Distribution::exponential(1.0).unwrap();
        let law = prhr_distribution(PrhrModel::new(base, 2.5).unwrap());
        for t in [0.2, 1.0, 3.0] {
            let lhs = crhr(&law, t).unwrap();
            let rhs = 2.5 * crhr(&base, t).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0));
        }
    }
}
