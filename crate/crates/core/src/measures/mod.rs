//! Weighted entropy and varentropy of past and residual lifetimes.
//!
//! For a truncation time `t`, the past law is `Y | Y <= t` with density
//! `g/G(t)` and the residual law is `Y | Y > t` with density `g/Gbar(t)`.
//! With a weight `w`, the weighted information content is
//! `W(y) = -w(y) ln f(y)` where `f` is the conditional density; the weighted
//! entropy is `E[W]` and the weighted varentropy is `Var W`, both under the
//! conditional law.
//!
//! Everything is computed by quadrature on the original support, in log
//! space. Variances use the central two-pass form `E[(W - E W)^2]`, which
//! stays accurate when the variance is small next to `E[W]^2`.

pub mod closed;

use std::fmt;
use std::sync::Arc;

use crate::distributions::Lifetime;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_window, IntegralResult, DEFAULT_REL_TOL};

/// Negative variances above this are rounding noise and clamp to zero.
pub const VARIANCE_FLOOR: f64 = -1e-9;

/// Positive weight function `w(y)`.
#[derive(Clone)]
pub enum Weight {
    /// `w(y) = y`
    Identity,
    /// `w(y) = 1`
    Unit,
    /// `w(y) = y^2`
    Square,
    /// `w(y) = a y + b`
    Affine { a: f64, b: f64 },
    /// `w(y) = alpha y^3 + beta y^2`
    CubicAffine { alpha: f64, beta: f64 },
    /// Arbitrary positive function with a label.
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl Weight {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Weight::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        match self {
            Weight::Identity => y,
            Weight::Unit => 1.0,
            Weight::Square => y * y,
            Weight::Affine { a, b } => a * y + b,
            Weight::CubicAffine { alpha, beta } => alpha * y * y * y + beta * y * y,
            Weight::Custom { f, .. } => f(y),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Weight::Identity => "y".into(),
            Weight::Unit => "1".into(),
            Weight::Square => "y^2".into(),
            Weight::Affine { a, b } => format!("{a}*y+{b}"),
            Weight::CubicAffine { alpha, beta } => format!("{alpha}*y^3+{beta}*y^2"),
            Weight::Custom { name, .. } => name.clone(),
        }
    }

    /// Checks `w > 0` on 64 interior points of `(lo, hi)`; an infinite `hi`
    /// is probed on a geometric grid instead.
    pub fn check_positive(&self, lo: f64, hi: f64) -> Result<()> {
        for i in 1..=64 {
            let u = i as f64 / 65.0;
            let y = if hi.is_finite() {
                lo + u * (hi - lo)
            } else {
                lo + u / (1.0 - u)
            };
            let w = self.eval(y);
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidWeight(format!(
                    "weight {} is not positive at y = {y} (value {w})",
                    self.label()
                )));
            }
        }
        Ok(())
    }
}

/// Which conditional law a measure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Past,
    Residual,
    Paired,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub t: f64,
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    PastEntropy,
    ResidualEntropy,
    PairedEntropy,
    Wpve,
    Wrve,
    Wpdve,
    PastRenyi,
    Varentropy,
}

impl MeasureKind {
    pub fn is_variance(&self) -> bool {
        matches!(
            self,
            MeasureKind::Wpve | MeasureKind::Wrve | MeasureKind::Wpdve | MeasureKind::Varentropy
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureResult {
    pub value: f64,
    pub abs_error: f64,
    pub kind: MeasureKind,
}

/// A conditional law restricted to `(a, b)` with density `exp(ln g - ln_norm)`.
#[derive(Debug, Clone, Copy)]
pub struct Window {
    pub a: f64,
    pub b: f64,
    pub ln_norm: f64,
}

impl Window {
    /// `Y | Y <= t`.
    pub fn past<D: Lifetime + ?Sized>(d: &D, t: f64) -> Result<Self> {
        let (lo, hi) = d.support();
        if !(t > lo) {
            return Err(Error::Domain(format!(
                "past truncation needs t above the support start {lo}, got {t}"
            )));
        }
        let ln_norm = if t >= hi { 0.0 } else { d.ln_cdf(t) };
        if !ln_norm.is_finite() {
            return Err(Error::Domain(format!("G({t}) = 0")));
        }
        Ok(Self {
            a: lo,
            b: t.min(hi),
            ln_norm,
        })
    }

    /// `Y | Y > t`.
    pub fn residual<D: Lifetime + ?Sized>(d: &D, t: f64) -> Result<Self> {
        let (lo, hi) = d.support();
        if !(t < hi) {
            return Err(Error::Domain(format!(
                "residual truncation needs t below the support end {hi}, got {t}"
            )));
        }
        let ln_norm = if t <= lo { 0.0 } else { d.ln_sf(t) };
        if !ln_norm.is_finite() {
            return Err(Error::Domain(format!("survival function vanishes at {t}")));
        }
        Ok(Self {
            a: t.max(lo),
            b: hi,
            ln_norm,
        })
    }

    /// The whole support.
    pub fn full<D: Lifetime + ?Sized>(d: &D) -> Self {
        let (a, b) = d.support();
        Self { a, b, ln_norm: 0.0 }
    }

    pub fn for_side<D: Lifetime + ?Sized>(d: &D, t: f64, side: Side) -> Result<Self> {
        match side {
            Side::Past => Self::past(d, t),
            Side::Residual => Self::residual(d, t),
            Side::Paired => Err(Error::Domain("paired side has two windows".into())),
        }
    }

    /// `E[h(Y, ln f(Y))]` under the window law, where `f` is its density.
    pub fn expect<D, H>(&self, d: &D, h: H, rel_tol: f64) -> Result<IntegralResult>
    where
        D: Lifetime + ?Sized,
        H: Fn(f64, f64) -> f64,
    {
        let ln_norm = self.ln_norm;
        integrate_window(
            d,
            |y| {
                let lf = d.ln_pdf(y) - ln_norm;
                let f = lf.exp();
                if f == 0.0 || lf.is_nan() {
                    0.0
                } else {
                    f * h(y, lf)
                }
            },
            self.a,
            self.b,
            rel_tol,
        )
    }

    /// `E[h(Y)]` under the window law.
    pub fn mean_of<D, H>(&self, d: &D, h: H) -> Result<f64>
    where
        D: Lifetime + ?Sized,
        H: Fn(f64) -> f64,
    {
        Ok(self.expect(d, |y, _| h(y), DEFAULT_REL_TOL)?.value)
    }

    /// Mean and central variance of `h(Y, ln f(Y))` under the window law.
    pub fn mean_and_variance<D, H>(&self, d: &D, h: H) -> Result<(IntegralResult, IntegralResult)>
    where
        D: Lifetime + ?Sized,
        H: Fn(f64, f64) -> f64,
    {
        let mean = self.expect(d, &h, DEFAULT_REL_TOL)?;
        let m = mean.value;
        let var = self.expect(
            d,
            |y, lf| {
                let r = h(y, lf) - m;
                r * r
            },
            DEFAULT_REL_TOL,
        )?;
        Ok((mean, var))
    }
}

fn clamp_variance(r: IntegralResult, kind: MeasureKind) -> Result<MeasureResult> {
    if r.value < VARIANCE_FLOOR {
        return Err(Error::Consistency(format!(
            "variance-type measure evaluated to {}",
            r.value
        )));
    }
    Ok(MeasureResult {
        value: r.value.max(0.0),
        abs_error: r.abs_error,
        kind,
    })
}

fn entropy_on<D: Lifetime + ?Sized>(
    d: &D,
    w: &Weight,
    win: Window,
    kind: MeasureKind,
) -> Result<MeasureResult> {
    w.check_positive(win.a, win.b)?;
    let r = win.expect(d, |y, lf| -w.eval(y) * lf, DEFAULT_REL_TOL)?;
    Ok(MeasureResult {
        value: r.value,
        abs_error: r.abs_error,
        kind,
    })
}

fn varentropy_on<D: Lifetime + ?Sized>(
    d: &D,
    w: &Weight,
    win: Window,
    kind: MeasureKind,
) -> Result<MeasureResult> {
    w.check_positive(win.a, win.b)?;
    let (_, var) = win.mean_and_variance(d, |y, lf| -w.eval(y) * lf)?;
    clamp_variance(var, kind)
}

/// Cumulative reversed hazard `-ln G(t)`.
pub fn crhr<D: Lifetime + ?Sized>(d: &D, t: f64) -> Result<f64> {
    let l = d.ln_cdf(t);
    if !l.is_finite() {
        return Err(Error::Domain(format!("G({t}) = 0")));
    }
    Ok((-l).max(0.0))
}

/// Cumulative hazard `-ln Gbar(t)`.
pub fn chr<D: Lifetime + ?Sized>(d: &D, t: f64) -> Result<f64> {
    let l = d.ln_sf(t);
    if !l.is_finite() {
        return Err(Error::Domain(format!("survival function vanishes at {t}")));
    }
    Ok((-l).max(0.0))
}

/// Weighted past entropy `-E[w(Y) ln(g(Y)/G(t)) | Y <= t]`.
pub fn weighted_past_entropy<D: Lifetime + ?Sized>(d: &D, w: &Weight, t: f64) -> Result<MeasureResult> {
    entropy_on(d, w, Window::past(d, t)?, MeasureKind::PastEntropy)
}

/// Weighted residual entropy `-E[w(Y) ln(g(Y)/Gbar(t)) | Y > t]`.
pub fn weighted_residual_entropy<D: Lifetime + ?Sized>(d: &D, w: &Weight, t: f64) -> Result<MeasureResult> {
    entropy_on(d, w, Window::residual(d, t)?, MeasureKind::ResidualEntropy)
}

/// Weighted past varentropy.
pub fn wpve<D: Lifetime + ?Sized>(d: &D, w: &Weight, t: f64) -> Result<MeasureResult> {
    varentropy_on(d, w, Window::past(d, t)?, MeasureKind::Wpve)
}

/// Weighted residual varentropy.
pub fn wrve<D: Lifetime + ?Sized>(d: &D, w: &Weight, t: f64) -> Result<MeasureResult> {
    varentropy_on(d, w, Window::residual(d, t)?, MeasureKind::Wrve)
}

/// Weighted varentropy over the whole support.
pub fn weighted_varentropy<D: Lifetime + ?Sized>(d: &D, w: &Weight) -> Result<MeasureResult> {
    varentropy_on(d, w, Window::full(d), MeasureKind::Varentropy)
}

/// Weighted paired dynamic entropy: past plus residual weighted entropy.
pub fn wpde<D: Lifetime + ?Sized>(d: &D, w: &Weight, t: f64) -> Result<MeasureResult> {
    let p = weighted_past_entropy(d, w, t)?;
    let r = weighted_residual_entropy(d, w, t)?;
    Ok(MeasureResult {
        value: p.value + r.value,
        abs_error: p.abs_error + r.abs_error,
        kind: MeasureKind::PairedEntropy,
    })
}

/// Past and residual varentropies at the same `t`.
pub fn paired_parts<D: Lifetime + ?Sized>(d: &D, w: &Weight, t: f64) -> Result<(MeasureResult, MeasureResult)> {
    Ok((wpve(d, w, t)?, wrve(d, w, t)?))
}

/// Weighted paired dynamic varentropy: WPVE + WRVE.
pub fn wpdve<D: Lifetime + ?Sized>(d: &D, w: &Weight, t: f64) -> Result<MeasureResult> {
    let (p, r) = paired_parts(d, w, t)?;
    Ok(MeasureResult {
        value: p.value + r.value,
        abs_error: p.abs_error + r.abs_error,
        kind: MeasureKind::Wpdve,
    })
}

/// Mean past lifetime `M(t) = E[t - Y | Y <= t] = ∫ G(y)/G(t) dy`.
pub fn mean_past_lifetime<D: Lifetime + ?Sized>(d: &D, t: f64) -> Result<f64> {
    let win = Window::past(d, t)?;
    let body = integrate_window(
        d,
        |y| (d.ln_cdf(y) - win.ln_norm).exp(),
        win.a,
        win.b,
        DEFAULT_REL_TOL,
    )?;
    // Beyond the support end G = 1, so the ratio is 1 on (hi, t).
    Ok(body.value + (t - win.b).max(0.0))
}

/// Variance of the past lifetime, `Var(Y | Y <= t)`.
pub fn variance_past_lifetime<D: Lifetime + ?Sized>(d: &D, t: f64) -> Result<f64> {
    let win = Window::past(d, t)?;
    let (_, var) = win.mean_and_variance(d, |y, _| y)?;
    Ok(var.value.max(0.0))
}

/// Mean residual lifetime `mu(t) = ∫_t^inf Gbar(y)/Gbar(t) dy`.
pub fn mean_residual_lifetime<D: Lifetime + ?Sized>(d: &D, t: f64) -> Result<f64> {
    let win = Window::residual(d, t)?;
    let body = integrate_window(
        d,
        |y| (d.ln_sf(y) - win.ln_norm).exp(),
        win.a,
        win.b,
        DEFAULT_REL_TOL,
    )?;
    Ok(body.value + (win.a - t).max(0.0))
}

/// Variance of the residual lifetime, `Var(Y | Y > t)`.
pub fn variance_residual_lifetime<D: Lifetime + ?Sized>(d: &D, t: f64) -> Result<f64> {
    let win = Window::residual(d, t)?;
    let (_, var) = win.mean_and_variance(d, |y, _| y)?;
    Ok(var.value.max(0.0))
}

/// Weighted past Renyi entropy `(1/(1-a)) ln ∫ (w f)^a` over the past window.
pub fn weighted_past_renyi<D: Lifetime + ?Sized>(
    d: &D,
    w: &Weight,
    t: f64,
    alpha: f64,
) -> Result<MeasureResult> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("Renyi order must be positive, got {alpha}")));
    }
    if alpha == 1.0 {
        return Err(Error::Domain(
            "Renyi order 1 is the Shannon limit; use weighted_past_entropy".into(),
        ));
    }
    let win = Window::past(d, t)?;
    w.check_positive(win.a, win.b)?;
    let r = integrate_window(
        d,
        |y| {
            let lf = d.ln_pdf(y) - win.ln_norm;
            if lf == f64::NEG_INFINITY {
                return 0.0;
            }
            (alpha * (w.eval(y).ln() + lf)).exp()
        },
        win.a,
        win.b,
        DEFAULT_REL_TOL,
    )?;
    if !(r.value > 0.0) {
        return Err(Error::Domain("Renyi integral is not positive".into()));
    }
    Ok(MeasureResult {
        value: r.value.ln() / (1.0 - alpha),
        abs_error: r.abs_error / (r.value * (1.0 - alpha).abs()),
        kind: MeasureKind::PastRenyi,
    })
}

/// `E[h(Y) | Y in window]` for a truncation side.
pub fn conditional_expectation<D, H>(d: &D, h: H, t: f64, side: Side) -> Result<f64>
where
    D: Lifetime + ?Sized,
    H: Fn(f64) -> f64,
{
    Window::for_side(d, t, side)?.mean_of(d, h)
}

/// WPVE with weight `y` assembled from conditional moments:
/// `E[psi1^2] - 2 L H^{y^2} - L^2 E[Y^2] - (H^y)^2`, where `psi1 = y ln g`,
/// `L = -ln G(t)` and `H^w` is the weighted past entropy.
pub fn wpve_decomposed<D: Lifetime + ?Sized>(d: &D, t: f64) -> Result<f64> {
    let win = Window::past(d, t)?;
    let l = crhr(d, t)?;
    let psi1_sq = win.mean_of(d, |y| {
        let lg = d.ln_pdf(y);
        (y * lg).powi(2)
    })?;
    let ey2 = win.mean_of(d, |y| y * y)?;
    let h_y2 = weighted_past_entropy(d, &Weight::Square, t)?.value;
    let h_y = weighted_past_entropy(d, &Weight::Identity, t)?.value;
    Ok(psi1_sq - 2.0 * l * h_y2 - l * l * ey2 - h_y * h_y)
}
