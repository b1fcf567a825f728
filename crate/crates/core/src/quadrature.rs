//! Adaptive Gauss-Kronrod integration.
//!
//! Globally adaptive G7/K15 scheme: the interval with the largest error
//! estimate is bisected until the summed estimate meets the tolerance or the
//! interval budget runs out. Error estimates use the QUADPACK rescaling, which
//! is conservative for smooth integrands and behaves well near integrable
//! endpoint singularities such as `x^p log(x)^k`.
//!
//! A semi-infinite upper limit is mapped to `[0, 1)` with `y = a + u/(1-u)`.
//! When a distribution is available, [`integrate_expectation`] and
//! [`integrate_window`] first integrate up to a far quantile and only send the
//! remaining tail through the substitution.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::distributions::Lifetime;
use crate::error::{Error, Result};

/// Default relative tolerance used by the measures.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Absolute error floor below which any result is accepted.
pub const DEFAULT_ABS_TOL: f64 = 1e-12;
/// Maximum number of subintervals before giving up.
pub const DEFAULT_MAX_INTERVALS: usize = 2000;
/// Tail probability at which distribution-aware integration splits off the tail.
pub const TAIL_PROBABILITY: f64 = 1e-13;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value of a definite integral with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

impl IntegralResult {
    fn combine(self, other: IntegralResult) -> IntegralResult {
        IntegralResult {
            value: self.value + other.value,
            abs_error: self.abs_error + other.abs_error,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

/// Tolerances and budget for an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: DEFAULT_ABS_TOL,
            max_intervals: DEFAULT_MAX_INTERVALS,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Evaluates `f`, retrying slightly inside the segment when the value is not
/// finite and falling back to zero (the `x log x -> 0` limits).
fn guarded<F: Fn(f64) -> f64>(f: &F, x: f64, a: f64, b: f64) -> f64 {
    let v = f(x);
    if v.is_finite() {
        return v;
    }
    let mid = 0.5 * (a + b);
    let nudged = x + (mid - x).signum() * 1e-14 * (b - a).abs().max(f64::MIN_POSITIVE);
    let v = f(nudged);
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = guarded(f, centre, a, b);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = guarded(f, centre - dx, a, b);
        let f2 = guarded(f, centre + dx, a, b);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = guarded(f, centre - dx, a, b);
        let f2 = guarded(f, centre + dx, a, b);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error }
}

impl Integrator {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over `[a, b]`; `b` may be `+inf`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<IntegralResult> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(Error::Domain(format!(
                "rel_tol must lie in (0, 1e-3], got {}",
                self.rel_tol
            )));
        }
        if a.is_nan() || b.is_nan() || !a.is_finite() || a >= b {
            return Err(Error::Domain(format!(
                "integration limits must satisfy finite a < b, got [{a}, {b}]"
            )));
        }
        if b.is_infinite() {
            let g = |u: f64| {
                let w = 1.0 - u;
                let y = a + u / w;
                let v = f(y);
                if v == 0.0 {
                    0.0
                } else {
                    v / (w * w)
                }
            };
            self.adapt(&g, 0.0, 1.0)
        } else {
            self.adapt(&f, a, b)
        }
    }

    fn adapt<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> Result<IntegralResult> {
        let first = kronrod15(f, a, b);
        let mut evaluations = 15;
        let mut heap = BinaryHeap::new();
        let mut frozen: Vec<Segment> = Vec::new();
        let mut total = first.value;
        let mut total_err = first.error;
        heap.push(first);

        let mut intervals = 1;
        loop {
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if total_err <= tol {
                break;
            }
            let Some(worst) = heap.pop() else {
                break;
            };
            let mid = 0.5 * (worst.a + worst.b);
            if intervals >= self.max_intervals || !(mid > worst.a && mid < worst.b) {
                frozen.push(worst);
                if intervals >= self.max_intervals {
                    break;
                }
                continue;
            }
            let left = kronrod15(f, worst.a, mid);
            let right = kronrod15(f, mid, worst.b);
            evaluations += 30;
            intervals += 1;
            total += left.value + right.value - worst.value;
            total_err += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }

        // Resum from scratch so the running updates leave no drift.
        let mut value = 0.0;
        let mut comp = 0.0;
        let mut err = 0.0;
        for s in heap.iter().chain(frozen.iter()) {
            let t = value + s.value;
            if value.abs() >= s.value.abs() {
                comp += (value - t) + s.value;
            } else {
                comp += (s.value - t) + value;
            }
            value = t;
            err += s.error;
        }
        let result = IntegralResult {
            value: value + comp,
            abs_error: err,
            evaluations,
        };
        let tol = self.abs_tol.max(self.rel_tol * result.value.abs());
        if result.abs_error <= tol {
            Ok(result)
        } else {
            Err(Error::Quadrature(result))
        }
    }
}

/// Integrates `f` over `[a, b]` with default budget and absolute floor.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<IntegralResult> {
    Integrator::with_rel_tol(rel_tol).integrate(f, a, b)
}

/// Integrates `f` over `[a, b] ∩ support(d)`. An infinite (or beyond-support)
/// upper end is split at the `1 - 1e-13` quantile; the remaining tail goes
/// through the `u/(1-u)` substitution with an absolute target set by the body.
pub fn integrate_window<D, F>(d: &D, f: F, a: f64, b: f64, rel_tol: f64) -> Result<IntegralResult>
where
    D: Lifetime + ?Sized,
    F: Fn(f64) -> f64,
{
    let (lo, hi) = d.support();
    let a = a.max(lo);
    let b = b.min(hi);
    if a >= b {
        return Err(Error::Domain(format!(
            "empty integration window [{a}, {b}] inside the support"
        )));
    }
    let integrator = Integrator::with_rel_tol(rel_tol);
    if b.is_finite() {
        return integrator.integrate(&f, a, b);
    }
    let cap = d.quantile(1.0 - TAIL_PROBABILITY)?;
    if !(cap > a) || !cap.is_finite() {
        return integrator.integrate(&f, a, f64::INFINITY);
    }
    // Heavy tails put the cap decades beyond `a`; cut the body where the
    // survival mass drops by successive factors of ten so no panel is blind
    // to the mass near `a`.
    let sf_a = d.sf(a);
    let mut cuts = vec![a];
    let mut level = sf_a * 0.1;
    while level > TAIL_PROBABILITY {
        let p = 1.0 - level;
        if p >= 1.0 {
            break;
        }
        let y = d.quantile(p)?;
        if y > *cuts.last().unwrap() && y < cap {
            cuts.push(y);
        }
        level *= 0.1;
    }
    cuts.push(cap);
    let mut body = IntegralResult {
        value: 0.0,
        abs_error: 0.0,
        evaluations: 0,
    };
    for w in cuts.windows(2) {
        body = body.combine(integrator.integrate(&f, w[0], w[1])?);
    }
    let tail_integrator = Integrator {
        abs_tol: integrator.abs_tol.max(0.1 * rel_tol * body.value.abs()),
        ..integrator
    };
    let tail = tail_integrator.integrate(&f, cap, f64::INFINITY)?;
    Ok(body.combine(tail))
}

/// `E[h(Y) 1{a < Y < b}] = ∫ h g` over the window.
pub fn integrate_expectation<D, H>(d: &D, h: H, a: f64, b: f64, rel_tol: f64) -> Result<IntegralResult>
where
    D: Lifetime + ?Sized,
    H: Fn(f64) -> f64,
{
    integrate_window(
        d,
        |y| {
            let g = d.pdf(y);
            if g == 0.0 {
                0.0
            } else {
                h(y) * g
            }
        },
        a,
        b,
        rel_tol,
    )
}
