use proptest::prelude::*;
use varentropy::distributions::{Distribution, Lifetime};
use varentropy::measures::{
    crhr, mean_past_lifetime, mean_residual_lifetime, variance_past_lifetime, weighted_past_entropy,
    weighted_past_renyi, weighted_varentropy, wpde, wpdve, wpve, wpve_decomposed, wrve, Weight,
};
use varentropy::quadrature::integrate;
use varentropy::Error;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// Midpoint rule for Var(-y ln(g(y)/G(t))) under Exp(lambda) truncated to (0, t).
fn exponential_wpve_riemann(lambda: f64, t: f64, n: usize) -> f64 {
    let gt = 1.0 - (-lambda * t).exp();
    let h = t / n as f64;
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let y = (i as f64 + 0.5) * h;
        let f = lambda * (-lambda * y).exp() / gt;
        let w = -y * f.ln();
        m0 += f * h;
        m1 += f * w * h;
        m2 += f * w * w * h;
    }
    m2 / m0 - (m1 / m0).powi(2)
}

#[test]
fn exponential_reference_values() {
    let d = Distribution::exponential(0.7).unwrap();
    for (t, v) in [(0.1, 0.004285), (0.2, 0.007901), (0.3, 0.009078), (0.4, 0.008114), (1.0, 0.011937)] {
        let got = wpve(&d, &Weight::Identity, t).unwrap().value;
        assert!((got - v).abs() <= 1e-6, "t={t}: {got}");
    }
    let d = Distribution::exponential(5.0).unwrap();
    for (t, v) in [(0.05, 0.44062), (0.1, 0.49772), (0.15, 0.55890), (0.2, 0.62414)] {
        let got = wpdve(&d, &Weight::Identity, t).unwrap().value;
        assert!((got - v).abs() <= 1e-5, "t={t}: {got}");
    }
}

#[test]
fn riemann_oracle_agrees() {
    for t in [0.1, 1.0, 3.0] {
        let oracle = exponential_wpve_riemann(0.7, t, 1_000_000);
        let got = wpve(&Distribution::exponential(0.7).unwrap(), &Weight::Identity, t).unwrap().value;
        assert!(close(got, oracle, 1e-7), "t={t}: {got} vs {oracle}");
    }
}

#[test]
fn variance_identity_with_separate_integrals() {
    let laws = [
        Distribution::exponential(0.7).unwrap(),
        Distribution::gumbel2(3.3869, 0.7544).unwrap(),
        Distribution::weibull(2.0, 1.0).unwrap(),
    ];
    for d in laws {
        for t in [0.5, 1.0, 2.0] {
            let gt = d.cdf(t);
            let w = |y: f64| -y * (d.pdf(y) / gt).ln();
            let f = |y: f64| d.pdf(y) / gt;
            let m1 = integrate(|y| f(y) * w(y), 0.0, t, 1e-12).unwrap().value;
            let m2 = integrate(|y| f(y) * w(y).powi(2), 0.0, t, 1e-12).unwrap().value;
            let got = wpve(&d, &Weight::Identity, t).unwrap().value;
            assert!((got - (m2 - m1 * m1)).abs() <= 1e-9 * m2.max(1e-12), "{d:?} t={t}");
        }
    }
}

#[test]
fn decomposition_matches_direct_variance() {
    let d = Distribution::exponential(0.7).unwrap();
    for t in [0.25, 0.5, 1.0, 2.0] {
        let a = wpve_decomposed(&d, t).unwrap();
        let b = wpve(&d, &Weight::Identity, t).unwrap().value;
        assert!(close(a, b, 1e-7), "t={t}: {a} vs {b}");
    }
}

#[test]
fn unit_weight_gives_past_varentropy() {
    // For Exp(lambda), -ln f is affine in y with slope lambda.
    for (lambda, t) in [(0.7, 1.0), (2.0, 0.3), (5.0, 0.2)] {
        let d = Distribution::exponential(lambda).unwrap();
        let pve = wpve(&d, &Weight::Unit, t).unwrap().value;
        let expected = lambda * lambda * variance_past_lifetime(&d, t).unwrap();
        assert!(close(pve, expected, 1e-9));
    }
}

#[test]
fn wpve_tends_to_weighted_varentropy() {
    for lambda in [0.5, 1.0, 3.0] {
        let d = Distribution::exponential(lambda).unwrap();
        let t = d.quantile(1.0 - 1e-12).unwrap();
        let past = wpve(&d, &Weight::Identity, t).unwrap().value;
        let full = weighted_varentropy(&d, &Weight::Identity).unwrap().value;
        assert!(close(past, full, 1e-6), "lambda={lambda}: {past} vs {full}");
    }
}

#[test]
fn paired_measures_add() {
    let d = Distribution::gumbel2(3.3869, 0.7544).unwrap();
    for t in [0.8, 1.5, 3.0] {
        for w in [Weight::Identity, Weight::Unit, Weight::Affine { a: 2.0, b: 1.0 }] {
            let sum = wpve(&d, &w, t).unwrap().value + wrve(&d, &w, t).unwrap().value;
            assert!(close(wpdve(&d, &w, t).unwrap().value, sum, 1e-14));
        }
    }
}

#[test]
fn mean_past_lifetime_of_exponential() {
    for (lambda, t) in [(0.7, 1.0), (2.0, 0.5), (0.1, 4.0)] {
        let d = Distribution::exponential(lambda).unwrap();
        let e: f64 = (-lambda * t).exp();
        let expected = t - (1.0 / lambda - t * e / (1.0 - e));
        assert!(close(mean_past_lifetime(&d, t).unwrap(), expected, 1e-10));
        assert!(close(mean_residual_lifetime(&d, t).unwrap(), 1.0 / lambda, 1e-10));
        assert!(close(crhr(&d, t).unwrap(), -(1.0 - e).ln(), 1e-14));
    }
}

#[test]
fn renyi_of_uniform() {
    let d = Distribution::uniform(0.0, 1.0).unwrap();
    for (t, a) in [(0.5f64, 2.0f64), (0.8, 0.5), (1.0, 1.8)] {
        // ∫_0^t (y/t)^a dy = t / (a + 1)
        let expected = (t / (a + 1.0)).ln() / (1.0 - a);
        let got = weighted_past_renyi(&d, &Weight::Identity, t, a).unwrap().value;
        assert!(close(got, expected, 1e-10), "t={t} a={a}");
    }
    assert!(weighted_past_renyi(&d, &Weight::Identity, 0.5, 1.0).is_err());
}

#[test]
fn uniform_past_entropy_closed_form() {
    let d = Distribution::uniform(0.0, 1.0).unwrap();
    for t in [0.2, 0.5, 0.9] {
        let got = weighted_past_entropy(&d, &Weight::Identity, t).unwrap().value;
        assert!(close(got, t / 2.0 * t.ln(), 1e-12));
    }
    let got = wpde(&d, &Weight::Identity, 0.5).unwrap().value;
    assert!(close(got, 0.5f64.ln(), 1e-10));
}

#[test]
fn horizons_outside_the_support_are_rejected() {
    let d = Distribution::pareto(2.0).unwrap();
    assert!(matches!(wpve(&d, &Weight::Identity, 0.5), Err(Error::Domain(_))));
    let u = Distribution::uniform(0.0, 1.0).unwrap();
    assert!(matches!(wrve(&u, &Weight::Identity, 1.0), Err(Error::Domain(_))));
    assert!(wpve(&u, &Weight::Affine { a: 1.0, b: -0.5 }, 0.9).is_err());
}

proptest! {
    #[test]
    fn variance_measures_are_nonnegative(lambda in 0.2f64..5.0, p in 0.01f64..0.99, k in 0usize..3) {
        let laws = [
            Distribution::exponential(lambda).unwrap(),
            Distribution::weibull(lambda, 1.0).unwrap(),
            // The y^2-weighted residual variance needs E[Y^4 ln^2 Y] < inf.
            Distribution::lomax(1.0, 4.5 + lambda).unwrap(),
        ];
        let d = laws[k];
        let t = d.quantile(p).unwrap();
        for w in [Weight::Identity, Weight::Unit, Weight::Square] {
            prop_assert!(wpve(&d, &w, t).unwrap().value >= 0.0);
            prop_assert!(wrve(&d, &w, t).unwrap().value >= 0.0);
        }
    }
}
