use proptest::prelude::*;
use varentropy::distributions::{Distribution, Lifetime};
use varentropy::measures::{conditional_expectation, crhr, wpde, wpdve, wpve, Side, Weight};
use varentropy::transforms::{
    prhr_distribution, wpdve_affine, wpve_affine, wpve_prhr, wpve_prhr_power_closed, wpve_via_transform, MonotoneMap,
    PrhrModel, TransformedLaw,
};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn square_of_exponential_matches_its_own_law() {
    let pairs = [
        (0.5, 0.3),
        (0.5, 2.0),
        (0.7, 0.1),
        (0.7, 1.0),
        (1.0, 0.5),
        (1.0, 4.0),
        (2.0, 0.2),
        (2.0, 1.5),
        (5.0, 0.01),
        (5.0, 0.3),
    ];
    for (lambda, t) in pairs {
        let base = Distribution::exponential(lambda).unwrap();
        let via = wpve_via_transform(&base, &MonotoneMap::square(), t).unwrap();
        let direct = wpve(&Distribution::sqrt_weibull(lambda).unwrap(), &Weight::Identity, t)
            .unwrap()
            .value;
        assert!(close(via, direct, 1e-7), "lambda={lambda} t={t}: {via} vs {direct}");
    }
}

#[test]
fn transformed_law_agrees_with_moment_route() {
    let base = Distribution::weibull(1.7, 2.0).unwrap();
    let law = TransformedLaw::new(base, MonotoneMap::square()).unwrap();
    for t in [0.5, 2.0, 6.0] {
        let via = wpve_via_transform(&base, &MonotoneMap::square(), t).unwrap();
        let direct = wpve(&law, &Weight::Identity, t).unwrap().value;
        assert!(close(via, direct, 1e-7), "t={t}: {via} vs {direct}");
    }
}

#[test]
fn reciprocal_of_pareto_is_power_law() {
    // Y ~ Pareto(alpha) on [1, inf); 1/Y has CDF x^alpha on (0, 1].
    for (alpha, t) in [(1.0, 0.3), (2.0, 0.5), (3.0, 0.8), (0.7, 0.6), (1.5, 0.95)] {
        let pareto = Distribution::pareto(alpha).unwrap();
        let via = wpve_via_transform(&pareto, &MonotoneMap::reciprocal(), t).unwrap();
        let power = Distribution::power(alpha, 1.0).unwrap();
        let direct = wpve(&power, &Weight::Identity, t).unwrap().value;
        assert!(close(via, direct, 1e-6), "alpha={alpha} t={t}: {via} vs {direct}");
    }
}

#[test]
fn affine_routes_match_transformed_law() {
    for (a, b) in [(2.0, 0.5), (0.5, 0.0), (3.0, 1.0)] {
        let base = Distribution::exponential(1.3).unwrap();
        let law = TransformedLaw::new(base, MonotoneMap::affine(a, b).unwrap()).unwrap();
        for s in [0.2, 1.0, 2.5] {
            let t = a * s + b;
            let p = wpve_affine(&base, a, b, t).unwrap();
            let pd = wpdve_affine(&base, a, b, t).unwrap();
            assert!(close(p, wpve(&law, &Weight::Identity, t).unwrap().value, 1e-7));
            assert!(close(pd, wpdve(&law, &Weight::Identity, t).unwrap().value, 1e-7));
        }
    }
}

#[test]
fn affine_rule_for_paired_entropy() {
    let (a, b) = (2.0, 0.5);
    let base = Distribution::exponential(1.0).unwrap();
    let law = TransformedLaw::new(base, MonotoneMap::affine(a, b).unwrap()).unwrap();
    let w1 = Weight::Affine { a, b };
    for t in [1.0, 2.0] {
        let s = (t - b) / a;
        let lhs = wpde(&law, &Weight::Identity, t).unwrap().value;
        let past = conditional_expectation(&base, |y| a * y + b, s, Side::Past).unwrap();
        let res = conditional_expectation(&base, |y| a * y + b, s, Side::Residual).unwrap();
        let rhs = wpde(&base, &w1, s).unwrap().value + a.ln() * (past + res);
        assert!(close(lhs, rhs, 1e-8), "t={t}: {lhs} vs {rhs}");
    }
}

#[test]
fn prhr_quantile_route_matches_density_route() {
    let baselines = [Distribution::exponential(1.0).unwrap(), Distribution::power(0.8, 2.0).unwrap()];
    let grid = [(0.5, 0.3), (0.5, 1.2), (1.0, 0.7), (1.5, 0.4), (2.0, 1.0), (2.0, 1.8), (3.0, 0.5), (0.3, 0.9), (4.0, 1.6), (1.2, 1.95)];
    for base in baselines {
        for (a, t) in grid {
            let m = PrhrModel::new(base, a).unwrap();
            let q = wpve_prhr(&m, t).unwrap();
            let direct = wpve(&prhr_distribution(m), &Weight::Identity, t).unwrap().value;
            assert!(close(q, direct, 1e-6), "{base:?} a={a} t={t}: {q} vs {direct}");
        }
    }
}

#[test]
fn prhr_of_power_law_stays_in_family() {
    for (alpha, beta, a, t) in [(0.8, 2.0, 1.5, 1.0), (0.2, 1.0, 3.0, 0.5), (2.0, 1.0, 0.5, 0.9)] {
        let m = PrhrModel::new(Distribution::power(alpha, beta).unwrap(), a).unwrap();
        let closed = wpve_prhr_power_closed(alpha, beta, a, t).unwrap();
        assert!(close(wpve_prhr(&m, t).unwrap(), closed, 1e-7));
    }
}

#[test]
fn invalid_transforms_are_rejected() {
    assert!(MonotoneMap::affine(-1.0, 0.0).is_err());
    assert!(PrhrModel::new(Distribution::exponential(1.0).unwrap(), 0.0).is_err());
    assert!(wpve_affine(&Distribution::exponential(1.0).unwrap(), 2.0, 1.0, 0.5).is_err());
}

proptest! {
    #[test]
    fn prhr_scales_cumulative_reversed_hazard(a in 0.1f64..5.0, t in 0.05f64..4.0, lambda in 0.2f64..3.0) {
        let base = Distribution::exponential(lambda).unwrap();
        let law = prhr_distribution(PrhrModel::new(base, a).unwrap());
        let lhs = crhr(&law, t).unwrap();
        let rhs = a * crhr(&base, t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        prop_assert!((law.cdf(t) - base.cdf(t).powf(a)).abs() < 1e-14);
    }
}
