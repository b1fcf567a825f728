//! Closed-form evaluators against the quadrature routes on t grids.

use varentropy::distributions::Distribution;
use varentropy::measures::closed::*;
use varentropy::measures::{wpde, wpve, Weight};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

#[test]
fn exponential_closed_matches_quadrature() {
    for lambda in [0.7, 2.0, 5.0] {
        let d = Distribution::exponential(lambda).unwrap();
        for t in grid(0.02, 4.0, 20) {
            let q = wpve(&d, &Weight::Identity, t).unwrap().value;
            let c = wpve_exponential_closed(lambda, t).unwrap();
            assert!(rel(c, q) < 1e-8, "lambda={lambda} t={t}: {c} vs {q}");
        }
    }
}

#[test]
fn uniform_closed_matches_quadrature() {
    let d = Distribution::uniform(0.5, 4.0).unwrap();
    for t in grid(0.6, 4.0, 20) {
        let q = wpve(&d, &Weight::Identity, t).unwrap().value;
        let c = wpve_uniform_closed(0.5, 4.0, t).unwrap();
        assert!((c - q).abs() <= 1e-8 * q.abs().max(1e-6), "t={t}: {c} vs {q}");
    }
}

#[test]
fn pareto_closed_matches_quadrature() {
    for alpha in [0.5, 1.0, 2.0, 3.5] {
        let d = Distribution::pareto(alpha).unwrap();
        for t in grid(1.05, 6.0, 20) {
            let q = wpve(&d, &Weight::Identity, t).unwrap().value;
            let c = wpve_pareto_closed(alpha, t).unwrap();
            assert!(rel(c, q) < 1e-8, "alpha={alpha} t={t}: {c} vs {q}");
        }
    }
}

#[test]
fn power_closed_matches_quadrature() {
    for (c, scale) in [(0.2, 1.0), (0.6, 1.0), (3.0, 2.0), (1.0, 1.0)] {
        let d = Distribution::power(c, scale).unwrap();
        for t in grid(0.05 * scale, scale, 20) {
            let q = wpve(&d, &Weight::Identity, t).unwrap().value;
            let v = wpve_power_closed(c, scale, t).unwrap();
            assert!((v - q).abs() <= 1e-8 * q.abs().max(1e-8), "c={c} t={t}: {v} vs {q}");
        }
    }
}

#[test]
fn shifted_exponential_closed_matches_quadrature() {
    for beta in [0.0, 0.5, 2.0] {
        let d = Distribution::shifted_exponential(beta).unwrap();
        for t in grid(beta + 0.05, beta + 4.0, 20) {
            let q = wpve(&d, &Weight::Identity, t).unwrap().value;
            let c = wpve_shifted_exp_closed(beta, t).unwrap();
            assert!(rel(c, q) < 1e-8, "beta={beta} t={t}: {c} vs {q}");
        }
    }
}

#[test]
fn weibull_closed_matches_quadrature() {
    for lambda in [0.5, 1.0, 2.0] {
        let d = Distribution::sqrt_weibull(lambda).unwrap();
        for t in grid(0.05, 4.0, 20) {
            let q = wpve(&d, &Weight::Identity, t).unwrap().value;
            let c = wpve_weibull_closed(lambda, t).unwrap();
            assert!(rel(c, q) < 1e-8, "lambda={lambda} t={t}: {c} vs {q}");
        }
    }
}

#[test]
fn wpde_closed_forms_match_quadrature() {
    let u = Distribution::uniform(0.0, 3.0).unwrap();
    for t in grid(0.1, 2.9, 20) {
        let q = wpde(&u, &Weight::Identity, t).unwrap().value;
        let c = wpde_uniform_closed(3.0, t).unwrap();
        assert!((c - q).abs() < 1e-9, "t={t}: {c} vs {q}");
    }
    for lambda in [0.7, 1.0, 5.0] {
        let d = Distribution::exponential(lambda).unwrap();
        for t in grid(0.02, 3.0, 20) {
            let q = wpde(&d, &Weight::Identity, t).unwrap().value;
            let c = wpde_exponential_closed(lambda, t).unwrap();
            assert!((c - q).abs() <= 1e-8 * q.abs().max(1.0), "lambda={lambda} t={t}: {c} vs {q}");
        }
    }
}
