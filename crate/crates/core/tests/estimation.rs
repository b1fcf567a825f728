use proptest::prelude::*;
use varentropy::distributions::{sample_n, Distribution, Lifetime};
use varentropy::estimation::{
    plugin_variance, silverman_bandwidth, wpdve_nonparametric, wpdve_parametric_exponential, wpve_nonparametric,
    wpve_parametric_exponential, Auxiliary, Boundary, KernelEstimator,
};
use varentropy::measures::{wpdve, wpve, Weight};
use varentropy::Error;

fn phi(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

fn kde_mass_oracle(sample: &[f64], b: f64, lo: f64, hi: f64) -> f64 {
    sample.iter().map(|&y| phi((hi - y) / b) - phi((lo - y) / b)).sum::<f64>() / sample.len() as f64
}

#[test]
fn kde_mass_matches_normal_cdf_oracle() {
    for (seed, b) in [(1, 0.05), (2, 0.3), (3, 1.2)] {
        let sample = sample_n(&Distribution::exponential(0.7).unwrap(), 80, seed).unwrap();
        let k = KernelEstimator::new(&sample, b).unwrap();
        for t in [0.2, 1.0, 3.0] {
            let oracle = kde_mass_oracle(&sample, b, 0.0, t);
            assert!((k.cdf(t).unwrap() - oracle).abs() < 1e-6, "b={b} t={t}");
        }
        let top = k.upper_limit();
        let oracle = kde_mass_oracle(&sample, b, 0.0, top);
        assert!((k.positive_mass().unwrap() - oracle).abs() < 1e-6);
        let leak = kde_mass_oracle(&sample, b, -1e3, 0.0);
        assert!((oracle + leak - 1.0).abs() < 1e-6);
    }
}

#[test]
fn plugin_with_true_density_reproduces_wpve() {
    let d = Distribution::exponential(0.7).unwrap();
    for t in [0.1, 0.4, 1.0, 2.5] {
        let v = plugin_variance(|y| d.ln_pdf(y), d.cdf(t), 0.0, t).unwrap();
        let exact = wpve(&d, &Weight::Identity, t).unwrap().value;
        assert!((v - exact).abs() <= 1e-8 * exact.max(1e-3), "t={t}: {v} vs {exact}");
    }
}

#[test]
fn parametric_estimates_use_the_mle_rate() {
    let sample = sample_n(&Distribution::exponential(5.0).unwrap(), 150, 4).unwrap();
    let rate = sample.len() as f64 / sample.iter().sum::<f64>();
    let fitted = Distribution::exponential(rate).unwrap();
    let e = wpve_parametric_exponential(&sample, 0.1).unwrap();
    assert_eq!(e.auxiliary, Auxiliary::Rate(rate));
    assert_eq!(e.value, wpve(&fitted, &Weight::Identity, 0.1).unwrap().value);
    let e = wpdve_parametric_exponential(&sample, 0.1).unwrap();
    assert_eq!(e.value, wpdve(&fitted, &Weight::Identity, 0.1).unwrap().value);

    let mut reversed = sample.clone();
    reversed.reverse();
    let a = wpve_parametric_exponential(&reversed, 0.1).unwrap().value;
    assert!((a - wpve_parametric_exponential(&sample, 0.1).unwrap().value).abs() < 1e-15);
}

#[test]
fn kde_density_translates_with_the_data() {
    let sample = sample_n(&Distribution::exponential(1.0).unwrap(), 40, 5).unwrap();
    let shifted: Vec<f64> = sample.iter().map(|y| y + 2.5).collect();
    let (k, ks) = (
        KernelEstimator::new(&sample, 0.2).unwrap(),
        KernelEstimator::new(&shifted, 0.2).unwrap(),
    );
    for y in [0.1, 0.7, 2.0, 5.0] {
        assert!((k.ln_pdf(y) - ks.ln_pdf(y + 2.5)).abs() < 1e-10);
    }
}

#[test]
fn single_observation_paired_estimate() {
    let k = KernelEstimator::new(&[1.0], 0.5).unwrap();
    let e = wpdve_nonparametric(&k, 1.0).unwrap();
    assert!(e.value.is_finite() && e.value > 0.0);
    match e.auxiliary {
        Auxiliary::PairedMass { past, residual } => {
            assert!((past - (0.5 - phi(-2.0))).abs() < 1e-8);
            assert!((residual - (phi(10.0) - 0.5)).abs() < 1e-8);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn empty_windows_are_domain_errors() {
    let k = KernelEstimator::new(&[10.0, 11.0, 12.0], 0.1).unwrap();
    assert!(matches!(wpve_nonparametric(&k, 1.0), Err(Error::Domain(_))));
    assert!(matches!(wpve_nonparametric(&k, 0.0), Err(Error::Domain(_))));
    assert!(matches!(wpdve_nonparametric(&k, 20.0), Err(Error::Domain(_))));
    assert!(KernelEstimator::new(&[], 0.1).is_err());
    assert!(KernelEstimator::new(&[1.0, -1.0], 0.1).is_err());
    assert!(KernelEstimator::new(&[1.0], 0.0).is_err());
}

#[test]
fn large_samples_approach_the_truth() {
    let d = Distribution::exponential(0.7).unwrap();
    let sample = sample_n(&d, 20_000, 3).unwrap();
    let coarse = KernelEstimator::new(&sample[..1000], 0.1).unwrap();
    let fine = KernelEstimator::new(&sample, 0.03).unwrap();
    for t in [0.4, 1.0, 2.0] {
        let truth = wpve(&d, &Weight::Identity, t).unwrap().value;
        let err = |k: &KernelEstimator| (wpve_nonparametric(k, t).unwrap().value - truth).abs();
        let (e_coarse, e_fine) = (err(&coarse), err(&fine));
        // The boundary at zero leaves an O(b) bias, about 10% at t = 0.4.
        assert!(e_fine < e_coarse && e_fine < 0.15 * truth, "t={t}: {e_fine} vs {e_coarse}");
    }
}

#[test]
fn silverman_rule() {
    let sample: Vec<f64> = (1..=10).map(f64::from).collect();
    // sd = sqrt(55/6); type-7 IQR = 7.75 - 3.25 = 4.5 > 1.34 sd
    let expected = 0.9 * (55.0f64 / 6.0).sqrt() * 10f64.powf(-0.2);
    assert!((silverman_bandwidth(&sample).unwrap() - expected).abs() < 1e-14);
    let skewed = [1.0, 1.0, 1.0, 1.1, 1.2, 1.3, 9.0, 20.0];
    let b = silverman_bandwidth(&skewed).unwrap();
    // IQR = 3.225 - 1.0, so the IQR branch is active
    assert!((b - 0.9 * (2.225 / 1.34) * 8f64.powf(-0.2)).abs() < 1e-12);
    assert!(silverman_bandwidth(&[1.0]).is_err());
    assert!(silverman_bandwidth(&[2.0, 2.0, 2.0]).is_err());
}

#[test]
fn renormalized_kde_has_unit_positive_mass() {
    let sample = sample_n(&Distribution::exponential(2.0).unwrap(), 60, 8).unwrap();
    let k = KernelEstimator::new(&sample, 0.3).unwrap();
    assert!(k.positive_mass().unwrap() < 0.95);
    let r = k.clone().with_boundary(Boundary::Renormalize).unwrap();
    assert!((r.positive_mass().unwrap() - 1.0).abs() < 1e-9);
    // The plug-in ratio g_hat / G_hat(t) does not see the constant.
    let a = wpve_nonparametric(&k, 0.5).unwrap().value;
    let b = wpve_nonparametric(&r, 0.5).unwrap().value;
    assert!((a - b).abs() < 1e-9 * a);
}

proptest! {
    #[test]
    fn kernel_estimates_are_nonnegative(seed in 0u64..1000, b in 0.05f64..1.0, t in 0.2f64..2.0) {
        let sample = sample_n(&Distribution::exponential(0.7).unwrap(), 30, seed).unwrap();
        let k = KernelEstimator::new(&sample, b).unwrap();
        prop_assert!(wpve_nonparametric(&k, t).unwrap().value >= 0.0);
        prop_assert!(wpdve_nonparametric(&k, t).unwrap().value >= 0.0);
    }
}
