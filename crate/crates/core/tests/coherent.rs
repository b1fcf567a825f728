use proptest::prelude::*;
use varentropy::coherent::{
    compare_systems, pve_system, system_distribution, wpre_system, wpse_system, wpve_parallel_power_closed,
    wpve_system, CoherentSystem, DistortionFunction,
};
use varentropy::distributions::{Distribution, Lifetime};
use varentropy::measures::{weighted_past_entropy, weighted_past_renyi, wpve, Weight};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-12)
}

fn structures() -> [DistortionFunction; 3] {
    [
        DistortionFunction::series(),
        DistortionFunction::two_of_three(),
        DistortionFunction::parallel(),
    ]
}

#[test]
fn power_component_reference_rows() {
    // Frozen from a 30-digit independent evaluation of the same integrals.
    let expected = [
        ("series", 0.0166167, 26.556069, 8.21305, 0.0150588),
        ("2-of-3", 0.0143377, 4.761826, 4.94234, 0.00942838),
        ("parallel", 0.00131446, 0.4444444, 2.93125, -0.0810603),
    ];
    let rows = compare_systems(Distribution::power(0.2, 1.0).unwrap(), 0.5, 1.8).unwrap();
    for (row, (name, wpve, pve, wpre, wpse)) in rows.iter().zip(expected) {
        assert_eq!(row.system, name);
        assert!(close(row.wpve, wpve, 1e-5), "{row:?}");
        assert!(close(row.pve, pve, 1e-5), "{row:?}");
        assert!(close(row.wpre, wpre, 1e-5), "{row:?}");
        assert!(close(row.wpse, wpse, 1e-5), "{row:?}");
    }
}

#[test]
fn quantile_domain_matches_system_density() {
    let components = [Distribution::power(0.2, 1.0).unwrap(), Distribution::exponential(1.0).unwrap()];
    for c in components {
        let ts = [0.25, 0.5, c.quantile(0.9).unwrap()];
        for q in structures() {
            let s = CoherentSystem::new(c, q.clone());
            let law = system_distribution(&s);
            for t in ts {
                let ctx = format!("{} {:?} t={t}", q.name(), c);
                let direct = wpve(&law, &Weight::Identity, t).unwrap().value;
                assert!(close(wpve_system(&s, t).unwrap(), direct, 1e-6), "wpve {ctx}");
                let direct = wpve(&law, &Weight::Unit, t).unwrap().value;
                assert!(close(pve_system(&s, t).unwrap(), direct, 1e-6), "pve {ctx}");
                let direct = weighted_past_entropy(&law, &Weight::Identity, t).unwrap().value;
                assert!(close(wpse_system(&s, t).unwrap(), direct, 1e-6), "wpse {ctx}");
                let direct = weighted_past_renyi(&law, &Weight::Identity, t, 1.8).unwrap().value;
                assert!(close(wpre_system(&s, t, 1.8).unwrap(), direct, 1e-6), "wpre {ctx}");
            }
        }
    }
}

#[test]
fn structures_are_ordered_on_power_components() {
    for t in [0.3, 0.5, 0.8] {
        let rows = compare_systems(Distribution::power(0.2, 1.0).unwrap(), t, 1.8).unwrap();
        for w in rows.windows(2) {
            assert!(w[0].pve >= w[1].pve, "t={t} {w:?}");
            assert!(w[0].wpre >= w[1].wpre, "t={t} {w:?}");
            // The weighted measures flip elsewhere: parallel exceeds 2-of-3 in
            // WPVE at t = 0.3, and 2-of-3 exceeds series in WPSE at t = 0.8.
            if t == 0.5 {
                assert!(w[0].wpve >= w[1].wpve, "t={t} {w:?}");
                assert!(w[0].wpse >= w[1].wpse, "t={t} {w:?}");
            }
        }
    }
}

#[test]
fn parallel_power_system_is_power_law() {
    for beta in [0.2, 0.5, 1.0, 2.0] {
        let s = CoherentSystem::new(Distribution::power(beta, 1.0).unwrap(), DistortionFunction::parallel());
        for t in [0.1, 0.5, 0.9] {
            let closed = wpve_parallel_power_closed(beta, t).unwrap();
            assert!(close(wpve_system(&s, t).unwrap(), closed, 1e-8), "beta={beta} t={t}");
        }
    }
}

#[test]
fn identity_structure_is_the_component() {
    let c = Distribution::exponential(0.7).unwrap();
    let s = CoherentSystem::new(c, DistortionFunction::identity());
    for t in [0.1, 1.0, 3.0] {
        let direct = wpve(&c, &Weight::Identity, t).unwrap().value;
        assert!(close(wpve_system(&s, t).unwrap(), direct, 1e-8));
    }
}

#[test]
fn invalid_distortions_are_rejected() {
    assert!(DistortionFunction::polynomial(&[3.0, -2.0]).is_err());
    assert!(DistortionFunction::polynomial(&[0.5, 0.4]).is_err());
    assert!(DistortionFunction::new("neg", |u| u, |_| 1.0).is_ok());
    assert!(DistortionFunction::new("shift", |u| 0.5 + 0.5 * u, |_| 0.5).is_err());
    assert!(DistortionFunction::new("dip", |u| 4.0 * u * (1.0 - u) + u * u, |u| 4.0 - 6.0 * u).is_err());
}

proptest! {
    #[test]
    fn convex_mixtures_of_structures_give_valid_laws(w1 in 0.0f64..1.0, w2 in 0.0f64..1.0, y in 0.01f64..5.0) {
        let (a, b) = (w1 * (1.0 - w2), w2);
        let c = 1.0 - a - b;
        prop_assume!(c >= 0.0);
        // a*(3u - 3u^2 + u^3) + b*(3u^2 - 2u^3) + c*u^3
        let q = DistortionFunction::polynomial(&[3.0 * a, -3.0 * a + 3.0 * b, a - 2.0 * b + c]).unwrap();
        let law = system_distribution(&CoherentSystem::new(Distribution::exponential(1.0).unwrap(), q));
        prop_assert!(law.pdf(y) >= 0.0);
        prop_assert!(law.cdf(y) <= law.cdf(y + 0.1) + 1e-15);
        prop_assert!((0.0..=1.0).contains(&law.cdf(y)));
    }
}
