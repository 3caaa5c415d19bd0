use std::f64::consts::PI;

use proptest::prelude::*;
use stocycle::linear::{ArimaSpec, ArmaSpec};
use stocycle::modulated::{
    acf_random_walk_phase, apc_moment, engine_moment, even_moment_and_kurtosis, mc_moment,
    second_moment_sequence, stationary_moment, transient_moment, AmplitudeNoise, InitialLevel,
    ModulatedCycleSpec, PhaseSpec,
};
use stocycle::rng::{replicate, rng_from_seed};
use stocycle::stats::{mean_se, Estimate};
use stocycle::types::{Frequency, LagPattern};

fn lags(v: &[i64]) -> LagPattern {
    LagPattern::new(v.to_vec()).unwrap()
}

fn integrated(a: f64, amplitude: AmplitudeNoise, base: ArmaSpec, lam: f64) -> ModulatedCycleSpec {
    ModulatedCycleSpec {
        a,
        frequency: Frequency::new(lam).unwrap(),
        amplitude,
        phase: PhaseSpec::Integrated {
            arima: ArimaSpec::new(base).unwrap(),
            initial_level: InitialLevel::UniformCycle,
        },
    }
}

fn ar_amplitude(rho: f64, sigma: f64) -> AmplitudeNoise {
    AmplitudeNoise::Gaussian {
        arma: ArmaSpec::ar1(rho, sigma).unwrap(),
    }
}

/// Draws `y` at one time per replication.
fn draws_at(spec: &ModulatedCycleSpec, t: i64, reps: usize, seed: u64) -> Vec<f64> {
    replicate(seed, reps, |rng, _| {
        spec.simulate_with(rng, 1, t).unwrap()[0]
    })
}

/// Sample kurtosis `m4 / m2^2` of zero-mean draws with its delta-method SE.
fn kurtosis(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|x| x * x).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| x.powi(4)).sum::<f64>() / n;
    let k = m4 / (m2 * m2);
    let infl: Vec<f64> = xs
        .iter()
        .map(|x| (x.powi(4) - 2.0 * k * m2 * x * x) / (m2 * m2))
        .collect();
    Estimate {
        mean: k,
        se: mean_se(&infl).se,
    }
}

#[test]
fn bounded_when_amplitude_is_constant() {
    let spec = integrated(
        1.0,
        AmplitudeNoise::Zero,
        ArmaSpec::white_noise(0.7).unwrap(),
        1.0,
    );
    let y = spec
        .simulate_with(&mut rng_from_seed(3), 10_000, 0)
        .unwrap();
    assert!(y.iter().all(|v| v.abs() <= 1.0));
}

#[test]
fn random_walk_phase_mean_is_zero_at_every_time() {
    let spec = integrated(
        1.0,
        AmplitudeNoise::Zero,
        ArmaSpec::white_noise(0.2).unwrap(),
        PI / 6.0,
    );
    let paths = replicate(8, 100_000, |rng, _| spec.simulate_with(rng, 51, 0).unwrap());
    for t in 0..=50 {
        let xs: Vec<f64> = paths.iter().map(|p| p[t]).collect();
        let est = mean_se(&xs);
        assert!(est.within(0.0, 4.0), "t={t}: {est:?}");
    }
}

#[test]
fn iid_phase_second_moment_matches_monte_carlo() {
    let spec = ModulatedCycleSpec {
        a: 1.0,
        frequency: Frequency::new(PI / 5.0).unwrap(),
        amplitude: AmplitudeNoise::Zero,
        phase: PhaseSpec::Stationary {
            arma: ArmaSpec::white_noise(0.8).unwrap(),
        },
    };
    let l = lags(&[0, 1]);
    let engine = apc_moment(&spec, &l, 3).unwrap();
    let mc = mc_moment(&spec, &l, 3, 1_000_000, 21).unwrap();
    assert!(mc.within(engine, 4.0), "{mc:?} vs {engine}");
}

#[test]
fn exact_random_walk_constants() {
    let spec = integrated(
        1.0,
        AmplitudeNoise::Zero,
        ArmaSpec::white_noise(0.2).unwrap(),
        PI / 6.0,
    );
    assert!((stationary_moment(&spec, &lags(&[0, 0])).unwrap() - 0.5).abs() < 1e-15);
    assert!((stationary_moment(&spec, &lags(&[0, 0, 0, 0])).unwrap() - 0.375).abs() < 1e-15);
    assert_eq!(stationary_moment(&spec, &lags(&[0, 1, 5])).unwrap(), 0.0);
    assert!(
        acf_random_walk_phase(1.0, 0.0, PI / 6.0, 0.04, 3)
            .unwrap()
            .abs()
            < 1e-16
    );
}

#[test]
fn random_walk_acf_matches_monte_carlo() {
    let lam = PI / 6.0;
    let flat = integrated(
        1.0,
        AmplitudeNoise::Zero,
        ArmaSpec::white_noise(0.2).unwrap(),
        lam,
    );
    let v0 = acf_random_walk_phase(1.0, 0.0, lam, 0.04, 0).unwrap();
    let sq: Vec<f64> = draws_at(&flat, 4, 1_000_000, 22)
        .iter()
        .map(|y| y * y)
        .collect();
    let est = mean_se(&sq);
    assert!(est.within(v0, 4.0), "{est:?} vs {v0}");

    let rho: f64 = 0.5;
    let s_a: f64 = 0.3;
    let noisy = integrated(
        1.0,
        ar_amplitude(rho, s_a),
        ArmaSpec::white_noise(0.2).unwrap(),
        lam,
    );
    let g6 = s_a * s_a * rho.powi(6) / (1.0 - rho * rho);
    let v6 = acf_random_walk_phase(1.0, g6, lam, 0.04, 6).unwrap();
    let mc = mc_moment(&noisy, &lags(&[0, 6]), 0, 1_000_000, 23).unwrap();
    assert!(mc.within(v6, 4.0), "{mc:?} vs {v6}");
}

#[test]
fn kurtosis_matches_monte_carlo() {
    let lam = PI / 6.0;
    let cases = [
        integrated(
            1.0,
            AmplitudeNoise::Zero,
            ArmaSpec::white_noise(0.2).unwrap(),
            lam,
        ),
        integrated(
            0.0,
            ar_amplitude(0.0, 1.0),
            ArmaSpec::white_noise(0.2).unwrap(),
            lam,
        ),
    ];
    for (i, spec) in cases.iter().enumerate() {
        let k = even_moment_and_kurtosis(spec).unwrap().kurtosis;
        let est = kurtosis(&draws_at(spec, 0, 1_000_000, 30 + i as u64));
        assert!(est.within(k, 4.0), "case {i}: {est:?} vs {k}");
    }
    let k0 = even_moment_and_kurtosis(&cases[0]).unwrap();
    assert!((k0.kurtosis - 1.5).abs() < 1e-14);
    let k1 = even_moment_and_kurtosis(&cases[1]).unwrap();
    assert!((k1.kurtosis - 1.5 * k1.amplitude_kurtosis).abs() < 1e-12);
}

#[test]
fn engine_matches_monte_carlo_with_arima_phase() {
    let spec = integrated(
        0.8,
        ar_amplitude(0.4, 0.5),
        ArmaSpec::new(vec![0.5], vec![0.3], 0.3).unwrap(),
        0.9,
    );
    for (i, l) in [
        vec![0, 0],
        vec![0, 3],
        vec![-2, 1],
        vec![0, 0, 1, 1],
        vec![0, 2, 5, 7],
    ]
    .iter()
    .enumerate()
    {
        let l = lags(l);
        let engine = engine_moment(&spec, &l, 0).unwrap();
        let mc = mc_moment(&spec, &l, 0, 200_000, 40 + i as u64).unwrap();
        assert!(mc.within(engine, 4.0), "{l:?}: {mc:?} vs {engine}");
    }
}

#[test]
fn zero_start_transient_matches_monte_carlo() {
    let mut spec = integrated(
        1.0,
        AmplitudeNoise::Zero,
        ArmaSpec::white_noise(0.3).unwrap(),
        0.7,
    );
    if let PhaseSpec::Integrated { initial_level, .. } = &mut spec.phase {
        *initial_level = InitialLevel::Zero;
    }
    let l = lags(&[0, 1]);
    for &t in &[0i64, 3, 10] {
        let exact = transient_moment(&spec, &l, t, 0).unwrap();
        let prods = replicate(50 + t as u64, 200_000, |rng, _| {
            let y = spec.simulate_with(rng, (t + 2) as usize, 0).unwrap();
            y[t as usize] * y[t as usize + 1]
        });
        let est = mean_se(&prods);
        assert!(est.within(exact, 4.0), "t={t}: {est:?} vs {exact}");
    }
}

fn small_spec() -> impl Strategy<Value = ModulatedCycleSpec> {
    (
        0.0f64..2.0,
        0.0f64..0.9,
        0.05f64..0.6,
        -0.8f64..0.8,
        0.05f64..PI,
    )
        .prop_map(|(a, r, s, phi, lam)| {
            integrated(a, ar_amplitude(r, 0.4), ArmaSpec::ar1(phi, s).unwrap(), lam)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stationary_moment_is_shift_invariant(
        spec in small_spec(),
        l in proptest::collection::vec(-6i64..6, 2..=4),
        c in -30i64..30,
    ) {
        let base = lags(&l);
        let a = stationary_moment(&spec, &base).unwrap();
        let b = stationary_moment(&spec, &base.shifted(c)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn second_moment_sequence_matches_the_engine(spec in small_spec()) {
        let seq = second_moment_sequence(&spec, 30).unwrap();
        for (tau, v) in seq.iter().enumerate() {
            let e = stationary_moment(&spec, &lags(&[0, tau as i64])).unwrap();
            prop_assert!((v - e).abs() <= 1e-12 * e.abs().max(1.0), "tau={} {} vs {}", tau, v, e);
        }
    }

    #[test]
    fn odd_orders_vanish(spec in small_spec(), l in proptest::collection::vec(-6i64..6, 1..=5)) {
        prop_assume!(l.len() % 2 == 1);
        prop_assert_eq!(stationary_moment(&spec, &lags(&l)).unwrap(), 0.0);
    }

    #[test]
    fn integrated_engine_ignores_time(spec in small_spec(), t in -100i64..100) {
        let l = lags(&[0, 1, 1, 3]);
        prop_assert_eq!(engine_moment(&spec, &l, t).unwrap(), engine_moment(&spec, &l, 0).unwrap());
    }

    #[test]
    fn first_moment_under_stationary_phase_has_the_carrier_period(k in 3u32..40, t in -50i64..50, s in 0.0f64..1.0) {
        let lam = 2.0 * PI / k as f64;
        let spec = ModulatedCycleSpec {
            a: 1.3,
            frequency: Frequency::new(lam).unwrap(),
            amplitude: AmplitudeNoise::Zero,
            phase: PhaseSpec::Stationary { arma: ArmaSpec::ar1(0.5, s).unwrap() },
        };
        let l = lags(&[0]);
        let m = apc_moment(&spec, &l, t).unwrap();
        prop_assert!((m - apc_moment(&spec, &l, t + k as i64).unwrap()).abs() < 1e-12);
        let var_p = s * s / 0.75;
        let oracle = 1.3 * (-lam * lam * var_p / 2.0).exp() * (lam * t as f64).sin();
        prop_assert!((m - oracle).abs() < 1e-12);
    }
}
