mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use stocycle::cycles::{
    amplitude_path, reconstruct, rotation_representation, CompanionCase, CompanionOutput,
    CompanionSpec, HannanComponent, HannanSpec, LayeredCycleSpec, StochasticCycleSpec,
};
use stocycle::innovations::SphericalFamily;
use stocycle::linear::ArmaSpec;
use stocycle::rng::{replicate, rng_from_seed};
use stocycle::spectral::empirical_acf;
use stocycle::stats::mean_se;
use stocycle::types::{Frequency, SeriesPath};

use rand::Rng;
use rand_distr::StandardNormal;

use common::bartlett_var;

fn freq(l: f64) -> Frequency {
    Frequency::new(l).unwrap()
}

fn check_acf_against(path: &[f64], theory: &dyn Fn(i64) -> f64, tau_max: usize) {
    let n = path.len();
    let acf = empirical_acf(path, tau_max).unwrap();
    let g: Vec<f64> = (0..2000).map(theory).collect();
    for tau in 0..=tau_max {
        let se = bartlett_var(&g, tau, n).sqrt();
        let z = (acf[tau] - g[tau]).abs() / se;
        assert!(
            z < 4.0,
            "tau={tau}: {} vs {} (z = {z:.2})",
            acf[tau],
            g[tau]
        );
    }
}

#[test]
fn hannan_sample_acf_matches_closed_form() {
    let h = HannanSpec::single(PI / 6.0, ArmaSpec::ar1(0.9, 1.0).unwrap()).unwrap();
    let y = h.simulate_with(&mut rng_from_seed(5), 100_000, 0).unwrap();
    let oracle = |k: i64| 0.9f64.powi(k.abs() as i32) / (1.0 - 0.81) * (PI / 6.0 * k as f64).cos();
    check_acf_against(&y, &oracle, 20);
}

#[test]
fn stochastic_cycle_sample_acf_matches_the_same_closed_form() {
    let s = StochasticCycleSpec {
        rho_tilde: 0.9,
        frequency: freq(PI / 6.0),
        sigma_kappa: 1.0,
        innovation: None,
    };
    let y = s.simulate_with(&mut rng_from_seed(6), 100_000, 0).unwrap();
    let oracle = |k: i64| 0.9f64.powi(k.abs() as i32) / (1.0 - 0.81) * (PI / 6.0 * k as f64).cos();
    check_acf_against(&y, &oracle, 20);
}

#[test]
fn recursion_and_direct_construction_agree_path_for_path() {
    for &(rho, lam, t0, seed) in &[
        (0.9, PI / 6.0, 0i64, 1u64),
        (-0.4, 2.5, 17, 2),
        (0.99, 0.05, -30, 3),
    ] {
        for innovation in [
            None,
            Some(SphericalFamily::StudentT {
                nu: 5.0,
                sigma: 2.0,
            }),
        ] {
            let s = StochasticCycleSpec {
                rho_tilde: rho,
                frequency: freq(lam),
                sigma_kappa: 1.3,
                innovation,
            };
            let h = s.as_hannan().unwrap();
            let a = s.simulate_with(&mut rng_from_seed(seed), 5000, t0).unwrap();
            let b = h.simulate_with(&mut rng_from_seed(seed), 5000, t0).unwrap();
            let worst = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-10, "rho={rho} lambda={lam}: {worst}");
        }
    }
}

#[test]
fn recursion_matches_hand_rolled_coordinates() {
    let (rho, lam, s, t0) = (0.8, 1.1, 0.7, 5i64);
    let spec = StochasticCycleSpec {
        rho_tilde: rho,
        frequency: freq(lam),
        sigma_kappa: s,
        innovation: None,
    };
    let y = spec.simulate_with(&mut rng_from_seed(9), 1000, t0).unwrap();
    let mut rng = rng_from_seed(9);
    let (mut a, mut b) = (0.0, 0.0);
    for (k, v) in y.iter().enumerate() {
        let e1: f64 = rng.sample(StandardNormal);
        let e2: f64 = rng.sample(StandardNormal);
        if k == 0 {
            a = s * e1 / (1.0 - rho * rho).sqrt();
            b = s * e2 / (1.0 - rho * rho).sqrt();
        } else {
            a = rho * a + s * e1;
            b = rho * b + s * e2;
        }
        let t = (t0 + k as i64) as f64;
        let direct = a * (lam * t).cos() + b * (lam * t).sin();
        assert!((v - direct).abs() < 1e-10, "k={k}");
    }
}

#[test]
fn two_component_hannan_acf_over_paths() {
    let h = HannanSpec {
        components: vec![
            HannanComponent {
                frequency: freq(0.4),
                arma: ArmaSpec::ar1(0.8, 1.0).unwrap(),
                innovation: None,
            },
            HannanComponent {
                frequency: freq(2.0),
                arma: ArmaSpec::new(vec![0.3], vec![0.5], 0.6).unwrap(),
                innovation: Some(SphericalFamily::GumbelType { a: 1.0, b: 2.0 }),
            },
        ],
    };
    // E y_t y_{t+tau} from independent short paths; standard error across paths
    let tau_max = 8;
    let prods = replicate(44, 40_000, |rng, _| {
        let y = h.simulate_with(rng, tau_max + 1, 3).unwrap();
        (0..=tau_max).map(|k| y[0] * y[k]).collect::<Vec<f64>>()
    });
    for tau in 0..=tau_max {
        let xs: Vec<f64> = prods.iter().map(|p| p[tau]).collect();
        let est = mean_se(&xs);
        let target = h.acf(tau as i64).unwrap();
        assert!(est.within(target, 4.0), "tau={tau}: {est:?} vs {target}");
    }
}

#[test]
fn layered_cycle_acf_over_paths() {
    let l = LayeredCycleSpec {
        outer_frequency: freq(0.9),
        inner_frequency: freq(0.4),
        arma: ArmaSpec::ar1(0.6, 1.0).unwrap(),
    };
    let prods = replicate(45, 40_000, |rng, _| {
        let y = l.simulate_with(rng, 8, -2).unwrap();
        (0..8).map(|k| y[0] * y[k]).collect::<Vec<f64>>()
    });
    for tau in 0..8 {
        let xs: Vec<f64> = prods.iter().map(|p| p[tau]).collect();
        let est = mean_se(&xs);
        let t = tau as f64;
        let oracle = 0.6f64.powi(tau as i32) / (1.0 - 0.36) * (0.4 * t).cos() * (0.9 * t).cos();
        assert!(est.within(oracle, 4.0), "tau={tau}: {est:?} vs {oracle}");
    }
}

#[test]
fn proportional_companion_amplitude_is_scaled_modulus() {
    let spec = CompanionSpec {
        rho: 0.5,
        sigma: 1.0,
        frequency: freq(0.7),
        companion: CompanionCase::Proportional { a: 1.0 },
        output: CompanionOutput::Y,
    };
    let (y, ys) = spec.simulate_pair(&mut rng_from_seed(1), 500).unwrap();
    for (amp, v) in amplitude_path(&y, &ys).iter().zip(&y) {
        assert!((amp - 2f64.sqrt() * v.abs()).abs() <= 1e-15 * amp.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reconstruction_is_exact(
        vals in proptest::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 1..200),
        lam in 0.001f64..PI,
        t0 in -1000i64..1000,
    ) {
        let (y, ys): (Vec<f64>, Vec<f64>) = vals.into_iter().unzip();
        let yp = SeriesPath::new(t0, y.clone(), 0).unwrap();
        let ysp = SeriesPath::new(t0, ys, 0).unwrap();
        let (a, b) = rotation_representation(&yp, &ysp, freq(lam)).unwrap();
        let back = reconstruct(&a, &b, freq(lam)).unwrap();
        for (u, v) in back.iter().zip(&y) {
            prop_assert!((u - v).abs() < 1e-12 * v.abs().max(1.0));
        }
    }

    #[test]
    fn hannan_acf_is_even(phi in -0.95f64..0.95, lam in 0.01f64..PI, tau in 0i64..60) {
        let h = HannanSpec::single(lam, ArmaSpec::ar1(phi, 1.0).unwrap()).unwrap();
        prop_assert_eq!(h.acf(tau).unwrap(), h.acf(-tau).unwrap());
    }
}
