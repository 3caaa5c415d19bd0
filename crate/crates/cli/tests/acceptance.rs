//! Acceptance criteria 1 to 10. Each runs to completion and prints one
//! PASS or FAIL line; the target fails if any criterion does.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use stocycle::amplitude::{empirical_icv, icv, AmplitudeLaw};
use stocycle::cycles::{
    empirical_cross_cov, rotation_representation, CompanionCase, CompanionOutput, CompanionSpec,
    FswpSpec, HannanComponent, HannanSpec, NthOrderSpec, StochasticCycleSpec,
};
use stocycle::innovations::{InnovationPair, MixingLaw, RadialLaw, SphericalFamily};
use stocycle::lab::{
    fswp_coefficients, moment_drift_scan, pseudocyclical_check, CounterexampleCase,
    CounterexampleSpec, DriftVerdict,
};
use stocycle::linear::{ArimaSpec, ArmaSpec, LinearSpec};
use stocycle::modulated::{
    acf_random_walk_phase, even_moment_and_kurtosis, mc_moment, AmplitudeNoise, InitialLevel,
    ModulatedCycleSpec, PhaseSpec, ALT_RANDOM_WALK_ACF_FACTOR,
};
use stocycle::process::ProcessSpec;
use stocycle::quad::{integrate_disc, integrate_to_infinity};
use stocycle::rng::{replicate, rng_from_seed};
use stocycle::spectral::{average_curves, empirical_acf, periodogram, relative_rms, uniform_grid};
use stocycle::stats::{batch_mean_se, mean_se, Estimate};
use stocycle::types::{rotation, Frequency, LagPattern, SeriesPath};
use stocycle::verify::{model_suite, reference_modulated_cycle};

type Verdict = (bool, String);
type Criterion = (&'static str, fn() -> Verdict);

fn freq(l: f64) -> Frequency {
    Frequency::new(l).unwrap()
}

fn lags(v: &[i64]) -> LagPattern {
    LagPattern::new(v.to_vec()).unwrap()
}

fn ar1(rho: f64, sigma: f64) -> ArmaSpec {
    ArmaSpec::ar1(rho, sigma).unwrap()
}

/// Bartlett variance of the sample autocovariance at lag `tau` for a linear
/// process with autocovariance `g[h]`, `h >= 0`.
fn bartlett_var(g: &[f64], tau: usize, n: usize) -> f64 {
    let at = |h: i64| g.get(h.unsigned_abs() as usize).copied().unwrap_or(0.0);
    let hmax = g.len() as i64 - 1;
    (-hmax..=hmax)
        .map(|h| at(h) * at(h) + at(h + tau as i64) * at(h - tau as i64))
        .sum::<f64>()
        / n as f64
}

fn worst(zs: impl IntoIterator<Item = f64>) -> f64 {
    zs.into_iter().fold(0.0, f64::max)
}

fn criterion_1() -> Verdict {
    let g = (PI / (4.0 - PI)).sqrt();
    let gauss = icv(&SphericalFamily::GaussianIso { sigma: 2.3 }).unwrap();
    let kotz = icv(&SphericalFamily::KotzType {
        n: 1.0,
        s: 1.0,
        r: 0.7,
    })
    .unwrap();
    let circle = icv(&SphericalFamily::CircleMixture {
        m: 3,
        mu: 1e-3,
        sigma: 1.0,
    })
    .unwrap();
    let gumbel = icv(&SphericalFamily::GumbelType { a: 1.0, b: 1e-6 }).unwrap();
    let polar = icv(&SphericalFamily::PolarAmplitude {
        amplitude: RadialLaw::Gaussian {
            mu: 1e-6,
            sigma: 1.0,
        },
    })
    .unwrap();
    let half_normal = (2.0 / (PI - 2.0)).sqrt();
    let diffs = [
        (gauss - g).abs(),
        (kotz - g).abs(),
        (circle - g).abs(),
        (gumbel - g).abs(),
        (polar - half_normal).abs(),
    ];
    let ok = diffs[0] < 1e-12
        && diffs[1] < 1e-10
        && diffs[2] < 1e-3
        && diffs[3] < 1e-3
        && diffs[4] < 1e-3;
    (
        ok,
        format!(
            "gaussian {gauss:.15} (|d| {:.1e}), kotz |d| {:.1e}, circle |d| {:.1e}, gumbel |d| {:.1e}, polar k->0 |d| {:.1e}",
            diffs[0], diffs[1], diffs[2], diffs[3], diffs[4]
        ),
    )
}

fn six_families() -> Vec<(&'static str, SphericalFamily)> {
    vec![
        ("gaussian", SphericalFamily::GaussianIso { sigma: 1.7 }),
        (
            "student-t",
            SphericalFamily::StudentT {
                nu: 6.0,
                sigma: 0.8,
            },
        ),
        (
            "kotz",
            SphericalFamily::KotzType {
                n: 3.0,
                s: 0.8,
                r: 1.2,
            },
        ),
        ("gumbel", SphericalFamily::GumbelType { a: 0.7, b: 2.5 }),
        (
            "circle mixture",
            SphericalFamily::CircleMixture {
                m: 2,
                mu: 3.0,
                sigma: 1.0 / 5f64.sqrt(),
            },
        ),
        (
            "polar gaussian",
            SphericalFamily::PolarAmplitude {
                amplitude: RadialLaw::Gaussian {
                    mu: 4.0,
                    sigma: 0.5,
                },
            },
        ),
    ]
}

fn criterion_2() -> Verdict {
    let mut zs = Vec::new();
    for (i, (_, fam)) in six_families().into_iter().enumerate() {
        let law = AmplitudeLaw::new(fam).unwrap();
        let draws = replicate(200 + i as u64, 1_000_000, |rng, _| law.sample(rng));
        let est = empirical_icv(&draws).unwrap();
        zs.push((est.icv - law.icv().unwrap()).abs() / est.se);
    }
    let detail = six_families()
        .iter()
        .zip(&zs)
        .map(|((n, _), z)| format!("{n} z={z:.2}"))
        .collect::<Vec<_>>()
        .join(", ");
    (zs.iter().all(|&z| z < 4.0), detail)
}

fn criterion_3() -> Verdict {
    let (l1, l2, r1, r2) = (PI / 6.0, PI / 2.0, 0.9f64, 0.5f64);
    let h = HannanSpec {
        components: vec![
            HannanComponent {
                frequency: freq(l1),
                arma: ar1(r1, 1.0),
                innovation: None,
            },
            HannanComponent {
                frequency: freq(l2),
                arma: ar1(r2, 1.0),
                innovation: None,
            },
        ],
    };
    let spec = ProcessSpec::Hannan(h);
    let grid = uniform_grid(257).unwrap();
    let tau_max = 20;
    let per_path = replicate(3, 200, |rng, _| {
        let y = spec.simulate_with(rng, 10_000, 0).unwrap();
        (
            empirical_acf(&y, tau_max).unwrap(),
            periodogram(&y, &grid).unwrap(),
        )
    });
    let oracle = |tau: usize| {
        let t = tau as f64;
        r1.powi(tau as i32) / (1.0 - r1 * r1) * (l1 * t).cos()
            + r2.powi(tau as i32) / (1.0 - r2 * r2) * (l2 * t).cos()
    };
    let z = worst((0..=tau_max).map(|tau| {
        let xs: Vec<f64> = per_path.iter().map(|p| p.0[tau]).collect();
        mean_se(&xs).z_score(oracle(tau))
    }));
    let curves: Vec<_> = per_path.into_iter().map(|p| p.1).collect();
    let avg = average_curves(&curves).unwrap();
    let theory = spec.psd(&grid).unwrap();
    let off_peak = |w: f64| w > 0.0 && (w - l1).abs() > 0.2 && (w - l2).abs() > 0.2;
    let rms = relative_rms(&avg, &theory, off_peak).unwrap();
    (
        z < 4.0 && rms < 0.10,
        format!("max ACF z over tau<=20 {z:.2}, off-peak periodogram relative RMS {rms:.4}"),
    )
}

fn criterion_4() -> Verdict {
    let mut gap: f64 = 0.0;
    for &(rho, lam, t0, seed) in &[
        (0.9, PI / 6.0, 0i64, 1u64),
        (-0.6, 2.2, 41, 2),
        (0.995, 0.03, -17, 3),
    ] {
        for innovation in [
            None,
            Some(SphericalFamily::StudentT {
                nu: 4.5,
                sigma: 1.2,
            }),
        ] {
            let s = StochasticCycleSpec {
                rho_tilde: rho,
                frequency: freq(lam),
                sigma_kappa: 0.8,
                innovation,
            };
            let a = s
                .simulate_with(&mut rng_from_seed(seed), 10_000, t0)
                .unwrap();
            let b = s
                .as_hannan()
                .unwrap()
                .simulate_with(&mut rng_from_seed(seed), 10_000, t0)
                .unwrap();
            gap = gap.max(worst(a.iter().zip(&b).map(|(x, y)| (x - y).abs())));
        }
    }
    (gap < 1e-10, format!("largest path difference {gap:.2e}"))
}

fn criterion_5() -> Verdict {
    let spec = reference_modulated_cycle();
    let report = model_suite(&ProcessSpec::Modulated(spec.clone()), 100_000, 5).unwrap();
    let max_z = worst(report.checks.iter().map(|c| c.z));
    let expected = 11 + 2;
    // the competing constant 2 against the engine's 1/2, at tau = 0
    let mc0 = mc_moment(&spec, &lags(&[0, 0]), 0, 100_000, 51).unwrap();
    let g_a0 = 0.09 / 0.75;
    let half = acf_random_walk_phase(1.0, g_a0, PI / 6.0, 0.04, 0).unwrap();
    let alt = half / 0.5 * ALT_RANDOM_WALK_ACF_FACTOR;
    // E y^4 against a direct reading E y^4 = E (a + A)^4
    let even = even_moment_and_kurtosis(&spec).unwrap();
    let mc4 = mc_moment(&spec, &lags(&[0, 0, 0, 0]), 0, 100_000, 52).unwrap();
    let ok = report.checks.len() == expected
        && report.passed
        && mc0.within(half, 4.0)
        && mc0.z_score(alt) > 10.0
        && mc4.within(even.fourth, 4.0)
        && mc4.z_score(even.amplitude_fourth) > 10.0;
    (
        ok,
        format!(
            "{} patterns, max z {max_z:.2}; E y^2: engine 1/2 gives {half:.4} (z {:.2}), factor 2 gives {alt:.4} (z {:.0}); \
             E y^4: engine {:.4} (z {:.2}), E(a+A)^4 = {:.4} (z {:.0})",
            report.checks.len(),
            mc0.z_score(half),
            mc0.z_score(alt),
            even.fourth,
            mc4.z_score(even.fourth),
            even.amplitude_fourth,
            mc4.z_score(even.amplitude_fourth)
        ),
    )
}

fn criterion_6() -> Verdict {
    let grid: Vec<i64> = (0..=40).collect();
    let lam = PI / 5.0;
    let mut rw = reference_modulated_cycle();
    rw.frequency = freq(lam);
    let a = moment_drift_scan(
        &ProcessSpec::Modulated(rw),
        &lags(&[0, 1]),
        &grid,
        100_000,
        61,
    )
    .unwrap();

    let (rho, sigma): (f64, f64) = (0.5, 0.5);
    let stat = ModulatedCycleSpec {
        a: 1.0,
        frequency: freq(lam),
        amplitude: AmplitudeNoise::Zero,
        phase: PhaseSpec::Stationary {
            arma: ar1(rho, sigma),
        },
    };
    let b = moment_drift_scan(
        &ProcessSpec::Modulated(stat),
        &lags(&[0]),
        &grid,
        100_000,
        62,
    )
    .unwrap();
    let var_p = sigma * sigma / (1.0 - rho * rho);
    let zb = worst(
        grid.iter()
            .zip(&b.estimates)
            .map(|(&t, e)| e.z_score((-lam * lam * var_p / 2.0).exp() * (lam * t as f64).sin())),
    );

    let nu: f64 = 1.0;
    let logistic = CounterexampleSpec {
        case: CounterexampleCase::Logistic { nu },
        frequency: freq(lam),
    };
    let c = moment_drift_scan(
        &ProcessSpec::Counterexample(logistic),
        &lags(&[0; 4]),
        &grid,
        1_000_000,
        63,
    )
    .unwrap();
    let zc = worst(grid.iter().zip(&c.estimates).map(|(&t, e)| {
        e.z_score(PI.powi(4) * nu.powi(4) * ((4.0 * lam * t as f64).cos() + 13.0) / 30.0)
    }));
    let ok = a.verdict == DriftVerdict::StationaryConsistent
        && b.verdict == DriftVerdict::Drifting
        && zb < 4.0
        && c.verdict == DriftVerdict::Drifting
        && zc < 4.0;
    (
        ok,
        format!(
            "random-walk phase {:?} (drift {:.2}); stationary phase {:?} (drift {:.1}, max z vs closed form {zb:.2}); \
             logistic {:?} (drift {:.1}, max z vs closed form {zc:.2})",
            a.verdict, a.drift_statistic, b.verdict, b.drift_statistic, c.verdict, c.drift_statistic
        ),
    )
}

fn criterion_7() -> Verdict {
    let (rho, lam, n) = (0.7f64, 0.5, 100_000);
    let spec = CompanionSpec {
        rho,
        sigma: 1.0,
        frequency: freq(lam),
        companion: CompanionCase::IndependentTwin,
        output: CompanionOutput::Y,
    };
    let (y, ys) = spec.simulate_pair(&mut rng_from_seed(71), n).unwrap();
    let (alpha, beta) = rotation_representation(
        &SeriesPath::new(0, y, 71).unwrap(),
        &SeriesPath::new(0, ys, 71).unwrap(),
        freq(lam),
    )
    .unwrap();
    let v = [&alpha.values, &beta.values];
    let mut max_z: f64 = 0.0;
    let mut consistent = true;
    for tau in 0..=10usize {
        let g = rho.powi(tau as i32) / (1.0 - rho * rho);
        let r = rotation(-lam * tau as f64);
        let omega = empirical_cross_cov(&alpha.values, &beta.values, tau).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                // (1/n) sum_t v_{t+tau, i} v_{t, j}
                let prods: Vec<f64> = (0..n - tau).map(|t| v[i][t + tau] * v[j][t]).collect();
                let est: Estimate = batch_mean_se(&prods, 100);
                consistent &= (omega[i][j] - est.mean * (n - tau) as f64 / n as f64).abs() < 1e-9;
                max_z = max_z.max(est.z_score(g * r[i][j]));
            }
        }
    }
    (
        max_z < 4.0 && consistent,
        format!("max entry-wise z over tau<=10 {max_z:.2} (batch-means SE, 100 batches)"),
    )
}

fn criterion_8() -> Verdict {
    let (d, lam, n) = (0.25, PI / 4.0, 100_000);
    let spec = FswpSpec {
        d,
        frequency: freq(lam),
        sigma_kappa: 1.0,
        truncation: 10_000,
    };
    let y = spec.simulate_with(&mut rng_from_seed(81), n, 0).unwrap();
    let acf = empirical_acf(&y, 10).unwrap();
    let g: Vec<f64> = (0..n as i64).map(|k| spec.acf(k).unwrap()).collect();
    let z = worst((0..=10).map(|tau| (acf[tau] - g[tau]).abs() / bartlett_var(&g, tau, n).sqrt()));
    let seqs = fswp_coefficients(d, 1.0, lam, 500).unwrap();
    let holds = pseudocyclical_check(&[seqs], 0.1).unwrap().holds;
    (
        z < 4.0 && holds,
        format!("max ACF z over tau<=10 {z:.2} (Bartlett SE); pseudo-cyclical: {holds}"),
    )
}

fn all_families() -> Vec<SphericalFamily> {
    let mut f: Vec<SphericalFamily> = six_families().into_iter().map(|p| p.1).collect();
    f.extend([
        SphericalFamily::KotzType {
            n: 20.0,
            s: 1.0,
            r: 1.0,
        },
        SphericalFamily::PolarAmplitude {
            amplitude: RadialLaw::LogNormal {
                mu: 0.2,
                sigma: 0.6,
            },
        },
        SphericalFamily::PolarAmplitude {
            amplitude: RadialLaw::Gamma {
                shape: 2.5,
                scale: 0.4,
            },
        },
        SphericalFamily::PolarAmplitude {
            amplitude: RadialLaw::InverseGamma {
                shape: 4.0,
                scale: 3.0,
            },
        },
        SphericalFamily::PolarAmplitude {
            amplitude: RadialLaw::Nakagami {
                shape: 1.5,
                scale: 2.0,
            },
        },
        SphericalFamily::ScaleMixture {
            mixing: MixingLaw::Uniform { lo: 0.5, hi: 1.5 },
        },
        SphericalFamily::ScaleMixture {
            mixing: MixingLaw::StudentT {
                nu: 6.0,
                scale: 1.0,
            },
        },
    ]);
    f
}

fn criterion_9() -> Verdict {
    let (mut joint_err, mut pdf_err): (f64, f64) = (0.0, 0.0);
    let families = all_families();
    for fam in &families {
        let law = AmplitudeLaw::new(*fam).unwrap();
        let total = integrate_to_infinity(|x| law.pdf(x).unwrap(), 0.0, 1e-13).unwrap();
        pdf_err = pdf_err.max((total - 1.0).abs());
        let mut radius = law.mean().unwrap();
        while 1.0 - law.cdf(radius).unwrap() > 1e-10 {
            radius *= 1.5;
        }
        let inside = integrate_disc(
            |x, y| fam.density(InnovationPair::new(x, y)).unwrap(),
            radius,
            1e-10,
        )
        .unwrap();
        joint_err = joint_err.max((inside + 1.0 - law.cdf(radius).unwrap() - 1.0).abs());
    }
    let grid = uniform_grid(8193).unwrap();
    let smooth = [
        ProcessSpec::Hannan(HannanSpec::single(PI / 6.0, ar1(0.9, 1.0)).unwrap()),
        ProcessSpec::NthOrder(NthOrderSpec {
            n: 3,
            rho: 0.6,
            frequency: freq(2.0),
            sigma_kappa: 0.7,
        }),
        ProcessSpec::Linear(LinearSpec::Arma(
            ArmaSpec::new(vec![0.5, -0.3], vec![0.4], 1.1).unwrap(),
        )),
        ProcessSpec::Modulated(reference_modulated_cycle()),
        ProcessSpec::Modulated(ModulatedCycleSpec {
            a: 0.5,
            frequency: freq(1.0),
            amplitude: AmplitudeNoise::Gaussian {
                arma: ar1(0.3, 0.4),
            },
            phase: PhaseSpec::Integrated {
                arima: ArimaSpec::new(ArmaSpec::ar1(0.4, 0.5).unwrap()).unwrap(),
                initial_level: InitialLevel::UniformCycle,
            },
        }),
    ];
    let parseval = worst(
        smooth
            .iter()
            .map(|s| (s.psd(&grid).unwrap().implied_variance() / s.acf(0).unwrap() - 1.0).abs()),
    );
    (
        joint_err < 1e-6 && pdf_err < 1e-6 && parseval < 0.01,
        format!(
            "{} families: joint density |1 - mass| <= {joint_err:.1e}, amplitude pdf |1 - mass| <= {pdf_err:.1e}; \
             Parseval relative error <= {parseval:.1e} over {} spectra",
            families.len(),
            smooth.len()
        ),
    )
}

fn criterion_10() -> Verdict {
    let specs = concat!(env!("CARGO_MANIFEST_DIR"), "/specs/");
    let s = |n: &str| format!("{specs}{n}");
    let (hannan, mc, logistic, fswp) = (
        s("hannan.json"),
        s("mod_cycle.json"),
        s("logistic.json"),
        s("fswp.json"),
    );
    let dir = std::env::temp_dir().join(format!("stocycle-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("y.csv");
    let input = input.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "simulate", "--spec", &hannan, "--n", "2000", "--paths", "4", "--seed", "1",
        ],
        vec!["theo-acf", "--spec", &fswp, "--tau-max", "30"],
        vec![
            "emp-acf", "--spec", &hannan, "--n", "2000", "--paths", "8", "--seed", "2",
        ],
        vec!["psd", "--spec", &mc, "--grid", "257"],
        vec![
            "periodogram",
            "--spec",
            &hannan,
            "--n",
            "1024",
            "--paths",
            "8",
            "--seed",
            "3",
        ],
        vec![
            "icv",
            "--family",
            "kotz_type:n=3,s=0.8,r=1.2",
            "--draws",
            "50000",
            "--seed",
            "4",
        ],
        vec!["amp-pdf", "--family", "circle_mixture:m=2,mu=3,sigma=0.5"],
        vec![
            "moment", "--spec", &mc, "--lags", "0,1,1,2", "--reps", "50000", "--seed", "5",
        ],
        vec![
            "drift-scan",
            "--spec",
            &logistic,
            "--lags",
            "0,0,0,0",
            "--t-max",
            "10",
            "--reps",
            "20000",
            "--seed",
            "6",
        ],
        vec!["verify", "--reps", "10000", "--seed", "7"],
    ];
    let run = |threads: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_stocycle"))
            .args(["--threads", threads])
            .args(args)
            .env("STOCYCLE_LOG", "quiet")
            .output()
            .unwrap()
    };
    let mut mismatched = Vec::new();
    for args in &commands {
        let reference = run("1", args);
        let ok = reference.status.code() == Some(0)
            && !reference.stdout.is_empty()
            && ["2", "5"].iter().all(|t| {
                let o = run(t, args);
                o.status.code() == reference.status.code() && o.stdout == reference.stdout
            });
        if !ok {
            mismatched.push(args[0].to_string());
        }
    }
    // a written file read back gives the same bytes under any thread count
    let sim = [
        "simulate", "--spec", &logistic, "--n", "3000", "--seed", "8", "--out", input,
    ];
    let first = run("1", &sim)
        .status
        .success()
        .then(|| std::fs::read(input).unwrap());
    let second = run("4", &sim)
        .status
        .success()
        .then(|| std::fs::read(input).unwrap());
    if first.is_none() || first != second {
        mismatched.push("simulate --out".into());
    }
    let _ = std::fs::remove_dir_all(&dir);
    (
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!(
                "{} commands byte-identical under 1, 2 and 5 threads",
                commands.len() + 1
            )
        } else {
            format!("output differs for {}", mismatched.join(", "))
        },
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("ICV closed forms", criterion_1),
        ("sampler and analytic ICV agree", criterion_2),
        ("Hannan composition ACF and periodogram", criterion_3),
        ("recursion equals direct construction", criterion_4),
        ("modulated-cycle engine against Monte Carlo", criterion_5),
        ("stationarity discrimination", criterion_6),
        ("rotation representation", criterion_7),
        ("FSWP autocovariance and pseudo-cyclicality", criterion_8),
        ("normalization suite", criterion_9),
        ("CLI reproducibility", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            (false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        failed += usize::from(!ok);
        println!(
            "{} criterion {:>2} {name} ({:.1} s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
