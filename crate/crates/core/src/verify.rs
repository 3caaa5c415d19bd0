//! Closed-form engines checked against Monte Carlo. Each check simulates
//! independent paths that cover the lag pattern and compares the sample mean
//! of the product with the engine value at a fixed number of standard errors.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cycles::{
    CompanionCase, CompanionOutput, CompanionSpec, HannanComponent, HannanSpec, LayeredCycleSpec,
};
use crate::error::{ensure, Error, Result};
use crate::lab::{counterexample_moment, CounterexampleCase, CounterexampleSpec};
use crate::linear::{ArimaSpec, ArmaSpec};
use crate::modulated::{
    engine_moment, transient_moment, AmplitudeNoise, InitialLevel, ModulatedCycleSpec, PhaseSpec,
};
use crate::process::ProcessSpec;
use crate::rng::{derive_seed, replicate_fold};
use crate::stats::Estimate;
use crate::types::{Frequency, LagPattern};

/// Standard errors a Monte-Carlo estimate may sit from its engine value.
pub const VERIFY_THRESHOLD: f64 = 4.0;

/// Time origin of paths whose phase starts at zero.
const ZERO_START: i64 = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lags: Vec<i64>,
    pub t: i64,
    pub engine_value: f64,
    pub mc_value: f64,
    pub mc_se: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub replications: usize,
    pub seed: u64,
    pub threshold: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Closed-form `E prod_j y_{t+tau_j}` for `model`.
pub fn engine_product_moment(model: &ProcessSpec, lags: &LagPattern, t: i64) -> Result<f64> {
    match model {
        ProcessSpec::Modulated(s) => match s.phase {
            PhaseSpec::Integrated {
                initial_level: InitialLevel::Zero,
                ..
            } => transient_moment(s, lags, t, ZERO_START),
            _ => engine_moment(s, lags, t),
        },
        ProcessSpec::Counterexample(s) if lags.lags().iter().all(|&x| x == lags.lags()[0]) => {
            counterexample_moment(
                &s.case,
                s.frequency.value(),
                t + lags.lags()[0],
                lags.order() as u32,
            )
        }
        _ if lags.order() == 2 => model.acf(lags.max() - lags.min()),
        _ if lags.order() % 2 == 1 && gaussian_linear(model) => Ok(0.0),
        _ => Err(Error::Unsupported(format!(
            "no closed-form order-{} moment for this model",
            lags.order()
        ))),
    }
}

fn gaussian_linear(model: &ProcessSpec) -> bool {
    matches!(
        model,
        ProcessSpec::Linear(_)
            | ProcessSpec::NthOrder(_)
            | ProcessSpec::Fswp(_)
            | ProcessSpec::Layered(_)
    )
}

/// Monte-Carlo estimate of `E prod_j y_{t+tau_j}`: one path per replication
/// from `t + min(tau)`, or from the zero start for a zero-started phase.
pub fn mc_product_moment(
    model: &ProcessSpec,
    lags: &LagPattern,
    t: i64,
    replications: usize,
    seed: u64,
) -> Result<Estimate> {
    model.validate()?;
    ensure(replications >= 2, || {
        "at least two replications are needed".into()
    })?;
    let zero_start = matches!(
        model,
        ProcessSpec::Modulated(ModulatedCycleSpec {
            phase: PhaseSpec::Integrated {
                initial_level: InitialLevel::Zero,
                ..
            },
            ..
        })
    );
    let t0 = if zero_start {
        ZERO_START
    } else {
        t + lags.min()
    };
    ensure(t + lags.min() >= t0, || {
        "observation times must not precede the start".into()
    })?;
    let n = (t + lags.max() - t0) as usize + 1;
    let idx: Vec<usize> = lags.lags().iter().map(|&x| (t + x - t0) as usize).collect();
    // Welford accumulation in replication order
    let (k, mean, m2, err) = replicate_fold(
        seed,
        replications,
        8192,
        (0.0f64, 0.0f64, 0.0f64, None::<Error>),
        |rng, _| {
            model
                .simulate_with(rng, n, t0)
                .map(|y| idx.iter().map(|&i| y[i]).product::<f64>())
        },
        |(k, mean, m2, e), r| match r {
            Ok(x) => {
                let k = k + 1.0;
                let d = x - mean;
                let mean = mean + d / k;
                (k, mean, m2 + d * (x - mean), e)
            }
            Err(err) => (k, mean, m2, e.or(Some(err))),
        },
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(Estimate {
        mean,
        se: (m2 / (k - 1.0) / k).sqrt(),
    })
}

/// One engine-versus-Monte-Carlo comparison.
pub fn check(
    name: &str,
    model: &ProcessSpec,
    lags: &[i64],
    t: i64,
    replications: usize,
    seed: u64,
) -> Result<Check> {
    let pattern = LagPattern::new(lags.to_vec())?;
    let engine_value = engine_product_moment(model, &pattern, t)?;
    let est = mc_product_moment(model, &pattern, t, replications, seed)?;
    let z = est.z_score(engine_value);
    Ok(Check {
        name: name.to_string(),
        lags: lags.to_vec(),
        t,
        engine_value,
        mc_value: est.mean,
        mc_se: est.se,
        z,
        pass: (z.is_finite() && z < VERIFY_THRESHOLD)
            || (est.se == 0.0 && est.mean == engine_value),
    })
}

struct Case {
    name: &'static str,
    model: ProcessSpec,
    patterns: Vec<(Vec<i64>, i64)>,
}

fn freq(l: f64) -> Frequency {
    Frequency::new(l).expect("built-in frequency is valid")
}

fn ar1(rho: f64, sigma: f64) -> ArmaSpec {
    ArmaSpec::ar1(rho, sigma).expect("built-in AR(1) is valid")
}

/// The modulated cycle with AR(1) amplitude noise and a random-walk phase
/// started at a uniform level.
pub fn reference_modulated_cycle() -> ModulatedCycleSpec {
    ModulatedCycleSpec {
        a: 1.0,
        frequency: freq(PI / 6.0),
        amplitude: AmplitudeNoise::Gaussian {
            arma: ar1(0.5, 0.3),
        },
        phase: PhaseSpec::Integrated {
            arima: ArimaSpec::random_walk(0.2).expect("built-in random walk is valid"),
            initial_level: InitialLevel::UniformCycle,
        },
    }
}

/// Second-order lags `(0, tau)` for `tau <= 10` and two fourth-order patterns.
pub fn default_patterns() -> Vec<Vec<i64>> {
    let mut p: Vec<Vec<i64>> = (0..=10).map(|tau| vec![0, tau]).collect();
    p.push(vec![0, 0, 0, 0]);
    p.push(vec![0, 1, 1, 2]);
    p
}

fn builtin_cases() -> Vec<Case> {
    let at0 = |ps: Vec<Vec<i64>>| ps.into_iter().map(|l| (l, 0)).collect::<Vec<_>>();
    let arima_phase = ModulatedCycleSpec {
        a: 0.8,
        frequency: freq(0.9),
        amplitude: AmplitudeNoise::Gaussian {
            arma: ar1(0.4, 0.5),
        },
        phase: PhaseSpec::Integrated {
            arima: ArimaSpec::new(ArmaSpec::new(vec![0.5], vec![0.3], 0.3).expect("valid ARMA"))
                .expect("valid ARIMA"),
            initial_level: InitialLevel::UniformCycle,
        },
    };
    let stationary_phase = ModulatedCycleSpec {
        a: 1.0,
        frequency: freq(PI / 5.0),
        amplitude: AmplitudeNoise::Zero,
        phase: PhaseSpec::Stationary {
            arma: ar1(0.5, 0.5),
        },
    };
    let mut zero_start = reference_modulated_cycle();
    zero_start.phase = PhaseSpec::Integrated {
        arima: ArimaSpec::random_walk(0.3).expect("valid random walk"),
        initial_level: InitialLevel::Zero,
    };
    let hannan = HannanSpec {
        components: vec![
            HannanComponent {
                frequency: freq(PI / 6.0),
                arma: ar1(0.9, 1.0),
                innovation: None,
            },
            HannanComponent {
                frequency: freq(PI / 2.0),
                arma: ar1(0.5, 1.0),
                innovation: None,
            },
        ],
    };
    let twin = CompanionSpec {
        rho: 0.7,
        sigma: 1.0,
        frequency: freq(0.5),
        companion: CompanionCase::IndependentTwin,
        output: CompanionOutput::Alpha,
    };
    let layered = LayeredCycleSpec {
        outer_frequency: freq(0.9),
        inner_frequency: freq(0.4),
        arma: ar1(0.6, 1.0),
    };
    let irwin_hall = CounterexampleSpec {
        case: CounterexampleCase::IrwinHall { a: 1.0, n: 1 },
        frequency: freq(0.5),
    };
    vec![
        Case {
            name: "modulated random-walk phase",
            model: ProcessSpec::Modulated(reference_modulated_cycle()),
            patterns: at0(default_patterns()),
        },
        Case {
            name: "modulated ARIMA phase",
            model: ProcessSpec::Modulated(arima_phase),
            patterns: at0(vec![vec![0, 3], vec![-2, 1], vec![0, 0, 1, 1]]),
        },
        Case {
            name: "modulated stationary phase",
            model: ProcessSpec::Modulated(stationary_phase),
            patterns: vec![
                (vec![0], 1),
                (vec![0], 3),
                (vec![0, 1], 2),
                (vec![0, 0, 0], 4),
            ],
        },
        Case {
            name: "modulated zero-start phase",
            model: ProcessSpec::Modulated(zero_start),
            patterns: vec![(vec![0, 1], 0), (vec![0, 1], 3), (vec![0, 0], 10)],
        },
        Case {
            name: "hannan",
            model: ProcessSpec::Hannan(hannan),
            patterns: at0(vec![vec![0, 0], vec![0, 1], vec![0, 6]]),
        },
        Case {
            name: "companion twin alpha",
            model: ProcessSpec::Companion(twin),
            patterns: at0(vec![vec![0, 0], vec![0, 2]]),
        },
        Case {
            name: "layered cycle",
            model: ProcessSpec::Layered(layered),
            patterns: at0(vec![vec![0, 0], vec![0, 3]]),
        },
        Case {
            name: "irwin-hall counterexample",
            model: ProcessSpec::Counterexample(irwin_hall),
            patterns: vec![(vec![0; 4], 0), (vec![0; 4], 1), (vec![0; 4], 2)],
        },
    ]
}

fn run(cases: &[Case], replications: usize, seed: u64) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    for case in cases {
        for (lags, t) in &case.patterns {
            let s = derive_seed(seed, checks.len() as u64);
            checks.push(check(case.name, &case.model, lags, *t, replications, s)?);
        }
    }
    let passed = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        replications,
        seed,
        threshold: VERIFY_THRESHOLD,
        checks,
        passed,
    })
}

/// The built-in suite over every model family with a closed-form moment.
pub fn builtin_suite(replications: usize, seed: u64) -> Result<VerifyReport> {
    run(&builtin_cases(), replications, seed)
}

/// Second-order lags up to 10 and, where the model has a fourth-order
/// engine, the two fourth-order patterns, all at `t = 0`.
pub fn model_suite(model: &ProcessSpec, replications: usize, seed: u64) -> Result<VerifyReport> {
    model.validate()?;
    let mut patterns = Vec::new();
    for l in default_patterns() {
        let pattern = LagPattern::new(l.clone())?;
        match engine_product_moment(model, &pattern, 0) {
            Ok(_) => patterns.push((l, 0)),
            Err(Error::Unsupported(_)) if l.len() == 4 => {}
            Err(e) => return Err(e),
        }
    }
    run(
        &[Case {
            name: "model",
            model: model.clone(),
            patterns,
        }],
        replications,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_patterns_all_have_engines() {
        for case in builtin_cases() {
            for (l, t) in &case.patterns {
                let v =
                    engine_product_moment(&case.model, &LagPattern::new(l.clone()).unwrap(), *t);
                assert!(v.is_ok(), "{}: {l:?} {v:?}", case.name);
            }
        }
    }

    #[test]
    fn white_noise_suite_passes_and_skips_fourth_order() {
        let wn = ProcessSpec::Linear(crate::linear::LinearSpec::Arma(
            ArmaSpec::white_noise(1.0).unwrap(),
        ));
        let r = model_suite(&wn, 20_000, 3).unwrap();
        assert_eq!(r.checks.len(), 11);
        assert!(r.passed, "{r:?}");
    }
}
