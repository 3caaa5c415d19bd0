//! Stationarity experiments: Monte-Carlo moment-drift scans over time,
//! closed-form moments of carrier processes with independent non-Gaussian
//! coordinates, and the strongly pseudo-cyclical autocovariance check.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::innovations::MixingLaw;
use crate::linear::{frac_acf, FracDiffSpec};
use crate::process::ProcessSpec;
use crate::rng::{replicate_fold, SimRng};
use crate::stats::Estimate;
use crate::types::{Frequency, LagPattern};

/// Drift statistics at or above this many pooled standard errors are
/// reported as drifting.
pub const DRIFT_THRESHOLD: f64 = 4.0;
/// Minimum replications for a drift scan.
pub const MIN_REPLICATIONS: usize = 100;
/// Largest product order a drift scan accepts.
pub const MAX_SCAN_ORDER: usize = 8;
const SCAN_CHUNK: usize = 8192;
const MONOTONE_SLACK: f64 = 1e-12;

/// Zero-mean law of the independent coordinates `alpha_t`, `beta_t` of
/// `y_t = alpha_t cos(lambda t) + beta_t sin(lambda t)`, i.i.d. over `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum CounterexampleCase {
    /// Unit variance and skewness `zeta`: a standardized gamma variable with
    /// shape `4 / zeta^2`, reflected when `zeta < 0`.
    Skewed { zeta: f64 },
    /// Logistic with scale `nu` (variance `pi^2 nu^2 / 3`).
    Logistic { nu: f64 },
    /// Sum of `n` independent uniforms on `(-a, a)`.
    IrwinHall { a: f64, n: u32 },
    /// `R N` with `N` standard normal and `R` drawn from `mixing`.
    ScaleMixture { mixing: MixingLaw },
}

impl CounterexampleCase {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CounterexampleCase::Skewed { zeta } => ensure(zeta.is_finite() && zeta != 0.0, || {
                format!("skewness must be non-zero, got {zeta}")
            }),
            CounterexampleCase::Logistic { nu } => ensure(nu.is_finite() && nu > 0.0, || {
                format!("logistic scale must be positive, got {nu}")
            }),
            CounterexampleCase::IrwinHall { a, n } => {
                ensure(a.is_finite() && a > 0.0, || {
                    format!("Irwin-Hall half-width must be positive, got {a}")
                })?;
                ensure(n >= 1, || "Irwin-Hall needs n >= 1".into())
            }
            CounterexampleCase::ScaleMixture { mixing } => {
                mixing.validate()?;
                ensure(mixing.moment(4).is_finite(), || {
                    "scale mixture needs E R^4 < inf".into()
                })
            }
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            CounterexampleCase::Skewed { .. } => 1.0,
            CounterexampleCase::Logistic { nu } => PI * PI * nu * nu / 3.0,
            CounterexampleCase::IrwinHall { a, n } => n as f64 * a * a / 3.0,
            CounterexampleCase::ScaleMixture { mixing } => mixing.moment(2),
        }
    }

    /// `(E x^3, E x^4)` of one coordinate.
    fn third_fourth(&self) -> (f64, f64) {
        match *self {
            CounterexampleCase::Skewed { zeta } => (zeta, 3.0 + 1.5 * zeta * zeta),
            CounterexampleCase::Logistic { nu } => (0.0, 7.0 * PI.powi(4) * nu.powi(4) / 15.0),
            CounterexampleCase::IrwinHall { a, n } => {
                let n = n as f64;
                (0.0, a.powi(4) * (n / 5.0 + n * (n - 1.0) / 3.0))
            }
            CounterexampleCase::ScaleMixture { mixing } => (0.0, 3.0 * mixing.moment(4)),
        }
    }

    pub fn sample_coordinate(&self, rng: &mut SimRng) -> f64 {
        match *self {
            CounterexampleCase::Skewed { zeta } => {
                let k = 4.0 / (zeta * zeta);
                let g = Gamma::new(k, 1.0).expect("validated shape").sample(rng);
                zeta.signum() * (g - k) / k.sqrt()
            }
            CounterexampleCase::Logistic { nu } => {
                let u: f64 = rng.random();
                // u = 0 has probability 2^-53; map it inside the support
                let u = u.max(f64::MIN_POSITIVE);
                nu * (u / (1.0 - u)).ln()
            }
            CounterexampleCase::IrwinHall { a, n } => {
                (0..n).map(|_| a * (2.0 * rng.random::<f64>() - 1.0)).sum()
            }
            CounterexampleCase::ScaleMixture { mixing } => {
                let r = mixing.sample(rng);
                r * rng.sample::<f64, _>(StandardNormal)
            }
        }
    }
}

/// Carrier process with i.i.d. counterexample coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleSpec {
    pub case: CounterexampleCase,
    pub frequency: Frequency,
}

impl CounterexampleSpec {
    pub fn validate(&self) -> Result<()> {
        self.case.validate()
    }

    pub fn simulate_with(&self, rng: &mut SimRng, n: usize, t0: i64) -> Result<Vec<f64>> {
        self.validate()?;
        let lam = self.frequency.value();
        Ok((0..n)
            .map(|k| {
                let alpha = self.case.sample_coordinate(rng);
                let beta = self.case.sample_coordinate(rng);
                let (s, c) = (lam * (t0 + k as i64) as f64).sin_cos();
                alpha * c + beta * s
            })
            .collect())
    }

    /// White-noise autocovariance: independence across `t` and
    /// `cos^2 + sin^2 = 1`.
    pub fn acf(&self, tau: i64) -> Result<f64> {
        self.validate()?;
        Ok(if tau == 0 { self.case.variance() } else { 0.0 })
    }
}

/// `E y_t^order` of the counterexample carrier process. Supported pairs:
/// order 2 for every case, order 3 for `Skewed`, order 4 for the others.
pub fn counterexample_moment(
    case: &CounterexampleCase,
    lambda: f64,
    t: i64,
    order: u32,
) -> Result<f64> {
    case.validate()?;
    let (s, c) = (lambda * t as f64).sin_cos();
    match (case, order) {
        (_, 2) => Ok(case.variance()),
        (CounterexampleCase::Skewed { zeta }, 3) => Ok(zeta * (s.powi(3) + c.powi(3))),
        (CounterexampleCase::Logistic { nu }, 4) => {
            Ok(PI.powi(4) * nu.powi(4) * ((4.0 * lambda * t as f64).cos() + 13.0) / 30.0)
        }
        (CounterexampleCase::IrwinHall { a, n }, 4) => {
            let n = *n as f64;
            Ok(a.powi(4) * n * (10.0 * n - (4.0 * lambda * t as f64).cos() - 3.0) / 30.0)
        }
        (CounterexampleCase::ScaleMixture { mixing }, 4) => {
            // 3 E R^4 - 3 E[(R1^2 - R2^2)^2] cos^2 sin^2
            let (m2, m4) = (mixing.moment(2), mixing.moment(4));
            let spread = 2.0 * (m4 - m2 * m2);
            Ok(3.0 * m4 - 3.0 * spread * c * c * s * s)
        }
        _ => Err(Error::Unsupported(format!(
            "no closed-form moment of order {order} for {case:?}"
        ))),
    }
}

/// `E y_t^4` for any case from the coordinate moments, used as a
/// cross-check of the case-specific displays.
pub fn fourth_moment_from_coordinates(
    case: &CounterexampleCase,
    lambda: f64,
    t: i64,
) -> Result<f64> {
    case.validate()?;
    let (s, c) = (lambda * t as f64).sin_cos();
    let v = case.variance();
    let (_, m4) = case.third_fourth();
    Ok(m4 * (c.powi(4) + s.powi(4)) + 6.0 * c * c * s * s * v * v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftVerdict {
    StationaryConsistent,
    Drifting,
}

/// Per-time Monte-Carlo estimates of `E prod_j y_{t + tau_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftScan {
    pub model: ProcessSpec,
    pub lags: LagPattern,
    pub t_grid: Vec<i64>,
    pub replications: usize,
    pub seed: u64,
    pub estimates: Vec<Estimate>,
    /// Mean over the grid of the per-time estimates, with the root mean
    /// square of their standard errors.
    pub pooled: Estimate,
    pub drift_statistic: f64,
    pub threshold: f64,
    pub verdict: DriftVerdict,
    pub note: String,
}

/// Simulates one path per replication over `[min t + min tau, max t + max tau]`
/// and estimates the product moment at every grid time from the same paths.
pub fn moment_drift_scan(
    model: &ProcessSpec,
    lags: &LagPattern,
    t_grid: &[i64],
    replications: usize,
    seed: u64,
) -> Result<DriftScan> {
    model.validate()?;
    ensure(!t_grid.is_empty(), || "time grid is empty".into())?;
    if lags.order() > MAX_SCAN_ORDER {
        return Err(Error::SizeLimit {
            what: "drift-scan order",
            got: lags.order(),
            max: MAX_SCAN_ORDER,
        });
    }
    ensure(replications >= MIN_REPLICATIONS, || {
        format!("drift scan needs at least {MIN_REPLICATIONS} replications, got {replications}")
    })?;
    let t_min = *t_grid.iter().min().expect("non-empty");
    let t_max = *t_grid.iter().max().expect("non-empty");
    let start = t_min + lags.min();
    let len = (t_max + lags.max() - start + 1) as usize;
    let k = t_grid.len();
    let tau = lags.lags().to_vec();

    let init: Result<(Vec<f64>, Vec<f64>)> = Ok((vec![0.0; k], vec![0.0; k]));
    let sums = replicate_fold(
        seed,
        replications,
        SCAN_CHUNK,
        init,
        |rng, _| -> Result<Vec<f64>> {
            let y = model.simulate_with(rng, len, start)?;
            Ok(t_grid
                .iter()
                .map(|&t| tau.iter().map(|&d| y[(t + d - start) as usize]).product())
                .collect())
        },
        |acc, row| {
            let (mut s1, mut s2) = acc?;
            for (i, x) in row?.into_iter().enumerate() {
                s1[i] += x;
                s2[i] += x * x;
            }
            Ok((s1, s2))
        },
    );
    let (s1, s2) = sums?;
    let r = replications as f64;
    let estimates: Vec<Estimate> = s1
        .iter()
        .zip(&s2)
        .map(|(a, b)| {
            let m = a / r;
            let var = ((b / r - m * m) * r / (r - 1.0)).max(0.0);
            Estimate {
                mean: m,
                se: (var / r).sqrt(),
            }
        })
        .collect();
    let pooled_mean = estimates.iter().map(|e| e.mean).sum::<f64>() / k as f64;
    let pooled_se = (estimates.iter().map(|e| e.se * e.se).sum::<f64>() / k as f64).sqrt();
    let drift_statistic = estimates
        .iter()
        .map(|e| {
            let d = (e.mean - pooled_mean).abs();
            if pooled_se > 0.0 {
                d / pooled_se
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    let verdict = if drift_statistic < DRIFT_THRESHOLD {
        DriftVerdict::StationaryConsistent
    } else {
        DriftVerdict::Drifting
    };
    // two-sided normal tail beyond 4 SE
    let per_point = 6.334e-5;
    let note = format!(
        "maximum over {k} grid times at {DRIFT_THRESHOLD} pooled SE; a Bonferroni bound puts the \
         false-drift rate for a stationary model near {:.2e}. Estimates at different times share \
         replications and are correlated.",
        (per_point * k as f64).min(1.0)
    );
    Ok(DriftScan {
        model: model.clone(),
        lags: lags.clone(),
        t_grid: t_grid.to_vec(),
        replications,
        seed,
        estimates,
        pooled: Estimate {
            mean: pooled_mean,
            se: pooled_se,
        },
        drift_statistic,
        threshold: DRIFT_THRESHOLD,
        verdict,
        note,
    })
}

/// Cosine and sine coefficient sequences `a_tau`, `b_tau`, `tau = 0..=tau_max`,
/// of one frequency in a pseudo-cyclical autocovariance. An empty `b` means
/// all zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequences {
    pub frequency: f64,
    pub a: Vec<f64>,
    #[serde(default)]
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceVerdict {
    /// Largest absolute value over the last decile of lags.
    pub tail_max: f64,
    pub vanishes: bool,
    /// First lag after which the absolute values never increase (within
    /// `1e-12`).
    pub tau0: usize,
    pub eventually_monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoCyclicalReport {
    pub holds: bool,
    /// `[a, b]` verdicts per frequency.
    pub sequences: Vec<[SequenceVerdict; 2]>,
}

fn sequence_verdict(x: &[f64], tolerance: f64) -> SequenceVerdict {
    let tau_max = x.len() - 1;
    let from = (0.9 * tau_max as f64).floor() as usize;
    let tail_max = x[from..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut tau0 = tau_max;
    while tau0 > 0 && x[tau0].abs() <= x[tau0 - 1].abs() + MONOTONE_SLACK {
        tau0 -= 1;
    }
    SequenceVerdict {
        tail_max,
        vanishes: tail_max < tolerance,
        tau0,
        eventually_monotone: tau0 <= tau_max / 2,
    }
}

/// Checks that every coefficient sequence tends to zero (last-decile
/// magnitude below `tolerance`) and is non-increasing in absolute value
/// from some lag `tau0 <= tau_max / 2` on.
pub fn pseudocyclical_check(
    sequences: &[CoefficientSequences],
    tolerance: f64,
) -> Result<PseudoCyclicalReport> {
    ensure(!sequences.is_empty(), || {
        "no coefficient sequences given".into()
    })?;
    ensure(tolerance > 0.0, || {
        format!("tolerance must be positive, got {tolerance}")
    })?;
    let mut out = Vec::with_capacity(sequences.len());
    for s in sequences {
        ensure(s.a.len() >= 11, || {
            format!("need tau_max >= 10, got {}", s.a.len() as i64 - 1)
        })?;
        ensure(s.b.is_empty() || s.b.len() == s.a.len(), || {
            format!(
                "sine sequence length {} differs from cosine length {}",
                s.b.len(),
                s.a.len()
            )
        })?;
        ensure(s.a.iter().chain(&s.b).all(|v| v.is_finite()), || {
            "coefficients must be finite".into()
        })?;
        let zeros;
        let b = if s.b.is_empty() {
            zeros = vec![0.0; s.a.len()];
            &zeros
        } else {
            &s.b
        };
        out.push([
            sequence_verdict(&s.a, tolerance),
            sequence_verdict(b, tolerance),
        ]);
    }
    let holds = out
        .iter()
        .flatten()
        .all(|v| v.vanishes && v.eventually_monotone);
    Ok(PseudoCyclicalReport {
        holds,
        sequences: out,
    })
}

/// Coefficients of the fractional sinusoidal waveform autocovariance
/// `gamma_d(tau) cos(lambda tau)`: `a_tau = gamma_d(tau)`, `b_tau = 0`.
pub fn fswp_coefficients(
    d: f64,
    sigma: f64,
    lambda: f64,
    tau_max: usize,
) -> Result<CoefficientSequences> {
    let spec = FracDiffSpec::new(d, sigma)?;
    Ok(CoefficientSequences {
        frequency: lambda,
        a: (0..=tau_max as i64).map(|t| frac_acf(&spec, t)).collect(),
        b: Vec::new(),
    })
}

/// One frequency of a decomposed autocovariance, with cosine coefficient
/// `weight * rho^|tau| sigma^2 / (1 - rho^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoFrequencyTerm {
    pub frequency: f64,
    pub weight: f64,
}

/// The two-layer cycle (outer `w1`, inner `w2`, AR(1) coordinates) written
/// as `sum_j a_{j,tau} cos(lambda_j tau)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoFrequencyDecomposition {
    pub rho: f64,
    pub sigma: f64,
    pub terms: Vec<TwoFrequencyTerm>,
}

/// `cos(w2 tau) cos(w1 tau) = (cos((w1+w2) tau) + cos((w1-w2) tau)) / 2`.
/// The sum frequency is folded into `(0, pi]` by `w -> 2 pi - w`, which
/// leaves every `cos(w tau)` unchanged, so its weight stays `+1/2`.
pub fn two_frequency_decomposition(
    w1: f64,
    w2: f64,
    rho: f64,
    sigma: f64,
) -> Result<TwoFrequencyDecomposition> {
    Frequency::new(w1)?;
    Frequency::new(w2)?;
    ensure(rho.abs() < 1.0, || {
        format!("|rho| must be below 1, got {rho}")
    })?;
    ensure(sigma > 0.0 && sigma.is_finite(), || {
        format!("sigma must be positive, got {sigma}")
    })?;
    if w1 == w2 {
        return Err(Error::Unsupported(
            "equal layer frequencies put half the variance at frequency 0".into(),
        ));
    }
    let sum = w1 + w2;
    let l1 = if sum <= PI { sum } else { 2.0 * PI - sum };
    let l2 = (w1 - w2).abs();
    let terms = if (l1 - l2).abs() < 1e-15 {
        vec![TwoFrequencyTerm {
            frequency: l1,
            weight: 1.0,
        }]
    } else {
        let mut t = vec![
            TwoFrequencyTerm {
                frequency: l1,
                weight: 0.5,
            },
            TwoFrequencyTerm {
                frequency: l2,
                weight: 0.5,
            },
        ];
        t.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        t
    };
    Ok(TwoFrequencyDecomposition { rho, sigma, terms })
}

impl TwoFrequencyDecomposition {
    fn envelope(&self, tau: i64) -> f64 {
        self.rho.powi(tau.unsigned_abs() as i32) * self.sigma * self.sigma
            / (1.0 - self.rho * self.rho)
    }

    pub fn acf(&self, tau: i64) -> f64 {
        let g = self.envelope(tau);
        self.terms
            .iter()
            .map(|t| t.weight * g * (t.frequency * tau as f64).cos())
            .sum()
    }

    pub fn sequences(&self, tau_max: usize) -> Vec<CoefficientSequences> {
        self.terms
            .iter()
            .map(|t| CoefficientSequences {
                frequency: t.frequency,
                a: (0..=tau_max as i64)
                    .map(|k| t.weight * self.envelope(k))
                    .collect(),
                b: Vec::new(),
            })
            .collect()
    }
}
