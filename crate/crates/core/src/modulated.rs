//! The modulated cycle `y_t = (a + A_t) sin[lambda (t + P_t)]` with Gaussian
//! amplitude noise `A` and Gaussian phase noise `P`, independent of each other.
//!
//! The moment engine evaluates
//! `E prod_j y_{t+tau_j} = (-1)^{floor(s/2)} / 2^s * a_tau *
//!  sum_e exp(-Var(lambda sum_j e_j P_{t+tau_j}) / 2) f(lambda sum_j e_j (t+tau_j)) prod_j e_j`
//! with `f = sin` for odd `s` and `cos` for even `s`. For an integrated phase
//! only zero-sum sign vectors survive.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::linear::{
    arma_acf_sequence, lincomb_variance, simulate_integrated_with, simulate_linear_with, ArimaSpec,
    ArmaSpec, LinearSpec,
};
use crate::rng::{replicate, SimRng};
use crate::stats::{mean_se, Estimate};
use crate::types::{enumerate_sign_vectors, Frequency, LagPattern, SignVector, MAX_ORDER};

/// Zero-mean stationary amplitude disturbance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AmplitudeNoise {
    /// `A_t = 0`.
    Zero,
    /// Gaussian ARMA.
    Gaussian { arma: ArmaSpec },
}

/// Starting level of an integrated phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialLevel {
    /// `lambda P_{t0} ~ U(0, 2 pi)` independent of everything else, which
    /// makes `y` exactly stationary from the first observation.
    #[default]
    UniformCycle,
    /// `P_{t0} = 0`; moments involving non-zero-sum sign vectors then decay
    /// only gradually in `t - t0`.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhaseSpec {
    /// Stationary Gaussian ARMA phase.
    Stationary { arma: ArmaSpec },
    /// ARIMA(p,1,q) Gaussian phase.
    Integrated {
        arima: ArimaSpec,
        #[serde(default)]
        initial_level: InitialLevel,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulatedCycleSpec {
    pub a: f64,
    pub frequency: Frequency,
    pub amplitude: AmplitudeNoise,
    pub phase: PhaseSpec,
}

/// Engine moment next to its Monte-Carlo estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub lags: Vec<i64>,
    pub order: usize,
    pub engine_value: f64,
    pub mc_value: f64,
    pub mc_se: f64,
}

impl MomentReport {
    pub fn z_score(&self) -> f64 {
        Estimate {
            mean: self.mc_value,
            se: self.mc_se,
        }
        .z_score(self.engine_value)
    }
}

/// Equal-lag moments from the engine, beside the amplitude moments
/// `E (a + A)^{2k}` that a direct reading of `E y^{2k} = E (a + A)^{2k}` would give.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvenMoments {
    pub second: f64,
    pub fourth: f64,
    pub kurtosis: f64,
    pub amplitude_second: f64,
    pub amplitude_fourth: f64,
    pub amplitude_kurtosis: f64,
}

impl ModulatedCycleSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(self.a.is_finite(), || {
            format!("a must be finite, got {}", self.a)
        })?;
        if let AmplitudeNoise::Gaussian { arma } = &self.amplitude {
            arma.validate()?;
        }
        match &self.phase {
            PhaseSpec::Stationary { arma } => arma.validate(),
            PhaseSpec::Integrated { arima, .. } => arima.validate(),
        }
    }

    fn amplitude_acf(&self, max_lag: usize) -> Result<Vec<f64>> {
        match &self.amplitude {
            AmplitudeNoise::Zero => Ok(vec![0.0; max_lag + 1]),
            AmplitudeNoise::Gaussian { arma } => arma_acf_sequence(arma, max_lag),
        }
    }

    /// `a_tau = E prod_j (a + A_{t+tau_j})`.
    pub fn amplitude_product_moment(&self, lags: &[i64]) -> Result<f64> {
        let span = span(lags);
        let g = self.amplitude_acf(span)?;
        let s = lags.len();
        let cov = |i: usize, j: usize| g[lags[i].abs_diff(lags[j]) as usize];
        Ok(gaussian_product_moment(self.a, s, &cov))
    }

    /// Simulates `y_{t0}, ..., y_{t0+n-1}`. Draw order: amplitude, phase,
    /// then the uniform phase level.
    pub fn simulate_with(&self, rng: &mut SimRng, n: usize, t0: i64) -> Result<Vec<f64>> {
        self.validate()?;
        let amp = match &self.amplitude {
            AmplitudeNoise::Zero => vec![0.0; n],
            AmplitudeNoise::Gaussian { arma } => {
                simulate_linear_with(&LinearSpec::Arma(arma.clone()), rng, n)?
            }
        };
        let lam = self.frequency.value();
        let phase = match &self.phase {
            PhaseSpec::Stationary { arma } => {
                simulate_linear_with(&LinearSpec::Arma(arma.clone()), rng, n)?
            }
            PhaseSpec::Integrated {
                arima,
                initial_level,
            } => {
                let mut p = simulate_integrated_with(arima, rng, n, 0.0)?;
                if *initial_level == InitialLevel::UniformCycle {
                    let level = 2.0 * PI * rng.random::<f64>() / lam;
                    p.iter_mut().for_each(|v| *v += level);
                }
                p
            }
        };
        Ok((0..n)
            .map(|k| {
                let t = (t0 + k as i64) as f64;
                (self.a + amp[k]) * (lam * (t + phase[k])).sin()
            })
            .collect())
    }
}

fn span(lags: &[i64]) -> usize {
    let lo = lags.iter().min().copied().unwrap_or(0);
    let hi = lags.iter().max().copied().unwrap_or(0);
    (hi - lo) as usize
}

/// `E prod_{j<s} (a + X_j)` for a zero-mean Gaussian vector with covariance
/// `cov(i, j)`, by the recursion
/// `f(M) = a f(M - j) + sum_{k in M - j} cov(j, k) f(M - j - k)`, `j = min M`.
pub fn gaussian_product_moment(a: f64, s: usize, cov: &dyn Fn(usize, usize) -> f64) -> f64 {
    let full = (1usize << s) - 1;
    let mut f = vec![0.0; full + 1];
    f[0] = 1.0;
    for mask in 1..=full {
        let j = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << j);
        let mut v = a * f[rest];
        let mut r = rest;
        while r != 0 {
            let k = r.trailing_zeros() as usize;
            v += cov(j, k) * f[rest & !(1 << k)];
            r &= r - 1;
        }
        f[mask] = v;
    }
    f[full]
}

fn check_order(s: usize) -> Result<()> {
    if s == 0 {
        return Err(Error::Domain("moment order must be at least 1".into()));
    }
    if s > MAX_ORDER {
        return Err(Error::SizeLimit {
            what: "moment order",
            got: s,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

/// The common sign-vector sum. `var(e)` is `Var(lambda sum e_j P_j)` and
/// `angle(e)` the argument of `f`.
fn sign_sum(
    s: usize,
    vectors: &[SignVector],
    var: &dyn Fn(&SignVector) -> Result<f64>,
    angle: &dyn Fn(&SignVector) -> f64,
) -> Result<f64> {
    let odd = s % 2 == 1;
    let mut acc = 0.0;
    for e in vectors {
        let v = var(e)?;
        if v.is_infinite() {
            continue;
        }
        let x = angle(e);
        let f = if odd { x.sin() } else { x.cos() };
        acc += (-0.5 * v).exp() * f * e.product();
    }
    let sign = if (s / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * acc / 2f64.powi(s as i32))
}

/// Product moment for a stationary Gaussian phase at time `t`.
pub fn apc_moment(spec: &ModulatedCycleSpec, lags: &LagPattern, t: i64) -> Result<f64> {
    spec.validate()?;
    let arma = match &spec.phase {
        PhaseSpec::Stationary { arma } => arma,
        PhaseSpec::Integrated { .. } => return Err(Error::Unsupported(
            "apc_moment needs a stationary phase; use stationary_moment for an integrated phase"
                .into(),
        )),
    };
    let tau = lags.lags();
    let s = tau.len();
    check_order(s)?;
    let gp = arma_acf_sequence(arma, span(tau))?;
    let times: Vec<f64> = tau.iter().map(|&x| (t + x) as f64).collect();
    moment_with_phase_cov(spec, tau, &times, &|i, j| {
        gp[tau[i].abs_diff(tau[j]) as usize]
    })
}

/// General sum over all sign vectors with an explicit phase covariance.
fn moment_with_phase_cov(
    spec: &ModulatedCycleSpec,
    tau: &[i64],
    times: &[f64],
    cov: &dyn Fn(usize, usize) -> f64,
) -> Result<f64> {
    let s = tau.len();
    let lam = spec.frequency.value();
    let a_tau = spec.amplitude_product_moment(tau)?;
    let vectors = enumerate_sign_vectors(s, false)?;
    let c: Vec<Vec<f64>> = (0..s)
        .map(|i| (0..s).map(|j| cov(i, j)).collect())
        .collect();
    let var = |e: &SignVector| -> Result<f64> {
        let es = e.signs();
        let mut v = 0.0;
        for i in 0..s {
            for j in 0..s {
                v += (es[i] * es[j]) as f64 * c[i][j];
            }
        }
        Ok(lam * lam * v.max(0.0))
    };
    let angle = |e: &SignVector| lam * e.dot(times);
    Ok(a_tau * sign_sum(s, &vectors, &var, &angle)?)
}

/// Exact moment of the integrated-phase model started at `P_{t0} = 0`,
/// observed at times `t + tau_j >= t0`. Shows the transient that the
/// uniform starting level removes.
pub fn transient_moment(
    spec: &ModulatedCycleSpec,
    lags: &LagPattern,
    t: i64,
    t0: i64,
) -> Result<f64> {
    spec.validate()?;
    let arima = match &spec.phase {
        PhaseSpec::Integrated { arima, .. } => arima,
        PhaseSpec::Stationary { .. } => {
            return Err(Error::Unsupported(
                "transient_moment needs an integrated phase".into(),
            ))
        }
    };
    let tau = lags.lags();
    check_order(tau.len())?;
    ensure(t + lags.min() >= t0, || {
        "observation times must not precede the start".into()
    })?;
    let steps: Vec<usize> = tau.iter().map(|&x| (t + x - t0) as usize).collect();
    let horizon = steps.iter().copied().max().unwrap_or(0);
    let g = arma_acf_sequence(&arima.base, horizon)?;
    // Cov(P_u, P_v) = sum_{i<=u, k<=v} gamma_w(i - k), i, k >= 1
    let cov_p = |u: usize, v: usize| -> f64 {
        let mut c = 0.0;
        for i in 1..=u {
            for k in 1..=v {
                c += g[i.abs_diff(k)];
            }
        }
        c
    };
    let times: Vec<f64> = tau.iter().map(|&x| (t + x) as f64).collect();
    moment_with_phase_cov(spec, tau, &times, &|i, j| cov_p(steps[i], steps[j]))
}

/// Product moment for an integrated phase; independent of `t`.
pub fn stationary_moment(spec: &ModulatedCycleSpec, lags: &LagPattern) -> Result<f64> {
    spec.validate()?;
    let arima = match &spec.phase {
        PhaseSpec::Integrated { arima, .. } => arima,
        PhaseSpec::Stationary { .. } => return Err(Error::Unsupported(
            "stationary_moment needs an integrated phase; use apc_moment for a stationary phase"
                .into(),
        )),
    };
    let tau = lags.lags();
    let s = tau.len();
    check_order(s)?;
    if s % 2 == 1 {
        return Ok(0.0);
    }
    let lam = spec.frequency.value();
    let a_tau = spec.amplitude_product_moment(tau)?;
    let vectors = enumerate_sign_vectors(s, true)?;
    let times: Vec<f64> = tau.iter().map(|&x| x as f64).collect();
    let var = |e: &SignVector| -> Result<f64> {
        let coeffs: Vec<f64> = e.signs().iter().map(|&x| lam * x as f64).collect();
        lincomb_variance(arima, tau, &coeffs)
    };
    let angle = |e: &SignVector| lam * e.dot(&times);
    Ok(a_tau * sign_sum(s, &vectors, &var, &angle)?)
}

/// Engine value of `E(y_t y_{t+tau})` for a random-walk phase with step
/// variance `sigma_sq`, given `a` and `gamma_a_tau = gamma_A(tau)`.
/// Equals `(a^2 + gamma_A(tau)) exp(-lambda^2 |tau| sigma^2 / 2) cos(lambda tau) / 2`.
pub fn acf_random_walk_phase(
    a: f64,
    gamma_a_tau: f64,
    lambda: f64,
    sigma_sq: f64,
    tau: i64,
) -> Result<f64> {
    ensure(sigma_sq.is_finite() && sigma_sq >= 0.0, || {
        format!("sigma_sq must be non-negative, got {sigma_sq}")
    })?;
    let lam = Frequency::new(lambda)?.value();
    let rw = ArimaSpec::random_walk(sigma_sq.sqrt())?;
    let lags = [0, tau.abs()];
    let vectors = enumerate_sign_vectors(2, true)?;
    let times = [0.0, tau.abs() as f64];
    let var = |e: &SignVector| -> Result<f64> {
        let coeffs: Vec<f64> = e.signs().iter().map(|&x| lam * x as f64).collect();
        lincomb_variance(&rw, &lags, &coeffs)
    };
    let angle = |e: &SignVector| lam * e.dot(&times);
    Ok((a * a + gamma_a_tau) * sign_sum(2, &vectors, &var, &angle)?)
}

/// `E(y_t y_{t+tau})` for `tau = 0..=tau_max` under an integrated phase with
/// a uniform starting level: `(a^2 + gamma_A(tau)) cos(lambda tau) exp(-lambda^2 V(tau) / 2) / 2`
/// with `V(tau) = Var(P_{t+tau} - P_t)` accumulated in one pass.
pub fn second_moment_sequence(spec: &ModulatedCycleSpec, tau_max: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let arima = match &spec.phase {
        PhaseSpec::Integrated {
            arima,
            initial_level: InitialLevel::UniformCycle,
        } => arima,
        _ => return Err(Error::Unsupported(
            "the autocovariance sequence needs an integrated phase with a uniform starting level"
                .into(),
        )),
    };
    let lam = spec.frequency.value();
    let gw = arma_acf_sequence(&arima.base, tau_max)?;
    let ga = spec.amplitude_acf(tau_max)?;
    let mut out = Vec::with_capacity(tau_max + 1);
    // V(tau + 1) = V(tau) + gamma_w(0) + 2 sum_{h=1..tau} gamma_w(h)
    let (mut v, mut partial) = (0.0, 0.0);
    for tau in 0..=tau_max {
        let t = tau as f64;
        out.push(
            0.5 * (spec.a * spec.a + ga[tau]) * (lam * t).cos() * (-0.5 * lam * lam * v).exp(),
        );
        if tau < tau_max {
            if tau >= 1 {
                partial += gw[tau];
            }
            v += gw[0] + 2.0 * partial;
        }
    }
    Ok(out)
}

/// A competing constant multiplying `(a^2 + gamma_A) exp(..) cos(..)` in the
/// random-walk autocovariance. Monte Carlo rejects it; the engine's is `1/2`.
pub const ALT_RANDOM_WALK_ACF_FACTOR: f64 = 2.0;

/// Second and fourth moments at equal lags, with kurtosis.
pub fn even_moment_and_kurtosis(spec: &ModulatedCycleSpec) -> Result<EvenMoments> {
    let second = stationary_moment(spec, &LagPattern::new(vec![0; 2])?)?;
    let fourth = stationary_moment(spec, &LagPattern::new(vec![0; 4])?)?;
    let amplitude_second = spec.amplitude_product_moment(&[0; 2])?;
    let amplitude_fourth = spec.amplitude_product_moment(&[0; 4])?;
    if second <= 0.0 {
        return Err(Error::Divergence(
            "zero second moment: kurtosis undefined".into(),
        ));
    }
    Ok(EvenMoments {
        second,
        fourth,
        kurtosis: fourth / (second * second),
        amplitude_second,
        amplitude_fourth,
        amplitude_kurtosis: amplitude_fourth / (amplitude_second * amplitude_second),
    })
}

/// Engine moment for either phase type (`t` matters only for a stationary phase).
pub fn engine_moment(spec: &ModulatedCycleSpec, lags: &LagPattern, t: i64) -> Result<f64> {
    match spec.phase {
        PhaseSpec::Stationary { .. } => apc_moment(spec, lags, t),
        PhaseSpec::Integrated { .. } => stationary_moment(spec, lags),
    }
}

/// Monte-Carlo estimate of `E prod_j y_{t+tau_j}`: each replication simulates
/// the path from `t0 = t + min(tau)`.
pub fn mc_moment(
    spec: &ModulatedCycleSpec,
    lags: &LagPattern,
    t: i64,
    replications: usize,
    seed: u64,
) -> Result<Estimate> {
    spec.validate()?;
    ensure(replications >= 2, || {
        "at least two replications are needed".into()
    })?;
    let tau = lags.lags().to_vec();
    let t0 = t + lags.min();
    let n = (lags.max() - lags.min()) as usize + 1;
    let draws = replicate(seed, replications, |rng, _| -> Result<f64> {
        let y = spec.simulate_with(rng, n, t0)?;
        Ok(tau.iter().map(|&x| y[(t + x - t0) as usize]).product())
    });
    let xs: Vec<f64> = draws.into_iter().collect::<Result<_>>()?;
    Ok(mean_se(&xs))
}

/// Engine value and Monte-Carlo estimate side by side.
pub fn moment_report(
    spec: &ModulatedCycleSpec,
    lags: &LagPattern,
    t: i64,
    replications: usize,
    seed: u64,
) -> Result<MomentReport> {
    let engine_value = engine_moment(spec, lags, t)?;
    let mc = mc_moment(spec, lags, t, replications, seed)?;
    Ok(MomentReport {
        lags: lags.lags().to_vec(),
        order: lags.order(),
        engine_value,
        mc_value: mc.mean,
        mc_se: mc.se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rw_spec(a: f64, amp: AmplitudeNoise, sigma: f64, lam: f64) -> ModulatedCycleSpec {
        ModulatedCycleSpec {
            a,
            frequency: Frequency::new(lam).unwrap(),
            amplitude: amp,
            phase: PhaseSpec::Integrated {
                arima: ArimaSpec::random_walk(sigma).unwrap(),
                initial_level: InitialLevel::UniformCycle,
            },
        }
    }

    fn lags(v: &[i64]) -> LagPattern {
        LagPattern::new(v.to_vec()).unwrap()
    }

    #[test]
    fn odd_orders_vanish() {
        let s = rw_spec(1.0, AmplitudeNoise::Zero, 0.2, PI / 6.0);
        assert_eq!(stationary_moment(&s, &lags(&[0, 1, 5])).unwrap(), 0.0);
    }

    #[test]
    fn equal_lag_constants() {
        let s = rw_spec(1.0, AmplitudeNoise::Zero, 0.2, PI / 6.0);
        assert!((stationary_moment(&s, &lags(&[0, 0])).unwrap() - 0.5).abs() < 1e-15);
        assert!((stationary_moment(&s, &lags(&[0, 0, 0, 0])).unwrap() - 0.375).abs() < 1e-15);
        let k = even_moment_and_kurtosis(&s).unwrap();
        assert!((k.kurtosis - 1.5).abs() < 1e-14);
        assert!((k.amplitude_kurtosis - 1.0).abs() < 1e-14);
    }

    #[test]
    fn second_moment_scales_with_a_squared() {
        for a in [0.5, 2.0, 3.0] {
            let s = rw_spec(a, AmplitudeNoise::Zero, 0.3, 0.7);
            let v = stationary_moment(&s, &lags(&[0, 0])).unwrap();
            assert!((v - 0.5 * a * a).abs() < 1e-14);
        }
    }

    #[test]
    fn random_walk_acf_closed_form() {
        let (lam, s2) = (PI / 6.0, 0.04);
        for tau in 0..8 {
            let v = acf_random_walk_phase(1.0, 0.0, lam, s2, tau).unwrap();
            let want = 0.5 * (-0.5 * lam * lam * tau as f64 * s2).exp() * (lam * tau as f64).cos();
            assert!((v - want).abs() < 1e-15, "tau {tau}");
        }
        assert!(acf_random_walk_phase(1.0, 0.0, lam, s2, 3).unwrap().abs() < 1e-15);
    }

    #[test]
    fn engine_matches_acf_helper_with_ar_amplitude() {
        let arma = ArmaSpec::ar1(0.5, 0.3).unwrap();
        let g = arma_acf_sequence(&arma, 6).unwrap();
        let s = rw_spec(1.0, AmplitudeNoise::Gaussian { arma }, 0.2, PI / 6.0);
        let e = stationary_moment(&s, &lags(&[0, 6])).unwrap();
        let h = acf_random_walk_phase(1.0, g[6], PI / 6.0, 0.04, 6).unwrap();
        assert!((e - h).abs() < 1e-15);
    }

    #[test]
    fn first_moment_under_stationary_phase() {
        let phase = ArmaSpec::ar1(0.6, 0.4).unwrap();
        let var_p = 0.16 / (1.0 - 0.36);
        let lam = PI / 5.0;
        let s = ModulatedCycleSpec {
            a: 1.3,
            frequency: Frequency::new(lam).unwrap(),
            amplitude: AmplitudeNoise::Zero,
            phase: PhaseSpec::Stationary { arma: phase },
        };
        for t in [0, 3, 11] {
            let v = apc_moment(&s, &lags(&[0]), t).unwrap();
            let want = 1.3 * (-0.5 * lam * lam * var_p).exp() * (lam * t as f64).sin();
            assert!((v - want).abs() < 1e-14);
        }
    }

    #[test]
    fn deterministic_phase_gives_sinusoid() {
        let s = ModulatedCycleSpec {
            a: 2.0,
            frequency: Frequency::new(0.4).unwrap(),
            amplitude: AmplitudeNoise::Zero,
            phase: PhaseSpec::Stationary {
                arma: ArmaSpec::white_noise(0.0).unwrap(),
            },
        };
        let mut rng = crate::rng::rng_from_seed(2);
        let y = s.simulate_with(&mut rng, 30, 0).unwrap();
        for (t, v) in y.iter().enumerate() {
            assert!((v - 2.0 * (0.4 * t as f64).sin()).abs() < 1e-15);
        }
        assert!((apc_moment(&s, &lags(&[0]), 5).unwrap() - 2.0 * 2f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn product_moment_recursion() {
        // E (a+X)^4 = a^4 + 6 a^2 v + 3 v^2
        let (a, v) = (0.7, 1.9);
        let m = gaussian_product_moment(a, 4, &|_, _| v);
        assert!((m - (a.powi(4) + 6.0 * a * a * v + 3.0 * v * v)).abs() < 1e-13);
        // E X1 X2 X3 X4 = c12 c34 + c13 c24 + c14 c23
        let c = [
            [1.0, 0.3, 0.2, 0.1],
            [0.3, 1.0, 0.5, 0.4],
            [0.2, 0.5, 1.0, 0.6],
            [0.1, 0.4, 0.6, 1.0],
        ];
        let m = gaussian_product_moment(0.0, 4, &|i, j| c[i][j]);
        let want = 0.3 * 0.6 + 0.2 * 0.4 + 0.1 * 0.5;
        assert!((m - want).abs() < 1e-15);
    }

    #[test]
    fn transient_decays_to_stationary_value() {
        let s = rw_spec(1.0, AmplitudeNoise::Zero, 0.2, PI / 5.0);
        let l = lags(&[0, 1]);
        let stat = stationary_moment(&s, &l).unwrap();
        let early = transient_moment(&s, &l, 0, 0).unwrap();
        let late = transient_moment(&s, &l, 3000, 0).unwrap();
        assert!((early - stat).abs() > 1e-2);
        assert!((late - stat).abs() < 1e-12);
    }

    #[test]
    fn order_cap() {
        let s = rw_spec(1.0, AmplitudeNoise::Zero, 0.2, 1.0);
        let r = stationary_moment(&s, &LagPattern::new(vec![0; 18]).unwrap());
        assert!(matches!(r, Err(Error::SizeLimit { .. })));
    }
}
