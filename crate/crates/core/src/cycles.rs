//! Classical stochastic cycles: generalized Hannan, stochastic-cycle VAR,
//! nth-order cycle, fractional sinusoidal waveform, and a two-layer
//! modulated example; plus the rotation representation `R(-lambda t)`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::innovations::{InnovationPair, SphericalFamily};
use crate::linear::{
    arma_acf_sequence, frac_acf, repeated_root_ar, ArmaSpec, FracDiffSpec, LinearSpec,
};
use crate::rng::SimRng;
use crate::types::{mat2_apply, rotation, Frequency, Mat2, SeriesPath};

/// Coordinate innovation law: Gaussian unless a spherical family is given.
fn draw_pairs(
    rng: &mut SimRng,
    family: Option<&SphericalFamily>,
    n: usize,
) -> Result<Vec<InnovationPair>> {
    match family {
        None => Ok((0..n)
            .map(|_| {
                InnovationPair::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                )
            })
            .collect()),
        Some(f) => {
            f.validate()?;
            let v = f.coordinate_variance()?;
            ensure(v.is_finite() && v > 0.0, || {
                format!("innovation family needs a finite positive coordinate variance, got {v}")
            })?;
            let k = 1.0 / v.sqrt();
            Ok((0..n).map(|_| f.sample_pair(rng).scaled(k)).collect())
        }
    }
}

/// `y_t = alpha_t cos(lambda t) + beta_t sin(lambda t)` for `t = t0..t0+n`.
pub fn carrier_combine(alpha: &[f64], beta: &[f64], lambda: f64, t0: i64) -> Vec<f64> {
    alpha
        .iter()
        .zip(beta)
        .enumerate()
        .map(|(k, (&a, &b))| {
            let (s, c) = (lambda * (t0 + k as i64) as f64).sin_cos();
            a * c + b * s
        })
        .collect()
}

/// Coordinate processes `(alpha, beta)` of one cyclical component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentPaths {
    pub lambda: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

/// One generalized-Hannan component: both coordinates follow `arma`, driven
/// by the two coordinates of an i.i.d. bivariate innovation (Gaussian by
/// default), rescaled to unit coordinate variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HannanComponent {
    pub frequency: Frequency,
    pub arma: ArmaSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub innovation: Option<SphericalFamily>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HannanSpec {
    pub components: Vec<HannanComponent>,
}

impl HannanSpec {
    pub fn single(lambda: f64, arma: ArmaSpec) -> Result<Self> {
        Ok(Self {
            components: vec![HannanComponent {
                frequency: Frequency::new(lambda)?,
                arma,
                innovation: None,
            }],
        })
    }

    pub fn validate(&self) -> Result<()> {
        ensure(!self.components.is_empty(), || {
            "Hannan model needs at least one component".into()
        })?;
        for w in self.components.windows(2) {
            ensure(w[0].frequency.value() <= w[1].frequency.value(), || {
                "component frequencies must be non-decreasing".into()
            })?;
        }
        for c in &self.components {
            c.arma.validate()?;
            if let Some(f) = &c.innovation {
                f.validate()?;
            }
        }
        Ok(())
    }

    /// Coordinate paths of every component, drawn component by component.
    pub fn simulate_parts(&self, rng: &mut SimRng, n: usize) -> Result<Vec<ComponentPaths>> {
        self.validate()?;
        self.components
            .iter()
            .map(|c| {
                let lin = LinearSpec::Arma(c.arma.clone());
                let m = lin.required_innovations(n)?;
                let pairs = draw_pairs(rng, c.innovation.as_ref(), m)?;
                let ex: Vec<f64> = pairs.iter().map(|p| p.x).collect();
                let ey: Vec<f64> = pairs.iter().map(|p| p.x_star).collect();
                Ok(ComponentPaths {
                    lambda: c.frequency.value(),
                    alpha: lin.filter(&ex, n)?,
                    beta: lin.filter(&ey, n)?,
                })
            })
            .collect()
    }

    pub fn simulate_with(&self, rng: &mut SimRng, n: usize, t0: i64) -> Result<Vec<f64>> {
        Ok(sum_components(&self.simulate_parts(rng, n)?, n, t0))
    }

    /// `sum_j gamma_j(tau) cos(lambda_j tau)`.
    pub fn acf(&self, tau: i64) -> Result<f64> {
        self.validate()?;
        let k = tau.unsigned_abs() as usize;
        let mut v = 0.0;
        for c in &self.components {
            let g = arma_acf_sequence(&c.arma, k)?[k];
            v += g * (c.frequency.value() * tau as f64).cos();
        }
        Ok(v)
    }
}

pub(crate) fn sum_components(parts: &[ComponentPaths], n: usize, t0: i64) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for p in parts {
        for (acc, v) in y
            .iter_mut()
            .zip(carrier_combine(&p.alpha, &p.beta, p.lambda, t0))
        {
            *acc += v;
        }
    }
    y
}

/// Stochastic cycle: first coordinate of
/// `z_t = rho R(lambda) z_{t-1} + R(lambda t) kappa_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StochasticCycleSpec {
    pub rho_tilde: f64,
    pub frequency: Frequency,
    pub sigma_kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub innovation: Option<SphericalFamily>,
}

impl StochasticCycleSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(self.rho_tilde.abs() < 1.0, || {
            format!("|rho_tilde| must be < 1, got {}", self.rho_tilde)
        })?;
        ensure(
            self.sigma_kappa.is_finite() && self.sigma_kappa >= 0.0,
            || {
                format!(
                    "sigma_kappa must be finite and non-negative, got {}",
                    self.sigma_kappa
                )
            },
        )?;
        if let Some(f) = &self.innovation {
            f.validate()?;
        }
        Ok(())
    }

    /// The equivalent Hannan component with AR(1) coordinates.
    pub fn as_hannan(&self) -> Result<HannanSpec> {
        Ok(HannanSpec {
            components: vec![HannanComponent {
                frequency: self.frequency,
                arma: ArmaSpec::ar1(self.rho_tilde, self.sigma_kappa)?,
                innovation: self.innovation,
            }],
        })
    }

    /// Runs the VAR(1) recursion on unit-variance innovation pairs, started at
    /// `R(lambda t0) kappa_{t0} / sqrt(1 - rho^2)`. Returns `(z_t, z*_t)`.
    pub fn recursion(&self, innovations: &[InnovationPair], t0: i64) -> Vec<[f64; 2]> {
        let lam = self.frequency.value();
        let r = self.rho_tilde;
        let s = self.sigma_kappa;
        vector_recursion(
            &[r],
            lam,
            innovations,
            t0,
            s,
            Some(1.0 / (1.0 - r * r).sqrt()),
        )
    }

    pub fn simulate_with(&self, rng: &mut SimRng, n: usize, t0: i64) -> Result<Vec<f64>> {
        self.validate()?;
        let pairs = draw_pairs(rng, self.innovation.as_ref(), n)?;
        Ok(self.recursion(&pairs, t0).iter().map(|z| z[0]).collect())
    }

    pub fn acf(&self, tau: i64) -> Result<f64> {
        self.validate()?;
        let r = self.rho_tilde;
        Ok(
            self.sigma_kappa.powi(2) * r.powi(tau.unsigned_abs() as i32) / (1.0 - r * r)
                * (self.frequency.value() * tau as f64).cos(),
        )
    }
}

/// Rotated VAR(p): `z_t = sum_i phi_i R(i lambda) z_{t-i} + sigma R(lambda t) e_t`.
/// Pre-sample values are zero, except that for `p = 1` an `init_scale` starts
/// the recursion at `init_scale * sigma R(lambda t0) e_{t0}`.
pub fn vector_recursion(
    ar: &[f64],
    lambda: f64,
    innovations: &[InnovationPair],
    t0: i64,
    sigma: f64,
    init_scale: Option<f64>,
) -> Vec<[f64; 2]> {
    let mats: Vec<Mat2> = (1..=ar.len())
        .map(|i| rotation(i as f64 * lambda))
        .collect();
    let mut z: Vec<[f64; 2]> = Vec::with_capacity(innovations.len());
    for (k, e) in innovations.iter().enumerate() {
        let t = t0 + k as i64;
        let shock = mat2_apply(
            &rotation(lambda * t as f64),
            [sigma * e.x, sigma * e.x_star],
        );
        let mut v = shock;
        if k == 0 {
            if let (Some(c), 1) = (init_scale, ar.len()) {
                v = [c * shock[0], c * shock[1]];
            }
        } else {
            for (i, (&phi, m)) in ar.iter().zip(&mats).enumerate() {
                if k > i {
                    let w = mat2_apply(m, z[k - i - 1]);
                    v[0] += phi * w[0];
                    v[1] += phi * w[1];
                }
            }
        }
        z.push(v);
    }
    z
}

/// nth-order cycle: both coordinates are white noise passed `n` times through
/// the AR(1) filter `(1 - rho L)^{-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NthOrderSpec {
    pub n: u32,
    pub rho: f64,
    pub frequency: Frequency,
    pub sigma_kappa: f64,
}

const MAX_CYCLE_ORDER: u32 = 64;

impl NthOrderSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(self.n >= 1 && self.n <= MAX_CYCLE_ORDER, || {
            format!(
                "cycle order must lie in 1..={MAX_CYCLE_ORDER}, got {}",
                self.n
            )
        })?;
        ensure(self.rho.abs() < 1.0, || {
            format!("|rho| must be < 1, got {}", self.rho)
        })?;
        ensure(
            self.sigma_kappa.is_finite() && self.sigma_kappa >= 0.0,
            || {
                format!(
                    "sigma_kappa must be finite and non-negative, got {}",
                    self.sigma_kappa
                )
            },
        )
    }

    /// Coordinate law `(1 - rho L)^n alpha_t = sigma kappa_t` as an AR(n).
    pub fn coordinate_arma(&self) -> Result<ArmaSpec> {
        ArmaSpec::new(
            repeated_root_ar(self.rho, self.n as usize),
            vec![],
            self.sigma_kappa,
        )
    }

    /// Smallest `B` with `C(B+n-1, n-1) |rho|^B < 1e-10`, the weight of the
    /// slowest transient left after `B` steps.
    pub fn burn_in(&self) -> usize {
        if self.n == 1 || self.rho == 0.0 {
            return 0;
        }
        let r = self.rho.abs().ln();
        let m = (self.n - 1) as f64;
        let mut b = 1usize;
        loop {
            // ln C(b+m, m) <= m ln(b+m) - ln m!
            let lc = crate::special::ln_gamma(b as f64 + m + 1.0)
                - crate::special::ln_gamma(m + 1.0)
                - crate::special::ln_gamma(b as f64 + 1.0);
            if lc + b as f64 * r < (1e-10f64).ln() {
                return b;
            }
            b += 1 + b / 8;
        }
    }

    /// Applies the order-1 filter `n` times to unit-variance innovations
    /// (the first pass is started exactly, later passes from zero).
    pub fn filter(&self, e: &[f64]) -> Vec<f64> {
        let r = self.rho;
        let mut x: Vec<f64> = e.iter().map(|v| v * self.sigma_kappa).collect();
        for pass in 0..self.n {
            let mut prev = 0.0;
            for (i, v) in x.iter_mut().enumerate() {
                let y = if i == 0 && pass == 0 {
                    *v / (1.0 - r * r).sqrt()
                } else {
                    r * prev + *v
                };
                *v = y;
                prev = y;
            }
        }
        x
    }

    pub fn simulate_parts(&self, rng: &mut SimRng, n: usize) -> Result<ComponentPaths> {
        self.validate()?;
        let burn = self.burn_in();
        let pairs = draw_pairs(rng, None, burn + n)?;
        let ex: Vec<f64> = pairs.iter().map(|p| p.x).collect();
        let ey: Vec<f64> = pairs.iter().map(|p| p.x_star).collect();
        Ok(ComponentPaths {
            lambda: self.frequency.value(),
            alpha: self.filter(&ex)[burn..].to_vec(),
            beta: self.filter(&ey)[burn..].to_vec(),
        })
    }

    pub fn simulate_with(&self, rng: &mut SimRng, n: usize, t0: i64) -> Result<Vec<f64>> {
        Ok(sum_components(&[self.simulate_parts(rng, n)?], n, t0))
    }

    /// `gamma_n(tau) cos(lambda tau)` with `gamma_n` the AR(n) autocovariance.
    pub fn acf(&self, tau: i64) -> Result<f64> {
        self.validate()?;
        let k = tau.unsigned_abs() as usize;
        let g = arma_acf_sequence(&self.coordinate_arma()?, k)?[k];
        Ok(g * (self.frequency.value() * tau as f64).cos())
    }
}

/// Fractional sinusoidal waveform: fractional-noise coordinates on carriers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FswpSpec {
    pub d: f64,
    pub frequency: Frequency,
    pub sigma_kappa: f64,
    #[serde(default = "default_fswp_truncation")]
    pub truncation: usize,
}

fn default_fswp_truncation() -> usize {
    crate::linear::DEFAULT_FRAC_TRUNCATION
}

impl FswpSpec {
    pub fn coordinate(&self) -> Result<FracDiffSpec> {
        FracDiffSpec::new(self.d, self.sigma_kappa)?.with_truncation(self.truncation)
    }

    pub fn validate(&self) -> Result<()> {
        self.coordinate().map(|_| ())
    }

    pub fn simulate_parts(&self, rng: &mut SimRng, n: usize) -> Result<ComponentPaths> {
        let lin = LinearSpec::FracDiff(self.coordinate()?);
        let m = lin.required_innovations(n)?;
        let pairs = draw_pairs(rng, None, m)?;
        let ex: Vec<f64> = pairs.iter().map(|p| p.x).collect();
        let ey: Vec<f64> = pairs.iter().map(|p| p.x_star).collect();
        Ok(ComponentPaths {
            lambda: self.frequency.value(),
            alpha: lin.filter(&ex, n)?,
            beta: lin.filter(&ey, n)?,
        })
    }

    pub fn simulate_with(&self, rng: &mut SimRng, n: usize, t0: i64) -> Result<Vec<f64>> {
        Ok(sum_components(&[self.simulate_parts(rng, n)?], n, t0))
    }

    pub fn acf(&self, tau: i64) -> Result<f64> {
        let f = self.coordinate()?;
        Ok(frac_acf(&f, tau) * (self.frequency.value() * tau as f64).cos())
    }
}

/// Two-layer cycle: `y_t = alpha_t cos(w1 t) + beta_t sin(w1 t)` whose
/// coordinates are themselves independent cycles at `w2` with AR coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayeredCycleSpec {
    pub outer_frequency: Frequency,
    pub inner_frequency: Frequency,
    pub arma: ArmaSpec,
}

impl LayeredCycleSpec {
    pub fn validate(&self) -> Result<()> {
        self.arma.validate()
    }

    fn inner(&self) -> Result<HannanSpec> {
        HannanSpec::single(self.inner_frequency.value(), self.arma.clone())
    }

    pub fn simulate_with(&self, rng: &mut SimRng, n: usize, t0: i64) -> Result<Vec<f64>> {
        let inner = self.inner()?;
        let alpha = inner.simulate_with(rng, n, t0)?;
        let beta = inner.simulate_with(rng, n, t0)?;
        Ok(carrier_combine(
            &alpha,
            &beta,
            self.outer_frequency.value(),
            t0,
        ))
    }

    pub fn acf(&self, tau: i64) -> Result<f64> {
        Ok(self.inner()?.acf(tau)? * (self.outer_frequency.value() * tau as f64).cos())
    }
}

/// How the companion `y*` of an AR(1) series `y` is built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case", deny_unknown_fields)]
pub enum CompanionCase {
    /// `y*_t = a y_t`.
    Proportional { a: f64 },
    /// `y*_t` an independent copy of the AR(1) recursion.
    IndependentTwin,
    /// `y*_t = y*_{t-1} + e_t`, sharing the innovations of `y`, started at
    /// zero just before the first simulated time.
    RandomWalk,
}

/// Which series a companion model emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CompanionOutput {
    #[default]
    Y,
    YStar,
    Alpha,
    Beta,
    Amplitude,
}

/// An AR(1) series `y_t = rho y_{t-1} + e_t` paired with a companion `y*_t`,
/// viewed through the rotation representation at `frequency`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompanionSpec {
    pub rho: f64,
    pub sigma: f64,
    pub frequency: Frequency,
    pub companion: CompanionCase,
    #[serde(default)]
    pub output: CompanionOutput,
}

impl CompanionSpec {
    pub fn validate(&self) -> Result<()> {
        ArmaSpec::ar1(self.rho, self.sigma)?;
        if let CompanionCase::Proportional { a } = self.companion {
            ensure(a.is_finite(), || {
                format!("companion factor must be finite, got {a}")
            })?;
        }
        Ok(())
    }

    /// `(y, y*)` on `t0..t0+n`, with `y` started from its stationary law.
    pub fn simulate_pair(&self, rng: &mut SimRng, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        self.validate()?;
        let (rho, s) = (self.rho, self.sigma);
        let sd0 = s / (1.0 - rho * rho).sqrt();
        let mut normal = || rng.sample::<f64, _>(StandardNormal);
        let mut y = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        let (mut a, mut b) = (0.0, 0.0);
        for k in 0..n {
            let e = normal();
            if k == 0 {
                a = sd0 * e;
            } else {
                a = rho * a + s * e;
            }
            b = match self.companion {
                CompanionCase::Proportional { a: c } => c * a,
                CompanionCase::IndependentTwin => {
                    let e2 = normal();
                    if k == 0 {
                        sd0 * e2
                    } else {
                        rho * b + s * e2
                    }
                }
                CompanionCase::RandomWalk => b + s * e,
            };
            y.push(a);
            ys.push(b);
        }
        Ok((y, ys))
    }

    pub fn simulate_with(&self, rng: &mut SimRng, n: usize, t0: i64) -> Result<Vec<f64>> {
        let (y, ys) = self.simulate_pair(rng, n)?;
        let lam = self.frequency.value();
        Ok(match self.output {
            CompanionOutput::Y => y,
            CompanionOutput::YStar => ys,
            CompanionOutput::Amplitude => amplitude_path(&y, &ys),
            CompanionOutput::Alpha | CompanionOutput::Beta => {
                let alpha = self.output == CompanionOutput::Alpha;
                (0..n)
                    .map(|k| {
                        let (sn, c) = (lam * (t0 + k as i64) as f64).sin_cos();
                        if alpha {
                            y[k] * c - ys[k] * sn
                        } else {
                            y[k] * sn + ys[k] * c
                        }
                    })
                    .collect()
            }
        })
    }

    /// Autocovariance of the emitted series when it is stationary with a
    /// closed form (`y` always; `y*` for the proportional and twin cases).
    pub fn acf(&self, tau: i64) -> Result<f64> {
        self.validate()?;
        let g = self.sigma * self.sigma * self.rho.powi(tau.unsigned_abs() as i32)
            / (1.0 - self.rho * self.rho);
        match (self.output, self.companion) {
            (CompanionOutput::Y, _) => Ok(g),
            (CompanionOutput::YStar, CompanionCase::Proportional { a }) => Ok(a * a * g),
            (CompanionOutput::YStar, CompanionCase::IndependentTwin) => Ok(g),
            (CompanionOutput::Alpha | CompanionOutput::Beta, CompanionCase::IndependentTwin) => {
                // Gamma(tau) R(-lambda tau) has equal diagonal entries
                Ok(g * (self.frequency.value() * tau as f64).cos())
            }
            _ => Err(Error::Unsupported(format!(
                "no closed-form autocovariance for output {:?} of companion {:?}",
                self.output, self.companion
            ))),
        }
    }
}

/// `[alpha_t, beta_t]' = R(-lambda t) [y_t, y*_t]'`.
pub fn rotation_representation(
    y: &SeriesPath,
    y_star: &SeriesPath,
    frequency: Frequency,
) -> Result<(SeriesPath, SeriesPath)> {
    if y.len() != y_star.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: y_star.len(),
        });
    }
    ensure(y.start_time == y_star.start_time, || {
        format!(
            "start times differ: {} vs {}",
            y.start_time, y_star.start_time
        )
    })?;
    let lam = frequency.value();
    let mut alpha = Vec::with_capacity(y.len());
    let mut beta = Vec::with_capacity(y.len());
    for k in 0..y.len() {
        let (s, c) = (lam * y.time(k) as f64).sin_cos();
        let (a, b) = (y.values[k], y_star.values[k]);
        alpha.push(a * c - b * s);
        beta.push(a * s + b * c);
    }
    Ok((
        SeriesPath::new(y.start_time, alpha, y.seed)?,
        SeriesPath::new(y.start_time, beta, y_star.seed)?,
    ))
}

/// Inverse map: `y_t = alpha_t cos(lambda t) + beta_t sin(lambda t)`.
pub fn reconstruct(
    alpha: &SeriesPath,
    beta: &SeriesPath,
    frequency: Frequency,
) -> Result<Vec<f64>> {
    if alpha.len() != beta.len() {
        return Err(Error::LengthMismatch {
            left: alpha.len(),
            right: beta.len(),
        });
    }
    Ok(carrier_combine(
        &alpha.values,
        &beta.values,
        frequency.value(),
        alpha.start_time,
    ))
}

/// Instantaneous amplitude `sqrt(y_t^2 + y*_t^2)`.
pub fn amplitude_path(y: &[f64], y_star: &[f64]) -> Vec<f64> {
    y.iter().zip(y_star).map(|(a, b)| a.hypot(*b)).collect()
}

/// Sample cross-covariance matrix `(1/n) sum_t x_{t+tau} x_t'` of a
/// zero-mean bivariate sequence (no mean removal), for `tau >= 0`.
pub fn empirical_cross_cov(x: &[f64], y: &[f64], tau: usize) -> Result<Mat2> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    ensure(tau < x.len(), || {
        format!("lag {tau} exceeds path length {}", x.len())
    })?;
    let n = x.len();
    let cols = [x, y];
    let mut m = [[0.0; 2]; 2];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let s: f64 = (0..n - tau).map(|t| cols[i][t + tau] * cols[j][t]).sum();
            *cell = s / n as f64;
        }
    }
    Ok(m)
}
