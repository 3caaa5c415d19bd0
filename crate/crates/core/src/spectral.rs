//! Power spectra and their estimators.
//!
//! Convention throughout: `f(omega) = sum_tau gamma(tau) cos(omega tau)`,
//! with no `1 / (2 pi)` factor, so `gamma(0) = (1 / pi) int_0^pi f`.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure, Error, Result};
use crate::linear::LinearSpec;

/// Values below this are treated as rounding noise around zero.
pub const NEGATIVE_TOLERANCE: f64 = -1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PsdConvention {
    /// `f(omega) = sum_tau gamma(tau) cos(omega tau)`.
    #[default]
    CosineSum,
}

/// A spectrum tabulated on a strictly increasing grid in `[0, pi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCurve {
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(default)]
    pub convention: PsdConvention,
}

impl SpectralCurve {
    pub fn new(omega: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if omega.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: omega.len(),
                right: values.len(),
            });
        }
        validate_grid(&omega)?;
        if let Some(v) = values
            .iter()
            .find(|v| v.is_nan() || **v < NEGATIVE_TOLERANCE)
        {
            return Err(domain(format!("spectral value {v} is negative or NaN")));
        }
        Ok(Self {
            omega,
            values,
            convention: PsdConvention::CosineSum,
        })
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Index and value of the largest finite-or-infinite entry.
    pub fn argmax(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            })
    }

    /// `(1 / pi) int_0^pi f` by the trapezoid rule, which equals `gamma(0)`
    /// when the grid covers `[0, pi]`.
    pub fn implied_variance(&self) -> f64 {
        let mut s = 0.0;
        for k in 1..self.omega.len() {
            s += 0.5 * (self.values[k] + self.values[k - 1]) * (self.omega[k] - self.omega[k - 1]);
        }
        s / PI
    }

    /// Linear interpolation with even, `2 pi`-periodic extension.
    pub fn interpolate(&self, omega: f64) -> f64 {
        let w = fold_frequency(omega);
        let k = self.omega.partition_point(|&x| x < w);
        if k == 0 {
            return self.values[0];
        }
        if k == self.omega.len() {
            return self.values[k - 1];
        }
        let (x0, x1) = (self.omega[k - 1], self.omega[k]);
        let t = (w - x0) / (x1 - x0);
        self.values[k - 1] * (1.0 - t) + self.values[k] * t
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    ensure(!grid.is_empty(), || "frequency grid is empty".into())?;
    ensure(
        grid.iter().all(|w| w.is_finite() && (0.0..=PI).contains(w)),
        || "frequency grid must lie in [0, pi]".into(),
    )?;
    ensure(grid.windows(2).all(|p| p[0] < p[1]), || {
        "frequency grid must be strictly increasing".into()
    })
}

/// `n` equally spaced points covering `[0, pi]` inclusive.
pub fn uniform_grid(n: usize) -> Result<Vec<f64>> {
    ensure(n >= 2, || format!("grid needs at least 2 points, got {n}"))?;
    Ok((0..n).map(|k| PI * k as f64 / (n - 1) as f64).collect())
}

/// Fourier frequencies `2 pi k / len`, `k = 0..=len/2`.
pub fn fourier_grid(len: usize) -> Vec<f64> {
    (0..=len / 2)
        .map(|k| 2.0 * PI * k as f64 / len as f64)
        .collect()
}

/// Maps any frequency onto `[0, pi]` by evenness and `2 pi` periodicity.
pub fn fold_frequency(omega: f64) -> f64 {
    let w = omega.rem_euclid(2.0 * PI);
    if w > PI {
        2.0 * PI - w
    } else {
        w
    }
}

/// Spectrum of a stationary linear process: `sigma^2 |Theta|^2 / |Phi|^2` for
/// ARMA and `sigma^2 (2 sin(omega / 2))^{-2d}` for fractional noise (infinite
/// at `omega = 0` when `d > 0`).
pub fn linear_spectrum(spec: &LinearSpec, omega: f64) -> f64 {
    let w = fold_frequency(omega);
    match spec {
        LinearSpec::Arma(a) => {
            let s2 = a.sigma * a.sigma;
            let num = poly_modulus_sq(1.0, &a.ma, w);
            let den = poly_modulus_sq(-1.0, &a.ar, w);
            s2 * num / den
        }
        LinearSpec::FracDiff(f) => {
            let s2 = f.sigma * f.sigma;
            if f.d == 0.0 {
                return s2;
            }
            let base = 2.0 * (0.5 * w).sin();
            if base == 0.0 {
                return if f.d > 0.0 { f64::INFINITY } else { 0.0 };
            }
            s2 * base.powf(-2.0 * f.d)
        }
    }
}

/// `|1 + sign * sum c_k e^{-i omega k}|^2`.
fn poly_modulus_sq(sign: f64, coeffs: &[f64], omega: f64) -> f64 {
    let (mut re, mut im) = (1.0, 0.0);
    for (k, &c) in coeffs.iter().enumerate() {
        let (s, co) = (omega * (k + 1) as f64).sin_cos();
        re += sign * c * co;
        im -= sign * c * s;
    }
    re * re + im * im
}

/// Spectrum `f_j` of the coordinate processes of one cyclical component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentSpectrum {
    Linear {
        spec: LinearSpec,
    },
    Flat {
        level: f64,
    },
    /// Values on `[0, pi]`, extended evenly and periodically.
    Tabulated {
        curve: SpectralCurve,
        #[serde(default = "unit")]
        innovation_variance: f64,
    },
    /// The full spectrum of another cycle, for coordinates that are
    /// themselves cyclical.
    Nested {
        component: Box<PsdComponent>,
    },
}

fn unit() -> f64 {
    1.0
}

impl ComponentSpectrum {
    pub fn eval(&self, omega: f64) -> f64 {
        match self {
            ComponentSpectrum::Linear { spec } => linear_spectrum(spec, omega),
            ComponentSpectrum::Flat { level } => *level,
            ComponentSpectrum::Tabulated { curve, .. } => curve.interpolate(omega),
            ComponentSpectrum::Nested { component } => component.eval(omega),
        }
    }

    /// Variance of the innovations driving the filter; dividing by it turns
    /// the spectrum into the squared transfer function.
    pub fn innovation_variance(&self) -> f64 {
        match self {
            ComponentSpectrum::Linear { spec } => spec.sigma().powi(2),
            ComponentSpectrum::Flat { level } => *level,
            ComponentSpectrum::Tabulated {
                innovation_variance,
                ..
            } => *innovation_variance,
            ComponentSpectrum::Nested { .. } => 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ComponentSpectrum::Linear { spec } => spec.validate(),
            ComponentSpectrum::Flat { level } => ensure(level.is_finite() && *level >= 0.0, || {
                format!("flat spectrum level must be non-negative, got {level}")
            }),
            ComponentSpectrum::Tabulated {
                innovation_variance,
                ..
            } => ensure(*innovation_variance > 0.0, || {
                "tabulated spectrum needs a positive innovation variance".into()
            }),
            ComponentSpectrum::Nested { component } => {
                ensure(component.order == 1, || {
                    "nested components must have order 1".into()
                })?;
                component.spectrum.validate()
            }
        }
    }
}

/// One cyclical component `alpha cos(lambda t) + beta sin(lambda t)`. With
/// `order = n` the coordinates are the base filter applied `n` times to the
/// same innovations, so their spectrum is `sigma^2 (f_1 / sigma^2)^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdComponent {
    pub spectrum: ComponentSpectrum,
    pub frequency: f64,
    #[serde(default = "first_order")]
    pub order: u32,
}

fn first_order() -> u32 {
    1
}

impl PsdComponent {
    pub fn new(spectrum: ComponentSpectrum, frequency: f64) -> Self {
        Self {
            spectrum,
            frequency,
            order: 1,
        }
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.order = order;
        self
    }

    /// Coordinate spectrum after raising to the component order.
    pub fn coordinate_spectrum(&self, omega: f64) -> f64 {
        let f1 = self.spectrum.eval(omega);
        if self.order == 1 {
            return f1;
        }
        let s2 = self.spectrum.innovation_variance();
        s2 * (f1 / s2).powi(self.order as i32)
    }

    /// `(f(omega - lambda) + f(omega + lambda)) / 2`.
    pub fn eval(&self, omega: f64) -> f64 {
        0.5 * (self.coordinate_spectrum(omega - self.frequency)
            + self.coordinate_spectrum(omega + self.frequency))
    }
}

/// Spectrum of a sum of uncorrelated cyclical components on `grid`.
pub fn theoretical_psd(components: &[PsdComponent], grid: &[f64]) -> Result<SpectralCurve> {
    for c in components {
        c.spectrum.validate()?;
        ensure(
            c.frequency.is_finite() && c.frequency > 0.0 && c.frequency <= PI,
            || {
                format!(
                    "component frequency must lie in (0, pi], got {}",
                    c.frequency
                )
            },
        )?;
        ensure(c.order >= 1, || "component order must be at least 1".into())?;
    }
    validate_grid(grid)?;
    let values = grid
        .iter()
        .map(|&w| components.iter().map(|c| c.eval(w)).sum())
        .collect();
    SpectralCurve::new(grid.to_vec(), values)
}

/// Truncated cosine sum `gamma(0) + 2 sum_{1..=tau_max} gamma(tau) cos(omega tau)`.
pub fn psd_from_acf(acf: &[f64], grid: &[f64]) -> Result<SpectralCurve> {
    ensure(!acf.is_empty(), || {
        "autocovariance sequence is empty".into()
    })?;
    validate_grid(grid)?;
    let values = grid
        .iter()
        .map(|&w| {
            acf[0]
                + 2.0
                    * acf
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(k, g)| g * (w * k as f64).cos())
                        .sum::<f64>()
        })
        .map(|v: f64| {
            if (NEGATIVE_TOLERANCE..0.0).contains(&v) {
                0.0
            } else {
                v
            }
        })
        .collect();
    SpectralCurve::new(grid.to_vec(), values)
}

/// Biased sample autocovariances `(1/n) sum (y_{t+k} - m)(y_t - m)`,
/// `k = 0..=tau_max`.
pub fn empirical_acf(path: &[f64], tau_max: usize) -> Result<Vec<f64>> {
    let n = path.len();
    if tau_max >= n {
        return Err(domain(format!(
            "tau_max {tau_max} must be below the path length {n}"
        )));
    }
    let m = path.iter().sum::<f64>() / n as f64;
    let d: Vec<f64> = path.iter().map(|y| y - m).collect();
    Ok((0..=tau_max)
        .map(|k| d[k..].iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() / n as f64)
        .collect())
}

const MIN_PERIODOGRAM_LEN: usize = 64;

/// `(1/n) |sum_t (y_t - m) e^{-i omega t}|^2` at each grid frequency. Its
/// expectation tends to the cosine-sum spectrum.
pub fn periodogram(path: &[f64], grid: &[f64]) -> Result<SpectralCurve> {
    let n = path.len();
    ensure(n >= MIN_PERIODOGRAM_LEN, || {
        format!("periodogram needs at least {MIN_PERIODOGRAM_LEN} points, got {n}")
    })?;
    validate_grid(grid)?;
    let m = path.iter().sum::<f64>() / n as f64;
    let values = grid
        .iter()
        .map(|&w| {
            // rotate a unit phasor instead of calling sin/cos per term
            let step = Complex::from_polar(1.0, -w);
            let mut z = Complex::new(1.0, 0.0);
            let mut acc = Complex::new(0.0, 0.0);
            for (t, y) in path.iter().enumerate() {
                acc += z * (y - m);
                z *= step;
                if t % 1024 == 1023 {
                    // renormalize against drift in |z|
                    z = Complex::from_polar(1.0, -w * (t + 1) as f64);
                }
            }
            acc.norm_sqr() / n as f64
        })
        .collect();
    SpectralCurve::new(grid.to_vec(), values)
}

/// Periodogram on the Fourier grid via FFT.
pub fn periodogram_fft(path: &[f64]) -> Result<SpectralCurve> {
    let n = path.len();
    ensure(n >= MIN_PERIODOGRAM_LEN, || {
        format!("periodogram needs at least {MIN_PERIODOGRAM_LEN} points, got {n}")
    })?;
    let m = path.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = path.iter().map(|y| Complex::new(y - m, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let grid = fourier_grid(n);
    let values = buf[..grid.len()]
        .iter()
        .map(|c| c.norm_sqr() / n as f64)
        .collect();
    SpectralCurve::new(grid, values)
}

/// Pointwise average of curves sharing one grid, summed in slice order.
pub fn average_curves(curves: &[SpectralCurve]) -> Result<SpectralCurve> {
    let first = curves
        .first()
        .ok_or_else(|| domain("no curves to average"))?;
    let mut acc = vec![0.0; first.len()];
    for c in curves {
        if c.omega != first.omega {
            return Err(domain("curves to average must share a grid"));
        }
        for (a, v) in acc.iter_mut().zip(&c.values) {
            *a += v;
        }
    }
    let k = curves.len() as f64;
    SpectralCurve::new(
        first.omega.clone(),
        acc.into_iter().map(|v| v / k).collect(),
    )
}

/// Root-mean-square relative error of `estimate` against `target` over the
/// grid points where `keep` holds.
pub fn relative_rms<F: Fn(f64) -> bool>(
    estimate: &SpectralCurve,
    target: &SpectralCurve,
    keep: F,
) -> Result<f64> {
    if estimate.omega != target.omega {
        return Err(domain("curves must share a grid"));
    }
    let (mut s, mut k) = (0.0, 0usize);
    for ((w, e), t) in estimate
        .omega
        .iter()
        .zip(&estimate.values)
        .zip(&target.values)
    {
        if keep(*w) && t.is_finite() && *t > 0.0 {
            s += ((e - t) / t).powi(2);
            k += 1;
        }
    }
    if k == 0 {
        return Err(domain("no grid points selected"));
    }
    Ok((s / k as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::{ArmaSpec, FracDiffSpec};

    #[test]
    fn ar1_spectrum_closed_form() {
        let spec = LinearSpec::from(ArmaSpec::ar1(0.6, 1.5).unwrap());
        for &w in &[0.0, 0.7, 2.0, PI] {
            let want = 2.25 / (1.0 - 1.2 * f64::cos(w) + 0.36);
            assert!((linear_spectrum(&spec, w) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn frac_spectrum_pole_at_zero() {
        let spec = LinearSpec::from(FracDiffSpec::new(0.3, 1.0).unwrap());
        assert!(linear_spectrum(&spec, 0.0).is_infinite());
    }

    #[test]
    fn flat_component_is_flat() {
        let c = PsdComponent::new(ComponentSpectrum::Flat { level: 3.0 }, 1.1);
        let curve = theoretical_psd(&[c], &uniform_grid(33).unwrap()).unwrap();
        assert!(curve.values.iter().all(|v| (v - 3.0).abs() < 1e-15));
    }

    #[test]
    fn fft_matches_direct() {
        let y: Vec<f64> = (0..128).map(|t| ((t * t) % 17) as f64 - 8.0).collect();
        let f = periodogram_fft(&y).unwrap();
        let d = periodogram(&y, &f.omega).unwrap();
        for (a, b) in f.values.iter().zip(&d.values) {
            assert!((a - b).abs() < 1e-9 * (1.0 + b));
        }
    }

    #[test]
    fn acf_rejects_long_lag() {
        assert!(empirical_acf(&[1.0, 2.0], 2).is_err());
        assert_eq!(empirical_acf(&[0.0; 10], 3).unwrap(), vec![0.0; 4]);
    }
}
