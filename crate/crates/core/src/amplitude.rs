//! Law of the amplitude `sqrt(alpha^2 + beta^2)` of a bivariate innovation
//! family: densities, distribution functions, moments and the inverse
//! coefficient of variation (ICV, mean over standard deviation).

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, gamma_ur};

use crate::error::{domain, Error, Result};
use crate::innovations::{gumbel_amplitude_cdf, MixingLaw, RadialLaw, SphericalFamily};
use crate::quad;
use crate::rng::SimRng;
use crate::special::{bessel_i0e, bessel_i1e, erf, ln_gamma};

const QUAD_TOL: f64 = 1e-12;

/// ICV of the Rayleigh law, the isotropic Gaussian case.
pub fn gaussian_icv() -> f64 {
    (PI / (4.0 - PI)).sqrt()
}

/// ICV of any law that depends on a single scale parameter, in terms of
/// `C_g`, the mean amplitude of the unit-variance member.
pub fn one_scale_icv(c_g: f64) -> Result<f64> {
    let v = 2.0 - c_g * c_g;
    if !(c_g > 0.0) || !(v > 0.0) {
        return Err(domain(format!("C_g must lie in (0, sqrt 2), got {c_g}")));
    }
    Ok(c_g / v.sqrt())
}

/// ICV of `|A|` for `A ~ N(mu, sigma^2)` as a function of `k = mu / sigma`.
pub fn polar_gaussian_icv(k: f64) -> f64 {
    let m = k * erf(k / SQRT_2) + (2.0 / PI).sqrt() * (-0.5 * k * k).exp();
    (m * m / (k * k + 1.0 - m * m)).sqrt()
}

/// ICV of the circle-mixture amplitude (a Rice law) at `k = mu / sigma`.
pub fn circle_mixture_icv(k: f64) -> f64 {
    let kk = 0.5 * k * k;
    let l = (1.0 + kk) * bessel_i0e(0.5 * kk) + kk * bessel_i1e(0.5 * kk);
    (1.0 / (4.0 * (1.0 + kk) / (PI * l * l) - 1.0)).sqrt()
}

/// ICV of the isotropic Student-t amplitude with `nu > 2` degrees of freedom.
pub fn student_t_icv(nu: f64) -> Result<f64> {
    if !(nu > 2.0) {
        return Err(domain(format!("Student-t ICV needs nu > 2, got {nu}")));
    }
    // 2 pi (nu - 2) Gamma((nu-2)/2)^2 / Gamma((nu-1)/2)^2
    let ratio = (2.0 * (ln_gamma(0.5 * (nu - 2.0)) - ln_gamma(0.5 * (nu - 1.0)))).exp();
    let denom = 2.0 * PI * (nu - 2.0) * ratio - PI * PI;
    Ok(PI * (1.0 / denom).sqrt())
}

/// ICV of the Kotz-type amplitude; independent of `r`.
pub fn kotz_icv(n: f64, s: f64) -> f64 {
    let a = n / s;
    let q = (2.0 * ln_gamma(a + 0.5 / s) - ln_gamma(a + 1.0 / s) - ln_gamma(a)).exp();
    (q / (1.0 - q)).sqrt()
}

/// The amplitude law of a bivariate innovation family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AmplitudeLaw {
    family: SphericalFamily,
}

impl AmplitudeLaw {
    pub fn new(family: SphericalFamily) -> Result<Self> {
        family.validate()?;
        Ok(Self { family })
    }

    pub fn family(&self) -> &SphericalFamily {
        &self.family
    }

    /// Density at `xi >= 0`.
    pub fn pdf(&self, xi: f64) -> Result<f64> {
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(domain(format!(
                "amplitude must be finite and non-negative, got {xi}"
            )));
        }
        Ok(match self.family {
            // spherical families: 2 pi xi g(xi^2)
            SphericalFamily::GaussianIso { .. }
            | SphericalFamily::StudentT { .. }
            | SphericalFamily::KotzType { .. }
            | SphericalFamily::GumbelType { .. } => {
                if xi == 0.0 {
                    return Ok(self.pdf_at_zero());
                }
                2.0 * PI
                    * xi
                    * self
                        .family
                        .density(crate::innovations::InnovationPair::new(xi, 0.0))?
            }
            SphericalFamily::CircleMixture { mu, sigma, .. } => rice_pdf(mu, sigma, xi),
            SphericalFamily::PolarAmplitude { amplitude } => amplitude.amplitude_pdf(xi),
            SphericalFamily::ScaleMixture { mixing } => polar_integral(&mixing, xi)?,
        })
    }

    fn pdf_at_zero(&self) -> f64 {
        match self.family {
            SphericalFamily::KotzType { n, s, r } => {
                // 2 s xi^{2N-1} r^{N/s} / Gamma(N/s)
                let c = 2.0 * s * (((n / s) * r.ln()) - ln_gamma(n / s)).exp();
                match (2.0 * n - 1.0).partial_cmp(&0.0) {
                    Some(std::cmp::Ordering::Greater) => 0.0,
                    Some(std::cmp::Ordering::Equal) => c,
                    _ => f64::INFINITY,
                }
            }
            _ => 0.0,
        }
    }

    /// Distribution function `P(AMP <= xi)`.
    pub fn cdf(&self, xi: f64) -> Result<f64> {
        if xi <= 0.0 {
            return Ok(0.0);
        }
        Ok(match self.family {
            SphericalFamily::GaussianIso { sigma } => -(-0.5 * xi * xi / (sigma * sigma)).exp_m1(),
            SphericalFamily::StudentT { nu, sigma } => {
                let s2 = sigma * sigma * (nu - 2.0) / nu;
                1.0 - (-0.5 * nu * (xi * xi / (nu * s2)).ln_1p()).exp()
            }
            SphericalFamily::KotzType { n, s, r } => gamma_lr(n / s, r * xi.powf(2.0 * s)),
            SphericalFamily::GumbelType { a, b } => gumbel_amplitude_cdf(a, b, xi),
            SphericalFamily::PolarAmplitude { amplitude } => radial_cdf(&amplitude, xi),
            SphericalFamily::CircleMixture { .. } | SphericalFamily::ScaleMixture { .. } => {
                let mut err = None;
                let v = quad::integrate(
                    |x| {
                        self.pdf(x).unwrap_or_else(|e| {
                            err.get_or_insert(e);
                            0.0
                        })
                    },
                    0.0,
                    xi,
                    1e-11,
                )?;
                if let Some(e) = err {
                    return Err(e);
                }
                v.min(1.0)
            }
        })
    }

    /// `E AMP`.
    pub fn mean(&self) -> Result<f64> {
        Ok(match self.family {
            SphericalFamily::GaussianIso { sigma } => sigma * (0.5 * PI).sqrt(),
            SphericalFamily::StudentT { nu, sigma } => {
                let s = sigma * ((nu - 2.0) / nu).sqrt();
                s * nu.sqrt()
                    * 0.5
                    * PI.sqrt()
                    * (ln_gamma(0.5 * (nu - 1.0)) - ln_gamma(0.5 * nu)).exp()
            }
            SphericalFamily::KotzType { n, s, r } => {
                (ln_gamma((n + 0.5) / s) - ln_gamma(n / s) - r.ln() / (2.0 * s)).exp()
            }
            SphericalFamily::GumbelType { a, b } => gumbel_moments(a, b)?.0,
            SphericalFamily::CircleMixture { mu, sigma, .. } => {
                let kk = 0.5 * (mu / sigma).powi(2);
                sigma
                    * (0.5 * PI).sqrt()
                    * ((1.0 + kk) * bessel_i0e(0.5 * kk) + kk * bessel_i1e(0.5 * kk))
            }
            SphericalFamily::PolarAmplitude { amplitude } => radial_mean(&amplitude)?,
            SphericalFamily::ScaleMixture { mixing } => scale_mixture_mean(&mixing)?,
        })
    }

    /// `E AMP^2`, twice the coordinate variance.
    pub fn second_moment(&self) -> Result<f64> {
        Ok(2.0 * self.family.coordinate_variance()?)
    }

    /// Inverse coefficient of variation `E AMP / sd(AMP)`.
    pub fn icv(&self) -> Result<f64> {
        let v = match self.family {
            SphericalFamily::GaussianIso { .. } => gaussian_icv(),
            SphericalFamily::StudentT { nu, .. } => student_t_icv(nu)?,
            SphericalFamily::KotzType { n, s, .. } => kotz_icv(n, s),
            SphericalFamily::CircleMixture { mu, sigma, .. } => circle_mixture_icv(mu / sigma),
            SphericalFamily::PolarAmplitude { amplitude } => match amplitude {
                RadialLaw::Gaussian { mu, sigma } => polar_gaussian_icv(mu / sigma),
                RadialLaw::LogNormal { sigma, .. } => 1.0 / (sigma * sigma).exp_m1().sqrt(),
                RadialLaw::Gamma { shape, .. } => shape.sqrt(),
                RadialLaw::InverseGamma { shape, .. } => {
                    if !(shape > 2.0) {
                        return Err(domain(format!(
                            "inverse-gamma amplitude needs shape > 2 for a finite variance, got {shape}"
                        )));
                    }
                    (shape - 2.0).sqrt()
                }
                RadialLaw::Nakagami { shape, .. } => {
                    let q = (2.0 * (ln_gamma(shape + 0.5) - ln_gamma(shape)) - shape.ln()).exp();
                    (q / (1.0 - q)).sqrt()
                }
            },
            SphericalFamily::GumbelType { .. } | SphericalFamily::ScaleMixture { .. } => {
                let m = self.mean()?;
                let m2 = self.second_moment()?;
                let var = m2 - m * m;
                if !(var > 0.0) {
                    return Err(Error::Divergence(format!(
                        "amplitude variance {var:e} is not positive"
                    )));
                }
                m / var.sqrt()
            }
        };
        if !v.is_finite() {
            return Err(Error::Divergence(format!("ICV evaluated to {v}")));
        }
        Ok(v)
    }

    /// Draws one amplitude.
    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        self.family.sample_pair(rng).radius()
    }
}

/// Amplitude density of `family` at `xi`.
pub fn amplitude_pdf(family: &SphericalFamily, xi: f64) -> Result<f64> {
    AmplitudeLaw::new(*family)?.pdf(xi)
}

/// Inverse coefficient of variation of the amplitude of `family`.
pub fn icv(family: &SphericalFamily) -> Result<f64> {
    AmplitudeLaw::new(*family)?.icv()
}

/// Sample ICV with its delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcvEstimate {
    pub icv: f64,
    pub se: f64,
}

/// Sample mean over sample standard deviation. The standard error is
/// `sqrt((1 - c skew + c^2 (kurt - 1) / 4) / n)` at `c = icv`.
pub fn empirical_icv(samples: &[f64]) -> Result<IcvEstimate> {
    let n = samples.len();
    if n < 2 {
        return Err(domain(format!(
            "empirical ICV needs at least 2 samples, got {n}"
        )));
    }
    if samples.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(domain("amplitude samples must be finite and non-negative"));
    }
    let (m, v, m3, m4) = crate::stats::central_moments(samples);
    let nf = n as f64;
    let var = v * nf / (nf - 1.0);
    if !(var > 0.0) {
        return Err(Error::Divergence(
            "amplitude samples have zero variance".into(),
        ));
    }
    let sd = var.sqrt();
    let c = m / sd;
    let skew = m3 / v.powf(1.5);
    let kurt = m4 / (v * v);
    let se = ((1.0 - c * skew + 0.25 * c * c * (kurt - 1.0)).max(0.0) / nf).sqrt();
    Ok(IcvEstimate { icv: c, se })
}

fn rice_pdf(mu: f64, sigma: f64, xi: f64) -> f64 {
    let s2 = sigma * sigma;
    let z = mu * xi / s2;
    // exp(-(xi^2 + mu^2)/(2 s2)) I0(z) = exp(-(xi - mu)^2/(2 s2)) I0e(z)
    xi / s2 * (-(xi - mu).powi(2) / (2.0 * s2)).exp() * bessel_i0e(z)
}

/// Polar integral `xi * int_0^{2 pi} f(xi cos t, xi sin t) dt` for a product
/// of identical even marginals, folded onto the first quadrant so the
/// coordinate axes are endpoints.
fn polar_integral(mixing: &MixingLaw, xi: f64) -> Result<f64> {
    if xi == 0.0 {
        return Ok(0.0);
    }
    let mut err = None;
    // relative tolerance only: the value is tiny far in the tail
    let v = quad::integrate_with(
        |t| {
            let (s, c) = t.sin_cos();
            match (
                mixing.marginal_density(xi * c),
                mixing.marginal_density(xi * s),
            ) {
                (Ok(a), Ok(b)) => a * b,
                (Err(e), _) | (_, Err(e)) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        FRAC_PI_2,
        0.0,
        QUAD_TOL,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(4.0 * xi * v)
}

fn radial_cdf(law: &RadialLaw, xi: f64) -> f64 {
    match *law {
        RadialLaw::Gaussian { mu, sigma } => {
            0.5 * (erf((xi - mu) / (sigma * SQRT_2)) + erf((xi + mu) / (sigma * SQRT_2)))
        }
        RadialLaw::LogNormal { mu, sigma } => 0.5 * (1.0 + erf((xi.ln() - mu) / (sigma * SQRT_2))),
        RadialLaw::Gamma { shape, scale } => gamma_lr(shape, xi / scale),
        RadialLaw::InverseGamma { shape, scale } => gamma_ur(shape, scale / xi),
        RadialLaw::Nakagami { shape, scale } => gamma_lr(shape, shape * xi * xi / (scale * scale)),
    }
}

fn radial_mean(law: &RadialLaw) -> Result<f64> {
    Ok(match *law {
        RadialLaw::Gaussian { mu, sigma } => {
            let k = mu / sigma;
            sigma * ((2.0 / PI).sqrt() * (-0.5 * k * k).exp() + k * erf(k / SQRT_2))
        }
        RadialLaw::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
        RadialLaw::Gamma { shape, scale } => shape * scale,
        RadialLaw::InverseGamma { shape, scale } => {
            if !(shape > 1.0) {
                return Err(domain(format!(
                    "inverse-gamma amplitude mean needs shape > 1, got {shape}"
                )));
            }
            scale / (shape - 1.0)
        }
        RadialLaw::Nakagami { shape, scale } => {
            (ln_gamma(shape + 0.5) - ln_gamma(shape)).exp() * scale / shape.sqrt()
        }
    })
}

/// `(E xi, E xi^2)` of the Gumbel-type amplitude by quadrature on
/// `[0, xi_max]`, where the tail beyond `xi_max` has mass below `1e-14`.
fn gumbel_moments(a: f64, b: f64) -> Result<(f64, f64)> {
    let norm = -(-b).exp_m1();
    // 1 - F(xi) <= b exp(-a xi^2) / (1 - e^{-b})
    let xi_max = (((b / norm).ln() + 14.0 * std::f64::consts::LN_10) / a).sqrt();
    let pdf = |xi: f64| 2.0 * a * b * xi * (-b * (-a * xi * xi).exp() - a * xi * xi).exp() / norm;
    let m1 = quad::integrate_with(|x| x * pdf(x), 0.0, xi_max, 0.0, 1e-13)?;
    let m2 = quad::integrate_with(|x| x * x * pdf(x), 0.0, xi_max, 0.0, 1e-13)?;
    Ok((m1, m2))
}

/// `E f(R)` over the mixing law.
fn mixing_expectation<F: FnMut(f64) -> Result<f64>>(law: &MixingLaw, mut f: F) -> Result<f64> {
    let mut err = None;
    let mut guarded = |r: f64| match f(r) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            0.0
        }
    };
    let v = match *law {
        MixingLaw::Uniform { lo, hi } => {
            quad::integrate_with(&mut guarded, lo, hi, 0.0, 1e-11)? / (hi - lo)
        }
        MixingLaw::StudentT { nu, scale } => {
            // R = scale sqrt(nu / W), W ~ chi^2_nu
            let h = 0.5 * nu;
            let log_c = -h * std::f64::consts::LN_2 - ln_gamma(h);
            quad::integrate_to_infinity(
                |w| {
                    if w <= 0.0 {
                        return 0.0;
                    }
                    let dens = (log_c + (h - 1.0) * w.ln() - 0.5 * w).exp();
                    if dens == 0.0 {
                        return 0.0;
                    }
                    dens * guarded(scale * (nu / w).sqrt())
                },
                0.0,
                1e-11,
            )?
        }
    };
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `E sqrt(R1^2 N1^2 + R2^2 N2^2)`: conditionally on the radii the pair is a
/// centred Gaussian with variances `r1^2, r2^2`, whose mean norm is
/// `sqrt(pi/2) (2/pi) int_0^{pi/2} sqrt(r1^2 cos^2 t + r2^2 sin^2 t) dt`.
fn scale_mixture_mean(law: &MixingLaw) -> Result<f64> {
    let c = (0.5 * PI).sqrt() * 2.0 / PI;
    mixing_expectation(law, |r1| {
        mixing_expectation(law, |r2| {
            let v = quad::integrate(
                |t| {
                    let (s, co) = t.sin_cos();
                    (r1 * r1 * co * co + r2 * r2 * s * s).sqrt()
                },
                0.0,
                FRAC_PI_2,
                1e-12,
            )?;
            Ok(c * v)
        })
    })
}
