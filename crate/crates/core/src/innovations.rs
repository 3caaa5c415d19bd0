//! Bivariate innovation laws: samplers and joint densities.
//!
//! All laws are zero-mean. Every family except [`SphericalFamily::CircleMixture`]
//! and [`SphericalFamily::ScaleMixture`] has a density that depends on the
//! point only through `x^2 + x*^2`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure, Result};
use crate::quad;
use crate::rng::SimRng;
use crate::special::ln_gamma;

/// One draw `(x, x*)` of a bivariate innovation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnovationPair {
    pub x: f64,
    pub x_star: f64,
}

impl InnovationPair {
    pub fn new(x: f64, x_star: f64) -> Self {
        Self { x, x_star }
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.x_star)
    }

    pub fn scaled(self, c: f64) -> Self {
        Self::new(self.x * c, self.x_star * c)
    }
}

/// Law of the (signed) amplitude variable `A` in the polar construction
/// `(A sin theta, A cos theta)` with `theta ~ U(0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialLaw {
    /// `A ~ N(mu, sigma^2)`; the amplitude is `|A|`.
    Gaussian {
        mu: f64,
        sigma: f64,
    },
    /// `A = exp(B)`, `B ~ N(mu, sigma^2)`.
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    Gamma {
        shape: f64,
        scale: f64,
    },
    InverseGamma {
        shape: f64,
        scale: f64,
    },
    /// Nakagami with spread `scale^2`.
    Nakagami {
        shape: f64,
        scale: f64,
    },
}

/// Law of the mixing radius `R` in the scale mixture `(R1 N1, R2 N2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum MixingLaw {
    /// `R ~ U(lo, hi)`, `0 <= lo < hi`.
    Uniform { lo: f64, hi: f64 },
    /// `R = scale * sqrt(nu / W)`, `W ~ chi^2_nu`: Student-t marginals.
    StudentT { nu: f64, scale: f64 },
}

/// Bivariate innovation family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SphericalFamily {
    /// `N_2(0, sigma^2 I)`.
    GaussianIso { sigma: f64 },
    /// Bivariate Student-t with covariance `sigma^2 I`, `nu > 2`.
    StudentT { nu: f64, sigma: f64 },
    /// Kotz type, density `C q^{N-1} exp(-r q^s)` with `q = x^2 + x*^2`.
    KotzType { n: f64, s: f64, r: f64 },
    /// Gumbel type with scale `a` and shape `b`.
    GumbelType { a: f64, b: f64 },
    /// Equal-weight mixture of `2^{m+1}` isotropic Gaussians with means on
    /// the circle of radius `mu`, the first at `(0, mu)`, proceeding clockwise.
    CircleMixture { m: u32, mu: f64, sigma: f64 },
    /// Uniform angle times an independent amplitude.
    PolarAmplitude { amplitude: RadialLaw },
    /// Independent coordinates `R_i N_i` with i.i.d. mixing radii.
    ScaleMixture { mixing: MixingLaw },
}

fn positive(name: &str, v: f64) -> Result<()> {
    ensure(v.is_finite() && v > 0.0, || {
        format!("{name} must be positive and finite, got {v}")
    })
}

impl RadialLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RadialLaw::Gaussian { mu, sigma } | RadialLaw::LogNormal { mu, sigma } => {
                ensure(mu.is_finite(), || format!("mu must be finite, got {mu}"))?;
                positive("sigma", sigma)
            }
            RadialLaw::Gamma { shape, scale } | RadialLaw::InverseGamma { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)
            }
            RadialLaw::Nakagami { shape, scale } => {
                ensure(shape.is_finite() && shape >= 0.5, || {
                    format!("Nakagami shape must be >= 1/2, got {shape}")
                })?;
                positive("scale", scale)
            }
        }
    }

    /// Draws the signed variable `A`.
    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        match *self {
            RadialLaw::Gaussian { mu, sigma } => mu + sigma * rng.sample::<f64, _>(StandardNormal),
            RadialLaw::LogNormal { mu, sigma } => {
                (mu + sigma * rng.sample::<f64, _>(StandardNormal)).exp()
            }
            RadialLaw::Gamma { shape, scale } => gamma_draw(rng, shape) * scale,
            RadialLaw::InverseGamma { shape, scale } => scale / gamma_draw(rng, shape),
            RadialLaw::Nakagami { shape, scale } => scale * (gamma_draw(rng, shape) / shape).sqrt(),
        }
    }

    /// Density of the amplitude `|A|` at `r >= 0`.
    pub fn amplitude_pdf(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        match *self {
            RadialLaw::Gaussian { mu, sigma } => {
                let c = 1.0 / (sigma * (2.0 * PI).sqrt());
                let zm = (r - mu) / sigma;
                let zp = (r + mu) / sigma;
                c * ((-0.5 * zm * zm).exp() + (-0.5 * zp * zp).exp())
            }
            RadialLaw::LogNormal { mu, sigma } => {
                if r == 0.0 {
                    return 0.0;
                }
                let z = (r.ln() - mu) / sigma;
                (-0.5 * z * z).exp() / (r * sigma * (2.0 * PI).sqrt())
            }
            RadialLaw::Gamma { shape, scale } => {
                if r == 0.0 {
                    return power_at_zero(shape - 1.0, 1.0 / (scale * gamma_fn(shape)));
                }
                ((shape - 1.0) * r.ln() - r / scale - ln_gamma(shape) - shape * scale.ln()).exp()
            }
            RadialLaw::InverseGamma { shape, scale } => {
                if r == 0.0 {
                    return 0.0;
                }
                (shape * scale.ln() - ln_gamma(shape) - (shape + 1.0) * r.ln() - scale / r).exp()
            }
            RadialLaw::Nakagami { shape, scale } => {
                let omega = scale * scale;
                if r == 0.0 {
                    return power_at_zero(2.0 * shape - 1.0, 2.0 / scale);
                }
                (std::f64::consts::LN_2 + shape * shape.ln() - ln_gamma(shape) - shape * omega.ln()
                    + (2.0 * shape - 1.0) * r.ln()
                    - shape * r * r / omega)
                    .exp()
            }
        }
    }

    /// `lim_{r -> 0} pdf(r) / r`, the joint density at the origin times `2 pi`.
    fn pdf_over_radius_at_zero(&self) -> f64 {
        match *self {
            RadialLaw::Gaussian { .. } => f64::INFINITY,
            RadialLaw::LogNormal { .. } | RadialLaw::InverseGamma { .. } => 0.0,
            RadialLaw::Gamma { shape, scale } => {
                power_at_zero(shape - 2.0, 1.0 / (scale * scale * gamma_fn(shape)))
            }
            RadialLaw::Nakagami { shape, scale } => {
                power_at_zero(2.0 * shape - 2.0, 2.0 / (scale * scale))
            }
        }
    }

    /// `E|A|^2`.
    pub fn second_moment(&self) -> f64 {
        match *self {
            RadialLaw::Gaussian { mu, sigma } => mu * mu + sigma * sigma,
            RadialLaw::LogNormal { mu, sigma } => (2.0 * mu + 2.0 * sigma * sigma).exp(),
            RadialLaw::Gamma { shape, scale } => shape * (shape + 1.0) * scale * scale,
            RadialLaw::InverseGamma { shape, scale } => {
                if shape > 2.0 {
                    scale * scale / ((shape - 1.0) * (shape - 2.0))
                } else {
                    f64::INFINITY
                }
            }
            RadialLaw::Nakagami { scale, .. } => scale * scale,
        }
    }

    fn scaled(&self, c: f64) -> Self {
        match *self {
            RadialLaw::Gaussian { mu, sigma } => RadialLaw::Gaussian {
                mu: mu * c,
                sigma: sigma * c,
            },
            RadialLaw::LogNormal { mu, sigma } => RadialLaw::LogNormal {
                mu: mu + c.ln(),
                sigma,
            },
            RadialLaw::Gamma { shape, scale } => RadialLaw::Gamma {
                shape,
                scale: scale * c,
            },
            RadialLaw::InverseGamma { shape, scale } => RadialLaw::InverseGamma {
                shape,
                scale: scale * c,
            },
            RadialLaw::Nakagami { shape, scale } => RadialLaw::Nakagami {
                shape,
                scale: scale * c,
            },
        }
    }
}

/// Value at zero of `coef * r^power`.
fn power_at_zero(power: f64, coef: f64) -> f64 {
    if power > 0.0 {
        0.0
    } else if power == 0.0 {
        coef
    } else {
        f64::INFINITY
    }
}

fn gamma_fn(x: f64) -> f64 {
    ln_gamma(x).exp()
}

fn gamma_draw(rng: &mut SimRng, shape: f64) -> f64 {
    Gamma::new(shape, 1.0).expect("validated shape").sample(rng)
}

impl MixingLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MixingLaw::Uniform { lo, hi } => ensure(
                lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi,
                || format!("uniform mixing law needs 0 <= lo < hi < inf, got ({lo}, {hi})"),
            ),
            MixingLaw::StudentT { nu, scale } => {
                ensure(nu.is_finite() && nu > 2.0, || {
                    format!("mixing nu must exceed 2, got {nu}")
                })?;
                positive("scale", scale)
            }
        }
    }

    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        match *self {
            MixingLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            MixingLaw::StudentT { nu, scale } => {
                let w = 2.0 * gamma_draw(rng, 0.5 * nu);
                scale * (nu / w).sqrt()
            }
        }
    }

    /// `E R^k` for `k = 2, 4` (other orders by the same formulas).
    pub fn moment(&self, k: i32) -> f64 {
        match *self {
            MixingLaw::Uniform { lo, hi } => {
                let kp = (k + 1) as f64;
                (hi.powf(kp) - lo.powf(kp)) / (kp * (hi - lo))
            }
            MixingLaw::StudentT { nu, scale } => {
                // E (nu / W)^{k/2} with W ~ chi^2_nu
                let h = 0.5 * k as f64;
                if nu <= k as f64 {
                    return f64::INFINITY;
                }
                scale.powi(k)
                    * (h * (0.5 * nu).ln() + ln_gamma(0.5 * nu - h) - ln_gamma(0.5 * nu)).exp()
            }
        }
    }

    /// Marginal density of one coordinate `R N`.
    pub fn marginal_density(&self, x: f64) -> Result<f64> {
        match *self {
            MixingLaw::StudentT { nu, scale } => {
                let z = x / scale;
                Ok((ln_gamma(0.5 * (nu + 1.0))
                    - ln_gamma(0.5 * nu)
                    - 0.5 * (nu * PI).ln()
                    - scale.ln()
                    - 0.5 * (nu + 1.0) * (z * z / nu).ln_1p())
                .exp())
            }
            MixingLaw::Uniform { lo, hi } => {
                if x == 0.0 && lo == 0.0 {
                    return Ok(f64::INFINITY);
                }
                let c = 1.0 / (2.0 * PI).sqrt();
                let v = quad::integrate(
                    |r| {
                        if r <= 0.0 {
                            0.0
                        } else {
                            let z = x / r;
                            c * (-0.5 * z * z).exp() / r
                        }
                    },
                    lo,
                    hi,
                    1e-13,
                )?;
                Ok(v / (hi - lo))
            }
        }
    }

    fn scaled(&self, c: f64) -> Self {
        match *self {
            MixingLaw::Uniform { lo, hi } => MixingLaw::Uniform {
                lo: lo * c,
                hi: hi * c,
            },
            MixingLaw::StudentT { nu, scale } => MixingLaw::StudentT {
                nu,
                scale: scale * c,
            },
        }
    }
}

/// Inverse of the Gumbel-type amplitude CDF
/// `F(xi) = (exp(-b exp(-a xi^2)) - exp(-b)) / (1 - exp(-b))`.
pub fn gumbel_amplitude_quantile(a: f64, b: f64, u: f64) -> f64 {
    // exp(-b v) = 1 - (1 - u)(1 - e^{-b})  with v = exp(-a xi^2)
    let one_minus_eb = -(-b).exp_m1();
    let v = -(-(1.0 - u) * one_minus_eb).ln_1p() / b;
    (-v.ln() / a).max(0.0).sqrt()
}

/// Gumbel-type amplitude CDF.
pub fn gumbel_amplitude_cdf(a: f64, b: f64, xi: f64) -> f64 {
    if xi <= 0.0 {
        return 0.0;
    }
    let v = (-a * xi * xi).exp();
    // (e^{-b v} - e^{-b}) / (1 - e^{-b}) = (expm1(-b v) - expm1(-b)) / -expm1(-b)
    ((-b * v).exp_m1() - (-b).exp_m1()) / -(-b).exp_m1()
}

impl SphericalFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SphericalFamily::GaussianIso { sigma } => positive("sigma", sigma),
            SphericalFamily::StudentT { nu, sigma } => {
                ensure(nu.is_finite() && nu > 2.0, || {
                    format!("Student-t needs nu > 2 for a finite covariance, got {nu}")
                })?;
                positive("sigma", sigma)
            }
            SphericalFamily::KotzType { n, s, r } => {
                positive("N", n)?;
                positive("s", s)?;
                positive("r", r)
            }
            SphericalFamily::GumbelType { a, b } => {
                positive("a", a)?;
                positive("b", b)
            }
            SphericalFamily::CircleMixture { m, mu, sigma } => {
                ensure(m <= 20, || {
                    format!("circle mixture exponent m must be <= 20, got {m}")
                })?;
                positive("mu", mu)?;
                positive("sigma", sigma)
            }
            SphericalFamily::PolarAmplitude { amplitude } => amplitude.validate(),
            SphericalFamily::ScaleMixture { mixing } => mixing.validate(),
        }
    }

    /// Whether the joint density is a function of `x^2 + x*^2` alone.
    pub fn is_rotation_invariant(&self) -> bool {
        !matches!(
            self,
            SphericalFamily::CircleMixture { .. } | SphericalFamily::ScaleMixture { .. }
        )
    }

    /// Per-coordinate variance `E x^2 = E x*^2`.
    pub fn coordinate_variance(&self) -> Result<f64> {
        Ok(match *self {
            SphericalFamily::GaussianIso { sigma } | SphericalFamily::StudentT { sigma, .. } => {
                sigma * sigma
            }
            SphericalFamily::KotzType { n, s, r } => {
                0.5 * (ln_gamma((n + 1.0) / s) - ln_gamma(n / s) - r.ln() / s).exp()
            }
            SphericalFamily::GumbelType { a, b } => {
                // E xi^2 = E[-ln V] / a with V ~ b e^{-b v} / (1 - e^{-b}) on (0, 1)
                let norm = -(-b).exp_m1();
                let e = quad::integrate(|v| -v.ln() * b * (-b * v).exp() / norm, 0.0, 1.0, 1e-14)?;
                0.5 * e / a
            }
            SphericalFamily::CircleMixture { mu, sigma, .. } => 0.5 * mu * mu + sigma * sigma,
            SphericalFamily::PolarAmplitude { amplitude } => 0.5 * amplitude.second_moment(),
            SphericalFamily::ScaleMixture { mixing } => mixing.moment(2),
        })
    }

    /// The same family with every scale parameter multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        match *self {
            SphericalFamily::GaussianIso { sigma } => {
                SphericalFamily::GaussianIso { sigma: sigma * c }
            }
            SphericalFamily::StudentT { nu, sigma } => SphericalFamily::StudentT {
                nu,
                sigma: sigma * c,
            },
            SphericalFamily::KotzType { n, s, r } => SphericalFamily::KotzType {
                n,
                s,
                r: r * c.powf(-2.0 * s),
            },
            SphericalFamily::GumbelType { a, b } => {
                SphericalFamily::GumbelType { a: a / (c * c), b }
            }
            SphericalFamily::CircleMixture { m, mu, sigma } => SphericalFamily::CircleMixture {
                m,
                mu: mu * c,
                sigma: sigma * c,
            },
            SphericalFamily::PolarAmplitude { amplitude } => SphericalFamily::PolarAmplitude {
                amplitude: amplitude.scaled(c),
            },
            SphericalFamily::ScaleMixture { mixing } => SphericalFamily::ScaleMixture {
                mixing: mixing.scaled(c),
            },
        }
    }

    /// Component means of a circle mixture.
    pub fn circle_means(m: u32, mu: f64) -> Vec<(f64, f64)> {
        let k = 1usize << (m + 1);
        (0..k)
            .map(|j| {
                let phi = 0.5 * PI - 2.0 * PI * j as f64 / k as f64;
                (mu * phi.cos(), mu * phi.sin())
            })
            .collect()
    }

    /// Draws one innovation pair.
    pub fn sample_pair(&self, rng: &mut SimRng) -> InnovationPair {
        match *self {
            SphericalFamily::GaussianIso { sigma } => InnovationPair::new(
                sigma * rng.sample::<f64, _>(StandardNormal),
                sigma * rng.sample::<f64, _>(StandardNormal),
            ),
            SphericalFamily::StudentT { nu, sigma } => {
                let s = sigma * ((nu - 2.0) / nu).sqrt();
                let w = 2.0 * gamma_draw(rng, 0.5 * nu);
                let k = s * (nu / w).sqrt();
                InnovationPair::new(
                    k * rng.sample::<f64, _>(StandardNormal),
                    k * rng.sample::<f64, _>(StandardNormal),
                )
            }
            SphericalFamily::KotzType { n, s, r } => {
                let w = gamma_draw(rng, n / s);
                polar(rng, (w / r).powf(0.5 / s))
            }
            SphericalFamily::GumbelType { a, b } => {
                let u: f64 = rng.random();
                polar(rng, gumbel_amplitude_quantile(a, b, u))
            }
            SphericalFamily::CircleMixture { m, mu, sigma } => {
                let k = 1u64 << (m + 1);
                let j = rng.random_range(0..k);
                let phi = 0.5 * PI - 2.0 * PI * j as f64 / k as f64;
                InnovationPair::new(
                    mu * phi.cos() + sigma * rng.sample::<f64, _>(StandardNormal),
                    mu * phi.sin() + sigma * rng.sample::<f64, _>(StandardNormal),
                )
            }
            SphericalFamily::PolarAmplitude { amplitude } => {
                let a = amplitude.sample(rng);
                let theta = 2.0 * PI * rng.random::<f64>();
                let (s, c) = theta.sin_cos();
                InnovationPair::new(a * s, a * c)
            }
            SphericalFamily::ScaleMixture { mixing } => {
                let r1 = mixing.sample(rng);
                let r2 = mixing.sample(rng);
                InnovationPair::new(
                    r1 * rng.sample::<f64, _>(StandardNormal),
                    r2 * rng.sample::<f64, _>(StandardNormal),
                )
            }
        }
    }

    /// Draws a pair rescaled so each coordinate has unit variance.
    pub fn sample_standardized(&self, rng: &mut SimRng, inv_sd: f64) -> InnovationPair {
        self.sample_pair(rng).scaled(inv_sd)
    }

    /// Joint density at `p`. The polar construction with a Gaussian amplitude
    /// is singular (but integrable) at the origin, where `+inf` is returned;
    /// see [`SphericalFamily::is_singular_at_origin`].
    pub fn density(&self, p: InnovationPair) -> Result<f64> {
        if !(p.x.is_finite() && p.x_star.is_finite()) {
            return Err(domain("density evaluation point must be finite"));
        }
        let q = p.x * p.x + p.x_star * p.x_star;
        Ok(match *self {
            SphericalFamily::GaussianIso { sigma } => {
                (-0.5 * q / (sigma * sigma)).exp() / (2.0 * PI * sigma * sigma)
            }
            SphericalFamily::StudentT { nu, sigma } => {
                let s2 = sigma * sigma * (nu - 2.0) / nu;
                (-(0.5 * nu + 1.0) * (q / (nu * s2)).ln_1p()).exp() / (2.0 * PI * s2)
            }
            SphericalFamily::KotzType { n, s, r } => {
                if q == 0.0 {
                    let c = (s.ln() + (n / s) * r.ln() - ln_gamma(n / s)).exp() / PI;
                    return Ok(power_at_zero(n - 1.0, c));
                }
                (s.ln() + (n / s) * r.ln() - PI.ln() - ln_gamma(n / s) + (n - 1.0) * q.ln()
                    - r * q.powf(s))
                .exp()
            }
            SphericalFamily::GumbelType { a, b } => {
                let e = (-a * q).exp();
                a * b * e * (-b * e).exp() / (PI * -(-b).exp_m1())
            }
            SphericalFamily::CircleMixture { m, mu, sigma } => {
                let means = Self::circle_means(m, mu);
                let c = 1.0 / (2.0 * PI * sigma * sigma);
                means
                    .iter()
                    .map(|&(mx, my)| {
                        let d2 = (p.x - mx).powi(2) + (p.x_star - my).powi(2);
                        c * (-0.5 * d2 / (sigma * sigma)).exp()
                    })
                    .sum::<f64>()
                    / means.len() as f64
            }
            SphericalFamily::PolarAmplitude { amplitude } => {
                let r = q.sqrt();
                if r == 0.0 {
                    amplitude.pdf_over_radius_at_zero() / (2.0 * PI)
                } else {
                    amplitude.amplitude_pdf(r) / (2.0 * PI * r)
                }
            }
            SphericalFamily::ScaleMixture { mixing } => {
                mixing.marginal_density(p.x)? * mixing.marginal_density(p.x_star)?
            }
        })
    }

    /// True when [`SphericalFamily::density`] is infinite at the origin.
    pub fn is_singular_at_origin(&self) -> bool {
        self.density(InnovationPair::new(0.0, 0.0))
            .map(|v| v.is_infinite())
            .unwrap_or(false)
    }
}

fn polar(rng: &mut SimRng, radius: f64) -> InnovationPair {
    let theta = 2.0 * PI * rng.random::<f64>();
    let (s, c) = theta.sin_cos();
    InnovationPair::new(radius * c, radius * s)
}
