#![allow(dead_code)]

use stocycle::innovations::{MixingLaw, RadialLaw, SphericalFamily};

/// One or more parameterizations of every spherical family.
pub fn families() -> Vec<SphericalFamily> {
    vec![
        SphericalFamily::GaussianIso { sigma: 1.7 },
        SphericalFamily::StudentT {
            nu: 6.0,
            sigma: 0.8,
        },
        SphericalFamily::KotzType {
            n: 3.0,
            s: 0.8,
            r: 1.2,
        },
        SphericalFamily::KotzType {
            n: 20.0,
            s: 1.0,
            r: 1.0,
        },
        SphericalFamily::GumbelType { a: 0.7, b: 2.5 },
        SphericalFamily::CircleMixture {
            m: 2,
            mu: 3.0,
            sigma: 1.0 / 5f64.sqrt(),
        },
        SphericalFamily::PolarAmplitude {
            amplitude: RadialLaw::Gaussian {
                mu: 4.0,
                sigma: 0.5,
            },
        },
        SphericalFamily::PolarAmplitude {
            amplitude: RadialLaw::Gaussian {
                mu: 0.3,
                sigma: 1.0,
            },
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
    ]
}

/// Bartlett variance of the biased sample autocovariance at lag `tau` of a
/// Gaussian linear process with autocovariance `g` (`g[h]`, `h >= 0`).
pub fn bartlett_var(g: &[f64], tau: usize, n: usize) -> f64 {
    let at = |h: i64| g.get(h.unsigned_abs() as usize).copied().unwrap_or(0.0);
    let hmax = g.len() as i64 - 1;
    let mut v = 0.0;
    for h in -hmax..=hmax {
        v += at(h) * at(h) + at(h + tau as i64) * at(h - tau as i64);
    }
    v / n as f64
}
