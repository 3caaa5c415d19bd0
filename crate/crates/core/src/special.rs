//! Special functions. Gamma comes from `statrs` and erf from `libm`; the exponentially
//! scaled modified Bessel functions are evaluated here by power series for
//! moderate arguments and the Hankel asymptotic expansion for large ones.

pub use libm::erf;
pub use statrs::function::gamma::{gamma, ln_gamma};

const SERIES_LIMIT: f64 = 20.0;

/// `e^{-|x|} I_0(x)`.
pub fn bessel_i0e(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SERIES_LIMIT {
        let q = 0.25 * ax * ax;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-ax).exp()
    } else {
        hankel_scaled(0.0, ax)
    }
}

/// `e^{-|x|} I_1(x)`.
pub fn bessel_i1e(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT {
        let q = 0.25 * ax * ax;
        let mut term = 0.5 * ax;
        let mut sum = term;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * (k + 1.0));
            sum += term;
            k += 1.0;
        }
        sum * (-ax).exp()
    } else {
        hankel_scaled(1.0, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// `I_0(x)`; overflows for `|x| > ~700`, use the scaled form there.
pub fn bessel_i0(x: f64) -> f64 {
    bessel_i0e(x) * x.abs().exp()
}

/// `I_1(x)`.
pub fn bessel_i1(x: f64) -> f64 {
    bessel_i1e(x) * x.abs().exp()
}

fn hankel_scaled(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k: f64 = 1.0;
    loop {
        let next = -term * (mu - (2.0 * k - 1.0).powi(2)) / (k * 8.0 * x);
        if next.abs() >= term.abs() || next.abs() < 1e-18 {
            if next.abs() < term.abs() {
                sum += next;
            }
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}
