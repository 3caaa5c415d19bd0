//! Small statistical toolkit used by the Monte-Carlo oracles: means with
//! standard errors, batch means, Kolmogorov-Smirnov and chi-square tests.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    /// Standardized distance `|mean - target| / se`.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if self.se > 0.0 {
            d / self.se
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn within(&self, target: f64, n_se: f64) -> bool {
        self.z_score(target) <= n_se
    }
}

/// Sample mean and its standard error `s / sqrt(n)`, summed in slice order.
pub fn mean_se(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return Estimate {
            mean: f64::NAN,
            se: f64::NAN,
        };
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return Estimate { mean, se: f64::NAN };
    }
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    Estimate {
        mean,
        se: (ss / (n - 1.0) / n).sqrt(),
    }
}

/// Mean of a dependent stationary sequence with a batch-means standard error.
pub fn batch_mean_se(xs: &[f64], batches: usize) -> Estimate {
    let len = xs.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| xs[b * len..(b + 1) * len].iter().sum::<f64>() / len as f64)
        .collect();
    Estimate {
        mean: xs.iter().sum::<f64>() / xs.len() as f64,
        se: mean_se(&means).se,
    }
}

/// Sample moments `(mean, variance, third, fourth central moments)`, all with `1/n`.
pub fn central_moments(xs: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m, m2 / n, m3 / n, m4 / n)
}

/// Kolmogorov survival function `P(K > x)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS test; returns `(D_n, asymptotic p-value)`.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> (f64, f64) {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sqrt_n = n.sqrt();
    let p = kolmogorov_sf((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
    (d, p)
}

/// Upper-tail probability of a chi-square variable with `df` degrees of freedom.
pub fn chi_square_sf(stat: f64, df: f64) -> f64 {
    if stat <= 0.0 {
        return 1.0;
    }
    gamma_ur(0.5 * df, 0.5 * stat)
}

/// Pearson goodness-of-fit of counts against expected cell probabilities.
/// Returns `(statistic, p-value)`; cells with tiny expectation are pooled.
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> Result<(f64, f64)> {
    if counts.len() != probs.len() {
        return Err(Error::LengthMismatch {
            left: counts.len(),
            right: probs.len(),
        });
    }
    let n: u64 = counts.iter().sum();
    let n = n as f64;
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut pooled_o, mut pooled_e) = (0.0, 0.0);
    for (&o, &p) in counts.iter().zip(probs) {
        pooled_o += o as f64;
        pooled_e += p * n;
        if pooled_e >= 20.0 {
            stat += (pooled_o - pooled_e).powi(2) / pooled_e;
            cells += 1;
            pooled_o = 0.0;
            pooled_e = 0.0;
        }
    }
    if pooled_e > 0.0 {
        stat += (pooled_o - pooled_e).powi(2) / pooled_e;
        cells += 1;
    }
    if cells < 2 {
        return Err(Error::Domain(
            "too few populated cells for a chi-square test".into(),
        ));
    }
    Ok((stat, chi_square_sf(stat, (cells - 1) as f64)))
}

/// Chi-square test of independence of two coordinates using a `k x k` table
/// of marginal-quantile cells. Returns `(statistic, p-value)`.
pub fn independence_test(x: &[f64], y: &[f64], k: usize) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let cut = |v: &[f64]| -> Vec<f64> {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        (1..k).map(|i| s[i * s.len() / k]).collect()
    };
    let cx = cut(x);
    let cy = cut(y);
    let cell = |c: &[f64], v: f64| c.partition_point(|&e| e <= v);
    let mut table = vec![0u64; k * k];
    for (&a, &b) in x.iter().zip(y) {
        table[cell(&cx, a) * k + cell(&cy, b)] += 1;
    }
    let n = x.len() as f64;
    let rows: Vec<f64> = (0..k)
        .map(|i| table[i * k..(i + 1) * k].iter().sum::<u64>() as f64)
        .collect();
    let cols: Vec<f64> = (0..k)
        .map(|j| (0..k).map(|i| table[i * k + j]).sum::<u64>() as f64)
        .collect();
    let mut stat = 0.0;
    for i in 0..k {
        for j in 0..k {
            let e = rows[i] * cols[j] / n;
            stat += (table[i * k + j] as f64 - e).powi(2) / e;
        }
    }
    let df = ((k - 1) * (k - 1)) as f64;
    Ok((stat, chi_square_sf(stat, df)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_se_of_known_data() {
        let e = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        // s^2 = 5/3, se = sqrt(5/12)
        assert!((e.se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert!(e.within(2.5 + 2.0 * e.se, 2.0 + 1e-12));
    }

    #[test]
    fn kolmogorov_reference_points() {
        // P(K > 1.36) ~ 0.049, P(K > 1.63) ~ 0.0098
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.628) - 0.01).abs() < 5e-4);
    }

    #[test]
    fn chi_square_tail_reference() {
        // chi2(1) tail at 3.841 = 0.05; chi2(10) tail at 23.209 = 0.01
        assert!((chi_square_sf(3.841_458_8, 1.0) - 0.05).abs() < 1e-6);
        assert!((chi_square_sf(23.209_251, 10.0) - 0.01).abs() < 1e-6);
    }

    #[test]
    fn gof_length_mismatch() {
        assert!(chi_square_gof(&[1, 2], &[0.5]).is_err());
    }
}
