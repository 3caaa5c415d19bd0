//! Linear filters: ARMA, ARIMA(p,1,q) and fractional differencing.
//!
//! Conventions: `Phi(L) y_t = Theta(L) sigma e_t` with
//! `Phi(L) = 1 - sum phi_i L^i`, `Theta(L) = 1 + sum theta_j L^j` and `e_t`
//! unit-variance innovations.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::rng::{rng_from_seed, SimRng};
use crate::special::ln_gamma;
use crate::types::SeriesPath;

/// Transients are burned until the slowest AR mode has decayed by this factor.
pub const BURN_IN_DECAY: f64 = 1e-10;
/// Default number of MA weights kept when simulating fractional noise.
pub const DEFAULT_FRAC_TRUNCATION: usize = 10_000;
const MAX_BURN_IN: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmaSpec {
    #[serde(default)]
    pub ar: Vec<f64>,
    #[serde(default)]
    pub ma: Vec<f64>,
    pub sigma: f64,
}

impl ArmaSpec {
    pub fn new(ar: Vec<f64>, ma: Vec<f64>, sigma: f64) -> Result<Self> {
        let s = Self { ar, ma, sigma };
        s.validate()?;
        Ok(s)
    }

    pub fn ar1(phi: f64, sigma: f64) -> Result<Self> {
        Self::new(vec![phi], vec![], sigma)
    }

    pub fn white_noise(sigma: f64) -> Result<Self> {
        Self::new(vec![], vec![], sigma)
    }

    /// Checks finiteness, `sigma >= 0` and stationarity of the AR part.
    /// `sigma = 0` is the degenerate all-zero process.
    pub fn validate(&self) -> Result<()> {
        ensure(self.sigma.is_finite() && self.sigma >= 0.0, || {
            format!("sigma must be finite and non-negative, got {}", self.sigma)
        })?;
        ensure(
            self.ar.iter().chain(&self.ma).all(|c| c.is_finite()),
            || "ARMA coefficients must be finite".into(),
        )?;
        let r = self.ar_spectral_radius();
        ensure(r < 1.0, || {
            format!("AR polynomial has a root on or inside the unit circle (max inverse root modulus {r})")
        })
    }

    /// Largest modulus of the inverse AR roots (eigenvalues of the companion matrix).
    pub fn ar_spectral_radius(&self) -> f64 {
        let p = self.ar.len();
        match p {
            0 => 0.0,
            1 => self.ar[0].abs(),
            _ => {
                let mut c = DMatrix::<f64>::zeros(p, p);
                for (i, &phi) in self.ar.iter().enumerate() {
                    c[(0, i)] = phi;
                }
                for i in 1..p {
                    c[(i, i - 1)] = 1.0;
                }
                c.complex_eigenvalues()
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Number of leading draws discarded so that `r^burn < BURN_IN_DECAY`.
    /// AR(1) without MA terms is started exactly and needs none.
    pub fn burn_in(&self) -> Result<usize> {
        if self.ar.is_empty() {
            return Ok(self.ma.len());
        }
        if self.ar.len() == 1 && self.ma.is_empty() {
            return Ok(0);
        }
        let r = self.ar_spectral_radius();
        if r == 0.0 {
            return Ok(self.ar.len() + self.ma.len());
        }
        let b = (BURN_IN_DECAY.ln() / r.ln()).ceil() as usize + self.ar.len() + self.ma.len();
        if b > MAX_BURN_IN {
            return Err(Error::SizeLimit {
                what: "burn-in length",
                got: b,
                max: MAX_BURN_IN,
            });
        }
        Ok(b)
    }
}

/// ARIMA(p,1,q): the first difference is the stationary `base` process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArimaSpec {
    pub base: ArmaSpec,
    #[serde(default = "one", deserialize_with = "integration_order_one")]
    pub integration_order: u32,
}

fn one() -> u32 {
    1
}

fn integration_order_one<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<u32, D::Error> {
    let v = u32::deserialize(d)?;
    if v != 1 {
        return Err(serde::de::Error::custom(format!(
            "only integration order 1 is supported, got {v}"
        )));
    }
    Ok(v)
}

impl ArimaSpec {
    pub fn new(base: ArmaSpec) -> Result<Self> {
        base.validate()?;
        Ok(Self {
            base,
            integration_order: 1,
        })
    }

    /// Gaussian random walk with step standard deviation `sigma`.
    pub fn random_walk(sigma: f64) -> Result<Self> {
        Self::new(ArmaSpec::white_noise(sigma)?)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.integration_order == 1, || {
            format!(
                "only integration order 1 is supported, got {}",
                self.integration_order
            )
        })?;
        self.base.validate()
    }
}

/// Fractional noise `(1 - L)^{-d} sigma e_t`, `0 < d < 1/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FracDiffSpec {
    pub d: f64,
    pub sigma: f64,
    /// MA weights kept by the simulator.
    #[serde(default = "default_truncation")]
    pub truncation: usize,
}

fn default_truncation() -> usize {
    DEFAULT_FRAC_TRUNCATION
}

impl FracDiffSpec {
    pub fn new(d: f64, sigma: f64) -> Result<Self> {
        let s = Self {
            d,
            sigma,
            truncation: DEFAULT_FRAC_TRUNCATION,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_truncation(mut self, n: usize) -> Result<Self> {
        self.truncation = n;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.d > 0.0 && self.d < 0.5, || {
            format!("d must lie in (0, 1/2), got {}", self.d)
        })?;
        ensure(self.sigma.is_finite() && self.sigma >= 0.0, || {
            format!("sigma must be finite and non-negative, got {}", self.sigma)
        })?;
        ensure(self.truncation >= 1, || {
            "truncation must be at least 1".into()
        })
    }
}

/// Any stationary linear process handled here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinearSpec {
    Arma(ArmaSpec),
    FracDiff(FracDiffSpec),
}

impl From<ArmaSpec> for LinearSpec {
    fn from(s: ArmaSpec) -> Self {
        LinearSpec::Arma(s)
    }
}

impl From<FracDiffSpec> for LinearSpec {
    fn from(s: FracDiffSpec) -> Self {
        LinearSpec::FracDiff(s)
    }
}

/// Which norm of the discarded weights `truncation_error_bound` measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailNorm {
    /// `sum_{k>N} |psi_k|` (ARMA: absolutely summable).
    L1,
    /// `sum_{k>N} psi_k^2` (fractional noise: only square summable).
    L2,
}

/// Truncated MA(inf) weights `psi_0 = 1, ..., psi_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiWeights {
    pub weights: Vec<f64>,
    pub truncation_error_bound: f64,
    pub tail_norm: TailNorm,
}

fn arma_psi(spec: &ArmaSpec, n_max: usize) -> Vec<f64> {
    let mut psi = vec![0.0; n_max + 1];
    psi[0] = 1.0;
    for k in 1..=n_max {
        let mut v = spec.ma.get(k - 1).copied().unwrap_or(0.0);
        for (i, &phi) in spec.ar.iter().enumerate().take(k) {
            v += phi * psi[k - 1 - i];
        }
        psi[k] = v;
    }
    psi
}

fn frac_psi(d: f64, n_max: usize) -> Vec<f64> {
    let mut psi = vec![0.0; n_max + 1];
    psi[0] = 1.0;
    for k in 1..=n_max {
        psi[k] = psi[k - 1] * (k as f64 - 1.0 + d) / k as f64;
    }
    psi
}

/// MA(inf) weights of `Theta(L) / Phi(L)` or `(1 - L)^{-d}`, with a tail estimate.
pub fn psi_weights(spec: &LinearSpec, n_max: usize) -> Result<PsiWeights> {
    ensure(n_max >= 1, || "n_max must be at least 1".into())?;
    match spec {
        LinearSpec::Arma(a) => {
            a.validate()?;
            let r = a.ar_spectral_radius();
            // weights beyond the horizon decay at least like r^k up to a polynomial
            // factor; sum them out until r^k is negligible, then bound geometrically
            let extra = if r == 0.0 {
                a.ma.len()
            } else {
                ((1e-18f64).ln() / r.ln()).ceil() as usize + a.ar.len() + a.ma.len()
            };
            let all = arma_psi(a, n_max + extra.max(1));
            let head: Vec<f64> = all[..=n_max].to_vec();
            let tail: f64 = all[n_max + 1..].iter().map(|v| v.abs()).sum();
            let last = all.last().copied().unwrap_or(0.0).abs();
            let geometric = if r > 0.0 { last * r / (1.0 - r) } else { 0.0 };
            Ok(PsiWeights {
                weights: head,
                truncation_error_bound: tail + geometric,
                tail_norm: TailNorm::L1,
            })
        }
        LinearSpec::FracDiff(f) => {
            f.validate()?;
            let w = frac_psi(f.d, n_max);
            // psi_k ~ psi_N (k/N)^{d-1}, so sum_{k>N} psi_k^2 ~ psi_N^2 N / (1 - 2d)
            let last = w[n_max];
            let bound = last * last * n_max as f64 / (1.0 - 2.0 * f.d);
            Ok(PsiWeights {
                weights: w,
                truncation_error_bound: bound,
                tail_norm: TailNorm::L2,
            })
        }
    }
}

/// Autocovariances `gamma(0), ..., gamma(max_lag)` of a stationary ARMA process.
pub fn arma_acf_sequence(spec: &ArmaSpec, max_lag: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let s2 = spec.sigma * spec.sigma;
    let p = spec.ar.len();
    let q = spec.ma.len();
    if p == 1 && q == 0 {
        let phi = spec.ar[0];
        let g0 = s2 / (1.0 - phi * phi);
        return Ok((0..=max_lag).map(|k| g0 * phi.powi(k as i32)).collect());
    }
    let theta = |j: usize| {
        if j == 0 {
            1.0
        } else {
            spec.ma.get(j - 1).copied().unwrap_or(0.0)
        }
    };
    let psi = arma_psi(spec, q);
    // c_k = sum_{j=k}^{q} theta_j psi_{j-k}
    let c = |k: usize| -> f64 { (k..=q).map(|j| theta(j) * psi[j - k]).sum::<f64>() };
    let mut g = vec![0.0; max_lag.max(p).max(q) + 1];
    // gamma(k) - sum_i phi_i gamma(|k-i|) = sigma^2 c_k for k = 0..p
    let mut m = DMatrix::<f64>::zeros(p + 1, p + 1);
    let mut rhs = DVector::<f64>::zeros(p + 1);
    for k in 0..=p {
        m[(k, k)] += 1.0;
        for (i, &phi) in spec.ar.iter().enumerate() {
            let lag = (k as isize - (i as isize + 1)).unsigned_abs();
            m[(k, lag)] -= phi;
        }
        rhs[k] = s2 * c(k);
    }
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Precision("singular Yule-Walker system".into()))?;
    for k in 0..=p {
        g[k] = sol[k];
    }
    for k in p + 1..g.len() {
        let mut v = if k <= q { s2 * c(k) } else { 0.0 };
        for (i, &phi) in spec.ar.iter().enumerate() {
            v += phi * g[k - i - 1];
        }
        g[k] = v;
    }
    g.truncate(max_lag + 1);
    Ok(g)
}

/// Fractional-noise autocovariance
/// `sigma^2 G(1-2d) G(|tau|+d) / (G(d) G(1-d) G(|tau|+1-d))`.
pub fn frac_acf(spec: &FracDiffSpec, tau: i64) -> f64 {
    let d = spec.d;
    let t = tau.unsigned_abs() as f64;
    spec.sigma
        * spec.sigma
        * (ln_gamma(1.0 - 2.0 * d) + ln_gamma(t + d)
            - ln_gamma(d)
            - ln_gamma(1.0 - d)
            - ln_gamma(t + 1.0 - d))
        .exp()
}

/// Autocovariance at lag `tau` of a stationary linear process.
pub fn arma_acf(spec: &LinearSpec, tau: i64) -> Result<f64> {
    match spec {
        LinearSpec::Arma(a) => {
            let k = tau.unsigned_abs() as usize;
            Ok(arma_acf_sequence(a, k)?[k])
        }
        LinearSpec::FracDiff(f) => {
            f.validate()?;
            Ok(frac_acf(f, tau))
        }
    }
}

impl LinearSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            LinearSpec::Arma(a) => a.validate(),
            LinearSpec::FracDiff(f) => f.validate(),
        }
    }

    pub fn sigma(&self) -> f64 {
        match self {
            LinearSpec::Arma(a) => a.sigma,
            LinearSpec::FracDiff(f) => f.sigma,
        }
    }

    /// Autocovariances for lags `0..=max_lag`.
    pub fn acf_sequence(&self, max_lag: usize) -> Result<Vec<f64>> {
        match self {
            LinearSpec::Arma(a) => arma_acf_sequence(a, max_lag),
            LinearSpec::FracDiff(f) => {
                f.validate()?;
                Ok((0..=max_lag as i64).map(|k| frac_acf(f, k)).collect())
            }
        }
    }

    /// Unit-variance innovations consumed to produce `n` outputs.
    pub fn required_innovations(&self, n: usize) -> Result<usize> {
        Ok(match self {
            LinearSpec::Arma(a) => a.burn_in()? + n,
            LinearSpec::FracDiff(f) => f.truncation + n,
        })
    }

    /// Maps unit-variance innovations (length `required_innovations(n)`) to `n`
    /// stationary outputs.
    pub fn filter(&self, innovations: &[f64], n: usize) -> Result<Vec<f64>> {
        let need = self.required_innovations(n)?;
        if innovations.len() != need {
            return Err(Error::LengthMismatch {
                left: innovations.len(),
                right: need,
            });
        }
        match self {
            LinearSpec::Arma(a) => Ok(filter_arma(a, innovations, n)),
            LinearSpec::FracDiff(f) => Ok(filter_frac(f, innovations, n)),
        }
    }
}

fn filter_arma(spec: &ArmaSpec, e: &[f64], n: usize) -> Vec<f64> {
    let s = spec.sigma;
    if s == 0.0 {
        return vec![0.0; n];
    }
    let burn = e.len() - n;
    let p = spec.ar.len();
    let mut y = vec![0.0; e.len()];
    if p == 1 && spec.ma.is_empty() {
        // exact stationary start
        let phi = spec.ar[0];
        y[0] = s * e[0] / (1.0 - phi * phi).sqrt();
        for t in 1..e.len() {
            y[t] = phi * y[t - 1] + s * e[t];
        }
    } else {
        for t in 0..e.len() {
            let mut v = s * e[t];
            for (j, &th) in spec.ma.iter().enumerate() {
                if t > j {
                    v += th * s * e[t - j - 1];
                }
            }
            for (i, &phi) in spec.ar.iter().enumerate() {
                if t > i {
                    v += phi * y[t - i - 1];
                }
            }
            y[t] = v;
        }
    }
    y.split_off(burn)
}

/// Linear convolution `sum_k a_k b_{t-k}` via FFT, full length `a.len() + b.len() - 1`.
pub fn fft_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    let size = len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut fa: Vec<Complex<f64>> = a.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fa.resize(size, Complex::new(0.0, 0.0));
    let mut fb: Vec<Complex<f64>> = b.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fb.resize(size, Complex::new(0.0, 0.0));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa[..len].iter().map(|z| z.re * scale).collect()
}

fn filter_frac(spec: &FracDiffSpec, e: &[f64], n: usize) -> Vec<f64> {
    if spec.sigma == 0.0 {
        return vec![0.0; n];
    }
    let nt = spec.truncation;
    let psi = frac_psi(spec.d, nt);
    let full = fft_convolve(&psi, e);
    // outputs that see the full weight window: indices nt..nt+n
    full[nt..nt + n].iter().map(|v| v * spec.sigma).collect()
}

/// Draws `n` standard normal values.
pub fn gaussian_innovations(rng: &mut SimRng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Gaussian stationary path of length `n` from a private stream.
pub fn simulate_linear_with(spec: &LinearSpec, rng: &mut SimRng, n: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let e = gaussian_innovations(rng, spec.required_innovations(n)?);
    spec.filter(&e, n)
}

/// Gaussian stationary path `y_0, ..., y_{n-1}` seeded by `seed`.
pub fn simulate_linear(spec: &LinearSpec, n: usize, seed: u64) -> Result<SeriesPath> {
    ensure(n >= 1, || "path length must be at least 1".into())?;
    let mut rng = rng_from_seed(seed);
    let v = simulate_linear_with(spec, &mut rng, n)?;
    SeriesPath::new(0, v, seed)
}

/// Splits `sum b_k P_{t+tau_k}` into `sum_u c_u w_{t+u}` with `w = (1 - L) P`.
/// Returns `(first lag u0, c_{u0}, ..., c_{u_max})`; requires `sum b = 0`.
fn difference_weights(lags: &[i64], coeffs: &[f64]) -> (i64, Vec<f64>) {
    let lo = *lags.iter().min().expect("non-empty");
    let hi = *lags.iter().max().expect("non-empty");
    // P_{t+tau} = P_{t+lo} + sum_{u=lo+1}^{tau} w_{t+u}
    let span = (hi - lo) as usize;
    let mut c = vec![0.0; span];
    for (&tau, &b) in lags.iter().zip(coeffs) {
        c[..(tau - lo) as usize].iter_mut().for_each(|x| *x += b);
    }
    (lo + 1, c)
}

fn check_lincomb(phase: &ArimaSpec, lags: &[i64], coeffs: &[f64]) -> Result<Option<f64>> {
    phase.validate()?;
    if lags.len() != coeffs.len() {
        return Err(Error::LengthMismatch {
            left: lags.len(),
            right: coeffs.len(),
        });
    }
    ensure(!lags.is_empty(), || "at least one lag is required".into())?;
    ensure(coeffs.iter().all(|c| c.is_finite()), || {
        "coefficients must be finite".into()
    })?;
    let total: f64 = coeffs.iter().sum();
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Ok(Some(0.0));
    }
    // a non-zero net coefficient leaves an integrated component
    if total.abs() > 1e-12 * scale {
        return Ok(Some(f64::INFINITY));
    }
    Ok(None)
}

/// Variance of `Q_t = sum_k b_k P_{t+tau_k}` for an ARIMA(p,1,q) process `P`.
///
/// For `sum b = 0` the `(1 - L)` factor cancels and `Q` is a finite linear
/// combination of the stationary differences, whose variance is evaluated
/// exactly from their autocovariances. Otherwise the variance is `+inf`.
pub fn lincomb_variance(phase: &ArimaSpec, lags: &[i64], coeffs: &[f64]) -> Result<f64> {
    if let Some(v) = check_lincomb(phase, lags, coeffs)? {
        return Ok(v);
    }
    let (_, c) = difference_weights(lags, coeffs);
    if c.is_empty() {
        return Ok(0.0);
    }
    let g = arma_acf_sequence(&phase.base, c.len() - 1)?;
    let mut v = 0.0;
    for (u, &cu) in c.iter().enumerate() {
        if cu == 0.0 {
            continue;
        }
        for (w, &cw) in c.iter().enumerate() {
            v += cu * cw * g[u.abs_diff(w)];
        }
    }
    Ok(v.max(0.0))
}

/// Same quantity through the truncated MA(inf) weights of
/// `C(L) Theta(L) / Phi(L)`; fails if the discarded tail exceeds `tol`.
pub fn lincomb_variance_psi(
    phase: &ArimaSpec,
    lags: &[i64],
    coeffs: &[f64],
    n_max: usize,
    tol: f64,
) -> Result<f64> {
    if let Some(v) = check_lincomb(phase, lags, coeffs)? {
        return Ok(v);
    }
    let (_, c) = difference_weights(lags, coeffs);
    if c.is_empty() {
        return Ok(0.0);
    }
    let pw = psi_weights(&LinearSpec::Arma(phase.base.clone()), n_max)?;
    // Q = sigma sum_m g_m e_{t-m}, g = c (reversed in time) convolved with psi
    let rev: Vec<f64> = c.iter().rev().copied().collect();
    let g = fft_convolve(&rev, &pw.weights);
    let c_l1: f64 = c.iter().map(|x| x.abs()).sum();
    // |sum of discarded terms| <= 2 ||g||_inf-ish bound: (sum|c|)^2 (2 tail + tail^2)
    let head_l1: f64 = pw.weights.iter().map(|x| x.abs()).sum();
    let t = pw.truncation_error_bound;
    let bound = phase.base.sigma.powi(2) * c_l1 * c_l1 * t * (2.0 * head_l1 + t);
    if bound > tol {
        return Err(Error::Precision(format!(
            "psi truncation at {n_max} leaves a variance error bound {bound:e} above {tol:e}"
        )));
    }
    let s2 = phase.base.sigma.powi(2);
    Ok(s2 * g.iter().map(|x| x * x).sum::<f64>())
}

/// Simulates `P_0, ..., P_{n-1}` with `P_0 = level` and i.i.d. Gaussian steps
/// following the stationary `base` ARMA.
pub fn simulate_integrated_with(
    phase: &ArimaSpec,
    rng: &mut SimRng,
    n: usize,
    level: f64,
) -> Result<Vec<f64>> {
    let base = LinearSpec::Arma(phase.base.clone());
    let w = simulate_linear_with(&base, rng, n.saturating_sub(1))?;
    let mut p = Vec::with_capacity(n);
    let mut acc = level;
    if n > 0 {
        p.push(acc);
    }
    for x in w {
        acc += x;
        p.push(acc);
    }
    Ok(p)
}

/// Coefficients `phi_1..phi_n` of `(1 - rho L)^n = 1 - sum phi_i L^i`.
pub fn repeated_root_ar(rho: f64, n: usize) -> Vec<f64> {
    let mut binom = 1.0;
    (1..=n)
        .map(|i| {
            binom *= (n - i + 1) as f64 / i as f64;
            // (1 - rho L)^n = sum C(n,i) (-rho)^i L^i
            -binom * (-rho).powi(i as i32)
        })
        .collect()
}
