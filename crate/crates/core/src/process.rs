//! One serializable handle over every model in the crate, with uniform
//! simulation, autocovariance and spectrum access.

use serde::{Deserialize, Serialize};

use crate::cycles::{
    CompanionCase, CompanionOutput, CompanionSpec, FswpSpec, HannanSpec, LayeredCycleSpec,
    NthOrderSpec, StochasticCycleSpec,
};
use crate::error::{ensure, Error, Result};
use crate::lab::CounterexampleSpec;
use crate::linear::{arma_acf, simulate_linear_with, ArmaSpec, LinearSpec};
use crate::modulated::{
    second_moment_sequence, stationary_moment, InitialLevel, ModulatedCycleSpec, PhaseSpec,
};
use crate::rng::{rng_from_seed, SimRng};
use crate::spectral::{
    linear_spectrum, psd_from_acf, theoretical_psd, ComponentSpectrum, PsdComponent, SpectralCurve,
};
use crate::types::{LagPattern, SeriesPath};

/// Longest autocovariance a modulated-cycle spectrum is summed over.
pub const MAX_MODULATED_PSD_LAGS: usize = 20_000;
const MODULATED_PSD_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessSpec {
    Hannan(HannanSpec),
    StochasticCycle(StochasticCycleSpec),
    NthOrder(NthOrderSpec),
    Fswp(FswpSpec),
    Layered(LayeredCycleSpec),
    Modulated(ModulatedCycleSpec),
    Counterexample(CounterexampleSpec),
    Companion(CompanionSpec),
    /// A plain stationary linear process with Gaussian innovations.
    Linear(LinearSpec),
    /// Independent components added together.
    Sum {
        components: Vec<ProcessSpec>,
    },
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::Hannan(s) => s.validate(),
            ProcessSpec::StochasticCycle(s) => s.validate(),
            ProcessSpec::NthOrder(s) => s.validate(),
            ProcessSpec::Fswp(s) => s.validate(),
            ProcessSpec::Layered(s) => s.validate(),
            ProcessSpec::Modulated(s) => s.validate(),
            ProcessSpec::Counterexample(s) => s.validate(),
            ProcessSpec::Companion(s) => s.validate(),
            ProcessSpec::Linear(s) => s.validate(),
            ProcessSpec::Sum { components } => {
                ensure(!components.is_empty(), || {
                    "sum needs at least one component".into()
                })?;
                components.iter().try_for_each(|c| c.validate())
            }
        }
    }

    /// `y_{t0}, ..., y_{t0+n-1}` from `rng`; sum components draw in order.
    pub fn simulate_with(&self, rng: &mut SimRng, n: usize, t0: i64) -> Result<Vec<f64>> {
        match self {
            ProcessSpec::Hannan(s) => s.simulate_with(rng, n, t0),
            ProcessSpec::StochasticCycle(s) => s.simulate_with(rng, n, t0),
            ProcessSpec::NthOrder(s) => s.simulate_with(rng, n, t0),
            ProcessSpec::Fswp(s) => s.simulate_with(rng, n, t0),
            ProcessSpec::Layered(s) => s.simulate_with(rng, n, t0),
            ProcessSpec::Modulated(s) => s.simulate_with(rng, n, t0),
            ProcessSpec::Counterexample(s) => s.simulate_with(rng, n, t0),
            ProcessSpec::Companion(s) => s.simulate_with(rng, n, t0),
            ProcessSpec::Linear(s) => simulate_linear_with(s, rng, n),
            ProcessSpec::Sum { components } => {
                self.validate()?;
                let mut y = vec![0.0; n];
                for c in components {
                    for (acc, v) in y.iter_mut().zip(c.simulate_with(rng, n, t0)?) {
                        *acc += v;
                    }
                }
                Ok(y)
            }
        }
    }

    /// Path of length `n` starting at `t0`, seeded by `seed`.
    pub fn simulate(&self, n: usize, t0: i64, seed: u64) -> Result<SeriesPath> {
        ensure(n >= 1, || "path length must be at least 1".into())?;
        let mut rng = rng_from_seed(seed);
        let v = self.simulate_with(&mut rng, n, t0)?;
        SeriesPath::new(t0, v, seed)
    }

    /// Theoretical autocovariance at lag `tau` for models that are
    /// stationary with a closed form.
    pub fn acf(&self, tau: i64) -> Result<f64> {
        match self {
            ProcessSpec::Hannan(s) => s.acf(tau),
            ProcessSpec::StochasticCycle(s) => s.acf(tau),
            ProcessSpec::NthOrder(s) => s.acf(tau),
            ProcessSpec::Fswp(s) => s.acf(tau),
            ProcessSpec::Layered(s) => s.acf(tau),
            ProcessSpec::Modulated(s) => modulated_acf(s, tau),
            ProcessSpec::Counterexample(s) => s.acf(tau),
            ProcessSpec::Companion(s) => s.acf(tau),
            ProcessSpec::Linear(s) => arma_acf(s, tau),
            ProcessSpec::Sum { components } => components.iter().map(|c| c.acf(tau)).sum(),
        }
    }

    pub fn acf_sequence(&self, tau_max: usize) -> Result<Vec<f64>> {
        (0..=tau_max as i64).map(|t| self.acf(t)).collect()
    }

    /// Theoretical spectrum `f(omega) = sum_tau gamma(tau) cos(omega tau)` on `grid`.
    pub fn psd(&self, grid: &[f64]) -> Result<SpectralCurve> {
        self.validate()?;
        let values = self.psd_values(grid)?;
        SpectralCurve::new(grid.to_vec(), values)
    }

    fn psd_values(&self, grid: &[f64]) -> Result<Vec<f64>> {
        let from_components =
            |c: Vec<PsdComponent>| -> Result<Vec<f64>> { Ok(theoretical_psd(&c, grid)?.values) };
        let arma = |a: &ArmaSpec| ComponentSpectrum::Linear {
            spec: LinearSpec::Arma(a.clone()),
        };
        match self {
            ProcessSpec::Hannan(s) => from_components(hannan_components(s)),
            ProcessSpec::StochasticCycle(s) => from_components(hannan_components(&s.as_hannan()?)),
            ProcessSpec::NthOrder(s) => {
                let base = ArmaSpec::ar1(s.rho, s.sigma_kappa)?;
                from_components(vec![
                    PsdComponent::new(arma(&base), s.frequency.value()).with_order(s.n)
                ])
            }
            ProcessSpec::Fswp(s) => from_components(vec![PsdComponent::new(
                ComponentSpectrum::Linear {
                    spec: LinearSpec::FracDiff(s.coordinate()?),
                },
                s.frequency.value(),
            )]),
            ProcessSpec::Layered(s) => {
                let inner = PsdComponent::new(arma(&s.arma), s.inner_frequency.value());
                from_components(vec![PsdComponent::new(
                    ComponentSpectrum::Nested {
                        component: Box::new(inner),
                    },
                    s.outer_frequency.value(),
                )])
            }
            ProcessSpec::Modulated(s) => {
                let acf = modulated_acf_until_decay(s)?;
                Ok(psd_from_acf(&acf, grid)?.values)
            }
            ProcessSpec::Counterexample(s) => Ok(vec![s.case.variance(); grid.len()]),
            ProcessSpec::Companion(s) => companion_psd(s, grid),
            ProcessSpec::Linear(s) => {
                SpectralCurve::new(grid.to_vec(), vec![0.0; grid.len()])?;
                Ok(grid.iter().map(|&w| linear_spectrum(s, w)).collect())
            }
            ProcessSpec::Sum { components } => {
                let mut acc = vec![0.0; grid.len()];
                for c in components {
                    for (a, v) in acc.iter_mut().zip(c.psd_values(grid)?) {
                        *a += v;
                    }
                }
                Ok(acc)
            }
        }
    }
}

fn hannan_components(s: &HannanSpec) -> Vec<PsdComponent> {
    s.components
        .iter()
        .map(|c| {
            PsdComponent::new(
                ComponentSpectrum::Linear {
                    spec: LinearSpec::Arma(c.arma.clone()),
                },
                c.frequency.value(),
            )
        })
        .collect()
}

fn companion_psd(s: &CompanionSpec, grid: &[f64]) -> Result<Vec<f64>> {
    let base = LinearSpec::Arma(ArmaSpec::ar1(s.rho, s.sigma)?);
    let ar = |w: f64| linear_spectrum(&base, w);
    SpectralCurve::new(grid.to_vec(), vec![0.0; grid.len()])?;
    match (s.output, s.companion) {
        (CompanionOutput::Y, _) | (CompanionOutput::YStar, CompanionCase::IndependentTwin) => {
            Ok(grid.iter().map(|&w| ar(w)).collect())
        }
        (CompanionOutput::YStar, CompanionCase::Proportional { a }) => {
            Ok(grid.iter().map(|&w| a * a * ar(w)).collect())
        }
        (CompanionOutput::Alpha | CompanionOutput::Beta, CompanionCase::IndependentTwin) => {
            let lam = s.frequency.value();
            Ok(grid
                .iter()
                .map(|&w| 0.5 * (ar(w - lam) + ar(w + lam)))
                .collect())
        }
        _ => Err(Error::Unsupported(format!(
            "no closed-form spectrum for output {:?} of companion {:?}",
            s.output, s.companion
        ))),
    }
}

fn modulated_acf(s: &ModulatedCycleSpec, tau: i64) -> Result<f64> {
    match &s.phase {
        PhaseSpec::Integrated {
            initial_level: InitialLevel::UniformCycle,
            ..
        } => stationary_moment(s, &LagPattern::new(vec![0, tau.abs()])?),
        PhaseSpec::Integrated {
            initial_level: InitialLevel::Zero,
            ..
        } => Err(Error::Unsupported(
            "a phase started at zero is not stationary; use the uniform starting level".into(),
        )),
        PhaseSpec::Stationary { .. } => Err(Error::Unsupported(
            "with a stationary phase the second moment depends on t; use the moment engine".into(),
        )),
    }
}

/// Autocovariance up to the first lag where it falls below
/// `1e-12 gamma(0)` for ten consecutive lags.
fn modulated_acf_until_decay(s: &ModulatedCycleSpec) -> Result<Vec<f64>> {
    let mut acf = second_moment_sequence(s, MAX_MODULATED_PSD_LAGS)?;
    let g0 = acf[0];
    let mut quiet = 0;
    for tau in 1..acf.len() {
        if acf[tau].abs() <= MODULATED_PSD_CUTOFF * g0.abs() {
            quiet += 1;
            if quiet == 10 {
                acf.truncate(tau + 1);
                return Ok(acf);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Precision(format!(
        "autocovariance has not decayed within {MAX_MODULATED_PSD_LAGS} lags"
    )))
}
