//! `stocycle`: batch front end over the stocycle library. Every science input
//! comes from flags or JSON files; every output is CSV or JSON and depends only
//! on the arguments, the input bytes and the seed.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use stocycle::amplitude::{empirical_icv, AmplitudeLaw};
use stocycle::innovations::SphericalFamily;
use stocycle::lab::moment_drift_scan;
use stocycle::process::ProcessSpec;
use stocycle::rng::replicate;
use stocycle::spectral::{
    average_curves, empirical_acf, periodogram, periodogram_fft, uniform_grid, SpectralCurve,
};
use stocycle::types::LagPattern;
use stocycle::verify::{builtin_suite, check, model_suite, VERIFY_THRESHOLD};

/// Environment variable selecting stderr verbosity: `quiet`, `info` or `debug`.
const LOG_ENV: &str = "STOCYCLE_LOG";

#[derive(Parser)]
#[command(
    name = "stocycle",
    version,
    about = "Simulate and verify stochastic-cycle time series"
)]
struct Cli {
    /// Worker threads for replications. Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one or more paths of a model.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        t0: i64,
        #[arg(long, default_value_t = 1)]
        paths: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Theoretical autocovariance.
    TheoAcf {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 50)]
        tau_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample autocovariance of simulated or supplied data.
    EmpAcf {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 50)]
        tau_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Theoretical spectral density on a uniform grid over [0, pi].
    Psd {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 513)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Periodogram, averaged over simulated paths; Fourier frequencies unless `--grid` is given.
    Periodogram {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inverse coefficient of variation of an amplitude law.
    Icv {
        #[command(flatten)]
        family: FamilyArg,
        /// Also estimate it from this many sampled amplitudes.
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Amplitude density and distribution function.
    AmpPdf {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        xi_max: Option<f64>,
        #[arg(long, default_value_t = 401)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form product moment against Monte Carlo; exit 1 beyond 4 SE.
    Moment {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated lags, e.g. `0,1,1,2`.
        #[arg(long, allow_hyphen_values = true)]
        lags: String,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        t: i64,
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-time Monte-Carlo moments over a time grid with a drift verdict.
    DriftScan {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lags: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        t_min: i64,
        #[arg(long, default_value_t = 40, allow_hyphen_values = true)]
        t_max: i64,
        #[arg(long, default_value_t = 1)]
        t_step: usize,
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Engine-versus-Monte-Carlo oracle suite; exit 1 on any violation.
    Verify {
        /// Verify this model instead of the built-in suite.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Data either simulated from a model or read from a CSV column.
#[derive(Args)]
struct Source {
    #[arg(long, conflicts_with = "input")]
    spec: Option<PathBuf>,
    /// CSV with a header; the `y` column, else the second, else the first.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    paths: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct FamilyArg {
    /// `gaussian`, or `name:key=value,...` such as `student_t:nu=5,sigma=1`.
    #[arg(long, conflicts_with = "family_spec")]
    family: Option<String>,
    /// JSON file holding a spherical family.
    #[arg(long)]
    family_spec: Option<PathBuf>,
}

enum Failure {
    Config(anyhow::Error),
    Verification(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Config(e.into())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn log_level() -> u8 {
    match std::env::var(LOG_ENV).as_deref() {
        Ok("quiet") => 0,
        Ok("debug") => 2,
        Ok(_) | Err(_) => 1,
    }
}

fn info(msg: impl Display) {
    if log_level() >= 1 {
        eprintln!("{msg}");
    }
}

fn debug(msg: impl Display) {
    if log_level() >= 2 {
        eprintln!("debug: {msg}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    if let Some(t) = cli.threads {
        if t == 0 {
            need(false, "--threads must be at least 1")?;
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("building the worker pool")?;
    }
    debug(format_args!(
        "{} worker threads",
        rayon::current_num_threads()
    ));
    match cli.command {
        Command::Simulate {
            spec,
            n,
            seed,
            t0,
            paths,
            out,
        } => {
            let model = load_model(&spec)?;
            need(n >= 1, "--n must be at least 1")?;
            need(paths >= 1, "--paths must be at least 1")?;
            let ys = simulate_paths(&model, n, t0, paths, seed)?;
            let mut header = vec!["t".to_string()];
            if paths == 1 {
                header.push("y".into());
            } else {
                header.extend((0..paths).map(|k| format!("y{k}")));
            }
            let rows = (0..n).map(|i| {
                let mut r = vec![(t0 + i as i64).to_string()];
                r.extend(ys.iter().map(|y| y[i].to_string()));
                r
            });
            emit(out.as_deref(), &csv(&header, rows))
        }
        Command::TheoAcf { spec, tau_max, out } => {
            let model = load_model(&spec)?;
            let acf = model.acf_sequence(tau_max)?;
            let rows = acf
                .iter()
                .enumerate()
                .map(|(k, v)| vec![k.to_string(), v.to_string()]);
            emit(out.as_deref(), &csv(&["tau", "acf"], rows))
        }
        Command::EmpAcf {
            source,
            tau_max,
            out,
        } => {
            let paths = source_paths(&source)?;
            let acfs = paths
                .iter()
                .map(|y| empirical_acf(y, tau_max))
                .collect::<stocycle::Result<Vec<_>>>()?;
            let k = acfs.len() as f64;
            let mut header = vec!["tau", "acf"];
            if acfs.len() > 1 {
                header.push("se");
            }
            let rows = (0..=tau_max).map(|tau| {
                let mean = acfs.iter().map(|a| a[tau]).sum::<f64>() / k;
                let mut r = vec![tau.to_string(), mean.to_string()];
                if acfs.len() > 1 {
                    let var = acfs.iter().map(|a| (a[tau] - mean).powi(2)).sum::<f64>() / (k - 1.0);
                    r.push((var / k).sqrt().to_string());
                }
                r
            });
            emit(out.as_deref(), &csv(&header, rows))
        }
        Command::Psd { spec, grid, out } => {
            let model = load_model(&spec)?;
            let f = model.psd(&uniform_grid(grid)?)?;
            emit(out.as_deref(), &curve_csv(&f, "psd"))
        }
        Command::Periodogram { source, grid, out } => {
            let paths = source_paths(&source)?;
            let grid = grid.map(uniform_grid).transpose()?;
            let curves = paths
                .iter()
                .map(|y| match &grid {
                    Some(g) => periodogram(y, g),
                    None => periodogram_fft(y),
                })
                .collect::<stocycle::Result<Vec<SpectralCurve>>>()?;
            emit(
                out.as_deref(),
                &curve_csv(&average_curves(&curves)?, "periodogram"),
            )
        }
        Command::Icv {
            family,
            draws,
            seed,
        } => {
            let law = AmplitudeLaw::new(load_family(&family)?)?;
            let analytic = law.icv()?;
            match draws {
                None => emit(None, &format!("{analytic:.12}\n")),
                Some(d) => {
                    let seed = seed.ok_or_else(|| anyhow!("--seed is required with --draws"))?;
                    let xs = replicate(seed, d, |rng, _| law.sample(rng));
                    let est = empirical_icv(&xs)?;
                    let z = (est.icv - analytic).abs() / est.se;
                    let report = IcvReport {
                        analytic,
                        empirical: est.icv,
                        se: est.se,
                        z,
                        draws: d,
                        seed,
                    };
                    emit(None, &json(&report)?)
                }
            }
        }
        Command::AmpPdf {
            family,
            xi_max,
            points,
            out,
        } => {
            let law = AmplitudeLaw::new(load_family(&family)?)?;
            need(points >= 2, "--points must be at least 2")?;
            let hi = match xi_max {
                Some(x) => x,
                None => {
                    let m = law.mean()?;
                    m + 10.0 * (law.second_moment()? - m * m).max(0.0).sqrt()
                }
            };
            need(
                hi.is_finite() && hi > 0.0,
                "--xi-max must be positive and finite",
            )?;
            let mut rows = Vec::with_capacity(points);
            for i in 0..points {
                let xi = hi * i as f64 / (points - 1) as f64;
                rows.push(vec![
                    xi.to_string(),
                    law.pdf(xi)?.to_string(),
                    law.cdf(xi)?.to_string(),
                ]);
            }
            emit(
                out.as_deref(),
                &csv(&["xi", "pdf", "cdf"], rows.into_iter()),
            )
        }
        Command::Moment {
            spec,
            lags,
            order,
            t,
            reps,
            seed,
            out,
        } => {
            let model = load_model(&spec)?;
            let seed = seed.ok_or_else(|| anyhow!("--seed is required"))?;
            let lags = parse_lags(&lags)?;
            if let Some(s) = order {
                need(
                    s == lags.order(),
                    &format!("--order {s} does not match {} lags", lags.order()),
                )?;
            }
            let c = check("moment", &model, lags.lags(), t, reps, seed)?;
            let pass = c.pass;
            let z = c.z;
            emit(
                out.as_deref(),
                &json(&MomentOutput {
                    replications: reps,
                    seed,
                    threshold: VERIFY_THRESHOLD,
                    check: c,
                })?,
            )?;
            if pass {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "Monte-Carlo estimate is {z:.2} SE from the engine value"
                )))
            }
        }
        Command::DriftScan {
            spec,
            lags,
            t_min,
            t_max,
            t_step,
            reps,
            seed,
            out,
        } => {
            let model = load_model(&spec)?;
            let seed = seed.ok_or_else(|| anyhow!("--seed is required"))?;
            need(t_step >= 1, "--t-step must be at least 1")?;
            need(t_max >= t_min, "--t-max must not be below --t-min")?;
            let grid: Vec<i64> = (t_min..=t_max).step_by(t_step).collect();
            let scan = moment_drift_scan(&model, &parse_lags(&lags)?, &grid, reps, seed)?;
            emit(out.as_deref(), &json(&scan)?)
        }
        Command::Verify {
            spec,
            reps,
            seed,
            out,
        } => {
            let seed = seed.ok_or_else(|| anyhow!("--seed is required"))?;
            let report = match spec {
                Some(p) => model_suite(&load_model(&p)?, reps, seed)?,
                None => builtin_suite(reps, seed)?,
            };
            for c in &report.checks {
                debug(format_args!(
                    "{} {:?} t={} z={:.2}",
                    c.name, c.lags, c.t, c.z
                ));
            }
            emit(out.as_deref(), &json(&report)?)?;
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            info(format_args!(
                "{} of {} checks within {VERIFY_THRESHOLD} SE",
                report.checks.len() - failed,
                report.checks.len()
            ));
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "{failed} checks beyond {VERIFY_THRESHOLD} SE"
                )))
            }
        }
    }
}

#[derive(Serialize)]
struct IcvReport {
    analytic: f64,
    empirical: f64,
    se: f64,
    z: f64,
    draws: usize,
    seed: u64,
}

#[derive(Serialize)]
struct MomentOutput {
    replications: usize,
    seed: u64,
    threshold: f64,
    #[serde(flatten)]
    check: stocycle::verify::Check,
}

fn need(cond: bool, msg: &str) -> anyhow::Result<()> {
    if cond {
        Ok(())
    } else {
        Err(anyhow!("{msg}"))
    }
}

/// Parses `bytes` into `T`, reporting the path of the offending field.
fn parse_json<T: DeserializeOwned>(bytes: &[u8], origin: &str) -> anyhow::Result<T> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." || path == "?" {
            anyhow!("{origin}: {}", e.inner())
        } else {
            anyhow!("{origin}: at {path}: {}", e.inner())
        }
    })
}

fn load_model(path: &Path) -> anyhow::Result<ProcessSpec> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let origin = path.display().to_string();
    let model: ProcessSpec = parse_json(&bytes, &origin).map_err(|e| {
        // tagged enums hide the field path; re-parse the selected variant to recover it
        let located = serde_json::from_slice::<serde_json::Value>(&bytes)
            .ok()
            .and_then(|v| locate_model_error(v, "").err());
        located.map_or(e, |(at, msg)| anyhow!("{origin}: at {at}: {msg}"))
    })?;
    model
        .validate()
        .with_context(|| format!("{}: invalid model", path.display()))?;
    Ok(model)
}

type Located = std::result::Result<(), (String, String)>;

fn join_path(prefix: &str, rest: &str) -> String {
    match (prefix.is_empty(), rest) {
        (true, _) => rest.to_string(),
        (false, ".") => prefix.to_string(),
        (false, r) if r.starts_with('[') => format!("{prefix}{r}"),
        (false, r) => format!("{prefix}.{r}"),
    }
}

fn locate_as<T: DeserializeOwned>(v: serde_json::Value, prefix: &str) -> Located {
    serde_path_to_error::deserialize::<_, T>(v)
        .map(|_| ())
        .map_err(|e| {
            (
                join_path(prefix, &e.path().to_string()),
                e.inner().to_string(),
            )
        })
}

/// Removes the tag `key` from the object `v` and returns it.
fn take_tag(
    v: &mut serde_json::Value,
    key: &str,
    prefix: &str,
) -> std::result::Result<String, (String, String)> {
    let at = if prefix.is_empty() {
        ".".to_string()
    } else {
        prefix.to_string()
    };
    let obj = v
        .as_object_mut()
        .ok_or_else(|| (at.clone(), "expected an object".to_string()))?;
    match obj.remove(key) {
        Some(serde_json::Value::String(s)) => Ok(s),
        Some(_) => Err((join_path(prefix, key), "expected a string".into())),
        None => Err((at, format!("missing field `{key}`"))),
    }
}

/// Finds the innermost path of a model-spec error by deserializing the
/// variant that the `model` and `kind` tags select.
fn locate_model_error(mut v: serde_json::Value, prefix: &str) -> Located {
    use stocycle::cycles::{
        CompanionSpec, FswpSpec, HannanSpec, LayeredCycleSpec, NthOrderSpec, StochasticCycleSpec,
    };
    use stocycle::lab::CounterexampleSpec;
    use stocycle::linear::{ArmaSpec, FracDiffSpec};
    use stocycle::modulated::ModulatedCycleSpec;
    let tag = take_tag(&mut v, "model", prefix)?;
    match tag.as_str() {
        "hannan" => locate_as::<HannanSpec>(v, prefix),
        "stochastic_cycle" => locate_as::<StochasticCycleSpec>(v, prefix),
        "nth_order" => locate_as::<NthOrderSpec>(v, prefix),
        "fswp" => locate_as::<FswpSpec>(v, prefix),
        "layered" => locate_as::<LayeredCycleSpec>(v, prefix),
        "modulated" => locate_as::<ModulatedCycleSpec>(v, prefix),
        "counterexample" => locate_as::<CounterexampleSpec>(v, prefix),
        "companion" => locate_as::<CompanionSpec>(v, prefix),
        "linear" => match take_tag(&mut v, "kind", prefix)?.as_str() {
            "arma" => locate_as::<ArmaSpec>(v, prefix),
            "frac_diff" => locate_as::<FracDiffSpec>(v, prefix),
            other => Err((
                join_path(prefix, "kind"),
                format!("unknown linear kind `{other}`"),
            )),
        },
        "sum" => {
            let obj = v.as_object_mut().expect("checked by take_tag");
            let comps = match obj.remove("components") {
                Some(serde_json::Value::Array(c)) => c,
                Some(_) => {
                    return Err((join_path(prefix, "components"), "expected an array".into()))
                }
                None => return Err((join_path(prefix, "."), "missing field `components`".into())),
            };
            if let Some(k) = obj.keys().next() {
                return Err((join_path(prefix, k), format!("unknown field `{k}`")));
            }
            for (i, c) in comps.into_iter().enumerate() {
                locate_model_error(
                    c,
                    &format!(
                        "{}components[{i}]",
                        if prefix.is_empty() {
                            String::new()
                        } else {
                            format!("{prefix}.")
                        }
                    ),
                )?;
            }
            Ok(())
        }
        other => Err((
            join_path(prefix, "model"),
            format!("unknown model `{other}`"),
        )),
    }
}

fn load_family(arg: &FamilyArg) -> anyhow::Result<SphericalFamily> {
    let family: SphericalFamily = match (&arg.family, &arg.family_spec) {
        (Some(s), None) => parse_family(s)?,
        (None, Some(p)) => {
            let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            parse_json(&bytes, &p.display().to_string())?
        }
        _ => bail!("exactly one of --family and --family-spec is required"),
    };
    family.validate()?;
    Ok(family)
}

/// `gaussian` is the unit isotropic Gaussian; otherwise `name[:key=value,...]`
/// becomes the object `{"family": name, key: value, ...}`.
fn parse_family(s: &str) -> anyhow::Result<SphericalFamily> {
    if s == "gaussian" {
        return Ok(SphericalFamily::GaussianIso { sigma: 1.0 });
    }
    let (name, params) = s.split_once(':').unwrap_or((s, ""));
    let mut obj = serde_json::Map::new();
    obj.insert("family".into(), serde_json::Value::String(name.into()));
    for kv in params.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| anyhow!("--family: expected key=value, got `{kv}`"))?;
        let v: serde_json::Value = serde_json::from_str(v)
            .map_err(|_| anyhow!("--family: `{k}` needs a numeric value, got `{v}`"))?;
        obj.insert(k.into(), v);
    }
    parse_json(serde_json::to_string(&obj)?.as_bytes(), "--family")
}

fn parse_lags(s: &str) -> anyhow::Result<LagPattern> {
    let lags = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| anyhow!("--lags: `{x}` is not an integer"))
        })
        .collect::<anyhow::Result<Vec<i64>>>()?;
    Ok(LagPattern::new(lags)?)
}

/// Path `k` draws from stream `k` of `seed`.
fn simulate_paths(
    model: &ProcessSpec,
    n: usize,
    t0: i64,
    paths: usize,
    seed: u64,
) -> anyhow::Result<Vec<Vec<f64>>> {
    Ok(
        replicate(seed, paths, |rng, _| model.simulate_with(rng, n, t0))
            .into_iter()
            .collect::<stocycle::Result<_>>()?,
    )
}

fn source_paths(src: &Source) -> anyhow::Result<Vec<Vec<f64>>> {
    match (&src.spec, &src.input) {
        (Some(p), None) => {
            let model = load_model(p)?;
            let seed = src
                .seed
                .ok_or_else(|| anyhow!("--seed is required when simulating"))?;
            need(src.n >= 1, "--n must be at least 1")?;
            need(src.paths >= 1, "--paths must be at least 1")?;
            simulate_paths(&model, src.n, 0, src.paths, seed)
        }
        (None, Some(p)) => Ok(vec![read_column(p)?]),
        _ => bail!("exactly one of --spec and --input is required"),
    }
}

fn read_column(path: &Path) -> anyhow::Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| anyhow!("{}: empty file", path.display()))?
        .split(',')
        .collect();
    let col = header
        .iter()
        .position(|h| h.trim() == "y")
        .unwrap_or(if header.len() > 1 { 1 } else { 0 });
    lines
        .enumerate()
        .map(|(i, l)| {
            let cell = l
                .split(',')
                .nth(col)
                .ok_or_else(|| anyhow!("{}: line {} is short", path.display(), i + 2))?;
            cell.trim().parse::<f64>().map_err(|_| {
                anyhow!(
                    "{}: line {}: `{cell}` is not a number",
                    path.display(),
                    i + 2
                )
            })
        })
        .collect()
}

/// Header row, then one row per record; LF line endings. Floats use the
/// shortest decimal that reads back to the same value.
fn csv<H: AsRef<str>>(header: &[H], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut s = header
        .iter()
        .map(|h| h.as_ref())
        .collect::<Vec<_>>()
        .join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn curve_csv(c: &SpectralCurve, name: &str) -> String {
    csv(
        &["omega", name],
        c.omega
            .iter()
            .zip(&c.values)
            .map(|(w, v)| vec![w.to_string(), v.to_string()]),
    )
}

fn json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn emit(out: Option<&Path>, content: &str) -> Outcome {
    match out {
        Some(p) => {
            fs::write(p, content).with_context(|| format!("writing {}", p.display()))?;
            debug(format_args!("wrote {}", p.display()));
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
