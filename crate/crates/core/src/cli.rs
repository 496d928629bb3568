//! Command-line front end: `profile`, `verify`, `stability` and `simulate`.
//!
//! Parameters come from flags, optionally layered over a `key=value` file
//! given with `--config` (flags win, unknown keys are rejected). Exit codes:
//! 0 success, 1 check failure, 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::fourier::{analytic_coeffs, compare_coeffs, dft_coeffs, pf2_check};
use crate::pde::{recommended_settings, stability_experiment, write_diagnostics_csv, ExperimentConfig, Perturbation};
use crate::stability::{
    cn2_sweep, cn4_norm_derivative, gegenbauer_verdict, kdv_soliton_report, write_reports_csv, CnoidalMode,
    GegenbauerSeriesSpec, StabilityReport, Verdict,
};
use crate::waves::{
    build_fifth_order_cnoidal, build_fifth_order_soliton, build_kdv_cnoidal, build_kdv_soliton,
    conservation_residuals_with, Family, WaveProfile, DEFAULT_SAMPLES,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Tolerances of the `verify` battery.
pub const FIRST_LAW_TOL: f64 = 1e-6;
pub const SECOND_LAW_TOL: f64 = 1e-4;
pub const COEFF_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "kdv5", version, about = "Traveling waves of the fifth-order KdV equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a wave profile and print its derived quantities.
    Profile(Overrides),
    /// Check conservation laws, Fourier coefficients and PF(2).
    Verify(Overrides),
    /// Evaluate the stability functional over a grid of speeds.
    Stability(Overrides),
    /// Evolve a (perturbed) wave and record orbital distances.
    Simulate(Overrides),
}

/// Every parameter, as given on the command line or in a config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// fifth-soliton, kdv-soliton, kdv-cnoidal or fifth-cnoidal.
    #[arg(long)]
    family: Option<String>,
    /// Nonlinear coefficient γ [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Third-order dispersion α [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Fifth-order dispersion β [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Linear advection C, used by `simulate` [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    cee: Option<f64>,
    /// Wave speed c [default: 1; `stability` sweeps 0.5,1,2 when absent].
    #[arg(long = "c", allow_negative_numbers = true)]
    speed: Option<f64>,
    /// Comma-separated speeds for `stability`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    speeds: Option<Vec<f64>>,
    /// Flux constant 𝒜 of the KdV cnoidal wave [default: 1].
    #[arg(long = "A", allow_negative_numbers = true)]
    flux_a: Option<f64>,
    /// fixed-flux or fixed-period [default: fixed-flux].
    #[arg(long)]
    mode: Option<String>,
    /// Grid size for `simulate`, a power of two [default: per family].
    #[arg(long = "gridN")]
    grid_n: Option<usize>,
    /// Time-step cap for `simulate` [default: per family].
    #[arg(long)]
    dt: Option<f64>,
    /// Horizon in characteristic times [default: 10].
    #[arg(long)]
    horizon: Option<f64>,
    /// none, scale:ε, mode:ε or noise:ε [default: none].
    #[arg(long)]
    perturb: Option<String>,
    /// Seed for noise perturbations [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Terms of the Gegenbauer series [default: 200].
    #[arg(long)]
    jmax: Option<usize>,
    /// Profile samples [default: 2048 for profile, 4096 for verify].
    #[arg(long)]
    samples: Option<usize>,
    /// Largest |n| for coefficient checks [default: 12].
    #[arg(long)]
    truncation: Option<usize>,
    /// Multiplies the speed used in the conservation check [default: 1].
    #[arg(long = "speed-scale", allow_negative_numbers = true)]
    speed_scale: Option<f64>,
    /// Worker threads for sweeps [default: 1].
    #[arg(long)]
    jobs: Option<usize>,
    /// Output path prefix [default: kdv5].
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

pub const CONFIG_KEYS: [&str; 20] = [
    "family",
    "gamma",
    "alpha",
    "beta",
    "cee",
    "c",
    "speeds",
    "A",
    "mode",
    "gridN",
    "dt",
    "horizon",
    "perturb",
    "seed",
    "jmax",
    "samples",
    "truncation",
    "speed-scale",
    "jobs",
    "out",
];

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

impl Overrides {
    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got {line:?}", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "family" => o.family = Some(value.to_string()),
                "gamma" => o.gamma = Some(parse_value(key, value)?),
                "alpha" => o.alpha = Some(parse_value(key, value)?),
                "beta" => o.beta = Some(parse_value(key, value)?),
                "cee" => o.cee = Some(parse_value(key, value)?),
                "c" => o.speed = Some(parse_value(key, value)?),
                "speeds" => {
                    o.speeds = Some(value.split(',').map(|v| parse_value(key, v.trim())).collect::<Result<_>>()?)
                }
                "A" => o.flux_a = Some(parse_value(key, value)?),
                "mode" => o.mode = Some(value.to_string()),
                "gridN" => o.grid_n = Some(parse_value(key, value)?),
                "dt" => o.dt = Some(parse_value(key, value)?),
                "horizon" => o.horizon = Some(parse_value(key, value)?),
                "perturb" => o.perturb = Some(value.to_string()),
                "seed" => o.seed = Some(parse_value(key, value)?),
                "jmax" => o.jmax = Some(parse_value(key, value)?),
                "samples" => o.samples = Some(parse_value(key, value)?),
                "truncation" => o.truncation = Some(parse_value(key, value)?),
                "speed-scale" => o.speed_scale = Some(parse_value(key, value)?),
                "jobs" => o.jobs = Some(parse_value(key, value)?),
                "out" => o.out = Some(PathBuf::from(value)),
                _ => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key {key:?} (known: {})",
                        lineno + 1,
                        CONFIG_KEYS.join(", ")
                    )))
                }
            }
        }
        Ok(o)
    }

    /// Fields set in `self` win over those in `base`.
    fn over(self, base: Overrides) -> Overrides {
        Overrides {
            family: self.family.or(base.family),
            gamma: self.gamma.or(base.gamma),
            alpha: self.alpha.or(base.alpha),
            beta: self.beta.or(base.beta),
            cee: self.cee.or(base.cee),
            speed: self.speed.or(base.speed),
            speeds: self.speeds.or(base.speeds),
            flux_a: self.flux_a.or(base.flux_a),
            mode: self.mode.or(base.mode),
            grid_n: self.grid_n.or(base.grid_n),
            dt: self.dt.or(base.dt),
            horizon: self.horizon.or(base.horizon),
            perturb: self.perturb.or(base.perturb),
            seed: self.seed.or(base.seed),
            jmax: self.jmax.or(base.jmax),
            samples: self.samples.or(base.samples),
            truncation: self.truncation.or(base.truncation),
            speed_scale: self.speed_scale.or(base.speed_scale),
            jobs: self.jobs.or(base.jobs),
            out: self.out.or(base.out),
            config: None,
        }
    }

    fn resolve(self) -> Result<Settings> {
        let base = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
                Overrides::from_config_text(&text)?
            }
            None => Overrides::default(),
        };
        let o = self.over(base);
        let family = match o.family.as_deref() {
            None => return Err(Error::Config("missing required parameter --family".into())),
            Some(s) => Family::from_slug(s).ok_or_else(|| {
                Error::Config(format!(
                    "unknown --family {s:?} (fifth-soliton, kdv-soliton, kdv-cnoidal, fifth-cnoidal)"
                ))
            })?,
        };
        let mode = match o.mode.as_deref() {
            None => CnoidalMode::FixedFlux,
            Some(s) => CnoidalMode::from_slug(s)
                .ok_or_else(|| Error::Config(format!("unknown --mode {s:?} (fixed-flux, fixed-period)")))?,
        };
        let perturbation: Perturbation = o.perturb.as_deref().unwrap_or("none").parse()?;
        let (grid_n, dt) = recommended_settings(family);
        Ok(Settings {
            family,
            gamma: o.gamma.unwrap_or(1.0),
            alpha: o.alpha.unwrap_or(1.0),
            beta: o.beta.unwrap_or(1.0),
            cee: o.cee.unwrap_or(0.0),
            speed: o.speed,
            speeds: o.speeds,
            flux_a: o.flux_a.unwrap_or(1.0),
            mode,
            grid_n: o.grid_n.unwrap_or(grid_n),
            dt: o.dt.unwrap_or(dt),
            horizon: o.horizon.unwrap_or(10.0),
            perturbation,
            seed: o.seed.unwrap_or(0),
            jmax: o.jmax.unwrap_or(200),
            samples: o.samples,
            truncation: o.truncation.unwrap_or(12),
            speed_scale: o.speed_scale.unwrap_or(1.0),
            jobs: o.jobs.unwrap_or(1).max(1),
            out: o.out.unwrap_or_else(|| PathBuf::from("kdv5")),
        })
    }
}

/// Fully resolved parameters.
#[derive(Debug, Clone)]
pub struct Settings {
    pub family: Family,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub cee: f64,
    pub speed: Option<f64>,
    pub speeds: Option<Vec<f64>>,
    pub flux_a: f64,
    pub mode: CnoidalMode,
    pub grid_n: usize,
    pub dt: f64,
    pub horizon: f64,
    pub perturbation: Perturbation,
    pub seed: u64,
    pub jmax: usize,
    pub samples: Option<usize>,
    pub truncation: usize,
    pub speed_scale: f64,
    pub jobs: usize,
    pub out: PathBuf,
}

impl Settings {
    fn speed(&self) -> f64 {
        self.speed.unwrap_or(1.0)
    }

    fn speed_grid(&self) -> Vec<f64> {
        match (&self.speeds, self.speed) {
            (Some(v), _) => v.clone(),
            (None, Some(c)) => vec![c],
            (None, None) => vec![0.5, 1.0, 2.0],
        }
    }

    fn output(&self, suffix: &str) -> Result<BufWriter<File>> {
        let mut name = self.out.clone().into_os_string();
        name.push(format!("-{suffix}.csv"));
        let path = PathBuf::from(name);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        Ok(BufWriter::new(File::create(path)?))
    }
}

pub fn build_profile(s: &Settings, samples: usize) -> Result<WaveProfile> {
    let p = match s.family {
        Family::FifthOrderSoliton => build_fifth_order_soliton(s.gamma, s.alpha, s.beta)?,
        Family::KdvSoliton => build_kdv_soliton(s.gamma, s.alpha, s.speed())?,
        Family::KdvCnoidal => build_kdv_cnoidal(s.gamma, s.alpha, s.speed(), s.flux_a)?,
        Family::FifthOrderCnoidal => build_fifth_order_cnoidal(s.gamma, s.beta, s.speed())?,
    };
    if samples == p.samples().len() {
        Ok(p)
    } else {
        p.resampled(samples)
    }
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    CheckFailed(String),
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain { .. } | Error::DegenerateModulus { .. } | Error::Grid(_) => EXIT_USAGE,
        _ => EXIT_CHECK_FAILED,
    }
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let (overrides, cmd): (Overrides, fn(&Settings, &mut dyn Write) -> Result<Outcome>) = match cli.command {
        Command::Profile(o) => (o, cmd_profile),
        Command::Verify(o) => (o, cmd_verify),
        Command::Stability(o) => (o, cmd_stability),
        Command::Simulate(o) => (o, cmd_simulate),
    };
    let result = overrides.resolve().and_then(|s| cmd(&s, out));
    match result {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::CheckFailed(name)) => {
            let _ = writeln!(err, "check failed: {name}");
            EXIT_CHECK_FAILED
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code_for(&e)
        }
    }
}

fn cmd_profile(s: &Settings, out: &mut dyn Write) -> Result<Outcome> {
    let p = build_profile(s, s.samples.unwrap_or(DEFAULT_SAMPLES))?;
    let m = &p.params;
    writeln!(out, "family = {}", p.family)?;
    writeln!(out, "gamma = {:?}", m.gamma)?;
    writeln!(out, "alpha = {:?}", m.alpha)?;
    writeln!(out, "beta = {:?}", m.beta)?;
    writeln!(out, "speed = {:?}", m.speed)?;
    writeln!(out, "amplitude = {:?}", p.amplitude())?;
    writeln!(out, "flux_A = {:?}", m.flux_a)?;
    writeln!(out, "flux_B = {:?}", m.flux_b)?;
    if let Some(cn) = &p.cnoidal {
        if let Some(d) = cn.delta {
            writeln!(out, "delta = {d:?}")?;
        }
        if let Some(e) = cn.emm {
            writeln!(out, "M = {e:?}")?;
        }
        writeln!(out, "modulus = {:?}", cn.modulus)?;
        writeln!(out, "wavelength = {:?}", cn.wavelength)?;
    } else {
        writeln!(out, "width = {:?}", p.characteristic_width())?;
    }
    p.write_csv(s.output("profile")?)?;
    Ok(Outcome::Ok)
}

/// One line of the `verify` battery.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: &'static str, value: f64, tolerance: f64) -> Self {
        Check {
            name,
            value,
            tolerance,
            passed: value < tolerance,
        }
    }
}

/// Conservation residuals (with the speed multiplied by `speed_scale`),
/// analytic against discrete Fourier coefficients and PF(2) for `|n| <= truncation`.
pub fn verification_battery(
    profile: &WaveProfile,
    speed_scale: f64,
    truncation: usize,
    mut sink: Option<&mut dyn FnMut(&str, &dyn Fn(&mut dyn Write) -> Result<()>) -> Result<()>>,
) -> Result<Vec<Check>> {
    let mut params = profile.params;
    params.speed *= speed_scale;
    let r = conservation_residuals_with(profile, &params)?;
    let (a, b) = (profile.params.flux_a, profile.params.flux_b);
    let mut checks = vec![
        Check::below("first-law deviation", r.std_a() / r.scale_a, FIRST_LAW_TOL),
        Check::below("first-law mean", (r.mean_a - a).abs(), FIRST_LAW_TOL),
        Check::below("second-law deviation", r.std_b() / r.scale_b, SECOND_LAW_TOL),
        Check::below("second-law mean", (r.mean_b - b).abs(), SECOND_LAW_TOL),
    ];
    if let Some(f) = sink.as_mut() {
        f("residuals", &|w| r.write_csv(w))?;
    }
    if profile.family.is_periodic() {
        let analytic = analytic_coeffs(profile, 2 * truncation)?;
        let cmp = compare_coeffs(&analytic, &dft_coeffs(profile, truncation)?, truncation);
        checks.push(Check::below("coefficient match", cmp.max_rel_err, COEFF_TOL));
        let pf2 = pf2_check(&analytic, truncation)?;
        checks.push(Check {
            name: "PF(2)",
            value: pf2.min_minor / pf2.scale,
            tolerance: -crate::fourier::PF2_TOLERANCE,
            passed: pf2.passed,
        });
        if let Some(f) = sink.as_mut() {
            f("coefficients", &|w| cmp.write_csv(w))?;
        }
    }
    Ok(checks)
}

fn cmd_verify(s: &Settings, out: &mut dyn Write) -> Result<Outcome> {
    let p = build_profile(s, s.samples.unwrap_or(4096))?;
    let mut sink = |suffix: &str, write: &dyn Fn(&mut dyn Write) -> Result<()>| -> Result<()> {
        let mut f = s.output(suffix)?;
        write(&mut f)?;
        f.flush()?;
        Ok(())
    };
    let checks = verification_battery(&p, s.speed_scale, s.truncation, Some(&mut sink))?;
    for c in &checks {
        writeln!(
            out,
            "{} {}: {:?} (tolerance {:?})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        )?;
    }
    Ok(match checks.iter().find(|c| !c.passed) {
        Some(c) => Outcome::CheckFailed(c.name.to_string()),
        None => Outcome::Ok,
    })
}

fn cmd_stability(s: &Settings, out: &mut dyn Write) -> Result<Outcome> {
    if s.family == Family::FifthOrderSoliton {
        let r = gegenbauer_verdict(&GegenbauerSeriesSpec::fifth_order(s.gamma), s.jmax)?;
        writeln!(out, "|b0| = {:?}", r.b0().abs())?;
        writeln!(out, "sum_(j=1..{}) b_j = {:?}", s.jmax, r.positive_sum())?;
        writeln!(out, "tail bound = {:?}", r.tail_bound)?;
        writeln!(out, "sum + tail bound = {:?}", r.positive_sum() + r.tail_bound)?;
        writeln!(out, "I = {:?}", r.functional_i)?;
        writeln!(out, "verdict: {}", r.verdict)?;
        r.write_csv(s.output("gegenbauer")?)?;
        return Ok(match r.verdict {
            Verdict::NotSatisfied => Outcome::CheckFailed("Gegenbauer series sign".into()),
            _ => Outcome::Ok,
        });
    }
    let speeds = s.speed_grid();
    let reports: Vec<StabilityReport> = match s.family {
        Family::KdvSoliton => speeds
            .iter()
            .map(|&c| kdv_soliton_report(s.gamma, s.alpha, c))
            .collect::<Result<_>>()?,
        Family::KdvCnoidal => cn2_sweep(s.gamma, s.alpha, s.flux_a, &speeds, s.mode, s.jobs)?,
        Family::FifthOrderCnoidal => speeds
            .iter()
            .map(|&c| cn4_norm_derivative(s.gamma, s.beta, c))
            .collect::<Result<_>>()?,
        Family::FifthOrderSoliton => unreachable!(),
    };
    for r in &reports {
        writeln!(out, "d/dc ||phi_c||^2 = {:?} at c = {:?}", r.derivative, r.speed)?;
        writeln!(out, "  {}", r.summary())?;
    }
    write_reports_csv(&reports, s.output("stability")?)?;
    Ok(match reports.iter().find(|r| r.verdict == Verdict::NotSatisfied) {
        Some(r) => Outcome::CheckFailed(format!("stability condition at c = {:?}", r.speed)),
        None => Outcome::Ok,
    })
}

fn cmd_simulate(s: &Settings, out: &mut dyn Write) -> Result<Outcome> {
    let p = build_profile(s, DEFAULT_SAMPLES)?;
    let config = ExperimentConfig {
        grid_n: s.grid_n,
        dt: s.dt,
        horizon: s.horizon,
        perturbation: s.perturbation,
        seed: s.seed,
        cee: s.cee,
        ..ExperimentConfig::default()
    };
    let r = stability_experiment(&p, &config)?;
    writeln!(out, "family = {} perturbation = {} gridN = {}", p.family, s.perturbation, s.grid_n)?;
    writeln!(out, "{}", r.summary())?;
    writeln!(out, "max distH2 / amplitude = {:?}", r.max_h2() / r.amplitude)?;
    if r.any_ambiguous() {
        writeln!(out, "warning: two shift minima within 1% at some recorded time")?;
    }
    write_diagnostics_csv(&r.records, s.output("diagnostics")?)?;
    r.final_state.write_snapshot(s.output("snapshot")?)?;
    Ok(Outcome::Ok)
}

/// Path of the CSV a command writes for `suffix` under prefix `out`.
pub fn output_path(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.to_path_buf().into_os_string();
    name.push(format!("-{suffix}.csv"));
    PathBuf::from(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("kdv5").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(matches!(Overrides::from_config_text("colour = red"), Err(Error::Config(_))));
        assert!(Overrides::from_config_text("gamma = x").is_err());
        let o = Overrides::from_config_text("# sweep\nfamily = kdv-soliton\n\nc=2\nspeeds = 0.5, 1").unwrap();
        assert_eq!(o.family.as_deref(), Some("kdv-soliton"));
        assert_eq!(o.speed, Some(2.0));
        assert_eq!(o.speeds, Some(vec![0.5, 1.0]));
    }

    #[test]
    fn flags_override_config() {
        let flags = Overrides {
            gamma: Some(3.0),
            ..Default::default()
        };
        let file = Overrides::from_config_text("family=kdv-soliton\ngamma=2\nalpha=5").unwrap();
        let s = flags.over(file).resolve().unwrap();
        assert_eq!((s.gamma, s.alpha), (3.0, 5.0));
        assert_eq!(s.family, Family::KdvSoliton);
    }

    #[test]
    fn missing_family_is_a_usage_error() {
        let (code, _, err) = run_str(&["profile", "--gamma", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--family"));
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        assert_eq!(run_str(&["profile", "--colour", "1"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn battery_passes_for_every_family() {
        for family in Family::ALL {
            let s = Overrides {
                family: Some(family.slug().into()),
                ..Default::default()
            }
            .resolve()
            .unwrap();
            let p = build_profile(&s, 4096).unwrap();
            let checks = verification_battery(&p, 1.0, 12, None).unwrap();
            assert!(checks.iter().all(|c| c.passed), "{family}: {checks:?}");
            assert_eq!(checks.len(), if family.is_periodic() { 6 } else { 4 });
        }
    }

    #[test]
    fn corrupted_speed_fails_first_law() {
        let p = build_fifth_order_soliton(1.0, 1.0, 1.0).unwrap().resampled(4096).unwrap();
        let checks = verification_battery(&p, 1.1, 12, None).unwrap();
        let first = checks.iter().find(|c| !c.passed).unwrap();
        assert_eq!(first.name, "first-law deviation");
    }
}
