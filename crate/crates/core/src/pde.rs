//! Periodic pseudospectral solver and orbital distances.
//!
//! `u_t + C u_x + γ u u_x + α u_xxx = β u_xxxxx` is advanced with an
//! integrating-factor RK4 scheme: the linear symbol `i(-Cκ + ακ³ + βκ⁵)` is
//! propagated exactly and `γ u u_x = (γ/2)(u²)_x` is evaluated on a 3/2
//! zero-padded grid. Advection by the (conserved) mean `ū` is moved into the
//! linear symbol, which adds `-γūκ`.
//!
//! Sobolev norms use `‖f‖²_{H^s} = |Ω| Σ_κ (1+κ²)^s |f̂(κ)|²` with
//! `f̂ = DFT(f)/N`, so `s = 0` is the grid approximation of `∫ f²`.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{mode_index, wavenumbers, FftPair};
use crate::waves::{Family, MediumParams, WaveProfile};

/// Growth factor of `max|u|` treated as blow-up.
pub const BLOW_UP_FACTOR: f64 = 100.0;
/// Smallest grid allowed when `β ≠ 0`.
pub const MIN_FIFTH_ORDER_GRID: usize = 256;
/// Upper bound on the default time step.
pub const DEFAULT_DT_CAP: f64 = 0.05;

/// Grid size and time-step cap for experiments on each family's own box.
///
/// Besides `0.5 Δx / max|γu|`, the integrating-factor scheme needs `dt`
/// small against the dispersive phase differences between coupled modes,
/// roughly `dt ∝ 1/N²` for the KdV cnoidal wave; these caps come from
/// runs over ten characteristic times at the default parameters.
pub fn recommended_settings(family: Family) -> (usize, f64) {
    match family {
        Family::FifthOrderSoliton => (1024, 0.01),
        Family::KdvSoliton => (256, 0.002),
        Family::KdvCnoidal => (64, 5e-4),
        Family::FifthOrderCnoidal => (256, 2.5e-4),
    }
}

/// Uniform periodic grid `x_j = -D/2 + j D/N`.
pub fn periodic_grid(n: usize, domain_length: f64) -> Vec<f64> {
    let h = domain_length / n as f64;
    (0..n).map(|j| -0.5 * domain_length + j as f64 * h).collect()
}

fn validate_grid(n: usize, domain_length: f64, params: &MediumParams) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::Grid(format!("gridN must be a power of two of at least 8, got {n}")));
    }
    if params.beta != 0.0 && n < MIN_FIFTH_ORDER_GRID {
        return Err(Error::Grid(format!(
            "gridN must be at least {MIN_FIFTH_ORDER_GRID} when beta != 0, got {n}"
        )));
    }
    if !(domain_length > 0.0 && domain_length.is_finite()) {
        return Err(Error::Grid(format!("domain length must be positive, got {domain_length}")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct StepFactors {
    dt: f64,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
}

/// Solver state. The field is held as its (unnormalized) DFT.
#[derive(Debug, Clone)]
pub struct SpectralState {
    grid_n: usize,
    domain_length: f64,
    spectrum: Vec<Complex64>,
    time: f64,
    params: MediumParams,
    initial_amplitude: f64,
    kappa: Vec<f64>,
    symbol: Vec<Complex64>,
    fft: FftPair,
    padded: FftPair,
    factors: Option<StepFactors>,
}

impl SpectralState {
    /// Only `gamma`, `alpha`, `beta` and `cee` of `params` enter the dynamics.
    pub fn new(field: &[f64], domain_length: f64, params: MediumParams) -> Result<Self> {
        let n = field.len();
        validate_grid(n, domain_length, &params)?;
        if field.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("initial field is not finite".into()));
        }
        let fft = FftPair::new(n);
        let mut spectrum = fft.forward_real(field);
        spectrum[n / 2] = Complex64::new(0.0, 0.0);
        let kappa = wavenumbers(n, domain_length);
        // the mean is invariant, so γ ū u_x joins the linear part
        let drift = params.cee + params.gamma * spectrum[0].re / n as f64;
        let symbol = kappa
            .iter()
            .map(|&k| Complex64::new(0.0, -drift * k + params.alpha * k.powi(3) + params.beta * k.powi(5)))
            .collect();
        Ok(Self {
            grid_n: n,
            domain_length,
            spectrum,
            time: 0.0,
            params,
            initial_amplitude: field.iter().fold(0.0, |m, v| m.max(v.abs())),
            kappa,
            symbol,
            fft,
            padded: FftPair::new(3 * n / 2),
            factors: None,
        })
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn params(&self) -> &MediumParams {
        &self.params
    }

    pub fn initial_amplitude(&self) -> f64 {
        self.initial_amplitude
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.kappa
    }

    pub fn grid(&self) -> Vec<f64> {
        periodic_grid(self.grid_n, self.domain_length)
    }

    pub fn field(&self) -> Vec<f64> {
        self.fft.inverse_real(&self.spectrum)
    }

    /// `∫ u dx`.
    pub fn mass(&self) -> f64 {
        self.domain_length * self.spectrum[0].re / self.grid_n as f64
    }

    /// `∫ u² dx`.
    pub fn momentum(&self) -> f64 {
        let n = self.grid_n as f64;
        self.domain_length * self.spectrum.iter().map(|c| c.norm_sqr()).sum::<f64>() / (n * n)
    }

    /// Largest `|û(κ) - conj(û(-κ))|` relative to `max |û|`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.grid_n;
        let scale = self.spectrum.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        (1..n)
            .map(|i| (self.spectrum[i] - self.spectrum[n - i].conj()).norm())
            .fold(self.spectrum[0].im.abs(), f64::max)
            / scale
    }

    /// `-(iγκ/2) F(v²)` for the zero-mean part `v` of the field, with
    /// 3/2-rule dealiasing.
    fn nonlinear(&self, spec: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid_n;
        let m = self.padded.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; n];
        if self.params.gamma == 0.0 {
            return out;
        }
        let up = m as f64 / n as f64;
        let mut pad = vec![zero; m];
        for i in 0..n {
            let mi = mode_index(i, n);
            if mi == 0 || mi == (n / 2) as i64 {
                continue;
            }
            let slot = if mi >= 0 { mi as usize } else { (m as i64 + mi) as usize };
            pad[slot] = spec[i] * up;
        }
        self.padded.inverse(&mut pad);
        for v in pad.iter_mut() {
            *v = Complex64::new(v.re * v.re, 0.0);
        }
        self.padded.forward(&mut pad);
        let down = n as f64 / m as f64;
        for i in 0..n {
            let mi = mode_index(i, n);
            if mi == (n / 2) as i64 {
                continue;
            }
            let slot = if mi >= 0 { mi as usize } else { (m as i64 + mi) as usize };
            out[i] = pad[slot] * down * Complex64::new(0.0, -0.5 * self.params.gamma * self.kappa[i]);
        }
        out
    }

    fn factors(&mut self, dt: f64) -> StepFactors {
        match &self.factors {
            Some(f) if f.dt == dt => f.clone(),
            _ => {
                let half: Vec<Complex64> = self.symbol.iter().map(|&l| (l * (0.5 * dt)).exp()).collect();
                let full = half.iter().map(|h| h * h).collect();
                let f = StepFactors { dt, half, full };
                self.factors = Some(f.clone());
                f
            }
        }
    }

    /// One integrating-factor RK4 step.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        let f = self.factors(dt);
        let u = &self.spectrum;
        let a = self.nonlinear(u);
        let ua: Vec<Complex64> = (0..u.len()).map(|i| f.half[i] * (u[i] + a[i] * (0.5 * dt))).collect();
        let b = self.nonlinear(&ua);
        let ub: Vec<Complex64> = (0..u.len()).map(|i| f.half[i] * u[i] + b[i] * (0.5 * dt)).collect();
        let c = self.nonlinear(&ub);
        let uc: Vec<Complex64> = (0..u.len()).map(|i| f.full[i] * u[i] + f.half[i] * c[i] * dt).collect();
        let d = self.nonlinear(&uc);
        let next: Vec<Complex64> = (0..u.len())
            .map(|i| f.full[i] * u[i] + (f.full[i] * a[i] + f.half[i] * (b[i] + c[i]) * 2.0 + d[i]) * (dt / 6.0))
            .collect();
        self.spectrum = next;
        self.time += dt;
        // max|u| <= Σ|û|/N; the field is only formed when the bound is exceeded
        let bound = self.spectrum.iter().map(|c| c.norm()).sum::<f64>() / self.grid_n as f64;
        let limit = BLOW_UP_FACTOR * self.initial_amplitude;
        if bound.is_nan() || (self.initial_amplitude > 0.0 && bound > limit) {
            let max_abs = self.field().iter().fold(0.0f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) });
            if max_abs.is_nan() || max_abs > limit {
                return Err(Error::BlowUp { time: self.time, max_abs });
            }
        }
        Ok(())
    }

    /// `min(0.5 Δx / max|γu|, cap)`.
    pub fn default_dt(&self, cap: f64) -> f64 {
        let h = self.domain_length / self.grid_n as f64;
        let speed = self.params.gamma.abs() * self.field().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if speed > 0.0 {
            (0.5 * h / speed).min(cap)
        } else {
            cap
        }
    }

    /// Advances to `t_end` in equal steps no longer than `dt`, recording at
    /// the start, every `record_every` steps and at the end.
    pub fn evolve(
        &mut self,
        t_end: f64,
        dt: f64,
        record_every: usize,
        reference: Option<&OrbitReference>,
    ) -> Result<Vec<DiagnosticsRecord>> {
        let span = t_end - self.time;
        if !(span >= 0.0) {
            return Err(Error::Config(format!("t_end {t_end} precedes current time {}", self.time)));
        }
        let steps = (span / dt).ceil() as usize;
        let h = if steps == 0 { 0.0 } else { span / steps as f64 };
        let every = record_every.max(1);
        let mut records = vec![self.diagnostics(reference)];
        for s in 1..=steps {
            self.step(h)?;
            if s % every == 0 || s == steps {
                records.push(self.diagnostics(reference));
            }
        }
        Ok(records)
    }

    pub fn diagnostics(&self, reference: Option<&OrbitReference>) -> DiagnosticsRecord {
        let (dist_h1, dist_h2, shift, ambiguous) = match reference {
            Some(r) => {
                let h1 = r.distance_spectrum(&self.spectrum, 1);
                let h2 = r.distance_spectrum(&self.spectrum, 2);
                (h1.distance, h2.distance, h2.shift, h1.ambiguous || h2.ambiguous)
            }
            None => (f64::NAN, f64::NAN, f64::NAN, false),
        };
        DiagnosticsRecord {
            time: self.time,
            mass: self.mass(),
            momentum: self.momentum(),
            dist_h1,
            dist_h2,
            shift,
            ambiguous,
        }
    }

    pub fn write_snapshot<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# time={:?}", self.time)?;
        writeln!(out, "x,u")?;
        for (x, u) in self.grid().iter().zip(self.field()) {
            writeln!(out, "{x:?},{u:?}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub mass: f64,
    pub momentum: f64,
    pub dist_h1: f64,
    pub dist_h2: f64,
    /// Shift `s` with `u ≈ φ(x - s)` under the H² distance.
    pub shift: f64,
    pub ambiguous: bool,
}

pub fn write_diagnostics_csv<W: Write>(records: &[DiagnosticsRecord], mut out: W) -> Result<()> {
    writeln!(out, "time,mass,momentum,distH1,distH2,shift")?;
    for r in records {
        writeln!(out, "{:?},{:?},{:?},{:?},{:?},{:?}", r.time, r.mass, r.momentum, r.dist_h1, r.dist_h2, r.shift)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Orbital distance

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitalDistance {
    pub distance: f64,
    /// `s` with `u ≈ φ(x - s)`.
    pub shift: f64,
    /// A second local minimum lies within 1% of the best one.
    pub ambiguous: bool,
}

/// `(1+κ²)^s`.
fn sobolev_weights(kappa: &[f64], order: u32) -> Vec<f64> {
    kappa.iter().map(|k| (1.0 + k * k).powi(order as i32)).collect()
}

/// Reference profile on a fixed periodic grid.
#[derive(Debug, Clone)]
pub struct OrbitReference {
    n: usize,
    domain_length: f64,
    kappa: Vec<f64>,
    spectrum: Vec<Complex64>,
    fft: FftPair,
}

impl OrbitReference {
    pub fn from_samples(samples: &[f64], domain_length: f64) -> Result<Self> {
        let n = samples.len();
        if n < 4 {
            return Err(Error::Grid(format!("need at least 4 samples, got {n}")));
        }
        let fft = FftPair::new(n);
        let mut spectrum = fft.forward_real(samples);
        if n % 2 == 0 {
            spectrum[n / 2] = Complex64::new(0.0, 0.0);
        }
        Ok(Self {
            n,
            domain_length,
            kappa: wavenumbers(n, domain_length),
            spectrum,
            fft,
        })
    }

    /// Samples `profile` on `periodic_grid(n, domain_length)`.
    pub fn from_profile(profile: &WaveProfile, n: usize, domain_length: f64) -> Result<Self> {
        let x = periodic_grid(n, domain_length);
        let u: Vec<f64> = x.iter().map(|&x| profile.eval(x)).collect();
        Self::from_samples(&u, domain_length)
    }

    pub fn norm(&self, order: u32) -> f64 {
        let w = sobolev_weights(&self.kappa, order);
        let n2 = (self.n * self.n) as f64;
        (self.domain_length * self.spectrum.iter().zip(&w).map(|(c, w)| w * c.norm_sqr()).sum::<f64>() / n2).sqrt()
    }

    pub fn distance(&self, field: &[f64], order: u32) -> Result<OrbitalDistance> {
        if field.len() != self.n {
            return Err(Error::Grid(format!("field has {} points, reference {}", field.len(), self.n)));
        }
        let mut spec = self.fft.forward_real(field);
        if self.n % 2 == 0 {
            spec[self.n / 2] = Complex64::new(0.0, 0.0);
        }
        Ok(self.distance_spectrum(&spec, order))
    }

    fn distance_sq_at(&self, spec: &[Complex64], w: &[f64], s: f64) -> f64 {
        let n2 = (self.n * self.n) as f64;
        let sum: f64 = (0..self.n)
            .map(|i| {
                let phase = Complex64::from_polar(1.0, -self.kappa[i] * s);
                w[i] * (spec[i] - self.spectrum[i] * phase).norm_sqr()
            })
            .sum();
        self.domain_length * sum / n2
    }

    /// Minimizes `‖u - φ(· - s)‖_{H^order}` over `s`: grid shifts from the
    /// cross-correlation, then golden-section search on the continuous shift.
    fn distance_spectrum(&self, spec: &[Complex64], order: u32) -> OrbitalDistance {
        let n = self.n;
        let h = self.domain_length / n as f64;
        let w = sobolev_weights(&self.kappa, order);
        let n2 = (n * n) as f64;
        let norm_u: f64 = spec.iter().zip(&w).map(|(c, w)| w * c.norm_sqr()).sum();
        let norm_p: f64 = self.spectrum.iter().zip(&w).map(|(c, w)| w * c.norm_sqr()).sum();
        // corr[m] = Σ w û conj(φ̂) e^{iκ m h}
        let mut corr: Vec<Complex64> = (0..n).map(|i| spec[i] * self.spectrum[i].conj() * w[i]).collect();
        self.fft.inverse(&mut corr);
        let grid_d2: Vec<f64> = corr
            .iter()
            .map(|c| (self.domain_length * (norm_u + norm_p - 2.0 * n as f64 * c.re) / n2).max(0.0))
            .collect();
        let mut minima: Vec<(usize, f64)> = (0..n)
            .filter(|&m| {
                let (l, r) = (grid_d2[(m + n - 1) % n], grid_d2[(m + 1) % n]);
                grid_d2[m] <= l && grid_d2[m] <= r
            })
            .map(|m| (m, grid_d2[m]))
            .collect();
        minima.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = minima[0].0;

        let shift_of = |m: usize| {
            let s = m as f64 * h;
            if s >= 0.5 * self.domain_length {
                s - self.domain_length
            } else {
                s
            }
        };
        let refine = |m: usize| -> (f64, f64) {
            let centre = shift_of(m);
            golden_section(|s| self.distance_sq_at(spec, &w, s), centre - h, centre + h)
        };
        let (s_best, d2_best) = refine(best);
        let ambiguous = minima.get(1).is_some_and(|&(m, _)| {
            let (_, d2) = refine(m);
            d2.sqrt() <= 1.01 * d2_best.sqrt()
        });
        OrbitalDistance {
            distance: d2_best.sqrt(),
            shift: s_best,
            ambiguous,
        }
    }
}

/// Minimizer and minimum of a unimodal `f` on `[a, b]`.
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let tol = 1e-13 * (b - a);
    for _ in 0..200 {
        if b - a < tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `‖u - φ(· - s)‖_{H^order}` minimized over `s`, for a field and a
/// reference sampled on the same periodic grid.
pub fn orbital_distance(field: &[f64], reference: &[f64], domain_length: f64, order: u32) -> Result<OrbitalDistance> {
    if order > 2 {
        return Err(Error::Config(format!("Sobolev order must be 0, 1 or 2, got {order}")));
    }
    OrbitReference::from_samples(reference, domain_length)?.distance(field, order)
}

/// `‖f‖_{H^order}` of a periodic sample set.
pub fn sobolev_norm(field: &[f64], domain_length: f64, order: u32) -> Result<f64> {
    Ok(OrbitReference::from_samples(field, domain_length)?.norm(order))
}

/// Translates periodic samples by `s` (`u(x) -> u(x - s)`) spectrally.
pub fn spectral_shift(field: &[f64], domain_length: f64, s: f64) -> Vec<f64> {
    let n = field.len();
    let fft = FftPair::new(n);
    let kappa = wavenumbers(n, domain_length);
    let mut spec = fft.forward_real(field);
    for (i, c) in spec.iter_mut().enumerate() {
        if n % 2 == 0 && i == n / 2 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c *= Complex64::from_polar(1.0, -kappa[i] * s);
        }
    }
    fft.inverse_real(&spec)
}

// ---------------------------------------------------------------------------
// Experiments

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perturbation {
    None,
    /// `(1+ε) φ`.
    Scale(f64),
    /// `φ + ε a cos(2πx/D)` with `a = max|φ|`.
    Mode(f64),
    /// `φ + ε a η` with `η` from [`band_limited_noise`].
    Noise(f64),
}

impl Perturbation {
    pub fn epsilon(&self) -> f64 {
        match *self {
            Perturbation::None => 0.0,
            Perturbation::Scale(e) | Perturbation::Mode(e) | Perturbation::Noise(e) => e,
        }
    }

    pub fn apply(&self, base: &[f64], domain_length: f64, seed: u64) -> Vec<f64> {
        let amp = base.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let n = base.len();
        match *self {
            Perturbation::None => base.to_vec(),
            Perturbation::Scale(e) => base.iter().map(|v| (1.0 + e) * v).collect(),
            Perturbation::Mode(e) => periodic_grid(n, domain_length)
                .iter()
                .zip(base)
                .map(|(x, v)| v + e * amp * (2.0 * PI * x / domain_length).cos())
                .collect(),
            Perturbation::Noise(e) => {
                let eta = band_limited_noise(n, seed);
                base.iter().zip(&eta).map(|(v, r)| v + e * amp * r).collect()
            }
        }
    }
}

impl FromStr for Perturbation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            return Ok(Perturbation::None);
        }
        let (kind, eps) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("perturbation must be none or kind:eps, got {s:?}")))?;
        let eps: f64 = eps
            .parse()
            .map_err(|_| Error::Config(format!("perturbation size {eps:?} is not a number")))?;
        match kind {
            "scale" => Ok(Perturbation::Scale(eps)),
            "mode" => Ok(Perturbation::Mode(eps)),
            "noise" => Ok(Perturbation::Noise(eps)),
            _ => Err(Error::Config(format!("unknown perturbation kind {kind:?} (scale, mode, noise)"))),
        }
    }
}

impl fmt::Display for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Perturbation::None => f.write_str("none"),
            Perturbation::Scale(e) => write!(f, "scale:{e}"),
            Perturbation::Mode(e) => write!(f, "mode:{e}"),
            Perturbation::Noise(e) => write!(f, "noise:{e}"),
        }
    }
}

/// Smooth real random field on `n` points: modes `1..=n/8` with random
/// coefficients under a Gaussian envelope of width `n/32` modes, zero mean,
/// `max|η| = 1`.
pub fn band_limited_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fft = FftPair::new(n);
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    let width = (n as f64 / 32.0).max(1.0);
    for m in 1..=(n / 8).max(1) {
        let w = (-(m as f64 / width).powi(2)).exp();
        let c = w * Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        spec[m] = c;
        spec[n - m] = c.conj();
    }
    let eta = fft.inverse_real(&spec);
    let peak = eta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return eta;
    }
    eta.into_iter().map(|v| v / peak).collect()
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub grid_n: usize,
    /// Time step cap; the step used is `min(0.5 Δx/max|γu|, dt)`.
    pub dt: f64,
    /// Horizon in characteristic times of the wave.
    pub horizon: f64,
    /// Number of diagnostics records over the run (at least).
    pub records: usize,
    pub perturbation: Perturbation,
    pub seed: u64,
    /// Linear advection coefficient `C` of the evolution.
    pub cee: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            grid_n: 1024,
            dt: DEFAULT_DT_CAP,
            horizon: 10.0,
            records: 100,
            perturbation: Perturbation::None,
            seed: 0,
            cee: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub records: Vec<DiagnosticsRecord>,
    pub final_state: SpectralState,
    pub dt: f64,
    pub t_end: f64,
    pub amplitude: f64,
}

impl ExperimentReport {
    pub fn max_h1(&self) -> f64 {
        self.records.iter().map(|r| r.dist_h1).fold(0.0, f64::max)
    }

    pub fn max_h2(&self) -> f64 {
        self.records.iter().map(|r| r.dist_h2).fold(0.0, f64::max)
    }

    pub fn initial_h1(&self) -> f64 {
        self.records[0].dist_h1
    }

    pub fn initial_h2(&self) -> f64 {
        self.records[0].dist_h2
    }

    /// `max/initial` of the H¹ distance (`NaN` for unperturbed runs).
    pub fn ratio_h1(&self) -> f64 {
        self.max_h1() / self.initial_h1()
    }

    pub fn ratio_h2(&self) -> f64 {
        self.max_h2() / self.initial_h2()
    }

    pub fn mass_drift(&self) -> f64 {
        let m0 = self.records[0].mass;
        self.records.iter().map(|r| (r.mass - m0).abs()).fold(0.0, f64::max) / m0.abs()
    }

    pub fn momentum_drift(&self) -> f64 {
        let p0 = self.records[0].momentum;
        self.records.iter().map(|r| (r.momentum - p0).abs()).fold(0.0, f64::max) / p0.abs()
    }

    pub fn any_ambiguous(&self) -> bool {
        self.records.iter().any(|r| r.ambiguous)
    }

    pub fn summary(&self) -> String {
        format!(
            "t_end={:?} dt={:?} steps={} amplitude={:?} max_distH1={:?} max_distH2={:?} ratio_H1={:?} ratio_H2={:?} mass_drift={:?} momentum_drift={:?}",
            self.t_end,
            self.dt,
            (self.t_end / self.dt).round(),
            self.amplitude,
            self.max_h1(),
            self.max_h2(),
            self.ratio_h1(),
            self.ratio_h2(),
            self.mass_drift(),
            self.momentum_drift()
        )
    }
}

/// Evolves a perturbed wave on its own box (one wavelength, or the
/// solitary window) and records distances to the orbit of the unperturbed wave.
pub fn stability_experiment(profile: &WaveProfile, config: &ExperimentConfig) -> Result<ExperimentReport> {
    let length = profile.domain_length();
    let x = periodic_grid(config.grid_n, length);
    let base: Vec<f64> = x.iter().map(|&x| profile.eval(x)).collect();
    let field = config.perturbation.apply(&base, length, config.seed);
    let mut params = profile.params;
    params.cee = config.cee;
    let mut state = SpectralState::new(&field, length, params)?;
    let reference = OrbitReference::from_samples(&base, length)?;
    let t_end = config.horizon * profile.characteristic_time();
    let dt_cap = state.default_dt(config.dt);
    let steps = (t_end / dt_cap).ceil().max(1.0);
    let dt = t_end / steps;
    let every = ((steps as usize) / config.records.max(1)).max(1);
    let records = state.evolve(t_end, dt, every, Some(&reference))?;
    Ok(ExperimentReport {
        records,
        final_state: state,
        dt,
        t_end,
        amplitude: profile.amplitude(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waves::{build_fifth_order_soliton, build_kdv_soliton};

    fn medium(gamma: f64, alpha: f64, beta: f64, cee: f64) -> MediumParams {
        MediumParams {
            gamma,
            alpha,
            beta,
            cee,
            speed: 0.0,
            flux_a: 0.0,
            flux_b: 0.0,
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let p = medium(1.0, 1.0, 1.0, 0.0);
        assert!(SpectralState::new(&[0.0; 100], 10.0, p).is_err());
        assert!(SpectralState::new(&[0.0; 128], 10.0, p).is_err());
        assert!(SpectralState::new(&[0.0; 256], 10.0, p).is_ok());
        assert!(SpectralState::new(&[0.0; 128], 10.0, medium(1.0, 1.0, 0.0, 0.0)).is_ok());
    }

    #[test]
    fn linear_cosine_rotates_exactly() {
        let (n, len) = (256, 2.0 * PI);
        let p = medium(0.0, 0.7, 0.3, 0.2);
        let x = periodic_grid(n, len);
        let m = 3.0;
        let u0: Vec<f64> = x.iter().map(|x| (m * x).cos()).collect();
        let mut s = SpectralState::new(&u0, len, p).unwrap();
        let omega = -p.cee * m + p.alpha * m.powi(3) + p.beta * m.powi(5);
        let dt = 0.01;
        for step in 1..=20 {
            s.step(dt).unwrap();
            let t = step as f64 * dt;
            let err = s
                .field()
                .iter()
                .zip(&x)
                .map(|(u, x)| (u - (m * x + omega * t).cos()).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-12 * step as f64, "step {step}: {err}");
        }
    }

    #[test]
    fn constant_field_is_steady() {
        let p = medium(1.3, 1.0, 1.0, 0.0);
        let mut s = SpectralState::new(&[0.4; 256], 10.0, p).unwrap();
        for _ in 0..10 {
            s.step(0.01).unwrap();
        }
        assert!(s.field().iter().all(|u| (u - 0.4).abs() < 1e-14));
    }

    #[test]
    fn zero_field_has_zero_diagnostics() {
        let p = medium(1.0, 1.0, 1.0, 0.0);
        let mut s = SpectralState::new(&[0.0; 256], 10.0, p).unwrap();
        let rec = s.evolve(1.0, 0.1, 1, None).unwrap();
        assert_eq!(rec.len(), 11);
        assert!(rec.iter().all(|r| r.mass == 0.0 && r.momentum == 0.0));
    }

    #[test]
    fn advection_is_a_spectral_shift() {
        let prof = build_kdv_soliton(1.0, 1.0, 1.0).unwrap();
        let len = prof.domain_length();
        let n = 256;
        let u0: Vec<f64> = periodic_grid(n, len).iter().map(|&x| prof.eval(x)).collect();
        let mut a = SpectralState::new(&u0, len, prof.params).unwrap();
        let mut params = prof.params;
        params.cee = 0.8;
        let mut b = SpectralState::new(&u0, len, params).unwrap();
        a.evolve(2.0, 0.02, 1000, None).unwrap();
        b.evolve(2.0, 0.02, 1000, None).unwrap();
        let shifted = spectral_shift(&a.field(), len, 0.8 * 2.0);
        let err = shifted.iter().zip(b.field()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    fn soliton_error(n: usize, dt: f64, t: f64) -> f64 {
        let prof = build_kdv_soliton(1.0, 1.0, 1.0).unwrap();
        let len = prof.domain_length();
        let x = periodic_grid(n, len);
        let u0: Vec<f64> = x.iter().map(|&x| prof.eval(x)).collect();
        let mut s = SpectralState::new(&u0, len, prof.params).unwrap();
        s.evolve(t, dt, usize::MAX, None).unwrap();
        let c = prof.params.speed;
        s.field()
            .iter()
            .zip(&x)
            .map(|(u, &x)| {
                let xi = (x - c * t + 0.5 * len).rem_euclid(len) - 0.5 * len;
                (u - prof.eval(xi)).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn spatial_convergence_is_spectral() {
        let e64 = soliton_error(64, 0.005, 1.0);
        let e128 = soliton_error(128, 0.005, 1.0);
        assert!(e64 / e128 > 100.0, "{e64} {e128}");
    }

    #[test]
    fn time_convergence_is_fourth_order() {
        let e1 = soliton_error(256, 0.0125, 2.0);
        let e2 = soliton_error(256, 0.00625, 2.0);
        let r = e1 / e2;
        assert!((12.0..20.0).contains(&r), "{e1} {e2} ratio {r}");
    }

    #[test]
    fn shifted_reference_is_on_the_orbit() {
        let prof = build_fifth_order_soliton(1.0, 1.0, 1.0).unwrap();
        let len = prof.domain_length();
        let n = 512;
        let h = len / n as f64;
        let r = OrbitReference::from_profile(&prof, n, len).unwrap();
        let base: Vec<f64> = periodic_grid(n, len).iter().map(|&x| prof.eval(x)).collect();
        let moved = spectral_shift(&base, len, 3.7 * h);
        let d = r.distance(&moved, 2).unwrap();
        assert!(d.distance < 1e-10, "{:?}", d);
        assert!((d.shift / h - 3.7).abs() < 1e-6, "{:?}", d);
        assert!(!d.ambiguous);
    }

    #[test]
    fn scaled_reference_distance() {
        let prof = build_kdv_soliton(1.0, 1.0, 1.0).unwrap();
        let len = prof.domain_length();
        let n = 512;
        let r = OrbitReference::from_profile(&prof, n, len).unwrap();
        let base: Vec<f64> = periodic_grid(n, len).iter().map(|&x| prof.eval(x)).collect();
        let scaled: Vec<f64> = base.iter().map(|v| 1.01 * v).collect();
        for order in 0..=2 {
            let d = r.distance(&scaled, order).unwrap();
            assert!((d.distance / (0.01 * r.norm(order)) - 1.0).abs() < 1e-6);
            assert!(d.shift.abs() < 1e-6);
        }
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, f) = golden_section(|x| (x - 0.3).powi(2) + 1.0, -1.0, 1.0);
        assert!((x - 0.3).abs() < 1e-7 && (f - 1.0).abs() < 1e-14);
    }

    #[test]
    fn perturbation_parsing() {
        assert_eq!("scale:0.01".parse::<Perturbation>().unwrap(), Perturbation::Scale(0.01));
        assert_eq!("none".parse::<Perturbation>().unwrap(), Perturbation::None);
        assert!("wobble:1".parse::<Perturbation>().is_err());
        assert!("scale:x".parse::<Perturbation>().is_err());
        assert_eq!(Perturbation::Noise(0.5).to_string(), "noise:0.5");
    }

    #[test]
    fn noise_is_seeded_and_smooth() {
        let a = band_limited_noise(256, 7);
        assert_eq!(a, band_limited_noise(256, 7));
        assert_ne!(a, band_limited_noise(256, 8));
        let peak = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((peak - 1.0).abs() < 1e-15);
        let spec = FftPair::new(256).forward_real(&a);
        assert!(spec[0].norm() < 1e-12);
        assert!(spec[33..224].iter().all(|c| c.norm() < 1e-12));
    }
}
