//! Closed-form traveling waves of
//!
//! ```text
//! u_t + γ u u_x + α u_xxx = β u_xxxxx
//! ```
//!
//! and pointwise checks of the two integrated conservation laws
//!
//! ```text
//! -c u + γ/2 u² + α u'' - β u''''                                   = A
//! -c/2 u² + γ/3 u³ + α (u u'' - u'²/2) - β (u u'''' - u' u''' + u''²/2) = B
//! ```
//!
//! Every profile has the form `amplitude · g(scale · ξ)^power` with `g`
//! either `sech` or `cn(·; k)`, which is all the residual and flux
//! computations need to know.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::io::Write;

use crate::elliptic::{EllipticContext, MAX_MODULUS};
use crate::error::{domain, Error, Result};
use crate::spectral::{central_derivatives_8th, periodic_derivatives};

/// Default number of grid samples for a freshly built profile.
pub const DEFAULT_SAMPLES: usize = 2048;

/// Half-window of a solitary profile, in characteristic widths.
pub const SOLITARY_WINDOW_WIDTHS: f64 = 20.0;

/// Relative noise level (against the term scale) above which residuals
/// are rejected as under-resolved.
pub const RESOLUTION_LIMIT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    FifthOrderSoliton,
    KdvSoliton,
    KdvCnoidal,
    FifthOrderCnoidal,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::FifthOrderSoliton,
        Family::KdvSoliton,
        Family::KdvCnoidal,
        Family::FifthOrderCnoidal,
    ];

    pub fn is_periodic(self) -> bool {
        matches!(self, Family::KdvCnoidal | Family::FifthOrderCnoidal)
    }

    /// Name used on the command line and in CSV headers.
    pub fn slug(self) -> &'static str {
        match self {
            Family::FifthOrderSoliton => "fifth-soliton",
            Family::KdvSoliton => "kdv-soliton",
            Family::KdvCnoidal => "kdv-cnoidal",
            Family::FifthOrderCnoidal => "fifth-cnoidal",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.slug() == s)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// Coefficients of the equation together with the wave speed and the two
/// flux constants of a particular traveling wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Coefficient of an optional linear advection term `C u_x`.
    pub cee: f64,
    pub speed: f64,
    pub flux_a: f64,
    pub flux_b: f64,
}

/// Derived quantities of a periodic wave.
///
/// `delta` and `emm` only exist for the KdV cnoidal family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnoidalParams {
    pub delta: Option<f64>,
    pub amplitude: f64,
    pub modulus: f64,
    pub emm: Option<f64>,
    pub wavelength: f64,
    pub half_period: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Envelope {
    Sech,
    Cn,
}

/// `amplitude · g(scale·ξ)^power`.
#[derive(Debug, Clone)]
struct Shape {
    envelope: Envelope,
    amplitude: f64,
    scale: f64,
    power: i32,
    elliptic: Option<EllipticContext>,
}

impl Shape {
    fn eval(&self, xi: f64) -> f64 {
        let z = self.scale * xi.abs();
        let g = match self.envelope {
            Envelope::Sech => 1.0 / z.cosh(),
            Envelope::Cn => self.elliptic.as_ref().expect("cn shape").cn(z),
        };
        self.amplitude * g.powi(self.power)
    }

    /// Modulus of `g`; `sech` is `cn` at `k = 1`.
    fn modulus(&self) -> f64 {
        self.elliptic.as_ref().map_or(1.0, |e| e.k)
    }

    /// `(u, u'', u'''')` at `ξ = 0` from the Taylor series of `g^power`:
    /// `cn² = 1 - z² + (1+k²)/3 z⁴`, `cn⁴ = 1 - 2z² + (5+2k²)/3 z⁴`.
    fn even_derivatives_at_origin(&self) -> (f64, f64, f64) {
        let m = self.modulus().powi(2);
        let (t2, t4) = match self.power {
            2 => (-1.0, (1.0 + m) / 3.0),
            4 => (-2.0, (5.0 + 2.0 * m) / 3.0),
            p => unreachable!("power {p}"),
        };
        let a = self.amplitude;
        let b2 = self.scale * self.scale;
        (a, 2.0 * t2 * a * b2, 24.0 * t4 * a * b2 * b2)
    }
}

/// A traveling-wave profile together with uniform samples.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    pub family: Family,
    pub params: MediumParams,
    pub cnoidal: Option<CnoidalParams>,
    shape: Shape,
    xi: Vec<f64>,
    u: Vec<f64>,
}

fn nonzero_gamma(gamma: f64) -> Result<()> {
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(domain("gamma", format!("must be finite and nonzero, got {gamma}")));
    }
    Ok(())
}

fn finite(what: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(domain(what, format!("must be finite, got {v}")));
    }
    Ok(())
}

/// Solitary wave `105α²/(169γβ) sech⁴(½ sqrt(α/13β) ξ)` moving at
/// `c = 36α²/(169β)`.
pub fn build_fifth_order_soliton(gamma: f64, alpha: f64, beta: f64) -> Result<WaveProfile> {
    nonzero_gamma(gamma)?;
    if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
        return Err(domain(
            "fifth-order soliton",
            format!("requires alpha > 0 and beta > 0, got alpha = {alpha}, beta = {beta}"),
        ));
    }
    let params = MediumParams {
        gamma,
        alpha,
        beta,
        cee: 0.0,
        speed: 36.0 * alpha * alpha / (169.0 * beta),
        flux_a: 0.0,
        flux_b: 0.0,
    };
    let shape = Shape {
        envelope: Envelope::Sech,
        amplitude: 105.0 * alpha * alpha / (169.0 * gamma * beta),
        scale: 0.5 * (alpha / (13.0 * beta)).sqrt(),
        power: 4,
        elliptic: None,
    };
    WaveProfile::assemble(Family::FifthOrderSoliton, params, None, shape, DEFAULT_SAMPLES)
}

/// KdV solitary wave `(3c/γ) sech²(½ sqrt(c/α) ξ)`.
pub fn build_kdv_soliton(gamma: f64, alpha: f64, speed: f64) -> Result<WaveProfile> {
    nonzero_gamma(gamma)?;
    finite("alpha", alpha)?;
    finite("c", speed)?;
    if !(speed / alpha > 0.0) {
        return Err(domain(
            "KdV soliton",
            format!("requires c/alpha > 0, got c = {speed}, alpha = {alpha}"),
        ));
    }
    let params = MediumParams {
        gamma,
        alpha,
        beta: 0.0,
        cee: 0.0,
        speed,
        flux_a: 0.0,
        flux_b: 0.0,
    };
    let shape = Shape {
        envelope: Envelope::Sech,
        amplitude: 3.0 * speed / gamma,
        scale: 0.5 * (speed / alpha).sqrt(),
        power: 2,
        elliptic: None,
    };
    WaveProfile::assemble(Family::KdvSoliton, params, None, shape, DEFAULT_SAMPLES)
}

/// Cnoidal parameters of the KdV wave `A cn²(Δ^{1/4} ξ / (2 sqrt(3α)); k)`.
pub fn kdv_cnoidal_params(gamma: f64, alpha: f64, speed: f64, flux_a: f64) -> Result<CnoidalParams> {
    nonzero_gamma(gamma)?;
    finite("c", speed)?;
    finite("A", flux_a)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain("KdV cnoidal", format!("requires alpha > 0, got {alpha}")));
    }
    let delta = 9.0 * speed * speed + 24.0 * flux_a * gamma;
    if !(delta > 0.0) {
        return Err(domain(
            "KdV cnoidal",
            format!("requires Delta = 9c² + 24Aγ > 0, got {delta}"),
        ));
    }
    let root = delta.sqrt();
    let amplitude = (3.0 * speed + root) / (2.0 * gamma);
    let k2 = 0.5 * (1.0 + 3.0 * speed / root);
    if !(k2 > 0.0) {
        return Err(domain(
            "KdV cnoidal",
            format!("modulus squared {k2} is not positive (zero or negative amplitude)"),
        ));
    }
    let modulus = k2.sqrt();
    if modulus > MAX_MODULUS {
        return Err(Error::DegenerateModulus { k: modulus });
    }
    let ell = EllipticContext::new(modulus)?;
    let wavelength = 4.0 * (3.0 * alpha).sqrt() * ell.big_k / root.sqrt();
    Ok(CnoidalParams {
        delta: Some(delta),
        amplitude,
        modulus,
        emm: Some(6.0 * alpha * amplitude / root),
        wavelength,
        half_period: 0.5 * wavelength,
    })
}

/// KdV cnoidal wave train with mass flux `A`.
pub fn build_kdv_cnoidal(gamma: f64, alpha: f64, speed: f64, flux_a: f64) -> Result<WaveProfile> {
    let cn = kdv_cnoidal_params(gamma, alpha, speed, flux_a)?;
    let delta = cn.delta.unwrap();
    let shape = Shape {
        envelope: Envelope::Cn,
        amplitude: cn.amplitude,
        scale: delta.powf(0.25) / (2.0 * (3.0 * alpha).sqrt()),
        power: 2,
        elliptic: Some(EllipticContext::new(cn.modulus)?),
    };
    let mut params = MediumParams {
        gamma,
        alpha,
        beta: 0.0,
        cee: 0.0,
        speed,
        flux_a,
        flux_b: 0.0,
    };
    params.flux_b = flux_constants_of(&shape, &params).1;
    WaveProfile::assemble(Family::KdvCnoidal, params, Some(cn), shape, DEFAULT_SAMPLES)
}

/// Cnoidal wave `(5c/2γ) cn⁴((√2/2)(c/42β)^{1/4} ξ; √2/2)` of
/// `u_t + γ u u_x = β u_xxxxx`.
pub fn build_fifth_order_cnoidal(gamma: f64, beta: f64, speed: f64) -> Result<WaveProfile> {
    nonzero_gamma(gamma)?;
    finite("beta", beta)?;
    finite("c", speed)?;
    if !(speed / beta > 0.0) {
        return Err(domain(
            "fifth-order cnoidal",
            format!("requires c/beta > 0, got c = {speed}, beta = {beta}"),
        ));
    }
    let modulus = SQRT_2 / 2.0;
    let ell = EllipticContext::new(modulus)?;
    let scale = modulus * (speed / (42.0 * beta)).powf(0.25);
    let wavelength = 2.0 * SQRT_2 * (42.0 * beta / speed).powf(0.25) * ell.big_k;
    let cn = CnoidalParams {
        delta: None,
        amplitude: 2.5 * speed / gamma,
        modulus,
        emm: None,
        wavelength,
        half_period: 0.5 * wavelength,
    };
    let shape = Shape {
        envelope: Envelope::Cn,
        amplitude: cn.amplitude,
        scale,
        power: 4,
        elliptic: Some(ell),
    };
    let mut params = MediumParams {
        gamma,
        alpha: 0.0,
        beta,
        cee: 0.0,
        speed,
        flux_a: 0.0,
        flux_b: 0.0,
    };
    let (a, b) = flux_constants_of(&shape, &params);
    params.flux_a = a;
    params.flux_b = b;
    WaveProfile::assemble(Family::FifthOrderCnoidal, params, Some(cn), shape, DEFAULT_SAMPLES)
}

/// Evaluates both conservation-law expressions at `ξ = 0`, where odd
/// derivatives vanish.
fn flux_constants_of(shape: &Shape, p: &MediumParams) -> (f64, f64) {
    let (u, u2, u4) = shape.even_derivatives_at_origin();
    let first = -p.speed * u + 0.5 * p.gamma * u * u + p.alpha * u2 - p.beta * u4;
    let second = -0.5 * p.speed * u * u + p.gamma / 3.0 * u.powi(3) + p.alpha * u * u2
        - p.beta * (u * u4 + 0.5 * u2 * u2);
    (first, second)
}

impl WaveProfile {
    fn assemble(
        family: Family,
        params: MediumParams,
        cnoidal: Option<CnoidalParams>,
        shape: Shape,
        samples: usize,
    ) -> Result<Self> {
        let mut profile = Self {
            family,
            params,
            cnoidal,
            shape,
            xi: Vec::new(),
            u: Vec::new(),
        };
        profile.sample(samples)?;
        Ok(profile)
    }

    fn sample(&mut self, n: usize) -> Result<()> {
        if n < 16 {
            return Err(Error::Grid(format!("need at least 16 samples, got {n}")));
        }
        self.xi = if let Some(cn) = &self.cnoidal {
            // [-L, L) with ξ_j = (j - n/2) h
            let h = cn.wavelength / n as f64;
            (0..n).map(|j| (j as f64 - (n / 2) as f64) * h).collect()
        } else {
            let w = self.window_half_width();
            let h = 2.0 * w / (n - 1) as f64;
            let mid = 0.5 * (n - 1) as f64;
            (0..n).map(|j| (j as f64 - mid) * h).collect()
        };
        self.u = self.xi.iter().map(|&x| self.shape.eval(x)).collect();
        Ok(())
    }

    /// Same wave sampled on `n` points.
    pub fn resampled(&self, n: usize) -> Result<Self> {
        let mut p = self.clone();
        p.sample(n)?;
        Ok(p)
    }

    /// Closed-form value at `ξ`.
    pub fn eval(&self, xi: f64) -> f64 {
        self.shape.eval(xi)
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn samples(&self) -> &[f64] {
        &self.u
    }

    pub fn spacing(&self) -> f64 {
        self.xi[1] - self.xi[0]
    }

    pub fn amplitude(&self) -> f64 {
        self.shape.amplitude
    }

    pub fn modulus(&self) -> Option<f64> {
        self.shape.elliptic.as_ref().map(|e| e.k)
    }

    /// Multiplier of `ξ` inside `sech` or `cn`.
    pub fn argument_scale(&self) -> f64 {
        self.shape.scale
    }

    pub fn elliptic(&self) -> Option<&EllipticContext> {
        self.shape.elliptic.as_ref()
    }

    /// Width used to size windows and time horizons: `2 sqrt(13β/α)` for
    /// sech⁴, `2 sqrt(α/c)` for sech², the wavelength for cnoidal waves.
    pub fn characteristic_width(&self) -> f64 {
        match (self.family, &self.cnoidal) {
            (_, Some(cn)) => cn.wavelength,
            _ => 1.0 / self.shape.scale,
        }
    }

    /// Time for the wave to travel one characteristic width.
    pub fn characteristic_time(&self) -> f64 {
        self.characteristic_width() / self.params.speed.abs()
    }

    fn window_half_width(&self) -> f64 {
        SOLITARY_WINDOW_WIDTHS * self.characteristic_width()
    }

    /// Length of the sampled interval: one wavelength, or the full solitary window.
    pub fn domain_length(&self) -> f64 {
        match &self.cnoidal {
            Some(cn) => cn.wavelength,
            None => 2.0 * self.window_half_width(),
        }
    }

    /// `(A, B)` evaluated analytically at the crest.
    pub fn flux_constants(&self) -> (f64, f64) {
        flux_constants_of(&self.shape, &self.params)
    }

    /// Compact cn² form `2𝓜K²/L² cn²(Kξ/L; k)` of the KdV cnoidal wave.
    pub fn compact_form(&self, xi: f64) -> Option<f64> {
        let cn = self.cnoidal.as_ref()?;
        let emm = cn.emm?;
        let ell = self.shape.elliptic.as_ref()?;
        let l = cn.half_period;
        let arg = ell.big_k * xi / l;
        Some(2.0 * emm * ell.big_k.powi(2) / (l * l) * ell.cn(arg).powi(2))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let p = &self.params;
        write!(
            out,
            "# family={} gamma={:?} alpha={:?} beta={:?} C={:?} c={:?} A={:?} B={:?} amplitude={:?}",
            self.family, p.gamma, p.alpha, p.beta, p.cee, p.speed, p.flux_a, p.flux_b, self.amplitude()
        )?;
        if let Some(cn) = &self.cnoidal {
            write!(out, " k={:?} wavelength={:?}", cn.modulus, cn.wavelength)?;
            if let Some(d) = cn.delta {
                write!(out, " Delta={d:?}")?;
            }
        }
        writeln!(out)?;
        writeln!(out, "xi,u")?;
        for (x, u) in self.xi.iter().zip(&self.u) {
            writeln!(out, "{x:?},{u:?}")?;
        }
        Ok(())
    }
}

/// Pointwise conservation-law diagnostics on the sample grid.
#[derive(Debug, Clone)]
pub struct ConservationResiduals {
    /// Grid points where the expressions were evaluated.
    pub xi: Vec<f64>,
    /// First-law expression minus its grid mean.
    pub residual_a: Vec<f64>,
    /// Second-law expression minus its grid mean.
    pub residual_b: Vec<f64>,
    pub mean_a: f64,
    pub mean_b: f64,
    /// Largest pointwise magnitude among the terms of each expression.
    pub scale_a: f64,
    pub scale_b: f64,
    /// Change in the first-law expression when the grid spacing doubles.
    pub noise: f64,
}

impl ConservationResiduals {
    pub fn std_a(&self) -> f64 {
        std_dev(&self.residual_a)
    }

    pub fn std_b(&self) -> f64 {
        std_dev(&self.residual_b)
    }

    pub fn max_abs_a(&self) -> f64 {
        self.residual_a.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_b(&self) -> f64 {
        self.residual_b.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# mean_A={:?} mean_B={:?} scale_A={:?} scale_B={:?}", self.mean_a, self.mean_b, self.scale_a, self.scale_b)?;
        writeln!(out, "xi,residual_A,residual_B")?;
        for ((x, a), b) in self.xi.iter().zip(&self.residual_a).zip(&self.residual_b) {
            writeln!(out, "{x:?},{a:?},{b:?}")?;
        }
        Ok(())
    }
}

fn std_dev(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

struct Expressions {
    xi: Vec<f64>,
    first: Vec<f64>,
    second: Vec<f64>,
    scale_a: f64,
    scale_b: f64,
}

fn expressions(xi: &[f64], u: &[f64], periodic: bool, length: f64, p: &MediumParams) -> Expressions {
    let (xs, d) = if periodic {
        (xi.to_vec(), periodic_derivatives(u, length, 4))
    } else {
        let h = xi[1] - xi[0];
        let (hw, d) = central_derivatives_8th(u, h);
        (xi[hw..xi.len() - hw].to_vec(), d)
    };
    let mut first = Vec::with_capacity(xs.len());
    let mut second = Vec::with_capacity(xs.len());
    let (mut scale_a, mut scale_b) = (0.0f64, 0.0f64);
    for i in 0..xs.len() {
        let (u0, u1, u2, u3, u4) = (d[0][i], d[1][i], d[2][i], d[3][i], d[4][i]);
        let ta = [-p.speed * u0, 0.5 * p.gamma * u0 * u0, p.alpha * u2, -p.beta * u4];
        let tb = [
            -0.5 * p.speed * u0 * u0,
            p.gamma / 3.0 * u0.powi(3),
            p.alpha * u0 * u2,
            -0.5 * p.alpha * u1 * u1,
            -p.beta * u0 * u4,
            p.beta * u1 * u3,
            -0.5 * p.beta * u2 * u2,
        ];
        scale_a = ta.iter().fold(scale_a, |m, t| m.max(t.abs()));
        scale_b = tb.iter().fold(scale_b, |m, t| m.max(t.abs()));
        first.push(ta.iter().sum());
        second.push(tb.iter().sum());
    }
    Expressions {
        xi: xs,
        first,
        second,
        scale_a,
        scale_b,
    }
}

/// Evaluates both conservation-law expressions with the profile's own
/// parameters. See [`conservation_residuals_with`].
pub fn conservation_residuals(profile: &WaveProfile) -> Result<ConservationResiduals> {
    conservation_residuals_with(profile, &profile.params)
}

/// Evaluates both conservation-law expressions on the profile samples using
/// `params` (which may differ from the profile's own, e.g. to probe a
/// wrong speed).
///
/// Periodic profiles are differentiated spectrally over one wavelength;
/// solitary profiles with eighth-order central differences at interior
/// points. The result is rejected when halving the resolution changes the
/// first-law expression by more than [`RESOLUTION_LIMIT`] of its term scale.
pub fn conservation_residuals_with(
    profile: &WaveProfile,
    params: &MediumParams,
) -> Result<ConservationResiduals> {
    let periodic = profile.family.is_periodic();
    let length = profile.domain_length();
    let fine = expressions(&profile.xi, &profile.u, periodic, length, params);

    let xi_half: Vec<f64> = profile.xi.iter().step_by(2).copied().collect();
    let u_half: Vec<f64> = profile.u.iter().step_by(2).copied().collect();
    let coarse = expressions(&xi_half, &u_half, periodic, length, params);
    let noise = coarse
        .xi
        .iter()
        .zip(&coarse.first)
        .filter_map(|(x, a)| {
            let j = fine.xi.iter().position(|y| y == x)?;
            Some((a - fine.first[j]).abs())
        })
        .fold(0.0, f64::max);
    let field_scale = fine.scale_a.max(f64::MIN_POSITIVE);
    if noise > RESOLUTION_LIMIT * field_scale {
        return Err(Error::Resolution {
            noise,
            limit: RESOLUTION_LIMIT * field_scale,
        });
    }

    let mean_a = fine.first.iter().sum::<f64>() / fine.first.len() as f64;
    let mean_b = fine.second.iter().sum::<f64>() / fine.second.len() as f64;
    Ok(ConservationResiduals {
        residual_a: fine.first.iter().map(|v| v - mean_a).collect(),
        residual_b: fine.second.iter().map(|v| v - mean_b).collect(),
        xi: fine.xi,
        mean_a,
        mean_b,
        scale_a: fine.scale_a,
        scale_b: fine.scale_b,
        noise,
    })
}
