//! Fourier coefficients of the cnoidal profiles.
//!
//! Convention, used by every function in this module: a `2L`-periodic even
//! profile is written
//!
//! ```text
//! u(ξ) = û(0) + Σ_{n≥1} 2 û(n) cos(nπξ/L)
//! ```
//!
//! so `û(n)` is the two-sided exponential coefficient
//! `(1/2L) ∫ u(ξ) e^{-inπξ/L} dξ`, `û(-n) = û(n)`, and Parseval reads
//! `(1/2L) ∫ u² = Σ_{n∈Z} û(n)²`. The cosine amplitude of mode `n ≥ 1` is
//! `2 û(n)`; see [`CoeffSequence::cosine_amplitude`].

use std::f64::consts::{PI, SQRT_2};
use std::io::Write;

use crate::elliptic::EllipticContext;
use crate::error::{domain, Error, Result};
use crate::spectral::FftPair;
use crate::waves::{CnoidalParams, WaveProfile};

pub const CONVENTION: &str = "u(xi) = c(0) + sum_{n>=1} 2 c(n) cos(n pi xi / L)";

/// `sinh` arguments above this are treated as an exact zero coefficient.
pub const CSCH_CUTOFF: f64 = 700.0;

/// Relative size of the Nyquist-scale DFT coefficient that flags aliasing.
pub const ALIASING_LIMIT: f64 = 1e-12;

/// Even sequence `û(n)`, `|n| <= truncation`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSequence {
    values: Vec<f64>,
    /// Half period `L` of the underlying profile (in the variable the
    /// cosine argument `nπξ/L` refers to).
    pub half_period: f64,
    /// First index whose closed form underflowed and was stored as zero.
    pub underflow_from: Option<usize>,
    /// Set by the DFT oracle when the Nyquist-scale coefficient is not negligible.
    pub aliasing: bool,
}

impl CoeffSequence {
    /// From `û(0), û(1), …, û(N)`.
    pub fn from_nonnegative(values: Vec<f64>, half_period: f64) -> Self {
        Self {
            values,
            half_period,
            underflow_from: None,
            aliasing: false,
        }
    }

    pub fn truncation(&self) -> usize {
        self.values.len() - 1
    }

    /// `û(n)`; zero outside the stored window.
    pub fn get(&self, n: i64) -> f64 {
        self.values.get(n.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }

    /// Amplitude of `cos(nπξ/L)` in the profile: `û(0)` for `n = 0`, else `2û(n)`.
    pub fn cosine_amplitude(&self, n: usize) -> f64 {
        if n == 0 {
            self.values[0]
        } else {
            2.0 * self.get(n as i64)
        }
    }

    pub fn nonnegative(&self) -> &[f64] {
        &self.values
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// `Σ_{|n|≤N} û(n)²`, equal to the mean square of the profile.
    pub fn l2_norm_sq(&self) -> f64 {
        self.values[0].powi(2) + 2.0 * self.values[1..].iter().map(|v| v * v).sum::<f64>()
    }

    /// Partial Fourier sum at `ξ`.
    pub fn evaluate(&self, xi: f64) -> f64 {
        let w = PI * xi / self.half_period;
        self.values[0]
            + self.values[1..]
                .iter()
                .enumerate()
                .map(|(i, v)| 2.0 * v * (w * (i + 1) as f64).cos())
                .sum::<f64>()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# convention: {CONVENTION:?}; L={:?}", self.half_period)?;
        writeln!(out, "n,coeff")?;
        let n = self.truncation() as i64;
        for i in -n..=n {
            writeln!(out, "{i},{:?}", self.get(i))?;
        }
        Ok(())
    }
}

/// `n csch(n τ)`, with `None` once `nτ` passes [`CSCH_CUTOFF`].
fn n_csch(n: usize, tau: f64) -> Option<f64> {
    let arg = n as f64 * tau;
    (arg <= CSCH_CUTOFF).then(|| n as f64 / arg.sinh())
}

fn fill_series(n_max: usize, mut term: impl FnMut(usize) -> Option<f64>, zeroth: f64, half_period: f64) -> CoeffSequence {
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(zeroth);
    let mut underflow_from = None;
    for n in 1..=n_max {
        match term(n) {
            Some(v) if underflow_from.is_none() => values.push(v),
            _ => {
                underflow_from.get_or_insert(n);
                values.push(0.0);
            }
        }
    }
    CoeffSequence {
        values,
        half_period,
        underflow_from,
        aliasing: false,
    }
}

/// Coefficients of the KdV cnoidal wave `2𝓜K²/L² cn²(Kξ/L; k)`:
///
/// ```text
/// û(0) = (2𝓜K/L²)(K - D)
/// û(n) = (𝓜π²/(L²k²)) n csch(nπK'/K)      (n ≠ 0; cosine amplitude is twice this)
/// ```
pub fn cn2_coeffs(params: &CnoidalParams, n_max: usize) -> Result<CoeffSequence> {
    let emm = params
        .emm
        .ok_or_else(|| domain("cn2_coeffs", "parameters are not from the KdV cnoidal family"))?;
    if n_max < 1 {
        return Err(domain("cn2_coeffs", "truncation order must be at least 1"));
    }
    let ell = EllipticContext::new(params.modulus)?;
    let l2 = params.half_period.powi(2);
    let k2 = params.modulus.powi(2);
    let zeroth = 2.0 * emm * ell.big_k / l2 * (ell.big_k - ell.legendre_d);
    let pref = emm * PI * PI / (l2 * k2);
    let tau = ell.tau();
    Ok(fill_series(n_max, |n| n_csch(n, tau).map(|v| pref * v), zeroth, params.half_period))
}

/// Coefficients of the fifth-order cnoidal wave `(5c/2γ) cn⁴(z; √2/2)`:
///
/// ```text
/// û(0) = 5c/(6γ)
/// û(n) = (5cπ⁴/(6γK⁴)) n³ csch(nπ)        (n ≠ 0; cosine amplitude is twice this)
/// ```
pub fn cn4_coeffs_halfmodulus(
    gamma: f64,
    speed: f64,
    params: &CnoidalParams,
    n_max: usize,
) -> Result<CoeffSequence> {
    if (params.modulus - SQRT_2 / 2.0).abs() > 1e-15 {
        return Err(domain(
            "cn4_coeffs_halfmodulus",
            format!("modulus must be sqrt(2)/2, got {}", params.modulus),
        ));
    }
    if n_max < 1 {
        return Err(domain("cn4_coeffs_halfmodulus", "truncation order must be at least 1"));
    }
    let ell = EllipticContext::new(params.modulus)?;
    let zeroth = 5.0 * speed / (6.0 * gamma);
    let pref = 5.0 * speed * PI.powi(4) / (6.0 * gamma * ell.big_k.powi(4));
    Ok(fill_series(
        n_max,
        |n| n_csch(n, PI).map(|v| pref * v * (n * n) as f64),
        zeroth,
        params.half_period,
    ))
}

/// Analytic coefficients for whichever cnoidal family `profile` belongs to.
pub fn analytic_coeffs(profile: &WaveProfile, n_max: usize) -> Result<CoeffSequence> {
    let cn = profile
        .cnoidal
        .as_ref()
        .ok_or_else(|| domain("analytic_coeffs", "profile is not periodic"))?;
    if cn.emm.is_some() {
        cn2_coeffs(cn, n_max)
    } else {
        cn4_coeffs_halfmodulus(profile.params.gamma, profile.params.speed, cn, n_max)
    }
}

/// Fourier coefficients of `cn⁴(z; k)` as a series in `cos(nπz/K)`
/// (half period `K`), from
///
/// ```text
/// k⁴cn⁴ = ⅓[2(k²-k'²)(E/K - k'²) + k²k'²]
///       + (2π²/K²) Σ (n qⁿ/(1-q²ⁿ)) ⅓(2(k²-k'²) + n²π²/(2K²)) cos(nπz/K)
/// ```
pub fn cn4_series_general_k(k: f64, n_max: usize) -> Result<CoeffSequence> {
    if !(k > 0.0 && k < 1.0) {
        return Err(domain("cn4_series_general_k", format!("requires 0 < k < 1, got {k}")));
    }
    let ell = EllipticContext::new(k)?;
    let (kk, kp) = (ell.big_k, ell.kprime);
    let k2 = k * k;
    let kp2 = kp * kp;
    let k4 = k2 * k2;
    let diff = k2 - kp2;
    let zeroth = (2.0 * diff * (ell.big_e / kk - kp2) + k2 * kp2) / (3.0 * k4);
    let tau = ell.tau();
    Ok(fill_series(
        n_max,
        |n| {
            // n qⁿ/(1-q²ⁿ) = ½ n csch(nτ); one more half converts the cosine
            // amplitude to the two-sided coefficient
            let nf = n as f64;
            n_csch(n, tau).map(|v| {
                0.25 * (2.0 * PI * PI / (kk * kk)) * v * (2.0 * diff + nf * nf * PI * PI / (2.0 * kk * kk))
                    / (3.0 * k4)
            })
        },
        zeroth,
        kk,
    ))
}

/// Two-sided coefficients of samples `u_j = u(-L + j·2L/M)`, `j = 0..M`.
pub fn dft_coeffs_from_samples(samples: &[f64], half_period: f64, n_max: usize) -> Result<CoeffSequence> {
    let m = samples.len();
    if m < 8 * n_max {
        return Err(Error::Grid(format!(
            "DFT oracle needs at least 8N = {} samples, got {m}",
            8 * n_max
        )));
    }
    let spec = FftPair::new(m).forward_real(samples);
    let scale = 1.0 / m as f64;
    // the grid starts at -L, which contributes (-1)^n
    let coeff = |n: usize| {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sign * spec[n].re * scale
    };
    let values: Vec<f64> = (0..=n_max).map(coeff).collect();
    let nyquist = coeff(m / 2).abs();
    Ok(CoeffSequence {
        aliasing: nyquist > ALIASING_LIMIT * values[0].abs(),
        values,
        half_period,
        underflow_from: None,
    })
}

/// Numerical coefficients of a periodic profile from its samples over one wavelength.
pub fn dft_coeffs(profile: &WaveProfile, n_max: usize) -> Result<CoeffSequence> {
    let cn = profile
        .cnoidal
        .as_ref()
        .ok_or_else(|| domain("dft_coeffs", "profile is not periodic"))?;
    dft_coeffs_from_samples(profile.samples(), cn.half_period, n_max)
}

/// Location of a 2×2 Toeplitz minor `a(n1-m1)a(n2-m2) - a(n1-m2)a(n2-m1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinorIndex {
    pub n1: i64,
    pub n2: i64,
    pub m1: i64,
    pub m2: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pf2Report {
    pub window: i64,
    /// `max a(n)²`; tolerances are relative to this.
    pub scale: f64,
    pub min_minor: f64,
    pub min_location: MinorIndex,
    /// `min_n a(n)² - a(n-1)a(n+1)` over the window.
    pub min_log_concavity: f64,
    pub min_log_concavity_at: i64,
    pub minors_checked: usize,
    pub passed: bool,
}

/// Tolerance floor for minors that vanish exactly in exact arithmetic.
pub const PF2_TOLERANCE: f64 = 1e-14;

/// Checks every 2×2 Toeplitz minor with row and column indices in
/// `[-window, window]` and the log-concavity corollary.
pub fn pf2_check(seq: &CoeffSequence, window: usize) -> Result<Pf2Report> {
    let m = window as i64;
    if seq.truncation() < 2 * window {
        return Err(domain(
            "pf2_check",
            format!("window {window} needs coefficients up to |n| = {}, have {}", 2 * window, seq.truncation()),
        ));
    }
    for n in 0..=2 * m {
        if !(seq.get(n) > 0.0) {
            return Err(Error::NotPositive { index: n });
        }
    }
    let a = |n: i64| seq.get(n);
    let scale = (0..=2 * m).map(|n| a(n) * a(n)).fold(0.0, f64::max);

    let mut min_minor = f64::INFINITY;
    let mut min_location = MinorIndex { n1: 0, n2: 0, m1: 0, m2: 0 };
    let mut count = 0;
    for n1 in -m..=m {
        for n2 in n1 + 1..=m {
            for m1 in -m..=m {
                for m2 in m1 + 1..=m {
                    let minor = a(n1 - m1) * a(n2 - m2) - a(n1 - m2) * a(n2 - m1);
                    count += 1;
                    if minor < min_minor {
                        min_minor = minor;
                        min_location = MinorIndex { n1, n2, m1, m2 };
                    }
                }
            }
        }
    }
    let (min_log_concavity, min_log_concavity_at) = (-m..=m)
        .map(|n| (a(n) * a(n) - a(n - 1) * a(n + 1), n))
        .fold((f64::INFINITY, 0), |best, cur| if cur.0 < best.0 { cur } else { best });
    let floor = -PF2_TOLERANCE * scale;
    Ok(Pf2Report {
        window: m,
        scale,
        min_minor,
        min_location,
        min_log_concavity,
        min_log_concavity_at,
        minors_checked: count,
        passed: min_minor >= floor && min_log_concavity >= floor,
    })
}

/// Relative error floor, as a fraction of the largest coefficient, used when
/// comparing coefficients that sit at rounding level.
pub const COMPARISON_FLOOR: f64 = 1e-6;

/// Analytic against discrete coefficients for `|n| <= window`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffComparison {
    /// `(n, analytic, discrete, relative error)`.
    pub rows: Vec<(i64, f64, f64, f64)>,
    pub max_rel_err: f64,
    pub worst_n: i64,
}

impl CoeffComparison {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel_err < tol
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,analytic,dft,rel_err")?;
        for (n, a, d, e) in &self.rows {
            writeln!(out, "{n:?},{a:?},{d:?},{e:?}")?;
        }
        Ok(())
    }
}

/// Error of each coefficient relative to `max(|a(n)|, 1e-6 max_m |a(m)|)`.
pub fn compare_coeffs(analytic: &CoeffSequence, discrete: &CoeffSequence, window: usize) -> CoeffComparison {
    let w = window as i64;
    let scale = (0..=w).map(|n| analytic.get(n).abs()).fold(0.0, f64::max);
    let mut rows = Vec::with_capacity(2 * window + 1);
    let (mut max_rel_err, mut worst_n) = (0.0, 0);
    for n in -w..=w {
        let (a, d) = (analytic.get(n), discrete.get(n));
        let e = (a - d).abs() / a.abs().max(COMPARISON_FLOOR * scale);
        if e > max_rel_err {
            max_rel_err = e;
            worst_n = n;
        }
        rows.push((n, a, d, e));
    }
    CoeffComparison { rows, max_rel_err, worst_n }
}
