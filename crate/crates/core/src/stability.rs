//! Stability functionals.
//!
//! * KdV soliton: `‖φ_c‖² = 24 α^{1/2} c^{3/2} / γ²`, whose `c`-derivative must be positive.
//! * Fifth-order soliton (no speed family): sign of the Gegenbauer series for `I`.
//! * Cnoidal waves: `d/dc ‖φ̂_c‖²_{ℓ²}` from the closed-form coefficients,
//!   differentiated by Richardson-extrapolated central differences and,
//!   for the cn² family, decomposed into four separately signed terms.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::io::Write;

use libm::lgamma;
use rayon::prelude::*;

use crate::elliptic::{d_complete_k, EllipticContext};
use crate::error::{domain, Error, Result};
use crate::waves::{kdv_cnoidal_params, Family};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The sufficient condition for orbital stability holds.
    Stable,
    /// The numbers cannot decide (e.g. a tail bound larger than the gap).
    Inconclusive,
    /// The sufficient condition fails.
    NotSatisfied,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "stable",
            Verdict::Inconclusive => "inconclusive",
            Verdict::NotSatisfied => "not-satisfied",
        })
    }
}

// ---------------------------------------------------------------------------
// KdV soliton

fn positive(what: &'static str, name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(domain(what, format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// `‖φ_c‖²_{L²} = 24 α^{1/2} c^{3/2} / γ²` of the sech² soliton.
pub fn kdv_soliton_norm_sq(gamma: f64, alpha: f64, speed: f64) -> Result<f64> {
    positive("KdV soliton norm", "alpha", alpha)?;
    positive("KdV soliton norm", "c", speed)?;
    Ok(24.0 * alpha.sqrt() * speed.powf(1.5) / (gamma * gamma))
}

/// `d/dc ‖φ_c‖² = 36 α^{1/2} c^{1/2} / γ²`.
pub fn kdv_soliton_norm_derivative(gamma: f64, alpha: f64, speed: f64) -> Result<f64> {
    positive("KdV soliton norm derivative", "alpha", alpha)?;
    positive("KdV soliton norm derivative", "c", speed)?;
    if gamma == 0.0 {
        return Err(domain("KdV soliton norm derivative", "gamma must be nonzero"));
    }
    Ok(36.0 * alpha.sqrt() * speed.sqrt() / (gamma * gamma))
}

pub fn kdv_soliton_report(gamma: f64, alpha: f64, speed: f64) -> Result<StabilityReport> {
    let derivative = kdv_soliton_norm_derivative(gamma, alpha, speed)?;
    Ok(StabilityReport {
        family: Family::KdvSoliton,
        mode: None,
        speed,
        norm_sq: kdv_soliton_norm_sq(gamma, alpha, speed)?,
        derivative,
        functional_i: -derivative,
        parseval_derivative: None,
        drifting_period_derivative: None,
        terms: Vec::new(),
        verdict: if derivative > 0.0 { Verdict::Stable } else { Verdict::NotSatisfied },
    })
}

// ---------------------------------------------------------------------------
// Gegenbauer series

/// Parameters of the gamma-function series for `I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerSeriesSpec {
    pub r: f64,
    pub n: f64,
    pub gamma: f64,
}

impl GegenbauerSeriesSpec {
    /// `r = 4`, `n = 2`.
    pub fn fifth_order(gamma: f64) -> Self {
        Self { r: 4.0, n: 2.0, gamma }
    }

    /// `a = γ 2^{n+r-1} Γ(r) / (π Γ(n))`.
    pub fn prefactor(&self) -> f64 {
        self.gamma * (2f64).powf(self.n + self.r - 1.0) * lgamma(self.r).exp() / (PI * lgamma(self.n).exp())
    }

    /// `λ_m = [Γ(r+m)/Γ(r+1)]·[Γ(r+2n+1)/Γ(r+2n+m)]`.
    pub fn lambda(&self, m: f64) -> f64 {
        let (r, n) = (self.r, self.n);
        (lgamma(r + m) - lgamma(r + 1.0) + lgamma(r + 2.0 * n + 1.0) - lgamma(r + 2.0 * n + m)).exp()
    }

    /// `j`-th series term without the prefactor `a`, evaluated in the log domain.
    pub fn term(&self, j: usize) -> f64 {
        let (r, n) = (self.r, self.n);
        let jf = j as f64;
        let lam = self.lambda(2.0 * jf);
        let weight = lam / (1.0 - lam);
        let log_mid = lgamma(2.0 * jf + 1.0) - lgamma(2.0 * jf + 2.0 * n + 2.0 * r - 1.0);
        let log_sq = 2.0 * (lgamma(jf + n) + lgamma(jf + n + r - 0.5) - lgamma(jf + 1.0) - lgamma(jf + r + 0.5));
        weight * (2.0 * jf + n + r - 0.5) * (log_mid + log_sq).exp()
    }

    /// Limit of `b_j j^{2r+1}`: `Γ(r+2n+1)/Γ(r+1) · 2^{3-4n-2r}`.
    pub fn asymptotic_constant(&self) -> f64 {
        let (r, n) = (self.r, self.n);
        (lgamma(r + 2.0 * n + 1.0) - lgamma(r + 1.0)).exp() * (2f64).powf(3.0 - 4.0 * n - 2.0 * r)
    }

    pub fn decay_exponent(&self) -> f64 {
        2.0 * self.r + 1.0
    }
}

/// Closed form of the `r = 4`, `n = 2` term,
///
/// ```text
/// b_j = 1680 (2j+11/2)(j+1)²(j+9/2)² (2j)! / ([(2j+4)(2j+5)(2j+6)(2j+7) - 1680] (2j+10)!)
/// ```
///
/// with `(2j)!/(2j+10)!` expanded as a product.
pub fn gegenbauer_b_explicit(j: usize) -> f64 {
    let jf = j as f64;
    let ratio: f64 = (1..=10).map(|i| 1.0 / (2.0 * jf + i as f64)).product();
    let bracket = (2.0 * jf + 4.0) * (2.0 * jf + 5.0) * (2.0 * jf + 6.0) * (2.0 * jf + 7.0) - 1680.0;
    1680.0 * (2.0 * jf + 5.5) * (jf + 1.0).powi(2) * (jf + 4.5).powi(2) * ratio / bracket
}

/// `b_0, …, b_jmax`.
pub fn gegenbauer_terms(spec: &GegenbauerSeriesSpec, jmax: usize) -> Result<Vec<f64>> {
    if jmax < 1 {
        return Err(domain("gegenbauer_terms", "jmax must be at least 1"));
    }
    if !(spec.r > 0.0 && spec.n > 0.0) {
        return Err(domain("gegenbauer_terms", "r and n must be positive"));
    }
    Ok((0..=jmax).map(|j| spec.term(j)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GegenbauerReport {
    pub terms: Vec<f64>,
    /// `Σ_{j=1}^{J} b_j` for `J = 1..=jmax`.
    pub partial_sums: Vec<f64>,
    /// Upper bound on `Σ_{j>jmax} b_j`.
    pub tail_bound: f64,
    /// `a Σ_{j=0}^{jmax} b_j`.
    pub functional_i: f64,
    pub verdict: Verdict,
}

impl GegenbauerReport {
    pub fn b0(&self) -> f64 {
        self.terms[0]
    }

    pub fn positive_sum(&self) -> f64 {
        *self.partial_sums.last().unwrap()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# |b0|={:?} sum_b_j={:?} tail_bound={:?} I={:?} verdict={}",
            self.b0().abs(),
            self.positive_sum(),
            self.tail_bound,
            self.functional_i,
            self.verdict
        )?;
        writeln!(out, "j,b_j,partial_sum")?;
        writeln!(out, "0,{:?},0", self.terms[0])?;
        for (j, (b, s)) in self.terms[1..].iter().zip(&self.partial_sums).enumerate() {
            writeln!(out, "{},{b:?},{s:?}", j + 1)?;
        }
        Ok(())
    }
}

/// Decides `Σ_{j≥1} b_j < |b_0|` with `b_0 < 0`.
///
/// The tail is bounded by `C J^{-2r}/(2r)` with `C = max(b_J J^{2r+1}, lim b_j j^{2r+1})`,
/// valid because `b_j j^{2r+1}` increases towards its limit.
pub fn gegenbauer_verdict(spec: &GegenbauerSeriesSpec, jmax: usize) -> Result<GegenbauerReport> {
    let terms = gegenbauer_terms(spec, jmax)?;
    let mut partial_sums = Vec::with_capacity(jmax);
    let mut s = 0.0;
    for b in &terms[1..] {
        s += b;
        partial_sums.push(s);
    }
    let p = spec.decay_exponent();
    let jf = jmax as f64;
    let c = (terms[jmax] * jf.powf(p)).max(spec.asymptotic_constant());
    let tail_bound = c * jf.powf(1.0 - p) / (p - 1.0);
    let b0 = terms[0];
    let verdict = if b0 >= 0.0 || s >= b0.abs() {
        Verdict::NotSatisfied
    } else if s + tail_bound < b0.abs() {
        Verdict::Stable
    } else {
        Verdict::Inconclusive
    };
    Ok(GegenbauerReport {
        functional_i: spec.prefactor() * (b0 + s),
        terms,
        partial_sums,
        tail_bound,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// Cnoidal families

/// How the cn² wave family is parametrized by the speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnoidalMode {
    /// `A` held fixed; the half period `L` is frozen at its value at the
    /// evaluation speed.
    FixedFlux,
    /// `A(c)` solved so the wavelength stays `2L`.
    FixedPeriod,
}

impl CnoidalMode {
    pub fn slug(self) -> &'static str {
        match self {
            CnoidalMode::FixedFlux => "fixed-flux",
            CnoidalMode::FixedPeriod => "fixed-period",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        match s {
            "fixed-flux" => Some(CnoidalMode::FixedFlux),
            "fixed-period" => Some(CnoidalMode::FixedPeriod),
            _ => None,
        }
    }
}

impl fmt::Display for CnoidalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// A named contribution to `d/dc ‖φ̂_c‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub family: Family,
    pub mode: Option<CnoidalMode>,
    pub speed: f64,
    /// Norm whose `c`-derivative decides stability.
    pub norm_sq: f64,
    /// Directly differentiated norm.
    pub derivative: f64,
    /// `I`: `-d/dc‖φ‖²` for the soliton, `-(L/2) d/dc ‖φ̂‖²` for cnoidal waves.
    pub functional_i: f64,
    /// `d/dc Σ_{n∈Z} û(n)²` (Parseval mean square), cnoidal families only.
    pub parseval_derivative: Option<f64>,
    /// Fixed-flux only: derivative with `L = λ(c)/2` allowed to drift.
    pub drifting_period_derivative: Option<f64>,
    pub terms: Vec<Term>,
    pub verdict: Verdict,
}

impl StabilityReport {
    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    pub fn terms_sum(&self) -> f64 {
        self.terms.iter().filter(|t| t.name.starts_with("term_")).map(|t| t.value).sum()
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "family={} mode={} c={:?} norm_sq={:?} d/dc={:?} I={:?} verdict={}",
            self.family,
            self.mode.map_or("-", |m| m.slug()),
            self.speed,
            self.norm_sq,
            self.derivative,
            self.functional_i,
            self.verdict
        );
        for t in &self.terms {
            s.push_str(&format!(" {}={:?}", t.name, t.value));
        }
        s
    }
}

pub const TERM_NAMES: [&str; 4] = ["term_i", "term_ii", "term_iii", "term_iv"];

/// Writes one row per report.
pub fn write_reports_csv<W: Write>(reports: &[StabilityReport], mut out: W) -> Result<()> {
    writeln!(
        out,
        "family,mode,c,norm_sq,derivative,parseval_derivative,functional_I,term_i,term_ii,term_iii,term_iv,verdict"
    )?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:?}"));
    for r in reports {
        write!(
            out,
            "{},{},{:?},{:?},{:?},{},{:?}",
            r.family,
            r.mode.map_or("", |m| m.slug()),
            r.speed,
            r.norm_sq,
            r.derivative,
            opt(r.parseval_derivative),
            r.functional_i
        )?;
        for name in TERM_NAMES {
            write!(out, ",{}", opt(r.term(name)))?;
        }
        writeln!(out, ",{}", r.verdict)?;
    }
    Ok(())
}

/// Truncated sums `Σ_{n≠0} f(n)`: terms are added until the next one is
/// below `1e-16` of the running sum, or `n = 200`.
fn symmetric_sum(f: impl Fn(f64) -> f64) -> f64 {
    let mut s: f64 = 0.0;
    for n in 1..=200 {
        let t = f(n as f64);
        if t.abs() < 1e-16 * s.abs() || t == 0.0 {
            break;
        }
        s += t;
    }
    2.0 * s
}

fn csch(x: f64) -> f64 {
    1.0 / x.sinh()
}

/// `Σ_{n≠0} n² csch²(nτ)`.
fn s2(tau: f64) -> f64 {
    symmetric_sum(|n| (n * csch(n * tau)).powi(2))
}

/// `Σ_{n≠0} n³ csch²(nτ) coth(nτ)`.
fn s3(tau: f64) -> f64 {
    symmetric_sum(|n| n.powi(3) * csch(n * tau).powi(2) / (n * tau).tanh())
}

/// Quantities of the cn² wave at one `(c, A)`.
#[derive(Debug, Clone)]
struct Cn2State {
    k: f64,
    emm: f64,
    delta: f64,
    ell: EllipticContext,
    wavelength: f64,
}

impl Cn2State {
    fn new(gamma: f64, alpha: f64, speed: f64, flux_a: f64) -> Result<Self> {
        let p = kdv_cnoidal_params(gamma, alpha, speed, flux_a)?;
        Ok(Self {
            k: p.modulus,
            emm: p.emm.unwrap(),
            delta: p.delta.unwrap(),
            ell: EllipticContext::new(p.modulus)?,
            wavelength: p.wavelength,
        })
    }

    /// `(4𝓜²K²/L⁴)(K-D)²` and `(4𝓜²π⁴/(L⁴k⁴)) S₂`.
    fn norm_parts(&self, half_period: f64) -> (f64, f64) {
        let l4 = half_period.powi(4);
        let (kk, d) = (self.ell.big_k, self.ell.legendre_d);
        let zeroth = 4.0 * (self.emm * kk * (kk - d)).powi(2) / l4;
        let series = 4.0 * (self.emm / (self.k * self.k)).powi(2) * PI.powi(4) / l4 * s2(self.ell.tau());
        (zeroth, series)
    }
}

/// Closed-form `‖φ̂‖²_{ℓ²}` (cosine-amplitude coefficients for every `n ≠ 0`)
/// and the Parseval mean square `Σ û(n)²`.
fn cn2_norms(state: &Cn2State, half_period: f64) -> (f64, f64) {
    let (zeroth, series) = state.norm_parts(half_period);
    (zeroth + series, zeroth + 0.25 * series)
}

/// Flux `A` for which the cn² wave at speed `c` has wavelength `target`.
fn flux_for_wavelength(gamma: f64, alpha: f64, speed: f64, target: f64, guess: f64) -> Result<f64> {
    let sign = gamma.signum();
    // wavelength decreases as |A| grows (with Aγ > 0)
    let excess = |log_a: f64| -> Option<f64> {
        let a = sign * log_a.exp();
        match Cn2State::new(gamma, alpha, speed, a) {
            Ok(s) => Some(s.wavelength - target),
            Err(Error::DegenerateModulus { .. }) => Some(f64::INFINITY),
            Err(_) => None,
        }
    };
    let mut lo = guess.abs().ln();
    let mut hi = lo;
    let mut f_lo = excess(lo).ok_or(Error::NoBracket { what: "fixed-period flux" })?;
    let mut f_hi = f_lo;
    let mut step = 0.05;
    for _ in 0..200 {
        if f_lo >= 0.0 && f_hi <= 0.0 {
            break;
        }
        if f_lo < 0.0 {
            lo -= step;
            f_lo = excess(lo).ok_or(Error::NoBracket { what: "fixed-period flux" })?;
        }
        if f_hi > 0.0 {
            hi += step;
            f_hi = excess(hi).ok_or(Error::NoBracket { what: "fixed-period flux" })?;
        }
        step *= 1.6;
    }
    if !(f_lo >= 0.0 && f_hi <= 0.0) {
        return Err(Error::NoBracket { what: "fixed-period flux" });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = excess(mid).ok_or(Error::NoBracket { what: "fixed-period flux" })?;
        if f >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(sign * (0.5 * (lo + hi)).exp())
}

/// Central differences at steps `1e-3|c|` and `1e-4|c|`, Richardson-combined.
fn richardson(f: impl Fn(f64) -> Result<f64>, c: f64) -> Result<f64> {
    let base = if c == 0.0 { 1.0 } else { c.abs() };
    let central = |h: f64| -> Result<f64> { Ok((f(c + h)? - f(c - h)?) / (2.0 * h)) };
    let coarse = central(1e-3 * base)?;
    let fine = central(1e-4 * base)?;
    let rel = (coarse - fine).abs() / fine.abs().max(f64::MIN_POSITIVE);
    if rel > 1e-4 {
        return Err(Error::StepSize { coarse, fine, rel });
    }
    Ok(fine + (fine - coarse) / 99.0)
}

/// `d/dc` of the cn² coefficient norm and its four-term decomposition.
///
/// `L` is held at `λ(c)/2` of the evaluation point in both modes; in
/// fixed-period mode the flux follows `c` so that the wavelength stays `2L`.
pub fn cn2_norm_derivative(
    gamma: f64,
    alpha: f64,
    speed: f64,
    flux_a: f64,
    mode: CnoidalMode,
) -> Result<StabilityReport> {
    let here = Cn2State::new(gamma, alpha, speed, flux_a)?;
    let half = 0.5 * here.wavelength;
    let state_at = |c: f64| -> Result<Cn2State> {
        match mode {
            CnoidalMode::FixedFlux => Cn2State::new(gamma, alpha, c, flux_a),
            CnoidalMode::FixedPeriod => {
                let a = flux_for_wavelength(gamma, alpha, c, here.wavelength, flux_a)?;
                Cn2State::new(gamma, alpha, c, a)
            }
        }
    };
    let (norm_sq, _) = cn2_norms(&here, half);
    let derivative = richardson(|c| Ok(cn2_norms(&state_at(c)?, half).0), speed)?;
    let parseval_derivative = richardson(|c| Ok(cn2_norms(&state_at(c)?, half).1), speed)?;
    let drifting_period_derivative = match mode {
        CnoidalMode::FixedFlux => Some(richardson(
            |c| {
                let s = state_at(c)?;
                Ok(cn2_norms(&s, 0.5 * s.wavelength).0)
            },
            speed,
        )?),
        CnoidalMode::FixedPeriod => None,
    };

    let terms = cn2_terms(&here, gamma, alpha, speed, flux_a, half, mode)?;
    let verdict = if derivative > 0.0 && parseval_derivative > 0.0 {
        Verdict::Stable
    } else {
        Verdict::NotSatisfied
    };
    Ok(StabilityReport {
        family: Family::KdvCnoidal,
        mode: Some(mode),
        speed,
        norm_sq,
        derivative,
        functional_i: -0.5 * half * derivative,
        parseval_derivative: Some(parseval_derivative),
        drifting_period_derivative,
        terms,
        verdict,
    })
}

/// The four contributions to `d/dc ‖φ̂‖²` at fixed `L`, from closed-form
/// derivatives in `k` and the mode's `dk/dc`:
///
/// ```text
/// (i)   (8𝓜K/L⁴)(K-D)² d(𝓜K)/dc
/// (ii)  (8𝓜²K²/L⁴)(K-D) d(K-D)/dc
/// (iii) (4π⁴/L⁴) 2(𝓜/k²) (k d𝓜/dc - 2𝓜 dk/dc)/k³ · S₂
/// (iv)  (8π⁵/L⁴)(𝓜/k²)² ((K' dK/dk - K dK'/dk)/K²) dk/dc · S₃
/// ```
///
/// `d𝓜/dc` in (iii) is taken from `𝓜 = (3α/γ)(1 + 3c/√Δ)` rather than
/// from `𝓜 = 6αk²/γ`, so its vanishing is a genuine check.
fn cn2_terms(
    s: &Cn2State,
    gamma: f64,
    alpha: f64,
    speed: f64,
    flux_a: f64,
    half: f64,
    mode: CnoidalMode,
) -> Result<Vec<Term>> {
    let k = s.k;
    let ell = &s.ell;
    let (kk, kkp, d) = (ell.big_k, ell.big_kprime, ell.legendre_d);
    let dk_dk = d_complete_k(k)?;
    // dK'/dk = -(E' - k²K')/(k k'²)
    let kp2 = ell.kprime * ell.kprime;
    let dkp_dk = -(ell.big_eprime - k * k * kkp) / (k * kp2);
    // dD/dk = K_k/k² - D/k
    let dd_dk = dk_dk / (k * k) - d / k;
    let root = s.delta.sqrt();

    let (dk_dc, d_delta_dc) = match mode {
        CnoidalMode::FixedFlux => (18.0 * flux_a * gamma / (k * s.delta * root), 18.0 * speed),
        CnoidalMode::FixedPeriod => {
            // c = 4α(2k²-1)K²/L², √Δ = 12αK²/L²
            let l2 = half * half;
            let dc_dk = 4.0 * alpha / l2 * (4.0 * k * kk * kk + 2.0 * (2.0 * k * k - 1.0) * kk * dk_dk);
            let dk_dc = 1.0 / dc_dk;
            let d_root_dc = 24.0 * alpha * kk * dk_dk * dk_dc / l2;
            (dk_dc, 2.0 * root * d_root_dc)
        }
    };
    let emm_from_k = 6.0 * alpha * k * k / gamma;
    let demm_dc_from_k = 12.0 * alpha * k * dk_dc / gamma;
    // 𝓜 = (3α/γ)(1 + 3c/√Δ): d/dc (c/√Δ) = (Δ - c Δ'/2)/Δ^{3/2}
    let demm_dc_direct = 9.0 * alpha / gamma * (s.delta - 0.5 * speed * d_delta_dc) / (s.delta * root);

    let l4 = half.powi(4);
    let emm = s.emm;
    let d_emmk_dc = demm_dc_from_k * kk + emm_from_k * dk_dk * dk_dc;
    let d_kd_dc = (dk_dk - dd_dk) * dk_dc;
    let tau = ell.tau();

    let term_i = 8.0 * emm * kk / l4 * (kk - d).powi(2) * d_emmk_dc;
    let term_ii = 8.0 * (emm * kk).powi(2) / l4 * (kk - d) * d_kd_dc;
    let bracket_iii = k * demm_dc_direct - 2.0 * emm * dk_dc;
    let term_iii = 4.0 * PI.powi(4) / l4 * 2.0 * (emm / (k * k)) * bracket_iii / k.powi(3) * s2(tau);
    let wronskian = (kkp * dk_dk - kk * dkp_dk) / (kk * kk);
    let term_iv = 8.0 * PI.powi(5) / l4 * (emm / (k * k)).powi(2) * wronskian * dk_dc * s3(tau);

    Ok(vec![
        Term { name: "term_i", value: term_i },
        Term { name: "term_ii", value: term_ii },
        Term { name: "term_iii", value: term_iii },
        Term { name: "term_iv", value: term_iv },
        Term { name: "dM_dc", value: demm_dc_direct },
        Term { name: "dk_dc", value: dk_dc },
        Term { name: "dK_dc", value: dk_dk * dk_dc },
        Term { name: "K_minus_D", value: kk - d },
        Term { name: "dK_minus_D_dc", value: d_kd_dc },
        Term { name: "wronskian", value: wronskian * kk * kk },
        Term { name: "bracket_iii", value: bracket_iii },
    ])
}

/// `Σ_{n≠0} n⁶ csch²(nπ)` summed to `n = 40`.
pub fn cn4_series_constant() -> f64 {
    2.0 * (1..=40).map(|n| (n as f64).powi(6) * csch(n as f64 * PI).powi(2)).sum::<f64>()
}

/// `‖φ̂‖²_{ℓ²} = 25c²/36γ² + (25c²π⁸/(9γ²K⁸)) Σ_{n≠0} n⁶csch²(nπ)` of the
/// fifth-order cnoidal wave, with `d/dc = 2/c · norm`.
pub fn cn4_norm_derivative(gamma: f64, beta: f64, speed: f64) -> Result<StabilityReport> {
    positive("cn4 norm derivative", "c", speed)?;
    positive("cn4 norm derivative", "beta", beta)?;
    if gamma == 0.0 {
        return Err(domain("cn4 norm derivative", "gamma must be nonzero"));
    }
    let kk = EllipticContext::new(SQRT_2 / 2.0)?.big_k;
    let s = cn4_series_constant();
    let g2 = gamma * gamma;
    let zeroth = 25.0 * speed * speed / (36.0 * g2);
    let series = 25.0 * speed * speed * PI.powi(8) / (9.0 * g2 * kk.powi(8)) * s;
    let norm_sq = zeroth + series;
    let parseval = zeroth + 0.25 * series;
    let derivative = 2.0 * norm_sq / speed;
    let wavelength = 2.0 * SQRT_2 * (42.0 * beta / speed).powf(0.25) * kk;
    Ok(StabilityReport {
        family: Family::FifthOrderCnoidal,
        mode: None,
        speed,
        norm_sq,
        derivative,
        functional_i: -0.25 * wavelength * derivative,
        parseval_derivative: Some(2.0 * parseval / speed),
        drifting_period_derivative: None,
        terms: vec![Term { name: "series_constant", value: s }],
        verdict: if derivative > 0.0 { Verdict::Stable } else { Verdict::NotSatisfied },
    })
}

/// Evaluates `cn2_norm_derivative` over a grid of speeds on up to `jobs` threads,
/// keeping the input order.
pub fn cn2_sweep(
    gamma: f64,
    alpha: f64,
    flux_a: f64,
    speeds: &[f64],
    mode: CnoidalMode,
    jobs: usize,
) -> Result<Vec<StabilityReport>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| {
        speeds
            .par_iter()
            .map(|&c| cn2_norm_derivative(gamma, alpha, c, flux_a, mode))
            .collect()
    })
}
