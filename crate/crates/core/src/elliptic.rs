//! Complete elliptic integrals, the nome, and the Jacobi functions sn, cn, dn.
//!
//! Everything is computed from the arithmetic-geometric mean of `1` and the
//! complementary modulus `k' = sqrt(1 - k^2)`:
//!
//! ```text
//! a_{n+1} = (a_n + b_n)/2,  b_{n+1} = sqrt(a_n b_n),  c_{n+1} = c_n^2 / (4 a_{n+1})
//! K = pi / (2 a_N)
//! E = K (1 - sum_n 2^{n-1} c_n^2)
//! ```
//!
//! The Jacobi functions use the descending Landen recursion on the same
//! sequence (`phi_N = 2^N a_N u`, then `phi_{n-1} = (phi_n + asin(c_n sin(phi_n)/a_n))/2`)
//! after reducing the argument to the first quarter period.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{domain, Result};

/// Below this modulus the trigonometric limits are used directly.
pub const TINY_MODULUS: f64 = 1e-8;

/// Largest modulus accepted for anything that needs `K(k)`.
pub const MAX_MODULUS: f64 = 1.0 - 1e-10;

const AGM_TOL: f64 = 1e-17;
const AGM_MAX_ITER: usize = 64;

/// AGM sequence started at `a_0 = 1`, `b_0 = k'`, `c_0 = k`.
#[derive(Debug, Clone)]
struct Agm {
    a: Vec<f64>,
    c: Vec<f64>,
}

impl Agm {
    fn new(k: f64, kprime: f64) -> Self {
        let mut a = vec![1.0];
        let mut c = vec![k];
        let mut b = kprime;
        for _ in 0..AGM_MAX_ITER {
            let an = *a.last().unwrap();
            let cn = *c.last().unwrap();
            if cn.abs() <= AGM_TOL * an {
                break;
            }
            let next_a = 0.5 * (an + b);
            // (a - b)/2 stalls at rounding level; c_n^2 / (4 a_{n+1}) does not
            let next_c = cn * cn / (4.0 * next_a);
            b = (an * b).sqrt();
            a.push(next_a);
            c.push(next_c);
        }
        Self { a, c }
    }

    fn mean(&self) -> f64 {
        *self.a.last().unwrap()
    }

    fn complete_k(&self) -> f64 {
        FRAC_PI_2 / self.mean()
    }

    /// `sum_n 2^{n-1} c_n^2`, so that `K - E = K * deficit`.
    fn deficit(&self) -> f64 {
        let mut sum = 0.0;
        let mut pow = 0.5;
        for cn in &self.c {
            sum += pow * cn * cn;
            pow *= 2.0;
        }
        sum
    }

    fn complete_e(&self) -> f64 {
        self.complete_k() * (1.0 - self.deficit())
    }

    /// Landen amplitude `phi` with `sn = sin(phi)` for `0 <= u <= K`.
    fn amplitude(&self, u: f64) -> (f64, f64) {
        let n = self.a.len() - 1;
        let mut phi = (2f64).powi(n as i32) * self.a[n] * u;
        let mut prev = phi;
        for i in (1..=n).rev() {
            prev = phi;
            let s = (self.c[i] / self.a[i] * phi.sin()).clamp(-1.0, 1.0);
            phi = 0.5 * (phi + s.asin());
        }
        (phi, prev)
    }
}

fn complementary(k: f64) -> f64 {
    ((1.0 - k) * (1.0 + k)).max(0.0).sqrt()
}

fn check_modulus(what: &'static str, k: f64) -> Result<()> {
    if !k.is_finite() || !(0.0..1.0).contains(&k) {
        return Err(domain(what, format!("modulus must satisfy 0 <= k < 1, got {k}")));
    }
    Ok(())
}

/// Complete elliptic integral of the first kind, `K(k)`, for `0 <= k < 1`.
pub fn complete_k(k: f64) -> Result<f64> {
    check_modulus("complete_K", k)?;
    if k < TINY_MODULUS {
        return Ok(FRAC_PI_2 * (1.0 + 0.25 * k * k));
    }
    Ok(Agm::new(k, complementary(k)).complete_k())
}

/// Complete elliptic integral of the second kind, `E(k)`, for `0 <= k <= 1`.
pub fn complete_e(k: f64) -> Result<f64> {
    if k == 1.0 {
        return Ok(1.0);
    }
    if !k.is_finite() || !(0.0..=1.0).contains(&k) {
        return Err(domain("complete_E", format!("modulus must satisfy 0 <= k <= 1, got {k}")));
    }
    if k < TINY_MODULUS {
        return Ok(FRAC_PI_2 * (1.0 - 0.25 * k * k));
    }
    Ok(Agm::new(k, complementary(k)).complete_e())
}

/// Legendre's integral `D(k) = (K - E)/k^2 = ∫ sin²θ / sqrt(1 - k² sin²θ) dθ`.
///
/// `K - E` is taken directly from the AGM deficit, so there is no
/// cancellation for small `k`; at `k = 0` the limit `π/4` is returned.
pub fn legendre_d(k: f64) -> Result<f64> {
    check_modulus("legendre_D", k)?;
    if k < TINY_MODULUS {
        return Ok(FRAC_PI_4 * (1.0 + 0.375 * k * k));
    }
    let agm = Agm::new(k, complementary(k));
    Ok(agm.complete_k() * agm.deficit() / (k * k))
}

/// `dK/dk = (E - k'^2 K) / (k k'^2)`.
pub fn d_complete_k(k: f64) -> Result<f64> {
    check_modulus("dK/dk", k)?;
    if k < TINY_MODULUS {
        return Ok(FRAC_PI_4 * k);
    }
    // E - k'^2 K = k^2 K - (K - E) = k^2 (K - D)
    let kp2 = (1.0 - k) * (1.0 + k);
    Ok(k * (complete_k(k)? - legendre_d(k)?) / kp2)
}

/// `dE/dk = (E - K)/k`.
pub fn d_complete_e(k: f64) -> Result<f64> {
    check_modulus("dE/dk", k)?;
    Ok(-k * legendre_d(k)?)
}

/// Jacobi `cn(z, k)`.
pub fn jacobi_cn(z: f64, k: f64) -> Result<f64> {
    Ok(EllipticContext::new(k)?.cn(z))
}

/// Modulus-dependent constants, computed once.
#[derive(Debug, Clone)]
pub struct EllipticContext {
    pub k: f64,
    pub kprime: f64,
    pub big_k: f64,
    pub big_e: f64,
    pub big_kprime: f64,
    pub big_eprime: f64,
    pub legendre_d: f64,
    pub nome: f64,
    agm: Agm,
}

impl EllipticContext {
    pub fn new(k: f64) -> Result<Self> {
        check_modulus("EllipticContext", k)?;
        let kprime = complementary(k);
        let agm = Agm::new(k, kprime);
        let (big_k, big_e) = if k < TINY_MODULUS {
            (complete_k(k)?, complete_e(k)?)
        } else {
            (agm.complete_k(), agm.complete_e())
        };
        let (big_kprime, big_eprime) = if k == 0.0 {
            (f64::INFINITY, 1.0)
        } else {
            let comp = Agm::new(kprime, k);
            (comp.complete_k(), comp.complete_e())
        };
        let nome = (-PI * big_kprime / big_k).exp();
        Ok(Self {
            k,
            kprime,
            big_k,
            big_e,
            big_kprime,
            big_eprime,
            legendre_d: legendre_d(k)?,
            nome,
            agm,
        })
    }

    /// `π K'/K`, the exponent of the nome.
    pub fn tau(&self) -> f64 {
        PI * self.big_kprime / self.big_k
    }

    /// `q^n / (1 - q^{2n})`.
    pub fn nome_ratio(&self, n: u32) -> f64 {
        let qn = self.nome.powi(n as i32);
        qn / (1.0 - qn * qn)
    }

    /// `(sn, cn, dn)` at real argument `z`.
    pub fn sn_cn_dn(&self, z: f64) -> (f64, f64, f64) {
        if self.k < TINY_MODULUS {
            return (z.sin(), z.cos(), 1.0);
        }
        let quarter = self.big_k;
        let period = 4.0 * quarter;
        let sign_z = if z < 0.0 { -1.0 } else { 1.0 };
        let mut r = z.abs() % period;
        let mut sign_sn = sign_z;
        let mut sign_cn = 1.0;
        if r >= 2.0 * quarter {
            r -= 2.0 * quarter;
            sign_sn = -sign_sn;
            sign_cn = -sign_cn;
        }
        if r > quarter {
            r = 2.0 * quarter - r;
            sign_cn = -sign_cn;
        }
        let (phi0, phi1) = self.agm.amplitude(r);
        let (s, c) = phi0.sin_cos();
        let dn = if self.agm.a.len() > 1 {
            c / (phi1 - phi0).cos()
        } else {
            1.0
        };
        (sign_sn * s, sign_cn * c, dn)
    }

    pub fn cn(&self, z: f64) -> f64 {
        self.sn_cn_dn(z).1
    }

    pub fn sn(&self, z: f64) -> f64 {
        self.sn_cn_dn(z).0
    }

    pub fn dn(&self, z: f64) -> f64 {
        self.sn_cn_dn(z).2
    }
}
