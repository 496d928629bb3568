//! FFT plumbing shared by the residual checks, the coefficient oracle and
//! the time integrator.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse complex FFT pair of a fixed length.
///
/// `forward` is unnormalized; `inverse` divides by `n` so the pair is an
/// identity.
#[derive(Clone)]
pub struct FftPair {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPair").field("n", &self.n).finish()
    }
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        buf
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
        let scale = 1.0 / self.n as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    pub fn inverse_real(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let mut buf = spectrum.to_vec();
        self.inverse(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}

/// Signed integer mode index for FFT slot `i` (0, 1, …, n/2, −n/2+1, …, −1).
/// The Nyquist slot is reported as `+n/2`.
pub fn mode_index(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Angular wavenumbers `2π m / length` in FFT order.
pub fn wavenumbers(n: usize, length: f64) -> Vec<f64> {
    (0..n)
        .map(|i| 2.0 * PI * mode_index(i, n) as f64 / length)
        .collect()
}

/// Relative size below which trailing Fourier modes count as rounding noise.
pub const ROUNDOFF_MODE_LEVEL: f64 = 1e-13;

/// Spectral derivatives of orders `0..=max_order` of a periodic sample set
/// covering exactly one period of `length`.
///
/// Modes above the last one exceeding [`ROUNDOFF_MODE_LEVEL`] of the largest
/// are dropped, so rounding noise is not amplified by `κ^order`.
pub fn periodic_derivatives(values: &[f64], length: f64, max_order: u32) -> Vec<Vec<f64>> {
    let n = values.len();
    let fft = FftPair::new(n);
    let mut spec = fft.forward_real(values);
    let peak = spec.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let bandwidth = (0..n)
        .filter(|&i| spec[i].norm() > ROUNDOFF_MODE_LEVEL * peak)
        .map(|i| mode_index(i, n).unsigned_abs())
        .max()
        .unwrap_or(0);
    for (i, c) in spec.iter_mut().enumerate() {
        if mode_index(i, n).unsigned_abs() > bandwidth {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    let kappa = wavenumbers(n, length);
    (0..=max_order)
        .map(|order| {
            if order == 0 {
                return values.to_vec();
            }
            let d: Vec<Complex64> = spec
                .iter()
                .zip(&kappa)
                .enumerate()
                .map(|(i, (&c, &k))| {
                    if n % 2 == 0 && i == n / 2 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        c * Complex64::new(0.0, k).powu(order)
                    }
                })
                .collect();
            fft.inverse_real(&d)
        })
        .collect()
}

/// Finite-difference weights for the `order`-th derivative at `x0` using the
/// stencil `nodes` (Fornberg's recursion).
pub fn fd_weights(x0: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Central finite-difference derivatives of orders `0..=4` on a uniform
/// grid, eighth-order accurate, evaluated at interior points
/// `half_width..n-half_width` with `half_width = 5`.
pub fn central_derivatives_8th(values: &[f64], h: f64) -> (usize, Vec<Vec<f64>>) {
    const HW: usize = 5;
    let n = values.len();
    let nodes: Vec<f64> = (0..=2 * HW).map(|i| i as f64 - HW as f64).collect();
    let mut out = Vec::with_capacity(5);
    for order in 0..=4usize {
        // order 1,2 need only 9 points for 8th order; 3,4 need 11
        let stencil: &[f64] = if order <= 2 { &nodes[1..2 * HW] } else { &nodes[..] };
        let w = fd_weights(0.0, stencil, order);
        let offset = if order <= 2 { 1 } else { 0 };
        let scale = h.powi(order as i32);
        let col: Vec<f64> = (HW..n.saturating_sub(HW))
            .map(|i| {
                let base = i - HW + offset;
                w.iter()
                    .enumerate()
                    .map(|(j, wj)| wj * values[base + j])
                    .sum::<f64>()
                    / scale
            })
            .collect();
        out.push(col);
    }
    (HW, out)
}
