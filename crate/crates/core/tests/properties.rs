use std::f64::consts::PI;

use proptest::prelude::*;

use kdv5::elliptic::{complete_e, complete_k, legendre_d, EllipticContext};
use kdv5::fourier::{analytic_coeffs, cn2_coeffs, pf2_check};
use kdv5::pde::{orbital_distance, periodic_grid, spectral_shift, SpectralState};
use kdv5::stability::{cn4_norm_derivative, gegenbauer_verdict, GegenbauerSeriesSpec};
use kdv5::waves::{build_fifth_order_cnoidal, build_kdv_cnoidal, build_kdv_soliton, kdv_cnoidal_params, MediumParams};

fn modulus() -> impl Strategy<Value = f64> {
    0.01f64..0.99
}

/// `(c, 𝒜)` with `𝒜γ > 0`, away from the solitary limit.
fn cnoidal_speed_flux() -> impl Strategy<Value = (f64, f64)> {
    (0.2f64..3.0, 0.1f64..5.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sn_cn_pythagoras(k in modulus(), z in -30.0f64..30.0) {
        let e = EllipticContext::new(k).unwrap();
        let (sn, cn, _) = e.sn_cn_dn(z);
        prop_assert!((sn * sn + cn * cn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cn_is_even_and_has_period_4k(k in modulus(), z in -20.0f64..20.0) {
        let e = EllipticContext::new(k).unwrap();
        prop_assert_eq!(e.cn(-z), e.cn(z));
        prop_assert!((e.cn(z + 4.0 * e.big_k) - e.cn(z)).abs() < 1e-12);
    }

    #[test]
    fn context_identities(k in modulus()) {
        let e = EllipticContext::new(k).unwrap();
        prop_assert!((e.kprime * e.kprime + k * k - 1.0).abs() < 1e-14);
        prop_assert!((e.legendre_d * k * k - (e.big_k - e.big_e)).abs() < 1e-13);
        prop_assert!(e.nome > 0.0 && e.nome < 1.0);
        prop_assert_eq!(e.big_k, complete_k(k).unwrap());
        prop_assert_eq!(e.big_e, complete_e(k).unwrap());
        prop_assert_eq!(e.legendre_d, legendre_d(k).unwrap());
    }

    #[test]
    fn cnoidal_parameters_are_consistent((c, a) in cnoidal_speed_flux(), alpha in 0.2f64..3.0, gamma in 0.2f64..3.0) {
        let p = kdv_cnoidal_params(gamma, alpha, c, a).unwrap();
        let delta = 9.0 * c * c + 24.0 * a * gamma;
        let k2 = p.modulus * p.modulus;
        prop_assert!((k2 - 0.5 * (1.0 + 3.0 * c / delta.sqrt())).abs() < 1e-13);
        let emm = p.emm.unwrap();
        prop_assert!((emm - 6.0 * alpha * k2 / gamma).abs() < 1e-13 * emm.abs().max(1.0));
        let big_k = complete_k(p.modulus).unwrap();
        let lambda = 4.0 * (3.0 * alpha).sqrt() * big_k / delta.powf(0.25);
        prop_assert!((p.wavelength - lambda).abs() < 1e-12 * lambda);
    }

    #[test]
    fn cn2_profile_is_positive_even_periodic((c, a) in cnoidal_speed_flux()) {
        let p = build_kdv_cnoidal(1.0, 1.0, c, a).unwrap();
        let lambda = p.cnoidal.unwrap().wavelength;
        for &x in p.xi() {
            let u = p.eval(x);
            prop_assert!(u > 0.0);
            prop_assert!((p.eval(-x) - u).abs() < 1e-12);
            prop_assert!((p.eval(x + lambda) - u).abs() < 1e-11);
            prop_assert!((p.compact_form(x).unwrap() - u).abs() < 1e-11);
        }
    }

    #[test]
    fn cn2_coefficients_positive_and_pf2((c, a) in cnoidal_speed_flux()) {
        let p = build_kdv_cnoidal(1.0, 1.0, c, a).unwrap();
        let seq = cn2_coeffs(&p.cnoidal.unwrap(), 24).unwrap();
        prop_assert!(seq.is_strictly_positive());
        for n in 1..=24 {
            prop_assert_eq!(seq.get(n), seq.get(-n));
        }
        prop_assert!(pf2_check(&seq, 12).unwrap().passed);
    }

    #[test]
    fn parseval_matches_quadrature((c, a) in cnoidal_speed_flux()) {
        let p = build_kdv_cnoidal(1.0, 1.0, c, a).unwrap();
        let seq = analytic_coeffs(&p, 60).unwrap();
        let u = p.samples();
        let mean_sq = u.iter().map(|v| v * v).sum::<f64>() / u.len() as f64;
        prop_assert!((seq.l2_norm_sq() - mean_sq).abs() < 1e-8 * mean_sq);
    }

    #[test]
    fn cn4_derivative_is_twice_norm_over_speed(c in 0.1f64..5.0, beta in 0.2f64..3.0, gamma in 0.2f64..3.0) {
        let r = cn4_norm_derivative(gamma, beta, c).unwrap();
        prop_assert!((r.derivative / r.norm_sq - 2.0 / c).abs() < 1e-12 / c);
        let p = build_fifth_order_cnoidal(gamma, beta, c).unwrap();
        prop_assert!((p.modulus().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn shifted_profile_is_on_the_orbit(shift in -5.0f64..5.0) {
        let p = build_kdv_soliton(1.0, 1.0, 1.0).unwrap();
        let length = p.domain_length();
        let x = periodic_grid(256, length);
        let base: Vec<f64> = x.iter().map(|&x| p.eval(x)).collect();
        let moved = spectral_shift(&base, length, shift);
        for order in [0, 1, 2] {
            let d = orbital_distance(&moved, &base, length, order).unwrap();
            prop_assert!(d.distance < 1e-10, "order {} distance {:e}", order, d.distance);
            prop_assert!((d.shift - shift).abs() < 1e-6);
        }
    }

    #[test]
    fn steps_keep_conjugate_symmetry(seed in 0u64..1000) {
        let x = periodic_grid(256, 2.0 * PI);
        let phase = seed as f64 * 0.01;
        let u: Vec<f64> = x.iter().map(|&x| 0.3 * (x + phase).cos() + 0.1 * (3.0 * x).sin()).collect();
        let params = MediumParams { gamma: 1.0, alpha: 1.0, beta: 1e-3, cee: 0.0, speed: 0.0, flux_a: 0.0, flux_b: 0.0 };
        let mut s = SpectralState::new(&u, 2.0 * PI, params).unwrap();
        for _ in 0..10 {
            s.step(1e-3).unwrap();
        }
        prop_assert!(s.conjugate_symmetry_defect() < 1e-13);
    }
}

#[test]
fn gegenbauer_partial_sums_increase_with_jmax() {
    let spec = GegenbauerSeriesSpec::fifth_order(1.0);
    let r = gegenbauer_verdict(&spec, 200).unwrap();
    assert!(r.partial_sums.windows(2).all(|w| w[1] >= w[0]));
    let mut prev = 0.0;
    for jmax in [1, 2, 5, 20, 100] {
        let s = gegenbauer_verdict(&spec, jmax).unwrap().positive_sum();
        assert!(s > prev);
        prev = s;
    }
}

#[test]
fn complete_integrals_are_monotone() {
    let ks: Vec<f64> = (1..=19).map(|i| 0.05 * i as f64).collect();
    let ctx: Vec<EllipticContext> = ks.iter().map(|&k| EllipticContext::new(k).unwrap()).collect();
    for w in ctx.windows(2) {
        assert!(w[1].big_k > w[0].big_k);
        assert!(w[1].big_kprime < w[0].big_kprime);
    }
}

#[test]
fn coefficient_decay_rates() {
    let p = build_kdv_cnoidal(1.0, 1.0, 1.0, 1.0).unwrap();
    let e = p.elliptic().unwrap();
    let seq = cn2_coeffs(&p.cnoidal.unwrap(), 16).unwrap();
    // n e^{-nτ}: a(n+1)/a(n) · n/(n+1) → e^{-τ}
    for n in 8..16 {
        let ratio = seq.get(n + 1) / seq.get(n) * n as f64 / (n + 1) as f64;
        assert!((ratio / (-e.tau()).exp() - 1.0).abs() < 1e-6, "n = {n}");
    }
    let q = build_fifth_order_cnoidal(1.0, 1.0, 1.0).unwrap();
    let seq = analytic_coeffs(&q, 12).unwrap();
    for n in 6..12 {
        let ratio = seq.get(n + 1) / seq.get(n) * (n as f64 / (n + 1) as f64).powi(3);
        assert!((ratio / (-PI).exp() - 1.0).abs() < 1e-6, "n = {n}");
    }
}
