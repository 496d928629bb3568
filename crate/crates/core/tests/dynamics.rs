use std::f64::consts::PI;

use kdv5::pde::{
    orbital_distance, periodic_grid, recommended_settings, sobolev_norm, spectral_shift, stability_experiment,
    ExperimentConfig, SpectralState,
};
use kdv5::waves::{build_fifth_order_soliton, build_kdv_cnoidal, build_kdv_soliton, MediumParams};
use kdv5::Error;

/// `min_y ‖f - φ(·-y)‖` over a dense uniform scan of shifts.
fn brute_force_distance(field: &[f64], reference: &[f64], length: f64, order: u32, span: f64) -> (f64, f64) {
    (0..=2000)
        .map(|i| {
            let y = -span + 2.0 * span * i as f64 / 2000.0;
            let moved = spectral_shift(reference, length, y);
            let diff: Vec<f64> = field.iter().zip(&moved).map(|(a, b)| a - b).collect();
            (sobolev_norm(&diff, length, order).unwrap(), y)
        })
        .fold((f64::INFINITY, 0.0), |best, cur| if cur.0 < best.0 { cur } else { best })
}

#[test]
fn cosine_perturbation_distance_is_its_norm() {
    let p = build_kdv_cnoidal(1.0, 1.0, 1.0, 1.0).unwrap();
    let length = p.domain_length();
    let x = periodic_grid(128, length);
    let base: Vec<f64> = x.iter().map(|&x| p.eval(x)).collect();
    let eps = 1e-3;
    let bump: Vec<f64> = x.iter().map(|&x| eps * (2.0 * PI * x / length).cos()).collect();
    let field: Vec<f64> = base.iter().zip(&bump).map(|(a, b)| a + b).collect();
    for order in [0, 1, 2] {
        let d = orbital_distance(&field, &base, length, order).unwrap();
        let expected = sobolev_norm(&bump, length, order).unwrap();
        assert!((d.distance / expected - 1.0).abs() < 0.05, "order {order}: {} vs {expected}", d.distance);
        let (scan, _) = brute_force_distance(&field, &base, length, order, 0.05);
        assert!(d.distance <= scan * (1.0 + 1e-9), "order {order}: {} above scan {scan}", d.distance);
    }
}

#[test]
fn scaled_profile_distance_matches_scan() {
    let p = build_kdv_soliton(1.0, 1.0, 1.0).unwrap();
    let length = p.domain_length();
    let x = periodic_grid(256, length);
    let base: Vec<f64> = x.iter().map(|&x| p.eval(x)).collect();
    let field: Vec<f64> = base.iter().map(|v| 1.01 * v).collect();
    let d = orbital_distance(&field, &base, length, 1).unwrap();
    let (scan, y) = brute_force_distance(&field, &base, length, 1, 0.5);
    assert!((d.distance - scan).abs() < 1e-3 * scan);
    assert!(d.shift.abs() < 1e-6 && y.abs() < 1e-3);
    let norm = sobolev_norm(&base, length, 1).unwrap();
    assert!((d.distance / (0.01 * norm) - 1.0).abs() < 1e-9);
}

#[test]
fn fifth_order_soliton_travels_unchanged() {
    let p = build_fifth_order_soliton(1.0, 1.0, 1.0).unwrap();
    let length = p.domain_length();
    let x = periodic_grid(1024, length);
    let u0: Vec<f64> = x.iter().map(|&x| p.eval(x)).collect();
    let mut s = SpectralState::new(&u0, length, p.params).unwrap();
    let records = s.evolve(10.0, 0.01, 100, None).unwrap();
    let (m0, p0) = (records[0].mass, records[0].momentum);
    for r in &records {
        assert!((r.mass - m0).abs() < 1e-10 * m0.abs());
        assert!((r.momentum - p0).abs() < 1e-8 * p0);
    }
    let d = orbital_distance(&s.field(), &u0, length, 0).unwrap();
    assert!(d.distance < 1e-5 * p.amplitude(), "L2 distance {:e}", d.distance);
    let travelled = p.params.speed * 10.0;
    assert!((d.shift - travelled).abs() < 1e-3, "shift {} vs {travelled}", d.shift);
}

#[test]
fn unperturbed_experiment_stays_on_orbit() {
    let p = build_kdv_soliton(1.0, 1.0, 1.0).unwrap();
    let (grid_n, dt) = recommended_settings(p.family);
    let cfg = ExperimentConfig { grid_n, dt, ..ExperimentConfig::default() };
    let r = stability_experiment(&p, &cfg).unwrap();
    assert!(r.records.len() > 50);
    assert!(r.max_h1() < 1e-5 * r.amplitude && r.max_h2() < 1e-5 * r.amplitude, "{}", r.summary());
    assert!(r.records.windows(2).all(|w| w[1].time > w[0].time));
}

#[test]
fn blow_up_is_reported_with_time() {
    let x = periodic_grid(64, 2.0 * PI);
    let u: Vec<f64> = x.iter().map(|&x| 50.0 * x.cos()).collect();
    let params = MediumParams { gamma: 1.0, alpha: 0.0, beta: 0.0, cee: 0.0, speed: 0.0, flux_a: 0.0, flux_b: 0.0 };
    let mut s = SpectralState::new(&u, 2.0 * PI, params).unwrap();
    match s.evolve(10.0, 0.5, 1, None) {
        Err(Error::BlowUp { time, max_abs }) => {
            assert!(time > 0.0 && time <= 10.0);
            assert!(max_abs > 100.0 * 50.0);
        }
        other => panic!("expected blow-up, got {other:?}"),
    }
}
