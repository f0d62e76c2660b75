//! Closed-form evolution against the FFT propagator, and cross-checks
//! between the point-detector distributions.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toa_core::distributions::point_distribution;
use toa_core::numerics::{plan_grid, propagate_spectral, GridState};
use toa_core::{GaussianTerm, Kind, PacketSpec};

fn random_spec(rng: &mut ChaCha8Rng) -> PacketSpec {
    let n = rng.random_range(1..=3);
    let terms = (0..n)
        .map(|_| {
            GaussianTerm::new(
                Complex64::from_polar(rng.random_range(0.3..1.0), rng.random_range(0.0..std::f64::consts::TAU)),
                rng.random_range(-5.0..5.0),
                rng.random_range(0.5..2.0),
                rng.random_range(-3.0..3.0),
            )
        })
        .collect();
    PacketSpec::new(terms).unwrap()
}

#[test]
fn spectral_propagator_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4 {
        let spec = random_spec(&mut rng);
        let t = rng.random_range(0.5..15.0);
        let (lo, hi, n) = plan_grid(&spec.components(), t);
        let g = GridState::sample(lo, hi, n, |x| spec.psi(x, 0.0)).unwrap();
        let h = propagate_spectral(&g, t).unwrap();
        let rho = h.density();
        let peak = rho.iter().copied().fold(0.0, f64::max);
        for (j, r) in rho.iter().enumerate().filter(|(_, r)| **r > 1e-3 * peak) {
            let exact = spec.density(h.x(j), t);
            assert!((r - exact).abs() / exact < 1e-8, "x = {}: {r} vs {exact}", h.x(j));
        }
    }
}

#[test]
fn kijowski_and_flux_agree_for_fast_packet() {
    let spec = PacketSpec::gaussian(-10.0, 1.0, 7.0).unwrap();
    let times: Vec<f64> = (1..=400).map(|i| i as f64 * 0.01).collect();
    let k = point_distribution(Kind::Kijowski, &spec, 0.0).unwrap().sample(&times).unwrap();
    let f = point_distribution(Kind::Flux, &spec, 0.0).unwrap().sample(&times).unwrap();
    let peak = k.peak().unwrap().1;
    assert!(k.sup_distance(&f) / peak < 0.01, "{}", k.sup_distance(&f) / peak);
}

#[test]
fn flux_approaches_semiclassical_far_away() {
    let spec = PacketSpec::gaussian(-1000.0, 1.0, 7.0).unwrap();
    let times: Vec<f64> = (0..=400).map(|i| 120.0 + i as f64 * 0.2).collect();
    let f = point_distribution(Kind::Flux, &spec, 0.0).unwrap().sample(&times).unwrap();
    let sc = point_distribution(Kind::SemiClassical, &spec, 0.0).unwrap().sample(&times).unwrap();
    let peak = f.peak().unwrap().1;
    assert!(f.sup_distance(&sc) / peak < 0.01, "{}", f.sup_distance(&sc) / peak);
}
