//! Statistical properties of the random models, with thresholds fixed here.

use fpreg_core::randmodel::{sample_bernoulli, sample_coupled};
use fpreg_core::SpaceDescriptor;

#[test]
fn bernoulli_size_concentrates() {
    let s = SpaceDescriptor::new(3, 5).unwrap();
    let (n, q) = (s.size() as f64, 0.3);
    let radius = 4.0 * (n * q * (1.0 - q)).sqrt();
    let inside = (0..10_000u64)
        .filter(|&seed| (sample_bernoulli(s, q, seed).unwrap().card() as f64 - q * n).abs() <= radius)
        .count();
    assert!(inside >= 9_990, "{inside} of 10000 within 4 sd");
}

#[test]
fn coupled_sampler_second_stage_is_small() {
    let s = SpaceDescriptor::new(3, 10).unwrap();
    let r = (0.9 * s.size() as f64).floor() as usize;
    let sigma: f64 = 0.3;
    let bound = 2.0 * sigma.powi(4) * r as f64;
    let mut small = 0;
    for seed in 0..1000 {
        let c = sample_coupled(s, r, sigma, seed).unwrap();
        assert_eq!(c.set.card(), r);
        if c.r2_size as f64 <= bound {
            small += 1;
        }
    }
    assert!(small >= 990, "{small} of 1000 seeds with |R2| <= 2 sigma^4 r");
}
