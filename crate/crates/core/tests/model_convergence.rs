//! Coefficient recovery for the online weight model on synthetic data drawn
//! from known convex coefficients.

use docket_core::weight::{update_coefficients, FeatureVector, OutcomeSample, WeightModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const HIDDEN: [f64; 5] = [0.4, 0.3, 0.1, 0.1, 0.1];

fn synthetic_samples(seed: u64, n: usize, sigma: f64) -> Vec<OutcomeSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).unwrap();
    (0..n)
        .map(|_| {
            let x: [f64; 5] = std::array::from_fn(|_| rng.random::<f64>());
            let clean: f64 = x.iter().zip(HIDDEN).map(|(a, b)| a * b).sum();
            OutcomeSample {
                features: FeatureVector::from_array(x),
                target: (clean + noise.sample(&mut rng)).clamp(0.0, 1.0),
            }
        })
        .collect()
}

fn train(samples: &[OutcomeSample]) -> WeightModel {
    let mut model = WeightModel::default();
    for s in samples {
        model = update_coefficients(&model, s);
        assert!(model.invariants_hold(), "invariant broken: {model:?}");
    }
    model
}

fn linf(a: [f64; 5], b: [f64; 5]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn recovers_hidden_coefficients_from_5000_samples() {
    for seed in [1, 7, 42, 2025] {
        let model = train(&synthetic_samples(seed, 5_000, 0.01));
        let err = linf(model.coefficients(), HIDDEN);
        eprintln!("seed {seed}: L-inf {err:.4}");
        assert!(
            err < 0.05,
            "seed {seed}: L-inf error {err}, learned {:?}",
            model.coefficients()
        );
        assert_eq!(model.samples_seen(), 5_000);
    }
}
