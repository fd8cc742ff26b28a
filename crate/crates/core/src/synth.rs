//! Seeded synthetic datasets with a known generative price model.
//!
//! Prices are the sum of one contribution per feature block plus Gaussian
//! noise. Amenities carry the largest share of variance, then property,
//! then emotions and traffic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::dataset::{Dataset, PropertyRecord};
use crate::schema::NUM_FEATURES;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub rows: usize,
    pub seed: u64,
    /// Standard deviation of the additive noise, RMB/m².
    pub noise: f64,
}

impl SynthConfig {
    pub fn new(rows: usize, seed: u64) -> Self {
        SynthConfig {
            rows,
            seed,
            noise: 4000.0,
        }
    }
}

/// Per-block contributions to the noiseless price of `f`.
pub fn block_contributions(f: &[f64; NUM_FEATURES]) -> [f64; 4] {
    let property = 350.0 * (f[0] - 2000.0) + 6000.0 * f[1] + 2500.0 * f[2] - 1200.0 * f[3]
        + 1500.0 * f[5]
        - 400_000.0 * ((f[6] - 39.9).powi(2) + (f[7] - 116.4).powi(2));
    let amenity = 700.0 * f[8] - 40.0 * f[9] + 14000.0 * (f[10] / 4.0).tanh() - 12.0 * f[11]
        + 400.0 * f[12]
        + 300.0 * f[14]
        - 9.0 * f[15]
        + 270.0 * f[16]
        - 15.0 * f[17]
        - 120.0 * f[18]
        + 6.0 * f[19];
    let traffic = -350.0 * (f[20] - 35.0);
    let emotions = 180.0 * (f[23] - 20.0) - 160.0 * (f[25] - 20.0) + 60.0 * (f[22] - 20.0);
    [property, amenity, traffic, emotions]
}

pub fn generate(config: SynthConfig) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise = Normal::new(0.0, config.noise).expect("finite noise");
    let busy = Poisson::new(12.0).expect("positive rate");
    let sparse = Poisson::new(3.0).expect("positive rate");

    let records = (0..config.rows)
        .map(|_| {
            let mut f = [0.0; NUM_FEATURES];
            f[0] = rng.gen_range(1975..=2018) as f64;
            f[1] = if rng.gen_bool(0.6) { 1.0 } else { 0.0 };
            f[2] = rng.gen_range(1..=4) as f64;
            f[3] = rng.gen_range(0..=2) as f64;
            f[4] = rng.gen_range(0..=1) as f64;
            f[5] = rng.gen_range(1..=3) as f64;
            f[6] = rng.gen_range(39.75..40.05);
            f[7] = rng.gen_range(116.2..116.6);
            for (slot, i) in (8..=18).step_by(2).enumerate() {
                let count: f64 = if slot == 1 {
                    sparse.sample(&mut rng)
                } else {
                    busy.sample(&mut rng)
                };
                f[i] = count;
                f[i + 1] = if count == 0.0 {
                    1000.0
                } else {
                    rng.gen_range(150.0..900.0)
                };
            }
            f[20] = rng.gen_range(15.0..60.0);
            let weights: [f64; 5] = std::array::from_fn(|_| rng.gen_range(0.05..1.0));
            let total: f64 = weights.iter().sum();
            for (j, w) in weights.iter().enumerate() {
                f[21 + j] = (100.0 * w / total).min(100.0);
            }
            let price =
                60_000.0 + block_contributions(&f).iter().sum::<f64>() + noise.sample(&mut rng);
            PropertyRecord::new(f, price.max(1000.0))
        })
        .collect();
    Dataset::new(
        records,
        format!("synthetic(rows={}, seed={})", config.rows, config.seed),
    )
    .expect("generator respects record invariants")
}
