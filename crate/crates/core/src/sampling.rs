//! Seeded random phase points for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::state::ContactState;

pub struct StateSampler {
    rng: ChaCha8Rng,
    pub coord_range: f64,
    pub lambda_range: (f64, f64),
}

impl StateSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            coord_range: 2.0,
            lambda_range: (0.1, 5.0),
        }
    }

    pub fn state(&mut self, n: usize) -> ContactState {
        let r = self.coord_range;
        let q = (0..n).map(|_| self.rng.gen_range(-r..r)).collect();
        let p = (0..n).map(|_| self.rng.gen_range(-r..r)).collect();
        let z = self.rng.gen_range(-r..r);
        let lambda = self.rng.gen_range(self.lambda_range.0..self.lambda_range.1);
        ContactState::new(q, p, z, lambda, 0.0)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
