//! Seeded, reproducible carrier samplers.
//!
//! A sampler produces `(a, b)` pairs for a morphism's contract run. All
//! randomness flows through the per-trial RNG handed in by the checker, so
//! a report is a pure function of (seed, window, trial count).

use crate::tukey::{Carrier, Window};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

type PairFn = Arc<dyn Fn(&mut ChaCha8Rng, &Window) -> (Carrier, Carrier) + Send + Sync>;

#[derive(Clone)]
pub struct Sampler {
    gen: PairFn,
}

impl Sampler {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&mut ChaCha8Rng, &Window) -> (Carrier, Carrier) + Send + Sync + 'static,
    {
        Sampler { gen: Arc::new(f) }
    }

    pub fn pair(&self, rng: &mut ChaCha8Rng, w: &Window) -> (Carrier, Carrier) {
        (self.gen)(rng, w)
    }
}
