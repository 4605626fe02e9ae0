//! Spike sources: fixed-rate trains and seeded Poisson trains, sampled one
//! integration window at a time.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::params::SourceKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeSource {
    pub kind: SourceKind,
    /// Hz.
    pub rate: f64,
    /// Active interval `[start, stop)`, ms.
    pub start: f64,
    pub stop: f64,
    /// Offset of the first regular spike after `start`, ms.
    pub phase: f64,
}

impl SpikeSource {
    pub fn regular(rate: f64, start: f64, stop: f64) -> Self {
        Self {
            kind: SourceKind::Regular,
            rate,
            start,
            stop,
            phase: 0.0,
        }
    }

    pub fn poisson(rate: f64, start: f64, stop: f64) -> Self {
        Self {
            kind: SourceKind::Poisson,
            ..Self::regular(rate, start, stop)
        }
    }

    pub fn silent() -> Self {
        Self::regular(0.0, 0.0, 0.0)
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    /// Number of regular spikes strictly before `t`.
    fn regular_count_before(&self, t: f64) -> u64 {
        let first = self.start + self.phase;
        let end = t.min(self.stop);
        if self.rate <= 0.0 || end <= first {
            return 0;
        }
        let period = 1000.0 / self.rate;
        let x = (end - first) / period;
        // Snap near-integers so spike times on the step grid are not lost to
        // rounding of `n * dt`.
        let r = x.round();
        let n = if (x - r).abs() < 1e-9 { r } else { x.ceil() };
        n as u64
    }

    /// Spikes emitted in the window `[t0, t1)`.
    pub fn spikes_in<R: rand::Rng + ?Sized>(&self, t0: f64, t1: f64, rng: &mut R) -> u32 {
        match self.kind {
            SourceKind::Regular => {
                (self.regular_count_before(t1) - self.regular_count_before(t0)) as u32
            }
            SourceKind::Poisson => {
                let overlap = t1.min(self.stop) - t0.max(self.start);
                if self.rate <= 0.0 || overlap <= 0.0 {
                    return 0;
                }
                let lambda = self.rate * overlap / 1000.0;
                match Poisson::new(lambda) {
                    Ok(d) => d.sample(rng) as u32,
                    Err(_) => 0,
                }
            }
        }
    }
}

/// Spike count of `src` in the window `[t0, t1)`.
pub fn generate_spikes<R: rand::Rng + ?Sized>(
    src: &SpikeSource,
    t0: f64,
    t1: f64,
    rng: &mut R,
) -> u32 {
    src.spikes_in(t0, t1, rng)
}

/// Mixes a base seed with a stream index (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, index))
}
