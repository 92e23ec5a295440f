//! Counter-based random number streams.
//!
//! Each stream is keyed by `(master_seed, purpose, stream_id)` and produces a
//! platform-stable sequence: draw `i` is a pure function of the key and the
//! counter, so streams can be replayed or split across workers without shared
//! state. Standard normals come from the inverse normal CDF applied to a
//! 53-bit uniform, which keeps the draw count per variate fixed.

use crate::stats::norm_quantile;

/// Stream purposes; keeps data-generation draws disjoint from
/// likelihood-evaluation draws for every stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Likelihood,
    Data,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Likelihood => 0x9d3c_5e1b_a7f0_2461,
            Purpose::Data => 0x5b1e_8d0f_c392_7a85,
        }
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
fn mix(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    z
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(master_seed: u64, purpose: Purpose, stream_id: u64) -> Self {
        let mut key = mix(master_seed ^ GOLDEN);
        key = mix(key ^ purpose.tag());
        key = mix(key ^ mix(stream_id.wrapping_mul(GOLDEN)));
        CounterRng { key, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform draw in the open interval (0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw via the inverse CDF.
    pub fn next_normal(&mut self) -> f64 {
        norm_quantile(self.next_uniform())
    }

    pub fn normals(&mut self, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.next_normal()).collect()
    }
}
