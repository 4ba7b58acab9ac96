//! Reproducible random streams.
//!
//! Every stream is a ChaCha20 generator keyed by
//! `SHA-256(STREAM_DOMAIN || master_seed.to_le_bytes() || index.to_le_bytes())`.
//! A stream is therefore a pure function of `(master_seed, index)` and any
//! stream of a batch can be built directly, without advancing its siblings.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// Domain tag mixed into the key derivation.
pub const STREAM_DOMAIN: &[u8] = b"lpforge.stream.v1";

/// 2^-53, the spacing of the `[0, 1)` grid produced by [`RngStream::next_f64`].
const F64_UNIT: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Clone, Debug)]
pub struct RngStream {
    rng: ChaCha20Rng,
    master_seed: u64,
    stream_index: u64,
}

/// Key bytes for `(master_seed, index)`.
pub fn stream_key(master_seed: u64, index: u64) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(STREAM_DOMAIN);
    hasher.update(master_seed.to_le_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    key
}

pub fn derive_stream(master_seed: u64, index: u64) -> RngStream {
    RngStream {
        rng: ChaCha20Rng::from_seed(stream_key(master_seed, index)),
        master_seed,
        stream_index: index,
    }
}

impl RngStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` using the top 53 bits of one `u64`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * F64_UNIT
    }

    /// Uniform on `[lo, hi)`; returns `lo` when `lo == hi`.
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `0..n` by widening multiply. `n` must be nonzero.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Standard normal by the basic Box-Muller transform. Consumes two
    /// uniforms and discards the sine branch so that every call uses the
    /// same amount of the stream.
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
