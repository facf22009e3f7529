//! Deterministic random number generation.
//!
//! Every stochastic operation in this crate draws from [`Rng`], a thin
//! wrapper around the ChaCha8 stream cipher keyed by a 64-bit seed.
//! The stream is platform-independent, so a seed fully determines every
//! generated signal, matrix, and flip pattern:
//!
//! - standard normals come from the ziggurat sampler of `rand_distr`,
//! - uniforms are 53-bit doubles in `[0, 1)`,
//! - distinct index subsets use Floyd-style sampling from `rand::seq`.
//!
//! Benchmark trials derive their seeds with [`derive_seed`], a FNV-1a
//! hash over a canonical description of the trial, so any single trial
//! can be regenerated outside the harness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Deterministic generator: identical seed, identical sample stream.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    /// ChaCha8 stream keyed by `seed`.
    pub fn from_seed(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The seed this generator was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// One draw from N(0, 1).
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// One draw from the half-open interval `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        rand::Rng::random::<f64>(&mut self.inner)
    }

    /// `k` distinct indices drawn uniformly from `0..n`, sorted ascending.
    pub fn distinct_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut idx = rand::seq::index::sample(&mut self.inner, n, k).into_vec();
        idx.sort_unstable();
        idx
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over the canonical trial description
/// `"{base_seed}:{experiment}:m={m}:n={n}:k={k}:trial={trial}"`.
///
/// Only generation-relevant coordinates enter the hash: the flip ratio,
/// a misspecified sparsity choice, and the support-redundancy setting do
/// not change the generated `(x, A)` pair, so leaving them out keeps
/// comparisons across those knobs paired on identical instances.
pub fn derive_seed(
    base_seed: u64,
    experiment: &str,
    m: usize,
    n: usize,
    k: usize,
    trial: usize,
) -> u64 {
    let canonical = format!("{base_seed}:{experiment}:m={m}:n={n}:k={k}:trial={trial}");
    fnv1a64(canonical.as_bytes())
}

/// 64-bit FNV-1a with the standard offset basis and prime.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Rng::from_seed(7);
        let mut b = Rng::from_seed(7);
        for _ in 0..32 {
            assert_eq!(a.standard_normal().to_bits(), b.standard_normal().to_bits());
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
        assert_eq!(a.distinct_indices(100, 10), b.distinct_indices(100, 10));
    }

    #[test]
    fn different_seeds_diverge() {
        let mut a = Rng::from_seed(1);
        let mut b = Rng::from_seed(2);
        let xs: Vec<f64> = (0..8).map(|_| a.standard_normal()).collect();
        let ys: Vec<f64> = (0..8).map(|_| b.standard_normal()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut rng = Rng::from_seed(3);
        for _ in 0..1000 {
            let u = rng.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn distinct_indices_are_distinct_and_sorted() {
        let mut rng = Rng::from_seed(11);
        for _ in 0..50 {
            let idx = rng.distinct_indices(20, 7);
            assert_eq!(idx.len(), 7);
            assert!(idx.windows(2).all(|w| w[0] < w[1]));
            assert!(idx.iter().all(|&i| i < 20));
        }
    }

    // FNV-1a reference values from the published test vectors.
    #[test]
    fn fnv1a_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn derive_seed_is_stable() {
        let s = derive_seed(42, "error_vs_m", 4000, 1000, 10, 0);
        assert_eq!(s, fnv1a64(b"42:error_vs_m:m=4000:n=1000:k=10:trial=0"));
        // Frozen so external tooling can rely on the published derivation.
        assert_eq!(s, derive_seed(42, "error_vs_m", 4000, 1000, 10, 0));
        assert_ne!(s, derive_seed(42, "error_vs_m", 4000, 1000, 10, 1));
        assert_ne!(s, derive_seed(43, "error_vs_m", 4000, 1000, 10, 0));
    }
}
