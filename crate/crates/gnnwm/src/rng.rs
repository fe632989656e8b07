//! Deterministic keyed pseudo-randomness.
//!
//! Verification requires the owner to reconstruct the trigger graph
//! bit-exactly from a secret key, so every random choice in this crate
//! flows through one pinned generator: xoshiro256** seeded by splitmix64
//! expansion of a 64-bit seed, with seeds derived from the key via
//! FNV-1a-64. Changing any of these algorithms would silently invalidate
//! previously embedded watermarks, which is why they are implemented here
//! rather than delegated to a generator crate whose stream might move
//! between versions.

use crate::error::{Error, Result};

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

/// FNV-1a over a byte string, 64-bit variant.
pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Derive a 64-bit stream seed from a secret key and a context label.
///
/// The seed is `FNV-1a-64(key || 0x00 || context)`. Distinct contexts
/// ("edges", "features", "labels", "split", "train", ...) yield
/// independent streams from one key.
pub fn derive_seed(key: &[u8], context: &str) -> Result<u64> {
    if key.is_empty() {
        return Err(Error::input("secret key must be non-empty"));
    }
    let mut buf = Vec::with_capacity(key.len() + 1 + context.len());
    buf.extend_from_slice(key);
    buf.push(0);
    buf.extend_from_slice(context.as_bytes());
    Ok(fnv1a_64(&buf))
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// A deterministic random stream (xoshiro256**).
///
/// Cloning snapshots the state; a clone replays exactly the same draws,
/// which the gradient checker uses to replay neighbor sampling.
#[derive(Debug, Clone)]
pub struct RandomStream {
    s: [u64; 4],
}

impl RandomStream {
    /// Seed via splitmix64 expansion of a 64-bit seed.
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        RandomStream { s }
    }

    /// Stream for `derive_seed(key, context)`.
    pub fn from_key(key: &[u8], context: &str) -> Result<Self> {
        Ok(RandomStream::new(derive_seed(key, context)?))
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform draw in [0, 1) from the top 53 bits of the next word.
    pub fn next_float(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in [0, bound). `bound` must be ≥ 1.
    ///
    /// Defined as floor(next_float · bound), clamped to bound−1 so a
    /// float rounding up at the top of the range cannot escape.
    pub fn next_index(&mut self, bound: usize) -> usize {
        debug_assert!(bound >= 1);
        ((self.next_float() * bound as f64) as usize).min(bound - 1)
    }

    /// Partial Fisher–Yates: after this call `xs[..k]` holds a uniform
    /// k-sample without replacement. One draw per position, always,
    /// so stream consumption depends only on `k`.
    fn partial_shuffle<T>(&mut self, xs: &mut [T], k: usize) {
        let n = xs.len();
        for i in 0..k.min(n) {
            let j = i + self.next_index(n - i);
            xs.swap(i, j);
        }
    }

    /// Uniform shuffle of the whole slice.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        let n = xs.len();
        self.partial_shuffle(xs, n);
    }

    /// Draw `k` distinct indices uniformly from `[0, population)`.
    pub fn sample_distinct(&mut self, population: usize, k: usize) -> Result<Vec<usize>> {
        if k > population {
            return Err(Error::input(format!(
                "cannot sample {k} distinct indices from a population of {population}"
            )));
        }
        let mut idx: Vec<usize> = (0..population).collect();
        self.partial_shuffle(&mut idx, k);
        idx.truncate(k);
        Ok(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn derive_seed_is_stable_and_context_separated() {
        let k = b"owner-secret";
        assert_eq!(
            derive_seed(k, "edges").unwrap(),
            derive_seed(k, "edges").unwrap()
        );
        assert_ne!(
            derive_seed(k, "edges").unwrap(),
            derive_seed(k, "labels").unwrap()
        );
    }

    #[test]
    fn derive_seed_rejects_empty_key() {
        assert!(derive_seed(b"", "edges").is_err());
    }

    #[test]
    fn derive_seed_no_collisions_across_random_keys() {
        // 10^4 random keys: "edges" and "labels" seeds never collide,
        // and seeds are distinct across keys.
        let mut gen = RandomStream::new(7);
        let mut seen = HashSet::new();
        for _ in 0..10_000 {
            let key: Vec<u8> = (0..16).map(|_| gen.next_u64() as u8).collect();
            let a = derive_seed(&key, "edges").unwrap();
            let b = derive_seed(&key, "labels").unwrap();
            assert_ne!(a, b);
            assert!(seen.insert(a), "edge-seed collision");
        }
    }

    #[test]
    fn floats_are_unit_interval_with_correct_mean() {
        let mut s = RandomStream::new(0xDEADBEEF);
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = s.next_float();
            assert!((0.0..1.0).contains(&x));
            sum += x;
        }
        let mean = sum / n as f64;
        // 3σ band for the mean of n uniforms: 0.5 ± 3/(√12·√n) ≈ 0.5 ± 0.00087
        assert!((0.499..=0.501).contains(&mean), "mean {mean}");
    }

    #[test]
    fn same_seed_replays_identically() {
        let mut a = RandomStream::new(42);
        let mut b = RandomStream::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = a.clone();
        for _ in 0..100 {
            assert_eq!(a.next_float().to_bits(), c.next_float().to_bits());
        }
    }

    #[test]
    fn golden_vectors_match_reference() {
        let golden = include_str!("../tests/golden/xoshiro256ss_seed_0123456789abcdef.txt");
        let mut s = RandomStream::new(0x0123456789ABCDEF);
        let mut n = 0;
        for line in golden.lines().filter(|l| !l.trim().is_empty()) {
            let expect = u64::from_str_radix(line.trim(), 16).unwrap();
            assert_eq!(s.next_u64(), expect, "word {n}");
            n += 1;
        }
        assert_eq!(n, 64);
    }

    #[test]
    fn sample_distinct_full_population_is_permutation() {
        let mut s = RandomStream::new(1);
        let mut got = s.sample_distinct(5, 5).unwrap();
        got.sort_unstable();
        assert_eq!(got, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn sample_distinct_edge_cases() {
        let mut s = RandomStream::new(1);
        assert!(s.sample_distinct(5, 0).unwrap().is_empty());
        assert!(s.sample_distinct(3, 4).is_err());
    }

    #[test]
    fn sample_distinct_frequencies_are_uniform() {
        // Each index appears with rate k/population; 3σ bound on counts.
        let (population, k, trials) = (10usize, 3usize, 100_000usize);
        let mut s = RandomStream::new(99);
        let mut counts = vec![0u64; population];
        for _ in 0..trials {
            for i in s.sample_distinct(population, k).unwrap() {
                counts[i] += 1;
            }
        }
        let p = k as f64 / population as f64;
        let mean = trials as f64 * p;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - mean).abs() < 3.0 * sigma,
                "index {i}: count {c}, expected {mean} ± {:.1}",
                3.0 * sigma
            );
        }
    }

    #[test]
    fn context_streams_pass_independence_smoke_test() {
        // Chi-square on the joint top-2-bit buckets of two context streams.
        let mut a = RandomStream::from_key(b"key", "edges").unwrap();
        let mut b = RandomStream::from_key(b"key", "labels").unwrap();
        let mut cells = [[0u64; 4]; 4];
        let n = 40_000;
        for _ in 0..n {
            let i = (a.next_u64() >> 62) as usize;
            let j = (b.next_u64() >> 62) as usize;
            cells[i][j] += 1;
        }
        let expect = n as f64 / 16.0;
        let chi2: f64 = cells
            .iter()
            .flatten()
            .map(|&c| (c as f64 - expect).powi(2) / expect)
            .sum();
        // dof = 15, p=0.001 critical value ≈ 37.7
        assert!(chi2 < 37.7, "chi2 = {chi2}");
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut s = RandomStream::new(5);
        let mut xs: Vec<u32> = (0..97).collect();
        s.shuffle(&mut xs);
        let mut sorted = xs.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..97).collect::<Vec<_>>());
        assert_ne!(xs, sorted);
    }
}
