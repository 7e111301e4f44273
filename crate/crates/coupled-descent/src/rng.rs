//! Self-contained deterministic random number generation.
//!
//! All randomness in the crate flows through [`Xoshiro256PlusPlus`], seeded
//! through SplitMix64 so that a single `u64` seed expands to a full 256-bit
//! state. The implementation is bit-stable across platforms, which is what
//! makes solver traces reproducible byte for byte.
//!
//! Stream semantics: one generator per solver run, seeded with
//! `SolverConfig::seed`; problem generators use their own seed. Independent
//! substreams can be derived with [`Xoshiro256PlusPlus::split`], which hashes
//! a label into a fresh seed so that consumers cannot collide by accident.

/// SplitMix64 step; used for seed expansion and stream derivation.
#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// xoshiro256++ generator (Blackman & Vigna), period 2^256 - 1.
#[derive(Clone, Debug)]
pub struct Xoshiro256PlusPlus {
    s: [u64; 4],
}

impl Xoshiro256PlusPlus {
    /// Expands a 64-bit seed into the full state via SplitMix64.
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Xoshiro256PlusPlus { s }
    }

    /// Derives an independent substream from this generator's seed lineage.
    pub fn split(&mut self, label: u64) -> Self {
        let mut sm = self.next_u64() ^ label.rotate_left(17);
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Xoshiro256PlusPlus { s }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)`, rejection sampled to avoid modulo bias.
    #[inline]
    pub fn next_below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        let bound = bound as u64;
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % bound) as usize;
            }
        }
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Samples `k` distinct indices from `0..n`, uniformly over ordered
/// k-tuples without replacement. O(k^2), intended for small `k`.
pub fn sample_distinct(rng: &mut Xoshiro256PlusPlus, n: usize, k: usize) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut picked: Vec<usize> = Vec::with_capacity(k);
    for t in 0..k {
        let mut r = rng.next_below(n - t);
        // Shift past already-picked values, scanning them in sorted order.
        let mut sorted: Vec<usize> = picked.clone();
        sorted.sort_unstable();
        for &v in &sorted {
            if r >= v {
                r += 1;
            }
        }
        picked.push(r);
    }
    picked
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_seed() {
        let mut a = Xoshiro256PlusPlus::seed_from_u64(42);
        let mut b = Xoshiro256PlusPlus::seed_from_u64(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn split_streams_differ() {
        let mut a = Xoshiro256PlusPlus::seed_from_u64(7);
        let mut s1 = a.split(1);
        let mut s2 = a.split(2);
        let same = (0..64).all(|_| s1.next_u64() == s2.next_u64());
        assert!(!same);
    }

    #[test]
    fn distinct_sampling_is_uniform_enough() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        let n = 6;
        let mut counts = vec![0usize; n * n];
        let trials = 60_000;
        for _ in 0..trials {
            let p = sample_distinct(&mut rng, n, 2);
            assert_ne!(p[0], p[1]);
            counts[p[0] * n + p[1]] += 1;
        }
        // 30 ordered pairs, expected 2000 each; allow 15% slack.
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    assert_eq!(counts[i * n + j], 0);
                } else {
                    let c = counts[i * n + j] as f64;
                    assert!((c - 2000.0).abs() < 300.0, "pair ({i},{j}) count {c}");
                }
            }
        }
    }

    #[test]
    fn unit_interval_bounds() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
        for _ in 0..10_000 {
            let x = rng.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }
}
