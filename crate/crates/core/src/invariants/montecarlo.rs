//! Sampling check of how often random tuples are 1-separated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

const CHUNK: u64 = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub k: usize,
    pub n: usize,
    pub p: usize,
    pub samples: u64,
    pub seed: u64,
    pub one_separated: u64,
    /// Tuples with a repeated entry; these count as not 1-separated.
    pub duplicates: u64,
    pub rate: Rational,
    /// `1 - p exp(-n ((k-1)/k)^p)`.
    pub bound: f64,
}

pub fn separation_bound(k: usize, n: usize, p: usize) -> f64 {
    let r = (k as f64 - 1.0) / k as f64;
    1.0 - p as f64 * (-(n as f64) * r.powi(p as i32)).exp()
}

/// Every entry has a coordinate whose value is new among its predecessors.
pub fn is_one_separated_flat(tuple: &[u8], n: usize, p: usize) -> bool {
    (1..p).all(|j| {
        (0..n).any(|i| {
            let x = tuple[j * n + i];
            (0..j).all(|q| tuple[q * n + i] != x)
        })
    })
}

fn has_duplicate(tuple: &[u8], n: usize, p: usize) -> bool {
    (1..p).any(|j| (0..j).any(|q| tuple[j * n..(j + 1) * n] == tuple[q * n..(q + 1) * n]))
}

pub fn mc_one_separated_rate(k: usize, n: usize, p: usize, samples: u64, seed: u64) -> Result<McReport> {
    if k < 2 || n == 0 || samples == 0 {
        return Err(Error::Invalid("need k >= 2, n >= 1 and at least one sample".into()));
    }
    let cube = (k as f64).powi(n as i32);
    if p == 0 || (p as f64) > cube {
        return Err(Error::Invalid(format!("p = {p} must lie in 1..=k^n")));
    }
    let chunks = samples.div_ceil(CHUNK);
    let (sep, dup) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut buf = vec![0u8; n * p];
            let (mut sep, mut dup) = (0u64, 0u64);
            for _ in 0..count {
                for x in buf.iter_mut() {
                    *x = rng.random_range(0..k) as u8;
                }
                if has_duplicate(&buf, n, p) {
                    dup += 1;
                } else if is_one_separated_flat(&buf, n, p) {
                    sep += 1;
                }
            }
            (sep, dup)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(McReport {
        k,
        n,
        p,
        samples,
        seed,
        one_separated: sep,
        duplicates: dup,
        rate: Rational::new(sep as i64, samples as i64),
        bound: if p == 1 { 1.0 } else { separation_bound(k, n, p) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_entry_is_always_separated() {
        let r = mc_one_separated_rate(3, 4, 1, 100, 7).unwrap();
        assert!(r.rate.is_one());
    }

    #[test]
    fn deterministic_in_seed() {
        let a = mc_one_separated_rate(2, 5, 3, 3000, 11).unwrap();
        let b = mc_one_separated_rate(2, 5, 3, 3000, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bound_value() {
        let b = separation_bound(3, 30, 3);
        assert!((b - 0.99959).abs() < 1e-5, "{b}");
    }
}
