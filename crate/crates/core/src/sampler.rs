//! Re-balanced co-training sampler: each batch slot comes from the target
//! pool with probability omega, otherwise from the co-training pool, and is
//! drawn uniformly with replacement within its pool.
//!
//! Batch `k` uses ChaCha8 seeded with `seed` on stream `k`, so any batch can
//! be regenerated on its own.

use serde::Serialize;
use thiserror::Error;

use rand::Rng;

use crate::rng;

/// Default probability of drawing from the target pool.
pub const DEFAULT_OMEGA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplerError {
    #[error("omega must lie in [0, 1], got {0}")]
    InvalidOmega(String),
    #[error("batch size must be positive")]
    ZeroBatch,
    #[error("the {0} pool is empty but has non-zero selection probability")]
    EmptyPoolSelected(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pool {
    Target,
    Cotrain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream {
    target_ids: Vec<String>,
    cotrain_ids: Vec<String>,
    omega: f64,
    seed: u64,
    batch_size: usize,
    cursor: u64,
}

impl SampleStream {
    pub fn new(
        target_ids: Vec<String>,
        cotrain_ids: Vec<String>,
        omega: f64,
        seed: u64,
        batch_size: usize,
    ) -> Result<Self, SamplerError> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(SamplerError::InvalidOmega(omega.to_string()));
        }
        if batch_size == 0 {
            return Err(SamplerError::ZeroBatch);
        }
        if omega > 0.0 && target_ids.is_empty() {
            return Err(SamplerError::EmptyPoolSelected("target"));
        }
        if omega < 1.0 && cotrain_ids.is_empty() {
            return Err(SamplerError::EmptyPoolSelected("cotrain"));
        }
        Ok(SampleStream {
            target_ids,
            cotrain_ids,
            omega,
            seed,
            batch_size,
            cursor: 0,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn target_ids(&self) -> &[String] {
        &self.target_ids
    }

    pub fn cotrain_ids(&self) -> &[String] {
        &self.cotrain_ids
    }

    /// Pool and within-pool index of every slot of batch `index`.
    pub fn draws(&self, index: u64) -> Vec<(Pool, usize)> {
        let mut r = rng::stream(self.seed, index);
        (0..self.batch_size)
            .map(|_| {
                // u in [0, 1): omega = 1 always picks target, omega = 0 never does
                let u: f64 = r.random();
                if u < self.omega {
                    (Pool::Target, r.random_range(0..self.target_ids.len()))
                } else {
                    (Pool::Cotrain, r.random_range(0..self.cotrain_ids.len()))
                }
            })
            .collect()
    }

    pub fn batch(&self, index: u64) -> Vec<&str> {
        self.draws(index)
            .into_iter()
            .map(|(pool, i)| match pool {
                Pool::Target => self.target_ids[i].as_str(),
                Pool::Cotrain => self.cotrain_ids[i].as_str(),
            })
            .collect()
    }

    pub fn next_batch(&mut self) -> Vec<String> {
        let out = self.batch(self.cursor).into_iter().map(String::from).collect();
        self.cursor += 1;
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamStats {
    pub omega: f64,
    pub seed: u64,
    pub batch_size: usize,
    pub batches: u64,
    pub draws: u64,
    pub target_draws: u64,
    pub target_fraction: f64,
    pub cotrain_fraction: f64,
    /// Draw count per id, in pool order.
    pub target_counts: Vec<(String, u64)>,
    pub cotrain_counts: Vec<(String, u64)>,
}

/// Empirical composition of batches `0..n_batches`.
pub fn stream_stats(stream: &SampleStream, n_batches: u64) -> StreamStats {
    let mut t = vec![0u64; stream.target_ids.len()];
    let mut c = vec![0u64; stream.cotrain_ids.len()];
    for b in 0..n_batches {
        for (pool, i) in stream.draws(b) {
            match pool {
                Pool::Target => t[i] += 1,
                Pool::Cotrain => c[i] += 1,
            }
        }
    }
    let draws = n_batches * stream.batch_size as u64;
    let target_draws: u64 = t.iter().sum();
    let frac = |n: u64| if draws == 0 { 0.0 } else { n as f64 / draws as f64 };
    let pair = |ids: &[String], counts: Vec<u64>| ids.iter().cloned().zip(counts).collect();
    StreamStats {
        omega: stream.omega,
        seed: stream.seed,
        batch_size: stream.batch_size,
        batches: n_batches,
        draws,
        target_draws,
        target_fraction: frac(target_draws),
        cotrain_fraction: frac(draws - target_draws),
        target_counts: pair(&stream.target_ids, t),
        cotrain_counts: pair(&stream.cotrain_ids, c),
    }
}
