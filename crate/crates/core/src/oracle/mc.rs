//! Seeded Monte Carlo estimates of the outage events, evaluated on the raw
//! SNR expressions.
//!
//! Samples are drawn in fixed-size chunks; chunk `k` uses a ChaCha8 stream
//! `k` keyed by the user seed. Workers only ever merge integer counts, so the
//! estimate does not depend on how many threads ran it.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{NetworkConfig, Terminal};

/// Recorded in every estimate so results can be traced to the generator.
pub const GENERATOR: &str = "ChaCha8Rng/rand_chacha-0.3; stream=chunk index; chunk=65536";

const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    /// Empirical outage probability.
    pub p_hat: f64,
    pub samples: u64,
    pub stderr: f64,
    pub seed: u64,
    pub generator: &'static str,
}

impl McEstimate {
    fn from_count(failures: u64, samples: u64, seed: u64) -> Self {
        let p_hat = failures as f64 / samples as f64;
        McEstimate {
            p_hat,
            samples,
            stderr: (p_hat * (1.0 - p_hat) / samples as f64).sqrt(),
            seed,
            generator: GENERATOR,
        }
    }

    pub fn p_success(&self) -> f64 {
        1.0 - self.p_hat
    }
}

/// Which outage event to count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McEvent {
    /// The path delivering to the given terminal fails.
    T2T(Terminal),
    /// Either path fails.
    System,
}

fn exponential<R: Rng>(rng: &mut R, mu: f64) -> f64 {
    // 1 - U lies in (0, 1], so the log is finite.
    -mu * (1.0 - rng.gen::<f64>()).ln()
}

/// One draw of `(|h_A|^2, |h_B|^2)` by inverse-CDF sampling.
pub fn sample_gains<R: Rng>(rng: &mut R, mu_a: f64, mu_b: f64) -> (f64, f64) {
    let g_a = exponential(rng, mu_a);
    let g_b = exponential(rng, mu_b);
    (g_a, g_b)
}

/// The generator used for chunk `chunk` of a run keyed by `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn count_failures<P>(cfg: &NetworkConfig, samples: u64, seed: u64, failed: &P) -> u64
where
    P: Fn(f64, f64) -> bool + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let n = CHUNK.min(samples - k * CHUNK);
            let mut rng = chunk_rng(seed, k);
            (0..n)
                .filter(|_| {
                    let (g_a, g_b) = sample_gains(&mut rng, cfg.mu_a, cfg.mu_b);
                    failed(g_a, g_b)
                })
                .count() as u64
        })
        .sum()
}

/// Monte Carlo outage estimate. `workers = None` uses the global thread pool.
pub fn mc_estimate(
    cfg: &NetworkConfig,
    event: McEvent,
    samples: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<McEstimate> {
    cfg.validate_physical()?;
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "Monte Carlo needs at least one sample".into(),
        ));
    }
    let failed = move |g_a: f64, g_b: f64| match event {
        McEvent::T2T(t) => !cfg.link_succeeds(g_a, g_b, t),
        McEvent::System => {
            !(cfg.link_succeeds(g_a, g_b, Terminal::A) && cfg.link_succeeds(g_a, g_b, Terminal::B))
        }
    };
    let failures = match workers {
        None => count_failures(cfg, samples, seed, &failed),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(|| count_failures(cfg, samples, seed, &failed)),
    };
    Ok(McEstimate::from_count(failures, samples, seed))
}

pub fn mc_t2t(
    cfg: &NetworkConfig,
    terminal: Terminal,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    mc_estimate(cfg, McEvent::T2T(terminal), samples, seed, None)
}

pub fn mc_system(cfg: &NetworkConfig, samples: u64, seed: u64) -> Result<McEstimate> {
    mc_estimate(cfg, McEvent::System, samples, seed, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_moments() {
        let mut rng = chunk_rng(7, 0);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut above_median = 0;
        for _ in 0..n {
            let (g, _) = sample_gains(&mut rng, 1.0, 1.0);
            sum += g;
            if g > std::f64::consts::LN_2 {
                above_median += 1;
            }
        }
        assert!((sum / n as f64 - 1.0).abs() < 0.01);
        assert!((above_median as f64 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn fixed_seed_repeats() {
        let draw = || {
            let mut rng = chunk_rng(42, 3);
            (0..10)
                .map(|_| sample_gains(&mut rng, 1.0, 2.0))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
        let mut other = chunk_rng(42, 4);
        assert_ne!(draw()[0], sample_gains(&mut other, 1.0, 2.0));
    }

    #[test]
    fn ks_test_exponential() {
        let n = 100_000;
        let mut rng = chunk_rng(11, 0);
        let mut xs: Vec<f64> = (0..n).map(|_| sample_gains(&mut rng, 2.0, 1.0).0).collect();
        xs.sort_by(f64::total_cmp);
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let cdf = 1.0 - (-x / 2.0).exp();
                (cdf - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - cdf)
            })
            .fold(0.0, f64::max);
        // Asymptotic critical value at significance 0.01.
        assert!(d < 1.628 / (n as f64).sqrt(), "D = {d}");
    }

    #[test]
    fn certain_and_impossible_outage() {
        let dead = NetworkConfig {
            lambda_b: 1.0,
            ..NetworkConfig::default()
        };
        assert_eq!(mc_t2t(&dead, Terminal::A, 10_000, 1).unwrap().p_hat, 1.0);
        let free = NetworkConfig {
            rate_u: 0.0,
            ..NetworkConfig::default()
        };
        assert_eq!(mc_t2t(&free, Terminal::A, 10_000, 1).unwrap().p_hat, 0.0);
        assert_eq!(mc_system(&free, 10_000, 1).unwrap().p_hat, 0.0);
    }

    #[test]
    fn system_outage_dominates_link_outage() {
        let cfg = NetworkConfig::default();
        let sys = mc_system(&cfg, 200_000, 9).unwrap();
        for t in [Terminal::A, Terminal::B] {
            // Same seed means the same gain draws, so the inclusion is exact.
            assert!(sys.p_hat >= mc_t2t(&cfg, t, 200_000, 9).unwrap().p_hat);
        }
    }

    #[test]
    fn worker_count_does_not_change_estimate() {
        let cfg = NetworkConfig::default();
        let samples = 3 * CHUNK + 123;
        let one = mc_estimate(&cfg, McEvent::System, samples, 5, Some(1)).unwrap();
        let four = mc_estimate(&cfg, McEvent::System, samples, 5, Some(4)).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.samples, samples);
        assert!(one.stderr > 0.0 && one.generator == GENERATOR);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(mc_system(&NetworkConfig::default(), 0, 1).is_err());
    }
}
