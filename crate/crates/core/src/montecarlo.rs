//! Seeded simulation of the statistics with exact binomial intervals.
//!
//! Replicate `r` under seed `s` always reads ChaCha8 stream `r` of key `s`,
//! one uniform per variable (or per multinoulli row) in index order, so a
//! replicate's value does not depend on how replicates are split across
//! worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::ensembles::{is_degenerate, BernoulliEnsemble, Ensemble};
use crate::error::{domain, Result};
use crate::numeric::CompensatedSum;

pub const DEFAULT_REPLICATES: u64 = 100_000;
pub const DEFAULT_CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub replicates: u64,
    pub seed: u64,
    pub confidence: f64,
    /// Number of worker threads; results do not depend on it.
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            replicates: DEFAULT_REPLICATES,
            seed: 0,
            confidence: DEFAULT_CONFIDENCE,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl SimConfig {
    fn check(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(domain("replicates must be >= 1"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(domain(format!("confidence must be in (0, 1), got {}", self.confidence)));
        }
        if self.workers == 0 {
            return Err(domain("workers must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Unit {
    Constant,
    Binary { p: f64, success: f64, failure: f64 },
    Categorical { cumulative: Vec<f64>, values: Vec<f64> },
}

impl Unit {
    fn binary(p: f64, weight: f64) -> Unit {
        if is_degenerate(p) || weight == 0.0 {
            Unit::Constant
        } else {
            Unit::Binary {
                p,
                success: (1.0 - p) * weight,
                failure: -p * weight,
            }
        }
    }

    fn draw(&self, u: f64) -> f64 {
        match self {
            Unit::Constant => 0.0,
            Unit::Binary { p, success, failure } => {
                if u < *p {
                    *success
                } else {
                    *failure
                }
            }
            Unit::Categorical { cumulative, values } => {
                let k = cumulative
                    .iter()
                    .position(|&c| u < c)
                    .unwrap_or(cumulative.len() - 1);
                values[k]
            }
        }
    }
}

/// Precomputed per-unit outcome tables for one ensemble.
#[derive(Debug, Clone)]
pub struct Sampler {
    units: Vec<Unit>,
    base: ChaCha8Rng,
}

impl Sampler {
    pub fn new(ensemble: &Ensemble, seed: u64) -> Sampler {
        let units = match ensemble {
            Ensemble::Bernoulli(e) => e.summands().iter().map(|s| Unit::binary(s.p, s.weight)).collect(),
            Ensemble::Grouped(e) => e
                .groups()
                .iter()
                .zip(e.weights())
                .flat_map(|(g, w)| g.iter().map(move |&p| Unit::binary(p, w)))
                .collect(),
            Ensemble::Multinoulli(e) => (0..e.len())
                .map(|i| {
                    let outcomes = e.row_outcomes(i);
                    if outcomes.iter().any(|a| a.mass == 1.0) {
                        return Unit::Constant;
                    }
                    let mut acc = 0.0;
                    let mut cumulative = Vec::with_capacity(outcomes.len());
                    let mut values = Vec::with_capacity(outcomes.len());
                    for a in outcomes.iter().filter(|a| a.mass > 0.0) {
                        acc += a.mass;
                        cumulative.push(acc);
                        values.push(a.value);
                    }
                    Unit::Categorical { cumulative, values }
                })
                .collect(),
        };
        Sampler {
            units,
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The statistic for replicate `index`.
    pub fn sample(&self, index: u64) -> f64 {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        let mut s = 0.0;
        for unit in &self.units {
            let u: f64 = rng.random();
            s += unit.draw(u);
        }
        s
    }
}

/// One realization of the ensemble's statistic, a pure function of `(seed, index)`.
pub fn sample_statistic(ensemble: &Ensemble, seed: u64, index: u64) -> f64 {
    Sampler::new(ensemble, seed).sample(index)
}

fn chunks(replicates: u64, workers: usize) -> Vec<(u64, u64)> {
    let w = workers as u64;
    (0..w)
        .map(|i| (replicates * i / w, replicates * (i + 1) / w))
        .filter(|(a, b)| a < b)
        .collect()
}

fn run_parallel<T: Send, F: Fn(u64, u64) -> T + Sync>(replicates: u64, workers: usize, f: F) -> Vec<T> {
    let ranges = chunks(replicates, workers);
    if ranges.len() == 1 {
        return vec![f(ranges[0].0, ranges[0].1)];
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(a, b)| {
                let f = &f;
                scope.spawn(move || f(a, b))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Exact (Clopper-Pearson) two-sided interval for `hits` successes in `trials`.
pub fn clopper_pearson(hits: u64, trials: u64, confidence: f64) -> (f64, f64) {
    let alpha = 1.0 - confidence;
    let (x, n) = (hits as f64, trials as f64);
    let low = if hits == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0)
            .expect("positive shape")
            .inverse_cdf(alpha / 2.0)
    };
    let high = if hits == trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x)
            .expect("positive shape")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (low, high)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub t: f64,
    pub hits: u64,
    pub replicates: u64,
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub seed: u64,
    pub workers: usize,
}

/// Estimate `P(|S| >= t)` from `config.replicates` draws.
pub fn simulate_tail(ensemble: &Ensemble, t: f64, config: &SimConfig) -> Result<MonteCarloEstimate> {
    config.check()?;
    if !(t >= 0.0) {
        return Err(domain(format!("t must be >= 0, got {t}")));
    }
    let sampler = Sampler::new(ensemble, config.seed);
    let hits: u64 = run_parallel(config.replicates, config.workers, |a, b| {
        (a..b).filter(|&r| sampler.sample(r).abs() >= t).count() as u64
    })
    .into_iter()
    .sum();
    let (ci_low, ci_high) = clopper_pearson(hits, config.replicates, config.confidence);
    Ok(MonteCarloEstimate {
        t,
        hits,
        replicates: config.replicates,
        point: hits as f64 / config.replicates as f64,
        ci_low,
        ci_high,
        confidence: config.confidence,
        seed: config.seed,
        workers: config.workers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MgfEstimate {
    pub lambda: f64,
    pub mean: f64,
    pub stderr: f64,
    pub replicates: u64,
    pub seed: u64,
    pub workers: usize,
}

/// Sample mean of `exp(λ S)` and its standard error. For `|λ| >= 1` the
/// variance may be infinite and the standard error meaningless.
pub fn simulate_mgf(ensemble: &BernoulliEnsemble, lambda: f64, config: &SimConfig) -> Result<MgfEstimate> {
    config.check()?;
    if !lambda.is_finite() {
        return Err(domain("lambda must be finite"));
    }
    let sampler = Sampler::new(&Ensemble::Bernoulli(ensemble.clone()), config.seed);
    // shifted by 1 to limit cancellation in the variance
    let partials = run_parallel(config.replicates, config.workers, |a, b| {
        let mut sum = CompensatedSum::default();
        let mut sum_sq = CompensatedSum::default();
        for r in a..b {
            let d = (lambda * sampler.sample(r)).exp() - 1.0;
            sum.add(d);
            sum_sq.add(d * d);
        }
        (sum.total(), sum_sq.total())
    });
    let mut sum = CompensatedSum::default();
    let mut sum_sq = CompensatedSum::default();
    for (s, q) in partials {
        sum.add(s);
        sum_sq.add(q);
    }
    let n = config.replicates as f64;
    let shift_mean = sum.total() / n;
    let variance = if config.replicates > 1 {
        ((sum_sq.total() - n * shift_mean * shift_mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(MgfEstimate {
        lambda,
        mean: 1.0 + shift_mean,
        stderr: (variance / n).sqrt(),
        replicates: config.replicates,
        seed: config.seed,
        workers: config.workers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::MultinoulliEnsemble;

    fn bern(p: &[f64]) -> Ensemble {
        Ensemble::Bernoulli(BernoulliEnsemble::new(p.to_vec()).unwrap())
    }

    fn cfg(replicates: u64, seed: u64, workers: usize) -> SimConfig {
        SimConfig {
            replicates,
            seed,
            confidence: 0.99,
            workers,
        }
    }

    #[test]
    fn sample_is_deterministic() {
        let e = bern(&[0.3, 0.6, 0.01]);
        assert_eq!(sample_statistic(&e, 9, 42), sample_statistic(&e, 9, 42));
        let distinct: std::collections::BTreeSet<u64> =
            (0..64).map(|i| sample_statistic(&e, 9, i).to_bits()).collect();
        assert!(distinct.len() > 1);
    }

    #[test]
    fn degenerate_statistic_is_zero() {
        let e = bern(&[1.0, 0.0]);
        for i in 0..100 {
            assert_eq!(sample_statistic(&e, 1, i), 0.0);
        }
        let est = simulate_tail(&e, 1e-12, &cfg(1000, 3, 2)).unwrap();
        assert_eq!(est.hits, 0);
        assert_eq!(est.point, 0.0);
    }

    #[test]
    fn single_half_support() {
        let e = bern(&[0.5]);
        let v = 0.5 * std::f64::consts::LN_2;
        for i in 0..200 {
            let s = sample_statistic(&e, 5, i);
            assert!((s.abs() - v).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_threshold_is_certain() {
        let est = simulate_tail(&bern(&[0.2, 0.7]), 0.0, &cfg(500, 1, 1)).unwrap();
        assert_eq!(est.point, 1.0);
        assert_eq!(est.ci_high, 1.0);
    }

    #[test]
    fn multinoulli_sampling_uses_row_support() {
        let m = Ensemble::Multinoulli(MultinoulliEnsemble::new(vec![vec![0.2, 0.8]]).unwrap());
        for i in 0..100 {
            let s = sample_statistic(&m, 2, i);
            assert!((s + 1.109_035_488_895_912_6).abs() < 1e-14 || (s - 0.277_258_872_223_978_1).abs() < 1e-14);
        }
        let det = Ensemble::Multinoulli(MultinoulliEnsemble::new(vec![vec![0.0, 1.0]]).unwrap());
        assert_eq!(sample_statistic(&det, 2, 0), 0.0);
    }

    #[test]
    fn clopper_pearson_reference_values() {
        // scipy.stats.beta.ppf reference values
        let (lo, hi) = clopper_pearson(5, 20, 0.95);
        assert!((lo - 0.086_571_469_101_434_61).abs() < 1e-9, "{lo}");
        assert!((hi - 0.491_045_871_707_957_44).abs() < 1e-9, "{hi}");
        let (lo, hi) = clopper_pearson(0, 10, 0.95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.308_497_107_818_760_8).abs() < 1e-9);
        let (lo, hi) = clopper_pearson(10, 10, 0.95);
        assert!((lo - 0.691_502_892_181_239_2).abs() < 1e-9);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn hits_independent_of_workers() {
        let e = bern(&[0.3, 0.05, 0.9, 0.5]);
        let base = simulate_tail(&e, 0.8, &cfg(5000, 11, 1)).unwrap();
        for w in [2, 3, 7] {
            assert_eq!(simulate_tail(&e, 0.8, &cfg(5000, 11, w)).unwrap().hits, base.hits);
        }
    }

    #[test]
    fn mgf_at_zero_is_exact() {
        let e = BernoulliEnsemble::new(vec![0.3, 0.4]).unwrap();
        let m = simulate_mgf(&e, 0.0, &cfg(1000, 1, 3)).unwrap();
        assert_eq!(m.mean, 1.0);
        assert_eq!(m.stderr, 0.0);
    }

    #[test]
    fn rejects_bad_config() {
        let e = bern(&[0.5]);
        assert!(simulate_tail(&e, 0.1, &cfg(0, 1, 1)).is_err());
        let mut c = cfg(10, 1, 1);
        c.confidence = 1.0;
        assert!(simulate_tail(&e, 0.1, &c).is_err());
        assert!(simulate_tail(&e, -1.0, &cfg(10, 1, 1)).is_err());
    }
}
