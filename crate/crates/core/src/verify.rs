//! Exact-oracle verification of every applicable bound over the automatic
//! threshold grid, plus generators for randomized test ensembles.

use rand::Rng;
use serde::Serialize;

use crate::bounds::{compare, grouped_tail_bound, multinoulli_bound, Method, TailBoundReport};
use crate::ensembles::{BernoulliEnsemble, Ensemble, GroupedEnsemble, MultinoulliEnsemble};
use crate::error::Result;
use crate::oracle::{
    auto_t_grid, exact_distribution, exact_grouped_distribution, exact_multinoulli_distribution,
    ExactDistribution,
};

/// Worst exact/bound ratio found for one ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOutcome {
    pub kind: &'static str,
    pub n: usize,
    pub checks: usize,
    pub max_ratio: f64,
    pub argmax_t: f64,
    pub argmax_method: Option<Method>,
    pub support_radius: f64,
    pub pass: bool,
}

fn applicable_bounds(ensemble: &Ensemble, t: f64) -> Result<Vec<TailBoundReport>> {
    Ok(match ensemble {
        Ensemble::Bernoulli(e) => compare(e, &[t])?,
        Ensemble::Grouped(e) => vec![grouped_tail_bound(e.total(), t)?],
        Ensemble::Multinoulli(e) => vec![multinoulli_bound(e.len(), e.categories(), t / e.len() as f64)?],
    })
}

pub fn exact_for(ensemble: &Ensemble) -> Result<ExactDistribution> {
    match ensemble {
        Ensemble::Bernoulli(e) => exact_distribution(e),
        Ensemble::Grouped(e) => exact_grouped_distribution(e),
        Ensemble::Multinoulli(e) => exact_multinoulli_distribution(e),
    }
}

/// Compare the exact two-sided tail with every applicable bound on
/// `auto_t_grid`. An identically-zero statistic is checked at a single tiny `t`.
pub fn verify_ensemble(ensemble: &Ensemble) -> Result<VerifyOutcome> {
    let dist = exact_for(ensemble)?;
    let radius = dist.support_radius();
    let grid = if radius > 0.0 { auto_t_grid(radius) } else { vec![1e-12] };
    let mut outcome = VerifyOutcome {
        kind: match ensemble {
            Ensemble::Bernoulli(_) => "bernoulli",
            Ensemble::Grouped(_) => "grouped",
            Ensemble::Multinoulli(_) => "multinoulli",
        },
        n: ensemble.len(),
        checks: 0,
        max_ratio: 0.0,
        argmax_t: grid[0],
        argmax_method: None,
        support_radius: radius,
        pass: true,
    };
    for t in grid {
        let exact = dist.tail_probability(t);
        for report in applicable_bounds(ensemble, t)? {
            outcome.checks += 1;
            let ratio = if exact == 0.0 {
                0.0
            } else if report.bound == 0.0 {
                f64::INFINITY
            } else {
                exact / report.bound
            };
            if ratio > outcome.max_ratio || outcome.argmax_method.is_none() {
                outcome.max_ratio = outcome.max_ratio.max(ratio);
                outcome.argmax_t = t;
                outcome.argmax_method = Some(report.method);
            }
            if exact > report.bound {
                outcome.pass = false;
            }
        }
    }
    Ok(outcome)
}

fn random_entry<R: Rng>(rng: &mut R) -> f64 {
    match rng.random_range(0..20) {
        0 => 0.0,
        1 => 1.0,
        // ln p uniform on [-30, ln(1 - e^-5)]
        _ => rng.random_range(-30.0..(-(-5.0f64).exp()).ln_1p()).exp(),
    }
}

/// `n` uniform in `1..=max_n`, entries log-uniform in `[e^-30, 1 - e^-5]` with
/// occasional exact 0 and 1 entries.
pub fn random_bernoulli<R: Rng>(rng: &mut R, max_n: usize) -> BernoulliEnsemble {
    let n = rng.random_range(1..=max_n.max(1));
    BernoulliEnsemble::new((0..n).map(|_| random_entry(rng)).collect()).expect("entries in [0, 1]")
}

/// Up to `max_groups` groups whose sizes sum to at most `max_total`.
pub fn random_grouped<R: Rng>(rng: &mut R, max_groups: usize, max_total: usize) -> GroupedEnsemble {
    let groups = rng.random_range(1..=max_groups.max(1).min(max_total.max(1)));
    let mut remaining = max_total.max(groups);
    let mut out = Vec::with_capacity(groups);
    for g in 0..groups {
        let reserve = groups - g - 1;
        let size = rng.random_range(1..=(remaining - reserve).min(8));
        remaining -= size;
        out.push((0..size).map(|_| random_entry(rng)).collect());
    }
    GroupedEnsemble::new(out).expect("entries in [0, 1]")
}

/// Rows drawn from a Dirichlet-like split of the unit interval, sometimes
/// with exact zeros.
pub fn random_multinoulli<R: Rng>(rng: &mut R, max_n: usize, max_k: usize) -> MultinoulliEnsemble {
    let k = rng.random_range(2..=max_k.max(2));
    let n = rng.random_range(1..=max_n.max(1));
    let rows = (0..n)
        .map(|_| {
            let mut weights: Vec<f64> = (0..k)
                .map(|_| {
                    if rng.random_range(0..10) == 0 {
                        0.0
                    } else {
                        rng.random_range(-30.0f64..0.0).exp()
                    }
                })
                .collect();
            if weights.iter().all(|&w| w == 0.0) {
                weights[0] = 1.0;
            }
            let total: f64 = weights.iter().sum();
            let mut row: Vec<f64> = weights.iter().map(|w| w / total).collect();
            // put the rounding residue on the largest entry
            let residue = 1.0 - row.iter().sum::<f64>();
            let big = (0..k).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
            row[big] = (row[big] + residue).clamp(0.0, 1.0);
            row
        })
        .collect();
    MultinoulliEnsemble::new(rows).expect("normalized rows")
}
