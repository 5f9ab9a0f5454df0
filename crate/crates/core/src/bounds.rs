//! Closed-form two-sided tail bounds for the log-likelihood statistic and a
//! numerical Chernoff optimizer that re-derives the optimal `λ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ensembles::BernoulliEnsemble;
use crate::error::{domain, Result};
use crate::optimize::golden_section_min;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    New,
    Hoeffding,
    ClassicalBernstein,
    Multinoulli,
    Grouped,
    GroupedMultinoulli,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::New => "new",
            Method::Hoeffding => "hoeffding",
            Method::ClassicalBernstein => "classical_bernstein",
            Method::Multinoulli => "multinoulli",
            Method::Grouped => "grouped",
            Method::GroupedMultinoulli => "grouped_multinoulli",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A bound on `P(|S| >= t)`. Values above 1 are kept as computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBoundReport {
    pub method: Method,
    pub n: usize,
    pub t: f64,
    /// Set for the ε-parameterized corollaries, where `t = n ε`.
    pub epsilon: Option<f64>,
    pub bound: f64,
    pub log_bound: f64,
    /// `bound >= 1`.
    pub trivial: bool,
    /// Every entry of the ensemble is 0 or 1, so the statistic is identically 0.
    pub degenerate: bool,
    pub aux: BTreeMap<String, f64>,
}

impl TailBoundReport {
    fn from_log(method: Method, n: usize, t: f64, log_bound: f64) -> Self {
        let bound = log_bound.exp();
        TailBoundReport {
            method,
            n,
            t,
            epsilon: None,
            bound,
            log_bound,
            trivial: bound >= 1.0,
            degenerate: false,
            aux: BTreeMap::new(),
        }
    }

    fn degenerate(method: Method, n: usize, t: f64) -> Self {
        TailBoundReport {
            method,
            n,
            t,
            epsilon: None,
            bound: 0.0,
            log_bound: f64::NEG_INFINITY,
            trivial: false,
            degenerate: true,
            aux: BTreeMap::new(),
        }
    }

    fn with_aux(mut self, key: &str, value: f64) -> Self {
        self.aux.insert(key.to_string(), value);
        self
    }
}

fn check_n_t(n: usize, t: f64) -> Result<()> {
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    if !(t > 0.0) || t.is_infinite() {
        return Err(domain(format!("t must be positive and finite, got {t}")));
    }
    Ok(())
}

/// `-t² / (2(n + t))`, the one-sided log bound.
pub fn one_sided_log_bound(n: usize, t: f64) -> f64 {
    let n = n as f64;
    -t * t / (2.0 * (n + t))
}

/// `2 exp(-t² / (2(n + t)))`, valid for any probabilities in [0, 1].
pub fn new_tail_bound(n: usize, t: f64) -> Result<TailBoundReport> {
    check_n_t(n, t)?;
    let lambda = t / (t + n as f64);
    Ok(TailBoundReport::from_log(
        Method::New,
        n,
        t,
        std::f64::consts::LN_2 + one_sided_log_bound(n, t),
    )
    .with_aux("lambda", -lambda))
}

/// Hoeffding: `2 exp(-2t² / sum (ln p_i)²)` over the non-degenerate entries.
pub fn hoeffding_bound(ensemble: &BernoulliEnsemble, t: f64) -> Result<TailBoundReport> {
    let n = ensemble.len();
    check_n_t(n, t)?;
    if ensemble.all_degenerate() {
        return Ok(TailBoundReport::degenerate(Method::Hoeffding, n, t).with_aux("sum_log_sq", 0.0));
    }
    let sum_log_sq: f64 = ensemble.summands().iter().map(|s| s.weight * s.weight).sum();
    let log_bound = std::f64::consts::LN_2 - 2.0 * t * t / sum_log_sq;
    Ok(TailBoundReport::from_log(Method::Hoeffding, n, t, log_bound).with_aux("sum_log_sq", sum_log_sq))
}

/// Bernstein with the range `|ln p_(1)|`:
/// `2 exp(-(t²/2) / (sum Var(X_i ln p_i) + |ln p_(1)| t / 3))`.
pub fn classical_bernstein_bound(ensemble: &BernoulliEnsemble, t: f64) -> Result<TailBoundReport> {
    let n = ensemble.len();
    check_n_t(n, t)?;
    let Some(smallest) = ensemble.smallest_nondegenerate() else {
        return Ok(TailBoundReport::degenerate(Method::ClassicalBernstein, n, t)
            .with_aux("variance_sum", 0.0)
            .with_aux("abs_log_min_p", 0.0));
    };
    let variance_sum: f64 = ensemble.summands().iter().map(|s| s.variance()).sum();
    let range = -smallest.ln();
    let log_bound = std::f64::consts::LN_2 - (t * t / 2.0) / (variance_sum + range * t / 3.0);
    Ok(
        TailBoundReport::from_log(Method::ClassicalBernstein, n, t, log_bound)
            .with_aux("variance_sum", variance_sum)
            .with_aux("abs_log_min_p", range),
    )
}

fn categorical_bound(method: Method, n: usize, k: usize, epsilon: f64) -> Result<TailBoundReport> {
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    if k < 2 {
        return Err(domain(format!("K must be >= 2, got {k}")));
    }
    if !(epsilon > 0.0) || epsilon.is_infinite() {
        return Err(domain(format!("epsilon must be positive and finite, got {epsilon}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let log_bound = (2.0 * kf).ln() - nf * epsilon * epsilon / (2.0 * kf * (kf + epsilon));
    let mut report = TailBoundReport::from_log(method, n, nf * epsilon, log_bound)
        .with_aux("k", kf)
        .with_aux("per_category_t", nf * epsilon / kf);
    report.epsilon = Some(epsilon);
    Ok(report)
}

/// `2K exp(-n ε² / (2K(K + ε)))` on `P(|sum_i sum_k (X_ik - p_ik) ln p_ik| >= n ε)`.
pub fn multinoulli_bound(n: usize, k: usize, epsilon: f64) -> Result<TailBoundReport> {
    categorical_bound(Method::Multinoulli, n, k, epsilon)
}

/// Same value as [`new_tail_bound`]; certifies the grouped statistic weighted by `ln p̄`.
pub fn grouped_tail_bound(n: usize, t: f64) -> Result<TailBoundReport> {
    let mut report = new_tail_bound(n, t)?;
    report.method = Method::Grouped;
    Ok(report)
}

pub fn grouped_multinoulli_bound(n: usize, k: usize, epsilon: f64) -> Result<TailBoundReport> {
    categorical_bound(Method::GroupedMultinoulli, n, k, epsilon)
}

/// New, Hoeffding and classical Bernstein bounds for each `t`, in input order.
pub fn compare(ensemble: &BernoulliEnsemble, t_list: &[f64]) -> Result<Vec<TailBoundReport>> {
    if t_list.is_empty() {
        return Err(domain("t list is empty"));
    }
    let mut out = Vec::with_capacity(3 * t_list.len());
    for &t in t_list {
        out.push(new_tail_bound(ensemble.len(), t)?);
        out.push(hoeffding_bound(ensemble, t)?);
        out.push(classical_bernstein_bound(ensemble, t)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffSolution {
    pub n: usize,
    pub t: f64,
    pub side: Side,
    pub lambda_star: f64,
    /// Minimized exponent `f(λ*)`; `exp` of it bounds one tail.
    pub objective_value: f64,
    pub closed_form_lambda: f64,
    pub closed_form_objective: f64,
}

/// Bracket width at which the golden-section search stops.
pub const CHERNOFF_TOL: f64 = 1e-10;

/// `n λ² / (2(1 - |λ|)) + λ t` (left) or `... - λ t` (right).
pub fn chernoff_objective(n: usize, t: f64, side: Side, lambda: f64) -> f64 {
    let drift = match side {
        Side::Left => lambda * t,
        Side::Right => -lambda * t,
    };
    n as f64 * lambda * lambda / (2.0 * (1.0 - lambda.abs())) + drift
}

/// Minimize the Chernoff exponent over `(-1, 0)` or `(0, 1)`.
pub fn chernoff_optimize(n: usize, t: f64, side: Side) -> Result<ChernoffSolution> {
    check_n_t(n, t)?;
    let (lo, hi) = match side {
        Side::Left => (-1.0, 0.0),
        Side::Right => (0.0, 1.0),
    };
    let objective = |lambda: f64| chernoff_objective(n, t, side, lambda);
    let lambda_star = golden_section_min(objective, lo, hi, CHERNOFF_TOL);
    let magnitude = t / (t + n as f64);
    let closed_form_lambda = match side {
        Side::Left => -magnitude,
        Side::Right => magnitude,
    };
    Ok(ChernoffSolution {
        n,
        t,
        side,
        lambda_star,
        objective_value: objective(lambda_star),
        closed_form_lambda,
        closed_form_objective: one_sided_log_bound(n, t),
    })
}
