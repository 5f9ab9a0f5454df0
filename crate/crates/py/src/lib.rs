//! Python bindings for `bernlog`.

use std::collections::BTreeMap;

use bernlog as core;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_side(side: &str) -> PyResult<core::Side> {
    match side {
        "left" => Ok(core::Side::Left),
        "right" => Ok(core::Side::Right),
        other => Err(PyValueError::new_err(format!("side must be 'left' or 'right', got {other:?}"))),
    }
}

/// A validated ensemble: Bernoulli, multinoulli or grouped.
#[pyclass(frozen, module = "pybernlog")]
struct Ensemble {
    inner: core::Ensemble,
}

#[pymethods]
impl Ensemble {
    /// Independent Bernoulli(p_i) variables.
    #[staticmethod]
    fn bernoulli(probs: Vec<f64>) -> PyResult<Self> {
        let e = core::BernoulliEnsemble::new(probs).map_err(value_error)?;
        Ok(Ensemble { inner: e.into() })
    }

    /// Rows of categorical probabilities, one row per variable.
    #[staticmethod]
    fn multinoulli(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let e = core::MultinoulliEnsemble::new(rows).map_err(value_error)?;
        Ok(Ensemble { inner: e.into() })
    }

    /// Groups of Bernoulli probabilities sharing a weight `ln(mean)`.
    #[staticmethod]
    fn grouped(groups: Vec<Vec<f64>>) -> PyResult<Self> {
        let e = core::GroupedEnsemble::new(groups).map_err(value_error)?;
        Ok(Ensemble { inner: e.into() })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        core::Ensemble::from_json(text)
            .map(|inner| Ensemble { inner })
            .map_err(value_error)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner {
            core::Ensemble::Bernoulli(_) => "bernoulli",
            core::Ensemble::Multinoulli(_) => "multinoulli",
            core::Ensemble::Grouped(_) => "grouped",
        }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Exact distribution of the statistic as `[(value, mass), ...]`.
    fn exact_distribution(&self) -> PyResult<Vec<(f64, f64)>> {
        let d = core::verify::exact_for(&self.inner).map_err(value_error)?;
        Ok(d.atoms.iter().map(|a| (a.value, a.mass)).collect())
    }

    /// Exact `P(|S| >= t)` by enumeration.
    fn exact_tail_probability(&self, t: f64) -> PyResult<f64> {
        let d = core::verify::exact_for(&self.inner).map_err(value_error)?;
        Ok(d.tail_probability(t))
    }

    /// Monte Carlo estimate of `P(|S| >= t)`.
    #[pyo3(signature = (t, replicates=core::montecarlo::DEFAULT_REPLICATES, seed=0, confidence=core::montecarlo::DEFAULT_CONFIDENCE, workers=None))]
    fn simulate_tail(
        &self,
        py: Python<'_>,
        t: f64,
        replicates: u64,
        seed: u64,
        confidence: f64,
        workers: Option<usize>,
    ) -> PyResult<MonteCarloEstimate> {
        let config = core::SimConfig {
            replicates,
            seed,
            confidence,
            workers: workers.unwrap_or_else(|| core::SimConfig::default().workers),
        };
        let inner = &self.inner;
        py.detach(|| core::simulate_tail(inner, t, &config))
            .map(MonteCarloEstimate::from)
            .map_err(value_error)
    }

    /// Run every applicable bound against the exact distribution.
    fn verify(&self) -> PyResult<(bool, f64)> {
        let v = core::verify::verify_ensemble(&self.inner).map_err(value_error)?;
        Ok((v.pass, v.max_ratio))
    }

    fn __repr__(&self) -> String {
        format!("Ensemble({})", self.inner.to_json())
    }
}

/// One bound evaluation.
#[pyclass(frozen, get_all, module = "pybernlog")]
struct TailBound {
    method: String,
    n: usize,
    t: f64,
    epsilon: Option<f64>,
    bound: f64,
    log_bound: f64,
    trivial: bool,
    degenerate: bool,
    aux: BTreeMap<String, f64>,
}

impl From<core::TailBoundReport> for TailBound {
    fn from(r: core::TailBoundReport) -> Self {
        TailBound {
            method: r.method.as_str().to_string(),
            n: r.n,
            t: r.t,
            epsilon: r.epsilon,
            bound: r.bound,
            log_bound: r.log_bound,
            trivial: r.trivial,
            degenerate: r.degenerate,
            aux: r.aux,
        }
    }
}

#[pymethods]
impl TailBound {
    fn __repr__(&self) -> String {
        format!("TailBound(method={:?}, n={}, t={}, bound={:e})", self.method, self.n, self.t, self.bound)
    }
}

#[pyclass(frozen, get_all, module = "pybernlog")]
struct MonteCarloEstimate {
    t: f64,
    hits: u64,
    replicates: u64,
    point: f64,
    ci_low: f64,
    ci_high: f64,
    confidence: f64,
    seed: u64,
    workers: usize,
}

impl From<core::MonteCarloEstimate> for MonteCarloEstimate {
    fn from(e: core::MonteCarloEstimate) -> Self {
        MonteCarloEstimate {
            t: e.t,
            hits: e.hits,
            replicates: e.replicates,
            point: e.point,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            confidence: e.confidence,
            seed: e.seed,
            workers: e.workers,
        }
    }
}

#[pymethods]
impl MonteCarloEstimate {
    fn __repr__(&self) -> String {
        format!(
            "MonteCarloEstimate(t={}, hits={}, replicates={}, point={}, ci=({}, {}))",
            self.t, self.hits, self.replicates, self.point, self.ci_low, self.ci_high
        )
    }
}

#[pyclass(frozen, get_all, module = "pybernlog")]
struct ChernoffSolution {
    n: usize,
    t: f64,
    side: &'static str,
    lambda_star: f64,
    objective_value: f64,
    closed_form_lambda: f64,
    closed_form_objective: f64,
}

#[pymethods]
impl ChernoffSolution {
    fn __repr__(&self) -> String {
        format!(
            "ChernoffSolution(n={}, t={}, side={:?}, lambda_star={}, objective_value={})",
            self.n, self.t, self.side, self.lambda_star, self.objective_value
        )
    }
}

/// `G(p, λ) = E[exp(λ (X - p) ln p)]` for `X ~ Bernoulli(p)`.
#[pyfunction]
fn mgf(p: f64, lambda: f64) -> PyResult<f64> {
    core::mgf(p, lambda).map(|g| g.value).map_err(value_error)
}

#[pyfunction]
fn log_mgf(p: f64, lambda: f64) -> PyResult<f64> {
    core::mgf(p, lambda).map(|g| g.log_value).map_err(value_error)
}

/// `exp(λ² / (2 (1 - |λ|)))`, defined for `|λ| < 1`.
#[pyfunction]
fn envelope(lambda: f64) -> PyResult<f64> {
    core::envelope(lambda).map_err(value_error)
}

/// `E[Y^m]` for the centered weighted summand at `p`.
#[pyfunction]
fn moment(p: f64, m: u32) -> PyResult<f64> {
    core::moment(p, m).map(|r| r.total).map_err(value_error)
}

/// Largest `ln|E[Y^m]| - ln(m!/2)` over `m = 3..=m_max` and the grid.
#[pyfunction]
fn bernstein_condition_margin(m_max: u32, p_grid: Vec<f64>) -> PyResult<f64> {
    core::check_bernstein_condition(m_max, &p_grid)
        .map(|r| r.max_log_ratio)
        .map_err(value_error)
}

/// Verdict (`"diverges"` / `"converges"`) and `G` at the smallest `p`.
#[pyfunction]
fn boundary_scan(lambda: f64, p_sequence: Vec<f64>) -> PyResult<(&'static str, f64)> {
    let s = core::mgf_boundary_scan(lambda, &p_sequence).map_err(value_error)?;
    let verdict = match s.verdict {
        core::Verdict::Diverges => "diverges",
        core::Verdict::Converges => "converges",
    };
    Ok((verdict, s.limit_estimate))
}

#[pyfunction]
fn grouped_mgf(group: Vec<f64>, lambda: f64) -> PyResult<(f64, f64)> {
    core::grouped_mgf(&group, lambda)
        .map(|g| (g.exact, g.dominating))
        .map_err(value_error)
}

/// `2 exp(-t² / (2 (n + t)))`.
#[pyfunction]
fn new_tail_bound(n: usize, t: f64) -> PyResult<TailBound> {
    core::new_tail_bound(n, t).map(Into::into).map_err(value_error)
}

#[pyfunction]
fn hoeffding_bound(probs: Vec<f64>, t: f64) -> PyResult<TailBound> {
    let e = core::BernoulliEnsemble::new(probs).map_err(value_error)?;
    core::hoeffding_bound(&e, t).map(Into::into).map_err(value_error)
}

#[pyfunction]
fn classical_bernstein_bound(probs: Vec<f64>, t: f64) -> PyResult<TailBound> {
    let e = core::BernoulliEnsemble::new(probs).map_err(value_error)?;
    core::classical_bernstein_bound(&e, t).map(Into::into).map_err(value_error)
}

#[pyfunction]
fn multinoulli_bound(n: usize, k: usize, epsilon: f64) -> PyResult<TailBound> {
    core::multinoulli_bound(n, k, epsilon).map(Into::into).map_err(value_error)
}

#[pyfunction]
fn grouped_tail_bound(n: usize, t: f64) -> PyResult<TailBound> {
    core::grouped_tail_bound(n, t).map(Into::into).map_err(value_error)
}

/// New, Hoeffding and classical Bernstein bounds for each threshold.
#[pyfunction]
fn compare(probs: Vec<f64>, t: Vec<f64>) -> PyResult<Vec<TailBound>> {
    let e = core::BernoulliEnsemble::new(probs).map_err(value_error)?;
    let reports = core::compare(&e, &t).map_err(value_error)?;
    Ok(reports.into_iter().map(Into::into).collect())
}

#[pyfunction]
#[pyo3(signature = (n, t, side="left"))]
fn chernoff_optimize(n: usize, t: f64, side: &str) -> PyResult<ChernoffSolution> {
    let s = core::chernoff_optimize(n, t, parse_side(side)?).map_err(value_error)?;
    Ok(ChernoffSolution {
        n: s.n,
        t: s.t,
        side: match s.side {
            core::Side::Left => "left",
            core::Side::Right => "right",
        },
        lambda_star: s.lambda_star,
        objective_value: s.objective_value,
        closed_form_lambda: s.closed_form_lambda,
        closed_form_objective: s.closed_form_objective,
    })
}

#[pymodule]
fn pybernlog(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Ensemble>()?;
    m.add_class::<TailBound>()?;
    m.add_class::<MonteCarloEstimate>()?;
    m.add_class::<ChernoffSolution>()?;
    m.add_function(wrap_pyfunction!(mgf, m)?)?;
    m.add_function(wrap_pyfunction!(log_mgf, m)?)?;
    m.add_function(wrap_pyfunction!(envelope, m)?)?;
    m.add_function(wrap_pyfunction!(moment, m)?)?;
    m.add_function(wrap_pyfunction!(bernstein_condition_margin, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_scan, m)?)?;
    m.add_function(wrap_pyfunction!(grouped_mgf, m)?)?;
    m.add_function(wrap_pyfunction!(new_tail_bound, m)?)?;
    m.add_function(wrap_pyfunction!(hoeffding_bound, m)?)?;
    m.add_function(wrap_pyfunction!(classical_bernstein_bound, m)?)?;
    m.add_function(wrap_pyfunction!(multinoulli_bound, m)?)?;
    m.add_function(wrap_pyfunction!(grouped_tail_bound, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(chernoff_optimize, m)?)?;
    Ok(())
}
