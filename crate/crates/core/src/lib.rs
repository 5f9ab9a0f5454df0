//! Tail bounds for the Bernoulli log-likelihood statistic
//! `S = sum_i (X_i - p_i) ln p_i` that hold uniformly in the `p_i`, the
//! classical Hoeffding and Bernstein bounds it is compared against, and the
//! exact-enumeration and Monte Carlo machinery that checks all of them.

pub mod bounds;
pub mod ensembles;
pub mod error;
pub mod mgf;
pub mod montecarlo;
pub mod numeric;
pub mod optimize;
pub mod oracle;
pub mod report;
pub mod verify;

pub use bounds::{
    chernoff_optimize, classical_bernstein_bound, compare, grouped_multinoulli_bound,
    grouped_tail_bound, hoeffding_bound, multinoulli_bound, new_tail_bound, ChernoffSolution,
    Method, Side, TailBoundReport,
};
pub use ensembles::{
    support_points, Atom, BernoulliEnsemble, CenteredWeight, Ensemble, EnsembleSpec,
    GroupedEnsemble, MultinoulliEnsemble,
};
pub use error::{Error, Result};
pub use mgf::{
    check_bernstein_condition, envelope, grouped_mgf, mgf, mgf_boundary_scan, moment, moment_scan,
    BernsteinConditionReport, BoundaryScan, GroupedMgf, MgfEvaluation, MomentRecord, MomentScan,
    Verdict,
};
pub use montecarlo::{
    sample_statistic, simulate_mgf, simulate_tail, MgfEstimate, MonteCarloEstimate, SimConfig,
};
pub use oracle::{
    exact_distribution, exact_grouped_distribution, exact_mgf_product,
    exact_multinoulli_distribution, exact_tail_probability, ExactDistribution,
};
