//! Moment generating function of `Y = (X - p) ln p`, its moments, the
//! parameter-free envelope `exp(λ² / (2(1 - |λ|)))`, and diagnostics for
//! the moment condition and the `λ < -1` blow-up.

use serde::Serialize;

use crate::ensembles::is_degenerate;
use crate::error::{domain, Error, Result};
use crate::numeric::{ln_one_minus, log_add_exp, log_factorial, SignedLog};

/// Variance proxy and scale for which the moment condition holds for every `p`.
pub const SIGMA2: f64 = 1.0;
pub const SCALE_B: f64 = 1.0;

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange {
            value: p,
            location: "mgf argument".into(),
        })
    }
}

/// `ln(q e^a + (1 - q) e^b)` for a mass `q` in [0, 1].
fn log_two_point(q: f64, a: f64, b: f64) -> f64 {
    let lo = if q > 0.0 { q.ln() + a } else { f64::NEG_INFINITY };
    let hi = if q < 1.0 { ln_one_minus(q) + b } else { f64::NEG_INFINITY };
    log_add_exp(lo, hi)
}

/// Exponents of the two atoms of `λ Y` given mean parameter `center` and log
/// weight `w = ln center`: `(λ (1 - center) w, -λ center w)`.
fn atom_exponents(center: f64, lambda: f64) -> (f64, f64) {
    let w = center.ln();
    (lambda * (1.0 - center) * w, -lambda * center * w)
}

/// `ln G(p, λ)`. The success term is `p^(1 + λ(1-p))`, which for `λ < -1`
/// grows without bound as `p -> 0`.
pub fn log_mgf(p: f64, lambda: f64) -> f64 {
    if is_degenerate(p) || lambda == 0.0 {
        return 0.0;
    }
    let (a, b) = atom_exponents(p, lambda);
    log_two_point(p, a, b)
}

/// One evaluation of `G(p, λ)` with its envelope when `|λ| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MgfEvaluation {
    pub p: f64,
    pub lambda: f64,
    /// May be `+inf` when `G` overflows; `log_value` stays finite.
    pub value: f64,
    pub log_value: f64,
    pub envelope: Option<f64>,
    pub log_envelope: Option<f64>,
}

impl MgfEvaluation {
    pub fn overflowed(&self) -> bool {
        self.value.is_infinite()
    }

    /// `G <= envelope * (1 + rel_tol)`, compared in log space. `None` when
    /// the envelope is undefined.
    pub fn within_envelope(&self, rel_tol: f64) -> Option<bool> {
        self.log_envelope
            .map(|le| self.log_value <= le + rel_tol.ln_1p())
    }
}

pub fn mgf(p: f64, lambda: f64) -> Result<MgfEvaluation> {
    check_p(p)?;
    if !lambda.is_finite() {
        return Err(domain(format!("lambda must be finite, got {lambda}")));
    }
    let log_value = log_mgf(p, lambda);
    let value = if is_degenerate(p) || lambda == 0.0 {
        1.0
    } else {
        let (a, b) = atom_exponents(p, lambda);
        let direct = p * a.exp() + (1.0 - p) * b.exp();
        if direct.is_finite() {
            direct
        } else {
            log_value.exp()
        }
    };
    let log_envelope = log_envelope(lambda).ok();
    Ok(MgfEvaluation {
        p,
        lambda,
        value,
        log_value,
        envelope: log_envelope.map(f64::exp),
        log_envelope,
    })
}

/// `λ² / (2(1 - |λ|))`, the log of the envelope.
pub fn log_envelope(lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda.abs() >= 1.0 {
        return Err(Error::EnvelopeUndefined(lambda));
    }
    Ok(lambda * lambda / (2.0 * (1.0 - lambda.abs())))
}

/// `exp(λ² / (2(1 - |λ|)))`, defined for `|λ| < 1`.
pub fn envelope(lambda: f64) -> Result<f64> {
    log_envelope(lambda).map(f64::exp)
}

/// Evaluate `G` on every `(λ, p)` pair, λ-major.
pub fn mgf_scan(lambdas: &[f64], p_grid: &[f64]) -> Result<Vec<MgfEvaluation>> {
    let mut out = Vec::with_capacity(lambdas.len() * p_grid.len());
    for &lambda in lambdas {
        for &p in p_grid {
            out.push(mgf(p, lambda)?);
        }
    }
    Ok(out)
}

/// `E[Y^m] = A1 + A2` with `A1 = p (1-p)^m (ln p)^m` and `A2 = (1-p)(-p ln p)^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentRecord {
    pub p: f64,
    pub m: u32,
    pub a1: f64,
    pub a2: f64,
    pub total: f64,
    /// `ln |E[Y^m]|`, finite even where `total` overflows.
    pub log_abs_total: f64,
}

fn moment_terms(p: f64, m: u32) -> (SignedLog, SignedLog) {
    if is_degenerate(p) {
        return (SignedLog::ZERO, SignedLog::ZERO);
    }
    let mf = m as f64;
    let ln_p = p.ln();
    let ln_q = ln_one_minus(p);
    let ln_abs_w = (-ln_p).ln();
    let sign_a1 = if m % 2 == 0 { 1.0 } else { -1.0 };
    let a1 = SignedLog::new(sign_a1, ln_p + mf * ln_q + mf * ln_abs_w);
    let a2 = SignedLog::new(1.0, ln_q + mf * (ln_p + ln_abs_w));
    (a1, a2)
}

pub fn moment(p: f64, m: u32) -> Result<MomentRecord> {
    check_p(p)?;
    if m == 0 {
        return Err(domain("moment order must be >= 1"));
    }
    let (a1, a2) = moment_terms(p, m);
    let total = a1.add(a2);
    Ok(MomentRecord {
        p,
        m,
        a1: a1.value(),
        a2: a2.value(),
        total: total.value(),
        log_abs_total: total.log_abs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernsteinConditionReport {
    pub sigma2: f64,
    pub b: f64,
    pub m_max: u32,
    pub grid_size: usize,
    /// Largest `|E[Y^m]| - m!/2` over the grid (may be `-inf` when every
    /// tested `m!/2` overflows).
    pub max_violation: f64,
    /// Largest `ln|E[Y^m]| - ln(m!/2)`; the condition holds iff this is `<= 0`.
    pub max_log_ratio: f64,
    pub argmax_m: u32,
    pub argmax_p: f64,
}

impl BernsteinConditionReport {
    pub fn holds(&self) -> bool {
        self.max_log_ratio <= 0.0 && self.max_violation <= 0.0
    }
}

/// Check `|E[Y^m]| <= m! σ² b^(m-2) / 2` with `σ² = b = 1` for `3 <= m <= m_max`.
pub fn check_bernstein_condition(m_max: u32, p_grid: &[f64]) -> Result<BernsteinConditionReport> {
    if m_max < 3 {
        return Err(domain("m_max must be >= 3"));
    }
    if p_grid.is_empty() {
        return Err(domain("probability grid is empty"));
    }
    for &p in p_grid {
        check_p(p)?;
    }
    let mut report = BernsteinConditionReport {
        sigma2: SIGMA2,
        b: SCALE_B,
        m_max,
        grid_size: p_grid.len(),
        max_violation: f64::NEG_INFINITY,
        max_log_ratio: f64::NEG_INFINITY,
        argmax_m: 3,
        argmax_p: p_grid[0],
    };
    for m in 3..=m_max {
        let log_ceiling = log_factorial(m as u64) - std::f64::consts::LN_2
            + SIGMA2.ln()
            + (m as f64 - 2.0) * SCALE_B.ln();
        let ceiling = log_ceiling.exp();
        for &p in p_grid {
            let (a1, a2) = moment_terms(p, m);
            let log_ratio = a1.add(a2).log_abs - log_ceiling;
            let violation = ceiling * log_ratio.exp_m1();
            if violation > report.max_violation
                || (violation == report.max_violation && log_ratio > report.max_log_ratio)
            {
                report.max_violation = violation;
                report.argmax_m = m;
                report.argmax_p = p;
            }
            report.max_log_ratio = report.max_log_ratio.max(log_ratio);
        }
    }
    Ok(report)
}

/// `ln(m!/√(2πm)) - m ln(m/e)`; positive when `(m/e)^m <= m!/√(2πm)`.
pub fn stirling_step_slack(m: u32) -> f64 {
    let mf = m as f64;
    let lhs = mf * (mf.ln() - 1.0);
    let rhs = log_factorial(m as u64) - 0.5 * (2.0 * std::f64::consts::PI * mf).ln();
    rhs - lhs
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentScan {
    pub m: u32,
    /// `(p, |E[Y^m]|)` for every grid point.
    pub profile: Vec<(f64, f64)>,
    pub argmax_p: f64,
    pub peak: f64,
    /// Grid argmax of `p |ln p|^m`, the term that dominates `|A1|`.
    pub bump_argmax_p: f64,
    pub bump_peak: f64,
    /// Grid argmax of `|A1| = p (1-p)^m |ln p|^m` itself.
    pub a1_argmax_p: f64,
    /// `e^-m`, where `p |ln p|^m` peaks.
    pub bump_location: f64,
    /// `(m/e)^m`, the peak value of `p |ln p|^m`.
    pub bump_ceiling: f64,
}

fn argmax_by<F: Fn(f64) -> f64>(grid: &[f64], f: F) -> (f64, f64) {
    grid.iter()
        .map(|&p| (p, f(p)))
        .fold((grid[0], f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        })
}

pub fn moment_scan(m: u32, p_grid: &[f64]) -> Result<MomentScan> {
    if m < 2 {
        return Err(domain("moment_scan requires m >= 2"));
    }
    if p_grid.is_empty() {
        return Err(domain("probability grid is empty"));
    }
    let mut profile = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let rec = moment(p, m)?;
        profile.push((p, rec.log_abs_total.exp()));
    }
    let (argmax_p, peak) = profile
        .iter()
        .copied()
        .fold((p_grid[0], f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    let mf = m as f64;
    let log_bump = |p: f64| {
        if is_degenerate(p) {
            f64::NEG_INFINITY
        } else {
            p.ln() + mf * (-p.ln()).ln()
        }
    };
    let (bump_argmax_p, log_bump_peak) = argmax_by(p_grid, log_bump);
    let (a1_argmax_p, _) = argmax_by(p_grid, |p| moment_terms(p, m).0.log_abs);
    Ok(MomentScan {
        m,
        profile,
        argmax_p,
        peak,
        bump_argmax_p,
        bump_peak: log_bump_peak.exp(),
        a1_argmax_p,
        bump_location: (-mf).exp(),
        bump_ceiling: (mf * (mf.ln() - 1.0)).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Diverges,
    Converges,
}

/// Minimum log-log growth rate `d ln G / d ln(1/p)` over each of the last two
/// steps of the sequence for a divergence verdict. `G ~ p^(λ+1)` gives a rate
/// of `-(λ + 1)` for `λ < -1` and a rate tending to 0 otherwise.
pub const DIVERGENCE_RATE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryScan {
    pub lambda: f64,
    pub values: Vec<MgfEvaluation>,
    pub verdict: Verdict,
    /// `G` at the smallest `p` of the sequence.
    pub limit_estimate: f64,
}

/// Follow `G(p, λ)` along a sequence `p -> 0+`.
///
/// The verdict is `Diverges` when, over each of the last two steps, `G`
/// increases at a log-log rate above `DIVERGENCE_RATE`.
pub fn mgf_boundary_scan(lambda: f64, p_sequence: &[f64]) -> Result<BoundaryScan> {
    if p_sequence.len() < 3 {
        return Err(domain("boundary scan needs at least three points"));
    }
    if p_sequence.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(domain("boundary scan points must lie in (0, 1)"));
    }
    if p_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(domain("boundary scan points must be strictly decreasing"));
    }
    let values = p_sequence
        .iter()
        .map(|&p| mgf(p, lambda))
        .collect::<Result<Vec<_>>>()?;
    let k = values.len();
    let rate = |i: usize| {
        (values[i + 1].log_value - values[i].log_value) / (p_sequence[i].ln() - p_sequence[i + 1].ln())
    };
    let verdict = if rate(k - 3) > DIVERGENCE_RATE && rate(k - 2) > DIVERGENCE_RATE {
        Verdict::Diverges
    } else {
        Verdict::Converges
    };
    let limit_estimate = values.last().map(|v| v.value).unwrap_or(f64::NAN);
    Ok(BoundaryScan {
        lambda,
        values,
        verdict,
        limit_estimate,
    })
}

/// Exact MGF of a group statistic `Z = sum_j (X_j - p_j) ln p̄` against the
/// dominating value `G(p̄, λ)^n` from the AM-GM step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupedMgf {
    pub mean: f64,
    pub exact: f64,
    pub log_exact: f64,
    pub dominating: f64,
    pub log_dominating: f64,
}

pub fn grouped_mgf(group: &[f64], lambda: f64) -> Result<GroupedMgf> {
    if group.is_empty() {
        return Err(Error::Empty("group has no members"));
    }
    for &p in group {
        check_p(p)?;
    }
    if !lambda.is_finite() {
        return Err(domain(format!("lambda must be finite, got {lambda}")));
    }
    let mean = (group.iter().sum::<f64>() / group.len() as f64).clamp(0.0, 1.0);
    let (log_exact, log_dominating) = if is_degenerate(mean) || lambda == 0.0 {
        (0.0, 0.0)
    } else {
        let (a, b) = atom_exponents(mean, lambda);
        let exact = group.iter().map(|&p| log_two_point(p, a, b)).sum::<f64>();
        (exact, group.len() as f64 * log_two_point(mean, a, b))
    };
    Ok(GroupedMgf {
        mean,
        exact: log_exact.exp(),
        log_exact,
        dominating: log_dominating.exp(),
        log_dominating,
    })
}
