//! Exact distributions of the log-likelihood statistics by exhaustive
//! enumeration, used as ground truth for every bound.
//!
//! Outcomes are enumerated one independent unit at a time (each unit
//! multiplies the outcome set by its atom count) and atoms that coincide
//! after a unit is added are merged, so equal probabilities collapse
//! binomially instead of producing `2^n` separate atoms.

use serde::Serialize;

use crate::ensembles::{Atom, BernoulliEnsemble, GroupedEnsemble, MultinoulliEnsemble};
use crate::error::{Error, Result};
use crate::mgf::log_mgf;
use crate::numeric::{linear_grid, log_add_exp};

/// Maximum number of raw outcomes (`2^n` or `K^n`) enumerated.
pub const ENUMERATION_CAP: f64 = (1u64 << 24) as f64;

/// Atoms closer than `MERGE_TOL * max(1, |value|)` are merged.
pub const MERGE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactDistribution {
    /// Sorted ascending by value.
    pub atoms: Vec<Atom>,
    pub total_mass: f64,
}

fn merge_sorted(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    let mut anchor = f64::NAN;
    for atom in atoms {
        if atom.mass == 0.0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if atom.value - anchor <= MERGE_TOL * anchor.abs().max(1.0) => {
                let mass = last.mass + atom.mass;
                last.value = (last.value * last.mass + atom.value * atom.mass) / mass;
                last.mass = mass;
            }
            _ => {
                anchor = atom.value;
                out.push(atom);
            }
        }
    }
    out
}

fn convolve(units: impl IntoIterator<Item = Vec<Atom>>) -> ExactDistribution {
    let mut atoms = vec![Atom {
        value: 0.0,
        mass: 1.0,
    }];
    for unit in units {
        let mut next = Vec::with_capacity(atoms.len() * unit.len());
        for a in &atoms {
            for u in &unit {
                next.push(Atom {
                    value: a.value + u.value,
                    mass: a.mass * u.mass,
                });
            }
        }
        atoms = merge_sorted(next);
    }
    let total_mass = atoms.iter().map(|a| a.mass).sum();
    ExactDistribution { atoms, total_mass }
}

fn check_cap(outcomes: f64) -> Result<()> {
    if outcomes > ENUMERATION_CAP {
        Err(Error::EnumerationCap { outcomes })
    } else {
        Ok(())
    }
}

impl ExactDistribution {
    /// `P(|S| >= t)`.
    pub fn tail_probability(&self, t: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.value.abs() >= t)
            .map(|a| a.mass)
            .sum::<f64>()
            .min(1.0)
    }

    /// `E[S]` from the atoms.
    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.value * a.mass).sum()
    }

    /// `max |S|` over the support.
    pub fn support_radius(&self) -> f64 {
        self.atoms.iter().map(|a| a.value.abs()).fold(0.0, f64::max)
    }

    /// `ln E[e^{λS}]` summed over the atoms.
    pub fn log_mgf(&self, lambda: f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.mass.ln() + lambda * a.value)
            .fold(f64::NEG_INFINITY, log_add_exp)
    }
}

pub fn exact_tail_probability(dist: &ExactDistribution, t: f64) -> f64 {
    dist.tail_probability(t)
}

/// Distribution of `sum_i (X_i - p_i) ln p_i`.
pub fn exact_distribution(ensemble: &BernoulliEnsemble) -> Result<ExactDistribution> {
    check_cap(2f64.powi(ensemble.len() as i32))?;
    Ok(convolve(ensemble.summands().iter().map(|s| s.atoms())))
}

/// Distribution of `sum_i sum_j (X_j^(i) - p_j^(i)) ln p̄^(i)`.
pub fn exact_grouped_distribution(ensemble: &GroupedEnsemble) -> Result<ExactDistribution> {
    check_cap(2f64.powi(ensemble.total() as i32))?;
    let weights = ensemble.weights();
    let units = ensemble
        .groups()
        .iter()
        .zip(weights)
        .flat_map(|(group, w)| {
            group.iter().map(move |&p| {
                if w == 0.0 || p == 0.0 || p == 1.0 {
                    vec![Atom {
                        value: 0.0,
                        mass: 1.0,
                    }]
                } else {
                    vec![
                        Atom {
                            value: (1.0 - p) * w,
                            mass: p,
                        },
                        Atom {
                            value: -p * w,
                            mass: 1.0 - p,
                        },
                    ]
                }
            })
        });
    Ok(convolve(units))
}

/// Distribution of `sum_i sum_k (X_ik - p_ik) ln p_ik`.
pub fn exact_multinoulli_distribution(ensemble: &MultinoulliEnsemble) -> Result<ExactDistribution> {
    check_cap((ensemble.categories() as f64).powi(ensemble.len() as i32))?;
    Ok(convolve((0..ensemble.len()).map(|i| ensemble.row_outcomes(i))))
}

/// `ln prod_i G(p_i, λ)`, any `n`.
pub fn exact_log_mgf_product(ensemble: &BernoulliEnsemble, lambda: f64) -> f64 {
    ensemble.probs().iter().map(|&p| log_mgf(p, lambda)).sum()
}

pub fn exact_mgf_product(ensemble: &BernoulliEnsemble, lambda: f64) -> f64 {
    exact_log_mgf_product(ensemble, lambda).exp()
}

/// 50 thresholds from `0.02 R` to `1.05 R`, `R` the support radius.
pub fn auto_t_grid(radius: f64) -> Vec<f64> {
    linear_grid(0.02 * radius, 1.05 * radius, 50)
}
