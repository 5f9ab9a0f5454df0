//! Validated probability ensembles and the centered log-weighted summands
//! `Y = (X - p) ln p` built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::xlogx;

/// Absolute tolerance on multinoulli row sums. Rows are never renormalized.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// One point of a discrete distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub mass: f64,
}

fn check_prob(p: f64, location: impl FnOnce() -> String) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::ProbabilityOutOfRange {
            value: p,
            location: location(),
        })
    }
}

pub fn is_degenerate(p: f64) -> bool {
    p == 0.0 || p == 1.0
}

/// The centered summand `(X - p) ln p` for a single `Ber(p)`.
///
/// For `p` in {0, 1} the summand is identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenteredWeight {
    pub p: f64,
    /// `ln p`, or 0 for a degenerate entry.
    pub weight: f64,
    /// Value taken when `X = 1`: `(1 - p) ln p`.
    pub value_on_success: f64,
    /// Value taken when `X = 0`: `-p ln p`.
    pub value_on_failure: f64,
}

impl CenteredWeight {
    pub fn new(p: f64) -> Result<Self> {
        check_prob(p, || "support point".into())?;
        Ok(Self::new_unchecked(p))
    }

    pub(crate) fn new_unchecked(p: f64) -> Self {
        if is_degenerate(p) {
            return CenteredWeight {
                p,
                weight: 0.0,
                value_on_success: 0.0,
                value_on_failure: 0.0,
            };
        }
        let weight = p.ln();
        CenteredWeight {
            p,
            weight,
            value_on_success: (1.0 - p) * weight,
            value_on_failure: -xlogx(p),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        is_degenerate(self.p)
    }

    /// Atoms of the summand: one atom `(0, 1)` when degenerate, two otherwise.
    pub fn atoms(&self) -> Vec<Atom> {
        if self.is_degenerate() {
            vec![Atom {
                value: 0.0,
                mass: 1.0,
            }]
        } else {
            vec![
                Atom {
                    value: self.value_on_success,
                    mass: self.p,
                },
                Atom {
                    value: self.value_on_failure,
                    mass: 1.0 - self.p,
                },
            ]
        }
    }

    /// `Var(Y) = p (1 - p) (ln p)^2`.
    pub fn variance(&self) -> f64 {
        self.p * (1.0 - self.p) * self.weight * self.weight
    }
}

/// Support of `(X - p) ln p` as `(value, mass)` atoms.
pub fn support_points(p: f64) -> Result<Vec<Atom>> {
    Ok(CenteredWeight::new(p)?.atoms())
}

/// Independent `Ber(p_i)` variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernoulliEnsemble {
    probs: Vec<f64>,
    #[serde(skip)]
    summands: Vec<CenteredWeight>,
}

impl BernoulliEnsemble {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty("bernoulli ensemble has no entries"));
        }
        for (i, &p) in probs.iter().enumerate() {
            check_prob(p, || format!("index {i}"))?;
        }
        let summands = probs.iter().map(|&p| CenteredWeight::new_unchecked(p)).collect();
        Ok(BernoulliEnsemble { probs, summands })
    }

    /// `n` copies of the same probability.
    pub fn constant(p: f64, n: usize) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn validate(&self) -> Result<Self> {
        Self::new(self.probs.clone())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn summands(&self) -> &[CenteredWeight] {
        &self.summands
    }

    pub fn degenerate_flags(&self) -> Vec<bool> {
        self.probs.iter().map(|&p| is_degenerate(p)).collect()
    }

    pub fn all_degenerate(&self) -> bool {
        self.probs.iter().all(|&p| is_degenerate(p))
    }

    /// `p_(1)`, the smallest entry.
    pub fn smallest(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Smallest entry strictly inside (0, 1), if any.
    pub fn smallest_nondegenerate(&self) -> Option<f64> {
        self.probs
            .iter()
            .copied()
            .filter(|&p| !is_degenerate(p))
            .min_by(f64::total_cmp)
    }
}

/// Independent one-of-K categorical rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultinoulliEnsemble {
    rows: Vec<Vec<f64>>,
    categories: usize,
}

impl MultinoulliEnsemble {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("multinoulli ensemble has no rows"));
        }
        let categories = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() < 2 || row.len() != categories {
                return Err(Error::CategoryCount {
                    row: i,
                    len: row.len(),
                });
            }
            for (k, &p) in row.iter().enumerate() {
                check_prob(p, || format!("row {i}, category {k}"))?;
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowSum {
                    row: i,
                    sum,
                    tol: ROW_SUM_TOL,
                });
            }
        }
        Ok(MultinoulliEnsemble { rows, categories })
    }

    pub fn validate(&self) -> Result<Self> {
        Self::new(self.rows.clone())
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn categories(&self) -> usize {
        self.categories
    }

    /// Value of `sum_k (1{k = chosen} - p_k) ln p_k` for each chosen category of row `i`.
    pub fn row_outcomes(&self, i: usize) -> Vec<Atom> {
        let row = &self.rows[i];
        // sum_k p_k ln p_k, with 0 ln 0 = 0
        let neg_entropy: f64 = row.iter().map(|&p| xlogx(p)).sum();
        row.iter()
            .map(|&p| Atom {
                value: if p > 0.0 { p.ln() } else { 0.0 } - neg_entropy,
                mass: p,
            })
            .collect()
    }

    /// Column `k` as a Bernoulli ensemble (the marginal indicator variables).
    pub fn category_marginal(&self, k: usize) -> BernoulliEnsemble {
        BernoulliEnsemble::new(self.rows.iter().map(|r| r[k]).collect())
            .expect("validated rows")
    }
}

/// Bernoulli variables partitioned into groups whose statistic is weighted
/// by the group mean `ln p̄`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupedEnsemble {
    groups: Vec<Vec<f64>>,
    #[serde(skip)]
    means: Vec<f64>,
}

impl GroupedEnsemble {
    pub fn new(groups: Vec<Vec<f64>>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::Empty("grouped ensemble has no groups"));
        }
        let mut means = Vec::with_capacity(groups.len());
        for (i, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::Empty("grouped ensemble has an empty group"));
            }
            for (j, &p) in group.iter().enumerate() {
                check_prob(p, || format!("group {i}, member {j}"))?;
            }
            let mean = (group.iter().sum::<f64>() / group.len() as f64).clamp(0.0, 1.0);
            means.push(mean);
        }
        Ok(GroupedEnsemble { groups, means })
    }

    pub fn validate(&self) -> Result<Self> {
        Self::new(self.groups.clone())
    }

    pub fn groups(&self) -> &[Vec<f64>] {
        &self.groups
    }

    /// Group means `p̄^(i)`.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// `ln p̄^(i)`, or 0 when the group mean is 0 or 1.
    pub fn weights(&self) -> Vec<f64> {
        self.means
            .iter()
            .map(|&m| if is_degenerate(m) { 0.0 } else { m.ln() })
            .collect()
    }

    /// Total number of variables `n = sum n_i`.
    pub fn total(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn flatten(&self) -> BernoulliEnsemble {
        BernoulliEnsemble::new(self.groups.concat()).expect("validated groups")
    }
}

/// Wire form of an ensemble: `{"bernoulli": [...]}`, `{"multinoulli": [[...]]}`
/// or `{"grouped": [[...]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum EnsembleSpec {
    Bernoulli(Vec<f64>),
    Multinoulli(Vec<Vec<f64>>),
    Grouped(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ensemble {
    Bernoulli(BernoulliEnsemble),
    Multinoulli(MultinoulliEnsemble),
    Grouped(GroupedEnsemble),
}

impl Ensemble {
    pub fn from_spec(spec: EnsembleSpec) -> Result<Self> {
        Ok(match spec {
            EnsembleSpec::Bernoulli(p) => Ensemble::Bernoulli(BernoulliEnsemble::new(p)?),
            EnsembleSpec::Multinoulli(r) => Ensemble::Multinoulli(MultinoulliEnsemble::new(r)?),
            EnsembleSpec::Grouped(g) => Ensemble::Grouped(GroupedEnsemble::new(g)?),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: EnsembleSpec =
            serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        Self::from_spec(spec)
    }

    pub fn to_spec(&self) -> EnsembleSpec {
        match self {
            Ensemble::Bernoulli(e) => EnsembleSpec::Bernoulli(e.probs().to_vec()),
            Ensemble::Multinoulli(e) => EnsembleSpec::Multinoulli(e.rows().to_vec()),
            Ensemble::Grouped(e) => EnsembleSpec::Grouped(e.groups().to_vec()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_spec()).expect("finite probabilities serialize")
    }

    pub fn validate(&self) -> Result<Self> {
        Self::from_spec(self.to_spec())
    }

    /// Number of independent units (variables or rows).
    pub fn len(&self) -> usize {
        match self {
            Ensemble::Bernoulli(e) => e.len(),
            Ensemble::Multinoulli(e) => e.len(),
            Ensemble::Grouped(e) => e.total(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl From<BernoulliEnsemble> for Ensemble {
    fn from(e: BernoulliEnsemble) -> Self {
        Ensemble::Bernoulli(e)
    }
}

impl From<MultinoulliEnsemble> for Ensemble {
    fn from(e: MultinoulliEnsemble) -> Self {
        Ensemble::Multinoulli(e)
    }
}

impl From<GroupedEnsemble> for Ensemble {
    fn from(e: GroupedEnsemble) -> Self {
        Ensemble::Grouped(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_pair() {
        let e = BernoulliEnsemble::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(e.smallest(), 0.5);
        assert_eq!(e.len(), 2);
    }

    #[test]
    fn rejects_out_of_range() {
        let err = BernoulliEnsemble::new(vec![1.2]).unwrap_err();
        assert!(err.to_string().contains("probability out of range"));
        assert!(BernoulliEnsemble::new(vec![f64::NAN]).is_err());
        assert!(BernoulliEnsemble::new(vec![-0.0 - 1e-18]).is_err());
        assert!(BernoulliEnsemble::new(vec![]).is_err());
    }

    #[test]
    fn degenerate_entry_kept_in_place() {
        let e = BernoulliEnsemble::new(vec![0.0, 0.3]).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.degenerate_flags(), vec![true, false]);
        assert_eq!(e.summands()[0].atoms(), vec![Atom { value: 0.0, mass: 1.0 }]);
        assert_eq!(e.smallest(), 0.0);
        assert_eq!(e.smallest_nondegenerate(), Some(0.3));
    }

    #[test]
    fn support_points_half() {
        let a = support_points(0.5).unwrap();
        assert!((a[0].value + 0.346_573_590_279_972_65).abs() < 1e-15);
        assert!((a[1].value - 0.346_573_590_279_972_65).abs() < 1e-15);
        assert_eq!((a[0].mass, a[1].mass), (0.5, 0.5));
    }

    #[test]
    fn support_points_fifth() {
        let a = support_points(0.2).unwrap();
        assert!((a[0].value + 1.287_550_329_947_280_2).abs() < 1e-15);
        assert!((a[1].value - 0.321_887_582_486_820_1).abs() < 1e-15);
        assert_eq!(a[0].mass, 0.2);
    }

    #[test]
    fn support_points_degenerate() {
        assert_eq!(support_points(1.0).unwrap(), vec![Atom { value: 0.0, mass: 1.0 }]);
        assert_eq!(support_points(0.0).unwrap(), vec![Atom { value: 0.0, mass: 1.0 }]);
        assert!(support_points(1.5).is_err());
    }

    #[test]
    fn multinoulli_row_sum_enforced() {
        assert!(MultinoulliEnsemble::new(vec![vec![0.5, 0.5]]).is_ok());
        assert!(matches!(
            MultinoulliEnsemble::new(vec![vec![0.5, 0.6]]),
            Err(Error::RowSum { .. })
        ));
        assert!(MultinoulliEnsemble::new(vec![vec![0.5, 0.5 + 5e-13]]).is_ok());
        assert!(MultinoulliEnsemble::new(vec![vec![0.5, 0.5 + 5e-12]]).is_err());
        assert!(matches!(
            MultinoulliEnsemble::new(vec![vec![1.0]]),
            Err(Error::CategoryCount { .. })
        ));
        assert!(MultinoulliEnsemble::new(vec![vec![0.5, 0.5], vec![0.2, 0.3, 0.5]]).is_err());
    }

    #[test]
    fn multinoulli_row_outcomes() {
        let e = MultinoulliEnsemble::new(vec![vec![0.2, 0.8]]).unwrap();
        let out = e.row_outcomes(0);
        assert!((out[0].value + 1.109_035_488_895_912_6).abs() < 1e-14);
        assert!((out[1].value - 0.277_258_872_223_978_1).abs() < 1e-14);
    }

    #[test]
    fn grouped_means_and_errors() {
        let g = GroupedEnsemble::new(vec![vec![0.2, 0.8], vec![1.0]]).unwrap();
        assert_eq!(g.means(), &[0.5, 1.0]);
        assert_eq!(g.total(), 3);
        assert_eq!(g.weights()[1], 0.0);
        assert!(GroupedEnsemble::new(vec![vec![]]).is_err());
        assert!(GroupedEnsemble::new(vec![]).is_err());
    }

    #[test]
    fn json_forms() {
        let e = Ensemble::from_json(r#"{"bernoulli": [0.5, 0.25]}"#).unwrap();
        assert!(matches!(e, Ensemble::Bernoulli(_)));
        let e = Ensemble::from_json(r#"{"multinoulli": [[0.5, 0.5]]}"#).unwrap();
        assert!(matches!(e, Ensemble::Multinoulli(_)));
        let e = Ensemble::from_json(r#"{"grouped": [[0.1], [0.2, 0.3]]}"#).unwrap();
        assert_eq!(e.len(), 3);
        assert!(Ensemble::from_json(r#"{"poisson": [1.0]}"#).is_err());
        assert!(Ensemble::from_json(r#"{"bernoulli": [2.0]}"#).is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let e = Ensemble::from_json(r#"{"bernoulli": [0.1, 3.720075976020836e-44]}"#).unwrap();
        let again = Ensemble::from_json(&e.to_json()).unwrap();
        assert_eq!(e, again);
    }
}
