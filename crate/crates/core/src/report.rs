//! CSV row types for bound tables, MGF scans and exact distributions.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bounds::TailBoundReport;
use crate::error::{Error, Result};
use crate::mgf::MgfEvaluation;
use crate::oracle::ExactDistribution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub method: String,
    pub n: usize,
    pub t: f64,
    pub epsilon: Option<f64>,
    pub bound: f64,
    pub log_bound: f64,
    pub trivial_flag: bool,
    pub aux_json: String,
}

impl From<&TailBoundReport> for BoundRow {
    fn from(r: &TailBoundReport) -> Self {
        let mut aux = serde_json::Map::new();
        for (k, v) in &r.aux {
            aux.insert(k.clone(), serde_json::json!(v));
        }
        if r.degenerate {
            aux.insert("degenerate".into(), serde_json::Value::Bool(true));
        }
        BoundRow {
            method: r.method.to_string(),
            n: r.n,
            t: r.t,
            epsilon: r.epsilon,
            bound: r.bound,
            log_bound: r.log_bound,
            trivial_flag: r.trivial,
            aux_json: serde_json::Value::Object(aux).to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MgfScanRow {
    pub p: f64,
    pub lambda: f64,
    pub g_value: f64,
    pub log_g_value: f64,
    pub envelope: Option<f64>,
    pub log_envelope: Option<f64>,
}

impl From<&MgfEvaluation> for MgfScanRow {
    fn from(e: &MgfEvaluation) -> Self {
        MgfScanRow {
            p: e.p,
            lambda: e.lambda,
            g_value: e.value,
            log_g_value: e.log_value,
            envelope: e.envelope,
            log_envelope: e.log_envelope,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub value: f64,
    pub mass: f64,
}

pub fn distribution_rows(dist: &ExactDistribution) -> Vec<DistributionRow> {
    dist.atoms
        .iter()
        .map(|a| DistributionRow {
            value: a.value,
            mass: a.mass,
        })
        .collect()
}

fn out_err(e: impl std::fmt::Display) -> Error {
    Error::Output(e.to_string())
}

/// Write rows with a header line.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row).map_err(out_err)?;
    }
    w.flush().map_err(out_err)
}

pub fn to_csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(out_err)
}

pub fn read_csv<T: DeserializeOwned, R: Read>(reader: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(out_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{compare, multinoulli_bound};
    use crate::ensembles::BernoulliEnsemble;
    use crate::mgf::mgf;

    #[test]
    fn bound_rows_round_trip() {
        let e = BernoulliEnsemble::new(vec![0.0, 1e-40, 0.5]).unwrap();
        let mut rows: Vec<BoundRow> = compare(&e, &[0.1, 5.0, 80.0])
            .unwrap()
            .iter()
            .map(BoundRow::from)
            .collect();
        rows.push(BoundRow::from(&multinoulli_bound(10, 3, 0.25).unwrap()));
        let text = to_csv_string(&rows).unwrap();
        assert!(text.starts_with("method,n,t,epsilon,bound,log_bound,trivial_flag,aux_json\n"));
        let parsed: Vec<BoundRow> = read_csv(text.as_bytes()).unwrap();
        assert_eq!(parsed, rows);
        assert_eq!(to_csv_string(&parsed).unwrap(), text);
    }

    #[test]
    fn degenerate_rows_survive_csv() {
        let e = BernoulliEnsemble::new(vec![0.0, 1.0]).unwrap();
        let rows: Vec<BoundRow> = compare(&e, &[1.0]).unwrap().iter().map(BoundRow::from).collect();
        let text = to_csv_string(&rows).unwrap();
        let parsed: Vec<BoundRow> = read_csv(text.as_bytes()).unwrap();
        assert_eq!(parsed[1].log_bound, f64::NEG_INFINITY);
        assert_eq!(to_csv_string(&parsed).unwrap(), text);
    }

    #[test]
    fn mgf_rows_have_empty_envelope_outside_domain() {
        let rows = vec![
            MgfScanRow::from(&mgf(0.3, 0.5).unwrap()),
            MgfScanRow::from(&mgf(0.3, -2.0).unwrap()),
        ];
        let text = to_csv_string(&rows).unwrap();
        let last = text.lines().last().unwrap();
        assert!(last.ends_with(",,"), "{last}");
        let parsed: Vec<MgfScanRow> = read_csv(text.as_bytes()).unwrap();
        assert_eq!(parsed, rows);
    }
}
