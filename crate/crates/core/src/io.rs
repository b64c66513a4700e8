//! JSON file formats used by the command-line tool.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::operator::{OperatorKind, Permutation, StructuredOperator};
use crate::pencil::LaurentExpansion;
use crate::solvers::Problem;

/// `{"kind": ..., "perm": [1-based images]}` or `{"kind": ..., "perm_index": k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perm: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perm_index: Option<u128>,
}

impl OperatorSpec {
    pub fn plain(kind: OperatorKind) -> Self {
        OperatorSpec { kind, perm: None, perm_index: None }
    }

    /// Builds the operator for m×m matrices.
    pub fn build(&self, m: usize) -> Result<StructuredOperator> {
        let perm = match (&self.perm, self.perm_index) {
            (Some(_), Some(_)) => return Err(Error::InvalidInput("give either perm or perm_index, not both".into())),
            (Some(p), None) => Some(Permutation::from_one_based(p)?),
            (None, Some(k)) => Some(Permutation::from_lex_index(k, m)?),
            (None, None) => None,
        };
        if !self.kind.needs_perm() && perm.is_some() {
            return Err(Error::InvalidInput(format!("operator {} takes no permutation", self.kind)));
        }
        let f = StructuredOperator::new(self.kind, perm)?;
        f.check_size(m)?;
        Ok(f)
    }
}

impl From<&StructuredOperator> for OperatorSpec {
    fn from(f: &StructuredOperator) -> Self {
        OperatorSpec { kind: f.kind(), perm: f.perm().map(|p| p.one_based()), perm_index: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "A")]
    pub a: Matrix,
    #[serde(rename = "B")]
    pub b: Matrix,
    #[serde(rename = "C")]
    pub c: Matrix,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Matrix>,
    #[serde(rename = "E", default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Matrix>,
    pub operator: OperatorSpec,
    /// Seed of the generator that produced the instance, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ProblemFile {
    pub fn to_problem(&self) -> Result<Problem> {
        let f = self.operator.build(self.a.rows())?;
        let (a, b, c) = (self.a.clone(), self.b.clone(), self.c.clone());
        if self.d.is_some() || self.e.is_some() {
            Problem::generalized(a, b, c, self.d.clone(), self.e.clone(), f)
        } else {
            Problem::new(a, b, c, f)
        }
    }
}

impl From<&Problem> for ProblemFile {
    fn from(p: &Problem) -> Self {
        ProblemFile {
            a: p.a.clone(),
            b: p.b.clone(),
            c: p.c.clone(),
            d: p.d.clone(),
            e: p.e.clone(),
            operator: OperatorSpec::from(&p.f),
            seed: None,
        }
    }
}

/// Input of `laurent`: the pencil `D − λE` and the highest coefficient index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaurentFile {
    #[serde(rename = "D")]
    pub d: Matrix,
    #[serde(rename = "E")]
    pub e: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
}

/// Output of `laurent`: `U` lists `U_kmin, ..., U_kmax` with `kmin = −mu`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaurentDump {
    pub mu: usize,
    pub kmin: i64,
    pub kmax: i64,
    #[serde(rename = "U")]
    pub u: Vec<Matrix>,
    pub radius: f64,
    pub residual: f64,
    pub nodes: usize,
}

impl From<&LaurentExpansion> for LaurentDump {
    fn from(l: &LaurentExpansion) -> Self {
        let coeffs: Vec<(i64, &Matrix)> = l.iter().collect();
        LaurentDump {
            mu: l.mu,
            kmin: coeffs.first().map_or(0, |c| c.0),
            kmax: l.kmax(),
            u: coeffs.into_iter().map(|(_, u)| u.clone()).collect(),
            radius: l.radius,
            residual: l.residual,
            nodes: l.nodes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QepFile {
    #[serde(rename = "A2")]
    pub a2: Matrix,
    #[serde(rename = "A1")]
    pub a1: Matrix,
    pub operator: OperatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maxit: Option<usize>,
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;

    #[test]
    fn operator_spec_variants() {
        let f = from_json::<OperatorSpec>(r#"{"kind":"perm_similarity","perm":[2,1,3,4]}"#).unwrap().build(4).unwrap();
        assert_eq!(f.perm().unwrap().images(), &[1, 0, 2, 3]);
        let g = from_json::<OperatorSpec>(r#"{"kind":"perm_reversing","perm_index":7}"#).unwrap().build(4).unwrap();
        assert_eq!(g.perm().unwrap().one_based(), vec![2, 1, 3, 4]);
        assert!(from_json::<OperatorSpec>(r#"{"kind":"perm_similarity"}"#).unwrap().build(3).is_err());
        assert!(from_json::<OperatorSpec>(r#"{"kind":"transpose","perm":[1]}"#).unwrap().build(1).is_err());
        assert!(from_json::<OperatorSpec>(r#"{"kind":"perm_similarity","perm":[2,1]}"#).unwrap().build(3).is_err());
        assert!(from_json::<OperatorSpec>(r#"{"kind":"rotate"}"#).is_err());
    }

    #[test]
    fn problem_file_round_trip() {
        let text = r#"{"A":{"rows":1,"cols":1,"re":[[2]]},"B":{"rows":1,"cols":1,"re":[[3]]},
            "C":{"rows":1,"cols":1,"re":[[5]],"im":[[0.1]]},"operator":{"kind":"transpose"}}"#;
        let file: ProblemFile = from_json(text).unwrap();
        let p = file.to_problem().unwrap();
        assert_eq!(p.c[(0, 0)], c64(5.0, 0.1));
        let again: ProblemFile = from_json(&to_json(&ProblemFile::from(&p))).unwrap();
        assert_eq!(again, file);
    }

    #[test]
    fn problem_file_rejects_bad_input() {
        assert!(from_json::<ProblemFile>("{").is_err());
        let mismatch = r#"{"A":{"rows":1,"cols":1,"re":[[2]]},"B":{"rows":2,"cols":2,"re":[[1,0],[0,1]]},
            "C":{"rows":1,"cols":1,"re":[[5]]},"operator":{"kind":"identity"}}"#;
        assert!(from_json::<ProblemFile>(mismatch).unwrap().to_problem().is_err());
    }
}
