//! JSON input files. Complex numbers are `[re, im]`, matrices row-major
//! nested arrays, vectors arrays of complex numbers.

use std::path::Path;

use regulator_core::linalg::{CMatrix, CVector};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Parses a JSON file, reporting the path of the first offending value.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_json(&text, path)
}

pub fn parse_json<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Schema {
        file: path.to_path_buf(),
        at: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Base metric of a group tuple.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Named(NamedMetric),
    RankOne { rank1: CVector },
    Matrix(CMatrix),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedMetric {
    Identity,
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec::Named(NamedMetric::Identity)
    }
}

/// `{r, N, h, g}` for `transgress`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleFile {
    pub r: Option<usize>,
    #[serde(rename = "N")]
    pub rank: Option<usize>,
    #[serde(default)]
    pub h: MetricSpec,
    pub g: Vec<CMatrix>,
    pub epsilon: Option<f64>,
}

/// `{r, v}` for `grassmann` and `dilog-presentation`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorsFile {
    pub r: Option<usize>,
    pub v: Vec<CVector>,
}

pub fn check_weight(expected: usize, found: Option<usize>, what: &str) -> Result<()> {
    match found {
        Some(r) if r != expected => Err(CliError::Input(format!(
            "{what} declares r = {r} but --r {expected} was given"
        ))),
        _ => Ok(()),
    }
}
