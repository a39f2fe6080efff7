//! Pair files and the builtin catalog.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{int, serde_rational, Rational};
use crate::pairmodel::{DivisorSpec, PolarisedPair};
use crate::thresholds::PositivityData;
use crate::weightoracle::HilbertModel;

/// A pair together with everything the criteria may consume.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub name: String,
    pub dimension: u32,
    #[serde(rename = "L_top", with = "serde_rational")]
    pub l_top: Rational,
    #[serde(rename = "cX_L", with = "serde_rational")]
    pub cx_l: Rational,
    #[serde(with = "serde_rational::option", default, skip_serializing_if = "Option::is_none")]
    pub proportional_x: Option<Rational>,
    pub divisor: DivisorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positivity: Option<PositivityData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hilbert: Option<HilbertModel>,
}

/// Validated view of a [`PairFile`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedPair {
    pub pair: PolarisedPair,
    pub divisor: DivisorSpec,
    pub positivity: PositivityData,
    pub hilbert: Option<HilbertModel>,
}

impl PairFile {
    pub fn load(self) -> Result<LoadedPair> {
        let pair = PolarisedPair::new(self.name, self.dimension, self.l_top, self.cx_l, self.proportional_x)?;
        if self.divisor.m == 0 {
            return Err(Error::InvalidPair("divisor multiplicity m must be >= 1".into()));
        }
        if !self.divisor.smooth {
            return Err(Error::InvalidPair("only smooth divisors are supported".into()));
        }
        let positivity = self.positivity.unwrap_or_default();
        positivity.validate(&pair)?;
        Ok(LoadedPair { pair, divisor: self.divisor, positivity, hilbert: self.hilbert })
    }
}

impl LoadedPair {
    pub fn to_file(&self) -> PairFile {
        PairFile {
            name: self.pair.name.clone(),
            dimension: self.pair.dimension,
            l_top: self.pair.l_top.clone(),
            cx_l: self.pair.cx_l.clone(),
            proportional_x: self.pair.proportional_x.clone(),
            divisor: self.divisor.clone(),
            positivity: Some(self.positivity.clone()),
            hilbert: self.hilbert.clone(),
        }
    }
}

pub fn parse_pair_json(text: &str) -> Result<LoadedPair> {
    let file: PairFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.load()
}

pub const CATALOG_PREFIX: &str = "catalog:";

pub const CATALOG_NAMES: [&str; 5] = ["P2-line", "P3-hyperplane", "P4-hyperplane", "P1xP1-diag", "Fano-template"];

/// `(P^n, O(1))` with a hyperplane.
fn projective(name: &str, n: u32) -> LoadedPair {
    let x = int(n as i64 + 1);
    let pair = PolarisedPair::new(name, n, int(1), x.clone(), Some(x.clone())).expect("builtin");
    LoadedPair {
        pair,
        divisor: DivisorSpec::hyperplane(),
        positivity: PositivityData { lambda: Some(x.clone()), lambda_up: Some(x), ..Default::default() },
        hilbert: Some(HilbertModel::ProjectiveSpace { n }),
    }
}

/// Builtin pairs. Alpha invariants are never shipped; callers supply them.
pub fn catalog(name: &str) -> Option<LoadedPair> {
    Some(match name {
        "P2-line" => projective(name, 2),
        "P3-hyperplane" => projective(name, 3),
        "P4-hyperplane" => projective(name, 4),
        "P1xP1-diag" => LoadedPair {
            pair: PolarisedPair::new(name, 2, int(2), int(4), Some(int(2))).expect("builtin"),
            divisor: DivisorSpec::hyperplane(),
            positivity: PositivityData { lambda: Some(int(2)), lambda_up: Some(int(2)), ..Default::default() },
            hilbert: Some(HilbertModel::ProductP1P1 {}),
        },
        // c_1(X) = c_1(L) on a del Pezzo-like surface of degree 1.
        "Fano-template" => LoadedPair {
            pair: PolarisedPair::new(name, 2, int(1), int(1), Some(int(1))).expect("builtin"),
            divisor: DivisorSpec::hyperplane(),
            positivity: PositivityData { lambda: Some(int(1)), lambda_up: Some(int(1)), ..Default::default() },
            hilbert: None,
        },
        _ => return None,
    })
}

pub fn catalog_all() -> Vec<LoadedPair> {
    CATALOG_NAMES.iter().map(|n| catalog(n).expect("listed")).collect()
}

/// Resolves `catalog:NAME` or reads a JSON pair file.
pub fn resolve(spec: &str) -> Result<LoadedPair> {
    if let Some(name) = spec.strip_prefix(CATALOG_PREFIX) {
        return catalog(name).ok_or_else(|| {
            Error::Parse(format!("unknown catalog entry {name:?}; known: {}", CATALOG_NAMES.join(", ")))
        });
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Error::Parse(format!("{spec}: {e}")))?;
    parse_pair_json(&text)
}
