use serde::{Deserialize, Serialize};

use super::{build_regular_tree, build_star, GraphGrid, MetricGraph};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Serializable description of a domain.
///
/// ```toml
/// type = "regular_tree"
/// lengths = [1.0]
/// degrees = [2, 2]
/// L = 30.0
/// h = 0.02
/// ```
///
/// `line_sigma` describes the line with coefficient `σ = a_i^{-2}` on
/// `(−∞, 0), (0, s), …, ((N−2)s, ∞)` where `s` is `spacing`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    Star {
        #[serde(rename = "N")]
        n: usize,
        #[serde(rename = "L")]
        truncation: f64,
        h: f64,
    },
    RegularTree {
        lengths: Vec<f64>,
        degrees: Vec<usize>,
        #[serde(rename = "L")]
        truncation: f64,
        h: f64,
    },
    LineSigma {
        a: Vec<f64>,
        spacing: f64,
        #[serde(rename = "L")]
        truncation: f64,
        h: f64,
    },
}

impl GraphSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("graph spec serializes")
    }

    pub fn truncation(&self) -> f64 {
        match self {
            GraphSpec::Star { truncation, .. }
            | GraphSpec::RegularTree { truncation, .. }
            | GraphSpec::LineSigma { truncation, .. } => *truncation,
        }
    }

    pub fn spacing(&self) -> f64 {
        match self {
            GraphSpec::Star { h, .. }
            | GraphSpec::RegularTree { h, .. }
            | GraphSpec::LineSigma { h, .. } => *h,
        }
    }

    /// Builds the metric graph; `None` for `line_sigma`, which is not a graph.
    pub fn build_graph<T: Real>(&self) -> Result<Option<(MetricGraph<T>, GraphGrid<T>)>> {
        match self {
            GraphSpec::Star { n, truncation, h } => {
                build_star(*n, T::lit(*truncation), T::lit(*h)).map(Some)
            }
            GraphSpec::RegularTree {
                lengths,
                degrees,
                truncation,
                h,
            } => {
                let lengths: Vec<T> = lengths.iter().map(|&l| T::lit(l)).collect();
                build_regular_tree(&lengths, degrees, T::lit(*truncation), T::lit(*h)).map(Some)
            }
            GraphSpec::LineSigma { .. } => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_documented_keys() {
        let s = GraphSpec::from_toml("type = \"star\"\nN = 3\nL = 40.0\nh = 0.05\n").unwrap();
        assert_eq!(
            s,
            GraphSpec::Star {
                n: 3,
                truncation: 40.0,
                h: 0.05
            }
        );
        let (g, _) = s.build_graph::<f64>().unwrap().unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(GraphSpec::from_toml("type = \"star\"\nN = 3\nL = 40.0\nh = 0.05\nq = 1\n").is_err());
        assert!(GraphSpec::from_toml("type = \"ring\"\nN = 3\nL = 40.0\nh = 0.05\n").is_err());
    }

    fn any_spec() -> impl Strategy<Value = GraphSpec> {
        prop_oneof![
            (2usize..8, 1.0f64..100.0, 0.001f64..1.0)
                .prop_map(|(n, truncation, h)| GraphSpec::Star { n, truncation, h }),
            (
                proptest::collection::vec(0.1f64..5.0, 0..3),
                1.0f64..100.0,
                0.001f64..1.0
            )
                .prop_map(|(lengths, truncation, h)| GraphSpec::RegularTree {
                    degrees: vec![2; lengths.len() + 1],
                    lengths,
                    truncation,
                    h
                }),
            (
                proptest::collection::vec(0.1f64..5.0, 1..5),
                0.1f64..3.0,
                1.0f64..100.0,
                0.001f64..1.0
            )
                .prop_map(|(a, spacing, truncation, h)| GraphSpec::LineSigma {
                    a,
                    spacing,
                    truncation,
                    h
                }),
        ]
    }

    proptest! {
        #[test]
        fn serialization_is_idempotent(spec in any_spec()) {
            let once = spec.to_toml();
            let parsed = GraphSpec::from_toml(&once).unwrap();
            prop_assert_eq!(&parsed, &spec);
            prop_assert_eq!(parsed.to_toml(), once);
        }
    }
}
