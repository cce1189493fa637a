//! JSON metric descriptions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bound::{CurvatureBound, CurvatureSign};
use super::density::Density;
use super::rot::RotMetric;
use crate::error::Result;
use crate::minimal::WeierstrassData;

/// `{"kind": "constant", "sign": ..., "kappa": ...}`,
/// `{"kind": "profile", "samples": [[s, h], ...]}` or
/// `{"kind": "weierstrass", "surface": "<name>"}`.
///
/// Profiles and surfaces may carry an optional `"bound"` object; otherwise
/// the bound is inferred from sampled curvature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MetricSpec {
    Constant {
        sign: CurvatureSign,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kappa: Option<f64>,
    },
    Profile {
        samples: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<CurvatureBound>,
    },
    Weierstrass {
        surface: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<CurvatureBound>,
    },
}

impl MetricSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<RotMetric> {
        match self {
            MetricSpec::Constant { sign, kappa } => {
                Ok(RotMetric::constant(CurvatureBound::new(*sign, *kappa)?))
            }
            MetricSpec::Profile { samples, bound } => {
                let m = RotMetric::from_density("profile", Density::sampled(samples)?, None)?;
                Ok(match bound {
                    Some(b) => m.with_bound(*b),
                    None => m,
                })
            }
            MetricSpec::Weierstrass { surface, bound } => {
                let m = WeierstrassData::by_name(surface)?.rot_metric()?;
                Ok(match bound {
                    Some(b) => m.with_bound(*b),
                    None => m,
                })
            }
        }
    }
}

/// Parse and build a metric from JSON text.
pub fn metric_from_json(text: &str) -> Result<RotMetric> {
    MetricSpec::from_json(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_kinds() {
        let m = metric_from_json(r#"{"kind":"constant","sign":"negative","kappa":1.0}"#).unwrap();
        assert_eq!(
            m.model_bound(),
            Some(CurvatureBound::negative(1.0).unwrap())
        );
        let p = metric_from_json(
            r#"{"kind":"profile","samples":[[0,1],[0.25,1],[0.5,1],[0.75,1],[1,1]],"bound":{"sign":"zero"}}"#,
        )
        .unwrap();
        assert!((p.distance(0.6).unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(p.bound(), CurvatureBound::zero());
        let w = metric_from_json(r#"{"kind":"weierstrass","surface":"enneper"}"#).unwrap();
        assert!((w.distance(0.5).unwrap() - (0.5 + 0.125 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(metric_from_json(r#"{"kind":"constant","sign":"positive"}"#).is_err());
        assert!(
            metric_from_json(r#"{"kind":"profile","samples":[[0,1],[0.5,0],[1,1],[2,1]]}"#)
                .is_err()
        );
        assert!(metric_from_json(r#"{"kind":"weierstrass","surface":"catenoid"}"#).is_err());
        assert!(metric_from_json(r#"{"kind":"torus"}"#).is_err());
    }
}
