//! JSON file formats. Variable and site indices are 1-based in files and
//! 0-based everywhere else.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ObservableSpec, ObservableTerm};
use crate::models::{DuffingEdge, DuffingSpec, HarmonicSpec, KuramotoSpec, RandomSystemSpec};
use crate::ode::{InteractionDraft, OdeSystem, SystemDraft};

fn zero_based(i: usize, what: &str) -> Result<usize> {
    i.checked_sub(1)
        .ok_or_else(|| Error::Parse(format!("{what} index 0: indices are 1-based")))
}

fn parse_key(key: &str, what: &str) -> Result<usize> {
    let i: usize = key
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what} key {key:?} is not a positive integer")))?;
    zero_based(i, what)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionFile {
    pub vars: Vec<usize>,
    /// Couplings keyed by 1-based variable; missing members couple with 0.
    #[serde(default)]
    pub alpha: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub interactions: Vec<InteractionFile>,
    /// Optional initial point, one value per variable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// The unvalidated candidate; pass it to `validate_system` or
    /// `OdeSystem::from_draft`.
    pub fn to_draft(&self) -> Result<SystemDraft> {
        let mut interactions = Vec::with_capacity(self.interactions.len());
        for p in &self.interactions {
            let members = p
                .vars
                .iter()
                .map(|&v| zero_based(v, "variable"))
                .collect::<Result<Vec<_>>>()?;
            let alpha = p
                .alpha
                .iter()
                .map(|(k, &a)| Ok((parse_key(k, "alpha")?, a)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            interactions.push(InteractionDraft { members, alpha });
        }
        Ok(SystemDraft {
            n_vars: self.n,
            interactions,
        })
    }

    pub fn from_system(sys: &OdeSystem, x0: Option<&[f64]>, names: Option<&[String]>) -> Self {
        let interactions = sys
            .interactions()
            .iter()
            .map(|p| InteractionFile {
                vars: p.members().iter().map(|v| v + 1).collect(),
                alpha: p
                    .members()
                    .iter()
                    .zip(p.couplings())
                    .map(|(v, &a)| ((v + 1).to_string(), a))
                    .collect(),
            })
            .collect();
        SystemFile {
            n: sys.n_vars(),
            interactions,
            x0: x0.map(<[f64]>::to_vec),
            names: names.map(<[String]>::to_vec),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableTermFile {
    #[serde(default)]
    pub occ: BTreeMap<String, usize>,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableFile {
    pub b: usize,
    pub terms: Vec<ObservableTermFile>,
}

impl ObservableFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_spec(&self) -> Result<ObservableSpec> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let occupation = t
                    .occ
                    .iter()
                    .map(|(k, &n)| Ok((parse_key(k, "occ")?, n)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                Ok(ObservableTerm {
                    occupation,
                    coeff: t.coeff,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ObservableSpec::new(self.b, terms)
    }

    pub fn from_spec(obs: &ObservableSpec) -> Self {
        ObservableFile {
            b: obs.degree_cap(),
            terms: obs
                .terms()
                .iter()
                .map(|t| ObservableTermFile {
                    occ: t
                        .occupation
                        .iter()
                        .map(|(v, &n)| ((v + 1).to_string(), n))
                        .collect(),
                    coeff: t.coeff,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicFile {
    pub masses: Vec<f64>,
    pub springs: Vec<Vec<f64>>,
    /// Initial positions and velocities.
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub v0: Option<Vec<f64>>,
}

impl HarmonicFile {
    pub fn to_spec(&self) -> HarmonicSpec {
        HarmonicSpec {
            masses: self.masses.clone(),
            springs: self.springs.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DuffingEdgeFile {
    pub j: usize,
    pub k: usize,
    pub kappa: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DuffingFile {
    pub masses: Vec<f64>,
    pub kappa: Vec<f64>,
    pub lambda: Vec<f64>,
    #[serde(default)]
    pub edges: Vec<DuffingEdgeFile>,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub v0: Option<Vec<f64>>,
}

impl DuffingFile {
    pub fn to_spec(&self) -> Result<DuffingSpec> {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Ok(DuffingEdge {
                    j: zero_based(e.j, "site")?,
                    k: zero_based(e.k, "site")?,
                    kappa: e.kappa,
                    lambda: e.lambda,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DuffingSpec {
            masses: self.masses.clone(),
            kappa: self.kappa.clone(),
            lambda: self.lambda.clone(),
            edges,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KuramotoFile {
    pub omega: Vec<f64>,
    #[serde(rename = "K")]
    pub coupling: f64,
    /// 1-based neighbor sets; omitted means all-to-all.
    #[serde(default)]
    pub neighbors: Option<Vec<Vec<usize>>>,
    pub theta0: Vec<f64>,
}

impl KuramotoFile {
    pub fn to_spec(&self) -> Result<KuramotoSpec> {
        match &self.neighbors {
            None => Ok(KuramotoSpec::all_to_all(
                self.omega.clone(),
                self.coupling,
                self.theta0.clone(),
            )),
            Some(sets) => Ok(KuramotoSpec {
                omega: self.omega.clone(),
                coupling: self.coupling,
                neighbors: sets
                    .iter()
                    .map(|s| s.iter().map(|&j| zero_based(j, "neighbor")).collect())
                    .collect::<Result<Vec<_>>>()?,
                theta0: self.theta0.clone(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub interactions: usize,
    pub max_size: usize,
    #[serde(default = "unit_scale")]
    pub coupling_scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl RandomFile {
    pub fn to_spec(&self) -> RandomSystemSpec {
        RandomSystemSpec {
            n_vars: self.n,
            interactions: self.interactions,
            max_size: self.max_size,
            coupling_scale: self.coupling_scale,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::validate_system;

    #[test]
    fn system_round_trip() {
        let text = r#"{"N": 3, "interactions": [
            {"vars": [1, 2, 3], "alpha": {"1": 1.0, "2": -1.0}},
            {"vars": [2, 3], "alpha": {"2": 0.5, "3": -0.5}}]}"#;
        let file = SystemFile::parse(text).unwrap();
        let draft = file.to_draft().unwrap();
        assert_eq!(draft.interactions[0].members, vec![0, 1, 2]);
        let sys = OdeSystem::from_draft(&draft).unwrap();
        assert_eq!(sys.interactions()[0].coupling_of(2), Some(0.0));
        let back = SystemFile::from_system(&sys, Some(&[0.1, 0.2, 0.3]), None);
        let again = SystemFile::parse(&back.to_json().unwrap()).unwrap();
        assert_eq!(
            OdeSystem::from_draft(&again.to_draft().unwrap()).unwrap(),
            sys
        );
        assert_eq!(again.x0, Some(vec![0.1, 0.2, 0.3]));
    }

    #[test]
    fn zero_index_and_bad_keys_are_parse_errors() {
        let zero = r#"{"N": 2, "interactions": [{"vars": [0, 1], "alpha": {}}]}"#;
        assert!(matches!(
            SystemFile::parse(zero).unwrap().to_draft(),
            Err(Error::Parse(_))
        ));
        let key = r#"{"N": 2, "interactions": [{"vars": [1, 2], "alpha": {"x": 1}}]}"#;
        assert!(SystemFile::parse(key).unwrap().to_draft().is_err());
        assert!(SystemFile::parse(r#"{"N": 2}"#).is_err());
        let stray = r#"{"N": 2, "interactions": [{"vars": [1, 2], "alpha": {"3": 1}}]}"#;
        let report = validate_system(&SystemFile::parse(stray).unwrap().to_draft().unwrap());
        assert!(report.has_rule("coupling-key"));
    }

    #[test]
    fn observable_round_trip() {
        let text = r#"{"b": 2, "terms": [{"occ": {"1": 1}, "coeff": 1.0}, {"occ": {"1": 1, "2": 1}, "coeff": -0.5}]}"#;
        let obs = ObservableFile::parse(text).unwrap().to_spec().unwrap();
        assert_eq!(obs.terms()[1].occupation.get(&1), Some(&1));
        let back = ObservableFile::from_spec(&obs).to_spec().unwrap();
        assert_eq!(back, obs);
        let too_big = r#"{"b": 1, "terms": [{"occ": {"1": 2}, "coeff": 1.0}]}"#;
        assert!(ObservableFile::parse(too_big).unwrap().to_spec().is_err());
    }

    #[test]
    fn kuramoto_defaults_to_all_to_all() {
        let text = r#"{"omega": [1.0, 1.3], "K": 0.5, "theta0": [0, 0]}"#;
        let file: KuramotoFile = serde_json::from_str(text).unwrap();
        let spec = file.to_spec().unwrap();
        assert_eq!(spec.neighbors, vec![vec![1], vec![0]]);
    }
}
