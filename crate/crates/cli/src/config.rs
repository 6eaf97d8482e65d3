//! JSON system description and its conversion into library objects.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;

use reduced_topos::operator::spectral_projection;
use reduced_topos::{
    BorelSelection, ComplexMatrix, ContextId, ContextPoset, DensityMatrix, Projection, Selector,
    SelectorSpec,
};

/// Matrix rows of `[re, im]` pairs.
pub type PairMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field(field: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub hilbert_dim: usize,
    #[serde(default)]
    pub operators: BTreeMap<String, PairMatrix>,
    #[serde(default)]
    pub contexts: Vec<ContextConfig>,
    #[serde(default)]
    pub selector: SelectorConfig,
    #[serde(default)]
    pub states: Vec<StateConfig>,
    #[serde(default)]
    pub propositions: Vec<PropositionConfig>,
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
    #[serde(default)]
    pub verify: VerifyToggles,
    pub max_enum: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

fn default_levels() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextConfig {
    pub label: String,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SelectorConfig {
    #[default]
    Identity,
    Operators {
        operators: Vec<String>,
    },
    /// Pairs `[from, to]` of context labels; unlisted contexts are fixed.
    Explicit {
        map: Vec<[String; 2]>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub name: String,
    pub vector: Option<Vec<[f64; 2]>>,
    pub density: Option<PairMatrix>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropositionConfig {
    pub name: String,
    pub operator: String,
    /// Eigenvalues to keep.
    pub values: Option<Vec<f64>>,
    /// Closed interval `[lo, hi]` of eigenvalues to keep.
    pub interval: Option<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyToggles {
    pub selector: bool,
    pub topologies: bool,
    pub probability_topology: bool,
    pub product_topology: bool,
    pub sheafification: bool,
    pub measures: bool,
    pub born: bool,
    pub filters: bool,
    pub factorization: bool,
    pub key_diagram: bool,
    pub translation: bool,
}

impl Default for VerifyToggles {
    fn default() -> Self {
        Self {
            selector: true,
            topologies: true,
            probability_topology: true,
            product_topology: true,
            sheafification: true,
            measures: true,
            born: true,
            filters: true,
            factorization: true,
            key_diagram: true,
            translation: true,
        }
    }
}

pub fn parse(text: &str) -> Result<SystemConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn load(path: &str) -> Result<SystemConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.into(),
        source,
    })?;
    parse(&text)
}

pub struct Proposition {
    pub name: String,
    pub operator: ComplexMatrix,
    pub selection: BorelSelection,
    pub projection: Projection,
}

/// A resolved configuration. The selector may violate its axioms; that is
/// recorded in `selector_error` so verification can report it.
pub struct System {
    pub poset: ContextPoset,
    pub flat: Selector,
    pub selector_error: Option<String>,
    pub states: Vec<(String, DensityMatrix)>,
    pub propositions: Vec<Proposition>,
    pub levels: Vec<f64>,
    pub seed: u64,
}

fn matrix(name: &str, m: &PairMatrix, dim: usize) -> Result<ComplexMatrix, ConfigError> {
    let a = ComplexMatrix::from_pairs(m).map_err(|e| field(name, e))?;
    if a.dim() != dim {
        return Err(field(
            name,
            format!("dimension {} but hilbert_dim is {dim}", a.dim()),
        ));
    }
    Ok(a)
}

impl SystemConfig {
    pub fn resolve(&self) -> Result<System, ConfigError> {
        let dim = self.hilbert_dim;
        if dim == 0 {
            return Err(field("hilbert_dim", "must be positive"));
        }
        let mut ops = BTreeMap::new();
        for (name, m) in &self.operators {
            let a = matrix(&format!("operators.{name}"), m, dim)?;
            if !a.is_hermitian() {
                return Err(field(format!("operators.{name}"), "not Hermitian"));
            }
            ops.insert(name.clone(), a);
        }
        let op = |f: &str, name: &str| -> Result<ComplexMatrix, ConfigError> {
            ops.get(name)
                .cloned()
                .ok_or_else(|| field(f, format!("unknown operator `{name}`")))
        };

        let mut gens = Vec::new();
        for (i, c) in self.contexts.iter().enumerate() {
            let f = format!("contexts[{i}].generators");
            let g = c
                .generators
                .iter()
                .map(|n| op(&f, n))
                .collect::<Result<Vec<_>, _>>()?;
            gens.push((c.label.clone(), g));
        }
        let spec = match &self.selector {
            SelectorConfig::Identity => SelectorSpec::Identity,
            SelectorConfig::Operators { operators } => SelectorSpec::Operators(
                operators
                    .iter()
                    .map(|n| op("selector.operators", n))
                    .collect::<Result<_, _>>()?,
            ),
            SelectorConfig::Explicit { map } => {
                SelectorSpec::Explicit(map.iter().map(|[a, b]| (a.clone(), b.clone())).collect())
            }
        };
        let poset = ContextPoset::build(dim, &gens, std::slice::from_ref(&spec))
            .map_err(|e| field("contexts", e))?;
        let (flat, selector_error) = match Selector::from_spec(&spec, &poset) {
            Ok(s) => (s, None),
            Err(e) => {
                // keep the declared map so that verification can show what is wrong
                let flat = match &self.selector {
                    SelectorConfig::Explicit { map } => {
                        let mut m: Vec<ContextId> = poset.ids().collect();
                        for (k, [a, b]) in map.iter().enumerate() {
                            let f = format!("selector.map[{k}]");
                            m[poset.id_of(a).map_err(|e| field(&f, e))?.0] =
                                poset.id_of(b).map_err(|e| field(&f, e))?;
                        }
                        Selector::from_map_unchecked(m)
                    }
                    _ => return Err(field("selector", e)),
                };
                (flat, Some(e.to_string()))
            }
        };

        let mut states = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            let f = format!("states[{i}]");
            let rho = match (&s.vector, &s.density) {
                (Some(v), None) => {
                    if v.len() != dim {
                        return Err(field(
                            f,
                            format!("vector of length {} but hilbert_dim is {dim}", v.len()),
                        ));
                    }
                    let v: Vec<Complex64> = v.iter().map(|p| Complex64::new(p[0], p[1])).collect();
                    DensityMatrix::pure(&v).map_err(|e| field(&f, e))?
                }
                (None, Some(m)) => {
                    DensityMatrix::new(matrix(&f, m, dim)?).map_err(|e| field(&f, e))?
                }
                _ => return Err(field(f, "give exactly one of `vector` or `density`")),
            };
            states.push((s.name.clone(), rho));
        }

        let mut propositions = Vec::new();
        for (i, p) in self.propositions.iter().enumerate() {
            let f = format!("propositions[{i}]");
            let operator = op(&f, &p.operator)?;
            let selection = match (&p.values, &p.interval) {
                (Some(v), None) => BorelSelection::Values(v.clone()),
                (None, Some([lo, hi])) => {
                    BorelSelection::interval(*lo, *hi).map_err(|e| field(&f, e))?
                }
                _ => return Err(field(f, "give exactly one of `values` or `interval`")),
            };
            let projection =
                spectral_projection(&operator, &selection).map_err(|e| field(&f, e))?;
            propositions.push(Proposition {
                name: p.name.clone(),
                operator,
                selection,
                projection,
            });
        }

        if let Some(k) = self.levels.iter().position(|t| !(0.0..=1.0).contains(t)) {
            return Err(field(format!("levels[{k}]"), "outside [0, 1]"));
        }
        let mut levels = self.levels.clone();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        Ok(System {
            poset,
            flat,
            selector_error,
            states,
            propositions,
            levels,
            seed: self.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUBIT: &str = r#"{
        "hilbert_dim": 2,
        "operators": {
            "sz": [[[1,0],[0,0]],[[0,0],[-1,0]]],
            "sx": [[[0,0],[1,0]],[[1,0],[0,0]]]
        },
        "contexts": [{"label": "Vz", "generators": ["sz"]}, {"label": "Vx", "generators": ["sx"]}],
        "selector": {"kind": "operators", "operators": ["sz"]},
        "states": [{"name": "up", "vector": [[1,0],[0,0]]}],
        "propositions": [{"name": "Pz", "operator": "sz", "values": [1]}]
    }"#;

    #[test]
    fn resolves_qubit() {
        let s = parse(QUBIT).unwrap().resolve().unwrap();
        assert_eq!(s.poset.len(), 3);
        assert!(s.selector_error.is_none());
        assert_eq!(s.propositions[0].projection.rank(), 1);
    }

    #[test]
    fn empty_generators_give_one_context() {
        let s = parse(r#"{"hilbert_dim": 2}"#).unwrap().resolve().unwrap();
        assert_eq!(s.poset.len(), 1);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = QUBIT.replace(r#""vector": [[1,0],[0,0]]"#, r#""vector": [[1,0]]"#);
        let e = parse(&bad).unwrap().resolve().err().unwrap();
        assert!(e.to_string().contains("states[0]"), "{e}");
        let e = parse("{\n \"hilbert_dim\": }").err().unwrap();
        assert!(matches!(e, ConfigError::Parse { line: 2, .. }), "{e}");
        let bad = QUBIT.replace(r#""generators": ["sx"]"#, r#""generators": ["sy"]"#);
        assert!(parse(&bad).unwrap().resolve().is_err());
    }
}
