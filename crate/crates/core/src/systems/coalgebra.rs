use std::sync::Arc;

use serde_json::{Map, Value};

use super::element::{element_from_json, element_to_json, Diagnostic, FunctorElement, Severity};
use super::functor::FunctorSpec;
use crate::error::{Error, Result};
use crate::fuzzy::Carrier;

/// A finite `T`-coalgebra `(A, α: A → TA)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coalgebra {
    functor: Arc<FunctorSpec>,
    carrier: Arc<Carrier>,
    alpha: Vec<FunctorElement>,
}

/// Result of reading a system file: the system when it is usable, plus every
/// warning and error found along the way.
#[derive(Debug)]
pub struct Ingest {
    pub system: Option<Coalgebra>,
    pub diagnostics: Vec<Diagnostic>,
}

/// `A ⊎ B` together with the two injections as position tables.
#[derive(Clone, Debug)]
pub struct DisjointUnion {
    pub system: Coalgebra,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Coalgebra {
    /// Builds a coalgebra, failing on the first validation error.
    pub fn new(
        functor: Arc<FunctorSpec>,
        carrier: Arc<Carrier>,
        alpha: Vec<FunctorElement>,
    ) -> Result<Self> {
        let system = Coalgebra {
            functor,
            carrier,
            alpha,
        };
        match system
            .validate()
            .into_iter()
            .find(|d| d.severity == Severity::Error)
        {
            Some(d) => Err(Error::Type {
                path: d.path,
                message: d.message,
            }),
            None => Ok(system),
        }
    }

    pub fn functor(&self) -> &Arc<FunctorSpec> {
        &self.functor
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn alpha(&self) -> &[FunctorElement] {
        &self.alpha
    }

    pub fn step(&self, state: usize) -> &FunctorElement {
        &self.alpha[state]
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    /// Structural and typing checks, each reported against `$.alpha.<state>`.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.alpha.len() != self.carrier.len() {
            out.push(Diagnostic::error(
                "$.alpha",
                format!(
                    "transition map covers {} states, carrier has {}",
                    self.alpha.len(),
                    self.carrier.len()
                ),
            ));
            return out;
        }
        for (i, t) in self.alpha.iter().enumerate() {
            if let Err(e) = t.type_check(&self.functor, self.carrier.len()) {
                let path = format!("$.alpha.{}", self.carrier.name(i));
                let message = match e {
                    Error::Type {
                        path: inner,
                        message,
                    } => {
                        format!("{message} (at element path {inner})")
                    }
                    other => other.to_string(),
                };
                out.push(Diagnostic::error(path, message));
            }
        }
        out
    }

    /// Reads the system JSON format
    /// `{"functor": .., "states": [..], "alpha": {id: element}}`.
    pub fn ingest(value: &Value) -> Ingest {
        let mut diags = Vec::new();
        let system = Self::ingest_inner(value, &mut diags);
        let system = if diags.iter().any(|d| d.severity == Severity::Error) {
            None
        } else {
            system
        };
        Ingest {
            system,
            diagnostics: diags,
        }
    }

    fn ingest_inner(value: &Value, diags: &mut Vec<Diagnostic>) -> Option<Coalgebra> {
        let Some(obj) = value.as_object() else {
            diags.push(Diagnostic::error("$", "system must be a JSON object"));
            return None;
        };
        let functor = match obj.get("functor") {
            Some(f) => match FunctorSpec::from_json(f) {
                Ok(spec) => spec,
                Err(Error::Json { path, message }) => {
                    diags.push(Diagnostic::error(
                        path.replacen('$', "$.functor", 1),
                        message,
                    ));
                    return None;
                }
                Err(e) => {
                    diags.push(Diagnostic::error("$.functor", e.to_string()));
                    return None;
                }
            },
            None => {
                diags.push(Diagnostic::error("$", "missing `functor`"));
                return None;
            }
        };
        let states: Vec<String> = match obj.get("states").and_then(Value::as_array) {
            Some(ids) => {
                let mut out = Vec::with_capacity(ids.len());
                for (i, id) in ids.iter().enumerate() {
                    match id.as_str() {
                        Some(s) => out.push(s.to_string()),
                        None => diags.push(Diagnostic::error(
                            format!("$.states[{i}]"),
                            "state identifiers must be strings",
                        )),
                    }
                }
                out
            }
            None => {
                diags.push(Diagnostic::error("$", "missing `states` array"));
                return None;
            }
        };
        let carrier = match Carrier::new(states) {
            Ok(c) => Arc::new(c),
            Err(e) => {
                diags.push(Diagnostic::error("$.states", e.to_string()));
                return None;
            }
        };
        let Some(alpha_obj) = obj.get("alpha").and_then(Value::as_object) else {
            diags.push(Diagnostic::error("$", "missing `alpha` object"));
            return None;
        };
        for key in alpha_obj.keys() {
            if carrier.position(key).is_none() {
                diags.push(Diagnostic::error(
                    format!("$.alpha.{key}"),
                    format!("`{key}` is not a declared state"),
                ));
            }
        }
        let leaf = |v: &Value| -> std::result::Result<usize, String> {
            let id = v
                .as_str()
                .ok_or_else(|| format!("expected a state id, found {v}"))?;
            carrier
                .position(id)
                .ok_or_else(|| format!("unknown state `{id}`"))
        };
        let mut alpha = Vec::with_capacity(carrier.len());
        let mut complete = true;
        for id in carrier.elements() {
            let path = format!("$.alpha.{id}");
            match alpha_obj.get(id) {
                Some(v) => match element_from_json(&functor, v, &leaf, &path, diags) {
                    Some(t) => alpha.push(t),
                    None => complete = false,
                },
                None => {
                    diags.push(Diagnostic::error(
                        path,
                        "no transition given for this state",
                    ));
                    complete = false;
                }
            }
        }
        if !complete {
            return None;
        }
        Some(Coalgebra {
            functor: Arc::new(functor),
            carrier,
            alpha,
        })
    }

    /// Parses and validates a system file, failing on the first error.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::json("$", e.to_string()))?;
        let ingest = Self::ingest(&value);
        match ingest.system {
            Some(system) => Ok(system),
            None => {
                let d = ingest
                    .diagnostics
                    .into_iter()
                    .find(|d| d.severity == Severity::Error)
                    .expect("rejected systems carry an error");
                Err(Error::Json {
                    path: d.path,
                    message: d.message,
                })
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let leaf = |x: usize| Value::String(self.carrier.name(x).to_string());
        let mut alpha = Map::new();
        for (i, t) in self.alpha.iter().enumerate() {
            alpha.insert(
                self.carrier.name(i).to_string(),
                element_to_json(&self.functor, t, &leaf),
            );
        }
        serde_json::json!({
            "functor": self.functor.to_json(),
            "states": self.carrier.elements(),
            "alpha": alpha,
        })
    }

    /// The coproduct `A ⊎ B`. Identifiers are kept when the two carriers are
    /// disjoint; otherwise every state is renamed `1:id` or `2:id`.
    pub fn disjoint_union(&self, other: &Coalgebra) -> Result<DisjointUnion> {
        if self.functor != other.functor {
            return Err(Error::structural(format!(
                "cannot unite systems over different functors {} and {}",
                self.functor, other.functor
            )));
        }
        let (m, n) = (self.len(), other.len());
        let clash = other
            .carrier
            .elements()
            .iter()
            .any(|id| self.carrier.position(id).is_some());
        let ids: Vec<String> = if clash {
            self.carrier
                .elements()
                .iter()
                .map(|id| format!("1:{id}"))
                .chain(other.carrier.elements().iter().map(|id| format!("2:{id}")))
                .collect()
        } else {
            self.carrier
                .elements()
                .iter()
                .chain(other.carrier.elements())
                .cloned()
                .collect()
        };
        let carrier = Arc::new(Carrier::new(ids)?);
        let left: Vec<usize> = (0..m).collect();
        let right: Vec<usize> = (m..m + n).collect();
        let alpha = self
            .alpha
            .iter()
            .map(|t| t.map_leaves(&|x| left[x]))
            .chain(other.alpha.iter().map(|t| t.map_leaves(&|x| right[x])))
            .collect();
        Ok(DisjointUnion {
            system: Coalgebra {
                functor: self.functor.clone(),
                carrier,
                alpha,
            },
            left,
            right,
        })
    }
}
