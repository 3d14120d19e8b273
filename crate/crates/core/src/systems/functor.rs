use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fuzzy::{Carrier, FuzzyRel, Scalar};

/// A finite label set with a hemimetric on it, the carrier of a `Const` functor.
#[derive(Clone, PartialEq, Eq)]
pub struct LabelSpace {
    labels: Arc<Carrier>,
    metric: FuzzyRel,
}

impl LabelSpace {
    pub fn new(labels: Arc<Carrier>, metric: FuzzyRel) -> Result<Self> {
        if metric.source().as_ref() != labels.as_ref()
            || metric.target().as_ref() != labels.as_ref()
        {
            return Err(Error::structural(
                "label metric must be indexed by the labels",
            ));
        }
        if !metric.is_hemimetric()? {
            return Err(Error::structural(
                "label metric is not a hemimetric (reflexivity or triangle inequality fails)",
            ));
        }
        Ok(LabelSpace { labels, metric })
    }

    /// Labels that are themselves numbers in `[0,1]`, with `d(p, q) = |p - q|`.
    pub fn numeric<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let carrier = Arc::new(Carrier::new(labels)?);
        let values = carrier
            .elements()
            .iter()
            .map(|l| Scalar::parse(l))
            .collect::<Result<Vec<_>>>()?;
        let metric = FuzzyRel::from_fn(carrier.clone(), carrier.clone(), |a, b| {
            values[a].abs_diff(&values[b])
        });
        Self::new(carrier, metric)
    }

    pub fn labels(&self) -> &Arc<Carrier> {
        &self.labels
    }

    pub fn metric(&self) -> &FuzzyRel {
        &self.metric
    }

    pub fn distance(&self, a: usize, b: usize) -> &Scalar {
        self.metric.get(a, b)
    }
}

impl fmt::Debug for LabelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabelSpace{:?}", self.labels)
    }
}

/// The grammar of supported finitary functors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorSpec {
    Id,
    Const(Arc<LabelSpace>),
    PFin(Box<FunctorSpec>),
    DFin(Box<FunctorSpec>),
    Pair(Box<FunctorSpec>, Box<FunctorSpec>),
    Maybe(Box<FunctorSpec>),
}

impl FunctorSpec {
    pub fn pfin(sub: FunctorSpec) -> Self {
        FunctorSpec::PFin(Box::new(sub))
    }

    pub fn dfin(sub: FunctorSpec) -> Self {
        FunctorSpec::DFin(Box::new(sub))
    }

    pub fn pair(left: FunctorSpec, right: FunctorSpec) -> Self {
        FunctorSpec::Pair(Box::new(left), Box::new(right))
    }

    pub fn maybe(sub: FunctorSpec) -> Self {
        FunctorSpec::Maybe(Box::new(sub))
    }

    pub fn constant(labels: LabelSpace) -> Self {
        FunctorSpec::Const(Arc::new(labels))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FunctorSpec::Id => "id",
            FunctorSpec::Const(_) => "const",
            FunctorSpec::PFin(_) => "pfin",
            FunctorSpec::DFin(_) => "dfin",
            FunctorSpec::Pair(..) => "pair",
            FunctorSpec::Maybe(_) => "maybe",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            FunctorSpec::Id => json!({"kind": "id"}),
            FunctorSpec::Const(ls) => json!({
                "kind": "const",
                "labels": ls.labels().elements(),
                "metric": ls.metric().rows(),
            }),
            FunctorSpec::PFin(s) => json!({"kind": "pfin", "sub": s.to_json()}),
            FunctorSpec::DFin(s) => json!({"kind": "dfin", "sub": s.to_json()}),
            FunctorSpec::Maybe(s) => json!({"kind": "maybe", "sub": s.to_json()}),
            FunctorSpec::Pair(l, r) => {
                json!({"kind": "pair", "left": l.to_json(), "right": r.to_json()})
            }
        }
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        Self::from_json_at(value, "$")
    }

    fn from_json_at(value: &Value, path: &str) -> Result<Self> {
        let kind = value
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::json(path, "functor node needs a string `kind`"))?;
        let child = |key: &str| -> Result<FunctorSpec> {
            let v = value
                .get(key)
                .ok_or_else(|| Error::json(path, format!("`{kind}` node needs `{key}`")))?;
            Self::from_json_at(v, &format!("{path}.{key}"))
        };
        Ok(match kind {
            "id" => FunctorSpec::Id,
            "pfin" => FunctorSpec::pfin(child("sub")?),
            "dfin" => FunctorSpec::dfin(child("sub")?),
            "maybe" => FunctorSpec::maybe(child("sub")?),
            "pair" => FunctorSpec::pair(child("left")?, child("right")?),
            "const" => {
                let labels: Vec<String> = value
                    .get("labels")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::json(path, "`const` node needs a `labels` array"))?
                    .iter()
                    .map(label_text)
                    .collect::<Option<_>>()
                    .ok_or_else(|| {
                        Error::json(format!("{path}.labels"), "labels must be strings")
                    })?;
                let carrier = Arc::new(
                    Carrier::new(labels.clone())
                        .map_err(|e| Error::json(format!("{path}.labels"), e.to_string()))?,
                );
                let metric_path = format!("{path}.metric");
                // `"metric": "absolute"` reads the labels as numbers in [0,1].
                if value.get("metric").and_then(Value::as_str) == Some("absolute") {
                    let space = LabelSpace::numeric(labels)
                        .map_err(|e| Error::json(&metric_path, e.to_string()))?;
                    return Ok(FunctorSpec::constant(space));
                }
                let rows: Vec<Vec<Scalar>> =
                    serde_json::from_value(value.get("metric").cloned().ok_or_else(|| {
                        Error::json(path, "`const` node needs a `metric` matrix")
                    })?)
                    .map_err(|e| Error::json(&metric_path, e.to_string()))?;
                let metric = FuzzyRel::new(carrier.clone(), carrier.clone(), rows)
                    .map_err(|e| Error::json(&metric_path, e.to_string()))?;
                let space = LabelSpace::new(carrier, metric)
                    .map_err(|e| Error::json(&metric_path, e.to_string()))?;
                FunctorSpec::constant(space)
            }
            other => return Err(Error::json(path, format!("unknown functor kind `{other}`"))),
        })
    }
}

/// Labels may be written as strings or bare numbers.
pub(crate) fn label_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

impl fmt::Display for FunctorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorSpec::Id => write!(f, "Id"),
            FunctorSpec::Const(ls) => write!(f, "Const({})", ls.labels().len()),
            FunctorSpec::PFin(s) => write!(f, "PFin({s})"),
            FunctorSpec::DFin(s) => write!(f, "DFin({s})"),
            FunctorSpec::Pair(l, r) => write!(f, "Pair({l}, {r})"),
            FunctorSpec::Maybe(s) => write!(f, "Maybe({s})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_labels_use_absolute_difference() {
        let ls = LabelSpace::numeric(["0", "0.2", "0.7"]).unwrap();
        assert_eq!(ls.distance(1, 2), &Scalar::ratio(1, 2));
        assert_eq!(ls.distance(2, 0), &Scalar::ratio(7, 10));
    }

    #[test]
    fn const_metric_must_be_hemimetric() {
        let text = r#"{"kind":"const","labels":["a","b"],"metric":[["0","1/2"],["1/2","1/3"]]}"#;
        let v: Value = serde_json::from_str(text).unwrap();
        let err = FunctorSpec::from_json(&v).unwrap_err();
        assert!(err.to_string().contains("$.metric"), "{err}");
    }

    #[test]
    fn json_round_trip() {
        let spec = FunctorSpec::pair(
            FunctorSpec::constant(LabelSpace::numeric(["0", "1/2"]).unwrap()),
            FunctorSpec::pfin(FunctorSpec::maybe(FunctorSpec::dfin(FunctorSpec::Id))),
        );
        let back = FunctorSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        assert!(FunctorSpec::from_json(&json!({"kind": "list"})).is_err());
        assert!(FunctorSpec::from_json(&json!({"kind": "pfin"})).is_err());
    }
}
