use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fuzzy::Scalar;
use crate::lifting::modality::dual_name;
use crate::systems::{element_from_json, element_to_json, FunctorElement, FunctorSpec};

/// Quantitative modal formulas with Zadeh connectives.
///
/// Children sit behind `Arc` so that synthesized formulas can share
/// subformulas; evaluation memoizes on node identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Const(Scalar),
    /// `φ ⊖ c`
    MinusC(Arc<Formula>, Scalar),
    /// `φ ⊕ c`
    PlusC(Arc<Formula>, Scalar),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    /// A named predicate lifting from the registry.
    Modal {
        name: String,
        args: Vec<Arc<Formula>>,
    },
    /// `ΔΦ`, where `Φ = T(i ↦ args[i])(shape)`. Leaves of `shape` index `args`.
    MossDelta {
        functor: Arc<FunctorSpec>,
        shape: FunctorElement,
        args: Vec<Arc<Formula>>,
    },
    Neg(Arc<Formula>),
}

impl Formula {
    pub fn constant(c: Scalar) -> Arc<Formula> {
        Arc::new(Formula::Const(c))
    }

    pub fn modal(name: impl Into<String>, args: Vec<Arc<Formula>>) -> Arc<Formula> {
        Arc::new(Formula::Modal {
            name: name.into(),
            args,
        })
    }

    pub fn and(l: Arc<Formula>, r: Arc<Formula>) -> Arc<Formula> {
        Arc::new(Formula::And(l, r))
    }

    pub fn or(l: Arc<Formula>, r: Arc<Formula>) -> Arc<Formula> {
        Arc::new(Formula::Or(l, r))
    }

    pub fn plus(f: Arc<Formula>, c: Scalar) -> Arc<Formula> {
        Arc::new(Formula::PlusC(f, c))
    }

    pub fn minus(f: Arc<Formula>, c: Scalar) -> Arc<Formula> {
        Arc::new(Formula::MinusC(f, c))
    }

    pub fn neg(f: Arc<Formula>) -> Arc<Formula> {
        Arc::new(Formula::Neg(f))
    }

    /// Builds `ΔΦ`, checking that `shape` is well-typed over the arguments.
    pub fn moss(
        functor: Arc<FunctorSpec>,
        shape: FunctorElement,
        args: Vec<Arc<Formula>>,
    ) -> Result<Arc<Formula>> {
        shape.type_check(&functor, args.len())?;
        Ok(Arc::new(Formula::MossDelta {
            functor,
            shape,
            args,
        }))
    }

    /// Modal nesting depth.
    pub fn rank(&self) -> usize {
        match self {
            Formula::Const(_) => 0,
            Formula::MinusC(f, _) | Formula::PlusC(f, _) | Formula::Neg(f) => f.rank(),
            Formula::And(l, r) | Formula::Or(l, r) => l.rank().max(r.rank()),
            Formula::Modal { args, .. } | Formula::MossDelta { args, .. } => {
                1 + args.iter().map(|a| a.rank()).max().unwrap_or(0)
            }
        }
    }

    /// Number of nodes, counting shared subformulas once per occurrence.
    pub fn size(&self) -> usize {
        match self {
            Formula::Const(_) => 1,
            Formula::MinusC(f, _) | Formula::PlusC(f, _) | Formula::Neg(f) => 1 + f.size(),
            Formula::And(l, r) | Formula::Or(l, r) => 1 + l.size() + r.size(),
            Formula::Modal { args, .. } | Formula::MossDelta { args, .. } => {
                1 + args.iter().map(|a| a.size()).sum::<usize>()
            }
        }
    }

    /// Pushes negations to the leaves: `¬c = 1-c`, `¬(φ⊖c) = ¬φ⊕c`,
    /// De Morgan on `∧`/`∨`, and `¬λ(φ) = λ̄(¬φ)` with `λ̄` the dual.
    /// Moss formulas have no dual here and are rejected under a negation.
    pub fn negation_normal_form(f: &Arc<Formula>) -> Result<Arc<Formula>> {
        nnf(f, false)
    }
}

fn nnf(f: &Arc<Formula>, negated: bool) -> Result<Arc<Formula>> {
    Ok(match (&**f, negated) {
        (Formula::Neg(g), _) => nnf(g, !negated)?,
        (Formula::Const(_), false) => f.clone(),
        (Formula::Const(c), true) => Formula::constant(c.complement()),
        (Formula::MinusC(g, c), false) => Formula::minus(nnf(g, false)?, c.clone()),
        (Formula::MinusC(g, c), true) => Formula::plus(nnf(g, true)?, c.clone()),
        (Formula::PlusC(g, c), false) => Formula::plus(nnf(g, false)?, c.clone()),
        (Formula::PlusC(g, c), true) => Formula::minus(nnf(g, true)?, c.clone()),
        (Formula::And(l, r), false) => Formula::and(nnf(l, false)?, nnf(r, false)?),
        (Formula::And(l, r), true) => Formula::or(nnf(l, true)?, nnf(r, true)?),
        (Formula::Or(l, r), false) => Formula::or(nnf(l, false)?, nnf(r, false)?),
        (Formula::Or(l, r), true) => Formula::and(nnf(l, true)?, nnf(r, true)?),
        (Formula::Modal { name, args }, neg) => {
            let args = args
                .iter()
                .map(|a| nnf(a, neg))
                .collect::<Result<Vec<_>>>()?;
            let name = if neg { dual_name(name) } else { name.clone() };
            Formula::modal(name, args)
        }
        (
            Formula::MossDelta {
                functor,
                shape,
                args,
            },
            false,
        ) => {
            let args = args
                .iter()
                .map(|a| nnf(a, false))
                .collect::<Result<Vec<_>>>()?;
            Arc::new(Formula::MossDelta {
                functor: functor.clone(),
                shape: shape.clone(),
                args,
            })
        }
        (Formula::MossDelta { .. }, true) => {
            return Err(Error::Unsupported("negation of a Moss formula".into()));
        }
    })
}

/// `{"functor": …, "shape": …}`, the header of a Moss node.
pub(crate) fn moss_header(functor: &FunctorSpec, shape: &FunctorElement) -> Value {
    json!({
        "functor": functor.to_json(),
        "shape": element_to_json(functor, shape, &|i| json!(i)),
    })
}

pub(crate) fn moss_header_from_json(
    v: &Value,
    path: &str,
) -> Result<(Arc<FunctorSpec>, FunctorElement)> {
    let functor = v
        .get("functor")
        .ok_or_else(|| Error::json(path, "missing `functor`"))
        .and_then(FunctorSpec::from_json)?;
    let shape = v
        .get("shape")
        .ok_or_else(|| Error::json(path, "missing `shape`"))?;
    let mut diags = Vec::new();
    let leaf = |v: &Value| -> std::result::Result<usize, String> {
        v.as_u64()
            .map(|i| i as usize)
            .ok_or_else(|| format!("expected an argument index, found {v}"))
    };
    let shape = element_from_json(&functor, shape, &leaf, &format!("{path}.shape"), &mut diags);
    match (
        shape,
        diags
            .iter()
            .find(|d| d.severity == crate::systems::Severity::Error),
    ) {
        (Some(shape), None) => Ok((Arc::new(functor), shape)),
        (_, Some(d)) => Err(Error::json(d.path.clone(), d.message.clone())),
        (None, None) => Err(Error::json(path, "bad shape")),
    }
}

impl Formula {
    pub fn to_json(&self) -> Value {
        match self {
            Formula::Const(c) => json!({"op": "const", "value": c.to_string()}),
            Formula::MinusC(f, c) => json!({"op": "minus", "sub": f.to_json(), "c": c.to_string()}),
            Formula::PlusC(f, c) => json!({"op": "plus", "sub": f.to_json(), "c": c.to_string()}),
            Formula::And(l, r) => json!({"op": "and", "left": l.to_json(), "right": r.to_json()}),
            Formula::Or(l, r) => json!({"op": "or", "left": l.to_json(), "right": r.to_json()}),
            Formula::Modal { name, args } => json!({
                "op": "modal",
                "name": name,
                "args": args.iter().map(|a| a.to_json()).collect::<Vec<_>>(),
            }),
            Formula::MossDelta {
                functor,
                shape,
                args,
            } => {
                let mut v = moss_header(functor, shape);
                v["op"] = json!("moss");
                v["args"] = Value::Array(args.iter().map(|a| a.to_json()).collect());
                v
            }
            Formula::Neg(f) => json!({"op": "neg", "sub": f.to_json()}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Arc<Formula>> {
        from_json_at(v, "$")
    }
}

fn from_json_at(v: &Value, path: &str) -> Result<Arc<Formula>> {
    let op = v
        .get("op")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::json(path, "expected an object with a string `op`"))?;
    let scalar = |key: &str| -> Result<Scalar> {
        let field = v
            .get(key)
            .ok_or_else(|| Error::json(path, format!("missing `{key}`")))?;
        serde_json::from_value(field.clone())
            .map_err(|e| Error::json(format!("{path}.{key}"), e.to_string()))
    };
    let sub = |key: &str| -> Result<Arc<Formula>> {
        let field = v
            .get(key)
            .ok_or_else(|| Error::json(path, format!("missing `{key}`")))?;
        from_json_at(field, &format!("{path}.{key}"))
    };
    let args = || -> Result<Vec<Arc<Formula>>> {
        v.get("args")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::json(path, "missing `args` list"))?
            .iter()
            .enumerate()
            .map(|(i, a)| from_json_at(a, &format!("{path}.args[{i}]")))
            .collect()
    };
    Ok(match op {
        "const" => Formula::constant(scalar("value")?),
        "minus" => Formula::minus(sub("sub")?, scalar("c")?),
        "plus" => Formula::plus(sub("sub")?, scalar("c")?),
        "and" => Formula::and(sub("left")?, sub("right")?),
        "or" => Formula::or(sub("left")?, sub("right")?),
        "neg" => Formula::neg(sub("sub")?),
        "modal" => {
            let name = v
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::json(path, "missing `name`"))?;
            Formula::modal(name, args()?)
        }
        "moss" => {
            let (functor, shape) = moss_header_from_json(v, path)?;
            let args = args()?;
            shape
                .type_check(&functor, args.len())
                .map_err(|e| Error::json(format!("{path}.shape"), e.to_string()))?;
            Arc::new(Formula::MossDelta {
                functor,
                shape,
                args,
            })
        }
        other => {
            return Err(Error::json(
                format!("{path}.op"),
                format!("unknown operator `{other}`"),
            ))
        }
    })
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::print(self))
    }
}
