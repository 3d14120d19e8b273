use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use super::functor::{label_text, FunctorSpec};
use crate::error::{Error, Result};
use crate::fuzzy::Scalar;

/// An element `t ∈ TX` of a functor applied to a finite carrier `X`.
///
/// `Leaf(i)` is the `i`-th element of `X`. Sets and distributions are kept
/// in canonical form (sorted, no duplicates), so structural equality is
/// semantic equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FunctorElement {
    Leaf(usize),
    Label(usize),
    Set(Vec<FunctorElement>),
    Dist(Vec<(FunctorElement, Scalar)>),
    Pair(Box<FunctorElement>, Box<FunctorElement>),
    Nothing,
    Just(Box<FunctorElement>),
}

impl FunctorElement {
    pub fn set(items: impl IntoIterator<Item = FunctorElement>) -> Self {
        let mut v: Vec<_> = items.into_iter().collect();
        v.sort();
        v.dedup();
        FunctorElement::Set(v)
    }

    /// A finitely supported distribution. Repeated outcomes are merged; every
    /// weight must be positive and the total exactly 1.
    pub fn dist(items: impl IntoIterator<Item = (FunctorElement, Scalar)>) -> Result<Self> {
        let items: Vec<_> = items.into_iter().collect();
        if let Some((_, p)) = items.iter().find(|(_, p)| p.is_zero()) {
            return Err(Error::structural(format!(
                "probability {p} is not positive"
            )));
        }
        let total: BigRational = items.iter().map(|(_, p)| p.as_rational()).sum();
        if !total.is_one() {
            return Err(Error::structural(format!(
                "probabilities sum to {}, not 1",
                crate::fuzzy::format_rational(&total)
            )));
        }
        Ok(Self::merge_dist(items))
    }

    fn merge_dist(items: Vec<(FunctorElement, Scalar)>) -> Self {
        let mut merged: BTreeMap<FunctorElement, BigRational> = BTreeMap::new();
        for (x, p) in items {
            *merged.entry(x).or_insert_with(BigRational::zero) += p.into_rational();
        }
        FunctorElement::Dist(
            merged
                .into_iter()
                .map(|(x, p)| (x, Scalar::new(p).expect("merged mass stays in [0,1]")))
                .collect(),
        )
    }

    pub fn pair(left: FunctorElement, right: FunctorElement) -> Self {
        FunctorElement::Pair(Box::new(left), Box::new(right))
    }

    pub fn just(inner: FunctorElement) -> Self {
        FunctorElement::Just(Box::new(inner))
    }

    /// The functor action `Tf` on leaves. Sets are re-deduplicated and
    /// distributions push their mass forward.
    pub fn map_leaves(&self, f: &impl Fn(usize) -> usize) -> FunctorElement {
        match self {
            FunctorElement::Leaf(x) => FunctorElement::Leaf(f(*x)),
            FunctorElement::Label(l) => FunctorElement::Label(*l),
            FunctorElement::Set(items) => {
                FunctorElement::set(items.iter().map(|t| t.map_leaves(f)))
            }
            FunctorElement::Dist(items) => Self::merge_dist(
                items
                    .iter()
                    .map(|(t, p)| (t.map_leaves(f), p.clone()))
                    .collect(),
            ),
            FunctorElement::Pair(l, r) => FunctorElement::pair(l.map_leaves(f), r.map_leaves(f)),
            FunctorElement::Nothing => FunctorElement::Nothing,
            FunctorElement::Just(t) => FunctorElement::just(t.map_leaves(f)),
        }
    }

    /// Carrier positions mentioned by this element, in order of first
    /// occurrence in the canonical form.
    pub fn base(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        let mut seen = std::collections::HashSet::new();
        out.retain(|x| seen.insert(*x));
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            FunctorElement::Leaf(x) => out.push(*x),
            FunctorElement::Label(_) | FunctorElement::Nothing => {}
            FunctorElement::Set(items) => items.iter().for_each(|t| t.collect_leaves(out)),
            FunctorElement::Dist(items) => items.iter().for_each(|(t, _)| t.collect_leaves(out)),
            FunctorElement::Pair(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
            FunctorElement::Just(t) => t.collect_leaves(out),
        }
    }

    /// Checks that this element is a canonical element of `spec` over a
    /// carrier with `carrier_len` points.
    pub fn type_check(&self, spec: &FunctorSpec, carrier_len: usize) -> Result<()> {
        self.check_at(spec, carrier_len, "$")
    }

    fn check_at(&self, spec: &FunctorSpec, n: usize, path: &str) -> Result<()> {
        let fail = |message: String| Error::Type {
            path: path.to_string(),
            message,
        };
        match (spec, self) {
            (FunctorSpec::Id, FunctorElement::Leaf(x)) => {
                if *x < n {
                    Ok(())
                } else {
                    Err(fail(format!(
                        "state position {x} outside carrier of size {n}"
                    )))
                }
            }
            (FunctorSpec::Const(ls), FunctorElement::Label(l)) => {
                if *l < ls.labels().len() {
                    Ok(())
                } else {
                    Err(fail(format!("label position {l} out of range")))
                }
            }
            (FunctorSpec::PFin(sub), FunctorElement::Set(items)) => {
                if items.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(fail(
                        "set is not in canonical (sorted, distinct) form".into(),
                    ));
                }
                for (i, t) in items.iter().enumerate() {
                    t.check_at(sub, n, &format!("{path}[{i}]"))?;
                }
                Ok(())
            }
            (FunctorSpec::DFin(sub), FunctorElement::Dist(items)) => {
                if items.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(fail(
                        "distribution is not in canonical (sorted, distinct) form".into(),
                    ));
                }
                let mut total = BigRational::zero();
                for (i, (t, p)) in items.iter().enumerate() {
                    if p.is_zero() {
                        return Err(fail(format!("probability at [{i}] is zero")));
                    }
                    total += p.as_rational();
                    t.check_at(sub, n, &format!("{path}[{i}]"))?;
                }
                if !total.is_one() {
                    return Err(fail(format!(
                        "probabilities sum to {}, not 1",
                        crate::fuzzy::format_rational(&total)
                    )));
                }
                Ok(())
            }
            (FunctorSpec::Pair(ls, rs), FunctorElement::Pair(l, r)) => {
                l.check_at(ls, n, &format!("{path}.0"))?;
                r.check_at(rs, n, &format!("{path}.1"))
            }
            (FunctorSpec::Maybe(_), FunctorElement::Nothing) => Ok(()),
            (FunctorSpec::Maybe(sub), FunctorElement::Just(t)) => t.check_at(sub, n, path),
            (spec, t) => Err(fail(format!(
                "expected a `{}` element, found {t:?}",
                spec.kind()
            ))),
        }
    }

    /// Every element of `T1`-shaped position trees is finite; this counts nodes.
    pub fn size(&self) -> usize {
        match self {
            FunctorElement::Leaf(_) | FunctorElement::Label(_) | FunctorElement::Nothing => 1,
            FunctorElement::Set(items) => 1 + items.iter().map(Self::size).sum::<usize>(),
            FunctorElement::Dist(items) => 1 + items.iter().map(|(t, _)| t.size()).sum::<usize>(),
            FunctorElement::Pair(l, r) => 1 + l.size() + r.size(),
            FunctorElement::Just(t) => 1 + t.size(),
        }
    }
}

/// `Tf(t)` for `f: X → Y` given as a position table, after checking `t`.
pub fn apply_map(spec: &FunctorSpec, f: &[usize], t: &FunctorElement) -> Result<FunctorElement> {
    t.type_check(spec, f.len())?;
    Ok(t.map_leaves(&|x| f[x]))
}

impl fmt::Debug for FunctorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorElement::Leaf(x) => write!(f, "#{x}"),
            FunctorElement::Label(l) => write!(f, "@{l}"),
            FunctorElement::Set(items) => f.debug_set().entries(items).finish(),
            FunctorElement::Dist(items) => {
                write!(f, "{{")?;
                for (i, (t, p)) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t:?}↦{p}")?;
                }
                write!(f, "}}")
            }
            FunctorElement::Pair(l, r) => write!(f, "({l:?}, {r:?})"),
            FunctorElement::Nothing => write!(f, "Nothing"),
            FunctorElement::Just(t) => write!(f, "Just({t:?})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A validation finding with a JSON-path-like location.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn warning(path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev} at {}: {}", self.path, self.message)
    }
}

/// Encodes an element as JSON: sets as lists, distributions as lists of
/// `[outcome, "p/q"]`, pairs as 2-lists, `Nothing` as `null`, labels by name.
pub fn element_to_json(
    spec: &FunctorSpec,
    t: &FunctorElement,
    leaf: &dyn Fn(usize) -> Value,
) -> Value {
    match (spec, t) {
        (FunctorSpec::Id, FunctorElement::Leaf(x)) => leaf(*x),
        (FunctorSpec::Const(ls), FunctorElement::Label(l)) => json!(ls.labels().name(*l)),
        (FunctorSpec::PFin(sub), FunctorElement::Set(items)) => Value::Array(
            items
                .iter()
                .map(|t| element_to_json(sub, t, leaf))
                .collect(),
        ),
        (FunctorSpec::DFin(sub), FunctorElement::Dist(items)) => Value::Array(
            items
                .iter()
                .map(|(t, p)| json!([element_to_json(sub, t, leaf), p.to_string()]))
                .collect(),
        ),
        (FunctorSpec::Pair(ls, rs), FunctorElement::Pair(l, r)) => {
            json!([element_to_json(ls, l, leaf), element_to_json(rs, r, leaf)])
        }
        (FunctorSpec::Maybe(_), FunctorElement::Nothing) => Value::Null,
        (FunctorSpec::Maybe(sub), FunctorElement::Just(t)) => element_to_json(sub, t, leaf),
        (spec, t) => json!({"ill-typed": format!("{t:?}"), "expected": spec.kind()}),
    }
}

fn fail(diags: &mut Vec<Diagnostic>, path: &str, msg: String) -> Option<FunctorElement> {
    diags.push(Diagnostic::error(path, msg));
    None
}

/// Decodes an element against its functor. Problems are pushed to `diags`;
/// `None` is returned when an error makes the element unusable.
pub fn element_from_json(
    spec: &FunctorSpec,
    v: &Value,
    leaf: &dyn Fn(&Value) -> std::result::Result<usize, String>,
    path: &str,
    diags: &mut Vec<Diagnostic>,
) -> Option<FunctorElement> {
    match spec {
        FunctorSpec::Id => match leaf(v) {
            Ok(x) => Some(FunctorElement::Leaf(x)),
            Err(msg) => fail(diags, path, msg),
        },
        FunctorSpec::Const(ls) => match label_text(v) {
            Some(name) => match ls.labels().position(&name) {
                Some(l) => Some(FunctorElement::Label(l)),
                None => fail(diags, path, format!("unknown label `{name}`")),
            },
            None => fail(diags, path, format!("expected a label, found {v}")),
        },
        FunctorSpec::PFin(sub) => {
            let Some(items) = v.as_array() else {
                return fail(
                    diags,
                    path,
                    format!("expected a list (finite set), found {v}"),
                );
            };
            let mut out = Vec::with_capacity(items.len());
            let mut ok = true;
            for (i, item) in items.iter().enumerate() {
                match element_from_json(sub, item, leaf, &format!("{path}[{i}]"), diags) {
                    Some(t) => out.push(t),
                    None => ok = false,
                }
            }
            if !ok {
                return None;
            }
            let set = FunctorElement::set(out);
            if let FunctorElement::Set(s) = &set {
                if s.len() < items.len() {
                    diags.push(Diagnostic::warning(
                        path,
                        format!("{} duplicate set member(s) removed", items.len() - s.len()),
                    ));
                }
            }
            Some(set)
        }
        FunctorSpec::DFin(sub) => {
            let Some(items) = v.as_array() else {
                return fail(
                    diags,
                    path,
                    format!("expected a list of [outcome, probability], found {v}"),
                );
            };
            let mut out = Vec::with_capacity(items.len());
            let mut ok = true;
            for (i, item) in items.iter().enumerate() {
                let ipath = format!("{path}[{i}]");
                let Some([outcome, prob]) = item
                    .as_array()
                    .map(Vec::as_slice)
                    .and_then(|s| <&[Value; 2]>::try_from(s).ok())
                else {
                    diags.push(Diagnostic::error(&ipath, "expected [outcome, probability]"));
                    ok = false;
                    continue;
                };
                let p = match serde_json::from_value::<Scalar>(prob.clone()) {
                    Ok(p) if !p.is_zero() => Some(p),
                    Ok(_) => {
                        diags.push(Diagnostic::error(&ipath, "probability must be positive"));
                        None
                    }
                    Err(e) => {
                        diags.push(Diagnostic::error(&ipath, format!("bad probability: {e}")));
                        None
                    }
                };
                let t = element_from_json(sub, outcome, leaf, &format!("{ipath}[0]"), diags);
                match (t, p) {
                    (Some(t), Some(p)) => out.push((t, p)),
                    _ => ok = false,
                }
            }
            if !ok {
                return None;
            }
            let total: BigRational = out.iter().map(|(_, p)| p.as_rational()).sum();
            if !total.is_one() {
                return fail(
                    diags,
                    path,
                    format!(
                        "probabilities sum to {}, not 1",
                        crate::fuzzy::format_rational(&total)
                    ),
                );
            }
            let n = out.len();
            let dist = FunctorElement::merge_dist(out);
            if let FunctorElement::Dist(d) = &dist {
                if d.len() < n {
                    diags.push(Diagnostic::warning(path, "repeated outcomes merged"));
                }
            }
            Some(dist)
        }
        FunctorSpec::Pair(ls, rs) => {
            let Some([l, r]) = v
                .as_array()
                .map(Vec::as_slice)
                .and_then(|s| <&[Value; 2]>::try_from(s).ok())
            else {
                return fail(
                    diags,
                    path,
                    format!("expected a pair [left, right], found {v}"),
                );
            };
            let l = element_from_json(ls, l, leaf, &format!("{path}[0]"), diags);
            let r = element_from_json(rs, r, leaf, &format!("{path}[1]"), diags);
            Some(FunctorElement::pair(l?, r?))
        }
        FunctorSpec::Maybe(sub) => {
            if v.is_null() {
                Some(FunctorElement::Nothing)
            } else {
                element_from_json(sub, v, leaf, path, diags).map(FunctorElement::just)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::LabelSpace;

    fn leaf(x: usize) -> FunctorElement {
        FunctorElement::Leaf(x)
    }

    #[test]
    fn pushforward_merges_mass() {
        let mu = FunctorElement::dist([
            (leaf(0), Scalar::ratio(1, 2)),
            (leaf(1), Scalar::ratio(1, 2)),
        ])
        .unwrap();
        let spec = FunctorSpec::dfin(FunctorSpec::Id);
        let image = apply_map(&spec, &[0, 0], &mu).unwrap();
        assert_eq!(image, FunctorElement::Dist(vec![(leaf(0), Scalar::one())]));
    }

    #[test]
    fn mass_must_be_one() {
        let err = FunctorElement::dist([
            (leaf(0), Scalar::ratio(1, 2)),
            (leaf(1), Scalar::ratio(1, 3)),
        ]);
        assert!(err.unwrap_err().to_string().contains("5/6"));
    }

    #[test]
    fn identity_map_is_identity() {
        let spec = FunctorSpec::pfin(FunctorSpec::Id);
        let t = FunctorElement::set([leaf(2), leaf(0)]);
        assert_eq!(apply_map(&spec, &[0, 1, 2], &t).unwrap(), t);
    }

    #[test]
    fn apply_map_rejects_ill_typed() {
        let spec = FunctorSpec::pfin(FunctorSpec::Id);
        assert!(apply_map(&spec, &[0], &leaf(0)).is_err());
        assert!(apply_map(&spec, &[0], &FunctorElement::set([leaf(3)])).is_err());
    }

    #[test]
    fn base_examples() {
        let labels = LabelSpace::numeric(["0.7"]).unwrap();
        let _ = labels;
        let t = FunctorElement::pair(
            FunctorElement::Label(0),
            FunctorElement::set([leaf(1), leaf(2)]),
        );
        assert_eq!(t.base(), vec![1, 2]);
        assert_eq!(FunctorElement::Nothing.base(), Vec::<usize>::new());
        let mu = FunctorElement::dist([
            (leaf(4), Scalar::ratio(1, 3)),
            (leaf(2), Scalar::ratio(2, 3)),
        ])
        .unwrap();
        assert_eq!(mu.base(), vec![2, 4]);
    }

    #[test]
    fn json_decoding_dedups_sets_with_warning() {
        let spec = FunctorSpec::pfin(FunctorSpec::Id);
        let mut diags = Vec::new();
        let names = ["a", "b"];
        let leafdec = |v: &Value| -> std::result::Result<usize, String> {
            let s = v.as_str().ok_or("not a string")?;
            names
                .iter()
                .position(|n| *n == s)
                .ok_or_else(|| format!("unknown state `{s}`"))
        };
        let t =
            element_from_json(&spec, &json!(["b", "a", "b"]), &leafdec, "$", &mut diags).unwrap();
        assert_eq!(t, FunctorElement::set([leaf(0), leaf(1)]));
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].severity, Severity::Warning);

        let spec = FunctorSpec::dfin(FunctorSpec::Id);
        let mut diags = Vec::new();
        let t = element_from_json(
            &spec,
            &json!([["a", "1/2"], ["b", "1/3"]]),
            &leafdec,
            "$.alpha.a",
            &mut diags,
        );
        assert!(t.is_none());
        assert!(diags[0].message.contains("5/6"), "{:?}", diags);
        assert_eq!(diags[0].path, "$.alpha.a");
    }
}
