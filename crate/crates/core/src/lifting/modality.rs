//! Shipped predicate liftings and their lookup by functor.
//!
//! Every functor node contributes a dual pair: `<>`/`[]` on `Id`, `PFin(Id)`
//! and `DFin(Id)`, and for each label `l` of a `Const` node the nullary pair
//! `@l` (distance to `l`) / `@~l` (one minus that distance). Components of a
//! pair are reached through `fst.` and `snd.` prefixes, and a `Maybe` layer
//! sends `Nothing` to 0 for the lower member of each pair and to 1 for the
//! upper one.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fuzzy::Scalar;
use crate::systems::{FunctorElement, FunctorSpec, LabelSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Fst,
    Snd,
    Just,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModalityKind {
    /// `f(x)` on a bare state.
    Next,
    /// `sup f[U]`, 0 on the empty set.
    Diamond,
    /// `inf f[U]`, 1 on the empty set.
    Box,
    /// `Σ μ(x) f(x)`.
    Expect,
    /// `d(label, l)`.
    LabelDistance(usize),
    /// `1 - d(label, l)`.
    LabelCloseness(usize),
}

/// A named fuzzy predicate lifting `λ: [0,1]^X → [0,1]^{TX}` of arity 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateLifting {
    name: String,
    path: Vec<Step>,
    kind: ModalityKind,
    /// Which member of its dual pair this is; decides the value on `Nothing`.
    upper: bool,
    labels: Option<Arc<LabelSpace>>,
}

impl PredicateLifting {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        match self.kind {
            ModalityKind::LabelDistance(_) | ModalityKind::LabelCloseness(_) => 0,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &ModalityKind {
        &self.kind
    }

    /// All shipped liftings are monotone.
    pub fn is_monotone(&self) -> bool {
        true
    }

    /// `|λ(f)(t) - λ(g)(t)| ≤ sup |f - g|`; holds for every shipped lifting.
    pub fn is_nonexpansive(&self) -> bool {
        true
    }

    pub fn dual_name(&self) -> String {
        dual_name(&self.name)
    }

    pub fn dual(&self) -> PredicateLifting {
        let kind = match &self.kind {
            ModalityKind::Diamond => ModalityKind::Box,
            ModalityKind::Box => ModalityKind::Diamond,
            ModalityKind::LabelDistance(l) => ModalityKind::LabelCloseness(*l),
            ModalityKind::LabelCloseness(l) => ModalityKind::LabelDistance(*l),
            k => k.clone(),
        };
        PredicateLifting {
            name: self.dual_name(),
            path: self.path.clone(),
            kind,
            upper: !self.upper,
            labels: self.labels.clone(),
        }
    }

    /// `λ_X(args)(t)`. Predicate tables are indexed by carrier position.
    pub fn eval(&self, t: &FunctorElement, args: &[&[Scalar]]) -> Result<Scalar> {
        if args.len() != self.arity() {
            return Err(Error::Arity {
                name: self.name.clone(),
                expected: self.arity(),
                found: args.len(),
            });
        }
        let mut node = t;
        for step in &self.path {
            node = match (step, node) {
                (Step::Fst, FunctorElement::Pair(l, _)) => l,
                (Step::Snd, FunctorElement::Pair(_, r)) => r,
                (Step::Just, FunctorElement::Just(x)) => x,
                (Step::Just, FunctorElement::Nothing) => {
                    return Ok(if self.upper {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    })
                }
                _ => return Err(self.shape_error(t)),
            };
        }
        let table = |x: usize| -> Result<&Scalar> {
            args[0].get(x).ok_or_else(|| {
                Error::structural(format!(
                    "predicate for `{}` has no value at position {x}",
                    self.name
                ))
            })
        };
        match (&self.kind, node) {
            (ModalityKind::Next, FunctorElement::Leaf(x)) => table(*x).cloned(),
            (ModalityKind::Diamond, FunctorElement::Set(items)) => {
                let mut best = Scalar::zero();
                for item in items {
                    best =
                        best.max(table(leaf_of(item).ok_or_else(|| self.shape_error(t))?)?.clone());
                }
                Ok(best)
            }
            (ModalityKind::Box, FunctorElement::Set(items)) => {
                let mut best = Scalar::one();
                for item in items {
                    best =
                        best.min(table(leaf_of(item).ok_or_else(|| self.shape_error(t))?)?.clone());
                }
                Ok(best)
            }
            (ModalityKind::Expect, FunctorElement::Dist(items)) => {
                let mut total = BigRational::zero();
                for (item, p) in items {
                    let x = leaf_of(item).ok_or_else(|| self.shape_error(t))?;
                    total += p.as_rational() * table(x)?.as_rational();
                }
                Ok(Scalar::clamp(total))
            }
            (ModalityKind::LabelDistance(l), FunctorElement::Label(x)) => Ok(self
                .labels
                .as_ref()
                .expect("label modality has labels")
                .distance(*x, *l)
                .clone()),
            (ModalityKind::LabelCloseness(l), FunctorElement::Label(x)) => Ok(self
                .labels
                .as_ref()
                .expect("label modality has labels")
                .distance(*x, *l)
                .complement()),
            _ => Err(self.shape_error(t)),
        }
    }

    fn shape_error(&self, t: &FunctorElement) -> Error {
        Error::Shape(format!(
            "modality `{}` cannot read element {t:?}",
            self.name
        ))
    }
}

fn leaf_of(t: &FunctorElement) -> Option<usize> {
    match t {
        FunctorElement::Leaf(x) => Some(*x),
        _ => None,
    }
}

/// `<>` ↔ `[]` and `@l` ↔ `@~l`, keeping any `fst.`/`snd.` prefix.
pub fn dual_name(name: &str) -> String {
    let (prefix, last) = split_prefix(name);
    let flipped = match last {
        "<>" => "[]".to_string(),
        "[]" => "<>".to_string(),
        l if l.starts_with("@~") => format!("@{}", &l[2..]),
        l if l.starts_with('@') => format!("@~{}", &l[1..]),
        l => l.to_string(),
    };
    format!("{prefix}{flipped}")
}

fn split_prefix(name: &str) -> (&str, &str) {
    let mut rest = name;
    let mut consumed = 0;
    while let Some(r) = rest
        .strip_prefix("fst.")
        .or_else(|| rest.strip_prefix("snd."))
    {
        consumed += 4;
        rest = r;
    }
    (&name[..consumed], rest)
}

/// Every shipped modality for `functor`, lower member of each dual pair first.
pub fn modalities_for(functor: &FunctorSpec) -> Vec<PredicateLifting> {
    let mut out = Vec::new();
    collect(functor, &mut Vec::new(), "", &mut out);
    out
}

/// Looks up a modality by name.
pub fn find_modality(functor: &FunctorSpec, name: &str) -> Result<PredicateLifting> {
    modalities_for(functor)
        .into_iter()
        .find(|m| m.name == name)
        .ok_or_else(|| Error::UnknownModality(name.to_string()))
}

fn collect(
    spec: &FunctorSpec,
    path: &mut Vec<Step>,
    prefix: &str,
    out: &mut Vec<PredicateLifting>,
) {
    let mut pair = |lower: &str,
                    upper: &str,
                    lk: ModalityKind,
                    uk: ModalityKind,
                    labels: Option<Arc<LabelSpace>>| {
        out.push(PredicateLifting {
            name: format!("{prefix}{lower}"),
            path: path.clone(),
            kind: lk,
            upper: false,
            labels: labels.clone(),
        });
        out.push(PredicateLifting {
            name: format!("{prefix}{upper}"),
            path: path.clone(),
            kind: uk,
            upper: true,
            labels,
        });
    };
    match spec {
        FunctorSpec::Id => pair("<>", "[]", ModalityKind::Next, ModalityKind::Next, None),
        FunctorSpec::PFin(sub) if **sub == FunctorSpec::Id => {
            pair("<>", "[]", ModalityKind::Diamond, ModalityKind::Box, None)
        }
        FunctorSpec::DFin(sub) if **sub == FunctorSpec::Id => {
            pair("<>", "[]", ModalityKind::Expect, ModalityKind::Expect, None)
        }
        FunctorSpec::Const(ls) => {
            for (l, name) in ls.labels().elements().iter().enumerate() {
                pair(
                    &format!("@{name}"),
                    &format!("@~{name}"),
                    ModalityKind::LabelDistance(l),
                    ModalityKind::LabelCloseness(l),
                    Some(ls.clone()),
                );
            }
        }
        FunctorSpec::Maybe(sub) => {
            path.push(Step::Just);
            collect(sub, path, prefix, out);
            path.pop();
        }
        FunctorSpec::Pair(l, r) => {
            path.push(Step::Fst);
            collect(l, path, &format!("{prefix}fst."), out);
            path.pop();
            path.push(Step::Snd);
            collect(r, path, &format!("{prefix}snd."), out);
            path.pop();
        }
        FunctorSpec::PFin(_) | FunctorSpec::DFin(_) => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn diamond_and_box_on_sets() {
        let spec = FunctorSpec::pfin(FunctorSpec::Id);
        let dia = find_modality(&spec, "<>").unwrap();
        let bx = find_modality(&spec, "[]").unwrap();
        let f = [s(1, 2), s(1, 4), s(3, 4)];
        let t = FunctorElement::set([FunctorElement::Leaf(0), FunctorElement::Leaf(1)]);
        assert_eq!(dia.eval(&t, &[&f]).unwrap(), s(1, 2));
        assert_eq!(bx.eval(&t, &[&f]).unwrap(), s(1, 4));
        let empty = FunctorElement::set([]);
        assert_eq!(dia.eval(&empty, &[&f]).unwrap(), Scalar::zero());
        assert_eq!(bx.eval(&empty, &[&f]).unwrap(), Scalar::one());
        assert_eq!(dia.dual(), bx);
    }

    #[test]
    fn deadlock_and_expectation() {
        let spec = FunctorSpec::maybe(FunctorSpec::dfin(FunctorSpec::Id));
        let dia = find_modality(&spec, "<>").unwrap();
        let f = [s(1, 2), s(1, 1)];
        assert_eq!(
            dia.eval(&FunctorElement::Nothing, &[&f]).unwrap(),
            Scalar::zero()
        );
        assert_eq!(
            dia.dual().eval(&FunctorElement::Nothing, &[&f]).unwrap(),
            Scalar::one()
        );
        let mu = FunctorElement::dist([
            (FunctorElement::Leaf(0), s(1, 3)),
            (FunctorElement::Leaf(1), s(2, 3)),
        ])
        .unwrap();
        assert_eq!(dia.eval(&FunctorElement::just(mu), &[&f]).unwrap(), s(5, 6));
    }

    #[test]
    fn pair_prefixes_and_labels() {
        let labels = LabelSpace::numeric(["0.2", "0.7"]).unwrap();
        let spec = FunctorSpec::pair(
            FunctorSpec::constant(labels),
            FunctorSpec::pfin(FunctorSpec::Id),
        );
        let names: Vec<_> = modalities_for(&spec)
            .iter()
            .map(|m| m.name().to_string())
            .collect();
        assert_eq!(
            names,
            [
                "fst.@0.2",
                "fst.@~0.2",
                "fst.@0.7",
                "fst.@~0.7",
                "snd.<>",
                "snd.[]"
            ]
        );
        let at = find_modality(&spec, "fst.@0.2").unwrap();
        assert_eq!(at.arity(), 0);
        let t = FunctorElement::pair(FunctorElement::Label(1), FunctorElement::set([]));
        assert_eq!(at.eval(&t, &[]).unwrap(), s(1, 2));
        assert_eq!(at.dual().eval(&t, &[]).unwrap(), s(1, 2));
        assert_eq!(dual_name("snd.fst.@~x"), "snd.fst.@x");
        assert!(matches!(
            find_modality(&spec, "<>"),
            Err(Error::UnknownModality(_))
        ));
        assert!(matches!(at.eval(&t, &[&[]]), Err(Error::Arity { .. })));
    }
}
