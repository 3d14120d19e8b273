use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::formula::Formula;
use crate::error::{Error, Result};
use crate::fuzzy::Scalar;
use crate::lifting::{find_modality, Lifting};
use crate::systems::{apply_map, Coalgebra, FunctorElement, FunctorSpec};

/// A finite presentation of an element: `t = T(i ↦ base[i])(shape)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    /// The element with leaves renamed to positions in `base`.
    pub shape: FunctorElement,
    /// Distinct leaves of the element in first-occurrence order.
    pub base: Vec<usize>,
}

impl Presentation {
    pub fn arity(&self) -> usize {
        self.base.len()
    }

    /// Substitutes `base` back into `shape`.
    pub fn instantiate(&self, functor: &FunctorSpec) -> Result<FunctorElement> {
        apply_map(functor, &self.base, &self.shape)
    }
}

pub fn presentation_of(t: &FunctorElement) -> Presentation {
    let base = t.base();
    let mut position = HashMap::with_capacity(base.len());
    for (i, &x) in base.iter().enumerate() {
        position.insert(x, i);
    }
    Presentation {
        shape: t.map_leaves(&|x| position[&x]),
        base,
    }
}

/// The Moss modality of `shape` applied to predicate tables:
/// `L∈(t, T(i ↦ args[i])(shape))`, computed as `LE(t, shape)` with the finite
/// elementhood matrix `E(x, i) = args[i](x)`.
pub fn moss_eval(
    l: &Lifting,
    shape: &FunctorElement,
    args: &[&[Scalar]],
    t: &FunctorElement,
) -> Result<Scalar> {
    shape.type_check(l.functor(), args.len())?;
    let e = |x: usize, i: usize| args[i][x].clone();
    l.lift(&e, t, shape)
}

/// Evaluates formulas on every state of one system at once, memoizing on
/// node identity so that shared subformulas are computed once.
pub struct Evaluator<'a> {
    system: &'a Coalgebra,
    lifting: Option<&'a Lifting>,
    // The formula is kept alive so its address cannot be reused.
    memo: HashMap<usize, (Arc<Formula>, Arc<Vec<Scalar>>)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(system: &'a Coalgebra) -> Self {
        Evaluator {
            system,
            lifting: None,
            memo: HashMap::new(),
        }
    }

    /// An evaluator that also interprets Moss formulas through `lifting`.
    pub fn with_lifting(system: &'a Coalgebra, lifting: &'a Lifting) -> Self {
        Evaluator {
            lifting: Some(lifting),
            ..Evaluator::new(system)
        }
    }

    pub fn eval(&mut self, f: &Arc<Formula>, state: usize) -> Result<Scalar> {
        Ok(self.table(f)?[state].clone())
    }

    /// `⟦f⟧` as a table indexed by state.
    pub fn table(&mut self, f: &Arc<Formula>) -> Result<Arc<Vec<Scalar>>> {
        let key = Arc::as_ptr(f) as usize;
        if let Some((_, t)) = self.memo.get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(self.compute(f)?);
        self.memo.insert(key, (f.clone(), t.clone()));
        Ok(t)
    }

    fn compute(&mut self, f: &Arc<Formula>) -> Result<Vec<Scalar>> {
        let n = self.system.len();
        Ok(match &**f {
            Formula::Const(c) => vec![c.clone(); n],
            Formula::MinusC(g, c) => self.table(g)?.iter().map(|x| x.ominus(c)).collect(),
            Formula::PlusC(g, c) => self.table(g)?.iter().map(|x| x.oplus(c)).collect(),
            Formula::And(l, r) => {
                let (l, r) = (self.table(l)?, self.table(r)?);
                l.iter()
                    .zip(r.iter())
                    .map(|(x, y)| x.min(y).clone())
                    .collect()
            }
            Formula::Or(l, r) => {
                let (l, r) = (self.table(l)?, self.table(r)?);
                l.iter()
                    .zip(r.iter())
                    .map(|(x, y)| x.max(y).clone())
                    .collect()
            }
            Formula::Neg(_) => {
                let g = Formula::negation_normal_form(f)?;
                return Ok(self.table(&g)?.to_vec());
            }
            Formula::Modal { name, args } => {
                let m = find_modality(self.system.functor(), name)?;
                if m.arity() != args.len() {
                    return Err(Error::Arity {
                        name: name.clone(),
                        expected: m.arity(),
                        found: args.len(),
                    });
                }
                let tables = args
                    .iter()
                    .map(|a| self.table(a))
                    .collect::<Result<Vec<_>>>()?;
                let slices: Vec<&[Scalar]> = tables.iter().map(|t| t.as_slice()).collect();
                self.system
                    .alpha()
                    .iter()
                    .map(|t| m.eval(t, &slices))
                    .collect::<Result<_>>()?
            }
            Formula::MossDelta {
                functor,
                shape,
                args,
            } => {
                let l = self.lifting.ok_or_else(|| {
                    Error::Unsupported("Moss formulas need a lifting to evaluate".into())
                })?;
                if functor != self.system.functor() || functor != l.functor() {
                    return Err(Error::Shape(format!(
                        "Moss formula over {functor} evaluated on a system over {}",
                        self.system.functor()
                    )));
                }
                let tables = args
                    .iter()
                    .map(|a| self.table(a))
                    .collect::<Result<Vec<_>>>()?;
                let slices: Vec<&[Scalar]> = tables.iter().map(|t| t.as_slice()).collect();
                self.system
                    .alpha()
                    .par_iter()
                    .map(|t| moss_eval(l, shape, &slices, t))
                    .collect::<Result<_>>()?
            }
        })
    }
}

/// `⟦f⟧(state)` without Moss support.
pub fn eval(f: &Arc<Formula>, system: &Coalgebra, state: usize) -> Result<Scalar> {
    Evaluator::new(system).eval(f, state)
}
