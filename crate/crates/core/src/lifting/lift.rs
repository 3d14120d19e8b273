use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use super::modality::{find_modality, PredicateLifting};
use super::spec::{HausdorffVariant, LiftingSpec, PairMode};
use super::transport;
use crate::error::{Error, Result};
use crate::fuzzy::{companion_of, RelationView, Scalar};
use crate::systems::{FunctorElement, FunctorSpec};

/// A [`LiftingSpec`] checked against the functor it lifts along.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lifting {
    spec: LiftingSpec,
    functor: Arc<FunctorSpec>,
}

impl Lifting {
    pub fn bind(spec: LiftingSpec, functor: Arc<FunctorSpec>) -> Result<Self> {
        check_shape(&spec, &functor, "$")?;
        Ok(Lifting { spec, functor })
    }

    pub fn spec(&self) -> &LiftingSpec {
        &self.spec
    }

    pub fn functor(&self) -> &Arc<FunctorSpec> {
        &self.functor
    }

    /// `LR(t1, t2)`. `t1` and `t2` must be well-typed elements; their leaves
    /// index the source and target of `r`.
    pub fn lift<R: RelationView + ?Sized>(
        &self,
        r: &R,
        t1: &FunctorElement,
        t2: &FunctorElement,
    ) -> Result<Scalar> {
        lift_node(&self.spec, &self.functor, r, t1, t2)
    }

    /// Contraction factor of the fixpoint map; see
    /// [`LiftingSpec::contraction_factor`].
    pub fn contraction_factor(&self) -> Scalar {
        self.spec.contraction_factor()
    }
}

fn check_shape(spec: &LiftingSpec, functor: &FunctorSpec, path: &str) -> Result<()> {
    let mismatch = || {
        Error::Shape(format!(
            "at {path}: `{}` lifting cannot lift along {functor}",
            spec.kind()
        ))
    };
    match (spec, functor) {
        (LiftingSpec::Id, FunctorSpec::Id) | (LiftingSpec::Const, FunctorSpec::Const(_)) => Ok(()),
        (LiftingSpec::Hausdorff { sub, .. }, FunctorSpec::PFin(f)) => {
            check_shape(sub, f, &format!("{path}.sub"))
        }
        (LiftingSpec::KantorovichD(sub) | LiftingSpec::WassersteinD(sub), FunctorSpec::DFin(f)) => {
            check_shape(sub, f, &format!("{path}.sub"))
        }
        (LiftingSpec::Maybe(sub), FunctorSpec::Maybe(f)) => {
            check_shape(sub, f, &format!("{path}.sub"))
        }
        (LiftingSpec::PairCombine { left, right, .. }, FunctorSpec::Pair(fl, fr)) => {
            check_shape(left, fl, &format!("{path}.left"))?;
            check_shape(right, fr, &format!("{path}.right"))
        }
        (LiftingSpec::Discount { sub, .. }, f) => check_shape(sub, f, &format!("{path}.sub")),
        (LiftingSpec::KantorovichGeneric { modalities, .. }, f) => {
            if modalities.is_empty() {
                return Err(Error::Shape(format!("at {path}: no modalities given")));
            }
            for name in modalities {
                let m = find_modality(f, name)?;
                if !m.is_monotone() || !m.is_nonexpansive() {
                    return Err(Error::Unsupported(format!(
                        "modality `{name}` is not monotone and nonexpansive; the grid search would be unsound"
                    )));
                }
            }
            Ok(())
        }
        _ => Err(mismatch()),
    }
}

fn ill_typed(t1: &FunctorElement, t2: &FunctorElement, functor: &FunctorSpec) -> Error {
    Error::Shape(format!(
        "elements {t1:?} and {t2:?} do not both belong to {functor}"
    ))
}

pub(crate) fn lift_node<R: RelationView + ?Sized>(
    spec: &LiftingSpec,
    functor: &FunctorSpec,
    r: &R,
    t1: &FunctorElement,
    t2: &FunctorElement,
) -> Result<Scalar> {
    use FunctorElement as E;
    match (spec, functor) {
        (LiftingSpec::Discount { factor, sub }, f) => {
            Ok(factor.mul(&lift_node(sub, f, r, t1, t2)?))
        }
        (LiftingSpec::KantorovichGeneric { modalities, grid }, f) => {
            generic_kantorovich(modalities, grid, f, r, t1, t2)
        }
        (LiftingSpec::Id, FunctorSpec::Id) => match (t1, t2) {
            (E::Leaf(a), E::Leaf(b)) => Ok(r.value(*a, *b)),
            _ => Err(ill_typed(t1, t2, functor)),
        },
        (LiftingSpec::Const, FunctorSpec::Const(ls)) => match (t1, t2) {
            (E::Label(a), E::Label(b)) => Ok(ls.distance(*a, *b).clone()),
            _ => Err(ill_typed(t1, t2, functor)),
        },
        (LiftingSpec::Hausdorff { variant, sub }, FunctorSpec::PFin(f)) => match (t1, t2) {
            (E::Set(u), E::Set(v)) => {
                let cost = cost_matrix(sub, f, r, u.iter(), v.iter())?;
                Ok(hausdorff(*variant, &cost, u.len(), v.len()))
            }
            _ => Err(ill_typed(t1, t2, functor)),
        },
        (LiftingSpec::WassersteinD(sub) | LiftingSpec::KantorovichD(sub), FunctorSpec::DFin(f)) => {
            match (t1, t2) {
                (E::Dist(mu), E::Dist(nu)) => {
                    let cost = cost_matrix(
                        sub,
                        f,
                        r,
                        mu.iter().map(|(x, _)| x),
                        nu.iter().map(|(y, _)| y),
                    )?;
                    let supply: Vec<BigRational> =
                        mu.iter().map(|(_, p)| p.as_rational().clone()).collect();
                    let demand: Vec<BigRational> =
                        nu.iter().map(|(_, p)| p.as_rational().clone()).collect();
                    let cost_q: Vec<Vec<BigRational>> = cost
                        .iter()
                        .map(|row| row.iter().map(|c| c.as_rational().clone()).collect())
                        .collect();
                    let sol = transport::solve(&supply, &demand, &cost_q);
                    if matches!(spec, LiftingSpec::WassersteinD(_)) {
                        Ok(Scalar::new(sol.value)
                            .expect("transport cost of [0,1] costs lies in [0,1]"))
                    } else {
                        Ok(dual_value(&supply, &demand, &cost, &sol))
                    }
                }
                _ => Err(ill_typed(t1, t2, functor)),
            }
        }
        (LiftingSpec::Maybe(sub), FunctorSpec::Maybe(f)) => match (t1, t2) {
            (E::Nothing, E::Nothing) => Ok(Scalar::zero()),
            (E::Nothing, E::Just(_)) | (E::Just(_), E::Nothing) => Ok(Scalar::one()),
            (E::Just(x), E::Just(y)) => lift_node(sub, f, r, x, y),
            _ => Err(ill_typed(t1, t2, functor)),
        },
        (LiftingSpec::PairCombine { mode, left, right }, FunctorSpec::Pair(fl, fr)) => {
            match (t1, t2) {
                (E::Pair(a1, b1), E::Pair(a2, b2)) => {
                    let l = lift_node(left, fl, r, a1, a2)?;
                    let rv = lift_node(right, fr, r, b1, b2)?;
                    Ok(match mode {
                        PairMode::WeightedSum(w1, w2) => Scalar::clamp(
                            w1.as_rational() * l.as_rational()
                                + w2.as_rational() * rv.as_rational(),
                        ),
                        PairMode::Max => l.max(rv),
                        PairMode::Sum => l.oplus(&rv),
                    })
                }
                _ => Err(ill_typed(t1, t2, functor)),
            }
        }
        _ => Err(Error::Shape(format!(
            "`{}` lifting cannot lift along {functor}",
            spec.kind()
        ))),
    }
}

fn cost_matrix<'a, R: RelationView + ?Sized>(
    sub: &LiftingSpec,
    functor: &FunctorSpec,
    r: &R,
    us: impl Iterator<Item = &'a FunctorElement>,
    vs: impl Iterator<Item = &'a FunctorElement> + Clone,
) -> Result<Vec<Vec<Scalar>>> {
    us.map(|u| {
        vs.clone()
            .map(|v| lift_node(sub, functor, r, u, v))
            .collect()
    })
    .collect()
}

/// Hausdorff terms on a precomputed cost matrix, with `sup ∅ = 0` and
/// `inf ∅ = 1`.
fn hausdorff(variant: HausdorffVariant, cost: &[Vec<Scalar>], m: usize, n: usize) -> Scalar {
    let left = || {
        (0..m)
            .map(|i| {
                (0..n)
                    .map(|j| cost[i][j].clone())
                    .min()
                    .unwrap_or_else(Scalar::one)
            })
            .max()
            .unwrap_or_else(Scalar::zero)
    };
    let right = || {
        (0..n)
            .map(|j| {
                (0..m)
                    .map(|i| cost[i][j].clone())
                    .min()
                    .unwrap_or_else(Scalar::one)
            })
            .max()
            .unwrap_or_else(Scalar::zero)
    };
    match variant {
        HausdorffVariant::Left => left(),
        HausdorffVariant::Right => right(),
        HausdorffVariant::Sym => left().max(right()),
    }
}

/// Kantorovich value from the optimal dual potentials: `f = u`, `g = -v`,
/// tightened by a double c-transform and shifted into `[0,1]`, giving an
/// `R`-nonexpansive pair whose expectation gap is the optimum.
fn dual_value(
    supply: &[BigRational],
    demand: &[BigRational],
    cost: &[Vec<Scalar>],
    sol: &transport::TransportSolution,
) -> Scalar {
    let (m, n) = (supply.len(), demand.len());
    let c = |i: usize, j: usize| cost[i][j].as_rational();
    let g0: Vec<BigRational> = sol.v.iter().map(|v| -v).collect();
    let f1: Vec<BigRational> = (0..m)
        .map(|i| {
            (0..n)
                .map(|j| c(i, j) + &g0[j])
                .min()
                .expect("nonempty support")
        })
        .collect();
    let g1: Vec<BigRational> = (0..n)
        .map(|j| {
            (0..m)
                .map(|i| &f1[i] - c(i, j))
                .max()
                .expect("nonempty support")
        })
        .collect();
    let shift = BigRational::one() - f1.iter().max().expect("nonempty support");
    let f: Vec<Scalar> = f1
        .iter()
        .map(|x| Scalar::new(x + &shift).expect("c-transform has oscillation at most 1"))
        .collect();
    let g: Vec<Scalar> = g1
        .iter()
        .map(|y| Scalar::new(y + &shift).expect("c-transform stays within one of its maximum"))
        .collect();
    debug_assert!(crate::fuzzy::NonexpansivePair::new(
        &|i: usize, j: usize| cost[i][j].clone(),
        f.clone(),
        g.clone()
    )
    .is_ok());
    let ef: BigRational = supply
        .iter()
        .zip(&f)
        .map(|(p, x)| p * x.as_rational())
        .sum();
    let eg: BigRational = demand
        .iter()
        .zip(&g)
        .map(|(p, y)| p * y.as_rational())
        .sum();
    Scalar::clamp(ef - eg)
}

/// Largest leaf position mentioned, plus one.
fn table_len(t: &FunctorElement) -> usize {
    t.base().into_iter().max().map_or(0, |x| x + 1)
}

fn generic_kantorovich<R: RelationView + ?Sized>(
    modalities: &[String],
    grid: &Scalar,
    functor: &FunctorSpec,
    r: &R,
    t1: &FunctorElement,
    t2: &FunctorElement,
) -> Result<Scalar> {
    let mods: Vec<PredicateLifting> = modalities
        .iter()
        .map(|name| find_modality(functor, name))
        .collect::<Result<_>>()?;
    let base1 = t1.base();
    let base2 = t2.base();
    let (n1, n2) = (table_len(t1), table_len(t2));
    let steps: usize = grid
        .as_rational()
        .recip()
        .to_integer()
        .try_into()
        .map_err(|_| Error::Unsupported("grid too fine".into()))?;
    let levels: Vec<Scalar> = (0..=steps)
        .map(|k| {
            Scalar::new(BigRational::from_integer(k.into()) * grid.as_rational())
                .expect("grid point in [0,1]")
        })
        .collect();

    let mut best = Scalar::zero();
    for m in &mods {
        if m.arity() == 0 {
            best = best.max(m.eval(t1, &[])?.ominus(&m.eval(t2, &[])?));
            continue;
        }
        let mut digits = vec![0usize; base1.len()];
        loop {
            let mut f = vec![Scalar::zero(); n1];
            for (a, &k) in base1.iter().zip(&digits) {
                f[*a] = levels[k].clone();
            }
            let sub = |a: usize, b: usize| r.value(base1[a], b);
            let f_base: Vec<Scalar> = base1.iter().map(|&a| f[a].clone()).collect();
            let comp = companion_of(&sub, &f_base, n2);
            let mut g = vec![Scalar::zero(); n2];
            for &b in &base2 {
                g[b] = comp[b].clone();
            }
            best = best.max(m.eval(t1, &[&f])?.ominus(&m.eval(t2, &[&g])?));
            if !advance(&mut digits, steps) {
                break;
            }
        }
    }
    Ok(best)
}

/// Odometer over `{0..=top}^len`; false once it wraps around.
fn advance(digits: &mut [usize], top: usize) -> bool {
    for d in digits.iter_mut() {
        if *d < top {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

/// `|grid value − K_Λ value| ≤ δ` whenever every modality is nonexpansive.
pub fn kantorovich_grid_error_bound(
    modalities: &[PredicateLifting],
    grid: &Scalar,
) -> Result<Scalar> {
    if let Some(m) = modalities.iter().find(|m| !m.is_nonexpansive()) {
        return Err(Error::Unsupported(format!(
            "modality `{}` is not nonexpansive, so snapping to the grid has no error bound",
            m.name()
        )));
    }
    Ok(grid.clone())
}
