//! Randomized checker for the lax-extension axioms and derived laws.
//!
//! Each trial draws small carriers, relations and functor elements from its
//! own seeded stream, so reports are reproducible and independent of thread
//! scheduling. The first failing trial of every property is shrunk and
//! serialized.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::lift::Lifting;
use crate::error::Result;
use crate::fuzzy::{Carrier, FuzzyRel, Scalar};
use crate::random::{self, GenConfig};
use crate::systems::{element_to_json, FunctorElement};

#[derive(Clone, Debug)]
pub struct AxiomConfig {
    pub trials: usize,
    /// Carriers have between 1 and `max_carrier` points.
    pub max_carrier: usize,
    pub seed: u64,
    pub gen: GenConfig,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        AxiomConfig {
            trials: 500,
            max_carrier: 5,
            seed: 0,
            gen: GenConfig::default(),
        }
    }
}

/// The properties checked, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Property {
    /// `L(R⌣) = (LR)⌣`.
    #[serde(rename = "L0")]
    L0,
    /// `R1 ≤ R2 ⇒ LR1 ≤ LR2`.
    #[serde(rename = "L1")]
    L1,
    /// `L(R;S) ≤ LR;LS`, at a sampled middle element.
    #[serde(rename = "L2")]
    L2,
    /// `L gr f ≤ gr Tf` and `L(gr f⌣) ≤ (gr Tf)⌣`.
    #[serde(rename = "L3")]
    L3,
    /// `LΔ_ε ≤ Δ_ε`.
    #[serde(rename = "L4")]
    L4,
    /// `L(R∘(f×g)) = LR∘(Tf×Tg)`.
    #[serde(rename = "naturality")]
    Naturality,
    /// `Ld` is a hemimetric whenever `d` is.
    #[serde(rename = "hemimetric")]
    Hemimetric,
    /// `Ld` is symmetric whenever `d` is a pseudometric.
    #[serde(rename = "pseudometric")]
    Pseudometric,
    /// `|LR1 - LR2| ≤ sup |R1 - R2|`.
    #[serde(rename = "nonexpansive")]
    Nonexpansive,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::L0,
        Property::L1,
        Property::L2,
        Property::L3,
        Property::L4,
        Property::Naturality,
        Property::Hemimetric,
        Property::Pseudometric,
        Property::Nonexpansive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::L0 => "L0",
            Property::L1 => "L1",
            Property::L2 => "L2",
            Property::L3 => "L3",
            Property::L4 => "L4",
            Property::Naturality => "naturality",
            Property::Hemimetric => "hemimetric",
            Property::Pseudometric => "pseudometric",
            Property::Nonexpansive => "nonexpansive",
        }
    }

    /// Converse preservation and its consequence for pseudometrics are not
    /// part of the lax-extension axioms proper.
    pub fn is_core(self) -> bool {
        !matches!(self, Property::L0 | Property::Pseudometric)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub property: Property,
    pub checked: usize,
    pub failures: usize,
    /// Trial index of the first failure.
    pub first_failure: Option<usize>,
    pub counterexample: Option<Value>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub lifting: String,
    pub functor: String,
    pub seed: u64,
    pub trials: usize,
    pub properties: Vec<PropertyReport>,
}

impl AxiomReport {
    pub fn get(&self, p: Property) -> &PropertyReport {
        self.properties
            .iter()
            .find(|r| r.property == p)
            .expect("every property is reported")
    }

    pub fn passed(&self, p: Property) -> bool {
        self.get(p).passed()
    }

    /// (L1)–(L4), naturality, hemimetric preservation and nonexpansiveness.
    pub fn core_passed(&self) -> bool {
        self.properties
            .iter()
            .filter(|r| r.property.is_core())
            .all(PropertyReport::passed)
    }

    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(PropertyReport::passed)
    }
}

/// One randomly drawn instance. `sizes` are carrier sizes; relations,
/// elements and maps refer to carriers by index into `sizes`.
#[derive(Clone, Debug)]
struct Case {
    sizes: Vec<usize>,
    rels: Vec<FuzzyRel>,
    elems: Vec<(usize, FunctorElement)>,
    maps: Vec<Vec<usize>>,
    eps: Scalar,
}

/// `lhs op rhs` failed.
#[derive(Clone, Debug)]
struct Violation {
    claim: &'static str,
    lhs: Scalar,
    rhs: Scalar,
}

fn violated(claim: &'static str, lhs: Scalar, rhs: Scalar, holds: bool) -> Option<Violation> {
    (!holds).then_some(Violation { claim, lhs, rhs })
}

pub fn check_axioms(lifting: &Lifting, cfg: &AxiomConfig) -> Result<AxiomReport> {
    let per_trial: Vec<Vec<Option<(Case, Violation)>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = random::trial_rng(cfg.seed, trial as u64);
            Property::ALL
                .iter()
                .map(|&p| {
                    let case = generate(p, lifting, cfg, &mut rng);
                    Ok(check(p, lifting, &case)?.map(|v| (case, v)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut properties = Vec::new();
    for (k, &p) in Property::ALL.iter().enumerate() {
        let failing: Vec<usize> = (0..cfg.trials)
            .filter(|&t| per_trial[t][k].is_some())
            .collect();
        let counterexample = match failing.first() {
            Some(&t) => {
                let (case, violation) = per_trial[t][k].clone().expect("failing trial has a case");
                let (case, violation) = shrink(p, lifting, case, violation)?;
                Some(describe(lifting, &case, &violation))
            }
            None => None,
        };
        properties.push(PropertyReport {
            property: p,
            checked: cfg.trials,
            failures: failing.len(),
            first_failure: failing.first().copied(),
            counterexample,
        });
    }
    Ok(AxiomReport {
        lifting: lifting.spec().to_string(),
        functor: lifting.functor().to_string(),
        seed: cfg.seed,
        trials: cfg.trials,
        properties,
    })
}

fn carrier_of(sizes: &[usize], index: usize) -> Arc<Carrier> {
    random::carrier(&format!("c{index}."), sizes[index])
}

fn generate(p: Property, lifting: &Lifting, cfg: &AxiomConfig, rng: &mut ChaCha8Rng) -> Case {
    let functor = lifting.functor().clone();
    let g = &cfg.gen;
    let size = |rng: &mut ChaCha8Rng| rng.gen_range(1..=cfg.max_carrier.max(1));
    let elem = |rng: &mut ChaCha8Rng, sizes: &[usize], c: usize| {
        (c, random::element(rng, &functor, sizes[c], g))
    };
    let rel = |rng: &mut ChaCha8Rng, sizes: &[usize], a: usize, b: usize| {
        random::relation(rng, carrier_of(sizes, a), carrier_of(sizes, b), g)
    };
    let mut case = Case {
        sizes: Vec::new(),
        rels: Vec::new(),
        elems: Vec::new(),
        maps: Vec::new(),
        eps: Scalar::zero(),
    };
    match p {
        Property::L0 | Property::L1 | Property::Nonexpansive => {
            case.sizes = vec![size(rng), size(rng)];
            let r1 = rel(rng, &case.sizes, 0, 1);
            if p == Property::L1 {
                let r2 = r1.map_values(|v| {
                    if rng.gen_bool(0.5) {
                        let w = random::scalar(rng, g);
                        v.clone().max(w)
                    } else {
                        v.clone()
                    }
                });
                case.rels = vec![r1, r2];
            } else if p == Property::Nonexpansive {
                let r2 = rel(rng, &case.sizes, 0, 1);
                case.rels = vec![r1, r2];
            } else {
                case.rels = vec![r1];
            }
            case.elems = vec![elem(rng, &case.sizes, 0), elem(rng, &case.sizes, 1)];
        }
        Property::L2 => {
            case.sizes = vec![size(rng), size(rng), size(rng)];
            case.rels = vec![rel(rng, &case.sizes, 0, 1), rel(rng, &case.sizes, 1, 2)];
            case.elems = vec![
                elem(rng, &case.sizes, 0),
                elem(rng, &case.sizes, 1),
                elem(rng, &case.sizes, 2),
            ];
        }
        Property::L3 => {
            case.sizes = vec![size(rng), size(rng)];
            case.maps = vec![random::map(rng, case.sizes[0], case.sizes[1])];
            case.elems = vec![elem(rng, &case.sizes, 0)];
        }
        Property::L4 => {
            case.sizes = vec![size(rng)];
            case.eps = random::scalar(rng, g);
            case.elems = vec![elem(rng, &case.sizes, 0)];
        }
        Property::Naturality => {
            // Carriers: A', B', A, B.
            case.sizes = vec![size(rng), size(rng), size(rng), size(rng)];
            case.maps = vec![
                random::map(rng, case.sizes[0], case.sizes[2]),
                random::map(rng, case.sizes[1], case.sizes[3]),
            ];
            case.rels = vec![rel(rng, &case.sizes, 2, 3)];
            case.elems = vec![elem(rng, &case.sizes, 0), elem(rng, &case.sizes, 1)];
        }
        Property::Hemimetric | Property::Pseudometric => {
            case.sizes = vec![size(rng)];
            let symmetric = p == Property::Pseudometric;
            case.rels = vec![random::hemimetric(
                rng,
                carrier_of(&case.sizes, 0),
                symmetric,
                g,
            )];
            case.elems = (0..3).map(|_| elem(rng, &case.sizes, 0)).collect();
        }
    }
    case
}

fn check(p: Property, l: &Lifting, case: &Case) -> Result<Option<Violation>> {
    let t = |i: usize| &case.elems[i].1;
    Ok(match p {
        Property::L0 => {
            let r = &case.rels[0];
            let lhs = l.lift(&r.converse(), t(1), t(0))?;
            let rhs = l.lift(r, t(0), t(1))?;
            let eq = lhs == rhs;
            violated("L(R⌣)(t2,t1) = LR(t1,t2)", lhs, rhs, eq)
        }
        Property::L1 => {
            let (r1, r2) = (&case.rels[0], &case.rels[1]);
            if !r1.is_below(r2)? {
                return Ok(None);
            }
            let lhs = l.lift(r1, t(0), t(1))?;
            let rhs = l.lift(r2, t(0), t(1))?;
            let ok = lhs <= rhs;
            violated("LR1(t1,t2) ≤ LR2(t1,t2) for R1 ≤ R2", lhs, rhs, ok)
        }
        Property::L2 => {
            let (r, s) = (&case.rels[0], &case.rels[1]);
            let rs = r.compose(s)?;
            let lhs = l.lift(&rs, t(0), t(2))?;
            let rhs = l.lift(r, t(0), t(1))?.oplus(&l.lift(s, t(1), t(2))?);
            let ok = lhs <= rhs;
            violated("L(R;S)(t1,t3) ≤ LR(t1,t2) ⊕ LS(t2,t3)", lhs, rhs, ok)
        }
        Property::L3 => {
            let f = &case.maps[0];
            let (a, b) = (carrier_of(&case.sizes, 0), carrier_of(&case.sizes, 1));
            let gr = FuzzyRel::graph(f, a, b, Scalar::zero())?;
            let image = t(0).map_leaves(&|x| f[x]);
            let forward = l.lift(&gr, t(0), &image)?;
            if !forward.is_zero() {
                return Ok(violated(
                    "L gr f(t, Tf t) = 0",
                    forward,
                    Scalar::zero(),
                    false,
                ));
            }
            let backward = l.lift(&gr.converse(), &image, t(0))?;
            violated(
                "L(gr f⌣)(Tf t, t) = 0",
                backward.clone(),
                Scalar::zero(),
                backward.is_zero(),
            )
        }
        Property::L4 => {
            let diag = FuzzyRel::eps_diagonal(carrier_of(&case.sizes, 0), case.eps.clone());
            let lhs = l.lift(&diag, t(0), t(0))?;
            let ok = lhs <= case.eps;
            violated("LΔ_ε(t,t) ≤ ε", lhs, case.eps.clone(), ok)
        }
        Property::Naturality => {
            let (f, g) = (&case.maps[0], &case.maps[1]);
            let r = &case.rels[0];
            let pulled =
                r.pullback(f, carrier_of(&case.sizes, 0), g, carrier_of(&case.sizes, 1))?;
            let lhs = l.lift(&pulled, t(0), t(1))?;
            let rhs = l.lift(r, &t(0).map_leaves(&|x| f[x]), &t(1).map_leaves(&|y| g[y]))?;
            let eq = lhs == rhs;
            violated("L(R∘(f×g))(t1,t2) = LR(Tf t1, Tg t2)", lhs, rhs, eq)
        }
        Property::Hemimetric => {
            let d = &case.rels[0];
            if !d.is_hemimetric()? {
                return Ok(None);
            }
            let refl = l.lift(d, t(0), t(0))?;
            if !refl.is_zero() {
                return Ok(violated("Ld(t,t) = 0", refl, Scalar::zero(), false));
            }
            let lhs = l.lift(d, t(0), t(2))?;
            let rhs = l.lift(d, t(0), t(1))?.oplus(&l.lift(d, t(1), t(2))?);
            let ok = lhs <= rhs;
            violated("Ld(t1,t3) ≤ Ld(t1,t2) ⊕ Ld(t2,t3)", lhs, rhs, ok)
        }
        Property::Pseudometric => {
            let d = &case.rels[0];
            if !d.is_pseudometric()? {
                return Ok(None);
            }
            let lhs = l.lift(d, t(0), t(1))?;
            let rhs = l.lift(d, t(1), t(0))?;
            let eq = lhs == rhs;
            violated("Ld(t1,t2) = Ld(t2,t1) for a pseudometric d", lhs, rhs, eq)
        }
        Property::Nonexpansive => {
            let (r1, r2) = (&case.rels[0], &case.rels[1]);
            let gap = l.lift(r1, t(0), t(1))?.abs_diff(&l.lift(r2, t(0), t(1))?);
            let bound = r1.sup_distance(r2)?;
            let ok = gap <= bound;
            violated("|LR1 - LR2|(t1,t2) ≤ sup |R1 - R2|", gap, bound, ok)
        }
    })
}

/// Greedy shrinking: push relation entries to 0 or 1 and simplify elements
/// while the property keeps failing.
fn shrink(
    p: Property,
    l: &Lifting,
    mut case: Case,
    mut violation: Violation,
) -> Result<(Case, Violation)> {
    for _round in 0..32 {
        let mut improved = false;
        for ri in 0..case.rels.len() {
            let (rows, cols) = (case.rels[ri].source().len(), case.rels[ri].target().len());
            for a in 0..rows {
                for b in 0..cols {
                    for v in [Scalar::one(), Scalar::zero()] {
                        if case.rels[ri].get(a, b) == &v {
                            continue;
                        }
                        let mut candidate = case.clone();
                        candidate.rels[ri].set(a, b, v);
                        if let Some(found) = check(p, l, &candidate)? {
                            case = candidate;
                            violation = found;
                            improved = true;
                            break;
                        }
                    }
                }
            }
        }
        for ei in 0..case.elems.len() {
            for simpler in simplifications(&case.elems[ei].1) {
                let mut candidate = case.clone();
                candidate.elems[ei].1 = simpler;
                if let Some(found) = check(p, l, &candidate)? {
                    case = candidate;
                    violation = found;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Ok((case, violation))
}

/// Strictly smaller variants of `t` of the same type.
fn simplifications(t: &FunctorElement) -> Vec<FunctorElement> {
    use FunctorElement as E;
    match t {
        E::Leaf(x) if *x > 0 => vec![E::Leaf(0)],
        E::Label(x) if *x > 0 => vec![E::Label(0)],
        E::Leaf(_) | E::Label(_) | E::Nothing => vec![],
        E::Set(items) => {
            let mut out: Vec<E> = (0..items.len())
                .map(|i| {
                    E::set(
                        items
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != i)
                            .map(|(_, x)| x.clone()),
                    )
                })
                .collect();
            for (i, item) in items.iter().enumerate() {
                for s in simplifications(item) {
                    let mut v = items.clone();
                    v[i] = s;
                    out.push(E::set(v));
                }
            }
            out
        }
        E::Dist(items) => {
            let mut out = Vec::new();
            for (i, (item, _)) in items.iter().enumerate() {
                for s in simplifications(item) {
                    let mut v = items.clone();
                    v[i].0 = s;
                    out.push(E::dist(v).expect("mass unchanged"));
                }
            }
            out
        }
        E::Pair(a, b) => {
            let mut out: Vec<E> = simplifications(a)
                .into_iter()
                .map(|s| E::pair(s, (**b).clone()))
                .collect();
            out.extend(
                simplifications(b)
                    .into_iter()
                    .map(|s| E::pair((**a).clone(), s)),
            );
            out
        }
        E::Just(x) => {
            let mut out = vec![E::Nothing];
            out.extend(simplifications(x).into_iter().map(E::just));
            out
        }
    }
}

fn describe(l: &Lifting, case: &Case, v: &Violation) -> Value {
    let functor = l.functor();
    let leaf = |x: usize| json!(x);
    json!({
        "claim": v.claim,
        "lhs": v.lhs,
        "rhs": v.rhs,
        "carrier_sizes": case.sizes,
        "relations": case.rels.iter().map(FuzzyRel::rows).collect::<Vec<_>>(),
        "elements": case.elems.iter().map(|(c, t)| json!({"carrier": c, "value": element_to_json(functor, t, &leaf)})).collect::<Vec<_>>(),
        "maps": case.maps,
        "eps": case.eps,
    })
}

/// Convenience for binding and checking in one go.
pub fn check_spec(
    spec: super::LiftingSpec,
    functor: Arc<crate::systems::FunctorSpec>,
    cfg: &AxiomConfig,
) -> Result<AxiomReport> {
    check_axioms(&Lifting::bind(spec, functor)?, cfg)
}
