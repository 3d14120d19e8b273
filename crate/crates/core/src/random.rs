//! Seeded generators for carriers, relations, functor elements and systems.
//!
//! Values are drawn from a small denominator grid so that exact arithmetic
//! stays cheap and boundary values (0 and 1) show up often.

use std::sync::Arc;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fuzzy::{Carrier, FuzzyRel, Scalar};
use crate::logic::Formula;
use crate::systems::{Coalgebra, FunctorElement, FunctorSpec};

/// Knobs for random generation.
#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Truth values are multiples of `1/denominator`.
    pub denominator: i64,
    /// Upper bound on set and distribution supports.
    pub max_support: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            denominator: 12,
            max_support: 3,
        }
    }
}

/// An independent generator per trial: trial `i` of run `seed` always sees
/// the same stream regardless of scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn scalar(rng: &mut impl Rng, cfg: &GenConfig) -> Scalar {
    let d = cfg.denominator;
    // Extra weight on the endpoints.
    let k = match rng.gen_range(0..8) {
        0 => 0,
        1 => d,
        _ => rng.gen_range(0..=d),
    };
    Scalar::ratio(k, d)
}

pub fn carrier(prefix: &str, len: usize) -> Arc<Carrier> {
    Arc::new(Carrier::numbered(prefix, len))
}

pub fn relation(
    rng: &mut impl Rng,
    source: Arc<Carrier>,
    target: Arc<Carrier>,
    cfg: &GenConfig,
) -> FuzzyRel {
    FuzzyRel::from_fn(source, target, |_, _| scalar(rng, cfg))
}

/// A random hemimetric: random entries, zero diagonal, then closed under the
/// triangle inequality with a `⊕`-Floyd–Warshall pass. With `symmetric`
/// the result is a pseudometric.
pub fn hemimetric(
    rng: &mut impl Rng,
    carrier: Arc<Carrier>,
    symmetric: bool,
    cfg: &GenConfig,
) -> FuzzyRel {
    let n = carrier.len();
    let mut d = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if symmetric && j < i {
                d[i][j] = d[j][i].clone();
            } else {
                d[i][j] = scalar(rng, cfg);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k].oplus(&d[k][j]);
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    FuzzyRel::new(carrier.clone(), carrier, d).expect("square matrix")
}

pub fn map(rng: &mut impl Rng, from: usize, to: usize) -> Vec<usize> {
    (0..from).map(|_| rng.gen_range(0..to)).collect()
}

/// A random well-typed element of `spec` over a carrier of `len` points.
/// Requires `len > 0` whenever `spec` mentions `Id`.
pub fn element(
    rng: &mut impl Rng,
    spec: &FunctorSpec,
    len: usize,
    cfg: &GenConfig,
) -> FunctorElement {
    match spec {
        FunctorSpec::Id => FunctorElement::Leaf(rng.gen_range(0..len)),
        FunctorSpec::Const(ls) => FunctorElement::Label(rng.gen_range(0..ls.labels().len())),
        FunctorSpec::PFin(sub) => {
            let k = rng.gen_range(0..=cfg.max_support);
            FunctorElement::set((0..k).map(|_| element(rng, sub, len, cfg)))
        }
        FunctorSpec::DFin(sub) => {
            let k = rng.gen_range(1..=cfg.max_support.max(1));
            let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=4)).collect();
            let total: i64 = weights.iter().sum();
            let items: Vec<_> = weights
                .iter()
                .map(|&w| {
                    let p = Scalar::new(BigRational::new(w.into(), total.into()))
                        .expect("weight share in [0,1]");
                    (element(rng, sub, len, cfg), p)
                })
                .collect();
            FunctorElement::dist(items).expect("weights sum to one")
        }
        FunctorSpec::Pair(l, r) => {
            FunctorElement::pair(element(rng, l, len, cfg), element(rng, r, len, cfg))
        }
        FunctorSpec::Maybe(sub) => {
            if rng.gen_range(0..4) == 0 {
                FunctorElement::Nothing
            } else {
                FunctorElement::just(element(rng, sub, len, cfg))
            }
        }
    }
}

/// A random coalgebra with `states` states named `{prefix}0, {prefix}1, …`.
pub fn system(
    rng: &mut impl Rng,
    functor: Arc<FunctorSpec>,
    prefix: &str,
    states: usize,
    cfg: &GenConfig,
) -> Coalgebra {
    let alpha = (0..states)
        .map(|_| element(rng, &functor, states, cfg))
        .collect();
    Coalgebra::new(functor, carrier(prefix, states), alpha)
        .expect("generated elements are well-typed")
}

/// Where the modal nodes of a random formula come from.
#[derive(Clone, Debug)]
pub enum ModalSource<'a> {
    /// Named modalities with their arities.
    Named(&'a [(String, usize)]),
    /// Moss nodes `ΔΦ` with random shapes of up to `max_support` arguments.
    Moss(&'a Arc<FunctorSpec>),
}

/// A random formula of depth at most `depth`. With `negation`, `~` nodes
/// are mixed in (only sensible for named, dual-closed modalities).
pub fn formula(
    rng: &mut impl Rng,
    depth: usize,
    modal: &ModalSource,
    negation: bool,
    cfg: &GenConfig,
) -> Arc<Formula> {
    if depth == 0 || rng.gen_range(0..6) == 0 {
        return Formula::constant(scalar(rng, cfg));
    }
    let sub = |rng: &mut _| formula(rng, depth - 1, modal, negation, cfg);
    match rng.gen_range(0..if negation { 8 } else { 7 }) {
        0 => Formula::minus(sub(rng), scalar(rng, cfg)),
        1 => Formula::plus(sub(rng), scalar(rng, cfg)),
        2 => Formula::and(sub(rng), sub(rng)),
        3 => Formula::or(sub(rng), sub(rng)),
        7 => Formula::neg(sub(rng)),
        _ => match modal {
            ModalSource::Named(names) => {
                let (name, arity) = &names[rng.gen_range(0..names.len())];
                let args = (0..*arity).map(|_| sub(rng)).collect();
                Formula::modal(name.clone(), args)
            }
            ModalSource::Moss(functor) => {
                let n = rng.gen_range(1..=cfg.max_support.max(1));
                let shape = element(rng, functor, n, cfg);
                let args = (0..n).map(|_| sub(rng)).collect();
                Formula::moss((*functor).clone(), shape, args)
                    .expect("generated shape is well-typed")
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hemimetrics_are_hemimetrics() {
        let cfg = GenConfig::default();
        for trial in 0..50 {
            let mut rng = trial_rng(7, trial);
            let n = rng.gen_range(1..=5);
            let d = hemimetric(&mut rng, carrier("x", n), trial % 2 == 0, &cfg);
            assert!(d.is_hemimetric().unwrap());
            if trial % 2 == 0 {
                assert!(d.is_pseudometric().unwrap());
            }
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let cfg = GenConfig::default();
        let spec = FunctorSpec::pfin(FunctorSpec::dfin(FunctorSpec::Id));
        let a = element(&mut trial_rng(1, 3), &spec, 4, &cfg);
        let b = element(&mut trial_rng(1, 3), &spec, 4, &cfg);
        assert_eq!(a, b);
        assert!(a.type_check(&spec, 4).is_ok());
    }
}
