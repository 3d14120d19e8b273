use std::sync::Arc;

use serde::Serialize;

use super::eval::{presentation_of, Evaluator};
use super::formula::Formula;
use crate::error::Result;
use crate::fuzzy::{FuzzyRel, Scalar};
use crate::lifting::Lifting;
use crate::systems::Coalgebra;

/// Builds distinguishing formulas `φⁿ_b` on one system:
/// `φ⁰_b = 0` and `φ^{k+1}_b = Δ(β(b)[b' ↦ φᵏ_{b'}])`.
///
/// Levels are built bottom-up and shared, so `φᵏ_b` is a single node for
/// every `(b, k)`.
pub struct Synthesizer<'a> {
    lifting: &'a Lifting,
    system: &'a Coalgebra,
    levels: Vec<Vec<Arc<Formula>>>,
}

impl<'a> Synthesizer<'a> {
    pub fn new(lifting: &'a Lifting, system: &'a Coalgebra) -> Self {
        let zero = Formula::constant(Scalar::zero());
        Synthesizer {
            lifting,
            system,
            levels: vec![vec![zero; system.len()]],
        }
    }

    pub fn formula(&mut self, target: usize, rank: usize) -> Result<Arc<Formula>> {
        while self.levels.len() <= rank {
            let prev = self.levels.last().expect("level 0 exists");
            let next = self
                .system
                .alpha()
                .iter()
                .map(|t| {
                    let p = presentation_of(t);
                    let args = p.base.iter().map(|&y| prev[y].clone()).collect();
                    Formula::moss(self.lifting.functor().clone(), p.shape, args)
                })
                .collect::<Result<Vec<_>>>()?;
            self.levels.push(next);
        }
        Ok(self.levels[rank][target].clone())
    }
}

/// `φⁿ_target` on `system`; see [`Synthesizer`].
pub fn synthesize(
    lifting: &Lifting,
    system: &Coalgebra,
    target: usize,
    rank: usize,
) -> Result<Arc<Formula>> {
    Synthesizer::new(lifting, system).formula(target, rank)
}

#[derive(Clone, Debug, Serialize)]
pub struct LogicalDistance {
    pub rank: usize,
    /// `sup {⟦φ⟧(a) ⊖ ⟦φ⟧(b) | rank φ ≤ n}` for `a` in the first system and
    /// `b` in the second.
    pub matrix: FuzzyRel,
    /// The formula attaining column `b`, over the union of the two systems.
    #[serde(skip)]
    pub witnesses: Vec<Arc<Formula>>,
    /// The union the witnesses are evaluated on.
    #[serde(skip)]
    pub union: Coalgebra,
    #[serde(skip)]
    pub left: Vec<usize>,
    #[serde(skip)]
    pub right: Vec<usize>,
}

/// Rank-`n` logical distance of quantitative Moss logic for `lifting`,
/// computed from synthesized witnesses on `A ⊎ B`: entry `(a, b)` is
/// `⟦φⁿ_b⟧(a) ⊖ ⟦φⁿ_b⟧(b)`.
pub fn logical_distance(
    lifting: &Lifting,
    a: &Coalgebra,
    b: &Coalgebra,
    rank: usize,
) -> Result<LogicalDistance> {
    let u = a.disjoint_union(b)?;
    let mut synth = Synthesizer::new(lifting, &u.system);
    let witnesses = u
        .right
        .iter()
        .map(|&y| synth.formula(y, rank))
        .collect::<Result<Vec<_>>>()?;
    let mut ev = Evaluator::with_lifting(&u.system, lifting);
    let mut rows = vec![Vec::with_capacity(b.len()); a.len()];
    for (j, phi) in witnesses.iter().enumerate() {
        let table = ev.table(phi)?;
        let at_b = &table[u.right[j]];
        for (i, row) in rows.iter_mut().enumerate() {
            row.push(table[u.left[i]].ominus(at_b));
        }
    }
    let matrix = FuzzyRel::new(a.carrier().clone(), b.carrier().clone(), rows)?;
    Ok(LogicalDistance {
        rank,
        matrix,
        witnesses,
        union: u.system,
        left: u.left,
        right: u.right,
    })
}
