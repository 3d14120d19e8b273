//! Behavioural distance by Kleene iteration, and certificate checking.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fuzzy::{format_rational, Carrier, FuzzyRel, Scalar};
use crate::lifting::Lifting;
use crate::systems::Coalgebra;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    Simulation,
    Bisimulation,
}

/// A candidate `L`-(bi)simulation between two systems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub relation: FuzzyRel,
}

impl Certificate {
    pub fn from_json(value: &Value) -> Result<Self> {
        serde_json::from_value(value.clone()).map_err(|e| Error::json("$", e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `LR(α(a), β(b)) ≤ R(a, b)`.
    Forward,
    /// `L(R⌣)(β(b), α(a)) ≤ R(a, b)`.
    Converse,
}

/// One non-vacuous pair of a certificate check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairSlack {
    pub a: String,
    pub b: String,
    pub direction: Direction,
    pub bound: Scalar,
    pub lifted: Scalar,
    /// `bound - lifted`; negative means violated.
    #[serde(serialize_with = "ser_rational")]
    pub slack: BigRational,
}

impl PairSlack {
    pub fn ok(&self) -> bool {
        !self.slack.is_negative()
    }

    pub fn tight(&self) -> bool {
        self.slack.is_zero()
    }
}

fn ser_rational<S: serde::Serializer>(
    q: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub kind: CertificateKind,
    pub ok: bool,
    pub pairs: Vec<PairSlack>,
}

impl CertificateReport {
    pub fn violations(&self) -> impl Iterator<Item = &PairSlack> {
        self.pairs.iter().filter(|p| !p.ok())
    }

    pub fn find(&self, a: &str, b: &str, direction: Direction) -> Option<&PairSlack> {
        self.pairs
            .iter()
            .find(|p| p.a == a && p.b == b && p.direction == direction)
    }
}

fn same_carriers(l: &Lifting, a: &Coalgebra, b: &Coalgebra) -> Result<()> {
    if a.functor() != l.functor() || b.functor() != l.functor() {
        return Err(Error::Shape(format!(
            "lifting is bound to {}, systems are over {} and {}",
            l.functor(),
            a.functor(),
            b.functor()
        )));
    }
    Ok(())
}

/// Re-indexes `r` onto the given carriers by identifier.
fn align(r: &FuzzyRel, source: &Arc<Carrier>, target: &Arc<Carrier>) -> Result<FuzzyRel> {
    let positions = |from: &Carrier, to: &Carrier, side: &str| -> Result<Vec<usize>> {
        if from.len() != to.len() {
            return Err(Error::CarrierMismatch(format!(
                "certificate {side} has {} states, system has {}",
                from.len(),
                to.len()
            )));
        }
        to.elements()
            .iter()
            .map(|id| {
                from.position(id).ok_or_else(|| {
                    Error::CarrierMismatch(format!("state `{id}` missing from certificate {side}"))
                })
            })
            .collect()
    };
    let rows = positions(r.source(), source, "source")?;
    let cols = positions(r.target(), target, "target")?;
    Ok(FuzzyRel::from_fn(source.clone(), target.clone(), |i, j| {
        r.get(rows[i], cols[j]).clone()
    }))
}

/// Checks `LR ∘ (α×β) ≤ R` on every pair with `R(a,b) < 1` (pairs at 1 hold
/// trivially), and for bisimulations also the converse direction.
pub fn check_certificate(
    l: &Lifting,
    a: &Coalgebra,
    b: &Coalgebra,
    cert: &Certificate,
) -> Result<CertificateReport> {
    same_carriers(l, a, b)?;
    let r = align(&cert.relation, a.carrier(), b.carrier())?;
    let rc = r.converse();
    let pairs: Vec<(usize, usize)> = (0..a.len())
        .flat_map(|i| (0..b.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| !r.get(i, j).is_one())
        .collect();
    let mut out = Vec::new();
    for &(i, j) in &pairs {
        let bound = r.get(i, j).clone();
        let mut push = |direction, lifted: Scalar| {
            let slack = bound.as_rational() - lifted.as_rational();
            out.push(PairSlack {
                a: a.carrier().name(i).to_string(),
                b: b.carrier().name(j).to_string(),
                direction,
                bound: bound.clone(),
                lifted,
                slack,
            });
        };
        push(Direction::Forward, l.lift(&r, a.step(i), b.step(j))?);
        if cert.kind == CertificateKind::Bisimulation {
            push(Direction::Converse, l.lift(&rc, b.step(j), a.step(i))?);
        }
    }
    Ok(CertificateReport {
        kind: cert.kind,
        ok: out.iter().all(PairSlack::ok),
        pairs: out,
    })
}

/// `F(d) = Ld ∘ (α×β)`, evaluated in parallel over state pairs.
pub fn fixpoint_step(l: &Lifting, a: &Coalgebra, b: &Coalgebra, d: &FuzzyRel) -> Result<FuzzyRel> {
    let n = b.len();
    let values: Vec<Scalar> = (0..a.len() * n)
        .into_par_iter()
        .map(|k| l.lift(d, a.step(k / n), b.step(k % n)))
        .collect::<Result<_>>()?;
    let rows = values
        .chunks(n.max(1))
        .map(<[Scalar]>::to_vec)
        .collect::<Vec<_>>();
    let rows = if n == 0 {
        vec![Vec::new(); a.len()]
    } else {
        rows
    };
    FuzzyRel::new(a.carrier().clone(), b.carrier().clone(), rows)
}

/// `d_0, d_1, …, d_n` with `d_0 = 0`.
pub fn distance_chain(
    l: &Lifting,
    a: &Coalgebra,
    b: &Coalgebra,
    n: usize,
) -> Result<Vec<FuzzyRel>> {
    same_carriers(l, a, b)?;
    let mut chain = vec![FuzzyRel::constant(
        a.carrier().clone(),
        b.carrier().clone(),
        Scalar::zero(),
    )];
    for _ in 0..n {
        let next = fixpoint_step(l, a, b, chain.last().expect("chain starts at d_0"))?;
        chain.push(next);
    }
    Ok(chain)
}

#[derive(Clone, Debug)]
pub struct DistanceOptions {
    /// Stop once the sup-norm step falls to `tol`. Without it only an exact
    /// fixpoint (or `max_iter`) ends the iteration.
    pub tol: Option<Scalar>,
    pub max_iter: usize,
    /// Keep every iterate `d_1, d_2, …` in the result.
    pub trace: bool,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions {
            tol: None,
            max_iter: 1000,
            trace: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceResult {
    /// The last iterate: a lower bound on `d^L`, equal to it when `exact`.
    pub matrix: FuzzyRel,
    /// Number of applications of `F`.
    pub iterations: usize,
    /// `sup |d_k - d_{k-1}|` for the last step.
    pub residual: Scalar,
    pub converged: bool,
    /// The last step changed nothing, so `matrix = d^L`.
    pub exact: bool,
    pub contraction: Scalar,
    /// `d^L - matrix ≤ error_bound` entrywise, available when the lifting is
    /// a contraction (`residual · c / (1 - c)`).
    pub error_bound: Option<Scalar>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<FuzzyRel>,
}

/// Kleene iteration `d_{n+1} = Ld_n ∘ (α×β)` from `d_0 = 0`.
pub fn behavioural_distance(
    l: &Lifting,
    a: &Coalgebra,
    b: &Coalgebra,
    opts: &DistanceOptions,
) -> Result<DistanceResult> {
    same_carriers(l, a, b)?;
    let contraction = l.contraction_factor();
    let mut d = FuzzyRel::constant(a.carrier().clone(), b.carrier().clone(), Scalar::zero());
    let mut trace = Vec::new();
    let mut residual = Scalar::zero();
    let mut iterations = 0;
    let mut exact = false;
    let mut converged = false;
    while iterations < opts.max_iter {
        let next = fixpoint_step(l, a, b, &d)?;
        iterations += 1;
        residual = next.sup_distance(&d)?;
        if opts.trace {
            trace.push(next.clone());
        }
        d = next;
        if residual.is_zero() {
            exact = true;
            converged = true;
            break;
        }
        if opts.tol.as_ref().is_some_and(|tol| residual <= *tol) {
            converged = true;
            break;
        }
    }
    let error_bound = if exact {
        Some(Scalar::zero())
    } else if contraction < Scalar::one() {
        let c = contraction.as_rational();
        Some(Scalar::clamp(
            residual.as_rational() * c / (BigRational::one() - c),
        ))
    } else {
        None
    };
    Ok(DistanceResult {
        matrix: d,
        iterations,
        residual,
        converged,
        exact,
        contraction,
        error_bound,
        trace,
    })
}

/// `sup |R - d^L|` for a certificate that checks. Certificates bound the
/// distance from above, so this is how far the certificate is from optimal.
pub fn least_certificate_gap(
    l: &Lifting,
    a: &Coalgebra,
    b: &Coalgebra,
    cert: &Certificate,
    opts: &DistanceOptions,
) -> Result<Scalar> {
    let report = check_certificate(l, a, b, cert)?;
    if !report.ok {
        return Err(Error::structural(
            "certificate does not check, so it bounds nothing",
        ));
    }
    let d = behavioural_distance(l, a, b, opts)?;
    let r = align(&cert.relation, a.carrier(), b.carrier())?;
    r.sup_distance(&d.matrix)
}
