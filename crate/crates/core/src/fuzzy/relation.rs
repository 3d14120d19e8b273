//! Carriers, fuzzy relations, and the relational algebra on them.
//!
//! Under the crisp-relation convention used throughout, `0` means "fully
//! related" and `1` means "unrelated". Composition is the min-over-⊕
//! product: `(R;S)(a,c) = min_b R(a,b) ⊕ S(b,c)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// An ordered list of distinct state identifiers.
#[derive(Clone)]
pub struct Carrier {
    elements: Vec<String>,
    index: HashMap<String, usize>,
}

impl Carrier {
    pub fn new<I, S>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let elements: Vec<String> = ids.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, id) in elements.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::structural(format!("duplicate identifier `{id}`")));
            }
        }
        Ok(Carrier { elements, index })
    }

    /// `prefix0, prefix1, ...`; handy for generated carriers.
    pub fn numbered(prefix: &str, len: usize) -> Self {
        Carrier::new((0..len).map(|i| format!("{prefix}{i}"))).expect("numbered ids are distinct")
    }

    pub fn empty() -> Self {
        Carrier::numbered("", 0)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }
}

impl PartialEq for Carrier {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for Carrier {}

impl fmt::Debug for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.elements).finish()
    }
}

impl Serialize for Carrier {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Carrier {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let ids = Vec::<String>::deserialize(deserializer)?;
        Carrier::new(ids).map_err(serde::de::Error::custom)
    }
}

/// Read access to a `[0,1]`-valued matrix indexed by positions.
///
/// Liftings only ever need this view, so they can run on materialized
/// relations as well as on relations computed on the fly.
pub trait RelationView {
    fn value(&self, a: usize, b: usize) -> Scalar;
}

impl<F> RelationView for F
where
    F: Fn(usize, usize) -> Scalar,
{
    fn value(&self, a: usize, b: usize) -> Scalar {
        self(a, b)
    }
}

/// A fuzzy relation `R: A × B → [0,1]`, stored as a dense row-major matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct FuzzyRel {
    source: Arc<Carrier>,
    target: Arc<Carrier>,
    values: Vec<Scalar>,
}

impl RelationView for FuzzyRel {
    fn value(&self, a: usize, b: usize) -> Scalar {
        self.get(a, b).clone()
    }
}

fn same_carrier(x: &Arc<Carrier>, y: &Arc<Carrier>) -> bool {
    Arc::ptr_eq(x, y) || x == y
}

impl FuzzyRel {
    pub fn new(source: Arc<Carrier>, target: Arc<Carrier>, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        if rows.len() != source.len() {
            return Err(Error::structural(format!(
                "expected {} rows, found {}",
                source.len(),
                rows.len()
            )));
        }
        let mut values = Vec::with_capacity(source.len() * target.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != target.len() {
                return Err(Error::structural(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    target.len()
                )));
            }
            values.extend(row);
        }
        Ok(FuzzyRel {
            source,
            target,
            values,
        })
    }

    pub fn from_fn(
        source: Arc<Carrier>,
        target: Arc<Carrier>,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Self {
        let (m, n) = (source.len(), target.len());
        let mut values = Vec::with_capacity(m * n);
        for a in 0..m {
            for b in 0..n {
                values.push(f(a, b));
            }
        }
        FuzzyRel {
            source,
            target,
            values,
        }
    }

    pub fn constant(source: Arc<Carrier>, target: Arc<Carrier>, v: Scalar) -> Self {
        Self::from_fn(source, target, |_, _| v.clone())
    }

    /// `Δ_A`: 0 on the diagonal, 1 elsewhere.
    pub fn diagonal(carrier: Arc<Carrier>) -> Self {
        Self::eps_diagonal(carrier, Scalar::zero())
    }

    /// `Δ_{ε,A}`: ε on the diagonal, 1 elsewhere.
    pub fn eps_diagonal(carrier: Arc<Carrier>, eps: Scalar) -> Self {
        Self::from_fn(carrier.clone(), carrier, |a, b| {
            if a == b {
                eps.clone()
            } else {
                Scalar::one()
            }
        })
    }

    /// The ε-graph of `f: A → B`: ε where `f(a) = b`, 1 elsewhere.
    pub fn graph(
        f: &[usize],
        source: Arc<Carrier>,
        target: Arc<Carrier>,
        eps: Scalar,
    ) -> Result<Self> {
        if f.len() != source.len() {
            return Err(Error::structural(format!(
                "map is defined on {} points, source has {}",
                f.len(),
                source.len()
            )));
        }
        if let Some((a, &b)) = f.iter().enumerate().find(|(_, &b)| b >= target.len()) {
            return Err(Error::structural(format!(
                "map sends `{}` to position {b}, outside a target of size {}",
                source.name(a),
                target.len()
            )));
        }
        Ok(Self::from_fn(source, target, |a, b| {
            if f[a] == b {
                eps.clone()
            } else {
                Scalar::one()
            }
        }))
    }

    pub fn source(&self) -> &Arc<Carrier> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Carrier> {
        &self.target
    }

    pub fn get(&self, a: usize, b: usize) -> &Scalar {
        &self.values[a * self.target.len() + b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: Scalar) {
        let n = self.target.len();
        self.values[a * n + b] = v;
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        let n = self.target.len().max(1);
        if self.target.is_empty() {
            return vec![Vec::new(); self.source.len()];
        }
        self.values.chunks(n).map(|r| r.to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        same_carrier(&self.source, &self.target)
    }

    fn check_same_carriers(&self, other: &FuzzyRel) -> Result<()> {
        if same_carrier(&self.source, &other.source) && same_carrier(&self.target, &other.target) {
            Ok(())
        } else {
            Err(Error::CarrierMismatch(
                "relations are over different carriers".into(),
            ))
        }
    }

    /// `R;S`, with `(R;S)(a,c) = min_b R(a,b) ⊕ S(b,c)`. An empty middle
    /// carrier yields the all-1 relation.
    pub fn compose(&self, other: &FuzzyRel) -> Result<FuzzyRel> {
        if !same_carrier(&self.target, &other.source) {
            return Err(Error::CarrierMismatch(format!(
                "cannot compose: middle carriers {:?} and {:?} differ",
                self.target, other.source
            )));
        }
        let mid = self.target.len();
        Ok(FuzzyRel::from_fn(
            self.source.clone(),
            other.target.clone(),
            |a, c| {
                (0..mid)
                    .map(|b| self.get(a, b).oplus(other.get(b, c)))
                    .min()
                    .unwrap_or_else(Scalar::one)
            },
        ))
    }

    pub fn converse(&self) -> FuzzyRel {
        FuzzyRel::from_fn(self.target.clone(), self.source.clone(), |b, a| {
            self.get(a, b).clone()
        })
    }

    /// `R ∘ (f × g)` for `f: A → source`, `g: B → target`.
    pub fn pullback(
        &self,
        f: &[usize],
        f_source: Arc<Carrier>,
        g: &[usize],
        g_source: Arc<Carrier>,
    ) -> Result<FuzzyRel> {
        if f.len() != f_source.len() || g.len() != g_source.len() {
            return Err(Error::structural("map length differs from its carrier"));
        }
        if f.iter().any(|&x| x >= self.source.len()) || g.iter().any(|&y| y >= self.target.len()) {
            return Err(Error::structural("map leaves the relation's carriers"));
        }
        Ok(FuzzyRel::from_fn(f_source, g_source, |a, b| {
            self.get(f[a], g[b]).clone()
        }))
    }

    /// Pointwise `self ≤ other`.
    pub fn is_below(&self, other: &FuzzyRel) -> Result<bool> {
        self.check_same_carriers(other)?;
        Ok(self.values.iter().zip(&other.values).all(|(x, y)| x <= y))
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::CarrierMismatch(
                "expected an endorelation (same source and target)".into(),
            ))
        }
    }

    /// Reflexivity (`d ≤ Δ`) and the triangle inequality (`d ≤ d;d`).
    pub fn is_hemimetric(&self) -> Result<bool> {
        self.require_square()?;
        let n = self.source.len();
        if (0..n).any(|x| !self.get(x, x).is_zero()) {
            return Ok(false);
        }
        let dd = self.compose(self)?;
        self.is_below(&dd)
    }

    pub fn is_pseudometric(&self) -> Result<bool> {
        Ok(self.is_hemimetric()? && self.converse().values == self.values)
    }

    /// The companion `R[f](b) = max_a f(a) ⊖ R(a,b)`: the least `g` such
    /// that `(f, g)` is `R`-nonexpansive.
    pub fn companion(&self, f: &[Scalar]) -> Result<Vec<Scalar>> {
        if f.len() != self.source.len() {
            return Err(Error::structural(format!(
                "predicate has {} values, source has {}",
                f.len(),
                self.source.len()
            )));
        }
        Ok(companion_of(self, f, self.target.len()))
    }

    /// Largest entrywise difference `max |R - S|`.
    pub fn sup_distance(&self, other: &FuzzyRel) -> Result<Scalar> {
        self.check_same_carriers(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x.abs_diff(y))
            .max()
            .unwrap_or_else(Scalar::zero))
    }

    pub fn max_entry(&self) -> Scalar {
        self.values
            .iter()
            .max()
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn map_values(&self, mut f: impl FnMut(&Scalar) -> Scalar) -> FuzzyRel {
        FuzzyRel {
            source: self.source.clone(),
            target: self.target.clone(),
            values: self.values.iter().map(&mut f).collect(),
        }
    }
}

/// Companion over a view: `g(b) = max_a f(a) ⊖ R(a,b)` for `b < targets`.
pub fn companion_of<R: RelationView + ?Sized>(r: &R, f: &[Scalar], targets: usize) -> Vec<Scalar> {
    (0..targets)
        .map(|b| {
            f.iter()
                .enumerate()
                .map(|(a, fa)| fa.ominus(&r.value(a, b)))
                .max()
                .unwrap_or_else(Scalar::zero)
        })
        .collect()
}

impl fmt::Debug for FuzzyRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FuzzyRel {:?} -> {:?}", self.source, self.target)?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|s| s.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct FuzzyRelJson {
    source: Carrier,
    target: Carrier,
    values: Vec<Vec<Scalar>>,
}

impl Serialize for FuzzyRel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FuzzyRelJson {
            source: (*self.source).clone(),
            target: (*self.target).clone(),
            values: self.rows(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FuzzyRel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = FuzzyRelJson::deserialize(deserializer)?;
        FuzzyRel::new(Arc::new(raw.source), Arc::new(raw.target), raw.values)
            .map_err(serde::de::Error::custom)
    }
}

/// A pair `(f, g)` with `f(a) - g(b) ≤ R(a, b)` for all `a, b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonexpansivePair {
    f: Vec<Scalar>,
    g: Vec<Scalar>,
}

impl NonexpansivePair {
    pub fn new<R: RelationView + ?Sized>(r: &R, f: Vec<Scalar>, g: Vec<Scalar>) -> Result<Self> {
        for (a, fa) in f.iter().enumerate() {
            for (b, gb) in g.iter().enumerate() {
                let rab = r.value(a, b);
                if fa.ominus(gb) > rab {
                    return Err(Error::structural(format!(
                        "pair is not nonexpansive at ({a}, {b}): {fa} - {gb} > {rab}"
                    )));
                }
            }
        }
        Ok(NonexpansivePair { f, g })
    }

    /// `(f, R[f])`, always nonexpansive.
    pub fn with_companion(r: &FuzzyRel, f: Vec<Scalar>) -> Result<Self> {
        let g = r.companion(&f)?;
        Ok(NonexpansivePair { f, g })
    }

    pub fn f(&self) -> &[Scalar] {
        &self.f
    }

    pub fn g(&self) -> &[Scalar] {
        &self.g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    fn carrier(prefix: &str, n: usize) -> Arc<Carrier> {
        Arc::new(Carrier::numbered(prefix, n))
    }

    fn rel(a: &Arc<Carrier>, b: &Arc<Carrier>, rows: &[&[(i64, i64)]]) -> FuzzyRel {
        FuzzyRel::new(
            a.clone(),
            b.clone(),
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| s(n, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn duplicate_ids_rejected() {
        assert!(Carrier::new(["a", "b", "a"]).is_err());
    }

    #[test]
    fn composition_truncates() {
        let a = carrier("a", 1);
        let b = carrier("b", 1);
        let c = carrier("c", 1);
        let r = rel(&a, &b, &[&[(6, 10)]]);
        let t = rel(&b, &c, &[&[(7, 10)]]);
        assert_eq!(r.compose(&t).unwrap().get(0, 0), &Scalar::one());
    }

    #[test]
    fn composition_two_by_two() {
        let (a, b, c) = (carrier("a", 2), carrier("b", 2), carrier("c", 2));
        let r = rel(&a, &b, &[&[(2, 10), (9, 10)], &[(1, 1), (1, 10)]]);
        let t = rel(&b, &c, &[&[(3, 10), (1, 1)], &[(4, 10), (0, 1)]]);
        let rs = r.compose(&t).unwrap();
        // min(0.2 ⊕ 0.3, 0.9 ⊕ 0.4) = min(0.5, 1)
        assert_eq!(rs.get(0, 0), &s(1, 2));
        // min(0.2 ⊕ 1, 0.9 ⊕ 0) = 0.9
        assert_eq!(rs.get(0, 1), &s(9, 10));
        // min(1 ⊕ 0.3, 0.1 ⊕ 0.4) = 0.5
        assert_eq!(rs.get(1, 0), &s(1, 2));
        assert_eq!(rs.get(1, 1), &s(1, 10));
    }

    #[test]
    fn empty_middle_carrier_gives_all_one() {
        let (a, e, c) = (carrier("a", 2), carrier("e", 0), carrier("c", 3));
        let r = FuzzyRel::constant(a, e.clone(), Scalar::zero());
        let t = FuzzyRel::constant(e, c, Scalar::zero());
        let rs = r.compose(&t).unwrap();
        assert!(rs.values().iter().all(Scalar::is_one));
    }

    #[test]
    fn composition_mismatch_is_error() {
        let (a, b) = (carrier("a", 2), carrier("b", 2));
        let r = FuzzyRel::diagonal(a.clone());
        let t = FuzzyRel::diagonal(b);
        assert!(matches!(r.compose(&t), Err(Error::CarrierMismatch(_))));
    }

    #[test]
    fn diagonal_is_unit_and_self_converse() {
        let (a, b) = (carrier("a", 2), carrier("b", 3));
        let r = FuzzyRel::from_fn(a.clone(), b.clone(), |i, j| s((i + 2 * j) as i64, 7));
        assert_eq!(r.compose(&FuzzyRel::diagonal(b)).unwrap(), r);
        assert_eq!(FuzzyRel::diagonal(a.clone()).compose(&r).unwrap(), r);
        assert_eq!(
            FuzzyRel::diagonal(a.clone()).converse(),
            FuzzyRel::diagonal(a)
        );
    }

    #[test]
    fn converse_transposes() {
        let (a, b) = (carrier("a", 1), carrier("b", 2));
        let r = rel(&a, &b, &[&[(2, 10), (9, 10)]]);
        let rc = r.converse();
        assert_eq!(rc.rows(), vec![vec![s(1, 5)], vec![s(9, 10)]]);
        assert_eq!(rc.converse(), r);
    }

    #[test]
    fn graph_of_identity_is_diagonal() {
        let a = carrier("a", 3);
        let g = FuzzyRel::graph(&[0, 1, 2], a.clone(), a.clone(), Scalar::zero()).unwrap();
        assert_eq!(g, FuzzyRel::diagonal(a.clone()));
        let ge = FuzzyRel::graph(&[0, 1, 2], a.clone(), a.clone(), s(1, 4)).unwrap();
        assert_eq!(ge, FuzzyRel::eps_diagonal(a, s(1, 4)));
    }

    #[test]
    fn eps_graph_entries() {
        let (a, b) = (carrier("a", 1), carrier("b", 2));
        let g = FuzzyRel::graph(&[1], a, b, s(1, 4)).unwrap();
        assert_eq!(g.rows(), vec![vec![Scalar::one(), s(1, 4)]]);
    }

    #[test]
    fn graph_outside_target_is_error() {
        let (a, b) = (carrier("a", 2), carrier("b", 2));
        assert!(FuzzyRel::graph(&[0, 2], a.clone(), b.clone(), Scalar::zero()).is_err());
        assert!(FuzzyRel::graph(&[0], a, b, Scalar::zero()).is_err());
    }

    #[test]
    fn hemimetric_checks() {
        let x = carrier("x", 2);
        assert!(FuzzyRel::diagonal(x.clone()).is_hemimetric().unwrap());
        assert!(FuzzyRel::diagonal(x.clone()).is_pseudometric().unwrap());
        let d = rel(&x, &x, &[&[(0, 1), (3, 10)], &[(8, 10), (0, 1)]]);
        assert!(d.is_hemimetric().unwrap());
        assert!(!d.is_pseudometric().unwrap());

        // d(x,z) = 1 > d(x,y) ⊕ d(y,z) = 0.95
        let y = carrier("p", 3);
        let d = rel(
            &y,
            &y,
            &[
                &[(0, 1), (9, 10), (1, 1)],
                &[(1, 1), (0, 1), (5, 100)],
                &[(1, 1), (1, 1), (0, 1)],
            ],
        );
        assert!(!d.is_hemimetric().unwrap());
        let (a, b) = (carrier("a", 2), carrier("b", 2));
        assert!(FuzzyRel::constant(a, b, Scalar::zero())
            .is_hemimetric()
            .is_err());
    }

    #[test]
    fn companion_examples() {
        let (a, b) = (carrier("a", 2), carrier("b", 1));
        let r = rel(&a, &b, &[&[(2, 10)], &[(1, 10)]]);
        let g = r.companion(&[s(9, 10), s(4, 10)]).unwrap();
        assert_eq!(g, vec![s(7, 10)]);

        let ones = FuzzyRel::constant(a.clone(), b.clone(), Scalar::one());
        assert_eq!(
            ones.companion(&[Scalar::one(), s(1, 2)]).unwrap(),
            vec![Scalar::zero()]
        );

        let f = vec![s(1, 3), s(5, 7)];
        assert_eq!(FuzzyRel::diagonal(a).companion(&f).unwrap(), f);

        let empty = carrier("e", 0);
        let r = FuzzyRel::constant(empty, b, Scalar::zero());
        assert_eq!(r.companion(&[]).unwrap(), vec![Scalar::zero()]);
    }

    #[test]
    fn nonexpansive_pair_checked_at_construction() {
        let (a, b) = (carrier("a", 2), carrier("b", 1));
        let r = rel(&a, &b, &[&[(2, 10)], &[(1, 10)]]);
        assert!(NonexpansivePair::new(&r, vec![s(9, 10), s(4, 10)], vec![s(7, 10)]).is_ok());
        assert!(NonexpansivePair::new(&r, vec![s(9, 10), s(4, 10)], vec![s(6, 10)]).is_err());
        let p = NonexpansivePair::with_companion(&r, vec![s(1, 2), s(1, 2)]).unwrap();
        assert_eq!(p.g(), &[s(2, 5)]);
    }

    #[test]
    fn sup_distance_examples() {
        let a = carrier("a", 2);
        let r = FuzzyRel::eps_diagonal(a.clone(), s(1, 8));
        assert_eq!(r.sup_distance(&r).unwrap(), Scalar::zero());
        assert_eq!(r.sup_distance(&FuzzyRel::diagonal(a)).unwrap(), s(1, 8));
    }

    #[test]
    fn json_round_trip_and_decimals() {
        let text = r#"{"source":["a"],"target":["b","c"],"values":[["0.2","1/3"]]}"#;
        let r: FuzzyRel = serde_json::from_str(text).unwrap();
        assert_eq!(r.get(0, 0), &s(1, 5));
        let back: FuzzyRel = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
        let bad = r#"{"source":["a"],"target":["b","c"],"values":[["0.2"]]}"#;
        assert!(serde_json::from_str::<FuzzyRel>(bad).is_err());
    }
}
