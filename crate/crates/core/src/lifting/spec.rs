use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fuzzy::Scalar;
use crate::systems::FunctorSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HausdorffVariant {
    /// `max(sup_a inf_b R, sup_b inf_a R)`.
    Sym,
    /// `sup_{a∈U} inf_{b∈V} R(a,b)`.
    Left,
    /// `sup_{b∈V} inf_{a∈U} R(a,b)`.
    Right,
}

impl HausdorffVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            HausdorffVariant::Sym => "sym",
            HausdorffVariant::Left => "left",
            HausdorffVariant::Right => "right",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairMode {
    /// `w1·L1 + w2·L2` with `w1 + w2 ≤ 1`.
    WeightedSum(Scalar, Scalar),
    Max,
    /// Truncated sum `L1 ⊕ L2`.
    Sum,
}

/// A compositional description of a fuzzy lifting, matched node by node
/// against a [`FunctorSpec`](crate::systems::FunctorSpec).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftingSpec {
    Id,
    Const,
    Hausdorff {
        variant: HausdorffVariant,
        sub: Box<LiftingSpec>,
    },
    KantorovichD(Box<LiftingSpec>),
    WassersteinD(Box<LiftingSpec>),
    PairCombine {
        mode: PairMode,
        left: Box<LiftingSpec>,
        right: Box<LiftingSpec>,
    },
    Discount {
        factor: Scalar,
        sub: Box<LiftingSpec>,
    },
    Maybe(Box<LiftingSpec>),
    /// `sup_λ sup_f λ(f)(t1) ⊖ λ(R[f])(t2)` with `f` on the grid `{0, δ, …, 1}`.
    KantorovichGeneric {
        modalities: Vec<String>,
        grid: Scalar,
    },
}

impl LiftingSpec {
    pub fn hausdorff(variant: HausdorffVariant, sub: LiftingSpec) -> Self {
        LiftingSpec::Hausdorff {
            variant,
            sub: Box::new(sub),
        }
    }

    pub fn kantorovich(sub: LiftingSpec) -> Self {
        LiftingSpec::KantorovichD(Box::new(sub))
    }

    pub fn wasserstein(sub: LiftingSpec) -> Self {
        LiftingSpec::WassersteinD(Box::new(sub))
    }

    pub fn pair(mode: PairMode, left: LiftingSpec, right: LiftingSpec) -> Result<Self> {
        if let PairMode::WeightedSum(w1, w2) = &mode {
            if w1.as_rational() + w2.as_rational() > BigRational::one() {
                return Err(Error::structural(format!(
                    "pair weights {w1} + {w2} exceed 1"
                )));
            }
        }
        Ok(LiftingSpec::PairCombine {
            mode,
            left: Box::new(left),
            right: Box::new(right),
        })
    }

    pub fn discount(factor: Scalar, sub: LiftingSpec) -> Result<Self> {
        if factor.is_one() {
            return Err(Error::structural("discount factor must be below 1"));
        }
        Ok(LiftingSpec::Discount {
            factor,
            sub: Box::new(sub),
        })
    }

    pub fn maybe(sub: LiftingSpec) -> Self {
        LiftingSpec::Maybe(Box::new(sub))
    }

    pub fn generic(modalities: Vec<String>, grid: Scalar) -> Result<Self> {
        if grid.is_zero() || !grid.as_rational().recip().is_integer() {
            return Err(Error::structural(format!(
                "grid step {grid} must be 1/k for a positive integer k"
            )));
        }
        Ok(LiftingSpec::KantorovichGeneric { modalities, grid })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LiftingSpec::Id => "id",
            LiftingSpec::Const => "const",
            LiftingSpec::Hausdorff { .. } => "hausdorff",
            LiftingSpec::KantorovichD(_) => "kantorovich",
            LiftingSpec::WassersteinD(_) => "wasserstein",
            LiftingSpec::PairCombine { mode, .. } => match mode {
                PairMode::WeightedSum(..) => "pair-sum",
                PairMode::Max => "pair-max",
                PairMode::Sum => "pair-oplus",
            },
            LiftingSpec::Discount { .. } => "discount",
            LiftingSpec::Maybe(_) => "maybe",
            LiftingSpec::KantorovichGeneric { .. } => "kantorovich-generic",
        }
    }

    /// The functor this lifting lifts along, when the lifting alone
    /// determines it (no `Const` or grid nodes).
    pub fn infer_functor(&self) -> Option<FunctorSpec> {
        Some(match self {
            LiftingSpec::Id => FunctorSpec::Id,
            LiftingSpec::Const | LiftingSpec::KantorovichGeneric { .. } => return None,
            LiftingSpec::Hausdorff { sub, .. } => FunctorSpec::pfin(sub.infer_functor()?),
            LiftingSpec::KantorovichD(sub) | LiftingSpec::WassersteinD(sub) => {
                FunctorSpec::dfin(sub.infer_functor()?)
            }
            LiftingSpec::PairCombine { left, right, .. } => {
                FunctorSpec::pair(left.infer_functor()?, right.infer_functor()?)
            }
            LiftingSpec::Discount { sub, .. } => sub.infer_functor()?,
            LiftingSpec::Maybe(sub) => FunctorSpec::maybe(sub.infer_functor()?),
        })
    }

    /// Lipschitz constant of `R ↦ LR` in the supremum metric, as far as the
    /// combinators reveal it. Values below 1 make the fixpoint map a
    /// contraction.
    pub fn contraction_factor(&self) -> Scalar {
        match self {
            LiftingSpec::Id => Scalar::one(),
            LiftingSpec::Const => Scalar::zero(),
            LiftingSpec::Hausdorff { sub, .. } | LiftingSpec::Maybe(sub) => {
                sub.contraction_factor()
            }
            LiftingSpec::KantorovichD(sub) | LiftingSpec::WassersteinD(sub) => {
                sub.contraction_factor()
            }
            LiftingSpec::PairCombine { mode, left, right } => {
                let (l, r) = (left.contraction_factor(), right.contraction_factor());
                match mode {
                    PairMode::WeightedSum(w1, w2) => Scalar::clamp(
                        w1.as_rational() * l.as_rational() + w2.as_rational() * r.as_rational(),
                    ),
                    PairMode::Max => l.max(r),
                    PairMode::Sum => l.oplus(&r),
                }
            }
            LiftingSpec::Discount { factor, sub } => factor.mul(&sub.contraction_factor()),
            LiftingSpec::KantorovichGeneric { .. } => Scalar::one(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            LiftingSpec::Id | LiftingSpec::Const => json!({"kind": self.kind()}),
            LiftingSpec::Hausdorff { variant, sub } => {
                json!({"kind": "hausdorff", "variant": variant.as_str(), "sub": sub.to_json()})
            }
            LiftingSpec::KantorovichD(sub)
            | LiftingSpec::WassersteinD(sub)
            | LiftingSpec::Maybe(sub) => {
                json!({"kind": self.kind(), "sub": sub.to_json()})
            }
            LiftingSpec::PairCombine { mode, left, right } => {
                let mut v =
                    json!({"kind": self.kind(), "left": left.to_json(), "right": right.to_json()});
                if let PairMode::WeightedSum(w1, w2) = mode {
                    v["weights"] = json!([w1, w2]);
                }
                v
            }
            LiftingSpec::Discount { factor, sub } => {
                json!({"kind": "discount", "factor": factor, "sub": sub.to_json()})
            }
            LiftingSpec::KantorovichGeneric { modalities, grid } => {
                json!({"kind": "kantorovich-generic", "modalities": modalities, "grid": grid})
            }
        }
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        Self::from_json_at(value, "$")
    }

    fn from_json_at(value: &Value, path: &str) -> Result<Self> {
        let kind = value
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::json(path, "lifting node needs a string `kind`"))?;
        let child = |key: &str| -> Result<LiftingSpec> {
            let v = value
                .get(key)
                .ok_or_else(|| Error::json(path, format!("`{kind}` node needs `{key}`")))?;
            Self::from_json_at(v, &format!("{path}.{key}"))
        };
        let scalar = |key: &str| -> Result<Scalar> {
            let v = value
                .get(key)
                .ok_or_else(|| Error::json(path, format!("`{kind}` node needs `{key}`")))?;
            serde_json::from_value(v.clone())
                .map_err(|e| Error::json(format!("{path}.{key}"), e.to_string()))
        };
        let at = |r: Result<LiftingSpec>| r.map_err(|e| Error::json(path, e.to_string()));
        Ok(match kind {
            "id" => LiftingSpec::Id,
            "const" => LiftingSpec::Const,
            "hausdorff" => {
                let variant = match value
                    .get("variant")
                    .and_then(Value::as_str)
                    .unwrap_or("sym")
                {
                    "sym" => HausdorffVariant::Sym,
                    "left" => HausdorffVariant::Left,
                    "right" => HausdorffVariant::Right,
                    other => {
                        return Err(Error::json(
                            format!("{path}.variant"),
                            format!(
                                "unknown Hausdorff variant `{other}` (expected sym, left or right)"
                            ),
                        ))
                    }
                };
                LiftingSpec::hausdorff(variant, child("sub")?)
            }
            "kantorovich" => LiftingSpec::kantorovich(child("sub")?),
            "wasserstein" => LiftingSpec::wasserstein(child("sub")?),
            "maybe" => LiftingSpec::maybe(child("sub")?),
            "pair-sum" => {
                let weights: [Scalar; 2] = value
                    .get("weights")
                    .cloned()
                    .ok_or_else(|| Error::json(path, "`pair-sum` node needs `weights`"))
                    .and_then(|w| {
                        serde_json::from_value(w)
                            .map_err(|e| Error::json(format!("{path}.weights"), e.to_string()))
                    })?;
                let [w1, w2] = weights;
                at(LiftingSpec::pair(
                    PairMode::WeightedSum(w1, w2),
                    child("left")?,
                    child("right")?,
                ))?
            }
            "pair-max" => at(LiftingSpec::pair(
                PairMode::Max,
                child("left")?,
                child("right")?,
            ))?,
            "pair-oplus" => at(LiftingSpec::pair(
                PairMode::Sum,
                child("left")?,
                child("right")?,
            ))?,
            "discount" => at(LiftingSpec::discount(scalar("factor")?, child("sub")?))?,
            "kantorovich-generic" => {
                let modalities: Vec<String> = value
                    .get("modalities")
                    .cloned()
                    .ok_or_else(|| {
                        Error::json(path, "`kantorovich-generic` node needs `modalities`")
                    })
                    .and_then(|m| {
                        serde_json::from_value(m)
                            .map_err(|e| Error::json(format!("{path}.modalities"), e.to_string()))
                    })?;
                at(LiftingSpec::generic(modalities, scalar("grid")?))?
            }
            other => return Err(Error::json(path, format!("unknown lifting kind `{other}`"))),
        })
    }
}

impl fmt::Display for LiftingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftingSpec::Id => write!(f, "Id"),
            LiftingSpec::Const => write!(f, "Const"),
            LiftingSpec::Hausdorff { variant, sub } => match variant {
                HausdorffVariant::Sym => write!(f, "H({sub})"),
                HausdorffVariant::Left => write!(f, "H<-({sub})"),
                HausdorffVariant::Right => write!(f, "H->({sub})"),
            },
            LiftingSpec::KantorovichD(sub) => write!(f, "K({sub})"),
            LiftingSpec::WassersteinD(sub) => write!(f, "W({sub})"),
            LiftingSpec::PairCombine { mode, left, right } => match mode {
                PairMode::WeightedSum(w1, w2) => write!(f, "{w1}*{left} + {w2}*{right}"),
                PairMode::Max => write!(f, "max({left}, {right})"),
                PairMode::Sum => write!(f, "{left} (+) {right}"),
            },
            LiftingSpec::Discount { factor, sub } => write!(f, "{factor}*{sub}"),
            LiftingSpec::Maybe(sub) => write!(f, "Maybe({sub})"),
            LiftingSpec::KantorovichGeneric { modalities, grid } => {
                write!(f, "K[{}; grid {grid}]", modalities.join(", "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let text = r#"{"kind":"pair-sum","weights":["1/2","1/2"],"left":{"kind":"const"},
            "right":{"kind":"hausdorff","variant":"sym","sub":{"kind":"id"}}}"#;
        let spec = LiftingSpec::from_json(&serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(spec.kind(), "pair-sum");
        assert_eq!(LiftingSpec::from_json(&spec.to_json()).unwrap(), spec);
        assert_eq!(spec.contraction_factor(), Scalar::ratio(1, 2));
    }

    #[test]
    fn invalid_parameters() {
        let heavy = r#"{"kind":"pair-sum","weights":["2/3","1/2"],"left":{"kind":"id"},"right":{"kind":"id"}}"#;
        assert!(LiftingSpec::from_json(&serde_json::from_str(heavy).unwrap()).is_err());
        let full = r#"{"kind":"discount","factor":"1","sub":{"kind":"id"}}"#;
        assert!(LiftingSpec::from_json(&serde_json::from_str(full).unwrap()).is_err());
        let grid = r#"{"kind":"kantorovich-generic","modalities":["<>"],"grid":"2/5"}"#;
        assert!(LiftingSpec::from_json(&serde_json::from_str(grid).unwrap()).is_err());
        let bad = r#"{"kind":"hausdorff","variant":"up","sub":{"kind":"id"}}"#;
        let err = LiftingSpec::from_json(&serde_json::from_str(bad).unwrap()).unwrap_err();
        assert!(err.to_string().contains("$.variant"));
    }
}
