//! Declarative descriptions of graded norms, serializable as JSON.
//!
//! Every rational is written as exact text (`"3/2"`). Example:
//!
//! ```json
//! {"n": 1, "variant": "truncated", "k": 4,
//!  "parent": {"n": 1, "variant": "monomial_weights",
//!             "rule": {"rule": "affine", "slopes": ["1"], "constant": "0"}}}
//! ```

use num_integer::Roots;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::DiagNorm;
use crate::rat::{floor, int, serde_rat, serde_rat_vec, Rat};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradedNormSpec {
    /// Dimension of the projective space.
    pub n: usize,
    #[serde(flatten)]
    pub variant: Variant,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Variant {
    /// Diagonal in the monomial basis with weights `w_m(α)`.
    MonomialWeights { rule: WeightRule },
    /// Quotient of `Sym^m` of a norm on `H^0(L)`.
    DegreeOneGenerated { base: DiagNorm },
    /// The graded norm on `R(X, kL)` generated by the parent's degree `k`
    /// piece; defined in degrees divisible by `k`.
    Truncated { parent: Box<GradedNormSpec>, k: u32 },
    /// `norm_m` multiplied by `e^{-c_m}`.
    Scaled {
        parent: Box<GradedNormSpec>,
        rule: ScaleRule,
    },
    MaxOf {
        a: Box<GradedNormSpec>,
        b: Box<GradedNormSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum WeightRule {
    Zero,
    /// `Σ slopes_i α_i + constant·m`.
    Affine {
        #[serde(with = "serde_rat_vec")]
        slopes: Vec<Rat>,
        #[serde(with = "serde_rat")]
        constant: Rat,
    },
    /// `⌊m g(α/m)⌋` for the concave `g(x) = min_i (slopes_i·x + constant_i)`.
    FloorConcave {
        pieces: Vec<AffinePiece>,
    },
    /// A base rule with individual weights overridden.
    Table {
        base: Box<WeightRule>,
        entries: Vec<TableEntry>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    #[serde(with = "serde_rat_vec")]
    pub slopes: Vec<Rat>,
    #[serde(with = "serde_rat")]
    pub constant: Rat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub degree: u32,
    pub exponent: Vec<u32>,
    #[serde(with = "serde_rat")]
    pub weight: Rat,
}

/// `c_m` for [`Variant::Scaled`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ScaleRule {
    /// `c`.
    Constant {
        #[serde(with = "serde_rat")]
        c: Rat,
    },
    /// `c·m`.
    Linear {
        #[serde(with = "serde_rat")]
        c: Rat,
    },
    /// `c·⌈√m⌉`.
    SqrtCeil {
        #[serde(with = "serde_rat")]
        c: Rat,
    },
}

impl ScaleRule {
    pub fn at(&self, m: u32) -> Rat {
        match self {
            ScaleRule::Constant { c } => c.clone(),
            ScaleRule::Linear { c } => c * int(m as i64),
            ScaleRule::SqrtCeil { c } => {
                let mut s = (m as u64).sqrt();
                if s * s < m as u64 {
                    s += 1;
                }
                c * int(s as i64)
            }
        }
    }
}

fn dot(s: &[Rat], alpha: &[u32]) -> Rat {
    s.iter().zip(alpha).map(|(x, &a)| x * int(a as i64)).sum()
}

impl WeightRule {
    pub fn weight(&self, m: u32, alpha: &[u32]) -> Rat {
        let mm = int(m as i64);
        match self {
            WeightRule::Zero => Rat::zero(),
            WeightRule::Affine { slopes, constant } => dot(slopes, alpha) + constant * mm,
            WeightRule::FloorConcave { pieces } => {
                let v = pieces
                    .iter()
                    .map(|p| dot(&p.slopes, alpha) + &p.constant * &mm)
                    .min()
                    .expect("at least one piece");
                Rat::from_integer(floor(&v))
            }
            WeightRule::Table { base, entries } => entries
                .iter()
                .find(|e| e.degree == m && e.exponent == alpha)
                .map_or_else(|| base.weight(m, alpha), |e| e.weight.clone()),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let bad = |what: &str| Err(Error::Invalid(format!("weight rule: {what}")));
        match self {
            WeightRule::Zero => Ok(()),
            WeightRule::Affine { slopes, .. } if slopes.len() != n => {
                bad("slopes must have one entry per variable")
            }
            WeightRule::Affine { .. } => Ok(()),
            WeightRule::FloorConcave { pieces } if pieces.is_empty() => {
                bad("floor_concave needs a piece")
            }
            WeightRule::FloorConcave { pieces } if pieces.iter().any(|p| p.slopes.len() != n) => {
                bad("slopes must have one entry per variable")
            }
            WeightRule::FloorConcave { .. } => Ok(()),
            WeightRule::Table { base, entries } => {
                if let Some(e) = entries
                    .iter()
                    .find(|e| e.exponent.len() != n || e.exponent.iter().sum::<u32>() > e.degree)
                {
                    return bad(&format!(
                        "table entry {:?} is not a monomial of degree {}",
                        e.exponent, e.degree
                    ));
                }
                base.validate(n)
            }
        }
    }
}

impl GradedNormSpec {
    pub fn monomial(n: usize, rule: WeightRule) -> Self {
        GradedNormSpec {
            n,
            variant: Variant::MonomialWeights { rule },
        }
    }

    pub fn trivial(n: usize) -> Self {
        GradedNormSpec::monomial(n, WeightRule::Zero)
    }

    pub fn degree_one(n: usize, base: DiagNorm) -> Self {
        GradedNormSpec {
            n,
            variant: Variant::DegreeOneGenerated { base },
        }
    }

    pub fn truncated(parent: GradedNormSpec, k: u32) -> Self {
        GradedNormSpec {
            n: parent.n,
            variant: Variant::Truncated {
                parent: Box::new(parent),
                k,
            },
        }
    }

    pub fn scaled(parent: GradedNormSpec, rule: ScaleRule) -> Self {
        GradedNormSpec {
            n: parent.n,
            variant: Variant::Scaled {
                parent: Box::new(parent),
                rule,
            },
        }
    }

    pub fn max_of(a: GradedNormSpec, b: GradedNormSpec) -> Self {
        GradedNormSpec {
            n: a.n,
            variant: Variant::MaxOf {
                a: Box::new(a),
                b: Box::new(b),
            },
        }
    }

    /// Structural checks: consistent dimensions and parameters.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Invalid(
                "projective dimension must be positive".into(),
            ));
        }
        let same_n = |child: &GradedNormSpec| {
            if child.n != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    got: child.n,
                });
            }
            child.validate()
        };
        match &self.variant {
            Variant::MonomialWeights { rule } => rule.validate(self.n),
            Variant::DegreeOneGenerated { base } if base.dim() != self.n + 1 => {
                Err(Error::DimensionMismatch {
                    expected: self.n + 1,
                    got: base.dim(),
                })
            }
            Variant::DegreeOneGenerated { .. } => Ok(()),
            Variant::Truncated { k: 0, .. } => {
                Err(Error::Invalid("truncation level must be positive".into()))
            }
            Variant::Truncated { parent, .. } | Variant::Scaled { parent, .. } => same_n(parent),
            Variant::MaxOf { a, b } => same_n(a).and(same_n(b)),
        }
    }

    /// Whether the norm is defined in degree `m`.
    pub fn defined_at(&self, m: u32) -> bool {
        match &self.variant {
            Variant::MonomialWeights { .. } | Variant::DegreeOneGenerated { .. } => true,
            Variant::Truncated { parent, k } => m.is_multiple_of(*k) && parent.defined_at(*k),
            Variant::Scaled { parent, .. } => parent.defined_at(m),
            Variant::MaxOf { a, b } => a.defined_at(m) && b.defined_at(m),
        }
    }

    /// Whether every degree is diagonal in the monomial basis.
    pub fn is_toric(&self) -> bool {
        match &self.variant {
            Variant::MonomialWeights { .. } => true,
            Variant::DegreeOneGenerated { base } => base.is_monomial_diagonal(),
            Variant::Truncated { parent, .. } | Variant::Scaled { parent, .. } => parent.is_toric(),
            Variant::MaxOf { a, b } => a.is_toric() && b.is_toric(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GradedNormSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }
}
