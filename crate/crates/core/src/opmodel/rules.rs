use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, JsonScalar, ZERO};

pub(crate) mod scalar {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        JsonScalar::from(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        JsonScalar::deserialize(d).map(Complex64::from)
    }
}

pub(crate) mod scalar_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|&z| JsonScalar::from(z)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex64>, D::Error> {
        Vec::<JsonScalar>::deserialize(d).map(|v| v.into_iter().map(Complex64::from).collect())
    }
}

fn one() -> Complex64 {
    c(1.0, 0.0)
}

fn is_one(z: &Complex64) -> bool {
    *z == one()
}

/// Closed-form rule `j ↦ τ_j` (1-based) for the diagonal of an operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiagonalRule {
    /// `τ_j = scale · ratio^j`.
    Geometric {
        ratio: f64,
        #[serde(default = "one", skip_serializing_if = "is_one", with = "scalar")]
        scale: Complex64,
    },
    /// `τ_j = a / j^p`.
    Power {
        #[serde(with = "scalar")]
        a: Complex64,
        p: f64,
    },
    /// `τ_j = scale · e^{iπj/q} / j^p`.
    PhasePower {
        q: f64,
        p: f64,
        #[serde(default = "one", skip_serializing_if = "is_one", with = "scalar")]
        scale: Complex64,
    },
    /// Explicit values followed by an infinite zero tail.
    List {
        #[serde(with = "scalar_vec")]
        values: Vec<Complex64>,
    },
    /// `τ_j = values[(j − 1) mod len]`.
    Periodic {
        #[serde(with = "scalar_vec")]
        values: Vec<Complex64>,
    },
    Constant {
        #[serde(with = "scalar")]
        value: Complex64,
    },
    /// `τ_{2k−1} = inner_k`, `τ_{2k} = 0`.
    ZeroInterleaved { inner: Box<DiagonalRule> },
    /// `τ_j = inner_j + offset`.
    Shifted {
        inner: Box<DiagonalRule>,
        #[serde(with = "scalar")]
        offset: Complex64,
    },
}

/// Dimension of a kernel or range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Finite(usize),
    Infinite,
}

impl DiagonalRule {
    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64, name: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::Input(format!("rule.{name} must be finite")))
            }
        };
        let finite_c = |z: Complex64, name: &str| {
            if z.re.is_finite() && z.im.is_finite() {
                Ok(())
            } else {
                Err(Error::Input(format!("rule.{name} must be finite")))
            }
        };
        match self {
            DiagonalRule::Geometric { ratio, scale } => {
                finite(*ratio, "ratio")?;
                finite_c(*scale, "scale")?;
                if ratio.abs() > 1.0 {
                    return Err(Error::Input(
                        "rule.ratio must satisfy |ratio| ≤ 1 for a bounded operator".into(),
                    ));
                }
            }
            DiagonalRule::Power { a, p } => {
                finite_c(*a, "a")?;
                finite(*p, "p")?;
                if *p < 0.0 {
                    return Err(Error::Input("rule.p must be ≥ 0 for a bounded operator".into()));
                }
            }
            DiagonalRule::PhasePower { q, p, scale } => {
                finite(*q, "q")?;
                finite(*p, "p")?;
                finite_c(*scale, "scale")?;
                if *q == 0.0 {
                    return Err(Error::Input("rule.q must be non-zero".into()));
                }
                if *p < 0.0 {
                    return Err(Error::Input("rule.p must be ≥ 0 for a bounded operator".into()));
                }
            }
            DiagonalRule::List { values } => {
                for (k, &z) in values.iter().enumerate() {
                    finite_c(z, &format!("values[{k}]"))?;
                }
            }
            DiagonalRule::Periodic { values } => {
                if values.is_empty() {
                    return Err(Error::Input("rule.values must be non-empty".into()));
                }
                for (k, &z) in values.iter().enumerate() {
                    finite_c(z, &format!("values[{k}]"))?;
                }
            }
            DiagonalRule::Constant { value } => finite_c(*value, "value")?,
            DiagonalRule::ZeroInterleaved { inner } => inner.validate()?,
            DiagonalRule::Shifted { inner, offset } => {
                inner.validate()?;
                finite_c(*offset, "offset")?;
            }
        }
        Ok(())
    }

    /// `τ_j` for `j ≥ 1`.
    pub fn value(&self, j: usize) -> Complex64 {
        debug_assert!(j >= 1);
        let jf = j as f64;
        match self {
            DiagonalRule::Geometric { ratio, scale } => scale * ratio.powi(j as i32),
            DiagonalRule::Power { a, p } => a / jf.powf(*p),
            DiagonalRule::PhasePower { q, p, scale } => {
                scale * Complex64::from_polar(1.0, PI * jf / q) / jf.powf(*p)
            }
            DiagonalRule::List { values } => values.get(j - 1).cloned().unwrap_or(ZERO),
            DiagonalRule::Periodic { values } => values[(j - 1) % values.len()],
            DiagonalRule::Constant { value } => *value,
            DiagonalRule::ZeroInterleaved { inner } => {
                if j % 2 == 1 {
                    inner.value(j.div_ceil(2))
                } else {
                    ZERO
                }
            }
            DiagonalRule::Shifted { inner, offset } => inner.value(j) + offset,
        }
    }

    /// `sup_j |τ_j|`, the operator norm of the diagonal operator.
    pub fn sup_modulus(&self) -> f64 {
        match self {
            DiagonalRule::Geometric { ratio, scale } => scale.norm() * ratio.abs(),
            DiagonalRule::Power { a, .. } => a.norm(),
            DiagonalRule::PhasePower { scale, .. } => scale.norm(),
            DiagonalRule::List { values } | DiagonalRule::Periodic { values } => {
                values.iter().map(|z| z.norm()).fold(0.0, f64::max)
            }
            DiagonalRule::Constant { value } => value.norm(),
            DiagonalRule::ZeroInterleaved { inner } => inner.sup_modulus(),
            DiagonalRule::Shifted { inner, offset } => {
                if *offset == ZERO {
                    inner.sup_modulus()
                } else {
                    // exact for the monotone rules, an upper bound otherwise
                    inner.sup_modulus() + offset.norm()
                }
            }
        }
    }

    /// Number of leading entries after which every entry vanishes, when the
    /// operator has finite rank.
    pub fn finite_support(&self) -> Option<usize> {
        match self {
            DiagonalRule::Geometric { ratio, scale } => {
                (*ratio == 0.0 || *scale == ZERO).then_some(0)
            }
            DiagonalRule::Power { a, .. } => (*a == ZERO).then_some(0),
            DiagonalRule::PhasePower { scale, .. } => (*scale == ZERO).then_some(0),
            DiagonalRule::List { values } => {
                Some(values.iter().rposition(|&z| z != ZERO).map_or(0, |k| k + 1))
            }
            DiagonalRule::Periodic { values } => values.iter().all(|&z| z == ZERO).then_some(0),
            DiagonalRule::Constant { value } => (*value == ZERO).then_some(0),
            DiagonalRule::ZeroInterleaved { inner } => {
                inner.finite_support().map(|s| if s == 0 { 0 } else { 2 * s - 1 })
            }
            DiagonalRule::Shifted { inner, offset } => {
                if *offset == ZERO {
                    inner.finite_support()
                } else {
                    None
                }
            }
        }
    }

    /// Dimension of the kernel of the diagonal operator.
    pub fn kernel_dim(&self) -> Dim {
        if self.finite_support().is_some() {
            return Dim::Infinite;
        }
        match self {
            DiagonalRule::Periodic { values } => {
                if values.iter().any(|&z| z == ZERO) {
                    Dim::Infinite
                } else {
                    Dim::Finite(0)
                }
            }
            DiagonalRule::ZeroInterleaved { .. } => Dim::Infinite,
            DiagonalRule::Shifted { inner, offset } if *offset == ZERO => inner.kernel_dim(),
            // the remaining infinite-rank rules never vanish
            _ => Dim::Finite(0),
        }
    }

    /// Whether `τ_j → 0`.
    pub fn is_null(&self) -> bool {
        if self.finite_support().is_some() {
            return true;
        }
        match self {
            DiagonalRule::Geometric { ratio, .. } => ratio.abs() < 1.0,
            DiagonalRule::Power { p, .. } | DiagonalRule::PhasePower { p, .. } => *p > 0.0,
            DiagonalRule::List { .. } => true,
            DiagonalRule::Periodic { .. } | DiagonalRule::Constant { .. } => false,
            DiagonalRule::ZeroInterleaved { inner } => inner.is_null(),
            DiagonalRule::Shifted { inner, offset } => *offset == ZERO && inner.is_null(),
        }
    }

    /// Whether `|τ_j|` is non-increasing along the non-zero entries in index
    /// order, so that index order is the order of decreasing modulus.
    pub fn monotone_modulus(&self) -> bool {
        match self {
            DiagonalRule::Geometric { ratio, .. } => ratio.abs() <= 1.0,
            DiagonalRule::Power { p, .. } | DiagonalRule::PhasePower { p, .. } => *p >= 0.0,
            DiagonalRule::List { values } => values
                .iter()
                .filter(|z| **z != ZERO)
                .collect::<Vec<_>>()
                .windows(2)
                .all(|w| w[0].norm() >= w[1].norm()),
            DiagonalRule::Periodic { values } => values.iter().all(|z| z.norm() == values[0].norm()),
            DiagonalRule::Constant { .. } => true,
            DiagonalRule::ZeroInterleaved { inner } => inner.monotone_modulus(),
            DiagonalRule::Shifted { inner, offset } => *offset == ZERO && inner.monotone_modulus(),
        }
    }

    /// The tail rule a named tail (`"geometric"`, `"power"`, `"finite"`)
    /// refers to for this diagonal.
    pub(crate) fn named_tail(&self, name: &str) -> Result<TailRule> {
        let mismatch = || {
            Err(Error::Input(format!(
                "decay.tail \"{name}\" does not match the diagonal rule"
            )))
        };
        match (name, self) {
            ("geometric", DiagonalRule::Geometric { ratio, scale }) => Ok(TailRule::Geometric {
                scale: scale.norm(),
                ratio: ratio.abs(),
            }),
            ("power", DiagonalRule::Power { a, p }) => Ok(TailRule::Power {
                scale: a.norm(),
                exponent: *p,
            }),
            ("power", DiagonalRule::PhasePower { p, scale, .. }) => Ok(TailRule::Power {
                scale: scale.norm(),
                exponent: *p,
            }),
            ("finite", DiagonalRule::List { values }) => {
                let mut tails = vec![0.0; values.len()];
                let mut acc = 0.0;
                for n in (0..values.len()).rev() {
                    acc += values[n].norm();
                    tails[n] = acc;
                }
                Ok(TailRule::Finite { tails })
            }
            (_, DiagonalRule::ZeroInterleaved { inner }) => Ok(TailRule::Interleaved {
                inner: Box::new(inner.named_tail(name)?),
            }),
            (_, DiagonalRule::Shifted { inner, offset }) if *offset == ZERO => inner.named_tail(name),
            ("geometric" | "power" | "finite", _) => mismatch(),
            _ => Err(Error::Input(format!(
                "decay.tail: unknown named tail \"{name}\" (expected geometric, power or finite)"
            ))),
        }
    }
}

/// Closed-form bound `n ↦ Σ_{j>n} |s_j|` on the singular-value tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailRule {
    /// `scale · ratio^{n+1} / (1 − ratio)`.
    Geometric { scale: f64, ratio: f64 },
    /// `scale · n^{1−p} / (p − 1)` for `n ≥ 1`, `scale · p / (p − 1)` at `n = 0`.
    Power { scale: f64, exponent: f64 },
    /// `tails[n]` for `n < len`, zero beyond.
    Finite { tails: Vec<f64> },
    /// Tail of a sequence with zeros at the even positions: `inner(⌊(n+1)/2⌋)`.
    Interleaved { inner: Box<TailRule> },
}

impl TailRule {
    pub fn bound(&self, n: usize) -> f64 {
        match self {
            TailRule::Geometric { scale, ratio } => {
                scale * ratio.powi(n as i32 + 1) / (1.0 - ratio)
            }
            TailRule::Power { scale, exponent } => {
                let p = *exponent;
                if n == 0 {
                    scale * p / (p - 1.0)
                } else {
                    scale * (n as f64).powf(1.0 - p) / (p - 1.0)
                }
            }
            TailRule::Finite { tails } => tails.get(n).cloned().unwrap_or(0.0),
            TailRule::Interleaved { inner } => inner.bound((n + 1) / 2),
        }
    }

    /// Checks that the rule is non-increasing and tends to zero.
    pub fn validate(&self) -> Result<()> {
        match self {
            TailRule::Geometric { scale, ratio } => {
                if !(*scale >= 0.0 && scale.is_finite()) || !(0.0..1.0).contains(ratio) {
                    return Err(Error::Input(
                        "decay.tail: geometric tail needs scale ≥ 0 and 0 ≤ ratio < 1".into(),
                    ));
                }
            }
            TailRule::Power { scale, exponent } => {
                if !(*scale >= 0.0 && scale.is_finite()) || !(*exponent > 1.0 && exponent.is_finite()) {
                    return Err(Error::Input(
                        "decay.tail: power tail needs scale ≥ 0 and exponent > 1 (summable)".into(),
                    ));
                }
            }
            TailRule::Finite { tails } => {
                if tails.iter().any(|t| !(*t >= 0.0 && t.is_finite()))
                    || tails.windows(2).any(|w| w[1] > w[0])
                {
                    return Err(Error::Input(
                        "decay.tail: finite tails must be non-negative and non-increasing".into(),
                    ));
                }
            }
            TailRule::Interleaved { inner } => inner.validate()?,
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_tail_matches_series() {
        let rule = DiagonalRule::Geometric { ratio: 0.5, scale: one() };
        let tail = rule.named_tail("geometric").unwrap();
        assert_eq!(tail.bound(20), 0.5f64.powi(20));
        let direct: f64 = (21..200).map(|j| rule.value(j).norm()).sum();
        assert!((tail.bound(20) - direct).abs() < 1e-18);
    }

    #[test]
    fn power_tail_dominates_partial_sums() {
        let rule = DiagonalRule::Power { a: c(2.0, 0.0), p: 2.0 };
        let tail = rule.named_tail("power").unwrap();
        for n in [0usize, 1, 5, 40] {
            let partial: f64 = (n + 1..20_000).map(|j| rule.value(j).norm()).sum();
            assert!(partial <= tail.bound(n));
        }
    }

    #[test]
    fn interleaved_rule_and_tail() {
        let rule = DiagonalRule::ZeroInterleaved {
            inner: Box::new(DiagonalRule::Power { a: one(), p: 1.0 }),
        };
        let prefix: Vec<Complex64> = (1..=6).map(|j| rule.value(j)).collect();
        assert_eq!(prefix, vec![one(), ZERO, c(0.5, 0.0), ZERO, c(1.0 / 3.0, 0.0), ZERO]);
        assert_eq!(rule.kernel_dim(), Dim::Infinite);
        assert!(rule.is_null() && rule.monotone_modulus());

        let geo = DiagonalRule::ZeroInterleaved {
            inner: Box::new(DiagonalRule::Geometric { ratio: 0.5, scale: one() }),
        };
        let tail = geo.named_tail("geometric").unwrap();
        for n in 0..12 {
            let direct: f64 = (n + 1..400).map(|j| geo.value(j).norm()).sum();
            assert!((tail.bound(n) - direct).abs() < 1e-15, "n = {n}");
        }
    }

    #[test]
    fn phase_power_values() {
        let rule = DiagonalRule::PhasePower { q: 2.0, p: 1.0, scale: one() };
        // e^{iπj/2}/j = i^j / j
        assert!((rule.value(1) - c(0.0, 1.0)).norm() < 1e-15);
        assert!((rule.value(2) - c(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_unbounded_and_non_summable_rules() {
        assert!(DiagonalRule::Geometric { ratio: 2.0, scale: one() }.validate().is_err());
        assert!(TailRule::Power { scale: 1.0, exponent: 1.0 }.validate().is_err());
        assert!(TailRule::Finite { tails: vec![1.0, 2.0] }.validate().is_err());
        assert!(DiagonalRule::Constant { value: one() }.named_tail("geometric").is_err());
    }

    #[test]
    fn json_shape() {
        let rule: DiagonalRule = serde_json::from_str(r#"{"type":"geometric","ratio":0.5}"#).unwrap();
        assert_eq!(rule, DiagonalRule::Geometric { ratio: 0.5, scale: one() });
        let rule: DiagonalRule =
            serde_json::from_str(r#"{"type":"list","values":[1, [0, 2]]}"#).unwrap();
        assert_eq!(rule.value(2), c(0.0, 2.0));
        assert_eq!(rule.value(3), ZERO);
        assert!(serde_json::from_str::<DiagonalRule>(r#"{"type":"geometric","ratoi":0.5}"#).is_err());
    }
}
