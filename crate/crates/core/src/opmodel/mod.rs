//! Bounded operators on `ℓ²` given by their matrix in one fixed orthonormal
//! basis.
//!
//! Basis changes are never represented as infinite unitaries; callers
//! conjugate truncations by explicit finite unitaries instead.

mod rules;
mod spectral;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{op_norm, CMat, MatrixJson, ONE, ZERO};

pub use rules::{DiagonalRule, Dim, TailRule};
pub use spectral::{modified_eig_seq, schmidt, trace_norm, EigSeq, SchmidtTriple, SeqClass};

/// Entry generator `(i, j) ↦ ⟨e_i, A e_j⟩` for operators that are neither
/// diagonal nor finite matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum EntryRule {
    /// Unilateral shift with ones on the superdiagonal, `S(i, j) = δ_{i, j−1}`.
    Shift,
    /// A matrix on the leading block and zeros elsewhere. With an ambient
    /// dimension the operator lives on `ℂ^ambient`.
    Embedded {
        matrix: MatrixJson,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ambient: Option<usize>,
    },
    /// `Π_k B Π_k`: the entries of `inner` for `i, j ≤ k`, zero elsewhere.
    Block { inner: Box<OperatorSpec>, k: usize },
}

/// How the matrix entries of an operator are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    FiniteMatrix(CMat),
    Diagonal(DiagonalRule),
    Entrywise(EntryRule),
}

/// Summability metadata supplied with a spec.
#[derive(Debug, Clone, PartialEq)]
pub enum Decay {
    TraceClassWithTailBound(TailRule),
    NullSequence,
    BoundedOnly,
}

/// A bounded operator in the canonical basis with decay metadata and an
/// operator-norm bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct OperatorSpec {
    kind: OperatorKind,
    decay: Decay,
    norm_bound: f64,
}

impl OperatorSpec {
    /// Validates the pieces and fills in the norm bound when it is absent.
    pub fn new(kind: OperatorKind, decay: Decay, norm_bound: Option<f64>) -> Result<Self> {
        match &kind {
            OperatorKind::FiniteMatrix(m) => {
                if m.nrows() != m.ncols() {
                    return Err(Error::Input(format!(
                        "matrix must be square, got {}×{}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Input("matrix entries must be finite".into()));
                }
            }
            OperatorKind::Diagonal(rule) => rule.validate()?,
            OperatorKind::Entrywise(EntryRule::Embedded { matrix, ambient }) => {
                let m = matrix.to_matrix()?;
                if m.nrows() != m.ncols() {
                    return Err(Error::Input("rule.matrix must be square".into()));
                }
                if let Some(dim) = ambient {
                    if *dim < m.nrows() {
                        return Err(Error::Input(format!(
                            "rule.ambient = {dim} is smaller than the embedded {}×{} block",
                            m.nrows(),
                            m.nrows()
                        )));
                    }
                }
            }
            OperatorKind::Entrywise(EntryRule::Block { k, .. }) => {
                if *k == 0 {
                    return Err(Error::Input("rule.k must be ≥ 1".into()));
                }
            }
            OperatorKind::Entrywise(EntryRule::Shift) => {}
        }
        if let Decay::TraceClassWithTailBound(tail) = &decay {
            tail.validate()?;
        }
        let computed = natural_norm(&kind)?;
        let norm_bound = match norm_bound {
            None => computed,
            Some(b) if !(b >= 0.0 && b.is_finite()) => {
                return Err(Error::Input("norm_bound must be a finite non-negative real".into()))
            }
            Some(b) if b + 1e-12 * b.max(1.0) < computed => {
                return Err(Error::Input(format!(
                    "norm_bound {b} is below the operator norm {computed}"
                )))
            }
            Some(b) => b,
        };
        let spec = OperatorSpec {
            kind,
            decay,
            norm_bound,
        };
        spec.check_tail_against_diagonal()?;
        Ok(spec)
    }

    pub fn diagonal(rule: DiagonalRule, decay: Decay) -> Result<Self> {
        Self::new(OperatorKind::Diagonal(rule), decay, None)
    }

    /// Diagonal operator whose trace-class tail is the named closed form
    /// derived from the rule (`geometric`, `power` or `finite`).
    pub fn diagonal_trace_class(rule: DiagonalRule, tail: &str) -> Result<Self> {
        let tail = rule.named_tail(tail)?;
        Self::diagonal(rule, Decay::TraceClassWithTailBound(tail))
    }

    pub fn finite(m: CMat) -> Result<Self> {
        let decay = Decay::TraceClassWithTailBound(finite_tail(&m));
        Self::new(OperatorKind::FiniteMatrix(m), decay, None)
    }

    pub fn identity() -> Self {
        Self::diagonal(DiagonalRule::Constant { value: ONE }, Decay::BoundedOnly)
            .expect("identity is a valid spec")
    }

    pub fn shift() -> Self {
        Self::new(OperatorKind::Entrywise(EntryRule::Shift), Decay::BoundedOnly, Some(1.0))
            .expect("shift is a valid spec")
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn decay(&self) -> &Decay {
        &self.decay
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// Dimension of the underlying space when finite.
    pub fn dimension(&self) -> Option<usize> {
        match &self.kind {
            OperatorKind::FiniteMatrix(m) => Some(m.nrows()),
            OperatorKind::Entrywise(EntryRule::Embedded { ambient, .. }) => *ambient,
            OperatorKind::Entrywise(EntryRule::Block { inner, .. }) => inner.dimension(),
            _ => None,
        }
    }

    pub fn is_trace_class(&self) -> bool {
        matches!(self.decay, Decay::TraceClassWithTailBound(_))
    }

    /// Compactness from the metadata or, failing that, the structure.
    pub fn is_compact(&self) -> bool {
        match (&self.decay, &self.kind) {
            (Decay::TraceClassWithTailBound(_) | Decay::NullSequence, _) => true,
            (_, OperatorKind::FiniteMatrix(_)) => true,
            (_, OperatorKind::Diagonal(rule)) => rule.is_null(),
            (_, OperatorKind::Entrywise(EntryRule::Shift)) => false,
            (_, OperatorKind::Entrywise(_)) => true,
        }
    }

    /// Tail bound `Σ_{j>n} |s_j|` when the spec is trace class.
    pub fn tail_bound(&self, n: usize) -> Option<f64> {
        match &self.decay {
            Decay::TraceClassWithTailBound(tail) => Some(tail.bound(n)),
            _ => None,
        }
    }

    /// `⟨e_i, A e_j⟩` with 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> Result<Complex64> {
        if i == 0 || j == 0 {
            return Err(Error::Evaluation {
                row: i,
                col: j,
                reason: "indices are 1-based".into(),
            });
        }
        let out_of_range = |dim: usize| Error::Evaluation {
            row: i,
            col: j,
            reason: format!("operator acts on a {dim}-dimensional space"),
        };
        let z = match &self.kind {
            OperatorKind::FiniteMatrix(m) => {
                if i > m.nrows() || j > m.nrows() {
                    return Err(out_of_range(m.nrows()));
                }
                m[(i - 1, j - 1)]
            }
            OperatorKind::Diagonal(rule) => {
                if i == j {
                    rule.value(j)
                } else {
                    ZERO
                }
            }
            OperatorKind::Entrywise(EntryRule::Shift) => {
                if j == i + 1 {
                    ONE
                } else {
                    ZERO
                }
            }
            OperatorKind::Entrywise(EntryRule::Embedded { matrix, ambient }) => {
                if let Some(dim) = ambient {
                    if i > *dim || j > *dim {
                        return Err(out_of_range(*dim));
                    }
                }
                let block = &matrix.0;
                if i <= block.len() && j <= block.len() {
                    block[i - 1][j - 1].into()
                } else {
                    ZERO
                }
            }
            OperatorKind::Entrywise(EntryRule::Block { inner, k }) => {
                if let Some(dim) = inner.dimension() {
                    if i > dim || j > dim {
                        return Err(out_of_range(dim));
                    }
                }
                if i <= *k && j <= *k {
                    inner.entry(i, j)?
                } else {
                    ZERO
                }
            }
        };
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Evaluation {
                row: i,
                col: j,
                reason: "generator produced a non-finite value".into(),
            });
        }
        Ok(z)
    }

    /// The leading `n × n` block `[A]_n`.
    pub fn truncate(&self, n: usize) -> Result<CMat> {
        if n == 0 {
            return Err(Error::domain("truncation size must be ≥ 1"));
        }
        match &self.kind {
            OperatorKind::Diagonal(rule) => {
                let mut m = CMat::zeros(n, n);
                for j in 1..=n {
                    m[(j - 1, j - 1)] = rule.value(j);
                }
                Ok(m)
            }
            _ => {
                let mut m = CMat::zeros(n, n);
                for i in 1..=n {
                    for j in 1..=n {
                        m[(i - 1, j - 1)] = self.entry(i, j)?;
                    }
                }
                Ok(m)
            }
        }
    }

    /// The `k`-th block approximation `Π_k B Π_k`.
    pub fn block_approx(&self, k: usize) -> Result<OperatorSpec> {
        if k == 0 {
            return Err(Error::domain("block size must be ≥ 1"));
        }
        Ok(OperatorSpec {
            kind: OperatorKind::Entrywise(EntryRule::Block {
                inner: Box::new(self.clone()),
                k,
            }),
            decay: self.decay.clone(),
            norm_bound: self.norm_bound,
        })
    }

    /// `Σ_{j≤n} ⟨e_j, A e_j⟩` together with the tail bound at `n`.
    pub fn trace(&self, n: usize) -> Result<(Complex64, f64)> {
        let Decay::TraceClassWithTailBound(tail) = &self.decay else {
            return Err(Error::domain("trace needs a trace-class spec with a tail bound"));
        };
        let mut value = ZERO;
        for j in 1..=n {
            value += self.entry(j, j)?;
        }
        Ok((value, tail.bound(n)))
    }

    /// Rejects diagonal tails contradicted by the first entries.
    fn check_tail_against_diagonal(&self) -> Result<()> {
        let (OperatorKind::Diagonal(rule), Decay::TraceClassWithTailBound(tail)) =
            (&self.kind, &self.decay)
        else {
            return Ok(());
        };
        const PROBE: usize = 1024;
        let moduli: Vec<f64> = (1..=PROBE).map(|j| rule.value(j).norm()).collect();
        let mut suffix = vec![0.0; PROBE + 1];
        for n in (0..PROBE).rev() {
            suffix[n] = suffix[n + 1] + moduli[n];
        }
        let mut n = 0;
        while n < PROBE {
            let bound = tail.bound(n);
            if suffix[n] > bound * (1.0 + 1e-9) + 1e-300 {
                return Err(Error::Input(format!(
                    "decay.tail bound {bound:e} at n = {n} is below the partial sum {:e} of the diagonal",
                    suffix[n]
                )));
            }
            n = if n == 0 { 1 } else { 2 * n };
        }
        Ok(())
    }
}

/// Embeds an `n × n` matrix as the leading block of an operator, zero
/// elsewhere. `dim = None` stands for the infinite-dimensional space.
pub fn embed(m: &CMat, dim: Option<usize>) -> Result<OperatorSpec> {
    if m.nrows() != m.ncols() {
        return Err(Error::size("embedded matrix must be square"));
    }
    if let Some(d) = dim {
        if d < m.nrows() {
            return Err(Error::domain(format!(
                "cannot embed a {}×{} matrix into dimension {d}",
                m.nrows(),
                m.nrows()
            )));
        }
    }
    OperatorSpec::new(
        OperatorKind::Entrywise(EntryRule::Embedded {
            matrix: MatrixJson::from_matrix(m),
            ambient: dim,
        }),
        Decay::TraceClassWithTailBound(finite_tail(m)),
        None,
    )
}

/// Exact singular-value tails of a finite matrix.
fn finite_tail(m: &CMat) -> TailRule {
    let mut s: Vec<f64> = if m.is_empty() {
        Vec::new()
    } else {
        m.clone().svd(false, false).singular_values.iter().cloned().collect()
    };
    s.sort_by(|a, b| b.total_cmp(a));
    let mut tails = vec![0.0; s.len()];
    let mut acc = 0.0;
    for n in (0..s.len()).rev() {
        acc += s[n];
        tails[n] = acc;
    }
    // rounding can break monotonicity by an ulp
    for n in 1..tails.len() {
        tails[n] = tails[n].min(tails[n - 1]);
    }
    TailRule::Finite { tails }
}

fn natural_norm(kind: &OperatorKind) -> Result<f64> {
    Ok(match kind {
        OperatorKind::FiniteMatrix(m) => op_norm(m),
        OperatorKind::Diagonal(rule) => rule.sup_modulus(),
        OperatorKind::Entrywise(EntryRule::Shift) => 1.0,
        OperatorKind::Entrywise(EntryRule::Embedded { matrix, .. }) => op_norm(&matrix.to_matrix()?),
        OperatorKind::Entrywise(EntryRule::Block { inner, .. }) => inner.norm_bound,
    })
}

/// On-disk layout of an [`OperatorSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawSpec {
    FiniteMatrix {
        matrix: MatrixJson,
        #[serde(default)]
        decay: RawDecay,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        norm_bound: Option<f64>,
    },
    Diagonal {
        rule: DiagonalRule,
        #[serde(default)]
        decay: RawDecay,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        norm_bound: Option<f64>,
    },
    Entrywise {
        rule: EntryRule,
        #[serde(default)]
        decay: RawDecay,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        norm_bound: Option<f64>,
    },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawDecay {
    TraceClass {
        tail: RawTail,
    },
    NullSequence,
    #[default]
    Bounded,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RawTail {
    Named(String),
    Rule(TailRule),
}

impl TryFrom<RawSpec> for OperatorSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let (kind, decay, norm_bound) = match raw {
            RawSpec::FiniteMatrix { matrix, decay, norm_bound } => {
                (OperatorKind::FiniteMatrix(matrix.to_matrix()?), decay, norm_bound)
            }
            RawSpec::Diagonal { rule, decay, norm_bound } => (OperatorKind::Diagonal(rule), decay, norm_bound),
            RawSpec::Entrywise { rule, decay, norm_bound } => (OperatorKind::Entrywise(rule), decay, norm_bound),
        };
        let decay = match decay {
            RawDecay::Bounded => Decay::BoundedOnly,
            RawDecay::NullSequence => Decay::NullSequence,
            RawDecay::TraceClass { tail: RawTail::Rule(rule) } => Decay::TraceClassWithTailBound(rule),
            RawDecay::TraceClass { tail: RawTail::Named(name) } => {
                Decay::TraceClassWithTailBound(match (&kind, name.as_str()) {
                    (OperatorKind::Diagonal(rule), _) => rule.named_tail(&name)?,
                    (OperatorKind::FiniteMatrix(m), "finite") => finite_tail(m),
                    (OperatorKind::Entrywise(EntryRule::Embedded { matrix, .. }), "finite") => {
                        finite_tail(&matrix.to_matrix()?)
                    }
                    _ => {
                        return Err(Error::Input(format!(
                            "decay.tail \"{name}\" cannot be derived for this kind; give an explicit tail rule"
                        )))
                    }
                })
            }
        };
        OperatorSpec::new(kind, decay, norm_bound)
    }
}

impl From<OperatorSpec> for RawSpec {
    fn from(spec: OperatorSpec) -> Self {
        let decay = match spec.decay {
            Decay::BoundedOnly => RawDecay::Bounded,
            Decay::NullSequence => RawDecay::NullSequence,
            Decay::TraceClassWithTailBound(rule) => RawDecay::TraceClass {
                tail: RawTail::Rule(rule),
            },
        };
        let norm_bound = Some(spec.norm_bound);
        match spec.kind {
            OperatorKind::FiniteMatrix(m) => RawSpec::FiniteMatrix {
                matrix: MatrixJson::from_matrix(&m),
                decay,
                norm_bound,
            },
            OperatorKind::Diagonal(rule) => RawSpec::Diagonal { rule, decay, norm_bound },
            OperatorKind::Entrywise(rule) => RawSpec::Entrywise { rule, decay, norm_bound },
        }
    }
}
