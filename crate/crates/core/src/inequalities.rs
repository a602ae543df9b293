//! Left and right sides of the triangle and tetrahedron inequalities, their
//! oriented gaps, and a uniform evaluator.
//!
//! Every inequality is homogeneous of degree one in the side lengths. Gaps
//! are oriented so that a positive gap means the inequality holds.

use std::f64::consts::SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Shape, Tetrahedron, Triangle};

pub const SQRT_3: f64 = 1.732_050_807_568_877_2;
pub const SQRT_6: f64 = 2.449_489_742_783_178;

/// `k0 = 2 + sqrt(2)`, the best constant of the tetrahedron pair-sum bound.
pub const K0: f64 = 2.0 + SQRT_2;
/// `3 sqrt(3) (2 - sqrt(2))`, inradius coefficient of the triangle bound.
pub const C_TRI: f64 = 3.0 * SQRT_3 * (2.0 - SQRT_2);
/// `12 sqrt(3) (2 - sqrt(2))`, inradius coefficient of the refined bound.
pub const C_REFINED: f64 = 12.0 * SQRT_3 * (2.0 - SQRT_2);
/// `6 sqrt(6) (2 k0 - 5 sqrt(2))`; negative.
pub const C_CONJ3: f64 = 6.0 * SQRT_6 * (2.0 * K0 - 5.0 * SQRT_2);

/// Largest exponent accepted by the power-sum evaluators.
pub const MAX_EXPONENT: u32 = 1000;

/// Relative tolerance used to classify a gap as a boundary case.
pub const EVAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub k0: f64,
    pub c_tri: f64,
    pub c_refined: f64,
    pub c_conj3: f64,
}

impl Constants {
    pub const VALUES: Constants = Constants {
        k0: K0,
        c_tri: C_TRI,
        c_refined: C_REFINED,
        c_conj3: C_CONJ3,
    };
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InequalityError {
    #[error("exponent n must satisfy 2 <= n <= {MAX_EXPONENT}, got {0}")]
    InvalidExponent(u32),
    #[error("constant k must be finite and positive, got {0}")]
    InvalidConstant(f64),
    #[error("inequality {inequality} applies to a {expected}, got a {got}")]
    KindMismatch {
        inequality: String,
        expected: ShapeKind,
        got: ShapeKind,
    },
    #[error("n_max must be between 3 and {MAX_EXPONENT}, got {0}")]
    InvalidScanRange(u32),
}

/// Integer exponent `n` with `2 <= n <= MAX_EXPONENT`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Exponent(u32);

impl Exponent {
    pub fn new(n: u32) -> Result<Self, InequalityError> {
        if (2..=MAX_EXPONENT).contains(&n) {
            Ok(Self(n))
        } else {
            Err(InequalityError::InvalidExponent(n))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// `2^(1/n)`.
    pub fn root_of_two(self) -> f64 {
        2f64.powf(1.0 / self.0 as f64)
    }
}

impl TryFrom<u32> for Exponent {
    type Error = InequalityError;

    fn try_from(n: u32) -> Result<Self, Self::Error> {
        Exponent::new(n)
    }
}

impl From<Exponent> for u32 {
    fn from(e: Exponent) -> u32 {
        e.0
    }
}

/// Finite positive multiplier `k` of the pair-sum bound.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PositiveConstant(f64);

impl PositiveConstant {
    pub fn new(k: f64) -> Result<Self, InequalityError> {
        if k.is_finite() && k > 0.0 {
            Ok(Self(k))
        } else {
            Err(InequalityError::InvalidConstant(k))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for PositiveConstant {
    type Error = InequalityError;

    fn try_from(k: f64) -> Result<Self, Self::Error> {
        PositiveConstant::new(k)
    }
}

impl From<PositiveConstant> for f64 {
    fn from(k: PositiveConstant) -> f64 {
        k.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Triangle,
    Tetrahedron,
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeKind::Triangle => f.write_str("triangle"),
            ShapeKind::Tetrahedron => f.write_str("tetrahedron"),
        }
    }
}

impl Shape {
    pub fn kind(&self) -> ShapeKind {
        match self {
            Shape::Triangle(_) => ShapeKind::Triangle,
            Shape::Tetrahedron(_) => ShapeKind::Tetrahedron,
        }
    }
}

/// Selects one of the inequalities.
///
/// | id          | relation                                               |
/// |-------------|--------------------------------------------------------|
/// | `powermean` | `2 sqrt(2) s <= sum sqrt(a^2 + b^2)`                    |
/// | `zhouhu`    | `sum sqrt(a^2 + b^2) < (2 + sqrt(2)) s`                 |
/// | `ye`        | `sum (a^n + b^n)^(1/n) < (2 + 2^(1/n)) s`               |
/// | `conj1`     | `sum (a^n + b^n)^(1/n) < (2 + 2^(1/n)) s - 3 sqrt(3) (2 - 2^(1/n)) r` |
/// | `conj2`     | `pair_sum <= k sum a_i`                                 |
/// | `conj3`     | `pair_sum <= k0 sum a_i - 6 sqrt(6) (2 k0 - 5 sqrt(2)) rho` |
/// | `refined3`  | `pair_sum <= k0 sum a_i - 12 sqrt(3) (2 - sqrt(2)) rho` |
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum InequalityId {
    #[serde(rename = "powermean")]
    PowerMeanLower,
    #[serde(rename = "zhouhu")]
    ZhouHu,
    Ye {
        n: Exponent,
    },
    Conj1 {
        n: Exponent,
    },
    Conj2 {
        k: PositiveConstant,
    },
    Conj3,
    Refined3,
}

impl InequalityId {
    pub fn ye(n: u32) -> Result<Self, InequalityError> {
        Ok(Self::Ye {
            n: Exponent::new(n)?,
        })
    }

    pub fn conj1(n: u32) -> Result<Self, InequalityError> {
        Ok(Self::Conj1 {
            n: Exponent::new(n)?,
        })
    }

    pub fn conj2(k: f64) -> Result<Self, InequalityError> {
        Ok(Self::Conj2 {
            k: PositiveConstant::new(k)?,
        })
    }

    /// Builds an id from its command-line name plus optional parameters.
    pub fn from_parts(name: &str, n: Option<u32>, k: Option<f64>) -> Result<Self, String> {
        let need_n = || n.ok_or_else(|| format!("inequality '{name}' requires --n"));
        let id = match name {
            "powermean" => Self::PowerMeanLower,
            "zhouhu" => Self::ZhouHu,
            "ye" => Self::ye(need_n()?).map_err(|e| e.to_string())?,
            "conj1" => Self::conj1(need_n()?).map_err(|e| e.to_string())?,
            "conj2" => Self::conj2(k.unwrap_or(K0)).map_err(|e| e.to_string())?,
            "conj3" => Self::Conj3,
            "refined3" => Self::Refined3,
            other => return Err(format!("unknown inequality '{other}'")),
        };
        Ok(id)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PowerMeanLower => "powermean",
            Self::ZhouHu => "zhouhu",
            Self::Ye { .. } => "ye",
            Self::Conj1 { .. } => "conj1",
            Self::Conj2 { .. } => "conj2",
            Self::Conj3 => "conj3",
            Self::Refined3 => "refined3",
        }
    }

    pub fn exponent(&self) -> Option<u32> {
        match self {
            Self::Ye { n } | Self::Conj1 { n } => Some(n.get()),
            _ => None,
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            Self::Conj2 { k } => Some(k.get()),
            _ => None,
        }
    }

    pub fn kind(&self) -> ShapeKind {
        match self {
            Self::PowerMeanLower | Self::ZhouHu | Self::Ye { .. } | Self::Conj1 { .. } => {
                ShapeKind::Triangle
            }
            Self::Conj2 { .. } | Self::Conj3 | Self::Refined3 => ShapeKind::Tetrahedron,
        }
    }

    /// Whether the relation is `<` (as opposed to `<=`).
    pub fn is_strict(&self) -> bool {
        matches!(self, Self::ZhouHu | Self::Ye { .. } | Self::Conj1 { .. })
    }

    /// Whether the evaluated side is a lower bound (`rhs <= lhs`).
    fn is_lower_bound(&self) -> bool {
        matches!(self, Self::PowerMeanLower)
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ye { n } | Self::Conj1 { n } => write!(f, "{}(n={})", self.name(), n.get()),
            Self::Conj2 { k } => write!(f, "conj2(k={})", k.get()),
            _ => f.write_str(self.name()),
        }
    }
}

/// `f(a, b) + f(b, c) + f(c, a)`.
pub fn cyclic_sum<F: Fn(f64, f64) -> f64>(f: F, t: &Triangle) -> f64 {
    t.cyclic_pairs().iter().map(|&(x, y)| f(x, y)).sum()
}

/// `(x^n + y^n)^(1/n)` evaluated as `m (1 + (q/m)^n)^(1/n)` with `m` the
/// larger argument, so it never overflows.
pub fn power_mean_pair(x: f64, y: f64, n: Exponent) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == 0.0 {
        return 0.0;
    }
    let q = lo / hi;
    let n = n.get();
    hi * (1.0 + q.powi(n as i32)).powf(1.0 / n as f64)
}

/// Cyclic sum of `(a^n + b^n)^(1/n)`.
pub fn power_sum(t: &Triangle, n: Exponent) -> f64 {
    cyclic_sum(|x, y| power_mean_pair(x, y, n), t)
}

/// Right side of the conjectured bound,
/// `(2 + 2^(1/n)) s - 3 sqrt(3) (2 - 2^(1/n)) r`.
///
/// At `n = 2` this is the upper bound of the proved sandwich inequality.
pub fn conj1_rhs(t: &Triangle, n: Exponent) -> f64 {
    let root = n.root_of_two();
    (2.0 + root) * t.semiperimeter() - 3.0 * SQRT_3 * (2.0 - root) * t.inradius()
}

/// `conj1_rhs - power_sum`; negative means the conjectured bound fails.
pub fn conj1_gap(t: &Triangle, n: Exponent) -> f64 {
    conj1_rhs(t, n) - power_sum(t, n)
}

/// `2 sqrt(2) s`, the power-mean lower bound of the quadratic pair sum.
pub fn power_mean_lower(t: &Triangle) -> f64 {
    2.0 * SQRT_2 * t.semiperimeter()
}

/// `(2 + sqrt(2)) s`.
pub fn zhou_hu_rhs(t: &Triangle) -> f64 {
    (2.0 + SQRT_2) * t.semiperimeter()
}

/// `(2 + 2^(1/n)) s`.
pub fn ye_rhs(t: &Triangle, n: Exponent) -> f64 {
    (2.0 + n.root_of_two()) * t.semiperimeter()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapScan {
    /// `(n, g(n))` for `n = 2..=n_max`.
    pub values: Vec<(u32, f64)>,
    pub strictly_decreasing: bool,
}

/// Tabulates `conj1_gap(t, n)` for `n = 2..=n_max`.
pub fn scan_gap_monotonicity(t: &Triangle, n_max: u32) -> Result<GapScan, InequalityError> {
    if !(3..=MAX_EXPONENT).contains(&n_max) {
        return Err(InequalityError::InvalidScanRange(n_max));
    }
    let values: Vec<(u32, f64)> = (2..=n_max)
        .map(|n| (n, conj1_gap(t, Exponent(n))))
        .collect();
    let strictly_decreasing = values.windows(2).all(|w| w[1].1 - w[0].1 < 0.0);
    Ok(GapScan {
        values,
        strictly_decreasing,
    })
}

/// The twelve face-pair terms: for each face, `sum sqrt(x^2 + y^2)` over its
/// three edge pairs.
pub fn tet_pair_sum(t: &Tetrahedron) -> f64 {
    t.faces().iter().map(|f| cyclic_sum(f64::hypot, f)).sum()
}

/// `tet_pair_sum / sum a_i`; bounded above by `k0`.
pub fn pair_ratio(t: &Tetrahedron) -> f64 {
    tet_pair_sum(t) / t.total_edge_length()
}

/// `k sum a_i`.
pub fn conj2_rhs(t: &Tetrahedron, k: PositiveConstant) -> f64 {
    k.get() * t.total_edge_length()
}

/// `k0 sum a_i - 3 sqrt(3) (2 - sqrt(2)) sum r_i`: the triangle bound applied
/// face by face.
pub fn face_inradius_rhs(t: &Tetrahedron) -> f64 {
    K0 * t.total_edge_length() - C_TRI * t.face_inradius_sum()
}

/// `k0 sum a_i - 6 sqrt(6) (2 k0 - 5 sqrt(2)) rho`.
pub fn conj3_rhs(t: &Tetrahedron) -> f64 {
    K0 * t.total_edge_length() - C_CONJ3 * t.inradius()
}

/// `k0 sum a_i - 12 sqrt(3) (2 - sqrt(2)) rho`.
pub fn refined_rhs(t: &Tetrahedron) -> f64 {
    K0 * t.total_edge_length() - C_REFINED * t.inradius()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    /// `|gap|` within the evaluation tolerance.
    Boundary,
}

/// `EVAL_TOLERANCE * max(|lhs|, |rhs|)`.
pub fn eval_tolerance(lhs: f64, rhs: f64) -> f64 {
    EVAL_TOLERANCE * lhs.abs().max(rhs.abs())
}

/// One inequality evaluated on one shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub inequality: String,
    pub n: Option<u32>,
    pub k: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub satisfied: bool,
    pub strict: bool,
}

impl EvalReport {
    pub fn tolerance(&self) -> f64 {
        eval_tolerance(self.lhs, self.rhs)
    }

    pub fn verdict(&self) -> Verdict {
        classify(self.gap, self.tolerance())
    }
}

fn classify(gap: f64, tol: f64) -> Verdict {
    if gap > tol {
        Verdict::Satisfied
    } else if gap < -tol {
        Verdict::Violated
    } else {
        Verdict::Boundary
    }
}

/// `(lhs, rhs)` as printed, i.e. the relation reads `lhs < rhs` or
/// `lhs <= rhs`, except for the power-mean lower bound which reads
/// `rhs <= lhs`.
fn sides(id: &InequalityId, shape: &Shape) -> Result<(f64, f64), InequalityError> {
    let mismatch = || InequalityError::KindMismatch {
        inequality: id.to_string(),
        expected: id.kind(),
        got: shape.kind(),
    };
    match (id, shape) {
        (InequalityId::PowerMeanLower, Shape::Triangle(t)) => {
            Ok((power_sum(t, Exponent(2)), power_mean_lower(t)))
        }
        (InequalityId::ZhouHu, Shape::Triangle(t)) => {
            Ok((power_sum(t, Exponent(2)), zhou_hu_rhs(t)))
        }
        (InequalityId::Ye { n }, Shape::Triangle(t)) => Ok((power_sum(t, *n), ye_rhs(t, *n))),
        (InequalityId::Conj1 { n }, Shape::Triangle(t)) => Ok((power_sum(t, *n), conj1_rhs(t, *n))),
        (InequalityId::Conj2 { k }, Shape::Tetrahedron(t)) => {
            Ok((tet_pair_sum(t), conj2_rhs(t, *k)))
        }
        (InequalityId::Conj3, Shape::Tetrahedron(t)) => Ok((tet_pair_sum(t), conj3_rhs(t))),
        (InequalityId::Refined3, Shape::Tetrahedron(t)) => Ok((tet_pair_sum(t), refined_rhs(t))),
        _ => Err(mismatch()),
    }
}

fn orient(id: &InequalityId, lhs: f64, rhs: f64) -> f64 {
    if id.is_lower_bound() {
        lhs - rhs
    } else {
        rhs - lhs
    }
}

/// Oriented gap only; the search hot path.
pub fn oriented_gap(id: &InequalityId, shape: &Shape) -> Result<f64, InequalityError> {
    let (lhs, rhs) = sides(id, shape)?;
    Ok(orient(id, lhs, rhs))
}

/// Evaluates `id` on `shape`.
///
/// A gap within `eval_tolerance` of zero is a boundary case: it counts as
/// satisfied for `<=` relations and as not satisfied for `<` relations.
pub fn evaluate(id: &InequalityId, shape: &Shape) -> Result<EvalReport, InequalityError> {
    let (lhs, rhs) = sides(id, shape)?;
    let gap = orient(id, lhs, rhs);
    let strict = id.is_strict();
    let satisfied = match classify(gap, eval_tolerance(lhs, rhs)) {
        Verdict::Satisfied => true,
        Verdict::Violated => false,
        Verdict::Boundary => !strict,
    };
    Ok(EvalReport {
        inequality: id.name().to_string(),
        n: id.exponent(),
        k: id.constant(),
        lhs,
        rhs,
        gap,
        satisfied,
        strict,
    })
}
