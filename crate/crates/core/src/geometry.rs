//! Triangle and tetrahedron shapes with their derived measures.
//!
//! Shapes are only constructible through validating factories, so every
//! accessor below may assume a non-degenerate shape. Validity thresholds are
//! relative to the shape's own scale:
//!
//! * a triangle is valid iff every side is positive and
//!   `x + y - z > TRIANGLE_TOLERANCE * (x + y + z)` for every side `z`;
//! * a tetrahedron is valid iff its four faces are valid triangles and the
//!   Cayley-Menger determinant exceeds `VOLUME_TOLERANCE * mean_edge^6`.
//!
//! Edge labeling for tetrahedra with vertices `A, B, C, D`:
//!
//! ```text
//! a1 = AB   a2 = BC   a3 = CA   a4 = AD   a5 = CD   a6 = BD
//! ```
//!
//! which gives the faces `ABC = (a1, a2, a3)`, `ACD = (a3, a4, a5)`,
//! `ABD = (a1, a4, a6)` and `BCD = (a2, a5, a6)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative slack required by the strict triangle inequality.
pub const TRIANGLE_TOLERANCE: f64 = 1e-12;

/// Relative floor on the Cayley-Menger determinant, in units of `mean_edge^6`.
pub const VOLUME_TOLERANCE: f64 = 1e-12;

/// Edge indices (zero based) of the four faces, in the fixed face order.
pub const FACE_EDGES: [[usize; 3]; 4] = [[0, 1, 2], [2, 3, 4], [0, 3, 5], [1, 4, 5]];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("lengths must be finite, got {0:?}")]
    NonFinite(Vec<f64>),
    #[error("lengths must be strictly positive, got {0:?}")]
    NonPositive(Vec<f64>),
    #[error("triangle inequality violated for sides ({a}, {b}, {c})")]
    TriangleInequality { a: f64, b: f64, c: f64 },
    #[error("face {face} ({a}, {b}, {c}): triangle inequality violated")]
    FaceInequality { face: usize, a: f64, b: f64, c: f64 },
    #[error(
        "edge lengths are not realizable as a tetrahedron \
         (Cayley-Menger determinant {determinant:e} <= threshold {threshold:e})"
    )]
    NonRealizable { determinant: f64, threshold: f64 },
    #[error("scale factor must be finite and positive, got {0}")]
    InvalidScale(f64),
}

/// How a shape is rescaled before it is evaluated by a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeScale {
    /// Leave the shape as is.
    None,
    /// Perimeter (triangle) or total edge length (tetrahedron) equal to one.
    #[default]
    UnitPerimeter,
    /// Longest side or edge equal to one.
    UnitLongestEdge,
}

fn strict_triangle(a: f64, b: f64, c: f64) -> bool {
    let slack = TRIANGLE_TOLERANCE * (a + b + c);
    a + b - c > slack && b + c - a > slack && c + a - b > slack
}

/// True iff `(a, b, c)` are the sides of a non-degenerate triangle.
pub fn is_valid_triangle(a: f64, b: f64, c: f64) -> bool {
    [a, b, c].iter().all(|x| x.is_finite() && *x > 0.0) && strict_triangle(a, b, c)
}

/// A non-degenerate triangle given by its three side lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TriangleSides", into = "TriangleSides")]
pub struct Triangle {
    a: f64,
    b: f64,
    c: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TriangleSides {
    a: f64,
    b: f64,
    c: f64,
}

impl TryFrom<TriangleSides> for Triangle {
    type Error = GeometryError;

    fn try_from(s: TriangleSides) -> Result<Self, Self::Error> {
        Triangle::new(s.a, s.b, s.c)
    }
}

impl From<Triangle> for TriangleSides {
    fn from(t: Triangle) -> Self {
        TriangleSides {
            a: t.a,
            b: t.b,
            c: t.c,
        }
    }
}

impl Triangle {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, GeometryError> {
        let sides = [a, b, c];
        if sides.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite(sides.to_vec()));
        }
        if sides.iter().any(|x| *x <= 0.0) {
            return Err(GeometryError::NonPositive(sides.to_vec()));
        }
        if !strict_triangle(a, b, c) {
            return Err(GeometryError::TriangleInequality { a, b, c });
        }
        Ok(Self { a, b, c })
    }

    pub fn equilateral(side: f64) -> Result<Self, GeometryError> {
        Self::new(side, side, side)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn sides(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    /// The side pairs `(a, b), (b, c), (c, a)` in cyclic order.
    pub fn cyclic_pairs(&self) -> [(f64, f64); 3] {
        [(self.a, self.b), (self.b, self.c), (self.c, self.a)]
    }

    pub fn perimeter(&self) -> f64 {
        self.a + self.b + self.c
    }

    pub fn semiperimeter(&self) -> f64 {
        0.5 * self.perimeter()
    }

    pub fn longest_side(&self) -> f64 {
        self.a.max(self.b).max(self.c)
    }

    /// Area by Kahan's rearrangement of Heron's formula.
    ///
    /// With the sides sorted so that `x >= y >= z`, every factor of
    /// `(x + (y + z)) (z - (x - y)) (z + (x - y)) (x + (y - z))` is computed
    /// without catastrophic cancellation, so needle-like triangles keep full
    /// relative accuracy.
    pub fn area(&self) -> f64 {
        let mut s = self.sides();
        s.sort_by(|p, q| q.total_cmp(p));
        let [x, y, z] = s;
        let product = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
        0.25 * product.max(0.0).sqrt()
    }

    /// Inradius `r = area / s`.
    pub fn inradius(&self) -> f64 {
        self.area() / self.semiperimeter()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, GeometryError> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(GeometryError::InvalidScale(factor));
        }
        Self::new(self.a * factor, self.b * factor, self.c * factor)
    }

    pub fn normalized(&self, scale: ShapeScale) -> Result<Self, GeometryError> {
        match scale {
            ShapeScale::None => Ok(*self),
            ShapeScale::UnitPerimeter => self.divided(self.perimeter()),
            ShapeScale::UnitLongestEdge => self.divided(self.longest_side()),
        }
    }

    fn divided(&self, d: f64) -> Result<Self, GeometryError> {
        Self::new(self.a / d, self.b / d, self.c / d)
    }

    /// Sides rotated one step, `(a, b, c) -> (b, c, a)`.
    pub fn rotated(&self) -> Self {
        Self {
            a: self.b,
            b: self.c,
            c: self.a,
        }
    }

    fn from_checked_face(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }
}

/// `288 V^2` for the tetrahedron with the given edges (labeling as in the
/// module docs).
///
/// Computed as `8 det(G)` where `G` is the Gram matrix of the edge vectors
/// leaving vertex `A`; this equals the bordered 5x5 Cayley-Menger determinant.
pub fn cayley_menger_determinant(edges: &[f64; 6]) -> f64 {
    let [ab, bc, ca, ad, cd, bd] = edges.map(|e| e * e);
    // u = B - A, v = C - A, w = D - A
    let uu = ab;
    let vv = ca;
    let ww = ad;
    let uv = 0.5 * (ab + ca - bc);
    let uw = 0.5 * (ab + ad - bd);
    let vw = 0.5 * (ca + ad - cd);
    let det = uu * (vv * ww - vw * vw) - uv * (uv * ww - vw * uw) + uw * (uv * vw - vv * uw);
    8.0 * det
}

/// A non-degenerate tetrahedron given by its six edge lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TetrahedronEdges", into = "TetrahedronEdges")]
pub struct Tetrahedron {
    edges: [f64; 6],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TetrahedronEdges {
    a1: f64,
    a2: f64,
    a3: f64,
    a4: f64,
    a5: f64,
    a6: f64,
}

impl TryFrom<TetrahedronEdges> for Tetrahedron {
    type Error = GeometryError;

    fn try_from(e: TetrahedronEdges) -> Result<Self, Self::Error> {
        Tetrahedron::new([e.a1, e.a2, e.a3, e.a4, e.a5, e.a6])
    }
}

impl From<Tetrahedron> for TetrahedronEdges {
    fn from(t: Tetrahedron) -> Self {
        let [a1, a2, a3, a4, a5, a6] = t.edges;
        TetrahedronEdges {
            a1,
            a2,
            a3,
            a4,
            a5,
            a6,
        }
    }
}

fn distance(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

impl Tetrahedron {
    pub fn new(edges: [f64; 6]) -> Result<Self, GeometryError> {
        if edges.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite(edges.to_vec()));
        }
        if edges.iter().any(|x| *x <= 0.0) {
            return Err(GeometryError::NonPositive(edges.to_vec()));
        }
        for (face, idx) in FACE_EDGES.iter().enumerate() {
            let [a, b, c] = idx.map(|i| edges[i]);
            if !strict_triangle(a, b, c) {
                return Err(GeometryError::FaceInequality { face, a, b, c });
            }
        }
        let determinant = cayley_menger_determinant(&edges);
        let mean = edges.iter().sum::<f64>() / 6.0;
        let threshold = VOLUME_TOLERANCE * mean.powi(6);
        if determinant.is_nan() || determinant <= threshold {
            return Err(GeometryError::NonRealizable {
                determinant,
                threshold,
            });
        }
        Ok(Self { edges })
    }

    /// Builds the tetrahedron spanned by vertices `[A, B, C, D]`.
    pub fn from_vertices(v: &[[f64; 3]; 4]) -> Result<Self, GeometryError> {
        let [a, b, c, d] = v;
        Self::new([
            distance(a, b),
            distance(b, c),
            distance(c, a),
            distance(a, d),
            distance(c, d),
            distance(b, d),
        ])
    }

    pub fn regular(edge: f64) -> Result<Self, GeometryError> {
        Self::new([edge; 6])
    }

    pub fn edges(&self) -> [f64; 6] {
        self.edges
    }

    pub fn total_edge_length(&self) -> f64 {
        self.edges.iter().sum()
    }

    pub fn longest_edge(&self) -> f64 {
        self.edges.iter().copied().fold(f64::MIN, f64::max)
    }

    /// The faces `(a1,a2,a3), (a3,a4,a5), (a1,a4,a6), (a2,a5,a6)`.
    pub fn faces(&self) -> [Triangle; 4] {
        FACE_EDGES.map(|[i, j, k]| {
            Triangle::from_checked_face(self.edges[i], self.edges[j], self.edges[k])
        })
    }

    pub fn cayley_menger(&self) -> f64 {
        cayley_menger_determinant(&self.edges)
    }

    pub fn volume(&self) -> f64 {
        (self.cayley_menger() / 288.0).sqrt()
    }

    /// `mean_edge^6 / (288 V^2)`.
    ///
    /// Rounding the edges by one ulp moves the volume by roughly
    /// `100 * f64::EPSILON * conditioning()` relative, so thin tetrahedra
    /// carry fewer correct digits of volume (and inradius) than their edges.
    pub fn conditioning(&self) -> f64 {
        (self.total_edge_length() / 6.0).powi(6) / self.cayley_menger()
    }

    pub fn face_areas(&self) -> [f64; 4] {
        self.faces().map(|f| f.area())
    }

    pub fn surface_area(&self) -> f64 {
        self.face_areas().iter().sum()
    }

    /// Radius of the inscribed sphere, `3V / S`.
    pub fn inradius(&self) -> f64 {
        3.0 * self.volume() / self.surface_area()
    }

    /// Sum of the four face inradii.
    pub fn face_inradius_sum(&self) -> f64 {
        self.faces().iter().map(Triangle::inradius).sum()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, GeometryError> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(GeometryError::InvalidScale(factor));
        }
        Self::new(self.edges.map(|e| e * factor))
    }

    pub fn normalized(&self, scale: ShapeScale) -> Result<Self, GeometryError> {
        match scale {
            ShapeScale::None => Ok(*self),
            ShapeScale::UnitPerimeter => self.divided(self.total_edge_length()),
            ShapeScale::UnitLongestEdge => self.divided(self.longest_edge()),
        }
    }

    fn divided(&self, d: f64) -> Result<Self, GeometryError> {
        Self::new(self.edges.map(|e| e / d))
    }
}

/// Either kind of shape, as read from JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Shape {
    Triangle(Triangle),
    Tetrahedron(Tetrahedron),
}

impl Shape {
    /// Parses `{"a":..,"b":..,"c":..}` or `{"a1":..,..,"a6":..}`.
    ///
    /// Unlike the untagged `Deserialize` impl this keeps the validation
    /// diagnostic of whichever shape the keys select.
    pub fn from_json_str(text: &str) -> Result<Self, ShapeParseError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let is_tet = value.as_object().is_some_and(|o| o.contains_key("a1"));
        if is_tet {
            Ok(Shape::Tetrahedron(serde_json::from_value(value)?))
        } else {
            Ok(Shape::Triangle(serde_json::from_value(value)?))
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Self, GeometryError> {
        match self {
            Shape::Triangle(t) => t.scaled(factor).map(Shape::Triangle),
            Shape::Tetrahedron(t) => t.scaled(factor).map(Shape::Tetrahedron),
        }
    }

    pub fn lengths(&self) -> Vec<f64> {
        match self {
            Shape::Triangle(t) => t.sides().to_vec(),
            Shape::Tetrahedron(t) => t.edges().to_vec(),
        }
    }
}

impl From<Triangle> for Shape {
    fn from(t: Triangle) -> Self {
        Shape::Triangle(t)
    }
}

impl From<Tetrahedron> for Shape {
    fn from(t: Tetrahedron) -> Self {
        Shape::Tetrahedron(t)
    }
}

#[derive(Debug, Error)]
#[error("invalid shape JSON: {0}")]
pub struct ShapeParseError(#[from] serde_json::Error);
