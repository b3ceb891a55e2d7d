//! Polygons represented by edge heights over a fixed fan of outward normals.
//!
//! A polygon class is fixed by its cyclic sequence of outward unit edge
//! normals ([`NormalFan`]). Within one class a polygon is fully described by
//! its height vector: the signed distances of the edge lines from the origin.
//! All geometric quantities (vertices, edge lengths, perimeter, area,
//! polygonal curvature) are closed-form functions of the heights.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A plain 2-vector. Kept minimal on purpose; everything here is 2D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product (positive when `other` is
    /// counterclockwise from `self`).
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Fan construction failures.
#[derive(Debug, Error, PartialEq)]
pub enum FanError {
    #[error("normal {index} has near-zero length")]
    ZeroNormal { index: usize },
    #[error("outer angle {index} is zero: consecutive normals are parallel")]
    DegenerateAngle { index: usize },
    #[error("outer angles sum to {sum} instead of 2\u{3c0}: not a winding-one fan")]
    BadWinding { sum: f64 },
    #[error("a fan needs at least 3 normals, got {got}")]
    TooFewNormals { got: usize },
}

/// Geometry failures on a concrete polygon.
#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("edge {index} has non-positive length {length}")]
    DegenerateEdge { index: usize, length: f64 },
    #[error("polygons belong to different normal fans")]
    FanMismatch,
    #[error("height vector has length {got}, fan has {expected} edges")]
    HeightLenMismatch { got: usize, expected: usize },
}

const ANGLE_ZERO_TOL: f64 = 1e-12;
const WINDING_TOL: f64 = 1e-9;

/// The fixed data of a polygon class: outward unit normals in counterclockwise
/// order plus everything derived from the turning angles between them.
///
/// Indexing is cyclic: edge `j` carries normal `n_j`; the outer angle `phi_j`
/// is the signed turn from `n_j` to `n_{j+1}`. Reflex vertices of nonconvex
/// classes show up as negative outer angles.
#[derive(Debug, Clone)]
pub struct NormalFan {
    normals: Vec<Vec2>,
    outer_angles: Vec<f64>,
    a_coeffs: Vec<f64>,
    b_coeffs: Vec<f64>,
    eta: Vec<f64>,
    c_star: f64,
}

impl PartialEq for NormalFan {
    fn eq(&self, other: &Self) -> bool {
        self.normals == other.normals
    }
}

impl NormalFan {
    /// Builds a fan from (not necessarily unit) normal directions.
    ///
    /// Directions are renormalized. Fails if any direction is near zero, any
    /// pair of consecutive normals is parallel with the same direction, or
    /// the signed turning angles do not sum to 2π (winding one).
    pub fn new(directions: &[Vec2]) -> Result<Arc<NormalFan>, FanError> {
        let n = directions.len();
        if n < 3 {
            return Err(FanError::TooFewNormals { got: n });
        }
        let mut normals = Vec::with_capacity(n);
        for (j, d) in directions.iter().enumerate() {
            let len = d.norm();
            if !len.is_finite() || len <= 1e-14 {
                return Err(FanError::ZeroNormal { index: j });
            }
            normals.push(d.scale(1.0 / len));
        }

        let mut outer_angles = Vec::with_capacity(n);
        for j in 0..n {
            let cur = normals[j];
            let next = normals[(j + 1) % n];
            // Signed angle from n_j to n_{j+1}; atan2 keeps it in (-pi, pi].
            let phi = cur.cross(next).atan2(cur.dot(next));
            if phi.abs() <= ANGLE_ZERO_TOL || (std::f64::consts::PI - phi.abs()) <= ANGLE_ZERO_TOL {
                return Err(FanError::DegenerateAngle { index: j });
            }
            outer_angles.push(phi);
        }
        let sum: f64 = outer_angles.iter().sum();
        if (sum - 2.0 * std::f64::consts::PI).abs() > WINDING_TOL {
            return Err(FanError::BadWinding { sum });
        }

        let a_coeffs: Vec<f64> = outer_angles.iter().map(|phi| 1.0 / phi.sin()).collect();
        let mut b_coeffs = Vec::with_capacity(n);
        let mut eta = Vec::with_capacity(n);
        for j in 0..n {
            let prev = outer_angles[(j + n - 1) % n];
            let cur = outer_angles[j];
            b_coeffs.push(-1.0 / prev.tan() - 1.0 / cur.tan());
            eta.push((cur / 2.0).tan() + (prev / 2.0).tan());
        }
        let c_star = (0..n)
            .map(|l| a_coeffs[(l + n - 1) % n].abs() + b_coeffs[l].abs() + a_coeffs[l].abs())
            .fold(f64::NEG_INFINITY, f64::max);

        Ok(Arc::new(NormalFan {
            normals,
            outer_angles,
            a_coeffs,
            b_coeffs,
            eta,
            c_star,
        }))
    }

    /// Number of edges N.
    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires N >= 3
    }

    pub fn normals(&self) -> &[Vec2] {
        &self.normals
    }

    /// Signed outer angles phi_j (turn from n_j to n_{j+1}).
    pub fn outer_angles(&self) -> &[f64] {
        &self.outer_angles
    }

    /// a_j = cosec(phi_j).
    pub fn a_coeffs(&self) -> &[f64] {
        &self.a_coeffs
    }

    /// b_j = -cot(phi_{j-1}) - cot(phi_j).
    pub fn b_coeffs(&self) -> &[f64] {
        &self.b_coeffs
    }

    /// eta_j = tan(phi_j/2) + tan(phi_{j-1}/2), the per-edge weight in the
    /// perimeter formula and the numerator of the polygonal curvature.
    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// C* = max_l (|a_{l-1}| + |b_l| + |a_l|); Lipschitz constant of edge
    /// lengths with respect to the sup distance on heights.
    pub fn c_star(&self) -> f64 {
        self.c_star
    }

    /// Sum of tan(phi_j/2) over the fan; equals half the sum of the eta_j.
    pub fn tan_half_sum(&self) -> f64 {
        self.outer_angles.iter().map(|phi| (phi / 2.0).tan()).sum()
    }
}

/// A polygon in the class of a [`NormalFan`]: nothing but its height vector.
///
/// Construction does not enforce admissibility (positive edge lengths);
/// interpolation and mid-step states of implicit solvers legitimately pass
/// through inadmissible height vectors, so positivity is a property callers
/// query via [`Polygon::check_admissible`], not a type invariant.
#[derive(Debug, Clone)]
pub struct Polygon {
    fan: Arc<NormalFan>,
    heights: Vec<f64>,
}

/// All closed-form geometric quantities of one polygon, computed in one pass.
#[derive(Debug, Clone)]
pub struct PolygonGeometry {
    pub edge_lengths: Vec<f64>,
    pub vertices: Vec<Vec2>,
    pub perimeter: f64,
    pub area: f64,
    pub curvatures: Vec<f64>,
}

/// Result of an admissibility check. Report-style: never an error.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub min_edge_length: f64,
    pub admissible: bool,
    /// Present only when simplicity checking was requested.
    pub simple: Option<bool>,
}

impl Polygon {
    pub fn new(fan: Arc<NormalFan>, heights: Vec<f64>) -> Result<Polygon, GeomError> {
        if heights.len() != fan.len() {
            return Err(GeomError::HeightLenMismatch {
                got: heights.len(),
                expected: fan.len(),
            });
        }
        Ok(Polygon { fan, heights })
    }

    pub fn fan(&self) -> &Arc<NormalFan> {
        &self.fan
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn same_fan(&self, other: &Polygon) -> bool {
        Arc::ptr_eq(&self.fan, &other.fan) || self.fan == other.fan
    }

    /// Edge lengths from the height vector:
    /// |G_j| = a_{j-1} h_{j-1} + b_j h_j + a_j h_{j+1}.
    ///
    /// Values may be negative for inadmissible heights; callers decide.
    pub fn edge_lengths(&self) -> Vec<f64> {
        let n = self.len();
        let a = self.fan.a_coeffs();
        let b = self.fan.b_coeffs();
        let h = &self.heights;
        (0..n)
            .map(|j| {
                a[(j + n - 1) % n] * h[(j + n - 1) % n] + b[j] * h[j] + a[j] * h[(j + 1) % n]
            })
            .collect()
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edge_lengths().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Vertex j: intersection of the edge-j line with the edge-(j+1) line.
    /// The 2x2 system is always invertible because consecutive normals are
    /// never parallel. Edge j then runs from vertex j-1 to vertex j.
    pub fn vertices(&self) -> Vec<Vec2> {
        let n = self.len();
        let normals = self.fan.normals();
        let h = &self.heights;
        (0..n)
            .map(|j| {
                let nj = normals[j];
                let nk = normals[(j + 1) % n];
                let det = nj.cross(nk); // = sin(phi_j), nonzero by fan invariant
                Vec2::new(
                    (h[j] * nk.y - h[(j + 1) % n] * nj.y) / det,
                    (nj.x * h[(j + 1) % n] - nk.x * h[j]) / det,
                )
            })
            .collect()
    }

    /// Perimeter as the height-weighted sum of eta_j.
    pub fn perimeter(&self) -> f64 {
        self.fan
            .eta()
            .iter()
            .zip(&self.heights)
            .map(|(eta, h)| eta * h)
            .sum()
    }

    /// Enclosed area: half the height-weighted sum of edge lengths.
    pub fn area(&self) -> f64 {
        0.5 * self
            .edge_lengths()
            .iter()
            .zip(&self.heights)
            .map(|(len, h)| len * h)
            .sum::<f64>()
    }

    /// Polygonal curvature kappa_j = eta_j / |G_j|; positive where the
    /// polygon is locally convex. Fails on non-positive edges.
    pub fn curvatures(&self) -> Result<Vec<f64>, GeomError> {
        let lengths = self.edge_lengths();
        let eta = self.fan.eta();
        lengths
            .iter()
            .enumerate()
            .map(|(j, &len)| {
                if len <= 0.0 {
                    Err(GeomError::DegenerateEdge {
                        index: j,
                        length: len,
                    })
                } else {
                    Ok(eta[j] / len)
                }
            })
            .collect()
    }

    /// All geometric quantities at once.
    pub fn geometry(&self) -> Result<PolygonGeometry, GeomError> {
        let edge_lengths = self.edge_lengths();
        let vertices = self.vertices();
        let perimeter = self.perimeter();
        let area = self.area();
        let curvatures = self.curvatures()?;
        Ok(PolygonGeometry {
            edge_lengths,
            vertices,
            perimeter,
            area,
            curvatures,
        })
    }

    /// Sup-norm distance between height vectors of same-fan polygons.
    pub fn distance(&self, other: &Polygon) -> Result<f64, GeomError> {
        if !self.same_fan(other) {
            return Err(GeomError::FanMismatch);
        }
        Ok(self
            .heights
            .iter()
            .zip(&other.heights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Convex combination of heights: (1-theta) self + theta other.
    /// Admissibility of the result is not guaranteed.
    pub fn interpolate(&self, other: &Polygon, theta: f64) -> Result<Polygon, GeomError> {
        if !self.same_fan(other) {
            return Err(GeomError::FanMismatch);
        }
        let heights = self
            .heights
            .iter()
            .zip(&other.heights)
            .map(|(a, b)| (1.0 - theta) * a + theta * b)
            .collect();
        Ok(Polygon {
            fan: Arc::clone(&self.fan),
            heights,
        })
    }

    /// Rigid translation by `v`: every height shifts by n_j . v.
    pub fn translate(&self, v: Vec2) -> Polygon {
        let heights = self
            .fan
            .normals()
            .iter()
            .zip(&self.heights)
            .map(|(n, h)| h + n.dot(v))
            .collect();
        Polygon {
            fan: Arc::clone(&self.fan),
            heights,
        }
    }

    /// Reports whether all edges exceed `min_edge`, and optionally whether
    /// the vertex chain is simple (brute-force O(N^2) segment test).
    pub fn check_admissible(&self, min_edge: f64, check_simple: bool) -> AdmissibilityReport {
        let min_edge_length = self.min_edge_length();
        let admissible = min_edge_length > min_edge;
        let simple = if check_simple {
            Some(chain_is_simple(&self.vertices()))
        } else {
            None
        };
        AdmissibilityReport {
            min_edge_length,
            admissible,
            simple,
        }
    }

    /// Builds a fan and heights from a counterclockwise vertex chain.
    /// Edge j runs from vertex j-1 to vertex j; its outward normal is the
    /// chain direction rotated clockwise by 90 degrees.
    pub fn from_vertices(vertices: &[Vec2]) -> Result<Polygon, FanError> {
        let n = vertices.len();
        if n < 3 {
            return Err(FanError::TooFewNormals { got: n });
        }
        let mut directions = Vec::with_capacity(n);
        for j in 0..n {
            let from = vertices[(j + n - 1) % n];
            let to = vertices[j];
            let t = to - from;
            directions.push(Vec2::new(t.y, -t.x));
        }
        let fan = NormalFan::new(&directions)?;
        let heights = (0..n).map(|j| fan.normals()[j].dot(vertices[j])).collect();
        Ok(Polygon { fan, heights })
    }
}

/// Brute-force simplicity test on a closed vertex chain: no two
/// non-adjacent segments may intersect.
fn chain_is_simple(vertices: &[Vec2]) -> bool {
    let n = vertices.len();
    for i in 0..n {
        let a0 = vertices[i];
        let a1 = vertices[(i + 1) % n];
        for j in (i + 1)..n {
            // Skip adjacent segments (they share an endpoint).
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let b0 = vertices[j];
            let b1 = vertices[(j + 1) % n];
            if segments_intersect(a0, a1, b0, b1) {
                return false;
            }
        }
    }
    true
}

fn segments_intersect(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> bool {
    let d1 = (a1 - a0).cross(b0 - a0);
    let d2 = (a1 - a0).cross(b1 - a0);
    let d3 = (b1 - b0).cross(a0 - b0);
    let d4 = (b1 - b0).cross(a1 - b0);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    // Collinear overlaps count as intersections.
    let on = |p: Vec2, q: Vec2, r: Vec2, d: f64| {
        d == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(a0, a1, b0, d1) || on(a0, a1, b1, d2) || on(b0, b1, a0, d3) || on(b0, b1, a1, d4)
}
