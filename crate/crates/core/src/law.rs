//! Velocity laws: maps from a polygon (and time) to one normal speed per edge.
//!
//! Each law declares its conservation behaviour up front — whether the
//! enclosed area or the perimeter changes at a constant rate, and whether the
//! perimeter is non-increasing — so integrators and diagnostics can verify
//! the claimed rate against what a run actually produced.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::geom::{GeomError, NormalFan, Polygon, Vec2};
use crate::quad::GaussLegendre;

pub const DEFAULT_QUAD_ORDER: usize = 32;

#[derive(Debug, Error, PartialEq)]
pub enum LawError {
    #[error("edge {index} has non-positive length {length}")]
    DegenerateEdge { index: usize, length: f64 },
    #[error("vector field is singular on edge {edge}")]
    SingularFieldOnEdge { edge: usize },
    #[error("sum of tan(phi_j/2) vanishes; length-preserving speed undefined")]
    ZeroAngleSum,
    #[error("unknown law id `{0}`")]
    UnknownLaw(String),
    #[error("unknown vector field id `{0}`")]
    UnknownField(String),
    #[error("bad numeric parameter in `{0}`")]
    BadParameter(String),
}

impl From<GeomError> for LawError {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::DegenerateEdge { index, length } => {
                LawError::DegenerateEdge { index, length }
            }
            other => panic!("unexpected geometry error in law evaluation: {other}"),
        }
    }
}

/// Conservation classes a law may declare, evaluated on a concrete fan.
///
/// `cas`: the constant rate of area change (sum of edge-length-weighted
/// speeds). `cls`: the constant rate of perimeter change (eta-weighted sum).
/// `cs`: the eta-weighted sum is non-positive, i.e. the law never lengthens
/// the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conservation {
    pub cas: Option<f64>,
    pub cls: Option<f64>,
    pub cs: bool,
}

/// Built-in planar vector fields plus an escape hatch for user closures.
#[derive(Clone)]
pub enum FieldKind {
    /// x / (2 pi |x|^2): divergence-free away from the origin with unit flux
    /// through any curve enclosing it.
    PointSource,
    /// x1 x2 (-x1, x2): divergence-free everywhere.
    ShearXy,
    /// (-x1, x2): divergence-free everywhere.
    Saddle,
    Uniform { cx: f64, cy: f64 },
    Custom(Arc<dyn Fn(Vec2) -> Vec2 + Send + Sync>),
}

impl fmt::Debug for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::PointSource => write!(f, "PointSource"),
            FieldKind::ShearXy => write!(f, "ShearXy"),
            FieldKind::Saddle => write!(f, "Saddle"),
            FieldKind::Uniform { cx, cy } => write!(f, "Uniform({cx}, {cy})"),
            FieldKind::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// A velocity field for advected motion, with its declared net flux out of
/// the excluded region (zero for globally divergence-free fields).
///
/// The divergence-free property is the caller's responsibility; nothing here
/// verifies it.
#[derive(Debug, Clone)]
pub struct VectorField2D {
    pub kind: FieldKind,
    pub mu_flux: f64,
}

impl VectorField2D {
    pub fn point_source() -> Self {
        VectorField2D {
            kind: FieldKind::PointSource,
            mu_flux: 1.0,
        }
    }

    pub fn shear_xy() -> Self {
        VectorField2D {
            kind: FieldKind::ShearXy,
            mu_flux: 0.0,
        }
    }

    pub fn saddle() -> Self {
        VectorField2D {
            kind: FieldKind::Saddle,
            mu_flux: 0.0,
        }
    }

    pub fn uniform(cx: f64, cy: f64) -> Self {
        VectorField2D {
            kind: FieldKind::Uniform { cx, cy },
            mu_flux: 0.0,
        }
    }

    pub fn custom<F>(f: F, declared_flux: f64) -> Self
    where
        F: Fn(Vec2) -> Vec2 + Send + Sync + 'static,
    {
        VectorField2D {
            kind: FieldKind::Custom(Arc::new(f)),
            mu_flux: declared_flux,
        }
    }

    pub fn eval(&self, x: Vec2) -> Vec2 {
        match &self.kind {
            FieldKind::PointSource => {
                let r2 = x.dot(x);
                x.scale(1.0 / (2.0 * std::f64::consts::PI * r2))
            }
            FieldKind::ShearXy => {
                let s = x.x * x.y;
                Vec2::new(-s * x.x, s * x.y)
            }
            FieldKind::Saddle => Vec2::new(-x.x, x.y),
            FieldKind::Uniform { cx, cy } => Vec2::new(*cx, *cy),
            FieldKind::Custom(f) => f(x),
        }
    }

    /// Parses `point-source`, `shear-xy`, `saddle`, or `uniform:<cx>,<cy>`.
    pub fn parse(id: &str) -> Result<Self, LawError> {
        match id {
            "point-source" => Ok(Self::point_source()),
            "shear-xy" => Ok(Self::shear_xy()),
            "saddle" => Ok(Self::saddle()),
            _ => {
                if let Some(rest) = id.strip_prefix("uniform:") {
                    let mut parts = rest.split(',');
                    let cx = parts
                        .next()
                        .and_then(|s| s.trim().parse::<f64>().ok())
                        .ok_or_else(|| LawError::BadParameter(id.to_string()))?;
                    let cy = parts
                        .next()
                        .and_then(|s| s.trim().parse::<f64>().ok())
                        .ok_or_else(|| LawError::BadParameter(id.to_string()))?;
                    if parts.next().is_some() {
                        return Err(LawError::BadParameter(id.to_string()));
                    }
                    Ok(Self::uniform(cx, cy))
                } else {
                    Err(LawError::UnknownField(id.to_string()))
                }
            }
        }
    }

    pub fn id(&self) -> String {
        match &self.kind {
            FieldKind::PointSource => "point-source".to_string(),
            FieldKind::ShearXy => "shear-xy".to_string(),
            FieldKind::Saddle => "saddle".to_string(),
            FieldKind::Uniform { cx, cy } => format!("uniform:{cx},{cy}"),
            FieldKind::Custom(_) => "custom".to_string(),
        }
    }
}

/// The catalogue of velocity laws.
#[derive(Debug, Clone)]
pub enum VelocityLaw {
    /// Motion by minus polygonal curvature (`backward = true` flips the sign,
    /// the time-reversed and ill-posed variant).
    Curvature { backward: bool },
    /// Mean curvature minus curvature: area-preserving curvature motion.
    AreaPreservingCurvature,
    /// Edge-mean of a vector field, projected on the edge normal.
    Advected {
        field: VectorField2D,
        rule: GaussLegendre,
    },
    /// Sum of the area-preserving curvature law and an advected law.
    AdvectedCurvature {
        field: VectorField2D,
        rule: GaussLegendre,
    },
    /// Curvature motion offset so the perimeter stays constant.
    LengthPreservingCurvature,
    /// Uniform normal speed c on every edge.
    ConstantSpeed { c: f64 },
}

impl VelocityLaw {
    pub fn curvature() -> Self {
        VelocityLaw::Curvature { backward: false }
    }

    pub fn backward_curvature() -> Self {
        VelocityLaw::Curvature { backward: true }
    }

    pub fn area_preserving_curvature() -> Self {
        VelocityLaw::AreaPreservingCurvature
    }

    pub fn advected(field: VectorField2D, quad_order: usize) -> Self {
        VelocityLaw::Advected {
            field,
            rule: GaussLegendre::new(quad_order),
        }
    }

    pub fn advected_curvature(field: VectorField2D, quad_order: usize) -> Self {
        VelocityLaw::AdvectedCurvature {
            field,
            rule: GaussLegendre::new(quad_order),
        }
    }

    pub fn length_preserving_curvature() -> Self {
        VelocityLaw::LengthPreservingCurvature
    }

    pub fn constant_speed(c: f64) -> Self {
        VelocityLaw::ConstantSpeed { c }
    }

    /// Parses the law id grammar used by scenario files and the CLI:
    /// `pcf`, `pcf-backward`, `ap-pcf`, `advected:<field>`,
    /// `ap-advected-pcf:<field>`, `lp-pcf`, `const:<c>`.
    pub fn parse(id: &str, quad_order: usize) -> Result<Self, LawError> {
        match id {
            "pcf" => Ok(Self::curvature()),
            "pcf-backward" => Ok(Self::backward_curvature()),
            "ap-pcf" => Ok(Self::area_preserving_curvature()),
            "lp-pcf" => Ok(Self::length_preserving_curvature()),
            _ => {
                if let Some(rest) = id.strip_prefix("advected:") {
                    Ok(Self::advected(VectorField2D::parse(rest)?, quad_order))
                } else if let Some(rest) = id.strip_prefix("ap-advected-pcf:") {
                    Ok(Self::advected_curvature(
                        VectorField2D::parse(rest)?,
                        quad_order,
                    ))
                } else if let Some(rest) = id.strip_prefix("const:") {
                    let c = rest
                        .trim()
                        .parse::<f64>()
                        .map_err(|_| LawError::BadParameter(id.to_string()))?;
                    Ok(Self::constant_speed(c))
                } else {
                    Err(LawError::UnknownLaw(id.to_string()))
                }
            }
        }
    }

    pub fn id(&self) -> String {
        match self {
            VelocityLaw::Curvature { backward: false } => "pcf".to_string(),
            VelocityLaw::Curvature { backward: true } => "pcf-backward".to_string(),
            VelocityLaw::AreaPreservingCurvature => "ap-pcf".to_string(),
            VelocityLaw::Advected { field, .. } => format!("advected:{}", field.id()),
            VelocityLaw::AdvectedCurvature { field, .. } => {
                format!("ap-advected-pcf:{}", field.id())
            }
            VelocityLaw::LengthPreservingCurvature => "lp-pcf".to_string(),
            VelocityLaw::ConstantSpeed { c } => format!("const:{c}"),
        }
    }

    /// Normal speeds for every edge of `p` at time `t`.
    ///
    /// All built-in laws are autonomous; `t` is accepted to keep the law
    /// contract uniform.
    pub fn evaluate(&self, p: &Polygon, _t: f64) -> Result<Vec<f64>, LawError> {
        match self {
            VelocityLaw::Curvature { backward } => {
                let sign = if *backward { 1.0 } else { -1.0 };
                Ok(p.curvatures()?.into_iter().map(|k| sign * k).collect())
            }
            VelocityLaw::AreaPreservingCurvature => {
                let kappa = p.curvatures()?;
                let mean = 2.0 * p.fan().tan_half_sum() / p.perimeter();
                Ok(kappa.into_iter().map(|k| mean - k).collect())
            }
            VelocityLaw::Advected { field, rule } => edge_mean_normal_speeds(p, field, rule),
            VelocityLaw::AdvectedCurvature { field, rule } => {
                let mut f = VelocityLaw::AreaPreservingCurvature.evaluate(p, _t)?;
                let adv = edge_mean_normal_speeds(p, field, rule)?;
                for (fj, aj) in f.iter_mut().zip(adv) {
                    *fj += aj;
                }
                Ok(f)
            }
            VelocityLaw::LengthPreservingCurvature => {
                let kappa = p.curvatures()?;
                let lengths = p.edge_lengths();
                let denom = 2.0 * p.fan().tan_half_sum();
                if denom.abs() < 1e-300 {
                    return Err(LawError::ZeroAngleSum);
                }
                let num: f64 = lengths
                    .iter()
                    .zip(&kappa)
                    .map(|(len, k)| len * k * k)
                    .sum();
                let offset = num / denom;
                Ok(kappa.into_iter().map(|k| offset - k).collect())
            }
            VelocityLaw::ConstantSpeed { c } => Ok(vec![*c; p.len()]),
        }
    }

    /// The conservation classes this law declares on the given fan.
    pub fn conservation(&self, fan: &NormalFan) -> Conservation {
        match self {
            VelocityLaw::Curvature { backward: false } => Conservation {
                cas: Some(-2.0 * fan.tan_half_sum()),
                cls: None,
                cs: true,
            },
            VelocityLaw::Curvature { backward: true } => Conservation {
                cas: Some(2.0 * fan.tan_half_sum()),
                cls: None,
                cs: false,
            },
            VelocityLaw::AreaPreservingCurvature => Conservation {
                cas: Some(0.0),
                cls: None,
                cs: true,
            },
            VelocityLaw::Advected { field, .. } => Conservation {
                cas: Some(field.mu_flux),
                cls: None,
                cs: false,
            },
            VelocityLaw::AdvectedCurvature { field, .. } => Conservation {
                cas: Some(field.mu_flux),
                cls: None,
                cs: false,
            },
            VelocityLaw::LengthPreservingCurvature => Conservation {
                cas: None,
                cls: Some(0.0),
                cs: false,
            },
            VelocityLaw::ConstantSpeed { c } => Conservation {
                cas: None,
                cls: Some(2.0 * c * fan.tan_half_sum()),
                cs: false,
            },
        }
    }
}

/// Mean of `u . n_j` over every edge, by Gauss-Legendre sampling. The edge
/// mean equals the weighted average of samples, so no division by the edge
/// length is involved; degenerate edges are still rejected because the law
/// contract requires an admissible polygon.
fn edge_mean_normal_speeds(
    p: &Polygon,
    field: &VectorField2D,
    rule: &GaussLegendre,
) -> Result<Vec<f64>, LawError> {
    let n = p.len();
    let vertices = p.vertices();
    let lengths = p.edge_lengths();
    let normals = p.fan().normals();
    let mut speeds = Vec::with_capacity(n);
    for j in 0..n {
        if lengths[j] <= 0.0 {
            return Err(LawError::DegenerateEdge {
                index: j,
                length: lengths[j],
            });
        }
        let from = vertices[(j + n - 1) % n];
        let to = vertices[j];
        let mid = Vec2::new(0.5 * (from.x + to.x), 0.5 * (from.y + to.y));
        let half = Vec2::new(0.5 * (to.x - from.x), 0.5 * (to.y - from.y));
        let mut acc = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let sample = field.eval(mid + half.scale(*x));
            let v = sample.dot(normals[j]);
            if !v.is_finite() {
                return Err(LawError::SingularFieldOnEdge { edge: j });
            }
            acc += w * v;
        }
        speeds.push(0.5 * acc);
    }
    Ok(speeds)
}

/// Sum of edge-length-weighted speeds: the instantaneous rate of area change.
pub fn area_speed_of(p: &Polygon, speeds: &[f64]) -> f64 {
    p.edge_lengths()
        .iter()
        .zip(speeds)
        .map(|(len, f)| len * f)
        .sum()
}

/// Sum of eta-weighted speeds: the instantaneous rate of perimeter change.
pub fn length_speed_of(p: &Polygon, speeds: &[f64]) -> f64 {
    p.fan()
        .eta()
        .iter()
        .zip(speeds)
        .map(|(eta, f)| eta * f)
        .sum()
}

/// Deviation of the actual weighted speed sums from the law's declared
/// constants; `None` where the law declares nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationResidual {
    pub cas: Option<f64>,
    pub cls: Option<f64>,
}

pub fn conservation_residual(
    law: &VelocityLaw,
    p: &Polygon,
    t: f64,
) -> Result<ConservationResidual, LawError> {
    let speeds = law.evaluate(p, t)?;
    let declared = law.conservation(p.fan());
    Ok(ConservationResidual {
        cas: declared.cas.map(|mu| area_speed_of(p, &speeds) - mu),
        cls: declared.cls.map(|mu| length_speed_of(p, &speeds) - mu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::NormalFan;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn square() -> Polygon {
        let fan = NormalFan::new(&[
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, -1.0),
        ])
        .unwrap();
        Polygon::new(fan, vec![0.5; 4]).unwrap()
    }

    fn regular(n: usize, apothem: f64) -> Polygon {
        let dirs: Vec<Vec2> = (0..n)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / n as f64;
                Vec2::new(th.cos(), th.sin())
            })
            .collect();
        Polygon::new(NormalFan::new(&dirs).unwrap(), vec![apothem; n]).unwrap()
    }

    #[test]
    fn curvature_flow_on_square() {
        let p = square();
        let law = VelocityLaw::curvature();
        let f = law.evaluate(&p, 0.0).unwrap();
        for v in &f {
            assert_relative_eq!(*v, -2.0, epsilon = 1e-14);
        }
        let cons = law.conservation(p.fan());
        assert_relative_eq!(cons.cas.unwrap(), -8.0, epsilon = 1e-13);
        assert!(cons.cs);

        let back = VelocityLaw::backward_curvature();
        for v in back.evaluate(&p, 0.0).unwrap() {
            assert_relative_eq!(v, 2.0, epsilon = 1e-14);
        }
        assert_relative_eq!(back.conservation(p.fan()).cas.unwrap(), 8.0, epsilon = 1e-13);
    }

    #[test]
    fn curvature_flow_on_regular_gon() {
        let h = 0.42;
        let p = regular(9, h);
        for v in VelocityLaw::curvature().evaluate(&p, 0.0).unwrap() {
            assert_relative_eq!(v, -1.0 / h, epsilon = 1e-12);
        }
    }

    #[test]
    fn area_preserving_curvature_is_zero_on_regular_gons() {
        for n in [4usize, 6, 13] {
            let p = regular(n, 0.7);
            let f = VelocityLaw::area_preserving_curvature()
                .evaluate(&p, 0.0)
                .unwrap();
            for v in f {
                assert!(v.abs() < 1e-14, "regular {n}-gon should be stationary: {v}");
            }
        }
    }

    #[test]
    fn area_preserving_curvature_has_zero_area_speed() {
        let fan = square().fan().clone();
        let p = Polygon::new(fan, vec![0.5, 0.5, 0.5, 0.6]).unwrap();
        let law = VelocityLaw::area_preserving_curvature();
        let f = law.evaluate(&p, 0.0).unwrap();
        assert!(area_speed_of(&p, &f).abs() < 1e-12);
        // Curve shortening: eta-weighted sum never positive.
        assert!(length_speed_of(&p, &f) <= 1e-12);
    }

    #[test]
    fn point_source_on_unit_square() {
        let p = square();
        let law = VelocityLaw::advected(VectorField2D::point_source(), DEFAULT_QUAD_ORDER);
        let f = law.evaluate(&p, 0.0).unwrap();
        for v in &f {
            assert_relative_eq!(*v, 0.25, epsilon = 1e-13);
        }
        assert_relative_eq!(area_speed_of(&p, &f), 1.0, epsilon = 1e-12);
        assert_relative_eq!(law.conservation(p.fan()).cas.unwrap(), 1.0);
    }

    #[test]
    fn uniform_field_is_exact_at_any_order() {
        let p = regular(7, 0.9);
        let c = Vec2::new(0.3, -1.1);
        for order in [1usize, 2, 8] {
            let law = VelocityLaw::advected(VectorField2D::uniform(c.x, c.y), order);
            let f = law.evaluate(&p, 0.0).unwrap();
            for (v, n) in f.iter().zip(p.fan().normals()) {
                assert_relative_eq!(*v, c.dot(*n), epsilon = 1e-13);
            }
            assert!(area_speed_of(&p, &f).abs() < 1e-12);
        }
    }

    #[test]
    fn saddle_field_has_zero_flux() {
        let fan = square().fan().clone();
        let p = Polygon::new(fan, vec![0.45, 0.62, 0.51, 0.38]).unwrap();
        let law = VelocityLaw::advected(VectorField2D::saddle(), DEFAULT_QUAD_ORDER);
        let f = law.evaluate(&p, 0.0).unwrap();
        assert!(area_speed_of(&p, &f).abs() < 1e-10);
    }

    #[test]
    fn advected_curvature_reduces_to_parents() {
        let p = regular(8, 1.1);
        let zero_field = VectorField2D::uniform(0.0, 0.0);
        let combined = VelocityLaw::advected_curvature(zero_field, 4);
        let ap = VelocityLaw::area_preserving_curvature();
        let fc = combined.evaluate(&p, 0.0).unwrap();
        let fa = ap.evaluate(&p, 0.0).unwrap();
        for (c, a) in fc.iter().zip(&fa) {
            assert_relative_eq!(*c, *a, epsilon = 1e-14);
        }

        // On a regular polygon the curvature part vanishes, leaving the
        // advected part alone.
        let shear = VelocityLaw::advected_curvature(VectorField2D::shear_xy(), DEFAULT_QUAD_ORDER);
        let adv = VelocityLaw::advected(VectorField2D::shear_xy(), DEFAULT_QUAD_ORDER);
        let fs = shear.evaluate(&p, 0.0).unwrap();
        let fv = adv.evaluate(&p, 0.0).unwrap();
        for (s, v) in fs.iter().zip(&fv) {
            assert_relative_eq!(*s, *v, epsilon = 1e-12);
        }
        assert!(area_speed_of(&p, &fs).abs() < 1e-10);
    }

    #[test]
    fn length_preserving_curvature_on_square_is_zero() {
        let p = square();
        let f = VelocityLaw::length_preserving_curvature()
            .evaluate(&p, 0.0)
            .unwrap();
        for v in f {
            assert!(v.abs() < 1e-13);
        }
    }

    #[test]
    fn length_preserving_curvature_has_zero_length_speed() {
        let fan = square().fan().clone();
        let p = Polygon::new(fan, vec![0.55, 0.48, 0.52, 0.61]).unwrap();
        let f = VelocityLaw::length_preserving_curvature()
            .evaluate(&p, 0.0)
            .unwrap();
        assert!(length_speed_of(&p, &f).abs() < 1e-12);
    }

    #[test]
    fn constant_speed_length_rate() {
        let p = square();
        let law = VelocityLaw::constant_speed(1.0);
        let cons = law.conservation(p.fan());
        assert_relative_eq!(cons.cls.unwrap(), 8.0, epsilon = 1e-13);
        assert!(cons.cas.is_none());

        for v in VelocityLaw::constant_speed(0.0).evaluate(&p, 0.0).unwrap() {
            assert_eq!(v, 0.0);
        }

        for n in [5usize, 12] {
            let q = regular(n, 1.0);
            let mu = VelocityLaw::constant_speed(1.0)
                .conservation(q.fan())
                .cls
                .unwrap();
            assert_relative_eq!(mu, 2.0 * n as f64 * (PI / n as f64).tan(), epsilon = 1e-12);
        }
    }

    #[test]
    fn residuals_vanish_for_declared_classes() {
        let fan = square().fan().clone();
        let p = Polygon::new(fan, vec![0.52, 0.47, 0.55, 0.49]).unwrap();
        let r = conservation_residual(&VelocityLaw::curvature(), &p, 0.0).unwrap();
        assert!(r.cas.unwrap().abs() < 1e-12);
        assert!(r.cls.is_none());

        let r = conservation_residual(&VelocityLaw::area_preserving_curvature(), &p, 0.0).unwrap();
        assert!(r.cas.unwrap().abs() < 1e-12);

        let r =
            conservation_residual(&VelocityLaw::length_preserving_curvature(), &p, 0.0).unwrap();
        assert!(r.cls.unwrap().abs() < 1e-12);
    }

    #[test]
    fn translation_leaves_curvature_laws_unchanged() {
        let fan = square().fan().clone();
        let p = Polygon::new(fan, vec![0.52, 0.47, 0.55, 0.49]).unwrap();
        let q = p.translate(Vec2::new(0.21, -0.13));
        for law in [
            VelocityLaw::curvature(),
            VelocityLaw::area_preserving_curvature(),
            VelocityLaw::length_preserving_curvature(),
        ] {
            let fp = law.evaluate(&p, 0.0).unwrap();
            let fq = law.evaluate(&q, 0.0).unwrap();
            for (a, b) in fp.iter().zip(&fq) {
                assert!((a - b).abs() < 1e-12, "{}: {a} vs {b}", law.id());
            }
        }
    }

    #[test]
    fn law_id_round_trip() {
        for id in [
            "pcf",
            "pcf-backward",
            "ap-pcf",
            "lp-pcf",
            "const:1.5",
            "advected:point-source",
            "advected:uniform:0.5,-1",
            "ap-advected-pcf:shear-xy",
            "ap-advected-pcf:saddle",
        ] {
            let law = VelocityLaw::parse(id, 8).unwrap();
            assert_eq!(law.id(), id);
        }
        assert!(VelocityLaw::parse("nope", 8).is_err());
        assert!(VelocityLaw::parse("const:abc", 8).is_err());
        assert!(VelocityLaw::parse("advected:vortex", 8).is_err());
    }

    #[test]
    fn point_source_singular_on_edge_through_origin() {
        // Shift the square so an edge line passes through the origin.
        let p = square().translate(Vec2::new(0.5, 0.0));
        let law = VelocityLaw::advected(VectorField2D::point_source(), 3);
        // Odd order puts a sample at the edge midpoint; edge 2 line is x = 0.
        let err = law.evaluate(&p, 0.0).unwrap_err();
        assert!(matches!(err, LawError::SingularFieldOnEdge { .. }));
    }
}
