//! Preset initial polygons, scenario files, and their parsing.
//!
//! Scenario files are line-oriented UTF-8 text: `#` starts a comment, the
//! polygon is either `N <int>` followed by N `normal <nx> <ny> <h>` lines or
//! a single `preset <id> <params...>` line, and the remaining lines are
//! `law <id>`, `scheme euler|implicit`, `tau <f>`, `t_end <f>` plus optional
//! `eps <f>` and `every <int>`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::geom::{FanError, NormalFan, Polygon, Vec2};
use crate::integrate::Scheme;
use crate::law::{LawError, VelocityLaw};

#[derive(Debug, Error)]
pub enum PresetError {
    #[error("bad preset parameter: {0}")]
    BadParameter(String),
    #[error("preset produced an inadmissible polygon (min edge {min_edge})")]
    Inadmissible { min_edge: f64 },
    #[error(transparent)]
    Fan(#[from] FanError),
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Preset(#[from] PresetError),
    #[error(transparent)]
    Law(#[from] LawError),
}

/// Relative floor for the construction-time admissibility guard.
const PRESET_MIN_EDGE_FRACTION: f64 = 1e-12;

fn guard_admissible(p: Polygon, scale: f64) -> Result<Polygon, PresetError> {
    let min_edge = p.min_edge_length();
    if min_edge <= PRESET_MIN_EDGE_FRACTION * scale.abs() {
        return Err(PresetError::Inadmissible { min_edge });
    }
    Ok(p)
}

/// Regular N-gon with the given apothem; normals at angles 2 pi j / N.
pub fn preset_regular(n: usize, apothem: f64) -> Result<Polygon, PresetError> {
    if n < 3 {
        return Err(PresetError::BadParameter(format!(
            "regular polygon needs n >= 3, got {n}"
        )));
    }
    if apothem.is_nan() || apothem <= 0.0 {
        return Err(PresetError::BadParameter(format!(
            "apothem must be positive, got {apothem}"
        )));
    }
    let dirs: Vec<Vec2> = (0..n)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / n as f64;
            Vec2::new(th.cos(), th.sin())
        })
        .collect();
    let fan = NormalFan::new(&dirs)?;
    guard_admissible(Polygon::new(fan, vec![apothem; n]).expect("sizes match"), apothem)
}

/// An N-gon made of the upper half of a regular 2(N-2)-gon closed from below
/// by two edges meeting at a bottom apex.
///
/// `scale` is the circumradius of the half-gon arc; its base corners sit at
/// (+-scale, 0) and the two closing edges leave them at 60 degrees below the
/// horizontal. This fixes a reproducible shape for the family of "half-gon
/// plus triangle" polygons.
pub fn preset_half_gon_triangle(n: usize, scale: f64) -> Result<Polygon, PresetError> {
    if n < 5 {
        return Err(PresetError::BadParameter(format!(
            "half-gon-triangle needs n >= 5, got {n}"
        )));
    }
    if scale.is_nan() || scale <= 0.0 {
        return Err(PresetError::BadParameter(format!(
            "scale must be positive, got {scale}"
        )));
    }
    let upper = n - 2;
    let k = 2 * upper; // full regular polygon the arc is cut from
    let apothem = scale * (PI / k as f64).cos();
    let bottom_angle = PI / 3.0;
    let bottom_height = scale * bottom_angle.cos();

    let mut dirs = Vec::with_capacity(n);
    let mut heights = Vec::with_capacity(n);
    for i in 0..upper {
        let th = PI * (i as f64 + 0.5) / upper as f64;
        dirs.push(Vec2::new(th.cos(), th.sin()));
        heights.push(apothem);
    }
    for th in [PI + bottom_angle, 2.0 * PI - bottom_angle] {
        dirs.push(Vec2::new(th.cos(), th.sin()));
        heights.push(bottom_height);
    }
    let fan = NormalFan::new(&dirs)?;
    guard_admissible(Polygon::new(fan, heights).expect("sizes match"), scale)
}

/// Sharp n-fold star: a 2n-gon whose vertices alternate between radius
/// `r_outer` and `r_inner`. All edges are congruent, so the polygonal
/// curvature is the same on every edge.
pub fn preset_star_sharp(n_fold: usize, r_inner: f64, r_outer: f64) -> Result<Polygon, PresetError> {
    check_star_params(n_fold, r_inner, r_outer)?;
    let m = 2 * n_fold;
    let vertices: Vec<Vec2> = (0..m)
        .map(|k| {
            let th = PI * k as f64 / n_fold as f64;
            let r = if k % 2 == 0 { r_outer } else { r_inner };
            Vec2::new(r * th.cos(), r * th.sin())
        })
        .collect();
    let p = Polygon::from_vertices(&vertices)?;
    guard_admissible(p, r_outer)
}

fn check_star_params(n_fold: usize, r_inner: f64, r_outer: f64) -> Result<(), PresetError> {
    if n_fold < 3 {
        return Err(PresetError::BadParameter(format!(
            "star needs n_fold >= 3, got {n_fold}"
        )));
    }
    if !(r_inner > 0.0 && r_outer > 0.0 && r_inner < r_outer) {
        return Err(PresetError::BadParameter(format!(
            "star needs 0 < r_inner < r_outer, got {r_inner} and {r_outer}"
        )));
    }
    Ok(())
}

/// Angles and coefficient helpers shared by the non-sharp star builders.
/// Tip half-angle `psi` must satisfy pi/n < psi < pi/2 for a reflex
/// between-petal turn and a nonempty admissible height band.
fn nonsharp_star_normals(n_fold: usize, psi: f64) -> Result<Vec<Vec2>, PresetError> {
    let sector = 2.0 * PI / n_fold as f64;
    if !(psi > 0.5 * sector && psi < PI / 2.0) {
        return Err(PresetError::BadParameter(format!(
            "tip half-angle {psi} outside (pi/{n_fold}, pi/2)"
        )));
    }
    let mut dirs = Vec::with_capacity(3 * n_fold);
    for i in 0..n_fold {
        let center = i as f64 * sector;
        for offset in [-psi, 0.0, psi] {
            let a = center + offset;
            dirs.push(Vec2::new(a.cos(), a.sin()));
        }
    }
    Ok(dirs)
}

pub const DEFAULT_STAR_TIP_FACTOR: f64 = 0.75;

/// Default tip half-angle: 0.75 of the sector, pulled back to the middle of
/// the valid interval when that would reach pi/2 (small fold counts).
fn default_star_psi(n_fold: usize) -> f64 {
    let sector = 2.0 * PI / n_fold as f64;
    (DEFAULT_STAR_TIP_FACTOR * sector).min(0.5 * (0.5 * sector + 0.5 * PI))
}

/// Non-sharp n-fold star: a 3n-gon whose petals have a flat tip edge at
/// distance `r_outer` from the origin and reflex vertices at radius
/// `r_inner`. `psi` is the tip half-angle (default 0.75 of the sector).
pub fn preset_star_nonsharp(
    n_fold: usize,
    r_inner: f64,
    r_outer: f64,
    psi: Option<f64>,
) -> Result<Polygon, PresetError> {
    check_star_params(n_fold, r_inner, r_outer)?;
    let sector = 2.0 * PI / n_fold as f64;
    let psi = psi.unwrap_or_else(|| default_star_psi(n_fold));
    let dirs = nonsharp_star_normals(n_fold, psi)?;
    let fan = NormalFan::new(&dirs)?;
    let h_tip = r_outer;
    let h_flank = r_inner * (psi - 0.5 * sector).cos();
    let heights: Vec<f64> = (0..3 * n_fold)
        .map(|j| if j % 3 == 1 { h_tip } else { h_flank })
        .collect();
    guard_admissible(Polygon::new(fan, heights).expect("sizes match"), r_outer)
}

/// Non-sharp n-fold star with the flank height tuned so that both edge
/// classes carry the same polygonal curvature, making the polygon a
/// stationary state of area-preserving curvature motion.
pub fn preset_star_tuned(
    n_fold: usize,
    r_outer: f64,
    psi: Option<f64>,
) -> Result<Polygon, PresetError> {
    if n_fold < 3 {
        return Err(PresetError::BadParameter(format!(
            "star needs n_fold >= 3, got {n_fold}"
        )));
    }
    if r_outer.is_nan() || r_outer <= 0.0 {
        return Err(PresetError::BadParameter(format!(
            "r_outer must be positive, got {r_outer}"
        )));
    }
    let sector = 2.0 * PI / n_fold as f64;
    let psi = psi.unwrap_or_else(|| default_star_psi(n_fold));
    let dirs = nonsharp_star_normals(n_fold, psi)?;
    let fan = NormalFan::new(&dirs)?;

    // Equal curvature means d1/d2 = eta1/eta2. Both edge lengths are linear
    // in the two height classes, so the flank height solves a linear
    // equation in the tip height.
    let phi0 = sector - 2.0 * psi;
    let eta1 = (phi0 / 2.0).tan() + (psi / 2.0).tan();
    let eta2 = 2.0 * (psi / 2.0).tan();
    let a_psi = 1.0 / psi.sin();
    let cot_psi = 1.0 / psi.tan();
    let h_tip = r_outer;
    let h_flank = h_tip * (a_psi * eta2 + 2.0 * cot_psi * eta1)
        / (2.0 * a_psi * eta1 + (cot_psi - (phi0 / 2.0).tan()) * eta2);

    let heights: Vec<f64> = (0..3 * n_fold)
        .map(|j| if j % 3 == 1 { h_tip } else { h_flank })
        .collect();
    guard_admissible(Polygon::new(fan, heights).expect("sizes match"), r_outer)
}

/// Axis-aligned rectangle with half-width `a` and half-height `b` on the
/// four-normal square fan. Under curvature flow this shape has a closed-form
/// solution, which makes it the reference case for order studies.
pub fn preset_rectangle(a: f64, b: f64) -> Result<Polygon, PresetError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(PresetError::BadParameter(format!(
            "rectangle needs positive half-sizes, got {a} and {b}"
        )));
    }
    let fan = NormalFan::new(&[
        Vec2::new(1.0, 0.0),
        Vec2::new(0.0, 1.0),
        Vec2::new(-1.0, 0.0),
        Vec2::new(0.0, -1.0),
    ])?;
    guard_admissible(
        Polygon::new(fan, vec![a, b, a, b]).expect("sizes match"),
        a.max(b),
    )
}

/// Polygon whose vertices sample an axis-aligned ellipse with semi-axes
/// `a` (horizontal) and `b` (vertical) at uniform parameter angles.
pub fn preset_ellipse(n: usize, a: f64, b: f64) -> Result<Polygon, PresetError> {
    if n < 3 {
        return Err(PresetError::BadParameter(format!(
            "ellipse polygon needs n >= 3, got {n}"
        )));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(PresetError::BadParameter(format!(
            "semi-axes must be positive, got {a} and {b}"
        )));
    }
    let vertices: Vec<Vec2> = (0..n)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / n as f64;
            Vec2::new(a * t.cos(), b * t.sin())
        })
        .collect();
    let p = Polygon::from_vertices(&vertices)?;
    guard_admissible(p, a.max(b))
}

/// The polygon part of a scenario: explicit normals and heights, or a named
/// preset with numeric parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometrySpec {
    Explicit { normals: Vec<Vec2>, heights: Vec<f64> },
    Preset(PresetSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PresetSpec {
    Regular { n: usize, apothem: f64 },
    HalfGonTriangle { n: usize, scale: f64 },
    StarSharp { n_fold: usize, r_inner: f64, r_outer: f64 },
    StarNonsharp { n_fold: usize, r_inner: f64, r_outer: f64, psi: Option<f64> },
    StarTuned { n_fold: usize, r_outer: f64, psi: Option<f64> },
    Rectangle { a: f64, b: f64 },
    Ellipse { n: usize, a: f64, b: f64 },
}

impl PresetSpec {
    /// Parses `<id>` plus whitespace- or colon-separated parameters, e.g.
    /// `regular 4 0.5` or the CLI form `regular:4:0.5`.
    pub fn parse(id: &str, params: &[&str]) -> Result<PresetSpec, PresetError> {
        let bad = || PresetError::BadParameter(format!("{id} {}", params.join(" ")));
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad());
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        match (id, params.len()) {
            ("regular", 2) => Ok(PresetSpec::Regular {
                n: int(params[0])?,
                apothem: num(params[1])?,
            }),
            ("half-gon-triangle", 2) => Ok(PresetSpec::HalfGonTriangle {
                n: int(params[0])?,
                scale: num(params[1])?,
            }),
            ("star-sharp", 3) => Ok(PresetSpec::StarSharp {
                n_fold: int(params[0])?,
                r_inner: num(params[1])?,
                r_outer: num(params[2])?,
            }),
            ("star-nonsharp", 3 | 4) => Ok(PresetSpec::StarNonsharp {
                n_fold: int(params[0])?,
                r_inner: num(params[1])?,
                r_outer: num(params[2])?,
                psi: params.get(3).map(|s| num(s)).transpose()?,
            }),
            ("star-tuned", 2 | 3) => Ok(PresetSpec::StarTuned {
                n_fold: int(params[0])?,
                r_outer: num(params[1])?,
                psi: params.get(2).map(|s| num(s)).transpose()?,
            }),
            ("rectangle", 2) => Ok(PresetSpec::Rectangle {
                a: num(params[0])?,
                b: num(params[1])?,
            }),
            ("ellipse", 3) => Ok(PresetSpec::Ellipse {
                n: int(params[0])?,
                a: num(params[1])?,
                b: num(params[2])?,
            }),
            _ => Err(bad()),
        }
    }

    /// Parses the colon-joined CLI form `<id>:<p1>:<p2>...`.
    pub fn parse_colon(s: &str) -> Result<PresetSpec, PresetError> {
        let mut parts = s.split(':');
        let id = parts
            .next()
            .ok_or_else(|| PresetError::BadParameter(s.to_string()))?;
        let params: Vec<&str> = parts.collect();
        PresetSpec::parse(id, &params)
    }

    pub fn build(&self) -> Result<Polygon, PresetError> {
        match self {
            PresetSpec::Regular { n, apothem } => preset_regular(*n, *apothem),
            PresetSpec::HalfGonTriangle { n, scale } => preset_half_gon_triangle(*n, *scale),
            PresetSpec::StarSharp {
                n_fold,
                r_inner,
                r_outer,
            } => preset_star_sharp(*n_fold, *r_inner, *r_outer),
            PresetSpec::StarNonsharp {
                n_fold,
                r_inner,
                r_outer,
                psi,
            } => preset_star_nonsharp(*n_fold, *r_inner, *r_outer, *psi),
            PresetSpec::StarTuned { n_fold, r_outer, psi } => {
                preset_star_tuned(*n_fold, *r_outer, *psi)
            }
            PresetSpec::Rectangle { a, b } => preset_rectangle(*a, *b),
            PresetSpec::Ellipse { n, a, b } => preset_ellipse(*n, *a, *b),
        }
    }

    pub fn to_words(&self) -> String {
        match self {
            PresetSpec::Regular { n, apothem } => format!("regular {n} {apothem}"),
            PresetSpec::HalfGonTriangle { n, scale } => format!("half-gon-triangle {n} {scale}"),
            PresetSpec::StarSharp {
                n_fold,
                r_inner,
                r_outer,
            } => format!("star-sharp {n_fold} {r_inner} {r_outer}"),
            PresetSpec::StarNonsharp {
                n_fold,
                r_inner,
                r_outer,
                psi,
            } => match psi {
                Some(psi) => format!("star-nonsharp {n_fold} {r_inner} {r_outer} {psi}"),
                None => format!("star-nonsharp {n_fold} {r_inner} {r_outer}"),
            },
            PresetSpec::StarTuned { n_fold, r_outer, psi } => match psi {
                Some(psi) => format!("star-tuned {n_fold} {r_outer} {psi}"),
                None => format!("star-tuned {n_fold} {r_outer}"),
            },
            PresetSpec::Rectangle { a, b } => format!("rectangle {a} {b}"),
            PresetSpec::Ellipse { n, a, b } => format!("ellipse {n} {a} {b}"),
        }
    }
}

/// A full simulation description as read from a scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub geometry: GeometrySpec,
    pub law_id: String,
    pub scheme: Scheme,
    pub tau: f64,
    pub t_end: f64,
    pub eps: Option<f64>,
    pub every: Option<usize>,
}

impl ScenarioSpec {
    /// Builds the initial polygon, failing loudly on inadmissible input.
    pub fn build_polygon(&self) -> Result<Polygon, ScenarioError> {
        match &self.geometry {
            GeometrySpec::Explicit { normals, heights } => {
                let fan = NormalFan::new(normals).map_err(PresetError::Fan)?;
                let p = Polygon::new(fan, heights.clone()).map_err(|e| ScenarioError::Parse {
                    line: 0,
                    message: e.to_string(),
                })?;
                let min_edge = p.min_edge_length();
                if min_edge <= 0.0 {
                    return Err(PresetError::Inadmissible { min_edge }.into());
                }
                Ok(p)
            }
            GeometrySpec::Preset(preset) => Ok(preset.build()?),
        }
    }

    pub fn build_law(&self, quad_order: usize) -> Result<VelocityLaw, ScenarioError> {
        Ok(VelocityLaw::parse(&self.law_id, quad_order)?)
    }

    pub fn parse(text: &str) -> Result<ScenarioSpec, ScenarioError> {
        let fail = |line: usize, message: &str| ScenarioError::Parse {
            line,
            message: message.to_string(),
        };
        let mut n_decl: Option<usize> = None;
        let mut normals: Vec<Vec2> = Vec::new();
        let mut heights: Vec<f64> = Vec::new();
        let mut preset: Option<PresetSpec> = None;
        let mut law_id: Option<String> = None;
        let mut scheme: Option<Scheme> = None;
        let mut tau: Option<f64> = None;
        let mut t_end: Option<f64> = None;
        let mut eps: Option<f64> = None;
        let mut every: Option<usize> = None;

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let key = words.next().expect("nonempty line");
            let rest: Vec<&str> = words.collect();
            let one_f64 = |rest: &[&str]| -> Result<f64, ScenarioError> {
                if rest.len() != 1 {
                    return Err(fail(lineno, "expected exactly one value"));
                }
                rest[0]
                    .parse::<f64>()
                    .map_err(|_| fail(lineno, "expected a number"))
            };
            match key {
                "N" => {
                    if rest.len() != 1 {
                        return Err(fail(lineno, "expected `N <int>`"));
                    }
                    let n = rest[0]
                        .parse::<usize>()
                        .map_err(|_| fail(lineno, "N must be an integer"))?;
                    n_decl = Some(n);
                }
                "normal" => {
                    if rest.len() != 3 {
                        return Err(fail(lineno, "expected `normal <nx> <ny> <h>`"));
                    }
                    let vals: Result<Vec<f64>, _> =
                        rest.iter().map(|s| s.parse::<f64>()).collect();
                    let vals = vals.map_err(|_| fail(lineno, "malformed normal line"))?;
                    normals.push(Vec2::new(vals[0], vals[1]));
                    heights.push(vals[2]);
                }
                "preset" => {
                    if rest.is_empty() {
                        return Err(fail(lineno, "expected `preset <id> <params...>`"));
                    }
                    let spec = PresetSpec::parse(rest[0], &rest[1..])
                        .map_err(|e| fail(lineno, &e.to_string()))?;
                    preset = Some(spec);
                }
                "law" => {
                    if rest.len() != 1 {
                        return Err(fail(lineno, "expected `law <id>`"));
                    }
                    law_id = Some(rest[0].to_string());
                }
                "scheme" => {
                    if rest.len() != 1 {
                        return Err(fail(lineno, "expected `scheme euler|implicit`"));
                    }
                    scheme = Some(
                        Scheme::parse(rest[0])
                            .ok_or_else(|| fail(lineno, "scheme must be euler or implicit"))?,
                    );
                }
                "tau" => tau = Some(one_f64(&rest)?),
                "t_end" => t_end = Some(one_f64(&rest)?),
                "eps" => eps = Some(one_f64(&rest)?),
                "every" => {
                    if rest.len() != 1 {
                        return Err(fail(lineno, "expected `every <int>`"));
                    }
                    every = Some(
                        rest[0]
                            .parse::<usize>()
                            .map_err(|_| fail(lineno, "every must be an integer"))?,
                    );
                }
                other => return Err(fail(lineno, &format!("unknown keyword `{other}`"))),
            }
        }

        let geometry = match (preset, n_decl) {
            (Some(p), None) => {
                if !normals.is_empty() {
                    return Err(fail(0, "scenario mixes `preset` with `normal` lines"));
                }
                GeometrySpec::Preset(p)
            }
            (None, Some(n)) => {
                if normals.len() != n {
                    return Err(fail(
                        0,
                        &format!("declared N = {n} but found {} normal lines", normals.len()),
                    ));
                }
                GeometrySpec::Explicit { normals, heights }
            }
            (Some(_), Some(_)) => return Err(fail(0, "scenario has both `N` and `preset`")),
            (None, None) => return Err(fail(0, "scenario lacks polygon data (`N` or `preset`)")),
        };

        Ok(ScenarioSpec {
            geometry,
            law_id: law_id.ok_or_else(|| fail(0, "missing `law` line"))?,
            scheme: scheme.ok_or_else(|| fail(0, "missing `scheme` line"))?,
            tau: tau.ok_or_else(|| fail(0, "missing `tau` line"))?,
            t_end: t_end.ok_or_else(|| fail(0, "missing `t_end` line"))?,
            eps,
            every,
        })
    }

    /// Canonical textual form; `parse` of the output reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.geometry {
            GeometrySpec::Explicit { normals, heights } => {
                let _ = writeln!(out, "N {}", normals.len());
                for (n, h) in normals.iter().zip(heights) {
                    let _ = writeln!(out, "normal {} {} {}", n.x, n.y, h);
                }
            }
            GeometrySpec::Preset(p) => {
                let _ = writeln!(out, "preset {}", p.to_words());
            }
        }
        let _ = writeln!(out, "law {}", self.law_id);
        let _ = writeln!(out, "scheme {}", self.scheme.id());
        let _ = writeln!(out, "tau {}", self.tau);
        let _ = writeln!(out, "t_end {}", self.t_end);
        if let Some(eps) = self.eps {
            let _ = writeln!(out, "eps {eps}");
        }
        if let Some(every) = self.every {
            let _ = writeln!(out, "every {every}");
        }
        out
    }

    pub fn read_file(path: &Path) -> Result<ScenarioSpec, ScenarioError> {
        let text = std::fs::read_to_string(path)?;
        ScenarioSpec::parse(&text)
    }

    pub fn write_file(&self, path: &Path) -> Result<(), ScenarioError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}
