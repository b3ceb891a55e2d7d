//! Trajectory CSV and polygon SVG writers.

use std::fmt::Write as _;
use std::io;
use std::path::Path;
use std::sync::Arc;

use crate::geom::{Polygon, Vec2};
use crate::integrate::Trajectory;

/// Which discrete speed lands in the CSV's `mu_step` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedColumn {
    Area,
    Length,
}

/// Renders the trajectory as CSV, one row per completed step, with header
/// `t,h_1,...,h_N,perimeter,area,mu_step`. Floats are written in shortest
/// round-trip decimal form, so parsing the file recovers the exact values.
pub fn trajectory_csv(traj: &Trajectory, speed: SpeedColumn) -> String {
    let n = traj.initial_heights.len();
    let mut out = String::new();
    out.push('t');
    for j in 1..=n {
        let _ = write!(out, ",h_{j}");
    }
    out.push_str(",perimeter,area,mu_step\n");
    for rec in &traj.records {
        let _ = write!(out, "{}", rec.t + rec.tau);
        for h in &rec.heights_after {
            let _ = write!(out, ",{h}");
        }
        let mu = match speed {
            SpeedColumn::Area => rec.discrete_area_speed,
            SpeedColumn::Length => rec.discrete_length_speed,
        };
        let _ = writeln!(out, ",{},{},{}", rec.perimeter_after, rec.area_after, mu);
    }
    out
}

pub fn write_trajectory_csv(
    traj: &Trajectory,
    speed: SpeedColumn,
    path: &Path,
) -> io::Result<()> {
    std::fs::write(path, trajectory_csv(traj, speed))
}

fn bounding_box(vertices: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in vertices {
        lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
        hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
    }
    (lo, hi)
}

/// Viewport fitted to the polygon's bounding box, widened by 20 percent.
#[derive(Debug, Clone, Copy)]
pub struct Viewport {
    min: Vec2,
    width: f64,
    height: f64,
}

impl Viewport {
    pub fn fit(polygon: &Polygon) -> Viewport {
        let (lo, hi) = bounding_box(&polygon.vertices());
        let w = (hi.x - lo.x).max(1e-12);
        let h = (hi.y - lo.y).max(1e-12);
        let cx = 0.5 * (lo.x + hi.x);
        let cy = 0.5 * (lo.y + hi.y);
        Viewport {
            min: Vec2::new(cx - 0.6 * w, cy - 0.6 * h),
            width: 1.2 * w,
            height: 1.2 * h,
        }
    }

    fn stroke(&self) -> f64 {
        0.005 * self.width.max(self.height)
    }
}

fn points_attr(vertices: &[Vec2]) -> String {
    let mut s = String::new();
    for (i, v) in vertices.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{},{}", v.x, v.y);
    }
    s
}

/// SVG of one polygon. The y axis is flipped so the drawing matches the
/// mathematical orientation.
pub fn polygon_svg(polygon: &Polygon, view: &Viewport) -> String {
    svg_document(view, &[(polygon, false)])
}

/// SVG with the final polygon solid and the initial polygon dotted.
pub fn overlay_svg(final_polygon: &Polygon, initial: &Polygon, view: &Viewport) -> String {
    svg_document(view, &[(initial, true), (final_polygon, false)])
}

fn svg_document(view: &Viewport, layers: &[(&Polygon, bool)]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="480" height="480">"#,
        view.min.x,
        -(view.min.y + view.height),
        view.width,
        view.height
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)">"#);
    for (polygon, dotted) in layers {
        let dash = if *dotted {
            format!(
                r#" stroke-dasharray="{} {}""#,
                2.0 * view.stroke(),
                2.0 * view.stroke()
            )
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="none" stroke="black" stroke-width="{}"{dash}/>"#,
            points_attr(&polygon.vertices()),
            view.stroke()
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Writes `frame_<m>.svg` every `every`-th step (plus the initial state) and
/// `final_overlay.svg` into `dir`. Returns the number of files written.
pub fn write_snapshot_svgs(traj: &Trajectory, every: usize, dir: &Path) -> io::Result<usize> {
    assert!(every >= 1);
    std::fs::create_dir_all(dir)?;
    let initial = Polygon::new(Arc::clone(&traj.fan), traj.initial_heights.clone())
        .expect("trajectory data is consistent");
    let view = Viewport::fit(&initial);
    let mut written = 0;

    std::fs::write(dir.join("frame_0.svg"), polygon_svg(&initial, &view))?;
    written += 1;
    for rec in &traj.records {
        let step = rec.m + 1;
        if step % every == 0 {
            let p = Polygon::new(Arc::clone(&traj.fan), rec.heights_after.clone())
                .expect("trajectory data is consistent");
            std::fs::write(dir.join(format!("frame_{step}.svg")), polygon_svg(&p, &view))?;
            written += 1;
        }
    }
    let overlay = overlay_svg(&traj.final_polygon(), &initial, &view);
    std::fs::write(dir.join("final_overlay.svg"), overlay)?;
    Ok(written + 1)
}
