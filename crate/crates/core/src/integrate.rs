//! Time integration of polygon motion: an explicit Euler scheme and a
//! second-order implicit midpoint scheme.
//!
//! The implicit step evaluates the law at the half-way interpolation between
//! the old and new polygon. That single choice makes the discrete area change
//! per step exactly `mu * tau` for any law with constant area speed, because
//! the discrete area difference is a trapezoid sum over edges evaluated at
//! the midpoint lengths. The nonlinear midpoint equation is solved by a
//! damped-free fixed-point iteration that is a contraction for small enough
//! steps.

use std::sync::Arc;

use thiserror::Error;

use crate::geom::{GeomError, NormalFan, Polygon};
use crate::law::{LawError, VelocityLaw};

/// Default fixed-point stopping tolerance on the sup-norm of iterate gaps.
pub const DEFAULT_EPS_FP: f64 = 1e-15;
pub const DEFAULT_MAX_FP_ITERS: usize = 100;
/// Edge-collapse floor as a fraction of the initial mean edge length.
pub const MIN_EDGE_FRACTION: f64 = 1e-9;
const MAX_TAU_HALVINGS: usize = 10;

#[derive(Debug, Error)]
pub enum StepError {
    #[error("fixed-point iteration did not converge in {iters} iterations (gap {gap})")]
    FpNonConvergence { iters: usize, gap: f64 },
    #[error("midpoint polygon inadmissible during iteration (min edge {min_edge})")]
    InadmissibleIterate { min_edge: f64 },
    #[error(transparent)]
    Law(#[from] LawError),
}

/// Which scheme advances the polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Euler,
    Implicit,
}

impl Scheme {
    pub fn parse(s: &str) -> Option<Scheme> {
        match s {
            "euler" => Some(Scheme::Euler),
            "implicit" => Some(Scheme::Implicit),
            _ => None,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Scheme::Euler => "euler",
            Scheme::Implicit => "implicit",
        }
    }
}

/// Step-size and solver control for a run.
#[derive(Debug, Clone)]
pub struct StepControl {
    /// Uniform time step; the final step is shortened to land on `t_end`.
    pub tau: f64,
    /// Fixed-point stopping tolerance epsilon (the loop stops at gap <= eps/2).
    pub eps_fp: f64,
    /// When set, the stopping tolerance scales with max(1, |h|_inf).
    pub relative_eps: bool,
    pub max_fp_iters: usize,
    /// Admissibility floor; `None` resolves to a fraction of the initial
    /// mean edge length at the start of a run.
    pub min_edge: Option<f64>,
    pub t_end: f64,
    /// Retry a non-converging implicit step with halved tau (up to 10 times).
    pub retry_halving: bool,
}

impl StepControl {
    pub fn new(tau: f64, t_end: f64) -> StepControl {
        assert!(tau > 0.0, "tau must be positive");
        StepControl {
            tau,
            eps_fp: DEFAULT_EPS_FP,
            relative_eps: false,
            max_fp_iters: DEFAULT_MAX_FP_ITERS,
            min_edge: None,
            t_end,
            retry_halving: false,
        }
    }

    /// The admissibility floor used against polygon `p` when none was set.
    pub fn resolve_min_edge(&self, p: &Polygon) -> f64 {
        match self.min_edge {
            Some(v) => v,
            None => {
                let mean = p.edge_lengths().iter().sum::<f64>() / p.len() as f64;
                MIN_EDGE_FRACTION * mean.abs()
            }
        }
    }

    fn tolerance(&self, heights: &[f64]) -> f64 {
        if self.relative_eps {
            let sup = heights.iter().fold(0.0f64, |m, h| m.max(h.abs()));
            0.5 * self.eps_fp * sup.max(1.0)
        } else {
            0.5 * self.eps_fp
        }
    }
}

/// What one completed step looked like.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub m: usize,
    /// Time at the start of the step.
    pub t: f64,
    /// Actual step size taken (may be shortened or halved).
    pub tau: f64,
    pub heights_after: Vec<f64>,
    /// Fixed-point iterations used; `None` for Euler steps.
    pub fp_iters: Option<usize>,
    pub area_before: f64,
    pub area_after: f64,
    pub perimeter_before: f64,
    pub perimeter_after: f64,
    /// (area_after - area_before) / tau.
    pub discrete_area_speed: f64,
    /// (perimeter_after - perimeter_before) / tau.
    pub discrete_length_speed: f64,
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    ReachedEnd,
    /// An edge of the stepped polygon fell to or below the floor.
    EdgeCollapse { t: f64, min_edge: f64 },
    FpNonConvergence { t: f64 },
    /// The stepped state (or a midpoint iterate) was not a usable polygon.
    InadmissibleState { t: f64 },
    LawFailure { t: f64, message: String },
}

impl Termination {
    pub fn reached_end(&self) -> bool {
        matches!(self, Termination::ReachedEnd)
    }

    pub fn describe(&self) -> String {
        match self {
            Termination::ReachedEnd => "reached t_end".to_string(),
            Termination::EdgeCollapse { t, min_edge } => {
                format!("edge-collapse at t = {t} (min edge {min_edge:.3e})")
            }
            Termination::FpNonConvergence { t } => {
                format!("fixed-point non-convergence at t = {t}")
            }
            Termination::InadmissibleState { t } => format!("inadmissible state at t = {t}"),
            Termination::LawFailure { t, message } => format!("law failure at t = {t}: {message}"),
        }
    }
}

/// A completed (possibly truncated) run: every stored state is admissible.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub fan: Arc<NormalFan>,
    pub initial_heights: Vec<f64>,
    pub records: Vec<StepRecord>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn final_heights(&self) -> &[f64] {
        self.records
            .last()
            .map(|r| r.heights_after.as_slice())
            .unwrap_or(&self.initial_heights)
    }

    pub fn final_polygon(&self) -> Polygon {
        Polygon::new(Arc::clone(&self.fan), self.final_heights().to_vec()).unwrap()
    }

    pub fn final_time(&self) -> f64 {
        self.records.last().map(|r| r.t + r.tau).unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// One explicit Euler step: h + tau * F(polygon, t).
pub fn euler_step(
    p: &Polygon,
    law: &VelocityLaw,
    t: f64,
    tau: f64,
) -> Result<Polygon, StepError> {
    let speeds = law.evaluate(p, t)?;
    let heights = p
        .heights()
        .iter()
        .zip(&speeds)
        .map(|(h, f)| h + tau * f)
        .collect();
    Ok(Polygon::new(Arc::clone(p.fan()), heights).expect("same fan"))
}

/// Per-iteration sup-norm gaps of one implicit step, for contraction studies.
#[derive(Debug, Clone)]
pub struct FixedPointTrace {
    pub gaps: Vec<f64>,
}

/// One implicit midpoint step.
///
/// Iterates `h_bar <- h + (tau/2) F(polygon(h_bar), t + tau/2)` from
/// `h_bar = h` until the sup-norm gap between successive iterates is at most
/// eps/2, then returns `2 h_bar - h`. The iteration count equals the number
/// of law evaluations performed.
pub fn implicit_step(
    p: &Polygon,
    law: &VelocityLaw,
    t: f64,
    tau: f64,
    ctl: &StepControl,
) -> Result<(Polygon, usize), StepError> {
    let (q, iters, _) = implicit_step_inner(p, law, t, tau, ctl, false)?;
    Ok((q, iters))
}

/// Same as [`implicit_step`] but records the gap after every iteration.
pub fn implicit_step_traced(
    p: &Polygon,
    law: &VelocityLaw,
    t: f64,
    tau: f64,
    ctl: &StepControl,
) -> Result<(Polygon, usize, FixedPointTrace), StepError> {
    let (q, iters, trace) = implicit_step_inner(p, law, t, tau, ctl, true)?;
    Ok((q, iters, trace.expect("tracing was requested")))
}

fn implicit_step_inner(
    p: &Polygon,
    law: &VelocityLaw,
    t: f64,
    tau: f64,
    ctl: &StepControl,
    trace: bool,
) -> Result<(Polygon, usize, Option<FixedPointTrace>), StepError> {
    let min_edge = ctl.resolve_min_edge(p);
    let t_mid = t + 0.5 * tau;
    let h0 = p.heights();
    let tol = ctl.tolerance(h0);

    let mut bar = h0.to_vec();
    let mut gaps = if trace { Some(Vec::new()) } else { None };
    let mut gap = f64::INFINITY;
    for iter in 1..=ctl.max_fp_iters {
        let candidate = Polygon::new(Arc::clone(p.fan()), bar.clone()).expect("same fan");
        let min_len = candidate.min_edge_length();
        if !min_len.is_finite() || min_len <= min_edge {
            return Err(StepError::InadmissibleIterate { min_edge: min_len });
        }
        let speeds = law.evaluate(&candidate, t_mid)?;
        gap = 0.0;
        for (j, f) in speeds.iter().enumerate() {
            let next = h0[j] + 0.5 * tau * f;
            gap = gap.max((next - bar[j]).abs());
            bar[j] = next;
        }
        if let Some(g) = gaps.as_mut() {
            g.push(gap);
        }
        if gap <= tol {
            let heights = bar.iter().zip(h0).map(|(b, h)| 2.0 * b - h).collect();
            let new = Polygon::new(Arc::clone(p.fan()), heights).expect("same fan");
            return Ok((new, iter, gaps.map(|g| FixedPointTrace { gaps: g })));
        }
    }
    Err(StepError::FpNonConvergence {
        iters: ctl.max_fp_iters,
        gap,
    })
}

/// Residual of the discrete area-speed identity between two same-fan states:
/// `(area' - area)/tau - sum_j (|G_j| + |G_j'|)/2 * (h_j' - h_j)/tau`.
/// This is an algebraic identity, zero up to rounding for any pair.
pub fn step_area_identity(before: &Polygon, after: &Polygon, tau: f64) -> Result<f64, GeomError> {
    if before.fan() != after.fan() {
        return Err(GeomError::FanMismatch);
    }
    let la = before.edge_lengths();
    let lb = after.edge_lengths();
    let trapezoid: f64 = la
        .iter()
        .zip(&lb)
        .zip(before.heights().iter().zip(after.heights()))
        .map(|((a, b), (ha, hb))| 0.5 * (a + b) * (hb - ha) / tau)
        .sum();
    Ok((after.area() - before.area()) / tau - trapezoid)
}

/// Advances `p0` to `t_end` with uniform steps, recording every step.
///
/// All failures are encoded in the trajectory's termination reason; states
/// that violate admissibility are never stored.
pub fn run(p0: &Polygon, law: &VelocityLaw, scheme: Scheme, ctl: &StepControl) -> Trajectory {
    let min_edge = ctl.resolve_min_edge(p0);
    let ctl = {
        let mut c = ctl.clone();
        c.min_edge = Some(min_edge);
        c
    };
    let ctl = &ctl;
    let mut records = Vec::new();
    let mut current = p0.clone();
    let mut area = current.area();
    let mut perimeter = current.perimeter();
    // Compensated summation keeps the time accumulator within an ulp over
    // hundreds of thousands of steps; naive accumulation drifts enough to
    // spawn a spurious sliver of a final step whose discrete speed divides
    // rounding noise by a near-zero tau.
    let mut t = 0.0f64;
    let mut t_comp = 0.0f64;
    let mut m = 0;

    let termination = loop {
        if t >= ctl.t_end - 1e-12 * ctl.t_end.max(1.0) {
            break Termination::ReachedEnd;
        }
        let tau_full = ctl.tau.min(ctl.t_end - t);
        let mut tau = tau_full;
        let mut halvings = 0;

        let stepped = loop {
            let attempt = match scheme {
                Scheme::Euler => euler_step(&current, law, t, tau).map(|q| (q, None)),
                Scheme::Implicit => {
                    implicit_step(&current, law, t, tau, ctl).map(|(q, it)| (q, Some(it)))
                }
            };
            match attempt {
                Ok(ok) => break Ok(ok),
                Err(StepError::FpNonConvergence { .. })
                    if ctl.retry_halving && halvings < MAX_TAU_HALVINGS =>
                {
                    tau *= 0.5;
                    halvings += 1;
                }
                Err(e) => break Err(e),
            }
        };

        let (next, fp_iters) = match stepped {
            Ok(v) => v,
            Err(StepError::FpNonConvergence { .. }) => break Termination::FpNonConvergence { t },
            Err(StepError::InadmissibleIterate { .. }) => {
                break Termination::InadmissibleState { t }
            }
            Err(StepError::Law(e)) => {
                break Termination::LawFailure {
                    t,
                    message: e.to_string(),
                }
            }
        };

        if !next.heights().iter().all(|h| h.is_finite()) {
            break Termination::InadmissibleState { t };
        }
        let min_len = next.min_edge_length();
        if min_len <= min_edge {
            break Termination::EdgeCollapse {
                t: t + tau,
                min_edge: min_len,
            };
        }

        let area_after = next.area();
        let perimeter_after = next.perimeter();
        records.push(StepRecord {
            m,
            t,
            tau,
            heights_after: next.heights().to_vec(),
            fp_iters,
            area_before: area,
            area_after,
            perimeter_before: perimeter,
            perimeter_after,
            discrete_area_speed: (area_after - area) / tau,
            discrete_length_speed: (perimeter_after - perimeter) / tau,
        });

        current = next;
        area = area_after;
        perimeter = perimeter_after;
        let y = tau - t_comp;
        let t_next = t + y;
        t_comp = (t_next - t) - y;
        t = t_next;
        m += 1;
    };

    Trajectory {
        fan: Arc::clone(p0.fan()),
        initial_heights: p0.heights().to_vec(),
        records,
        termination,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{NormalFan, Vec2};
    use approx::assert_relative_eq;

    fn square(h: f64) -> Polygon {
        let fan = NormalFan::new(&[
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, -1.0),
        ])
        .unwrap();
        Polygon::new(fan, vec![h; 4]).unwrap()
    }

    #[test]
    fn euler_step_on_square_curvature() {
        let p = square(0.5);
        let q = euler_step(&p, &VelocityLaw::curvature(), 0.0, 0.01).unwrap();
        for h in q.heights() {
            assert_relative_eq!(*h, 0.48, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_law_is_identity() {
        let p = square(0.5);
        let law = VelocityLaw::constant_speed(0.0);
        let q = euler_step(&p, &law, 0.0, 0.3).unwrap();
        assert_eq!(q.heights(), p.heights());
        let ctl = StepControl::new(0.3, 1.0);
        let (r, iters) = implicit_step(&p, &law, 0.0, 0.3, &ctl).unwrap();
        assert_eq!(r.heights(), p.heights());
        assert_eq!(iters, 1);
    }

    #[test]
    fn euler_constant_speed_grows_perimeter_exactly() {
        let p = square(0.5);
        let q = euler_step(&p, &VelocityLaw::constant_speed(1.0), 0.0, 0.1).unwrap();
        for h in q.heights() {
            assert_relative_eq!(*h, 0.6, epsilon = 1e-15);
        }
        assert_relative_eq!(q.perimeter() - p.perimeter(), 0.8, epsilon = 1e-13);
    }

    #[test]
    fn implicit_step_square_closed_form() {
        // For equal heights under curvature flow the midpoint equation has
        // the closed-form solution h' = sqrt(h^2 - 2 tau).
        let p = square(0.5);
        let ctl = StepControl::new(0.01, 1.0);
        let (q, iters) = implicit_step(&p, &VelocityLaw::curvature(), 0.0, 0.01, &ctl).unwrap();
        for h in q.heights() {
            assert_relative_eq!(*h, 0.47958315233127197, epsilon = 1e-14);
        }
        assert!(iters < 30);
    }

    #[test]
    fn implicit_equals_euler_for_state_independent_law() {
        let p = square(0.5);
        let law = VelocityLaw::constant_speed(0.7);
        let ctl = StepControl::new(0.2, 1.0);
        let (q, iters) = implicit_step(&p, &law, 0.0, 0.2, &ctl).unwrap();
        let e = euler_step(&p, &law, 0.0, 0.2).unwrap();
        for (a, b) in q.heights().iter().zip(e.heights()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-15);
        }
        // Gap vanishes on the second evaluation because F is constant.
        assert_eq!(iters, 2);
    }

    #[test]
    fn trapezoid_identity_on_squares() {
        let p = square(0.5);
        let q = square(0.6);
        // (1.44 - 1.0) - 4 * 1.1 * 0.1 = 0 exactly.
        let res = step_area_identity(&p, &q, 1.0).unwrap();
        assert!(res.abs() < 1e-14);
        assert!(step_area_identity(&p, &p, 1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn run_reaches_end_with_exact_area_budget() {
        let p = square(0.5);
        let ctl = StepControl::new(1e-3, 0.1);
        let traj = run(&p, &VelocityLaw::curvature(), Scheme::Implicit, &ctl);
        assert!(traj.termination.reached_end());
        assert_eq!(traj.len(), 100);
        // mu_cas = -8, so the area after 0.1 time units is 1 - 0.8.
        assert_relative_eq!(traj.final_polygon().area(), 0.2, epsilon = 1e-10);
    }

    #[test]
    fn run_detects_square_extinction() {
        let p = square(0.5);
        let ctl = StepControl::new(1e-4, 0.2);
        let traj = run(&p, &VelocityLaw::curvature(), Scheme::Implicit, &ctl);
        assert!(!traj.termination.reached_end());
        // h(t) = sqrt(0.25 - 2t) hits zero at t = 0.125.
        let t_stop = traj.final_time();
        assert!(
            (t_stop - 0.125).abs() < 2e-3,
            "stopped at {t_stop}, expected near 0.125 ({:?})",
            traj.termination
        );
    }

    #[test]
    fn partial_final_step_lands_on_t_end() {
        let p = square(0.5);
        let ctl = StepControl::new(3e-3, 0.01); // 0.01 / 0.003 is not integral
        let traj = run(&p, &VelocityLaw::curvature(), Scheme::Implicit, &ctl);
        assert!(traj.termination.reached_end());
        assert_relative_eq!(traj.final_time(), 0.01, epsilon = 1e-12);
        assert_eq!(traj.len(), 4);
        assert!(traj.records[3].tau < 3e-3);
    }

    #[test]
    fn nonconvergence_reported_and_halving_recovers() {
        // A huge step makes the curvature iteration diverge on a small square.
        let p = square(0.05);
        let mut ctl = StepControl::new(0.5, 0.5);
        ctl.max_fp_iters = 50;
        let traj = run(&p, &VelocityLaw::curvature(), Scheme::Implicit, &ctl);
        assert!(matches!(
            traj.termination,
            Termination::FpNonConvergence { .. } | Termination::InadmissibleState { .. }
        ));
    }

    fn regular(n: usize, h: f64) -> Polygon {
        let dirs: Vec<Vec2> = (0..n)
            .map(|j| {
                let th = std::f64::consts::TAU * j as f64 / n as f64;
                Vec2::new(th.cos(), th.sin())
            })
            .collect();
        Polygon::new(NormalFan::new(&dirs).unwrap(), vec![h; n]).unwrap()
    }

    #[test]
    fn regular_polygons_stay_symmetric() {
        let ctl = StepControl::new(1e-3, 0.05);
        for p in [square(0.5), regular(7, 0.5)] {
            for scheme in [Scheme::Euler, Scheme::Implicit] {
                let traj = run(&p, &VelocityLaw::curvature(), scheme, &ctl);
                assert!(traj.termination.reached_end());
                for rec in &traj.records {
                    let h0 = rec.heights_after[0];
                    for h in &rec.heights_after {
                        assert!((h - h0).abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn both_schemes_inherit_length_budgets() {
        // CLS laws: perimeter changes by exactly mu * tau per step under
        // either scheme; CS laws never lengthen the curve.
        let p = Polygon::new(square(0.5).fan().clone(), vec![0.55, 0.48, 0.52, 0.61]).unwrap();
        let lp = VelocityLaw::length_preserving_curvature();
        for scheme in [Scheme::Euler, Scheme::Implicit] {
            let traj = run(&p, &lp, scheme, &StepControl::new(1e-3, 0.05));
            assert!(traj.termination.reached_end());
            for rec in &traj.records {
                let change = rec.perimeter_after - rec.perimeter_before;
                assert!(
                    change.abs() <= 1e-12 * rec.perimeter_before,
                    "{scheme:?}: perimeter drifted by {change:e}"
                );
            }
        }
        for law in [
            VelocityLaw::curvature(),
            VelocityLaw::area_preserving_curvature(),
        ] {
            for scheme in [Scheme::Euler, Scheme::Implicit] {
                let traj = run(&p, &law, scheme, &StepControl::new(1e-3, 0.05));
                assert!(traj.termination.reached_end());
                for rec in &traj.records {
                    assert!(
                        rec.perimeter_after <= rec.perimeter_before + 1e-12,
                        "{scheme:?} {}: perimeter grew",
                        law.id()
                    );
                }
            }
        }
    }

    #[test]
    fn traced_step_shows_contracting_gaps() {
        let p = square(0.5);
        let ctl = StepControl::new(1e-3, 1.0);
        let (_, _, trace) =
            implicit_step_traced(&p, &VelocityLaw::curvature(), 0.0, 1e-3, &ctl).unwrap();
        assert!(trace.gaps.len() >= 2);
        for w in trace.gaps.windows(2) {
            assert!(w[1] < w[0], "gaps should decrease: {:?}", trace.gaps);
        }
    }
}
