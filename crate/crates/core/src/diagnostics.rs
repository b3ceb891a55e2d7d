//! Post-processing of trajectories: conservation error, reference-solution
//! error, and empirical convergence order under step halving.

use thiserror::Error;

use crate::geom::Polygon;
use crate::integrate::{run, Scheme, StepControl, Trajectory};
use crate::law::VelocityLaw;

#[derive(Debug, Error, PartialEq)]
pub enum DiagError {
    #[error("law declares neither a constant area speed nor a constant length speed")]
    NoConservationDeclared,
    #[error("reference trajectory has no state at t = {t}")]
    TimeGridMismatch { t: f64 },
    #[error("tau values must halve: {prev} -> {next}")]
    BadTauSequence { prev: f64, next: f64 },
    #[error("trajectory is empty")]
    EmptyTrajectory,
}

/// Per-step discrete speeds and their worst deviation from the declared
/// constants. `delta_*` is `max_m |mu - mu^m|` over completed steps.
#[derive(Debug, Clone)]
pub struct ConservationReport {
    pub declared_cas: Option<f64>,
    pub declared_cls: Option<f64>,
    pub area_speeds: Vec<f64>,
    pub length_speeds: Vec<f64>,
    pub delta_cas: Option<f64>,
    pub delta_cls: Option<f64>,
}

/// Builds the conservation report from stored step records alone; geometry
/// is not recomputed.
pub fn conservation_report(
    traj: &Trajectory,
    law: &VelocityLaw,
) -> Result<ConservationReport, DiagError> {
    if traj.records.is_empty() {
        return Err(DiagError::EmptyTrajectory);
    }
    let declared = law.conservation(&traj.fan);
    if declared.cas.is_none() && declared.cls.is_none() {
        return Err(DiagError::NoConservationDeclared);
    }
    let area_speeds: Vec<f64> = traj.records.iter().map(|r| r.discrete_area_speed).collect();
    let length_speeds: Vec<f64> = traj
        .records
        .iter()
        .map(|r| r.discrete_length_speed)
        .collect();
    let delta_of = |mu: f64, speeds: &[f64]| {
        speeds
            .iter()
            .map(|s| (mu - s).abs())
            .fold(0.0f64, f64::max)
    };
    Ok(ConservationReport {
        declared_cas: declared.cas,
        declared_cls: declared.cls,
        delta_cas: declared.cas.map(|mu| delta_of(mu, &area_speeds)),
        delta_cls: declared.cls.map(|mu| delta_of(mu, &length_speeds)),
        area_speeds,
        length_speeds,
    })
}

/// A reference solution the error of a run can be measured against.
///
/// The two closed forms follow from the curvature-flow heights equation on
/// the square fan. With equal heights h, every edge has length 2h and
/// curvature 1/h, so dh/dt = -1/h and h(t) = sqrt(h0^2 - 2t). With heights
/// (a, b, a, b) the horizontal edges have length 2b and the vertical ones
/// 2a, so da/dt = -1/b and db/dt = -1/a; then d(a/b)/dt = 0 and
/// d(ab)/dt = -2, giving a(t) = sqrt((a0/b0)(a0 b0 - 2t)) and symmetrically
/// for b(t). Both are cross-validated against fine-step implicit runs in
/// the test suite before serving as oracles.
#[derive(Debug, Clone)]
pub enum Reference<'a> {
    /// Equal heights h0 under curvature flow: h(t) = sqrt(h0^2 - 2t)
    /// componentwise (any fan whose symmetric motion stays symmetric; exact
    /// for the axis-aligned square).
    ShrinkingSquare { h0: f64 },
    /// Heights (a0, b0, a0, b0) on the axis-aligned square fan under
    /// curvature flow: the aspect ratio a/b is invariant and the product
    /// obeys d(ab)/dt = -2.
    ShrinkingRectangle { a0: f64, b0: f64 },
    /// A finer-step trajectory whose time grid contains this one's.
    FineTrajectory(&'a Trajectory),
}

impl Reference<'_> {
    /// Short descriptor for reports.
    pub fn describe(&self) -> String {
        match self {
            Reference::ShrinkingSquare { h0 } => format!("closed-form square (h0 = {h0})"),
            Reference::ShrinkingRectangle { a0, b0 } => {
                format!("closed-form rectangle (a0 = {a0}, b0 = {b0})")
            }
            Reference::FineTrajectory(fine) => {
                let tau = fine.records.first().map(|r| r.tau).unwrap_or(f64::NAN);
                format!("fine-step run (tau = {tau:e})")
            }
        }
    }

    /// Heights at time `t`, or `None` when this reference cannot produce them.
    fn heights_at(&self, t: f64, n: usize) -> Result<Vec<f64>, DiagError> {
        match self {
            Reference::ShrinkingSquare { h0 } => {
                let v = (h0 * h0 - 2.0 * t).max(0.0).sqrt();
                Ok(vec![v; n])
            }
            Reference::ShrinkingRectangle { a0, b0 } => {
                let product = a0 * b0 - 2.0 * t;
                let ratio = a0 / b0;
                let a = (ratio * product).max(0.0).sqrt();
                let b = (product / ratio).max(0.0).sqrt();
                Ok(vec![a, b, a, b])
            }
            Reference::FineTrajectory(fine) => {
                let tol = 1e-9 * t.abs().max(1.0);
                if t.abs() <= tol {
                    return Ok(fine.initial_heights.clone());
                }
                fine.records
                    .iter()
                    .find(|r| ((r.t + r.tau) - t).abs() <= tol)
                    .map(|r| r.heights_after.clone())
                    .ok_or(DiagError::TimeGridMismatch { t })
            }
        }
    }
}

/// Max over recorded steps of the sup-norm height error against a reference.
pub fn error_vs_reference(traj: &Trajectory, reference: &Reference) -> Result<f64, DiagError> {
    let n = traj.initial_heights.len();
    let mut worst = 0.0f64;
    for rec in &traj.records {
        let t = rec.t + rec.tau;
        let expected = reference.heights_at(t, n)?;
        let err = rec
            .heights_after
            .iter()
            .zip(&expected)
            .map(|(h, e)| (h - e).abs())
            .fold(0.0f64, f64::max);
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Outcome of one member of a step-halving study.
#[derive(Debug, Clone)]
pub enum SweepEntry {
    Completed { tau: f64, error: f64 },
    Failed { tau: f64, reason: String },
}

/// Errors against a reference for a halving sequence of step sizes, with
/// pairwise fitted orders p = log2(e(tau) / e(tau/2)).
#[derive(Debug, Clone)]
pub struct OrderEstimate {
    pub entries: Vec<SweepEntry>,
    pub orders: Vec<f64>,
    pub summary: OrderSummary,
    /// What the errors were measured against.
    pub reference: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrderSummary {
    /// Mean of the last two pairwise orders.
    Order(f64),
    /// All errors were at rounding level; a fitted order would be noise.
    Exact,
    /// Too few completed runs to fit anything.
    Insufficient,
}

/// Error floor under which a run is considered exact for order fitting.
fn rounding_floor(p0: &Polygon) -> f64 {
    let scale = p0
        .heights()
        .iter()
        .fold(1.0f64, |m, h| m.max(h.abs()));
    1e-12 * scale
}

/// Runs the sweep and fits pairwise orders. `taus` must strictly halve.
pub fn convergence_order(
    p0: &Polygon,
    law: &VelocityLaw,
    scheme: Scheme,
    taus: &[f64],
    t_end: f64,
    reference: &Reference,
) -> Result<OrderEstimate, DiagError> {
    for w in taus.windows(2) {
        if (w[1] - 0.5 * w[0]).abs() > 1e-12 * w[0] {
            return Err(DiagError::BadTauSequence {
                prev: w[0],
                next: w[1],
            });
        }
    }
    // Sweep members are independent simulations; run them concurrently.
    let trajectories: Vec<Trajectory> = std::thread::scope(|scope| {
        let handles: Vec<_> = taus
            .iter()
            .map(|&tau| {
                scope.spawn(move || {
                    let ctl = StepControl::new(tau, t_end);
                    run(p0, law, scheme, &ctl)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut entries = Vec::with_capacity(taus.len());
    for (&tau, traj) in taus.iter().zip(&trajectories) {
        if traj.termination.reached_end() {
            let error = error_vs_reference(traj, reference)?;
            entries.push(SweepEntry::Completed { tau, error });
        } else {
            entries.push(SweepEntry::Failed {
                tau,
                reason: traj.termination.describe(),
            });
        }
    }

    let completed: Vec<(f64, f64)> = entries
        .iter()
        .filter_map(|e| match e {
            SweepEntry::Completed { tau, error } => Some((*tau, *error)),
            SweepEntry::Failed { .. } => None,
        })
        .collect();

    let floor = rounding_floor(p0);
    let summary = if !completed.is_empty() && completed.iter().all(|(_, e)| *e <= floor) {
        OrderSummary::Exact
    } else if completed.len() < 2 {
        OrderSummary::Insufficient
    } else {
        OrderSummary::Order(f64::NAN) // replaced below once orders exist
    };

    let mut orders = Vec::new();
    if matches!(summary, OrderSummary::Order(_)) {
        for w in completed.windows(2) {
            let (tau_a, e_a) = w[0];
            let (tau_b, e_b) = w[1];
            if (tau_b - 0.5 * tau_a).abs() <= 1e-12 * tau_a && e_a > 0.0 && e_b > 0.0 {
                orders.push((e_a / e_b).log2());
            }
        }
    }
    let summary = match summary {
        OrderSummary::Order(_) => {
            if orders.is_empty() {
                OrderSummary::Insufficient
            } else {
                let tail = &orders[orders.len().saturating_sub(2)..];
                OrderSummary::Order(tail.iter().sum::<f64>() / tail.len() as f64)
            }
        }
        other => other,
    };

    Ok(OrderEstimate {
        entries,
        orders,
        summary,
        reference: reference.describe(),
    })
}
