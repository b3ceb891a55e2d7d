//! Seeded random fans and admissible polygons, used heavily by the test
//! suites and handy for quick experiments.
//!
//! Admissibility is guaranteed by construction: starting from an admissible
//! base polygon, height perturbations are capped at min_edge / (2 C*), so no
//! edge can lose more than half its length.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geom::{NormalFan, Polygon, Vec2};

/// A random convex fan with N normals: counterclockwise angle gaps drawn
/// from [0.51, 1.0] and rescaled to sum to 2 pi, which keeps every gap
/// strictly inside (0, pi).
pub fn random_convex_fan(n: usize, rng: &mut ChaCha8Rng) -> Arc<NormalFan> {
    assert!(n >= 3);
    let gaps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.51..=1.0)).collect();
    let total: f64 = gaps.iter().sum();
    let mut angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut dirs = Vec::with_capacity(n);
    for g in &gaps {
        dirs.push(Vec2::new(angle.cos(), angle.sin()));
        angle += g / total * std::f64::consts::TAU;
    }
    NormalFan::new(&dirs).expect("constructed gaps are valid")
}

/// A random nonconvex polygon shaped like a k-fold star with flat tips
/// (3k edges), with the between-petal turn negative. Returned heights sit in
/// the middle of the admissible band for the sampled tip half-angle.
pub fn random_star_polygon(k: usize, rng: &mut ChaCha8Rng) -> Polygon {
    assert!(k >= 3);
    let sector = std::f64::consts::TAU / k as f64;
    // psi in (sector/2, sector) makes the between-petal turn negative; the
    // clamp keeps psi below pi/2 so the admissible height band is nonempty.
    let psi = rng.gen_range(0.55 * sector..0.95 * sector).min(1.4);
    let mut dirs = Vec::with_capacity(3 * k);
    for i in 0..k {
        let center = i as f64 * sector;
        for offset in [-psi, 0.0, psi] {
            let a = center + offset;
            dirs.push(Vec2::new(a.cos(), a.sin()));
        }
    }
    let fan = NormalFan::new(&dirs).expect("star pattern is a valid fan");

    // Tip edges at height 1; flank edges at a height strictly between the
    // bounds where either edge class degenerates.
    let phi0 = sector - 2.0 * psi;
    let lower = psi.cos();
    let upper = (1.0 / psi.sin()) / (1.0 / psi.tan() - (phi0 / 2.0).tan());
    debug_assert!(lower < upper);
    let h1 = rng.gen_range(lower + 0.2 * (upper - lower)..lower + 0.8 * (upper - lower));
    let heights: Vec<f64> = (0..3 * k)
        .map(|j| if j % 3 == 1 { 1.0 } else { h1 })
        .collect();
    let p = Polygon::new(fan, heights).expect("length matches");
    debug_assert!(p.min_edge_length() > 0.0);
    p
}

/// Randomly perturbs the heights of an admissible polygon while provably
/// keeping it admissible: the perturbation never exceeds min_edge / (2 C*).
pub fn perturb_admissible(base: &Polygon, rng: &mut ChaCha8Rng) -> Polygon {
    let min_edge = base.min_edge_length();
    assert!(min_edge > 0.0, "base polygon must be admissible");
    let delta = min_edge / (2.0 * base.fan().c_star());
    let heights = base
        .heights()
        .iter()
        .map(|h| h + rng.gen_range(-delta..=delta))
        .collect();
    Polygon::new(Arc::clone(base.fan()), heights).expect("length matches")
}

/// A seeded stream of admissible polygons of varying size and convexity.
pub fn polygon_stream(seed: u64) -> impl Iterator<Item = Polygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::from_fn(move || {
        let base = if rng.gen_bool(0.7) {
            let n = rng.gen_range(3..=64);
            let fan = random_convex_fan(n, &mut rng);
            Polygon::new(fan, vec![1.0; n]).expect("length matches")
        } else {
            let k = rng.gen_range(3..=21);
            random_star_polygon(k, &mut rng)
        };
        Some(perturb_admissible(&base, &mut rng))
    })
}
