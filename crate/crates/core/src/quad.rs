//! Gauss-Legendre quadrature on [-1, 1] for edge integrals.

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre recurrence; accurate to
/// machine precision for the orders used here (<= a few hundred).
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> GaussLegendre {
        assert!(order >= 1, "quadrature order must be at least 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Roots come in +/- pairs; solve the upper half and mirror.
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integral of `f` over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        half
            * self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(x, w)| w * f(mid + half * x))
                .sum::<f64>()
    }
}

/// (P_n(x), P_n'(x)) via the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn order_five_nodes_match_reference() {
        let rule = GaussLegendre::new(5);
        // Classic tabulated values for n = 5.
        let expect = [
            -0.906179845938664,
            -0.5384693101056831,
            0.0,
            0.5384693101056831,
            0.906179845938664,
        ];
        let expect_w = [
            0.23692688505618908,
            0.47862867049936647,
            0.5688888888888889,
            0.47862867049936647,
            0.23692688505618908,
        ];
        for i in 0..5 {
            assert_relative_eq!(rule.nodes[i], expect[i], epsilon = 1e-14);
            assert_relative_eq!(rule.weights[i], expect_w[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn polynomial_exactness() {
        // n-point rule is exact for degree 2n-1.
        for n in [1usize, 2, 3, 8, 32] {
            let rule = GaussLegendre::new(n);
            for k in 0..(2 * n) {
                let exact = if k % 2 == 0 {
                    2.0 / (k as f64 + 1.0)
                } else {
                    0.0
                };
                let got = rule.integrate(-1.0, 1.0, |x| x.powi(k as i32));
                assert_relative_eq!(got, exact, epsilon = 1e-13, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn smooth_integral() {
        let rule = GaussLegendre::new(32);
        let got = rule.integrate(0.0, 1.0, |x| (-x).exp());
        assert_relative_eq!(got, 1.0 - (-1.0f64).exp(), epsilon = 1e-15);
    }
}
