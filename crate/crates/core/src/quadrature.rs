//! Gauss-Legendre rules, tensor products over boxes, and the dyadically
//! refined time rule used for Duhamel integrals with stiff integrands.

/// One-dimensional Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on the Legendre recurrence.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Tricomi initial guess, then Newton.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Axis-aligned box given by per-axis intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3 {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Box3 {
    pub fn cube(center: [f64; 3], half_side: f64) -> Self {
        Box3 {
            lo: [
                center[0] - half_side,
                center[1] - half_side,
                center[2] - half_side,
            ],
            hi: [
                center[0] + half_side,
                center[1] + half_side,
                center[2] + half_side,
            ],
        }
    }

    pub fn intersect(&self, other: &Box3) -> Option<Box3> {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for a in 0..3 {
            lo[a] = self.lo[a].max(other.lo[a]);
            hi[a] = self.hi[a].min(other.hi[a]);
            if lo[a] >= hi[a] {
                return None;
            }
        }
        Some(Box3 { lo, hi })
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|a| self.hi[a] - self.lo[a]).product()
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|a| p[a] >= self.lo[a] && p[a] <= self.hi[a])
    }
}

/// Tensor Gauss-Legendre nodes over a box, with optional per-axis panel
/// subdivision. Node order is deterministic (panel-major, then lexicographic
/// in the axis indices) so repeated runs sum in the same order.
pub fn tensor_nodes(bx: &Box3, rule: &GaussLegendre, panels: usize) -> Vec<([f64; 3], f64)> {
    let panels = panels.max(1);
    let mut axis_nodes: [Vec<(f64, f64)>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for a in 0..3 {
        let step = (bx.hi[a] - bx.lo[a]) / panels as f64;
        for p in 0..panels {
            let a0 = bx.lo[a] + p as f64 * step;
            axis_nodes[a].extend(rule.mapped(a0, a0 + step));
        }
    }
    let mut out = Vec::with_capacity(axis_nodes[0].len().pow(3));
    for &(x0, w0) in &axis_nodes[0] {
        for &(x1, w1) in &axis_nodes[1] {
            for &(x2, w2) in &axis_nodes[2] {
                out.push(([x0, x1, x2], w0 * w1 * w2));
            }
        }
    }
    out
}

/// Quadrature nodes for `int_0^t f(tau) dtau` where `f` decays like
/// `exp(-rate * tau)`. Panels are refined dyadically toward tau = 0 until the
/// innermost panel resolves the decay, with a Gauss rule per panel.
pub fn decaying_time_nodes(t: f64, rate: f64, order: usize) -> Vec<(f64, f64)> {
    assert!(t > 0.0);
    let rule = GaussLegendre::new(order);
    let levels = if rate * t <= 4.0 {
        0
    } else {
        ((rate * t / 4.0).log2().ceil() as usize).min(60)
    };
    let mut nodes = Vec::with_capacity((levels + 1) * order);
    let mut hi = t;
    for _ in 0..levels {
        let lo = hi / 2.0;
        nodes.extend(rule.mapped(lo, hi));
        hi = lo;
    }
    nodes.extend(rule.mapped(0.0, hi));
    // Ascending order keeps downstream sums deterministic and readable.
    nodes.reverse();
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_integrates_polynomials_exactly() {
        // Order-n Gauss is exact through degree 2n-1.
        for order in [2usize, 4, 8, 12] {
            let rule = GaussLegendre::new(order);
            let deg = 2 * order - 1;
            let exact = (1.0f64 - (-1.0f64).powi(deg as i32 + 1)) / (deg as f64 + 1.0);
            let got = rule.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
            assert_abs_diff_eq!(got, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn gauss_weights_sum_to_interval_length() {
        let rule = GaussLegendre::new(8);
        let total: f64 = rule.mapped(0.25, 1.75).map(|(_, w)| w).sum();
        assert_abs_diff_eq!(total, 1.5, epsilon = 1e-14);
    }

    #[test]
    fn tensor_nodes_integrate_separable_cubic() {
        let bx = Box3 {
            lo: [0.0, -1.0, 2.0],
            hi: [1.0, 1.0, 3.0],
        };
        let rule = GaussLegendre::new(4);
        let got: f64 = tensor_nodes(&bx, &rule, 2)
            .iter()
            .map(|(p, w)| w * p[0] * p[0] * p[2])
            .sum();
        // int x^2 dx over [0,1] * int dy over [-1,1] * int z dz over [2,3]
        assert_abs_diff_eq!(got, (1.0 / 3.0) * 2.0 * 2.5, epsilon = 1e-12);
    }

    #[test]
    fn box_intersection() {
        let a = Box3::cube([0.0, 4.0, 0.0], 1.0);
        let b = Box3::cube([0.3, 4.5, 0.0], 1.0);
        let c = a.intersect(&b).unwrap();
        assert_abs_diff_eq!(c.lo[1], 3.5);
        assert_abs_diff_eq!(c.hi[1], 5.0);
        assert!(a.intersect(&Box3::cube([3.0, 4.0, 0.0], 1.0)).is_none());
    }

    #[test]
    fn decaying_rule_matches_closed_form() {
        // int_0^t exp(-rate tau) dtau with a violently stiff rate.
        let t = 2.0f64.powi(-10);
        let rate = 2.0f64.powi(17);
        let exact = (1.0 - (-rate * t).exp()) / rate;
        let got: f64 = decaying_time_nodes(t, rate, 6)
            .iter()
            .map(|(tau, w)| w * (-rate * tau).exp())
            .sum();
        assert!((got - exact).abs() / exact < 1e-7);
        let refined: f64 = decaying_time_nodes(t, rate, 10)
            .iter()
            .map(|(tau, w)| w * (-rate * tau).exp())
            .sum();
        assert!((refined - exact).abs() / exact < 1e-12);
    }
}
