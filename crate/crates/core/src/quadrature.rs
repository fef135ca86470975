//! Gauss–Legendre rules and geometrically graded composite rules on [0, 1].

use std::f64::consts::PI;

/// An `order`-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on P_n from the Chebyshev guess.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A node in (0, 1) with its complement `1 - value` kept to full relative
/// precision, so tail transforms like `-ln(1 - u)` stay accurate near 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitNode {
    pub value: f64,
    pub complement: f64,
    pub weight: f64,
}

/// Composite rule on [0, 1] whose panels halve in width toward both
/// endpoints: breakpoints `0, 2^-depth, ..., 1/4, 1/2` mirrored about 1/2.
/// `2 * depth` panels of `rule.nodes.len()` points each.
pub fn graded_unit_nodes(rule: &GaussLegendre, depth: usize) -> Vec<UnitNode> {
    assert!(depth >= 1);
    let mut lower = Vec::with_capacity(depth * rule.nodes.len());
    let mut a = 0.0;
    for level in (1..=depth).rev() {
        let b = 0.5f64.powi(level as i32);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let value = mid + half * x;
            lower.push(UnitNode {
                value,
                complement: 1.0 - value,
                weight: w * half,
            });
        }
        a = b;
    }
    let upper: Vec<UnitNode> = lower
        .iter()
        .rev()
        .map(|n| UnitNode {
            value: n.complement,
            complement: n.value,
            weight: n.weight,
        })
        .collect();
    lower.extend(upper);
    lower
}
