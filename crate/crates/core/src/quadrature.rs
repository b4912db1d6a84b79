//! One-dimensional Gauss rules from the Golub-Welsch eigenproblem.
//!
//! Nodes are polished by Newton steps on the orthonormal recurrence and the
//! weights come from the Christoffel function, which keeps tiny Hermite
//! weights accurate in the relative sense.

use nalgebra::DMatrix;

/// Nodes and weights of an `n`-point Gauss rule.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Orthonormal family with `x p_k = b_{k+1} p_{k+1} + b_k p_{k-1}` (zero diagonal).
struct Family {
    p0: f64,
    b: fn(usize) -> f64,
}

impl Family {
    /// Returns (p_{n-1}(x), p_n(x), p_n'(x), sum_{k<n} p_k(x)^2).
    fn eval(&self, n: usize, x: f64) -> (f64, f64, f64, f64) {
        let (mut p_prev, mut p) = (0.0, self.p0);
        let (mut d_prev, mut d) = (0.0, 0.0);
        let mut christoffel = 0.0;
        for k in 0..n {
            christoffel += p * p;
            let b_next = (self.b)(k + 1);
            let b_k = if k == 0 { 0.0 } else { (self.b)(k) };
            let p_next = (x * p - b_k * p_prev) / b_next;
            let d_next = (p + x * d - b_k * d_prev) / b_next;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
        }
        (p_prev, p, d, christoffel)
    }

    fn rule(&self, n: usize) -> GaussRule {
        assert!(n > 0, "a Gauss rule needs at least one node");
        let jacobi = DMatrix::from_fn(n, n, |i, j| {
            if i + 1 == j {
                (self.b)(j)
            } else if j + 1 == i {
                (self.b)(i)
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        let mut weights = Vec::with_capacity(n);
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (_, p, d, _) = self.eval(n, *x);
                if d != 0.0 && d.is_finite() {
                    *x -= p / d;
                }
            }
            let (_, _, _, c) = self.eval(n, *x);
            weights.push(1.0 / c);
        }
        GaussRule { nodes, weights }
    }
}

/// Gauss-Legendre on [-1, 1], weight 1.
pub fn gauss_legendre(n: usize) -> GaussRule {
    Family {
        p0: std::f64::consts::FRAC_1_SQRT_2,
        b: |k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        },
    }
    .rule(n)
}

/// Gauss-Hermite for the weight `exp(-x^2)` on the real line.
pub fn gauss_hermite(n: usize) -> GaussRule {
    Family {
        p0: std::f64::consts::PI.powf(-0.25),
        b: |k| (k as f64 / 2.0).sqrt(),
    }
    .rule(n)
}

/// Rule for `E f(Z)` with `Z ~ N(0, 1)`: nodes scaled by sqrt(2), weights by 1/sqrt(pi).
pub fn standard_normal_rule(n: usize) -> GaussRule {
    let gh = gauss_hermite(n);
    let s = std::f64::consts::PI.sqrt();
    GaussRule {
        nodes: gh
            .nodes
            .iter()
            .map(|x| x * std::f64::consts::SQRT_2)
            .collect(),
        weights: gh.weights.iter().map(|w| w / s).collect(),
    }
}
