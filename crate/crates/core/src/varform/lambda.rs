use serde::{Deserialize, Serialize};

use crate::disorder::{sample_fields, FieldDistribution};
use crate::error::{Error, Result};
use crate::linalg::{add3, dot3, norm3, Vec3};
use crate::quadrature::{gauss_legendre, standard_normal_rule, GaussRule};

pub type Mat3 = [[f64; 3]; 3];

/// A smooth convex function of the field with a known conjugate on the unit sphere.
pub trait ConvexPotential: Sync {
    fn value(&self, h: Vec3) -> f64;
    fn gradient(&self, h: Vec3) -> Vec3;
    fn hessian(&self, h: Vec3) -> Mat3;
    /// Conjugate at a unit vector `u`, the limit of `<u,h> - f(h)` along `h = t u`.
    fn conjugate_on_sphere(&self, u: Vec3) -> f64;
    /// Field where the conjugate's Newton iteration starts for `m = 0`.
    fn centre(&self) -> Vec3;
}

/// `log 2 cosh r` without overflow.
pub fn log2cosh(r: f64) -> f64 {
    let a = r.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// `log cosh r`
fn logcosh(r: f64) -> f64 {
    log2cosh(r) - std::f64::consts::LN_2
}

fn sech2(r: f64) -> f64 {
    let e = (-2.0 * r.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// `tanh(r) / r`, continuous at 0.
fn tanh_over(r: f64) -> f64 {
    if r < 1e-4 {
        1.0 - r * r / 3.0 + 2.0 * r.powi(4) / 15.0
    } else {
        r.tanh() / r
    }
}

/// Gradient and Hessian of `x -> log 2 cosh |x|`.
fn site_derivatives(x: Vec3) -> (Vec3, Mat3) {
    let r = norm3(x);
    let t = tanh_over(r);
    let grad = x.map(|c| c * t);
    let radial = if r > 0.0 { sech2(r) } else { 1.0 };
    let mut hess = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let proj = if r > 0.0 { x[i] * x[j] / (r * r) } else { 0.0 };
            let id = if i == j { 1.0 } else { 0.0 };
            hess[i][j] = radial * proj + t * (id - proj);
        }
    }
    (grad, hess)
}

/// How the expectation over `b` is evaluated.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaMethod {
    /// Exact rule for the distribution kind.
    #[default]
    Auto,
    /// `log 2 cosh |h + v|` for a point mass at `v`.
    ClosedForm,
    /// Finite sum over atoms.
    AtomSum,
    /// Tensor Gauss-Hermite rule for Gaussian fields.
    GaussHermite { order: usize },
    /// Tensor Gauss-Legendre rule for box-uniform fields.
    GaussLegendre { order: usize },
    /// Average over `count` sampled fields.
    SampleAverage { count: usize, seed: u64 },
}

pub const DEFAULT_QUADRATURE_ORDER: usize = 40;

/// Weighted nodes `(b_i, w_i)` approximating the law of `b`.
fn nodes_for(dist: &FieldDistribution, method: &LambdaMethod) -> Result<(LambdaMethod, Vec<(Vec3, f64)>)> {
    dist.validate()?;
    let mismatch = || {
        Err(Error::invalid(format!(
            "method {method:?} does not apply to this distribution"
        )))
    };
    let tensor = |rules: [GaussRule; 3], shift: Vec3, scale: Vec3| {
        let mut out = Vec::new();
        for (x, wx) in rules[0].nodes.iter().zip(&rules[0].weights) {
            for (y, wy) in rules[1].nodes.iter().zip(&rules[1].weights) {
                for (z, wz) in rules[2].nodes.iter().zip(&rules[2].weights) {
                    let b = [
                        shift[0] + scale[0] * x,
                        shift[1] + scale[1] * y,
                        shift[2] + scale[2] * z,
                    ];
                    out.push((b, wx * wy * wz));
                }
            }
        }
        out
    };
    let point = || GaussRule {
        nodes: vec![0.0],
        weights: vec![1.0],
    };
    let resolved = match (method, dist) {
        (LambdaMethod::Auto, FieldDistribution::PointMass { .. }) => LambdaMethod::ClosedForm,
        (LambdaMethod::Auto, FieldDistribution::Gaussian { .. }) => LambdaMethod::GaussHermite {
            order: DEFAULT_QUADRATURE_ORDER,
        },
        (LambdaMethod::Auto, FieldDistribution::UniformBox { .. }) => LambdaMethod::GaussLegendre {
            order: DEFAULT_QUADRATURE_ORDER,
        },
        (LambdaMethod::Auto, _) => LambdaMethod::AtomSum,
        (m, _) => m.clone(),
    };
    let nodes = match (&resolved, dist) {
        (LambdaMethod::ClosedForm, FieldDistribution::PointMass { v }) => vec![(*v, 1.0)],
        (LambdaMethod::ClosedForm, _) => return mismatch(),
        (LambdaMethod::AtomSum, d) => match d.atoms() {
            Some(a) => a,
            None => return mismatch(),
        },
        (LambdaMethod::GaussHermite { order }, FieldDistribution::Gaussian { mean, sigma }) => {
            if *order == 0 {
                return Err(Error::invalid("quadrature order must be positive"));
            }
            let rule = if *sigma > 0.0 { standard_normal_rule(*order) } else { point() };
            tensor([rule.clone(), rule.clone(), rule], *mean, [*sigma; 3])
        }
        (LambdaMethod::GaussLegendre { order }, FieldDistribution::UniformBox { lo, hi }) => {
            if *order == 0 {
                return Err(Error::invalid("quadrature order must be positive"));
            }
            let rules = [0, 1, 2].map(|i| {
                if hi[i] > lo[i] {
                    let r = gauss_legendre(*order);
                    GaussRule {
                        nodes: r.nodes,
                        weights: r.weights.iter().map(|w| w / 2.0).collect(),
                    }
                } else {
                    point()
                }
            });
            let centre = [0, 1, 2].map(|i| 0.5 * (lo[i] + hi[i]));
            let half = [0, 1, 2].map(|i| 0.5 * (hi[i] - lo[i]));
            tensor(rules, centre, half)
        }
        (LambdaMethod::SampleAverage { count, seed }, d) => {
            if *count < 2 {
                return Err(Error::invalid("sample average needs at least two samples"));
            }
            let r = sample_fields(d, *count, *seed)?;
            let w = 1.0 / *count as f64;
            r.fields.into_iter().map(|b| (b, w)).collect()
        }
        _ => return mismatch(),
    };
    Ok((resolved, nodes))
}

/// `Lambda(h) = E log 2 cosh |h + b|` and its derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaEvaluator {
    pub distribution: FieldDistribution,
    pub method: LambdaMethod,
    nodes: Vec<(Vec3, f64)>,
}

impl LambdaEvaluator {
    pub fn new(distribution: &FieldDistribution, method: LambdaMethod) -> Result<Self> {
        let (method, nodes) = nodes_for(distribution, &method)?;
        Ok(LambdaEvaluator {
            distribution: distribution.clone(),
            method,
            nodes,
        })
    }

    pub fn auto(distribution: &FieldDistribution) -> Result<Self> {
        Self::new(distribution, LambdaMethod::Auto)
    }

    pub fn nodes(&self) -> &[(Vec3, f64)] {
        &self.nodes
    }

    /// Mean of `b` under the evaluator's nodes.
    pub fn node_mean(&self) -> Vec3 {
        self.nodes
            .iter()
            .fold([0.0; 3], |acc, (b, w)| add3(acc, b.map(|x| w * x)))
    }

    /// Value with a Monte Carlo standard error for the sample-average method.
    pub fn value_with_stderr(&self, h: Vec3) -> (f64, Option<f64>) {
        let v = self.value(h);
        match self.method {
            LambdaMethod::SampleAverage { count, .. } => {
                let var = self
                    .nodes
                    .iter()
                    .map(|(b, w)| w * (log2cosh(norm3(add3(h, *b))) - v).powi(2))
                    .sum::<f64>()
                    * count as f64
                    / (count as f64 - 1.0);
                (v, Some((var / count as f64).sqrt()))
            }
            _ => (v, None),
        }
    }
}

impl ConvexPotential for LambdaEvaluator {
    fn value(&self, h: Vec3) -> f64 {
        self.nodes
            .iter()
            .map(|(b, w)| w * log2cosh(norm3(add3(h, *b))))
            .sum()
    }

    fn gradient(&self, h: Vec3) -> Vec3 {
        self.nodes.iter().fold([0.0; 3], |acc, (b, w)| {
            let (g, _) = site_derivatives(add3(h, *b));
            add3(acc, g.map(|x| w * x))
        })
    }

    fn hessian(&self, h: Vec3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (b, w) in &self.nodes {
            let (_, hs) = site_derivatives(add3(h, *b));
            for i in 0..3 {
                for j in 0..3 {
                    out[i][j] += w * hs[i][j];
                }
            }
        }
        out
    }

    fn conjugate_on_sphere(&self, u: Vec3) -> f64 {
        -dot3(u, self.node_mean())
    }

    fn centre(&self) -> Vec3 {
        self.node_mean().map(|x| -x)
    }
}

/// `Lambda^ann(h) = log 2 E cosh |h + b|`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnealedLambda {
    nodes: Vec<(Vec3, f64)>,
}

impl AnnealedLambda {
    pub fn new(distribution: &FieldDistribution, method: LambdaMethod) -> Result<Self> {
        if !distribution.has_exponential_moments() {
            return Err(Error::invalid("annealed quantities need E exp|b| < inf"));
        }
        if matches!(method, LambdaMethod::SampleAverage { .. }) {
            return Err(Error::invalid("annealed evaluation needs a deterministic rule"));
        }
        let (_, nodes) = nodes_for(distribution, &method)?;
        Ok(AnnealedLambda { nodes })
    }

    /// Normalized weights `w_i cosh r_i / sum` and radii.
    fn tilted(&self, h: Vec3) -> (f64, Vec<(Vec3, f64)>) {
        let logs: Vec<f64> = self
            .nodes
            .iter()
            .map(|(b, w)| w.ln() + logcosh(norm3(add3(h, *b))))
            .collect();
        let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logs.iter().map(|l| (l - shift).exp()).sum();
        let log_mean_cosh = shift + sum.ln();
        let weights = self
            .nodes
            .iter()
            .zip(&logs)
            .map(|((b, _), l)| (add3(h, *b), (l - log_mean_cosh).exp()))
            .collect();
        (log_mean_cosh, weights)
    }
}

impl ConvexPotential for AnnealedLambda {
    fn value(&self, h: Vec3) -> f64 {
        std::f64::consts::LN_2 + self.tilted(h).0
    }

    fn gradient(&self, h: Vec3) -> Vec3 {
        let (_, pts) = self.tilted(h);
        pts.iter().fold([0.0; 3], |acc, (x, pi)| {
            let t = tanh_over(norm3(*x));
            add3(acc, x.map(|c| pi * t * c))
        })
    }

    fn hessian(&self, h: Vec3) -> Mat3 {
        let (_, pts) = self.tilted(h);
        let g = self.gradient(h);
        let mut out = [[0.0; 3]; 3];
        for (x, pi) in &pts {
            let r = norm3(*x);
            let t = tanh_over(r);
            for i in 0..3 {
                for j in 0..3 {
                    let proj = if r > 0.0 { x[i] * x[j] / (r * r) } else { 0.0 };
                    let id = if i == j { 1.0 } else { 0.0 };
                    out[i][j] += pi * (proj + t * (id - proj));
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] -= g[i] * g[j];
            }
        }
        out
    }

    fn conjugate_on_sphere(&self, u: Vec3) -> f64 {
        let logs: Vec<f64> = self.nodes.iter().map(|(b, w)| w.ln() + dot3(u, *b)).collect();
        let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        -(shift + logs.iter().map(|l| (l - shift).exp()).sum::<f64>().ln())
    }

    fn centre(&self) -> Vec3 {
        let mean = self
            .nodes
            .iter()
            .fold([0.0; 3], |acc, (b, w)| add3(acc, b.map(|x| w * x)));
        mean.map(|x| -x)
    }
}

/// `Lambda(h)` under the evaluator.
pub fn lambda_value(ev: &LambdaEvaluator, h: Vec3) -> f64 {
    ev.value(h)
}

/// `E[(h+b)/|h+b| tanh|h+b|]`, with zero contribution where `h + b = 0`.
pub fn lambda_gradient(ev: &LambdaEvaluator, h: Vec3) -> Vec3 {
    ev.gradient(h)
}

/// `log(2 E cosh |h + b|)` with the exact rule for the distribution.
pub fn annealed_lambda(dist: &FieldDistribution, h: Vec3) -> Result<f64> {
    Ok(AnnealedLambda::new(dist, LambdaMethod::Auto)?.value(h))
}
