use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::quadrature::gauss_legendre;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereNode {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

impl SphereNode {
    pub fn direction(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Gauss-Legendre in `cos theta` times the trapezoid rule in `phi`.
///
/// Integrates spherical harmonics up to degree `min(2 n_theta - 1, n_phi - 1)` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereQuadrature {
    nodes: Vec<SphereNode>,
    exactness: usize,
}

impl SphereQuadrature {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::invalid("sphere quadrature needs at least one node per direction"));
        }
        let rule = gauss_legendre(n_theta);
        let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
        let nodes = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .flat_map(|(&x, &w)| {
                (0..n_phi).map(move |k| SphereNode {
                    theta: x.clamp(-1.0, 1.0).acos(),
                    phi: k as f64 * dphi,
                    weight: w * dphi,
                })
            })
            .collect();
        Ok(SphereQuadrature {
            nodes,
            exactness: (2 * n_theta - 1).min(n_phi - 1),
        })
    }

    /// Smallest rule of the form `(n, 2n)` exact to degree `degree`.
    pub fn with_exactness(degree: usize) -> Self {
        let n = degree / 2 + 1;
        SphereQuadrature::new(n, 2 * n).expect("nonzero sizes")
    }

    pub fn nodes(&self) -> &[SphereNode] {
        &self.nodes
    }

    pub fn exactness(&self) -> usize {
        self.exactness
    }

    pub fn integrate(&self, f: impl Fn(&SphereNode) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n)).sum()
    }
}
