use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64};
use crate::spin_algebra::TwoJ;

use super::sphere::SphereQuadrature;

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `|Omega, J>` in the basis `m = J, J-1, ..., -J`.
///
/// Component `k` is `sqrt(C(2J, k)) cos^{2J-k}(theta/2) sin^k(theta/2) e^{i k phi}`.
pub fn coherent_vector(two_j: TwoJ, theta: f64, phi: f64) -> CVec {
    let n = two_j.0;
    let (s, c) = (theta / 2.0).sin_cos();
    CVec::from_iterator(
        two_j.dim(),
        (0..=n).map(|k| {
            let amp = binomial(n, k).sqrt() * c.powi((n - k) as i32) * s.powi(k as i32);
            C64::from_polar(amp, k as f64 * phi)
        }),
    )
}

/// `<Omega, J| G |Omega, J>`
pub fn lower_symbol(g: &CMat, two_j: TwoJ, theta: f64, phi: f64) -> Result<f64> {
    if g.nrows() != two_j.dim() || g.ncols() != two_j.dim() {
        return Err(Error::DimensionMismatch {
            expected: two_j.dim(),
            got: g.nrows(),
        });
    }
    let v = coherent_vector(two_j, theta, phi);
    Ok(v.dotc(&(g * &v)).re)
}

/// `((2J+1)/4 pi) sum_nodes w f(node) |Omega><Omega|`
pub(crate) fn frame_sum(two_j: TwoJ, q: &SphereQuadrature, f: impl Fn(&super::SphereNode) -> f64) -> CMat {
    let d = two_j.dim();
    let scale = d as f64 / (4.0 * std::f64::consts::PI);
    let mut out = CMat::zeros(d, d);
    for node in q.nodes() {
        let w = node.weight * scale * f(node);
        if w == 0.0 {
            continue;
        }
        let v = coherent_vector(two_j, node.theta, node.phi);
        out.ger(C64::new(w, 0.0), &v, &v.conjugate(), C64::new(1.0, 0.0));
    }
    out
}

/// Largest entry of `((2J+1)/4 pi) sum w |Omega><Omega| - 1`.
pub fn resolution_check(two_j: TwoJ, q: &SphereQuadrature) -> Result<f64> {
    let needed = 2 * two_j.0 as usize;
    if q.exactness() < needed {
        return Err(Error::QuadratureInadequate(format!(
            "exactness {} below {needed} needed for 2J = {}",
            q.exactness(),
            two_j.0
        )));
    }
    let frame = frame_sum(two_j, q, |_| 1.0);
    let d = two_j.dim();
    Ok((frame - CMat::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max))
}
