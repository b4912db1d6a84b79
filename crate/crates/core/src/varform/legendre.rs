use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::linalg::{dot3, norm3, Vec3};

use super::lambda::ConvexPotential;

/// Radius beyond which the conjugate is interpolated towards its boundary value.
pub const BOUNDARY_MARGIN: f64 = 1e-6;
pub const MAX_NEWTON_ITERATIONS: usize = 100;
/// Required `|m - grad Lambda(h)|` at the returned field.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// `Lambda*(m) = sup_h <m,h> - Lambda(h)` and the maximizing field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LegendreSolution {
    pub m: Vec3,
    /// Maximizer `h(m)`; near the sphere this is the field at the interpolation anchor.
    pub h: Vec3,
    pub lambda_star: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Set when `|m| > 1 - BOUNDARY_MARGIN` and the value was interpolated.
    pub boundary: bool,
}

fn solve3(a: [[f64; 3]; 3], b: Vec3) -> Option<Vec3> {
    let m = Matrix3::from_fn(|i, j| a[i][j]);
    let v = Vector3::from_column_slice(&b);
    let x = m.cholesky().map(|c| c.solve(&v)).or_else(|| m.lu().solve(&v))?;
    Some([x[0], x[1], x[2]])
}

/// Damped Newton for `grad Lambda(h) = m` inside the ball `|m| <= 1 - BOUNDARY_MARGIN`.
fn newton(pot: &dyn ConvexPotential, m: Vec3) -> Result<LegendreSolution> {
    let r = norm3(m);
    let c = pot.centre();
    let mut h = if r > 0.0 {
        let scale = r.min(1.0 - 1e-15).atanh() / r;
        [0, 1, 2].map(|i| c[i] + scale * m[i])
    } else {
        c
    };
    let objective = |h: Vec3| dot3(m, h) - pot.value(h);
    let mut f = objective(h);
    let mut residual = f64::INFINITY;
    for it in 0..=MAX_NEWTON_ITERATIONS {
        let grad = pot.gradient(h);
        let g = [0, 1, 2].map(|i| m[i] - grad[i]);
        residual = norm3(g);
        if residual <= 1e-13 || it == MAX_NEWTON_ITERATIONS {
            if residual <= RESIDUAL_TOLERANCE {
                return Ok(LegendreSolution {
                    m,
                    h,
                    lambda_star: f,
                    residual,
                    iterations: it,
                    boundary: false,
                });
            }
            break;
        }
        let step = solve3(pot.hessian(h), g).unwrap_or(g);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = [0, 1, 2].map(|i| h[i] + t * step[i]);
            let ft = objective(trial);
            let tg = pot.gradient(trial);
            let tr = norm3([0, 1, 2].map(|i| m[i] - tg[i]));
            // near the optimum the gain drops below rounding, the residual still decides
            if ft >= f - 1e-15 * f.abs().max(1.0) || (ft >= f - 1e-12 * f.abs().max(1.0) && tr < 0.5 * residual) {
                h = trial;
                f = ft;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            if residual <= RESIDUAL_TOLERANCE {
                return Ok(LegendreSolution {
                    m,
                    h,
                    lambda_star: f,
                    residual,
                    iterations: it,
                    boundary: false,
                });
            }
            break;
        }
    }
    Err(Error::NonConvergence {
        method: "Legendre Newton",
        iterations: MAX_NEWTON_ITERATIONS,
        residual,
    })
}

/// Legendre transform of `pot` at `m` with `|m| <= 1`.
///
/// For `1 - BOUNDARY_MARGIN < |m| <= 1` the value is the linear interpolation in
/// `|m|` between the Newton value at radius `1 - BOUNDARY_MARGIN` and the exact
/// value on the sphere.
pub fn legendre_transform(pot: &dyn ConvexPotential, m: Vec3) -> Result<LegendreSolution> {
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::domain("m must be finite"));
    }
    let r = norm3(m);
    if r > 1.0 + 1e-12 {
        return Err(Error::domain(format!("|m| = {r} > 1")));
    }
    let r0 = 1.0 - BOUNDARY_MARGIN;
    if r <= r0 {
        return newton(pot, m);
    }
    let u = m.map(|x| x / r);
    let anchor = newton(pot, u.map(|x| x * r0))?;
    let edge = pot.conjugate_on_sphere(u);
    let s = ((r.min(1.0) - r0) / (1.0 - r0)).clamp(0.0, 1.0);
    Ok(LegendreSolution {
        m,
        h: anchor.h,
        lambda_star: anchor.lambda_star + s * (edge - anchor.lambda_star),
        residual: anchor.residual,
        iterations: anchor.iterations,
        boundary: true,
    })
}

/// `I(r) = -[(1+r)/2 ln((1+r)/2) + (1-r)/2 ln((1-r)/2)]` on `[0, 1]`.
pub fn binary_entropy(r: f64) -> Result<f64> {
    if !(0.0..=1.0 + 1e-12).contains(&r) {
        return Err(Error::domain(format!("entropy argument {r} outside [0, 1]")));
    }
    let r = r.min(1.0);
    let term = |q: f64| if q > 0.0 { q * q.ln() } else { 0.0 };
    Ok(-(term((1.0 + r) / 2.0) + term((1.0 - r) / 2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::FieldDistribution;
    use crate::spin_algebra::Axis;
    use crate::varform::lambda::{AnnealedLambda, LambdaEvaluator, LambdaMethod};

    fn free() -> LambdaEvaluator {
        LambdaEvaluator::auto(&FieldDistribution::PointMass { v: [0.0; 3] }).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert!((binary_entropy(0.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.761594).unwrap() - 0.365335).abs() < 1e-6);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn free_conjugate_at_tanh_one() {
        let s = legendre_transform(&free(), [0.0, 0.0, 1f64.tanh()]).unwrap();
        assert!((s.h[2] - 1.0).abs() < 1e-10 && s.h[0].abs() < 1e-12);
        assert!((s.lambda_star - (1f64.tanh() - (2.0 * 1f64.cosh()).ln())).abs() < 1e-12);
        assert!((s.lambda_star + 0.365334).abs() < 1e-6);
        assert!(s.residual <= RESIDUAL_TOLERANCE);
    }

    #[test]
    fn boundary_values() {
        let ev = free();
        let s = legendre_transform(&ev, [0.0, 1.0, 0.0]).unwrap();
        assert!(s.boundary && s.lambda_star.abs() < 1e-5);
        assert!(legendre_transform(&ev, [0.0, 0.0, 1.0 + 1e-9]).is_err());
        let shifted = LambdaEvaluator::auto(&FieldDistribution::PointMass { v: [0.0, 0.0, 0.7] }).unwrap();
        let top = legendre_transform(&shifted, [0.0, 0.0, 1.0]).unwrap();
        assert!((top.lambda_star + 0.7).abs() < 1e-12);
    }

    #[test]
    fn conjugate_bounded_by_mean_field() {
        let d = FieldDistribution::AxisDichotomous { axis: Axis::X, eps: 0.8, p: 0.3 };
        let ev = LambdaEvaluator::auto(&d).unwrap();
        let mean = norm3(d.mean());
        for m in [[0.1, 0.2, 0.3], [-0.5, 0.0, 0.5], [0.0, 0.0, 0.0], [0.7, -0.7, 0.0]] {
            let s = legendre_transform(&ev, m).unwrap();
            assert!(s.residual <= RESIDUAL_TOLERANCE);
            assert!(s.lambda_star <= mean + 1e-12);
        }
    }

    #[test]
    fn annealed_conjugate_converges() {
        let d = FieldDistribution::AxisDichotomous { axis: Axis::Z, eps: 1.0, p: 0.5 };
        let an = AnnealedLambda::new(&d, LambdaMethod::Auto).unwrap();
        let s = legendre_transform(&an, [0.1, 0.0, 0.6]).unwrap();
        assert!(s.residual <= RESIDUAL_TOLERANCE);
    }
}
