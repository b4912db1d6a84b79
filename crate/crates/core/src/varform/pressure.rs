use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disorder::{FieldDistribution, FieldRealization};
use crate::error::{Error, Result};
use crate::linalg::{norm3, Vec3};
use crate::optimize::{nelder_mead_max, NelderMead};
use crate::spin_algebra::{ClassicalSymbol, PolynomialSymbol};

use super::lambda::{log2cosh, AnnealedLambda, ConvexPotential, LambdaEvaluator, LambdaMethod};
use super::legendre::{binary_entropy, legendre_transform, BOUNDARY_MARGIN};

/// Grid search followed by Nelder-Mead restarts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerOptions {
    /// Points per axis of the initial grid on `[-1, 1]^3`.
    pub grid: usize,
    /// Local searches started from the best grid points.
    pub restarts: usize,
    /// Target accuracy of the returned value.
    pub tolerance: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            grid: 17,
            restarts: 3,
            tolerance: 1e-8,
        }
    }
}

impl OptimizerOptions {
    fn validate(&self) -> Result<()> {
        if self.grid < 2 || self.restarts == 0 || self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::invalid("optimizer needs grid >= 2, restarts >= 1, tolerance > 0"));
        }
        Ok(())
    }

    fn local(&self, step: f64) -> NelderMead {
        NelderMead {
            initial_step: step,
            value_tolerance: (self.tolerance * 1e-4).min(1e-12),
            point_tolerance: 1e-10,
            max_evaluations: 4000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartRecord {
    pub start: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OptimizationTrace {
    pub grid_points: usize,
    /// Grid points where the objective could not be evaluated.
    pub flagged_points: usize,
    pub grid_best: f64,
    pub restarts: Vec<RestartRecord>,
    /// Newton refinement of the stationarity equation was accepted.
    pub polished: bool,
}

/// Maximum of `V(m) - conjugate(m)` over the unit ball.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationalResult {
    pub value: f64,
    pub maximizer: Vec3,
    /// `h(m*)`, the field dual to the maximizer.
    pub field: Vec3,
    pub trace: OptimizationTrace,
}

/// Slope of the decrease imposed outside the ball.
const OUTSIDE_PENALTY: f64 = 10.0;

fn ball_grid(n: usize) -> Vec<Vec3> {
    let step = 2.0 / (n - 1) as f64;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let m = [-1.0 + i as f64 * step, -1.0 + j as f64 * step, -1.0 + k as f64 * step];
                if norm3(m) <= 1.0 + 1e-12 {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Radial projection onto the ball and the distance travelled.
fn project(m: Vec3) -> (Vec3, f64) {
    let r = norm3(m);
    if r <= 1.0 {
        (m, 0.0)
    } else {
        (m.map(|x| x / r), r - 1.0)
    }
}

/// Maximizes a function on the ball given as `objective(m) -> Option<value>`.
fn maximize_on_ball(
    objective: &(dyn Fn(Vec3) -> Option<f64> + Sync),
    opts: &OptimizerOptions,
) -> Result<(Vec3, f64, OptimizationTrace)> {
    opts.validate()?;
    let grid = ball_grid(opts.grid);
    let mut trace = OptimizationTrace {
        grid_points: grid.len(),
        ..Default::default()
    };
    let evaluated: Vec<(Vec3, Option<f64>)> = grid
        .into_par_iter()
        .map(|m| (m, objective(m).filter(|v| v.is_finite())))
        .collect();
    let mut scored: Vec<(Vec3, f64)> = evaluated
        .iter()
        .filter_map(|(m, v)| v.map(|v| (*m, v)))
        .collect();
    trace.flagged_points = evaluated.len() - scored.len();
    if scored.is_empty() {
        return Err(Error::ContractViolation("objective undefined on the whole grid".into()));
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    trace.grid_best = scored[0].1;
    let mut best = scored[0];
    let extended = |x: &[f64]| {
        let (p, dist) = project([x[0], x[1], x[2]]);
        objective(p).map_or(f64::NEG_INFINITY, |v| v - OUTSIDE_PENALTY * dist)
    };
    let spacing = 2.0 / (opts.grid - 1) as f64;
    for (start, _) in scored.iter().take(opts.restarts) {
        let first = nelder_mead_max(extended, start, &opts.local(spacing));
        let second = nelder_mead_max(extended, &first.point, &opts.local(spacing * 0.05));
        let (p, _) = project([second.point[0], second.point[1], second.point[2]]);
        let value = objective(p).unwrap_or(f64::NEG_INFINITY);
        trace.restarts.push(RestartRecord {
            start: start.to_vec(),
            value,
            evaluations: first.evaluations + second.evaluations,
            converged: second.converged,
        });
        if value > best.1 {
            best = (p, value);
        }
    }
    Ok((best.0, best.1, trace))
}

/// Newton on `grad V(m) = h(m)` starting at `m`; returns an improved point if found.
fn polish(symbol: &dyn ClassicalSymbol, pot: &dyn ConvexPotential, m: Vec3, value: f64) -> Option<(Vec3, f64, Vec3)> {
    symbol.gradient(m)?;
    let objective = |m: Vec3| -> Option<(f64, Vec3)> {
        let s = legendre_transform(pot, m).ok()?;
        Some((symbol.value(m) - s.lambda_star, s.h))
    };
    let mut cur = m;
    let mut cur_val = value;
    let mut improved = None;
    for _ in 0..20 {
        if norm3(cur) >= 1.0 - BOUNDARY_MARGIN {
            break;
        }
        let sol = legendre_transform(pot, cur).ok()?;
        let gv = symbol.gradient(cur)?;
        let hv = symbol.hessian(cur)?;
        let f = Vector3::from_fn(|i, _| gv[i] - sol.h[i]);
        if f.norm() < 1e-13 {
            break;
        }
        let lam_hess = Matrix3::from_fn(|i, j| pot.hessian(sol.h)[i][j]);
        let inv = lam_hess.try_inverse()?;
        let jac = Matrix3::from_fn(|i, j| hv[i][j]) - inv;
        let step = jac.lu().solve(&(-f))?;
        let next = [cur[0] + step[0], cur[1] + step[1], cur[2] + step[2]];
        if norm3(next) >= 1.0 - BOUNDARY_MARGIN {
            break;
        }
        let (v, h) = objective(next)?;
        if v < cur_val - 1e-13 * cur_val.abs().max(1.0) {
            break;
        }
        cur = next;
        cur_val = v;
        improved = Some((cur, cur_val, h));
    }
    improved
}

/// `sup_{|m| <= 1} V(m) - conjugate(m)` for any convex potential.
pub fn variational_sup(
    symbol: &dyn ClassicalSymbol,
    pot: &dyn ConvexPotential,
    opts: &OptimizerOptions,
) -> Result<VariationalResult> {
    let objective = |m: Vec3| -> Option<f64> {
        legendre_transform(pot, m)
            .ok()
            .map(|s| symbol.value(m) - s.lambda_star)
    };
    let (m, value, mut trace) = maximize_on_ball(&objective, opts)?;
    let mut result = VariationalResult {
        value,
        maximizer: m,
        field: legendre_transform(pot, m)?.h,
        trace: OptimizationTrace::default(),
    };
    if let Some((pm, pv, ph)) = polish(symbol, pot, m, value) {
        if pv >= value {
            result.maximizer = pm;
            result.value = pv;
            result.field = ph;
            trace.polished = true;
        }
    }
    result.trace = trace;
    Ok(result)
}

/// `sup_{|m| <= 1} V(m) - Lambda*(m)`
pub fn variational_pressure(
    symbol: &dyn ClassicalSymbol,
    ev: &LambdaEvaluator,
    opts: &OptimizerOptions,
) -> Result<VariationalResult> {
    variational_sup(symbol, ev, opts)
}

/// `sup_{|m| <= 1} V(m) - (Lambda^ann)*(m)`
pub fn annealed_pressure(
    symbol: &dyn ClassicalSymbol,
    dist: &FieldDistribution,
    opts: &OptimizerOptions,
) -> Result<VariationalResult> {
    let an = AnnealedLambda::new(dist, LambdaMethod::Auto)?;
    variational_sup(symbol, &an, opts)
}

/// Result of `max_r { I(r) + max_Omega V(r e(Omega)) }`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeterministicResult {
    pub value: f64,
    pub radius: f64,
    pub theta: f64,
    pub phi: f64,
    pub maximizer: Vec3,
}

/// Pressure without disorder: `max_{r in [0,1]} { I(r) + max_Omega V(r e(Omega)) }`.
///
/// Searches `(s, theta, phi)` with `r = (1 - cos s)/2`, which keeps `r` in range.
pub fn deterministic_pressure(symbol: &dyn ClassicalSymbol, opts: &OptimizerOptions) -> Result<DeterministicResult> {
    opts.validate()?;
    let point = |x: &[f64]| -> (f64, Vec3) {
        let r = (1.0 - x[0].cos()) / 2.0;
        let (st, ct) = x[1].sin_cos();
        let (sp, cp) = x[2].sin_cos();
        (r, [r * st * cp, r * st * sp, r * ct])
    };
    let f = |x: &[f64]| {
        let (r, m) = point(x);
        binary_entropy(r).unwrap_or(f64::NEG_INFINITY) + symbol.value(m)
    };
    let n = opts.grid;
    let mut scored = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..2 * n {
                let x = [
                    std::f64::consts::PI * i as f64 / (n - 1) as f64,
                    std::f64::consts::PI * j as f64 / (n - 1) as f64,
                    std::f64::consts::PI * k as f64 / n as f64,
                ];
                scored.push((x, f(&x)));
            }
        }
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut best = (scored[0].0.to_vec(), scored[0].1);
    let step = std::f64::consts::PI / (n - 1) as f64;
    for (start, _) in scored.iter().take(opts.restarts) {
        let a = nelder_mead_max(f, start, &opts.local(step));
        let b = nelder_mead_max(f, &a.point, &opts.local(step * 0.05));
        if b.value > best.1 {
            best = (b.point, b.value);
        }
    }
    let (r, m) = point(&best.0);
    Ok(DeterministicResult {
        value: best.1,
        radius: r,
        theta: best.0[1],
        phi: best.0[2],
        maximizer: m,
    })
}

/// Both sides of the quadratic duality for `P_alpha = -sum alpha_xi m_xi^2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityResult {
    pub alpha: Vec3,
    /// `inf_m sum alpha m^2 + Lambda(-2 alpha.m)`
    pub inf_form: f64,
    /// `sup_m P_alpha(m) - Lambda*(m)`
    pub dual_form: f64,
    pub inf_minimizer: Vec3,
    pub dual_maximizer: Vec3,
}

impl DualityResult {
    pub fn gap(&self) -> f64 {
        (self.inf_form - self.dual_form).abs()
    }
}

pub fn quadratic_inf_pressure(alpha: Vec3, ev: &LambdaEvaluator, opts: &OptimizerOptions) -> Result<DualityResult> {
    if alpha.iter().any(|a| a.is_nan() || *a < 0.0) {
        return Err(Error::invalid("alpha must be non-negative"));
    }
    let inf_objective = |m: Vec3| -> Option<f64> {
        let quad: f64 = (0..3).map(|i| alpha[i] * m[i] * m[i]).sum();
        Some(-(quad + ev.value([0, 1, 2].map(|i| -2.0 * alpha[i] * m[i]))))
    };
    let (m_inf, neg_inf, _) = maximize_on_ball(&inf_objective, opts)?;
    let dual = variational_pressure(&PolynomialSymbol::negative_quadratic(alpha), ev, opts)?;
    Ok(DualityResult {
        alpha,
        inf_form: -neg_inf,
        dual_form: dual.value,
        inf_minimizer: m_inf,
        dual_maximizer: dual.maximizer,
    })
}

/// `sum alpha m^2 + (1/N) sum_n log 2 cosh |-2 alpha.m + b(n)|`
pub fn linear_pressure_finite_n(alpha: Vec3, m: Vec3, r: &FieldRealization) -> Result<f64> {
    if alpha.iter().any(|a| a.is_nan() || *a < 0.0) {
        return Err(Error::invalid("alpha must be non-negative"));
    }
    let shift = [0, 1, 2].map(|i| -2.0 * alpha[i] * m[i]);
    let quad: f64 = (0..3).map(|i| alpha[i] * m[i] * m[i]).sum();
    let sum: f64 = r
        .fields
        .iter()
        .map(|b| log2cosh(norm3([0, 1, 2].map(|i| shift[i] + b[i]))))
        .sum();
    Ok(quad + sum / r.n_sites as f64)
}
