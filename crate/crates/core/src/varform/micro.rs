use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimize::golden_max;
use crate::hamiltonian::assemble_quadratic_penalty;
use crate::linalg::{HermitianOperator, Vec3};
use crate::spin_algebra::{weyl_ordered_operator, DirectionalTerm, PolynomialSymbol};

/// Gap `g` with `H_P <= N (P(m) + g) + alpha Q_m` for every `|m| <= 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MicroGap {
    pub alpha: f64,
    pub value: f64,
    /// Sum of the curvature constants `|beta| d (d-1) / 2`.
    pub curvature: f64,
    pub terms: Vec<MicroGapTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MicroGapTerm {
    pub coeff: f64,
    pub direction: [f64; 3],
    pub degree: u32,
    /// Share of `alpha` assigned to this term.
    pub alpha: f64,
    pub gap: f64,
}

fn curvature_constant(t: &DirectionalTerm) -> f64 {
    let d = f64::from(t.degree);
    t.coeff.abs() * d * (d - 1.0) / 2.0
}

/// `max_{x, x0 in [-1,1]} beta d x0^{d-1} (x - x0) - a (x - x0)^2` for `a > 0`.
pub fn term_gap(beta: f64, degree: u32, a: f64) -> f64 {
    let d = f64::from(degree);
    let inner = |x0: f64| {
        let c = beta * d * x0.powi(degree as i32 - 1);
        let x = (x0 + c / (2.0 * a)).clamp(-1.0, 1.0);
        let t = x - x0;
        c * t - a * t * t
    };
    let n = 4000;
    let grid: Vec<f64> = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();
    let (ib, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, inner(x)))
        .fold((0, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    let lo = grid[ib.saturating_sub(1)];
    let hi = grid[(ib + 1).min(n)];
    golden_max(inner, lo, hi, 1e-14).1.max(inner(grid[ib]))
}

/// Splits `alpha` over the directional terms of `P` (each gets its curvature
/// constant plus an equal share of the excess) and sums the per-term gaps.
pub fn micro_gap(p: &PolynomialSymbol, alpha: f64) -> Result<MicroGap> {
    let terms: Vec<DirectionalTerm> = p
        .directional_decomposition()
        .into_iter()
        .filter(|t| t.degree >= 1)
        .collect();
    let curvature: f64 = terms.iter().map(curvature_constant).sum();
    if alpha.is_nan() || alpha <= curvature {
        return Err(Error::invalid(format!(
            "alpha = {alpha} must exceed the curvature constant {curvature}"
        )));
    }
    let share = (alpha - curvature) / terms.len().max(1) as f64;
    let out: Vec<MicroGapTerm> = terms
        .iter()
        .map(|t| {
            let c = curvature_constant(t);
            MicroGapTerm {
                coeff: t.coeff,
                direction: t.direction,
                degree: t.degree,
                alpha: c + share,
                gap: term_gap(t.coeff, t.degree, share),
            }
        })
        .collect();
    Ok(MicroGap {
        alpha,
        value: out.iter().map(|t| t.gap).sum(),
        curvature,
        terms: out,
    })
}

/// Smallest eigenvalue of `(P(m) + g) 1 + alpha Q_m / N - H_P / N`, nonnegative when the gap is valid.
pub fn micro_audit(p: &PolynomialSymbol, gap: &MicroGap, m: Vec3, n_sites: usize) -> Result<f64> {
    let n = n_sites as f64;
    let h = weyl_ordered_operator(p, n_sites)?;
    let q = assemble_quadratic_penalty(m, n_sites)?;
    let shift = HermitianOperator::scaled_identity(h.dim(), p.eval(m) + gap.value);
    let total = shift.plus(&q.scaled(gap.alpha / n))?.plus(&h.scaled(-1.0 / n))?;
    Ok(total.min_eigenvalue())
}
