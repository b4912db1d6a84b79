use crate::error::{Error, Result};
use crate::linalg::{CMat, HermitianOperator};

use super::system::{Observable, ThermalSystem};

/// Both sides of an identity that should agree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityCheck {
    pub fn abs_error(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Double sums over eigenpairs of one observable `A` with `Å = A - <A>`.
///
/// With normalized weights `p_k` and `|Å_kl|^2` in the eigenbasis:
/// * `variance = 1/2 sum |Å_kl|^2 (p_k + p_l)`
/// * `curvature = sum |Å_kl|^2 (p_k - p_l)/(E_k - E_l)` (equal levels use `p_k`)
/// * `remainder = 1/2 sum |Å_kl|^2 |p_k - p_l|`
/// * `commutator = -1/2 sum |A_kl|^2 (p_k + p_l)(E_k - E_l)^2`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairSums {
    pub mean: f64,
    pub variance: f64,
    pub curvature: f64,
    pub remainder: f64,
    pub commutator: f64,
}

/// Levels closer than this (relative to `max(1, |E_k|)`) count as equal.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

impl ThermalSystem {
    pub fn pair_sums(&self, a: &Observable) -> Result<PairSums> {
        let mean = self.gibbs_average(a)?;
        let w = self.weights();
        let mut out = PairSums {
            mean,
            variance: 0.0,
            curvature: 0.0,
            remainder: 0.0,
            commutator: 0.0,
        };
        for ((block, x), p) in self.blocks.iter().zip(&a.blocks).zip(&w.blocks) {
            let t = block.spectrum.to_eigenbasis(x);
            let e = &block.spectrum.eigenvalues;
            let n = e.len();
            for k in 0..n {
                for l in 0..n {
                    let mut amp = t[(k, l)];
                    let raw = amp.norm_sqr();
                    if k == l {
                        amp.re -= mean;
                    }
                    let centered = amp.norm_sqr();
                    let delta = e[k] - e[l];
                    out.variance += 0.5 * centered * (p[k] + p[l]);
                    out.commutator -= 0.5 * raw * (p[k] + p[l]) * delta * delta;
                    if delta.abs() <= DEGENERACY_TOLERANCE * e[k].abs().max(1.0) {
                        out.curvature += centered * p[k];
                    } else {
                        let hi = if delta > 0.0 { p[k] } else { p[l] };
                        let gap = -(-delta.abs()).exp_m1();
                        out.curvature += centered * hi * gap / delta.abs();
                        out.remainder += 0.5 * centered * hi * gap;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Thermal variance against its eigenbasis double sum.
    pub fn spectral_variance_identity(&self, a: &Observable) -> Result<IdentityCheck> {
        Ok(IdentityCheck {
            lhs: self.thermal_variance(a)?,
            rhs: self.pair_sums(a)?.variance,
        })
    }

    /// `<[A,H]^2>` computed from the matrices against its eigenbasis double sum.
    pub fn commutator_moment(&self, a: &Observable) -> Result<IdentityCheck> {
        self.check(a)?;
        let comm = Observable {
            blocks: self
                .blocks
                .iter()
                .zip(&a.blocks)
                .map(|(b, x)| {
                    let c: CMat = x * &b.hamiltonian - &b.hamiltonian * x;
                    &c * &c
                })
                .collect(),
        };
        Ok(IdentityCheck {
            lhs: self.gibbs_average(&comm)?,
            rhs: self.pair_sums(a)?.commutator,
        })
    }
}

/// Second derivative of `gamma -> p_N(H + gamma sqrt(N) A)`: spectral formula vs finite differences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureCheck {
    pub formula: f64,
    /// Central difference with step `1e-3`.
    pub finite_difference: f64,
    /// Richardson combination of steps `1e-3` and `2e-3`.
    pub richardson: f64,
}

impl CurvatureCheck {
    pub fn consistent(&self, rel_tol: f64) -> bool {
        (self.formula - self.richardson).abs() <= rel_tol * self.formula.abs().max(1.0)
    }
}

pub const CURVATURE_STEP: f64 = 1e-3;

/// `builder(g)` must return the system for `H + g sqrt(N) A`; `observable` is `A`
/// in the block layout of `builder(gamma0)`.
pub fn duhamel_curvature<F>(builder: F, observable: &Observable, gamma0: f64) -> Result<CurvatureCheck>
where
    F: Fn(f64) -> Result<ThermalSystem>,
{
    let centre = builder(gamma0)?;
    let formula = centre.pair_sums(observable)?.curvature;
    let p0 = centre.pressure();
    let second = |h: f64| -> Result<f64> {
        let plus = builder(gamma0 + h)?.pressure();
        let minus = builder(gamma0 - h)?.pressure();
        Ok((plus - 2.0 * p0 + minus) / (h * h))
    };
    let d1 = second(CURVATURE_STEP)?;
    let d2 = second(2.0 * CURVATURE_STEP)?;
    Ok(CurvatureCheck {
        formula,
        finite_difference: d1,
        richardson: (4.0 * d1 - d2) / 3.0,
    })
}

/// `p(H + A) - <A>_H / N - p(H)`, non-negative by convexity.
pub fn bogoliubov_gap(h: &HermitianOperator, a: &HermitianOperator, n_sites: usize) -> Result<f64> {
    if h.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: a.dim(),
        });
    }
    let base = ThermalSystem::from_operator(h, n_sites)?;
    let shifted = ThermalSystem::from_operator(&h.plus(a)?, n_sites)?;
    let avg = base.gibbs_average(&Observable::single(a))?;
    Ok(shifted.pressure() - avg / n_sites as f64 - base.pressure())
}

/// `cosh x <= sinh x + sinh(x)/x` for `x > 0`.
pub fn cosh_lemma_holds(x: f64) -> bool {
    if x <= 0.0 {
        return false;
    }
    // divide by e^x to stay finite for large x
    let c = 0.5 * (1.0 + (-2.0 * x).exp());
    let s = 0.5 * (-(-2.0 * x).exp_m1());
    c <= s + s / x
}
