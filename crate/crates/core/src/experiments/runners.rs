use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::coherent::{berezin_lieb_bounds, quadrature_for_spin, DEFAULT_EXTRA_DEGREE};
use crate::disorder::sample_fields;
use crate::error::{Error, Result};
use crate::exact_thermo::{
    fluctuation_estimate, gibbs_trial_bound, mean_and_stderr, model_pressure, Route, TiltSampling,
};
use crate::hamiltonian::{MeanField, ModelSpec};
use crate::linalg::{commutator, norm3, spectral_norm, C64, Vec3};
use crate::spin_algebra::{admissible_spins, spin_irrep, weyl_matrix, PolynomialSymbol, TwoJ};
use crate::varform::{
    legendre_transform, quadratic_inf_pressure, variational_pressure, ConvexPotential, LambdaEvaluator,
};

use super::config::RunConfig;

/// Identifies the run that produced a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportMeta {
    pub kind: &'static str,
    pub config_hash: String,
    pub version: &'static str,
}

impl ReportMeta {
    fn new(kind: &'static str, cfg: &RunConfig) -> Self {
        ReportMeta {
            kind,
            config_hash: cfg.hash(),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskFailure {
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitSummary {
    pub value: f64,
    pub maximizer: Vec3,
    pub field: Vec3,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub p_mean: f64,
    pub p_stderr: f64,
    pub p_limit: f64,
    pub gap: f64,
    pub seeds_ok: usize,
    /// Seeds whose trial-state bound at `h(m*)` exceeded the exact pressure.
    pub lower_bound_violations: usize,
    pub failures: Vec<TaskFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub meta: ReportMeta,
    pub limit: LimitSummary,
    pub rows: Vec<ConvergenceRow>,
}

/// Slack of the lower-bound audit.
const LOWER_BOUND_SLACK: f64 = 1e-9;

fn sorted_sizes(cfg: &RunConfig) -> Result<Vec<usize>> {
    let mut ns = cfg.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() {
        return Err(Error::Config("n_list must not be empty".into()));
    }
    Ok(ns)
}

fn task_grid(cfg: &RunConfig, ns: &[usize]) -> Vec<(usize, u64)> {
    ns.iter()
        .flat_map(|&n| cfg.seeds.seeds().map(move |s| (n, s)))
        .collect()
}

/// `E[p_N]` over seeds for each `N`, against the variational limit.
pub fn run_convergence(cfg: &RunConfig) -> Result<ConvergenceReport> {
    let ns = sorted_sizes(cfg)?;
    let ev = LambdaEvaluator::new(&cfg.distribution, cfg.evaluator.clone())?;
    let limit = variational_pressure(cfg.model.as_symbol(), &ev, &cfg.optimizer)?;
    let tasks = task_grid(cfg, &ns);
    let results: Vec<Result<(f64, bool)>> = tasks
        .par_iter()
        .map(|&(n, seed)| {
            let fields = sample_fields(&cfg.distribution, n, seed)?;
            let spec = ModelSpec::with_mean_field(cfg.model.clone(), fields);
            if cfg.audit_lower_bound {
                let t = gibbs_trial_bound(&spec, limit.field, Route::Sectors)?;
                Ok((t.exact, t.bound > t.exact + LOWER_BOUND_SLACK))
            } else {
                Ok((model_pressure(&spec, Route::Sectors)?, false))
            }
        })
        .collect();
    let mut by_n: BTreeMap<usize, (Vec<f64>, usize, Vec<TaskFailure>)> = BTreeMap::new();
    for ((n, seed), r) in tasks.iter().zip(results) {
        let entry = by_n.entry(*n).or_default();
        match r {
            Ok((p, violated)) => {
                entry.0.push(p);
                entry.1 += usize::from(violated);
            }
            Err(e) => entry.2.push(TaskFailure {
                seed: *seed,
                message: e.to_string(),
            }),
        }
    }
    if by_n.values().all(|e| e.0.is_empty()) {
        let first = by_n.values().flat_map(|e| e.2.first()).next();
        return Err(Error::ContractViolation(format!(
            "no task succeeded{}",
            first.map_or(String::new(), |f| format!(": {}", f.message))
        )));
    }
    let rows = by_n
        .into_iter()
        .map(|(n, (ps, violations, failures))| {
            let (mean, stderr) = if ps.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                mean_and_stderr(&ps)
            };
            ConvergenceRow {
                n,
                p_mean: mean,
                p_stderr: stderr,
                p_limit: limit.value,
                gap: (mean - limit.value).abs(),
                seeds_ok: ps.len(),
                lower_bound_violations: violations,
                failures,
            }
        })
        .collect();
    Ok(ConvergenceReport {
        meta: ReportMeta::new("converge", cfg),
        limit: LimitSummary {
            value: limit.value,
            maximizer: limit.maximizer,
            field: limit.field,
        },
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluctuationRow {
    pub n: usize,
    /// Mean over seeds of `E_gamma sum_mu var(M_mu)`.
    pub var_sum_mean: f64,
    pub var_sum_stderr: f64,
    /// `(C_P + 6 bbar^{2/3}) N^{-1/3}` with `C_P = max_mu ||[M_mu, H_P]||^2` at this `N`.
    pub bound: f64,
    pub chain_violations: usize,
    pub failures: Vec<TaskFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluctuationReport {
    pub meta: ReportMeta,
    pub rows: Vec<FluctuationRow>,
}

/// `max_mu ||[M_mu, N Sym P(M)]||^2`, evaluated sector by sector.
pub fn commutator_constant(p: &PolynomialSymbol, n_sites: usize) -> Result<f64> {
    let scale = C64::new(2.0 / n_sites as f64, 0.0);
    let mut worst: f64 = 0.0;
    for tj in admissible_spins(n_sites) {
        let spins = spin_irrep(tj);
        let h = weyl_matrix(p, &spins, n_sites)?;
        for s in spins.components() {
            let c = commutator(&(s.to_dense() * scale), &h);
            worst = worst.max(spectral_norm(&c).powi(2));
        }
    }
    Ok(worst)
}

/// Mean, stderr, chain violations and mean `|b|` of one realization.
type FluctuationTask = (f64, f64, usize, f64);

pub fn run_fluctuation(cfg: &RunConfig) -> Result<FluctuationReport> {
    let MeanField::Weyl(p) = &cfg.model else {
        return Err(Error::Config("fluctuation runs need a polynomial (weyl) model".into()));
    };
    let ns = sorted_sizes(cfg)?;
    let tilts = cfg.tilt.map(|t| TiltSampling {
        seed: t.seed,
        count: t.samples,
    });
    let tasks = task_grid(cfg, &ns);
    let results: Vec<Result<(f64, f64, usize, f64)>> = tasks
        .par_iter()
        .map(|&(n, seed)| {
            let fields = sample_fields(&cfg.distribution, n, seed)?;
            let est = fluctuation_estimate(p, &fields, tilts)?;
            Ok((est.mean, est.stderr, est.chain_violations, fields.abs_sum() / n as f64))
        })
        .collect();
    let mut by_n: BTreeMap<usize, (Vec<FluctuationTask>, Vec<TaskFailure>)> = BTreeMap::new();
    for ((n, seed), r) in tasks.iter().zip(results) {
        let entry = by_n.entry(*n).or_default();
        match r {
            Ok(v) => entry.0.push(v),
            Err(e) => entry.1.push(TaskFailure {
                seed: *seed,
                message: e.to_string(),
            }),
        }
    }
    if by_n.values().all(|e| e.0.is_empty()) {
        return Err(Error::ContractViolation("no fluctuation task succeeded".into()));
    }
    let rows = by_n
        .into_iter()
        .map(|(n, (vals, failures))| {
            let means: Vec<f64> = vals.iter().map(|v| v.0).collect();
            let (mean, stderr) = match means.len() {
                0 => (f64::NAN, f64::NAN),
                1 => (means[0], vals[0].1),
                _ => mean_and_stderr(&means),
            };
            let bbar = vals.iter().map(|v| v.3).sum::<f64>() / vals.len().max(1) as f64;
            let cp = commutator_constant(p, n)?;
            Ok(FluctuationRow {
                n,
                var_sum_mean: mean,
                var_sum_stderr: stderr,
                bound: (cp + 6.0 * bbar.powf(2.0 / 3.0)) * (n as f64).powf(-1.0 / 3.0),
                chain_violations: vals.iter().map(|v| v.2).sum(),
                failures,
            })
        })
        .collect::<Result<_>>()?;
    Ok(FluctuationReport {
        meta: ReportMeta::new("fluct", cfg),
        rows,
    })
}

/// Largest accepted gap between the two sides of the quadratic duality.
pub const DUALITY_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityRow {
    pub alpha: Vec3,
    pub inf_form: f64,
    pub dual_form: f64,
    pub gap: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityReport {
    pub meta: ReportMeta,
    pub rows: Vec<DualityRow>,
}

pub fn run_duality(cfg: &RunConfig) -> Result<DualityReport> {
    let spec = cfg
        .duality
        .as_ref()
        .ok_or_else(|| Error::Config("missing `duality` section".into()))?;
    if spec.alphas.is_empty() {
        return Err(Error::Config("duality.alphas must not be empty".into()));
    }
    let ev = LambdaEvaluator::new(&cfg.distribution, cfg.evaluator.clone())?;
    let rows = spec
        .alphas
        .par_iter()
        .map(|&alpha| {
            let r = quadratic_inf_pressure(alpha, &ev, &cfg.optimizer)?;
            Ok(DualityRow {
                alpha,
                inf_form: r.inf_form,
                dual_form: r.dual_form,
                gap: r.gap(),
                ok: r.gap() <= DUALITY_TOLERANCE,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DualityReport {
        meta: ReportMeta::new("duality", cfg),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BerezinRow {
    pub two_j: u32,
    pub n_sites: usize,
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BerezinReport {
    pub meta: ReportMeta,
    pub rows: Vec<BerezinRow>,
}

pub fn run_berezin(cfg: &RunConfig) -> Result<BerezinReport> {
    let spec = cfg
        .berezin
        .as_ref()
        .ok_or_else(|| Error::Config("missing `berezin` section".into()))?;
    if spec.two_j.is_empty() {
        return Err(Error::Config("berezin.two_j must not be empty".into()));
    }
    let rows = spec
        .two_j
        .par_iter()
        .map(|&two_j| {
            let tj = TwoJ(two_j);
            let n = spec.n_sites.unwrap_or(two_j.max(1) as usize);
            let nf = n as f64;
            let r = f64::from(two_j) / nf;
            let extra = 2 * DEFAULT_EXTRA_DEGREE + 4 * two_j as usize;
            let q = quadrature_for_spin(tj, extra)?;
            let b = match &spec.symbol {
                Some(f) => {
                    let g = |e: Vec3| nf * crate::spin_algebra::ClassicalSymbol::value(f, e.map(|x| r * x));
                    berezin_lieb_bounds(&g, tj, &q)?
                }
                None => berezin_lieb_bounds(&|_| 0.0, tj, &q)?,
            };
            Ok(BerezinRow {
                two_j,
                n_sites: n,
                lower: b.lower,
                exact: b.exact,
                upper: b.upper,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BerezinReport {
        meta: ReportMeta::new("berezin", cfg),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaRow {
    pub t: f64,
    pub lambda: f64,
    pub gradient: Vec3,
    /// `Lambda*(t u)`, only defined for `t <= 1`.
    pub lambda_star: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaReport {
    pub meta: ReportMeta,
    pub direction: Vec3,
    pub rows: Vec<LambdaRow>,
}

/// `Lambda`, its gradient and `Lambda*` along the ray `t u`.
pub fn run_lambda(cfg: &RunConfig) -> Result<LambdaReport> {
    let spec = cfg
        .lambda
        .as_ref()
        .ok_or_else(|| Error::Config("missing `lambda` section".into()))?;
    let ev = LambdaEvaluator::new(&cfg.distribution, cfg.evaluator.clone())?;
    let len = norm3(spec.direction);
    let u = spec.direction.map(|x| x / len);
    let rows = spec
        .radii
        .par_iter()
        .map(|&t| {
            let h = u.map(|x| t * x);
            let lambda_star = if t <= 1.0 {
                Some(legendre_transform(&ev, h)?.lambda_star)
            } else {
                None
            };
            Ok(LambdaRow {
                t,
                lambda: ev.value(h),
                gradient: ev.gradient(h),
                lambda_star,
            })
        })
        .collect::<Result<_>>()?;
    Ok(LambdaReport {
        meta: ReportMeta::new("lambda", cfg),
        direction: u,
        rows,
    })
}
