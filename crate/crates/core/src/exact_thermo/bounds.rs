use crate::disorder::FieldRealization;
use crate::error::{Error, Result};
use crate::hamiltonian::{GaussianTilt, ModelSpec};
use crate::linalg::{norm3, Vec3};
use crate::spin_algebra::{Axis, PolynomialSymbol, MAX_PRODUCT_SITES};

use super::spectral::diagonalize_matrix;
use super::system::{model_blocks, Route, ThermalSystem};

/// `(energy + entropy) / N` of a product trial state against the exact pressure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialBound {
    pub bound: f64,
    pub exact: f64,
    pub energy: f64,
    pub entropy: f64,
}

/// Gibbs variational lower bound with `rho ∝ exp(H_b + 2 <h, S>)`.
///
/// The entropy comes from the eigenvalues of `rho` itself, with `0 log 0 = 0`.
pub fn gibbs_trial_bound(spec: &ModelSpec, h: Vec3, route: Route) -> Result<TrialBound> {
    let trial = ModelSpec::new(PolynomialSymbol::zero(), spec.fields.clone()).with_linear_field(h);
    let full = model_blocks(spec, route)?;
    let generator = model_blocks(&trial, route)?;
    let mut diag = Vec::with_capacity(generator.len());
    for (m, k, _) in &generator {
        diag.push((*m, diagonalize_matrix(k)?));
    }
    let shift = diag
        .iter()
        .flat_map(|(_, s)| s.eigenvalues.iter().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = diag
        .iter()
        .map(|(m, s)| m * s.eigenvalues.iter().map(|e| (e - shift).exp()).sum::<f64>())
        .sum();
    let mut energy = 0.0;
    let mut entropy = 0.0;
    for ((m, s), (_, hb, _)) in diag.iter().zip(&full) {
        let t = s.to_eigenbasis(hb);
        for (k, e) in s.eigenvalues.iter().enumerate() {
            let lambda = (e - shift).exp() / z;
            energy += m * lambda * t[(k, k)].re;
            if lambda > 0.0 {
                entropy -= m * lambda * lambda.ln();
            }
        }
    }
    let exact = ThermalSystem::from_model(spec, route)?.pressure();
    let n = spec.n_sites() as f64;
    Ok(TrialBound {
        bound: (energy + entropy) / n,
        exact,
        energy,
        entropy,
    })
}

/// Tilts `GaussianTilt::sample(seed, 0..count)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TiltSampling {
    pub seed: u64,
    pub count: usize,
}

impl TiltSampling {
    pub fn tilts(&self) -> impl Iterator<Item = GaussianTilt> + '_ {
        (0..self.count as u64).map(move |i| GaussianTilt::sample(self.seed, i))
    }
}

pub const MIN_TILT_SAMPLES: usize = 8;

/// `E_gamma p_N(H + sqrt(N) <gamma, M>) - p_N(H)` and its a priori range `[0, E|gamma| / sqrt N]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TiltSandwich {
    pub n_sites: usize,
    pub untilted: f64,
    pub tilted: Vec<f64>,
    pub gamma_norms: Vec<f64>,
    pub mean_excess: f64,
    pub stderr: f64,
    /// `E|gamma| / sqrt(N)` for a standard Gaussian in three dimensions.
    pub upper: f64,
}

impl TiltSandwich {
    /// `E|gamma|` for a standard Gaussian 3-vector, `2 sqrt(2/pi)`.
    pub const MEAN_NORM: f64 = 1.595_769_121_605_730_7;

    /// Mean excess within `[0, upper]` up to `sigmas` standard errors.
    pub fn holds(&self, sigmas: f64) -> bool {
        let band = sigmas * self.stderr;
        self.mean_excess >= -band && self.mean_excess <= self.upper + band
    }

    /// `0 <= p(gamma) - p(0) <= |gamma| / sqrt(N)` fails only on the upper side pointwise.
    pub fn pointwise_upper_holds(&self) -> bool {
        let s = (self.n_sites as f64).sqrt();
        self.tilted
            .iter()
            .zip(&self.gamma_norms)
            .all(|(p, g)| p - self.untilted <= g / s + 1e-12)
    }
}

/// Sample mean and `sd / sqrt(n)`; the error is zero for a single value.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn tilt_sandwich(spec: &ModelSpec, tilts: TiltSampling, route: Route) -> Result<TiltSandwich> {
    if tilts.count < 2 {
        return Err(Error::invalid("the tilt sandwich needs at least two samples"));
    }
    let untilted = ThermalSystem::from_model(spec, route)?.pressure();
    let mut tilted = Vec::with_capacity(tilts.count);
    let mut gamma_norms = Vec::with_capacity(tilts.count);
    for t in tilts.tilts() {
        let s = spec.clone().with_tilt(t.gamma);
        tilted.push(super::system::model_pressure(&s, route)?);
        gamma_norms.push(norm3(t.gamma));
    }
    let excess: Vec<f64> = tilted.iter().map(|p| p - untilted).collect();
    let (mean_excess, stderr) = mean_and_stderr(&excess);
    Ok(TiltSandwich {
        n_sites: spec.n_sites(),
        untilted,
        tilted,
        gamma_norms,
        mean_excess,
        stderr,
        upper: TiltSandwich::MEAN_NORM / (spec.n_sites() as f64).sqrt(),
    })
}

/// Per-tilt quantities of the fluctuation chain, one entry per axis.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct FluctuationSample {
    pub gamma: Vec3,
    pub variance: [f64; 3],
    /// Duhamel curvature `D`.
    pub curvature: [f64; 3],
    /// `R = 1/2 sum |Å_kl|^2 |p_k - p_l|`.
    pub remainder: [f64; 3],
    /// Commutator moment `<[M, H]^2>`, non-positive.
    pub commutator: [f64; 3],
}

impl FluctuationSample {
    pub fn total_variance(&self) -> f64 {
        self.variance.iter().sum()
    }

    /// `var <= D + R` and `R <= (D/2)^{2/3} (-C)^{1/3}` on every axis.
    pub fn chain_holds(&self, tol: f64) -> bool {
        (0..3).all(|i| {
            let (v, d, r, c) = (
                self.variance[i],
                self.curvature[i],
                self.remainder[i],
                self.commutator[i],
            );
            let holder = (d.max(0.0) / 2.0).powf(2.0 / 3.0) * (-c).max(0.0).powf(1.0 / 3.0);
            v <= d + r + tol * v.abs().max(1.0) && r <= holder + tol * r.abs().max(1.0)
        })
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct FluctuationEstimate {
    pub n_sites: usize,
    pub samples: Vec<FluctuationSample>,
    /// Mean over tilts of `sum_mu var(M_mu)`.
    pub mean: f64,
    pub stderr: f64,
    pub chain_violations: usize,
}

/// Relative slack allowed in the chain inequalities.
const CHAIN_TOLERANCE: f64 = 1e-10;

/// `E_gamma sum_mu var(M_mu)` under `H_{P,b} + sqrt(N) <gamma, M>`.
///
/// Without tilts a single untilted evaluation is returned.
pub fn fluctuation_estimate(
    p: &PolynomialSymbol,
    r: &FieldRealization,
    tilts: Option<TiltSampling>,
) -> Result<FluctuationEstimate> {
    if r.n_sites > MAX_PRODUCT_SITES {
        return Err(Error::SizeLimit {
            what: "N",
            value: r.n_sites,
            limit: MAX_PRODUCT_SITES,
        });
    }
    let gammas: Vec<Vec3> = match tilts {
        None => vec![[0.0; 3]],
        Some(t) if t.count < MIN_TILT_SAMPLES => {
            return Err(Error::invalid(format!(
                "at least {MIN_TILT_SAMPLES} tilt samples are required"
            )))
        }
        Some(t) => t.tilts().map(|g| g.gamma).collect(),
    };
    let base = ModelSpec::new(p.clone(), r.clone());
    let mut samples = Vec::with_capacity(gammas.len());
    for g in gammas {
        let spec = base.clone().with_tilt(g);
        let system = ThermalSystem::from_model(&spec, Route::Sectors)?;
        let mut s = FluctuationSample {
            gamma: g,
            variance: [0.0; 3],
            curvature: [0.0; 3],
            remainder: [0.0; 3],
            commutator: [0.0; 3],
        };
        for axis in Axis::ALL {
            let m = system.magnetization(axis)?;
            let sums = system.pair_sums(&m)?;
            let i = axis.index();
            s.variance[i] = system.thermal_variance(&m)?;
            s.curvature[i] = sums.curvature;
            s.remainder[i] = sums.remainder;
            s.commutator[i] = sums.commutator;
        }
        samples.push(s);
    }
    let totals: Vec<f64> = samples.iter().map(FluctuationSample::total_variance).collect();
    let (mean, stderr) = mean_and_stderr(&totals);
    let chain_violations = samples
        .iter()
        .filter(|s| !s.chain_holds(CHAIN_TOLERANCE))
        .count();
    Ok(FluctuationEstimate {
        n_sites: r.n_sites,
        samples,
        mean,
        stderr,
        chain_violations,
    })
}
