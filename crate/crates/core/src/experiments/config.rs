use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coherent::{CoherentSymbol, MAX_COHERENT_PRODUCT_SITES};
use crate::disorder::FieldDistribution;
use crate::error::{Error, Result};
use crate::exact_thermo::MIN_TILT_SAMPLES;
use crate::hamiltonian::MeanField;
use crate::linalg::Vec3;
use crate::spin_algebra::{MAX_DEGENERACY_SITES, MAX_PRODUCT_SITES};
use crate::varform::{LambdaMethod, OptimizerOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    pub count: usize,
    #[serde(default)]
    pub base: u64,
}

impl SeedSpec {
    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.count as u64).map(move |i| self.base.wrapping_add(i))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TiltSpec {
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualitySpec {
    pub alphas: Vec<Vec3>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerezinSpec {
    pub two_j: Vec<u32>,
    /// `None` means `G = 0`.
    #[serde(default)]
    pub symbol: Option<CoherentSymbol>,
    /// Particle number in `N f((2J/N) e)`; defaults to `2J`.
    #[serde(default)]
    pub n_sites: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaSpec {
    pub direction: Vec3,
    pub radii: Vec<f64>,
}

/// Everything a run depends on. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: MeanField,
    pub distribution: FieldDistribution,
    #[serde(default)]
    pub n_list: Vec<usize>,
    #[serde(default = "one_seed")]
    pub seeds: SeedSpec,
    #[serde(default)]
    pub tilt: Option<TiltSpec>,
    #[serde(default)]
    pub evaluator: LambdaMethod,
    #[serde(default)]
    pub optimizer: OptimizerOptions,
    /// Check the product trial-state lower bound against every exact pressure.
    #[serde(default = "yes")]
    pub audit_lower_bound: bool,
    #[serde(default)]
    pub duality: Option<DualitySpec>,
    #[serde(default)]
    pub berezin: Option<BerezinSpec>,
    #[serde(default)]
    pub lambda: Option<LambdaSpec>,
}

fn one_seed() -> SeedSpec {
    SeedSpec { count: 1, base: 0 }
}

fn yes() -> bool {
    true
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RunConfig::from_json(&text)
    }

    /// Largest `N` the exact route supports for this model and distribution.
    pub fn max_sites(&self) -> usize {
        let repeated = self.distribution.atoms().is_some();
        match (&self.model, repeated) {
            (_, true) => MAX_DEGENERACY_SITES,
            (MeanField::Weyl(_), false) => MAX_PRODUCT_SITES,
            (MeanField::Coherent(_), false) => MAX_COHERENT_PRODUCT_SITES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.distribution
            .validate()
            .map_err(|e| config_err(e.to_string()))?;
        let limit = self.max_sites();
        if let Some(&n) = self.n_list.iter().find(|&&n| n == 0 || n > limit) {
            return Err(config_err(format!("N = {n} outside 1..={limit}")));
        }
        if self.seeds.count == 0 {
            return Err(config_err("seeds.count must be at least 1"));
        }
        if let Some(t) = self.tilt {
            if t.samples < MIN_TILT_SAMPLES {
                return Err(config_err(format!(
                    "tilt.samples must be at least {MIN_TILT_SAMPLES}"
                )));
            }
        }
        if let Some(d) = &self.duality {
            if d.alphas.iter().flatten().any(|a| a.is_nan() || *a < 0.0 || !a.is_finite()) {
                return Err(config_err("duality alphas must be finite and non-negative"));
            }
        }
        if let Some(l) = &self.lambda {
            if l.direction.iter().all(|x| *x == 0.0) || l.direction.iter().any(|x| !x.is_finite()) {
                return Err(config_err("lambda.direction must be a finite nonzero vector"));
            }
            if l.radii.iter().any(|t| !t.is_finite() || *t < 0.0) {
                return Err(config_err("lambda.radii must be finite and non-negative"));
            }
        }
        if let Some(b) = &self.berezin {
            if b.n_sites == Some(0) {
                return Err(config_err("berezin.n_sites must be positive"));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical))
    }
}
