//! Field distributions and reproducible per-site sampling.
//!
//! Every draw comes from ChaCha20 keyed by the user seed, a stream id and the
//! site (or sample) index, so realizations for different `N` share prefixes.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::linalg::{norm3, Vec3};
use crate::spin_algebra::Axis;

const FIELD_STREAM: u64 = u64::from_be_bytes(*b"\0\0\0field");
const TILT_STREAM: u64 = u64::from_be_bytes(*b"\0\0\0\0tilt");
const WORDS_PER_INDEX: u128 = 16;

/// Law of a single site field `b(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldDistribution {
    PointMass { v: Vec3 },
    /// `+eps e_axis` with probability `p`, else `-eps e_axis`.
    AxisDichotomous { axis: Axis, eps: f64, p: f64 },
    /// Independent components with common standard deviation.
    Gaussian { mean: Vec3, sigma: f64 },
    UniformBox { lo: Vec3, hi: Vec3 },
    Empirical { atoms: Vec<Vec3>, weights: Vec<f64> },
}

fn finite3(v: &Vec3) -> bool {
    v.iter().all(|x| x.is_finite())
}

impl FieldDistribution {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidDistribution(m.to_string()));
        match self {
            FieldDistribution::PointMass { v } => {
                if !finite3(v) {
                    return bad("point mass must be finite");
                }
            }
            FieldDistribution::AxisDichotomous { eps, p, .. } => {
                if !eps.is_finite() {
                    return bad("eps must be finite");
                }
                if !(0.0..=1.0).contains(p) {
                    return bad("p must lie in [0, 1]");
                }
            }
            FieldDistribution::Gaussian { mean, sigma } => {
                if !finite3(mean) {
                    return bad("mean must be finite");
                }
                if !(sigma.is_finite() && *sigma >= 0.0) {
                    return bad("sigma must be finite and non-negative");
                }
            }
            FieldDistribution::UniformBox { lo, hi } => {
                if !finite3(lo) || !finite3(hi) {
                    return bad("box corners must be finite");
                }
                if lo.iter().zip(hi).any(|(a, b)| a > b) {
                    return bad("lo must not exceed hi");
                }
            }
            FieldDistribution::Empirical { atoms, weights } => {
                if atoms.is_empty() || atoms.len() != weights.len() {
                    return bad("atoms and weights must be non-empty and of equal length");
                }
                if !atoms.iter().all(finite3) {
                    return bad("atoms must be finite");
                }
                if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                    return bad("weights must be non-negative");
                }
                if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                    return bad("weights must sum to 1");
                }
            }
        }
        Ok(())
    }

    /// Finitely supported laws as (atom, weight) pairs with positive weights.
    pub fn atoms(&self) -> Option<Vec<(Vec3, f64)>> {
        let list = match self {
            FieldDistribution::PointMass { v } => vec![(*v, 1.0)],
            FieldDistribution::AxisDichotomous { axis, eps, p } => {
                let mut plus = [0.0; 3];
                plus[axis.index()] = *eps;
                let minus = plus.map(|x| -x);
                vec![(plus, *p), (minus, 1.0 - p)]
            }
            FieldDistribution::Empirical { atoms, weights } => {
                atoms.iter().copied().zip(weights.iter().copied()).collect()
            }
            _ => return None,
        };
        Some(list.into_iter().filter(|(_, w)| *w > 0.0).collect())
    }

    /// `E b`
    pub fn mean(&self) -> Vec3 {
        match self {
            FieldDistribution::Gaussian { mean, .. } => *mean,
            FieldDistribution::UniformBox { lo, hi } => {
                [0, 1, 2].map(|i| 0.5 * (lo[i] + hi[i]))
            }
            _ => self
                .atoms()
                .expect("atomic")
                .iter()
                .fold([0.0; 3], |acc, (v, w)| [0, 1, 2].map(|i| acc[i] + w * v[i])),
        }
    }

    /// Every supported law has `E exp(t|b|) < inf` for all `t`.
    pub fn has_exponential_moments(&self) -> bool {
        true
    }

    fn draw(&self, rng: &mut SiteRng) -> Vec3 {
        match self {
            FieldDistribution::PointMass { v } => *v,
            FieldDistribution::AxisDichotomous { axis, eps, p } => {
                let s = if rng.uniform() < *p { *eps } else { -*eps };
                let mut b = [0.0; 3];
                b[axis.index()] = s;
                b
            }
            FieldDistribution::Gaussian { mean, sigma } => {
                [0, 1, 2].map(|i| mean[i] + sigma * standard_normal_quantile(rng.uniform()))
            }
            FieldDistribution::UniformBox { lo, hi } => {
                [0, 1, 2].map(|i| lo[i] + (hi[i] - lo[i]) * rng.uniform())
            }
            FieldDistribution::Empirical { atoms, weights } => {
                let u = rng.uniform();
                let mut acc = 0.0;
                for (a, w) in atoms.iter().zip(weights) {
                    acc += w;
                    if u < acc {
                        return *a;
                    }
                }
                let last = weights.iter().rposition(|w| *w > 0.0).unwrap_or(0);
                atoms[last]
            }
        }
    }
}

/// Counter-based uniform source for one (seed, stream, index) triple.
struct SiteRng(ChaCha20Rng);

impl SiteRng {
    fn new(seed: u64, stream: u64, index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng.set_word_pos(u128::from(index) * WORDS_PER_INDEX);
        SiteRng(rng)
    }

    /// Uniform on the open interval (0, 1).
    fn uniform(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }
}

pub(crate) fn standard_normal_quantile(u: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("valid").inverse_cdf(u)
}

/// Fields `b(1..=N)` drawn under one seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRealization {
    pub n_sites: usize,
    pub fields: Vec<Vec3>,
    pub seed: Option<u64>,
    pub distribution: Option<FieldDistribution>,
}

impl FieldRealization {
    pub fn from_fields(fields: Vec<Vec3>) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::invalid("a realization needs at least one site"));
        }
        if !fields.iter().all(finite3) {
            return Err(Error::invalid("fields must be finite"));
        }
        Ok(FieldRealization {
            n_sites: fields.len(),
            fields,
            seed: None,
            distribution: None,
        })
    }

    /// All sites carry the same field.
    pub fn uniform(n_sites: usize, b: Vec3) -> Result<Self> {
        Self::from_fields(vec![b; n_sites])
    }

    /// `(1/N) sum_n |b(n)|`
    pub fn bbar(&self) -> f64 {
        self.fields.iter().map(|b| norm3(*b)).sum::<f64>() / self.n_sites as f64
    }

    pub fn abs_sum(&self) -> f64 {
        self.fields.iter().map(|b| norm3(*b)).sum()
    }

    /// Distinct field values with their site counts, in order of first appearance.
    pub fn groups(&self) -> Vec<(Vec3, usize)> {
        let mut out: Vec<(Vec3, usize)> = Vec::new();
        for b in &self.fields {
            match out
                .iter_mut()
                .find(|(v, _)| v.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()))
            {
                Some((_, c)) => *c += 1,
                None => out.push((*b, 1)),
            }
        }
        out
    }
}

/// Draws `b(1..=N)`; site `n` depends only on `(seed, n)`.
pub fn sample_fields(dist: &FieldDistribution, n_sites: usize, seed: u64) -> Result<FieldRealization> {
    dist.validate()?;
    if n_sites == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let fields = (0..n_sites as u64)
        .map(|n| dist.draw(&mut SiteRng::new(seed, FIELD_STREAM, n)))
        .collect();
    Ok(FieldRealization {
        n_sites,
        fields,
        seed: Some(seed),
        distribution: Some(dist.clone()),
    })
}

/// Exact `E b` after validation.
pub fn mean_field_vector(dist: &FieldDistribution) -> Result<Vec3> {
    dist.validate()?;
    Ok(dist.mean())
}

/// Standard Gaussian 3-vector number `index` of the tilt stream.
pub fn sample_tilt(seed: u64, index: u64) -> Vec3 {
    let mut rng = SiteRng::new(seed, TILT_STREAM, index);
    [0, 1, 2].map(|_| standard_normal_quantile(rng.uniform()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::ContinuousCDF;

    fn dichotomous(eps: f64) -> FieldDistribution {
        FieldDistribution::AxisDichotomous {
            axis: Axis::Z,
            eps,
            p: 0.5,
        }
    }

    #[test]
    fn json_schema() {
        let d: FieldDistribution =
            serde_json::from_str(r#"{"kind":"axis_dichotomous","axis":"z","eps":1.0,"p":0.5}"#).unwrap();
        assert_eq!(d, dichotomous(1.0));
        let e: FieldDistribution = serde_json::from_str(
            r#"{"kind":"empirical","atoms":[[0,0,1],[1,0,0]],"weights":[0.25,0.75]}"#,
        )
        .unwrap();
        assert_eq!(e.mean(), [0.75, 0.0, 0.25]);
        assert!(serde_json::from_str::<FieldDistribution>(
            r#"{"kind":"point_mass","v":[0,0,0],"extra":1}"#
        )
        .is_err());
    }

    #[test]
    fn validation() {
        let bad = [
            FieldDistribution::AxisDichotomous { axis: Axis::X, eps: 1.0, p: 1.5 },
            FieldDistribution::Gaussian { mean: [0.0; 3], sigma: -1.0 },
            FieldDistribution::Gaussian { mean: [f64::NAN, 0.0, 0.0], sigma: 1.0 },
            FieldDistribution::UniformBox { lo: [0.0, 1.0, 0.0], hi: [1.0, 0.0, 1.0] },
            FieldDistribution::Empirical { atoms: vec![[0.0; 3]], weights: vec![0.9] },
            FieldDistribution::Empirical { atoms: vec![[0.0; 3], [1.0; 3]], weights: vec![1.5, -0.5] },
        ];
        for d in bad {
            assert!(matches!(d.validate(), Err(Error::InvalidDistribution(_))), "{d:?}");
            assert!(sample_fields(&d, 3, 0).is_err());
        }
    }

    #[test]
    fn reproducible_and_prefix_stable() {
        let d = FieldDistribution::Gaussian { mean: [0.1, 0.0, -0.2], sigma: 0.7 };
        let a = sample_fields(&d, 12, 99).unwrap();
        let b = sample_fields(&d, 12, 99).unwrap();
        let c = sample_fields(&d, 8, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(&a.fields[..8], &c.fields[..]);
        let other = sample_fields(&d, 12, 100).unwrap();
        assert_ne!(a.fields, other.fields);
    }

    #[test]
    fn dichotomous_mean_concentrates() {
        let n = 10_000;
        let r = sample_fields(&dichotomous(1.0), n, 7).unwrap();
        let mean_z = r.fields.iter().map(|b| b[2]).sum::<f64>() / n as f64;
        assert!(mean_z.abs() <= 4.0 / (n as f64).sqrt());
        assert!(r.fields.iter().all(|b| b[2].abs() == 1.0 && b[0] == 0.0));
    }

    #[test]
    fn exact_means() {
        let u = FieldDistribution::UniformBox { lo: [0.0; 3], hi: [1.0; 3] };
        assert_eq!(mean_field_vector(&u).unwrap(), [0.5, 0.5, 0.5]);
        assert_eq!(mean_field_vector(&dichotomous(2.0)).unwrap(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn empirical_mean_within_five_standard_errors() {
        let dists = [
            FieldDistribution::UniformBox { lo: [-1.0, 0.0, 2.0], hi: [1.0, 0.5, 3.0] },
            FieldDistribution::Gaussian { mean: [0.3, -0.1, 0.0], sigma: 1.3 },
            FieldDistribution::Empirical {
                atoms: vec![[1.0, 0.0, 0.0], [0.0, -2.0, 0.5]],
                weights: vec![0.3, 0.7],
            },
            FieldDistribution::AxisDichotomous { axis: Axis::Y, eps: 0.5, p: 0.8 },
        ];
        let n = 100_000;
        for d in dists {
            let r = sample_fields(&d, n, 2024).unwrap();
            let mean = d.mean();
            for i in 0..3 {
                let xs: Vec<f64> = r.fields.iter().map(|b| b[i]).collect();
                let m = xs.iter().sum::<f64>() / n as f64;
                let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
                let se = (var / n as f64).sqrt();
                assert!((m - mean[i]).abs() <= 5.0 * se + 1e-15, "{d:?} axis {i}");
            }
        }
    }

    #[test]
    fn normal_quantile_round_trip() {
        let normal = Normal::new(0.0, 1.0).unwrap();
        for k in 1..200 {
            let u = k as f64 / 200.0;
            let x = standard_normal_quantile(u);
            assert!((normal.cdf(x) - u).abs() < 1e-9);
        }
        for u in [1e-12, 1e-6, 1.0 - 1e-9] {
            let x = standard_normal_quantile(u);
            assert!(((normal.cdf(x) - u) / u.min(1.0 - u)).abs() < 1e-6);
        }
    }

    #[test]
    fn tilt_stream_is_separate() {
        let d = FieldDistribution::Gaussian { mean: [0.0; 3], sigma: 1.0 };
        let f = sample_fields(&d, 1, 5).unwrap().fields[0];
        let t = sample_tilt(5, 0);
        assert_ne!(f, t);
        assert_eq!(t, sample_tilt(5, 0));
    }

    #[test]
    fn groups_count_repeated_fields() {
        let r = FieldRealization::from_fields(vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(r.groups(), vec![([0.0, 0.0, 1.0], 2), ([0.0, 0.0, -1.0], 1)]);
        assert!((r.bbar() - 1.0).abs() < 1e-15);
    }
}
