use crate::collective::CollectiveDecomposition;
use crate::error::{Error, Result};
use crate::hamiltonian::ModelSpec;
use crate::linalg::{hermitian_eigenvalues, CMat, HermitianOperator, C64};
use crate::spin_algebra::{build_total_spin, Axis, SpinOperatorSet};

use super::spectral::{diagonalize_matrix, SpectralData};

/// How a model is realized before diagonalization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Route {
    /// Full `2^N` product space.
    Dense,
    /// Group-spin blocks with multiplicities.
    #[default]
    Sectors,
}

/// One diagonalized block occurring `multiplicity` times.
#[derive(Clone, Debug)]
pub struct ThermalBlock {
    pub multiplicity: f64,
    pub hamiltonian: CMat,
    pub spectrum: SpectralData,
    pub total_spin: Option<SpinOperatorSet>,
}

/// A Hamiltonian as a multiset of diagonalized blocks, with `beta = 1`.
#[derive(Clone, Debug)]
pub struct ThermalSystem {
    pub n_sites: usize,
    pub blocks: Vec<ThermalBlock>,
}

/// An operator given block by block, compatible with a [`ThermalSystem`].
#[derive(Clone, Debug)]
pub struct Observable {
    pub blocks: Vec<CMat>,
}

impl Observable {
    pub fn single(a: &HermitianOperator) -> Self {
        Observable {
            blocks: vec![a.matrix().clone()],
        }
    }

    pub fn map(&self, f: impl Fn(&CMat) -> CMat) -> Observable {
        Observable {
            blocks: self.blocks.iter().map(f).collect(),
        }
    }
}

/// Per-block Boltzmann weights of eigenstates, multiplicity included.
#[derive(Clone, Debug)]
pub struct Weights {
    pub log_z: f64,
    pub blocks: Vec<Vec<f64>>,
}

fn log_partition_from(blocks: &[(f64, Vec<f64>)]) -> f64 {
    let shift = blocks
        .iter()
        .flat_map(|(_, e)| e.iter().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = blocks
        .iter()
        .map(|(m, e)| m * e.iter().map(|x| (x - shift).exp()).sum::<f64>())
        .sum();
    shift + sum.ln()
}

impl ThermalSystem {
    pub fn from_operator(h: &HermitianOperator, n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::invalid("N must be positive"));
        }
        Ok(ThermalSystem {
            n_sites,
            blocks: vec![ThermalBlock {
                multiplicity: 1.0,
                hamiltonian: h.matrix().clone(),
                spectrum: diagonalize_matrix(h.matrix())?,
                total_spin: None,
            }],
        })
    }

    pub fn from_model(spec: &ModelSpec, route: Route) -> Result<Self> {
        let blocks = model_blocks(spec, route)?
            .into_iter()
            .map(|(mult, h, spins)| {
                Ok(ThermalBlock {
                    multiplicity: mult,
                    spectrum: diagonalize_matrix(&h)?,
                    hamiltonian: h,
                    total_spin: Some(spins),
                })
            })
            .collect::<Result<_>>()?;
        Ok(ThermalSystem {
            n_sites: spec.n_sites(),
            blocks,
        })
    }

    pub fn log_partition(&self) -> f64 {
        let parts: Vec<(f64, Vec<f64>)> = self
            .blocks
            .iter()
            .map(|b| (b.multiplicity, b.spectrum.eigenvalues.clone()))
            .collect();
        log_partition_from(&parts)
    }

    /// `p_N = (1/N) log Tr e^H`
    pub fn pressure(&self) -> f64 {
        self.log_partition() / self.n_sites as f64
    }

    pub fn weights(&self) -> Weights {
        let log_z = self.log_partition();
        Weights {
            log_z,
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    b.spectrum
                        .eigenvalues
                        .iter()
                        .map(|e| b.multiplicity * (e - log_z).exp())
                        .collect()
                })
                .collect(),
        }
    }

    /// `M_axis = (2/N) S_axis` in every block.
    pub fn magnetization(&self, axis: Axis) -> Result<Observable> {
        let scale = C64::new(2.0 / self.n_sites as f64, 0.0);
        self.blocks
            .iter()
            .map(|b| {
                let s = match &b.total_spin {
                    Some(s) => s.component(axis).to_dense(),
                    None => {
                        if b.hamiltonian.nrows() != 1usize << self.n_sites {
                            return Err(Error::invalid("no spin operators attached to this block"));
                        }
                        build_total_spin(self.n_sites)?.component(axis).to_dense()
                    }
                };
                Ok(s * scale)
            })
            .collect::<Result<Vec<_>>>()
            .map(|blocks| Observable { blocks })
    }

    pub(crate) fn check(&self, a: &Observable) -> Result<()> {
        if a.blocks.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch {
                expected: self.blocks.len(),
                got: a.blocks.len(),
            });
        }
        for (x, b) in a.blocks.iter().zip(&self.blocks) {
            if x.nrows() != b.spectrum.dim() || x.ncols() != b.spectrum.dim() {
                return Err(Error::DimensionMismatch {
                    expected: b.spectrum.dim(),
                    got: x.nrows(),
                });
            }
        }
        Ok(())
    }

    /// `<A> = Tr e^H A / Tr e^H`
    pub fn gibbs_average(&self, a: &Observable) -> Result<f64> {
        self.check(a)?;
        let w = self.weights();
        Ok(self
            .blocks
            .iter()
            .zip(&a.blocks)
            .zip(&w.blocks)
            .map(|((b, x), wb)| {
                let t = b.spectrum.to_eigenbasis(x);
                wb.iter().enumerate().map(|(k, p)| p * t[(k, k)].re).sum::<f64>()
            })
            .sum())
    }

    /// `<A^2> - <A>^2`, with `A^2` formed in the original basis.
    pub fn thermal_variance(&self, a: &Observable) -> Result<f64> {
        let mean = self.gibbs_average(a)?;
        let sq = a.map(|x| x * x);
        Ok(self.gibbs_average(&sq)? - mean * mean)
    }
}

/// Blocks `(multiplicity, H_block, total spin)` for a model.
pub fn model_blocks(spec: &ModelSpec, route: Route) -> Result<Vec<(f64, CMat, SpinOperatorSet)>> {
    match route {
        Route::Dense => {
            let h = spec.dense()?;
            let spins = build_total_spin(spec.n_sites())?;
            Ok(vec![(1.0, h.operator.into_matrix(), spins)])
        }
        Route::Sectors => {
            let d = CollectiveDecomposition::new(&spec.fields)?;
            d.blocks
                .iter()
                .map(|b| {
                    let field = b.field_term(&d.group_fields);
                    let h = spec.matrix_on(&b.total_spin, &field)?;
                    let h = HermitianOperator::hermitize(h).into_matrix();
                    Ok((b.multiplicity as f64, h, b.total_spin.clone()))
                })
                .collect()
        }
    }
}

/// `log Tr e^H` from eigenvalues only.
pub fn model_log_partition(spec: &ModelSpec, route: Route) -> Result<f64> {
    let parts: Vec<(f64, Vec<f64>)> = model_blocks(spec, route)?
        .into_iter()
        .map(|(m, h, _)| (m, hermitian_eigenvalues(&h)))
        .collect();
    Ok(log_partition_from(&parts))
}

/// `p_N` of a model from eigenvalues only.
pub fn model_pressure(spec: &ModelSpec, route: Route) -> Result<f64> {
    Ok(model_log_partition(spec, route)? / spec.n_sites() as f64)
}

/// `p_N = (1/N) log Tr e^H`, evaluated with a max shift.
pub fn pressure(h: &HermitianOperator, n_sites: usize) -> Result<f64> {
    if n_sites == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let ev = h.eigenvalues();
    Ok(log_partition_from(&[(1.0, ev)]) / n_sites as f64)
}

/// `Tr e^H A / Tr e^H`
pub fn gibbs_average(h: &HermitianOperator, a: &HermitianOperator) -> Result<f64> {
    ThermalSystem::from_operator(h, 1)?.gibbs_average(&Observable::single(a))
}

pub fn thermal_variance(h: &HermitianOperator, a: &HermitianOperator) -> Result<f64> {
    ThermalSystem::from_operator(h, 1)?.thermal_variance(&Observable::single(a))
}
