use crate::error::{Error, Result};

use super::operators::TwoJ;

/// Upper limit on `N` for exact degeneracy arithmetic.
pub const MAX_DEGENERACY_SITES: usize = 120;

/// One total-spin sector of `N` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sector {
    pub two_j: TwoJ,
    pub multiplicity: u128,
    pub block_dim: usize,
}

/// Sectors of `N` qubits in decreasing `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpectrum {
    pub n_sites: usize,
    pub sectors: Vec<Sector>,
}

impl BlockSpectrum {
    pub fn new(n_sites: usize) -> Result<Self> {
        let sectors = admissible_spins(n_sites)
            .into_iter()
            .map(|tj| {
                Ok(Sector {
                    two_j: tj,
                    multiplicity: block_degeneracy(n_sites, tj)?,
                    block_dim: tj.dim(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(BlockSpectrum { n_sites, sectors })
    }

    pub fn total_dim(&self) -> u128 {
        self.sectors
            .iter()
            .map(|s| s.multiplicity * s.block_dim as u128)
            .sum()
    }
}

/// `J = N/2, N/2 - 1, ...` down to 0 or 1/2.
pub fn admissible_spins(n_sites: usize) -> Vec<TwoJ> {
    (0..=n_sites as u32)
        .rev()
        .filter(|tj| (n_sites as u32 - tj).is_multiple_of(2))
        .map(TwoJ)
        .collect()
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (1..=k).fold(1u128, |acc, i| acc * (n - k + i) / i)
}

/// Number of spin-`J` irreps in `N` qubits: `(2J+1)/(N+1) C(N+1, N/2+J+1)`.
pub fn block_degeneracy(n_sites: usize, two_j: TwoJ) -> Result<u128> {
    if n_sites > MAX_DEGENERACY_SITES {
        return Err(Error::SizeLimit {
            what: "N",
            value: n_sites,
            limit: MAX_DEGENERACY_SITES,
        });
    }
    let n = n_sites as u128;
    let tj = u128::from(two_j.0);
    if tj > n || !(n - tj).is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "J = {} is not admissible for N = {n_sites}",
            two_j.spin()
        )));
    }
    let c = binomial(n + 1, (n + tj) / 2 + 1);
    Ok((tj + 1) * c / (n + 1))
}
