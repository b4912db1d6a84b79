//! Exact block decomposition for fields that repeat across sites.
//!
//! Sites sharing a field vector form a group. Any model built from the total
//! spin and the group fields commutes with permutations inside each group, so
//! the product space splits into tensor products of group irreps `⊗_g V_{J_g}`,
//! each occurring `prod_g M_{n_g, J_g}` times.

use crate::disorder::FieldRealization;
use crate::error::{Error, Result};
use crate::linalg::{SparseOperator, Vec3};
use crate::spin_algebra::{
    admissible_spins, block_degeneracy, spin_irrep, SpinContext, SpinOperatorSet, TwoJ,
};

/// Largest block dimension the decomposition will materialize.
pub const MAX_BLOCK_DIM: usize = 1 << 12;

/// One block `⊗_g V_{J_g}` with its multiplicity.
#[derive(Clone, Debug)]
pub struct CollectiveBlock {
    pub two_js: Vec<TwoJ>,
    pub multiplicity: u128,
    /// Spin of each group lifted to the block.
    pub group_spins: Vec<SpinOperatorSet>,
    pub total_spin: SpinOperatorSet,
}

impl CollectiveBlock {
    pub fn dim(&self) -> usize {
        self.total_spin.dim()
    }

    /// `2 sum_g <b_g, S_g>`
    pub fn field_term(&self, group_fields: &[Vec3]) -> SparseOperator {
        let mut out = SparseOperator::zeros(self.dim());
        for (s, b) in self.group_spins.iter().zip(group_fields) {
            out = out.plus(&s.linear_form(b.map(|x| 2.0 * x)));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct CollectiveDecomposition {
    pub n_sites: usize,
    pub group_fields: Vec<Vec3>,
    pub group_sizes: Vec<usize>,
    pub blocks: Vec<CollectiveBlock>,
}

impl CollectiveDecomposition {
    pub fn new(r: &FieldRealization) -> Result<Self> {
        let groups = r.groups();
        let group_fields: Vec<Vec3> = groups.iter().map(|g| g.0).collect();
        let group_sizes: Vec<usize> = groups.iter().map(|g| g.1).collect();
        let largest: usize = group_sizes
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n + 1))
            .unwrap_or(usize::MAX);
        if largest > MAX_BLOCK_DIM {
            return Err(Error::SizeLimit {
                what: "collective block dimension",
                value: largest,
                limit: MAX_BLOCK_DIM,
            });
        }
        let irreps: Vec<Vec<(TwoJ, u128, SpinOperatorSet)>> = group_sizes
            .iter()
            .map(|&n| {
                admissible_spins(n)
                    .into_iter()
                    .map(|tj| Ok((tj, block_degeneracy(n, tj)?, spin_irrep(tj))))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;

        let mut blocks = Vec::new();
        let mut choice = vec![0usize; irreps.len()];
        loop {
            blocks.push(build_block(&irreps, &choice));
            let mut g = 0;
            loop {
                if g == choice.len() {
                    return Ok(CollectiveDecomposition {
                        n_sites: r.n_sites,
                        group_fields,
                        group_sizes,
                        blocks,
                    });
                }
                choice[g] += 1;
                if choice[g] < irreps[g].len() {
                    break;
                }
                choice[g] = 0;
                g += 1;
            }
        }
    }

    /// `sum_blocks multiplicity * dim`, which must equal `2^N`.
    pub fn total_dim(&self) -> u128 {
        self.blocks
            .iter()
            .map(|b| b.multiplicity * b.dim() as u128)
            .sum()
    }
}

fn build_block(irreps: &[Vec<(TwoJ, u128, SpinOperatorSet)>], choice: &[usize]) -> CollectiveBlock {
    let picked: Vec<&(TwoJ, u128, SpinOperatorSet)> =
        irreps.iter().zip(choice).map(|(v, &c)| &v[c]).collect();
    let dims: Vec<usize> = picked.iter().map(|p| p.0.dim()).collect();
    let two_js: Vec<TwoJ> = picked.iter().map(|p| p.0).collect();
    let context = SpinContext::Collective {
        two_js: two_js.clone(),
    };
    let group_spins: Vec<SpinOperatorSet> = (0..picked.len())
        .map(|g| {
            let left: usize = dims[..g].iter().product();
            let right: usize = dims[g + 1..].iter().product();
            let lift = |op: &SparseOperator| {
                SparseOperator::identity(left)
                    .kron(op)
                    .kron(&SparseOperator::identity(right))
            };
            let comps = picked[g].2.components();
            SpinOperatorSet::from_parts(
                context.clone(),
                [lift(&comps[0]), lift(&comps[1]), lift(&comps[2])],
            )
        })
        .collect();
    let dim: usize = dims.iter().product();
    let zero = SpinOperatorSet::from_parts(
        context.clone(),
        [
            SparseOperator::zeros(dim),
            SparseOperator::zeros(dim),
            SparseOperator::zeros(dim),
        ],
    );
    let total_spin = group_spins
        .iter()
        .fold(zero, |acc, s| acc.plus(s, context.clone()));
    CollectiveBlock {
        two_js,
        multiplicity: picked.iter().map(|p| p.1).product(),
        group_spins,
        total_spin,
    }
}
