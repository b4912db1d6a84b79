//! Spin operators, polynomial symbols and their Weyl quantization.

mod blocks;
mod operators;
mod symbol;
mod weyl;

pub use blocks::{admissible_spins, block_degeneracy, BlockSpectrum, Sector, MAX_DEGENERACY_SITES};
pub use operators::{
    build_site_spin, build_total_spin, spin_irrep, Axis, SpinContext, SpinOperatorSet, TwoJ,
    MAX_PRODUCT_SITES,
};
pub use symbol::{
    exponent_triples, multinomial, symbol_eval, ClassicalSymbol, DirectionalTerm, Monomial,
    PolynomialSymbol, MAX_DEGREE,
};
pub use weyl::{weyl_matrix, weyl_ordered_operator};
