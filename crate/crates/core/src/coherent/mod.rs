//! Bloch coherent states, their symbols and coherent-state quantization of continuous symbols.

mod sectors;
mod sphere;
mod states;
mod symbol;

pub use sectors::{
    assemble_hv_blocks, berezin_lieb_bounds, coherent_matrix_on, duffield_error, quadrature_for_spin,
    sector_isometries, upper_symbol_operator, BerezinLieb, DuffieldError, DEFAULT_EXTRA_DEGREE,
    MAX_COHERENT_PRODUCT_SITES,
    RESOLUTION_TOLERANCE,
};
pub use sphere::{SphereNode, SphereQuadrature};
pub use states::{coherent_vector, lower_symbol, resolution_check};
pub use symbol::CoherentSymbol;
