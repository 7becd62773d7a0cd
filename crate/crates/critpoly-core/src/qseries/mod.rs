//! q-expansion machinery: exact and word-size-modular truncated Laurent
//! series, plus constructors for the classical modular series.

pub mod classic;
pub mod laurent;
pub mod modseries;

pub use classic::{
    delta_exact, delta_mod, eisenstein4_exact, eisenstein4_mod,
    euler_product_exact, euler_product_mod, form_from_an_exact, form_from_an_mod,
    j_exact, j_mod, j_reciprocal_exact, j_reciprocal_mod,
};
pub use laurent::QSeries;
pub use modseries::{compose_arrays, inv_array, mul_arrays, ModSeries};
