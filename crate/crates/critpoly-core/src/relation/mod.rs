//! Relation solvers: given two modular functions as q-series, find the
//! minimal bivariate polynomial relating them and extract the critical
//! polynomial from its slices.

pub mod dense;
pub mod orderbasis;
pub mod yang;

pub use dense::{assemble_critical_mod, dense_relation_mod, DenseParams, DenseRelation};
pub use orderbasis::{
    bounded_kernel_elimination, minimal_approximant_basis, row_annihilates,
    ApproximantRow, OrderBasis,
};
pub use yang::{assemble_critical_yang_mod, yang_relation, yang_relation_mod};
