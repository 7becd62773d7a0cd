//! Hilbert class polynomials and their ingredients: reduced binary
//! quadratic forms of negative discriminant, arbitrary-precision real and
//! complex floats, and the retrying high-precision product over singular
//! moduli with exact integer rounding.

pub mod bigfloat;
pub mod forms;
pub mod hilbert;

pub use bigfloat::{BigComplex, BigFloat};
pub use forms::{class_number, reduced_forms, validate_discriminant, ReducedForm};
pub use hilbert::{
    hilbert_class_poly, hilbert_class_poly_cached, hilbert_class_poly_with,
    HilbertConfig,
};
