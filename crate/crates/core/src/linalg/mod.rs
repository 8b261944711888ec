//! Exact and floating-point linear algebra shared by the operator and tuple modules.

mod exact;
mod numeric;
mod upoly;

pub use exact::{det_exact, rank_exact_rational, rank_fraction_free_poly, RatMatrix};
pub use numeric::{null_space, numeric_rank, singular_values, smallest_singular_vectors};
pub use upoly::UPoly;
