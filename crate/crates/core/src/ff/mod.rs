//! Exact arithmetic in F_p and F_{p^r}.

mod ext;
mod factor;
mod field;
pub mod poly;

pub use ext::{make_ext_field, ExtElem, ExtField};
pub use factor::{
    distinct_degree, equal_degree, factor_poly, find_roots_in_ext, is_irreducible, roots_in_ext,
    square_free_decomposition, Factorization,
};
pub use field::{FiniteField, PrimeField};
pub use poly::{Poly, PolyFp};
