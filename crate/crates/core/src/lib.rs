//! Exact point-line incidence statistics for Cartesian products `A×A` in
//! the affine plane over a prime field.
//!
//! The crate enumerates all `p^2 + p` lines, builds the histogram of the
//! incidence function `i(ℓ)`, and evaluates its moments exactly: the number
//! of collinear triples `T(A) = Σ i(ℓ)^3` and quadruples `Q(A) = Σ i(ℓ)^4`.
//! Around that core sit brute-force oracles, product-representation
//! statistics, exact bound checks and an experiment harness.

pub mod bounds;
pub mod divisor;
pub mod engine;
pub mod error;
pub mod exact;
pub mod field;
pub mod harness;
pub mod histogram;
pub mod ntt;
pub mod oracle;
pub mod rng;
pub mod sets;

pub use engine::{incidence_count, incidence_histogram, incidence_histogram_par, slope_profile, Line, ProfileStrategy, Strategy};
pub use error::{Error, Result};
pub use field::{mod_inv, validate_prime, PrimeModulus};
pub use histogram::{IncidenceHistogram, MomentSet};
pub use sets::{FieldSubset, Provenance, SetDescriptor};
