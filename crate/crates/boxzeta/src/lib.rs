//! Point counts, CM newform coefficients, and L-functions for the cuboid
//! surface.
//!
//! The object of study is the projective surface in P^6 cut out by
//!
//! ```text
//! a1^2 + b1^2 = c^2,  a2^2 + b2^2 = c^2,  a3^2 + b3^2 = c^2,
//! a1^2 + a2^2 + a3^2 = c^2,
//! ```
//!
//! whose rational points with all coordinates nonzero are perfect cuboids
//! (all three edges, all three face diagonals, and the body diagonal
//! rational). No such point is known; the arithmetic route to that question
//! runs through the zeta function of the surface, and this crate computes it
//! numerically from first principles:
//!
//! - [`ffield`]: quadratic characters, square-counting tables, and F_{p^2}
//!   arithmetic.
//! - [`counting`]: O(p^3) character-sum point counts of the surface, counts
//!   of the genus-5 curve linking it to elliptic curves, its 48 singular
//!   points, and the resolved model.
//! - [`cmforms`]: coefficients of the six CM newforms of weights 2 and 3 and
//!   levels 8 to 64 built from two-squares decompositions, plus the
//!   conjugate pair extracted from curve counts.
//! - [`tracefit`]: the trace-of-Frobenius identity expressing the surface
//!   count through those coefficients, exact integer re-derivation of its
//!   multiplicities (3, 1, 3, 10, 2, 1, 3), and the Picard-rank bookkeeping.
//! - [`lfunc`]: local Euler factors, the degree-30 product for H^2, the
//!   degree-78 products for the resolved surface under either exceptional
//!   action, Dirichlet coefficients, and truncated values.
//! - [`store`]: a file-backed cache so repeated runs skip the cubic kernels.
//!
//! Everything downstream of the point counts is exact integer arithmetic;
//! floating point appears only in truncated Euler-product values and purity
//! checks. The unique bad prime 2 is excluded throughout and marked, never
//! silently skipped.

pub mod cmforms;
pub mod counting;
pub mod ffield;
pub mod lfunc;
pub mod store;
pub mod tracefit;

pub use cmforms::{
    ap, ap_with, extract_g_pair, qexp, qexp_with, CmError, CoeffPair, Coefficient, FormId,
    GaussianInt, H16InertConvention,
};
pub use counting::{
    count_curve_x, count_singular, count_surface_brute, count_surface_fast, CmCurve, CountError,
    CountMethod, CountRecord, ExceptionalAction, VarietyId,
};
pub use ffield::{odd_primes_upto, FieldError, PrimeContext, QuadChar};
pub use lfunc::{
    aggregate_factor, dirichlet_coeffs, euler_factor, evaluate_partial, export_table, EulerFactor,
    ExportRow, ExportTable, LComponent, LSpec, LTerm, LfuncError, PartialValue,
};
pub use store::{CacheKey, CacheValue, Store};
pub use tracefit::{
    fit_multiplicities, fit_report, verify_identity, Conventions, FitError, FitReport,
    MultiplicityVector, PicardSplit, PicardSplits,
};
