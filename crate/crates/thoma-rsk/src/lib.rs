//! Generalized RSK over Thoma-parameter alphabets.
//!
//! The alphabet `A = L_e ∪ L_o ∪ G` mixes two families of discrete letters
//! (row letters `x_i` with masses `α_i`, column letters `y_j` with masses
//! `β_j`) with a continuous block `G` of total mass `γ`. A generalized
//! Robinson–Schensted–Knuth insertion maps random words over `A` to Young
//! diagrams; the push-forward of the product Bernoulli measure is the
//! coherent measure `M_n` attached to the extremal character with Thoma
//! parameters `(α, β, γ)`.
//!
//! The crate provides:
//!
//! * the insertion algorithm, its inverse, the transposed variant, and
//!   brute-force Greene invariants as an independent oracle ([`rsk`],
//!   [`greene`]);
//! * exact finite-size measures through the specialization of Schur
//!   functions, with coherency and poissonization ([`exact`]);
//! * seeded samplers, alphabet amalgamation, and the finite-alphabet
//!   reduction ([`sampling`]);
//! * the reflecting random walk, two-letter word restriction and its
//!   bump-order transform, and the conditional-Gaussian covariance
//!   ([`walk`], [`transform`], [`conditional`]);
//! * Monte Carlo experiment harnesses for the row/column central limit
//!   theorem, drift boundedness, the law of large numbers, and their
//!   poissonized variants ([`stats`]);
//! * self-contained verification suites for the structural identities the
//!   experiments rely on ([`verify`]).

pub mod alphabet;
pub mod conditional;
pub mod diagram;
pub mod error;
pub mod exact;
pub mod greene;
pub mod params;
pub mod rsk;
pub mod sampling;
pub mod series;
pub mod stats;
pub mod tableau;
pub mod transform;
pub mod verify;
pub mod walk;

/// Scalar type used by all probability computations.
pub type Real = f64;

/// Truncated power series over [`Real`].
pub type Series = series::TruncatedSeries<Real>;

pub use alphabet::{Letter, LinearOrder, Relation, Word};
pub use diagram::YoungDiagram;
pub use error::Error;
pub use params::ThomaParams;
pub use rsk::{rsk, rsk_inverse, transposed_rsk, RskOutput};
pub use tableau::{InsertionTableau, StandardTableau};

/// Largest diagram size for which exact measures are computed.
pub const EXACT_SIZE_CAP: usize = 20;

/// Largest filling size accepted by the tableau-counting enumeration.
pub const TABLEAU_COUNT_CAP: usize = 12;

/// Largest word length accepted by the brute-force Greene oracle.
pub const GREENE_CAP: usize = 10;

/// Largest step count for the exact walk-expectation iteration.
pub const WALK_EXACT_CAP: usize = 10_000;
