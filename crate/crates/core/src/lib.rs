//! Rank-2 better-behaved GKZ hypergeometric systems.
//!
//! For the cone `C` over the segment from `(0,1)` to `(n,1)` this crate builds:
//!
//! - contour/residue solutions of `bbGKZ(C,0)` and `bbGKZ(C°,0)` ([`contour`]),
//! - the explicit duality pairing between the two solution spaces ([`pairing`]),
//! - orbifold cohomology `H`, `H^c` of the toric stacks attached to simplicial
//!   subdivisions of `C`, the Euler pairing `χ_H` and its closed-form inverse
//!   ([`cohomology`]),
//! - `H`/`H^c`-valued Gamma-series solutions and the duality identity
//!   `⟨Γ,Γ°⟩ = -(n/4π²) χ_H⁻¹` ([`gamma`]),
//! - numerical monodromy: root tracking along parameter loops and pairing
//!   invariance ([`monodromy`]),
//! - a verification harness with JSON reports ([`verifier`]).
//!
//! Numeric kernels are generic over the floating scalar via [`scalar::Real`]
//! (`f32` or `f64`); the cohomology algebra is generic over its coefficient
//! ring via [`scalar::Coeff`] (exact rationals, the quadratic extension
//! [`exact::QuadRat`], or complex floats). The aliases below fix the concrete
//! types used by the CLI and the acceptance suite.

pub mod cohomology;
pub mod config;
pub mod contour;
pub mod error;
pub mod exact;
pub mod fan;
pub mod gamma;
pub mod gammafn;
pub mod monodromy;
pub mod pairing;
pub mod poly;
pub mod quadrature;
pub mod scalar;
pub mod verifier;

pub use error::Error;

/// Default floating scalar.
pub type R64 = f64;
/// Default complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Exact rational scalar for the cohomology side.
pub type Rat = num_rational::BigRational;

/// Solution table over the default scalar.
pub type SolutionTable64 = contour::SolutionTable<f64>;
/// `H`-element over the default complex scalar.
pub type HElement64 = cohomology::HElement<C64>;
/// `H^c`-element over the default complex scalar.
pub type HcElement64 = cohomology::HcElement<C64>;
/// Exact `H`-element over big rationals.
pub type HElementRat = cohomology::HElement<Rat>;
/// Pairing tensor over the default complex scalar.
pub type PairingTensor64 = cohomology::PairingTensor<C64>;
