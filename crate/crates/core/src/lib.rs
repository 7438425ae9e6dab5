//! Exact computations around the Roberts–Kuroda locally nilpotent derivation
//!
//! `δ(x_i) = 0, δ(y_i) = x_i², δ(y_{n+1}) = x_1⋯x_n` on
//! `B = k[x_1..x_n, y_1..y_{n+1}]`.
//!
//! * [`poly`]: sparse multivariate polynomials with canonical ordering.
//! * [`derivation`]: derivations given by generator images, kernel checks and
//!   a degree-truncated kernel oracle.
//! * [`kernel_gens`]: the kernel generators `f_{1,n+1}`, `f_{i,j}` and the
//!   decomposition of kernel elements of `k[x_2..x_n, y_2..y_n]`.
//! * [`invariant`]: construction of kernel elements
//!   `x_1 y_{n+1}^ℓ + (lower terms in y_{n+1})` with a checkable trace.
//! * [`delta_module`]: the module derivation on the differential module.
//! * [`serial`]: the shared JSON formats.
//!
//! All algebra is generic over the coefficient [`Scalar`]; the aliases below
//! pin it to arbitrary-precision rationals, which is what the kernel
//! computations require.

pub mod delta_module;
pub mod derivation;
pub mod invariant;
pub mod kernel_gens;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod serial;

pub use scalar::{ExactScalar, Scalar};

/// Arbitrary-precision rationals, the coefficient field `k`.
pub type Q = num_rational::BigRational;

pub type QPolynomial = poly::Polynomial<Q>;
pub type QDerivation = derivation::Derivation<Q>;
pub type QKernelBasis = derivation::KernelBasis<Q>;
pub type QKernelCombination = kernel_gens::KernelCombination<Q>;
pub type QCertificate = invariant::InvariantCertificate<Q>;
pub type QModuleElement = delta_module::FreeModuleElement<Q>;
pub type QModuleDerivation = delta_module::ModuleDerivation<Q>;
