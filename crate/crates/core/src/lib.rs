//! Reproducing kernels of polyanalytic function spaces over rotation-invariant
//! measures on the complex plane.
//!
//! A rotation-invariant measure `ν` is described by its radial-squared profile
//! `μ` on `[0, ∞)` ([`MeasureSpec`]). From the moments `s_d = ∫ t^d dμ` the
//! crate builds orthonormal polynomials for the shifted measures `x^d dμ`
//! ([`orthopoly`]), sums the kernel series of the order-`q` space
//! ([`kernelseries`]), and evaluates the closed forms available for the
//! weighted Bergman and Fock profiles ([`closedform`]). The [`verify`] module
//! carries a Gauss quadrature engine built from the same polynomials and the
//! checks used to cross-validate the two routes.
//!
//! The crate is `no_std` and only needs an allocator; the `std` feature
//! switches float math from `libm` to the platform implementation.
//!
//! ```
//! use num_complex::Complex64;
//! use polykernel_core::{closedform, KernelParams, MeasureSpec, SeriesKernel};
//!
//! let params = KernelParams::new(MeasureSpec::bergman(0.0).unwrap(), 2).unwrap();
//! let kernel = SeriesKernel::new(params);
//! let z = Complex64::new(0.3, 0.1);
//! let w = Complex64::new(-0.2, 0.4);
//! let series = kernel.eval(z, w).unwrap().value;
//! let closed = closedform::bergman_kernel(0.0, 2, z, w).unwrap();
//! assert!((series - closed).norm() < 1e-10 * closed.norm());
//! ```
#![no_std]
// negated comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod closedform;
mod error;
pub mod exact;
pub mod kernelseries;
pub mod linalg;
pub mod measures;
pub mod orthopoly;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use kernelseries::{
    KernelParams, ReproducingKernel, SeriesKernel, SeriesValue, TruncationPolicy,
};
pub use measures::{Atom, MeasureSpec, SupportRadius};
pub use orthopoly::OrthoBasis;

pub use num_complex::Complex64;
