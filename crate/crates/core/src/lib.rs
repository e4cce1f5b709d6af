//! Electrostatics and design of surface-electrode (SE) rf ion traps in the
//! gapless-plane approximation.
//!
//! The crate is organised bottom-up:
//!
//! * [`units`] holds the trap operating parameters and the derived scales
//!   (`q0`, `U0`, bias strength, secular frequencies).
//! * [`surface_field`] evaluates potentials and fields of planar electrode
//!   patches through solid angles and Biot–Savart boundary integrals.
//! * [`fourier`] propagates surface spectra away from the electrode plane.
//! * [`ring`] designs ring traps and computes their strength and depth.
//! * [`complex2d`] is the 2-D complex-potential toolbox (Pólya fields,
//!   strip electrodes, the Möbius cylinder map, multipole transport).
//! * [`multipole`] builds translationally symmetric SE multipole guides.
//! * [`depth`] locates intrinsic saddles exactly via polynomial roots.
//! * [`effpot`] assembles the effective potential and optimises the rf bias.

pub mod complex2d;
pub mod depth;
pub mod effpot;
mod error;
pub mod fourier;
pub mod landscape;
pub mod multipole;
pub mod poly;
pub mod quad;
pub mod ring;
pub mod surface_field;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use units::{ScaleFactors, TrapParams};
