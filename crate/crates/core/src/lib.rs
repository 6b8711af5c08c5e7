//! Joint planning of drone-camera viewing geometry and free-space-optical
//! link margin under altitude-dependent atmospheric turbulence.
//!
//! The library models the coupling between a nadir-pointing drone camera and
//! the optical downlink it feeds: the camera field of view fixes the flight
//! altitude (for a required ground resolution), the altitude fixes the
//! refractive index structure parameter `C_n²`, and `C_n²` fixes the optical
//! power margin needed to hold a target outage probability over a lognormal
//! fading channel.
//!
//! Modules:
//! - [`turbulence`] — the `C_n²(A)` altitude profile and monotonicity
//!   certification.
//! - [`linkbudget`] — power margin for a target outage, its algebraic
//!   inverse, and the exact lognormal tail used as a cross-check.
//! - [`camera`] — field of view, altitude, swath, and image-resolution
//!   classification.
//! - [`optimizer`] — feasible-FOV analysis, the analytic optimum, a
//!   brute-force grid oracle, and monotone-chain verification.
//! - [`mcvalidate`] — seeded Monte Carlo validation of the margin model.
//!
//! With the default `parallel` feature, Monte Carlo partitions and FOV
//! sweeps run on rayon; disabling it yields a sequential build with
//! identical results.

pub mod camera;
pub mod error;
pub mod linkbudget;
pub mod mcvalidate;
pub mod optimizer;
pub mod turbulence;

pub use error::{Error, Result};
