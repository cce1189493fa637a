//! Harmonic maps between annuli on conformal surfaces.
//!
//! The crate models rotationally symmetric conformal metrics, solves
//! radial and grid harmonic-map problems between annuli, measures
//! conformal moduli and checks the inequality
//! `ρ₂/ρ₁ ≥ Ψ(ρ₁)·Mod² + 1` with all its supporting diagnostics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comparison;
pub mod error;
pub mod metric;
pub mod minimal;
pub mod modulus;
pub mod numeric;
pub mod pde;
pub mod radial;
pub mod report;

pub use error::{Error, Result};
