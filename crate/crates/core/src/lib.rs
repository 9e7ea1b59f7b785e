//! Computational toolkit for embedding ultradistributions into Colombeau-type
//! algebras: Gevrey weights and mollifiers, ε-nets, growth classification,
//! Paley–Wiener regularity tests and generalized wave front sets.

pub mod bb;
pub mod distributions;
pub mod estimators;
pub mod error;
pub mod fourier;
pub mod growth;
pub mod io;
pub mod microlocal;
pub mod mollifier;
pub mod nets;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
