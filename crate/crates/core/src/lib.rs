//! Numerical lab for matrix summability means of conjugate Fourier series.
//!
//! The crate evaluates conjugate functions and their truncated integral
//! forms, builds matrix means `Σ a_{n,k} S̃_k f`, and compares the observed
//! deviations against modulus-of-continuity based upper bounds.

pub mod cli;
pub mod deviation_harness;
pub mod error;
pub mod fit;
pub mod fourier_engine;
pub mod function_space;
pub mod kernels;
pub mod matrix_lab;
pub mod modulus_models;
pub mod quadrature;

pub use error::{Error, Result};
pub use fit::FitReport;
pub use fourier_engine::FourierData;
pub use function_space::{ModulusCurve, ModulusKind, NormSpace, PeriodicFunction};
pub use matrix_lab::{MatrixFamily, SummabilityMatrix, WeightLaw};
pub use modulus_models::ModulusModel;
