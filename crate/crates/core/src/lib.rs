//! A numerical laboratory for Fourier restriction estimates of singular
//! measures on the torus: discretized measures, convolution powers,
//! regularity exponents, restriction-norm probes and inequality checkers.

pub mod artifact;
pub mod balls;
pub mod config;
pub mod error;
pub mod exponent;
pub mod fit;
pub mod grid;
pub mod measure;
pub mod norms;
pub mod probe;
pub mod regularity;
pub mod spectral;
pub mod verify;

pub use config::{ExperimentConfig, ProbeConfig, Tolerances};
pub use error::{Error, Result};
pub use exponent::{Exponent, Rational};
pub use measure::DiscreteMeasure;
