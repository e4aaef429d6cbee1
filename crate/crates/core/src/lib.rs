//! Sparse hyperspectral unmixing.
//!
//! Each pixel spectrum is explained as a nonnegative combination of a few
//! dictionary atoms: atoms are scored against the pixel (by plain correlation
//! or by a Gaussian RBF kernel), the top `k` are kept, and non-negative least
//! squares fits their abundances. What the dictionary cannot explain can be
//! captured scene-wide by compression vectors, the leading singular vectors
//! of the residual. Matching pursuit is included as a baseline, and
//! [`bench`] regenerates the noise, sparsity and compression sweeps on
//! synthetic scenes.

pub mod bench;
mod binio;
pub mod compress;
pub mod datagen;
pub mod error;
pub mod pruning;
pub mod solvers;
pub mod spectra;
pub mod unmix;

pub use error::{Error, Result};
pub use pruning::PruneMethod;
pub use spectra::{Dictionary, HyperCube, Spectrum};
pub use unmix::{AbundanceMap, Method};
