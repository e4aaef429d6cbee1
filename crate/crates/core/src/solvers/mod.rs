//! Dense numerical kernels: NNLS, least squares, matching pursuit and SVD.

mod lstsq;
mod nnls;
mod pursuit;
mod svd;

pub use lstsq::lstsq;
pub use nnls::{nnls, NnlsSolution, KKT_TOLERANCE};
pub use pursuit::{matching_pursuit, PursuitSolution};
pub use svd::{left_singular, thin_svd, ThinSvd};
