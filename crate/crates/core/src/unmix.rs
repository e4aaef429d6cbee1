//! Per-pixel pruned NNLS over a hypercube.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pruning::{select_top_k, PruneMethod};
use crate::solvers::{matching_pursuit, nnls};
use crate::spectra::{Dictionary, HyperCube};

/// How a pixel's coefficients are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Prune to `k` atoms, then NNLS on the survivors.
    Pnnls(PruneMethod),
    /// `k` steps of matching pursuit; coefficients may be negative.
    MatchingPursuit,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Pnnls(PruneMethod::Standard) => "pnnls_standard",
            Method::Pnnls(PruneMethod::Rbf { .. }) => "pnnls_rbf",
            Method::MatchingPursuit => "mp",
        }
    }
}

/// Coefficients for one pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelFit {
    /// Dense, length N.
    pub coefficients: DVector<f64>,
    /// Atoms that survived pruning (or were picked by MP), ascending.
    pub selected: Vec<usize>,
    pub residual_norm: f64,
}

/// `N × rows × cols` coefficient array, one column per pixel.
///
/// Maps produced by PNNLS are nonnegative with at most `sparsity_k` nonzeros
/// per pixel; matching-pursuit maps share the sparsity bound but are signed.
#[derive(Debug, Clone, PartialEq)]
pub struct AbundanceMap {
    pub data: DMatrix<f64>,
    pub dictionary_names: Vec<String>,
    pub sparsity_k: usize,
    pub rows: usize,
    pub cols: usize,
}

impl AbundanceMap {
    pub fn pixel(&self, index: usize) -> DVector<f64> {
        self.data.column(index).into_owned()
    }

    pub fn pixel_count(&self) -> usize {
        self.data.ncols()
    }
}

/// A pixel that failed to solve; its abundances were zero-filled.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelDiagnostic {
    pub pixel: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unmixing {
    pub map: AbundanceMap,
    pub diagnostics: Vec<PixelDiagnostic>,
}

/// Scores atoms, keeps the top `k`, and solves NNLS on them.
pub fn pnnls_pixel(
    y: &DVector<f64>,
    dict: &Dictionary,
    k: usize,
    method: PruneMethod,
) -> Result<PixelFit> {
    check_k(k, dict.len())?;
    let scores = method.score(dict, y)?;
    let selected = select_top_k(&scores, k)?;
    let solution = nnls(&dict.columns(&selected), y)?;
    let mut coefficients = DVector::zeros(dict.len());
    for (&i, &c) in selected.iter().zip(solution.coefficients.iter()) {
        coefficients[i] = c;
    }
    Ok(PixelFit {
        coefficients,
        selected,
        residual_norm: solution.residual_norm,
    })
}

/// `k` steps of matching pursuit over the full dictionary.
pub fn mp_pixel(y: &DVector<f64>, dict: &Dictionary, k: usize) -> Result<PixelFit> {
    check_k(k, dict.len())?;
    if y.len() != dict.band_count() {
        return Err(Error::mismatch("measurement band count", dict.band_count(), y.len()));
    }
    let solution = matching_pursuit(dict.matrix(), y, k)?;
    let mut selected = solution.support.clone();
    selected.sort_unstable();
    Ok(PixelFit {
        coefficients: solution.dense(dict.len()),
        selected,
        residual_norm: solution.residual_norm,
    })
}

pub fn unmix_pixel(y: &DVector<f64>, dict: &Dictionary, k: usize, method: Method) -> Result<PixelFit> {
    match method {
        Method::Pnnls(prune) => pnnls_pixel(y, dict, k, prune),
        Method::MatchingPursuit => mp_pixel(y, dict, k),
    }
}

/// Applies [`pnnls_pixel`] to every pixel.
pub fn pnnls_cube(cube: &HyperCube, dict: &Dictionary, k: usize, method: PruneMethod) -> Result<Unmixing> {
    unmix_cube(cube, dict, k, Method::Pnnls(method))
}

/// Unmixes every pixel independently, in parallel.
///
/// Structural problems (band mismatch, bad `k`, bad γ) fail the call. A pixel
/// whose solve fails is zero-filled and reported in `diagnostics`.
pub fn unmix_cube(cube: &HyperCube, dict: &Dictionary, k: usize, method: Method) -> Result<Unmixing> {
    if cube.band_count() != dict.band_count() {
        return Err(Error::mismatch("cube band count", dict.band_count(), cube.band_count()));
    }
    check_k(k, dict.len())?;
    if let Method::Pnnls(PruneMethod::Rbf { gamma }) = method {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::NonPositiveGamma(gamma));
        }
    }

    Ok(collect_pixels(cube, dict, k, |y| unmix_pixel(y, dict, k, method)))
}

fn collect_pixels<F>(cube: &HyperCube, dict: &Dictionary, k: usize, solve: F) -> Unmixing
where
    F: Fn(&DVector<f64>) -> Result<PixelFit> + Sync,
{
    let fits: Vec<Result<PixelFit>> = (0..cube.pixel_count())
        .into_par_iter()
        .map(|px| solve(&cube.pixel(px).into_owned()))
        .collect();

    let mut data = DMatrix::zeros(dict.len(), cube.pixel_count());
    let mut diagnostics = Vec::new();
    for (px, fit) in fits.into_iter().enumerate() {
        match fit {
            Ok(fit) => data.set_column(px, &fit.coefficients),
            Err(e) => diagnostics.push(PixelDiagnostic {
                pixel: px,
                message: e.to_string(),
            }),
        }
    }

    Unmixing {
        map: AbundanceMap {
            data,
            dictionary_names: dict.names().to_vec(),
            sparsity_k: k,
            rows: cube.rows(),
            cols: cube.cols(),
        },
        diagnostics,
    }
}

/// Per-pixel `A · c`.
pub fn reconstruct(abundances: &AbundanceMap, dict: &Dictionary) -> Result<HyperCube> {
    if abundances.data.nrows() != dict.len() {
        return Err(Error::mismatch("abundance rows", dict.len(), abundances.data.nrows()));
    }
    HyperCube::new(dict.matrix() * &abundances.data, abundances.rows, abundances.cols)
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(())
}
