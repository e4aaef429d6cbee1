//! Synthetic scenes: random nonnegative mixtures of dictionary atoms with
//! optional additive Gaussian or sign-flip noise.
//!
//! Every pixel draws from its own ChaCha stream keyed by `(seed, pixel)`, so
//! a scene is identical whatever order (or thread) its pixels are built in.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectra::{Dictionary, HyperCube, Spectrum};
use crate::unmix::AbundanceMap;

/// Whether a sign flip applies to a whole atom or to each band separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlipMode {
    #[default]
    Atom,
    Band,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    None,
    /// Additive white Gaussian noise at this per-pixel SNR.
    Awgn { snr_db: f64 },
    /// Each mixed atom is negated with this probability.
    SignFlip { flip_probability: f64, mode: FlipMode },
}

/// Distribution of the nonzero ground-truth coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientDistribution {
    /// Uniform on `(low, high]`.
    Uniform { low: f64, high: f64 },
}

impl Default for CoefficientDistribution {
    fn default() -> Self {
        CoefficientDistribution::Uniform { low: 0.0, high: 1.0 }
    }
}

impl CoefficientDistribution {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            CoefficientDistribution::Uniform { low, high } => {
                // random() is in [0, 1); flip it onto (0, 1].
                let u = 1.0 - rng.random::<f64>();
                low + u * (high - low)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene {
    pub cube: HyperCube,
    pub ground_truth: AbundanceMap,
    pub dictionary: Dictionary,
    pub seed: u64,
    pub noise: NoiseSpec,
}

/// Deterministic RNG for `(seed, domain, index)`.
pub fn substream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(index);
    rng
}

const DOMAIN_PIXELS: u64 = 1;
const DOMAIN_LIBRARY: u64 = 2;
const DOMAIN_PLANT: u64 = 3;

/// Builds a `rows × cols` scene over `dict` with `support_size` random atoms
/// per pixel and uniform `(0, 1]` coefficients.
pub fn synth_scene(
    dict: &Dictionary,
    rows: usize,
    cols: usize,
    support_size: usize,
    noise: NoiseSpec,
    seed: u64,
) -> Result<SyntheticScene> {
    synth_scene_with(dict, rows, cols, support_size, noise, CoefficientDistribution::default(), seed)
}

pub fn synth_scene_with(
    dict: &Dictionary,
    rows: usize,
    cols: usize,
    support_size: usize,
    noise: NoiseSpec,
    coefficients: CoefficientDistribution,
    seed: u64,
) -> Result<SyntheticScene> {
    let n = dict.len();
    if support_size > n {
        return Err(Error::SupportTooLarge {
            support: support_size,
            atoms: n,
        });
    }
    if support_size == 0 {
        return Err(Error::Config("support size must be at least 1".into()));
    }
    if rows == 0 || cols == 0 {
        return Err(Error::Config("scene dimensions must be positive".into()));
    }
    match noise {
        NoiseSpec::SignFlip { flip_probability, .. } => check_probability(flip_probability)?,
        NoiseSpec::Awgn { snr_db } if snr_db.is_nan() => {
            return Err(Error::Config("SNR must be a number".into()))
        }
        _ => {}
    }

    let pixels = rows * cols;
    let results: Vec<Result<(DVector<f64>, DVector<f64>)>> = (0..pixels)
        .into_par_iter()
        .map(|px| {
            let mut rng = substream(seed, DOMAIN_PIXELS, px as u64);
            let mut support = sample(&mut rng, n, support_size).into_vec();
            support.sort_unstable();
            let values: Vec<f64> = support.iter().map(|_| coefficients.draw(&mut rng)).collect();
            let mut beta = DVector::zeros(n);
            for (&i, &v) in support.iter().zip(&values) {
                beta[i] = v;
            }
            let y = match noise {
                NoiseSpec::None => dict.matrix() * &beta,
                NoiseSpec::Awgn { snr_db } => {
                    let clean = dict.matrix() * &beta;
                    apply_awgn(&Spectrum::from_vector(clean)?, snr_db, &mut rng)?.into_inner()
                }
                NoiseSpec::SignFlip { flip_probability, mode } => {
                    apply_sign_flip(dict, &support, &values, flip_probability, mode, &mut rng)?
                        .into_inner()
                }
            };
            Ok((y, beta))
        })
        .collect();

    let mut cube = DMatrix::zeros(dict.band_count(), pixels);
    let mut truth = DMatrix::zeros(n, pixels);
    for (px, r) in results.into_iter().enumerate() {
        let (y, beta) = r?;
        cube.set_column(px, &y);
        truth.set_column(px, &beta);
    }

    Ok(SyntheticScene {
        cube: HyperCube::new(cube, rows, cols)?,
        ground_truth: AbundanceMap {
            data: truth,
            dictionary_names: dict.names().to_vec(),
            sparsity_k: support_size,
            rows,
            cols,
        },
        dictionary: dict.clone(),
        seed,
        noise,
    })
}

/// Adds i.i.d. Gaussian noise with per-band variance `‖y‖² / (p · 10^(snr/10))`.
///
/// An infinite SNR returns `y` unchanged.
pub fn apply_awgn<R: Rng + ?Sized>(y: &Spectrum, snr_db: f64, rng: &mut R) -> Result<Spectrum> {
    let power = y.values().norm_squared();
    if power == 0.0 {
        return Err(Error::ZeroSignal);
    }
    if snr_db == f64::INFINITY {
        return Ok(y.clone());
    }
    let p = y.band_count() as f64;
    let sigma = (power / (p * 10f64.powf(snr_db / 10.0))).sqrt();
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Config(format!("noise scale: {e}")))?;
    let noisy = y.values().map(|v| v + normal.sample(rng));
    Spectrum::from_vector(noisy)
}

/// Mixes `Σ εᵢ βᵢ aᵢ` where each sign is `−1` with `flip_probability`.
///
/// In [`FlipMode::Atom`] one sign is drawn per atom in `support`; in
/// [`FlipMode::Band`] every band of every atom gets its own sign.
pub fn apply_sign_flip<R: Rng + ?Sized>(
    dict: &Dictionary,
    support: &[usize],
    coefficients: &[f64],
    flip_probability: f64,
    mode: FlipMode,
    rng: &mut R,
) -> Result<Spectrum> {
    check_probability(flip_probability)?;
    if support.len() != coefficients.len() {
        return Err(Error::mismatch("sign-flip coefficients", support.len(), coefficients.len()));
    }
    if let Some(&bad) = support.iter().find(|&&i| i >= dict.len()) {
        return Err(Error::mismatch("sign-flip atom index", dict.len(), bad));
    }
    let p = dict.band_count();
    let mut y = DVector::zeros(p);
    for (&i, &beta) in support.iter().zip(coefficients) {
        let atom = dict.atom(i);
        match mode {
            FlipMode::Atom => {
                let sign = if rng.random::<f64>() < flip_probability { -1.0 } else { 1.0 };
                y.axpy(sign * beta, &atom, 1.0);
            }
            FlipMode::Band => {
                for b in 0..p {
                    let sign = if rng.random::<f64>() < flip_probability { -1.0 } else { 1.0 };
                    y[b] += sign * beta * atom[b];
                }
            }
        }
    }
    Spectrum::from_vector(y)
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// A library of smooth, positive, reflectance-like spectra, unit-normalized.
///
/// Each atom is a sloped continuum carrying a few Gaussian absorption bands,
/// with 1% multiplicative per-band texture so that atoms stay linearly
/// independent even when many share features.
pub fn synthetic_library(atoms: usize, bands: usize, seed: u64) -> Result<Dictionary> {
    if atoms == 0 || bands == 0 {
        return Err(Error::Config("library needs at least one atom and one band".into()));
    }
    let texture = Normal::new(0.0, 0.01).expect("valid normal");
    let columns: Vec<DVector<f64>> = (0..atoms)
        .map(|j| {
            let mut rng = substream(seed, DOMAIN_LIBRARY, j as u64);
            let base = 0.3 + 0.4 * rng.random::<f64>();
            let slope = 0.3 * rng.random::<f64>();
            let features = rng.random_range(2..6);
            let params: Vec<(f64, f64, f64)> = (0..features)
                .map(|_| {
                    (
                        rng.random::<f64>(),
                        0.01 + 0.08 * rng.random::<f64>(),
                        0.5 * rng.random::<f64>(),
                    )
                })
                .collect();
            let denom = (bands.max(2) - 1) as f64;
            DVector::from_fn(bands, |b, _| {
                let x = b as f64 / denom;
                let mut v = base + slope * x;
                for &(center, width, depth) in &params {
                    v *= 1.0 - depth * (-(x - center).powi(2) / (2.0 * width * width)).exp();
                }
                v * (1.0 + texture.sample(&mut rng))
            })
        })
        .collect();
    let names = (0..atoms).map(|j| format!("syn-{j:04}")).collect();
    Dictionary::new(names, DMatrix::from_columns(&columns))?.normalize()
}

/// Adds `rank` random signatures orthogonal to the dictionary's span, mixed
/// into every pixel with weights uniform on `(0, scale]`.
///
/// Returns the modified cube and the orthonormal `p × rank` signature matrix.
/// Requires `dict.len() + rank ≤ p`.
pub fn plant_out_of_dictionary(
    cube: &HyperCube,
    dict: &Dictionary,
    rank: usize,
    scale: f64,
    seed: u64,
) -> Result<(HyperCube, DMatrix<f64>)> {
    let p = dict.band_count();
    if cube.band_count() != p {
        return Err(Error::mismatch("cube band count", p, cube.band_count()));
    }
    if dict.len() + rank > p {
        return Err(Error::Config(format!(
            "cannot plant {rank} signatures outside the span of {} atoms in {p} bands",
            dict.len()
        )));
    }
    let (span, _) = dict.gram_schmidt(crate::spectra::GRAM_SCHMIDT_TOLERANCE)?;
    let mut basis: Vec<DVector<f64>> = span.matrix().column_iter().map(|c| c.into_owned()).collect();
    let span_len = basis.len();
    let standard = Normal::new(0.0, 1.0).expect("valid normal");
    let mut rng = substream(seed, DOMAIN_PLANT, 0);
    while basis.len() < span_len + rank {
        let mut v = DVector::from_fn(p, |_, _| standard.sample(&mut rng));
        for _pass in 0..2 {
            for q in &basis {
                let proj = q.dot(&v);
                v.axpy(-proj, q, 1.0);
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / norm);
        }
    }
    let signatures = DMatrix::from_columns(&basis[span_len..]);

    let mut data = cube.matrix().clone();
    for px in 0..cube.pixel_count() {
        let mut prng = substream(seed, DOMAIN_PLANT, 1 + px as u64);
        for j in 0..rank {
            let w = scale * (1.0 - prng.random::<f64>());
            let mut col = data.column_mut(px);
            col.axpy(w, &signatures.column(j), 1.0);
        }
    }
    Ok((HyperCube::new(data, cube.rows(), cube.cols())?, signatures))
}

/// Draws a fresh `u64` from `rng`; used to derive replication seeds.
pub fn derive_seed(seed: u64, domain: u64, index: u64) -> u64 {
    substream(seed, domain, index).next_u64()
}
