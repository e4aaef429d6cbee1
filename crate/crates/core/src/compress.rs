//! Compression vectors: capture the residual left after unmixing with the
//! leading left singular vectors of the pooled residual matrix.
//!
//! The scene container (`HSCZ`) layout, all little-endian:
//!
//! ```text
//! magic "HSCZ" | version u16 | p, rows, cols, N, c: u32
//! N × (len u32, UTF-8 bytes)          dictionary names
//! p·c f64                             basis, column-major
//! c f64                               singular values
//! count u32, count × (pixel u32, row u32, value f64)   nonzero abundances
//! ```

use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, WriteBytesExt};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::binio::ByteCursor;
use crate::error::{Error, Result};
use crate::pruning::PruneMethod;
use crate::solvers::{left_singular, lstsq};
use crate::spectra::{Dictionary, HyperCube};
use crate::unmix::{unmix_cube, AbundanceMap, Method, PixelDiagnostic};

pub const SCENE_MAGIC: [u8; 4] = *b"HSCZ";
pub const SCENE_VERSION: u16 = 1;

/// `p × c` orthonormal compression vectors with their singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionBasis {
    pub vectors: DMatrix<f64>,
    pub singular_values: DVector<f64>,
}

impl CompressionBasis {
    pub fn empty(band_count: usize) -> Self {
        CompressionBasis {
            vectors: DMatrix::zeros(band_count, 0),
            singular_values: DVector::zeros(0),
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.ncols() == 0
    }

    /// The first `c` vectors.
    pub fn truncate(&self, c: usize) -> CompressionBasis {
        let c = c.min(self.len());
        CompressionBasis {
            vectors: self.vectors.columns(0, c).into_owned(),
            singular_values: self.singular_values.rows(0, c).into_owned(),
        }
    }
}

/// How residual coefficients on the compression vectors are fit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ResidualFit {
    /// Signed least squares on all `c` vectors.
    #[default]
    Unconstrained,
    /// Pruned NNLS on the vectors with sparsity `c`, as the two-pass
    /// abundance-then-residual recipe states it literally.
    PrunedNnls(PruneMethod),
}

/// Dictionary abundances followed by compression-vector coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedScene {
    /// `(N + c) × (rows·cols)`.
    pub abundances: DMatrix<f64>,
    pub basis: CompressionBasis,
    pub dictionary_names: Vec<String>,
    pub rows: usize,
    pub cols: usize,
    pub diagnostics: Vec<PixelDiagnostic>,
}

impl CompressedScene {
    pub fn atom_count(&self) -> usize {
        self.dictionary_names.len()
    }

    /// `[A U] · Γ`.
    pub fn reconstruct(&self, dict: &Dictionary) -> Result<HyperCube> {
        let n = self.atom_count();
        if dict.len() != n {
            return Err(Error::mismatch("dictionary size", n, dict.len()));
        }
        let c = self.basis.len();
        let mut out = dict.matrix() * self.abundances.rows(0, n);
        if c > 0 {
            out += &self.basis.vectors * self.abundances.rows(n, c);
        }
        HyperCube::new(out, self.rows, self.cols)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let p = self.basis.vectors.nrows();
        let n = self.atom_count();
        let c = self.basis.len();
        let io = |e| Error::io("<scene stream>", e);
        w.write_all(&SCENE_MAGIC).map_err(io)?;
        w.write_u16::<LittleEndian>(SCENE_VERSION).map_err(io)?;
        for v in [p, self.rows, self.cols, n, c] {
            w.write_u32::<LittleEndian>(to_u32(v)?).map_err(io)?;
        }
        for name in &self.dictionary_names {
            w.write_u32::<LittleEndian>(to_u32(name.len())?).map_err(io)?;
            w.write_all(name.as_bytes()).map_err(io)?;
        }
        for v in self.basis.vectors.iter() {
            w.write_f64::<LittleEndian>(*v).map_err(io)?;
        }
        for v in self.basis.singular_values.iter() {
            w.write_f64::<LittleEndian>(*v).map_err(io)?;
        }
        let triplets: Vec<(usize, usize, f64)> = self
            .abundances
            .column_iter()
            .enumerate()
            .flat_map(|(px, col)| {
                col.iter()
                    .enumerate()
                    .filter(|(_, v)| v.to_bits() != 0)
                    .map(move |(row, v)| (px, row, *v))
                    .collect::<Vec<_>>()
            })
            .collect();
        w.write_u32::<LittleEndian>(to_u32(triplets.len())?).map_err(io)?;
        for (px, row, v) in triplets {
            w.write_u32::<LittleEndian>(px as u32).map_err(io)?;
            w.write_u32::<LittleEndian>(row as u32).map_err(io)?;
            w.write_f64::<LittleEndian>(v).map_err(io)?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<CompressedScene> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)
            .map_err(|e| Error::io("<scene stream>", e))?;
        let mut cur = ByteCursor::new(&bytes);

        let magic = cur.array::<4>()?;
        if magic != SCENE_MAGIC {
            return Err(Error::BadMagic {
                expected: SCENE_MAGIC,
                found: magic,
            });
        }
        let version = cur.u16()?;
        if version != SCENE_VERSION {
            return Err(Error::VersionUnsupported(version));
        }
        let p = cur.u32()? as usize;
        let rows = cur.u32()? as usize;
        let cols = cur.u32()? as usize;
        let n = cur.u32()? as usize;
        let c = cur.u32()? as usize;
        let pixels = rows * cols;

        let mut names = Vec::with_capacity(n);
        for _ in 0..n {
            let len = cur.u32()? as usize;
            let raw = cur.take(len)?;
            let name = String::from_utf8(raw.to_vec())
                .map_err(|_| Error::Malformed("dictionary name is not UTF-8".into()))?;
            names.push(name);
        }
        let basis_values = cur.f64s(p * c)?;
        let vectors = DMatrix::from_column_slice(p, c, &basis_values);
        let singular_values = DVector::from_vec(cur.f64s(c)?);

        let count = cur.u32()? as usize;
        let mut abundances = DMatrix::zeros(n + c, pixels);
        for _ in 0..count {
            let px = cur.u32()? as usize;
            let row = cur.u32()? as usize;
            let v = cur.f64()?;
            if px >= pixels || row >= n + c {
                return Err(Error::Malformed(format!(
                    "abundance entry ({row}, {px}) outside {}×{pixels}",
                    n + c
                )));
            }
            abundances[(row, px)] = v;
        }
        cur.finish()?;

        Ok(CompressedScene {
            abundances,
            basis: CompressionBasis {
                vectors,
                singular_values,
            },
            dictionary_names: names,
            rows,
            cols,
            diagnostics: Vec::new(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(std::io::BufWriter::new(file))
            .map_err(|e| relabel_io(e, path))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<CompressedScene> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        CompressedScene::read_from(std::io::BufReader::new(file)).map_err(|e| relabel_io(e, path))
    }
}

/// Per-pixel `y − A c`.
pub fn residual_cube(cube: &HyperCube, dict: &Dictionary, abundances: &AbundanceMap) -> Result<HyperCube> {
    if cube.band_count() != dict.band_count() {
        return Err(Error::mismatch("cube band count", dict.band_count(), cube.band_count()));
    }
    if abundances.data.nrows() != dict.len() {
        return Err(Error::mismatch("abundance rows", dict.len(), abundances.data.nrows()));
    }
    if abundances.data.ncols() != cube.pixel_count() {
        return Err(Error::mismatch("abundance pixels", cube.pixel_count(), abundances.data.ncols()));
    }
    let residual = cube.matrix() - dict.matrix() * &abundances.data;
    HyperCube::new(residual, cube.rows(), cube.cols())
}

/// Leading `c` left singular vectors of the `p × (rows·cols)` residual matrix.
pub fn compression_basis(residuals: &HyperCube, c: usize) -> Result<CompressionBasis> {
    let max = residuals.band_count().min(residuals.pixel_count());
    if c < 1 || c > max {
        return Err(Error::CTooLarge { c, max });
    }
    if residuals.matrix().iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroResidual);
    }
    let (vectors, singular_values) = left_singular(residuals.matrix(), c)?;
    Ok(CompressionBasis {
        vectors,
        singular_values,
    })
}

/// Unmixing followed by compression vectors, with the residual coefficients
/// appended after the dictionary abundances. `c = 0` skips the basis.
pub fn compress_scene(
    cube: &HyperCube,
    dict: &Dictionary,
    k: usize,
    c: usize,
    method: Method,
    fit: ResidualFit,
) -> Result<CompressedScene> {
    let unmixed = unmix_cube(cube, dict, k, method)?;
    let residuals = residual_cube(cube, dict, &unmixed.map)?;
    let basis = if c == 0 {
        CompressionBasis::empty(cube.band_count())
    } else {
        compression_basis(&residuals, c)?
    };
    let mut scene = attach_basis(&unmixed.map, &residuals, &basis, fit)?;
    let mut diagnostics = unmixed.diagnostics;
    diagnostics.append(&mut scene.diagnostics);
    scene.diagnostics = diagnostics;
    Ok(scene)
}

/// Fits residual coefficients against a given basis and stacks them under
/// the abundances.
pub fn attach_basis(
    abundances: &AbundanceMap,
    residuals: &HyperCube,
    basis: &CompressionBasis,
    fit: ResidualFit,
) -> Result<CompressedScene> {
    let n = abundances.data.nrows();
    let c = basis.len();
    let pixels = residuals.pixel_count();
    if abundances.data.ncols() != pixels {
        return Err(Error::mismatch("abundance pixels", pixels, abundances.data.ncols()));
    }
    let mut stacked = DMatrix::zeros(n + c, pixels);
    stacked.rows_mut(0, n).copy_from(&abundances.data);
    let mut diagnostics = Vec::new();

    if c > 0 {
        let coefficients: DMatrix<f64> = match fit {
            ResidualFit::Unconstrained => {
                let cols: Vec<Result<DVector<f64>>> = (0..pixels)
                    .into_par_iter()
                    .map(|px| lstsq(&basis.vectors, &residuals.pixel(px).into_owned()))
                    .collect();
                let mut m = DMatrix::zeros(c, pixels);
                for (px, col) in cols.into_iter().enumerate() {
                    m.set_column(px, &col?);
                }
                m
            }
            ResidualFit::PrunedNnls(prune) => {
                let names = (1..=c).map(|i| format!("cv{i}")).collect();
                let vectors = Dictionary::new(names, basis.vectors.clone())?;
                let out = unmix_cube(residuals, &vectors, c, Method::Pnnls(prune))?;
                diagnostics = out.diagnostics;
                out.map.data
            }
        };
        stacked.rows_mut(n, c).copy_from(&coefficients);
    }

    Ok(CompressedScene {
        abundances: stacked,
        basis: basis.clone(),
        dictionary_names: abundances.dictionary_names.clone(),
        rows: residuals.rows(),
        cols: residuals.cols(),
        diagnostics,
    })
}

/// Mean absolute per-band error, per pixel and averaged over the scene.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionError {
    pub per_pixel: Vec<f64>,
    pub scene_mean: f64,
}

/// `‖y − ŷ‖₁ / p` per pixel and its mean over pixels.
pub fn compression_error(cube: &HyperCube, reconstruction: &HyperCube) -> Result<CompressionError> {
    if cube.band_count() != reconstruction.band_count() {
        return Err(Error::mismatch("band count", cube.band_count(), reconstruction.band_count()));
    }
    if cube.pixel_count() != reconstruction.pixel_count() {
        return Err(Error::mismatch("pixel count", cube.pixel_count(), reconstruction.pixel_count()));
    }
    let p = cube.band_count() as f64;
    let per_pixel: Vec<f64> = (0..cube.pixel_count())
        .map(|px| (cube.pixel(px) - reconstruction.pixel(px)).lp_norm(1) / p)
        .collect();
    let scene_mean = per_pixel.iter().sum::<f64>() / per_pixel.len() as f64;
    Ok(CompressionError {
        per_pixel,
        scene_mean,
    })
}

fn to_u32(v: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Malformed(format!("{v} does not fit in u32")))
}

fn relabel_io(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    }
}
