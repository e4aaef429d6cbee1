//! USGS spectral-library ASCII files: a title line followed by one value per
//! line. Deleted channels carry a large negative sentinel (`-1.23e34`).

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::spectra::{Dictionary, Spectrum};

/// Values at or below this are missing channels.
pub const MISSING_SENTINEL: f64 = -1e32;

/// Parses one spectrum; returns the title line and the values.
///
/// Missing channels are filled by linear interpolation between the nearest
/// valid neighbours, or copied from the nearest valid value at either end.
pub fn parse_usgs_ascii(text: &str) -> Result<(String, Spectrum)> {
    let mut lines = text.lines().enumerate();
    let title = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((_, l)) => break l.trim().to_string(),
            None => return Err(Error::EmptyFile),
        }
    };

    let mut raw: Vec<Option<f64>> = Vec::new();
    for (idx, line) in lines {
        let field = line.trim();
        if field.is_empty() {
            continue;
        }
        let v: f64 = field.parse().map_err(|_| Error::UnparseableLine {
            line: idx + 1,
            content: field.to_string(),
        })?;
        if !v.is_finite() {
            return Err(Error::UnparseableLine {
                line: idx + 1,
                content: field.to_string(),
            });
        }
        raw.push((v > MISSING_SENTINEL).then_some(v));
    }
    if raw.is_empty() {
        return Err(Error::EmptyFile);
    }
    let values = fill_missing(&raw)?;
    Ok((title, Spectrum::new(values)?))
}

fn fill_missing(raw: &[Option<f64>]) -> Result<Vec<f64>> {
    let valid: Vec<usize> = (0..raw.len()).filter(|&i| raw[i].is_some()).collect();
    let (Some(&first), Some(&last)) = (valid.first(), valid.last()) else {
        return Err(Error::AllMissing);
    };
    let mut out = vec![0.0; raw.len()];
    let mut prev = first;
    for i in 0..raw.len() {
        out[i] = match raw[i] {
            Some(v) => {
                prev = i;
                v
            }
            None if i < first => raw[first].unwrap(),
            None if i > last => raw[last].unwrap(),
            None => {
                let next = (i + 1..raw.len()).find(|&j| raw[j].is_some()).unwrap();
                let (x0, x1) = (raw[prev].unwrap(), raw[next].unwrap());
                let t = (i - prev) as f64 / (next - prev) as f64;
                x0 + t * (x1 - x0)
            }
        };
    }
    Ok(out)
}

/// Spectra loaded from a directory plus the files that failed to parse.
#[derive(Debug)]
pub struct LibraryLoad {
    pub dictionary: Dictionary,
    pub skipped: Vec<(PathBuf, Error)>,
}

/// Loads every `.txt` file in `dir` (sorted by file name) as one atom.
///
/// Files that fail to parse, or whose band count differs from the first
/// parsed file, are skipped and reported.
pub fn load_usgs_dir(dir: impl AsRef<Path>) -> Result<LibraryLoad> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("txt")))
        .collect();
    paths.sort();

    let mut atoms: Vec<(String, Spectrum)> = Vec::new();
    let mut skipped = Vec::new();
    for path in paths {
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                skipped.push((path.clone(), Error::io(&path, e)));
                continue;
            }
        };
        match parse_usgs_ascii(&text) {
            Ok((title, spectrum)) => {
                if let Some((_, first)) = atoms.first() {
                    if first.band_count() != spectrum.band_count() {
                        let err = Error::mismatch("band count", first.band_count(), spectrum.band_count());
                        skipped.push((path, err));
                        continue;
                    }
                }
                atoms.push((title, spectrum));
            }
            Err(e) => skipped.push((path, e)),
        }
    }
    let dictionary = Dictionary::from_spectra(atoms)?;
    Ok(LibraryLoad { dictionary, skipped })
}
