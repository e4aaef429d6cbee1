//! Spectra, dictionaries of named atoms, and hypercubes.
//!
//! A [`Dictionary`] stores its atoms as the columns of a `p × N` matrix so
//! that pruning, least squares and reconstruction can work on it directly.
//! A [`HyperCube`] stores one spectrum per column, pixels enumerated in
//! row-major order (pixel `(i, j)` is column `i * cols + j`).

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector, DVectorView};

use crate::error::{Error, Result};

/// Atoms with L2 norm at or below this are treated as zero.
pub const ZERO_ATOM_TOLERANCE: f64 = 1e-10;

/// Default relative drop tolerance for [`Dictionary::gram_schmidt`].
pub const GRAM_SCHMIDT_TOLERANCE: f64 = 1e-8;

/// A measurement over `p` bands.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(DVector<f64>);

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(values))
    }

    pub fn from_vector(values: DVector<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::mismatch("spectrum band count", 1, 0));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("spectrum"));
        }
        Ok(Spectrum(values))
    }

    pub fn band_count(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }
}

/// Report from [`Dictionary::gram_schmidt`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GramSchmidtReport {
    /// Names of atoms dropped as numerically dependent, in input order.
    pub dropped: Vec<String>,
}

/// Options for [`Dictionary::hadamard_augment`].
#[derive(Debug, Clone, Copy)]
pub struct AugmentOptions {
    /// Include repeated factors such as `a*a`.
    pub self_products: bool,
    /// Upper bound on the atom count of the augmented dictionary.
    pub max_atoms: Option<usize>,
}

impl Default for AugmentOptions {
    fn default() -> Self {
        AugmentOptions {
            self_products: true,
            max_atoms: None,
        }
    }
}

/// Report from [`Dictionary::hadamard_augment`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AugmentReport {
    /// Number of products added.
    pub added: usize,
    /// Number of products skipped because they were (near) zero.
    pub skipped_zero: usize,
}

/// Ordered, named collection of atoms sharing one band grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    names: Vec<String>,
    atoms: DMatrix<f64>,
}

impl Dictionary {
    /// Builds a dictionary from a `p × N` matrix whose columns are atoms.
    ///
    /// Rejects empty input, mismatched name counts, duplicate names, non-finite
    /// entries and zero atoms.
    pub fn new(names: Vec<String>, atoms: DMatrix<f64>) -> Result<Self> {
        if atoms.ncols() == 0 || atoms.nrows() == 0 {
            return Err(Error::EmptyDictionary);
        }
        if names.len() != atoms.ncols() {
            return Err(Error::mismatch("dictionary names", atoms.ncols(), names.len()));
        }
        if atoms.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dictionary"));
        }
        let mut seen = HashSet::with_capacity(names.len());
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        for (j, name) in names.iter().enumerate() {
            if atoms.column(j).norm() <= ZERO_ATOM_TOLERANCE {
                return Err(Error::ZeroAtom(name.clone()));
            }
        }
        Ok(Dictionary { names, atoms })
    }

    pub fn from_spectra(atoms: Vec<(String, Spectrum)>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(Error::EmptyDictionary);
        };
        let p = first.1.band_count();
        let mut matrix = DMatrix::zeros(p, atoms.len());
        let mut names = Vec::with_capacity(atoms.len());
        for (j, (name, spectrum)) in atoms.into_iter().enumerate() {
            if spectrum.band_count() != p {
                return Err(Error::mismatch("atom band count", p, spectrum.band_count()));
            }
            matrix.set_column(j, spectrum.values());
            names.push(name);
        }
        Dictionary::new(names, matrix)
    }

    pub fn band_count(&self) -> usize {
        self.atoms.nrows()
    }

    pub fn len(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.ncols() == 0
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The `p × N` atom matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.atoms
    }

    pub fn atom(&self, index: usize) -> DVectorView<'_, f64> {
        self.atoms.column(index)
    }

    /// Columns `indices` as a dense `p × |indices|` matrix.
    pub fn columns(&self, indices: &[usize]) -> DMatrix<f64> {
        self.atoms.select_columns(indices)
    }

    /// True when every atom has unit norm within `tolerance`.
    pub fn is_normalized(&self, tolerance: f64) -> bool {
        self.atoms
            .column_iter()
            .all(|col| (col.norm() - 1.0).abs() <= tolerance)
    }

    /// Scales every atom to unit L2 norm, keeping order, names and direction.
    pub fn normalize(&self) -> Result<Dictionary> {
        let mut atoms = self.atoms.clone();
        for (j, mut col) in atoms.column_iter_mut().enumerate() {
            let norm = col.norm();
            if norm <= ZERO_ATOM_TOLERANCE {
                return Err(Error::ZeroAtom(self.names[j].clone()));
            }
            // Re-dividing an already unit column can move it by an ulp; leave it.
            if norm != 1.0 {
                col /= norm;
            }
        }
        Ok(Dictionary {
            names: self.names.clone(),
            atoms,
        })
    }

    /// Orthonormalizes the atoms with modified Gram-Schmidt.
    ///
    /// Atoms are processed in order; each is projected against the already
    /// accepted atoms one at a time, twice, to keep orthogonality near machine
    /// precision. An atom whose remaining norm falls below `tolerance` times its
    /// original norm is dropped and listed in the report.
    pub fn gram_schmidt(&self, tolerance: f64) -> Result<(Dictionary, GramSchmidtReport)> {
        if !(tolerance > 0.0) {
            return Err(Error::Config(format!(
                "Gram-Schmidt tolerance must be positive, got {tolerance}"
            )));
        }
        let p = self.band_count();
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(self.len().min(p));
        let mut names = Vec::new();
        let mut report = GramSchmidtReport::default();

        for (j, name) in self.names.iter().enumerate() {
            let mut v: DVector<f64> = self.atoms.column(j).into_owned();
            let original = v.norm();
            for _pass in 0..2 {
                for q in &basis {
                    let proj = q.dot(&v);
                    v.axpy(-proj, q, 1.0);
                }
            }
            let remaining = v.norm();
            if remaining < tolerance * original || remaining <= ZERO_ATOM_TOLERANCE {
                report.dropped.push(name.clone());
                continue;
            }
            v /= remaining;
            basis.push(v);
            names.push(name.clone());
        }

        if basis.is_empty() {
            return Err(Error::EmptyResult);
        }
        let atoms = DMatrix::from_columns(&basis);
        Ok((Dictionary { names, atoms }, report))
    }

    /// Appends renormalized elementwise products of atoms.
    ///
    /// For every multiset of `2..=max_order` atoms (taken in lexicographic
    /// order of their sorted index tuples) the product is added as a new atom
    /// named by joining the factor names with `*`. Products whose norm is at
    /// most [`ZERO_ATOM_TOLERANCE`] are skipped and counted.
    pub fn hadamard_augment(
        &self,
        max_order: usize,
        options: AugmentOptions,
    ) -> Result<(Dictionary, AugmentReport)> {
        if max_order < 2 {
            return Err(Error::Config(format!(
                "max_order must be at least 2, got {max_order}"
            )));
        }
        if let Some(j) = self
            .atoms
            .column_iter()
            .position(|col| (col.norm() - 1.0).abs() > 1e-12)
        {
            return Err(Error::NotNormalized(self.names[j].clone()));
        }

        let n = self.len();
        let mut requested = n as u128;
        for order in 2..=max_order {
            let count = if options.self_products {
                binomial(n as u128 + order as u128 - 1, order as u128)
            } else {
                binomial(n as u128, order as u128)
            };
            requested = requested.saturating_add(count);
        }
        if let Some(cap) = options.max_atoms {
            if requested > cap as u128 {
                return Err(Error::CombinatorialLimit {
                    requested: usize::try_from(requested).unwrap_or(usize::MAX),
                    cap,
                });
            }
        }

        let mut columns: Vec<DVector<f64>> =
            self.atoms.column_iter().map(|c| c.into_owned()).collect();
        let mut names = self.names.clone();
        let mut report = AugmentReport::default();

        for order in 2..=max_order {
            for_each_multiset(n, order, options.self_products, |tuple| {
                let mut product = self.atoms.column(tuple[0]).into_owned();
                for &idx in &tuple[1..] {
                    product.component_mul_assign(&self.atoms.column(idx));
                }
                let norm = product.norm();
                if norm <= ZERO_ATOM_TOLERANCE {
                    report.skipped_zero += 1;
                    return;
                }
                product /= norm;
                columns.push(product);
                names.push(
                    tuple
                        .iter()
                        .map(|&i| self.names[i].as_str())
                        .collect::<Vec<_>>()
                        .join("*"),
                );
                report.added += 1;
            });
        }

        let atoms = DMatrix::from_columns(&columns);
        Ok((Dictionary::new(names, atoms)?, report))
    }

    /// Reads the `name,v1,...,vp` CSV layout.
    pub fn read_csv<R: Read>(reader: R) -> Result<Dictionary> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 || &headers[0] != "name" {
            return Err(Error::Malformed(
                "dictionary CSV header must start with `name`".into(),
            ));
        }
        let p = headers.len() - 1;
        let mut atoms = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != p + 1 {
                return Err(Error::mismatch("dictionary CSV row width", p + 1, record.len()));
            }
            let values = record
                .iter()
                .skip(1)
                .map(|field| {
                    field.trim().parse::<f64>().map_err(|_| Error::UnparseableLine {
                        line: row + 2,
                        content: field.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            atoms.push((record[0].to_string(), Spectrum::new(values)?));
        }
        Dictionary::from_spectra(atoms)
    }

    /// Writes the `name,v1,...,vp` CSV layout with round-trip float formatting.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        let mut header = Vec::with_capacity(self.band_count() + 1);
        header.push("name".to_string());
        header.extend((1..=self.band_count()).map(|b| format!("v{b}")));
        wtr.write_record(&header)?;
        for (j, name) in self.names.iter().enumerate() {
            let mut record = Vec::with_capacity(self.band_count() + 1);
            record.push(name.clone());
            record.extend(self.atoms.column(j).iter().map(|v| format!("{v:?}")));
            wtr.write_record(&record)?;
        }
        wtr.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Dictionary> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Dictionary::read_csv(std::io::BufReader::new(file))
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Visits sorted index tuples of length `order` over `0..n` in lexicographic
/// order; repeated indices are allowed when `repeats` is set.
fn for_each_multiset(n: usize, order: usize, repeats: bool, mut visit: impl FnMut(&[usize])) {
    if order == 0 || n == 0 {
        return;
    }
    let mut tuple: Vec<usize> = if repeats {
        vec![0; order]
    } else {
        if order > n {
            return;
        }
        (0..order).collect()
    };
    loop {
        visit(&tuple);
        // Advance the rightmost position that still has room.
        let mut pos = order;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            let limit = if repeats { n - 1 } else { n - order + pos };
            if tuple[pos] < limit {
                break;
            }
        }
        tuple[pos] += 1;
        for i in pos + 1..order {
            tuple[i] = if repeats { tuple[pos] } else { tuple[i - 1] + 1 };
        }
    }
}

/// A `p × rows × cols` hyperspectral image, one spectrum per pixel column.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperCube {
    data: DMatrix<f64>,
    rows: usize,
    cols: usize,
}

impl HyperCube {
    /// Wraps a `p × (rows·cols)` matrix of pixel spectra.
    pub fn new(data: DMatrix<f64>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || data.nrows() == 0 {
            return Err(Error::Malformed("hypercube dimensions must be positive".into()));
        }
        if data.ncols() != rows * cols {
            return Err(Error::mismatch("hypercube pixel count", rows * cols, data.ncols()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("hypercube"));
        }
        Ok(HyperCube { data, rows, cols })
    }

    /// Builds a cube from band-major values: `values[b*rows*cols + i*cols + j]`.
    pub fn from_band_major(band_count: usize, rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        let pixels = rows * cols;
        if values.len() != band_count * pixels {
            return Err(Error::mismatch("hypercube value count", band_count * pixels, values.len()));
        }
        let data = DMatrix::from_fn(band_count, pixels, |b, px| values[b * pixels + px]);
        HyperCube::new(data, rows, cols)
    }

    pub fn zeros(band_count: usize, rows: usize, cols: usize) -> Self {
        HyperCube {
            data: DMatrix::zeros(band_count, rows * cols),
            rows,
            cols,
        }
    }

    pub fn band_count(&self) -> usize {
        self.data.nrows()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixel_count(&self) -> usize {
        self.data.ncols()
    }

    pub fn pixel_index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn pixel(&self, index: usize) -> DVectorView<'_, f64> {
        self.data.column(index)
    }

    pub fn value(&self, band: usize, row: usize, col: usize) -> f64 {
        self.data[(band, self.pixel_index(row, col))]
    }

    /// The `p × (rows·cols)` pixel matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn to_band_major(&self) -> Vec<f64> {
        let pixels = self.pixel_count();
        let mut out = Vec::with_capacity(self.data.len());
        for b in 0..self.band_count() {
            for px in 0..pixels {
                out.push(self.data[(b, px)]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dict(cols: &[&[f64]]) -> Dictionary {
        let names = (0..cols.len()).map(|i| format!("a{i}")).collect();
        let vecs: Vec<_> = cols.iter().map(|c| DVector::from_column_slice(c)).collect();
        Dictionary::new(names, DMatrix::from_columns(&vecs)).unwrap()
    }

    #[test]
    fn normalize_scales_to_unit() {
        let d = dict(&[&[3.0, 4.0], &[1.0, 0.0]]).normalize().unwrap();
        assert_eq!(d.atom(0).as_slice(), &[0.6, 0.8]);
        assert_eq!(d.atom(1).as_slice(), &[1.0, 0.0]);
        assert_eq!(d.names(), &["a0", "a1"]);
    }

    #[test]
    fn zero_atom_rejected() {
        let m = DMatrix::from_column_slice(2, 1, &[0.0, 0.0]);
        let err = Dictionary::new(vec!["z".into()], m).unwrap_err();
        assert!(matches!(err, Error::ZeroAtom(ref n) if n == "z"));
    }

    #[test]
    fn normalize_rejects_tiny_atom() {
        let d = Dictionary {
            names: vec!["tiny".into()],
            atoms: DMatrix::from_column_slice(2, 1, &[1e-11, 0.0]),
        };
        assert!(matches!(d.normalize(), Err(Error::ZeroAtom(_))));
    }

    #[test]
    fn duplicate_names_rejected() {
        let m = DMatrix::identity(2, 2);
        let err = Dictionary::new(vec!["x".into(), "x".into()], m).unwrap_err();
        assert!(matches!(err, Error::DuplicateName(_)));
    }

    #[test]
    fn gram_schmidt_orthonormal_input_unchanged() {
        let d = dict(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let (g, report) = d.gram_schmidt(GRAM_SCHMIDT_TOLERANCE).unwrap();
        assert_eq!(g, d);
        assert!(report.dropped.is_empty());
    }

    #[test]
    fn gram_schmidt_projects_second_atom() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (g, _) = dict(&[&[1.0, 0.0], &[s, s]])
            .gram_schmidt(GRAM_SCHMIDT_TOLERANCE)
            .unwrap();
        assert!((g.atom(1)[0]).abs() < 1e-15);
        assert!((g.atom(1)[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gram_schmidt_drops_dependent_atom() {
        let d = Dictionary {
            names: vec!["a".into(), "b".into()],
            atoms: DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 1e-13, 0.0]),
        };
        let (g, report) = d.gram_schmidt(GRAM_SCHMIDT_TOLERANCE).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(report.dropped, vec!["b".to_string()]);
    }

    #[test]
    fn gram_schmidt_drops_parallel_atom_and_keeps_going() {
        let (g, report) = dict(&[&[1.0, 1.0, 0.0], &[2.0, 2.0, 0.0], &[0.0, 1.0, 1.0]])
            .gram_schmidt(GRAM_SCHMIDT_TOLERANCE)
            .unwrap();
        assert_eq!(g.names(), &["a0", "a2"]);
        assert_eq!(report.dropped, vec!["a1".to_string()]);
    }

    #[test]
    fn hadamard_pair() {
        let d = dict(&[&[0.6, 0.8], &[0.8, 0.6]]);
        let (aug, report) = d
            .hadamard_augment(2, AugmentOptions { self_products: false, max_atoms: None })
            .unwrap();
        assert_eq!(aug.len(), 3);
        assert_eq!(aug.names()[2], "a0*a1");
        // 0.48 * [1, 1] normalized
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((aug.atom(2)[0] - s).abs() < 1e-15);
        assert_eq!(report, AugmentReport { added: 1, skipped_zero: 0 });
    }

    #[test]
    fn hadamard_disjoint_support_skipped() {
        let d = dict(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let (aug, report) = d
            .hadamard_augment(2, AugmentOptions { self_products: false, max_atoms: None })
            .unwrap();
        assert_eq!(aug.len(), 2);
        assert_eq!(report.skipped_zero, 1);
    }

    #[test]
    fn hadamard_three_atoms_counts() {
        let d = dict(&[&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]])
            .normalize()
            .unwrap();
        let no_self = AugmentOptions { self_products: false, max_atoms: None };
        let (aug, _) = d.hadamard_augment(2, no_self).unwrap();
        assert_eq!(aug.len(), 6);
        assert_eq!(&aug.names()[3..], &["a0*a1", "a0*a2", "a1*a2"]);

        let (aug, _) = d.hadamard_augment(2, AugmentOptions::default()).unwrap();
        assert_eq!(aug.len(), 9);
        assert_eq!(
            &aug.names()[3..],
            &["a0*a0", "a0*a1", "a0*a2", "a1*a1", "a1*a2", "a2*a2"]
        );
        let (aug, _) = d.hadamard_augment(3, no_self).unwrap();
        assert_eq!(aug.names().last().unwrap(), "a0*a1*a2");
        assert_eq!(aug.len(), 7);
    }

    #[test]
    fn hadamard_cap_enforced() {
        let d = dict(&[&[1.0, 1.0], &[1.0, 2.0], &[2.0, 1.0]]).normalize().unwrap();
        let err = d
            .hadamard_augment(3, AugmentOptions { self_products: true, max_atoms: Some(10) })
            .unwrap_err();
        // 3 + 6 + 10
        assert!(matches!(err, Error::CombinatorialLimit { requested: 19, cap: 10 }));
    }

    #[test]
    fn hadamard_requires_normalized() {
        let d = dict(&[&[3.0, 4.0]]);
        assert!(matches!(
            d.hadamard_augment(2, AugmentOptions::default()),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn multiset_enumeration_matches_counts() {
        for n in 1..6 {
            for order in 1..4 {
                let mut with = 0u128;
                for_each_multiset(n, order, true, |t| {
                    assert!(t.windows(2).all(|w| w[0] <= w[1]));
                    with += 1;
                });
                assert_eq!(with, binomial((n + order - 1) as u128, order as u128));
                let mut without = 0u128;
                for_each_multiset(n, order, false, |t| {
                    assert!(t.windows(2).all(|w| w[0] < w[1]));
                    without += 1;
                });
                assert_eq!(without, binomial(n as u128, order as u128));
            }
        }
    }

    #[test]
    fn csv_round_trip_with_awkward_name() {
        let d = Dictionary::new(
            vec!["plain".into(), "with, comma".into()],
            DMatrix::from_column_slice(3, 2, &[0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, -0.0]),
        )
        .unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("name,v1,v2,v3\n"));
        let back = Dictionary::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.names(), d.names());
        for (a, b) in back.matrix().iter().zip(d.matrix().iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn cube_band_major_layout() {
        // p = 2, rows = 1, cols = 2
        let cube = HyperCube::from_band_major(2, 1, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(cube.pixel(0).as_slice(), &[1.0, 3.0]);
        assert_eq!(cube.pixel(1).as_slice(), &[2.0, 4.0]);
        assert_eq!(cube.value(1, 0, 1), 4.0);
        assert_eq!(cube.to_band_major(), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn spectrum_rejects_nan() {
        assert!(matches!(Spectrum::new(vec![1.0, f64::NAN]), Err(Error::NonFinite(_))));
    }
}
