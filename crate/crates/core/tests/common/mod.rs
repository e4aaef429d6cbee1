//! Reference implementations used as test oracles. Deliberately naive.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use hsprune::spectra::Dictionary;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

pub fn unit_dictionary(rng: &mut ChaCha8Rng, bands: usize, atoms: usize) -> Dictionary {
    let mut m = gaussian_matrix(rng, bands, atoms);
    for mut c in m.column_iter_mut() {
        let n = c.norm();
        c /= n;
    }
    let names = (0..atoms).map(|i| format!("a{i}")).collect();
    Dictionary::new(names, m).unwrap()
}

/// Orthonormal `bands × atoms` dictionary from the Q factor of a Gaussian matrix.
pub fn orthonormal_dictionary(rng: &mut ChaCha8Rng, bands: usize, atoms: usize) -> Dictionary {
    let q = gaussian_matrix(rng, bands, atoms).qr().q();
    let names = (0..atoms).map(|i| format!("o{i}")).collect();
    Dictionary::new(names, q.columns(0, atoms).into_owned()).unwrap()
}

/// Accelerated projected gradient (FISTA with adaptive restart) for
/// `min ‖Ax − y‖² s.t. x ≥ 0`, run until the projected-gradient step
/// stalls below `tol` or `max_iter` is hit.
pub fn projected_gradient_nnls(a: &DMatrix<f64>, y: &DVector<f64>, tol: f64, max_iter: usize) -> DVector<f64> {
    let n = a.ncols();
    let gram = a.transpose() * a;
    let aty = a.transpose() * y;
    // Lipschitz constant of the gradient (power iteration on the Gram matrix, padded).
    let mut v = DVector::from_element(n, 1.0);
    let mut lip = 0.0;
    for _ in 0..200 {
        let w = &gram * &v;
        let nw = w.norm();
        if nw == 0.0 {
            return DVector::zeros(n);
        }
        lip = nw / v.norm();
        v = w / nw;
    }
    let step = 1.0 / (1.01 * lip);
    let mut x = DVector::<f64>::zeros(n);
    let mut z = x.clone();
    let mut t = 1.0f64;
    for _ in 0..max_iter {
        let grad = &gram * &z - &aty;
        let next = (&z - grad * step).map(|v| v.max(0.0));
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let moved = (&next - &x).amax();
        // Restart momentum when the objective direction turns uphill.
        let uphill = (&z - &next).dot(&(&next - &x)) > 0.0;
        if uphill {
            z = next.clone();
            t = 1.0;
        } else {
            z = &next + (&next - &x) * ((t - 1.0) / t_next);
            t = t_next;
        }
        x = next;
        if moved < tol && !uphill {
            let grad = &gram * &x - &aty;
            let pg = DVector::from_fn(n, |i, _| if x[i] > 0.0 { grad[i] } else { grad[i].min(0.0) });
            if pg.amax() < tol * aty.amax().max(1.0) {
                break;
            }
        }
    }
    x
}

/// Minimum-norm least squares via the SVD pseudoinverse.
pub fn pinv_lstsq(a: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let cutoff = svd.singular_values.max() * (a.nrows().max(a.ncols()) as f64) * f64::EPSILON;
    svd.pseudo_inverse(cutoff).unwrap() * y
}

pub fn dot_loop(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

pub fn column(m: &DMatrix<f64>, j: usize) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

/// `|⟨aᵢ, y⟩|` for each atom.
pub fn standard_scores_loop(dict: &Dictionary, y: &[f64]) -> Vec<f64> {
    (0..dict.len()).map(|j| dot_loop(&column(dict.matrix(), j), y).abs()).collect()
}

/// `exp(−γ‖aᵢ − y/‖y‖‖²)` for each atom.
pub fn rbf_scores_loop(dict: &Dictionary, y: &[f64], gamma: f64) -> Vec<f64> {
    let norm = dot_loop(y, y).sqrt();
    (0..dict.len())
        .map(|j| {
            let a = column(dict.matrix(), j);
            let mut d2 = 0.0;
            for i in 0..y.len() {
                let diff = a[i] - y[i] / norm;
                d2 += diff * diff;
            }
            (-gamma * d2).exp()
        })
        .collect()
}

/// Residual `Y − A·C` by explicit loops.
pub fn residual_loop(y: &DMatrix<f64>, a: &DMatrix<f64>, c: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, pixels) = y.shape();
    let n = a.ncols();
    let mut out = DMatrix::zeros(p, pixels);
    for px in 0..pixels {
        for b in 0..p {
            let mut s = y[(b, px)];
            for j in 0..n {
                s -= a[(b, j)] * c[(j, px)];
            }
            out[(b, px)] = s;
        }
    }
    out
}

/// Scene mean of `‖y − ŷ‖₁ / p` by explicit loops.
pub fn compression_error_loop(y: &DMatrix<f64>, yhat: &DMatrix<f64>) -> f64 {
    let (p, pixels) = y.shape();
    let mut total = 0.0;
    for px in 0..pixels {
        let mut s = 0.0;
        for b in 0..p {
            s += (y[(b, px)] - yhat[(b, px)]).abs();
        }
        total += s / p as f64;
    }
    total / pixels as f64
}
