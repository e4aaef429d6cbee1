//! Lawson–Hanson active-set non-negative least squares.

use nalgebra::{DMatrix, DVector};

use super::lstsq::lstsq;
use crate::error::{Error, Result};

/// Relative KKT tolerance used by [`NnlsSolution::satisfies_kkt`].
pub const KKT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution {
    pub coefficients: DVector<f64>,
    pub residual_norm: f64,
    /// Outer active-set iterations (variables moved into the passive set).
    pub iterations: usize,
    /// Worst KKT margin: `|gᵢ|` over positive coefficients and `max(0, −gᵢ)`
    /// over zero coefficients, where `g = Aᵀ(Ac − y)`.
    pub kkt_violation: f64,
    /// `‖Aᵀy‖∞`, the scale the violation is judged against.
    pub gradient_scale: f64,
}

impl NnlsSolution {
    /// `kkt_violation ≤ 1e-8 · ‖Aᵀy‖∞`.
    pub fn satisfies_kkt(&self) -> bool {
        self.kkt_violation <= KKT_TOLERANCE * self.gradient_scale
    }
}

/// Solves `min ‖y − A c‖₂² subject to c ≥ 0`.
///
/// Fails with [`Error::MaxIterations`] after `3·n` outer iterations.
pub fn nnls(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<NnlsSolution> {
    let (p, n) = a.shape();
    if n == 0 {
        return Err(Error::mismatch("nnls column count", 1, 0));
    }
    if y.len() != p {
        return Err(Error::mismatch("nnls right-hand side", p, y.len()));
    }
    if a.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("nnls input"));
    }

    let aty = a.tr_mul(y);
    let scale = aty.amax();

    // For tall systems work with the triangular factor: with A = QR,
    // ‖y − Ac‖² = ‖Qᵀy − Rc‖² + const and Aᵀ(Ac − y) = Rᵀ(Rc − Qᵀy).
    let (work_a, work_y) = if p > n {
        let qr = a.clone().qr();
        let mut qty = y.clone();
        qr.q_tr_mul(&mut qty);
        (qr.r(), qty.rows(0, n).into_owned())
    } else {
        (a.clone(), y.clone())
    };
    let (a_full, y_full) = (a, y);
    let (a, y) = (&work_a, &work_y);
    let gram = a.tr_mul(a);
    let rhs = a.tr_mul(y);
    // Stop adding variables once no dual component beats this.
    let tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let max_iter = 3 * n;

    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    // Candidates whose fresh LS value came out non-positive; cleared on progress.
    let mut rejected = vec![false; n];
    let mut iterations = 0;

    loop {
        let w = &rhs - &gram * &x;
        let candidate = (0..n)
            .filter(|&i| !passive[i] && !rejected[i])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]).then(j.cmp(&i)));
        let Some(j) = candidate else { break };
        if w[j] <= tol {
            break;
        }
        iterations += 1;
        if iterations > max_iter {
            return Err(Error::MaxIterations(max_iter));
        }
        passive[j] = true;

        let mut first = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let sub = passive_solve(a, y, &gram, &rhs, &idx)?;

            if first && sub[idx.iter().position(|&i| i == j).unwrap()] <= 0.0 {
                // Round-off made the entering variable useless; skip it.
                passive[j] = false;
                rejected[j] = true;
                break;
            }
            first = false;

            if sub.iter().all(|&v| v > 0.0) {
                for (k, &i) in idx.iter().enumerate() {
                    x[i] = sub[k];
                }
                rejected.iter_mut().for_each(|r| *r = false);
                break;
            }

            // Step toward the LS solution until the first passive variable hits zero.
            let mut alpha = f64::INFINITY;
            let mut blocking = Vec::new();
            for (k, &i) in idx.iter().enumerate() {
                if sub[k] <= 0.0 {
                    let step = if x[i] == 0.0 { 0.0 } else { x[i] / (x[i] - sub[k]) };
                    if step < alpha {
                        alpha = step;
                        blocking.clear();
                    }
                    if step == alpha {
                        blocking.push(i);
                    }
                }
            }
            for (k, &i) in idx.iter().enumerate() {
                x[i] += alpha * (sub[k] - x[i]);
            }
            for &i in &blocking {
                x[i] = 0.0;
            }
            for &i in &idx {
                if x[i] <= 0.0 {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            rejected.iter_mut().for_each(|r| *r = false);
            if !passive.iter().any(|&b| b) {
                break;
            }
        }
    }

    let residual = y_full - a_full * &x;
    let gradient = -a_full.tr_mul(&residual);
    let kkt_violation = (0..n)
        .map(|i| {
            if x[i] > 0.0 {
                gradient[i].abs()
            } else {
                (-gradient[i]).max(0.0)
            }
        })
        .fold(0.0, f64::max);

    Ok(NnlsSolution {
        coefficients: x,
        residual_norm: residual.norm(),
        iterations,
        kkt_violation,
        gradient_scale: scale,
    })
}

/// Least squares on the passive columns. Cholesky on the Gram block with one
/// refinement step; pivoted QR when the block is singular or badly scaled.
fn passive_solve(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    gram: &DMatrix<f64>,
    rhs: &DVector<f64>,
    idx: &[usize],
) -> Result<DVector<f64>> {
    let cols = a.select_columns(idx);
    let block = DMatrix::from_fn(idx.len(), idx.len(), |i, j| gram[(idx[i], idx[j])]);
    if let Some(chol) = block.cholesky() {
        let diag = chol.l_dirty().diagonal();
        let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
        // Diagonal ratio of L bounds cond(A_P) from below; stay well clear of 1/√eps.
        if lo > 0.0 && hi / lo < 1e4 {
            let b = DVector::from_fn(idx.len(), |i, _| rhs[idx[i]]);
            let mut z = chol.solve(&b);
            let correction = chol.solve(&cols.tr_mul(&(y - &cols * &z)));
            z += correction;
            return Ok(z);
        }
    }
    lstsq(&cols, y)
}
