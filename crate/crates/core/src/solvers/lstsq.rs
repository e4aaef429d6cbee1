//! Unconstrained least squares via Householder QR with column pivoting.
//!
//! Rank-deficient systems get the minimum-norm solution through a complete
//! orthogonal decomposition: after `A P = Q [R11 R12; 0 0]`, the leading rows
//! `[R11 R12]` are factored once more from the right so the solution lies in
//! the row space.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Minimizes `‖y − A c‖₂`; returns the minimum-norm minimizer.
pub fn lstsq(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let (p, n) = a.shape();
    if y.len() != p {
        return Err(Error::mismatch("lstsq right-hand side", p, y.len()));
    }
    if n == 0 {
        return Ok(DVector::zeros(0));
    }
    if a.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("lstsq input"));
    }

    let mut r = a.clone();
    let mut qty = y.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut col_norms: Vec<f64> = (0..n).map(|j| r.column(j).norm_squared()).collect();
    let steps = p.min(n);

    for k in 0..steps {
        // Pivot: bring the column with largest remaining norm forward.
        let (pivot, _) = col_norms[k..]
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        let pivot = pivot + k;
        if pivot != k {
            r.swap_columns(k, pivot);
            perm.swap(k, pivot);
            col_norms.swap(k, pivot);
        }

        let mut v: DVector<f64> = r.view((k, k), (p - k, 1)).column(0).into_owned();
        let alpha = v.norm();
        if alpha == 0.0 {
            continue;
        }
        let beta = if v[0] >= 0.0 { -alpha } else { alpha };
        v[0] -= beta;
        let vnorm2 = v.norm_squared();
        if vnorm2 == 0.0 {
            continue;
        }

        for j in k..n {
            let mut col = r.view_mut((k, j), (p - k, 1));
            let s = 2.0 * v.dot(&col.column(0)) / vnorm2;
            col.column_mut(0).axpy(-s, &v, 1.0);
        }
        {
            let mut seg = qty.rows_mut(k, p - k);
            let s = 2.0 * v.dot(&seg) / vnorm2;
            seg.axpy(-s, &v, 1.0);
        }
        r[(k, k)] = beta;
        for i in k + 1..p {
            r[(i, k)] = 0.0;
        }
        // Recompute rather than downdate: n is small and this avoids cancellation.
        for j in k + 1..n {
            col_norms[j] = r.view((k + 1, j), (p - k - 1, 1)).norm_squared();
        }
    }

    let r00 = r[(0, 0)].abs();
    let tol = (p.max(n) as f64) * f64::EPSILON * r00;
    let rank = (0..steps).take_while(|&k| r[(k, k)].abs() > tol).count();

    let mut z = DVector::<f64>::zeros(n);
    if rank == 0 {
        return Ok(z);
    }

    let rhs = qty.rows(0, rank).into_owned();
    if rank == n {
        let r11 = r.view((0, 0), (rank, rank));
        let sol = r11
            .solve_upper_triangular(&rhs)
            .ok_or_else(|| Error::ConvergenceFailure("singular triangular factor".into()))?;
        z.copy_from(&sol);
    } else {
        // [R11 R12]ᵀ = W S with W orthonormal (n × rank); then the minimum-norm
        // solution is W S⁻ᵀ (Qᵀy)[..rank].
        let top = r.view((0, 0), (rank, n)).transpose();
        let qr = top.qr();
        let w = qr.q();
        let s = qr.r();
        let t = s
            .transpose()
            .solve_lower_triangular(&rhs)
            .ok_or_else(|| Error::ConvergenceFailure("singular triangular factor".into()))?;
        z = w * t;
    }

    let mut c = DVector::zeros(n);
    for (k, &orig) in perm.iter().enumerate() {
        c[orig] = z[k];
    }
    Ok(c)
}
