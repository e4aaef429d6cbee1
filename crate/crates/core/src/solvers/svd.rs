//! Thin SVD contract over nalgebra's bidiagonal SVD.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ThinSvd {
    /// `p × r`, orthonormal columns.
    pub u: DMatrix<f64>,
    /// Nonincreasing, length `r`.
    pub singular_values: DVector<f64>,
    /// `m × r`, orthonormal columns.
    pub v: DMatrix<f64>,
}

impl ThinSvd {
    /// `U · diag(s) · Vᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut us = self.u.clone();
        for (j, s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.v.transpose()
    }
}

/// Thin SVD of `x` keeping `rank` triplets (`None` keeps `min(p, m)`).
pub fn thin_svd(x: &DMatrix<f64>, rank: Option<usize>) -> Result<ThinSvd> {
    let (u, s, v) = decompose(x, rank, true)?;
    Ok(ThinSvd {
        u,
        singular_values: s,
        v: v.expect("requested V"),
    })
}

/// Leading left singular vectors and values, skipping V.
pub fn left_singular(x: &DMatrix<f64>, rank: usize) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let (u, s, _) = decompose(x, Some(rank), false)?;
    Ok((u, s))
}

fn decompose(
    x: &DMatrix<f64>,
    rank: Option<usize>,
    want_v: bool,
) -> Result<(DMatrix<f64>, DVector<f64>, Option<DMatrix<f64>>)> {
    let (p, m) = x.shape();
    let full = p.min(m);
    let r = rank.unwrap_or(full);
    if full == 0 {
        return Err(Error::mismatch("svd input size", 1, 0));
    }
    if r > full {
        return Err(Error::mismatch("svd rank", full, r));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("svd input"));
    }

    // The convergence threshold is absolute, so work on a unit-scale copy.
    // Too tight a threshold makes the iteration return wrong values.
    let scale = x.amax();
    let scaled = if scale > 0.0 { x / scale } else { x.clone() };
    let svd = scaled
        .clone()
        .try_svd(true, want_v, 5.0 * f64::EPSILON, MAX_SWEEPS)
        .ok_or_else(|| Error::ConvergenceFailure(format!("{p}×{m} matrix")))?;
    let u_full = svd.u.expect("requested U");
    let values = svd.singular_values;

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    order.truncate(r);

    let u = u_full.select_columns(&order);
    let mut s = DVector::from_iterator(r, order.iter().map(|&i| values[i]));
    // ‖Xᵀuⱼ‖ must equal sⱼ.
    let projected = scaled.tr_mul(&u);
    let top = s.iter().copied().fold(0.0, f64::max);
    for (j, &sj) in s.iter().enumerate() {
        if (projected.column(j).norm() - sj).abs() > 1e-8 * top.max(f64::MIN_POSITIVE) {
            return Err(Error::ConvergenceFailure(format!("{p}×{m} matrix: inconsistent factors")));
        }
    }
    if scale > 0.0 {
        s *= scale;
    }
    let v = if want_v {
        let vt = svd.v_t.expect("requested V");
        Some(vt.select_rows(&order).transpose())
    } else {
        None
    };
    Ok((u, s, v))
}
