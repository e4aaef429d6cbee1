//! Classic (non-orthogonal) matching pursuit.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PursuitSolution {
    /// Distinct atom indices in order of first selection.
    pub support: Vec<usize>,
    /// Accumulated coefficient for each entry of `support`.
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
    /// Residual norm before the first step and after every step taken.
    pub residual_history: Vec<f64>,
}

impl PursuitSolution {
    /// Scatters the coefficients into a dense vector of length `n`.
    pub fn dense(&self, n: usize) -> DVector<f64> {
        let mut out = DVector::zeros(n);
        for (&i, &c) in self.support.iter().zip(&self.coefficients) {
            out[i] = c;
        }
        out
    }
}

/// Runs `iterations` steps of matching pursuit over the columns of `a`.
///
/// Each step picks the atom with the largest `|⟨aᵢ, r⟩|` (lowest index on
/// ties), adds `⟨aᵢ, r⟩` to its coefficient and subtracts that projection from
/// the residual. Atoms may be picked again. Stops early once the residual is
/// orthogonal to every atom. Atoms are assumed unit-norm.
pub fn matching_pursuit(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    iterations: usize,
) -> Result<PursuitSolution> {
    let (p, n) = a.shape();
    if iterations < 1 {
        return Err(Error::KOutOfRange { k: iterations, n });
    }
    if n == 0 {
        return Err(Error::mismatch("matching pursuit column count", 1, 0));
    }
    if y.len() != p {
        return Err(Error::mismatch("matching pursuit signal", p, y.len()));
    }

    let mut residual = y.clone();
    let mut support: Vec<usize> = Vec::new();
    let mut coefficients: Vec<f64> = Vec::new();
    let mut history = vec![residual.norm()];

    for _ in 0..iterations {
        let corr = a.tr_mul(&residual);
        let mut best = 0;
        for i in 1..n {
            if corr[i].abs() > corr[best].abs() {
                best = i;
            }
        }
        let step = corr[best];
        if step == 0.0 {
            break;
        }
        match support.iter().position(|&s| s == best) {
            Some(pos) => coefficients[pos] += step,
            None => {
                support.push(best);
                coefficients.push(step);
            }
        }
        residual.axpy(-step, &a.column(best), 1.0);
        history.push(residual.norm());
    }

    Ok(PursuitSolution {
        support,
        coefficients,
        residual_norm: residual.norm(),
        residual_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_exact_recovery() {
        let a = DMatrix::identity(3, 3);
        let s = matching_pursuit(&a, &DVector::from_vec(vec![0.5, 0.0, 0.8]), 2).unwrap();
        assert_eq!(s.support, vec![2, 0]);
        assert_eq!(s.coefficients, vec![0.8, 0.5]);
        assert_eq!(s.residual_norm, 0.0);
    }

    #[test]
    fn single_step_takes_largest_inner_product() {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let a = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, s2, s2]);
        let y = DVector::from_vec(vec![-0.2, 1.0]);
        let s = matching_pursuit(&a, &y, 1).unwrap();
        let ip = s2 * 0.8;
        assert_eq!(s.support, vec![1]);
        assert!((s.coefficients[0] - ip).abs() < 1e-15);
    }

    #[test]
    fn reselection_accumulates() {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let a = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, s2, s2]);
        let y = DVector::from_vec(vec![1.0, 0.2]);
        let s = matching_pursuit(&a, &y, 6).unwrap();
        assert!(s.support.len() <= 2);
        let mut sorted = s.support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), s.support.len());
        assert!(s.residual_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn zero_iterations_rejected() {
        let a = DMatrix::identity(2, 2);
        assert!(matching_pursuit(&a, &DVector::zeros(2), 0).is_err());
    }
}
