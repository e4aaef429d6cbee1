//! Atom scoring and selection.
//!
//! Standard pruning ranks atoms by `|⟨aᵢ, y⟩|`. RBF pruning ranks them by the
//! Gaussian kernel `exp(−γ‖aᵢ − ŷ‖²)` against the unit-normalized measurement,
//! which for unit atoms orders by the *signed* inner product: atoms pointing
//! away from the measurement score low instead of high.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::spectra::Dictionary;

/// Default RBF kernel width.
pub const DEFAULT_GAMMA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PruneMethod {
    Standard,
    Rbf { gamma: f64 },
}

impl PruneMethod {
    pub fn rbf() -> Self {
        PruneMethod::Rbf {
            gamma: DEFAULT_GAMMA,
        }
    }

    pub fn score(&self, dict: &Dictionary, y: &DVector<f64>) -> Result<PruneScores> {
        match *self {
            PruneMethod::Standard => score_standard(dict, y),
            PruneMethod::Rbf { gamma } => score_rbf(dict, y, gamma),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruneScores {
    pub scores: Vec<f64>,
    pub method: PruneMethod,
}

/// `|⟨aᵢ, y⟩|` for every atom, on the raw measurement.
pub fn score_standard(dict: &Dictionary, y: &DVector<f64>) -> Result<PruneScores> {
    check_bands(dict, y)?;
    let scores = dict.matrix().tr_mul(y).iter().map(|v| v.abs()).collect();
    Ok(PruneScores {
        scores,
        method: PruneMethod::Standard,
    })
}

/// `exp(−γ‖aᵢ − y/‖y‖‖²)` for every atom.
///
/// A zero measurement is used as is, which scores every unit atom `e^{−γ}`.
pub fn score_rbf(dict: &Dictionary, y: &DVector<f64>, gamma: f64) -> Result<PruneScores> {
    check_bands(dict, y)?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::NonPositiveGamma(gamma));
    }
    let norm = y.norm();
    let unit = if norm > 0.0 { y / norm } else { y.clone() };
    let scores = dict
        .matrix()
        .column_iter()
        .map(|atom| (-gamma * (atom - &unit).norm_squared()).exp())
        .collect();
    Ok(PruneScores {
        scores,
        method: PruneMethod::Rbf { gamma },
    })
}

/// Indices of the `k` highest scores, ascending; ties go to the lower index.
pub fn select_top_k(scores: &PruneScores, k: usize) -> Result<Vec<usize>> {
    let n = scores.scores.len();
    if k < 1 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let s = &scores.scores;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));
    order.truncate(k);
    order.sort_unstable();
    Ok(order)
}

/// Indices with score strictly above `delta`, ascending. May be empty.
pub fn select_threshold(scores: &PruneScores, delta: f64) -> Vec<usize> {
    scores
        .scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > delta)
        .map(|(i, _)| i)
        .collect()
}

fn check_bands(dict: &Dictionary, y: &DVector<f64>) -> Result<()> {
    if y.len() != dict.band_count() {
        return Err(Error::mismatch("measurement band count", dict.band_count(), y.len()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn identity_dict(n: usize) -> Dictionary {
        let names = (0..n).map(|i| format!("e{i}")).collect();
        Dictionary::new(names, DMatrix::identity(n, n)).unwrap()
    }

    fn scores(v: &[f64]) -> PruneScores {
        PruneScores {
            scores: v.to_vec(),
            method: PruneMethod::Standard,
        }
    }

    #[test]
    fn standard_scores_match_inner_products() {
        let d = identity_dict(3);
        let s = score_standard(&d, &DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        assert_eq!(s.scores, vec![1.0, 0.0, 0.0]);
        let s = score_standard(&d, &DVector::from_vec(vec![-1.0, 0.0, 0.0])).unwrap();
        assert_eq!(s.scores, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn rbf_analytic_values() {
        let d = identity_dict(2);
        let y = DVector::from_vec(vec![1.0, 0.0]);
        let s = score_rbf(&d, &y, 1.0).unwrap();
        assert_eq!(s.scores[0], 1.0);
        assert!((s.scores[1] - (-2.0f64).exp()).abs() < 1e-15);
        let s = score_rbf(&d, &DVector::from_vec(vec![-1.0, 0.0]), 1.0).unwrap();
        assert!((s.scores[0] - (-4.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn rbf_normalizes_measurement() {
        let d = identity_dict(2);
        let s = score_rbf(&d, &DVector::from_vec(vec![7.0, 0.0]), 1.0).unwrap();
        assert_eq!(s.scores[0], 1.0);
    }

    #[test]
    fn rbf_rejects_bad_gamma() {
        let d = identity_dict(2);
        let y = DVector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(score_rbf(&d, &y, 0.0), Err(Error::NonPositiveGamma(_))));
        assert!(matches!(score_rbf(&d, &y, -1.0), Err(Error::NonPositiveGamma(_))));
    }

    #[test]
    fn band_mismatch() {
        let d = identity_dict(2);
        assert!(score_standard(&d, &DVector::zeros(3)).is_err());
    }

    #[test]
    fn top_k_examples() {
        assert_eq!(select_top_k(&scores(&[0.9, 0.1, 0.5]), 2).unwrap(), vec![0, 2]);
        assert_eq!(select_top_k(&scores(&[0.3, 0.3, 0.3]), 2).unwrap(), vec![0, 1]);
        assert_eq!(select_top_k(&scores(&[0.3, 0.1, 0.2]), 3).unwrap(), vec![0, 1, 2]);
        assert!(matches!(
            select_top_k(&scores(&[0.3]), 2),
            Err(Error::KOutOfRange { k: 2, n: 1 })
        ));
        assert!(select_top_k(&scores(&[0.3]), 0).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(select_threshold(&scores(&[0.9, 0.1]), 0.5), vec![0]);
        assert_eq!(select_threshold(&scores(&[0.9, 0.0, 0.1]), 0.0), vec![0, 2]);
        assert!(select_threshold(&scores(&[0.9, 0.1]), 0.9).is_empty());
    }
}
