//! Brute-force check of Eve's square-root-measurement success probability.
//!
//! For `n` equiprobable pure states with Gram matrix `G`, the square-root
//! measurement succeeds with probability `(1/n) sum_i ((sqrt G)_ii)^2`. Eve's
//! candidate `L`-ancilla states share the overlap `lambda^L` pairwise, so the
//! Gram matrix alone determines the answer and no state vectors are built.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::channel::ChannelParams;
use crate::distill::eve_guess_probs;
use crate::error::{Error, Result};

/// Eigenvalues with magnitude below this are treated as exact zeros.
pub const EIGEN_CLAMP: f64 = 1e-10;

/// Gram matrix of `n` unit vectors with common pairwise overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    overlap: f64,
    entries: DMatrix<f64>,
}

impl GramMatrix {
    pub fn new(n: usize, overlap: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        if !(0.0..=1.0).contains(&overlap) {
            return Err(Error::Overlap(overlap));
        }
        let entries = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { overlap });
        Ok(Self { overlap, entries })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Numerical eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Closed-form spectrum: `1 - g` with multiplicity `n - 1`, then `1 + (n-1) g`.
    pub fn expected_eigenvalues(&self) -> Vec<f64> {
        let n = self.n();
        let mut values = vec![1.0 - self.overlap; n - 1];
        values.push(1.0 + (n - 1) as f64 * self.overlap);
        values
    }
}

/// Symmetric positive square root via eigendecomposition.
///
/// Eigenvalues in `(-EIGEN_CLAMP, EIGEN_CLAMP)` are set to zero; anything
/// more negative is rejected.
pub fn matrix_sqrt_psd(gram: &GramMatrix) -> Result<DMatrix<f64>> {
    let eigen = SymmetricEigen::new(gram.entries.clone());
    let mut roots = eigen.eigenvalues.clone();
    for v in roots.iter_mut() {
        if *v <= -EIGEN_CLAMP {
            return Err(Error::NotPsd(*v));
        }
        *v = if *v < EIGEN_CLAMP { 0.0 } else { v.sqrt() };
    }
    let vecs = &eigen.eigenvectors;
    let root = vecs * DMatrix::from_diagonal(&roots) * vecs.transpose();
    // Symmetrize away round-off.
    Ok((&root + root.transpose()) * 0.5)
}

/// SRM success probability for `n` equiprobable states with common pairwise
/// overlap, computed from the numerical square root of the Gram matrix.
pub fn srm_success_probability(n: usize, overlap: f64) -> Result<f64> {
    let gram = GramMatrix::new(n, overlap)?;
    let root = matrix_sqrt_psd(&gram)?;
    Ok(root.diagonal().iter().map(|d| d * d).sum::<f64>() / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrmVerification {
    pub n: usize,
    pub overlap: f64,
    pub closed_form: f64,
    pub oracle: f64,
    pub abs_diff: f64,
    pub pass: bool,
}

/// Compares the closed-form `eta0^(L)` against the Gram-matrix oracle at
/// overlap `lambda^L`.
pub fn verify_closed_form(params: &ChannelParams, l: usize, tol: f64) -> Result<SrmVerification> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Tolerance(tol));
    }
    let closed_form = eve_guess_probs(params, l)?.eta0;
    let overlap = params.lambda().powi(l.min(i32::MAX as usize) as i32);
    let oracle = srm_success_probability(params.n(), overlap)?;
    let abs_diff = (closed_form - oracle).abs();
    Ok(SrmVerification {
        n: params.n(),
        overlap,
        closed_form,
        oracle,
        abs_diff,
        pass: abs_diff < tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distill::srm_closed_form;

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn gram_examples() {
        let g = GramMatrix::new(2, 0.0).unwrap();
        assert_eq!(g.entries(), &DMatrix::<f64>::identity(2, 2));

        let g = GramMatrix::new(3, 1.0).unwrap();
        assert_eq!(g.entries(), &DMatrix::from_element(3, 3, 1.0));
        let ev = g.eigenvalues();
        assert!(ev[0].abs() < 1e-12 && ev[1].abs() < 1e-12);
        assert!((ev[2] - 3.0).abs() < 1e-12);

        let ev = GramMatrix::new(3, 0.5).unwrap().eigenvalues();
        for (got, want) in ev.iter().zip([0.5, 0.5, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_rejects_invalid() {
        assert!(matches!(GramMatrix::new(3, 1.5), Err(Error::Overlap(_))));
        assert!(matches!(GramMatrix::new(3, -0.1), Err(Error::Overlap(_))));
        assert!(matches!(GramMatrix::new(1, 0.5), Err(Error::Dimension(1))));
    }

    #[test]
    fn sqrt_identity_and_rank_one() {
        let id = GramMatrix::new(4, 0.0).unwrap();
        let root = matrix_sqrt_psd(&id).unwrap();
        assert!(max_abs(&(root - DMatrix::<f64>::identity(4, 4))) < 1e-14);

        let ones = GramMatrix::new(2, 1.0).unwrap();
        let root = matrix_sqrt_psd(&ones).unwrap();
        assert!(max_abs(&(&root * &root - ones.entries())) < 1e-10);
        // sqrt of the all-ones 2x2 matrix has every entry 1/sqrt(2).
        assert!(max_abs(&root.add_scalar(-0.5f64.sqrt())) < 1e-12);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let mut bad = GramMatrix::new(2, 0.5).unwrap();
        bad.entries[(0, 1)] = 2.0;
        bad.entries[(1, 0)] = 2.0;
        assert!(matches!(matrix_sqrt_psd(&bad), Err(Error::NotPsd(_))));
    }

    #[test]
    fn srm_examples() {
        for n in 2..8 {
            assert!((srm_success_probability(n, 0.0).unwrap() - 1.0).abs() < 1e-12);
            assert!((srm_success_probability(n, 1.0).unwrap() - 1.0 / n as f64).abs() < 1e-12);
        }
        let p = srm_success_probability(3, 0.5).unwrap();
        assert!((p - 8.0 / 9.0).abs() < 1e-12);
        assert!((srm_closed_form(3, 0.5) - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn verify_examples() {
        let p = ChannelParams::from_noise(2, 0.5).unwrap();
        let v = verify_closed_form(&p, 2, 1e-10).unwrap();
        assert!(v.pass);
        assert!((v.oracle - 0.947_903_208_238_808_3).abs() < 1e-10);

        let p = ChannelParams::from_noise(7, 0.8).unwrap();
        let v = verify_closed_form(&p, 5, 1e-10).unwrap();
        assert!(v.pass);
        assert!((v.closed_form - 0.986_760_325_810_646_5).abs() < 1e-14);

        let p = ChannelParams::from_noise(2, 0.0).unwrap();
        let v = verify_closed_form(&p, 1, 1e-12).unwrap();
        assert!(v.pass);
        assert!((v.closed_form - 0.5).abs() < 1e-15 && (v.oracle - 0.5).abs() < 1e-12);
    }

    #[test]
    fn spectrum_sqrt_and_diagonal_uniformity() {
        for n in 2..=10 {
            for k in 0..50 {
                let g = GramMatrix::new(n, k as f64 / 49.0).unwrap();
                for (got, want) in g.eigenvalues().iter().zip(g.expected_eigenvalues()) {
                    assert!((got - want).abs() < 1e-10, "n={n} k={k}");
                }
                let root = matrix_sqrt_psd(&g).unwrap();
                assert!(max_abs(&(&root * &root - g.entries())) < 1e-10);
                let d0 = root[(0, 0)];
                assert!(root.diagonal().iter().all(|d| (d - d0).abs() < 1e-10));
            }
        }
    }

    #[test]
    fn oracle_matches_closed_form_over_block_lengths() {
        for n in 2..=10 {
            for k in 0..50 {
                let lam = k as f64 / 49.0;
                for l in 1..=8 {
                    let mu = lam.powi(l);
                    let diff = (srm_success_probability(n, mu).unwrap() - srm_closed_form(n, mu)).abs();
                    assert!(diff < 1e-10, "n={n} lam={lam} L={l}: {diff}");
                }
            }
        }
    }
}
