use nalgebra::DMatrix;
use serde::Serialize;

use super::{norm_b, ChamberVector, NormParams};
use crate::{Error, Result};

/// Archimedean height `e^{‖X‖_B}` of a real matrix with `X` the trace-zero
/// part of its log singular values.
#[derive(Debug, Clone, Serialize)]
pub struct ArchimedeanHeight {
    pub height: f64,
    /// `‖X‖_B = log height`.
    pub log_height: f64,
    /// Singular values, descending.
    pub singular_values: Vec<f64>,
    /// `X_i = log σ_i - mean_j log σ_j`.
    pub x: Vec<f64>,
    /// Set when `σ_d / σ_1 < 10^{-14}`.
    pub ill_conditioned: bool,
}

/// Height at the archimedean place via the Cartan decomposition `M = k exp(X) k'`.
pub fn archimedean_height(m: &[Vec<f64>], b: f64) -> Result<ArchimedeanHeight> {
    let params = NormParams::new(b)?;
    let d = m.len();
    if d < 2 || m.iter().any(|row| row.len() != d) {
        return Err(Error::InvalidArgument("expected a square matrix of size ≥ 2".into()));
    }
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("matrix entries must be finite".into()));
    }
    let mat = DMatrix::from_fn(d, d, |i, j| m[i][j]);
    let mut sigma: Vec<f64> = mat.svd(false, false).singular_values.iter().copied().collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    let (top, bottom) = (sigma[0], sigma[d - 1]);
    if !(bottom > top * d as f64 * f64::EPSILON) {
        return Err(Error::SingularMatrix);
    }
    let logs: Vec<f64> = sigma.iter().map(|s| s.ln()).collect();
    let x = ChamberVector::project(&logs)?;
    let log_height = norm_b(&x, params);
    Ok(ArchimedeanHeight {
        height: log_height.exp(),
        log_height,
        singular_values: sigma,
        x: x.as_slice().to_vec(),
        ill_conditioned: bottom / top < 1e-14,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
        a.qr().q()
    }

    fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
    }

    #[test]
    fn examples() {
        let id = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!((archimedean_height(&id, 2.5).unwrap().height - 1.0).abs() < 1e-15);
        let diag = vec![vec![2.0, 0.0], vec![0.0, 0.5]];
        assert!((archimedean_height(&diag, 1.0).unwrap().height - 2.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 2..=5 {
            let k = random_orthogonal(d, &mut rng);
            assert!((archimedean_height(&to_rows(&k), 1.0).unwrap().height - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(
            archimedean_height(&[vec![1.0, 2.0], vec![2.0, 4.0]], 1.0).unwrap_err(),
            Error::SingularMatrix
        );
        assert!(archimedean_height(&[vec![1.0, 0.0]], 1.0).is_err());
        assert!(archimedean_height(&[vec![1.0, 0.0], vec![0.0, 1.0]], 0.0).is_err());
        let r = archimedean_height(&[vec![1.0, 0.0], vec![0.0, 1e-15]], 1.0).unwrap();
        assert!(r.ill_conditioned);
    }

    #[test]
    fn bi_invariance_and_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let d = rng.gen_range(2..=5);
            let m = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-3.0..3.0));
            let k1 = random_orthogonal(d, &mut rng);
            let k2 = random_orthogonal(d, &mut rng);
            let b = rng.gen_range(0.3..3.0);
            let h = archimedean_height(&to_rows(&m), b).unwrap().height;
            let h1 = archimedean_height(&to_rows(&(&m * &k1)), b).unwrap().height;
            let h2 = archimedean_height(&to_rows(&(&k2 * &m)), b).unwrap().height;
            assert!((h1 / h - 1.0).abs() < 1e-9);
            assert!((h2 / h - 1.0).abs() < 1e-9);
            // h^B does not depend on B
            let h_one = archimedean_height(&to_rows(&m), 1.0).unwrap().height;
            assert!((h.powf(b) / h_one - 1.0).abs() < 1e-9);
            // scalar multiples define the same element of PGL_d
            let scaled = archimedean_height(&to_rows(&(&m * 3.7)), b).unwrap().height;
            assert!((scaled / h - 1.0).abs() < 1e-9);
            assert!(h >= 1.0);
        }
    }
}
