use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::quadrature::{integrate_ordered_simplex, QuadratureOptions, QuadratureResult};
use super::{density, NormParams, RootSystemA};
use crate::{Error, Result};

fn gram_volume(vectors: &[Vec<f64>]) -> f64 {
    let n = vectors.len();
    if n == 0 {
        return 1.0;
    }
    let gram = DMatrix::from_fn(n, n, |i, j| {
        vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum::<f64>()
    });
    gram.determinant().max(0.0).sqrt()
}

/// Vertices `ω_k / ρ(ω_k)` of the slice `{X dominant, ρ(X) = 1}`.
fn unit_slice_vertices(sys: &RootSystemA) -> Vec<Vec<f64>> {
    sys.fundamental_coweights()
        .into_iter()
        .map(|w| {
            let r = sys.rho(&w);
            w.into_iter().map(|v| v / r).collect()
        })
        .collect()
}

/// `∫ Π_{i<j} sinh(X_i - X_j) dX` over `{X dominant, trace-zero, ρ(X) ≤ B R}`.
///
/// The region is the simplex spanned by `0` and `V_k = BR ω_k / ρ(ω_k)`. It is
/// parametrized by the ordered simplex via `X(y) = Σ_k (y_k - y_{k+1}) V_k`,
/// so that `ρ(X(y)) = BR y_1`.
pub fn ball_volume_with(d: usize, b: f64, r: f64, opts: QuadratureOptions) -> Result<QuadratureResult> {
    let sys = RootSystemA::new(d)?;
    NormParams::new(b)?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be ≥ 0, got {r}")));
    }
    if opts.mesh < 2 {
        return Err(Error::InvalidArgument(format!("mesh must be at least 2, got {}", opts.mesh)));
    }
    if r == 0.0 {
        return Ok(QuadratureResult {
            value: 0.0,
            error: 0.0,
            cells: 0,
        });
    }
    let rank = sys.rank();
    let y_max = b * r;
    let vertices: Vec<Vec<f64>> = unit_slice_vertices(&sys)
        .into_iter()
        .map(|v| v.into_iter().map(|c| c * y_max).collect())
        .collect();
    // Lebesgue measure with |ρ| = 1 is λ^r times the Euclidean one
    let jacobian = sys.rho_length().powi(rank as i32) * gram_volume(&vertices);

    let integrand = |y: &[f64]| {
        let mut x = vec![0.0; d];
        for k in 0..rank {
            let t = y[k] - if k + 1 < rank { y[k + 1] } else { 0.0 };
            for (xi, vi) in x.iter_mut().zip(&vertices[k]) {
                *xi += t * vi;
            }
        }
        density(&x)
    };
    let res = integrate_ordered_simplex(rank, integrand, opts)?;
    Ok(QuadratureResult {
        value: res.value * jacobian,
        error: res.error * jacobian,
        cells: res.cells,
    })
}

/// [`ball_volume_with`] at default tolerances on an initial grid of `mesh^{d-1}` cells.
pub fn ball_volume_numeric(d: usize, b: f64, r: f64, mesh: usize) -> Result<f64> {
    let opts = QuadratureOptions {
        mesh,
        ..QuadratureOptions::default()
    };
    Ok(ball_volume_with(d, b, r, opts)?.value)
}

/// `F(1)`: the `(d-2)`-volume of `{X dominant, trace-zero, ρ(X) = 1}` in the
/// metric where `ρ` has unit length; `1` for `d = 2`.
///
/// With this normalization `vol{ρ ≤ Y} = F(1) Y^{d-1} / (d-1)`.
pub fn simplex_area(d: usize) -> Result<f64> {
    let sys = RootSystemA::new(d)?;
    let rank = sys.rank();
    if rank == 1 {
        return Ok(1.0);
    }
    let u = unit_slice_vertices(&sys);
    let edges: Vec<Vec<f64>> = u[1..]
        .iter()
        .map(|v| v.iter().zip(&u[0]).map(|(a, b)| a - b).collect())
        .collect();
    let factorial: f64 = (1..rank).map(|k| k as f64).product();
    Ok(sys.rho_length().powi(rank as i32 - 1) * gram_volume(&edges) / factorial)
}

/// Least-squares fit `log vol ≈ slope·R + poly_degree·log R + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub poly_degree: f64,
    pub intercept: f64,
    /// Number of samples (the largest-R half) entering the fit.
    pub used: usize,
    /// Root-mean-square residual of the fit in `log vol`.
    pub rms_residual: f64,
}

/// Fits the growth of `(R, volume)` samples over the largest-R half.
pub fn growth_exponent_fit(samples: &[(f64, f64)]) -> Result<GrowthFit> {
    if samples.len() < 5 {
        return Err(Error::InvalidArgument(format!(
            "need at least 5 samples, got {}",
            samples.len()
        )));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidArgument("sample radii must increase".into()));
    }
    if samples.iter().any(|&(r, v)| !(r > 0.0) || !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument("radii and volumes must be positive".into()));
    }
    let half = &samples[samples.len() / 2..];
    let span = half[half.len() - 1].0 - half[0].0;
    if span < 2.0 {
        return Err(Error::DegenerateFit(format!(
            "fitted samples span {span} < 2 units in R"
        )));
    }
    let n = half.len();
    let a = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => half[i].0,
        1 => half[i].0.ln(),
        _ => 1.0,
    });
    let y = DVector::from_iterator(n, half.iter().map(|s| s.1.ln()));
    let coeffs = a
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let residual = &a * &coeffs - &y;
    Ok(GrowthFit {
        slope: coeffs[0],
        poly_degree: coeffs[1],
        intercept: coeffs[2],
        used: n,
        rms_residual: (residual.norm_squared() / n as f64).sqrt(),
    })
}

/// Measured growth of the archimedean ball volume next to the exponents in
/// circulation: the stated `(BR)^{d-2} e^{BR}` and the `e^{2BR}` that the
/// leading term `e^{2ρ(X)}` of the Cartan density produces.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentReport {
    pub d: usize,
    pub b: f64,
    pub samples: Vec<(f64, f64)>,
    pub fit: GrowthFit,
    /// Exponent `B` of the stated asymptotic.
    pub stated_exponent: f64,
    /// Exponent `2B` from the leading term of the density.
    pub doubled_exponent: f64,
    /// Polynomial degree `d - 2` common to both.
    pub expected_degree: f64,
    /// `slope - B`.
    pub deviation_from_stated: f64,
    /// `slope - 2B`.
    pub deviation_from_doubled: f64,
}

/// Samples `ball_volume_numeric` at `n` equally spaced radii in
/// `[r_min, r_max]` and fits the growth.
pub fn exponent_report(d: usize, b: f64, r_min: f64, r_max: f64, n: usize) -> Result<ExponentReport> {
    if n < 5 || !(r_min > 0.0) || !(r_max > r_min) {
        return Err(Error::InvalidArgument(
            "need n ≥ 5 radii with 0 < r_min < r_max".into(),
        ));
    }
    let samples = (0..n)
        .map(|i| {
            let r = r_min + (r_max - r_min) * i as f64 / (n - 1) as f64;
            Ok((r, ball_volume_numeric(d, b, r, 4)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = growth_exponent_fit(&samples)?;
    Ok(ExponentReport {
        d,
        b,
        fit,
        stated_exponent: b,
        doubled_exponent: 2.0 * b,
        expected_degree: (d - 2) as f64,
        deviation_from_stated: fit.slope - b,
        deviation_from_doubled: fit.slope - 2.0 * b,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn closed_d2(y: f64) -> f64 {
        ((2.0 * y).cosh() - 1.0) / 2.0
    }

    #[test]
    fn rank_one_closed_form() {
        for r in [0.5, 1.0, 3.0, 5.0, 10.0] {
            let v = ball_volume_numeric(2, 1.0, r, 2).unwrap();
            assert!((v / closed_d2(r) - 1.0).abs() < 1e-10, "R={r}");
        }
        let v = ball_volume_numeric(2, 0.7, 2.0, 3).unwrap();
        assert!((v / closed_d2(1.4) - 1.0).abs() < 1e-10);
        assert!((ball_volume_numeric(2, 1.0, 1.0, 2).unwrap() - 1.38109).abs() < 1e-5);
        assert!(ball_volume_numeric(2, 1.0, 1e-9, 2).unwrap() < 1e-17);
        assert_eq!(ball_volume_numeric(3, 1.0, 0.0, 2).unwrap(), 0.0);
    }

    #[test]
    fn mesh_refinement_is_consistent() {
        let a = ball_volume_numeric(3, 1.0, 1.0, 2).unwrap();
        let b = ball_volume_numeric(3, 1.0, 1.0, 4).unwrap();
        assert!((a / b - 1.0).abs() < 1e-5);
        let a = ball_volume_numeric(4, 1.0, 1.0, 2).unwrap();
        let b = ball_volume_numeric(4, 1.0, 1.0, 4).unwrap();
        assert!((a / b - 1.0).abs() < 1e-5);
    }

    #[test]
    fn monotone_in_radius() {
        for d in [2usize, 3, 4] {
            let mut prev = 0.0;
            for i in 1..=12 {
                let v = ball_volume_numeric(d, 1.0, 0.25 * i as f64, 2).unwrap();
                assert!(v > prev, "d={d} i={i}");
                prev = v;
            }
        }
    }

    #[test]
    fn constant_integrand_matches_simplex_area() {
        // with the density replaced by 1 the integral is the region volume a·Y^r/r
        for d in [3usize, 4, 5] {
            let sys = RootSystemA::new(d).unwrap();
            let rank = sys.rank();
            let y = 1.7;
            let vertices: Vec<Vec<f64>> = unit_slice_vertices(&sys)
                .into_iter()
                .map(|v| v.into_iter().map(|c| c * y).collect())
                .collect();
            let fact: f64 = (1..=rank).map(|k| k as f64).product();
            let vol = sys.rho_length().powi(rank as i32) * gram_volume(&vertices) / fact;
            let expected = simplex_area(d).unwrap() * y.powi(rank as i32) / rank as f64;
            assert!((vol / expected - 1.0).abs() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn simplex_area_values() {
        assert_eq!(simplex_area(2).unwrap(), 1.0);
        assert!((simplex_area(3).unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!(simplex_area(1).is_err());
    }

    /// Orthonormal basis of the trace-zero hyperplane in `R^3`.
    fn basis3() -> [[f64; 3]; 2] {
        let s2 = 2f64.sqrt();
        let s6 = 6f64.sqrt();
        [[1.0 / s2, -1.0 / s2, 0.0], [1.0 / s6, 1.0 / s6, -2.0 / s6]]
    }

    #[test]
    fn monte_carlo_slab_matches_area() {
        // vol{y ≤ ρ ≤ y + δ} ≈ a y δ for d = 3, in the normalized measure
        let sys = RootSystemA::new(3).unwrap();
        let a = simplex_area(3).unwrap();
        let lam2 = sys.rho_length().powi(2);
        let e = basis3();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let delta = 0.05;
        for y in [1.0, 2.0] {
            // the slab lies within distance |ω_1| (y + δ) < y + δ of the origin
            let half = y + delta;
            let n = 1_000_000;
            let mut hits = 0usize;
            for _ in 0..n {
                let u: f64 = rng.gen_range(-half..half);
                let v: f64 = rng.gen_range(-half..half);
                let x: Vec<f64> = (0..3).map(|i| u * e[0][i] + v * e[1][i]).collect();
                if x[0] >= x[1] && x[1] >= x[2] {
                    let rho = sys.rho(&x);
                    if rho >= y && rho <= y + delta {
                        hits += 1;
                    }
                }
            }
            let slab = hits as f64 / n as f64 * (2.0 * half).powi(2) * lam2;
            let predicted = a * ((y + delta).powi(2) - y * y) / 2.0;
            assert!((slab / predicted - 1.0).abs() < 0.05, "y={y} slab={slab} predicted={predicted}");
            assert!((slab / (a * y * delta) - 1.0).abs() < 0.08);
        }
    }

    #[test]
    fn fit_recovers_known_growth() {
        let exp2: Vec<(f64, f64)> = (0..11).map(|i| {
            let r = 1.0 + i as f64;
            (r, (2.0 * r).exp())
        }).collect();
        let f = growth_exponent_fit(&exp2).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-6);
        assert!(f.poly_degree.abs() < 1e-6);
        let rexp: Vec<(f64, f64)> = (0..11).map(|i| {
            let r = 1.0 + i as f64;
            (r, r * r.exp())
        }).collect();
        let f = growth_exponent_fit(&rexp).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-3);
        assert!((f.poly_degree - 1.0).abs() < 1e-3);
    }

    #[test]
    fn fit_errors() {
        let few: Vec<(f64, f64)> = (1..5).map(|i| (i as f64, 1.0)).collect();
        assert!(growth_exponent_fit(&few).is_err());
        let narrow: Vec<(f64, f64)> = (0..10).map(|i| (1.0 + 0.1 * i as f64, 2.0)).collect();
        assert!(matches!(growth_exponent_fit(&narrow), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn measured_exponent_in_rank_one() {
        let rep = exponent_report(2, 1.0, 5.0, 10.0, 11).unwrap();
        assert!((rep.fit.slope - 2.0).abs() < 0.02);
        assert!(rep.fit.poly_degree.abs() < 0.05);
        assert!(rep.deviation_from_doubled.abs() < rep.deviation_from_stated.abs());
    }
}
