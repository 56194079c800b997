//! Hermitian matrix functions used to build device dilations.
//!
//! Everything here works on small dense complex matrices. Tolerances are
//! relative to the spectral norm of the input, with an absolute floor of one
//! for the clamping of slightly negative eigenvalues: device matrices are
//! dimensionless amplitude ratios of order unity.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Global default tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Builds a real diagonal matrix.
pub fn diag(values: &[f64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(values.len(), values.len());
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = c(*v, 0.0);
    }
    m
}

pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Singular values in no particular order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Largest entry-wise deviation from Hermiticity.
pub fn hermitian_asymmetry(m: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn require_square(m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Eigendecomposition of the Hermitian part of `m`, after checking that the
/// anti-Hermitian part is within `tol` of zero.
fn hermitian_eigen(m: &ComplexMatrix, tol: f64) -> Result<SymmetricEigen<Complex64, nalgebra::Dyn>> {
    require_square(m, "matrix")?;
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let asymmetry = hermitian_asymmetry(m);
    if asymmetry > tol * scale {
        return Err(Error::NotHermitian { asymmetry });
    }
    let herm = (m + m.adjoint()).scale(0.5);
    Ok(SymmetricEigen::new(herm))
}

fn rebuild(eig: &SymmetricEigen<Complex64, nalgebra::Dyn>, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let vecs = &eig.eigenvectors;
    let n = vecs.nrows();
    let mut scaled = vecs.clone();
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let w = c(f(*lambda), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= w;
        }
    }
    let out = scaled * vecs.adjoint();
    // Enforce exact Hermiticity of the result.
    (&out + out.adjoint()).scale(0.5)
}

/// Positive semidefinite square root of a Hermitian matrix.
///
/// Eigenvalues of magnitude at most `tol·max(1, ‖M‖)` are treated as zero;
/// anything more negative is rejected.
pub fn hermitian_sqrt(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m, tol)?;
    let norm = eig.eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let floor = -tol * norm.max(1.0);
    if let Some(bad) = eig.eigenvalues.iter().copied().find(|l| *l < floor) {
        return Err(Error::NegativeEigenvalue { value: bad });
    }
    // Near-zero eigenvalues are snapped to zero: their square roots would
    // turn rounding noise into entries of order sqrt(tol).
    Ok(rebuild(&eig, |l| if l <= -floor { 0.0 } else { l.sqrt() }))
}

/// Moore-Penrose pseudoinverse of a Hermitian matrix.
///
/// Eigenvalues with magnitude at most `tol·‖M‖` map to zero.
pub fn regularized_inverse(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m, tol)?;
    let norm = eig.eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let cutoff = tol * norm;
    Ok(rebuild(&eig, |l| if l.abs() <= cutoff { 0.0 } else { 1.0 / l }))
}

/// Polar decomposition `M = R·V` with `R = sqrt(M M⁺)` and `V` unitary.
///
/// Singular values at most `tol·max(1, ‖M‖)` count as null. Without a null
/// space `V` comes from the scaled Newton iteration `X ← (ζX + X⁻⁺/ζ)/2`,
/// which stays accurate when singular values nearly coincide; with one, from
/// the SVD, pairing null(M) with null(M⁺) through the polar factor of their
/// overlap. When the two null spaces coincide (normal `M`) this is the
/// projector, so `V` acts as the identity there. Either way `R = M·V⁺`
/// involves no square root of `M M⁺`, whose rounding noise would be
/// amplified.
pub fn polar_decomposition(m: &ComplexMatrix, tol: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    require_square(m, "matrix")?;
    let n = m.nrows();
    if n == 0 {
        return Ok((m.clone(), m.clone()));
    }
    let svd = m.clone().svd(true, true);
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        unreachable!("SVD computed with both factors requested");
    };
    let sv = svd.singular_values;
    let cutoff = tol * sv.max().max(1.0);
    if sv.iter().all(|s| *s > cutoff) {
        if let Some(unitary) = newton_polar(m) {
            let r = m * unitary.adjoint();
            return Ok(((&r + r.adjoint()).scale(0.5), unitary));
        }
    }
    let mut root = ComplexMatrix::zeros(n, n);
    let mut unitary = ComplexMatrix::zeros(n, n);
    let mut null = Vec::new();
    for k in 0..n {
        let uk = u.column(k);
        if sv[k] <= cutoff {
            null.push(k);
            continue;
        }
        root += uk * uk.adjoint() * c(sv[k], 0.0);
        unitary += uk * v_t.row(k);
    }
    if !null.is_empty() {
        let left = u.select_columns(&null);
        let right = v_t.select_rows(&null).adjoint();
        let overlap = left.adjoint() * &right;
        let o = overlap.svd(true, true);
        let (Some(x), Some(y_t)) = (o.u, o.v_t) else {
            unreachable!("SVD computed with both factors requested");
        };
        unitary += &left * (x * y_t) * right.adjoint();
    }
    Ok((root, unitary))
}

/// Unitary polar factor of a nonsingular matrix; `None` if an iterate turns
/// singular or the iteration stalls.
fn newton_polar(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let mut x = m.clone();
    let mut scaled = true;
    for _ in 0..100 {
        let inv_h = x.clone().try_inverse()?.adjoint();
        let zeta = if scaled { (inv_h.norm() / x.norm()).sqrt() } else { 1.0 };
        let next = (x.scale(zeta) + inv_h.scale(1.0 / zeta)).scale(0.5);
        let change = (&next - &x).norm() / next.norm();
        x = next;
        if change < 1e-2 {
            scaled = false;
        }
        if change < 4.0 * f64::EPSILON * (m.nrows() as f64) {
            return Some(x);
        }
    }
    None
}

/// Frobenius norm of `a - b`.
pub fn distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let g = random_matrix(rng, n);
        &g * g.adjoint()
    }

    #[test]
    fn sqrt_of_identity_and_diagonal() {
        let r = hermitian_sqrt(&identity(2), DEFAULT_TOL).unwrap();
        assert!(distance(&r, &identity(2)) < 1e-14);
        let r = hermitian_sqrt(&diag(&[4.0, 9.0]), DEFAULT_TOL).unwrap();
        assert!(distance(&r, &diag(&[2.0, 3.0])) < 1e-14);
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            let m = random_psd(&mut rng, n);
            let r = hermitian_sqrt(&m, DEFAULT_TOL).unwrap();
            assert!(distance(&(&r * &r), &m) < 1e-10);
            assert!(hermitian_asymmetry(&r) < 1e-14);
            let eig = SymmetricEigen::new(r.clone());
            assert!(eig.eigenvalues.iter().all(|l| *l > -1e-12));
        }
    }

    #[test]
    fn sqrt_rejects_bad_input() {
        let mut m = identity(2);
        m[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(
            hermitian_sqrt(&m, DEFAULT_TOL),
            Err(Error::NotHermitian { .. })
        ));
        let m = diag(&[1.0, -0.5]);
        assert!(matches!(
            hermitian_sqrt(&m, DEFAULT_TOL),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }

    #[test]
    fn sqrt_clamps_grazing_negative() {
        let m = diag(&[1.0, -1e-12]);
        let r = hermitian_sqrt(&m, DEFAULT_TOL).unwrap();
        assert_eq!(r[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn pseudoinverse_examples() {
        let p = regularized_inverse(&diag(&[2.0, 0.0]), DEFAULT_TOL).unwrap();
        assert!(distance(&p, &diag(&[0.5, 0.0])) < 1e-15);
        let p = regularized_inverse(&identity(3), DEFAULT_TOL).unwrap();
        assert!(distance(&p, &identity(3)) < 1e-15);
    }

    #[test]
    fn pseudoinverse_penrose_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            // Rank-deficient PSD: project out one direction for n > 1.
            let g = ComplexMatrix::from_fn(n, n.saturating_sub(1).max(1), |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            for m in [&g * g.adjoint(), random_psd(&mut rng, n)] {
                let p = regularized_inverse(&m, DEFAULT_TOL).unwrap();
                let scale = 1.0 + spectral_norm(&m) * spectral_norm(&p);
                assert!(distance(&(&m * &p * &m), &m) < 1e-9 * scale);
                assert!(distance(&(&p * &m * &p), &p) < 1e-9 * scale);
                let mp = &m * &p;
                let pm = &p * &m;
                assert!(hermitian_asymmetry(&mp) < 1e-9);
                assert!(hermitian_asymmetry(&pm) < 1e-9);
            }
        }
    }

    #[test]
    fn polar_of_zero_is_identity() {
        let z = ComplexMatrix::zeros(3, 3);
        let (r, v) = polar_decomposition(&z, DEFAULT_TOL).unwrap();
        assert_eq!(r, z);
        assert!(distance(&v, &identity(3)) < 1e-14);
    }

    #[test]
    fn polar_of_rank_deficient_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 3);
        let b = random_matrix(&mut rng, 3);
        // Rank-one, non-normal.
        let m = a.column(0) * b.row(1);
        let (r, v) = polar_decomposition(&m, DEFAULT_TOL).unwrap();
        assert!(distance(&(&v * v.adjoint()), &identity(3)) < 1e-12);
        assert!(distance(&(&r * &v), &m) < 1e-12);
        assert!(distance(&(&r * &r), &(&m * m.adjoint())) < 1e-12);
        assert!(hermitian_asymmetry(&r) < 1e-14);
    }

    #[test]
    fn polar_of_singular_normal_matrix_is_identity_on_kernel() {
        let m = diag(&[0.5, 0.0, 2.0]);
        let (r, v) = polar_decomposition(&m, DEFAULT_TOL).unwrap();
        assert!(distance(&r, &m) < 1e-15);
        assert!(distance(&v, &identity(3)) < 1e-14);
    }

    #[test]
    fn polar_of_nearly_degenerate_hermitian_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = random_matrix(&mut rng, 3).qr().q();
        let m = &q * diag(&[0.9143934102620518, 0.9126722136514265, 0.4946074007160311]) * q.adjoint();
        let (r, v) = polar_decomposition(&m, DEFAULT_TOL).unwrap();
        assert!(distance(&(&r * &v), &m) < 1e-14);
        assert!(distance(&v, &identity(3)) < 1e-13);
        assert!(distance(&r, &m) < 1e-13);
    }

    #[test]
    fn polar_matches_sqrt_for_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(&mut rng, 4);
        let (r, v) = polar_decomposition(&m, DEFAULT_TOL).unwrap();
        let root = hermitian_sqrt(&(&m * m.adjoint()), DEFAULT_TOL).unwrap();
        assert!(distance(&r, &root) < 1e-12);
        assert!(distance(&(&v * v.adjoint()), &identity(4)) < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn sqrt_commutes_with_input(seed in any::<u64>(), n in 1usize..6) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let m = random_psd(&mut rng, n);
                let r = hermitian_sqrt(&m, DEFAULT_TOL).unwrap();
                prop_assert!(distance(&(&r * &m), &(&m * &r)) < 1e-10 * (1.0 + spectral_norm(&m)));
            }

            #[test]
            fn sqrt_of_commuting_pair_commutes(seed in any::<u64>(), n in 1usize..6) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                // Shared eigenbasis from a random unitary.
                let q = random_matrix(&mut rng, n).qr().q();
                let d1: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.0)).collect();
                let d2: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.0)).collect();
                let m1 = &q * diag(&d1) * q.adjoint();
                let m2 = &q * diag(&d2) * q.adjoint();
                let r1 = hermitian_sqrt(&m1, DEFAULT_TOL).unwrap();
                let r2 = hermitian_sqrt(&m2, DEFAULT_TOL).unwrap();
                prop_assert!(distance(&(&r1 * &r2), &(&r2 * &r1)) < 1e-9);
            }
        }
    }
}
