//! N-mode Gaussian states in symmetric (Wigner) ordering.
//!
//! Quadratures are `a = x + i·p`, ordered `(x₁, p₁, …, x_N, p_N)`. The vacuum
//! has covariance `I/4`, so a coherent state `|a₀⟩` has the Wigner function
//! `(2/π)·exp(-2|a - a₀|²)`. Do not mix this with the variance-1/2 convention
//! common elsewhere.
//!
//! Devices act through their dilation: the state is extended with device
//! modes in vacuum, the first and second moments are pushed through the real
//! representation of `Λ`, and the device quadratures are dropped.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::device::{dilation, DeviceSpec, Dilation, Signature};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_sqrt, ComplexMatrix};

/// Quadrature variance of the vacuum.
pub const VACUUM_VARIANCE: f64 = 0.25;

/// Absolute tolerance on symplectic eigenvalues below the vacuum level.
pub const ADMISSIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<Complex64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state after checking symmetry and the uncertainty bound.
    pub fn new(mean: DVector<Complex64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if cov.nrows() != 2 * n || cov.ncols() != 2 * n {
            return Err(Error::DimensionMismatch(format!(
                "{n} modes need a {0}x{0} covariance, got {1}x{2}",
                2 * n,
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) || cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::InadmissibleState("non-finite moments".into()));
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > ADMISSIBILITY_TOL * cov.amax().max(1.0) {
            return Err(Error::InadmissibleState(format!("covariance asymmetric by {asym:.3e}")));
        }
        let cov = (&cov + cov.transpose()).scale(0.5);
        let state = GaussianState { mean, cov };
        let nu = state.symplectic_eigenvalues()?;
        if let Some(min) = nu.first() {
            if *min < VACUUM_VARIANCE - ADMISSIBILITY_TOL {
                return Err(Error::InadmissibleState(format!(
                    "symplectic eigenvalue {min:.6e} below vacuum level"
                )));
            }
        }
        Ok(state)
    }

    pub fn vacuum(modes: usize) -> Self {
        GaussianState {
            mean: DVector::zeros(modes),
            cov: DMatrix::identity(2 * modes, 2 * modes).scale(VACUUM_VARIANCE),
        }
    }

    pub fn modes(&self) -> usize {
        self.mean.len()
    }

    /// Complex amplitude `⟨a⟩` per mode.
    pub fn mean(&self) -> &DVector<Complex64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Mean as the real quadrature vector `(x₁, p₁, …)`.
    pub fn quadrature_mean(&self) -> DVector<f64> {
        DVector::from_fn(2 * self.modes(), |i, _| {
            let z = self.mean[i / 2];
            if i % 2 == 0 {
                z.re
            } else {
                z.im
            }
        })
    }

    /// 2×2 covariance block of one mode.
    pub fn mode_cov(&self, mode: usize) -> DMatrix<f64> {
        self.cov.view((2 * mode, 2 * mode), (2, 2)).into_owned()
    }

    /// Symplectic eigenvalues in ascending order.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.modes();
        let vc = self.cov.map(|v| Complex64::new(v, 0.0));
        let root = hermitian_sqrt(&vc, ADMISSIBILITY_TOL)
            .map_err(|e| Error::InadmissibleState(format!("covariance not positive semidefinite: {e}")))?;
        // i·Ω is Hermitian; its congruence with V^{1/2} has eigenvalues ±ν.
        let mut omega = ComplexMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            omega[(2 * k, 2 * k + 1)] = Complex64::new(0.0, 1.0);
            omega[(2 * k + 1, 2 * k)] = Complex64::new(0.0, -1.0);
        }
        let h = &root * omega * &root;
        let h = (&h + h.adjoint()).scale(0.5);
        let mut eig: Vec<f64> = nalgebra::SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        let mut nu: Vec<f64> = eig.into_iter().take(n).collect();
        nu.sort_by(f64::total_cmp);
        Ok(nu)
    }

    /// Reduced state on the listed modes, in the listed order.
    pub fn marginal(&self, modes: &[usize]) -> Result<GaussianState> {
        check_modes(modes, self.modes())?;
        let mean = DVector::from_iterator(modes.len(), modes.iter().map(|&m| self.mean[m]));
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.cov[(idx[i], idx[j])]);
        Ok(GaussianState { mean, cov })
    }

    /// Tensor product with another state (its modes are appended).
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (n, m) = (self.modes(), other.modes());
        let mut mean = DVector::zeros(n + m);
        mean.rows_mut(0, n).copy_from(&self.mean);
        mean.rows_mut(n, m).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(2 * (n + m), 2 * (n + m));
        cov.view_mut((0, 0), (2 * n, 2 * n)).copy_from(&self.cov);
        cov.view_mut((2 * n, 2 * n), (2 * m, 2 * m)).copy_from(&other.cov);
        GaussianState { mean, cov }
    }
}

fn check_modes(modes: &[usize], available: usize) -> Result<()> {
    for (i, m) in modes.iter().enumerate() {
        if *m >= available {
            return Err(Error::DimensionMismatch(format!(
                "mode {m} out of range for {available} modes"
            )));
        }
        if modes[..i].contains(m) {
            return Err(Error::DimensionMismatch(format!("mode {m} bound twice")));
        }
    }
    Ok(())
}

/// Product of coherent states with the given amplitudes.
pub fn coherent_state(alpha: &[Complex64]) -> GaussianState {
    GaussianState {
        mean: DVector::from_column_slice(alpha),
        cov: DMatrix::identity(2 * alpha.len(), 2 * alpha.len()).scale(VACUUM_VARIANCE),
    }
}

/// Single-mode thermal state with occupation `nbar`, displaced to `alpha`.
pub fn displaced_thermal_state(alpha: Complex64, nbar: f64) -> Result<GaussianState> {
    thermal_product(&[alpha], &[nbar])
}

/// Product of displaced thermal states, one per mode.
pub fn thermal_product(alpha: &[Complex64], nbar: &[f64]) -> Result<GaussianState> {
    if alpha.len() != nbar.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes but {} occupations",
            alpha.len(),
            nbar.len()
        )));
    }
    let mut cov = DMatrix::zeros(2 * nbar.len(), 2 * nbar.len());
    for (k, &n) in nbar.iter().enumerate() {
        if !(n.is_finite() && n >= 0.0) {
            return Err(Error::NegativeOccupation(n));
        }
        let v = (2.0 * n + 1.0) * VACUUM_VARIANCE;
        cov[(2 * k, 2 * k)] = v;
        cov[(2 * k + 1, 2 * k + 1)] = v;
    }
    Ok(GaussianState {
        mean: DVector::from_column_slice(alpha),
        cov,
    })
}

/// Real quadrature representation of a complex map on annihilation operators:
/// each entry `z` becomes the block `[[Re z, -Im z], [Im z, Re z]]`.
pub fn real_representation(m: &ComplexMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(2 * m.nrows(), 2 * m.ncols(), |i, j| {
        let z = m[(i / 2, j / 2)];
        match (i % 2, j % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    })
}

/// Pushes the state through the dilation of `spec` acting on `modes`, and
/// returns the enlarged state: the original modes followed by the output
/// device modes.
///
/// For amplifiers the device entry of `Λ` is a creation operator; it is
/// handled by reflecting `p → -p` on the device quadratures on both sides of
/// the map, so the returned device modes are stored as ordinary amplitudes.
pub fn push_forward(state: &GaussianState, spec: &DeviceSpec, modes: &[usize], tol: f64) -> Result<GaussianState> {
    let dil = dilation(spec, tol)?;
    push_forward_dilation(state, &dil, modes)
}

pub(crate) fn push_forward_dilation(state: &GaussianState, dil: &Dilation, modes: &[usize]) -> Result<GaussianState> {
    let k = dil.field_dim();
    if modes.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "device acts on {k} modes but {} were bound",
            modes.len()
        )));
    }
    check_modes(modes, state.modes())?;
    let n = state.modes();
    let total = n + k;
    let extended = state.tensor(&GaussianState::vacuum(k));

    let bound: Vec<usize> = modes.iter().copied().chain(n..total).collect();
    let block = real_representation(&dil.lambda);
    let mut map = DMatrix::<f64>::identity(2 * total, 2 * total);
    for (bi, &ri) in bound.iter().enumerate() {
        for (bj, &rj) in bound.iter().enumerate() {
            for (di, dj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                map[(2 * ri + di, 2 * rj + dj)] = block[(2 * bi + di, 2 * bj + dj)];
            }
        }
    }
    if dil.signature == Signature::Gain {
        for d in n..total {
            let p = 2 * d + 1;
            map.row_mut(p).neg_mut();
            map.column_mut(p).neg_mut();
        }
    }

    let mean_q = &map * extended.quadrature_mean();
    let cov = &map * &extended.cov * map.transpose();
    let mean = DVector::from_fn(total, |i, _| Complex64::new(mean_q[2 * i], mean_q[2 * i + 1]));
    GaussianState::new(mean, cov)
}

/// Applies a device to the listed modes and traces out the device.
pub fn apply_device(state: &GaussianState, spec: &DeviceSpec, modes: &[usize], tol: f64) -> Result<GaussianState> {
    let n = state.modes();
    let out = push_forward(state, spec, modes, tol)?;
    out.marginal(&(0..n).collect::<Vec<_>>())
}

/// Purity `Tr ρ² = 1 / (4^N·sqrt(det V))`.
pub fn purity(state: &GaussianState) -> f64 {
    let n = state.modes() as i32;
    1.0 / (4f64.powi(n) * state.cov.determinant().sqrt())
}

/// Mean photon number `V_xx + V_pp + |⟨a⟩|² - 1/2` of one mode.
pub fn mean_photon(state: &GaussianState, mode: usize) -> f64 {
    let v = state.mode_cov(mode);
    v[(0, 0)] + v[(1, 1)] + state.mean[mode].norm_sqr() - 0.5
}

/// Thermal occupation implied by one mode's covariance, `V_xx + V_pp - 1/2`.
pub fn inferred_occupation(state: &GaussianState, mode: usize) -> f64 {
    let v = state.mode_cov(mode);
    v[(0, 0)] + v[(1, 1)] - 0.5
}

/// Marginal Wigner function of one mode at `a = x + i·p`.
pub fn wigner_at(state: &GaussianState, mode: usize, point: Complex64) -> f64 {
    let v = state.mode_cov(mode);
    let det = v[(0, 0)] * v[(1, 1)] - v[(0, 1)] * v[(1, 0)];
    let dx = point.re - state.mean[mode].re;
    let dp = point.im - state.mean[mode].im;
    // δᵀ V⁻¹ δ with the 2×2 adjugate.
    let q = (v[(1, 1)] * dx * dx - (v[(0, 1)] + v[(1, 0)]) * dx * dp + v[(0, 0)] * dp * dp) / det;
    (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
}

/// Full N-mode Wigner function at the amplitudes `point`.
pub fn wigner_point(state: &GaussianState, point: &[Complex64]) -> Result<f64> {
    let n = state.modes();
    if point.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} coordinates for {n} modes",
            point.len()
        )));
    }
    let delta = DVector::from_fn(2 * n, |i, _| {
        let z = point[i / 2] - state.mean[i / 2];
        if i % 2 == 0 {
            z.re
        } else {
            z.im
        }
    });
    let det = state.cov.determinant();
    let inv = state
        .cov
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InadmissibleState("singular covariance".into()))?;
    let q = delta.dot(&(inv * &delta));
    Ok((-0.5 * q).exp() / ((2.0 * PI).powi(n as i32) * det.sqrt()))
}

/// One axis of a sampling window: `count` evenly spaced points from `min` to
/// `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        GridAxis { min, max, count }
    }

    /// Axis of `count` points spanning `center ± half_width`.
    pub fn centered(center: f64, half_width: f64, count: usize) -> Self {
        GridAxis::new(center - half_width, center + half_width, count)
    }

    pub fn step(&self) -> f64 {
        if self.count > 1 {
            (self.max - self.min) / (self.count - 1) as f64
        } else {
            0.0
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        if self.count > 1 && i + 1 == self.count {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    fn is_empty(&self) -> bool {
        self.count == 0 || !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max)
    }
}

/// Sampled single-mode Wigner function. Values are row-major with `x` as the
/// outer index: `values[i * p.count + j] = W(x_i, p_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub mode: usize,
    pub x: GridAxis,
    pub p: GridAxis,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p.count + j]
    }

    /// `Σ W·Δx·Δp`.
    pub fn riemann_sum(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.x.step() * self.p.step()
    }

    /// Location and value of the largest sample.
    pub fn peak(&self) -> (f64, f64, f64) {
        let (k, w) = self
            .values
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |best, (k, w)| if w > best.1 { (k, w) } else { best },
            );
        (self.x.point(k / self.p.count), self.p.point(k % self.p.count), w)
    }

    /// CSV with header `x,p,w`, one row per sample in storage order.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(24 * self.values.len() + 8);
        out.push_str("x,p,w\n");
        for i in 0..self.x.count {
            let x = self.x.point(i);
            for j in 0..self.p.count {
                out.push_str(&format!("{},{},{}\n", x, self.p.point(j), self.value(i, j)));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid serializes")
    }
}

/// Samples the marginal Wigner function of `mode` over a window.
pub fn wigner(state: &GaussianState, mode: usize, x: GridAxis, p: GridAxis) -> Result<WignerGrid> {
    if mode >= state.modes() {
        return Err(Error::DimensionMismatch(format!("mode {mode} out of range")));
    }
    if x.is_empty() || p.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let mut values = Vec::with_capacity(x.count * p.count);
    for i in 0..x.count {
        let xi = x.point(i);
        for j in 0..p.count {
            values.push(wigner_at(state, mode, Complex64::new(xi, p.point(j))));
        }
    }
    Ok(WignerGrid { mode, x, p, values })
}
