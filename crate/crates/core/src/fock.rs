//! Brute-force density matrices in a truncated photon-number basis.
//!
//! Loss and gain are realized as explicit unitaries on the field mode plus a
//! vacuum ancilla (a beam splitter and a two-mode squeezer), obtained by
//! exponentiating the truncated generator, followed by a trace over the
//! ancilla. Both generators conserve a photon-number combination, so the
//! unitary is exponentiated one invariant sector at a time, and with the
//! ancilla starting in vacuum only the first column of each sector is needed:
//! it holds the amplitudes of the induced Kraus maps.
//!
//! Basis index of an N-mode state: `Σ n_k · dim^(N-1-k)` (mode 0 most
//! significant). Probability that leaves the truncated space is tracked as
//! `leak`; moments and Wigner values are taken on the renormalized state.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{self, GaussianState};
use crate::network::{InputState, PipelineSpec};
use crate::numerics::ComplexMatrix;

/// Default bound on leaked probability.
pub const DEFAULT_LEAK_BOUND: f64 = 1e-8;

/// Largest total Hilbert-space dimension accepted.
pub const MAX_TOTAL_DIM: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    dim: usize,
    modes: usize,
    rho: ComplexMatrix,
    leak: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    /// Probability lost beyond the truncation.
    pub leak: f64,
    /// Highest photon number carrying population above 1e-15 in any mode.
    pub max_occupancy: usize,
}

impl FockState {
    /// Wraps a density matrix. `leak` is the probability already lost.
    pub fn from_density(rho: ComplexMatrix, dim: usize, modes: usize, leak: f64) -> Result<Self> {
        let total = checked_total(dim, modes)?;
        if rho.nrows() != total || rho.ncols() != total {
            return Err(Error::DimensionMismatch(format!(
                "density matrix is {}x{}, expected {total}x{total}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(FockState { dim, modes, rho, leak })
    }

    /// Single-mode number state `|n⟩⟨n|`.
    pub fn number(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::DimensionMismatch(format!(
                "|{n}⟩ does not fit in dimension {dim}"
            )));
        }
        let mut rho = ComplexMatrix::zeros(dim, dim);
        rho[(n, n)] = Complex64::new(1.0, 0.0);
        FockState::from_density(rho, dim, 1, 0.0)
    }

    pub fn vacuum(dim: usize) -> Self {
        FockState::number(0, dim.max(1)).expect("vacuum fits")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn leak(&self) -> f64 {
        self.leak
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    /// Tensor product; modes of `other` are appended.
    pub fn tensor(&self, other: &FockState) -> Result<FockState> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(
                "tensor factors with different truncations".into(),
            ));
        }
        checked_total(self.dim, self.modes + other.modes)?;
        Ok(FockState {
            dim: self.dim,
            modes: self.modes + other.modes,
            rho: self.rho.kronecker(&other.rho),
            leak: 1.0 - (1.0 - self.leak) * (1.0 - other.leak),
        })
    }

    pub fn truncation(&self) -> TruncationReport {
        let tr = self.trace().max(f64::MIN_POSITIVE);
        let mut max_occupancy = 0;
        for i in 0..self.rho.nrows() {
            if self.rho[(i, i)].re > 1e-15 * tr {
                for m in 0..self.modes {
                    max_occupancy = max_occupancy.max(self.digit(i, m));
                }
            }
        }
        TruncationReport {
            leak: self.leak,
            max_occupancy,
        }
    }

    /// Fails with `TruncationOverflow` when the leak exceeds `bound`.
    pub fn check_leak(&self, bound: f64) -> Result<()> {
        if self.leak > bound {
            return Err(Error::TruncationOverflow { leak: self.leak, bound });
        }
        Ok(())
    }

    fn stride(&self, mode: usize) -> usize {
        self.dim.pow((self.modes - 1 - mode) as u32)
    }

    fn digit(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % self.dim
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(Error::DimensionMismatch(format!(
                "mode {mode} out of range for {} modes",
                self.modes
            )));
        }
        Ok(())
    }

    /// Reduced density matrix of one mode.
    pub fn reduced(&self, mode: usize) -> Result<ComplexMatrix> {
        self.check_mode(mode)?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        let total = self.rho.nrows();
        let stride = self.stride(mode);
        for i in 0..total {
            let ni = self.digit(i, mode);
            let rest = i - ni * stride;
            for nj in 0..self.dim {
                out[(ni, nj)] += self.rho[(i, rest + nj * stride)];
            }
        }
        Ok(out)
    }
}

fn checked_total(dim: usize, modes: usize) -> Result<usize> {
    if dim == 0 || modes == 0 {
        return Err(Error::DimensionMismatch("empty Fock space".into()));
    }
    match dim.checked_pow(modes as u32) {
        Some(t) if t <= MAX_TOTAL_DIM => Ok(t),
        _ => Err(Error::Unsupported(format!(
            "{modes} modes at dimension {dim} exceed {MAX_TOTAL_DIM} basis states"
        ))),
    }
}

fn pure(amplitudes: &[Complex64]) -> ComplexMatrix {
    let n = amplitudes.len();
    ComplexMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj())
}

/// Coherent state `e^{-|α|²/2} Σ αⁿ/√n! |n⟩`, cut at `dim`.
pub fn coherent_fock(alpha: Complex64, dim: usize) -> FockState {
    let dim = dim.max(1);
    let mut amps = Vec::with_capacity(dim);
    let mut amp = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        amps.push(amp);
        amp = amp * alpha / ((n + 1) as f64).sqrt();
    }
    let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    FockState {
        dim,
        modes: 1,
        rho: pure(&amps),
        leak: (1.0 - kept).max(0.0),
    }
}

fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Matrix elements `⟨m|D(β)|n⟩` for `m < rows`, `n < cols`, from the closed
/// form with associated Laguerre polynomials. Unlike powers of the truncated
/// generator these are exact for every retained element.
pub fn displacement_matrix(beta: Complex64, rows: usize, cols: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rows, cols);
    let x = beta.norm_sqr();
    if x == 0.0 {
        for i in 0..rows.min(cols) {
            out[(i, i)] = Complex64::new(1.0, 0.0);
        }
        return out;
    }
    let lf = log_factorials(rows.max(cols));
    let ln_abs = beta.norm().ln();
    let unit = beta / beta.norm();
    let span = rows.max(cols);
    for k in 0..span {
        let below = unit.powu(k as u32);
        let above = (-unit.conj()).powu(k as u32);
        // L_lo^{(k)}(x) by forward recurrence in lo.
        let (mut prev, mut cur) = (0.0f64, 1.0f64);
        for lo in 0..span {
            if lo > 0 {
                let next =
                    ((2.0 * (lo - 1) as f64 + 1.0 + k as f64 - x) * cur - ((lo - 1 + k) as f64) * prev) / lo as f64;
                prev = cur;
                cur = next;
            }
            let hi = lo + k;
            if hi >= span {
                break;
            }
            if cur == 0.0 {
                continue;
            }
            let log_mag = 0.5 * (lf[lo] - lf[hi]) + k as f64 * ln_abs - x / 2.0 + cur.abs().ln();
            let value = cur.signum() * log_mag.exp();
            if hi < rows && lo < cols {
                out[(hi, lo)] = below * value;
            }
            if k > 0 && lo < rows && hi < cols {
                out[(lo, hi)] = above * value;
            }
        }
    }
    out
}

/// Displaced thermal state `D(α)·ρ_th(n̄)·D(α)⁺`, cut at `dim`.
pub fn displaced_thermal_fock(alpha: Complex64, nbar: f64, dim: usize) -> Result<FockState> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(Error::NegativeOccupation(nbar));
    }
    if nbar == 0.0 {
        return Ok(coherent_fock(alpha, dim));
    }
    let dim = dim.max(1);
    let ratio = nbar / (nbar + 1.0);
    // Thermal populations beyond `work` are below 1e-18.
    let work = ((-18.0 * 10f64.ln() / ratio.ln()).ceil() as usize).max(dim) + dim;
    let disp = displacement_matrix(alpha, dim, work);
    let mut rho = ComplexMatrix::zeros(dim, dim);
    let mut p = 1.0 / (nbar + 1.0);
    for n in 0..work {
        let col = disp.column(n);
        for i in 0..dim {
            let ci = col[i] * p;
            for j in 0..dim {
                rho[(i, j)] += ci * col[j].conj();
            }
        }
        p *= ratio;
    }
    let kept: f64 = rho.diagonal().iter().map(|z| z.re).sum();
    Ok(FockState {
        dim,
        modes: 1,
        rho,
        leak: (1.0 - kept).max(0.0),
    })
}

/// Kraus amplitudes of a channel that moves `|n⟩ → |n + direction·q⟩` for
/// ancilla outcome `q`: `amps[n][q]`.
struct ShiftKraus {
    direction: isize,
    amps: Vec<Vec<f64>>,
}

fn sector_column(generator: DMatrix<f64>) -> Vec<f64> {
    generator.exp().column(0).iter().copied().collect()
}

/// Beam splitter `exp(θ(a·h⁺ - a⁺·h))` with `cos θ = t`, per sector of fixed
/// total photon number `n`, basis `|n - j⟩|j⟩`.
fn beam_splitter_kraus(t: f64, dim: usize) -> ShiftKraus {
    let theta = t.clamp(-1.0, 1.0).acos();
    let amps = (0..dim)
        .map(|n| {
            let size = n + 1;
            let mut g = DMatrix::<f64>::zeros(size, size);
            for j in 0..n {
                let w = theta * (((n - j) * (j + 1)) as f64).sqrt();
                g[(j + 1, j)] = w;
                g[(j, j + 1)] = -w;
            }
            sector_column(g)
        })
        .collect();
    ShiftKraus { direction: -1, amps }
}

/// Two-mode squeezer `exp(r(a⁺·h⁺ - a·h))` with `cosh r = g`, per sector of
/// fixed photon-number difference `k`, basis `|k + m⟩|m⟩`. Sectors are
/// truncated at field level `work`, well beyond `dim`.
fn squeezer_kraus(g: f64, dim: usize) -> ShiftKraus {
    let r = g.max(1.0).acosh();
    let work = dim + dim / 2 + 40;
    let amps = (0..dim)
        .map(|k| {
            let size = work - k;
            let mut gen = DMatrix::<f64>::zeros(size, size);
            for m in 0..size - 1 {
                let w = r * (((k + m + 1) * (m + 1)) as f64).sqrt();
                gen[(m + 1, m)] = w;
                gen[(m, m + 1)] = -w;
            }
            sector_column(gen)
        })
        .collect();
    ShiftKraus { direction: 1, amps }
}

fn apply_shift_kraus(state: &FockState, mode: usize, kraus: &ShiftKraus, leak_bound: f64) -> Result<FockState> {
    state.check_mode(mode)?;
    let dim = state.dim as isize;
    let stride = state.stride(mode) as isize;
    let total = state.rho.nrows();
    let mut out = ComplexMatrix::zeros(total, total);
    let mut leaked = 0.0;
    for j in 0..total {
        let nj = state.digit(j, mode);
        let aj = &kraus.amps[nj];
        for i in 0..total {
            let r = state.rho[(i, j)];
            if r.re == 0.0 && r.im == 0.0 {
                continue;
            }
            let ni = state.digit(i, mode);
            let ai = &kraus.amps[ni];
            for q in 0..ai.len().min(aj.len()) {
                let shift = kraus.direction * q as isize;
                let (ti, tj) = (ni as isize + shift, nj as isize + shift);
                if ti < 0 || tj < 0 {
                    break;
                }
                if ti >= dim || tj >= dim {
                    if i == j {
                        leaked += ai[q] * ai[q] * r.re;
                    }
                    continue;
                }
                let w = ai[q] * aj[q];
                let (oi, oj) = (
                    (i as isize + shift * stride) as usize,
                    (j as isize + shift * stride) as usize,
                );
                out[(oi, oj)] += r * w;
            }
        }
    }
    let next = FockState {
        dim: state.dim,
        modes: state.modes,
        rho: out,
        leak: state.leak + leaked.max(0.0),
    };
    next.check_leak(leak_bound)?;
    Ok(next)
}

/// Loss with amplitude transmission `t` on one mode.
pub fn loss_channel_fock(state: &FockState, t: f64, mode: usize, leak_bound: f64) -> Result<FockState> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::DomainError(format!("transmission {t} not in [0, 1]")));
    }
    apply_shift_kraus(state, mode, &beam_splitter_kraus(t, state.dim), leak_bound)
}

/// Phase-insensitive amplification with amplitude gain `g` on one mode.
pub fn gain_channel_fock(state: &FockState, g: f64, mode: usize, leak_bound: f64) -> Result<FockState> {
    if !(g.is_finite() && g >= 1.0) {
        return Err(Error::SubunityGain(g));
    }
    apply_shift_kraus(state, mode, &squeezer_kraus(g, state.dim), leak_bound)
}

/// Phase rotation `a → e^{iφ}·a` on one mode.
pub fn phase_shift_fock(state: &FockState, phi: f64, mode: usize) -> Result<FockState> {
    state.check_mode(mode)?;
    let mut out = state.clone();
    for j in 0..state.rho.ncols() {
        let nj = state.digit(j, mode) as f64;
        for i in 0..state.rho.nrows() {
            let ni = state.digit(i, mode) as f64;
            out.rho[(i, j)] *= Complex64::from_polar(1.0, phi * (ni - nj));
        }
    }
    Ok(out)
}

/// `Tr(O·ρ)` for an operator that maps basis state `s` to `c·|t⟩`.
fn expect(state: &FockState, op: impl Fn(usize) -> Option<(usize, Complex64)>) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for s in 0..state.rho.nrows() {
        if let Some((t, c)) = op(s) {
            acc += c * state.rho[(s, t)];
        }
    }
    acc / state.trace()
}

fn lower(state: &FockState, mode: usize, s: usize) -> Option<(usize, Complex64)> {
    let n = state.digit(s, mode);
    (n > 0).then(|| (s - state.stride(mode), Complex64::new((n as f64).sqrt(), 0.0)))
}

fn raise(state: &FockState, mode: usize, s: usize) -> Option<(usize, Complex64)> {
    let n = state.digit(s, mode);
    (n + 1 < state.dim).then(|| (s + state.stride(mode), Complex64::new(((n + 1) as f64).sqrt(), 0.0)))
}

fn compose(
    first: impl Fn(usize) -> Option<(usize, Complex64)>,
    second: impl Fn(usize) -> Option<(usize, Complex64)>,
) -> impl Fn(usize) -> Option<(usize, Complex64)> {
    move |s| {
        let (t, c1) = first(s)?;
        let (u, c2) = second(t)?;
        Some((u, c1 * c2))
    }
}

/// `⟨a_k⟩` per mode.
pub fn mean_amplitudes(state: &FockState) -> Vec<Complex64> {
    (0..state.modes)
        .map(|k| expect(state, |s| lower(state, k, s)))
        .collect()
}

/// `⟨a_k⁺a_k⟩` of one mode, on the renormalized state.
pub fn mean_photon_fock(state: &FockState, mode: usize) -> f64 {
    expect(state, |s| {
        (state.digit(s, mode) > 0).then(|| (s, Complex64::new(state.digit(s, mode) as f64, 0.0)))
    })
    .re
}

/// Symmetrized quadrature covariance with `x = (a + a⁺)/2`,
/// `p = (a - a⁺)/(2i)`, ordered `(x₁, p₁, …)`.
pub fn quadrature_covariance(state: &FockState) -> DMatrix<f64> {
    let n = state.modes;
    let mu = mean_amplitudes(state);
    // Central moments ⟨αᵢαⱼ⟩ and ⟨αᵢ⁺αⱼ⟩ with α = a - ⟨a⟩.
    let mut aa = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut ada = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            aa[i][j] = expect(state, compose(|s| lower(state, j, s), |s| lower(state, i, s))) - mu[i] * mu[j];
            ada[i][j] = expect(state, compose(|s| lower(state, j, s), |s| raise(state, i, s))) - mu[i].conj() * mu[j];
        }
    }
    let half = Complex64::new(0.5, 0.0);
    let half_i = Complex64::new(0.0, 0.5);
    // ξ = u·α + v·α⁺ for each quadrature.
    let coeffs = |q: usize| if q == 0 { (half, half) } else { (-half_i, half_i) };
    let ordered = |i: usize, ui: Complex64, vi: Complex64, j: usize, uj: Complex64, vj: Complex64| {
        let delta = if i == j { 1.0 } else { 0.0 };
        ui * uj * aa[i][j] + ui * vj * (ada[j][i] + delta) + vi * uj * ada[i][j] + vi * vj * aa[i][j].conj()
    };
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let (i, j) = (r / 2, c / 2);
        let (ui, vi) = coeffs(r % 2);
        let (uj, vj) = coeffs(c % 2);
        (0.5 * (ordered(i, ui, vi, j, uj, vj) + ordered(j, uj, vj, i, ui, vi))).re
    })
}

/// `Tr ρ²` of the renormalized state.
pub fn purity_fock(state: &FockState) -> f64 {
    let tr = state.trace();
    state.rho.iter().map(|z| z.norm_sqr()).sum::<f64>() / (tr * tr)
}

/// Wigner function of one mode by the displaced-parity formula
/// `W(α) = (2/π)·Tr[ρ·D(α)·(-1)^n·D(-α)] = (2/π)·Tr[ρ·D(2α)·(-1)^n]`.
pub fn wigner_fock(state: &FockState, mode: usize, point: Complex64) -> Result<f64> {
    let reduced = state.reduced(mode)?;
    let d = reduced.nrows();
    let disp = displacement_matrix(point * 2.0, d, d);
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..d {
        let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
        for m in 0..d {
            acc += reduced[(n, m)] * disp[(m, n)] * parity;
        }
    }
    let tr: f64 = reduced.diagonal().iter().map(|z| z.re).sum();
    Ok(2.0 / PI * acc.re / tr)
}

/// Trace distance `½‖ρ - σ‖₁` between two states of the same shape.
pub fn trace_distance(a: &FockState, b: &FockState) -> Result<f64> {
    if a.rho.shape() != b.rho.shape() {
        return Err(Error::DimensionMismatch("states of different shape".into()));
    }
    let diff = &a.rho - &b.rho;
    let herm = (&diff + diff.adjoint()).scale(0.5);
    Ok(0.5
        * nalgebra::SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .map(|l| l.abs())
            .sum::<f64>())
}

/// What to compare and how strictly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSpec {
    pub tol: f64,
    /// `(mode, α)` pairs at which both Wigner functions are evaluated.
    pub points: Vec<(usize, [f64; 2])>,
}

impl CompareSpec {
    /// Points at each mode's Gaussian mean and at the origin.
    pub fn around(state: &GaussianState, tol: f64) -> Self {
        let mut points = Vec::new();
        for (k, z) in state.mean().iter().enumerate() {
            points.push((k, [z.re, z.im]));
            points.push((k, [0.0, 0.0]));
        }
        CompareSpec { tol, points }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub mean_diff: f64,
    pub cov_diff: f64,
    pub purity_diff: f64,
    pub wigner_diff: f64,
    pub gaussian_purity: f64,
    pub fock_purity: f64,
    pub truncation: TruncationReport,
    pub tol: f64,
    pub passed: bool,
}

/// Compares a Gaussian state with a Fock-space state of the same modes.
pub fn compare(g_state: &GaussianState, f_state: &FockState, spec: &CompareSpec) -> Result<ComparisonReport> {
    if g_state.modes() != f_state.modes() {
        return Err(Error::DimensionMismatch(format!(
            "Gaussian state has {} modes, Fock state {}",
            g_state.modes(),
            f_state.modes()
        )));
    }
    let mean_diff = mean_amplitudes(f_state)
        .iter()
        .zip(g_state.mean().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let cov_diff = (quadrature_covariance(f_state) - g_state.cov()).amax();
    let gaussian_purity = gaussian::purity(g_state);
    let fock_purity = purity_fock(f_state);
    let mut wigner_diff = 0.0f64;
    for &(mode, [re, im]) in &spec.points {
        let z = Complex64::new(re, im);
        let wf = wigner_fock(f_state, mode, z)?;
        let wg = gaussian::wigner_at(g_state, mode, z);
        wigner_diff = wigner_diff.max((wf - wg).abs());
    }
    let purity_diff = (gaussian_purity - fock_purity).abs();
    let passed = [mean_diff, cov_diff, purity_diff, wigner_diff]
        .iter()
        .all(|d| *d <= spec.tol);
    Ok(ComparisonReport {
        mean_diff,
        cov_diff,
        purity_diff,
        wigner_diff,
        gaussian_purity,
        fock_purity,
        truncation: f_state.truncation(),
        tol: spec.tol,
        passed,
    })
}

/// Prepares a pipeline input in the truncated Fock space.
pub fn prepare_fock(input: &InputState, dim: usize) -> Result<FockState> {
    let factors: Vec<FockState> = match input {
        InputState::Coherent { alpha } => alpha.iter().map(|a| coherent_fock(*a, dim)).collect(),
        InputState::DisplacedThermal { alpha, nbar } => {
            if alpha.len() != nbar.len() {
                return Err(Error::DimensionMismatch(
                    "amplitude and occupation counts differ".into(),
                ));
            }
            alpha
                .iter()
                .zip(nbar)
                .map(|(a, n)| displaced_thermal_fock(*a, *n, dim))
                .collect::<Result<_>>()?
        }
    };
    let mut iter = factors.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::DimensionMismatch("input has no modes".into()))?;
    iter.try_fold(first, |acc, f| acc.tensor(&f))
}

/// Runs a pipeline in the Fock space and returns every stage (input first).
///
/// Only devices with diagonal transmission are supported: each diagonal
/// entry `|t|·e^{iφ}` becomes a loss or gain channel followed by a phase
/// rotation on that mode.
pub fn run_pipeline_fock(p: &PipelineSpec, dim: usize, leak_bound: f64) -> Result<Vec<FockState>> {
    p.check()?;
    let input = prepare_fock(&p.input, dim)?;
    input.check_leak(leak_bound)?;
    let mut stages = vec![input];
    for (idx, el) in p.elements.iter().enumerate() {
        let t = &el.device.transmission;
        let mut state = stages.last().expect("input stage").clone();
        for (i, &mode) in el.modes.iter().enumerate() {
            for j in 0..t.ncols() {
                if i != j && t[(i, j)].norm() > 1e-12 {
                    return Err(Error::Unsupported(format!(
                        "element {idx} couples modes; the Fock oracle handles diagonal devices only"
                    )));
                }
            }
            let z = t[(i, i)];
            let magnitude = z.norm();
            if magnitude < 1.0 {
                state = loss_channel_fock(&state, magnitude, mode, leak_bound)?;
            } else if magnitude > 1.0 {
                state = gain_channel_fock(&state, magnitude, mode, leak_bound)?;
            }
            let phase = z.arg();
            if phase != 0.0 {
                state = phase_shift_fock(&state, phase, mode)?;
            }
        }
        stages.push(state);
    }
    Ok(stages)
}
