//! Lossy and amplifying linear N-port devices and their field+device dilations.
//!
//! A device maps input field amplitudes `a` and device amplitudes `d` to output
//! amplitudes `b = T·a + A·d`, with `T·T⁺ + σ·A·A⁺ = I`. For absorption
//! (`σ = +1`) `d` is a device annihilation operator; for amplification
//! (`σ = -1`) it is a creation operator, which is what makes the enlarged map
//! pseudo-unitary rather than unitary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, hermitian_sqrt, identity, polar_decomposition, ComplexMatrix};

/// Sign of the device constraint: compact (loss) or non-compact (gain).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Loss,
    Gain,
}

impl Signature {
    /// `+1` for loss, `-1` for gain.
    pub fn sign(self) -> f64 {
        match self {
            Signature::Loss => 1.0,
            Signature::Gain => -1.0,
        }
    }

    pub fn from_sign(sigma: i32) -> Option<Self> {
        match sigma {
            1 => Some(Signature::Loss),
            -1 => Some(Signature::Gain),
            _ => None,
        }
    }
}

/// One frequency-resolved linear optical element.
///
/// The fields are public so that arbitrary triples can be checked with
/// [`validate_device`]; the constructors [`loss_device`] and [`gain_device`]
/// always produce admissible devices.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSpec {
    pub transmission: ComplexMatrix,
    pub coupling: ComplexMatrix,
    pub signature: Signature,
}

impl DeviceSpec {
    pub fn dim(&self) -> usize {
        self.transmission.nrows()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Spectral norm of `T·T⁺ + σ·A·A⁺ - I`.
    pub residual: f64,
    pub min_singular: f64,
    pub max_singular: f64,
    pub signature: Signature,
    pub passed: bool,
}

/// Checks the defining constraint and that the singular values of `T` sit on
/// the side of one required by the signature.
pub fn validate_device(spec: &DeviceSpec, tol: f64) -> Result<ValidationReport> {
    let t = &spec.transmission;
    let a = &spec.coupling;
    if t.nrows() != t.ncols() || a.nrows() != a.ncols() || t.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "T is {}x{}, A is {}x{}",
            t.nrows(),
            t.ncols(),
            a.nrows(),
            a.ncols()
        )));
    }
    let n = t.nrows();
    let sigma = spec.signature.sign();
    let gram = t * t.adjoint() + (a * a.adjoint()).scale(sigma) - identity(n);
    let residual = numerics::spectral_norm(&gram);
    let sv = numerics::singular_values(t);
    let min_singular = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let max_singular = sv.iter().copied().fold(0.0, f64::max);
    let side_ok = match spec.signature {
        Signature::Loss => max_singular <= 1.0 + tol,
        Signature::Gain => min_singular >= 1.0 - tol,
    };
    Ok(ValidationReport {
        residual,
        min_singular,
        max_singular,
        signature: spec.signature,
        passed: residual <= tol && side_ok,
    })
}

/// Absorbing device with coupling `A = sqrt(I - T·T⁺)`.
pub fn loss_device(t: &ComplexMatrix, tol: f64) -> Result<DeviceSpec> {
    require_square(t)?;
    let max_singular = numerics::singular_values(t).into_iter().fold(0.0, f64::max);
    if max_singular > 1.0 + tol {
        return Err(Error::GainNotLoss { max_singular });
    }
    let n = t.nrows();
    let coupling = hermitian_sqrt(&(identity(n) - t * t.adjoint()), tol)?;
    Ok(DeviceSpec {
        transmission: t.clone(),
        coupling,
        signature: Signature::Loss,
    })
}

/// Amplifying device with coupling `A = sqrt(T·T⁺ - I)`.
pub fn gain_device(t: &ComplexMatrix, tol: f64) -> Result<DeviceSpec> {
    require_square(t)?;
    let min_singular = numerics::singular_values(t).into_iter().fold(f64::INFINITY, f64::min);
    if min_singular < 1.0 - tol {
        return Err(Error::LossNotGain { min_singular });
    }
    let n = t.nrows();
    let coupling = hermitian_sqrt(&(t * t.adjoint() - identity(n)), tol)?;
    Ok(DeviceSpec {
        transmission: t.clone(),
        coupling,
        signature: Signature::Gain,
    })
}

fn require_square(t: &ComplexMatrix) -> Result<()> {
    if t.nrows() != t.ncols() || t.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "transmission must be square and non-empty, got {}x{}",
            t.nrows(),
            t.ncols()
        )));
    }
    Ok(())
}

/// The enlarged field+device map `β = Λ·α` together with its metric
/// `J = diag(I, σI)`, satisfying `Λ·J·Λ⁺ = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    pub lambda: ComplexMatrix,
    pub metric: ComplexMatrix,
    pub signature: Signature,
}

impl Dilation {
    /// Number of field modes (half the size of `Λ`).
    pub fn field_dim(&self) -> usize {
        self.lambda.nrows() / 2
    }

    /// `J·Λ⁺·J`, which equals `Λ⁻¹` for a pseudo-unitary `Λ`.
    pub fn inverse(&self) -> ComplexMatrix {
        &self.metric * self.lambda.adjoint() * &self.metric
    }

    /// Spectral norm of `Λ·J·Λ⁺ - J`.
    pub fn pseudo_unitarity_residual(&self) -> f64 {
        let g = &self.lambda * &self.metric * self.lambda.adjoint() - &self.metric;
        numerics::spectral_norm(&g)
    }

    /// Spectral norm of `Λ·(J·Λ⁺·J) - I`.
    pub fn inversion_residual(&self) -> f64 {
        let n = self.lambda.nrows();
        numerics::spectral_norm(&(&self.lambda * self.inverse() - identity(n)))
    }
}

/// Builds `Λ = [[T, A], [-σ·S·C⁻¹·T, C·S⁻¹·A]]` with `C = sqrt(T·T⁺)` and
/// `S = sqrt(A·A⁺)`.
///
/// The inverses are evaluated through polar decompositions `T = C·U`,
/// `A = S·V`, so the lower blocks read `-σ·S·U` and `C·V`. Where `C` or `S`
/// is singular the unitary factor is completed on the null space; for a
/// lossless element this yields `Λ = T ⊕ I`.
pub fn dilation(spec: &DeviceSpec, tol: f64) -> Result<Dilation> {
    let report = validate_device(spec, tol)?;
    if !report.passed {
        return Err(Error::ConstraintViolated {
            residual: report.residual,
        });
    }
    let n = spec.dim();
    let t = &spec.transmission;
    let a = &spec.coupling;
    let sigma = spec.signature.sign();
    let (c_root, u) = polar_decomposition(t, tol)?;
    let (s_root, v) = polar_decomposition(a, tol)?;

    let mut lambda = ComplexMatrix::zeros(2 * n, 2 * n);
    lambda.view_mut((0, 0), (n, n)).copy_from(t);
    lambda.view_mut((0, n), (n, n)).copy_from(a);
    lambda.view_mut((n, 0), (n, n)).copy_from(&(&s_root * &u).scale(-sigma));
    lambda.view_mut((n, n), (n, n)).copy_from(&(&c_root * &v));

    let mut metric = identity(2 * n);
    for i in n..2 * n {
        metric[(i, i)] *= sigma;
    }
    Ok(Dilation {
        lambda,
        metric,
        signature: spec.signature,
    })
}
