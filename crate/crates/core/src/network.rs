//! Pipelines of devices, thermal-noise bookkeeping, and the classical PT
//! condition on refractive-index profiles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::device::{gain_device, loss_device, DeviceSpec};
use crate::error::{Error, Result};
use crate::gaussian::{apply_device, coherent_state, thermal_product, GaussianState};
use crate::numerics::diag;

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const K_B: f64 = 1.380_649e-23;

/// Unit system for temperatures. `Natural` sets `ħ = k_B = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Natural,
    Si,
}

impl Units {
    /// `ħ/k_B` in the chosen system.
    fn hbar_over_kb(self) -> f64 {
        match self {
            Units::Natural => 1.0,
            Units::Si => HBAR / K_B,
        }
    }
}

/// Input state of a pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum InputState {
    Coherent { alpha: Vec<Complex64> },
    DisplacedThermal { alpha: Vec<Complex64>, nbar: Vec<f64> },
}

impl InputState {
    pub fn modes(&self) -> usize {
        match self {
            InputState::Coherent { alpha } | InputState::DisplacedThermal { alpha, .. } => alpha.len(),
        }
    }

    pub fn prepare(&self) -> Result<GaussianState> {
        match self {
            InputState::Coherent { alpha } => Ok(coherent_state(alpha)),
            InputState::DisplacedThermal { alpha, nbar } => thermal_product(alpha, nbar),
        }
    }
}

/// A device bound to specific pipeline modes.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub device: DeviceSpec,
    pub modes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSpec {
    pub modes: usize,
    /// Angular frequency; only enters the effective temperature.
    pub omega: f64,
    pub input: InputState,
    pub elements: Vec<Element>,
}

impl PipelineSpec {
    /// Checks mode bindings against the declared mode count.
    pub fn check(&self) -> Result<()> {
        if self.input.modes() != self.modes {
            return Err(Error::DimensionMismatch(format!(
                "input declares {} modes, pipeline has {}",
                self.input.modes(),
                self.modes
            )));
        }
        for (i, el) in self.elements.iter().enumerate() {
            if el.modes.len() != el.device.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "element {i}: device has {} ports but {} modes are bound",
                    el.device.dim(),
                    el.modes.len()
                )));
            }
            if let Some(m) = el.modes.iter().find(|m| **m >= self.modes) {
                return Err(Error::DimensionMismatch(format!("element {i}: mode {m} out of range")));
            }
        }
        Ok(())
    }
}

/// Single-mode absorber with transmission `t`.
pub fn loss(t: f64) -> Result<DeviceSpec> {
    loss_device(&diag(&[t]), crate::numerics::DEFAULT_TOL)
}

/// Single-mode amplifier with gain `g`.
pub fn gain(g: f64) -> Result<DeviceSpec> {
    gain_device(&diag(&[g]), crate::numerics::DEFAULT_TOL)
}

/// Field state after every stage: index 0 is the input, index `k` the state
/// after element `k - 1`.
pub fn run_pipeline_stages(p: &PipelineSpec, tol: f64) -> Result<Vec<GaussianState>> {
    p.check()?;
    let mut stages = Vec::with_capacity(p.elements.len() + 1);
    stages.push(p.input.prepare()?);
    for el in &p.elements {
        let next = apply_device(stages.last().expect("input stage"), &el.device, &el.modes, tol)?;
        stages.push(next);
    }
    Ok(stages)
}

/// Final field state of a pipeline.
pub fn run_pipeline(p: &PipelineSpec, tol: f64) -> Result<GaussianState> {
    Ok(run_pipeline_stages(p, tol)?.pop().expect("at least the input stage"))
}

/// Thermal photons added by an amplifier with gain `g`: `g² - 1`.
pub fn thermal_occupation(g: f64) -> Result<f64> {
    if !(g.is_finite() && g >= 1.0) {
        return Err(Error::SubunityGain(g));
    }
    Ok(g * g - 1.0)
}

/// Bose-Einstein occupation `1 / (exp(ħω / k_B T) - 1)`.
pub fn bose_einstein(omega: f64, temperature: f64, units: Units) -> f64 {
    1.0 / (units.hbar_over_kb() * omega / temperature).exp_m1()
}

fn check_temperature_domain(t_loss: f64, omega: f64) -> Result<()> {
    if !(t_loss > 0.0 && t_loss < 1.0) {
        return Err(Error::DomainError(format!("transmission {t_loss} not in (0, 1)")));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::DomainError(format!("frequency {omega} not positive")));
    }
    Ok(())
}

/// Temperature whose Bose-Einstein occupation at `omega` equals the noise
/// `1/t² - 1` added by an amplifier compensating the loss `t`:
/// `T = -ħω / (k_B·ln(1 - t²))`.
pub fn effective_temperature(t_loss: f64, omega: f64, units: Units) -> Result<f64> {
    check_temperature_domain(t_loss, omega)?;
    Ok(-units.hbar_over_kb() * omega / (-t_loss * t_loss).ln_1p())
}

/// The variant with the logarithm as a factor, `-ħω/k_B · ln(1 - t²)`. It is
/// not consistent with the thermal occupation and is kept for comparison only.
pub fn effective_temperature_log_factor(t_loss: f64, omega: f64, units: Units) -> Result<f64> {
    check_temperature_domain(t_loss, omega)?;
    Ok(-units.hbar_over_kb() * omega * (-t_loss * t_loss).ln_1p())
}

/// Sampled complex refractive index `n(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexProfile {
    pub samples: Vec<IndexSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSample {
    pub x: f64,
    /// `[Re n, Im n]`.
    pub n: [f64; 2],
}

impl IndexProfile {
    pub fn from_fn(xs: &[f64], f: impl Fn(f64) -> Complex64) -> Self {
        IndexProfile {
            samples: xs
                .iter()
                .map(|&x| {
                    let n = f(x);
                    IndexSample { x, n: [n.re, n.im] }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtReport {
    /// `max |n(-x) - n*(x)|`.
    pub max_residual: f64,
    /// `max |n_R(-x) - n_R(x)|`.
    pub real_asymmetry: f64,
    /// `max |n_I(-x) + n_I(x)|`.
    pub imag_symmetry: f64,
    pub real_part_symmetric: bool,
    pub imag_part_antisymmetric: bool,
    pub pt_symmetric: bool,
}

/// Checks `n(-x) = n*(x)` on a profile sampled symmetrically about the origin.
pub fn check_pt_profile(profile: &IndexProfile, tol: f64) -> Result<PtReport> {
    let samples = &profile.samples;
    let mut report = PtReport {
        max_residual: 0.0,
        real_asymmetry: 0.0,
        imag_symmetry: 0.0,
        real_part_symmetric: true,
        imag_part_antisymmetric: true,
        pt_symmetric: true,
    };
    for s in samples {
        let partner = samples
            .iter()
            .filter(|o| (o.x + s.x).abs() <= tol * s.x.abs().max(1.0))
            .min_by(|a, b| (a.x + s.x).abs().total_cmp(&(b.x + s.x).abs()))
            .ok_or(Error::AsymmetricSampling(s.x))?;
        let here = Complex64::new(s.n[0], s.n[1]);
        let mirror = Complex64::new(partner.n[0], partner.n[1]);
        report.max_residual = report.max_residual.max((mirror - here.conj()).norm());
        report.real_asymmetry = report.real_asymmetry.max((mirror.re - here.re).abs());
        report.imag_symmetry = report.imag_symmetry.max((mirror.im + here.im).abs());
    }
    report.real_part_symmetric = report.real_asymmetry <= tol;
    report.imag_part_antisymmetric = report.imag_symmetry <= tol;
    report.pt_symmetric = report.max_residual <= tol;
    Ok(report)
}
