//! Pipeline files and the commands behind the `qgls` binary.
//!
//! A pipeline file is JSON:
//!
//! ```json
//! {
//!   "modes": 1,
//!   "omega": 1.0,
//!   "input": { "kind": "coherent", "alpha": [[3, 3]] },
//!   "elements": [
//!     { "kind": "loss", "t": 0.6666666666666666, "modes": [0] },
//!     { "kind": "gain", "g": 1.5, "modes": [0] }
//!   ]
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows of
//! such pairs. `loss` and `gain` take either a scalar (`t` / `g`) or a
//! `matrix`; `unitary` takes a `matrix`. `modes` defaults to `0..n`. Unknown
//! keys are rejected.
//!
//! Every command returns its output as a value; the binary only does I/O.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::device::{gain_device, loss_device, validate_device, Signature, ValidationReport};
use crate::error::Error;
use crate::fock::{compare, run_pipeline_fock, CompareSpec, ComparisonReport};
use crate::gaussian::{inferred_occupation, mean_photon, purity, wigner, GaussianState, GridAxis, WignerGrid};
use crate::network::{
    check_pt_profile, effective_temperature, effective_temperature_log_factor, run_pipeline_stages, thermal_occupation,
    Element, IndexProfile, InputState, PipelineSpec, PtReport, Units,
};
use crate::numerics::{self, ComplexMatrix};

/// Failure of a command, carrying its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Exit 1.
    Io(String),
    /// Exit 2: malformed document, with 1-based line and column.
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    /// Exit 2: well-formed document describing an invalid pipeline.
    Semantic(String),
    /// Exit 2: unparsable grid specification.
    BadGrid(String),
    /// Exit 3.
    Numerical(String),
    /// Exit 4.
    Truncation(String),
    /// Exit 5: the oracle ran but the representations disagree.
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Syntax { .. } | CliError::Semantic(_) | CliError::BadGrid(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Truncation(_) => 4,
            CliError::Mismatch(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Syntax { line, column, message } => write!(f, "SyntaxError at {line}:{column}: {message}"),
            CliError::Semantic(m) => write!(f, "SemanticError: {m}"),
            CliError::BadGrid(m) => write!(f, "BadGrid: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Truncation(m) => write!(f, "TruncationOverflow: {m}"),
            CliError::Mismatch(m) => write!(f, "oracle mismatch: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn numerical(e: Error) -> CliError {
    match e {
        Error::TruncationOverflow { .. } => CliError::Truncation(e.to_string()),
        _ => CliError::Numerical(e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineFile {
    pub modes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    pub input: InputEntry,
    #[serde(default)]
    pub elements: Vec<ElementEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputEntry {
    Coherent { alpha: Vec<[f64; 2]> },
    DisplacedThermal { alpha: Vec<[f64; 2]>, nbar: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Loss,
    Gain,
    Unitary,
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementKind::Loss => "loss",
            ElementKind::Gain => "gain",
            ElementKind::Unitary => "unitary",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementEntry {
    pub kind: ElementKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<usize>>,
}

fn complex(pair: &[f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix, String> {
    let n = rows.len();
    if n == 0 {
        return Err("matrix has no rows".into());
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(format!("matrix row {i} has {} entries, expected {n}", r.len()));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| complex(&rows[i][j])))
}

impl ElementEntry {
    fn transmission(&self) -> Result<ComplexMatrix, String> {
        let scalar = match self.kind {
            ElementKind::Loss => self.t,
            ElementKind::Gain => self.g,
            ElementKind::Unitary => None,
        };
        let stray = match self.kind {
            ElementKind::Loss => self.g.map(|_| "g"),
            ElementKind::Gain => self.t.map(|_| "t"),
            ElementKind::Unitary => self.t.or(self.g).map(|_| "t/g"),
        };
        if let Some(key) = stray {
            return Err(format!("key `{key}` does not apply to a {} element", self.kind));
        }
        match (scalar, &self.matrix) {
            (Some(_), Some(_)) => Err("give either a scalar or a matrix, not both".into()),
            (Some(v), None) => Ok(numerics::diag(&[v])),
            (None, Some(rows)) => matrix_from_rows(rows),
            (None, None) => Err(match self.kind {
                ElementKind::Loss => "loss needs `t` or `matrix`".into(),
                ElementKind::Gain => "gain needs `g` or `matrix`".into(),
                ElementKind::Unitary => "unitary needs `matrix`".into(),
            }),
        }
    }
}

fn error_name(e: &Error) -> &'static str {
    match e {
        Error::GainNotLoss { .. } => "GainNotLoss",
        Error::LossNotGain { .. } => "LossNotGain",
        Error::ConstraintViolated { .. } => "ConstraintViolated",
        Error::NotHermitian { .. } => "NotHermitian",
        Error::NegativeEigenvalue { .. } => "NegativeEigenvalue",
        Error::DimensionMismatch(_) => "DimensionMismatch",
        Error::NegativeOccupation(_) => "NegativeOccupation",
        _ => "InvalidElement",
    }
}

impl PipelineFile {
    /// Converts to a validated pipeline; every element passes
    /// [`validate_device`].
    pub fn to_spec(&self, tol: f64) -> Result<PipelineSpec, CliError> {
        let omega = self.omega.unwrap_or(1.0);
        if !(omega.is_finite() && omega > 0.0) {
            return Err(CliError::Semantic(format!("omega must be positive, got {omega}")));
        }
        let input = match &self.input {
            InputEntry::Coherent { alpha } => InputState::Coherent {
                alpha: alpha.iter().map(complex).collect(),
            },
            InputEntry::DisplacedThermal { alpha, nbar } => {
                if let Some(n) = nbar.iter().find(|n| n.is_nan() || **n < 0.0) {
                    return Err(CliError::Semantic(format!("input: NegativeOccupation ({n})")));
                }
                if alpha.len() != nbar.len() {
                    return Err(CliError::Semantic("input: `alpha` and `nbar` lengths differ".into()));
                }
                InputState::DisplacedThermal {
                    alpha: alpha.iter().map(complex).collect(),
                    nbar: nbar.clone(),
                }
            }
        };
        if input.modes() != self.modes {
            return Err(CliError::Semantic(format!(
                "input: {} amplitudes for {} modes",
                input.modes(),
                self.modes
            )));
        }
        let mut elements = Vec::with_capacity(self.elements.len());
        for (i, entry) in self.elements.iter().enumerate() {
            let label = format!("element {i} ({})", entry.kind);
            let t = entry
                .transmission()
                .map_err(|m| CliError::Semantic(format!("{label}: {m}")))?;
            let device = match entry.kind {
                ElementKind::Loss | ElementKind::Unitary => loss_device(&t, tol),
                ElementKind::Gain => gain_device(&t, tol),
            }
            .map_err(|e| CliError::Semantic(format!("{label}: {} ({e})", error_name(&e))))?;
            if entry.kind == ElementKind::Unitary && device.coupling.norm() > tol.sqrt() {
                return Err(CliError::Semantic(format!("{label}: matrix is not unitary")));
            }
            let report = validate_device(&device, tol)
                .map_err(|e| CliError::Semantic(format!("{label}: {} ({e})", error_name(&e))))?;
            if !report.passed {
                return Err(CliError::Semantic(format!(
                    "{label}: ConstraintViolated (residual {:e})",
                    report.residual
                )));
            }
            let modes = entry.modes.clone().unwrap_or_else(|| (0..device.dim()).collect());
            if modes.len() != device.dim() {
                return Err(CliError::Semantic(format!(
                    "{label}: {} ports but {} modes bound",
                    device.dim(),
                    modes.len()
                )));
            }
            for (k, m) in modes.iter().enumerate() {
                if *m >= self.modes || modes[..k].contains(m) {
                    return Err(CliError::Semantic(format!("{label}: invalid mode binding {m}")));
                }
            }
            elements.push(Element { device, modes });
        }
        Ok(PipelineSpec {
            modes: self.modes,
            omega,
            input,
            elements,
        })
    }
}

/// Parses and validates a pipeline document.
pub fn parse_pipeline(text: &str, tol: f64) -> Result<PipelineSpec, CliError> {
    parse_pipeline_file(text)?.to_spec(tol)
}

pub fn parse_pipeline_file(text: &str) -> Result<PipelineFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Parses `a:b:n` into a grid axis.
pub fn parse_axis(text: &str) -> Result<GridAxis, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::BadGrid(format!("expected min:max:count, got `{text}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 || !min.is_finite() || !max.is_finite() || min > max || (count > 1 && min == max) {
        return Err(bad());
    }
    Ok(GridAxis::new(min, max, count))
}

/// `validate`: per-element constraint residuals plus an optional PT check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateOutcome {
    pub elements: Vec<ValidationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pt: Option<PtReport>,
}

impl ValidateOutcome {
    pub fn passed(&self) -> bool {
        self.elements.iter().all(|r| r.passed) && self.pt.as_ref().is_none_or(|p| p.pt_symmetric)
    }

    /// Human-readable summary, one line per check.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.elements.iter().enumerate() {
            let sigma = match r.signature {
                Signature::Loss => "+1",
                Signature::Gain => "-1",
            };
            out.push_str(&format!(
                "element {i}: sigma={sigma} residual={:e} singular=[{}, {}] {}\n",
                r.residual,
                r.min_singular,
                r.max_singular,
                if r.passed { "ok" } else { "FAIL" }
            ));
        }
        if let Some(pt) = &self.pt {
            out.push_str(&format!(
                "pt-profile: max|n(-x)-n*(x)|={:e} real-symmetric={} imag-antisymmetric={} {}\n",
                pt.max_residual,
                pt.real_part_symmetric,
                pt.imag_part_antisymmetric,
                if pt.pt_symmetric {
                    "PT-symmetric"
                } else {
                    "not PT-symmetric"
                }
            ));
        }
        out
    }
}

pub fn cmd_validate(pipeline_text: &str, pt_profile_text: Option<&str>, tol: f64) -> Result<ValidateOutcome, CliError> {
    let spec = parse_pipeline(pipeline_text, tol)?;
    let elements = spec
        .elements
        .iter()
        .map(|el| validate_device(&el.device, tol).map_err(numerical))
        .collect::<Result<Vec<_>, _>>()?;
    let pt = match pt_profile_text {
        None => None,
        Some(text) => {
            let profile: IndexProfile = serde_json::from_str(text).map_err(|e| CliError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            Some(check_pt_profile(&profile, tol).map_err(|e| CliError::Semantic(e.to_string()))?)
        }
    };
    Ok(ValidateOutcome { elements, pt })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TemperatureOptions {
    pub units: Units,
    /// Overrides the file's `omega` (rad/s).
    pub omega: Option<f64>,
    /// Also report the log-as-factor expression.
    pub literal_formula: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainNoise {
    pub element: usize,
    /// Singular values of the gain element's transmission.
    pub gain: Vec<f64>,
    pub n_th: Vec<f64>,
    /// `null` for unit gain, where no temperature is defined.
    pub t_eff: Vec<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_eff_literal: Option<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub modes: usize,
    pub mean: Vec<[f64; 2]>,
    pub covariance: Vec<Vec<f64>>,
    pub purity: f64,
    pub mean_photon: Vec<f64>,
    pub inferred_nbar: Vec<f64>,
    pub units: Units,
    pub omega: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub gain: Vec<GainNoise>,
}

impl SimulationReport {
    pub fn from_state(state: &GaussianState, omega: f64, units: Units) -> Self {
        let n = state.modes();
        SimulationReport {
            modes: n,
            mean: state.mean().iter().map(|z| [z.re, z.im]).collect(),
            covariance: state.cov().row_iter().map(|r| r.iter().copied().collect()).collect(),
            purity: purity(state),
            mean_photon: (0..n).map(|k| mean_photon(state, k)).collect(),
            inferred_nbar: (0..n).map(|k| inferred_occupation(state, k)).collect(),
            units,
            omega,
            gain: Vec::new(),
        }
    }
}

/// `simulate`: final state summary and gain-noise bookkeeping.
pub fn cmd_simulate(pipeline_text: &str, opts: TemperatureOptions, tol: f64) -> Result<SimulationReport, CliError> {
    let spec = parse_pipeline(pipeline_text, tol)?;
    let stages = run_pipeline_stages(&spec, tol).map_err(numerical)?;
    let omega = opts.omega.unwrap_or(spec.omega);
    let mut report = SimulationReport::from_state(stages.last().expect("input stage"), omega, opts.units);
    for (i, el) in spec.elements.iter().enumerate() {
        if el.device.signature != Signature::Gain {
            continue;
        }
        let mut gain = numerics::singular_values(&el.device.transmission);
        gain.sort_by(f64::total_cmp);
        let n_th = gain
            .iter()
            .map(|g| thermal_occupation(g.max(1.0)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(numerical)?;
        let temp = |f: fn(f64, f64, Units) -> crate::Result<f64>| -> Vec<Option<f64>> {
            gain.iter().map(|g| f(1.0 / g, omega, opts.units).ok()).collect()
        };
        report.gain.push(GainNoise {
            element: i,
            n_th,
            t_eff: temp(effective_temperature),
            t_eff_literal: opts.literal_formula.then(|| temp(effective_temperature_log_factor)),
            gain,
        });
    }
    Ok(report)
}

/// Which pipeline stages to render.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageSelection {
    All,
    Index(usize),
}

impl std::str::FromStr for StageSelection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(StageSelection::All);
        }
        s.parse()
            .map(StageSelection::Index)
            .map_err(|_| format!("stage must be `all` or an index, got `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageGrid {
    pub stage: usize,
    pub grid: WignerGrid,
}

/// `wigner`: marginal Wigner grids of one mode at the selected stages.
/// Stage 0 is the input, stage `k` the state after element `k - 1`.
pub fn cmd_wigner(
    pipeline_text: &str,
    stage: StageSelection,
    mode: usize,
    x: GridAxis,
    p: GridAxis,
    tol: f64,
) -> Result<Vec<StageGrid>, CliError> {
    let spec = parse_pipeline(pipeline_text, tol)?;
    if mode >= spec.modes {
        return Err(CliError::Semantic(format!(
            "mode {mode} out of range for {} modes",
            spec.modes
        )));
    }
    let stages = run_pipeline_stages(&spec, tol).map_err(numerical)?;
    let selected: Vec<usize> = match stage {
        StageSelection::All => (0..stages.len()).collect(),
        StageSelection::Index(k) if k < stages.len() => vec![k],
        StageSelection::Index(k) => {
            return Err(CliError::Semantic(format!(
                "stage {k} out of range; pipeline has stages 0..={}",
                stages.len() - 1
            )))
        }
    };
    selected
        .into_iter()
        .map(|k| {
            let grid = wigner(&stages[k], mode, x, p).map_err(|e| CliError::BadGrid(e.to_string()))?;
            Ok(StageGrid { stage: k, grid })
        })
        .collect()
}

/// `oracle`: end-to-end comparison with the truncated Fock space at `dim`.
///
/// The truncation leak is bounded by the comparison tolerance.
pub fn cmd_oracle(pipeline_text: &str, dim: usize, compare_tol: f64, tol: f64) -> Result<ComparisonReport, CliError> {
    let spec = parse_pipeline(pipeline_text, tol)?;
    let gaussian = run_pipeline_stages(&spec, tol).map_err(numerical)?;
    let fock = run_pipeline_fock(&spec, dim, compare_tol).map_err(|e| match e {
        Error::Unsupported(m) => CliError::Semantic(m),
        other => numerical(other),
    })?;
    let g = gaussian.last().expect("input stage");
    let f = fock.last().expect("input stage");
    compare(g, f, &CompareSpec::around(g, compare_tol)).map_err(numerical)
}
