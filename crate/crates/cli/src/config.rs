//! Run configuration, read from a single TOML file.
//!
//! Every field has a default; the defaults are the acceptance runs. Unknown
//! keys are rejected so that a typo cannot silently fall back to a default.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Nahm,
    Laplacian,
    Cotangent,
    All,
}

impl Suite {
    pub fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub suite: Suite,
    pub seed: u64,
    /// Output directory; `--out` takes precedence.
    pub out: Option<String>,
    pub nahm: NahmConfig,
    pub laplacian: LaplacianConfig,
    pub cotangent: CotangentConfig,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NahmConfig {
    /// s-collocation points.
    pub modes: usize,
    pub epsilon: f64,
    pub x_max: f64,
    /// Successively halved steps for the self-convergence study; the last
    /// one is the production run.
    pub steps: Vec<f64>,
    pub model_step: f64,
    pub model_x_max: f64,
    pub noise_filter: f64,
    pub blowup_bound: f64,
    pub dilations: Vec<f64>,
    pub dilation_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub lambda: f64,
    pub n: i64,
    pub bc: Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaplacianConfig {
    /// Grid intervals `M`.
    pub intervals: usize,
    /// Modes solved with `g(x) = 1 + x²` and written out.
    pub modes: Vec<ModeSpec>,
    pub manufactured_trials: usize,
    pub energy_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationSpec {
    pub m: u32,
    /// `[re, im]`.
    pub amplitude: [f64; 2],
    /// Profile constant; the harmonic value when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CotangentConfig {
    pub radial: usize,
    pub angular: usize,
    pub deformations: Vec<DeformationSpec>,
    pub nmax: u32,
    pub finite_epsilon: f64,
    /// Samples of `r` in the profile table.
    pub profile_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub model_exact: f64,
    pub flow_order_min: f64,
    pub flow_order_max: f64,
    pub closedness_order_min: f64,
    pub wedge: f64,
    pub parity: f64,
    pub v1_exponent_min: f64,
    pub v1_exponent_max: f64,
    pub dilation: f64,
    pub manufactured_order: f64,
    pub expansion_relative: f64,
    pub commuted_order: f64,
    pub product_identity: f64,
    pub deformation_identity: f64,
    pub standard_invariants: f64,
    pub diagonality: f64,
    pub linearity: f64,
    pub kappa: f64,
    pub finite_epsilon_slope: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            seed: 20240601,
            out: None,
            nahm: NahmConfig::default(),
            laplacian: LaplacianConfig::default(),
            cotangent: CotangentConfig::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl Default for NahmConfig {
    fn default() -> Self {
        Self {
            modes: 64,
            epsilon: 0.1,
            x_max: 0.5,
            steps: vec![1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0],
            model_step: 0.1,
            model_x_max: 1.0,
            noise_filter: 1e-13,
            blowup_bound: 1e6,
            dilations: vec![0.5, 2.0],
            dilation_points: 10,
        }
    }
}

impl Default for LaplacianConfig {
    fn default() -> Self {
        let mode = |lambda, n, bc| ModeSpec { lambda, n, bc };
        Self {
            intervals: 512,
            modes: vec![
                mode(1.0, 0, Boundary::Dirichlet),
                mode(2.0, 1, Boundary::Neumann),
                mode(2.0, -3, Boundary::Dirichlet),
                mode(3.0, 5, Boundary::Neumann),
                mode(3.0, -9, Boundary::Dirichlet),
            ],
            manufactured_trials: 5,
            energy_trials: 100,
        }
    }
}

impl Default for CotangentConfig {
    fn default() -> Self {
        let deformations = (1..=6)
            .map(|m| DeformationSpec {
                m,
                amplitude: [0.3 * m as f64, -0.7],
                phi: None,
            })
            .collect();
        Self {
            radial: 64,
            angular: 64,
            deformations,
            nmax: 6,
            finite_epsilon: 1e-3,
            profile_points: 99,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            model_exact: 1e-12,
            flow_order_min: 3.7,
            flow_order_max: 4.3,
            closedness_order_min: 1.8,
            wedge: 1e-12,
            parity: 1e-10,
            v1_exponent_min: 2.7,
            v1_exponent_max: 3.3,
            dilation: 1e-14,
            manufactured_order: 0.2,
            expansion_relative: 0.01,
            commuted_order: 0.2,
            product_identity: 1e-14,
            deformation_identity: 1e-12,
            standard_invariants: 1e-10,
            diagonality: 1e-10,
            linearity: 1e-10,
            kappa: 1e-8,
            finite_epsilon_slope: 1e-6,
        }
    }
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    /// Parses and validates.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg = Self::parse_toml(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses without validating, for callers that override fields first.
    pub fn parse_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_string()))
    }

    /// Canonical TOML rendering of the effective configuration.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// sha256 of the canonical rendering, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml_string().as_bytes()))
    }

    /// Validates the sections the selected suite uses, plus all tolerances.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.tolerances.validate()?;
        if self.suite.includes(Suite::Nahm) {
            self.nahm.validate()?;
        }
        if self.suite.includes(Suite::Laplacian) {
            self.laplacian.validate()?;
        }
        if self.suite.includes(Suite::Cotangent) {
            self.cotangent.validate()?;
        }
        Ok(())
    }
}

impl NahmConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        if !self.modes.is_power_of_two() || self.modes < 4 {
            return Err(invalid(format!("nahm.modes must be a power of two >= 4, got {}", self.modes)));
        }
        positive("nahm.x_max", self.x_max)?;
        positive("nahm.model_step", self.model_step)?;
        positive("nahm.model_x_max", self.model_x_max)?;
        positive("nahm.blowup_bound", self.blowup_bound)?;
        if !self.epsilon.is_finite() {
            return Err(invalid("nahm.epsilon must be finite"));
        }
        if !(self.noise_filter >= 0.0 && self.noise_filter.is_finite()) {
            return Err(invalid("nahm.noise_filter must be non-negative"));
        }
        if self.steps.len() < 3 {
            return Err(invalid("nahm.steps needs at least three steps"));
        }
        for &h in &self.steps {
            positive("nahm.steps entry", h)?;
            let r = self.x_max / h;
            if (r - r.round()).abs() > 1e-9 * r {
                return Err(invalid(format!("nahm step {h} does not divide x_max {}", self.x_max)));
            }
        }
        for w in self.steps.windows(2) {
            if w[1] >= w[0] {
                return Err(invalid("nahm.steps must be decreasing"));
            }
        }
        if self.dilations.is_empty() {
            return Err(invalid("nahm.dilations must not be empty"));
        }
        for &t in &self.dilations {
            positive("nahm.dilations entry", t)?;
        }
        if self.dilation_points == 0 {
            return Err(invalid("nahm.dilation_points must be positive"));
        }
        Ok(())
    }
}

impl LaplacianConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.intervals < 64 || self.intervals % 2 != 0 {
            return Err(invalid(format!(
                "laplacian.intervals must be even and >= 64, got {}",
                self.intervals
            )));
        }
        if self.modes.is_empty() {
            return Err(invalid("laplacian.modes must not be empty"));
        }
        for (i, m) in self.modes.iter().enumerate() {
            if !(m.lambda >= 0.0 && m.lambda.is_finite()) {
                return Err(invalid(format!("laplacian.modes[{i}]: lambda must be non-negative, got {}", m.lambda)));
            }
            if m.n.unsigned_abs() as f64 > m.lambda * m.lambda {
                return Err(invalid(format!(
                    "laplacian.modes[{i}]: (lambda, n) = ({}, {}) violates |n| <= lambda^2",
                    m.lambda, m.n
                )));
            }
            if m.lambda == 0.0 {
                return Err(invalid(format!("laplacian.modes[{i}]: the zero mode carries no energy estimate")));
            }
        }
        if self.manufactured_trials == 0 || self.energy_trials == 0 {
            return Err(invalid("laplacian trial counts must be positive"));
        }
        Ok(())
    }
}

impl CotangentConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.radial == 0 || self.radial > 128 {
            return Err(invalid(format!("cotangent.radial must be in 1..=128, got {}", self.radial)));
        }
        if self.angular < 4 {
            return Err(invalid(format!("cotangent.angular must be >= 4, got {}", self.angular)));
        }
        if self.nmax == 0 {
            return Err(invalid("cotangent.nmax must be positive"));
        }
        if self.deformations.is_empty() {
            return Err(invalid("cotangent.deformations must not be empty"));
        }
        for (i, d) in self.deformations.iter().enumerate() {
            if d.m > self.nmax {
                return Err(invalid(format!("cotangent.deformations[{i}]: m = {} exceeds nmax = {}", d.m, self.nmax)));
            }
            if d.m as usize >= 2 * self.radial {
                return Err(invalid(format!("cotangent.deformations[{i}]: m = {} is not resolved radially", d.m)));
            }
            if !d.amplitude.iter().all(|v| v.is_finite()) || !d.phi.map_or(true, f64::is_finite) {
                return Err(invalid(format!("cotangent.deformations[{i}]: non-finite parameter")));
            }
        }
        positive("cotangent.finite_epsilon", self.finite_epsilon)?;
        if self.profile_points < 2 {
            return Err(invalid("cotangent.profile_points must be >= 2"));
        }
        Ok(())
    }
}

impl Tolerances {
    fn validate(&self) -> Result<(), ConfigError> {
        let all = [
            ("model_exact", self.model_exact),
            ("flow_order_min", self.flow_order_min),
            ("flow_order_max", self.flow_order_max),
            ("closedness_order_min", self.closedness_order_min),
            ("wedge", self.wedge),
            ("parity", self.parity),
            ("v1_exponent_min", self.v1_exponent_min),
            ("v1_exponent_max", self.v1_exponent_max),
            ("dilation", self.dilation),
            ("manufactured_order", self.manufactured_order),
            ("expansion_relative", self.expansion_relative),
            ("commuted_order", self.commuted_order),
            ("product_identity", self.product_identity),
            ("deformation_identity", self.deformation_identity),
            ("standard_invariants", self.standard_invariants),
            ("diagonality", self.diagonality),
            ("linearity", self.linearity),
            ("kappa", self.kappa),
            ("finite_epsilon_slope", self.finite_epsilon_slope),
        ];
        for (name, v) in all {
            positive(&format!("tolerances.{name}"), v)?;
        }
        if self.flow_order_min > self.flow_order_max || self.v1_exponent_min > self.v1_exponent_max {
            return Err(invalid("tolerance bands must have min <= max"));
        }
        Ok(())
    }
}
