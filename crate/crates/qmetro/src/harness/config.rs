//! Experiment configuration: a flat key-value text format with dotted
//! section names, one experiment per file.
//!
//! Grammar (line oriented):
//!
//! ```text
//! # comment
//! key = value
//! grid.<axis> = lin <min> <max> <points>
//! grid.<axis> = list <v1> <v2> ...
//! noise.unitary = matrix n=<q> rows=<r> cols=<c>
//! (re,im) (re,im) ...            # exactly r continuation lines
//! ```
//!
//! Recognized keys: `experiment`, `seed`, `output`,
//! `sensing.{b0_gauss, bs_gauss, tau_s, gyro_rad_per_s_gauss, n_qubits,
//! sigma_gauss, n_fields, shots, seed}`,
//! `noise.{kind, p0, gamma_loss, sigma, family, unitary}`,
//! `opt.{delta, step, max_iters, loss_tol, diag_tol, init}`,
//! `ansatz.layers`, and `grid.*`. Grid axes are combined row-major in
//! declaration order.

use std::collections::BTreeSet;
use std::path::PathBuf;

use thiserror::Error;

use crate::channels::{NoiseKind, NoiseSpec};
use crate::exchange;
use crate::harness::noise::NoiseFamily;
use crate::sensing::{SensingConfig, GYRO_NV};
use crate::state::UnitaryMatrix;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("config: {0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    FidelitySweep,
    QfiSweep,
    Ramsey,
    Convergence,
    TransmissionSweep,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::FidelitySweep => "fidelity-sweep",
            ExperimentKind::QfiSweep => "qfi-sweep",
            ExperimentKind::Ramsey => "ramsey",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::TransmissionSweep => "transmission-sweep",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "fidelity-sweep" => Ok(ExperimentKind::FidelitySweep),
            "qfi-sweep" => Ok(ExperimentKind::QfiSweep),
            "ramsey" => Ok(ExperimentKind::Ramsey),
            "convergence" => Ok(ExperimentKind::Convergence),
            "transmission-sweep" => Ok(ExperimentKind::TransmissionSweep),
            other => Err(ConfigError::Invalid(format!("unknown experiment '{other}'"))),
        }
    }

    fn recognized_axes(&self) -> &'static [&'static str] {
        match self {
            ExperimentKind::FidelitySweep => &["p0", "overlap"],
            ExperimentKind::QfiSweep => &["n", "tau_ns", "p0", "overlap", "sigma_ratio"],
            ExperimentKind::Ramsey => &["sigma_ratio", "phi"],
            ExperimentKind::Convergence => &["n", "sigma_ratio"],
            ExperimentKind::TransmissionSweep => &["gamma", "overlap"],
        }
    }
}

/// One sweep axis: evenly spaced or an explicit value list.
#[derive(Debug, Clone)]
pub enum AxisSpec {
    Linspace { min: f64, max: f64, points: usize },
    List(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct GridAxis {
    pub name: String,
    pub spec: AxisSpec,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        match &self.spec {
            AxisSpec::List(v) => v.clone(),
            AxisSpec::Linspace { min, max, points } => {
                if *points == 1 {
                    vec![*min]
                } else {
                    (0..*points)
                        .map(|i| min + (max - min) * i as f64 / (*points as f64 - 1.0))
                        .collect()
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        match &self.spec {
            AxisSpec::List(v) => v.len(),
            AxisSpec::Linspace { points, .. } => *points,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Optimizer knobs as they appear in a config file; the init pattern is
/// cycled across the parameter vector.
#[derive(Debug, Clone)]
pub struct OptSettings {
    pub delta: f64,
    pub step: f64,
    pub max_iters: usize,
    pub loss_tol: f64,
    pub diag_tol: f64,
    pub init_pattern: Vec<f64>,
}

impl Default for OptSettings {
    fn default() -> Self {
        Self {
            delta: 0.05,
            step: 2.0,
            max_iters: 200,
            loss_tol: 1e-6,
            diag_tol: crate::qpca::DEFAULT_DIAG_TOL,
            init_pattern: vec![std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_3],
        }
    }
}

impl OptSettings {
    pub fn optimizer_config(&self, param_count: usize) -> crate::qpca::OptimizerConfig {
        crate::qpca::OptimizerConfig {
            delta: self.delta,
            steps: vec![self.step; param_count],
            max_iters: self.max_iters,
            loss_tol: self.loss_tol,
            init: (0..param_count)
                .map(|j| self.init_pattern[j % self.init_pattern.len()])
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub sensing: SensingConfig,
    /// Monte-Carlo field samples; 0 selects the closed-form ensemble limit.
    pub n_fields: usize,
    /// Readout shots; 0 selects exact expectations.
    pub shots: u64,
    pub noise: NoiseSpec,
    pub noise_family: NoiseFamily,
    pub opt: OptSettings,
    /// Circuit depth; `None` defaults to one layer per qubit.
    pub ansatz_layers: Option<usize>,
    pub grid: Vec<GridAxis>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        let noise_family = match experiment {
            ExperimentKind::FidelitySweep => NoiseFamily::YRotation,
            _ => NoiseFamily::FieldKick,
        };
        Self {
            experiment,
            seed: 0,
            output: None,
            sensing: SensingConfig {
                b0: 0.0,
                bs: 0.25,
                tau: 356.85e-9,
                gyro: GYRO_NV,
                n: 1,
                sigma: 0.0,
            },
            n_fields: 0,
            shots: 0,
            noise: NoiseSpec {
                kind: NoiseKind::UnitaryMixture,
                p0: 0.8,
                noise_unitary: None,
                gamma_loss: 0.0,
                sigma: 0.0,
            },
            noise_family,
            opt: OptSettings::default(),
            ansatz_layers: None,
            grid: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.sensing
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.noise
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.opt.delta <= 0.0 || self.opt.step <= 0.0 {
            return Err(ConfigError::Invalid("opt.delta and opt.step must be positive".into()));
        }
        if self.opt.init_pattern.is_empty() {
            return Err(ConfigError::Invalid("opt.init must not be empty".into()));
        }
        if self.ansatz_layers == Some(0) {
            return Err(ConfigError::Invalid("ansatz.layers must be at least 1".into()));
        }
        let recognized = self.experiment.recognized_axes();
        let mut seen = BTreeSet::new();
        for axis in &self.grid {
            if !recognized.contains(&axis.name.as_str()) {
                return Err(ConfigError::Invalid(format!(
                    "axis '{}' is not recognized by {} (expected one of {:?})",
                    axis.name,
                    self.experiment.as_str(),
                    recognized
                )));
            }
            if !seen.insert(axis.name.clone()) {
                return Err(ConfigError::Invalid(format!("axis '{}' declared twice", axis.name)));
            }
            if axis.is_empty() {
                return Err(ConfigError::Invalid(format!("axis '{}' has no points", axis.name)));
            }
        }
        Ok(())
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let lines: Vec<&str> = text.lines().collect();
        let mut experiment = None;
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        let mut unitary: Option<(UnitaryMatrix, usize)> = None;

        let mut i = 0usize;
        while i < lines.len() {
            let raw = lines[i];
            let line_no = i + 1;
            let trimmed = raw.trim();
            i += 1;
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                message: "expected 'key = value'".into(),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();

            if key == "noise.unitary" {
                let (n, rows, cols) =
                    exchange::parse_header(&value).map_err(|e| ConfigError::Syntax {
                        line: line_no,
                        message: e.to_string(),
                    })?;
                if i + rows > lines.len() {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        message: format!("matrix block needs {rows} rows"),
                    });
                }
                let body: Vec<&str> = lines[i..i + rows].to_vec();
                i += rows;
                let mat = exchange::parse_body(&body, rows, cols).map_err(|e| {
                    ConfigError::Syntax { line: line_no, message: e.to_string() }
                })?;
                let u = UnitaryMatrix::new(mat).map_err(|e| ConfigError::Syntax {
                    line: line_no,
                    message: e.to_string(),
                })?;
                unitary = Some((u, n));
                continue;
            }
            if key == "experiment" {
                experiment = Some(ExperimentKind::parse(&value)?);
                continue;
            }
            entries.push((line_no, key, value));
        }

        let experiment = experiment
            .ok_or_else(|| ConfigError::Invalid("missing 'experiment' key".into()))?;
        let mut cfg = ExperimentConfig::new(experiment);
        if let Some((u, _)) = unitary {
            cfg.noise.noise_unitary = Some(u);
        }

        for (line_no, key, value) in entries {
            cfg.apply_entry(&key, &value)
                .map_err(|message| ConfigError::Syntax { line: line_no, message })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_entry(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num(value: &str) -> Result<f64, String> {
            value.parse().map_err(|_| format!("bad number '{value}'"))
        }
        fn int(value: &str) -> Result<u64, String> {
            value.parse().map_err(|_| format!("bad integer '{value}'"))
        }

        if let Some(axis) = key.strip_prefix("grid.") {
            let spec = parse_axis(value)?;
            self.grid.push(GridAxis { name: axis.to_string(), spec });
            return Ok(());
        }

        match key {
            "seed" => self.seed = int(value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "sensing.b0_gauss" => self.sensing.b0 = num(value)?,
            "sensing.bs_gauss" => self.sensing.bs = num(value)?,
            "sensing.tau_s" => self.sensing.tau = num(value)?,
            "sensing.gyro_rad_per_s_gauss" => self.sensing.gyro = num(value)?,
            "sensing.n_qubits" => self.sensing.n = int(value)? as usize,
            "sensing.sigma_gauss" => self.sensing.sigma = num(value)?,
            "sensing.n_fields" => self.n_fields = int(value)? as usize,
            "sensing.shots" => self.shots = int(value)?,
            "sensing.seed" => self.seed = int(value)?,
            "noise.kind" => {
                self.noise.kind = NoiseKind::parse(value).map_err(|e| e.to_string())?
            }
            "noise.p0" => self.noise.p0 = num(value)?,
            "noise.gamma_loss" => self.noise.gamma_loss = num(value)?,
            "noise.sigma" => self.noise.sigma = num(value)?,
            "noise.family" => {
                self.noise_family = NoiseFamily::parse(value).map_err(|e| e.to_string())?
            }
            "opt.delta" => self.opt.delta = num(value)?,
            "opt.step" => self.opt.step = num(value)?,
            "opt.max_iters" => self.opt.max_iters = int(value)? as usize,
            "opt.loss_tol" => self.opt.loss_tol = num(value)?,
            "opt.diag_tol" => self.opt.diag_tol = num(value)?,
            "opt.init" => {
                let values = parse_float_list(value.strip_prefix("list").unwrap_or(value))?;
                if values.is_empty() {
                    return Err("opt.init needs at least one angle".into());
                }
                self.opt.init_pattern = values;
            }
            "ansatz.layers" => self.ansatz_layers = Some(int(value)? as usize),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Serializes the full configuration, including an inline matrix block
    /// for an explicit noise unitary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("experiment = {}\n", self.experiment.as_str()));
        out.push_str(&format!("seed = {}\n", self.seed));
        if let Some(path) = &self.output {
            out.push_str(&format!("output = {}\n", path.display()));
        }
        out.push('\n');
        out.push_str(&format!("sensing.b0_gauss = {:e}\n", self.sensing.b0));
        out.push_str(&format!("sensing.bs_gauss = {:e}\n", self.sensing.bs));
        out.push_str(&format!("sensing.tau_s = {:e}\n", self.sensing.tau));
        out.push_str(&format!(
            "sensing.gyro_rad_per_s_gauss = {:e}\n",
            self.sensing.gyro
        ));
        out.push_str(&format!("sensing.n_qubits = {}\n", self.sensing.n));
        out.push_str(&format!("sensing.sigma_gauss = {:e}\n", self.sensing.sigma));
        out.push_str(&format!("sensing.n_fields = {}\n", self.n_fields));
        out.push_str(&format!("sensing.shots = {}\n", self.shots));
        out.push_str(&format!("sensing.seed = {}\n", self.seed));
        out.push('\n');
        out.push_str(&format!("noise.kind = {}\n", self.noise.kind.as_str()));
        out.push_str(&format!("noise.p0 = {:e}\n", self.noise.p0));
        out.push_str(&format!("noise.gamma_loss = {:e}\n", self.noise.gamma_loss));
        out.push_str(&format!("noise.sigma = {:e}\n", self.noise.sigma));
        out.push_str(&format!("noise.family = {}\n", self.noise_family.as_str()));
        if let Some(u) = &self.noise.noise_unitary {
            let n = u.dim().trailing_zeros() as usize;
            out.push_str("noise.unitary = ");
            out.push_str(&exchange::write_matrix(u.matrix(), n));
        }
        out.push('\n');
        out.push_str(&format!("opt.delta = {:e}\n", self.opt.delta));
        out.push_str(&format!("opt.step = {:e}\n", self.opt.step));
        out.push_str(&format!("opt.max_iters = {}\n", self.opt.max_iters));
        out.push_str(&format!("opt.loss_tol = {:e}\n", self.opt.loss_tol));
        out.push_str(&format!("opt.diag_tol = {:e}\n", self.opt.diag_tol));
        let init: Vec<String> = self.opt.init_pattern.iter().map(|x| format!("{x:e}")).collect();
        out.push_str(&format!("opt.init = list {}\n", init.join(" ")));
        if let Some(layers) = self.ansatz_layers {
            out.push_str(&format!("ansatz.layers = {layers}\n"));
        }
        if !self.grid.is_empty() {
            out.push('\n');
            for axis in &self.grid {
                match &axis.spec {
                    AxisSpec::Linspace { min, max, points } => {
                        out.push_str(&format!("grid.{} = lin {min:e} {max:e} {points}\n", axis.name));
                    }
                    AxisSpec::List(values) => {
                        let vals: Vec<String> = values.iter().map(|v| format!("{v:e}")).collect();
                        out.push_str(&format!("grid.{} = list {}\n", axis.name, vals.join(" ")));
                    }
                }
            }
        }
        out
    }

    /// Values of the named axis, or the supplied fallback when absent.
    pub fn axis_values(&self, name: &str, fallback: &[f64]) -> Vec<f64> {
        self.grid
            .iter()
            .find(|a| a.name == name)
            .map(|a| a.values())
            .unwrap_or_else(|| fallback.to_vec())
    }

    pub fn has_axis(&self, name: &str) -> bool {
        self.grid.iter().any(|a| a.name == name)
    }
}

fn parse_axis(value: &str) -> Result<AxisSpec, String> {
    let mut parts = value.split_whitespace();
    match parts.next() {
        Some("lin") => {
            let rest: Vec<&str> = parts.collect();
            if rest.len() != 3 {
                return Err("lin axis needs: lin <min> <max> <points>".into());
            }
            let min: f64 = rest[0].parse().map_err(|_| format!("bad number '{}'", rest[0]))?;
            let max: f64 = rest[1].parse().map_err(|_| format!("bad number '{}'", rest[1]))?;
            let points: usize = rest[2].parse().map_err(|_| format!("bad count '{}'", rest[2]))?;
            if points < 1 {
                return Err("axis needs at least one point".into());
            }
            Ok(AxisSpec::Linspace { min, max, points })
        }
        Some("list") => {
            let values: Vec<f64> = parse_float_list(&parts.collect::<Vec<_>>().join(" "))?;
            if values.is_empty() {
                return Err("list axis needs at least one value".into());
            }
            Ok(AxisSpec::List(values))
        }
        _ => Err("axis must start with 'lin' or 'list'".into()),
    }
}

fn parse_float_list(s: &str) -> Result<Vec<f64>, String> {
    s.split_whitespace()
        .map(|tok| tok.parse::<f64>().map_err(|_| format!("bad number '{tok}'")))
        .collect()
}
