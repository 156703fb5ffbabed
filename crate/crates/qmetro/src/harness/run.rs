//! The five experiment runners and their CSV output.
//!
//! Grid cells are independent jobs evaluated on a rayon pool; per-cell seeds
//! derive from (run seed, cell index) and rows are emitted in cell-index
//! order, so the CSV is byte-identical for a given (config, seed) no matter
//! how many threads run it.

use rayon::prelude::*;
use thiserror::Error;

use crate::channels::{
    amplitude_damping_per_qubit, apply_channel, depolarize_to_mixed, unitary_mixture, KrausChannel,
    NoiseKind,
};
use crate::error::Error;
use crate::harness::config::{ConfigError, ExperimentConfig, ExperimentKind};
use crate::harness::noise::noise_unitary_for_overlap;
use crate::metrics::{
    ape, db_gain, heisenberg_limit, purified_qfi_field, qfi_field, sql, PhaseEncoding, ProbeFamily,
};
use crate::qpca::{extract_principal_with_tol, fmt_float, optimize, Ansatz, OptimizationTrace};
use crate::sensing::{
    dephased_ramsey_density, estimate_field, gaussian_ensemble, ramsey_pure, readout, SensingConfig,
};
use crate::state::{fidelity_pure, DensityMatrix, StateVector};

/// Phase step for central differences through the purifier.
const QFI_DIFF_STEP: f64 = 1e-5;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellStatus {
    Ok,
    NotConverged,
    Failed(String),
}

impl CellStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::NotConverged => "not-converged",
            CellStatus::Failed(_) => "failed",
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, CellStatus::Ok)
    }
}

/// One grid cell of any sweep; fields not produced by an experiment stay
/// `None` and serialize as empty columns.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub cell_index: usize,
    pub axes: Vec<(&'static str, f64)>,
    pub overlap_achieved: Option<f64>,
    pub f_noisy: Option<f64>,
    pub f_qpca: Option<f64>,
    pub delta_f: Option<f64>,
    pub b_est_ramsey: Option<f64>,
    pub b_est_qpca: Option<f64>,
    pub ape_ramsey: Option<f64>,
    pub ape_qpca: Option<f64>,
    pub qfi_before: Option<f64>,
    pub qfi_after: Option<f64>,
    pub qfi_diff: Option<f64>,
    pub hl: Option<f64>,
    pub sql: Option<f64>,
    pub db_gain: Option<f64>,
    pub iterations: Option<usize>,
    pub status: CellStatus,
    pub seed: u64,
}

impl SweepRecord {
    fn empty(cell_index: usize, axes: Vec<(&'static str, f64)>, seed: u64) -> Self {
        Self {
            cell_index,
            axes,
            overlap_achieved: None,
            f_noisy: None,
            f_qpca: None,
            delta_f: None,
            b_est_ramsey: None,
            b_est_qpca: None,
            ape_ramsey: None,
            ape_qpca: None,
            qfi_before: None,
            qfi_after: None,
            qfi_diff: None,
            hl: None,
            sql: None,
            db_gain: None,
            iterations: None,
            status: CellStatus::Ok,
            seed,
        }
    }

    pub fn axis(&self, name: &str) -> Option<f64> {
        self.axes.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }
}

/// Everything a run produces: records (or traces for the convergence
/// experiment), the rendered CSV, and summary lines.
#[derive(Debug)]
pub struct RunOutput {
    pub records: Vec<SweepRecord>,
    pub traces: Vec<(Vec<(&'static str, f64)>, OptimizationTrace)>,
    pub csv: String,
    pub summary: Vec<(String, String)>,
}

/// Runs the configured experiment to completion.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    log::info!("running {} with seed {}", cfg.experiment.as_str(), cfg.seed);
    match cfg.experiment {
        ExperimentKind::FidelitySweep => run_fidelity_sweep(cfg),
        ExperimentKind::QfiSweep => run_qfi_sweep(cfg),
        ExperimentKind::Ramsey => run_ramsey(cfg),
        ExperimentKind::Convergence => run_convergence(cfg),
        ExperimentKind::TransmissionSweep => run_transmission_sweep(cfg),
    }
}

fn cell_seed(run_seed: u64, index: usize) -> u64 {
    crate::sensing::derive_seed(run_seed, index as u64)
}

fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let total: usize = axes.iter().map(|a| a.len()).product();
    let mut cells = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut cell = Vec::with_capacity(axes.len());
        for axis in axes.iter().rev() {
            cell.push(axis[idx % axis.len()]);
            idx /= axis.len();
        }
        cell.reverse();
        cells.push(cell);
    }
    cells
}

/// Outcome of the variational stage of one cell.
struct VariationalResult {
    purified: DensityMatrix,
    /// Loss dropped below the diagonality tolerance.
    diagonalized: bool,
    /// First iteration at which the extracted state reached 99.5% overlap
    /// with the exact principal component.
    reached_target: Option<usize>,
    final_iteration: usize,
}

/// Runs the optimizer on a noisy state and extracts the purified component,
/// reporting best-effort output even when the diagonality gate failed.
fn variational_purify(
    rho: &DensityMatrix,
    cfg: &ExperimentConfig,
    n: usize,
) -> Result<VariationalResult, Error> {
    let layers = cfg.ansatz_layers.unwrap_or(n);
    let ansatz = Ansatz::new(n, layers)?;
    let opt = cfg.opt.optimizer_config(ansatz.param_count());
    let trace = optimize(rho, &ansatz, &opt)?;
    let theta = trace.final_params().to_vec();
    let diagonalized = trace.final_loss() <= cfg.opt.diag_tol;
    let purified = extract_principal_with_tol(rho, &theta, &ansatz, f64::INFINITY)?;
    Ok(VariationalResult {
        purified,
        diagonalized,
        reached_target: trace.iterations_to_fidelity(0.995),
        final_iteration: trace.final_record().iteration,
    })
}

fn run_fidelity_sweep(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let p0_axis = cfg.axis_values("p0", &linspace(0.55, 0.99, 20));
    let overlap_axis = cfg.axis_values("overlap", &linspace(0.0, 0.99, 20));
    let cells = cartesian(&[p0_axis, overlap_axis]);
    let n = cfg.sensing.n;
    let phi = cfg.sensing.phase();
    let target: StateVector = ramsey_pure(n, phi);
    let target_rho = DensityMatrix::from_pure(&target);

    let records: Vec<SweepRecord> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, cell)| {
            let (p0, overlap) = (cell[0], cell[1]);
            let axes = vec![("p0", p0), ("overlap", overlap)];
            let seed = cell_seed(cfg.seed, idx);
            let mut rec = SweepRecord::empty(idx, axes, seed);
            let result = (|| -> Result<(), Error> {
                let n_op = noise_unitary_for_overlap(cfg.noise_family, n, phi, overlap)?;
                rec.overlap_achieved =
                    Some(crate::channels::noise_overlap(&target_rho, &n_op)?);
                let channel = unitary_mixture(p0, &n_op)?;
                let noisy = apply_channel(&target_rho, &channel)?;
                let f_noisy = fidelity_pure(&target, &noisy)?;
                let var = variational_purify(&noisy, cfg, n)?;
                let f_qpca = fidelity_pure(&target, &var.purified)?;
                rec.f_noisy = Some(f_noisy);
                rec.f_qpca = Some(f_qpca);
                rec.delta_f = Some(f_qpca - f_noisy);
                // delta_f accuracy hinges on a tight extraction here
                rec.iterations = Some(var.final_iteration);
                if !var.diagonalized {
                    rec.status = CellStatus::NotConverged;
                }
                Ok(())
            })();
            if let Err(e) = result {
                rec.status = CellStatus::Failed(e.to_string());
            }
            rec
        })
        .collect();

    let columns = [
        "p0",
        "overlap",
        "overlap_achieved",
        "f_noisy",
        "f_qpca",
        "delta_f",
        "iterations",
        "status",
        "seed",
    ];
    let csv = render_csv(cfg, &columns, &records);
    let mut summary = base_summary(cfg, &records);
    if let Some(min_gain) = records
        .iter()
        .filter(|r| r.status.is_ok())
        .filter_map(|r| r.delta_f)
        .min_by(|a, b| a.partial_cmp(b).unwrap())
    {
        summary.push(("min_delta_f".into(), fmt_float(min_gain)));
    }
    Ok(RunOutput { records, traces: Vec::new(), csv, summary })
}

fn run_qfi_sweep(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let n_axis = cfg.axis_values("n", &[cfg.sensing.n as f64]);
    let tau_axis = cfg.axis_values("tau_ns", &[20.0, 40.0, 60.0, 100.0]);
    let (noise_name, noise_axis) = match cfg.noise.kind {
        NoiseKind::GaussianField => (
            "sigma_ratio",
            cfg.axis_values("sigma_ratio", &linspace(0.05, 0.5, 10)),
        ),
        _ => ("overlap", cfg.axis_values("overlap", &linspace(0.02, 0.9, 10))),
    };
    let p0_axis = cfg.axis_values("p0", &[cfg.noise.p0]);
    let cells = cartesian(&[n_axis, tau_axis, p0_axis, noise_axis]);

    let records: Vec<SweepRecord> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, cell)| {
            let n = cell[0].round() as usize;
            let tau_ns = cell[1];
            let p0 = cell[2];
            let noise_value = cell[3];
            let axes = vec![
                ("n", n as f64),
                ("tau_ns", tau_ns),
                ("p0", p0),
                (noise_name, noise_value),
            ];
            let seed = cell_seed(cfg.seed, idx);
            let mut rec = SweepRecord::empty(idx, axes, seed);
            let result = (|| -> Result<(), Error> {
                let sensing = SensingConfig {
                    tau: tau_ns * 1e-9,
                    n,
                    ..cfg.sensing
                };
                let phi = sensing.phase();
                let (encoding, achieved) = build_encoding(cfg, &sensing, p0, noise_value, phi, 0.0)?;
                rec.overlap_achieved = achieved;
                fill_qfi_fields(&mut rec, cfg, &encoding, &sensing, phi, n)
            })();
            if let Err(e) = result {
                rec.status = CellStatus::Failed(e.to_string());
            }
            rec
        })
        .collect();

    let columns = [
        "n",
        "tau_ns",
        "p0",
        noise_name,
        "overlap_achieved",
        "f_noisy",
        "f_qpca",
        "qfi_before",
        "qfi_after",
        "hl",
        "sql",
        "db_gain",
        "iterations",
        "status",
        "seed",
    ];
    let csv = render_csv(cfg, &columns, &records);
    let summary = base_summary(cfg, &records);
    Ok(RunOutput { records, traces: Vec::new(), csv, summary })
}

fn run_ramsey(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let sigma_axis = cfg.axis_values("sigma_ratio", &[0.1, 0.3, 0.5]);
    let phi_axis = cfg.axis_values(
        "phi",
        &[
            std::f64::consts::FRAC_PI_8,
            std::f64::consts::FRAC_PI_4,
            std::f64::consts::FRAC_PI_2,
            3.0 * std::f64::consts::FRAC_PI_4,
        ],
    );
    let cells = cartesian(&[sigma_axis, phi_axis]);
    let n = cfg.sensing.n;
    let field = cfg.sensing.b0 + cfg.sensing.bs;
    if field == 0.0 || cfg.sensing.gyro <= 0.0 {
        return Err(HarnessError::Config(ConfigError::Invalid(
            "ramsey needs a nonzero total field to map phi onto tau".into(),
        )));
    }

    let records: Vec<SweepRecord> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, cell)| {
            let (sigma_ratio, phi) = (cell[0], cell[1]);
            let axes = vec![("sigma_ratio", sigma_ratio), ("phi", phi)];
            let seed = cell_seed(cfg.seed, idx);
            let mut rec = SweepRecord::empty(idx, axes, seed);
            let result = (|| -> Result<(), Error> {
                let sensing = SensingConfig {
                    tau: phi / (cfg.sensing.gyro * field),
                    sigma: sigma_ratio * cfg.sensing.bs.abs(),
                    ..cfg.sensing
                };
                sensing.validate()?;
                let noisy = if cfg.n_fields == 0 {
                    dephased_ramsey_density(&sensing)?
                } else {
                    gaussian_ensemble(&sensing, cfg.n_fields, seed)?
                };
                let target = ramsey_pure(n, phi);
                rec.f_noisy = Some(fidelity_pure(&target, &noisy)?);

                let plain = readout(&noisy, cfg.shots, crate::sensing::derive_seed(seed, 1))?;
                let b_plain = estimate_field(plain.p1, &sensing)?;
                rec.b_est_ramsey = Some(b_plain);
                rec.ape_ramsey = Some(ape(sensing.bs, b_plain)?);

                let var = variational_purify(&noisy, cfg, n)?;
                rec.f_qpca = Some(fidelity_pure(&target, &var.purified)?);
                let refined =
                    readout(&var.purified, cfg.shots, crate::sensing::derive_seed(seed, 2))?;
                let b_qpca = estimate_field(refined.p1, &sensing)?;
                rec.b_est_qpca = Some(b_qpca);
                rec.ape_qpca = Some(ape(sensing.bs, b_qpca)?);
                rec.iterations = Some(var.final_iteration);
                if !var.diagonalized {
                    rec.status = CellStatus::NotConverged;
                }
                Ok(())
            })();
            if let Err(e) = result {
                rec.status = CellStatus::Failed(e.to_string());
            }
            rec
        })
        .collect();

    let columns = [
        "sigma_ratio",
        "phi",
        "f_noisy",
        "f_qpca",
        "b_est_ramsey",
        "b_est_qpca",
        "ape_ramsey",
        "ape_qpca",
        "iterations",
        "status",
        "seed",
    ];
    let csv = render_csv(cfg, &columns, &records);
    let summary = base_summary(cfg, &records);
    Ok(RunOutput { records, traces: Vec::new(), csv, summary })
}

fn run_convergence(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let n_axis = cfg.axis_values("n", &[2.0, 3.0, 4.0]);
    let sigma_axis = cfg.axis_values("sigma_ratio", &[0.05, 0.125, 0.25, 0.45]);
    let cells = cartesian(&[n_axis, sigma_axis]);

    let results: Vec<(Vec<(&'static str, f64)>, Result<OptimizationTrace, Error>)> = cells
        .par_iter()
        .map(|cell| {
            let n = cell[0].round() as usize;
            let sigma_ratio = cell[1];
            let axes = vec![("n", n as f64), ("sigma_ratio", sigma_ratio)];
            let trace = (|| -> Result<OptimizationTrace, Error> {
                let sensing = SensingConfig {
                    n,
                    sigma: sigma_ratio * cfg.sensing.bs.abs(),
                    ..cfg.sensing
                };
                let noisy = dephased_ramsey_density(&sensing)?;
                let layers = cfg.ansatz_layers.unwrap_or(n);
                let ansatz = Ansatz::new(n, layers)?;
                let opt = cfg.opt.optimizer_config(ansatz.param_count());
                optimize(&noisy, &ansatz, &opt)
            })();
            (axes, trace)
        })
        .collect();

    // long-format CSV: one row per optimizer iteration per cell
    let mut csv = csv_comment(cfg);
    csv.push_str("cell_index,n,sigma_ratio,iteration,loss,fidelity_vs_oracle,status,seed\n");
    let mut traces = Vec::new();
    let mut records = Vec::new();
    for (idx, (axes, trace)) in results.into_iter().enumerate() {
        let seed = cell_seed(cfg.seed, idx);
        let mut rec = SweepRecord::empty(idx, axes.clone(), seed);
        match trace {
            Ok(trace) => {
                let status_str = trace.status.as_str();
                for r in &trace.records {
                    csv.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        idx,
                        axes[0].1,
                        fmt_float(axes[1].1),
                        r.iteration,
                        fmt_float(r.loss),
                        fmt_float(r.fidelity_vs_oracle),
                        status_str,
                        seed
                    ));
                }
                rec.iterations = trace.iterations_to_fidelity(0.995);
                if rec.iterations.is_none() {
                    rec.status = CellStatus::NotConverged;
                }
                traces.push((axes, trace));
            }
            Err(e) => {
                rec.status = CellStatus::Failed(e.to_string());
                csv.push_str(&format!(
                    "{},{},{},,,,failed,{}\n",
                    idx,
                    axes[0].1,
                    fmt_float(axes[1].1),
                    seed
                ));
            }
        }
        records.push(rec);
    }

    let mut summary = base_summary(cfg, &records);
    for rec in &records {
        let label = format!(
            "iters_to_0995[n={},sigma_ratio={}]",
            rec.axis("n").unwrap_or(0.0),
            rec.axis("sigma_ratio").unwrap_or(0.0)
        );
        let value = rec
            .iterations
            .map(|i| i.to_string())
            .unwrap_or_else(|| "not-reached".into());
        summary.push((label, value));
    }
    Ok(RunOutput { records, traces, csv, summary })
}

fn run_transmission_sweep(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let gamma_axis = cfg.axis_values("gamma", &[0.03, 0.0415, 0.06, 0.09, 0.15]);
    let overlap_axis = cfg.axis_values("overlap", &linspace(0.02, 0.9, 15));
    let cells = cartesian(&[gamma_axis, overlap_axis]);
    let p0 = cfg.noise.p0;

    let records: Vec<SweepRecord> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, cell)| {
            let (gamma, overlap) = (cell[0], cell[1]);
            let axes = vec![("gamma", gamma), ("overlap", overlap), ("p0", p0)];
            let seed = cell_seed(cfg.seed, idx);
            let mut rec = SweepRecord::empty(idx, axes, seed);
            let result = (|| -> Result<(), Error> {
                let sensing = cfg.sensing;
                let n = sensing.n;
                let phi = sensing.phase();
                let (encoding, achieved) = build_encoding(cfg, &sensing, p0, overlap, phi, gamma)?;
                rec.overlap_achieved = achieved;
                fill_qfi_fields(&mut rec, cfg, &encoding, &sensing, phi, n)?;
                rec.qfi_diff = match (rec.qfi_after, rec.qfi_before) {
                    (Some(a), Some(b)) => Some(a - b),
                    _ => None,
                };
                Ok(())
            })();
            if let Err(e) = result {
                rec.status = CellStatus::Failed(e.to_string());
            }
            rec
        })
        .collect();

    let columns = [
        "gamma",
        "overlap",
        "p0",
        "overlap_achieved",
        "qfi_before",
        "qfi_after",
        "qfi_diff",
        "hl",
        "sql",
        "db_gain",
        "iterations",
        "status",
        "seed",
    ];
    let csv = render_csv(cfg, &columns, &records);
    let summary = base_summary(cfg, &records);
    Ok(RunOutput { records, traces: Vec::new(), csv, summary })
}

/// Builds the phase-encoding family of a sweep cell: probe family plus the
/// configured sensing noise plus optional transmission damping. Returns the
/// achieved noise overlap when a noise unitary was involved.
fn build_encoding(
    cfg: &ExperimentConfig,
    sensing: &SensingConfig,
    p0: f64,
    noise_value: f64,
    phi: f64,
    gamma: f64,
) -> Result<(PhaseEncoding, Option<f64>), Error> {
    let n = sensing.n;
    let family = if n == 1 {
        ProbeFamily::SingleQubitRamsey
    } else {
        ProbeFamily::GhzPhase { n }
    };
    let mut dephasing = None;
    let mut channels: Vec<KrausChannel> = Vec::new();
    let mut achieved = None;
    match cfg.noise.kind {
        NoiseKind::GaussianField => {
            // noise_value is the sigma/B ratio
            let sigma = noise_value * sensing.bs.abs();
            dephasing = Some(sensing.gyro * sensing.tau * sigma);
        }
        NoiseKind::UnitaryMixture => {
            let n_op = match &cfg.noise.noise_unitary {
                Some(u) if !cfg.has_axis("overlap") => u.clone(),
                _ => noise_unitary_for_overlap(cfg.noise_family, n, phi, noise_value)?,
            };
            let probe = DensityMatrix::from_pure(&ramsey_pure(n, phi));
            achieved = Some(crate::channels::noise_overlap(&probe, &n_op)?);
            channels.push(unitary_mixture(p0, &n_op)?);
        }
        NoiseKind::Depolarize => {
            channels.push(depolarize_to_mixed(p0, n)?);
        }
        NoiseKind::AmplitudeDamping => {
            channels.push(amplitude_damping_per_qubit(cfg.noise.gamma_loss, n)?);
        }
    }
    if gamma > 0.0 {
        channels.push(amplitude_damping_per_qubit(gamma, n)?);
    }
    Ok((PhaseEncoding { family, dephasing, channels }, achieved))
}

/// Computes the before/after information columns plus the variational status
/// for one cell.
fn fill_qfi_fields(
    rec: &mut SweepRecord,
    cfg: &ExperimentConfig,
    encoding: &PhaseEncoding,
    sensing: &SensingConfig,
    phi: f64,
    n: usize,
) -> Result<(), Error> {
    let rho = encoding.state(phi)?;
    let drho = encoding.drho_dphi(phi)?;
    let before = qfi_field(&rho, &drho, sensing)?.value;
    let after = purified_qfi_field(encoding, phi, sensing, QFI_DIFF_STEP)?.value;
    rec.qfi_before = Some(before);
    rec.qfi_after = Some(after);
    rec.hl = Some(heisenberg_limit(n, sensing));
    rec.sql = Some(sql(n, sensing));
    rec.db_gain = db_gain(after, before).ok();
    let target = ramsey_pure(n, phi);
    rec.f_noisy = Some(fidelity_pure(&target, &rho)?);
    let var = variational_purify(&rho, cfg, n)?;
    rec.f_qpca = Some(fidelity_pure(&target, &var.purified)?);
    // the sweep-level convergence notion here is the one tracked in the
    // convergence experiment: the extracted state reached 99.5% overlap
    // with the exact principal component
    rec.iterations = var.reached_target;
    if var.reached_target.is_none() {
        rec.status = CellStatus::NotConverged;
    }
    Ok(())
}

fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    (0..points)
        .map(|i| min + (max - min) * i as f64 / (points as f64 - 1.0))
        .collect()
}

fn csv_comment(cfg: &ExperimentConfig) -> String {
    format!(
        "# qmetro {} experiment={} seed={}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.experiment.as_str(),
        cfg.seed
    )
}

fn render_csv(cfg: &ExperimentConfig, columns: &[&str], records: &[SweepRecord]) -> String {
    let mut out = csv_comment(cfg);
    out.push_str(&columns.join(","));
    out.push('\n');
    for rec in records {
        let mut row: Vec<String> = Vec::with_capacity(columns.len());
        for col in columns {
            let cell = match *col {
                "status" => rec.status.as_str().to_string(),
                "seed" => rec.seed.to_string(),
                "iterations" => rec.iterations.map(|i| i.to_string()).unwrap_or_default(),
                "n" => rec
                    .axis("n")
                    .map(|v| (v.round() as usize).to_string())
                    .unwrap_or_default(),
                "overlap_achieved" => opt_float(rec.overlap_achieved),
                "f_noisy" => opt_float(rec.f_noisy),
                "f_qpca" => opt_float(rec.f_qpca),
                "delta_f" => opt_float(rec.delta_f),
                "b_est_ramsey" => opt_float(rec.b_est_ramsey),
                "b_est_qpca" => opt_float(rec.b_est_qpca),
                "ape_ramsey" => opt_float(rec.ape_ramsey),
                "ape_qpca" => opt_float(rec.ape_qpca),
                "qfi_before" => opt_float(rec.qfi_before),
                "qfi_after" => opt_float(rec.qfi_after),
                "qfi_diff" => opt_float(rec.qfi_diff),
                "hl" => opt_float(rec.hl),
                "sql" => opt_float(rec.sql),
                "db_gain" => opt_float(rec.db_gain),
                axis => rec.axis(axis).map(fmt_float).unwrap_or_default(),
            };
            row.push(cell);
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn opt_float(value: Option<f64>) -> String {
    value.map(fmt_float).unwrap_or_default()
}

fn base_summary(cfg: &ExperimentConfig, records: &[SweepRecord]) -> Vec<(String, String)> {
    let ok = records.iter().filter(|r| r.status.is_ok()).count();
    let failed = records
        .iter()
        .filter(|r| matches!(r.status, CellStatus::Failed(_)))
        .count();
    vec![
        ("experiment".into(), cfg.experiment.as_str().into()),
        ("seed".into(), cfg.seed.to_string()),
        ("cells".into(), records.len().to_string()),
        ("cells_ok".into(), ok.to_string()),
        ("cells_failed".into(), failed.to_string()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{AxisSpec, GridAxis};

    fn tiny_fidelity_config() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(ExperimentKind::FidelitySweep);
        cfg.seed = 9;
        cfg.sensing.bs = 0.0; // phi = 0 so the y-rotation spans the full range
        cfg.opt.loss_tol = 1e-9;
        cfg.opt.step = 5.0;
        cfg.opt.max_iters = 2000;
        // the default (pi/2, pi/3) start is a stationary point of the loss
        // for exactly diagonal inputs (the overlap = 0 column); shift it
        cfg.opt.init_pattern = vec![std::f64::consts::FRAC_PI_2 - 0.3, std::f64::consts::FRAC_PI_3];
        cfg.grid = vec![
            GridAxis { name: "p0".into(), spec: AxisSpec::List(vec![0.7, 0.9]) },
            GridAxis {
                name: "overlap".into(),
                spec: AxisSpec::Linspace { min: 0.0, max: 0.8, points: 3 },
            },
        ];
        cfg
    }

    #[test]
    fn fidelity_sweep_covers_grid_and_finds_gains() {
        let cfg = tiny_fidelity_config();
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.records.len(), 6);
        for rec in &out.records {
            assert!(rec.status.is_ok(), "cell {} status {:?}", rec.cell_index, rec.status);
            assert!(rec.delta_f.unwrap() > 0.0);
            let requested = rec.axis("overlap").unwrap();
            assert!((rec.overlap_achieved.unwrap() - requested).abs() < 1e-9);
        }
        // header + 6 rows + comment
        assert_eq!(out.csv.lines().count(), 8);
        assert!(out.csv.starts_with("# qmetro"));
    }

    #[test]
    fn identical_runs_are_byte_identical() {
        let cfg = tiny_fidelity_config();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.csv, b.csv);
    }

    #[test]
    fn qfi_sweep_reports_enhancement() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::QfiSweep);
        cfg.seed = 4;
        cfg.sensing.bs = 0.25;
        cfg.opt.step = 5.0;
        cfg.opt.max_iters = 300;
        cfg.grid = vec![
            GridAxis { name: "n".into(), spec: AxisSpec::List(vec![2.0]) },
            GridAxis { name: "tau_ns".into(), spec: AxisSpec::List(vec![60.0]) },
            GridAxis {
                name: "overlap".into(),
                spec: AxisSpec::List(vec![0.1, 0.5]),
            },
        ];
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.records.len(), 2);
        for rec in &out.records {
            let before = rec.qfi_before.unwrap();
            let after = rec.qfi_after.unwrap();
            let hl = rec.hl.unwrap();
            assert!(after >= before - 1e-6 * hl);
            assert!(before < hl);
            assert!(rec.sql.unwrap() < hl);
        }
    }

    #[test]
    fn ramsey_exact_mode_round_trips_without_noise() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Ramsey);
        cfg.seed = 3;
        cfg.opt.loss_tol = 1e-12;
        cfg.opt.step = 5.0;
        cfg.opt.max_iters = 3000;
        cfg.grid = vec![
            GridAxis { name: "sigma_ratio".into(), spec: AxisSpec::List(vec![0.0]) },
            GridAxis {
                name: "phi".into(),
                spec: AxisSpec::List(vec![std::f64::consts::FRAC_PI_4]),
            },
        ];
        let out = run_experiment(&cfg).unwrap();
        let rec = &out.records[0];
        assert!(rec.status.is_ok());
        assert!((rec.b_est_ramsey.unwrap() - 0.25).abs() < 1e-12);
        assert!((rec.b_est_qpca.unwrap() - 0.25).abs() < 1e-6);
    }

    #[test]
    fn convergence_emits_full_traces() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Convergence);
        cfg.seed = 5;
        cfg.opt.step = 5.0;
        cfg.opt.max_iters = 50;
        cfg.opt.loss_tol = 1e-10;
        cfg.grid = vec![
            GridAxis { name: "n".into(), spec: AxisSpec::List(vec![2.0]) },
            GridAxis { name: "sigma_ratio".into(), spec: AxisSpec::List(vec![0.1]) },
        ];
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.traces.len(), 1);
        let (_, trace) = &out.traces[0];
        // comment + header + one row per trace record
        assert_eq!(out.csv.lines().count(), 2 + trace.records.len());
    }

    #[test]
    fn transmission_zero_loss_matches_qfi_sweep_values() {
        let mut base = ExperimentConfig::new(ExperimentKind::TransmissionSweep);
        base.seed = 6;
        base.sensing.n = 2;
        base.sensing.tau = 60e-9;
        base.opt.step = 5.0;
        base.opt.max_iters = 200;
        base.grid = vec![
            GridAxis { name: "gamma".into(), spec: AxisSpec::List(vec![0.0, 0.0415]) },
            GridAxis { name: "overlap".into(), spec: AxisSpec::List(vec![0.3]) },
        ];
        let out = run_experiment(&base).unwrap();
        assert_eq!(out.records.len(), 2);
        let lossless = &out.records[0];
        let lossy = &out.records[1];
        // damping strictly reduces both branches
        assert!(lossy.qfi_after.unwrap() < lossless.qfi_after.unwrap());
        assert!(lossless.qfi_diff.unwrap() > 0.0);

        // the gamma = 0 cell agrees with the qfi-sweep on the same settings
        let mut qcfg = ExperimentConfig::new(ExperimentKind::QfiSweep);
        qcfg.seed = 6;
        qcfg.sensing = base.sensing;
        qcfg.opt = base.opt.clone();
        qcfg.grid = vec![
            GridAxis { name: "n".into(), spec: AxisSpec::List(vec![2.0]) },
            GridAxis { name: "tau_ns".into(), spec: AxisSpec::List(vec![60.0]) },
            GridAxis { name: "overlap".into(), spec: AxisSpec::List(vec![0.3]) },
        ];
        let qout = run_experiment(&qcfg).unwrap();
        let qrec = &qout.records[0];
        assert!((qrec.qfi_before.unwrap() - lossless.qfi_before.unwrap()).abs() < 1e-6);
        assert!((qrec.qfi_after.unwrap() - lossless.qfi_after.unwrap()).abs() < 1e-6);
    }
}
