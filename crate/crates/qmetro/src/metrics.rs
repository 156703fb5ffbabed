//! Accuracy and precision figures of merit.
//!
//! Quantum Fisher information is evaluated as the eigenbasis double sum
//! `sum_m sum_n 4 lambda_m |<m|drho|n>|^2 / (lambda_m + lambda_n)^2`
//! restricted to the support of rho, with the algebraically equal symmetric
//! form `2 sum |<m|drho|n>|^2 / (lambda_m + lambda_n)` kept alongside as a
//! cross-check. Analytic d(rho)/d(phi) is available for the Ramsey and
//! GHZ-phase families, pushed through parameter-independent noise by
//! linearity, with a central-difference fallback.

use num_complex::Complex64;

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::qpca::pca_oracle;
use crate::sensing::{closing_rotation, ramsey_pure, SensingConfig};
use crate::state::{hermitian_eigen_sorted, max_hermiticity_defect, CMatrix, DensityMatrix};

/// Eigenvalues below this floor are treated as outside the support of rho.
pub const DEFAULT_RANK_CUTOFF: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Which parameter the information is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfiParameter {
    /// Per accumulated phase, in rad^-2.
    Phase,
    /// Per target field, in Gauss^-2.
    Field,
}

#[derive(Debug, Clone, Copy)]
pub struct QfiResult {
    pub value: f64,
    pub parameter: QfiParameter,
    pub rank_cutoff: f64,
}

/// Quantum Fisher information per phase from a state and its phase
/// derivative.
pub fn qfi(rho: &DensityMatrix, drho: &CMatrix) -> Result<QfiResult> {
    qfi_with_cutoff(rho, drho, DEFAULT_RANK_CUTOFF)
}

pub fn qfi_with_cutoff(rho: &DensityMatrix, drho: &CMatrix, rank_cutoff: f64) -> Result<QfiResult> {
    check_drho(rho, drho)?;
    let (eigenvalues, vectors) = hermitian_eigen_sorted(rho.matrix());
    let overlaps = vectors.adjoint() * drho * &vectors;
    let dim = eigenvalues.len();
    let mut value = 0.0;
    for m in 0..dim {
        if eigenvalues[m] <= rank_cutoff {
            continue;
        }
        for n in 0..dim {
            let denom = eigenvalues[m] + eigenvalues[n];
            if denom <= rank_cutoff {
                continue;
            }
            value += 4.0 * eigenvalues[m] * overlaps[(m, n)].norm_sqr() / (denom * denom);
        }
    }
    Ok(QfiResult {
        value,
        parameter: QfiParameter::Phase,
        rank_cutoff,
    })
}

/// The symmetric form `2 sum_{m,n} |<m|drho|n>|^2 / (lambda_m + lambda_n)`,
/// kept as an independent algebraic route to the same quantity.
pub fn qfi_symmetric(rho: &DensityMatrix, drho: &CMatrix, rank_cutoff: f64) -> Result<f64> {
    check_drho(rho, drho)?;
    let (eigenvalues, vectors) = hermitian_eigen_sorted(rho.matrix());
    let overlaps = vectors.adjoint() * drho * &vectors;
    let dim = eigenvalues.len();
    let mut value = 0.0;
    for m in 0..dim {
        for n in 0..dim {
            let denom = eigenvalues[m] + eigenvalues[n];
            if denom <= rank_cutoff {
                continue;
            }
            value += 2.0 * overlaps[(m, n)].norm_sqr() / denom;
        }
    }
    Ok(value)
}

fn check_drho(rho: &DensityMatrix, drho: &CMatrix) -> Result<()> {
    if drho.nrows() != rho.dim() || drho.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "drho shape {}x{} vs state dim {}",
            drho.nrows(),
            drho.ncols(),
            rho.dim()
        )));
    }
    let herm = max_hermiticity_defect(drho);
    if herm > 1e-9 {
        return Err(Error::InvalidState(format!(
            "drho Hermiticity defect {herm:.3e} beyond 1e-9"
        )));
    }
    let tr = drho.trace();
    if tr.norm() > 1e-9 {
        return Err(Error::InvalidState(format!("drho trace {tr} is not zero")));
    }
    Ok(())
}

/// Chain rule to field units: d(rho)/dBs = gyro * tau * d(rho)/d(phi), so the
/// information picks up (gyro * tau)^2.
pub fn qfi_field(rho: &DensityMatrix, drho_dphi: &CMatrix, cfg: &SensingConfig) -> Result<QfiResult> {
    let scale = cfg.gyro * cfg.tau;
    let drho_field = drho_dphi * c(scale);
    let mut result = qfi(rho, &drho_field)?;
    result.parameter = QfiParameter::Field;
    Ok(result)
}

/// Heisenberg limit n^2 (gyro tau)^2 in per-field units.
pub fn heisenberg_limit(n: usize, cfg: &SensingConfig) -> f64 {
    let scale = cfg.gyro * cfg.tau;
    (n as f64 * scale).powi(2)
}

/// Standard quantum limit n (gyro tau)^2 in per-field units.
pub fn sql(n: usize, cfg: &SensingConfig) -> f64 {
    let scale = cfg.gyro * cfg.tau;
    n as f64 * scale * scale
}

/// Midpoint-normalized absolute percentage error |A - F| / ((A + F)/2).
pub fn ape(actual: f64, forecast: f64) -> Result<f64> {
    let midpoint = 0.5 * (actual + forecast);
    if midpoint == 0.0 {
        return Err(Error::DegenerateConfig(
            "APE undefined when actual + forecast = 0".into(),
        ));
    }
    Ok(((actual - forecast) / midpoint).abs())
}

/// Cramer-Rao variance floor 1/(N * F); infinite when the information
/// vanishes.
pub fn qcrb_variance(n_meas: u64, qfi_value: f64) -> Result<f64> {
    if n_meas == 0 {
        return Err(Error::Domain("measurement count must be at least 1".into()));
    }
    if qfi_value < 0.0 {
        return Err(Error::Domain(format!("negative information {qfi_value}")));
    }
    if qfi_value == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (n_meas as f64 * qfi_value))
}

/// Information gain in decibels, 10 log10(after / before).
pub fn db_gain(f_after: f64, f_before: f64) -> Result<f64> {
    if f_after <= 0.0 || f_before <= 0.0 {
        return Err(Error::Domain(format!(
            "dB gain needs positive inputs, got {f_after} and {f_before}"
        )));
    }
    Ok(10.0 * (f_after / f_before).log10())
}

/// The analytic probe families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeFamily {
    SingleQubitRamsey,
    GhzPhase { n: usize },
}

impl ProbeFamily {
    pub fn n_qubits(&self) -> usize {
        match self {
            ProbeFamily::SingleQubitRamsey => 1,
            ProbeFamily::GhzPhase { n } => *n,
        }
    }
}

/// A phase-parameterized state family: the pure post-rotation probe state,
/// optionally Gaussian-dephased, then passed through parameter-independent
/// channels. Both the state and its analytic phase derivative are available.
#[derive(Debug, Clone)]
pub struct PhaseEncoding {
    pub family: ProbeFamily,
    /// Gaussian phase-jitter standard deviation gyro * tau * sigma; applied
    /// as exact collective dephasing in the pre-rotation frame.
    pub dephasing: Option<f64>,
    /// Parameter-independent channels applied after the sensing stage.
    pub channels: Vec<KrausChannel>,
}

impl PhaseEncoding {
    pub fn pure(family: ProbeFamily) -> Self {
        Self {
            family,
            dephasing: None,
            channels: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.family.n_qubits()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    fn check_channels(&self) -> Result<()> {
        for ch in &self.channels {
            if ch.dim() != self.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "channel dim {} vs family dim {}",
                    ch.dim(),
                    self.dim()
                )));
            }
        }
        Ok(())
    }

    /// State of the family at the given single-qubit phase.
    pub fn state(&self, phi: f64) -> Result<DensityMatrix> {
        self.check_channels()?;
        DensityMatrix::new(self.raw_state(phi))
    }

    fn raw_state(&self, phi: f64) -> CMatrix {
        let n = self.n_qubits();
        let psi = ramsey_pure(n, phi);
        let mut mat = psi.amplitudes() * psi.amplitudes().adjoint();
        mat = self.push_through_noise(mat);
        mat
    }

    /// Analytic d(rho)/d(phi), pushed through the noise maps by linearity.
    pub fn drho_dphi(&self, phi: f64) -> Result<CMatrix> {
        self.check_channels()?;
        let n = self.n_qubits();
        let dim = self.dim();
        let last = dim - 1;
        let half = n as f64 * phi;
        let scale = n as f64 / 2.0;
        let mut mat = CMatrix::zeros(dim, dim);
        mat[(0, 0)] = c(-scale * half.sin());
        mat[(last, last)] = c(scale * half.sin());
        mat[(0, last)] = Complex64::new(0.0, -scale * half.cos());
        mat[(last, 0)] = Complex64::new(0.0, scale * half.cos());
        Ok(self.push_through_noise(mat))
    }

    /// Central-difference fallback for the phase derivative.
    pub fn drho_dphi_central(&self, phi: f64, step: f64) -> Result<CMatrix> {
        self.check_channels()?;
        if step <= 0.0 {
            return Err(Error::Domain(format!("step = {step} must be positive")));
        }
        let plus = self.raw_state(phi + step);
        let minus = self.raw_state(phi - step);
        Ok((plus - minus) / c(2.0 * step))
    }

    fn push_through_noise(&self, mat: CMatrix) -> CMatrix {
        let mut mat = mat;
        if let Some(g) = self.dephasing {
            mat = collective_dephase(&mat, self.n_qubits(), g);
        }
        for ch in &self.channels {
            mat = ch.apply_raw(&mat);
        }
        mat
    }
}

/// Exact Gaussian collective dephasing: in the pre-rotation frame, the
/// (i, j) element is damped by exp(-g^2 (m_i - m_j)^2 / 2) where m is the
/// basis-string excitation number and g the phase-jitter deviation.
fn collective_dephase(post_frame: &CMatrix, n_qubits: usize, g: f64) -> CMatrix {
    let r = closing_rotation(n_qubits);
    let mut pre = r.matrix().adjoint() * post_frame * r.matrix();
    let dim = pre.nrows();
    for i in 0..dim {
        for j in 0..dim {
            let dm = i.count_ones() as f64 - j.count_ones() as f64;
            pre[(i, j)] *= c((-0.5 * g * g * dm * dm).exp());
        }
    }
    r.matrix() * pre * r.matrix().adjoint()
}

/// Information of the purified branch: the top eigenprojector of the family
/// is differentiated centrally in phase (the purifier is rerun at phi +- h),
/// then converted to field units.
pub fn purified_qfi_field(
    encoding: &PhaseEncoding,
    phi: f64,
    cfg: &SensingConfig,
    step: f64,
) -> Result<QfiResult> {
    if step <= 0.0 {
        return Err(Error::Domain(format!("step = {step} must be positive")));
    }
    let center = encoding.state(phi)?;
    let (projector, _) = pca_oracle(&center)?;
    let (plus, _) = pca_oracle(&encoding.state(phi + step)?)?;
    let (minus, _) = pca_oracle(&encoding.state(phi - step)?)?;
    let dproj = (plus.matrix() - minus.matrix()) / c(2.0 * step);
    qfi_field(&projector, &dproj, cfg)
}
