//! Noise channels as Kraus-operator sets.
//!
//! Covers the unitary-mixture channel `rho -> P0 rho + (1-P0) N rho N^dag`,
//! depolarization toward the maximally mixed state, single-qubit amplitude
//! damping with per-qubit tensor extension, and the noise-overlap metric
//! `Tr[rho N rho N^dag]` used as a noise-strength coordinate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{tensor_product, CMatrix, DensityMatrix, UnitaryMatrix, TOL_CONSTRUCT};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A completely positive trace-preserving map given by operators {E_k} with
/// sum_k E_k^dag E_k = I.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<CMatrix>,
    dim: usize,
}

impl KrausChannel {
    /// Validates squareness, matching dimensions and trace preservation.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidState("channel needs at least one operator".into()));
        }
        let dim = ops[0].nrows();
        for op in &ops {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator of shape {}x{} in a dim-{dim} channel",
                    op.nrows(),
                    op.ncols()
                )));
            }
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for op in &ops {
            sum += op.adjoint() * op;
        }
        let mut defect = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { c(1.0) } else { c(0.0) };
                defect = defect.max((sum[(i, j)] - expect).norm());
            }
        }
        if defect > TOL_CONSTRUCT {
            return Err(Error::NotTracePreserving(defect));
        }
        Ok(Self { ops, dim })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            ops: vec![CMatrix::identity(dim, dim)],
            dim,
        }
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Channel acting as self on the first register and `other` on the second.
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let mut ops = Vec::with_capacity(self.ops.len() * other.ops.len());
        for a in &self.ops {
            for b in &other.ops {
                ops.push(tensor_product(a, b));
            }
        }
        KrausChannel {
            ops,
            dim: self.dim * other.dim,
        }
    }

    /// Independent per-qubit application of a single-qubit channel.
    pub fn tensor_power(&self, n: usize) -> Result<KrausChannel> {
        if n == 0 {
            return Err(Error::Domain("tensor power needs n >= 1".into()));
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor(self);
        }
        Ok(out)
    }

    /// Sequential composition: first self, then `after`.
    pub fn compose(&self, after: &KrausChannel) -> Result<KrausChannel> {
        if self.dim != after.dim {
            return Err(Error::DimensionMismatch(format!(
                "composing channels of dim {} and {}",
                self.dim, after.dim
            )));
        }
        let mut ops = Vec::with_capacity(self.ops.len() * after.ops.len());
        for f in &after.ops {
            for e in &self.ops {
                ops.push(f * e);
            }
        }
        Ok(KrausChannel { ops, dim: self.dim })
    }

    /// Kraus sum on a raw matrix; also valid on non-states (e.g. derivatives
    /// of a state family, by linearity).
    pub fn apply_raw(&self, mat: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for op in &self.ops {
            out += op * mat * op.adjoint();
        }
        out
    }
}

/// Which noise model a run uses, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    UnitaryMixture,
    Depolarize,
    AmplitudeDamping,
    GaussianField,
}

impl NoiseKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseKind::UnitaryMixture => "unitary-mixture",
            NoiseKind::Depolarize => "depolarize",
            NoiseKind::AmplitudeDamping => "amplitude-damping",
            NoiseKind::GaussianField => "gaussian-field",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "unitary-mixture" => Ok(NoiseKind::UnitaryMixture),
            "depolarize" => Ok(NoiseKind::Depolarize),
            "amplitude-damping" => Ok(NoiseKind::AmplitudeDamping),
            "gaussian-field" => Ok(NoiseKind::GaussianField),
            other => Err(Error::Parse(format!("unknown noise kind '{other}'"))),
        }
    }
}

/// Noise parameters as they appear in a harness configuration.
///
/// `p0` is the no-error probability, `gamma_loss` the transmission loss rate,
/// `sigma` the Gaussian field standard deviation in Gauss. The noise unitary
/// is only meaningful for the unitary-mixture kind; sweeps that target a
/// noise overlap construct it per cell instead.
#[derive(Debug, Clone)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub p0: f64,
    pub noise_unitary: Option<UnitaryMatrix>,
    pub gamma_loss: f64,
    pub sigma: f64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p0) {
            return Err(Error::Domain(format!("p0 = {} outside [0, 1]", self.p0)));
        }
        if !(0.0..=1.0).contains(&self.gamma_loss) {
            return Err(Error::Domain(format!(
                "gamma_loss = {} outside [0, 1]",
                self.gamma_loss
            )));
        }
        if self.sigma < 0.0 {
            return Err(Error::Domain(format!("sigma = {} negative", self.sigma)));
        }
        if self.noise_unitary.is_some() && self.kind != NoiseKind::UnitaryMixture {
            return Err(Error::Domain(
                "noise unitary given for a non-unitary-mixture kind".into(),
            ));
        }
        Ok(())
    }
}

/// Applies a channel: rho -> sum_k E_k rho E_k^dag.
pub fn apply_channel(rho: &DensityMatrix, ch: &KrausChannel) -> Result<DensityMatrix> {
    if rho.dim() != ch.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs channel dim {}",
            rho.dim(),
            ch.dim()
        )));
    }
    let out = ch.apply_raw(rho.matrix());
    DensityMatrix::new(out)
}

/// Two-operator channel {sqrt(P0) I, sqrt(1-P0) N} realizing
/// `rho -> P0 rho + (1-P0) N rho N^dag`.
pub fn unitary_mixture(p0: f64, n_op: &UnitaryMatrix) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::Domain(format!("p0 = {p0} outside [0, 1]")));
    }
    let dim = n_op.dim();
    let ops = vec![
        CMatrix::identity(dim, dim) * c(p0.sqrt()),
        n_op.matrix() * c((1.0 - p0).sqrt()),
    ];
    KrausChannel::new(ops)
}

/// Channel realizing `rho -> P0 rho + (1-P0) I/2^n` as a uniform Pauli-string
/// mixture: weight P0 + (1-P0)/4^n on the identity string and (1-P0)/4^n on
/// each of the remaining strings.
pub fn depolarize_to_mixed(p0: f64, n_qubits: usize) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::Domain(format!("p0 = {p0} outside [0, 1]")));
    }
    if n_qubits == 0 {
        return Err(Error::Domain("depolarizing channel needs n >= 1".into()));
    }
    let strings = 4usize.pow(n_qubits as u32);
    let base = (1.0 - p0) / strings as f64;
    let mut ops = Vec::with_capacity(strings);
    for code in 0..strings {
        let weight = if code == 0 { p0 + base } else { base };
        ops.push(pauli_string(code, n_qubits) * c(weight.sqrt()));
    }
    KrausChannel::new(ops)
}

/// Single-qubit amplitude damping with loss rate gamma:
/// E0 = [[1, 0], [0, sqrt(1-gamma)]], E1 = [[0, sqrt(gamma)], [0, 0]].
pub fn amplitude_damping(gamma_loss: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&gamma_loss) {
        return Err(Error::Domain(format!("gamma = {gamma_loss} outside [0, 1]")));
    }
    let e0 = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c((1.0 - gamma_loss).sqrt())]);
    let e1 = CMatrix::from_row_slice(2, 2, &[c(0.0), c(gamma_loss.sqrt()), c(0.0), c(0.0)]);
    KrausChannel::new(vec![e0, e1])
}

/// Amplitude damping applied independently to each of `n` qubits.
pub fn amplitude_damping_per_qubit(gamma_loss: f64, n_qubits: usize) -> Result<KrausChannel> {
    amplitude_damping(gamma_loss)?.tensor_power(n_qubits)
}

/// Noise overlap `Tr[rho N rho N^dag]`; equals |<psi|N|psi>|^2 on pure states.
pub fn noise_overlap(rho: &DensityMatrix, n_op: &UnitaryMatrix) -> Result<f64> {
    if rho.dim() != n_op.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs unitary dim {}",
            rho.dim(),
            n_op.dim()
        )));
    }
    let rotated = n_op.matrix() * rho.matrix() * n_op.matrix().adjoint();
    Ok((rho.matrix() * rotated).trace().re)
}

/// Pauli matrices in the order I, X, Y, Z.
pub fn pauli(index: usize) -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    match index {
        0 => CMatrix::identity(2, 2),
        1 => CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        2 => CMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]),
        3 => CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
        _ => panic!("Pauli index {index} out of range"),
    }
}

/// n-qubit Pauli string from a base-4 code; digit for qubit 0 is the most
/// significant.
fn pauli_string(code: usize, n_qubits: usize) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for q in 0..n_qubits {
        let digit = (code >> (2 * (n_qubits - 1 - q))) & 0b11;
        out = tensor_product(&out, &pauli(digit));
    }
    out
}
