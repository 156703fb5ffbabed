//! Probe preparation, field-to-phase encoding, the Ramsey sequence, Gaussian
//! field-noise ensembles, and field estimation.
//!
//! The protocol: prepare a superposition (GHZ state for n > 1), accumulate a
//! phase phi = gyro * (B0 + Bs) * tau during free evolution, close with a
//! fixed rotation that maps the phase onto populations, and read out the
//! excited population. Field noise enters as Gaussian jitter on Bs, which
//! dephases the ensemble-averaged state.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};

use crate::error::{Error, Result};
use crate::state::{CMatrix, CVector, DensityMatrix, StateVector, UnitaryMatrix};

/// NV electron gyromagnetic ratio, 2 pi x 2.8025 MHz/Gauss, in rad/s/Gauss.
pub const GYRO_NV: f64 = 2.0 * std::f64::consts::PI * 2.8025e6;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Physical parameters of one sensing run.
#[derive(Debug, Clone, Copy)]
pub struct SensingConfig {
    /// Auxiliary DC field in Gauss.
    pub b0: f64,
    /// Target field in Gauss.
    pub bs: f64,
    /// Free evolution time in seconds.
    pub tau: f64,
    /// Gyromagnetic ratio in rad/s/Gauss.
    pub gyro: f64,
    /// Probe qubit count.
    pub n: usize,
    /// Field-noise standard deviation in Gauss.
    pub sigma: f64,
}

impl SensingConfig {
    /// Single NV-style qubit with the standard electron gyromagnetic ratio.
    pub fn nv_defaults() -> Self {
        Self {
            b0: 0.0,
            bs: 0.25,
            tau: 356.85e-9,
            gyro: GYRO_NV,
            n: 1,
            sigma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau <= 0.0 {
            return Err(Error::Domain(format!("tau = {} must be positive", self.tau)));
        }
        if self.gyro <= 0.0 {
            return Err(Error::Domain(format!("gyro = {} must be positive", self.gyro)));
        }
        if self.n < 1 {
            return Err(Error::Domain("qubit count must be at least 1".into()));
        }
        if self.sigma < 0.0 {
            return Err(Error::Domain(format!("sigma = {} negative", self.sigma)));
        }
        let phi = self.phase();
        if !phi.is_finite() {
            return Err(Error::Domain(format!("accumulated phase {phi} is not finite")));
        }
        Ok(())
    }

    /// Accumulated single-qubit phase gyro * (B0 + Bs) * tau.
    pub fn phase(&self) -> f64 {
        self.gyro * (self.b0 + self.bs) * self.tau
    }
}

/// Result of a population readout.
#[derive(Debug, Clone)]
pub struct RamseyOutcome {
    /// Excited-population estimate.
    pub p1: f64,
    /// Sample count; zero means the exact expectation.
    pub shots: u64,
    /// The state that was read out.
    pub rho_out: DensityMatrix,
}

/// Equal superposition for n = 1, GHZ state (|0..0> + |1..1>)/sqrt(2) for
/// n >= 2.
pub fn prepare_probe(n: usize) -> Result<StateVector> {
    if n < 1 {
        return Err(Error::Domain("probe needs at least one qubit".into()));
    }
    let dim = 1usize << n;
    let mut amps = CVector::zeros(dim);
    amps[0] = c(std::f64::consts::FRAC_1_SQRT_2);
    amps[dim - 1] = c(std::f64::consts::FRAC_1_SQRT_2);
    StateVector::new(amps)
}

/// Free evolution under exp(-i phi sigma_z / 2) on every qubit: a basis
/// string with k ones picks up exp(i phi (k - n/2)), so |1> advances by
/// exp(i phi) relative to |0>.
pub fn evolve_phase(psi: &StateVector, phi: f64) -> StateVector {
    let n = psi.n_qubits();
    let amps = CVector::from_iterator(
        psi.dim(),
        psi.amplitudes().iter().enumerate().map(|(idx, amp)| {
            let ones = idx.count_ones() as f64;
            amp * Complex64::from_polar(1.0, phi * (ones - n as f64 / 2.0))
        }),
    );
    StateVector::from_raw(amps, n)
}

/// The closing rotation: Ry(-pi/2) on one qubit, and its logical analogue on
/// the span of |0..0> and |1..1> for GHZ probes (identity elsewhere).
pub fn closing_rotation(n: usize) -> UnitaryMatrix {
    let dim = 1usize << n;
    let last = dim - 1;
    let mut mat = CMatrix::identity(dim, dim);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    mat[(0, 0)] = c(s);
    mat[(0, last)] = c(s);
    mat[(last, 0)] = c(-s);
    mat[(last, last)] = c(s);
    UnitaryMatrix::from_raw(mat)
}

/// Noiseless target state after the full sequence:
/// cos(n phi / 2) |0..0> + i sin(n phi / 2) |1..1>.
pub fn ramsey_pure(n: usize, phi: f64) -> StateVector {
    let dim = 1usize << n;
    let half = n as f64 * phi / 2.0;
    let mut amps = CVector::zeros(dim);
    amps[0] = c(half.cos());
    amps[dim - 1] = Complex64::new(0.0, half.sin());
    StateVector::from_raw(amps, n)
}

/// Runs the noiseless sequence (prepare, evolve, closing rotation) and
/// returns the resulting rank-1 density matrix.
pub fn ramsey_density(cfg: &SensingConfig) -> Result<DensityMatrix> {
    cfg.validate()?;
    let probe = prepare_probe(cfg.n)?;
    let evolved = evolve_phase(&probe, cfg.phase());
    let rotated = closing_rotation(cfg.n).matrix() * evolved.amplitudes();
    Ok(DensityMatrix::from_pure(&StateVector::from_raw(rotated, cfg.n)))
}

/// Closed-form infinite-ensemble limit of Gaussian field noise: the GHZ
/// coherence is damped by exp(-(n gyro tau sigma)^2 / 2).
pub fn dephased_ramsey_density(cfg: &SensingConfig) -> Result<DensityMatrix> {
    cfg.validate()?;
    let dim = 1usize << cfg.n;
    let last = dim - 1;
    let phi = cfg.n as f64 * cfg.phase();
    let g = cfg.n as f64 * cfg.gyro * cfg.tau * cfg.sigma;
    let damping = (-0.5 * g * g).exp();

    let mut pre = CMatrix::zeros(dim, dim);
    pre[(0, 0)] = c(0.5);
    pre[(last, last)] = c(0.5);
    pre[(0, last)] = Complex64::from_polar(0.5 * damping, -phi);
    pre[(last, 0)] = Complex64::from_polar(0.5 * damping, phi);

    let r = closing_rotation(cfg.n);
    let out = r.matrix() * pre * r.matrix().adjoint();
    DensityMatrix::new(out)
}

/// Monte-Carlo average of the sequence over fields Bs + delta with
/// delta ~ N(0, sigma^2).
///
/// Per-sample seeds derive from (seed, sample index), so the result does not
/// depend on evaluation order.
pub fn gaussian_ensemble(cfg: &SensingConfig, n_fields: usize, seed: u64) -> Result<DensityMatrix> {
    cfg.validate()?;
    if n_fields < 1 {
        return Err(Error::Domain("ensemble needs at least one field sample".into()));
    }
    let dim = 1usize << cfg.n;
    let mut acc = CMatrix::zeros(dim, dim);
    let normal = Normal::new(0.0, cfg.sigma)
        .map_err(|e| Error::Domain(format!("bad noise distribution: {e}")))?;
    for k in 0..n_fields {
        let delta = if cfg.sigma == 0.0 {
            0.0
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, k as u64));
            normal.sample(&mut rng)
        };
        let phi = cfg.gyro * (cfg.b0 + cfg.bs + delta) * cfg.tau;
        let v = ramsey_pure(cfg.n, phi);
        acc += v.amplitudes() * v.amplitudes().adjoint();
    }
    acc /= c(n_fields as f64);
    DensityMatrix::new(acc)
}

/// Population readout of |1..1>. `shots = 0` returns the exact expectation;
/// a positive count draws from a binomial with the given seed.
pub fn readout(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<RamseyOutcome> {
    let exact = rho.population(rho.dim() - 1).clamp(0.0, 1.0);
    let p1 = if shots == 0 {
        exact
    } else {
        let binom = Binomial::new(shots, exact)
            .map_err(|e| Error::Domain(format!("bad binomial: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        binom.sample(&mut rng) as f64 / shots as f64
    };
    Ok(RamseyOutcome {
        p1,
        shots,
        rho_out: rho.clone(),
    })
}

/// Inverts p1 = sin^2(n phi / 2) on the principal branch n phi in [0, pi]:
/// Bs = 2 asin(sqrt(p1)) / (gyro tau n) - B0.
pub fn estimate_field(p1: f64, cfg: &SensingConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::Domain(format!("p1 = {p1} outside [0, 1]")));
    }
    cfg.validate()?;
    let scale = cfg.gyro * cfg.tau * cfg.n as f64;
    if scale == 0.0 {
        return Err(Error::DegenerateConfig("gyro * tau = 0 cannot be inverted".into()));
    }
    Ok(2.0 * p1.sqrt().asin() / scale - cfg.b0)
}

/// Magnitude of the GHZ-subspace coherence in the pre-rotation frame,
/// normalized so a noiseless state gives 1.
pub fn ramsey_coherence(rho: &DensityMatrix) -> f64 {
    let r = closing_rotation(rho.n_qubits());
    let pre = r.matrix().adjoint() * rho.matrix() * r.matrix();
    2.0 * pre[(0, rho.dim() - 1)].norm()
}

/// Deterministic per-sample seed derivation (splitmix64 finalizer).
pub(crate) fn derive_seed(run_seed: u64, index: u64) -> u64 {
    let mut z = run_seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
