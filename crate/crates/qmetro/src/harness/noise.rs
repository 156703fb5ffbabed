//! Deterministic noise-unitary constructions for overlap-targeted sweeps.
//!
//! A sweep cell asks for a noise unitary with a given overlap
//! `|<psi_t|N|psi_t>|^2` against the cell's target state. Two one-parameter
//! families are available, each solved for the requested overlap by
//! bisection on [0, eta_max]:
//!
//! - `y-rotation`: N(eta) = Ry(eta) on every qubit. Spans the full overlap
//!   range [0, 1] at phi = 0 and tips population out of the GHZ subspace.
//! - `field-kick`: N(eta) advances the encoded phase by eta per qubit (a
//!   collective z kick conjugated into the readout frame). This is the
//!   unitary backbone of Gaussian field noise and spans [0, 1] at any
//!   operating phase.

use num_complex::Complex64;

use crate::channels::noise_overlap;
use crate::error::{Error, Result};
use crate::sensing::{closing_rotation, ramsey_pure};
use crate::state::{tensor_product, CMatrix, DensityMatrix, UnitaryMatrix};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Which one-parameter unitary family realizes the overlap axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseFamily {
    YRotation,
    FieldKick,
}

impl NoiseFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseFamily::YRotation => "y-rotation",
            NoiseFamily::FieldKick => "field-kick",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "y-rotation" => Ok(NoiseFamily::YRotation),
            "field-kick" => Ok(NoiseFamily::FieldKick),
            other => Err(Error::Parse(format!("unknown noise family '{other}'"))),
        }
    }
}

/// Ry(eta) applied to every qubit.
pub fn collective_y_rotation(eta: f64, n_qubits: usize) -> UnitaryMatrix {
    let (s, co) = (eta / 2.0).sin_cos();
    let single = CMatrix::from_row_slice(2, 2, &[c(co), c(-s), c(s), c(co)]);
    let mut full = CMatrix::identity(1, 1);
    for _ in 0..n_qubits {
        full = tensor_product(&full, &single);
    }
    UnitaryMatrix::from_raw(full)
}

/// Phase kick advancing the encoded phase by eta: a collective
/// exp(-i eta sigma_z / 2) during free evolution, expressed in the
/// post-readout frame.
pub fn phase_kick(eta: f64, n_qubits: usize) -> UnitaryMatrix {
    let dim = 1usize << n_qubits;
    let mut kick = CMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let ones = idx.count_ones() as f64;
        kick[(idx, idx)] = Complex64::from_polar(1.0, eta * (ones - n_qubits as f64 / 2.0));
    }
    let r = closing_rotation(n_qubits);
    UnitaryMatrix::from_raw(r.matrix() * kick * r.matrix().adjoint())
}

/// Solves the family angle so that the overlap against the probe state at
/// `phi` hits `target`, by bisection on the monotone branch.
pub fn noise_unitary_for_overlap(
    family: NoiseFamily,
    n_qubits: usize,
    phi: f64,
    target: f64,
) -> Result<UnitaryMatrix> {
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::Domain(format!("overlap target {target} outside [0, 1]")));
    }
    let rho = DensityMatrix::from_pure(&ramsey_pure(n_qubits, phi));
    let build = |eta: f64| match family {
        NoiseFamily::YRotation => collective_y_rotation(eta, n_qubits),
        NoiseFamily::FieldKick => phase_kick(eta, n_qubits),
    };
    let eta_max = match family {
        NoiseFamily::YRotation => std::f64::consts::PI,
        // overlap = cos^2(n eta / 2) hits zero at eta = pi / n
        NoiseFamily::FieldKick => std::f64::consts::PI / n_qubits as f64,
    };
    let overlap_at = |eta: f64| noise_overlap(&rho, &build(eta)).expect("dims match");

    let floor = overlap_at(eta_max);
    if target < floor - 1e-12 {
        return Err(Error::Domain(format!(
            "overlap {target} unreachable for this family at phi = {phi} (floor {floor:.6})"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, eta_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if overlap_at(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(build(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solved_unitaries_hit_requested_overlaps() {
        for &family in &[NoiseFamily::YRotation, NoiseFamily::FieldKick] {
            for n in [1usize, 2, 4] {
                let phi = if family == NoiseFamily::YRotation { 0.0 } else { 0.4 };
                let rho = DensityMatrix::from_pure(&ramsey_pure(n, phi));
                for &target in &[0.0, 0.2, 0.55, 0.9, 1.0] {
                    let u = noise_unitary_for_overlap(family, n, phi, target).unwrap();
                    let achieved = noise_overlap(&rho, &u).unwrap();
                    assert_relative_eq!(achieved, target, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn field_kick_advances_encoded_phase() {
        let n = 2;
        let eta = 0.3;
        let u = phase_kick(eta, n);
        for &phi in &[0.0, 0.5, 1.1] {
            let shifted = u.matrix() * ramsey_pure(n, phi).amplitudes();
            let expect = ramsey_pure(n, phi + eta);
            let overlap = expect.amplitudes().dotc(&shifted).norm_sqr();
            assert_relative_eq!(overlap, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn unreachable_overlap_is_rejected() {
        // at phi = pi/2 the single-qubit y-rotation floor is sin^2(phi) = 1/2
        let err = noise_unitary_for_overlap(
            NoiseFamily::YRotation,
            1,
            std::f64::consts::FRAC_PI_2,
            0.1,
        );
        assert!(err.is_err());
    }
}
