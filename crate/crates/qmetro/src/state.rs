//! Quantum-state primitives: state vectors, density matrices, unitaries and
//! their eigenstructure.
//!
//! Everything is dense and double precision. The largest register handled in
//! practice is six qubits (64 x 64), so dense linear algebra is the right
//! tool. Qubit 0 is the leftmost tensor factor, i.e. the most significant bit
//! of a basis index.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = nalgebra::DVector<Complex64>;

/// Tolerance for construction-time invariants (norm, Hermiticity, trace,
/// unitarity), all checked elementwise.
pub const TOL_CONSTRUCT: f64 = 1e-10;
/// Tolerance for reconstruction-style checks (eigendecomposition round trips).
pub const TOL_RECONSTRUCT: f64 = 1e-9;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A normalized pure state on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: CVector,
    n_qubits: usize,
}

impl StateVector {
    /// Builds a state vector, checking unit norm and power-of-two length.
    pub fn new(amps: CVector) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "state length {dim} is not a power of two"
            )));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > TOL_CONSTRUCT {
            return Err(Error::InvalidState(format!(
                "state norm {norm} deviates from 1 beyond {TOL_CONSTRUCT:e}"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        Ok(Self { amps, n_qubits })
    }

    pub fn from_slice(amps: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps))
    }

    /// Computational basis state |index> on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        assert!(index < dim, "basis index {index} out of range for {n_qubits} qubits");
        let mut amps = CVector::zeros(dim);
        amps[index] = c(1.0);
        Self { amps, n_qubits }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "states of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// Squared overlap |<self|other>|^2.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Tensor product self (x) other; self becomes the leading factor.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let a = CMatrix::from_column_slice(self.dim(), 1, self.amps.as_slice());
        let b = CMatrix::from_column_slice(other.dim(), 1, other.amps.as_slice());
        let k = a.kronecker(&b);
        StateVector {
            amps: CVector::from_column_slice(k.as_slice()),
            n_qubits: self.n_qubits + other.n_qubits,
        }
    }

    pub(crate) fn from_raw(amps: CVector, n_qubits: usize) -> Self {
        Self { amps, n_qubits }
    }
}

/// A Hermitian, positive-semidefinite, unit-trace operator on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    n_qubits: usize,
}

impl DensityMatrix {
    /// Builds a density matrix, checking Hermiticity, unit trace and
    /// positive semidefiniteness (eigenvalues >= -1e-10).
    pub fn new(mat: CMatrix) -> Result<Self> {
        let (rows, cols) = mat.shape();
        if rows != cols || rows == 0 || !rows.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "density matrix shape {rows}x{cols} is not a square power of two"
            )));
        }
        let herm = max_hermiticity_defect(&mat);
        if herm > TOL_CONSTRUCT {
            return Err(Error::InvalidState(format!(
                "Hermiticity defect {herm:.3e} beyond {TOL_CONSTRUCT:e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TOL_CONSTRUCT || tr.im.abs() > TOL_CONSTRUCT {
            return Err(Error::InvalidState(format!("trace {tr} deviates from 1")));
        }
        let (eigenvalues, _) = hermitian_eigen_sorted(&mat);
        if let Some(&min) = eigenvalues.last() {
            if min < -TOL_CONSTRUCT {
                return Err(Error::InvalidState(format!(
                    "negative eigenvalue {min:.3e} below -{TOL_CONSTRUCT:e}"
                )));
            }
        }
        let n_qubits = rows.trailing_zeros() as usize;
        Ok(Self { mat, n_qubits })
    }

    /// Rank-1 projector |psi><psi|.
    pub fn from_pure(psi: &StateVector) -> Self {
        let v = psi.amplitudes();
        let mat = v * v.adjoint();
        Self {
            mat,
            n_qubits: psi.n_qubits(),
        }
    }

    /// I / 2^n.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mat = CMatrix::identity(dim, dim) * c(1.0 / dim as f64);
        Self { mat, n_qubits }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Diagonal population <index|rho|index>.
    pub fn population(&self, index: usize) -> f64 {
        self.mat[(index, index)].re
    }

    /// Tr[rho^2].
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Construction bypass for operation outputs that are valid by
    /// construction; debug builds still verify.
    pub(crate) fn from_raw(mat: CMatrix, n_qubits: usize) -> Self {
        debug_assert!(max_hermiticity_defect(&mat) <= TOL_CONSTRUCT);
        debug_assert!((mat.trace().re - 1.0).abs() <= TOL_CONSTRUCT);
        Self { mat, n_qubits }
    }
}

/// A matrix U with U^dag U = I within 1e-10 elementwise.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    mat: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        let (rows, cols) = mat.shape();
        if rows != cols || rows == 0 {
            return Err(Error::DimensionMismatch(format!(
                "unitary must be square, got {rows}x{cols}"
            )));
        }
        let defect = unitarity_defect(&mat);
        if defect > TOL_CONSTRUCT {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub(crate) fn from_raw(mat: CMatrix) -> Self {
        debug_assert!(unitarity_defect(&mat) <= 1e-9);
        Self { mat }
    }
}

/// Eigenvalues (descending) and matching eigenvector columns of a Hermitian
/// matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: UnitaryMatrix,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &UnitaryMatrix {
        &self.eigenvectors
    }

    /// Column `k` as a state vector.
    pub fn eigenvector(&self, k: usize) -> StateVector {
        let col = self.eigenvectors.matrix().column(k).clone_owned();
        let n_qubits = col.len().trailing_zeros() as usize;
        StateVector::from_raw(col, n_qubits)
    }

    /// K Lambda K^dag.
    pub fn reconstruct(&self) -> CMatrix {
        let k = self.eigenvectors.matrix();
        let lam = CMatrix::from_diagonal(&CVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&x| c(x)),
        ));
        k * lam * k.adjoint()
    }
}

/// Kronecker product with qubit 0 as the leftmost factor.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Eigendecomposition of a density matrix, sorted descending.
///
/// Exact eigenvalue ties are broken by ordering eigenvectors by the lowest
/// index of their largest-magnitude amplitude; each eigenvector is normalized
/// so its first nonzero component is real positive.
pub fn eigendecompose(rho: &DensityMatrix) -> Result<Spectrum> {
    let herm = max_hermiticity_defect(rho.matrix());
    if herm > TOL_CONSTRUCT {
        return Err(Error::InvalidState(format!(
            "Hermiticity defect {herm:.3e} beyond tolerance"
        )));
    }
    let (eigenvalues, vectors) = hermitian_eigen_sorted(rho.matrix());
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: UnitaryMatrix::from_raw(vectors),
    })
}

/// Overlap <psi|rho|psi> of a pure state with a density matrix.
pub fn fidelity_pure(psi: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs density matrix dim {}",
            psi.dim(),
            rho.dim()
        )));
    }
    let v = psi.amplitudes();
    let sandwich = v.dotc(&(rho.matrix() * v));
    Ok(sandwich.re)
}

/// Conjugation U rho U^dag.
pub fn apply_unitary(rho: &DensityMatrix, u: &UnitaryMatrix) -> Result<DensityMatrix> {
    if rho.dim() != u.dim() {
        return Err(Error::DimensionMismatch(format!(
            "density matrix dim {} vs unitary dim {}",
            rho.dim(),
            u.dim()
        )));
    }
    let m = u.matrix() * rho.matrix() * u.matrix().adjoint();
    Ok(DensityMatrix::from_raw(m, rho.n_qubits()))
}

pub(crate) fn max_hermiticity_defect(mat: &CMatrix) -> f64 {
    let n = mat.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (mat[(i, j)] - mat[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

pub(crate) fn unitarity_defect(mat: &CMatrix) -> f64 {
    let gram = mat.adjoint() * mat;
    let n = mat.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { c(1.0) } else { c(0.0) };
            worst = worst.max((gram[(i, j)] - expect).norm());
        }
    }
    worst
}

/// Sorted Hermitian eigendecomposition on the raw matrix; shared by the
/// public eigendecompose and by construction-time positivity checks.
///
/// Uses cyclic Jacobi rotations: unconditionally convergent, accurate for
/// clustered and zero eigenvalues, and deterministic for identical input
/// bits. Plenty fast at the dimensions handled here (at most 64 x 64).
pub(crate) fn hermitian_eigen_sorted(mat: &CMatrix) -> (Vec<f64>, CMatrix) {
    let dim = mat.nrows();
    let mut a = mat.clone();
    let mut vectors = CMatrix::identity(dim, dim);

    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale > 0.0 {
        let target = scale * 1e-15;
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..dim {
                for q in (p + 1)..dim {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if (2.0 * off).sqrt() <= target {
                break;
            }
            // threshold sweep: entries already below target/dim cannot keep
            // the total off-norm above target on their own
            let skip = target / dim as f64;
            for p in 0..dim {
                for q in (p + 1)..dim {
                    if a[(p, q)].norm() > skip {
                        jacobi_rotate(&mut a, &mut vectors, p, q);
                    }
                }
            }
        }
    }

    let raw: Vec<f64> = (0..dim).map(|i| a[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..dim).collect();
    let dominant_index = |k: usize| -> usize {
        let col = vectors.column(k);
        let mut best = 0usize;
        let mut best_mag = -1.0f64;
        for (i, z) in col.iter().enumerate() {
            let m = z.norm();
            if m > best_mag {
                best_mag = m;
                best = i;
            }
        }
        best
    };
    order.sort_by(|&a, &b| {
        let (la, lb) = (raw[a], raw[b]);
        if la == lb {
            dominant_index(a).cmp(&dominant_index(b))
        } else {
            lb.partial_cmp(&la).unwrap()
        }
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&k| raw[k]).collect();
    let mut sorted = CMatrix::zeros(dim, dim);
    for (out_col, &k) in order.iter().enumerate() {
        let mut col = vectors.column(k).clone_owned();
        // Fix global phase: first component above threshold becomes real positive.
        if let Some(z) = col.iter().find(|z| z.norm() > 1e-12) {
            let phase = z / z.norm();
            col /= phase;
        }
        sorted.set_column(out_col, &col);
    }
    (eigenvalues, sorted)
}

/// One complex Jacobi rotation zeroing the (p, q) element of the Hermitian
/// working matrix, accumulated into the eigenvector matrix.
fn jacobi_rotate(a: &mut CMatrix, vectors: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    // tan(2 theta) = 2|apq| / (aqq - app), evaluated stably
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let co = 1.0 / (1.0 + t * t).sqrt();
    let si = t * co;

    let dim = a.nrows();
    // columns: A <- A G with G[p][p]=co, G[p][q]=si*phase, G[q][p]=-si*conj(phase), G[q][q]=co
    for k in 0..dim {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * co - akq * si * phase.conj();
        a[(k, q)] = akp * si * phase + akq * co;
    }
    // rows: A <- G^dag A
    for k in 0..dim {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * co - aqk * si * phase;
        a[(q, k)] = apk * si * phase.conj() + aqk * co;
    }
    // clean the target entries and enforce real diagonal
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = c(a[(p, p)].re);
    a[(q, q)] = c(a[(q, q)].re);

    for k in 0..dim {
        let vkp = vectors[(k, p)];
        let vkq = vectors[(k, q)];
        vectors[(k, p)] = vkp * co - vkq * si * phase.conj();
        vectors[(k, q)] = vkp * si * phase + vkq * co;
    }
}
