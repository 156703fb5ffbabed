//! Variational principal-component extraction.
//!
//! A layered circuit of per-qubit x/y rotations and a CNOT ring is trained to
//! diagonalize a density matrix by gradient descent on the off-diagonal
//! Hilbert-Schmidt weight. Retaining the dominant diagonal entry and undoing
//! the circuit yields the purified state. `pca_oracle` provides the exact
//! eigendecomposition reference that every variational result is judged
//! against.
//!
//! The gradient is the literal half-difference
//! `g_j = (L(theta_j + delta) - L(theta_j - delta)) / 2` with no `1/delta`
//! factor; the step sizes absorb that scale.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{
    eigendecompose, CMatrix, CVector, DensityMatrix, StateVector, UnitaryMatrix,
};

/// Loss level below which a parameter point counts as diagonalizing.
pub const DEFAULT_DIAG_TOL: f64 = 1e-4;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Gate layout: per layer, an Rx then an Ry on every qubit followed by a
/// ring of CNOTs (no ring for a single qubit). Parameters are ordered layer
/// by layer, qubit by qubit, x before y; for one qubit and one layer the
/// circuit applies Rx(theta_x) first and Ry(theta_y) second, i.e. the matrix
/// Ry(theta_y) Rx(theta_x).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ansatz {
    n: usize,
    layers: usize,
}

impl Ansatz {
    pub fn new(n: usize, layers: usize) -> Result<Self> {
        if n < 1 || layers < 1 {
            return Err(Error::Domain(format!(
                "ansatz needs n >= 1 and layers >= 1, got n={n}, layers={layers}"
            )));
        }
        Ok(Self { n, layers })
    }

    /// One layer per qubit, the default depth used throughout.
    pub fn hardware_default(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    /// Depth sized so the parameter count covers the real dimension of a
    /// rank-r eigenframe, 2 d r - r^2 - r: enough capacity to map the
    /// support of a rank-r state onto basis vectors. Never shallower than
    /// the per-qubit default.
    pub fn for_rank(n: usize, rank: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("ansatz needs n >= 1".into()));
        }
        let dim = 1usize << n;
        let r = rank.clamp(1, dim);
        let frame_dim = 2 * dim * r - r * r - r;
        let layers = frame_dim.div_ceil(2 * n).max(n);
        Self::new(n, layers)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn param_count(&self) -> usize {
        2 * self.n * self.layers
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_count() {
            return Err(Error::DimensionMismatch(format!(
                "ansatz expects {} parameters, got {}",
                self.param_count(),
                theta.len()
            )));
        }
        Ok(())
    }

    /// Applies U(theta) to a raw amplitude vector.
    pub(crate) fn apply(&self, theta: &[f64], v: &CVector) -> CVector {
        let mut amps = v.clone();
        for layer in 0..self.layers {
            for q in 0..self.n {
                let base = 2 * (layer * self.n + q);
                apply_single_qubit(&mut amps, self.n, q, &rx_gate(theta[base]));
                apply_single_qubit(&mut amps, self.n, q, &ry_gate(theta[base + 1]));
            }
            if self.n >= 2 {
                for q in 0..self.n {
                    apply_cnot(&mut amps, self.n, q, (q + 1) % self.n);
                }
            }
        }
        amps
    }

    /// Applies U(theta)^dag to a raw amplitude vector.
    pub(crate) fn apply_adjoint(&self, theta: &[f64], v: &CVector) -> CVector {
        let mut amps = v.clone();
        for layer in (0..self.layers).rev() {
            if self.n >= 2 {
                for q in (0..self.n).rev() {
                    apply_cnot(&mut amps, self.n, q, (q + 1) % self.n);
                }
            }
            for q in (0..self.n).rev() {
                let base = 2 * (layer * self.n + q);
                apply_single_qubit(&mut amps, self.n, q, &ry_gate(-theta[base + 1]));
                apply_single_qubit(&mut amps, self.n, q, &rx_gate(-theta[base]));
            }
        }
        amps
    }

    /// Dense circuit unitary, validated to 1e-10.
    pub fn unitary(&self, theta: &[f64]) -> Result<UnitaryMatrix> {
        self.check_theta(theta)?;
        let dim = self.dim();
        let mut mat = CMatrix::zeros(dim, dim);
        for k in 0..dim {
            let mut e = CVector::zeros(dim);
            e[k] = c(1.0);
            mat.set_column(k, &self.apply(theta, &e));
        }
        UnitaryMatrix::new(mat)
    }
}

/// 2x2 gate entries [m00, m01, m10, m11].
type Gate2 = [Complex64; 4];

fn rx_gate(theta: f64) -> Gate2 {
    let (s, co) = (theta / 2.0).sin_cos();
    let mi = Complex64::new(0.0, -s);
    [c(co), mi, mi, c(co)]
}

fn ry_gate(theta: f64) -> Gate2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [c(co), c(-s), c(s), c(co)]
}

/// Applies a 2x2 gate to qubit `q`; qubit 0 is the most significant bit.
fn apply_single_qubit(amps: &mut CVector, n: usize, q: usize, gate: &Gate2) {
    let bit = 1usize << (n - 1 - q);
    let dim = amps.len();
    let mut idx = 0usize;
    while idx < dim {
        if idx & bit == 0 {
            let other = idx | bit;
            let a = amps[idx];
            let b = amps[other];
            amps[idx] = gate[0] * a + gate[1] * b;
            amps[other] = gate[2] * a + gate[3] * b;
        }
        idx += 1;
    }
}

/// CNOT with the given control and target qubits (a basis permutation).
fn apply_cnot(amps: &mut CVector, n: usize, control: usize, target: usize) {
    let cbit = 1usize << (n - 1 - control);
    let tbit = 1usize << (n - 1 - target);
    let dim = amps.len();
    for idx in 0..dim {
        if idx & cbit != 0 && idx & tbit == 0 {
            amps.swap_rows(idx, idx | tbit);
        }
    }
}

/// Finite-difference probe, per-parameter step sizes, iteration and loss
/// limits, and the initial angles.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub delta: f64,
    pub steps: Vec<f64>,
    pub max_iters: usize,
    pub loss_tol: f64,
    pub init: Vec<f64>,
}

impl OptimizerConfig {
    /// delta = 0.05 rad, uniform step 2.0, 200 iterations, loss tolerance
    /// 1e-6, angles initialized to the (pi/2, pi/3) pair repeated.
    pub fn defaults(param_count: usize) -> Self {
        let pair = [std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_3];
        Self {
            delta: 0.05,
            steps: vec![2.0; param_count],
            max_iters: 200,
            loss_tol: 1e-6,
            init: (0..param_count).map(|j| pair[j % 2]).collect(),
        }
    }

    pub fn with_uniform_step(mut self, step: f64) -> Self {
        for s in &mut self.steps {
            *s = step;
        }
        self
    }

    fn validate(&self, param_count: usize) -> Result<()> {
        if self.delta <= 0.0 {
            return Err(Error::Domain(format!("delta = {} must be positive", self.delta)));
        }
        if self.steps.len() != param_count || self.steps.iter().any(|&s| s <= 0.0) {
            return Err(Error::Domain("step sizes must be positive, one per parameter".into()));
        }
        if self.loss_tol < 0.0 {
            return Err(Error::Domain("loss tolerance must be nonnegative".into()));
        }
        if self.init.len() != param_count {
            return Err(Error::DimensionMismatch(format!(
                "init has {} parameters, ansatz needs {param_count}",
                self.init.len()
            )));
        }
        Ok(())
    }
}

/// One optimizer step as recorded in the trace.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub iteration: usize,
    pub params: Vec<f64>,
    pub loss: f64,
    /// Overlap of the currently extracted state with the exact principal
    /// component.
    pub fidelity_vs_oracle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptStatus {
    Converged,
    MaxIters,
}

impl OptStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            OptStatus::Converged => "converged",
            OptStatus::MaxIters => "max-iters",
        }
    }
}

/// Full optimization history. The record at index 0 is the initial point.
#[derive(Debug, Clone)]
pub struct OptimizationTrace {
    pub records: Vec<TraceRecord>,
    pub status: OptStatus,
}

impl OptimizationTrace {
    pub fn final_record(&self) -> &TraceRecord {
        self.records.last().expect("trace is never empty")
    }

    pub fn final_params(&self) -> &[f64] {
        &self.final_record().params
    }

    pub fn final_loss(&self) -> f64 {
        self.final_record().loss
    }

    /// First iteration index whose extracted state reaches the given overlap
    /// with the oracle principal component.
    pub fn iterations_to_fidelity(&self, threshold: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.fidelity_vs_oracle >= threshold)
            .map(|r| r.iteration)
    }

    /// CSV export: iteration, loss, fidelity, then one column per parameter.
    pub fn to_csv(&self) -> String {
        let params = self.records.first().map_or(0, |r| r.params.len());
        let mut out = String::from("iteration,loss,fidelity_vs_oracle");
        for j in 0..params {
            out.push_str(&format!(",theta_{j}"));
        }
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{}",
                r.iteration,
                fmt_float(r.loss),
                fmt_float(r.fidelity_vs_oracle)
            ));
            for p in &r.params {
                out.push(',');
                out.push_str(&fmt_float(*p));
            }
            out.push('\n');
        }
        out
    }
}

/// Canonical float formatting shared by all CSV output: 12 significant
/// digits, scientific notation.
pub(crate) fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Off-diagonal Hilbert-Schmidt weight of U(theta) rho U(theta)^dag; zero
/// exactly when the rotated state is diagonal.
pub fn loss(theta: &[f64], rho: &DensityMatrix, ansatz: &Ansatz) -> Result<f64> {
    ansatz.check_theta(theta)?;
    check_dims(rho, ansatz)?;
    let u = ansatz.unitary(theta)?;
    let rotated = u.matrix() * rho.matrix() * u.matrix().adjoint();
    let mut sum = 0.0;
    for i in 0..rotated.nrows() {
        for j in 0..rotated.ncols() {
            if i != j {
                sum += rotated[(i, j)].norm_sqr();
            }
        }
    }
    Ok(sum)
}

/// Eq.-style half-difference gradient: component j is
/// (L(theta_j + delta) - L(theta_j - delta)) / 2, not divided by delta.
pub fn fd_gradient(theta: &[f64], rho: &DensityMatrix, ansatz: &Ansatz, delta: f64) -> Result<Vec<f64>> {
    ansatz.check_theta(theta)?;
    check_dims(rho, ansatz)?;
    if delta <= 0.0 {
        return Err(Error::Domain(format!("delta = {delta} must be positive")));
    }
    let eval = LossEvaluator::new(rho, ansatz);
    Ok(gradient_impl(&eval, theta, delta))
}

fn gradient_impl(eval: &LossEvaluator, theta: &[f64], delta: f64) -> Vec<f64> {
    let mut grad = Vec::with_capacity(theta.len());
    let mut probe = theta.to_vec();
    for j in 0..theta.len() {
        probe[j] = theta[j] + delta;
        let plus = eval.loss(&probe);
        probe[j] = theta[j] - delta;
        let minus = eval.loss(&probe);
        probe[j] = theta[j];
        grad.push(0.5 * (plus - minus));
    }
    grad
}

/// Gradient descent on the diagonalization loss with the literal
/// half-difference gradient and update theta_j <- theta_j - step_j * g_j.
pub fn optimize(rho: &DensityMatrix, ansatz: &Ansatz, cfg: &OptimizerConfig) -> Result<OptimizationTrace> {
    check_dims(rho, ansatz)?;
    cfg.validate(ansatz.param_count())?;
    let eval = LossEvaluator::new(rho, ansatz);
    let (oracle_state, _) = pca_oracle(rho)?;
    let oracle_vec = top_vector(&oracle_state);

    let mut theta = cfg.init.clone();
    let mut records = Vec::new();
    let mut status = OptStatus::MaxIters;
    for iteration in 0..=cfg.max_iters {
        let loss_now = eval.loss(&theta);
        let fid = eval.extracted_overlap(&theta, &oracle_vec);
        records.push(TraceRecord {
            iteration,
            params: theta.clone(),
            loss: loss_now,
            fidelity_vs_oracle: fid,
        });
        if loss_now < cfg.loss_tol {
            status = OptStatus::Converged;
            break;
        }
        if iteration == cfg.max_iters {
            break;
        }
        let grad = gradient_impl(&eval, &theta, cfg.delta);
        for (j, g) in grad.iter().enumerate() {
            theta[j] -= cfg.steps[j] * g;
        }
    }
    Ok(OptimizationTrace { records, status })
}

/// Rotates with U(theta), keeps the dominant diagonal entry (lowest index on
/// ties) and undoes the rotation, yielding the rank-1 purified state.
///
/// Fails unless the loss at theta is below the diagonality tolerance.
pub fn extract_principal(rho: &DensityMatrix, theta: &[f64], ansatz: &Ansatz) -> Result<DensityMatrix> {
    extract_principal_with_tol(rho, theta, ansatz, DEFAULT_DIAG_TOL)
}

pub fn extract_principal_with_tol(
    rho: &DensityMatrix,
    theta: &[f64],
    ansatz: &Ansatz,
    diag_tol: f64,
) -> Result<DensityMatrix> {
    ansatz.check_theta(theta)?;
    check_dims(rho, ansatz)?;
    let eval = LossEvaluator::new(rho, ansatz);
    let loss_now = eval.loss(theta);
    if loss_now > diag_tol {
        return Err(Error::NotConverged(format!(
            "loss {loss_now:.3e} above diagonality tolerance {diag_tol:.3e}"
        )));
    }
    Ok(extract_unchecked(&eval, theta, ansatz))
}

fn extract_unchecked(eval: &LossEvaluator, theta: &[f64], ansatz: &Ansatz) -> DensityMatrix {
    let populations = eval.populations(theta);
    let mut k = 0usize;
    for (i, &p) in populations.iter().enumerate() {
        if p > populations[k] {
            k = i;
        }
    }
    let dim = ansatz.dim();
    let mut basis = CVector::zeros(dim);
    basis[k] = c(1.0);
    let vec = ansatz.apply_adjoint(theta, &basis);
    DensityMatrix::from_pure(&StateVector::from_raw(vec, ansatz.n_qubits()))
}

/// Exact classical reference: the projector onto the top eigenvector and its
/// eigenvalue.
pub fn pca_oracle(rho: &DensityMatrix) -> Result<(DensityMatrix, f64)> {
    let spec = eigendecompose(rho)?;
    let top = spec.eigenvector(0);
    Ok((DensityMatrix::from_pure(&top), spec.eigenvalues()[0]))
}

fn check_dims(rho: &DensityMatrix, ansatz: &Ansatz) -> Result<()> {
    if rho.dim() != ansatz.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs ansatz dim {}",
            rho.dim(),
            ansatz.dim()
        )));
    }
    Ok(())
}

fn top_vector(projector: &DensityMatrix) -> CVector {
    // column of the rank-1 projector with the largest diagonal entry
    let mat = projector.matrix();
    let mut k = 0usize;
    for i in 0..mat.nrows() {
        if mat[(i, i)].re > mat[(k, k)].re {
            k = i;
        }
    }
    let col = mat.column(k).clone_owned();
    col.clone() / c(col.norm())
}

/// Evaluates the loss through a rank-revealing factorization of rho.
///
/// With rho = Q M Q^dag (Q an orthonormal support basis from pivoted
/// Gram-Schmidt on the columns of rho), the rotated diagonal is
/// D_ii = row_i(UQ) M row_i(UQ)^dag and the loss is Tr[rho^2] - sum_i D_ii^2,
/// which matches the dense definition exactly while only applying the
/// circuit to rank-many vectors.
struct LossEvaluator<'a> {
    ansatz: &'a Ansatz,
    support: Vec<CVector>,
    small: CMatrix,
    purity: f64,
}

impl<'a> LossEvaluator<'a> {
    fn new(rho: &DensityMatrix, ansatz: &'a Ansatz) -> Self {
        let mat = rho.matrix();
        let dim = mat.nrows();
        let mut residual: Vec<CVector> = (0..dim).map(|j| mat.column(j).clone_owned()).collect();
        let scale = residual.iter().map(|col| col.norm()).fold(0.0f64, f64::max);
        let tol = (scale * 1e-13).max(1e-300);

        let mut support: Vec<CVector> = Vec::new();
        loop {
            let (best, norm) = residual
                .iter()
                .enumerate()
                .map(|(j, col)| (j, col.norm()))
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            if norm < tol || support.len() == dim {
                break;
            }
            let q = residual[best].clone() / c(norm);
            for col in &mut residual {
                let coeff = q.dotc(col);
                *col -= &q * coeff;
            }
            support.push(q);
        }
        if support.is_empty() {
            // rho is (numerically) zero on its support scan; fall back to e_0
            let mut e = CVector::zeros(dim);
            e[0] = c(1.0);
            support.push(e);
        }

        let r = support.len();
        let mut small = CMatrix::zeros(r, r);
        for (j, qj) in support.iter().enumerate() {
            let rq = mat * qj;
            for (i, qi) in support.iter().enumerate() {
                small[(i, j)] = qi.dotc(&rq);
            }
        }
        Self {
            ansatz,
            support,
            small,
            purity: rho.purity(),
        }
    }

    /// Diagonal of U(theta) rho U(theta)^dag.
    fn populations(&self, theta: &[f64]) -> Vec<f64> {
        let dim = self.ansatz.dim();
        let r = self.support.len();
        let rotated: Vec<CVector> = self
            .support
            .iter()
            .map(|q| self.ansatz.apply(theta, q))
            .collect();
        let mut populations = vec![0.0f64; dim];
        let mut row = vec![Complex64::new(0.0, 0.0); r];
        for i in 0..dim {
            for (s, col) in rotated.iter().enumerate() {
                row[s] = col[i];
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (s, &bs) in row.iter().enumerate() {
                let mut inner = Complex64::new(0.0, 0.0);
                for (t, &bt) in row.iter().enumerate() {
                    inner += self.small[(s, t)] * bt.conj();
                }
                acc += bs * inner;
            }
            populations[i] = acc.re;
        }
        populations
    }

    fn loss(&self, theta: &[f64]) -> f64 {
        let diag_weight: f64 = self.populations(theta).iter().map(|p| p * p).sum();
        (self.purity - diag_weight).max(0.0)
    }

    /// Overlap of the extracted state at theta with a reference vector:
    /// |(U v)_k|^2 for the dominant diagonal index k.
    fn extracted_overlap(&self, theta: &[f64], reference: &CVector) -> f64 {
        let populations = self.populations(theta);
        let mut k = 0usize;
        for (i, &p) in populations.iter().enumerate() {
            if p > populations[k] {
                k = i;
            }
        }
        let rotated = self.ansatz.apply(theta, reference);
        rotated[k].norm_sqr()
    }
}
