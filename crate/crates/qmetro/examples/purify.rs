//! Variational purification of a noisy probe state, checked against the
//! exact eigendecomposition.
//!
//! Builds the mixture rho = P0 |psi><psi| + (1-P0) N |psi><psi| N^dag for a
//! y-rotated noise unitary, trains the diagonalizing circuit, extracts the
//! principal component and compares it with the oracle projector.

use qmetro::channels::{apply_channel, noise_overlap, unitary_mixture};
use qmetro::harness::{noise_unitary_for_overlap, NoiseFamily};
use qmetro::qpca::{extract_principal, optimize, pca_oracle, Ansatz, OptimizerConfig};
use qmetro::sensing::ramsey_pure;
use qmetro::state::{fidelity_pure, DensityMatrix};

fn main() -> qmetro::Result<()> {
    let n = 1;
    let phi = 0.0;
    let p0 = 0.8;
    let target_overlap = 0.4;

    let psi = ramsey_pure(n, phi);
    let pure = DensityMatrix::from_pure(&psi);

    let n_op = noise_unitary_for_overlap(NoiseFamily::YRotation, n, phi, target_overlap)?;
    println!(
        "noise overlap: requested {target_overlap}, achieved {:.6}",
        noise_overlap(&pure, &n_op)?
    );

    let noisy = apply_channel(&pure, &unitary_mixture(p0, &n_op)?)?;
    println!("fidelity before purification: {:.6}", fidelity_pure(&psi, &noisy)?);

    let ansatz = Ansatz::hardware_default(n)?;
    let cfg = OptimizerConfig::defaults(ansatz.param_count()).with_uniform_step(5.0);
    let trace = optimize(&noisy, &ansatz, &cfg)?;
    for record in trace.records.iter().step_by(10) {
        println!(
            "  iter {:3}: loss {:.3e}, fidelity vs oracle {:.6}",
            record.iteration, record.loss, record.fidelity_vs_oracle
        );
    }
    println!(
        "optimizer: {} after {} iterations, final loss {:.3e}",
        trace.status.as_str(),
        trace.final_record().iteration,
        trace.final_loss()
    );

    let purified = extract_principal(&noisy, trace.final_params(), &ansatz)?;
    let (oracle, top_eigenvalue) = pca_oracle(&noisy)?;
    let agreement = (purified.matrix() * oracle.matrix()).trace().re;
    println!("fidelity after purification:  {:.6}", fidelity_pure(&psi, &purified)?);
    println!("projector overlap with oracle: {agreement:.8}");
    println!("principal eigenvalue: {top_eigenvalue:.6}");
    Ok(())
}
