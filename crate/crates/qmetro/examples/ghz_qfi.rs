//! Quantum Fisher information of GHZ probes before and after purification,
//! against the Heisenberg and standard quantum limits.

use qmetro::channels::unitary_mixture;
use qmetro::harness::{noise_unitary_for_overlap, NoiseFamily};
use qmetro::metrics::{
    heisenberg_limit, purified_qfi_field, qfi_field, sql, PhaseEncoding, ProbeFamily,
};
use qmetro::sensing::{SensingConfig, GYRO_NV};

fn main() -> qmetro::Result<()> {
    let p0 = 0.8;
    for n in [2usize, 4, 6] {
        let cfg = SensingConfig {
            b0: 0.0,
            bs: 0.25,
            tau: 60e-9,
            gyro: GYRO_NV,
            n,
            sigma: 0.0,
        };
        let phi = cfg.phase();
        let hl = heisenberg_limit(n, &cfg);
        println!(
            "n = {n}: HL = {hl:.4e} G^-2, SQL = {:.4e} G^-2",
            sql(n, &cfg)
        );
        for overlap in [0.05, 0.3, 0.6, 0.9] {
            let kick = noise_unitary_for_overlap(NoiseFamily::FieldKick, n, phi, overlap)?;
            let encoding = PhaseEncoding {
                family: ProbeFamily::GhzPhase { n },
                dephasing: None,
                channels: vec![unitary_mixture(p0, &kick)?],
            };
            let rho = encoding.state(phi)?;
            let drho = encoding.drho_dphi(phi)?;
            let before = qfi_field(&rho, &drho, &cfg)?.value;
            let after = purified_qfi_field(&encoding, phi, &cfg, 1e-5)?.value;
            println!(
                "  overlap {overlap:.2}: before/HL = {:.4}, after/HL = {:.4}",
                before / hl,
                after / hl
            );
        }
    }
    Ok(())
}
