//! Kraus channels at a glance: unitary mixtures, depolarization, amplitude
//! damping and its semigroup structure, plus the matrix exchange format.

use qmetro::channels::{
    amplitude_damping, apply_channel, depolarize_to_mixed, pauli, unitary_mixture,
};
use qmetro::exchange;
use qmetro::sensing::ramsey_pure;
use qmetro::state::{DensityMatrix, UnitaryMatrix};

fn main() -> qmetro::Result<()> {
    let plus = DensityMatrix::from_pure(&ramsey_pure(1, std::f64::consts::FRAC_PI_2));

    let z = UnitaryMatrix::new(pauli(3))?;
    let mixed = apply_channel(&plus, &unitary_mixture(0.8, &z)?)?;
    println!("phase-flip mixture of |+>:");
    print!("{}", exchange::write_matrix(mixed.matrix(), 1));

    let depolarized = apply_channel(&plus, &depolarize_to_mixed(0.5, 1)?)?;
    println!("\nhalf-depolarized |+>: populations {:.3} / {:.3}",
        depolarized.population(0), depolarized.population(1));

    let damped = apply_channel(&plus, &amplitude_damping(0.15)?)?;
    println!(
        "\namplitude damping (gamma = 0.15): ground population {:.4}, coherence {:.5}",
        damped.population(0),
        damped.matrix()[(0, 1)].norm() * 2.0
    );

    // two successive links compose like a single lossier link
    let two_step = amplitude_damping(0.1)?.compose(&amplitude_damping(0.2)?)?;
    let single = amplitude_damping(1.0 - 0.9 * 0.8)?;
    let a = apply_channel(&plus, &two_step)?;
    let b = apply_channel(&plus, &single)?;
    println!(
        "\nsemigroup check: max deviation {:.2e}",
        (a.matrix() - b.matrix()).norm()
    );

    // round trip through the exchange format
    let text = exchange::write_matrix(damped.matrix(), 1);
    let (parsed, n) = exchange::parse_matrix(&text)?;
    println!("exchange round trip exact: {}", parsed == *damped.matrix() && n == 1);
    Ok(())
}
