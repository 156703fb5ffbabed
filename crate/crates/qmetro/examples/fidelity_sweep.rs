//! Fidelity gain over a (P0, overlap) grid, written as CSV.
//!
//! Every cell builds the noisy mixture, purifies it variationally and
//! records the gain delta_f = f_qpca - f_noisy. Run with an output path to
//! save the table: `cargo run --release --example fidelity_sweep -- out.csv`

use qmetro::harness::{
    config::{AxisSpec, GridAxis},
    run_experiment, ExperimentConfig, ExperimentKind,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::FidelitySweep);
    cfg.seed = 42;
    cfg.sensing.bs = 0.0; // operate at phi = 0 so the overlap axis spans [0, 1]
    cfg.opt.loss_tol = 1e-9;
    cfg.opt.step = 5.0;
    cfg.opt.max_iters = 2000;
    cfg.opt.init_pattern = vec![std::f64::consts::FRAC_PI_2 - 0.3, std::f64::consts::FRAC_PI_3];
    cfg.grid = vec![
        GridAxis {
            name: "p0".into(),
            spec: AxisSpec::Linspace { min: 0.55, max: 0.99, points: 8 },
        },
        GridAxis {
            name: "overlap".into(),
            spec: AxisSpec::Linspace { min: 0.0, max: 0.99, points: 8 },
        },
    ];

    let out = run_experiment(&cfg)?;
    for (key, value) in &out.summary {
        println!("{key}: {value}");
    }
    let gains: Vec<f64> = out.records.iter().filter_map(|r| r.delta_f).collect();
    println!(
        "delta_f range: [{:.4e}, {:.4e}] over {} cells",
        gains.iter().cloned().fold(f64::INFINITY, f64::min),
        gains.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        gains.len()
    );

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, &out.csv)?;
        println!("wrote {path}");
    }
    Ok(())
}
