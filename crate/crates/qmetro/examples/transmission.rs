//! Does purification still pay off after a lossy transfer? Sweeps the
//! amplitude-damping loss rate of the link against noise strength for a
//! four-qubit GHZ probe and reports the information difference.

use qmetro::harness::{
    config::{AxisSpec, GridAxis},
    run_experiment, ExperimentConfig, ExperimentKind,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::TransmissionSweep);
    cfg.seed = 21;
    cfg.sensing.n = 4;
    cfg.sensing.tau = 60e-9;
    cfg.noise.p0 = 0.8;
    cfg.opt.step = 5.0;
    cfg.opt.max_iters = 300;
    cfg.ansatz_layers = Some(5);
    cfg.grid = vec![
        GridAxis {
            name: "gamma".into(),
            spec: AxisSpec::List(vec![0.0, 0.03, 0.0415, 0.06, 0.09, 0.15]),
        },
        GridAxis { name: "overlap".into(), spec: AxisSpec::List(vec![0.05, 0.2, 0.5, 0.8]) },
    ];

    let out = run_experiment(&cfg)?;
    println!("gamma    overlap  qfi_diff/HL   dB gain");
    for rec in &out.records {
        let hl = rec.hl.unwrap();
        println!(
            "{:6.4}  {:7.2}  {:+12.4}  {:9.3}",
            rec.axis("gamma").unwrap(),
            rec.axis("overlap").unwrap(),
            rec.qfi_diff.unwrap_or(f64::NAN) / hl,
            rec.db_gain.unwrap_or(f64::NAN),
        );
    }
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, &out.csv)?;
        println!("wrote {path}");
    }
    Ok(())
}
