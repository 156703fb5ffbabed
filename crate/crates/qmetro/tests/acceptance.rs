//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p qmetro --test acceptance -- --nocapture` to see
//! the per-criterion lines; the test fails if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmetro::channels::{amplitude_damping_per_qubit, unitary_mixture};
use qmetro::harness::config::{AxisSpec, GridAxis, OptSettings};
use qmetro::harness::{
    noise_unitary_for_overlap, run_experiment, CellStatus, ExperimentConfig, ExperimentKind,
    NoiseFamily,
};
use qmetro::metrics::{
    heisenberg_limit, qfi, qfi_symmetric, PhaseEncoding, ProbeFamily, DEFAULT_RANK_CUTOFF,
};
use qmetro::qpca::{extract_principal_with_tol, optimize, pca_oracle, Ansatz, OptimizerConfig};
use qmetro::sensing::{
    estimate_field, gaussian_ensemble, ramsey_coherence, ramsey_density, ramsey_pure, readout,
    SensingConfig, GYRO_NV,
};
use qmetro::state::{CMatrix, DensityMatrix};

struct Criterion {
    name: &'static str,
    passed: bool,
    details: String,
    elapsed: Duration,
}

fn run_criterion(
    results: &mut Vec<Criterion>,
    name: &'static str,
    body: impl FnOnce() -> Result<String, String>,
) {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let (passed, details) = match outcome {
        Ok(details) => (true, details),
        Err(details) => (false, details),
    };
    results.push(Criterion { name, passed, details, elapsed });
}

fn shifted_init() -> Vec<f64> {
    // the documented (pi/2, pi/3) default is an exact stationary point for
    // diagonal inputs, which the overlap = 0 column produces
    vec![FRAC_PI_2 - 0.3, std::f64::consts::FRAC_PI_3]
}

fn random_density(n: usize, rank: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let dim = 1usize << n;
    let g = DMatrix::from_fn(dim, rank.min(dim), |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m / Complex64::new(tr, 0.0)).unwrap()
}

fn random_traceless_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let mut h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let shift = h.trace() / Complex64::new(dim as f64, 0.0);
    for i in 0..dim {
        h[(i, i)] -= shift;
    }
    h
}

fn fidelity_sweep_config(
    p0: AxisSpec,
    overlap: AxisSpec,
    seed: u64,
) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(ExperimentKind::FidelitySweep);
    cfg.seed = seed;
    cfg.sensing.bs = 0.0; // phi = 0: the y-rotation family spans overlap [0, 1]
    cfg.opt = OptSettings {
        delta: 0.05,
        step: 5.0,
        max_iters: 4000,
        loss_tol: 1e-9,
        diag_tol: 1e-4,
        init_pattern: shifted_init(),
    };
    cfg.grid = vec![
        GridAxis { name: "p0".into(), spec: p0 },
        GridAxis { name: "overlap".into(), spec: overlap },
    ];
    cfg
}

/// Criterion 1: over the stated 20x20 grid every converged cell gains more
/// than 1e-6 in fidelity. The second clause quantifies over cells with
/// P0 < 0.5, which do not exist on the stated grid; the low-P0 region is
/// additionally measured and reported (not gated) for transparency.
fn criterion_1() -> Result<String, String> {
    let cfg = fidelity_sweep_config(
        AxisSpec::Linspace { min: 0.55, max: 0.99, points: 20 },
        AxisSpec::Linspace { min: 0.0, max: 0.99, points: 20 },
        1001,
    );
    let started = Instant::now();
    let out = run_experiment(&cfg).map_err(|e| e.to_string())?;
    if out.records.len() != 400 {
        return Err(format!("expected 400 cells, got {}", out.records.len()));
    }
    let mut converged = 0usize;
    let mut min_gain = f64::INFINITY;
    for rec in &out.records {
        match &rec.status {
            CellStatus::Ok => {
                converged += 1;
                let gain = rec.delta_f.ok_or("converged cell without delta_f")?;
                min_gain = min_gain.min(gain);
                if gain <= 1e-6 {
                    return Err(format!(
                        "cell (p0 = {:.3}, overlap = {:.3}) has delta_f = {gain:.3e} <= 1e-6",
                        rec.axis("p0").unwrap(),
                        rec.axis("overlap").unwrap()
                    ));
                }
            }
            CellStatus::Failed(e) => return Err(format!("cell failed: {e}")),
            CellStatus::NotConverged => {}
        }
    }
    if started.elapsed() > Duration::from_secs(120) {
        return Err(format!("runtime {:?} exceeds 2 min", started.elapsed()));
    }

    // informational: the P0 < 0.5, overlap < 0.5 region (no cells of the
    // stated grid fall in it, so the second clause is vacuous there)
    let low = fidelity_sweep_config(
        AxisSpec::Linspace { min: 0.05, max: 0.45, points: 5 },
        AxisSpec::Linspace { min: 0.0, max: 0.45, points: 5 },
        1002,
    );
    let low_out = run_experiment(&low).map_err(|e| e.to_string())?;
    let negative: Vec<String> = low_out
        .records
        .iter()
        .filter(|r| r.status.is_ok() && r.delta_f.map_or(false, |g| g <= 1e-6))
        .map(|r| {
            format!(
                "(p0={:.2},ov={:.2},dF={:+.3e})",
                r.axis("p0").unwrap(),
                r.axis("overlap").unwrap(),
                r.delta_f.unwrap()
            )
        })
        .collect();
    let info = if negative.is_empty() {
        "low-P0 info region: all gains positive".to_string()
    } else {
        format!(
            "low-P0 info region (not gated): {} of {} cells lose fidelity, e.g. {}",
            negative.len(),
            low_out.records.len(),
            negative[0]
        )
    };

    Ok(format!(
        "400/400 cells, {converged} converged, min delta_f {min_gain:.3e} > 1e-6; second clause vacuous on stated grid; {info}"
    ))
}

/// Criterion 2: variational extraction matches the exact principal component
/// at projector fidelity >= 0.995 on at least 90% of 50 random mixed states
/// within 200 iterations.
fn criterion_2() -> Result<String, String> {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(424242);
    let trials = 50usize;
    let mut reached = 0usize;
    let mut loss_converged = 0usize;
    let mut misses: Vec<String> = Vec::new();
    for trial in 0..trials {
        let n = 1 + trial % 3;
        let rank = 1 + (trial / 3) % 4.min(1usize << n);
        let rho = random_density(n, rank, &mut rng);
        // depth sized to cover a rank-4 eigenframe with slack
        let layers = [2usize, 5, 12][n - 1];
        let ansatz = Ansatz::new(n, layers).map_err(|e| e.to_string())?;
        let cfg = OptimizerConfig::defaults(ansatz.param_count()).with_uniform_step(5.0);
        let trace = optimize(&rho, &ansatz, &cfg).map_err(|e| e.to_string())?;
        if trace.final_loss() < 1e-4 {
            loss_converged += 1;
        }
        let purified =
            extract_principal_with_tol(&rho, trace.final_params(), &ansatz, f64::INFINITY)
                .map_err(|e| e.to_string())?;
        let (oracle, _) = pca_oracle(&rho).map_err(|e| e.to_string())?;
        let overlap = (purified.matrix() * oracle.matrix()).trace().re;
        if overlap >= 0.995 {
            reached += 1;
        } else {
            misses.push(format!("trial {trial} (n={n}, rank={rank}): {overlap:.4}"));
        }
    }
    if started.elapsed() > Duration::from_secs(180) {
        return Err(format!("runtime {:?} exceeds 3 min", started.elapsed()));
    }
    let detail = format!(
        "{reached}/{trials} reached 0.995 within 200 iterations ({loss_converged} fully \
         diagonalized); misses: [{}]",
        misses.join(", ")
    );
    if reached * 10 >= trials * 9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Criterion 3: (a) the two Fisher-information forms agree to 1e-9 on 100
/// random instances, (b) pure GHZ probes hit n^2 per phase to 1e-9, (c) the
/// analytic phase derivative agrees with central differences to 1e-6.
fn criterion_3() -> Result<String, String> {
    // (a)
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut worst_form = 0.0f64;
    for trial in 0..100 {
        let n = 1 + trial % 2;
        let dim = 1usize << n;
        let rank = 1 + trial % dim;
        let rho = random_density(n, rank, &mut rng);
        let drho = random_traceless_hermitian(dim, &mut rng);
        let paper = qfi(&rho, &drho).map_err(|e| e.to_string())?.value;
        let symmetric =
            qfi_symmetric(&rho, &drho, DEFAULT_RANK_CUTOFF).map_err(|e| e.to_string())?;
        worst_form = worst_form.max((paper - symmetric).abs());
    }
    if worst_form >= 1e-9 {
        return Err(format!("form disagreement {worst_form:.3e} >= 1e-9"));
    }

    // (b)
    let mut worst_hl = 0.0f64;
    for n in [1usize, 2, 4, 6] {
        let encoding = PhaseEncoding::pure(ProbeFamily::GhzPhase { n });
        let phi = 0.37;
        let rho = encoding.state(phi).map_err(|e| e.to_string())?;
        let drho = encoding.drho_dphi(phi).map_err(|e| e.to_string())?;
        let value = qfi(&rho, &drho).map_err(|e| e.to_string())?.value;
        worst_hl = worst_hl.max((value - (n * n) as f64).abs());
    }
    if worst_hl >= 1e-9 {
        return Err(format!("GHZ per-phase information off by {worst_hl:.3e} >= 1e-9"));
    }

    // (c)
    let mut worst_diff = 0.0f64;
    let n = 2usize;
    let phi = 0.4;
    let kick = noise_unitary_for_overlap(NoiseFamily::FieldKick, n, phi, 0.3)
        .map_err(|e| e.to_string())?;
    let families = vec![
        PhaseEncoding::pure(ProbeFamily::GhzPhase { n }),
        PhaseEncoding {
            family: ProbeFamily::GhzPhase { n },
            dephasing: Some(0.4),
            channels: vec![],
        },
        PhaseEncoding {
            family: ProbeFamily::GhzPhase { n },
            dephasing: None,
            channels: vec![unitary_mixture(0.8, &kick).map_err(|e| e.to_string())?],
        },
        PhaseEncoding {
            family: ProbeFamily::GhzPhase { n },
            dephasing: Some(0.2),
            channels: vec![amplitude_damping_per_qubit(0.0415, n).map_err(|e| e.to_string())?],
        },
    ];
    for encoding in &families {
        let analytic = encoding.drho_dphi(phi).map_err(|e| e.to_string())?;
        let central = encoding.drho_dphi_central(phi, 1e-6).map_err(|e| e.to_string())?;
        let dev = (analytic - central).map(|z| z.norm()).max();
        worst_diff = worst_diff.max(dev);
    }
    if worst_diff >= 1e-6 {
        return Err(format!("analytic vs central difference {worst_diff:.3e} >= 1e-6"));
    }

    Ok(format!(
        "forms agree to {worst_form:.1e}; GHZ endpoints to {worst_hl:.1e}; derivatives to {worst_diff:.1e}"
    ))
}

/// Criterion 4: for n in {2, 4, 6}, purification never reduces the Fisher
/// information on converged cells, and reaches 99% of the Heisenberg limit
/// in the mild-noise corner (overlap <= 0.3, P0 >= 0.7).
fn criterion_4() -> Result<String, String> {
    let started = Instant::now();
    let mut lines = Vec::new();
    for n in [2usize, 4, 6] {
        let mut cfg = ExperimentConfig::new(ExperimentKind::QfiSweep);
        cfg.seed = 4000 + n as u64;
        cfg.sensing.bs = 0.25;
        cfg.opt = OptSettings {
            delta: 0.05,
            step: 5.0,
            max_iters: if n == 6 { 500 } else { 300 },
            loss_tol: 1e-6,
            diag_tol: 1e-4,
            init_pattern: shifted_init(),
        };
        cfg.ansatz_layers = Some(match n {
            2 => 2,
            4 => 5,
            _ => 6,
        });
        cfg.grid = vec![
            GridAxis { name: "n".into(), spec: AxisSpec::List(vec![n as f64]) },
            GridAxis { name: "tau_ns".into(), spec: AxisSpec::List(vec![60.0]) },
            GridAxis {
                name: "p0".into(),
                spec: AxisSpec::Linspace { min: 0.55, max: 0.95, points: 4 },
            },
            GridAxis {
                name: "overlap".into(),
                spec: AxisSpec::Linspace { min: 0.02, max: 0.9, points: 5 },
            },
        ];
        let out = run_experiment(&cfg).map_err(|e| e.to_string())?;
        let mut converged = 0usize;
        let mut corner_cells = 0usize;
        for rec in &out.records {
            if let CellStatus::Failed(e) = &rec.status {
                return Err(format!("n={n} cell failed: {e}"));
            }
            let before = rec.qfi_before.ok_or("missing qfi_before")?;
            let after = rec.qfi_after.ok_or("missing qfi_after")?;
            let hl = rec.hl.ok_or("missing hl")?;
            if rec.status.is_ok() {
                converged += 1;
                if after < before - 1e-6 * hl {
                    return Err(format!(
                        "n={n} converged cell (p0={:.2}, ov={:.2}): after {after:.4e} < before {before:.4e}",
                        rec.axis("p0").unwrap(),
                        rec.axis("overlap").unwrap()
                    ));
                }
            }
            let p0 = rec.axis("p0").unwrap();
            let ov = rec.axis("overlap").unwrap();
            if p0 >= 0.7 && ov <= 0.3 {
                corner_cells += 1;
                if after < 0.99 * hl {
                    return Err(format!(
                        "n={n} corner cell (p0={p0:.2}, ov={ov:.2}): after/HL = {:.5} < 0.99",
                        after / hl
                    ));
                }
            }
        }
        lines.push(format!(
            "n={n}: {}/{} converged, {corner_cells} corner cells at >= 0.99 HL",
            converged,
            out.records.len()
        ));
    }
    if started.elapsed() > Duration::from_secs(300) {
        return Err(format!("runtime {:?} exceeds 5 min", started.elapsed()));
    }
    Ok(lines.join("; "))
}

/// Criterion 5: at sigma/B = 0.3 the purified estimate is at least as
/// accurate as plain Ramsey at every operating phase (ties at the unbiased
/// pi/2 point resolved at solver precision), and the noiseless round trip
/// recovers 0.25 Gauss to 1e-9.
fn criterion_5() -> Result<String, String> {
    let phis = [FRAC_PI_8, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4];
    let mut cfg = ExperimentConfig::new(ExperimentKind::Ramsey);
    cfg.seed = 55;
    cfg.n_fields = 0; // infinite-ensemble closed form
    cfg.shots = 0;
    cfg.opt = OptSettings {
        delta: 0.05,
        step: 5.0,
        max_iters: 3000,
        loss_tol: 1e-12,
        diag_tol: 1e-4,
        init_pattern: shifted_init(),
    };
    cfg.grid = vec![
        GridAxis { name: "sigma_ratio".into(), spec: AxisSpec::List(vec![0.3]) },
        GridAxis { name: "phi".into(), spec: AxisSpec::List(phis.to_vec()) },
    ];
    let out = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let mut worst_margin = f64::NEG_INFINITY;
    for rec in &out.records {
        if !rec.status.is_ok() {
            return Err(format!("cell status {:?}", rec.status));
        }
        let ape_r = rec.ape_ramsey.ok_or("missing ape_ramsey")?;
        let ape_q = rec.ape_qpca.ok_or("missing ape_qpca")?;
        // the pi/2 point is exactly unbiased for both estimators; both APEs
        // sit at solver precision there and count as a tie
        let tie = ape_q.max(ape_r) < 1e-5;
        if !(ape_q <= ape_r || tie) {
            return Err(format!(
                "phi = {:.4}: APE_qpca {ape_q:.3e} > APE_ramsey {ape_r:.3e}",
                rec.axis("phi").unwrap()
            ));
        }
        worst_margin = worst_margin.max(ape_q - ape_r);
    }

    // noiseless round trip through the plain estimator
    for &phi in &phis {
        let sensing = SensingConfig {
            bs: 0.25,
            b0: 0.0,
            tau: phi / (GYRO_NV * 0.25),
            gyro: GYRO_NV,
            n: 1,
            sigma: 0.0,
        };
        let rho = ramsey_density(&sensing).map_err(|e| e.to_string())?;
        let outcome = readout(&rho, 0, 0).map_err(|e| e.to_string())?;
        let estimate = estimate_field(outcome.p1, &sensing).map_err(|e| e.to_string())?;
        if (estimate - 0.25).abs() > 1e-9 {
            return Err(format!(
                "noiseless round trip at phi = {phi:.4} returned {estimate:.12} G"
            ));
        }
    }
    Ok(format!(
        "APE_qpca <= APE_ramsey at all {} phases (worst margin {worst_margin:+.2e}); noiseless round trip exact to 1e-9 G",
        phis.len()
    ))
}

/// Criterion 6: the Monte-Carlo ensemble coherence matches the closed-form
/// Gaussian damping within three standard errors at sigma/B in {0.1, 0.3, 0.5}.
fn criterion_6() -> Result<String, String> {
    let n_fields = 800usize;
    let seed = 2026u64;
    let mut details = Vec::new();
    for &ratio in &[0.1f64, 0.3, 0.5] {
        let sensing = SensingConfig {
            sigma: ratio * 0.25,
            ..SensingConfig::nv_defaults()
        };
        let g = sensing.gyro * sensing.tau * sensing.sigma;
        let expected = (-0.5 * g * g).exp();
        // standard error of the sample coherence: Var(cos(g Z)) / N
        let variance = 0.5 * (1.0 + (-2.0 * g * g).exp()) - (-g * g).exp();
        let se = (variance / n_fields as f64).sqrt();
        let ensemble =
            gaussian_ensemble(&sensing, n_fields, seed).map_err(|e| e.to_string())?;
        let measured = ramsey_coherence(&ensemble);
        let pull = (measured - expected) / se;
        if pull.abs() > 3.0 {
            return Err(format!(
                "sigma/B = {ratio}: coherence {measured:.5} vs {expected:.5}, |pull| = {:.2} > 3",
                pull.abs()
            ));
        }
        details.push(format!("sigma/B={ratio}: pull {pull:+.2}"));
    }
    Ok(details.join(", "))
}

/// Criterion 7: iterations to 99.5% oracle fidelity never decrease across
/// five increasing noise levels for the four-qubit probe.
fn criterion_7() -> Result<String, String> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Convergence);
    cfg.seed = 77;
    cfg.sensing.tau = 250e-9;
    cfg.opt = OptSettings {
        delta: 0.05,
        step: 5.0,
        max_iters: 600,
        loss_tol: 1e-10,
        diag_tol: 1e-4,
        init_pattern: vec![FRAC_PI_2, std::f64::consts::FRAC_PI_3],
    };
    cfg.ansatz_layers = Some(5);
    cfg.grid = vec![
        GridAxis { name: "n".into(), spec: AxisSpec::List(vec![4.0]) },
        GridAxis {
            name: "sigma_ratio".into(),
            spec: AxisSpec::List(vec![0.05, 0.1, 0.175, 0.25, 0.35]),
        },
    ];
    let out = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let iters: Vec<(f64, Option<usize>)> = out
        .records
        .iter()
        .map(|r| (r.axis("sigma_ratio").unwrap(), r.iterations))
        .collect();
    let mut last = 0usize;
    for (ratio, reached) in &iters {
        let value = reached.unwrap_or(usize::MAX);
        if value < last {
            return Err(format!(
                "iterations decreased at sigma/B = {ratio}: {:?}",
                iters
            ));
        }
        last = value;
    }
    if iters.iter().filter(|(_, r)| r.is_some()).count() < 4 {
        return Err(format!("too few levels converged: {iters:?}"));
    }
    Ok(format!("iterations to 99.5%: {:?}", iters))
}

/// Criterion 8: at the 92% transfer point (gamma = 0.0415) the information
/// difference stays positive wherever the lossless advantage exceeds 1% of
/// the Heisenberg limit, with a finite positive dB gain.
fn criterion_8() -> Result<String, String> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::TransmissionSweep);
    cfg.seed = 88;
    cfg.sensing.n = 4;
    cfg.sensing.bs = 0.25;
    // operate at the GHZ mid-fringe point (collective phase n phi = pi/2)
    cfg.sensing.tau = (std::f64::consts::PI / 8.0) / (GYRO_NV * 0.25);
    cfg.noise.p0 = 0.8;
    cfg.opt = OptSettings {
        delta: 0.05,
        step: 5.0,
        max_iters: 300,
        loss_tol: 1e-6,
        diag_tol: 1e-4,
        init_pattern: shifted_init(),
    };
    cfg.ansatz_layers = Some(5);
    cfg.grid = vec![
        GridAxis { name: "gamma".into(), spec: AxisSpec::List(vec![0.0, 0.0415]) },
        GridAxis {
            name: "overlap".into(),
            spec: AxisSpec::Linspace { min: 0.05, max: 0.9, points: 8 },
        },
    ];
    let out = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let lossless: Vec<&qmetro::harness::SweepRecord> = out
        .records
        .iter()
        .filter(|r| r.axis("gamma") == Some(0.0))
        .collect();
    let lossy: Vec<&qmetro::harness::SweepRecord> = out
        .records
        .iter()
        .filter(|r| r.axis("gamma") == Some(0.0415))
        .collect();
    if lossless.len() != 8 || lossy.len() != 8 {
        return Err("unexpected row layout".into());
    }
    let mut gated = 0usize;
    let mut min_diff = f64::INFINITY;
    for (base, damped) in lossless.iter().zip(&lossy) {
        if let CellStatus::Failed(e) = &base.status {
            return Err(format!("cell failed: {e}"));
        }
        let hl = base.hl.ok_or("missing hl")?;
        let advantage = base.qfi_diff.ok_or("missing lossless qfi_diff")?;
        if advantage <= 0.01 * hl {
            continue;
        }
        gated += 1;
        let diff = damped.qfi_diff.ok_or("missing lossy qfi_diff")?;
        min_diff = min_diff.min(diff / hl);
        if diff <= 0.0 {
            return Err(format!(
                "overlap {:.2}: damped difference {diff:.4e} <= 0 while lossless advantage {advantage:.4e} > 1% HL",
                base.axis("overlap").unwrap()
            ));
        }
        let gain = damped.db_gain.ok_or("missing db_gain")?;
        if !gain.is_finite() || gain <= 0.0 {
            return Err(format!("overlap {:.2}: dB gain {gain}", base.axis("overlap").unwrap()));
        }
    }
    if gated == 0 {
        return Err("no cells exceeded the 1% HL advantage gate".into());
    }
    Ok(format!(
        "{gated}/8 overlap cells gated; min damped difference {min_diff:.4} HL, all positive with finite positive dB gain"
    ))
}

/// Criterion 9: identical (config, seed) pairs produce byte-identical CSV
/// through the CLI, independent of thread count.
fn criterion_9() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config_path = dir.path().join("run.cfg");
    let config_text = "\
experiment = fidelity-sweep
seed = 99
output = unused.csv
sensing.bs_gauss = 0.0
opt.loss_tol = 1e-8
opt.step = 5.0
opt.max_iters = 1500
opt.init = list 1.2707963267948966 1.0471975511965979
grid.p0 = lin 0.6 0.95 5
grid.overlap = lin 0.0 0.9 5
";
    std::fs::write(&config_path, config_text).map_err(|e| e.to_string())?;

    let bin = env!("CARGO_BIN_EXE_qmetro");
    let mut outputs = Vec::new();
    for (idx, threads) in [None, Some("1"), None].iter().enumerate() {
        let out_path = dir.path().join(format!("out{idx}.csv"));
        let mut cmd = std::process::Command::new(bin);
        cmd.arg("fidelity-sweep")
            .arg("--config")
            .arg(&config_path)
            .arg("--out")
            .arg(&out_path);
        if let Some(t) = threads {
            cmd.arg("--threads").arg(t);
        }
        let status = cmd
            .stdout(std::process::Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("run {idx} exited with {status}"));
        }
        outputs.push(std::fs::read(&out_path).map_err(|e| e.to_string())?);
    }
    if outputs[0] != outputs[1] || outputs[0] != outputs[2] {
        return Err("CSV outputs differ between identical runs".into());
    }
    Ok(format!(
        "three runs (default threads, --threads 1, repeat) byte-identical: {} bytes",
        outputs[0].len()
    ))
}

#[test]
fn acceptance() {
    let mut results = Vec::new();
    run_criterion(&mut results, "1 fidelity sign law", criterion_1);
    run_criterion(&mut results, "2 oracle equivalence", criterion_2);
    run_criterion(&mut results, "3 QFI correctness", criterion_3);
    run_criterion(&mut results, "4 QFI enhancement", criterion_4);
    run_criterion(&mut results, "5 Ramsey accuracy", criterion_5);
    run_criterion(&mut results, "6 Gaussian dephasing oracle", criterion_6);
    run_criterion(&mut results, "7 convergence monotonicity", criterion_7);
    run_criterion(&mut results, "8 transmission robustness", criterion_8);
    run_criterion(&mut results, "9 determinism", criterion_9);

    let mut all_passed = true;
    let mut report = String::new();
    for r in &results {
        let line = format!(
            "criterion {}: {} ({:.1}s) - {}\n",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.elapsed.as_secs_f64(),
            r.details
        );
        print!("{line}");
        report.push_str(&line);
        all_passed &= r.passed;
    }
    assert!(all_passed, "acceptance criteria failed:\n{report}");
}
