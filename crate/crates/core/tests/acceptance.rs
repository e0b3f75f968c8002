//! Acceptance suite. Runs every criterion, prints one line each and exits
//! non-zero when a strict criterion fails. Criterion 8 is a diagnostic.

mod common;

use std::time::{Duration, Instant};

use femvqe::bench::{percentage_error, prepare_case, report_csv, run_sweep_with_threads, emit_report, SweepConfig};
use femvqe::fem::{generate_case, CaseKind, CaseOptions, Material, REPORTING_EIGENVALUE_SCALE};
use femvqe::hamiltonian::{pauli_decompose_matrix, pauli_reconstruct, reduce_to_standard, symmetric_eigen, Reduction};
use femvqe::quantum::{build_ansatz, expectation_shots, init_state, Entangler, GateKind, Statevector};
use femvqe::vqe::{cost, run_vqe, OptimizerKind, Shots, VqeConfig};
use femvqe::hamiltonian::PauliHamiltonian;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn pauli_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut recon_err, mut coeff_err): (f64, f64) = (0.0, 0.0);
    let mut lib_time = Duration::ZERO;
    for n in 1..=6u32 {
        let dim = 1usize << n;
        for _ in 0..50 {
            let h = random_symmetric(dim, &mut rng);
            let t = Instant::now();
            // no pruning: every coefficient is compared
            let ph = pauli_decompose_matrix(&h, 0.0).unwrap();
            let back = pauli_reconstruct(&ph);
            lib_time += t.elapsed();
            for i in 0..dim {
                for j in 0..dim {
                    recon_err = recon_err.max((back[(i, j)] - c(h[(i, j)], 0.0)).norm());
                }
            }
            for (label, want) in naive_coefficients(&h) {
                let got = ph.coeff_of(&label);
                coeff_err = coeff_err.max((c(got, 0.0) - want).norm());
            }
        }
    }
    let pass = recon_err <= 1e-10 && coeff_err <= 1e-12 && lib_time < Duration::from_secs(30);
    outcome(pass, format!("300 matrices, reconstruction {recon_err:.1e}, coefficients vs oracle {coeff_err:.1e}, {}", secs(lib_time)))
}

fn spectrum_preservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let dims = [2usize, 4, 8, 16, 32, 64];
    let mut worst: f64 = 0.0;
    let mut lib_time = Duration::ZERO;
    for trial in 0..100 {
        let dim = dims[trial % dims.len()];
        let k = random_spd(dim, &mut rng);
        let (m, reduction) = if trial % 2 == 0 {
            (random_spd(dim, &mut rng), Reduction::Cholesky)
        } else {
            (DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |_, _| rng.gen_range(0.5..2.0))), Reduction::DiagonalMass)
        };
        let t = Instant::now();
        let h = reduce_to_standard(&k, &m, reduction).unwrap();
        let got = symmetric_eigen(&h.matrix).unwrap().values;
        lib_time += t.elapsed();
        // oracle: M^{-1/2} from nalgebra's eigendecomposition of M
        let em = m.clone().symmetric_eigen();
        let s = &em.eigenvectors
            * DMatrix::from_diagonal(&em.eigenvalues.map(|x| 1.0 / x.sqrt()))
            * em.eigenvectors.transpose();
        let mut want: Vec<f64> = (&s * &k * &s).symmetric_eigen().eigenvalues.iter().cloned().collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs() / w.abs());
        }
    }
    let pass = worst <= 1e-10 && lib_time < Duration::from_secs(30);
    outcome(pass, format!("100 pairs up to dim 64, worst relative error {worst:.1e}, {}", secs(lib_time)))
}

fn gate_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let kinds = [
        (GateKind::Rx, "rx"),
        (GateKind::Ry, "ry"),
        (GateKind::Rz, "rz"),
        (GateKind::H, "h"),
        (GateKind::Sdg, "sdg"),
        (GateKind::Cx, "x"),
        (GateKind::Cz, "z"),
        (GateKind::Crx, "rx"),
    ];
    let mut worst: f64 = 0.0;
    for (kind, name) in kinds {
        for _ in 0..1000 {
            let lo = kind.arity() as u32;
            let n = rng.gen_range(lo..=4);
            let theta = rng.gen_range(-7.0..7.0);
            let amps = random_amplitudes(1 << n, &mut rng);
            let t = rng.gen_range(0..n);
            let (qubits, u) = if kind.arity() == 1 {
                (vec![t], embed(n, t, &gate_2x2(name, theta)))
            } else {
                let mut ctl = rng.gen_range(0..n - 1);
                if ctl >= t {
                    ctl += 1;
                }
                let base = match name {
                    "x" => sigma('X'),
                    "z" => sigma('Z'),
                    _ => gate_2x2(name, theta),
                };
                (vec![ctl, t], controlled(n, ctl, t, &base))
            };
            let mut s = Statevector::from_amplitudes(amps.clone()).unwrap();
            s.apply(kind, &qubits, kind.parameterized().then_some(theta)).unwrap();
            let want = &u * nalgebra::DVector::from_vec(amps);
            for (a, b) in s.amplitudes().iter().zip(want.iter()) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    let mut s = init_state(4).unwrap();
    for _ in 0..10_000 {
        let (kind, _) = kinds[rng.gen_range(0..kinds.len())];
        let t = rng.gen_range(0..4);
        let qubits = if kind.arity() == 1 { vec![t] } else { vec![(t + rng.gen_range(1..4)) % 4, t] };
        s.apply(kind, &qubits, kind.parameterized().then(|| rng.gen_range(-7.0..7.0))).unwrap();
    }
    let drift = (s.norm_sqr().sqrt() - 1.0).abs();
    outcome(worst <= 1e-12 && drift < 1e-10, format!("8 gate kinds x 1000 states, worst {worst:.1e}; norm drift after 1e4 gates {drift:.1e}"))
}

fn ansatz_structure() -> Outcome {
    let mut bad = Vec::new();
    for n in 2..=7u32 {
        for depth in 1..=10usize {
            for pattern in Entangler::ALL {
                let a = build_ansatz(n, depth, pattern).unwrap();
                let ent = depth * (n * (n - 1) / 2) as usize;
                let rot = 2 * n as usize * (depth + 1);
                let params = if pattern == Entangler::Crx { rot + ent } else { rot };
                if a.entangler_count() != ent || a.n_params != params {
                    bad.push(format!("N={n} d={depth} {pattern}"));
                }
            }
        }
    }
    let a = build_ansatz(4, 1, Entangler::Cx).unwrap();
    let cx = a.gates.iter().filter(|g| g.gate == GateKind::Cx).count();
    let inset = cx == 6 && a.n_params == 16;
    outcome(bad.is_empty() && inset, format!("N 2..=7 x depth 1..=10 x 3 patterns, {} mismatches; N=4 d=1 cx: {cx} CX, {} parameters", bad.len(), a.n_params))
}

fn vqe_accuracy() -> Outcome {
    let plan = [
        (CaseKind::Beam, vec![3, 4, 5], OptimizerKind::Lbfgsb, Entangler::Cz, 1, 1.0),
        (CaseKind::TrussHex, vec![3, 4], OptimizerKind::Cobyla, Entangler::Cz, 3, 7.5),
        (CaseKind::PlateHole, vec![3, 4], OptimizerKind::Lbfgsb, Entangler::Cx, 1, 5.0),
    ];
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for (case, ns, optimizer, pattern, depth, limit) in plan {
        for n in ns {
            let cell = match prepare_case(case, n, &CaseOptions::default()) {
                Err(e) => {
                    pass = false;
                    format!("{case} N={n}: FAIL ({e})")
                }
                Ok((_, p)) => {
                    let a = build_ansatz(n, depth, pattern).unwrap();
                    let cfg = VqeConfig { optimizer, tol: 1e-4, n_restarts: 3, shots: Shots::Exact, ..Default::default() };
                    let r = run_vqe(&p.pauli, &a, &cfg).unwrap();
                    let err = percentage_error(r.lambda_q, p.lambda_c).unwrap();
                    let ok = err < limit;
                    pass &= ok;
                    format!("{case} N={n}: {err:.4}% {}", if ok { "ok" } else { "FAIL" })
                }
            };
            println!("    {cell}");
            parts.push(cell);
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(600);
    let failed: Vec<&String> = parts.iter().filter(|p| p.contains("FAIL")).collect();
    outcome(pass, format!("{} runs, {} failing, {}", parts.len(), failed.len(), secs(elapsed)))
}

fn variational_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_margin = f64::INFINITY;
    let mut pass = true;
    for case in CaseKind::ALL {
        let (_, p) = prepare_case(case, 3, &CaseOptions::default()).unwrap();
        let (lambda, norm) = extremes(&p.standard.matrix);
        for (i, pattern) in Entangler::ALL.iter().cycle().take(1000).enumerate() {
            let a = build_ansatz(3, 1 + i % 3, *pattern).unwrap();
            let theta: Vec<f64> = (0..a.n_params).map(|_| rng.gen_range(-4.0 * std::f64::consts::PI..4.0 * std::f64::consts::PI)).collect();
            let e = cost(&p.pauli, &a, &theta, Shots::Exact, 0).unwrap();
            let margin = (e - lambda) / norm;
            worst_margin = worst_margin.min(margin);
            pass &= e >= lambda - 1e-9 * norm;
        }
    }
    outcome(pass, format!("3 cases x 1000 angles, smallest (E - lambda_c)/|H| = {worst_margin:.3e}"))
}

fn shot_noise() -> Outcome {
    let h = PauliHamiltonian::from_labels(1, &[(1.0, "X")]).unwrap();
    let s = init_state(1).unwrap();
    let mut pass = true;
    let mut cells = Vec::new();
    for shots in [1_000u64, 10_000, 100_000] {
        let v: Vec<f64> = (0..200).map(|seed| expectation_shots(&s, &h, shots, seed).unwrap()).collect();
        let mean = v.iter().sum::<f64>() / 200.0;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 199.0).sqrt();
        let ratio = sd * (shots as f64).sqrt();
        pass &= (ratio - 1.0).abs() <= 0.2;
        cells.push(format!("{shots}: sd*sqrt(shots) = {ratio:.3}"));
    }
    outcome(pass, cells.join(", "))
}

fn table_scale() -> Outcome {
    let model = generate_case(CaseKind::Beam, 3).unwrap();
    let (_, p) = prepare_case(CaseKind::Beam, 3, &CaseOptions::default()).unwrap();
    let steel = Material::case_steel();
    let rel = (p.lambda_c - 0.0343).abs() / 0.0343;
    outcome(
        rel <= 0.25,
        format!(
            "beam N=3 lambda_c = {:.6} vs 0.0343 ({:.1}% off, ratio {:.3}); calibration: E = {:e} Pa, rho = {} kg/m^3, SI eigenvalues x {:e} (model scale {:e}), lumped mass",
            p.lambda_c,
            100.0 * rel,
            p.lambda_c / 0.0343,
            steel.youngs_modulus,
            steel.density,
            REPORTING_EIGENVALUE_SCALE,
            model.eigenvalue_scale
        ),
    )
}

fn metric_exactness() -> Outcome {
    let pairs = [((0.0688, 0.0572), 20.28), ((0.0606, 0.0604), 0.331), ((0.0343, 0.0343), 0.0)];
    let mut pass = true;
    let mut cells = Vec::new();
    for ((q, cl), want) in pairs {
        let got = percentage_error(q, cl).unwrap();
        pass &= (got - want).abs() <= 0.005;
        cells.push(format!("({q}, {cl}) -> {got:.4}%"));
    }
    outcome(pass, cells.join(", "))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        (
            "exact.json",
            r#"{"case": "plate_hole", "qubit_range": [2, 3], "axis": "pattern",
                "fixed": {"optimizer": "lbfgsb", "depth": 1},
                "vqe": {"tol": 1e-4, "n_restarts": 3, "seed": 3}}"#,
        ),
        (
            "shots.json",
            r#"{"case": "truss_hex", "qubit_range": [2, 3], "axis": "optimizer",
                "fixed": {"pattern": "cz", "depth": 1}, "trials": 2,
                "vqe": {"tol": 1e-4, "n_restarts": 2, "seed": 17, "shots": 1000, "maxiter": 200}}"#,
        ),
    ];
    let mut pass = true;
    let mut cells = Vec::new();
    for (name, text) in configs {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        let mut outputs = Vec::new();
        for (run, threads) in [1usize, 4, 4].into_iter().enumerate() {
            let cfg = SweepConfig::load(&path).unwrap();
            let report = run_sweep_with_threads(&cfg, threads).unwrap();
            let csv_path = dir.path().join(format!("{name}.{run}.csv"));
            emit_report(&report, Some(&csv_path), None).unwrap();
            let bytes = std::fs::read(&csv_path).unwrap();
            assert_eq!(bytes, report_csv(&report).unwrap().into_bytes());
            outputs.push(bytes);
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        pass &= same;
        cells.push(format!("{name}: {} bytes, {}", outputs[0].len(), if same { "identical" } else { "DIFFERENT" }));
    }
    outcome(pass, format!("threads 1/4/4: {}", cells.join("; ")))
}

fn main() {
    let criteria: [(u32, &str, bool, fn() -> Outcome); 10] = [
        (1, "pauli round-trip", true, pauli_round_trip),
        (2, "spectrum preservation", true, spectrum_preservation),
        (3, "gate correctness", true, gate_correctness),
        (4, "ansatz structure", true, ansatz_structure),
        (5, "exact-mode VQE accuracy", true, vqe_accuracy),
        (6, "variational bound", true, variational_bound),
        (7, "shot-noise scaling", true, shot_noise),
        (8, "reference-scale cross-check", false, table_scale),
        (9, "error-metric exactness", true, metric_exactness),
        (10, "determinism", true, determinism),
    ];
    let mut strict_failures = Vec::new();
    for (id, name, strict, run) in criteria {
        let o = run();
        let status = match (o.pass, strict) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "DIAGNOSTIC-FAIL",
        };
        println!("criterion {id:>2} [{status}] {name}: {}", o.detail);
        if strict && !o.pass {
            strict_failures.push(id);
        }
    }
    if strict_failures.is_empty() {
        println!("acceptance: all strict criteria pass");
    } else {
        println!("acceptance: strict criteria failing: {strict_failures:?}");
        std::process::exit(1);
    }
}
