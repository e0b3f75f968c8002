//! A depth study in-process; prints the CSV report and per-depth statistics.

use femvqe::bench::{report_csv, run_sweep, SweepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SweepConfig::from_json(
        r#"{
            "case": "plate_hole",
            "qubit_range": [2, 3],
            "axis": "depth",
            "values": [1, 2, 3],
            "fixed": {"optimizer": "lbfgsb", "pattern": "cx"},
            "vqe": {"tol": 1e-4, "n_restarts": 3, "seed": 5}
        }"#,
    )?;
    let report = run_sweep(&cfg)?;
    print!("{}", report_csv(&report)?);
    for a in &report.aggregates {
        println!("depth {}: ME {:.4}%  SDE {}", a.value, a.me.unwrap_or(f64::NAN), a.sde.map_or("-".into(), |s| format!("{s:.4}%")));
    }
    Ok(())
}
