//! CSV and JSON emission. Reals carry 12 significant digits in the CSV and
//! full precision in the JSON mirror.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{io_err, BenchError, SweepReport, SweepRow};

pub const CSV_COLUMNS: [&str; 18] = [
    "case",
    "N",
    "optimizer",
    "pattern",
    "depth",
    "shots",
    "seed",
    "lambda_c",
    "lambda_q",
    "error_ratio",
    "error_pct",
    "evaluations",
    "converged",
    "stop_reason",
    "wall_ms",
    "trial",
    "hamiltonian_sha256",
    "error",
];

fn real(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.11e}")).unwrap_or_default()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn record(r: &SweepRow, timing: bool) -> Vec<String> {
    vec![
        r.case.clone(),
        r.n_qubits.to_string(),
        r.optimizer.to_string(),
        r.pattern.to_string(),
        r.depth.to_string(),
        r.shots.to_string(),
        r.seed.to_string(),
        real(r.lambda_c),
        real(r.lambda_q),
        real(r.error_ratio),
        real(r.error_pct),
        opt(r.evaluations),
        opt(r.converged),
        opt(r.stop_reason.map(|s| s.as_str())),
        if timing { real(r.wall_ms) } else { String::new() },
        r.trial.to_string(),
        r.hamiltonian_sha256.clone().unwrap_or_default(),
        r.error.clone().unwrap_or_default(),
    ]
}

pub fn report_csv(report: &SweepReport) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for r in &report.rows {
        w.write_record(record(r, report.config.timing))?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Reads rows back from [`report_csv`] output.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>, BenchError> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_COLUMNS {
        return Err(BenchError::Config(format!("unexpected CSV header {header:?}")));
    }
    let bad = |col: &str, v: &str| BenchError::Config(format!("column {col}: cannot parse `{v}`"));
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        fn parse<T: std::str::FromStr>(s: &str) -> Option<Result<T, ()>> {
            (!s.is_empty()).then(|| s.parse::<T>().map_err(|_| ()))
        }
        macro_rules! req {
            ($i:expr) => {
                f($i).parse().map_err(|_| bad(CSV_COLUMNS[$i], f($i)))?
            };
        }
        macro_rules! optv {
            ($i:expr) => {
                parse(f($i)).transpose().map_err(|_| bad(CSV_COLUMNS[$i], f($i)))?
            };
        }
        let stop_reason = match f(13) {
            "" => None,
            s => Some(serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| bad("stop_reason", s))?),
        };
        let text_opt = |s: &str| (!s.is_empty()).then(|| s.to_owned());
        rows.push(SweepRow {
            case: f(0).to_owned(),
            n_qubits: req!(1),
            optimizer: req!(2),
            pattern: req!(3),
            depth: req!(4),
            shots: req!(5),
            seed: req!(6),
            lambda_c: optv!(7),
            lambda_q: optv!(8),
            error_ratio: optv!(9),
            error_pct: optv!(10),
            evaluations: optv!(11),
            converged: optv!(12),
            stop_reason,
            wall_ms: optv!(14),
            trial: req!(15),
            hamiltonian_sha256: text_opt(f(16)),
            error: text_opt(f(17)),
        });
    }
    Ok(rows)
}

pub fn report_json(report: &SweepReport) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        columns: &'a [&'a str],
        #[serde(flatten)]
        report: &'a SweepReport,
    }
    serde_json::to_string_pretty(&Doc { columns: &CSV_COLUMNS, report }).expect("report serializes")
}

/// Writes whichever outputs are requested.
pub fn emit_report(report: &SweepReport, csv_path: Option<&Path>, json_path: Option<&Path>) -> Result<(), BenchError> {
    if let Some(p) = csv_path {
        fs::write(p, report_csv(report)?).map_err(io_err(p))?;
    }
    if let Some(p) = json_path {
        fs::write(p, report_json(report)).map_err(io_err(p))?;
    }
    Ok(())
}
