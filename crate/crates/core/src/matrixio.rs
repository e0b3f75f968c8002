//! Sparse symmetric matrix ingestion and export.
//!
//! Two text formats are understood:
//!
//! * the ABAQUS-style coordinate export, one record per line
//!   `node_i, dof_i, node_j, dof_j, value`, comments starting with `*` or `%`;
//! * Matrix Market `coordinate real {symmetric|general}`.
//!
//! Rows and columns are addressed by [`DofLabel`] and always ordered
//! lexicographically by `(node, dof)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for two records describing the same entry.
const DUPLICATE_RTOL: f64 = 1e-12;
/// Relative tolerance for the symmetry check on `general` inputs.
const ASYMMETRY_RTOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum MatrixIoError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: entry ({row}, {col}) given twice with different values")]
    DuplicateEntry {
        line: usize,
        row: DofLabel,
        col: DofLabel,
    },
    #[error("unsupported Matrix Market header: {0}")]
    UnsupportedHeader(String),
    #[error("matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: DofLabel, col: DofLabel },
    #[error("boundary condition references unknown DOF {0}")]
    UnknownDof(DofLabel),
}

/// A degree of freedom: 1-based node id and 1-based local DOF index.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct DofLabel {
    pub node: u32,
    pub dof: u32,
}

impl DofLabel {
    pub fn new(node: u32, dof: u32) -> Self {
        assert!(node >= 1 && dof >= 1, "DOF labels are 1-based");
        Self { node, dof }
    }
}

impl fmt::Display for DofLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.node, self.dof)
    }
}

/// Fixed degrees of freedom removed by [`partition_free`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySet {
    pub fixed: BTreeSet<DofLabel>,
}

impl BoundarySet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fix(&mut self, label: DofLabel) {
        self.fixed.insert(label);
    }

    pub fn contains(&self, label: &DofLabel) -> bool {
        self.fixed.contains(label)
    }

    pub fn len(&self) -> usize {
        self.fixed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixed.is_empty()
    }
}

impl FromIterator<DofLabel> for BoundarySet {
    fn from_iter<I: IntoIterator<Item = DofLabel>>(iter: I) -> Self {
        Self {
            fixed: iter.into_iter().collect(),
        }
    }
}

/// Sparse coordinate matrix over [`DofLabel`]s.
///
/// With `symmetric_storage` only entries with `row >= col` are kept and the
/// upper triangle is implied. Without it, both triangles are stored and have
/// been checked to agree.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateMatrix {
    labels: Vec<DofLabel>,
    entries: BTreeMap<(DofLabel, DofLabel), f64>,
    symmetric_storage: bool,
}

impl CoordinateMatrix {
    /// An empty symmetric matrix over `labels`.
    pub fn new(labels: impl IntoIterator<Item = DofLabel>) -> Self {
        let labels: BTreeSet<DofLabel> = labels.into_iter().collect();
        Self {
            labels: labels.into_iter().collect(),
            entries: BTreeMap::new(),
            symmetric_storage: true,
        }
    }

    /// Builds a symmetric matrix from `(row, col, value)` triplets, summing
    /// repeated positions as finite-element assembly does. Each off-diagonal
    /// pair must be supplied from one triangle only; `(r, c)` and `(c, r)` land
    /// on the same stored entry.
    pub fn from_triplets_summed(
        labels: impl IntoIterator<Item = DofLabel>,
        triplets: impl IntoIterator<Item = (DofLabel, DofLabel, f64)>,
    ) -> Self {
        let mut m = Self::new(labels);
        for (r, c, v) in triplets {
            let key = canonical(r, c);
            m.labels_insert(r);
            m.labels_insert(c);
            *m.entries.entry(key).or_insert(0.0) += v;
        }
        m
    }

    fn labels_insert(&mut self, label: DofLabel) {
        if let Err(pos) = self.labels.binary_search(&label) {
            self.labels.insert(pos, label);
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[DofLabel] {
        &self.labels
    }

    pub fn symmetric_storage(&self) -> bool {
        self.symmetric_storage
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Stored entries in canonical (row, col) order.
    pub fn entries(&self) -> impl Iterator<Item = (DofLabel, DofLabel, f64)> + '_ {
        self.entries.iter().map(|(&(r, c), &v)| (r, c, v))
    }

    /// Value at `(row, col)`, reading through the implied triangle.
    pub fn get(&self, row: DofLabel, col: DofLabel) -> f64 {
        let key = if self.symmetric_storage {
            canonical(row, col)
        } else {
            (row, col)
        };
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        for (r, c, v) in self.entries() {
            let i = self.index_of(r).expect("entry label registered");
            let j = self.index_of(c).expect("entry label registered");
            a[(i, j)] = v;
            if self.symmetric_storage {
                a[(j, i)] = v;
            }
        }
        a
    }

    pub fn index_of(&self, label: DofLabel) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    /// Labels whose row holds no nonzero value.
    pub fn zero_rows(&self) -> Vec<DofLabel> {
        let mut nonzero = BTreeSet::new();
        for (r, c, v) in self.entries() {
            if v != 0.0 {
                nonzero.insert(r);
                nonzero.insert(c);
            }
        }
        self.labels
            .iter()
            .copied()
            .filter(|l| !nonzero.contains(l))
            .collect()
    }
}

fn canonical(r: DofLabel, c: DofLabel) -> (DofLabel, DofLabel) {
    if r >= c {
        (r, c)
    } else {
        (c, r)
    }
}

fn values_agree(a: f64, b: f64, rtol: f64) -> bool {
    a == b || (a - b).abs() <= rtol * a.abs().max(b.abs())
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_index(field: &str, line: usize) -> Result<u32, MatrixIoError> {
    match field.parse::<u32>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(MatrixIoError::MalformedRecord {
            line,
            reason: format!("expected a positive integer, found {field:?}"),
        }),
    }
}

fn parse_value(field: &str, line: usize) -> Result<f64, MatrixIoError> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| MatrixIoError::MalformedRecord {
            line,
            reason: format!("expected a finite number, found {field:?}"),
        })
}

/// Parses the ABAQUS-style coordinate export.
pub fn parse_abaqus_mtx(text: &str) -> Result<CoordinateMatrix, MatrixIoError> {
    let mut m = CoordinateMatrix::new([]);
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('*') || line.starts_with('%') {
            continue;
        }
        let fields = split_fields(line);
        if fields.len() != 5 {
            return Err(MatrixIoError::MalformedRecord {
                line: line_no,
                reason: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let row = DofLabel::new(
            parse_index(fields[0], line_no)?,
            parse_index(fields[1], line_no)?,
        );
        let col = DofLabel::new(
            parse_index(fields[2], line_no)?,
            parse_index(fields[3], line_no)?,
        );
        let value = parse_value(fields[4], line_no)?;
        insert_unique(&mut m, canonical(row, col), value, line_no)?;
    }
    Ok(m)
}

fn insert_unique(
    m: &mut CoordinateMatrix,
    key: (DofLabel, DofLabel),
    value: f64,
    line: usize,
) -> Result<(), MatrixIoError> {
    m.labels_insert(key.0);
    m.labels_insert(key.1);
    match m.entries.get(&key) {
        Some(&old) if !values_agree(old, value, DUPLICATE_RTOL) => {
            Err(MatrixIoError::DuplicateEntry {
                line,
                row: key.0,
                col: key.1,
            })
        }
        Some(_) => Ok(()),
        None => {
            m.entries.insert(key, value);
            Ok(())
        }
    }
}

/// Parses a Matrix Market `coordinate real` file. Row `i` takes the `i`-th
/// entry of a `% labels node.dof …` comment when one precedes the size line,
/// and `(i, 1)` otherwise.
pub fn parse_matrix_market(text: &str) -> Result<CoordinateMatrix, MatrixIoError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| MatrixIoError::UnsupportedHeader("empty input".into()))?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(MatrixIoError::UnsupportedHeader(header.to_string()));
    }
    if tokens[2] != "coordinate" || !matches!(tokens[3].as_str(), "real" | "integer") {
        return Err(MatrixIoError::UnsupportedHeader(header.to_string()));
    }
    let symmetric = match tokens[4].as_str() {
        "symmetric" => true,
        "general" => false,
        _ => return Err(MatrixIoError::UnsupportedHeader(header.to_string())),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut named: Option<Vec<DofLabel>> = None;
    let mut raw: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut seen = 0usize;
    let mut last_line = 1;
    for (idx, raw_line) in lines {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw_line.trim();
        if let Some(rest) = line.strip_prefix("% labels") {
            if size.is_none() {
                named = Some(parse_label_list(rest, line_no)?);
            }
            continue;
        }
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields = split_fields(line);
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(MatrixIoError::MalformedRecord {
                        line: line_no,
                        reason: "expected `rows cols nnz`".into(),
                    });
                }
                let parse = |s: &str| {
                    s.parse::<usize>().map_err(|_| MatrixIoError::MalformedRecord {
                        line: line_no,
                        reason: format!("bad size field {s:?}"),
                    })
                };
                let (r, c, nnz) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
                if r != c {
                    return Err(MatrixIoError::MalformedRecord {
                        line: line_no,
                        reason: format!("matrix must be square, got {r}x{c}"),
                    });
                }
                size = Some((r, nnz));
            }
            Some((n, _)) => {
                if fields.len() != 3 {
                    return Err(MatrixIoError::MalformedRecord {
                        line: line_no,
                        reason: format!("expected 3 fields, found {}", fields.len()),
                    });
                }
                let i = parse_index(fields[0], line_no)?;
                let j = parse_index(fields[1], line_no)?;
                if i as usize > n || j as usize > n {
                    return Err(MatrixIoError::MalformedRecord {
                        line: line_no,
                        reason: format!("index ({i}, {j}) outside {n}x{n}"),
                    });
                }
                let v = parse_value(fields[2], line_no)?;
                let (r, c) = (i as usize - 1, j as usize - 1);
                let key = if symmetric { (r.max(c), r.min(c)) } else { (r, c) };
                if let Some(&old) = raw.get(&key) {
                    if !values_agree(old, v, DUPLICATE_RTOL) {
                        return Err(MatrixIoError::DuplicateEntry {
                            line: line_no,
                            row: DofLabel::new(key.0 as u32 + 1, 1),
                            col: DofLabel::new(key.1 as u32 + 1, 1),
                        });
                    }
                } else {
                    raw.insert(key, v);
                }
                seen += 1;
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| MatrixIoError::MalformedRecord {
        line: last_line,
        reason: "missing size line".into(),
    })?;
    if seen != nnz {
        return Err(MatrixIoError::MalformedRecord {
            line: last_line,
            reason: format!("header declares {nnz} entries, found {seen}"),
        });
    }

    let labels = match named {
        Some(l) if l.len() != n => {
            return Err(MatrixIoError::MalformedRecord {
                line: last_line,
                reason: format!("{} labels for dimension {n}", l.len()),
            })
        }
        Some(l) => l,
        None => (1..=n as u32).map(|i| DofLabel::new(i, 1)).collect(),
    };
    let mut m = CoordinateMatrix::new(labels.iter().copied());
    if m.dim() != n {
        return Err(MatrixIoError::MalformedRecord { line: last_line, reason: "repeated label".into() });
    }
    m.symmetric_storage = symmetric;
    if symmetric {
        for (&(r, c), &v) in &raw {
            m.entries.insert(canonical(labels[r], labels[c]), v);
        }
        return Ok(m);
    }
    // general storage: both triangles must agree, then they are averaged
    for (&(r, c), &v) in &raw {
        let mirror = raw.get(&(c, r)).copied().unwrap_or(0.0);
        let (lr, lc) = (labels[r], labels[c]);
        if !values_agree(v, mirror, ASYMMETRY_RTOL) {
            return Err(MatrixIoError::Asymmetric { row: lr, col: lc });
        }
        let sym = if r == c { v } else { 0.5 * (v + mirror) };
        m.entries.insert((lr, lc), sym);
        m.entries.insert((lc, lr), sym);
    }
    Ok(m)
}

fn parse_label_list(text: &str, line: usize) -> Result<Vec<DofLabel>, MatrixIoError> {
    text.split_whitespace()
        .map(|tok| {
            let bad = || MatrixIoError::MalformedRecord { line, reason: format!("bad label {tok:?}") };
            let (node, dof) = tok.split_once('.').ok_or_else(bad)?;
            Ok(DofLabel::new(node.parse().map_err(|_| bad())?, dof.parse().map_err(|_| bad())?))
        })
        .collect()
}

/// Reads either format, keyed on the Matrix Market banner.
pub fn parse_matrix(text: &str) -> Result<CoordinateMatrix, MatrixIoError> {
    if text.trim_start().starts_with("%%MatrixMarket") {
        parse_matrix_market(text)
    } else {
        parse_abaqus_mtx(text)
    }
}

/// Dense free-DOF block with the labels it retains, in label order.
#[derive(Debug, Clone, PartialEq)]
pub struct Partitioned {
    pub matrix: DMatrix<f64>,
    pub labels: Vec<DofLabel>,
}

/// Deletes the rows and columns of every fixed DOF.
pub fn partition_free(
    matrix: &CoordinateMatrix,
    bc: &BoundarySet,
) -> Result<Partitioned, MatrixIoError> {
    if let Some(unknown) = bc.fixed.iter().find(|l| matrix.index_of(**l).is_none()) {
        return Err(MatrixIoError::UnknownDof(*unknown));
    }
    let labels: Vec<DofLabel> = matrix
        .labels()
        .iter()
        .copied()
        .filter(|l| !bc.contains(l))
        .collect();
    let n = labels.len();
    let position: BTreeMap<DofLabel, usize> =
        labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let mut a = DMatrix::zeros(n, n);
    for (r, c, v) in matrix.entries() {
        if let (Some(&i), Some(&j)) = (position.get(&r), position.get(&c)) {
            a[(i, j)] = v;
            if matrix.symmetric_storage() {
                a[(j, i)] = v;
            }
        }
    }
    Ok(Partitioned { matrix: a, labels })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixFormat {
    AbaqusMtx,
    MatrixMarket,
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes `matrix` with canonical entry order and 17 significant digits.
pub fn write_matrix(matrix: &CoordinateMatrix, format: MatrixFormat) -> String {
    let mut out = String::new();
    match format {
        MatrixFormat::AbaqusMtx => {
            out.push_str(&format!(
                "** femvqe coordinate matrix: dim={} storage={}\n",
                matrix.dim(),
                if matrix.symmetric_storage() { "lower" } else { "full" }
            ));
            // the format carries labels only through records, so DOFs with no
            // stored entry get an explicit zero diagonal
            let used: BTreeSet<DofLabel> = matrix.entries().flat_map(|(r, c, _)| [r, c]).collect();
            let mut records: Vec<_> = matrix.entries().collect();
            records.extend(matrix.labels().iter().filter(|l| !used.contains(l)).map(|&l| (l, l, 0.0)));
            records.sort_by_key(|&(r, c, _)| (r, c));
            for (r, c, v) in records {
                out.push_str(&format!(
                    "{}, {}, {}, {}, {}\n",
                    r.node,
                    r.dof,
                    c.node,
                    c.dof,
                    fmt_value(v)
                ));
            }
        }
        MatrixFormat::MatrixMarket => {
            let kind = if matrix.symmetric_storage() { "symmetric" } else { "general" };
            out.push_str(&format!("%%MatrixMarket matrix coordinate real {kind}\n"));
            let names: Vec<String> = matrix.labels().iter().map(|l| format!("{}.{}", l.node, l.dof)).collect();
            if !names.is_empty() {
                out.push_str(&format!("% labels {}\n", names.join(" ")));
            }
            out.push_str(&format!("{} {} {}\n", matrix.dim(), matrix.dim(), matrix.nnz()));
            for (r, c, v) in matrix.entries() {
                let i = matrix.index_of(r).expect("registered") + 1;
                let j = matrix.index_of(c).expect("registered") + 1;
                out.push_str(&format!("{i} {j} {}\n", fmt_value(v)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(node: u32, dof: u32) -> DofLabel {
        DofLabel::new(node, dof)
    }

    #[test]
    fn single_entry() {
        let m = parse_abaqus_mtx("1,1,1,1, 4.0").unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(m.get(l(1, 1), l(1, 1)), 4.0);
    }

    #[test]
    fn lower_triangle_is_mirrored() {
        let m = parse_abaqus_mtx("1,1,1,1, 2.0\n2,1,1,1, -1.0\n2,1,2,1, 2.0").unwrap();
        assert!(m.symmetric_storage());
        let d = m.to_dense();
        assert_eq!(d, DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]));
    }

    #[test]
    fn comments_blank_lines_and_whitespace_fields() {
        let text = "** exported\n% another\n\n1 1 1 1 3.5\n  2  2 1 1 0.5\n";
        let m = parse_abaqus_mtx(text).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.get(l(1, 1), l(2, 2)), 0.5);
    }

    #[test]
    fn upper_triangle_records_canonicalize() {
        let m = parse_abaqus_mtx("1,1,2,1,7.0\n2,1,1,1,7.0").unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.entries().next().unwrap(), (l(2, 1), l(1, 1), 7.0));
    }

    #[test]
    fn malformed_records_report_line() {
        let err = parse_abaqus_mtx("1,1,1,1,1.0\n1,1,1\n").unwrap_err();
        assert!(matches!(err, MatrixIoError::MalformedRecord { line: 2, .. }));
        let err = parse_abaqus_mtx("1,1,1,1,abc").unwrap_err();
        assert!(matches!(err, MatrixIoError::MalformedRecord { line: 1, .. }));
        let err = parse_abaqus_mtx("0,1,1,1,1.0").unwrap_err();
        assert!(matches!(err, MatrixIoError::MalformedRecord { line: 1, .. }));
    }

    #[test]
    fn conflicting_duplicate_is_rejected() {
        let err = parse_abaqus_mtx("2,1,1,1,1.0\n1,1,2,1,1.5").unwrap_err();
        assert!(matches!(err, MatrixIoError::DuplicateEntry { line: 2, .. }));
    }

    #[test]
    fn matrix_market_single_and_general() {
        let m = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real symmetric\n1 1 1\n1 1 5.0\n",
        )
        .unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(m.get(l(1, 1), l(1, 1)), 5.0);

        let m = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real general\n% c\n2 2 4\n1 1 1\n1 2 3\n2 1 3\n2 2 1\n",
        )
        .unwrap();
        assert!(!m.symmetric_storage());
        assert_eq!(m.to_dense(), DMatrix::from_row_slice(2, 2, &[1.0, 3.0, 3.0, 1.0]));
    }

    #[test]
    fn matrix_market_rejects_unsupported_and_asymmetric() {
        for header in [
            "%%MatrixMarket matrix coordinate complex symmetric",
            "%%MatrixMarket matrix coordinate pattern symmetric",
            "%%MatrixMarket matrix array real general",
            "not a header",
        ] {
            let err = parse_matrix_market(&format!("{header}\n1 1 1\n1 1 1\n")).unwrap_err();
            assert!(matches!(err, MatrixIoError::UnsupportedHeader(_)), "{header}");
        }
        let err = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1.0\n2 1 2.0\n",
        )
        .unwrap_err();
        assert!(matches!(err, MatrixIoError::Asymmetric { .. }));
        let err = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 1.0\n",
        )
        .unwrap_err();
        assert!(matches!(err, MatrixIoError::MalformedRecord { .. }));
    }

    #[test]
    fn partition_identity_drops_middle_label() {
        let labels = [l(1, 1), l(2, 1), l(3, 1)];
        let m = CoordinateMatrix::from_triplets_summed(labels, labels.map(|x| (x, x, 1.0)));
        let bc: BoundarySet = [l(2, 1)].into_iter().collect();
        let p = partition_free(&m, &bc).unwrap();
        assert_eq!(p.labels, vec![l(1, 1), l(3, 1)]);
        assert_eq!(p.matrix, DMatrix::identity(2, 2));

        let p = partition_free(&m, &BoundarySet::new()).unwrap();
        assert_eq!(p.matrix, m.to_dense());
    }

    #[test]
    fn partition_unknown_label() {
        let m = parse_abaqus_mtx("1,1,1,1,1.0").unwrap();
        let bc: BoundarySet = [l(9, 1)].into_iter().collect();
        assert_eq!(
            partition_free(&m, &bc).unwrap_err(),
            MatrixIoError::UnknownDof(l(9, 1))
        );
    }

    #[test]
    fn write_empty_and_single() {
        let empty = CoordinateMatrix::new([]);
        let abq = write_matrix(&empty, MatrixFormat::AbaqusMtx);
        assert_eq!(abq.lines().count(), 1);
        assert!(abq.starts_with("**"));
        let mm = write_matrix(&empty, MatrixFormat::MatrixMarket);
        assert_eq!(mm.lines().nth(1), Some("0 0 0"));
        assert_eq!(parse_matrix_market(&mm).unwrap().dim(), 0);

        let one = parse_abaqus_mtx("1,1,1,1,0.1").unwrap();
        let text = write_matrix(&one, MatrixFormat::AbaqusMtx);
        let records: Vec<_> = text.lines().filter(|s| !s.starts_with('*')).collect();
        assert_eq!(records.len(), 1);
        assert_eq!(parse_abaqus_mtx(&text).unwrap(), one);
    }

    #[test]
    fn matrix_market_label_comment() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% labels 2.1 7.3\n2 2 2\n1 1 1.5\n2 1 -0.5\n";
        let m = parse_matrix_market(text).unwrap();
        assert_eq!(m.labels(), &[l(2, 1), l(7, 3)]);
        assert_eq!(m.get(l(7, 3), l(2, 1)), -0.5);
        let short = "%%MatrixMarket matrix coordinate real symmetric\n% labels 2.1\n2 2 1\n1 1 1.5\n";
        assert!(parse_matrix_market(short).is_err());
        assert_eq!(parse_matrix_market(&write_matrix(&m, MatrixFormat::MatrixMarket)).unwrap(), m);
    }

    #[test]
    fn zero_rows_are_reported() {
        let m = parse_abaqus_mtx("1,1,1,1,1.0\n2,1,2,1,0.0").unwrap();
        assert_eq!(m.zero_rows(), vec![l(2, 1)]);
    }
}
