//! Mesh generators for the three case studies, each hitting an exact
//! free-DOF count of 2^N.
//!
//! * `beam`: the element count follows directly from 3n − 4 = 2^N.
//! * `truss_hex`: a flat-top hexagon (side 1.5 mm) filled by a row-wise
//!   triangulated bar lattice; rows, bar spacing and the rounding rule of the
//!   per-row segment count are searched.
//! * `plate_hole`: a quarter plate with a central hole, meshed by rings
//!   blending the hole arc into the outer edges; ring count, hole-side and
//!   edge-side divisions are searched. Equal-count neighbouring rings are
//!   joined by CPE4 quads, transitions by CPE3 triangles.
//!
//! Among all exact hits the mesh with the best worst-element edge ratio wins;
//! ties go to the smaller parameter tuple.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    BeamSection, Element, ElementKind, FemError, FemModel, GeneratorInfo, MassFormulation,
    Material, Mesh, Node, Point, Section, REPORTING_EIGENVALUE_SCALE,
};
use crate::matrixio::{BoundarySet, DofLabel};

const MM: f64 = 1e-3;
const MAX_QUBITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    TrussHex,
    Beam,
    PlateHole,
}

impl CaseKind {
    pub const ALL: [CaseKind; 3] = [CaseKind::TrussHex, CaseKind::Beam, CaseKind::PlateHole];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::TrussHex => "truss_hex",
            Self::Beam => "beam",
            Self::PlateHole => "plate_hole",
        }
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown case `{s}` (expected truss_hex, beam or plate_hole)"))
    }
}

/// Knobs the case descriptions leave open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CaseOptions {
    pub material: Material,
    pub shear_factor: f64,
    pub rotary_divisor: f64,
    pub eigenvalue_scale: f64,
}

impl Default for CaseOptions {
    fn default() -> Self {
        Self {
            material: Material::case_steel(),
            shear_factor: BeamSection::DEFAULT_SHEAR_FACTOR,
            rotary_divisor: BeamSection::DEFAULT_ROTARY_DIVISOR,
            eigenvalue_scale: REPORTING_EIGENVALUE_SCALE,
        }
    }
}

pub fn generate_case(case: CaseKind, n_qubits: u32) -> Result<FemModel, FemError> {
    generate_case_with(case, n_qubits, &CaseOptions::default())
}

pub fn generate_case_with(
    case: CaseKind,
    n_qubits: u32,
    opts: &CaseOptions,
) -> Result<FemModel, FemError> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(FemError::InvalidMesh(format!(
            "qubit count {n_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    let target = 1usize << n_qubits;
    let built = match case {
        CaseKind::Beam => beam(target, opts)?,
        CaseKind::TrussHex => search(case, target, truss_free_dofs, truss_space(target), truss)?,
        CaseKind::PlateHole => search(case, target, plate_free_dofs, plate_space(target), plate)?,
    };
    let Built { mesh, bc, formulation, parameters } = built;
    let mut model = FemModel::new(mesh, opts.material, bc, formulation)?;
    model.eigenvalue_scale = opts.eigenvalue_scale;
    model.generator = Some(GeneratorInfo { case, n_qubits, parameters });
    debug_assert_eq!(model.n_free_dof, target);
    Ok(model)
}

struct Built {
    mesh: Mesh,
    bc: BoundarySet,
    formulation: MassFormulation,
    parameters: BTreeMap<String, String>,
}

/// Picks the best-quality parameter tuple whose free-DOF count is exactly
/// `target`, or reports the nearest achievable counts.
fn search<P: Copy + Ord + fmt::Debug>(
    case: CaseKind,
    target: usize,
    count: impl Fn(P) -> usize,
    space: Vec<P>,
    build: impl Fn(P) -> Option<(Built, f64)>,
) -> Result<Built, FemError> {
    let (mut below, mut above) = (None::<usize>, None::<usize>);
    let mut best: Option<(f64, P, Built)> = None;
    for p in space {
        let n = count(p);
        if n < target {
            below = below.max(Some(n));
        } else if n > target {
            above = Some(above.map_or(n, |a: usize| a.min(n)));
        } else if let Some((built, score)) = build(p) {
            let better = match &best {
                None => true,
                Some((s, q, _)) => score < *s || (score == *s && p < *q),
            };
            if better {
                best = Some((score, p, built));
            }
        }
    }
    best.map(|(_, _, b)| b)
        .ok_or(FemError::TargetUnreachable { case, target, below, above })
}

fn bound(target: usize) -> usize {
    (target as f64).sqrt().ceil() as usize + 4
}

// ---------------------------------------------------------------- beam

const BEAM_LENGTH_MM: f64 = 9.0;
const BEAM_RADIUS_MM: f64 = 1.0;

fn beam(target: usize, opts: &CaseOptions) -> Result<Built, FemError> {
    // 3 DOFs per node, u1 and u2 fixed at both ends
    if (target + 4) % 3 != 0 {
        let n_lo = (target + 4) / 3;
        let below = (n_lo >= 2).then(|| 3 * n_lo - 4);
        return Err(FemError::TargetUnreachable {
            case: CaseKind::Beam,
            target,
            below,
            above: Some(3 * (n_lo + 1) - 4),
        });
    }
    let n_nodes = (target + 4) / 3;
    let section = Section::Beam(BeamSection {
        radius: BEAM_RADIUS_MM * MM,
        shear_factor: opts.shear_factor,
        rotary_divisor: opts.rotary_divisor,
    });
    let nodes = (0..n_nodes)
        .map(|i| Node {
            id: i as u32 + 1,
            x: BEAM_LENGTH_MM * MM * i as f64 / (n_nodes - 1) as f64,
            y: 0.0,
        })
        .collect();
    let elements = (1..n_nodes as u32)
        .map(|i| Element { id: i, kind: ElementKind::B21, nodes: vec![i, i + 1], section })
        .collect();
    let last = n_nodes as u32;
    let bc = [(1, 1), (1, 2), (last, 1), (last, 2)]
        .into_iter()
        .map(|(n, d)| DofLabel::new(n, d))
        .collect();
    Ok(Built {
        mesh: Mesh { nodes, elements },
        bc,
        formulation: MassFormulation::Lumped,
        parameters: params(&[("elements", (n_nodes - 1).to_string())]),
    })
}

fn params(kv: &[(&str, String)]) -> BTreeMap<String, String> {
    kv.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

// ---------------------------------------------------------------- truss

const HEX_SIDE_MM: f64 = 1.5;
const BAR_RADIUS_MM: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Rounding {
    Nearest,
    Up,
    Down,
}

impl Rounding {
    fn apply(self, x: f64) -> usize {
        let r = match self {
            Self::Nearest => (x + 0.5).floor(),
            Self::Up => (x - 1e-9).ceil(),
            Self::Down => (x + 1e-9).floor(),
        };
        (r as usize).max(1)
    }

    fn name(self) -> &'static str {
        match self {
            Self::Nearest => "nearest",
            Self::Up => "up",
            Self::Down => "down",
        }
    }
}

/// (rows, bar divisions across the widest row, rounding rule)
type TrussParams = (usize, usize, Rounding);

fn truss_space(target: usize) -> Vec<TrussParams> {
    let b = 2 * bound(target);
    let mut v = Vec::new();
    for rows in (2..=b).step_by(2) {
        for m in 1..=b {
            for r in [Rounding::Nearest, Rounding::Up, Rounding::Down] {
                v.push((rows, m, r));
            }
        }
    }
    v
}

fn truss_columns((rows, m, rounding): TrussParams) -> Vec<usize> {
    let s3 = 3f64.sqrt();
    let (l, height) = (HEX_SIDE_MM, 3f64.sqrt() * HEX_SIDE_MM);
    let h = 2.0 * l / m as f64;
    (0..=rows)
        .map(|j| {
            let y = -height / 2.0 + height * j as f64 / rows as f64;
            let w = 2.0 * l - y.abs() * 2.0 / s3;
            rounding.apply(w / h)
        })
        .collect()
}

fn truss_free_dofs(p: TrussParams) -> usize {
    let c = truss_columns(p);
    let rows = p.0;
    let v: usize = c.iter().map(|x| x + 1).sum();
    // bottom row pinned, top row and the two ends of every inner row on rollers
    2 * v - 2 * (c[0] + 1) - (c[rows] + 1) - 2 * (rows - 1)
}

/// Joins two rows of points (each ordered by parameter in [0, 1]) with
/// triangles, advancing whichever row has the nearer next point.
fn strip(a: &[(u32, f64)], b: &[(u32, f64)]) -> Vec<[u32; 3]> {
    let (mut i, mut k) = (0, 0);
    let mut tris = Vec::new();
    while i + 1 < a.len() || k + 1 < b.len() {
        let advance_a = if i + 1 == a.len() {
            false
        } else if k + 1 == b.len() {
            true
        } else {
            a[i + 1].1 <= b[k + 1].1
        };
        if advance_a {
            tris.push([a[i].0, a[i + 1].0, b[k].0]);
            i += 1;
        } else {
            tris.push([a[i].0, b[k + 1].0, b[k].0]);
            k += 1;
        }
    }
    tris
}

fn edge_ratio(p: &[Point]) -> f64 {
    let n = p.len();
    let lens: Vec<f64> = (0..n).map(|i| p[i].dist(p[(i + 1) % n])).collect();
    let max = lens.iter().cloned().fold(0.0, f64::max);
    let min = lens.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

fn truss(p: TrussParams) -> Option<(Built, f64)> {
    let cols = truss_columns(p);
    let rows = p.0;
    let height = 3f64.sqrt() * HEX_SIDE_MM;
    let mut nodes = Vec::new();
    let mut row_ids: Vec<Vec<(u32, f64)>> = Vec::new();
    let mut bc = BoundarySet::new();
    for (j, &c) in cols.iter().enumerate() {
        let y = -height / 2.0 + height * j as f64 / rows as f64;
        let w = 2.0 * HEX_SIDE_MM - y.abs() * 2.0 / 3f64.sqrt();
        let mut ids = Vec::new();
        for i in 0..=c {
            let t = i as f64 / c as f64;
            let id = nodes.len() as u32 + 1;
            nodes.push(Node { id, x: (-w / 2.0 + w * t) * MM, y: y * MM });
            ids.push((id, t));
            let end = i == 0 || i == c;
            if j == 0 {
                bc.fix(DofLabel::new(id, 1));
                bc.fix(DofLabel::new(id, 2));
            } else if j == rows || end {
                bc.fix(DofLabel::new(id, 1));
            }
        }
        row_ids.push(ids);
    }
    let pos: Vec<Point> = nodes.iter().map(|n| Point::new(n.x, n.y)).collect();
    let mut edges = BTreeSet::new();
    let mut worst = 0f64;
    for j in 0..rows {
        for t in strip(&row_ids[j], &row_ids[j + 1]) {
            let pts: Vec<Point> = t.iter().map(|&id| pos[id as usize - 1]).collect();
            if super::polygon_area(&pts).abs() <= 1e-12 * MM * MM {
                return None;
            }
            worst = worst.max(edge_ratio(&pts));
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
    }
    let area = PI * (BAR_RADIUS_MM * MM).powi(2);
    let elements = edges
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| Element {
            id: i as u32 + 1,
            kind: ElementKind::T2d2,
            nodes: vec![a, b],
            section: Section::Bar { area },
        })
        .collect();
    let built = Built {
        mesh: Mesh { nodes, elements },
        bc,
        formulation: MassFormulation::Consistent,
        parameters: params(&[
            ("rows", rows.to_string()),
            ("divisions", p.1.to_string()),
            ("rounding", p.2.name().to_string()),
            ("row_segments", format!("{cols:?}")),
        ]),
    };
    Some((built, worst))
}

// ---------------------------------------------------------------- plate

const PLATE_HALF_MM: f64 = 1.0;
const HOLE_RADIUS_MM: f64 = 0.5;

/// (rings, divisions on the hole arc, divisions on the right edge,
/// divisions on the top edge)
type PlateParams = (usize, usize, usize, usize);

fn plate_space(target: usize) -> Vec<PlateParams> {
    let b = bound(target);
    let mut v = Vec::new();
    for nr in 1..=b {
        for nin in 1..=2 * b {
            for p1 in 1..=b {
                for p2 in p1.saturating_sub(2).max(1)..=p1 + 2 {
                    v.push((nr, nin, p1, p2));
                }
            }
        }
    }
    v
}

fn ring_counts((nr, nin, p1, p2): PlateParams) -> Vec<usize> {
    let nout = (p1 + p2) as f64;
    (0..=nr)
        .map(|j| {
            let s = j as f64 / nr as f64;
            ((nin as f64 + (nout - nin as f64) * s).round() as usize).max(1)
        })
        .collect()
}

fn plate_free_dofs(p: PlateParams) -> usize {
    let rings = ring_counts(p);
    let v: usize = rings.iter().map(|n| n + 1).sum();
    // bottom edge u2, left edge u1, right edge u1
    2 * v - 2 * (p.0 + 1) - (p.2 + 1)
}

fn plate_point(s: f64, t: f64, p1: usize, p2: usize) -> Point {
    let ang = t * FRAC_PI_2;
    let arc = Point::new(HOLE_RADIUS_MM * ang.cos(), HOLE_RADIUS_MM * ang.sin());
    let tc = p1 as f64 / (p1 + p2) as f64;
    let outer = if t <= tc {
        Point::new(PLATE_HALF_MM, PLATE_HALF_MM * t / tc)
    } else {
        Point::new(PLATE_HALF_MM * (1.0 - (t - tc) / (1.0 - tc)), PLATE_HALF_MM)
    };
    Point::new((1.0 - s) * arc.x + s * outer.x, (1.0 - s) * arc.y + s * outer.y)
}

fn plate(p: PlateParams) -> Option<(Built, f64)> {
    let (nr, _, p1, p2) = p;
    let rings = ring_counts(p);
    let mut nodes = Vec::new();
    let mut ring_ids: Vec<Vec<(u32, f64)>> = Vec::new();
    let mut bc = BoundarySet::new();
    for (j, &n) in rings.iter().enumerate() {
        let s = j as f64 / nr as f64;
        let mut ids = Vec::new();
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let id = nodes.len() as u32 + 1;
            let q = if j == nr {
                // land exactly on the corner and the straight edges
                plate_point(1.0, t, p1, p2)
            } else {
                plate_point(s, t, p1, p2)
            };
            nodes.push(Node { id, x: q.x * MM, y: q.y * MM });
            ids.push((id, t));
            if i == 0 {
                bc.fix(DofLabel::new(id, 2));
            }
            if i == n || (j == nr && i <= p1) {
                bc.fix(DofLabel::new(id, 1));
            }
        }
        ring_ids.push(ids);
    }
    let pos: Vec<Point> = nodes.iter().map(|n| Point::new(n.x, n.y)).collect();
    let at = |id: u32| pos[id as usize - 1];
    let mut cells: Vec<Vec<u32>> = Vec::new();
    for j in 0..nr {
        let (a, b) = (&ring_ids[j], &ring_ids[j + 1]);
        if a.len() == b.len() {
            for i in 0..a.len() - 1 {
                cells.push(vec![a[i].0, b[i].0, b[i + 1].0, a[i + 1].0]);
            }
        } else {
            for t in strip(a, b) {
                let pts = [at(t[0]), at(t[1]), at(t[2])];
                if super::polygon_area(&pts) < 0.0 {
                    cells.push(vec![t[0], t[2], t[1]]);
                } else {
                    cells.push(t.to_vec());
                }
            }
        }
    }
    let mut worst = 0f64;
    for c in &cells {
        let pts: Vec<Point> = c.iter().map(|&id| at(id)).collect();
        if !convex_ccw(&pts) {
            return None;
        }
        worst = worst.max(edge_ratio(&pts));
    }
    let elements = cells
        .into_iter()
        .enumerate()
        .map(|(i, c)| Element {
            id: i as u32 + 1,
            kind: if c.len() == 4 { ElementKind::Cpe4 } else { ElementKind::Cpe3 },
            nodes: c,
            section: Section::Solid { thickness: MM },
        })
        .collect();
    let built = Built {
        mesh: Mesh { nodes, elements },
        bc,
        formulation: MassFormulation::Lumped,
        parameters: params(&[
            ("rings", nr.to_string()),
            ("hole_divisions", p.1.to_string()),
            ("right_edge_divisions", p1.to_string()),
            ("top_edge_divisions", p2.to_string()),
            ("ring_segments", format!("{rings:?}")),
        ]),
    };
    Some((built, worst))
}

/// Strictly convex with counter-clockwise orientation: every corner turns
/// left by a non-negligible amount.
fn convex_ccw(p: &[Point]) -> bool {
    let n = p.len();
    let scale = (0..n).map(|i| p[i].dist(p[(i + 1) % n])).fold(0.0, f64::max);
    (0..n).all(|i| {
        let (a, b, c) = (p[i], p[(i + 1) % n], p[(i + 2) % n]);
        let cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
        cross > 1e-9 * scale * scale
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assemble;
    use crate::matrixio::partition_free;

    fn free_dim(model: &FemModel) -> usize {
        let (k, _) = assemble(model).unwrap();
        partition_free(&k, &model.bc).unwrap().matrix.nrows()
    }

    #[test]
    fn beam_three_qubits_is_three_elements() {
        let m = generate_case(CaseKind::Beam, 3).unwrap();
        assert_eq!(m.mesh.nodes.len(), 4);
        assert_eq!(m.mesh.elements.len(), 3);
        assert_eq!(m.n_free_dof, 8);
        assert_eq!(free_dim(&m), 8);
        assert_eq!(m.mass_formulation, MassFormulation::Lumped);
    }

    #[test]
    fn beam_even_qubit_counts_are_unreachable() {
        for n in [2u32, 4, 6] {
            match generate_case(CaseKind::Beam, n).unwrap_err() {
                FemError::TargetUnreachable { below, above, target, .. } => {
                    assert_eq!(target, 1 << n);
                    for c in below.into_iter().chain(above) {
                        assert_eq!((c + 4) % 3, 0);
                        assert_ne!(c, target);
                    }
                    assert!(above.unwrap() > target);
                }
                e => panic!("unexpected {e:?}"),
            }
        }
    }

    #[test]
    fn truss_one_qubit_is_unreachable() {
        assert!(matches!(
            generate_case(CaseKind::TrussHex, 1),
            Err(FemError::TargetUnreachable { .. })
        ));
    }

    #[test]
    fn plate_six_qubits() {
        let m = generate_case(CaseKind::PlateHole, 6).unwrap();
        assert_eq!(m.n_free_dof, 64);
        assert_eq!(free_dim(&m), 64);
    }

    #[test]
    fn exact_hits_for_small_counts() {
        for case in [CaseKind::TrussHex, CaseKind::PlateHole] {
            for n in 2..=8 {
                let m = generate_case(case, n).unwrap_or_else(|e| panic!("{case} N={n}: {e}"));
                assert_eq!(free_dim(&m), 1 << n, "{case} N={n}");
            }
        }
        for n in [3, 5, 7, 9] {
            assert_eq!(free_dim(&generate_case(CaseKind::Beam, n).unwrap()), 1 << n);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        for case in CaseKind::ALL {
            let n = if case == CaseKind::Beam { 5 } else { 4 };
            assert_eq!(generate_case(case, n).unwrap(), generate_case(case, n).unwrap());
        }
    }

    #[test]
    fn strip_covers_both_rows() {
        let a = [(1, 0.0), (2, 1.0)];
        let b = [(3, 0.0), (4, 0.5), (5, 1.0)];
        let tris = strip(&a, &b);
        assert_eq!(tris.len(), 3);
        let mut edges = BTreeSet::new();
        for t in &tris {
            for e in 0..3 {
                let (x, y) = (t[e], t[(e + 1) % 3]);
                edges.insert((x.min(y), x.max(y)));
            }
        }
        for e in [(1, 2), (3, 4), (4, 5)] {
            assert!(edges.contains(&e));
        }
    }

    #[test]
    fn case_names_round_trip() {
        for c in CaseKind::ALL {
            assert_eq!(c.as_str().parse::<CaseKind>().unwrap(), c);
        }
        assert!("hex".parse::<CaseKind>().is_err());
    }
}
