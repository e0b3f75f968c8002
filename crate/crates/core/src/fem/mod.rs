//! Structural finite elements: element matrices, meshes, assembly and the
//! three generated case studies.
//!
//! Internal units are SI (m, kg, Pa). Generated geometry is specified in mm
//! and converted on construction.

mod cases;
mod elements;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrixio::{BoundarySet, CoordinateMatrix, DofLabel};

pub use cases::{generate_case, generate_case_with, CaseKind, CaseOptions};
pub use elements::{beam_element, plane_strain_d, plane_strain_element, truss_element, BeamSection};

/// Scale that maps SI eigenvalues of generated models onto the unit system
/// the reference numbers are quoted in: lengths in mm and E as the bare
/// number printed in GPa, i.e. `(1e-9 GPa/Pa) · (1e-6 m²/mm²)`.
pub const REPORTING_EIGENVALUE_SCALE: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FemError {
    #[error("element has zero length")]
    ZeroLengthElement,
    #[error("invalid section: {0}")]
    InvalidSection(String),
    #[error("element Jacobian is not positive")]
    DegenerateElement,
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("element {id}: {source}")]
    InElement { id: u32, source: Box<FemError> },
    #[error(
        "{case} cannot reach {target} free DOFs; nearest achievable: below {below:?}, above {above:?}"
    )]
    TargetUnreachable {
        case: CaseKind,
        target: usize,
        below: Option<usize>,
        above: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// kg/m³
    pub density: f64,
    /// Pa
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
}

impl Material {
    pub fn new(density: f64, youngs_modulus: f64, poisson_ratio: f64) -> Result<Self, FemError> {
        let m = Self { density, youngs_modulus, poisson_ratio };
        m.validate()?;
        Ok(m)
    }

    /// The steel record of the case studies with E taken literally as
    /// 21×10⁴ GPa.
    pub fn case_steel() -> Self {
        Self { density: 7850.0, youngs_modulus: 2.1e14, poisson_ratio: 0.3 }
    }

    pub fn validate(&self) -> Result<(), FemError> {
        if !(self.density > 0.0) {
            return Err(FemError::InvalidMaterial(format!("density {} must be positive", self.density)));
        }
        if !(self.youngs_modulus > 0.0) {
            return Err(FemError::InvalidMaterial(format!(
                "Young's modulus {} must be positive",
                self.youngs_modulus
            )));
        }
        if !(0.0..0.5).contains(&self.poisson_ratio) {
            return Err(FemError::InvalidMaterial(format!(
                "Poisson ratio {} outside [0, 0.5)",
                self.poisson_ratio
            )));
        }
        Ok(())
    }

    pub fn shear_modulus(&self) -> f64 {
        self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    #[serde(rename = "T2D2")]
    T2d2,
    #[serde(rename = "B21")]
    B21,
    #[serde(rename = "CPE3")]
    Cpe3,
    #[serde(rename = "CPE4")]
    Cpe4,
}

impl ElementKind {
    pub fn arity(self) -> usize {
        match self {
            Self::T2d2 | Self::B21 => 2,
            Self::Cpe3 => 3,
            Self::Cpe4 => 4,
        }
    }

    pub fn dofs_per_node(self) -> u32 {
        match self {
            Self::B21 => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Section {
    Bar { area: f64 },
    Beam(BeamSection),
    Solid { thickness: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub id: u32,
    pub kind: ElementKind,
    pub nodes: Vec<u32>,
    pub section: Section,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub nodes: Vec<Node>,
    pub elements: Vec<Element>,
}

impl Mesh {
    fn node_map(&self) -> Result<BTreeMap<u32, Point>, FemError> {
        let mut map = BTreeMap::new();
        for n in &self.nodes {
            if n.id == 0 {
                return Err(FemError::InvalidMesh("node ids are 1-based".into()));
            }
            if map.insert(n.id, Point::new(n.x, n.y)).is_some() {
                return Err(FemError::InvalidMesh(format!("duplicate node id {}", n.id)));
            }
        }
        Ok(map)
    }

    /// Checks references and arities; element geometry is checked when the
    /// element matrices are formed.
    pub fn validate(&self) -> Result<(), FemError> {
        let nodes = self.node_map()?;
        let mut ids = BTreeSet::new();
        for e in &self.elements {
            if !ids.insert(e.id) {
                return Err(FemError::InvalidMesh(format!("duplicate element id {}", e.id)));
            }
            if e.nodes.len() != e.kind.arity() {
                return Err(FemError::InvalidMesh(format!(
                    "element {} of kind {:?} has {} nodes",
                    e.id,
                    e.kind,
                    e.nodes.len()
                )));
            }
            if let Some(missing) = e.nodes.iter().find(|n| !nodes.contains_key(n)) {
                return Err(FemError::InvalidMesh(format!(
                    "element {} references missing node {missing}",
                    e.id
                )));
            }
            let section_ok = matches!(
                (e.kind, &e.section),
                (ElementKind::T2d2, Section::Bar { .. })
                    | (ElementKind::B21, Section::Beam(_))
                    | (ElementKind::Cpe3 | ElementKind::Cpe4, Section::Solid { .. })
            );
            if !section_ok {
                return Err(FemError::InvalidMesh(format!(
                    "element {} of kind {:?} has section {:?}",
                    e.id, e.kind, e.section
                )));
            }
        }
        Ok(())
    }

    /// All DOF labels the elements touch, in label order.
    pub fn dof_labels(&self) -> Vec<DofLabel> {
        let mut labels = BTreeSet::new();
        for e in &self.elements {
            for &n in &e.nodes {
                for d in 1..=e.kind.dofs_per_node() {
                    labels.insert(DofLabel::new(n, d));
                }
            }
        }
        labels.into_iter().collect()
    }

    /// Σ element volume (area × thickness, or length × area).
    pub fn volume(&self) -> f64 {
        let nodes = match self.node_map() {
            Ok(n) => n,
            Err(_) => return f64::NAN,
        };
        self.elements
            .iter()
            .map(|e| {
                let p: Vec<Point> = e.nodes.iter().map(|n| nodes[n]).collect();
                match e.section {
                    Section::Bar { area } => area * p[0].dist(p[1]),
                    Section::Beam(s) => s.area() * p[0].dist(p[1]),
                    Section::Solid { thickness } => thickness * polygon_area(&p),
                }
            })
            .sum()
    }
}

pub(crate) fn polygon_area(p: &[Point]) -> f64 {
    let n = p.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (p[i], p[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassFormulation {
    Consistent,
    Lumped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FemModel {
    pub mesh: Mesh,
    pub material: Material,
    pub bc: BoundarySet,
    pub mass_formulation: MassFormulation,
    pub n_all_dof: usize,
    pub n_fixed_dof: usize,
    pub n_free_dof: usize,
    /// Factor applied to SI eigenvalues for reporting (see
    /// [`REPORTING_EIGENVALUE_SCALE`]).
    pub eigenvalue_scale: f64,
    /// Generator provenance: case and chosen mesh parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub case: CaseKind,
    pub n_qubits: u32,
    pub parameters: BTreeMap<String, String>,
}

impl FemModel {
    /// Builds the DOF bookkeeping. The element/formulation pairing is not
    /// enforced here: bars take their mass formulation from `mass_formulation`,
    /// beams and continuum elements are always lumped.
    pub fn new(
        mesh: Mesh,
        material: Material,
        bc: BoundarySet,
        mass_formulation: MassFormulation,
    ) -> Result<Self, FemError> {
        material.validate()?;
        mesh.validate()?;
        let labels: BTreeSet<DofLabel> = mesh.dof_labels().into_iter().collect();
        if let Some(bad) = bc.fixed.iter().find(|l| !labels.contains(l)) {
            return Err(FemError::InvalidMesh(format!("boundary condition on absent DOF {bad}")));
        }
        let n_all_dof = labels.len();
        let n_fixed_dof = bc.len();
        Ok(Self {
            mesh,
            material,
            bc,
            mass_formulation,
            n_all_dof,
            n_fixed_dof,
            n_free_dof: n_all_dof - n_fixed_dof,
            eigenvalue_scale: 1.0,
            generator: None,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelDescriptor {
            units: UnitSystem::default(),
            model: self,
        })
        .expect("model serializes")
    }

    /// Reads a descriptor written by [`FemModel::to_json`] (or a bare model).
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        #[derive(Deserialize)]
        struct Owned {
            model: FemModel,
        }
        match serde_json::from_str::<Owned>(text) {
            Ok(d) => Ok(d.model),
            Err(_) => serde_json::from_str(text),
        }
    }
}

#[derive(Serialize)]
struct ModelDescriptor<'a> {
    units: UnitSystem,
    model: &'a FemModel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitSystem {
    pub length: String,
    pub mass: String,
    pub stress: String,
    pub eigenvalue: String,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self {
            length: "m".into(),
            mass: "kg".into(),
            stress: "Pa".into(),
            eigenvalue: "rad^2/s^2 before eigenvalue_scale".into(),
        }
    }
}

fn element_matrices(
    e: &Element,
    p: &[Point],
    mat: &Material,
    formulation: MassFormulation,
) -> Result<(nalgebra::DMatrix<f64>, nalgebra::DMatrix<f64>), FemError> {
    use nalgebra::DMatrix;
    let dense = |m: &[f64], n: usize| DMatrix::from_column_slice(n, n, m);
    match (e.kind, e.section) {
        (ElementKind::T2d2, Section::Bar { area }) => {
            let (k, m) = truss_element(p[0], p[1], area, mat)?;
            let m = match formulation {
                MassFormulation::Consistent => m,
                MassFormulation::Lumped => {
                    let rows: Vec<f64> = (0..4).map(|i| m.row(i).sum()).collect();
                    nalgebra::Matrix4::from_diagonal(&nalgebra::Vector4::from_column_slice(&rows))
                }
            };
            Ok((dense(k.as_slice(), 4), dense(m.as_slice(), 4)))
        }
        (ElementKind::B21, Section::Beam(section)) => {
            let (k, m) = beam_element(p[0].dist(p[1]), &section, mat)?;
            let k = elements::rotate_beam(&k, p[0], p[1])?;
            Ok((dense(k.as_slice(), 6), dense(m.as_slice(), 6)))
        }
        (kind @ (ElementKind::Cpe3 | ElementKind::Cpe4), Section::Solid { thickness }) => {
            plane_strain_element(kind, p, thickness, mat)
        }
        _ => Err(FemError::InvalidMesh(format!("element {} has a mismatched section", e.id))),
    }
}

/// Global K and M over every DOF of the mesh, stored as canonical lower
/// triangles. Element contributions are scattered in element order, so the
/// summation order is fixed.
pub fn assemble(model: &FemModel) -> Result<(CoordinateMatrix, CoordinateMatrix), FemError> {
    model.mesh.validate()?;
    let nodes = model.mesh.node_map()?;
    let labels = model.mesh.dof_labels();
    let mut k_trip = Vec::new();
    let mut m_trip = Vec::new();
    for e in &model.mesh.elements {
        let p: Vec<Point> = e.nodes.iter().map(|n| nodes[n]).collect();
        let (ke, me) = element_matrices(e, &p, &model.material, model.mass_formulation)
            .map_err(|source| FemError::InElement { id: e.id, source: Box::new(source) })?;
        let dpn = e.kind.dofs_per_node();
        let dofs: Vec<DofLabel> = e
            .nodes
            .iter()
            .flat_map(|&n| (1..=dpn).map(move |d| DofLabel::new(n, d)))
            .collect();
        for (a, &la) in dofs.iter().enumerate() {
            for (b, &lb) in dofs.iter().enumerate() {
                if la < lb {
                    continue;
                }
                if ke[(a, b)] != 0.0 {
                    k_trip.push((la, lb, ke[(a, b)]));
                }
                if me[(a, b)] != 0.0 {
                    m_trip.push((la, lb, me[(a, b)]));
                }
            }
        }
    }
    Ok((
        CoordinateMatrix::from_triplets_summed(labels.clone(), k_trip),
        CoordinateMatrix::from_triplets_summed(labels, m_trip),
    ))
}
