//! Element stiffness and mass matrices.
//!
//! DOF order inside every element is node-major: `(u1, u2)` per node for the
//! bar and continuum elements, `(u1, u2, θ)` per node for the beam.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Matrix4, Matrix6, SMatrix};

use super::{ElementKind, FemError, Material, Point};

/// Cross-section of a 2-node Timoshenko beam with circular section.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BeamSection {
    pub radius: f64,
    /// Shear correction factor κ, shear area is κA.
    pub shear_factor: f64,
    /// Rotational lumped inertia per node is `ρAL/2 · L²/rotary_divisor`.
    pub rotary_divisor: f64,
}

impl BeamSection {
    pub const DEFAULT_SHEAR_FACTOR: f64 = 0.9;
    pub const DEFAULT_ROTARY_DIVISOR: f64 = 24.0;

    pub fn circular(radius: f64) -> Self {
        Self {
            radius,
            shear_factor: Self::DEFAULT_SHEAR_FACTOR,
            rotary_divisor: Self::DEFAULT_ROTARY_DIVISOR,
        }
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn second_moment(&self) -> f64 {
        PI * self.radius.powi(4) / 4.0
    }
}

fn direction(a: Point, b: Point) -> Result<(f64, f64, f64), FemError> {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let length = dx.hypot(dy);
    if !(length > 0.0) {
        return Err(FemError::ZeroLengthElement);
    }
    Ok((length, dx / length, dy / length))
}

/// 2-node bar: stiffness `EA/L` along the axis and consistent mass
/// `ρAL/6·[[2,1],[1,2]]` in each global direction.
pub fn truss_element(
    a: Point,
    b: Point,
    area: f64,
    mat: &Material,
) -> Result<(Matrix4<f64>, Matrix4<f64>), FemError> {
    if !(area > 0.0) {
        return Err(FemError::InvalidSection(format!("bar area {area} must be positive")));
    }
    let (length, c, s) = direction(a, b)?;
    let ka = mat.youngs_modulus * area / length;
    let axis = [c, s, -c, -s];
    let k = Matrix4::from_fn(|i, j| ka * axis[i] * axis[j]);

    let m0 = mat.density * area * length / 6.0;
    let mut m = Matrix4::zeros();
    for d in 0..2 {
        m[(d, d)] = 2.0 * m0;
        m[(d + 2, d + 2)] = 2.0 * m0;
        m[(d, d + 2)] = m0;
        m[(d + 2, d)] = m0;
    }
    Ok((k, m))
}

/// Local Timoshenko beam matrices for an element lying along +x.
pub fn beam_element(
    length: f64,
    section: &BeamSection,
    mat: &Material,
) -> Result<(Matrix6<f64>, Matrix6<f64>), FemError> {
    if !(length > 0.0) {
        return Err(FemError::ZeroLengthElement);
    }
    if !(section.radius > 0.0) {
        return Err(FemError::InvalidSection(format!(
            "beam radius {} must be positive",
            section.radius
        )));
    }
    if !(section.shear_factor > 0.0 && section.shear_factor <= 1.0) {
        return Err(FemError::InvalidSection(format!(
            "shear factor {} outside (0, 1]",
            section.shear_factor
        )));
    }
    if !(section.rotary_divisor > 0.0) {
        return Err(FemError::InvalidSection(format!(
            "rotary inertia divisor {} must be positive",
            section.rotary_divisor
        )));
    }
    let (e, g) = (mat.youngs_modulus, mat.shear_modulus());
    let (a, i) = (section.area(), section.second_moment());
    let l = length;
    let phi = 12.0 * e * i / (section.shear_factor * g * a * l * l);
    let kb = e * i / ((1.0 + phi) * l.powi(3));
    let ka = e * a / l;

    let mut k = Matrix6::zeros();
    k[(0, 0)] = ka;
    k[(3, 3)] = ka;
    k[(0, 3)] = -ka;
    k[(3, 0)] = -ka;
    // bending block over (u2a, θa, u2b, θb)
    let bend = [
        [12.0, 6.0 * l, -12.0, 6.0 * l],
        [6.0 * l, (4.0 + phi) * l * l, -6.0 * l, (2.0 - phi) * l * l],
        [-12.0, -6.0 * l, 12.0, -6.0 * l],
        [6.0 * l, (2.0 - phi) * l * l, -6.0 * l, (4.0 + phi) * l * l],
    ];
    let idx = [1, 2, 4, 5];
    for (r, &gr) in idx.iter().enumerate() {
        for (c, &gc) in idx.iter().enumerate() {
            k[(gr, gc)] = kb * bend[r][c];
        }
    }

    let mt = mat.density * a * l / 2.0;
    let mr = mt * l * l / section.rotary_divisor;
    let m = Matrix6::from_diagonal(&[mt, mt, mr, mt, mt, mr].into());
    Ok((k, m))
}

/// Rotates local beam matrices onto the element axis from `a` to `b`.
pub(crate) fn rotate_beam(k: &Matrix6<f64>, a: Point, b: Point) -> Result<Matrix6<f64>, FemError> {
    let (_, c, s) = direction(a, b)?;
    let r = Matrix3::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0);
    let mut t = Matrix6::zeros();
    t.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
    t.fixed_view_mut::<3, 3>(3, 3).copy_from(&r);
    Ok(t.transpose() * k * t)
}

/// Plane-strain elasticity matrix over `(ε_xx, ε_yy, γ_xy)`.
pub fn plane_strain_d(mat: &Material) -> Matrix3<f64> {
    let (e, nu) = (mat.youngs_modulus, mat.poisson_ratio);
    let f = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
    Matrix3::new(
        f * (1.0 - nu),
        f * nu,
        0.0,
        f * nu,
        f * (1.0 - nu),
        0.0,
        0.0,
        0.0,
        f * (1.0 - 2.0 * nu) / 2.0,
    )
}

const GAUSS_2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

/// Linear triangle (CPE3) or bilinear quadrilateral (CPE4) in plane strain.
/// Nodes must be ordered counter-clockwise. The mass matrix is the row-sum
/// lumped (diagonal) form.
pub fn plane_strain_element(
    kind: ElementKind,
    coords: &[Point],
    thickness: f64,
    mat: &Material,
) -> Result<(DMatrix<f64>, DMatrix<f64>), FemError> {
    if !(thickness > 0.0) {
        return Err(FemError::InvalidSection(format!(
            "thickness {thickness} must be positive"
        )));
    }
    if coords.len() != kind.arity() {
        return Err(FemError::InvalidMesh(format!(
            "{kind:?} needs {} nodes, got {}",
            kind.arity(),
            coords.len()
        )));
    }
    let d = plane_strain_d(mat);
    match kind {
        ElementKind::Cpe3 => Ok(cpe3(coords, thickness, mat.density, &d)?),
        ElementKind::Cpe4 => Ok(cpe4(coords, thickness, mat.density, &d)?),
        other => Err(FemError::InvalidMesh(format!(
            "{other:?} is not a plane-strain element"
        ))),
    }
}

fn cpe3(
    p: &[Point],
    t: f64,
    rho: f64,
    d: &Matrix3<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>), FemError> {
    let det = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    if !(det > 0.0) {
        return Err(FemError::DegenerateElement);
    }
    let area = det / 2.0;
    let b = [p[1].y - p[2].y, p[2].y - p[0].y, p[0].y - p[1].y];
    let c = [p[2].x - p[1].x, p[0].x - p[2].x, p[1].x - p[0].x];
    let mut bm = SMatrix::<f64, 3, 6>::zeros();
    for i in 0..3 {
        bm[(0, 2 * i)] = b[i] / det;
        bm[(1, 2 * i + 1)] = c[i] / det;
        bm[(2, 2 * i)] = c[i] / det;
        bm[(2, 2 * i + 1)] = b[i] / det;
    }
    let k = bm.transpose() * d * bm * (area * t);
    let m = DMatrix::from_diagonal_element(6, 6, rho * t * area / 3.0);
    Ok((DMatrix::from_column_slice(6, 6, k.as_slice()), m))
}

fn cpe4(
    p: &[Point],
    t: f64,
    rho: f64,
    d: &Matrix3<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>), FemError> {
    const XI: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
    const ETA: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];
    let mut k = SMatrix::<f64, 8, 8>::zeros();
    let mut lumped = [0.0f64; 4];
    for &xi in &GAUSS_2 {
        for &eta in &GAUSS_2 {
            let mut n = [0.0; 4];
            let mut dn_dxi = [0.0; 4];
            let mut dn_deta = [0.0; 4];
            for a in 0..4 {
                n[a] = 0.25 * (1.0 + XI[a] * xi) * (1.0 + ETA[a] * eta);
                dn_dxi[a] = 0.25 * XI[a] * (1.0 + ETA[a] * eta);
                dn_deta[a] = 0.25 * ETA[a] * (1.0 + XI[a] * xi);
            }
            let (mut j11, mut j12, mut j21, mut j22) = (0.0, 0.0, 0.0, 0.0);
            for a in 0..4 {
                j11 += dn_dxi[a] * p[a].x;
                j12 += dn_dxi[a] * p[a].y;
                j21 += dn_deta[a] * p[a].x;
                j22 += dn_deta[a] * p[a].y;
            }
            let det = j11 * j22 - j12 * j21;
            if !(det > 0.0) {
                return Err(FemError::DegenerateElement);
            }
            let mut bm = SMatrix::<f64, 3, 8>::zeros();
            for a in 0..4 {
                let dx = (j22 * dn_dxi[a] - j12 * dn_deta[a]) / det;
                let dy = (-j21 * dn_dxi[a] + j11 * dn_deta[a]) / det;
                bm[(0, 2 * a)] = dx;
                bm[(1, 2 * a + 1)] = dy;
                bm[(2, 2 * a)] = dy;
                bm[(2, 2 * a + 1)] = dx;
            }
            k += bm.transpose() * d * bm * (det * t);
            for a in 0..4 {
                lumped[a] += rho * t * n[a] * det;
            }
        }
    }
    let mut m = DMatrix::zeros(8, 8);
    for a in 0..4 {
        m[(2 * a, 2 * a)] = lumped[a];
        m[(2 * a + 1, 2 * a + 1)] = lumped[a];
    }
    Ok((DMatrix::from_column_slice(8, 8, k.as_slice()), m))
}
