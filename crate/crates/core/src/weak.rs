//! Face tangent frames and the closed-form lowest-order weak gradient and weak curl.
//!
//! With piecewise constant test fields the defining identities
//! `(grad_w v, phi)_T = -(v_0, div phi)_T + <v_b, phi . n>_dT` and
//! `(curl_w v, phi)_T = (v_0, curl phi)_T - <v_b x n, phi>_dT`
//! lose their volume terms, so every basis function of a face contributes a
//! constant vector scaled by `|sigma| / |T|`.

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::mesh::{Element, Face, FACES_PER_ELEMENT};
use crate::scalar::Real;

/// Orthonormal tangent pair of a face, built from its fixed orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentialBasis<T> {
    pub e1: Vec3<T>,
    pub e2: Vec3<T>,
}

impl<T: Real> TangentialBasis<T> {
    pub fn get(&self, k: usize) -> Vec3<T> {
        match k {
            0 => self.e1,
            1 => self.e2,
            _ => panic!("tangent index {k} out of range"),
        }
    }

    /// `e^k x n` for the outward normal `n` of one adjacent element.
    pub fn crossed(&self, outward: Vec3<T>) -> [Vec3<T>; 2] {
        [self.e1.cross(outward), self.e2.cross(outward)]
    }
}

/// Tangent frame `v1 = r x n`, `v2 = (r x n) x n`, normalized.
///
/// `r` is the coordinate axis least aligned with `n` (first such axis on ties),
/// so it is never parallel to the normal.
pub fn tangential_basis<T: Real>(oriented_normal: Vec3<T>) -> Result<TangentialBasis<T>> {
    let len = oriented_normal.norm();
    if !(len > T::zero()) || !len.is_finite() {
        return Err(Error::ZeroNormal);
    }
    let n = oriented_normal * (T::one() / len);
    let mut axis = 0;
    for a in 1..3 {
        if n[a].abs() < n[axis].abs() {
            axis = a;
        }
    }
    let r = Vec3::unit(axis);
    let v1 = r.cross(n);
    let v2 = v1.cross(n);
    Ok(TangentialBasis {
        e1: v1.normalized(),
        e2: v2.normalized(),
    })
}

/// One tangential basis per mesh face.
pub fn face_bases<T: Real>(faces: &[Face<T>]) -> Result<Vec<TangentialBasis<T>>> {
    faces.iter().map(|f| tangential_basis(f.oriented_normal)).collect()
}

/// Weak gradient and weak curl of every local lowest-order basis function on an element.
#[derive(Debug, Clone)]
pub struct WeakOperatorTable<T> {
    /// `grad_w {0, 1_{b,i}} = |sigma_i| n_i / |T|`
    pub grad_face: [Vec3<T>; FACES_PER_ELEMENT],
    /// `curl_w {0, e^k_{b,i}} = -(e^k_{b,i} x n_i) |sigma_i| / |T|`
    pub curl_face: [[Vec3<T>; 2]; FACES_PER_ELEMENT],
    /// `grad_w {1, 0}`, always zero.
    pub grad_cell: Vec3<T>,
    /// `curl_w {e^j, 0}` per axis, always zero.
    pub curl_cell: [Vec3<T>; 3],
}

impl<T: Real> WeakOperatorTable<T> {
    /// Weak gradient of `{v0, vb}` with face values `vb[i]`.
    pub fn gradient(&self, v0: T, vb: &[T; FACES_PER_ELEMENT]) -> Vec3<T> {
        self.grad_cell * v0
            + self
                .grad_face
                .iter()
                .zip(vb)
                .map(|(&g, &v)| g * v)
                .sum::<Vec3<T>>()
    }

    /// Weak curl of `{v0, vb}` with tangential face coefficients `vb[i][k]`.
    pub fn curl(&self, v0: Vec3<T>, vb: &[[T; 2]; FACES_PER_ELEMENT]) -> Vec3<T> {
        let cell: Vec3<T> = (0..3).map(|j| self.curl_cell[j] * v0[j]).sum();
        cell + self
            .curl_face
            .iter()
            .zip(vb)
            .map(|(c, v)| c[0] * v[0] + c[1] * v[1])
            .sum::<Vec3<T>>()
    }
}

pub fn weak_operator_table<T: Real>(
    element: &Element<T>,
    faces: &[Face<T>],
    bases: &[TangentialBasis<T>],
) -> WeakOperatorTable<T> {
    let inv_vol = T::one() / element.volume;
    let mut grad_face = [Vec3::zero(); FACES_PER_ELEMENT];
    let mut curl_face = [[Vec3::zero(); 2]; FACES_PER_ELEMENT];
    for (i, &f) in element.face_ids.iter().enumerate() {
        let n = element.outward_normals[i];
        let scale = faces[f].area * inv_vol;
        grad_face[i] = n * scale;
        let bn = bases[f].crossed(n);
        curl_face[i] = [-bn[0] * scale, -bn[1] * scale];
    }
    WeakOperatorTable {
        grad_face,
        curl_face,
        grad_cell: Vec3::zero(),
        curl_cell: [Vec3::zero(); 3],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_unit_cube_mesh;

    #[test]
    fn basis_for_z_normal() {
        let b = tangential_basis(Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(b.e1, Vec3::new(0.0, -1.0, 0.0));
        assert_eq!(b.e2, Vec3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn zero_normal_rejected() {
        assert!(matches!(
            tangential_basis(Vec3::<f64>::zero()),
            Err(Error::ZeroNormal)
        ));
    }

    #[test]
    fn unit_cube_gradient_of_right_face() {
        let mesh = build_unit_cube_mesh::<f64>(1).unwrap();
        let el = &mesh.elements[0];
        let bases = face_bases(&mesh.faces).unwrap();
        let table = weak_operator_table(el, &mesh.faces, &bases);
        // local face 1 is x = 1
        assert_eq!(table.grad_face[1], Vec3::new(1.0, 0.0, 0.0));
        let constant = table.gradient(3.5, &[3.5; 6]);
        assert!(constant.max_abs() < 1e-14);
    }
}
