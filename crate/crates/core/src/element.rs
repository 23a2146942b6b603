//! Element stiffness matrix and load vector of the lowest-order scheme on a hexahedron.
//!
//! Local unknowns are ordered
//! `[lambda0 | lambda_b (6) | q0 (3) | q_b (2 per face) | s0 | s_b (6) | u (3)]`,
//! with the face-tangential coefficient `q_b^k` on local face `i` at `QB + k*6 + i`.

use crate::data::ProblemData;
use crate::error::{Error, Result};
use crate::geometry::{Mat3, Vec3};
use crate::mesh::{Element, Mesh, FACES_PER_ELEMENT};
use crate::quadrature::{cell_rule, face_rule};
use crate::scalar::Real;
use crate::weak::TangentialBasis;

const N: usize = FACES_PER_ELEMENT;

pub const LAMBDA0: usize = 0;
pub const LAMBDA_B: usize = 1;
pub const Q0: usize = LAMBDA_B + N;
pub const QB: usize = Q0 + 3;
pub const S0: usize = QB + 2 * N;
pub const SB: usize = S0 + 1;
pub const U: usize = SB + N;
/// `2 + 2N + 2d + N(d-1)` for `N = 6`, `d = 3`.
pub const LOCAL_DOFS: usize = U + 3;

/// Position of `q_b^k` on local face `i`.
pub const fn qb(i: usize, k: usize) -> usize {
    QB + k * N + i
}

pub type LocalMatrix<T> = [[T; LOCAL_DOFS]; LOCAL_DOFS];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizationWeights<T> {
    pub rho1: T,
    pub rho2: T,
    pub rho3: T,
}

impl<T: Real> Default for StabilizationWeights<T> {
    fn default() -> Self {
        Self {
            rho1: T::one(),
            rho2: T::one(),
            rho3: T::one(),
        }
    }
}

impl<T: Real> StabilizationWeights<T> {
    pub fn new(rho1: T, rho2: T, rho3: T) -> Result<Self> {
        for (name, v) in [("rho1", rho1), ("rho2", rho2), ("rho3", rho3)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { rho1, rho2, rho3 })
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            rho1: self.rho1 * c,
            rho2: self.rho2 * c,
            rho3: self.rho3 * c,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ElementSystem<T> {
    pub matrix: LocalMatrix<T>,
    pub load: [T; LOCAL_DOFS],
}

fn check_geometry<T: Real>(element: &Element<T>, mesh_faces: &[crate::mesh::Face<T>]) -> Result<()> {
    if !(element.volume > T::zero()) || !(element.diameter > T::zero()) {
        return Err(Error::DegenerateGeometry(format!(
            "element {} has volume {} and diameter {}",
            element.id, element.volume, element.diameter
        )));
    }
    for &f in &element.face_ids {
        if !(mesh_faces[f].area > T::zero()) {
            return Err(Error::DegenerateGeometry(format!("face {f} has zero area")));
        }
    }
    Ok(())
}

/// Symmetric element matrix of `S1 + B_h` (test side) and `-S2 + B_h` (trial side).
pub fn element_matrix<T: Real>(
    element: &Element<T>,
    faces: &[crate::mesh::Face<T>],
    bases: &[TangentialBasis<T>],
    eps: &Mat3<T>,
    rho: &StabilizationWeights<T>,
) -> Result<LocalMatrix<T>> {
    check_geometry(element, faces)?;
    let mut m = [[T::zero(); LOCAL_DOFS]; LOCAL_DOFS];
    let inv_h = T::one() / element.diameter;
    let mut put = |r: usize, c: usize, v: T| {
        m[r][c] += v;
        if r != c {
            m[c][r] += v;
        }
    };
    for i in 0..N {
        let face = &faces[element.face_ids[i]];
        let area = face.area;
        let n = element.outward_normals[i];
        let bn = bases[face.id].crossed(n);
        let en = [0, 1, 2].map(|j| Vec3::<T>::unit(j).cross(n));
        let eps_n = eps.mul_vec(n);

        // rho1: lambda jumps
        let w1 = rho.rho1 * inv_h * area;
        put(LAMBDA0, LAMBDA0, w1);
        put(LAMBDA0, LAMBDA_B + i, -w1);
        put(LAMBDA_B + i, LAMBDA_B + i, w1);

        // rho2: tangential q jumps
        let w2 = rho.rho2 * inv_h * area;
        for j in 0..3 {
            for k in j..3 {
                put(Q0 + j, Q0 + k, w2 * en[j].dot(en[k]));
            }
            for k in 0..2 {
                put(Q0 + j, qb(i, k), -w2 * bn[k].dot(en[j]));
            }
        }
        for k in 0..2 {
            for j in k..2 {
                put(qb(i, k), qb(i, j), w2 * bn[k].dot(bn[j]));
            }
        }

        // rho3: s jumps, entering with a minus sign
        let w3 = rho.rho3 * inv_h * area;
        put(S0, S0, -w3);
        put(S0, SB + i, w3);
        put(SB + i, SB + i, -w3);

        // B_h couplings
        for j in 0..3 {
            put(LAMBDA_B + i, U + j, eps_n[j] * area);
            put(Q0 + j, SB + i, n[j] * area);
            for k in 0..2 {
                put(qb(i, k), U + j, -bn[k][j] * area);
            }
        }
    }
    Ok(m)
}

/// Element load `[-(f,1) | 0 | (g,e^j) | <chi,e^k_b> | 0 | 0 | 0]`.
///
/// `chi` enters only on boundary faces; hole fluxes are added globally.
pub fn element_load<T: Real, D: ProblemData<T> + ?Sized>(
    mesh: &Mesh<T>,
    element: &Element<T>,
    bases: &[TangentialBasis<T>],
    data: &D,
) -> Result<[T; LOCAL_DOFS]> {
    let q = data.quadrature_order(mesh, element);
    let mut load = [T::zero(); LOCAL_DOFS];
    let cell = cell_rule(mesh, element, q)?;
    load[LAMBDA0] = -cell.integrate(|x| data.f(x));
    let g = cell.integrate_vec(|x| data.g(x));
    for j in 0..3 {
        load[Q0 + j] = g[j];
    }
    for (i, &fid) in element.face_ids.iter().enumerate() {
        let face = &mesh.faces[fid];
        if !face.is_boundary() {
            continue;
        }
        let n = element.outward_normals[i];
        let chi = face_rule(mesh, face, q)?.integrate_vec(|x| data.chi(x, n));
        for k in 0..2 {
            load[qb(i, k)] = chi.dot(bases[fid].get(k));
        }
    }
    if let Some(slot) = load.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData(format!(
            "load entry {slot} on element {} is {}",
            element.id, load[slot]
        )));
    }
    Ok(load)
}

pub fn element_system<T: Real, D: ProblemData<T> + ?Sized>(
    mesh: &Mesh<T>,
    element: &Element<T>,
    bases: &[TangentialBasis<T>],
    eps: &Mat3<T>,
    rho: &StabilizationWeights<T>,
    data: &D,
) -> Result<ElementSystem<T>> {
    Ok(ElementSystem {
        matrix: element_matrix(element, &mesh.faces, bases, eps, rho)?,
        load: element_load(mesh, element, bases, data)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ZeroData;
    use crate::mesh::{build_unit_cube_mesh, Mesh};
    use crate::weak::face_bases;

    fn single() -> (Mesh<f64>, Vec<TangentialBasis<f64>>) {
        let mesh = build_unit_cube_mesh::<f64>(1).unwrap();
        let bases = face_bases(&mesh.faces).unwrap();
        (mesh, bases)
    }

    fn matrix(mesh: &Mesh<f64>, bases: &[TangentialBasis<f64>], rho: StabilizationWeights<f64>) -> LocalMatrix<f64> {
        element_matrix(&mesh.elements[0], &mesh.faces, bases, &Mat3::identity(), &rho).unwrap()
    }

    #[test]
    fn layout_has_32_slots() {
        assert_eq!(LOCAL_DOFS, 32);
        assert_eq!(qb(5, 1), S0 - 1);
    }

    #[test]
    fn unit_cube_entries() {
        let (mesh, bases) = single();
        let m = matrix(&mesh, &bases, StabilizationWeights::default());
        let s3 = 3f64.sqrt();
        assert!((m[LAMBDA0][LAMBDA0] - 6.0 / s3).abs() < 1e-14);
        for i in 0..N {
            assert!((m[LAMBDA0][LAMBDA_B + i] + 1.0 / s3).abs() < 1e-14);
            assert!((m[LAMBDA_B + i][LAMBDA_B + i] - 1.0 / s3).abs() < 1e-14);
            for j in 0..3 {
                let g = m[Q0 + j][SB + i];
                assert!(g == 0.0 || g.abs() == 1.0);
                // eps = I: D matches the pattern of G
                assert_eq!(m[LAMBDA_B + i][U + j], g);
            }
        }
        for r in 0..LOCAL_DOFS {
            for c in 0..LOCAL_DOFS {
                assert_eq!(m[r][c], m[c][r]);
            }
        }
    }

    #[test]
    fn rho_scales_only_stabilizers() {
        let (mesh, bases) = single();
        let base = StabilizationWeights::new(0.7, 1.3, 2.1).unwrap();
        let m1 = matrix(&mesh, &bases, base);
        let m2 = matrix(&mesh, &bases, base.scaled(3.0));
        // B_h blocks pair lambda with u, q with s, and q with u.
        let group = |x: usize| match x {
            x if x < Q0 => 'l',
            x if x < S0 => 'q',
            x if x < U => 's',
            _ => 'u',
        };
        let coupling = |r: usize, c: usize| {
            let mut pair = [group(r), group(c)];
            pair.sort();
            matches!(pair, ['l', 'u'] | ['q', 's'] | ['q', 'u'])
        };
        for r in 0..LOCAL_DOFS {
            for c in 0..LOCAL_DOFS {
                let expected = if coupling(r, c) { m1[r][c] } else { 3.0 * m1[r][c] };
                assert!((m2[r][c] - expected).abs() < 1e-13, "({r},{c})");
            }
        }
    }

    #[test]
    fn zero_and_unit_loads() {
        let (mesh, bases) = single();
        let el = &mesh.elements[0];
        let load = element_load(&mesh, el, &bases, &ZeroData).unwrap();
        assert!(load.iter().all(|&v| v == 0.0));

        struct UnitSource;
        impl ProblemData<f64> for UnitSource {
            fn f(&self, _x: Vec3<f64>) -> f64 {
                1.0
            }
            fn g(&self, _x: Vec3<f64>) -> Vec3<f64> {
                Vec3::zero()
            }
            fn chi(&self, _x: Vec3<f64>, _n: Vec3<f64>) -> Vec3<f64> {
                Vec3::zero()
            }
        }
        let load = element_load(&mesh, el, &bases, &UnitSource).unwrap();
        assert!((load[LAMBDA0] + 1.0).abs() < 1e-14);
        assert!(load[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn nan_data_rejected() {
        let (mesh, bases) = single();
        struct Bad;
        impl ProblemData<f64> for Bad {
            fn f(&self, _x: Vec3<f64>) -> f64 {
                f64::NAN
            }
            fn g(&self, _x: Vec3<f64>) -> Vec3<f64> {
                Vec3::zero()
            }
            fn chi(&self, _x: Vec3<f64>, _n: Vec3<f64>) -> Vec3<f64> {
                Vec3::zero()
            }
        }
        assert!(matches!(
            element_load(&mesh, &mesh.elements[0], &bases, &Bad),
            Err(Error::NonFiniteData(_))
        ));
    }

    #[test]
    fn invalid_weights_rejected() {
        assert!(StabilizationWeights::new(1.0, 0.0, 1.0).is_err());
        assert!(StabilizationWeights::new(1.0, 1.0, f64::NAN).is_err());
    }
}
