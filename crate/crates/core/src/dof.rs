//! Global numbering of the discrete unknowns and assembly of the saddle-point system.
//!
//! Element unknowns `[lambda0, q0 (3), s0, u (3)]` come first in element order, then
//! per face `[s_b, q_b (2)]` followed by `lambda_b` on interior faces. Exterior
//! boundary faces carry no `lambda_b`; every hole surface shares one `lambda_b`
//! unknown, numbered after the faces. The last unknown is the multiplier of the
//! mean-value constraint `sum_T |T| s0_T = 0`.

use rayon::prelude::*;

use crate::data::ProblemData;
use crate::element::{self, element_system, ElementSystem, StabilizationWeights, LOCAL_DOFS};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::permittivity::Permittivity;
use crate::scalar::Real;
use crate::sparse::CsrMatrix;
use crate::weak::face_bases;

/// `lambda0`, `q0`, `s0` and `u` on every element.
pub const DOFS_PER_ELEMENT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElementDofs {
    pub lambda0: usize,
    pub q0: [usize; 3],
    pub s0: usize,
    pub u: [usize; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceDofs {
    pub sb: usize,
    pub qb: [usize; 2],
    /// `None` on the exterior boundary, where `lambda_b` vanishes.
    pub lambda_b: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    pub elements: Vec<ElementDofs>,
    pub faces: Vec<FaceDofs>,
    /// Shared `lambda_b` unknown of hole surface `i + 1`.
    pub hole_lambda: Vec<usize>,
    pub mean_multiplier: usize,
    pub total_dofs: usize,
}

impl DofMap {
    /// Global index of every local slot of an element, `None` where eliminated.
    pub fn local_to_global<T>(&self, mesh: &Mesh<T>, element: usize) -> [Option<usize>; LOCAL_DOFS] {
        let el = &mesh.elements[element];
        let ed = &self.elements[element];
        let mut map = [None; LOCAL_DOFS];
        map[element::LAMBDA0] = Some(ed.lambda0);
        map[element::S0] = Some(ed.s0);
        for j in 0..3 {
            map[element::Q0 + j] = Some(ed.q0[j]);
            map[element::U + j] = Some(ed.u[j]);
        }
        for (i, &f) in el.face_ids.iter().enumerate() {
            let fd = &self.faces[f];
            map[element::LAMBDA_B + i] = fd.lambda_b;
            map[element::SB + i] = Some(fd.sb);
            for k in 0..2 {
                map[element::qb(i, k)] = Some(fd.qb[k]);
            }
        }
        map
    }

    /// Bound `2 N_T + 2 N_sigma + 2 d N_T + N_sigma (d - 1)` on the unknowns of the
    /// unconstrained spaces, plus the mean-value multiplier.
    pub fn dof_bound<T: Real>(mesh: &Mesh<T>) -> usize {
        let (nt, ns) = (mesh.num_elements(), mesh.num_faces());
        2 * nt + 2 * ns + 6 * nt + 2 * ns + 1
    }

    /// Expected pivot sign of every unknown: `+1` for `lambda`, `q` and the mean
    /// multiplier, `-1` for `s` and `u`. With these signs the regularized system
    /// is quasi-definite.
    pub fn pivot_signs(&self) -> Vec<i8> {
        let mut signs = vec![1i8; self.total_dofs];
        for e in &self.elements {
            signs[e.s0] = -1;
            for g in e.u {
                signs[g] = -1;
            }
        }
        for f in &self.faces {
            signs[f.sb] = -1;
        }
        signs
    }
}

pub fn build_dof_map<T: Real>(mesh: &Mesh<T>) -> DofMap {
    let mut next = 0;
    let mut take = || {
        next += 1;
        next - 1
    };
    let elements = mesh
        .elements
        .iter()
        .map(|_| ElementDofs {
            lambda0: take(),
            q0: [take(), take(), take()],
            s0: take(),
            u: [take(), take(), take()],
        })
        .collect();
    let mut faces: Vec<FaceDofs> = mesh
        .faces
        .iter()
        .map(|f| FaceDofs {
            sb: take(),
            qb: [take(), take()],
            lambda_b: if f.is_boundary() { None } else { Some(take()) },
        })
        .collect();
    let hole_lambda: Vec<usize> = (0..mesh.num_holes()).map(|_| take()).collect();
    for (c, ids) in mesh.boundary_components.iter().enumerate().skip(1) {
        for &f in ids {
            faces[f].lambda_b = Some(hole_lambda[c - 1]);
        }
    }
    let mean_multiplier = take();
    DofMap {
        elements,
        faces,
        hole_lambda,
        mean_multiplier,
        total_dofs: next,
    }
}

#[derive(Debug, Clone)]
pub struct GlobalSystem<T> {
    pub matrix: CsrMatrix<T>,
    pub rhs: Vec<T>,
    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub asymmetry: T,
    /// See [`DofMap::pivot_signs`].
    pub pivot_signs: Vec<i8>,
}

/// Computes every element system (in parallel) and scatters them in element order.
pub fn assemble<T: Real, D: ProblemData<T> + ?Sized>(
    mesh: &Mesh<T>,
    dofs: &DofMap,
    eps: &Permittivity<T>,
    rho: &StabilizationWeights<T>,
    data: &D,
) -> Result<GlobalSystem<T>> {
    if dofs.elements.len() != mesh.num_elements() || dofs.faces.len() != mesh.num_faces() {
        return Err(Error::DofMismatch(format!(
            "dof map covers {} elements and {} faces, mesh has {} and {}",
            dofs.elements.len(),
            dofs.faces.len(),
            mesh.num_elements(),
            mesh.num_faces()
        )));
    }
    if dofs.hole_lambda.len() != mesh.num_holes() {
        return Err(Error::DofMismatch("hole count differs from dof map".into()));
    }
    if eps.len() != mesh.num_elements() {
        return Err(Error::DofMismatch(format!(
            "permittivity has {} cells, mesh has {}",
            eps.len(),
            mesh.num_elements()
        )));
    }
    let bases = face_bases(&mesh.faces)?;
    let systems: Vec<ElementSystem<T>> = mesh
        .elements
        .par_iter()
        .map(|el| element_system(mesh, el, &bases, eps.on(el.id), rho, data))
        .collect::<Result<_>>()?;

    let n = dofs.total_dofs;
    let mut rhs = vec![T::zero(); n];
    let mut triplets = Vec::with_capacity(mesh.num_elements() * 400 + 2 * mesh.num_elements());
    for (el, sys) in mesh.elements.iter().zip(&systems) {
        let map = dofs.local_to_global(mesh, el.id);
        for (a, ga) in map.iter().enumerate() {
            let Some(ga) = *ga else { continue };
            rhs[ga] += sys.load[a];
            for (b, gb) in map.iter().enumerate() {
                if let Some(gb) = *gb {
                    let v = sys.matrix[a][b];
                    if v != T::zero() {
                        triplets.push((ga, gb, v));
                    }
                }
            }
        }
        let s0 = dofs.elements[el.id].s0;
        triplets.push((dofs.mean_multiplier, s0, el.volume));
        triplets.push((s0, dofs.mean_multiplier, el.volume));
    }
    for (alpha, &g) in data.hole_fluxes(mesh, eps)?.into_iter().zip(&dofs.hole_lambda) {
        rhs[g] += alpha;
    }
    if let Some(i) = rhs.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData(format!("right-hand side entry {i}")));
    }
    let matrix = CsrMatrix::from_triplets(n, n, triplets)?;
    let asymmetry = matrix.asymmetry();
    Ok(GlobalSystem {
        matrix,
        rhs,
        asymmetry,
        pivot_signs: dofs.pivot_signs(),
    })
}

/// Per-element `u` values from a global solution vector.
pub fn extract_u<T: Real>(dofs: &DofMap, solution: &[T]) -> Vec<crate::geometry::Vec3<T>> {
    dofs.elements
        .iter()
        .map(|e| crate::geometry::Vec3::new(solution[e.u[0]], solution[e.u[1]], solution[e.u[2]]))
        .collect()
}
