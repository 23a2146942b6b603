//! Right-hand side data of the div-curl problem.

use crate::error::Result;
use crate::geometry::Vec3;
use crate::mesh::{Element, Mesh};
use crate::permittivity::Permittivity;
use crate::quadrature::DEFAULT_ORDER;
use crate::scalar::Real;

/// Data `f = div(eps u)`, `g = curl u`, tangential trace `chi = u x n` and hole fluxes.
pub trait ProblemData<T: Real>: Sync {
    fn f(&self, x: Vec3<T>) -> T;

    fn g(&self, x: Vec3<T>) -> Vec3<T>;

    /// Tangential boundary value at `x` on a face with outward unit normal `n`.
    fn chi(&self, x: Vec3<T>, n: Vec3<T>) -> Vec3<T>;

    /// Gauss points per axis used on `element` (cells and their faces).
    fn quadrature_order(&self, _mesh: &Mesh<T>, _element: &Element<T>) -> usize {
        DEFAULT_ORDER
    }

    /// Flux `<eps u . n, 1>` through each hole surface, in boundary-component order
    /// (component 1 first). Normals point out of the domain.
    fn hole_fluxes(&self, mesh: &Mesh<T>, _eps: &Permittivity<T>) -> Result<Vec<T>> {
        Ok(vec![T::zero(); mesh.num_holes()])
    }
}

/// Homogeneous data.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroData;

impl<T: Real> ProblemData<T> for ZeroData {
    fn f(&self, _x: Vec3<T>) -> T {
        T::zero()
    }

    fn g(&self, _x: Vec3<T>) -> Vec3<T> {
        Vec3::zero()
    }

    fn chi(&self, _x: Vec3<T>, _n: Vec3<T>) -> Vec3<T> {
        Vec3::zero()
    }

    fn quadrature_order(&self, _mesh: &Mesh<T>, _element: &Element<T>) -> usize {
        1
    }
}
