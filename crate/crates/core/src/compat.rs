//! Diagnostics for the solvability conditions the data must satisfy.
//!
//! For a solution to exist `g` must be divergence free, `chi` tangential, and on
//! every boundary surface `<g . n, rho> + <chi x n, grad rho x n> = 0` for smooth
//! `rho`. The last identity is probed with the trilinear hat function of every
//! boundary vertex. Nothing here is fatal; violations surface as warnings.

use std::collections::HashMap;

use serde::Serialize;

use crate::data::ProblemData;
use crate::error::Result;
use crate::geometry::Vec3;
use crate::mesh::Mesh;
use crate::quadrature::{cell_rule, gauss_legendre};
use crate::scalar::Real;

/// Step of the central differences used for `div g`.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Serialize)]
pub struct CompatibilityReport {
    /// Largest `|div g|` over cell quadrature points.
    pub max_divergence: f64,
    /// Largest `|chi . n|` over boundary quadrature points.
    pub max_tangency: f64,
    /// Largest `|chi - n x (chi x n)|`, the non-tangential part of `chi`.
    pub max_normal_part: f64,
    /// Largest hat-probe residual relative to the largest sum of probe term magnitudes.
    pub max_probe_residual: f64,
    pub probes: usize,
    pub warnings: Vec<String>,
}

pub fn check_compatibility<T: Real, D: ProblemData<T> + ?Sized>(
    data: &D,
    mesh: &Mesh<T>,
    q: usize,
) -> Result<CompatibilityReport> {
    let h = T::lit(FD_STEP);
    let two_h = h + h;
    let mut max_divergence = 0.0f64;
    for el in &mesh.elements {
        for &p in &cell_rule(mesh, el, q)?.points {
            let mut div = T::zero();
            for a in 0..3 {
                let e = Vec3::unit(a) * h;
                div += (data.g(p + e)[a] - data.g(p - e)[a]) / two_h;
            }
            max_divergence = max_divergence.max(div.abs().to_f64_lossy());
        }
    }

    let (nodes, weights) = gauss_legendre::<T>(q)?;
    let one = T::one();
    let mut max_tangency = 0.0f64;
    let mut max_normal_part = 0.0f64;
    // per boundary vertex: (residual, size of the terms with |g| in place of |g . n|)
    let mut probes: HashMap<usize, (T, T)> = HashMap::new();
    for face in mesh.faces.iter().filter(|f| f.is_boundary()) {
        let el = &mesh.elements[face.adjacent_elements[0]];
        let local = el.face_ids.iter().position(|&g| g == face.id).expect("face of its element");
        let n = el.outward_normals[local];
        let c = face.vertex_ids.map(|v| mesh.vertices[v]);
        for (j, &t) in nodes.iter().enumerate() {
            for (i, &s) in nodes.iter().enumerate() {
                let x = c[0] * ((one - s) * (one - t)) + c[1] * (s * (one - t)) + c[2] * (s * t) + c[3] * ((one - s) * t);
                let xs = (c[1] - c[0]) * (one - t) + (c[2] - c[3]) * t;
                let xt = (c[3] - c[0]) * (one - s) + (c[2] - c[1]) * s;
                let jac = xs.cross(xt).norm();
                let w = weights[i] * weights[j] * jac;
                let chi = data.chi(x, n);
                max_tangency = max_tangency.max(chi.dot(n).abs().to_f64_lossy());
                let tangential = n.cross(chi.cross(n));
                max_normal_part = max_normal_part.max((chi - tangential).norm().to_f64_lossy());

                // dual basis of the surface tangents
                let (g11, g12, g22) = (xs.dot(xs), xs.dot(xt), xt.dot(xt));
                let det = g11 * g22 - g12 * g12;
                let a_s = (xs * g22 - xt * g12) * (one / det);
                let a_t = (xt * g11 - xs * g12) * (one / det);
                let g = data.g(x);
                let gn = g.dot(n);
                let g_size = g.norm();
                let chin = chi.cross(n);
                let hats = [
                    ((one - s) * (one - t), -(one - t), -(one - s)),
                    (s * (one - t), one - t, -s),
                    (s * t, t, s),
                    ((one - s) * t, -t, one - s),
                ];
                for (k, &(phi, ds, dt)) in hats.iter().enumerate() {
                    let grad = a_s * ds + a_t * dt;
                    let t1 = gn * phi * w;
                    let t2 = chin.dot(grad.cross(n)) * w;
                    let e = probes.entry(face.vertex_ids[k]).or_insert((T::zero(), T::zero()));
                    e.0 += t1 + t2;
                    e.1 += g_size * phi * w + t2.abs();
                }
            }
        }
    }
    // relative to the largest probe, so probes whose terms all vanish do not turn
    // rounding noise into a large ratio
    let scale = probes.values().map(|&(_, s)| s.to_f64_lossy()).fold(0.0, f64::max);
    let max_probe_residual = if scale > 0.0 {
        probes.values().map(|&(r, _)| r.abs().to_f64_lossy() / scale).fold(0.0, f64::max)
    } else {
        0.0
    };

    let mut warnings = Vec::new();
    if max_divergence > 1e-6 {
        warnings.push(format!("g is not divergence free: |div g| up to {max_divergence:.3e}"));
    }
    if max_tangency > 1e-10 {
        warnings.push(format!("chi is not tangential: |chi . n| up to {max_tangency:.3e}"));
    }
    if max_probe_residual > 1e-6 {
        warnings.push(format!(
            "boundary data violate <g.n, rho> + <chi x n, grad rho x n> = 0: relative residual {max_probe_residual:.3e}"
        ));
    }
    Ok(CompatibilityReport {
        max_divergence,
        max_tangency,
        max_normal_part,
        max_probe_residual,
        probes: probes.len(),
        warnings,
    })
}
