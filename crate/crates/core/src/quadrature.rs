//! Tensor-product Gauss-Legendre rules on hexahedral cells and quadrilateral faces.

use crate::error::{Error, Result};
use crate::geometry::{triple_product, Vec3};
use crate::mesh::{Element, Face, Mesh};
use crate::scalar::Real;

/// Points per axis for data integrals.
pub const DEFAULT_ORDER: usize = 4;
/// Points per axis on cells touching the singular axis of the cylindrical solutions.
pub const SINGULAR_ORDER: usize = 6;

/// Mapped quadrature points with positive weights.
#[derive(Debug, Clone)]
pub struct QuadratureRule<T> {
    pub points: Vec<Vec3<T>>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn measure(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn integrate(&self, f: impl Fn(Vec3<T>) -> T) -> T {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }

    pub fn integrate_vec(&self, f: impl Fn(Vec3<T>) -> Vec3<T>) -> Vec3<T> {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| f(p) * w)
            .sum()
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre<T: Real>(q: usize) -> Result<(Vec<T>, Vec<T>)> {
    if q == 0 {
        return Err(Error::EmptyQuadrature);
    }
    let mut nodes = vec![0.0f64; q];
    let mut weights = vec![0.0f64; q];
    let m = q.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess, then Newton on P_q.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=q {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_q(x), p0 = P_{q-1}(x)
            dp = q as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[q - 1 - i] = x;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    Ok((
        nodes.iter().map(|&x| T::lit(0.5 * (x + 1.0))).collect(),
        weights.iter().map(|&w| T::lit(0.5 * w)).collect(),
    ))
}

/// Rule on the trilinear image of the unit cube with the given corners
/// (tensor-product corner order).
pub fn hexahedron_rule<T: Real>(corners: &[Vec3<T>; 8], q: usize) -> Result<QuadratureRule<T>> {
    let (nodes, weights) = gauss_legendre::<T>(q)?;
    let mut rule = QuadratureRule {
        points: Vec::with_capacity(q * q * q),
        weights: Vec::with_capacity(q * q * q),
    };
    let one = T::one();
    for (k, &t) in nodes.iter().enumerate() {
        for (j, &s) in nodes.iter().enumerate() {
            for (i, &r) in nodes.iter().enumerate() {
                let f = [[one - r, r], [one - s, s], [one - t, t]];
                let df = [-one, one];
                let mut x = Vec3::zero();
                let mut jac = [Vec3::zero(); 3];
                for (c, &p) in corners.iter().enumerate() {
                    let (a, b, d) = (c & 1, (c >> 1) & 1, (c >> 2) & 1);
                    x += p * (f[0][a] * f[1][b] * f[2][d]);
                    jac[0] += p * (df[a] * f[1][b] * f[2][d]);
                    jac[1] += p * (f[0][a] * df[b] * f[2][d]);
                    jac[2] += p * (f[0][a] * f[1][b] * df[d]);
                }
                let det = triple_product(jac[0], jac[1], jac[2]).abs();
                rule.points.push(x);
                rule.weights.push(weights[i] * weights[j] * weights[k] * det);
            }
        }
    }
    Ok(rule)
}

/// Rule on the bilinear image of the unit square spanned by a corner loop.
pub fn quadrilateral_rule<T: Real>(loop_: &[Vec3<T>; 4], q: usize) -> Result<QuadratureRule<T>> {
    let (nodes, weights) = gauss_legendre::<T>(q)?;
    let [a, b, c, d] = *loop_;
    let one = T::one();
    let mut rule = QuadratureRule {
        points: Vec::with_capacity(q * q),
        weights: Vec::with_capacity(q * q),
    };
    for (j, &t) in nodes.iter().enumerate() {
        for (i, &s) in nodes.iter().enumerate() {
            let x = a * ((one - s) * (one - t)) + b * (s * (one - t)) + c * (s * t) + d * ((one - s) * t);
            let ds = (b - a) * (one - t) + (c - d) * t;
            let dt = (d - a) * (one - s) + (c - b) * s;
            rule.points.push(x);
            rule.weights.push(weights[i] * weights[j] * ds.cross(dt).norm());
        }
    }
    Ok(rule)
}

pub fn cell_rule<T: Real>(mesh: &Mesh<T>, element: &Element<T>, q: usize) -> Result<QuadratureRule<T>> {
    hexahedron_rule(&mesh.element_corners(element), q)
}

pub fn face_rule<T: Real>(mesh: &Mesh<T>, face: &Face<T>, q: usize) -> Result<QuadratureRule<T>> {
    quadrilateral_rule(&face.vertex_ids.map(|v| mesh.vertices[v]), q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_unit_cube_mesh;
    use proptest::prelude::*;

    fn unit_cube_corners() -> [Vec3<f64>; 8] {
        std::array::from_fn(|c| Vec3::new((c & 1) as f64, ((c >> 1) & 1) as f64, ((c >> 2) & 1) as f64))
    }

    #[test]
    fn zero_points_rejected() {
        assert!(matches!(gauss_legendre::<f64>(0), Err(Error::EmptyQuadrature)));
        assert!(hexahedron_rule(&unit_cube_corners(), 0).is_err());
    }

    #[test]
    fn cell_integrals() {
        let mesh = build_unit_cube_mesh::<f64>(1).unwrap();
        let el = &mesh.elements[0];
        let r2 = cell_rule(&mesh, el, 2).unwrap();
        assert!((r2.measure() - 1.0).abs() < 1e-14);
        assert!((r2.integrate(|p| p.x * p.y * p.z) - 0.125).abs() < 1e-14);
        let pi = std::f64::consts::PI;
        let sines = |p: Vec3<f64>| (pi * p.x).sin() * (pi * p.y).sin() * (pi * p.z).sin();
        // six points leave a 2.02e-10 error, seven reach 7e-13
        let v6 = cell_rule(&mesh, el, 6).unwrap().integrate(sines);
        assert!((v6 - (2.0 / pi).powi(3)).abs() < 2.1e-10);
        let v7 = cell_rule(&mesh, el, 7).unwrap().integrate(sines);
        assert!((v7 - (2.0 / pi).powi(3)).abs() < 1e-12);
    }

    #[test]
    fn face_integrals() {
        let mesh = build_unit_cube_mesh::<f64>(1).unwrap();
        for face in &mesh.faces {
            let r = face_rule(&mesh, face, 2).unwrap();
            assert!((r.measure() - face.area).abs() < 1e-14);
        }
        // z = 0 face is the unit square in (x, y)
        let bottom = mesh
            .faces
            .iter()
            .find(|f| f.oriented_normal.z == 1.0 && f.centroid.z == 0.0)
            .unwrap();
        let r = face_rule(&mesh, bottom, 2).unwrap();
        assert!((r.integrate(|p| p.x * p.y) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn weights_positive() {
        for q in 1..12 {
            let (nodes, w) = gauss_legendre::<f64>(q).unwrap();
            assert!(w.iter().all(|&w| w > 0.0));
            assert!(nodes.iter().all(|&x| x > 0.0 && x < 1.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn exact_for_advertised_degree(
            q in 1usize..8,
            da in 0usize..16, db in 0usize..16, dc in 0usize..16,
            lo in prop::array::uniform3(-2.0f64..2.0),
            len in prop::array::uniform3(0.1f64..2.0),
        ) {
            let deg = [da, db, dc].map(|d| d % (2 * q));
            let hi = [0, 1, 2].map(|a| lo[a] + len[a]);
            let corners: [Vec3<f64>; 8] = std::array::from_fn(|c| Vec3::new(
                if c & 1 == 0 { lo[0] } else { hi[0] },
                if (c >> 1) & 1 == 0 { lo[1] } else { hi[1] },
                if (c >> 2) & 1 == 0 { lo[2] } else { hi[2] },
            ));
            let rule = hexahedron_rule(&corners, q).unwrap();
            let got = rule.integrate(|p| p.x.powi(deg[0] as i32) * p.y.powi(deg[1] as i32) * p.z.powi(deg[2] as i32));
            let exact: f64 = (0..3)
                .map(|a| (hi[a].powi(deg[a] as i32 + 1) - lo[a].powi(deg[a] as i32 + 1)) / (deg[a] + 1) as f64)
                .product();
            prop_assert!((got - exact).abs() <= 1e-11 * exact.abs().max(1.0));
        }
    }
}
