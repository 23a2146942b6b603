//! Exact solutions of the convergence studies and the data they induce.
//!
//! Each solution provides `u` and its Jacobian `J_ij = d u_i / d x_j` in closed
//! form; `f = div(eps u) = tr(eps J)` for constant `eps`, and `g = curl u` is read
//! off the antisymmetric part of `J`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::ProblemData;
use crate::error::{Error, Result};
use crate::geometry::{Mat3, Vec3};
use crate::mesh::{Element, Mesh};
use crate::permittivity::Permittivity;
use crate::quadrature::{cell_rule, face_rule, DEFAULT_ORDER, SINGULAR_ORDER};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Solution {
    #[serde(rename = "u1")]
    U1,
    #[serde(rename = "u2")]
    U2,
    #[serde(rename = "u3")]
    U3,
    #[serde(rename = "u4")]
    U4,
    #[serde(rename = "u5")]
    U5,
    #[serde(rename = "u6")]
    U6,
    /// `u = (1, 2, 3)`
    #[serde(rename = "const")]
    Constant,
}

impl Solution {
    pub const ALL: [Solution; 7] = [
        Solution::U1,
        Solution::U2,
        Solution::U3,
        Solution::U4,
        Solution::U5,
        Solution::U6,
        Solution::Constant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Solution::U1 => "u1",
            Solution::U2 => "u2",
            Solution::U3 => "u3",
            Solution::U4 => "u4",
            Solution::U5 => "u5",
            Solution::U6 => "u6",
            Solution::Constant => "const",
        }
    }

    /// Whether the field is singular along the `z` axis (`r = 0`).
    pub fn singular_axis(self) -> bool {
        matches!(self, Solution::U3 | Solution::U4)
    }

    pub fn regularity(self) -> &'static str {
        match self {
            Solution::U3 => "H^(5/3 - e)",
            Solution::U4 => "H^(2/3 - e)",
            _ => "smooth",
        }
    }

    /// `u(x)`; NaN on the axis for the singular solutions.
    pub fn u<T: Real>(self, p: Vec3<T>) -> Vec3<T> {
        let (x, y, z) = (p.x, p.y, p.z);
        let one = T::one();
        let bubble = |a: T| a * (one - a);
        match self {
            Solution::U1 => Vec3::new(bubble(y) * bubble(z), bubble(x) * bubble(z), bubble(x) * bubble(y)),
            Solution::U2 => {
                let pi = T::PI();
                Vec3::new(
                    (pi * x).sin() * (pi * y).sin() * (pi * z).sin(),
                    x * y * z,
                    (x + one) * (y + one) * (z + one),
                )
            }
            Solution::U3 => {
                let r2 = x * x + y * y;
                // r^(2/3) sin(2 theta) = 2 x y r^(-4/3)
                let w = T::lit(2.0) * x * y * r2.powf(T::lit(-2.0 / 3.0)) * (one - x) * (one - y);
                Vec3::new(bubble(y) * bubble(z), bubble(x) * bubble(z), w)
            }
            Solution::U4 => {
                let r = x.hypot(y);
                let theta = y.atan2(x);
                let c = T::lit(2.0 / 3.0) * r.powf(T::lit(-1.0 / 3.0));
                let third = theta / T::lit(3.0);
                Vec3::new(-c * third.sin(), c * third.cos(), T::zero())
            }
            Solution::U5 => Vec3::new(x + y + z, x - z, x + T::lit(3.0) * y),
            Solution::U6 => Vec3::new(x.sin() * y.sin() * z.sin(), x * y * z, (x + one) * (y + one) * (z + one)),
            Solution::Constant => Vec3::new(one, T::lit(2.0), T::lit(3.0)),
        }
    }

    /// Jacobian `J[i][j] = d u_i / d x_j`.
    pub fn jacobian<T: Real>(self, p: Vec3<T>) -> Mat3<T> {
        let (x, y, z) = (p.x, p.y, p.z);
        let one = T::one();
        let two = T::lit(2.0);
        let zero = T::zero();
        let b = |a: T| a * (one - a);
        let db = |a: T| one - two * a;
        let bubble_rows = [
            [zero, db(y) * b(z), b(y) * db(z)],
            [db(x) * b(z), zero, b(x) * db(z)],
        ];
        let rows = match self {
            Solution::U1 => [bubble_rows[0], bubble_rows[1], [db(x) * b(y), b(x) * db(y), zero]],
            Solution::U2 => {
                let pi = T::PI();
                let (sx, sy, sz) = ((pi * x).sin(), (pi * y).sin(), (pi * z).sin());
                let (cx, cy, cz) = ((pi * x).cos(), (pi * y).cos(), (pi * z).cos());
                [
                    [pi * cx * sy * sz, pi * sx * cy * sz, pi * sx * sy * cz],
                    [y * z, x * z, x * y],
                    [(y + one) * (z + one), (x + one) * (z + one), (x + one) * (y + one)],
                ]
            }
            Solution::U3 => {
                let r2 = x * x + y * y;
                let s = r2.powf(T::lit(-2.0 / 3.0));
                let ds = T::lit(-4.0 / 3.0) * r2.powf(T::lit(-5.0 / 3.0));
                let (px, qy) = (b(x), b(y));
                let dwdx = two * qy * (db(x) * s + px * ds * x);
                let dwdy = two * px * (db(y) * s + qy * ds * y);
                [bubble_rows[0], bubble_rows[1], [dwdx, dwdy, zero]]
            }
            Solution::U4 => {
                // Hessian of r^(2/3) sin(2 theta / 3).
                let r = x.hypot(y);
                let theta = y.atan2(x);
                let k = T::lit(2.0 / 9.0) * r.powf(T::lit(-4.0 / 3.0));
                let a = T::lit(4.0 / 3.0) * theta;
                let (sa, ca) = (k * a.sin(), k * a.cos());
                [[sa, -ca, zero], [-ca, -sa, zero], [zero, zero, zero]]
            }
            Solution::U5 => [[one, one, one], [one, zero, -one], [one, T::lit(3.0), zero]],
            Solution::U6 => {
                let (sx, sy, sz) = (x.sin(), y.sin(), z.sin());
                let (cx, cy, cz) = (x.cos(), y.cos(), z.cos());
                [
                    [cx * sy * sz, sx * cy * sz, sx * sy * cz],
                    [y * z, x * z, x * y],
                    [(y + one) * (z + one), (x + one) * (z + one), (x + one) * (y + one)],
                ]
            }
            Solution::Constant => [[zero; 3]; 3],
        };
        Mat3::from_rows(rows)
    }

    /// `f = div(eps u)` for constant `eps`.
    pub fn f<T: Real>(self, p: Vec3<T>, eps: &Mat3<T>) -> T {
        if self == Solution::U4 && *eps == Mat3::identity() {
            // u is the gradient of a harmonic function
            return T::zero();
        }
        let j = self.jacobian(p);
        let mut sum = T::zero();
        for a in 0..3 {
            for c in 0..3 {
                sum += eps.get(a, c) * j.get(c, a);
            }
        }
        sum
    }

    /// `g = curl u`.
    pub fn g<T: Real>(self, p: Vec3<T>) -> Vec3<T> {
        if self == Solution::U4 {
            // curl of a gradient
            return Vec3::zero();
        }
        let j = self.jacobian(p);
        Vec3::new(
            j.get(2, 1) - j.get(1, 2),
            j.get(0, 2) - j.get(2, 0),
            j.get(1, 0) - j.get(0, 1),
        )
    }

    /// `u`, `f`, `g` at a point, rejecting the singular axis.
    pub fn evaluate<T: Real>(self, p: Vec3<T>, eps: &Mat3<T>) -> Result<Sample<T>> {
        if self.singular_axis() && p.x == T::zero() && p.y == T::zero() {
            return Err(Error::SingularAxis {
                x: p.x.to_f64_lossy(),
                y: p.y.to_f64_lossy(),
                z: p.z.to_f64_lossy(),
            });
        }
        Ok(Sample {
            u: self.u(p),
            f: self.f(p, eps),
            g: self.g(p),
        })
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Solution::ALL
            .into_iter()
            .find(|sol| sol.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidInput(format!("unknown solution '{s}' (expected u1..u6 or const)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<T> {
    pub u: Vec3<T>,
    pub f: T,
    pub g: Vec3<T>,
}

/// A manufactured solution together with the (constant) permittivity used to derive `f`.
#[derive(Debug, Clone)]
pub struct ManufacturedProblem<T> {
    pub solution: Solution,
    pub eps: Mat3<T>,
    /// Points per axis away from the singular axis.
    pub order: usize,
}

impl<T: Real> ManufacturedProblem<T> {
    pub fn new(solution: Solution) -> Self {
        Self {
            solution,
            eps: Mat3::identity(),
            order: DEFAULT_ORDER,
        }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn with_permittivity(mut self, eps: Mat3<T>) -> Self {
        self.eps = eps;
        self
    }

    fn touches_axis(mesh: &Mesh<T>, element: &Element<T>) -> bool {
        let corners = mesh.element_corners(element);
        let lo = |f: fn(&Vec3<T>) -> T| corners.iter().map(f).fold(T::infinity(), T::min);
        let hi = |f: fn(&Vec3<T>) -> T| corners.iter().map(f).fold(T::neg_infinity(), T::max);
        lo(|p| p.x) <= T::zero()
            && hi(|p| p.x) >= T::zero()
            && lo(|p| p.y) <= T::zero()
            && hi(|p| p.y) >= T::zero()
    }

    /// Cell averages `(Q0 u)_T`.
    pub fn project(&self, mesh: &Mesh<T>) -> Result<Vec<Vec3<T>>> {
        mesh.elements
            .iter()
            .map(|el| {
                let rule = cell_rule(mesh, el, self.quadrature_order(mesh, el))?;
                Ok(rule.integrate_vec(|x| self.solution.u(x)) * (T::one() / el.volume))
            })
            .collect()
    }
}

impl<T: Real> ProblemData<T> for ManufacturedProblem<T> {
    fn f(&self, x: Vec3<T>) -> T {
        self.solution.f(x, &self.eps)
    }

    fn g(&self, x: Vec3<T>) -> Vec3<T> {
        self.solution.g(x)
    }

    fn chi(&self, x: Vec3<T>, n: Vec3<T>) -> Vec3<T> {
        self.solution.u(x).cross(n)
    }

    fn quadrature_order(&self, mesh: &Mesh<T>, element: &Element<T>) -> usize {
        if self.solution.singular_axis() && Self::touches_axis(mesh, element) {
            self.order.max(SINGULAR_ORDER)
        } else {
            self.order
        }
    }

    /// `alpha_i = <eps u . n, 1>` over hole surface `i`, `n` pointing out of the
    /// domain (into the hole).
    fn hole_fluxes(&self, mesh: &Mesh<T>, eps: &Permittivity<T>) -> Result<Vec<T>> {
        let mut alpha = Vec::with_capacity(mesh.num_holes());
        for ids in mesh.boundary_components.iter().skip(1) {
            let mut sum = T::zero();
            for &f in ids {
                let face = &mesh.faces[f];
                let el = &mesh.elements[face.adjacent_elements[0]];
                let local = el.face_ids.iter().position(|&g| g == f).expect("face belongs to its element");
                let n = el.outward_normals[local];
                let e = eps.on(el.id);
                let rule = face_rule(mesh, face, self.quadrature_order(mesh, el))?;
                sum += rule.integrate(|x| e.mul_vec(self.solution.u(x)).dot(n));
            }
            alpha.push(sum);
        }
        Ok(alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_domain_mesh, build_unit_cube_mesh, DomainTag};

    #[test]
    fn u1_at_center() {
        let u = Solution::U1.u(Vec3::splat(0.5));
        assert_eq!(u, Vec3::splat(1.0 / 16.0));
    }

    #[test]
    fn u4_data_vanish() {
        let p = Vec3::new(0.3, 0.7, 0.1);
        let s = Solution::U4.evaluate(p, &Mat3::identity()).unwrap();
        assert_eq!(s.f, 0.0);
        assert_eq!(s.g, Vec3::zero());
    }

    #[test]
    fn axis_rejected() {
        for sol in [Solution::U3, Solution::U4] {
            assert!(matches!(
                sol.evaluate(Vec3::new(0.0, 0.0, 0.5), &Mat3::identity()),
                Err(Error::SingularAxis { .. })
            ));
        }
        assert!(Solution::U1.evaluate(Vec3::new(0.0, 0.0, 0.5), &Mat3::<f64>::identity()).is_ok());
    }

    #[test]
    fn names_round_trip() {
        for s in Solution::ALL {
            assert_eq!(s.name().parse::<Solution>().unwrap(), s);
        }
        assert!("u7".parse::<Solution>().is_err());
    }

    #[test]
    fn u5_closed_forms() {
        let p = Vec3::new(0.3, -1.2, 2.0);
        assert_eq!(Solution::U5.f(p, &Mat3::identity()), 1.0);
        assert_eq!(Solution::U5.g(p), Vec3::new(4.0, 0.0, 0.0));
    }

    #[test]
    fn projection_of_constant_and_linear() {
        let mesh = build_unit_cube_mesh::<f64>(2).unwrap();
        let c = ManufacturedProblem::new(Solution::Constant).project(&mesh).unwrap();
        assert!(c.iter().all(|v| (*v - Vec3::new(1.0, 2.0, 3.0)).max_abs() < 1e-14));
        let l = ManufacturedProblem::new(Solution::U5).project(&mesh).unwrap();
        for (v, el) in l.iter().zip(&mesh.elements) {
            assert!((*v - Solution::U5.u(el.centroid)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn cavity_fluxes() {
        let mesh = build_domain_mesh::<f64>(DomainTag::DomainB, 1).unwrap();
        let eps = Permittivity::identity(&mesh);
        let c = ManufacturedProblem::new(Solution::Constant).hole_fluxes(&mesh, &eps).unwrap();
        assert!(c[0].abs() < 1e-13);
        // normals point into the unit-divergence field's hole, so the flux is -|H|
        let a = ManufacturedProblem::new(Solution::U5).hole_fluxes(&mesh, &eps).unwrap();
        assert!((a[0] + 8.0).abs() < 1e-12);
    }
}
