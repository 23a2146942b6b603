//! Independent oracles shared by the integration tests and the acceptance run.

#![allow(dead_code)]

use divcurl::element::{self, element_matrix, LOCAL_DOFS};
use divcurl::geometry::{Mat3, Vec3};
use divcurl::mesh::{DomainTag, Mesh, LOCAL_FACES};
use divcurl::quadrature::{hexahedron_rule, quadrilateral_rule};
use divcurl::weak::{face_bases, weak_operator_table};
use divcurl::{Solution, StabilizationWeights};
use rand::Rng;

pub fn random_box<R: Rng>(rng: &mut R) -> Mesh<f64> {
    let lo = [0; 3].map(|_| rng.gen_range(-5.0..5.0));
    let len = [0; 3].map(|_| rng.gen_range(0.05..3.0));
    hexahedron_mesh(|i, j, k| {
        Vec3::new(
            lo[0] + i as f64 * len[0],
            lo[1] + j as f64 * len[1],
            lo[2] + k as f64 * len[2],
        )
    })
}

/// A box sheared by a random upper-triangular map, so faces stay planar.
pub fn random_parallelepiped<R: Rng>(rng: &mut R) -> Mesh<f64> {
    let a = Vec3::new(rng.gen_range(0.2..2.0), 0.0, 0.0);
    let b = Vec3::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.2..2.0), 0.0);
    let c = Vec3::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(0.2..2.0));
    let o = Vec3::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
    hexahedron_mesh(|i, j, k| o + a * i as f64 + b * j as f64 + c * k as f64)
}

fn hexahedron_mesh(corner: impl Fn(usize, usize, usize) -> Vec3<f64>) -> Mesh<f64> {
    let vertices: Vec<Vec3<f64>> = (0..8).map(|c| corner(c & 1, (c >> 1) & 1, c >> 2)).collect();
    Mesh::from_hexahedra(vertices, &[[0, 1, 2, 3, 4, 5, 6, 7]], DomainTag::Imported).unwrap()
}

pub fn random_spd<R: Rng>(rng: &mut R) -> Mat3<f64> {
    let a: [[f64; 3]; 3] = [0; 3].map(|_| [0; 3].map(|_| rng.gen_range(-1.0..1.0)));
    // a^T a + I / 2
    Mat3::from_rows(std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).map(|k| a[k][i] * a[k][j]).sum::<f64>() + if i == j { 0.5 } else { 0.0 })
    }))
}

/// Unit normal of a planar corner loop, from its diagonals.
fn loop_normal(c: &[Vec3<f64>; 4]) -> Vec3<f64> {
    (c[2] - c[0]).cross(c[3] - c[1]).normalized()
}

/// Local unknowns of one element split by space.
struct Local {
    lambda0: f64,
    lambda_b: [f64; 6],
    q0: Vec3<f64>,
    qb: [[f64; 2]; 6],
    s0: f64,
    sb: [f64; 6],
    u: Vec3<f64>,
}

fn split(x: &[f64; LOCAL_DOFS]) -> Local {
    Local {
        lambda0: x[element::LAMBDA0],
        lambda_b: std::array::from_fn(|i| x[element::LAMBDA_B + i]),
        q0: Vec3::new(x[element::Q0], x[element::Q0 + 1], x[element::Q0 + 2]),
        qb: std::array::from_fn(|i| [x[element::qb(i, 0)], x[element::qb(i, 1)]]),
        s0: x[element::S0],
        sb: std::array::from_fn(|i| x[element::SB + i]),
        u: Vec3::new(x[element::U], x[element::U + 1], x[element::U + 2]),
    }
}

/// Largest entry-wise difference between the closed-form element matrix and the
/// matrix obtained by evaluating `S1 - S2 + B_h(trial, test) + B_h(test, trial)` on
/// every pair of local basis functions, relative to the largest entry.
pub fn element_oracle_defect(mesh: &Mesh<f64>, eps: &Mat3<f64>, rho: &StabilizationWeights<f64>) -> f64 {
    let el = &mesh.elements[0];
    let bases = face_bases(&mesh.faces).unwrap();
    let closed = element_matrix(el, &mesh.faces, &bases, eps, rho).unwrap();

    let corners = mesh.element_corners(el);
    let volume = hexahedron_rule(&corners, 2).unwrap().measure();
    let h = (0..8)
        .flat_map(|a| (0..8).map(move |b| (a, b)))
        .map(|(a, b)| (corners[a] - corners[b]).norm())
        .fold(0.0, f64::max);
    let mut areas = [0.0; 6];
    let mut normals = [Vec3::zero(); 6];
    let mut tangents = [[Vec3::zero(); 2]; 6];
    for (i, local) in LOCAL_FACES.iter().enumerate() {
        let loop_ = local.map(|l| corners[l]);
        areas[i] = quadrilateral_rule(&loop_, 2).unwrap().measure();
        normals[i] = loop_normal(&loop_);
        let b = bases[el.face_ids[i]];
        tangents[i] = [b.e1, b.e2];
    }
    let table = weak_operator_table(el, &mesh.faces, &bases);

    let s1 = |x: &Local, y: &Local| -> f64 {
        (0..6)
            .map(|i| {
                let n = normals[i];
                let jl = |v: &Local| v.lambda0 - v.lambda_b[i];
                let jq = |v: &Local| (v.q0 - (tangents[i][0] * v.qb[i][0] + tangents[i][1] * v.qb[i][1])).cross(n);
                areas[i] / h * (rho.rho1 * jl(x) * jl(y) + rho.rho2 * jq(x).dot(jq(y)))
            })
            .sum()
    };
    let s2 = |x: &Local, y: &Local| -> f64 {
        (0..6)
            .map(|i| rho.rho3 * areas[i] / h * (x.s0 - x.sb[i]) * (y.s0 - y.sb[i]))
            .sum()
    };
    // primal (u, s) of `x` against dual (lambda, q) of `y`
    let b = |x: &Local, y: &Local| -> f64 {
        let grad_lambda = table.gradient(y.lambda0, &y.lambda_b);
        let curl_q = table.curl(y.q0, &y.qb);
        let grad_s = table.gradient(x.s0, &x.sb);
        volume * (x.u.dot(eps.mul_vec(grad_lambda) + curl_q) + y.q0.dot(grad_s))
    };

    let unit = |a: usize| {
        let mut v = [0.0; LOCAL_DOFS];
        v[a] = 1.0;
        split(&v)
    };
    let mut scale = 0.0f64;
    let mut worst = 0.0f64;
    for a in 0..LOCAL_DOFS {
        for c in 0..LOCAL_DOFS {
            let (x, y) = (unit(a), unit(c));
            let v = s1(&x, &y) - s2(&x, &y) + b(&x, &y) + b(&y, &x);
            scale = scale.max(v.abs());
            worst = worst.max((v - closed[a][c]).abs());
        }
    }
    worst / scale
}

/// Largest violation of the weak gradient and weak curl identities for random
/// lowest-order weak functions, tested against the constant fields `e^j`.
pub fn weak_identity_defect<R: Rng>(mesh: &Mesh<f64>, rng: &mut R) -> f64 {
    let el = &mesh.elements[0];
    let bases = face_bases(&mesh.faces).unwrap();
    let table = weak_operator_table(el, &mesh.faces, &bases);
    let corners = mesh.element_corners(el);
    let cell = hexahedron_rule(&corners, 3).unwrap();

    let v0: f64 = rng.gen_range(-1.0..1.0);
    let vb: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let w0 = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let wb: [[f64; 2]; 6] = std::array::from_fn(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
    let grad = table.gradient(v0, &vb);
    let curl = table.curl(w0, &wb);

    let mut worst = 0.0f64;
    for j in 0..3 {
        let phi = Vec3::<f64>::unit(j);
        // div phi = curl phi = 0, so only boundary terms remain
        let lhs_grad = cell.integrate(|_| grad.dot(phi));
        let lhs_curl = cell.integrate(|_| curl.dot(phi));
        let mut rhs_grad = 0.0;
        let mut rhs_curl = 0.0;
        for (i, local) in LOCAL_FACES.iter().enumerate() {
            let loop_ = local.map(|l| corners[l]);
            let rule = quadrilateral_rule(&loop_, 3).unwrap();
            let n = loop_normal(&loop_);
            let b = bases[el.face_ids[i]];
            let t = b.e1 * wb[i][0] + b.e2 * wb[i][1];
            rhs_grad += rule.integrate(|_| vb[i] * phi.dot(n));
            rhs_curl -= rule.integrate(|_| t.cross(n).dot(phi));
        }
        worst = worst.max((lhs_grad - rhs_grad).abs()).max((lhs_curl - rhs_curl).abs());
    }
    worst
}

/// Relative step of the fourth-order central differences below.
pub const FD_STEP: f64 = 1e-3;

/// Difference step at `p`: `FD_STEP`, shrunk with the distance to the axis for the
/// singular fields so the stencil never sees the singularity up close.
pub fn fd_step(solution: Solution, p: Vec3<f64>) -> f64 {
    if solution.singular_axis() {
        FD_STEP * p.x.hypot(p.y).min(1.0)
    } else {
        FD_STEP
    }
}

/// `d field / d x_j` at `p` by the five-point stencil with step `h`.
pub fn fd_partial(field: &dyn Fn(Vec3<f64>) -> Vec3<f64>, p: Vec3<f64>, j: usize, h: f64) -> Vec3<f64> {
    let e = Vec3::<f64>::unit(j) * h;
    (field(p - e * 2.0) - field(p + e * 2.0) + (field(p + e) - field(p - e)) * 8.0) * (1.0 / (12.0 * h))
}

/// A random point where `solution` is smooth: the unit cube (away from the axis for
/// the singular fields) or the box of the holed domains.
pub fn sample_point<R: Rng>(solution: Solution, rng: &mut R) -> Vec3<f64> {
    loop {
        let p: Vec3<f64> = match solution {
            Solution::U5 | Solution::U6 => Vec3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ),
            _ => Vec3::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)),
        };
        if !solution.singular_axis() || p.x.hypot(p.y) > 0.05 {
            return p;
        }
    }
}

/// Worst absolute mismatch of `f` against a central-difference `div(eps u)`, of `g`
/// against a central-difference `curl u`, and of `div g` against zero.
pub fn manufactured_defect<R: Rng>(solution: Solution, eps: &Mat3<f64>, points: usize, rng: &mut R) -> [f64; 3] {
    let d = |field: &dyn Fn(Vec3<f64>) -> Vec3<f64>, p: Vec3<f64>| -> [[f64; 3]; 3] {
        // d[i][j] = d field_i / d x_j
        let mut m = [[0.0; 3]; 3];
        for j in 0..3 {
            let diff = fd_partial(field, p, j, fd_step(solution, p));
            for i in 0..3 {
                m[i][j] = diff[i];
            }
        }
        m
    };
    let mut worst = [0.0f64; 3];
    for _ in 0..points {
        let p = sample_point(solution, rng);
        let ju = d(&|x| solution.u(x), p);
        let jeu = d(&|x| eps.mul_vec(solution.u(x)), p);
        let div_eps_u = jeu[0][0] + jeu[1][1] + jeu[2][2];
        let curl_u = Vec3::new(ju[2][1] - ju[1][2], ju[0][2] - ju[2][0], ju[1][0] - ju[0][1]);
        let jg = d(&|x| solution.g(x), p);
        worst[0] = worst[0].max((solution.f(p, eps) - div_eps_u).abs());
        worst[1] = worst[1].max((solution.g(p) - curl_u).max_abs());
        worst[2] = worst[2].max((jg[0][0] + jg[1][1] + jg[2][2]).abs());
    }
    worst
}

pub const MANUFACTURED: [Solution; 6] = [
    Solution::U1,
    Solution::U2,
    Solution::U3,
    Solution::U4,
    Solution::U5,
    Solution::U6,
];
