//! Structured hexahedral grids: the unit cube and the three multiply connected test domains.

use super::{DomainTag, Mesh};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scalar::Real;

/// Closed axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisBox {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl AxisBox {
    pub const fn new(lo: [f64; 3], hi: [f64; 3]) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|a| p[a] >= self.lo[a] && p[a] <= self.hi[a])
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|a| self.hi[a] - self.lo[a]).product()
    }
}

impl DomainTag {
    /// Bounding box of the domain.
    pub fn extent(self) -> Option<AxisBox> {
        match self {
            DomainTag::UnitCube => Some(AxisBox::new([0.0; 3], [1.0; 3])),
            DomainTag::DomainA | DomainTag::DomainB => Some(AxisBox::new([-2.0; 3], [2.0; 3])),
            DomainTag::DomainC => Some(AxisBox::new([-2.0, -2.0, 0.0], [2.0, 6.0, 1.0])),
            DomainTag::Imported => None,
        }
    }

    /// Boxes removed from [`DomainTag::extent`].
    pub fn holes(self) -> Vec<AxisBox> {
        match self {
            DomainTag::DomainA => vec![AxisBox::new([-1.0, -1.0, -2.0], [1.0, 1.0, 2.0])],
            DomainTag::DomainB => vec![AxisBox::new([-1.0; 3], [1.0; 3])],
            DomainTag::DomainC => vec![
                AxisBox::new([-1.5, -1.5, 0.0], [1.5, 1.5, 1.0]),
                AxisBox::new([-1.5, 2.5, 0.0], [1.5, 5.5, 1.0]),
            ],
            DomainTag::UnitCube | DomainTag::Imported => Vec::new(),
        }
    }
}

/// Uniform partition of `(0,1)^3` into `n^3` cubes.
pub fn build_unit_cube_mesh<T: Real>(n: usize) -> Result<Mesh<T>> {
    if n == 0 {
        return Err(Error::InvalidResolution("unit cube needs n >= 1".into()));
    }
    structured_grid(DomainTag::UnitCube, [n; 3])
}

/// Structured grid of one of the holed domains with `n` cells per unit length.
///
/// Cells whose centroid lies in a hole box are removed. Every hole face must fall
/// on a grid plane.
pub fn build_domain_mesh<T: Real>(tag: DomainTag, n: usize) -> Result<Mesh<T>> {
    let extent = match tag {
        DomainTag::DomainA | DomainTag::DomainB | DomainTag::DomainC => tag.extent().unwrap(),
        other => {
            return Err(Error::InvalidInput(format!(
                "{other:?} is not a holed test domain"
            )))
        }
    };
    if n == 0 {
        return Err(Error::InvalidResolution("need n >= 1 cells per unit length".into()));
    }
    let on_grid = |c: f64| {
        let s = c * n as f64;
        (s - s.round()).abs() < 1e-9
    };
    for hole in tag.holes().iter().chain(std::iter::once(&extent)) {
        for a in 0..3 {
            for c in [hole.lo[a], hole.hi[a]] {
                if !on_grid(c) {
                    return Err(Error::InvalidResolution(format!(
                        "{tag:?}: n = {n} cells per unit does not put the plane {c} on the grid"
                    )));
                }
            }
        }
    }
    let counts = [0, 1, 2].map(|a| ((extent.hi[a] - extent.lo[a]) * n as f64).round() as usize);
    structured_grid(tag, counts)
}

fn structured_grid<T: Real>(tag: DomainTag, counts: [usize; 3]) -> Result<Mesh<T>> {
    let extent = tag.extent().expect("structured domains have an extent");
    let holes = tag.holes();
    let planes: Vec<Vec<f64>> = (0..3)
        .map(|a| {
            let span = extent.hi[a] - extent.lo[a];
            (0..=counts[a])
                .map(|i| {
                    if i == counts[a] {
                        extent.hi[a]
                    } else {
                        extent.lo[a] + span * i as f64 / counts[a] as f64
                    }
                })
                .collect()
        })
        .collect();

    let lattice = |i: usize, j: usize, k: usize| i + (counts[0] + 1) * (j + (counts[1] + 1) * k);
    let mut vertex_slot = vec![usize::MAX; (counts[0] + 1) * (counts[1] + 1) * (counts[2] + 1)];
    let mut vertices = Vec::new();
    let mut hexes = Vec::new();

    for k in 0..counts[2] {
        for j in 0..counts[1] {
            for i in 0..counts[0] {
                let centroid = [
                    0.5 * (planes[0][i] + planes[0][i + 1]),
                    0.5 * (planes[1][j] + planes[1][j + 1]),
                    0.5 * (planes[2][k] + planes[2][k + 1]),
                ];
                if holes.iter().any(|h| h.contains(centroid)) {
                    continue;
                }
                let mut hex = [0usize; 8];
                for (c, slot) in hex.iter_mut().enumerate() {
                    let (di, dj, dk) = (c & 1, (c >> 1) & 1, (c >> 2) & 1);
                    let key = lattice(i + di, j + dj, k + dk);
                    if vertex_slot[key] == usize::MAX {
                        vertex_slot[key] = vertices.len();
                        vertices.push(Vec3::new(
                            T::lit(planes[0][i + di]),
                            T::lit(planes[1][j + dj]),
                            T::lit(planes[2][k + dk]),
                        ));
                    }
                    *slot = vertex_slot[key];
                }
                hexes.push(hex);
            }
        }
    }
    Mesh::from_hexahedra(vertices, &hexes, tag)
}
