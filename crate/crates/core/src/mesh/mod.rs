//! Hexahedral meshes with the face/element geometry the weak Galerkin scheme needs.
//!
//! Every mesh, generated or imported, goes through [`Mesh::from_hexahedra`], which
//! derives faces, areas, normals, volumes, diameters and boundary components from
//! the vertex coordinates alone.

mod io;
mod structured;
mod topology;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{triple_product, Vec3};
use crate::scalar::Real;

pub use io::{export_mesh, import_mesh, read_mesh_json, write_mesh_json, MeshFile};
pub use structured::{build_domain_mesh, build_unit_cube_mesh, AxisBox};
pub use topology::detect_boundary_components;

/// Corner loops of the six faces of a hexahedron whose corners are in tensor-product
/// order (`index = i + 2j + 4k`). Each loop is counter-clockwise seen from outside.
pub const LOCAL_FACES: [[usize; 4]; 6] = [
    [0, 4, 6, 2], // x-
    [1, 3, 7, 5], // x+
    [0, 1, 5, 4], // y-
    [2, 6, 7, 3], // y+
    [0, 2, 3, 1], // z-
    [4, 5, 7, 6], // z+
];

/// Faces per hexahedron.
pub const FACES_PER_ELEMENT: usize = 6;

/// Which geometry a mesh discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    UnitCube,
    DomainA,
    DomainB,
    DomainC,
    Imported,
}

#[derive(Debug, Clone)]
pub struct Face<T> {
    pub id: usize,
    /// Corner loop as seen from the first adjacent element (outward for it).
    pub vertex_ids: [usize; 4],
    pub area: T,
    /// Fixed orientation of the face, shared by both neighbours.
    pub oriented_normal: Vec3<T>,
    pub centroid: Vec3<T>,
    pub adjacent_elements: Vec<usize>,
    /// Boundary component (0 is the exterior boundary), `None` for interior faces.
    pub boundary_component: Option<usize>,
}

impl<T> Face<T> {
    pub fn is_boundary(&self) -> bool {
        self.adjacent_elements.len() == 1
    }
}

#[derive(Debug, Clone)]
pub struct Element<T> {
    pub id: usize,
    pub vertex_ids: [usize; 8],
    pub face_ids: [usize; FACES_PER_ELEMENT],
    pub volume: T,
    pub diameter: T,
    /// Unit normals of the local faces pointing out of this element.
    pub outward_normals: [Vec3<T>; FACES_PER_ELEMENT],
    pub centroid: Vec3<T>,
}

#[derive(Debug, Clone)]
pub struct Mesh<T> {
    pub vertices: Vec<Vec3<T>>,
    pub elements: Vec<Element<T>>,
    pub faces: Vec<Face<T>>,
    /// Largest element diameter.
    pub meshsize: T,
    /// Face ids of each connected boundary surface, exterior surface first.
    pub boundary_components: Vec<Vec<usize>>,
    pub domain_tag: DomainTag,
}

impl<T: Real> Mesh<T> {
    /// Builds a mesh from hexahedra given by eight corners in tensor-product order.
    pub fn from_hexahedra(
        vertices: Vec<Vec3<T>>,
        hexahedra: &[[usize; 8]],
        domain_tag: DomainTag,
    ) -> Result<Self> {
        if hexahedra.is_empty() {
            return Err(Error::MalformedMesh("mesh has no elements".into()));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::MalformedMesh(format!("vertex {i} has non-finite coordinates")));
        }
        for (e, hex) in hexahedra.iter().enumerate() {
            for (f, local) in LOCAL_FACES.iter().enumerate() {
                if let Some(&v) = local.iter().map(|&l| &hex[l]).find(|&&v| v >= vertices.len()) {
                    return Err(Error::MissingVertex {
                        element: e,
                        face: f,
                        vertex: v,
                    });
                }
            }
        }

        let mut faces: Vec<Face<T>> = Vec::new();
        let mut lookup: HashMap<[usize; 4], usize> = HashMap::with_capacity(hexahedra.len() * 4);
        let mut elements = Vec::with_capacity(hexahedra.len());

        for (e, hex) in hexahedra.iter().enumerate() {
            let mut face_ids = [0; FACES_PER_ELEMENT];
            let mut outward_normals = [Vec3::zero(); FACES_PER_ELEMENT];
            for (f, local) in LOCAL_FACES.iter().enumerate() {
                let lp = local.map(|l| hex[l]);
                let mut key = lp;
                key.sort_unstable();
                let corners = lp.map(|v| vertices[v]);
                let newell = newell_normal(&corners);
                let id = match lookup.get(&key) {
                    Some(&id) => {
                        let face = &mut faces[id];
                        if face.adjacent_elements.len() >= 2 {
                            return Err(Error::NonManifoldFace { face: id });
                        }
                        face.adjacent_elements.push(e);
                        id
                    }
                    None => {
                        let id = faces.len();
                        let face = make_face(id, lp, &corners, newell, e, f)?;
                        faces.push(face);
                        lookup.insert(key, id);
                        id
                    }
                };
                let oriented = faces[id].oriented_normal;
                outward_normals[f] = if newell.dot(oriented) >= T::zero() {
                    oriented
                } else {
                    -oriented
                };
                face_ids[f] = id;
            }

            let corners = hex.map(|v| vertices[v]);
            let (volume, centroid) = hexahedron_volume_centroid(&corners);
            let tiny = T::epsilon() * T::lit(64.0) * bounding_extent(&corners).powi(3);
            if !(volume > tiny) {
                return Err(Error::InvertedElement {
                    element: e,
                    volume: volume.to_f64_lossy(),
                });
            }
            let mut diameter = T::zero();
            for a in 0..8 {
                for b in (a + 1)..8 {
                    diameter = diameter.max((corners[a] - corners[b]).norm());
                }
            }
            elements.push(Element {
                id: e,
                vertex_ids: *hex,
                face_ids,
                volume,
                diameter,
                outward_normals,
                centroid,
            });
        }

        let meshsize = elements
            .iter()
            .map(|el| el.diameter)
            .fold(T::zero(), |a, b| a.max(b));
        let mut mesh = Mesh {
            vertices,
            elements,
            faces,
            meshsize,
            boundary_components: Vec::new(),
            domain_tag,
        };
        let components = detect_boundary_components(&mesh);
        for (c, ids) in components.iter().enumerate() {
            for &f in ids {
                mesh.faces[f].boundary_component = Some(c);
            }
        }
        mesh.boundary_components = components;
        Ok(mesh)
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_boundary_faces(&self) -> usize {
        self.faces.iter().filter(|f| f.is_boundary()).count()
    }

    /// Number of hole surfaces (boundary components besides the exterior one).
    pub fn num_holes(&self) -> usize {
        self.boundary_components.len().saturating_sub(1)
    }

    /// `sum_i |sigma_i| n_i` over the faces of an element; zero for a closed surface.
    pub fn closure_defect(&self, element: &Element<T>) -> Vec3<T> {
        element
            .face_ids
            .iter()
            .zip(element.outward_normals.iter())
            .map(|(&f, &n)| n * self.faces[f].area)
            .sum()
    }

    /// Corner coordinates of an element in tensor-product order.
    pub fn element_corners(&self, element: &Element<T>) -> [Vec3<T>; 8] {
        element.vertex_ids.map(|v| self.vertices[v])
    }

    /// Corner loop of a face oriented outward for `element`.
    pub fn face_corners_for(&self, element: &Element<T>, local_face: usize) -> [Vec3<T>; 4] {
        LOCAL_FACES[local_face].map(|l| self.vertices[element.vertex_ids[l]])
    }

    /// The same mesh with elements renumbered by `order` (new element `i` is old `order[i]`).
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let hexes: Vec<[usize; 8]> = order.iter().map(|&o| self.elements[o].vertex_ids).collect();
        Mesh::from_hexahedra(self.vertices.clone(), &hexes, self.domain_tag)
    }
}

/// Twice the vector area of a closed polygon (Newell's method).
pub(crate) fn newell_normal<T: Real>(loop_: &[Vec3<T>]) -> Vec3<T> {
    let mut n = Vec3::zero();
    for i in 0..loop_.len() {
        let a = loop_[i];
        let b = loop_[(i + 1) % loop_.len()];
        n.x += (a.y - b.y) * (a.z + b.z);
        n.y += (a.z - b.z) * (a.x + b.x);
        n.z += (a.x - b.x) * (a.y + b.y);
    }
    n
}

/// Flips `n` so that its largest-magnitude component is positive (ties go to the lower axis).
pub(crate) fn canonical_orientation<T: Real>(n: Vec3<T>) -> Vec3<T> {
    let mut axis = 0;
    for a in 1..3 {
        if n[a].abs() > n[axis].abs() {
            axis = a;
        }
    }
    if n[axis] < T::zero() {
        -n
    } else {
        n
    }
}

fn bounding_extent<T: Real>(pts: &[Vec3<T>]) -> T {
    let mut ext = T::zero();
    for a in 0..3 {
        let lo = pts.iter().map(|p| p[a]).fold(T::infinity(), T::min);
        let hi = pts.iter().map(|p| p[a]).fold(T::neg_infinity(), T::max);
        ext = ext.max(hi - lo);
    }
    ext
}

fn make_face<T: Real>(
    id: usize,
    vertex_ids: [usize; 4],
    corners: &[Vec3<T>; 4],
    newell: Vec3<T>,
    element: usize,
    local_face: usize,
) -> Result<Face<T>> {
    let area = newell.norm() * T::lit(0.5);
    let extent = bounding_extent(corners);
    if !(area > T::epsilon() * extent * extent) {
        return Err(Error::DegenerateGeometry(format!(
            "element {element}, face {local_face} has zero area"
        )));
    }
    let unit = newell * (T::one() / newell.norm());
    let centroid = polygon_centroid(corners);
    let deviation = corners
        .iter()
        .map(|&c| (c - centroid).dot(unit).abs())
        .fold(T::zero(), T::max);
    if deviation > T::lit(1e-9) * extent {
        return Err(Error::NonPlanarFace {
            element,
            face: local_face,
            deviation: deviation.to_f64_lossy(),
        });
    }
    Ok(Face {
        id,
        vertex_ids,
        area,
        oriented_normal: canonical_orientation(unit),
        centroid,
        adjacent_elements: vec![element],
        boundary_component: None,
    })
}

/// Area centroid of a planar quadrilateral.
fn polygon_centroid<T: Real>(c: &[Vec3<T>; 4]) -> Vec3<T> {
    let third = T::one() / T::lit(3.0);
    let t1 = (c[1] - c[0]).cross(c[2] - c[0]).norm();
    let t2 = (c[2] - c[0]).cross(c[3] - c[0]).norm();
    let g1 = (c[0] + c[1] + c[2]) * third;
    let g2 = (c[0] + c[2] + c[3]) * third;
    if t1 + t2 == T::zero() {
        return (c[0] + c[1] + c[2] + c[3]) * T::lit(0.25);
    }
    (g1 * t1 + g2 * t2) * (T::one() / (t1 + t2))
}

/// Signed volume and centroid from a tetrahedral fan around the corner average.
fn hexahedron_volume_centroid<T: Real>(corners: &[Vec3<T>; 8]) -> (T, Vec3<T>) {
    let apex = corners.iter().copied().sum::<Vec3<T>>() * T::lit(0.125);
    let sixth = T::one() / T::lit(6.0);
    let mut volume = T::zero();
    let mut moment = Vec3::zero();
    for local in LOCAL_FACES.iter() {
        let q = local.map(|l| corners[l]);
        for (a, b, c) in [(q[0], q[1], q[2]), (q[0], q[2], q[3])] {
            let v = triple_product(a - apex, b - apex, c - apex) * sixth;
            volume += v;
            moment += (apex + a + b + c) * (v * T::lit(0.25));
        }
    }
    let centroid = if volume != T::zero() {
        moment * (T::one() / volume)
    } else {
        apex
    };
    (volume, centroid)
}
