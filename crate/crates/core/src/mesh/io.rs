//! JSON mesh exchange: `{ "vertices": [[x,y,z],...], "elements": [[v0..v7],...] }`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DomainTag, Mesh};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scalar::Real;

/// On-disk mesh layout. Element corners are in tensor-product order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub vertices: Vec<[f64; 3]>,
    pub elements: Vec<[usize; 8]>,
}

impl<T: Real> From<&Mesh<T>> for MeshFile {
    fn from(mesh: &Mesh<T>) -> Self {
        MeshFile {
            vertices: mesh
                .vertices
                .iter()
                .map(|v| [v.x, v.y, v.z].map(|c| c.to_f64_lossy()))
                .collect(),
            elements: mesh.elements.iter().map(|e| e.vertex_ids).collect(),
        }
    }
}

/// Parses a JSON mesh and recomputes every derived quantity.
pub fn read_mesh_json<T: Real>(text: &str) -> Result<Mesh<T>> {
    let file: MeshFile =
        serde_json::from_str(text).map_err(|e| Error::MalformedMesh(e.to_string()))?;
    let vertices = file
        .vertices
        .iter()
        .map(|&[x, y, z]| Vec3::new(T::lit(x), T::lit(y), T::lit(z)))
        .collect();
    Mesh::from_hexahedra(vertices, &file.elements, DomainTag::Imported)
}

pub fn write_mesh_json<T: Real>(mesh: &Mesh<T>) -> Result<String> {
    Ok(serde_json::to_string(&MeshFile::from(mesh))?)
}

pub fn import_mesh<T: Real>(path: impl AsRef<Path>) -> Result<Mesh<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_mesh_json(&text)
}

pub fn export_mesh<T: Real>(mesh: &Mesh<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_mesh_json(mesh)?).map_err(|e| Error::io(path, e))
}
