//! Legacy ASCII VTK output of a cell-wise constant vector field.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::mesh::Mesh;
use crate::scalar::Real;

/// VTK_HEXAHEDRON corner order expressed in tensor-product corner indices.
const VTK_ORDER: [usize; 8] = [0, 1, 3, 2, 4, 5, 7, 6];
const VTK_HEXAHEDRON: u8 = 12;

pub fn vtk_string<T: Real>(mesh: &Mesh<T>, name: &str, field: &[Vec3<T>]) -> Result<String> {
    if field.len() != mesh.num_elements() {
        return Err(Error::DofMismatch(format!(
            "field has {} values, mesh has {} elements",
            field.len(),
            mesh.num_elements()
        )));
    }
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(Error::InvalidInput(format!("invalid VTK array name '{name}'")));
    }
    let mut s = String::new();
    let ne = mesh.num_elements();
    // write! into a String cannot fail
    let _ = writeln!(s, "# vtk DataFile Version 3.0\ndivcurl cell field\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", mesh.vertices.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{:e} {:e} {:e}", v.x.to_f64_lossy(), v.y.to_f64_lossy(), v.z.to_f64_lossy());
    }
    let _ = writeln!(s, "CELLS {ne} {}", ne * 9);
    for el in &mesh.elements {
        s.push('8');
        for &c in &VTK_ORDER {
            let _ = write!(s, " {}", el.vertex_ids[c]);
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {ne}");
    for _ in 0..ne {
        let _ = writeln!(s, "{VTK_HEXAHEDRON}");
    }
    let _ = writeln!(s, "CELL_DATA {ne}\nVECTORS {name} double");
    for v in field {
        let _ = writeln!(s, "{:e} {:e} {:e}", v.x.to_f64_lossy(), v.y.to_f64_lossy(), v.z.to_f64_lossy());
    }
    Ok(s)
}

pub fn export_vtk<T: Real>(mesh: &Mesh<T>, name: &str, field: &[Vec3<T>], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = vtk_string(mesh, name, field)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_unit_cube_mesh;

    #[test]
    fn single_cell() {
        let mesh = build_unit_cube_mesh::<f64>(1).unwrap();
        let s = vtk_string(&mesh, "u", &[Vec3::new(1.0, 2.0, 3.0)]).unwrap();
        assert!(s.contains("CELLS 1 9\n8 0 1 3 2 4 5 7 6\n"));
        assert!(s.ends_with("VECTORS u double\n1e0 2e0 3e0\n"));
    }

    #[test]
    fn length_mismatch_rejected() {
        let mesh = build_unit_cube_mesh::<f64>(2).unwrap();
        assert!(vtk_string(&mesh, "u", &[Vec3::zero()]).is_err());
        assert!(vtk_string(&mesh, "two words", &vec![Vec3::zero(); 8]).is_err());
    }
}
