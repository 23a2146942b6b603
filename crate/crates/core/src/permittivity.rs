use crate::error::{Error, Result};
use crate::geometry::{Mat3, Vec3};
use crate::mesh::Mesh;
use crate::quadrature::cell_rule;
use crate::scalar::Real;

/// Cell-averaged permittivity tensor, one symmetric positive definite matrix per element.
#[derive(Debug, Clone)]
pub struct Permittivity<T> {
    pub cell_average: Vec<Mat3<T>>,
}

impl<T: Real> Permittivity<T> {
    pub fn identity(mesh: &Mesh<T>) -> Self {
        Self {
            cell_average: vec![Mat3::identity(); mesh.num_elements()],
        }
    }

    pub fn uniform(mesh: &Mesh<T>, eps: Mat3<T>) -> Result<Self> {
        validate(&eps, 0)?;
        Ok(Self {
            cell_average: vec![eps; mesh.num_elements()],
        })
    }

    /// Averages a tensor field over every element with a `q`-point rule per axis.
    pub fn from_field(mesh: &Mesh<T>, field: impl Fn(Vec3<T>) -> Mat3<T>, q: usize) -> Result<Self> {
        let mut cell_average = Vec::with_capacity(mesh.num_elements());
        for el in &mesh.elements {
            let rule = cell_rule(mesh, el, q)?;
            let mut sum = Mat3::zero();
            for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                sum = sum.add(&field(p).scale(w));
            }
            let avg = sum.scale(T::one() / el.volume);
            validate(&avg, el.id)?;
            cell_average.push(avg);
        }
        Ok(Self { cell_average })
    }

    pub fn len(&self) -> usize {
        self.cell_average.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cell_average.is_empty()
    }

    pub fn on(&self, element: usize) -> &Mat3<T> {
        &self.cell_average[element]
    }
}

fn validate<T: Real>(m: &Mat3<T>, element: usize) -> Result<()> {
    let scale = m.rows.iter().flatten().fold(T::zero(), |a, &b| a.max(b.abs()));
    if !(scale > T::zero()) || m.asymmetry() > T::lit(1e-12) * scale {
        return Err(Error::InvalidInput(format!(
            "permittivity on element {element} is not symmetric"
        )));
    }
    if !m.is_positive_definite() {
        return Err(Error::InvalidInput(format!(
            "permittivity on element {element} is not positive definite"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_unit_cube_mesh;

    #[test]
    fn averages_linear_field_at_centroid() {
        let mesh = build_unit_cube_mesh::<f64>(2).unwrap();
        let eps = Permittivity::from_field(
            &mesh,
            |p| Mat3::diagonal(Vec3::new(1.0 + p.x, 2.0, 3.0 + p.z)),
            2,
        )
        .unwrap();
        for el in &mesh.elements {
            let m = eps.on(el.id);
            assert!((m.get(0, 0) - 1.0 - el.centroid.x).abs() < 1e-14);
            assert!((m.get(2, 2) - 3.0 - el.centroid.z).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_indefinite_and_asymmetric() {
        let mesh = build_unit_cube_mesh::<f64>(1).unwrap();
        assert!(Permittivity::uniform(&mesh, Mat3::diagonal(Vec3::new(1.0, -1.0, 1.0))).is_err());
        let mut m = Mat3::identity();
        m.rows[0][1] = 0.5;
        assert!(Permittivity::uniform(&mesh, m).is_err());
    }
}
