//! Convergence studies on the manufactured solutions and comparison with published tables.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dof::{assemble, build_dof_map, extract_u};
use crate::element::StabilizationWeights;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::manufactured::{ManufacturedProblem, Solution};
use crate::mesh::{build_domain_mesh, build_unit_cube_mesh, DomainTag, Mesh};
use crate::permittivity::Permittivity;
use crate::quadrature::DEFAULT_ORDER;
use crate::solver::{solve, SolveConfig, SolverMethod};

/// Errors below this are treated as zero when computing observed orders.
pub const ERROR_FLOOR: f64 = 1e-10;

impl DomainTag {
    /// Short name used on the command line and in reference tables.
    pub fn short_name(self) -> &'static str {
        match self {
            DomainTag::UnitCube => "cube",
            DomainTag::DomainA => "a",
            DomainTag::DomainB => "b",
            DomainTag::DomainC => "c",
            DomainTag::Imported => "imported",
        }
    }
}

impl FromStr for DomainTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cube" | "unit_cube" => Ok(DomainTag::UnitCube),
            "a" | "domain_a" => Ok(DomainTag::DomainA),
            "b" | "domain_b" => Ok(DomainTag::DomainB),
            "c" | "domain_c" => Ok(DomainTag::DomainC),
            _ => Err(Error::InvalidInput(format!("unknown domain '{s}' (expected cube, a, b or c)"))),
        }
    }
}

/// Builds the mesh of a generated domain; `n` is cells per unit length.
pub fn build_mesh(domain: DomainTag, n: usize) -> Result<Mesh<f64>> {
    match domain {
        DomainTag::UnitCube => build_unit_cube_mesh(n),
        DomainTag::Imported => Err(Error::InvalidInput("imported meshes have no resolution parameter".into())),
        tag => build_domain_mesh(tag, n),
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub domain: DomainTag,
    pub solution: Solution,
    /// Cells per unit length, strictly increasing.
    pub refinements: Vec<usize>,
    pub rho: StabilizationWeights<f64>,
    /// Gauss points per axis for data integrals away from singularities.
    pub quadrature_order: usize,
    pub solver: SolveConfig,
}

impl RunConfig {
    pub fn new(domain: DomainTag, solution: Solution, refinements: Vec<usize>) -> Self {
        Self {
            domain,
            solution,
            refinements,
            rho: StabilizationWeights::default(),
            quadrature_order: DEFAULT_ORDER,
            solver: SolveConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.refinements.is_empty() {
            return Err(Error::InvalidInput("no refinement levels given".into()));
        }
        if self.refinements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!(
                "refinements must be strictly increasing, got {:?}",
                self.refinements
            )));
        }
        if self.quadrature_order == 0 {
            return Err(Error::EmptyQuadrature);
        }
        StabilizationWeights::new(self.rho.rho1, self.rho.rho2, self.rho.rho3)?;
        for &n in &self.refinements {
            let bad = match self.domain {
                DomainTag::Imported => true,
                DomainTag::DomainC => n == 0 || n % 2 != 0,
                _ => n == 0,
            };
            if bad {
                return Err(Error::InvalidResolution(format!(
                    "n = {n} is not a valid resolution for domain {}",
                    self.domain.short_name()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub n: usize,
    pub h: f64,
    pub elements: usize,
    pub dofs: usize,
    /// Measure of the meshed domain.
    pub volume: f64,
    pub error: f64,
    pub rate: Option<f64>,
    pub residual: f64,
    pub iterations: Option<usize>,
    /// Assembly plus solve.
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub domain: DomainTag,
    pub solution: Solution,
    pub rho: [f64; 3],
    pub quadrature_order: usize,
    pub method: SolverMethod,
    pub rows: Vec<StudyRow>,
}

impl ConvergenceReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "h", "dofs", "error", "rate", "residual", "seconds"])?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                format!("{:.6e}", r.h),
                r.dofs.to_string(),
                format!("{:.6e}", r.error),
                r.rate.map(|v| format!("{v:.4}")).unwrap_or_default(),
                format!("{:.3e}", r.residual),
                format!("{:.3}", r.seconds),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// CSV with the timing column blanked, for bitwise reproducibility checks.
    pub fn to_csv_untimed(&self) -> Result<String> {
        let mut copy = self.clone();
        for r in &mut copy.rows {
            r.seconds = 0.0;
        }
        let mut buf = Vec::new();
        copy.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Everything produced on one refinement level.
#[derive(Debug, Clone)]
pub struct LevelOutcome {
    pub row: StudyRow,
    pub mesh: Mesh<f64>,
    pub projected: Vec<Vec3<f64>>,
    pub u_h: Vec<Vec3<f64>>,
}

/// `sqrt(sum_T (Q0u - u_h)^T eps_T (Q0u - u_h) |T|)`.
pub fn compute_error(
    mesh: &Mesh<f64>,
    eps: &Permittivity<f64>,
    projected: &[Vec3<f64>],
    u_h: &[Vec3<f64>],
) -> Result<f64> {
    let ne = mesh.num_elements();
    if projected.len() != ne || u_h.len() != ne || eps.len() != ne {
        return Err(Error::DofMismatch(format!(
            "fields of length {}, {} and {} on a mesh of {ne} elements",
            projected.len(),
            u_h.len(),
            eps.len()
        )));
    }
    let sum: f64 = mesh
        .elements
        .iter()
        .map(|el| {
            let e = projected[el.id] - u_h[el.id];
            e.dot(eps.on(el.id).mul_vec(e)) * el.volume
        })
        .sum();
    Ok(sum.sqrt())
}

/// Observed order between two levels, `None` when either error is negligible.
pub fn observed_rate(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> Option<f64> {
    if e_coarse < ERROR_FLOOR || e_fine < ERROR_FLOOR {
        None
    } else {
        Some((e_coarse / e_fine).ln() / (h_coarse / h_fine).ln())
    }
}

pub fn run_level(config: &RunConfig, n: usize) -> Result<LevelOutcome> {
    let start = Instant::now();
    let mesh = build_mesh(config.domain, n)?;
    let eps = Permittivity::identity(&mesh);
    let problem = ManufacturedProblem::new(config.solution).with_order(config.quadrature_order);
    let dofs = build_dof_map(&mesh);
    let system = assemble(&mesh, &dofs, &eps, &config.rho, &problem)?;
    let report = solve(&system, &config.solver)?;
    let u_h = extract_u(&dofs, &report.solution);
    let projected = problem.project(&mesh)?;
    let error = compute_error(&mesh, &eps, &projected, &u_h)?;
    Ok(LevelOutcome {
        row: StudyRow {
            n,
            h: mesh.meshsize,
            elements: mesh.num_elements(),
            dofs: dofs.total_dofs,
            volume: mesh.elements.iter().map(|e| e.volume).sum(),
            error,
            rate: None,
            residual: report.relative_residual,
            iterations: report.iterations,
            seconds: start.elapsed().as_secs_f64(),
        },
        mesh,
        projected,
        u_h,
    })
}

/// Runs every refinement level in order and returns the report and the finest level.
pub fn run_study_keep_finest(config: &RunConfig) -> Result<(ConvergenceReport, LevelOutcome)> {
    config.validate()?;
    let mut rows: Vec<StudyRow> = Vec::with_capacity(config.refinements.len());
    let mut last = None;
    for &n in &config.refinements {
        let mut outcome = run_level(config, n).map_err(|e| Error::Refinement {
            n,
            source: Box::new(e),
        })?;
        if let Some(prev) = rows.last() {
            outcome.row.rate = observed_rate(prev.error, outcome.row.error, prev.h, outcome.row.h);
        }
        rows.push(outcome.row.clone());
        last = Some(outcome);
    }
    let report = ConvergenceReport {
        domain: config.domain,
        solution: config.solution,
        rho: [config.rho.rho1, config.rho.rho2, config.rho.rho3],
        quadrature_order: config.quadrature_order,
        method: config.solver.method,
        rows,
    };
    Ok((report, last.expect("at least one refinement")))
}

pub fn run_study(config: &RunConfig) -> Result<ConvergenceReport> {
    run_study_keep_finest(config).map(|(r, _)| r)
}

/// One published row: error and observed order at resolution `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub domain: String,
    pub solution: String,
    /// Resolution as printed in the table.
    pub n: usize,
    pub error: f64,
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct ReferenceTable {
    pub rows: Vec<ReferenceRow>,
}

/// Published tables shipped with the crate.
pub const CUBE_CSV: &str = include_str!("../data/reference_cube.csv");
pub const HOLED_CSV: &str = include_str!("../data/reference_holed.csv");

impl ReferenceTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let rows = rdr.deserialize().collect::<std::result::Result<Vec<ReferenceRow>, _>>()?;
        Ok(Self { rows })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Both shipped tables.
    pub fn published() -> Self {
        let mut t = Self::parse(CUBE_CSV).expect("shipped cube table parses");
        t.rows.extend(Self::parse(HOLED_CSV).expect("shipped holed-domain table parses").rows);
        t
    }

    pub fn find(&self, domain: DomainTag, solution: Solution, n: usize) -> Option<&ReferenceRow> {
        self.rows
            .iter()
            .find(|r| r.domain == domain.short_name() && r.solution == solution.name() && r.n == n)
    }
}

/// Table resolution corresponding to a grid with `n` cells per unit length.
///
/// The unit cube and domain c tables count cells per unit length. Domains a and b
/// count cells per two units, so grid resolution `n` appears there as `2n`.
pub fn table_resolution(domain: DomainTag, n: usize) -> usize {
    match domain {
        DomainTag::DomainA | DomainTag::DomainB => 2 * n,
        _ => n,
    }
}

/// Error in the units of the published tables, which report `|e| / |Omega|^(1/2)`.
pub fn table_error(row: &StudyRow) -> f64 {
    row.error / row.volume.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Accepted ratio between computed and published error (either direction).
    pub error_factor: f64,
    /// Accepted absolute deviation of the terminal observed order.
    pub rate_band: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            error_factor: 2.0,
            rate_band: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub n: usize,
    pub table_n: usize,
    pub error: f64,
    /// `error` scaled as in the table, see [`table_error`].
    pub table_error: f64,
    pub reference_error: f64,
    pub error_ok: bool,
    pub rate: Option<f64>,
    pub reference_rate: Option<f64>,
    /// Judged on the last row only.
    pub rate_ok: Option<bool>,
    pub pass: bool,
}

/// Compares each row's error, and the terminal row's observed order, with the table.
pub fn compare_to_reference(
    report: &ConvergenceReport,
    reference: &ReferenceTable,
    tolerance: Tolerance,
) -> Result<Vec<Verdict>> {
    let last = report.rows.len().saturating_sub(1);
    report
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let table_n = table_resolution(report.domain, row.n);
            let reference_row = reference.find(report.domain, report.solution, table_n).ok_or_else(|| {
                Error::MissingReference(format!(
                    "domain {}, solution {}, n = {table_n}",
                    report.domain.short_name(),
                    report.solution
                ))
            })?;
            let scaled = table_error(row);
            let ratio = scaled / reference_row.error;
            let error_ok = ratio <= tolerance.error_factor && ratio >= 1.0 / tolerance.error_factor;
            let rate_ok = if i == last && i > 0 {
                Some(match (row.rate, reference_row.rate) {
                    (Some(r), Some(p)) => (r - p).abs() <= tolerance.rate_band,
                    _ => false,
                })
            } else {
                None
            };
            Ok(Verdict {
                n: row.n,
                table_n,
                error: row.error,
                table_error: scaled,
                reference_error: reference_row.error,
                error_ok,
                rate: row.rate,
                reference_rate: reference_row.rate,
                rate_ok,
                pass: error_ok && rate_ok.unwrap_or(true),
            })
        })
        .collect()
}
