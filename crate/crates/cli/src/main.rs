use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use divcurl::harness::{build_mesh, run_study_keep_finest, Verdict};
use divcurl::{
    assemble, build_dof_map, check_compatibility, compare_to_reference, export_vtk, DomainTag, ManufacturedProblem,
    Permittivity, ReferenceTable, RunConfig, Solution, SolveConfig, SolverMethod, StabilizationWeights, Tolerance,
};

#[derive(Parser)]
#[command(name = "divcurl", version, about = "Weak Galerkin solver for the 3D div-curl system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence study on a manufactured solution.
    Solve(SolveArgs),
    /// Check the solvability conditions of a manufactured problem's data.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Direct,
    Iterative,
}

#[derive(Args)]
struct Problem {
    /// cube, a, b or c
    #[arg(long)]
    domain: DomainTag,
    /// u1 ... u6 or const
    #[arg(long)]
    solution: Solution,
    /// Cells per unit length (single level).
    #[arg(long, required_unless_present = "refinements")]
    n: Option<usize>,
    /// Cells per unit length of each level, e.g. 2,4,8,16.
    #[arg(long, value_delimiter = ',')]
    refinements: Option<Vec<usize>>,
    /// Gauss points per axis for data integrals.
    #[arg(long, default_value_t = divcurl::quadrature::DEFAULT_ORDER)]
    quad: usize,
}

impl Problem {
    fn levels(&self) -> Vec<usize> {
        self.refinements.clone().unwrap_or_else(|| self.n.into_iter().collect())
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long, default_value_t = 1.0)]
    rho1: f64,
    #[arg(long, default_value_t = 1.0)]
    rho2: f64,
    #[arg(long, default_value_t = 1.0)]
    rho3: f64,
    #[arg(long, value_enum, default_value_t = Method::Direct)]
    solver: Method,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Cell field u_h of the finest level.
    #[arg(long)]
    vtk: Option<PathBuf>,
    /// Matrix Market file of the finest level's system matrix.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Reference table CSV (domain,solution,n,error,rate), or `published`.
    #[arg(long)]
    reference: Option<String>,
    /// Accepted ratio between computed and reference error.
    #[arg(long, default_value_t = Tolerance::default().error_factor, requires = "reference")]
    tolerance: f64,
    /// Accepted deviation of the terminal observed order.
    #[arg(long, default_value_t = Tolerance::default().rate_band, requires = "reference")]
    rate_band: f64,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    problem: Problem,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Check(args) => run_check(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every reference comparison passed.
fn run_solve(args: SolveArgs) -> Result<bool> {
    let p = &args.problem;
    let mut config = RunConfig::new(p.domain, p.solution, p.levels());
    config.rho = StabilizationWeights::new(args.rho1, args.rho2, args.rho3)?;
    config.quadrature_order = p.quad;
    config.solver = match args.solver {
        Method::Direct => SolveConfig::default(),
        Method::Iterative => SolveConfig::iterative(),
    };
    let reference = match args.reference.as_deref() {
        None => None,
        Some("published") => Some(ReferenceTable::published()),
        Some(path) => Some(ReferenceTable::load(path)?),
    };

    let (report, finest) = run_study_keep_finest(&config)?;
    println!(
        "domain {}, solution {}, rho = {:?}, {} solver",
        p.domain.short_name(),
        p.solution,
        report.rho,
        match report.method {
            SolverMethod::Direct => "direct",
            SolverMethod::Iterative => "iterative",
        }
    );
    println!("{:>4} {:>10} {:>9} {:>12} {:>7} {:>10} {:>8}", "n", "h", "dofs", "error", "rate", "residual", "seconds");
    for r in &report.rows {
        let rate = r.rate.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
        println!(
            "{:>4} {:>10.4e} {:>9} {:>12.4e} {:>7} {:>10.2e} {:>8.2}",
            r.n, r.h, r.dofs, r.error, rate, r.residual, r.seconds
        );
    }

    let verdicts = match &reference {
        Some(table) => {
            let tolerance = Tolerance {
                error_factor: args.tolerance,
                rate_band: args.rate_band,
            };
            let v = compare_to_reference(&report, table, tolerance)?;
            print_verdicts(&v);
            Some(v)
        }
        None => None,
    };

    if let Some(path) = &args.csv {
        report.save_csv(path)?;
    }
    if let Some(path) = &args.json {
        let mut value = serde_json::to_value(&report)?;
        value["refinements"] = serde_json::to_value(&config.refinements)?;
        if let Some(v) = &verdicts {
            value["comparison"] = serde_json::to_value(v)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(&value)?).with_context(|| format!("{}", path.display()))?;
    }
    if let Some(path) = &args.vtk {
        export_vtk(&finest.mesh, "u_h", &finest.u_h, path)?;
    }
    if let Some(path) = &args.matrix {
        let n = *config.refinements.last().expect("validated");
        let mesh = build_mesh(p.domain, n)?;
        let problem = ManufacturedProblem::new(p.solution).with_order(p.quad);
        let dofs = build_dof_map(&mesh);
        let system = assemble(&mesh, &dofs, &Permittivity::identity(&mesh), &config.rho, &problem)?;
        system.matrix.write_matrix_market(path)?;
    }
    Ok(verdicts.is_none_or(|v| v.iter().all(|v| v.pass)))
}

fn print_verdicts(verdicts: &[Verdict]) {
    println!("reference comparison (errors scaled by |Omega|^-1/2 as in the tables):");
    for v in verdicts {
        let rate = match (v.rate, v.reference_rate, v.rate_ok) {
            (Some(r), Some(p), Some(ok)) => format!(", rate {r:.2} vs {p:.2} {}", if ok { "ok" } else { "off" }),
            (_, _, Some(false)) => ", rate missing".to_string(),
            _ => String::new(),
        };
        println!(
            "  n = {:>2} (table n = {:>2}): {:.3e} vs {:.3e}{}{}  {}",
            v.n,
            v.table_n,
            v.table_error,
            v.reference_error,
            if v.error_ok { "" } else { " off" },
            rate,
            if v.pass { "PASS" } else { "FAIL" }
        );
    }
}

fn run_check(args: CheckArgs) -> Result<bool> {
    let p = &args.problem;
    let levels = p.levels();
    if levels.is_empty() {
        bail!("no resolution given");
    }
    let problem = ManufacturedProblem::new(p.solution).with_order(p.quad);
    for n in levels {
        let mesh = build_mesh(p.domain, n)?;
        let r = check_compatibility(&problem, &mesh, p.quad)?;
        println!(
            "n = {n}: |div g| <= {:.2e}, |chi . n| <= {:.2e}, probe residual {:.2e} over {} vertices",
            r.max_divergence, r.max_tangency, r.max_probe_residual, r.probes
        );
        for w in &r.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(true)
}
