//! The `densleg` command line.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::fem::{analyze, check_strength};
use crate::io::{
    fields::{history_csv, read_density_text, write_density_pgm, write_density_text, write_vtk, VtkFields},
    problem::parse_problem,
    write_atomic,
};
use crate::modal::{modal_analysis, DEFAULT_MODES};
use crate::model::{Material, OptimizationProblem};
use crate::reconstruct::{reanalyze, reconstruct, Axis, ReconstructOptions, VolumeTarget};
use crate::report::{build_comparison, masses_csv, mass_of, AnalysisSummary};
use crate::simp::optimize;

/// Volume tolerance used by `reconstruct --match-volume`.
const MATCH_VOLUME_TOL: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(name = "densleg", version, about = "Topology optimization and analysis of plane-stress plates")]
struct Cli {
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Static analysis of the full-solid structure with a strength check.
    Analyze {
        problem: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Natural frequencies of the full-solid structure.
    Modal {
        problem: PathBuf,
        #[arg(short = 'k', default_value_t = DEFAULT_MODES)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// SIMP compliance minimization.
    Optimize {
        problem: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write a density_NNNN.pgm every N iterations.
        #[arg(long)]
        snapshot_every: Option<usize>,
    },
    /// Threshold, symmetrize and clean a density field, then reanalyze it.
    Reconstruct {
        density: PathBuf,
        problem: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long)]
        symmetry: Option<SymmetryArg>,
        /// Bisect the threshold to reach this volume fraction.
        #[arg(long)]
        match_volume: Option<f64>,
        #[arg(short = 'k', default_value_t = DEFAULT_MODES)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Before/after comparison tables from two result directories.
    Report {
        #[arg(long)]
        before: PathBuf,
        #[arg(long)]
        after: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Problem file supplying the material for strength verdicts (default AA6061).
        #[arg(long)]
        problem: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SymmetryArg {
    /// Mirror across the vertical mid-line.
    X,
    /// Mirror across the horizontal mid-line.
    Y,
}

/// Runs the command line and returns the process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    configure_threads();
    let out = Output { quiet: cli.quiet };
    match run(cli.command, &out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_solver_error() {
                2
            } else {
                1
            }
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("DENSLEG_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

struct Output {
    quiet: bool,
}

impl Output {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<OptimizationProblem> {
    parse_problem(&read_text(path)?).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

fn structure_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| "design".to_string(), |s| s.to_string_lossy().into_owned())
}

fn out_dir(dir: &Path) -> Result<&Path> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn summary_rows(summary: &AnalysisSummary, material: &Material) -> String {
    let mut s = summary.summary_csv();
    if let Some(stress) = summary.max_stress {
        let check = check_strength(stress, material);
        s.push_str(&format!("allowable_pa,{}\nstrength_pass,{}\n", check.allowable, check.pass));
    }
    s
}

fn run(command: Command, out: &Output) -> Result<()> {
    match command {
        Command::Analyze { problem, out: dir } => {
            let p = load_problem(&problem)?;
            let dir = out_dir(&dir)?;
            let design = p.solid_design();
            let r = analyze(&p.mesh, &p.material, &p.loads, &design, p.params.penal)?;
            let summary = AnalysisSummary {
                structure: Some(structure_name(&problem)),
                mass: Some(mass_of(design.densities(), &p.mesh, &p.material)),
                max_stress: Some(r.max_stress),
                max_displacement: Some(r.max_displacement),
                compliance: Some(r.compliance),
                frequencies: Vec::new(),
            };
            write_atomic(&dir.join("summary.csv"), summary_rows(&summary, &p.material))?;
            let vtk = write_vtk(
                &p.mesh,
                &VtkFields {
                    density: design.densities(),
                    displacement: &r.displacement,
                    vm_stress: &r.vm_stress,
                    modes: &[],
                },
            )?;
            write_atomic(&dir.join("fields.vtk"), vtk)?;
            let check = check_strength(r.max_stress, &p.material);
            out.say(format!("mass {:.4} kg", summary.mass.unwrap_or_default()));
            out.say(format!("compliance {:.6e} N*m", r.compliance));
            out.say(format!("max displacement {:.6} mm", r.max_displacement * 1e3));
            out.say(format!(
                "max von Mises stress {:.3} MPa (allowable {:.1} MPa): {}",
                r.max_stress / 1e6,
                check.allowable / 1e6,
                if check.pass { "pass" } else { "FAIL" }
            ));
        }
        Command::Modal { problem, k, out: dir } => {
            let p = load_problem(&problem)?;
            let dir = out_dir(&dir)?;
            let design = p.solid_design();
            let m = modal_analysis(&p.mesh, &p.material, &p.loads, &design, p.params.penal, k)?;
            let summary = AnalysisSummary {
                frequencies: m.frequencies.clone(),
                ..Default::default()
            };
            write_atomic(&dir.join("modal.csv"), summary.modal_csv())?;
            for (i, f) in m.frequencies.iter().enumerate() {
                out.say(format!("mode {}: {f:.4} Hz", i + 1));
            }
        }
        Command::Optimize {
            problem,
            out: dir,
            snapshot_every,
        } => {
            let p = load_problem(&problem)?;
            let dir = out_dir(&dir)?;
            let every = snapshot_every.filter(|&n| n > 0);
            let mut snapshot_error = None;
            let outcome = optimize(&p, |rec, fields| {
                out.say(format!(
                    "iter {:4}  compliance {:.6e}  volfrac {:.5}  change {:.4}",
                    rec.iter, rec.compliance, rec.volume_fraction, rec.max_change
                ));
                if every.is_some_and(|n| rec.iter % n == 0) && snapshot_error.is_none() {
                    let written = write_density_pgm(fields.physical, &p.mesh)
                        .and_then(|pgm| write_atomic(&dir.join(format!("density_{:04}.pgm", rec.iter)), pgm));
                    snapshot_error = written.err();
                }
            })?;
            if let Some(e) = snapshot_error {
                return Err(e);
            }
            let design = &outcome.final_design;
            write_atomic(&dir.join("history.csv"), history_csv(&outcome.history))?;
            write_atomic(&dir.join("density.txt"), write_density_text(&p.mesh, design.densities())?)?;
            write_atomic(&dir.join("density.pgm"), write_density_pgm(design.densities(), &p.mesh)?)?;
            let r = analyze(&p.mesh, &p.material, &p.loads, design, p.params.penal)?;
            let vtk = write_vtk(
                &p.mesh,
                &VtkFields {
                    density: design.densities(),
                    displacement: &r.displacement,
                    vm_stress: &r.vm_stress,
                    modes: &[],
                },
            )?;
            write_atomic(&dir.join("fields.vtk"), vtk)?;
            out.say(format!(
                "{} after {} iterations, volume fraction {:.5}",
                if outcome.converged { "converged" } else { "stopped" },
                outcome.iterations,
                design.volume_fraction()
            ));
        }
        Command::Reconstruct {
            density,
            problem,
            threshold,
            symmetry,
            match_volume,
            k,
            out: dir,
        } => {
            let p = load_problem(&problem)?;
            let (nx, ny, values) = read_density_text(&read_text(&density)?)?;
            if (nx, ny) != (p.mesh.nx(), p.mesh.ny()) {
                return Err(Error::validation(
                    "density",
                    format!("field is {nx}x{ny} but the problem mesh is {}x{}", p.mesh.nx(), p.mesh.ny()),
                ));
            }
            let dir = out_dir(&dir)?;
            let design = p.design.with_densities(values)?;
            let opts = ReconstructOptions {
                threshold,
                symmetry: symmetry.map(|s| match s {
                    SymmetryArg::X => Axis::XMid,
                    SymmetryArg::Y => Axis::YMid,
                }),
                match_volume: match_volume.map(|target| VolumeTarget {
                    target,
                    tol: MATCH_VOLUME_TOL,
                }),
            };
            let layout = reconstruct(&design, &p.mesh, &p.loads, &opts)?;
            let r = reanalyze(&layout, &p, k)?;
            let values = layout.values();
            let summary = AnalysisSummary {
                structure: Some(structure_name(&problem)),
                mass: Some(mass_of(&values, &p.mesh, &p.material)),
                max_stress: Some(r.static_result.max_stress),
                max_displacement: Some(r.static_result.max_displacement),
                compliance: Some(r.static_result.compliance),
                frequencies: r.modal.frequencies.clone(),
            };
            write_atomic(&dir.join("density.txt"), write_density_text(&p.mesh, &values)?)?;
            write_atomic(&dir.join("density.pgm"), write_density_pgm(&values, &p.mesh)?)?;
            write_atomic(&dir.join("summary.csv"), summary_rows(&summary, &p.material))?;
            write_atomic(&dir.join("modal.csv"), summary.modal_csv())?;
            let vtk = write_vtk(
                &p.mesh,
                &VtkFields {
                    density: &values,
                    displacement: &r.static_result.displacement,
                    vm_stress: &r.static_result.vm_stress,
                    modes: &r.modal.modes,
                },
            )?;
            write_atomic(&dir.join("fields.vtk"), vtk)?;
            let check = check_strength(r.static_result.max_stress, &p.material);
            out.say(format!(
                "threshold {:.4}, volume fraction {:.4}, {} island(s) removed",
                layout.threshold,
                layout.volume_fraction(),
                layout.removed_islands
            ));
            out.say(format!(
                "max von Mises stress {:.3} MPa: {}",
                r.static_result.max_stress / 1e6,
                if check.pass { "pass" } else { "FAIL" }
            ));
        }
        Command::Report {
            before,
            after,
            out: dir,
            problem,
        } => {
            let material = match problem {
                Some(path) => load_problem(&path)?.material,
                None => Material::AA6061,
            };
            let b = read_summary(&before)?;
            let a = read_summary(&after)?;
            let report = build_comparison(&b, &a, &material)?;
            let dir = out_dir(&dir)?;
            let table = report.report_csv();
            write_atomic(&dir.join("report.csv"), &table)?;
            write_atomic(&dir.join("frequencies.csv"), report.frequencies_csv())?;
            let masses = masses_csv(report.mass.as_slice());
            write_atomic(&dir.join("masses.csv"), &masses)?;
            out.say(table.trim_end());
            if report.mass.is_some() {
                out.say(masses.trim_end());
            }
        }
    }
    Ok(())
}

fn read_summary(dir: &Path) -> Result<AnalysisSummary> {
    let mut s = AnalysisSummary::default();
    let summary = dir.join("summary.csv");
    let modal = dir.join("modal.csv");
    if !summary.exists() && !modal.exists() {
        return Err(Error::Io(format!("{}: no summary.csv or modal.csv", dir.display())));
    }
    let annotate = |path: &Path, e: Error| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    };
    if summary.exists() {
        s.read_summary_csv(&read_text(&summary)?).map_err(|e| annotate(&summary, e))?;
    }
    if modal.exists() {
        s.read_modal_csv(&read_text(&modal)?).map_err(|e| annotate(&modal, e))?;
    }
    Ok(s)
}
