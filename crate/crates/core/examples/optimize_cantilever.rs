//! SIMP optimization of the bundled cantilever problem.
//!
//! `cargo run --release --example optimize_cantilever [out_dir]`
//!
//! Writes `history.csv`, `density.txt`, `density.pgm` and `fields.vtk` to `out_dir`
//! (default: a `densleg-cantilever` folder in the system temp directory).

use std::path::PathBuf;

use densleg::fem::analyze;
use densleg::io::{history_csv, parse_problem, write_atomic, write_density_pgm, write_density_text, write_vtk, VtkFields};
use densleg::simp::optimize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("densleg-cantilever"));
    std::fs::create_dir_all(&out)?;

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/problems/cantilever.prob");
    let p = parse_problem(&std::fs::read_to_string(path)?)?;

    let outcome = optimize(&p, |rec, _| {
        if rec.iter % 10 == 1 {
            println!(
                "iter {:>4}  compliance {:.6e}  volume {:.4}  change {:.4}",
                rec.iter, rec.compliance, rec.volume_fraction, rec.max_change
            );
        }
    })?;
    let last = outcome.history.last().expect("at least one iteration");
    println!(
        "{} after {} iterations, compliance {:.6e} N·m, volume fraction {:.4}",
        if outcome.converged { "converged" } else { "stopped" },
        outcome.iterations,
        last.compliance,
        last.volume_fraction
    );

    let design = &outcome.final_design;
    let x = design.densities();
    let r = analyze(&p.mesh, &p.material, &p.loads, design, p.params.penal)?;
    write_atomic(&out.join("history.csv"), history_csv(&outcome.history))?;
    write_atomic(&out.join("density.txt"), write_density_text(&p.mesh, x)?)?;
    write_atomic(&out.join("density.pgm"), write_density_pgm(x, &p.mesh)?)?;
    let vtk = write_vtk(
        &p.mesh,
        &VtkFields {
            density: x,
            displacement: &r.displacement,
            vm_stress: &r.vm_stress,
            modes: &[],
        },
    )?;
    write_atomic(&out.join("fields.vtk"), vtk)?;
    println!("results in {}", out.display());
    Ok(())
}
