//! The full lightweighting loop on the bundled femur fixation plate.
//!
//! `cargo run --release --example femur_plate_pipeline [out_dir]`
//!
//! Solid baseline analysis, SIMP optimization, reconstruction at the target volume
//! fraction, reanalysis and the before/after tables. Every intermediate file lands in
//! `out_dir` (default: `densleg-femur` in the system temp directory).

use std::path::PathBuf;

use densleg::fem::analyze;
use densleg::io::{history_csv, parse_problem, write_atomic, write_density_pgm, write_density_text};
use densleg::modal::modal_analysis;
use densleg::reconstruct::{reanalyze, reconstruct, ReconstructOptions, VolumeTarget};
use densleg::report::{build_comparison, mass_of, masses_csv, AnalysisSummary};
use densleg::simp::optimize;

const MODES: usize = 6;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("densleg-femur"));
    std::fs::create_dir_all(&out)?;
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/problems/femur_plate.prob");
    let p = parse_problem(&std::fs::read_to_string(path)?)?;

    let solid = p.solid_design();
    let base = analyze(&p.mesh, &p.material, &p.loads, &solid, p.params.penal)?;
    let base_modes = modal_analysis(&p.mesh, &p.material, &p.loads, &solid, p.params.penal, MODES)?;
    let before = AnalysisSummary {
        structure: Some("femur plate".into()),
        mass: Some(mass_of(solid.densities(), &p.mesh, &p.material)),
        max_stress: Some(base.max_stress),
        max_displacement: Some(base.max_displacement),
        compliance: Some(base.compliance),
        frequencies: base_modes.frequencies,
    };
    println!("baseline: {:.2} MPa, {:.3} mm", base.max_stress / 1e6, base.max_displacement * 1e3);

    let outcome = optimize(&p, |rec, _| {
        if rec.iter % 25 == 0 {
            println!("iter {:>4}  compliance {:.5e}", rec.iter, rec.compliance);
        }
    })?;
    println!("optimized in {} iterations", outcome.iterations);
    let gray = outcome.final_design.densities();
    write_atomic(&out.join("history.csv"), history_csv(&outcome.history))?;
    write_atomic(&out.join("gray.txt"), write_density_text(&p.mesh, gray)?)?;
    write_atomic(&out.join("gray.pgm"), write_density_pgm(gray, &p.mesh)?)?;

    let opts = ReconstructOptions {
        match_volume: Some(VolumeTarget {
            target: p.params.volfrac,
            tol: 1e-3,
        }),
        ..ReconstructOptions::default()
    };
    let layout = reconstruct(&outcome.final_design, &p.mesh, &p.loads, &opts)?;
    let values = layout.values();
    write_atomic(&out.join("layout.pgm"), write_density_pgm(&values, &p.mesh)?)?;
    let r = reanalyze(&layout, &p, MODES)?;
    let after = AnalysisSummary {
        structure: before.structure.clone(),
        mass: Some(mass_of(&values, &p.mesh, &p.material)),
        max_stress: Some(r.static_result.max_stress),
        max_displacement: Some(r.static_result.max_displacement),
        compliance: Some(r.static_result.compliance),
        frequencies: r.modal.frequencies,
    };
    println!("layout: cut {:.4}, volume fraction {:.4}", layout.threshold, layout.volume_fraction());

    let report = build_comparison(&before, &after, &p.material)?;
    let tables = [
        ("report.csv", report.report_csv()),
        ("frequencies.csv", report.frequencies_csv()),
        ("masses.csv", masses_csv(&[report.mass.clone().expect("masses present")])),
    ];
    for (name, text) in tables {
        println!("\n{name}\n{text}");
        write_atomic(&out.join(name), text)?;
    }
    println!("files in {}", out.display());
    Ok(())
}
