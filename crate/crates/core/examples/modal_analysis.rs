//! Natural frequencies of a clamped plate strip, with a mass-orthogonality check.
//!
//! `cargo run --release --example modal_analysis`

use densleg::modal::{assemble_mass, modal_analysis};
use densleg::{DesignField, GridMesh, LoadCase, Material};

fn main() -> densleg::Result<()> {
    let (nx, ny) = (60, 6);
    let mesh = GridMesh::new(nx, ny, 2e-3, 1e-3)?;
    let material = Material::AA6061;
    let mut loads = LoadCase::new();
    for j in 0..=ny {
        loads = loads.fix_node(mesh.node_index(0, j), true, true);
    }
    let design = DesignField::uniform(mesh.element_count(), 1.0, 1e-3)?;

    let modes = modal_analysis(&mesh, &material, &loads, &design, 3.0, 4)?;

    // clamped-free Euler-Bernoulli reference for the first bending mode
    let (l, h, t): (f64, f64, f64) = (0.12, 0.012, 1e-3);
    let ei = material.young_modulus * t * h.powi(3) / 12.0;
    let beta = 1.875_104_068_711_961_f64;
    let f1 = beta * beta / (2.0 * std::f64::consts::PI * l * l) * (ei / (material.density * t * h)).sqrt();

    for (k, f) in modes.frequencies.iter().enumerate() {
        println!("mode {}  {:>10.2} Hz", k + 1, f);
    }
    println!("beam reference for mode 1: {f1:.2} Hz");

    let m = assemble_mass(&mesh, design.densities(), &material);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(&m).map(|((x, y), w)| x * y * w).sum::<f64>();
    println!(
        "φ1ᵀMφ1 = {:.12}, φ1ᵀMφ2 = {:.1e}",
        dot(&modes.modes[0], &modes.modes[0]),
        dot(&modes.modes[0], &modes.modes[1])
    );
    Ok(())
}
