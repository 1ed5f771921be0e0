//! Static analysis of a solid cantilever plate, checked against beam theory.
//!
//! `cargo run --release --example static_analysis`

use densleg::fem::{analyze, check_strength};
use densleg::{Component, DesignField, GridMesh, LoadCase, Material};

fn main() -> densleg::Result<()> {
    // 160 x 16 mm plate, 1 mm thick, clamped on the left edge
    let (nx, ny) = (80, 8);
    let mesh = GridMesh::new(nx, ny, 2e-3, 1e-3)?;
    let material = Material::AA6061;
    let p = 100.0;
    let mut loads = LoadCase::new();
    for j in 0..=ny {
        loads = loads.fix_node(mesh.node_index(0, j), true, true);
        let share = if j == 0 || j == ny { 0.5 } else { 1.0 } / ny as f64;
        loads = loads.with_load(mesh.node_index(nx, j), Component::Y, -p * share);
    }
    let design = DesignField::uniform(mesh.element_count(), 1.0, 1e-3)?;

    let r = analyze(&mesh, &material, &loads, &design, 3.0)?;
    let tip = mesh.node_index(nx, ny / 2);
    let deflection = -r.displacement[2 * tip + 1];

    let (l, h, t): (f64, f64, f64) = (0.16, 0.016, 1e-3);
    let i = t * h * h * h / 12.0;
    let beam = p * l.powi(3) / (3.0 * material.young_modulus * i) + p * l / (5.0 / 6.0 * material.shear_modulus() * t * h);

    let check = check_strength(r.max_stress, &material);
    println!("tip deflection    {:.4} mm (beam theory {:.4} mm)", deflection * 1e3, beam * 1e3);
    println!("compliance        {:.6} N·m", r.compliance);
    println!("max displacement  {:.4} mm", r.max_displacement * 1e3);
    println!(
        "max von Mises     {:.2} MPa, allowable {:.1} MPa: {}",
        r.max_stress / 1e6,
        check.allowable / 1e6,
        if check.pass { "pass" } else { "fail" }
    );
    println!(
        "away from supports {:.2} MPa",
        r.max_stress_excluding_supports(&mesh, &loads) / 1e6
    );
    Ok(())
}
