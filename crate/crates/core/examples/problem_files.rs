//! Parse a problem file, inspect it, and write it back in canonical form.
//!
//! `cargo run --example problem_files [path.prob]`

use densleg::io::{parse_problem, serialize_problem};

const INLINE: &str = "\
# bracket, 40 x 20 mm, bolted on the left
[domain]
nx = 40
ny = 20
elem_size_mm = 1
thickness_mm = 2

[material]
preset = AA6061
yield_mpa = 240

[loads]
load = 40,0,0,-250
gravity_m_s2 = 9.81

[supports]
fix_edge = left,both

[optimization]
volfrac = 0.4
penal = 3
rmin_elem = 1.5

[passive]
solid_rect = 36,0,39,2
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => INLINE.to_string(),
    };
    let p = parse_problem(&text)?;
    println!(
        "mesh {} x {}, a = {} m, t = {} m",
        p.mesh.nx(),
        p.mesh.ny(),
        p.mesh.elem_size(),
        p.mesh.thickness()
    );
    println!(
        "E = {:.3e} Pa, ν = {}, ρ = {} kg/m³, σy = {:.3e} Pa",
        p.material.young_modulus, p.material.poisson, p.material.density, p.material.yield_strength
    );
    println!("{} point load(s), {} fixed DOF(s)", p.loads.point_loads.len(), p.loads.fixed_dofs.len());
    let passive = p.design.passive_solid().iter().filter(|&&s| s).count();
    println!("{passive} passive solid element(s), volume fraction target {}", p.params.volfrac);

    let canonical = serialize_problem(&p);
    assert_eq!(parse_problem(&canonical)?, p);
    println!("\ncanonical form:\n{canonical}");

    // errors carry the offending line
    let broken = INLINE.replace("penal = 3", "penal = three");
    if let Err(e) = parse_problem(&broken) {
        println!("rejected edit: {e}");
    }
    Ok(())
}
