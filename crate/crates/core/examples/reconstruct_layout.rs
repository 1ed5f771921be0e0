//! Turn a gray optimized design into a clean solid/void layout and reanalyze it.
//!
//! `cargo run --release --example reconstruct_layout`
//!
//! A small simply supported beam is optimized, then cut three ways: a plain 0.5 threshold,
//! the same cut mirrored about the vertical mid-line, and a cut bisected to hit the
//! target volume fraction.

use densleg::fem::check_strength;
use densleg::reconstruct::{reanalyze, reconstruct, Axis, ReconstructOptions, VolumeTarget};
use densleg::simp::optimize;
use densleg::{Component, GridMesh, LoadCase, Material, OptimizationProblem, SimpParams};

fn main() -> densleg::Result<()> {
    let (nx, ny) = (48, 16);
    let mesh = GridMesh::new(nx, ny, 1e-3, 2e-3)?;
    let loads = LoadCase::new()
        .fix_node(mesh.node_index(0, 0), true, true)
        .fix_node(mesh.node_index(nx, 0), false, true)
        .with_load(mesh.node_index(nx / 2, ny), Component::Y, -200.0);
    let n = mesh.element_count();
    let params = SimpParams {
        volfrac: 0.4,
        ..SimpParams::default()
    };
    let problem = OptimizationProblem::new(mesh, Material::AA6061, loads, vec![false; n], vec![false; n], 1e-3, params)?;

    let outcome = optimize(&problem, |_, _| {})?;
    println!("optimized in {} iterations", outcome.iterations);
    let gray = &outcome.final_design;

    let variants = [
        ("threshold 0.5", ReconstructOptions::default()),
        (
            "mirrored",
            ReconstructOptions {
                symmetry: Some(Axis::XMid),
                ..ReconstructOptions::default()
            },
        ),
        (
            "volume matched",
            ReconstructOptions {
                match_volume: Some(VolumeTarget { target: 0.4, tol: 1e-3 }),
                ..ReconstructOptions::default()
            },
        ),
    ];
    for (name, opts) in variants {
        let layout = reconstruct(gray, &problem.mesh, &problem.loads, &opts)?;
        let r = reanalyze(&layout, &problem, 3)?;
        let s = &r.static_result;
        let check = check_strength(s.max_stress, &problem.material);
        println!(
            "{name:<15} cut {:.4}  vf {:.4}  islands removed {}  compliance {:.4e}  σmax {:.1} MPa ({})  f1 {:.1} Hz",
            layout.threshold,
            layout.volume_fraction(),
            layout.removed_islands,
            s.compliance,
            s.max_stress / 1e6,
            if check.pass { "pass" } else { "fail" },
            r.modal.frequencies[0]
        );
    }
    Ok(())
}
