mod common;

use common::Cantilever;
use densleg::fem::{analyze, StaticResult};
use densleg::modal::modal_analysis;
use densleg::reconstruct::{reanalyze, reanalyze_static, Axis, BinaryLayout};
use densleg::{Component, DesignField, GridMesh, LoadCase, Material, OptimizationProblem, SimpParams};

#[test]
fn cantilever_deflection_converges_from_below() {
    let mut tips = Vec::new();
    for (nx, ny) in [(40, 4), (80, 8), (160, 16)] {
        let c = Cantilever::new(nx, ny, 0.16, 0.001, 100.0);
        let r = analyze(&c.mesh, &c.material, &c.loads, &c.solid(), 3.0).unwrap();
        tips.push((c.tip_deflection(&r.displacement), c.timoshenko_tip()));
    }
    for w in tips.windows(2) {
        assert!(w[1].0 > w[0].0, "refinement must increase the tip deflection: {tips:?}");
    }
    let (fine, exact) = tips[2];
    assert!((fine - exact).abs() / exact < 0.05);
}

#[test]
fn cantilever_frequency_decreases_with_refinement() {
    let mut f1 = Vec::new();
    for (nx, ny) in [(20, 2), (40, 4), (80, 8)] {
        let c = Cantilever::new(nx, ny, 0.16, 0.001, 100.0);
        let m = modal_analysis(&c.mesh, &c.material, &c.loads, &c.solid(), 3.0, 1).unwrap();
        f1.push(m.frequencies[0]);
    }
    assert!(f1[0] > f1[1] && f1[1] > f1[2], "{f1:?}");
}

/// Simply supported bridge: pinned bottom corners, centre load on the top edge.
fn bridge(nx: usize, ny: usize) -> OptimizationProblem {
    let mesh = GridMesh::new(nx, ny, 1e-3, 1e-3).unwrap();
    let loads = LoadCase::new()
        .fix_node(mesh.node_index(0, 0), true, true)
        .fix_node(mesh.node_index(nx, 0), true, true)
        .with_load(mesh.node_index(nx / 2, ny), Component::Y, -50.0);
    let n = mesh.element_count();
    OptimizationProblem::new(mesh, Material::AA6061, loads, vec![false; n], vec![false; n], 1e-3, SimpParams::default())
        .unwrap()
}

fn assert_close(a: &StaticResult, b: &StaticResult, tol: f64) {
    assert!((a.compliance - b.compliance).abs() <= tol * b.compliance);
    let scale = b.max_displacement;
    for (x, y) in a.displacement.iter().zip(&b.displacement) {
        assert!((x - y).abs() <= tol * scale);
    }
}

#[test]
fn full_layout_reanalysis_matches_solid_baseline() {
    let p = bridge(12, 4);
    let solid = p.solid_design();
    let baseline = analyze(&p.mesh, &p.material, &p.loads, &solid, p.params.penal).unwrap();
    let layout = BinaryLayout::full(&solid);
    let re = reanalyze_static(&layout, &p).unwrap();
    assert_close(&re, &baseline, 1e-10);
    assert!((re.max_stress - baseline.max_stress).abs() <= 1e-10 * baseline.max_stress);
}

#[test]
fn symmetric_layout_gives_symmetric_response() {
    let p = bridge(12, 6);
    let mesh = &p.mesh;
    // arch: remove a symmetric hole in the middle
    let mut layout = BinaryLayout::full(&p.solid_design());
    for e in 0..mesh.element_count() {
        let (i, j) = mesh.element_ij(e);
        if (4..8).contains(&i) && (1..4).contains(&j) {
            layout.solid[e] = false;
        }
    }
    let r = reanalyze(&layout, &p, 4).unwrap();
    let u = &r.static_result.displacement;
    let scale = r.static_result.max_displacement;
    for n in 0..mesh.node_count() {
        let m = Axis::XMid.mirror_node(mesh, n);
        assert!((u[2 * n] + u[2 * m]).abs() <= 1e-8 * scale, "ux not antisymmetric at node {n}");
        assert!((u[2 * n + 1] - u[2 * m + 1]).abs() <= 1e-8 * scale, "uy not symmetric at node {n}");
    }
    let vm = &r.static_result.vm_stress;
    for e in 0..mesh.element_count() {
        let m = Axis::XMid.mirror(mesh, e);
        assert!((vm[e] - vm[m]).abs() <= 1e-8 * r.static_result.max_stress);
    }
    // removing material softens the structure
    let solid = analyze(mesh, &p.material, &p.loads, &p.solid_design(), 3.0).unwrap();
    assert!(r.static_result.compliance > solid.compliance);
}

#[test]
fn removed_element_matches_soft_limit() {
    // removing an element is the limit of an almost-void element
    let p = bridge(8, 4);
    let mut layout = BinaryLayout::full(&p.solid_design());
    let corner = p.mesh.element_index(3, 3);
    layout.solid[corner] = false;
    let removed = reanalyze_static(&layout, &p).unwrap();
    let gray = DesignField::new(layout.values().iter().map(|&v| v.max(1e-6)).collect(), vec![false; 32], vec![false; 32], 1e-6)
        .unwrap();
    let soft = analyze(&p.mesh, &p.material, &p.loads, &gray, 3.0).unwrap();
    assert!((removed.compliance - soft.compliance).abs() <= 1e-7 * soft.compliance);
    assert_eq!(removed.vm_stress[corner], 0.0);
}
