//! Linear static analysis of density-weighted plane-stress Q4 grids.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{SMatrix, SVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{DesignField, GridMesh, LoadCase, Material};
use crate::simp::element_moduli;
use crate::solver::{reduced_residual, Factorization, ReducedSystem};
use crate::sparse::CsrMatrix;

pub type ElementMatrix = SMatrix<f64, 8, 8>;
pub type ElementVector = SVector<f64, 8>;
type StrainMatrix = SMatrix<f64, 3, 8>;

/// Required relative residual of the reduced equilibrium equations.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Natural coordinates of the four nodes, counter-clockwise from bottom-left.
const NODE_XI: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];

/// Plane-stress constitutive matrix for unit Young's modulus.
fn unit_constitutive(poisson: f64) -> SMatrix<f64, 3, 3> {
    let c = 1.0 / (1.0 - poisson * poisson);
    SMatrix::<f64, 3, 3>::new(
        c,
        c * poisson,
        0.0,
        c * poisson,
        c,
        0.0,
        0.0,
        0.0,
        c * (1.0 - poisson) / 2.0,
    )
}

/// Strain-displacement matrix of a square element of side `a` at `(xi, eta)`.
fn strain_matrix(xi: f64, eta: f64, a: f64) -> StrainMatrix {
    let mut b = StrainMatrix::zeros();
    for (n, &(xn, yn)) in NODE_XI.iter().enumerate() {
        let dx = 0.25 * xn * (1.0 + eta * yn) * 2.0 / a;
        let dy = 0.25 * yn * (1.0 + xi * xn) * 2.0 / a;
        b[(0, 2 * n)] = dx;
        b[(1, 2 * n + 1)] = dy;
        b[(2, 2 * n)] = dy;
        b[(2, 2 * n + 1)] = dx;
    }
    b
}

/// Q4 plane-stress stiffness for `E = 1`, `t = 1` using 2×2 Gauss quadrature.
///
/// For a square element the result does not depend on the edge length.
pub fn unit_element_stiffness(poisson: f64) -> ElementMatrix {
    let d = unit_constitutive(poisson);
    let g = 1.0 / 3f64.sqrt();
    let a = 1.0;
    let det_j = a * a / 4.0;
    let mut k = ElementMatrix::zeros();
    for xi in [-g, g] {
        for eta in [-g, g] {
            let b = strain_matrix(xi, eta, a);
            k += b.transpose() * d * b * det_j;
        }
    }
    // quadrature round-off can leave ulp-level asymmetry
    (k + k.transpose()) * 0.5
}

/// Element stiffness `E·t·k̂` for a square element.
pub fn element_stiffness(material: &Material, thickness: f64, elem_size: f64) -> Result<ElementMatrix> {
    material.validate()?;
    if !(thickness > 0.0) {
        return Err(Error::validation("thickness", "must be positive"));
    }
    if !(elem_size > 0.0) {
        return Err(Error::validation("elem_size", "must be positive"));
    }
    Ok(unit_element_stiffness(material.poisson) * (material.young_modulus * thickness))
}

/// Scatter plan mapping every element's 8×8 block into a shared CSR pattern.
#[derive(Clone, Debug)]
pub struct Assembler {
    mesh: GridMesh,
    unit_ke: ElementMatrix,
    pattern: CsrMatrix,
    slots: Vec<[usize; 64]>,
}

impl Assembler {
    pub fn new(mesh: &GridMesh, poisson: f64) -> Self {
        let pattern = CsrMatrix::grid_pattern(mesh);
        let slots = (0..mesh.element_count())
            .map(|e| {
                let dofs = mesh.element_dofs_unchecked(e);
                let mut s = [0; 64];
                for r in 0..8 {
                    for c in 0..8 {
                        s[r * 8 + c] = pattern.position(dofs[r], dofs[c]).expect("grid pattern");
                    }
                }
                s
            })
            .collect();
        Self {
            mesh: *mesh,
            unit_ke: unit_element_stiffness(poisson),
            pattern,
            slots,
        }
    }

    pub fn mesh(&self) -> &GridMesh {
        &self.mesh
    }

    pub fn pattern(&self) -> &CsrMatrix {
        &self.pattern
    }

    pub fn unit_element_stiffness(&self) -> &ElementMatrix {
        &self.unit_ke
    }

    /// `K = Σₑ Eₑ·t·k̂` in element order. Elements with zero modulus are left out.
    pub fn assemble(&self, moduli: &[f64]) -> CsrMatrix {
        assert_eq!(moduli.len(), self.mesh.element_count());
        let mut k = self.pattern.clone();
        let t = self.mesh.thickness();
        let values = k.values_mut();
        for (slots, &modulus) in self.slots.iter().zip(moduli) {
            if modulus == 0.0 {
                continue;
            }
            let scale = modulus * t;
            for r in 0..8 {
                for c in 0..8 {
                    values[slots[r * 8 + c]] += scale * self.unit_ke[(r, c)];
                }
            }
        }
        k
    }

    /// `uₑᵀ k̂ uₑ` for every element (unit modulus and thickness).
    pub fn element_energies(&self, u: &[f64]) -> Vec<f64> {
        (0..self.mesh.element_count())
            .into_par_iter()
            .map(|e| {
                let ue = gather(&self.mesh, u, e);
                ue.dot(&(self.unit_ke * ue))
            })
            .collect()
    }
}

pub(crate) fn gather(mesh: &GridMesh, u: &[f64], e: usize) -> ElementVector {
    let dofs = mesh.element_dofs_unchecked(e);
    ElementVector::from_fn(|i, _| u[dofs[i]])
}

/// Assembles the global stiffness for a design using SIMP-interpolated moduli.
pub fn assemble_stiffness(mesh: &GridMesh, design: &DesignField, penal: f64, material: &Material) -> Result<CsrMatrix> {
    if design.len() != mesh.element_count() {
        return Err(Error::LengthMismatch {
            what: "design",
            expected: mesh.element_count(),
            got: design.len(),
        });
    }
    material.validate()?;
    let moduli = element_moduli(design.densities(), penal, material.young_modulus);
    Ok(Assembler::new(mesh, material.poisson).assemble(&moduli))
}

/// Free DOFs: not fixed and attached to at least one active element.
pub fn free_dofs(mesh: &GridMesh, fixed: &BTreeSet<usize>, active: Option<&[bool]>) -> Vec<usize> {
    let mut attached = vec![active.is_none(); mesh.dof_count()];
    if let Some(active) = active {
        for e in (0..mesh.element_count()).filter(|&e| active[e]) {
            for d in mesh.element_dofs_unchecked(e) {
                attached[d] = true;
            }
        }
    }
    (0..mesh.dof_count())
        .filter(|d| attached[*d] && !fixed.contains(d))
        .collect()
}

/// Solves `K u = f` on a prepared reduced system; constrained DOFs stay exactly zero.
pub fn solve_reduced_system(k: &CsrMatrix, sys: &ReducedSystem, f: &[f64]) -> Result<Vec<f64>> {
    let fac = sys.factor(k, None)?;
    solve_with_factor(k, &fac, f)
}

pub(crate) fn solve_with_factor(k: &CsrMatrix, fac: &Factorization<'_>, f: &[f64]) -> Result<Vec<f64>> {
    let sys = fac.system();
    let n = k.dim();
    let mut u = sys.expand(&fac.solve_reduced(&sys.restrict(f)), n);
    let mut residual = reduced_residual(k, sys, &u, f);
    for _ in 0..3 {
        if residual <= RESIDUAL_TOL {
            break;
        }
        let ku = k.mul_vec(&u);
        let r: Vec<f64> = sys.dofs().iter().map(|&d| f[d] - ku[d]).collect();
        let du = fac.solve_reduced(&r);
        for (&d, v) in sys.dofs().iter().zip(du) {
            u[d] += v;
        }
        residual = reduced_residual(k, sys, &u, f);
    }
    if residual > RESIDUAL_TOL {
        return Err(Error::SolverResidual { residual });
    }
    Ok(u)
}

/// Solves `K u = f` with every DOF in `loads.fixed_dofs` held at zero.
pub fn solve_static(k: &CsrMatrix, loads: &LoadCase, f: &[f64]) -> Result<Vec<f64>> {
    if f.len() != k.dim() {
        return Err(Error::LengthMismatch {
            what: "load vector",
            expected: k.dim(),
            got: f.len(),
        });
    }
    if loads.fixed_dofs.is_empty() {
        return Err(Error::InsufficientConstraints { equation: 0 });
    }
    let free: Vec<usize> = (0..k.dim()).filter(|d| !loads.fixed_dofs.contains(d)).collect();
    let sys = ReducedSystem::new(k, &free);
    solve_reduced_system(k, &sys, f)
}

/// Solves with prescribed (possibly nonzero) displacements on a subset of DOFs.
pub fn solve_prescribed(k: &CsrMatrix, prescribed: &BTreeMap<usize, f64>, f: &[f64]) -> Result<Vec<f64>> {
    let n = k.dim();
    let mut u = vec![0.0; n];
    for (&d, &v) in prescribed {
        u[d] = v;
    }
    let ku = k.mul_vec(&u);
    let rhs: Vec<f64> = (0..n).map(|d| f[d] - ku[d]).collect();
    let free: Vec<usize> = (0..n).filter(|d| !prescribed.contains_key(d)).collect();
    let sys = ReducedSystem::new(k, &free);
    let du = solve_reduced_system(k, &sys, &rhs)?;
    for &d in &free {
        u[d] = du[d];
    }
    Ok(u)
}

/// Compliance `Fᵀ U` in N·m.
pub fn compliance(u: &[f64], f: &[f64]) -> Result<f64> {
    if u.len() != f.len() {
        return Err(Error::LengthMismatch {
            what: "displacement",
            expected: f.len(),
            got: u.len(),
        });
    }
    Ok(u.iter().zip(f).map(|(a, b)| a * b).sum())
}

/// Strain energy form `Uᵀ K U`.
pub fn energy(k: &CsrMatrix, u: &[f64]) -> f64 {
    k.mul_vec(u).iter().zip(u).map(|(a, b)| a * b).sum()
}

/// Centroid von Mises stress per element for given element moduli (Pa).
/// Elements flagged in `void` report 0.
pub fn von_mises_with_moduli(u: &[f64], mesh: &GridMesh, moduli: &[f64], poisson: f64, void: &[bool]) -> Vec<f64> {
    let b = strain_matrix(0.0, 0.0, mesh.elem_size());
    let d = unit_constitutive(poisson);
    let db = d * b;
    (0..mesh.element_count())
        .into_par_iter()
        .map(|e| {
            if void[e] || moduli[e] == 0.0 {
                return 0.0;
            }
            let s = db * gather(mesh, u, e) * moduli[e];
            let (sx, sy, txy) = (s[0], s[1], s[2]);
            (sx * sx - sx * sy + sy * sy + 3.0 * txy * txy).max(0.0).sqrt()
        })
        .collect()
}

/// Centroid von Mises stress using each element's SIMP modulus; passive void elements report 0.
pub fn von_mises(u: &[f64], mesh: &GridMesh, design: &DesignField, material: &Material, penal: f64) -> Vec<f64> {
    let moduli = element_moduli(design.densities(), penal, material.young_modulus);
    von_mises_with_moduli(u, mesh, &moduli, material.poisson, design.passive_void())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrengthCheck {
    /// Pa
    pub allowable: f64,
    pub pass: bool,
}

/// Allowable stress is yield strength over safety factor.
pub fn check_strength(max_stress: f64, material: &Material) -> StrengthCheck {
    let allowable = material.yield_strength / material.safety_factor;
    StrengthCheck {
        allowable,
        pass: max_stress <= allowable,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StaticResult {
    /// m, one entry per DOF
    pub displacement: Vec<f64>,
    /// N·m
    pub compliance: f64,
    /// Pa, per element
    pub vm_stress: Vec<f64>,
    pub max_displacement: f64,
    pub max_stress: f64,
}

impl StaticResult {
    pub(crate) fn from_fields(displacement: Vec<f64>, compliance: f64, vm_stress: Vec<f64>) -> Self {
        let max_displacement = max_nodal_displacement(&displacement);
        let max_stress = vm_stress.iter().copied().fold(0.0, f64::max);
        Self {
            displacement,
            compliance,
            vm_stress,
            max_displacement,
            max_stress,
        }
    }

    /// Maximum stress ignoring elements that touch a loaded or fixed node.
    pub fn max_stress_excluding_supports(&self, mesh: &GridMesh, loads: &LoadCase) -> f64 {
        let mut marked: BTreeSet<usize> = loads.loaded_nodes();
        marked.extend(loads.fixed_nodes());
        (0..mesh.element_count())
            .filter(|&e| !mesh.element_nodes(e).iter().any(|n| marked.contains(n)))
            .map(|e| self.vm_stress[e])
            .fold(0.0, f64::max)
    }
}

pub fn max_nodal_displacement(u: &[f64]) -> f64 {
    u.chunks_exact(2).map(|c| c[0].hypot(c[1])).fold(0.0, f64::max)
}

/// Full static analysis of a gray design: assemble, solve, compliance and stresses.
pub fn analyze(
    mesh: &GridMesh,
    material: &Material,
    loads: &LoadCase,
    design: &DesignField,
    penal: f64,
) -> Result<StaticResult> {
    let k = assemble_stiffness(mesh, design, penal, material)?;
    let f = loads.load_vector(mesh, material);
    let u = solve_static(&k, loads, &f)?;
    let c = compliance(&u, &f)?;
    let vm = von_mises(&u, mesh, design, material, penal);
    Ok(StaticResult::from_fields(u, c, vm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Component, DEFAULT_X_MIN};

    /// Closed-form Q4 plane-stress stiffness (E = 1, t = 1), derived by hand from the
    /// bilinear shape functions; independent of the quadrature path.
    fn closed_form_ke(nu: f64) -> [[f64; 8]; 8] {
        let k = [
            0.5 - nu / 6.0,
            0.125 + nu / 8.0,
            -0.25 - nu / 12.0,
            -0.125 + 3.0 * nu / 8.0,
            -0.25 + nu / 12.0,
            -0.125 - nu / 8.0,
            nu / 6.0,
            0.125 - 3.0 * nu / 8.0,
        ];
        let idx = [
            [0, 1, 2, 3, 4, 5, 6, 7],
            [1, 0, 7, 6, 5, 4, 3, 2],
            [2, 7, 0, 5, 6, 3, 4, 1],
            [3, 6, 5, 0, 7, 2, 1, 4],
            [4, 5, 6, 7, 0, 1, 2, 3],
            [5, 4, 3, 2, 1, 0, 7, 6],
            [6, 3, 4, 1, 2, 7, 0, 5],
            [7, 2, 1, 4, 3, 6, 5, 0],
        ];
        let s = 1.0 / (1.0 - nu * nu);
        let mut out = [[0.0; 8]; 8];
        for r in 0..8 {
            for c in 0..8 {
                out[r][c] = s * k[idx[r][c]];
            }
        }
        out
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for nu in [0.0, 0.3, 0.33, 0.45] {
            let ke = unit_element_stiffness(nu);
            let oracle = closed_form_ke(nu);
            for r in 0..8 {
                for c in 0..8 {
                    assert!((ke[(r, c)] - oracle[r][c]).abs() < 1e-14, "nu={nu} ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn corner_entry_value() {
        let m = Material {
            young_modulus: 1.0,
            poisson: 0.3,
            ..Material::AA6061
        };
        let k = element_stiffness(&m, 1.0, 1.0).unwrap();
        assert!((k[(0, 0)] - 0.45 / 0.91).abs() < 1e-15);
        assert!((k[(0, 0)] - 0.4945).abs() < 1e-4);
    }

    #[test]
    fn element_stiffness_is_symmetric_with_three_rigid_modes() {
        let k = element_stiffness(&Material::AA6061, 0.005, 0.002).unwrap();
        assert_eq!(k, k.transpose());
        let tx = ElementVector::from_fn(|i, _| if i % 2 == 0 { 1.0 } else { 0.0 });
        assert!((k * tx).amax() < 1e-6 * k.amax());
        let eig = k.symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        let scale = vals[7];
        assert!(vals[..3].iter().all(|v| v.abs() < 1e-12 * scale));
        assert!(vals[3] > 1e-3 * scale);
    }

    #[test]
    fn poisson_half_rejected() {
        let m = Material {
            poisson: 0.5,
            ..Material::AA6061
        };
        assert!(element_stiffness(&m, 1.0, 1.0).is_err());
    }

    fn unit_material() -> Material {
        Material {
            young_modulus: 1.0,
            poisson: 0.3,
            density: 1.0,
            yield_strength: 1.0,
            safety_factor: 1.0,
        }
    }

    #[test]
    fn single_element_assembly_is_element_matrix() {
        let mesh = GridMesh::new(1, 1, 1.0, 1.0).unwrap();
        let d = DesignField::uniform(1, 1.0, DEFAULT_X_MIN).unwrap();
        let k = assemble_stiffness(&mesh, &d, 3.0, &unit_material()).unwrap();
        let ke = unit_element_stiffness(0.3);
        let dofs = mesh.element_dofs(0).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                assert_eq!(k.get(dofs[r], dofs[c]), ke[(r, c)]);
            }
        }
    }

    #[test]
    fn void_design_scales_linearly() {
        let mesh = GridMesh::new(3, 2, 1.0, 1.0).unwrap();
        let mat = unit_material();
        let solid = assemble_stiffness(&mesh, &DesignField::uniform(6, 1.0, 1e-3).unwrap(), 3.0, &mat).unwrap();
        let void = assemble_stiffness(&mesh, &DesignField::uniform(6, 1e-3, 1e-3).unwrap(), 3.0, &mat).unwrap();
        let ratio = crate::simp::simp_young(1e-3, 3.0, 1.0, crate::simp::E_MIN_RATIO);
        for r in 0..mesh.dof_count() {
            for (c, v) in solid.row(r) {
                assert!((void.get(r, c) - ratio * v).abs() <= 1e-15 * v.abs().max(1.0));
            }
        }
    }

    #[test]
    fn two_element_assembly_matches_dense_oracle() {
        let mesh = GridMesh::new(2, 1, 1.0, 1.0).unwrap();
        let d = DesignField::new(vec![1.0, 0.5], vec![false; 2], vec![false; 2], 1e-3).unwrap();
        let mat = unit_material();
        let k = assemble_stiffness(&mesh, &d, 3.0, &mat).unwrap();
        // dense hand assembly: element 0 nodes 0,1,4,3; element 1 nodes 1,2,5,4
        let ke = closed_form_ke(0.3);
        let mut dense = [[0.0; 12]; 12];
        let scales = [1.0, crate::simp::simp_young(0.5, 3.0, 1.0, 1e-9)];
        for (nodes, s) in [([0, 1, 4, 3], scales[0]), ([1, 2, 5, 4], scales[1])] {
            let dofs: Vec<usize> = nodes.iter().flat_map(|n| [2 * n, 2 * n + 1]).collect();
            for r in 0..8 {
                for c in 0..8 {
                    dense[dofs[r]][dofs[c]] += s * ke[r][c];
                }
            }
        }
        for r in 0..12 {
            for c in 0..12 {
                assert!((k.get(r, c) - dense[r][c]).abs() < 1e-14, "({r},{c})");
            }
        }
        assert_eq!(k.asymmetry(), 0.0);
    }

    fn cantilever(nx: usize, ny: usize) -> (GridMesh, LoadCase) {
        let mesh = GridMesh::new(nx, ny, 1.0, 1.0).unwrap();
        let mut lc = LoadCase::new();
        for j in 0..=ny {
            lc = lc.fix_node(mesh.node_index(0, j), true, true);
        }
        lc = lc.with_load(mesh.node_index(nx, 0), Component::Y, -1.0);
        (mesh, lc)
    }

    #[test]
    fn zero_load_gives_zero_response() {
        let (mesh, mut lc) = cantilever(4, 2);
        lc.point_loads.clear();
        let d = DesignField::uniform(8, 1.0, 1e-3).unwrap();
        let r = analyze(&mesh, &unit_material(), &lc, &d, 3.0).unwrap();
        assert!(r.displacement.iter().all(|&v| v == 0.0));
        assert_eq!(r.compliance, 0.0);
    }

    #[test]
    fn fixed_dofs_exactly_zero_and_energy_consistent() {
        let (mesh, lc) = cantilever(6, 3);
        let d = DesignField::uniform(18, 0.7, 1e-3).unwrap();
        let mat = unit_material();
        let k = assemble_stiffness(&mesh, &d, 3.0, &mat).unwrap();
        let f = lc.load_vector(&mesh, &mat);
        let u = solve_static(&k, &lc, &f).unwrap();
        for &dof in &lc.fixed_dofs {
            assert_eq!(u[dof], 0.0);
        }
        let c = compliance(&u, &f).unwrap();
        assert!((c - energy(&k, &u)).abs() <= 1e-8 * c);
    }

    #[test]
    fn single_element_compliance_matches_dense_solve() {
        let mesh = GridMesh::new(1, 1, 1.0, 1.0).unwrap();
        let lc = LoadCase::new()
            .fix_node(0, true, true)
            .fix_node(3, true, true)
            .with_load(1, Component::Y, 1.0);
        let d = DesignField::uniform(1, 1.0, 1e-3).unwrap();
        let r = analyze(&mesh, &unit_material(), &lc, &d, 3.0).unwrap();
        // dense oracle via nalgebra LU; global nodes 1,2 are local nodes 1,3
        let ke = closed_form_ke(0.3);
        let free = [2, 3, 6, 7];
        let a = nalgebra::Matrix4::from_fn(|r, c| ke[free[r]][free[c]]);
        let b = nalgebra::Vector4::new(0.0, 1.0, 0.0, 0.0);
        let x = a.lu().solve(&b).unwrap();
        assert!((r.compliance - x[1]).abs() < 1e-12 * x[1], "{} vs {}", r.compliance, x[1]);
    }

    #[test]
    fn unconstrained_is_singular() {
        let mesh = GridMesh::new(2, 2, 1.0, 1.0).unwrap();
        let d = DesignField::uniform(4, 1.0, 1e-3).unwrap();
        let k = assemble_stiffness(&mesh, &d, 3.0, &unit_material()).unwrap();
        let lc = LoadCase::new().fix_node(0, true, false);
        let f = vec![0.0; mesh.dof_count()];
        assert!(matches!(
            solve_static(&k, &lc, &f),
            Err(Error::InsufficientConstraints { .. })
        ));
    }

    #[test]
    fn von_mises_rigid_body_is_zero() {
        let mesh = GridMesh::new(3, 3, 0.5, 1.0).unwrap();
        let d = DesignField::uniform(9, 1.0, 1e-3).unwrap();
        let theta = 1e-3;
        let u: Vec<f64> = (0..mesh.node_count())
            .flat_map(|n| {
                let (x, y) = mesh.node_position(n);
                [0.2 - theta * y, -0.1 + theta * x]
            })
            .collect();
        let vm = von_mises(&u, &mesh, &d, &Material::AA6061, 3.0);
        assert!(vm.iter().all(|&s| s.abs() < 1e-6 * Material::AA6061.young_modulus * theta));
    }

    #[test]
    fn von_mises_uniaxial_and_shear() {
        let mesh = GridMesh::new(2, 2, 1.0, 1.0).unwrap();
        let d = DesignField::uniform(4, 1.0, 1e-3).unwrap();
        let uniaxial = Material {
            poisson: 0.0,
            ..unit_material()
        };
        let eps = 1e-3;
        let u: Vec<f64> = (0..mesh.node_count())
            .flat_map(|n| [eps * mesh.node_position(n).0, 0.0])
            .collect();
        for s in von_mises(&u, &mesh, &d, &uniaxial, 3.0) {
            assert!((s - eps).abs() < 1e-15);
        }
        let mat = unit_material();
        let gamma = 2e-3;
        let u: Vec<f64> = (0..mesh.node_count())
            .flat_map(|n| [gamma * mesh.node_position(n).1, 0.0])
            .collect();
        let expected = 3f64.sqrt() * mat.shear_modulus() * gamma;
        for s in von_mises(&u, &mesh, &d, &mat, 3.0) {
            assert!((s - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn void_elements_report_zero_stress() {
        let mesh = GridMesh::new(2, 1, 1.0, 1.0).unwrap();
        let d = DesignField::new(vec![1.0, 1.0], vec![false; 2], vec![false, true], 1e-3).unwrap();
        let u: Vec<f64> = (0..mesh.node_count()).flat_map(|n| [1e-3 * mesh.node_position(n).0, 0.0]).collect();
        let vm = von_mises(&u, &mesh, &d, &Material::AA6061, 3.0);
        assert!(vm[0] > 0.0);
        assert_eq!(vm[1], 0.0);
    }

    #[test]
    fn strength_examples() {
        let m = Material::AA6061;
        let c = check_strength(27.52e6, &m);
        assert_eq!(c.allowable, 138e6);
        assert!(c.pass);
        assert!(check_strength(29.38e6, &m).pass);
        assert!(!check_strength(138.01e6, &m).pass);
    }

    #[test]
    fn compliance_length_mismatch() {
        assert!(compliance(&[1.0], &[1.0, 2.0]).is_err());
        assert_eq!(compliance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn unit_stiffness_is_symmetric_psd_with_three_rigid_modes(nu in 0.0f64..0.49) {
                let ke = unit_element_stiffness(nu);
                prop_assert!((ke - ke.transpose()).amax() < 1e-15);
                let mut eig: Vec<f64> = ke.symmetric_eigen().eigenvalues.iter().copied().collect();
                eig.sort_by(f64::total_cmp);
                let scale = eig[7];
                prop_assert!(eig[..3].iter().all(|v| v.abs() < 1e-12 * scale));
                prop_assert!(eig[3] > 1e-3 * scale);
                // x and y translations are stress free
                let tx = SVector::<f64, 8>::from_fn(|r, _| if r % 2 == 0 { 1.0 } else { 0.0 });
                let ty = SVector::<f64, 8>::from_fn(|r, _| if r % 2 == 1 { 1.0 } else { 0.0 });
                prop_assert!((ke * tx).amax() < 1e-14 && (ke * ty).amax() < 1e-14);
            }
        }
    }
}
