//! Natural frequencies and mode shapes from `K φ = λ M φ` with a lumped mass matrix.
//!
//! The smallest eigenpairs of the constrained system are found by shift-invert
//! subspace iteration with Rayleigh-Ritz projection, using the same envelope
//! Cholesky factor as the static solver.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fem::{assemble_stiffness, free_dofs};
use crate::model::{DesignField, GridMesh, LoadCase, Material};
use crate::solver::ReducedSystem;
use crate::sparse::CsrMatrix;

/// Default number of modes.
pub const DEFAULT_MODES: usize = 6;

/// Relative eigen-residual every returned pair must satisfy.
pub const RESIDUAL_TOL: f64 = 1e-6;

const TARGET_RESIDUAL: f64 = 1e-10;
const MAX_SWEEPS: usize = 500;

#[derive(Clone, Debug, PartialEq)]
pub struct ModalResult {
    /// Hz, ascending
    pub frequencies: Vec<f64>,
    /// λ = (2πf)², ascending
    pub eigenvalues: Vec<f64>,
    /// Mass-normalized mode shapes, one global DOF vector each.
    pub modes: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ModalOptions {
    /// Allow an unconstrained (floating) structure; rigid-body modes come out near 0 Hz.
    pub allow_rigid_modes: bool,
}

/// Lumped mass diagonal: `ρ t a² x̃ₑ` split over the four nodes, on both DOFs of each.
pub fn assemble_mass(mesh: &GridMesh, densities: &[f64], material: &Material) -> Vec<f64> {
    let quarter = 0.25 * material.density * mesh.element_volume();
    let mut m = vec![0.0; mesh.dof_count()];
    for (e, &x) in densities.iter().enumerate() {
        for n in mesh.element_nodes(e) {
            m[2 * n] += quarter * x;
            m[2 * n + 1] += quarter * x;
        }
    }
    m
}

/// The `count` lowest modes with every DOF in `loads.fixed_dofs` held at zero.
pub fn solve_modes(k: &CsrMatrix, mass: &[f64], loads: &LoadCase, count: usize) -> Result<ModalResult> {
    let free: Vec<usize> = (0..k.dim()).filter(|d| !loads.fixed_dofs.contains(d)).collect();
    solve_modes_on(k, mass, &free, count, ModalOptions::default())
}

/// As [`solve_modes`] but on an explicit free-DOF set.
pub fn solve_modes_on(
    k: &CsrMatrix,
    mass: &[f64],
    free: &[usize],
    count: usize,
    opts: ModalOptions,
) -> Result<ModalResult> {
    let n = free.len();
    if count == 0 {
        return Err(Error::validation("k", "at least one mode is required"));
    }
    if count > n {
        return Err(Error::validation("k", format!("{count} modes requested but only {n} free DOFs")));
    }
    if free.iter().any(|&d| !(mass[d] > 0.0)) {
        return Err(Error::Eigen("mass matrix has a zero entry on a free DOF".into()));
    }
    let constrained = n < k.dim();
    if !constrained && !opts.allow_rigid_modes {
        return Err(Error::InsufficientConstraints { equation: 0 });
    }
    let sys = ReducedSystem::new(k, free);
    let m_red: Vec<f64> = sys.restrict(mass);
    let sigma = if opts.allow_rigid_modes {
        let mean: f64 = sys.dofs().iter().map(|&d| k.get(d, d) / mass[d]).sum::<f64>() / n as f64;
        -1e-4 * mean
    } else {
        0.0
    };
    let fac = sys.factor(k, Some((mass, sigma)))?;

    let q = (2 * count).max(count + 8).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x = DMatrix::<f64>::from_fn(n, q, |_, j| if j == 0 { 1.0 } else { rng.random_range(-1.0..1.0) });
    let k_red = |v: &[f64]| -> Vec<f64> {
        let kv = k.mul_vec(&sys.expand(v, k.dim()));
        sys.restrict(&kv)
    };

    let mut lambdas = vec![0.0; q];
    let mut residuals = vec![f64::INFINITY; count];
    for _sweep in 0..MAX_SWEEPS {
        let mut y = x.clone();
        for (mut col, _) in y.column_iter_mut().zip(0..) {
            for (v, m) in col.iter_mut().zip(&m_red) {
                *v *= m;
            }
        }
        let mut xbar = DMatrix::<f64>::zeros(n, q);
        for j in 0..q {
            let sol = fac.solve_reduced(y.column(j).as_slice());
            xbar.set_column(j, &DVector::from_vec(sol));
        }
        let kr = symmetrize(xbar.transpose() * &y);
        let mut mx = xbar.clone();
        for (mut col, _) in mx.column_iter_mut().zip(0..) {
            for (v, m) in col.iter_mut().zip(&m_red) {
                *v *= m;
            }
        }
        let mr = symmetrize(xbar.transpose() * mx);
        let (theta, qmat) = generalized_eigen(kr, mr)?;
        x = xbar * qmat;
        lambdas = theta.iter().map(|t| t + sigma).collect();

        for (i, r) in residuals.iter_mut().enumerate() {
            let phi = x.column(i);
            let kphi = k_red(phi.as_slice());
            let mut num = 0.0;
            let mut den = 0.0;
            for d in 0..n {
                let mphi = m_red[d] * phi[d];
                num += (kphi[d] - lambdas[i] * mphi).powi(2);
                den += (kphi[d] - sigma * mphi).powi(2);
            }
            *r = (num / den).sqrt();
        }
        if residuals.iter().all(|&r| r <= TARGET_RESIDUAL) {
            break;
        }
    }
    if let Some((i, &r)) = residuals.iter().enumerate().find(|(_, &r)| !(r <= RESIDUAL_TOL)) {
        return Err(Error::Eigen(format!("mode {} residual {r:e} above tolerance", i + 1)));
    }
    let modes = (0..count)
        .map(|i| sys.expand(x.column(i).as_slice(), k.dim()))
        .collect();
    let eigenvalues: Vec<f64> = lambdas[..count].to_vec();
    let frequencies = eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt() / (2.0 * std::f64::consts::PI))
        .collect();
    Ok(ModalResult {
        frequencies,
        eigenvalues,
        modes,
    })
}

fn symmetrize(a: DMatrix<f64>) -> DMatrix<f64> {
    (&a + a.transpose()) * 0.5
}

/// Solves `A v = θ B v` for symmetric `A` and SPD `B`; returns ascending θ and
/// `B`-orthonormal eigenvectors as columns.
fn generalized_eigen(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let chol = b
        .cholesky()
        .ok_or_else(|| Error::Eigen("projected mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Eigen("projected mass factor is singular".into()))?;
    let c = symmetrize(&linv * a * linv.transpose());
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let theta = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let v = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((theta, linv.transpose() * v))
}

/// Modal analysis of a gray design: SIMP stiffness, mass linear in density.
pub fn modal_analysis(
    mesh: &GridMesh,
    material: &Material,
    loads: &LoadCase,
    design: &DesignField,
    penal: f64,
    count: usize,
) -> Result<ModalResult> {
    let k = assemble_stiffness(mesh, design, penal, material)?;
    let m = assemble_mass(mesh, design.densities(), material);
    let free = free_dofs(mesh, &loads.fixed_dofs, None);
    solve_modes_on(&k, &m, &free, count, ModalOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DEFAULT_X_MIN;

    fn unit() -> Material {
        Material {
            young_modulus: 1.0,
            poisson: 0.3,
            density: 1.0,
            yield_strength: 1.0,
            safety_factor: 1.0,
        }
    }

    #[test]
    fn quarter_mass_per_node() {
        let mesh = GridMesh::new(1, 1, 1.0, 1.0).unwrap();
        assert_eq!(assemble_mass(&mesh, &[1.0], &unit()), vec![0.25; 8]);
    }

    #[test]
    fn shared_nodes_accumulate_mass() {
        let mesh = GridMesh::new(2, 1, 1.0, 1.0).unwrap();
        let m = assemble_mass(&mesh, &[1.0, 1.0], &unit());
        let node_mass: Vec<f64> = m.iter().step_by(2).copied().collect();
        assert_eq!(node_mass, vec![0.25, 0.5, 0.25, 0.25, 0.5, 0.25]);
        let total: f64 = m.iter().sum();
        assert_eq!(total, 2.0 * 2.0);
    }

    #[test]
    fn single_dof_analogue() {
        let mesh = GridMesh::new(1, 1, 1.0, 1.0).unwrap();
        let d = DesignField::uniform(1, 1.0, DEFAULT_X_MIN).unwrap();
        let k = assemble_stiffness(&mesh, &d, 3.0, &Material::AA6061).unwrap();
        let m = assemble_mass(&mesh, d.densities(), &Material::AA6061);
        let mut loads = LoadCase::new();
        loads.fixed_dofs = (0..8).filter(|&i| i != 4).collect();
        let r = solve_modes(&k, &m, &loads, 1).unwrap();
        let expected = (k.get(4, 4) / m[4]).sqrt() / (2.0 * std::f64::consts::PI);
        assert!((r.frequencies[0] - expected).abs() <= 1e-10 * expected);
    }

    #[test]
    fn too_many_modes_rejected() {
        let mesh = GridMesh::new(1, 1, 1.0, 1.0).unwrap();
        let d = DesignField::uniform(1, 1.0, DEFAULT_X_MIN).unwrap();
        let k = assemble_stiffness(&mesh, &d, 3.0, &unit()).unwrap();
        let m = assemble_mass(&mesh, d.densities(), &unit());
        let loads = LoadCase::new().fix_node(0, true, true).fix_node(3, true, true);
        assert!(solve_modes(&k, &m, &loads, 5).is_err());
        assert!(solve_modes(&k, &m, &LoadCase::new(), 1).is_err());
    }

    #[test]
    fn floating_plate_has_three_rigid_modes() {
        let mesh = GridMesh::new(4, 4, 0.01, 0.002).unwrap();
        let d = DesignField::uniform(16, 1.0, DEFAULT_X_MIN).unwrap();
        let k = assemble_stiffness(&mesh, &d, 3.0, &Material::AA6061).unwrap();
        let m = assemble_mass(&mesh, d.densities(), &Material::AA6061);
        let free: Vec<usize> = (0..mesh.dof_count()).collect();
        let r = solve_modes_on(&k, &m, &free, 4, ModalOptions { allow_rigid_modes: true }).unwrap();
        for f in &r.frequencies[..3] {
            assert!(*f < 1e-3 * r.frequencies[3], "{:?}", r.frequencies);
        }
    }

    #[test]
    fn modes_are_mass_orthonormal() {
        let mesh = GridMesh::new(12, 3, 0.01, 0.002).unwrap();
        let d = DesignField::uniform(36, 1.0, DEFAULT_X_MIN).unwrap();
        let mat = Material::AA6061;
        let mut loads = LoadCase::new();
        for j in 0..=3 {
            loads = loads.fix_node(mesh.node_index(0, j), true, true);
        }
        let r = modal_analysis(&mesh, &mat, &loads, &d, 3.0, 6).unwrap();
        let m = assemble_mass(&mesh, d.densities(), &mat);
        for i in 0..6 {
            for j in 0..6 {
                let dot: f64 = (0..m.len()).map(|k| r.modes[i][k] * m[k] * r.modes[j][k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-8, "({i},{j}) {dot}");
            }
        }
        assert!(r.frequencies.windows(2).all(|w| w[0] <= w[1]));
    }
}
