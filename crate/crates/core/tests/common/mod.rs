#![allow(dead_code)]

use std::ffi::OsStr;
use std::path::PathBuf;

use densleg::io::parse_problem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use densleg::{Component, DesignField, GridMesh, LoadCase, Material, OptimizationProblem};

pub fn problem_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

pub fn load_problem(name: &str) -> OptimizationProblem {
    let text = std::fs::read_to_string(problem_path(name)).expect("bundled problem file");
    parse_problem(&text).expect("bundled problem parses")
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden").join(name)
}

/// Clamped-left cantilever of `nx × ny` square elements with a total downward tip force
/// `p` spread over the right-edge nodes (half shares at the two corners).
pub struct Cantilever {
    pub mesh: GridMesh,
    pub material: Material,
    pub loads: LoadCase,
    pub p: f64,
}

impl Cantilever {
    pub fn new(nx: usize, ny: usize, length: f64, thickness: f64, p: f64) -> Self {
        let a = length / nx as f64;
        let mesh = GridMesh::new(nx, ny, a, thickness).unwrap();
        let mut loads = LoadCase::new();
        for j in 0..=ny {
            loads = loads.fix_node(mesh.node_index(0, j), true, true);
            let share = if j == 0 || j == ny { 0.5 } else { 1.0 } / ny as f64;
            loads = loads.with_load(mesh.node_index(nx, j), Component::Y, -p * share);
        }
        Self {
            mesh,
            material: Material::AA6061,
            loads,
            p,
        }
    }

    pub fn depth(&self) -> f64 {
        self.mesh.ny() as f64 * self.mesh.elem_size()
    }

    pub fn length(&self) -> f64 {
        self.mesh.nx() as f64 * self.mesh.elem_size()
    }

    pub fn solid(&self) -> DesignField {
        DesignField::uniform(self.mesh.element_count(), 1.0, 1e-3).unwrap()
    }

    /// Downward deflection of the mid-height tip node.
    pub fn tip_deflection(&self, u: &[f64]) -> f64 {
        let n = self.mesh.node_index(self.mesh.nx(), self.mesh.ny() / 2);
        -u[2 * n + 1]
    }

    /// Bending plus shear deflection of a Timoshenko beam with shear coefficient 5/6.
    pub fn timoshenko_tip(&self) -> f64 {
        let (l, h, t) = (self.length(), self.depth(), self.mesh.thickness());
        let e = self.material.young_modulus;
        let g = self.material.shear_modulus();
        let i = t * h.powi(3) / 12.0;
        self.p * l.powi(3) / (3.0 * e * i) + self.p * l / (5.0 / 6.0 * g * t * h)
    }

    /// First bending frequency of a clamped-free Euler–Bernoulli beam, Hz.
    pub fn euler_bernoulli_f1(&self) -> f64 {
        let beta_l = 1.875_104_068_711_961;
        let (l, h, t) = (self.length(), self.depth(), self.mesh.thickness());
        let ei = self.material.young_modulus * t * h.powi(3) / 12.0;
        let rho_a = self.material.density * t * h;
        beta_l * beta_l / (2.0 * std::f64::consts::PI * l * l) * (ei / rho_a).sqrt()
    }
}

/// Fixed pseudo-random fields behind the committed golden files.
pub struct GoldenFields {
    pub pgm_mesh: GridMesh,
    pub pgm_density: Vec<f64>,
    pub vtk_mesh: GridMesh,
    pub vtk_density: Vec<f64>,
    pub vtk_displacement: Vec<f64>,
    pub vtk_stress: Vec<f64>,
    pub vtk_modes: Vec<Vec<f64>>,
}

pub fn golden_fields() -> GoldenFields {
    let mut rng = ChaCha8Rng::seed_from_u64(0x601d);
    let pgm_mesh = GridMesh::new(4, 4, 1e-3, 1e-3).unwrap();
    let pgm_density = (0..16).map(|_| rng.random::<f64>()).collect();
    let vtk_mesh = GridMesh::new(2, 2, 5e-4, 1e-3).unwrap();
    let vtk_density = (0..4).map(|_| rng.random_range(1e-3..=1.0)).collect();
    let vtk_displacement = (0..18).map(|_| rng.random_range(-1e-4..1e-4)).collect();
    let vtk_stress = (0..4).map(|_| rng.random_range(0.0..2e8)).collect();
    let vtk_modes = vec![(0..18).map(|_| rng.random_range(-1.0..1.0)).collect()];
    GoldenFields {
        pgm_mesh,
        pgm_density,
        vtk_mesh,
        vtk_density,
        vtk_displacement,
        vtk_stress,
        vtk_modes,
    }
}

impl GoldenFields {
    pub fn pgm(&self) -> Vec<u8> {
        densleg::io::write_density_pgm(&self.pgm_density, &self.pgm_mesh).unwrap()
    }

    pub fn vtk(&self) -> Vec<u8> {
        densleg::io::write_vtk(
            &self.vtk_mesh,
            &densleg::io::VtkFields {
                density: &self.vtk_density,
                displacement: &self.vtk_displacement,
                vm_stress: &self.vtk_stress,
                modes: &self.vtk_modes,
            },
        )
        .unwrap()
    }
}

/// Runs the `densleg` binary; returns (exit code, stdout, stderr).
pub fn run_cli<I, S>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = S>,
    S: AsRef<OsStr>,
{
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_densleg"))
        .args(args)
        .output()
        .expect("spawn densleg");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}
