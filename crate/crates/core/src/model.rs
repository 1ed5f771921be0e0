//! Domain types: grid mesh, material, loads, design field and the optimization problem.
//!
//! Numbering conventions used by every other module:
//!
//! ```text
//!   node (i, j)      -> j * (nx + 1) + i          0 <= i <= nx, 0 <= j <= ny
//!   DOFs of node n   -> (2n, 2n + 1)              (ux, uy)
//!   element (ei, ej) -> ej * nx + ei
//!   element nodes    -> (i,j) (i+1,j) (i+1,j+1) (i,j+1)   counter-clockwise
//! ```
//!
//! All quantities stored here are SI (m, Pa, kg/m³, N).

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Regular quadrilateral discretization of a rectangular domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridMesh {
    nx: usize,
    ny: usize,
    elem_size: f64,
    thickness: f64,
}

impl GridMesh {
    /// Creates a mesh with element edge length and thickness given in metres.
    pub fn new(nx: usize, ny: usize, elem_size: f64, thickness: f64) -> Result<Self> {
        if nx == 0 {
            return Err(Error::validation("nx", "must be at least 1"));
        }
        if ny == 0 {
            return Err(Error::validation("ny", "must be at least 1"));
        }
        if !(elem_size > 0.0 && elem_size.is_finite()) {
            return Err(Error::validation("elem_size", "must be positive"));
        }
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(Error::validation("thickness", "must be positive"));
        }
        Ok(Self {
            nx,
            ny,
            elem_size,
            thickness,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Element edge length in metres.
    pub fn elem_size(&self) -> f64 {
        self.elem_size
    }

    /// Out-of-plane thickness in metres.
    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn element_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn dof_count(&self) -> usize {
        2 * self.node_count()
    }

    /// Volume of one element in m³.
    pub fn element_volume(&self) -> f64 {
        self.elem_size * self.elem_size * self.thickness
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= self.nx && j <= self.ny);
        j * (self.nx + 1) + i
    }

    /// Inverse of [`GridMesh::node_index`].
    pub fn node_ij(&self, n: usize) -> (usize, usize) {
        (n % (self.nx + 1), n / (self.nx + 1))
    }

    /// Node position in metres.
    pub fn node_position(&self, n: usize) -> (f64, f64) {
        let (i, j) = self.node_ij(n);
        (i as f64 * self.elem_size, j as f64 * self.elem_size)
    }

    pub fn element_index(&self, ei: usize, ej: usize) -> usize {
        debug_assert!(ei < self.nx && ej < self.ny);
        ej * self.nx + ei
    }

    pub fn element_ij(&self, e: usize) -> (usize, usize) {
        (e % self.nx, e / self.nx)
    }

    /// The four nodes of element `e` in counter-clockwise order starting bottom-left.
    pub fn element_nodes(&self, e: usize) -> [usize; 4] {
        let (i, j) = self.element_ij(e);
        [
            self.node_index(i, j),
            self.node_index(i + 1, j),
            self.node_index(i + 1, j + 1),
            self.node_index(i, j + 1),
        ]
    }

    /// The eight DOFs of element `e`, node by node, `(ux, uy)` per node.
    pub fn element_dofs(&self, e: usize) -> Result<[usize; 8]> {
        if e >= self.element_count() {
            return Err(Error::Index {
                what: "element",
                index: e,
                count: self.element_count(),
            });
        }
        Ok(self.element_dofs_unchecked(e))
    }

    pub(crate) fn element_dofs_unchecked(&self, e: usize) -> [usize; 8] {
        let n = self.element_nodes(e);
        [
            2 * n[0],
            2 * n[0] + 1,
            2 * n[1],
            2 * n[1] + 1,
            2 * n[2],
            2 * n[2] + 1,
            2 * n[3],
            2 * n[3] + 1,
        ]
    }

    /// Elements sharing an edge with `e`.
    pub fn edge_neighbors(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.element_ij(e);
        let mut out = [None; 4];
        if i > 0 {
            out[0] = Some(self.element_index(i - 1, j));
        }
        if i + 1 < self.nx {
            out[1] = Some(self.element_index(i + 1, j));
        }
        if j > 0 {
            out[2] = Some(self.element_index(i, j - 1));
        }
        if j + 1 < self.ny {
            out[3] = Some(self.element_index(i, j + 1));
        }
        out.into_iter().flatten()
    }
}

/// Builds a grid from millimetre dimensions.
pub fn build_grid(nx: usize, ny: usize, elem_size_mm: f64, thickness_mm: f64) -> Result<GridMesh> {
    if !(elem_size_mm > 0.0) {
        return Err(Error::validation("elem_size_mm", "must be positive"));
    }
    if !(thickness_mm > 0.0) {
        return Err(Error::validation("thickness_mm", "must be positive"));
    }
    GridMesh::new(nx, ny, elem_size_mm / 1000.0, thickness_mm / 1000.0)
}

/// Isotropic linear-elastic material with strength data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material {
    /// Pa
    pub young_modulus: f64,
    pub poisson: f64,
    /// kg/m³
    pub density: f64,
    /// Pa
    pub yield_strength: f64,
    pub safety_factor: f64,
}

impl Material {
    /// 6061 aluminium alloy.
    pub const AA6061: Material = Material {
        young_modulus: 69.6e9,
        poisson: 0.33,
        density: 2770.0,
        yield_strength: 276e6,
        safety_factor: 2.0,
    };

    pub fn preset(name: &str) -> Option<Material> {
        match name.to_ascii_uppercase().as_str() {
            "AA6061" => Some(Self::AA6061),
            _ => None,
        }
    }

    /// Returns every violated invariant as a message.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.young_modulus > 0.0 && self.young_modulus.is_finite()) {
            v.push("material.young_modulus must be positive".to_string());
        }
        if !(0.0..0.5).contains(&self.poisson) {
            v.push("material.poisson must lie in [0, 0.5)".to_string());
        }
        if !(self.density > 0.0 && self.density.is_finite()) {
            v.push("material.density must be positive".to_string());
        }
        if !(self.yield_strength > 0.0 && self.yield_strength.is_finite()) {
            v.push("material.yield_strength must be positive".to_string());
        }
        if !(self.safety_factor >= 1.0 && self.safety_factor.is_finite()) {
            v.push("material.safety_factor must be at least 1".to_string());
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some(msg) => {
                let (field, reason) = msg.split_once(' ').unwrap_or((&msg, ""));
                Err(Error::validation(field, reason))
            }
        }
    }

    pub fn shear_modulus(&self) -> f64 {
        self.young_modulus / (2.0 * (1.0 + self.poisson))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    X,
    Y,
}

impl Component {
    pub fn offset(self) -> usize {
        match self {
            Component::X => 0,
            Component::Y => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointLoad {
    pub node: usize,
    pub component: Component,
    /// N
    pub magnitude: f64,
}

impl PointLoad {
    pub fn dof(&self) -> usize {
        2 * self.node + self.component.offset()
    }
}

/// Loads and supports of a single load case.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoadCase {
    pub point_loads: Vec<PointLoad>,
    pub fixed_dofs: BTreeSet<usize>,
    /// Gravitational acceleration (gx, gy) in m/s².
    pub gravity: [f64; 2],
}

impl LoadCase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_load(mut self, node: usize, component: Component, magnitude: f64) -> Self {
        self.point_loads.push(PointLoad {
            node,
            component,
            magnitude,
        });
        self
    }

    pub fn fix_node(mut self, node: usize, x: bool, y: bool) -> Self {
        if x {
            self.fixed_dofs.insert(2 * node);
        }
        if y {
            self.fixed_dofs.insert(2 * node + 1);
        }
        self
    }

    /// Appends an equal-and-opposite force pair producing torque `torque` (N·m,
    /// counter-clockwise positive) between nodes `a` and `b`.
    pub fn with_couple(mut self, mesh: &GridMesh, a: usize, b: usize, torque: f64) -> Result<Self> {
        let (xa, ya) = mesh.node_position(a);
        let (xb, yb) = mesh.node_position(b);
        let (dx, dy) = (xb - xa, yb - ya);
        let d = dx.hypot(dy);
        if d == 0.0 {
            return Err(Error::validation("couple", "the two nodes must be distinct"));
        }
        // unit normal, rotated +90° from a->b; force T/d on b along n, -n on a
        let (nx, ny) = (-dy / d, dx / d);
        let f = torque / d;
        for (node, sign) in [(a, -1.0), (b, 1.0)] {
            for (component, value) in [(Component::X, sign * f * nx), (Component::Y, sign * f * ny)] {
                if value != 0.0 {
                    self.point_loads.push(PointLoad {
                        node,
                        component,
                        magnitude: value,
                    });
                }
            }
        }
        Ok(self)
    }

    /// Nodes that carry a point load.
    pub fn loaded_nodes(&self) -> BTreeSet<usize> {
        self.point_loads.iter().map(|p| p.node).collect()
    }

    /// Nodes with at least one fixed DOF.
    pub fn fixed_nodes(&self) -> BTreeSet<usize> {
        self.fixed_dofs.iter().map(|d| d / 2).collect()
    }

    /// Global load vector in N: point loads plus gravity lumped from full-solid element mass.
    pub fn load_vector(&self, mesh: &GridMesh, material: &Material) -> Vec<f64> {
        let mut f = vec![0.0; mesh.dof_count()];
        for p in &self.point_loads {
            f[p.dof()] += p.magnitude;
        }
        if self.gravity != [0.0, 0.0] {
            let quarter = 0.25 * material.density * mesh.element_volume();
            for e in 0..mesh.element_count() {
                for n in mesh.element_nodes(e) {
                    f[2 * n] += quarter * self.gravity[0];
                    f[2 * n + 1] += quarter * self.gravity[1];
                }
            }
        }
        f
    }

    fn violations(&self, mesh: &GridMesh) -> Vec<String> {
        let mut v = Vec::new();
        if self.fixed_dofs.is_empty() {
            v.push("unconstrained rigid body motion: no fixed DOFs".to_string());
        }
        if let Some(&d) = self.fixed_dofs.iter().find(|&&d| d >= mesh.dof_count()) {
            v.push(format!("fixed DOF {d} out of range (DOF count {})", mesh.dof_count()));
        }
        for p in &self.point_loads {
            if p.node >= mesh.node_count() {
                v.push(format!("load on node {} out of range", p.node));
            } else if !p.magnitude.is_finite() {
                v.push(format!("load on node {} is not finite", p.node));
            } else if self.fixed_dofs.contains(&p.dof()) {
                let (i, j) = mesh.node_ij(p.node);
                v.push(format!("load applied on fixed DOF {} (node {i},{j})", p.dof()));
            }
        }
        if !self.gravity.iter().all(|g| g.is_finite()) {
            v.push("gravity is not finite".to_string());
        }
        v
    }
}

/// Per-element design densities with passive solid/void masks.
///
/// Passive solid elements always hold density 1 and passive void elements hold `x_min`;
/// every other value lies in `[x_min, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignField {
    densities: Vec<f64>,
    passive_solid: Vec<bool>,
    passive_void: Vec<bool>,
    x_min: f64,
}

pub const DEFAULT_X_MIN: f64 = 1e-3;

impl DesignField {
    pub fn new(
        densities: Vec<f64>,
        passive_solid: Vec<bool>,
        passive_void: Vec<bool>,
        x_min: f64,
    ) -> Result<Self> {
        let n = densities.len();
        for (what, len) in [("passive_solid", passive_solid.len()), ("passive_void", passive_void.len())] {
            if len != n {
                return Err(Error::LengthMismatch {
                    what,
                    expected: n,
                    got: len,
                });
            }
        }
        if !(x_min > 0.0 && x_min < 1.0) {
            return Err(Error::validation("x_min", "must lie in (0, 1)"));
        }
        let overlap = overlap(&passive_solid, &passive_void);
        if !overlap.is_empty() {
            return Err(Error::validation(
                "passive masks",
                format!("elements both passive solid and void: {overlap:?}"),
            ));
        }
        let field = Self {
            densities,
            passive_solid,
            passive_void,
            x_min,
        };
        field.with_densities(field.densities.clone())
    }

    /// Uniform field without passive elements.
    pub fn uniform(n: usize, value: f64, x_min: f64) -> Result<Self> {
        Self::new(vec![value; n], vec![false; n], vec![false; n], x_min)
    }

    /// Returns a copy with new densities; passive masks are re-imposed.
    pub fn with_densities(&self, mut densities: Vec<f64>) -> Result<Self> {
        if densities.len() != self.densities.len() {
            return Err(Error::LengthMismatch {
                what: "densities",
                expected: self.densities.len(),
                got: densities.len(),
            });
        }
        for (e, x) in densities.iter_mut().enumerate() {
            if self.passive_solid[e] {
                *x = 1.0;
            } else if self.passive_void[e] {
                *x = self.x_min;
            } else if !(*x >= self.x_min && *x <= 1.0) {
                return Err(Error::validation(
                    "density",
                    format!("element {e} value {x} outside [{}, 1]", self.x_min),
                ));
            }
        }
        Ok(Self {
            densities,
            passive_solid: self.passive_solid.clone(),
            passive_void: self.passive_void.clone(),
            x_min: self.x_min,
        })
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    pub fn passive_solid(&self) -> &[bool] {
        &self.passive_solid
    }

    pub fn passive_void(&self) -> &[bool] {
        &self.passive_void
    }

    pub fn is_passive(&self, e: usize) -> bool {
        self.passive_solid[e] || self.passive_void[e]
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn len(&self) -> usize {
        self.densities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.densities.is_empty()
    }

    /// Mean density, i.e. V(x)/V₀ on a uniform grid.
    pub fn volume_fraction(&self) -> f64 {
        self.densities.iter().sum::<f64>() / self.densities.len() as f64
    }
}

fn overlap(a: &[bool], b: &[bool]) -> Vec<usize> {
    a.iter()
        .zip(b)
        .enumerate()
        .filter_map(|(e, (&s, &v))| (s && v).then_some(e))
        .collect()
}

/// Parameters of the SIMP optimality-criteria loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimpParams {
    pub penal: f64,
    pub volfrac: f64,
    /// Filter radius in element-edge units.
    pub rmin: f64,
    pub move_limit: f64,
    pub eta: f64,
    pub max_iters: usize,
    pub tol_change: f64,
}

impl Default for SimpParams {
    fn default() -> Self {
        Self {
            penal: 3.0,
            volfrac: 0.5,
            rmin: 1.5,
            move_limit: 0.2,
            eta: 0.5,
            max_iters: 200,
            tol_change: 0.01,
        }
    }
}

impl SimpParams {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.penal > 0.0 && self.penal.is_finite()) {
            v.push("optimization.penal must be positive".to_string());
        }
        if !(self.volfrac > 0.0 && self.volfrac <= 1.0) {
            v.push("optimization.volfrac must lie in (0, 1]".to_string());
        }
        if !(self.rmin >= 0.0 && self.rmin.is_finite()) {
            v.push("optimization.rmin_elem must be non-negative".to_string());
        }
        if !(self.move_limit > 0.0 && self.move_limit <= 1.0) {
            v.push("optimization.move must lie in (0, 1]".to_string());
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            v.push("optimization.eta must lie in (0, 1]".to_string());
        }
        if self.max_iters == 0 {
            v.push("optimization.max_iters must be at least 1".to_string());
        }
        if !(self.tol_change > 0.0 && self.tol_change.is_finite()) {
            v.push("optimization.tol_change must be positive".to_string());
        }
        v
    }
}

/// Minimum compliance subject to a volume fraction bound and equilibrium.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationProblem {
    pub mesh: GridMesh,
    pub material: Material,
    pub loads: LoadCase,
    /// Initial design.
    pub design: DesignField,
    pub params: SimpParams,
}

impl OptimizationProblem {
    /// Assembles a problem whose initial design is uniform `volfrac` on design elements.
    pub fn new(
        mesh: GridMesh,
        material: Material,
        loads: LoadCase,
        passive_solid: Vec<bool>,
        passive_void: Vec<bool>,
        x_min: f64,
        params: SimpParams,
    ) -> Result<Self> {
        let n = mesh.element_count();
        let start = params.volfrac.clamp(x_min, 1.0);
        let design = DesignField::new(vec![start; n], passive_solid, passive_void, x_min)?;
        Ok(Self {
            mesh,
            material,
            loads,
            design,
            params,
        })
    }

    /// Full-solid design with the problem's passive masks (the pre-optimization structure).
    pub fn solid_design(&self) -> DesignField {
        self.design
            .with_densities(vec![1.0; self.design.len()])
            .expect("ones are always within bounds")
    }
}

/// Returns every violated invariant of `p`, or `Ok(())`.
pub fn validate_problem(p: &OptimizationProblem) -> std::result::Result<(), Vec<String>> {
    let mut v = Vec::new();
    v.extend(p.material.violations());
    v.extend(p.params.violations());
    v.extend(p.loads.violations(&p.mesh));
    let n = p.mesh.element_count();
    if p.design.len() != n {
        v.push(format!(
            "design has {} elements but mesh has {n}",
            p.design.len()
        ));
    } else {
        let ov = overlap(p.design.passive_solid(), p.design.passive_void());
        if !ov.is_empty() {
            v.push(format!("passive solid and void masks overlap at elements {ov:?}"));
        }
        if p.design.passive_void().iter().all(|&b| b) {
            v.push("every element is passive void".to_string());
        }
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_grid() {
        let m = build_grid(1, 1, 1.0, 1.0).unwrap();
        assert_eq!((m.node_count(), m.element_count(), m.dof_count()), (4, 1, 8));
    }

    #[test]
    fn element_nodes_follow_numbering() {
        let m = build_grid(3, 2, 1.0, 1.0).unwrap();
        assert_eq!(m.node_count(), 12);
        assert_eq!(m.element_count(), 6);
        let e = m.element_index(2, 1);
        assert_eq!(m.element_nodes(e), [6, 7, 11, 10]);
    }

    #[test]
    fn zero_dimension_rejected() {
        match build_grid(0, 2, 1.0, 1.0) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "nx"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_grid(2, 2, 0.0, 1.0).is_err());
        assert!(build_grid(2, 2, 1.0, -1.0).is_err());
    }

    #[test]
    fn element_dofs_examples() {
        let m = build_grid(1, 1, 1.0, 1.0).unwrap();
        assert_eq!(m.element_dofs(0).unwrap(), [0, 1, 2, 3, 6, 7, 4, 5]);
        let m = build_grid(3, 2, 1.0, 1.0).unwrap();
        assert_eq!(m.element_dofs(5).unwrap(), [12, 13, 14, 15, 22, 23, 20, 21]);
        assert!(matches!(m.element_dofs(6), Err(Error::Index { .. })));
    }

    #[test]
    fn couple_produces_requested_torque() {
        let m = build_grid(4, 4, 10.0, 1.0).unwrap();
        let a = m.node_index(1, 1);
        let b = m.node_index(3, 2);
        let lc = LoadCase::new().with_couple(&m, a, b, 360.0).unwrap();
        let (mut fx, mut fy, mut torque) = (0.0, 0.0, 0.0);
        for p in &lc.point_loads {
            let (x, y) = m.node_position(p.node);
            match p.component {
                Component::X => {
                    fx += p.magnitude;
                    torque -= y * p.magnitude;
                }
                Component::Y => {
                    fy += p.magnitude;
                    torque += x * p.magnitude;
                }
            }
        }
        assert!(fx.abs() < 1e-9 && fy.abs() < 1e-9);
        assert!((torque - 360.0).abs() < 1e-9);
    }

    #[test]
    fn gravity_lumps_full_solid_mass() {
        let m = GridMesh::new(2, 1, 1.0, 1.0).unwrap();
        let mut lc = LoadCase::new();
        lc.gravity = [0.0, -10.0];
        let mat = Material {
            density: 1.0,
            ..Material::AA6061
        };
        let f = lc.load_vector(&m, &mat);
        let total: f64 = f.iter().skip(1).step_by(2).sum();
        assert!((total + 20.0).abs() < 1e-12);
        assert_eq!(f[3], -5.0); // shared node (1,0)
        assert_eq!(f[1], -2.5);
    }

    #[test]
    fn design_field_enforces_masks() {
        let d = DesignField::new(
            vec![0.5, 0.5, 0.5],
            vec![true, false, false],
            vec![false, false, true],
            1e-3,
        )
        .unwrap();
        assert_eq!(d.densities(), &[1.0, 0.5, 1e-3]);
        let d2 = d.with_densities(vec![0.2, 0.7, 0.9]).unwrap();
        assert_eq!(d2.densities(), &[1.0, 0.7, 1e-3]);
        assert!(d.with_densities(vec![0.2, 1.5, 0.9]).is_err());
        assert!(DesignField::new(vec![0.5; 2], vec![true, false], vec![true, false], 1e-3).is_err());
    }

    fn small_problem() -> OptimizationProblem {
        let mesh = GridMesh::new(3, 2, 0.01, 0.001).unwrap();
        let loads = LoadCase::new()
            .fix_node(0, true, true)
            .fix_node(mesh.node_index(0, 2), true, true)
            .with_load(mesh.node_index(3, 0), Component::Y, -1.0);
        OptimizationProblem::new(
            mesh,
            Material::AA6061,
            loads,
            vec![false; 6],
            vec![false; 6],
            DEFAULT_X_MIN,
            SimpParams::default(),
        )
        .unwrap()
    }

    #[test]
    fn validate_reports_all_violations() {
        let p = small_problem();
        assert!(validate_problem(&p).is_ok());

        let mut bad = p.clone();
        bad.loads.fixed_dofs.clear();
        bad.params.volfrac = 0.0;
        let v = validate_problem(&bad).unwrap_err();
        assert!(v.iter().any(|m| m.contains("unconstrained rigid body motion")));
        assert!(v.iter().any(|m| m.contains("volfrac")));

        let mut bad = p.clone();
        bad.loads.fixed_dofs.insert(bad.loads.point_loads[0].dof());
        let v = validate_problem(&bad).unwrap_err();
        assert!(v.iter().any(|m| m.contains("fixed DOF")));
    }

    #[test]
    fn overlapping_masks_are_named() {
        let mut p = small_problem();
        // bypass the constructor to model an externally corrupted field
        p.design.passive_solid[4] = true;
        p.design.passive_void[4] = true;
        let v = validate_problem(&p).unwrap_err();
        assert!(v.iter().any(|m| m.contains("overlap") && m.contains("[4]")), "{v:?}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn numbering_round_trips(nx in 1usize..20, ny in 1usize..20, a in 0usize..1000, b in 0usize..1000) {
                let m = GridMesh::new(nx, ny, 1.0, 1.0).unwrap();
                let (i, j) = (a % (nx + 1), b % (ny + 1));
                prop_assert_eq!(m.node_ij(m.node_index(i, j)), (i, j));
                let (ei, ej) = (a % nx, b % ny);
                prop_assert_eq!(m.element_ij(m.element_index(ei, ej)), (ei, ej));
            }

            #[test]
            fn element_dofs_distinct_and_in_range(nx in 1usize..12, ny in 1usize..12, k in 0usize..10_000) {
                let m = GridMesh::new(nx, ny, 1.0, 1.0).unwrap();
                let e = k % m.element_count();
                let mut dofs = m.element_dofs(e).unwrap().to_vec();
                prop_assert!(dofs.iter().all(|&d| d < m.dof_count()));
                dofs.sort_unstable();
                dofs.dedup();
                prop_assert_eq!(dofs.len(), 8);
            }
        }
    }
}
