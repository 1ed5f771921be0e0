//! Binary reconstruction of an optimized density field and reanalysis of the result.
//!
//! The chain is threshold → mirror symmetry → connectivity cleanup. Reanalysis drops
//! void elements from the model entirely; nodes left without any solid element are
//! removed from the system.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fem::{compliance, free_dofs, solve_reduced_system, von_mises_with_moduli, Assembler, StaticResult};
use crate::modal::{assemble_mass, solve_modes_on, ModalOptions, ModalResult};
use crate::model::{DesignField, GridMesh, LoadCase, OptimizationProblem};
use crate::solver::ReducedSystem;

/// Mirror plane of the symmetry operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Mirror across the vertical mid-line: column `i` ↔ `nx − 1 − i`.
    XMid,
    /// Mirror across the horizontal mid-line: row `j` ↔ `ny − 1 − j`.
    YMid,
}

impl Axis {
    pub fn mirror(self, mesh: &GridMesh, e: usize) -> usize {
        let (i, j) = mesh.element_ij(e);
        match self {
            Axis::XMid => mesh.element_index(mesh.nx() - 1 - i, j),
            Axis::YMid => mesh.element_index(i, mesh.ny() - 1 - j),
        }
    }

    /// Mirror image of node `n`.
    pub fn mirror_node(self, mesh: &GridMesh, n: usize) -> usize {
        let (i, j) = mesh.node_ij(n);
        match self {
            Axis::XMid => mesh.node_index(mesh.nx() - i, j),
            Axis::YMid => mesh.node_index(i, mesh.ny() - j),
        }
    }
}

/// A 0/1 material layout with the passive masks it must honour.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryLayout {
    pub solid: Vec<bool>,
    pub passive_solid: Vec<bool>,
    pub passive_void: Vec<bool>,
    pub threshold: f64,
    pub symmetry: Option<Axis>,
    pub removed_islands: usize,
}

impl BinaryLayout {
    /// Every element solid except passive voids.
    pub fn full(design: &DesignField) -> Self {
        Self {
            solid: design.passive_void().iter().map(|v| !v).collect(),
            passive_solid: design.passive_solid().to_vec(),
            passive_void: design.passive_void().to_vec(),
            threshold: 0.0,
            symmetry: None,
            removed_islands: 0,
        }
    }

    pub fn solid_count(&self) -> usize {
        self.solid.iter().filter(|&&s| s).count()
    }

    pub fn volume_fraction(&self) -> f64 {
        self.solid_count() as f64 / self.solid.len() as f64
    }

    /// Densities 1 for solid, 0 for void.
    pub fn values(&self) -> Vec<f64> {
        self.solid.iter().map(|&s| if s { 1.0 } else { 0.0 }).collect()
    }

    /// Design field with voids at `x_min`.
    pub fn to_design(&self, x_min: f64) -> Result<DesignField> {
        DesignField::new(
            self.solid.iter().map(|&s| if s { 1.0 } else { x_min }).collect(),
            self.passive_solid.clone(),
            self.passive_void.clone(),
            x_min,
        )
    }

    fn reimpose_passive(&mut self) {
        for e in 0..self.solid.len() {
            if self.passive_solid[e] {
                self.solid[e] = true;
            } else if self.passive_void[e] {
                self.solid[e] = false;
            }
        }
    }
}

/// `solid ⇔ x̃ₑ ≥ t`, with passive masks re-imposed.
pub fn threshold(design: &DesignField, t: f64) -> Result<BinaryLayout> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::validation("threshold", "must lie in (0, 1)"));
    }
    let mut layout = BinaryLayout {
        solid: design.densities().iter().map(|&x| x >= t).collect(),
        passive_solid: design.passive_solid().to_vec(),
        passive_void: design.passive_void().to_vec(),
        threshold: t,
        symmetry: None,
        removed_islands: 0,
    };
    layout.reimpose_passive();
    Ok(layout)
}

/// Replaces each mirrored pair of a gray field by its mean.
pub fn symmetrize_field(design: &DesignField, mesh: &GridMesh, axis: Axis) -> Result<DesignField> {
    let x = design.densities();
    let values = (0..x.len())
        .map(|e| 0.5 * (x[e] + x[axis.mirror(mesh, e)]))
        .collect();
    design.with_densities(values)
}

/// Replaces each mirrored pair of a layout by its logical OR.
pub fn enforce_symmetry(layout: &BinaryLayout, mesh: &GridMesh, axis: Axis) -> BinaryLayout {
    let mut out = layout.clone();
    for e in 0..layout.solid.len() {
        out.solid[e] = layout.solid[e] || layout.solid[axis.mirror(mesh, e)];
    }
    out.reimpose_passive();
    out.symmetry = Some(axis);
    out
}

/// Removes 4-connected solid components that touch no loaded or fixed node.
///
/// Components holding a passive solid element are always kept.
pub fn cleanup_connectivity(layout: &BinaryLayout, mesh: &GridMesh, loads: &LoadCase) -> Result<BinaryLayout> {
    let mut anchors: BTreeSet<usize> = loads.loaded_nodes();
    anchors.extend(loads.fixed_nodes());
    let n = layout.solid.len();
    let mut component = vec![usize::MAX; n];
    let mut keep = Vec::new();
    for seed in 0..n {
        if !layout.solid[seed] || component[seed] != usize::MAX {
            continue;
        }
        let id = keep.len();
        let mut anchored = false;
        let mut stack = vec![seed];
        component[seed] = id;
        while let Some(e) = stack.pop() {
            anchored |= layout.passive_solid[e] || mesh.element_nodes(e).iter().any(|v| anchors.contains(v));
            for nb in mesh.edge_neighbors(e) {
                if layout.solid[nb] && component[nb] == usize::MAX {
                    component[nb] = id;
                    stack.push(nb);
                }
            }
        }
        keep.push(anchored);
    }
    let mut out = layout.clone();
    for e in 0..n {
        if out.solid[e] && !keep[component[e]] {
            out.solid[e] = false;
        }
    }
    out.removed_islands = layout.removed_islands + keep.iter().filter(|&&k| !k).count();
    if out.solid_count() == 0 {
        return Err(Error::DesignVanished);
    }
    Ok(out)
}

/// Options of the full reconstruction chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructOptions {
    pub threshold: f64,
    pub symmetry: Option<Axis>,
    /// Bisect the threshold until the final volume fraction is within `tol` of `target`.
    pub match_volume: Option<VolumeTarget>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeTarget {
    pub target: f64,
    pub tol: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            threshold: 0.5,
            symmetry: None,
            match_volume: None,
        }
    }
}

/// threshold → symmetry → cleanup at a fixed cut value.
pub fn reconstruct_at(
    design: &DesignField,
    mesh: &GridMesh,
    loads: &LoadCase,
    t: f64,
    symmetry: Option<Axis>,
) -> Result<BinaryLayout> {
    let mut layout = threshold(design, t)?;
    if let Some(axis) = symmetry {
        layout = enforce_symmetry(&layout, mesh, axis);
    }
    cleanup_connectivity(&layout, mesh, loads)
}

/// Runs the reconstruction chain, bisecting on the cut value when a volume target is set.
pub fn reconstruct(
    design: &DesignField,
    mesh: &GridMesh,
    loads: &LoadCase,
    opts: &ReconstructOptions,
) -> Result<BinaryLayout> {
    let first = reconstruct_at(design, mesh, loads, opts.threshold, opts.symmetry);
    let Some(VolumeTarget { target, tol }) = opts.match_volume else {
        return first;
    };
    let miss = |l: &BinaryLayout| (l.volume_fraction() - target).abs();
    let mut best: Option<BinaryLayout> = first.ok();
    if best.as_ref().is_some_and(|l| miss(l) <= tol) {
        return Ok(best.unwrap());
    }
    // volume fraction is non-increasing in t (up to cleanup effects)
    let (mut lo, mut hi) = (1e-6, 1.0 - 1e-6);
    for _ in 0..60 {
        let t = 0.5 * (lo + hi);
        match reconstruct_at(design, mesh, loads, t, opts.symmetry) {
            Ok(layout) => {
                let vf = layout.volume_fraction();
                let better = best.as_ref().is_none_or(|b| miss(&layout) < miss(b));
                if vf > target {
                    lo = t;
                } else {
                    hi = t;
                }
                if better {
                    best = Some(layout);
                }
                if best.as_ref().is_some_and(|b| miss(b) <= tol) {
                    break;
                }
            }
            Err(Error::DesignVanished) => hi = t,
            Err(e) => return Err(e),
        }
    }
    best.ok_or(Error::DesignVanished)
}

/// Static and modal results of a binary layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Reanalysis {
    pub static_result: StaticResult,
    pub modal: ModalResult,
}

/// Static analysis of a binary layout with void elements removed.
pub fn reanalyze_static(layout: &BinaryLayout, problem: &OptimizationProblem) -> Result<StaticResult> {
    let prepared = Prepared::new(layout, problem)?;
    prepared.static_result()
}

/// Static and modal analysis of a binary layout with void elements removed, under the
/// problem's loads and supports.
pub fn reanalyze(layout: &BinaryLayout, problem: &OptimizationProblem, modes: usize) -> Result<Reanalysis> {
    let prepared = Prepared::new(layout, problem)?;
    let static_result = prepared.static_result()?;
    let mass = assemble_mass(&problem.mesh, &layout.values(), &problem.material);
    let modal = solve_modes_on(&prepared.k, &mass, &prepared.free, modes, ModalOptions::default())?;
    Ok(Reanalysis { static_result, modal })
}

/// A loaded node none of whose edge-connected solid regions touches a fixed node.
fn unsupported_load(layout: &BinaryLayout, mesh: &GridMesh, loads: &LoadCase) -> Option<usize> {
    let fixed = loads.fixed_nodes();
    let n = layout.solid.len();
    let mut supported = vec![false; n];
    let mut seen = vec![false; n];
    for seed in 0..n {
        if !layout.solid[seed] || seen[seed] {
            continue;
        }
        let mut members = vec![seed];
        seen[seed] = true;
        let mut k = 0;
        while k < members.len() {
            let e = members[k];
            k += 1;
            for nb in mesh.edge_neighbors(e) {
                if layout.solid[nb] && !seen[nb] {
                    seen[nb] = true;
                    members.push(nb);
                }
            }
        }
        let anchored = members.iter().any(|&e| mesh.element_nodes(e).iter().any(|v| fixed.contains(v)));
        for e in members {
            supported[e] = anchored;
        }
    }
    loads.loaded_nodes().into_iter().find(|&node| {
        !(0..n).any(|e| layout.solid[e] && supported[e] && mesh.element_nodes(e).contains(&node))
    })
}

struct Prepared<'a> {
    problem: &'a OptimizationProblem,
    layout: &'a BinaryLayout,
    moduli: Vec<f64>,
    k: crate::sparse::CsrMatrix,
    free: Vec<usize>,
}

impl<'a> Prepared<'a> {
    fn new(layout: &'a BinaryLayout, problem: &'a OptimizationProblem) -> Result<Self> {
        let mesh = &problem.mesh;
        if layout.solid.len() != mesh.element_count() {
            return Err(Error::LengthMismatch {
                what: "layout",
                expected: mesh.element_count(),
                got: layout.solid.len(),
            });
        }
        let mut attached = vec![false; mesh.node_count()];
        for e in (0..mesh.element_count()).filter(|&e| layout.solid[e]) {
            for n in mesh.element_nodes(e) {
                attached[n] = true;
            }
        }
        if let Some(n) = problem.loads.loaded_nodes().into_iter().find(|&n| !attached[n]) {
            let (i, j) = mesh.node_ij(n);
            return Err(Error::Configuration(format!(
                "loaded node ({i},{j}) is not attached to solid material"
            )));
        }
        if !problem.loads.fixed_nodes().into_iter().any(|n| attached[n]) {
            return Err(Error::Configuration("no support is attached to solid material".into()));
        }
        if let Some(n) = unsupported_load(layout, mesh, &problem.loads) {
            let (i, j) = mesh.node_ij(n);
            return Err(Error::Configuration(format!(
                "the solid region carrying the load at node ({i},{j}) does not reach any support"
            )));
        }
        let e0 = problem.material.young_modulus;
        let moduli: Vec<f64> = layout.solid.iter().map(|&s| if s { e0 } else { 0.0 }).collect();
        let k = Assembler::new(mesh, problem.material.poisson).assemble(&moduli);
        let free = free_dofs(mesh, &problem.loads.fixed_dofs, Some(&layout.solid));
        Ok(Self {
            problem,
            layout,
            moduli,
            k,
            free,
        })
    }

    fn static_result(&self) -> Result<StaticResult> {
        let p = self.problem;
        let sys = ReducedSystem::new(&self.k, &self.free);
        let mut f = p.loads.load_vector(&p.mesh, &p.material);
        for (d, v) in f.iter_mut().enumerate() {
            if sys.slot(d).is_none() {
                *v = 0.0;
            }
        }
        let u = solve_reduced_system(&self.k, &sys, &f)?;
        let c = compliance(&u, &f)?;
        let void: Vec<bool> = self.layout.solid.iter().map(|s| !s).collect();
        let vm = von_mises_with_moduli(&u, &p.mesh, &self.moduli, p.material.poisson, &void);
        Ok(StaticResult::from_fields(u, c, vm))
    }
}
