//! SIMP compliance minimization with a density filter and optimality-criteria updates.

use crate::error::{Error, Result};
use crate::fem::{compliance, free_dofs, solve_reduced_system, Assembler};
use crate::model::{DesignField, GridMesh, OptimizationProblem, SimpParams};
use crate::solver::ReducedSystem;

/// `E_min / E_0` of the modified SIMP interpolation.
pub const E_MIN_RATIO: f64 = 1e-9;

/// Volume feasibility tolerance of the OC multiplier search.
pub const VOLUME_TOL: f64 = 1e-4;

const LAMBDA_LO: f64 = 1e-10;
const LAMBDA_HI: f64 = 1e10;

/// Modified SIMP interpolation `E_min + xᵖ (E_0 − E_min)`.
pub fn simp_young(x: f64, penal: f64, e0: f64, emin: f64) -> f64 {
    emin + x.powf(penal) * (e0 - emin)
}

/// Element Young's moduli for physical densities, with `E_min = 1e-9·E_0`.
pub fn element_moduli(densities: &[f64], penal: f64, e0: f64) -> Vec<f64> {
    let emin = E_MIN_RATIO * e0;
    densities.iter().map(|&x| simp_young(x, penal, e0, emin)).collect()
}

/// Cone-weighted density filter `x̃ = H x / (H 1)` on a grid.
#[derive(Clone, Debug)]
pub struct DensityFilter {
    /// per element: (neighbour, normalized weight Hₑᵢ / Σⱼ Hₑⱼ)
    rows: Vec<Vec<(usize, f64)>>,
}

impl DensityFilter {
    /// `rmin` in element-edge units; `rmin <= 1` yields the identity.
    pub fn new(mesh: &GridMesh, rmin: f64) -> Self {
        let n = mesh.element_count();
        if rmin <= 1.0 {
            return Self {
                rows: (0..n).map(|e| vec![(e, 1.0)]).collect(),
            };
        }
        let reach = rmin.ceil() as isize - 1;
        let (nx, ny) = (mesh.nx() as isize, mesh.ny() as isize);
        let rows = (0..n)
            .map(|e| {
                let (i, j) = mesh.element_ij(e);
                let (i, j) = (i as isize, j as isize);
                let mut row = Vec::new();
                for jj in (j - reach).max(0)..=(j + reach).min(ny - 1) {
                    for ii in (i - reach).max(0)..=(i + reach).min(nx - 1) {
                        let dist = (((ii - i).pow(2) + (jj - j).pow(2)) as f64).sqrt();
                        let w = rmin - dist;
                        if w > 0.0 {
                            row.push((mesh.element_index(ii as usize, jj as usize), w));
                        }
                    }
                }
                let total: f64 = row.iter().map(|(_, w)| w).sum();
                row.iter_mut().for_each(|(_, w)| *w /= total);
                row
            })
            .collect();
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Normalized weights of row `e`.
    pub fn row(&self, e: usize) -> &[(usize, f64)] {
        &self.rows[e]
    }

    /// Linear forward map `x ↦ x̃`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(i, w)| w * x[i]).sum())
            .collect()
    }

    /// Exact transpose of [`DensityFilter::apply`].
    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows.len()];
        for (e, row) in self.rows.iter().enumerate() {
            for &(i, w) in row {
                out[i] += w * y[e];
            }
        }
        out
    }

    /// Filters and re-imposes the passive masks of `design` on the result.
    ///
    /// Weighted means of values in `[x_min, 1]` stay in that range up to rounding; the
    /// result is clamped so it is always a valid design.
    pub fn physical(&self, x: &[f64], design: &DesignField) -> Vec<f64> {
        let mut phys = self.apply(x);
        for (e, v) in phys.iter_mut().enumerate() {
            if design.passive_solid()[e] {
                *v = 1.0;
            } else if design.passive_void()[e] {
                *v = design.x_min();
            } else {
                *v = v.clamp(design.x_min(), 1.0);
            }
        }
        phys
    }

    /// Chain rule through [`DensityFilter::physical`]: passive outputs are constant,
    /// so their sensitivities are dropped before the transpose.
    pub fn chain_rule(&self, sens_physical: &[f64], design: &DesignField) -> Vec<f64> {
        let masked: Vec<f64> = sens_physical
            .iter()
            .enumerate()
            .map(|(e, &s)| if design.is_passive(e) { 0.0 } else { s })
            .collect();
        self.apply_transpose(&masked)
    }
}

/// Physical densities of `design` after filtering with radius `rmin`.
pub fn apply_density_filter(design: &DesignField, mesh: &GridMesh, rmin: f64) -> Result<DesignField> {
    let filter = DensityFilter::new(mesh, rmin);
    design.with_densities(filter.physical(design.densities(), design))
}

/// Sensitivities on design variables from sensitivities on physical densities.
pub fn chain_rule_filter(sens: &[f64], mesh: &GridMesh, rmin: f64, design: &DesignField) -> Vec<f64> {
    DensityFilter::new(mesh, rmin).chain_rule(sens, design)
}

/// `∂C/∂x̃ₑ = −p x̃ₑ^(p−1) (E₀ − E_min) t uₑᵀ k̂ uₑ` given unit element energies `uₑᵀ k̂ uₑ`.
pub fn sensitivities_from_energies(energies: &[f64], physical: &[f64], penal: f64, e0: f64, thickness: f64) -> Vec<f64> {
    let span = e0 * (1.0 - E_MIN_RATIO);
    energies
        .iter()
        .zip(physical)
        .map(|(&w, &x)| -penal * x.powf(penal - 1.0) * span * thickness * w.max(0.0))
        .collect()
}

/// Compliance sensitivity with respect to each physical density.
pub fn compliance_sensitivity(
    u: &[f64],
    mesh: &GridMesh,
    physical: &[f64],
    params: &SimpParams,
    material: &crate::model::Material,
) -> Vec<f64> {
    let energies = Assembler::new(mesh, material.poisson).element_energies(u);
    sensitivities_from_energies(&energies, physical, params.penal, material.young_modulus, mesh.thickness())
}

/// Result of one optimality-criteria step.
#[derive(Clone, Debug, PartialEq)]
pub struct OcStep {
    pub design: Vec<f64>,
    pub physical: Vec<f64>,
    /// V(x̃)/V₀ of `physical`
    pub volume_fraction: f64,
    pub lambda: f64,
}

/// Optimality-criteria update with a bisected volume multiplier.
///
/// `sens` is `∂C/∂x` and `dvol` is `∂V/∂x` on design variables; both may carry any
/// positive scale. Volume is measured on the filtered physical densities. Passive
/// elements keep their values.
pub fn oc_update(
    x: &[f64],
    sens: &[f64],
    dvol: &[f64],
    design: &DesignField,
    filter: &DensityFilter,
    params: &SimpParams,
) -> Result<OcStep> {
    let n = x.len();
    let smax = sens.iter().fold(0.0f64, |m, s| m.max(-s));
    let vmax = dvol.iter().fold(0.0f64, |m, &v| m.max(v));
    let (lo_bound, f) = (design.x_min(), params.volfrac);
    let eval = |lambda: f64| {
        let mut next = x.to_vec();
        for e in (0..n).filter(|&e| !design.is_passive(e)) {
            let drive = if smax > 0.0 { (-sens[e] / smax).max(0.0) } else { 1.0 };
            let b = drive / (lambda * (dvol[e] / vmax));
            let lo = (x[e] - params.move_limit).max(lo_bound);
            let hi = (x[e] + params.move_limit).min(1.0);
            next[e] = (x[e] * b.powf(params.eta)).clamp(lo, hi);
        }
        let physical = filter.physical(&next, design);
        let vol = physical.iter().sum::<f64>() / n as f64;
        OcStep {
            design: next,
            physical,
            volume_fraction: vol,
            lambda,
        }
    };
    let fits = |s: &OcStep| (s.volume_fraction - f).abs() <= VOLUME_TOL;

    let fullest = eval(LAMBDA_LO);
    if fullest.volume_fraction <= f + VOLUME_TOL {
        return if fits(&fullest) {
            Ok(fullest)
        } else {
            Err(Error::VolumeBracket {
                target: f,
                achieved: fullest.volume_fraction,
            })
        };
    }
    let emptiest = eval(LAMBDA_HI);
    if emptiest.volume_fraction > f + VOLUME_TOL {
        return Err(Error::VolumeBracket {
            target: f,
            achieved: emptiest.volume_fraction,
        });
    }
    if fits(&emptiest) {
        return Ok(emptiest);
    }
    let (mut lo, mut hi) = (LAMBDA_LO, LAMBDA_HI);
    let mut best = emptiest;
    while (hi - lo) / (hi + lo) > 1e-12 {
        let mid = (lo * hi).sqrt();
        let step = eval(mid);
        if fits(&step) {
            return Ok(step);
        }
        if step.volume_fraction > f {
            lo = mid;
        } else {
            hi = mid;
        }
        best = step;
    }
    Err(Error::VolumeBracket {
        target: f,
        achieved: best.volume_fraction,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    /// 1-based
    pub iter: usize,
    /// Compliance of the design analysed in this iteration, N·m.
    pub compliance: f64,
    /// V(x̃)/V₀ after this iteration's update.
    pub volume_fraction: f64,
    /// max |x⁺ − x| over design elements.
    pub max_change: f64,
}

/// Densities around one update, as seen by the observer of [`optimize`].
#[derive(Clone, Copy, Debug)]
pub struct IterationFields<'a> {
    /// Design variables before the update.
    pub previous: &'a [f64],
    /// Design variables after the update.
    pub design: &'a [f64],
    /// Filtered densities after the update.
    pub physical: &'a [f64],
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeOutcome {
    /// Physical (filtered) densities of the last update.
    pub final_design: DesignField,
    pub history: Vec<IterationRecord>,
    pub converged: bool,
    pub iterations: usize,
}

/// Runs the filter → analysis → sensitivity → OC loop until the largest density
/// change drops below `tol_change` or `max_iters` is reached.
///
/// `observer` sees every record together with the densities around the update.
pub fn optimize<F>(problem: &OptimizationProblem, mut observer: F) -> Result<OptimizeOutcome>
where
    F: FnMut(&IterationRecord, &IterationFields<'_>),
{
    crate::model::validate_problem(problem).map_err(Error::InvalidProblem)?;
    let OptimizationProblem {
        mesh,
        material,
        loads,
        design,
        params,
    } = problem;
    let n = mesh.element_count();
    let assembler = Assembler::new(mesh, material.poisson);
    let filter = DensityFilter::new(mesh, params.rmin);
    let free = free_dofs(mesh, &loads.fixed_dofs, None);
    let system = ReducedSystem::new(assembler.pattern(), &free);
    let f = loads.load_vector(mesh, material);
    let dvol = filter.chain_rule(&vec![1.0 / n as f64; n], design);

    let mut x = design.densities().to_vec();
    let mut history = Vec::new();
    let mut converged = false;
    let mut physical = filter.physical(&x, design);
    for iter in 1..=params.max_iters {
        let at = |source: Error| Error::AtIteration {
            iteration: iter,
            source: Box::new(source),
        };
        let moduli = element_moduli(&physical, params.penal, material.young_modulus);
        let k = assembler.assemble(&moduli);
        let u = solve_reduced_system(&k, &system, &f).map_err(at)?;
        let c = compliance(&u, &f).map_err(at)?;
        let energies = assembler.element_energies(&u);
        let dc_phys =
            sensitivities_from_energies(&energies, &physical, params.penal, material.young_modulus, mesh.thickness());
        let dc = filter.chain_rule(&dc_phys, design);
        let step = oc_update(&x, &dc, &dvol, design, &filter, params).map_err(at)?;
        let change = (0..n)
            .filter(|&e| !design.is_passive(e))
            .map(|e| (step.design[e] - x[e]).abs())
            .fold(0.0, f64::max);
        let record = IterationRecord {
            iter,
            compliance: c,
            volume_fraction: step.volume_fraction,
            max_change: change,
        };
        observer(
            &record,
            &IterationFields {
                previous: &x,
                design: &step.design,
                physical: &step.physical,
            },
        );
        history.push(record);
        x = step.design;
        physical = step.physical;
        if change < params.tol_change {
            converged = true;
            break;
        }
    }
    let iterations = history.len();
    Ok(OptimizeOutcome {
        final_design: design.with_densities(physical)?,
        history,
        converged,
        iterations,
    })
}
