//! Before/after comparison tables: mass, static performance and natural frequencies.
//!
//! Values are kept at full precision; rounding happens only when a table is rendered.

use crate::error::{Error, Result};
use crate::fem::{check_strength, StrengthCheck};
use crate::io::format::{fixed, trimmed};
use crate::model::{GridMesh, Material};

/// Mass in kg of a density (or 0/1 layout) field: `ρ t a² Σ x̃ₑ`.
pub fn mass_of(densities: &[f64], mesh: &GridMesh, material: &Material) -> f64 {
    material.density * mesh.element_volume() * densities.iter().sum::<f64>()
}

/// Percentage mass reduction `100 (before − after) / before`.
pub fn reduction_ratio(before: f64, after: f64) -> Result<f64> {
    if !(before > 0.0) {
        return Err(Error::validation("mass_before", "must be positive"));
    }
    Ok(100.0 * (before - after) / before)
}

/// Percentage increase `100 (after − before) / before`; the negation of [`reduction_ratio`].
pub fn increase_ratio(before: f64, after: f64) -> Result<f64> {
    reduction_ratio(before, after).map(|r| -r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassReport {
    pub structure: String,
    pub mass_before: f64,
    pub mass_after: f64,
    pub reduction_ratio: f64,
}

impl MassReport {
    pub fn new(structure: impl Into<String>, mass_before: f64, mass_after: f64) -> Result<Self> {
        Ok(Self {
            structure: structure.into(),
            mass_before,
            mass_after,
            reduction_ratio: reduction_ratio(mass_before, mass_after)?,
        })
    }
}

/// Scalar results of one analysis run, as stored in `summary.csv` and `modal.csv`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnalysisSummary {
    pub structure: Option<String>,
    /// kg
    pub mass: Option<f64>,
    /// Pa
    pub max_stress: Option<f64>,
    /// m
    pub max_displacement: Option<f64>,
    /// N·m
    pub compliance: Option<f64>,
    /// Hz
    pub frequencies: Vec<f64>,
}

pub const SUMMARY_HEADER: &str = "quantity,value";
pub const MODAL_HEADER: &str = "mode,frequency_hz";

impl AnalysisSummary {
    /// `summary.csv` body, full precision.
    pub fn summary_csv(&self) -> String {
        let mut out = format!("{SUMMARY_HEADER}\n");
        if let Some(s) = &self.structure {
            out.push_str(&format!("structure,{s}\n"));
        }
        for (key, v) in [
            ("mass_kg", self.mass),
            ("max_stress_pa", self.max_stress),
            ("max_displacement_m", self.max_displacement),
            ("compliance_nm", self.compliance),
        ] {
            if let Some(v) = v {
                out.push_str(&format!("{key},{v}\n"));
            }
        }
        out
    }

    /// `modal.csv` body, full precision.
    pub fn modal_csv(&self) -> String {
        let mut out = format!("{MODAL_HEADER}\n");
        for (i, f) in self.frequencies.iter().enumerate() {
            out.push_str(&format!("{},{f}\n", i + 1));
        }
        out
    }

    /// Merges a parsed `summary.csv` into `self`. Rows other than the known quantities
    /// (such as strength verdicts) are informational and skipped.
    pub fn read_summary_csv(&mut self, text: &str) -> Result<()> {
        for (line, row) in csv_rows(text, SUMMARY_HEADER)? {
            let [key, value] = row[..] else {
                return Err(Error::parse(line, "expected two columns"));
            };
            let num = || value.parse::<f64>().map_err(|_| Error::parse(line, format!("bad number `{value}`")));
            match key {
                "structure" => self.structure = Some(value.to_string()),
                "mass_kg" => self.mass = Some(num()?),
                "max_stress_pa" => self.max_stress = Some(num()?),
                "max_displacement_m" => self.max_displacement = Some(num()?),
                "compliance_nm" => self.compliance = Some(num()?),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn read_modal_csv(&mut self, text: &str) -> Result<()> {
        self.frequencies.clear();
        for (line, row) in csv_rows(text, MODAL_HEADER)? {
            let [mode, f] = row[..] else {
                return Err(Error::parse(line, "expected two columns"));
            };
            let mode: usize = mode.parse().map_err(|_| Error::parse(line, "bad mode index"))?;
            if mode != self.frequencies.len() + 1 {
                return Err(Error::parse(line, "mode indices must run 1, 2, 3, ..."));
            }
            self.frequencies
                .push(f.parse().map_err(|_| Error::parse(line, format!("bad frequency `{f}`")))?);
        }
        Ok(())
    }
}

fn csv_rows<'a>(text: &'a str, header: &str) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        _ => return Err(Error::parse(1, format!("expected header `{header}`"))),
    }
    Ok(lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split(',').map(str::trim).collect()))
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub mass: Option<MassReport>,
    pub stress_before: Option<f64>,
    pub stress_after: Option<f64>,
    pub displacement_before: Option<f64>,
    pub displacement_after: Option<f64>,
    pub compliance_before: Option<f64>,
    pub compliance_after: Option<f64>,
    pub frequencies_before: Vec<f64>,
    pub frequencies_after: Vec<f64>,
    pub strength_before: Option<StrengthCheck>,
    pub strength_after: Option<StrengthCheck>,
}

/// Pairs two runs on the same load case.
pub fn build_comparison(
    before: &AnalysisSummary,
    after: &AnalysisSummary,
    material: &Material,
) -> Result<ComparisonReport> {
    if before.frequencies.len() != after.frequencies.len() {
        return Err(Error::validation(
            "frequencies",
            format!(
                "mode counts differ: {} before, {} after",
                before.frequencies.len(),
                after.frequencies.len()
            ),
        ));
    }
    let values = [
        before.mass,
        after.mass,
        before.max_stress,
        after.max_stress,
        before.max_displacement,
        after.max_displacement,
    ];
    if values.iter().flatten().chain(&before.frequencies).chain(&after.frequencies).any(|v| !(*v >= 0.0)) {
        return Err(Error::validation("summary", "values must be non-negative"));
    }
    let mass = match (before.mass, after.mass) {
        (Some(b), Some(a)) => {
            let name = before
                .structure
                .clone()
                .or_else(|| after.structure.clone())
                .unwrap_or_else(|| "design".to_string());
            Some(MassReport::new(name, b, a)?)
        }
        _ => None,
    };
    Ok(ComparisonReport {
        mass,
        stress_before: before.max_stress,
        stress_after: after.max_stress,
        displacement_before: before.max_displacement,
        displacement_after: after.max_displacement,
        compliance_before: before.compliance,
        compliance_after: after.compliance,
        frequencies_before: before.frequencies.clone(),
        frequencies_after: after.frequencies.clone(),
        strength_before: before.max_stress.map(|s| check_strength(s, material)),
        strength_after: after.max_stress.map(|s| check_strength(s, material)),
    })
}

impl ComparisonReport {
    /// `report.csv`: `quantity,before,after`, display units (kg, MPa, mm, Hz).
    pub fn report_csv(&self) -> String {
        let mut out = String::from("quantity,before,after\n");
        let mut row = |q: &str, b: String, a: String| out.push_str(&format!("{q},{b},{a}\n"));
        if let Some(m) = &self.mass {
            row("mass_kg", fixed(m.mass_before, 2), fixed(m.mass_after, 2));
        }
        if let (Some(b), Some(a)) = (self.stress_before, self.stress_after) {
            row("max_stress_mpa", fixed(b / 1e6, 2), fixed(a / 1e6, 2));
        }
        if let (Some(b), Some(a)) = (self.displacement_before, self.displacement_after) {
            row("max_displacement_mm", fixed(b * 1e3, 2), fixed(a * 1e3, 2));
        }
        if let (Some(b), Some(a)) = (self.compliance_before, self.compliance_after) {
            row(
                "compliance_nm",
                crate::io::format::general(b, 6),
                crate::io::format::general(a, 6),
            );
        }
        if let (Some(b), Some(a)) = (self.strength_before, self.strength_after) {
            row("allowable_mpa", fixed(b.allowable / 1e6, 2), fixed(a.allowable / 1e6, 2));
            row("strength_pass", b.pass.to_string(), a.pass.to_string());
        }
        for (i, (b, a)) in self.frequencies_before.iter().zip(&self.frequencies_after).enumerate() {
            row(&format!("f{}_hz", i + 1), trimmed(*b, 3), trimmed(*a, 3));
        }
        out
    }

    /// `frequencies.csv`: one row per mode, before and after.
    pub fn frequencies_csv(&self) -> String {
        let mut out = String::from("mode,f_before_hz,f_after_hz\n");
        for (i, (b, a)) in self.frequencies_before.iter().zip(&self.frequencies_after).enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 1, trimmed(*b, 3), trimmed(*a, 3)));
        }
        out
    }

    /// Per-mode `after − before` in Hz.
    pub fn frequency_deltas(&self) -> Vec<f64> {
        self.frequencies_before
            .iter()
            .zip(&self.frequencies_after)
            .map(|(b, a)| a - b)
            .collect()
    }
}

/// `masses.csv`: `structure,before_kg,after_kg,reduction_pct`.
pub fn masses_csv(rows: &[MassReport]) -> String {
    let mut out = String::from("structure,before_kg,after_kg,reduction_pct\n");
    for m in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            m.structure,
            fixed(m.mass_before, 2),
            fixed(m.mass_after, 2),
            fixed(m.reduction_ratio, 2)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_examples() {
        let mesh = GridMesh::new(1, 1, 1.0, 1.0).unwrap();
        let mat = Material::AA6061;
        assert_eq!(mass_of(&[1.0], &mesh, &mat), 2770.0);
        let mesh = GridMesh::new(3, 2, 0.01, 0.005).unwrap();
        let x = [0.2, 0.4, 0.6, 0.8, 1.0, 0.3];
        let half: Vec<f64> = x.iter().map(|v| v / 2.0).collect();
        assert!((mass_of(&half, &mesh, &mat) - 0.5 * mass_of(&x, &mesh, &mat)).abs() < 1e-15);
    }

    #[test]
    fn published_mass_ratios() {
        assert_eq!(fixed(reduction_ratio(42.16, 38.82).unwrap(), 2), "7.92");
        assert_eq!(fixed(reduction_ratio(17.17, 13.83).unwrap(), 2), "19.45");
        assert_eq!(reduction_ratio(5.0, 5.0).unwrap(), 0.0);
        assert!(reduction_ratio(0.0, 1.0).is_err());
    }

    #[test]
    fn increase_is_negated_reduction() {
        let r = reduction_ratio(10.0, 12.5).unwrap();
        assert_eq!(r, -increase_ratio(10.0, 12.5).unwrap());
        assert_eq!(increase_ratio(10.0, 12.5).unwrap(), 25.0);
    }

    fn reference_leg(before: bool) -> AnalysisSummary {
        if before {
            AnalysisSummary {
                structure: Some("leg".into()),
                mass: Some(42.16),
                max_stress: Some(27.52e6),
                max_displacement: Some(0.67e-3),
                compliance: None,
                frequencies: vec![72.204, 81.756, 181.13, 186.99, 482.32, 810.08],
            }
        } else {
            AnalysisSummary {
                structure: Some("leg".into()),
                mass: Some(38.82),
                max_stress: Some(29.38e6),
                max_displacement: Some(0.78e-3),
                compliance: None,
                frequencies: vec![62.441, 71.56, 158.4, 159.2, 392.43, 788.99],
            }
        }
    }

    #[test]
    fn comparison_renders_table_values() {
        let r = build_comparison(&reference_leg(true), &reference_leg(false), &Material::AA6061).unwrap();
        let csv = r.report_csv();
        assert!(csv.contains("max_stress_mpa,27.52,29.38\n"), "{csv}");
        assert!(csv.contains("max_displacement_mm,0.67,0.78\n"));
        assert!(csv.contains("f1_hz,72.204,62.441\n"));
        assert!(csv.contains("strength_pass,true,true\n"));
        assert!(r.frequencies_csv().starts_with("mode,f_before_hz,f_after_hz\n1,72.204,62.441\n2,81.756,71.56\n"));
        assert!(r.frequency_deltas().iter().all(|d| *d < 0.0));
        assert_eq!(masses_csv(&[r.mass.unwrap()]), "structure,before_kg,after_kg,reduction_pct\nleg,42.16,38.82,7.92\n");
    }

    #[test]
    fn identical_runs_have_zero_deltas() {
        let r = build_comparison(&reference_leg(true), &reference_leg(true), &Material::AA6061).unwrap();
        assert!(r.frequency_deltas().iter().all(|d| *d == 0.0));
        assert_eq!(r.mass.unwrap().reduction_ratio, 0.0);
    }

    #[test]
    fn mode_count_mismatch_rejected() {
        let mut after = reference_leg(false);
        after.frequencies.pop();
        assert!(build_comparison(&reference_leg(true), &after, &Material::AA6061).is_err());
    }

    #[test]
    fn summary_csv_round_trip() {
        let s = reference_leg(true);
        let mut back = AnalysisSummary::default();
        back.read_summary_csv(&s.summary_csv()).unwrap();
        back.read_modal_csv(&s.modal_csv()).unwrap();
        assert_eq!(back, s);
        assert!(back.read_summary_csv("nope\n").is_err());
    }
}
