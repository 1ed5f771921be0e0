//! Density text, PGM, legacy VTK and iteration-history output.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::io::format::general;
use crate::model::GridMesh;
use crate::simp::IterationRecord;

/// `<nx> <ny>` then one value per line, element order (j outer, i inner), shortest
/// round-trip decimal.
pub fn write_density_text(mesh: &GridMesh, values: &[f64]) -> Result<String> {
    check_len("density", mesh.element_count(), values.len())?;
    let mut s = format!("{} {}\n", mesh.nx(), mesh.ny());
    for v in values {
        let _ = writeln!(s, "{v}");
    }
    Ok(s)
}

/// Inverse of [`write_density_text`]: `(nx, ny, values)`.
pub fn read_density_text(text: &str) -> Result<(usize, usize, Vec<f64>)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty density file"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(1, format!("expected `<nx> <ny>`, found `{header}`")))?;
    let [nx, ny] = dims[..] else {
        return Err(Error::parse(1, format!("expected `<nx> <ny>`, found `{header}`")));
    };
    let values: Vec<f64> = lines
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(i + 1, format!("malformed density `{}`", l.trim())))
        })
        .collect::<Result<_>>()?;
    if values.len() != nx * ny {
        return Err(Error::parse(
            text.lines().count(),
            format!("expected {} densities for a {nx}x{ny} grid, found {}", nx * ny, values.len()),
        ));
    }
    Ok((nx, ny, values))
}

/// Plain PGM (P2), solid black: pixel `round(255 (1 − x))`, top row is `j = ny − 1`.
pub fn write_density_pgm(values: &[f64], mesh: &GridMesh) -> Result<Vec<u8>> {
    check_len("density", mesh.element_count(), values.len())?;
    if let Some((e, v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        return Err(Error::validation("density", format!("element {e} value {v} outside [0, 1]")));
    }
    let mut s = format!("P2\n{} {}\n255\n", mesh.nx(), mesh.ny());
    for j in (0..mesh.ny()).rev() {
        let row: Vec<String> = (0..mesh.nx())
            .map(|i| {
                let x = values[mesh.element_index(i, j)];
                ((255.0 * (1.0 - x)).round() as u8).to_string()
            })
            .collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    Ok(s.into_bytes())
}

/// Fields written to a VTK file. Every vector field holds two components per node.
#[derive(Clone, Copy, Debug)]
pub struct VtkFields<'a> {
    pub density: &'a [f64],
    pub displacement: &'a [f64],
    pub vm_stress: &'a [f64],
    pub modes: &'a [Vec<f64>],
}

/// Legacy ASCII VTK `STRUCTURED_POINTS` with cell scalars and point vectors (z = 0).
pub fn write_vtk(mesh: &GridMesh, fields: &VtkFields<'_>) -> Result<Vec<u8>> {
    let (ne, nn) = (mesh.element_count(), mesh.node_count());
    check_len("density", ne, fields.density.len())?;
    check_len("vm_stress", ne, fields.vm_stress.len())?;
    check_len("displacement", 2 * nn, fields.displacement.len())?;
    for m in fields.modes {
        check_len("mode shape", 2 * nn, m.len())?;
    }
    let a = general(mesh.elem_size(), 9);
    let mut s = String::new();
    let _ = write!(
        s,
        "# vtk DataFile Version 3.0\ndensleg fields\nASCII\nDATASET STRUCTURED_POINTS\n\
         DIMENSIONS {} {} 1\nORIGIN 0 0 0\nSPACING {a} {a} {a}\n",
        mesh.nx() + 1,
        mesh.ny() + 1
    );
    let _ = writeln!(s, "CELL_DATA {ne}");
    for (name, data) in [("density", fields.density), ("vm_stress", fields.vm_stress)] {
        let _ = writeln!(s, "SCALARS {name} float 1\nLOOKUP_TABLE default");
        for v in data {
            let _ = writeln!(s, "{}", general(*v, 9));
        }
    }
    let _ = writeln!(s, "POINT_DATA {nn}");
    let vectors = std::iter::once(("displacement".to_string(), fields.displacement))
        .chain(fields.modes.iter().enumerate().map(|(k, m)| (format!("mode_{}", k + 1), m.as_slice())));
    for (name, data) in vectors {
        let _ = writeln!(s, "VECTORS {name} float");
        for n in 0..nn {
            let _ = writeln!(s, "{} {} 0", general(data[2 * n], 9), general(data[2 * n + 1], 9));
        }
    }
    Ok(s.into_bytes())
}

/// `iter,compliance,volfrac,change`, full precision.
pub fn history_csv(history: &[IterationRecord]) -> String {
    let mut s = String::from("iter,compliance,volfrac,change\n");
    for r in history {
        let _ = writeln!(s, "{},{},{},{}", r.iter, r.compliance, r.volume_fraction, r.max_change);
    }
    s
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { what, expected, got })
    }
}
