//! Problem files, field output and the command line.

pub mod cli;
pub mod fields;
pub mod format;
pub mod problem;

pub use fields::{
    history_csv, read_density_text, write_density_pgm, write_density_text, write_vtk, VtkFields,
};
pub use problem::{parse_problem, serialize_problem};

use std::path::Path;

/// Writes `contents` to `<path>.tmp` and renames it over `path`, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: impl AsRef<[u8]>) -> crate::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
