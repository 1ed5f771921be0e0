//! Before/after comparison tables from two analysis summaries.
//!
//! `cargo run --example report_tables`

use densleg::report::{build_comparison, masses_csv, reduction_ratio, AnalysisSummary, MassReport};
use densleg::Material;

fn main() -> densleg::Result<()> {
    let before = AnalysisSummary {
        structure: Some("bracket".into()),
        mass: Some(0.412),
        max_stress: Some(61.3e6),
        max_displacement: Some(0.21e-3),
        compliance: Some(0.84),
        frequencies: vec![812.4, 2210.9, 3488.0],
    };
    let after = AnalysisSummary {
        structure: Some("bracket".into()),
        mass: Some(0.198),
        max_stress: Some(97.8e6),
        max_displacement: Some(0.33e-3),
        compliance: Some(1.31),
        frequencies: vec![764.1, 2398.5, 3120.2],
    };

    let report = build_comparison(&before, &after, &Material::AA6061)?;
    print!("{}", report.report_csv());
    println!();
    print!("{}", report.frequencies_csv());
    for (k, d) in report.frequency_deltas().iter().enumerate() {
        println!("f{} change {:+.1} Hz", k + 1, d);
    }
    println!();

    let rows = [
        report.mass.clone().expect("both masses given"),
        MassReport::new("lever", 1.05, 0.61)?,
    ];
    print!("{}", masses_csv(&rows));
    println!("lever mass reduction {:.1} %", reduction_ratio(1.05, 0.61)?);

    // the summaries round-trip through their CSV files
    let mut back = AnalysisSummary::default();
    back.read_summary_csv(&after.summary_csv())?;
    back.read_modal_csv(&after.modal_csv())?;
    assert_eq!(back, after);
    Ok(())
}
