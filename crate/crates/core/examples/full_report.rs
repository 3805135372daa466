//! Complete report for a built-in model, written as JSON.
//!
//! `cargo run --example full_report -- cpn report.json`

use curvlab::modelspaces::Model;
use curvlab::verify::{full_report, Suite, VerifyConfig};

fn main() -> curvlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "cpn".into());
    let spec = Model::from_name(&name, None, None)?.build()?;
    let report = full_report(&spec, &VerifyConfig::default(), &Suite::All)?;
    for line in report.summary_lines() {
        eprintln!("{line}");
    }
    let json = report.to_json()?;
    match args.next() {
        Some(path) => {
            std::fs::write(&path, json).map_err(|e| curvlab::CurvError::Io(e.to_string()))?
        }
        None => print!("{json}"),
    }
    Ok(())
}
