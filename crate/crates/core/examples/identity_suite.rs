//! Individual identity checks with their hypotheses.
//!
//! `cargo run --example identity_suite -- cdn` runs the suite on another built-in model.

use curvlab::modelspaces::Model;
use curvlab::verify::{check_identity, Tag};
use curvlab::CurvError;

fn main() -> curvlab::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "s6".into());
    let spec = Model::from_name(&name, None, None)?.build()?;
    println!("{}", spec.name);
    for tag in Tag::ALL {
        match check_identity(&spec, tag, 4, 16, 1, 1e-6) {
            Ok(r) => println!(
                "{:<6} {} residual {:.2e} over {} samples",
                tag.as_str(),
                if r.pass { "pass" } else { "FAIL" },
                r.max_residual,
                r.samples
            ),
            Err(CurvError::HypothesisNotMet { reason, .. }) => {
                println!("{:<6} skipped: {reason}", tag.as_str())
            }
            Err(e) => println!("{:<6} error: {e}", tag.as_str()),
        }
    }
    Ok(())
}
