//! Loading a manifold from JSON and inspecting its curvature.
//!
//! `cargo run --example custom_manifold -- path/to/manifold.json`; defaults to the
//! round two-sphere fixture.

use std::path::PathBuf;

use curvlab::cli::load_manifold_file;
use curvlab::hermitian::classify;
use curvlab::PointGeometry;

fn main() -> curvlab::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/sphere_s2.json")
        });
    let spec = load_manifold_file(&path)?;
    println!("{} (dimension {})", spec.name, spec.dim);
    for p in spec.sample_points(3, 2)? {
        let pg = PointGeometry::compute(&spec, &p)?;
        let frame = pg.coordinate_frame();
        let k = pg.r(&frame[0], &frame[1], &frame[1], &frame[0]);
        println!(
            "at {p:.3?}: K(e1, e2) = {k:.12}, scalar curvature {:.12}",
            pg.tau.value()
        );
    }
    if spec.is_hermitian() {
        let c = classify(&spec, &spec.sample_box.center, 16, 1, 1e-6)?;
        for (name, r) in c.entries() {
            println!("{name:<14} {:?}", r.verdict);
        }
    }
    Ok(())
}
