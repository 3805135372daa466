//! The octonion almost complex structure on the round six-sphere.

use curvlab::hermitian::{classify, HermitianData};
use curvlab::modelspaces::make_s6;
use curvlab::sampling::{random_unit_vector, rng_for};
use curvlab::PointGeometry;

fn main() -> curvlab::Result<()> {
    let spec = make_s6()?;
    let p = [0.3, -0.2, 0.5, 0.1, 0.0, -0.4];
    let pg = PointGeometry::compute(&spec, &p)?;
    let h = HermitianData::compute(&spec, &pg)?;
    let mut rng = rng_for(3, 0);
    let x = random_unit_vector(&pg.g, &mut rng);
    let y = random_unit_vector(&pg.g, &mut rng);
    println!(
        "|(nabla_x J) x| = {:.3e}",
        pg.norm(&h.nabla_j_apply(&x, &x))
    );
    println!("|(nabla_x J) y| = {:.6}", pg.norm(&h.nabla_j_apply(&x, &y)));
    println!(
        "tau = {:.12}, tau' = {:.12}",
        pg.tau.value(),
        h.tau_prime.value()
    );
    println!("|deltaF| = {:.3e}", pg.norm(&h.delta_f));
    let report = classify(&spec, &p, 32, 7, 1e-6)?;
    for (name, r) in report.entries() {
        println!("{name:<14} {:?} (residual {:.3e})", r.verdict, r.residual);
    }
    Ok(())
}
