//! Sectional curvatures and Ricci contractions of the Fubini-Study metric.
//!
//! `cargo run --example projective_curvature -- 3 2.5` picks n = 3, c = 2.5.

use curvlab::hermitian::HermitianData;
use curvlab::modelspaces::make_cpn;
use curvlab::planes::{curvature_stats, nu_from_formula, PlaneKind};
use curvlab::sampling::rng_for;
use curvlab::PointGeometry;

fn main() -> curvlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(2, |a| a.parse().expect("n"));
    let c: f64 = args.next().map_or(4.0, |a| a.parse().expect("c"));
    let spec = make_cpn(n, c)?;
    println!("{} with holomorphic curvature {c}", spec.name);
    for (i, p) in spec.sample_points(4, 1)?.iter().enumerate() {
        let pg = PointGeometry::compute(&spec, p)?;
        let h = HermitianData::compute(&spec, &pg)?;
        let mut rng = rng_for(1, i as u64);
        let hol = curvature_stats(&pg, &h, PlaneKind::Holomorphic, 32, &mut rng)?;
        let anti = curvature_stats(&pg, &h, PlaneKind::Antiholomorphic, 32, &mut rng)?;
        let any = curvature_stats(&pg, &h, PlaneKind::Random, 32, &mut rng)?;
        let nu = nu_from_formula(&pg.tau, &h.tau_prime, n)?;
        println!(
            "point {i}: K_hol {:.10}  K_anti {:.10}  K_random in [{:.4}, {:.4}]  tau {:.8}  tau' {:.8}  nu {:.10}",
            hol.mean,
            anti.mean,
            any.min,
            any.max,
            pg.tau.value(),
            h.tau_prime.value(),
            nu.value()
        );
    }
    println!("expected: K_hol = c, K_anti = c/4, tau = tau' = n(n+1)c");
    Ok(())
}
