//! Adapted frames {u, Ju} and plane sampling at a point.

use curvlab::hermitian::HermitianData;
use curvlab::modelspaces::make_cdn;
use curvlab::planes::{sample_planes, sectional_curvature, AdaptedFrame, PlaneKind};
use curvlab::sampling::rng_for;
use curvlab::PointGeometry;

fn main() -> curvlab::Result<()> {
    let spec = make_cdn(3, -4.0)?;
    let p = [0.2, -0.1, 0.3, 0.0, -0.25, 0.1];
    let pg = PointGeometry::compute(&spec, &p)?;
    let h = HermitianData::compute(&spec, &pg)?;
    let frame = AdaptedFrame::build(&pg.g, &h.j, &mut rng_for(5, 2))?;
    println!(
        "adapted frame: Gram error {:.1e}, closure error {:.1e}",
        frame.gram_error(&pg.g),
        frame.closure_error(&h.j)
    );
    let mut rng = rng_for(5, 3);
    for kind in [
        PlaneKind::Holomorphic,
        PlaneKind::Antiholomorphic,
        PlaneKind::Random,
    ] {
        let planes = sample_planes(&pg.g, &h.j, kind, 4, &mut rng)?;
        let ks: Vec<String> = planes
            .iter()
            .map(|pl| sectional_curvature(&pg, pl).map(|k| format!("{k:.6}")))
            .collect::<curvlab::Result<_>>()?;
        println!(
            "{kind:?}: |g(Jx,y)| = {:.3}, K = {}",
            planes[0].hol_angle,
            ks.join(" ")
        );
    }
    Ok(())
}
