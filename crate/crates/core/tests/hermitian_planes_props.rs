mod common;

use common::{all_models, twisted_flat};
use curvlab::geometry::{random_frame, rel_residual, PointGeometry};
use curvlab::hermitian::{classify_point, delta_f_in_frame, s_prime_in_frame, HermitianData};
use curvlab::modelspaces::{make_cpn, make_s6};
use curvlab::planes::{
    adapted_frame, estimate_nu, nu_from_formula, sample_planes, sectional_curvature, AdaptedFrame,
    PlaneKind,
};
use curvlab::sampling::{random_unit_vector, rng_for};
use proptest::prelude::*;

fn hermitian_models() -> Vec<curvlab::ManifoldSpec> {
    let mut v: Vec<_> = all_models()
        .into_iter()
        .filter(|s| s.is_hermitian())
        .collect();
    v.push(twisted_flat());
    v
}

#[test]
fn ricci_star_and_delta_f_do_not_depend_on_the_frame() {
    for spec in hermitian_models() {
        for (i, p) in spec.sample_points(3, 8).unwrap().iter().enumerate() {
            let pg = PointGeometry::compute(&spec, p).unwrap();
            let h = HermitianData::compute(&spec, &pg).unwrap();
            let mut rng = rng_for(i as u64, 20);
            let f1 = random_frame(&pg.g, &mut rng);
            let f2 = random_frame(&pg.g, &mut rng);
            let x = random_unit_vector(&pg.g, &mut rng);
            let y = random_unit_vector(&pg.g, &mut rng);
            let a = s_prime_in_frame(&pg, &h, &f1, &x, &y);
            let b = s_prime_in_frame(&pg, &h, &f2, &x, &y);
            assert!(
                (a - b).abs() <= 1e-10 * (1.0 + a.abs()),
                "{}: {a} vs {b}",
                spec.name
            );
            assert!((a - h.s_prime(&x, &y)).abs() <= 1e-10 * (1.0 + a.abs()));
            let tp1: f64 = f1
                .iter()
                .map(|e| s_prime_in_frame(&pg, &h, &f1, e, e))
                .sum();
            let tp2: f64 = f2
                .iter()
                .map(|e| s_prime_in_frame(&pg, &h, &f2, e, e))
                .sum();
            assert!((tp1 - tp2).abs() <= 1e-10 * (1.0 + tp1.abs()));
            assert!((tp1 - h.tau_prime.value()).abs() <= 1e-10 * (1.0 + tp1.abs()));
            let d1 = delta_f_in_frame(&h, &f1);
            let d2 = delta_f_in_frame(&h, &f2);
            for k in 0..spec.dim {
                assert!(
                    (d1[k] - d2[k]).abs() <= 1e-10,
                    "{}: deltaF {d1:?} vs {d2:?}",
                    spec.name
                );
                assert!((d1[k] - h.delta_f[k]).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn class_flags_respect_the_inclusions() {
    for spec in hermitian_models() {
        for (i, p) in spec.sample_points(3, 2).unwrap().iter().enumerate() {
            let pg = PointGeometry::compute(&spec, p).unwrap();
            let h = HermitianData::compute(&spec, &pg).unwrap();
            let c = classify_point(&pg, &h, 16, &mut rng_for(i as u64, 1), 1e-6);
            let imp = |a: bool, b: bool| !a || b;
            assert!(
                imp(c.kahler.pass(), c.nearly_kahler.pass()),
                "{}",
                spec.name
            );
            assert!(
                imp(c.nearly_kahler.pass(), c.quasi_kahler.pass()),
                "{}",
                spec.name
            );
            assert!(imp(c.nearly_kahler.pass(), c.qk2.pass()), "{}", spec.name);
            assert!(imp(c.qk2.pass(), c.ah3.pass()), "{}", spec.name);
        }
    }
}

#[test]
fn twisted_structure_is_hermitian_but_not_kahler() {
    let spec = twisted_flat();
    let p = [0.3, 0.2, -0.1, 0.4];
    let c = curvlab::hermitian::classify(&spec, &p, 16, 3, 1e-6).unwrap();
    assert!(!c.kahler.pass());
    assert!(!c.nearly_kahler.pass());
    assert!(!c.quasi_kahler.pass());
    assert!(c.ah3.pass());
}

#[test]
fn nearly_kahler_sphere_has_vanishing_diagonal_nabla_j() {
    let spec = make_s6().unwrap();
    let pg = PointGeometry::compute(&spec, &[0.2, -0.3, 0.1, 0.5, 0.0, -0.4]).unwrap();
    let h = HermitianData::compute(&spec, &pg).unwrap();
    let mut rng = rng_for(5, 0);
    let mut largest: f64 = 0.0;
    for _ in 0..16 {
        let x = random_unit_vector(&pg.g, &mut rng);
        let y = random_unit_vector(&pg.g, &mut rng);
        assert!(h.nabla_j_apply(&x, &x).iter().all(|v| v.abs() < 1e-12));
        largest = largest.max(pg.norm(&h.nabla_j_apply(&x, &y)));
    }
    assert!(largest > 0.1);
}

#[test]
fn adapted_frames_on_eight_points_and_four_seeds() {
    for spec in hermitian_models() {
        for p in spec.sample_points(8, 4).unwrap() {
            let pg = PointGeometry::compute(&spec, &p).unwrap();
            let h = HermitianData::compute(&spec, &pg).unwrap();
            for seed in 0..4 {
                let f = AdaptedFrame::build(&pg.g, &h.j, &mut rng_for(seed, 2)).unwrap();
                assert!(
                    f.gram_error(&pg.g) <= 1e-10,
                    "{}: {}",
                    spec.name,
                    f.gram_error(&pg.g)
                );
                assert!(f.closure_error(&h.j) <= 1e-10, "{}", spec.name);
            }
        }
    }
    let spec = make_cpn(2, 4.0).unwrap();
    let a = adapted_frame(&spec, &[0.1, 0.2, 0.3, 0.4], 1).unwrap();
    let b = adapted_frame(&spec, &[0.1, 0.2, 0.3, 0.4], 1).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sampled_nu_matches_the_formula_on_every_ah3_model() {
    let mut checked = 0;
    for spec in hermitian_models() {
        if spec.n() < 2 {
            continue;
        }
        for (i, p) in spec.sample_points(3, 6).unwrap().iter().enumerate() {
            let pg = PointGeometry::compute(&spec, p).unwrap();
            let h = HermitianData::compute(&spec, &pg).unwrap();
            let c = classify_point(&pg, &h, 16, &mut rng_for(i as u64, 1), 1e-6);
            let est = estimate_nu(&spec, p, 32, i as u64).unwrap();
            if !c.ah3.pass() || est.spread > 1e-8 {
                continue;
            }
            let nu = nu_from_formula(&pg.tau, &h.tau_prime, spec.n())
                .unwrap()
                .value();
            assert!(
                rel_residual(nu, est.mean) <= 1e-6,
                "{}: {nu} vs {}",
                spec.name,
                est.mean
            );
            checked += 1;
        }
    }
    // two flat, CP^2, CP^3, CD^2, two S^6 charts, twisted flat
    assert_eq!(checked, 8 * 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sectional_curvature_ignores_the_basis_of_the_plane(seed in 0u64..10_000, angle in 0.0f64..6.3) {
        let spec = make_cpn(2, 4.0).unwrap();
        let p = spec.sample_points(1, seed).unwrap().remove(0);
        let pg = PointGeometry::compute(&spec, &p).unwrap();
        let h = HermitianData::compute(&spec, &pg).unwrap();
        let mut rng = rng_for(seed, 30);
        for kind in [PlaneKind::Random, PlaneKind::Holomorphic, PlaneKind::Antiholomorphic] {
            let pl = sample_planes(&pg.g, &h.j, kind, 1, &mut rng).unwrap().remove(0);
            let k1 = sectional_curvature(&pg, &pl).unwrap();
            let k2 = sectional_curvature(&pg, &pl.rotated(angle)).unwrap();
            prop_assert!((k1 - k2).abs() <= 1e-10);
            match kind {
                PlaneKind::Holomorphic => prop_assert!((k1 - 4.0).abs() <= 1e-8),
                PlaneKind::Antiholomorphic => prop_assert!((k1 - 1.0).abs() <= 1e-8),
                PlaneKind::Random => prop_assert!((1.0 - 1e-8..=4.0 + 1e-8).contains(&k1)),
            }
        }
    }

    #[test]
    fn plane_batches_are_deterministic_and_well_formed(seed in 0u64..10_000) {
        let spec = make_s6().unwrap();
        let pg = PointGeometry::compute(&spec, &[0.1, 0.2, -0.3, 0.0, 0.5, 0.1]).unwrap();
        let h = HermitianData::compute(&spec, &pg).unwrap();
        let a = sample_planes(&pg.g, &h.j, PlaneKind::Antiholomorphic, 8, &mut rng_for(seed, 3)).unwrap();
        let b = sample_planes(&pg.g, &h.j, PlaneKind::Antiholomorphic, 8, &mut rng_for(seed, 3)).unwrap();
        prop_assert_eq!(&a, &b);
        for pl in &a {
            prop_assert!(pl.is_antiholomorphic());
            prop_assert!(pl.orthonormality_error(&pg.g) <= 1e-10);
            prop_assert!((sectional_curvature(&pg, pl).unwrap() - 1.0).abs() <= 1e-8);
        }
        let hol = sample_planes(&pg.g, &h.j, PlaneKind::Holomorphic, 8, &mut rng_for(seed, 4)).unwrap();
        prop_assert!(hol.iter().all(|pl| pl.is_holomorphic()));
    }
}
