mod common;

use common::{all_models, twisted_flat};
use curvlab::cli::parse_manifold_json;
use curvlab::modelspaces::{make_cpn, make_flat, make_s6};
use curvlab::verify::{
    check_identity, full_report, schur_check, Session, Suite, Tag, VerifyConfig,
};
use curvlab::CurvError;

fn config(points: usize, seed: u64) -> VerifyConfig {
    VerifyConfig {
        points,
        seed,
        ..VerifyConfig::default()
    }
}

#[test]
fn worked_identity_examples() {
    let s6 = make_s6().unwrap();
    let r = check_identity(&s6, Tag::EQ1, 8, 32, 1, 1e-7).unwrap();
    assert!(r.pass && r.samples == 256, "{r:?}");
    assert!(check_identity(&s6, Tag::EQ10, 8, 32, 2, 1e-7).unwrap().pass);

    let flat = make_flat(2).unwrap();
    assert_eq!(
        check_identity(&flat, Tag::EQ6, 8, 32, 1, 1e-6)
            .unwrap()
            .max_residual,
        0.0
    );

    let cp2 = make_cpn(2, 4.0).unwrap();
    assert!(
        check_identity(&cp2, Tag::PROP3, 8, 32, 3, 1e-7)
            .unwrap()
            .pass
    );
    assert!(check_identity(&cp2, Tag::EQ6, 8, 32, 3, 1e-8).unwrap().pass);
}

#[test]
fn constancy_statistics_on_model_spaces() {
    let s = schur_check(&make_s6().unwrap(), 8, 4, 1e-7).unwrap();
    assert!(s.pass);
    for p in &s.points {
        assert!((p.nu_formula - 1.0).abs() <= 1e-7);
        assert!((p.nu_sampled - 1.0).abs() <= 1e-7);
        assert!((p.tau - 30.0).abs() <= 1e-7);
        assert!((p.tau_prime - 6.0).abs() <= 1e-7);
        assert!((p.lemma_quantity - 102.0).abs() <= 1e-7);
    }
    assert!(s.warnings.is_empty());

    let c = schur_check(&make_cpn(2, 4.0).unwrap(), 8, 4, 1e-7).unwrap();
    assert!(c.pass && !c.warnings.is_empty());
    for p in &c.points {
        assert!((p.nu_formula - 1.0).abs() <= 1e-7);
        assert!((p.tau - 24.0).abs() <= 1e-7 && (p.tau_prime - 24.0).abs() <= 1e-7);
        assert!(p.lemma_quantity.abs() <= 1e-7);
    }

    let f = schur_check(&make_flat(3).unwrap(), 4, 4, 1e-7).unwrap();
    assert!(f
        .points
        .iter()
        .all(|p| p.nu_formula == 0.0 && p.tau == 0.0 && p.tau_prime == 0.0));
}

#[test]
fn schur_statistics_are_internally_consistent() {
    for spec in [make_s6().unwrap(), make_cpn(3, 2.0).unwrap()] {
        let s = schur_check(&spec, 6, 9, 1e-6).unwrap();
        let n = s.n as f64;
        let spreads = [
            s.spread_nu_formula,
            s.spread_nu_sampled,
            s.spread_tau,
            s.spread_tau_prime,
            s.spread_lemma_quantity,
        ];
        assert!(spreads.iter().all(|v| *v >= 0.0));
        let eps = 1e-12 * (1.0 + s.points[0].tau.abs());
        assert!(
            s.spread_lemma_quantity <= (n + 1.0) * s.spread_tau + 3.0 * s.spread_tau_prime + eps
        );
        let lin =
            ((2.0 * n + 1.0) * s.spread_tau + 3.0 * s.spread_tau_prime) / (8.0 * n * (n * n - 1.0));
        assert!(s.spread_nu_formula <= lin + eps);
    }
}

#[test]
fn implication_chain_holds_where_premises_pass() {
    let tol = 1e-6;
    let mut seen = 0;
    for spec in all_models().into_iter().chain([twisted_flat()]) {
        let session = Session::prepare(&spec, &config(4, 2)).unwrap();
        let eq1 = session.check(Tag::EQ1);
        let eq2 = session.check(Tag::EQ2);
        if let (Ok(a), Ok(b)) = (&eq1, &eq2) {
            if a.pass {
                assert!(b.max_residual <= 10.0 * tol, "{}", spec.name);
                seen += 1;
            }
        }
        if let (Ok(p), Ok(a)) = (session.check(Tag::PROP3), &eq1) {
            if p.pass {
                assert!(a.max_residual <= 10.0 * tol, "{}", spec.name);
            }
        }
    }
    assert!(seen >= 5);
}

#[test]
fn unmet_hypotheses_are_reported_not_failed() {
    let spec = twisted_flat();
    let session = Session::prepare(&spec, &config(2, 1)).unwrap();
    match session.check(Tag::EQ9) {
        Err(CurvError::HypothesisNotMet { tag, reason }) => {
            assert_eq!(tag, "EQ9");
            assert!(reason.contains("QK2"), "{reason}");
        }
        other => panic!("{other:?}"),
    }
    let report = full_report(&spec, &config(2, 1), &Suite::All).unwrap();
    assert!(report.skipped.iter().any(|s| s.tag == Tag::EQ1));
    assert!(report
        .identities
        .iter()
        .any(|r| r.tag == Tag::EQ8 && r.pass));
    assert!(report.all_passed);
}

#[test]
fn complex_projective_plane_report_passes_everything() {
    let r = full_report(&make_cpn(2, 4.0).unwrap(), &config(8, 1), &Suite::All).unwrap();
    assert!(r.all_passed);
    assert!(r.skipped.is_empty());
    assert_eq!(r.identities.len(), Tag::ALL.len());
    assert_eq!(r.classification.as_ref().unwrap().entries().len(), 5);
    assert!(r
        .classification
        .unwrap()
        .entries()
        .iter()
        .all(|(_, c)| c.pass));
}

#[test]
fn broken_structure_fails_validation_and_skips_j_checks() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/fixtures/broken_j.json"
    ))
    .unwrap();
    let spec = parse_manifold_json(&text).unwrap();
    let r = full_report(&spec, &config(4, 1), &Suite::All).unwrap();
    assert_eq!(r.validation.hermitian_compatible, Some(false));
    assert!(!r.validation.passed && !r.all_passed);
    assert!(r.classification.is_none());
    let skipped: Vec<Tag> = r.skipped.iter().map(|s| s.tag).collect();
    for t in [Tag::EQ1, Tag::EQ2, Tag::PROP3, Tag::EQ9, Tag::SCHUR] {
        assert!(skipped.contains(&t), "{t} not skipped");
    }
    assert!(r
        .identities
        .iter()
        .all(|i| matches!(i.tag, Tag::EQ6 | Tag::EQ7 | Tag::EQ8)));
}

#[test]
fn reports_are_byte_identical_and_thread_count_independent() {
    let spec = make_s6().unwrap();
    let mut cfg = config(4, 13);
    cfg.threads = Some(1);
    let a = full_report(&spec, &cfg, &Suite::All)
        .unwrap()
        .to_json()
        .unwrap();
    cfg.threads = Some(4);
    let b = full_report(&spec, &cfg, &Suite::All)
        .unwrap()
        .to_json()
        .unwrap();
    assert_eq!(a, b);
    cfg.seed = 14;
    let c = full_report(&spec, &cfg, &Suite::All)
        .unwrap()
        .to_json()
        .unwrap();
    assert_ne!(a, c);
}
