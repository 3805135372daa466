//! Identity checks, constancy statistics and report assembly.
//!
//! Every check samples points from the chart's sample box, evaluates both
//! sides of an identity on admissible vector tuples (random unit vectors and
//! frame vectors, alternating) and records the largest relative residual
//! `|lhs − rhs| / (1 + |lhs| + |rhs|)`.
//!
//! Checks whose hypotheses are not met by the manifold return
//! [`CurvError::HypothesisNotMet`]; [`full_report`] turns those into skipped
//! entries instead of failures.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CurvError, Result};
use crate::geometry::{rel_residual, ManifoldSpec, PointGeometry, SpecValidation, HERMITIAN_TOL};
use crate::hermitian::{
    classify_point, eq1_residual, eq2_residual, AlgebraicContext, ClassificationReport,
    HermitianData,
};
use crate::jets::Jet;
use crate::planes::{
    curvature_stats, nu_from_formula, sample_planes, AdaptedFrame, CurvatureStats, PlaneKind,
};
use crate::report::{ManifoldInfo, Report, ReportConfig, Skipped, ValidationSummary};
use crate::sampling::{random_unit_vector, rng_for, SeededRng};

/// Identity and theorem tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum Tag {
    EQ1,
    EQ2,
    PROP3,
    PROP4,
    PROP5,
    EQ6,
    EQ7,
    EQ8,
    EQ9,
    EQ10,
    EQ11,
    EQ12,
    EQ13,
    LEMMA,
    SCHUR,
}

impl Tag {
    pub const ALL: [Tag; 15] = [
        Tag::EQ1,
        Tag::EQ2,
        Tag::PROP3,
        Tag::PROP4,
        Tag::PROP5,
        Tag::EQ6,
        Tag::EQ7,
        Tag::EQ8,
        Tag::EQ9,
        Tag::EQ10,
        Tag::EQ11,
        Tag::EQ12,
        Tag::EQ13,
        Tag::LEMMA,
        Tag::SCHUR,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Tag::EQ1 => "EQ1",
            Tag::EQ2 => "EQ2",
            Tag::PROP3 => "PROP3",
            Tag::PROP4 => "PROP4",
            Tag::PROP5 => "PROP5",
            Tag::EQ6 => "EQ6",
            Tag::EQ7 => "EQ7",
            Tag::EQ8 => "EQ8",
            Tag::EQ9 => "EQ9",
            Tag::EQ10 => "EQ10",
            Tag::EQ11 => "EQ11",
            Tag::EQ12 => "EQ12",
            Tag::EQ13 => "EQ13",
            Tag::LEMMA => "LEMMA",
            Tag::SCHUR => "SCHUR",
        }
    }

    fn stream(&self) -> u64 {
        Tag::ALL.iter().position(|t| t == self).unwrap() as u64
    }

    /// Which hypotheses the identity needs.
    pub fn hypothesis_note(&self) -> &'static str {
        match self {
            Tag::EQ1 => "nearly-Kaehler or QK2 manifold",
            Tag::EQ2 => "curvature satisfies the EQ1 identity (NK or QK2), which implies J-invariance",
            Tag::PROP3 | Tag::PROP4 | Tag::PROP5 => {
                "AH3 manifold of pointwise constant antiholomorphic curvature, n >= 2"
            }
            Tag::EQ6 => "any Riemannian metric (second Bianchi identity)",
            Tag::EQ7 | Tag::EQ8 => "any Riemannian metric (contracted second Bianchi identity)",
            Tag::EQ9 => "QK2 manifold",
            Tag::EQ10 => {
                "AH3 manifold of pointwise constant antiholomorphic curvature; unit orthogonal x, y \
                 with x orthogonal to Jy. The terms S(JBy,x) and g(JBy,x) are evaluated as printed; \
                 their grouping is ambiguous when B != 0"
            }
            Tag::EQ11 => {
                "AH3 manifold of pointwise constant antiholomorphic curvature; unit x. The deltaF \
                 terms are evaluated as printed; their grouping is ambiguous when deltaF != 0"
            }
            Tag::EQ12 | Tag::EQ13 => {
                "QK2 manifold of pointwise constant antiholomorphic curvature"
            }
            Tag::LEMMA => "connected QK2 manifold of pointwise constant antiholomorphic curvature, n >= 2",
            Tag::SCHUR => {
                "connected QK2 manifold of pointwise constant antiholomorphic curvature, n >= 3"
            }
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tag {
    type Err = CurvError;
    fn from_str(s: &str) -> Result<Tag> {
        let up = s.trim().to_ascii_uppercase();
        Tag::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == up)
            .ok_or_else(|| CurvError::Precondition(format!("unknown identity tag `{s}`")))
    }
}

/// Outcome of one identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResult {
    pub tag: Tag,
    pub max_residual: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
    pub hypothesis_note: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl IdentityResult {
    fn new(tag: Tag, max_residual: f64, samples: usize, tolerance: f64) -> IdentityResult {
        IdentityResult {
            tag,
            max_residual,
            samples,
            tolerance,
            pass: max_residual <= tolerance,
            hypothesis_note: tag.hypothesis_note().to_string(),
            warnings: Vec::new(),
        }
    }
}

/// Sampling and tolerance knobs shared by every check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub points: usize,
    pub planes: usize,
    pub vectors: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Worker cap; `None` uses the rayon default.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            points: 8,
            planes: 32,
            vectors: 32,
            seed: 1,
            tolerance: 1e-6,
            threads: None,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points == 0 || self.planes == 0 || self.vectors == 0 {
            return Err(CurvError::Precondition(
                "points, planes and vectors must all be >= 1".into(),
            ));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(CurvError::Precondition(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Everything computed at one sampled point.
#[derive(Debug, Clone)]
pub struct PointData {
    pub index: usize,
    pub geometry: PointGeometry,
    pub validation: SpecValidation,
    /// Present only when the spec has a Hermitian-compatible `J` at every point.
    pub hermitian: Option<HermitianData>,
    /// Adapted frame when `J` is usable, otherwise the orthonormalized coordinate frame.
    pub frame: Vec<Vec<f64>>,
    pub classification: Option<ClassificationReport>,
    pub nu_sampled: Option<CurvatureStats>,
    pub nu_formula: Option<Jet>,
}

/// State of the almost complex structure over the sampled points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HermitianStatus {
    Absent,
    Compatible(f64),
    Incompatible(f64),
}

/// Sampled points with all per-point data, ready for identity checks.
pub struct Session<'a> {
    pub spec: &'a ManifoldSpec,
    pub config: VerifyConfig,
    pub points: Vec<PointData>,
    pub classification: Option<ClassificationReport>,
    pub hermitian_status: HermitianStatus,
}

fn point_stream(index: usize, slot: u64) -> u64 {
    1_000 + 8 * index as u64 + slot
}

fn prepare_point(
    spec: &ManifoldSpec,
    config: &VerifyConfig,
    index: usize,
    p: &[f64],
) -> Result<PointData> {
    let validation = spec.validate_at(p)?;
    let geometry = PointGeometry::compute(spec, p)?;
    let compatible = matches!(validation.hermitian_residual(), Some(r) if r <= HERMITIAN_TOL);
    let mut data = PointData {
        index,
        frame: geometry.coordinate_frame(),
        geometry,
        validation,
        hermitian: None,
        classification: None,
        nu_sampled: None,
        nu_formula: None,
    };
    if compatible {
        let pg = &data.geometry;
        let h = HermitianData::compute(spec, pg)?;
        let seed = config.seed;
        let frame = AdaptedFrame::build(&pg.g, &h.j, &mut rng_for(seed, point_stream(index, 2)))?;
        data.frame = frame.vectors();
        data.classification = Some(classify_point(
            pg,
            &h,
            config.vectors,
            &mut rng_for(seed, point_stream(index, 1)),
            config.tolerance,
        ));
        if spec.dim >= 4 {
            data.nu_sampled = Some(curvature_stats(
                pg,
                &h,
                PlaneKind::Antiholomorphic,
                config.planes,
                &mut rng_for(seed, point_stream(index, 3)),
            )?);
            data.nu_formula = Some(nu_from_formula(&pg.tau, &h.tau_prime, spec.n())?);
        }
        data.hermitian = Some(h);
    }
    Ok(data)
}

fn run_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(t) => match rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

impl<'a> Session<'a> {
    pub fn prepare(spec: &'a ManifoldSpec, config: &VerifyConfig) -> Result<Session<'a>> {
        config.validate()?;
        let pts = spec.sample_points(config.points, config.seed)?;
        let mut points: Vec<PointData> = run_pool(config.threads, || {
            pts.par_iter()
                .enumerate()
                .map(|(i, p)| prepare_point(spec, config, i, p))
                .collect::<Result<Vec<_>>>()
        })?;

        let hermitian_status = if spec.complex_structure.is_none() {
            HermitianStatus::Absent
        } else {
            let worst = points
                .iter()
                .filter_map(|p| p.validation.hermitian_residual())
                .fold(0.0, f64::max);
            if points.iter().all(|p| p.hermitian.is_some()) {
                HermitianStatus::Compatible(worst)
            } else {
                for p in &mut points {
                    p.hermitian = None;
                    p.classification = None;
                    p.nu_sampled = None;
                    p.nu_formula = None;
                    p.frame = p.geometry.coordinate_frame();
                }
                HermitianStatus::Incompatible(worst)
            }
        };
        let classification = points
            .iter()
            .filter_map(|p| p.classification.clone())
            .reduce(|a, b| a.merge(&b));
        Ok(Session {
            spec,
            config: config.clone(),
            points,
            classification,
            hermitian_status,
        })
    }

    fn n(&self) -> usize {
        self.spec.n()
    }

    fn not_met(&self, tag: Tag, reason: impl Into<String>) -> CurvError {
        CurvError::HypothesisNotMet {
            tag: tag.to_string(),
            reason: reason.into(),
        }
    }

    fn require_hermitian(&self, tag: Tag) -> Result<&ClassificationReport> {
        match self.hermitian_status {
            HermitianStatus::Absent => Err(self.not_met(tag, "no almost complex structure")),
            HermitianStatus::Incompatible(r) => Err(self.not_met(
                tag,
                format!("J is not Hermitian-compatible (residual {r:.3e})"),
            )),
            HermitianStatus::Compatible(_) => Ok(self
                .classification
                .as_ref()
                .expect("classification exists when J is compatible")),
        }
    }

    fn require_n(&self, tag: Tag, min_n: usize) -> Result<()> {
        if self.n() < min_n {
            Err(CurvError::Dimension(format!(
                "{tag} needs n >= {min_n} (real dimension >= {}), manifold has n = {}",
                2 * min_n,
                self.n()
            )))
        } else {
            Ok(())
        }
    }

    fn require_constant_nu(&self, tag: Tag) -> Result<()> {
        let tol = self.config.tolerance;
        for p in &self.points {
            let s = p
                .nu_sampled
                .ok_or_else(|| self.not_met(tag, "antiholomorphic curvature unavailable"))?;
            let rel = s.spread / (1.0 + s.mean.abs());
            if rel > tol {
                return Err(self.not_met(
                    tag,
                    format!(
                        "antiholomorphic curvature is not pointwise constant (relative spread {rel:.3e} at point {})",
                        p.index
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Fails with `HypothesisNotMet` or `Dimension` when `tag` does not apply.
    pub fn check_hypotheses(&self, tag: Tag) -> Result<()> {
        let class_pass = |c: &ClassificationReport, which: &str| -> bool {
            c.entries()
                .iter()
                .find(|(name, _)| *name == which)
                .map(|(_, r)| r.pass())
                .unwrap_or(false)
        };
        match tag {
            Tag::EQ6 | Tag::EQ7 | Tag::EQ8 => Ok(()),
            Tag::EQ1 | Tag::EQ2 => {
                let c = self.require_hermitian(tag)?;
                if class_pass(c, "nearly_kahler") || class_pass(c, "qk2") {
                    Ok(())
                } else {
                    Err(self.not_met(tag, "manifold is neither nearly-Kaehler nor QK2"))
                }
            }
            Tag::EQ9 => {
                let c = self.require_hermitian(tag)?;
                if class_pass(c, "qk2") {
                    Ok(())
                } else {
                    Err(self.not_met(tag, "manifold is not QK2"))
                }
            }
            Tag::PROP3 | Tag::PROP4 | Tag::PROP5 | Tag::EQ10 | Tag::EQ11 => {
                let c = self.require_hermitian(tag)?;
                self.require_n(tag, 2)?;
                if !class_pass(c, "ah3") {
                    return Err(self.not_met(tag, "manifold is not AH3"));
                }
                self.require_constant_nu(tag)
            }
            Tag::EQ12 | Tag::EQ13 | Tag::LEMMA | Tag::SCHUR => {
                let c = self.require_hermitian(tag)?;
                self.require_n(tag, 2)?;
                if !class_pass(c, "qk2") {
                    return Err(self.not_met(tag, "manifold is not QK2"));
                }
                self.require_constant_nu(tag)
            }
        }
    }

    /// Evaluates one identity over all points.
    pub fn check(&self, tag: Tag) -> Result<IdentityResult> {
        self.check_hypotheses(tag)?;
        let tol = self.config.tolerance;
        let mut result = match tag {
            Tag::LEMMA => {
                let (r, s) = self.lemma_residual();
                IdentityResult::new(tag, r, s, tol)
            }
            Tag::SCHUR => {
                let stats = self.schur_statistics()?;
                let mut res =
                    IdentityResult::new(tag, stats.relative_residual(), self.points.len(), tol);
                res.warnings = stats.warnings.clone();
                res
            }
            _ => {
                let per_point: Vec<(f64, usize)> = run_pool(self.config.threads, || {
                    self.points
                        .par_iter()
                        .map(|pd| {
                            let mut rng = rng_for(
                                self.config.seed,
                                100_000 + 10_000 * tag.stream() + pd.index as u64,
                            );
                            self.residual_at(tag, pd, &mut rng)
                        })
                        .collect()
                });
                let worst = per_point.iter().map(|r| r.0).fold(0.0, f64::max);
                let samples = per_point.iter().map(|r| r.1).sum();
                IdentityResult::new(tag, worst, samples, tol)
            }
        };
        if matches!(tag, Tag::LEMMA | Tag::SCHUR | Tag::EQ12 | Tag::EQ13) && self.n() < 3 {
            result.warnings.push(format!(
                "n = {} < 3: constancy of nu is only guaranteed for n >= 3",
                self.n()
            ));
        }
        Ok(result)
    }

    fn tuple(&self, pd: &PointData, rng: &mut SeededRng, t: usize) -> [Vec<f64>; 4] {
        if t.is_multiple_of(2) {
            std::array::from_fn(|_| random_unit_vector(&pd.geometry.g, rng))
        } else {
            std::array::from_fn(|_| pd.frame[rng.random_range(0..pd.frame.len())].clone())
        }
    }

    /// Unit orthogonal `x, y` with `x ⊥ Jy`.
    fn antiholomorphic_pair(
        &self,
        pd: &PointData,
        h: &HermitianData,
        rng: &mut SeededRng,
        t: usize,
    ) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        if t.is_multiple_of(2) {
            let pl = sample_planes(&pd.geometry.g, &h.j, PlaneKind::Antiholomorphic, 1, rng)
                .expect("dimension checked")
                .remove(0);
            (pl.x, pl.y)
        } else {
            let a = rng.random_range(0..n);
            let b = (a + 1 + rng.random_range(0..n - 1)) % n;
            (pd.frame[a].clone(), pd.frame[b].clone())
        }
    }

    fn unit_vector(&self, pd: &PointData, rng: &mut SeededRng, t: usize) -> Vec<f64> {
        if t.is_multiple_of(2) {
            random_unit_vector(&pd.geometry.g, rng)
        } else {
            pd.frame[rng.random_range(0..pd.frame.len())].clone()
        }
    }

    fn residual_at(&self, tag: Tag, pd: &PointData, rng: &mut SeededRng) -> (f64, usize) {
        let pg = &pd.geometry;
        let n = self.n() as f64;
        let frame = &pd.frame;
        let count = self.config.vectors;
        let mut worst: f64 = 0.0;
        let herm = pd.hermitian.as_ref();
        let nu = pd.nu_formula.as_ref();
        match tag {
            Tag::PROP5 => {
                let formula = nu.expect("hypotheses checked").value();
                let sampled = pd.nu_sampled.expect("hypotheses checked").mean;
                return (rel_residual(formula, sampled), 1);
            }
            Tag::PROP4 => {
                let h = herm.expect("hypotheses checked");
                let tau = pg.tau.value();
                let tau_p = h.tau_prime.value();
                for t in 0..count {
                    let [x, y, ..] = self.tuple(pd, rng, t);
                    let lhs = (n + 1.0) * pg.s(&x, &y) - 3.0 * h.s_prime(&x, &y);
                    let rhs = ((n + 1.0) * tau - 3.0 * tau_p) / (2.0 * n) * pg.inner(&x, &y);
                    worst = worst.max(rel_residual(lhs, rhs));
                }
                return (worst, count);
            }
            _ => {}
        }
        for t in 0..count {
            let r = match tag {
                Tag::EQ1 | Tag::EQ2 => {
                    let h = herm.expect("hypotheses checked");
                    let [x, y, z, u] = self.tuple(pd, rng, t);
                    let v = [&x[..], &y[..], &z[..], &u[..]];
                    if tag == Tag::EQ1 {
                        eq1_residual(pg, h, v)
                    } else {
                        eq2_residual(pg, h, v)
                    }
                }
                Tag::PROP3 => {
                    let h = herm.expect("hypotheses checked");
                    let ctx = AlgebraicContext::from_point(pg, h);
                    let nu = nu.expect("hypotheses checked").value();
                    let [x, y, z, u] = self.tuple(pd, rng, t);
                    let lhs = pg.r(&x, &y, &z, &u);
                    let rhs = ctx.psi(&x, &y, &z, &u) / 6.0 + nu * ctx.r1(&x, &y, &z, &u)
                        - (2.0 * n - 1.0) / 3.0 * nu * ctx.r2(&x, &y, &z, &u);
                    rel_residual(lhs, rhs)
                }
                Tag::EQ6 => {
                    let [w, x, y, z] = self.tuple(pd, rng, t);
                    let u = self.unit_vector(pd, rng, t);
                    let lhs = pg.nabla_r(&w, &x, &y, &z, &u);
                    let rhs = -(pg.nabla_r(&x, &y, &w, &z, &u) + pg.nabla_r(&y, &w, &x, &z, &u));
                    rel_residual(lhs, rhs)
                }
                Tag::EQ7 => {
                    let [x, y, z, _] = self.tuple(pd, rng, t);
                    let lhs = pg.nabla_s(&x, &y, &z) - pg.nabla_s(&y, &x, &z);
                    let rhs: f64 = frame.iter().map(|e| pg.nabla_r(e, &x, &y, &z, e)).sum();
                    rel_residual(lhs, rhs)
                }
                Tag::EQ8 => {
                    let x = self.unit_vector(pd, rng, t);
                    let lhs: f64 = frame.iter().map(|e| pg.nabla_s(e, &x, e)).sum();
                    rel_residual(lhs, 0.5 * pg.x_tau(&x))
                }
                Tag::EQ9 => {
                    let h = herm.expect("hypotheses checked");
                    let x = self.unit_vector(pd, rng, t);
                    let lhs: f64 = frame.iter().map(|e| h.nabla_s_prime(e, &x, e)).sum();
                    rel_residual(lhs, 0.5 * h.x_tau_prime(&x))
                }
                Tag::EQ10 | Tag::EQ12 => {
                    let h = herm.expect("hypotheses checked");
                    let nu = nu.expect("hypotheses checked");
                    let (x, y) = self.antiholomorphic_pair(pd, h, rng, t);
                    let jy = h.apply_j(&y);
                    let lhs = 4.0 * (n - 1.0) * nu.directional(&x).expect("order 1");
                    let mut rhs = pg.nabla_s(&x, &y, &y) + pg.nabla_s(&x, &jy, &jy)
                        - pg.nabla_s(&y, &x, &y)
                        - pg.nabla_s(&jy, &x, &jy);
                    if tag == Tag::EQ10 {
                        let jby = h.apply_j(&h.b_vector(&y));
                        let g_jby_x = pg.inner(&jby, &x);
                        rhs += -pg.s(&jby, &x) - g_jby_x * pg.s(&y, &y)
                            + 2.0 * (2.0 * n - 1.0) * nu.value() * g_jby_x;
                    }
                    rel_residual(lhs, rhs)
                }
                Tag::EQ11 => {
                    let h = herm.expect("hypotheses checked");
                    let nu = nu.expect("hypotheses checked");
                    let x = self.unit_vector(pd, rng, t);
                    let jx = h.apply_j(&x);
                    let lhs = pg.nabla_s(&x, &jx, &jx) - pg.nabla_s(&jx, &x, &jx);
                    let trace: f64 = frame
                        .iter()
                        .map(|e| pg.s(&h.nabla_j_apply(e, &jx), e))
                        .sum();
                    let g_df_jx = pg.inner(&h.delta_f, &jx);
                    let inner = 0.5 * pg.x_tau(&x) - trace
                        + g_df_jx * pg.s(&x, &x)
                        + pg.nabla_s(&x, &jx, &jx)
                        + pg.s(&h.nabla_j_apply(&x, &x), &jx);
                    let rhs = 0.5 * inner
                        - 2.0 * (n - 1.0) * nu.directional(&x).expect("order 1")
                        - (2.0 * n - 1.0) * nu.value() * g_df_jx;
                    rel_residual(lhs, rhs)
                }
                Tag::EQ13 => {
                    let h = herm.expect("hypotheses checked");
                    let nu = nu.expect("hypotheses checked");
                    let x = self.unit_vector(pd, rng, t);
                    let jx = h.apply_j(&x);
                    let lhs = 4.0 * (n - 1.0) * nu.directional(&x).expect("order 1");
                    let rhs =
                        0.5 * pg.x_tau(&x) - pg.nabla_s(&x, &jx, &jx) + pg.nabla_s(&jx, &x, &jx);
                    rel_residual(lhs, rhs)
                }
                Tag::PROP4 | Tag::PROP5 | Tag::LEMMA | Tag::SCHUR => unreachable!(),
            };
            worst = worst.max(r);
        }
        (worst, count)
    }

    /// `(n+1)τ − 3τ′` as a jet at one point.
    fn lemma_jet(&self, pd: &PointData) -> Jet {
        let h = pd.hermitian.as_ref().expect("hypotheses checked");
        let n = self.n() as f64;
        &pd.geometry.tau.scale(n + 1.0) - &h.tau_prime.scale(3.0)
    }

    fn lemma_residual(&self) -> (f64, usize) {
        let values: Vec<Jet> = self.points.iter().map(|p| self.lemma_jet(p)).collect();
        let base = values[0].value();
        let n = self.n() as f64;
        let mut worst: f64 = 0.0;
        for (pd, f) in self.points.iter().zip(&values) {
            worst = worst.max(rel_residual(f.value(), base));
            let grad = gradient_norm(&pd.geometry, f);
            worst = worst.max(rel_residual((n - 1.0) * grad, 0.0));
        }
        (worst, values.len())
    }

    /// Per-point `ν`, `τ`, `τ′` and their spreads across points.
    pub fn schur_statistics(&self) -> Result<SchurStatistics> {
        self.require_hermitian(Tag::SCHUR)?;
        self.require_n(Tag::SCHUR, 2)?;
        let mut rows = Vec::with_capacity(self.points.len());
        for pd in &self.points {
            let h = pd.hermitian.as_ref().expect("compatible J");
            let nu = pd.nu_formula.as_ref().expect("n >= 2");
            let lemma = self.lemma_jet(pd);
            let pg = &pd.geometry;
            rows.push(SchurPoint {
                index: pd.index,
                point: pg.point.clone(),
                nu_formula: nu.value(),
                nu_sampled: pd.nu_sampled.expect("n >= 2").mean,
                nu_sampled_spread: pd.nu_sampled.expect("n >= 2").spread,
                tau: pg.tau.value(),
                tau_prime: h.tau_prime.value(),
                lemma_quantity: lemma.value(),
                grad_nu: gradient_norm(pg, nu),
                grad_tau: gradient_norm(pg, &pg.tau),
                grad_tau_prime: gradient_norm(pg, &h.tau_prime),
                grad_lemma_quantity: gradient_norm(pg, &lemma),
            });
        }
        let spread = |f: fn(&SchurPoint) -> f64| {
            let (lo, hi) = rows
                .iter()
                .map(f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                    (a.min(v), b.max(v))
                });
            hi - lo
        };
        let max_of = |f: fn(&SchurPoint) -> f64| rows.iter().map(f).fold(0.0, f64::max);
        let mut warnings = Vec::new();
        if self.n() < 3 {
            warnings.push(format!(
                "n = {} < 3: constancy of nu is only guaranteed for n >= 3",
                self.n()
            ));
        }
        let tol = self.config.tolerance;
        let mut stats = SchurStatistics {
            n: self.n(),
            spread_nu_formula: spread(|r| r.nu_formula),
            spread_nu_sampled: spread(|r| r.nu_sampled),
            spread_tau: spread(|r| r.tau),
            spread_tau_prime: spread(|r| r.tau_prime),
            spread_lemma_quantity: spread(|r| r.lemma_quantity),
            max_grad_nu: max_of(|r| r.grad_nu),
            max_grad_tau: max_of(|r| r.grad_tau),
            max_grad_tau_prime: max_of(|r| r.grad_tau_prime),
            max_grad_lemma_quantity: max_of(|r| r.grad_lemma_quantity),
            tolerance: tol,
            pass: false,
            warnings,
            points: rows,
        };
        stats.pass = [
            stats.spread_nu_formula,
            stats.spread_nu_sampled,
            stats.spread_tau,
            stats.spread_tau_prime,
            stats.spread_lemma_quantity,
        ]
        .iter()
        .all(|&s| s <= tol);
        Ok(stats)
    }
}

/// `|dq|_g`, the largest `x(q)` over unit `x`.
pub fn gradient_norm(pg: &PointGeometry, q: &Jet) -> f64 {
    let grad = q.gradient();
    let raised = pg.raise(&grad);
    grad.iter()
        .zip(&raised)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// Values at one sampled point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurPoint {
    pub index: usize,
    pub point: Vec<f64>,
    pub nu_formula: f64,
    pub nu_sampled: f64,
    pub nu_sampled_spread: f64,
    pub tau: f64,
    pub tau_prime: f64,
    /// `(n+1)τ − 3τ′`.
    pub lemma_quantity: f64,
    pub grad_nu: f64,
    pub grad_tau: f64,
    pub grad_tau_prime: f64,
    pub grad_lemma_quantity: f64,
}

/// Cross-point constancy of `ν`, `τ`, `τ′` and `(n+1)τ − 3τ′`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurStatistics {
    pub n: usize,
    pub points: Vec<SchurPoint>,
    pub spread_nu_formula: f64,
    pub spread_nu_sampled: f64,
    pub spread_tau: f64,
    pub spread_tau_prime: f64,
    pub spread_lemma_quantity: f64,
    pub max_grad_nu: f64,
    pub max_grad_tau: f64,
    pub max_grad_tau_prime: f64,
    pub max_grad_lemma_quantity: f64,
    pub tolerance: f64,
    /// Every spread is within tolerance.
    pub pass: bool,
    pub warnings: Vec<String>,
}

impl SchurStatistics {
    /// Largest spread or gradient, each relative to the magnitude of its quantity.
    pub fn relative_residual(&self) -> f64 {
        let scale = |f: fn(&SchurPoint) -> f64| {
            1.0 + self.points.iter().map(|p| f(p).abs()).fold(0.0, f64::max)
        };
        [
            self.spread_nu_formula / scale(|p| p.nu_formula),
            self.spread_nu_sampled / scale(|p| p.nu_sampled),
            self.spread_tau / scale(|p| p.tau),
            self.spread_tau_prime / scale(|p| p.tau_prime),
            self.spread_lemma_quantity / scale(|p| p.lemma_quantity),
            self.max_grad_nu / scale(|p| p.nu_formula),
            self.max_grad_tau / scale(|p| p.tau),
            self.max_grad_tau_prime / scale(|p| p.tau_prime),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// One identity on freshly sampled points.
pub fn check_identity(
    spec: &ManifoldSpec,
    tag: Tag,
    points: usize,
    vectors_per_point: usize,
    seed: u64,
    tol: f64,
) -> Result<IdentityResult> {
    let config = VerifyConfig {
        points,
        vectors: vectors_per_point,
        seed,
        tolerance: tol,
        ..VerifyConfig::default()
    };
    Session::prepare(spec, &config)?.check(tag)
}

/// Constancy statistics on freshly sampled points.
pub fn schur_check(
    spec: &ManifoldSpec,
    points: usize,
    seed: u64,
    tol: f64,
) -> Result<SchurStatistics> {
    let config = VerifyConfig {
        points,
        seed,
        tolerance: tol,
        ..VerifyConfig::default()
    };
    let session = Session::prepare(spec, &config)?;
    session.check_hypotheses(Tag::SCHUR)?;
    session.schur_statistics()
}

/// Which parts of the report to produce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Classify,
    /// Identity checks; `None` runs every tag except `SCHUR`.
    Identities(Option<Vec<Tag>>),
    Schur,
    All,
}

impl Suite {
    fn tags(&self) -> Vec<Tag> {
        match self {
            Suite::Classify => Vec::new(),
            Suite::Identities(Some(tags)) => tags.clone(),
            Suite::Identities(None) => Tag::ALL
                .iter()
                .copied()
                .filter(|t| *t != Tag::SCHUR)
                .collect(),
            Suite::Schur => vec![Tag::LEMMA, Tag::SCHUR],
            Suite::All => Tag::ALL.to_vec(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Suite::Classify => "class".into(),
            Suite::Identities(None) => "identities".into(),
            Suite::Identities(Some(tags)) => {
                let names: Vec<&str> = tags.iter().map(Tag::as_str).collect();
                format!("identities:{}", names.join(","))
            }
            Suite::Schur => "schur".into(),
            Suite::All => "all".into(),
        }
    }
}

/// Validation, classification, identities and constancy statistics in one
/// report. Individual identity failures and unmet hypotheses are recorded,
/// not raised; errors come only from sampling or evaluating the chart.
pub fn full_report(spec: &ManifoldSpec, config: &VerifyConfig, suite: &Suite) -> Result<Report> {
    let session = Session::prepare(spec, config)?;
    let validation = ValidationSummary::from_session(&session);
    let mut identities = Vec::new();
    let mut skipped = Vec::new();
    let mut warnings = Vec::new();

    for tag in suite.tags() {
        match session.check(tag) {
            Ok(r) => {
                for w in &r.warnings {
                    if !warnings.contains(w) {
                        warnings.push(w.clone());
                    }
                }
                identities.push(r);
            }
            Err(e @ (CurvError::HypothesisNotMet { .. } | CurvError::Dimension(_))) => {
                skipped.push(Skipped {
                    tag,
                    reason: match e {
                        CurvError::HypothesisNotMet { reason, .. } => reason,
                        other => other.to_string(),
                    },
                    hypothesis_note: tag.hypothesis_note().to_string(),
                });
            }
            Err(e) => return Err(e),
        }
    }

    let schur = if matches!(suite, Suite::Schur | Suite::All)
        && session.check_hypotheses(Tag::SCHUR).is_ok()
    {
        Some(session.schur_statistics()?)
    } else {
        None
    };

    let all_passed = validation.passed
        && identities.iter().all(|r| r.pass)
        && schur.as_ref().map(|s| s.pass).unwrap_or(true);

    Ok(Report {
        manifold: ManifoldInfo {
            name: spec.name.clone(),
            dimension: spec.dim,
            parameters: spec.parameters.clone(),
        },
        config: ReportConfig {
            points: config.points,
            planes: config.planes,
            vectors: config.vectors,
            seed: config.seed,
            tolerance: config.tolerance,
            suite: suite.name(),
        },
        validation,
        classification: session.classification.clone(),
        identities,
        schur,
        skipped,
        warnings,
        all_passed,
    })
}
