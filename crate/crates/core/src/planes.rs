//! Adapted frames, tangent 2-planes and sectional curvature sampling.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{CurvError, Result};
use crate::geometry::{ManifoldSpec, PointGeometry};
use crate::hermitian::HermitianData;
use crate::jets::Jet;
use crate::sampling::{self, gaussian_vector, random_unit_vector, rng_for, SeededRng};

const DEGENERATE_DRAW: f64 = 1e-8;
const MAX_RETRIES: usize = 16;
/// Orthonormality tolerance for planes and frames.
pub const ORTHO_TOL: f64 = 1e-10;

fn apply(j: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    let d = v.len();
    (0..d)
        .map(|k| (0..d).map(|m| j[(k, m)] * v[m]).sum())
        .collect()
}

fn project_out(g: &DMatrix<f64>, v: &mut [f64], basis: &[Vec<f64>]) {
    for e in basis {
        let c = sampling::inner(g, e, v);
        for (vi, ei) in v.iter_mut().zip(e) {
            *vi -= c * ei;
        }
    }
}

/// Orthonormal basis `{u₁,…,u_n, Ju₁,…,Ju_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    pub u: Vec<Vec<f64>>,
    pub ju: Vec<Vec<f64>>,
}

impl AdaptedFrame {
    /// Greedy construction from seeded random draws.
    pub fn build(g: &DMatrix<f64>, j: &DMatrix<f64>, rng: &mut SeededRng) -> Result<AdaptedFrame> {
        let d = g.nrows();
        if d < 2 || !d.is_multiple_of(2) {
            return Err(CurvError::Dimension(format!(
                "adapted frame needs even dimension >= 2, got {d}"
            )));
        }
        let mut span: Vec<Vec<f64>> = Vec::with_capacity(d);
        let (mut u, mut ju) = (Vec::new(), Vec::new());
        for _ in 0..d / 2 {
            let mut found = None;
            for _ in 0..MAX_RETRIES {
                let mut v = gaussian_vector(d, rng);
                project_out(g, &mut v, &span);
                let n = sampling::norm(g, &v);
                if n >= DEGENERATE_DRAW {
                    found = Some(v.iter().map(|x| x / n).collect::<Vec<f64>>());
                    break;
                }
            }
            let uk = found.ok_or_else(|| {
                CurvError::FrameConstruction(format!("{MAX_RETRIES} consecutive degenerate draws"))
            })?;
            let juk = apply(j, &uk);
            span.push(uk.clone());
            span.push(juk.clone());
            u.push(uk);
            ju.push(juk);
        }
        Ok(AdaptedFrame { u, ju })
    }

    /// `u₁,…,u_n, Ju₁,…,Ju_n` in order.
    pub fn vectors(&self) -> Vec<Vec<f64>> {
        self.u.iter().chain(&self.ju).cloned().collect()
    }

    /// Max entry of `Gram − Id`.
    pub fn gram_error(&self, g: &DMatrix<f64>) -> f64 {
        let v = self.vectors();
        let mut worst: f64 = 0.0;
        for (a, x) in v.iter().enumerate() {
            for (b, y) in v.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((sampling::inner(g, x, y) - want).abs());
            }
        }
        worst
    }

    /// Max deviation of `J u_k` from the stored `(n+k)`-th vector.
    pub fn closure_error(&self, j: &DMatrix<f64>) -> f64 {
        self.u
            .iter()
            .zip(&self.ju)
            .flat_map(|(u, ju)| {
                apply(j, u)
                    .into_iter()
                    .zip(ju.iter())
                    .map(|(a, b)| (a - b).abs())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }
}

pub fn adapted_frame(spec: &ManifoldSpec, p: &[f64], seed: u64) -> Result<AdaptedFrame> {
    let g = spec.metric_at(p)?;
    let j = spec.j_at(p)?;
    AdaptedFrame::build(&g, &j, &mut rng_for(seed, 2))
}

/// A tangent 2-plane spanned by a `g`-orthonormal pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plane {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `|g(Jx, y)|`: 0 for antiholomorphic, 1 for holomorphic planes.
    pub hol_angle: f64,
}

impl Plane {
    pub fn new(g: &DMatrix<f64>, j: &DMatrix<f64>, x: Vec<f64>, y: Vec<f64>) -> Plane {
        let hol_angle = sampling::inner(g, &apply(j, &x), &y).abs();
        Plane { x, y, hol_angle }
    }

    pub fn orthonormality_error(&self, g: &DMatrix<f64>) -> f64 {
        (sampling::inner(g, &self.x, &self.x) - 1.0)
            .abs()
            .max((sampling::inner(g, &self.y, &self.y) - 1.0).abs())
            .max(sampling::inner(g, &self.x, &self.y).abs())
    }

    pub fn is_antiholomorphic(&self) -> bool {
        self.hol_angle <= ORTHO_TOL
    }

    pub fn is_holomorphic(&self) -> bool {
        self.hol_angle >= 1.0 - ORTHO_TOL
    }

    /// Same plane, basis rotated by `angle`.
    pub fn rotated(&self, angle: f64) -> Plane {
        let (s, c) = angle.sin_cos();
        let x = self
            .x
            .iter()
            .zip(&self.y)
            .map(|(a, b)| c * a + s * b)
            .collect();
        let y = self
            .x
            .iter()
            .zip(&self.y)
            .map(|(a, b)| -s * a + c * b)
            .collect();
        Plane {
            x,
            y,
            hol_angle: self.hol_angle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneKind {
    Holomorphic,
    Antiholomorphic,
    Random,
}

/// `K(α) = R(x,y,y,x)` for an orthonormal basis of `α`.
pub fn sectional_curvature(pg: &PointGeometry, plane: &Plane) -> Result<f64> {
    let err = plane.orthonormality_error(&pg.g);
    if err > ORTHO_TOL {
        return Err(CurvError::Precondition(format!(
            "plane basis is not orthonormal (error {err:e})"
        )));
    }
    Ok(pg.r(&plane.x, &plane.y, &plane.y, &plane.x))
}

/// `count` planes of the requested kind at a point with metric `g` and structure `j`.
pub fn sample_planes(
    g: &DMatrix<f64>,
    j: &DMatrix<f64>,
    kind: PlaneKind,
    count: usize,
    rng: &mut SeededRng,
) -> Result<Vec<Plane>> {
    let d = g.nrows();
    if kind == PlaneKind::Antiholomorphic && d < 4 {
        return Err(CurvError::Dimension(format!(
            "antiholomorphic planes need dimension >= 4, got {d}"
        )));
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = random_unit_vector(g, rng);
        let y = match kind {
            PlaneKind::Holomorphic => {
                let mut y = apply(j, &x);
                // J is an isometry; renormalize against rounding only
                let n = sampling::norm(g, &y);
                y.iter_mut().for_each(|v| *v /= n);
                y
            }
            PlaneKind::Antiholomorphic | PlaneKind::Random => {
                let mut basis = vec![x.clone()];
                if kind == PlaneKind::Antiholomorphic {
                    let mut jx = apply(j, &x);
                    project_out(g, &mut jx, &basis);
                    let n = sampling::norm(g, &jx);
                    jx.iter_mut().for_each(|v| *v /= n);
                    basis.push(jx);
                }
                let mut y = gaussian_vector(d, rng);
                project_out(g, &mut y, &basis);
                project_out(g, &mut y, &basis);
                let n = sampling::norm(g, &y);
                if n < DEGENERATE_DRAW {
                    continue;
                }
                y.iter().map(|v| v / n).collect()
            }
        };
        out.push(Plane::new(g, j, x, y));
    }
    Ok(out)
}

/// Summary of sectional curvatures over a batch of planes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// `max − min`.
    pub spread: f64,
}

impl CurvatureStats {
    pub fn from_values(values: &[f64]) -> CurvatureStats {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        CurvatureStats {
            mean,
            min,
            max,
            spread: max - min,
        }
    }
}

/// Sectional curvature statistics over `count` planes of `kind` at one point.
pub fn curvature_stats(
    pg: &PointGeometry,
    h: &HermitianData,
    kind: PlaneKind,
    count: usize,
    rng: &mut SeededRng,
) -> Result<CurvatureStats> {
    if count == 0 {
        return Err(CurvError::Precondition("plane count must be >= 1".into()));
    }
    let planes = sample_planes(&pg.g, &h.j, kind, count, rng)?;
    let values = planes
        .iter()
        .map(|pl| sectional_curvature(pg, pl))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurvatureStats::from_values(&values))
}

/// Antiholomorphic sectional curvature `ν` sampled at `p`.
pub fn estimate_nu(
    spec: &ManifoldSpec,
    p: &[f64],
    count: usize,
    seed: u64,
) -> Result<CurvatureStats> {
    if spec.dim < 4 {
        return Err(CurvError::Dimension(
            "antiholomorphic curvature needs dimension >= 4".into(),
        ));
    }
    let pg = PointGeometry::compute(spec, p)?;
    let h = HermitianData::compute(spec, &pg)?;
    curvature_stats(
        &pg,
        &h,
        PlaneKind::Antiholomorphic,
        count,
        &mut rng_for(seed, 3),
    )
}

/// `ν = ((2n+1)τ − 3τ′) / (8n(n²−1))` carried as a jet.
pub fn nu_from_formula(tau: &Jet, tau_prime: &Jet, n: usize) -> Result<Jet> {
    if n < 2 {
        return Err(CurvError::FormulaDomain(format!(
            "nu formula needs n >= 2, got {n}"
        )));
    }
    let n = n as f64;
    let num = &tau.scale(2.0 * n + 1.0) - &tau_prime.scale(3.0);
    Ok(num.scale(1.0 / (8.0 * n * (n * n - 1.0))))
}
