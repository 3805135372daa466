//! Quantities built from the almost complex structure `J`.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{CurvError, Result};
use crate::geometry::{
    self, contract, covariant_derivative_2, ix, rel_residual, ManifoldSpec, PointGeometry,
};
use crate::jets::Jet;
use crate::sampling::{random_unit_vector, rng_for, SeededRng};

/// `J`, `∇J` and the `J`-twisted Ricci contraction at one point.
#[derive(Debug, Clone)]
pub struct HermitianData {
    /// `Jⁱ_j` as order-1 jets, row-major.
    pub j_mixed: Vec<Jet>,
    pub j: DMatrix<f64>,
    /// `J_ij = g_ik Jᵏ_j`.
    pub j_low: DMatrix<f64>,
    /// `[i][k][j] = (∇_i J)ᵏ_j`.
    pub nabla_j: Vec<f64>,
    /// `S′_ab`, order-1 jets, not assumed symmetric.
    pub s_prime: Vec<Jet>,
    pub tau_prime: Jet,
    /// `[m][a][b] = (∇_m S′)_ab`.
    pub nabla_s_prime: Vec<f64>,
    /// `δF = Σ_i (∇_{e_i}J)e_i`.
    pub delta_f: Vec<f64>,
}

impl HermitianData {
    pub fn compute(spec: &ManifoldSpec, pg: &PointGeometry) -> Result<HermitianData> {
        let field = spec
            .complex_structure
            .as_ref()
            .ok_or_else(|| CurvError::NotAlmostHermitian(spec.name.clone()))?;
        let d = pg.dim;
        let jm = field.evaluate(&Jet::seed(&pg.point, 1)?)?;
        let j = DMatrix::from_fn(d, d, |a, b| jm[a * d + b].value());
        let j_low = &pg.g * &j;
        let gamma = pg.gamma_values();

        let mut nabla_j = vec![0.0; d * d * d];
        for i in 0..d {
            for k in 0..d {
                for jj in 0..d {
                    let mut v = jm[k * d + jj].gradient()[i];
                    for m in 0..d {
                        v += gamma[ix(d, &[k, i, m])] * j[(m, jj)]
                            - gamma[ix(d, &[m, i, jj])] * j[(k, m)];
                    }
                    nabla_j[ix(d, &[i, k, jj])] = v;
                }
            }
        }

        // S′_ab = g^{pq} R_{a p r s} Jʳ_q Jˢ_b
        let zero = pg.tau.zero_like();
        let mut a_pr = Vec::with_capacity(d * d);
        for p in 0..d {
            for r in 0..d {
                let mut acc = zero.clone();
                for q in 0..d {
                    acc.fma_assign(&pg.metric_inv[p * d + q], &jm[r * d + q]);
                }
                a_pr.push(acc);
            }
        }
        let mut c_as = Vec::with_capacity(d * d);
        for a in 0..d {
            for s in 0..d {
                let mut acc = zero.clone();
                for p in 0..d {
                    for r in 0..d {
                        acc.fma_assign(&a_pr[p * d + r], &pg.riemann[ix(d, &[a, p, r, s])]);
                    }
                }
                c_as.push(acc);
            }
        }
        let mut s_prime = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let mut acc = zero.clone();
                for s in 0..d {
                    acc.fma_assign(&c_as[a * d + s], &jm[s * d + b]);
                }
                s_prime.push(acc);
            }
        }
        let mut tau_prime = zero.clone();
        for (gi, s) in pg.metric_inv.iter().zip(&s_prime) {
            tau_prime.fma_assign(gi, s);
        }
        let nabla_s_prime = covariant_derivative_2(&s_prime, gamma, d);

        let delta_f = (0..d)
            .map(|k| {
                let mut v = 0.0;
                for i in 0..d {
                    for jj in 0..d {
                        v += pg.g_inv[(i, jj)] * nabla_j[ix(d, &[i, k, jj])];
                    }
                }
                v
            })
            .collect();

        Ok(HermitianData {
            j_mixed: jm,
            j,
            j_low,
            nabla_j,
            s_prime,
            tau_prime,
            nabla_s_prime,
            delta_f,
        })
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    /// `Jv`.
    pub fn apply_j(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|k| (0..d).map(|m| self.j[(k, m)] * v[m]).sum())
            .collect()
    }

    /// `(∇_x J)y`.
    pub fn nabla_j_apply(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                for jj in 0..d {
                    *o += x[i] * self.nabla_j[ix(d, &[i, k, jj])] * y[jj];
                }
            }
        }
        out
    }

    /// `S′(x,y)`.
    pub fn s_prime(&self, x: &[f64], y: &[f64]) -> f64 {
        let vals: Vec<f64> = self.s_prime.iter().map(Jet::value).collect();
        contract(&vals, self.dim(), &[x, y])
    }

    pub fn s_prime_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |a, b| self.s_prime[a * d + b].value())
    }

    /// `(∇_x S′)(y,z)`.
    pub fn nabla_s_prime(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        contract(&self.nabla_s_prime, self.dim(), &[x, y, z])
    }

    /// `x(τ′)` from the order-1 jet of `τ′`.
    pub fn x_tau_prime(&self, x: &[f64]) -> f64 {
        self.tau_prime
            .directional(x)
            .expect("tau' carries first order")
    }

    /// `By = (∇_y J)y + (∇_{Jy} J)Jy`.
    pub fn b_vector(&self, y: &[f64]) -> Vec<f64> {
        let jy = self.apply_j(y);
        let a = self.nabla_j_apply(y, y);
        let b = self.nabla_j_apply(&jy, &jy);
        a.iter().zip(&b).map(|(p, q)| p + q).collect()
    }

    /// Largest `|J_ij + J_ji|`.
    pub fn j_low_antisymmetry(&self) -> f64 {
        (&self.j_low + self.j_low.transpose()).amax()
    }

    /// Residual of `(∇_i J)J + J(∇_i J) = 0`, the derivative of `J² = −Id`.
    pub fn nabla_j_anticommutator(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            let nj = DMatrix::from_fn(d, d, |k, jj| self.nabla_j[ix(d, &[i, k, jj])]);
            worst = worst.max((&nj * &self.j + &self.j * &nj).amax());
        }
        worst
    }
}

/// `S′(x,y) = Σ_i R(x, e_i, Je_i, Jy)` summed over an explicit frame.
pub fn s_prime_in_frame(
    pg: &PointGeometry,
    h: &HermitianData,
    frame: &[Vec<f64>],
    x: &[f64],
    y: &[f64],
) -> f64 {
    let jy = h.apply_j(y);
    frame.iter().map(|e| pg.r(x, e, &h.apply_j(e), &jy)).sum()
}

/// `δF` summed over an explicit frame.
pub fn delta_f_in_frame(h: &HermitianData, frame: &[Vec<f64>]) -> Vec<f64> {
    let d = h.dim();
    let mut out = vec![0.0; d];
    for e in frame {
        for (o, v) in out.iter_mut().zip(h.nabla_j_apply(e, e)) {
            *o += v;
        }
    }
    out
}

/// `(∇J)` components at `p` (layout `[i][k][j]`).
pub fn nabla_j(spec: &ManifoldSpec, p: &[f64]) -> Result<Vec<f64>> {
    let pg = PointGeometry::compute(spec, p)?;
    Ok(HermitianData::compute(spec, &pg)?.nabla_j)
}

/// `(S′, τ′)` at `p` as order-1 jets.
pub fn s_prime_tau_prime(spec: &ManifoldSpec, p: &[f64]) -> Result<(Vec<Jet>, Jet)> {
    let pg = PointGeometry::compute(spec, p)?;
    let h = HermitianData::compute(spec, &pg)?;
    Ok((h.s_prime, h.tau_prime))
}

pub fn b_vector(spec: &ManifoldSpec, p: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let pg = PointGeometry::compute(spec, p)?;
    Ok(HermitianData::compute(spec, &pg)?.b_vector(y))
}

pub fn delta_f(spec: &ManifoldSpec, p: &[f64]) -> Result<Vec<f64>> {
    let pg = PointGeometry::compute(spec, p)?;
    Ok(HermitianData::compute(spec, &pg)?.delta_f)
}

/// Which algebraic curvature-type tensor to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraicTensor {
    R1,
    R2,
    Psi,
}

/// Pointwise data the algebraic tensors are built from.
#[derive(Debug, Clone)]
pub struct AlgebraicContext {
    pub g: DMatrix<f64>,
    pub j: DMatrix<f64>,
    pub s: DMatrix<f64>,
}

impl AlgebraicContext {
    pub fn from_point(pg: &PointGeometry, h: &HermitianData) -> AlgebraicContext {
        let d = pg.dim;
        AlgebraicContext {
            g: pg.g.clone(),
            j: h.j.clone(),
            s: DMatrix::from_fn(d, d, |a, b| pg.ricci_values()[a * d + b]),
        }
    }

    fn g(&self, x: &[f64], y: &[f64]) -> f64 {
        crate::sampling::inner(&self.g, x, y)
    }

    fn s(&self, x: &[f64], y: &[f64]) -> f64 {
        crate::sampling::inner(&self.s, x, y)
    }

    fn jv(&self, v: &[f64]) -> Vec<f64> {
        let d = v.len();
        (0..d)
            .map(|k| (0..d).map(|m| self.j[(k, m)] * v[m]).sum())
            .collect()
    }

    pub fn r1(&self, x: &[f64], y: &[f64], z: &[f64], u: &[f64]) -> f64 {
        self.g(y, z) * self.g(x, u) - self.g(x, z) * self.g(y, u)
    }

    pub fn r2(&self, x: &[f64], y: &[f64], z: &[f64], u: &[f64]) -> f64 {
        let (jx, jy, jz) = (self.jv(x), self.jv(y), self.jv(z));
        self.g(&jy, z) * self.g(&jx, u)
            - self.g(&jx, z) * self.g(&jy, u)
            - 2.0 * self.g(&jx, y) * self.g(&jz, u)
    }

    pub fn psi(&self, x: &[f64], y: &[f64], z: &[f64], u: &[f64]) -> f64 {
        let (jx, jy, jz) = (self.jv(x), self.jv(y), self.jv(z));
        self.g(&jy, z) * self.s(&jx, u)
            - self.g(&jx, z) * self.s(&jy, u)
            - 2.0 * self.g(&jx, y) * self.s(&jz, u)
            + self.g(&jx, u) * self.s(&jy, z)
            - self.g(&jy, u) * self.s(&jx, z)
            - 2.0 * self.g(&jz, u) * self.s(&jx, y)
    }

    pub fn eval(&self, which: AlgebraicTensor, x: &[f64], y: &[f64], z: &[f64], u: &[f64]) -> f64 {
        match which {
            AlgebraicTensor::R1 => self.r1(x, y, z, u),
            AlgebraicTensor::R2 => self.r2(x, y, z, u),
            AlgebraicTensor::Psi => self.psi(x, y, z, u),
        }
    }
}

/// Three-way outcome of a class test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Indeterminate,
    Fail,
}

/// Residuals above `FAIL_FACTOR × tolerance` are failures; between the two, indeterminate.
pub const FAIL_FACTOR: f64 = 1e3;

impl Verdict {
    pub fn from_residual(residual: f64, tol: f64) -> Verdict {
        if residual <= tol {
            Verdict::Pass
        } else if residual <= FAIL_FACTOR * tol {
            Verdict::Indeterminate
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassResult {
    pub residual: f64,
    pub verdict: Verdict,
    pub pass: bool,
}

impl ClassResult {
    fn new(residual: f64, tol: f64) -> ClassResult {
        let verdict = Verdict::from_residual(residual, tol);
        ClassResult {
            residual,
            verdict,
            pass: verdict == Verdict::Pass,
        }
    }

    pub fn pass(&self) -> bool {
        self.pass
    }
}

/// Max residuals of the five class identities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub kahler: ClassResult,
    pub nearly_kahler: ClassResult,
    pub quasi_kahler: ClassResult,
    pub qk2: ClassResult,
    pub ah3: ClassResult,
    /// Max residual of the EQ1 curvature identity alone.
    pub eq1_residual: f64,
    pub tolerance: f64,
}

impl ClassificationReport {
    fn from_residuals(k: f64, nk: f64, qk: f64, eq1: f64, eq2: f64, tol: f64) -> Self {
        ClassificationReport {
            kahler: ClassResult::new(k, tol),
            nearly_kahler: ClassResult::new(nk, tol),
            quasi_kahler: ClassResult::new(qk, tol),
            qk2: ClassResult::new(qk.max(eq1), tol),
            ah3: ClassResult::new(eq2, tol),
            eq1_residual: eq1,
            tolerance: tol,
        }
    }

    /// Worst case over both reports.
    pub fn merge(&self, other: &ClassificationReport) -> ClassificationReport {
        ClassificationReport::from_residuals(
            self.kahler.residual.max(other.kahler.residual),
            self.nearly_kahler
                .residual
                .max(other.nearly_kahler.residual),
            self.quasi_kahler.residual.max(other.quasi_kahler.residual),
            self.eq1_residual.max(other.eq1_residual),
            self.ah3.residual.max(other.ah3.residual),
            self.tolerance,
        )
    }

    pub fn entries(&self) -> [(&'static str, &ClassResult); 5] {
        [
            ("kahler", &self.kahler),
            ("nearly_kahler", &self.nearly_kahler),
            ("quasi_kahler", &self.quasi_kahler),
            ("qk2", &self.qk2),
            ("ah3", &self.ah3),
        ]
    }
}

/// Relative residual of `R(x,y,z,u) = R(x,y,Jz,Ju) + R(x,Jy,z,Ju) + R(Jx,y,z,Ju)`.
pub fn eq1_residual(pg: &PointGeometry, h: &HermitianData, v: [&[f64]; 4]) -> f64 {
    let [x, y, z, u] = v;
    let (jx, jy, jz, ju) = (h.apply_j(x), h.apply_j(y), h.apply_j(z), h.apply_j(u));
    let lhs = pg.r(x, y, z, u);
    let rhs = pg.r(x, y, &jz, &ju) + pg.r(x, &jy, z, &ju) + pg.r(&jx, y, z, &ju);
    rel_residual(lhs, rhs)
}

/// Relative residual of `R(x,y,z,u) = R(Jx,Jy,Jz,Ju)`.
pub fn eq2_residual(pg: &PointGeometry, h: &HermitianData, v: [&[f64]; 4]) -> f64 {
    let [x, y, z, u] = v;
    let lhs = pg.r(x, y, z, u);
    let rhs = pg.r(&h.apply_j(x), &h.apply_j(y), &h.apply_j(z), &h.apply_j(u));
    rel_residual(lhs, rhs)
}

/// Class residuals at one point from `samples` random tuples plus the
/// orthonormal coordinate frame.
pub fn classify_point(
    pg: &PointGeometry,
    h: &HermitianData,
    samples: usize,
    rng: &mut SeededRng,
    tol: f64,
) -> ClassificationReport {
    let d = pg.dim;
    let g = &pg.g;
    let zero = vec![0.0; d];
    let frame = pg.coordinate_frame();
    let (mut k, mut nk, mut qk, mut e1, mut e2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);

    let mut pair = |x: &[f64], y: &[f64]| {
        let nxy = h.nabla_j_apply(x, y);
        k = k.max(geometry::rel_residual_vec(g, &nxy, &zero));
        let nxx = h.nabla_j_apply(x, x);
        nk = nk.max(geometry::rel_residual_vec(g, &nxx, &zero));
        let lhs = h.nabla_j_apply(&h.apply_j(x), y);
        let rhs: Vec<f64> = h.apply_j(&nxy).iter().map(|v| -v).collect();
        qk = qk.max(geometry::rel_residual_vec(g, &lhs, &rhs));
    };
    for x in &frame {
        for y in &frame {
            pair(x, y);
        }
    }
    let mut randoms = Vec::with_capacity(samples);
    for _ in 0..samples {
        let v: [Vec<f64>; 4] = std::array::from_fn(|_| random_unit_vector(g, rng));
        pair(&v[0], &v[1]);
        randoms.push(v);
    }
    for v in &randoms {
        let refs = [&v[0][..], &v[1][..], &v[2][..], &v[3][..]];
        e1 = e1.max(eq1_residual(pg, h, refs));
        e2 = e2.max(eq2_residual(pg, h, refs));
    }
    for _ in 0..samples {
        let idx: [usize; 4] = std::array::from_fn(|_| rng.random_range(0..d));
        let refs = [
            &frame[idx[0]][..],
            &frame[idx[1]][..],
            &frame[idx[2]][..],
            &frame[idx[3]][..],
        ];
        e1 = e1.max(eq1_residual(pg, h, refs));
        e2 = e2.max(eq2_residual(pg, h, refs));
    }
    ClassificationReport::from_residuals(k, nk, qk, e1, e2, tol)
}

/// Classification at a single point.
pub fn classify(
    spec: &ManifoldSpec,
    p: &[f64],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ClassificationReport> {
    let pg = PointGeometry::compute(spec, p)?;
    let h = HermitianData::compute(spec, &pg)?;
    Ok(classify_point(&pg, &h, samples, &mut rng_for(seed, 1), tol))
}
