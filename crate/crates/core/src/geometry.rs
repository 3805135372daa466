//! Riemannian pipeline at a chart point.
//!
//! Conventions:
//! - `R(x,y)z = ∇_x∇_y z − ∇_y∇_x z − ∇_[x,y] z` and `R(x,y,z,u) = g(R(x,y)z, u)`,
//!   so the unit sphere has `K = R(x,y,y,x) = +1` and a space of constant
//!   curvature `c` has `R = c·R₁`.
//! - `S(x,y) = Σ_i R(x,e_i,e_i,y)`, `τ = tr S`.
//! - Index layouts are row-major: `gamma[k][i][j] = Γᵏ_ij`,
//!   `riemann[a][b][c][d] = R(∂a,∂b,∂c,∂d)`, `nabla_r[m][a][b][c][d] = (∇_m R)_abcd`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{CurvError, Result};
use crate::exprlang::Expr;
use crate::jets::Jet;
use crate::sampling::{self, rng_for, SeededRng};

/// Native component generator: coordinate jets in, row-major `dim × dim` jets out.
pub type FieldFn = dyn Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync;

/// A `dim × dim` matrix of scalar chart functions.
#[derive(Clone)]
pub enum TensorField {
    Expressions(Vec<Vec<Expr>>),
    Native(Arc<FieldFn>),
}

impl fmt::Debug for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorField::Expressions(rows) => f.debug_tuple("Expressions").field(rows).finish(),
            TensorField::Native(_) => f.write_str("Native(..)"),
        }
    }
}

impl TensorField {
    /// Row-major components at the seed point of `coords`.
    pub fn evaluate(&self, coords: &[Jet]) -> Result<Vec<Jet>> {
        match self {
            TensorField::Expressions(rows) => rows
                .iter()
                .flat_map(|row| row.iter())
                .map(|e| e.evaluate(coords))
                .collect(),
            TensorField::Native(f) => {
                let out = f(coords)?;
                if out.len() != coords.len() * coords.len() {
                    return Err(CurvError::Dimension(format!(
                        "native field returned {} components for dim {}",
                        out.len(),
                        coords.len()
                    )));
                }
                Ok(out)
            }
        }
    }

    /// Plain values at `p`.
    pub fn values(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let d = p.len();
        let jets = self.evaluate(&Jet::seed(p, 0)?)?;
        Ok(DMatrix::from_iterator(d, d, jets.iter().map(|j| j.value())).transpose())
    }

    fn check_shape(&self, dim: usize, what: &str) -> Result<()> {
        if let TensorField::Expressions(rows) = self {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(CurvError::Dimension(format!("{what} must be {dim}×{dim}")));
            }
            if let Some(a) = rows.iter().flatten().map(Expr::arity).max() {
                if a > dim {
                    return Err(CurvError::Dimension(format!(
                        "{what} references x{a} in dimension {dim}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Box used for uniform point sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub center: Vec<f64>,
    pub half_width: Vec<f64>,
}

/// A chart of an (almost Hermitian) manifold.
#[derive(Debug, Clone)]
pub struct ManifoldSpec {
    pub name: String,
    pub dim: usize,
    pub metric: TensorField,
    /// `Jⁱ_j` at row `i`, column `j`.
    pub complex_structure: Option<TensorField>,
    /// Chart is valid where this is positive.
    pub domain: Expr,
    pub sample_box: SampleBox,
    /// Construction parameters echoed into reports.
    pub parameters: BTreeMap<String, f64>,
}

/// Invariant residuals of a spec at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecValidation {
    pub symmetry_residual: f64,
    pub positive_definite: bool,
    /// Max entry of `J² + Id`.
    pub j_square_residual: Option<f64>,
    /// Max entry of `Jᵀ g J − g`, relative to `1 + max|g|`.
    pub compatibility_residual: Option<f64>,
}

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-9;

impl SpecValidation {
    pub fn riemannian_ok(&self) -> bool {
        self.symmetry_residual <= SYMMETRY_TOL && self.positive_definite
    }

    /// Hermitian compatibility; `None` when there is no `J`.
    pub fn hermitian_residual(&self) -> Option<f64> {
        Some(self.j_square_residual?.max(self.compatibility_residual?))
    }
}

impl ManifoldSpec {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        metric: TensorField,
        complex_structure: Option<TensorField>,
        domain: Expr,
        sample_box: SampleBox,
    ) -> Result<ManifoldSpec> {
        if dim < 2 || !dim.is_multiple_of(2) {
            return Err(CurvError::Dimension(format!(
                "chart dimension must be even and at least 2, got {dim}"
            )));
        }
        metric.check_shape(dim, "metric")?;
        if let Some(j) = &complex_structure {
            j.check_shape(dim, "complex_structure")?;
        }
        if domain.arity() > dim {
            return Err(CurvError::Dimension(format!(
                "domain references x{} in dimension {dim}",
                domain.arity()
            )));
        }
        if sample_box.center.len() != dim || sample_box.half_width.len() != dim {
            return Err(CurvError::Dimension(format!(
                "sample_box vectors must have length {dim}"
            )));
        }
        if sample_box
            .half_width
            .iter()
            .any(|h| !(h.is_finite() && *h >= 0.0))
        {
            return Err(CurvError::Precondition(
                "sample_box half widths must be finite and non-negative".into(),
            ));
        }
        Ok(ManifoldSpec {
            name: name.into(),
            dim,
            metric,
            complex_structure,
            domain,
            sample_box,
            parameters: BTreeMap::new(),
        })
    }

    pub fn with_parameter(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    /// Half the real dimension.
    pub fn n(&self) -> usize {
        self.dim / 2
    }

    pub fn is_hermitian(&self) -> bool {
        self.complex_structure.is_some()
    }

    pub fn domain_value(&self, p: &[f64]) -> Result<f64> {
        self.domain.eval_f64(p)
    }

    pub fn check_in_domain(&self, p: &[f64]) -> Result<()> {
        let v = self.domain_value(p)?;
        if v > 0.0 {
            Ok(())
        } else {
            Err(CurvError::OutsideDomain {
                point: p.to_vec(),
                value: v,
            })
        }
    }

    /// `count` points uniform in the sample box, rejected by the domain predicate.
    pub fn sample_points(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        const MAX_TRIES: usize = 10_000;
        let mut rng = rng_for(seed, 0);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut found = None;
            for _ in 0..MAX_TRIES {
                let p = sampling::uniform_in_box(
                    &self.sample_box.center,
                    &self.sample_box.half_width,
                    &mut rng,
                );
                if matches!(self.domain_value(&p), Ok(v) if v > 0.0) {
                    found = Some(p);
                    break;
                }
            }
            out.push(found.ok_or_else(|| {
                CurvError::Sampling(format!(
                    "no point of the sample box satisfied the domain of `{}` after {MAX_TRIES} draws",
                    self.name
                ))
            })?);
        }
        Ok(out)
    }

    pub fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.metric.values(p)
    }

    pub fn j_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.complex_structure
            .as_ref()
            .ok_or_else(|| CurvError::NotAlmostHermitian(self.name.clone()))?
            .values(p)
    }

    /// Measures symmetry, positivity and Hermitian compatibility at `p`.
    pub fn validate_at(&self, p: &[f64]) -> Result<SpecValidation> {
        let g = self.metric_at(p)?;
        let symmetry_residual = (&g - g.transpose()).amax();
        let sym = (&g + g.transpose()) * 0.5;
        let positive_definite = sym.clone().cholesky().is_some();
        let (j_square_residual, compatibility_residual) = match &self.complex_structure {
            None => (None, None),
            Some(_) => {
                let j = self.j_at(p)?;
                let d = self.dim;
                let jj = &j * &j + DMatrix::<f64>::identity(d, d);
                let compat = j.transpose() * &sym * &j - &sym;
                (Some(jj.amax()), Some(compat.amax() / (1.0 + sym.amax())))
            }
        };
        Ok(SpecValidation {
            symmetry_residual,
            positive_definite,
            j_square_residual,
            compatibility_residual,
        })
    }
}

/// `|lhs − rhs| / (1 + |lhs| + |rhs|)`.
pub fn rel_residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / (1.0 + lhs.abs() + rhs.abs())
}

/// Vector version of [`rel_residual`] with norms taken in `g`.
pub fn rel_residual_vec(g: &DMatrix<f64>, lhs: &[f64], rhs: &[f64]) -> f64 {
    let diff: Vec<f64> = lhs.iter().zip(rhs).map(|(a, b)| a - b).collect();
    sampling::norm(g, &diff) / (1.0 + sampling::norm(g, lhs) + sampling::norm(g, rhs))
}

/// Modified Gram–Schmidt in the `g` inner product. Vectors whose remaining
/// norm drops below `1e-8` are skipped.
pub fn gram_schmidt(g: &DMatrix<f64>, vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for e in &out {
            let c = sampling::inner(g, e, &w);
            for (wi, ei) in w.iter_mut().zip(e) {
                *wi -= c * ei;
            }
        }
        let n = sampling::norm(g, &w);
        if n > 1e-8 {
            out.push(w.iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Orthonormalized coordinate frame at a point.
pub fn coordinate_frame(g: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let d = g.nrows();
    let basis: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    gram_schmidt(g, &basis)
}

/// Random `g`-orthonormal frame.
pub fn random_frame(g: &DMatrix<f64>, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    let d = g.nrows();
    loop {
        let draws: Vec<Vec<f64>> = (0..d).map(|_| sampling::gaussian_vector(d, rng)).collect();
        let frame = gram_schmidt(g, &draws);
        if frame.len() == d {
            return frame;
        }
    }
}

/// Row-major flat index into a `d^k` cube.
#[inline]
pub(crate) fn ix(d: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * d + i)
}

/// Every quantity of the Levi-Civita pipeline at one point.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub point: Vec<f64>,
    pub dim: usize,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `g_ij` as order-1 jets.
    pub metric: Vec<Jet>,
    /// `g^ij` as order-1 jets.
    pub metric_inv: Vec<Jet>,
    /// `Γᵏ_ij`, order 2.
    pub gamma: Vec<Jet>,
    /// `R_abcd`, order 1.
    pub riemann: Vec<Jet>,
    /// `S_ab`, order 1.
    pub ricci: Vec<Jet>,
    /// `τ`, order 1.
    pub tau: Jet,
    pub nabla_r: Vec<f64>,
    pub nabla_s: Vec<f64>,
    gamma_vals: Vec<f64>,
    riemann_vals: Vec<f64>,
    ricci_vals: Vec<f64>,
}

fn jet_matmul(a: &[Jet], b: &[Jet], d: usize) -> Vec<Jet> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = a[0].zero_like();
            for k in 0..d {
                acc.fma_assign(&a[i * d + k], &b[k * d + j]);
            }
            out.push(acc);
        }
    }
    out
}

fn const_matmul(c: &DMatrix<f64>, b: &[Jet], d: usize) -> Vec<Jet> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = b[0].zero_like();
            for k in 0..d {
                acc.axpy_assign(c[(i, k)], &b[k * d + j]);
            }
            out.push(acc);
        }
    }
    out
}

/// Inverse of a jet-valued matrix through the Neumann series around its value.
fn jet_inverse(m: &[Jet], inv0: &DMatrix<f64>, d: usize) -> Vec<Jet> {
    let order = m[0].order();
    let tail: Vec<Jet> = m.iter().map(|x| x.add_scalar(-x.value())).collect();
    let step = const_matmul(inv0, &tail, d);
    let inv0_jets: Vec<Jet> = (0..d * d)
        .map(|k| m[0].constant_like(inv0[(k / d, k % d)]))
        .collect();
    let mut total = inv0_jets.clone();
    let mut term = inv0_jets;
    for _ in 0..order {
        term = jet_matmul(&step, &term, d).iter().map(|x| -x).collect();
        for (t, x) in total.iter_mut().zip(&term) {
            t.axpy_assign(1.0, x);
        }
    }
    total
}

/// Covariant derivative of a (0,2) jet-valued form: `[m][a][b] = (∇_m T)_ab`.
pub(crate) fn covariant_derivative_2(form: &[Jet], gamma: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d * d];
    for m in 0..d {
        for a in 0..d {
            for b in 0..d {
                let mut v = form[a * d + b].gradient()[m];
                for e in 0..d {
                    v -= gamma[ix(d, &[e, m, a])] * form[e * d + b].value()
                        + gamma[ix(d, &[e, m, b])] * form[a * d + e].value();
                }
                out[ix(d, &[m, a, b])] = v;
            }
        }
    }
    out
}

impl PointGeometry {
    /// Runs the full pipeline at `p`.
    pub fn compute(spec: &ManifoldSpec, p: &[f64]) -> Result<PointGeometry> {
        let d = spec.dim;
        if p.len() != d {
            return Err(CurvError::Dimension(format!(
                "point has {} coordinates, chart dimension is {d}",
                p.len()
            )));
        }
        spec.check_in_domain(p)?;

        let seeds = Jet::seed(p, 3)?;
        let raw = spec.metric.evaluate(&seeds)?;
        if raw.iter().any(|j| !j.is_finite()) {
            return Err(CurvError::DegenerateMetric {
                point: p.to_vec(),
                detail: "non-finite metric component".into(),
            });
        }
        // mirror the upper triangle
        let g3: Vec<Jet> = (0..d * d)
            .map(|k| {
                let (i, j) = (k / d, k % d);
                raw[i.min(j) * d + i.max(j)].clone()
            })
            .collect();
        let g = DMatrix::from_fn(d, d, |i, j| g3[i * d + j].value());
        let chol = g
            .clone()
            .cholesky()
            .ok_or_else(|| CurvError::DegenerateMetric {
                point: p.to_vec(),
                detail: "metric is not positive definite (Cholesky failed)".into(),
            })?;
        let g_inv = chol.inverse();

        let g2: Vec<Jet> = g3.iter().map(|x| x.truncate(2)).collect();
        let ginv2 = jet_inverse(&g2, &g_inv, d);

        // ∂_l g_ij at order 2
        let mut dg = Vec::with_capacity(d * d * d);
        for l in 0..d {
            for x in &g3 {
                dg.push(x.partial(l)?);
            }
        }
        let dg_at = |l: usize, i: usize, j: usize| &dg[ix(d, &[l, i, j])];

        // first kind Γ_{l,ij}
        let mut first = Vec::with_capacity(d * d * d);
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let s = &(dg_at(i, j, l) + dg_at(j, i, l)) - dg_at(l, i, j);
                    first.push(s.scale(0.5));
                }
            }
        }
        let mut gamma = Vec::with_capacity(d * d * d);
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = first[0].zero_like();
                    for l in 0..d {
                        acc.fma_assign(&ginv2[k * d + l], &first[ix(d, &[l, i, j])]);
                    }
                    gamma.push(acc);
                }
            }
        }
        let gamma_vals: Vec<f64> = gamma.iter().map(Jet::value).collect();

        // ∂_a Γ^l_bc and Γ at order 1
        let mut dgamma = Vec::with_capacity(d.pow(4));
        for a in 0..d {
            for x in &gamma {
                dgamma.push(x.partial(a)?);
            }
        }
        let gamma1: Vec<Jet> = gamma.iter().map(|x| x.truncate(1)).collect();
        let g1: Vec<Jet> = g3.iter().map(|x| x.truncate(1)).collect();
        let ginv1: Vec<Jet> = ginv2.iter().map(|x| x.truncate(1)).collect();

        // R(∂a,∂b)∂c = Rup[l][a][b][c] ∂l, antisymmetric in (a,b)
        let zero1 = g1[0].zero_like();
        let mut rup = vec![zero1.clone(); d.pow(4)];
        for l in 0..d {
            for a in 0..d {
                for b in (a + 1)..d {
                    for c in 0..d {
                        let mut v = &dgamma[ix(d, &[a, l, b, c])] - &dgamma[ix(d, &[b, l, a, c])];
                        for m in 0..d {
                            v.fma_assign(&gamma1[ix(d, &[l, a, m])], &gamma1[ix(d, &[m, b, c])]);
                            let t = &gamma1[ix(d, &[l, b, m])] * &gamma1[ix(d, &[m, a, c])];
                            v.axpy_assign(-1.0, &t);
                        }
                        rup[ix(d, &[l, b, a, c])] = -&v;
                        rup[ix(d, &[l, a, b, c])] = v;
                    }
                }
            }
        }
        let mut riemann = vec![zero1.clone(); d.pow(4)];
        for a in 0..d {
            for b in (a + 1)..d {
                for c in 0..d {
                    for e in 0..d {
                        let mut acc = zero1.clone();
                        for l in 0..d {
                            acc.fma_assign(&g1[l * d + e], &rup[ix(d, &[l, a, b, c])]);
                        }
                        riemann[ix(d, &[b, a, c, e])] = -&acc;
                        riemann[ix(d, &[a, b, c, e])] = acc;
                    }
                }
            }
        }

        // S_ad = g^{bc} R_abcd
        let mut ricci = Vec::with_capacity(d * d);
        for a in 0..d {
            for e in 0..d {
                let mut acc = zero1.clone();
                for b in 0..d {
                    for c in 0..d {
                        acc.fma_assign(&ginv1[b * d + c], &riemann[ix(d, &[a, b, c, e])]);
                    }
                }
                ricci.push(acc);
            }
        }
        let mut tau = zero1.clone();
        for (gi, s) in ginv1.iter().zip(&ricci) {
            tau.fma_assign(gi, s);
        }

        let riemann_vals: Vec<f64> = riemann.iter().map(Jet::value).collect();
        let ricci_vals: Vec<f64> = ricci.iter().map(Jet::value).collect();

        let mut nabla_r = vec![0.0; d.pow(5)];
        for m in 0..d {
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        for e in 0..d {
                            let mut v = riemann[ix(d, &[a, b, c, e])].gradient()[m];
                            for f in 0..d {
                                v -= gamma_vals[ix(d, &[f, m, a])]
                                    * riemann_vals[ix(d, &[f, b, c, e])]
                                    + gamma_vals[ix(d, &[f, m, b])]
                                        * riemann_vals[ix(d, &[a, f, c, e])]
                                    + gamma_vals[ix(d, &[f, m, c])]
                                        * riemann_vals[ix(d, &[a, b, f, e])]
                                    + gamma_vals[ix(d, &[f, m, e])]
                                        * riemann_vals[ix(d, &[a, b, c, f])];
                            }
                            nabla_r[ix(d, &[m, a, b, c, e])] = v;
                        }
                    }
                }
            }
        }
        let nabla_s = covariant_derivative_2(&ricci, &gamma_vals, d);

        Ok(PointGeometry {
            point: p.to_vec(),
            dim: d,
            g,
            g_inv,
            metric: g1,
            metric_inv: ginv1,
            gamma,
            riemann,
            ricci,
            tau,
            nabla_r,
            nabla_s,
            gamma_vals,
            riemann_vals,
            ricci_vals,
        })
    }

    pub fn gamma_values(&self) -> &[f64] {
        &self.gamma_vals
    }

    pub fn riemann_values(&self) -> &[f64] {
        &self.riemann_vals
    }

    pub fn ricci_values(&self) -> &[f64] {
        &self.ricci_vals
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        sampling::inner(&self.g, x, y)
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        sampling::norm(&self.g, x)
    }

    /// `R(x,y,z,u)`.
    pub fn r(&self, x: &[f64], y: &[f64], z: &[f64], u: &[f64]) -> f64 {
        contract(&self.riemann_vals, self.dim, &[x, y, z, u])
    }

    /// `S(x,y)`.
    pub fn s(&self, x: &[f64], y: &[f64]) -> f64 {
        contract(&self.ricci_vals, self.dim, &[x, y])
    }

    /// `(∇_w R)(x,y,z,u)`.
    pub fn nabla_r(&self, w: &[f64], x: &[f64], y: &[f64], z: &[f64], u: &[f64]) -> f64 {
        contract(&self.nabla_r, self.dim, &[w, x, y, z, u])
    }

    /// `(∇_x S)(y,z)`.
    pub fn nabla_s(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        contract(&self.nabla_s, self.dim, &[x, y, z])
    }

    /// `x(τ)` from the order-1 jet of `τ`.
    pub fn x_tau(&self, x: &[f64]) -> f64 {
        self.tau.directional(x).expect("tau carries first order")
    }

    pub fn coordinate_frame(&self) -> Vec<Vec<f64>> {
        coordinate_frame(&self.g)
    }

    /// Raises the first slot: `g^{-1}` applied to a covector.
    pub fn raise(&self, covector: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.g_inv[(i, j)] * covector[j]).sum())
            .collect()
    }
}

/// Full contraction of a row-major `d^k` tensor with `k` vectors.
pub(crate) fn contract(t: &[f64], d: usize, vs: &[&[f64]]) -> f64 {
    let mut cur: Vec<f64> = t.to_vec();
    for v in vs.iter().rev() {
        let rows = cur.len() / d;
        let mut next = vec![0.0; rows];
        for (r, out) in next.iter_mut().enumerate() {
            let base = r * d;
            *out = (0..d).map(|i| cur[base + i] * v[i]).sum();
        }
        cur = next;
    }
    cur[0]
}

/// Standalone Christoffel symbols `Γᵏ_ij` (order-2 jets).
pub fn christoffel(spec: &ManifoldSpec, p: &[f64]) -> Result<Vec<Jet>> {
    Ok(PointGeometry::compute(spec, p)?.gamma)
}

/// Lowered curvature `R_abcd` (order-1 jets).
pub fn riemann(spec: &ManifoldSpec, p: &[f64]) -> Result<Vec<Jet>> {
    Ok(PointGeometry::compute(spec, p)?.riemann)
}

/// Ricci tensor and scalar curvature (order-1 jets).
pub fn ricci_scalar(spec: &ManifoldSpec, p: &[f64]) -> Result<(Vec<Jet>, Jet)> {
    let pg = PointGeometry::compute(spec, p)?;
    Ok((pg.ricci, pg.tau))
}

pub fn covariant_deriv_r(spec: &ManifoldSpec, p: &[f64]) -> Result<Vec<f64>> {
    Ok(PointGeometry::compute(spec, p)?.nabla_r)
}

pub fn covariant_deriv_s(spec: &ManifoldSpec, p: &[f64]) -> Result<Vec<f64>> {
    Ok(PointGeometry::compute(spec, p)?.nabla_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::parse;

    fn expr_field(rows: &[&[&str]], dim: usize) -> TensorField {
        TensorField::Expressions(
            rows.iter()
                .map(|r| r.iter().map(|s| parse(s, dim).unwrap()).collect())
                .collect(),
        )
    }

    fn two_sphere() -> ManifoldSpec {
        ManifoldSpec::new(
            "S2",
            2,
            expr_field(&[&["1", "0"], &["0", "sin(x1)^2"]], 2),
            None,
            parse("sin(x1)", 2).unwrap(),
            SampleBox {
                center: vec![1.5, 0.0],
                half_width: vec![1.0, 3.0],
            },
        )
        .unwrap()
    }

    fn flat(dim: usize) -> ManifoldSpec {
        let rows: Vec<Vec<Expr>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| Expr::Const(if i == j { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect();
        ManifoldSpec::new(
            "flat",
            dim,
            TensorField::Expressions(rows),
            None,
            Expr::Const(1.0),
            SampleBox {
                center: vec![0.0; dim],
                half_width: vec![1.0; dim],
            },
        )
        .unwrap()
    }

    #[test]
    fn flat_christoffel_vanish() {
        let gamma = christoffel(&flat(4), &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(gamma.iter().all(|x| x.max_abs() == 0.0));
        let pg = PointGeometry::compute(&flat(4), &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(pg.riemann_values().iter().all(|&x| x == 0.0));
        assert!(pg.nabla_r.iter().all(|&x| x == 0.0));
        assert!(pg.nabla_s.iter().all(|&x| x == 0.0));
        assert_eq!(pg.tau.value(), 0.0);
    }

    #[test]
    fn two_sphere_christoffel_closed_form() {
        let t = 0.9_f64;
        let gamma = christoffel(&two_sphere(), &[t, 0.4]).unwrap();
        let d = 2;
        // Γ¹₂₂ = −sin cos, Γ²₁₂ = Γ²₂₁ = cot
        assert!((gamma[ix(d, &[0, 1, 1])].value() + t.sin() * t.cos()).abs() < 1e-14);
        assert!((gamma[ix(d, &[1, 0, 1])].value() - t.cos() / t.sin()).abs() < 1e-14);
        assert!((gamma[ix(d, &[1, 1, 0])].value() - t.cos() / t.sin()).abs() < 1e-14);
        assert!(gamma[ix(d, &[0, 0, 0])].value().abs() < 1e-15);
    }

    #[test]
    fn two_sphere_has_unit_curvature() {
        let spec = two_sphere();
        for p in spec.sample_points(8, 3).unwrap() {
            let pg = PointGeometry::compute(&spec, &p).unwrap();
            let frame = pg.coordinate_frame();
            let k = pg.r(&frame[0], &frame[1], &frame[1], &frame[0]);
            assert!((k - 1.0).abs() < 1e-12, "K = {k}");
            assert!((pg.tau.value() - 2.0).abs() < 1e-12);
            // R = R₁
            let x = [0.3, -1.1];
            let y = [0.7, 0.2];
            let r1 = pg.inner(&y, &y) * pg.inner(&x, &x) - pg.inner(&x, &y).powi(2);
            assert!(rel_residual(pg.r(&x, &y, &y, &x), r1) < 1e-12);
        }
    }

    #[test]
    fn degenerate_metric_is_reported() {
        let spec = ManifoldSpec::new(
            "bad",
            2,
            expr_field(&[&["1", "1"], &["1", "1"]], 2),
            None,
            Expr::Const(1.0),
            SampleBox {
                center: vec![0.0; 2],
                half_width: vec![1.0; 2],
            },
        )
        .unwrap();
        assert!(matches!(
            PointGeometry::compute(&spec, &[0.0, 0.0]),
            Err(CurvError::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn outside_domain_is_reported() {
        assert!(matches!(
            PointGeometry::compute(&two_sphere(), &[-0.5, 0.0]),
            Err(CurvError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn odd_dimension_rejected() {
        let err = ManifoldSpec::new(
            "odd",
            3,
            TensorField::Expressions(vec![vec![Expr::Const(1.0); 3]; 3]),
            None,
            Expr::Const(1.0),
            SampleBox {
                center: vec![0.0; 3],
                half_width: vec![1.0; 3],
            },
        )
        .unwrap_err();
        assert!(matches!(err, CurvError::Dimension(_)));
    }

    #[test]
    fn contraction_matches_naive_sum() {
        let d = 3;
        let t: Vec<f64> = (0..27).map(|i| i as f64 * 0.5 - 3.0).collect();
        let (x, y, z) = ([1.0, 2.0, -1.0], [0.5, 0.0, 1.0], [2.0, -1.0, 0.25]);
        let mut naive = 0.0;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    naive += t[ix(d, &[a, b, c])] * x[a] * y[b] * z[c];
                }
            }
        }
        assert!((contract(&t, d, &[&x, &y, &z]) - naive).abs() < 1e-12);
    }

    #[test]
    fn gram_schmidt_orthonormalizes() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 1.5]);
        let f = coordinate_frame(&g);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((sampling::inner(&g, &f[i], &f[j]) - want).abs() < 1e-14);
            }
        }
    }
}
