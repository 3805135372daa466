//! Built-in charts: flat `ℂⁿ`, Fubini–Study `ℂPⁿ`, complex hyperbolic `ℂDⁿ`,
//! the nearly-Kähler round `S⁶`, and a Riemannian polynomial perturbation of
//! flat space used as a non-Einstein fixture.
//!
//! Real coordinates are ordered `(Re z₁, Im z₁, Re z₂, Im z₂, …)` and the
//! standard complex structure is `J∂_{Re z} = ∂_{Im z}`.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;

use crate::error::{CurvError, Result};
use crate::exprlang::{parse, Expr};
use crate::geometry::{ManifoldSpec, SampleBox, TensorField};
use crate::jets::Jet;
use crate::sampling::rng_for;

/// Structure constants of the cross product on the imaginary octonions.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossProductTable {
    f: [[[f64; 7]; 7]; 7],
}

/// Fano-plane triples `(i, j, k)` with `e_i e_j = e_k`, one-based.
pub const FANO_TRIPLES: [(usize, usize, usize); 7] = [
    (1, 2, 3),
    (1, 4, 5),
    (2, 4, 6),
    (3, 4, 7),
    (2, 5, 7),
    (1, 7, 6),
    (3, 6, 5),
];

impl Default for CrossProductTable {
    fn default() -> Self {
        Self::new()
    }
}

impl CrossProductTable {
    pub fn new() -> CrossProductTable {
        let mut f = [[[0.0; 7]; 7]; 7];
        for &(i, j, k) in &FANO_TRIPLES {
            let (i, j, k) = (i - 1, j - 1, k - 1);
            for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                f[a][b][c] = 1.0;
                f[b][a][c] = -1.0;
            }
        }
        CrossProductTable { f }
    }

    /// `f_ijk`, zero-based.
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> f64 {
        self.f[i][j][k]
    }

    pub fn cross(&self, a: &[f64; 7], b: &[f64; 7]) -> [f64; 7] {
        let mut out = [0.0; 7];
        for i in 0..7 {
            for j in 0..7 {
                let ab = a[i] * b[j];
                if ab == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += self.f[i][j][k] * ab;
                }
            }
        }
        out
    }

    /// Cross product of jet-valued vectors.
    pub fn cross_jets(&self, a: &[Jet], b: &[Jet]) -> Vec<Jet> {
        let mut out = vec![a[0].zero_like(); 7];
        for i in 0..7 {
            for j in 0..7 {
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.f[i][j][k];
                    if c != 0.0 {
                        let t = &a[i] * &b[j];
                        o.axpy_assign(c, &t);
                    }
                }
            }
        }
        out
    }
}

fn standard_j(dim: usize) -> TensorField {
    let rows = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let v = if i % 2 == 1 && j == i - 1 {
                        1.0
                    } else if i % 2 == 0 && j == i + 1 {
                        -1.0
                    } else {
                        0.0
                    };
                    Expr::Const(v)
                })
                .collect()
        })
        .collect();
    TensorField::Expressions(rows)
}

fn parse_rows(rows: &[Vec<String>], dim: usize) -> Result<TensorField> {
    Ok(TensorField::Expressions(
        rows.iter()
            .map(|r| r.iter().map(|s| parse(s, dim)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?,
    ))
}

fn centered_box(dim: usize, half_width: f64) -> SampleBox {
    SampleBox {
        center: vec![0.0; dim],
        half_width: vec![half_width; dim],
    }
}

/// Flat `ℂⁿ` with the identity metric and constant `J`.
pub fn make_flat(n: usize) -> Result<ManifoldSpec> {
    if n < 1 {
        return Err(CurvError::Dimension("flat model needs n >= 1".into()));
    }
    let dim = 2 * n;
    let rows = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| Expr::Const(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    Ok(ManifoldSpec::new(
        format!("flat C^{n}"),
        dim,
        TensorField::Expressions(rows),
        Some(standard_j(dim)),
        Expr::Const(1.0),
        centered_box(dim, 1.0),
    )?
    .with_parameter("n", n as f64))
}

/// Real components of the Hermitian metric `h_{ab̄} = scale · ∂_a∂_b̄ Φ` for
/// `Φ = ±log(1 ± |z|²)`. `sign = +1` gives Fubini–Study, `-1` the ball.
fn kahler_potential_hessian(n: usize, scale: f64, sign: f64) -> Vec<Vec<String>> {
    let dim = 2 * n;
    let re = |a: usize| format!("x{}", 2 * a + 1);
    let im = |a: usize| format!("x{}", 2 * a + 2);
    let mut r2 = String::new();
    for k in 1..=dim {
        if k > 1 {
            r2.push_str(" + ");
        }
        write!(r2, "x{k}^2").unwrap();
    }
    let op = if sign > 0.0 { "+" } else { "-" };
    let w = format!("(1 {op} ({r2}))");
    // ∂_a∂_b̄ Φ = [w δ_ab ∓ z̄_a z_b] / w²,  z̄_a z_b = (x_a x_b + y_a y_b) + i(x_a y_b − y_a x_b)
    let real_part = |a: usize, b: usize| {
        let zz = format!("({}*{} + {}*{})", re(a), re(b), im(a), im(b));
        if a == b {
            format!(
                "{scale}*({w} {} {zz})/{w}^2",
                if sign > 0.0 { "-" } else { "+" }
            )
        } else {
            format!("{}{scale}*{zz}/{w}^2", if sign > 0.0 { "-" } else { "" })
        }
    };
    let imag_part = |a: usize, b: usize| {
        if a == b {
            "0".to_string()
        } else {
            let cross = format!("({}*{} - {}*{})", re(a), im(b), im(a), re(b));
            format!("{}{scale}*{cross}/{w}^2", if sign > 0.0 { "-" } else { "" })
        }
    };
    let mut rows = vec![vec![String::new(); dim]; dim];
    for a in 0..n {
        for b in 0..n {
            let (ra, ia, rb, ib) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
            // g(∂x_a,∂x_b) = g(∂y_a,∂y_b) = Re h, g(∂x_a,∂y_b) = Im h, g(∂y_a,∂x_b) = −Im h
            rows[ra][rb] = real_part(a, b);
            rows[ia][ib] = real_part(a, b);
            rows[ra][ib] = imag_part(a, b);
            rows[ia][rb] = if a == b {
                "0".to_string()
            } else {
                format!("-({})", imag_part(a, b))
            };
        }
    }
    rows
}

/// Fubini–Study `ℂPⁿ` of holomorphic sectional curvature `c > 0` in an
/// inhomogeneous chart.
pub fn make_cpn(n: usize, c: f64) -> Result<ManifoldSpec> {
    if n < 1 {
        return Err(CurvError::Dimension("CP^n needs n >= 1".into()));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(CurvError::Precondition(format!(
            "CP^n needs holomorphic curvature c > 0, got {c}"
        )));
    }
    let dim = 2 * n;
    let rows = kahler_potential_hessian(n, 4.0 / c, 1.0);
    Ok(ManifoldSpec::new(
        format!("CP^{n}"),
        dim,
        parse_rows(&rows, dim)?,
        Some(standard_j(dim)),
        Expr::Const(1.0),
        centered_box(dim, 1.0),
    )?
    .with_parameter("n", n as f64)
    .with_parameter("c", c))
}

/// Complex hyperbolic space `ℂDⁿ` of holomorphic sectional curvature `c < 0`
/// on the unit ball.
pub fn make_cdn(n: usize, c: f64) -> Result<ManifoldSpec> {
    if n < 1 {
        return Err(CurvError::Dimension("CD^n needs n >= 1".into()));
    }
    if !(c < 0.0 && c.is_finite()) {
        return Err(CurvError::Precondition(format!(
            "CD^n needs holomorphic curvature c < 0, got {c}"
        )));
    }
    let dim = 2 * n;
    let rows = kahler_potential_hessian(n, 4.0 / c.abs(), -1.0);
    let r2: Vec<String> = (1..=dim).map(|k| format!("x{k}^2")).collect();
    let domain = parse(&format!("1 - ({})", r2.join(" + ")), dim)?;
    Ok(ManifoldSpec::new(
        format!("CD^{n}"),
        dim,
        parse_rows(&rows, dim)?,
        Some(standard_j(dim)),
        domain,
        centered_box(dim, 0.6),
    )?
    .with_parameter("n", n as f64)
    .with_parameter("c", c))
}

/// Which stereographic chart of `S⁶` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereChart {
    /// Projection from `+e₇`.
    North,
    /// Projection from `−e₇`.
    South,
}

impl SphereChart {
    fn sign(self) -> f64 {
        match self {
            SphereChart::North => 1.0,
            SphereChart::South => -1.0,
        }
    }

    /// Embedding of chart coordinates into the unit sphere of `ℝ⁷`.
    pub fn embed(self, x: &[f64]) -> [f64; 7] {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let mut p = [0.0; 7];
        for i in 0..6 {
            p[i] = 2.0 * x[i] / (1.0 + r2);
        }
        p[6] = self.sign() * (r2 - 1.0) / (1.0 + r2);
        p
    }

    /// Chart coordinates of a unit vector of `ℝ⁷` (not the pole).
    pub fn chart_coords(self, p: &[f64; 7]) -> Vec<f64> {
        let denom = 1.0 - self.sign() * p[6];
        (0..6).map(|i| p[i] / denom).collect()
    }
}

/// Round unit `S⁶` with `J v = p × v` through the octonion cross product.
pub fn make_s6() -> Result<ManifoldSpec> {
    make_s6_chart(SphereChart::North)
}

pub fn make_s6_chart(chart: SphereChart) -> Result<ManifoldSpec> {
    let dim = 6;
    let r2 = "(x1^2 + x2^2 + x3^2 + x4^2 + x5^2 + x6^2)";
    let rows: Vec<Vec<String>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    if i == j {
                        format!("4/(1 + {r2})^2")
                    } else {
                        "0".to_string()
                    }
                })
                .collect()
        })
        .collect();
    let table = CrossProductTable::new();
    let sign = chart.sign();
    let j_field = move |x: &[Jet]| -> Result<Vec<Jet>> {
        let mut r2 = x[0].zero_like();
        for xi in x {
            r2.fma_assign(xi, xi);
        }
        let w = r2.add_scalar(1.0);
        let inv = w.recip()?;
        let inv2 = &inv * &inv;
        let mut pos: Vec<Jet> = x.iter().map(|xi| (xi * &inv).scale(2.0)).collect();
        pos.push((&r2.add_scalar(-1.0) * &inv).scale(sign));
        // tangent[j] = ∂_j of the embedding
        let tangent: Vec<Vec<Jet>> = (0..6)
            .map(|j| {
                let mut col: Vec<Jet> = (0..6)
                    .map(|i| {
                        let mut v = (&(&x[i] * &x[j]) * &inv2).scale(-4.0);
                        if i == j {
                            v.axpy_assign(2.0, &inv);
                        }
                        v
                    })
                    .collect();
                col.push((&x[j] * &inv2).scale(4.0 * sign));
                col
            })
            .collect();
        // |∂_k X|² = 4/w², so Jᵏ_j = (w²/4) ⟨p × ∂_jX, ∂_kX⟩
        let factor = (&w * &w).scale(0.25);
        let mut out = vec![x[0].zero_like(); 36];
        for j in 0..6 {
            let pxv = table.cross_jets(&pos, &tangent[j]);
            for k in 0..6 {
                let mut dot = x[0].zero_like();
                for (a, b) in pxv.iter().zip(&tangent[k]) {
                    dot.fma_assign(a, b);
                }
                out[k * 6 + j] = &dot * &factor;
            }
        }
        Ok(out)
    };
    let name = match chart {
        SphereChart::North => "S^6",
        SphereChart::South => "S^6 (south chart)",
    };
    Ok(ManifoldSpec::new(
        name,
        dim,
        parse_rows(&rows, dim)?,
        Some(TensorField::Native(Arc::new(j_field))),
        Expr::Const(1.0),
        centered_box(dim, 1.0),
    )?
    .with_parameter("n", 3.0))
}

/// Riemannian fixture `g = Id + ε·P(x)` with seeded random polynomial entries
/// of degree 1 to 3. No complex structure.
pub fn make_perturbed_flat(n: usize, seed: u64) -> Result<ManifoldSpec> {
    if n < 1 {
        return Err(CurvError::Dimension("perturbed model needs n >= 1".into()));
    }
    const AMPLITUDE: f64 = 0.15;
    let dim = 2 * n;
    let mut rng = rng_for(seed, 0);
    let mut rows = vec![vec![String::new(); dim]; dim];
    let coef = |rng: &mut rand_chacha::ChaCha8Rng| {
        let c: f64 = AMPLITUDE * rng.random_range(-1.0..1.0);
        // keep printed coefficients short and exactly reproducible
        (c * 1e6).round() / 1e6
    };
    for i in 0..dim {
        for j in i..dim {
            let mut terms = vec![if i == j {
                "1".to_string()
            } else {
                "0".to_string()
            }];
            for degree in 1..=3 {
                let vars: Vec<usize> = (0..degree).map(|_| rng.random_range(1..=dim)).collect();
                let mono: Vec<String> = vars.iter().map(|v| format!("x{v}")).collect();
                terms.push(format!("{}*{}", coef(&mut rng), mono.join("*")));
            }
            let e = terms.join(" + ").replace("+ -", "- ");
            rows[i][j] = e.clone();
            rows[j][i] = e;
        }
    }
    Ok(ManifoldSpec::new(
        format!("perturbed flat R^{dim} (seed {seed})"),
        dim,
        parse_rows(&rows, dim)?,
        None,
        Expr::Const(1.0),
        centered_box(dim, 0.5),
    )?
    .with_parameter("n", n as f64)
    .with_parameter("perturbation_seed", seed as f64))
}

/// Built-in model selector.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Flat { n: usize },
    Cpn { n: usize, c: f64 },
    Cdn { n: usize, c: f64 },
    S6,
    S6South,
    Perturbed { n: usize, seed: u64 },
}

/// `(name, description)` of every built-in model.
pub const MODEL_NAMES: [(&str, &str); 6] = [
    ("flat", "flat C^n, identity metric, constant J (--n)"),
    (
        "cpn",
        "Fubini-Study CP^n of holomorphic curvature c > 0 (--n, --c)",
    ),
    (
        "cdn",
        "complex hyperbolic CD^n of holomorphic curvature c < 0 (--n, --c)",
    ),
    ("s6", "round unit S^6 with the octonion nearly-Kaehler J"),
    (
        "s6-south",
        "same S^6 in the stereographic chart from the south pole",
    ),
    (
        "perturbed",
        "Riemannian polynomial perturbation of flat R^2n, seed 42 (--n)",
    ),
];

impl Model {
    /// Resolves a CLI name with optional `n` and `c`.
    pub fn from_name(name: &str, n: Option<usize>, c: Option<f64>) -> Result<Model> {
        let n_or = |d: usize| n.unwrap_or(d);
        Ok(match name {
            "flat" => Model::Flat { n: n_or(2) },
            "cpn" => Model::Cpn {
                n: n_or(2),
                c: c.unwrap_or(4.0),
            },
            "cdn" => Model::Cdn {
                n: n_or(2),
                c: c.unwrap_or(-4.0),
            },
            "s6" => Model::S6,
            "s6-south" => Model::S6South,
            "perturbed" => Model::Perturbed {
                n: n_or(2),
                seed: 42,
            },
            other => {
                return Err(CurvError::Precondition(format!(
                    "unknown manifold `{other}` (try list-manifolds)"
                )))
            }
        })
    }

    pub fn build(&self) -> Result<ManifoldSpec> {
        match *self {
            Model::Flat { n } => make_flat(n),
            Model::Cpn { n, c } => make_cpn(n, c),
            Model::Cdn { n, c } => make_cdn(n, c),
            Model::S6 => make_s6_chart(SphereChart::North),
            Model::S6South => make_s6_chart(SphereChart::South),
            Model::Perturbed { n, seed } => make_perturbed_flat(n, seed),
        }
    }
}
