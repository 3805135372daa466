#![allow(dead_code)]

use curvlab::exprlang::{BinOp, Expr, Func};
use curvlab::sampling::SeededRng;
use proptest::prelude::*;
use rand::Rng;

/// Random expression source that stays finite on `[-1, 1]^dim`.
pub fn safe_expression(rng: &mut SeededRng, dim: usize, depth: usize) -> String {
    if depth == 0 || rng.random_bool(0.2) {
        return if rng.random_bool(0.6) {
            format!("x{}", rng.random_range(1..=dim))
        } else {
            format!("{:.3}", rng.random_range(0.1..2.0))
        };
    }
    let a = safe_expression(rng, dim, depth - 1);
    let b = safe_expression(rng, dim, depth - 1);
    match rng.random_range(0..11) {
        0 => format!("({a})+({b})"),
        1 => format!("({a})-({b})"),
        2 => format!("({a})*({b})"),
        3 => format!("({a})/(1.5+({b})^2)"),
        4 => format!("sin({a})"),
        5 => format!("cos({a})"),
        6 => format!("exp(0.3*({a}))"),
        7 => format!("log(1+({a})^2)"),
        8 => format!("sqrt(2+({a})^2)"),
        9 => format!("({a})^3"),
        _ => format!("(1+({a})^2)^(-0.5)"),
    }
}

/// `∂^α f` by tensor-product central differences with two Richardson steps.
pub fn fd_derivative(f: &dyn Fn(&[f64]) -> f64, x: &[f64], alpha: &[u8], h: f64) -> f64 {
    let d = |h: f64| stencil(f, x, alpha, h);
    let (d0, d1, d2) = (d(h), d(h / 2.0), d(h / 4.0));
    let r0 = (4.0 * d1 - d0) / 3.0;
    let r1 = (4.0 * d2 - d1) / 3.0;
    (16.0 * r1 - r0) / 15.0
}

fn stencil(f: &dyn Fn(&[f64]) -> f64, x: &[f64], alpha: &[u8], h: f64) -> f64 {
    let weights = |k: u8| -> Vec<(i32, f64)> {
        match k {
            0 => vec![(0, 1.0)],
            1 => vec![(-1, -0.5), (1, 0.5)],
            2 => vec![(-1, 1.0), (0, -2.0), (1, 1.0)],
            3 => vec![(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
            _ => unreachable!(),
        }
    };
    let mut terms: Vec<(Vec<f64>, f64)> = vec![(x.to_vec(), 1.0)];
    for (i, &k) in alpha.iter().enumerate() {
        let mut next = Vec::new();
        for (p, w) in &terms {
            for (off, c) in weights(k) {
                let mut q = p.clone();
                q[i] += off as f64 * h;
                next.push((q, w * c / h.powi(k as i32)));
            }
        }
        terms = next;
    }
    terms.iter().map(|(p, w)| w * f(p)).sum()
}

/// All multi-indices of total order `1..=max` in `dim` variables.
pub fn multi_indices(dim: usize, max: u8) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|a: Vec<u8>| {
                (0..=max).map(move |k| {
                    let mut b = a.clone();
                    b.push(k);
                    b
                })
            })
            .collect();
    }
    out.into_iter()
        .filter(|a| {
            let s: u8 = a.iter().sum();
            s >= 1 && s <= max
        })
        .collect()
}

/// Proptest strategy for expression trees with non-negative constants.
pub fn arb_expr(dim: usize) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..1000).prop_map(|k| Expr::Const(k as f64 / 8.0)),
        (0..dim).prop_map(Expr::Var),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (
                prop_oneof![
                    Just(BinOp::Add),
                    Just(BinOp::Sub),
                    Just(BinOp::Mul),
                    Just(BinOp::Div)
                ],
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Expr::Binary(op, Box::new(a), Box::new(b))),
            (inner.clone(), -6i32..7).prop_map(|(a, k)| Expr::Pow(Box::new(a), k as f64 / 2.0)),
            (
                prop_oneof![
                    Just(Func::Sin),
                    Just(Func::Cos),
                    Just(Func::Exp),
                    Just(Func::Log),
                    Just(Func::Sqrt)
                ],
                inner
            )
                .prop_map(|(f, a)| Expr::Call(f, Box::new(a))),
        ]
    })
}

use curvlab::exprlang::parse;
use curvlab::geometry::{ManifoldSpec, SampleBox, TensorField};
use curvlab::modelspaces::Model;

/// Every built-in model plus the Riemannian fixture.
pub fn all_models() -> Vec<ManifoldSpec> {
    [
        Model::Flat { n: 2 },
        Model::Flat { n: 3 },
        Model::Cpn { n: 2, c: 4.0 },
        Model::Cpn { n: 3, c: 2.5 },
        Model::Cdn { n: 2, c: -4.0 },
        Model::S6,
        Model::S6South,
        Model::Perturbed { n: 2, seed: 42 },
    ]
    .iter()
    .map(|m| m.build().unwrap())
    .collect()
}

/// Flat `ℝ⁴` with the orthogonal structure `cos(x1) J₀ + sin(x1) K₀`,
/// Hermitian but not Kähler.
pub fn twisted_flat() -> ManifoldSpec {
    let j0 = [
        [0., -1., 0., 0.],
        [1., 0., 0., 0.],
        [0., 0., 0., -1.],
        [0., 0., 1., 0.],
    ];
    let k0 = [
        [0., 0., -1., 0.],
        [0., 0., 0., 1.],
        [1., 0., 0., 0.],
        [0., -1., 0., 0.],
    ];
    let entry = |i: usize, j: usize| format!("({})*cos(x1) + ({})*sin(x1)", j0[i][j], k0[i][j]);
    let j: Vec<Vec<_>> = (0..4)
        .map(|i| (0..4).map(|k| parse(&entry(i, k), 4).unwrap()).collect())
        .collect();
    let g: Vec<Vec<_>> = (0..4)
        .map(|i| {
            (0..4)
                .map(|k| parse(if i == k { "1" } else { "0" }, 4).unwrap())
                .collect()
        })
        .collect();
    ManifoldSpec::new(
        "twisted flat",
        4,
        TensorField::Expressions(g),
        Some(TensorField::Expressions(j)),
        parse("1", 4).unwrap(),
        SampleBox {
            center: vec![0.0; 4],
            half_width: vec![1.0; 4],
        },
    )
    .unwrap()
}
