//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] holds the Taylor coefficients `∂^α f / α!` of a scalar function of
//! `dim` chart variables for every multi-index with `|α| ≤ order`. Products are
//! truncated convolutions, elementary functions are composed through their
//! univariate Taylor series, and [`Jet::partial`] differentiates exactly while
//! consuming one order.
//!
//! The maximum order is 3, which is what the curvature pipeline needs: the
//! metric is evaluated to third order so that Christoffel symbols carry two
//! orders, the curvature tensor one, and covariant derivatives of curvature can
//! be read off as plain values.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{CurvError, Result};

/// Highest derivative order a jet may carry.
pub const MAX_ORDER: usize = 3;

/// Index tables shared by all jets of one `(dim, order)`.
struct Layout {
    dim: usize,
    order: usize,
    /// Multi-indices in graded order; the layout of a lower order is a prefix.
    indices: Vec<Vec<u8>>,
    lookup: HashMap<Vec<u8>, usize>,
    /// `degree_start[k]` is the first slot of degree `k`; has `order + 2` entries.
    degree_start: Vec<usize>,
    /// `(i, j, k)` with `α_i + α_j = α_k`, the support of the truncated product.
    products: Vec<(u32, u32, u32)>,
    /// Per variable `v`: for each slot `β` of the order-`(order-1)` layout, the
    /// slot of `β + e_v` and the rescaling factor `β_v + 1`.
    partials: Vec<Vec<(u32, f64)>>,
    factorials: Vec<f64>,
}

fn multi_indices_of_degree(dim: usize, degree: usize) -> Vec<Vec<u8>> {
    fn rec(pos: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let dim = cur.len();
        if pos == dim - 1 {
            cur[pos] = left as u8;
            out.push(cur.clone());
            cur[pos] = 0;
            return;
        }
        for take in (0..=left).rev() {
            cur[pos] = take as u8;
            rec(pos + 1, left - take, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    if dim == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, degree, &mut vec![0u8; dim], &mut out);
    out
}

impl Layout {
    fn build(dim: usize, order: usize) -> Layout {
        let mut indices = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for k in 0..=order {
            degree_start.push(indices.len());
            indices.extend(multi_indices_of_degree(dim, k));
        }
        degree_start.push(indices.len());
        let lookup: HashMap<Vec<u8>, usize> = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let degree = |a: &Vec<u8>| a.iter().map(|&x| x as usize).sum::<usize>();

        let mut products = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                if degree(a) + degree(b) > order {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push((i as u32, j as u32, lookup[&sum] as u32));
            }
        }

        let mut partials = Vec::with_capacity(dim);
        if order > 0 {
            let lower = degree_start[order];
            for v in 0..dim {
                let table = indices[..lower]
                    .iter()
                    .map(|beta| {
                        let mut up = beta.clone();
                        up[v] += 1;
                        (lookup[&up] as u32, (beta[v] as f64) + 1.0)
                    })
                    .collect();
                partials.push(table);
            }
        }

        let factorials = indices
            .iter()
            .map(|a| a.iter().map(|&k| factorial(k as usize)).product())
            .collect();

        Layout {
            dim,
            order,
            indices,
            lookup,
            degree_start,
            products,
            partials,
            factorials,
        }
    }

    fn len(&self) -> usize {
        self.indices.len()
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

type LayoutCache = Mutex<HashMap<(usize, usize), Arc<Layout>>>;

fn layout(dim: usize, order: usize) -> Arc<Layout> {
    static CACHE: OnceLock<LayoutCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("jet layout cache poisoned");
    guard
        .entry((dim, order))
        .or_insert_with(|| Arc::new(Layout::build(dim, order)))
        .clone()
}

/// Binary jet operation selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Elementary functions that jets can be composed with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    /// `x^p` for a constant real `p`, `x > 0`.
    Pow(f64),
}

impl Elementary {
    pub fn name(&self) -> &'static str {
        match self {
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Exp => "exp",
            Elementary::Log => "log",
            Elementary::Sqrt => "sqrt",
            Elementary::Pow(_) => "pow",
        }
    }

    /// `f^(k)(a) / k!` for `k = 0..=order`.
    fn taylor(&self, a: f64, order: usize) -> Result<Vec<f64>> {
        let domain = |ok: bool| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(CurvError::EvaluationDomain {
                    func: self.name().to_string(),
                    value: a,
                    location: String::new(),
                })
            }
        };
        let mut d = Vec::with_capacity(order + 1);
        match *self {
            Elementary::Sin | Elementary::Cos => {
                let (s, c) = a.sin_cos();
                let cycle = if *self == Elementary::Sin {
                    [s, c, -s, -c]
                } else {
                    [c, -s, -c, s]
                };
                for k in 0..=order {
                    d.push(cycle[k % 4] / factorial(k));
                }
            }
            Elementary::Exp => {
                let e = a.exp();
                for k in 0..=order {
                    d.push(e / factorial(k));
                }
            }
            Elementary::Log => {
                domain(a > 0.0)?;
                d.push(a.ln());
                for k in 1..=order {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    d.push(sign / (k as f64 * a.powi(k as i32)));
                }
            }
            Elementary::Sqrt | Elementary::Pow(_) => {
                let p = match *self {
                    Elementary::Pow(p) => p,
                    _ => 0.5,
                };
                domain(a > 0.0 || (a == 0.0 && order == 0 && p > 0.0))?;
                // generalized binomial C(p, k) a^(p-k)
                let mut binom = 1.0;
                for k in 0..=order {
                    if k > 0 {
                        binom *= (p - (k as f64 - 1.0)) / k as f64;
                    }
                    d.push(if binom == 0.0 {
                        0.0
                    } else {
                        binom * a.powf(p - k as f64)
                    });
                }
            }
        }
        if d.iter().any(|x| !x.is_finite()) {
            domain(false)?;
        }
        Ok(d)
    }
}

/// Truncated Taylor expansion of a scalar chart function around a point.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("dim", &self.dim())
            .field("order", &self.order())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.order() == other.order() && self.coeffs == other.coeffs
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        Err(CurvError::UnsupportedOrder(order))
    } else {
        Ok(())
    }
}

impl Jet {
    /// Constant jet: value `value`, all derivatives zero.
    pub fn constant(dim: usize, order: usize, value: f64) -> Result<Jet> {
        check_order(order)?;
        let layout = layout(dim, order);
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = value;
        Ok(Jet { layout, coeffs })
    }

    /// Coordinate jets `x_i` seeded at `point`.
    pub fn seed(point: &[f64], order: usize) -> Result<Vec<Jet>> {
        check_order(order)?;
        let dim = point.len();
        let layout = layout(dim, order);
        Ok(point
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let mut coeffs = vec![0.0; layout.len()];
                coeffs[0] = x;
                if order >= 1 {
                    coeffs[1 + i] = 1.0;
                }
                Jet {
                    layout: layout.clone(),
                    coeffs,
                }
            })
            .collect())
    }

    /// Builds a jet from raw Taylor coefficients in the internal graded order.
    pub fn from_coeffs(dim: usize, order: usize, coeffs: Vec<f64>) -> Result<Jet> {
        check_order(order)?;
        let layout = layout(dim, order);
        if coeffs.len() != layout.len() {
            return Err(CurvError::Precondition(format!(
                "expected {} coefficients, got {}",
                layout.len(),
                coeffs.len()
            )));
        }
        Ok(Jet { layout, coeffs })
    }

    /// Constant with the same dim and order as `self`.
    pub fn constant_like(&self, value: f64) -> Jet {
        let mut coeffs = vec![0.0; self.coeffs.len()];
        coeffs[0] = value;
        Jet {
            layout: self.layout.clone(),
            coeffs,
        }
    }

    pub fn zero_like(&self) -> Jet {
        self.constant_like(0.0)
    }

    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Raw Taylor coefficients in graded order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Multi-indices matching [`Jet::coeffs`] slot by slot.
    pub fn multi_indices(&self) -> impl Iterator<Item = &[u8]> {
        self.layout.indices.iter().map(|v| v.as_slice())
    }

    /// Taylor coefficient `∂^α f / α!`, or `None` when `|α| > order`.
    pub fn taylor_coeff(&self, alpha: &[u8]) -> Option<f64> {
        self.layout.lookup.get(alpha).map(|&i| self.coeffs[i])
    }

    /// Partial derivative `∂^α f` at the seed point.
    pub fn derivative(&self, alpha: &[u8]) -> Option<f64> {
        self.layout
            .lookup
            .get(alpha)
            .map(|&i| self.coeffs[i] * self.layout.factorials[i])
    }

    /// First partials; empty for order-0 jets.
    pub fn gradient(&self) -> Vec<f64> {
        if self.order() == 0 {
            return Vec::new();
        }
        self.coeffs[1..=self.dim()].to_vec()
    }

    /// Directional derivative `v(f) = Σ v_i ∂_i f`.
    pub fn directional(&self, v: &[f64]) -> Result<f64> {
        if self.order() == 0 {
            return Err(CurvError::DerivativeExhausted);
        }
        Ok(self.coeffs[1..=self.dim()]
            .iter()
            .zip(v)
            .map(|(a, b)| a * b)
            .sum())
    }

    fn same_shape(&self, other: &Jet) -> Result<()> {
        if Arc::ptr_eq(&self.layout, &other.layout)
            || (self.dim() == other.dim() && self.order() == other.order())
        {
            Ok(())
        } else {
            Err(CurvError::JetMismatch {
                left: (self.dim(), self.order()),
                right: (other.dim(), other.order()),
            })
        }
    }

    /// Checked binary arithmetic.
    pub fn arith(&self, other: &Jet, op: ArithOp) -> Result<Jet> {
        self.same_shape(other)?;
        match op {
            ArithOp::Add => Ok(self.zip_with(other, |a, b| a + b)),
            ArithOp::Sub => Ok(self.zip_with(other, |a, b| a - b)),
            ArithOp::Mul => Ok(self.mul_unchecked(other)),
            ArithOp::Div => Ok(self.mul_unchecked(&other.recip()?)),
        }
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        Jet {
            layout: self.layout.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    fn mul_unchecked(&self, other: &Jet) -> Jet {
        let mut out = vec![0.0; self.coeffs.len()];
        for &(i, j, k) in &self.layout.products {
            out[k as usize] += self.coeffs[i as usize] * other.coeffs[j as usize];
        }
        Jet {
            layout: self.layout.clone(),
            coeffs: out,
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// `self += a * b`, the inner loop of every tensor contraction.
    pub fn fma_assign(&mut self, a: &Jet, b: &Jet) {
        debug_assert!(self.same_shape(a).is_ok() && self.same_shape(b).is_ok());
        for &(i, j, k) in &self.layout.products {
            self.coeffs[k as usize] += a.coeffs[i as usize] * b.coeffs[j as usize];
        }
    }

    /// `self += s * a`.
    pub fn axpy_assign(&mut self, s: f64, a: &Jet) {
        debug_assert!(self.same_shape(a).is_ok());
        for (c, x) in self.coeffs.iter_mut().zip(&a.coeffs) {
            *c += s * x;
        }
    }

    /// Nilpotent part `self - value`.
    fn tail(&self) -> Jet {
        let mut t = self.clone();
        t.coeffs[0] = 0.0;
        t
    }

    /// Horner evaluation of `Σ d_k h^k` with `h = self - value`.
    fn compose(&self, d: &[f64]) -> Jet {
        let h = self.tail();
        let order = self.order();
        let mut acc = self.constant_like(d[order]);
        for k in (0..order).rev() {
            acc = acc.mul_unchecked(&h);
            acc.coeffs[0] += d[k];
        }
        acc
    }

    pub fn recip(&self) -> Result<Jet> {
        let a = self.value();
        if a == 0.0 || !a.is_finite() {
            return Err(CurvError::EvaluationDomain {
                func: "division".into(),
                value: a,
                location: String::new(),
            });
        }
        // 1/(a+h) = Σ (-1)^k h^k / a^(k+1)
        let d: Vec<f64> = (0..=self.order())
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign / a.powi(k as i32 + 1)
            })
            .collect();
        Ok(self.compose(&d))
    }

    /// Composition with an elementary function.
    pub fn apply(&self, f: Elementary) -> Result<Jet> {
        let d = f.taylor(self.value(), self.order())?;
        Ok(self.compose(&d))
    }

    pub fn sin(&self) -> Result<Jet> {
        self.apply(Elementary::Sin)
    }

    pub fn cos(&self) -> Result<Jet> {
        self.apply(Elementary::Cos)
    }

    pub fn exp(&self) -> Result<Jet> {
        self.apply(Elementary::Exp)
    }

    pub fn ln(&self) -> Result<Jet> {
        self.apply(Elementary::Log)
    }

    pub fn sqrt(&self) -> Result<Jet> {
        self.apply(Elementary::Sqrt)
    }

    /// Integer power by repeated squaring; negative powers take [`Jet::recip`] last.
    pub fn powi(&self, p: i32) -> Result<Jet> {
        let mut acc = self.constant_like(1.0);
        let mut sq = self.clone();
        let mut e = p.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_unchecked(&sq);
            }
        }
        if p < 0 {
            acc.recip()
        } else {
            Ok(acc)
        }
    }

    /// Exact partial derivative `∂f/∂x_i`, one order lower.
    pub fn partial(&self, i: usize) -> Result<Jet> {
        let order = self.order();
        if order == 0 {
            return Err(CurvError::DerivativeExhausted);
        }
        if i >= self.dim() {
            return Err(CurvError::Precondition(format!(
                "variable index {i} out of range for dim {}",
                self.dim()
            )));
        }
        let lower = layout(self.dim(), order - 1);
        let coeffs = self.layout.partials[i]
            .iter()
            .map(|&(up, factor)| self.coeffs[up as usize] * factor)
            .collect();
        Ok(Jet {
            layout: lower,
            coeffs,
        })
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order() {
            return self.clone();
        }
        let end = self.layout.degree_start[order + 1];
        Jet {
            layout: layout(self.dim(), order),
            coeffs: self.coeffs[..end].to_vec(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.arith(rhs, ArithOp::Add).expect("jet shape mismatch")
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.arith(rhs, ArithOp::Sub).expect("jet shape mismatch")
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.same_shape(rhs).expect("jet shape mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn seed_order_one_has_unit_gradients() {
        let x = Jet::seed(&[2.0, 3.0], 1).unwrap();
        assert_eq!(x[0].value(), 2.0);
        assert_eq!(x[1].value(), 3.0);
        assert_eq!(x[0].gradient(), vec![1.0, 0.0]);
        assert_eq!(x[1].gradient(), vec![0.0, 1.0]);
    }

    #[test]
    fn seed_univariate_order_three() {
        let x = Jet::seed(&[0.0], 3).unwrap();
        assert_eq!(x[0].taylor_coeff(&[0]), Some(0.0));
        assert_eq!(x[0].taylor_coeff(&[1]), Some(1.0));
        assert_eq!(x[0].taylor_coeff(&[2]), Some(0.0));
        assert_eq!(x[0].taylor_coeff(&[3]), Some(0.0));
        assert_eq!(x[0].coeffs().len(), 4);
    }

    #[test]
    fn seed_order_zero_is_value_only() {
        let x = Jet::seed(&[1.5, -2.0, 0.25], 0).unwrap();
        for (j, v) in x.iter().zip([1.5, -2.0, 0.25]) {
            assert_eq!(j.coeffs(), &[v]);
        }
    }

    #[test]
    fn seed_rejects_order_four() {
        assert_eq!(
            Jet::seed(&[0.0], 4).unwrap_err(),
            CurvError::UnsupportedOrder(4)
        );
    }

    #[test]
    fn monomial_derivatives() {
        // x1^2 x2 at (2,3)
        let x = Jet::seed(&[2.0, 3.0], 2).unwrap();
        let f = &(&x[0] * &x[0]) * &x[1];
        assert_eq!(f.value(), 12.0);
        assert_eq!(f.derivative(&[1, 0]), Some(12.0));
        assert_eq!(f.derivative(&[0, 1]), Some(4.0));
        assert_eq!(f.derivative(&[2, 0]), Some(6.0));
        assert_eq!(f.derivative(&[1, 1]), Some(4.0));
        assert_eq!(f.derivative(&[0, 2]), Some(0.0));
    }

    #[test]
    fn mixed_partial_of_monomial_is_two_x() {
        // the jet stores ∂₁∂₂(x1² x2) = 2 x1 = 4 at (2,3); its Taylor coefficient is also 4
        let x = Jet::seed(&[2.0, 3.0], 2).unwrap();
        let f = &(&x[0] * &x[0]) * &x[1];
        assert_eq!(f.taylor_coeff(&[1, 1]), Some(4.0));
        let d12 = f.partial(0).unwrap().partial(1).unwrap();
        assert_eq!(d12.value(), 4.0);
    }

    #[test]
    fn quotient_of_equal_jets_is_one() {
        for order in 0..=3 {
            let x = Jet::seed(&[5.0], order).unwrap();
            let q = x[0].arith(&x[0], ArithOp::Div).unwrap();
            assert!(close(q.value(), 1.0, 1e-15));
            assert!(q.coeffs()[1..].iter().all(|c| c.abs() < 1e-15));
        }
    }

    #[test]
    fn division_by_zero_value_is_domain_error() {
        let x = Jet::seed(&[0.0, 1.0], 2).unwrap();
        let err = x[1].arith(&x[0], ArithOp::Div).unwrap_err();
        assert!(matches!(err, CurvError::EvaluationDomain { .. }));
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let a = Jet::seed(&[1.0, 2.0], 2).unwrap();
        let b = Jet::seed(&[1.0, 2.0], 1).unwrap();
        assert!(matches!(
            a[0].arith(&b[0], ArithOp::Add),
            Err(CurvError::JetMismatch { .. })
        ));
    }

    #[test]
    fn sin_third_coefficient() {
        let x = Jet::seed(&[0.0], 3).unwrap();
        let s = x[0].sin().unwrap();
        assert!(close(s.taylor_coeff(&[3]).unwrap(), -1.0 / 6.0, 1e-15));
        assert!(close(s.derivative(&[3]).unwrap(), -1.0, 1e-15));
    }

    #[test]
    fn exp_of_log_is_identity() {
        let x = Jet::seed(&[2.0], 3).unwrap();
        let y = x[0].ln().unwrap().exp().unwrap();
        for (a, b) in y.coeffs().iter().zip(x[0].coeffs()) {
            assert!((a - b).abs() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn log_of_negative_is_domain_error() {
        let x = Jet::seed(&[-1.0], 2).unwrap();
        match x[0].ln() {
            Err(CurvError::EvaluationDomain { func, value, .. }) => {
                assert_eq!(func, "log");
                assert_eq!(value, -1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(x[0].sqrt().is_err());
    }

    #[test]
    fn sqrt_squared_is_identity() {
        let x = Jet::seed(&[3.0, 0.5], 3).unwrap();
        let f = &(&x[0] * &x[1]).add_scalar(1.0);
        let r = f.sqrt().unwrap();
        let back = &r * &r;
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn negative_powi_matches_recip() {
        let x = Jet::seed(&[1.3, -0.4], 3).unwrap();
        let f = (&x[0] + &x[1]).add_scalar(2.0);
        let a = f.powi(-2).unwrap();
        let b = (&f * &f).recip().unwrap();
        for (p, q) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((p - q).abs() < 1e-13);
        }
    }

    #[test]
    fn partial_of_coordinate_is_one() {
        let x = Jet::seed(&[0.3, 0.7], 3).unwrap();
        let d = x[0].partial(0).unwrap();
        assert_eq!(d.order(), 2);
        assert_eq!(d.value(), 1.0);
        assert!(d.coeffs()[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn second_partial_of_monomial() {
        let x = Jet::seed(&[2.0, 3.0], 3).unwrap();
        let f = &(&x[0] * &x[0]) * &x[1];
        let d = f.partial(0).unwrap().partial(0).unwrap();
        assert_eq!(d.value(), 6.0);
        assert_eq!(d.order(), 1);
    }

    #[test]
    fn partial_of_order_zero_is_exhausted() {
        let x = Jet::seed(&[1.0], 0).unwrap();
        assert_eq!(x[0].partial(0).unwrap_err(), CurvError::DerivativeExhausted);
    }

    #[test]
    fn truncate_is_prefix() {
        let x = Jet::seed(&[0.2, 0.4, 0.6], 3).unwrap();
        let f = (&x[0] * &x[1]).sin().unwrap();
        let t = f.truncate(1);
        assert_eq!(t.order(), 1);
        assert_eq!(t.coeffs(), &f.coeffs()[..4]);
        let g = (&x[0].truncate(1) * &x[1].truncate(1)).sin().unwrap();
        for (a, b) in g.coeffs().iter().zip(t.coeffs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn layout_sizes() {
        // C(d + k, k)
        assert_eq!(Jet::constant(6, 3, 0.0).unwrap().coeffs().len(), 84);
        assert_eq!(Jet::constant(4, 3, 0.0).unwrap().coeffs().len(), 35);
        assert_eq!(Jet::constant(4, 1, 0.0).unwrap().coeffs().len(), 5);
    }
}
