//! Pointwise evaluation of expressions together with their derivative jets.
//!
//! A jet of order `n` at `x` is the vector `(f(x), f'(x), …, f^{(n)}(x))`.
//! Products use Leibniz's rule, `e^{c x^q}` uses the complete Bell
//! recurrence for the exponential of a function, and the integral nodes use
//! the first-order linear ODE they satisfy, so only the value of an integral
//! ever needs quadrature.

use std::collections::HashMap;

use num_complex::Complex64;
use num_traits::Zero;

use super::expr::{FunctionExpr, Node};
use crate::error::{Error, Result};
use crate::operators::quadrature::{integrate, QuadratureConfig};

/// `e^{u}` underflows to zero below this real part.
const EXP_UNDERFLOW: f64 = -745.2;

/// Evaluates expressions with a fixed quadrature configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct Evaluator {
    pub quad: QuadratureConfig,
}

type Cache = HashMap<*const Node, Vec<Complex64>>;

pub(crate) fn binomials(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut row = vec![1.0; k + 1];
        for i in 1..k {
            row[i] = rows[k - 1][i - 1] + rows[k - 1][i];
        }
        rows.push(row);
    }
    rows
}

/// Jet of `x^t` at `x > 0`: `t (t-1) … (t-j+1) x^{t-j}`.
pub(crate) fn power_jet(t: Complex64, x: f64, n: usize) -> Vec<Complex64> {
    let lnx = x.ln();
    let mut out = Vec::with_capacity(n + 1);
    let mut falling = Complex64::new(1.0, 0.0);
    for j in 0..=n {
        if falling.is_zero() {
            out.push(Complex64::zero());
        } else {
            out.push(falling * ((t - j as f64) * lnx).exp());
        }
        falling *= t - j as f64;
    }
    out
}

/// `e^{u} p`, formed in the log domain when `e^{u}` alone would underflow.
pub(crate) fn exp_times(u: Complex64, p: Complex64) -> Complex64 {
    if p.is_zero() {
        return Complex64::zero();
    }
    if u.re > -700.0 && u.re < 700.0 {
        return u.exp() * p;
    }
    let v = u + p.ln();
    if v.re < EXP_UNDERFLOW {
        Complex64::zero()
    } else {
        v.exp()
    }
}

/// Jet of `e^{u}` from the jet of `u`, via `y' = u' y`.
pub(crate) fn exp_jet(u: &[Complex64]) -> Vec<Complex64> {
    let n = u.len() - 1;
    let binom = binomials(n);
    // y^{(k)} = e^{u} P_k with P_0 = 1, P_{k+1} = Σ_i C(k,i) u^{(i+1)} P_{k-i}.
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for k in 0..n {
        let mut acc = Complex64::zero();
        for i in 0..=k {
            acc += u[i + 1] * p[k - i] * binom[k][i];
        }
        p.push(acc);
    }
    p.into_iter().map(|pk| exp_times(u[0], pk)).collect()
}

pub(crate) fn leibniz(a: &[Complex64], b: &[Complex64], binom: &[Vec<f64>]) -> Vec<Complex64> {
    let n = a.len().min(b.len()) - 1;
    (0..=n)
        .map(|k| {
            let mut acc = Complex64::zero();
            for i in 0..=k {
                let (ai, bk) = (a[i], b[k - i]);
                if !ai.is_zero() && !bk.is_zero() {
                    acc += ai * bk * binom[k][i];
                }
            }
            acc
        })
        .collect()
}

/// Kernel value `e^{e} g` without forming `e^{e}` on its own.
fn kernel_times(e: Complex64, g: Complex64) -> Complex64 {
    exp_times(e, g)
}

/// Higher derivatives of `h` with `h' = g + a h`, given `h(x)`, the jet of
/// `g` to order `n-1` and the jet of `a` to order `n-1`.
fn linear_ode_jet(h0: Complex64, g: &[Complex64], a: &[Complex64], n: usize) -> Vec<Complex64> {
    let binom = binomials(n);
    let mut h = Vec::with_capacity(n + 1);
    h.push(h0);
    for k in 0..n {
        let mut acc = g[k];
        for i in 0..=k {
            if !a[i].is_zero() {
                acc += a[i] * h[k - i] * binom[k][i];
            }
        }
        h.push(acc);
    }
    h
}

impl Evaluator {
    pub fn new(quad: QuadratureConfig) -> Self {
        Evaluator { quad }
    }

    /// `f(x)` for `x > 0`.
    pub fn eval(&self, f: &FunctionExpr, x: f64) -> Result<Complex64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::domain(format!("expressions are evaluated on x > 0, got {x}")));
        }
        self.value(f, x)
    }

    /// Value-only evaluation; agrees with the order-0 jet but skips the
    /// jet bookkeeping, which dominates inside nested quadrature.
    fn value(&self, f: &FunctionExpr, x: f64) -> Result<Complex64> {
        Ok(match f.node() {
            Node::Const(c) => *c,
            Node::Power(t) => (t * x.ln()).exp(),
            Node::ExpPower { c, q } => {
                let u = (*q * x.ln()).exp() * c;
                if u.re < EXP_UNDERFLOW - 64.0 * (1.0 + x.ln().abs()) {
                    Complex64::zero()
                } else {
                    exp_times(u, Complex64::new(1.0, 0.0))
                }
            }
            Node::Sum(terms) => {
                let mut acc = Complex64::zero();
                for t in terms {
                    acc += self.value(t, x)?;
                }
                acc
            }
            Node::Product(factors) => {
                let mut acc: Option<Complex64> = None;
                for factor in factors {
                    let v = self.value(factor, x)?;
                    if v.is_zero() {
                        return Ok(Complex64::zero());
                    }
                    acc = Some(match acc {
                        None => v,
                        Some(a) => a * v,
                    });
                }
                acc.unwrap_or(Complex64::new(1.0, 0.0))
            }
            Node::Scale(k, g) => self.value(g, x)? * k,
            Node::Deriv(..) => self.jet_rec(f, x, 0, &mut Cache::new())?[0],
            Node::VolterraInt(g) => self.integral(x, |_| Complex64::zero(), g)?,
            Node::WeightedVolterra { c, q, child } => {
                let (c, q) = (*c, *q);
                let xq = x.powf(q);
                self.integral(x, |t| c * (xq - t.powf(q)), child)?
            }
            Node::PowerWeightedVolterra { s, child } => {
                let s = *s;
                let lnx = x.ln();
                self.integral(x, |t| s * (lnx - t.ln()), child)?
            }
        })
    }

    /// `(f(x), f'(x), …, f^{(n)}(x))` for `x > 0`.
    pub fn jet(&self, f: &FunctionExpr, x: f64, n: usize) -> Result<Vec<Complex64>> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::domain(format!("expressions are evaluated on x > 0, got {x}")));
        }
        let mut cache = Cache::new();
        self.jet_rec(f, x, n, &mut cache)
    }

    fn jet_rec(&self, f: &FunctionExpr, x: f64, n: usize, cache: &mut Cache) -> Result<Vec<Complex64>> {
        if let Some(hit) = cache.get(&f.ptr()) {
            if hit.len() > n {
                return Ok(hit[..=n].to_vec());
            }
        }
        let jet = self.compute(f, x, n, cache)?;
        cache.insert(f.ptr(), jet.clone());
        Ok(jet)
    }

    fn compute(&self, f: &FunctionExpr, x: f64, n: usize, cache: &mut Cache) -> Result<Vec<Complex64>> {
        let zeros = || vec![Complex64::zero(); n + 1];
        Ok(match f.node() {
            Node::Const(c) => {
                let mut j = zeros();
                j[0] = *c;
                j
            }
            Node::Power(t) => power_jet(*t, x, n),
            Node::ExpPower { c, q } => {
                let u: Vec<Complex64> = power_jet(Complex64::new(*q, 0.0), x, n)
                    .into_iter()
                    .map(|v| v * c)
                    .collect();
                if u[0].re < EXP_UNDERFLOW - 64.0 * (n as f64 + 1.0) * (1.0 + x.ln().abs()) {
                    zeros()
                } else {
                    exp_jet(&u)
                }
            }
            Node::Sum(terms) => {
                let mut acc = zeros();
                for t in terms {
                    for (a, b) in acc.iter_mut().zip(self.jet_rec(t, x, n, cache)?) {
                        *a += b;
                    }
                }
                acc
            }
            Node::Product(factors) => {
                let binom = binomials(n);
                let mut acc: Option<Vec<Complex64>> = None;
                for factor in factors {
                    let j = self.jet_rec(factor, x, n, cache)?;
                    if j.iter().all(|v| v.is_zero()) {
                        return Ok(zeros());
                    }
                    acc = Some(match acc {
                        None => j,
                        Some(a) => leibniz(&a, &j, &binom),
                    });
                }
                acc.unwrap_or_else(|| {
                    let mut j = zeros();
                    j[0] = Complex64::new(1.0, 0.0);
                    j
                })
            }
            Node::Scale(k, g) => self.jet_rec(g, x, n, cache)?.into_iter().map(|v| v * k).collect(),
            Node::Deriv(k, g) => self.jet_rec(g, x, n + k, cache)?.split_off(*k),
            Node::VolterraInt(g) => {
                let h0 = self.integral(x, |_| Complex64::zero(), g)?;
                let mut j = vec![h0];
                if n > 0 {
                    j.extend(self.jet_rec(g, x, n - 1, cache)?);
                }
                j
            }
            Node::WeightedVolterra { c, q, child } => {
                let (c, q) = (*c, *q);
                let xq = x.powf(q);
                let h0 = self.integral(x, |t| c * (xq - t.powf(q)), child)?;
                if n == 0 {
                    vec![h0]
                } else {
                    let g = self.jet_rec(child, x, n - 1, cache)?;
                    let a: Vec<Complex64> = power_jet(Complex64::new(q - 1.0, 0.0), x, n - 1)
                        .into_iter()
                        .map(|v| v * c * q)
                        .collect();
                    linear_ode_jet(h0, &g, &a, n)
                }
            }
            Node::PowerWeightedVolterra { s, child } => {
                let s = *s;
                let lnx = x.ln();
                let h0 = self.integral(x, |t| s * (lnx - t.ln()), child)?;
                if n == 0 {
                    vec![h0]
                } else {
                    let g = self.jet_rec(child, x, n - 1, cache)?;
                    let a: Vec<Complex64> = power_jet(Complex64::new(-1.0, 0.0), x, n - 1)
                        .into_iter()
                        .map(|v| v * s)
                        .collect();
                    linear_ode_jet(h0, &g, &a, n)
                }
            }
        })
    }

    /// `∫_0^x e^{exponent(t)} g(t) dt`.
    fn integral(
        &self,
        x: f64,
        exponent: impl Fn(f64) -> Complex64,
        g: &FunctionExpr,
    ) -> Result<Complex64> {
        let r = integrate(
            |t| {
                if t <= 0.0 {
                    return Ok(Complex64::zero());
                }
                let gv = self.value(g, t)?;
                Ok(kernel_times(exponent(t), gv))
            },
            0.0,
            x,
            &self.quad,
        )?;
        Ok(r.value)
    }
}

/// `f(x)` with the default quadrature configuration.
pub fn eval(f: &FunctionExpr, x: f64) -> Result<Complex64> {
    Evaluator::default().eval(f, x)
}

/// Jet of order `n` at `x` with the default quadrature configuration.
pub fn jet(f: &FunctionExpr, x: f64, n: usize) -> Result<Vec<Complex64>> {
    Evaluator::default().jet(f, x, n)
}
