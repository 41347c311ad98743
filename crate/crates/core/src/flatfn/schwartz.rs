//! The substitution `x ↦ 1/x` between `(0, 1]` and `[1, ∞)`.

use num_complex::Complex64;

use super::eval::Evaluator;
use super::expr::FunctionExpr;
use crate::bell::{faa_di_bruno, inv_x_derivatives};
use crate::error::{Error, Result};

/// Anything that can produce a derivative jet at a point.
pub trait JetSource {
    fn jet(&self, x: f64, n: usize) -> Result<Vec<Complex64>>;

    fn value(&self, x: f64) -> Result<Complex64> {
        Ok(self.jet(x, 0)?[0])
    }
}

/// An expression paired with the evaluator used for it.
#[derive(Debug, Clone)]
pub struct ExprSource {
    pub f: FunctionExpr,
    pub evaluator: Evaluator,
}

impl ExprSource {
    pub fn new(f: FunctionExpr) -> Self {
        ExprSource {
            f,
            evaluator: Evaluator::default(),
        }
    }
}

impl JetSource for ExprSource {
    fn jet(&self, x: f64, n: usize) -> Result<Vec<Complex64>> {
        self.evaluator.jet(&self.f, x, n)
    }
}

/// `x ↦ s(1/x)`, with derivatives by Faà di Bruno against the jet of `1/x`.
#[derive(Debug, Clone)]
pub struct ReciprocalTransform<S> {
    pub inner: S,
}

impl<S: JetSource> JetSource for ReciprocalTransform<S> {
    fn jet(&self, x: f64, n: usize) -> Result<Vec<Complex64>> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::domain(format!("transform evaluated at x = {x}")));
        }
        let outer = self.inner.jet(1.0 / x, n)?;
        let inner: Vec<Complex64> = (1..=n)
            .map(|j| inv_x_derivatives(j, x))
            .collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(n + 1);
        out.push(outer[0]);
        for j in 1..=n {
            out.push(faa_di_bruno(j, &outer[1..=j], &inner[..j])?);
        }
        Ok(out)
    }
}

/// `f(1/x)` on `[1, ∞)` for an expression defined on `(0, 1]`.
pub fn to_schwartz(f: &FunctionExpr) -> ReciprocalTransform<ExprSource> {
    ReciprocalTransform {
        inner: ExprSource::new(f.clone()),
    }
}

/// Richardson-extrapolated central difference of order `j` at `x`.
///
/// Used as an independent check on transformed jets.
pub fn finite_difference(
    f: impl Fn(f64) -> Result<Complex64>,
    x: f64,
    j: usize,
    h0: f64,
    levels: usize,
) -> Result<Complex64> {
    let binom = super::binomials(j);
    let central = |h: f64| -> Result<Complex64> {
        // Δ^j with nodes x + (k - j/2) h.
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=j {
            let sign = if (j - k).is_multiple_of(2) { 1.0 } else { -1.0 };
            acc += f(x + (k as f64 - j as f64 / 2.0) * h)? * (sign * binom[j][k]);
        }
        Ok(acc / h.powi(j as i32))
    };
    let mut table: Vec<Vec<Complex64>> = Vec::with_capacity(levels);
    let mut h = h0;
    for level in 0..levels {
        let mut row = vec![central(h)?];
        for m in 1..=level {
            let factor = 4f64.powi(m as i32);
            let prev = &table[level - 1][m - 1];
            let v = (row[m - 1] * factor - prev) / (factor - 1.0);
            row.push(v);
        }
        table.push(row);
        h /= 2.0;
    }
    Ok(*table.last().unwrap().last().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e() -> FunctionExpr {
        FunctionExpr::exp_power(Complex64::new(-1.0, 0.0), -1.0)
    }

    #[test]
    fn transform_of_exp_minus_inverse() {
        let t = to_schwartz(&e());
        for x in [1.0, 2.0, 7.5] {
            let v = t.value(x).unwrap();
            assert!((v.re - (-x as f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn double_transform_is_identity() {
        let tt = ReciprocalTransform { inner: to_schwartz(&e()) };
        let a = tt.value(0.3).unwrap();
        let b = (-1.0f64 / 0.3).exp();
        assert!((a.re - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn transformed_jet_matches_closed_form() {
        // f(1/x) = e^{-x}, so every derivative is ±e^{-x}.
        let jet = to_schwartz(&e()).jet(2.0, 5).unwrap();
        for (j, v) in jet.iter().enumerate() {
            let expected = if j % 2 == 0 { 1.0 } else { -1.0 } * (-2.0f64).exp();
            assert!((v.re - expected).abs() < 1e-13, "j={j}");
        }
    }

    #[test]
    fn richardson_differences_are_accurate() {
        for j in 0..=4 {
            let d = finite_difference(|x| Ok(Complex64::new(x.sin(), 0.0)), 0.7, j, 0.5, 4).unwrap();
            let exact = [0.7f64.sin(), 0.7f64.cos(), -0.7f64.sin(), -0.7f64.cos(), 0.7f64.sin()][j];
            assert!((d.re - exact).abs() < 1e-9, "j={j} err {}", (d.re - exact).abs());
        }
    }
}
