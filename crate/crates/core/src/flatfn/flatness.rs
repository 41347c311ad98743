use num_complex::Complex64;

use super::eval::Evaluator;
use super::expr::{FunctionExpr, Node};
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::multipliers::analytic_multiplier;

/// Values below this are treated as exact zeros in ratio tests.
pub const FLUSH_TO_ZERO: f64 = 1e-300;

pub const DEFAULT_FLAT_TOL: f64 = 1e-8;
pub const DEFAULT_FLAT_JMAX: usize = 4;
pub const DEFAULT_FLAT_NMAX: usize = 10;

/// Number of trailing samples over which ratios must not increase.
pub const MONOTONE_WINDOW: usize = 8;

/// Estimates `‖f‖_n` for `n = 0..=nmax` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SeminormProfile {
    values: Vec<f64>,
}

impl SeminormProfile {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(n).copied()
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("profiles are nonempty")
    }
}

/// Seminorm profile `n ↦ max_{j ≤ n, x ∈ grid} |f^{(j)}(x)|` up to `nmax`.
pub fn seminorm_profile_with(
    ev: &Evaluator,
    f: &FunctionExpr,
    nmax: usize,
    grid: &Grid,
) -> Result<SeminormProfile> {
    let mut per_j = vec![0.0f64; nmax + 1];
    for &x in grid.points() {
        let jet = ev.jet(f, x, nmax)?;
        for (m, v) in per_j.iter_mut().zip(&jet) {
            let a = v.norm();
            if a.is_nan() {
                return Err(Error::numeric(format!("derivative is NaN at x = {x:e}")));
            }
            *m = m.max(a);
        }
    }
    let mut running = 0.0f64;
    let values = per_j
        .into_iter()
        .map(|v| {
            running = running.max(v);
            running
        })
        .collect();
    Ok(SeminormProfile { values })
}

pub fn seminorm_profile(f: &FunctionExpr, nmax: usize, grid: &Grid) -> Result<SeminormProfile> {
    seminorm_profile_with(&Evaluator::default(), f, nmax, grid)
}

/// Grid estimate of `‖f‖_n = sup_{j ≤ n} sup_x |f^{(j)}(x)|`.
pub fn seminorm(f: &FunctionExpr, n: usize, grid: &Grid) -> Result<f64> {
    Ok(seminorm_profile(f, n, grid)?.last())
}

/// Outcome of the numeric flatness test with its ratio table.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessReport {
    pub flat: bool,
    pub samples: Vec<f64>,
    /// `ratios[j][n][s] = |f^{(j)}(x_s)| / x_s^n`, zero when flushed.
    pub ratios: Vec<Vec<Vec<f64>>>,
    /// Every `(j, n)` whose ratios fail to decay.
    pub failures: Vec<(usize, usize)>,
    pub tol: f64,
}

impl FlatnessReport {
    pub fn first_failure(&self) -> Option<(usize, usize)> {
        self.failures.first().copied()
    }
}

fn decays(ratios: &[f64], tol: f64) -> bool {
    let last = *ratios.last().expect("nonempty samples");
    if !(last <= tol) {
        return false;
    }
    let window = &ratios[ratios.len().saturating_sub(MONOTONE_WINDOW)..];
    window.windows(2).all(|w| w[1] <= w[0])
}

/// Numeric flatness test: `|f^{(j)}(x)| / x^n` must decay below `tol` and be
/// non-increasing over the last samples, for every `j ≤ jmax`, `n ≤ nmax`.
pub fn is_flat_with(
    ev: &Evaluator,
    f: &FunctionExpr,
    jmax: usize,
    nmax: usize,
    xs: &[f64],
    tol: f64,
) -> Result<FlatnessReport> {
    if xs.len() < 2 || !xs.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::precondition("flatness samples must be strictly decreasing"));
    }
    if *xs.last().unwrap() > 2f64.powi(-20) || xs[xs.len() - 1] <= 0.0 {
        return Err(Error::precondition("flatness samples must reach (0, 2^-20]"));
    }
    let mut ratios = vec![vec![Vec::with_capacity(xs.len()); nmax + 1]; jmax + 1];
    for &x in xs {
        let jet = ev.jet(f, x, jmax)?;
        let lnx = x.ln();
        for (j, v) in jet.iter().enumerate() {
            let a = v.norm();
            for (n, row) in ratios[j].iter_mut().enumerate() {
                let r = if a < FLUSH_TO_ZERO {
                    0.0
                } else if a.is_finite() {
                    (a.ln() - n as f64 * lnx).exp()
                } else {
                    f64::INFINITY
                };
                row.push(r);
            }
        }
    }
    let mut failures = Vec::new();
    for (j, per_n) in ratios.iter().enumerate() {
        for (n, row) in per_n.iter().enumerate() {
            if !decays(row, tol) {
                failures.push((j, n));
            }
        }
    }
    Ok(FlatnessReport {
        flat: failures.is_empty(),
        samples: xs.to_vec(),
        ratios,
        failures,
        tol,
    })
}

pub fn is_flat(f: &FunctionExpr, jmax: usize, nmax: usize, xs: &[f64]) -> Result<FlatnessReport> {
    is_flat_with(&Evaluator::default(), f, jmax, nmax, xs, DEFAULT_FLAT_TOL)
}

/// [`is_flat`] with the default orders and samples.
pub fn is_flat_default(f: &FunctionExpr) -> Result<FlatnessReport> {
    is_flat(
        f,
        DEFAULT_FLAT_JMAX,
        DEFAULT_FLAT_NMAX,
        &super::grid::flatness_samples(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flatness {
    Flat,
    NotFlat,
    Unknown,
}

/// Primitive factors whose modulus is bounded below by `C x^m` near 0.
fn tempered_below(f: &FunctionExpr) -> bool {
    match f.node() {
        Node::Const(c) => *c != Complex64::new(0.0, 0.0),
        Node::Power(_) => true,
        Node::ExpPower { c, q } => *q >= 0.0 || c.re >= 0.0,
        Node::Scale(k, g) => *k != Complex64::new(0.0, 0.0) && tempered_below(g),
        Node::Product(v) => v.iter().all(tempered_below),
        _ => false,
    }
}

/// Symbolic flatness classification; never contradicts [`is_flat`] on the
/// decided cases.
pub fn analytic_flatness(f: &FunctionExpr) -> Flatness {
    use Flatness::*;
    match f.node() {
        Node::Const(c) => {
            if c.norm() == 0.0 {
                Flat
            } else {
                NotFlat
            }
        }
        Node::Power(_) => NotFlat,
        Node::ExpPower { c, q } => {
            if *q < 0.0 && c.re < 0.0 {
                Flat
            } else {
                // Re c >= 0 with q < 0 keeps |f| >= 1; q > 0 tends to 1.
                NotFlat
            }
        }
        Node::Scale(k, g) => {
            if k.norm() == 0.0 {
                Flat
            } else {
                analytic_flatness(g)
            }
        }
        Node::Sum(terms) => {
            let verdicts: Vec<Flatness> = terms.iter().map(analytic_flatness).collect();
            let not_flat = verdicts.iter().filter(|v| **v == NotFlat).count();
            let flat = verdicts.iter().filter(|v| **v == Flat).count();
            if flat == verdicts.len() {
                Flat
            } else if not_flat == 1 && flat + 1 == verdicts.len() {
                NotFlat
            } else {
                Unknown
            }
        }
        Node::Product(factors) => {
            for (i, fi) in factors.iter().enumerate() {
                if analytic_flatness(fi) == Flat
                    && factors
                        .iter()
                        .enumerate()
                        .all(|(k, g)| k == i || analytic_multiplier(g) == Some(true))
                {
                    return Flat;
                }
            }
            if tempered_below(f) {
                NotFlat
            } else {
                Unknown
            }
        }
        Node::WeightedVolterra { c, q, child } => {
            if (*q >= 0.0 || c.re >= 0.0) && analytic_flatness(child) == Flat {
                Flat
            } else {
                Unknown
            }
        }
        Node::VolterraInt(child)
        | Node::PowerWeightedVolterra { child, .. }
        | Node::Deriv(_, child) => {
            if analytic_flatness(child) == Flat {
                Flat
            } else {
                Unknown
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatfn::grid::flatness_samples;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn e(cc: f64) -> FunctionExpr {
        FunctionExpr::exp_power(c(cc), -1.0)
    }

    #[test]
    fn exp_minus_inverse_is_flat() {
        assert!(is_flat_default(&e(-1.0)).unwrap().flat);
    }

    #[test]
    fn square_is_not_flat() {
        let r = is_flat_default(&FunctionExpr::power(2.0)).unwrap();
        assert!(!r.flat);
        assert!(r.failures.contains(&(0, 3)));
        // x^2 / x^2 = 1 already fails to decay.
        assert_eq!(r.first_failure(), Some((0, 2)));
    }

    #[test]
    fn negative_power_times_flat_is_flat() {
        let f = FunctionExpr::power(-7.0) * e(-1.0);
        assert!(is_flat_default(&f).unwrap().flat);
        assert_eq!(analytic_flatness(&f), Flatness::Flat);
    }

    #[test]
    fn analytic_rules() {
        assert_eq!(analytic_flatness(&e(-2.0)), Flatness::Flat);
        assert_eq!(analytic_flatness(&e(1.0)), Flatness::NotFlat);
        assert_eq!(analytic_flatness(&FunctionExpr::power(3.0)), Flatness::NotFlat);
        let osc = FunctionExpr::exp_power(Complex64::new(0.0, 1.0), -1.0);
        assert_eq!(analytic_flatness(&osc), Flatness::NotFlat);
        assert!(!is_flat_default(&osc).unwrap().flat);
        let mixed = FunctionExpr::power(2.0) + e(-1.0);
        assert_eq!(analytic_flatness(&mixed), Flatness::NotFlat);
        assert_eq!(
            analytic_flatness(&FunctionExpr::volterra(e(-1.0))),
            Flatness::Flat
        );
    }

    #[test]
    fn seminorm_examples() {
        let g = Grid::default_grid();
        assert_eq!(seminorm(&FunctionExpr::real(3.0), 4, &g).unwrap(), 3.0);
        assert_eq!(seminorm(&FunctionExpr::x(), 1, &g).unwrap(), 1.0);
        // e^{-1/x}(x^{-4} - 2x^{-3}) peaks inside (0, 1); compare with a fine scan
        // restricted to the grid.
        let closed = |x: f64| {
            let v = (-1.0 / x).exp();
            [v, v / (x * x), v * (x.powi(-4) - 2.0 * x.powi(-3))]
                .iter()
                .fold(0.0f64, |m, a| m.max(a.abs()))
        };
        let expected = g.points().iter().fold(0.0f64, |m, &x| m.max(closed(x)));
        let got = seminorm(&e(-1.0), 2, &g).unwrap();
        assert!((got - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn profiles_are_monotone() {
        let p = seminorm_profile(&e(-1.0), 6, &Grid::default_grid()).unwrap();
        assert!(p.values().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(is_flat(&e(-1.0), 2, 2, &[0.5, 0.25]).is_err());
        let mut xs = flatness_samples();
        xs.reverse();
        assert!(is_flat(&e(-1.0), 2, 2, &xs).is_err());
    }
}
