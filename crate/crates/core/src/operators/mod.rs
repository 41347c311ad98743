//! Differentiation, Volterra integration, multiplication and the composite
//! families built from them, acting on [`FunctionExpr`] values.

pub mod quadrature;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flatfn::{analytic_flatness, Evaluator, Flatness, FunctionExpr, Grid, Node};
use crate::multipliers::{analytic_multiplier, is_multiplier, MultiplierStatus};

pub use quadrature::{integrate, quadrature, QuadratureConfig, QuadratureResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `M_{x^{-1}} V`.
    Cesaro,
    /// `M_{x^p} V`.
    MV,
    /// `V M_{x^p}`.
    VM,
    /// `M_{x^p} D`.
    MD,
    /// `D M_{x^p}`.
    DM,
    /// Differentiation on `[1, ∞)` carried to `(0, 1]`: `-M_{x^2} D`.
    SchwartzD,
    /// Its inverse `f ↦ -∫_x^∞ f` on `[1, ∞)`, carried over: `-V M_{x^{-2}}`.
    SchwartzI,
}

/// A named family with its parameter; `p` is ignored where it is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Family {
    pub kind: FamilyKind,
    pub p: f64,
}

impl Family {
    pub fn new(kind: FamilyKind, p: f64) -> Self {
        let p = match kind {
            FamilyKind::Cesaro => -1.0,
            FamilyKind::SchwartzD => 2.0,
            FamilyKind::SchwartzI => -2.0,
            _ => p,
        };
        Family { kind, p }
    }

    pub fn cesaro() -> Self {
        Self::new(FamilyKind::Cesaro, -1.0)
    }

    pub fn mv(p: f64) -> Self {
        Self::new(FamilyKind::MV, p)
    }

    pub fn vm(p: f64) -> Self {
        Self::new(FamilyKind::VM, p)
    }

    pub fn md(p: f64) -> Self {
        Self::new(FamilyKind::MD, p)
    }

    pub fn dm(p: f64) -> Self {
        Self::new(FamilyKind::DM, p)
    }

    pub fn schwartz_d() -> Self {
        Self::new(FamilyKind::SchwartzD, 2.0)
    }

    pub fn schwartz_i() -> Self {
        Self::new(FamilyKind::SchwartzI, -2.0)
    }

    /// Canonical expansion into `D`, `V` and multiplications.
    pub fn expand(&self) -> OperatorSpec {
        use OperatorSpec::*;
        let mult = |p: f64| Mult(FunctionExpr::power(p));
        match self.kind {
            FamilyKind::Cesaro => OperatorSpec::compose(mult(-1.0), V),
            FamilyKind::MV => OperatorSpec::compose(mult(self.p), V),
            FamilyKind::VM => OperatorSpec::compose(V, mult(self.p)),
            FamilyKind::MD => OperatorSpec::compose(mult(self.p), D),
            FamilyKind::DM => OperatorSpec::compose(D, mult(self.p)),
            FamilyKind::SchwartzD => {
                OperatorSpec::compose(Mult(-FunctionExpr::power(2.0)), D)
            }
            FamilyKind::SchwartzI => {
                OperatorSpec::compose(V, Mult(-FunctionExpr::power(-2.0)))
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FamilyKind::Cesaro => write!(f, "cesaro"),
            FamilyKind::MV => write!(f, "mv:{}", self.p),
            FamilyKind::VM => write!(f, "vm:{}", self.p),
            FamilyKind::MD => write!(f, "md:{}", self.p),
            FamilyKind::DM => write!(f, "dm:{}", self.p),
            FamilyKind::SchwartzD => write!(f, "schwartzd"),
            FamilyKind::SchwartzI => write!(f, "schwartzi"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Parses `cesaro`, `schwartzd`, `schwartzi`, or `mv:p`, `vm:p`, `md:p`, `dm:p`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, p) = match s.split_once(':') {
            Some((n, p)) => {
                let p: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::domain(format!("bad family parameter in {s:?}")))?;
                if !p.is_finite() {
                    return Err(Error::domain(format!("non-finite parameter in {s:?}")));
                }
                (n.trim().to_string(), Some(p))
            }
            None => (s.clone(), None),
        };
        let need = |p: Option<f64>| {
            p.ok_or_else(|| Error::domain(format!("family {name:?} needs a parameter, e.g. {name}:2")))
        };
        Ok(match name.as_str() {
            "cesaro" => Family::cesaro(),
            "schwartzd" => Family::schwartz_d(),
            "schwartzi" => Family::schwartz_i(),
            "mv" => Family::mv(need(p)?),
            "vm" => Family::vm(need(p)?),
            "md" => Family::md(need(p)?),
            "dm" => Family::dm(need(p)?),
            _ => return Err(Error::domain(format!("unknown operator family {name:?}"))),
        })
    }
}

/// Description of an operator on the flat space.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    D,
    V,
    Mult(FunctionExpr),
    /// `outer ∘ inner`.
    Compose(Box<OperatorSpec>, Box<OperatorSpec>),
    Family(Family),
}

impl OperatorSpec {
    pub fn compose(outer: OperatorSpec, inner: OperatorSpec) -> Self {
        OperatorSpec::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn power_mult(p: f64) -> Self {
        OperatorSpec::Mult(FunctionExpr::power(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApplyOptions {
    /// Replace `V` by closed-form antiderivatives where one is known.
    pub closed_forms: bool,
}

impl Default for ApplyOptions {
    fn default() -> Self {
        ApplyOptions { closed_forms: true }
    }
}

impl ApplyOptions {
    /// Every `V` becomes a quadrature node.
    pub fn quadrature_only() -> Self {
        ApplyOptions { closed_forms: false }
    }
}

/// `op(f)` with closed forms enabled.
pub fn apply(op: &OperatorSpec, f: &FunctionExpr) -> Result<FunctionExpr> {
    apply_with(op, f, ApplyOptions::default())
}

pub fn apply_with(op: &OperatorSpec, f: &FunctionExpr, opts: ApplyOptions) -> Result<FunctionExpr> {
    match op {
        OperatorSpec::D => Ok(f.deriv1()),
        OperatorSpec::V => Ok(if opts.closed_forms {
            volterra_closed(f)
        } else {
            FunctionExpr::volterra(f.clone())
        }),
        OperatorSpec::Mult(w) => {
            check_multiplier(w)?;
            Ok(w.clone() * f.clone())
        }
        OperatorSpec::Compose(outer, inner) => {
            let g = apply_with(inner, f, opts)?;
            apply_with(outer, &g, opts)
        }
        OperatorSpec::Family(fam) => apply_with(&fam.expand(), f, opts),
    }
}

fn check_multiplier(w: &FunctionExpr) -> Result<()> {
    let rejected = match analytic_multiplier(w) {
        Some(ok) => !ok,
        None => matches!(is_multiplier(w), MultiplierStatus::No(_)),
    };
    if rejected {
        Err(Error::domain(format!("{w} is not a multiplier")))
    } else {
        Ok(())
    }
}

/// `(k, t, c, q)` for `f = k x^t e^{c x^q}`; `c = 0` means no exponential.
fn monomial_exp(f: &FunctionExpr) -> Option<(Complex64, Complex64, Complex64, f64)> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (k, body) = match f.node() {
        Node::Scale(k, g) => (*k, g.clone()),
        _ => (one, f.clone()),
    };
    match body.node() {
        Node::Const(c) => Some((k * c, zero, zero, 0.0)),
        Node::Power(t) => Some((k, *t, zero, 0.0)),
        Node::ExpPower { c, q } => Some((k, zero, *c, *q)),
        Node::Product(v) if v.len() == 2 => match (v[0].node(), v[1].node()) {
            (Node::Power(t), Node::ExpPower { c, q }) | (Node::ExpPower { c, q }, Node::Power(t)) => {
                Some((k, *t, *c, *q))
            }
            _ => None,
        },
        _ => None,
    }
}

/// `V f`, using elementary antiderivatives where available.
pub fn volterra_closed(f: &FunctionExpr) -> FunctionExpr {
    match f.node() {
        Node::Sum(terms) => return FunctionExpr::sum(terms.iter().map(volterra_closed).collect()),
        Node::Scale(k, g) if !matches!(g.node(), Node::Power(_) | Node::Product(_) | Node::ExpPower { .. }) => {
            return FunctionExpr::scale(*k, volterra_closed(g))
        }
        Node::Deriv(k, g) if analytic_flatness(g) == Flatness::Flat => {
            return FunctionExpr::deriv_node(k - 1, g.clone())
        }
        _ => {}
    }
    if let Some((k, t, c, q)) = monomial_exp(f) {
        if c.norm() == 0.0 && t.re > -1.0 {
            // ∫_0^x k s^t ds
            return FunctionExpr::scale(k / (t + 1.0), FunctionExpr::complex_power(t + 1.0));
        }
        if c.norm() != 0.0 && t == Complex64::new(q - 1.0, 0.0) {
            let e = FunctionExpr::exp_power(c, q);
            let s = k / (c * q);
            if q < 0.0 && c.re < 0.0 {
                return FunctionExpr::scale(s, e);
            }
            if q > 0.0 {
                return FunctionExpr::scale(s, e - FunctionExpr::one());
            }
        }
    }
    FunctionExpr::volterra(f.clone())
}

/// Result of checking `DV = id` and `VD = id` on a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct InversePairReport {
    /// `(name, max rel. error of DVf - f, max rel. error of VDf - f)`.
    pub rows: Vec<(String, f64, f64)>,
    pub dv_max: f64,
    pub vd_max: f64,
    pub tol: f64,
}

impl InversePairReport {
    pub fn pass(&self) -> bool {
        self.dv_max <= self.tol && self.vd_max <= self.tol
    }
}

/// Values below this are treated as zero when forming relative errors.
pub const RELATIVE_FLOOR: f64 = 1e-290;

/// `|a - b| / |b|`, with both treated as zero below [`RELATIVE_FLOOR`].
pub fn relative_error(a: Complex64, b: Complex64) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na < RELATIVE_FLOOR && nb < RELATIVE_FLOOR {
        return 0.0;
    }
    (a - b).norm() / nb.max(RELATIVE_FLOOR)
}

pub const INVERSE_PAIR_TOL: f64 = 1e-8;

/// Checks `D V f = f` and `V D f = f` pointwise with quadrature-backed `V`.
pub fn verify_inverse_pair(corpus: &[(String, FunctionExpr)], grid: &Grid) -> InversePairReport {
    let ev = Evaluator::default();
    let opts = ApplyOptions::quadrature_only();
    let mut rows = Vec::with_capacity(corpus.len());
    for (name, f) in corpus {
        let dv = apply_with(&OperatorSpec::D, &FunctionExpr::volterra(f.clone()), opts);
        let vd = apply_with(&OperatorSpec::V, &f.deriv1(), opts);
        let mut worst = (0.0f64, 0.0f64);
        for &x in grid.points() {
            let err = |g: &Result<FunctionExpr>| -> f64 {
                let Ok(g) = g else { return f64::INFINITY };
                match (ev.eval(g, x), ev.eval(f, x)) {
                    (Ok(a), Ok(b)) => relative_error(a, b),
                    _ => f64::INFINITY,
                }
            };
            worst.0 = worst.0.max(err(&dv));
            worst.1 = worst.1.max(err(&vd));
        }
        rows.push((name.clone(), worst.0, worst.1));
    }
    InversePairReport {
        dv_max: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        vd_max: rows.iter().map(|r| r.2).fold(0.0, f64::max),
        rows,
        tol: INVERSE_PAIR_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatfn::{corpus, eval};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn family_parsing_round_trips() {
        for s in ["cesaro", "mv:-2", "vm:0.5", "md:2", "dm:3", "schwartzd", "schwartzi"] {
            let f: Family = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("mv".parse::<Family>().is_err());
        assert!("xx:1".parse::<Family>().is_err());
        assert!("md:abc".parse::<Family>().is_err());
    }

    #[test]
    fn dv_is_identity() {
        let g = corpus::powerflat(-3.0);
        let dv = apply(&OperatorSpec::D, &apply(&OperatorSpec::V, &g).unwrap()).unwrap();
        for x in Grid::default_grid().points() {
            let (a, b) = (eval(&dv, *x).unwrap(), eval(&g, *x).unwrap());
            assert!(relative_error(a, b) < 1e-12);
        }
    }

    #[test]
    fn closed_form_antiderivatives() {
        // x^{-2} e^{-1/x} integrates to e^{-1/x}.
        let g = corpus::powerflat(-2.0);
        assert_eq!(volterra_closed(&g), corpus::expm1overx());
        assert_eq!(
            volterra_closed(&FunctionExpr::power(2.0)),
            FunctionExpr::scale(c(1.0 / 3.0), FunctionExpr::power(3.0))
        );
        // 2x e^{x^2} integrates to e^{x^2} - 1.
        let h = FunctionExpr::scale(c(2.0), FunctionExpr::x() * FunctionExpr::exp_power(c(1.0), 2.0));
        let v = volterra_closed(&h);
        let expected = (0.7f64 * 0.7).exp() - 1.0;
        assert!((eval(&v, 0.7).unwrap().re - expected).abs() < 1e-14);
        assert!(matches!(
            volterra_closed(&corpus::expm1overx()).node(),
            Node::VolterraInt(_)
        ));
    }

    #[test]
    fn cesaro_of_bump() {
        let g = corpus::powerflat(-2.0);
        let cg = apply_with(&OperatorSpec::Family(Family::cesaro()), &g, ApplyOptions::quadrature_only())
            .unwrap();
        for x in [0.1, 0.4, 1.0] {
            let expected = (-1.0 / x as f64).exp() / x;
            assert!(relative_error(eval(&cg, x).unwrap(), c(expected)) < 1e-9);
        }
    }

    #[test]
    fn identity_multiplication() {
        let f = corpus::expm1overx();
        assert_eq!(apply(&OperatorSpec::power_mult(0.0), &f).unwrap(), f);
    }

    #[test]
    fn rejects_non_multipliers() {
        let w = FunctionExpr::exp_power(c(1.0), -1.0);
        assert!(apply(&OperatorSpec::Mult(w), &corpus::expm1overx()).is_err());
    }

    #[test]
    fn family_expansion_consistency() {
        let f = corpus::powerflat(-1.0);
        let p = 1.5;
        let a = apply(&OperatorSpec::Family(Family::mv(p)), &f).unwrap();
        let b = FunctionExpr::power(p) * apply(&OperatorSpec::V, &f).unwrap();
        for x in [0.05, 0.3, 1.0] {
            assert!(relative_error(eval(&a, x).unwrap(), eval(&b, x).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn inverse_pair_examples() {
        let grid = Grid::default_grid();
        let one = |n: &str, f| vec![(n.to_string(), f)];
        assert!(verify_inverse_pair(&one("e", corpus::expm1overx()), &grid).pass());
        assert!(verify_inverse_pair(&one("p", corpus::powerflat(-3.0)), &grid).pass());
        // VD x^2 = x^2 as well: passing does not certify flatness.
        let r = verify_inverse_pair(&one("sq", FunctionExpr::power(2.0)), &grid);
        assert!(r.vd_max < 1e-8);
    }
}
