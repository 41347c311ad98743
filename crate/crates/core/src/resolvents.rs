//! Explicit resolvents `R(λ, T) = (λI - T)^{-1}` of the operator families,
//! built from weighted Volterra nodes, and residual checks of the identities
//! `(λI - T) R g = g` and `R (λI - T) g = g`.
//!
//! Every outer derivative is a `Deriv` node over an integral node, so it is
//! evaluated through the first-order ODE of that node rather than by
//! differentiating a quadrature result.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flatfn::{Evaluator, FunctionExpr, Grid, Node};
use crate::multipliers::{is_invertible_multiplier, Invertibility, RegionDescriptor, Side};
use crate::operators::{apply_with, ApplyOptions, Family, FamilyKind, OperatorSpec, QuadratureConfig};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Quadrature used by residual checks; tighter than the default because the
/// identities are checked after cancellation.
pub fn residual_quadrature() -> QuadratureConfig {
    QuadratureConfig::default().with_rel_tol(1e-12)
}

/// `R(λ, C) g = D ĝ` with `ĝ = λ^{-1} x^{1/λ} ∫_0^x t^{-1/λ} g(t) dt`.
pub fn resolvent_cesaro(lambda: Complex64, g: &FunctionExpr) -> Result<FunctionExpr> {
    if lambda == c(0.0) {
        return Err(Error::domain(
            "the Cesàro kernel needs λ ≠ 0; 0 lies in the Waelbroeck spectrum",
        ));
    }
    let inv = lambda.inv();
    let ghat = FunctionExpr::scale(inv, FunctionExpr::power_weighted_volterra(inv, g.clone()));
    Ok(FunctionExpr::deriv_node(1, ghat))
}

/// `ĝ = λ^{-1} ∫_0^x e^{(x^{p+1} - t^{p+1}) / (λ(p+1))} g(t) dt`, shared by
/// both `M_{x^p} V` regimes.
fn mv_kernel(lambda: Complex64, p: f64, g: &FunctionExpr) -> FunctionExpr {
    let q = p + 1.0;
    let cc = (lambda * q).inv();
    FunctionExpr::scale(lambda.inv(), FunctionExpr::weighted_volterra(cc, q, g.clone()))
}

/// `R(λ, M_{x^p} V)` for `p > -1`, `λ ≠ 0`.
pub fn resolvent_mv(lambda: Complex64, p: f64, g: &FunctionExpr) -> Result<FunctionExpr> {
    if !(p > -1.0) {
        return Err(Error::domain(format!("resolvent_mv needs p > -1, got {p}")));
    }
    if lambda == c(0.0) {
        return Err(Error::domain("the integral kernel needs λ ≠ 0"));
    }
    Ok(FunctionExpr::deriv_node(1, mv_kernel(lambda, p, g)))
}

/// `R(λ, M_{x^p} V)` for `p < -1`, `Re λ ≤ 0`, `λ ≠ 0`.
pub fn resolvent_mv_neg(lambda: Complex64, p: f64, g: &FunctionExpr) -> Result<FunctionExpr> {
    if !(p < -1.0) {
        return Err(Error::domain(format!("resolvent_mv_neg needs p < -1, got {p}")));
    }
    if lambda.re > 0.0 {
        return Err(Error::domain(format!(
            "λ = {lambda} has Re λ > 0 and is an eigenvalue of M_x^{p} V"
        )));
    }
    if lambda == c(0.0) {
        return Err(Error::domain("the integral kernel needs λ ≠ 0"));
    }
    Ok(FunctionExpr::deriv_node(1, mv_kernel(lambda, p, g)))
}

/// `R(λ, M_{x^p} D) f = -∫_0^x e^{λ(x^{1-p} - t^{1-p})/(1-p)} t^{-p} f(t) dt`,
/// and `-∫_0^x (x/t)^λ t^{-1} f(t) dt` for `p = 1`.
///
/// Valid for every `λ` when `p ≤ 1`, and for `Re λ ≤ 0` when `p > 1`.
pub fn resolvent_md(lambda: Complex64, p: f64, g: &FunctionExpr) -> Result<FunctionExpr> {
    if p > 1.0 && lambda.re > 0.0 {
        return Err(Error::domain(format!(
            "λ = {lambda} has Re λ > 0 and is an eigenvalue of M_x^{p} D"
        )));
    }
    let u = FunctionExpr::power(-p) * g.clone();
    let h = if p == 1.0 {
        FunctionExpr::power_weighted_volterra(lambda, u)
    } else {
        let q = 1.0 - p;
        FunctionExpr::weighted_volterra(lambda / q, q, u)
    };
    Ok(-h)
}

/// `1/ω` for the shapes with a closed reciprocal.
fn reciprocal(w: &FunctionExpr) -> Option<FunctionExpr> {
    match w.node() {
        Node::Const(k) if k.norm() != 0.0 => Some(FunctionExpr::constant(k.inv())),
        Node::Power(t) => Some(FunctionExpr::complex_power(-t)),
        Node::ExpPower { c, q } => Some(FunctionExpr::exp_power(-c, *q)),
        Node::Scale(k, g) if k.norm() != 0.0 => {
            reciprocal(g).map(|r| FunctionExpr::scale(k.inv(), r))
        }
        Node::Product(v) => v
            .iter()
            .map(reciprocal)
            .collect::<Option<Vec<_>>>()
            .map(FunctionExpr::product),
        _ => None,
    }
}

/// Inverse of an isomorphism `B ∈ {D, V, M_ω}`.
pub fn inverse_operator(b: &OperatorSpec) -> Result<OperatorSpec> {
    match b {
        OperatorSpec::D => Ok(OperatorSpec::V),
        OperatorSpec::V => Ok(OperatorSpec::D),
        OperatorSpec::Mult(w) => {
            match is_invertible_multiplier(w)? {
                Invertibility::Yes { .. } => {}
                Invertibility::No(reason) => {
                    return Err(Error::domain(format!("M_{w} is not invertible ({reason:?})")))
                }
            }
            reciprocal(w)
                .map(OperatorSpec::Mult)
                .ok_or_else(|| Error::domain(format!("no closed reciprocal for {w}")))
        }
        _ => Err(Error::domain("conjugation needs B ∈ {D, V, M_ω}")),
    }
}

/// `R(λ, BA) g = B R(λ, AB) B^{-1} g`.
pub fn conjugated_resolvent(
    b: &OperatorSpec,
    r_ab: &dyn Fn(&FunctionExpr) -> Result<FunctionExpr>,
    g: &FunctionExpr,
) -> Result<FunctionExpr> {
    let b_inv = inverse_operator(b)?;
    let opts = ApplyOptions::default();
    let inner = apply_with(&b_inv, g, opts)?;
    apply_with(b, &r_ab(&inner)?, opts)
}

/// Point spectrum = spectrum of each family, as a function of `p`.
pub fn family_spectrum(family: &Family) -> RegionDescriptor {
    let p = family.p;
    match family.kind {
        FamilyKind::Cesaro => RegionDescriptor::Empty,
        FamilyKind::MV | FamilyKind::VM => {
            if p >= -1.0 {
                RegionDescriptor::Empty
            } else {
                RegionDescriptor::half_plane(Side::Greater, 0.0)
            }
        }
        FamilyKind::MD | FamilyKind::DM => {
            if p <= 1.0 {
                RegionDescriptor::Empty
            } else {
                RegionDescriptor::half_plane(Side::Greater, 0.0)
            }
        }
        FamilyKind::SchwartzD | FamilyKind::SchwartzI => {
            RegionDescriptor::half_plane(Side::Less, 0.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Cesaro,
    MvKernel,
    MdKernel,
    VmConjugate,
    DmConjugate,
    /// `R(0, T) = -T^{-1}`.
    NegInverse,
    /// `R(λ, -S) = -R(-λ, S)` for the transferred `[1, ∞)` operators.
    Reflected,
}

/// Resolvent of a family at a fixed `λ` in its resolvent set.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventRecipe {
    pub family: Family,
    pub lambda: Complex64,
    /// The spectrum; the recipe exists exactly off this set.
    pub spectrum: RegionDescriptor,
    route: Route,
}

impl ResolventRecipe {
    pub fn new(family: Family, lambda: Complex64) -> Result<Self> {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::domain("λ must be finite"));
        }
        let spectrum = family_spectrum(&family);
        if spectrum.contains(lambda) {
            return Err(Error::precondition(format!(
                "λ = {lambda} lies in the spectrum {spectrum} of {family}"
            )));
        }
        let zero = lambda == c(0.0);
        let route = match family.kind {
            FamilyKind::SchwartzD | FamilyKind::SchwartzI => Route::Reflected,
            FamilyKind::MD => Route::MdKernel,
            FamilyKind::DM => Route::DmConjugate,
            _ if zero => Route::NegInverse,
            FamilyKind::Cesaro => Route::Cesaro,
            FamilyKind::MV if family.p == -1.0 => Route::Cesaro,
            FamilyKind::MV => Route::MvKernel,
            FamilyKind::VM => Route::VmConjugate,
        };
        Ok(ResolventRecipe {
            family,
            lambda,
            spectrum,
            route,
        })
    }

    /// Name of the formula used: `cesaro`, `mv-kernel`, `md-kernel`,
    /// `vm-conjugate`, `dm-conjugate`, `neg-inverse` or `reflected`.
    pub fn route_name(&self) -> &'static str {
        match self.route {
            Route::Cesaro => "cesaro",
            Route::MvKernel => "mv-kernel",
            Route::MdKernel => "md-kernel",
            Route::VmConjugate => "vm-conjugate",
            Route::DmConjugate => "dm-conjugate",
            Route::NegInverse => "neg-inverse",
            Route::Reflected => "reflected",
        }
    }

    /// The operator whose resolvent this is.
    pub fn operator(&self) -> OperatorSpec {
        OperatorSpec::Family(self.family)
    }

    /// `R(λ, T) g`.
    pub fn apply(&self, g: &FunctionExpr) -> Result<FunctionExpr> {
        let (l, p) = (self.lambda, self.family.p);
        match self.route {
            Route::Cesaro => resolvent_cesaro(l, g),
            Route::MvKernel => {
                if p > -1.0 {
                    resolvent_mv(l, p, g)
                } else {
                    resolvent_mv_neg(l, p, g)
                }
            }
            Route::MdKernel => resolvent_md(l, p, g),
            Route::VmConjugate => {
                let mv = ResolventRecipe::new(Family::mv(p), l)?;
                conjugated_resolvent(&OperatorSpec::V, &|h| mv.apply(h), g)
            }
            Route::DmConjugate => {
                conjugated_resolvent(&OperatorSpec::D, &|h| resolvent_md(l, p, h), g)
            }
            Route::NegInverse => {
                // T^{-1} for T = M_{x^p} V is D M_{x^{-p}}, for V M_{x^p} it is M_{x^{-p}} D.
                let inv = match self.family.kind {
                    FamilyKind::VM => {
                        OperatorSpec::compose(OperatorSpec::power_mult(-p), OperatorSpec::D)
                    }
                    _ => OperatorSpec::compose(OperatorSpec::D, OperatorSpec::power_mult(-p)),
                };
                Ok(-apply_with(&inv, g, ApplyOptions::default())?)
            }
            Route::Reflected => {
                let base = match self.family.kind {
                    FamilyKind::SchwartzD => Family::md(2.0),
                    _ => Family::vm(-2.0),
                };
                Ok(-ResolventRecipe::new(base, -l)?.apply(g)?)
            }
        }
    }
}

/// `R(λ, T) g` for a family.
pub fn resolvent(family: Family, lambda: Complex64, g: &FunctionExpr) -> Result<FunctionExpr> {
    ResolventRecipe::new(family, lambda)?.apply(g)
}

/// `(λI - T) f` with quadrature-backed `V`.
pub fn shifted_operator(
    op: &OperatorSpec,
    lambda: Complex64,
    f: &FunctionExpr,
    opts: ApplyOptions,
) -> Result<FunctionExpr> {
    Ok(FunctionExpr::scale(lambda, f.clone()) - apply_with(op, f, opts)?)
}

fn max_scaled_error(
    ev: &Evaluator,
    lhs: &FunctionExpr,
    g: &FunctionExpr,
    grid: &Grid,
) -> f64 {
    let mut worst = 0.0f64;
    for &x in grid.points() {
        match (ev.eval(lhs, x), ev.eval(g, x)) {
            (Ok(a), Ok(b)) => {
                let e = (a - b).norm() / (1.0 + b.norm());
                worst = if e.is_nan() { f64::INFINITY } else { worst.max(e) };
            }
            _ => return f64::INFINITY,
        }
    }
    worst
}

/// `max_x |(λI - T)(R g)(x) - g(x)| / (1 + |g(x)|)` for an arbitrary
/// operator and resolvent transformer; `T` is applied without closed forms.
pub fn residual_of(
    ev: &Evaluator,
    op: &OperatorSpec,
    lambda: Complex64,
    r: &dyn Fn(&FunctionExpr) -> Result<FunctionExpr>,
    g: &FunctionExpr,
    grid: &Grid,
) -> Result<f64> {
    let rg = r(g)?;
    let lhs = match shifted_operator(op, lambda, &rg, ApplyOptions::quadrature_only()) {
        Ok(e) => e,
        Err(e) if e.is_numeric() => return Ok(f64::INFINITY),
        Err(e) => return Err(e),
    };
    Ok(max_scaled_error(ev, &lhs, g, grid))
}

/// Right-inverse residual of a family's recipe. Errors when `λ` is outside
/// the recipe's validity region; numeric failures give `∞`.
pub fn residual(family: Family, lambda: Complex64, g: &FunctionExpr, grid: &Grid) -> Result<f64> {
    residual_with(&Evaluator::new(residual_quadrature()), family, lambda, g, grid)
}

pub fn residual_with(
    ev: &Evaluator,
    family: Family,
    lambda: Complex64,
    g: &FunctionExpr,
    grid: &Grid,
) -> Result<f64> {
    let recipe = ResolventRecipe::new(family, lambda)?;
    residual_of(ev, &recipe.operator(), lambda, &|h| recipe.apply(h), g, grid)
}

/// Left-inverse residual `max_x |R((λI - T) g)(x) - g(x)| / (1 + |g(x)|)`.
pub fn left_residual(family: Family, lambda: Complex64, g: &FunctionExpr, grid: &Grid) -> Result<f64> {
    left_residual_with(&Evaluator::new(residual_quadrature()), family, lambda, g, grid)
}

pub fn left_residual_with(
    ev: &Evaluator,
    family: Family,
    lambda: Complex64,
    g: &FunctionExpr,
    grid: &Grid,
) -> Result<f64> {
    let recipe = ResolventRecipe::new(family, lambda)?;
    let shifted = shifted_operator(&recipe.operator(), lambda, g, ApplyOptions::default())?;
    let back = recipe.apply(&shifted)?;
    Ok(max_scaled_error(ev, &back, g, grid))
}

/// `λ^{-1} ∫_0^1 t^{-1/λ} f(t) dt`, the value at 1 of the Cesàro kernel.
pub fn delta1_functional(lambda: Complex64, f: &FunctionExpr) -> Result<Complex64> {
    if lambda == c(0.0) {
        return Err(Error::domain("δ₁ functional needs λ ≠ 0"));
    }
    let inv = lambda.inv();
    let ghat = FunctionExpr::scale(inv, FunctionExpr::power_weighted_volterra(inv, f.clone()));
    Evaluator::new(residual_quadrature()).eval(&ghat, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatfn::corpus;

    fn grid() -> Grid {
        Grid::residual_grid()
    }

    fn ci(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cesaro_residuals() {
        let g = corpus::powerflat(-2.0);
        for l in [c(1.0), c(-1.0), c(2.0), ci(0.3, -0.8)] {
            let r = residual(Family::cesaro(), l, &g, &grid()).unwrap();
            assert!(r <= 1e-8, "λ={l} residual {r}");
        }
        assert!(resolvent_cesaro(c(0.0), &g).is_err());
        assert!(resolvent_cesaro(c(2.0), &FunctionExpr::zero()).unwrap().is_zero());
    }

    #[test]
    fn mv_residuals() {
        let g = corpus::powerflat(-1.0);
        for (p, l) in [(0.0, c(1.0)), (0.5, ci(0.0, 1.0)), (1.0, ci(-1.0, 2.0))] {
            let r = residual(Family::mv(p), l, &g, &grid()).unwrap();
            assert!(r <= 1e-8, "p={p} λ={l} residual {r}");
        }
        assert!(resolvent_mv(c(1.0), 0.0, &FunctionExpr::zero()).unwrap().is_zero());
    }

    #[test]
    fn mv_negative_p() {
        let g = corpus::powerflat(-1.0);
        let r = residual(Family::mv(-2.0), c(-1.0), &g, &grid()).unwrap();
        assert!(r <= 1e-8, "{r}");
        let r = residual(Family::mv(-2.0), ci(0.0, 1.0), &g, &grid()).unwrap();
        assert!(r <= 1e-6, "{r}");
        assert!(resolvent_mv_neg(c(1.0), -2.0, &g).is_err());
        assert!(matches!(
            residual(Family::mv(-2.0), c(0.5), &g, &grid()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn md_residuals() {
        let g = corpus::powerflat(-1.0);
        for (p, l) in [(0.0, c(0.0)), (1.0, c(2.0)), (0.5, ci(-3.0, 2.0)), (2.0, c(-1.0))] {
            let r = residual(Family::md(p), l, &g, &grid()).unwrap();
            assert!(r <= 1e-8, "p={p} λ={l} residual {r}");
            let r = left_residual(Family::md(p), l, &g, &grid()).unwrap();
            assert!(r <= 1e-8, "left p={p} λ={l} residual {r}");
        }
    }

    #[test]
    fn md_at_zero_is_minus_volterra() {
        let g = corpus::powerflat(-2.0);
        let r = resolvent_md(c(0.0), 0.0, &g).unwrap();
        let ev = Evaluator::default();
        for x in [0.2, 0.9] {
            let expected = -(-1.0 / x as f64).exp();
            assert!((ev.eval(&r, x).unwrap().re - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn conjugated_families() {
        let g = corpus::powerflat(-1.0);
        let r = residual(Family::vm(0.0), c(1.0), &g, &grid()).unwrap();
        assert!(r <= 1e-8, "{r}");
        let r = residual(Family::dm(0.5), ci(1.0, 1.0), &g, &grid()).unwrap();
        assert!(r <= 1e-8, "{r}");
        // Identity conjugation gives back the inner resolvent.
        let mv = ResolventRecipe::new(Family::mv(0.0), c(1.0)).unwrap();
        let direct = mv.apply(&g).unwrap();
        let conj =
            conjugated_resolvent(&OperatorSpec::power_mult(0.0), &|h| mv.apply(h), &g).unwrap();
        let ev = Evaluator::default();
        for x in [0.1, 0.5, 1.0] {
            let (a, b) = (ev.eval(&direct, x).unwrap(), ev.eval(&conj, x).unwrap());
            assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
        }
        assert!(inverse_operator(&OperatorSpec::Mult(FunctionExpr::x() - FunctionExpr::real(0.5))).is_err());
    }

    #[test]
    fn zero_lambda_routes_through_inverse() {
        let g = corpus::powerflat(-1.0);
        for fam in [Family::cesaro(), Family::mv(0.5), Family::vm(-2.0), Family::mv(-3.0)] {
            let r = residual(fam, c(0.0), &g, &grid()).unwrap();
            assert!(r <= 1e-8, "{fam}: {r}");
        }
    }

    #[test]
    fn schwartz_families() {
        let g = corpus::powerflat(-1.0);
        for fam in [Family::schwartz_d(), Family::schwartz_i()] {
            for l in [c(1.0), ci(0.5, -2.0), c(0.0)] {
                let r = residual(fam, l, &g, &grid()).unwrap();
                assert!(r <= 1e-8, "{fam} λ={l}: {r}");
            }
            assert!(ResolventRecipe::new(fam, c(-1.0)).is_err());
        }
    }

    #[test]
    fn zero_input_gives_zero_residual() {
        for fam in [Family::cesaro(), Family::mv(0.0), Family::md(0.5), Family::vm(1.0)] {
            assert_eq!(residual(fam, c(1.5), &FunctionExpr::zero(), &grid()).unwrap(), 0.0);
        }
    }

    #[test]
    fn delta_functional_on_bump() {
        let f = corpus::flatbump();
        for k in [2.0, 5.0] {
            let v = delta1_functional(c(1.0 / k), &f).unwrap();
            assert!(v.re >= k - 1e-6, "{v}");
        }
    }
}
