//! Spectrum tables for the operator families, eigenfunctions on the point
//! spectrum, and λ-lattice sweeps of resolvent seminorm profiles.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flatfn::{seminorm_profile_with, Evaluator, FunctionExpr, Grid, SeminormProfile};
use crate::multipliers::RegionDescriptor;
use crate::operators::{apply_with, ApplyOptions, Family, FamilyKind, OperatorSpec};
use crate::resolvents::{family_spectrum, residual_quadrature, ResolventRecipe};

/// Blow-up factor relative to the farthest point of an approach sequence.
pub const BLOW_UP_FACTOR: f64 = 1e6;
/// Number of final approach steps that must grow monotonically.
pub const BLOW_UP_WINDOW: usize = 5;
/// Pass threshold for [`eigen_residual`].
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

/// `σ`, `σ_p` and `σ*` of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub sigma: RegionDescriptor,
    pub sigma_p: RegionDescriptor,
    pub sigma_star: RegionDescriptor,
}

pub fn spectrum_table(family: &Family) -> SpectrumTable {
    let sigma = family_spectrum(family);
    let sigma_star = match (&sigma, family.kind) {
        (RegionDescriptor::Empty, FamilyKind::Cesaro | FamilyKind::MV | FamilyKind::VM) => {
            RegionDescriptor::point(Complex64::new(0.0, 0.0))
        }
        (s, _) => s.closure(),
    };
    SpectrumTable {
        sigma_p: sigma.clone(),
        sigma,
        sigma_star,
    }
}

/// The family realizing `T^{-1}`, when `T` is an isomorphism in the list.
pub fn inverse_family(family: &Family) -> Option<Family> {
    let p = family.p;
    match family.kind {
        FamilyKind::Cesaro => Some(Family::dm(1.0)),
        FamilyKind::MV => Some(Family::dm(-p)),
        FamilyKind::DM => Some(Family::mv(-p)),
        FamilyKind::VM => Some(Family::md(-p)),
        FamilyKind::MD => Some(Family::vm(-p)),
        FamilyKind::SchwartzD => Some(Family::schwartz_i()),
        FamilyKind::SchwartzI => Some(Family::schwartz_d()),
    }
}

/// `λ ∈ σ(T) ⇔ 1/λ ∈ σ(T^{-1})` and the same for `σ*`, at `λ ≠ 0`.
pub fn inverse_consistent(family: &Family, lambda: Complex64) -> Result<bool> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::domain("inverse-map consistency is stated for λ ≠ 0"));
    }
    let inv = inverse_family(family)
        .ok_or_else(|| Error::domain(format!("{family} has no listed inverse")))?;
    let (a, b) = (spectrum_table(family), spectrum_table(&inv));
    let mu = lambda.inv();
    Ok(a.sigma.contains(lambda) == b.sigma.contains(mu)
        && a.sigma_star.contains(lambda) == b.sigma_star.contains(mu))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    PointSpectrum(FunctionExpr),
    ResolventSet(ResolventRecipe),
    WaelbroeckOnly,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::PointSpectrum(_) => "PointSpectrum",
            Verdict::ResolventSet(_) => "ResolventSet",
            Verdict::WaelbroeckOnly => "WaelbroeckOnly",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumClassification {
    pub family: Family,
    pub lambda: Complex64,
    pub verdict: Verdict,
}

pub fn classify(family: Family, lambda: Complex64) -> Result<SpectrumClassification> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::domain("λ must be finite"));
    }
    let table = spectrum_table(&family);
    let verdict = if table.sigma_p.contains(lambda) {
        let f = eigenfunction(&family, lambda)
            .ok_or_else(|| Error::numeric("point spectrum without eigenfunction"))?;
        Verdict::PointSpectrum(f)
    } else if table.sigma_star.contains(lambda) {
        Verdict::WaelbroeckOnly
    } else {
        Verdict::ResolventSet(ResolventRecipe::new(family, lambda)?)
    };
    Ok(SpectrumClassification {
        family,
        lambda,
        verdict,
    })
}

/// The solution of the eigenvalue ODE for any `λ ≠ 0`, flat or not.
///
/// For `M_{x^p} V` this is `V f`, i.e. `h = exp(x^{p+1} / (λ(p+1)))`; for
/// `M_{x^p} D` it is `exp(λ x^{1-p} / (1-p))`; for `-M_{x^2} D` it is
/// `exp(λ/x)` and for `-V M_{x^{-2}}` it is `exp(1/(λx))`.
pub fn eigen_candidate(family: &Family, lambda: Complex64) -> Option<FunctionExpr> {
    if lambda == Complex64::new(0.0, 0.0) {
        return None;
    }
    let p = family.p;
    match family.kind {
        FamilyKind::Cesaro | FamilyKind::MV | FamilyKind::VM => {
            let q = p + 1.0;
            if q == 0.0 {
                Some(FunctionExpr::complex_power(lambda.inv()))
            } else {
                Some(FunctionExpr::exp_power((lambda * q).inv(), q))
            }
        }
        FamilyKind::MD | FamilyKind::DM => {
            let q = 1.0 - p;
            if q == 0.0 {
                Some(FunctionExpr::complex_power(lambda))
            } else {
                Some(FunctionExpr::exp_power(lambda / q, q))
            }
        }
        FamilyKind::SchwartzD => Some(FunctionExpr::exp_power(lambda, -1.0)),
        FamilyKind::SchwartzI => Some(FunctionExpr::exp_power(lambda.inv(), -1.0)),
    }
}

/// Eigenfunction for `λ ∈ σ_p`, `None` elsewhere.
pub fn eigenfunction(family: &Family, lambda: Complex64) -> Option<FunctionExpr> {
    if !spectrum_table(family).sigma_p.contains(lambda) {
        return None;
    }
    let h = eigen_candidate(family, lambda)?;
    let p = family.p;
    Some(match family.kind {
        // h' = x^p h / λ.
        FamilyKind::MV => FunctionExpr::scale(lambda.inv(), FunctionExpr::power(p) * h),
        // D(x^p f) = λ f for f = x^{-p} h.
        FamilyKind::DM => FunctionExpr::power(-p) * h,
        _ => h,
    })
}

/// `max_x |T f - λ f| / (1 + |λ f|)` with `V` applied by quadrature.
pub fn eigen_residual(family: &Family, lambda: Complex64, grid: &Grid) -> Result<f64> {
    let f = eigenfunction(family, lambda).ok_or_else(|| {
        Error::precondition(format!("λ = {lambda} is not an eigenvalue of {family}"))
    })?;
    let tf = apply_with(
        &OperatorSpec::Family(*family),
        &f,
        ApplyOptions::quadrature_only(),
    )?;
    let lf = FunctionExpr::scale(lambda, f);
    let ev = Evaluator::new(residual_quadrature());
    let mut worst = 0.0f64;
    for &x in grid.points() {
        let a = ev.eval(&tf, x)?;
        let b = ev.eval(&lf, x)?;
        let e = (a - b).norm() / (1.0 + b.norm());
        if !e.is_finite() {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(e);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Sweeps

/// Axis-aligned rectangle in `ℂ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

/// `n` equally spaced values from `a` to `b` inclusive; the midpoint for `n = 1`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (a + b)],
        _ => (0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

impl Rect {
    /// Lattice in row-major order: imaginary part outer, real part inner.
    pub fn lattice(&self, nre: usize, nim: usize) -> Vec<Complex64> {
        let res = linspace(self.re.0, self.re.1, nre);
        let ims = linspace(self.im.0, self.im.1, nim);
        ims.iter()
            .flat_map(|&y| res.iter().map(move |&x| Complex64::new(x, y)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepStatus {
    Ok(SeminormProfile),
    /// `λ` lies in `σ`; no resolvent exists.
    InSpectrum,
    Failed(String),
}

impl SweepStatus {
    pub fn label(&self) -> &'static str {
        match self {
            SweepStatus::Ok(_) => "ok",
            SweepStatus::InSpectrum => "spectrum",
            SweepStatus::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub lambda: Complex64,
    pub status: SweepStatus,
}

impl SweepPoint {
    pub fn profile_value(&self, n: usize) -> Option<f64> {
        match &self.status {
            SweepStatus::Ok(p) => p.get(n),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub family: Family,
    pub n: usize,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Profile values at index `n`, `None` at failure markers.
    pub fn values(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.profile_value(self.n)).collect()
    }

    pub fn max_value(&self) -> Option<f64> {
        self.values().into_iter().flatten().reduce(f64::max)
    }

    pub fn min_value(&self) -> Option<f64> {
        self.values().into_iter().flatten().reduce(f64::min)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# flatspec-csv v1")?;
        writeln!(w, "re_lambda,im_lambda,status,profile_{}", self.n)?;
        for p in &self.points {
            let v = match p.profile_value(self.n) {
                Some(v) => format!("{v:.16e}"),
                None => "nan".to_string(),
            };
            writeln!(
                w,
                "{:.16e},{:.16e},{},{}",
                p.lambda.re,
                p.lambda.im,
                p.status.label(),
                v
            )?;
        }
        Ok(())
    }
}

fn sweep_one(ev: &Evaluator, family: Family, lambda: Complex64, f: &FunctionExpr, n: usize, grid: &Grid) -> SweepPoint {
    let status = match ResolventRecipe::new(family, lambda) {
        Err(Error::Precondition(_)) => SweepStatus::InSpectrum,
        Err(e) => SweepStatus::Failed(e.to_string()),
        Ok(recipe) => match recipe
            .apply(f)
            .and_then(|rf| seminorm_profile_with(ev, &rf, n, grid))
        {
            Ok(p) if p.last().is_finite() => SweepStatus::Ok(p),
            Ok(_) => SweepStatus::Failed("non-finite profile".into()),
            Err(e) => SweepStatus::Failed(e.to_string()),
        },
    };
    SweepPoint { lambda, status }
}

/// Resolvent profiles `n ↦ ‖R(λ) f‖_n` at each given `λ`, in input order.
pub fn sweep_points(
    family: Family,
    lambdas: &[Complex64],
    f: &FunctionExpr,
    n: usize,
    grid: &Grid,
) -> SweepResult {
    let ev = Evaluator::default();
    let points = lambdas
        .par_iter()
        .map(|&l| sweep_one(&ev, family, l, f, n, grid))
        .collect();
    SweepResult { family, n, points }
}

/// Sweep over a `nre × nim` lattice of `rect` on the default grid.
pub fn waelbroeck_sweep(
    family: Family,
    rect: Rect,
    nre: usize,
    nim: usize,
    f: &FunctionExpr,
    n: usize,
) -> SweepResult {
    sweep_points(family, &rect.lattice(nre, nim), f, n, &Grid::default_grid())
}

/// `target + offset · 2^{-k}` for `k = 1..=steps`.
pub fn approach_sequence(target: Complex64, offset: Complex64, steps: usize) -> Vec<Complex64> {
    (1..=steps)
        .map(|k| target + offset * 2f64.powi(-(k as i32)))
        .collect()
}

/// Growth factor of each step over the previous one.
pub fn step_ratios(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] / w[0]).collect()
}

/// Last value above `BLOW_UP_FACTOR ×` the first, with monotone growth over
/// the final `BLOW_UP_WINDOW` steps.
pub fn blow_up_detected(values: &[f64]) -> bool {
    if values.len() < BLOW_UP_WINDOW + 1 {
        return false;
    }
    let (first, last) = (values[0], values[values.len() - 1]);
    let tail = &values[values.len() - 1 - BLOW_UP_WINDOW..];
    last > BLOW_UP_FACTOR * first && tail.windows(2).all(|w| w[1] > w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatfn::{analytic_flatness, corpus, is_flat_default, Flatness};

    fn ci(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn table_examples() {
        let v = classify(Family::cesaro(), ci(0.0, 0.0)).unwrap();
        assert_eq!(v.verdict, Verdict::WaelbroeckOnly);
        let v = classify(Family::mv(-2.0), ci(1.0, 0.0)).unwrap();
        let expected = corpus::powerflat(-2.0);
        match v.verdict {
            Verdict::PointSpectrum(f) => {
                for x in [0.1, 0.5, 1.0] {
                    let (a, b) = (crate::flatfn::eval(&f, x).unwrap(), crate::flatfn::eval(&expected, x).unwrap());
                    assert!((a - b).norm() < 1e-14 * (1.0 + b.norm()));
                }
            }
            other => panic!("{other:?}"),
        }
        let v = classify(Family::md(2.0), ci(-1.0, 0.0)).unwrap();
        assert_eq!(v.verdict.name(), "ResolventSet");
        assert!(eigenfunction(&Family::mv(0.0), ci(1.0, 0.0)).is_none());
    }

    #[test]
    fn eigen_residuals() {
        let g = Grid::residual_grid();
        for (fam, l) in [
            (Family::mv(-2.0), ci(1.0, 0.0)),
            (Family::mv(-3.0), ci(2.0, 1.0)),
            (Family::dm(3.0), ci(0.5, 0.0)),
            (Family::vm(-2.0), ci(1.0, 1.0)),
            (Family::md(2.0), ci(1.0, 0.0)),
            (Family::schwartz_d(), ci(-1.0, 0.5)),
            (Family::schwartz_i(), ci(-2.0, 0.0)),
        ] {
            let r = eigen_residual(&fam, l, &g).unwrap();
            assert!(r <= EIGEN_RESIDUAL_TOL, "{fam} λ={l}: {r}");
            let f = eigenfunction(&fam, l).unwrap();
            assert!(is_flat_default(&f).unwrap().flat, "{fam} {l}");
        }
    }

    #[test]
    fn candidates_off_spectrum_are_not_flat() {
        for (fam, l) in [(Family::mv(-2.0), ci(-1.0, 0.0)), (Family::md(2.0), ci(0.0, 1.0))] {
            let h = eigen_candidate(&fam, l).unwrap();
            assert_eq!(analytic_flatness(&h), Flatness::NotFlat);
        }
    }

    #[test]
    fn inverse_tables_agree() {
        for fam in [Family::mv(-2.0), Family::mv(0.5), Family::md(3.0), Family::schwartz_d(), Family::cesaro()] {
            for l in [ci(1.0, 0.0), ci(-1.0, 2.0), ci(0.0, -1.0), ci(0.3, 0.1)] {
                assert!(inverse_consistent(&fam, l).unwrap(), "{fam} {l}");
            }
        }
    }

    #[test]
    fn sweep_marks_spectrum_points() {
        let rect = Rect { re: (-1.0, 1.0), im: (0.0, 0.0) };
        let s = waelbroeck_sweep(Family::mv(-2.0), rect, 3, 1, &corpus::powerflat(-2.0), 1);
        assert_eq!(s.points[2].status, SweepStatus::InSpectrum);
        assert!(s.points[0].profile_value(1).is_some());
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# flatspec-csv v1\n"));
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn blow_up_rule() {
        let growing: Vec<f64> = (0..10).map(|k| 10f64.powi(k)).collect();
        assert!(blow_up_detected(&growing));
        assert!(!blow_up_detected(&[1.0, 2.0, 3.0, 2.0, 3.0, 4.0, 5.0]));
    }
}
