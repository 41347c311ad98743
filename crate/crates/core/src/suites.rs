//! Property suites behind `flatspec verify`, one per module.
//!
//! Every random draw comes from a ChaCha generator seeded from the
//! configured seed and the property name, so rows are reproducible in
//! isolation.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::bell::{bell_eval, bell_polynomial, faa_di_bruno};
use crate::error::{Error, Result};
use crate::flatfn::{
    analytic_flatness, corpus, finite_difference, is_flat_default, seminorm, Evaluator, Flatness,
    FunctionExpr, Grid,
};
use crate::multipliers::{
    is_invertible_multiplier, multiplier_spectrum_probe, power_multiplier_spectrum, Invertibility,
    ProbeVerdict,
};
use crate::operators::{
    apply, apply_with, quadrature, verify_inverse_pair, ApplyOptions, Family, FamilyKind, OperatorSpec,
    QuadratureConfig,
};
use crate::resolvents::{delta1_functional, left_residual, residual, residual_quadrature, resolvent};
use crate::seqspace::{
    ab_ba_check, charpoly_eigenvalues, direct_sum, eigenvalues, match_multisets, rng_from_seed,
    DenseMatrix,
};
use crate::spectra::{
    classify, eigen_residual, inverse_consistent, sweep_points, Rect, Verdict, EIGEN_RESIDUAL_TOL,
};

pub const SUITES: &[&str] = &[
    "bell",
    "flatfn",
    "multipliers",
    "operators",
    "resolvents",
    "spectra",
    "seqspace",
];

/// Residual threshold for sampled resolvent identities.
pub const RESOLVENT_RESIDUAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Overrides the per-property sample counts.
    pub trials: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 1,
            trials: None,
        }
    }
}

impl VerifyConfig {
    fn trials(&self, default: usize) -> usize {
        self.trials.unwrap_or(default).max(1)
    }

    /// Generator for one property, independent of the other properties.
    pub fn rng(&self, property: &str) -> rand_chacha::ChaCha8Rng {
        let h = property
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        rng_from_seed(self.seed ^ h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub suite: &'static str,
    pub property: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn row(suite: &'static str, property: &'static str, pass: bool, detail: String) -> CheckRow {
    CheckRow {
        suite,
        property,
        pass,
        detail,
    }
}

/// Runs one suite, or all of them for `"all"`.
pub fn run(suite: &str, cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    match suite {
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run(s, cfg)?);
            }
            Ok(out)
        }
        "bell" => Ok(bell_suite(cfg)),
        "flatfn" => Ok(flatfn_suite()),
        "multipliers" => Ok(multipliers_suite(cfg)),
        "operators" => Ok(operators_suite()),
        "resolvents" => Ok(resolvents_suite(cfg)),
        "spectra" => Ok(spectra_suite(cfg)),
        "seqspace" => Ok(seqspace_suite(cfg)),
        other => Err(Error::domain(format!(
            "unknown suite {other:?}; expected all or one of {}",
            SUITES.join(", ")
        ))),
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn fmt_err(e: &Error) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// Samplers

/// `A x^m e^{-b/x}` with `b ∈ [2, 5]`, `m ∈ {-2, …, 2}`, `|A| ∈ [0.5, 2]`.
pub fn sample_input<R: Rng + ?Sized>(rng: &mut R) -> FunctionExpr {
    let b = rng.gen_range(2.0..=5.0);
    let m = rng.gen_range(-2i32..=2);
    let a = Complex64::from_polar(rng.gen_range(0.5..=2.0), rng.gen_range(0.0..std::f64::consts::TAU));
    FunctionExpr::scale(
        a,
        FunctionExpr::power(m as f64) * FunctionExpr::exp_power(c(-b), -1.0),
    )
}

/// Sets `λ` is drawn from, uniformly by area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaRegion {
    Annulus { inner: f64, outer: f64 },
    Disk { radius: f64 },
    /// `{Re λ ≤ 0, inner ≤ |λ| ≤ outer}`.
    LeftAnnulus { inner: f64, outer: f64 },
}

impl LambdaRegion {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let polar = |rng: &mut R, r0: f64, r1: f64| {
            let r = (rng.gen_range(0.0..=1.0) * (r1 * r1 - r0 * r0) + r0 * r0).sqrt();
            Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        };
        match *self {
            LambdaRegion::Annulus { inner, outer } => polar(rng, inner, outer),
            LambdaRegion::Disk { radius } => loop {
                let z = polar(rng, 0.0, radius);
                if z != c(0.0) {
                    return z;
                }
            },
            LambdaRegion::LeftAnnulus { inner, outer } => {
                let z = polar(rng, inner, outer);
                Complex64::new(-z.re.abs(), z.im)
            }
        }
    }
}

/// Recipes and their `λ` regions for the sampled resolvent identities.
pub fn resolvent_cases() -> Vec<(Family, LambdaRegion)> {
    use LambdaRegion::*;
    vec![
        (Family::cesaro(), Annulus { inner: 0.1, outer: 3.0 }),
        (Family::mv(-0.5), Disk { radius: 3.0 }),
        (Family::mv(0.0), Disk { radius: 3.0 }),
        (Family::mv(1.0), Disk { radius: 3.0 }),
        (Family::mv(-2.0), LeftAnnulus { inner: 0.1, outer: 3.0 }),
        (Family::md(0.0), Disk { radius: 3.0 }),
        (Family::md(0.5), Disk { radius: 3.0 }),
        (Family::md(1.0), Disk { radius: 3.0 }),
    ]
}

/// Further recipes covered by the suite with the same sampling.
pub fn extra_resolvent_cases() -> Vec<(Family, LambdaRegion)> {
    use LambdaRegion::*;
    vec![
        (Family::vm(0.0), Annulus { inner: 0.2, outer: 3.0 }),
        (Family::dm(0.5), Disk { radius: 3.0 }),
        (Family::md(2.0), LeftAnnulus { inner: 0.1, outer: 3.0 }),
        (Family::schwartz_d(), Disk { radius: 3.0 }),
    ]
}

/// Seeded `(λ, g)` draws for one recipe.
pub fn resolvent_samples(
    cfg: &VerifyConfig,
    family: Family,
    region: LambdaRegion,
    count: usize,
) -> Vec<(Complex64, FunctionExpr)> {
    let mut rng = cfg.rng(&format!("resolvent {family}"));
    (0..count)
        .map(|_| {
            let mut l = region.sample(&mut rng);
            // Reflected families live on the closed right half plane.
            if matches!(family.kind, FamilyKind::SchwartzD | FamilyKind::SchwartzI) {
                l = Complex64::new(l.re.abs(), l.im);
            }
            (l, sample_input(&mut rng))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// bell

fn bell_triangle(n: usize) -> Vec<u128> {
    let mut out = vec![1u128];
    let mut row = vec![1u128];
    for _ in 1..=n {
        let mut next = vec![*row.last().unwrap()];
        for &v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        out.push(next[0]);
        row = next;
    }
    out
}

fn bell_suite(cfg: &VerifyConfig) -> Vec<CheckRow> {
    let mut rows = Vec::new();

    let mut bad = Vec::new();
    for j in 0..=12usize {
        for i in 0..=j {
            match bell_polynomial(j, i) {
                Ok(b) => {
                    for k in b.terms().keys() {
                        let parts: u64 = k.iter().map(|&e| e as u64).sum();
                        let weight: u64 = k.iter().enumerate().map(|(l, &e)| (l as u64 + 1) * e as u64).sum();
                        if parts != i as u64 || weight != j as u64 {
                            bad.push(format!("B_{{{j},{i}}} term {k:?}"));
                        }
                    }
                }
                Err(e) => bad.push(fmt_err(&e)),
            }
        }
    }
    rows.push(row("bell", "index constraints, j <= 12", bad.is_empty(), format!("{} violations {:?}", bad.len(), bad.first())));

    let tri = bell_triangle(12);
    let mut worst = None;
    for j in 0..=12usize {
        let total: Result<Complex64> = (0..=j)
            .map(|i| bell_eval(j, i, &vec![c(1.0); j - i + 1]))
            .sum();
        match total {
            Ok(t) if t == c(tri[j] as f64) => {}
            Ok(t) => worst = Some(format!("j={j}: {t} vs {}", tri[j])),
            Err(e) => worst = Some(fmt_err(&e)),
        }
    }
    rows.push(row("bell", "row sums are Bell numbers, j <= 12", worst.is_none(), worst.unwrap_or_else(|| "exact".into())));

    let mut rng = cfg.rng("bell monotone");
    let trials = cfg.trials(200);
    let mut fails = 0;
    for _ in 0..trials {
        let j = rng.gen_range(1..=10usize);
        let i = rng.gen_range(1..=j);
        let n = j - i + 1;
        let xs: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let ys: Vec<Complex64> = xs.iter().map(|x| c(x.norm() + rng.gen_range(0.0..1.0))).collect();
        let (a, b) = (bell_eval(j, i, &xs), bell_eval(j, i, &ys));
        match (a, b) {
            (Ok(a), Ok(b)) if a.norm() <= b.re * (1.0 + 1e-12) => {}
            _ => fails += 1,
        }
    }
    rows.push(row("bell", "monotone bound on random complex inputs", fails == 0, format!("{fails}/{trials} failures")));

    // exp ∘ (c x^q) against Richardson differences.
    let (cc, q) = (Complex64::new(-0.7, 0.3), 1.5);
    let f = |x: f64| Ok((cc * x.powf(q)).exp());
    let mut worst = 0.0f64;
    for &x in &[0.3f64, 0.6, 0.9] {
        for j in 1..=4usize {
            let u = cc * x.powf(q);
            let outer = vec![u.exp(); j];
            let inner: Vec<Complex64> = (1..=j)
                .map(|k| {
                    let fall: f64 = (0..k).map(|m| q - m as f64).product();
                    cc * fall * x.powf(q - k as f64)
                })
                .collect();
            let exact = faa_di_bruno(j, &outer, &inner);
            let fd = finite_difference(f, x, j, 0.05, 4);
            worst = match (exact, fd) {
                (Ok(a), Ok(b)) => worst.max((a - b).norm() / b.norm()),
                _ => f64::INFINITY,
            };
        }
    }
    rows.push(row("bell", "Faà di Bruno matches finite differences", worst <= 1e-6, format!("max rel. error {worst:.3e}")));
    rows
}

// ---------------------------------------------------------------------------
// flatfn

fn flatfn_suite() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let corpus = corpus::flat_corpus();
    let grid = Grid::default_grid();
    let ev = Evaluator::default();

    let mut exact = true;
    for (_, g) in &corpus {
        let dv = FunctionExpr::volterra(g.clone()).deriv1();
        for &x in grid.points() {
            if ev.eval(&dv, x).ok() != ev.eval(g, x).ok() {
                exact = false;
            }
        }
    }
    rows.push(row("flatfn", "D(V g) = g structurally", exact, "bitwise on the default grid".into()));

    let mut worst = 0.0f64;
    for (_, f) in &corpus {
        let vd = apply_with(&OperatorSpec::V, &f.deriv1(), ApplyOptions::quadrature_only());
        for &x in grid.points() {
            let e = match (vd.as_ref().map(|g| ev.eval(g, x)), ev.eval(f, x)) {
                (Ok(Ok(a)), Ok(b)) => (a - b).norm() / (1.0 + b.norm()),
                _ => f64::INFINITY,
            };
            worst = worst.max(e);
        }
    }
    rows.push(row("flatfn", "V(D f) = f by quadrature", worst <= 1e-9, format!("max error {worst:.3e}")));

    let mut violations = 0;
    for (_, f) in &corpus {
        for n in 0..=6usize {
            let s = seminorm(f, n, &grid).unwrap_or(f64::NAN);
            for &x in grid.points() {
                let v = ev.eval(f, x).map(|v| v.norm()).unwrap_or(f64::NAN);
                if !(v <= s * x.powi(n as i32) * (1.0 + 1e-12)) {
                    violations += 1;
                }
            }
        }
    }
    rows.push(row("flatfn", "|f(x)| <= ‖f‖_n x^n for n <= 6", violations == 0, format!("{violations} violations")));

    let mut worst = 0.0f64;
    for (_, f) in &corpus {
        for j in 1..=4usize {
            let direct = f.deriv(j);
            let mut iter = f.clone();
            for _ in 0..j {
                iter = iter.deriv1();
            }
            for &x in grid.points() {
                if let (Ok(a), Ok(b)) = (ev.eval(&direct, x), ev.eval(&iter, x)) {
                    worst = worst.max((a - b).norm() / (1.0 + b.norm()));
                } else {
                    worst = f64::INFINITY;
                }
            }
        }
    }
    rows.push(row("flatfn", "deriv(f, j) equals j-fold deriv(f, 1)", worst <= 1e-10, format!("max error {worst:.3e}")));

    let mut cases: Vec<FunctionExpr> = corpus.iter().map(|(_, f)| f.clone()).collect();
    cases.extend([
        FunctionExpr::power(2.0),
        FunctionExpr::one() + corpus::expm1overx(),
        FunctionExpr::exp_power(Complex64::new(0.0, 1.0), -1.0),
        FunctionExpr::power(0.5),
    ]);
    let mut disagreements = Vec::new();
    for f in &cases {
        let numeric = is_flat_default(f).map(|r| r.flat);
        let ok = match analytic_flatness(f) {
            Flatness::Flat => numeric == Ok(true),
            Flatness::NotFlat => numeric != Ok(true),
            Flatness::Unknown => true,
        };
        if !ok {
            disagreements.push(f.to_string());
        }
    }
    rows.push(row("flatfn", "analytic flatness agrees with is_flat", disagreements.is_empty(), format!("{} cases, disagreements {disagreements:?}", cases.len())));
    rows
}

// ---------------------------------------------------------------------------
// multipliers

fn multipliers_suite(cfg: &VerifyConfig) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let ps = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];

    let mut mismatches = 0;
    let mut probes = 0;
    for &p in &ps {
        let (sigma, star) = power_multiplier_spectrum(p);
        let closure = sigma.closure();
        for re in [-1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
            for im in [0.0, 0.5] {
                probes += 1;
                let z = Complex64::new(re, im);
                if star.contains(z) != closure.contains(z) {
                    mismatches += 1;
                }
            }
        }
    }
    rows.push(row("multipliers", "σ* of x^p is the closure of σ", mismatches == 0, format!("{mismatches}/{probes} mismatches")));

    let trials = cfg.trials(200);
    let mut disagree = Vec::new();
    let mut bridge = Vec::new();
    let mut checked = 0;
    for &p in &ps {
        let omega = FunctionExpr::power(p);
        let (sigma, _) = power_multiplier_spectrum(p);
        let mut rng = cfg.rng(&format!("probe {p}"));
        let mut taken = 0;
        while taken < trials {
            let re = rng.gen_range(-1.0..3.0);
            let l = if rng.gen_bool(0.5) {
                c(re)
            } else {
                let im: f64 = rng.gen_range(0.01..1.0);
                Complex64::new(re, if rng.gen_bool(0.5) { im } else { -im })
            };
            if sigma.edge_distance(l) < 1e-3 {
                continue;
            }
            taken += 1;
            checked += 1;
            let probe = multiplier_spectrum_probe(&omega, l);
            let in_sigma = sigma.contains(l);
            let agrees = match &probe {
                Ok(ProbeVerdict::InSpectrum(_)) => in_sigma,
                Ok(ProbeVerdict::InResolvent(_)) => !in_sigma,
                _ => false,
            };
            if !agrees && disagree.len() < 5 {
                disagree.push(format!("p={p} λ={l}: {probe:?}"));
            }
            let shifted = FunctionExpr::constant(l) - omega.clone();
            let inv = matches!(is_invertible_multiplier(&shifted), Ok(Invertibility::Yes { .. }));
            let res = matches!(probe, Ok(ProbeVerdict::InResolvent(_)));
            if inv != res && bridge.len() < 5 {
                bridge.push(format!("p={p} λ={l}: invertible={inv} probe={probe:?}"));
            }
        }
    }
    rows.push(row("multipliers", "probe agrees with the x^p tables", disagree.is_empty(), format!("{checked} samples, first disagreements {disagree:?}")));
    rows.push(row("multipliers", "λ - ω invertible iff probe says resolvent", bridge.is_empty(), format!("{checked} samples, first mismatches {bridge:?}")));
    rows
}

// ---------------------------------------------------------------------------
// operators

fn operators_suite() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let corpus = corpus::flat_corpus();
    let grid = Grid::default_grid();
    let ev = Evaluator::default();

    let mut worst = (0.0f64, 0.0f64);
    for &p in &[-2.0, -0.5, 0.0, 1.5] {
        for (_, f) in &corpus {
            let family = apply(&OperatorSpec::Family(Family::mv(p)), f);
            let vf = apply(&OperatorSpec::V, f);
            let composed = vf.clone().and_then(|v| apply(&OperatorSpec::power_mult(p), &v));
            for &x in grid.points() {
                let (Ok(a), Ok(b), Ok(v)) = (&family, &composed, &vf) else {
                    worst = (f64::INFINITY, f64::INFINITY);
                    continue;
                };
                match (ev.eval(a, x), ev.eval(b, x), ev.eval(v, x)) {
                    (Ok(a), Ok(b), Ok(v)) => {
                        worst.0 = worst.0.max((a - b).norm() / (1.0 + b.norm()));
                        let pointwise = v * x.powf(p);
                        worst.1 = worst.1.max((b - pointwise).norm() / (1.0 + pointwise.norm()));
                    }
                    _ => worst = (f64::INFINITY, f64::INFINITY),
                }
            }
        }
    }
    rows.push(row("operators", "MV(p) equals M_{x^p} after V", worst.0 <= 1e-10, format!("max error {:.3e}", worst.0)));
    rows.push(row("operators", "M_{x^p} V f equals x^p (V f) pointwise", worst.1 <= 1e-10, format!("max error {:.3e}", worst.1)));

    // Integrands with closed-form antiderivatives G, G(0) = 0.
    let cm = Complex64::new(-1.0, 2.0);
    let pairs: Vec<(FunctionExpr, FunctionExpr)> = vec![
        (FunctionExpr::power(2.0), FunctionExpr::scale(c(1.0 / 3.0), FunctionExpr::power(3.0))),
        (corpus::powerflat(-2.0), corpus::expm1overx()),
        (
            FunctionExpr::scale(-cm, FunctionExpr::power(-2.0) * FunctionExpr::exp_power(cm, -1.0)),
            FunctionExpr::exp_power(cm, -1.0),
        ),
        (
            FunctionExpr::scale(c(2.0), FunctionExpr::power(-3.0) * FunctionExpr::exp_power(c(-1.0), -2.0)),
            FunctionExpr::exp_power(c(-1.0), -2.0),
        ),
        (
            FunctionExpr::scale(c(2.0), FunctionExpr::power(1.0) * FunctionExpr::exp_power(c(-1.0), 2.0)),
            FunctionExpr::one() - FunctionExpr::exp_power(c(-1.0), 2.0),
        ),
    ];
    let cfgq = QuadratureConfig::default();
    let mut dishonest = 0;
    let mut n = 0;
    for (g, big) in &pairs {
        for &x in &[0.05, 0.2, 0.5, 1.0] {
            n += 1;
            match (quadrature(g, 0.0, x, &cfgq), ev.eval(big, x)) {
                (Ok(r), Ok(exact)) => {
                    if (r.value - exact).norm() > 10.0 * r.error {
                        dishonest += 1;
                    }
                }
                _ => dishonest += 1,
            }
        }
    }
    rows.push(row("operators", "quadrature error estimates are honest", dishonest == 0, format!("{dishonest}/{n} true errors above 10x estimate")));

    let named: Vec<(String, FunctionExpr)> = corpus.iter().map(|(n, f)| (n.to_string(), f.clone())).collect();
    let report = verify_inverse_pair(&named, &Grid::default_from(2f64.powi(-20)));
    rows.push(row("operators", "DV f = f and VD f = f on the corpus", report.pass(), format!("DV {:.3e}, VD {:.3e}", report.dv_max, report.vd_max)));
    rows
}

// ---------------------------------------------------------------------------
// resolvents

/// `(family, max residual, max left residual, worst sample)` for one recipe.
pub fn sampled_residuals(
    cfg: &VerifyConfig,
    family: Family,
    region: LambdaRegion,
    count: usize,
) -> (f64, f64, Option<Complex64>) {
    let grid = Grid::residual_grid();
    let samples = resolvent_samples(cfg, family, region, count);
    let results: Vec<(f64, f64, Complex64)> = samples
        .par_iter()
        .map(|(l, g)| {
            let r = residual(family, *l, g, &grid).unwrap_or(f64::INFINITY);
            let lr = left_residual(family, *l, g, &grid).unwrap_or(f64::INFINITY);
            (r, lr, *l)
        })
        .collect();
    let mut out = (0.0f64, 0.0f64, None);
    for (r, lr, l) in results {
        if r.max(lr) > out.0.max(out.1) {
            out.2 = Some(l);
        }
        out.0 = out.0.max(r);
        out.1 = out.1.max(lr);
    }
    out
}

fn resolvents_suite(cfg: &VerifyConfig) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let count = cfg.trials(50);
    let mut right = Vec::new();
    let mut left = Vec::new();
    for (family, region) in resolvent_cases().into_iter().chain(extra_resolvent_cases()) {
        let (r, lr, worst) = sampled_residuals(cfg, family, region, count);
        right.push((family, r, worst));
        left.push((family, lr));
    }
    let rmax = right.iter().map(|r| r.1).fold(0.0, f64::max);
    let lmax = left.iter().map(|r| r.1).fold(0.0, f64::max);
    let detail = right
        .iter()
        .map(|(f, r, _)| format!("{f} {r:.1e}"))
        .collect::<Vec<_>>()
        .join("; ");
    rows.push(row("resolvents", "(λI - T) R g = g on sampled pairs", rmax <= RESOLVENT_RESIDUAL_TOL, detail));
    let detail = left
        .iter()
        .map(|(f, r)| format!("{f} {r:.1e}"))
        .collect::<Vec<_>>()
        .join("; ");
    rows.push(row("resolvents", "R (λI - T) g = g on sampled pairs", lmax <= RESOLVENT_RESIDUAL_TOL, detail));

    // VM through V-conjugation against the M_{x^p} conjugation of MV.
    let ev = Evaluator::new(residual_quadrature());
    let mut rng = cfg.rng("conjugation consistency");
    let mut worst = 0.0f64;
    for &(p, region) in &[
        (0.0, LambdaRegion::Annulus { inner: 0.3, outer: 3.0 }),
        (1.0, LambdaRegion::Annulus { inner: 0.3, outer: 3.0 }),
        (-2.0, LambdaRegion::LeftAnnulus { inner: 0.3, outer: 3.0 }),
    ] {
        for _ in 0..cfg.trials(10).min(10) {
            let l = region.sample(&mut rng);
            let g = sample_input(&mut rng);
            let vm = resolvent(Family::vm(p), l, &g);
            let via_mv = resolvent(Family::mv(p), l, &(FunctionExpr::power(p) * g.clone()))
                .map(|h| FunctionExpr::power(-p) * h);
            for &x in Grid::residual_grid().points() {
                let e = match (&vm, &via_mv) {
                    (Ok(a), Ok(b)) => match (ev.eval(a, x), ev.eval(b, x)) {
                        (Ok(a), Ok(b)) => (a - b).norm() / (1.0 + b.norm()),
                        _ => f64::INFINITY,
                    },
                    _ => f64::INFINITY,
                };
                worst = worst.max(e);
            }
        }
    }
    rows.push(row("resolvents", "R_VM = x^-p R_MV x^p = V R_MV D", worst <= RESOLVENT_RESIDUAL_TOL, format!("max difference {worst:.3e}")));

    let bump = corpus::flatbump();
    let mass = quadrature(&bump, 0.0, 1.0, &residual_quadrature()).map(|r| r.value);
    let mut detail = Vec::new();
    let mut ok = mass.is_ok();
    if let Ok(m) = mass {
        let f = FunctionExpr::scale(m.inv(), bump);
        for &l in &[0.5, 0.2, 0.1] {
            match delta1_functional(c(l), &f) {
                Ok(v) => {
                    ok &= v.re >= 1.0 / l - 1e-6;
                    detail.push(format!("λ={l}: {:.6}", v.re));
                }
                Err(e) => {
                    ok = false;
                    detail.push(fmt_err(&e));
                }
            }
        }
    }
    rows.push(row("resolvents", "δ₁ functional >= 1/λ", ok, detail.join(", ")));
    rows
}

// ---------------------------------------------------------------------------
// spectra

fn spectra_families() -> Vec<Family> {
    let mut v = vec![Family::cesaro(), Family::schwartz_d(), Family::schwartz_i()];
    for p in [-3.0, -2.0, -1.0, -0.5, 0.0, 1.0, 2.0, 3.0] {
        v.extend([Family::mv(p), Family::vm(p), Family::md(p), Family::dm(p)]);
    }
    v
}

fn spectra_suite(cfg: &VerifyConfig) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let mut rng = cfg.rng("spectra lambdas");
    let lambdas: Vec<Complex64> = (0..cfg.trials(40))
        .map(|_| Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
        .chain([c(1.0), c(-1.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -2.0)])
        .collect();

    let mut bad = Vec::new();
    for f in spectra_families() {
        for &l in &lambdas {
            if !inverse_consistent(&f, l).unwrap_or(false) {
                bad.push(format!("{f} {l}"));
            }
        }
    }
    rows.push(row("spectra", "tables consistent under λ ↦ 1/λ", bad.is_empty(), format!("{} failures {:?}", bad.len(), bad.first())));

    let mut bad = Vec::new();
    for p in [-3.0, -2.0, -1.5, -1.0, -0.5, 0.0, 1.0, 2.0] {
        for &l in lambdas.iter().chain([&c(0.0)]) {
            let a = classify(Family::mv(p), l).map(|v| v.verdict.name());
            let b = classify(Family::vm(p), l).map(|v| v.verdict.name());
            if a != b || a.is_err() {
                bad.push(format!("p={p} λ={l}"));
            }
        }
    }
    rows.push(row("spectra", "MV(p) and VM(p) classify identically", bad.is_empty(), format!("{} failures {:?}", bad.len(), bad.first())));

    let grid = Grid::residual_grid();
    let mut eigen_bad = Vec::new();
    let mut resolvent_bad = Vec::new();
    let mut eig_count = 0;
    let mut res_count = 0;
    let mut rng = cfg.rng("spectra witnesses");
    let fams = [
        Family::mv(-2.0),
        Family::mv(-3.0),
        Family::vm(-2.0),
        Family::md(2.0),
        Family::dm(3.0),
        Family::schwartz_d(),
        Family::schwartz_i(),
        Family::mv(0.5),
        Family::md(0.5),
    ];
    for f in fams {
        for _ in 0..cfg.trials(4).min(8) {
            let r = rng.gen_range(0.5..2.5);
            let l = Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
            match classify(f, l) {
                Ok(cl) => match cl.verdict {
                    Verdict::PointSpectrum(h) => {
                        eig_count += 1;
                        let flat = is_flat_default(&h).map(|r| r.flat).unwrap_or(false);
                        let res = eigen_residual(&f, l, &grid).unwrap_or(f64::INFINITY);
                        if !(flat && res <= EIGEN_RESIDUAL_TOL) {
                            eigen_bad.push(format!("{f} λ={l} flat={flat} residual={res:.2e}"));
                        }
                    }
                    Verdict::ResolventSet(_) => {
                        res_count += 1;
                        let g = sample_input(&mut rng);
                        let res = residual(f, l, &g, &grid).unwrap_or(f64::INFINITY);
                        if !(res <= RESOLVENT_RESIDUAL_TOL) {
                            resolvent_bad.push(format!("{f} λ={l} residual={res:.2e}"));
                        }
                    }
                    Verdict::WaelbroeckOnly => {}
                },
                Err(e) => eigen_bad.push(fmt_err(&e)),
            }
        }
    }
    rows.push(row("spectra", "eigenfunctions are flat with small residual", eigen_bad.is_empty(), format!("{eig_count} eigenvalues, failures {eigen_bad:?}")));
    rows.push(row("spectra", "resolvent-set samples have small residual", resolvent_bad.is_empty(), format!("{res_count} points, failures {resolvent_bad:?}")));

    let rect = Rect { re: (-1.5, -0.5), im: (-1.0, 1.0) };
    let f = corpus::powerflat(-2.0);
    let g = Grid::default_grid();
    let coarse = sweep_points(Family::mv(-2.0), &rect.lattice(3, 3), &f, 2, &g);
    let fine = sweep_points(Family::mv(-2.0), &rect.lattice(5, 5), &f, 2, &g);
    let (a, b) = (coarse.max_value(), fine.max_value());
    let ok = match (a, b) {
        (Some(a), Some(b)) => a.is_finite() && b.is_finite() && (b - a).abs() <= 0.05 * a,
        _ => false,
    };
    rows.push(row("spectra", "sweep maxima on Re λ < 0 are stable under refinement", ok, format!("3x3 max {a:?}, 5x5 max {b:?}")));
    rows
}

// ---------------------------------------------------------------------------
// seqspace

fn seqspace_suite(cfg: &VerifyConfig) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let trials = cfg.trials(100);
    let mut rng = cfg.rng("seqspace pairs");
    let mut spec_fail = 0;
    let mut res_fail = 0;
    let mut worst_match = 0.0f64;
    let mut worst_res = 0.0f64;
    for _ in 0..trials {
        let n = rng.gen_range(2..=8usize);
        let a = DenseMatrix::random(n, &mut rng);
        let b = DenseMatrix::random(n, &mut rng);
        match ab_ba_check(&a, &b, true, &mut rng) {
            Ok(r) => {
                worst_match = worst_match.max(r.exact.max_distance / r.exact.tol);
                if !(r.exact.pass() && r.up_to_zeros.pass()) {
                    spec_fail += 1;
                }
                for l in &r.lambdas {
                    worst_res = worst_res.max(l.formula).max(l.conjugation.unwrap_or(0.0));
                }
                if !r.resolvents_pass() {
                    res_fail += 1;
                }
            }
            Err(_) => {
                spec_fail += 1;
                res_fail += 1;
            }
        }
    }
    rows.push(row("seqspace", "σ(AB) = σ(BA) as multisets", spec_fail == 0, format!("{spec_fail}/{trials} failures, worst distance/tolerance {worst_match:.2e}")));
    rows.push(row("seqspace", "conjugation and λ^-1 resolvent formulas", res_fail == 0, format!("{res_fail}/{trials} failures, worst residual {worst_res:.2e}")));

    let mut rng = cfg.rng("seqspace direct sums");
    let mut fails = 0;
    let sums = cfg.trials(20);
    for _ in 0..sums {
        let (n1, n2) = (rng.gen_range(1..=6usize), rng.gen_range(1..=6usize));
        let a = DenseMatrix::random(n1, &mut rng);
        let b = if rng.gen_bool(0.25) { DenseMatrix::zeros(n2) } else { DenseMatrix::random(n2, &mut rng) };
        let ok = (|| -> Result<bool> {
            let s = direct_sum(&a, &b)?;
            let parts = eigenvalues(&a)?.union(&eigenvalues(&b)?);
            let whole = eigenvalues(&s)?;
            Ok(match_multisets(&whole.values, &parts.values, 1e-7 * s.frobenius().max(1.0)).pass())
        })();
        if ok != Ok(true) {
            fails += 1;
        }
    }
    rows.push(row("seqspace", "σ(A ⊕ B) = σ(A) ∪ σ(B)", fails == 0, format!("{fails}/{sums} failures")));

    let mut rng = cfg.rng("seqspace oracle");
    let mut fails = 0;
    let mut worst = 0.0f64;
    let count = cfg.trials(40);
    for _ in 0..count {
        let n = rng.gen_range(1..=8usize);
        let a = DenseMatrix::random(n, &mut rng);
        match (eigenvalues(&a), charpoly_eigenvalues(&a)) {
            (Ok(q), Ok(p)) => {
                let m = match_multisets(&q.values, &p.values, 1e-7);
                worst = worst.max(m.max_distance);
                if !m.pass() {
                    fails += 1;
                }
            }
            _ => fails += 1,
        }
    }
    rows.push(row("seqspace", "shifted QR agrees with the characteristic polynomial", fails == 0, format!("{fails}/{count} failures, worst distance {worst:.2e}")));
    rows
}
