//! Multipliers of the flat space: membership, invertibility of `M_ω`, and
//! spectra of multiplication operators.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flatfn::{
    analytic_flatness, flatness_samples, Evaluator, Flatness, FunctionExpr, Grid, Node,
    MONOTONE_WINDOW,
};

/// Largest exponent tried when looking for a polynomial bound.
pub const MAX_EXPONENT: usize = 40;
/// Highest derivative order checked by the numeric multiplier test.
pub const NUMERIC_JMAX: usize = 6;
/// A tail value above this counts as divergence.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;
/// `|λ - ω|` below this at a refined minimum means `λ ∈ ω((0, 1])`.
pub const RANGE_TOL: f64 = 1e-10;

const BOUNDED_SLACK: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Regions

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Greater,
    GreaterEq,
    Less,
    LessEq,
}

/// Computable subsets of `ℂ`.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionDescriptor {
    Empty,
    FiniteSet(Vec<Complex64>),
    /// Real segment from `a` to `b`.
    Interval {
        a: f64,
        b: f64,
        a_closed: bool,
        b_closed: bool,
    },
    /// Real ray from `a` to `+∞`.
    Ray { a: f64, closed: bool },
    /// `{λ : Re λ ⋄ threshold}`.
    HalfPlane { threshold: f64, side: Side },
}

impl RegionDescriptor {
    pub fn half_plane(side: Side, threshold: f64) -> Self {
        RegionDescriptor::HalfPlane { threshold, side }
    }

    pub fn point(z: Complex64) -> Self {
        RegionDescriptor::FiniteSet(vec![z])
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            RegionDescriptor::Empty => false,
            RegionDescriptor::FiniteSet(pts) => pts.contains(&z),
            RegionDescriptor::Interval {
                a,
                b,
                a_closed,
                b_closed,
            } => {
                z.im == 0.0
                    && (z.re > *a || (*a_closed && z.re == *a))
                    && (z.re < *b || (*b_closed && z.re == *b))
            }
            RegionDescriptor::Ray { a, closed } => {
                z.im == 0.0 && (z.re > *a || (*closed && z.re == *a))
            }
            RegionDescriptor::HalfPlane { threshold, side } => match side {
                Side::Greater => z.re > *threshold,
                Side::GreaterEq => z.re >= *threshold,
                Side::Less => z.re < *threshold,
                Side::LessEq => z.re <= *threshold,
            },
        }
    }

    pub fn closure(&self) -> Self {
        match self {
            RegionDescriptor::Interval { a, b, .. } => RegionDescriptor::Interval {
                a: *a,
                b: *b,
                a_closed: true,
                b_closed: true,
            },
            RegionDescriptor::Ray { a, .. } => RegionDescriptor::Ray { a: *a, closed: true },
            RegionDescriptor::HalfPlane { threshold, side } => RegionDescriptor::HalfPlane {
                threshold: *threshold,
                side: match side {
                    Side::Greater | Side::GreaterEq => Side::GreaterEq,
                    Side::Less | Side::LessEq => Side::LessEq,
                },
            },
            other => other.clone(),
        }
    }

    /// Distance from `z` to the places where membership flips under small
    /// real perturbations: interval and ray endpoints, the half-plane edge,
    /// the points of a finite set.
    pub fn edge_distance(&self, z: Complex64) -> f64 {
        match self {
            RegionDescriptor::Empty => f64::INFINITY,
            RegionDescriptor::FiniteSet(pts) => pts
                .iter()
                .map(|p| (p - z).norm())
                .fold(f64::INFINITY, f64::min),
            RegionDescriptor::Interval { a, b, .. } => {
                (z - Complex64::new(*a, 0.0)).norm().min((z - Complex64::new(*b, 0.0)).norm())
            }
            RegionDescriptor::Ray { a, .. } => (z - Complex64::new(*a, 0.0)).norm(),
            RegionDescriptor::HalfPlane { threshold, .. } => (z.re - threshold).abs(),
        }
    }
}

impl std::fmt::Display for RegionDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegionDescriptor::Empty => write!(f, "{{}}"),
            RegionDescriptor::FiniteSet(pts) => {
                let s: Vec<String> = pts.iter().map(|p| format!("{p}")).collect();
                write!(f, "{{{}}}", s.join(", "))
            }
            RegionDescriptor::Interval {
                a,
                b,
                a_closed,
                b_closed,
            } => write!(
                f,
                "{}{a}, {b}{}",
                if *a_closed { '[' } else { '(' },
                if *b_closed { ']' } else { ')' }
            ),
            RegionDescriptor::Ray { a, closed } => {
                write!(f, "{}{a}, inf)", if *closed { '[' } else { '(' })
            }
            RegionDescriptor::HalfPlane { threshold, side } => {
                let op = match side {
                    Side::Greater => ">",
                    Side::GreaterEq => ">=",
                    Side::Less => "<",
                    Side::LessEq => "<=",
                };
                write!(f, "{{Re z {op} {threshold}}}")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Membership

#[derive(Debug, Clone, PartialEq)]
pub enum MultiplierStatus {
    /// `table[j]` is the least `n` with `|ω^{(j)}| x^n` bounded, when found.
    Yes(Vec<Option<usize>>),
    /// No exponent bounds `ω^{(j)}` for this `j`.
    No(usize),
    Unknown,
}

impl MultiplierStatus {
    pub fn is_yes(&self) -> bool {
        matches!(self, MultiplierStatus::Yes(_))
    }
}

/// Symbolic multiplier test on the primitive shapes; `None` when undecided.
pub fn analytic_multiplier(f: &FunctionExpr) -> Option<bool> {
    match f.node() {
        Node::Const(_) | Node::Power(_) => Some(true),
        Node::ExpPower { c, q } => Some(*q >= 0.0 || c.re <= 0.0),
        Node::Scale(_, g) => analytic_multiplier(g),
        Node::Sum(terms) => {
            let v: Vec<Option<bool>> = terms.iter().map(analytic_multiplier).collect();
            let no = v.iter().filter(|s| **s == Some(false)).count();
            let yes = v.iter().filter(|s| **s == Some(true)).count();
            if yes == v.len() {
                Some(true)
            } else if no == 1 && yes + 1 == v.len() {
                Some(false)
            } else {
                None
            }
        }
        Node::Product(factors) => {
            if factors.iter().all(|g| analytic_multiplier(g) == Some(true)) {
                Some(true)
            } else {
                None
            }
        }
        _ => {
            if analytic_flatness(f) == Flatness::Flat {
                Some(true)
            } else {
                None
            }
        }
    }
}

/// True when the sequence is finite and does not grow over its tail.
pub fn tail_bounded(values: &[f64]) -> bool {
    if values.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let tail = &values[values.len().saturating_sub(MONOTONE_WINDOW)..];
    tail.windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + BOUNDED_SLACK) + 1e-300)
}

fn weighted(abs: f64, x: f64, n: f64) -> f64 {
    if abs == 0.0 {
        0.0
    } else if abs.is_finite() {
        (abs.ln() + n * x.ln()).exp()
    } else {
        f64::INFINITY
    }
}

/// Least `n ≤ MAX_EXPONENT` with `values(x) x^n` bounded along the samples.
fn least_bounding_exponent(abs: &[f64], xs: &[f64]) -> Option<usize> {
    (0..=MAX_EXPONENT).find(|&n| {
        let seq: Vec<f64> = abs
            .iter()
            .zip(xs)
            .map(|(&a, &x)| weighted(a, x, n as f64))
            .collect();
        tail_bounded(&seq)
    })
}

fn numeric_table(ev: &Evaluator, omega: &FunctionExpr) -> Result<Vec<Option<usize>>> {
    let xs = flatness_samples();
    let mut abs = vec![Vec::with_capacity(xs.len()); NUMERIC_JMAX + 1];
    for &x in &xs {
        for (j, v) in ev.jet(omega, x, NUMERIC_JMAX)?.iter().enumerate() {
            abs[j].push(v.norm());
        }
    }
    Ok(abs.iter().map(|a| least_bounding_exponent(a, &xs)).collect())
}

/// Decides whether `ω` is a multiplier of the flat space.
pub fn is_multiplier(omega: &FunctionExpr) -> MultiplierStatus {
    let ev = Evaluator::default();
    let table = numeric_table(&ev, omega).ok();
    match analytic_multiplier(omega) {
        Some(true) => MultiplierStatus::Yes(table.unwrap_or_else(|| vec![None; NUMERIC_JMAX + 1])),
        Some(false) => {
            let witness = table
                .and_then(|t| t.iter().position(|n| n.is_none()))
                .unwrap_or(0);
            MultiplierStatus::No(witness)
        }
        None => match table {
            Some(t) if t.iter().all(|n| n.is_some()) => MultiplierStatus::Yes(t),
            _ => MultiplierStatus::Unknown,
        },
    }
}

// ---------------------------------------------------------------------------
// Invertibility

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonInvertibleReason {
    Zero,
    Growth,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Invertibility {
    /// `|1/ω| x^m` is bounded for this `m`.
    Yes { m: usize },
    No(NonInvertibleReason),
}

/// Sample points for zero and range searches: a geometric tail and a
/// uniform body.
fn search_points() -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=320).map(|k| 2f64.powf(-(k as f64) / 8.0)).collect();
    pts.extend((1..1000).map(|k| k as f64 / 1000.0));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a) <= 1e-15 * b.abs().max(1e-300) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Smallest `|g|` over interior local minima on `(0, 1]`, refined by
/// golden-section search. A minimum at the smallest sample is a limit at 0,
/// not an attained value, and is skipped. Returns `(x, |g(x)|)`, with an
/// infinite value when no interior minimum exists.
fn refined_minimum(g: impl Fn(f64) -> f64) -> (f64, f64) {
    let pts = search_points();
    let vals: Vec<f64> = pts.iter().map(|&x| g(x)).collect();
    let mut best = (f64::NAN, f64::INFINITY);
    for i in 1..pts.len() {
        let left = vals[i - 1];
        let right = if i + 1 == pts.len() { f64::INFINITY } else { vals[i + 1] };
        if vals[i] <= left && vals[i] <= right {
            let b = if i + 1 == pts.len() { 1.0 } else { pts[i + 1] };
            let (x, v) = golden_min(&g, pts[i - 1], b);
            let (x, v) = if vals[i] < v { (pts[i], vals[i]) } else { (x, v) };
            if v < best.1 {
                best = (x, v);
            }
        }
    }
    best
}

fn modulus_fn<'a>(ev: &'a Evaluator, f: &'a FunctionExpr) -> impl Fn(f64) -> f64 + 'a {
    move |x| ev.eval(f, x).map(|v| v.norm()).unwrap_or(f64::NAN)
}

fn has_zero(ev: &Evaluator, omega: &FunctionExpr) -> bool {
    match omega.node() {
        Node::Const(c) => return c.norm() == 0.0,
        Node::Power(_) | Node::ExpPower { .. } => return false,
        Node::Product(v) if v.iter().all(|g| matches!(g.node(), Node::Power(_) | Node::ExpPower { .. })) => {
            return false
        }
        Node::Scale(k, g) if matches!(g.node(), Node::Power(_) | Node::ExpPower { .. }) => {
            return k.norm() == 0.0
        }
        _ => {}
    }
    let m = modulus_fn(ev, omega);
    let scale = Some(m(1.0)).filter(|v| v.is_finite()).unwrap_or(0.0).max(1.0);
    let (_, v) = refined_minimum(&m);
    v <= RANGE_TOL * scale
}

/// `M_ω` is an isomorphism iff `ω` has no zero on `(0, 1]` and `1/ω` grows
/// at most polynomially at 0.
pub fn is_invertible_multiplier(omega: &FunctionExpr) -> Result<Invertibility> {
    if !is_multiplier(omega).is_yes() {
        return Err(Error::precondition(format!(
            "{omega} is not a certified multiplier"
        )));
    }
    let ev = Evaluator::default();
    if has_zero(&ev, omega) {
        return Ok(Invertibility::No(NonInvertibleReason::Zero));
    }
    let xs = flatness_samples();
    let inv: Vec<f64> = xs
        .iter()
        .map(|&x| ev.eval(omega, x).map(|v| 1.0 / v.norm()))
        .collect::<Result<_>>()?;
    match least_bounding_exponent(&inv, &xs) {
        Some(m) => Ok(Invertibility::Yes { m }),
        None => Ok(Invertibility::No(NonInvertibleReason::Growth)),
    }
}

// ---------------------------------------------------------------------------
// Spectra

/// `(σ, σ*)` of multiplication by `x^p`.
pub fn power_multiplier_spectrum(p: f64) -> (RegionDescriptor, RegionDescriptor) {
    use RegionDescriptor::*;
    if p > 0.0 {
        (
            Interval {
                a: 0.0,
                b: 1.0,
                a_closed: false,
                b_closed: true,
            },
            Interval {
                a: 0.0,
                b: 1.0,
                a_closed: true,
                b_closed: true,
            },
        )
    } else if p < 0.0 {
        let r = Ray { a: 1.0, closed: true };
        (r.clone(), r)
    } else {
        let one = RegionDescriptor::point(Complex64::new(1.0, 0.0));
        (one.clone(), one)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumWitness {
    /// `λ = ω(x)` up to `distance`.
    Attained { x: f64, distance: f64 },
    /// `x^n / (λ - ω)` exceeded the divergence threshold for every `n`.
    Divergent { smallest_tail: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeVerdict {
    InSpectrum(SpectrumWitness),
    /// `x^n / (λ - ω)` is bounded for this `n`.
    InResolvent(usize),
    Unknown,
}

/// Decides `λ ∈ σ(M_ω)` from range membership and growth of `x^n/(λ - ω)`.
pub fn multiplier_spectrum_probe(omega: &FunctionExpr, lambda: Complex64) -> Result<ProbeVerdict> {
    if !is_multiplier(omega).is_yes() {
        return Err(Error::precondition(format!(
            "{omega} is not a certified multiplier"
        )));
    }
    let ev = Evaluator::default();
    let dist = |x: f64| {
        ev.eval(omega, x)
            .map(|v| (lambda - v).norm())
            .unwrap_or(f64::NAN)
    };
    let (x, d) = refined_minimum(dist);
    if d < RANGE_TOL {
        return Ok(ProbeVerdict::InSpectrum(SpectrumWitness::Attained { x, distance: d }));
    }
    let xs = flatness_samples();
    let inv: Vec<f64> = xs
        .iter()
        .map(|&x| ev.eval(omega, x).map(|v| 1.0 / (lambda - v).norm()))
        .collect::<Result<_>>()?;
    if let Some(n) = least_bounding_exponent(&inv, &xs) {
        return Ok(ProbeVerdict::InResolvent(n));
    }
    // Tail over the last decade of sample points (x shrinking by 2^{-10}).
    let decade = 10.min(xs.len());
    let smallest_tail = (0..=MAX_EXPONENT)
        .map(|n| {
            inv[inv.len() - decade..]
                .iter()
                .zip(&xs[xs.len() - decade..])
                .map(|(&a, &x)| weighted(a, x, n as f64))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min);
    if smallest_tail > DIVERGENCE_THRESHOLD {
        Ok(ProbeVerdict::InSpectrum(SpectrumWitness::Divergent { smallest_tail }))
    } else {
        Ok(ProbeVerdict::Unknown)
    }
}

// ---------------------------------------------------------------------------
// Equicontinuity

/// Parameterized multiplier families `λ ↦ h_λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MultiplierFamily {
    /// `h_λ = x^λ`.
    Power,
    /// `h_λ = e^{λ x^t}`.
    ExpPower { t: f64 },
}

impl MultiplierFamily {
    pub fn member(&self, lambda: Complex64) -> FunctionExpr {
        match self {
            MultiplierFamily::Power => FunctionExpr::complex_power(lambda),
            MultiplierFamily::ExpPower { t } => FunctionExpr::exp_power(lambda, *t),
        }
    }
}

/// Finite sample of a closed disk: a boundary ring, an interior ring and
/// the center.
pub fn disk_sample(center: Complex64, radius: f64, count: usize) -> Vec<Complex64> {
    let count = count.max(3);
    let interior = (count - 1) / 3;
    let ring = count - 1 - interior;
    let mut pts = vec![center];
    for k in 0..ring {
        let th = 2.0 * std::f64::consts::PI * k as f64 / ring as f64;
        pts.push(center + Complex64::from_polar(radius, th));
    }
    for k in 0..interior {
        let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / interior.max(1) as f64;
        pts.push(center + Complex64::from_polar(0.5 * radius, th));
    }
    pts
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquicontinuityBound {
    pub j: usize,
    /// Exponent of the fitted bound `|h_λ^{(j)}| ≤ M x^{t}`; `None` when no
    /// menu exponent works.
    pub t: Option<f64>,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquicontinuityReport {
    pub bounds: Vec<EquicontinuityBound>,
    pub samples: usize,
}

impl EquicontinuityReport {
    pub fn success(&self) -> bool {
        self.bounds.iter().all(|b| b.t.is_some() && b.m.is_finite())
    }
}

/// Fits `|h_λ^{(j)}(x)| ≤ M_j x^{t(j)}` uniformly over the sample `k`.
///
/// Exponents are tried from `t = 0` down to `t = -MAX_EXPONENT`; the first
/// that keeps every sampled member bounded along the flat tail is reported
/// with the largest observed constant on `grid`.
pub fn equicontinuity_bound_check(
    family: MultiplierFamily,
    k: &[Complex64],
    jmax: usize,
    grid: &Grid,
) -> Result<EquicontinuityReport> {
    if let MultiplierFamily::ExpPower { t } = family {
        if !(t >= 0.0) {
            return Err(Error::domain("exponential families need t >= 0"));
        }
    }
    if k.is_empty() {
        return Err(Error::domain("empty parameter sample"));
    }
    let ev = Evaluator::default();
    let tail = flatness_samples();
    let mut pts: Vec<f64> = grid.points().to_vec();
    pts.extend(tail.iter().copied());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.reverse();
    // abs[i][j][s]: member i, order j, point s (decreasing x).
    let mut abs = Vec::with_capacity(k.len());
    for &lambda in k {
        let h = family.member(lambda);
        let mut per_j = vec![Vec::with_capacity(pts.len()); jmax + 1];
        for &x in &pts {
            for (j, v) in ev.jet(&h, x, jmax)?.iter().enumerate() {
                per_j[j].push(v.norm());
            }
        }
        abs.push(per_j);
    }
    let mut bounds = Vec::with_capacity(jmax + 1);
    for j in 0..=jmax {
        let mut found = None;
        for m in 0..=MAX_EXPONENT {
            let t = -(m as f64);
            let mut sup = 0.0f64;
            let mut ok = true;
            for member in &abs {
                let seq: Vec<f64> = member[j]
                    .iter()
                    .zip(&pts)
                    .map(|(&a, &x)| weighted(a, x, -t))
                    .collect();
                if !tail_bounded(&seq) {
                    ok = false;
                    break;
                }
                sup = seq.iter().fold(sup, |s, &v| s.max(v));
            }
            if ok {
                found = Some((t, sup));
                break;
            }
        }
        bounds.push(match found {
            Some((t, m)) => EquicontinuityBound { j, t: Some(t), m },
            None => EquicontinuityBound {
                j,
                t: None,
                m: f64::INFINITY,
            },
        });
    }
    Ok(EquicontinuityReport {
        bounds,
        samples: k.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn powers_are_multipliers() {
        for p in [-3.5, -1.0, 0.0, 0.5, 2.0] {
            assert!(is_multiplier(&FunctionExpr::power(p)).is_yes(), "p={p}");
        }
    }

    #[test]
    fn growing_exponential_is_not() {
        assert_eq!(
            is_multiplier(&FunctionExpr::exp_power(c(1.0), -1.0)),
            MultiplierStatus::No(0)
        );
    }

    #[test]
    fn oscillating_exponential_is_a_multiplier() {
        let w = FunctionExpr::exp_power(Complex64::new(0.0, 1.0), -1.0);
        match is_multiplier(&w) {
            MultiplierStatus::Yes(t) => {
                let t: Vec<usize> = t.into_iter().map(|n| n.unwrap()).collect();
                assert_eq!(t, vec![0, 2, 4, 6, 8, 10, 12]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invertibility_examples() {
        assert_eq!(
            is_invertible_multiplier(&FunctionExpr::power(-2.0)).unwrap(),
            Invertibility::Yes { m: 0 }
        );
        assert_eq!(
            is_invertible_multiplier(&FunctionExpr::power(3.0)).unwrap(),
            Invertibility::Yes { m: 3 }
        );
        let shifted = FunctionExpr::x() - FunctionExpr::real(0.5);
        assert_eq!(
            is_invertible_multiplier(&shifted).unwrap(),
            Invertibility::No(NonInvertibleReason::Zero)
        );
        assert_eq!(
            is_invertible_multiplier(&FunctionExpr::exp_power(c(-1.0), -1.0)).unwrap(),
            Invertibility::No(NonInvertibleReason::Growth)
        );
        assert!(is_invertible_multiplier(&FunctionExpr::exp_power(c(1.0), -1.0)).is_err());
    }

    #[test]
    fn power_spectra() {
        let (s, ss) = power_multiplier_spectrum(2.0);
        assert!(s.contains(c(0.5)) && !s.contains(c(0.0)) && ss.contains(c(0.0)));
        let (s, ss) = power_multiplier_spectrum(-1.0);
        assert!(s.contains(c(1.0)) && s.contains(c(7.0)) && !s.contains(c(0.5)));
        assert_eq!(s, ss);
        let (s, _) = power_multiplier_spectrum(0.0);
        assert!(s.contains(c(1.0)) && !s.contains(c(1.5)));
    }

    #[test]
    fn probe_examples() {
        let w = FunctionExpr::power(2.0);
        match multiplier_spectrum_probe(&w, c(0.25)).unwrap() {
            ProbeVerdict::InSpectrum(SpectrumWitness::Attained { x, .. }) => {
                assert!((x - 0.5).abs() < 1e-6)
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(multiplier_spectrum_probe(&w, c(0.0)).unwrap(), ProbeVerdict::InResolvent(2));
        assert_eq!(multiplier_spectrum_probe(&w, c(2.0)).unwrap(), ProbeVerdict::InResolvent(0));
    }

    #[test]
    fn closure_and_edges() {
        let r = RegionDescriptor::half_plane(Side::Greater, 0.0);
        assert!(!r.contains(Complex64::new(0.0, 3.0)));
        assert!(r.closure().contains(Complex64::new(0.0, 3.0)));
        assert_eq!(r.edge_distance(Complex64::new(-2.0, 1.0)), 2.0);
        assert!(!RegionDescriptor::Empty.contains(c(0.0)));
    }

    #[test]
    fn equicontinuity_of_power_family() {
        let k = disk_sample(c(2.0), 1.0, 25);
        assert_eq!(k.len(), 25);
        let r = equicontinuity_bound_check(MultiplierFamily::Power, &k, 3, &Grid::default_grid())
            .unwrap();
        assert!(r.success());
        // Re λ >= 1 on the disk, so |(x^λ)^{(j)}| <= M x^{1-j}.
        assert_eq!(r.bounds[0].t, Some(0.0));
        assert_eq!(r.bounds[3].t, Some(-2.0));
    }

    #[test]
    fn exp_family_rejects_negative_t() {
        let k = disk_sample(c(0.0), 1.0, 9);
        assert!(equicontinuity_bound_check(
            MultiplierFamily::ExpPower { t: -1.0 },
            &k,
            2,
            &Grid::default_grid()
        )
        .is_err());
    }
}
