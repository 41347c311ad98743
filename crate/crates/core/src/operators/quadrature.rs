//! Adaptive Gauss–Kronrod (G10/K21) quadrature for complex integrands on
//! subintervals of `[0, ∞)`, with flat truncation of the lower limit.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::flatfn::FunctionExpr;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Deepest probe of the flat-truncation scan, `a + (b - a) 2^{-TRUNCATION_DEPTH}`.
const TRUNCATION_DEPTH: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            abs_floor: 1e-300,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_subdivisions(mut self, max_subdivisions: usize) -> Self {
        self.max_subdivisions = max_subdivisions;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_floor > 0.0 && self.max_subdivisions > 0) {
            return Err(Error::domain(format!("invalid quadrature config {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    /// Estimated absolute error.
    pub error: f64,
    /// Lower limit actually used after flat truncation.
    pub lower_cutoff: f64,
    pub subdivisions: usize,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    roundoff: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn checked<F>(f: &mut F, x: f64, evaluations: &mut usize) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    *evaluations += 1;
    let v = f(x)?;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::numeric(format!("integrand is not finite at t = {x:e}")))
    }
}

fn kronrod21<F>(f: &mut F, a: f64, b: f64, evaluations: &mut usize) -> Result<Segment>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = checked(f, center, evaluations)?;
    let mut kronrod = f_center * WGK[10];
    let mut gauss = Complex64::zero();
    let mut abs_sum = f_center.norm() * WGK[10];
    for (j, &node) in XGK.iter().enumerate().take(10) {
        let offset = half * node;
        let lo = checked(f, center - offset, evaluations)?;
        let hi = checked(f, center + offset, evaluations)?;
        let pair = lo + hi;
        kronrod += pair * WGK[j];
        abs_sum += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let raw = ((kronrod - gauss) * half).norm();
    let roundoff = 50.0 * f64::EPSILON * abs_sum * half;
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error: raw.max(roundoff),
        roundoff,
    })
}

/// Raises the lower limit past the region where the integrand stays below
/// `floor`, scanning `a + (b - a) 2^{-k}` outward from `a`.
fn flat_cutoff<F>(f: &mut F, a: f64, b: f64, floor: f64, evaluations: &mut usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let width = b - a;
    let probe = |k: i32| a + width * 2f64.powi(-k);
    let below = |f: &mut F, k: i32, evaluations: &mut usize| -> Result<bool> {
        Ok(checked(f, probe(k), evaluations)?.norm() < floor)
    };
    let mut k = TRUNCATION_DEPTH;
    if !below(f, k, evaluations)? {
        return Ok(a);
    }
    while k >= 4 && below(f, k - 4, evaluations)? {
        k -= 4;
    }
    while k >= 1 && below(f, k - 1, evaluations)? {
        k -= 1;
    }
    Ok(probe(k))
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    cfg.validate()?;
    if !(a >= 0.0 && a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::domain(format!(
            "quadrature needs 0 <= a <= b < inf, got [{a}, {b}]"
        )));
    }
    let mut evaluations = 0;
    if a == b {
        return Ok(QuadratureResult {
            value: Complex64::zero(),
            error: 0.0,
            lower_cutoff: a,
            subdivisions: 0,
            evaluations,
        });
    }
    let lower = flat_cutoff(&mut f, a, b, cfg.abs_floor, &mut evaluations)?;
    if lower >= b {
        return Ok(QuadratureResult {
            value: Complex64::zero(),
            error: cfg.abs_floor * (b - a),
            lower_cutoff: b,
            subdivisions: 0,
            evaluations,
        });
    }

    let first = kronrod21(&mut f, lower, b, &mut evaluations)?;
    let mut total = first.value;
    let mut total_error = first.error;
    let mut total_roundoff = first.roundoff;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 0;

    // Cancellation can put the target below what double precision resolves;
    // an error at twice the accumulated roundoff is then the best available.
    while total_error > (cfg.rel_tol * total.norm()).max(cfg.abs_floor).max(2.0 * total_roundoff) {
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::Quadrature {
                a,
                b,
                estimate: total,
                error: total_error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("segment heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // Segment cannot be split further in double precision.
            heap.push(worst);
            break;
        }
        let left = kronrod21(&mut f, worst.a, mid, &mut evaluations)?;
        let right = kronrod21(&mut f, mid, worst.b, &mut evaluations)?;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        total_roundoff += left.roundoff + right.roundoff - worst.roundoff;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }

    // Re-sum to shed drift from the running updates.
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(QuadratureResult {
        value,
        error,
        lower_cutoff: lower,
        subdivisions,
        evaluations,
    })
}

/// `∫_a^b g(t) dt` for an expression `g`.
pub fn quadrature(g: &FunctionExpr, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let evaluator = crate::flatfn::Evaluator::new(*cfg);
    integrate(|t| evaluator.eval(g, t), a, b, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(f: impl Fn(f64) -> f64) -> impl FnMut(f64) -> Result<Complex64> {
        move |x| Ok(Complex64::new(f(x), 0.0))
    }

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rules_are_exact_on_polynomials() {
        // Kronrod-21 is exact through degree 31, Gauss-10 through 19.
        for degree in 0..=19u32 {
            let mut evals = 0;
            let mut f = real(|x| x.powi(degree as i32));
            let seg = kronrod21(&mut f, 0.0, 1.0, &mut evals).unwrap();
            let exact = 1.0 / (degree as f64 + 1.0);
            assert!((seg.value.re - exact).abs() < 1e-15, "degree {degree}");
            // Only the roundoff floor remains.
            assert!(seg.error < 2e-14, "degree {degree} err {}", seg.error);
        }
        let mut evals = 0;
        let mut f = real(|x| x.powi(31));
        let seg = kronrod21(&mut f, 0.0, 1.0, &mut evals).unwrap();
        assert!((seg.value.re - 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn square_on_unit_interval() {
        let r = integrate(real(|x| x * x), 0.0, 1.0, &QuadratureConfig::default()).unwrap();
        assert!((r.value.re - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.lower_cutoff, 0.0);
    }

    #[test]
    fn flat_integrand_is_truncated() {
        let r = integrate(
            real(|t| (-1.0 / t).exp() / (t * t)),
            0.0,
            1.0,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((r.value.re - (-1.0f64).exp()).abs() < 1e-12);
        assert!(r.lower_cutoff > 1e-4 && r.lower_cutoff < 2e-3);
    }

    #[test]
    fn integrand_below_floor_everywhere() {
        let r = integrate(
            real(|t| (-1.0 / t).exp()),
            0.0,
            2f64.powi(-20),
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_eq!(r.value, Complex64::zero());
    }

    #[test]
    fn complex_integrand() {
        // ∫_0^1 e^{i t} dt = (e^{i} - 1)/i
        let r = integrate(
            |t| Ok(Complex64::new(0.0, t).exp()),
            0.0,
            1.0,
            &QuadratureConfig::default(),
        )
        .unwrap();
        let exact = (Complex64::new(0.0, 1.0).exp() - 1.0) / Complex64::new(0.0, 1.0);
        assert!((r.value - exact).norm() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_reports_partial_estimate() {
        let cfg = QuadratureConfig::default().with_max_subdivisions(3);
        let err = integrate(real(|t| (40.0 * t).sin() / t.sqrt()), 0.0, 1.0, &cfg).unwrap_err();
        match err {
            Error::Quadrature {
                subdivisions,
                estimate,
                ..
            } => {
                assert_eq!(subdivisions, 3);
                assert!(estimate.re.is_finite());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let r = integrate(real(|t| 1.0 / (t - 0.5)), 0.0, 1.0, &QuadratureConfig::default());
        assert!(r.is_err());
    }

    #[test]
    fn bad_limits() {
        let cfg = QuadratureConfig::default();
        assert!(integrate(real(|t| t), 1.0, 0.5, &cfg).is_err());
        assert!(integrate(real(|t| t), -1.0, 0.5, &cfg).is_err());
    }
}
