//! Finite-dimensional analogues: eigenvalues of dense sections, the
//! `AB`/`BA` spectral identities, diagonal operators and direct sums.

mod eigen;
mod matrix;

pub use eigen::{
    characteristic_polynomial, charpoly_eigenvalues, eigenvalues, hessenberg, match_multisets,
    polynomial_roots, Matching, SpectrumMultiset, CHARPOLY_MAX_DIM, QR_SWEEPS_PER_EIGENVALUE,
};
pub use matrix::{direct_sum, DenseMatrix, Lu, MAX_DIM};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Matrix residual threshold for the resolvent identities.
pub const RESOLVENT_TOL: f64 = 1e-8;
/// Relative eigenvalue matching tolerance, scaled by `‖A‖‖B‖`.
pub const SPECTRUM_MATCH_TOL: f64 = 1e-7;
/// Minimum distance from sampled `λ` to either spectrum.
pub const LAMBDA_SEPARATION: f64 = 1e-6;
/// Sampled `λ` per pair.
pub const LAMBDA_SAMPLES: usize = 5;

/// Deterministic generator for a recorded seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn max_abs(m: &DenseMatrix) -> f64 {
    let n = m.dim();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].norm())
        .fold(0.0, f64::max)
}

/// Residuals at one sampled `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaCheck {
    pub lambda: Complex64,
    /// `‖(λI - BA) B(λI - AB)^{-1}B^{-1} - I‖_max`, when `B` is invertible.
    pub conjugation: Option<f64>,
    /// `‖λ^{-1}(I + B(λI - AB)^{-1}A) - (λI - BA)^{-1}‖_max / ‖(λI - BA)^{-1}‖_max`.
    pub formula: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbBaReport {
    pub ab: SpectrumMultiset,
    pub ba: SpectrumMultiset,
    /// Full multisets, the finite-dimensional fact.
    pub exact: Matching,
    /// Multisets with zeros removed, the general statement.
    pub up_to_zeros: Matching,
    pub lambdas: Vec<LambdaCheck>,
}

impl AbBaReport {
    pub fn resolvents_pass(&self) -> bool {
        self.lambdas.iter().all(|c| {
            c.formula <= RESOLVENT_TOL && c.conjugation.is_none_or(|r| r <= RESOLVENT_TOL)
        })
    }

    pub fn pass(&self) -> bool {
        self.exact.pass() && self.up_to_zeros.pass() && self.resolvents_pass()
    }
}

fn sample_lambda<R: Rng + ?Sized>(
    rng: &mut R,
    radius: f64,
    avoid: &[&SpectrumMultiset],
) -> Complex64 {
    loop {
        let r = radius * rng.gen::<f64>().sqrt();
        let t = rng.gen::<f64>() * std::f64::consts::TAU;
        let l = Complex64::from_polar(r, t);
        if l.norm() >= LAMBDA_SEPARATION && avoid.iter().all(|s| s.distance(l) >= LAMBDA_SEPARATION) {
            return l;
        }
    }
}

/// Compares `σ(AB)` with `σ(BA)` and checks both resolvent formulas at
/// sampled `λ`; the conjugation identity needs `invertible_b`.
pub fn ab_ba_check<R: Rng + ?Sized>(
    a: &DenseMatrix,
    b: &DenseMatrix,
    invertible_b: bool,
    rng: &mut R,
) -> Result<AbBaReport> {
    if a.dim() != b.dim() {
        return Err(Error::domain("A and B must have the same dimension"));
    }
    let n = a.dim();
    let ab = a * b;
    let ba = b * a;
    let sab = eigenvalues(&ab)?;
    let sba = eigenvalues(&ba)?;
    let tol = SPECTRUM_MATCH_TOL * (a.frobenius() * b.frobenius()).max(1.0);
    let exact = match_multisets(&sab.values, &sba.values, tol);
    let up_to_zeros = match_multisets(
        &sab.without_zeros(tol).values,
        &sba.without_zeros(tol).values,
        tol,
    );
    let b_inv = if invertible_b { Some(b.inverse()?) } else { None };
    let radius = 1.0
        + sab
            .values
            .iter()
            .chain(&sba.values)
            .map(|z| z.norm())
            .fold(0.0, f64::max);
    let identity = DenseMatrix::identity(n);
    let mut lambdas = Vec::with_capacity(LAMBDA_SAMPLES);
    for _ in 0..LAMBDA_SAMPLES {
        let l = sample_lambda(rng, radius, &[&sab, &sba]);
        let r_ab = ab.shifted(l).inverse()?;
        let direct = ba.shifted(l).inverse()?;
        let conjugation = match &b_inv {
            Some(bi) => {
                let t = &(b * &r_ab) * bi;
                Some(max_abs(&(&(&ba.shifted(l) * &t) - &identity)))
            }
            None => None,
        };
        let formula_t = (&identity + &(&(b * &r_ab) * a)).scale(l.inv());
        let formula = max_abs(&(&formula_t - &direct)) / max_abs(&direct);
        lambdas.push(LambdaCheck {
            lambda: l,
            conjugation,
            formula,
        });
    }
    Ok(AbBaReport {
        ab: sab,
        ba: sba,
        exact,
        up_to_zeros,
        lambdas,
    })
}

/// The `N × N` section of the diagonal operator `(x_n) ↦ (w_n x_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagSection {
    pub matrix: DenseMatrix,
    pub expected: SpectrumMultiset,
    /// Section of the inverse, when no weight vanishes.
    pub inverse: Option<DenseMatrix>,
    pub inverse_expected: Option<SpectrumMultiset>,
}

impl DiagSection {
    /// Smallest eigenvalue modulus of the inverse section; tends to 0 as
    /// `N` grows for unbounded weights, the section-level trace of the
    /// accumulation of `σ(T^{-1})` at 0.
    pub fn inverse_min_modulus(&self) -> Option<f64> {
        self.inverse_expected.as_ref().map(|s| s.min_modulus())
    }
}

pub fn diag_finite_section(weights: &[Complex64], n: usize) -> Result<DiagSection> {
    if n > MAX_DIM {
        return Err(Error::domain(format!("dimension {n} exceeds {MAX_DIM}")));
    }
    if weights.len() < n {
        return Err(Error::domain(format!("{} weights for a section of size {n}", weights.len())));
    }
    let w = &weights[..n];
    let matrix = DenseMatrix::from_diag(w);
    let expected = SpectrumMultiset::new(w.to_vec(), 1e-12);
    let (inverse, inverse_expected) = if w.iter().all(|z| z.norm() > 0.0) {
        let inv: Vec<Complex64> = w.iter().map(|z| z.inv()).collect();
        (
            Some(DenseMatrix::from_diag(&inv)),
            Some(SpectrumMultiset::new(inv, 1e-12)),
        )
    } else {
        (None, None)
    };
    Ok(DiagSection {
        matrix,
        expected,
        inverse,
        inverse_expected,
    })
}

/// Weights `w_n = n` for `n = 1..=N`.
pub fn natural_weights(n: usize) -> Vec<Complex64> {
    (1..=n).map(|k| Complex64::new(k as f64, 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn small_spectra() {
        let s = eigenvalues(&DenseMatrix::from_diag(&[c(1.0), c(2.0), c(3.0)])).unwrap();
        assert!(match_multisets(&s.values, &[c(1.0), c(2.0), c(3.0)], 1e-12).pass());
        let nil = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let s = eigenvalues(&nil).unwrap();
        assert!(s.values.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn qr_agrees_with_charpoly() {
        let mut rng = rng_from_seed(7);
        for n in 1..=8 {
            let a = DenseMatrix::random(n, &mut rng);
            let qr = eigenvalues(&a).unwrap();
            let cp = charpoly_eigenvalues(&a).unwrap();
            let m = match_multisets(&qr.values, &cp.values, 1e-7);
            assert!(m.pass(), "n={n}: {}", m.max_distance);
            for mu in &qr.values {
                assert!(a.shifted(*mu).smallest_singular_value() <= 1e-8 * a.frobenius());
            }
        }
    }

    #[test]
    fn larger_matrix_converges() {
        let mut rng = rng_from_seed(11);
        let a = DenseMatrix::random(64, &mut rng);
        let s = eigenvalues(&a).unwrap();
        assert_eq!(s.len(), 64);
        let trace: Complex64 = a.diagonal().into_iter().sum();
        let sum: Complex64 = s.values.iter().sum();
        assert!((trace - sum).norm() < 1e-9 * trace.norm());
    }

    #[test]
    fn ab_ba_random_and_singular() {
        let mut rng = rng_from_seed(3);
        let a = DenseMatrix::random(6, &mut rng);
        let b = DenseMatrix::random(6, &mut rng);
        let r = ab_ba_check(&a, &b, true, &mut rng).unwrap();
        assert!(r.pass(), "{r:?}");
        let bs = DenseMatrix::random_rank(6, 3, &mut rng);
        let r = ab_ba_check(&a, &bs, false, &mut rng).unwrap();
        assert!(r.up_to_zeros.pass() && r.exact.pass(), "{r:?}");
    }

    #[test]
    fn identity_pair() {
        let i = DenseMatrix::identity(4);
        let mut rng = rng_from_seed(1);
        let r = ab_ba_check(&i, &i, true, &mut rng).unwrap();
        assert!(r.ab.values.iter().all(|z| (z - c(1.0)).norm() < 1e-14));
        assert!(r.pass());
    }

    #[test]
    fn sections_and_sums() {
        let s = diag_finite_section(&natural_weights(5), 5).unwrap();
        assert_eq!(s.inverse_min_modulus(), Some(0.2));
        let mut last = 1.0;
        for n in [8, 16, 32] {
            let m = diag_finite_section(&natural_weights(n), n).unwrap().inverse_min_modulus().unwrap();
            assert!((m - 1.0 / n as f64).abs() < 1e-15 && m < last);
            last = m;
        }
        let d = direct_sum(&DenseMatrix::from_diag(&[c(1.0), c(2.0)]), &DenseMatrix::from_diag(&[c(3.0)])).unwrap();
        let e = eigenvalues(&d).unwrap();
        assert!(match_multisets(&e.values, &[c(1.0), c(2.0), c(3.0)], 1e-12).pass());
    }
}
