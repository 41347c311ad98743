use num_complex::Complex64;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Largest dimension accepted by the characteristic-polynomial oracle.
pub const CHARPOLY_MAX_DIM: usize = 8;
/// QR sweeps allowed per eigenvalue before giving up.
pub const QR_SWEEPS_PER_EIGENVALUE: usize = 60;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Eigenvalues with multiplicity, plus the tolerance they are matched with.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMultiset {
    pub values: Vec<Complex64>,
    pub tol: f64,
}

impl SpectrumMultiset {
    pub fn new(mut values: Vec<Complex64>, tol: f64) -> Self {
        values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        SpectrumMultiset { values, tol }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Multiset union.
    pub fn union(&self, other: &SpectrumMultiset) -> SpectrumMultiset {
        let mut v = self.values.clone();
        v.extend_from_slice(&other.values);
        SpectrumMultiset::new(v, self.tol.max(other.tol))
    }

    /// Drops the values with `|μ| ≤ tol`.
    pub fn without_zeros(&self, tol: f64) -> SpectrumMultiset {
        SpectrumMultiset::new(
            self.values.iter().copied().filter(|z| z.norm() > tol).collect(),
            self.tol,
        )
    }

    pub fn min_modulus(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Distance from `z` to the nearest element.
    pub fn distance(&self, z: Complex64) -> f64 {
        self.values.iter().map(|v| (v - z).norm()).fold(f64::INFINITY, f64::min)
    }
}

/// Greedy nearest-neighbour pairing of two multisets.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `(index in a, index in b, distance)` in the order pairs were taken.
    pub pairs: Vec<(usize, usize, f64)>,
    pub max_distance: f64,
    pub tol: f64,
    pub same_size: bool,
}

impl Matching {
    pub fn pass(&self) -> bool {
        self.same_size && self.max_distance <= self.tol
    }
}

pub fn match_multisets(a: &[Complex64], b: &[Complex64], tol: f64) -> Matching {
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut pairs = Vec::with_capacity(a.len().min(b.len()));
    for _ in 0..a.len().min(b.len()) {
        let mut best = (0, 0, f64::INFINITY);
        for (i, x) in a.iter().enumerate().filter(|(i, _)| !used_a[*i]) {
            for (j, y) in b.iter().enumerate().filter(|(j, _)| !used_b[*j]) {
                let d = (x - y).norm();
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        used_a[best.0] = true;
        used_b[best.1] = true;
        pairs.push(best);
    }
    let max_distance = pairs.iter().map(|p| p.2).fold(0.0, f64::max);
    Matching {
        pairs,
        max_distance,
        tol,
        same_size: a.len() == b.len(),
    }
}

/// Householder reduction to upper Hessenberg form (similarity transform).
pub fn hessenberg(a: &DenseMatrix) -> DenseMatrix {
    let n = a.dim();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vn);
        // H ← (I - 2vvᴴ) H
        for j in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)]).sum();
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vr * dot * 2.0;
            }
        }
        // H ← H (I - 2vvᴴ)
        for i in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(c, vc)| h[(i, k + 1 + c)] * vc).sum();
            for (c, vc) in v.iter().enumerate() {
                h[(i, k + 1 + c)] -= dot * vc.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = zero();
        }
    }
    h
}

/// `(c, s)` with `[[c, s], [-s̄, c]] [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, zero());
    }
    if a.norm() == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let c = a.norm() / r;
    let s = (a / a.norm()) * b.conj() / r;
    (c, s)
}

fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let m = (a + d) * 0.5;
    let disc = (((a - d) * 0.5).powi(2) + b * c).sqrt();
    let (m1, m2) = (m + disc, m - disc);
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// All eigenvalues by Hessenberg reduction and shifted QR.
pub fn eigenvalues(a: &DenseMatrix) -> Result<SpectrumMultiset> {
    let n = a.dim();
    let scale = a.frobenius();
    let tol = 1e-8 * scale.max(f64::MIN_POSITIVE);
    if n == 0 {
        return Ok(SpectrumMultiset::new(Vec::new(), tol));
    }
    let mut h = hessenberg(a);
    let mut eig = vec![zero(); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let budget = QR_SWEEPS_PER_EIGENVALUE * n;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            if s == 0.0 {
                s = scale;
            }
            if h[(l, l - 1)].norm() <= f64::EPSILON * s {
                h[(l, l - 1)] = zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > budget {
            return Err(Error::numeric(format!(
                "QR iteration did not converge within {budget} sweeps"
            )));
        }
        let mu = if iter % 11 == 10 {
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * 0.75
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for i in l..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = l + idx;
            for i in l..=(k + 1).min(hi) {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in l..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(SpectrumMultiset::new(eig, tol))
}

/// Monic characteristic polynomial coefficients `c_0, …, c_n` by
/// Faddeev–LeVerrier.
pub fn characteristic_polynomial(a: &DenseMatrix) -> Vec<Complex64> {
    let n = a.dim();
    let mut c = vec![zero(); n + 1];
    c[n] = Complex64::new(1.0, 0.0);
    let mut m = DenseMatrix::zeros(n);
    for k in 1..=n {
        let mut next = a * &m;
        for i in 0..n {
            next[(i, i)] += c[n - k + 1];
        }
        let am = a * &next;
        let tr: Complex64 = am.diagonal().into_iter().sum();
        c[n - k] = -tr / k as f64;
        m = next;
    }
    c
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = zero();
    let mut dp = zero();
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

/// Roots of a monic polynomial by Aberth–Ehrlich iteration with a Newton polish.
pub fn polynomial_roots(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let radius = 1.0 + c[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let mut converged = false;
    for _ in 0..2000 {
        let mut biggest = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(c, z[i]);
            if p == zero() {
                continue;
            }
            let w = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                biggest = biggest.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if biggest <= 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::numeric("Aberth iteration did not converge"));
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *zi - p / dp;
            let (pn, _) = horner(c, next);
            if pn.norm() < p.norm() {
                *zi = next;
            } else {
                break;
            }
        }
    }
    Ok(z)
}

/// Eigenvalues as roots of the characteristic polynomial, for `n ≤ 8`.
pub fn charpoly_eigenvalues(a: &DenseMatrix) -> Result<SpectrumMultiset> {
    if a.dim() > CHARPOLY_MAX_DIM {
        return Err(Error::precondition(format!(
            "characteristic-polynomial oracle is limited to n <= {CHARPOLY_MAX_DIM}"
        )));
    }
    let roots = polynomial_roots(&characteristic_polynomial(a))?;
    Ok(SpectrumMultiset::new(roots, 1e-7 * a.frobenius().max(1.0)))
}
