use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 64;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n > MAX_DIM {
            return Err(Error::domain(format!("dimension {n} exceeds {MAX_DIM}")));
        }
        if data.len() != n * n {
            return Err(Error::domain(format!(
                "{} entries do not form a {n}×{n} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_DIM, "dimension {n} exceeds {MAX_DIM}");
        DenseMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn from_diag(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("rows must form a square matrix"));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)))
            .collect();
        Self::new(n, data)
    }

    /// Entries uniform on the unit square `[0, 1) × [0, 1)`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(n);
        for z in &mut m.data {
            *z = Complex64::new(rng.gen(), rng.gen());
        }
        m
    }

    /// Random matrix of rank at most `rank`, as a product of `n×rank` and `rank×n` factors.
    pub fn random_rank<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Self {
        let mut l = Self::random(n, rng);
        let r = Self::random(n, rng);
        for i in 0..n {
            for j in rank..n {
                l[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
        &l * &r
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, k: Complex64) -> Self {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    /// `λI - self`.
    pub fn shifted(&self, lambda: Complex64) -> Self {
        let mut m = self.scale(Complex64::new(-1.0, 0.0));
        for i in 0..self.n {
            m[(i, i)] += lambda;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu> {
        let n = self.n;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (piv, big) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if big == 0.0 {
                return Err(Error::Singular(format!("zero pivot in column {k}")));
            }
            if piv != k {
                for j in 0..n {
                    a.data.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let d = a[(k, k)];
            for i in k + 1..n {
                let l = a[(i, k)] / d;
                a[(i, k)] = l;
                for j in k + 1..n {
                    let u = a[(k, j)];
                    a[(i, j)] -= l * u;
                }
            }
        }
        Ok(Lu { a, perm })
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = self.lu()?;
        let n = self.n;
        let mut inv = Self::zeros(n);
        for j in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            let col = lu.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Smallest singular value by inverse iteration on `AᴴA`; 0 for an
    /// exactly singular factorization.
    pub fn smallest_singular_value(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return f64::INFINITY;
        }
        let (lu, luh) = match (self.lu(), self.adjoint().lu()) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return 0.0,
        };
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + i as f64 * 0.1, 0.3))
            .collect();
        let mut growth = 0.0;
        for _ in 0..40 {
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= norm);
            let w = luh.solve(&lu.solve(&v));
            let g = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if !g.is_finite() {
                return 0.0;
            }
            let done = (g - growth).abs() <= 1e-12 * g;
            growth = g;
            v = w;
            if done {
                break;
            }
        }
        1.0 / growth.sqrt()
    }
}

/// Packed `PA = LU` factors.
#[derive(Debug, Clone)]
pub struct Lu {
    a: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.a.n;
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.a[(i, j)];
                let yj = y[j];
                y[i] -= l * yj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.a[(i, j)];
                let yj = y[j];
                y[i] -= u * yj;
            }
            y[i] /= self.a[(i, i)];
        }
        y
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        DenseMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        DenseMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Block-diagonal `A ⊕ B`.
pub fn direct_sum(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.n + b.n;
    if n > MAX_DIM {
        return Err(Error::domain(format!("dimension {n} exceeds {MAX_DIM}")));
    }
    let mut m = DenseMatrix::zeros(n);
    for i in 0..a.n {
        for j in 0..a.n {
            m[(i, j)] = a[(i, j)];
        }
    }
    for i in 0..b.n {
        for j in 0..b.n {
            m[(a.n + i, a.n + j)] = b[(i, j)];
        }
    }
    Ok(m)
}
