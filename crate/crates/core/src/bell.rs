//! Partial Bell polynomials and the derivative formulas built on them.
//!
//! `B_{j,i}` is generated by the recurrence
//! `B_{j,i} = Σ_m C(j-1, m-1) x_m B_{j-m,i-1}` with `B_{0,0} = 1`, and is
//! memoized in a process-wide cache. Coefficients are exact big integers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default cap on the order `j`; coefficients grow super-exponentially.
pub const DEFAULT_ORDER_LIMIT: usize = 16;

/// Exact partial Bell polynomial `B_{j,i}(x_1, …, x_{j-i+1})`.
///
/// Terms are keyed by the exponent vector `(i_1, …, i_k)` with trailing zeros
/// trimmed, so keys compare equal regardless of padding.
#[derive(Debug, Clone, PartialEq)]
pub struct BellPolynomial {
    order: usize,
    parts: usize,
    terms: BTreeMap<Vec<u32>, BigUint>,
    // f64 image of `terms` for fast evaluation; exact while coefficients < 2^53.
    float_terms: Vec<(Vec<u32>, f64)>,
}

impl BellPolynomial {
    fn from_terms(order: usize, parts: usize, terms: BTreeMap<Vec<u32>, BigUint>) -> Self {
        let float_terms = terms
            .iter()
            .map(|(k, c)| (k.clone(), c.to_f64().unwrap_or(f64::INFINITY)))
            .collect();
        BellPolynomial {
            order,
            parts,
            terms,
            float_terms,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    /// Number of variables the polynomial is defined over, `j - i + 1`.
    pub fn arity(&self) -> usize {
        self.order - self.parts + 1
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigUint> {
        &self.terms
    }

    /// Coefficient of the monomial with the given exponents (padding ignored).
    pub fn coefficient(&self, exponents: &[u32]) -> BigUint {
        self.terms
            .get(trim(exponents.to_vec()).as_slice())
            .cloned()
            .unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates with complex arguments; `values.len()` must equal the arity.
    pub fn eval(&self, values: &[Complex64]) -> Result<Complex64> {
        if values.len() != self.arity() {
            return Err(Error::domain(format!(
                "B_{{{},{}}} takes {} arguments, got {}",
                self.order,
                self.parts,
                self.arity(),
                values.len()
            )));
        }
        Ok(self.eval_unchecked(values))
    }

    /// Evaluation without the arity check; extra trailing values are ignored.
    pub(crate) fn eval_unchecked(&self, values: &[Complex64]) -> Complex64 {
        let mut total = Complex64::zero();
        for (exponents, coeff) in &self.float_terms {
            let mut monomial = Complex64::new(*coeff, 0.0);
            for (var, &power) in exponents.iter().enumerate() {
                if power > 0 {
                    monomial *= values[var].powu(power);
                }
            }
            total += monomial;
        }
        total
    }
}

impl fmt::Display for BellPolynomial {
    /// One monomial per line, `coeff * x1^a1 x3^a3`, in lexicographic key order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for (exponents, coeff) in &self.terms {
            let vars: Vec<String> = exponents
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(k, a)| format!("x{}^{}", k + 1, a))
                .collect();
            if vars.is_empty() {
                writeln!(f, "{coeff}")?;
            } else {
                writeln!(f, "{coeff} * {}", vars.join(" "))?;
            }
        }
        Ok(())
    }
}

fn trim(mut key: Vec<u32>) -> Vec<u32> {
    while key.last() == Some(&0) {
        key.pop();
    }
    key
}

type Cache = RwLock<HashMap<(usize, usize), Arc<BellPolynomial>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn binomial(n: usize, k: usize) -> BigUint {
    let mut out = BigUint::one();
    for t in 0..k {
        out = out * BigUint::from(n - t) / BigUint::from(t + 1);
    }
    out
}

/// `B_{j,i}` with the default order cap.
pub fn bell_polynomial(order: usize, parts: usize) -> Result<Arc<BellPolynomial>> {
    bell_polynomial_with_limit(order, parts, DEFAULT_ORDER_LIMIT)
}

/// `B_{j,i}`, rejecting `j > limit` as well as `i > j`.
pub fn bell_polynomial_with_limit(
    order: usize,
    parts: usize,
    limit: usize,
) -> Result<Arc<BellPolynomial>> {
    if parts > order {
        return Err(Error::domain(format!(
            "Bell polynomial B_{{{order},{parts}}} needs i <= j"
        )));
    }
    if order > limit {
        return Err(Error::domain(format!(
            "Bell polynomial order {order} exceeds the configured limit {limit}"
        )));
    }
    Ok(generate(order, parts))
}

fn generate(order: usize, parts: usize) -> Arc<BellPolynomial> {
    if let Some(hit) = cache().read().expect("bell cache poisoned").get(&(order, parts)) {
        return Arc::clone(hit);
    }
    let mut terms: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
    if order == 0 && parts == 0 {
        terms.insert(Vec::new(), BigUint::one());
    } else if parts > 0 {
        for m in 1..=(order - parts + 1) {
            let lower = generate(order - m, parts - 1);
            let weight = binomial(order - 1, m - 1);
            for (key, coeff) in lower.terms() {
                let mut raised = key.clone();
                if raised.len() < m {
                    raised.resize(m, 0);
                }
                raised[m - 1] += 1;
                *terms.entry(trim(raised)).or_default() += coeff * &weight;
            }
        }
    }
    let poly = Arc::new(BellPolynomial::from_terms(order, parts, terms));
    cache()
        .write()
        .expect("bell cache poisoned")
        .entry((order, parts))
        .or_insert(poly)
        .clone()
}

/// `B_{j,i}(values)` in complex arithmetic.
pub fn bell_eval(order: usize, parts: usize, values: &[Complex64]) -> Result<Complex64> {
    bell_polynomial(order, parts)?.eval(values)
}

/// `j`-th derivative of `f∘g` from the outer jet `f^{(1..=j)}(g(x))` and the
/// inner jet `g^{(1..=j)}(x)`.
pub fn faa_di_bruno(order: usize, outer: &[Complex64], inner: &[Complex64]) -> Result<Complex64> {
    if order == 0 {
        return Err(Error::domain(
            "Faà di Bruno needs j >= 1; the zeroth derivative is the plain composition",
        ));
    }
    if outer.len() != order || inner.len() != order {
        return Err(Error::domain(format!(
            "Faà di Bruno of order {order} needs jets of length {order}, got {} and {}",
            outer.len(),
            inner.len()
        )));
    }
    let mut total = Complex64::zero();
    for parts in 1..=order {
        let poly = bell_polynomial(order, parts)?;
        total += outer[parts - 1] * poly.eval_unchecked(&inner[..order - parts + 1]);
    }
    Ok(total)
}

/// `j`-th derivative of `1/ω` from `ω` and its derivatives `ω^{(1..=j)}`.
pub fn reciprocal_derivatives(
    order: usize,
    omega_value: Complex64,
    omega_derivs: &[Complex64],
) -> Result<Complex64> {
    if omega_value.is_zero() {
        return Err(Error::Singular("1/ω with ω = 0".into()));
    }
    if order == 0 {
        return Ok(omega_value.inv());
    }
    if omega_derivs.len() < order {
        return Err(Error::domain(format!(
            "reciprocal derivative of order {order} needs {order} derivatives of ω, got {}",
            omega_derivs.len()
        )));
    }
    let inv = omega_value.inv();
    let mut total = Complex64::zero();
    let mut factorial = 1.0;
    for parts in 1..=order {
        factorial *= parts as f64;
        let sign = if parts % 2 == 0 { 1.0 } else { -1.0 };
        let poly = bell_polynomial(order, parts)?;
        total += sign
            * factorial
            * inv.powu(parts as u32 + 1)
            * poly.eval_unchecked(&omega_derivs[..order - parts + 1]);
    }
    Ok(total)
}

/// `j`-th derivative of `1/x`, i.e. `(-1)^j j! x^{-(j+1)}`.
pub fn inv_x_derivatives(order: usize, x: f64) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("1/x derivatives need x > 0, got {x}")));
    }
    let factorial: f64 = (1..=order).map(|k| k as f64).product();
    let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(Complex64::new(
        sign * factorial * x.powi(-(order as i32 + 1)),
        0.0,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn small_polynomials() {
        let b11 = bell_polynomial(1, 1).unwrap();
        assert_eq!(b11.terms().len(), 1);
        assert_eq!(b11.coefficient(&[1]), BigUint::from(1u32));

        let b32 = bell_polynomial(3, 2).unwrap();
        assert_eq!(b32.terms().len(), 1);
        assert_eq!(b32.coefficient(&[1, 1]), BigUint::from(3u32));

        let b42 = bell_polynomial(4, 2).unwrap();
        assert_eq!(b42.terms().len(), 2);
        assert_eq!(b42.coefficient(&[1, 0, 1]), BigUint::from(4u32));
        assert_eq!(b42.coefficient(&[0, 2, 0]), BigUint::from(3u32));
    }

    #[test]
    fn diagonal_is_power_of_first_variable() {
        for j in 0..=12 {
            let b = bell_polynomial(j, j).unwrap();
            assert_eq!(b.terms().len(), 1);
            assert_eq!(b.coefficient(&[j as u32]), BigUint::from(1u32));
        }
    }

    #[test]
    fn empty_row_is_zero() {
        assert!(bell_polynomial(5, 0).unwrap().is_zero());
        assert!(!bell_polynomial(0, 0).unwrap().is_zero());
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bell_polynomial(2, 3), Err(Error::Domain(_))));
        assert!(matches!(bell_polynomial(17, 2), Err(Error::Domain(_))));
        assert!(bell_polynomial_with_limit(20, 3, 24).is_ok());
        assert!(matches!(bell_eval(3, 2, &[c(1.0)]), Err(Error::Domain(_))));
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(bell_eval(3, 2, &[c(1.0), c(1.0)]).unwrap(), c(3.0));
        assert_eq!(bell_eval(2, 1, &[c(0.0), c(5.0)]).unwrap(), c(5.0));
    }

    #[test]
    fn display_is_sorted_monomials() {
        let text = bell_polynomial(4, 2).unwrap().to_string();
        assert_eq!(text, "3 * x2^2\n4 * x1^1 x3^1\n");
    }

    #[test]
    fn faa_di_bruno_low_orders() {
        let outer = [c(2.0), c(-3.0)];
        let inner = [c(5.0), c(7.0)];
        assert_eq!(faa_di_bruno(1, &outer[..1], &inner[..1]).unwrap(), c(10.0));
        // f''(g) g'^2 + f'(g) g''
        assert_eq!(
            faa_di_bruno(2, &outer, &inner).unwrap(),
            c(-3.0 * 25.0 + 2.0 * 7.0)
        );
        assert!(faa_di_bruno(0, &[], &[]).is_err());
        assert!(faa_di_bruno(2, &outer, &inner[..1]).is_err());
    }

    #[test]
    fn faa_di_bruno_with_identity_inner() {
        let outer: Vec<Complex64> = (1..=6).map(|k| Complex64::new(k as f64, -0.5)).collect();
        let mut inner = vec![Complex64::zero(); 6];
        inner[0] = c(1.0);
        for j in 1..=6 {
            let got = faa_di_bruno(j, &outer[..j], &inner[..j]).unwrap();
            assert!((got - outer[j - 1]).norm() < 1e-14);
        }
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(reciprocal_derivatives(1, c(2.0), &[c(3.0)]).unwrap(), c(-0.75));
        assert_eq!(reciprocal_derivatives(0, c(5.0), &[]).unwrap(), c(0.2));
        assert!(matches!(
            reciprocal_derivatives(1, c(0.0), &[c(1.0)]),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn inverse_x_examples() {
        assert_eq!(inv_x_derivatives(1, 1.0).unwrap(), c(-1.0));
        assert_eq!(inv_x_derivatives(2, 0.5).unwrap(), c(16.0));
        assert_eq!(inv_x_derivatives(3, 1.0).unwrap(), c(-6.0));
        assert!(inv_x_derivatives(0, 0.0).is_err());
        assert!(inv_x_derivatives(2, -1.0).is_err());
    }

    #[test]
    fn concurrent_cache_access() {
        let handles: Vec<_> = (0..4)
            .map(|t| {
                std::thread::spawn(move || {
                    (0..=12)
                        .map(|j| bell_polynomial(j, (j + t) % (j + 1)).unwrap().terms().len())
                        .sum::<usize>()
                })
            })
            .collect();
        let sums: Vec<usize> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(sums.iter().all(|&s| s > 0));
    }
}
