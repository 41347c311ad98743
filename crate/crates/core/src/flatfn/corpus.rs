//! Named functions addressable from the command line.

use num_complex::Complex64;

use super::expr::FunctionExpr;
use crate::error::{Error, Result};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `e^{-1/x}`.
pub fn expm1overx() -> FunctionExpr {
    FunctionExpr::exp_power(c(-1.0), -1.0)
}

/// `e · x^{-2} e^{-1/x}`: non-negative, flat, with unit integral over `[0, 1]`.
pub fn flatbump() -> FunctionExpr {
    FunctionExpr::scale(c(std::f64::consts::E), FunctionExpr::power(-2.0) * expm1overx())
}

/// `x^t e^{-1/x}`.
pub fn powerflat(t: f64) -> FunctionExpr {
    FunctionExpr::power(t) * expm1overx()
}

/// `e^{x^{p+1} / (λ (p+1))}`, and `x^{1/λ}` for `p = -1`.
pub fn hlp(p: f64, lambda: Complex64) -> Result<FunctionExpr> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::domain("hlp needs λ ≠ 0"));
    }
    if p == -1.0 {
        Ok(FunctionExpr::complex_power(lambda.inv()))
    } else {
        Ok(FunctionExpr::exp_power((lambda * (p + 1.0)).inv(), p + 1.0))
    }
}

/// Flat functions used by identity checks throughout the crate.
pub fn flat_corpus() -> Vec<(&'static str, FunctionExpr)> {
    vec![
        ("exp(-1/x)", expm1overx()),
        ("x^-3 exp(-1/x)", powerflat(-3.0)),
        ("x^2 exp(-2/x)", FunctionExpr::power(2.0) * FunctionExpr::exp_power(c(-2.0), -1.0)),
        ("exp(-1/x^2)", FunctionExpr::exp_power(c(-1.0), -2.0)),
        (
            "exp((-1+2i)/x)",
            FunctionExpr::exp_power(Complex64::new(-1.0, 2.0), -1.0),
        ),
        ("flatbump", flatbump()),
        (
            "exp(-1/x) - 0.5 x^-1 exp(-3/x)",
            expm1overx() - 0.5 * (FunctionExpr::power(-1.0) * FunctionExpr::exp_power(c(-3.0), -1.0)),
        ),
        ("x^0.5 exp(-1/sqrt x)", FunctionExpr::power(0.5) * FunctionExpr::exp_power(c(-1.0), -0.5)),
    ]
}

fn parse_args(s: &str, name: &str) -> Result<Vec<f64>> {
    let inner = s
        .strip_prefix(name)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::domain(format!("malformed corpus name {s:?}")))?;
    inner
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("bad number {a:?} in {s:?}")))
        })
        .collect()
}

/// Resolves a corpus name: `expm1overx`, `flatbump`, `powerflat(t)`,
/// `hlp(p,re)` or `hlp(p,re,im)`.
pub fn lookup(name: &str) -> Result<FunctionExpr> {
    let name = name.trim();
    match name {
        "expm1overx" => return Ok(expm1overx()),
        "flatbump" => return Ok(flatbump()),
        _ => {}
    }
    if name.starts_with("powerflat") {
        match parse_args(name, "powerflat")?.as_slice() {
            [t] => return Ok(powerflat(*t)),
            _ => return Err(Error::domain("powerflat takes one argument")),
        }
    }
    if name.starts_with("hlp") {
        return match parse_args(name, "hlp")?.as_slice() {
            [p, re] => hlp(*p, c(*re)),
            [p, re, im] => hlp(*p, Complex64::new(*re, *im)),
            _ => Err(Error::domain("hlp takes (p, re) or (p, re, im)")),
        };
    }
    Err(Error::domain(format!("unknown corpus function {name:?}")))
}

pub const CORPUS_NAMES: &[&str] = &["expm1overx", "flatbump", "powerflat(t)", "hlp(p,re[,im])"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatfn::eval::eval;

    #[test]
    fn names_resolve() {
        assert_eq!(lookup("expm1overx").unwrap(), expm1overx());
        assert_eq!(lookup("powerflat(-7)").unwrap(), powerflat(-7.0));
        assert_eq!(lookup(" hlp(-2, 1) ").unwrap(), hlp(-2.0, c(1.0)).unwrap());
        assert_eq!(
            lookup("hlp(0,1,1)").unwrap(),
            hlp(0.0, Complex64::new(1.0, 1.0)).unwrap()
        );
        assert!(lookup("nope").is_err());
        assert!(lookup("powerflat(a)").is_err());
        assert!(lookup("hlp(1)").is_err());
    }

    #[test]
    fn hlp_minus_two_gives_exp_minus_inverse() {
        let h = hlp(-2.0, c(1.0)).unwrap();
        assert_eq!(h, expm1overx());
        let cesaro = hlp(-1.0, c(0.5)).unwrap();
        assert!((eval(&cesaro, 0.5).unwrap().re - 0.25).abs() < 1e-15);
    }
}
