//! Value parsers for command-line arguments.

use flatspec::flatfn::Grid;
use flatspec::operators::{Family, OperatorSpec};
use flatspec::Complex64;

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("bad number {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite number {s:?}"))
    }
}

/// `re,im` or a bare real part.
pub fn complex(s: &str) -> Result<Complex64, String> {
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(number(re)?, number(im)?)),
        None => Ok(Complex64::new(number(s)?, 0.0)),
    }
}

/// `a:b:n`, `n ≥ 1` equally spaced values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

pub fn range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("expected a:b:n, got {s:?}"));
    };
    let n: usize = n.trim().parse().map_err(|_| format!("bad count in {s:?}"))?;
    if n == 0 {
        return Err(format!("count must be positive in {s:?}"));
    }
    Ok(Range {
        a: number(a)?,
        b: number(b)?,
        n,
    })
}

/// A comma list `x1,x2,…` or a range `a:b:n` of points in `(0, 1]`.
pub fn points(s: &str) -> Result<Grid, String> {
    let pts = if s.contains(':') {
        let r = range(s)?;
        flatspec::spectra::linspace(r.a, r.b, r.n)
    } else {
        s.split(',').map(number).collect::<Result<_, _>>()?
    };
    Grid::new(pts).map_err(|e| e.to_string())
}

pub fn family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

/// A named family, `d`, `v` or `mult:p`.
pub fn operator(s: &str) -> Result<OperatorSpec, String> {
    let t = s.trim().to_ascii_lowercase();
    match t.as_str() {
        "d" => return Ok(OperatorSpec::D),
        "v" => return Ok(OperatorSpec::V),
        _ => {}
    }
    if let Some(p) = t.strip_prefix("mult:") {
        return Ok(OperatorSpec::power_mult(number(p)?));
    }
    family(&t).map(OperatorSpec::Family)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(complex("-2,0.5"), Ok(Complex64::new(-2.0, 0.5)));
        assert_eq!(complex("3"), Ok(Complex64::new(3.0, 0.0)));
        assert!(complex("1,x").is_err());
        assert!(complex("nan").is_err());
    }

    #[test]
    fn ranges_and_points() {
        assert_eq!(range("-1:1:3"), Ok(Range { a: -1.0, b: 1.0, n: 3 }));
        assert!(range("0:1").is_err());
        assert!(range("0:1:0").is_err());
        assert_eq!(points("0.5,1").unwrap().points(), &[0.5, 1.0]);
        assert_eq!(points("0.25:1:4").unwrap().len(), 4);
        assert!(points("0,1").is_err());
    }

    #[test]
    fn operators() {
        assert_eq!(operator("D"), Ok(OperatorSpec::D));
        assert_eq!(operator("mult:-2"), Ok(OperatorSpec::power_mult(-2.0)));
        assert_eq!(operator("mv:-2"), Ok(OperatorSpec::Family(Family::mv(-2.0))));
        assert!(operator("mv").is_err());
        assert!(operator("xyz").is_err());
    }
}
