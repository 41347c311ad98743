use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};

/// Node of a [`FunctionExpr`] tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Complex64),
    /// `x^t`.
    Power(Complex64),
    /// `e^{c x^q}`.
    ExpPower { c: Complex64, q: f64 },
    Sum(Vec<FunctionExpr>),
    Product(Vec<FunctionExpr>),
    Scale(Complex64, FunctionExpr),
    /// `x ↦ ∫_0^x child(t) dt`.
    VolterraInt(FunctionExpr),
    /// `x ↦ ∫_0^x e^{c(x^q - t^q)} child(t) dt`.
    WeightedVolterra {
        c: Complex64,
        q: f64,
        child: FunctionExpr,
    },
    /// `x ↦ ∫_0^x (x/t)^s child(t) dt`.
    PowerWeightedVolterra { s: Complex64, child: FunctionExpr },
    /// `k`-th derivative of the child, evaluated from its jet.
    Deriv(usize, FunctionExpr),
}

/// Immutable, cheaply clonable expression for a function on `(0, ∞)`.
///
/// Constructors simplify locally (constant folding, merging of powers and of
/// exponentials with equal `q`, flattening of sums and products) so that
/// derivative trees stay small.
#[derive(Clone)]
pub struct FunctionExpr(Arc<Node>);

impl PartialEq for FunctionExpr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn c_real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl FunctionExpr {
    fn wrap(node: Node) -> Self {
        FunctionExpr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn ptr(&self) -> *const Node {
        Arc::as_ptr(&self.0)
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::zero())
    }

    pub fn one() -> Self {
        Self::constant(Complex64::one())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::wrap(Node::Const(c))
    }

    pub fn real(c: f64) -> Self {
        Self::constant(c_real(c))
    }

    /// `x^t` for real `t`.
    pub fn power(t: f64) -> Self {
        Self::complex_power(c_real(t))
    }

    /// `x^t`, taken as `e^{t ln x}`.
    pub fn complex_power(t: Complex64) -> Self {
        if t.is_zero() {
            Self::one()
        } else {
            Self::wrap(Node::Power(t))
        }
    }

    /// `x`.
    pub fn x() -> Self {
        Self::power(1.0)
    }

    /// `e^{c x^q}`.
    pub fn exp_power(c: Complex64, q: f64) -> Self {
        if c.is_zero() {
            Self::one()
        } else if q == 0.0 {
            Self::constant(c.exp())
        } else {
            Self::wrap(Node::ExpPower { c, q })
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Const(c) if c.is_zero())
    }

    fn as_const(&self) -> Option<Complex64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Splits off a constant factor: `f = k · rest`.
    fn split_scale(&self) -> (Complex64, FunctionExpr) {
        match self.node() {
            Node::Scale(k, inner) => (*k, inner.clone()),
            Node::Const(c) => (*c, Self::one()),
            _ => (Complex64::one(), self.clone()),
        }
    }

    pub fn scale(k: Complex64, f: FunctionExpr) -> Self {
        if k.is_zero() || f.is_zero() {
            return Self::zero();
        }
        if k.is_one() {
            return f;
        }
        match f.node() {
            Node::Const(c) => Self::constant(k * c),
            Node::Scale(k2, inner) => Self::scale(k * k2, inner.clone()),
            _ => Self::wrap(Node::Scale(k, f)),
        }
    }

    pub fn sum(terms: Vec<FunctionExpr>) -> Self {
        let mut flat = Vec::new();
        for t in terms {
            match t.node() {
                Node::Sum(inner) => flat.extend(inner.iter().cloned()),
                _ => flat.push(t),
            }
        }
        let mut constant = Complex64::zero();
        let mut merged: Vec<(Complex64, FunctionExpr)> = Vec::new();
        for t in flat {
            if let Some(c) = t.as_const() {
                constant += c;
                continue;
            }
            let (k, rest) = t.split_scale();
            match merged.iter_mut().find(|(_, r)| *r == rest) {
                Some(slot) => slot.0 += k,
                None => merged.push((k, rest)),
            }
        }
        let mut out: Vec<FunctionExpr> = merged
            .into_iter()
            .filter(|(k, _)| !k.is_zero())
            .map(|(k, r)| Self::scale(k, r))
            .collect();
        if !constant.is_zero() {
            out.push(Self::constant(constant));
        }
        match out.len() {
            0 => Self::zero(),
            1 => out.pop().unwrap(),
            _ => Self::wrap(Node::Sum(out)),
        }
    }

    pub fn product(factors: Vec<FunctionExpr>) -> Self {
        let mut flat = Vec::new();
        let mut k = Complex64::one();
        for f in factors {
            let (k2, rest) = f.split_scale();
            k *= k2;
            match rest.node() {
                Node::Product(inner) => flat.extend(inner.iter().cloned()),
                _ => flat.push(rest),
            }
        }
        if k.is_zero() {
            return Self::zero();
        }
        let mut power = Complex64::zero();
        let mut exps: Vec<(f64, Complex64)> = Vec::new();
        let mut others = Vec::new();
        for f in flat {
            match f.node() {
                Node::Const(c) => k *= c,
                Node::Power(t) => power += t,
                Node::ExpPower { c, q } => match exps.iter_mut().find(|(q2, _)| q2 == q) {
                    Some(slot) => slot.1 += c,
                    None => exps.push((*q, *c)),
                },
                _ => others.push(f),
            }
        }
        if k.is_zero() {
            return Self::zero();
        }
        let mut out = Vec::new();
        if !power.is_zero() {
            out.push(Self::complex_power(power));
        }
        for (q, c) in exps {
            let e = Self::exp_power(c, q);
            if let Some(v) = e.as_const() {
                k *= v;
            } else {
                out.push(e);
            }
        }
        out.extend(others);
        let body = match out.len() {
            0 => Self::one(),
            1 => out.pop().unwrap(),
            _ => Self::wrap(Node::Product(out)),
        };
        Self::scale(k, body)
    }

    /// `∫_0^x f(t) dt` as an unevaluated node.
    pub fn volterra(f: FunctionExpr) -> Self {
        if f.is_zero() {
            Self::zero()
        } else {
            Self::wrap(Node::VolterraInt(f))
        }
    }

    /// `∫_0^x e^{c(x^q - t^q)} f(t) dt`.
    pub fn weighted_volterra(c: Complex64, q: f64, f: FunctionExpr) -> Self {
        if f.is_zero() {
            Self::zero()
        } else if c.is_zero() || q == 0.0 {
            Self::volterra(f)
        } else {
            Self::wrap(Node::WeightedVolterra { c, q, child: f })
        }
    }

    /// `∫_0^x (x/t)^s f(t) dt`.
    pub fn power_weighted_volterra(s: Complex64, f: FunctionExpr) -> Self {
        if f.is_zero() {
            Self::zero()
        } else if s.is_zero() {
            Self::volterra(f)
        } else {
            Self::wrap(Node::PowerWeightedVolterra { s, child: f })
        }
    }

    /// Unexpanded `k`-th derivative node.
    pub fn deriv_node(k: usize, f: FunctionExpr) -> Self {
        if k == 0 || f.is_zero() {
            return f;
        }
        match f.node() {
            Node::Deriv(k2, inner) => Self::wrap(Node::Deriv(k + k2, inner.clone())),
            _ => Self::wrap(Node::Deriv(k, f)),
        }
    }

    /// First derivative with `Deriv` nodes pushed down.
    pub fn deriv1(&self) -> FunctionExpr {
        match self.node() {
            Node::Const(_) => Self::zero(),
            Node::Power(t) => Self::scale(*t, Self::complex_power(t - 1.0)),
            Node::ExpPower { c, q } => Self::product(vec![
                Self::scale(c * q, Self::power(q - 1.0)),
                self.clone(),
            ]),
            Node::Sum(terms) => Self::sum(terms.iter().map(|t| t.deriv1()).collect()),
            Node::Product(factors) => {
                let mut terms = Vec::with_capacity(factors.len());
                for i in 0..factors.len() {
                    let d = factors[i].deriv1();
                    if d.is_zero() {
                        continue;
                    }
                    let mut fs = factors.clone();
                    fs[i] = d;
                    terms.push(Self::product(fs));
                }
                Self::sum(terms)
            }
            Node::Scale(k, f) => Self::scale(*k, f.deriv1()),
            Node::VolterraInt(g) => g.clone(),
            Node::WeightedVolterra { c, q, child } => Self::sum(vec![
                child.clone(),
                Self::product(vec![Self::scale(c * q, Self::power(q - 1.0)), self.clone()]),
            ]),
            Node::PowerWeightedVolterra { s, child } => Self::sum(vec![
                child.clone(),
                Self::product(vec![Self::scale(*s, Self::power(-1.0)), self.clone()]),
            ]),
            Node::Deriv(k, g) => g.deriv(k + 1),
        }
    }

    /// `j`-th derivative with `Deriv` nodes pushed down.
    pub fn deriv(&self, j: usize) -> FunctionExpr {
        let mut f = self.clone();
        for _ in 0..j {
            f = f.deriv1();
        }
        f
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Power(_) | Node::ExpPower { .. } => 0,
            Node::Sum(v) | Node::Product(v) => v.iter().map(|c| c.size()).sum(),
            Node::Scale(_, f)
            | Node::VolterraInt(f)
            | Node::WeightedVolterra { child: f, .. }
            | Node::PowerWeightedVolterra { child: f, .. }
            | Node::Deriv(_, f) => f.size(),
        }
    }

    /// True when evaluation needs quadrature somewhere in the tree.
    pub fn has_integral(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Power(_) | Node::ExpPower { .. } => false,
            Node::Sum(v) | Node::Product(v) => v.iter().any(|c| c.has_integral()),
            Node::Scale(_, f) | Node::Deriv(_, f) => f.has_integral(),
            Node::VolterraInt(_)
            | Node::WeightedVolterra { .. }
            | Node::PowerWeightedVolterra { .. } => true,
        }
    }
}

fn fmt_c(c: &Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[FunctionExpr], sep: &str| {
            v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(sep)
        };
        match self.node() {
            Node::Const(c) => write!(f, "{}", fmt_c(c)),
            Node::Power(t) => write!(f, "x^{}", fmt_c(t)),
            Node::ExpPower { c, q } => write!(f, "exp({}*x^{})", fmt_c(c), q),
            Node::Sum(v) => write!(f, "({})", join(v, " + ")),
            Node::Product(v) => write!(f, "{}", join(v, "*")),
            Node::Scale(k, g) => write!(f, "{}*{}", fmt_c(k), g),
            Node::VolterraInt(g) => write!(f, "V[{g}]"),
            Node::WeightedVolterra { c, q, child } => {
                write!(f, "W[{}, {}; {}]", fmt_c(c), q, child)
            }
            Node::PowerWeightedVolterra { s, child } => write!(f, "P[{}; {}]", fmt_c(s), child),
            Node::Deriv(k, g) => write!(f, "D^{k}[{g}]"),
        }
    }
}

impl Add for FunctionExpr {
    type Output = FunctionExpr;
    fn add(self, rhs: Self) -> Self {
        FunctionExpr::sum(vec![self, rhs])
    }
}

impl Sub for FunctionExpr {
    type Output = FunctionExpr;
    fn sub(self, rhs: Self) -> Self {
        FunctionExpr::sum(vec![self, -rhs])
    }
}

impl Mul for FunctionExpr {
    type Output = FunctionExpr;
    fn mul(self, rhs: Self) -> Self {
        FunctionExpr::product(vec![self, rhs])
    }
}

impl Mul<FunctionExpr> for Complex64 {
    type Output = FunctionExpr;
    fn mul(self, rhs: FunctionExpr) -> FunctionExpr {
        FunctionExpr::scale(self, rhs)
    }
}

impl Mul<FunctionExpr> for f64 {
    type Output = FunctionExpr;
    fn mul(self, rhs: FunctionExpr) -> FunctionExpr {
        FunctionExpr::scale(c_real(self), rhs)
    }
}

impl Neg for FunctionExpr {
    type Output = FunctionExpr;
    fn neg(self) -> Self {
        FunctionExpr::scale(c_real(-1.0), self)
    }
}
