//! Closed-form scalar fields over the coordinates `t, s, x1..x9`.
//!
//! Expressions are immutable trees behind an [`Arc`], so cloning and sharing
//! subtrees is cheap. All constructors go through light structural
//! simplification (`0·x → 0`, `1·x → x`, constant folding); no further
//! algebraic rewriting is attempted.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A coordinate the expression language knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// The bordism/path parameter.
    T,
    /// The family parameter.
    S,
    /// Target coordinate `x1..x9` (1-based).
    X(u8),
}

impl Var {
    /// Target coordinate by 1-based index.
    pub fn x(index: usize) -> Var {
        assert!((1..=9).contains(&index), "target coordinates are x1..x9");
        Var::X(index as u8)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T => write!(f, "t"),
            Var::S => write!(f, "s"),
            Var::X(i) => write!(f, "x{i}"),
        }
    }
}

/// A (partial) assignment of values to variables.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Assignment {
    t: Option<f64>,
    s: Option<f64>,
    x: [Option<f64>; 9],
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_s(mut self, s: f64) -> Self {
        self.s = Some(s);
        self
    }

    /// Assigns `x1..xm` from a point of the target.
    pub fn with_point(mut self, point: &[f64]) -> Self {
        assert!(point.len() <= 9, "target dimension is at most 9");
        for (slot, &v) in self.x.iter_mut().zip(point) {
            *slot = Some(v);
        }
        self
    }

    pub fn with(mut self, var: Var, value: f64) -> Self {
        match var {
            Var::T => self.t = Some(value),
            Var::S => self.s = Some(value),
            Var::X(i) => self.x[i as usize - 1] = Some(value),
        }
        self
    }

    pub fn get(&self, var: Var) -> Option<f64> {
        match var {
            Var::T => self.t,
            Var::S => self.s,
            Var::X(i) => self.x[i as usize - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Var(Var),
    Add(SmoothExpr, SmoothExpr),
    Mul(SmoothExpr, SmoothExpr),
    Div(SmoothExpr, SmoothExpr),
    Pow(SmoothExpr, i32),
    Neg(SmoothExpr),
    Sin(SmoothExpr),
    Cos(SmoothExpr),
    Exp(SmoothExpr),
}

/// Closed-form smooth scalar expression with exact symbolic derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothExpr(Arc<Node>);

impl SmoothExpr {
    fn node(node: Node) -> Self {
        SmoothExpr(Arc::new(node))
    }

    pub fn constant(c: f64) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn var(v: Var) -> Self {
        Self::node(Node::Var(v))
    }

    pub fn t() -> Self {
        Self::var(Var::T)
    }

    pub fn s() -> Self {
        Self::var(Var::S)
    }

    pub fn x(index: usize) -> Self {
        Self::var(Var::x(index))
    }

    /// Returns the value if the expression is a literal constant.
    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn add(a: &SmoothExpr, b: &SmoothExpr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Self::constant(x + y),
            (Some(x), _) if x == 0.0 => b.clone(),
            (_, Some(y)) if y == 0.0 => a.clone(),
            _ => Self::node(Node::Add(a.clone(), b.clone())),
        }
    }

    pub fn sub(a: &SmoothExpr, b: &SmoothExpr) -> Self {
        Self::add(a, &Self::neg(b))
    }

    pub fn mul(a: &SmoothExpr, b: &SmoothExpr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Self::constant(x * y),
            (Some(x), _) if x == 0.0 => Self::zero(),
            (_, Some(y)) if y == 0.0 => Self::zero(),
            (Some(x), _) if x == 1.0 => b.clone(),
            (_, Some(y)) if y == 1.0 => a.clone(),
            (Some(x), _) if x == -1.0 => Self::neg(b),
            (_, Some(y)) if y == -1.0 => Self::neg(a),
            _ => Self::node(Node::Mul(a.clone(), b.clone())),
        }
    }

    pub fn div(a: &SmoothExpr, b: &SmoothExpr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Self::constant(x / y),
            (_, Some(y)) if y == 1.0 => a.clone(),
            (Some(x), _) if x == 0.0 && b.as_const() != Some(0.0) => Self::zero(),
            _ => Self::node(Node::Div(a.clone(), b.clone())),
        }
    }

    pub fn powi(a: &SmoothExpr, k: i32) -> Self {
        match (k, a.as_const()) {
            (0, _) => Self::one(),
            (1, _) => a.clone(),
            (_, Some(x)) if !(x == 0.0 && k < 0) => Self::constant(x.powi(k)),
            _ => Self::node(Node::Pow(a.clone(), k)),
        }
    }

    pub fn neg(a: &SmoothExpr) -> Self {
        match &*a.0 {
            Node::Const(c) => Self::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Self::node(Node::Neg(a.clone())),
        }
    }

    pub fn sin(a: &SmoothExpr) -> Self {
        match a.as_const() {
            Some(c) => Self::constant(c.sin()),
            None => Self::node(Node::Sin(a.clone())),
        }
    }

    pub fn cos(a: &SmoothExpr) -> Self {
        match a.as_const() {
            Some(c) => Self::constant(c.cos()),
            None => Self::node(Node::Cos(a.clone())),
        }
    }

    pub fn exp(a: &SmoothExpr) -> Self {
        match a.as_const() {
            Some(c) => Self::constant(c.exp()),
            None => Self::node(Node::Exp(a.clone())),
        }
    }

    /// Every variable occurring in the expression.
    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match &*self.0 {
            Node::Const(_) => {}
            Node::Var(v) => {
                out.insert(*v);
            }
            Node::Add(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Node::Pow(a, _) | Node::Neg(a) | Node::Sin(a) | Node::Cos(a) | Node::Exp(a) => a.collect_vars(out),
        }
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match &*self.0 {
            Node::Const(_) => false,
            Node::Var(v) => *v == var,
            Node::Add(a, b) | Node::Mul(a, b) | Node::Div(a, b) => a.depends_on(var) || b.depends_on(var),
            Node::Pow(a, _) | Node::Neg(a) | Node::Sin(a) | Node::Cos(a) | Node::Exp(a) => a.depends_on(var),
        }
    }

    /// Evaluates the expression at a point.
    pub fn eval(&self, at: &Assignment) -> Result<f64> {
        let value = match &*self.0 {
            Node::Const(c) => return Ok(*c),
            Node::Var(v) => return at.get(*v).ok_or(Error::Unassigned(*v)),
            Node::Add(a, b) => a.eval(at)? + b.eval(at)?,
            Node::Mul(a, b) => a.eval(at)? * b.eval(at)?,
            Node::Div(a, b) => {
                let num = a.eval(at)?;
                let den = b.eval(at)?;
                if den == 0.0 {
                    return Err(Error::DivisionByZero {
                        subtree: self.to_string(),
                    });
                }
                num / den
            }
            Node::Pow(a, k) => {
                let base = a.eval(at)?;
                if base == 0.0 && *k < 0 {
                    return Err(Error::DivisionByZero {
                        subtree: self.to_string(),
                    });
                }
                base.powi(*k)
            }
            Node::Neg(a) => -a.eval(at)?,
            Node::Sin(a) => a.eval(at)?.sin(),
            Node::Cos(a) => a.eval(at)?.cos(),
            Node::Exp(a) => a.eval(at)?.exp(),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFinite {
                subtree: self.to_string(),
            })
        }
    }

    /// Exact symbolic derivative with respect to `var`.
    pub fn differentiate(&self, var: Var) -> SmoothExpr {
        match &*self.0 {
            Node::Const(_) => Self::zero(),
            Node::Var(v) => {
                if *v == var {
                    Self::one()
                } else {
                    Self::zero()
                }
            }
            Node::Add(a, b) => Self::add(&a.differentiate(var), &b.differentiate(var)),
            Node::Mul(a, b) => Self::add(
                &Self::mul(&a.differentiate(var), b),
                &Self::mul(a, &b.differentiate(var)),
            ),
            Node::Div(a, b) => {
                let num = Self::sub(
                    &Self::mul(&a.differentiate(var), b),
                    &Self::mul(a, &b.differentiate(var)),
                );
                Self::div(&num, &Self::powi(b, 2))
            }
            Node::Pow(a, k) => Self::mul(
                &Self::mul(&Self::constant(*k as f64), &Self::powi(a, k - 1)),
                &a.differentiate(var),
            ),
            Node::Neg(a) => Self::neg(&a.differentiate(var)),
            Node::Sin(a) => Self::mul(&Self::cos(a), &a.differentiate(var)),
            Node::Cos(a) => Self::neg(&Self::mul(&Self::sin(a), &a.differentiate(var))),
            Node::Exp(a) => Self::mul(&Self::exp(a), &a.differentiate(var)),
        }
    }

    /// Replaces every occurrence of `var` by `replacement`.
    pub fn substitute(&self, var: Var, replacement: &SmoothExpr) -> SmoothExpr {
        if !self.depends_on(var) {
            return self.clone();
        }
        match &*self.0 {
            Node::Const(_) => self.clone(),
            Node::Var(v) => {
                if *v == var {
                    replacement.clone()
                } else {
                    self.clone()
                }
            }
            Node::Add(a, b) => Self::add(&a.substitute(var, replacement), &b.substitute(var, replacement)),
            Node::Mul(a, b) => Self::mul(&a.substitute(var, replacement), &b.substitute(var, replacement)),
            Node::Div(a, b) => Self::div(&a.substitute(var, replacement), &b.substitute(var, replacement)),
            Node::Pow(a, k) => Self::powi(&a.substitute(var, replacement), *k),
            Node::Neg(a) => Self::neg(&a.substitute(var, replacement)),
            Node::Sin(a) => Self::sin(&a.substitute(var, replacement)),
            Node::Cos(a) => Self::cos(&a.substitute(var, replacement)),
            Node::Exp(a) => Self::exp(&a.substitute(var, replacement)),
        }
    }

    /// Fixes `var` to a numeric value.
    pub fn bind(&self, var: Var, value: f64) -> SmoothExpr {
        self.substitute(var, &Self::constant(value))
    }

    fn precedence(&self) -> u8 {
        match &*self.0 {
            Node::Add(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(_) => 3,
            Node::Const(c) if *c < 0.0 => 3,
            Node::Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for SmoothExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(v) => write!(f, "{v}"),
            Node::Add(a, b) => {
                a.fmt_child(f, 1)?;
                match &*b.0 {
                    Node::Neg(inner) => {
                        write!(f, " - ")?;
                        inner.fmt_child(f, 2)
                    }
                    Node::Const(c) if *c < 0.0 => write!(f, " - {}", -c),
                    _ => {
                        write!(f, " + ")?;
                        b.fmt_child(f, 2)
                    }
                }
            }
            Node::Mul(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, " * ")?;
                b.fmt_child(f, 3)
            }
            Node::Div(a, b) => {
                a.fmt_child(f, 2)?;
                write!(f, " / ")?;
                b.fmt_child(f, 3)
            }
            Node::Pow(a, k) => {
                a.fmt_child(f, 5)?;
                write!(f, "^{k}")
            }
            Node::Neg(a) => {
                write!(f, "-")?;
                a.fmt_child(f, 3)
            }
            Node::Sin(a) => write!(f, "sin({a})"),
            Node::Cos(a) => write!(f, "cos({a})"),
            Node::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

impl From<f64> for SmoothExpr {
    fn from(c: f64) -> Self {
        SmoothExpr::constant(c)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $ctor:ident) => {
        impl std::ops::$trait<&SmoothExpr> for &SmoothExpr {
            type Output = SmoothExpr;
            fn $method(self, rhs: &SmoothExpr) -> SmoothExpr {
                SmoothExpr::$ctor(self, rhs)
            }
        }
        impl std::ops::$trait<SmoothExpr> for SmoothExpr {
            type Output = SmoothExpr;
            fn $method(self, rhs: SmoothExpr) -> SmoothExpr {
                SmoothExpr::$ctor(&self, &rhs)
            }
        }
        impl std::ops::$trait<f64> for SmoothExpr {
            type Output = SmoothExpr;
            fn $method(self, rhs: f64) -> SmoothExpr {
                SmoothExpr::$ctor(&self, &SmoothExpr::constant(rhs))
            }
        }
        impl std::ops::$trait<SmoothExpr> for f64 {
            type Output = SmoothExpr;
            fn $method(self, rhs: SmoothExpr) -> SmoothExpr {
                SmoothExpr::$ctor(&SmoothExpr::constant(self), &rhs)
            }
        }
    };
}

binary_op!(Add, add, add);
binary_op!(Sub, sub, sub);
binary_op!(Mul, mul, mul);
binary_op!(Div, div, div);

impl std::ops::Neg for SmoothExpr {
    type Output = SmoothExpr;
    fn neg(self) -> SmoothExpr {
        SmoothExpr::neg(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at_t(t: f64) -> Assignment {
        Assignment::new().with_t(t)
    }

    #[test]
    fn evaluates_polynomials_and_functions() {
        let t = SmoothExpr::t();
        assert_eq!(SmoothExpr::powi(&t, 2).eval(&at_t(3.0)).unwrap(), 9.0);
        assert_eq!(SmoothExpr::sin(&t).eval(&at_t(0.0)).unwrap(), 0.0);
        let e = SmoothExpr::exp(&t) * t.clone();
        assert_eq!(e.eval(&at_t(1.0)).unwrap(), std::f64::consts::E);
    }

    #[test]
    fn unassigned_variable_is_reported() {
        let e = SmoothExpr::t() + SmoothExpr::x(2);
        assert_eq!(e.eval(&at_t(1.0)), Err(Error::Unassigned(Var::X(2))));
    }

    #[test]
    fn division_by_zero_names_subtree() {
        let e = SmoothExpr::one() / (SmoothExpr::t() - 1.0);
        match e.eval(&at_t(1.0)) {
            Err(Error::DivisionByZero { subtree }) => assert_eq!(subtree, "1 / (t - 1)"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn derivatives_simplify_structurally() {
        let t = SmoothExpr::t();
        let sq = SmoothExpr::powi(&t, 2);
        assert_eq!(sq.differentiate(Var::T), SmoothExpr::constant(2.0) * t.clone());
        assert_eq!(SmoothExpr::sin(&t).differentiate(Var::T), SmoothExpr::cos(&t));
        assert!(SmoothExpr::x(1).differentiate(Var::T).is_zero());
    }

    #[test]
    fn product_rule_matches_central_difference() {
        let t = SmoothExpr::t();
        let e = t.clone() * SmoothExpr::exp(&t);
        let d = e.differentiate(Var::T).eval(&at_t(1.0)).unwrap();
        assert!((d - 2.0 * std::f64::consts::E).abs() < 1e-14);
        let h = 1e-5;
        let fd = (e.eval(&at_t(1.0 + h)).unwrap() - e.eval(&at_t(1.0 - h)).unwrap()) / (2.0 * h);
        assert!((d - fd).abs() <= 1e-8);
    }

    #[test]
    fn substitution_composes() {
        let t = SmoothExpr::t();
        let e = SmoothExpr::powi(&t, 2) + SmoothExpr::s();
        let shifted = e.substitute(Var::T, &(t.clone() + 1.0)).bind(Var::S, 2.0);
        assert_eq!(shifted.eval(&at_t(2.0)).unwrap(), 11.0);
        assert!(!shifted.depends_on(Var::S));
    }

    #[test]
    fn display_is_minimally_parenthesized() {
        let t = SmoothExpr::t();
        let x = SmoothExpr::x(1);
        let e = (t.clone() + x.clone()) * SmoothExpr::neg(&x) - SmoothExpr::powi(&t, -2);
        assert_eq!(e.to_string(), "(t + x1) * -x1 - t^-2");
    }
}
