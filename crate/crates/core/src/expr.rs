//! Analytic expression trees: parsing, principal-branch evaluation,
//! symbolic differentiation, and the bridge into exact polynomials.
//!
//! Expressions are kept in a normalized structural form (flattened sums
//! and products, folded constants, combined like terms and like bases)
//! so that identities such as `tr(JX) = 0` cancel structurally.
//! Normalization does not attempt canonical rational-function or radical
//! simplification; zero-testing beyond the structural form is delegated
//! to callers (exact polynomial expansion or numeric sampling).

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::{Polynomial, PolyError};
use crate::vars::VarSet;
use crate::{Rational, C64};

/// Minimum distance from the closed negative real axis required to
/// evaluate a non-integer power, and the modulus below which a negative
/// power counts as division by zero.
pub const BRANCH_GUARD: f64 = 1e-9;

/// Largest exponent magnitude the parser accepts.
pub const MAX_EXPONENT: i64 = 1_000_000;

/// A normalized analytic expression.
///
/// Powers carry exact rational exponents; the polynomial-safe fragment
/// is exactly the set of expressions whose exponents are nonnegative
/// integers. Values are immutable, and all operations are pure.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Expr {
    Const(Rational),
    Var(usize),
    Pow(Box<Expr>, Rational),
    Prod(Vec<Expr>),
    Sum(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    Syntax { offset: usize, message: String },
    UndeclaredVariable { offset: usize, name: String },
    NonConstantExponent { offset: usize },
    ExponentTooLarge { offset: usize },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { offset, message } => {
                write!(f, "syntax error at offset {offset}: {message}")
            }
            ParseError::UndeclaredVariable { offset, name } => {
                write!(f, "undeclared variable `{name}` at offset {offset}")
            }
            ParseError::NonConstantExponent { offset } => {
                write!(f, "exponent at offset {offset} is not a rational constant")
            }
            ParseError::ExponentTooLarge { offset } => {
                write!(f, "exponent at offset {offset} exceeds the supported range")
            }
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    UnassignedVariable { index: usize },
    DivisionByZero,
    BranchCut,
    Overflow,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UnassignedVariable { index } => {
                write!(f, "variable #{index} has no assigned value")
            }
            EvalError::DivisionByZero => write!(f, "division by zero (denominator modulus below guard)"),
            EvalError::BranchCut => write!(f, "branch-cut violation (base too close to the negative real axis)"),
            EvalError::Overflow => write!(f, "evaluation overflow (non-finite value)"),
        }
    }
}

impl core::error::Error for EvalError {}

/// Raised by [`Expr::to_polynomial`] outside the polynomial fragment;
/// carries the printed offending subexpression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonPolynomialError {
    pub node: String,
}

impl fmt::Display for NonPolynomialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expression is not polynomial at `{}`", self.node)
    }
}

impl core::error::Error for NonPolynomialError {}

fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn rat_pow_int(base: &Rational, exp: &BigInt) -> Rational {
    // Caller guarantees |exp| <= MAX_EXPONENT and base != 0 for negative exp.
    let mag = exp.magnitude().to_u32().expect("exponent magnitude fits u32");
    let p = Rational::new(base.numer().pow(mag), base.denom().pow(mag));
    if exp.is_negative() {
        p.recip()
    } else {
        p
    }
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(Rational::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(rat_int(n))
    }

    pub fn ratio(p: i64, q: i64) -> Expr {
        Expr::Const(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn constant(q: Rational) -> Expr {
        Expr::Const(q)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Normalized sum of the given expressions.
    ///
    /// Flattens nested sums, folds constants, combines like terms (equal
    /// non-constant cores) and sorts children canonically.
    pub fn sum(items: Vec<Expr>) -> Expr {
        let mut constant = Rational::zero();
        let mut cores: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut stack: Vec<Expr> = items;
        stack.reverse();
        while let Some(item) = stack.pop() {
            match item {
                Expr::Sum(children) => {
                    for c in children.into_iter().rev() {
                        stack.push(c);
                    }
                }
                Expr::Const(c) => constant += c,
                other => {
                    let (coeff, core) = split_coefficient(other);
                    let entry = cores.entry(core).or_insert_with(Rational::zero);
                    *entry += coeff;
                }
            }
        }
        let mut children: Vec<Expr> = Vec::with_capacity(cores.len() + 1);
        if !constant.is_zero() {
            children.push(Expr::Const(constant));
        }
        for (core, coeff) in cores {
            if coeff.is_zero() {
                continue;
            }
            children.push(attach_coefficient(coeff, core));
        }
        children.sort();
        match children.len() {
            0 => Expr::zero(),
            1 => children.pop().expect("len checked"),
            _ => Expr::Sum(children),
        }
    }

    /// Normalized product: flattens, folds constants, combines equal
    /// bases by adding exponents (valid for the principal branch).
    pub fn prod(items: Vec<Expr>) -> Expr {
        let mut coeff = Rational::one();
        let mut bases: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut stack: Vec<Expr> = items;
        stack.reverse();
        while let Some(item) = stack.pop() {
            match item {
                Expr::Prod(children) => {
                    for c in children.into_iter().rev() {
                        stack.push(c);
                    }
                }
                Expr::Const(c) => {
                    if c.is_zero() {
                        return Expr::zero();
                    }
                    coeff *= c;
                }
                Expr::Pow(base, exp) => {
                    *bases.entry(*base).or_insert_with(Rational::zero) += exp;
                }
                other => {
                    *bases.entry(other).or_insert_with(Rational::zero) += Rational::one();
                }
            }
        }
        let mut factors: Vec<Expr> = Vec::with_capacity(bases.len());
        for (base, exp) in bases {
            if exp.is_zero() {
                continue; // b^0 = 1 by the usual symbolic convention
            }
            match Expr::pow(base, exp) {
                Expr::Const(c) => {
                    if c.is_zero() {
                        return Expr::zero();
                    }
                    coeff *= c;
                }
                f => factors.push(f),
            }
        }
        factors.sort();
        if coeff.is_zero() {
            return Expr::zero();
        }
        if factors.is_empty() {
            return Expr::Const(coeff);
        }
        if factors.len() == 1 && coeff.is_one() {
            return factors.pop().expect("len checked");
        }
        let mut children = Vec::with_capacity(factors.len() + 1);
        if !coeff.is_one() {
            children.push(Expr::Const(coeff));
        }
        children.extend(factors);
        if children.len() == 1 {
            children.pop().expect("len checked")
        } else {
            Expr::Prod(children)
        }
    }

    /// Normalized power with exact rational exponent.
    ///
    /// Folds integer powers of constants, collapses `(b^a)^k` for
    /// integer `k` (an identity of the principal branch) and distributes
    /// integer powers over products. Fractional powers are kept intact:
    /// `(b^a)^q = b^{aq}` is not an identity for general branches.
    pub fn pow(base: Expr, exp: Rational) -> Expr {
        if exp.is_zero() {
            return Expr::one();
        }
        if exp.is_one() {
            return base;
        }
        let exp_is_int = exp.is_integer();
        match base {
            Expr::Const(c) => {
                if c.is_zero() {
                    if exp.is_positive() {
                        return Expr::zero();
                    }
                    // 0^(negative or fractional): kept symbolic, eval reports it
                    return Expr::Pow(Box::new(Expr::Const(c)), exp);
                }
                if exp_is_int {
                    return Expr::Const(rat_pow_int(&c, &exp.to_integer()));
                }
                Expr::Pow(Box::new(Expr::Const(c)), exp)
            }
            Expr::Pow(inner, inner_exp) => {
                if exp_is_int {
                    Expr::pow(*inner, inner_exp * exp)
                } else {
                    Expr::Pow(Box::new(Expr::Pow(inner, inner_exp)), exp)
                }
            }
            Expr::Prod(children) => {
                if exp_is_int {
                    Expr::prod(
                        children
                            .into_iter()
                            .map(|c| Expr::pow(c, exp.clone()))
                            .collect(),
                    )
                } else {
                    Expr::Pow(Box::new(Expr::Prod(children)), exp)
                }
            }
            other => Expr::Pow(Box::new(other), exp),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::sum(vec![a, b])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::sum(vec![a, Expr::neg(b)])
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::prod(vec![a, b])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::prod(vec![a, Expr::pow(b, rat_int(-1))])
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::prod(vec![Expr::int(-1), a])
    }

    /// Re-runs structural normalization; the result equals `self` for
    /// expressions built through the constructors (idempotence).
    pub fn normalized(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Pow(b, e) => Expr::pow(b.normalized(), e.clone()),
            Expr::Prod(children) => Expr::prod(children.iter().map(|c| c.normalized()).collect()),
            Expr::Sum(children) => Expr::sum(children.iter().map(|c| c.normalized()).collect()),
        }
    }

    /// Principal-branch evaluation at a complex point.
    pub fn eval(&self, point: &[C64]) -> Result<C64, EvalError> {
        let v = self.eval_inner(point)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Overflow)
        }
    }

    fn eval_inner(&self, point: &[C64]) -> Result<C64, EvalError> {
        match self {
            Expr::Const(c) => Ok(C64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)),
            Expr::Var(i) => point
                .get(*i)
                .copied()
                .ok_or(EvalError::UnassignedVariable { index: *i }),
            Expr::Sum(children) => {
                let mut acc = C64::new(0.0, 0.0);
                for c in children {
                    acc += c.eval_inner(point)?;
                }
                Ok(acc)
            }
            Expr::Prod(children) => {
                let mut acc = C64::new(1.0, 0.0);
                for c in children {
                    acc *= c.eval_inner(point)?;
                }
                Ok(acc)
            }
            Expr::Pow(base, exp) => {
                let b = base.eval_inner(point)?;
                pow_principal(b, exp)
            }
        }
    }

    /// Symbolic partial derivative with respect to variable `var`.
    pub fn diff(&self, var: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(i) => {
                if *i == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Sum(children) => Expr::sum(children.iter().map(|c| c.diff(var)).collect()),
            Expr::Prod(children) => {
                let mut terms = Vec::new();
                for (i, c) in children.iter().enumerate() {
                    if matches!(c, Expr::Const(_)) {
                        continue;
                    }
                    let mut factors: Vec<Expr> = Vec::with_capacity(children.len());
                    for (j, other) in children.iter().enumerate() {
                        if i == j {
                            factors.push(c.diff(var));
                        } else {
                            factors.push(other.clone());
                        }
                    }
                    terms.push(Expr::prod(factors));
                }
                Expr::sum(terms)
            }
            Expr::Pow(base, exp) => {
                let d_base = base.diff(var);
                if d_base.is_zero() {
                    return Expr::zero();
                }
                Expr::prod(vec![
                    Expr::Const(exp.clone()),
                    Expr::pow((**base).clone(), exp.clone() - Rational::one()),
                    d_base,
                ])
            }
        }
    }

    /// Exact expansion into the polynomial representation.
    ///
    /// Fails outside the polynomial fragment (any exponent that is not a
    /// nonnegative integer), identifying the offending node.
    pub fn to_polynomial(&self, vars: &VarSet) -> Result<Polynomial, NonPolynomialError> {
        match self {
            Expr::Const(c) => Ok(Polynomial::constant(vars.clone(), c.clone())),
            Expr::Var(i) => Ok(Polynomial::variable(vars.clone(), *i)),
            Expr::Sum(children) => {
                let mut acc = Polynomial::zero(vars.clone());
                for c in children {
                    acc = acc.add(&c.to_polynomial(vars)?).expect("same ambient");
                }
                Ok(acc)
            }
            Expr::Prod(children) => {
                let mut acc = Polynomial::constant(vars.clone(), Rational::one());
                for c in children {
                    acc = acc.mul(&c.to_polynomial(vars)?).expect("same ambient");
                }
                Ok(acc)
            }
            Expr::Pow(base, exp) => {
                let ok = exp.is_integer() && !exp.is_negative();
                if !ok {
                    return Err(NonPolynomialError {
                        node: self.to_text(vars),
                    });
                }
                let k = exp
                    .to_integer()
                    .to_u32()
                    .ok_or_else(|| NonPolynomialError {
                        node: self.to_text(vars),
                    })?;
                Ok(base.to_polynomial(vars)?.pow(k))
            }
        }
    }

    /// Renders the expression in the input grammar; `parse . to_text` is
    /// the identity on normalized expressions.
    pub fn to_text(&self, vars: &VarSet) -> String {
        let mut s = String::new();
        self.write(&mut s, vars, Prec::Sum);
        s
    }

    fn write(&self, out: &mut String, vars: &VarSet, parent: Prec) {
        match self {
            Expr::Const(c) => {
                let needs_parens = parent > Prec::Sum && c.is_negative();
                if needs_parens {
                    out.push('(');
                }
                write_rational(out, c);
                if needs_parens {
                    out.push(')');
                }
            }
            Expr::Var(i) => out.push_str(vars.name(*i)),
            Expr::Sum(children) => {
                let needs_parens = parent > Prec::Sum;
                if needs_parens {
                    out.push('(');
                }
                for (i, c) in children.iter().enumerate() {
                    if i == 0 {
                        c.write(out, vars, Prec::Term);
                    } else if let Some(pos) = negated_view(c) {
                        out.push_str(" - ");
                        pos.write(out, vars, Prec::Term);
                    } else {
                        out.push_str(" + ");
                        c.write(out, vars, Prec::Term);
                    }
                }
                if needs_parens {
                    out.push(')');
                }
            }
            Expr::Prod(children) => {
                let needs_parens = parent > Prec::Term;
                if needs_parens {
                    out.push('(');
                }
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        out.push('*');
                    }
                    // A leading negative constant prints bare: unary minus
                    // binds looser than `*`, so `-2*x` reparses identically.
                    let prec = if i == 0 && !needs_parens && parent == Prec::Sum {
                        Prec::Sum
                    } else {
                        Prec::Factor
                    };
                    c.write(out, vars, prec);
                }
                if needs_parens {
                    out.push(')');
                }
            }
            Expr::Pow(base, exp) => {
                match &**base {
                    Expr::Var(i) => out.push_str(vars.name(*i)),
                    b @ Expr::Const(c) if !c.is_negative() && c.is_integer() => {
                        b.write(out, vars, Prec::Factor)
                    }
                    b => {
                        out.push('(');
                        b.write(out, vars, Prec::Sum);
                        out.push(')');
                    }
                }
                out.push('^');
                if exp.is_integer() && !exp.is_negative() {
                    write_rational(out, exp);
                } else {
                    out.push('(');
                    write_rational(out, exp);
                    out.push(')');
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Term,
    Factor,
}

fn write_rational(out: &mut String, q: &Rational) {
    if q.is_integer() {
        out.push_str(&q.numer().to_string());
    } else {
        out.push_str(&format!("{}/{}", q.numer(), q.denom()));
    }
}

/// If `e` is a term with negative rational coefficient, returns the term
/// with the coefficient negated (used by the printer for `a - b`).
fn negated_view(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Const(c) if c.is_negative() => Some(Expr::Const(-c.clone())),
        Expr::Prod(children) => match children.first() {
            Some(Expr::Const(c)) if c.is_negative() => {
                let mut rest: Vec<Expr> = children[1..].to_vec();
                let neg = -c.clone();
                if !neg.is_one() {
                    rest.insert(0, Expr::Const(neg));
                }
                Some(if rest.len() == 1 {
                    rest.pop().expect("len checked")
                } else {
                    Expr::Prod(rest)
                })
            }
            _ => None,
        },
        _ => None,
    }
}

/// Splits a non-constant, non-sum expression into (coefficient, core).
fn split_coefficient(e: Expr) -> (Rational, Expr) {
    match e {
        Expr::Prod(children) => match children.first() {
            Some(Expr::Const(_)) => {
                let mut iter = children.into_iter();
                let c = match iter.next() {
                    Some(Expr::Const(c)) => c,
                    _ => unreachable!(),
                };
                let rest: Vec<Expr> = iter.collect();
                let core = if rest.len() == 1 {
                    rest.into_iter().next().expect("len checked")
                } else {
                    Expr::Prod(rest)
                };
                (c, core)
            }
            _ => (Rational::one(), Expr::Prod(children)),
        },
        other => (Rational::one(), other),
    }
}

fn attach_coefficient(coeff: Rational, core: Expr) -> Expr {
    if coeff.is_one() {
        return core;
    }
    match core {
        Expr::Prod(children) => {
            let mut v = Vec::with_capacity(children.len() + 1);
            v.push(Expr::Const(coeff));
            v.extend(children);
            Expr::Prod(v)
        }
        other => Expr::Prod(vec![Expr::Const(coeff), other]),
    }
}

/// Distance from `z` to the closed negative real axis (including 0).
fn cut_distance(z: C64) -> f64 {
    if z.re <= 0.0 {
        libm::fabs(z.im)
    } else {
        z.norm()
    }
}

/// Principal-branch power, shared by the tree evaluator and the
/// compiled quadrature programs.
pub(crate) fn pow_principal(b: C64, exp: &Rational) -> Result<C64, EvalError> {
    if exp.is_integer() {
        let k = exp.to_integer().to_i32().ok_or(EvalError::Overflow)?;
        if k < 0 && b.norm() < BRANCH_GUARD {
            return Err(EvalError::DivisionByZero);
        }
        return Ok(powi_c(b, k));
    }
    let q = exp.to_f64().ok_or(EvalError::Overflow)?;
    powf_principal(b, q)
}

pub(crate) fn powf_principal(b: C64, q: f64) -> Result<C64, EvalError> {
    if cut_distance(b) <= BRANCH_GUARD {
        return Err(EvalError::BranchCut);
    }
    let r = b.norm();
    let theta = b.arg();
    let rho = libm::exp(q * libm::log(r));
    let phase = q * theta;
    Ok(C64::new(rho * libm::cos(phase), rho * libm::sin(phase)))
}

pub(crate) fn powi_c(b: C64, k: i32) -> C64 {
    if k == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut base = if k < 0 { C64::new(1.0, 0.0) / b } else { b };
    let mut n = k.unsigned_abs();
    let mut acc = C64::new(1.0, 0.0);
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}

/// Converts a polynomial back into a (normalized) expression.
pub fn from_polynomial(p: &Polynomial) -> Expr {
    let nvars = p.vars().len();
    let mut terms = Vec::new();
    for (mono, coeff) in p.terms() {
        let mut factors = vec![Expr::Const(coeff.clone())];
        for v in 0..nvars {
            let e = mono.exponent(v);
            if e > 0 {
                factors.push(Expr::pow(Expr::Var(v), rat_int(e as i64)));
            }
        }
        terms.push(Expr::prod(factors));
    }
    Expr::sum(terms)
}

impl From<PolyError> for NonPolynomialError {
    fn from(e: PolyError) -> Self {
        NonPolynomialError {
            node: e.to_string(),
        }
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

struct Lexer<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            text: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next_token(&mut self) -> Result<(Token, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.text.len() {
            return Ok((Token::Eof, start));
        }
        let c = self.text[self.pos];
        let tok = match c {
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'/' => Token::Slash,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'0'..=b'9' => {
                let mut end = self.pos;
                while end < self.text.len() && self.text[end].is_ascii_digit() {
                    end += 1;
                }
                let digits = core::str::from_utf8(&self.text[self.pos..end]).expect("ascii digits");
                let value = digits.parse::<BigInt>().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: "invalid integer literal".to_string(),
                })?;
                self.pos = end;
                return Ok((Token::Int(value), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = self.pos;
                while end < self.text.len()
                    && (self.text[end].is_ascii_alphanumeric() || self.text[end] == b'_')
                {
                    end += 1;
                }
                let name = core::str::from_utf8(&self.text[self.pos..end])
                    .expect("ascii ident")
                    .to_string();
                self.pos = end;
                return Ok((Token::Ident(name), start));
            }
            other => {
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{}`", other as char),
                })
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }
}

struct Parser<'a> {
    vars: &'a VarSet,
    tokens: Vec<(Token, usize)>,
    index: usize,
}

/// Parses `text` against the declared chart variables.
///
/// Grammar: identifiers, integer literals, rationals as `p/q`, the
/// operators `+ - * / ^` with `^` binding tightest and right-associative,
/// parentheses and unary minus. Exponents must normalize to rational
/// constants.
pub fn parse(text: &str, vars: &VarSet) -> Result<Expr, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    loop {
        let (tok, off) = lexer.next_token()?;
        let eof = tok == Token::Eof;
        tokens.push((tok, off));
        if eof {
            break;
        }
    }
    let mut parser = Parser {
        vars,
        tokens,
        index: 0,
    };
    let e = parser.expr()?;
    let (tok, off) = parser.peek();
    if *tok != Token::Eof {
        return Err(ParseError::Syntax {
            offset: off,
            message: "unexpected trailing input".to_string(),
        });
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> (&Token, usize) {
        let (tok, off) = &self.tokens[self.index];
        (tok, *off)
    }

    fn bump(&mut self) -> (Token, usize) {
        let entry = self.tokens[self.index].clone();
        if self.index + 1 < self.tokens.len() {
            self.index += 1;
        }
        entry
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek().0 {
                Token::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Token::Minus => {
                    self.bump();
                    terms.push(Expr::neg(self.term()?));
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().0 {
                Token::Star => {
                    self.bump();
                    acc = Expr::mul(acc, self.factor()?);
                }
                Token::Slash => {
                    self.bump();
                    acc = Expr::div(acc, self.factor()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek().0 == Token::Minus {
            self.bump();
            return Ok(Expr::neg(self.factor()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek().0 == Token::Caret {
            self.bump();
            let exp_offset = self.peek().1;
            let exponent = self.exponent()?;
            let exp = match exponent {
                Expr::Const(c) => c,
                _ => return Err(ParseError::NonConstantExponent { offset: exp_offset }),
            };
            let bound = rat_int(MAX_EXPONENT);
            if exp.numer().magnitude() > bound.numer().magnitude()
                || exp.denom().magnitude() > bound.numer().magnitude()
            {
                return Err(ParseError::ExponentTooLarge { offset: exp_offset });
            }
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    /// Exponent grammar: an optionally negated atom, itself possibly a
    /// `^` chain (right-associative), required to be constant.
    fn exponent(&mut self) -> Result<Expr, ParseError> {
        if *self.peek().0 == Token::Minus {
            self.bump();
            return Ok(Expr::neg(self.exponent()?));
        }
        let base = self.atom()?;
        if *self.peek().0 == Token::Caret {
            self.bump();
            let exp_offset = self.peek().1;
            let rhs = self.exponent()?;
            let exp = match rhs {
                Expr::Const(c) => c,
                _ => return Err(ParseError::NonConstantExponent { offset: exp_offset }),
            };
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, off) = self.bump();
        match tok {
            Token::Int(v) => Ok(Expr::Const(Rational::from_integer(v))),
            Token::Ident(name) => match self.vars.index_of(&name) {
                Some(i) => Ok(Expr::Var(i)),
                None => Err(ParseError::UndeclaredVariable { offset: off, name }),
            },
            Token::LParen => {
                let inner = self.expr()?;
                let (tok, off) = self.bump();
                if tok != Token::RParen {
                    return Err(ParseError::Syntax {
                        offset: off,
                        message: "expected `)`".to_string(),
                    });
                }
                Ok(inner)
            }
            Token::Eof => Err(ParseError::Syntax {
                offset: off,
                message: "unexpected end of input".to_string(),
            }),
            _ => Err(ParseError::Syntax {
                offset: off,
                message: "expected a number, variable or `(`".to_string(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::SampleStream;

    fn vars_xy() -> VarSet {
        VarSet::new(["x", "y"])
    }

    fn p(text: &str, vars: &VarSet) -> Expr {
        parse(text, vars).expect("parse")
    }

    #[test]
    fn grammar_cases() {
        let vars = VarSet::new(["x"]);
        let e = p("x^2 + 1", &vars);
        assert_eq!(
            e,
            Expr::sum(vec![
                Expr::one(),
                Expr::pow(Expr::var(0), rat_int(2)),
            ])
        );
        let e = p("(1 + x^3)^(-1/2)", &vars);
        let base = Expr::sum(vec![Expr::one(), Expr::pow(Expr::var(0), rat_int(3))]);
        assert_eq!(e, Expr::pow(base, Rational::new(BigInt::from(-1), BigInt::from(2))));
    }

    #[test]
    fn malformed_input_reports_offset() {
        let vars = VarSet::new(["x"]);
        match parse("x + ", &vars) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_variable() {
        let vars = VarSet::new(["x"]);
        match parse("x + z", &vars) {
            Err(ParseError::UndeclaredVariable { name, offset }) => {
                assert_eq!(name, "z");
                assert_eq!(offset, 4);
            }
            other => panic!("expected undeclared variable, got {other:?}"),
        }
    }

    #[test]
    fn caret_binds_tightest_and_right_assoc() {
        let vars = VarSet::new(["x"]);
        // 2^3^2 = 2^9 = 512
        assert_eq!(p("2^3^2", &vars), Expr::int(512));
        // -x^2 is -(x^2)
        assert_eq!(p("-x^2", &vars), Expr::neg(Expr::pow(Expr::var(0), rat_int(2))));
        // x^2*x = x^3
        assert_eq!(p("x^2*x", &vars), Expr::pow(Expr::var(0), rat_int(3)));
    }

    #[test]
    fn eval_cases() {
        let vars = VarSet::new(["x"]);
        let at = |e: &Expr, v: f64| e.eval(&[C64::new(v, 0.0)]).expect("eval");
        let e = p("x^2 + 1", &vars);
        assert_eq!(at(&e, 2.0), C64::new(5.0, 0.0));
        let e = p("(1 + x)^(-1/2)", &vars);
        assert!((at(&e, 0.0) - C64::new(1.0, 0.0)).norm() < 1e-15);
        let e = p("1/x", &vars);
        assert_eq!(e.eval(&[C64::new(0.0, 0.0)]), Err(EvalError::DivisionByZero));
    }

    #[test]
    fn branch_guard_trips_on_cut() {
        let vars = VarSet::new(["x"]);
        let e = p("x^(1/2)", &vars);
        assert_eq!(e.eval(&[C64::new(-1.0, 0.0)]), Err(EvalError::BranchCut));
        // Just off the cut is fine and principal:
        let v = e.eval(&[C64::new(-1.0, 1e-3)]).expect("eval");
        assert!(v.im > 0.9, "principal branch should land near +i, got {v}");
    }

    #[test]
    fn diff_cases() {
        let vars = VarSet::new(["x", "y"]);
        let e = p("x^3", &vars);
        assert_eq!(e.diff(0), p("3*x^2", &vars));
        let e = p("(1 + x^2)^(1/2)", &vars);
        let expected = Expr::prod(vec![
            Expr::var(0),
            Expr::pow(
                Expr::sum(vec![Expr::one(), Expr::pow(Expr::var(0), rat_int(2))]),
                Rational::new(BigInt::from(-1), BigInt::from(2)),
            ),
        ]);
        assert_eq!(e.diff(0), expected);
        assert_eq!(p("x", &vars).diff(1), Expr::zero());
    }

    #[test]
    fn to_polynomial_cases() {
        let vars = vars_xy();
        let e = p("(x + 1)^2", &vars);
        let q = e.to_polynomial(&vars).expect("poly");
        assert_eq!(q, p("x^2 + 2*x + 1", &vars).to_polynomial(&vars).expect("poly"));
        let e = p("x^(1/2)", &vars);
        let err = e.to_polynomial(&vars).expect_err("not polynomial");
        assert!(err.node.contains('^'));
        let e = p("3/4*x*y", &vars);
        let q = e.to_polynomial(&vars).expect("poly");
        assert_eq!(q.terms().count(), 1);
    }

    #[test]
    fn like_terms_cancel() {
        let vars = vars_xy();
        let e = p("x*y - y*x", &vars);
        assert!(e.is_zero());
        let e = p("x + x", &vars);
        assert_eq!(e, p("2*x", &vars));
    }

    #[test]
    fn normalization_idempotent() {
        let vars = vars_xy();
        for text in [
            "x^2 + 1",
            "(1 + x^3)^(-1/2)",
            "3/4*x*y - y/2",
            "x*(y + 1)*(y + 1)",
            "-(x - y)^3",
            "1/(x*y^2)",
        ] {
            let e = p(text, &vars);
            assert_eq!(e.normalized(), e, "normalization not idempotent for {text}");
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let vars = vars_xy();
        for text in [
            "x^2 + 1",
            "(1 + x^3)^(-1/2)",
            "3/4*x*y - 1/2*y",
            "x*(1 + y)^2",
            "-x - y",
            "x*y^(-1)",
            "(x + y)^(2/3)",
            "2^(1/2)*x",
        ] {
            let e = p(text, &vars);
            let printed = e.to_text(&vars);
            let reparsed = p(&printed, &vars);
            assert_eq!(reparsed, e, "round trip failed: {text} -> {printed}");
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // Spec invariant: relative error < 1e-6 at 100 sample points,
        // step 1e-5, points in the unit polydisc away from singularities.
        let vars = vars_xy();
        let exprs = [
            p("x^3*y + y^2", &vars),
            p("(1 + x^2 + y^2)^(1/2)", &vars),
            p("x*(1 + y)^(-1)", &vars),
            p("(1 + x*y)^(-3/2)", &vars),
        ];
        let mut stream = SampleStream::new(0xf1a6);
        let h = 1e-5;
        for e in &exprs {
            for var in 0..2 {
                let d = e.diff(var);
                for _ in 0..100 {
                    let pt = stream.next_point(2, 0.2, 0.8);
                    let mut plus = pt.clone();
                    plus[var] += C64::new(h, 0.0);
                    let mut minus = pt.clone();
                    minus[var] -= C64::new(h, 0.0);
                    let fd = (e.eval(&plus).unwrap() - e.eval(&minus).unwrap())
                        / C64::new(2.0 * h, 0.0);
                    let sym = d.eval(&pt).unwrap();
                    let scale = sym.norm().max(1.0);
                    assert!(
                        (fd - sym).norm() / scale < 1e-6,
                        "finite difference mismatch: sym={sym} fd={fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn eval_is_ring_homomorphism_on_polynomials() {
        let vars = vars_xy();
        let a = p("x^2 + 3*y - 1", &vars);
        let b = p("y^3 - 2*x*y + 5", &vars);
        let prod = Expr::mul(a.clone(), b.clone());
        let mut stream = SampleStream::new(0xabcd);
        for _ in 0..50 {
            let pt = stream.next_point(2, 0.1, 1.0);
            let lhs = prod.eval(&pt).unwrap();
            let rhs = a.eval(&pt).unwrap() * b.eval(&pt).unwrap();
            let scale = rhs.norm().max(1.0);
            assert!((lhs - rhs).norm() / scale < 1e-12);
        }
    }
}
