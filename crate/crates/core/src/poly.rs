//! Exact sparse multivariate polynomials over arbitrary-precision
//! rationals, with pluggable monomial orders.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::vars::VarSet;
use crate::Rational;

/// An exponent vector; length always equals the ambient variable count.
///
/// The derived `Ord` is a fixed structural order used only for storage;
/// semantic comparisons go through [`MonomialOrder`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn constant(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn variable(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, if divisible.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        if self.divides(other) {
            Some(Monomial(
                other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect(),
            ))
        } else {
            None
        }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn is_pure_power_of(&self, var: usize) -> bool {
        self.0.iter().enumerate().all(|(i, &e)| i == var || e == 0)
    }
}

/// Total orders on monomials.
///
/// `Lex` and `GrevLex` are global well-orders; `Local` is negative
/// graded reverse lexicographic (the constant monomial ranks largest),
/// used by the tangent-cone standard-basis machinery.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    Lex,
    GrevLex,
    Local,
}

impl MonomialOrder {
    pub fn is_global(&self) -> bool {
        !matches!(self, MonomialOrder::Local)
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::GrevLex => grevlex(a, b),
            MonomialOrder::Local => match a.total_degree().cmp(&b.total_degree()) {
                Ordering::Less => Ordering::Greater,
                Ordering::Greater => Ordering::Less,
                Ordering::Equal => grevlex_tie(a, b),
            },
        }
    }
}

fn grevlex(a: &Monomial, b: &Monomial) -> Ordering {
    match a.total_degree().cmp(&b.total_degree()) {
        Ordering::Equal => grevlex_tie(a, b),
        other => other,
    }
}

/// Reverse-lexicographic tie-break: the monomial whose last differing
/// exponent is smaller is the larger one.
fn grevlex_tie(a: &Monomial, b: &Monomial) -> Ordering {
    for (ea, eb) in a.0.iter().rev().zip(b.0.iter().rev()) {
        match ea.cmp(eb) {
            Ordering::Equal => continue,
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyError {
    AmbientMismatch { left: String, right: String },
    ZeroPolynomial,
    NotGlobalOrder,
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::AmbientMismatch { left, right } => {
                write!(f, "ambient variable mismatch: [{left}] vs [{right}]")
            }
            PolyError::ZeroPolynomial => write!(f, "operation undefined for the zero polynomial"),
            PolyError::NotGlobalOrder => {
                write!(f, "operation requires a global monomial order")
            }
        }
    }
}

impl core::error::Error for PolyError {}

/// A sparse polynomial: map from monomials to nonzero rational
/// coefficients, plus the ambient variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    vars: VarSet,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(vars: VarSet) -> Self {
        Polynomial {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: VarSet, value: Rational) -> Self {
        let mut p = Polynomial::zero(vars);
        if !value.is_zero() {
            let n = p.vars.len();
            p.terms.insert(Monomial::constant(n), value);
        }
        p
    }

    pub fn one(vars: VarSet) -> Self {
        Polynomial::constant(vars, Rational::one())
    }

    pub fn variable(vars: VarSet, index: usize) -> Self {
        let n = vars.len();
        let mut p = Polynomial::zero(vars);
        p.terms.insert(Monomial::variable(n, index), Rational::one());
        p
    }

    pub fn from_terms<I>(vars: VarSet, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Polynomial::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    fn add_term(&mut self, mono: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                *existing += coeff;
                if existing.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, coeff);
            }
        }
    }

    fn check_ambient(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(PolyError::AmbientMismatch {
                left: self.vars.to_string(),
                right: other.vars.to_string(),
            })
        }
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ambient(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ambient(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.vars.clone());
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Rational) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero(self.vars.clone());
        }
        let mut out = Polynomial::zero(self.vars.clone());
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c * factor);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ambient(other)?;
        let mut out = Polynomial::zero(self.vars.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn mul_term(&self, mono: &Monomial, coeff: &Rational) -> Polynomial {
        if coeff.is_zero() {
            return Polynomial::zero(self.vars.clone());
        }
        let mut out = Polynomial::zero(self.vars.clone());
        for (m, c) in &self.terms {
            out.terms.insert(m.mul(mono), c * coeff);
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.vars.clone());
        let mut base = self.clone();
        let mut n = exp;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base).expect("same ambient");
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base).expect("same ambient");
            }
        }
        acc
    }

    /// Maximal term under `order`; errors on the zero polynomial.
    pub fn leading_term(&self, order: MonomialOrder) -> Result<(Monomial, Rational), PolyError> {
        let mut best: Option<&Monomial> = None;
        for m in self.terms.keys() {
            best = Some(match best {
                None => m,
                Some(b) => {
                    if order.cmp(m, b) == Ordering::Greater {
                        m
                    } else {
                        b
                    }
                }
            });
        }
        let m = best.ok_or(PolyError::ZeroPolynomial)?;
        Ok((m.clone(), self.terms[m].clone()))
    }

    pub fn leading_monomial(&self, order: MonomialOrder) -> Result<Monomial, PolyError> {
        Ok(self.leading_term(order)?.0)
    }

    /// Monic rescaling under `order`; errors on zero.
    pub fn monic(&self, order: MonomialOrder) -> Result<Polynomial, PolyError> {
        let (_, lc) = self.leading_term(order)?;
        Ok(self.scale(&lc.recip()))
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    term *= &point[i];
                }
            }
            acc += term;
        }
        acc
    }

    /// Substitutes `x_i -> x_i + p_i` (exact translation of the origin).
    pub fn translate(&self, point: &[Rational]) -> Polynomial {
        let n = self.vars.len();
        assert_eq!(point.len(), n, "point dimension mismatch");
        // Per-variable powers of (x_i + p_i), grown on demand.
        let mut pows: Vec<Vec<Polynomial>> = (0..n)
            .map(|_| vec![Polynomial::one(self.vars.clone())])
            .collect();
        let mut shifted_vars: Vec<Polynomial> = Vec::with_capacity(n);
        for i in 0..n {
            let v = Polynomial::variable(self.vars.clone(), i);
            let c = Polynomial::constant(self.vars.clone(), point[i].clone());
            shifted_vars.push(v.add(&c).expect("same ambient"));
        }
        let mut out = Polynomial::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(self.vars.clone(), c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                while pows[i].len() <= e as usize {
                    let last = pows[i].last().expect("nonempty").clone();
                    pows[i].push(last.mul(&shifted_vars[i]).expect("same ambient"));
                }
                term = term.mul(&pows[i][e as usize]).expect("same ambient");
            }
            out = out.add(&term).expect("same ambient");
        }
        out
    }

    /// Renders terms sorted descending by `order`.
    pub fn to_text(&self, order: MonomialOrder) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut monos: Vec<&Monomial> = self.terms.keys().collect();
        monos.sort_by(|a, b| order.cmp(b, a));
        let mut out = String::new();
        for (i, m) in monos.iter().enumerate() {
            let c = &self.terms[*m];
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let ac = c.abs();
            let coeff_txt = if ac.is_integer() {
                format!("{}", ac.numer())
            } else {
                format!("{}/{}", ac.numer(), ac.denom())
            };
            let mut factors: Vec<String> = Vec::new();
            if !ac.is_one() || m.is_constant() {
                factors.push(coeff_txt);
            }
            for (v, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars.name(v).to_string()),
                    _ => factors.push(format!("{}^{}", self.vars.name(v), e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

/// Multivariate division: `f = sum_i q_i d_i + r` exactly, with no term
/// of `r` divisible by any divisor's leading term. Requires a global
/// order.
pub fn reduce(
    f: &Polynomial,
    divisors: &[Polynomial],
    order: MonomialOrder,
) -> Result<(Polynomial, Vec<Polynomial>), PolyError> {
    if !order.is_global() {
        return Err(PolyError::NotGlobalOrder);
    }
    for d in divisors {
        f.check_ambient(d)?;
    }
    let vars = f.vars().clone();
    let mut quotients = vec![Polynomial::zero(vars.clone()); divisors.len()];
    let mut remainder = Polynomial::zero(vars.clone());
    let mut p = f.clone();
    let lead: Vec<Option<(Monomial, Rational)>> = divisors
        .iter()
        .map(|d| d.leading_term(order).ok())
        .collect();
    while !p.is_zero() {
        let (pm, pc) = p.leading_term(order).expect("nonzero");
        let mut divided = false;
        for (i, entry) in lead.iter().enumerate() {
            if let Some((dm, dc)) = entry {
                if let Some(q_mono) = dm.checked_div(&pm) {
                    let q_coeff = &pc / dc;
                    quotients[i].add_term(q_mono.clone(), q_coeff.clone());
                    let subtrahend = divisors[i].mul_term(&q_mono, &q_coeff);
                    p = p.sub(&subtrahend).expect("same ambient");
                    divided = true;
                    break;
                }
            }
        }
        if !divided {
            remainder.add_term(pm.clone(), pc.clone());
            let mut single = Polynomial::zero(vars.clone());
            single.add_term(pm, pc);
            p = p.sub(&single).expect("same ambient");
        }
    }
    Ok((remainder, quotients))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::sample::SampleStream;

    fn vs() -> VarSet {
        VarSet::new(["x", "y"])
    }

    fn poly(text: &str, vars: &VarSet) -> Polynomial {
        parse(text, vars)
            .expect("parse")
            .to_polynomial(vars)
            .expect("polynomial")
    }

    #[test]
    fn ring_ops() {
        let v = vs();
        let a = poly("x + y", &v);
        let b = poly("x - y", &v);
        assert_eq!(a.mul(&b).unwrap(), poly("x^2 - y^2", &v));
        assert_eq!(a.add(&Polynomial::zero(v.clone())).unwrap(), a);
        let c = poly("1/2*x", &v).mul(&poly("2/3*y", &v)).unwrap();
        assert_eq!(c, poly("1/3*x*y", &v));
    }

    #[test]
    fn ambient_mismatch_is_detected() {
        let a = poly("x", &vs());
        let w = VarSet::new(["x", "z"]);
        let b = poly("x", &w);
        assert!(matches!(a.add(&b), Err(PolyError::AmbientMismatch { .. })));
    }

    #[test]
    fn leading_terms_under_each_order() {
        let v = vs();
        let p = poly("x^2 + y^3", &v);
        // grevlex: total degree 3 beats 2
        let (m, _) = p.leading_term(MonomialOrder::GrevLex).unwrap();
        assert_eq!(m, Monomial::new(vec![0, 3]));
        // lex with x > y
        let (m, _) = p.leading_term(MonomialOrder::Lex).unwrap();
        assert_eq!(m, Monomial::new(vec![2, 0]));
        // local order prefers lower degree
        let p = poly("x + x^2", &v);
        let (m, _) = p.leading_term(MonomialOrder::Local).unwrap();
        assert_eq!(m, Monomial::new(vec![1, 0]));
        assert!(matches!(
            Polynomial::zero(v).leading_term(MonomialOrder::Lex),
            Err(PolyError::ZeroPolynomial)
        ));
    }

    #[test]
    fn local_order_ranks_constant_largest() {
        let one = Monomial::constant(2);
        for m in [
            Monomial::new(vec![1, 0]),
            Monomial::new(vec![0, 1]),
            Monomial::new(vec![2, 3]),
        ] {
            assert_eq!(MonomialOrder::Local.cmp(&one, &m), Ordering::Greater);
        }
    }

    #[test]
    fn division_examples() {
        let v = vs();
        let (r, q) = reduce(&poly("x^2*y", &v), &[poly("x^2", &v)], MonomialOrder::GrevLex).unwrap();
        assert!(r.is_zero());
        assert_eq!(q[0], poly("y", &v));

        let (r, _) = reduce(&poly("x + y", &v), &[poly("x^2", &v)], MonomialOrder::GrevLex).unwrap();
        assert_eq!(r, poly("x + y", &v));

        let (r, _) = reduce(&poly("x^2 + x*y", &v), &[poly("x", &v)], MonomialOrder::GrevLex).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn division_requires_global_order() {
        let v = vs();
        assert!(matches!(
            reduce(&poly("x", &v), &[poly("x", &v)], MonomialOrder::Local),
            Err(PolyError::NotGlobalOrder)
        ));
    }

    fn random_poly(stream: &mut SampleStream, vars: &VarSet) -> Polynomial {
        let nterms = 1 + (stream.next_u64() % 5) as usize;
        let mut p = Polynomial::zero(vars.clone());
        for _ in 0..nterms {
            let mono = Monomial::new(
                (0..vars.len())
                    .map(|_| (stream.next_u64() % 4) as u32)
                    .collect(),
            );
            let num = (stream.next_u64() % 11) as i64 - 5;
            let den = 1 + (stream.next_u64() % 4) as i64;
            p.add_term(mono, Rational::new(num.into(), den.into()));
        }
        p
    }

    #[test]
    fn division_identity_randomized() {
        let v = vs();
        let mut stream = SampleStream::new(0xd171);
        for _ in 0..50 {
            let f = random_poly(&mut stream, &v);
            let divisors: Vec<Polynomial> = (0..2)
                .map(|_| random_poly(&mut stream, &v))
                .filter(|p| !p.is_zero())
                .collect();
            if divisors.is_empty() {
                continue;
            }
            let (r, qs) = reduce(&f, &divisors, MonomialOrder::GrevLex).unwrap();
            let mut rebuilt = r.clone();
            for (q, d) in qs.iter().zip(&divisors) {
                rebuilt = rebuilt.add(&q.mul(d).unwrap()).unwrap();
            }
            assert_eq!(rebuilt, f, "division identity violated");
            // no remainder term divisible by a divisor leading term
            for d in &divisors {
                let (dm, _) = d.leading_term(MonomialOrder::GrevLex).unwrap();
                for (m, _) in r.terms() {
                    assert!(!dm.divides(m));
                }
            }
        }
    }

    #[test]
    fn orders_are_total_and_multiplicative() {
        let mut stream = SampleStream::new(0x07d3);
        for order in [MonomialOrder::Lex, MonomialOrder::GrevLex, MonomialOrder::Local] {
            for _ in 0..200 {
                let rand_mono = |s: &mut SampleStream| {
                    Monomial::new((0..3).map(|_| (s.next_u64() % 5) as u32).collect())
                };
                let a = rand_mono(&mut stream);
                let b = rand_mono(&mut stream);
                let m = rand_mono(&mut stream);
                // totality / antisymmetry
                let ab = order.cmp(&a, &b);
                let ba = order.cmp(&b, &a);
                assert_eq!(ab, ba.reverse());
                if a == b {
                    assert_eq!(ab, Ordering::Equal);
                }
                // compatibility with multiplication
                let am = a.mul(&m);
                let bm = b.mul(&m);
                assert_eq!(order.cmp(&am, &bm), ab);
            }
        }
    }

    #[test]
    fn translate_shifts_roots() {
        let v = vs();
        let p = poly("x^2 - 1", &v);
        let one = Rational::one();
        let shifted = p.translate(&[one.clone(), Rational::zero()]);
        // (x+1)^2 - 1 = x^2 + 2x
        assert_eq!(shifted, poly("x^2 + 2*x", &v));
        assert!(shifted
            .eval_rational(&[Rational::zero(), Rational::zero()])
            .is_zero());
    }
}
