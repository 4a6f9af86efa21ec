//! Symbolic exterior algebra of holomorphic forms with expression
//! coefficients.
//!
//! Only holomorphic dz factors are modeled — no conjugate
//! differentials — which is enough for every integrand in scope. Forms
//! are homogeneous: a map from strictly increasing variable-index
//! tuples to coefficient expressions. Antisymmetry is encoded by
//! canonical tuple ordering plus sign bookkeeping inside the
//! operations.
//!
//! This module builds the Godbillon-Vey-type forms
//! ψ_j = θ¹² ∧ (dθ²)^j ∧ (dθ¹²)^{k₁−j} and the binomial combination
//! whose cohomological identity backs the flag-residue comparison. The
//! combination's equality holds only modulo exact forms, so no symbolic
//! equality is ever asserted here; closedness is checked numerically
//! and the residue-level comparison lives in the flag module.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::expr::{EvalError, Expr};
use crate::vars::VarSet;
use crate::{Rational, C64};

/// Coefficients of an exterior derivative below this modulus at every
/// sample point count as numerically closed.
pub const CLOSEDNESS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormsError {
    AmbientMismatch { left: String, right: String },
    DegreeMismatch { left: usize, right: usize },
    IndexOutOfRange { j: usize, k1: usize },
    NotAOneForm { degree: usize },
    Eval(EvalError),
}

impl fmt::Display for FormsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormsError::AmbientMismatch { left, right } => {
                write!(f, "ambient variable mismatch: [{left}] vs [{right}]")
            }
            FormsError::DegreeMismatch { left, right } => {
                write!(f, "degree mismatch: {left} vs {right}")
            }
            FormsError::IndexOutOfRange { j, k1 } => {
                write!(f, "index j = {j} outside 0..={k1}")
            }
            FormsError::NotAOneForm { degree } => {
                write!(f, "expected a 1-form, got degree {degree}")
            }
            FormsError::Eval(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FormsError {}

impl From<EvalError> for FormsError {
    fn from(e: EvalError) -> Self {
        FormsError::Eval(e)
    }
}

/// A homogeneous holomorphic differential form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialForm {
    vars: VarSet,
    degree: usize,
    terms: BTreeMap<Vec<u8>, Expr>,
}

impl DifferentialForm {
    pub fn zero(vars: VarSet, degree: usize) -> Self {
        DifferentialForm {
            vars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The unit 0-form.
    pub fn one(vars: VarSet) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), Expr::one());
        DifferentialForm {
            vars,
            degree: 0,
            terms,
        }
    }

    /// A function viewed as a 0-form.
    pub fn function(vars: VarSet, value: Expr) -> Self {
        let mut form = DifferentialForm::zero(vars, 0);
        form.add_term(Vec::new(), value);
        form
    }

    /// The 1-form Σ coeffs[i] dz_i.
    pub fn one_form(vars: VarSet, coeffs: &[Expr]) -> Self {
        let mut form = DifferentialForm::zero(vars, 1);
        for (i, c) in coeffs.iter().enumerate() {
            form.add_term(vec![i as u8], c.clone());
        }
        form
    }

    /// A single term `coeff · dz_{tuple}`; the tuple must be strictly
    /// increasing.
    pub fn term(vars: VarSet, tuple: Vec<u8>, coeff: Expr) -> Self {
        assert!(
            tuple.windows(2).all(|w| w[0] < w[1]),
            "index tuple must be strictly increasing"
        );
        let mut form = DifferentialForm::zero(vars, tuple.len());
        form.add_term(tuple, coeff);
        form
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &Expr)> {
        self.terms.iter().map(|(t, c)| (t.as_slice(), c))
    }

    pub fn coefficient(&self, tuple: &[u8]) -> Expr {
        self.terms.get(tuple).cloned().unwrap_or_else(Expr::zero)
    }

    fn add_term(&mut self, tuple: Vec<u8>, coeff: Expr) {
        debug_assert_eq!(tuple.len(), self.degree);
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&tuple) {
            Some(existing) => {
                let combined = Expr::add(existing.clone(), coeff);
                if combined.is_zero() {
                    self.terms.remove(&tuple);
                } else {
                    *existing = combined;
                }
            }
            None => {
                self.terms.insert(tuple, coeff);
            }
        }
    }

    fn check_ambient(&self, other: &DifferentialForm) -> Result<(), FormsError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(FormsError::AmbientMismatch {
                left: format!("{}", self.vars),
                right: format!("{}", other.vars),
            })
        }
    }

    pub fn add(&self, other: &DifferentialForm) -> Result<DifferentialForm, FormsError> {
        self.check_ambient(other)?;
        if self.degree != other.degree {
            return Err(FormsError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rational) -> DifferentialForm {
        let mut out = DifferentialForm::zero(self.vars.clone(), self.degree);
        for (t, c) in &self.terms {
            out.add_term(
                t.clone(),
                Expr::mul(Expr::constant(factor.clone()), c.clone()),
            );
        }
        out
    }

    pub fn neg(&self) -> DifferentialForm {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &DifferentialForm) -> Result<DifferentialForm, FormsError> {
        self.add(&other.neg())
    }

    /// Graded product with shuffle signs; degrees add. A result degree
    /// above the ambient dimension is identically zero.
    pub fn wedge(&self, other: &DifferentialForm) -> Result<DifferentialForm, FormsError> {
        self.check_ambient(other)?;
        let degree = self.degree + other.degree;
        let mut out = DifferentialForm::zero(self.vars.clone(), degree);
        if degree > self.vars.len() {
            return Ok(out);
        }
        for (ta, ca) in &self.terms {
            for (tb, cb) in &other.terms {
                if let Some((merged, sign)) = merge_tuples(ta, tb) {
                    let mut coeff = Expr::mul(ca.clone(), cb.clone());
                    if sign < 0 {
                        coeff = Expr::neg(coeff);
                    }
                    out.add_term(merged, coeff);
                }
            }
        }
        Ok(out)
    }

    /// k-fold wedge power; the 0th power is the unit 0-form.
    pub fn wedge_pow(&self, k: usize) -> Result<DifferentialForm, FormsError> {
        let mut acc = DifferentialForm::one(self.vars.clone());
        for _ in 0..k {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// Exterior derivative via symbolic partials; degree rises by one.
    pub fn d(&self) -> DifferentialForm {
        let n = self.vars.len();
        let mut out = DifferentialForm::zero(self.vars.clone(), self.degree + 1);
        if self.degree + 1 > n {
            return out;
        }
        for (tuple, coeff) in &self.terms {
            for v in 0..n {
                let vi = v as u8;
                if tuple.contains(&vi) {
                    continue;
                }
                let partial = coeff.diff(v);
                if partial.is_zero() {
                    continue;
                }
                let pos = tuple.iter().position(|&t| t > vi).unwrap_or(tuple.len());
                let mut merged = tuple.clone();
                merged.insert(pos, vi);
                let signed = if pos % 2 == 1 {
                    Expr::neg(partial)
                } else {
                    partial
                };
                out.add_term(merged, signed);
            }
        }
        out
    }

    /// Largest coefficient modulus at a point.
    pub fn max_modulus_at(&self, point: &[C64]) -> Result<f64, EvalError> {
        let mut max = 0.0f64;
        for coeff in self.terms.values() {
            let v = coeff.eval(point)?;
            let m = v.norm();
            if m > max {
                max = m;
            }
        }
        Ok(max)
    }

    /// Renders the form in grammar-compatible coefficient syntax.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (tuple, coeff) in &self.terms {
            let dz: Vec<String> = tuple
                .iter()
                .map(|&i| format!("d{}", self.vars.name(i as usize)))
                .collect();
            if tuple.is_empty() {
                parts.push(coeff.to_text(&self.vars));
            } else {
                parts.push(format!("({})·{}", coeff.to_text(&self.vars), dz.join("∧")));
            }
        }
        parts.join(" + ")
    }
}

/// Merges two strictly increasing tuples; `None` if they intersect,
/// otherwise the merged tuple and the shuffle sign.
fn merge_tuples(a: &[u8], b: &[u8]) -> Option<(Vec<u8>, i8)> {
    let mut merged = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            merged.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining elements of a
            inversions += a.len() - i;
            merged.push(b[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&a[i..]);
    merged.extend_from_slice(&b[j..]);
    Some((merged, if inversions % 2 == 0 { 1 } else { -1 }))
}

fn binomial(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::from_integer(BigInt::from(0));
    }
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

/// ψ_j = θ¹² ∧ (dθ²)^j ∧ (dθ¹²)^{k₁−j}, with the scalar prefactor
/// (2πi)^{−k₁−1} carried as metadata rather than multiplied into the
/// coefficients.
#[derive(Clone, Debug)]
pub struct PsiForm {
    pub form: DifferentialForm,
    /// Exponent e in the prefactor (2πi)^e.
    pub two_pi_i_exponent: i64,
    pub j: usize,
    pub k1: usize,
}

pub fn psi_form(
    theta12: &DifferentialForm,
    theta2: &DifferentialForm,
    j: usize,
    k1: usize,
) -> Result<PsiForm, FormsError> {
    if theta12.degree() != 1 {
        return Err(FormsError::NotAOneForm {
            degree: theta12.degree(),
        });
    }
    if theta2.degree() != 1 {
        return Err(FormsError::NotAOneForm {
            degree: theta2.degree(),
        });
    }
    if j > k1 {
        return Err(FormsError::IndexOutOfRange { j, k1 });
    }
    let d_theta2_pow = theta2.d().wedge_pow(j)?;
    let d_theta12_pow = theta12.d().wedge_pow(k1 - j)?;
    let form = theta12.wedge(&d_theta2_pow)?.wedge(&d_theta12_pow)?;
    Ok(PsiForm {
        form,
        two_pi_i_exponent: -(k1 as i64) - 1,
        j,
        k1,
    })
}

/// Numerical closedness: every coefficient of d(a) stays below
/// [`CLOSEDNESS_TOL`] in modulus at every sample point.
pub fn check_closed(a: &DifferentialForm, sample_points: &[Vec<C64>]) -> Result<bool, FormsError> {
    let da = a.d();
    for point in sample_points {
        if da.max_modulus_at(point)? >= CLOSEDNESS_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The two sides of the binomial combination:
/// lhs = Σ_{j=0}^{k₂} C(k₁+1, j) θ¹²∧(dθ²)^j∧(dθ¹²)^{k₁−j},
/// rhs = θ¹∧(dθ¹)^{k₁} with θ¹ = θ² + θ¹².
///
/// The two agree only modulo exact forms, so both are returned for a
/// downstream residue-level comparison; they are never asserted equal
/// symbolically.
pub fn gv_combination(
    theta2: &DifferentialForm,
    theta12: &DifferentialForm,
    k1: usize,
    k2: usize,
) -> Result<(DifferentialForm, DifferentialForm), FormsError> {
    if k2 > k1 {
        return Err(FormsError::IndexOutOfRange { j: k2, k1 });
    }
    let mut lhs = DifferentialForm::zero(theta12.vars().clone(), 2 * k1 + 1);
    for j in 0..=k2 {
        let psi = psi_form(theta12, theta2, j, k1)?;
        lhs = lhs.add(&psi.form.scale(&binomial(k1 + 1, j)))?;
    }
    let theta1 = theta2.add(theta12)?;
    let rhs = theta1.wedge(&theta1.d().wedge_pow(k1)?)?;
    Ok((lhs, rhs))
}
