//! Chern-class arithmetic in the truncated cohomology ring of
//! projective space, for split (direct sums of line bundles) data.
//!
//! Classes are polynomials in the hyperplane class h modulo h^{n+1}
//! with exact rational coefficients. This is enough for the global
//! residue totals of split 2-flags on ℙⁿ: the residue pairing reduces
//! to Whitney products and reading off the h^n coefficient.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CohomologyError {
    DimensionMismatch { left: usize, right: usize },
    IndexOutOfRange { j: usize, n: usize },
}

impl fmt::Display for CohomologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CohomologyError::DimensionMismatch { left, right } => {
                write!(f, "ambient dimension mismatch: {left} vs {right}")
            }
            CohomologyError::IndexOutOfRange { j, n } => {
                write!(f, "index j = {j} outside 0..={}", n.saturating_sub(1))
            }
        }
    }
}

impl core::error::Error for CohomologyError {}

/// A truncated polynomial Σ c_i h^i mod h^{n+1}; the coefficient list
/// always has length n+1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    n: usize,
    coeffs: Vec<Rational>,
}

impl CohomologyClass {
    pub fn zero(n: usize) -> Self {
        CohomologyClass {
            n,
            coeffs: vec![Rational::zero(); n + 1],
        }
    }

    pub fn one(n: usize) -> Self {
        let mut c = CohomologyClass::zero(n);
        c.coeffs[0] = Rational::one();
        c
    }

    /// a·h as a class on ℙⁿ.
    pub fn hyperplane_multiple(n: usize, a: Rational) -> Self {
        let mut c = CohomologyClass::zero(n);
        if n >= 1 {
            c.coeffs[1] = a;
        }
        c
    }

    pub fn from_coeffs(n: usize, mut coeffs: Vec<Rational>) -> Self {
        coeffs.resize(n + 1, Rational::zero());
        CohomologyClass { n, coeffs }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    fn check_dims(&self, other: &CohomologyClass) -> Result<(), CohomologyError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(CohomologyError::DimensionMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    pub fn add(&self, other: &CohomologyClass) -> Result<CohomologyClass, CohomologyError> {
        self.check_dims(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CohomologyClass { n: self.n, coeffs })
    }

    pub fn sub(&self, other: &CohomologyClass) -> Result<CohomologyClass, CohomologyError> {
        self.check_dims(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CohomologyClass { n: self.n, coeffs })
    }

    /// Product truncated at h^{n+1}.
    pub fn mul(&self, other: &CohomologyClass) -> Result<CohomologyClass, CohomologyError> {
        self.check_dims(other)?;
        let mut out = CohomologyClass::zero(self.n);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > self.n {
                    break;
                }
                out.coeffs[i + j] += a * b;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: usize) -> CohomologyClass {
        let mut acc = CohomologyClass::one(self.n);
        for _ in 0..k {
            acc = acc.mul(self).expect("same dimension");
        }
        acc
    }

    pub fn to_text(&self) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let coeff = if c.is_integer() {
                format!("{}", c.numer())
            } else {
                format!("{}/{}", c.numer(), c.denom())
            };
            let part = match i {
                0 => coeff,
                1 if c.is_one() => "h".into(),
                1 => format!("{coeff}*h"),
                _ if c.is_one() => format!("h^{i}"),
                _ => format!("{coeff}*h^{i}"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// A direct sum of line bundles O(a₁) ⊕ … ⊕ O(a_r) on ℙⁿ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSheaf {
    pub twists: Vec<i64>,
}

impl SplitSheaf {
    pub fn new(twists: Vec<i64>) -> Self {
        assert!(!twists.is_empty(), "a split sheaf has rank at least 1");
        SplitSheaf { twists }
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    pub fn c1_coefficient(&self) -> i64 {
        self.twists.iter().sum()
    }

    /// First Chern class Σ aᵢ · h on ℙⁿ.
    pub fn c1(&self, n: usize) -> CohomologyClass {
        CohomologyClass::hyperplane_multiple(
            n,
            Rational::from_integer(BigInt::from(self.c1_coefficient())),
        )
    }

    /// Slope with respect to the hyperplane class: (Σ aᵢ) / rank.
    pub fn slope(&self) -> Rational {
        Rational::new(
            BigInt::from(self.c1_coefficient()),
            BigInt::from(self.rank() as i64),
        )
    }
}

/// Whitney product Π(1 + aᵢ h) truncated at h^{n+1}.
pub fn total_chern(sheaf: &SplitSheaf, n: usize) -> CohomologyClass {
    let mut acc = CohomologyClass::one(n);
    for &a in &sheaf.twists {
        let mut factor = CohomologyClass::one(n);
        if n >= 1 {
            factor.coeffs[1] = Rational::from_integer(BigInt::from(a));
        }
        acc = acc.mul(&factor).expect("same dimension");
    }
    acc
}

/// ∫_{ℙⁿ}: the coefficient of hⁿ.
pub fn integrate(class: &CohomologyClass) -> Rational {
    class.coeff(class.dimension())
}

/// The residue total for a split 2-flag on ℙⁿ:
/// ∫ c₁(N₁₂)^{n−1−j} · c₁(N₂)^{1+j}, where c₁(N₁₂) = c₁(F₂) − c₁(F₁)
/// and c₁(N₂) = (n+1)h − c₁(F₂) (the tangent class of ℙⁿ is (n+1)h).
pub fn flag_residue_total(
    n: usize,
    f1: &SplitSheaf,
    f2: &SplitSheaf,
    j: usize,
) -> Result<Rational, CohomologyError> {
    if n == 0 || j > n - 1 {
        return Err(CohomologyError::IndexOutOfRange { j, n });
    }
    let c1_n12 = f2.c1(n).sub(&f1.c1(n))?;
    let tangent = CohomologyClass::hyperplane_multiple(
        n,
        Rational::from_integer(BigInt::from(n as i64 + 1)),
    );
    let c1_n2 = tangent.sub(&f2.c1(n))?;
    let class = c1_n12.pow(n - 1 - j).mul(&c1_n2.pow(1 + j))?;
    Ok(integrate(&class))
}

/// Slope of a split sheaf (degree over rank against the hyperplane
/// class on a Picard-rank-one model).
pub fn slope(sheaf: &SplitSheaf) -> Rational {
    sheaf.slope()
}

/// The positivity statement attached to semi-stability: with
/// c₁(F) = aH and c₁(F₁) = bH, the corollary computes
/// c₁ⁿ(N₁₂) = (a−b)ⁿ Hⁿ, which must be nonnegative when F is
/// semi-stable. The precondition (slope comparison) is reported, not
/// thrown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositivityReport {
    pub a: i64,
    pub b: i64,
    pub n: usize,
    pub value: Rational,
    pub nonneg: bool,
    /// slope(F) ≥ slope(F₁), the semi-stability proxy.
    pub precondition_holds: bool,
}

pub fn residue_positivity_check(n: usize, f: &SplitSheaf, f1: &SplitSheaf) -> PositivityReport {
    let a = f.c1_coefficient();
    let b = f1.c1_coefficient();
    let diff = Rational::from_integer(BigInt::from(a - b));
    let mut value = Rational::one();
    for _ in 0..n {
        value *= &diff;
    }
    let nonneg = !value.is_negative();
    PositivityReport {
        a,
        b,
        n,
        value,
        nonneg,
        precondition_holds: f.slope() >= f1.slope(),
    }
}
