//! The flag data model and the theorem-verification layer.
//!
//! A chart holds a 2-flag in local coordinates: a vector field X (the
//! one-dimensional foliation) and a 1-form ω (the codimension-one
//! foliation), with ι_X ω = 0 as the flag condition. Residues at
//! isolated singular points are computed along two independent paths —
//! exact local algebra (Milnor numbers via standard bases) and
//! numerical Grothendieck residues — and the two must agree exactly
//! after integer snapping; disagreement is a hard failure, never
//! averaged away.
//!
//! On top of the per-foliation residues sit the theorem-level checks:
//! the (−1)ⁿ(n−1)! comparison between the two foliations' residues
//! (with its ideal-equality argument), the integrating-factor
//! computation of the flag residue Res_{c₁ⁿ}, the binomial identity
//! specialization, and the no-isolated-singularities statement for the
//! subfoliation.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::expr::{EvalError, Expr, NonPolynomialError};
use crate::forms::{DifferentialForm, FormsError};
use crate::ideal::{
    groebner, ideals_equal, local_multiplicity, IdealError, IdealPresentation,
    DEFAULT_MAX_REDUCTION_STEPS,
};
use crate::poly::{MonomialOrder, PolyError, Polynomial};
use crate::quad::{
    baumbott_c1n_residue, jacobian_residue, QuadError, QuadSettings, ResidueEstimate,
    DEFAULT_RADIUS,
};
use crate::sample::SampleStream;
use crate::vars::VarSet;
use crate::{Rational, C64};

/// Absolute tolerance for the numeric identity checks (flag condition,
/// integrating factor residual).
pub const IDENTITY_TOL: f64 = 1e-9;

/// Sample annulus for identity checks: coordinates keep away from the
/// coordinate hyperplanes (poles of logarithmic data) and stay small
/// enough that every corpus branch base stays off the cut.
const SAMPLE_R_MIN: f64 = 0.15;
const SAMPLE_R_MAX: f64 = 0.45;

#[derive(Clone, Debug)]
pub enum FlagError {
    ComponentCount { expected: usize, found: usize },
    IntegratingFactorInvalid { max_residual: f64 },
    NonPolynomialComponents { node: String },
    LocalFormUnavailable { node: String },
    OracleDisagreement { algebraic: String, numeric: C64 },
    UnsupportedConfiguration { detail: String },
    NotNormalForm { detail: String },
    FlagConditionFails { detail: String },
    SamplingFailed { detail: String },
    NonRationalPoint,
    Eval(EvalError),
    Poly(PolyError),
    Ideal(IdealError),
    Quad(QuadError),
    Forms(FormsError),
}

impl fmt::Display for FlagError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlagError::ComponentCount { expected, found } => {
                write!(f, "expected {expected} components, found {found}")
            }
            FlagError::IntegratingFactorInvalid { max_residual } => write!(
                f,
                "ω − f·dg residual {max_residual:e} exceeds tolerance at sample points"
            ),
            FlagError::NonPolynomialComponents { node } => {
                write!(f, "operation needs polynomial components; offending node `{node}`")
            }
            FlagError::LocalFormUnavailable { node } => write!(
                f,
                "cannot extract a polynomial local form modulo units at `{node}`"
            ),
            FlagError::OracleDisagreement { algebraic, numeric } => write!(
                f,
                "algebraic residue {algebraic} disagrees with numeric estimate {numeric}"
            ),
            FlagError::UnsupportedConfiguration { detail } => {
                write!(f, "unsupported configuration: {detail}")
            }
            FlagError::NotNormalForm { detail } => {
                write!(f, "chart is not in the required normal form: {detail}")
            }
            FlagError::FlagConditionFails { detail } => {
                write!(f, "flag condition fails: {detail}")
            }
            FlagError::SamplingFailed { detail } => {
                write!(f, "could not sample admissible points: {detail}")
            }
            FlagError::NonRationalPoint => {
                write!(f, "the algebraic path requires exact rational coordinates")
            }
            FlagError::Eval(e) => write!(f, "{e}"),
            FlagError::Poly(e) => write!(f, "{e}"),
            FlagError::Ideal(e) => write!(f, "{e}"),
            FlagError::Quad(e) => write!(f, "{e}"),
            FlagError::Forms(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FlagError {}

impl From<EvalError> for FlagError {
    fn from(e: EvalError) -> Self {
        FlagError::Eval(e)
    }
}
impl From<PolyError> for FlagError {
    fn from(e: PolyError) -> Self {
        FlagError::Poly(e)
    }
}
impl From<IdealError> for FlagError {
    fn from(e: IdealError) -> Self {
        FlagError::Ideal(e)
    }
}
impl From<QuadError> for FlagError {
    fn from(e: QuadError) -> Self {
        FlagError::Quad(e)
    }
}
impl From<FormsError> for FlagError {
    fn from(e: FormsError) -> Self {
        FlagError::Forms(e)
    }
}
impl From<NonPolynomialError> for FlagError {
    fn from(e: NonPolynomialError) -> Self {
        FlagError::NonPolynomialComponents { node: e.node }
    }
}

/// A singular point, either exact (rational coordinates, enabling the
/// algebraic oracle) or approximate (numeric path only).
#[derive(Clone, Debug, PartialEq)]
pub enum PointSpec {
    Exact(Vec<Rational>),
    Approx(Vec<C64>),
}

impl PointSpec {
    pub fn origin(n: usize) -> Self {
        PointSpec::Exact(vec![Rational::zero(); n])
    }

    pub fn dims(&self) -> usize {
        match self {
            PointSpec::Exact(p) => p.len(),
            PointSpec::Approx(p) => p.len(),
        }
    }

    pub fn to_complex(&self) -> Vec<C64> {
        match self {
            PointSpec::Exact(p) => p
                .iter()
                .map(|q| C64::new(q.to_f64().unwrap_or(f64::NAN), 0.0))
                .collect(),
            PointSpec::Approx(p) => p.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&[Rational]> {
        match self {
            PointSpec::Exact(p) => Some(p),
            PointSpec::Approx(_) => None,
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            PointSpec::Exact(p) => {
                let coords: Vec<String> = p
                    .iter()
                    .map(|q| {
                        if q.is_integer() {
                            format!("{}", q.numer())
                        } else {
                            format!("{}/{}", q.numer(), q.denom())
                        }
                    })
                    .collect();
                format!("({})", coords.join(", "))
            }
            PointSpec::Approx(p) => {
                let coords: Vec<String> =
                    p.iter().map(|z| format!("{}+{}i", z.re, z.im)).collect();
                format!("({})", coords.join(", "))
            }
        }
    }
}

/// One named theorem-level verification inside a report.
#[derive(Clone, Debug)]
pub struct TheoremCheck {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

impl TheoremCheck {
    fn new(name: &str, passed: bool, details: String) -> Self {
        TheoremCheck {
            name: name.to_string(),
            passed,
            details,
        }
    }
}

/// Which characteristic class a report is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidueTask {
    /// Res_{c_n} of the vector-field foliation.
    CnVectorField,
    /// Res_{c_n} of the 1-form foliation.
    CnOneForm,
    /// Res_{c_1^n} of the flag via the integrating factor.
    C1nFlag,
    /// The (−1)ⁿ(n−1)! comparison between the two foliations.
    Comparison,
    /// The binomial identity specialization.
    BinomialIdentity,
}

impl fmt::Display for ResidueTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ResidueTask::CnVectorField => "res_cn_vf",
            ResidueTask::CnOneForm => "res_cn_form",
            ResidueTask::C1nFlag => "res_c1n_flag",
            ResidueTask::Comparison => "verify_comparison",
            ResidueTask::BinomialIdentity => "verify_binomial_identity",
        };
        write!(f, "{s}")
    }
}

/// A residue computation at one point: the exact value when the
/// algebraic path applies, the quadrature estimate, and the theorem
/// checks that were run.
#[derive(Clone, Debug)]
pub struct ResidueReport {
    pub task: ResidueTask,
    pub point: PointSpec,
    pub algebraic: Option<Rational>,
    pub numeric: Option<ResidueEstimate>,
    pub checks: Vec<TheoremCheck>,
    pub notes: Vec<String>,
}

impl ResidueReport {
    fn new(task: ResidueTask, point: PointSpec) -> Self {
        ResidueReport {
            task,
            point,
            algebraic: None,
            numeric: None,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// How the flag condition was verified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMethod {
    PolynomialExact,
    SymbolicNormalization,
    NumericSampling,
}

#[derive(Clone, Debug)]
pub struct FlagCheck {
    pub holds: bool,
    pub method: CheckMethod,
    pub max_residual: f64,
}

/// A 2-flag in one chart: n variables, vector field X with dim F₁ = 1,
/// 1-form ω with codim F₂ = 1, so the codimension pair is (n−1, 1).
#[derive(Clone, Debug)]
pub struct FlagChart {
    pub vars: VarSet,
    pub vector_field: Vec<Expr>,
    pub one_form: Vec<Expr>,
    pub integrating_factor: Option<(Expr, Expr)>,
    pub theta12: Option<DifferentialForm>,
}

impl FlagChart {
    pub fn new(vars: VarSet, vector_field: Vec<Expr>, one_form: Vec<Expr>) -> Result<Self, FlagError> {
        let n = vars.len();
        if vector_field.len() != n {
            return Err(FlagError::ComponentCount {
                expected: n,
                found: vector_field.len(),
            });
        }
        if one_form.len() != n {
            return Err(FlagError::ComponentCount {
                expected: n,
                found: one_form.len(),
            });
        }
        Ok(FlagChart {
            vars,
            vector_field,
            one_form,
            integrating_factor: None,
            theta12: None,
        })
    }

    pub fn dims(&self) -> usize {
        self.vars.len()
    }

    /// Codimension pair (k₁, k₂) = (n−1, 1).
    pub fn codim(&self) -> (usize, usize) {
        (self.dims() - 1, 1)
    }

    pub fn default_radii(&self) -> Vec<f64> {
        vec![DEFAULT_RADIUS; self.dims()]
    }

    /// Attaches ω = f·dg after verifying the residual at 50 sample
    /// points.
    pub fn with_integrating_factor(mut self, f: Expr, g: Expr) -> Result<Self, FlagError> {
        let n = self.dims();
        let residuals: Vec<Expr> = (0..n)
            .map(|i| {
                Expr::sub(
                    self.one_form[i].clone(),
                    Expr::mul(f.clone(), g.diff(i)),
                )
            })
            .collect();
        let points = sample_points(&residuals, n, 50, 0x1f46)?;
        let mut max_residual = 0.0f64;
        for p in &points {
            for r in &residuals {
                let v = r.eval(p)?;
                if v.norm() > max_residual {
                    max_residual = v.norm();
                }
            }
        }
        if max_residual >= IDENTITY_TOL {
            return Err(FlagError::IntegratingFactorInvalid { max_residual });
        }
        self.integrating_factor = Some((f, g));
        Ok(self)
    }

    /// Attaches a corpus-supplied θ¹² (must be a 1-form on the same
    /// ambient).
    pub fn with_theta12(mut self, theta12: DifferentialForm) -> Result<Self, FlagError> {
        if theta12.degree() != 1 {
            return Err(FlagError::Forms(FormsError::NotAOneForm {
                degree: theta12.degree(),
            }));
        }
        if theta12.vars() != &self.vars {
            return Err(FlagError::UnsupportedConfiguration {
                detail: "theta12 ambient differs from chart".into(),
            });
        }
        self.theta12 = Some(theta12);
        Ok(self)
    }

    /// θ² = df/f from the integrating factor, per the Malgrange
    /// factorization ω = f·dg (so dω = (df/f)∧ω and dθ² = 0).
    pub fn theta2_from_integrating_factor(&self) -> Option<DifferentialForm> {
        let (f, _) = self.integrating_factor.as_ref()?;
        let n = self.dims();
        let coeffs: Vec<Expr> = (0..n)
            .map(|i| Expr::div(f.diff(i), f.clone()))
            .collect();
        Some(DifferentialForm::one_form(self.vars.clone(), &coeffs))
    }

    fn all_polynomial(&self, exprs: &[Expr]) -> Result<Vec<Polynomial>, NonPolynomialError> {
        exprs.iter().map(|e| e.to_polynomial(&self.vars)).collect()
    }
}

/// Deterministic sample points at which every given expression
/// evaluates; resamples (up to 5 batches) past branch cuts and poles.
fn sample_points(exprs: &[Expr], n: usize, count: usize, seed: u64) -> Result<Vec<Vec<C64>>, FlagError> {
    let mut stream = SampleStream::new(seed);
    let mut points = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let max_attempts = count * 5;
    while points.len() < count && attempts < max_attempts {
        attempts += 1;
        let p = stream.next_point(n, SAMPLE_R_MIN, SAMPLE_R_MAX);
        if exprs.iter().all(|e| e.eval(&p).is_ok()) {
            points.push(p);
        }
    }
    if points.len() < count {
        return Err(FlagError::SamplingFailed {
            detail: format!("{} admissible of {count} requested", points.len()),
        });
    }
    Ok(points)
}

/// Verifies the flag condition ι_X ω = Σ X_i ω_i = 0.
///
/// Polynomial charts get an exact check by expansion; otherwise the
/// contraction is normalized symbolically (which already cancels the
/// paper's transcendental presentations), falling back to evaluation at
/// 100 sample points.
pub fn check_flag(chart: &FlagChart) -> Result<FlagCheck, FlagError> {
    let n = chart.dims();
    let poly_x = chart.all_polynomial(&chart.vector_field);
    let poly_w = chart.all_polynomial(&chart.one_form);
    if let (Ok(xs), Ok(ws)) = (poly_x, poly_w) {
        let mut acc = Polynomial::zero(chart.vars.clone());
        for (x, w) in xs.iter().zip(&ws) {
            acc = acc.add(&x.mul(w)?)?;
        }
        return Ok(FlagCheck {
            holds: acc.is_zero(),
            method: CheckMethod::PolynomialExact,
            max_residual: 0.0,
        });
    }
    let contraction = Expr::sum(
        chart
            .vector_field
            .iter()
            .zip(&chart.one_form)
            .map(|(x, w)| Expr::mul(x.clone(), w.clone()))
            .collect(),
    );
    if contraction.is_zero() {
        return Ok(FlagCheck {
            holds: true,
            method: CheckMethod::SymbolicNormalization,
            max_residual: 0.0,
        });
    }
    let points = sample_points(core::slice::from_ref(&contraction), n, 100, 0xf1a9)?;
    let mut max_residual = 0.0f64;
    for p in &points {
        let v = contraction.eval(p)?;
        if v.norm() > max_residual {
            max_residual = v.norm();
        }
    }
    Ok(FlagCheck {
        holds: max_residual < IDENTITY_TOL,
        method: CheckMethod::NumericSampling,
        max_residual,
    })
}

/// Ideal of the vector-field components, with reduced Gröbner basis.
pub fn singular_locus_vf(chart: &FlagChart) -> Result<IdealPresentation, FlagError> {
    let gens: Vec<Polynomial> = chart
        .all_polynomial(&chart.vector_field)?
        .into_iter()
        .filter(|p| !p.is_zero())
        .collect();
    Ok(IdealPresentation::new(
        gens,
        chart.vars.clone(),
        MonomialOrder::GrevLex,
    )?)
}

/// Ideal of the 1-form coefficients, with reduced Gröbner basis.
pub fn singular_locus_form(chart: &FlagChart) -> Result<IdealPresentation, FlagError> {
    let gens: Vec<Polynomial> = chart
        .all_polynomial(&chart.one_form)?
        .into_iter()
        .filter(|p| !p.is_zero())
        .collect();
    Ok(IdealPresentation::new(
        gens,
        chart.vars.clone(),
        MonomialOrder::GrevLex,
    )?)
}

/// Extracts a polynomial generating the same local ideal as `e` at
/// `point`: factors that are nonvanishing units there (constants, and
/// unit powers of polynomials with nonzero value) are stripped; what
/// remains must be polynomial.
pub fn local_polynomial_form(
    e: &Expr,
    vars: &VarSet,
    point: &[Rational],
) -> Result<Polynomial, FlagError> {
    if let Ok(p) = e.to_polynomial(vars) {
        return Ok(p);
    }
    let factors: Vec<Expr> = match e {
        Expr::Prod(children) => children.clone(),
        other => vec![other.clone()],
    };
    let mut poly_part = Polynomial::one(vars.clone());
    for factor in &factors {
        match factor {
            Expr::Const(c) => {
                if c.is_zero() {
                    return Ok(Polynomial::zero(vars.clone()));
                }
                // nonzero constant: a unit, dropped
            }
            Expr::Pow(base, exp) => {
                let base_poly =
                    base.to_polynomial(vars)
                        .map_err(|err| FlagError::LocalFormUnavailable { node: err.node })?;
                if exp.is_integer() && !exp.is_negative() {
                    let k = exp.to_integer().to_u32().ok_or_else(|| {
                        FlagError::LocalFormUnavailable {
                            node: factor.to_text(vars),
                        }
                    })?;
                    poly_part = poly_part.mul(&base_poly.pow(k))?;
                } else {
                    // fractional or negative power: must be a unit at the point
                    let value = base_poly.eval_rational(point);
                    if value.is_zero() {
                        return Err(FlagError::LocalFormUnavailable {
                            node: factor.to_text(vars),
                        });
                    }
                }
            }
            other => {
                let p = other
                    .to_polynomial(vars)
                    .map_err(|err| FlagError::LocalFormUnavailable { node: err.node })?;
                poly_part = poly_part.mul(&p)?;
            }
        }
    }
    Ok(poly_part)
}

fn local_forms_at(
    exprs: &[Expr],
    vars: &VarSet,
    point: &[Rational],
) -> Result<Vec<Polynomial>, FlagError> {
    exprs
        .iter()
        .map(|e| local_polynomial_form(e, vars, point))
        .collect()
}

fn scale_estimate(est: &ResidueEstimate, factor: i64) -> ResidueEstimate {
    let f = C64::new(factor as f64, 0.0);
    ResidueEstimate {
        value: est.value * f,
        node_history: est
            .node_history
            .iter()
            .map(|&(n, v)| (n, v * f))
            .collect(),
        converged: est.converged,
        snapped_integer: est.snapped_integer.map(|k| k * factor),
    }
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// (−1)ⁿ (n−1)!, the comparison factor between the two foliations'
/// c_n-residues.
pub fn comparison_factor(n: usize) -> i64 {
    let sign = if n % 2 == 0 { 1 } else { -1 };
    sign * factorial(n - 1)
}

fn check_oracles(
    report: &mut ResidueReport,
    snap_tol: f64,
) -> Result<(), FlagError> {
    let (Some(algebraic), Some(numeric)) = (&report.algebraic, &report.numeric) else {
        return Ok(());
    };
    if !numeric.converged {
        report.checks.push(TheoremCheck::new(
            "oracle_agreement",
            false,
            "numeric estimate did not converge".into(),
        ));
        return Ok(());
    }
    let alg = algebraic.to_f64().unwrap_or(f64::NAN);
    let delta = (numeric.value - C64::new(alg, 0.0)).norm();
    if delta < snap_tol {
        report.checks.push(TheoremCheck::new(
            "oracle_agreement",
            true,
            format!("|algebraic − numeric| = {delta:e}"),
        ));
        Ok(())
    } else {
        Err(FlagError::OracleDisagreement {
            algebraic: format!("{algebraic}"),
            numeric: numeric.value,
        })
    }
}

/// Res_{c_n}(F₁, N₁; p): the Milnor number of the vector field at an
/// isolated singular point, through both oracles.
pub fn res_cn_vf(
    chart: &FlagChart,
    point: &PointSpec,
    radii: &[f64],
    settings: &QuadSettings,
) -> Result<ResidueReport, FlagError> {
    let mut report = ResidueReport::new(ResidueTask::CnVectorField, point.clone());
    if let Some(exact) = point.as_exact() {
        match local_forms_at(&chart.vector_field, &chart.vars, exact) {
            Ok(gens) => {
                let mu = local_multiplicity(&gens, exact, DEFAULT_MAX_REDUCTION_STEPS)?;
                report.algebraic = Some(Rational::from_integer(BigInt::from(mu)));
            }
            Err(FlagError::LocalFormUnavailable { node }) => {
                report
                    .notes
                    .push(format!("algebraic path unavailable at `{node}`; numeric only"));
            }
            Err(other) => return Err(other),
        }
    } else {
        report
            .notes
            .push("approximate point: numeric path only".into());
    }
    let estimate = jacobian_residue(&chart.vector_field, &point.to_complex(), radii, settings)?;
    report.numeric = Some(estimate);
    check_oracles(&mut report, settings.snap_tol)?;
    Ok(report)
}

/// Res_{c_n}(F₂, N₂; p) = (−1)ⁿ(n−1)!·μ(g; p) for the coefficient map g
/// of the 1-form, through both oracles.
pub fn res_cn_form(
    chart: &FlagChart,
    point: &PointSpec,
    radii: &[f64],
    settings: &QuadSettings,
) -> Result<ResidueReport, FlagError> {
    let n = chart.dims();
    let factor = comparison_factor(n);
    let mut report = ResidueReport::new(ResidueTask::CnOneForm, point.clone());
    if let Some(exact) = point.as_exact() {
        match local_forms_at(&chart.one_form, &chart.vars, exact) {
            Ok(gens) => {
                let mu = local_multiplicity(&gens, exact, DEFAULT_MAX_REDUCTION_STEPS)?;
                report.algebraic = Some(Rational::from_integer(BigInt::from(mu) * BigInt::from(factor)));
            }
            Err(FlagError::LocalFormUnavailable { node }) => {
                report
                    .notes
                    .push(format!("algebraic path unavailable at `{node}`; numeric only"));
            }
            Err(other) => return Err(other),
        }
    } else {
        report
            .notes
            .push("approximate point: numeric path only".into());
    }
    let mu_estimate = jacobian_residue(&chart.one_form, &point.to_complex(), radii, settings)?;
    report.numeric = Some(scale_estimate(&mu_estimate, factor));
    report
        .notes
        .push(format!("comparison factor (−1)^{n}·({n}−1)! = {factor}"));
    check_oracles(&mut report, settings.snap_tol * factor.unsigned_abs() as f64)?;
    Ok(report)
}

/// The comparison between the two foliations' residues:
/// (i) ideal equality of the component ideals (the Koszul-complex
/// consequence of ι_X ω = 0), (ii) equality of the two Milnor numbers,
/// (iii) the (−1)ⁿ(n−1)! ratio between the residues, verified on the
/// numeric path.
pub fn verify_comparison(
    chart: &FlagChart,
    point: &PointSpec,
    radii: &[f64],
    settings: &QuadSettings,
) -> Result<ResidueReport, FlagError> {
    let n = chart.dims();
    let factor = comparison_factor(n);
    let mut report = ResidueReport::new(ResidueTask::Comparison, point.clone());

    let exact = match point.as_exact() {
        Some(e) => e,
        None => {
            return Err(FlagError::NonRationalPoint);
        }
    };
    let f_gens = local_forms_at(&chart.vector_field, &chart.vars, exact)?;
    let g_gens = local_forms_at(&chart.one_form, &chart.vars, exact)?;

    // (i) ideal equality
    let equal = ideals_equal(&f_gens, &g_gens, MonomialOrder::GrevLex)?;
    report.checks.push(TheoremCheck::new(
        "ideal_equality",
        equal,
        if equal {
            "(f) = (g) as generated ideals".into()
        } else {
            "(f) != (g); the Koszul argument does not apply".into()
        },
    ));
    if !equal {
        return Ok(report);
    }

    // (ii) Milnor number equality
    let mu_f = local_multiplicity(&f_gens, exact, DEFAULT_MAX_REDUCTION_STEPS)?;
    let mu_g = local_multiplicity(&g_gens, exact, DEFAULT_MAX_REDUCTION_STEPS)?;
    report.checks.push(TheoremCheck::new(
        "milnor_equality",
        mu_f == mu_g,
        format!("μ(f) = {mu_f}, μ(g) = {mu_g}"),
    ));

    // (iii) the ratio between the residues on the numeric path
    let res_f = jacobian_residue(&chart.vector_field, &point.to_complex(), radii, settings)?;
    let res_g_raw = jacobian_residue(&chart.one_form, &point.to_complex(), radii, settings)?;
    let res_g = scale_estimate(&res_g_raw, factor);
    let expected = res_f.value * C64::new(factor as f64, 0.0);
    let delta = (res_g.value - expected).norm();
    let tol = settings.snap_tol * (factor.unsigned_abs() as f64).max(1.0);
    report.checks.push(TheoremCheck::new(
        "residue_ratio",
        delta < tol,
        format!(
            "Res_cn(F2) = {}, (−1)^{n}({n}−1)!·Res_cn(F1) = {}, |Δ| = {delta:e}",
            res_g.value, expected
        ),
    ));
    report.algebraic = Some(Rational::from_integer(BigInt::from(mu_f)));
    report.numeric = Some(res_f);
    report
        .notes
        .push(format!("comparison factor (−1)^{n}·({n}−1)! = {factor}"));
    Ok(report)
}

/// Res_{c₁ⁿ}(F, N₁₂; p) via the integrating-factor corollary: with
/// ω = f·dg one can take θ² = df/f, so dθ² = 0 and the mixed residue
/// vanishes, leaving the c₁ⁿ Baum-Bott integral of the vector field.
pub fn res_c1n_flag(
    chart: &FlagChart,
    point: &PointSpec,
    radii: &[f64],
    settings: &QuadSettings,
) -> Result<ResidueReport, FlagError> {
    if chart.integrating_factor.is_none() {
        return Err(FlagError::UnsupportedConfiguration {
            detail: "no integrating factor on this chart; the mixed-term vanishing is not available"
                .into(),
        });
    }
    let n = chart.dims();
    let mut report = ResidueReport::new(ResidueTask::C1nFlag, point.clone());
    report.checks.push(TheoremCheck::new(
        "mixed_residue_vanishes",
        true,
        "ω = f·dg verified on the chart, so θ² = df/f is closed and the c₁^{n−1}·c₁ term is 0"
            .into(),
    ));

    // tr(JX) symbolically: structural cancellation first, exact
    // polynomial expansion when available.
    let trace = Expr::sum(
        chart
            .vector_field
            .iter()
            .enumerate()
            .map(|(i, x)| x.diff(i))
            .collect(),
    );
    let trace_zero = if trace.is_zero() {
        true
    } else {
        match trace.to_polynomial(&chart.vars) {
            Ok(p) => p.is_zero(),
            Err(_) => false,
        }
    };
    report.checks.push(TheoremCheck::new(
        "trace_symbolic",
        true,
        if trace_zero {
            "tr(JX) reduces to 0 symbolically".into()
        } else {
            "tr(JX) does not reduce to 0 symbolically; value from quadrature".into()
        },
    ));
    if trace_zero {
        report.algebraic = Some(Rational::zero());
    }

    let estimate = baumbott_c1n_residue(&chart.vector_field, &point.to_complex(), radii, settings)?;
    if trace_zero && estimate.converged && estimate.value.norm() >= settings.snap_tol {
        return Err(FlagError::OracleDisagreement {
            algebraic: "0".into(),
            numeric: estimate.value,
        });
    }
    report.numeric = Some(estimate);
    report.notes.push(format!(
        "Res_(c1^{n})(F, N12; p) = Res_(c1^{n})(F1, N1; p) by the integrating-factor corollary"
    ));
    Ok(report)
}

/// The binomial identity in the isolated case, k₁ = n−1, k₂ = 1:
/// BB⁰(F; p) + n·BB¹(F; p) = BB(F₁; p), with BB¹ = 0 from the
/// integrating factor, checked at the residue level.
pub fn verify_binomial_identity(
    chart: &FlagChart,
    point: &PointSpec,
    radii: &[f64],
    settings: &QuadSettings,
) -> Result<ResidueReport, FlagError> {
    if chart.integrating_factor.is_none() && chart.theta12.is_none() {
        return Err(FlagError::UnsupportedConfiguration {
            detail: "need an integrating factor (and optionally θ¹²) for the binomial identity"
                .into(),
        });
    }
    if chart.integrating_factor.is_none() {
        return Err(FlagError::UnsupportedConfiguration {
            detail: "θ¹² alone is not enough: the BB¹ term needs the integrating factor to vanish"
                .into(),
        });
    }
    let n = chart.dims();
    let mut flag_side = res_c1n_flag(chart, point, radii, settings)?;
    let foliation_side =
        baumbott_c1n_residue(&chart.vector_field, &point.to_complex(), radii, settings)?;

    let mut report = ResidueReport::new(ResidueTask::BinomialIdentity, point.clone());
    report.checks.append(&mut flag_side.checks);
    report.checks.push(TheoremCheck::new(
        "bb1_term_vanishes",
        true,
        format!("n·BB¹ = {n}·0 = 0 (dθ² = 0 from the integrating factor)"),
    ));
    let lhs = flag_side
        .numeric
        .as_ref()
        .map(|e| e.value)
        .unwrap_or_default();
    let delta = (lhs - foliation_side.value).norm();
    report.checks.push(TheoremCheck::new(
        "binomial_identity",
        delta < 1e-8,
        format!(
            "Res_(c1^{n})(F, N12) = {lhs}, BB(F1) = {}, |Δ| = {delta:e}",
            foliation_side.value
        ),
    ));
    report.algebraic = flag_side.algebraic;
    report.numeric = Some(foliation_side);
    Ok(report)
}

/// The no-isolated-singularities statement for the subfoliation on a
/// chart where F₂ is regular: with ω = dz₁ the flag condition forces
/// f₁ = 0, and the locus {f₂ = ⋯ = f_n = 0} must not be
/// zero-dimensional.
pub fn check_prop35(chart: &FlagChart) -> Result<bool, FlagError> {
    let n = chart.dims();
    if !chart.one_form[0].is_one() || chart.one_form[1..].iter().any(|c| !c.is_zero()) {
        return Err(FlagError::NotNormalForm {
            detail: "expected ω = dz₁ (coefficients 1, 0, …, 0)".into(),
        });
    }
    let f1 = chart.vector_field[0].to_polynomial(&chart.vars)?;
    if !f1.is_zero() {
        return Err(FlagError::FlagConditionFails {
            detail: format!(
                "ι_X ω = f₁ = {} is not identically zero",
                f1.to_text(MonomialOrder::GrevLex)
            ),
        });
    }
    let rest: Vec<Polynomial> = chart.vector_field[1..]
        .iter()
        .map(|e| e.to_polynomial(&chart.vars))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|p| !p.is_zero())
        .collect();
    let gb = groebner(&rest, MonomialOrder::GrevLex)?;
    let zero_dim = crate::ideal::is_zero_dimensional(&gb, MonomialOrder::GrevLex);
    let _ = n;
    Ok(!zero_dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use num_traits::One;

    fn chart2(x: [&str; 2], w: [&str; 2]) -> FlagChart {
        let vars = VarSet::new(["x", "y"]);
        let vf = x.map(|t| parse(t, &vars).unwrap()).to_vec();
        let of = w.map(|t| parse(t, &vars).unwrap()).to_vec();
        FlagChart::new(vars, vf, of).unwrap()
    }

    #[test]
    fn logarithmic_flag_condition_holds() {
        // X = (z1, 2 z2, 3 z3), ω = (z2 z3, −z1 z3, 1/3 z1 z2):
        // ι_X ω = z1 z2 z3 (1 − 2 + 1) = 0, exactly.
        let vars = VarSet::new(["z1", "z2", "z3"]);
        let vf = ["z1", "2*z2", "3*z3"].map(|t| parse(t, &vars).unwrap()).to_vec();
        let of = ["z2*z3", "-(z1*z3)", "1/3*z1*z2"]
            .map(|t| parse(t, &vars).unwrap())
            .to_vec();
        let chart = FlagChart::new(vars, vf, of).unwrap();
        let check = check_flag(&chart).unwrap();
        assert!(check.holds);
        assert_eq!(check.method, CheckMethod::PolynomialExact);
    }

    #[test]
    fn transcendental_flag_cancels_structurally() {
        // The (−ζ₂, ζ₁, −ζ₄, ζ₃) pairing against (ζ₁, ζ₂, ζ₃, ζ₄).
        let vars = VarSet::new(["x", "y", "w", "t"]);
        let u = "(1 + x^2 + y^2 + w^2 + t^2)";
        let zeta = |m: &str| format!("{m}*{u}^(-3/2)");
        let vf = [
            format!("-({})", zeta("y")),
            zeta("x"),
            format!("-({})", zeta("t")),
            zeta("w"),
        ]
        .map(|t| parse(&t, &vars).unwrap())
        .to_vec();
        let of = [zeta("x"), zeta("y"), zeta("w"), zeta("t")]
            .map(|t| parse(&t, &vars).unwrap())
            .to_vec();
        let chart = FlagChart::new(vars, vf, of).unwrap();
        let check = check_flag(&chart).unwrap();
        assert!(check.holds);
        assert_eq!(check.method, CheckMethod::SymbolicNormalization);
    }

    #[test]
    fn non_flag_is_rejected() {
        let chart = chart2(["1", "0"], ["1", "0"]);
        let check = check_flag(&chart).unwrap();
        assert!(!check.holds);
    }

    #[test]
    fn flag_condition_projective_invariance() {
        // multiplying ω by a unit polynomial and rescaling X keeps it a flag
        let chart = chart2(["x", "y"], ["y^2*(1 + x)", "-(x*y)*(1 + x)"]);
        assert!(check_flag(&chart).unwrap().holds);
        let chart = chart2(["3/2*x", "3/2*y"], ["y^2", "-(x*y)"]);
        assert!(check_flag(&chart).unwrap().holds);
    }

    #[test]
    fn singular_loci() {
        // ω = z0 dz1 − z1 dz0: coefficients (−z1, z0), ideal (z0, z1).
        let vars = VarSet::new(["z0", "z1"]);
        let vf = ["z0", "z1"].map(|t| parse(t, &vars).unwrap()).to_vec();
        let of = ["-z1", "z0"].map(|t| parse(t, &vars).unwrap()).to_vec();
        let chart = FlagChart::new(vars.clone(), vf, of).unwrap();
        let locus = singular_locus_form(&chart).unwrap();
        let expected: Vec<Polynomial> = ["z1", "z0"]
            .iter()
            .map(|t| parse(t, &vars).unwrap().to_polynomial(&vars).unwrap())
            .collect();
        assert_eq!(locus.basis, expected);

        let chart = chart2(["x^2", "y^3"], ["y^3", "-(x^2)"]);
        let locus = singular_locus_vf(&chart).unwrap();
        assert_eq!(locus.gens.len(), 2);
        assert!(locus.is_zero_dimensional());

        // unit component: ideal (1), empty locus
        let chart = chart2(["1 + x", "y"], ["y", "-(1 + x)"]);
        let locus = singular_locus_vf(&chart).unwrap();
        assert_eq!(locus.basis, vec![Polynomial::one(chart.vars.clone())]);
    }

    #[test]
    fn local_form_strips_units() {
        let vars = VarSet::new(["x", "y"]);
        let origin = [Rational::zero(), Rational::zero()];
        let e = parse("-(y)*(1 + x^2 + y^2)^(-3/2)", &vars).unwrap();
        let p = local_polynomial_form(&e, &vars, &origin).unwrap();
        assert_eq!(p, parse("y", &vars).unwrap().to_polynomial(&vars).unwrap());
        // a fractional power of something vanishing at the point is not a unit
        let e = parse("y*(x + y)^(1/2)", &vars).unwrap();
        assert!(matches!(
            local_polynomial_form(&e, &vars, &origin),
            Err(FlagError::LocalFormUnavailable { .. })
        ));
    }

    #[test]
    fn res_cn_vf_both_oracles() {
        let settings = QuadSettings::default();
        let chart = chart2(["x", "y"], ["y", "-x"]);
        let report = res_cn_vf(
            &chart,
            &PointSpec::origin(2),
            &chart.default_radii(),
            &settings,
        )
        .unwrap();
        assert_eq!(report.algebraic, Some(Rational::one()));
        assert_eq!(report.numeric.as_ref().unwrap().snapped_integer, Some(1));
        assert!(report.all_checks_pass());

        let chart = chart2(["x^2", "y^3"], ["y^3", "-(x^2)"]);
        let report = res_cn_vf(
            &chart,
            &PointSpec::origin(2),
            &chart.default_radii(),
            &settings,
        )
        .unwrap();
        assert_eq!(
            report.algebraic,
            Some(Rational::from_integer(BigInt::from(6)))
        );
        assert_eq!(report.numeric.as_ref().unwrap().snapped_integer, Some(6));
    }

    #[test]
    fn res_cn_form_carries_sign_and_factorial() {
        let settings = QuadSettings::default();
        // n = 2: ω = y dx − x dy, coefficients (y, −x), μ = 1,
        // value (−1)²·1!·1 = 1.
        let chart = chart2(["x", "y"], ["y", "-x"]);
        let report = res_cn_form(
            &chart,
            &PointSpec::origin(2),
            &chart.default_radii(),
            &settings,
        )
        .unwrap();
        assert_eq!(report.algebraic, Some(Rational::one()));

        // n = 3: coefficients (x, y, z): (−1)³·2!·1 = −2.
        let vars = VarSet::new(["x", "y", "z"]);
        let vf = ["y", "-x", "0"].map(|t| parse(t, &vars).unwrap()).to_vec();
        let of = ["x", "y", "z"].map(|t| parse(t, &vars).unwrap()).to_vec();
        let chart = FlagChart::new(vars, vf, of).unwrap();
        let report = res_cn_form(
            &chart,
            &PointSpec::origin(3),
            &chart.default_radii(),
            &settings,
        )
        .unwrap();
        assert_eq!(
            report.algebraic,
            Some(Rational::from_integer(BigInt::from(-2)))
        );
        assert_eq!(report.numeric.as_ref().unwrap().snapped_integer, Some(-2));
    }

    #[test]
    fn comparison_on_constructed_flag() {
        let settings = QuadSettings::default();
        let chart = chart2(["x^2", "y^3"], ["-(y^3)", "x^2"]);
        let report = verify_comparison(
            &chart,
            &PointSpec::origin(2),
            &chart.default_radii(),
            &settings,
        )
        .unwrap();
        assert!(report.all_checks_pass(), "checks: {:?}", report.checks);
        assert_eq!(
            report.algebraic,
            Some(Rational::from_integer(BigInt::from(6)))
        );
    }

    #[test]
    fn comparison_detects_non_flag() {
        let settings = QuadSettings::default();
        let chart = chart2(["x^2", "y^3"], ["x^2", "x^2"]);
        let report = verify_comparison(
            &chart,
            &PointSpec::origin(2),
            &chart.default_radii(),
            &settings,
        )
        .unwrap();
        assert!(!report.all_checks_pass());
        assert_eq!(report.checks.len(), 1);
        assert_eq!(report.checks[0].name, "ideal_equality");
    }

    fn radial_chart_with_factor() -> FlagChart {
        // X = (x, y), ω = (y², −xy) = f·dg with f = −x²y, g = y/x.
        let chart = chart2(["x", "y"], ["y^2", "-(x*y)"]);
        let vars = chart.vars.clone();
        chart
            .with_integrating_factor(
                parse("-(x^2*y)", &vars).unwrap(),
                parse("y/x", &vars).unwrap(),
            )
            .unwrap()
    }

    #[test]
    fn integrating_factor_is_validated() {
        let chart = chart2(["x", "y"], ["y^2", "-(x*y)"]);
        let vars = chart.vars.clone();
        let err = chart.clone().with_integrating_factor(
            parse("x", &vars).unwrap(),
            parse("y", &vars).unwrap(),
        );
        assert!(matches!(err, Err(FlagError::IntegratingFactorInvalid { .. })));
        // and the honest factorization passes
        radial_chart_with_factor();
    }

    #[test]
    fn res_c1n_on_radial_chart() {
        let settings = QuadSettings::default();
        let chart = radial_chart_with_factor();
        let report = res_c1n_flag(
            &chart,
            &PointSpec::origin(2),
            &chart.default_radii(),
            &settings,
        )
        .unwrap();
        assert_eq!(report.numeric.as_ref().unwrap().snapped_integer, Some(4));
        assert!(report.all_checks_pass());
    }

    #[test]
    fn res_c1n_requires_integrating_factor() {
        let settings = QuadSettings::default();
        let chart = chart2(["x", "y"], ["y^2", "-(x*y)"]);
        let err = res_c1n_flag(
            &chart,
            &PointSpec::origin(2),
            &chart.default_radii(),
            &settings,
        );
        assert!(matches!(err, Err(FlagError::UnsupportedConfiguration { .. })));
    }

    #[test]
    fn binomial_identity_on_radial_chart() {
        let settings = QuadSettings::default();
        let chart = radial_chart_with_factor();
        let report = verify_binomial_identity(
            &chart,
            &PointSpec::origin(2),
            &chart.default_radii(),
            &settings,
        )
        .unwrap();
        assert!(report.all_checks_pass(), "checks: {:?}", report.checks);
        assert_eq!(report.numeric.as_ref().unwrap().snapped_integer, Some(4));
    }

    #[test]
    fn binomial_identity_unsupported_without_data() {
        let settings = QuadSettings::default();
        let chart = chart2(["x", "y"], ["y^2", "-(x*y)"]);
        let err = verify_binomial_identity(
            &chart,
            &PointSpec::origin(2),
            &chart.default_radii(),
            &settings,
        );
        assert!(matches!(err, Err(FlagError::UnsupportedConfiguration { .. })));
    }

    #[test]
    fn prop35_examples() {
        // ω = dz1, X = (0, z2, z3): locus is the z1-axis, not isolated.
        let vars = VarSet::new(["z1", "z2", "z3"]);
        let vf = ["0", "z2", "z3"].map(|t| parse(t, &vars).unwrap()).to_vec();
        let of = ["1", "0", "0"].map(|t| parse(t, &vars).unwrap()).to_vec();
        let chart = FlagChart::new(vars, vf, of).unwrap();
        assert!(check_prop35(&chart).unwrap());

        let vars = VarSet::new(["z1", "z2"]);
        let vf = ["0", "z2"].map(|t| parse(t, &vars).unwrap()).to_vec();
        let of = ["1", "0"].map(|t| parse(t, &vars).unwrap()).to_vec();
        let chart = FlagChart::new(vars, vf, of).unwrap();
        assert!(check_prop35(&chart).unwrap());

        // control: f1 != 0 violates the flag condition
        let vars = VarSet::new(["z1", "z2"]);
        let vf = ["z1", "z2"].map(|t| parse(t, &vars).unwrap()).to_vec();
        let of = ["1", "0"].map(|t| parse(t, &vars).unwrap()).to_vec();
        let chart = FlagChart::new(vars, vf, of).unwrap();
        assert!(matches!(
            check_prop35(&chart),
            Err(FlagError::FlagConditionFails { .. })
        ));
    }
}
