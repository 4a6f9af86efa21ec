//! Numerical Grothendieck residues on small tori.
//!
//! The residue (2πi)^{-n} ∮_T h/(f_1⋯f_n) dz around an isolated common
//! zero is computed by the product trapezoid rule: parameterizing each
//! circle as z_k = c_k + r_k e^{iθ}, the integral becomes the plain
//! average over the node grid of integrand · Π_k (z_k − c_k). The rule
//! is exact for trigonometric polynomials and spectrally accurate for
//! analytic integrands, so doubling the node count until two successive
//! estimates agree is a practical convergence test.
//!
//! Expressions are compiled into flat register programs with common
//! subexpression elimination before grid sweeps; summation is pairwise
//! in a fixed grid order, so results are bit-stable for a fixed node
//! count.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_traits::ToPrimitive;

use crate::expr::{powf_principal, powi_c, EvalError, Expr, BRANCH_GUARD};
use crate::C64;

/// Tolerances and budgets for residue estimation.
#[derive(Clone, Debug)]
pub struct QuadSettings {
    /// Agreement threshold between successive refinements
    /// (absolute-or-relative, whichever is larger).
    pub rel_tol: f64,
    /// Refinement starts here and doubles.
    pub start_nodes: usize,
    /// Hard cap on nodes per circle.
    pub max_nodes: usize,
    /// Minimum denominator modulus on (and near) the torus.
    pub denominator_guard: f64,
    /// Converged values this close to an integer snap to it.
    pub snap_tol: f64,
    /// How many times radii may be halved when the guard trips.
    pub shrink_attempts: u32,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            rel_tol: 1e-10,
            start_nodes: 8,
            max_nodes: 256,
            denominator_guard: 1e-8,
            snap_tol: 1e-6,
            shrink_attempts: 6,
        }
    }
}

/// Default torus radius around a singular point.
pub const DEFAULT_RADIUS: f64 = 0.5;

/// A product torus `{ |z_k - c_k| = r_k }` with a common node count per
/// circle.
#[derive(Clone, Debug)]
pub struct TorusSpec {
    pub center: Vec<C64>,
    pub radii: Vec<f64>,
    pub nodes_per_circle: usize,
}

impl TorusSpec {
    pub fn new(
        center: Vec<C64>,
        radii: Vec<f64>,
        nodes_per_circle: usize,
    ) -> Result<Self, QuadError> {
        if center.len() != radii.len() {
            return Err(QuadError::BadTorus {
                detail: "center and radii dimensions differ".into(),
            });
        }
        if radii.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(QuadError::BadTorus {
                detail: "radii must be positive and finite".into(),
            });
        }
        if nodes_per_circle < 4 || !nodes_per_circle.is_power_of_two() {
            return Err(QuadError::BadTorus {
                detail: "nodes per circle must be a power of two, at least 4".into(),
            });
        }
        Ok(TorusSpec {
            center,
            radii,
            nodes_per_circle,
        })
    }

    pub fn dims(&self) -> usize {
        self.center.len()
    }
}

/// The outcome of an adaptive residue estimation.
#[derive(Clone, Debug)]
pub struct ResidueEstimate {
    pub value: C64,
    /// (nodes per circle, estimate) for each refinement level run.
    pub node_history: Vec<(usize, C64)>,
    pub converged: bool,
    /// Present iff converged and the value is within snap tolerance of
    /// a real integer.
    pub snapped_integer: Option<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuadError {
    Eval(EvalError),
    DenominatorNearTorus { index: usize, min_modulus: f64 },
    NonIntegerResidue { re: f64, im: f64 },
    BadTorus { detail: String },
    DimensionMismatch { detail: String },
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::Eval(e) => write!(f, "{e}"),
            QuadError::DenominatorNearTorus { index, min_modulus } => write!(
                f,
                "denominator #{index} vanishes near the torus (min modulus {min_modulus:e})"
            ),
            QuadError::NonIntegerResidue { re, im } => write!(
                f,
                "converged residue {re} + {im}i is not within snap tolerance of an integer"
            ),
            QuadError::BadTorus { detail } => write!(f, "invalid torus: {detail}"),
            QuadError::DimensionMismatch { detail } => write!(f, "dimension mismatch: {detail}"),
        }
    }
}

impl core::error::Error for QuadError {}

impl From<EvalError> for QuadError {
    fn from(e: EvalError) -> Self {
        QuadError::Eval(e)
    }
}

// ---------------------------------------------------------------------------
// Compiled integrands
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
enum Op {
    Var(u16),
    Const(C64),
    Add(u32, u32),
    Mul(u32, u32),
    Powi(u32, i32),
    Powf(u32, f64),
}

/// Structural key for hash-consing; floats keyed by bit pattern.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum OpKey {
    Var(u16),
    Const(u64, u64),
    Add(u32, u32),
    Mul(u32, u32),
    Powi(u32, i32),
    Powf(u32, u64),
}

struct ProgramBuilder {
    ops: Vec<Op>,
    cse: BTreeMap<OpKey, u32>,
}

impl ProgramBuilder {
    fn new() -> Self {
        ProgramBuilder {
            ops: Vec::new(),
            cse: BTreeMap::new(),
        }
    }

    fn push(&mut self, key: OpKey, op: Op) -> u32 {
        if let Some(&reg) = self.cse.get(&key) {
            return reg;
        }
        let reg = self.ops.len() as u32;
        self.ops.push(op);
        self.cse.insert(key, reg);
        reg
    }

    fn constant(&mut self, v: C64) -> u32 {
        self.push(OpKey::Const(v.re.to_bits(), v.im.to_bits()), Op::Const(v))
    }

    fn add(&mut self, a: u32, b: u32) -> u32 {
        let (a, b) = (a.min(b), a.max(b));
        self.push(OpKey::Add(a, b), Op::Add(a, b))
    }

    fn mul(&mut self, a: u32, b: u32) -> u32 {
        let (a, b) = (a.min(b), a.max(b));
        self.push(OpKey::Mul(a, b), Op::Mul(a, b))
    }

    fn compile_expr(&mut self, e: &Expr, nvars: usize) -> Result<u32, QuadError> {
        match e {
            Expr::Const(q) => {
                let v = q.to_f64().ok_or(QuadError::Eval(EvalError::Overflow))?;
                Ok(self.constant(C64::new(v, 0.0)))
            }
            Expr::Var(i) => {
                if *i >= nvars {
                    return Err(QuadError::DimensionMismatch {
                        detail: format!("variable #{i} outside ambient of dimension {nvars}"),
                    });
                }
                Ok(self.push(OpKey::Var(*i as u16), Op::Var(*i as u16)))
            }
            Expr::Sum(children) => {
                let mut acc = None;
                for c in children {
                    let r = self.compile_expr(c, nvars)?;
                    acc = Some(match acc {
                        None => r,
                        Some(a) => self.add(a, r),
                    });
                }
                Ok(acc.unwrap_or_else(|| self.constant(C64::new(0.0, 0.0))))
            }
            Expr::Prod(children) => {
                let mut acc = None;
                for c in children {
                    let r = self.compile_expr(c, nvars)?;
                    acc = Some(match acc {
                        None => r,
                        Some(a) => self.mul(a, r),
                    });
                }
                Ok(acc.unwrap_or_else(|| self.constant(C64::new(1.0, 0.0))))
            }
            Expr::Pow(base, exp) => {
                let b = self.compile_expr(base, nvars)?;
                if exp.is_integer() {
                    if let Some(k) = exp.to_integer().to_i32() {
                        return Ok(self.push(OpKey::Powi(b, k), Op::Powi(b, k)));
                    }
                }
                let q = exp.to_f64().ok_or(QuadError::Eval(EvalError::Overflow))?;
                Ok(self.push(OpKey::Powf(b, q.to_bits()), Op::Powf(b, q)))
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Combiner {
    /// numerator / Π denominators
    Ratio { numerator: u32 },
    /// det(entries as n×n, row-major) / Π denominators
    DetRatio { entries: Vec<u32>, n: usize },
    /// (Σ diag)^power / Π denominators
    TracePowerRatio { diag: Vec<u32>, power: u32 },
}

/// A fully compiled residue integrand over an `nvars`-torus.
#[derive(Clone, Debug)]
pub struct CompiledIntegrand {
    ops: Vec<Op>,
    nvars: usize,
    combiner: Combiner,
    denominators: Vec<u32>,
}

impl CompiledIntegrand {
    /// numerator / Π denominators.
    pub fn ratio(
        numerator: &Expr,
        denominators: &[Expr],
        nvars: usize,
    ) -> Result<Self, QuadError> {
        let mut b = ProgramBuilder::new();
        let numerator = b.compile_expr(numerator, nvars)?;
        let denoms = denominators
            .iter()
            .map(|d| b.compile_expr(d, nvars))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CompiledIntegrand {
            ops: b.ops,
            nvars,
            combiner: Combiner::Ratio { numerator },
            denominators: denoms,
        })
    }

    /// det(J(components)) / Π components — the Milnor-number integrand.
    pub fn jacobian(components: &[Expr], nvars: usize) -> Result<Self, QuadError> {
        if components.len() != nvars {
            return Err(QuadError::DimensionMismatch {
                detail: format!(
                    "{} components for an ambient of dimension {nvars}",
                    components.len()
                ),
            });
        }
        let mut b = ProgramBuilder::new();
        let mut entries = Vec::with_capacity(nvars * nvars);
        for comp in components {
            for v in 0..nvars {
                let d = comp.diff(v);
                entries.push(b.compile_expr(&d, nvars)?);
            }
        }
        let denoms = components
            .iter()
            .map(|c| b.compile_expr(c, nvars))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CompiledIntegrand {
            ops: b.ops,
            nvars,
            combiner: Combiner::DetRatio { entries, n: nvars },
            denominators: denoms,
        })
    }

    /// tr(J(components))^power / Π components — the c_1^n integrand.
    pub fn trace_power(components: &[Expr], power: u32, nvars: usize) -> Result<Self, QuadError> {
        if components.len() != nvars {
            return Err(QuadError::DimensionMismatch {
                detail: format!(
                    "{} components for an ambient of dimension {nvars}",
                    components.len()
                ),
            });
        }
        let mut b = ProgramBuilder::new();
        let mut diag = Vec::with_capacity(nvars);
        for (i, comp) in components.iter().enumerate() {
            let d = comp.diff(i);
            diag.push(b.compile_expr(&d, nvars)?);
        }
        let denoms = components
            .iter()
            .map(|c| b.compile_expr(c, nvars))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CompiledIntegrand {
            ops: b.ops,
            nvars,
            combiner: Combiner::TracePowerRatio { diag, power },
            denominators: denoms,
        })
    }

    pub fn dims(&self) -> usize {
        self.nvars
    }

    fn run(&self, point: &[C64], regs: &mut Vec<C64>) -> Result<(), QuadError> {
        regs.clear();
        for op in &self.ops {
            let v = match *op {
                Op::Var(i) => point[i as usize],
                Op::Const(c) => c,
                Op::Add(a, b) => regs[a as usize] + regs[b as usize],
                Op::Mul(a, b) => regs[a as usize] * regs[b as usize],
                Op::Powi(a, k) => {
                    let base = regs[a as usize];
                    if k < 0 && base.norm() < BRANCH_GUARD {
                        return Err(EvalError::DivisionByZero.into());
                    }
                    powi_c(base, k)
                }
                Op::Powf(a, q) => powf_principal(regs[a as usize], q)?,
            };
            regs.push(v);
        }
        Ok(())
    }

    /// Integrand value at a point (after the program has run).
    fn combine(
        &self,
        regs: &[C64],
        det_scratch: &mut Vec<C64>,
        guard: f64,
    ) -> Result<C64, QuadError> {
        let mut denominator = C64::new(1.0, 0.0);
        for (idx, &reg) in self.denominators.iter().enumerate() {
            let d = regs[reg as usize];
            let m = d.norm();
            if m < guard {
                return Err(QuadError::DenominatorNearTorus {
                    index: idx,
                    min_modulus: m,
                });
            }
            denominator *= d;
        }
        let numerator = match &self.combiner {
            Combiner::Ratio { numerator } => regs[*numerator as usize],
            Combiner::DetRatio { entries, n } => {
                det_scratch.clear();
                det_scratch.extend(entries.iter().map(|&r| regs[r as usize]));
                determinant_in_place(det_scratch, *n)
            }
            Combiner::TracePowerRatio { diag, power } => {
                let mut tr = C64::new(0.0, 0.0);
                for &r in diag {
                    tr += regs[r as usize];
                }
                powi_c(tr, *power as i32)
            }
        };
        let v = numerator / denominator;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Overflow.into())
        }
    }
}

/// In-place LU determinant with partial pivoting (row-major n×n).
fn determinant_in_place(m: &mut [C64], n: usize) -> C64 {
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col * n + col].norm_sqr();
        for row in (col + 1)..n {
            let s = m[row * n + col].norm_sqr();
            if s > best {
                best = s;
                pivot = row;
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in col..n {
                m.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let diag = m[col * n + col];
        det *= diag;
        for row in (col + 1)..n {
            let factor = m[row * n + col] / diag;
            for k in (col + 1)..n {
                let sub = factor * m[col * n + k];
                m[row * n + k] -= sub;
            }
        }
    }
    det
}

/// Deterministic pairwise accumulator (binary-counter scheme): the
/// reduction tree depends only on the number of pushed values, never on
/// evaluation order or chunking.
struct PairwiseSum {
    levels: Vec<Option<C64>>,
}

impl PairwiseSum {
    fn new() -> Self {
        PairwiseSum { levels: Vec::new() }
    }

    fn push(&mut self, mut v: C64) {
        let mut level = 0;
        loop {
            if level == self.levels.len() {
                self.levels.push(Some(v));
                return;
            }
            match self.levels[level].take() {
                None => {
                    self.levels[level] = Some(v);
                    return;
                }
                Some(existing) => {
                    v = existing + v;
                    level += 1;
                }
            }
        }
    }

    fn total(self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for level in self.levels.into_iter().flatten() {
            acc += level;
        }
        acc
    }
}

/// One trapezoid sweep: mean over the N^n grid of
/// integrand(z)·Π(z_k − c_k).
fn integrate_on_torus(
    integrand: &CompiledIntegrand,
    torus: &TorusSpec,
    guard: f64,
) -> Result<C64, QuadError> {
    let n = integrand.nvars;
    if torus.dims() != n {
        return Err(QuadError::DimensionMismatch {
            detail: format!("torus dimension {} vs integrand {}", torus.dims(), n),
        });
    }
    let nodes = torus.nodes_per_circle;
    // Per-axis circle nodes and radial offsets, computed once.
    let mut axis_points: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut axis_offsets: Vec<Vec<C64>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut pts = Vec::with_capacity(nodes);
        let mut offs = Vec::with_capacity(nodes);
        for i in 0..nodes {
            let theta = core::f64::consts::TAU * (i as f64) / (nodes as f64);
            let e = C64::new(libm::cos(theta), libm::sin(theta));
            let off = torus.radii[k] * e;
            offs.push(off);
            pts.push(torus.center[k] + off);
        }
        axis_points.push(pts);
        axis_offsets.push(offs);
    }

    let total_points = (nodes as u128).pow(n as u32);
    let mut regs: Vec<C64> = Vec::with_capacity(integrand.ops.len());
    let mut det_scratch: Vec<C64> = Vec::new();
    let mut sum = PairwiseSum::new();
    let mut idx = vec![0usize; n];
    let mut point: Vec<C64> = (0..n).map(|k| axis_points[k][0]).collect();

    loop {
        let mut offset_prod = C64::new(1.0, 0.0);
        for k in 0..n {
            offset_prod *= axis_offsets[k][idx[k]];
        }
        integrand.run(&point, &mut regs)?;
        let v = integrand.combine(&regs, &mut det_scratch, guard)?;
        sum.push(v * offset_prod);

        // Odometer increment, least-significant axis first.
        let mut axis = 0;
        loop {
            if axis == n {
                let mean = sum.total() / C64::new(total_points as f64, 0.0);
                return Ok(mean);
            }
            idx[axis] += 1;
            if idx[axis] < nodes {
                point[axis] = axis_points[axis][idx[axis]];
                break;
            }
            idx[axis] = 0;
            point[axis] = axis_points[axis][0];
            axis += 1;
        }
    }
}

/// Denominator guard: every denominator must stay above `guard` in
/// modulus on a quasi-random sample of 2^n · nodes torus points.
fn guard_check(
    integrand: &CompiledIntegrand,
    center: &[C64],
    radii: &[f64],
    nodes: usize,
    guard: f64,
) -> Result<(), QuadError> {
    let n = integrand.nvars;
    let samples = (1usize << n.min(16)).saturating_mul(nodes);
    // Kronecker lattice angles: deterministic, fills the torus evenly.
    const ALPHAS: [f64; 8] = [
        0.41421356237309515, // frac(sqrt 2)
        0.7320508075688772,  // frac(sqrt 3)
        0.2360679774997896,  // frac(sqrt 5)
        0.6457513110645907,  // frac(sqrt 7)
        0.3166247903553998,  // frac(sqrt 11)
        0.6055512754639891,  // frac(sqrt 13)
        0.1231056256176605,  // frac(sqrt 17)
        0.35889894354067355, // frac(sqrt 19)
    ];
    let mut regs: Vec<C64> = Vec::with_capacity(integrand.ops.len());
    let mut point = vec![C64::new(0.0, 0.0); n];
    let mut min_moduli = vec![f64::INFINITY; integrand.denominators.len()];
    for j in 0..samples {
        for (k, coord) in point.iter_mut().enumerate() {
            let frac = ((j + 1) as f64 * ALPHAS[k % ALPHAS.len()]).fract();
            let theta = core::f64::consts::TAU * frac;
            *coord = center[k] + radii[k] * C64::new(libm::cos(theta), libm::sin(theta));
        }
        integrand.run(&point, &mut regs)?;
        for (i, &reg) in integrand.denominators.iter().enumerate() {
            let m = regs[reg as usize].norm();
            if m < min_moduli[i] {
                min_moduli[i] = m;
            }
        }
    }
    for (i, &m) in min_moduli.iter().enumerate() {
        if m < guard {
            return Err(QuadError::DenominatorNearTorus {
                index: i,
                min_modulus: m,
            });
        }
    }
    Ok(())
}

/// (2πi)^{-n} ∮_T numerator/(Π denominators) dz over the given torus,
/// at the torus's own node count. Fails if any denominator comes within
/// the guard threshold of zero near the torus.
pub fn grothendieck_residue(
    numerator: &Expr,
    denominators: &[Expr],
    torus: &TorusSpec,
) -> Result<C64, QuadError> {
    let settings = QuadSettings::default();
    let integrand = CompiledIntegrand::ratio(numerator, denominators, torus.dims())?;
    guard_check(
        &integrand,
        &torus.center,
        &torus.radii,
        torus.nodes_per_circle,
        settings.denominator_guard,
    )?;
    integrate_on_torus(&integrand, torus, settings.denominator_guard)
}

/// Doubles nodes per circle from `settings.start_nodes` until two
/// successive estimates agree within tolerance or the cap is reached.
pub fn refine_until_stable(
    integrand: &CompiledIntegrand,
    center: &[C64],
    radii: &[f64],
    settings: &QuadSettings,
) -> Result<ResidueEstimate, QuadError> {
    if center.len() != integrand.nvars || radii.len() != integrand.nvars {
        return Err(QuadError::DimensionMismatch {
            detail: "center/radii dimension differs from integrand".into(),
        });
    }
    guard_check(
        integrand,
        center,
        radii,
        settings.start_nodes,
        settings.denominator_guard,
    )?;
    let mut history: Vec<(usize, C64)> = Vec::new();
    let mut nodes = settings.start_nodes.max(4).next_power_of_two();
    let mut previous: Option<C64> = None;
    let mut converged = false;
    let mut value = C64::new(0.0, 0.0);
    while nodes <= settings.max_nodes {
        let torus = TorusSpec::new(center.to_vec(), radii.to_vec(), nodes)?;
        value = integrate_on_torus(integrand, &torus, settings.denominator_guard)?;
        history.push((nodes, value));
        if let Some(prev) = previous {
            let tol = settings.rel_tol.max(settings.rel_tol * value.norm());
            if (value - prev).norm() <= tol {
                converged = true;
                break;
            }
        }
        previous = Some(value);
        nodes *= 2;
    }
    let snapped_integer = if converged {
        snap_to_integer(value, settings.snap_tol)
    } else {
        None
    };
    Ok(ResidueEstimate {
        value,
        node_history: history,
        converged,
        snapped_integer,
    })
}

fn snap_to_integer(v: C64, tol: f64) -> Option<i64> {
    if libm::fabs(v.im) >= tol {
        return None;
    }
    let rounded = libm::round(v.re);
    if libm::fabs(v.re - rounded) < tol && libm::fabs(rounded) < 9.0e18 {
        Some(rounded as i64)
    } else {
        None
    }
}

/// Runs the refinement ladder, halving all radii (up to
/// `shrink_attempts` times) whenever the denominator guard trips —
/// either in the lattice pre-check or on an actual grid node.
fn refine_with_shrink(
    integrand: &CompiledIntegrand,
    center: &[C64],
    radii: &[f64],
    settings: &QuadSettings,
) -> Result<ResidueEstimate, QuadError> {
    let mut current = radii.to_vec();
    let mut last_err = None;
    for _ in 0..=settings.shrink_attempts {
        match refine_until_stable(integrand, center, &current, settings) {
            Ok(estimate) => return Ok(estimate),
            Err(e @ QuadError::DenominatorNearTorus { .. }) | Err(e @ QuadError::Eval(_)) => {
                last_err = Some(e);
                for r in &mut current {
                    *r *= 0.5;
                }
            }
            Err(other) => return Err(other),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

/// Milnor-number estimate of the vector field `components` at `point`:
/// numerator det(J), denominators the components themselves. Converged
/// values must snap to an integer; anything else is a diagnostic error.
pub fn jacobian_residue(
    components: &[Expr],
    point: &[C64],
    radii: &[f64],
    settings: &QuadSettings,
) -> Result<ResidueEstimate, QuadError> {
    let integrand = CompiledIntegrand::jacobian(components, point.len())?;
    let estimate = refine_with_shrink(&integrand, point, radii, settings)?;
    if estimate.converged && estimate.snapped_integer.is_none() {
        return Err(QuadError::NonIntegerResidue {
            re: estimate.value.re,
            im: estimate.value.im,
        });
    }
    Ok(estimate)
}

/// (2πi)^{-n} ∮ tr(JX)^n/(Π X_i) dz — the c_1^n Baum-Bott integrand for
/// a vector field with an isolated zero at `point`.
pub fn baumbott_c1n_residue(
    components: &[Expr],
    point: &[C64],
    radii: &[f64],
    settings: &QuadSettings,
) -> Result<ResidueEstimate, QuadError> {
    let n = point.len();
    let power = u32::try_from(n).map_err(|_| QuadError::DimensionMismatch {
        detail: "ambient dimension too large".into(),
    })?;
    let integrand = CompiledIntegrand::trace_power(components, power, n)?;
    refine_with_shrink(&integrand, point, radii, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::vars::VarSet;

    fn origin(n: usize) -> Vec<C64> {
        vec![C64::new(0.0, 0.0); n]
    }

    fn e(text: &str, vars: &VarSet) -> Expr {
        parse(text, vars).expect("parse")
    }

    #[test]
    fn cauchy_integral() {
        let v = VarSet::new(["z"]);
        let torus = TorusSpec::new(origin(1), vec![1.0], 32).unwrap();
        let r = grothendieck_residue(&Expr::one(), &[e("z", &v)], &torus).unwrap();
        assert!((r - C64::new(1.0, 0.0)).norm() < 1e-12, "got {r}");
    }

    #[test]
    fn coefficient_extraction() {
        let v = VarSet::new(["z"]);
        let torus = TorusSpec::new(origin(1), vec![1.0], 32).unwrap();
        let r = grothendieck_residue(&e("z", &v), &[e("z^2", &v)], &torus).unwrap();
        assert!((r - C64::new(1.0, 0.0)).norm() < 1e-12, "got {r}");
    }

    #[test]
    fn no_pole_enclosed() {
        let v = VarSet::new(["z"]);
        let torus = TorusSpec::new(origin(1), vec![1.0], 64).unwrap();
        let r = grothendieck_residue(&Expr::one(), &[e("z - 2", &v)], &torus).unwrap();
        assert!(r.norm() < 1e-12, "got {r}");
    }

    #[test]
    fn staircase_oracle_in_two_variables() {
        // 6xy^2/(x^2 y^3): equals the Jacobian residue of (x^2, y^3),
        // which equals the staircase count 6.
        let v = VarSet::new(["x", "y"]);
        let torus = TorusSpec::new(origin(2), vec![1.0, 1.0], 32).unwrap();
        let r =
            grothendieck_residue(&e("6*x*y^2", &v), &[e("x^2", &v), e("y^3", &v)], &torus).unwrap();
        assert!((r - C64::new(6.0, 0.0)).norm() < 1e-11, "got {r}");
    }

    #[test]
    fn refine_snaps_staircase_value() {
        let v = VarSet::new(["x", "y"]);
        let integrand =
            CompiledIntegrand::ratio(&e("6*x*y^2", &v), &[e("x^2", &v), e("y^3", &v)], 2).unwrap();
        let est = refine_until_stable(
            &integrand,
            &origin(2),
            &[1.0, 1.0],
            &QuadSettings::default(),
        )
        .unwrap();
        assert!(est.converged);
        assert_eq!(est.snapped_integer, Some(6));
    }

    #[test]
    fn jacobian_residue_examples() {
        let v = VarSet::new(["x", "y"]);
        let settings = QuadSettings::default();
        let est = jacobian_residue(
            &[e("x", &v), e("y", &v)],
            &origin(2),
            &[0.5, 0.5],
            &settings,
        )
        .unwrap();
        assert_eq!(est.snapped_integer, Some(1));

        let est = jacobian_residue(
            &[e("x^2", &v), e("y^3", &v)],
            &origin(2),
            &[0.5, 0.5],
            &settings,
        )
        .unwrap();
        assert_eq!(est.snapped_integer, Some(6));
    }

    #[test]
    fn baumbott_examples() {
        let v = VarSet::new(["x", "y"]);
        let settings = QuadSettings::default();
        // X = (x, y): tr(JX)^2 = 4, residue of 4/(xy) is 4.
        let est =
            baumbott_c1n_residue(&[e("x", &v), e("y", &v)], &origin(2), &[0.5, 0.5], &settings)
                .unwrap();
        assert!(est.converged);
        assert_eq!(est.snapped_integer, Some(4));
        // X = (2x, 3y): tr = 5, residue 25/6.
        let est = baumbott_c1n_residue(
            &[e("2*x", &v), e("3*y", &v)],
            &origin(2),
            &[0.5, 0.5],
            &settings,
        )
        .unwrap();
        assert!(est.converged);
        assert!(
            (est.value - C64::new(25.0 / 6.0, 0.0)).norm() < 1e-9,
            "got {}",
            est.value
        );
        assert_eq!(est.snapped_integer, None);
    }

    #[test]
    fn guard_trips_on_torus_pole() {
        let v = VarSet::new(["z"]);
        let torus = TorusSpec::new(origin(1), vec![1.0], 32).unwrap();
        let err = grothendieck_residue(&Expr::one(), &[e("z - 1", &v)], &torus);
        assert!(matches!(err, Err(QuadError::DenominatorNearTorus { .. })));
    }

    #[test]
    fn radii_shrink_away_from_outer_zero() {
        // x(1-x) has a second zero at 1; starting radius 1 trips the
        // guard, shrinking resolves it and recovers multiplicity 1.
        let v = VarSet::new(["x"]);
        let est = jacobian_residue(
            &[e("x*(1 - x)", &v)],
            &origin(1),
            &[1.0],
            &QuadSettings::default(),
        )
        .unwrap();
        assert_eq!(est.snapped_integer, Some(1));
    }

    #[test]
    fn spectral_convergence() {
        // Residue of 1/(z - a) with |a| < r: trapezoid error decays like
        // (|a|/r)^N, far faster than 10x per doubling.
        let v = VarSet::new(["z"]);
        let mut errors = Vec::new();
        for nodes in [8usize, 16, 32] {
            let torus = TorusSpec::new(origin(1), vec![1.0], nodes).unwrap();
            let r = grothendieck_residue(&Expr::one(), &[e("z - 1/2", &v)], &torus).unwrap();
            errors.push((r - C64::new(1.0, 0.0)).norm());
        }
        for w in errors.windows(2) {
            if w[1] > 1e-14 {
                assert!(w[0] / w[1] >= 10.0, "convergence too slow: {errors:?}");
            }
        }
    }

    #[test]
    fn radius_independence() {
        let v = VarSet::new(["x", "y"]);
        let settings = QuadSettings::default();
        let full = jacobian_residue(
            &[e("x^2", &v), e("y^3", &v)],
            &origin(2),
            &[0.5, 0.5],
            &settings,
        )
        .unwrap();
        let halved = jacobian_residue(
            &[e("x^2", &v), e("y^3", &v)],
            &origin(2),
            &[0.25, 0.25],
            &settings,
        )
        .unwrap();
        assert!((full.value - halved.value).norm() < 1e-8);
    }

    #[test]
    fn linear_in_numerator() {
        let v = VarSet::new(["x", "y"]);
        let torus = TorusSpec::new(origin(2), vec![0.75, 0.75], 32).unwrap();
        let denoms = [e("x^2", &v), e("y^2", &v)];
        let a = grothendieck_residue(&e("x*y", &v), &denoms, &torus).unwrap();
        let b = grothendieck_residue(&e("3 + x", &v), &denoms, &torus).unwrap();
        let both = grothendieck_residue(&e("x*y + 3 + x", &v), &denoms, &torus).unwrap();
        assert!((both - (a + b)).norm() < 1e-9);
    }

    #[test]
    fn deterministic_across_runs() {
        let v = VarSet::new(["x", "y"]);
        let torus = TorusSpec::new(origin(2), vec![0.5, 0.5], 16).unwrap();
        let denoms = [e("x^2 + y", &v), e("y^2 - x^3 + 1/4", &v)];
        let r1 = grothendieck_residue(&e("1 + x*y", &v), &denoms, &torus).unwrap();
        let r2 = grothendieck_residue(&e("1 + x*y", &v), &denoms, &torus).unwrap();
        assert_eq!(r1, r2, "bitwise determinism violated");
    }

    #[test]
    fn torus_invariants() {
        assert!(TorusSpec::new(origin(1), vec![1.0], 3).is_err());
        assert!(TorusSpec::new(origin(1), vec![1.0], 12).is_err());
        assert!(TorusSpec::new(origin(1), vec![-1.0], 8).is_err());
        assert!(TorusSpec::new(origin(2), vec![1.0], 8).is_err());
    }
}
