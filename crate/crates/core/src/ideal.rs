//! Gröbner and local standard bases, quotient dimensions and local
//! multiplicities (Milnor numbers) — the exact-algebra oracle behind
//! every residue computation.
//!
//! Global bases use Buchberger's algorithm with the normal selection
//! strategy and the coprime/chain criteria. Local multiplicities go
//! through Mora's tangent-cone normal form with the negative
//! graded-reverse-lexicographic order; a fast path handles ideals whose
//! only zero is the point itself, where the global quotient dimension
//! already answers the question.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;


use crate::poly::{reduce, Monomial, MonomialOrder, PolyError, Polynomial};
use crate::vars::VarSet;
use crate::Rational;

/// Default cap on Mora reduction steps; the tangent-cone algorithm
/// terminates only when the local quotient is finite, and the input may
/// not be. Exceeding the budget is a diagnostic error, never a wrong
/// answer.
pub const DEFAULT_MAX_REDUCTION_STEPS: u64 = 1_000_000;

/// Cap on staircase enumeration (product of pure-power bounds).
const MAX_STAIRCASE_BOX: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdealError {
    Poly(PolyError),
    NotGlobalOrder,
    NotZeroDimensional,
    NotFiniteAtPoint { detail: String },
    ReductionBudgetExceeded { steps: u64 },
    StaircaseTooLarge { bound: u64 },
}

impl fmt::Display for IdealError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealError::Poly(e) => write!(f, "{e}"),
            IdealError::NotGlobalOrder => write!(f, "operation requires a global monomial order"),
            IdealError::NotZeroDimensional => {
                write!(f, "ideal is not zero-dimensional")
            }
            IdealError::NotFiniteAtPoint { detail } => {
                write!(f, "local quotient is not finite: {detail}")
            }
            IdealError::ReductionBudgetExceeded { steps } => {
                write!(f, "Mora reduction exceeded the step budget ({steps} steps)")
            }
            IdealError::StaircaseTooLarge { bound } => {
                write!(f, "staircase enumeration bound {bound} too large")
            }
        }
    }
}

impl core::error::Error for IdealError {}

impl From<PolyError> for IdealError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::NotGlobalOrder => IdealError::NotGlobalOrder,
            other => IdealError::Poly(other),
        }
    }
}

/// A generator list together with the ambient variables, the active
/// order and the attached reduced Gröbner basis.
#[derive(Clone, Debug)]
pub struct IdealPresentation {
    pub gens: Vec<Polynomial>,
    pub vars: VarSet,
    pub order: MonomialOrder,
    pub basis: Vec<Polynomial>,
}

impl IdealPresentation {
    pub fn new(
        gens: Vec<Polynomial>,
        vars: VarSet,
        order: MonomialOrder,
    ) -> Result<Self, IdealError> {
        let basis = groebner(&gens, order)?;
        Ok(IdealPresentation {
            gens,
            vars,
            order,
            basis,
        })
    }

    pub fn is_zero_dimensional(&self) -> bool {
        is_zero_dimensional(&self.basis, self.order)
    }
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
///
/// Output is unique for (ideal, order): auto-reduced, monic, sorted
/// ascending by leading monomial. Empty input yields the empty basis.
pub fn groebner(gens: &[Polynomial], order: MonomialOrder) -> Result<Vec<Polynomial>, IdealError> {
    if !order.is_global() {
        return Err(IdealError::NotGlobalOrder);
    }
    let mut basis: Vec<Polynomial> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    for g in &basis[1..] {
        if g.vars() != basis[0].vars() {
            return Err(IdealError::Poly(PolyError::AmbientMismatch {
                left: format!("{}", basis[0].vars()),
                right: format!("{}", g.vars()),
            }));
        }
    }

    let mut pairs: Vec<Pair> = Vec::new();
    let mut processed: BTreeSet<(usize, usize)> = BTreeSet::new();
    let lead = |b: &[Polynomial], k: usize| b[k].leading_monomial(order).expect("nonzero");
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            pairs.push(Pair {
                i,
                j,
                lcm: lead(&basis, i).lcm(&lead(&basis, j)),
            });
        }
    }

    while !pairs.is_empty() {
        // Normal selection: minimal lcm total degree, structural tiebreak.
        let mut best = 0;
        for (k, p) in pairs.iter().enumerate().skip(1) {
            let cur = &pairs[best];
            let key = (p.lcm.total_degree(), p.lcm.exponents(), p.i, p.j);
            let cur_key = (cur.lcm.total_degree(), cur.lcm.exponents(), cur.i, cur.j);
            if key < cur_key {
                best = k;
            }
        }
        let pair = pairs.swap_remove(best);
        processed.insert((pair.i, pair.j));

        let lm_i = lead(&basis, pair.i);
        let lm_j = lead(&basis, pair.j);
        // Coprime criterion: disjoint leading terms reduce to zero.
        if lm_i.mul(&lm_j) == pair.lcm {
            continue;
        }
        // Chain criterion: some k with LT(k) | lcm(i,j) and both
        // (i,k), (j,k) already handled.
        let mut chained = false;
        for k in 0..basis.len() {
            if k == pair.i || k == pair.j {
                continue;
            }
            if lead(&basis, k).divides(&pair.lcm) {
                let a = (pair.i.min(k), pair.i.max(k));
                let b = (pair.j.min(k), pair.j.max(k));
                if processed.contains(&a) && processed.contains(&b) {
                    chained = true;
                    break;
                }
            }
        }
        if chained {
            continue;
        }

        let s = s_polynomial(&basis[pair.i], &basis[pair.j], order)?;
        let (remainder, _) = reduce(&s, &basis, order)?;
        if !remainder.is_zero() {
            let new_index = basis.len();
            let new_lm = remainder.leading_monomial(order).expect("nonzero");
            for k in 0..new_index {
                pairs.push(Pair {
                    i: k,
                    j: new_index,
                    lcm: lead(&basis, k).lcm(&new_lm),
                });
            }
            basis.push(remainder);
        }
    }

    Ok(auto_reduce(basis, order))
}

/// S-polynomial under a (global or local) order.
fn s_polynomial(
    f: &Polynomial,
    g: &Polynomial,
    order: MonomialOrder,
) -> Result<Polynomial, IdealError> {
    let (fm, fc) = f.leading_term(order)?;
    let (gm, gc) = g.leading_term(order)?;
    let lcm = fm.lcm(&gm);
    let mf = fm.checked_div(&lcm).expect("lcm divisible");
    let mg = gm.checked_div(&lcm).expect("lcm divisible");
    let left = f.mul_term(&mf, &fc.recip());
    let right = g.mul_term(&mg, &gc.recip());
    Ok(left.sub(&right)?)
}

/// Minimizes, tail-reduces and sorts a Gröbner basis; output monic.
fn auto_reduce(mut basis: Vec<Polynomial>, order: MonomialOrder) -> Vec<Polynomial> {
    let lms: Vec<Monomial> = basis
        .iter()
        .map(|g| g.leading_monomial(order).expect("nonzero"))
        .collect();
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            if lms[j].divides(&lms[i]) && (lms[j] != lms[i] || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let mut kept: Vec<Polynomial> = basis
        .drain(..)
        .zip(keep)
        .filter_map(|(g, k)| if k { Some(g) } else { None })
        .collect();
    for i in 0..kept.len() {
        let others: Vec<Polynomial> = kept
            .iter()
            .enumerate()
            .filter_map(|(j, g)| if j != i { Some(g.clone()) } else { None })
            .collect();
        let (r, _) = reduce(&kept[i], &others, order).expect("global order");
        kept[i] = r.monic(order).expect("reduced GB element nonzero");
    }
    kept.sort_by(|a, b| {
        let la = a.leading_monomial(order).expect("nonzero");
        let lb = b.leading_monomial(order).expect("nonzero");
        order.cmp(&la, &lb)
    });
    kept
}

/// Post-hoc Buchberger criterion: every S-polynomial of the basis
/// reduces to zero against it. The property suite re-certifies every
/// computed basis through the division algorithm alone.
pub fn buchberger_criterion_holds(basis: &[Polynomial], order: MonomialOrder) -> bool {
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            let s = match s_polynomial(&basis[i], &basis[j], order) {
                Ok(s) => s,
                Err(_) => return false,
            };
            match reduce(&s, basis, order) {
                Ok((r, _)) if r.is_zero() => {}
                _ => return false,
            }
        }
    }
    true
}

/// Normal form of `f` against `basis` (remainder of division).
pub fn normal_form(
    f: &Polynomial,
    basis: &[Polynomial],
    order: MonomialOrder,
) -> Result<Polynomial, IdealError> {
    Ok(reduce(f, basis, order)?.0)
}

/// True iff every variable has a pure power among the basis leading
/// terms. Pre: `basis` is a reduced Gröbner basis under `order`.
pub fn is_zero_dimensional(basis: &[Polynomial], order: MonomialOrder) -> bool {
    if basis.is_empty() {
        return false;
    }
    let nvars = basis[0].vars().len();
    let lms: Vec<Monomial> = basis
        .iter()
        .map(|g| g.leading_monomial(order).expect("nonzero"))
        .collect();
    (0..nvars).all(|v| lms.iter().any(|m| m.is_pure_power_of(v)))
}

/// Number of standard monomials (monomials divisible by no leading
/// term): the vector-space dimension of the quotient ring.
pub fn quotient_dimension(basis: &[Polynomial], order: MonomialOrder) -> Result<u64, IdealError> {
    if !is_zero_dimensional(basis, order) {
        return Err(IdealError::NotZeroDimensional);
    }
    let lms: Vec<Monomial> = basis
        .iter()
        .map(|g| g.leading_monomial(order).expect("nonzero"))
        .collect();
    staircase_count(&lms, basis[0].vars().len())
}

/// Counts monomials not divisible by any of `lms`; requires a pure
/// power of every variable among `lms` (finite staircase).
fn staircase_count(lms: &[Monomial], nvars: usize) -> Result<u64, IdealError> {
    let mut bounds: Vec<u32> = Vec::with_capacity(nvars);
    for v in 0..nvars {
        let mut best: Option<u32> = None;
        for m in lms {
            if m.is_pure_power_of(v) {
                let e = m.exponent(v);
                best = Some(best.map_or(e, |b| b.min(e)));
            }
        }
        match best {
            Some(e) => bounds.push(e),
            None => {
                return Err(IdealError::NotFiniteAtPoint {
                    detail: format!("no pure power of variable #{v} among leading terms"),
                })
            }
        }
    }
    let box_size: u64 = bounds.iter().map(|&b| b as u64).product();
    if box_size > MAX_STAIRCASE_BOX {
        return Err(IdealError::StaircaseTooLarge { bound: box_size });
    }
    if box_size == 0 {
        return Ok(0);
    }
    let mut count = 0u64;
    let mut exps = vec![0u32; nvars];
    'outer: loop {
        let mono = Monomial::new(exps.clone());
        if !lms.iter().any(|m| m.divides(&mono)) {
            count += 1;
        }
        for v in 0..nvars {
            exps[v] += 1;
            if exps[v] < bounds[v] {
                continue 'outer;
            }
            exps[v] = 0;
        }
        break;
    }
    Ok(count)
}

/// Ecart: total degree of the polynomial minus the total degree of its
/// leading monomial under the local order.
fn ecart(p: &Polynomial) -> u64 {
    let lm_deg = p
        .leading_monomial(MonomialOrder::Local)
        .expect("nonzero")
        .total_degree();
    p.total_degree().expect("nonzero") - lm_deg
}

/// Mora's tangent-cone normal form: weak normal form under the local
/// order. Reducers with larger ecart are permitted because intermediate
/// results join the reducer set, which is what makes the loop terminate
/// despite the order not being a well-order.
fn mora_normal_form(
    f: Polynomial,
    basis: &[Polynomial],
    steps: &mut u64,
    max_steps: u64,
) -> Result<Polynomial, IdealError> {
    let order = MonomialOrder::Local;
    let mut reducers: Vec<Polynomial> = basis.to_vec();
    let mut h = f;
    loop {
        if h.is_zero() {
            return Ok(h);
        }
        let (hm, hc) = h.leading_term(order).expect("nonzero");
        let mut chosen: Option<usize> = None;
        let mut chosen_ecart = u64::MAX;
        for (k, g) in reducers.iter().enumerate() {
            let gm = g.leading_monomial(order).expect("nonzero");
            if gm.divides(&hm) {
                let e = ecart(g);
                if e < chosen_ecart {
                    chosen_ecart = e;
                    chosen = Some(k);
                }
            }
        }
        let Some(k) = chosen else {
            return Ok(h);
        };
        if chosen_ecart > ecart(&h) {
            reducers.push(h.clone());
        }
        let g = &reducers[k];
        let (gm, gc) = g.leading_term(order).expect("nonzero");
        let q_mono = gm.checked_div(&hm).expect("divides");
        let q_coeff = &hc / &gc;
        h = h.sub(&g.mul_term(&q_mono, &q_coeff)).expect("same ambient");
        *steps += 1;
        if *steps > max_steps {
            return Err(IdealError::ReductionBudgetExceeded { steps: *steps });
        }
    }
}

/// Minimal standard basis of the ideal in the local ring at the origin
/// (negative grevlex order), via Buchberger's loop with Mora reduction.
pub fn standard_basis_local(
    gens: &[Polynomial],
    max_steps: u64,
) -> Result<Vec<Polynomial>, IdealError> {
    let order = MonomialOrder::Local;
    let mut basis: Vec<Polynomial> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let mut steps = 0u64;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            pairs.push((i, j));
        }
    }
    // No pair criteria here: their validity is subtler for local
    // orders and the inputs are desk-scale.
    while let Some(pos) = select_local_pair(&pairs, &basis) {
        let (i, j) = pairs.swap_remove(pos);
        let s = s_polynomial(&basis[i], &basis[j], order)?;
        let r = mora_normal_form(s, &basis, &mut steps, max_steps)?;
        if !r.is_zero() {
            let new_index = basis.len();
            for k in 0..new_index {
                pairs.push((k, new_index));
            }
            basis.push(r.monic(order).expect("nonzero"));
        }
    }
    let lms: Vec<Monomial> = basis
        .iter()
        .map(|g| g.leading_monomial(order).expect("nonzero"))
        .collect();
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            if lms[j].divides(&lms[i]) && (lms[j] != lms[i] || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let mut kept: Vec<Polynomial> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(g, k)| if k { Some(g) } else { None })
        .collect();
    kept.sort_by(|a, b| {
        let la = a.leading_monomial(order).expect("nonzero");
        let lb = b.leading_monomial(order).expect("nonzero");
        order.cmp(&la, &lb)
    });
    Ok(kept)
}

fn select_local_pair(pairs: &[(usize, usize)], basis: &[Polynomial]) -> Option<usize> {
    if pairs.is_empty() {
        return None;
    }
    let order = MonomialOrder::Local;
    let lcm_of = |&(i, j): &(usize, usize)| {
        let a = basis[i].leading_monomial(order).expect("nonzero");
        let b = basis[j].leading_monomial(order).expect("nonzero");
        a.lcm(&b)
    };
    let mut best = 0;
    let first = lcm_of(&pairs[0]);
    let mut best_key = (
        first.total_degree(),
        first.exponents().to_vec(),
        pairs[0].0,
        pairs[0].1,
    );
    for (k, p) in pairs.iter().enumerate().skip(1) {
        let l = lcm_of(p);
        let key = (l.total_degree(), l.exponents().to_vec(), p.0, p.1);
        if key < best_key {
            best = k;
            best_key = key;
        }
    }
    Some(best)
}

/// Milnor-number style local multiplicity: the dimension of the local
/// quotient algebra at `point` (exact rational coordinates).
///
/// Fast path: if the global reduced Gröbner basis of the translated
/// ideal is zero-dimensional and the origin is its only zero (each
/// variable lies in the radical), the global quotient dimension is the
/// answer. Otherwise a local standard basis is computed via Mora's
/// algorithm and its staircase counted.
pub fn local_multiplicity(
    gens: &[Polynomial],
    point: &[Rational],
    max_steps: u64,
) -> Result<u64, IdealError> {
    let translated: Vec<Polynomial> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.translate(point))
        .collect();
    if translated.is_empty() {
        return Err(IdealError::NotFiniteAtPoint {
            detail: "zero ideal has no finite local quotient".into(),
        });
    }
    let nvars = translated[0].vars().len();

    // Fast path through the global basis.
    let gb = groebner(&translated, MonomialOrder::GrevLex)?;
    if is_zero_dimensional(&gb, MonomialOrder::GrevLex) {
        let mu = quotient_dimension(&gb, MonomialOrder::GrevLex)?;
        if mu == 0 {
            // Unit ideal: the point is not a zero of the system.
            return Ok(0);
        }
        let mu_exp = u32::try_from(mu).map_err(|_| IdealError::StaircaseTooLarge { bound: mu })?;
        let vars = translated[0].vars().clone();
        let mut all_radical = true;
        for v in 0..nvars {
            let xv = Polynomial::variable(vars.clone(), v).pow(mu_exp);
            let nf = normal_form(&xv, &gb, MonomialOrder::GrevLex)?;
            if !nf.is_zero() {
                all_radical = false;
                break;
            }
        }
        if all_radical {
            return Ok(mu);
        }
    }

    // Mora path: local standard basis at the origin.
    let sb = standard_basis_local(&translated, max_steps)?;
    if sb.is_empty() {
        return Err(IdealError::NotFiniteAtPoint {
            detail: "zero ideal has no finite local quotient".into(),
        });
    }
    let lms: Vec<Monomial> = sb
        .iter()
        .map(|g| g.leading_monomial(MonomialOrder::Local).expect("nonzero"))
        .collect();
    staircase_count(&lms, nvars)
}

/// Equality of generated ideals: the reduced Gröbner bases coincide.
pub fn ideals_equal(
    gens_a: &[Polynomial],
    gens_b: &[Polynomial],
    order: MonomialOrder,
) -> Result<bool, IdealError> {
    let a = groebner(gens_a, order)?;
    let b = groebner(gens_b, order)?;
    Ok(a == b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::sample::SampleStream;
    use num_traits::{One, Zero};

    fn vars2() -> VarSet {
        VarSet::new(["x", "y"])
    }

    fn poly(text: &str, vars: &VarSet) -> Polynomial {
        parse(text, vars)
            .expect("parse")
            .to_polynomial(vars)
            .expect("polynomial")
    }

    fn polys(texts: &[&str], vars: &VarSet) -> Vec<Polynomial> {
        texts.iter().map(|t| poly(t, vars)).collect()
    }

    #[test]
    fn groebner_one_buchberger_step() {
        let v = vars2();
        let basis = groebner(&polys(&["x^2 + y", "y"], &v), MonomialOrder::GrevLex).unwrap();
        assert_eq!(basis, polys(&["y", "x^2"], &v));
    }

    #[test]
    fn groebner_already_reduced() {
        let v = vars2();
        let basis = groebner(&polys(&["x", "y"], &v), MonomialOrder::GrevLex).unwrap();
        assert_eq!(basis, polys(&["y", "x"], &v));
    }

    #[test]
    fn groebner_collapses_redundancy() {
        let v = VarSet::new(["x"]);
        let basis = groebner(&polys(&["x^2 - 1", "x - 1"], &v), MonomialOrder::GrevLex).unwrap();
        assert_eq!(basis, polys(&["x - 1"], &v));
    }

    #[test]
    fn groebner_empty_input() {
        let basis = groebner(&[], MonomialOrder::GrevLex).unwrap();
        assert!(basis.is_empty());
    }

    #[test]
    fn zero_dimensionality() {
        let v = vars2();
        let gb = groebner(&polys(&["x^2 + y", "y"], &v), MonomialOrder::GrevLex).unwrap();
        assert!(is_zero_dimensional(&gb, MonomialOrder::GrevLex));
        let gb = groebner(&polys(&["x*y"], &v), MonomialOrder::GrevLex).unwrap();
        assert!(!is_zero_dimensional(&gb, MonomialOrder::GrevLex));
        assert!(!is_zero_dimensional(&[], MonomialOrder::GrevLex));
    }

    #[test]
    fn quotient_dimension_staircases() {
        let v = vars2();
        let gb = groebner(&polys(&["x^2", "y^3"], &v), MonomialOrder::GrevLex).unwrap();
        assert_eq!(quotient_dimension(&gb, MonomialOrder::GrevLex).unwrap(), 6);
        let gb = groebner(&polys(&["x", "y"], &v), MonomialOrder::GrevLex).unwrap();
        assert_eq!(quotient_dimension(&gb, MonomialOrder::GrevLex).unwrap(), 1);
        let gb = groebner(&polys(&["x^2", "x*y", "y^2"], &v), MonomialOrder::GrevLex).unwrap();
        assert_eq!(quotient_dimension(&gb, MonomialOrder::GrevLex).unwrap(), 3);
        let gb = groebner(&polys(&["x*y"], &v), MonomialOrder::GrevLex).unwrap();
        assert!(matches!(
            quotient_dimension(&gb, MonomialOrder::GrevLex),
            Err(IdealError::NotZeroDimensional)
        ));
    }

    #[test]
    fn local_multiplicity_examples() {
        let v = vars2();
        let origin = [Rational::zero(), Rational::zero()];
        let mu = local_multiplicity(
            &polys(&["x^2", "y^3"], &v),
            &origin,
            DEFAULT_MAX_REDUCTION_STEPS,
        )
        .unwrap();
        assert_eq!(mu, 6);

        // 1 + x is a local unit: locally the ideal is (x, y).
        let mu = local_multiplicity(
            &polys(&["x + x^2", "y"], &v),
            &origin,
            DEFAULT_MAX_REDUCTION_STEPS,
        )
        .unwrap();
        assert_eq!(mu, 1);

        // Staircase (l-1)^4 at l = 3.
        let v4 = VarSet::new(["x", "y", "w", "t"]);
        let origin4 = vec![Rational::zero(); 4];
        let mu = local_multiplicity(
            &polys(&["x^2", "y^2", "w^2", "t^2"], &v4),
            &origin4,
            DEFAULT_MAX_REDUCTION_STEPS,
        )
        .unwrap();
        assert_eq!(mu, 16);
    }

    #[test]
    fn local_multiplicity_away_from_zero_set() {
        let v = vars2();
        let one = Rational::one();
        let mu = local_multiplicity(
            &polys(&["x", "y"], &v),
            &[one.clone(), one],
            DEFAULT_MAX_REDUCTION_STEPS,
        )
        .unwrap();
        assert_eq!(mu, 0);
    }

    #[test]
    fn local_multiplicity_at_shifted_point() {
        // (x-1)^2, y has multiplicity 2 at (1, 0).
        let v = vars2();
        let mu = local_multiplicity(
            &polys(&["(x - 1)^2", "y"], &v),
            &[Rational::one(), Rational::zero()],
            DEFAULT_MAX_REDUCTION_STEPS,
        )
        .unwrap();
        assert_eq!(mu, 2);
    }

    #[test]
    fn local_multiplicity_rejects_curves() {
        let v = vars2();
        let origin = [Rational::zero(), Rational::zero()];
        let err = local_multiplicity(&polys(&["x*y"], &v), &origin, DEFAULT_MAX_REDUCTION_STEPS);
        assert!(matches!(err, Err(IdealError::NotFiniteAtPoint { .. })));
    }

    #[test]
    fn ideal_equality() {
        let v = vars2();
        assert!(ideals_equal(
            &polys(&["x", "y"], &v),
            &polys(&["y", "x"], &v),
            MonomialOrder::GrevLex
        )
        .unwrap());
        let vx = VarSet::new(["x"]);
        assert!(!ideals_equal(
            &polys(&["x^2"], &vx),
            &polys(&["x"], &vx),
            MonomialOrder::GrevLex
        )
        .unwrap());
        assert!(ideals_equal(
            &polys(&["x^2", "y^3"], &v),
            &polys(&["-y^3", "x^2"], &v),
            MonomialOrder::GrevLex
        )
        .unwrap());
    }

    #[test]
    fn buchberger_post_hoc_check() {
        let v = vars2();
        for gens in [
            polys(&["x^2 + y", "y"], &v),
            polys(&["x^3 - 2*x*y", "x^2*y - 2*y^2 + x"], &v),
            polys(&["x^2 + y^2 - 1", "x*y"], &v),
        ] {
            let gb = groebner(&gens, MonomialOrder::GrevLex).unwrap();
            assert!(buchberger_criterion_holds(&gb, MonomialOrder::GrevLex));
            for g in &gens {
                assert!(normal_form(g, &gb, MonomialOrder::GrevLex)
                    .unwrap()
                    .is_zero());
            }
        }
    }

    /// Random zero-dimensional pairs with all zeros at the origin:
    /// (x^a + t*y^c, y^b).
    fn random_zero_dim_pair(stream: &mut SampleStream, vars: &VarSet) -> Vec<Polynomial> {
        let a = 1 + (stream.next_u64() % 4) as i64;
        let b = 1 + (stream.next_u64() % 4) as i64;
        let c = 1 + (stream.next_u64() % 4) as i64;
        let t = (stream.next_u64() % 5) as i64 - 2;
        let f1 = format!("x^{a} + {t}*y^{c}");
        let f2 = format!("y^{b}");
        polys(&[f1.as_str(), f2.as_str()], vars)
    }

    #[test]
    fn quotient_dimension_is_order_independent() {
        let v = vars2();
        let mut stream = SampleStream::new(0x5eed);
        for _ in 0..20 {
            let gens = random_zero_dim_pair(&mut stream, &v);
            let gb_grevlex = groebner(&gens, MonomialOrder::GrevLex).unwrap();
            let gb_lex = groebner(&gens, MonomialOrder::Lex).unwrap();
            let d1 = quotient_dimension(&gb_grevlex, MonomialOrder::GrevLex).unwrap();
            let d2 = quotient_dimension(&gb_lex, MonomialOrder::Lex).unwrap();
            assert_eq!(d1, d2);
        }
    }

    #[test]
    fn local_bounded_by_global() {
        let v = vars2();
        let origin = [Rational::zero(), Rational::zero()];
        let mut stream = SampleStream::new(0xcafe);
        for _ in 0..15 {
            let gens = random_zero_dim_pair(&mut stream, &v);
            let gb = groebner(&gens, MonomialOrder::GrevLex).unwrap();
            let global = quotient_dimension(&gb, MonomialOrder::GrevLex).unwrap();
            let local = local_multiplicity(&gens, &origin, DEFAULT_MAX_REDUCTION_STEPS).unwrap();
            assert!(local <= global, "local {local} > global {global}");
        }
    }

    #[test]
    fn monomial_ideal_multiplicity_is_product() {
        let v = VarSet::new(["x", "y", "z"]);
        let origin = vec![Rational::zero(); 3];
        let mut stream = SampleStream::new(0xbeef);
        for _ in 0..10 {
            let a = 1 + (stream.next_u64() % 4);
            let b = 1 + (stream.next_u64() % 4);
            let c = 1 + (stream.next_u64() % 4);
            let gens = polys(
                &[
                    format!("x^{a}").as_str(),
                    format!("y^{b}").as_str(),
                    format!("z^{c}").as_str(),
                ],
                &v,
            );
            let mu = local_multiplicity(&gens, &origin, DEFAULT_MAX_REDUCTION_STEPS).unwrap();
            assert_eq!(mu, a as u64 * b as u64 * c as u64);
        }
    }
}
