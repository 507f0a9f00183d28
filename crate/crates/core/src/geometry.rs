//! Cones of input data, tour adjacency, and exact implication certificates.

use std::fmt;

use num::{BigInt, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cost::CostValue;
use crate::error::{Error, Result};
use crate::form::AffineForm;
use crate::lp::{common_denominator, rat, Cmp, LinearProgram, LpOutcome, Rational, Sense};
use crate::matrix::CostMatrix;
use crate::oracle::{enumerate_tours, tour_length};
use crate::septree::{normal_form, ComparisonEvent, Relation};
use crate::tour::Tour;

/// Largest `n` for which the exact LP routines run.
pub const MAX_LP_N: usize = 6;

fn check_lp_size(what: &'static str, n: usize) -> Result<()> {
    if (3..=MAX_LP_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedSize {
            what,
            n,
            min: 3,
            max: MAX_LP_N,
        })
    }
}

/// Off-diagonal positions of an `n × n` matrix in row-major order.
fn positions(n: usize) -> Vec<(usize, usize)> {
    (1..=n)
        .flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect()
}

fn position_index(n: usize, (i, j): (usize, usize)) -> usize {
    (i - 1) * (n - 1) + if j < i { j - 1 } else { j - 2 }
}

/// `C ∈ K(y)`: no tour is strictly shorter than `y` under `c`.
pub fn cone_member(c: &CostMatrix, y: &Tour) -> Result<bool> {
    let ly = tour_length(y, c)?;
    for t in enumerate_tours(c.n())? {
        if tour_length(&t, c)? < ly {
            return Ok(false);
        }
    }
    Ok(true)
}

fn is_unit(f: &AffineForm) -> bool {
    f.constant_term() == 0 && f.terms().all(|(_, c)| c == 1)
}

/// Checks the requirements on `(B⁺, B⁻, y)` for [`lemma1_witness`].
pub fn lemma1_preconditions(plus: &AffineForm, minus: &AffineForm, y: &Tour) -> Result<()> {
    let n = y.n();
    let fail = |msg: String| Err(Error::Precondition(msg));
    if !is_unit(plus) || !is_unit(minus) {
        return fail("B+ and B- must be 0/1 vectors".into());
    }
    if plus.max_index() > n || minus.max_index() > n {
        return fail(format!("support exceeds n = {n}"));
    }
    if plus.terms().any(|(p, _)| minus.coeff(p.0, p.1) != 0) {
        return fail("B+ and B- overlap".into());
    }
    if plus.support_len() != minus.support_len() || plus.support_len() == 0 {
        return fail(format!(
            "|B+| = {} and |B-| = {} must be equal and positive",
            plus.support_len(),
            minus.support_len()
        ));
    }
    let on_y = plus
        .terms()
        .filter(|((i, j), _)| y.contains(*i, *j))
        .count();
    if on_y > 2 {
        return fail(format!("⟨B+, y⟩ = {on_y} exceeds 2"));
    }
    Ok(())
}

/// Matrix under which `⟨B⁺,C⟩ − ⟨B⁻,C⟩ ≥ 1` and `y` is the unique optimum:
/// every arc costs 4, arcs of `B⁻` cost 3, and arcs of `y` outside `B⁺` cost 0.
pub fn lemma1_witness(plus: &AffineForm, minus: &AffineForm, y: &Tour) -> Result<CostMatrix> {
    lemma1_preconditions(plus, minus, y)?;
    let n = y.n();
    let mut c = CostMatrix::filled(n, CostValue::Infinite);
    for (i, j) in positions(n) {
        c.set(i, j, CostValue::Finite(4 - minus.coeff(i, j)));
    }
    for (i, j) in y.arcs() {
        if plus.coeff(i, j) == 0 {
            c.set(i, j, CostValue::ZERO);
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMethod {
    /// The fixed construction from the normal form.
    Lemma1,
    /// A positive constant makes the all-zero matrix work.
    ZeroMatrix,
    /// Exact LP, scaled to integers.
    LinearProgram,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Compatibility {
    /// `matrix` satisfies the strict condition and lies in `K(y)`; both facts
    /// were re-checked by evaluation and enumeration.
    Witness {
        matrix: CostMatrix,
        method: WitnessMethod,
    },
    /// No matrix in `K(y)` satisfies the strict condition.
    Incompatible(ConeCertificate),
}

impl Compatibility {
    pub fn is_witness(&self) -> bool {
        matches!(self, Compatibility::Witness { .. })
    }
}

/// Decides whether `⟨B, C⟩ sgn d > 0` and `C ∈ K(y)` can hold together.
pub fn compatibility_check(e: &ComparisonEvent, y: &Tour) -> Result<Compatibility> {
    let nf = normal_form(e)?;
    let strict = nf.strict_form();
    let n = y.n();
    if strict.max_index() > n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: strict.max_index(),
        });
    }

    let candidate = if nf.constant <= 0 && lemma1_preconditions(&nf.plus, &nf.minus, y).is_ok() {
        Ok((
            lemma1_witness(&nf.plus, &nf.minus, y)?,
            WitnessMethod::Lemma1,
        ))
    } else if strict.constant_term() > 0 {
        let mut zero = CostMatrix::filled(n, CostValue::Infinite);
        for (i, j) in positions(n) {
            zero.set(i, j, CostValue::ZERO);
        }
        Ok((zero, WitnessMethod::ZeroMatrix))
    } else {
        check_lp_size("compatibility LP", n)?;
        cone_lp(&strict, y)?.map(|m| (m, WitnessMethod::LinearProgram))
    };

    match candidate {
        Err(cert) => {
            if !cert.verify(&strict, y) {
                return Err(Error::Precondition(
                    "cone certificate failed re-verification".into(),
                ));
            }
            Ok(Compatibility::Incompatible(cert))
        }
        Ok((matrix, method)) => {
            if strict.eval(&matrix)? <= 0 || !cone_member(&matrix, y)? {
                return Err(Error::Precondition(format!(
                    "constructed {method:?} witness failed re-verification"
                )));
            }
            Ok(Compatibility::Witness { matrix, method })
        }
    }
}

/// Hypotheses `⟨t − y, C⟩ ≥ 0` for every tour `t ≠ y`, in enumeration order.
fn cone_system(y: &Tour) -> Result<(LinearSystem, Vec<Tour>)> {
    let ly = AffineForm::tour_length(y);
    let others: Vec<Tour> = enumerate_tours(y.n())?
        .into_iter()
        .filter(|t| t != y)
        .collect();
    let hypotheses = others
        .iter()
        .map(|t| Hypothesis {
            form: &AffineForm::tour_length(t) - &ly,
            relation: Relation::Ge,
        })
        .collect();
    Ok((LinearSystem::new(y.n(), hypotheses), others))
}

/// Either an integer `C ∈ K(y)` with `strict(C) > 0`, or a certificate that
/// the linear part is `≤ 0` on all of `K(y)`. The constant must be `≤ 0`.
fn cone_lp(strict: &AffineForm, y: &Tour) -> Result<Result<CostMatrix, ConeCertificate>> {
    let (sys, others) = cone_system(y)?;
    let linear = strict - &AffineForm::constant(strict.constant_term());
    let concl = Hypothesis {
        form: -&linear,
        relation: Relation::Ge,
    };
    match implies(&sys, &concl)? {
        Implication::Refuted(c) => {
            // linear(c) ≥ 1, so scaling by 1 − constant clears the constant
            let s = 1 - strict.constant_term();
            let mut m = c.clone();
            for (i, j) in positions(y.n()) {
                let v = c
                    .cost(i, j)
                    .finite()
                    .and_then(|v| v.checked_mul(s))
                    .ok_or(Error::Overflow)?;
                m.set(i, j, CostValue::Finite(v));
            }
            Ok(Ok(m))
        }
        Implication::Certified(cert) => Ok(Err(ConeCertificate {
            dominators: others
                .into_iter()
                .zip(cert.weights)
                .filter(|(_, w)| !w.is_zero())
                .collect(),
        })),
        Implication::Vacuous => unreachable!("K(y) contains the zero matrix"),
    }
}

/// Nonnegative weights on tours `t` with `Σ w_t (chi(t) − chi(y)) = −L`,
/// where `L` is the linear part of the strict form. On `K(y)` every
/// `⟨t − y, C⟩` is nonnegative, hence `L ≤ 0` there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeCertificate {
    pub dominators: Vec<(Tour, Rational)>,
}

impl ConeCertificate {
    /// Checks the certificate against `strict(C) > 0` without any LP.
    pub fn verify(&self, strict: &AffineForm, y: &Tour) -> bool {
        if strict.constant_term() > 0
            || self
                .dominators
                .iter()
                .any(|(t, w)| w.is_negative() || t.n() != y.n())
        {
            return false;
        }
        let n = y.n();
        let mut sum = vec![Rational::zero(); n * n];
        for (t, w) in &self.dominators {
            for (k, (a, b)) in t.chi().iter().zip(y.chi()).enumerate() {
                sum[k] += w * rat(i64::from(*a) - i64::from(b));
            }
        }
        positions(n)
            .into_iter()
            .all(|(i, j)| sum[(i - 1) * n + (j - 1)] == rat(-strict.coeff(i, j)))
            && strict.max_index() <= n
    }
}

/// One hypothesis `form relation 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub form: AffineForm,
    pub relation: Relation,
}

impl Hypothesis {
    /// `lhs ≤ rhs`, i.e. `rhs − lhs ≥ 0`.
    pub fn le(lhs: &AffineForm, rhs: &AffineForm) -> Self {
        Hypothesis {
            form: rhs - lhs,
            relation: Relation::Ge,
        }
    }

    /// `lhs > rhs`.
    pub fn gt(lhs: &AffineForm, rhs: &AffineForm) -> Self {
        Hypothesis {
            form: lhs - rhs,
            relation: Relation::Gt,
        }
    }

    pub fn holds_at(&self, c: &CostMatrix) -> Result<bool> {
        Ok(self.relation.holds(self.form.eval(c)?))
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} 0", self.form, self.relation.symbol())
    }
}

/// Homogeneous hypotheses over the arcs of an `n`-vertex digraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub n: usize,
    pub hypotheses: Vec<Hypothesis>,
}

impl LinearSystem {
    pub fn new(n: usize, hypotheses: Vec<Hypothesis>) -> Self {
        LinearSystem { n, hypotheses }
    }

    pub fn with(&self, h: Hypothesis) -> Self {
        let mut next = self.clone();
        next.hypotheses.push(h);
        next
    }

    pub fn holds_at(&self, c: &CostMatrix) -> Result<bool> {
        for h in &self.hypotheses {
            if !h.holds_at(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Nonnegative weights, one per hypothesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub weights: Vec<Rational>,
}

impl FarkasCertificate {
    /// Re-checks the certificate without any LP: nonnegative weights, the
    /// weighted sum equals the conclusion term by term (constants included),
    /// and a strict conclusion draws positive weight from a strict hypothesis.
    pub fn verify(&self, sys: &LinearSystem, conclusion: &Hypothesis) -> bool {
        if self.weights.len() != sys.hypotheses.len()
            || self.weights.iter().any(|w| w.is_negative())
        {
            return false;
        }
        let mut combo: std::collections::BTreeMap<(usize, usize), Rational> = Default::default();
        let mut constant = Rational::zero();
        for (w, h) in self.weights.iter().zip(&sys.hypotheses) {
            for (p, c) in h.form.terms() {
                *combo.entry(p).or_insert_with(Rational::zero) += w * rat(c);
            }
            constant += w * rat(h.form.constant_term());
        }
        combo.retain(|_, v| !v.is_zero());
        let target: std::collections::BTreeMap<_, _> =
            conclusion.form.terms().map(|(p, c)| (p, rat(c))).collect();
        if combo != target || constant != rat(conclusion.form.constant_term()) {
            return false;
        }
        match conclusion.relation {
            Relation::Ge => true,
            Relation::Gt => self
                .weights
                .iter()
                .zip(&sys.hypotheses)
                .any(|(w, h)| h.relation == Relation::Gt && w.is_positive()),
        }
    }

    /// Weights as `"p/q"` (or `"p"`) strings.
    pub fn weight_strings(&self) -> Vec<String> {
        self.weights.iter().map(|w| w.to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Implication {
    Certified(FarkasCertificate),
    /// An integer matrix meeting every hypothesis but not the conclusion.
    Refuted(CostMatrix),
    /// The hypotheses have no common solution; anything follows.
    Vacuous,
}

/// Decides whether the hypotheses imply the conclusion for every input.
pub fn implies(sys: &LinearSystem, conclusion: &Hypothesis) -> Result<Implication> {
    let n = sys.n;
    if n < 2 {
        return Err(Error::Precondition(format!(
            "implication over n = {n} vertices"
        )));
    }
    let forms = sys
        .hypotheses
        .iter()
        .map(|h| &h.form)
        .chain([&conclusion.form]);
    for f in forms {
        if f.constant_term() != 0 {
            return Err(Error::Precondition(format!("form {f} is not homogeneous")));
        }
        if f.max_index() > n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.max_index(),
            });
        }
    }
    if conclusion.relation == Relation::Ge && conclusion.form.is_constant() {
        return Ok(Implication::Certified(FarkasCertificate {
            weights: vec![Rational::zero(); sys.hypotheses.len()],
        }));
    }
    if let Some(c) = countermodel(sys, conclusion, true)? {
        return Ok(Implication::Refuted(c));
    }
    if conclusion.relation == Relation::Gt {
        if let Some(c) = countermodel(sys, conclusion, false)? {
            return Ok(Implication::Refuted(c));
        }
    }

    // max t  s.t.  Σ λ_k f_k = t·g,  Σ_{strict} λ_k = 1 (or Σ λ = 1),  t ≤ 1.
    let m = sys.hypotheses.len();
    let t_var = m;
    let mut lp = LinearProgram::new(m + 1);
    for p in positions(n) {
        let mut row: Vec<(usize, Rational)> = sys
            .hypotheses
            .iter()
            .enumerate()
            .filter_map(|(k, h)| {
                let c = h.form.coeff(p.0, p.1);
                (c != 0).then(|| (k, rat(c)))
            })
            .collect();
        let g = conclusion.form.coeff(p.0, p.1);
        if g != 0 {
            row.push((t_var, rat(-g)));
        }
        if !row.is_empty() {
            lp.add_constraint(row, Cmp::Eq, rat(0));
        }
    }
    let normalizing: Vec<(usize, Rational)> = sys
        .hypotheses
        .iter()
        .enumerate()
        .filter(|(_, h)| conclusion.relation == Relation::Ge || h.relation == Relation::Gt)
        .map(|(k, _)| (k, rat(1)))
        .collect();
    if normalizing.is_empty() {
        return Ok(Implication::Vacuous);
    }
    lp.add_constraint(normalizing, Cmp::Eq, rat(1));
    lp.add_constraint(vec![(t_var, rat(1))], Cmp::Le, rat(1));
    lp.set_objective(Sense::Maximize, vec![(t_var, rat(1))]);
    match lp.solve() {
        LpOutcome::Optimal { x, value } if value.is_positive() => {
            let weights = x[..m].iter().map(|w| w / &value).collect();
            let cert = FarkasCertificate { weights };
            if !cert.verify(sys, conclusion) {
                return Err(Error::Precondition(
                    "Farkas certificate failed re-verification".into(),
                ));
            }
            Ok(Implication::Certified(cert))
        }
        _ => Ok(Implication::Vacuous),
    }
}

/// Integer matrix satisfying the hypotheses (strict ones with margin 1) and
/// `g ≤ −1` when `strictly`, else `g ≤ 0`. A `≥` conclusion is only ever
/// refuted strictly.
fn countermodel(
    sys: &LinearSystem,
    conclusion: &Hypothesis,
    strictly: bool,
) -> Result<Option<CostMatrix>> {
    let n = sys.n;
    let pos = positions(n);
    let row = |f: &AffineForm| -> Vec<(usize, Rational)> {
        f.terms()
            .map(|(p, c)| (position_index(n, p), rat(c)))
            .collect()
    };
    let mut lp = LinearProgram::with_free_vars(pos.len());
    for h in &sys.hypotheses {
        let rhs = if h.relation == Relation::Gt { 1 } else { 0 };
        lp.add_constraint(row(&h.form), Cmp::Ge, rat(rhs));
    }
    let bound = if strictly { -1 } else { 0 };
    lp.add_constraint(row(&conclusion.form), Cmp::Le, rat(bound));
    let x = match lp.solve() {
        LpOutcome::Optimal { x, .. } => x,
        _ => return Ok(None),
    };
    let scale = Rational::from_integer(common_denominator(&x));
    let mut c = CostMatrix::filled(n, CostValue::Infinite);
    for (k, &(i, j)) in pos.iter().enumerate() {
        let v = (&x[k] * &scale).to_integer();
        c.set(i, j, CostValue::Finite(v.to_i64().ok_or(Error::Overflow)?));
    }
    if !sys.holds_at(&c)? || conclusion.holds_at(&c)? {
        return Err(Error::Precondition(
            "countermodel failed re-verification".into(),
        ));
    }
    Ok(Some(c))
}

/// Exact midpoint test: `x` and `y` are adjacent iff every convex
/// representation of `(chi(x) + chi(y)) / 2` over all tours puts total
/// weight 1 on `{x, y}`.
pub fn adjacent(x: &Tour, y: &Tour) -> Result<bool> {
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch {
            expected: x.n(),
            found: y.n(),
        });
    }
    if x == y {
        return Err(Error::Precondition(
            "adjacency of a tour with itself".into(),
        ));
    }
    let n = x.n();
    check_lp_size("adjacency", n)?;
    let tours = enumerate_tours(n)?;
    let mut lp = LinearProgram::new(tours.len());
    lp.add_constraint(
        (0..tours.len()).map(|k| (k, rat(1))).collect(),
        Cmp::Eq,
        rat(1),
    );
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    for (i, j) in positions(n) {
        let target = match (x.contains(i, j), y.contains(i, j)) {
            (true, true) => rat(1),
            (false, false) => rat(0),
            _ => half.clone(),
        };
        let row = tours
            .iter()
            .enumerate()
            .filter(|(_, t)| t.contains(i, j))
            .map(|(k, _)| (k, rat(1)))
            .collect();
        lp.add_constraint(row, Cmp::Eq, target);
    }
    let kx = tours.iter().position(|t| t == x).expect("x is a tour");
    let ky = tours.iter().position(|t| t == y).expect("y is a tour");
    lp.set_objective(Sense::Minimize, vec![(kx, rat(1)), (ky, rat(1))]);
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Ok(value >= rat(1)),
        other => unreachable!("midpoint LP is feasible and bounded: {other:?}"),
    }
}

/// Pairwise adjacency; a single tour is trivially a clique.
pub fn is_clique(tours: &[Tour]) -> Result<bool> {
    for (a, t) in tours.iter().enumerate() {
        for s in &tours[a + 1..] {
            if t == s {
                return Err(Error::Precondition(format!("tour {t} listed twice")));
            }
        }
    }
    for (a, t) in tours.iter().enumerate() {
        for s in &tours[a + 1..] {
            if !adjacent(t, s)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
