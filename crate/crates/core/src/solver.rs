//! Little–Murty–Sweeney–Karel branch and bound, instrumented.
//!
//! The control flow is written once over the [`Cell`] trait. Running it on
//! [`CostValue`] gives the plain solver; running it on [`SymbolicCell`] also
//! carries, for every cell, the affine form in the input variables that the
//! cell currently holds, so each comparison can be written down as a linear
//! test on the input. Branch decisions always come from concrete values.

use std::fmt;

use crate::cost::CostValue;
use crate::error::{Error, Result};
use crate::form::AffineForm;
use crate::matrix::{CostMatrix, Grid};
use crate::septree::{
    Branch, ComparisonEvent, InstanceExit, InstanceRecord, MatrixSnapshot, Provenance, Relation,
    TraceChain,
};
use crate::tour::Tour;

pub type Arc = (usize, usize);

/// A comparison as evaluated, before the solver attaches its context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub relation: Relation,
    pub outcome: bool,
    pub trivial: bool,
    /// `left − right` when the cell type tracks forms and neither side is infinite.
    pub form: Option<AffineForm>,
}

pub trait Cell: Clone + fmt::Debug {
    fn infinite() -> Self;
    fn constant(v: i64) -> Self;
    fn is_infinite(&self) -> bool;
    /// The concrete value this cell holds for the session input.
    fn value(&self) -> CostValue;
    fn plus(&self, rhs: &Self) -> Result<Self>;
    fn minus(&self, rhs: &Self) -> Result<Self>;
    fn compare(&self, rhs: &Self, relation: Relation) -> Comparison;
    /// The `M[i,j] = 0` test, plus the comparison to record when the answer
    /// depends on the input beyond what the cell's form shows.
    fn zero_test(&self) -> (bool, Option<Comparison>);
}

fn concrete_outcome(lhs: CostValue, rhs: CostValue, relation: Relation) -> bool {
    match relation {
        Relation::Gt => lhs > rhs,
        Relation::Ge => lhs >= rhs,
    }
}

impl Cell for CostValue {
    fn infinite() -> Self {
        CostValue::Infinite
    }

    fn constant(v: i64) -> Self {
        CostValue::Finite(v)
    }

    fn is_infinite(&self) -> bool {
        CostValue::is_infinite(*self)
    }

    fn value(&self) -> CostValue {
        *self
    }

    fn plus(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(*rhs)
    }

    fn minus(&self, rhs: &Self) -> Result<Self> {
        self.checked_sub(*rhs)
    }

    fn compare(&self, rhs: &Self, relation: Relation) -> Comparison {
        Comparison {
            relation,
            outcome: concrete_outcome(*self, *rhs, relation),
            trivial: self.is_infinite() || rhs.is_infinite(),
            form: None,
        }
    }

    fn zero_test(&self) -> (bool, Option<Comparison>) {
        (*self == CostValue::ZERO, None)
    }
}

/// A cell holding an affine form in the input variables and its value at
/// the session input, or infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolicCell {
    Infinite,
    Finite { form: AffineForm, value: i64 },
}

impl SymbolicCell {
    pub fn form(&self) -> Option<&AffineForm> {
        match self {
            SymbolicCell::Infinite => None,
            SymbolicCell::Finite { form, .. } => Some(form),
        }
    }

    /// Lifts the input: finite `c_ij` becomes the variable `c_ij`.
    pub fn lift(c: &CostMatrix) -> Grid<SymbolicCell> {
        c.map(|i, j, v| match *v {
            CostValue::Finite(value) if i != j => SymbolicCell::Finite {
                form: AffineForm::var(i, j),
                value,
            },
            _ => SymbolicCell::Infinite,
        })
    }
}

impl Cell for SymbolicCell {
    fn infinite() -> Self {
        SymbolicCell::Infinite
    }

    fn constant(v: i64) -> Self {
        SymbolicCell::Finite {
            form: AffineForm::constant(v),
            value: v,
        }
    }

    fn is_infinite(&self) -> bool {
        matches!(self, SymbolicCell::Infinite)
    }

    fn value(&self) -> CostValue {
        match self {
            SymbolicCell::Infinite => CostValue::Infinite,
            SymbolicCell::Finite { value, .. } => CostValue::Finite(*value),
        }
    }

    fn plus(&self, rhs: &Self) -> Result<Self> {
        match (self, rhs) {
            (
                SymbolicCell::Finite { form: a, value: x },
                SymbolicCell::Finite { form: b, value: y },
            ) => Ok(SymbolicCell::Finite {
                form: a + b,
                value: x.checked_add(*y).ok_or(Error::Overflow)?,
            }),
            _ => Ok(SymbolicCell::Infinite),
        }
    }

    fn minus(&self, rhs: &Self) -> Result<Self> {
        match (self, rhs) {
            (
                SymbolicCell::Finite { form: a, value: x },
                SymbolicCell::Finite { form: b, value: y },
            ) => Ok(SymbolicCell::Finite {
                form: a - b,
                value: x.checked_sub(*y).ok_or(Error::Overflow)?,
            }),
            (SymbolicCell::Infinite, _) => Ok(SymbolicCell::Infinite),
            (SymbolicCell::Finite { .. }, SymbolicCell::Infinite) => {
                Err(Error::Undefined("finite value minus infinity"))
            }
        }
    }

    fn compare(&self, rhs: &Self, relation: Relation) -> Comparison {
        let outcome = concrete_outcome(self.value(), rhs.value(), relation);
        match (self.form(), rhs.form()) {
            (Some(a), Some(b)) => {
                let form = a - b;
                Comparison {
                    relation,
                    outcome,
                    trivial: form.is_constant(),
                    form: Some(form),
                }
            }
            _ => Comparison {
                relation,
                outcome,
                trivial: true,
                form: None,
            },
        }
    }

    fn zero_test(&self) -> (bool, Option<Comparison>) {
        match self {
            SymbolicCell::Finite { form, value: 0 } if !form.is_constant() => (
                true,
                Some(Comparison {
                    relation: Relation::Ge,
                    outcome: true,
                    trivial: false,
                    form: Some(-form),
                }),
            ),
            SymbolicCell::Finite { value, .. } => (*value == 0, None),
            SymbolicCell::Infinite => (false, None),
        }
    }
}

/// Receives every comparison the algorithm performs.
pub trait Recorder {
    fn record(&mut self, comparison: Comparison, provenance: Provenance);
}

/// Discards everything.
impl Recorder for () {
    fn record(&mut self, _: Comparison, _: Provenance) {}
}

/// Collects comparisons with their provenance.
impl Recorder for Vec<(Comparison, Provenance)> {
    fn record(&mut self, comparison: Comparison, provenance: Provenance) {
        self.push((comparison, provenance));
    }
}

fn test<C: Cell, R: Recorder>(
    rec: &mut R,
    lhs: &C,
    rhs: &C,
    relation: Relation,
    prov: Provenance,
) -> bool {
    let c = lhs.compare(rhs, relation);
    let outcome = c.outcome;
    rec.record(c, prov);
    outcome
}

/// Row then column reduction. Each line is scanned in ascending index order
/// keeping the first strict minimum; the minimum is added to `sum` and
/// subtracted from the line.
pub fn reduce<C: Cell, R: Recorder>(m: &mut Grid<C>, sum: &mut C, rec: &mut R) -> Result<()> {
    let rows = m.rows().to_vec();
    let cols = m.cols().to_vec();
    for &i in &rows {
        let mut min = C::infinite();
        for &j in &cols {
            if test(rec, &min, m.get(i, j), Relation::Gt, Provenance::RowMin) {
                min = m.get(i, j).clone();
            }
        }
        *sum = sum.plus(&min)?;
        for &j in &cols {
            let v = m.get(i, j).minus(&min)?;
            m.set(i, j, v);
        }
    }
    for &j in &cols {
        let mut min = C::infinite();
        for &i in &rows {
            if test(rec, &min, m.get(i, j), Relation::Gt, Provenance::ColMin) {
                min = m.get(i, j).clone();
            }
        }
        *sum = sum.plus(&min)?;
        for &i in &rows {
            let v = m.get(i, j).minus(&min)?;
            m.set(i, j, v);
        }
    }
    Ok(())
}

/// The branching arc and its regret `m + k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcChoice<C> {
    pub arc: Arc,
    pub regret: C,
}

/// Picks the zero cell whose exclusion raises the bound most: first strict
/// maximizer of `m + k` over zero cells in row-major order, record starting
/// at `−1`.
pub fn choose_arc<C: Cell, R: Recorder>(m: &Grid<C>, rec: &mut R) -> Result<ArcChoice<C>> {
    let mut record = C::constant(-1);
    let mut best = None;
    for &i in m.rows() {
        for &j in m.cols() {
            let (is_zero, evidence) = m.get(i, j).zero_test();
            if let Some(c) = evidence {
                rec.record(c, Provenance::ZeroTest);
            }
            if !is_zero {
                continue;
            }
            let mut row_min = C::infinite();
            for &t in m.cols().iter().filter(|&&t| t != j) {
                if test(
                    rec,
                    &row_min,
                    m.get(i, t),
                    Relation::Gt,
                    Provenance::RegretRow,
                ) {
                    row_min = m.get(i, t).clone();
                }
            }
            let mut col_min = C::infinite();
            for &t in m.rows().iter().filter(|&&t| t != i) {
                if test(
                    rec,
                    &col_min,
                    m.get(t, j),
                    Relation::Gt,
                    Provenance::RegretCol,
                ) {
                    col_min = m.get(t, j).clone();
                }
            }
            let regret = row_min.plus(&col_min)?;
            if test(
                rec,
                &regret,
                &record,
                Relation::Gt,
                Provenance::RegretRecord,
            ) {
                record = regret;
                best = Some((i, j));
            }
        }
    }
    best.map(|arc| ArcChoice {
        arc,
        regret: record,
    })
    .ok_or_else(|| Error::Precondition("no zero cell to branch on".into()))
}

/// Required arcs, kept as vertex-disjoint simple paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcConstraints {
    n: usize,
    arcs: Vec<Arc>,
    succ: Vec<usize>,
    pred: Vec<usize>,
}

impl ArcConstraints {
    pub fn new(n: usize) -> Self {
        ArcConstraints {
            n,
            arcs: Vec::new(),
            succ: vec![0; n + 1],
            pred: vec![0; n + 1],
        }
    }

    pub fn from_arcs(n: usize, arcs: &[Arc]) -> Result<Self> {
        let mut c = Self::new(n);
        for &a in arcs {
            c = c.with(a)?;
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Arcs in insertion order.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Adds an arc, rejecting degree violations and any cycle.
    pub fn with(&self, (i, j): Arc) -> Result<Self> {
        let n = self.n;
        if !(1..=n).contains(&i) || !(1..=n).contains(&j) || i == j {
            return Err(Error::InvalidArcs(format!(
                "({i},{j}) is not an arc on 1..={n}"
            )));
        }
        if self.succ[i] != 0 || self.pred[j] != 0 {
            return Err(Error::InvalidArcs(format!("({i},{j}) breaks a path")));
        }
        if self.path_end(j) == i {
            return Err(Error::InvalidArcs(format!("({i},{j}) closes a subcycle")));
        }
        let mut next = self.clone();
        next.arcs.push((i, j));
        next.succ[i] = j;
        next.pred[j] = i;
        Ok(next)
    }

    fn path_end(&self, mut v: usize) -> usize {
        while self.succ[v] != 0 {
            v = self.succ[v];
        }
        v
    }

    fn path_start(&self, mut v: usize) -> usize {
        while self.pred[v] != 0 {
            v = self.pred[v];
        }
        v
    }

    /// Maximal paths as `(start, end)` pairs, isolated vertices included,
    /// ordered by start vertex.
    pub fn paths(&self) -> Vec<(usize, usize)> {
        (1..=self.n)
            .filter(|&v| self.pred[v] == 0)
            .map(|v| (v, self.path_end(v)))
            .collect()
    }
}

/// End `l` and start `k` of the maximal path through `new_arc` once it is
/// added; the arc `(l, k)` would close a premature cycle.
pub fn forbidden_arc(arcs: &ArcConstraints, new_arc: Arc) -> Result<Arc> {
    let with = arcs.with(new_arc)?;
    Ok((with.path_end(new_arc.1), with.path_start(new_arc.0)))
}

/// The unique tour containing every required arc; needs at least `n − 2`.
pub fn hamilton_completion(arcs: &ArcConstraints) -> Result<Tour> {
    let n = arcs.n();
    let paths = arcs.paths();
    let closing: Vec<Arc> = match paths.as_slice() {
        [(s, e)] => vec![(*e, *s)],
        [(s1, e1), (s2, e2)] => vec![(*e1, *s2), (*e2, *s1)],
        _ => {
            return Err(Error::InvalidArcs(format!(
                "{} required arcs do not determine a tour on {n} vertices",
                arcs.len()
            )))
        }
    };
    let all: Vec<Arc> = arcs.arcs().iter().copied().chain(closing).collect();
    Tour::from_arcs(n, &all)
}

/// One comparison with the solver context attached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub comparison: Comparison,
    pub provenance: Provenance,
    pub instance_id: usize,
    pub depth: usize,
}

impl Step {
    pub fn to_event(&self) -> ComparisonEvent {
        ComparisonEvent {
            form: self.comparison.form.clone().unwrap_or_default(),
            relation: self.comparison.relation,
            outcome: self.comparison.outcome,
            trivial: self.comparison.trivial,
            provenance: self.provenance,
            instance_id: self.instance_id,
            depth: self.depth,
        }
    }
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct Run<C> {
    pub best: Option<Tour>,
    pub lopt: C,
    pub steps: Vec<Step>,
    pub instances: Vec<InstanceRecord>,
}

struct Session<C> {
    input: Grid<C>,
    best: Option<Tour>,
    lopt: C,
    steps: Vec<Step>,
    instances: Vec<InstanceRecord>,
    context: (usize, usize),
}

impl<C: Cell> Recorder for Session<C> {
    fn record(&mut self, comparison: Comparison, provenance: Provenance) {
        let (instance_id, depth) = self.context;
        self.steps.push(Step {
            comparison,
            provenance,
            instance_id,
            depth,
        });
    }
}

impl<C: Cell> Session<C> {
    fn tour_length(&self, t: &Tour) -> Result<C> {
        t.arcs()
            .into_iter()
            .try_fold(C::constant(0), |acc, (i, j)| acc.plus(self.input.get(i, j)))
    }

    fn branch_bound(
        &mut self,
        mut m: Grid<C>,
        arcs: ArcConstraints,
        mut sum: C,
        parent: Option<usize>,
        depth: usize,
        branch: Branch,
    ) -> Result<()> {
        let id = self.instances.len() + 1;
        self.instances.push(InstanceRecord {
            id,
            parent,
            depth,
            branch,
            required: arcs.arcs().to_vec(),
            input: MatrixSnapshot::of(&m.map(|_, _, c| c.value())),
            exit: InstanceExit::Completed,
        });
        self.context = (id, depth);

        reduce(&mut m, &mut sum, self)?;
        let lopt = self.lopt.clone();
        if test(self, &sum, &lopt, Relation::Ge, Provenance::Prune) {
            self.instances[id - 1].exit = InstanceExit::Pruned;
            return Ok(());
        }
        let (i, j) = choose_arc(&m, self)?.arc;

        if m.rows().len() == 3 {
            let tour = hamilton_completion(&arcs.with((i, j))?)?;
            let len = self.tour_length(&tour)?;
            let lopt = self.lopt.clone();
            if test(self, &lopt, &len, Relation::Gt, Provenance::BaseCase) {
                self.best = Some(tour);
                self.lopt = len;
            }
        } else {
            let mut include = m.clone();
            include.remove_row(i);
            include.remove_col(j);
            let (l, k) = forbidden_arc(&arcs, (i, j))?;
            if include.is_live(l, k) {
                include.set(l, k, C::infinite());
            }
            self.branch_bound(
                include,
                arcs.with((i, j))?,
                sum.clone(),
                Some(id),
                depth + 1,
                Branch::Include((i, j)),
            )?;
            self.context = (id, depth);
        }

        m.set(i, j, C::infinite());
        self.branch_bound(m, arcs, sum, Some(id), depth + 1, Branch::Exclude((i, j)))?;
        self.context = (id, depth);
        Ok(())
    }
}

/// Runs the procedure on an arbitrary cell type. `input` must be a full
/// matrix with infinite diagonal, `n ≥ 3`.
pub fn run<C: Cell>(input: Grid<C>) -> Result<Run<C>> {
    let n = input.n();
    if n < 3 {
        return Err(Error::UnsupportedSize {
            what: "branch and bound",
            n,
            min: 3,
            max: usize::MAX,
        });
    }
    if !input.is_full() {
        return Err(Error::Precondition("input matrix has deleted lines".into()));
    }
    if let Some(i) = (1..=n).find(|&i| !input.get(i, i).is_infinite()) {
        return Err(Error::Precondition(format!(
            "diagonal cell ({i},{i}) is finite"
        )));
    }
    let mut session = Session {
        input: input.clone(),
        best: None,
        lopt: C::infinite(),
        steps: Vec::new(),
        instances: Vec::new(),
        context: (0, 0),
    };
    session.branch_bound(
        input,
        ArcConstraints::new(n),
        C::constant(0),
        None,
        0,
        Branch::Root,
    )?;
    Ok(Run {
        best: session.best,
        lopt: session.lopt,
        steps: session.steps,
        instances: session.instances,
    })
}

/// Result of the traced solver.
#[derive(Debug, Clone)]
pub struct Solution {
    pub tour: Tour,
    pub length: i64,
    /// The optimal length as a form in the input variables.
    pub length_form: AffineForm,
    pub trace: TraceChain,
}

/// Solves `c` on form-tracking cells and returns the optimal tour with the
/// full comparison chain.
pub fn branch_bound(c: &CostMatrix) -> Result<Solution> {
    let run = run(SymbolicCell::lift(c))?;
    let (tour, length, length_form) = match (run.best, run.lopt) {
        (Some(t), SymbolicCell::Finite { form, value }) => (t, value, form),
        _ => return Err(Error::Precondition("no tour of finite length".into())),
    };
    Ok(Solution {
        trace: TraceChain {
            n: c.n(),
            input_fingerprint: c.fingerprint(),
            leaf: tour.clone(),
            instances: run.instances,
            events: run.steps.iter().map(Step::to_event).collect(),
        },
        tour,
        length,
        length_form,
    })
}

/// Plain solver on concrete costs; no forms are built.
pub fn solve(c: &CostMatrix) -> Result<(Tour, i64)> {
    let run = run(c.clone())?;
    match (run.best, run.lopt) {
        (Some(t), CostValue::Finite(v)) => Ok((t, v)),
        _ => Err(Error::Precondition("no tour of finite length".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn c_star() -> CostMatrix {
        CostMatrix::parse("4\n- 0 2 1\n2 - 0 2\n1 2 - 0\n0 1 2 -\n").unwrap()
    }

    /// Row minima then column minima, written independently of `reduce`.
    fn reference_reduce(rows: &[Vec<Option<i64>>]) -> (i64, Vec<Vec<Option<i64>>>) {
        let n = rows.len();
        let mut m = rows.to_vec();
        let mut sum = 0;
        for r in m.iter_mut() {
            let min = r.iter().flatten().min().copied().unwrap();
            sum += min;
            r.iter_mut().flatten().for_each(|v| *v -= min);
        }
        for j in 0..n {
            let min = m.iter().filter_map(|r| r[j]).min().unwrap();
            sum += min;
            m.iter_mut()
                .filter_map(|r| r[j].as_mut())
                .for_each(|v| *v -= min);
        }
        (sum, m)
    }

    #[test]
    fn reduce_small_example() {
        let rows = vec![
            vec![None, Some(1), Some(2)],
            vec![Some(3), None, Some(4)],
            vec![Some(5), Some(6), None],
        ];
        let (ref_sum, ref_m) = reference_reduce(&rows);
        assert_eq!(ref_sum, 10);
        assert_eq!(
            ref_m,
            vec![
                vec![None, Some(0), Some(0)],
                vec![Some(0), None, Some(0)],
                vec![Some(0), Some(1), None]
            ]
        );
        let mut m = CostMatrix::from_options(&rows).unwrap();
        let mut sum = CostValue::ZERO;
        reduce(&mut m, &mut sum, &mut ()).unwrap();
        assert_eq!(sum, CostValue::Finite(ref_sum));
        assert_eq!(MatrixSnapshot::of(&m).cells, ref_m);
    }

    #[test]
    fn reduce_leaves_c_star_unchanged() {
        let c = c_star();
        let mut m = c.clone();
        let mut sum = CostValue::ZERO;
        reduce(&mut m, &mut sum, &mut ()).unwrap();
        assert_eq!(sum, CostValue::ZERO);
        assert_eq!(m, c);
    }

    #[test]
    fn reduce_row_phase_sum_is_x_length_symbolically() {
        let mut m = SymbolicCell::lift(&c_star());
        let mut sum = SymbolicCell::constant(0);
        reduce(&mut m, &mut sum, &mut ()).unwrap();
        let expected =
            AffineForm::from_terms(&[((1, 2), 1), ((2, 3), 1), ((3, 4), 1), ((4, 1), 1)], 0)
                .unwrap();
        assert_eq!(sum.form(), Some(&expected));
        assert_eq!(
            m.get(2, 1).form(),
            Some(&(&AffineForm::var(2, 1) - &AffineForm::var(2, 3)))
        );
    }

    #[test]
    fn all_infinite_line_makes_sum_infinite() {
        let mut m = CostMatrix::from_options(&[
            vec![None, None, None],
            vec![Some(3), None, Some(4)],
            vec![Some(5), Some(6), None],
        ])
        .unwrap();
        let mut sum = CostValue::ZERO;
        reduce(&mut m, &mut sum, &mut ()).unwrap();
        assert_eq!(sum, CostValue::Infinite);
    }

    #[test]
    fn choose_arc_on_c_star() {
        let choice = choose_arc(&c_star(), &mut ()).unwrap();
        assert_eq!(choice.arc, (2, 3));
        // m + k at (2,3): (c21 − c23) + (c13 − c12) = 2 + 2
        assert_eq!(choice.regret, CostValue::Finite(4));
    }

    #[test]
    fn choose_arc_single_zero() {
        let m = CostMatrix::from_options(&[
            vec![None, Some(0), Some(5)],
            vec![Some(2), None, Some(3)],
            vec![Some(4), Some(1), None],
        ])
        .unwrap();
        let choice = choose_arc(&m, &mut ()).unwrap();
        assert_eq!(choice.arc, (1, 2));
        assert_eq!(choice.regret, CostValue::Finite(5 + 1));
    }

    #[test]
    fn choose_arc_needs_a_zero() {
        let m = CostMatrix::from_rows(&vec![vec![1; 3]; 3]).unwrap();
        assert!(choose_arc(&m, &mut ()).is_err());
    }

    #[test]
    fn choose_arc_ties_keep_first() {
        let m = CostMatrix::from_rows(&vec![vec![0; 3]; 3]).unwrap();
        assert_eq!(choose_arc(&m, &mut ()).unwrap().arc, (1, 2));
    }

    /// Follows successor and predecessor links by hand.
    fn path_oracle(arcs: &[Arc], new_arc: Arc) -> Arc {
        let all: Vec<Arc> = arcs.iter().copied().chain([new_arc]).collect();
        let mut end = new_arc.1;
        while let Some(&(_, j)) = all.iter().find(|&&(i, _)| i == end) {
            end = j;
        }
        let mut start = new_arc.0;
        while let Some(&(i, _)) = all.iter().find(|&&(_, j)| j == start) {
            start = i;
        }
        (end, start)
    }

    #[test]
    fn forbidden_arc_examples() {
        let none = ArcConstraints::new(4);
        assert_eq!(forbidden_arc(&none, (2, 3)).unwrap(), (3, 2));
        let one = ArcConstraints::from_arcs(4, &[(2, 3)]).unwrap();
        assert_eq!(forbidden_arc(&one, (1, 2)).unwrap(), (3, 1));
        assert_eq!(path_oracle(&[(2, 3)], (1, 2)), (3, 1));
        let two = ArcConstraints::from_arcs(4, &[(1, 2), (3, 4)]).unwrap();
        assert_eq!(forbidden_arc(&two, (2, 3)).unwrap(), (4, 1));
        assert_eq!(path_oracle(&[(1, 2), (3, 4)], (2, 3)), (4, 1));
    }

    #[test]
    fn forbidden_arc_rejects_subcycles() {
        let c = ArcConstraints::from_arcs(4, &[(1, 2), (2, 3)]).unwrap();
        assert!(forbidden_arc(&c, (3, 1)).is_err());
        assert!(forbidden_arc(&c, (1, 4)).is_err());
        assert!(ArcConstraints::from_arcs(4, &[(1, 2), (2, 1)]).is_err());
    }

    #[test]
    fn hamilton_completion_examples() {
        let a = ArcConstraints::from_arcs(4, &[(2, 3), (1, 2)]).unwrap();
        assert_eq!(
            hamilton_completion(&a).unwrap(),
            Tour::from_arcs(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap()
        );
        let b = ArcConstraints::from_arcs(4, &[(1, 4), (4, 2)]).unwrap();
        let t = hamilton_completion(&b).unwrap();
        assert_eq!(
            t,
            Tour::from_arcs(4, &[(1, 4), (4, 2), (2, 3), (3, 1)]).unwrap()
        );
        let containing: Vec<_> = oracle::enumerate_tours(4)
            .unwrap()
            .into_iter()
            .filter(|s| s.contains(1, 4) && s.contains(4, 2))
            .collect();
        assert_eq!(containing, vec![t]);
        let c = ArcConstraints::from_arcs(3, &[(1, 2)]).unwrap();
        assert_eq!(hamilton_completion(&c).unwrap().cycle(), &[1, 2, 3]);
        assert!(hamilton_completion(&ArcConstraints::new(4)).is_err());
    }

    #[test]
    fn c_star_solution() {
        let s = branch_bound(&c_star()).unwrap();
        assert_eq!(s.tour.cycle(), &[1, 2, 3, 4]);
        assert_eq!(s.length, 0);
        let shape: Vec<_> = s
            .trace
            .instances
            .iter()
            .map(|r| (r.id, r.parent, r.branch, r.exit))
            .collect();
        assert_eq!(
            shape,
            vec![
                (1, None, Branch::Root, InstanceExit::Completed),
                (2, Some(1), Branch::Include((2, 3)), InstanceExit::Completed),
                (3, Some(2), Branch::Exclude((1, 2)), InstanceExit::Pruned),
                (4, Some(1), Branch::Exclude((2, 3)), InstanceExit::Pruned),
            ]
        );
    }

    #[test]
    fn n_below_three_is_rejected() {
        let m = CostMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(branch_bound(&m).is_err());
    }

    #[test]
    fn infeasible_input_is_reported() {
        let m = CostMatrix::from_options(&[
            vec![None, None, None],
            vec![Some(1), None, Some(1)],
            vec![Some(1), Some(1), None],
        ])
        .unwrap();
        assert!(solve(&m).is_err());
    }
}
