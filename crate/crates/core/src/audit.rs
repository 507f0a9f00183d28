//! Reproducible audits: the 5-vertex node counterexample, the 4-vertex chain
//! counterexample, per-chain compatibility audits, and the witness property
//! suite.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::form::AffineForm;
use crate::geometry::{
    adjacent, compatibility_check, implies, lemma1_preconditions, lemma1_witness, Compatibility,
    Hypothesis, Implication, LinearSystem, MAX_LP_N,
};
use crate::lp::Rational;
use crate::matrix::CostMatrix;
use crate::oracle::{enumerate_tours, tour_lengths, MAX_ENUM_N};
use crate::septree::{
    normal_form, Branch, ComparisonEvent, InstanceExit, MatrixSnapshot, Relation, TraceChain,
};
use crate::solver::branch_bound;
use crate::tour::Tour;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn of(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub id: String,
    pub description: String,
    pub verdict: Verdict,
    pub evidence: Value,
}

impl CheckItem {
    fn new(
        id: impl Into<String>,
        description: impl Into<String>,
        ok: bool,
        evidence: Value,
    ) -> Self {
        CheckItem {
            id: id.into(),
            description: description.into(),
            verdict: Verdict::of(ok),
            evidence,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Outcome of the per-event compatibility analysis of one chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainVerdict {
    /// Every nontrivial event is compatible with `K(y)`.
    #[serde(rename = "VIOLATES(*)")]
    Violates,
    /// Some event is incompatible with `K(y)`.
    #[serde(rename = "SATISFIES(*)")]
    Satisfies,
    /// `y` is the leaf itself.
    #[serde(rename = "DEGENERATE")]
    Degenerate,
}

impl ChainVerdict {
    pub fn label(self) -> &'static str {
        match self {
            ChainVerdict::Violates => "VIOLATES(*)",
            ChainVerdict::Satisfies => "SATISFIES(*)",
            ChainVerdict::Degenerate => "DEGENERATE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub title: String,
    pub items: Vec<CheckItem>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain_verdict: Option<ChainVerdict>,
    /// Adjacency of the leaf and the queried tour, when decidable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacent: Option<bool>,
    /// Conjunction of the item verdicts.
    pub verdict: Verdict,
}

impl AuditReport {
    fn new(title: impl Into<String>, items: Vec<CheckItem>) -> Self {
        let verdict = Verdict::of(items.iter().all(CheckItem::passed));
        AuditReport {
            title: title.into(),
            items,
            notes: Vec::new(),
            chain_verdict: None,
            adjacent: None,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn item(&self, id: &str) -> Option<&CheckItem> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn failed_items(&self) -> impl Iterator<Item = &CheckItem> {
        self.items.iter().filter(|i| !i.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One line per item, then the overall verdict.
    pub fn summary(&self) -> String {
        let mut out = format!("{}\n", self.title);
        for item in &self.items {
            let tag = if item.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "  {tag}  {:<12} {}", item.id, item.description);
        }
        for note in &self.notes {
            let _ = writeln!(out, "  note: {note}");
        }
        if let Some(adj) = self.adjacent {
            let _ = writeln!(out, "  leaf adjacent to queried tour: {adj}");
        }
        if let Some(v) = self.chain_verdict {
            let _ = writeln!(out, "  chain verdict: {}", v.label());
        }
        let passed = self.items.iter().filter(|i| i.passed()).count();
        let _ = writeln!(
            out,
            "overall: {} ({passed}/{} items)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.items.len()
        );
        out
    }
}

/// Rows of a matrix with `null` for infinite cells.
pub fn matrix_json(c: &CostMatrix) -> Value {
    json!(MatrixSnapshot::of(c).cells)
}

fn form_json(f: &AffineForm) -> Value {
    json!({ "text": f.to_string(), "form": f })
}

fn rational_json(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn tour_json(t: &Tour) -> Value {
    json!(t.cycle())
}

fn v(i: usize, j: usize) -> AffineForm {
    AffineForm::var(i, j)
}

// Transcribed fixture data. Diagonal entries are 0 in the characteristic
// vectors and `None` in the matrices.

type Chi5 = [[u8; 5]; 5];
type Rows5 = [[Option<i64>; 5]; 5];

const CHI_X: Chi5 = [
    [0, 0, 0, 1, 0],
    [0, 0, 0, 0, 1],
    [1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0],
];
const CHI_Y: Chi5 = [
    [0, 0, 0, 0, 1],
    [0, 0, 1, 0, 0],
    [1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0],
];
const CHI_Z: Chi5 = [
    [0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1],
    [0, 1, 0, 0, 0],
    [1, 0, 0, 0, 0],
    [0, 0, 0, 1, 0],
];
const CHI_W: Chi5 = [
    [0, 0, 0, 0, 1],
    [0, 0, 0, 1, 0],
    [0, 1, 0, 0, 0],
    [1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0],
];
const CHI_X_DOM: Chi5 = [
    [0, 1, 0, 0, 0],
    [0, 0, 0, 0, 1],
    [0, 0, 0, 1, 0],
    [1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0],
];
const CHI_Y_DOM: Chi5 = [
    [0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1],
    [1, 0, 0, 0, 0],
    [0, 0, 0, 1, 0],
];
const CHI_Z_DOM: Chi5 = [
    [0, 0, 1, 0, 0],
    [1, 0, 0, 0, 0],
    [0, 0, 0, 0, 1],
    [0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0],
];
const CHI_W_DOM: Chi5 = [
    [0, 0, 0, 0, 1],
    [1, 0, 0, 0, 0],
    [0, 0, 0, 1, 0],
    [0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0],
];

const N: Option<i64> = None;
const fn s(v: i64) -> Option<i64> {
    Some(v)
}

const C_X: Rows5 = [
    [N, s(0), s(6), s(1), s(6)],
    [s(0), N, s(6), s(6), s(1)],
    [s(3), s(2), N, s(1), s(0)],
    [s(6), s(0), s(6), N, s(6)],
    [s(6), s(6), s(0), s(6), N],
];
const C_Y: Rows5 = [
    [N, s(0), s(6), s(6), s(1)],
    [s(0), N, s(1), s(6), s(6)],
    [s(3), s(2), N, s(1), s(0)],
    [s(6), s(0), s(6), N, s(6)],
    [s(6), s(6), s(6), s(0), N],
];
const C_Z: Rows5 = [
    [N, s(0), s(1), s(6), s(6)],
    [s(0), N, s(6), s(6), s(1)],
    [s(6), s(3), N, s(1), s(0)],
    [s(0), s(6), s(6), N, s(6)],
    [s(6), s(6), s(6), s(0), N],
];
const C_W: Rows5 = [
    [N, s(0), s(6), s(6), s(1)],
    [s(0), N, s(6), s(1), s(6)],
    [s(6), s(3), N, s(1), s(0)],
    [s(0), s(6), s(6), N, s(6)],
    [s(6), s(6), s(0), s(6), N],
];

/// Name, tour, dominator, matrix, and whether the node test holds at the
/// matrix.
const NODE_CASES: [(&str, Chi5, Chi5, Rows5, bool); 4] = [
    ("x", CHI_X, CHI_X_DOM, C_X, true),
    ("y", CHI_Y, CHI_Y_DOM, C_Y, true),
    ("z", CHI_Z, CHI_Z_DOM, C_Z, false),
    ("w", CHI_W, CHI_W_DOM, C_W, false),
];

const NODE_VALUE: i64 = 5;

fn chi_tour<const K: usize>(chi: &[[u8; K]; K]) -> Tour {
    let flat: Vec<u8> = chi.iter().flatten().copied().collect();
    Tour::from_chi(K, &flat).expect("transcribed tour is Hamiltonian")
}

fn rows_matrix<const K: usize>(rows: &[[Option<i64>; K]; K]) -> CostMatrix {
    let rows: Vec<Vec<Option<i64>>> = rows.iter().map(|r| r.to_vec()).collect();
    CostMatrix::from_options(&rows).expect("transcribed matrix is valid")
}

/// Off-diagonal cells where `c` differs from the transcription.
fn matrix_mismatches<const K: usize>(c: &CostMatrix, rows: &[[Option<i64>; K]; K]) -> Vec<Value> {
    if c.n() != K {
        return vec![json!({ "n": c.n(), "expected_n": K })];
    }
    let mut out = Vec::new();
    for i in 1..=K {
        for j in 1..=K {
            let have = c.cost(i, j).finite();
            if i != j && have != rows[i - 1][j - 1] {
                out.push(json!({ "cell": [i, j], "found": have, "expected": rows[i - 1][j - 1] }));
            }
        }
    }
    out
}

/// One tour of the node counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeCase {
    pub name: String,
    pub tour: Tour,
    /// Strictly shorter than `tour` on the branch where `tour` is discarded.
    pub dominator: Tour,
    /// Input for which `tour` is the unique optimum.
    pub matrix: CostMatrix,
    /// Whether the node test holds at `matrix`; the tour is discarded on the
    /// opposite branch.
    pub node_holds: bool,
}

/// The 5-vertex counterexample to the direct-type bound at a single node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section4Fixture {
    /// Conditions under which row reduction reaches the node.
    pub path: LinearSystem,
    /// The node test `c41 > c42`.
    pub node: Hypothesis,
    pub cases: Vec<NodeCase>,
    /// Common optimal value of the four witness inputs.
    pub value: i64,
}

fn row_reduction_path() -> LinearSystem {
    let le = Hypothesis::le;
    let gt = Hypothesis::gt;
    LinearSystem::new(
        5,
        vec![
            le(&v(1, 2), &v(1, 3)),
            le(&v(1, 2), &v(1, 4)),
            le(&v(1, 2), &v(1, 5)),
            le(&v(2, 1), &v(2, 3)),
            le(&v(2, 1), &v(2, 4)),
            le(&v(2, 1), &v(2, 5)),
            gt(&v(3, 1), &v(3, 2)),
            gt(&v(3, 2), &v(3, 4)),
            gt(&v(3, 4), &v(3, 5)),
        ],
    )
}

impl Section4Fixture {
    pub fn transcribed() -> Self {
        Section4Fixture {
            path: row_reduction_path(),
            node: Hypothesis::gt(&v(4, 1), &v(4, 2)),
            cases: NODE_CASES
                .iter()
                .map(|(name, chi, dom, rows, holds)| NodeCase {
                    name: name.to_string(),
                    tour: chi_tour(chi),
                    dominator: chi_tour(dom),
                    matrix: rows_matrix(rows),
                    node_holds: *holds,
                })
                .collect(),
            value: NODE_VALUE,
        }
    }

    /// Hypotheses on the branch where `case.tour` is discarded.
    pub fn discarding_system(&self, case: &NodeCase) -> LinearSystem {
        let side = if case.node_holds {
            Hypothesis {
                form: -&self.node.form,
                relation: Relation::Ge,
            }
        } else {
            self.node.clone()
        };
        self.path.with(side)
    }
}

fn hypothesis_values(sys: &LinearSystem, c: &CostMatrix) -> Result<Vec<Value>> {
    sys.hypotheses
        .iter()
        .map(|h| {
            Ok(json!({
                "hypothesis": h.to_string(),
                "value": h.form.eval(c)?,
                "holds": h.holds_at(c)?,
            }))
        })
        .collect()
}

fn error_item(id: String, description: String, e: &Error) -> CheckItem {
    CheckItem::new(id, description, false, json!({ "error": e.to_string() }))
}

/// Runs the node audit on the transcribed fixture.
pub fn verify_section4() -> AuditReport {
    verify_section4_with(&Section4Fixture::transcribed())
}

/// Runs the node audit on an arbitrary (possibly mutated) fixture.
pub fn verify_section4_with(fx: &Section4Fixture) -> AuditReport {
    let mut items = vec![section4_integrity(fx)];

    let mut in_xb = Vec::new();
    for case in &fx.cases {
        let id = format!("a:{}", case.name);
        let desc = format!(
            "C_{} satisfies the row-reduction path conditions",
            case.name
        );
        let a = match hypothesis_values(&fx.path, &case.matrix) {
            Ok(vals) => {
                let ok = vals.iter().all(|v| v["holds"] == json!(true));
                CheckItem::new(
                    id,
                    desc,
                    ok,
                    json!({ "matrix": matrix_json(&case.matrix), "hypotheses": vals }),
                )
            }
            Err(e) => error_item(id, desc, &e),
        };
        let a_ok = a.passed();
        items.push(a);

        let id = format!("b:{}", case.name);
        let side = if case.node_holds { "holds" } else { "fails" };
        let desc = format!("node test {} {side} at C_{}", fx.node, case.name);
        items.push(match fx.node.form.eval(&case.matrix) {
            Ok(val) => CheckItem::new(
                id,
                desc,
                fx.node.relation.holds(val) == case.node_holds,
                json!({ "node": fx.node.to_string(), "value": val, "expected_to_hold": case.node_holds }),
            ),
            Err(e) => error_item(id, desc, &e),
        });

        let c = unique_optimum_item(
            &format!("c:{}", case.name),
            &case.name,
            &case.tour,
            &case.matrix,
            fx.value,
        );
        in_xb.push(a_ok && c.passed());
        items.push(c);
    }

    let mut dominated = Vec::new();
    for case in &fx.cases {
        let d = domination_item(fx, case);
        dominated.push(d.passed());
        items.push(d);
    }

    let tours: Vec<Tour> = fx.cases.iter().map(|c| c.tour.clone()).collect();
    let names: Vec<&str> = fx.cases.iter().map(|c| c.name.as_str()).collect();
    let clique = clique_item("e", &tours, &names);
    let clique_ok = clique.passed();
    items.push(clique);

    // A tour optimal for the input of one branch and dominated on the other
    // is discarded there.
    let mut r_plus = Vec::new();
    let mut r_minus = Vec::new();
    for (k, case) in fx.cases.iter().enumerate() {
        if in_xb[k] && dominated[k] {
            if case.node_holds {
                r_minus.push(case.name.clone());
            } else {
                r_plus.push(case.name.clone());
            }
        }
    }
    let smaller = r_plus.len().min(r_minus.len());
    items.push(CheckItem::new(
        "f",
        "min(|R+ ∩ Y|, |R- ∩ Y|) exceeds 1, so the direct-type bound fails at the node",
        clique_ok && smaller >= 2,
        json!({
            "r_plus": r_plus,
            "r_minus": r_minus,
            "clique": clique_ok,
            "min": smaller,
            "direct_type_bound": 1,
        }),
    ));

    let mut report = AuditReport::new("node audit: four-tour clique split at one node", items);
    report.notes.push(
        "x and y are discarded on the branch where the node test fails; z and w where it holds"
            .into(),
    );
    report
}

fn section4_integrity(fx: &Section4Fixture) -> CheckItem {
    let mut problems = Vec::new();
    if fx.path != row_reduction_path() {
        problems.push(json!("path conditions differ from the transcription"));
    }
    if fx.node != Hypothesis::gt(&v(4, 1), &v(4, 2)) {
        problems.push(json!("node test differs from the transcription"));
    }
    if fx.value != NODE_VALUE {
        problems.push(json!({ "value": fx.value, "expected": NODE_VALUE }));
    }
    if fx.cases.len() != NODE_CASES.len() {
        problems.push(json!({ "cases": fx.cases.len(), "expected": NODE_CASES.len() }));
    }
    for (case, (name, chi, dom, rows, holds)) in fx.cases.iter().zip(NODE_CASES.iter()) {
        if case.name != *name || case.node_holds != *holds {
            problems.push(json!({ "case": case.name, "expected": name }));
        }
        if case.tour.chi() != chi.iter().flatten().copied().collect::<Vec<_>>() {
            problems.push(json!({ "case": case.name, "tour": tour_json(&case.tour) }));
        }
        if case.dominator.chi() != dom.iter().flatten().copied().collect::<Vec<_>>() {
            problems.push(json!({ "case": case.name, "dominator": tour_json(&case.dominator) }));
        }
        for m in matrix_mismatches(&case.matrix, rows) {
            problems.push(json!({ "case": case.name, "mismatch": m }));
        }
    }
    CheckItem::new(
        "fixture",
        "fixture matches the transcribed tours and matrices",
        problems.is_empty(),
        json!({ "mismatches": problems }),
    )
}

fn unique_optimum_item(id: &str, name: &str, t: &Tour, c: &CostMatrix, value: i64) -> CheckItem {
    let desc = format!("{name} is the unique optimum of C_{name} with value {value}");
    let lengths = match tour_lengths(c) {
        Ok(l) => l,
        Err(e) => return error_item(id.into(), desc, &e),
    };
    let own = lengths.iter().find(|(s, _)| s == t).map(|(_, l)| *l);
    let runner_up = lengths
        .iter()
        .filter(|(s, _)| s != t)
        .min_by_key(|(_, l)| *l);
    let ok = own.and_then(|l| l.finite()) == Some(value)
        && runner_up.is_some_and(|(_, l)| Some(*l) > own);
    CheckItem::new(
        id,
        desc,
        ok,
        json!({
            "tour": tour_json(t),
            "matrix": matrix_json(c),
            "value": own.and_then(|l| l.finite()),
            "runner_up": runner_up.map(|(s, l)| json!({ "tour": tour_json(s), "value": l.finite() })),
            "tours_enumerated": lengths.len(),
        }),
    )
}

fn domination_item(fx: &Section4Fixture, case: &NodeCase) -> CheckItem {
    let id = format!("d:{}", case.name);
    let branch = if case.node_holds { "fails" } else { "holds" };
    let desc = format!(
        "path conditions with the node test {branch} imply <{n}, C> > <{n}', C>",
        n = case.name
    );
    let sys = fx.discarding_system(case);
    let concl = Hypothesis {
        form: &AffineForm::tour_length(&case.tour) - &AffineForm::tour_length(&case.dominator),
        relation: Relation::Gt,
    };
    let base = json!({
        "tour": tour_json(&case.tour),
        "dominator": tour_json(&case.dominator),
        "conclusion": concl.to_string(),
    });
    match implies(&sys, &concl) {
        Ok(Implication::Certified(cert)) => {
            let ok = cert.verify(&sys, &concl);
            let weights: Vec<Value> = sys
                .hypotheses
                .iter()
                .zip(&cert.weights)
                .filter(|(_, w)| !num::Zero::is_zero(*w))
                .map(|(h, w)| json!({ "hypothesis": h.to_string(), "weight": rational_json(w) }))
                .collect();
            let mut ev = base;
            ev["certificate"] = json!(weights);
            CheckItem::new(id, desc, ok, ev)
        }
        Ok(Implication::Refuted(c)) => {
            let mut ev = base;
            ev["countermodel"] = matrix_json(&c);
            CheckItem::new(id, desc, false, ev)
        }
        Ok(Implication::Vacuous) => {
            let mut ev = base;
            ev["vacuous"] = json!(true);
            CheckItem::new(id, desc, false, ev)
        }
        Err(e) => error_item(id, desc, &e),
    }
}

fn clique_item(id: &str, tours: &[Tour], names: &[&str]) -> CheckItem {
    let desc = format!("the {} tours are pairwise adjacent", tours.len());
    let mut pairs = Vec::new();
    let mut ok = true;
    for a in 0..tours.len() {
        for b in a + 1..tours.len() {
            match adjacent(&tours[a], &tours[b]) {
                Ok(adj) => {
                    ok &= adj;
                    pairs.push(json!({ "pair": [names[a], names[b]], "adjacent": adj }));
                }
                Err(e) => return error_item(id.into(), desc, &e),
            }
        }
    }
    CheckItem::new(id, desc, ok, json!({ "pairs": pairs }))
}

/// Instance shape and input as drawn in the call diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedInstance {
    pub id: usize,
    pub parent: Option<usize>,
    pub branch: Branch,
    pub required: Vec<(usize, usize)>,
    pub exit: InstanceExit,
    pub input: MatrixSnapshot,
}

/// The 4-vertex input whose chain is compatible with the cone of `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section5Fixture {
    pub c: CostMatrix,
    pub leaf: Tour,
    pub optimum: i64,
    pub y: Tour,
    pub y_value: i64,
    pub instances: Vec<ExpectedInstance>,
    /// Oriented forms of comparisons the walkthrough lists, by instance.
    pub comparisons: Vec<(usize, AffineForm)>,
}

type Rows4 = [[Option<i64>; 4]; 4];
const C_STAR: Rows4 = [
    [N, s(0), s(2), s(1)],
    [s(2), N, s(0), s(2)],
    [s(1), s(2), N, s(0)],
    [s(0), s(1), s(2), N],
];
const CHI_LEAF: [[u8; 4]; 4] = [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]];
const CHI_SECOND: [[u8; 4]; 4] = [[0, 0, 0, 1], [0, 0, 1, 0], [1, 0, 0, 0], [0, 1, 0, 0]];

fn snapshot(rows: &[usize], cols: &[usize], cells: &[&[Option<i64>]]) -> MatrixSnapshot {
    MatrixSnapshot {
        rows: rows.to_vec(),
        cols: cols.to_vec(),
        cells: cells.iter().map(|r| r.to_vec()).collect(),
    }
}

fn lin(terms: &[((usize, usize), i64)], constant: i64) -> AffineForm {
    AffineForm::from_terms(terms, constant).expect("valid form")
}

fn walkthrough_comparisons() -> Vec<(usize, AffineForm)> {
    let d = |a: (usize, usize), b: (usize, usize)| lin(&[(a, 1), (b, -1)], 0);
    let d2 = |p: [(usize, usize); 2], m: [(usize, usize); 2], k: i64| {
        lin(&[(p[0], 1), (p[1], 1), (m[0], -1), (m[1], -1)], k)
    };
    let d3 = |p: [(usize, usize); 3], m: [(usize, usize); 3]| {
        lin(
            &[
                (p[0], 1),
                (p[1], 1),
                (p[2], 1),
                (m[0], -1),
                (m[1], -1),
                (m[2], -1),
            ],
            0,
        )
    };
    vec![
        // row reduction
        (1, d((1, 3), (1, 2))),
        (1, d((1, 4), (1, 2))),
        (1, d((2, 1), (2, 3))),
        (1, d((2, 4), (2, 3))),
        // first column
        (1, d2([(2, 1), (3, 4)], [(2, 3), (3, 1)], 0)),
        (1, d((3, 1), (3, 4))),
        // regret at (1,2)
        (1, d((1, 3), (1, 4))),
        (1, d2([(3, 2), (4, 1)], [(3, 4), (4, 2)], 0)),
        (1, d2([(1, 4), (4, 2)], [(1, 2), (4, 1)], 1)),
        // regret at (2,3)
        (1, d((2, 4), (2, 1))),
        (1, d2([(4, 3), (1, 2)], [(4, 1), (1, 3)], 0)),
        (1, d3([(2, 1), (1, 3), (4, 1)], [(2, 3), (1, 4), (4, 2)])),
        // regret at (3,4)
        (1, d((3, 2), (3, 1))),
        (1, d2([(2, 4), (1, 2)], [(2, 3), (1, 4)], 0)),
        (1, d3([(2, 1), (1, 3), (3, 4)], [(2, 3), (1, 4), (3, 1)])),
        // regret at (4,1)
        (1, d((4, 3), (4, 2))),
        (1, d2([(2, 1), (3, 4)], [(2, 3), (3, 1)], 0)),
        (
            1,
            lin(
                &[
                    ((2, 1), 1),
                    ((1, 3), 1),
                    ((3, 4), 1),
                    ((4, 1), 1),
                    ((2, 3), -1),
                    ((1, 2), -1),
                    ((3, 1), -1),
                    ((4, 2), -1),
                ],
                0,
            ),
        ),
        // second instance
        (2, d2([(1, 4), (4, 2)], [(1, 2), (4, 1)], 1)),
        (2, d2([(4, 2), (3, 4)], [(4, 1), (3, 1)], 0)),
        (2, d2([(1, 4), (3, 4)], [(1, 2), (3, 1)], 0)),
        // third instance: the prune
        (3, d2([(1, 4), (4, 2)], [(1, 2), (4, 1)], 0)),
        // fourth instance
        (4, d((2, 4), (2, 1))),
        (4, d2([(4, 3), (1, 2)], [(4, 1), (1, 3)], 0)),
    ]
}

impl Section5Fixture {
    pub fn transcribed() -> Self {
        let full = [1, 2, 3, 4];
        let c_prime: [&[Option<i64>]; 3] = [&[N, s(0), s(1)], &[s(1), N, s(0)], &[s(0), s(1), N]];
        let c_second: [&[Option<i64>]; 3] = [&[N, N, s(1)], &[s(1), N, s(0)], &[s(0), s(1), N]];
        let c_third: [&[Option<i64>]; 4] = [
            &[N, s(0), s(2), s(1)],
            &[s(2), N, N, s(2)],
            &[s(1), s(2), N, s(0)],
            &[s(0), s(1), s(2), N],
        ];
        let star: Vec<&[Option<i64>]> = C_STAR.iter().map(|r| &r[..]).collect();
        Section5Fixture {
            c: rows_matrix(&C_STAR),
            leaf: chi_tour(&CHI_LEAF),
            optimum: 0,
            y: chi_tour(&CHI_SECOND),
            y_value: 3,
            instances: vec![
                ExpectedInstance {
                    id: 1,
                    parent: None,
                    branch: Branch::Root,
                    required: vec![],
                    exit: InstanceExit::Completed,
                    input: snapshot(&full, &full, &star),
                },
                ExpectedInstance {
                    id: 2,
                    parent: Some(1),
                    branch: Branch::Include((2, 3)),
                    required: vec![(2, 3)],
                    exit: InstanceExit::Completed,
                    input: snapshot(&[1, 3, 4], &[1, 2, 4], &c_prime),
                },
                ExpectedInstance {
                    id: 3,
                    parent: Some(2),
                    branch: Branch::Exclude((1, 2)),
                    required: vec![(2, 3)],
                    exit: InstanceExit::Pruned,
                    input: snapshot(&[1, 3, 4], &[1, 2, 4], &c_second),
                },
                ExpectedInstance {
                    id: 4,
                    parent: Some(1),
                    branch: Branch::Exclude((2, 3)),
                    required: vec![],
                    exit: InstanceExit::Pruned,
                    input: snapshot(&full, &full, &c_third),
                },
            ],
            comparisons: walkthrough_comparisons(),
        }
    }
}

/// Runs the chain audit on the transcribed 4-vertex fixture.
pub fn verify_section5() -> AuditReport {
    verify_section5_with(&Section5Fixture::transcribed())
}

pub fn verify_section5_with(fx: &Section5Fixture) -> AuditReport {
    let mut items = vec![section5_integrity(fx)];
    let solution = match branch_bound(&fx.c) {
        Ok(s) => s,
        Err(e) => {
            items.push(error_item("a:leaf".into(), "solver run".into(), &e));
            return AuditReport::new(
                "chain audit: 4-vertex run against the second-best tour",
                items,
            );
        }
    };
    let trace = &solution.trace;

    items.push(CheckItem::new(
        "a:leaf",
        format!(
            "the solver returns leaf {} with value {}",
            fx.leaf, fx.optimum
        ),
        solution.tour == fx.leaf && solution.length == fx.optimum,
        json!({
            "leaf": tour_json(&solution.tour),
            "value": solution.length,
            "value_form": form_json(&solution.length_form),
        }),
    ));

    let shape: Vec<Value> = trace
        .instances
        .iter()
        .map(|r| json!({ "id": r.id, "parent": r.parent, "branch": r.branch, "required": r.required, "exit": r.exit }))
        .collect();
    let shape_ok = trace.instances.len() == fx.instances.len()
        && trace.instances.iter().zip(&fx.instances).all(|(r, e)| {
            r.id == e.id
                && r.parent == e.parent
                && r.branch == e.branch
                && r.required == e.required
                && r.exit == e.exit
        })
        && trace.call_tree().is_ok();
    items.push(CheckItem::new(
        "a:calls",
        format!(
            "{} procedure instances nested as in the call diagram",
            fx.instances.len()
        ),
        shape_ok,
        json!({ "instances": shape }),
    ));

    let inputs: Vec<Value> = trace
        .instances
        .iter()
        .map(|r| json!({ "id": r.id, "input": r.input }))
        .collect();
    let inputs_ok = trace.instances.len() == fx.instances.len()
        && trace
            .instances
            .iter()
            .zip(&fx.instances)
            .all(|(r, e)| r.input == e.input);
    items.push(CheckItem::new(
        "a:inputs",
        "instance inputs equal the displayed matrices C*, C', C'', C'''",
        inputs_ok,
        json!({ "inputs": inputs }),
    ));

    let missing: Vec<Value> = fx
        .comparisons
        .iter()
        .filter(|(id, f)| {
            !trace
                .nontrivial()
                .any(|e| e.instance_id == *id && &e.oriented_form() == f)
        })
        .map(|(id, f)| json!({ "instance": id, "form": f.to_string() }))
        .collect();
    items.push(CheckItem::new(
        "a:events",
        format!(
            "the {} walkthrough comparisons occur in the chain",
            fx.comparisons.len()
        ),
        missing.is_empty(),
        json!({ "missing": missing, "nontrivial_events": trace.nontrivial().count() }),
    ));

    items.push(second_best_item(fx));
    let all: Vec<Tour> = enumerate_tours(fx.c.n()).unwrap_or_default();
    let labels: Vec<String> = all.iter().map(|t| t.to_string()).collect();
    let label_refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let clique = clique_item("c", &all, &label_refs);
    let clique_ok = clique.passed();
    items.push(clique);

    let degenerate = fx.y == solution.tour;
    let (event_items, outcome) = event_checks(trace, &fx.y, "d");
    items.extend(event_items);

    let verdict = chain_verdict(degenerate, outcome);
    items.push(CheckItem::new(
        "e",
        format!("condition (*) fails for the chain and y = {}", fx.y),
        verdict == Some(ChainVerdict::Violates) && clique_ok,
        json!({ "verdict": verdict.map(ChainVerdict::label), "leaf": tour_json(&solution.tour), "y": tour_json(&fx.y) }),
    ));

    let mut report = AuditReport::new(
        "chain audit: 4-vertex run against the second-best tour",
        items,
    );
    report.chain_verdict = verdict;
    report.adjacent = (!degenerate)
        .then(|| adjacent(&solution.tour, &fx.y).ok())
        .flatten();
    report.notes.push(
        "the fourth instance prunes on c13 + c24 - c12 - c23 >= 0: column 4 ties and the first minimum is kept".into(),
    );
    report
}

fn section5_integrity(fx: &Section5Fixture) -> CheckItem {
    let mut problems: Vec<Value> = matrix_mismatches(&fx.c, &C_STAR);
    if fx.leaf != chi_tour(&CHI_LEAF) {
        problems.push(json!({ "leaf": tour_json(&fx.leaf) }));
    }
    if fx.y != chi_tour(&CHI_SECOND) {
        problems.push(json!({ "y": tour_json(&fx.y) }));
    }
    if fx.optimum != 0 || fx.y_value != 3 {
        problems.push(json!({ "optimum": fx.optimum, "y_value": fx.y_value }));
    }
    let reference = Section5Fixture::transcribed();
    if fx.instances != reference.instances {
        problems.push(json!("instance displays differ from the transcription"));
    }
    if fx.comparisons != reference.comparisons {
        problems.push(json!(
            "walkthrough comparisons differ from the transcription"
        ));
    }
    CheckItem::new(
        "fixture",
        "fixture matches the transcribed input, tours and displays",
        problems.is_empty(),
        json!({ "mismatches": problems }),
    )
}

fn second_best_item(fx: &Section5Fixture) -> CheckItem {
    let desc = format!("y = {} is second best with value {}", fx.y, fx.y_value);
    let lengths = match tour_lengths(&fx.c) {
        Ok(l) => l,
        Err(e) => return error_item("b".into(), desc, &e),
    };
    let mut values: Vec<_> = lengths.iter().map(|(_, l)| *l).collect();
    values.sort();
    values.dedup();
    let best = values.first().copied();
    let second = values.get(1).copied();
    let at = |value| lengths.iter().filter(|(_, l)| Some(*l) == value).count();
    let y_len = lengths.iter().find(|(t, _)| *t == fx.y).map(|(_, l)| *l);
    let ok = at(best) == 1
        && at(second) == 1
        && y_len == second
        && y_len.and_then(|l| l.finite()) == Some(fx.y_value);
    CheckItem::new(
        "b",
        desc,
        ok,
        json!({
            "lengths": lengths.iter().map(|(t, l)| json!({ "tour": tour_json(t), "value": l.finite() })).collect::<Vec<_>>(),
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EventsOutcome {
    AllCompatible,
    SomeIncompatible,
    Undecided,
}

fn chain_verdict(degenerate: bool, outcome: EventsOutcome) -> Option<ChainVerdict> {
    match (degenerate, outcome) {
        (true, _) => Some(ChainVerdict::Degenerate),
        (false, EventsOutcome::AllCompatible) => Some(ChainVerdict::Violates),
        (false, EventsOutcome::SomeIncompatible) => Some(ChainVerdict::Satisfies),
        (false, EventsOutcome::Undecided) => None,
    }
}

/// One item per nontrivial event. An item passes when the check produced
/// verified evidence either way; the prefix `d` items of the 4-vertex audit
/// additionally require a witness.
fn event_checks(trace: &TraceChain, y: &Tour, prefix: &str) -> (Vec<CheckItem>, EventsOutcome) {
    let require_witness = prefix == "d";
    let mut items = Vec::new();
    let mut any_incompatible = false;
    let mut any_error = false;
    for (k, e) in trace.nontrivial().enumerate() {
        let id = format!("{prefix}:{:02}", k + 1);
        let desc = event_description(e);
        match compatibility_check(e, y) {
            Ok(Compatibility::Witness { matrix, method }) => {
                let strict = normal_form(e).map(|nf| nf.strict_form()).ok();
                items.push(CheckItem::new(
                    id,
                    desc,
                    true,
                    json!({
                        "compatible": true,
                        "method": method,
                        "witness": matrix_json(&matrix),
                        "form_value": strict.and_then(|f| f.eval(&matrix).ok()),
                    }),
                ));
            }
            Ok(Compatibility::Incompatible(cert)) => {
                any_incompatible = true;
                let dominators: Vec<Value> = cert
                    .dominators
                    .iter()
                    .map(|(t, w)| json!({ "tour": tour_json(t), "weight": rational_json(w) }))
                    .collect();
                items.push(CheckItem::new(
                    id,
                    desc,
                    !require_witness,
                    json!({ "compatible": false, "certificate": dominators }),
                ));
            }
            Err(err) => {
                any_error = true;
                items.push(error_item(id, desc, &err));
            }
        }
    }
    let outcome = if any_incompatible {
        EventsOutcome::SomeIncompatible
    } else if any_error {
        EventsOutcome::Undecided
    } else {
        EventsOutcome::AllCompatible
    };
    (items, outcome)
}

fn event_description(e: &ComparisonEvent) -> String {
    let oriented = e.oriented_form();
    format!(
        "[{}:{:?}] {} {} 0 is compatible with K(y)",
        e.instance_id,
        e.provenance,
        oriented,
        e.oriented_relation().symbol()
    )
}

/// Runs the solver on `c` and checks every nontrivial event of its chain
/// against `K(y)`.
pub fn audit_chain(c: &CostMatrix, y: &Tour) -> Result<AuditReport> {
    if c.n() != y.n() {
        return Err(Error::DimensionMismatch {
            expected: c.n(),
            found: y.n(),
        });
    }
    let solution = branch_bound(c)?;
    let trace = &solution.trace;
    let mut items = Vec::new();

    let leaf_check = if c.n() <= MAX_ENUM_N {
        let optimum = crate::oracle::optimum_value(c)?;
        json!({ "enumerated_optimum": optimum.finite() })
    } else {
        Value::Null
    };
    let leaf_ok = leaf_check
        .get("enumerated_optimum")
        .is_none_or(|o| *o == json!(solution.length));
    items.push(CheckItem::new(
        "leaf",
        format!(
            "the solver returns leaf {} with value {}",
            solution.tour, solution.length
        ),
        leaf_ok && trace.replay_check(c)?,
        json!({ "leaf": tour_json(&solution.tour), "value": solution.length, "check": leaf_check }),
    ));

    let degenerate = *y == solution.tour;
    items.push(CheckItem::new(
        "query",
        format!("queried tour {y} differs from the leaf"),
        !degenerate,
        json!({ "y": tour_json(y), "degenerate": degenerate }),
    ));

    let outcome = if degenerate {
        EventsOutcome::Undecided
    } else {
        let (event_items, outcome) = event_checks(trace, y, "event");
        items.extend(event_items);
        outcome
    };
    let verdict = chain_verdict(degenerate, outcome);
    items.push(CheckItem::new(
        "verdict",
        "a definite verdict on condition (*) for (chain, y)",
        matches!(
            verdict,
            Some(ChainVerdict::Violates | ChainVerdict::Satisfies)
        ),
        json!({ "verdict": verdict.map(ChainVerdict::label) }),
    ));

    let mut report = AuditReport::new(format!("chain audit for y = {y}"), items);
    report.chain_verdict = verdict;
    if !degenerate && c.n() <= MAX_LP_N {
        report.adjacent = Some(adjacent(&solution.tour, y)?);
    }
    Ok(report)
}

/// One input to the witness construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Case {
    pub y: Tour,
    pub plus: AffineForm,
    pub minus: AffineForm,
}

/// Random cases meeting the witness preconditions: equal-size disjoint
/// supports with at most two arcs of `B+` on `y`.
pub fn generate_lemma1_cases(seed: u64, cases: usize, n: usize) -> Result<Vec<Lemma1Case>> {
    if !(4..=MAX_LP_N).contains(&n) {
        return Err(Error::UnsupportedSize {
            what: "witness property suite",
            n,
            min: 4,
            max: MAX_LP_N,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tours = enumerate_tours(n)?;
    let mut cells: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::with_capacity(cases);
    for _ in 0..cases {
        let y = tours.choose(&mut rng).expect("tours exist").clone();
        let k = rng.gen_range(1..=cells.len() / 2);
        cells.shuffle(&mut rng);
        let (mut plus, mut on_y) = (Vec::new(), 0);
        for &p in &cells {
            if plus.len() == k {
                break;
            }
            let hits = y.contains(p.0, p.1);
            if hits && on_y == 2 {
                continue;
            }
            on_y += usize::from(hits);
            plus.push(p);
        }
        let minus: Vec<_> = cells
            .iter()
            .filter(|p| !plus.contains(p))
            .take(k)
            .copied()
            .collect();
        let unit =
            |arcs: &[(usize, usize)]| lin(&arcs.iter().map(|&p| (p, 1)).collect::<Vec<_>>(), 0);
        out.push(Lemma1Case {
            y,
            plus: unit(&plus),
            minus: unit(&minus),
        });
    }
    Ok(out)
}

/// Constructs and verifies a witness for each case by full enumeration.
/// Cases outside the preconditions are skipped.
pub fn lemma1_check_cases(cases: &[Lemma1Case]) -> AuditReport {
    let mut skipped = Vec::new();
    let mut records = Vec::new();
    let mut failures = 0usize;
    for (k, case) in cases.iter().enumerate() {
        if let Err(e) = lemma1_preconditions(&case.plus, &case.minus, &case.y) {
            skipped.push(json!({ "case": k, "reason": e.to_string() }));
            continue;
        }
        let (ok, record) = match lemma1_witness(&case.plus, &case.minus, &case.y) {
            Ok(c) => check_lemma1_witness(case, &c),
            Err(e) => (false, json!({ "error": e.to_string() })),
        };
        failures += usize::from(!ok);
        records.push(json!({
            "case": k,
            "y": tour_json(&case.y),
            "plus": case.plus.to_string(),
            "minus": case.minus.to_string(),
            "ok": ok,
            "check": record,
        }));
    }
    let checked = records.len();
    let items = vec![
        CheckItem::new(
            "preconditions",
            format!("{checked} of {} cases meet the preconditions", cases.len()),
            true,
            json!({ "checked": checked, "skipped": skipped }),
        ),
        CheckItem::new(
            "witnesses",
            format!(
                "{}/{checked} witnesses confirmed by enumeration",
                checked - failures
            ),
            failures == 0,
            json!({ "passed": checked - failures, "failed": failures, "cases": records }),
        ),
    ];
    AuditReport::new("witness construction property suite", items)
}

fn check_lemma1_witness(case: &Lemma1Case, c: &CostMatrix) -> (bool, Value) {
    let form = &case.plus - &case.minus;
    let Ok(value) = form.eval(c) else {
        return (false, json!({ "error": "form touches an infinite cell" }));
    };
    let Ok(lengths) = tour_lengths(c) else {
        return (false, json!({ "error": "enumeration failed" }));
    };
    let own = lengths.iter().find(|(t, _)| *t == case.y).map(|(_, l)| *l);
    let runner_up = lengths
        .iter()
        .filter(|(t, _)| *t != case.y)
        .map(|(_, l)| *l)
        .min();
    let unique = matches!((own, runner_up), (Some(a), Some(b)) if a < b);
    (
        value >= 1 && unique,
        json!({
            "witness": matrix_json(c),
            "form_value": value,
            "y_value": own.and_then(|l| l.finite()),
            "runner_up": runner_up.and_then(|l| l.finite()),
        }),
    )
}

pub fn lemma1_property_suite(seed: u64, cases: usize, n: usize) -> Result<AuditReport> {
    let generated = generate_lemma1_cases(seed, cases, n)?;
    let mut report = lemma1_check_cases(&generated);
    report.title = format!("witness construction property suite (n = {n}, seed = {seed})");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transcription_is_consistent() {
        let fx = Section4Fixture::transcribed();
        assert_eq!(
            fx.cases[0].tour,
            Tour::from_cycle(&[1, 4, 2, 5, 3]).unwrap()
        );
        assert_eq!(
            fx.cases[2].dominator,
            Tour::from_cycle(&[1, 3, 5, 4, 2]).unwrap()
        );
        let f = Section5Fixture::transcribed();
        assert_eq!(f.leaf, Tour::from_cycle(&[1, 2, 3, 4]).unwrap());
        assert_eq!(f.y, Tour::from_cycle(&[1, 4, 2, 3]).unwrap());
    }

    #[test]
    fn node_audit_passes() {
        let r = verify_section4();
        assert!(r.passed(), "{}", r.summary());
        assert_eq!(r.item("f").unwrap().evidence["min"], json!(2));
    }

    #[test]
    fn node_audit_catches_mutation() {
        let mut fx = Section4Fixture::transcribed();
        fx.cases[0].matrix.set(4, 1, 0.into());
        let r = verify_section4_with(&fx);
        assert!(!r.item("b:x").unwrap().passed());
        assert!(!r.passed());

        let mut fx = Section4Fixture::transcribed();
        fx.cases[0].dominator = fx.cases[0].tour.clone();
        let r = verify_section4_with(&fx);
        assert!(!r.item("d:x").unwrap().passed());
    }

    #[test]
    fn chain_audit_passes() {
        let r = verify_section5();
        assert!(r.passed(), "{}", r.summary());
        assert_eq!(r.chain_verdict, Some(ChainVerdict::Violates));
        assert_eq!(r.adjacent, Some(true));
    }

    #[test]
    fn chain_audit_flags_leaf_query() {
        let mut fx = Section5Fixture::transcribed();
        fx.y = fx.leaf.clone();
        let r = verify_section5_with(&fx);
        assert_eq!(r.chain_verdict, Some(ChainVerdict::Degenerate));
        assert!(!r.passed());
    }

    #[test]
    fn chain_audit_sees_changed_input() {
        let mut fx = Section5Fixture::transcribed();
        fx.c.set(1, 3, 1.into());
        let r = verify_section5_with(&fx);
        assert!(
            r.failed_items().any(|i| i.id.starts_with("a:")),
            "{}",
            r.summary()
        );
    }

    #[test]
    fn property_suite_skips_bad_cases() {
        let y = Tour::from_cycle(&[1, 4, 2, 3]).unwrap();
        let cases = vec![
            Lemma1Case {
                y: y.clone(),
                plus: v(3, 1),
                minus: v(3, 4),
            },
            Lemma1Case {
                y: y.clone(),
                plus: &(&v(1, 4) + &v(4, 2)) + &v(2, 3),
                minus: &(&v(1, 2) + &v(1, 3)) + &v(2, 1),
            },
            Lemma1Case {
                y,
                plus: v(1, 2),
                minus: v(1, 2),
            },
        ];
        let r = lemma1_check_cases(&cases);
        assert!(r.passed());
        assert_eq!(
            r.item("preconditions").unwrap().evidence["skipped"]
                .as_array()
                .unwrap()
                .len(),
            2
        );
        assert_eq!(r.item("witnesses").unwrap().evidence["passed"], json!(1));
    }

    #[test]
    fn generated_cases_meet_preconditions() {
        for n in 4..=6 {
            for case in generate_lemma1_cases(7, 50, n).unwrap() {
                lemma1_preconditions(&case.plus, &case.minus, &case.y).unwrap();
            }
        }
        assert!(generate_lemma1_cases(1, 1, 7).is_err());
        assert_eq!(
            generate_lemma1_cases(3, 20, 5).unwrap(),
            generate_lemma1_cases(3, 20, 5).unwrap()
        );
    }

    #[test]
    fn report_json_round_trips() {
        let r = lemma1_property_suite(1, 5, 4).unwrap();
        let back: AuditReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
