//! Per-input chains of the linear separating tree traced by the solver.
//!
//! Every comparison the solver makes becomes a [`ComparisonEvent`]: the form
//! `left − right` in the input variables, the relation tested against zero,
//! and the branch taken. Comparisons whose outcome cannot depend on the input
//! (an infinite operand, or a form with no variables) are kept but flagged
//! `trivial`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::AffineForm;
use crate::matrix::CostMatrix;
use crate::tour::Tour;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, value: i64) -> bool {
        match self {
            Relation::Gt => value > 0,
            Relation::Ge => value >= 0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => "≥",
        }
    }
}

/// Which pseudocode line issued a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    /// Row minimum scan in the reduction (`m > M[i,j]`).
    RowMin,
    /// Column minimum scan in the reduction.
    ColMin,
    /// Row minimum excluding the zero's column in arc selection.
    RegretRow,
    /// Column minimum excluding the zero's row in arc selection.
    RegretCol,
    /// `m + k > w` record update in arc selection.
    RegretRecord,
    /// `sum ≥ lopt` pruning test.
    Prune,
    /// `len(H) < lopt` at the three-row base case, stored as `lopt > len(H)`.
    BaseCase,
    /// `M[i,j] = 0` test on a cell that is zero for this input only; stored as
    /// `0 ≥ M[i,j]`, which together with the reduction bounds pins the cell to 0.
    ZeroTest,
}

/// One internal node on the root-to-leaf chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonEvent {
    /// `left − right`; the zero form when an operand is infinite.
    pub form: AffineForm,
    pub relation: Relation,
    /// Whether `form relation 0` held.
    pub outcome: bool,
    pub trivial: bool,
    pub provenance: Provenance,
    pub instance_id: usize,
    pub depth: usize,
}

impl ComparisonEvent {
    /// `sgn d`: `+1` on the taken-true branch, `−1` otherwise.
    pub fn sign(&self) -> i64 {
        if self.outcome {
            1
        } else {
            -1
        }
    }

    /// `⟨B, C⟩ · sgn d` as a form.
    pub fn oriented_form(&self) -> AffineForm {
        self.form.scale(self.sign())
    }

    /// Relation satisfied by [`Self::oriented_form`] against zero: the
    /// negation of `>` is `≥` after flipping sides, and vice versa.
    pub fn oriented_relation(&self) -> Relation {
        match (self.relation, self.outcome) {
            (r, true) => r,
            (Relation::Gt, false) => Relation::Ge,
            (Relation::Ge, false) => Relation::Gt,
        }
    }

    /// Whether the recorded outcome is reproduced at `c`.
    pub fn replays(&self, c: &CostMatrix) -> Result<bool> {
        Ok(self.relation.holds(self.form.eval(c)?) == self.outcome)
    }
}

impl fmt::Display for ComparisonEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}:{:?}] {} {} 0 → {}",
            self.instance_id,
            self.provenance,
            self.form,
            self.relation.symbol(),
            self.outcome
        )?;
        if self.trivial {
            f.write_str(" (trivial)")?;
        }
        Ok(())
    }
}

/// Live submatrix of concrete values, rows × cols, `None` for infinity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSnapshot {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub cells: Vec<Vec<Option<i64>>>,
}

impl MatrixSnapshot {
    pub fn of(m: &CostMatrix) -> Self {
        MatrixSnapshot {
            rows: m.rows().to_vec(),
            cols: m.cols().to_vec(),
            cells: m
                .rows()
                .iter()
                .map(|&i| m.cols().iter().map(|&j| m.cost(i, j).finite()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "arc")]
pub enum Branch {
    Root,
    /// Called with the arc required.
    Include((usize, usize)),
    /// Called with the arc set to infinity.
    Exclude((usize, usize)),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceExit {
    /// Returned at the `sum ≥ lopt` test.
    Pruned,
    /// Ran to the end of the procedure body.
    Completed,
}

/// One call of the branch-and-bound procedure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub branch: Branch,
    pub required: Vec<(usize, usize)>,
    /// The matrix as passed in, before reduction.
    pub input: MatrixSnapshot,
    pub exit: InstanceExit,
}

/// The chain `B₁ d₁ … B_k d_k x` for one input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceChain {
    pub n: usize,
    pub input_fingerprint: String,
    pub leaf: Tour,
    pub instances: Vec<InstanceRecord>,
    pub events: Vec<ComparisonEvent>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceHeader {
    format: String,
    n: usize,
    input_fingerprint: String,
    leaf: Tour,
    event_count: usize,
    instances: Vec<InstanceRecord>,
}

pub const TRACE_FORMAT: &str = "bnb-tsp-trace/1";

impl TraceChain {
    /// Drops trivial events, preserving order.
    pub fn filter_nontrivial(&self) -> TraceChain {
        TraceChain {
            events: self.events.iter().filter(|e| !e.trivial).cloned().collect(),
            ..self.clone()
        }
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = &ComparisonEvent> {
        self.events.iter().filter(|e| !e.trivial)
    }

    /// True iff every nontrivial event reproduces its outcome at `c`.
    /// Fails if `c` has the wrong size or a form touches an infinite cell.
    pub fn replay_check(&self, c: &CostMatrix) -> Result<bool> {
        if c.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: c.n(),
            });
        }
        for e in self.nontrivial() {
            if !e.replays(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Parent of each instance recovered from event `(instance_id, depth)`
    /// pairs alone: the most recent earlier instance one level up. Fails if
    /// the pairs do not describe a call tree entered in id order.
    pub fn call_tree(&self) -> Result<Vec<(usize, Option<usize>)>> {
        let mut out: Vec<(usize, Option<usize>)> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        let mut current: Option<(usize, usize)> = None;
        let mut last_id = 0;
        for e in &self.events {
            if current == Some((e.instance_id, e.depth)) {
                continue;
            }
            let bad = |msg: String| Error::Precondition(format!("malformed call tree: {msg}"));
            if e.instance_id > last_id {
                if e.instance_id != last_id + 1 {
                    return Err(bad(format!("instance {} skipped", last_id + 1)));
                }
                if e.depth > stack.len() {
                    return Err(bad(format!(
                        "instance {} jumps to depth {}",
                        e.instance_id, e.depth
                    )));
                }
                stack.truncate(e.depth);
                out.push((e.instance_id, stack.last().copied()));
                stack.push(e.instance_id);
                last_id = e.instance_id;
            } else if stack.get(e.depth) != Some(&e.instance_id) {
                return Err(bad(format!(
                    "instance {} resumed out of order",
                    e.instance_id
                )));
            } else {
                stack.truncate(e.depth + 1);
            }
            current = Some((e.instance_id, e.depth));
        }
        Ok(out)
    }

    /// Header line followed by one JSON object per event, newline terminated.
    pub fn to_jsonl(&self) -> String {
        let header = TraceHeader {
            format: TRACE_FORMAT.to_string(),
            n: self.n,
            input_fingerprint: self.input_fingerprint.clone(),
            leaf: self.leaf.clone(),
            event_count: self.events.len(),
            instances: self.instances.clone(),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<TraceChain> {
        let mut lines = text.lines().enumerate();
        let (_, head) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty trace".into(),
        })?;
        let header: TraceHeader = serde_json::from_str(head).map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        if header.format != TRACE_FORMAT {
            return Err(Error::Parse {
                line: 1,
                msg: format!("unknown trace format {:?}", header.format),
            });
        }
        let events = lines
            .map(|(k, l)| {
                serde_json::from_str::<ComparisonEvent>(l).map_err(|e| Error::Parse {
                    line: k + 1,
                    msg: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if events.len() != header.event_count {
            return Err(Error::Parse {
                line: events.len() + 1,
                msg: format!(
                    "expected {} events, found {}",
                    header.event_count,
                    events.len()
                ),
            });
        }
        Ok(TraceChain {
            n: header.n,
            input_fingerprint: header.input_fingerprint,
            leaf: header.leaf,
            instances: header.instances,
            events,
        })
    }
}

/// `⟨B⁺, C⟩ − ⟨B⁻, C⟩ (relation) constant` for the oriented comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub plus: AffineForm,
    pub minus: AffineForm,
    /// Right-hand side; the negated constant of the oriented form.
    pub constant: i64,
    pub relation: Relation,
}

impl NormalForm {
    /// 0/1 coefficients, disjoint supports, and `⟨B⁺,1⟩ = ⟨B⁻,1⟩ > 0`.
    pub fn has_balanced_shape(&self) -> bool {
        let unit = |f: &AffineForm| f.terms().all(|(_, c)| c == 1);
        unit(&self.plus)
            && unit(&self.minus)
            && self.plus.support_len() == self.minus.support_len()
            && self.plus.support_len() > 0
    }

    /// Balanced shape with a zero right-hand side.
    pub fn is_canonical(&self) -> bool {
        self.has_balanced_shape() && self.constant == 0
    }

    /// The inequality the chain imposes strictly: `⟨B⁺⟩ − ⟨B⁻⟩ − constant > 0`.
    pub fn strict_form(&self) -> AffineForm {
        &(&self.plus - &self.minus) - &AffineForm::constant(self.constant)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "⟨{}⟩ − ⟨{}⟩ {} {}",
            self.plus,
            self.minus,
            self.relation.symbol(),
            self.constant
        )
    }
}

/// Splits the oriented form of a nontrivial event into positive and negative
/// parts. Supports are disjoint by construction.
pub fn normal_form(e: &ComparisonEvent) -> Result<NormalForm> {
    if e.trivial {
        return Err(Error::Precondition("normal form of a trivial event".into()));
    }
    let f = e.oriented_form();
    Ok(NormalForm {
        plus: f.positive_part(),
        minus: f.negative_part(),
        constant: -f.constant_term(),
        relation: e.oriented_relation(),
    })
}
