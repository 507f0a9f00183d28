//! Square matrices over live row/column index sets, and the matrix file formats.
//!
//! Indices are vertex labels `1..=n`. Deleting a row or column only shrinks
//! the live set; storage stays `n × n`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cost::{CostValue, MAX_INPUT_COST};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid<T> {
    n: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    cells: Vec<T>,
}

impl<T: Clone> Grid<T> {
    /// Full `n × n` grid with every row and column live.
    pub fn filled(n: usize, value: T) -> Self {
        Grid {
            n,
            rows: (1..=n).collect(),
            cols: (1..=n).collect(),
            cells: vec![value; n * n],
        }
    }

    pub fn map<U, F: FnMut(usize, usize, &T) -> U>(&self, mut f: F) -> Grid<U> {
        let mut cells = Vec::with_capacity(self.cells.len());
        for i in 1..=self.n {
            for j in 1..=self.n {
                cells.push(f(i, j, &self.cells[(i - 1) * self.n + (j - 1)]));
            }
        }
        Grid {
            n: self.n,
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            cells,
        }
    }
}

impl<T> Grid<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Live row indices `I(M)`, ascending.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// Live column indices `J(M)`, ascending.
    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.n && self.cols.len() == self.n
    }

    pub fn is_live(&self, i: usize, j: usize) -> bool {
        self.rows.binary_search(&i).is_ok() && self.cols.binary_search(&j).is_ok()
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        assert!(
            (1..=self.n).contains(&i) && (1..=self.n).contains(&j),
            "index ({i},{j}) outside 1..={}",
            self.n
        );
        (i - 1) * self.n + (j - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.cells[self.offset(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        let k = self.offset(i, j);
        self.cells[k] = value;
    }

    pub fn remove_row(&mut self, i: usize) {
        self.rows.retain(|&r| r != i);
    }

    pub fn remove_col(&mut self, j: usize) {
        self.cols.retain(|&c| c != j);
    }
}

/// Arc lengths `c_ij`; diagonal cells are always infinite.
pub type CostMatrix = Grid<CostValue>;

#[derive(Serialize, Deserialize)]
struct StructuredMatrix {
    n: usize,
    cells: Vec<Vec<Option<i64>>>,
}

impl CostMatrix {
    /// Builds a full matrix from row-major entries; `None` is infinite and the
    /// diagonal is forced to infinity whatever the input holds there.
    pub fn from_options(rows: &[Vec<Option<i64>>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Grid::filled(n, CostValue::Infinite);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if r == c {
                    continue;
                }
                if let Some(v) = v {
                    if v.abs() > MAX_INPUT_COST {
                        return Err(Error::Overflow);
                    }
                    m.set(r + 1, c + 1, CostValue::Finite(v));
                }
            }
        }
        Ok(m)
    }

    /// Full matrix from finite entries; diagonal values are ignored.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let rows: Vec<Vec<Option<i64>>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Some(v)).collect())
            .collect();
        Self::from_options(&rows)
    }

    pub fn cost(&self, i: usize, j: usize) -> CostValue {
        *self.get(i, j)
    }

    /// Parses either the plain text format or the structured (JSON) format,
    /// chosen by the first non-blank character.
    pub fn parse(input: &str) -> Result<Self> {
        if input.trim_start().starts_with('{') {
            Self::parse_structured(input)
        } else {
            Self::parse_text(input)
        }
    }

    /// First line `n`, then `n` rows of `n` entries. `inf` or `-` is infinite.
    pub fn parse_text(input: &str) -> Result<Self> {
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, head) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let n: usize = head.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected vertex count, found {head:?}"),
        })?;
        let mut rows = Vec::with_capacity(n);
        for r in 0..n {
            let (line, text) = lines.next().ok_or(Error::Parse {
                line: line + r + 1,
                msg: format!("expected {n} rows, found {r}"),
            })?;
            let row = text
                .split_whitespace()
                .map(|tok| parse_entry(tok, line))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {n} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                msg: "trailing content after matrix".into(),
            });
        }
        Self::from_options(&rows)
    }

    pub fn parse_structured(input: &str) -> Result<Self> {
        let s: StructuredMatrix = serde_json::from_str(input)?;
        if s.cells.len() != s.n {
            return Err(Error::DimensionMismatch {
                expected: s.n,
                found: s.cells.len(),
            });
        }
        Self::from_options(&s.cells)
    }

    /// Canonical text form: `-` on the diagonal, `inf` elsewhere when infinite.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n());
        for i in 1..=self.n() {
            let row: Vec<String> = (1..=self.n())
                .map(|j| match self.cost(i, j) {
                    _ if i == j => "-".to_string(),
                    v => v.to_string(),
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn to_structured(&self) -> String {
        let cells = (1..=self.n())
            .map(|i| (1..=self.n()).map(|j| self.cost(i, j).finite()).collect())
            .collect();
        serde_json::to_string(&StructuredMatrix { n: self.n(), cells }).expect("matrix serializes")
    }

    /// SHA-256 of the canonical text form, hex encoded.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

fn parse_entry(tok: &str, line: usize) -> Result<Option<i64>> {
    match tok {
        "inf" | "-" | "∞" => Ok(None),
        _ => tok.parse::<i64>().map(Some).map_err(|_| Error::Parse {
            line,
            msg: format!("bad entry {tok:?}"),
        }),
    }
}
