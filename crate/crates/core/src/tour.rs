//! Hamiltonian circuits of the complete digraph on `1..=n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A directed Hamiltonian cycle.
///
/// Stored as the visiting order rotated to start at vertex 1 (orientation is
/// kept), plus the successor table. The derived ordering is lexicographic on
/// that visiting order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct Tour {
    order: Vec<usize>,
    succ: Vec<usize>,
}

impl Tour {
    /// Builds a tour from a visiting order such as `[1, 4, 2, 3]`; any rotation
    /// is accepted.
    pub fn from_cycle(cycle: &[usize]) -> Result<Self> {
        let n = cycle.len();
        if n < 2 {
            return Err(Error::InvalidTour(format!("{n} vertices")));
        }
        let mut seen = vec![false; n + 1];
        for &v in cycle {
            if !(1..=n).contains(&v) || seen[v] {
                return Err(Error::InvalidTour(format!(
                    "{cycle:?} is not a permutation of 1..={n}"
                )));
            }
            seen[v] = true;
        }
        let start = cycle.iter().position(|&v| v == 1).expect("1 is present");
        let order: Vec<usize> = cycle[start..]
            .iter()
            .chain(&cycle[..start])
            .copied()
            .collect();
        let mut succ = vec![0; n + 1];
        for k in 0..n {
            succ[order[k]] = order[(k + 1) % n];
        }
        Ok(Tour { order, succ })
    }

    /// Builds a tour from its `n` arcs, in any order.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        if arcs.len() != n {
            return Err(Error::InvalidTour(format!(
                "expected {n} arcs, found {}",
                arcs.len()
            )));
        }
        let mut succ = vec![0usize; n + 1];
        for &(i, j) in arcs {
            if !(1..=n).contains(&i) || !(1..=n).contains(&j) || i == j {
                return Err(Error::InvalidTour(format!("bad arc ({i},{j})")));
            }
            if succ[i] != 0 {
                return Err(Error::InvalidTour(format!("vertex {i} has out-degree 2")));
            }
            succ[i] = j;
        }
        let mut order = Vec::with_capacity(n);
        let mut v = 1;
        for _ in 0..n {
            order.push(v);
            v = succ[v];
        }
        if v != 1 {
            return Err(Error::InvalidTour("arcs do not close a cycle".into()));
        }
        Self::from_cycle(&order).map_err(|_| Error::InvalidTour("arcs split into subcycles".into()))
    }

    /// Builds a tour from a row-major 0/1 characteristic vector of length `n²`.
    pub fn from_chi(n: usize, chi: &[u8]) -> Result<Self> {
        if chi.len() != n * n {
            return Err(Error::InvalidTour(format!(
                "characteristic vector has length {}, expected {}",
                chi.len(),
                n * n
            )));
        }
        let mut arcs = Vec::new();
        for (k, &b) in chi.iter().enumerate() {
            match b {
                0 => {}
                1 => arcs.push((k / n + 1, k % n + 1)),
                _ => return Err(Error::InvalidTour(format!("entry {b} is not 0/1"))),
            }
        }
        Self::from_arcs(n, &arcs)
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Visiting order starting at vertex 1.
    pub fn cycle(&self) -> &[usize] {
        &self.order
    }

    pub fn successor(&self, v: usize) -> usize {
        self.succ[v]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i >= 1 && i < self.succ.len() && self.succ[i] == j
    }

    /// Arcs sorted by tail vertex.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (1..=self.n()).map(|i| (i, self.succ[i])).collect()
    }

    /// Row-major 0/1 characteristic vector of length `n²`.
    pub fn chi(&self) -> Vec<u8> {
        let n = self.n();
        let mut chi = vec![0; n * n];
        for i in 1..=n {
            chi[(i - 1) * n + self.succ[i] - 1] = 1;
        }
        chi
    }

    /// Number of shared arcs, `⟨chi(self), chi(other)⟩`.
    pub fn common_arcs(&self, other: &Tour) -> usize {
        (1..=self.n().min(other.n()))
            .filter(|&i| self.succ[i] == other.succ[i])
            .count()
    }

    /// Parses cycle notation `"1 2 3 4"` (whitespace or comma separated).
    pub fn parse(text: &str) -> Result<Self> {
        let cycle = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidTour(format!("bad vertex {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_cycle(&cycle)
    }
}

impl From<Tour> for Vec<usize> {
    fn from(t: Tour) -> Self {
        t.order
    }
}

impl TryFrom<Vec<usize>> for Tour {
    type Error = Error;
    fn try_from(cycle: Vec<usize>) -> Result<Self> {
        Tour::from_cycle(&cycle)
    }
}

impl fmt::Display for Tour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.order {
            write!(f, "{v}→")?;
        }
        write!(f, "{}", self.order[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations_are_canonicalized() {
        let a = Tour::from_cycle(&[3, 1, 4, 2]).unwrap();
        assert_eq!(a.cycle(), &[1, 4, 2, 3]);
        assert_eq!(a.arcs(), vec![(1, 4), (2, 3), (3, 1), (4, 2)]);
        assert_eq!(a.to_string(), "1→4→2→3→1");
    }

    #[test]
    fn orientation_matters() {
        let a = Tour::from_cycle(&[1, 2, 3]).unwrap();
        let b = Tour::from_cycle(&[1, 3, 2]).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn arcs_and_chi_agree() {
        let t = Tour::from_arcs(4, &[(4, 2), (1, 4), (3, 1), (2, 3)]).unwrap();
        let chi = t.chi();
        for i in 1..=4 {
            for j in 1..=4 {
                assert_eq!(chi[(i - 1) * 4 + j - 1] == 1, t.contains(i, j));
            }
        }
        assert_eq!(Tour::from_chi(4, &chi).unwrap(), t);
    }

    #[test]
    fn rejects_subcycles_and_bad_degrees() {
        assert!(Tour::from_arcs(4, &[(1, 2), (2, 1), (3, 4), (4, 3)]).is_err());
        assert!(Tour::from_arcs(3, &[(1, 2), (1, 3), (3, 1)]).is_err());
        assert!(Tour::from_arcs(3, &[(1, 1), (2, 3), (3, 2)]).is_err());
        assert!(Tour::from_cycle(&[1, 2, 2]).is_err());
        assert!(Tour::parse("1 2 x").is_err());
    }
}
