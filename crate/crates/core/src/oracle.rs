//! Brute-force ground truth: the full tour set and exact lengths.

use crate::cost::CostValue;
use crate::error::{Error, Result};
use crate::matrix::CostMatrix;
use crate::tour::Tour;

pub const MIN_ENUM_N: usize = 3;
pub const MAX_ENUM_N: usize = 8;

/// All `(n−1)!` tours, lexicographic by the visiting order from vertex 1.
pub fn enumerate_tours(n: usize) -> Result<Vec<Tour>> {
    if !(MIN_ENUM_N..=MAX_ENUM_N).contains(&n) {
        return Err(Error::UnsupportedSize {
            what: "tour enumeration",
            n,
            min: MIN_ENUM_N,
            max: MAX_ENUM_N,
        });
    }
    let mut tail: Vec<usize> = (2..=n).collect();
    let mut out = Vec::new();
    loop {
        let mut cycle = Vec::with_capacity(n);
        cycle.push(1);
        cycle.extend_from_slice(&tail);
        out.push(Tour::from_cycle(&cycle).expect("permutation of 1..=n"));
        if !next_permutation(&mut tail) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = a.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = a
        .iter()
        .rposition(|&x| x > a[i])
        .expect("pivot has a successor");
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

/// `Σ_{(i,j) ∈ t} c_ij`; infinite if any arc is.
pub fn tour_length(t: &Tour, c: &CostMatrix) -> Result<CostValue> {
    if t.n() != c.n() {
        return Err(Error::DimensionMismatch {
            expected: c.n(),
            found: t.n(),
        });
    }
    t.arcs()
        .into_iter()
        .try_fold(CostValue::ZERO, |acc, (i, j)| acc.checked_add(c.cost(i, j)))
}

/// Every tour with its length, in canonical order.
pub fn tour_lengths(c: &CostMatrix) -> Result<Vec<(Tour, CostValue)>> {
    enumerate_tours(c.n())?
        .into_iter()
        .map(|t| {
            let len = tour_length(&t, c)?;
            Ok((t, len))
        })
        .collect()
}

/// The minimum length over all tours.
pub fn optimum_value(c: &CostMatrix) -> Result<CostValue> {
    Ok(tour_lengths(c)?
        .into_iter()
        .map(|(_, l)| l)
        .min()
        .expect("at least two tours"))
}

/// The length-minimizing tour when it is the only one attaining the minimum.
pub fn unique_optimum(c: &CostMatrix) -> Result<Option<Tour>> {
    let all = tour_lengths(c)?;
    let best = all.iter().map(|(_, l)| *l).min().expect("nonempty");
    if best.is_infinite() {
        return Ok(None);
    }
    let mut winners = all.into_iter().filter(|(_, l)| *l == best);
    let first = winners.next().map(|(t, _)| t);
    Ok(if winners.next().is_some() {
        None
    } else {
        first
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c_star() -> CostMatrix {
        CostMatrix::parse("4\n- 0 2 1\n2 - 0 2\n1 2 - 0\n0 1 2 -\n").unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_tours(3).unwrap().len(), 2);
        assert_eq!(enumerate_tours(4).unwrap().len(), 6);
        assert_eq!(enumerate_tours(5).unwrap().len(), 24);
        assert_eq!(enumerate_tours(8).unwrap().len(), 5040);
        assert!(enumerate_tours(2).is_err());
        assert!(enumerate_tours(9).is_err());
    }

    #[test]
    fn canonical_order() {
        let tours = enumerate_tours(4).unwrap();
        let cycles: Vec<_> = tours.iter().map(|t| t.cycle().to_vec()).collect();
        assert_eq!(cycles[0], vec![1, 2, 3, 4]);
        assert_eq!(cycles[5], vec![1, 4, 3, 2]);
        let mut sorted = tours.clone();
        sorted.sort();
        assert_eq!(sorted, tours);
    }

    #[test]
    fn lengths_on_c_star() {
        let c = c_star();
        let x = Tour::from_arcs(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        let y = Tour::from_arcs(4, &[(1, 4), (4, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(tour_length(&x, &c).unwrap(), CostValue::Finite(0));
        assert_eq!(tour_length(&y, &c).unwrap(), CostValue::Finite(3));
        assert_eq!(unique_optimum(&c).unwrap(), Some(x.clone()));

        let mut blocked = c.clone();
        blocked.set(3, 4, CostValue::Infinite);
        assert_eq!(tour_length(&x, &blocked).unwrap(), CostValue::Infinite);
    }

    #[test]
    fn ties_have_no_unique_optimum() {
        let zero = CostMatrix::from_rows(&vec![vec![0; 5]; 5]).unwrap();
        assert_eq!(unique_optimum(&zero).unwrap(), None);
    }

    #[test]
    fn dimension_mismatch() {
        let t = Tour::from_cycle(&[1, 2, 3]).unwrap();
        assert!(tour_length(&t, &c_star()).is_err());
    }
}
