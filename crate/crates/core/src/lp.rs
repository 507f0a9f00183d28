//! Dense two-phase simplex over exact rationals.
//!
//! Bland's rule for both entering and leaving variables, so the method
//! terminates without cycling. Sizes here are at most a few hundred rows and
//! columns; no attempt is made at sparsity.

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<(usize, Rational)>,
    cmp: Cmp,
    rhs: Rational,
}

/// `optimize objective · x  s.t.  rows`, each variable either `≥ 0` or free.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    free: Vec<bool>,
    rows: Vec<Row>,
    objective: Vec<(usize, Rational)>,
    sense: Sense,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

impl LinearProgram {
    /// `vars` variables, all nonnegative; the objective starts at zero.
    pub fn new(vars: usize) -> Self {
        LinearProgram {
            free: vec![false; vars],
            rows: Vec::new(),
            objective: Vec::new(),
            sense: Sense::Minimize,
        }
    }

    pub fn with_free_vars(vars: usize) -> Self {
        LinearProgram {
            free: vec![true; vars],
            ..Self::new(vars)
        }
    }

    pub fn vars(&self) -> usize {
        self.free.len()
    }

    pub fn set_free(&mut self, var: usize, free: bool) {
        self.free[var] = free;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, Rational)>, cmp: Cmp, rhs: Rational) {
        assert!(
            coeffs.iter().all(|(v, _)| *v < self.vars()),
            "variable out of range"
        );
        self.rows.push(Row { coeffs, cmp, rhs });
    }

    pub fn set_objective(&mut self, sense: Sense, coeffs: Vec<(usize, Rational)>) {
        self.sense = sense;
        self.objective = coeffs;
    }

    pub fn solve(&self) -> LpOutcome {
        // Column layout: original vars (free ones split into + and −), then
        // slack/surplus columns, then artificials.
        let mut col_of = Vec::with_capacity(self.vars());
        let mut ncols = 0;
        for &f in &self.free {
            col_of.push(ncols);
            ncols += if f { 2 } else { 1 };
        }
        let structural = ncols;
        let slack_count = self.rows.iter().filter(|r| r.cmp != Cmp::Eq).count();
        let first_artificial = structural + slack_count;

        // Normalize every row to a nonnegative right-hand side.
        let mut rows: Vec<(Vec<Rational>, Cmp, Rational)> = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let mut dense = vec![Rational::zero(); structural];
            for (v, c) in &r.coeffs {
                dense[col_of[*v]] += c;
                if self.free[*v] {
                    dense[col_of[*v] + 1] -= c;
                }
            }
            let (dense, cmp, rhs) = if r.rhs.is_negative() {
                let flipped = match r.cmp {
                    Cmp::Le => Cmp::Ge,
                    Cmp::Ge => Cmp::Le,
                    Cmp::Eq => Cmp::Eq,
                };
                (
                    dense.into_iter().map(|c| -c).collect(),
                    flipped,
                    -r.rhs.clone(),
                )
            } else {
                (dense, r.cmp, r.rhs.clone())
            };
            rows.push((dense, cmp, rhs));
        }
        let artificial_count = rows.iter().filter(|(_, c, _)| *c != Cmp::Le).count();
        let total = first_artificial + artificial_count;

        let mut t = Tableau {
            a: Vec::with_capacity(rows.len()),
            basis: Vec::with_capacity(rows.len()),
            cols: total,
        };
        let (mut s, mut art) = (structural, first_artificial);
        for (dense, cmp, rhs) in rows {
            let mut line = dense;
            line.resize(total + 1, Rational::zero());
            match cmp {
                Cmp::Le => {
                    line[s] = Rational::one();
                    t.basis.push(s);
                    s += 1;
                }
                Cmp::Ge => {
                    line[s] = -Rational::one();
                    s += 1;
                    line[art] = Rational::one();
                    t.basis.push(art);
                    art += 1;
                }
                Cmp::Eq => {
                    line[art] = Rational::one();
                    t.basis.push(art);
                    art += 1;
                }
            }
            line[total] = rhs;
            t.a.push(line);
        }

        // Phase 1: minimize the sum of artificials.
        if artificial_count > 0 {
            let mut cost = vec![Rational::zero(); total];
            for c in cost.iter_mut().skip(first_artificial) {
                *c = Rational::one();
            }
            if t.minimize(&cost, total) == Phase::Unbounded {
                unreachable!("phase one is bounded below by zero");
            }
            let infeasibility: Rational = t
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b >= first_artificial)
                .map(|(r, _)| t.a[r][total].clone())
                .sum();
            if infeasibility.is_positive() {
                return LpOutcome::Infeasible;
            }
            t.drive_out_artificials(first_artificial);
        }

        // Phase 2 over structural and slack columns only.
        let mut cost = vec![Rational::zero(); total];
        for (v, c) in &self.objective {
            let c = match self.sense {
                Sense::Minimize => c.clone(),
                Sense::Maximize => -c.clone(),
            };
            cost[col_of[*v]] += &c;
            if self.free[*v] {
                cost[col_of[*v] + 1] -= &c;
            }
        }
        if t.minimize(&cost, first_artificial) == Phase::Unbounded {
            return LpOutcome::Unbounded;
        }

        let mut col_values = vec![Rational::zero(); total];
        for (r, &b) in t.basis.iter().enumerate() {
            col_values[b] = t.a[r][total].clone();
        }
        let x: Vec<Rational> = (0..self.vars())
            .map(|v| {
                let c = col_of[v];
                if self.free[v] {
                    &col_values[c] - &col_values[c + 1]
                } else {
                    col_values[c].clone()
                }
            })
            .collect();
        let value = self.objective.iter().map(|(v, c)| c * &x[*v]).sum();
        LpOutcome::Optimal { x, value }
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Phase {
    Optimal,
    Unbounded,
}

struct Tableau {
    /// Rows of `[A | b]` in canonical form for `basis`.
    a: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let rhs = self.cols;
        let p = self.a[row][col].clone();
        for v in self.a[row].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        let pivot_row = self.a[row].clone();
        for (r, line) in self.a.iter_mut().enumerate() {
            if r == row || line[col].is_zero() {
                continue;
            }
            let f = line[col].clone();
            for (k, pv) in pivot_row.iter().enumerate().take(rhs + 1) {
                if !pv.is_zero() {
                    line[k] -= &f * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Minimizes `cost · x` using only columns `< allowed` as entering
    /// candidates.
    fn minimize(&mut self, cost: &[Rational], allowed: usize) -> Phase {
        let rhs = self.cols;
        loop {
            // Reduced cost of column j: c_j − Σ_r c_{basis[r]} a[r][j].
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut d = cost[j].clone();
                for (r, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.a[r][j].is_zero() {
                        d -= &cost[b] * &self.a[r][j];
                    }
                }
                d.is_negative()
            });
            let Some(col) = entering else {
                return Phase::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.a.len() {
                if !self.a[r][col].is_positive() {
                    continue;
                }
                let ratio = &self.a[r][rhs] / &self.a[r][col];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return Phase::Unbounded,
            }
        }
    }

    /// After a feasible phase one, pivots zero-level artificials out of the
    /// basis, dropping rows that turn out to be redundant.
    fn drive_out_artificials(&mut self, first_artificial: usize) {
        let mut r = 0;
        while r < self.a.len() {
            if self.basis[r] < first_artificial {
                r += 1;
                continue;
            }
            match (0..first_artificial).find(|&j| !self.a[r][j].is_zero()) {
                Some(col) => {
                    self.pivot(r, col);
                    r += 1;
                }
                None => {
                    self.a.remove(r);
                    self.basis.remove(r);
                }
            }
        }
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| {
        let d = v.denom();
        let g = num::integer::gcd(acc.clone(), d.clone());
        acc / g * d
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.add_constraint(vec![(0, rat(1))], Cmp::Le, rat(4));
        lp.add_constraint(vec![(1, rat(2))], Cmp::Le, rat(12));
        lp.add_constraint(vec![(0, rat(3)), (1, rat(2))], Cmp::Le, rat(18));
        lp.set_objective(Sense::Maximize, vec![(0, rat(3)), (1, rat(5))]);
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                x: vec![rat(2), rat(6)],
                value: rat(36)
            }
        );
    }

    #[test]
    fn fractional_optimum_is_exact() {
        // min x + y, 3x + y ≥ 2, x + 3y ≥ 2 → (1/2, 1/2)
        let mut lp = LinearProgram::new(2);
        lp.add_constraint(vec![(0, rat(3)), (1, rat(1))], Cmp::Ge, rat(2));
        lp.add_constraint(vec![(0, rat(1)), (1, rat(3))], Cmp::Ge, rat(2));
        lp.set_objective(Sense::Minimize, vec![(0, rat(1)), (1, rat(1))]);
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(x, vec![r(1, 2), r(1, 2)]);
                assert_eq!(value, rat(1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add_constraint(vec![(0, rat(1))], Cmp::Ge, rat(2));
        lp.add_constraint(vec![(0, rat(1))], Cmp::Le, rat(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(1);
        lp.add_constraint(vec![(0, rat(1))], Cmp::Ge, rat(2));
        lp.set_objective(Sense::Maximize, vec![(0, rat(1))]);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variables_go_negative() {
        // min x, x ≥ −5 with x free
        let mut lp = LinearProgram::with_free_vars(1);
        lp.add_constraint(vec![(0, rat(1))], Cmp::Ge, rat(-5));
        lp.set_objective(Sense::Minimize, vec![(0, rat(1))]);
        match lp.solve() {
            LpOutcome::Optimal { x, .. } => assert_eq!(x[0], rat(-5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.add_constraint(vec![(0, rat(1)), (1, rat(1))], Cmp::Eq, rat(1));
        lp.add_constraint(vec![(0, rat(2)), (1, rat(2))], Cmp::Eq, rat(2));
        lp.set_objective(Sense::Minimize, vec![(0, rat(1))]);
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, rat(0));
                assert_eq!(x, vec![rat(0), rat(1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::new(4);
        lp.add_constraint(
            vec![(0, r(1, 4)), (1, rat(-60)), (2, r(-1, 25)), (3, rat(9))],
            Cmp::Le,
            rat(0),
        );
        lp.add_constraint(
            vec![(0, r(1, 2)), (1, rat(-90)), (2, r(-1, 50)), (3, rat(3))],
            Cmp::Le,
            rat(0),
        );
        lp.add_constraint(vec![(2, rat(1))], Cmp::Le, rat(1));
        lp.set_objective(
            Sense::Minimize,
            vec![(0, r(-3, 4)), (1, rat(150)), (2, r(-1, 50)), (3, rat(6))],
        );
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(-1, 20)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lcm_of_denominators() {
        assert_eq!(
            common_denominator(&[r(1, 4), r(5, 6), rat(3)]),
            BigInt::from(12)
        );
    }
}
