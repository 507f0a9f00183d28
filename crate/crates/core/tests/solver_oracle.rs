mod common;

use bnb_tsp::oracle::{optimum_value, tour_length, unique_optimum};
use bnb_tsp::solver::{reduce, solve};
use bnb_tsp::{branch_bound, CostMatrix, CostValue};
use common::{random_matrix, random_sparse_matrix, rng};
use rand::Rng;

#[test]
fn optimum_matches_enumeration() {
    let mut r = rng(11);
    for n in 3..=7 {
        for _ in 0..40 {
            let c = random_matrix(&mut r, n, 99);
            let s = branch_bound(&c).unwrap();
            assert_eq!(
                CostValue::Finite(s.length),
                optimum_value(&c).unwrap(),
                "{}",
                c.to_text()
            );
            assert_eq!(
                tour_length(&s.tour, &c).unwrap(),
                CostValue::Finite(s.length)
            );
        }
    }
}

#[test]
fn ties_and_small_ranges() {
    let mut r = rng(12);
    for n in 3..=6 {
        for _ in 0..60 {
            let c = random_matrix(&mut r, n, 2);
            let s = branch_bound(&c).unwrap();
            assert_eq!(
                CostValue::Finite(s.length),
                optimum_value(&c).unwrap(),
                "{}",
                c.to_text()
            );
        }
    }
}

#[test]
fn forbidden_arcs() {
    let mut r = rng(13);
    let mut solved = 0;
    for n in 3..=6 {
        for _ in 0..60 {
            let c = random_sparse_matrix(&mut r, n, 20, 0.3);
            match optimum_value(&c).unwrap() {
                CostValue::Infinite => assert!(branch_bound(&c).is_err()),
                opt => {
                    solved += 1;
                    assert_eq!(CostValue::Finite(branch_bound(&c).unwrap().length), opt);
                }
            }
        }
    }
    assert!(solved > 50);
}

#[test]
fn symbolic_and_concrete_runs_agree() {
    let mut r = rng(14);
    for n in 3..=7 {
        for _ in 0..25 {
            let c = random_matrix(&mut r, n, 50);
            let traced = branch_bound(&c).unwrap();
            let (tour, length) = solve(&c).unwrap();
            assert_eq!((traced.tour.clone(), traced.length), (tour, length));
            assert_eq!(traced.length_form.eval(&c).unwrap(), length);
        }
    }
}

#[test]
fn unique_optimum_is_the_leaf() {
    let mut r = rng(15);
    let mut checked = 0;
    for n in 3..=6 {
        for _ in 0..40 {
            let c = random_matrix(&mut r, n, 1000);
            if let Some(t) = unique_optimum(&c).unwrap() {
                assert_eq!(branch_bound(&c).unwrap().trace.leaf, t);
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn reduction_bound_is_valid_and_shift_invariant() {
    let mut r = rng(16);
    for n in 3..=6 {
        for _ in 0..30 {
            let c = random_matrix(&mut r, n, 60);
            let mut m = c.clone();
            let mut sum = CostValue::ZERO;
            reduce(&mut m, &mut sum, &mut ()).unwrap();
            assert!(sum <= optimum_value(&c).unwrap());

            // adding k to every arc out of one vertex shifts every tour by k
            let (i, k) = (r.gen_range(1..=n), 17);
            let mut shifted = c.clone();
            for j in (1..=n).filter(|&j| j != i) {
                shifted.set(i, j, c.cost(i, j).checked_add(k.into()).unwrap());
            }
            let (a, b) = (branch_bound(&c).unwrap(), branch_bound(&shifted).unwrap());
            assert_eq!(b.length, a.length + k);
            let mut m2 = shifted.clone();
            let mut sum2 = CostValue::ZERO;
            reduce(&mut m2, &mut sum2, &mut ()).unwrap();
            assert_eq!(sum2, sum.checked_add(k.into()).unwrap());
            assert_eq!(m2, m);
        }
    }
}

#[test]
fn negative_costs_are_fine() {
    let c = CostMatrix::parse("4\n- -5 3 1\n2 - -7 2\n1 2 - 0\n-3 1 2 -\n").unwrap();
    assert_eq!(
        CostValue::Finite(branch_bound(&c).unwrap().length),
        optimum_value(&c).unwrap()
    );
}
