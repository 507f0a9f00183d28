//! Acceptance run: one line per criterion, nonzero exit on any failure.
//! Runs with `harness = false`, so `cargo test --test acceptance` prints the
//! table directly.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bnb_tsp::audit::{self, ChainVerdict, Section4Fixture, Section5Fixture};
use bnb_tsp::geometry::{adjacent, compatibility_check};
use bnb_tsp::oracle::{enumerate_tours, optimum_value, tour_lengths};
use bnb_tsp::septree::{normal_form, Provenance};
use bnb_tsp::{branch_bound, AffineForm, CostMatrix, CostValue, TraceChain};
use common::{c_star, random_matrix, rng};
use rand::Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn run(number: usize, name: &str, limit: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut out = body();
    let elapsed = start.elapsed();
    if elapsed > limit {
        out.ok = false;
        out.detail = format!("{}; over the {}s limit", out.detail, limit.as_secs());
    }
    let tag = if out.ok { "PASS" } else { "FAIL" };
    println!(
        "[{tag}] {number} {name}: {} ({:.2}s)",
        out.detail,
        elapsed.as_secs_f64()
    );
    out.ok
}

fn solver_correctness() -> Outcome {
    let mut r = rng(1);
    let mut mismatches = Vec::new();
    let mut count = 0;
    for n in 3..=7 {
        for k in 0..100 {
            let c = random_matrix(&mut r, n, 99);
            count += 1;
            let expected = optimum_value(&c).unwrap().finite();
            let got = branch_bound(&c).map(|s| s.length).ok();
            if got != expected {
                mismatches.push(format!("n={n} #{k}: {got:?} vs {expected:?}"));
            }
        }
    }
    if mismatches.is_empty() {
        pass(format!("{count}/{count} optima match enumeration"))
    } else {
        fail(format!(
            "{} mismatches, first {}",
            mismatches.len(),
            mismatches[0]
        ))
    }
}

fn node_reproduction() -> Outcome {
    let report = audit::verify_section4();
    let ids = ["fixture", "e", "f"].into_iter().map(String::from).chain(
        ["a", "b", "c", "d"]
            .iter()
            .flat_map(|p| ["x", "y", "z", "w"].map(|t| format!("{p}:{t}"))),
    );
    let missing: Vec<String> = ids.filter(|id| report.item(id).is_none()).collect();
    if !missing.is_empty() {
        return fail(format!("missing items {missing:?}"));
    }
    if !report.passed() {
        let failed: Vec<&str> = report.failed_items().map(|i| i.id.as_str()).collect();
        return fail(format!("failed items {failed:?}"));
    }
    pass(format!(
        "{}/{} items, value 5, four certificates re-verified",
        report.items.len(),
        report.items.len()
    ))
}

fn chain_reproduction() -> Outcome {
    let report = audit::verify_section5();
    if !report.passed() {
        let failed: Vec<&str> = report.failed_items().map(|i| i.id.as_str()).collect();
        return fail(format!("failed items {failed:?}"));
    }
    if report.chain_verdict != Some(ChainVerdict::Violates) {
        return fail(format!("verdict {:?}", report.chain_verdict));
    }
    let fx = Section5Fixture::transcribed();
    let s = branch_bound(&fx.c).unwrap();
    if s.tour != fx.leaf || s.length != 0 || s.trace.instances.len() != 4 {
        return fail(format!(
            "leaf {} value {} instances {}",
            s.tour,
            s.length,
            s.trace.instances.len()
        ));
    }
    let lengths = tour_lengths(&fx.c).unwrap();
    let y_value = lengths.iter().find(|(t, _)| *t == fx.y).map(|(_, l)| *l);
    let second = lengths
        .iter()
        .filter(|(t, _)| *t != fx.leaf)
        .map(|(_, l)| *l)
        .min();
    if y_value != Some(CostValue::Finite(3)) || second != y_value {
        return fail(format!("y value {y_value:?}, second best {second:?}"));
    }
    let prune =
        AffineForm::from_terms(&[((1, 4), 1), ((1, 2), -1), ((4, 2), 1), ((4, 1), -1)], 0).unwrap();
    let event = s.trace.nontrivial().find(|e| {
        e.provenance == Provenance::Prune && e.instance_id == 3 && e.oriented_form() == prune
    });
    let Some(event) = event else {
        return fail("instance-3 prune event not found");
    };
    if !compatibility_check(event, &fx.y)
        .map(|c| c.is_witness())
        .unwrap_or(false)
    {
        return fail("instance-3 prune event has no witness");
    }
    let events = s.trace.nontrivial().count();
    let witnessed = s
        .trace
        .nontrivial()
        .filter(|e| {
            compatibility_check(e, &fx.y)
                .map(|c| c.is_witness())
                .unwrap_or(false)
        })
        .count();
    if witnessed != events {
        return fail(format!("{witnessed}/{events} events witnessed"));
    }
    pass(format!("leaf x value 0, 4 instances, y = 3 second best, {witnessed}/{events} witnesses, VIOLATES(*)"))
}

fn lemma1_suite() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in 4..=6 {
        let report = match audit::lemma1_property_suite(1, 500, n) {
            Ok(r) => r,
            Err(e) => return fail(format!("n={n}: {e}")),
        };
        let checked = report
            .item("preconditions")
            .and_then(|i| i.evidence["checked"].as_u64());
        let confirmed = report
            .item("witnesses")
            .and_then(|i| i.evidence["passed"].as_u64());
        ok &= report.passed() && checked == Some(500) && confirmed == Some(500);
        parts.push(format!(
            "n={n} {}/{}",
            confirmed.unwrap_or(0),
            checked.unwrap_or(0)
        ));
    }
    Outcome {
        ok,
        detail: parts.join(", "),
    }
}

fn adjacency() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, expected) in [(4, 15), (5, 276)] {
        let tours = enumerate_tours(n).unwrap();
        let mut pairs = 0;
        let mut adjacent_pairs = 0;
        for a in 0..tours.len() {
            for b in a + 1..tours.len() {
                pairs += 1;
                adjacent_pairs += usize::from(adjacent(&tours[a], &tours[b]).unwrap_or(false));
            }
        }
        ok &= pairs == expected && adjacent_pairs == expected;
        parts.push(format!("n={n} {adjacent_pairs}/{pairs}"));
    }
    Outcome {
        ok,
        detail: parts.join(", "),
    }
}

fn trace_soundness() -> Outcome {
    let mut corpus: Vec<CostMatrix> = vec![c_star()];
    corpus.extend(
        Section4Fixture::transcribed()
            .cases
            .into_iter()
            .map(|c| c.matrix),
    );
    let mut r = rng(6);
    for n in 3..=7 {
        corpus.extend((0..10).map(|_| random_matrix(&mut r, n, 20)));
    }
    for (k, c) in corpus.iter().enumerate() {
        let trace = branch_bound(c).unwrap().trace;
        if !trace.replay_check(c).unwrap_or(false) {
            return fail(format!("replay failed on corpus entry {k}"));
        }
        let text = trace.to_jsonl();
        match TraceChain::from_jsonl(&text) {
            Ok(back) if back == trace && back.to_jsonl() == text => {}
            _ => {
                return fail(format!(
                    "serialization round trip failed on corpus entry {k}"
                ))
            }
        }
    }
    let trace = branch_bound(&c_star()).unwrap().trace;
    for e in trace.nontrivial() {
        let nf = normal_form(e).unwrap();
        let variant = nf.constant == -1 && e.provenance == Provenance::RegretRecord;
        if !nf.has_balanced_shape() || !(nf.constant == 0 || variant) {
            return fail(format!(
                "event {e} has constant {} or unbalanced support",
                nf.constant
            ));
        }
    }
    pass(format!(
        "{} traces replay and round-trip, {} C* events in normal form",
        corpus.len(),
        trace.nontrivial().count()
    ))
}

/// The five fixture matrices, addressed by index: 0..4 are C_x..C_w, 4 is C*.
fn mutate(index: usize, i: usize, j: usize, delta: i64) -> (Section4Fixture, Section5Fixture) {
    let mut node = Section4Fixture::transcribed();
    let mut chain = Section5Fixture::transcribed();
    let m = if index < 4 {
        &mut node.cases[index].matrix
    } else {
        &mut chain.c
    };
    let old = m.cost(i, j).finite().expect("fixture cells are finite");
    m.set(i, j, CostValue::Finite(old + delta));
    (node, chain)
}

fn mutation_sensitivity() -> Outcome {
    let mut r = rng(7);
    let mut flipped = 0;
    let mut semantic = 0;
    let mut misses = Vec::new();
    for k in 0..20 {
        let index = r.gen_range(0..5);
        let n = if index < 4 { 5 } else { 4 };
        let (i, j) = loop {
            let (i, j) = (r.gen_range(1..=n), r.gen_range(1..=n));
            if i != j {
                break (i, j);
            }
        };
        let delta = if r.gen_bool(0.5) {
            r.gen_range(1..=3)
        } else {
            -r.gen_range(1..=3)
        };
        let (node, chain) = mutate(index, i, j, delta);
        let report = if index < 4 {
            audit::verify_section4_with(&node)
        } else {
            audit::verify_section5_with(&chain)
        };
        let failed: Vec<&str> = report.failed_items().map(|i| i.id.as_str()).collect();
        if failed.is_empty() {
            misses.push(format!("#{k}"));
        } else {
            flipped += 1;
            semantic += usize::from(failed.iter().any(|id| *id != "fixture"));
        }
    }
    if misses.is_empty() {
        pass(format!(
            "{flipped}/20 mutations caught, {semantic} beyond the fixture check"
        ))
    } else {
        fail(format!("mutations {misses:?} left every item passing"))
    }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        run(1, "solver correctness", secs(60), solver_correctness),
        run(2, "node audit reproduction", secs(5), node_reproduction),
        run(3, "chain audit reproduction", secs(5), chain_reproduction),
        run(4, "witness construction suite", secs(120), lemma1_suite),
        run(5, "adjacency", secs(60), adjacency),
        run(6, "trace soundness", Duration::MAX, trace_soundness),
        run(
            7,
            "mutation sensitivity",
            Duration::MAX,
            mutation_sensitivity,
        ),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
