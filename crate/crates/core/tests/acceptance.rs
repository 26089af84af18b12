//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use inhab_core::alba::{Bit, Machine};
use inhab_core::harness::{
    aci_shuffle, random_machines, random_type, rename_atoms, sweep_machines, words_of_length, xcheck, Verdict,
};
use inhab_core::reduction::{gen_t, reduce};
use inhab_core::solver::oracle::{enumerate_long, enumerate_long_capped, is_long_solution};
use inhab_core::solver::{solve, Limits, Solution, SolveResult};
use inhab_core::term::{alpha_equal, check_derivation, nesting_depth, parse_term, term_size};
use inhab_core::types::{normalize, parse_type, size, TypeExpr};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const T3: &str = "\\x1 x2 x3 x4. x2 (x3 (x2 (x4 (x2 (x3 (x2 x1))))))";
const T4: &str = "\\x1 x2 x3 x4 x5. x2 (x3 (x2 (x4 (x2 (x3 (x2 (x5 (x2 (x3 (x2 (x4 (x2 (x3 (x2 x1))))))))))))))";

const WITNESS_TIME: Duration = Duration::from_secs(1);
const T7_TIME: Duration = Duration::from_secs(60);
const RATIO_TOLERANCE: f64 = 0.1;
const XCHECK_CASE_TIME: Duration = Duration::from_secs(10);
const XCHECK_CONFIGS: usize = 2_000_000;
const RANDOM_MACHINES: usize = 500;
const MACHINE_SEED: u64 = 0x5eed_a1ba;
const TYPE_SEED: u64 = 0x5eed_07e5;
const RANDOM_TYPES: usize = 1000;
const RANDOM_TYPE_SIZE: usize = 25;
const ORACLE_DEPTH: usize = 6;
const ORACLE_WORK: usize = 200_000;
const EMPTY_DEPTH: usize = 8;

/// Running tallies for the criteria checked on every solve.
#[derive(Default)]
struct Ledger {
    derivations: usize,
    bad_derivations: Vec<String>,
    solves: usize,
    bound_failures: Vec<String>,
}

impl Ledger {
    fn solve(&mut self, goal: &TypeExpr, limits: Limits) -> Solution {
        self.solves += 1;
        let sol = match solve(goal, limits) {
            Ok(sol) => sol,
            Err(e) => {
                self.bound_failures.push(format!("{goal}: {e}"));
                panic!("solver rejected {goal}: {e}");
            }
        };
        self.observe(&goal.to_string(), goal, &sol);
        sol
    }

    fn observe(&mut self, label: &str, goal: &TypeExpr, sol: &Solution) {
        if sol.stats.max_width > size(goal) || sol.stats.max_env_rank > 1 {
            self.bound_failures.push(format!(
                "{label}: width {} (size {}), env rank {}",
                sol.stats.max_width,
                size(goal),
                sol.stats.max_env_rank
            ));
        }
        if let SolveResult::Inhabited(w) = &sol.result {
            self.derivations += 1;
            if check_derivation(&w.derivation).is_err() || w.derivation.ty != *goal || !w.derivation.env.is_empty() {
                self.bad_derivations.push(label.to_string());
            }
        }
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn criterion_1(ledger: &mut Ledger) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (n, expected) in [(3, T3), (4, T4)] {
        let goal = gen_t(n);
        let start = Instant::now();
        let sol = ledger.solve(&goal, Limits::unlimited());
        let took = start.elapsed();
        let ok = sol
            .result
            .witness()
            .is_some_and(|w| alpha_equal(&w.term, &parse_term(expected).unwrap()));
        pass &= ok && took < WITNESS_TIME;
        notes.push(format!("T({n}) alpha-equal={ok} in {took:.2?}"));
    }
    outcome(pass, notes.join(", "))
}

fn criterion_2(ledger: &mut Ledger) -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    let mut apps = Vec::new();
    for n in 3..=7usize {
        let goal = gen_t(n);
        let start = Instant::now();
        let sol = ledger.solve(&goal, Limits::unlimited());
        let took = start.elapsed();
        let Some(w) = sol.result.witness() else {
            return outcome(false, format!("T({n}) reported empty"));
        };
        let a = term_size(&w.term).apps;
        apps.push(a);
        pass &= a == (1 << n) - 1;
        if n <= 5 {
            let terms = enumerate_long(&goal, (1 << n) + 2).unwrap();
            let agrees = terms.len() == 1 && alpha_equal(&terms[0], &w.term);
            pass &= agrees;
            notes.push(format!("n={n}: {a} apps, oracle agrees={agrees}"));
        } else {
            let ratio = a as f64 / apps[apps.len() - 2] as f64;
            pass &= (ratio - 2.0).abs() <= RATIO_TOLERANCE;
            notes.push(format!("n={n}: {a} apps, ratio {ratio:.3}"));
        }
        if n == 7 {
            pass &= took < T7_TIME;
            notes.push(format!("T(7) solved in {took:.2?}"));
        }
    }
    outcome(pass, notes.join("; "))
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for n in [3usize, 4] {
        let depth = (1 << n) + 4;
        let terms = enumerate_long(&gen_t(n), depth).unwrap();
        pass &= terms.len() == 1;
        notes.push(format!("T({n}) depth {depth}: {} long solutions", terms.len()));
    }
    outcome(pass, notes.join(", "))
}

fn criterion_4_and_sweep(ledger: &mut Ledger) -> Outcome {
    let mut machines = sweep_machines();
    let sweep = machines.len();
    machines.extend(random_machines(MACHINE_SEED, RANDOM_MACHINES, 3, 6));
    let words: Vec<Vec<Bit>> = (2..=3).flat_map(words_of_length).collect();
    let mut cases = 0;
    let mut agree = 0;
    let mut accepted = 0;
    let mut slowest = Duration::ZERO;
    let mut problems = Vec::new();
    for (id, m) in &machines {
        for w in &words {
            cases += 1;
            let start = Instant::now();
            let r = xcheck(id, m, w, Limits::configs(XCHECK_CONFIGS)).unwrap();
            let took = start.elapsed();
            slowest = slowest.max(took);
            if r.agrees() && took < XCHECK_CASE_TIME {
                agree += 1;
            } else if problems.len() < 5 {
                problems.push(format!("{id} on {}: {:?} vs {:?} in {took:.2?}", r.word, r.solver, r.automaton));
            }
            ledger.solves += 1;
            if r.max_width > ledger_width_bound(m, w) || r.max_env_rank > 1 {
                ledger.bound_failures.push(format!("{id} on {}", r.word));
            }
            if r.solver == Verdict::Accept {
                accepted += 1;
                ledger.derivations += 1;
                if r.derivation_ok != Some(true) {
                    ledger.bad_derivations.push(format!("{id} on {}", r.word));
                }
            }
        }
    }
    let mut detail = format!(
        "{agree}/{cases} cases agree, {accepted} accepted ({sweep} sweep + {RANDOM_MACHINES} random machines, seed {MACHINE_SEED:#x}), slowest {slowest:.2?}"
    );
    if !problems.is_empty() {
        detail.push_str(&format!("; first problems: {}", problems.join(" | ")));
    }
    outcome(agree == cases, detail)
}

fn ledger_width_bound(m: &Machine, w: &[Bit]) -> usize {
    size(&reduce(m, w).unwrap())
}

fn criterion_6(ledger: &mut Ledger) -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for text in ["a", "(a->a)->a", "((a->b)->a)->a", "a & (a->a)"] {
        let goal = parse_type(text).unwrap();
        let empty = ledger.solve(&goal, Limits::unlimited()).result == SolveResult::Empty;
        let none = enumerate_long(&goal, EMPTY_DEPTH).unwrap().is_empty();
        pass &= empty && none;
        notes.push(format!("{text}: solver empty={empty}, oracle empty={none}"));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_7(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(TYPE_SEED);
    let limits = Limits::configs(1_000_000);
    let mut inhabited = 0;
    let mut oracle_ran = 0;
    let mut failures = Vec::new();
    for _ in 0..RANDOM_TYPES {
        let goal = random_type(&mut rng, RANDOM_TYPE_SIZE);
        let base = ledger.solve(&goal, limits);
        let verdict = base.result.is_inhabited();
        inhabited += verdict as usize;
        if matches!(base.result, SolveResult::ResourceExceeded(_)) {
            failures.push(format!("{goal}: budget"));
            continue;
        }

        let shuffled = normalize(&aci_shuffle(&mut rng, &goal));
        let renamed = rename_atoms(&mut rng, &goal);
        for variant in [shuffled, renamed] {
            if ledger.solve(&variant, limits).result.is_inhabited() != verdict {
                failures.push(format!("{goal} vs {variant}: verdict changed"));
            }
        }

        let Some(terms) = enumerate_long_capped(&goal, ORACLE_DEPTH, ORACLE_WORK).unwrap() else {
            continue;
        };
        oracle_ran += 1;
        match &base.result {
            SolveResult::Inhabited(w) => {
                if !is_long_solution(&goal, &w.term).unwrap() {
                    failures.push(format!("{goal}: witness {} is not a long solution", w.term));
                }
                if w.depth <= ORACLE_DEPTH && terms.is_empty() {
                    failures.push(format!("{goal}: oracle missed depth-{} witness", w.depth));
                }
                if let Some(shallowest) = terms.iter().map(nesting_depth).min() {
                    if shallowest < w.depth {
                        failures.push(format!("{goal}: witness depth {} above oracle's {shallowest}", w.depth));
                    }
                }
            }
            _ => {
                if !terms.is_empty() {
                    failures.push(format!("{goal}: solver empty, oracle found {}", terms[0]));
                }
            }
        }
    }
    let mut detail = format!(
        "{RANDOM_TYPES} types (seed {TYPE_SEED:#x}), {inhabited} inhabited, oracle terminated on {oracle_ran}, {} failures",
        failures.len()
    );
    if let Some(first) = failures.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    outcome(failures.is_empty(), detail)
}

fn run() -> bool {
    let mut ledger = Ledger::default();
    let mut results = vec![
        (1, criterion_1(&mut ledger)),
        (2, criterion_2(&mut ledger)),
        (3, criterion_3()),
        (4, criterion_4_and_sweep(&mut ledger)),
    ];
    results.push((6, criterion_6(&mut ledger)));
    results.push((7, criterion_7(&mut ledger)));
    results.push((
        5,
        outcome(
            ledger.bad_derivations.is_empty(),
            format!(
                "{} derivations checked, {} rejected{}",
                ledger.derivations,
                ledger.bad_derivations.len(),
                ledger.bad_derivations.first().map(|s| format!("; first: {s}")).unwrap_or_default()
            ),
        ),
    ));
    results.push((
        8,
        outcome(
            ledger.bound_failures.is_empty(),
            format!("{} solves, {} bound violations", ledger.solves, ledger.bound_failures.len()),
        ),
    ));
    results.sort_by_key(|(n, _)| *n);

    let mut all = true;
    for (n, o) in &results {
        println!("criterion {n}: {} - {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        all &= o.pass;
    }
    all
}

fn main() -> ExitCode {
    let handle = std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(run)
        .expect("spawn acceptance thread");
    if handle.join().unwrap_or(false) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
