//! Cross-validation of the solver against the automaton: a machine accepts
//! a word in place exactly when its reduction type is inhabited.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::alba::{decide, word_to_string, AlbaError, Bit, Dir, Kind, Machine, Transition};
use crate::reduction::{reduce, ReductionError};
use crate::solver::{solve, Limits, SolveError, SolveResult};
use crate::term::check_derivation;
use crate::types::{rank, size, Atom, RawType, TypeExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
    Budget,
}

#[derive(Clone, Debug, Serialize)]
pub struct XCheckReport {
    pub machine: String,
    pub word: String,
    pub solver: Verdict,
    pub automaton: Verdict,
    /// `None` when the solver ran out of budget.
    pub agreement: Option<bool>,
    pub witness: Option<String>,
    /// Whether the witness derivation passed the checker; `None` without a
    /// witness.
    pub derivation_ok: Option<bool>,
    pub solver_micros: u128,
    pub automaton_micros: u128,
    pub configs: usize,
    pub max_width: usize,
    pub max_env_rank: usize,
}

impl XCheckReport {
    pub fn agrees(&self) -> bool {
        self.agreement == Some(true)
    }

    pub fn elapsed(&self) -> Duration {
        Duration::from_micros((self.solver_micros + self.automaton_micros) as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XCheckError {
    #[error(transparent)]
    Machine(#[from] AlbaError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Solver(#[from] SolveError),
}

/// Runs the reduction and the solver on one side and the automaton on the
/// other, and compares.
pub fn xcheck(id: &str, m: &Machine, word: &[Bit], limits: Limits) -> Result<XCheckReport, XCheckError> {
    let t0 = Instant::now();
    let acceptance = decide(m, word)?;
    let automaton_time = t0.elapsed();

    let t1 = Instant::now();
    let goal = reduce(m, word)?;
    let sol = solve(&goal, limits)?;
    let solver_time = t1.elapsed();

    let automaton = if acceptance.accepted { Verdict::Accept } else { Verdict::Reject };
    let (solver, witness, derivation_ok) = match &sol.result {
        SolveResult::Inhabited(w) => (
            Verdict::Accept,
            Some(w.term.to_string()),
            Some(check_derivation(&w.derivation).is_ok() && w.derivation.ty == goal),
        ),
        SolveResult::Empty => (Verdict::Reject, None, None),
        SolveResult::ResourceExceeded(_) => (Verdict::Budget, None, None),
    };
    Ok(XCheckReport {
        machine: id.to_string(),
        word: word_to_string(word),
        solver,
        automaton,
        agreement: (solver != Verdict::Budget).then_some(solver == automaton),
        witness,
        derivation_ok,
        solver_micros: solver_time.as_micros(),
        automaton_micros: automaton_time.as_micros(),
        configs: sol.stats.configs,
        max_width: sol.stats.max_width,
        max_env_rank: sol.stats.max_env_rank,
    })
}

/// All words over {0,1} of length `len`, in lexicographic order.
pub fn words_of_length(len: usize) -> Vec<Vec<Bit>> {
    (0..1u32 << len)
        .map(|bits| {
            (0..len)
                .map(|i| if bits >> (len - 1 - i) & 1 == 1 { Bit::One } else { Bit::Zero })
                .collect()
        })
        .collect()
}

fn tr(from: &str, read: Bit, to: &str, write: Bit, dir: Dir) -> Transition {
    Transition { from: from.into(), read, to: to.into(), write, dir }
}

fn state_names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("q{i}")).collect()
}

/// The fixed transition pool used for `k` states in [`sweep_machines`].
pub fn sweep_pool(k: usize) -> Vec<Transition> {
    use Bit::{One, Zero};
    match k {
        1 => vec![
            tr("q0", Zero, "q0", One, Dir::R),
            tr("q0", One, "q0", Zero, Dir::L),
            tr("q0", One, "q0", One, Dir::R),
            tr("q0", Zero, "q0", Zero, Dir::L),
        ],
        2 => vec![
            tr("q0", Zero, "q1", One, Dir::R),
            tr("q0", One, "q0", Zero, Dir::R),
            tr("q1", One, "q0", One, Dir::L),
            tr("q1", Zero, "q1", Zero, Dir::L),
        ],
        _ => panic!("sweep pools exist for one and two states"),
    }
}

/// Every machine with one or two states whose transition relation is a
/// nonempty subset of the pool for its state count, under every kind
/// assignment.
pub fn sweep_machines() -> Vec<(String, Machine)> {
    let kinds = [Kind::Or, Kind::And, Kind::Accept];
    let mut out = Vec::new();
    for k in 1..=2usize {
        let states = state_names(k);
        let pool = sweep_pool(k);
        for mask in 1..(1u32 << pool.len()) {
            let delta: Vec<Transition> = pool
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, t)| t.clone())
                .collect();
            for assign in 0..kinds.len().pow(k as u32) {
                let mut kind = BTreeMap::new();
                let mut code = assign;
                for q in &states {
                    kind.insert(q.clone(), kinds[code % kinds.len()]);
                    code /= kinds.len();
                }
                let m = Machine::new(states.clone(), "q0".into(), kind, delta.clone()).expect("valid by construction");
                out.push((format!("sweep-q{k}-d{mask}-k{assign}"), m));
            }
        }
    }
    out
}

/// A random machine with 1 to `max_states` states and 1 to `max_delta`
/// distinct transitions.
pub fn random_machine<R: Rng>(rng: &mut R, max_states: usize, max_delta: usize) -> Machine {
    let k = rng.gen_range(1..=max_states);
    let states = state_names(k);
    let kinds = [Kind::Or, Kind::And, Kind::Accept];
    let kind = states
        .iter()
        .map(|q| (q.clone(), *kinds.choose(rng).expect("nonempty")))
        .collect();
    let mut all = Vec::new();
    for from in &states {
        for read in Bit::ALL {
            for to in &states {
                for write in Bit::ALL {
                    for dir in [Dir::L, Dir::R] {
                        all.push(tr(from, read, to, write, dir));
                    }
                }
            }
        }
    }
    let d = rng.gen_range(1..=max_delta.min(all.len()));
    let delta: Vec<Transition> = all.choose_multiple(rng, d).cloned().collect();
    Machine::new(states, "q0".into(), kind, delta).expect("valid by construction")
}

/// `count` machines drawn from a ChaCha stream seeded with `seed`.
pub fn random_machines(seed: u64, count: usize, max_states: usize, max_delta: usize) -> Vec<(String, Machine)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| (format!("random-{seed}-{i}"), random_machine(&mut rng, max_states, max_delta)))
        .collect()
}

const TYPE_ATOMS: [&str; 3] = ["a", "b", "c"];

fn random_raw<R: Rng>(rng: &mut R, r: usize, budget: usize) -> RawType {
    let atom = |rng: &mut R| RawType::Atom(Atom::new(TYPE_ATOMS.choose(rng).expect("nonempty")).expect("valid atom"));
    if budget < 3 {
        return atom(rng);
    }
    let split = |rng: &mut R| {
        let left = rng.gen_range(1..budget - 1);
        (left, budget - 1 - left)
    };
    match (r, rng.gen_range(0..4)) {
        (_, 0) => atom(rng),
        (0, _) => {
            let (l, rr) = split(rng);
            RawType::Arrow(Box::new(random_raw(rng, 0, l)), Box::new(random_raw(rng, 0, rr)))
        }
        (_, 1) => {
            let (l, rr) = split(rng);
            RawType::Inter(Box::new(random_raw(rng, r, l)), Box::new(random_raw(rng, r, rr)))
        }
        (_, _) => {
            let (l, rr) = split(rng);
            RawType::Arrow(Box::new(random_raw(rng, r - 1, l)), Box::new(random_raw(rng, r, rr)))
        }
    }
}

/// A random type of rank at most 2 and size at most `max_size` over the
/// atoms `a`, `b`, `c`.
pub fn random_type<R: Rng>(rng: &mut R, max_size: usize) -> TypeExpr {
    loop {
        let budget = rng.gen_range(1..=max_size);
        let t = crate::types::normalize(&random_raw(rng, 2, budget));
        if rank(&t) <= 2 && size(&t) <= max_size {
            return t;
        }
    }
}

/// A syntactically different spelling of `t` with the same meaning up to
/// associativity, commutativity and idempotence of `&`.
pub fn aci_shuffle<R: Rng>(rng: &mut R, t: &TypeExpr) -> RawType {
    match t {
        TypeExpr::Atom(a) => RawType::Atom(a.clone()),
        TypeExpr::Arrow(l, r) => RawType::Arrow(Box::new(aci_shuffle(rng, l)), Box::new(aci_shuffle(rng, r))),
        TypeExpr::Inter(parts) => {
            let mut items: Vec<RawType> = parts.as_slice().iter().map(|p| aci_shuffle(rng, p)).collect();
            if rng.gen_bool(0.3) {
                let dup = items[rng.gen_range(0..items.len())].clone();
                items.push(dup);
            }
            items.shuffle(rng);
            while items.len() > 1 {
                let i = rng.gen_range(0..items.len() - 1);
                let right = items.remove(i + 1);
                let left = items.remove(i);
                items.insert(i, RawType::Inter(Box::new(left), Box::new(right)));
            }
            items.pop().expect("nonempty intersection")
        }
    }
}

/// Applies a random injective renaming of the atoms of `t`.
pub fn rename_atoms<R: Rng>(rng: &mut R, t: &TypeExpr) -> TypeExpr {
    let mut pool: Vec<String> = ["z", "m", "k", "b2", "a9", "q", "x_"].iter().map(|s| s.to_string()).collect();
    pool.shuffle(rng);
    let mut map = BTreeMap::new();
    t.map_atoms(&mut |a: &Atom| {
        let next = map.len();
        map.entry(a.clone())
            .or_insert_with(|| Atom::new(&pool[next % pool.len()]).expect("valid atom"))
            .clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alba::parse_word;

    fn machine(json: &str) -> Machine {
        Machine::from_json(json).unwrap()
    }

    #[test]
    fn accept_only_agrees() {
        let m = machine(r#"{"states":["q0"],"initial":"q0","kind":{"q0":"accept"},"delta":[["q0","0","q0","0","R"]]}"#);
        let r = xcheck("m", &m, &parse_word("1").unwrap(), Limits::unlimited()).unwrap();
        assert_eq!((r.solver, r.automaton), (Verdict::Accept, Verdict::Accept));
        assert!(r.agrees());
        assert_eq!(r.derivation_ok, Some(true));
        let r = xcheck("m", &m, &parse_word("10").unwrap(), Limits::unlimited()).unwrap();
        assert_eq!((r.solver, r.automaton), (Verdict::Reject, Verdict::Reject));
        assert!(r.agrees());
    }

    #[test]
    fn or_move_then_accept() {
        let m = machine(
            r#"{"states":["q0","q1"],"initial":"q0","kind":{"q0":"or","q1":"accept"},
                "delta":[["q0","1","q1","1","R"]]}"#,
        );
        let r = xcheck("m", &m, &parse_word("10").unwrap(), Limits::unlimited()).unwrap();
        assert!(r.agrees());
        assert_eq!(r.solver, Verdict::Accept);
        // columns: accepting x1, OR move at head 1 x2, final x3
        assert_eq!(r.witness.as_deref(), Some("\\x1 x2 x3. x2 (x1 x3)"));
    }

    #[test]
    fn budget_is_not_disagreement() {
        let m = machine(
            r#"{"states":["q0","q1"],"initial":"q0","kind":{"q0":"or","q1":"accept"},
                "delta":[["q0","1","q1","1","R"]]}"#,
        );
        let r = xcheck("m", &m, &parse_word("10").unwrap(), Limits::configs(1)).unwrap();
        assert_eq!(r.solver, Verdict::Budget);
        assert_eq!(r.agreement, None);
    }

    #[test]
    fn sweep_size() {
        assert_eq!(sweep_machines().len(), 15 * 3 + 15 * 9);
    }

    #[test]
    fn random_machines_are_reproducible() {
        let a = random_machines(7, 20, 3, 6);
        let b = random_machines(7, 20, 3, 6);
        assert_eq!(a, b);
        assert!(a.iter().all(|(_, m)| m.states().len() <= 3 && !m.delta().is_empty()));
    }

    #[test]
    fn random_types_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let t = random_type(&mut rng, 25);
            assert!(rank(&t) <= 2 && size(&t) <= 25, "{t}");
            assert_eq!(crate::types::normalize(&aci_shuffle(&mut rng, &t)), t);
            let r = rename_atoms(&mut rng, &t);
            assert_eq!(size(&r), size(&t));
            assert_eq!(rank(&r), rank(&t));
        }
    }

    #[test]
    fn words_enumerated() {
        let ws = words_of_length(2);
        assert_eq!(ws.iter().map(|w| word_to_string(w)).collect::<Vec<_>>(), vec!["00", "01", "10", "11"]);
    }
}
