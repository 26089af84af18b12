//! Alternating linear bounded automata over the tape alphabet {0, 1} and a
//! least-fixpoint decision of in-place acceptance.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::is_ident;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub const ALL: [Bit; 2] = [Bit::Zero, Bit::One];

    pub fn parse(s: &str) -> Option<Bit> {
        match s {
            "0" => Some(Bit::Zero),
            "1" => Some(Bit::One),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Bit::Zero => '0',
            Bit::One => '1',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    L,
    R,
}

impl Dir {
    /// Head displacement.
    pub fn offset(self) -> isize {
        match self {
            Dir::L => -1,
            Dir::R => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    And,
    Or,
    Accept,
}

/// `((from, read), (to, write, dir))`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: String,
    pub read: Bit,
    pub to: String,
    pub write: Bit,
    pub dir: Dir,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(({}, {}), ({}, {}, {:?}))",
            self.from,
            self.read.as_char(),
            self.to,
            self.write.as_char(),
            self.dir
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlbaError {
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("malformed machine file: {0}")]
    Format(String),
    #[error("invalid word {0:?}: expected a nonempty string over {{0,1}}")]
    InvalidWord(String),
    #[error("word of length {0} exceeds the supported maximum of 64")]
    WordTooLong(usize),
    #[error("transition {0} is not consistent with the configuration")]
    Inconsistent(String),
}

/// A validated machine: nonempty transition relation, known initial state,
/// a kind for every state and for nothing else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Machine {
    states: Vec<String>,
    initial: String,
    kind: BTreeMap<String, Kind>,
    delta: Vec<Transition>,
}

impl Machine {
    pub fn new(
        states: Vec<String>,
        initial: String,
        kind: BTreeMap<String, Kind>,
        delta: Vec<Transition>,
    ) -> Result<Machine, AlbaError> {
        let bad = |msg: String| Err(AlbaError::InvalidMachine(msg));
        if states.is_empty() {
            return bad("no states".into());
        }
        for (i, q) in states.iter().enumerate() {
            if !is_ident(q) {
                return bad(format!("state name {q:?} is not over [A-Za-z0-9_]"));
            }
            if states[..i].contains(q) {
                return bad(format!("state {q} listed twice"));
            }
            if !kind.contains_key(q) {
                return bad(format!("state {q} has no kind"));
            }
        }
        if let Some(q) = kind.keys().find(|q| !states.contains(q)) {
            return bad(format!("kind given for unknown state {q}"));
        }
        if !states.contains(&initial) {
            return bad(format!("initial state {initial} is not a state"));
        }
        if delta.is_empty() {
            return bad("empty transition relation".into());
        }
        for t in &delta {
            if !states.contains(&t.from) || !states.contains(&t.to) {
                return bad(format!("transition {t} mentions an unknown state"));
            }
        }
        Ok(Machine { states, initial, kind, delta })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> &str {
        &self.initial
    }

    pub fn kind(&self, state: &str) -> Kind {
        self.kind[state]
    }

    pub fn delta(&self) -> &[Transition] {
        &self.delta
    }

    pub fn from_json(text: &str) -> Result<Machine, AlbaError> {
        let file: MachineFile = serde_json::from_str(text).map_err(|e| AlbaError::Format(e.to_string()))?;
        let mut delta = Vec::with_capacity(file.delta.len());
        for row in &file.delta {
            let [from, read, to, write, dir] = row;
            let bit = |s: &str| Bit::parse(s).ok_or_else(|| AlbaError::Format(format!("bad symbol {s:?} in {row:?}")));
            let dir = match dir.as_str() {
                "L" => Dir::L,
                "R" => Dir::R,
                other => return Err(AlbaError::Format(format!("bad direction {other:?} in {row:?}"))),
            };
            delta.push(Transition {
                from: from.clone(),
                read: bit(read)?,
                to: to.clone(),
                write: bit(write)?,
                dir,
            });
        }
        Machine::new(file.states, file.initial, file.kind, delta)
    }

    pub fn to_json(&self) -> String {
        let file = MachineFile {
            states: self.states.clone(),
            initial: self.initial.clone(),
            kind: self.kind.clone(),
            delta: self
                .delta
                .iter()
                .map(|t| {
                    [
                        t.from.clone(),
                        t.read.as_char().to_string(),
                        t.to.clone(),
                        t.write.as_char().to_string(),
                        format!("{:?}", t.dir),
                    ]
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("serializable")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MachineFile {
    states: Vec<String>,
    initial: String,
    kind: BTreeMap<String, Kind>,
    delta: Vec<[String; 5]>,
}

pub fn parse_word(s: &str) -> Result<Vec<Bit>, AlbaError> {
    let word: Option<Vec<Bit>> = s
        .chars()
        .map(|c| match c {
            '0' => Some(Bit::Zero),
            '1' => Some(Bit::One),
            _ => None,
        })
        .collect();
    match word {
        Some(w) if !w.is_empty() => Ok(w),
        _ => Err(AlbaError::InvalidWord(s.to_string())),
    }
}

pub fn word_to_string(w: &[Bit]) -> String {
    w.iter().map(|b| b.as_char()).collect()
}

/// `(state, tape, head)` with a 1-based head position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub state: String,
    pub tape: Vec<Bit>,
    pub head: usize,
}

impl Config {
    pub fn initial(m: &Machine, word: &[Bit]) -> Config {
        Config {
            state: m.initial.clone(),
            tape: word.to_vec(),
            head: 1,
        }
    }

    fn scanned(&self) -> Bit {
        self.tape[self.head - 1]
    }
}

fn move_allowed(dir: Dir, head: usize, len: usize) -> bool {
    match dir {
        Dir::L => head > 1,
        Dir::R => head < len,
    }
}

/// The transitions of `m` that apply in `c` without moving the head off
/// the word.
pub fn consistent_transitions<'m>(m: &'m Machine, c: &Config) -> Vec<&'m Transition> {
    m.delta
        .iter()
        .filter(|t| t.from == c.state && t.read == c.scanned() && move_allowed(t.dir, c.head, c.tape.len()))
        .collect()
}

pub fn apply_transition(c: &Config, p: &Transition) -> Result<Config, AlbaError> {
    if c.head == 0 || c.head > c.tape.len() || p.from != c.state || p.read != c.scanned() || !move_allowed(p.dir, c.head, c.tape.len()) {
        return Err(AlbaError::Inconsistent(p.to_string()));
    }
    let mut tape = c.tape.clone();
    tape[c.head - 1] = p.write;
    Ok(Config {
        state: p.to.clone(),
        tape,
        head: c.head.checked_add_signed(p.dir.offset()).expect("in bounds"),
    })
}

/// Outcome of [`decide`], with the size of the explored configuration
/// graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Acceptance {
    pub accepted: bool,
    pub configs: usize,
    pub rounds: usize,
}

pub fn accepts_in_place(m: &Machine, word: &[Bit]) -> Result<bool, AlbaError> {
    decide(m, word).map(|a| a.accepted)
}

/// Least fixpoint of the acceptance clauses over the configurations
/// reachable from `(initial, word, 1)`.
pub fn decide(m: &Machine, word: &[Bit]) -> Result<Acceptance, AlbaError> {
    if word.is_empty() {
        return Err(AlbaError::InvalidWord(String::new()));
    }
    if word.len() > 64 {
        return Err(AlbaError::WordTooLong(word.len()));
    }
    let len = word.len();
    let index: HashMap<&str, usize> = m.states.iter().enumerate().map(|(i, q)| (q.as_str(), i)).collect();
    let kinds: Vec<Kind> = m.states.iter().map(|q| m.kind[q]).collect();
    // per state: (read, to, write, dir)
    let mut moves: Vec<Vec<(Bit, usize, Bit, Dir)>> = vec![Vec::new(); m.states.len()];
    for t in &m.delta {
        moves[index[t.from.as_str()]].push((t.read, index[t.to.as_str()], t.write, t.dir));
    }

    // (state, tape bits, 0-based head)
    type Packed = (usize, u64, usize);
    let bits = word
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, b)| if *b == Bit::One { acc | (1 << i) } else { acc });
    let start: Packed = (index[m.initial.as_str()], bits, 0);
    let mut ids: HashMap<Packed, usize> = HashMap::new();
    let mut configs: Vec<Packed> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    ids.insert(start, 0);
    configs.push(start);
    queue.push_back(0);
    while let Some(c) = queue.pop_front() {
        let (q, tape, head) = configs[c];
        let scanned = if tape >> head & 1 == 1 { Bit::One } else { Bit::Zero };
        let mut next = Vec::new();
        if kinds[q] != Kind::Accept {
            for &(read, to, write, dir) in &moves[q] {
                if read != scanned || !move_allowed(dir, head + 1, len) {
                    continue;
                }
                let tape = match write {
                    Bit::One => tape | (1 << head),
                    Bit::Zero => tape & !(1 << head),
                };
                let head = head.checked_add_signed(dir.offset()).expect("in bounds");
                let packed = (to, tape, head);
                let id = *ids.entry(packed).or_insert_with(|| {
                    configs.push(packed);
                    queue.push_back(configs.len() - 1);
                    configs.len() - 1
                });
                next.push(id);
            }
        }
        succ.push(next);
    }

    let mut marked = vec![false; configs.len()];
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut changed = false;
        for c in 0..configs.len() {
            if marked[c] {
                continue;
            }
            let (q, _, head) = configs[c];
            let accepts = match kinds[q] {
                Kind::Accept => head + 1 == len,
                Kind::Or => succ[c].iter().any(|&s| marked[s]),
                Kind::And => succ[c].iter().all(|&s| marked[s]),
            };
            if accepts {
                marked[c] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(Acceptance { accepted: marked[0], configs: configs.len(), rounds })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn machine(kinds: &[(&str, Kind)], delta: &[[&str; 5]]) -> Machine {
        let json = serde_json::json!({
            "states": kinds.iter().map(|(q, _)| q).collect::<Vec<_>>(),
            "initial": kinds[0].0,
            "kind": kinds.iter().map(|(q, k)| (q.to_string(), k)).collect::<BTreeMap<_, _>>(),
            "delta": delta,
        });
        Machine::from_json(&json.to_string()).unwrap()
    }

    fn cfg(q: &str, tape: &str, head: usize) -> Config {
        Config { state: q.into(), tape: parse_word(tape).unwrap(), head }
    }

    #[test]
    fn boundary_filtering() {
        let m = machine(&[("q0", Kind::Or)], &[["q0", "0", "q0", "0", "L"], ["q0", "1", "q0", "1", "R"]]);
        assert!(consistent_transitions(&m, &cfg("q0", "00", 1)).is_empty());
        assert!(consistent_transitions(&m, &cfg("q0", "01", 2)).is_empty());
        assert_eq!(consistent_transitions(&m, &cfg("q0", "01", 1)).len(), 0);
        assert_eq!(consistent_transitions(&m, &cfg("q0", "00", 2)).len(), 1);
    }

    #[test]
    fn single_consistent_move() {
        let m = machine(&[("q0", Kind::Or), ("q1", Kind::Accept)], &[["q0", "0", "q1", "1", "R"]]);
        let ts = consistent_transitions(&m, &cfg("q0", "00", 1));
        assert_eq!(ts, vec![&m.delta()[0]]);
        assert_eq!(apply_transition(&cfg("q0", "00", 1), ts[0]).unwrap(), cfg("q1", "10", 2));
    }

    #[test]
    fn apply_left_move() {
        let t = Transition { from: "q0".into(), read: Bit::One, to: "q2".into(), write: Bit::Zero, dir: Dir::L };
        assert_eq!(apply_transition(&cfg("q0", "01", 2), &t).unwrap(), cfg("q2", "00", 1));
        // no move fits a one-cell word
        assert!(apply_transition(&cfg("q0", "1", 1), &t).is_err());
        let r = Transition { dir: Dir::R, ..t };
        assert!(apply_transition(&cfg("q0", "1", 1), &r).is_err());
    }

    #[test]
    fn acceptance_base_cases() {
        let dummy = [["q0", "0", "q0", "0", "R"]];
        let acc = machine(&[("q0", Kind::Accept)], &dummy);
        assert!(accepts_in_place(&acc, &parse_word("1").unwrap()).unwrap());
        assert!(!accepts_in_place(&acc, &parse_word("10").unwrap()).unwrap());
        let stuck = machine(&[("q0", Kind::And)], &dummy);
        assert!(accepts_in_place(&stuck, &parse_word("1").unwrap()).unwrap());
        let stuck_or = machine(&[("q0", Kind::Or)], &dummy);
        assert!(!accepts_in_place(&stuck_or, &parse_word("1").unwrap()).unwrap());
    }

    #[test]
    fn cycles_do_not_accept() {
        // q0 bounces between the two cells forever
        let m = machine(
            &[("q0", Kind::Or), ("q1", Kind::Or)],
            &[["q0", "0", "q1", "0", "R"], ["q1", "0", "q0", "0", "L"]],
        );
        let a = decide(&m, &parse_word("00").unwrap()).unwrap();
        assert!(!a.accepted);
        assert_eq!(a.configs, 2);
    }

    #[test]
    fn and_needs_every_branch() {
        let m = machine(
            &[("q0", Kind::And), ("yes", Kind::Accept), ("no", Kind::Or)],
            &[["q0", "0", "yes", "0", "R"], ["q0", "0", "no", "1", "R"]],
        );
        assert!(!accepts_in_place(&m, &parse_word("00").unwrap()).unwrap());
        let m = machine(
            &[("q0", Kind::And), ("yes", Kind::Accept)],
            &[["q0", "0", "yes", "0", "R"], ["q0", "0", "yes", "1", "R"]],
        );
        assert!(accepts_in_place(&m, &parse_word("00").unwrap()).unwrap());
    }

    #[test]
    fn invalid_machines() {
        let bad = |s: &str| Machine::from_json(s).unwrap_err();
        assert!(matches!(
            bad(r#"{"states":["q0"],"initial":"q0","kind":{"q0":"or"},"delta":[]}"#),
            AlbaError::InvalidMachine(_)
        ));
        assert!(matches!(
            bad(r#"{"states":["q0"],"initial":"q0","kind":{"q0":"or"},"delta":[["q0","0","q0","0","U"]]}"#),
            AlbaError::Format(_)
        ));
        assert!(matches!(
            bad(r#"{"states":["q0"],"initial":"q1","kind":{"q0":"or"},"delta":[["q0","0","q0","0","L"]]}"#),
            AlbaError::InvalidMachine(_)
        ));
        assert!(matches!(
            bad(r#"{"states":["q0"],"initial":"q0","kind":{"q0":"maybe"},"delta":[["q0","0","q0","0","L"]]}"#),
            AlbaError::Format(_)
        ));
        assert!(matches!(
            bad(r#"{"states":["q0"],"initial":"q0","kind":{},"delta":[["q0","0","q0","0","L"]]}"#),
            AlbaError::InvalidMachine(_)
        ));
    }

    #[test]
    fn json_roundtrip() {
        let m = machine(&[("q0", Kind::Or), ("q1", Kind::Accept)], &[["q0", "0", "q1", "1", "R"]]);
        assert_eq!(Machine::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn words() {
        assert_eq!(parse_word("01").unwrap(), vec![Bit::Zero, Bit::One]);
        assert!(parse_word("").is_err());
        assert!(parse_word("012").is_err());
        let m = machine(&[("q0", Kind::Accept)], &[["q0", "0", "q0", "0", "R"]]);
        assert_eq!(decide(&m, &[Bit::Zero; 65]), Err(AlbaError::WordTooLong(65)));
    }
}
