//! Types whose inhabitants encode computations.
//!
//! [`gen_t`] builds the family `T(n)` whose unique inhabitant has `2^n - 1`
//! applications. [`reduce`] compiles an alternating LBA and an input word
//! of length `n` into an intersection of `n + 2` rows: one per tape cell,
//! one for the head position and one for the machine state. Every column
//! is one argument slot across all rows, so the variable bound for it
//! carries one type per row and acts as one machine step.

use thiserror::Error;

use crate::alba::{AlbaError, Bit, Dir, Kind, Machine};
use crate::types::TypeExpr;

fn a(name: &str) -> TypeExpr {
    TypeExpr::atom(name)
}

/// `T(n) = τ1 & ... & τn` with
/// `τi = α -> Ψ^(i-1) -> (α -> β) -> (β -> α)^(n-i) -> β` and
/// `Ψ = (α -> α) & (β -> β)`, using atoms `a` for α and `b` for β.
///
/// # Panics
/// If `n == 0`.
pub fn gen_t(n: usize) -> TypeExpr {
    assert!(n >= 1, "T(n) needs n >= 1");
    let (alpha, beta) = (a("a"), a("b"));
    let psi = TypeExpr::inter([
        TypeExpr::arrow(alpha.clone(), alpha.clone()),
        TypeExpr::arrow(beta.clone(), beta.clone()),
    ]);
    let rows = (1..=n).map(|i| {
        let mut args = vec![alpha.clone()];
        args.extend(std::iter::repeat_n(psi.clone(), i - 1));
        args.push(TypeExpr::arrow(alpha.clone(), beta.clone()));
        args.extend(std::iter::repeat_n(TypeExpr::arrow(beta.clone(), alpha.clone()), n - i));
        TypeExpr::arrows(args, beta.clone())
    });
    TypeExpr::inter(rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Machine(#[from] AlbaError),
    #[error("state name {0} collides with a tape or head atom")]
    ReservedStateName(String),
}

/// Atom names used by the rows: tape symbols `s0 s1 sF`, head positions
/// `p0 .. pn`, and the machine states plus a fresh accepting sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowAtoms {
    pub n: usize,
    pub q_acc: String,
}

impl RowAtoms {
    fn new(m: &Machine, n: usize) -> Result<RowAtoms, ReductionError> {
        for q in m.states() {
            if is_reserved(q) {
                return Err(ReductionError::ReservedStateName(q.clone()));
            }
        }
        let mut q_acc = String::from("q_acc");
        while m.states().contains(&q_acc) {
            q_acc.push('_');
        }
        Ok(RowAtoms { n, q_acc })
    }

    pub fn sym(&self, b: Bit) -> TypeExpr {
        match b {
            Bit::Zero => a("s0"),
            Bit::One => a("s1"),
        }
    }

    pub fn sym_fill(&self) -> TypeExpr {
        a("sF")
    }

    pub fn pos(&self, i: usize) -> TypeExpr {
        debug_assert!(i <= self.n);
        a(&format!("p{i}"))
    }

    pub fn state(&self, q: &str) -> TypeExpr {
        a(q)
    }

    pub fn accept_sink(&self) -> TypeExpr {
        a(&self.q_acc)
    }

    /// `(s0 -> ... -> s0) & (s1 -> ... -> s1)` with `p` arrows each.
    pub fn id(&self, p: usize) -> TypeExpr {
        TypeExpr::inter(Bit::ALL.map(|b| TypeExpr::arrows(vec![self.sym(b); p], self.sym(b))))
    }
}

fn is_reserved(q: &str) -> bool {
    matches!(q, "s0" | "s1" | "sF")
        || q.strip_prefix('p').is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

/// Why a column exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColumnOrigin {
    /// Moves any accepting state with the head on the last cell to the
    /// sink.
    Accepting,
    /// One transition of an OR state, applied with the head at `head`.
    Or { transition: usize, head: usize },
    /// All transitions of an AND state reading `symbol` at `head`.
    And { state: String, symbol: Bit, head: usize, transitions: Vec<usize> },
    /// Fill symbols, head position 0 and the sink: the final configuration.
    Final,
    /// The input word, head at 1, initial state. Always the result column.
    Initial,
}

/// One column: the type contributed to each of the `n + 2` rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnSpec {
    pub origin: ColumnOrigin,
    pub rows: Vec<TypeExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub atoms: RowAtoms,
    /// Argument columns, left to right. The last is the `Final` column.
    pub columns: Vec<ColumnSpec>,
    /// The result column.
    pub result: ColumnSpec,
}

impl Reduction {
    /// Row `i` is `C1[i] -> ... -> Cm[i] -> result[i]`.
    pub fn rows(&self) -> Vec<TypeExpr> {
        (0..self.result.rows.len())
            .map(|i| TypeExpr::arrows(self.columns.iter().map(|c| c.rows[i].clone()), self.result.rows[i].clone()))
            .collect()
    }

    /// Total column count, the result column included.
    pub fn column_count(&self) -> usize {
        self.columns.len() + 1
    }

    pub fn to_type(&self) -> TypeExpr {
        TypeExpr::inter(self.rows())
    }
}

/// The reduction type for `m` on `word`.
pub fn reduce(m: &Machine, word: &[Bit]) -> Result<TypeExpr, ReductionError> {
    build_reduction(m, word).map(|r| r.to_type())
}

pub fn build_reduction(m: &Machine, word: &[Bit]) -> Result<Reduction, ReductionError> {
    if word.is_empty() {
        return Err(AlbaError::InvalidWord(String::new()).into());
    }
    let n = word.len();
    let at = RowAtoms::new(m, n)?;
    let head_row = n;
    let state_row = n + 1;
    let mut columns = Vec::new();

    let accepting: Vec<&String> = m.states().iter().filter(|q| m.kind(q) == Kind::Accept).collect();
    if !accepting.is_empty() {
        let s = TypeExpr::inter(Bit::ALL.map(|b| TypeExpr::arrow(at.sym_fill(), at.sym(b))));
        let mut rows = vec![s; n];
        rows.push(TypeExpr::arrow(at.pos(0), at.pos(n)));
        rows.push(TypeExpr::inter(
            accepting.iter().map(|q| TypeExpr::arrow(at.accept_sink(), at.state(q))),
        ));
        columns.push(ColumnSpec { origin: ColumnOrigin::Accepting, rows });
    }

    for (ti, t) in m.delta().iter().enumerate() {
        if m.kind(&t.from) != Kind::Or {
            continue;
        }
        let heads = match t.dir {
            Dir::L => 2..=n,
            Dir::R => 1..=n.saturating_sub(1),
        };
        for j in heads {
            let mut rows = vec![at.id(1); n];
            rows[j - 1] = TypeExpr::arrow(at.sym(t.write), at.sym(t.read));
            let moved = j.checked_add_signed(t.dir.offset()).expect("position in range");
            rows.push(TypeExpr::arrow(at.pos(moved), at.pos(j)));
            rows.push(TypeExpr::arrow(at.state(&t.to), at.state(&t.from)));
            debug_assert_eq!(rows.len(), state_row + 1);
            columns.push(ColumnSpec { origin: ColumnOrigin::Or { transition: ti, head: j }, rows });
        }
    }

    for q in m.states() {
        if m.kind(q) != Kind::And {
            continue;
        }
        for s in Bit::ALL {
            for i in 1..=n {
                let avail: Vec<usize> = m
                    .delta()
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| {
                        t.from == *q
                            && t.read == s
                            && match t.dir {
                                Dir::L => i > 1,
                                Dir::R => i < n,
                            }
                    })
                    .map(|(ti, _)| ti)
                    .collect();
                let ts: Vec<_> = avail.iter().map(|&ti| &m.delta()[ti]).collect();
                let mut rows = vec![at.id(ts.len()); n];
                rows[i - 1] = TypeExpr::arrows(ts.iter().map(|t| at.sym(t.write)), at.sym(s));
                rows.push(TypeExpr::arrows(
                    ts.iter().map(|t| at.pos(i.checked_add_signed(t.dir.offset()).expect("in range"))),
                    at.pos(i),
                ));
                rows.push(TypeExpr::arrows(ts.iter().map(|t| at.state(&t.to)), at.state(q)));
                columns.push(ColumnSpec {
                    origin: ColumnOrigin::And { state: q.clone(), symbol: s, head: i, transitions: avail },
                    rows,
                });
            }
        }
    }

    let mut fin = vec![at.sym_fill(); n];
    fin.push(at.pos(0));
    fin.push(at.accept_sink());
    columns.push(ColumnSpec { origin: ColumnOrigin::Final, rows: fin });

    let mut init: Vec<TypeExpr> = word.iter().map(|&b| at.sym(b)).collect();
    init.push(at.pos(1));
    init.push(at.state(m.initial()));
    debug_assert_eq!(init.len(), head_row + 2);

    Ok(Reduction {
        atoms: at,
        columns,
        result: ColumnSpec { origin: ColumnOrigin::Initial, rows: init },
    })
}
