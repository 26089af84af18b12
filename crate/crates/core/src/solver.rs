//! Inhabitation for types of rank at most two.
//!
//! The alternating procedure works on tasks: lists of judgments
//! `Γi |- M : τi` that constrain one unknown term `M`. When every target is
//! an arrow the term is an abstraction (case 1); when some target is an
//! atom the term is a head variable applied to arguments whose subtasks
//! must all be solved (case 2); otherwise there is no long solution.
//!
//! [`solve`] realizes it as an AND-OR graph over configuration keys (tasks
//! up to variable names and variables with duplicate type vectors). The
//! reachable graph is finite for rank-two goals. Once it is built, a
//! Knuth-style generalized Dijkstra pass computes for every key the least
//! nesting depth of a long solution, which is the least fixpoint of the
//! procedure: keys whose only support is a cycle stay unsolved. The witness
//! is read back along the cheapest alternatives and comes with a full
//! typing derivation.

pub mod oracle;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};
use std::ops::Range;
use std::sync::Arc;
use std::time::{Duration, Instant};

use itertools::Itertools;
use thiserror::Error;

use crate::term::{Derivation, Env, Name, Term};
use crate::types::{components, rank, size, spines, Spine, TypeExpr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgment {
    pub env: Env,
    pub target: TypeExpr,
}

/// Parallel judgments sharing one unknown term. Every environment declares
/// the same names in the same order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub judgments: Vec<Judgment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("goal has rank {0}; only rank <= 2 is decidable by this procedure")]
    RankTooHigh(usize),
    #[error("abstraction needs every target to be an arrow")]
    NotAllArrows,
    #[error("variable {0} is already declared")]
    NameInUse(Name),
    #[error("task width {width} exceeds goal size {bound}")]
    WidthBound { width: usize, bound: usize },
    #[error("environment declaration of rank {0} (expected <= 1)")]
    EnvRank(usize),
}

/// Splits an intersection target into one judgment per component.
pub fn rem(env: &Env, target: &TypeExpr) -> Vec<Judgment> {
    components(target)
        .iter()
        .map(|c| Judgment { env: env.clone(), target: c.clone() })
        .collect()
}

pub fn initial_task(goal: &TypeExpr) -> Result<Task, SolveError> {
    let r = rank(goal);
    if r > 2 {
        return Err(SolveError::RankTooHigh(r));
    }
    Ok(Task { judgments: rem(&Env::new(), goal) })
}

/// Case 1: binds `fresh` in every environment and splits the results.
pub fn abstraction_step(z: &Task, fresh: Name) -> Result<Task, SolveError> {
    abstract_rows(&z.judgments, fresh).map(|(judgments, _)| Task { judgments })
}

/// Like [`abstraction_step`], also returning which new judgments each old
/// judgment became.
fn abstract_rows(rows: &[Judgment], fresh: Name) -> Result<(Vec<Judgment>, Vec<Range<usize>>), SolveError> {
    let mut out = Vec::new();
    let mut ranges = Vec::with_capacity(rows.len());
    for j in rows {
        let (arg, res) = j.target.as_arrow().ok_or(SolveError::NotAllArrows)?;
        let env = j
            .env
            .extend(fresh.clone(), arg.clone())
            .ok_or_else(|| SolveError::NameInUse(fresh.clone()))?;
        let start = out.len();
        out.extend(rem(&env, res));
        ranges.push(start..out.len());
    }
    Ok((out, ranges))
}

/// A way to close a task with a head variable: `arity` arguments, and for
/// every judgment the spine of the variable's declared type used there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub var: Name,
    pub arity: usize,
    pub spines: Vec<Spine>,
}

impl Candidate {
    /// The argument types, one list of `arity` types per judgment.
    pub fn arg_matrix(&self) -> Vec<Vec<TypeExpr>> {
        self.spines.iter().map(|s| s.args.clone()).collect()
    }

    /// The argument subtasks `Z1 .. Zk`.
    pub fn subtasks(&self, z: &Task) -> Vec<Task> {
        (0..self.arity)
            .map(|j| Task {
                judgments: z
                    .judgments
                    .iter()
                    .zip(&self.spines)
                    .map(|(jd, s)| Judgment { env: jd.env.clone(), target: s.args[j].clone() })
                    .collect(),
            })
            .collect()
    }
}

/// Case 2 alternatives, ordered by declaration order of the variable, then
/// arity, then spine choice. Empty when no target is an atom, or when no
/// variable fits every judgment (case 3).
pub fn candidate_heads(z: &Task) -> Vec<Candidate> {
    if !z.judgments.iter().any(|j| matches!(j.target, TypeExpr::Atom(_))) {
        return Vec::new();
    }
    let Some(first) = z.judgments.first() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (d, (name, _)) in first.env.decls().iter().enumerate() {
        let per_row: Vec<Vec<Spine>> = z.judgments.iter().map(|j| spines(&j.env.decls()[d].1)).collect();
        let targets: Vec<&TypeExpr> = z.judgments.iter().map(|j| &j.target).collect();
        for (arity, choice) in head_choices(&per_row, &targets, |s| s.tail(), |s| &s.args) {
            out.push(Candidate {
                var: name.clone(),
                arity,
                spines: choice.iter().zip(&per_row).map(|(&c, ss)| ss[c].clone()).collect(),
            });
        }
    }
    out
}

/// Every `(arity, per-row spine index)` such that row `i` uses a spine of
/// that arity whose tail is `targets[i]`. Spines with identical argument
/// lists within a row are interchangeable, so only the first is kept.
fn head_choices<S, T: PartialEq, A: PartialEq>(
    per_row: &[Vec<S>],
    targets: &[&T],
    tail: impl Fn(&S) -> &T,
    args: impl Fn(&S) -> &A,
) -> Vec<(usize, Vec<usize>)>
where
    S: HasArity,
{
    let mut by_arity: Vec<BTreeMap<usize, Vec<usize>>> = Vec::with_capacity(per_row.len());
    for (row, target) in per_row.iter().zip(targets) {
        let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, s) in row.iter().enumerate() {
            if tail(s) != *target {
                continue;
            }
            let slot = m.entry(s.arity()).or_default();
            if !slot.iter().any(|&j| args(&row[j]) == args(s)) {
                slot.push(i);
            }
        }
        if m.is_empty() {
            return Vec::new();
        }
        by_arity.push(m);
    }
    let Some(first) = by_arity.first() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for &k in first.keys() {
        let Some(lists) = by_arity.iter().map(|m| m.get(&k)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        for choice in lists.iter().map(|l| l.iter().copied()).multi_cartesian_product() {
            out.push((k, choice));
        }
    }
    out
}

trait HasArity {
    fn arity(&self) -> usize;
}

impl HasArity for Spine {
    fn arity(&self) -> usize {
        self.args.len()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Limits {
    pub max_configs: Option<usize>,
    pub max_time: Option<Duration>,
}

impl Limits {
    pub fn unlimited() -> Limits {
        Limits::default()
    }

    pub fn configs(n: usize) -> Limits {
        Limits { max_configs: Some(n), max_time: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Distinct configuration keys created.
    pub configs: usize,
    /// Largest number of simultaneous judgments seen.
    pub max_width: usize,
    /// Largest rank of any type put into an environment.
    pub max_env_rank: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exhausted {
    Configs(usize),
    Time(Duration),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub term: Term,
    pub derivation: Derivation,
    /// Long-form nesting depth of `term`, the least over all long
    /// solutions.
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Inhabited(Witness),
    Empty,
    ResourceExceeded(Exhausted),
}

impl SolveResult {
    pub fn is_inhabited(&self) -> bool {
        matches!(self, SolveResult::Inhabited(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            SolveResult::Inhabited(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub result: SolveResult,
    pub stats: SolveStats,
}

/// Decides inhabitation of `goal` and, when inhabited, returns a long
/// inhabitant of least nesting depth together with its derivation.
///
/// Ties between equally deep alternatives go to the earliest declared head
/// variable, then the smaller arity, then the earlier spine choice.
pub fn solve(goal: &TypeExpr, limits: Limits) -> Result<Solution, SolveError> {
    let task = initial_task(goal)?;
    let started = Instant::now();
    let mut engine = Engine::new(size(goal), limits, started);
    let root_state = engine.state_of(&task.judgments);
    let root = engine.explore(root_state);
    let mut stats = engine.stats.clone();
    stats.elapsed = started.elapsed();
    let root = match root {
        Ok(root) => root,
        Err(Stop::Exhausted(e)) => return Ok(Solution { result: SolveResult::ResourceExceeded(e), stats }),
        Err(Stop::Invalid(e)) => return Err(e),
    };
    let costs = engine.least_costs();
    let result = match costs[root] {
        None => SolveResult::Empty,
        Some(depth) => {
            let (term, mut ds) = engine.read_back(root, &task.judgments, &costs);
            let derivation = if ds.len() == 1 {
                ds.pop().unwrap()
            } else {
                Derivation::intersect(ds)
            };
            SolveResult::Inhabited(Witness { term, derivation, depth: depth as usize })
        }
    };
    stats.elapsed = started.elapsed();
    Ok(Solution { result, stats })
}

type TyId = u32;
type NodeId = usize;

/// A task with names erased: `vars[v][i]` is the type of variable `v` in
/// judgment `i`, with duplicate vectors dropped.
#[derive(Clone, Debug)]
struct State {
    vars: Vec<Vec<TyId>>,
    targets: Vec<TyId>,
}

impl State {
    fn key(&self) -> (Vec<Vec<TyId>>, Vec<TyId>) {
        let mut vars = self.vars.clone();
        vars.sort();
        (vars, self.targets.clone())
    }
}

#[derive(Clone, Debug)]
struct SpineIds {
    args: Vec<TyId>,
    tail: TyId,
}

impl HasArity for SpineIds {
    fn arity(&self) -> usize {
        self.args.len()
    }
}

enum Expansion {
    Lam(NodeId),
    Or(Vec<Alt>),
}

struct Alt {
    var: usize,
    choices: Vec<usize>,
    children: Vec<NodeId>,
}

enum Stop {
    Exhausted(Exhausted),
    Invalid(SolveError),
}

struct Engine {
    ids: HashMap<TypeExpr, TyId>,
    types: Vec<TypeExpr>,
    spine_cache: HashMap<TyId, Arc<[SpineIds]>>,
    keys: HashMap<(Vec<Vec<TyId>>, Vec<TyId>), NodeId>,
    states: Vec<State>,
    expansions: Vec<Option<Expansion>>,
    width_bound: usize,
    limits: Limits,
    started: Instant,
    stats: SolveStats,
}

impl Engine {
    fn new(width_bound: usize, limits: Limits, started: Instant) -> Engine {
        Engine {
            ids: HashMap::new(),
            types: Vec::new(),
            spine_cache: HashMap::new(),
            keys: HashMap::new(),
            states: Vec::new(),
            expansions: Vec::new(),
            width_bound,
            limits,
            started,
            stats: SolveStats::default(),
        }
    }

    fn intern(&mut self, t: &TypeExpr) -> TyId {
        if let Some(&id) = self.ids.get(t) {
            return id;
        }
        let id = self.types.len() as TyId;
        self.types.push(t.clone());
        self.ids.insert(t.clone(), id);
        id
    }

    fn spines_of(&mut self, id: TyId) -> Arc<[SpineIds]> {
        if let Some(s) = self.spine_cache.get(&id) {
            return s.clone();
        }
        let ty = self.types[id as usize].clone();
        let list: Vec<SpineIds> = spines(&ty)
            .iter()
            .map(|s| SpineIds {
                args: s.args.iter().map(|a| self.intern(a)).collect(),
                tail: self.intern(s.tail()),
            })
            .collect();
        let list: Arc<[SpineIds]> = list.into();
        self.spine_cache.insert(id, list.clone());
        list
    }

    fn state_of(&mut self, rows: &[Judgment]) -> State {
        let targets = rows.iter().map(|j| self.intern(&j.target)).collect();
        let mut vars: Vec<Vec<TyId>> = Vec::new();
        for d in 0..rows.first().map_or(0, |j| j.env.len()) {
            let v: Vec<TyId> = rows.iter().map(|j| self.intern(&j.env.decls()[d].1)).collect();
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        State { vars, targets }
    }

    /// Returns the node for `state`, creating it if its key is new.
    fn node(&mut self, state: State, queue: &mut VecDeque<NodeId>) -> Result<NodeId, Stop> {
        let key = state.key();
        if let Some(&n) = self.keys.get(&key) {
            return Ok(n);
        }
        let width = state.targets.len();
        if width > self.width_bound {
            return Err(Stop::Invalid(SolveError::WidthBound { width, bound: self.width_bound }));
        }
        self.stats.max_width = self.stats.max_width.max(width);
        if let Some(max) = self.limits.max_configs {
            if self.stats.configs >= max {
                return Err(Stop::Exhausted(Exhausted::Configs(max)));
            }
        }
        if let Some(max) = self.limits.max_time {
            if self.stats.configs.is_multiple_of(64) && self.started.elapsed() > max {
                return Err(Stop::Exhausted(Exhausted::Time(max)));
            }
        }
        self.stats.configs += 1;
        let n = self.states.len();
        self.states.push(state);
        self.expansions.push(None);
        self.keys.insert(key, n);
        queue.push_back(n);
        Ok(n)
    }

    fn explore(&mut self, root: State) -> Result<NodeId, Stop> {
        let mut queue = VecDeque::new();
        let root = self.node(root, &mut queue)?;
        while let Some(n) = queue.pop_front() {
            let exp = self.expand(n, &mut queue)?;
            self.expansions[n] = Some(exp);
        }
        Ok(root)
    }

    fn expand(&mut self, n: NodeId, queue: &mut VecDeque<NodeId>) -> Result<Expansion, Stop> {
        let state = self.states[n].clone();
        let all_arrows = state
            .targets
            .iter()
            .all(|&t| matches!(self.types[t as usize], TypeExpr::Arrow(..)));
        if all_arrows {
            let mut targets = Vec::new();
            let mut copies = Vec::with_capacity(state.targets.len());
            let mut bound = Vec::new();
            for &t in &state.targets {
                let (arg, res) = match &self.types[t as usize] {
                    TypeExpr::Arrow(a, r) => (a.clone(), r.clone()),
                    _ => unreachable!(),
                };
                let r = rank(&arg);
                self.stats.max_env_rank = self.stats.max_env_rank.max(r);
                if r > 1 {
                    return Err(Stop::Invalid(SolveError::EnvRank(r)));
                }
                let arg = self.intern(&arg);
                let parts = components(&res);
                copies.push(parts.len());
                for p in parts {
                    targets.push(self.intern(p));
                    bound.push(arg);
                }
            }
            let widen = |v: &Vec<TyId>| -> Vec<TyId> {
                v.iter()
                    .zip(&copies)
                    .flat_map(|(&t, &c)| std::iter::repeat_n(t, c))
                    .collect()
            };
            let mut vars: Vec<Vec<TyId>> = state.vars.iter().map(widen).collect();
            if !vars.contains(&bound) {
                vars.push(bound);
            }
            let child = self.node(State { vars, targets }, queue)?;
            return Ok(Expansion::Lam(child));
        }
        let any_atom = state
            .targets
            .iter()
            .any(|&t| matches!(self.types[t as usize], TypeExpr::Atom(_)));
        let mut alts = Vec::new();
        if !any_atom {
            return Ok(Expansion::Or(alts));
        }
        for (v, var) in state.vars.iter().enumerate() {
            let per_row: Vec<Arc<[SpineIds]>> = var.iter().map(|&t| self.spines_of(t)).collect();
            let rows: Vec<Vec<SpineIds>> = per_row.iter().map(|s| s.to_vec()).collect();
            let targets: Vec<&TyId> = state.targets.iter().collect();
            for (arity, choices) in head_choices(&rows, &targets, |s| &s.tail, |s| &s.args) {
                let mut children = Vec::with_capacity(arity);
                for j in 0..arity {
                    let targets = choices.iter().zip(&rows).map(|(&c, r)| r[c].args[j]).collect();
                    children.push(self.node(State { vars: state.vars.clone(), targets }, queue)?);
                }
                alts.push(Alt { var: v, choices, children });
            }
        }
        Ok(Expansion::Or(alts))
    }

    /// Least long-form depth per node, `None` where no finite solution
    /// exists.
    fn least_costs(&self) -> Vec<Option<u32>> {
        let n = self.states.len();
        let mut parents: Vec<Vec<(NodeId, usize)>> = vec![Vec::new(); n];
        let mut pending: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut worst: Vec<Vec<u32>> = Vec::with_capacity(n);
        let mut heap = BinaryHeap::new();
        for (p, exp) in self.expansions.iter().enumerate() {
            match exp.as_ref().expect("explored") {
                Expansion::Lam(c) => {
                    parents[*c].push((p, usize::MAX));
                    pending.push(Vec::new());
                    worst.push(Vec::new());
                }
                Expansion::Or(alts) => {
                    for (a, alt) in alts.iter().enumerate() {
                        for &c in &alt.children {
                            parents[c].push((p, a));
                        }
                        if alt.children.is_empty() {
                            heap.push(Reverse((1u32, p)));
                        }
                    }
                    pending.push(alts.iter().map(|a| a.children.len()).collect());
                    worst.push(vec![0; alts.len()]);
                }
            }
        }
        let mut cost: Vec<Option<u32>> = vec![None; n];
        while let Some(Reverse((c, node))) = heap.pop() {
            if cost[node].is_some() {
                continue;
            }
            cost[node] = Some(c);
            for &(p, a) in &parents[node] {
                if cost[p].is_some() {
                    continue;
                }
                if a == usize::MAX {
                    heap.push(Reverse((c, p)));
                } else {
                    pending[p][a] -= 1;
                    worst[p][a] = worst[p][a].max(c);
                    if pending[p][a] == 0 {
                        heap.push(Reverse((worst[p][a] + 1, p)));
                    }
                }
            }
        }
        cost
    }

    fn best_alt<'a>(&'a self, node: NodeId, costs: &[Option<u32>]) -> &'a Alt {
        let want = costs[node].expect("solved node");
        let Some(Expansion::Or(alts)) = &self.expansions[node] else {
            unreachable!("head node expected")
        };
        alts.iter()
            .find(|alt| {
                let mut worst = 0;
                for &c in &alt.children {
                    match costs[c] {
                        Some(x) => worst = worst.max(x),
                        None => return false,
                    }
                }
                worst + 1 == want
            })
            .expect("some alternative attains the least cost")
    }

    /// Builds the witness for `node` against the named judgments `rows`,
    /// returning the term and one derivation per judgment.
    fn read_back(&self, node: NodeId, rows: &[Judgment], costs: &[Option<u32>]) -> (Term, Vec<Derivation>) {
        match self.expansions[node].as_ref().expect("explored") {
            Expansion::Lam(child) => {
                let fresh: Name = Arc::from(format!("x{}", rows[0].env.len() + 1));
                let (inner, ranges) = abstract_rows(rows, fresh.clone()).expect("binders are fresh");
                let (body, ds) = self.read_back(*child, &inner, costs);
                // ranges are consecutive, so each row takes the next run
                let mut ds = ds.into_iter();
                let derivations = rows
                    .iter()
                    .zip(ranges)
                    .map(|(j, r)| {
                        let arg = j.target.as_arrow().expect("arrow target").0.clone();
                        let body = Derivation::intersect(ds.by_ref().take(r.len()).collect());
                        Derivation::abstraction(j.env.clone(), fresh.clone(), arg, body)
                    })
                    .collect();
                (Term::lam(fresh, body), derivations)
            }
            Expansion::Or(_) => {
                let alt = self.best_alt(node, costs);
                let wanted = &self.states[node].vars[alt.var];
                let decls = rows[0].env.len();
                let d = (0..decls)
                    .find(|&d| {
                        rows.iter()
                            .zip(wanted)
                            .all(|(j, &t)| self.ids.get(&j.env.decls()[d].1) == Some(&t))
                    })
                    .expect("head variable present in environment");
                let name = rows[0].env.decls()[d].0.clone();
                let chosen: Vec<Spine> = rows
                    .iter()
                    .zip(&alt.choices)
                    .map(|(j, &c)| spines(&j.env.decls()[d].1)[c].clone())
                    .collect();
                let mut arg_terms = Vec::with_capacity(alt.children.len());
                let mut arg_ds = Vec::with_capacity(alt.children.len());
                for (k, &child) in alt.children.iter().enumerate() {
                    let sub: Vec<Judgment> = rows
                        .iter()
                        .zip(&chosen)
                        .map(|(j, s)| Judgment { env: j.env.clone(), target: s.args[k].clone() })
                        .collect();
                    let (t, ds) = self.read_back(child, &sub, costs);
                    arg_terms.push(t);
                    arg_ds.push(ds.into_iter());
                }
                let derivations = rows
                    .iter()
                    .zip(&chosen)
                    .map(|(j, s)| {
                        let declared = j.env.decls()[d].1.clone();
                        let mut acc = Derivation::var(j.env.clone(), name.clone(), declared).select(&s.stages[0]);
                        // rows are visited in order, so each iterator yields this row's premise
                        for (k, ds) in arg_ds.iter_mut().enumerate() {
                            acc = acc.apply(ds.next().expect("one derivation per row")).select(&s.stages[k + 1]);
                        }
                        acc
                    })
                    .collect();
                (Term::apply(Term::Var(name), arg_terms), derivations)
            }
        }
    }
}
