//! Brute-force enumeration of long solutions by direct unfolding of their
//! definition, with no memoization and no pruning beyond a nesting-depth
//! bound. Used to certify the solver, so it shares nothing with the
//! search engine beyond the type syntax.

use std::collections::HashSet;
use std::sync::Arc;

use crate::solver::{initial_task, SolveError};
use crate::term::{Name, Term};
use crate::types::{components, TypeExpr};

type Row = (Vec<(Name, TypeExpr)>, TypeExpr);

/// All long solutions of `goal` with nesting depth at most `depth`.
pub fn enumerate_long(goal: &TypeExpr, depth: usize) -> Result<Vec<Term>, SolveError> {
    Ok(enumerate_long_capped(goal, depth, usize::MAX)?.expect("unbounded work"))
}

/// As [`enumerate_long`], giving up with `None` after `max_work` recursive
/// calls plus produced terms.
pub fn enumerate_long_capped(goal: &TypeExpr, depth: usize, max_work: usize) -> Result<Option<Vec<Term>>, SolveError> {
    let rows = goal_rows(goal)?;
    let mut work = max_work;
    Ok(enumerate(&rows, depth, &mut work))
}

fn goal_rows(goal: &TypeExpr) -> Result<Vec<Row>, SolveError> {
    let task = initial_task(goal)?;
    Ok(task
        .judgments
        .into_iter()
        .map(|j| (j.env.decls().to_vec(), j.target))
        .collect())
}

/// Ways to type `x M1 .. Mk` from `x : ty`: argument types and the result.
fn typings(ty: &TypeExpr) -> Vec<(Vec<TypeExpr>, TypeExpr)> {
    let mut out = Vec::new();
    for c in components(ty) {
        out.push((Vec::new(), c.clone()));
        if let TypeExpr::Arrow(l, r) = c {
            for (mut args, tail) in typings(r) {
                args.insert(0, (**l).clone());
                out.push((args, tail));
            }
        }
    }
    out
}

fn is_arrow(t: &TypeExpr) -> bool {
    matches!(t, TypeExpr::Arrow(..))
}

fn bind(rows: &[Row]) -> (Name, Vec<Row>) {
    let x: Name = Arc::from(format!("x{}", rows[0].0.len() + 1));
    let mut out = Vec::new();
    for (env, target) in rows {
        let TypeExpr::Arrow(arg, res) = target else {
            unreachable!("all targets are arrows")
        };
        let mut env = env.clone();
        env.push((x.clone(), (**arg).clone()));
        for c in components(res) {
            out.push((env.clone(), c.clone()));
        }
    }
    (x, out)
}

/// Per row, the typings of declaration `d` that end in the row's target,
/// grouped by arity.
fn head_options(rows: &[Row], d: usize) -> Vec<(usize, Vec<Vec<Vec<TypeExpr>>>)> {
    let per_row: Vec<Vec<(Vec<TypeExpr>, TypeExpr)>> = rows
        .iter()
        .map(|(env, target)| typings(&env[d].1).into_iter().filter(|(_, t)| t == target).collect())
        .collect();
    let max_k = per_row
        .iter()
        .map(|r| r.iter().map(|(a, _)| a.len()).max().unwrap_or(0))
        .min()
        .unwrap_or(0);
    let mut out = Vec::new();
    for k in 0..=max_k {
        let options: Vec<Vec<Vec<TypeExpr>>> = per_row
            .iter()
            .map(|r| r.iter().filter(|(a, _)| a.len() == k).map(|(a, _)| a.clone()).collect())
            .collect();
        if options.iter().all(|o: &Vec<Vec<TypeExpr>>| !o.is_empty()) {
            out.push((k, options));
        }
    }
    out
}

/// Every way of picking one entry from each list.
fn choices<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::new();
        for prefix in &acc {
            for x in l {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        acc = next;
    }
    acc
}

fn tick(work: &mut usize, n: usize) -> bool {
    if *work < n {
        return false;
    }
    *work -= n;
    true
}

fn enumerate(rows: &[Row], depth: usize, work: &mut usize) -> Option<Vec<Term>> {
    if !tick(work, 1) {
        return None;
    }
    if depth == 0 {
        return Some(Vec::new());
    }
    if rows.iter().all(|(_, t)| is_arrow(t)) {
        let (x, inner) = bind(rows);
        let bodies = enumerate(&inner, depth, work)?;
        return Some(bodies.into_iter().map(|b| Term::lam(x.clone(), b)).collect());
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for d in 0..rows[0].0.len() {
        let name = rows[0].0[d].0.clone();
        for (k, options) in head_options(rows, d) {
            for pick in choices(&options) {
                let mut arg_terms: Vec<Vec<Term>> = Vec::with_capacity(k);
                for j in 0..k {
                    let sub: Vec<Row> = rows
                        .iter()
                        .zip(&pick)
                        .map(|((env, _), args)| (env.clone(), args[j].clone()))
                        .collect();
                    let ts = enumerate(&sub, depth - 1, work)?;
                    if ts.is_empty() {
                        break;
                    }
                    arg_terms.push(ts);
                }
                if arg_terms.len() < k {
                    continue;
                }
                for args in choices(&arg_terms) {
                    if !tick(work, 1) {
                        return None;
                    }
                    let t = Term::apply(Term::Var(name.clone()), args);
                    if seen.insert(t.clone()) {
                        out.push(t);
                    }
                }
            }
        }
    }
    Some(out)
}

/// Whether `term` is a long solution of the initial task for `goal`.
pub fn is_long_solution(goal: &TypeExpr, term: &Term) -> Result<bool, SolveError> {
    Ok(is_long(&goal_rows(goal)?, term))
}

fn is_long(rows: &[Row], term: &Term) -> bool {
    if rows.iter().all(|(_, t)| is_arrow(t)) {
        let Term::Lam(x, body) = term else {
            return false;
        };
        if rows[0].0.iter().any(|(n, _)| n == x) {
            return false;
        }
        let mut inner = Vec::new();
        for (env, target) in rows {
            let TypeExpr::Arrow(arg, res) = target else { unreachable!() };
            let mut env = env.clone();
            env.push((x.clone(), (**arg).clone()));
            for c in components(res) {
                inner.push((env.clone(), c.clone()));
            }
        }
        return is_long(&inner, body);
    }
    let (head, args) = term.spine();
    let Term::Var(x) = head else {
        return false;
    };
    let Some(d) = rows[0].0.iter().position(|(n, _)| n == x) else {
        return false;
    };
    let k = args.len();
    let Some((_, options)) = head_options(rows, d).into_iter().find(|(kk, _)| *kk == k) else {
        return false;
    };
    choices(&options).into_iter().any(|pick| {
        (0..k).all(|j| {
            let sub: Vec<Row> = rows
                .iter()
                .zip(&pick)
                .map(|((env, _), a)| (env.clone(), a[j].clone()))
                .collect();
            is_long(&sub, args[j])
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{alpha_equal, parse_term};
    use crate::types::parse_type;

    fn ty(s: &str) -> TypeExpr {
        parse_type(s).unwrap()
    }

    #[test]
    fn identity() {
        let ts = enumerate_long(&ty("a -> a"), 3).unwrap();
        assert_eq!(ts.len(), 1);
        assert!(alpha_equal(&ts[0], &parse_term("\\x. x").unwrap()));
    }

    #[test]
    fn atom_is_empty() {
        assert!(enumerate_long(&ty("a"), 5).unwrap().is_empty());
    }

    #[test]
    fn self_application_found_at_depth_two() {
        let goal = ty("(a & (a -> b)) -> b");
        assert!(enumerate_long(&goal, 1).unwrap().is_empty());
        let ts = enumerate_long(&goal, 2).unwrap();
        assert_eq!(ts.len(), 1);
        assert!(alpha_equal(&ts[0], &parse_term("\\x. x x").unwrap()));
    }

    #[test]
    fn church_numerals_grow_with_depth() {
        let goal = ty("(a -> a) -> a -> a");
        assert_eq!(enumerate_long(&goal, 1).unwrap().len(), 1);
        assert_eq!(enumerate_long(&goal, 4).unwrap().len(), 4);
    }

    #[test]
    fn work_cap() {
        let goal = ty("(a -> a) -> a -> a");
        assert_eq!(enumerate_long_capped(&goal, 50, 10).unwrap(), None);
    }

    #[test]
    fn long_form_check() {
        let goal = ty("(a & (a -> b)) -> b");
        assert!(is_long_solution(&goal, &parse_term("\\y. y y").unwrap()).unwrap());
        assert!(!is_long_solution(&goal, &parse_term("\\y. y").unwrap()).unwrap());
        // not eta-long
        let goal = ty("(a -> b) -> a -> b");
        assert!(!is_long_solution(&goal, &parse_term("\\f. f").unwrap()).unwrap());
        assert!(is_long_solution(&goal, &parse_term("\\f x. f x").unwrap()).unwrap());
    }

    #[test]
    fn rank_guard() {
        assert_eq!(
            enumerate_long(&ty("((a & b) -> c) -> c"), 3),
            Err(SolveError::RankTooHigh(3))
        );
    }
}
