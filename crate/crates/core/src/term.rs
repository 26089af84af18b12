//! Lambda terms, typing environments, and explicit typing derivations for
//! the five-rule intersection type system (VAR, E->, I->, E&, I&).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::types::{parse_type, TypeError, TypeExpr};

pub type Name = Arc<str>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name),
    Lam(Name, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Arc::from(name))
    }

    pub fn lam(binder: Name, body: Term) -> Term {
        Term::Lam(binder, Arc::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Arc::new(fun), Arc::new(arg))
    }

    /// `head arg1 ... argk`
    pub fn apply(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// Splits `h M1 ... Mk` into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }
}

/// Application count and total node count of a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TermSize {
    pub apps: usize,
    pub nodes: usize,
}

pub fn term_size(t: &Term) -> TermSize {
    match t {
        Term::Var(_) => TermSize { apps: 0, nodes: 1 },
        Term::Lam(_, b) => {
            let s = term_size(b);
            TermSize { apps: s.apps, nodes: s.nodes + 1 }
        }
        Term::App(f, a) => {
            let (sf, sa) = (term_size(f), term_size(a));
            TermSize {
                apps: sf.apps + sa.apps + 1,
                nodes: sf.nodes + sa.nodes + 1,
            }
        }
    }
}

/// Nesting depth in long form: abstractions are free, an application
/// spine `x M1 ... Mk` costs one more than its deepest argument.
pub fn nesting_depth(t: &Term) -> usize {
    match t {
        Term::Var(_) => 1,
        Term::Lam(_, b) => nesting_depth(b),
        Term::App(..) => {
            let (head, args) = t.spine();
            let head_depth = match head {
                Term::Var(_) => 0,
                other => nesting_depth(other),
            };
            1 + args.into_iter().map(nesting_depth).max().unwrap_or(0).max(head_depth)
        }
    }
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_equal(s: &Term, t: &Term) -> bool {
    fn go<'a>(s: &'a Term, t: &'a Term, ls: &mut Vec<&'a str>, rs: &mut Vec<&'a str>) -> bool {
        match (s, t) {
            (Term::Var(x), Term::Var(y)) => {
                let bx = ls.iter().rposition(|n| *n == &**x);
                let by = rs.iter().rposition(|n| *n == &**y);
                match (bx, by) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::Lam(x, b), Term::Lam(y, c)) => {
                ls.push(x);
                rs.push(y);
                let r = go(b, c, ls, rs);
                ls.pop();
                rs.pop();
                r
            }
            (Term::App(f, a), Term::App(g, b)) => go(f, g, ls, rs) && go(a, b, ls, rs),
            _ => false,
        }
    }
    go(s, t, &mut Vec::new(), &mut Vec::new())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::Lam(..) => {
                f.write_str("\\")?;
                let mut cur = self;
                let mut first = true;
                while let Term::Lam(x, b) = cur {
                    if !first {
                        f.write_str(" ")?;
                    }
                    f.write_str(x)?;
                    first = false;
                    cur = b;
                }
                write!(f, ". {cur}")
            }
            Term::App(fun, arg) => {
                match **fun {
                    Term::Lam(..) => write!(f, "({fun})")?,
                    _ => write!(f, "{fun}")?,
                }
                match **arg {
                    Term::Var(_) => write!(f, " {arg}"),
                    _ => write!(f, " ({arg})"),
                }
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermParseError {
    #[error("empty term")]
    Empty,
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// Parses `\x1 x2. body` abstractions (`λ` is accepted for `\`), left
/// associative juxtaposition and parentheses.
pub fn parse_term(text: &str) -> Result<Term, TermParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut p = TermParser { chars, pos: 0, len: text.len() };
    p.skip_ws();
    if p.at_end() {
        return Err(TermParseError::Empty);
    }
    let t = p.term()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

struct TermParser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl TermParser {
    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |c| c.0)
    }

    fn error(&self, msg: &str) -> TermParseError {
        TermParseError::Syntax { pos: self.offset(), msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().map(|c| c.1).collect())
    }

    fn term(&mut self) -> Result<Term, TermParseError> {
        self.skip_ws();
        if matches!(self.peek(), Some('\\') | Some('λ')) {
            return self.lambda();
        }
        let mut acc = self.atom()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('\\') | Some('λ') => return Ok(Term::app(acc, self.lambda()?)),
                Some('(') => acc = Term::app(acc, self.atom()?),
                Some(c) if c.is_ascii_alphanumeric() || c == '_' => acc = Term::app(acc, self.atom()?),
                _ => return Ok(acc),
            }
        }
    }

    fn lambda(&mut self) -> Result<Term, TermParseError> {
        self.pos += 1;
        let mut binders = Vec::new();
        loop {
            self.skip_ws();
            match self.ident() {
                Some(x) => binders.push(x),
                None => break,
            }
        }
        if binders.is_empty() {
            return Err(self.error("expected a binder"));
        }
        if self.peek() != Some('.') {
            return Err(self.error("expected '.'"));
        }
        self.pos += 1;
        let body = self.term()?;
        Ok(binders
            .into_iter()
            .rev()
            .fold(body, |b, x| Term::lam(Arc::from(x), b)))
    }

    fn atom(&mut self) -> Result<Term, TermParseError> {
        self.skip_ws();
        if self.peek() == Some('(') {
            self.pos += 1;
            let t = self.term()?;
            self.skip_ws();
            if self.peek() != Some(')') {
                return Err(self.error("expected ')'"));
            }
            self.pos += 1;
            return Ok(t);
        }
        match self.ident() {
            Some(x) => Ok(Term::Var(Arc::from(x))),
            None => Err(self.error("expected a variable, '(' or an abstraction")),
        }
    }
}

/// An ordered list of declarations with pairwise distinct names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Env {
    decls: Vec<(Name, TypeExpr)>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn decls(&self) -> &[(Name, TypeExpr)] {
        &self.decls
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<&TypeExpr> {
        self.decls.iter().find(|(n, _)| &**n == name).map(|(_, t)| t)
    }

    /// `self, (name : ty)`, or `None` if `name` is already declared.
    pub fn extend(&self, name: Name, ty: TypeExpr) -> Option<Env> {
        if self.lookup(&name).is_some() {
            return None;
        }
        let mut decls = self.decls.clone();
        decls.push((name, ty));
        Some(Env { decls })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Var,
    EArrow,
    IArrow,
    EInterL,
    EInterR,
    IInter,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::Var => "VAR",
            Rule::EArrow => "E_ARROW",
            Rule::IArrow => "I_ARROW",
            Rule::EInterL => "E_INTER_L",
            Rule::EInterR => "E_INTER_R",
            Rule::IInter => "I_INTER",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Rule> {
        Some(match tag {
            "VAR" => Rule::Var,
            "E_ARROW" => Rule::EArrow,
            "I_ARROW" => Rule::IArrow,
            "E_INTER_L" => Rule::EInterL,
            "E_INTER_R" => Rule::EInterR,
            "I_INTER" => Rule::IInter,
            _ => return None,
        })
    }

    pub fn premise_count(self) -> usize {
        match self {
            Rule::Var => 0,
            Rule::IArrow | Rule::EInterL | Rule::EInterR => 1,
            Rule::EArrow | Rule::IInter => 2,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A derivation tree concluding `env |- term : ty`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub env: Env,
    pub term: Term,
    pub ty: TypeExpr,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn var(env: Env, name: Name, ty: TypeExpr) -> Derivation {
        Derivation {
            rule: Rule::Var,
            env,
            term: Term::Var(name),
            ty,
            premises: Vec::new(),
        }
    }

    /// Eliminates an intersection down to `part`; a no-op when the
    /// conclusion already has that type.
    pub fn select(self, part: &TypeExpr) -> Derivation {
        match &self.ty {
            TypeExpr::Inter(ps) => {
                let rule = if ps.as_slice().first() == Some(part) {
                    Rule::EInterL
                } else {
                    Rule::EInterR
                };
                Derivation {
                    rule,
                    env: self.env.clone(),
                    term: self.term.clone(),
                    ty: part.clone(),
                    premises: vec![self],
                }
            }
            _ => self,
        }
    }

    /// Applies a derivation of an arrow type to one of its argument.
    pub fn apply(self, arg: Derivation) -> Derivation {
        let ty = match self.ty.as_arrow() {
            Some((_, r)) => r.clone(),
            None => self.ty.clone(),
        };
        Derivation {
            rule: Rule::EArrow,
            env: self.env.clone(),
            term: Term::app(self.term.clone(), arg.term.clone()),
            ty,
            premises: vec![self, arg],
        }
    }

    /// Introduces the intersection of the conclusions of `parts`, which
    /// must all type the same term in the same environment. Binary nodes
    /// nest to the right.
    pub fn intersect(mut parts: Vec<Derivation>) -> Derivation {
        let mut acc = parts.pop().expect("at least one derivation");
        while let Some(d) = parts.pop() {
            acc = Derivation {
                rule: Rule::IInter,
                env: d.env.clone(),
                term: d.term.clone(),
                ty: TypeExpr::inter([d.ty.clone(), acc.ty.clone()]),
                premises: vec![d, acc],
            };
        }
        acc
    }

    pub fn abstraction(env: Env, binder: Name, arg_ty: TypeExpr, body: Derivation) -> Derivation {
        Derivation {
            rule: Rule::IArrow,
            env,
            term: Term::lam(binder, body.term.clone()),
            ty: TypeExpr::arrow(arg_ty, body.ty.clone()),
            premises: vec![body],
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(Derivation::node_count).sum::<usize>()
    }

    /// One node per line, `RULE | term | type`, indented two spaces per
    /// level. Environments are not written: the root is closed and each
    /// `I_ARROW` extends its premise's environment with the binder.
    pub fn to_text(&self) -> String {
        fn go(d: &Derivation, depth: usize, out: &mut String) {
            use std::fmt::Write;
            let _ = writeln!(out, "{:indent$}{} | {} | {}", "", d.rule, d.term, d.ty, indent = 2 * depth);
            for p in &d.premises {
                go(p, depth + 1, out);
            }
        }
        let mut out = String::new();
        go(self, 0, &mut out);
        out
    }

    /// Parses [`Derivation::to_text`] output. The root environment is
    /// empty.
    pub fn from_text(text: &str) -> Result<Derivation, DerivationParseError> {
        let mut lines = Vec::new();
        for (no, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let indent = line.len() - line.trim_start_matches(' ').len();
            if indent % 2 != 0 {
                return Err(DerivationParseError::at(no, "odd indentation"));
            }
            let fields: Vec<&str> = line.trim().split('|').map(str::trim).collect();
            let [rule, term, ty] = fields[..] else {
                return Err(DerivationParseError::at(no, "expected `rule | term | type`"));
            };
            let rule = Rule::from_tag(rule)
                .ok_or_else(|| DerivationParseError::at(no, &format!("unknown rule {rule:?}")))?;
            let term = parse_term(term).map_err(|e| DerivationParseError::at(no, &e.to_string()))?;
            let ty = parse_type(ty).map_err(|e: TypeError| DerivationParseError::at(no, &e.to_string()))?;
            lines.push((no, indent / 2, rule, term, ty));
        }
        if lines.is_empty() {
            return Err(DerivationParseError::Empty);
        }
        let mut pos = 0;
        let d = build(&lines, &mut pos, 0, Env::new())?;
        if pos != lines.len() {
            return Err(DerivationParseError::at(lines[pos].0, "more than one root"));
        }
        Ok(d)
    }
}

type Line = (usize, usize, Rule, Term, TypeExpr);

fn build(lines: &[Line], pos: &mut usize, depth: usize, env: Env) -> Result<Derivation, DerivationParseError> {
    let (no, d, rule, term, ty) = lines[*pos].clone();
    if d != depth {
        return Err(DerivationParseError::at(no, "unexpected indentation"));
    }
    *pos += 1;
    let premise_env = match (rule, &term, ty.as_arrow()) {
        (Rule::IArrow, Term::Lam(x, _), Some((arg, _))) => {
            env.extend(x.clone(), arg.clone()).unwrap_or_else(|| env.clone())
        }
        _ => env.clone(),
    };
    let mut premises = Vec::new();
    while *pos < lines.len() && lines[*pos].1 > depth {
        premises.push(build(lines, pos, depth + 1, premise_env.clone())?);
    }
    Ok(Derivation { rule, env, term, ty, premises })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationParseError {
    #[error("empty derivation")]
    Empty,
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
}

impl DerivationParseError {
    fn at(line: usize, msg: &str) -> Self {
        DerivationParseError::Line { line: line + 1, msg: msg.to_string() }
    }
}

/// A node that does not instantiate its rule. `path` lists premise indices
/// from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub path: Vec<usize>,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(usize::to_string).collect();
        write!(f, "{} at [{}]: {}", self.rule, path.join("."), self.reason)
    }
}

/// Checks every node of `d` against its rule schema.
pub fn check_derivation(d: &Derivation) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    check_node(d, &mut Vec::new(), &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn check_node(d: &Derivation, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    if let Err(reason) = check_rule(d) {
        out.push(Violation { rule: d.rule, path: path.clone(), reason });
    }
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_node(p, path, out);
        path.pop();
    }
}

fn check_rule(d: &Derivation) -> Result<(), String> {
    let want = d.rule.premise_count();
    if d.premises.len() != want {
        return Err(format!("expected {want} premises, found {}", d.premises.len()));
    }
    let mut seen = HashMap::new();
    for (n, _) in d.env.decls() {
        if seen.insert(n.clone(), ()).is_some() {
            return Err(format!("variable {n} declared twice"));
        }
    }
    let same_subject = |p: &Derivation| -> Result<(), String> {
        if p.env != d.env {
            return Err("premise environment differs from conclusion".into());
        }
        if p.term != d.term {
            return Err(format!("premise term {} differs from {}", p.term, d.term));
        }
        Ok(())
    };
    match d.rule {
        Rule::Var => {
            let Term::Var(x) = &d.term else {
                return Err(format!("{} is not a variable", d.term));
            };
            match d.env.lookup(x) {
                Some(t) if *t == d.ty => Ok(()),
                Some(t) => Err(format!("{x} is declared {t}, not {}", d.ty)),
                None => Err(format!("{x} is not declared")),
            }
        }
        Rule::EArrow => {
            let Term::App(m, n) = &d.term else {
                return Err(format!("{} is not an application", d.term));
            };
            let (fun, arg) = (&d.premises[0], &d.premises[1]);
            if fun.env != d.env || arg.env != d.env {
                return Err("premise environment differs from conclusion".into());
            }
            if fun.term != **m || arg.term != **n {
                return Err("premise terms do not match the application".into());
            }
            match fun.ty.as_arrow() {
                Some((a, b)) if *a == arg.ty && *b == d.ty => Ok(()),
                Some((a, b)) => Err(format!(
                    "function has type {} but argument has {} and conclusion {}",
                    TypeExpr::arrow(a.clone(), b.clone()),
                    arg.ty,
                    d.ty
                )),
                None => Err(format!("function premise has non-arrow type {}", fun.ty)),
            }
        }
        Rule::IArrow => {
            let Term::Lam(x, body) = &d.term else {
                return Err(format!("{} is not an abstraction", d.term));
            };
            let Some((a, b)) = d.ty.as_arrow() else {
                return Err(format!("{} is not an arrow type", d.ty));
            };
            let p = &d.premises[0];
            let Some(extended) = d.env.extend(x.clone(), a.clone()) else {
                return Err(format!("binder {x} already declared"));
            };
            if p.env != extended {
                return Err(format!("premise environment must extend the conclusion's with {x} : {a}"));
            }
            if p.term != **body {
                return Err("premise term is not the abstraction body".into());
            }
            if p.ty != *b {
                return Err(format!("premise type {} differs from {b}", p.ty));
            }
            Ok(())
        }
        Rule::EInterL | Rule::EInterR => {
            let p = &d.premises[0];
            same_subject(p)?;
            // parts are in canonical order: left projects the first, right any other
            match &p.ty {
                TypeExpr::Inter(ps) if ps.contains(&d.ty) => {
                    let first = ps.as_slice().first() == Some(&d.ty);
                    match (d.rule, first) {
                        (Rule::EInterL, false) => Err(format!("{} is not the first part of {}", d.ty, p.ty)),
                        (Rule::EInterR, true) => Err(format!("{} is the first part of {}", d.ty, p.ty)),
                        _ => Ok(()),
                    }
                }
                TypeExpr::Inter(_) => Err(format!("{} is not a part of {}", d.ty, p.ty)),
                other => Err(format!("premise type {other} is not an intersection")),
            }
        }
        Rule::IInter => {
            let (l, r) = (&d.premises[0], &d.premises[1]);
            same_subject(l)?;
            same_subject(r)?;
            let expect = TypeExpr::inter([l.ty.clone(), r.ty.clone()]);
            if expect == d.ty {
                Ok(())
            } else {
                Err(format!("conclusion {} is not {expect}", d.ty))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(s: &str) -> TypeExpr {
        parse_type(s).unwrap()
    }

    fn tm(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn n(s: &str) -> Name {
        Arc::from(s)
    }

    fn id_derivation(a: &str) -> Derivation {
        let env = Env::new().extend(n("x"), ty(a)).unwrap();
        Derivation::abstraction(Env::new(), n("x"), ty(a), Derivation::var(env, n("x"), ty(a)))
    }

    #[test]
    fn var_rule() {
        let env = Env::new().extend(n("x"), ty("a")).unwrap();
        assert_eq!(check_derivation(&Derivation::var(env.clone(), n("x"), ty("a"))), Ok(()));
        let bad = check_derivation(&Derivation::var(env, n("x"), ty("b"))).unwrap_err();
        assert_eq!(bad[0].rule, Rule::Var);
    }

    #[test]
    fn intersection_of_identity_types() {
        let d = Derivation::intersect(vec![id_derivation("a"), id_derivation("b")]);
        assert_eq!(d.rule, Rule::IInter);
        assert_eq!(d.ty, ty("(a->a)&(b->b)"));
        assert_eq!(check_derivation(&d), Ok(()));
    }

    #[test]
    fn e_arrow_on_non_arrow() {
        let env = Env::new()
            .extend(n("f"), ty("a"))
            .unwrap()
            .extend(n("y"), ty("a"))
            .unwrap();
        let d = Derivation {
            rule: Rule::EArrow,
            env: env.clone(),
            term: tm("f y"),
            ty: ty("a"),
            premises: vec![
                Derivation::var(env.clone(), n("f"), ty("a")),
                Derivation::var(env, n("y"), ty("a")),
            ],
        };
        let errs = check_derivation(&d).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].rule, Rule::EArrow);
        assert!(errs[0].path.is_empty());
    }

    #[test]
    fn e_inter_requires_part() {
        let env = Env::new().extend(n("x"), ty("a & (a -> b)")).unwrap();
        let v = Derivation::var(env, n("x"), ty("a & (a -> b)"));
        let ok = v.clone().select(&ty("a -> b"));
        assert_eq!(ok.rule, Rule::EInterR);
        assert_eq!(check_derivation(&ok), Ok(()));
        let mut wrong_side = ok.clone();
        wrong_side.rule = Rule::EInterL;
        assert!(check_derivation(&wrong_side).is_err());
        let mut bad = v.select(&ty("a"));
        assert_eq!(bad.rule, Rule::EInterL);
        bad.ty = ty("b");
        assert!(check_derivation(&bad).is_err());
    }

    #[test]
    fn self_application_derivation() {
        // \x. x x : (a & (a -> b)) -> b
        let xt = ty("a & (a -> b)");
        let env = Env::new().extend(n("x"), xt.clone()).unwrap();
        let fun = Derivation::var(env.clone(), n("x"), xt.clone()).select(&ty("a -> b"));
        let arg = Derivation::var(env, n("x"), xt.clone()).select(&ty("a"));
        let d = Derivation::abstraction(Env::new(), n("x"), xt, fun.apply(arg));
        assert_eq!(d.ty, ty("(a & (a -> b)) -> b"));
        assert_eq!(check_derivation(&d), Ok(()));

        let text = d.to_text();
        assert!(text.starts_with("I_ARROW | \\x. x x | (a & (a -> b)) -> b\n"));
        let back = Derivation::from_text(&text).unwrap();
        assert_eq!(back, d);

        let corrupted = text.replacen("E_INTER_L", "E_ARROW", 1);
        let back = Derivation::from_text(&corrupted).unwrap();
        assert!(check_derivation(&back).is_err());
    }

    #[test]
    fn derivation_parse_errors() {
        assert_eq!(Derivation::from_text(""), Err(DerivationParseError::Empty));
        assert!(Derivation::from_text("FOO | x | a").is_err());
        assert!(Derivation::from_text("VAR | x").is_err());
        assert!(Derivation::from_text("VAR | x | a\nVAR | x | a").is_err());
    }

    #[test]
    fn term_size_examples() {
        assert_eq!(term_size(&tm("x")).apps, 0);
        let t3 = tm("\\x1 x2 x3 x4. x2 (x3 (x2 (x4 (x2 (x3 (x2 x1))))))");
        assert_eq!(term_size(&t3), TermSize { apps: 7, nodes: 4 + 7 + 8 });
        let t4 = tm("λx1 x2 x3 x4 x5.x2(x3(x2(x4(x2(x3(x2(x5(x2(x3(x2(x4(x2(x3(x2 x1))))))))))))))");
        assert_eq!(term_size(&t4).apps, 15);
    }

    #[test]
    fn alpha_equality() {
        assert!(alpha_equal(&tm("\\x. x"), &tm("\\y. y")));
        assert!(!alpha_equal(&tm("\\x. \\y. x"), &tm("\\x. \\y. y")));
        assert!(alpha_equal(&tm("\\x y. x"), &tm("\\y x. y")));
        assert!(!alpha_equal(&tm("\\x. z"), &tm("\\x. w")));
        assert!(!alpha_equal(&tm("\\x. x"), &tm("\\x. y")));
        let known = tm("\\x1 x2 x3 x4. x2 (x3 (x2 (x4 (x2 (x3 (x2 x1))))))");
        let renamed = tm("\\a b c d. b (c (b (d (b (c (b a))))))");
        assert!(alpha_equal(&known, &renamed));
        assert_eq!(term_size(&known), term_size(&renamed));
    }

    #[test]
    fn term_print_parse() {
        for s in ["\\x1 x2. x2 (x1 x2) x1", "f (\\x. x) y", "(\\x. x) y", "a b c"] {
            let t = tm(s);
            assert_eq!(t.to_string(), s);
            assert_eq!(tm(&t.to_string()), t);
        }
        assert_eq!(tm("f \\x. x"), tm("f (\\x. x)"));
        assert!(parse_term("").is_err());
        assert!(parse_term("\\. x").is_err());
        assert!(parse_term("(x").is_err());
    }

    #[test]
    fn nesting_depths() {
        assert_eq!(nesting_depth(&tm("\\x. x")), 1);
        assert_eq!(nesting_depth(&tm("\\x. x x")), 2);
        assert_eq!(nesting_depth(&tm("\\x1 x2 x3 x4. x2 (x3 (x2 (x4 (x2 (x3 (x2 x1))))))")), 8);
        assert_eq!(nesting_depth(&tm("\\f x. f (\\y. y) x")), 2);
    }
}
