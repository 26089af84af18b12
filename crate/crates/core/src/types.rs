//! Intersection types: syntax, canonical form, rank, size and the
//! decompositions the search procedure needs.
//!
//! Every [`TypeExpr`] value is canonical. Intersections are flattened,
//! duplicate-free and sorted by the derived structural order
//! (`Atom < Arrow < Inter`, lexicographic within a variant), so ACI-equal
//! types compare equal with `==` and hash identically.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A type variable name over `[A-Za-z0-9_]+`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Result<Atom, TypeError> {
        if is_ident(name) {
            Ok(Atom(Arc::from(name)))
        } else {
            Err(TypeError::BadAtom(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// The parts of a canonical intersection: at least two, none an
/// intersection, sorted and duplicate-free.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Parts(Arc<[TypeExpr]>);

impl Parts {
    pub fn as_slice(&self) -> &[TypeExpr] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, t: &TypeExpr) -> bool {
        self.0.binary_search(t).is_ok()
    }
}

/// A canonical intersection type.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeExpr {
    Atom(Atom),
    Arrow(Arc<TypeExpr>, Arc<TypeExpr>),
    Inter(Parts),
}

/// A possibly non-canonical type tree, as written by a user or built by
/// hand. [`normalize`] turns it into a [`TypeExpr`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawType {
    Atom(Atom),
    Arrow(Box<RawType>, Box<RawType>),
    Inter(Box<RawType>, Box<RawType>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("empty type expression")]
    Empty,
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("invalid atom name {0:?}")]
    BadAtom(String),
}

impl TypeExpr {
    /// Builds an atom, panicking on an invalid name. Use [`Atom::new`] for
    /// untrusted input.
    pub fn atom(name: &str) -> TypeExpr {
        TypeExpr::Atom(Atom::new(name).expect("invalid atom name"))
    }

    pub fn arrow(left: TypeExpr, right: TypeExpr) -> TypeExpr {
        TypeExpr::Arrow(Arc::new(left), Arc::new(right))
    }

    /// `args[0] -> args[1] -> ... -> tail`.
    pub fn arrows<I>(args: I, tail: TypeExpr) -> TypeExpr
    where
        I: IntoIterator<Item = TypeExpr>,
        I::IntoIter: DoubleEndedIterator,
    {
        args.into_iter()
            .rev()
            .fold(tail, |acc, arg| TypeExpr::arrow(arg, acc))
    }

    /// Canonical intersection of the given types. A single distinct part
    /// collapses to that part.
    ///
    /// # Panics
    /// On an empty iterator: there is no top type.
    pub fn inter<I: IntoIterator<Item = TypeExpr>>(parts: I) -> TypeExpr {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                TypeExpr::Inter(ps) => flat.extend(ps.as_slice().iter().cloned()),
                other => flat.push(other),
            }
        }
        assert!(!flat.is_empty(), "intersection of zero types");
        flat.sort();
        flat.dedup();
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            TypeExpr::Inter(Parts(flat.into()))
        }
    }

    pub fn is_inter(&self) -> bool {
        matches!(self, TypeExpr::Inter(_))
    }

    pub fn as_arrow(&self) -> Option<(&TypeExpr, &TypeExpr)> {
        match self {
            TypeExpr::Arrow(l, r) => Some((l, r)),
            _ => None,
        }
    }

    /// Converts back into a raw tree (intersections right-nested).
    pub fn to_raw(&self) -> RawType {
        match self {
            TypeExpr::Atom(a) => RawType::Atom(a.clone()),
            TypeExpr::Arrow(l, r) => RawType::Arrow(Box::new(l.to_raw()), Box::new(r.to_raw())),
            TypeExpr::Inter(ps) => {
                let mut it = ps.as_slice().iter().rev();
                let last = it.next().expect("non-empty intersection").to_raw();
                it.fold(last, |acc, p| RawType::Inter(Box::new(p.to_raw()), Box::new(acc)))
            }
        }
    }

    /// Every atom occurring in the type, in left-to-right order.
    pub fn atoms(&self) -> Vec<Atom> {
        fn go(t: &TypeExpr, out: &mut Vec<Atom>) {
            match t {
                TypeExpr::Atom(a) => out.push(a.clone()),
                TypeExpr::Arrow(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                TypeExpr::Inter(ps) => ps.as_slice().iter().for_each(|p| go(p, out)),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Applies `f` to every atom and re-normalizes.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Atom) -> TypeExpr {
        match self {
            TypeExpr::Atom(a) => TypeExpr::Atom(f(a)),
            TypeExpr::Arrow(l, r) => TypeExpr::arrow(l.map_atoms(f), r.map_atoms(f)),
            TypeExpr::Inter(ps) => TypeExpr::inter(ps.as_slice().iter().map(|p| p.map_atoms(f))),
        }
    }
}

/// Flattens, deduplicates and sorts intersections.
pub fn normalize(raw: &RawType) -> TypeExpr {
    match raw {
        RawType::Atom(a) => TypeExpr::Atom(a.clone()),
        RawType::Arrow(l, r) => TypeExpr::arrow(normalize(l), normalize(r)),
        RawType::Inter(l, r) => TypeExpr::inter([normalize(l), normalize(r)]),
    }
}

/// Leivant's rank.
pub fn rank(t: &TypeExpr) -> usize {
    match t {
        TypeExpr::Atom(_) => 0,
        TypeExpr::Inter(ps) => ps.as_slice().iter().map(rank).fold(1, usize::max),
        TypeExpr::Arrow(l, r) => {
            let (rl, rr) = (rank(l), rank(r));
            if rl > 0 || rr > 0 {
                (1 + rl).max(rr)
            } else {
                0
            }
        }
    }
}

/// Atom occurrences plus connectives; a k-part intersection contributes
/// k - 1 connectives.
pub fn size(t: &TypeExpr) -> usize {
    match t {
        TypeExpr::Atom(_) => 1,
        TypeExpr::Arrow(l, r) => 1 + size(l) + size(r),
        TypeExpr::Inter(ps) => ps.len() - 1 + ps.as_slice().iter().map(size).sum::<usize>(),
    }
}

/// The parts of a top-level intersection, or the type itself.
pub fn components(t: &TypeExpr) -> &[TypeExpr] {
    match t {
        TypeExpr::Inter(ps) => ps.as_slice(),
        other => std::slice::from_ref(other),
    }
}

/// Splits `b1 -> ... -> bk -> tail` off a non-intersection type. Returns
/// `None` if there are fewer than `k` top-level arrows.
pub fn arrow_spine(t: &TypeExpr, k: usize) -> Option<(Vec<TypeExpr>, TypeExpr)> {
    debug_assert!(!t.is_inter());
    let mut args = Vec::with_capacity(k);
    let mut cur = t;
    for _ in 0..k {
        let (l, r) = cur.as_arrow()?;
        args.push(l.clone());
        cur = r;
    }
    Some((args, cur.clone()))
}

/// One way of using a variable of some declared type as the head of an
/// application: pick a component, feed it an argument, pick a component of
/// the result, and so on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spine {
    pub args: Vec<TypeExpr>,
    /// `stages[0]` is the chosen component of the declared type and
    /// `stages[j]` the chosen component of the result after `j` arguments.
    /// None of them is an intersection.
    pub stages: Vec<TypeExpr>,
}

impl Spine {
    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn tail(&self) -> &TypeExpr {
        self.stages.last().expect("a spine has at least one stage")
    }
}

/// All spines of `t`, shortest first within each component. Intersections
/// met in result position are split as well, so a variable of type
/// `a -> (b & c)` yields spines with tails `a -> (b & c)`, `b` and `c`.
pub fn spines(t: &TypeExpr) -> Vec<Spine> {
    fn walk(cur: &TypeExpr, args: &mut Vec<TypeExpr>, stages: &mut Vec<TypeExpr>, out: &mut Vec<Spine>) {
        out.push(Spine {
            args: args.clone(),
            stages: stages.clone(),
        });
        if let TypeExpr::Arrow(l, r) = cur {
            args.push((**l).clone());
            for c in components(r) {
                stages.push(c.clone());
                walk(c, args, stages, out);
                stages.pop();
            }
            args.pop();
        }
    }
    let mut out = Vec::new();
    for c in components(t) {
        walk(c, &mut Vec::new(), &mut vec![c.clone()], &mut out);
    }
    out
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Atom(a) => f.write_str(a.as_str()),
            TypeExpr::Arrow(l, r) => {
                if matches!(**l, TypeExpr::Atom(_)) {
                    write!(f, "{l}")?;
                } else {
                    write!(f, "({l})")?;
                }
                f.write_str(" -> ")?;
                if r.is_inter() {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
            TypeExpr::Inter(ps) => {
                for (i, p) in ps.as_slice().iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    match p {
                        TypeExpr::Atom(_) => write!(f, "{p}")?,
                        _ => write!(f, "({p})")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl std::str::FromStr for TypeExpr {
    type Err = TypeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_type(s)
    }
}

/// Parses the concrete syntax
///
/// ```text
/// Type   := Arrow
/// Arrow  := Inter ("->" Arrow)?
/// Inter  := Atomic ("&" Atomic)*
/// Atomic := atom | "(" Type ")"
/// atom   := [A-Za-z0-9_]+
/// ```
///
/// and returns the canonical form.
pub fn parse_type(text: &str) -> Result<TypeExpr, TypeError> {
    parse_raw(text).map(|raw| normalize(&raw))
}

/// Parses without normalizing.
pub fn parse_raw(text: &str) -> Result<RawType, TypeError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(TypeError::Empty);
    }
    let t = p.arrow()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn error(&self, msg: &str) -> TypeError {
        TypeError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn arrow(&mut self) -> Result<RawType, TypeError> {
        let left = self.inter()?;
        if self.eat("->") {
            let right = self.arrow()?;
            Ok(RawType::Arrow(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    fn inter(&mut self) -> Result<RawType, TypeError> {
        let mut acc = self.atomic()?;
        while self.eat("&") {
            let next = self.atomic()?;
            acc = RawType::Inter(Box::new(acc), Box::new(next));
        }
        Ok(acc)
    }

    fn atomic(&mut self) -> Result<RawType, TypeError> {
        self.skip_ws();
        if self.eat("(") {
            let t = self.arrow()?;
            if !self.eat(")") {
                return Err(self.error("expected ')'"));
            }
            return Ok(t);
        }
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an atom or '('"));
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(RawType::Atom(Atom::new(name)?))
    }
}
