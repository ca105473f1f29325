//! Term language: monotypes, prenex polytypes, terms, signatures and contexts.
//!
//! Binders are nameless: term binders (`Abs`, `Forall`) use de Bruijn indices
//! and prenex type binders are positional indices into the binder list of the
//! enclosing [`PolyType`] / [`PolyTerm`]. Every binder keeps a name hint that
//! is ignored by equality, so alpha-equivalence is plain `==`.

use std::collections::HashMap;
use std::fmt;

/// A declared type operator: a name together with its arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeOpRef {
    pub name: String,
    pub arity: usize,
}

impl TypeOpRef {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        TypeOpRef { name: name.into(), arity }
    }
}

/// Monomorphic types.
///
/// `Bound` refers to a prenex binder of the enclosing polytype or polyterm;
/// it never appears in a standalone well-formed monotype.
#[derive(Debug, Clone, Eq)]
pub enum MonoType {
    /// Free type variable.
    Var(String),
    /// Positional reference to a prenex type binder (leftmost binder is 0).
    Bound(usize),
    Prop,
    Fun(Box<MonoType>, Box<MonoType>),
    Op(TypeOpRef, Vec<MonoType>),
}

impl MonoType {
    pub fn fun(dom: MonoType, cod: MonoType) -> MonoType {
        MonoType::Fun(Box::new(dom), Box::new(cod))
    }

    pub fn var(name: impl Into<String>) -> MonoType {
        MonoType::Var(name.into())
    }

    pub fn op(op: TypeOpRef, args: Vec<MonoType>) -> MonoType {
        MonoType::Op(op, args)
    }

    /// Replaces the first `args.len()` prenex binder indices by `args`,
    /// shifting the remaining indices down. Used to instantiate (a prefix of)
    /// a polytype's binders.
    pub fn instantiate_prefix(&self, args: &[MonoType]) -> MonoType {
        match self {
            MonoType::Var(_) | MonoType::Prop => self.clone(),
            MonoType::Bound(i) => {
                if *i < args.len() {
                    args[*i].clone()
                } else {
                    MonoType::Bound(*i - args.len())
                }
            }
            MonoType::Fun(a, b) => {
                MonoType::fun(a.instantiate_prefix(args), b.instantiate_prefix(args))
            }
            MonoType::Op(op, ts) => MonoType::Op(
                op.clone(),
                ts.iter().map(|t| t.instantiate_prefix(args)).collect(),
            ),
        }
    }

    /// Simultaneous substitution of free type variables.
    pub fn subst_ty(&self, map: &HashMap<String, MonoType>) -> MonoType {
        match self {
            MonoType::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            MonoType::Bound(_) | MonoType::Prop => self.clone(),
            MonoType::Fun(a, b) => MonoType::fun(a.subst_ty(map), b.subst_ty(map)),
            MonoType::Op(op, ts) => {
                MonoType::Op(op.clone(), ts.iter().map(|t| t.subst_ty(map)).collect())
            }
        }
    }

    /// Turns free occurrences of the named variables into binder indices:
    /// `names[i]` becomes `Bound(i)`.
    pub fn close(&self, names: &[String]) -> MonoType {
        match self {
            MonoType::Var(x) => match names.iter().position(|n| n == x) {
                Some(i) => MonoType::Bound(i),
                None => self.clone(),
            },
            MonoType::Bound(_) | MonoType::Prop => self.clone(),
            MonoType::Fun(a, b) => MonoType::fun(a.close(names), b.close(names)),
            MonoType::Op(op, ts) => {
                MonoType::Op(op.clone(), ts.iter().map(|t| t.close(names)).collect())
            }
        }
    }

    pub fn free_vars(&self, out: &mut Vec<String>) {
        match self {
            MonoType::Var(x) => {
                if !out.iter().any(|y| y == x) {
                    out.push(x.clone());
                }
            }
            MonoType::Bound(_) | MonoType::Prop => {}
            MonoType::Fun(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            MonoType::Op(_, ts) => {
                for t in ts {
                    t.free_vars(out);
                }
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        let mut fv = Vec::new();
        self.free_vars(&mut fv);
        fv.is_empty() && self.max_bound().is_none()
    }

    fn max_bound(&self) -> Option<usize> {
        match self {
            MonoType::Bound(i) => Some(*i),
            MonoType::Var(_) | MonoType::Prop => None,
            MonoType::Fun(a, b) => a.max_bound().max(b.max_bound()),
            MonoType::Op(_, ts) => ts.iter().filter_map(|t| t.max_bound()).max(),
        }
    }
}

impl PartialEq for MonoType {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (MonoType::Var(a), MonoType::Var(b)) => a == b,
            (MonoType::Bound(a), MonoType::Bound(b)) => a == b,
            (MonoType::Prop, MonoType::Prop) => true,
            (MonoType::Fun(a, b), MonoType::Fun(c, d)) => a == c && b == d,
            (MonoType::Op(o, a), MonoType::Op(p, b)) => o == p && a == b,
            _ => false,
        }
    }
}

impl std::hash::Hash for MonoType {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            MonoType::Var(x) => {
                0u8.hash(state);
                x.hash(state);
            }
            MonoType::Bound(i) => {
                1u8.hash(state);
                i.hash(state);
            }
            MonoType::Prop => 2u8.hash(state),
            MonoType::Fun(a, b) => {
                3u8.hash(state);
                a.hash(state);
                b.hash(state);
            }
            MonoType::Op(op, ts) => {
                4u8.hash(state);
                op.hash(state);
                ts.hash(state);
            }
        }
    }
}

/// Prenex polytype: `forall X1 .. Xn. body`. Binder names are hints only;
/// equality compares the binder count and the body.
#[derive(Debug, Clone, Eq)]
pub struct PolyType {
    pub binders: Vec<String>,
    pub body: MonoType,
}

impl PolyType {
    pub fn mono(body: MonoType) -> PolyType {
        PolyType { binders: Vec::new(), body }
    }

    /// Builds `forall names. body` from a body with the named variables free.
    pub fn forall(names: &[&str], body: MonoType) -> PolyType {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let body = body.close(&names);
        PolyType { binders: names, body }
    }

    /// Instantiates all binders; panics unless `args.len() == binders.len()`.
    pub fn instantiate(&self, args: &[MonoType]) -> MonoType {
        assert_eq!(args.len(), self.binders.len(), "polytype arity");
        self.body.instantiate_prefix(args)
    }

    /// Opens the binders as free variables named by the hints, freshened
    /// against `avoid` and the free variables of the body. Returns the
    /// chosen names and the opened body.
    pub fn open(&self, avoid: &[String]) -> (Vec<String>, MonoType) {
        let mut avoid = avoid.to_vec();
        self.body.free_vars(&mut avoid);
        let names = freshen_all(&self.binders, &avoid);
        let args: Vec<MonoType> = names.iter().map(|n| MonoType::var(n.clone())).collect();
        (names, self.body.instantiate_prefix(&args))
    }

    pub fn subst_ty(&self, map: &HashMap<String, MonoType>) -> PolyType {
        PolyType { binders: self.binders.clone(), body: self.body.subst_ty(map) }
    }
}

impl PartialEq for PolyType {
    fn eq(&self, other: &Self) -> bool {
        self.binders.len() == other.binders.len() && self.body == other.body
    }
}

/// Terms. `Bound` is a de Bruijn index for `Abs`/`Forall` binders; `Var` is a
/// free variable; `Const` is a constant applied to type arguments.
#[derive(Debug, Clone, Eq)]
pub enum Term {
    Var(String),
    Bound(usize),
    Const(String, Vec<MonoType>),
    Abs(String, MonoType, Box<Term>),
    App(Box<Term>, Box<Term>),
    Imp(Box<Term>, Box<Term>),
    Forall(String, MonoType, Box<Term>),
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Bound(a), Term::Bound(b)) => a == b,
            (Term::Const(c, ts), Term::Const(d, us)) => c == d && ts == us,
            (Term::Abs(_, a, t), Term::Abs(_, b, u)) => a == b && t == u,
            (Term::App(f, x), Term::App(g, y)) => f == g && x == y,
            (Term::Imp(a, b), Term::Imp(c, d)) => a == c && b == d,
            (Term::Forall(_, a, t), Term::Forall(_, b, u)) => a == b && t == u,
            _ => false,
        }
    }
}

impl std::hash::Hash for Term {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            Term::Var(x) => {
                0u8.hash(state);
                x.hash(state);
            }
            Term::Bound(i) => {
                1u8.hash(state);
                i.hash(state);
            }
            Term::Const(c, ts) => {
                2u8.hash(state);
                c.hash(state);
                ts.hash(state);
            }
            Term::Abs(_, a, t) => {
                3u8.hash(state);
                a.hash(state);
                t.hash(state);
            }
            Term::App(f, x) => {
                4u8.hash(state);
                f.hash(state);
                x.hash(state);
            }
            Term::Imp(a, b) => {
                5u8.hash(state);
                a.hash(state);
                b.hash(state);
            }
            Term::Forall(_, a, t) => {
                6u8.hash(state);
                a.hash(state);
                t.hash(state);
            }
        }
    }
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn cst(name: impl Into<String>, tyargs: Vec<MonoType>) -> Term {
        Term::Const(name.into(), tyargs)
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn imp(l: Term, r: Term) -> Term {
        Term::Imp(Box::new(l), Box::new(r))
    }

    /// Builds `\name^ty. body`, closing free occurrences of `name` in `body`.
    pub fn abs(name: impl Into<String>, ty: MonoType, body: Term) -> Term {
        let name = name.into();
        let body = body.close_var(&name, 0);
        Term::Abs(name, ty, Box::new(body))
    }

    /// Builds `forall name^ty. body`, closing free occurrences of `name`.
    pub fn forall(name: impl Into<String>, ty: MonoType, body: Term) -> Term {
        let name = name.into();
        let body = body.close_var(&name, 0);
        Term::Forall(name, ty, Box::new(body))
    }

    fn close_var(&self, name: &str, depth: usize) -> Term {
        match self {
            Term::Var(x) => {
                if x == name {
                    Term::Bound(depth)
                } else {
                    self.clone()
                }
            }
            Term::Bound(_) | Term::Const(_, _) => self.clone(),
            Term::Abs(h, ty, b) => {
                Term::Abs(h.clone(), ty.clone(), Box::new(b.close_var(name, depth + 1)))
            }
            Term::App(f, a) => Term::app(f.close_var(name, depth), a.close_var(name, depth)),
            Term::Imp(l, r) => Term::imp(l.close_var(name, depth), r.close_var(name, depth)),
            Term::Forall(h, ty, b) => {
                Term::Forall(h.clone(), ty.clone(), Box::new(b.close_var(name, depth + 1)))
            }
        }
    }

    fn shift(&self, by: usize, cutoff: usize) -> Term {
        match self {
            Term::Var(_) | Term::Const(_, _) => self.clone(),
            Term::Bound(i) => {
                if *i >= cutoff {
                    Term::Bound(i + by)
                } else {
                    self.clone()
                }
            }
            Term::Abs(h, ty, b) => {
                Term::Abs(h.clone(), ty.clone(), Box::new(b.shift(by, cutoff + 1)))
            }
            Term::App(f, a) => Term::app(f.shift(by, cutoff), a.shift(by, cutoff)),
            Term::Imp(l, r) => Term::imp(l.shift(by, cutoff), r.shift(by, cutoff)),
            Term::Forall(h, ty, b) => {
                Term::Forall(h.clone(), ty.clone(), Box::new(b.shift(by, cutoff + 1)))
            }
        }
    }

    /// Replaces index 0 of a binder body by `image` (beta-reduction core).
    pub fn open(&self, image: &Term) -> Term {
        self.open_at(image, 0)
    }

    fn open_at(&self, image: &Term, depth: usize) -> Term {
        match self {
            Term::Var(_) | Term::Const(_, _) => self.clone(),
            Term::Bound(i) => {
                if *i == depth {
                    image.shift(depth, 0)
                } else if *i > depth {
                    Term::Bound(i - 1)
                } else {
                    self.clone()
                }
            }
            Term::Abs(h, ty, b) => {
                Term::Abs(h.clone(), ty.clone(), Box::new(b.open_at(image, depth + 1)))
            }
            Term::App(f, a) => Term::app(f.open_at(image, depth), a.open_at(image, depth)),
            Term::Imp(l, r) => Term::imp(l.open_at(image, depth), r.open_at(image, depth)),
            Term::Forall(h, ty, b) => {
                Term::Forall(h.clone(), ty.clone(), Box::new(b.open_at(image, depth + 1)))
            }
        }
    }

    /// Capture-avoiding substitution of the free variable `name` by `image`.
    /// Binders are nameless, so no renaming is ever needed; name hints are
    /// kept as-is and disambiguated by the printer.
    pub fn subst_tm(&self, name: &str, image: &Term) -> Term {
        self.subst_tm_at(name, image, 0)
    }

    fn subst_tm_at(&self, name: &str, image: &Term, depth: usize) -> Term {
        match self {
            Term::Var(x) => {
                if x == name {
                    image.shift(depth, 0)
                } else {
                    self.clone()
                }
            }
            Term::Bound(_) | Term::Const(_, _) => self.clone(),
            Term::Abs(h, ty, b) => {
                Term::Abs(h.clone(), ty.clone(), Box::new(b.subst_tm_at(name, image, depth + 1)))
            }
            Term::App(f, a) => {
                Term::app(f.subst_tm_at(name, image, depth), a.subst_tm_at(name, image, depth))
            }
            Term::Imp(l, r) => {
                Term::imp(l.subst_tm_at(name, image, depth), r.subst_tm_at(name, image, depth))
            }
            Term::Forall(h, ty, b) => {
                Term::Forall(h.clone(), ty.clone(), Box::new(b.subst_tm_at(name, image, depth + 1)))
            }
        }
    }

    /// Simultaneous substitution of free type variables inside annotations
    /// and constant instantiations.
    pub fn subst_ty(&self, map: &HashMap<String, MonoType>) -> Term {
        match self {
            Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Const(c, ts) => {
                Term::Const(c.clone(), ts.iter().map(|t| t.subst_ty(map)).collect())
            }
            Term::Abs(h, ty, b) => {
                Term::Abs(h.clone(), ty.subst_ty(map), Box::new(b.subst_ty(map)))
            }
            Term::App(f, a) => Term::app(f.subst_ty(map), a.subst_ty(map)),
            Term::Imp(l, r) => Term::imp(l.subst_ty(map), r.subst_ty(map)),
            Term::Forall(h, ty, b) => {
                Term::Forall(h.clone(), ty.subst_ty(map), Box::new(b.subst_ty(map)))
            }
        }
    }

    /// Instantiates prenex type binder indices appearing in annotations.
    pub fn instantiate_ty_prefix(&self, args: &[MonoType]) -> Term {
        match self {
            Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Const(c, ts) => Term::Const(
                c.clone(),
                ts.iter().map(|t| t.instantiate_prefix(args)).collect(),
            ),
            Term::Abs(h, ty, b) => Term::Abs(
                h.clone(),
                ty.instantiate_prefix(args),
                Box::new(b.instantiate_ty_prefix(args)),
            ),
            Term::App(f, a) => {
                Term::app(f.instantiate_ty_prefix(args), a.instantiate_ty_prefix(args))
            }
            Term::Imp(l, r) => {
                Term::imp(l.instantiate_ty_prefix(args), r.instantiate_ty_prefix(args))
            }
            Term::Forall(h, ty, b) => Term::Forall(
                h.clone(),
                ty.instantiate_prefix(args),
                Box::new(b.instantiate_ty_prefix(args)),
            ),
        }
    }

    fn close_ty(&self, names: &[String]) -> Term {
        match self {
            Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Const(c, ts) => {
                Term::Const(c.clone(), ts.iter().map(|t| t.close(names)).collect())
            }
            Term::Abs(h, ty, b) => {
                Term::Abs(h.clone(), ty.close(names), Box::new(b.close_ty(names)))
            }
            Term::App(f, a) => Term::app(f.close_ty(names), a.close_ty(names)),
            Term::Imp(l, r) => Term::imp(l.close_ty(names), r.close_ty(names)),
            Term::Forall(h, ty, b) => {
                Term::Forall(h.clone(), ty.close(names), Box::new(b.close_ty(names)))
            }
        }
    }

    pub fn free_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(x) => {
                if !out.iter().any(|y| y == x) {
                    out.push(x.clone());
                }
            }
            Term::Bound(_) | Term::Const(_, _) => {}
            Term::Abs(_, _, b) | Term::Forall(_, _, b) => b.free_vars(out),
            Term::App(f, a) => {
                f.free_vars(out);
                a.free_vars(out);
            }
            Term::Imp(l, r) => {
                l.free_vars(out);
                r.free_vars(out);
            }
        }
    }

    pub fn free_tyvars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(_) | Term::Bound(_) => {}
            Term::Const(_, ts) => {
                for t in ts {
                    t.free_vars(out);
                }
            }
            Term::Abs(_, ty, b) | Term::Forall(_, ty, b) => {
                ty.free_vars(out);
                b.free_tyvars(out);
            }
            Term::App(f, a) => {
                f.free_tyvars(out);
                a.free_tyvars(out);
            }
            Term::Imp(l, r) => {
                l.free_tyvars(out);
                r.free_tyvars(out);
            }
        }
    }

    pub fn has_free_var(&self, name: &str) -> bool {
        let mut fv = Vec::new();
        self.free_vars(&mut fv);
        fv.iter().any(|x| x == name)
    }
}

/// Alpha-equivalence. Name hints are ignored by `PartialEq`, so this is
/// structural equality; kept as a named operation for readability at call
/// sites that specifically care about alpha.
pub fn alpha_eq<T: PartialEq>(a: &T, b: &T) -> bool {
    a == b
}

/// Prenex polyterm: `forall X1 .. Xn. body` at the term level.
#[derive(Debug, Clone, Eq)]
pub struct PolyTerm {
    pub binders: Vec<String>,
    pub body: Term,
}

impl PartialEq for PolyTerm {
    fn eq(&self, other: &Self) -> bool {
        self.binders.len() == other.binders.len() && self.body == other.body
    }
}

impl PolyTerm {
    pub fn mono(body: Term) -> PolyTerm {
        PolyTerm { binders: Vec::new(), body }
    }

    /// Builds `forall names. body` from a body with the named type variables free.
    pub fn forall_ty(names: &[&str], body: Term) -> PolyTerm {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let body = body.close_ty(&names);
        PolyTerm { binders: names, body }
    }

    /// Prepends one binder, capturing the free type variable `name`.
    pub fn quantify(&self, name: impl Into<String>) -> PolyTerm {
        let name = name.into();
        // Existing indices move up by one; the captured variable becomes 0.
        let shifted: Vec<MonoType> =
            (0..self.binders.len()).map(|i| MonoType::Bound(i + 1)).collect();
        let body = self.body.instantiate_ty_prefix(&shifted);
        let mut map = HashMap::new();
        map.insert(name.clone(), MonoType::Bound(0));
        let body = body.subst_ty(&map);
        let mut binders = vec![name];
        binders.extend(self.binders.iter().cloned());
        PolyTerm { binders, body }
    }

    /// Removes the first binder, instantiating it with `arg`.
    pub fn instantiate_head(&self, arg: &MonoType) -> PolyTerm {
        assert!(!self.binders.is_empty());
        // arg followed by identity on the remaining binders.
        let mut args = vec![arg.clone()];
        args.extend((0..self.binders.len() - 1).map(MonoType::Bound));
        let body = self.body.instantiate_ty_prefix(&args);
        PolyTerm { binders: self.binders[1..].to_vec(), body }
    }

    /// Opens all binders as free type variables, freshened against `avoid`
    /// and the free type variables of the body.
    pub fn open(&self, avoid: &[String]) -> (Vec<String>, Term) {
        let mut avoid = avoid.to_vec();
        self.body.free_tyvars(&mut avoid);
        let names = freshen_all(&self.binders, &avoid);
        let args: Vec<MonoType> = names.iter().map(|n| MonoType::var(n.clone())).collect();
        (names, self.body.instantiate_ty_prefix(&args))
    }

    pub fn subst_ty(&self, map: &HashMap<String, MonoType>) -> PolyTerm {
        PolyTerm { binders: self.binders.clone(), body: self.body.subst_ty(map) }
    }
}

/// One signature entry.
#[derive(Debug, Clone, PartialEq)]
pub enum SigEntry {
    TyOp(TypeOpRef),
    Decl(String, PolyType),
    Defn(String, PolyType, PolyTerm),
}

impl SigEntry {
    pub fn name(&self) -> &str {
        match self {
            SigEntry::TyOp(op) => &op.name,
            SigEntry::Decl(n, _) | SigEntry::Defn(n, _, _) => n,
        }
    }
}

/// Ordered constant context. Duplicates are representable (well-formedness
/// rejects them); lookup returns the first entry with a given name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Signature {
    entries: Vec<SigEntry>,
    index: HashMap<String, usize>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn push(&mut self, entry: SigEntry) {
        let name = entry.name().to_string();
        self.entries.push(entry);
        self.index.entry(name).or_insert(self.entries.len() - 1);
    }

    pub fn entries(&self) -> &[SigEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&SigEntry> {
        self.index.get(name).map(|&i| &self.entries[i])
    }

    pub fn tyop(&self, name: &str) -> Option<&TypeOpRef> {
        match self.get(name) {
            Some(SigEntry::TyOp(op)) => Some(op),
            _ => None,
        }
    }

    /// Polytype of a declared or defined constant.
    pub fn const_type(&self, name: &str) -> Option<&PolyType> {
        match self.get(name) {
            Some(SigEntry::Decl(_, t)) => Some(t),
            Some(SigEntry::Defn(_, t, _)) => Some(t),
            _ => None,
        }
    }

    pub fn definition(&self, name: &str) -> Option<(&PolyType, &PolyTerm)> {
        match self.get(name) {
            Some(SigEntry::Defn(_, t, b)) => Some((t, b)),
            _ => None,
        }
    }
}

/// One typing-context entry: a type variable or a typed term variable.
#[derive(Debug, Clone, PartialEq)]
pub enum CtxEntry {
    TyVar(String),
    Var(String, MonoType),
}

/// Ordered typing context with unique names.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TypingContext {
    entries: Vec<CtxEntry>,
}

impl TypingContext {
    pub fn new() -> TypingContext {
        TypingContext::default()
    }

    pub fn entries(&self) -> &[CtxEntry] {
        &self.entries
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.entries.iter().any(|e| match e {
            CtxEntry::TyVar(x) => x == name,
            CtxEntry::Var(x, _) => x == name,
        })
    }

    pub fn has_tyvar(&self, name: &str) -> bool {
        self.entries
            .iter()
            .any(|e| matches!(e, CtxEntry::TyVar(x) if x == name))
    }

    pub fn var_type(&self, name: &str) -> Option<&MonoType> {
        self.entries.iter().rev().find_map(|e| match e {
            CtxEntry::Var(x, t) if x == name => Some(t),
            _ => None,
        })
    }

    /// Pushes an entry; fails (returning the name) on a duplicate.
    pub fn push(&mut self, entry: CtxEntry) -> Result<(), String> {
        let name = match &entry {
            CtxEntry::TyVar(x) => x.clone(),
            CtxEntry::Var(x, _) => x.clone(),
        };
        if self.contains_name(&name) {
            return Err(name);
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn names(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|e| match e {
                CtxEntry::TyVar(x) => x.clone(),
                CtxEntry::Var(x, _) => x.clone(),
            })
            .collect()
    }
}

/// Picks a name based on `hint` that does not occur in `avoid`.
pub fn freshen(hint: &str, avoid: &[String]) -> String {
    let base = if hint.is_empty() { "x" } else { hint };
    if !avoid.iter().any(|a| a == base) {
        return base.to_string();
    }
    let mut n = 0usize;
    loop {
        let cand = format!("{base}{n}");
        if !avoid.iter().any(|a| a == &cand) {
            return cand;
        }
        n += 1;
    }
}

fn freshen_all(hints: &[String], avoid: &[String]) -> Vec<String> {
    let mut avoid = avoid.to_vec();
    let mut out = Vec::with_capacity(hints.len());
    for h in hints {
        let n = freshen(h, &avoid);
        avoid.push(n.clone());
        out.push(n);
    }
    out
}

// ---------------------------------------------------------------------------
// Printing. Bound indices are resolved against a scope of hint names,
// freshened so the rendering never conflates distinct variables.
// ---------------------------------------------------------------------------

struct TermPrinter {
    scope: Vec<String>,
}

impl MonoType {
    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            MonoType::Var(x) => write!(f, "{x}"),
            MonoType::Bound(i) => write!(f, "?T{i}"),
            MonoType::Prop => write!(f, "Prop"),
            MonoType::Fun(a, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                a.fmt_with(f, 1)?;
                write!(f, " -> ")?;
                b.fmt_with(f, 0)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            MonoType::Op(op, args) => {
                if args.is_empty() {
                    return write!(f, "{}", op.name);
                }
                if prec > 1 {
                    write!(f, "(")?;
                }
                write!(f, "{}", op.name)?;
                for a in args {
                    write!(f, " ")?;
                    a.fmt_with(f, 2)?;
                }
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for MonoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, 0)
    }
}

impl fmt::Display for PolyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (names, body) = self.open(&[]);
        for n in &names {
            write!(f, "!{n}. ")?;
        }
        body.fmt_with(f, 0)
    }
}

impl TermPrinter {
    fn fresh(&self, hint: &str, body: &Term) -> String {
        let mut avoid: Vec<String> = self.scope.clone();
        body.free_vars(&mut avoid);
        freshen(hint, &avoid)
    }

    fn print(&mut self, t: &Term, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match t {
            Term::Var(x) => write!(f, "{x}"),
            Term::Bound(i) => {
                let k = self.scope.len();
                match k.checked_sub(i + 1) {
                    Some(j) => write!(f, "{}", self.scope[j]),
                    None => write!(f, "?{i}"),
                }
            }
            Term::Const(c, ts) => {
                if ts.is_empty() {
                    write!(f, "{c}")
                } else {
                    if prec > 1 {
                        write!(f, "(")?;
                    }
                    write!(f, "{c}")?;
                    for ty in ts {
                        write!(f, " [")?;
                        ty.fmt_with(f, 0)?;
                        write!(f, "]")?;
                    }
                    if prec > 1 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
            Term::Abs(h, ty, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                let name = self.fresh(h, b);
                write!(f, "\\{name}^")?;
                ty.fmt_with(f, 2)?;
                write!(f, ". ")?;
                self.scope.push(name);
                self.print(b, f, 0)?;
                self.scope.pop();
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Term::App(fun, arg) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                self.print(fun, f, 1)?;
                write!(f, " ")?;
                self.print(arg, f, 2)?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Term::Imp(l, r) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                self.print(l, f, 1)?;
                write!(f, " => ")?;
                self.print(r, f, 0)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Term::Forall(h, ty, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                let name = self.fresh(h, b);
                write!(f, "!{name}^")?;
                ty.fmt_with(f, 2)?;
                write!(f, ". ")?;
                self.scope.push(name);
                self.print(b, f, 0)?;
                self.scope.pop();
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        TermPrinter { scope: Vec::new() }.print(self, f, 0)
    }
}

impl fmt::Display for PolyTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (names, body) = self.open(&[]);
        for n in &names {
            write!(f, "!{n}. ")?;
        }
        TermPrinter { scope: Vec::new() }.print(&body, f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(n: &str) -> MonoType {
        MonoType::var(n)
    }

    #[test]
    fn alpha_ignores_binder_hints() {
        let a = Term::abs("x", tv("A"), Term::var("x"));
        let b = Term::abs("y", tv("A"), Term::var("y"));
        assert!(alpha_eq(&a, &b));
    }

    #[test]
    fn alpha_sees_annotations() {
        let a = Term::abs("x", tv("A"), Term::var("x"));
        let b = Term::abs("x", tv("B"), Term::var("x"));
        assert!(!alpha_eq(&a, &b));
    }

    #[test]
    fn alpha_free_vars_matter() {
        assert!(!alpha_eq(&Term::var("x"), &Term::var("y")));
    }

    #[test]
    fn subst_tm_simple() {
        // (P x)[x := y] = P y
        let t = Term::app(Term::var("P"), Term::var("x"));
        let r = t.subst_tm("x", &Term::var("y"));
        assert_eq!(r, Term::app(Term::var("P"), Term::var("y")));
    }

    #[test]
    fn subst_tm_no_capture() {
        // (\y^A. x)[x := y] keeps the image free; printing renames the hint.
        let t = Term::abs("y", tv("A"), Term::var("x"));
        let r = t.subst_tm("x", &Term::var("y"));
        let expected = Term::abs("z", tv("A"), Term::var("y"));
        assert!(alpha_eq(&r, &expected));
        assert_eq!(r.to_string(), "\\y0^A. y");
    }

    #[test]
    fn subst_ty_renames_on_capture() {
        // (forall Y. Y -> X)[X := Y] = forall Z. Z -> Y
        let t = PolyType::forall(&["Y"], MonoType::fun(tv("Y"), tv("X")));
        let mut map = HashMap::new();
        map.insert("X".to_string(), tv("Y"));
        let r = t.subst_ty(&map);
        let expected = PolyType::forall(&["Z"], MonoType::fun(tv("Z"), tv("Y")));
        assert_eq!(r, expected);
        // The printer avoids the free Y when rendering the binder.
        assert_eq!(r.to_string(), "!Y0. Y0 -> Y");
    }

    #[test]
    fn subst_ty_identity_on_empty_map() {
        let a = MonoType::fun(tv("A"), MonoType::Prop);
        assert_eq!(a.subst_ty(&HashMap::new()), a);
    }

    #[test]
    fn subst_ty_disjoint_maps_commute() {
        let t = MonoType::fun(tv("X"), MonoType::fun(tv("Y"), tv("Z")));
        let mut m1 = HashMap::new();
        m1.insert("X".to_string(), MonoType::Prop);
        let mut m2 = HashMap::new();
        m2.insert("Y".to_string(), MonoType::fun(MonoType::Prop, MonoType::Prop));
        assert_eq!(t.subst_ty(&m1).subst_ty(&m2), t.subst_ty(&m2).subst_ty(&m1));
    }

    #[test]
    fn quantify_shifts_existing_binders() {
        // body: \x^Y. x with binders [Y]; quantify X gives binders [X, Y].
        let inner = PolyTerm::forall_ty(&["Y"], Term::abs("x", tv("Y"), Term::var("x")));
        assert_eq!(
            inner.body,
            Term::Abs("x".into(), MonoType::Bound(0), Box::new(Term::Bound(0)))
        );
        let outer = inner.quantify("X");
        assert_eq!(outer.binders.len(), 2);
        // The annotation still refers to Y, now index 1.
        assert_eq!(
            outer.body,
            Term::Abs("x".into(), MonoType::Bound(1), Box::new(Term::Bound(0)))
        );
    }

    #[test]
    fn instantiate_head_peels_one_binder() {
        let t = PolyTerm::forall_ty(
            &["X", "Y"],
            Term::abs("x", tv("X"), Term::abs("y", tv("Y"), Term::var("x"))),
        );
        let r = t.instantiate_head(&MonoType::Prop);
        assert_eq!(r.binders.len(), 1);
        let expected = PolyTerm::forall_ty(
            &["Y"],
            Term::abs("x", MonoType::Prop, Term::abs("y", tv("Y"), Term::var("x"))),
        );
        assert_eq!(r, expected);
    }

    #[test]
    fn open_freshens_against_avoid() {
        let t = PolyTerm::forall_ty(&["X"], Term::abs("x", tv("X"), Term::var("x")));
        let (names, _) = t.open(&["X".to_string()]);
        assert_eq!(names, vec!["X0".to_string()]);
    }

    #[test]
    fn context_rejects_duplicates() {
        let mut ctx = TypingContext::new();
        ctx.push(CtxEntry::TyVar("X".into())).unwrap();
        assert!(ctx.push(CtxEntry::Var("X".into(), MonoType::Prop)).is_err());
    }

    #[test]
    fn signature_lookup_first_wins() {
        let mut sig = Signature::new();
        sig.push(SigEntry::Decl("c".into(), PolyType::mono(MonoType::Prop)));
        sig.push(SigEntry::Decl("c".into(), PolyType::mono(tv("X"))));
        assert_eq!(sig.const_type("c"), Some(&PolyType::mono(MonoType::Prop)));
    }
}
