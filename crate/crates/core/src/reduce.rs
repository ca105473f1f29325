//! Beta-delta rewriting with step recording.
//!
//! A [`RewriteStep`] addresses one redex by a path of child indices and names
//! the rewrite kind. [`normalize`] reduces with a fixed leftmost-outermost
//! strategy and returns the [`Trace`] of steps it took, so a conversion can
//! later be replayed or re-derived step by step in another system.

use crate::term::{PolyTerm, Signature, Term};
use std::fmt;
use thiserror::Error;

/// Default step budget for [`normalize`]. Well-typed terms terminate long
/// before this; the budget exists so ill-typed input cannot hang the engine.
pub const DEFAULT_FUEL: usize = 100_000;

/// Path into a term: child indices through `App`/`Abs`/`Imp`/`Forall` nodes.
/// `App` and `Imp` have children 0 and 1, binders have the single child 0.
/// A constant applied to type arguments is a leaf; a step never descends
/// into it.
pub type Path = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepKind {
    Beta,
    /// Unfolding of the named defined constant, consuming its prenex type
    /// instantiation in the same step.
    Delta(String),
}

/// One positioned rewrite step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pub position: Path,
    pub kind: StepKind,
}

impl fmt::Display for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StepKind::Beta => write!(f, "beta@{:?}", self.position),
            StepKind::Delta(c) => write!(f, "delta({c})@{:?}", self.position),
        }
    }
}

/// A replayable sequence of rewrite steps.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<RewriteStep>,
}

impl Trace {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Replays the trace from `start`, failing if any step does not apply.
    pub fn replay(&self, start: &Term, sig: &Signature) -> Result<Term, ReduceError> {
        let mut t = start.clone();
        for s in &self.steps {
            t = apply_step(&t, s, sig)?;
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("position {at:?} does not address a {kind} redex")]
    NotARedex { at: Path, kind: String },
    #[error("unknown constant {0}")]
    UnknownConstant(String),
    #[error("constant {0} is declared but has no definition")]
    UndefinedConstant(String),
    #[error("normalization exceeded the fuel bound of {0} steps")]
    FuelExhausted(usize),
}

fn is_delta_redex(t: &Term, sig: &Signature) -> bool {
    match t {
        Term::Const(c, tyargs) => match sig.definition(c) {
            // Delta fires only on a constant carrying its full type instantiation.
            Some((ty, _)) => tyargs.len() == ty.binders.len(),
            None => false,
        },
        _ => false,
    }
}

fn contract(t: &Term, kind: &StepKind, at: &Path, sig: &Signature) -> Result<Term, ReduceError> {
    match kind {
        StepKind::Beta => match t {
            Term::App(f, a) => match &**f {
                Term::Abs(_, _, body) => Ok(body.open(a)),
                _ => Err(ReduceError::NotARedex { at: at.clone(), kind: "beta".into() }),
            },
            _ => Err(ReduceError::NotARedex { at: at.clone(), kind: "beta".into() }),
        },
        StepKind::Delta(c) => match t {
            Term::Const(name, tyargs) if name == c => match sig.get(c) {
                None => Err(ReduceError::UnknownConstant(c.clone())),
                Some(crate::term::SigEntry::Decl(_, _)) => {
                    Err(ReduceError::UndefinedConstant(c.clone()))
                }
                Some(crate::term::SigEntry::Defn(_, ty, body)) => {
                    if tyargs.len() != ty.binders.len() {
                        return Err(ReduceError::NotARedex {
                            at: at.clone(),
                            kind: format!("delta({c})"),
                        });
                    }
                    Ok(body.body.instantiate_ty_prefix(tyargs))
                }
                Some(crate::term::SigEntry::TyOp(_)) => {
                    Err(ReduceError::UnknownConstant(c.clone()))
                }
            },
            _ => Err(ReduceError::NotARedex { at: at.clone(), kind: format!("delta({c})") }),
        },
    }
}

/// Applies one rewrite step at its recorded position.
pub fn apply_step(t: &Term, step: &RewriteStep, sig: &Signature) -> Result<Term, ReduceError> {
    fn go(
        t: &Term,
        pos: &[usize],
        step: &RewriteStep,
        sig: &Signature,
    ) -> Result<Term, ReduceError> {
        if pos.is_empty() {
            return contract(t, &step.kind, &step.position, sig);
        }
        let bad = || ReduceError::NotARedex {
            at: step.position.clone(),
            kind: match &step.kind {
                StepKind::Beta => "beta".to_string(),
                StepKind::Delta(c) => format!("delta({c})"),
            },
        };
        match (t, pos[0]) {
            (Term::App(f, a), 0) => Ok(Term::App(Box::new(go(f, &pos[1..], step, sig)?), a.clone())),
            (Term::App(f, a), 1) => Ok(Term::App(f.clone(), Box::new(go(a, &pos[1..], step, sig)?))),
            (Term::Imp(l, r), 0) => Ok(Term::Imp(Box::new(go(l, &pos[1..], step, sig)?), r.clone())),
            (Term::Imp(l, r), 1) => Ok(Term::Imp(l.clone(), Box::new(go(r, &pos[1..], step, sig)?))),
            (Term::Abs(h, ty, b), 0) => Ok(Term::Abs(
                h.clone(),
                ty.clone(),
                Box::new(go(b, &pos[1..], step, sig)?),
            )),
            (Term::Forall(h, ty, b), 0) => Ok(Term::Forall(
                h.clone(),
                ty.clone(),
                Box::new(go(b, &pos[1..], step, sig)?),
            )),
            _ => Err(bad()),
        }
    }
    go(t, &step.position, step, sig)
}

/// Finds the leftmost-outermost redex, if any: the node itself first, then
/// children from left to right.
fn find_redex(t: &Term, sig: &Signature, path: &mut Path) -> Option<StepKind> {
    if let Term::App(f, _) = t {
        if matches!(&**f, Term::Abs(_, _, _)) {
            return Some(StepKind::Beta);
        }
    }
    if is_delta_redex(t, sig) {
        if let Term::Const(c, _) = t {
            return Some(StepKind::Delta(c.clone()));
        }
    }
    match t {
        Term::Var(_) | Term::Bound(_) | Term::Const(_, _) => None,
        Term::Abs(_, _, b) | Term::Forall(_, _, b) => {
            path.push(0);
            if let Some(k) = find_redex(b, sig, path) {
                return Some(k);
            }
            path.pop();
            None
        }
        Term::App(f, a) | Term::Imp(f, a) => {
            path.push(0);
            if let Some(k) = find_redex(f, sig, path) {
                return Some(k);
            }
            path.pop();
            path.push(1);
            if let Some(k) = find_redex(a, sig, path) {
                return Some(k);
            }
            path.pop();
            None
        }
    }
}

/// Normalizes with the default fuel bound.
pub fn normalize(t: &Term, sig: &Signature) -> Result<(Term, Trace), ReduceError> {
    normalize_with_fuel(t, sig, DEFAULT_FUEL)
}

/// Leftmost-outermost beta-delta normalization, recording every step.
pub fn normalize_with_fuel(
    t: &Term,
    sig: &Signature,
    fuel: usize,
) -> Result<(Term, Trace), ReduceError> {
    let mut cur = t.clone();
    let mut trace = Trace::default();
    loop {
        let mut path = Vec::new();
        match find_redex(&cur, sig, &mut path) {
            None => return Ok((cur, trace)),
            Some(kind) => {
                if trace.steps.len() >= fuel {
                    return Err(ReduceError::FuelExhausted(fuel));
                }
                let step = RewriteStep { position: path, kind };
                cur = apply_step(&cur, &step, sig)?;
                trace.steps.push(step);
            }
        }
    }
}

/// Decides beta-delta convertibility; on success returns the two
/// normalization traces as the witness.
pub fn conv(t: &Term, u: &Term, sig: &Signature) -> Result<Option<(Trace, Trace)>, ReduceError> {
    conv_with_fuel(t, u, sig, DEFAULT_FUEL)
}

pub fn conv_with_fuel(
    t: &Term,
    u: &Term,
    sig: &Signature,
    fuel: usize,
) -> Result<Option<(Trace, Trace)>, ReduceError> {
    let (nt, trt) = normalize_with_fuel(t, sig, fuel)?;
    let (nu, tru) = normalize_with_fuel(u, sig, fuel)?;
    Ok(if nt == nu { Some((trt, tru)) } else { None })
}

/// Convertibility of polyterms: equal binder counts and convertible bodies.
/// Binder indices are opaque to reduction, so bodies compare directly.
pub fn conv_poly(
    t: &PolyTerm,
    u: &PolyTerm,
    sig: &Signature,
    fuel: usize,
) -> Result<Option<(Trace, Trace)>, ReduceError> {
    if t.binders.len() != u.binders.len() {
        return Ok(None);
    }
    conv_with_fuel(&t.body, &u.body, sig, fuel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{MonoType, PolyTerm, PolyType, SigEntry, Signature, Term};

    fn tv(n: &str) -> MonoType {
        MonoType::var(n)
    }

    /// Signature with the polymorphic Leibniz equality definition.
    pub fn leibniz_sig() -> Signature {
        let mut sig = Signature::new();
        let ty = PolyType::forall(&["X"], MonoType::fun(tv("X"), MonoType::fun(tv("X"), MonoType::Prop)));
        let body = PolyTerm::forall_ty(
            &["X"],
            Term::abs(
                "x",
                tv("X"),
                Term::abs(
                    "y",
                    tv("X"),
                    Term::forall(
                        "P",
                        MonoType::fun(tv("X"), MonoType::Prop),
                        Term::imp(
                            Term::app(Term::var("P"), Term::var("x")),
                            Term::app(Term::var("P"), Term::var("y")),
                        ),
                    ),
                ),
            ),
        );
        sig.push(SigEntry::Defn("leibniz".into(), ty, body));
        sig
    }

    fn leib(a: MonoType, l: Term, r: Term) -> Term {
        Term::app(Term::app(Term::cst("leibniz", vec![a]), l), r)
    }

    #[test]
    fn beta_at_root() {
        let sig = Signature::new();
        let t = Term::app(Term::abs("x", tv("A"), Term::var("x")), Term::var("y"));
        let step = RewriteStep { position: vec![], kind: StepKind::Beta };
        assert_eq!(apply_step(&t, &step, &sig).unwrap(), Term::var("y"));
    }

    #[test]
    fn delta_requires_definition() {
        let mut sig = Signature::new();
        sig.push(SigEntry::Decl("c".into(), PolyType::mono(MonoType::Prop)));
        let t = Term::cst("c", vec![]);
        let step = RewriteStep { position: vec![], kind: StepKind::Delta("c".into()) };
        assert_eq!(
            apply_step(&t, &step, &sig),
            Err(ReduceError::UndefinedConstant("c".into()))
        );
        let step = RewriteStep { position: vec![], kind: StepKind::Delta("d".into()) };
        assert_eq!(
            apply_step(&Term::cst("d", vec![]), &step, &sig),
            Err(ReduceError::UnknownConstant("d".into()))
        );
    }

    #[test]
    fn delta_unfolds_leibniz_once() {
        let sig = leibniz_sig();
        let t = leib(tv("A"), Term::var("x"), Term::var("y"));
        // The redex is the constant node under two applications.
        let step = RewriteStep { position: vec![0, 0], kind: StepKind::Delta("leibniz".into()) };
        let r = apply_step(&t, &step, &sig).unwrap();
        let unfolded = Term::app(
            Term::app(
                Term::abs(
                    "x",
                    tv("A"),
                    Term::abs(
                        "y",
                        tv("A"),
                        Term::forall(
                            "P",
                            MonoType::fun(tv("A"), MonoType::Prop),
                            Term::imp(
                                Term::app(Term::var("P"), Term::var("x")),
                                Term::app(Term::var("P"), Term::var("y")),
                            ),
                        ),
                    ),
                ),
                Term::var("x"),
            ),
            Term::var("y"),
        );
        assert_eq!(r, unfolded);
    }

    #[test]
    fn normalize_leibniz_counts_delta_beta_beta() {
        let sig = leibniz_sig();
        let t = leib(tv("X"), Term::var("x"), Term::var("x"));
        let (nf, trace) = normalize(&t, &sig).unwrap();
        let expected = Term::forall(
            "P",
            MonoType::fun(tv("X"), MonoType::Prop),
            Term::imp(
                Term::app(Term::var("P"), Term::var("x")),
                Term::app(Term::var("P"), Term::var("x")),
            ),
        );
        assert_eq!(nf, expected);
        let kinds: Vec<&StepKind> = trace.steps.iter().map(|s| &s.kind).collect();
        assert_eq!(
            kinds,
            vec![&StepKind::Delta("leibniz".into()), &StepKind::Beta, &StepKind::Beta]
        );
    }

    #[test]
    fn normalize_normal_form_has_empty_trace() {
        let sig = leibniz_sig();
        let t = Term::forall("x", MonoType::Prop, Term::var("x"));
        let (nf, trace) = normalize(&t, &sig).unwrap();
        assert_eq!(nf, t);
        assert!(trace.is_empty());
    }

    #[test]
    fn replay_soundness() {
        let sig = leibniz_sig();
        let t = Term::imp(
            leib(MonoType::Prop, Term::var("p"), Term::var("q")),
            Term::app(
                Term::abs("x", MonoType::Prop, Term::var("x")),
                leib(tv("A"), Term::var("a"), Term::var("a")),
            ),
        );
        let (nf, trace) = normalize(&t, &sig).unwrap();
        assert_eq!(trace.replay(&t, &sig).unwrap(), nf);
        // Normal forms are fixpoints.
        let (nf2, tr2) = normalize(&nf, &sig).unwrap();
        assert_eq!(nf2, nf);
        assert!(tr2.is_empty());
    }

    #[test]
    fn conv_identifies_unfolded_form() {
        let sig = leibniz_sig();
        // forall X. forall x^X. leibniz x x  ~  forall X. forall x^X. forall P. P x => P x
        let lhs = PolyTerm::forall_ty(
            &["X"],
            Term::forall("x", tv("X"), leib(tv("X"), Term::var("x"), Term::var("x"))),
        );
        let rhs = PolyTerm::forall_ty(
            &["X"],
            Term::forall(
                "x",
                tv("X"),
                Term::forall(
                    "P",
                    MonoType::fun(tv("X"), MonoType::Prop),
                    Term::imp(
                        Term::app(Term::var("P"), Term::var("x")),
                        Term::app(Term::var("P"), Term::var("x")),
                    ),
                ),
            ),
        );
        let w = conv_poly(&lhs, &rhs, &sig, DEFAULT_FUEL).unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn conv_distinguishes_distinct_normal_forms() {
        let sig = Signature::new();
        let a = Term::forall("x", MonoType::Prop, Term::var("x"));
        let b = Term::forall("x", MonoType::Prop, Term::imp(Term::var("x"), Term::var("x")));
        assert_eq!(conv(&a, &b, &sig).unwrap(), None);
        // Reflexive case: both traces empty.
        let w = conv(&a, &a, &sig).unwrap().unwrap();
        assert!(w.0.is_empty() && w.1.is_empty());
    }

    #[test]
    fn fuel_guards_divergence() {
        let mut sig = Signature::new();
        // omega is ill-typed but syntactically fine: (\x. x x) (\x. x x)
        let self_app = Term::abs("x", MonoType::Prop, Term::app(Term::var("x"), Term::var("x")));
        sig.push(SigEntry::Defn(
            "omega".into(),
            PolyType::mono(MonoType::Prop),
            PolyTerm::mono(Term::app(self_app.clone(), self_app)),
        ));
        let t = Term::cst("omega", vec![]);
        assert_eq!(
            normalize_with_fuel(&t, &sig, 100),
            Err(ReduceError::FuelExhausted(100))
        );
    }
}
