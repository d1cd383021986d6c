use std::collections::BTreeSet;
use std::fmt;

/// A sort: a named base object or a binary product.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Named(String),
    Prod(Box<Sort>, Box<Sort>),
}

impl Sort {
    pub fn named(s: impl Into<String>) -> Self {
        Sort::Named(s.into())
    }

    pub fn prod(a: Sort, b: Sort) -> Self {
        Sort::Prod(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Named(s) => f.write_str(s),
            Sort::Prod(a, b) => {
                if matches!(**a, Sort::Prod(..)) {
                    write!(f, "({a}) * {b}")
                } else {
                    write!(f, "{a} * {b}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
    Pair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
}

impl Term {
    pub fn var(x: impl Into<String>) -> Self {
        Term::Var(x.into())
    }

    pub fn free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.free_vars(out)),
            Term::Pair(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            Term::Fst(t) | Term::Snd(t) => t.free_vars(out),
        }
    }

    pub fn mentions(&self, x: &str) -> bool {
        let mut fv = BTreeSet::new();
        self.free_vars(&mut fv);
        fv.contains(x)
    }

    pub fn substitute(&self, x: &str, t: &Term) -> Term {
        match self {
            Term::Var(y) if y == x => t.clone(),
            Term::Var(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.substitute(x, t)).collect()),
            Term::Pair(a, b) => Term::Pair(Box::new(a.substitute(x, t)), Box::new(b.substitute(x, t))),
            Term::Fst(s) => Term::Fst(Box::new(s.substitute(x, t))),
            Term::Snd(s) => Term::Snd(Box::new(s.substitute(x, t))),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Term::Pair(a, b) => write!(f, "<{a}, {b}>"),
            Term::Fst(t) => write!(f, "fst({t})"),
            Term::Snd(t) => write!(f, "snd({t})"),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[Term]) -> fmt::Result {
    for (i, a) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantKind {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Pred(String, Vec<Term>),
    Top,
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// Ortho-negation, written postfix `'`.
    Not(Box<Formula>),
    Eq(Term, Term),
    Quant(QuantKind, String, Sort, Box<Formula>),
}

impl Formula {
    pub fn pred(p: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Pred(p.into(), args)
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn forall(x: impl Into<String>, s: Sort, body: Formula) -> Self {
        Formula::Quant(QuantKind::Forall, x.into(), s, Box::new(body))
    }

    pub fn exists(x: impl Into<String>, s: Sort, body: Formula) -> Self {
        Formula::Quant(QuantKind::Exists, x.into(), s, Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Pred(_, args) => args.iter().for_each(|a| a.free_vars(out)),
            Formula::Top | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Not(a) => a.collect_free(out),
            Formula::Eq(s, t) => {
                s.free_vars(out);
                t.free_vars(out);
            }
            Formula::Quant(_, x, _, body) => {
                let mut inner = body.free_vars();
                inner.remove(x);
                out.extend(inner);
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Pred(_, args) => args.iter().for_each(|a| a.free_vars(out)),
            Formula::Top | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            Formula::Not(a) => a.all_vars(out),
            Formula::Eq(s, t) => {
                s.free_vars(out);
                t.free_vars(out);
            }
            Formula::Quant(_, x, _, body) => {
                out.insert(x.clone());
                body.all_vars(out);
            }
        }
    }

    /// Capture-avoiding `self[t/x]`.
    pub fn substitute(&self, x: &str, t: &Term) -> Formula {
        match self {
            Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(|a| a.substitute(x, t)).collect()),
            Formula::Top | Formula::Bot => self.clone(),
            Formula::And(a, b) => Formula::and(a.substitute(x, t), b.substitute(x, t)),
            Formula::Or(a, b) => Formula::or(a.substitute(x, t), b.substitute(x, t)),
            Formula::Not(a) => Formula::not(a.substitute(x, t)),
            Formula::Eq(l, r) => Formula::Eq(l.substitute(x, t), r.substitute(x, t)),
            Formula::Quant(q, y, s, body) => {
                if y == x || !self.free_vars().contains(x) {
                    return self.clone();
                }
                if t.mentions(y) {
                    let mut avoid = BTreeSet::new();
                    t.free_vars(&mut avoid);
                    body.all_vars(&mut avoid);
                    avoid.insert(x.to_string());
                    let fresh = fresh_name(y, &avoid);
                    let renamed = body.substitute(y, &Term::Var(fresh.clone()));
                    Formula::Quant(*q, fresh, s.clone(), Box::new(renamed.substitute(x, t)))
                } else {
                    Formula::Quant(*q, y.clone(), s.clone(), Box::new(body.substitute(x, t)))
                }
            }
        }
    }

    /// Predicate symbols with their argument lists, in order of occurrence.
    pub fn atoms<'a>(&'a self, out: &mut Vec<(&'a str, &'a [Term])>) {
        match self {
            Formula::Pred(p, args) => out.push((p, args)),
            Formula::Top | Formula::Bot | Formula::Eq(..) => {}
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
            Formula::Not(a) => a.atoms(out),
            Formula::Quant(_, _, _, body) => body.atoms(out),
        }
    }
}

pub(crate) fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    (1..).map(|i| format!("{base}{i}")).find(|c| !avoid.contains(c)).expect("unbounded")
}

/// Binding strength: or < and < postfix/atom.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        Formula::Quant(..) => 0,
        _ => 3,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, phi: &Formula, min: u8) -> fmt::Result {
    if level(phi) < min {
        write!(f, "({phi})")
    } else {
        write!(f, "{phi}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Pred(p, args) if args.is_empty() => f.write_str(p),
            Formula::Pred(p, args) => {
                write!(f, "{p}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Formula::Top => f.write_str("top"),
            Formula::Bot => f.write_str("bot"),
            Formula::And(a, b) => {
                write_at(f, a, 2)?;
                f.write_str(" & ")?;
                write_at(f, b, 3)
            }
            Formula::Or(a, b) => {
                write_at(f, a, 1)?;
                f.write_str(" | ")?;
                write_at(f, b, 2)
            }
            Formula::Not(a) => {
                write_at(f, a, 3)?;
                f.write_str("'")
            }
            Formula::Eq(s, t) => write!(f, "{s} = {t}"),
            Formula::Quant(q, x, s, body) => {
                let kw = match q {
                    QuantKind::Forall => "forall",
                    QuantKind::Exists => "exists",
                };
                write!(f, "{kw} {x}:{s}. {body}")
            }
        }
    }
}

/// `Γ ; φ ⊢ ψ` with an optional explicit context.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub context: Option<Vec<(String, Sort)>>,
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Sequent {
    pub fn new(lhs: Formula, rhs: Formula) -> Self {
        Sequent { context: None, lhs, rhs }
    }

    pub fn with_context(mut self, ctx: Vec<(String, Sort)>) -> Self {
        self.context = Some(ctx);
        self
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut fv = self.lhs.free_vars();
        fv.extend(self.rhs.free_vars());
        fv
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(ctx) = &self.context {
            for (i, (x, s)) in ctx.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}:{s}")?;
            }
            f.write_str(if ctx.is_empty() { "; " } else { " ; " })?;
        }
        write!(f, "{} |- {}", self.lhs, self.rhs)
    }
}
