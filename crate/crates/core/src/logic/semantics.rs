use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Map, Value};

use super::signature::{Signature, Tuple};
use super::syntax::{Formula, QuantKind, Sequent, Sort, Term};
use crate::base::{product, BaseMorphism};
use crate::error::{Error, Result};
use crate::hyperdoctrine::{Model, Predicate};

/// Typed variables; the first binding of a name wins.
pub type Context = Vec<(String, Sort)>;

fn lookup<'c>(ctx: &'c [(String, Sort)], x: &str) -> Option<(usize, &'c Sort)> {
    ctx.iter().position(|(y, _)| y == x).map(|i| (i, &ctx[i].1))
}

fn mismatch(what: &str, expected: &Sort, found: &Sort) -> Error {
    Error::Type(format!("{what}: expected {expected}, found {found}"))
}

fn check_args(sig: &Signature, ctx: &[(String, Sort)], name: &str, expected: &[Sort], args: &[Term]) -> Result<()> {
    if expected.len() != args.len() {
        return Err(Error::Type(format!("{name} takes {} arguments, given {}", expected.len(), args.len())));
    }
    for (i, (want, t)) in expected.iter().zip(args).enumerate() {
        let got = term_sort(sig, ctx, t)?;
        if &got != want {
            return Err(mismatch(&format!("argument {} of {name}", i + 1), want, &got));
        }
    }
    Ok(())
}

/// The sort of `t` under `ctx`. A name not bound in `ctx` may denote a
/// nullary function symbol.
pub fn term_sort(sig: &Signature, ctx: &[(String, Sort)], t: &Term) -> Result<Sort> {
    match t {
        Term::Var(x) => {
            if let Some((_, s)) = lookup(ctx, x) {
                return Ok(s.clone());
            }
            match sig.function(x) {
                Some(f) if f.args.is_empty() => Ok(f.result.clone()),
                _ => Err(Error::Type(format!("unbound variable {x}"))),
            }
        }
        Term::App(f, args) => {
            let sym = sig.function(f).ok_or_else(|| Error::Type(format!("unknown function symbol {f}")))?;
            check_args(sig, ctx, f, &sym.args, args)?;
            Ok(sym.result.clone())
        }
        Term::Pair(a, b) => Ok(Sort::prod(term_sort(sig, ctx, a)?, term_sort(sig, ctx, b)?)),
        Term::Fst(p) | Term::Snd(p) => match term_sort(sig, ctx, p)? {
            Sort::Prod(a, b) => Ok(if matches!(t, Term::Fst(_)) { *a } else { *b }),
            other => Err(Error::Type(format!("projection of non-product sort {other}"))),
        },
    }
}

pub fn typecheck_formula(sig: &Signature, ctx: &[(String, Sort)], phi: &Formula) -> Result<()> {
    match phi {
        Formula::Pred(p, args) => {
            let sym = sig.predicate(p).ok_or_else(|| Error::Type(format!("unknown predicate symbol {p}")))?;
            check_args(sig, ctx, p, &sym.args, args)
        }
        Formula::Top | Formula::Bot => Ok(()),
        Formula::And(a, b) | Formula::Or(a, b) => {
            typecheck_formula(sig, ctx, a)?;
            typecheck_formula(sig, ctx, b)
        }
        Formula::Not(a) => typecheck_formula(sig, ctx, a),
        Formula::Eq(s, t) => {
            let (ls, rs) = (term_sort(sig, ctx, s)?, term_sort(sig, ctx, t)?);
            if ls != rs {
                return Err(mismatch("right side of =", &ls, &rs));
            }
            Ok(())
        }
        Formula::Quant(_, x, s, body) => {
            sig.sort_object(s)?;
            let mut inner = vec![(x.clone(), s.clone())];
            inner.extend_from_slice(ctx);
            typecheck_formula(sig, &inner, body)
        }
    }
}

/// Free variables in order of first occurrence.
fn free_in_order(phi: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
    fn term(t: &Term, bound: &[String], out: &mut Vec<String>) {
        match t {
            Term::Var(x) => {
                if !bound.contains(x) && !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| term(a, bound, out)),
            Term::Pair(a, b) => {
                term(a, bound, out);
                term(b, bound, out);
            }
            Term::Fst(t) | Term::Snd(t) => term(t, bound, out),
        }
    }
    match phi {
        Formula::Pred(_, args) => args.iter().for_each(|a| term(a, bound, out)),
        Formula::Top | Formula::Bot => {}
        Formula::And(a, b) | Formula::Or(a, b) => {
            free_in_order(a, bound, out);
            free_in_order(b, bound, out);
        }
        Formula::Not(a) => free_in_order(a, bound, out),
        Formula::Eq(s, t) => {
            term(s, bound, out);
            term(t, bound, out);
        }
        Formula::Quant(_, x, _, body) => {
            bound.push(x.clone());
            free_in_order(body, bound, out);
            bound.pop();
        }
    }
}

struct Inference<'a> {
    sig: &'a Signature,
    env: BTreeMap<String, Sort>,
}

impl Inference<'_> {
    fn assign(&mut self, x: &str, s: &Sort) -> Result<()> {
        match self.env.get(x) {
            Some(old) if old != s => Err(Error::Type(format!("variable {x} used at sorts {old} and {s}"))),
            Some(_) => Ok(()),
            None => {
                self.env.insert(x.to_string(), s.clone());
                Ok(())
            }
        }
    }

    fn context(&self, bound: &[(String, Sort)]) -> Context {
        let mut ctx = bound.to_vec();
        ctx.extend(self.env.iter().map(|(k, v)| (k.clone(), v.clone())));
        ctx
    }

    fn term(&mut self, bound: &[(String, Sort)], t: &Term, expected: &Sort) -> Result<()> {
        match t {
            Term::Var(x) => {
                let is_bound = lookup(bound, x).is_some();
                let is_const = self.sig.function(x).is_some_and(|f| f.args.is_empty());
                if !is_bound && !is_const {
                    self.assign(x, expected)?;
                }
                Ok(())
            }
            Term::Pair(a, b) => {
                if let Sort::Prod(sa, sb) = expected {
                    self.term(bound, a, sa)?;
                    self.term(bound, b, sb)?;
                }
                Ok(())
            }
            Term::App(f, args) => self.args(bound, f, args, false),
            Term::Fst(_) | Term::Snd(_) => Ok(()),
        }
    }

    fn args(&mut self, bound: &[(String, Sort)], name: &str, args: &[Term], predicate: bool) -> Result<()> {
        let expected = if predicate {
            self.sig.predicate(name).map(|p| p.args.clone())
        } else {
            self.sig.function(name).map(|f| f.args.clone())
        };
        if let Some(expected) = expected {
            for (t, s) in args.iter().zip(&expected) {
                self.term(bound, t, s)?;
            }
        }
        Ok(())
    }

    fn formula(&mut self, bound: &mut Vec<(String, Sort)>, phi: &Formula) -> Result<()> {
        match phi {
            Formula::Pred(p, args) => self.args(bound, p, args, true),
            Formula::Top | Formula::Bot => Ok(()),
            Formula::And(a, b) | Formula::Or(a, b) => {
                self.formula(bound, a)?;
                self.formula(bound, b)
            }
            Formula::Not(a) => self.formula(bound, a),
            Formula::Eq(s, t) => {
                let ctx = self.context(bound);
                if let Ok(sort) = term_sort(self.sig, &ctx, s) {
                    self.term(bound, t, &sort)?;
                } else if let Ok(sort) = term_sort(self.sig, &ctx, t) {
                    self.term(bound, s, &sort)?;
                }
                Ok(())
            }
            Formula::Quant(_, x, s, body) => {
                bound.insert(0, (x.clone(), s.clone()));
                let r = self.formula(bound, body);
                bound.remove(0);
                r
            }
        }
    }
}

/// Infers sorts for the free variables of the formulas from the symbols they
/// feed into. Variables that remain unconstrained get `default`, if given.
pub fn infer_context(sig: &Signature, formulas: &[&Formula], default: Option<&Sort>) -> Result<Context> {
    let mut order = Vec::new();
    for f in formulas {
        free_in_order(f, &mut Vec::new(), &mut order);
    }
    let mut inf = Inference { sig, env: BTreeMap::new() };
    loop {
        let before = inf.env.len();
        for f in formulas {
            inf.formula(&mut Vec::new(), f)?;
        }
        if inf.env.len() == before {
            break;
        }
    }
    order
        .into_iter()
        .filter(|x| !sig.function(x).is_some_and(|f| f.args.is_empty()) || inf.env.contains_key(x))
        .map(|x| {
            let s = inf.env.get(&x).or(default).cloned();
            s.map(|s| (x.clone(), s)).ok_or_else(|| Error::Type(format!("cannot infer the sort of {x}")))
        })
        .collect()
}

/// The explicit context of `seq`, or an inferred one.
pub fn sequent_context(sig: &Signature, seq: &Sequent) -> Result<Context> {
    match &seq.context {
        Some(ctx) => Ok(ctx.clone()),
        None => infer_context(sig, &[&seq.lhs, &seq.rhs], None),
    }
}

pub fn typecheck_sequent(sig: &Signature, seq: &Sequent) -> Result<Context> {
    let ctx = sequent_context(sig, seq)?;
    for (_, s) in &ctx {
        sig.sort_object(s)?;
    }
    typecheck_formula(sig, &ctx, &seq.lhs)?;
    typecheck_formula(sig, &ctx, &seq.rhs)?;
    Ok(ctx)
}

/// A term with symbols resolved to tables.
enum Compiled {
    Var(usize),
    App { table: Vec<usize>, args: Tuple, parts: Vec<Compiled> },
    Pair(Box<Compiled>, Box<Compiled>, usize),
    Fst(Box<Compiled>, usize),
    Snd(Box<Compiled>, usize),
}

impl Compiled {
    fn eval(&self, assignment: &[usize]) -> usize {
        match self {
            Compiled::Var(i) => assignment[*i],
            Compiled::App { table, args, parts } => {
                let vals: Vec<usize> = parts.iter().map(|p| p.eval(assignment)).collect();
                table[args.encode(&vals)]
            }
            Compiled::Pair(a, b, nb) => a.eval(assignment) * nb + b.eval(assignment),
            Compiled::Fst(p, nb) => p.eval(assignment) / nb,
            Compiled::Snd(p, nb) => p.eval(assignment) % nb,
        }
    }
}

/// Interprets formulas of one signature in one model. Product objects are
/// cached per list of sorts.
pub struct Interpreter<'a> {
    m: &'a Model,
    sig: &'a Signature,
    tuples: RefCell<HashMap<Vec<Sort>, Tuple>>,
}

impl<'a> Interpreter<'a> {
    pub fn new(m: &'a Model, sig: &'a Signature) -> Self {
        Interpreter { m, sig, tuples: RefCell::new(HashMap::new()) }
    }

    fn tuple(&self, sorts: &[Sort]) -> Result<Tuple> {
        if let Some(t) = self.tuples.borrow().get(sorts) {
            return Ok(t.clone());
        }
        let t = self.sig.tuple(sorts)?;
        self.tuples.borrow_mut().insert(sorts.to_vec(), t.clone());
        Ok(t)
    }

    fn context_tuple(&self, ctx: &[(String, Sort)]) -> Result<Tuple> {
        let sorts: Vec<Sort> = ctx.iter().map(|(_, s)| s.clone()).collect();
        self.tuple(&sorts)
    }

    fn compile(&self, ctx: &[(String, Sort)], t: &Term) -> Result<(Compiled, Sort)> {
        Ok(match t {
            Term::Var(x) => match lookup(ctx, x) {
                Some((i, s)) => (Compiled::Var(i), s.clone()),
                None => return self.compile(ctx, &Term::App(x.clone(), vec![])),
            },
            Term::App(f, args) => {
                let sym = self.sig.function(f).ok_or_else(|| Error::Type(format!("unknown function symbol {f}")))?;
                let parts = args.iter().map(|a| self.compile(ctx, a).map(|c| c.0)).collect::<Result<Vec<_>>>()?;
                let c = Compiled::App { table: sym.map.table().to_vec(), args: self.tuple(&sym.args)?, parts };
                (c, sym.result.clone())
            }
            Term::Pair(a, b) => {
                let (ca, sa) = self.compile(ctx, a)?;
                let (cb, sb) = self.compile(ctx, b)?;
                let nb = self.sig.sort_object(&sb)?.len();
                (Compiled::Pair(Box::new(ca), Box::new(cb), nb), Sort::prod(sa, sb))
            }
            Term::Fst(p) | Term::Snd(p) => {
                let (cp, sp) = self.compile(ctx, p)?;
                let Sort::Prod(a, b) = sp else {
                    return Err(Error::Type(format!("projection of non-product sort {sp}")));
                };
                let nb = self.sig.sort_object(&b)?.len();
                if matches!(t, Term::Fst(_)) {
                    (Compiled::Fst(Box::new(cp), nb), *a)
                } else {
                    (Compiled::Snd(Box::new(cp), nb), *b)
                }
            }
        })
    }

    /// The morphism `⟦Γ⟧ → target` sending each assignment to `point(values)`.
    fn tabulate(&self, ctx: &Tuple, target: &crate::base::BaseObject, point: impl Fn(&[usize]) -> usize) -> Result<BaseMorphism> {
        let table = ctx.object().points().map(|p| point(&ctx.decode(p))).collect();
        BaseMorphism::new(ctx.object().clone(), target.clone(), table)
    }

    pub fn term(&self, ctx: &[(String, Sort)], t: &Term) -> Result<BaseMorphism> {
        let tuple = self.context_tuple(ctx)?;
        let (c, s) = self.compile(ctx, t)?;
        let target = self.sig.sort_object(&s)?;
        self.tabulate(&tuple, &target, |a| c.eval(a))
    }

    pub fn formula(&self, ctx: &[(String, Sort)], phi: &Formula) -> Result<Predicate> {
        let m = self.m;
        let tuple = self.context_tuple(ctx)?;
        match phi {
            Formula::Pred(p, args) => {
                let sym = self.sig.predicate(p).ok_or_else(|| Error::Type(format!("unknown predicate symbol {p}")))?;
                let arg_tuple = self.tuple(&sym.args)?;
                let parts = args.iter().map(|a| self.compile(ctx, a).map(|c| c.0)).collect::<Result<Vec<_>>>()?;
                let f = self.tabulate(&tuple, arg_tuple.object(), |a| {
                    let vals: Vec<usize> = parts.iter().map(|c| c.eval(a)).collect();
                    arg_tuple.encode(&vals)
                })?;
                m.pullback(&f, &sym.pred)
            }
            Formula::Top => Ok(m.top_on(tuple.object())),
            Formula::Bot => Ok(m.bot_on(tuple.object())),
            Formula::And(a, b) => m.meet(&self.formula(ctx, a)?, &self.formula(ctx, b)?),
            Formula::Or(a, b) => m.join(&self.formula(ctx, a)?, &self.formula(ctx, b)?),
            Formula::Not(a) => m.ortho(&self.formula(ctx, a)?),
            Formula::Eq(s, t) => {
                let (cs, sort) = self.compile(ctx, s)?;
                let (ct, _) = self.compile(ctx, t)?;
                let obj = self.sig.sort_object(&sort)?;
                let square = product(&obj, &obj)?;
                let eq = m.equality_along(&square, &m.top_on(&obj))?;
                let n = obj.len();
                let pair = self.tabulate(&tuple, &square.object, |a| cs.eval(a) * n + ct.eval(a))?;
                m.pullback(&pair, &eq)
            }
            Formula::Quant(q, x, s, body) => {
                let mut inner = vec![(x.clone(), s.clone())];
                inner.extend_from_slice(ctx);
                let inner_tuple = self.context_tuple(&inner)?;
                let v = self.formula(&inner, body)?;
                let pi = inner_tuple.outer().expect("non-empty context");
                match q {
                    QuantKind::Forall => m.forall_along(pi, &v),
                    QuantKind::Exists => m.exists_along(pi, &v),
                }
            }
        }
    }

    /// `{variable: point label}` for a point of `⟦Γ⟧`.
    pub fn describe_point(&self, ctx: &[(String, Sort)], point: usize) -> Result<Value> {
        let tuple = self.context_tuple(ctx)?;
        let mut out = Map::new();
        for ((x, s), v) in ctx.iter().zip(tuple.decode(point)) {
            if !out.contains_key(x) {
                out.insert(x.clone(), Value::String(self.sig.sort_object(s)?.label(v).to_string()));
            }
        }
        Ok(Value::Object(out))
    }

    pub fn sequent(&self, seq: &Sequent) -> Result<Validity> {
        let ctx = typecheck_sequent(self.sig, seq)?;
        let lhs = self.formula(&ctx, &seq.lhs)?;
        let rhs = self.formula(&ctx, &seq.rhs)?;
        let omega = self.m.omega();
        let bad = (0..lhs.table().len()).find(|&p| !omega.leq(lhs.at(p), rhs.at(p)));
        Ok(match bad {
            None => Validity::Valid,
            Some(p) => Validity::Invalid(json!({
                "assignment": self.describe_point(&ctx, p)?,
                "lhs": omega.label(lhs.at(p)),
                "rhs": omega.label(rhs.at(p)),
            })),
        })
    }
}

/// Outcome of a sequent check; an invalid sequent carries the first point of
/// the context where the left side is not below the right.
#[derive(Debug, Clone, PartialEq)]
pub enum Validity {
    Valid,
    Invalid(Value),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }

    pub fn witness(&self) -> Option<&Value> {
        match self {
            Validity::Valid => None,
            Validity::Invalid(w) => Some(w),
        }
    }
}

/// `⟦φ⟧` as a predicate over `⟦Γ⟧`, after typechecking.
pub fn interpret_formula(m: &Model, sig: &Signature, ctx: &[(String, Sort)], phi: &Formula) -> Result<Predicate> {
    typecheck_formula(sig, ctx, phi)?;
    Interpreter::new(m, sig).formula(ctx, phi)
}

/// `⟦t⟧ : ⟦Γ⟧ → ⟦σ⟧`, after typechecking.
pub fn interpret_term(m: &Model, sig: &Signature, ctx: &[(String, Sort)], t: &Term) -> Result<BaseMorphism> {
    term_sort(sig, ctx, t)?;
    Interpreter::new(m, sig).term(ctx, t)
}

pub fn check_sequent(m: &Model, sig: &Signature, seq: &Sequent) -> Result<Validity> {
    Interpreter::new(m, sig).sequent(seq)
}
