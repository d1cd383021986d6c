use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::parser::{parse_sequent, parse_sort};
use super::semantics::Interpreter;
use super::signature::Signature;
use super::syntax::{Formula, Sequent, Sort, Term};
use crate::base::BaseMorphism;
use crate::error::{check_capacity, Error, Result};
use crate::hyperdoctrine::{Model, Predicate};
use crate::report::{LawCheck, LawReport};

pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_INSTANCE_BOUND: usize = 100_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

/// `fresh`: the variable is an eigenvariable, absent from every conclusion.
/// `notin`: the variable never appears among the arguments of the named
/// metavariable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideCondition {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fresh: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notin: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionDecl {
    #[serde(default)]
    pub args: Vec<String>,
    pub result: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub predicates: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionDecl>,
    #[serde(default)]
    pub premises: Vec<String>,
    pub conclusion: OneOrMany,
    #[serde(default)]
    pub side: Vec<SideCondition>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleSetFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub rules: Vec<RuleFile>,
}

/// An inference schema. Predicate and function metavariables range over all
/// interpretations in the model; premises and conclusions are sequents over
/// them.
#[derive(Debug, Clone)]
pub struct Rule {
    pub name: String,
    pub predicates: Vec<(String, Vec<Sort>)>,
    pub functions: Vec<(String, Vec<Sort>, Sort)>,
    pub premises: Vec<Sequent>,
    pub conclusions: Vec<Sequent>,
    pub side: Vec<SideCondition>,
}

fn sorts(names: &[String]) -> Result<Vec<Sort>> {
    names.iter().map(|s| parse_sort(s)).collect()
}

fn metavar_mentions(phi: &Formula, metavar: &str, x: &str) -> bool {
    let mut atoms = Vec::new();
    phi.atoms(&mut atoms);
    atoms.iter().any(|(p, args)| *p == metavar && args.iter().any(|a| a.mentions(x)))
}

impl Rule {
    pub fn from_file(f: &RuleFile) -> Result<Self> {
        let parse_all = |v: &[String]| v.iter().map(|s| parse_sequent(s)).collect::<Result<Vec<_>>>();
        let conclusions = match &f.conclusion {
            OneOrMany::One(s) => vec![parse_sequent(s)?],
            OneOrMany::Many(v) => parse_all(v)?,
        };
        let rule = Rule {
            name: f.name.clone(),
            predicates: f.predicates.iter().map(|(k, v)| Ok((k.clone(), sorts(v)?))).collect::<Result<_>>()?,
            functions: f
                .functions
                .iter()
                .map(|(k, d)| Ok((k.clone(), sorts(&d.args)?, parse_sort(&d.result)?)))
                .collect::<Result<_>>()?,
            premises: parse_all(&f.premises)?,
            conclusions,
            side: f.side.clone(),
        };
        rule.check_side_conditions()?;
        Ok(rule)
    }

    fn invalid(&self, msg: String) -> Error {
        Error::Invalid(format!("rule {}: {msg}", self.name))
    }

    fn check_side_conditions(&self) -> Result<()> {
        for c in &self.side {
            if let (None, Some(_)) = (&c.fresh, &c.notin) {
                return Err(self.invalid("'notin' needs a 'fresh' variable".into()));
            }
            let Some(x) = &c.fresh else { continue };
            for s in &self.conclusions {
                let in_ctx = s.context.as_ref().is_some_and(|ctx| ctx.iter().any(|(y, _)| y == x));
                if in_ctx || s.free_vars().contains(x) {
                    return Err(self.invalid(format!("eigenvariable {x} occurs free in the conclusion")));
                }
            }
            if let Some(p) = &c.notin {
                if !self.predicates.iter().any(|(q, _)| q == p) {
                    return Err(self.invalid(format!("side condition names unknown metavariable {p}")));
                }
                let all = self.premises.iter().chain(&self.conclusions);
                for s in all {
                    if metavar_mentions(&s.lhs, p, x) || metavar_mentions(&s.rhs, p, x) {
                        return Err(self.invalid(format!("{x} occurs in an argument of {p}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_file(&self) -> RuleFile {
        let names = |v: &[Sort]| v.iter().map(Sort::to_string).collect();
        RuleFile {
            name: self.name.clone(),
            description: None,
            predicates: self.predicates.iter().map(|(k, v)| (k.clone(), names(v))).collect(),
            functions: self
                .functions
                .iter()
                .map(|(k, a, r)| (k.clone(), FunctionDecl { args: names(a), result: r.to_string() }))
                .collect(),
            premises: self.premises.iter().map(ToString::to_string).collect(),
            conclusion: OneOrMany::Many(self.conclusions.iter().map(ToString::to_string).collect()),
            side: self.side.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    pub name: String,
    pub rules: Vec<Rule>,
}

impl RuleSet {
    pub fn from_file(f: &RuleSetFile) -> Result<Self> {
        Ok(RuleSet { name: f.name.clone(), rules: f.rules.iter().map(Rule::from_file).collect::<Result<_>>()? })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: RuleSetFile = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("rule set: {e}")))?;
        Self::from_file(&f)
    }

    /// Structural, connective, ortho, quantifier and equality rules that are
    /// sound in every orthomodular fibre.
    pub fn baseline() -> Self {
        Self::from_json(include_str!("rules/baseline.json")).expect("bundled rule set parses")
    }

    /// Distributivity and Frobenius reciprocity.
    pub fn classical() -> Self {
        Self::from_json(include_str!("rules/classical.json")).expect("bundled rule set parses")
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }
}

/// How instantiations of metavariables are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// `samples` draws; draw `i` uses ChaCha8 seeded with `seed` on stream `i`.
    Random { samples: usize, seed: u64 },
    /// Every instantiation in lexicographic order, up to `bound` of them.
    Exhaustive { bound: usize },
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::Random { samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED }
    }
}

enum Choices {
    Predicate { name: String, args: Vec<Sort>, options: Vec<Predicate> },
    Function { name: String, args: Vec<Sort>, result: Sort, options: Vec<BaseMorphism> },
}

impl Choices {
    fn len(&self) -> usize {
        match self {
            Choices::Predicate { options, .. } => options.len(),
            Choices::Function { options, .. } => options.len(),
        }
    }
}

/// Every interpretation of a rule's metavariables in one model.
struct Space<'a> {
    m: &'a Model,
    sig: &'a Signature,
    choices: Vec<Choices>,
}

impl<'a> Space<'a> {
    fn new(m: &'a Model, sig: &'a Signature, rule: &Rule) -> Result<Self> {
        let mut choices = Vec::new();
        for (name, args) in &rule.predicates {
            let dom = sig.tuple(args)?;
            let options = m.enumerate_fibre(dom.object())?;
            choices.push(Choices::Predicate { name: name.clone(), args: args.clone(), options });
        }
        for (name, args, result) in &rule.functions {
            let dom = sig.tuple(args)?;
            let options = m.morphisms(dom.object(), &sig.sort_object(result)?)?;
            choices.push(Choices::Function { name: name.clone(), args: args.clone(), result: result.clone(), options });
        }
        Ok(Space { m, sig, choices })
    }

    fn total(&self) -> u128 {
        self.choices.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128))
    }

    fn decode(&self, mut index: u128) -> Vec<usize> {
        let mut out = vec![0; self.choices.len()];
        for (i, c) in self.choices.iter().enumerate().rev() {
            let n = c.len() as u128;
            out[i] = (index % n) as usize;
            index /= n;
        }
        out
    }

    fn draw(&self, seed: u64, sample: usize) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sample as u64);
        self.choices.iter().map(|c| rng.gen_range(0..c.len())).collect()
    }

    fn signature(&self, picks: &[usize]) -> Signature {
        let mut sig = self.sig.clone();
        for (c, &i) in self.choices.iter().zip(picks) {
            match c {
                Choices::Predicate { name, args, options } => sig.insert_predicate(name, args.clone(), options[i].clone()),
                Choices::Function { name, args, result, options } => {
                    sig.insert_function(name, args.clone(), result.clone(), options[i].clone())
                }
            }
        }
        sig
    }

    fn describe(&self, picks: &[usize]) -> Value {
        let mut out = Map::new();
        for (c, &i) in self.choices.iter().zip(picks) {
            let (name, v) = match c {
                Choices::Predicate { name, options, .. } => (name, self.m.describe(&options[i])),
                Choices::Function { name, options, .. } => {
                    let f = &options[i];
                    let table: Map<String, Value> = f
                        .dom()
                        .points()
                        .map(|p| (f.dom().label(p).to_string(), Value::String(f.cod().label(f.apply(p)).to_string())))
                        .collect();
                    (name, Value::Object(table))
                }
            };
            out.insert(name.clone(), v);
        }
        Value::Object(out)
    }

    /// The first conclusion that fails while all premises hold, if any.
    fn violation(&self, rule: &Rule, picks: &[usize]) -> Result<Option<Value>> {
        let sig = self.signature(picks);
        let interp = Interpreter::new(self.m, &sig);
        for p in &rule.premises {
            if !interp.sequent(p)?.is_valid() {
                return Ok(None);
            }
        }
        for c in &rule.conclusions {
            if let Some(w) = interp.sequent(c)?.witness() {
                return Ok(Some(json!({
                    "instantiation": self.describe(picks),
                    "conclusion": c.to_string(),
                    "counterexample": w,
                })));
            }
        }
        Ok(None)
    }
}

/// Runs the search and returns `(instances examined, first violation)`.
fn search(m: &Model, sig: &Signature, rule: &Rule, sampling: Sampling) -> Result<(u64, Option<Value>)> {
    let space = Space::new(m, sig, rule)?;
    let total = space.total();
    if total == 0 {
        return Ok((0, None));
    }
    let found = match sampling {
        Sampling::Random { samples, seed } => {
            let hit = (0..samples).into_par_iter().find_map_first(|i| {
                let picks = space.draw(seed, i);
                space.violation(rule, &picks).map(|v| v.map(|w| (i, w))).transpose()
            });
            let hit = hit.transpose()?;
            (samples as u64, hit.map(|(i, mut w)| {
                w["sample"] = json!(i);
                w["seed"] = json!(seed);
                w
            }))
        }
        Sampling::Exhaustive { bound } => {
            check_capacity("rule instantiations", total, bound)?;
            let n = total as usize;
            let hit = (0..n).into_par_iter().find_map_first(|i| {
                let picks = space.decode(i as u128);
                space.violation(rule, &picks).map(|v| v.map(|w| (i, w))).transpose()
            });
            let hit = hit.transpose()?;
            (total as u64, hit.map(|(i, mut w)| {
                w["instance"] = json!(i);
                w
            }))
        }
    };
    Ok(found)
}

/// Premises valid implies conclusions valid, over sampled or all
/// interpretations of the rule's metavariables. Sorts are those of `sig`.
pub fn check_rule_soundness(m: &Model, sig: &Signature, rule: &Rule, sampling: Sampling) -> Result<LawReport> {
    let (n, found) = search(m, sig, rule, sampling)?;
    Ok(LawReport::single(LawCheck::from_search(format!("rule-{}", rule.name), n, found)))
}

pub fn check_ruleset(m: &Model, sig: &Signature, set: &RuleSet, sampling: Sampling) -> Result<LawReport> {
    let mut report = LawReport::new();
    for rule in &set.rules {
        report.extend(check_rule_soundness(m, sig, rule, sampling)?);
    }
    Ok(report)
}

/// A model in a countermodel pool, with the sorts its sequents range over.
#[derive(Clone)]
pub struct Candidate {
    pub name: String,
    pub model: Model,
    pub sig: Signature,
}

/// `S = {x1, x2}` and `T = {x1}` over the two-element chain, `boolean(2)`,
/// MO2 and O6.
pub fn standard_pool() -> Vec<Candidate> {
    use crate::algebra::{boolean_algebra, chain2, mo2, o6};
    let sig = Signature::with_finite_sorts(&[("S", 2), ("T", 1)]);
    [
        ("2-chain", chain2()),
        ("boolean(2)", boolean_algebra(2).expect("small")),
        ("mo2", mo2()),
        ("o6", o6()),
    ]
    .into_iter()
    .map(|(name, omega)| Candidate {
        name: name.to_string(),
        model: Model::finset(omega).expect("bundled algebras pass their laws"),
        sig: sig.clone(),
    })
    .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Countermodel {
    pub model: String,
    pub witness: Value,
}

/// Symbols used by `phi` with the context at each use.
/// `(is_predicate, name, arguments, context)` for one symbol occurrence.
type SymbolUse = (bool, String, Vec<Term>, Vec<(String, Sort)>);

fn symbol_uses(phi: &Formula, ctx: &mut Vec<(String, Sort)>, out: &mut Vec<SymbolUse>) {
    fn terms(t: &Term, ctx: &[(String, Sort)], out: &mut Vec<SymbolUse>) {
        match t {
            Term::Var(_) => {}
            Term::App(f, args) => {
                args.iter().for_each(|a| terms(a, ctx, out));
                out.push((false, f.clone(), args.clone(), ctx.to_vec()));
            }
            Term::Pair(a, b) => {
                terms(a, ctx, out);
                terms(b, ctx, out);
            }
            Term::Fst(t) | Term::Snd(t) => terms(t, ctx, out),
        }
    }
    match phi {
        Formula::Pred(p, args) => {
            args.iter().for_each(|a| terms(a, ctx, out));
            out.push((true, p.clone(), args.clone(), ctx.clone()));
        }
        Formula::Top | Formula::Bot => {}
        Formula::And(a, b) | Formula::Or(a, b) => {
            symbol_uses(a, ctx, out);
            symbol_uses(b, ctx, out);
        }
        Formula::Not(a) => symbol_uses(a, ctx, out),
        Formula::Eq(s, t) => {
            terms(s, ctx, out);
            terms(t, ctx, out);
        }
        Formula::Quant(_, x, s, body) => {
            ctx.insert(0, (x.clone(), s.clone()));
            symbol_uses(body, ctx, out);
            ctx.remove(0);
        }
    }
}

/// Turns the symbols of `seq` that `sig` does not interpret into
/// metavariables. Unknown variable and function-result sorts default to `S`
/// when the signature has it, else to its first sort.
fn sequent_as_rule(sig: &Signature, seq: &Sequent) -> Result<Rule> {
    let default = if sig.sorts().contains_key("S") {
        Sort::named("S")
    } else {
        Sort::Named(sig.sorts().keys().next().cloned().ok_or_else(|| Error::Type("signature has no sorts".into()))?)
    };
    let mut work = sig.clone();
    let mut uses = Vec::new();
    symbol_uses(&seq.lhs, &mut Vec::new(), &mut uses);
    symbol_uses(&seq.rhs, &mut Vec::new(), &mut uses);
    let ctx = match &seq.context {
        Some(c) => c.clone(),
        None => super::semantics::infer_context(sig, &[&seq.lhs, &seq.rhs], Some(&default))?,
    };
    let mut predicates: Vec<(String, Vec<Sort>)> = Vec::new();
    let mut functions: Vec<(String, Vec<Sort>, Sort)> = Vec::new();
    for (is_pred, name, args, local) in uses {
        let known = if is_pred { sig.predicate(&name).is_some() } else { sig.function(&name).is_some() };
        if known {
            continue;
        }
        let mut full = local.clone();
        full.extend(ctx.iter().cloned());
        let arg_sorts = args
            .iter()
            .map(|a| super::semantics::term_sort(&work, &full, a))
            .collect::<Result<Vec<_>>>()?;
        if is_pred {
            match predicates.iter().find(|(p, _)| *p == name) {
                Some((_, old)) if *old != arg_sorts => {
                    return Err(Error::Type(format!("predicate {name} used with different argument sorts")))
                }
                Some(_) => {}
                None => predicates.push((name, arg_sorts)),
            }
        } else if !functions.iter().any(|(f, _, _)| *f == name) {
            // a placeholder interpretation lets later uses typecheck
            let dom = work.tuple(&arg_sorts)?;
            let cod = work.sort_object(&default)?;
            if cod.is_empty() && !dom.object().is_empty() {
                return Err(Error::Type(format!("no interpretation for function {name}")));
            }
            let placeholder = BaseMorphism::new(dom.object().clone(), cod, vec![0; dom.object().len()])?;
            work.insert_function(&name, arg_sorts.clone(), default.clone(), placeholder);
            functions.push((name, arg_sorts, default.clone()));
        }
    }
    let seq = Sequent { context: Some(ctx), lhs: seq.lhs.clone(), rhs: seq.rhs.clone() };
    Ok(Rule { name: "sequent".into(), predicates, functions, premises: vec![], conclusions: vec![seq], side: vec![] })
}

/// The first candidate, interpretation of the sequent's uninterpreted
/// symbols, and point that invalidate `seq`, searched exhaustively.
pub fn find_countermodel(seq: &Sequent, pool: &[Candidate], bound: usize) -> Result<Option<Countermodel>> {
    for c in pool {
        let rule = sequent_as_rule(&c.sig, seq)?;
        let (_, found) = search(&c.model, &c.sig, &rule, Sampling::Exhaustive { bound })?;
        if let Some(w) = found {
            return Ok(Some(Countermodel { model: c.name.clone(), witness: w }));
        }
    }
    Ok(None)
}
