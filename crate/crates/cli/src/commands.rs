//! One function per subcommand. Each returns the text to print and whether a
//! law was violated.

use std::path::Path;

use fibrelogic::algebra::{builtin, check_laws};
use fibrelogic::base::product;
use fibrelogic::hyperdoctrine::{
    check_adjunction, check_beck_chevalley, check_comprehension_adjunction, check_frobenius, check_generic_object,
    Adjoint, Quantifier,
};
use fibrelogic::logic::{
    check_ruleset, check_sequent, find_countermodel, infer_context, interpret_formula, parse_formula, parse_sequent,
    standard_pool, Candidate, Interpreter, RuleSet, Sampling, Signature,
};
use fibrelogic::subspace::subspace_lattice;
use fibrelogic::topos::{build_topos, v_build, v_count};
use fibrelogic::{AlgebraClass, Error, FiniteAlgebra, LawCheck, LawReport, Result, SubspaceLatticeSpec};
use serde_json::{json, Value};

use crate::input::{self, Env};
use crate::{AdjointArg, Common, Format, ModelArgs, ObjectArgs, QuantifierArg};

pub struct Outcome {
    pub text: String,
    pub violation: bool,
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

fn from_report(report: &LawReport, common: &Common) -> Outcome {
    let text = match common.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report
            .checks
            .iter()
            .map(|c| {
                let status = if c.passed() { "PASS" } else { "FAIL" };
                let mut line = format!("{status} {} ({} instances)", c.law, c.instances);
                if let Some(w) = &c.witness {
                    line.push_str(&format!(": {w}"));
                }
                line + "\n"
            })
            .collect(),
    };
    Outcome { text, violation: !report.passed() }
}

fn from_value(value: Value, summary: String, violation: bool, common: &Common) -> Outcome {
    let text = match common.format {
        Format::Json => pretty(&value),
        Format::Text => summary,
    };
    Outcome { text, violation }
}

pub fn algebra_check(file: &str, class: Option<&str>, common: &Common) -> Result<Outcome> {
    let a = input::algebra(file, None)?;
    let class: AlgebraClass = match class {
        Some(c) => c.parse()?,
        None => a.class(),
    };
    Ok(from_report(&check_laws(&a, class), common))
}

pub fn algebra_gen(name: Option<&str>, subspace: Option<&Path>, common: &Common) -> Result<Outcome> {
    let a: FiniteAlgebra = match (name, subspace) {
        (_, Some(path)) => subspace_lattice(&SubspaceLatticeSpec::from_json(&input::read(path)?)?)?.algebra,
        (Some(n), None) => builtin(n)?,
        (None, None) => return Err(Error::Invalid("give a builtin name or --subspace".into())),
    };
    let summary = format!("{} elements, class {}: {}\n", a.len(), a.class(), a.labels().join(" "));
    let value = serde_json::to_value(&a).map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(from_value(value, summary, false, common))
}

pub fn model_fibre(args: &ModelArgs, sel: &ObjectArgs, common: &Common) -> Result<Outcome> {
    let env = Env::load(args)?;
    let x = env.objects(sel, 1, 1)?.remove(0);
    let fibre: Vec<Value> = env.model.enumerate_fibre(&x)?.iter().map(|v| env.model.describe(v)).collect();
    let summary: String = fibre.iter().map(|v| format!("{v}\n")).collect();
    let value = json!({ "object": x, "size": fibre.len(), "fibre": fibre });
    Ok(from_value(value, format!("{} predicates\n{summary}", fibre.len()), false, common))
}

pub fn model_eval(args: &ModelArgs, sig: Option<&Path>, formula: &str, common: &Common) -> Result<Outcome> {
    let env = Env::load(args)?;
    let sig = env.signature(sig, None)?;
    let (ctx, phi) = match formula.split_once(';') {
        Some((ctx, body)) => {
            let ctx = parse_sequent(&format!("{ctx} ; top |- top"))?.context.unwrap_or_default();
            (ctx, parse_formula(body)?)
        }
        None => {
            let phi = parse_formula(formula)?;
            (infer_context(&sig, &[&phi], None)?, phi)
        }
    };
    let value = interpret_formula(&env.model, &sig, &ctx, &phi)?;
    let interp = Interpreter::new(&env.model, &sig);
    let omega = env.model.omega();
    let mut rows = Vec::new();
    let mut summary = String::new();
    for (p, &e) in value.table().iter().enumerate() {
        let assignment = interp.describe_point(&ctx, p)?;
        summary.push_str(&format!("{assignment} -> {}\n", omega.label(e)));
        rows.push(json!({ "assignment": assignment, "value": omega.label(e) }));
    }
    let context: Vec<String> = ctx.iter().map(|(x, s)| format!("{x}:{s}")).collect();
    Ok(from_value(json!({ "formula": phi.to_string(), "context": context, "values": rows }), summary, false, common))
}

pub fn laws_adjunction(which: AdjointArg, args: &ModelArgs, sel: &ObjectArgs, common: &Common) -> Result<Outcome> {
    let env = Env::load(args)?;
    let adjoints = match which {
        AdjointArg::Forall => vec![Adjoint::Forall],
        AdjointArg::Exists => vec![Adjoint::Exists],
        AdjointArg::Equality => vec![Adjoint::Equality],
        AdjointArg::All => vec![Adjoint::Forall, Adjoint::Exists, Adjoint::Equality],
    };
    let min = if which == AdjointArg::Equality { 1 } else { 2 };
    let objs = env.objects(sel, min, 2)?;
    let mut report = LawReport::new();
    for a in adjoints {
        let y = objs.get(1).unwrap_or(&objs[0]);
        report.extend(check_adjunction(&env.model, a, &objs[0], y)?);
    }
    Ok(from_report(&report, common))
}

pub fn laws_bc(which: QuantifierArg, args: &ModelArgs, sel: &ObjectArgs, common: &Common) -> Result<Outcome> {
    let env = Env::load(args)?;
    let objs = env.objects(sel, 3, 3)?;
    let quantifiers = match which {
        QuantifierArg::Forall => vec![Quantifier::Forall],
        QuantifierArg::Exists => vec![Quantifier::Exists],
        QuantifierArg::Both => vec![Quantifier::Forall, Quantifier::Exists],
    };
    let mut report = LawReport::new();
    for q in quantifiers {
        report.extend(check_beck_chevalley(&env.model, q, &objs[0], &objs[1], &objs[2])?);
    }
    Ok(from_report(&report, common))
}

pub fn laws_frobenius(args: &ModelArgs, sel: &ObjectArgs, common: &Common) -> Result<Outcome> {
    let env = Env::load(args)?;
    let objs = env.objects(sel, 2, 2)?;
    let m = &env.model;
    let found = check_frobenius(m, &objs[0], &objs[1])?;
    let pairs = m.fibre_tables(&product(&objs[0], &objs[1])?.object)?.len() * m.fibre_tables(&objs[1])?.len();
    let check = LawCheck::from_search("frobenius", pairs as u64, found.map(|c| c.to_json(m)));
    Ok(from_report(&LawReport::single(check), common))
}

pub fn laws_comprehension(args: &ModelArgs, sel: &ObjectArgs, common: &Common) -> Result<Outcome> {
    let env = Env::load(args)?;
    let objs = env.objects(sel, 1, 2)?;
    let (x, y) = (&objs[0], objs.get(1).unwrap_or(&objs[0]));
    let m = &env.model;
    let mut merged: Vec<LawCheck> = Vec::new();
    for v in m.enumerate_fibre(x)? {
        for c in check_comprehension_adjunction(m, y, &v)?.checks {
            let witness = c.witness.map(|w| json!({ "v": m.describe(&v), "detail": w }));
            match merged.iter_mut().find(|old| old.law == c.law) {
                Some(old) => {
                    old.instances += c.instances;
                    if let (None, Some(w)) = (&old.witness, witness) {
                        *old = LawCheck::fail(old.law.clone(), old.instances, w);
                    }
                }
                None => merged.push(LawCheck::from_search(c.law, c.instances, witness)),
            }
        }
    }
    Ok(from_report(&LawReport { checks: merged }, common))
}

pub fn laws_generic(args: &ModelArgs, sel: &ObjectArgs, common: &Common) -> Result<Outcome> {
    let env = Env::load(args)?;
    let x = env.objects(sel, 1, 1)?.remove(0);
    Ok(from_report(&check_generic_object(&env.model, &x)?, common))
}

pub fn topos_build(args: &ModelArgs, cap: usize, check: bool, composition: bool, common: &Common) -> Result<Outcome> {
    let env = Env::load(args)?;
    let cat = build_topos(&env.model, cap)?;
    let mut value = cat.to_json(composition);
    let mut summary = format!(
        "{} objects, {} arrows, {} isomorphism classes\n",
        cat.len(),
        cat.total_arrows(),
        cat.isomorphism_classes().len()
    );
    let mut violation = false;
    if check {
        let laws = cat.check_category_laws();
        violation = !laws.passed();
        summary.push_str(&from_report(&laws, &Common { format: Format::Text }).text);
        value["laws"] = serde_json::to_value(&laws).expect("reports serialize");
    }
    Ok(from_value(value, summary, violation, common))
}

pub fn vset_build(args: &ModelArgs, rank: usize, cap: usize, common: &Common) -> Result<Outcome> {
    let env = Env::load(args)?;
    let v = v_build(env.model.omega(), rank, cap)?;
    let summary = format!("stage sizes: {:?}\n", v.counts());
    Ok(from_value(v.to_json(env.model.omega()), summary, false, common))
}

pub fn vset_count(args: &ModelArgs, rank: usize, common: &Common) -> Result<Outcome> {
    let env = Env::load(args)?;
    let counts: Vec<String> = v_count(env.model.omega(), rank)?.iter().map(ToString::to_string).collect();
    let summary: String = counts
        .iter()
        .enumerate()
        .map(|(i, c)| match c.len() {
            n if n > 40 => format!("|V_{i}| = {}...{} ({n} digits)\n", &c[..12], &c[n - 6..]),
            _ => format!("|V_{i}| = {c}\n"),
        })
        .collect();
    Ok(from_value(json!({ "counts": counts }), summary, false, common))
}

fn default_sorts() -> Signature {
    Signature::with_finite_sorts(&[("S", 2), ("T", 1)])
}

pub fn logic_check(args: &ModelArgs, sig: Option<&Path>, sequent: &str, common: &Common) -> Result<Outcome> {
    let env = Env::load(args)?;
    let sig = env.signature(sig, None)?;
    let seq = parse_sequent(sequent)?;
    let validity = check_sequent(&env.model, &sig, &seq)?;
    let mut value = json!({ "sequent": seq.to_string(), "valid": validity.is_valid() });
    let summary = match validity.witness() {
        None => "VALID\n".to_string(),
        Some(w) => {
            value["witness"] = w.clone();
            format!("INVALID: {w}\n")
        }
    };
    Ok(from_value(value, summary, !validity.is_valid(), common))
}

pub fn logic_soundness(
    args: &ModelArgs,
    sig: Option<&Path>,
    rules: &str,
    only: Option<&str>,
    sampling: Sampling,
    common: &Common,
) -> Result<Outcome> {
    let env = Env::load(args)?;
    let sig = env.signature(sig, Some(default_sorts()))?;
    let mut set = match rules {
        "baseline" => RuleSet::baseline(),
        "classical" => RuleSet::classical(),
        path => RuleSet::from_json(&input::read(Path::new(path))?)?,
    };
    if let Some(name) = only {
        let rule = set.get(name).cloned().ok_or_else(|| Error::Invalid(format!("no rule named `{name}`")))?;
        set.rules = vec![rule];
    }
    Ok(from_report(&check_ruleset(&env.model, &sig, &set, sampling)?, common))
}

pub fn logic_countermodel(
    args: &ModelArgs,
    sig: Option<&Path>,
    bound: usize,
    sequent: &str,
    common: &Common,
) -> Result<Outcome> {
    let pool = if args.model.is_some() || args.omega.is_some() {
        let env = Env::load(args)?;
        let sig = env.signature(sig, Some(default_sorts()))?;
        let name = args.model.as_ref().map_or_else(|| args.omega.clone().unwrap_or_default(), |p| p.display().to_string());
        vec![Candidate { name, model: env.model, sig }]
    } else {
        standard_pool()
    };
    let seq = parse_sequent(sequent)?;
    let found = find_countermodel(&seq, &pool, bound)?;
    let (value, summary) = match &found {
        None => (json!({ "sequent": seq.to_string(), "found": false }), "no countermodel\n".to_string()),
        Some(c) => (
            json!({ "sequent": seq.to_string(), "found": true, "model": c.model, "witness": c.witness }),
            format!("countermodel in {}: {}\n", c.model, c.witness),
        ),
    };
    Ok(from_value(value, summary, found.is_some(), common))
}
