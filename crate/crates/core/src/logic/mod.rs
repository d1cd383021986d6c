//! Typed first-order quantum logic interpreted in a duality hyperdoctrine.
//!
//! Formulas are written in ASCII:
//!
//! ```text
//! x:S, y:T ; P(x) & (Q(x) | R(x, y))' |- exists z:S. f(z) = x
//! ```
//!
//! `'` is ortho-negation, `&` and `|` are meet and join, quantifiers range
//! over sorts and extend as far right as possible. Contexts are interpreted
//! as right-nested products of sort objects ending in the terminal object.

mod parser;
mod rules;
mod semantics;
mod signature;
mod syntax;

pub use parser::{parse, parse_formula, parse_sequent, parse_sort, parse_term, Parsed};
pub use rules::{
    check_rule_soundness, check_ruleset, find_countermodel, standard_pool, Candidate, Countermodel, FunctionDecl,
    OneOrMany, Rule, RuleFile, RuleSet, RuleSetFile, Sampling, SideCondition, DEFAULT_INSTANCE_BOUND, DEFAULT_SAMPLES,
    DEFAULT_SEED,
};
pub use semantics::{
    check_sequent, infer_context, interpret_formula, interpret_term, sequent_context, term_sort, typecheck_formula,
    typecheck_sequent, Context, Interpreter, Validity,
};
pub use signature::{FunctionFile, FunctionSymbol, PredicateFile, PredicateSymbol, Signature, SignatureFile, Tuple};
pub use syntax::{Formula, QuantKind, Sequent, Sort, Term};
