//! `fibrelogic`: command-line front end for the finite-model workbench.
//!
//! Exit codes: 0 when every check passes (or a value was computed), 1 when a
//! law is violated or a countermodel is found, 2 on usage, parse or capacity
//! errors.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "fibrelogic", version, about = "Finite duality hyperdoctrines, quantum-logic sequents and PER categories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Truth-value algebras.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Fibres and formula evaluation.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Hyperdoctrine law verifiers.
    #[command(subcommand)]
    Laws(LawsCmd),
    /// The category of partial equivalence relations.
    #[command(subcommand)]
    Topos(ToposCmd),
    /// The Ω-valued set universe.
    #[command(subcommand)]
    Vset(VsetCmd),
    /// Sequents, rule soundness and countermodels.
    #[command(subcommand)]
    Logic(LogicCmd),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Options every subcommand accepts.
#[derive(Args, Clone)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Where the model comes from: a model file or a truth-value algebra.
#[derive(Args, Clone)]
pub struct ModelArgs {
    /// Model JSON file.
    #[arg(long, conflicts_with = "omega")]
    pub model: Option<PathBuf>,
    /// Algebra JSON file or builtin name (mo2, o6, 2-chain, chain(n), boolean(k)); finite-set base.
    #[arg(long)]
    pub omega: Option<String>,
    /// Override the fibre enumeration bound.
    #[arg(long)]
    pub fibre_bound: Option<usize>,
    /// Override the morphism enumeration bound.
    #[arg(long)]
    pub morphism_bound: Option<usize>,
}

/// Which base objects to check over.
#[derive(Args, Clone)]
pub struct ObjectArgs {
    /// Sizes of finite-set objects, e.g. `2,1`.
    #[arg(long, value_delimiter = ',', conflicts_with = "objects")]
    pub sizes: Vec<usize>,
    /// Names of objects declared in the model file, e.g. `X,Y`.
    #[arg(long, value_delimiter = ',')]
    pub objects: Vec<String>,
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Check the laws of an algebra's class.
    Check {
        /// Algebra JSON file or builtin name.
        #[arg(long)]
        file: String,
        /// Class to check against; defaults to the declared class.
        #[arg(long)]
        class: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Print a builtin algebra or the closure of a subspace spec as algebra JSON.
    Gen {
        /// Builtin name.
        #[arg(required_unless_present = "subspace")]
        name: Option<String>,
        /// Subspace spec JSON file.
        #[arg(long, conflicts_with = "name")]
        subspace: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Enumerate the fibre over an object.
    Fibre {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        objects: ObjectArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a formula in a signature, pointwise over its context.
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        /// Signature JSON file; overrides the model file's signature.
        #[arg(long)]
        sig: Option<PathBuf>,
        /// Formula, optionally prefixed by a context `x:S, y:S ;`.
        formula: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdjointArg {
    Forall,
    Exists,
    Equality,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantifierArg {
    Forall,
    Exists,
    Both,
}

#[derive(Subcommand)]
enum LawsCmd {
    /// Quantifier and equality adjunctions over X, Y.
    Adjunction {
        #[arg(long, value_enum, default_value_t = AdjointArg::All)]
        adjoint: AdjointArg,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        objects: ObjectArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Beck-Chevalley over X, Y, Z along every Z → Y.
    Bc {
        #[arg(long, value_enum, default_value_t = QuantifierArg::Both)]
        quantifier: QuantifierArg,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        objects: ObjectArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Frobenius reciprocity for ∃ along X × Y → Y.
    Frobenius {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        objects: ObjectArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Comprehension adjunction for every predicate over X, probed from Y.
    Comprehension {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        objects: ObjectArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Generic object over X.
    Generic {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        objects: ObjectArgs,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum ToposCmd {
    /// Build the PER category over carriers of size at most `--cap`.
    Build {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = fibrelogic::topos::DEFAULT_CARRIER_CAP)]
        cap: usize,
        /// Also verify the category laws.
        #[arg(long)]
        check: bool,
        /// Include the full composition table in JSON output.
        #[arg(long)]
        composition: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum VsetCmd {
    /// Enumerate the stages V_0 … V_rank.
    Build {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Maximum number of elements per stage.
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form stage sizes.
    Count {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum LogicCmd {
    /// Check a sequent in a model.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        sig: Option<PathBuf>,
        sequent: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check rule soundness by seeded sampling or exhaustively.
    Soundness {
        #[command(flatten)]
        model: ModelArgs,
        /// Sorts for the rules; defaults to S with 2 points and T with 1.
        #[arg(long)]
        sig: Option<PathBuf>,
        /// RuleSet JSON file, or `baseline` / `classical`.
        #[arg(long, default_value = "baseline")]
        rules: String,
        /// Restrict to one rule.
        #[arg(long)]
        rule: Option<String>,
        #[arg(long, default_value_t = fibrelogic::logic::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = fibrelogic::logic::DEFAULT_SEED)]
        seed: u64,
        /// Enumerate every instantiation instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        /// Instance bound for exhaustive checking.
        #[arg(long, default_value_t = fibrelogic::logic::DEFAULT_INSTANCE_BOUND)]
        bound: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Search a model pool for an interpretation invalidating a sequent.
    Countermodel {
        /// Search only this model instead of the standard pool.
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        sig: Option<PathBuf>,
        #[arg(long, default_value_t = fibrelogic::logic::DEFAULT_INSTANCE_BOUND)]
        bound: usize,
        sequent: String,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Algebra(AlgebraCmd::Check { file, class, common }) => commands::algebra_check(&file, class.as_deref(), &common),
        Command::Algebra(AlgebraCmd::Gen { name, subspace, common }) => {
            commands::algebra_gen(name.as_deref(), subspace.as_deref(), &common)
        }
        Command::Model(ModelCmd::Fibre { model, objects, common }) => commands::model_fibre(&model, &objects, &common),
        Command::Model(ModelCmd::Eval { model, sig, formula, common }) => {
            commands::model_eval(&model, sig.as_deref(), &formula, &common)
        }
        Command::Laws(LawsCmd::Adjunction { adjoint, model, objects, common }) => {
            commands::laws_adjunction(adjoint, &model, &objects, &common)
        }
        Command::Laws(LawsCmd::Bc { quantifier, model, objects, common }) => {
            commands::laws_bc(quantifier, &model, &objects, &common)
        }
        Command::Laws(LawsCmd::Frobenius { model, objects, common }) => commands::laws_frobenius(&model, &objects, &common),
        Command::Laws(LawsCmd::Comprehension { model, objects, common }) => {
            commands::laws_comprehension(&model, &objects, &common)
        }
        Command::Laws(LawsCmd::Generic { model, objects, common }) => commands::laws_generic(&model, &objects, &common),
        Command::Topos(ToposCmd::Build { model, cap, check, composition, common }) => {
            commands::topos_build(&model, cap, check, composition, &common)
        }
        Command::Vset(VsetCmd::Build { model, rank, cap, common }) => commands::vset_build(&model, rank, cap, &common),
        Command::Vset(VsetCmd::Count { model, rank, common }) => commands::vset_count(&model, rank, &common),
        Command::Logic(LogicCmd::Check { model, sig, sequent, common }) => {
            commands::logic_check(&model, sig.as_deref(), &sequent, &common)
        }
        Command::Logic(LogicCmd::Soundness { model, sig, rules, rule, samples, seed, exhaustive, bound, common }) => {
            let sampling = if exhaustive {
                fibrelogic::logic::Sampling::Exhaustive { bound }
            } else {
                fibrelogic::logic::Sampling::Random { samples, seed }
            };
            commands::logic_soundness(&model, sig.as_deref(), &rules, rule.as_deref(), sampling, &common)
        }
        Command::Logic(LogicCmd::Countermodel { model, sig, bound, sequent, common }) => {
            commands::logic_countermodel(&model, sig.as_deref(), bound, &sequent, &common)
        }
    };
    match result {
        Ok(outcome) => {
            print!("{}", outcome.text);
            if outcome.violation {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
