//! Loading algebras, models and signatures from disk.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fibrelogic::algebra::builtin;
use fibrelogic::base::{BaseObject, ObjectFile, ObjectKind};
use fibrelogic::hyperdoctrine::{Bounds, FibreRule, Model};
use fibrelogic::logic::{Signature, SignatureFile};
use fibrelogic::{Error, FiniteAlgebra, Result};
use serde::Deserialize;

use crate::{ModelArgs, ObjectArgs};

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn parse_json<'a, T: Deserialize<'a>>(what: &str, text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("{what}: {e}")))
}

/// An algebra from a JSON file, or a builtin name when no such file exists.
pub fn algebra(spec: &str, base: Option<&Path>) -> Result<FiniteAlgebra> {
    let path = match base {
        Some(dir) => dir.join(spec),
        None => PathBuf::from(spec),
    };
    if path.is_file() {
        FiniteAlgebra::from_json(&read(&path)?)
    } else {
        builtin(spec)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OmegaRef {
    Named(String),
    Inline(FiniteAlgebra),
}

/// Model JSON: the base kind, Ω (builtin name, path relative to the model
/// file, or inline algebra), an optional fibre rule and bounds, named
/// objects and an optional signature.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    base_kind: ObjectKind,
    omega: OmegaRef,
    #[serde(default)]
    fibre_rule: Option<FibreRule>,
    #[serde(default)]
    bounds: Option<Bounds>,
    #[serde(default)]
    objects: BTreeMap<String, ObjectFile>,
    #[serde(default)]
    signature: Option<SignatureFile>,
}

pub struct Env {
    pub model: Model,
    pub objects: BTreeMap<String, BaseObject>,
    signature: Option<SignatureFile>,
}

impl Env {
    pub fn load(args: &ModelArgs) -> Result<Env> {
        let mut env = match (&args.model, &args.omega) {
            (Some(path), _) => {
                let f: ModelFile = parse_json("model", &read(path)?)?;
                let omega = match f.omega {
                    OmegaRef::Named(name) => algebra(&name, path.parent())?,
                    OmegaRef::Inline(a) => a,
                };
                let rule = f.fibre_rule.unwrap_or(FibreRule::for_kind(f.base_kind));
                let mut model = Model::new(f.base_kind, omega, rule)?;
                if let Some(b) = f.bounds {
                    model = model.with_bounds(b);
                }
                let objects = f
                    .objects
                    .iter()
                    .map(|(k, o)| Ok((k.clone(), BaseObject::from_file(o)?)))
                    .collect::<Result<_>>()?;
                Env { model, objects, signature: f.signature }
            }
            (None, Some(spec)) => Env {
                model: Model::finset(algebra(spec, None)?)?,
                objects: BTreeMap::new(),
                signature: None,
            },
            (None, None) => return Err(Error::Invalid("one of --model or --omega is required".into())),
        };
        let mut bounds = env.model.bounds();
        if let Some(b) = args.fibre_bound {
            bounds.fibre = b;
        }
        if let Some(b) = args.morphism_bound {
            bounds.morphisms = b;
        }
        env.model = env.model.with_bounds(bounds);
        Ok(env)
    }

    /// The signature from `--sig`, else the model file's, else `fallback`.
    pub fn signature(&self, sig: Option<&Path>, fallback: Option<Signature>) -> Result<Signature> {
        match (sig, &self.signature) {
            (Some(path), _) => Signature::from_json(&self.model, &read(path)?),
            (None, Some(f)) => Signature::from_file(&self.model, f),
            (None, None) => fallback.ok_or_else(|| Error::Invalid("no signature: pass --sig or add one to the model".into())),
        }
    }

    /// The objects selected by `--sizes` or `--objects`, between `min` and
    /// `max` of them.
    pub fn objects(&self, sel: &ObjectArgs, min: usize, max: usize) -> Result<Vec<BaseObject>> {
        let out: Vec<BaseObject> = if !sel.sizes.is_empty() {
            if self.model.kind() != ObjectKind::FinSet {
                return Err(Error::Invalid("--sizes builds finite sets; use --objects for this model".into()));
            }
            sel.sizes.iter().map(|&k| BaseObject::finset_of_size(k)).collect()
        } else if !sel.objects.is_empty() {
            sel.objects
                .iter()
                .map(|name| {
                    self.objects
                        .get(name)
                        .cloned()
                        .ok_or_else(|| Error::Invalid(format!("no object named `{name}` in the model")))
                })
                .collect::<Result<_>>()?
        } else {
            return Err(Error::Invalid("one of --sizes or --objects is required".into()));
        };
        if out.len() < min || out.len() > max {
            let want = if min == max { min.to_string() } else { format!("{min} to {max}") };
            return Err(Error::Invalid(format!("expected {want} object(s), got {}", out.len())));
        }
        Ok(out)
    }
}
