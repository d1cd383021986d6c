use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::parser::parse_sort;
use super::syntax::Sort;
use crate::algebra::Elem;
use crate::base::{product, terminal, validate_morphism, BaseMorphism, BaseObject, ObjectFile, ObjectKind, Product};
use crate::error::{Error, Result};
use crate::hyperdoctrine::{Model, Predicate};

/// A finite product `A1 × (A2 × (… × (An × 1)))`, right-nested over the
/// terminal object. Point indices are row-major in the factors.
#[derive(Debug, Clone)]
pub struct Tuple {
    object: BaseObject,
    sizes: Vec<usize>,
    /// `A1 × rest` when there is at least one factor.
    outer: Option<Product>,
}

impl Tuple {
    pub fn new(kind: ObjectKind, factors: &[BaseObject]) -> Result<Self> {
        let mut object = terminal(kind);
        let mut outer = None;
        for f in factors.iter().rev() {
            let p = product(f, &object)?;
            object = p.object.clone();
            outer = Some(p);
        }
        Ok(Tuple { object, sizes: factors.iter().map(BaseObject::len).collect(), outer })
    }

    pub fn object(&self) -> &BaseObject {
        &self.object
    }

    pub fn outer(&self) -> Option<&Product> {
        self.outer.as_ref()
    }

    pub fn arity(&self) -> usize {
        self.sizes.len()
    }

    pub fn encode(&self, parts: &[usize]) -> usize {
        parts.iter().zip(&self.sizes).fold(0, |acc, (&p, &n)| acc * n + p)
    }

    pub fn decode(&self, mut point: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for (i, &n) in self.sizes.iter().enumerate().rev() {
            out[i] = point % n;
            point /= n;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct FunctionSymbol {
    pub args: Vec<Sort>,
    pub result: Sort,
    pub map: BaseMorphism,
}

#[derive(Debug, Clone)]
pub struct PredicateSymbol {
    pub args: Vec<Sort>,
    pub pred: Predicate,
}

/// Sorts, function symbols and predicate symbols bound to base objects,
/// base morphisms and predicates of one model.
#[derive(Debug, Clone)]
pub struct Signature {
    kind: ObjectKind,
    sorts: BTreeMap<String, BaseObject>,
    functions: BTreeMap<String, FunctionSymbol>,
    predicates: BTreeMap<String, PredicateSymbol>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SignatureFile {
    #[serde(default)]
    pub sorts: BTreeMap<String, ObjectFile>,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionFile>,
    #[serde(default)]
    pub predicates: BTreeMap<String, PredicateFile>,
}

/// `table` lists result-point labels, row-major over the argument product.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionFile {
    #[serde(default)]
    pub args: Vec<String>,
    pub result: String,
    pub table: Vec<String>,
}

/// `table` lists Ω labels, row-major over the argument product.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredicateFile {
    #[serde(default)]
    pub args: Vec<String>,
    pub table: Vec<String>,
}

impl Signature {
    pub fn new(kind: ObjectKind) -> Self {
        Signature { kind, sorts: BTreeMap::new(), functions: BTreeMap::new(), predicates: BTreeMap::new() }
    }

    /// Finite sets `S = {x1, …, xn}` for each `(name, n)`.
    pub fn with_finite_sorts(sizes: &[(&str, usize)]) -> Self {
        let mut sig = Signature::new(ObjectKind::FinSet);
        for &(name, n) in sizes {
            sig.sorts.insert(name.to_string(), BaseObject::finset_of_size(n));
        }
        sig
    }

    pub fn kind(&self) -> ObjectKind {
        self.kind
    }

    pub fn sorts(&self) -> &BTreeMap<String, BaseObject> {
        &self.sorts
    }

    pub fn functions(&self) -> &BTreeMap<String, FunctionSymbol> {
        &self.functions
    }

    pub fn predicates(&self) -> &BTreeMap<String, PredicateSymbol> {
        &self.predicates
    }

    pub fn function(&self, name: &str) -> Option<&FunctionSymbol> {
        self.functions.get(name)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateSymbol> {
        self.predicates.get(name)
    }

    pub fn add_sort(&mut self, name: &str, object: BaseObject) -> Result<()> {
        if object.kind() != self.kind {
            return Err(Error::KindMismatch(self.kind.name().into(), object.kind().name().into()));
        }
        self.sorts.insert(name.to_string(), object);
        Ok(())
    }

    pub fn sort_object(&self, s: &Sort) -> Result<BaseObject> {
        match s {
            Sort::Named(n) => self.sorts.get(n).cloned().ok_or_else(|| Error::Type(format!("unknown sort {n}"))),
            Sort::Prod(a, b) => Ok(product(&self.sort_object(a)?, &self.sort_object(b)?)?.object),
        }
    }

    pub fn tuple(&self, sorts: &[Sort]) -> Result<Tuple> {
        let factors = sorts.iter().map(|s| self.sort_object(s)).collect::<Result<Vec<_>>>()?;
        Tuple::new(self.kind, &factors)
    }

    /// Binds `name` to the morphism with the given row-major table of result points.
    pub fn add_function(&mut self, name: &str, args: Vec<Sort>, result: Sort, table: Vec<usize>) -> Result<()> {
        let dom = self.tuple(&args)?;
        let cod = self.sort_object(&result)?;
        let map = BaseMorphism::new(dom.object().clone(), cod, table)?;
        if let Some(bad) = validate_morphism(&map).first_failure() {
            return Err(Error::Type(format!("function {name} is not a morphism: {} fails", bad.law)));
        }
        self.functions.insert(name.to_string(), FunctionSymbol { args, result, map });
        Ok(())
    }

    pub(crate) fn insert_function(&mut self, name: &str, args: Vec<Sort>, result: Sort, map: BaseMorphism) {
        self.functions.insert(name.to_string(), FunctionSymbol { args, result, map });
    }

    /// Binds `name` to the predicate with the given row-major table of Ω elements.
    pub fn add_predicate(&mut self, m: &Model, name: &str, args: Vec<Sort>, table: Vec<Elem>) -> Result<()> {
        let dom = self.tuple(&args)?;
        let pred = m.predicate(dom.object(), table)?;
        self.predicates.insert(name.to_string(), PredicateSymbol { args, pred });
        Ok(())
    }

    pub(crate) fn insert_predicate(&mut self, name: &str, args: Vec<Sort>, pred: Predicate) {
        self.predicates.insert(name.to_string(), PredicateSymbol { args, pred });
    }

    pub fn from_file(m: &Model, f: &SignatureFile) -> Result<Self> {
        let mut sig = Signature::new(m.kind());
        for (name, obj) in &f.sorts {
            sig.add_sort(name, BaseObject::from_file(obj)?)?;
        }
        let sorts = |names: &[String]| names.iter().map(|s| parse_sort(s)).collect::<Result<Vec<_>>>();
        for (name, func) in &f.functions {
            let args = sorts(&func.args)?;
            let result = parse_sort(&func.result)?;
            let cod = sig.sort_object(&result)?;
            let table = func
                .table
                .iter()
                .map(|l| cod.index_of(l).ok_or_else(|| Error::Type(format!("function {name}: unknown point {l}"))))
                .collect::<Result<Vec<_>>>()?;
            sig.add_function(name, args, result, table)?;
        }
        for (name, p) in &f.predicates {
            let args = sorts(&p.args)?;
            let table = p
                .table
                .iter()
                .map(|l| {
                    m.omega()
                        .index_of(l)
                        .ok_or_else(|| Error::Type(format!("predicate {name}: unknown omega element {l}")))
                })
                .collect::<Result<Vec<_>>>()?;
            sig.add_predicate(m, name, args, table)?;
        }
        Ok(sig)
    }

    pub fn from_json(m: &Model, text: &str) -> Result<Self> {
        let f: SignatureFile = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("signature: {e}")))?;
        Self::from_file(m, &f)
    }

    pub fn to_file(&self, m: &Model) -> SignatureFile {
        let sorts_of = |v: &[Sort]| v.iter().map(Sort::to_string).collect();
        SignatureFile {
            sorts: self.sorts.iter().map(|(k, v)| (k.clone(), v.to_file())).collect(),
            functions: self
                .functions
                .iter()
                .map(|(k, f)| {
                    let table = f.map.table().iter().map(|&p| f.map.cod().label(p).to_string()).collect();
                    (k.clone(), FunctionFile { args: sorts_of(&f.args), result: f.result.to_string(), table })
                })
                .collect(),
            predicates: self
                .predicates
                .iter()
                .map(|(k, p)| {
                    let table = p.pred.table().iter().map(|&e| m.omega().label(e).to_string()).collect();
                    (k.clone(), PredicateFile { args: sorts_of(&p.args), table })
                })
                .collect(),
        }
    }
}
