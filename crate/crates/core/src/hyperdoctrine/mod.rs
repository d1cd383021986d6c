//! Duality hyperdoctrines `Hom(-, Ω)` over finite base categories.
//!
//! A fibre over `X` is the set of tables `X → Ω` admitted by the model's
//! fibre rule, ordered pointwise. Quantifiers, equality and comprehension are
//! computed pointwise (meets, joins and the diagonal over the carrier) and
//! then checked to lie in the target fibre; when they do not, the operation
//! fails with a [`Error::Lifting`] naming a witness point.

mod verify;

pub use verify::{
    check_adjunction, check_beck_chevalley, check_comprehension_adjunction, check_frobenius, check_generic_object,
    grothendieck_hom, Adjoint, FrobeniusCounterexample, Quantifier,
};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::algebra::{check_laws, Elem, FiniteAlgebra};
use crate::base::{
    diagonal, enumerate_morphisms, subobject, BaseMorphism, BaseObject, ObjectKind, PointSet, Product,
    DEFAULT_MORPHISM_BOUND,
};
use crate::error::{check_capacity, saturating_pow, Error, Result};

/// Default bound on the number of tables enumerated for a fibre.
pub const DEFAULT_FIBRE_BOUND: usize = 10_000;

/// Which tables `X → Ω` belong to the fibre over `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FibreRule {
    /// Every table (finite sets).
    All,
    /// Tables into the 2-chain whose true-set is open.
    Open,
    /// Tables into the 2-chain whose true-set is convex.
    Convex,
}

impl FibreRule {
    pub fn for_kind(kind: ObjectKind) -> Self {
        match kind {
            ObjectKind::FinSet => FibreRule::All,
            ObjectKind::FinTop => FibreRule::Open,
            ObjectKind::FinConv => FibreRule::Convex,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FibreRule::All => "all",
            FibreRule::Open => "open",
            FibreRule::Convex => "convex",
        }
    }
}

impl FromStr for FibreRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(FibreRule::All),
            "open" => Ok(FibreRule::Open),
            "convex" => Ok(FibreRule::Convex),
            other => Err(Error::Invalid(format!("unknown fibre rule `{other}`"))),
        }
    }
}

/// Enumeration bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bounds {
    /// Maximum `|Ω|^|X|` for fibre enumeration.
    pub fibre: usize,
    /// Maximum `|Y|^|X|` for morphism enumeration.
    pub morphisms: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            fibre: DEFAULT_FIBRE_BOUND,
            morphisms: DEFAULT_MORPHISM_BOUND,
        }
    }
}

/// An element of a fibre: a table from the points of `over` to elements of Ω.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Predicate {
    over: BaseObject,
    table: Vec<Elem>,
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.table)
    }
}

impl Predicate {
    pub fn over(&self) -> &BaseObject {
        &self.over
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    #[inline]
    pub fn at(&self, p: usize) -> Elem {
        self.table[p]
    }

    pub fn into_table(self) -> Vec<Elem> {
        self.table
    }
}

/// A duality hyperdoctrine: a base kind, the truth-value algebra Ω and the
/// fibre rule.
#[derive(Clone)]
pub struct Model {
    kind: ObjectKind,
    omega: Arc<FiniteAlgebra>,
    rule: FibreRule,
    bounds: Bounds,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("kind", &self.kind)
            .field("omega", &self.omega)
            .field("rule", &self.rule)
            .finish()
    }
}

impl Model {
    /// Builds a model, checking that Ω satisfies the laws of its declared
    /// class and that the fibre rule fits the base kind.
    pub fn new(kind: ObjectKind, omega: FiniteAlgebra, rule: FibreRule) -> Result<Self> {
        let report = check_laws(&omega, omega.class());
        if let Some(fail) = report.first_failure() {
            return Err(Error::Invalid(format!(
                "omega fails the {} law of its class {}: {}",
                fail.law,
                omega.class(),
                fail.witness.clone().unwrap_or(Value::Null)
            )));
        }
        if rule != FibreRule::for_kind(kind) {
            return Err(Error::Invalid(format!(
                "fibre rule `{}` does not apply to {kind} base objects",
                rule.name()
            )));
        }
        if rule != FibreRule::All && omega.len() != 2 {
            return Err(Error::Invalid(format!(
                "the `{}` fibre rule needs the 2-element Ω, got {} elements",
                rule.name(),
                omega.len()
            )));
        }
        Ok(Model {
            kind,
            omega: Arc::new(omega),
            rule,
            bounds: Bounds::default(),
        })
    }

    /// The Tarskian model `Hom_Set(-, Ω)`.
    pub fn finset(omega: FiniteAlgebra) -> Result<Self> {
        Model::new(ObjectKind::FinSet, omega, FibreRule::All)
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn kind(&self) -> ObjectKind {
        self.kind
    }

    pub fn omega(&self) -> &FiniteAlgebra {
        &self.omega
    }

    pub fn rule(&self) -> FibreRule {
        self.rule
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    fn check_object(&self, x: &BaseObject) -> Result<()> {
        if x.kind() != self.kind {
            return Err(Error::KindMismatch(x.kind().to_string(), self.kind.to_string()));
        }
        Ok(())
    }

    /// A point at which `table` breaks the fibre rule, if any. For the open
    /// rule this is a true point whose smallest open neighbourhood leaves the
    /// true-set; for the convex rule a point of the convex hull of the
    /// true-set that is not in it.
    pub fn rule_violation(&self, x: &BaseObject, table: &[Elem]) -> Option<usize> {
        if self.rule == FibreRule::All {
            return None;
        }
        let top = self.omega.top();
        let truth = PointSet::from_points(x.points().filter(|&p| table[p] == top));
        if x.is_admissible(truth) {
            return None;
        }
        match self.rule {
            FibreRule::Open => truth.iter().find(|&p| {
                x.admissible_hull(PointSet::from_points([p]))
                    .is_none_or(|nbhd| !nbhd.is_subset(truth))
            }),
            _ => {
                let hull = x.admissible_hull(truth).unwrap_or(x.all_points());
                hull.iter().find(|&p| !truth.contains(p))
            }
        }
        .or(Some(0))
    }

    pub fn in_fibre(&self, x: &BaseObject, table: &[Elem]) -> bool {
        table.len() == x.len() && table.iter().all(|&e| e < self.omega.len()) && self.rule_violation(x, table).is_none()
    }

    /// Wraps a table as a predicate, checking shape and fibre membership.
    pub fn predicate(&self, x: &BaseObject, table: Vec<Elem>) -> Result<Predicate> {
        self.check_object(x)?;
        if table.len() != x.len() {
            return Err(Error::structural(
                "predicate",
                format!("table has {} entries, object has {} points", table.len(), x.len()),
            ));
        }
        if let Some(&bad) = table.iter().find(|&&e| e >= self.omega.len()) {
            return Err(Error::structural("predicate", format!("value {bad} is not an element of omega")));
        }
        if let Some(p) = self.rule_violation(x, &table) {
            return Err(Error::lifting("fibre membership", x.label(p)));
        }
        Ok(Predicate { over: x.clone(), table })
    }

    /// Like [`Model::predicate`] but reads omega labels.
    pub fn predicate_from_labels(&self, x: &BaseObject, labels: &[&str]) -> Result<Predicate> {
        let table = labels
            .iter()
            .map(|l| {
                self.omega
                    .index_of(l)
                    .ok_or_else(|| Error::Invalid(format!("`{l}` is not an element of omega")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.predicate(x, table)
    }

    /// Builds the result of a pointwise construction, reporting a lifting
    /// failure when it leaves the fibre.
    fn lift(&self, op: &str, x: &BaseObject, table: Vec<Elem>) -> Result<Predicate> {
        if let Some(p) = self.rule_violation(x, &table) {
            return Err(Error::lifting(op, x.label(p)));
        }
        Ok(Predicate { over: x.clone(), table })
    }

    pub fn constant(&self, x: &BaseObject, value: Elem) -> Result<Predicate> {
        self.check_object(x)?;
        self.lift("constant", x, vec![value; x.len()])
    }

    pub fn top_on(&self, x: &BaseObject) -> Predicate {
        Predicate {
            over: x.clone(),
            table: vec![self.omega.top(); x.len()],
        }
    }

    pub fn bot_on(&self, x: &BaseObject) -> Predicate {
        Predicate {
            over: x.clone(),
            table: vec![self.omega.bot(); x.len()],
        }
    }

    /// Pointwise order: `u ≤ v` iff `u(x) ≤ v(x)` at every point.
    pub fn leq(&self, u: &Predicate, v: &Predicate) -> bool {
        debug_assert_eq!(u.over, v.over);
        leq_tables(&self.omega, &u.table, &v.table)
    }

    fn same_fibre(&self, u: &Predicate, v: &Predicate) -> Result<()> {
        if u.over != v.over {
            return Err(Error::DomainMismatch("predicates live over different objects".into()));
        }
        Ok(())
    }

    pub fn meet(&self, u: &Predicate, v: &Predicate) -> Result<Predicate> {
        self.same_fibre(u, v)?;
        let t = u.table.iter().zip(&v.table).map(|(&a, &b)| self.omega.meet(a, b)).collect();
        self.lift("meet", &u.over, t)
    }

    pub fn join(&self, u: &Predicate, v: &Predicate) -> Result<Predicate> {
        self.same_fibre(u, v)?;
        let t = u.table.iter().zip(&v.table).map(|(&a, &b)| self.omega.join(a, b)).collect();
        self.lift("join", &u.over, t)
    }

    /// Pointwise orthocomplement. Fails when Ω has none, or (for structured
    /// fibres) when the complement leaves the fibre.
    pub fn ortho(&self, u: &Predicate) -> Result<Predicate> {
        if !self.omega.has_ortho() {
            return Err(Error::MissingStructure("omega has no orthocomplement".into()));
        }
        let t = u.table.iter().map(|&a| self.omega.ortho(a).unwrap()).collect();
        self.lift("ortho", &u.over, t)
    }

    /// All tables of the fibre over `x`, in lexicographic order.
    pub fn fibre_tables(&self, x: &BaseObject) -> Result<Vec<Vec<Elem>>> {
        self.check_object(x)?;
        check_capacity("fibre enumeration", saturating_pow(self.omega.len(), x.len()), self.bounds.fibre)?;
        Ok(all_value_tables(x.len(), self.omega.len())
            .filter(|t| self.rule_violation(x, t).is_none())
            .collect())
    }

    /// Every predicate over `x`.
    pub fn enumerate_fibre(&self, x: &BaseObject) -> Result<Vec<Predicate>> {
        Ok(self
            .fibre_tables(x)?
            .into_iter()
            .map(|table| Predicate { over: x.clone(), table })
            .collect())
    }

    /// Reindexing along `f: X → Y`: `v ↦ v ∘ f`.
    pub fn pullback(&self, f: &BaseMorphism, v: &Predicate) -> Result<Predicate> {
        if f.cod() != &v.over {
            return Err(Error::DomainMismatch(
                "pullback: predicate does not live over the codomain of the morphism".into(),
            ));
        }
        Ok(Predicate {
            over: f.dom().clone(),
            table: pullback_table(f.table(), &v.table),
        })
    }

    fn check_over(&self, v: &Predicate, obj: &BaseObject, op: &str) -> Result<()> {
        if &v.over != obj {
            return Err(Error::DomainMismatch(format!("{op}: predicate does not live over the expected object")));
        }
        Ok(())
    }

    /// `∀` along the projection `X × Y → Y`: pointwise meet over `X`.
    pub fn forall_along(&self, pi: &Product, v: &Predicate) -> Result<Predicate> {
        self.check_over(v, &pi.object, "forall_along")?;
        let t = quantify_table(&self.omega, Quantifier::Forall, pi.left.len(), pi.right.len(), &v.table);
        self.lift("forall", &pi.right, t)
    }

    /// `∃` along the projection `X × Y → Y`: pointwise join over `X`.
    pub fn exists_along(&self, pi: &Product, v: &Predicate) -> Result<Predicate> {
        self.check_over(v, &pi.object, "exists_along")?;
        let t = quantify_table(&self.omega, Quantifier::Exists, pi.left.len(), pi.right.len(), &v.table);
        self.lift("exists", &pi.right, t)
    }

    pub fn quantify(&self, q: Quantifier, pi: &Product, v: &Predicate) -> Result<Predicate> {
        match q {
            Quantifier::Forall => self.forall_along(pi, v),
            Quantifier::Exists => self.exists_along(pi, v),
        }
    }

    /// Equality along the diagonal `X → X × X`: `(x, x) ↦ v(x)` and `⊥`
    /// off the diagonal. `square` must be `X × X`.
    pub fn equality_along(&self, square: &Product, v: &Predicate) -> Result<Predicate> {
        if square.left != square.right {
            return Err(Error::DomainMismatch("equality_along needs a square X × X".into()));
        }
        self.check_over(v, &square.left, "equality_along")?;
        let t = equality_table(&self.omega, square.left.len(), &v.table);
        self.lift("equality", &square.object, t)
    }

    /// The diagonal square and `Eq_δ(v)` in one step.
    pub fn equality(&self, v: &Predicate) -> Result<(Product, Predicate)> {
        let (sq, _) = diagonal(&v.over)?;
        let eq = self.equality_along(&sq, v)?;
        Ok((sq, eq))
    }

    /// The sub-object of points where `v` is top, with the induced structure,
    /// and its inclusion.
    pub fn comprehension(&self, v: &Predicate) -> Result<(BaseObject, BaseMorphism)> {
        let top = self.omega.top();
        let points: Vec<usize> = v.over.points().filter(|&p| v.table[p] == top).collect();
        subobject(&v.over, &points)
    }

    /// Every morphism `x → y` of the base, within the morphism bound.
    pub fn morphisms(&self, x: &BaseObject, y: &BaseObject) -> Result<Vec<BaseMorphism>> {
        enumerate_morphisms(x, y, self.bounds.morphisms)
    }

    /// Checks that the fibres over `samples` are closed under pointwise meet
    /// and join and contain top and bottom.
    /// Convex fibres are intersection-closed only, so joins are not probed there.
    pub fn check_fibre_closure(&self, samples: &[BaseObject]) -> Result<()> {
        for x in samples {
            let tables = self.fibre_tables(x)?;
            let set: std::collections::HashSet<&Vec<Elem>> = tables.iter().collect();
            let probe = |t: Vec<Elem>| -> Result<()> {
                if set.contains(&t) {
                    Ok(())
                } else {
                    Err(Error::Invalid(format!("fibre over {x:?} is not closed under the operations of omega")))
                }
            };
            probe(vec![self.omega.top(); x.len()])?;
            probe(vec![self.omega.bot(); x.len()])?;
            for a in &tables {
                for b in &tables {
                    probe(a.iter().zip(b).map(|(&p, &q)| self.omega.meet(p, q)).collect())?;
                    if self.rule != FibreRule::Convex {
                        probe(a.iter().zip(b).map(|(&p, &q)| self.omega.join(p, q)).collect())?;
                    }
                }
            }
        }
        Ok(())
    }

    /// `{"point": "omega element", …}` for reports.
    pub fn describe(&self, v: &Predicate) -> Value {
        describe_table(&self.omega, &v.over, &v.table)
    }
}

pub(crate) fn describe_table(omega: &FiniteAlgebra, x: &BaseObject, table: &[Elem]) -> Value {
    let mut m = Map::new();
    for (p, &e) in table.iter().enumerate() {
        m.insert(x.label(p).to_string(), Value::String(omega.label(e).to_string()));
    }
    Value::Object(m)
}

#[inline]
pub(crate) fn leq_tables(omega: &FiniteAlgebra, u: &[Elem], v: &[Elem]) -> bool {
    u.iter().zip(v).all(|(&a, &b)| omega.leq(a, b))
}

#[inline]
pub(crate) fn pullback_table(f: &[usize], v: &[Elem]) -> Vec<Elem> {
    f.iter().map(|&p| v[p]).collect()
}

/// Meet or join over the left factor of a product table laid out as
/// `x * ny + y`. Empty meets are top, empty joins bottom.
pub(crate) fn quantify_table(omega: &FiniteAlgebra, q: Quantifier, nx: usize, ny: usize, v: &[Elem]) -> Vec<Elem> {
    (0..ny)
        .map(|y| {
            let column = (0..nx).map(|x| v[x * ny + y]);
            match q {
                Quantifier::Forall => omega.meet_all(column),
                Quantifier::Exists => omega.join_all(column),
            }
        })
        .collect()
}

pub(crate) fn equality_table(omega: &FiniteAlgebra, n: usize, v: &[Elem]) -> Vec<Elem> {
    (0..n * n)
        .map(|p| {
            let (a, b) = (p / n, p % n);
            if a == b {
                v[a]
            } else {
                omega.bot()
            }
        })
        .collect()
}

pub(crate) use crate::base::all_tables as all_value_tables;
