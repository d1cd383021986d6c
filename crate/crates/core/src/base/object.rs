use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::morphism::BaseMorphism;
use crate::error::{saturating_pow, Error, Result};
use crate::report::{LawCheck, LawReport};

/// Structured objects store their opens / convex sets as bitmasks, so their
/// carriers are limited to this many points.
pub const MAX_STRUCTURED_POINTS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    FinSet,
    FinTop,
    FinConv,
}

impl ObjectKind {
    pub fn name(self) -> &'static str {
        match self {
            ObjectKind::FinSet => "finset",
            ObjectKind::FinTop => "fintop",
            ObjectKind::FinConv => "finconv",
        }
    }
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finset" => Ok(ObjectKind::FinSet),
            "fintop" => Ok(ObjectKind::FinTop),
            "finconv" => Ok(ObjectKind::FinConv),
            other => Err(Error::Invalid(format!("unknown object kind `{other}`"))),
        }
    }
}

/// A set of points of a structured object, as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet(u128);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_STRUCTURED_POINTS);
        if n == 128 {
            PointSet(u128::MAX)
        } else {
            PointSet((1u128 << n) - 1)
        }
    }

    pub fn from_points(points: impl IntoIterator<Item = usize>) -> Self {
        let mut s = PointSet::EMPTY;
        for p in points {
            s.insert(p);
        }
        s
    }

    pub fn insert(&mut self, p: usize) {
        self.0 |= 1u128 << p;
    }

    pub fn contains(self, p: usize) -> bool {
        self.0 & (1u128 << p) != 0
    }

    pub fn union(self, other: Self) -> Self {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        PointSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..128).filter(move |&p| self.contains(p))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct ObjectData {
    kind: ObjectKind,
    labels: Vec<String>,
    family: Vec<PointSet>,
}

/// An object of a finite base category. Cheap to clone.
///
/// For `fintop` the family holds the open sets, for `finconv` the convex
/// sets; it is empty for `finset`. Families are kept sorted and deduplicated
/// but are not validated on construction: see [`validate_object`].
#[derive(Clone, Eq)]
pub struct BaseObject(Arc<ObjectData>);

impl PartialEq for BaseObject {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl std::hash::Hash for BaseObject {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl fmt::Debug for BaseObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.kind(), self.labels())?;
        if self.kind() != ObjectKind::FinSet {
            write!(f, " with {} sets", self.family().len())?;
        }
        Ok(())
    }
}

impl BaseObject {
    pub fn new(kind: ObjectKind, labels: Vec<String>, family: impl IntoIterator<Item = PointSet>) -> Result<Self> {
        if kind != ObjectKind::FinSet && labels.len() > MAX_STRUCTURED_POINTS {
            return Err(Error::capacity(
                "structured object carrier",
                labels.len() as u128,
                MAX_STRUCTURED_POINTS as u128,
            ));
        }
        let family: Vec<PointSet> = if kind == ObjectKind::FinSet {
            Vec::new()
        } else {
            family.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
        };
        let full = if kind == ObjectKind::FinSet {
            PointSet::EMPTY
        } else {
            PointSet::full(labels.len())
        };
        if let Some(bad) = family.iter().find(|s| !s.is_subset(full)) {
            return Err(Error::Invalid(format!("structure set {bad:?} mentions points outside the carrier")));
        }
        Ok(BaseObject(Arc::new(ObjectData { kind, labels, family })))
    }

    pub fn finset<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        BaseObject(Arc::new(ObjectData {
            kind: ObjectKind::FinSet,
            labels: labels.into_iter().map(Into::into).collect(),
            family: Vec::new(),
        }))
    }

    /// A finite set with points `x1, …, xn`.
    pub fn finset_of_size(n: usize) -> Self {
        BaseObject::finset((1..=n).map(|i| format!("x{i}")))
    }

    pub fn fintop<S: Into<String>>(labels: impl IntoIterator<Item = S>, opens: Vec<PointSet>) -> Result<Self> {
        BaseObject::new(ObjectKind::FinTop, labels.into_iter().map(Into::into).collect(), opens)
    }

    pub fn finconv<S: Into<String>>(labels: impl IntoIterator<Item = S>, convex: Vec<PointSet>) -> Result<Self> {
        BaseObject::new(ObjectKind::FinConv, labels.into_iter().map(Into::into).collect(), convex)
    }

    pub fn kind(&self) -> ObjectKind {
        self.0.kind
    }

    pub fn len(&self) -> usize {
        self.0.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.labels.is_empty()
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn label(&self, p: usize) -> &str {
        &self.0.labels[p]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.labels.iter().position(|l| l == label)
    }

    /// Opens (`fintop`) or convex sets (`finconv`); empty for `finset`.
    pub fn family(&self) -> &[PointSet] {
        &self.0.family
    }

    pub fn all_points(&self) -> PointSet {
        PointSet::full(self.len())
    }

    /// Whether `set` belongs to the structure family. Every subset is
    /// admissible in a plain finite set.
    pub fn is_admissible(&self, set: PointSet) -> bool {
        match self.kind() {
            ObjectKind::FinSet => true,
            _ => self.0.family.binary_search(&set).is_ok(),
        }
    }

    /// Smallest admissible superset of `set`, if one exists (it always does
    /// for valid objects: the family is intersection closed and contains the
    /// carrier).
    pub fn admissible_hull(&self, set: PointSet) -> Option<PointSet> {
        match self.kind() {
            ObjectKind::FinSet => Some(set),
            _ => self
                .family()
                .iter()
                .filter(|s| set.is_subset(**s))
                .copied()
                .reduce(PointSet::intersection),
        }
    }

    pub fn point_set_labels(&self, set: PointSet) -> Vec<&str> {
        set.iter().map(|p| self.label(p)).collect()
    }

    pub fn to_file(&self) -> ObjectFile {
        let sets = || -> Vec<Vec<String>> {
            self.family()
                .iter()
                .map(|s| s.iter().map(|p| self.label(p).to_string()).collect())
                .collect()
        };
        ObjectFile {
            kind: self.kind(),
            carrier: self.labels().to_vec(),
            opens: (self.kind() == ObjectKind::FinTop).then(sets),
            convex: (self.kind() == ObjectKind::FinConv).then(sets),
        }
    }

    pub fn from_file(f: &ObjectFile) -> Result<Self> {
        let mut seen = BTreeSet::new();
        if let Some(dup) = f.carrier.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::Invalid(format!("duplicate point label `{dup}`")));
        }
        let resolve = |sets: &Vec<Vec<String>>| -> Result<Vec<PointSet>> {
            sets.iter()
                .map(|s| {
                    s.iter()
                        .map(|l| {
                            f.carrier
                                .iter()
                                .position(|c| c == l)
                                .ok_or_else(|| Error::Invalid(format!("unknown point `{l}` in structure set")))
                        })
                        .collect::<Result<Vec<_>>>()
                        .map(PointSet::from_points)
                })
                .collect()
        };
        let family = match (f.kind, &f.opens, &f.convex) {
            (ObjectKind::FinSet, None, None) => Vec::new(),
            (ObjectKind::FinTop, Some(o), None) => resolve(o)?,
            (ObjectKind::FinConv, None, Some(c)) => resolve(c)?,
            (k, _, _) => {
                return Err(Error::Invalid(format!(
                    "{k} objects need exactly the matching structure field (`opens` for fintop, `convex` for finconv)"
                )))
            }
        };
        BaseObject::new(f.kind, f.carrier.clone(), family)
    }
}

/// JSON layout of a base object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectFile {
    pub kind: ObjectKind,
    pub carrier: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opens: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convex: Option<Vec<Vec<String>>>,
}

impl Serialize for BaseObject {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BaseObject {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = ObjectFile::deserialize(d)?;
        BaseObject::from_file(&f).map_err(serde::de::Error::custom)
    }
}

/// Checks the closure axioms of the object's structure family exhaustively.
pub fn validate_object(x: &BaseObject) -> LawReport {
    let mut report = LawReport::new();
    let family = x.family();
    let labels = |s: PointSet| json!(x.point_set_labels(s));
    let (what, closed_under_union) = match x.kind() {
        ObjectKind::FinSet => {
            report.push(LawCheck::pass("finset", 0));
            return report;
        }
        ObjectKind::FinTop => ("opens", true),
        ObjectKind::FinConv => ("convex", false),
    };
    report.push(LawCheck::from_search(
        format!("{what}-contain-empty"),
        1,
        (!x.is_admissible(PointSet::EMPTY)).then(|| json!({ "missing": [] })),
    ));
    report.push(LawCheck::from_search(
        format!("{what}-contain-carrier"),
        1,
        (!x.is_admissible(x.all_points())).then(|| json!({ "missing": x.labels() })),
    ));
    let pairs = || family.iter().flat_map(|&a| family.iter().map(move |&b| (a, b)));
    if closed_under_union {
        let bad = pairs().find(|&(a, b)| !x.is_admissible(a.union(b)));
        report.push(LawCheck::from_search(
            "opens-closed-under-union",
            (family.len() * family.len()) as u64,
            bad.map(|(a, b)| json!({ "a": labels(a), "b": labels(b) })),
        ));
    }
    let bad = pairs().find(|&(a, b)| !x.is_admissible(a.intersection(b)));
    report.push(LawCheck::from_search(
        format!("{what}-closed-under-intersection"),
        (family.len() * family.len()) as u64,
        bad.map(|(a, b)| json!({ "a": labels(a), "b": labels(b) })),
    ));
    report
}

/// The Sierpiński space: points `0`, `1`, opens `∅`, `{1}`, `{0,1}`.
pub fn sierpinski() -> BaseObject {
    BaseObject::fintop(
        ["0", "1"],
        vec![PointSet::EMPTY, PointSet::from_points([1]), PointSet::from_points([0, 1])],
    )
    .expect("two points")
}

/// Points `0 … n-1` with the convex sets of the linear order (all intervals,
/// plus the empty set).
pub fn interval_convexity(n: usize) -> Result<BaseObject> {
    let mut sets = vec![PointSet::EMPTY];
    for i in 0..n {
        for j in i..n {
            sets.push(PointSet::from_points(i..=j));
        }
    }
    BaseObject::finconv((0..n).map(|i| i.to_string()), sets)
}

/// The one-point object of the given kind.
pub fn terminal(kind: ObjectKind) -> BaseObject {
    let sets = vec![PointSet::EMPTY, PointSet::full(1)];
    BaseObject::new(kind, vec!["*".to_string()], sets).expect("one point")
}

/// A binary product together with its factors. Point `(x, y)` has index
/// `x * |right| + y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Product {
    pub object: BaseObject,
    pub left: BaseObject,
    pub right: BaseObject,
}

impl Product {
    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        x * self.right.len() + y
    }

    #[inline]
    pub fn split(&self, p: usize) -> (usize, usize) {
        (p / self.right.len(), p % self.right.len())
    }

    pub fn pi1(&self) -> BaseMorphism {
        let table = self.object.points().map(|p| self.split(p).0).collect();
        BaseMorphism::new(self.object.clone(), self.left.clone(), table).expect("projection")
    }

    pub fn pi2(&self) -> BaseMorphism {
        let table = self.object.points().map(|p| self.split(p).1).collect();
        BaseMorphism::new(self.object.clone(), self.right.clone(), table).expect("projection")
    }
}

/// Cartesian product. Opens are generated from open boxes by unions; convex
/// sets are the convex boxes (boxes are already closed under intersection).
pub fn product(x: &BaseObject, y: &BaseObject) -> Result<Product> {
    if x.kind() != y.kind() {
        return Err(Error::KindMismatch(x.kind().to_string(), y.kind().to_string()));
    }
    let ny = y.len();
    let labels = x
        .labels()
        .iter()
        .flat_map(|a| y.labels().iter().map(move |b| format!("({a},{b})")))
        .collect::<Vec<_>>();
    if x.kind() != ObjectKind::FinSet && labels.len() > MAX_STRUCTURED_POINTS {
        return Err(Error::capacity(
            "structured product carrier",
            labels.len() as u128,
            MAX_STRUCTURED_POINTS as u128,
        ));
    }
    let boxes = || {
        x.family().iter().flat_map(move |&u| {
            y.family().iter().map(move |&v| {
                PointSet::from_points(u.iter().flat_map(|a| v.iter().map(move |b| a * ny + b)))
            })
        })
    };
    let family: Vec<PointSet> = match x.kind() {
        ObjectKind::FinSet => Vec::new(),
        ObjectKind::FinTop => {
            let mut unions: BTreeSet<PointSet> = BTreeSet::from([PointSet::EMPTY]);
            for b in boxes().collect::<BTreeSet<_>>() {
                let extra: Vec<PointSet> = unions.iter().map(|s| s.union(b)).collect();
                unions.extend(extra);
            }
            unions.into_iter().collect()
        }
        ObjectKind::FinConv => boxes().collect(),
    };
    Ok(Product {
        object: BaseObject::new(x.kind(), labels, family)?,
        left: x.clone(),
        right: y.clone(),
    })
}

/// The set of all functions `x → y`, for finite sets only. Points are the
/// function tables in lexicographic order, labelled like `[a->0,b->1]`.
pub fn exponential(x: &BaseObject, y: &BaseObject, bound: usize) -> Result<BaseObject> {
    for o in [x, y] {
        if o.kind() != ObjectKind::FinSet {
            return Err(Error::UnsupportedKind {
                op: "exponential".into(),
                kind: o.kind().to_string(),
            });
        }
    }
    crate::error::check_capacity("exponential object", saturating_pow(y.len(), x.len()), bound)?;
    let labels = super::morphism::all_tables(x.len(), y.len())
        .map(|t| {
            let entries: Vec<String> = t
                .iter()
                .enumerate()
                .map(|(i, &v)| format!("{}->{}", x.label(i), y.label(v)))
                .collect();
            format!("[{}]", entries.join(","))
        })
        .collect::<Vec<_>>();
    Ok(BaseObject::finset(labels))
}

/// The sub-object on `points` (in the given order) with the induced subspace
/// topology or trace convexity, and its inclusion morphism.
pub fn subobject(x: &BaseObject, points: &[usize]) -> Result<(BaseObject, BaseMorphism)> {
    let labels = points.iter().map(|&p| x.label(p).to_string()).collect();
    let family = x.family().iter().map(|s| {
        PointSet::from_points(points.iter().enumerate().filter(|(_, &p)| s.contains(p)).map(|(i, _)| i))
    });
    let sub = BaseObject::new(x.kind(), labels, family.collect::<Vec<_>>())?;
    let inclusion = BaseMorphism::new(sub.clone(), x.clone(), points.to_vec())?;
    Ok((sub, inclusion))
}
