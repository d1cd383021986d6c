//! The category of partial equivalence relations over a finite-set
//! hyperdoctrine, Ω-valued sets, and the Ω-valued universe `V_α`.

mod category;
mod universe;

pub use category::{build_topos, CategoryData, DEFAULT_CARRIER_CAP};
pub use universe::{per_to_qset, qset_to_v, v_build, v_count, QSet, VElement, VUniverse};

use serde_json::{json, Value};

use crate::algebra::{Elem, FiniteAlgebra};
use crate::base::{product, BaseObject, ObjectKind};
use crate::error::{Error, Result};
use crate::hyperdoctrine::{Model, Predicate};
use crate::report::{LawCheck, LawReport};

/// An Ω-valued partial equivalence relation on the points of `over`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Per {
    over: BaseObject,
    eq: Predicate,
}

impl std::fmt::Debug for Per {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Per({:?}, {:?})", self.over().labels(), self.eq.table())
    }
}

impl Per {
    /// Wraps a table over `X × X` (row-major). Only the shape is checked;
    /// use [`check_per`] for the laws.
    pub fn new(m: &Model, over: &BaseObject, table: Vec<Elem>) -> Result<Self> {
        let square = product(over, over)?;
        let eq = m.predicate(&square.object, table)?;
        Ok(Per { over: over.clone(), eq })
    }

    /// Equality along the diagonal of the top predicate: `⊤` on the diagonal, `⊥` off it.
    pub fn identity(m: &Model, over: &BaseObject) -> Result<Self> {
        let (_, eq) = m.equality(&m.top_on(over))?;
        Ok(Per { over: over.clone(), eq })
    }

    /// The constant-`⊤` relation.
    pub fn codiscrete(m: &Model, over: &BaseObject) -> Result<Self> {
        let square = product(over, over)?;
        let eq = m.top_on(&square.object);
        Ok(Per { over: over.clone(), eq })
    }

    pub fn over(&self) -> &BaseObject {
        &self.over
    }

    pub fn len(&self) -> usize {
        self.over.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn eq(&self) -> &Predicate {
        &self.eq
    }

    pub fn table(&self) -> &[Elem] {
        self.eq.table()
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> Elem {
        self.eq.at(x * self.len() + y)
    }

    /// `eq(x, x)` for every point.
    pub fn extent(&self) -> Vec<Elem> {
        (0..self.len()).map(|x| self.at(x, x)).collect()
    }

    pub fn is_total(&self, omega: &FiniteAlgebra) -> bool {
        (0..self.len()).all(|x| self.at(x, x) == omega.top())
    }

    pub fn to_json(&self, omega: &FiniteAlgebra) -> Value {
        json!({
            "carrier": self.over().labels(),
            "eq": rows(omega, self.table(), self.len(), self.len()),
        })
    }
}

/// A functional relation between two PERs: a predicate over `X × Y`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FunctionalRelation {
    dom: Per,
    cod: Per,
    rel: Predicate,
}

impl std::fmt::Debug for FunctionalRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} -> {:?}: {:?}", self.dom, self.cod, self.rel.table())
    }
}

impl FunctionalRelation {
    /// Wraps a table over `X × Y`. Only the shape is checked; use
    /// [`check_functional_relation`] for the laws.
    pub fn new(m: &Model, dom: &Per, cod: &Per, table: Vec<Elem>) -> Result<Self> {
        let pair = product(dom.over(), cod.over())?;
        let rel = m.predicate(&pair.object, table)?;
        Ok(FunctionalRelation { dom: dom.clone(), cod: cod.clone(), rel })
    }

    /// The identity arrow on `p`, whose relation is `p` itself.
    pub fn identity(p: &Per) -> Self {
        FunctionalRelation { dom: p.clone(), cod: p.clone(), rel: p.eq.clone() }
    }

    pub fn dom(&self) -> &Per {
        &self.dom
    }

    pub fn cod(&self) -> &Per {
        &self.cod
    }

    pub fn rel(&self) -> &Predicate {
        &self.rel
    }

    pub fn table(&self) -> &[Elem] {
        self.rel.table()
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> Elem {
        self.rel.at(x * self.cod.len() + y)
    }

    /// `F ≈ G`: each below the other in the fibre order.
    pub fn equivalent(&self, other: &FunctionalRelation, omega: &FiniteAlgebra) -> bool {
        self.dom == other.dom && self.cod == other.cod && rel_equivalent(omega, self.table(), other.table())
    }
}

fn require_finset(m: &Model, op: &'static str) -> Result<()> {
    if m.kind() != ObjectKind::FinSet {
        return Err(Error::UnsupportedKind { op: op.into(), kind: m.kind().name().into() });
    }
    Ok(())
}

pub(crate) fn rows(omega: &FiniteAlgebra, t: &[Elem], n: usize, m: usize) -> Vec<Vec<String>> {
    (0..n).map(|x| (0..m).map(|y| omega.label(t[x * m + y]).to_string()).collect()).collect()
}

pub(crate) fn rel_equivalent(omega: &FiniteAlgebra, f: &[Elem], g: &[Elem]) -> bool {
    f.len() == g.len() && f.iter().zip(g).all(|(&a, &b)| omega.leq(a, b) && omega.leq(b, a))
}

fn symmetry_violation(omega: &FiniteAlgebra, n: usize, e: &[Elem]) -> Option<Vec<usize>> {
    (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .find(|&(x, y)| !omega.leq(e[x * n + y], e[y * n + x]))
        .map(|(x, y)| vec![x, y])
}

fn transitivity_violation(omega: &FiniteAlgebra, n: usize, e: &[Elem]) -> Option<Vec<usize>> {
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if !omega.leq(omega.meet(e[x * n + y], e[y * n + z]), e[x * n + z]) {
                    return Some(vec![x, y, z]);
                }
            }
        }
    }
    None
}

pub(crate) fn is_per(omega: &FiniteAlgebra, n: usize, e: &[Elem]) -> bool {
    symmetry_violation(omega, n, e).is_none() && transitivity_violation(omega, n, e).is_none()
}

const RELATION_LAWS: [&str; 4] = ["fr-strictness", "fr-congruence", "fr-single-valuedness", "fr-totality"];

pub(crate) fn is_functional(omega: &FiniteAlgebra, n: usize, m: usize, ex: &[Elem], ey: &[Elem], r: &[Elem]) -> bool {
    RELATION_LAWS.iter().all(|law| relation_violation(omega, law, n, m, ex, ey, r).is_none())
}

/// The first failing law of an `n × m` relation table, with its points.
pub(crate) fn first_relation_violation(
    omega: &FiniteAlgebra,
    n: usize,
    m: usize,
    ex: &[Elem],
    ey: &[Elem],
    r: &[Elem],
) -> Option<(&'static str, Vec<usize>)> {
    RELATION_LAWS
        .iter()
        .find_map(|&law| relation_violation(omega, law, n, m, ex, ey, r).map(|pts| (law, pts)))
}

/// `⋁_y F(x, y) ∧ G(y, z)` on raw tables.
pub(crate) fn compose_tables(omega: &FiniteAlgebra, n: usize, m: usize, k: usize, f: &[Elem], g: &[Elem]) -> Vec<Elem> {
    let mut out = Vec::with_capacity(n * k);
    for x in 0..n {
        for z in 0..k {
            out.push(omega.join_all((0..m).map(|y| omega.meet(f[x * m + y], g[y * k + z]))));
        }
    }
    out
}

/// Symmetry and transitivity, each as one check over all points.
pub fn check_per(m: &Model, p: &Per) -> LawReport {
    let omega = m.omega();
    let n = p.len();
    let witness = |pts: Vec<usize>| {
        let lbl: Vec<&str> = pts.iter().map(|&q| p.over().label(q)).collect();
        json!({ "points": lbl, "eq": rows(omega, p.table(), n, n) })
    };
    let mut r = LawReport::new();
    r.push(LawCheck::from_search(
        "per-symmetry",
        (n * n) as u64,
        symmetry_violation(omega, n, p.table()).map(witness),
    ));
    r.push(LawCheck::from_search(
        "per-transitivity",
        (n * n * n) as u64,
        transitivity_violation(omega, n, p.table()).map(witness),
    ));
    r
}

/// Strictness, congruence, single-valuedness and totality, each reported
/// separately with the first offending points.
pub fn check_functional_relation(m: &Model, f: &FunctionalRelation) -> LawReport {
    let omega = m.omega();
    let (n, k) = (f.dom.len(), f.cod.len());
    let x = f.dom.over();
    let y = f.cod.over();
    let laws: [(&str, u64); 4] = [
        ("fr-strictness", (n * k) as u64),
        ("fr-congruence", (n * n * k * k) as u64),
        ("fr-single-valuedness", (n * k * k) as u64),
        ("fr-totality", n as u64),
    ];
    let mut r = LawReport::new();
    for (law, count) in laws {
        let found = relation_violation(omega, law, n, k, f.dom.table(), f.cod.table(), f.table()).map(|pts| {
            let named: Vec<&str> = match law {
                "fr-strictness" => vec![x.label(pts[0]), y.label(pts[1])],
                "fr-congruence" => vec![x.label(pts[0]), x.label(pts[1]), y.label(pts[2]), y.label(pts[3])],
                "fr-single-valuedness" => vec![x.label(pts[0]), y.label(pts[1]), y.label(pts[2])],
                _ => vec![x.label(pts[0])],
            };
            json!({ "points": named, "rel": rows(omega, f.table(), n, k) })
        });
        r.push(LawCheck::from_search(law, count, found));
    }
    r
}

fn relation_violation(omega: &FiniteAlgebra, law: &str, n: usize, m: usize, ex: &[Elem], ey: &[Elem], r: &[Elem]) -> Option<Vec<usize>> {
    let rel = |x: usize, y: usize| r[x * m + y];
    let eqx = |a: usize, b: usize| ex[a * n + b];
    let eqy = |a: usize, b: usize| ey[a * m + b];
    match law {
        "fr-strictness" => (0..n)
            .flat_map(|x| (0..m).map(move |y| (x, y)))
            .find(|&(x, y)| !omega.leq(rel(x, y), omega.meet(eqx(x, x), eqy(y, y))))
            .map(|(x, y)| vec![x, y]),
        "fr-congruence" => {
            for x in 0..n {
                for x2 in 0..n {
                    for y in 0..m {
                        for y2 in 0..m {
                            let lhs = omega.meet(omega.meet(eqx(x, x2), rel(x, y)), eqy(y, y2));
                            if !omega.leq(lhs, rel(x2, y2)) {
                                return Some(vec![x, x2, y, y2]);
                            }
                        }
                    }
                }
            }
            None
        }
        "fr-single-valuedness" => {
            for x in 0..n {
                for y in 0..m {
                    for y2 in 0..m {
                        if !omega.leq(omega.meet(rel(x, y), rel(x, y2)), eqy(y, y2)) {
                            return Some(vec![x, y, y2]);
                        }
                    }
                }
            }
            None
        }
        _ => (0..n)
            .find(|&x| !omega.leq(eqx(x, x), omega.join_all((0..m).map(|y| rel(x, y)))))
            .map(|x| vec![x]),
    }
}

/// Relational composition `(F ; G)(x, z) = ⋁_y F(x, y) ∧ G(y, z)`. The result
/// is not assumed to be functional; check it.
pub fn compose_relations(m: &Model, f: &FunctionalRelation, g: &FunctionalRelation) -> Result<FunctionalRelation> {
    if f.cod != g.dom {
        return Err(Error::DomainMismatch(format!("cannot compose {f:?} with {g:?}")));
    }
    let t = compose_tables(m.omega(), f.dom.len(), f.cod.len(), g.cod.len(), f.table(), g.table());
    FunctionalRelation::new(m, &f.dom, &g.cod, t)
}

#[cfg(test)]
mod tests;
