//! Exhaustive verifiers for the structure of a hyperdoctrine: quantifier and
//! equality adjunctions, Beck-Chevalley squares, Frobenius reciprocity,
//! comprehension and the generic object.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{describe_table, equality_table, leq_tables, pullback_table, quantify_table, Model, Predicate};
use crate::algebra::Elem;
use crate::base::{diagonal, identity, product, product_map, BaseMorphism, BaseObject, ObjectKind};
use crate::error::{Error, Result};
use crate::report::{LawCheck, LawReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn name(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// The three adjoints a first-order hyperdoctrine provides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Adjoint {
    Forall,
    Exists,
    Equality,
}

impl Adjoint {
    pub fn name(self) -> &'static str {
        match self {
            Adjoint::Forall => "forall",
            Adjoint::Exists => "exists",
            Adjoint::Equality => "equality",
        }
    }
}

/// Checks a Galois connection `F ⊣ G` on explicit tables: `F(a) ≤ b` iff
/// `a ≤ G(b)` for every `a` in `lower`, `b` in `upper`. Returns the first
/// violation in lexicographic `(a, b)` order.
fn galois(
    m: &Model,
    lower_obj: &BaseObject,
    upper_obj: &BaseObject,
    lower: &[Vec<Elem>],
    upper: &[Vec<Elem>],
    left: &[Vec<Elem>],
    right: &[Vec<Elem>],
) -> Option<Value> {
    let omega = m.omega();
    (0..lower.len()).into_par_iter().find_map_first(|i| {
        upper.iter().enumerate().find_map(|(j, b)| {
            let lhs = leq_tables(omega, &left[i], b);
            let rhs = leq_tables(omega, &lower[i], &right[j]);
            (lhs != rhs).then(|| {
                json!({
                    "lower": describe_table(omega, lower_obj, &lower[i]),
                    "upper": describe_table(omega, upper_obj, b),
                    "left_adjoint_of_lower": describe_table(omega, upper_obj, &left[i]),
                    "right_adjoint_of_upper": describe_table(omega, lower_obj, &right[j]),
                    "left_leq_upper": lhs,
                    "lower_leq_right": rhs,
                })
            })
        })
    })
}

/// First table whose image under a pointwise construction leaves the fibre.
fn lifting_failure(m: &Model, op: &str, src: &BaseObject, dst: &BaseObject, inputs: &[Vec<Elem>], outputs: &[Vec<Elem>]) -> Option<Value> {
    inputs.iter().zip(outputs).find_map(|(i, o)| {
        m.rule_violation(dst, o).map(|p| {
            json!({
                "lifting": op,
                "input": describe_table(m.omega(), src, i),
                "output": describe_table(m.omega(), dst, o),
                "point": dst.label(p),
            })
        })
    })
}

/// Verifies the adjunction defining `∀`, `∃` (along `X × Y → Y`) or equality
/// (along `X → X × X`; `y` is ignored) over every pair of fibre elements.
pub fn check_adjunction(m: &Model, which: Adjoint, x: &BaseObject, y: &BaseObject) -> Result<LawReport> {
    let law = format!("adjunction-{}", which.name());
    let omega = m.omega();
    let check = match which {
        Adjoint::Forall | Adjoint::Exists => {
            let pi = product(x, y)?;
            let over_prod = m.fibre_tables(&pi.object)?;
            let over_y = m.fibre_tables(y)?;
            let pi2 = pi.pi2();
            let pulled: Vec<Vec<Elem>> = over_y.iter().map(|w| pullback_table(pi2.table(), w)).collect();
            let q = if which == Adjoint::Forall { super::Quantifier::Forall } else { super::Quantifier::Exists };
            let quantified: Vec<Vec<Elem>> = over_prod
                .iter()
                .map(|v| quantify_table(omega, q, x.len(), y.len(), v))
                .collect();
            let instances = (over_prod.len() * over_y.len()) as u64;
            if let Some(w) = lifting_failure(m, which.name(), &pi.object, y, &over_prod, &quantified) {
                return Ok(LawReport::single(LawCheck::fail(law, instances, w)));
            }
            let violation = if which == Adjoint::Exists {
                // ∃ ⊣ π*
                galois(m, &pi.object, y, &over_prod, &over_y, &quantified, &pulled)
            } else {
                // π* ⊣ ∀
                galois(m, y, &pi.object, &over_y, &over_prod, &pulled, &quantified)
            };
            LawCheck::from_search(law, instances, violation)
        }
        Adjoint::Equality => {
            let (sq, delta) = diagonal(x)?;
            let over_x = m.fibre_tables(x)?;
            let over_sq = m.fibre_tables(&sq.object)?;
            let eqs: Vec<Vec<Elem>> = over_x.iter().map(|v| equality_table(omega, x.len(), v)).collect();
            let restricted: Vec<Vec<Elem>> = over_sq.iter().map(|w| pullback_table(delta.table(), w)).collect();
            let instances = (over_x.len() * over_sq.len()) as u64;
            if let Some(w) = lifting_failure(m, "equality", x, &sq.object, &over_x, &eqs) {
                return Ok(LawReport::single(LawCheck::fail(law, instances, w)));
            }
            LawCheck::from_search(law, instances, galois(m, x, &sq.object, &over_x, &over_sq, &eqs, &restricted))
        }
    };
    Ok(LawReport::single(check))
}

/// For every `f: Z → Y` and every `v` over `X × Y`, checks
/// `f*(Q_π v) = Q_π'((X × f)* v)`.
pub fn check_beck_chevalley(
    m: &Model,
    which: Quantifier,
    x: &BaseObject,
    y: &BaseObject,
    z: &BaseObject,
) -> Result<LawReport> {
    let law = format!("beck-chevalley-{}", which.name());
    let omega = m.omega();
    let xy = product(x, y)?;
    let xz = product(x, z)?;
    let over_xy = m.fibre_tables(&xy.object)?;
    let arrows = m.morphisms(z, y)?;
    let quantified: Vec<Vec<Elem>> = over_xy
        .iter()
        .map(|v| quantify_table(omega, which, x.len(), y.len(), v))
        .collect();
    let instances = (arrows.len() * over_xy.len()) as u64;
    if let Some(w) = lifting_failure(m, which.name(), &xy.object, y, &over_xy, &quantified) {
        return Ok(LawReport::single(LawCheck::fail(law, instances, w)));
    }
    let id_x = identity(x);
    let mut violation = None;
    'outer: for f in &arrows {
        let x_times_f = product_map(&id_x, f, &xz, &xy)?;
        for (v, qv) in over_xy.iter().zip(&quantified) {
            let lhs = pullback_table(f.table(), qv);
            let reindexed = pullback_table(x_times_f.table(), v);
            let rhs = quantify_table(omega, which, x.len(), z.len(), &reindexed);
            if let Some(p) = m.rule_violation(z, &rhs) {
                violation = Some(json!({
                    "lifting": which.name(),
                    "f": format!("{f:?}"),
                    "v": describe_table(omega, &xy.object, v),
                    "point": z.label(p),
                }));
                break 'outer;
            }
            if lhs != rhs {
                violation = Some(json!({
                    "f": format!("{f:?}"),
                    "v": describe_table(omega, &xy.object, v),
                    "pullback_of_quantified": describe_table(omega, z, &lhs),
                    "quantified_of_pullback": describe_table(omega, z, &rhs),
                }));
                break 'outer;
            }
        }
    }
    Ok(LawReport::single(LawCheck::from_search(law, instances, violation)))
}

/// A failure of `∃(v ∧ π*w) = ∃v ∧ w`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusCounterexample {
    pub v: Predicate,
    pub w: Predicate,
    pub lhs: Predicate,
    pub rhs: Predicate,
}

impl FrobeniusCounterexample {
    pub fn to_json(&self, m: &Model) -> Value {
        json!({
            "v": m.describe(&self.v),
            "w": m.describe(&self.w),
            "exists_of_meet": m.describe(&self.lhs),
            "meet_of_exists": m.describe(&self.rhs),
        })
    }
}

/// Searches all `v` over `X × Y` and `w` over `Y` (lexicographically) for a
/// failure of Frobenius reciprocity.
pub fn check_frobenius(m: &Model, x: &BaseObject, y: &BaseObject) -> Result<Option<FrobeniusCounterexample>> {
    let omega = m.omega();
    let pi = product(x, y)?;
    let over_prod = m.fibre_tables(&pi.object)?;
    let over_y = m.fibre_tables(y)?;
    let pi2 = pi.pi2();
    let found = (0..over_prod.len()).into_par_iter().find_map_first(|i| {
        let v = &over_prod[i];
        let ev = quantify_table(omega, Quantifier::Exists, x.len(), y.len(), v);
        over_y.iter().find_map(|w| {
            let pw = pullback_table(pi2.table(), w);
            let meet: Vec<Elem> = v.iter().zip(&pw).map(|(&a, &b)| omega.meet(a, b)).collect();
            let lhs = quantify_table(omega, Quantifier::Exists, x.len(), y.len(), &meet);
            let rhs: Vec<Elem> = ev.iter().zip(w).map(|(&a, &b)| omega.meet(a, b)).collect();
            (lhs != rhs).then(|| (v.clone(), w.clone(), lhs, rhs))
        })
    });
    Ok(found.map(|(v, w, lhs, rhs)| FrobeniusCounterexample {
        v: Predicate { over: pi.object.clone(), table: v },
        w: Predicate { over: y.clone(), table: w.clone() },
        lhs: Predicate { over: y.clone(), table: lhs },
        rhs: Predicate { over: y.clone(), table: rhs },
    }))
}

/// Arrows `(X, u) → (Y, v)` of the Grothendieck construction: base morphisms
/// `f` with `u ≤ f*v`.
pub fn grothendieck_hom(m: &Model, u: &Predicate, v: &Predicate) -> Result<Vec<BaseMorphism>> {
    Ok(m.morphisms(u.over(), v.over())?
        .into_iter()
        .filter(|f| leq_tables(m.omega(), u.table(), &pullback_table(f.table(), v.table())))
        .collect())
}

/// Verifies `Hom_∫P((Y, ⊤), (X, v)) ≅ Hom(Y, {(X, v)})` via composition with
/// the comprehension inclusion, and naturality in `Y` along every
/// endomorphism of `Y`.
pub fn check_comprehension_adjunction(m: &Model, y: &BaseObject, v: &Predicate) -> Result<LawReport> {
    let mut report = LawReport::new();
    let top_y = m.top_on(y);
    let total_hom = grothendieck_hom(m, &top_y, v)?;
    let (sub, inclusion) = m.comprehension(v)?;
    report.push(LawCheck::from_search(
        "comprehension-inclusion",
        1,
        crate::base::validate_morphism(&inclusion)
            .first_failure()
            .map(|c| c.witness.clone().unwrap_or(Value::Null)),
    ));

    let base_hom = m.morphisms(y, &sub)?;
    let image: Vec<BaseMorphism> = base_hom
        .iter()
        .map(|g| g.then(&inclusion))
        .collect::<Result<_>>()?;
    let mut sorted_image: Vec<&[usize]> = image.iter().map(BaseMorphism::table).collect();
    sorted_image.sort();
    let injective = sorted_image.windows(2).all(|w| w[0] != w[1]);
    let mut sorted_total: Vec<&[usize]> = total_hom.iter().map(BaseMorphism::table).collect();
    sorted_total.sort();
    let bijection = injective && sorted_image == sorted_total;
    report.push(LawCheck::from_search(
        "comprehension-bijection",
        total_hom.len() as u64,
        (!bijection).then(|| {
            json!({
                "grothendieck_arrows": total_hom.len(),
                "arrows_into_comprehension": base_hom.len(),
                "injective": injective,
            })
        }),
    ));

    // naturality: the factorisation of f ∘ h is (factorisation of f) ∘ h
    let factor = |f: &BaseMorphism| -> Option<Vec<usize>> {
        f.table()
            .iter()
            .map(|&p| inclusion.table().iter().position(|&q| q == p))
            .collect()
    };
    let endos = m.morphisms(y, y)?;
    let mut instances = 0u64;
    let mut violation = None;
    'outer: for h in &endos {
        for (g, f) in base_hom.iter().zip(&image) {
            instances += 1;
            let fh = h.then(f)?;
            let gh = h.then(g)?;
            let in_total = leq_tables(m.omega(), top_y.table(), &pullback_table(fh.table(), v.table()));
            if !in_total || factor(&fh).as_deref() != Some(gh.table()) {
                violation = Some(json!({ "h": format!("{h:?}"), "g": format!("{g:?}") }));
                break 'outer;
            }
        }
    }
    report.push(LawCheck::from_search("comprehension-naturality", instances, violation));
    Ok(report)
}

/// For finite-set models: the fibre over `X` is in bijection with the
/// morphisms `X → |Ω|`, naturally in `X` (checked along every `f: W → X`
/// with `|W| ≤ |X|`).
pub fn check_generic_object(m: &Model, x: &BaseObject) -> Result<LawReport> {
    if m.kind() != ObjectKind::FinSet {
        return Err(Error::UnsupportedKind {
            op: "generic object".into(),
            kind: m.kind().to_string(),
        });
    }
    let omega = m.omega();
    let omega_obj = BaseObject::finset(omega.labels().iter().cloned());
    let mut report = LawReport::new();

    let fibre = m.fibre_tables(x)?;
    let maps = m.morphisms(x, &omega_obj)?;
    let mut map_tables: Vec<&[usize]> = maps.iter().map(BaseMorphism::table).collect();
    map_tables.sort();
    let mut fibre_sorted: Vec<&[usize]> = fibre.iter().map(Vec::as_slice).collect();
    fibre_sorted.sort();
    let bijective = map_tables == fibre_sorted && fibre_sorted.windows(2).all(|w| w[0] != w[1]);
    report.push(LawCheck::from_search(
        "generic-object-bijection",
        fibre.len() as u64,
        (!bijective).then(|| json!({ "fibre": fibre.len(), "morphisms": maps.len() })),
    ));

    let mut instances = 0u64;
    let mut violation = None;
    'outer: for w_size in 0..=x.len() {
        let w = BaseObject::finset_of_size(w_size);
        for f in m.morphisms(&w, x)? {
            for p in &fibre {
                instances += 1;
                let classified = BaseMorphism::new(x.clone(), omega_obj.clone(), p.clone())?;
                let via_base = f.then(&classified)?;
                let via_fibre = pullback_table(f.table(), p);
                if via_base.table() != via_fibre.as_slice() {
                    violation = Some(json!({ "f": format!("{f:?}"), "p": describe_table(omega, x, p) }));
                    break 'outer;
                }
            }
        }
    }
    report.push(LawCheck::from_search("generic-object-naturality", instances, violation));
    Ok(report)
}
