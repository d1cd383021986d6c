use rayon::prelude::*;
use serde_json::{json, Value};

use super::{compose_tables, first_relation_violation, is_functional, is_per, rel_equivalent, require_finset, rows, FunctionalRelation, Per};
use crate::algebra::{Elem, FiniteAlgebra};
use crate::base::{all_tables, BaseObject};
use crate::error::{check_capacity, saturating_pow, Result};
use crate::hyperdoctrine::Model;
use crate::report::{LawCheck, LawReport};

pub const DEFAULT_CARRIER_CAP: usize = 2;

/// The category of PERs on carriers `{x1..xn}`, `n ≤ cap`, with functional
/// relations modulo `≈` as arrows.
///
/// Because `≈` is the fibre order taken both ways, each class has exactly one
/// table, which is stored as its representative; hom lists are sorted
/// lexicographically.
#[derive(Clone)]
pub struct CategoryData {
    model: Model,
    objects: Vec<Per>,
    homs: Vec<Vec<Vec<Vec<Elem>>>>,
}

/// Enumerates every PER on carriers of size `0..=carrier_cap` and every
/// functional relation between them.
pub fn build_topos(m: &Model, carrier_cap: usize) -> Result<CategoryData> {
    require_finset(m, "build_topos")?;
    let omega = m.omega();
    let bound = m.bounds().fibre;
    let mut objects = Vec::new();
    for n in 0..=carrier_cap {
        check_capacity("PER enumeration", saturating_pow(omega.len(), n * n), bound)?;
        let x = BaseObject::finset_of_size(n);
        for t in all_tables(n * n, omega.len()).filter(|t| is_per(omega, n, t)) {
            objects.push(Per::new(m, &x, t)?);
        }
    }
    for a in &objects {
        for b in &objects {
            check_capacity("relation enumeration", saturating_pow(omega.len(), a.len() * b.len()), bound)?;
        }
    }
    let homs = objects
        .par_iter()
        .map(|a| objects.iter().map(|b| hom_classes(omega, a, b)).collect())
        .collect();
    Ok(CategoryData { model: m.clone(), objects, homs })
}

fn hom_classes(omega: &FiniteAlgebra, a: &Per, b: &Per) -> Vec<Vec<Elem>> {
    let (n, k) = (a.len(), b.len());
    let mut reps: Vec<Vec<Elem>> = Vec::new();
    for t in all_tables(n * k, omega.len()) {
        if is_functional(omega, n, k, a.table(), b.table(), &t) && !reps.iter().any(|r| rel_equivalent(omega, r, &t)) {
            reps.push(t);
        }
    }
    reps
}

impl CategoryData {
    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn omega(&self) -> &FiniteAlgebra {
        self.model.omega()
    }

    pub fn objects(&self) -> &[Per] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Class representatives of arrows `a → b`.
    pub fn hom(&self, a: usize, b: usize) -> &[Vec<Elem>] {
        &self.homs[a][b]
    }

    pub fn hom_count(&self, a: usize, b: usize) -> usize {
        self.homs[a][b].len()
    }

    pub fn total_arrows(&self) -> usize {
        self.homs.iter().flatten().map(Vec::len).sum()
    }

    pub fn arrow(&self, a: usize, b: usize, i: usize) -> Result<FunctionalRelation> {
        FunctionalRelation::new(&self.model, &self.objects[a], &self.objects[b], self.homs[a][b][i].clone())
    }

    /// Index of the object whose PER equals `p`.
    pub fn index_of(&self, p: &Per) -> Option<usize> {
        self.objects.iter().position(|q| q == p)
    }

    /// Position of the class of `table` in `hom(a, b)`, if it is an arrow.
    pub fn class_of(&self, a: usize, b: usize, table: &[Elem]) -> Option<usize> {
        let omega = self.omega();
        self.homs[a][b].iter().position(|r| rel_equivalent(omega, r, table))
    }

    pub fn identity(&self, a: usize) -> Option<usize> {
        self.class_of(a, a, self.objects[a].table())
    }

    /// Raw relational composite of `f ∈ hom(a, b)` and `g ∈ hom(b, c)`.
    pub fn compose(&self, a: usize, b: usize, c: usize, f: usize, g: usize) -> Vec<Elem> {
        self.compose_raw(a, b, c, &self.homs[a][b][f], &self.homs[b][c][g])
    }

    fn compose_raw(&self, a: usize, b: usize, c: usize, f: &[Elem], g: &[Elem]) -> Vec<Elem> {
        let (n, m, k) = (self.objects[a].len(), self.objects[b].len(), self.objects[c].len());
        compose_tables(self.omega(), n, m, k, f, g)
    }

    /// `(a, b, c, f, g, class of g∘f)`; the class is `None` when the composite
    /// is not a functional relation.
    pub fn composition_table(&self) -> Vec<(usize, usize, usize, usize, usize, Option<usize>)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for f in 0..self.hom_count(a, b) {
                        for g in 0..self.hom_count(b, c) {
                            let h = self.class_of(a, c, &self.compose(a, b, c, f, g));
                            out.push((a, b, c, f, g, h));
                        }
                    }
                }
            }
        }
        out
    }

    /// Objects with exactly one arrow to every object.
    pub fn initial_objects(&self) -> Vec<usize> {
        (0..self.len()).filter(|&a| (0..self.len()).all(|b| self.hom_count(a, b) == 1)).collect()
    }

    /// Hom-set sizes into and out of every object.
    pub fn fingerprint(&self, a: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.len();
        ((0..n).map(|b| self.hom_count(b, a)).collect(), (0..n).map(|b| self.hom_count(a, b)).collect())
    }

    /// Isomorphism classes, found by searching mutually inverse arrows among
    /// objects with equal fingerprints. Classes are listed by least member.
    pub fn isomorphism_classes(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let prints: Vec<_> = (0..n).map(|a| self.fingerprint(a)).collect();
        let mut class: Vec<usize> = (0..n).collect();
        for a in 0..n {
            if class[a] != a {
                continue;
            }
            for b in a + 1..n {
                if class[b] == b && prints[a] == prints[b] && self.isomorphic(a, b) {
                    class[b] = a;
                }
            }
        }
        let mut out: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            if class[a] == a {
                out.push((a..n).filter(|&b| class[b] == a).collect());
            }
        }
        out
    }

    pub fn isomorphic(&self, a: usize, b: usize) -> bool {
        let omega = self.omega();
        let (ida, idb) = (self.objects[a].table(), self.objects[b].table());
        (0..self.hom_count(a, b)).any(|f| {
            (0..self.hom_count(b, a)).any(|g| {
                rel_equivalent(omega, &self.compose(a, b, a, f, g), ida)
                    && rel_equivalent(omega, &self.compose(b, a, b, g, f), idb)
            })
        })
    }

    /// Identities, unit laws, closure of composition and associativity, all
    /// modulo `≈` and exhaustive over the enumerated objects. Searches stop
    /// at the first violation in lexicographic order of objects and arrows.
    pub fn check_category_laws(&self) -> LawReport {
        let omega = self.omega();
        let n = self.len();
        let mut r = LawReport::new();

        let missing = (0..n).find(|&a| self.identity(a).is_none());
        r.push(LawCheck::from_search(
            "identity-arrow",
            n as u64,
            missing.map(|a| json!({ "object": self.describe_object(a) })),
        ));

        let arrows = self.total_arrows() as u64;
        let unit = |left: bool| {
            (0..n * n).into_par_iter().find_map_first(|ab| {
                let (a, b) = (ab / n, ab % n);
                self.homs[a][b].iter().find_map(|f| {
                    let comp = if left {
                        self.compose_raw(a, a, b, self.objects[a].table(), f)
                    } else {
                        self.compose_raw(a, b, b, f, self.objects[b].table())
                    };
                    (!rel_equivalent(omega, &comp, f)).then(|| {
                        json!({
                            "dom": self.describe_object(a),
                            "cod": self.describe_object(b),
                            "arrow": self.describe_rel(a, b, f),
                            "composite": self.describe_rel(a, b, &comp),
                        })
                    })
                })
            })
        };
        r.push(LawCheck::from_search("identity-left", arrows, unit(true)));
        r.push(LawCheck::from_search("identity-right", arrows, unit(false)));

        let pairs = self.composable_pairs();
        let closure = (0..n * n * n).into_par_iter().find_map_first(|abc| {
            let (a, b, c) = (abc / (n * n), abc / n % n, abc % n);
            let (na, nc) = (self.objects[a].len(), self.objects[c].len());
            for f in &self.homs[a][b] {
                for g in &self.homs[b][c] {
                    let h = self.compose_raw(a, b, c, f, g);
                    if self.class_of(a, c, &h).is_none() {
                        let (law, _) = first_relation_violation(
                            omega,
                            na,
                            nc,
                            self.objects[a].table(),
                            self.objects[c].table(),
                            &h,
                        )
                        .unwrap_or(("fr-equivalence", vec![]));
                        return Some(json!({
                            "objects": [self.describe_object(a), self.describe_object(b), self.describe_object(c)],
                            "f": self.describe_rel(a, b, f),
                            "g": self.describe_rel(b, c, g),
                            "composite": self.describe_rel(a, c, &h),
                            "violated": law,
                        }));
                    }
                }
            }
            None
        });
        r.push(LawCheck::from_search("composition-closure", pairs, closure));

        let triples = self.composable_triples();
        let assoc = (0..n * n * n * n).into_par_iter().find_map_first(|abcd| {
            let (a, b, c, d) = (abcd / (n * n * n), abcd / (n * n) % n, abcd / n % n, abcd % n);
            for f in &self.homs[a][b] {
                for g in &self.homs[b][c] {
                    let fg = self.compose_raw(a, b, c, f, g);
                    for h in &self.homs[c][d] {
                        let lhs = self.compose_raw(a, c, d, &fg, h);
                        let gh = self.compose_raw(b, c, d, g, h);
                        let rhs = self.compose_raw(a, b, d, f, &gh);
                        if !rel_equivalent(omega, &lhs, &rhs) {
                            return Some(json!({
                                "objects": [
                                    self.describe_object(a),
                                    self.describe_object(b),
                                    self.describe_object(c),
                                    self.describe_object(d),
                                ],
                                "f": self.describe_rel(a, b, f),
                                "g": self.describe_rel(b, c, g),
                                "h": self.describe_rel(c, d, h),
                                "fg_then_h": self.describe_rel(a, d, &lhs),
                                "f_then_gh": self.describe_rel(a, d, &rhs),
                            }));
                        }
                    }
                }
            }
            None
        });
        r.push(LawCheck::from_search("associativity", triples, assoc));
        r
    }

    fn composable_pairs(&self) -> u64 {
        let n = self.len();
        let mut total = 0u64;
        for b in 0..n {
            let into: u64 = (0..n).map(|a| self.hom_count(a, b) as u64).sum();
            let out: u64 = (0..n).map(|c| self.hom_count(b, c) as u64).sum();
            total += into * out;
        }
        total
    }

    fn composable_triples(&self) -> u64 {
        let n = self.len();
        let into: Vec<u64> = (0..n).map(|b| (0..n).map(|a| self.hom_count(a, b) as u64).sum()).collect();
        let out: Vec<u64> = (0..n).map(|c| (0..n).map(|d| self.hom_count(c, d) as u64).sum()).collect();
        let mut total = 0u64;
        for b in 0..n {
            for c in 0..n {
                total += into[b] * self.hom_count(b, c) as u64 * out[c];
            }
        }
        total
    }

    fn describe_object(&self, a: usize) -> Value {
        self.objects[a].to_json(self.omega())
    }

    fn describe_rel(&self, a: usize, b: usize, t: &[Elem]) -> Vec<Vec<String>> {
        rows(self.omega(), t, self.objects[a].len(), self.objects[b].len())
    }

    /// Objects, hom representatives and, optionally, the composition table.
    pub fn to_json(&self, with_composition: bool) -> Value {
        let n = self.len();
        let mut homs = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let arrows: Vec<_> = self.homs[a][b].iter().map(|t| self.describe_rel(a, b, t)).collect();
                homs.push(json!({ "dom": a, "cod": b, "arrows": arrows }));
            }
        }
        let mut out = json!({
            "omega": self.omega().labels(),
            "objects": (0..n).map(|a| self.describe_object(a)).collect::<Vec<_>>(),
            "homs": homs,
        });
        if with_composition {
            let table: Vec<Value> = self
                .composition_table()
                .into_iter()
                .map(|(a, b, c, f, g, h)| json!([a, b, c, f, g, h]))
                .collect();
            out["composition"] = Value::Array(table);
        }
        out
    }
}
