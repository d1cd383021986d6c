use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::object::{product, BaseObject, ObjectKind, ObjectFile, PointSet, Product};
use crate::error::{check_capacity, saturating_pow, Error, Result};
use crate::report::{LawCheck, LawReport};

/// Default bound on `|Y|^|X|` for [`enumerate_morphisms`].
pub const DEFAULT_MORPHISM_BOUND: usize = 10_000;

/// A total function between carriers. Equality is table equality (plus
/// equality of domain and codomain).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BaseMorphism {
    dom: BaseObject,
    cod: BaseObject,
    table: Vec<usize>,
}

impl fmt::Debug for BaseMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self
            .table
            .iter()
            .enumerate()
            .map(|(i, &j)| format!("{}->{}", self.dom.label(i), self.cod.label(j)))
            .collect();
        write!(f, "[{}]", entries.join(","))
    }
}

impl BaseMorphism {
    /// Checks only that the table is total and lands in the codomain.
    /// Structure preservation is checked by [`validate_morphism`].
    pub fn new(dom: BaseObject, cod: BaseObject, table: Vec<usize>) -> Result<Self> {
        if table.len() != dom.len() {
            return Err(Error::structural(
                "morphism",
                format!("table has {} entries but the domain has {} points", table.len(), dom.len()),
            ));
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= cod.len()) {
            return Err(Error::structural("morphism", format!("value {bad} outside the codomain")));
        }
        Ok(BaseMorphism { dom, cod, table })
    }

    pub fn dom(&self) -> &BaseObject {
        &self.dom
    }

    pub fn cod(&self) -> &BaseObject {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, p: usize) -> usize {
        self.table[p]
    }

    pub fn preimage(&self, set: PointSet) -> PointSet {
        PointSet::from_points(self.dom.points().filter(|&p| set.contains(self.table[p])))
    }

    /// Diagrammatic composite: first `self`, then `next`.
    pub fn then(&self, next: &BaseMorphism) -> Result<BaseMorphism> {
        if self.cod != next.dom {
            return Err(Error::DomainMismatch(format!(
                "cannot compose {:?} → {:?} with {:?} → {:?}",
                self.dom, self.cod, next.dom, next.cod
            )));
        }
        let table = self.table.iter().map(|&p| next.table[p]).collect();
        Ok(BaseMorphism {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            table,
        })
    }

    pub fn to_file(&self) -> MorphismFile {
        MorphismFile {
            dom: self.dom.to_file(),
            cod: self.cod.to_file(),
            table: self
                .table
                .iter()
                .enumerate()
                .map(|(i, &j)| (self.dom.label(i).to_string(), self.cod.label(j).to_string()))
                .collect(),
        }
    }

    pub fn from_file(f: &MorphismFile) -> Result<Self> {
        let dom = BaseObject::from_file(&f.dom)?;
        let cod = BaseObject::from_file(&f.cod)?;
        let table = dom
            .labels()
            .iter()
            .map(|l| {
                let target = f
                    .table
                    .get(l)
                    .ok_or_else(|| Error::structural("morphism", format!("no image for point `{l}`")))?;
                cod.index_of(target)
                    .ok_or_else(|| Error::structural("morphism", format!("`{target}` is not a codomain point")))
            })
            .collect::<Result<Vec<_>>>()?;
        if f.table.len() != dom.len() {
            return Err(Error::structural("morphism", "table mentions points outside the domain"));
        }
        BaseMorphism::new(dom, cod, table)
    }
}

/// JSON layout of a morphism: domain, codomain and a label-to-label table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorphismFile {
    pub dom: ObjectFile,
    pub cod: ObjectFile,
    pub table: BTreeMap<String, String>,
}

/// Diagrammatic composition: `compose(f, g)` is `g ∘ f`.
pub fn compose(f: &BaseMorphism, g: &BaseMorphism) -> Result<BaseMorphism> {
    f.then(g)
}

pub fn identity(x: &BaseObject) -> BaseMorphism {
    BaseMorphism {
        dom: x.clone(),
        cod: x.clone(),
        table: x.points().collect(),
    }
}

/// `δ: X → X × X`, `x ↦ (x, x)`, together with the product it lands in.
pub fn diagonal(x: &BaseObject) -> Result<(Product, BaseMorphism)> {
    let sq = product(x, x)?;
    let table = x.points().map(|p| sq.index(p, p)).collect();
    let delta = BaseMorphism::new(x.clone(), sq.object.clone(), table)?;
    Ok((sq, delta))
}

/// `⟨f, g⟩: Z → X × Y` for `f: Z → X`, `g: Z → Y`.
pub fn pairing(f: &BaseMorphism, g: &BaseMorphism, target: &Product) -> Result<BaseMorphism> {
    if f.dom != g.dom || f.cod != target.left || g.cod != target.right {
        return Err(Error::DomainMismatch("pairing needs f: Z → X, g: Z → Y and the product X × Y".into()));
    }
    let table = f.dom.points().map(|p| target.index(f.apply(p), g.apply(p))).collect();
    BaseMorphism::new(f.dom.clone(), target.object.clone(), table)
}

/// `f × g: A × B → C × D`.
pub fn product_map(f: &BaseMorphism, g: &BaseMorphism, source: &Product, target: &Product) -> Result<BaseMorphism> {
    if f.dom != source.left || g.dom != source.right || f.cod != target.left || g.cod != target.right {
        return Err(Error::DomainMismatch("product_map factors do not match the given products".into()));
    }
    let table = source
        .object
        .points()
        .map(|p| {
            let (a, b) = source.split(p);
            target.index(f.apply(a), g.apply(b))
        })
        .collect();
    BaseMorphism::new(source.object.clone(), target.object.clone(), table)
}

/// Checks that `f` preserves structure: preimages of opens are open, or
/// preimages of convex sets are convex.
pub fn validate_morphism(f: &BaseMorphism) -> LawReport {
    let mut report = LawReport::new();
    if f.dom.kind() != f.cod.kind() {
        report.push(LawCheck::fail(
            "same-kind",
            1,
            json!({ "dom": f.dom.kind().name(), "cod": f.cod.kind().name() }),
        ));
        return report;
    }
    report.push(LawCheck::pass("total", f.dom.len() as u64));
    let law = match f.dom.kind() {
        ObjectKind::FinSet => return report,
        ObjectKind::FinTop => "continuous",
        ObjectKind::FinConv => "convexity-preserving",
    };
    let bad = f.cod.family().iter().find(|&&s| !f.dom.is_admissible(f.preimage(s)));
    report.push(LawCheck::from_search(
        law,
        f.cod.family().len() as u64,
        bad.map(|&s| {
            json!({
                "set": f.cod.point_set_labels(s),
                "preimage": f.dom.point_set_labels(f.preimage(s)),
            })
        }),
    ));
    report
}

/// Whether `table` (assumed total) preserves structure.
pub(crate) fn preserves_structure(dom: &BaseObject, cod: &BaseObject, table: &[usize]) -> bool {
    if dom.kind() == ObjectKind::FinSet {
        return true;
    }
    cod.family().iter().all(|&s| {
        let pre = PointSet::from_points(dom.points().filter(|&p| s.contains(table[p])));
        dom.is_admissible(pre)
    })
}

/// Every table `{0..n} → {0..m}` in lexicographic order (last position
/// varies fastest).
pub(crate) fn all_tables(n: usize, m: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut next = if m == 0 && n > 0 { None } else { Some(vec![0; n]) };
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        let mut i = n;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < m {
                next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    })
}

/// All structure-preserving maps `x → y`, in lexicographic table order.
/// Fails when `|y|^|x|` exceeds `bound`.
pub fn enumerate_morphisms(x: &BaseObject, y: &BaseObject, bound: usize) -> Result<Vec<BaseMorphism>> {
    if x.kind() != y.kind() {
        return Err(Error::KindMismatch(x.kind().to_string(), y.kind().to_string()));
    }
    check_capacity("morphism enumeration", saturating_pow(y.len(), x.len()), bound)?;
    Ok(all_tables(x.len(), y.len())
        .filter(|t| preserves_structure(x, y, t))
        .map(|table| BaseMorphism {
            dom: x.clone(),
            cod: y.clone(),
            table,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{interval_convexity, sierpinski, validate_object};

    #[test]
    fn diagonal_table() {
        let x = BaseObject::finset(["a", "b"]);
        let (sq, d) = diagonal(&x).unwrap();
        assert_eq!(d.table(), &[0, 3]);
        assert_eq!(sq.object.label(d.apply(1)), "(b,b)");
        // π1 ∘ δ = id
        assert_eq!(compose(&d, &sq.pi1()).unwrap(), identity(&x));
        assert_eq!(compose(&d, &sq.pi2()).unwrap(), identity(&x));
    }

    #[test]
    fn enumeration_counts() {
        let one = BaseObject::finset(["a"]);
        let two = BaseObject::finset(["0", "1"]);
        assert_eq!(enumerate_morphisms(&one, &two, 100).unwrap().len(), 2);
        assert_eq!(enumerate_morphisms(&two, &BaseObject::finset_of_size(3), 100).unwrap().len(), 9);
        assert_eq!(enumerate_morphisms(&BaseObject::finset_of_size(0), &two, 100).unwrap().len(), 1);
        assert_eq!(enumerate_morphisms(&two, &BaseObject::finset_of_size(0), 100).unwrap().len(), 0);
        assert!(matches!(
            enumerate_morphisms(&BaseObject::finset_of_size(5), &BaseObject::finset_of_size(7), 10_000),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn sierpinski_endomorphisms() {
        let s = sierpinski();
        let all = enumerate_morphisms(&s, &s, 100).unwrap();
        let tables: Vec<&[usize]> = all.iter().map(|m| m.table()).collect();
        assert_eq!(tables, [&[0, 0][..], &[0, 1], &[1, 1]]);
        for m in &all {
            assert!(validate_morphism(m).passed());
        }
    }

    #[test]
    fn swap_is_not_continuous() {
        let s = sierpinski();
        let swap = BaseMorphism::new(s.clone(), s.clone(), vec![1, 0]).unwrap();
        let r = validate_morphism(&swap);
        let fail = r.first_failure().unwrap();
        assert_eq!(fail.law, "continuous");
        assert_eq!(fail.witness.as_ref().unwrap()["set"], json!(["1"]));
        assert_eq!(fail.witness.as_ref().unwrap()["preimage"], json!(["0"]));
    }

    #[test]
    fn convexity_maps() {
        let c = interval_convexity(3).unwrap();
        let fold = BaseMorphism::new(c.clone(), c.clone(), vec![0, 2, 0]).unwrap();
        assert!(!validate_morphism(&fold).passed());
        let mono = BaseMorphism::new(c.clone(), c.clone(), vec![0, 0, 2]).unwrap();
        assert!(validate_morphism(&mono).passed());
    }

    #[test]
    fn malformed_tables() {
        let x = BaseObject::finset(["a", "b"]);
        assert!(BaseMorphism::new(x.clone(), x.clone(), vec![0]).is_err());
        assert!(BaseMorphism::new(x.clone(), x.clone(), vec![0, 2]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = sierpinski();
        let m = BaseMorphism::new(s.clone(), s.clone(), vec![0, 1]).unwrap();
        let text = serde_json::to_string(&m.to_file()).unwrap();
        assert!(text.contains(r#""table":{"0":"0","1":"1"}"#));
        let f: MorphismFile = serde_json::from_str(&text).unwrap();
        assert_eq!(BaseMorphism::from_file(&f).unwrap(), m);
    }

    /// Universal property of the product against every cone, sizes ≤ 3.
    fn check_universal_property(x: &BaseObject, y: &BaseObject, z: &BaseObject) {
        let p = product(x, y).unwrap();
        assert!(validate_object(&p.object).passed());
        assert!(validate_morphism(&p.pi1()).passed());
        assert!(validate_morphism(&p.pi2()).passed());
        let into_p = enumerate_morphisms(z, &p.object, 1_000_000).unwrap();
        for f in enumerate_morphisms(z, x, 10_000).unwrap() {
            for g in enumerate_morphisms(z, y, 10_000).unwrap() {
                let h = pairing(&f, &g, &p).unwrap();
                assert!(validate_morphism(&h).passed());
                assert_eq!(compose(&h, &p.pi1()).unwrap(), f);
                assert_eq!(compose(&h, &p.pi2()).unwrap(), g);
                let mediating: Vec<_> = into_p
                    .iter()
                    .filter(|k| compose(k, &p.pi1()).unwrap() == f && compose(k, &p.pi2()).unwrap() == g)
                    .collect();
                assert_eq!(mediating, vec![&h]);
            }
        }
    }

    #[test]
    fn product_universal_property() {
        let sets: Vec<BaseObject> = (0..=3).map(BaseObject::finset_of_size).collect();
        for x in &sets {
            for y in &sets {
                for z in &sets[..3] {
                    if x.len() * y.len() <= 6 {
                        check_universal_property(x, y, z);
                    }
                }
            }
        }
        let s = sierpinski();
        let c2 = crate::base::object::terminal(ObjectKind::FinTop);
        check_universal_property(&s, &s, &s);
        check_universal_property(&s, &c2, &s);
        let i2 = interval_convexity(2).unwrap();
        let i3 = interval_convexity(3).unwrap();
        check_universal_property(&i2, &i2, &i3);
    }

    #[test]
    fn category_laws() {
        let x = BaseObject::finset_of_size(2);
        let y = BaseObject::finset_of_size(3);
        for f in enumerate_morphisms(&x, &y, 100).unwrap() {
            assert_eq!(compose(&identity(&x), &f).unwrap(), f);
            assert_eq!(compose(&f, &identity(&y)).unwrap(), f);
            for g in enumerate_morphisms(&y, &x, 100).unwrap() {
                for h in enumerate_morphisms(&x, &y, 100).unwrap() {
                    let left = compose(&compose(&f, &g).unwrap(), &h).unwrap();
                    let right = compose(&f, &compose(&g, &h).unwrap()).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
        assert!(compose(&identity(&x), &identity(&y)).is_err());
    }

    #[test]
    fn morphism_counts_match_power() {
        for n in 0..=3 {
            for m in 0..=3 {
                let all = enumerate_morphisms(&BaseObject::finset_of_size(n), &BaseObject::finset_of_size(m), 100).unwrap();
                assert_eq!(all.len() as u32, (m as u32).pow(n as u32));
                assert!(all.iter().all(|f| validate_morphism(f).passed()));
            }
        }
    }
}
