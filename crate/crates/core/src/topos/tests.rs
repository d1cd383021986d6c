use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;

use super::*;
use crate::algebra::{chain, chain2, mo2};

fn set(n: usize) -> BaseObject {
    BaseObject::finset_of_size(n)
}

fn mo2_model() -> Model {
    Model::finset(mo2()).unwrap()
}

fn lbl(m: &Model, labels: &[&str]) -> Vec<Elem> {
    labels.iter().map(|l| m.omega().index_of(l).unwrap()).collect()
}

#[test]
fn per_examples() {
    let m = mo2_model();
    let x = set(2);
    assert!(check_per(&m, &Per::identity(&m, &x).unwrap()).passed());
    assert!(check_per(&m, &Per::codiscrete(&m, &x).unwrap()).passed());
    let p = Per::new(&m, &x, lbl(&m, &["a", "0", "0", "b"])).unwrap();
    assert!(check_per(&m, &p).passed());
    let asym = Per::new(&m, &x, lbl(&m, &["1", "a", "0", "1"])).unwrap();
    let r = check_per(&m, &asym);
    assert!(!r.get("per-symmetry").unwrap().passed());
    // e(x1,x2) ∧ e(x2,x1) = 1 is not below e(x1,x1) = a
    let nontrans = Per::new(&m, &x, lbl(&m, &["a", "1", "1", "1"])).unwrap();
    let r = check_per(&m, &nontrans);
    assert!(r.get("per-symmetry").unwrap().passed());
    assert!(!r.get("per-transitivity").unwrap().passed());
}

#[test]
fn functional_relation_laws_are_reported_separately() {
    let m = mo2_model();
    let x = Per::identity(&m, &set(1)).unwrap();
    let y = Per::identity(&m, &set(2)).unwrap();
    let ok = FunctionalRelation::new(&m, &x, &y, lbl(&m, &["1", "0"])).unwrap();
    assert!(check_functional_relation(&m, &ok).passed());
    let both = FunctionalRelation::new(&m, &x, &y, lbl(&m, &["1", "1"])).unwrap();
    let r = check_functional_relation(&m, &both);
    assert!(!r.get("fr-single-valuedness").unwrap().passed());
    assert!(r.get("fr-totality").unwrap().passed());
    let none = FunctionalRelation::new(&m, &x, &y, lbl(&m, &["a", "0"])).unwrap();
    let r = check_functional_relation(&m, &none);
    assert!(!r.get("fr-totality").unwrap().passed());
    assert!(r.get("fr-strictness").unwrap().passed());
    let small = Per::new(&m, &set(1), lbl(&m, &["a"])).unwrap();
    let loose = FunctionalRelation::new(&m, &small, &y, lbl(&m, &["1", "0"])).unwrap();
    assert!(!check_functional_relation(&m, &loose).get("fr-strictness").unwrap().passed());
}

#[test]
fn identity_composition_laws() {
    let m = mo2_model();
    let p = Per::new(&m, &set(2), lbl(&m, &["a", "0", "0", "b"])).unwrap();
    let q = Per::identity(&m, &set(1)).unwrap();
    let f = FunctionalRelation::new(&m, &p, &q, lbl(&m, &["a", "b"])).unwrap();
    assert!(check_functional_relation(&m, &f).passed());
    let left = compose_relations(&m, &FunctionalRelation::identity(&p), &f).unwrap();
    let right = compose_relations(&m, &f, &FunctionalRelation::identity(&q)).unwrap();
    assert!(left.equivalent(&f, m.omega()));
    assert!(right.equivalent(&f, m.omega()));
    assert!(compose_relations(&m, &f, &f).is_err());
}

/// Over the two-element chain, composition is relational composition.
#[test]
fn boolean_composition_is_relational() {
    let m = Model::finset(chain2()).unwrap();
    let cat = build_topos(&m, 2).unwrap();
    let n = cat.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for f in 0..cat.hom_count(a, b) {
                    for g in 0..cat.hom_count(b, c) {
                        let (na, nb, nc) = (cat.objects()[a].len(), cat.objects()[b].len(), cat.objects()[c].len());
                        let fr: HashSet<(usize, usize)> = (0..na * nb).filter(|&p| cat.hom(a, b)[f][p] == 1).map(|p| (p / nb, p % nb)).collect();
                        let gr: HashSet<(usize, usize)> = (0..nb * nc).filter(|&p| cat.hom(b, c)[g][p] == 1).map(|p| (p / nc, p % nc)).collect();
                        let expect: HashSet<(usize, usize)> = fr
                            .iter()
                            .flat_map(|&(x, y)| gr.iter().filter(move |&&(y2, _)| y2 == y).map(move |&(_, z)| (x, z)))
                            .collect();
                        let got = cat.compose(a, b, c, f, g);
                        let got: HashSet<(usize, usize)> = (0..na * nc).filter(|&p| got[p] == 1).map(|p| (p / nc, p % nc)).collect();
                        assert_eq!(got, expect);
                    }
                }
            }
        }
    }
}

/// Classes of an equivalence relation given as a boolean table.
fn classes(n: usize, eq: &[Elem]) -> Vec<usize> {
    let mut cls = vec![usize::MAX; n];
    let mut next = 0;
    for x in 0..n {
        if cls[x] == usize::MAX {
            for y in 0..n {
                if eq[x * n + y] == 1 {
                    cls[y] = next;
                }
            }
            next += 1;
        }
    }
    cls
}

/// Counts ~-respecting functions X → Y, identified when pointwise ~-related.
fn classical_hom_count(nx: usize, ex: &[Elem], ny: usize, ey: &[Elem]) -> usize {
    let mut seen = BTreeSet::new();
    let cy = classes(ny, ey);
    for f in crate::base::all_tables(nx, ny) {
        let respects = (0..nx).all(|x| (0..nx).all(|x2| ex[x * nx + x2] == 0 || ey[f[x] * ny + f[x2]] == 1));
        if respects {
            seen.insert(f.iter().map(|&y| cy[y]).collect::<Vec<_>>());
        }
    }
    seen.len()
}

#[test]
fn classical_hom_counts_on_total_pers() {
    let m = Model::finset(chain2()).unwrap();
    let cat = build_topos(&m, 2).unwrap();
    let total: Vec<usize> = (0..cat.len()).filter(|&a| cat.objects()[a].is_total(m.omega())).collect();
    assert_eq!(total.len(), 1 + 1 + 2);
    for &a in &total {
        for &b in &total {
            let (pa, pb) = (&cat.objects()[a], &cat.objects()[b]);
            let expect = classical_hom_count(pa.len(), pa.table(), pb.len(), pb.table());
            assert_eq!(cat.hom_count(a, b), expect, "{pa:?} -> {pb:?}");
            let qa = classes(pa.len(), pa.table()).into_iter().collect::<BTreeSet<_>>().len();
            let qb = classes(pb.len(), pb.table()).into_iter().collect::<BTreeSet<_>>().len();
            assert_eq!(expect, qb.pow(qa as u32));
        }
    }
}

#[test]
fn empty_pers_are_initial() {
    for omega in [chain2(), mo2()] {
        let m = Model::finset(omega).unwrap();
        let cat = build_topos(&m, 2).unwrap();
        let bot = m.omega().bot();
        let empty: Vec<usize> = (0..cat.len()).filter(|&a| cat.objects()[a].table().iter().all(|&e| e == bot)).collect();
        assert_eq!(empty.len(), 3);
        assert_eq!(cat.initial_objects(), empty);
    }
}

#[test]
fn two_chain_category_laws_and_iso_classes() {
    let m = Model::finset(chain2()).unwrap();
    let cat = build_topos(&m, 2).unwrap();
    let r = cat.check_category_laws();
    assert!(r.passed(), "{:?}", r.first_failure());
    let one = cat.index_of(&Per::identity(&m, &set(1)).unwrap()).unwrap();
    let iso = cat.isomorphism_classes();
    let mut globals: Vec<usize> = iso.iter().map(|c| cat.hom_count(one, c[0])).collect();
    globals.sort();
    assert_eq!(globals, [0, 1, 2]);
    for c in &iso {
        let g = cat.hom_count(one, c[0]);
        assert!(c.iter().all(|&a| cat.hom_count(one, a) == g));
    }
}

#[test]
fn heyting_chain_category_laws() {
    let m = Model::finset(chain(3).unwrap()).unwrap();
    let cat = build_topos(&m, 2).unwrap();
    let r = cat.check_category_laws();
    assert!(r.passed(), "{:?}", r.first_failure());
}

/// Over MO2 unit laws hold, but composites can leave the hom-sets and
/// associativity fails.
#[test]
fn mo2_category_laws() {
    let m = mo2_model();
    let cat = build_topos(&m, 2).unwrap();
    assert_eq!(cat.len(), 60);
    assert_eq!(cat.total_arrows(), 5340);
    let r = cat.check_category_laws();
    assert!(r.get("identity-arrow").unwrap().passed());
    assert!(r.get("identity-left").unwrap().passed());
    assert!(r.get("identity-right").unwrap().passed());
    let closure = r.get("composition-closure").unwrap();
    assert!(!closure.passed());
    assert_eq!(closure.witness.as_ref().unwrap()["violated"], "fr-totality");
    assert!(!r.get("associativity").unwrap().passed());

    // the smallest witness: a ∧ (a' ∨ b) = a but (a ∧ a') ∨ (a ∧ b) = 0
    let pa = Per::new(&m, &set(1), lbl(&m, &["a"])).unwrap();
    let one = Per::identity(&m, &set(1)).unwrap();
    let two = Per::new(&m, &set(2), lbl(&m, &["a'", "0", "0", "b"])).unwrap();
    let f = FunctionalRelation::new(&m, &pa, &one, lbl(&m, &["a"])).unwrap();
    let g = FunctionalRelation::new(&m, &one, &two, lbl(&m, &["a'", "b"])).unwrap();
    assert!(check_functional_relation(&m, &f).passed());
    assert!(check_functional_relation(&m, &g).passed());
    let fg = compose_relations(&m, &f, &g).unwrap();
    assert_eq!(fg.table(), lbl(&m, &["0", "0"]));
    assert!(!check_functional_relation(&m, &fg).get("fr-totality").unwrap().passed());
}

#[test]
fn composition_table_agrees_with_class_lookup() {
    let m = Model::finset(chain2()).unwrap();
    let cat = build_topos(&m, 1).unwrap();
    for (a, b, c, f, g, h) in cat.composition_table() {
        let h = h.expect("closed over a Boolean omega");
        assert_eq!(cat.hom(a, c)[h], cat.compose(a, b, c, f, g));
    }
    let json = cat.to_json(true);
    assert_eq!(json["objects"].as_array().unwrap().len(), cat.len());
}

#[test]
fn build_capacity_and_kind() {
    let m = mo2_model();
    assert!(matches!(build_topos(&m, 3), Err(Error::Capacity { .. })));
    let open = Model::new(ObjectKind::FinTop, chain2(), crate::hyperdoctrine::FibreRule::Open).unwrap();
    assert!(matches!(build_topos(&open, 1), Err(Error::UnsupportedKind { .. })));
}

#[test]
fn qset_encoding_examples() {
    let m = mo2_model();
    let top = m.omega().top();
    let single = per_to_qset(&Per::codiscrete(&m, &set(1)).unwrap());
    let u = qset_to_v(&single, top);
    assert_eq!(u.rank(), 1);
    assert_eq!(u.entries().len(), 1);
    assert_eq!(u.get(&VElement::empty()), Some(top));

    let p = Per::new(&m, &set(2), lbl(&m, &["a", "0", "0", "b"])).unwrap();
    let u = qset_to_v(&per_to_qset(&p), top);
    let ab = lbl(&m, &["a", "b"]);
    assert_eq!(u.get(&VElement::numeral(0, top)), Some(ab[0]));
    assert_eq!(u.get(&VElement::numeral(1, top)), Some(ab[1]));
    assert_eq!(u.rank(), 2);
}

#[test]
fn numerals() {
    let n3 = VElement::numeral(3, 1);
    assert_eq!(n3.rank(), 3);
    let keys: Vec<usize> = n3.entries().keys().map(VElement::rank).collect();
    assert_eq!(keys, [0, 1, 2]);
    assert_ne!(VElement::numeral(1, 1), VElement::numeral(2, 1));
}

#[test]
fn qset_to_v_is_injective_on_diagonals() {
    let omega = mo2();
    let mut seen = HashSet::new();
    let mut total = 0;
    for n in 0..=3 {
        for d in crate::base::all_tables(n, omega.len()) {
            let q = QSet {
                carrier: (0..n).map(|i| format!("x{i}")).collect(),
                eq: (0..n).map(|i| (0..n).map(|j| if i == j { d[i] } else { omega.bot() }).collect()).collect(),
            };
            assert!(seen.insert(qset_to_v(&q, omega.top())));
            total += 1;
        }
    }
    assert_eq!(total, 1 + 6 + 36 + 216);
}

/// Independent count: elements as sorted (key index, value) lists over the
/// previous stage, counted without building maps.
fn naive_stage_counts(omega_len: usize, max_rank: usize) -> Vec<usize> {
    let mut stage: Vec<Vec<(usize, usize)>> = vec![vec![]];
    let mut counts = vec![1];
    for _ in 0..max_rank {
        let mut next = BTreeSet::new();
        let n = stage.len();
        for mask in 0..(1usize << n) {
            let keys: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            for vals in crate::base::all_tables(keys.len(), omega_len) {
                next.insert(keys.iter().copied().zip(vals).collect::<Vec<_>>());
            }
        }
        stage = next.into_iter().collect();
        counts.push(stage.len());
    }
    counts
}

#[test]
fn universe_counts() {
    let two = chain2();
    let v = v_build(&two, 2, 1000).unwrap();
    assert_eq!(v.counts(), [1, 3, 27]);
    assert_eq!(v.counts(), naive_stage_counts(2, 2));
    let c: Vec<u64> = v_count(&two, 3).unwrap().iter().map(|b| b.try_into().unwrap()).collect();
    assert_eq!(c, [1, 3, 27, 3u64.pow(27)]);

    let q = mo2();
    let v = v_build(&q, 1, 100).unwrap();
    assert_eq!(v.counts(), [1, 7]);
    assert_eq!(naive_stage_counts(6, 2), [1, 7, 7usize.pow(7)]);
    for omega in [chain2(), mo2(), chain(3).unwrap()] {
        assert_eq!(v_build(&omega, 0, 1).unwrap().counts(), [1]);
    }
    assert!(matches!(v_build(&q, 2, 1000), Err(Error::Capacity { .. })));
    assert!(matches!(v_count(&two, 5), Err(Error::Capacity { .. })));
}

#[test]
fn universe_is_cumulative_and_ranked() {
    let v = v_build(&chain2(), 2, 1000).unwrap();
    for w in v.stages.windows(2) {
        let next: HashSet<&VElement> = w[1].iter().collect();
        assert!(w[0].iter().all(|u| next.contains(u)));
    }
    for (a, stage) in v.stages.iter().enumerate() {
        for u in stage {
            assert!(u.rank() <= a);
            assert!(u.entries().keys().all(|k| k.rank() < u.rank()));
        }
    }
    let json = v.stages[1][1].to_json(&chain2());
    assert_eq!(json["rank"], 1);
}

proptest! {
    #[test]
    fn per_qset_roundtrip(t in proptest::collection::vec(0usize..6, 4)) {
        let m = mo2_model();
        let p = Per::new(&m, &set(2), t.clone()).unwrap();
        let q = per_to_qset(&p);
        let flat: Vec<Elem> = q.eq.iter().flatten().copied().collect();
        prop_assert_eq!(flat, t);
        prop_assert_eq!(q.diagonal(), p.extent());
    }

    /// Whenever a composite over MO2 is functional, it is the class the
    /// category stores for it.
    #[test]
    fn composites_within_hom_sets(a in 0usize..60, b in 0usize..60, c in 0usize..60, fi in 0usize..1000, gi in 0usize..1000) {
        let cat = mo2_category();
        prop_assume!(cat.hom_count(a, b) > 0 && cat.hom_count(b, c) > 0);
        let f = fi % cat.hom_count(a, b);
        let g = gi % cat.hom_count(b, c);
        let h = cat.compose(a, b, c, f, g);
        let (oa, oc) = (&cat.objects()[a], &cat.objects()[c]);
        let functional = is_functional(cat.omega(), oa.len(), oc.len(), oa.table(), oc.table(), &h);
        prop_assert_eq!(functional, cat.class_of(a, c, &h).is_some());
    }
}

fn mo2_category() -> &'static CategoryData {
    static CAT: std::sync::OnceLock<CategoryData> = std::sync::OnceLock::new();
    CAT.get_or_init(|| build_topos(&mo2_model(), 2).unwrap())
}
