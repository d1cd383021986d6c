use serde_json::{json, Value};

use super::{AlgebraClass, Elem, FiniteAlgebra};
use crate::report::{LawCheck, LawReport};

fn pairs(n: usize) -> impl Iterator<Item = (Elem, Elem)> {
    (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)))
}

fn triples(n: usize) -> impl Iterator<Item = (Elem, Elem, Elem)> {
    (0..n).flat_map(move |x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z))))
}

struct Checker {
    report: LawReport,
}

impl Checker {
    fn run<I, T>(&mut self, law: &str, instances: I, mut violation: impl FnMut(T) -> Option<Value>)
    where
        I: Iterator<Item = T>,
    {
        let mut count = 0u64;
        let mut witness = None;
        for item in instances {
            count += 1;
            if let Some(w) = violation(item) {
                witness = Some(w);
                break;
            }
        }
        self.report.push(LawCheck::from_search(law, count, witness));
    }

    fn missing(&mut self, law: &str, table: &str) {
        self.report
            .push(LawCheck::fail(law, 0, json!({ "missing_table": table })));
    }
}

/// Checks every law of `class` against the tables of `a`, in the fixed order
/// poset → lattice → bounds → class-specific. Optional tables that are
/// present (ortho, impl) are always checked as well.
pub fn check_laws(a: &FiniteAlgebra, class: AlgebraClass) -> LawReport {
    let n = a.len();
    let mut c = Checker {
        report: LawReport::new(),
    };

    c.run("leq-reflexive", 0..n, |x| (!a.leq(x, x)).then(|| json!({ "x": c_l(a, x) })));
    c.run("leq-antisymmetric", pairs(n), |(x, y)| {
        (x != y && a.leq(x, y) && a.leq(y, x)).then(|| json!({ "x": c_l(a, x), "y": c_l(a, y) }))
    });
    c.run("leq-transitive", triples(n), |(x, y, z)| {
        (a.leq(x, y) && a.leq(y, z) && !a.leq(x, z))
            .then(|| json!({ "x": c_l(a, x), "y": c_l(a, y), "z": c_l(a, z) }))
    });

    if class != AlgebraClass::Poset {
        c.run("meet-glb", pairs(n), |(x, y)| {
            let m = a.meet(x, y);
            if !a.leq(m, x) || !a.leq(m, y) {
                return Some(json!({ "x": c_l(a, x), "y": c_l(a, y), "meet": c_l(a, m) }));
            }
            (0..n)
                .find(|&z| a.leq(z, x) && a.leq(z, y) && !a.leq(z, m))
                .map(|z| json!({ "x": c_l(a, x), "y": c_l(a, y), "meet": c_l(a, m), "larger_lower_bound": c_l(a, z) }))
        });
        c.run("join-lub", pairs(n), |(x, y)| {
            let j = a.join(x, y);
            if !a.leq(x, j) || !a.leq(y, j) {
                return Some(json!({ "x": c_l(a, x), "y": c_l(a, y), "join": c_l(a, j) }));
            }
            (0..n)
                .find(|&z| a.leq(x, z) && a.leq(y, z) && !a.leq(j, z))
                .map(|z| json!({ "x": c_l(a, x), "y": c_l(a, y), "join": c_l(a, j), "smaller_upper_bound": c_l(a, z) }))
        });
    }

    c.run("bounds", 0..n, |x| {
        (!a.leq(a.bot(), x) || !a.leq(x, a.top())).then(|| json!({ "x": c_l(a, x) }))
    });

    let distributive = matches!(
        class,
        AlgebraClass::Distributive | AlgebraClass::Heyting | AlgebraClass::Frame | AlgebraClass::Boolean
    );
    if distributive {
        c.run("distributive", triples(n), |(x, y, z)| {
            let lhs = a.meet(x, a.join(y, z));
            let rhs = a.join(a.meet(x, y), a.meet(x, z));
            (lhs != rhs).then(|| {
                json!({ "x": c_l(a, x), "y": c_l(a, y), "z": c_l(a, z), "lhs": c_l(a, lhs), "rhs": c_l(a, rhs) })
            })
        });
    }

    if class == AlgebraClass::Heyting && a.implication_table().is_none() {
        c.missing("implication-residuation", "impl");
    }
    if let Some(imp) = a.implication_table() {
        c.run("implication-residuation", triples(n), |(x, y, z)| {
            let lhs = a.leq(a.meet(x, y), z);
            let rhs = a.leq(x, imp[y][z]);
            (lhs != rhs).then(|| json!({ "x": c_l(a, x), "y": c_l(a, y), "z": c_l(a, z), "impl": c_l(a, imp[y][z]) }))
        });
    }

    if class.is_ortho() && a.ortho_table().is_none() {
        c.missing("ortho-involution", "ortho");
    }
    if let Some(o) = a.ortho_table() {
        c.run("ortho-involution", 0..n, |x| (o[o[x]] != x).then(|| json!({ "x": c_l(a, x) })));
        c.run("ortho-antitone", pairs(n), |(x, y)| {
            (a.leq(x, y) && !a.leq(o[y], o[x])).then(|| json!({ "x": c_l(a, x), "y": c_l(a, y) }))
        });
        c.run("ortho-noncontradiction", 0..n, |x| {
            (a.meet(x, o[x]) != a.bot()).then(|| json!({ "x": c_l(a, x) }))
        });
        c.run("ortho-excluded-middle", 0..n, |x| {
            (a.join(x, o[x]) != a.top()).then(|| json!({ "x": c_l(a, x) }))
        });
        if class.is_orthomodular() {
            c.run("orthomodular", pairs(n), |(x, y)| {
                if !a.leq(x, y) {
                    return None;
                }
                let rhs = a.join(x, a.meet(o[x], y));
                (rhs != y).then(|| {
                    json!({ "x": c_l(a, x), "y": c_l(a, y), "x_join_ortho_x_meet_y": c_l(a, rhs) })
                })
            });
        }
    }
    c.report
}

fn c_l(a: &FiniteAlgebra, e: Elem) -> &str {
    a.label(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{boolean_algebra, chain, chain2, mo2, o6, AlgebraFile};

    /// Independent oracle: orthomodularity checked directly from the order
    /// relation, without the meet/join tables.
    fn orthomodular_by_order(a: &FiniteAlgebra) -> Option<(Elem, Elem)> {
        let n = a.len();
        let glb = |x: Elem, y: Elem| {
            (0..n)
                .filter(|&z| a.leq(z, x) && a.leq(z, y))
                .find(|&m| (0..n).all(|z| !(a.leq(z, x) && a.leq(z, y)) || a.leq(z, m)))
                .unwrap()
        };
        let lub = |x: Elem, y: Elem| {
            (0..n)
                .filter(|&z| a.leq(x, z) && a.leq(y, z))
                .find(|&m| (0..n).all(|z| !(a.leq(x, z) && a.leq(y, z)) || a.leq(m, z)))
                .unwrap()
        };
        for x in 0..n {
            for y in 0..n {
                if a.leq(x, y) && lub(x, glb(a.ortho(x).unwrap(), y)) != y {
                    return Some((x, y));
                }
            }
        }
        None
    }

    #[test]
    fn two_element_boolean_passes() {
        assert!(check_laws(&chain2(), AlgebraClass::Boolean).passed());
        assert!(check_laws(&boolean_algebra(1).unwrap(), AlgebraClass::Boolean).passed());
    }

    #[test]
    fn mo2_is_orthomodular() {
        let m = mo2();
        let r = check_laws(&m, AlgebraClass::Orthomodular);
        assert!(r.passed(), "{:?}", r.first_failure());
        assert_eq!(r.get("orthomodular").unwrap().instances, 36);
        assert_eq!(r.get("leq-transitive").unwrap().instances, 216);
        assert_eq!(orthomodular_by_order(&m), None);
    }

    #[test]
    fn o6_fails_orthomodularity_at_a_b() {
        let o = o6();
        assert!(check_laws(&o, AlgebraClass::Ortholattice).passed());
        let r = check_laws(&o, AlgebraClass::Orthomodular);
        let fail = r.first_failure().unwrap();
        assert_eq!(fail.law, "orthomodular");
        let w = fail.witness.as_ref().unwrap();
        assert_eq!(w["x"], "a");
        assert_eq!(w["y"], "b");
        assert_eq!(w["x_join_ortho_x_meet_y"], "a");
        let (x, y) = orthomodular_by_order(&o).unwrap();
        assert_eq!((o.label(x), o.label(y)), ("a", "b"));
    }

    #[test]
    fn non_distributive_lattices_fail_distributive_class() {
        let r = check_laws(&mo2(), AlgebraClass::Boolean);
        assert_eq!(r.first_failure().unwrap().law, "distributive");
        // M3-free chain is distributive but has no complement
        let r = check_laws(&chain(3).unwrap(), AlgebraClass::Boolean);
        assert_eq!(r.first_failure().unwrap().law, "ortho-involution");
    }

    #[test]
    fn most_primitive_failure_first() {
        let mut f: AlgebraFile = mo2().into();
        // break transitivity and the meet table at once
        f.leq[1][3] = true;
        f.leq[3][2] = true;
        f.meet[1][3] = 1;
        let bad = FiniteAlgebra::from_tables(f).unwrap();
        let r = check_laws(&bad, AlgebraClass::Orthomodular);
        assert_eq!(r.first_failure().unwrap().law, "leq-transitive");
        assert!(r.get("meet-glb").is_some_and(|c| !c.passed()));
    }

    #[test]
    fn bad_implication_is_reported() {
        let mut f: AlgebraFile = chain(3).unwrap().into();
        f.implication.as_mut().unwrap()[2][0] = 2;
        let bad = FiniteAlgebra::from_tables(f).unwrap();
        let r = check_laws(&bad, AlgebraClass::Heyting);
        assert_eq!(r.first_failure().unwrap().law, "implication-residuation");
    }
}
