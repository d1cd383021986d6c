use super::{AlgebraClass, Elem, FiniteAlgebra};
use crate::error::{Error, Result};

/// Default cap on the number of atoms accepted by [`boolean_algebra`].
pub const DEFAULT_ATOM_BOUND: usize = 5;

/// The 6-element orthomodular lattice with two incomparable complemented
/// pairs: `0 < a, a', b, b' < 1`.
pub fn mo2() -> FiniteAlgebra {
    let (bot, a, a_, b, b_, top) = (0, 1, 2, 3, 4, 5);
    let covers: Vec<(Elem, Elem)> = [a, a_, b, b_]
        .iter()
        .flat_map(|&x| [(bot, x), (x, top)])
        .collect();
    FiniteAlgebra::from_covers(
        &["0", "a", "a'", "b", "b'", "1"],
        &covers,
        Some(vec![top, a_, a, b_, b, bot]),
        AlgebraClass::Orthomodular,
    )
    .expect("MO2 is a lattice")
}

/// The benzene ring ortholattice: `0 < a < b < 1`, `0 < b' < a' < 1`. Not
/// orthomodular.
pub fn o6() -> FiniteAlgebra {
    let (bot, a, b, b_, a_, top) = (0, 1, 2, 3, 4, 5);
    FiniteAlgebra::from_covers(
        &["0", "a", "b", "b'", "a'", "1"],
        &[(bot, a), (a, b), (b, top), (bot, b_), (b_, a_), (a_, top)],
        Some(vec![top, a_, b_, b, a, bot]),
        AlgebraClass::Ortholattice,
    )
    .expect("O6 is a lattice")
}

/// Power set of `k` atoms, with complement and implication. Elements are
/// bitmasks; labels list the atoms, e.g. `{1,3}`.
pub fn boolean_algebra(k: usize) -> Result<FiniteAlgebra> {
    boolean_algebra_bounded(k, DEFAULT_ATOM_BOUND)
}

pub fn boolean_algebra_bounded(k: usize, bound: usize) -> Result<FiniteAlgebra> {
    if k > bound {
        return Err(Error::capacity("boolean algebra atoms", k as u128, bound as u128));
    }
    let n = 1usize << k;
    let full = n - 1;
    let labels = (0..n)
        .map(|m| {
            let atoms: Vec<String> = (0..k).filter(|i| m & (1 << i) != 0).map(|i| (i + 1).to_string()).collect();
            format!("{{{}}}", atoms.join(","))
        })
        .collect();
    let leq = (0..n).map(|x| (0..n).map(|y| x & !y == 0).collect()).collect();
    let meet = (0..n).map(|x| (0..n).map(|y| x & y).collect()).collect();
    let join = (0..n).map(|x| (0..n).map(|y| x | y).collect()).collect();
    let ortho = (0..n).map(|x| full & !x).collect();
    let implication = (0..n).map(|x| (0..n).map(|y| (full & !x) | y).collect()).collect();
    FiniteAlgebra::from_tables(super::AlgebraFile {
        carrier: labels,
        leq,
        meet,
        join,
        ortho: Some(ortho),
        implication: Some(implication),
        bot: 0,
        top: full,
        class: AlgebraClass::Boolean,
    })
}

/// The two-element Boolean algebra with labels `0` and `1`.
pub fn chain2() -> FiniteAlgebra {
    chain(2).expect("2-chain")
}

/// The `n`-element chain `0 < 1 < … < n-1`, a Heyting algebra. The 2-chain is
/// additionally tagged Boolean and carries its complement.
pub fn chain(n: usize) -> Result<FiniteAlgebra> {
    if n == 0 {
        return Err(Error::Invalid("a chain needs at least one element".into()));
    }
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let leq = (0..n).map(|x| (0..n).map(|y| x <= y).collect()).collect();
    let (ortho, class) = if n == 2 {
        (Some(vec![1, 0]), AlgebraClass::Boolean)
    } else {
        (None, AlgebraClass::Heyting)
    };
    FiniteAlgebra::from_order(labels, leq, ortho, class)?.with_derived_implication()
}

/// Resolves a builtin algebra name: `mo2`, `o6`, `2-chain`, `chain(n)` or
/// `boolean(k)`.
pub fn builtin(name: &str) -> Result<FiniteAlgebra> {
    let arg = |prefix: &str| -> Option<Result<usize>> {
        let inner = name.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
        Some(inner.trim().parse().map_err(|_| Error::Invalid(format!("bad size in `{name}`"))))
    };
    match name {
        "mo2" => Ok(mo2()),
        "o6" => Ok(o6()),
        "2-chain" | "chain2" => Ok(chain2()),
        _ => {
            if let Some(n) = arg("chain") {
                chain(n?)
            } else if let Some(k) = arg("boolean") {
                boolean_algebra(k?)
            } else {
                Err(Error::Invalid(format!("unknown builtin algebra `{name}`")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::check_laws;

    #[test]
    fn builtin_names() {
        assert_eq!(builtin("mo2").unwrap(), mo2());
        assert_eq!(builtin("2-chain").unwrap(), chain2());
        assert_eq!(builtin("chain(3)").unwrap().len(), 3);
        assert_eq!(builtin("boolean(2)").unwrap().len(), 4);
        assert!(matches!(builtin("boolean(9)"), Err(Error::Capacity { .. })));
        assert!(matches!(builtin("chain(x)"), Err(Error::Invalid(_))));
        assert!(matches!(builtin("mo3"), Err(Error::Invalid(_))));
    }

    #[test]
    fn generator_shapes() {
        let m = mo2();
        assert_eq!(m.len(), 6);
        assert_eq!(m.meet(1, 3), m.bot());
        assert_eq!(m.join(1, 2), m.top());
        assert_eq!(m.ortho(1), Some(2));

        let o = o6();
        assert!(o.leq(1, 2));
        assert!(o.leq(3, 4));
        assert!(!o.leq(1, 4));

        let b0 = boolean_algebra(0).unwrap();
        assert_eq!(b0.len(), 1);
        assert_eq!(b0.bot(), b0.top());
        assert_eq!(boolean_algebra(3).unwrap().len(), 8);
        assert!(matches!(boolean_algebra(6), Err(Error::Capacity { .. })));
        assert_eq!(boolean_algebra_bounded(6, 6).unwrap().len(), 64);
    }

    #[test]
    fn generators_pass_their_advertised_class() {
        let mut algs = vec![mo2(), o6(), chain2(), chain(3).unwrap(), chain(5).unwrap()];
        for k in 0..=4 {
            algs.push(boolean_algebra(k).unwrap());
        }
        for a in algs {
            let report = check_laws(&a, a.class());
            assert!(report.passed(), "{:?}: {:?}", a, report.first_failure());
        }
    }
}
