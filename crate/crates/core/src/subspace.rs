//! Finite sublattices of the lattice of subspaces of `T^d`: closure of a set
//! of generators under intersection, sum and orthogonal complement.

use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraClass, AlgebraFile, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{rank, Field, Subspace};

/// Ambient dimension, generating subspaces (each a list of basis vectors)
/// and the maximum closure size.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec<T> {
    pub dim: usize,
    pub generators: Vec<Vec<Vec<T>>>,
    pub size_cap: usize,
}

/// JSON form of a [`LatticeSpec`], with scalars written as `"p/q"` strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeSpecFile {
    pub dim: usize,
    pub generators: Vec<Vec<Vec<String>>>,
    pub size_cap: usize,
}

impl<T: Field + FromStr> LatticeSpec<T> {
    pub fn from_file(f: &LatticeSpecFile) -> Result<Self> {
        let generators = f
            .generators
            .iter()
            .map(|g| {
                g.iter()
                    .map(|v| {
                        v.iter()
                            .map(|s| {
                                s.trim()
                                    .parse::<T>()
                                    .map_err(|_| Error::Invalid(format!("`{s}` is not a rational number")))
                            })
                            .collect::<Result<Vec<T>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = LatticeSpec {
            dim: f.dim,
            generators,
            size_cap: f.size_cap,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: LatticeSpecFile =
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("subspace spec JSON: {e}")))?;
        Self::from_file(&f)
    }
}

impl<T: Field> LatticeSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        if self.size_cap < 2 {
            return Err(Error::Invalid("size_cap must be at least 2".into()));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if let Some(v) = g.iter().find(|v| v.len() != self.dim) {
                return Err(Error::Invalid(format!(
                    "generator {i} has a vector of length {}, expected {}",
                    v.len(),
                    self.dim
                )));
            }
            if rank(g, self.dim) != g.len() {
                return Err(Error::Invalid(format!("generator {i} has linearly dependent vectors")));
            }
        }
        Ok(())
    }
}

/// A closed family of subspaces together with its lattice tables. Element
/// `i` of the algebra is `elements[i]`.
#[derive(Debug, Clone)]
pub struct SubspaceLattice<T> {
    pub algebra: FiniteAlgebra,
    pub elements: Vec<Subspace<T>>,
}

/// Closes the generators (plus `0` and the whole space) under meet, join and
/// orthocomplement. Elements are ordered by dimension, ties broken by
/// discovery order.
pub fn subspace_lattice<T: Field>(spec: &LatticeSpec<T>) -> Result<SubspaceLattice<T>> {
    spec.validate()?;
    let d = spec.dim;
    let mut elems: Vec<Subspace<T>> = Vec::new();
    let mut index: HashMap<Subspace<T>, usize> = HashMap::new();

    let mut insert = |s: Subspace<T>, elems: &mut Vec<Subspace<T>>| -> Result<()> {
        if index.contains_key(&s) {
            return Ok(());
        }
        if elems.len() == spec.size_cap {
            return Err(Error::capacity(
                "subspace lattice closure",
                elems.len() as u128 + 1,
                spec.size_cap as u128,
            ));
        }
        index.insert(s.clone(), elems.len());
        elems.push(s);
        Ok(())
    };

    insert(Subspace::zero(d), &mut elems)?;
    for g in &spec.generators {
        insert(Subspace::span(d, g.clone()), &mut elems)?;
    }
    insert(Subspace::full(d), &mut elems)?;

    let mut i = 0;
    while i < elems.len() {
        let x = elems[i].clone();
        insert(x.ortho(), &mut elems)?;
        for j in 0..=i {
            let y = elems[j].clone();
            insert(x.meet(&y), &mut elems)?;
            insert(x.join(&y), &mut elems)?;
        }
        i += 1;
    }

    let mut order: Vec<usize> = (0..elems.len()).collect();
    order.sort_by_key(|&k| (elems[k].rank(), k));
    let elems: Vec<Subspace<T>> = order.into_iter().map(|k| elems[k].clone()).collect();
    let pos: HashMap<&Subspace<T>, usize> = elems.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let n = elems.len();

    let leq = elems
        .iter()
        .map(|a| elems.iter().map(|b| a.is_subspace_of(b)).collect())
        .collect();
    let table = |f: &dyn Fn(&Subspace<T>, &Subspace<T>) -> Subspace<T>| -> Vec<Vec<usize>> {
        elems
            .iter()
            .map(|a| elems.iter().map(|b| pos[&f(a, b)]).collect())
            .collect()
    };
    let meet = table(&|a, b| a.meet(b));
    let join = table(&|a, b| a.join(b));
    let ortho = elems.iter().map(|a| pos[&a.ortho()]).collect();

    let algebra = FiniteAlgebra::from_tables(AlgebraFile {
        carrier: elems.iter().map(Subspace::label).collect(),
        leq,
        meet,
        join,
        ortho: Some(ortho),
        implication: None,
        bot: 0,
        top: n - 1,
        class: AlgebraClass::Orthomodular,
    })?;
    Ok(SubspaceLattice { algebra, elements: elems })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{boolean_algebra, check_laws, find_distributivity_counterexample, find_isomorphism, mo2};
    use crate::Rational;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn spec(dim: usize, gens: &[&[&[i64]]], cap: usize) -> LatticeSpec<Ratio<i64>> {
        LatticeSpec {
            dim,
            generators: gens
                .iter()
                .map(|g| g.iter().map(|v| v.iter().map(|&x| Ratio::from_integer(x)).collect()).collect())
                .collect(),
            size_cap: cap,
        }
    }

    #[test]
    fn two_lines_in_the_plane_give_mo2() {
        let lat = subspace_lattice(&spec(2, &[&[&[1, 0]], &[&[1, 1]]], 50)).unwrap();
        let labels: Vec<&str> = lat.algebra.labels().iter().map(String::as_str).collect();
        assert_eq!(labels, ["0", "span(1,0)", "span(1,1)", "span(0,1)", "span(1,-1)", "Q^2"]);
        assert!(check_laws(&lat.algebra, AlgebraClass::Orthomodular).passed());
        assert!(find_isomorphism(&lat.algebra, &mo2(), true).is_some());
        let (x, y, z) = find_distributivity_counterexample(&lat.algebra).unwrap();
        let a = &lat.algebra;
        assert_ne!(a.meet(x, a.join(y, z)), a.join(a.meet(x, y), a.meet(x, z)));
    }

    #[test]
    fn trivial_and_boolean_closures() {
        let lat = subspace_lattice(&spec(1, &[], 50)).unwrap();
        assert_eq!(lat.algebra.labels(), ["0", "Q^1"]);

        let lat = subspace_lattice(&spec(2, &[&[&[1, 0]]], 50)).unwrap();
        assert_eq!(lat.algebra.labels(), ["0", "span(1,0)", "span(0,1)", "Q^2"]);
        assert!(find_isomorphism(&lat.algebra, &boolean_algebra(2).unwrap(), true).is_some());
        assert!(check_laws(&lat.algebra, AlgebraClass::Boolean).passed());
    }

    #[test]
    fn capacity_error_reports_partial_size() {
        let err = subspace_lattice(&spec(2, &[&[&[1, 0]], &[&[1, 1]]], 4)).unwrap_err();
        match err {
            Error::Capacity { reached, bound, .. } => {
                assert_eq!(bound, 4);
                assert_eq!(reached, 5);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rejects_dependent_and_misshaped_generators() {
        assert!(subspace_lattice(&spec(2, &[&[&[1, 0], &[2, 0]]], 50)).is_err());
        assert!(subspace_lattice(&spec(2, &[&[&[1, 0, 0]]], 50)).is_err());
        assert!(subspace_lattice(&spec(2, &[], 1)).is_err());
    }

    #[test]
    fn json_spec_with_rational_strings() {
        let text = r#"{"dim":2, "generators":[[["1","0"]],[["1/2","1/2"]]], "size_cap":50}"#;
        let s: LatticeSpec<Rational> = LatticeSpec::from_json(text).unwrap();
        let lat = subspace_lattice(&s).unwrap();
        assert_eq!(lat.algebra.len(), 6);
        assert!(LatticeSpec::<Rational>::from_json(r#"{"dim":2,"generators":[[["x","0"]]],"size_cap":5}"#).is_err());
    }

    #[test]
    fn three_dimensional_closure() {
        // a line and a plane in general position
        let lat = subspace_lattice(&spec(3, &[&[&[1, 0, 0]], &[&[0, 1, 0], &[0, 0, 1]]], 50)).unwrap();
        assert!(check_laws(&lat.algebra, AlgebraClass::Orthomodular).passed());
        let lat = subspace_lattice(&spec(3, &[&[&[1, 1, 0]], &[&[0, 1, 1]]], 200)).unwrap();
        assert!(check_laws(&lat.algebra, AlgebraClass::Orthomodular).passed());
    }

    fn assert_closed(lat: &SubspaceLattice<Ratio<i64>>, d: usize) {
        for a in &lat.elements {
            assert_eq!(a.rank() + a.ortho().rank(), d);
            assert!(lat.elements.contains(&a.ortho()));
            for b in &lat.elements {
                assert!(lat.elements.contains(&a.meet(b)));
                assert!(lat.elements.contains(&a.join(b)));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_plane_closures_are_orthomodular_fixpoints(
            lines in prop::collection::vec((-3i64..=3, -3i64..=3), 0..4)
        ) {
            let gens: Vec<Vec<Vec<Ratio<i64>>>> = lines
                .iter()
                .filter(|(x, y)| *x != 0 || *y != 0)
                .map(|&(x, y)| vec![vec![Ratio::from_integer(x), Ratio::from_integer(y)]])
                .collect();
            let s = LatticeSpec { dim: 2, generators: gens, size_cap: 64 };
            let lat = subspace_lattice(&s).unwrap();
            prop_assert!(check_laws(&lat.algebra, AlgebraClass::Orthomodular).passed());
            assert_closed(&lat, 2);
            // re-closing the closure is a fixpoint
            let again = LatticeSpec {
                dim: 2,
                generators: lat.elements.iter().map(|e| e.basis().to_vec()).collect(),
                size_cap: 64,
            };
            prop_assert_eq!(subspace_lattice(&again).unwrap().algebra.len(), lat.algebra.len());
        }

        #[test]
        fn prop_space_closures_within_cap(
            vs in prop::collection::vec(prop::collection::vec(-1i64..=1, 3), 1..3)
        ) {
            let gens: Vec<Vec<Vec<Ratio<i64>>>> = vs
                .iter()
                .filter(|v| v.iter().any(|&x| x != 0))
                .map(|v| vec![v.iter().map(|&x| Ratio::from_integer(x)).collect()])
                .collect();
            let s = LatticeSpec { dim: 3, generators: gens, size_cap: 200 };
            match subspace_lattice(&s) {
                Ok(lat) => {
                    prop_assert!(check_laws(&lat.algebra, AlgebraClass::Orthomodular).passed());
                    assert_closed(&lat, 3);
                }
                Err(Error::Capacity { .. }) => {}
                Err(e) => prop_assert!(false, "unexpected error {}", e),
            }
        }
    }
}
